//! Kernel construction from steady-state recordings: find heel strikes,
//! cut strides, resample each stride to a common length and average.

mod peaks;
mod stride;

pub use peaks::{detect_heel_strikes, moving_average, PeakConfig};
pub use stride::{
    build_kernel, resample_columns, resample_stride, segment_strides, StrideSegment, MIN_STRIDE_LEN,
};

use crate::error::{Error, Result};
use crate::frame::{ModeId, SampleFrame};
use crate::kernel::ModeKernel;

/// Kernel and the number of strides averaged into it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedKernel {
    pub kernel: ModeKernel,
    pub strides: usize,
}

/// Detect heel strikes on `hs_signal` (one value per frame), segment and
/// average.
pub fn train_kernel(
    mode_id: ModeId,
    frames: &[SampleFrame],
    hs_signal: &[f64],
    sample_rate_hz: f64,
    cfg: &PeakConfig,
) -> Result<TrainedKernel> {
    if hs_signal.len() != frames.len() {
        return Err(Error::arg(alloc::format!(
            "heel-strike signal has {} samples for {} frames",
            hs_signal.len(),
            frames.len()
        )));
    }
    let hs = detect_heel_strikes(hs_signal, sample_rate_hz, cfg)?;
    let strides = segment_strides(frames, &hs)?;
    let kernel = build_kernel(mode_id, &strides, sample_rate_hz)?;
    Ok(TrainedKernel { kernel, strides: strides.len() })
}
