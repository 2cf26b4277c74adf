use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::{ModeId, SampleFrame, CHANNELS};
use crate::kernel::ModeKernel;

/// Shortest stride kept by [`segment_strides`].
pub const MIN_STRIDE_LEN: usize = 4;

/// Frames from one heel strike up to (not including) the next.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrideSegment<'a> {
    frames: &'a [SampleFrame],
}

impl<'a> StrideSegment<'a> {
    /// Contiguous `t_index` run of at least [`MIN_STRIDE_LEN`] frames.
    pub fn new(frames: &'a [SampleFrame]) -> Result<Self> {
        if frames.len() < MIN_STRIDE_LEN {
            return Err(Error::arg(alloc::format!(
                "stride of {} frames is shorter than {MIN_STRIDE_LEN}",
                frames.len()
            )));
        }
        if !is_contiguous(frames) {
            return Err(Error::arg("stride frames are not contiguous in t_index"));
        }
        Ok(StrideSegment { frames })
    }

    pub fn frames(&self) -> &'a [SampleFrame] {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn is_contiguous(frames: &[SampleFrame]) -> bool {
    frames.windows(2).all(|w| w[0].t_index().checked_add(1) == Some(w[1].t_index()))
}

/// Cut `frames` into one stride per consecutive heel-strike pair.
///
/// Strides shorter than [`MIN_STRIDE_LEN`] or spanning a `t_index` gap are
/// dropped. It is an error if nothing usable remains.
pub fn segment_strides<'a>(frames: &'a [SampleFrame], hs: &[usize]) -> Result<Vec<StrideSegment<'a>>> {
    if hs.len() < 2 {
        return Err(Error::InsufficientData(alloc::format!(
            "{} heel strikes, need at least 2",
            hs.len()
        )));
    }
    if hs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::arg("heel strikes must be strictly ascending"));
    }
    if *hs.last().unwrap() > frames.len() {
        return Err(Error::arg("heel strike index past the end of the stream"));
    }
    let strides: Vec<_> = hs
        .windows(2)
        .filter_map(|w| StrideSegment::new(&frames[w[0]..w[1]]).ok())
        .collect();
    if strides.is_empty() {
        return Err(Error::InsufficientData("no usable strides".into()));
    }
    Ok(strides)
}

/// Linearly interpolate a trajectory onto `n` uniformly spaced points from
/// its first to its last sample. Both endpoints are kept exactly.
pub fn resample_columns(src: &[[f64; CHANNELS]], n: usize) -> Result<Vec<[f64; CHANNELS]>> {
    if n < 2 {
        return Err(Error::arg(alloc::format!("target length {n} < 2")));
    }
    if src.len() < 2 {
        return Err(Error::arg("need at least 2 samples to resample"));
    }
    let span = src.len() - 1;
    let steps = n - 1;
    Ok((0..n)
        .map(|k| {
            // k * span / steps, with the integer part found exactly
            let num = k * span;
            let idx = num / steps;
            let frac = (num % steps) as f64 / steps as f64;
            if frac == 0.0 {
                return src[idx];
            }
            let (a, b) = (&src[idx], &src[idx + 1]);
            core::array::from_fn(|c| a[c] + (b[c] - a[c]) * frac)
        })
        .collect())
}

/// Resample one stride to `n` phase points.
pub fn resample_stride(segment: &StrideSegment<'_>, n: usize) -> Result<Vec<[f64; CHANNELS]>> {
    let cols: Vec<[f64; CHANNELS]> = segment.frames.iter().map(|f| *f.angles()).collect();
    resample_columns(&cols, n)
}

/// Average strides into a kernel.
///
/// The kernel length is the rounded mean stride length. Every stride is
/// resampled to it and the kernel is the per-sample mean. Column 0 is the
/// heel-strike sample. The result does not depend on the order of `strides`.
pub fn build_kernel(mode_id: ModeId, strides: &[StrideSegment<'_>], sample_rate_hz: f64) -> Result<ModeKernel> {
    if strides.is_empty() {
        return Err(Error::InsufficientData(alloc::format!("no strides for mode {mode_id}")));
    }
    if strides.len() < 3 {
        log::warn!("kernel {mode_id} built from only {} stride(s)", strides.len());
    }
    let total: usize = strides.iter().map(StrideSegment::len).sum();
    let n = libm::round(total as f64 / strides.len() as f64) as usize;

    let mut resampled = strides
        .iter()
        .map(|s| resample_stride(s, n))
        .collect::<Result<Vec<_>>>()?;
    // fixed summation order makes the mean independent of input order
    resampled.sort_by(|a, b| {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let count = resampled.len() as f64;
    let columns = (0..n)
        .map(|j| {
            let mut acc = [0.0; CHANNELS];
            for r in &resampled {
                for c in 0..CHANNELS {
                    acc[c] += r[j][c];
                }
            }
            acc.map(|v| v / count)
        })
        .collect();
    ModeKernel::new(mode_id, columns, sample_rate_hz)
}
