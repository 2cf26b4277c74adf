use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::{ModeId, CHANNELS};

/// Average one-stride trajectory for one locomotion mode.
///
/// Column 0 (reported as `j = 1`) is the heel-strike instant. Only the `n`
/// distinct columns are stored; matching wraps around with `j mod n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeKernel {
    mode_id: ModeId,
    columns: Vec<[f64; CHANNELS]>,
    sample_rate_hz: f64,
}

impl ModeKernel {
    pub fn new(mode_id: ModeId, columns: Vec<[f64; CHANNELS]>, sample_rate_hz: f64) -> Result<Self> {
        if columns.len() < 2 {
            return Err(Error::arg(alloc::format!(
                "kernel {mode_id} needs at least 2 columns, got {}",
                columns.len()
            )));
        }
        if !columns.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("kernel column"));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::arg("kernel sample rate must be positive"));
        }
        Ok(ModeKernel { mode_id, columns, sample_rate_hz })
    }

    pub fn mode_id(&self) -> &ModeId {
        &self.mode_id
    }

    /// Stride length `N_m` in samples.
    #[inline]
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn columns(&self) -> &[[f64; CHANNELS]] {
        &self.columns
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    /// Finest phase step this kernel can report, `1 / N_m`.
    pub fn phase_resolution(&self) -> f64 {
        1.0 / self.n() as f64
    }
}

/// Ordered, non-empty collection of kernels with unique mode ids.
///
/// The order is significant: it is the tie-break order for mode selection
/// and the column order of every per-mode output.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    kernels: Vec<ModeKernel>,
}

impl KernelSet {
    pub fn new(kernels: Vec<ModeKernel>) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::arg("kernel set is empty"));
        }
        for (i, k) in kernels.iter().enumerate() {
            if kernels[..i].iter().any(|o| o.mode_id == k.mode_id) {
                return Err(Error::arg(alloc::format!("duplicate mode id {}", k.mode_id)));
            }
        }
        Ok(KernelSet { kernels })
    }

    pub fn len(&self) -> usize {
        self.kernels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, mode: usize) -> Option<&ModeKernel> {
        self.kernels.get(mode)
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ModeKernel> {
        self.kernels.iter()
    }

    pub fn as_slice(&self) -> &[ModeKernel] {
        &self.kernels
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.kernels.iter().position(|k| k.mode_id.as_str() == id)
    }

    pub fn mode_ids(&self) -> Vec<ModeId> {
        self.kernels.iter().map(|k| k.mode_id.clone()).collect()
    }

    /// Longest kernel, `N = max N_m`.
    pub fn max_len(&self) -> usize {
        self.kernels.iter().map(ModeKernel::n).max().unwrap_or(0)
    }
}

impl<'a> IntoIterator for &'a KernelSet {
    type Item = &'a ModeKernel;
    type IntoIter = core::slice::Iter<'a, ModeKernel>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}
