//! Mode/phase estimators.

mod efficient;
mod history;
mod naive;

use alloc::vec::Vec;

pub use efficient::{EfficientMatcher, ModeErrorState};
pub use history::HistoryBuffer;
pub use naive::{naive_errors, NaiveMatcher};

use crate::error::Result;
use crate::frame::SampleFrame;
use crate::kernel::KernelSet;
use crate::select::Prediction;

/// Initial contents of the incremental state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WarmStart {
    /// Errors and cache start at zero. Agrees with the full rescan once
    /// every mode has seen `N_m` frames.
    #[default]
    Zeros,
    /// Errors and cache describe a history of zero frames, which is exactly
    /// what [`NaiveMatcher`] sees before data arrives. The two matchers then
    /// agree from the first frame on.
    ZeroHistory,
}

/// Memory held by a matcher's mutable state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Footprint {
    pub cache_bytes: usize,
    pub error_bytes: usize,
    pub history_bytes: usize,
}

/// A streaming mode/phase estimator.
///
/// A matcher is single-writer: one caller steps it at a time.
pub trait Matcher {
    fn kernels(&self) -> &KernelSet;

    /// Consume one frame and report the best `(mode, phase)`.
    fn step(&mut self, frame: &SampleFrame) -> Result<Prediction>;

    /// Frames consumed since construction or the last reset.
    fn steps(&self) -> u64;

    fn reset(&mut self);

    fn run<'a, I>(&mut self, frames: I) -> Result<Vec<Prediction>>
    where
        I: IntoIterator<Item = &'a SampleFrame>,
        Self: Sized,
    {
        frames.into_iter().map(|f| self.step(f)).collect()
    }
}

/// Full-rescan predictions for a stream.
pub fn run_naive(kernels: &KernelSet, frames: &[SampleFrame]) -> Result<Vec<Prediction>> {
    NaiveMatcher::new(kernels.clone()).run(frames)
}

/// Incremental predictions for a stream, zero-initialized.
pub fn run_efficient(kernels: &KernelSet, frames: &[SampleFrame]) -> Result<Vec<Prediction>> {
    EfficientMatcher::new(kernels.clone()).run(frames)
}
