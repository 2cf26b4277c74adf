//! Constant-time-per-cell error update.
//!
//! With `e[i][j]` the error of the window ending at kernel column `j` at
//! step `i`, shifting both the data and the kernel back by one sample gives
//!
//! ```text
//! e[i][j] = e[i-1][j-1] + |d(i) - k(j)|^2 - |d(i-n) - k(j)|^2      (j-1 taken mod n)
//! ```
//!
//! The subtracted term was computed `n` steps earlier as the added term, so
//! it is read back from an `n x n` cache indexed by `(step mod n, j)` and no
//! frame history is kept.

use alloc::vec;
use alloc::vec::Vec;

use super::{Matcher, WarmStart};
use crate::error::{Error, Result};
use crate::frame::{dist2, ModeId, SampleFrame};
use crate::kernel::{KernelSet, ModeKernel};
use crate::select::{mode_argmin, Prediction, Selection};

/// Rolling error vector and square-term cache for one mode.
#[derive(Debug, Clone)]
pub struct ModeErrorState {
    mode_id: ModeId,
    n: usize,
    // Logical e[j] lives at errors[(j + offset) % n]. Shifting e by one
    // column each step is then a decrement of `offset`.
    errors: Vec<f64>,
    offset: usize,
    // cache[r * n + j] = |d(i') - k(j)|^2 for the step i' with i' mod n = r
    cache: Vec<f64>,
    steps: u64,
}

impl ModeErrorState {
    /// All-zero errors and cache.
    pub fn new(kernel: &ModeKernel) -> Self {
        let n = kernel.n();
        ModeErrorState {
            mode_id: kernel.mode_id().clone(),
            n,
            errors: vec![0.0; n],
            offset: 0,
            cache: vec![0.0; n * n],
            steps: 0,
        }
    }

    /// State consistent with a history of `n` zero frames: every cache cell
    /// holds `|k(j)|^2` and every error the total kernel energy.
    pub fn with_zero_history(kernel: &ModeKernel) -> Self {
        let mut s = Self::new(kernel);
        let zero = [0.0; 4];
        let energy: Vec<f64> = kernel.columns().iter().map(|c| dist2(&zero, c)).collect();
        let total: f64 = energy.iter().sum();
        for row in s.cache.chunks_exact_mut(s.n) {
            row.copy_from_slice(&energy);
        }
        s.errors.iter_mut().for_each(|e| *e = total);
        s
    }

    pub fn from_warm_start(kernel: &ModeKernel, warm: WarmStart) -> Self {
        match warm {
            WarmStart::Zeros => Self::new(kernel),
            WarmStart::ZeroHistory => Self::with_zero_history(kernel),
        }
    }

    pub fn mode_id(&self) -> &ModeId {
        &self.mode_id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step_count(&self) -> u64 {
        self.steps
    }

    pub fn is_warm(&self) -> bool {
        self.steps >= self.n as u64
    }

    /// Fold one frame into the state.
    ///
    /// A non-finite frame is rejected and leaves the state untouched.
    pub fn step(&mut self, kernel: &ModeKernel, frame: &SampleFrame) -> Result<()> {
        if kernel.n() != self.n {
            return Err(Error::Structure(alloc::format!(
                "state for {} has n = {}, kernel {} has n = {}",
                self.mode_id,
                self.n,
                kernel.mode_id(),
                kernel.n()
            )));
        }
        debug_assert_eq!(kernel.mode_id(), &self.mode_id);
        let d = frame.angles();
        if !d.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("sample frame"));
        }
        self.advance(kernel, d);
        Ok(())
    }

    #[inline]
    fn advance(&mut self, kernel: &ModeKernel, d: &[f64; 4]) {
        let n = self.n;
        let row = (self.steps % n as u64) as usize;
        let cache_row = &mut self.cache[row * n..(row + 1) * n];

        // new logical e[j] overwrites the slot that held old logical e[j-1]
        self.offset = if self.offset == 0 { n - 1 } else { self.offset - 1 };
        let (tail, head) = self.errors.split_at_mut(self.offset);
        let slots = head.iter_mut().chain(tail.iter_mut());

        for ((e, s), col) in slots.zip(cache_row.iter_mut()).zip(kernel.columns()) {
            let q = dist2(d, col);
            *e += q - *s;
            *s = q;
        }
        self.steps += 1;
    }

    /// Current error of 0-based rotation `j`.
    pub fn error(&self, j: usize) -> f64 {
        self.errors[(j + self.offset) % self.n]
    }

    /// Errors in logical `j` order.
    pub fn errors(&self) -> impl Iterator<Item = f64> + '_ {
        let (tail, head) = self.errors.split_at(self.offset);
        head.iter().chain(tail.iter()).copied()
    }

    pub fn argmin(&self) -> Result<(usize, f64)> {
        mode_argmin(self.errors())
    }

    /// Rebuild the error vector from the cache alone, discarding any
    /// accumulated rounding drift. `O(n^2)`.
    pub fn resync(&mut self) {
        if self.steps == 0 {
            return;
        }
        let n = self.n;
        let last = ((self.steps - 1) % n as u64) as usize;
        for j in 0..n {
            let mut acc = 0.0;
            for t in 0..n {
                let r = (last + n - t) % n;
                let c = (j + n - t) % n;
                acc += self.cache[r * n + c];
            }
            self.errors[(j + self.offset) % n] = acc;
        }
    }

    /// Bytes held by the square-term cache, exactly `n^2` scalars.
    pub fn cache_bytes(&self) -> usize {
        self.cache.len() * core::mem::size_of::<f64>()
    }

    pub fn error_bytes(&self) -> usize {
        self.errors.len() * core::mem::size_of::<f64>()
    }
}

/// Incremental matcher over a whole kernel set, `O(N * M)` per step.
#[derive(Debug, Clone)]
pub struct EfficientMatcher {
    kernels: KernelSet,
    states: Vec<ModeErrorState>,
    warm_start: WarmStart,
    resync_every: Option<u64>,
    minima: Vec<(usize, f64)>,
    steps: u64,
}

impl EfficientMatcher {
    /// Zero-initialized errors and cache.
    pub fn new(kernels: KernelSet) -> Self {
        Self::with_warm_start(kernels, WarmStart::Zeros)
    }

    pub fn with_warm_start(kernels: KernelSet, warm_start: WarmStart) -> Self {
        let states = kernels.iter().map(|k| ModeErrorState::from_warm_start(k, warm_start)).collect();
        EfficientMatcher {
            minima: Vec::with_capacity(kernels.len()),
            kernels,
            states,
            warm_start,
            resync_every: None,
            steps: 0,
        }
    }

    /// Rebuild every error vector from its cache once every `every` steps.
    /// `None` (the default) never resynchronizes.
    pub fn set_resync_every(&mut self, every: Option<u64>) {
        self.resync_every = every.filter(|&r| r > 0);
    }

    pub fn states(&self) -> &[ModeErrorState] {
        &self.states
    }

    pub fn footprint(&self) -> super::Footprint {
        super::Footprint {
            cache_bytes: self.states.iter().map(ModeErrorState::cache_bytes).sum(),
            error_bytes: self.states.iter().map(ModeErrorState::error_bytes).sum(),
            history_bytes: 0,
        }
    }
}

impl Matcher for EfficientMatcher {
    fn kernels(&self) -> &KernelSet {
        &self.kernels
    }

    fn step(&mut self, frame: &SampleFrame) -> Result<Prediction> {
        let d = frame.angles();
        if !d.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("sample frame"));
        }
        for (state, kernel) in self.states.iter_mut().zip(self.kernels.iter()) {
            state.advance(kernel, d);
        }
        self.steps += 1;
        if let Some(every) = self.resync_every {
            if self.steps.is_multiple_of(every) {
                self.states.iter_mut().for_each(ModeErrorState::resync);
            }
        }

        self.minima.clear();
        for state in &self.states {
            self.minima.push(state.argmin()?);
        }
        let sel = Selection::from_minima(&self.minima, |m| self.states[m].n)?;
        let warm = self.states.iter().all(ModeErrorState::is_warm);
        Ok(Prediction::from_selection(frame.t_index(), sel, warm))
    }

    fn steps(&self) -> u64 {
        self.steps
    }

    fn reset(&mut self) {
        let warm_start = self.warm_start;
        for (state, kernel) in self.states.iter_mut().zip(self.kernels.iter()) {
            *state = ModeErrorState::from_warm_start(kernel, warm_start);
        }
        self.steps = 0;
    }
}
