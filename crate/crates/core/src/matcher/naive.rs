use alloc::vec;
use alloc::vec::Vec;

use super::history::HistoryBuffer;
use super::Matcher;
use crate::error::{Error, Result};
use crate::frame::{dist2, SampleFrame, CHANNELS};
use crate::kernel::{KernelSet, ModeKernel};
use crate::select::{mode_argmin, Prediction, Selection};

/// Full-rescan error vector for one kernel against the frame history.
///
/// `out[j]` (0-based) is the squared Frobenius distance between the last
/// `n` frames and the circular kernel window that ends at column `j`:
/// `sum_t |d(i - t) - k((j - t) mod n)|^2` for `t = 0..n`.
pub fn naive_errors(kernel: &ModeKernel, history: &HistoryBuffer) -> Result<Vec<f64>> {
    let mut out = vec![0.0; kernel.n()];
    let mut window = Vec::with_capacity(kernel.n());
    naive_errors_into(kernel, history, &mut window, &mut out)?;
    Ok(out)
}

fn naive_errors_into(
    kernel: &ModeKernel,
    history: &HistoryBuffer,
    window: &mut Vec<[f64; CHANNELS]>,
    out: &mut [f64],
) -> Result<()> {
    let n = kernel.n();
    if history.capacity() < n {
        return Err(Error::Structure(alloc::format!(
            "history holds {} frames, kernel {} needs {n}",
            history.capacity(),
            kernel.mode_id()
        )));
    }
    debug_assert_eq!(out.len(), n);
    // D matrix, newest first
    window.clear();
    window.extend((0..n).map(|t| *history.get(t)));

    let cols = kernel.columns();
    for (j, e) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        // t = 0..=j pairs with columns j, j-1, .., 0; the rest wraps to n-1, ..
        for (d, c) in window[..=j].iter().zip(cols[..=j].iter().rev()) {
            acc += dist2(d, c);
        }
        for (d, c) in window[j + 1..].iter().zip(cols[j + 1..].iter().rev()) {
            acc += dist2(d, c);
        }
        *e = acc;
    }
    Ok(())
}

/// Reference matcher: keeps a zero-filled frame history and recomputes
/// every error from scratch at each step, `O(N^2 * M)`.
#[derive(Debug, Clone)]
pub struct NaiveMatcher {
    kernels: KernelSet,
    history: HistoryBuffer,
    errors: Vec<Vec<f64>>,
    window: Vec<[f64; CHANNELS]>,
    steps: u64,
}

impl NaiveMatcher {
    pub fn new(kernels: KernelSet) -> Self {
        let history = HistoryBuffer::new(kernels.max_len());
        let errors = kernels.iter().map(|k| vec![0.0; k.n()]).collect();
        NaiveMatcher {
            window: Vec::with_capacity(kernels.max_len()),
            kernels,
            history,
            errors,
            steps: 0,
        }
    }

    /// Error vectors computed at the last step, in kernel-set order.
    pub fn errors(&self) -> &[Vec<f64>] {
        &self.errors
    }

    pub fn history(&self) -> &HistoryBuffer {
        &self.history
    }

    pub fn footprint(&self) -> super::Footprint {
        super::Footprint {
            cache_bytes: 0,
            error_bytes: self.errors.iter().map(|e| e.len() * core::mem::size_of::<f64>()).sum(),
            history_bytes: self.history.size_bytes(),
        }
    }
}

impl Matcher for NaiveMatcher {
    fn kernels(&self) -> &KernelSet {
        &self.kernels
    }

    fn step(&mut self, frame: &SampleFrame) -> Result<Prediction> {
        self.history.push(frame);
        self.steps += 1;
        for (k, out) in self.kernels.iter().zip(self.errors.iter_mut()) {
            naive_errors_into(k, &self.history, &mut self.window, out)?;
        }
        let minima = self
            .errors
            .iter()
            .map(|e| mode_argmin(e.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        let sel = Selection::from_minima(&minima, |m| self.errors[m].len())?;
        let warm = self.steps >= self.kernels.max_len() as u64;
        Ok(Prediction::from_selection(frame.t_index(), sel, warm))
    }

    fn steps(&self) -> u64 {
        self.steps
    }

    fn reset(&mut self) {
        self.history.clear();
        self.errors.iter_mut().flatten().for_each(|e| *e = 0.0);
        self.steps = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::ModeId;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kernel(cols: Vec<[f64; 4]>) -> ModeKernel {
        ModeKernel::new(ModeId::new("k").unwrap(), cols, 230.0).unwrap()
    }

    fn random_cols(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 4]> {
        (0..n).map(|_| core::array::from_fn(|_| rng.random_range(-40.0..40.0))).collect()
    }

    /// Explicit matrices: D is 4 x n oldest-to-newest, K_j is the doubled
    /// kernel sliced to the n columns ending at column j.
    fn frobenius_oracle(cols: &[[f64; 4]], hist_oldest_first: &[[f64; 4]]) -> Vec<f64> {
        let n = cols.len();
        let doubled: Vec<[f64; 4]> = cols.iter().chain(cols.iter()).copied().collect();
        (0..n)
            .map(|j| {
                // 1-based j+1 ends the window; columns (j+1)+1 ..= (j+1)+n of the doubled kernel
                let start = j + 1;
                let mut s = 0.0;
                for col in 0..n {
                    for row in 0..4 {
                        let diff = hist_oldest_first[col][row] - doubled[start + col][row];
                        s += diff * diff;
                    }
                }
                s
            })
            .collect()
    }

    #[test]
    fn matches_explicit_frobenius_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cols = random_cols(&mut rng, 13);
        let frames = random_cols(&mut rng, 13);
        let mut h = HistoryBuffer::new(13);
        for (t, f) in frames.iter().enumerate() {
            h.push(&SampleFrame::new(t as u64, *f).unwrap());
        }
        let got = naive_errors(&kernel(cols.clone()), &h).unwrap();
        let want = frobenius_oracle(&cols, &frames);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12 * w.abs(), "{g} vs {w}");
        }
    }

    #[test]
    fn perfect_match_is_zero_only_at_its_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cols = random_cols(&mut rng, 10);
        let k = kernel(cols.clone());
        let mut h = HistoryBuffer::new(10);
        // window ending at column 6 (0-based): columns 7,8,9,0,..,6
        for t in 0..10 {
            let c = cols[(7 + t) % 10];
            h.push(&SampleFrame::new(t as u64, c).unwrap());
        }
        let e = naive_errors(&k, &h).unwrap();
        for (j, v) in e.iter().enumerate() {
            if j == 6 {
                assert_eq!(*v, 0.0);
            } else {
                assert!(*v > 0.0);
            }
        }
    }

    #[test]
    fn zero_history_gives_equal_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cols = random_cols(&mut rng, 7);
        let total: f64 = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>()).sum();
        let e = naive_errors(&kernel(cols), &HistoryBuffer::new(7)).unwrap();
        for v in e {
            assert!((v - total).abs() < 1e-9 * total);
        }
    }

    #[test]
    fn short_history_is_structural_error() {
        let k = kernel(vec![[0.0; 4]; 5]);
        assert!(matches!(naive_errors(&k, &HistoryBuffer::new(4)), Err(Error::Structure(_))));
    }
}
