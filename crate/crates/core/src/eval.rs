//! Scoring predictions against ground truth.
//!
//! Accuracy is correct predictions over scored predictions. Phase error is
//! the circular distance between predicted and true phase and is only
//! aggregated over correctly classified samples; the largest phase error
//! seen on misclassified samples is reported separately. Warm-up samples
//! are excluded by default.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::frame::ModeId;
use crate::kernel::KernelSet;
use crate::select::Prediction;
use crate::stream::LabeledStream;

/// Wraparound distance between two phases in `(0, 1]`, in `[0, 0.5]`.
pub fn circular_phase_error(predicted: f64, truth: f64) -> Result<f64> {
    for p in [predicted, truth] {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::arg(alloc::format!("phase {p} outside (0, 1]")));
        }
    }
    let d = (predicted - truth).abs();
    Ok(d.min(1.0 - d))
}

/// Rows are the true mode, columns the predicted mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    modes: Vec<ModeId>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(modes: Vec<ModeId>) -> Self {
        let m = modes.len();
        ConfusionMatrix { modes, counts: vec![0; m * m] }
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn count(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.modes.len() + predicted]
    }

    pub fn add(&mut self, truth: usize, predicted: usize) {
        let m = self.modes.len();
        self.counts[truth * m + predicted] += 1;
    }

    pub fn row_total(&self, truth: usize) -> u64 {
        let m = self.modes.len();
        self.counts[truth * m..(truth + 1) * m].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.modes.len()).map(|i| self.count(i, i)).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.trace() as f64 / t as f64,
        }
    }
}

/// Phase error summary for one true mode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseErrorStats {
    /// Correctly classified samples contributing to mean/std/max.
    pub count: u64,
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    /// Misclassified samples and their largest phase error.
    pub misclassified: u64,
    pub misclassified_max: f64,
}

#[derive(Default)]
struct PhaseAccumulator {
    n: u64,
    sum: f64,
    sum_sq: f64,
    max: f64,
    miss: u64,
    miss_max: f64,
}

impl PhaseAccumulator {
    fn correct(&mut self, e: f64) {
        self.n += 1;
        self.sum += e;
        self.sum_sq += e * e;
        self.max = self.max.max(e);
    }

    fn wrong(&mut self, e: f64) {
        self.miss += 1;
        self.miss_max = self.miss_max.max(e);
    }

    fn merge(&mut self, o: &PhaseAccumulator) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.max = self.max.max(o.max);
        self.miss += o.miss;
        self.miss_max = self.miss_max.max(o.miss_max);
    }

    fn finish(&self) -> PhaseErrorStats {
        let (mean, std) = if self.n == 0 {
            (0.0, 0.0)
        } else {
            let n = self.n as f64;
            let mean = self.sum / n;
            let var = if self.n > 1 { ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
            (mean.min(self.max), libm::sqrt(var))
        };
        PhaseErrorStats {
            count: self.n,
            mean,
            std,
            max: self.max,
            misclassified: self.miss,
            misclassified_max: self.miss_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Score {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    /// Per true mode, in confusion-matrix order.
    pub phase: Vec<PhaseErrorStats>,
    pub overall_phase: PhaseErrorStats,
}

/// Which samples [`score_with`] counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScoreOptions {
    /// Skip predictions made before every kernel window was full.
    pub exclude_warmup: bool,
    /// Skip this many samples starting at each change of the true mode, so
    /// only steady-state windows are scored.
    pub transition_guard: usize,
}

/// Score `preds` against `truth`.
///
/// `pred_modes[k]` names the mode that `Prediction::mode == k` refers to.
/// Predictions and labels are paired by position and must carry the same
/// `t_index`. The confusion matrix uses `pred_modes` order, followed by
/// any true modes that no prediction can produce.
pub fn score(
    preds: &[Prediction],
    pred_modes: &[ModeId],
    truth: &LabeledStream,
    exclude_warmup: bool,
) -> Result<Score> {
    score_with(preds, pred_modes, truth, &ScoreOptions { exclude_warmup, transition_guard: 0 })
}

/// [`score`] with explicit sample selection.
pub fn score_with(
    preds: &[Prediction],
    pred_modes: &[ModeId],
    truth: &LabeledStream,
    opts: &ScoreOptions,
) -> Result<Score> {
    if preds.len() != truth.frames.len() || truth.labels.len() != truth.frames.len() {
        return Err(Error::arg(alloc::format!(
            "{} predictions for {} labelled frames",
            preds.len(),
            truth.labels.len()
        )));
    }
    let mut modes: Vec<ModeId> = pred_modes.to_vec();
    for l in &truth.labels {
        if !modes.contains(&l.mode) {
            modes.push(l.mode.clone());
        }
    }
    let mut confusion = ConfusionMatrix::new(modes);
    let mut acc: Vec<PhaseAccumulator> = (0..confusion.modes.len()).map(|_| PhaseAccumulator::default()).collect();

    let mut last_label = 0usize;
    let mut since_change = usize::MAX;
    for (i, ((p, f), l)) in preds.iter().zip(&truth.frames).zip(&truth.labels).enumerate() {
        since_change = if i > 0 && truth.labels[i - 1].mode != l.mode { 0 } else { since_change.saturating_add(1) };
        if p.t_index != f.t_index() {
            return Err(Error::arg(alloc::format!(
                "prediction t_index {} does not match label t_index {}",
                p.t_index,
                f.t_index()
            )));
        }
        if p.mode >= pred_modes.len() {
            return Err(Error::arg(alloc::format!("prediction mode {} out of range", p.mode)));
        }
        if (opts.exclude_warmup && !p.warm) || since_change < opts.transition_guard {
            continue;
        }
        // labels usually repeat; avoid a linear search per sample
        let t = if confusion.modes[last_label] == l.mode {
            last_label
        } else {
            confusion.modes.iter().position(|m| *m == l.mode).expect("label mode registered above")
        };
        last_label = t;
        confusion.add(t, p.mode);
        let e = circular_phase_error(p.phase, l.phase)?;
        if p.mode == t {
            acc[t].correct(e);
        } else {
            acc[t].wrong(e);
        }
    }
    if confusion.total() == 0 {
        return Err(Error::InsufficientData("no predictions left to score".into()));
    }
    let mut all = PhaseAccumulator::default();
    acc.iter().for_each(|a| all.merge(a));
    Ok(Score {
        accuracy: confusion.accuracy(),
        phase: acc.iter().map(PhaseAccumulator::finish).collect(),
        overall_phase: all.finish(),
        confusion,
    })
}

/// How per-mode errors are reported in a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorScale {
    /// Sum of squared errors, degrees squared.
    #[default]
    SumOfSquares,
    /// `sqrt(e / (4 * N_m))`, degrees.
    Rms,
}

/// Root-mean-square angle error for a sum of squares over `4 * n` cells.
pub fn rms_error(sse: f64, n: usize) -> f64 {
    libm::sqrt(sse.max(0.0) / (4 * n) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t_index: u64,
    pub errors: Vec<f64>,
    pub mode: usize,
    pub phase: f64,
}

/// Flat per-timestep table of every mode's minimum error next to the chosen
/// mode and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub modes: Vec<ModeId>,
    pub scale: ErrorScale,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    /// Rows where the chosen mode differs from the previous row.
    pub fn switches(&self) -> Vec<usize> {
        self.rows.windows(2).enumerate().filter(|(_, w)| w[0].mode != w[1].mode).map(|(i, _)| i + 1).collect()
    }
}

/// Build a trace over `window` (positions into `preds`; the whole sequence
/// when `None`).
pub fn trace(preds: &[Prediction], kernels: &KernelSet, window: Option<Range<usize>>, scale: ErrorScale) -> Trace {
    let window = window.unwrap_or(0..preds.len());
    let window = window.start.min(preds.len())..window.end.min(preds.len());
    let rows = preds[window]
        .iter()
        .map(|p| TraceRow {
            t_index: p.t_index,
            errors: p
                .min_errors
                .iter()
                .zip(kernels.iter())
                .map(|(&e, k)| match scale {
                    ErrorScale::SumOfSquares => e,
                    ErrorScale::Rms => rms_error(e, k.n()),
                })
                .collect(),
            mode: p.mode,
            phase: p.phase,
        })
        .collect();
    Trace { modes: kernels.mode_ids(), scale, rows }
}
