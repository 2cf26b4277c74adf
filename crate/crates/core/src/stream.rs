use alloc::vec::Vec;

use crate::frame::{ModeId, SampleFrame};

/// Ground truth attached to one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub mode: ModeId,
    /// Gait phase in `(0, 1]`; `1/L` at the heel-strike sample of a stride
    /// `L` samples long, so it lines up with the matcher's `j* / N_m`.
    pub phase: f64,
}

/// Frames plus ground-truth labels.
///
/// `foot` holds the right/left foot angles used only for heel-strike
/// detection; it is either empty or as long as `frames`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledStream {
    pub frames: Vec<SampleFrame>,
    pub foot: Vec<[f64; 2]>,
    pub labels: Vec<Label>,
}

impl LabeledStream {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Right-foot angle channel, if present.
    pub fn right_foot(&self) -> Option<Vec<f64>> {
        (!self.foot.is_empty()).then(|| self.foot.iter().map(|f| f[0]).collect())
    }

    /// Sample indices where a new stride starts according to the labels:
    /// the first frame after each phase wrap.
    pub fn label_heel_strikes(&self) -> Vec<usize> {
        self.labels
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].phase < w[0].phase || w[1].mode != w[0].mode)
            .map(|(i, _)| i + 1)
            .collect()
    }
}
