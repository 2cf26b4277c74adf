//! Simultaneous locomotion mode classification and gait phase estimation.
//!
//! Every timestep delivers one [`SampleFrame`] holding four sagittal segment
//! angles (right thigh, left thigh, right shank, left shank). Each locomotion
//! mode is represented by a [`ModeKernel`]: the average one-stride trajectory
//! of those four angles, `N_m` samples long. The most recent `N_m` frames are
//! compared against every circular rotation of every kernel using the sum of
//! squared differences; the global minimum names the mode and its rotation
//! index `j*` gives the phase `j* / N_m`.
//!
//! Two matchers are provided:
//!
//! * [`NaiveMatcher`] rebuilds every error from a frame history, `O(N² · M)`
//!   per step. It is the reference.
//! * [`EfficientMatcher`] keeps a rolling error vector and a square-term cache
//!   per mode and updates each cell in constant time, `O(N · M)` per step,
//!   without storing any frame history.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! benchmark harness and the command-line tool live in the `gaitmatch` crate.
//!
//! ```
//! use gaitmatch_core::{EfficientMatcher, KernelSet, Matcher, ModeId, ModeKernel, SampleFrame};
//!
//! let cols: Vec<[f64; 4]> = (0..8)
//!     .map(|j| {
//!         let x = j as f64;
//!         [x, -x, 2.0 * x, 0.5 * x * x]
//!     })
//!     .collect();
//! let kernel = ModeKernel::new(ModeId::new("walk").unwrap(), cols.clone(), 230.0).unwrap();
//! let kernels = KernelSet::new(vec![kernel]).unwrap();
//! let mut matcher = EfficientMatcher::new(kernels);
//!
//! let mut last = None;
//! for (t, c) in cols.iter().cycle().take(20).enumerate() {
//!     last = Some(matcher.step(&SampleFrame::new(t as u64, *c).unwrap()).unwrap());
//! }
//! let p = last.unwrap();
//! assert!(p.warm);
//! assert_eq!(p.j_star, 4); // 20 frames = 2 full strides + 4 samples
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod frame;
mod kernel;
mod select;
mod stream;

pub mod eval;
pub mod matcher;
pub mod synth;
pub mod training;

pub use error::{Error, Result};
pub use frame::{ModeId, SampleFrame, CHANNELS, CHANNEL_NAMES};
pub use kernel::{KernelSet, ModeKernel};
pub use matcher::{
    naive_errors, run_efficient, run_naive, EfficientMatcher, Footprint, HistoryBuffer, Matcher,
    ModeErrorState, NaiveMatcher, WarmStart,
};
pub use select::{mode_argmin, phase_of, select_prediction, Prediction, Selection, EPS_ACC};
pub use stream::{Label, LabeledStream};
