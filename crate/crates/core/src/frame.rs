use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::error::{Error, Result};

/// Number of angle channels the engine consumes.
pub const CHANNELS: usize = 4;

/// Channel order used by frames, kernels and files.
pub const CHANNEL_NAMES: [&str; CHANNELS] = ["theta_rth", "theta_lth", "theta_rsh", "theta_lsh"];

/// Symbolic locomotion mode label, e.g. `Slow` or `SA`.
///
/// Cheap to clone. Must be non-empty and free of characters that would break
/// the CSV formats (comma, quote, line breaks, `=`, surrounding whitespace).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId(Arc<str>);

impl ModeId {
    pub fn new(id: impl AsRef<str>) -> Result<Self> {
        let id = id.as_ref();
        if id.is_empty() {
            return Err(Error::arg("mode id is empty"));
        }
        if id.trim() != id {
            return Err(Error::arg("mode id has surrounding whitespace"));
        }
        if id.chars().any(|c| matches!(c, ',' | '"' | '\n' | '\r' | '=')) {
            return Err(Error::arg(alloc::format!("mode id {id:?} contains a reserved character")));
        }
        Ok(ModeId(Arc::from(id)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl From<ModeId> for String {
    fn from(m: ModeId) -> String {
        String::from(&*m.0)
    }
}

/// One timestep: four global segment angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleFrame {
    t_index: u64,
    angles: [f64; CHANNELS],
}

impl SampleFrame {
    pub fn new(t_index: u64, angles: [f64; CHANNELS]) -> Result<Self> {
        if !angles.iter().all(|a| a.is_finite()) {
            return Err(Error::NonFinite("sample frame"));
        }
        Ok(SampleFrame { t_index, angles })
    }

    #[inline]
    pub fn t_index(&self) -> u64 {
        self.t_index
    }

    #[inline]
    pub fn angles(&self) -> &[f64; CHANNELS] {
        &self.angles
    }
}

#[inline(always)]
pub(crate) fn dist2(a: &[f64; CHANNELS], b: &[f64; CHANNELS]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    let d3 = a[3] - b[3];
    d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3
}
