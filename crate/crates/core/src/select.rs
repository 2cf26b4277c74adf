use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Accumulated floating-point tolerance for the incremental errors.
///
/// Values in `[-EPS_ACC, 0)` are rounding residue of a true zero and are
/// reported as `0`; anything further below zero is a data error.
pub const EPS_ACC: f64 = 1e-6;

/// Phase for a 1-based kernel index: `j_star / n`, in `(0, 1]`.
pub fn phase_of(j_star: usize, n: usize) -> Result<f64> {
    if j_star == 0 || j_star > n {
        return Err(Error::arg(alloc::format!("j* = {j_star} outside 1..={n}")));
    }
    Ok(j_star as f64 / n as f64)
}

/// Minimum and 0-based position of one mode's error vector, given in
/// logical `j` order. Ties go to the smaller `j`.
pub fn mode_argmin<I>(errors: I) -> Result<(usize, f64)>
where
    I: IntoIterator<Item = f64>,
{
    let mut best: Option<(usize, f64)> = None;
    for (j, e) in errors.into_iter().enumerate() {
        let e = sanitize(e)?;
        match best {
            Some((_, b)) if e >= b => {}
            _ => best = Some((j, e)),
        }
    }
    best.ok_or_else(|| Error::arg("empty error vector"))
}

#[inline]
fn sanitize(e: f64) -> Result<f64> {
    if e.is_nan() || e.is_infinite() {
        return Err(Error::NonFinite("error vector"));
    }
    if e < 0.0 {
        if e < -EPS_ACC {
            return Err(Error::arg(alloc::format!("negative error {e} beyond accumulation tolerance")));
        }
        return Ok(0.0);
    }
    Ok(e)
}

/// Result of the global `(m, j)` argmin.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Winning mode, as a position in the kernel set.
    pub mode: usize,
    /// 1-based index into the winning kernel.
    pub j_star: usize,
    pub phase: f64,
    /// Minimum error of every mode, in kernel-set order.
    pub min_errors: Vec<f64>,
}

impl Selection {
    /// Combine per-mode `(argmin, min)` pairs with their kernel lengths.
    /// Ties between modes go to the earlier mode.
    pub(crate) fn from_minima(minima: &[(usize, f64)], lens: impl Fn(usize) -> usize) -> Result<Self> {
        let mut winner: Option<usize> = None;
        for (m, &(_, e)) in minima.iter().enumerate() {
            match winner {
                Some(w) if e >= minima[w].1 => {}
                _ => winner = Some(m),
            }
        }
        let mode = winner.ok_or_else(|| Error::arg("no modes to select from"))?;
        let j_star = minima[mode].0 + 1;
        Ok(Selection {
            mode,
            j_star,
            phase: phase_of(j_star, lens(mode))?,
            min_errors: minima.iter().map(|&(_, e)| e).collect(),
        })
    }
}

/// Global argmin over every mode's error vector.
///
/// `per_mode[m][j]` is the error of mode `m` at 0-based rotation `j`. The
/// winner is the smallest error; ties go to the earlier mode, then to the
/// smaller `j`.
pub fn select_prediction<V: AsRef<[f64]>>(per_mode: &[V]) -> Result<Selection> {
    if per_mode.is_empty() {
        return Err(Error::arg("no modes to select from"));
    }
    let minima = per_mode
        .iter()
        .map(|v| mode_argmin(v.as_ref().iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    Selection::from_minima(&minima, |m| per_mode[m].as_ref().len())
}

/// Mode and phase estimate for one timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub t_index: u64,
    /// Position of the winning mode in the kernel set.
    pub mode: usize,
    /// 1-based winning kernel index.
    pub j_star: usize,
    /// `j_star / N_{mode}`.
    pub phase: f64,
    /// Minimum error of every mode, in kernel-set order.
    pub min_errors: Vec<f64>,
    /// Every mode has seen at least `N_m` frames.
    pub warm: bool,
}

impl Prediction {
    pub(crate) fn from_selection(t_index: u64, sel: Selection, warm: bool) -> Self {
        Prediction {
            t_index,
            mode: sel.mode,
            j_star: sel.j_star,
            phase: sel.phase,
            min_errors: sel.min_errors,
            warm,
        }
    }
}
