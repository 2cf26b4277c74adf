use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Heel-strike peak finder settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakConfig {
    /// Minimum time between accepted peaks, seconds.
    pub min_separation_s: f64,
    /// Minimum topographic prominence, degrees.
    pub min_prominence_deg: f64,
    /// Centered moving-average width applied before detection, seconds.
    /// Rounded to an odd sample count; 0 disables smoothing.
    pub smooth_s: f64,
}

impl Default for PeakConfig {
    fn default() -> Self {
        PeakConfig { min_separation_s: 0.5, min_prominence_deg: 5.0, smooth_s: 0.03 }
    }
}

impl PeakConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_separation_s.is_finite() && self.min_separation_s > 0.0) {
            return Err(Error::arg("min_separation_s must be positive"));
        }
        if !(self.min_prominence_deg.is_finite() && self.min_prominence_deg > 0.0) {
            return Err(Error::arg("min_prominence_deg must be positive"));
        }
        if !(self.smooth_s.is_finite() && self.smooth_s >= 0.0) {
            return Err(Error::arg("smooth_s must be non-negative"));
        }
        Ok(())
    }

    /// Separation in whole samples at `rate_hz`, at least 1.
    pub fn separation_samples(&self, rate_hz: f64) -> usize {
        (libm::ceil(self.min_separation_s * rate_hz) as usize).max(1)
    }

    /// Odd smoothing width in samples at `rate_hz`; 1 means no smoothing.
    pub fn smooth_samples(&self, rate_hz: f64) -> usize {
        let w = libm::round(self.smooth_s * rate_hz) as usize;
        w.max(1) | 1
    }
}

/// Centered moving average of odd width `w`, edges padded with the end
/// samples.
pub fn moving_average(x: &[f64], w: usize) -> Vec<f64> {
    if w <= 1 || x.is_empty() {
        return x.to_vec();
    }
    let h = w / 2;
    let last = x.len() - 1;
    let at = |i: isize| x[i.clamp(0, last as isize) as usize];
    let mut acc: f64 = (-(h as isize)..=h as isize).map(at).sum();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() as isize {
        out.push(acc / w as f64);
        acc += at(i + h as isize + 1) - at(i - h as isize);
    }
    out
}

/// Heel-strike sample indices: local maxima of the smoothed `signal` with at least the
/// configured prominence, pairwise at least the configured separation apart.
/// When two candidates are too close the higher one is kept.
///
/// Each accepted peak is then re-centered by a least-squares parabola over
/// its top quarter (the contiguous samples within a quarter of the
/// prominence of the summit), which keeps broad, noisy summits from
/// wandering by more than about a sample.
///
/// A flat signal yields no peaks. The signal must span at least two
/// separation intervals.
pub fn detect_heel_strikes(signal: &[f64], sample_rate_hz: f64, cfg: &PeakConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::arg("sample rate must be positive"));
    }
    let sep = cfg.separation_samples(sample_rate_hz);
    if signal.len() < 2 * sep {
        return Err(Error::arg(alloc::format!(
            "signal has {} samples, need at least {} for {} s separation",
            signal.len(),
            2 * sep,
            cfg.min_separation_s
        )));
    }
    if !signal.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("heel-strike signal"));
    }

    let smoothed = moving_average(signal, cfg.smooth_samples(sample_rate_hz));
    let signal = &smoothed[..];
    let mut peaks: Vec<usize> = local_maxima(signal)
        .into_iter()
        .filter(|&p| prominence(signal, p) >= cfg.min_prominence_deg)
        .collect();

    // highest first; equal heights keep the earlier sample
    let mut order: Vec<usize> = (0..peaks.len()).collect();
    order.sort_by(|&a, &b| signal[peaks[b]].total_cmp(&signal[peaks[a]]).then(a.cmp(&b)));
    let mut keep = alloc::vec![true; peaks.len()];
    for &i in &order {
        if !keep[i] {
            continue;
        }
        for k in (0..i).rev() {
            if peaks[i] - peaks[k] >= sep {
                break;
            }
            keep[k] = false;
        }
        for k in i + 1..peaks.len() {
            if peaks[k] - peaks[i] >= sep {
                break;
            }
            keep[k] = false;
        }
    }
    let mut k = keep.iter();
    peaks.retain(|_| *k.next().unwrap());

    let mut refined: Vec<usize> = Vec::with_capacity(peaks.len());
    for &p in &peaks {
        let level = signal[p] - prominence(signal, p) / 4.0;
        let r = refine_peak(signal, p, level);
        match refined.last() {
            Some(&prev) if r < prev + sep => {}
            _ => refined.push(r),
        }
    }
    Ok(refined)
}

fn refine_peak(x: &[f64], p: usize, level: f64) -> usize {
    let mut lo = p;
    while lo > 0 && x[lo - 1] >= level {
        lo -= 1;
    }
    let mut hi = p;
    while hi + 1 < x.len() && x[hi + 1] >= level {
        hi += 1;
    }
    if hi - lo < 2 {
        return p;
    }
    // y = a t^2 + b t + c with t centered on p
    let (mut s0, mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut y0, mut y1, mut y2) = (0.0, 0.0, 0.0);
    for (i, &y) in x.iter().enumerate().take(hi + 1).skip(lo) {
        let t = i as f64 - p as f64;
        let t2 = t * t;
        s0 += 1.0;
        s1 += t;
        s2 += t2;
        s3 += t2 * t;
        s4 += t2 * t2;
        y0 += y;
        y1 += t * y;
        y2 += t2 * y;
    }
    // normal equations [s4 s3 s2; s3 s2 s1; s2 s1 s0] [a b c] = [y2 y1 y0]
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m = [[s4, s3, s2], [s3, s2, s1], [s2, s1, s0]];
    let det = det3(m);
    if det.abs() < 1e-12 {
        return p;
    }
    let a = det3([[y2, s3, s2], [y1, s2, s1], [y0, s1, s0]]) / det;
    let b = det3([[s4, y2, s2], [s3, y1, s1], [s2, y0, s0]]) / det;
    if a.is_nan() || a >= 0.0 {
        return p;
    }
    let vertex = p as f64 - b / (2.0 * a);
    libm::round(vertex.clamp(lo as f64, hi as f64)) as usize
}

/// Strict interior maxima; a flat top reports its middle sample.
fn local_maxima(x: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < x.len() {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead + 1 < x.len() && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                out.push((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Peak height above the higher of the two lowest points reachable on each
/// side before the signal rises above the peak.
fn prominence(x: &[f64], p: usize) -> f64 {
    let h = x[p];
    let mut left_min = h;
    for &v in x[..p].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[p + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}
