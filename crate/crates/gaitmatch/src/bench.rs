//! Per-step latency harness for the two matchers.
//!
//! Both matchers are driven through [`Matcher::step`], the same entry point
//! used for prediction, on identical seeded inputs. Each configuration runs
//! [`WARMUP_STEPS`] untimed steps first. The mean is total wall time over
//! the timed steps; median and p99 come from per-step samples.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use gaitmatch_core::{
    EfficientMatcher, Error, KernelSet, Matcher, ModeId, ModeKernel, NaiveMatcher, Result, SampleFrame, CHANNELS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WARMUP_STEPS: usize = 1000;
pub const MIN_STEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Efficient,
    Naive,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Efficient => "efficient",
            Algo::Naive => "naive",
        })
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "efficient" => Ok(Algo::Efficient),
            "naive" => Ok(Algo::Naive),
            _ => Err(Error::Argument(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub algo: Algo,
    pub n: usize,
    pub m: usize,
    pub steps: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub p99_us: f64,
    /// Square-term cache held by the matcher; `M * N^2 * 8` for the
    /// efficient matcher, 0 for the naive one.
    pub cache_bytes: usize,
    pub history_bytes: usize,
}

/// `m` kernels of length `n` with angles uniform in [-60, 60] degrees.
pub fn random_kernels(n: usize, m: usize, seed: u64) -> Result<KernelSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kernels = (0..m)
        .map(|i| {
            let cols = (0..n).map(|_| std::array::from_fn(|_| rng.random_range(-60.0..60.0))).collect();
            ModeKernel::new(ModeId::new(format!("M{i}"))?, cols, 230.0)
        })
        .collect::<Result<Vec<_>>>()?;
    KernelSet::new(kernels)
}

/// Frames with angles uniform in [-60, 60] degrees.
pub fn random_frames(len: usize, seed: u64) -> Vec<SampleFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|t| {
            let a: [f64; CHANNELS] = std::array::from_fn(|_| rng.random_range(-60.0..60.0));
            SampleFrame::new(t as u64, a).expect("finite")
        })
        .collect()
}

/// Step through `frames`, timing everything after the first `warmup`.
/// Returns total timed seconds and per-step microseconds.
pub fn time_steps<M: Matcher>(matcher: &mut M, frames: &[SampleFrame], warmup: usize) -> Result<(f64, Vec<f64>)> {
    let warmup = warmup.min(frames.len());
    for f in &frames[..warmup] {
        black_box(matcher.step(f)?);
    }
    let timed = &frames[warmup..];
    let mut samples = Vec::with_capacity(timed.len());
    let start = Instant::now();
    let mut prev = start;
    for f in timed {
        black_box(matcher.step(black_box(f))?);
        let now = Instant::now();
        samples.push((now - prev).as_secs_f64() * 1e6);
        prev = now;
    }
    Ok(((prev - start).as_secs_f64(), samples))
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[idx]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub steps: usize,
    pub algos: Vec<Algo>,
    /// Timed passes per configuration; per-step samples are pooled.
    pub repeat: usize,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { steps: 10_000, algos: vec![Algo::Efficient, Algo::Naive], repeat: 1, seed: 0 }
    }
}

/// One timed configuration.
pub fn bench_config(algo: Algo, n: usize, m: usize, opts: &SweepOptions) -> Result<BenchReport> {
    if opts.steps < MIN_STEPS {
        return Err(Error::Argument(format!("need at least {MIN_STEPS} timed steps, got {}", opts.steps)));
    }
    if opts.repeat == 0 {
        return Err(Error::Argument("repeat must be at least 1".into()));
    }
    let seed = opts.seed ^ ((n as u64) << 32) ^ m as u64;
    let kernels = random_kernels(n, m, seed)?;
    let frames = random_frames(WARMUP_STEPS + opts.steps, seed.wrapping_add(1));

    let mut total_s = 0.0;
    let mut samples = Vec::with_capacity(opts.steps * opts.repeat);
    let mut cache_bytes = 0;
    let mut history_bytes = 0;
    for _ in 0..opts.repeat {
        let (secs, s) = match algo {
            Algo::Efficient => {
                let mut mt = EfficientMatcher::new(kernels.clone());
                let r = time_steps(&mut mt, &frames, WARMUP_STEPS)?;
                (cache_bytes, history_bytes) = (mt.footprint().cache_bytes, mt.footprint().history_bytes);
                r
            }
            Algo::Naive => {
                let mut mt = NaiveMatcher::new(kernels.clone());
                let r = time_steps(&mut mt, &frames, WARMUP_STEPS)?;
                (cache_bytes, history_bytes) = (mt.footprint().cache_bytes, mt.footprint().history_bytes);
                r
            }
        };
        total_s += secs;
        samples.extend(s);
    }
    samples.sort_by(f64::total_cmp);
    let steps = samples.len();
    Ok(BenchReport {
        algo,
        n,
        m,
        steps,
        mean_us: total_s * 1e6 / steps as f64,
        median_us: percentile(&samples, 0.5),
        p99_us: percentile(&samples, 0.99),
        cache_bytes,
        history_bytes,
    })
}

/// Every `(algo, n, m)` combination, in that nesting order.
pub fn run_sweep_with(n_values: &[usize], m_values: &[usize], opts: &SweepOptions) -> Result<Vec<BenchReport>> {
    let mut out = Vec::new();
    for &algo in &opts.algos {
        for &n in n_values {
            for &m in m_values {
                out.push(bench_config(algo, n, m, opts)?);
            }
        }
    }
    Ok(out)
}

/// Both algorithms with default options and `steps` timed steps.
pub fn run_sweep(n_values: &[usize], m_values: &[usize], steps: usize) -> Result<Vec<BenchReport>> {
    run_sweep_with(n_values, m_values, &SweepOptions { steps, ..Default::default() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl LinearFit {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares `y = a + b x`. Needs two distinct `x`.
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sst: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if sst == 0.0 { 1.0 } else { 1.0 - sse / sst };
    Some(LinearFit { slope, intercept, r2 })
}

/// Mode count whose extrapolated efficient step time equals one sample
/// period, from the efficient reports at kernel length `n`.
pub fn mode_capacity(reports: &[BenchReport], n: usize, sample_rate_hz: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.algo == Algo::Efficient && r.n == n)
        .map(|r| (r.m as f64, r.mean_us))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let fit = fit_linear(&xs, &ys)?;
    (fit.slope > 0.0).then(|| (1e6 / sample_rate_hz - fit.intercept) / fit.slope)
}
