//! `gaitmatch` subcommands.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::builder::NonEmptyStringValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gaitmatch_core::eval::{score_with, trace, ErrorScale, Score, ScoreOptions};
use gaitmatch_core::synth::{default_profiles, generate_session, GenConfig, DEFAULT_SAMPLE_RATE_HZ};
use gaitmatch_core::training::{build_kernel, detect_heel_strikes, segment_strides, PeakConfig};
use gaitmatch_core::{EfficientMatcher, KernelSet, Matcher, ModeId, NaiveMatcher, SampleFrame, WarmStart};

use crate::bench::{self, Algo, BenchReport, SweepOptions};
use crate::config::expand_config;
use crate::io::{self, StreamFile};

// stdout may be a closed pipe; that is not a failure of the command
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

fn out_str(s: &str) {
    use std::io::Write as _;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

#[derive(Debug, Parser)]
#[command(name = "gaitmatch", version, about = "Locomotion mode and gait phase by circular template matching")]
#[command(args_override_self = true)]
pub struct Cli {
    /// key=value file supplying defaults for the subcommand's flags
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one mode kernel from a recorded or synthetic stream.
    Train(TrainArgs),
    /// Run a matcher over a stream and write per-step predictions.
    Predict(PredictArgs),
    /// Score predictions against a labelled stream.
    Eval(EvalArgs),
    /// Generate a seeded synthetic stream with ground-truth labels.
    Synth(SynthArgs),
    /// Time the naive and efficient matchers.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HsChannel {
    /// Right foot angle peaks.
    Rft,
    /// Right shank angle peaks.
    Rsh,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Mode id; rows with a different label are ignored when labels exist.
    #[arg(long, value_parser = NonEmptyStringValueParser::new())]
    pub mode: String,
    #[arg(long, value_enum)]
    pub hs_channel: HsChannel,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub min_sep_s: f64,
    #[arg(long, default_value_t = 5.0)]
    pub min_prom_deg: f64,
    /// Moving-average width before peak detection, seconds; 0 disables.
    #[arg(long, default_value_t = 0.03)]
    pub smooth_s: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE_HZ)]
    pub rate_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredictAlgo {
    Efficient,
    Naive,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Directory of kernel files; modes are ordered by file name.
    #[arg(long)]
    pub kernels: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = PredictAlgo::Efficient)]
    pub algo: PredictAlgo,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write per-mode minimum errors with the winning mode and phase.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Report trace errors as RMS degrees instead of sums of squares.
    #[arg(long, requires = "trace")]
    pub rms: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Score warm-up rows too.
    #[arg(long)]
    pub include_warmup: bool,
    /// Samples skipped after each change of the true mode.
    #[arg(long, default_value_t = 0)]
    pub transition_guard: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// `Slow`, or a session such as `Slow:10,Med:10` (seconds per segment).
    #[arg(long, value_parser = NonEmptyStringValueParser::new())]
    pub profile: String,
    /// Seconds for segments that do not give their own.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Gaussian noise sigma, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Per-stride cadence jitter fraction in [0, 0.2].
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_RATE_HZ)]
    pub rate_hz: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchAlgo {
    Both,
    Efficient,
    Naive,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Mode count; a comma list sweeps.
    #[arg(long, value_delimiter = ',', default_value = "7")]
    pub modes: Vec<usize>,
    /// Kernel length; a comma list sweeps.
    #[arg(long, value_delimiter = ',', default_value = "400")]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = BenchAlgo::Both)]
    pub algo: BenchAlgo,
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the reports as CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Parse `args` (program name first), run, and map the outcome to an exit
/// code. Failures print one `error:` line to stderr.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            out_str(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &anyhow::Error) -> ExitCode {
    eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
    ExitCode::FAILURE
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Train(a) => cmd_train(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

pub fn cmd_train(a: &TrainArgs) -> Result<()> {
    let mode = ModeId::new(&a.mode)?;
    let file = io::read_stream(&a.input)?;
    let rows: Vec<usize> = match &file.labels {
        Some(labels) => (0..labels.len()).filter(|&i| labels[i].mode == mode).collect(),
        None => (0..file.frames.len()).collect(),
    };
    if rows.is_empty() {
        bail!("{} has no rows labelled {mode}", a.input.display());
    }
    let frames: Vec<SampleFrame> = rows.iter().map(|&i| file.frames[i]).collect();

    let hs = match &file.hs {
        Some(hs) => rows.iter().enumerate().filter(|&(_, &i)| hs[i]).map(|(k, _)| k).collect(),
        None => {
            let signal: Vec<f64> = match a.hs_channel {
                HsChannel::Rft => {
                    let foot = file.foot.as_ref().with_context(|| {
                        format!("{} has no theta_rft column; use --hs-channel rsh", a.input.display())
                    })?;
                    rows.iter().map(|&i| foot[i][0]).collect()
                }
                HsChannel::Rsh => frames.iter().map(|f| f.angles()[2]).collect(),
            };
            let cfg = PeakConfig { min_separation_s: a.min_sep_s, min_prominence_deg: a.min_prom_deg, smooth_s: a.smooth_s };
            detect_heel_strikes(&signal, a.rate_hz, &cfg).context("heel-strike detection")?
        }
    };
    if hs.len() < 2 {
        bail!("{} heel strike(s) detected for {mode}, need at least 2", hs.len());
    }
    let strides = segment_strides(&frames, &hs)?;
    let kernel = build_kernel(mode, &strides, a.rate_hz)?;
    io::write_kernel(&a.out, &kernel)?;

    let n = kernel.n();
    out!("strides: {}", strides.len());
    out!("N_m: {n}");
    out!("resolution: 1/{n} = {:.3}% of a stride", 100.0 / n as f64);
    out!("wrote {}", a.out.display());
    Ok(())
}

pub fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let kernels = io::read_kernel_dir(&a.kernels)?;
    let stream = io::read_stream(&a.input)?;
    // ZeroHistory makes both algorithms agree from the first row
    let preds = match a.algo {
        PredictAlgo::Efficient => EfficientMatcher::with_warm_start(kernels.clone(), WarmStart::ZeroHistory)
            .run(&stream.frames)?,
        PredictAlgo::Naive => NaiveMatcher::new(kernels.clone()).run(&stream.frames)?,
    };
    let modes = kernels.mode_ids();
    io::write_predictions(&a.out, &modes, &preds)?;
    if let Some(path) = &a.trace {
        let scale = if a.rms { ErrorScale::Rms } else { ErrorScale::SumOfSquares };
        io::write_trace(path, &trace(&preds, &kernels, None, scale))?;
    }

    let warm = preds.iter().filter(|p| p.warm).count();
    let mut seen = vec![0usize; modes.len()];
    preds.iter().filter(|p| p.warm).for_each(|p| seen[p.mode] += 1);
    let summary: Vec<String> =
        modes.iter().zip(&seen).filter(|(_, &c)| c > 0).map(|(m, c)| format!("{m}={c}")).collect();
    out!("predictions: {} ({warm} warm)", preds.len());
    out!("modes: {}", if summary.is_empty() { "-".into() } else { summary.join(" ") });
    out!("wrote {}", a.out.display());
    Ok(())
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let pred = io::read_predictions(&a.pred)?;
    let truth = io::read_stream(&a.truth)?;
    if truth.labels.is_none() {
        bail!("{} has no mode,phase columns", a.truth.display());
    }
    let opts = ScoreOptions { exclude_warmup: !a.include_warmup, transition_guard: a.transition_guard };
    let s = score_with(&pred.predictions, &pred.modes, &truth.into_labeled(), &opts)?;
    out_str(&format_score(&s));
    Ok(())
}

/// Confusion matrix, accuracy and per-mode phase error as plain text.
pub fn format_score(s: &Score) -> String {
    let modes = s.confusion.modes();
    let w = modes.iter().map(|m| m.as_str().len()).max().unwrap_or(4).max(7) + 2;
    let mut out = String::from("confusion (rows: truth, columns: predicted)\n");
    let _ = write!(out, "{:w$}", "");
    for m in modes {
        let _ = write!(out, "{:>w$}", m.as_str());
    }
    out.push('\n');
    for (t, m) in modes.iter().enumerate() {
        if s.confusion.row_total(t) == 0 {
            continue;
        }
        let _ = write!(out, "{:w$}", m.as_str());
        for p in 0..modes.len() {
            let _ = write!(out, "{:>w$}", s.confusion.count(t, p));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "accuracy: {:.4} ({} of {})", s.accuracy, s.confusion.trace(), s.confusion.total());
    let _ = writeln!(out, "phase error, fraction of a stride, correctly classified samples");
    let _ = writeln!(out, "{:w$}{:>8}{:>10}{:>10}{:>10}", "mode", "count", "mean", "std", "max");
    for (m, p) in modes.iter().zip(&s.phase) {
        if p.count > 0 {
            let _ = writeln!(out, "{:w$}{:>8}{:>10.5}{:>10.5}{:>10.5}", m.as_str(), p.count, p.mean, p.std, p.max);
        }
    }
    let o = &s.overall_phase;
    let _ = writeln!(out, "{:w$}{:>8}{:>10.5}{:>10.5}{:>10.5}", "all", o.count, o.mean, o.std, o.max);
    out
}

/// `Slow` or `Slow:10,Med:5`; segments without seconds take `default`.
pub fn parse_session(text: &str, default: Option<f64>) -> Result<Vec<(String, f64)>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let (id, secs) = match item.split_once(':') {
                Some((id, s)) => (id, s.trim().parse::<f64>().with_context(|| format!("bad duration in {item:?}"))?),
                None => (item, default.with_context(|| format!("segment {item:?} has no duration; pass --duration"))?),
            };
            if id.is_empty() {
                bail!("empty mode id in {text:?}");
            }
            Ok((id.to_string(), secs))
        })
        .collect()
}

pub fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let schedule = parse_session(&a.profile, a.duration)?;
    let refs: Vec<(&str, f64)> = schedule.iter().map(|(id, d)| (id.as_str(), *d)).collect();
    let cfg = GenConfig { sample_rate_hz: a.rate_hz, noise_sigma_deg: a.noise, cadence_jitter_frac: a.jitter, seed: a.seed };
    let stream = generate_session(&default_profiles(), &refs, &cfg)?;
    io::write_stream(&a.out, &StreamFile::from_labeled(&stream))?;
    out!("rows: {}", stream.len());
    out!("wrote {}", a.out.display());
    Ok(())
}

pub fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let algos = match a.algo {
        BenchAlgo::Both => vec![Algo::Efficient, Algo::Naive],
        BenchAlgo::Efficient => vec![Algo::Efficient],
        BenchAlgo::Naive => vec![Algo::Naive],
    };
    let opts = SweepOptions { steps: a.steps, algos, repeat: a.repeat, seed: a.seed };
    let reports = bench::run_sweep_with(&a.n, &a.modes, &opts)?;
    out_str(&format_bench(&reports));
    if let Some(path) = &a.report {
        io::write_bench_report(path, &reports)?;
        out!("wrote {}", path.display());
    }
    Ok(())
}

/// One line per configuration, then speedups and mode headroom.
pub fn format_bench(reports: &[BenchReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "{:<9} N={:<5} M={:<3} mean {:>10.3} us  median {:>10.3} us  p99 {:>10.3} us  cache {} B",
            r.algo, r.n, r.m, r.mean_us, r.median_us, r.p99_us, r.cache_bytes
        );
    }
    for e in reports.iter().filter(|r| r.algo == Algo::Efficient) {
        if let Some(nv) = reports.iter().find(|r| r.algo == Algo::Naive && r.n == e.n && r.m == e.m) {
            let _ = writeln!(out, "speedup N={} M={}: {:.1}x", e.n, e.m, nv.mean_us / e.mean_us);
        }
    }
    let mut ns: Vec<usize> = reports.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        if let Some(cap) = bench::mode_capacity(reports, n, DEFAULT_SAMPLE_RATE_HZ) {
            let _ = writeln!(out, "modes within one {DEFAULT_SAMPLE_RATE_HZ} Hz sample at N={n}: ~{cap:.0}");
        }
    }
    out
}

/// Kernel set from a directory, for library callers.
pub fn load_kernels(dir: &Path) -> Result<KernelSet> {
    Ok(io::read_kernel_dir(dir)?)
}
