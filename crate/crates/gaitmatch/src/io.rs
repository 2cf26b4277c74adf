//! CSV formats for streams, kernels, predictions, traces and bench reports.
//!
//! All files are UTF-8 with LF line endings and `.` as the decimal
//! separator. Angles and phases are written with Rust's shortest round-trip
//! float formatting, so parsing a written file gives back the exact values
//! and re-writing it gives back the exact bytes.
//!
//! Stream file header, optional groups in this order:
//!
//! ```text
//! t_index,theta_rth,theta_lth,theta_rsh,theta_lsh[,theta_rft,theta_lft][,mode,phase][,hs]
//! ```
//!
//! `hs` is an optional 0/1 heel-strike override used by training instead of
//! peak detection.
//!
//! Kernel file:
//!
//! ```text
//! # mode=<id>
//! # n=<N_m>
//! # rate_hz=<rate>
//! <rth>,<lth>,<rsh>,<lsh>        (N_m rows)
//! ```

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use gaitmatch_core::eval::{ErrorScale, Trace};
use gaitmatch_core::{
    KernelSet, Label, LabeledStream, ModeId, ModeKernel, Prediction, SampleFrame, CHANNELS, CHANNEL_NAMES,
};
use thiserror::Error;

use crate::bench::BenchReport;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{source}")]
    Stream {
        #[from]
        source: io::Error,
    },

    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] gaitmatch_core::Error),
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

fn parse_err(line: u64, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|source| FormatError::Io { path: path.to_owned(), source })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|source| FormatError::Io { path: path.to_owned(), source })
}

fn parse_angle(s: &str, line: u64, col: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| parse_err(line, format!("{col}: {s:?} is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{col}: non-finite value {s:?}")));
    }
    Ok(v)
}

/// Contents of a stream file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamFile {
    pub frames: Vec<SampleFrame>,
    /// Right and left foot angles.
    pub foot: Option<Vec<[f64; 2]>>,
    pub labels: Option<Vec<Label>>,
    pub hs: Option<Vec<bool>>,
}

impl StreamFile {
    pub fn from_labeled(s: &LabeledStream) -> Self {
        StreamFile {
            frames: s.frames.clone(),
            foot: (!s.foot.is_empty()).then(|| s.foot.clone()),
            labels: (!s.labels.is_empty()).then(|| s.labels.clone()),
            hs: None,
        }
    }

    pub fn into_labeled(self) -> LabeledStream {
        LabeledStream { frames: self.frames, foot: self.foot.unwrap_or_default(), labels: self.labels.unwrap_or_default() }
    }

    pub fn header(&self) -> String {
        let mut h = String::from("t_index");
        for name in CHANNEL_NAMES {
            h.push(',');
            h.push_str(name);
        }
        if self.foot.is_some() {
            h.push_str(",theta_rft,theta_lft");
        }
        if self.labels.is_some() {
            h.push_str(",mode,phase");
        }
        if self.hs.is_some() {
            h.push_str(",hs");
        }
        h
    }
}

#[derive(Clone, Copy)]
struct StreamLayout {
    foot: bool,
    labels: bool,
    hs: bool,
}

fn stream_layout(header: &csv::StringRecord) -> Result<StreamLayout> {
    let cols: Vec<&str> = header.iter().collect();
    let mut expected: Vec<&str> = vec!["t_index"];
    expected.extend(CHANNEL_NAMES);
    if cols.len() < expected.len() || cols[..expected.len()] != expected[..] {
        return Err(parse_err(1, format!("header must start with {}", expected.join(","))));
    }
    let mut rest = &cols[expected.len()..];
    let mut take = |group: &[&str]| {
        if rest.starts_with(group) {
            rest = &rest[group.len()..];
            true
        } else {
            false
        }
    };
    let layout = StreamLayout {
        foot: take(&["theta_rft", "theta_lft"]),
        labels: take(&["mode", "phase"]),
        hs: take(&["hs"]),
    };
    if !rest.is_empty() {
        return Err(parse_err(1, format!("unexpected columns {}", rest.join(","))));
    }
    Ok(layout)
}

pub fn read_stream_from<R: Read>(reader: R) -> Result<StreamFile> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let layout = stream_layout(rdr.headers()?)?;
    let mut out = StreamFile {
        foot: layout.foot.then(Vec::new),
        labels: layout.labels.then(Vec::new),
        hs: layout.hs.then(Vec::new),
        ..Default::default()
    };
    let mut prev_t: Option<u64> = None;
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        let mut fields = record.iter();
        let mut next = |col: &str| fields.next().ok_or_else(|| parse_err(line, format!("missing column {col}")));

        let t_raw = next("t_index")?;
        let t: u64 = t_raw.parse().map_err(|_| parse_err(line, format!("t_index: {t_raw:?} is not an integer")))?;
        if let Some(p) = prev_t {
            if t <= p {
                return Err(parse_err(line, format!("t_index {t} does not increase (previous {p})")));
            }
        }
        prev_t = Some(t);

        let mut angles = [0.0; CHANNELS];
        for (a, name) in angles.iter_mut().zip(CHANNEL_NAMES) {
            *a = parse_angle(next(name)?, line, name)?;
        }
        out.frames.push(SampleFrame::new(t, angles)?);

        if let Some(foot) = out.foot.as_mut() {
            let r = parse_angle(next("theta_rft")?, line, "theta_rft")?;
            let l = parse_angle(next("theta_lft")?, line, "theta_lft")?;
            foot.push([r, l]);
        }
        if let Some(labels) = out.labels.as_mut() {
            let mode = ModeId::new(next("mode")?).map_err(|e| parse_err(line, e.to_string()))?;
            let raw = next("phase")?;
            let phase = parse_angle(raw, line, "phase")?;
            if !(phase > 0.0 && phase <= 1.0) {
                return Err(parse_err(line, format!("phase {raw} outside (0, 1]")));
            }
            labels.push(Label { mode, phase });
        }
        if let Some(hs) = out.hs.as_mut() {
            hs.push(match next("hs")? {
                "0" => false,
                "1" => true,
                other => return Err(parse_err(line, format!("hs: expected 0 or 1, got {other:?}"))),
            });
        }
    }
    Ok(out)
}

pub fn read_stream(path: &Path) -> Result<StreamFile> {
    read_stream_from(BufReader::new(open(path)?)).map_err(|e| with_path(e, path))
}

fn with_path(e: FormatError, path: &Path) -> FormatError {
    match e {
        FormatError::Parse { line, msg } => FormatError::Parse { line, msg: format!("{}: {msg}", path.display()) },
        other => other,
    }
}

pub fn write_stream_to<W: Write>(mut w: W, s: &StreamFile) -> Result<()> {
    let n = s.frames.len();
    let check = |len: Option<usize>, what: &str| match len {
        Some(l) if l != n => Err(FormatError::Core(gaitmatch_core::Error::Structure(format!(
            "{what} has {l} rows for {n} frames"
        )))),
        _ => Ok(()),
    };
    check(s.foot.as_ref().map(Vec::len), "foot")?;
    check(s.labels.as_ref().map(Vec::len), "labels")?;
    check(s.hs.as_ref().map(Vec::len), "hs")?;

    writeln!(w, "{}", s.header())?;
    let mut line = String::with_capacity(128);
    for (i, f) in s.frames.iter().enumerate() {
        line.clear();
        write!(line, "{}", f.t_index()).unwrap();
        for a in f.angles() {
            write!(line, ",{a}").unwrap();
        }
        if let Some(foot) = &s.foot {
            write!(line, ",{},{}", foot[i][0], foot[i][1]).unwrap();
        }
        if let Some(labels) = &s.labels {
            write!(line, ",{},{}", labels[i].mode, labels[i].phase).unwrap();
        }
        if let Some(hs) = &s.hs {
            line.push_str(if hs[i] { ",1" } else { ",0" });
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stream(path: &Path, s: &StreamFile) -> Result<()> {
    write_stream_to(create(path)?, s)
}

pub fn write_kernel_to<W: Write>(mut w: W, k: &ModeKernel) -> Result<()> {
    writeln!(w, "# mode={}", k.mode_id())?;
    writeln!(w, "# n={}", k.n())?;
    writeln!(w, "# rate_hz={}", k.sample_rate_hz())?;
    for c in k.columns() {
        writeln!(w, "{},{},{},{}", c[0], c[1], c[2], c[3])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_kernel(path: &Path, k: &ModeKernel) -> Result<()> {
    write_kernel_to(create(path)?, k)
}

fn meta<'a>(line: Option<(usize, io::Result<String>)>, key: &str, buf: &'a mut String) -> Result<&'a str> {
    let (idx, text) = line.ok_or_else(|| parse_err(0, format!("missing `# {key}=` line")))?;
    let lineno = idx as u64 + 1;
    *buf = text?;
    let prefix = format!("# {key}=");
    buf.trim_end_matches('\r')
        .strip_prefix(&prefix)
        .ok_or_else(|| parse_err(lineno, format!("expected `{prefix}<value>`")))
}

pub fn read_kernel_from<R: Read>(reader: R) -> Result<ModeKernel> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let mut buf = String::new();

    let mode = ModeId::new(meta(lines.next(), "mode", &mut buf)?).map_err(|e| parse_err(1, e.to_string()))?;
    let n_raw = meta(lines.next(), "n", &mut buf)?;
    let n: usize = n_raw.parse().map_err(|_| parse_err(2, format!("n: {n_raw:?} is not an integer")))?;
    let rate_raw = meta(lines.next(), "rate_hz", &mut buf)?;
    let rate = parse_angle(rate_raw, 3, "rate_hz")?;

    let mut columns = Vec::with_capacity(n);
    for (idx, text) in lines {
        let lineno = idx as u64 + 1;
        let text = text?;
        let text = text.trim_end_matches('\r');
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != CHANNELS {
            return Err(parse_err(lineno, format!("expected {CHANNELS} values, got {}", fields.len())));
        }
        let mut col = [0.0; CHANNELS];
        for ((v, f), name) in col.iter_mut().zip(&fields).zip(CHANNEL_NAMES) {
            *v = parse_angle(f, lineno, name)?;
        }
        columns.push(col);
    }
    if columns.len() != n {
        return Err(parse_err(3 + columns.len() as u64, format!("header says n={n} but file has {} rows", columns.len())));
    }
    Ok(ModeKernel::new(mode, columns, rate)?)
}

pub fn read_kernel(path: &Path) -> Result<ModeKernel> {
    read_kernel_from(open(path)?).map_err(|e| with_path(e, path))
}

/// Every `*.csv` kernel in `dir`, ordered by file name.
pub fn read_kernel_dir(dir: &Path) -> Result<KernelSet> {
    let entries = fs::read_dir(dir).map_err(|source| FormatError::Io { path: dir.to_owned(), source })?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|source| FormatError::Io { path: dir.to_owned(), source })?.path();
        if p.is_file() && p.extension().is_some_and(|x| x == "csv") {
            paths.push(p);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(FormatError::Core(gaitmatch_core::Error::InsufficientData(format!(
            "no kernel files (*.csv) in {}",
            dir.display()
        ))));
    }
    let kernels = paths.iter().map(|p| read_kernel(p)).collect::<Result<Vec<_>>>()?;
    Ok(KernelSet::new(kernels)?)
}

/// Predictions as read back from a prediction file, with the mode order
/// taken from its `e_<mode>` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionFile {
    pub modes: Vec<ModeId>,
    pub predictions: Vec<Prediction>,
}

pub fn write_predictions_to<W: Write>(mut w: W, modes: &[ModeId], preds: &[Prediction]) -> Result<()> {
    let mut header = String::from("t_index,mode,j_star,phase,warm");
    for m in modes {
        write!(header, ",e_{m}").unwrap();
    }
    writeln!(w, "{header}")?;
    let mut line = String::with_capacity(32 + 16 * modes.len());
    for p in preds {
        line.clear();
        write!(line, "{},{},{},{},{}", p.t_index, modes[p.mode], p.j_star, p.phase, u8::from(p.warm)).unwrap();
        for e in &p.min_errors {
            write!(line, ",{e:.6e}").unwrap();
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_predictions(path: &Path, modes: &[ModeId], preds: &[Prediction]) -> Result<()> {
    write_predictions_to(create(path)?, modes, preds)
}

pub fn read_predictions_from<R: Read>(reader: R) -> Result<PredictionFile> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let header = rdr.headers()?.clone();
    let fixed = ["t_index", "mode", "j_star", "phase", "warm"];
    if header.len() < fixed.len() + 1 || header.iter().take(fixed.len()).ne(fixed) {
        return Err(parse_err(1, format!("header must start with {} followed by e_<mode> columns", fixed.join(","))));
    }
    let modes = header
        .iter()
        .skip(fixed.len())
        .map(|h| {
            h.strip_prefix("e_")
                .ok_or_else(|| parse_err(1, format!("column {h:?} is not e_<mode>")))
                .and_then(|m| ModeId::new(m).map_err(|e| parse_err(1, e.to_string())))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut predictions = Vec::new();
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        let t_index: u64 = record[0].parse().map_err(|_| parse_err(line, "bad t_index"))?;
        let mode = modes
            .iter()
            .position(|m| m.as_str() == &record[1])
            .ok_or_else(|| parse_err(line, format!("mode {:?} has no e_ column", &record[1])))?;
        let j_star: usize = record[2].parse().map_err(|_| parse_err(line, "bad j_star"))?;
        let phase = parse_angle(&record[3], line, "phase")?;
        let warm = match &record[4] {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(line, format!("warm: expected 0 or 1, got {other:?}"))),
        };
        let min_errors = (fixed.len()..record.len())
            .map(|i| parse_angle(&record[i], line, "error"))
            .collect::<Result<Vec<_>>>()?;
        predictions.push(Prediction { t_index, mode, j_star, phase, min_errors, warm });
    }
    Ok(PredictionFile { modes, predictions })
}

pub fn read_predictions(path: &Path) -> Result<PredictionFile> {
    read_predictions_from(BufReader::new(open(path)?)).map_err(|e| with_path(e, path))
}

/// `t_index,<e|rms>_<mode>...,mode,phase`
pub fn write_trace_to<W: Write>(mut w: W, trace: &Trace) -> Result<()> {
    let prefix = match trace.scale {
        ErrorScale::SumOfSquares => "e",
        ErrorScale::Rms => "rms",
    };
    let mut header = String::from("t_index");
    for m in &trace.modes {
        write!(header, ",{prefix}_{m}").unwrap();
    }
    header.push_str(",mode,phase");
    writeln!(w, "{header}")?;
    for r in &trace.rows {
        let mut line = r.t_index.to_string();
        for e in &r.errors {
            write!(line, ",{e:.6e}").unwrap();
        }
        writeln!(w, "{line},{},{}", trace.modes[r.mode], r.phase)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(path: &Path, trace: &Trace) -> Result<()> {
    write_trace_to(create(path)?, trace)
}

pub const BENCH_HEADER: &str = "algo,n,m,steps,mean_us,median_us,p99_us,cache_bytes";

pub fn write_bench_report_to<W: Write>(mut w: W, reports: &[BenchReport]) -> Result<()> {
    writeln!(w, "{BENCH_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{:.4},{:.4},{:.4},{}",
            r.algo, r.n, r.m, r.steps, r.mean_us, r.median_us, r.p99_us, r.cache_bytes
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bench_report(path: &Path, reports: &[BenchReport]) -> Result<()> {
    write_bench_report_to(create(path)?, reports)
}
