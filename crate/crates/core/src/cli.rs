//! Command-line front end. [`run`] does all the work and returns the exit
//! status with both output streams, so the binary is a thin shell and tests
//! can drive commands in-process.
//!
//! Exit status: 0 success, 1 a check failed or the search came up empty,
//! 2 bad input, 3 a decimal was too coarse to decide something.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use crate::config::{
    load_config, parse_certificate, serialize_certificate, to_pretty, Format, LoadedConfig,
};
use crate::error::{Error, Result};
use crate::homology::BettiLadder;
use crate::interval::{format_rational, parse_rational};
use crate::iteration::{index_table, mean_index};
use crate::jump::{find_common_jump, replay_proof, validate_certificate, verify_jump};
use crate::morse::{
    avg_chi, check_mean_index_identity, check_morse_inequalities, morse_counts,
    sufficient_m_max, Contributor, MorseInequalityReport,
};

/// Environment variable fixing the size of the worker pool.
pub const WORKERS_ENV: &str = "GEOINDEX_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "geoindex", version, about = "Exact index iteration for closed geodesics on spheres")]
pub struct Cli {
    /// Output format; defaults to the config's `output.format`, then tsv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct ConfigArg {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Iterated index and nullity for m = 1..=m-max.
    IndexTable {
        #[command(flatten)]
        config: ConfigArg,
        /// Restrict to one geodesic.
        #[arg(long)]
        label: Option<String>,
        #[arg(long, default_value_t = 10)]
        m_max: i64,
    },
    /// Mean index and average Euler characteristic of each geodesic.
    MeanIndex {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Betti numbers of the free loop space of Sⁿ modulo constants.
    Betti {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        qmax: u32,
    },
    /// Morse counts over a degree window against the Betti numbers.
    VerifyMorse {
        #[command(flatten)]
        config: ConfigArg,
        /// Degree window `lo:hi`.
        #[arg(long)]
        window: String,
        /// Largest iterate to enumerate; chosen automatically when omitted.
        #[arg(long)]
        m_max: Option<i64>,
    },
    /// Σ χ̂(c)/î(c) against B(n,1).
    IdentityCheck {
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Search for a common index jump certificate.
    JumpSearch {
        #[command(flatten)]
        config: ConfigArg,
        /// Fractional closeness; defaults to the largest admissible value.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        delta: String,
        #[arg(long = "max-M")]
        max_m: i64,
        #[arg(long = "max-N")]
        max_n: i64,
        /// Also write the certificate file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the jump inequalities for a certificate.
    VerifyJump {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        cert: PathBuf,
        /// Iterates probed after the jump; defaults to 2m.
        #[arg(long)]
        probe: Option<i64>,
    },
    /// Replay the full counting argument for a certificate.
    ReplayProof {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        probe: Option<i64>,
        /// δ for the minimal-index check; defaults to the certificate's.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Validate a configuration and, optionally, a certificate against it.
    Validate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

/// Exit status and both output streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(e: &Error) -> Self {
        Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.exit_code() {
                0 => Outcome { code: 0, stdout: text, stderr: String::new() },
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let pool = match worker_pool() {
        Ok(pool) => pool,
        Err(e) => return Outcome::error(&e),
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::error(&e),
    }
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| {
                Error::Validation(format!("{WORKERS_ENV} must be a positive integer, got {value:?}"))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load(arg: &ConfigArg) -> Result<LoadedConfig> {
    let text = read(&arg.config)?;
    load_config(&text).map_err(|e| prefix_path(e, &arg.config))
}

fn prefix_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn rational_arg(name: &str, text: &str) -> Result<BigRational> {
    parse_rational(text).map_err(|e| Error::Validation(format!("--{name}: {e}")))
}

struct Emit {
    format: Format,
}

impl Emit {
    fn new(cli: &Cli, loaded: Option<&LoadedConfig>) -> Self {
        let format = cli
            .format
            .or_else(|| loaded.and_then(|l| l.output.format))
            .unwrap_or(Format::Tsv);
        Emit { format }
    }

    /// Serialized report, or its flattened `path<TAB>value` lines.
    fn report<T: Serialize>(&self, value: &T) -> String {
        match self.format {
            Format::Json => to_pretty(value),
            Format::Tsv => {
                let mut out = String::new();
                flatten(&serde_json::to_value(value).expect("report types serialize"), "", &mut out);
                out
            }
        }
    }

    /// Column table for tsv; `json` is used otherwise.
    fn table<T: Serialize>(&self, header: &[&str], rows: &[Vec<String>], json: &T) -> String {
        match self.format {
            Format::Json => to_pretty(json),
            Format::Tsv => {
                let mut out = header.join("\t");
                out.push('\n');
                for row in rows {
                    out.push_str(&row.join("\t"));
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn flatten(v: &Value, path: &str, out: &mut String) {
    let child = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(v, &child(k), out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, &child(&i.to_string()), out);
            }
        }
        Value::Array(_) => {
            let _ = writeln!(out, "{path}\t[]");
        }
        Value::Null => {
            let _ = writeln!(out, "{path}\t-");
        }
        Value::String(s) => {
            let _ = writeln!(out, "{path}\t{s}");
        }
        other => {
            let _ = writeln!(out, "{path}\t{other}");
        }
    }
}

fn ok(stdout: String) -> Outcome {
    Outcome { code: 0, stdout, stderr: String::new() }
}

/// Exit 1 with a one-line summary on stderr when a check fails.
fn verdict(stdout: String, pass: bool, failure: impl FnOnce() -> String) -> Outcome {
    if pass {
        ok(stdout)
    } else {
        Outcome { code: 1, stdout, stderr: format!("check failed: {}\n", failure()) }
    }
}

#[derive(Serialize)]
struct MeanIndexRow {
    label: String,
    mean_index: crate::interval::Interval,
    #[serde(skip_serializing_if = "Option::is_none")]
    avg_chi: Option<String>,
}

#[derive(Serialize)]
struct TableJson {
    label: String,
    rows: Vec<crate::iteration::IterateRow>,
}

#[derive(Serialize)]
struct MorseRow {
    q: i64,
    morse: u64,
    betti: u8,
}

#[derive(Serialize)]
struct MorseReport {
    q_lo: i64,
    q_hi: i64,
    m_max: i64,
    pass: bool,
    rows: Vec<MorseRow>,
    inequalities: MorseInequalityReport,
    contributors: Vec<Contributor>,
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    n: u32,
    geodesics: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<bool>,
}

fn parse_window(text: &str) -> Result<(i64, i64)> {
    let bad = || Error::Validation(format!("--window must be lo:hi with 0 <= lo <= hi, got {text:?}"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo < 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Betti { n, qmax } => {
            if *n < 2 {
                return Err(Error::Validation(format!("sphere dimension must be at least 2, got {n}")));
            }
            let ladder = BettiLadder::closed_form(*n, *qmax);
            let rows: Vec<Vec<String>> = ladder
                .values
                .iter()
                .enumerate()
                .map(|(q, b)| vec![q.to_string(), b.to_string()])
                .collect();
            Ok(ok(Emit::new(cli, None).table(&["q", "b_q"], &rows, &ladder)))
        }
        Command::IndexTable { config, label, m_max } => {
            let loaded = load(config)?;
            let cfg = &loaded.config;
            if *m_max < 1 {
                return Err(Error::Validation(format!("--m-max must be positive, got {m_max}")));
            }
            let selected: Vec<_> = match label {
                Some(l) => vec![cfg
                    .get(l)
                    .ok_or_else(|| Error::Validation(format!("no geodesic labelled {l}")))?],
                None => cfg.geodesics.iter().collect(),
            };
            let mut rows = Vec::new();
            let mut json = Vec::new();
            for g in selected {
                let table = index_table(g, *m_max)?;
                for r in &table {
                    rows.push(vec![g.label.clone(), r.m.to_string(), r.index.to_string(), r.nullity.to_string()]);
                }
                json.push(TableJson { label: g.label.clone(), rows: table });
            }
            let emit = Emit::new(cli, Some(&loaded));
            Ok(ok(emit.table(&["label", "m", "index", "nullity"], &rows, &json)))
        }
        Command::MeanIndex { config } => {
            let loaded = load(config)?;
            let cfg = &loaded.config;
            let mut json = Vec::new();
            let mut rows = Vec::new();
            for g in &cfg.geodesics {
                let chi = if cfg.bumpy { Some(format_rational(&avg_chi(g)?)) } else { None };
                let mean = mean_index(g);
                rows.push(vec![
                    g.label.clone(),
                    mean.to_string(),
                    chi.clone().unwrap_or_else(|| "-".into()),
                ]);
                json.push(MeanIndexRow { label: g.label.clone(), mean_index: mean, avg_chi: chi });
            }
            let emit = Emit::new(cli, Some(&loaded));
            Ok(ok(emit.table(&["label", "mean_index", "avg_chi"], &rows, &json)))
        }
        Command::VerifyMorse { config, window, m_max } => {
            let loaded = load(config)?;
            let cfg = &loaded.config;
            let (q_lo, q_hi) = parse_window(window)?;
            let m_max = match m_max {
                Some(m) => *m,
                None => sufficient_m_max(cfg, q_hi)?,
            };
            let w = morse_counts(cfg, q_lo, q_hi, m_max)?;
            let mseq: Vec<i64> = w.counts.iter().map(|&c| c as i64).collect();
            let betti: Vec<u8> = (q_lo..=q_hi).map(|q| crate::homology::betti(cfg.n, q)).collect();
            let bseq: Vec<i64> = betti.iter().map(|&b| b as i64).collect();
            let inequalities = check_morse_inequalities(&mseq, &bseq)?;
            let report = MorseReport {
                q_lo,
                q_hi,
                m_max,
                pass: inequalities.pass,
                rows: (q_lo..=q_hi)
                    .zip(w.counts.iter().zip(&betti))
                    .map(|(q, (&morse, &betti))| MorseRow { q, morse, betti })
                    .collect(),
                inequalities,
                contributors: w.contributors,
            };
            let text = Emit::new(cli, Some(&loaded)).report(&report);
            let violation = report.inequalities.first_violation.clone();
            Ok(verdict(text, report.pass, || match violation {
                Some(v) => format!(
                    "{} Morse inequality fails at q = {}",
                    format!("{:?}", v.inequality).to_lowercase(),
                    q_lo + v.q as i64
                ),
                None => "Morse inequalities".into(),
            }))
        }
        Command::IdentityCheck { config } => {
            let loaded = load(config)?;
            let report = check_mean_index_identity(&loaded.config)?;
            let text = Emit::new(cli, Some(&loaded)).report(&report);
            Ok(verdict(text, report.pass, || {
                format!(
                    "Σ χ̂(c)/î(c) = {} differs from B(n,1) = {}",
                    report.lhs,
                    format_rational(&report.rhs)
                )
            }))
        }
        Command::JumpSearch { config, eps, delta, max_m, max_n, out } => {
            let loaded = load(config)?;
            let eps = eps.as_deref().map(|e| rational_arg("eps", e)).transpose()?;
            let delta = rational_arg("delta", delta)?;
            let cert = find_common_jump(&loaded.config, eps.as_ref(), &delta, *max_m, *max_n)?;
            if let Some(path) = out {
                std::fs::write(path, serialize_certificate(&cert)).map_err(|e| {
                    Error::Validation(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            let emit = Emit::new(cli, Some(&loaded));
            let text = match emit.format {
                Format::Json => serialize_certificate(&cert),
                Format::Tsv => emit.report(&cert),
            };
            Ok(ok(text))
        }
        Command::VerifyJump { config, cert, probe } => {
            let loaded = load(config)?;
            let cert = parse_certificate(&read(cert)?).map_err(|e| prefix_path(e, cert))?;
            let report = verify_jump(&loaded.config, &cert, *probe)?;
            let text = Emit::new(cli, Some(&loaded)).report(&report);
            Ok(verdict(text, report.pass, || report.verdict.clone()))
        }
        Command::ReplayProof { config, cert, probe, delta } => {
            let loaded = load(config)?;
            let cert = parse_certificate(&read(cert)?).map_err(|e| prefix_path(e, cert))?;
            let delta = delta.as_deref().map(|d| rational_arg("delta", d)).transpose()?;
            let report = replay_proof(&loaded.config, &cert, *probe, delta.as_ref())?;
            let text = Emit::new(cli, Some(&loaded)).report(&report);
            Ok(verdict(text, report.pass, || report.failures.join("\ncheck failed: ")))
        }
        Command::Validate { config, cert } => {
            let loaded = load(config)?;
            let certificate = match cert {
                Some(path) => {
                    let c = parse_certificate(&read(path)?).map_err(|e| prefix_path(e, path))?;
                    validate_certificate(&loaded.config, &c)?;
                    Some(true)
                }
                None => None,
            };
            let report = ValidateReport {
                valid: true,
                n: loaded.config.n,
                geodesics: loaded.config.geodesics.len(),
                certificate,
            };
            Ok(ok(Emit::new(cli, Some(&loaded)).report(&report)))
        }
    }
}
