//! Batch front-end for `hhquad`: flags or newline-delimited JSON jobs in,
//! text, JSON or CSV enclosure reports out.
//!
//! Exit codes: 0 success, 2 input error, 3 adaptive tolerance unmet (the
//! enclosure is still printed), 4 domain or curvature error.

mod job;
mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;

pub use job::{Job, JobError, JobLine, OutputFormat};
pub use render::{Outcome, Record};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

/// Subintervals for the `--compare` Simpson oracle.
pub const ORACLE_PANELS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "hhquad", version, about = "Certified enclosures of definite integrals")]
pub struct Args {
    /// Integrand in x, e.g. "exp(-(x^2)) * cos(x)".
    #[arg(long)]
    pub expr: Option<String>,
    /// Lower limit.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Upper limit.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// fixed | adaptive
    #[arg(long, default_value = "adaptive")]
    pub method: String,
    /// Uniform panels (fixed) or initial panels (adaptive).
    #[arg(long)]
    pub panels: Option<usize>,
    /// Target width of the integral enclosure (adaptive).
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_panels: usize,
    /// Comma-separated subset of midpoint,trapezoid,ujevic,classic_hh,auto.
    #[arg(long, default_value = "midpoint,trapezoid,auto")]
    pub kernels: String,
    /// rigorous | heuristic | manual:M1,M2
    #[arg(long, default_value = "rigorous", allow_hyphen_values = true)]
    pub curvature: String,
    /// panel | global
    #[arg(long, default_value = "panel")]
    pub curvature_scope: String,
    /// Subinterval budget for rigorous curvature bounds.
    #[arg(long, default_value_t = 256)]
    pub budget: usize,
    /// text | json | csv
    #[arg(long, default_value = "text")]
    pub output: String,
    /// Also report a composite Simpson estimate.
    #[arg(long)]
    pub compare: bool,
    /// Include per-panel diagnostics.
    #[arg(long)]
    pub emit_panels: bool,
    /// Sum panel endpoints with compensated summation.
    #[arg(long)]
    pub compensated: bool,
    #[arg(long)]
    pub label: Option<String>,
    /// File of newline-delimited JSON jobs; flags above act as defaults.
    #[arg(long, conflicts_with = "expr")]
    pub batch: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs one job or a batch.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    if let Some(path) = args.batch.clone() {
        return run_batch(&path, &args, out, err);
    }
    let job = match Job::from_args(&args) {
        Ok(j) => j,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let outcome = job.execute();
    let code = outcome.exit_code();
    let rec = Record { line: None, outcome };
    let failed = matches!(rec.outcome, Outcome::Failed { .. });
    // A lone failure is reported on stderr only, except in JSON mode where
    // the caller expects a record.
    if !failed || job.output == OutputFormat::Json {
        if let Err(e) = render::write_records(out, job.output, std::slice::from_ref(&rec)) {
            let _ = writeln!(err, "error: writing output: {e}");
            return EXIT_INPUT;
        }
    }
    if let Outcome::Failed { message, .. } = &rec.outcome {
        let _ = writeln!(err, "error: {message}");
    }
    code
}

/// Runs every job in `path`, one per non-empty line, and writes one record
/// per job in input order. The exit code is the most severe job code.
pub fn run_batch(path: &Path, defaults: &Args, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: --batch {}: {e}", path.display());
            return EXIT_INPUT;
        }
    };
    let format = match defaults.output.parse::<OutputFormat>() {
        Ok(f) => f,
        Err(e) => {
            let _ = writeln!(err, "error: --output: {e}");
            return EXIT_INPUT;
        }
    };

    let mut seen = std::collections::HashSet::new();
    let mut prepared: Vec<(usize, Result<Job, JobError>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let job = JobLine::parse(line)
            .and_then(|l| Job::from_line(l, defaults, line_no))
            .and_then(|j| {
                if seen.insert(j.label.clone()) {
                    Ok(j)
                } else {
                    Err(JobError::field(
                        "field `label`",
                        format!("duplicate label `{}`", j.label),
                    ))
                }
            });
        prepared.push((line_no, job));
    }

    let records: Vec<Record> = prepared
        .into_par_iter()
        .map(|(line, job)| {
            let outcome = match job {
                Ok(j) => j.execute(),
                Err(e) => Outcome::Failed {
                    label: None,
                    code: EXIT_INPUT,
                    message: e.to_string(),
                },
            };
            Record {
                line: Some(line),
                outcome,
            }
        })
        .collect();

    for r in &records {
        if let Outcome::Failed { message, .. } = &r.outcome {
            let _ = writeln!(err, "line {}: error: {message}", r.line.unwrap_or(0));
        }
    }
    if let Err(e) = render::write_records(out, format, &records) {
        let _ = writeln!(err, "error: writing output: {e}");
        return EXIT_INPUT;
    }
    records.iter().map(|r| r.outcome.exit_code()).max().unwrap_or(EXIT_OK)
}
