use std::io::{self, Write};

use hhquad::{Method, QuadReport};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::job::{Job, OutputFormat};
use crate::{EXIT_OK, EXIT_TOLERANCE};

#[derive(Debug)]
pub enum Outcome {
    Done {
        job: Box<Job>,
        report: Box<QuadReport>,
        oracle: Option<f64>,
    },
    Failed {
        label: Option<String>,
        code: i32,
        message: String,
    },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Done { job, report, .. } => {
                if job.config.method == Method::Adaptive && !report.tolerance_met {
                    EXIT_TOLERANCE
                } else {
                    EXIT_OK
                }
            }
            Outcome::Failed { code, .. } => *code,
        }
    }
}

/// One output record; `line` is the batch line number, if any.
#[derive(Debug)]
pub struct Record {
    pub line: Option<usize>,
    pub outcome: Outcome,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// 17 significant digits in positional notation where that stays readable.
fn text_num(x: f64) -> String {
    let mag = x.abs();
    if x == 0.0 || !(1e-4..1e15).contains(&mag) {
        return if x == 0.0 { "0".into() } else { sci(x) };
    }
    let decimals = (16 - mag.log10().floor() as i32).max(0) as usize;
    format!("{x:.decimals$}")
}

fn raw(x: f64) -> Box<RawValue> {
    // `{:e}` output of a finite f64 is valid JSON.
    RawValue::from_string(sci(x)).expect("finite number")
}

#[derive(Serialize)]
struct Evaluations {
    f: usize,
    jet: usize,
    interval: usize,
}

#[derive(Serialize)]
struct PanelJson {
    a: Box<RawValue>,
    b: Box<RawValue>,
    lower: Box<RawValue>,
    upper: Box<RawValue>,
    mean_lower: Box<RawValue>,
    mean_upper: Box<RawValue>,
    m: Box<RawValue>,
    #[serde(rename = "M")]
    big_m: Box<RawValue>,
    certified: bool,
    lower_from: &'static str,
    upper_from: &'static str,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    label: &'a str,
    expr: &'a str,
    a: Box<RawValue>,
    b: Box<RawValue>,
    lower: Box<RawValue>,
    upper: Box<RawValue>,
    width: Box<RawValue>,
    certified: bool,
    tolerance_met: bool,
    panel_count: usize,
    curvature: &'static str,
    evaluations: Evaluations,
    kernels_used: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    panels: Option<Vec<PanelJson>>,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    exit_code: i32,
    error: &'a str,
}

fn report_json<'a>(job: &'a Job, r: &QuadReport, oracle: Option<f64>) -> ReportJson<'a> {
    ReportJson {
        label: &job.label,
        expr: &job.expr_text,
        a: raw(job.a),
        b: raw(job.b),
        lower: raw(r.integral_bounds.lo()),
        upper: raw(r.integral_bounds.hi()),
        width: raw(r.width()),
        certified: r.certified,
        tolerance_met: r.tolerance_met,
        panel_count: r.panel_count,
        curvature: r.curvature_mode.name(),
        evaluations: Evaluations {
            f: r.evaluations.f,
            jet: r.evaluations.jet,
            interval: r.evaluations.interval,
        },
        kernels_used: r.kernels_used.iter().map(|k| k.name()).collect(),
        oracle: oracle.map(raw),
        panels: r.panels.as_ref().map(|ps| {
            ps.iter()
                .map(|p| PanelJson {
                    a: raw(p.domain.lo()),
                    b: raw(p.domain.hi()),
                    lower: raw(p.integral.lo()),
                    upper: raw(p.integral.hi()),
                    mean_lower: raw(p.mean.bounds.lo()),
                    mean_upper: raw(p.mean.bounds.hi()),
                    m: raw(p.curvature.0),
                    big_m: raw(p.curvature.1),
                    certified: p.mean.certified,
                    lower_from: p.mean.lower_from.name(),
                    upper_from: p.mean.upper_from.name(),
                })
                .collect()
        }),
    }
}

pub fn write_records(out: &mut dyn Write, format: OutputFormat, records: &[Record]) -> io::Result<()> {
    match format {
        OutputFormat::Json => {
            for rec in records {
                let line = match &rec.outcome {
                    Outcome::Done { job, report, oracle } => serde_json::to_string(&report_json(job, report, *oracle)),
                    Outcome::Failed { label, code, message } => serde_json::to_string(&ErrorJson {
                        label: label.as_deref(),
                        line: rec.line,
                        exit_code: *code,
                        error: message,
                    }),
                }
                .map_err(io::Error::other)?;
                writeln!(out, "{line}")?;
            }
        }
        OutputFormat::Csv => write_csv(out, records)?,
        OutputFormat::Text => {
            for (i, rec) in records.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                write_text(out, rec)?;
            }
        }
    }
    out.flush()
}

fn write_csv(out: &mut dyn Write, records: &[Record]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "a", "b", "lower", "upper", "width", "certified", "panel_count"])?;
    for rec in records {
        match &rec.outcome {
            Outcome::Done { job, report, .. } => w.write_record([
                job.label.clone(),
                sci(job.a),
                sci(job.b),
                sci(report.integral_bounds.lo()),
                sci(report.integral_bounds.hi()),
                sci(report.width()),
                report.certified.to_string(),
                report.panel_count.to_string(),
            ])?,
            // Failed jobs keep their row so rows line up with jobs; the
            // message goes to stderr.
            Outcome::Failed { label, .. } => {
                let label = label
                    .clone()
                    .unwrap_or_else(|| format!("line{}", rec.line.unwrap_or(0)));
                w.write_record([label.as_str(), "", "", "", "", "", "false", "0"])?
            }
        }
    }
    w.flush()
}

fn write_text(out: &mut dyn Write, rec: &Record) -> io::Result<()> {
    match &rec.outcome {
        Outcome::Done { job, report: r, oracle } => {
            writeln!(out, "label={}", job.label)?;
            writeln!(out, "expr={}", job.expr_text)?;
            writeln!(out, "interval=[{}, {}]", text_num(job.a), text_num(job.b))?;
            writeln!(out, "lower={}", text_num(r.integral_bounds.lo()))?;
            writeln!(out, "upper={}", text_num(r.integral_bounds.hi()))?;
            writeln!(out, "width={}", sci(r.width()))?;
            writeln!(out, "certified={}", r.certified)?;
            if job.config.method == Method::Adaptive {
                writeln!(out, "tolerance_met={}", r.tolerance_met)?;
            }
            writeln!(out, "panels={}", r.panel_count)?;
            writeln!(out, "curvature={}", r.curvature_mode)?;
            let names: Vec<_> = r.kernels_used.iter().map(|k| k.name()).collect();
            writeln!(out, "kernels_used={}", names.join(","))?;
            let e = &r.evaluations;
            writeln!(out, "evaluations=f:{} jet:{} interval:{}", e.f, e.jet, e.interval)?;
            if let Some(v) = oracle {
                writeln!(out, "simpson={}", text_num(*v))?;
            }
            if let Some(ps) = &r.panels {
                for (i, p) in ps.iter().enumerate() {
                    writeln!(
                        out,
                        "panel {i} [{}, {}] integral=[{}, {}] m={} M={} certified={} lower_from={} upper_from={}",
                        text_num(p.domain.lo()),
                        text_num(p.domain.hi()),
                        text_num(p.integral.lo()),
                        text_num(p.integral.hi()),
                        text_num(p.curvature.0),
                        text_num(p.curvature.1),
                        p.mean.certified,
                        p.mean.lower_from,
                        p.mean.upper_from,
                    )?;
                }
            }
        }
        Outcome::Failed { label, code, message } => {
            if let Some(l) = label {
                writeln!(out, "label={l}")?;
            }
            if let Some(n) = rec.line {
                writeln!(out, "line={n}")?;
            }
            writeln!(out, "error={message}")?;
            writeln!(out, "exit_code={code}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(sci(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(text_num(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(text_num(2.0), "2.0000000000000000");
        assert_eq!(text_num(0.0), "0");
        assert_eq!(text_num(-1e-9), "-1.0000000000000001e-9");
        for x in [1.0 / 3.0, 2.0, 1e-300, -7.25e18, 0.1] {
            assert_eq!(sci(x).parse::<f64>().unwrap(), x);
            assert_eq!(text_num(x).parse::<f64>().unwrap(), x);
        }
    }
}
