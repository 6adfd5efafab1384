use std::fmt;
use std::str::FromStr;

use hhquad::{
    integrate, oracle_integrate, CurvatureScope, CurvatureSource, Expr, KernelSet, Method, QuadConfig, QuadError,
};
use serde::Deserialize;

use crate::render::Outcome;
use crate::{Args, EXIT_DOMAIN, EXIT_INPUT, ORACLE_PANELS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(format!("expected text, json or csv, got `{s}`")),
        }
    }
}

/// An input problem, tagged with the flag or job field it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct JobError {
    pub field: String,
    pub message: String,
}

impl JobError {
    pub fn field(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for JobError {}

/// One line of a batch file. Absent fields fall back to the command-line
/// flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobLine {
    pub label: Option<String>,
    pub expr: Option<String>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub method: Option<String>,
    pub panels: Option<usize>,
    #[serde(alias = "tolerance")]
    pub tol: Option<f64>,
    pub max_panels: Option<usize>,
    pub kernels: Option<String>,
    pub curvature: Option<String>,
    pub curvature_scope: Option<String>,
    pub budget: Option<usize>,
    pub compare: Option<bool>,
    pub emit_panels: Option<bool>,
    pub compensated: Option<bool>,
}

impl JobLine {
    pub fn parse(line: &str) -> Result<Self, JobError> {
        serde_json::from_str(line).map_err(|e| JobError::field("job", format!("malformed JSON: {e}")))
    }
}

/// A fully resolved integration request.
#[derive(Debug, Clone)]
pub struct Job {
    pub label: String,
    pub expr_text: String,
    pub expr: Expr,
    pub a: f64,
    pub b: f64,
    pub config: QuadConfig,
    pub output: OutputFormat,
    pub compare: bool,
}

struct Raw<'a> {
    label: Option<String>,
    expr: Option<&'a str>,
    a: Option<f64>,
    b: Option<f64>,
    method: &'a str,
    panels: Option<usize>,
    tol: f64,
    max_panels: usize,
    kernels: &'a str,
    curvature: &'a str,
    scope: &'a str,
    budget: usize,
    output: &'a str,
    compare: bool,
    emit_panels: bool,
    compensated: bool,
}

impl Job {
    pub fn from_args(args: &Args) -> Result<Self, JobError> {
        resolve(
            Raw {
                label: args.label.clone(),
                expr: args.expr.as_deref(),
                a: args.a,
                b: args.b,
                method: &args.method,
                panels: args.panels,
                tol: args.tol,
                max_panels: args.max_panels,
                kernels: &args.kernels,
                curvature: &args.curvature,
                scope: &args.curvature_scope,
                budget: args.budget,
                output: &args.output,
                compare: args.compare,
                emit_panels: args.emit_panels,
                compensated: args.compensated,
            },
            "--",
        )
    }

    /// Unlabelled jobs are named `line<N>`.
    pub fn from_line(line: JobLine, defaults: &Args, line_no: usize) -> Result<Self, JobError> {
        resolve(
            Raw {
                label: line.label.or_else(|| Some(format!("line{line_no}"))),
                expr: line.expr.as_deref(),
                a: line.a,
                b: line.b,
                method: line.method.as_deref().unwrap_or(&defaults.method),
                panels: line.panels.or(defaults.panels),
                tol: line.tol.unwrap_or(defaults.tol),
                max_panels: line.max_panels.unwrap_or(defaults.max_panels),
                kernels: line.kernels.as_deref().unwrap_or(&defaults.kernels),
                curvature: line.curvature.as_deref().unwrap_or(&defaults.curvature),
                scope: line.curvature_scope.as_deref().unwrap_or(&defaults.curvature_scope),
                budget: line.budget.unwrap_or(defaults.budget),
                output: &defaults.output,
                compare: line.compare.unwrap_or(defaults.compare),
                emit_panels: line.emit_panels.unwrap_or(defaults.emit_panels),
                compensated: line.compensated.unwrap_or(defaults.compensated),
            },
            "",
        )
    }

    pub fn execute(&self) -> Outcome {
        let report = match integrate(&self.expr, self.a, self.b, &self.config) {
            Ok(r) => r,
            Err(e) => return self.failure(e),
        };
        let oracle = if self.compare {
            match oracle_integrate(&self.expr, self.a, self.b, ORACLE_PANELS) {
                Ok(v) => Some(v),
                Err(e) => return self.failure(e),
            }
        } else {
            None
        };
        Outcome::Done {
            job: Box::new(self.clone()),
            report: Box::new(report),
            oracle,
        }
    }

    fn failure(&self, e: QuadError) -> Outcome {
        let code = match e {
            QuadError::Config(_) => EXIT_INPUT,
            _ => EXIT_DOMAIN,
        };
        Outcome::Failed {
            label: Some(self.label.clone()),
            code,
            message: e.to_string(),
        }
    }
}

/// `flag_prefix` is `--` for command-line flags and empty for batch fields.
fn resolve(raw: Raw<'_>, flag_prefix: &str) -> Result<Job, JobError> {
    let name = |f: &str| {
        if flag_prefix.is_empty() {
            format!("field `{f}`")
        } else {
            format!("{flag_prefix}{}", f.replace('_', "-"))
        }
    };
    let err = |f: &str, m: String| JobError {
        field: name(f),
        message: m,
    };

    let expr_text = raw.expr.ok_or_else(|| err("expr", "is required".into()))?;
    let expr = expr_text.parse::<Expr>().map_err(|e| err("expr", e.to_string()))?;
    let a = raw.a.ok_or_else(|| err("a", "is required".into()))?;
    let b = raw.b.ok_or_else(|| err("b", "is required".into()))?;
    if !a.is_finite() {
        return Err(err("a", format!("must be finite, got {a}")));
    }
    if !b.is_finite() {
        return Err(err("b", format!("must be finite, got {b}")));
    }
    if a >= b {
        return Err(err("b", format!("must exceed a ({b} <= {a})")));
    }

    let method = match raw.method {
        "fixed" => Method::Fixed,
        "adaptive" => Method::Adaptive,
        m => return Err(err("method", format!("expected fixed or adaptive, got `{m}`"))),
    };
    let panels = match (method, raw.panels) {
        (_, Some(0)) => return Err(err("panels", "must be at least 1".into())),
        (_, Some(n)) => n,
        (Method::Fixed, None) => 16,
        (Method::Adaptive, None) => 1,
    };
    if !(raw.tol > 0.0 && raw.tol.is_finite()) {
        return Err(err("tol", format!("must be positive, got {}", raw.tol)));
    }
    let max_panels = match method {
        Method::Fixed => raw.max_panels.max(panels),
        Method::Adaptive if raw.max_panels < panels => {
            return Err(err(
                "max_panels",
                format!("({}) is below the initial panel count ({panels})", raw.max_panels),
            ))
        }
        Method::Adaptive => raw.max_panels,
    };
    let kernels = raw
        .kernels
        .parse::<KernelSet>()
        .map_err(|e| err("kernels", e.to_string()))?;
    let curvature = parse_curvature(raw.curvature).map_err(|m| err("curvature", m))?;
    let scope = match raw.scope {
        "panel" => CurvatureScope::PerPanel,
        "global" => CurvatureScope::Global,
        s => return Err(err("curvature_scope", format!("expected panel or global, got `{s}`"))),
    };
    if raw.budget == 0 {
        return Err(err("budget", "must be at least 1".into()));
    }
    let output: OutputFormat = raw.output.parse().map_err(|m| err("output", m))?;

    let mut config = QuadConfig {
        method,
        panels_n: panels,
        tolerance: raw.tol,
        max_panels,
        curvature,
        scope,
        kernels,
        compensated: raw.compensated,
        keep_panels: raw.emit_panels,
        ..QuadConfig::default()
    };
    config.curvature_options.budget = raw.budget;
    config
        .validate()
        .map_err(|e| JobError::field("configuration", e.to_string()))?;

    Ok(Job {
        label: raw.label.unwrap_or_else(|| expr_text.to_string()),
        expr_text: expr_text.to_string(),
        expr,
        a,
        b,
        config,
        output,
        compare: raw.compare,
    })
}

/// `rigorous`, `heuristic` or `manual:M1,M2` with `M1 <= M2`.
fn parse_curvature(s: &str) -> Result<CurvatureSource, String> {
    match s {
        "rigorous" => return Ok(CurvatureSource::Rigorous),
        "heuristic" => return Ok(CurvatureSource::Heuristic),
        _ => {}
    }
    let Some(rest) = s.strip_prefix("manual:") else {
        return Err(format!("expected rigorous, heuristic or manual:M1,M2, got `{s}`"));
    };
    let (lo, hi) = rest
        .split_once(',')
        .ok_or_else(|| format!("manual curvature needs two values, got `{rest}`"))?;
    let num = |t: &str| -> Result<f64, String> {
        let v: f64 = t.trim().parse().map_err(|_| format!("`{t}` is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{t}` is not finite"))
        }
    };
    let (m, big_m) = (num(lo)?, num(hi)?);
    if m > big_m {
        return Err(format!("m exceeds M ({m} > {big_m})"));
    }
    Ok(CurvatureSource::Manual { m, big_m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_flag() {
        assert_eq!(parse_curvature("rigorous"), Ok(CurvatureSource::Rigorous));
        assert_eq!(
            parse_curvature("manual:-1,2.5"),
            Ok(CurvatureSource::Manual { m: -1.0, big_m: 2.5 })
        );
        assert!(parse_curvature("manual:3,2").unwrap_err().contains("m exceeds M"));
        assert!(parse_curvature("manual:1").is_err());
        assert!(parse_curvature("manual:1,inf").is_err());
        assert!(parse_curvature("exact").is_err());
    }

    #[test]
    fn batch_line_fields() {
        let l = JobLine::parse(r#"{"expr":"x","a":0,"b":1,"tolerance":1e-3}"#).unwrap();
        assert_eq!(l.tol, Some(1e-3));
        let e = JobLine::parse(r#"{"expr":"x","a":0,"b":1,"tols":1}"#).unwrap_err();
        assert!(e.message.contains("tols"), "{e}");
    }
}
