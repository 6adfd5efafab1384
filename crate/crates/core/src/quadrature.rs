//! Composite and adaptive drivers.
//!
//! Each panel gets its own curvature bounds (or the global ones, on request),
//! a mean-value enclosure from [`enclose_panel`], and is scaled by its width.
//! Panel enclosures are summed in ascending position with outward rounding,
//! so results are independent of how panels were scheduled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::AddAssign;

use rayon::prelude::*;

use crate::bounds::{enclose_panel, Enclosure, Kernel, KernelSet, PanelData};
use crate::curvature::{bound_curvature, manual_bounds, CurvatureBounds, CurvatureMode, CurvatureOptions};
use crate::error::{BoundsError, CurvatureError, DomainError, QuadError};
use crate::expr::Expr;
use crate::interval::{ulps_down, ulps_up, Interval};

/// Evaluation counters.
///
/// `f` counts evaluations of `f` at panel nodes, `jet` counts real-valued
/// jets (curvature sampling), `interval` counts interval-valued jets
/// (curvature enclosures and endpoint derivatives).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub f: usize,
    pub jet: usize,
    pub interval: usize,
}

impl AddAssign for EvalCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.f += rhs.f;
        self.jet += rhs.jet;
        self.interval += rhs.interval;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fixed,
    Adaptive,
}

/// Where curvature bounds come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureSource {
    Rigorous,
    Heuristic,
    /// Caller-supplied `m <= f'' <= M`, applied to every panel.
    Manual {
        m: f64,
        big_m: f64,
    },
}

impl CurvatureSource {
    pub fn mode(&self) -> CurvatureMode {
        match self {
            CurvatureSource::Rigorous => CurvatureMode::Rigorous,
            CurvatureSource::Heuristic => CurvatureMode::Heuristic,
            CurvatureSource::Manual { .. } => CurvatureMode::Manual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureScope {
    /// Bound `f''` separately on every panel.
    PerPanel,
    /// Bound `f''` once over `[a, b]` and reuse it on every panel.
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadConfig {
    pub method: Method,
    /// Uniform panels for the fixed method; initial panels for the adaptive one.
    pub panels_n: usize,
    /// Target width of the integral enclosure (adaptive).
    pub tolerance: f64,
    pub max_panels: usize,
    pub curvature: CurvatureSource,
    pub scope: CurvatureScope,
    pub kernels: KernelSet,
    pub curvature_options: CurvatureOptions,
    /// Neumaier summation of panel endpoints instead of interval addition.
    pub compensated: bool,
    /// Keep per-panel diagnostics in the report.
    pub keep_panels: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            method: Method::Adaptive,
            panels_n: 1,
            tolerance: 1e-6,
            max_panels: 10_000,
            curvature: CurvatureSource::Rigorous,
            scope: CurvatureScope::PerPanel,
            kernels: KernelSet::default(),
            curvature_options: CurvatureOptions::default(),
            compensated: false,
            keep_panels: false,
        }
    }
}

impl QuadConfig {
    pub fn fixed(panels: usize) -> Self {
        Self {
            method: Method::Fixed,
            panels_n: panels,
            max_panels: panels.max(Self::default().max_panels),
            ..Self::default()
        }
    }

    pub fn adaptive(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(QuadError::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.panels_n == 0 {
            return Err(QuadError::Config("panel count must be at least 1".into()));
        }
        if self.max_panels < self.panels_n {
            return Err(QuadError::Config(format!(
                "max_panels ({}) is below the initial panel count ({})",
                self.max_panels, self.panels_n
            )));
        }
        if self.curvature_options.budget == 0 {
            return Err(QuadError::Config("curvature budget must be at least 1".into()));
        }
        if self.kernels.is_empty() {
            return Err(QuadError::Config("no kernels selected".into()));
        }
        if let CurvatureSource::Manual { m, big_m } = self.curvature {
            manual_bounds(m, big_m, Interval::point(0.0)).map_err(|e| QuadError::Config(e.to_string()))?;
        }
        Ok(())
    }
}

/// Diagnostics of one panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelReport {
    pub domain: Interval,
    /// Enclosure of the panel mean.
    pub mean: Enclosure,
    /// `(b - a) * mean`: enclosure of the panel integral.
    pub integral: Interval,
    /// `(m, M)` used on this panel.
    pub curvature: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadReport {
    pub integral_bounds: Interval,
    /// Every panel used certifying curvature data, and for the adaptive method
    /// the tolerance was met.
    pub certified: bool,
    pub tolerance_met: bool,
    pub panel_count: usize,
    pub evaluations: EvalCounts,
    pub curvature_mode: CurvatureMode,
    /// Kernels that contributed on at least one panel, in canonical order.
    pub kernels_used: Vec<Kernel>,
    /// Per-panel diagnostics in ascending order, when requested.
    pub panels: Option<Vec<PanelReport>>,
}

impl QuadReport {
    pub fn width(&self) -> f64 {
        self.integral_bounds.width()
    }
}

/// Runs the method selected in `cfg`.
pub fn integrate(f: &Expr, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadReport, QuadError> {
    match cfg.method {
        Method::Fixed => integrate_fixed(f, a, b, cfg),
        Method::Adaptive => integrate_adaptive(f, a, b, cfg),
    }
}

fn check_limits(a: f64, b: f64) -> Result<Interval, QuadError> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(QuadError::Config(format!("need finite a < b, got a = {a}, b = {b}")));
    }
    Ok(Interval::new(a, b).expect("checked"))
}

/// Failure on one panel before it is placed in the partition.
enum PanelFailure {
    Curvature(CurvatureError),
    Domain(DomainError),
    Bounds(BoundsError),
}

impl PanelFailure {
    fn at(self, index: usize, panel: Interval, completed: usize) -> QuadError {
        match self {
            PanelFailure::Curvature(source) => QuadError::Curvature {
                index,
                panel,
                completed,
                source,
            },
            PanelFailure::Domain(source) => QuadError::Domain {
                index,
                panel,
                completed,
                source,
            },
            PanelFailure::Bounds(source) => QuadError::Bounds {
                index,
                panel,
                completed,
                source,
            },
        }
    }
}

struct Driver<'a> {
    f: &'a Expr,
    cfg: &'a QuadConfig,
    global: Option<CurvatureBounds>,
}

impl<'a> Driver<'a> {
    fn new(f: &'a Expr, whole: Interval, cfg: &'a QuadConfig, counts: &mut EvalCounts) -> Result<Self, QuadError> {
        cfg.validate()?;
        let global = match (cfg.scope, cfg.curvature) {
            (CurvatureScope::Global, CurvatureSource::Manual { m, big_m }) => {
                Some(manual_bounds(m, big_m, whole).map_err(|e| PanelFailure::Curvature(e).at(0, whole, 0))?)
            }
            (CurvatureScope::Global, source) => {
                let c = bound_curvature(f, whole, source.mode(), &cfg.curvature_options)
                    .map_err(|e| PanelFailure::Curvature(e).at(0, whole, 0))?;
                *counts += c.work;
                Some(c)
            }
            (CurvatureScope::PerPanel, _) => None,
        };
        Ok(Self { f, cfg, global })
    }

    fn curvature(&self, panel: Interval) -> Result<CurvatureBounds, CurvatureError> {
        if let Some(g) = &self.global {
            return Ok(g.clone());
        }
        match self.cfg.curvature {
            CurvatureSource::Manual { m, big_m } => manual_bounds(m, big_m, panel),
            source => bound_curvature(self.f, panel, source.mode(), &self.cfg.curvature_options),
        }
    }

    fn enclose(&self, panel: Interval) -> Result<(PanelReport, EvalCounts), PanelFailure> {
        let curvature = self.curvature(panel).map_err(PanelFailure::Curvature)?;
        let mut counts = if self.global.is_some() {
            EvalCounts::default()
        } else {
            curvature.work
        };
        let kernels = &self.cfg.kernels;
        let derivatives = kernels.ujevic || (kernels.auto && curvature.is_convex());
        let data = PanelData::evaluate(self.f, panel.lo(), panel.hi(), derivatives).map_err(PanelFailure::Domain)?;
        counts.f += 3;
        if derivatives {
            counts.interval += 2;
        }
        let mean = enclose_panel(&data, &curvature, kernels).map_err(PanelFailure::Bounds)?;
        let integral = data
            .width()
            .and_then(|h| mean.bounds.try_mul(h).map_err(BoundsError::Arithmetic))
            .map_err(PanelFailure::Bounds)?;
        let report = PanelReport {
            domain: panel,
            mean,
            integral,
            curvature: (curvature.lower, curvature.upper),
        };
        Ok((report, counts))
    }

    fn finish(
        &self,
        panels: Vec<PanelReport>,
        counts: EvalCounts,
        tolerance_met: bool,
    ) -> Result<QuadReport, QuadError> {
        let integral_bounds = sum_enclosures(panels.iter().map(|p| p.integral), self.cfg.compensated)
            .map_err(|e| QuadError::Config(format!("integral enclosure overflowed: {e}")))?;
        let all_certified = panels.iter().all(|p| p.mean.certified);
        let mut kernels_used: Vec<Kernel> = panels
            .iter()
            .flat_map(|p| [p.mean.lower_from, p.mean.upper_from])
            .collect();
        kernels_used.sort();
        kernels_used.dedup();
        let certified = all_certified && (self.cfg.method == Method::Fixed || tolerance_met);
        Ok(QuadReport {
            integral_bounds,
            certified,
            tolerance_met,
            panel_count: panels.len(),
            evaluations: counts,
            curvature_mode: self.cfg.curvature.mode(),
            kernels_used,
            panels: self.cfg.keep_panels.then_some(panels),
        })
    }
}

/// Point `i` of the uniform partition of `whole` into `n` panels.
fn node(whole: Interval, i: usize, n: usize) -> f64 {
    if i == 0 {
        whole.lo()
    } else if i == n {
        whole.hi()
    } else {
        whole.lo() + whole.width() * (i as f64 / n as f64)
    }
}

fn uniform_panels(whole: Interval, n: usize) -> Result<Vec<Interval>, QuadError> {
    (0..n)
        .map(|i| {
            Interval::new(node(whole, i, n), node(whole, i + 1, n))
                .ok()
                .filter(|p| p.width() > 0.0)
                .ok_or_else(|| QuadError::Config(format!("{n} panels are too many for {whole}")))
        })
        .collect()
}

/// Encloses `panels` in parallel, keeping their order.
fn enclose_all(driver: &Driver<'_>, panels: &[Interval]) -> Result<(Vec<PanelReport>, EvalCounts), QuadError> {
    let results: Vec<_> = panels.par_iter().map(|&p| driver.enclose(p)).collect();
    let mut reports = Vec::with_capacity(panels.len());
    let mut counts = EvalCounts::default();
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok((rep, c)) => {
                counts += c;
                reports.push(rep);
            }
            Err(e) => return Err(e.at(index, panels[index], index)),
        }
    }
    Ok((reports, counts))
}

/// Uniform partition into `cfg.panels_n` panels.
pub fn integrate_fixed(f: &Expr, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadReport, QuadError> {
    let whole = check_limits(a, b)?;
    let mut counts = EvalCounts::default();
    let driver = Driver::new(f, whole, cfg, &mut counts)?;
    let panels = uniform_panels(whole, cfg.panels_n)?;
    let (reports, c) = enclose_all(&driver, &panels)?;
    counts += c;
    let total_width = sum_enclosures(reports.iter().map(|p| p.integral), cfg.compensated)
        .map(|s| s.width())
        .unwrap_or(f64::INFINITY);
    driver.finish(reports, counts, total_width <= cfg.tolerance)
}

/// Worklist entry: the widest panel comes first, then the leftmost.
struct Candidate {
    width: f64,
    lo: f64,
    slot: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .total_cmp(&other.width)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Bisects the panel with the widest integral enclosure until the summed
/// width is at most `cfg.tolerance` or `cfg.max_panels` is reached.
pub fn integrate_adaptive(f: &Expr, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadReport, QuadError> {
    let whole = check_limits(a, b)?;
    let mut counts = EvalCounts::default();
    let driver = Driver::new(f, whole, cfg, &mut counts)?;
    let initial = uniform_panels(whole, cfg.panels_n)?;
    let (reports, c) = enclose_all(&driver, &initial)?;
    counts += c;

    let mut slots: Vec<Option<PanelReport>> = Vec::with_capacity(2 * cfg.max_panels);
    let mut heap = BinaryHeap::new();
    let mut running = Neumaier::default();
    for rep in reports {
        let width = rep.integral.width();
        running.add(width);
        heap.push(Candidate {
            width,
            lo: rep.domain.lo(),
            slot: slots.len(),
        });
        slots.push(Some(rep));
    }
    let mut live = slots.len();

    let total = |slots: &[Option<PanelReport>]| -> f64 {
        let mut ordered: Vec<&PanelReport> = slots.iter().flatten().collect();
        ordered.sort_by(|p, q| p.domain.lo().total_cmp(&q.domain.lo()));
        sum_enclosures(ordered.iter().map(|p| p.integral), cfg.compensated)
            .map(|s| s.width())
            .unwrap_or(f64::INFINITY)
    };

    let mut tolerance_met = false;
    while live < cfg.max_panels {
        if running.value() <= cfg.tolerance && total(&slots) <= cfg.tolerance {
            tolerance_met = true;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let parent = slots[worst.slot].as_ref().expect("live panel").domain;
        let (left, right) = parent.bisect();
        if left.width() == 0.0 || right.width() == 0.0 {
            // Cannot refine below floating-point resolution.
            break;
        }
        let (l, r) = rayon::join(|| driver.enclose(left), || driver.enclose(right));
        let index_of = |p: Interval| slots.iter().flatten().filter(|q| q.domain.lo() < p.lo()).count();
        let (l, lc) = l.map_err(|e| e.at(index_of(left), left, live))?;
        let (r, rc) = r.map_err(|e| e.at(index_of(right), right, live))?;
        counts += lc;
        counts += rc;
        running.add(-worst.width);
        slots[worst.slot] = None;
        for rep in [l, r] {
            let width = rep.integral.width();
            running.add(width);
            heap.push(Candidate {
                width,
                lo: rep.domain.lo(),
                slot: slots.len(),
            });
            slots.push(Some(rep));
        }
        live += 1;
    }
    if !tolerance_met {
        tolerance_met = total(&slots) <= cfg.tolerance;
    }

    let mut panels: Vec<PanelReport> = slots.into_iter().flatten().collect();
    panels.sort_by(|p, q| p.domain.lo().total_cmp(&q.domain.lo()));
    driver.finish(panels, counts, tolerance_met)
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Endpoint-wise sum in the given order.
///
/// Plain mode adds with outward-rounded interval arithmetic. Compensated mode
/// uses Neumaier summation per endpoint and then pads by a bound on its error.
pub fn sum_enclosures(
    parts: impl IntoIterator<Item = Interval>,
    compensated: bool,
) -> Result<Interval, crate::error::DomainKind> {
    let mut iter = parts.into_iter();
    let Some(first) = iter.next() else {
        return Ok(Interval::point(0.0));
    };
    if !compensated {
        return iter.try_fold(first, |acc, p| acc.try_add(p));
    }
    let (mut lo, mut hi) = (Neumaier::default(), Neumaier::default());
    let mut abs_sum = 0.0;
    let mut n = 0usize;
    for p in std::iter::once(first).chain(iter) {
        lo.add(p.lo());
        hi.add(p.hi());
        abs_sum += p.mag();
        n += 1;
    }
    // |error| <= 2u|s| + 2n u^2 sum|x_i|, rounded up generously.
    let u = f64::EPSILON / 2.0;
    let tail = 4.0 * n as f64 * u * u * abs_sum;
    let lo_v = lo.value();
    let hi_v = hi.value();
    Interval::new(ulps_down(lo_v - tail, 2), ulps_up(hi_v + tail, 2))
}

/// Composite Simpson's rule with `n` (even) subintervals. Not rigorous; for
/// tests and comparisons only.
pub fn oracle_integrate(f: &Expr, a: f64, b: f64, n: usize) -> Result<f64, QuadError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(QuadError::Config(format!("Simpson needs an even n >= 2, got {n}")));
    }
    let whole = check_limits(a, b)?;
    let h = (b - a) / n as f64;
    let eval = |i: usize| -> Result<f64, QuadError> {
        let x = if i == n { b } else { a + i as f64 * h };
        f.eval_real(x).map_err(|source| QuadError::Domain {
            index: i,
            panel: whole,
            completed: 0,
            source,
        })
    };
    let mut sum = Neumaier::default();
    sum.add(eval(0)?);
    sum.add(eval(n)?);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum.add(w * eval(i)?);
    }
    Ok(sum.value() * h / 3.0)
}
