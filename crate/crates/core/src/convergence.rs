//! Error functionals and rate-bound checks for the operators.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::TestFunction;
use crate::operators::{Family, Prepared, StancuBeta};
use crate::qcalc::QContext;
use crate::report::{ConvergenceReport, ReportRow};

/// Slack below which a bound counts as violated.
pub const GUARD_BAND: f64 = 1e-9;

/// Largest grid the modulus of continuity will build on its own.
const MAX_REFINED_POINTS: usize = 20_000_000;

/// Uniform grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_min >= 0.0) {
            return Err(invalid(format!("grid start must be finite and >= 0, got {x_min}")));
        }
        if !(x_max.is_finite() && x_max > x_min) {
            return Err(invalid(format!("grid end must exceed start, got [{x_min}, {x_max}]")));
        }
        if points < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {points}")));
        }
        Ok(Self { x_min, x_max, points })
    }

    /// Grid on `[x_min, x_max]` whose spacing meets the resolution guard
    /// `spacing <= delta / 10`, never coarser than `min_points`.
    pub fn for_delta(x_min: f64, x_max: f64, delta: f64, min_points: usize) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(invalid(format!("delta must be positive, got {delta}")));
        }
        let needed = ((x_max - x_min) / (delta / 10.0)).ceil() as usize + 1;
        let points = needed.max(min_points);
        if points > MAX_REFINED_POINTS {
            return Err(Error::GridTooCoarse {
                spacing: (x_max - x_min) / (MAX_REFINED_POINTS - 1) as f64,
                required: delta / 10.0,
            });
        }
        Self::new(x_min, x_max, points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.node(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Same interval with `2(points - 1) + 1` points.
    pub fn halved(&self) -> Self {
        Self { points: 2 * (self.points - 1) + 1, ..*self }
    }
}

/// Two sides of a pointwise rate inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl BoundReport {
    pub fn new(x: f64, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self { x, lhs, rhs, slack, holds: slack >= -GUARD_BAND }
    }
}

/// Hölder exponent, constant and the reference set `E` of a Lipschitz class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzClass {
    alpha: f64,
    m: f64,
    set: Vec<f64>,
}

impl LipschitzClass {
    pub fn new(alpha: f64, m: f64, set: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(invalid(format!("class constant must be positive, got {m}")));
        }
        validate_set(&set)?;
        Ok(Self { alpha, m, set })
    }

    /// Class built from the Hölder metadata `f` declares.
    pub fn declared(f: &TestFunction, set: Vec<f64>) -> Result<Self> {
        let h = f.holder().ok_or_else(|| Error::MissingLipschitz(f.name().to_string()))?;
        Self::new(h.alpha, h.m, set)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn set(&self) -> &[f64] {
        &self.set
    }
}

fn validate_set(set: &[f64]) -> Result<()> {
    if set.is_empty() {
        return Err(invalid("reference set E must be non-empty"));
    }
    if let Some(bad) = set.iter().find(|y| !(y.is_finite() && **y >= 0.0)) {
        return Err(invalid(format!("reference set E must lie in [0, ∞), found {bad}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    Sup,
    /// `sup |g(x)| / (1 + x²)`.
    Weighted,
}

impl Norm {
    pub fn label(self) -> &'static str {
        match self {
            Norm::Sup => "sup",
            Norm::Weighted => "weighted",
        }
    }

    fn weight(self, x: f64) -> f64 {
        match self {
            Norm::Sup => 1.0,
            Norm::Weighted => 1.0 / (1.0 + x * x),
        }
    }
}

/// Running max/min over a window that only moves right.
#[derive(Default)]
struct Extremes {
    max: VecDeque<usize>,
    min: VecDeque<usize>,
}

impl Extremes {
    fn push(&mut self, i: usize, ys: &[f64]) {
        while self.max.back().is_some_and(|&j| ys[j] <= ys[i]) {
            self.max.pop_back();
        }
        self.max.push_back(i);
        while self.min.back().is_some_and(|&j| ys[j] >= ys[i]) {
            self.min.pop_back();
        }
        self.min.push_back(i);
    }

    fn evict_before(&mut self, i: usize) {
        while self.max.front().is_some_and(|&j| j < i) {
            self.max.pop_front();
        }
        while self.min.front().is_some_and(|&j| j < i) {
            self.min.pop_front();
        }
    }

    fn spread(&self, ys: &[f64]) -> f64 {
        ys[self.max[0]] - ys[self.min[0]]
    }
}

/// `ω(f; δ) = sup { |f(t) - f(x)| : |t - x| <= δ }` over the grid, with the
/// exact-distance pairs `(x_i, x_i + δ)` included.
pub fn modulus_of_continuity(f: &TestFunction, delta: f64, grid: &Grid) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    if grid.spacing() > delta / 10.0 {
        return Err(Error::GridTooCoarse { spacing: grid.spacing(), required: delta / 10.0 });
    }
    let xs: Vec<f64> = grid.nodes().collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
    let mut best = 0.0f64;
    let mut window = Extremes::default();
    let mut hi = 0;
    for i in 0..xs.len() {
        while hi < xs.len() && xs[hi] - xs[i] <= delta {
            window.push(hi, &ys);
            hi += 1;
        }
        window.evict_before(i);
        best = best.max(window.spread(&ys));
        let reach = xs[i] + delta;
        if reach <= grid.x_max() {
            best = best.max((f.eval(reach) - ys[i]).abs());
        }
    }
    let left = grid.x_max() - delta;
    if left >= grid.x_min() {
        best = best.max((f.eval(grid.x_max()) - f.eval(left)).abs());
    }
    Ok(best)
}

/// [`modulus_of_continuity`] on `grid`, refined first if it is too coarse
/// for `delta`. Returns 0 for `delta = 0`.
pub fn modulus_refined(f: &TestFunction, delta: f64, grid: &Grid) -> Result<f64> {
    if delta == 0.0 {
        return Ok(0.0);
    }
    if grid.spacing() <= delta / 10.0 {
        modulus_of_continuity(f, delta, grid)
    } else {
        let fine = Grid::for_delta(grid.x_min(), grid.x_max(), delta, grid.points())?;
        modulus_of_continuity(f, delta, &fine)
    }
}

/// `|f(t) - f(x)| <= ω(f; δ)(1 + |t - x| / δ)` within the guard band.
pub fn check_pointwise_inequality(f: &TestFunction, t: f64, x: f64, delta: f64, grid: &Grid) -> Result<bool> {
    let omega = modulus_refined(f, delta, grid)?;
    let lhs = (f.eval(t) - f.eval(x)).abs();
    Ok(lhs <= omega * (1.0 + (t - x).abs() / delta) + GUARD_BAND)
}

fn require_preserving(op: &StancuBeta) -> Result<()> {
    if op.kind().family() == Family::CaiPreserving {
        Ok(())
    } else {
        Err(invalid(format!(
            "rate bounds are stated for the x²-preserving operators, got {}",
            op.kind().family().label()
        )))
    }
}

/// `δ_n(x)`, clamped at zero when rounding leaves it marginally negative.
fn second_central(op: &StancuBeta, x: f64) -> Result<f64> {
    let delta = op.central_moments(x)?.delta;
    if delta >= 0.0 {
        Ok(delta)
    } else if delta > -1e-13 * (1.0 + x * x) {
        Ok(0.0)
    } else {
        Err(Error::Contract(format!("second central moment is negative at x={x}: {delta}")))
    }
}

/// `|𝔏(f; x) - f(x)| <= 2 ω(f; √δ_n(x))`, with `ω` taken over `grid`.
pub fn rate_bound_theorem5(f: &TestFunction, op: &StancuBeta, x: f64, grid: &Grid) -> Result<BoundReport> {
    require_preserving(op)?;
    let prepared = op.prepare(x)?;
    theorem5_prepared(f, &prepared, second_central(op, x)?, x, grid)
}

fn theorem5_prepared(f: &TestFunction, prepared: &Prepared, delta_n: f64, x: f64, grid: &Grid) -> Result<BoundReport> {
    let lhs = (prepared.apply_fn(f)? - f.eval(x)).abs();
    let rhs = 2.0 * modulus_refined(f, delta_n.sqrt(), grid)?;
    Ok(BoundReport::new(x, lhs, rhs))
}

/// `2ω(f; √δ)` bound reports for every function at every grid node, sharing one
/// operator preparation per node.
pub fn theorem5_sweep(fs: &[TestFunction], op: &StancuBeta, grid: &Grid) -> Result<Vec<Vec<BoundReport>>> {
    require_preserving(op)?;
    let mut out = vec![Vec::with_capacity(grid.points()); fs.len()];
    for x in grid.nodes() {
        let prepared = op.prepare(x)?;
        let delta_n = second_central(op, x)?;
        for (f, rows) in fs.iter().zip(out.iter_mut()) {
            rows.push(theorem5_prepared(f, &prepared, delta_n, x, grid)?);
        }
    }
    Ok(out)
}

/// `f_α(x) = sup_{t ≠ x} |f(t) - f(x)| / |t - x|^α` over grid nodes.
pub fn lipschitz_maximal(f: &TestFunction, x: f64, alpha: f64, grid: &Grid) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let fx = f.eval(x);
    Ok(grid.nodes().filter(|&t| t != x).map(|t| (f.eval(t) - fx).abs() / (t - x).abs().powf(alpha)).fold(0.0, f64::max))
}

/// `d(x, E) = min_{y ∈ E} |x - y|`.
pub fn distance_to_set(x: f64, set: &[f64]) -> Result<f64> {
    if set.is_empty() {
        return Err(invalid("reference set E must be non-empty"));
    }
    Ok(set.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
}

/// `|𝔏(f; x) - f(x)| <= M(δ_n(x)^{α/2} + d(x, E))`.
pub fn rate_bound_theorem6(f: &TestFunction, lip: &LipschitzClass, op: &StancuBeta, x: f64) -> Result<BoundReport> {
    require_preserving(op)?;
    let prepared = op.prepare(x)?;
    theorem6_prepared(f, lip, &prepared, second_central(op, x)?, x)
}

fn theorem6_prepared(
    f: &TestFunction,
    lip: &LipschitzClass,
    prepared: &Prepared,
    delta_n: f64,
    x: f64,
) -> Result<BoundReport> {
    let lhs = (prepared.apply_fn(f)? - f.eval(x)).abs();
    let rhs = lip.m * (delta_n.powf(lip.alpha / 2.0) + distance_to_set(x, &lip.set)?);
    Ok(BoundReport::new(x, lhs, rhs))
}

/// Hölder-class bound reports for one function at every grid node.
pub fn theorem6_sweep(
    f: &TestFunction,
    lip: &LipschitzClass,
    op: &StancuBeta,
    grid: &Grid,
) -> Result<Vec<BoundReport>> {
    require_preserving(op)?;
    grid.nodes().map(|x| theorem6_prepared(f, lip, &op.prepare(x)?, second_central(op, x)?, x)).collect()
}

/// Lattice estimate of the class constant when none is declared:
/// `max_{y ∈ E} sup_t |f(t) - f(y)| / |t - y|^α`.
pub fn estimate_class_constant(f: &TestFunction, alpha: f64, set: &[f64], grid: &Grid) -> Result<f64> {
    validate_set(set)?;
    set.iter().try_fold(0.0f64, |acc, &y| Ok(acc.max(lipschitz_maximal(f, y, alpha, grid)?)))
}

/// `‖f‖_{ρ₀} = sup |f(x)| / (1 + x²)` over the grid.
pub fn weighted_norm(f: &TestFunction, grid: &Grid) -> f64 {
    grid.nodes().map(|x| f.eval(x).abs() * Norm::Weighted.weight(x)).fold(0.0, f64::max)
}

fn preserving_slope(n: u32, ctx: &QContext) -> f64 {
    let bn = ctx.bracket(n as f64);
    ((ctx.q() * bn - ctx.q()) / bn).sqrt()
}

/// `(1 - √((q[n]_q - q)/[n]_q)) ν + 1/(2[n]_q)`, the bound on
/// `sup_{[0,ν]} |𝔏(t; x) - x|`.
pub fn theorem4_display_bound(n: u32, ctx: &QContext, nu: f64) -> f64 {
    (1.0 - preserving_slope(n, ctx)) * nu + 0.5 / ctx.bracket(n as f64)
}

/// `(1 - √((q[n]_q - q)/[n]_q)) + 1/(2[n]_q)`, the bound on the weighted
/// error of `𝔏(t; ·)`.
pub fn weighted_display_bound(n: u32, ctx: &QContext) -> f64 {
    theorem4_display_bound(n, ctx, 1.0)
}

/// Both sides of the q-integral Cauchy–Schwarz inequality on `[a, b]`:
/// `∫|t-x| d_q t` and `(∫|t-x|² d_q t)^{1/2} (∫ d_q t)^{1/2}`.
pub fn q_cauchy_schwarz_sides(a: f64, b: f64, x: f64, ctx: &QContext) -> Result<BoundReport> {
    let lhs = crate::qcalc::q_jackson_integral(|t| (t - x).abs(), a, b, ctx)?;
    let second = crate::qcalc::q_jackson_integral(|t| (t - x) * (t - x), a, b, ctx)?;
    let length = crate::qcalc::q_jackson_integral(|_| 1.0, a, b, ctx)?;
    // A signed lattice measure can make either factor negative; keep the sign
    // visible instead of taking the root of a negative number.
    let rhs = second.signum() * second.abs().sqrt() * length.signum() * length.abs().sqrt();
    Ok(BoundReport::new(x, lhs, rhs))
}

/// Norm of `L(f) - f` over the grid for each of `1, t, t²`.
///
/// For the x²-preserving family the `t` row carries the proof bound and
/// the `1`, `t²` rows are checked against zero at the moment tolerance;
/// other families report errors only.
pub fn korovkin_error_profile(op: &StancuBeta, grid: &Grid, norm: Norm, moment_tol: f64) -> Result<ConvergenceReport> {
    let fs = crate::function::corpus::korovkin();
    let mut worst = [0.0f64; 3];
    for x in grid.nodes() {
        let prepared = op.prepare(x)?;
        for (w, f) in worst.iter_mut().zip(&fs) {
            let err = (prepared.apply_fn(f)? - f.eval(x)).abs() * norm.weight(x);
            *w = w.max(err);
        }
    }
    let n = op.kind().n();
    let ctx = op.context();
    let q = ctx.q();
    let mut report = ConvergenceReport::default();
    for (k, (f, err)) in fs.iter().zip(worst).enumerate() {
        let row = if op.kind().family() != Family::CaiPreserving {
            ReportRow::informational(n, q, f.name(), norm.label(), f64::NAN, err)
        } else if k == 1 {
            let bound = match norm {
                Norm::Sup => theorem4_display_bound(n, ctx, grid.x_max()),
                Norm::Weighted => weighted_display_bound(n, ctx),
            };
            ReportRow::check(n, q, f.name(), norm.label(), f64::NAN, err, bound)
        } else {
            ReportRow::check(n, q, f.name(), norm.label(), f64::NAN, err, moment_tol)
        };
        report.push(row);
    }
    Ok(report)
}
