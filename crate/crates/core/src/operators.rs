//! Stancu-Beta operators of the second kind and their q-analogues.
//!
//! Every q-family is assembled the same way: a Beta-type kernel
//! `u^T / (1+u)_q^{T+S}` sampled on the Koornwinder lattice `u_k = q^k / A`,
//! normalised to unit mass, and pushed forward by `u ↦ λu`. The families
//! differ only in `(T, S, λ)` and in an outer factor (`q` for the modified
//! operators). At `q = 1` the lattice becomes the continuous Beta-prime
//! density and the operators are evaluated by quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qcalc::{self, q_bracket_inverse, QContext};
use crate::quadrature;

/// Relative log-weight below the running peak at which lattice terms are
/// dropped (`e^{-40} ≈ 4e-18`).
const LOG_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `L_n`, integral operator with the Euler Beta kernel.
    Classical,
    /// `L_n^q`, the q-analogue.
    QStancuBeta,
    /// `L_n^*(f; q, x) = q L_n^q(f; x)`.
    ModifiedQ,
    /// `𝔏_{n,q}`, the q-analogue evaluated at `v_n(x)`; preserves `t²`.
    CaiPreserving,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Classical, Family::QStancuBeta, Family::ModifiedQ, Family::CaiPreserving];

    pub fn label(self) -> &'static str {
        match self {
            Family::Classical => "classical",
            Family::QStancuBeta => "qsb",
            Family::ModifiedQ => "modified",
            Family::CaiPreserving => "cai",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Family::Classical),
            "qsb" => Ok(Family::QStancuBeta),
            "modified" => Ok(Family::ModifiedQ),
            "cai" => Ok(Family::CaiPreserving),
            other => Err(invalid(format!("unknown operator `{other}`"))),
        }
    }
}

/// Operator family and index `n >= 2`. The deformation `q` lives in the
/// [`QContext`] the operator is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorKind {
    family: Family,
    n: u32,
}

impl OperatorKind {
    pub fn new(family: Family, n: u32) -> Result<Self> {
        // The second moment divides by [n]_q - 1, which vanishes at n = 1.
        if n < 2 {
            return Err(invalid(format!("operator index n must be >= 2, got {n}")));
        }
        Ok(Self { family, n })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// How the real kernel exponents are chosen for the q-families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum KernelForm {
    /// `S = n + 1`, `[T]_q = q[n]_q y / (1 + (1 - q²)[n]_q y)` and
    /// `λ = q^{T-1}(1 + (1 - q²)[n]_q y)`: the exponents for which the
    /// q-Beta moment recursions give mean `y` and second moment
    /// `([n]_q y + 1) y / (q([n]_q - 1))`.
    #[default]
    MomentConsistent,
    /// Exponents copied verbatim: `T = [n]_q y`, `S = [n]_q + 1`,
    /// `λ = q^{[n]_q y}`. Its mean is `[[n]_q y]_q / [[n]_q]_q`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTriple {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

impl MomentTriple {
    pub fn get(&self, degree: usize) -> f64 {
        match degree {
            0 => self.m0,
            1 => self.m1,
            2 => self.m2,
            _ => panic!("moment triple holds degrees 0..=2"),
        }
    }
}

/// First and second central moments `L(t - x; x)` and `L((t - x)²; x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralMoments {
    pub alpha: f64,
    pub delta: f64,
}

/// Kernel parameters of one q-operator evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub t: f64,
    pub s: f64,
    pub scale: f64,
}

/// `v_n(x) = sqrt((q[n]_q - q)/[n]_q x² + 1/(4[n]_q²)) - 1/(2[n]_q)`.
pub fn v_n(x: f64, n: u32, ctx: &QContext) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid(format!("v_n needs x >= 0, got {x}")));
    }
    if n < 2 {
        return Err(invalid(format!("v_n needs n >= 2, got {n}")));
    }
    let bn = ctx.bracket(n as f64);
    let c = (ctx.q() * bn - ctx.q()) / bn;
    let h = 0.5 / bn;
    // Rationalised to avoid cancellation for small x.
    let cx2 = c * x * x;
    Ok(cx2 / ((cx2 + h * h).sqrt() + h))
}

/// `δ_n(x) = 2x² - 2x sqrt((q[n]_q - q)/[n]_q x² + 1/(4[n]_q²)) + x/[n]_q`,
/// written out term by term.
pub fn delta_n_explicit(x: f64, n: u32, ctx: &QContext) -> f64 {
    let bn = ctx.bracket(n as f64);
    let c = (ctx.q() * bn - ctx.q()) / bn;
    2.0 * x * x - 2.0 * x * (c * x * x + 1.0 / (4.0 * bn * bn)).sqrt() + x / bn
}

/// Closed-form moments of `kind` at `x`.
pub fn moments(kind: OperatorKind, x: f64, ctx: &QContext) -> Result<MomentTriple> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid(format!("moments need x >= 0, got {x}")));
    }
    let q = ctx.q();
    let n = kind.n;
    let bn = ctx.bracket(n as f64);
    Ok(match kind.family {
        Family::Classical => {
            let nf = n as f64;
            MomentTriple { m0: 1.0, m1: x, m2: (nf * x + 1.0) * x / (nf - 1.0) }
        }
        Family::QStancuBeta => MomentTriple { m0: 1.0, m1: x, m2: (bn * x + 1.0) * x / (q * (bn - 1.0)) },
        Family::ModifiedQ => MomentTriple { m0: q, m1: q * x, m2: (bn * x + 1.0) * x / (bn - 1.0) },
        Family::CaiPreserving => MomentTriple { m0: 1.0, m1: v_n(x, n, ctx)?, m2: x * x },
    })
}

/// Central moments from the closed-form moments:
/// `α = m1 - x m0`, `δ = m2 - 2x m1 + x² m0`.
pub fn central_moments(kind: OperatorKind, x: f64, ctx: &QContext) -> Result<CentralMoments> {
    let m = moments(kind, x, ctx)?;
    Ok(CentralMoments { alpha: m.m1 - x * m.m0, delta: m.m2 - 2.0 * x * m.m1 + x * x * m.m0 })
}

/// Kernel parameters `(T, S, λ)` for evaluation point `y > 0`.
pub fn kernel_params(form: KernelForm, n: u32, y: f64, ctx: &QContext) -> Result<KernelParams> {
    let q = ctx.q();
    let bn = ctx.bracket(n as f64);
    match form {
        KernelForm::Literal => {
            let t = bn * y;
            Ok(KernelParams { t, s: bn + 1.0, scale: ctx.pow(t) })
        }
        KernelForm::MomentConsistent => {
            let stretch = 1.0 + (1.0 - q * q) * bn * y;
            let t = q_bracket_inverse(q * bn * y / stretch, ctx)?;
            Ok(KernelParams { t, s: n as f64 + 1.0, scale: ctx.pow(t - 1.0) * stretch })
        }
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Cap on explicitly summed tail corrections.
const MAX_TAIL_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, Copy)]
struct LatticeTail {
    /// Weight of the last retained node towards `u → 0`.
    weight: f64,
    last_node: f64,
    q: f64,
    /// `q^T`, the weight ratio between neighbouring tail nodes.
    ratio: f64,
}

impl LatticeTail {
    fn mass(&self) -> f64 {
        self.weight * self.ratio / (1.0 - self.ratio)
    }

    /// Remaining lattice sum `Σ_{j>=1} w r^j f(u q^j)` with the kernel taken
    /// as `u^T` times a constant, split as `f(0) Σ w r^j` plus the
    /// corrections `w r^j (f(u q^j) - f(0))`, which are summed until their
    /// bound drops below `cutoff`.
    fn integral<F: Fn(f64) -> f64>(&self, f: &F, cutoff: f64) -> f64 {
        let f0 = f(0.0);
        let mut correction = 0.0;
        let mut w = self.weight;
        let mut node = self.last_node;
        for _ in 0..MAX_TAIL_TERMS {
            w *= self.ratio;
            node *= self.q;
            let d = f(node) - f0;
            correction += w * d;
            if node == 0.0 || d.abs() * w / (1.0 - self.ratio) <= cutoff {
                break;
            }
        }
        f0 * self.mass() + correction
    }
}

/// A unit-mass discrete measure on the scaled Koornwinder lattice.
#[derive(Debug, Clone)]
pub struct LatticeMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    tail: Option<LatticeTail>,
    mass: f64,
}

impl LatticeMeasure {
    /// Samples `u^T / (1+u)_q^{T+S}` (the `d_q u` factor included) on
    /// `u_k = q^k / A`, walking outwards from the kernel peak until terms
    /// fall `e^{-40}` below it. Towards `u → 0` the walk may stop earlier,
    /// once `(1+u)_q^{T+S}` is constant to working precision; the rest is
    /// summed as a geometric series plus explicit corrections.
    pub fn build(params: KernelParams, lattice_scale: f64, ctx: &QContext) -> Result<Self> {
        let KernelParams { t, s, scale } = params;
        if !(t > 0.0 && s > 0.0 && scale > 0.0) {
            return Err(invalid(format!("degenerate kernel parameters T={t}, S={s}, λ={scale}")));
        }
        if ctx.is_classical() {
            return Err(invalid("lattice measures need q < 1"));
        }
        let q = ctx.q();
        let ln_q = ctx.ln_q();
        let ln_a = lattice_scale.ln();
        let ln_qa = (t + s) * ln_q;
        let ln_u = |k: i64| k as f64 * ln_q - ln_a;
        // log of (1+u_k)/(1+q^{T+S} u_k), the ratio of consecutive lnR.
        let step = |lu: f64| softplus(lu) - softplus(ln_qa + lu);
        let ln_scale = scale.ln();

        let k0 = ((t / s).ln() + ln_a) / ln_q;
        let k0 = if k0.is_finite() { k0.round() as i64 } else { 0 };

        // Large-u side decays like u^{-S}; test functions grow at most like t².
        let up_ratio = ln_q * (s - 2.0).max(0.25);
        let up_margin = (-up_ratio.exp_m1()).ln();
        let down_margin = (-(t * ln_q).exp_m1()).ln();
        let tiny_u = (1e-12 * (1.0 - q)).ln();

        let mut entries: Vec<(f64, f64)> = Vec::new();
        let mut max_lw = f64::NEG_INFINITY;

        // towards u → ∞
        let mut ln_r = 0.0;
        let mut k = k0;
        let mut prev_lw = f64::INFINITY;
        loop {
            let lu = ln_u(k);
            let lw = t * lu - ln_r;
            max_lw = max_lw.max(lw);
            entries.push((lu, lw));
            let growth = 2.0 * softplus(ln_scale + lu);
            if lw < prev_lw && lw + growth < max_lw - LOG_CUTOFF + up_margin {
                break;
            }
            prev_lw = lw;
            if entries.len() > ctx.max_terms() {
                return Err(Error::NonConvergence { terms: entries.len(), last: lw - max_lw });
            }
            k -= 1;
            ln_r += step(ln_u(k));
        }
        entries.reverse();

        // towards u → 0
        let mut ln_r = 0.0;
        let mut k = k0;
        let mut prev_lw = t * ln_u(k0);
        let mut geometric_tail = false;
        loop {
            ln_r -= step(ln_u(k));
            k += 1;
            let lu = ln_u(k);
            let lw = t * lu - ln_r;
            max_lw = max_lw.max(lw);
            entries.push((lu, lw));
            if lw < prev_lw {
                if lw < max_lw - LOG_CUTOFF + down_margin {
                    break;
                }
                if lu < tiny_u {
                    geometric_tail = true;
                    break;
                }
            }
            prev_lw = lw;
            if entries.len() > ctx.max_terms() {
                return Err(Error::NonConvergence { terms: entries.len(), last: lw - max_lw });
            }
        }

        let nodes: Vec<f64> = entries.iter().map(|&(lu, _)| (ln_scale + lu).exp()).collect();
        let weights: Vec<f64> = entries.iter().map(|&(_, lw)| (lw - max_lw).exp()).collect();
        let tail = if geometric_tail {
            let len = nodes.len();
            Some(LatticeTail { weight: weights[len - 1], last_node: nodes[len - 1], q, ratio: (t * ln_q).exp() })
        } else {
            None
        };
        let mass = weights.iter().sum::<f64>() + tail.map_or(0.0, |tl| tl.mass());
        Ok(Self { nodes, weights, tail, mass })
    }

    /// `∫ f dμ` with μ normalised to unit mass.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let body: f64 = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum();
        let tail = self.tail.map_or(0.0, |tl| tl.integral(&f, 1e-18 * self.mass));
        (body + tail) / self.mass
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

fn classical_breakpoints_t(kinks: &[f64]) -> Vec<f64> {
    kinks.iter().copied().filter(|&k| k > 0.0 && k.is_finite()).collect()
}

/// `(1/B(nx, n+1)) ∫_0^∞ t^{nx-1} (1+t)^{-(nx+n+1)} f(t) dt`, evaluated on
/// `u = t/(1+t) ∈ (0, 1)` where the kernel becomes the Beta(nx, n+1)
/// density. For `nx < 1` the endpoint singularity is removed by `w = u^{nx}`.
pub fn classical_stancu_beta<F>(f: F, n: u32, x: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    classical_with_kinks(&f, n, x, &[])
}

pub(crate) fn classical_with_kinks<F>(f: &F, n: u32, x: f64, kinks: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid(format!("classical operator needs x >= 0, got {x}")));
    }
    if n < 1 {
        return Err(invalid("classical operator needs n >= 1"));
    }
    if x == 0.0 {
        return Ok(f(0.0));
    }
    use statrs::function::gamma::ln_gamma;
    let a = n as f64 * x;
    let b = n as f64 + 1.0;
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let to_t = |u: f64| u / (1.0 - u);
    let u_kinks: Vec<f64> = classical_breakpoints_t(kinks).iter().map(|&k| k / (1.0 + k)).collect();
    let (abs_tol, rel_tol) = (1e-15, 1e-13);
    if a >= 1.0 {
        let g = |u: f64| {
            let dens = ((a - 1.0) * u.ln() + (b - 1.0) * (-u).ln_1p() - ln_beta).exp();
            dens * f(to_t(u))
        };
        Ok(quadrature::integrate(&g, 0.0, 1.0, &u_kinks, abs_tol, rel_tol)?.value)
    } else {
        // u = w^{1/a}: u^{a-1} du = dw / a
        let inv = 1.0 / a;
        let g = |w: f64| {
            let u = w.powf(inv);
            ((b - 1.0) * (-u).ln_1p() - ln_beta - a.ln()).exp() * f(to_t(u))
        };
        let w_kinks: Vec<f64> = u_kinks.iter().map(|&u| u.powf(a)).collect();
        Ok(quadrature::integrate(&g, 0.0, 1.0, &w_kinks, abs_tol, rel_tol)?.value)
    }
}

/// The `q = 1` limit of the lattice construction: the kernel
/// `t^{T} (1+t)^{-(T+S)}` against `ds` with `t = e^s`, normalised
/// numerically rather than through the Beta function.
fn continuous_limit<F>(f: &F, t_exp: f64, s_exp: f64, kinks: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let log_kernel = |s: f64| t_exp * s - (t_exp + s_exp) * softplus(s);
    let peak = (t_exp / s_exp).ln();
    let top = log_kernel(peak);
    // Expand until the kernel, weighted by the t² growth allowed for f,
    // is e^{-46} below its peak.
    let floor = top - LOG_CUTOFF - 6.0;
    let mut step = 1.0;
    while log_kernel(peak - step) > floor {
        step *= 2.0;
    }
    let lo = peak - step;
    let mut step = 1.0;
    while log_kernel(peak + step) + 2.0 * (peak + step) > floor {
        step *= 2.0;
        if step > 1e6 {
            return Err(Error::NonConvergence { terms: 0, last: log_kernel(peak + step) - top });
        }
    }
    let hi = peak + step;
    let s_kinks: Vec<f64> = classical_breakpoints_t(kinks).iter().map(|k| k.ln()).collect();
    let kernel = |s: f64| (log_kernel(s) - top).exp();
    let mass = quadrature::integrate(&kernel, lo, hi, &s_kinks, 1e-16, 1e-14)?.value;
    let integrand = |s: f64| kernel(s) * f(s.exp());
    let value = quadrature::integrate(&integrand, lo, hi, &s_kinks, 1e-16 * mass, 1e-13)?.value;
    Ok(value / mass)
}

/// A Stancu-Beta operator bound to its `n`, `q` and truncation controls.
#[derive(Debug, Clone, Copy)]
pub struct StancuBeta {
    kind: OperatorKind,
    ctx: QContext,
    form: KernelForm,
    lattice_scale: f64,
}

/// An operator frozen at one evaluation point, ready to be applied to many
/// functions.
#[derive(Debug, Clone)]
pub enum Prepared {
    /// The kernel collapsed onto `t = 0` (evaluation point 0).
    PointMass {
        factor: f64,
    },
    Lattice {
        measure: LatticeMeasure,
        factor: f64,
    },
    /// Classical Beta kernel evaluated by quadrature with `1/B` normalisation.
    Classical {
        n: u32,
        x: f64,
    },
    /// `q = 1` limit of a q-family, normalised numerically.
    ContinuousLimit {
        t: f64,
        s: f64,
        factor: f64,
    },
}

impl Prepared {
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.apply_with_kinks(f, &[])
    }

    /// As [`Prepared::apply`], with points where `f` has a kink so the
    /// quadrature branches can split there.
    pub fn apply_with_kinks<F: Fn(f64) -> f64>(&self, f: F, kinks: &[f64]) -> Result<f64> {
        match self {
            Prepared::PointMass { factor } => Ok(factor * f(0.0)),
            Prepared::Lattice { measure, factor } => Ok(factor * measure.expect(f)),
            Prepared::Classical { n, x } => classical_with_kinks(&f, *n, *x, kinks),
            Prepared::ContinuousLimit { t, s, factor } => Ok(factor * continuous_limit(&f, *t, *s, kinks)?),
        }
    }

    pub fn apply_fn(&self, f: &crate::function::TestFunction) -> Result<f64> {
        self.apply_with_kinks(|t| f.eval(t), f.kinks())
    }
}

impl StancuBeta {
    pub fn new(kind: OperatorKind, ctx: QContext) -> Self {
        Self { kind, ctx, form: KernelForm::default(), lattice_scale: 1.0 }
    }

    pub fn with_kernel_form(mut self, form: KernelForm) -> Self {
        self.form = form;
        self
    }

    /// Sets the lattice scale `A` of the q-improper integral.
    pub fn with_lattice_scale(mut self, a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid(format!("lattice scale A must be positive, got {a}")));
        }
        self.lattice_scale = a;
        Ok(self)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn context(&self) -> &QContext {
        &self.ctx
    }

    pub fn kernel_form(&self) -> KernelForm {
        self.form
    }

    pub fn lattice_scale(&self) -> f64 {
        self.lattice_scale
    }

    /// Point at which the underlying q-Stancu-Beta kernel is centred:
    /// `v_n(x)` for the x²-preserving family, `x` otherwise.
    pub fn kernel_point(&self, x: f64) -> Result<f64> {
        match self.kind.family {
            Family::CaiPreserving => v_n(x, self.kind.n, &self.ctx),
            _ => Ok(x),
        }
    }

    pub fn prepare(&self, x: f64) -> Result<Prepared> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(invalid(format!("evaluation point must be >= 0, got {x}")));
        }
        let n = self.kind.n;
        if self.kind.family == Family::Classical {
            return Ok(if x == 0.0 { Prepared::PointMass { factor: 1.0 } } else { Prepared::Classical { n, x } });
        }
        let factor = if self.kind.family == Family::ModifiedQ { self.ctx.q() } else { 1.0 };
        let y = self.kernel_point(x)?;
        if y == 0.0 {
            return Ok(Prepared::PointMass { factor });
        }
        let params = kernel_params(self.form, n, y, &self.ctx)?;
        if self.ctx.is_classical() {
            return Ok(Prepared::ContinuousLimit { t: params.t, s: params.s, factor });
        }
        let measure = LatticeMeasure::build(params, self.lattice_scale, &self.ctx)?;
        Ok(Prepared::Lattice { measure, factor })
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> Result<f64> {
        self.prepare(x)?.apply(f)
    }

    pub fn apply_fn(&self, f: &crate::function::TestFunction, x: f64) -> Result<f64> {
        self.prepare(x)?.apply_fn(f)
    }

    /// Numerically assembled `(L1, Lt, Lt²)`.
    pub fn integrated_moments(&self, x: f64) -> Result<MomentTriple> {
        let p = self.prepare(x)?;
        Ok(MomentTriple { m0: p.apply(|_| 1.0)?, m1: p.apply(|t| t)?, m2: p.apply(|t| t * t)? })
    }

    pub fn moments(&self, x: f64) -> Result<MomentTriple> {
        moments(self.kind, x, &self.ctx)
    }

    pub fn central_moments(&self, x: f64) -> Result<CentralMoments> {
        central_moments(self.kind, x, &self.ctx)
    }
}

/// `L_n^q(f; x)`. At `q = 1` this is the classical operator, evaluated
/// through the continuous limit of the lattice kernel.
pub fn q_stancu_beta<F: Fn(f64) -> f64>(f: F, n: u32, x: f64, ctx: &QContext) -> Result<f64> {
    StancuBeta::new(OperatorKind::new(Family::QStancuBeta, n)?, *ctx).apply(f, x)
}

/// `L_n^*(f; q, x)`; at `q = 1` this is the classical operator.
pub fn modified_q_stancu_beta<F: Fn(f64) -> f64>(f: F, n: u32, x: f64, ctx: &QContext) -> Result<f64> {
    StancuBeta::new(OperatorKind::new(Family::ModifiedQ, n)?, *ctx).apply(f, x)
}

/// `𝔏_{n,q}(f; x)`.
pub fn cai_operator<F: Fn(f64) -> f64>(f: F, n: u32, x: f64, ctx: &QContext) -> Result<f64> {
    StancuBeta::new(OperatorKind::new(Family::CaiPreserving, n)?, *ctx).apply(f, x)
}

/// Reciprocal of the q-improper integral of `kernel`, i.e. the constant
/// that turns it into a unit-mass lattice measure.
pub fn normalize_to_unit<F: Fn(f64) -> f64>(kernel: F, a: f64, ctx: &QContext) -> Result<f64> {
    let integral = qcalc::q_improper_integral(kernel, a, ctx)?;
    if !(integral > 0.0) {
        return Err(Error::Contract(format!("kernel integral must be positive, got {integral}")));
    }
    Ok(1.0 / integral)
}
