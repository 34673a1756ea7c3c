//! q-calculus substrate.
//!
//! Everything here is a pure function of its inputs and a [`QContext`].
//! The classical case `q = 1` is handled by explicit branches (ordinary
//! powers, `Γ`, Riemann quadrature) rather than by taking limits.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature;

/// The deformation parameter `q` together with the truncation controls
/// used by every infinite product, series and bilateral sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    q: f64,
    series_tol: f64,
    max_terms: usize,
    bilateral_range: u32,
}

impl QContext {
    pub const DEFAULT_SERIES_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_TERMS: usize = 100_000;
    pub const DEFAULT_BILATERAL_RANGE: u32 = 300;

    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 0.0 {
            return Err(invalid(format!("q must lie in (0, 1], got {q}")));
        }
        if q > 1.0 {
            return Err(Error::UnsupportedQ(q));
        }
        Ok(Self {
            q,
            series_tol: Self::DEFAULT_SERIES_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
            bilateral_range: Self::DEFAULT_BILATERAL_RANGE,
        })
    }

    /// The undeformed context, `q = 1`.
    pub fn classical() -> Self {
        Self::new(1.0).expect("q = 1 is valid")
    }

    pub fn with_series_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(invalid(format!("series_tol must be positive, got {tol}")));
        }
        self.series_tol = tol;
        Ok(self)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(invalid("max_terms must be at least 1"));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    pub fn with_bilateral_range(mut self, range: u32) -> Result<Self> {
        if range == 0 {
            return Err(invalid("bilateral_range must be at least 1"));
        }
        self.bilateral_range = range;
        Ok(self)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn bilateral_range(&self) -> u32 {
        self.bilateral_range
    }

    pub fn is_classical(&self) -> bool {
        self.q == 1.0
    }

    /// `ln q`, accurate for `q` close to 1.
    pub(crate) fn ln_q(&self) -> f64 {
        (self.q - 1.0).ln_1p()
    }

    /// `[t]_q` for any real `t`, without argument checks.
    pub(crate) fn bracket(&self, t: f64) -> f64 {
        if self.is_classical() {
            t
        } else {
            -(t * self.ln_q()).exp_m1() / (1.0 - self.q)
        }
    }

    /// `q^t` for real `t`.
    pub(crate) fn pow(&self, t: f64) -> f64 {
        (t * self.ln_q()).exp()
    }
}

/// A q-deformed real quantity such as `[k]_q` or `Γ_q(t)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct QReal(f64);

impl QReal {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<QReal> for f64 {
    fn from(v: QReal) -> f64 {
        v.0
    }
}

impl std::fmt::Display for QReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// `[k]_q = (1 - q^k)/(1 - q)`, and `k` at `q = 1`.
pub fn q_integer(k: u64, ctx: &QContext) -> QReal {
    QReal(ctx.bracket(k as f64))
}

/// The q-bracket extended to real `t >= 0` by the same formula.
pub fn q_real_bracket(t: f64, ctx: &QContext) -> Result<QReal> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("q-bracket needs t >= 0, got {t}")));
    }
    Ok(QReal(ctx.bracket(t)))
}

/// Inverse of the q-bracket: the real `t` with `[t]_q = value`.
///
/// Only values below `1/(1-q)` have a preimage when `q < 1`.
pub fn q_bracket_inverse(value: f64, ctx: &QContext) -> Result<f64> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(invalid(format!("bracket value must be >= 0, got {value}")));
    }
    if ctx.is_classical() {
        return Ok(value);
    }
    let scaled = (1.0 - ctx.q) * value;
    if scaled >= 1.0 {
        return Err(invalid(format!(
            "[t]_q = {value} has no real solution for q = {} (supremum is {})",
            ctx.q,
            1.0 / (1.0 - ctx.q)
        )));
    }
    Ok((-scaled).ln_1p() / ctx.ln_q())
}

/// `[k]_q! = [k]_q [k-1]_q ... [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(k: u64, ctx: &QContext) -> QReal {
    QReal((1..=k).map(|j| ctx.bracket(j as f64)).product())
}

/// Gaussian binomial coefficient.
pub fn q_binomial(n: u64, k: u64, ctx: &QContext) -> Result<QReal> {
    if k > n {
        return Err(invalid(format!("q-binomial needs k <= n, got n={n}, k={k}")));
    }
    // Evaluate through the smaller of k, n-k so both orientations run the
    // same arithmetic.
    let m = k.min(n - k);
    let mut acc = 1.0;
    for i in 1..=m {
        acc *= ctx.bracket((n - m + i) as f64) / ctx.bracket(i as f64);
    }
    Ok(QReal(acc))
}

/// `ln((1+u)_q^t)` through `Π_{j>=0} (1 + q^j u)/(1 + q^{t+j} u)`.
///
/// Accepts any real `t`; callers enforce the sign restrictions of their own
/// contracts.
pub(crate) fn ln_q_pochhammer(u: f64, t: f64, ctx: &QContext) -> Result<f64> {
    if u == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    if ctx.is_classical() {
        return Ok(t * u.ln_1p());
    }
    let q = ctx.q;
    let qt = ctx.pow(t);
    let tail_factor = q / (1.0 - q);
    let target = 0.01 * ctx.series_tol;
    let mut sum = 0.0;
    let mut qj = 1.0;
    for j in 0..ctx.max_terms {
        let term = (qj * u).ln_1p() - (qt * qj * u).ln_1p();
        sum += term;
        if term.abs() * tail_factor <= target {
            return Ok(sum);
        }
        qj *= q;
        if j + 1 == ctx.max_terms {
            return Err(Error::NonConvergence { terms: ctx.max_terms, last: term });
        }
    }
    unreachable!("max_terms >= 1")
}

/// The q-power `(1+u)_q^t` for real `t >= 0`.
pub fn q_pochhammer_real(u: f64, t: f64, ctx: &QContext) -> Result<QReal> {
    if !(u.is_finite() && u >= 0.0) {
        return Err(invalid(format!("q-Pochhammer needs u >= 0, got {u}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid(format!("q-Pochhammer needs t >= 0, got {t}")));
    }
    if ctx.is_classical() {
        return Ok(QReal((1.0 + u).powf(t)));
    }
    Ok(QReal(ln_q_pochhammer(u, t, ctx)?.exp()))
}

/// `ln Γ_q(t)` for `t > 0`.
pub fn ln_q_gamma(t: f64, ctx: &QContext) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("q-Gamma needs t > 0, got {t}")));
    }
    if ctx.is_classical() {
        return Ok(statrs::function::gamma::ln_gamma(t));
    }
    let q = ctx.q;
    let qt = ctx.pow(t);
    let tail_factor = q / (1.0 - q);
    let target = 0.01 * ctx.series_tol;
    let mut sum = (1.0 - t) * (-(q - 1.0)).ln();
    let mut qj = 1.0;
    for j in 0..ctx.max_terms {
        let term = (-(qj * q)).ln_1p() - (-(qj * qt)).ln_1p();
        sum += term;
        if term.abs() * tail_factor <= target && j > 0 {
            return Ok(sum);
        }
        qj *= q;
    }
    Err(Error::NonConvergence { terms: ctx.max_terms, last: qj })
}

/// `Γ_q(t) = (1-q)^{1-t} Π_{j>=0} (1-q^{j+1})/(1-q^{j+t})`.
pub fn q_gamma(t: f64, ctx: &QContext) -> Result<QReal> {
    if ctx.is_classical() {
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid(format!("q-Gamma needs t > 0, got {t}")));
        }
        return Ok(QReal(statrs::function::gamma::gamma(t)));
    }
    Ok(QReal(ln_q_gamma(t, ctx)?.exp()))
}

/// `B_q(t, s) = Γ_q(t) Γ_q(s) / Γ_q(t + s)`.
pub fn q_beta(t: f64, s: f64, ctx: &QContext) -> Result<QReal> {
    let ln = ln_q_gamma(t, ctx)? + ln_q_gamma(s, ctx)? - ln_q_gamma(t + s, ctx)?;
    Ok(QReal(ln.exp()))
}

/// Koornwinder q-improper integral
/// `∫_0^{∞/A} f d_q x = (1-q) Σ_{k=-N}^{N} f(q^k/A) q^k/A`.
///
/// The window is `N = ctx.bilateral_range()`. The two boundary terms must
/// be below `series_tol` relative to the total absolute mass of the sum.
/// At `q = 1` this is the ordinary integral over `(0, ∞)`.
pub fn q_improper_integral<F>(f: F, a: f64, ctx: &QContext) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && a > 0.0) {
        return Err(invalid(format!("lattice scale A must be positive, got {a}")));
    }
    if ctx.is_classical() {
        return quadrature::integrate_half_line(&f, 1e-13, 1e-12);
    }
    let n = ctx.bilateral_range as i64;
    let ln_q = ctx.ln_q();
    let ln_a = a.ln();
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut first = None;
    let mut last = 0.0;
    for k in -n..=n {
        let u = (k as f64 * ln_q - ln_a).exp();
        if u == 0.0 || !u.is_finite() {
            continue;
        }
        let term = f(u) * u;
        if !term.is_finite() {
            return Err(invalid(format!("integrand is not finite at x = {u}")));
        }
        first.get_or_insert(term);
        last = term;
        sum += term;
        abs_sum += term.abs();
    }
    if abs_sum == 0.0 {
        return Ok(0.0);
    }
    let boundary = first.unwrap_or(0.0).abs().max(last.abs());
    let threshold = ctx.series_tol * abs_sum;
    if boundary > threshold {
        return Err(Error::TailNotNegligible { boundary: boundary / abs_sum, threshold: ctx.series_tol });
    }
    Ok((1.0 - ctx.q) * sum)
}

/// Jackson integral `∫_0^b f d_q t = (1-q) b Σ_{j>=0} f(q^j b) q^j`.
fn jackson_from_zero<F>(f: &F, b: f64, ctx: &QContext) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if b == 0.0 {
        return Ok(0.0);
    }
    let q = ctx.q;
    let mut sum = 0.0;
    let mut qj = 1.0;
    let mut recent = 0.0f64;
    for j in 0..ctx.max_terms {
        let fx = f(qj * b);
        if !fx.is_finite() {
            return Err(invalid(format!("integrand is not finite at t = {}", qj * b)));
        }
        sum += fx * qj;
        // Envelope of |f| over the last few lattice points bounds the tail.
        recent = if j % 8 == 0 { fx.abs() } else { recent.max(fx.abs()) };
        let tail = recent.max(fx.abs()) * qj * q / (1.0 - q);
        if j >= 8 && tail <= 0.01 * ctx.series_tol * sum.abs().max(1.0) {
            return Ok((1.0 - q) * b * sum);
        }
        qj *= q;
    }
    Err(Error::NonConvergence { terms: ctx.max_terms, last: qj })
}

/// Finite-interval q-integral `∫_a^b f d_q t = ∫_0^b - ∫_0^a`.
pub fn q_jackson_integral<F>(f: F, a: f64, b: f64, ctx: &QContext) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("integration limits must be finite"));
    }
    if a < 0.0 {
        return Err(invalid(format!("lower limit must be >= 0, got {a}")));
    }
    if a > b {
        return Err(invalid(format!("need a <= b, got a={a}, b={b}")));
    }
    if a == b {
        return Ok(0.0);
    }
    if ctx.is_classical() {
        return quadrature::integrate(&f, a, b, &[], 1e-14, 1e-13).map(|r| r.value);
    }
    Ok(jackson_from_zero(&f, b, ctx)? - jackson_from_zero(&f, a, ctx)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn context_rejects_out_of_range_q() {
        assert!(QContext::new(0.0).is_err());
        assert!(QContext::new(-0.5).is_err());
        assert_eq!(QContext::new(1.5), Err(Error::UnsupportedQ(1.5)));
        assert!(QContext::new(f64::NAN).is_err());
        assert!(ctx(0.5).with_series_tol(0.0).is_err());
        assert!(ctx(0.5).with_max_terms(0).is_err());
        assert!(ctx(0.5).with_bilateral_range(0).is_err());
    }

    #[test]
    fn q_integer_values() {
        assert_eq!(q_integer(3, &ctx(0.5)).value(), 1.75);
        assert_eq!(q_integer(7, &QContext::classical()).value(), 7.0);
        assert_eq!(q_integer(0, &ctx(0.3)).value(), 0.0);
    }

    #[test]
    fn real_bracket() {
        assert_relative_eq!(q_real_bracket(3.0, &ctx(0.5)).unwrap().value(), 1.75, epsilon = 1e-15);
        assert_eq!(q_real_bracket(0.0, &ctx(0.5)).unwrap().value(), 0.0);
        // (1 - 0.5^2.5)/0.5 = 2 - 2^{-1.5}
        let expected = 2.0 - 2f64.powf(-1.5);
        assert_relative_eq!(q_real_bracket(2.5, &ctx(0.5)).unwrap().value(), expected, epsilon = 1e-15);
        assert!(q_real_bracket(-1.0, &ctx(0.5)).is_err());
    }

    #[test]
    fn bracket_inverse_round_trips() {
        let c = ctx(0.7);
        for &t in &[0.0, 0.3, 1.0, 4.5, 20.0] {
            let b = q_real_bracket(t, &c).unwrap().value();
            assert_relative_eq!(q_bracket_inverse(b, &c).unwrap(), t, epsilon = 1e-10);
        }
        assert!(q_bracket_inverse(1.0 / 0.3, &c).is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(q_factorial(0, &ctx(0.5)).value(), 1.0);
        assert_eq!(q_factorial(3, &QContext::classical()).value(), 6.0);
        assert_relative_eq!(q_factorial(3, &ctx(0.5)).value(), 2.625, epsilon = 1e-15);
    }

    #[test]
    fn binomials() {
        let c = ctx(0.5);
        assert_eq!(q_binomial(9, 0, &c).unwrap().value(), 1.0);
        assert_eq!(q_binomial(4, 2, &QContext::classical()).unwrap().value(), 6.0);
        assert_relative_eq!(q_binomial(2, 1, &c).unwrap().value(), 1.5, epsilon = 1e-15);
        assert!(q_binomial(3, 4, &c).is_err());
    }

    #[test]
    fn binomial_symmetry_is_exact() {
        for &q in &[0.1, 0.5, 0.9, 0.99, 1.0] {
            let c = ctx(q);
            for n in 0..=20 {
                for k in 0..=n {
                    assert_eq!(q_binomial(n, k, &c).unwrap(), q_binomial(n, n - k, &c).unwrap());
                }
            }
        }
    }

    #[test]
    fn pochhammer_trivial_and_integer_cases() {
        let c = ctx(0.5);
        assert_eq!(q_pochhammer_real(2.0, 0.0, &c).unwrap().value(), 1.0);
        assert_eq!(q_pochhammer_real(0.0, 3.3, &c).unwrap().value(), 1.0);
        assert_relative_eq!(q_pochhammer_real(1.0, 2.0, &c).unwrap().value(), 3.0, epsilon = 1e-12);
        // integer exponent against the finite product
        let c = ctx(0.8);
        let finite: f64 = (0..5).map(|j| 1.0 + 0.8f64.powi(j) * 2.5).product();
        assert_relative_eq!(q_pochhammer_real(2.5, 5.0, &c).unwrap().value(), finite, max_relative = 1e-11);
        assert_relative_eq!(
            q_pochhammer_real(2.5, 1.7, &QContext::classical()).unwrap().value(),
            3.5f64.powf(1.7),
            max_relative = 1e-15
        );
    }

    #[test]
    fn pochhammer_reports_non_convergence() {
        let c = ctx(0.999).with_max_terms(10).unwrap();
        assert!(matches!(q_pochhammer_real(1.0, 0.5, &c), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn gamma_normalisation_and_factorials() {
        for &q in &[0.3, 0.5, 0.9, 0.99] {
            let c = ctx(q);
            assert_relative_eq!(q_gamma(1.0, &c).unwrap().value(), 1.0, max_relative = 1e-12);
            assert_relative_eq!(q_gamma(4.0, &c).unwrap().value(), q_factorial(3, &c).value(), max_relative = 1e-11);
        }
        assert!(q_gamma(0.0, &ctx(0.5)).is_err());
        assert!(q_gamma(-1.0, &QContext::classical()).is_err());
    }

    #[test]
    fn gamma_tends_to_classical() {
        let mut last = f64::INFINITY;
        for &q in &[0.9, 0.99, 0.999] {
            let err = (q_gamma(4.0, &ctx(q)).unwrap().value() - 6.0).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn beta_values() {
        let c = QContext::classical();
        assert_relative_eq!(q_beta(1.0, 1.0, &c).unwrap().value(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(q_beta(2.0, 3.0, &c).unwrap().value(), 1.0 / 12.0, max_relative = 1e-13);
        let c = ctx(0.6);
        assert_relative_eq!(
            q_beta(1.3, 2.7, &c).unwrap().value(),
            q_beta(2.7, 1.3, &c).unwrap().value(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn improper_integral_basics() {
        let c = ctx(0.5);
        assert_eq!(q_improper_integral(|_| 0.0, 1.0, &c).unwrap(), 0.0);
        let f = |x: f64| (-x).exp();
        let one = q_improper_integral(f, 1.0, &c).unwrap();
        let three = q_improper_integral(|x| 3.0 * f(x), 1.0, &c).unwrap();
        assert_relative_eq!(three, 3.0 * one, max_relative = 1e-14);
        assert!(matches!(q_improper_integral(|x: f64| 1.0 / (1.0 + x), 1.0, &c), Err(Error::TailNotNegligible { .. })));
        assert!(q_improper_integral(f, 0.0, &c).is_err());
    }

    #[test]
    fn improper_integral_at_q_one_is_riemann() {
        let v = q_improper_integral(|x: f64| (-x).exp(), 1.0, &QContext::classical()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-11);
    }

    #[test]
    fn jackson_integral_closed_forms() {
        let c = ctx(0.6);
        assert_relative_eq!(q_jackson_integral(|_| 1.0, 0.0, 2.5, &c).unwrap(), 2.5, max_relative = 1e-12);
        let b: f64 = 1.7;
        let bracket2 = q_integer(2, &c).value();
        assert_relative_eq!(q_jackson_integral(|t| t, 0.0, b, &c).unwrap(), b * b / bracket2, max_relative = 1e-12);
        assert_eq!(q_jackson_integral(|t: f64| t.sin(), 1.2, 1.2, &c).unwrap(), 0.0);
        assert!(q_jackson_integral(|t| t, 2.0, 1.0, &c).is_err());
        assert!(q_jackson_integral(|t| t, -1.0, 1.0, &c).is_err());
    }

    #[test]
    fn jackson_integral_is_additive() {
        let c = ctx(0.75);
        let f = |t: f64| (t * 1.3).cos() + t * t;
        let whole = q_jackson_integral(f, 0.0, 3.0, &c).unwrap();
        let left = q_jackson_integral(f, 0.0, 1.1, &c).unwrap();
        let right = q_jackson_integral(f, 1.1, 3.0, &c).unwrap();
        assert_relative_eq!(whole, left + right, max_relative = 1e-13);
    }

    #[test]
    fn jackson_tends_to_riemann() {
        let exact = (2.0f64).sin();
        let mut last = f64::INFINITY;
        for &q in &[0.9, 0.99, 0.999] {
            let err = (q_jackson_integral(|t: f64| t.cos(), 0.0, 2.0, &ctx(q)).unwrap() - exact).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-2);
        let classical = q_jackson_integral(|t: f64| t.cos(), 0.0, 2.0, &QContext::classical()).unwrap();
        assert_relative_eq!(classical, exact, max_relative = 1e-12);
    }
}
