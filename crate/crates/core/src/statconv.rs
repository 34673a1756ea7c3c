//! Natural density, statistical limits and the `q_n` sequences used to
//! drive the operators.
//!
//! Statistical limits are only ever estimated: a limit is accepted when the
//! density of the exceedance set `{j <= H : |x_j - L| >= ε}` is
//! non-increasing across a ladder of horizons `H` and ends below a
//! threshold, for every `ε` in a ladder.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A decidable set of positive integers.
#[derive(Clone)]
pub struct IndexSet {
    membership: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    description: String,
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IndexSet").field("description", &self.description).finish()
    }
}

impl IndexSet {
    pub fn new(description: impl Into<String>, membership: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        Self { membership: Arc::new(membership), description: description.into() }
    }

    pub fn naturals() -> Self {
        Self::new("all positive integers", |_| true)
    }

    pub fn evens() -> Self {
        Self::new("even integers", |j| j % 2 == 0)
    }

    pub fn perfect_squares() -> Self {
        Self::new("perfect squares", is_square)
    }

    pub fn complement(&self) -> Self {
        let inner = Arc::clone(&self.membership);
        Self::new(format!("complement of {}", self.description), move |j| !inner(j))
    }

    pub fn contains(&self, j: u64) -> bool {
        (self.membership)(j)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

pub fn is_square(j: u64) -> bool {
    let r = (j as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).any(|s| s.checked_mul(s) == Some(j))
}

/// `|{j <= horizon : j ∈ K}| / horizon`.
pub fn natural_density(set: &IndexSet, horizon: u64) -> Result<f64> {
    if horizon == 0 {
        return Err(invalid("density horizon must be >= 1"));
    }
    let count = (1..=horizon).filter(|&j| set.contains(j)).count();
    Ok(count as f64 / horizon as f64)
}

/// Density at `horizon` of `{j : |x_j - L| >= eps}`, where `prefix[0]` is
/// `x_1`.
pub fn statistical_limit_estimate(prefix: &[f64], limit: f64, eps: f64, horizon: usize) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    if horizon == 0 || prefix.len() < horizon {
        return Err(invalid(format!("need a prefix of length >= horizon >= 1, got {} and {horizon}", prefix.len())));
    }
    let count = prefix[..horizon].iter().filter(|x| !((*x - limit).abs() < eps)).count();
    Ok(count as f64 / horizon as f64)
}

/// `q_n = n / (n + 1)`.
pub fn qn_standard(n: u64) -> f64 {
    n as f64 / (n as f64 + 1.0)
}

/// `1/2` on perfect squares, `n / (n + 1)` elsewhere.
pub fn qn_statistical_only(n: u64) -> f64 {
    if is_square(n) {
        0.5
    } else {
        qn_standard(n)
    }
}

/// Statistical limits a sequence claims for `(q_n, q_n^n, 1/[n]_{q_n})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeclaredLimits {
    pub q: f64,
    pub q_pow_n: f64,
    pub inv_bracket: f64,
}

#[derive(Clone)]
pub struct SequenceSpec {
    name: String,
    generator: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    declared: DeclaredLimits,
    ordinary_convergent: bool,
}

impl fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceSpec")
            .field("name", &self.name)
            .field("declared", &self.declared)
            .field("ordinary_convergent", &self.ordinary_convergent)
            .finish()
    }
}

impl SequenceSpec {
    pub fn new(
        name: impl Into<String>,
        generator: impl Fn(u64) -> f64 + Send + Sync + 'static,
        declared: DeclaredLimits,
        ordinary_convergent: bool,
    ) -> Self {
        Self { name: name.into(), generator: Arc::new(generator), declared, ordinary_convergent }
    }

    pub fn standard() -> Self {
        let declared = DeclaredLimits { q: 1.0, q_pow_n: (-1f64).exp(), inv_bracket: 0.0 };
        Self::new("standard", qn_standard, declared, true)
    }

    pub fn statistical_only() -> Self {
        let declared = DeclaredLimits { q: 1.0, q_pow_n: (-1f64).exp(), inv_bracket: 0.0 };
        Self::new("statonly", qn_statistical_only, declared, false)
    }

    pub fn constant(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(invalid(format!("constant sequence needs 0 < q < 1, got {q}")));
        }
        let declared = DeclaredLimits { q, q_pow_n: 0.0, inv_bracket: 1.0 - q };
        Ok(Self::new("constant", move |_| q, declared, true))
    }

    /// `standard`, `statonly` or `constant` (at `q = 1/2`).
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "standard" => Ok(Self::standard()),
            "statonly" => Ok(Self::statistical_only()),
            "constant" => Self::constant(0.5),
            other => Err(invalid(format!("unknown sequence `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn q(&self, n: u64) -> f64 {
        (self.generator)(n)
    }

    pub fn declared(&self) -> DeclaredLimits {
        self.declared
    }

    pub fn ordinary_convergent(&self) -> bool {
        self.ordinary_convergent
    }

    pub fn prefix(&self, len: usize) -> Vec<f64> {
        (1..=len as u64).map(|n| self.q(n)).collect()
    }
}

/// `[n]_q` for a single `(n, q)` pair, exact at `q = 1`.
fn bracket(n: u64, q: f64) -> f64 {
    if q == 1.0 {
        n as f64
    } else {
        -(n as f64 * q.ln()).exp_m1() / (1.0 - q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// The density curve is not monotone across the horizon ladder.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatTolerances {
    pub horizons: Vec<u64>,
    pub eps: Vec<f64>,
    /// Largest density accepted at the final horizon.
    pub threshold: f64,
}

impl Default for StatTolerances {
    fn default() -> Self {
        Self { horizons: vec![1_000, 10_000, 100_000, 1_000_000], eps: vec![0.1, 0.01], threshold: 1e-2 }
    }
}

impl StatTolerances {
    fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() || self.horizons.windows(2).any(|w| w[0] >= w[1]) || self.horizons[0] == 0 {
            return Err(invalid("horizon ladder must be non-empty and strictly increasing"));
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) {
            return Err(invalid("eps ladder must be non-empty and positive"));
        }
        Ok(())
    }
}

/// Density curve of one exceedance set across the horizon ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub eps: f64,
    pub densities: Vec<(u64, f64)>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub target: f64,
    pub curves: Vec<DensityCurve>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conditions7Report {
    pub sequence: String,
    /// Empirical `st-lim q_n^n`: median of the last decile at the top horizon.
    pub a_estimate: f64,
    pub conditions: Vec<ConditionReport>,
    pub ordinary_convergent: bool,
    pub pass: bool,
}

fn curve(values: &[f64], target: f64, eps: f64, tol: &StatTolerances) -> Result<DensityCurve> {
    let densities = tol
        .horizons
        .iter()
        .map(|&h| Ok((h, statistical_limit_estimate(values, target, eps, h as usize)?)))
        .collect::<Result<Vec<_>>>()?;
    let monotone = densities.windows(2).all(|w| w[1].1 <= w[0].1);
    let last = densities.last().expect("non-empty ladder").1;
    let verdict = if last >= tol.threshold {
        Verdict::Fail
    } else if monotone {
        Verdict::Pass
    } else {
        Verdict::Indeterminate
    };
    Ok(DensityCurve { eps, densities, verdict })
}

fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    verdicts.into_iter().fold(Verdict::Pass, |acc, v| match (acc, v) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Indeterminate, _) | (_, Verdict::Indeterminate) => Verdict::Indeterminate,
        _ => Verdict::Pass,
    })
}

fn condition(name: &str, values: &[f64], target: f64, tol: &StatTolerances) -> Result<ConditionReport> {
    let curves = tol.eps.iter().map(|&e| curve(values, target, e, tol)).collect::<Result<Vec<_>>>()?;
    let verdict = combine(curves.iter().map(|c| c.verdict));
    Ok(ConditionReport { name: name.to_string(), target, curves, verdict })
}

fn median_of_last_decile(values: &[f64]) -> f64 {
    let start = values.len() - (values.len() / 10).max(1);
    let mut tail = values[start..].to_vec();
    tail.sort_by(f64::total_cmp);
    let m = tail.len() / 2;
    if tail.len() % 2 == 1 {
        tail[m]
    } else {
        0.5 * (tail[m - 1] + tail[m])
    }
}

/// Checks `st-lim q_n = 1`, `st-lim q_n^n = a < 1` and
/// `st-lim 1/[n]_{q_n} = 0`, with `a` estimated from the sequence itself.
pub fn verify_conditions7(spec: &SequenceSpec, tol: &StatTolerances) -> Result<Conditions7Report> {
    tol.validate()?;
    let horizon = *tol.horizons.last().expect("validated");
    let qs = spec.prefix(horizon as usize);
    if let Some((j, q)) = qs.iter().enumerate().find(|(_, q)| !(**q > 0.0 && **q <= 1.0)) {
        return Err(invalid(format!("sequence `{}` leaves (0, 1] at n={}: {q}", spec.name(), j + 1)));
    }
    let pow_n: Vec<f64> = qs.iter().enumerate().map(|(j, q)| q.powf((j + 1) as f64)).collect();
    let inv_bracket: Vec<f64> = qs.iter().enumerate().map(|(j, &q)| 1.0 / bracket(j as u64 + 1, q)).collect();
    let a = median_of_last_decile(&pow_n);

    let mut second = condition("st-lim q_n^n = a < 1", &pow_n, a, tol)?;
    if !(a < 1.0) {
        second.verdict = Verdict::Fail;
    }
    let conditions = vec![
        condition("st-lim q_n = 1", &qs, 1.0, tol)?,
        second,
        condition("st-lim 1/[n]_q = 0", &inv_bracket, 0.0, tol)?,
    ];
    let pass = conditions.iter().all(|c| c.verdict == Verdict::Pass);
    Ok(Conditions7Report {
        sequence: spec.name().to_string(),
        a_estimate: a,
        conditions,
        ordinary_convergent: spec.ordinary_convergent(),
        pass,
    })
}

/// Ordinary-convergence check: every term in the tail window
/// `[horizon/2, horizon]` lies within `eps` of `limit`.
pub fn ordinary_convergence_check(prefix: &[f64], limit: f64, eps: f64, horizon: usize) -> Result<bool> {
    if horizon < 2 || prefix.len() < horizon {
        return Err(invalid(format!("need a prefix of length >= horizon >= 2, got {} and {horizon}", prefix.len())));
    }
    Ok(prefix[horizon / 2 - 1..horizon].iter().all(|x| (x - limit).abs() < eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_detection() {
        let squares: Vec<u64> = (1..=50).filter(|&j| is_square(j)).collect();
        assert_eq!(squares, vec![1, 4, 9, 16, 25, 36, 49]);
        assert!(is_square(1_000_000_000_000));
        assert!(!is_square(999_999_999_999));
    }

    #[test]
    fn density_examples() {
        assert_eq!(natural_density(&IndexSet::naturals(), 777).unwrap(), 1.0);
        assert_eq!(natural_density(&IndexSet::evens(), 1_000_000).unwrap(), 0.5);
        assert_eq!(natural_density(&IndexSet::perfect_squares(), 1_000_000).unwrap(), 0.001);
        assert!(natural_density(&IndexSet::naturals(), 0).is_err());
        let sq = IndexSet::perfect_squares();
        let c = natural_density(&sq.complement(), 10_007).unwrap();
        assert_eq!(c, 1.0 - natural_density(&sq, 10_007).unwrap());
    }

    #[test]
    fn limit_estimate_examples() {
        let constant = vec![2.0; 100];
        assert_eq!(statistical_limit_estimate(&constant, 2.0, 1e-3, 100).unwrap(), 0.0);
        let spiked: Vec<f64> = (1..=1_000_000u64).map(|j| if is_square(j) { 5.0 } else { 2.0 }).collect();
        assert_eq!(statistical_limit_estimate(&spiked, 2.0, 1e-3, 1_000_000).unwrap(), 0.001);
        let alt: Vec<f64> = (1..=1000).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(statistical_limit_estimate(&alt, 1.0, 0.5, 1000).unwrap(), 0.5);
        assert!(statistical_limit_estimate(&alt, 1.0, 0.0, 1000).is_err());
        assert!(statistical_limit_estimate(&alt, 1.0, 0.1, 1001).is_err());
    }

    #[test]
    fn sequences() {
        assert_eq!(qn_standard(1), 0.5);
        assert_eq!(qn_statistical_only(4), 0.5);
        assert_eq!(qn_statistical_only(5), 5.0 / 6.0);
        assert!(SequenceSpec::constant(1.0).is_err());
        assert!(SequenceSpec::by_name("nope").is_err());
    }

    #[test]
    fn conditions_for_the_standard_sequence() {
        let tol = StatTolerances { horizons: vec![1_000, 10_000, 100_000], ..Default::default() };
        let r = verify_conditions7(&SequenceSpec::standard(), &tol).unwrap();
        assert!(r.pass, "{r:?}");
        assert_relative_eq!(r.a_estimate, (-1f64).exp(), max_relative = 1e-4);
    }

    #[test]
    fn constant_sequence_fails_first_condition() {
        let tol = StatTolerances { horizons: vec![1_000, 10_000], ..Default::default() };
        let r = verify_conditions7(&SequenceSpec::constant(0.5).unwrap(), &tol).unwrap();
        assert_eq!(r.conditions[0].verdict, Verdict::Fail);
        assert!(!r.pass);
    }

    #[test]
    fn non_monotone_curves_are_indeterminate() {
        // Exceedances on 1..=3 and then on (5000, 5005]: density drops, then rises.
        let values: Vec<f64> =
            (1..=10_000u64).map(|j| if j <= 3 || (5000..5005).contains(&j) { 1.0 } else { 0.0 }).collect();
        let tol = StatTolerances { horizons: vec![10, 100, 10_000], eps: vec![0.5], threshold: 1e-2 };
        let c = curve(&values, 0.0, 0.5, &tol).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        let tol = StatTolerances { horizons: vec![4000, 5004, 10_000], eps: vec![0.5], threshold: 1e-2 };
        assert_eq!(curve(&values, 0.0, 0.5, &tol).unwrap().verdict, Verdict::Indeterminate);
    }

    #[test]
    fn ordinary_check_separates_the_sequences() {
        let h = 100_000;
        assert!(ordinary_convergence_check(&SequenceSpec::standard().prefix(h), 1.0, 0.01, h).unwrap());
        assert!(!ordinary_convergence_check(&SequenceSpec::statistical_only().prefix(h), 1.0, 0.01, h).unwrap());
    }
}
