//! Test functions the operators act on, with the metadata the rate
//! bounds need.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
    Neither,
}

/// A global Hölder bound `|f(t) - f(y)| <= m |t - y|^alpha` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Holder {
    pub alpha: f64,
    pub m: f64,
}

/// A real function on `[0, ∞)` with optional known bounds.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    bound: Option<f64>,
    holder: Option<Holder>,
    monotonicity: Monotonicity,
    kinks: Vec<f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .field("holder", &self.holder)
            .field("monotonicity", &self.monotonicity)
            .finish()
    }
}

impl TestFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            bound: None,
            holder: None,
            monotonicity: Monotonicity::Neither,
            kinks: Vec::new(),
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound >= 0.0) {
            return Err(invalid(format!("bound must be finite and >= 0, got {bound}")));
        }
        self.bound = Some(bound);
        Ok(self)
    }

    pub fn with_holder(mut self, alpha: f64, m: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(invalid(format!("Hölder constant must be positive, got {m}")));
        }
        self.holder = Some(Holder { alpha, m });
        Ok(self)
    }

    pub fn with_monotonicity(mut self, monotonicity: Monotonicity) -> Self {
        self.monotonicity = monotonicity;
        self
    }

    /// Points where `f` is not differentiable; quadrature splits there.
    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn holder(&self) -> Option<Holder> {
        self.holder
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.monotonicity == Monotonicity::NonDecreasing
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }
}

/// The fixed corpus used by tests and CLI defaults.
pub mod corpus {
    use super::{Monotonicity::*, TestFunction};

    pub fn one() -> TestFunction {
        TestFunction::new("1", |_| 1.0)
            .with_bound(1.0)
            .and_then(|f| f.with_holder(1.0, 1.0))
            .expect("valid metadata")
            .with_monotonicity(NonDecreasing)
    }

    pub fn identity() -> TestFunction {
        TestFunction::new("t", |t| t).with_holder(1.0, 1.0).expect("valid metadata").with_monotonicity(NonDecreasing)
    }

    pub fn square() -> TestFunction {
        TestFunction::new("t^2", |t| t * t).with_monotonicity(NonDecreasing)
    }

    pub fn exp_neg() -> TestFunction {
        TestFunction::new("exp(-t)", |t: f64| (-t).exp())
            .with_bound(1.0)
            .and_then(|f| f.with_holder(1.0, 1.0))
            .expect("valid metadata")
            .with_monotonicity(NonIncreasing)
    }

    pub fn lorentzian() -> TestFunction {
        // sup |f'| = 3√3/8 at t = 1/√3
        TestFunction::new("1/(1+t^2)", |t| 1.0 / (1.0 + t * t))
            .with_bound(1.0)
            .and_then(|f| f.with_holder(1.0, 3.0 * 3f64.sqrt() / 8.0))
            .expect("valid metadata")
            .with_monotonicity(NonIncreasing)
    }

    pub fn damped_sine() -> TestFunction {
        TestFunction::new("sin(t)/(1+t)", |t: f64| t.sin() / (1.0 + t))
            .with_bound(0.5)
            .and_then(|f| f.with_holder(1.0, 1.0))
            .expect("valid metadata")
    }

    pub fn sqrt() -> TestFunction {
        TestFunction::new("sqrt(t)", |t: f64| t.sqrt())
            .with_holder(0.5, 1.0)
            .expect("valid metadata")
            .with_monotonicity(NonDecreasing)
    }

    pub fn abs_shift() -> TestFunction {
        TestFunction::new("|t-1|", |t: f64| (t - 1.0).abs())
            .with_holder(1.0, 1.0)
            .expect("valid metadata")
            .with_kinks(vec![1.0])
    }

    /// `1 - e^{-t}`, the non-decreasing counterpart of `e^{-t}`.
    pub fn one_minus_exp() -> TestFunction {
        TestFunction::new("1-exp(-t)", |t: f64| -(-t).exp_m1())
            .with_bound(1.0)
            .and_then(|f| f.with_holder(1.0, 1.0))
            .expect("valid metadata")
            .with_monotonicity(NonDecreasing)
    }

    /// The eight corpus functions, in a fixed order.
    pub fn all() -> Vec<TestFunction> {
        vec![one(), identity(), square(), exp_neg(), lorentzian(), damped_sine(), sqrt(), abs_shift()]
    }

    /// Korovkin test functions `1, t, t²`.
    pub fn korovkin() -> [TestFunction; 3] {
        [one(), identity(), square()]
    }

    pub fn by_name(name: &str) -> Option<TestFunction> {
        all().into_iter().chain(std::iter::once(one_minus_exp())).find(|f| f.name() == name)
    }
}
