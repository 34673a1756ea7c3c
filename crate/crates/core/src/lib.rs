//! q-Stancu-Beta operators and the machinery needed to check their
//! approximation properties numerically.
//!
//! The crate is split along the lines of the mathematics:
//!
//! - [`qcalc`]: q-integers, q-factorials, q-Pochhammer products, `Γ_q`,
//!   `B_q` and the Jackson / Koornwinder q-integrals.
//! - [`operators`]: the classical, q-analogue, modified and
//!   x²-preserving Stancu-Beta operators together with their closed-form
//!   moments.
//! - [`convergence`]: modulus of continuity, Lipschitz maximal functions,
//!   weighted norms and the pointwise rate bounds.
//! - [`statconv`]: natural density, statistical limits and `q_n`
//!   sequence generators.
//! - [`report`]: the row/report types shared with the command-line tool.

pub mod convergence;
pub mod error;
pub mod function;
pub mod operators;
pub mod qcalc;
pub mod quadrature;
pub mod report;
pub mod statconv;

pub use convergence::{BoundReport, Grid, LipschitzClass, Norm};
pub use error::{Error, Result};
pub use function::{corpus, Monotonicity, TestFunction};
pub use operators::{CentralMoments, Family, KernelForm, MomentTriple, OperatorKind, StancuBeta};
pub use qcalc::{QContext, QReal};
pub use report::{ConvergenceReport, ReportRow, Summary};
pub use statconv::{IndexSet, SequenceSpec};
