//! Values frozen from independent high-precision computations (30-40 digit
//! lattice sums and quadrature), not from this crate's code paths.

use approx::assert_relative_eq;
use qstancu_core::operators::{central_moments, classical_stancu_beta, v_n};
use qstancu_core::qcalc::{
    q_beta, q_binomial, q_factorial, q_gamma, q_integer, q_jackson_integral, q_pochhammer_real, q_real_bracket,
};
use qstancu_core::{corpus, Family, OperatorKind, QContext, StancuBeta};

fn ctx(q: f64) -> QContext {
    QContext::new(q).unwrap()
}

fn op(family: Family, n: u32, q: f64) -> StancuBeta {
    StancuBeta::new(OperatorKind::new(family, n).unwrap(), ctx(q))
}

#[test]
fn q_integers_and_factorials() {
    assert_eq!(q_integer(3, &ctx(0.5)).value(), 1.75);
    assert_eq!(q_integer(7, &QContext::classical()).value(), 7.0);
    assert_eq!(q_integer(0, &ctx(0.3)).value(), 0.0);
    assert_eq!(q_real_bracket(3.0, &ctx(0.5)).unwrap().value(), 1.75);
    assert_relative_eq!(
        q_real_bracket(2.5, &ctx(0.5)).unwrap().value(),
        1.646446609406726237799577818947575,
        max_relative = 1e-15
    );
    assert_eq!(q_factorial(0, &ctx(0.5)).value(), 1.0);
    assert_eq!(q_factorial(3, &QContext::classical()).value(), 6.0);
    assert_relative_eq!(q_factorial(3, &ctx(0.5)).value(), 2.625, max_relative = 1e-15);
    assert_eq!(q_binomial(4, 2, &QContext::classical()).unwrap().value(), 6.0);
    assert_relative_eq!(q_binomial(2, 1, &ctx(0.5)).unwrap().value(), 1.5, max_relative = 1e-15);
}

#[test]
fn q_gamma_beta_and_pochhammer() {
    assert_relative_eq!(
        q_gamma(2.5, &ctx(0.5)).unwrap().value(),
        1.190593625027527486801926630404,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        q_gamma(0.5, &ctx(0.9)).unwrap().value(),
        1.738184351562161925865606186614,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        q_beta(1.5, 2.5, &ctx(0.7)).unwrap().value(),
        0.303839461512306097208760211864,
        max_relative = 1e-12
    );
    assert_relative_eq!(q_beta(2.0, 3.0, &QContext::classical()).unwrap().value(), 1.0 / 12.0, max_relative = 1e-13);
    assert_relative_eq!(
        q_pochhammer_real(0.8, 12.5, &ctx(0.9)).unwrap().value(),
        111.765452453610446643112543027,
        max_relative = 1e-11
    );
    assert_relative_eq!(q_pochhammer_real(1.0, 2.0, &ctx(0.5)).unwrap().value(), 3.0, max_relative = 1e-14);
}

#[test]
fn jackson_integral_of_identity() {
    let c = ctx(0.6);
    let b = 2.5;
    let expected = b * b / q_integer(2, &c).value();
    assert_relative_eq!(q_jackson_integral(|t| t, 0.0, b, &c).unwrap(), expected, max_relative = 1e-12);
}

#[test]
fn preserving_family_quantities() {
    let c = ctx(0.9);
    let v = v_n(1.0, 10, &c).unwrap();
    assert_relative_eq!(v, 0.799425092928964349627212692404, max_relative = 1e-14);
    let kind = OperatorKind::new(Family::CaiPreserving, 10).unwrap();
    let cm = central_moments(kind, 1.0, &c).unwrap();
    assert_relative_eq!(cm.delta, 0.401149814142071300745574615192, max_relative = 1e-13);
    assert_relative_eq!(cm.alpha, v - 1.0, max_relative = 1e-14);
}

#[test]
fn q_operator_values() {
    let cases: [(Family, u32, f64, f64, &str, f64); 8] = [
        (Family::QStancuBeta, 5, 0.5, 1.0, "exp(-t)", 0.663913050303078330479847148489),
        (Family::QStancuBeta, 5, 0.5, 1.0, "1/(1+t^2)", 0.744271877902116162130496499913),
        (Family::QStancuBeta, 5, 0.5, 1.0, "sqrt(t)", 0.687318420733782894978987302764),
        (Family::QStancuBeta, 10, 0.9, 2.0, "exp(-t)", 0.222325298596401516432807331839),
        (Family::QStancuBeta, 10, 0.9, 2.0, "1/(1+t^2)", 0.312130395488937735513539991294),
        (Family::QStancuBeta, 10, 0.9, 2.0, "sqrt(t)", 1.35063782925617423587755637763),
        (Family::CaiPreserving, 10, 0.9, 1.0, "exp(-t)", 0.513005151404704697105241921636),
        (Family::ModifiedQ, 5, 0.5, 1.0, "1/(1+t^2)", 0.372135938951058081065248249956),
    ];
    for (family, n, q, x, name, expected) in cases {
        let f = corpus::by_name(name).unwrap();
        let got = op(family, n, q).apply_fn(&f, x).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-11);
    }
}

#[test]
fn classical_operator_values() {
    assert_relative_eq!(
        classical_stancu_beta(|t: f64| (-t).exp(), 10, 1.0).unwrap(),
        0.402759301505956734638077,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        classical_stancu_beta(f64::sqrt, 10, 0.05).unwrap(),
        0.176197052001953125,
        max_relative = 1e-11
    );
    assert_relative_eq!(
        classical_stancu_beta(|t| 1.0 / (1.0 + t * t), 50, 2.0).unwrap(),
        0.210414866666904931300926531654,
        max_relative = 1e-11
    );
    assert_relative_eq!(classical_stancu_beta(|t| t * t, 10, 1.0).unwrap(), 11.0 / 9.0, max_relative = 1e-12);
}

#[test]
fn preserving_operator_near_the_origin() {
    // v_n(x) is tiny here, so most of the lattice mass sits in the u → 0 tail.
    let cases: [(u32, f64, f64, &str, f64); 3] = [
        (10, 0.9, 0.05, "sqrt(t)", 0.0436019311133304526750140653977),
        (10, 0.9, 0.05, "exp(-t)", 0.989546077012469059234512436605),
        (5, 0.5, 0.01, "sqrt(t)", 0.0000663143814475399952518581840664),
    ];
    for (n, q, x, name, expected) in cases {
        let f = corpus::by_name(name).unwrap();
        let got = op(Family::CaiPreserving, n, q).apply_fn(&f, x).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-10);
    }
}
