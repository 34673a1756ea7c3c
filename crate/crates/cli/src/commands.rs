use anyhow::{bail, Context, Result};
use qstancu_core::convergence::{korovkin_error_profile, theorem5_sweep, theorem6_sweep, BoundReport};
use qstancu_core::report::{ConvergenceReport, ReportRow};
use qstancu_core::statconv::{ordinary_convergence_check, verify_conditions7, StatTolerances, Verdict};
use qstancu_core::{
    corpus, Family, LipschitzClass, Monotonicity, Norm, OperatorKind, QContext, SequenceSpec, StancuBeta, TestFunction,
};
use rayon::prelude::*;

use crate::config::{Command, RunConfig};

/// Points at which the q = 1 reduction is compared.
const REDUCTION_POINTS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn run(config: &RunConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    match config.command {
        Command::Moments => cmd_moments(config),
        Command::Converge => cmd_converge(config),
        Command::Bounds => cmd_bounds(config),
        Command::Statistical => cmd_statistical(config),
        Command::Compare => cmd_compare(config),
    }
}

fn operator(family: Family, n: u32, q: f64) -> Result<StancuBeta> {
    let ctx = QContext::new(q)?;
    Ok(StancuBeta::new(OperatorKind::new(family, n)?, ctx))
}

fn concat(parts: Vec<ConvergenceReport>) -> ConvergenceReport {
    let mut out = ConvergenceReport::default();
    for p in parts {
        out.extend(p);
    }
    out
}

/// Moment residuals `|L(t^k; x) - closed form|` for `k = 0, 1, 2`.
pub fn cmd_moments(config: &RunConfig) -> Result<ConvergenceReport> {
    let mut cells = Vec::new();
    for &n in &config.n_ladder {
        for &q in &config.q_values {
            for &a in &config.lattice_scales {
                for &x in &config.x_values {
                    cells.push((n, q, a, x));
                }
            }
        }
    }
    let names = corpus::korovkin().map(|f| f.name().to_string());
    let parts = cells
        .par_iter()
        .map(|&(n, q, a, x)| -> Result<ConvergenceReport> {
            let op = operator(config.operator, n, q)?.with_lattice_scale(a)?;
            let got = op.integrated_moments(x).with_context(|| format!("n={n} q={q} A={a} x={x}"))?;
            let exact = op.moments(x)?;
            let norm = format!("moment(A={a})");
            let mut r = ConvergenceReport::default();
            for (k, name) in names.iter().enumerate() {
                let residual = (got.get(k) - exact.get(k)).abs();
                r.push(ReportRow::check(n, q, name, &norm, x, residual, config.moment_tol));
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(concat(parts))
}

/// Korovkin errors in the sup norm over the grid and in the weighted norm,
/// for `q = q_n` from the configured sequence.
pub fn cmd_converge(config: &RunConfig) -> Result<ConvergenceReport> {
    let spec = SequenceSpec::by_name(&config.sequence)?;
    let weighted = config.weighted_grid()?;
    let parts = config
        .n_ladder
        .par_iter()
        .map(|&n| -> Result<ConvergenceReport> {
            let op = operator(config.operator, n, spec.q(n as u64))?;
            let mut r = korovkin_error_profile(&op, &config.grid, Norm::Sup, config.moment_tol)?;
            r.extend(korovkin_error_profile(&op, &weighted, Norm::Weighted, config.moment_tol)?);
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = concat(parts);
    if !spec.ordinary_convergent() {
        // Density of the indices where q_n is far from 1, up to the top of the ladder.
        let top = *config.n_ladder.last().expect("validated non-empty");
        let prefix = spec.prefix(top as usize);
        for &eps in &StatTolerances::default().eps {
            for &h in &config.n_ladder {
                let d = qstancu_core::statconv::statistical_limit_estimate(&prefix, 1.0, eps, h as usize)?;
                report.push(ReportRow::informational(
                    h,
                    spec.q(h as u64),
                    "q_n",
                    &format!("density(eps={eps})"),
                    f64::NAN,
                    d,
                ));
            }
        }
    }
    Ok(report)
}

fn bound_rows(n: u32, q: f64, f: &TestFunction, label: &str, reports: &[BoundReport]) -> ConvergenceReport {
    let mut r = ConvergenceReport::default();
    for b in reports {
        r.push(ReportRow::check(n, q, f.name(), label, b.x, b.lhs, b.rhs));
    }
    r
}

/// Per-point modulus-of-continuity and Hölder-class rate bounds for the
/// x²-preserving operators.
pub fn cmd_bounds(config: &RunConfig) -> Result<ConvergenceReport> {
    if config.operator != Family::CaiPreserving {
        bail!("rate bounds are stated for the x²-preserving operators (--operator cai)");
    }
    let fs = corpus::all();
    for f in fs.iter().filter(|f| f.holder().is_none()) {
        eprintln!("warning: {} declares no Hölder constant; skipping its Hölder-class rows", f.name());
    }
    let dense: Vec<f64> = config.grid.nodes().collect();
    let sets: [(&str, Vec<f64>); 3] = [("E={0}", vec![0.0]), ("E={0,1,2}", vec![0.0, 1.0, 2.0]), ("E=grid", dense)];
    let mut cells = Vec::new();
    for &n in &config.n_ladder {
        for &q in &config.q_values {
            cells.push((n, q));
        }
    }
    let parts = cells
        .par_iter()
        .map(|&(n, q)| -> Result<ConvergenceReport> {
            let op = operator(config.operator, n, q)?;
            let mut r = ConvergenceReport::default();
            let t5 = theorem5_sweep(&fs, &op, &config.grid)?;
            for (f, reports) in fs.iter().zip(&t5) {
                let label = match f.monotonicity() {
                    Monotonicity::NonDecreasing => "theorem5",
                    _ => "theorem5(non-monotone)",
                };
                r.extend(bound_rows(n, q, f, label, reports));
            }
            for f in fs.iter().filter(|f| f.holder().is_some()) {
                for (name, set) in &sets {
                    let lip = LipschitzClass::declared(f, set.clone())?;
                    let reports = theorem6_sweep(f, &lip, &op, &config.grid)?;
                    r.extend(bound_rows(n, q, f, &format!("theorem6({name})"), &reports));
                }
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(concat(parts))
}

/// The three statistical conditions on `(q_n)`, one row per condition,
/// `eps` and horizon. Only the final horizon carries a pass/fail check.
pub fn cmd_statistical(config: &RunConfig) -> Result<ConvergenceReport> {
    let spec = SequenceSpec::by_name(&config.sequence)?;
    let tol = StatTolerances::default();
    let result = verify_conditions7(&spec, &tol)?;
    let mut report = ConvergenceReport::default();
    let top = *tol.horizons.last().expect("non-empty ladder");
    for cond in &result.conditions {
        for curve in &cond.curves {
            let norm = format!("density(eps={})", curve.eps);
            for &(h, d) in &curve.densities {
                let n = u32::try_from(h).context("horizon exceeds u32")?;
                if h == top {
                    let mut row = ReportRow::check(n, f64::NAN, &cond.name, &norm, f64::NAN, d, tol.threshold);
                    row.pass = row.pass && curve.verdict == Verdict::Pass;
                    report.push(row);
                } else {
                    report.push(ReportRow::informational(n, f64::NAN, &cond.name, &norm, f64::NAN, d));
                }
            }
        }
    }
    let n_top = u32::try_from(top).context("horizon exceeds u32")?;
    report.push(ReportRow::informational(n_top, f64::NAN, "a", "estimate", f64::NAN, result.a_estimate));
    let prefix = spec.prefix(top as usize);
    let ordinary = ordinary_convergence_check(&prefix, 1.0, 0.01, top as usize)?;
    report.push(ReportRow::informational(
        n_top,
        f64::NAN,
        "q_n",
        "ordinary(eps=0.01)",
        f64::NAN,
        if ordinary { 1.0 } else { 0.0 },
    ));
    Ok(report)
}

/// Sup-norm errors of every family on the corpus, and the q = 1 reduction
/// of the modified operators checked against the classical ones.
pub fn cmd_compare(config: &RunConfig) -> Result<ConvergenceReport> {
    let fs = corpus::all();
    let mut cells = Vec::new();
    for &n in &config.n_ladder {
        for &q in &config.q_values {
            for family in Family::ALL {
                cells.push((n, q, family));
            }
        }
    }
    let mut parts = cells
        .par_iter()
        .map(|&(n, q, family)| -> Result<ConvergenceReport> {
            let op = operator(family, n, q)?;
            let mut worst = vec![0.0f64; fs.len()];
            for x in config.grid.nodes() {
                let p = op.prepare(x)?;
                for (w, f) in worst.iter_mut().zip(&fs) {
                    *w = w.max((p.apply_fn(f)? - f.eval(x)).abs());
                }
            }
            let mut r = ConvergenceReport::default();
            for (f, w) in fs.iter().zip(worst) {
                r.push(ReportRow::informational(n, q, f.name(), &format!("sup({})", family.label()), f64::NAN, w));
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let reduction = config
        .n_ladder
        .par_iter()
        .map(|&n| -> Result<ConvergenceReport> {
            let modified = operator(Family::ModifiedQ, n, 1.0)?;
            let classical = operator(Family::Classical, n, 1.0)?;
            let mut r = ConvergenceReport::default();
            for x in REDUCTION_POINTS {
                let (pm, pc) = (modified.prepare(x)?, classical.prepare(x)?);
                for f in &fs {
                    let diff = (pm.apply_fn(f)? - pc.apply_fn(f)?).abs();
                    r.push(ReportRow::check(n, 1.0, f.name(), "q=1 reduction", x, diff, config.moment_tol));
                }
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    parts.extend(reduction);
    Ok(concat(parts))
}
