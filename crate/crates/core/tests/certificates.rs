mod common;

use jumplmi::certificates::*;
use jumplmi::function_classes::IndividualAssumption::{self, *};
use jumplmi::jump_models::Method;
use jumplmi::lmi::MultiplierPair;
use jumplmi::Error;

#[test]
fn every_grid_certificate_verifies() {
    let mut count = 0;
    for cell in common::grid() {
        let Some(res) = common::build(&cell) else { continue };
        let c = res.unwrap_or_else(|e| panic!("{cell:?}: {e}"));
        assert!(c.verified);
        assert!(c.rho2 > 0.0 && c.rho2 < 1.0, "{cell:?}: rho2 {}", c.rho2);
        let rep = verify_certificate(&c);
        assert!(rep.feasible, "{cell:?}: {:?}", rep.issues);
        count += 1;
    }
    assert!(count > 200, "only {count} cells");
}

#[test]
fn full_condition_agrees_at_n10() {
    for cell in common::grid().into_iter().filter(|c| c.n == 10) {
        let Some(Ok(c)) = common::build(&cell) else { continue };
        let full = verify_certificate_full(&c).unwrap();
        assert!(full.feasible, "{cell:?}: {full:?}");
    }
}

#[test]
fn negated_multiplier_is_flagged() {
    let mut c = saga_certificate(ConvexSmooth, 0.1, 1.0, 10, 0.2, None).unwrap();
    c.lambdas = MultiplierPair::new(c.lambdas.lambda1, -c.lambdas.lambda2);
    let rep = verify_certificate(&c);
    assert!(!rep.feasible);
    assert!(rep.issues.iter().any(|s| s.contains("negative multiplier")));
}

#[test]
fn lowered_rate_is_rejected() {
    let mut c = saga_certificate(StronglyConvex, 0.1, 1.0, 10, 1.0 / 3.0, None).unwrap();
    c.rho2 -= 0.05;
    assert!(!verify_certificate(&c).feasible);
}

#[test]
fn saga_examples() {
    let c = saga_certificate(SmoothOnly, 0.1f64, 1.0, 10, 0.0125, Some(3.0)).unwrap();
    assert!((c.rho2 - 0.9990625).abs() < 1e-15);
    let (m, l, n): (f64, f64, usize) = (0.1, 1.0, 10);
    let s = m * m * n as f64 + l * l;
    let c = saga_smooth_balanced(m, l, n).unwrap();
    assert!((c.rho2 - (1.0 - m * m / (8.0 * s))).abs() < 1e-15);
    assert!((c.alpha - m / (4.0 * s)).abs() < 1e-18);
    // R0 weight on the tables equals b·α²
    let wy = c.lyapunov_weights.iter().find(|w| w.name == "sum_y_dist2").unwrap().weight;
    assert!((wy - m * m / (8.0 * s * l * l)).abs() < 1e-15);
}

#[test]
fn saga_cvx_showcase() {
    let (m, l, n): (f64, f64, usize) = (0.1, 1.0, 100);
    let c = saga_certificate(ConvexSmooth, m, l, n, 1.0 / 3.0, Some(5.0 / 6.0)).unwrap();
    // at α = 1/(3L), b = 5/6 the bound simplifies to 1 − min{1/(3n), m/(10L)} or better
    assert!(c.rho2 <= 1.0 - f64::min(1.0 / (3.0 * n as f64), m / (10.0 * l)) + 1e-15);
    let wy = c.lyapunov_weights.iter().find(|w| w.name == "sum_y_dist2").unwrap().weight;
    assert!((wy - 5.0 / 18.0).abs() < 1e-15);
}

#[test]
fn large_n_stepsizes() {
    for &(m, l, n) in &[(0.1, 1.0, 10usize), (0.01, 1.0, 200), (0.6, 1.0, 10), (1.0, 1.0, 50)] {
        let c = saga_remark1_certificate(StronglyConvex, m, l, n).unwrap();
        let nf = n as f64;
        let loose = 1.0 - m / (2.0 * (m * nf + l));
        assert!(c.rho2 <= loose + 1e-15);
        if l >= 2.0 * m {
            let closed = 1.0 - m / (m * nf + l) + m * m / ((l + 2.0 * m * nf) * l);
            assert!((c.rho2 - closed).abs() < 1e-14);
        } else {
            assert_eq!(c.provenance, Statement::SagaLargeNClose);
        }
        let c = saga_remark1_certificate(ConvexSmooth, m, l, n).unwrap();
        assert!(c.rho2 <= 1.0 - m / (6.0 * (m * nf + l)) + 1e-15);
    }
}

#[test]
fn finito_examples() {
    let c = finito_certificate(StronglyConvex, 0.01, 1.0, 71).unwrap();
    assert!((c.rho2 - 0.9995f64).abs() < 1e-15);
    let c = finito_certificate(SmoothOnly, 0.5f64, 1.0, 192).unwrap();
    assert!((c.rho2 - (1.0 - 1.0 / 576.0)).abs() < 1e-15);
    assert!(matches!(
        finito_certificate(StronglyConvex, 0.01, 1.0, 70),
        Err(Error::BigDataConditionViolated(s)) if s == "n >= sqrt(50L/m)"
    ));
    assert!(matches!(finito_certificate(SmoothOnly, 0.5, 1.0, 191), Err(Error::BigDataConditionViolated(_))));
}

#[test]
fn finito_weights_match_bound() {
    let (m, l): (f64, f64) = (0.1, 1.0);
    let c = finito_certificate(StronglyConvex, m, l, 50).unwrap();
    let get = |k: &str| c.lyapunov_weights.iter().find(|w| w.name == k).unwrap().weight;
    assert!((get("sum_x_dist2") - m / (10.0 * l)).abs() < 1e-15);
    assert!((get("sum_y_dist2") - 1.0 / (5.0 * l * l)).abs() < 1e-15);
    let c = finito_certificate(ConvexSmooth, m, l, 50).unwrap();
    let get = |k: &str| c.lyapunov_weights.iter().find(|w| w.name == k).unwrap().weight;
    assert!((get("sum_x_dist2") - m / (16.0 * l)).abs() < 1e-15);
    assert!((get("sum_y_dist2") - 1.0 / (16.0 * l * l)).abs() < 1e-15);
}

#[test]
fn sdca_examples() {
    let (m, l, n): (f64, f64, usize) = (0.1, 1.0, 50);
    let c = sdca_certificate(ConvexSmooth, m, l, n, 1.0 / (l + m * n as f64)).unwrap();
    assert!((c.rho2 - (1.0 - 1.0 / 60.0)).abs() < 1e-15);
    let a = m / (m * m * n as f64 + l * l);
    let c = sdca_certificate(SmoothOnly, m, l, n, a).unwrap();
    assert!((c.rho2 - (1.0 - m * m / (m * m * n as f64 + l * l))).abs() < 1e-15);
    let wy = c.lyapunov_weights.iter().find(|w| w.name == "sum_y_dist2").unwrap().weight;
    assert!((wy - 1.0 / (l * l * n as f64)).abs() < 1e-14);
    // α̃ → 1 is outside every stated range
    let at_one = 1.0 / (m * n as f64);
    assert!(sdca_certificate(ConvexSmooth, m, l, n, at_one).is_err());
    assert!(matches!(sdca_certificate(StronglyConvex, m, l, n, 0.01), Err(Error::Unsupported(_))));
}

#[test]
fn sdca_smooth_point_holds_with_either_sector() {
    let (m, l, n) = (0.1, 1.0, 20usize);
    let a = m / (m * m * n as f64 + l * l);
    let mut c = sdca_certificate(SmoothOnly, m, l, n, a).unwrap();
    c.sector = ConvexSmooth;
    assert!(verify_certificate(&c).feasible);
}

#[test]
fn finito_corner_entry_choice() {
    let c = finito_certificate(StronglyConvex, 0.1, 1.0, 50).unwrap();
    // p4 + n·p4 as printed is positive as well at the certificate point
    assert_eq!(finito_pd_as_printed(&c), Some(true));
}

#[test]
fn rate_nonincreasing_in_m() {
    for &n in &common::NS {
        for &a in &[0.2, 1.0 / 3.0, 0.45] {
            let mut last = f64::INFINITY;
            for &m in &[1e-3, 1e-2, 0.1, 0.3, 0.5, 1.0] {
                let c = statement_certificate(Statement::SagaScA, m, 1.0, n, Some(a), None).unwrap();
                assert!(c.rho2 <= last + 1e-15, "n={n} a={a} m={m}");
                last = c.rho2;
            }
        }
    }
}

#[test]
fn assumption_monotonicity() {
    let mut compared = 0;
    for &m in &common::RATIOS {
        for &n in &common::NS {
            for &a in &[m / 8.0, m / 16.0, m / 32.0, 3.0 * m / 8.0 * 0.9] {
                let rates: Vec<Option<f64>> = IndividualAssumption::ALL
                    .iter()
                    .map(|&asm| saga_certificate(asm, m, 1.0, n, a, None).ok().map(|c| c.rho2))
                    .collect();
                if let [Some(sc), Some(cvx), Some(sm)] = rates[..] {
                    assert!(sc <= cvx && cvx <= sm, "m={m} n={n} a={a}: {sc} {cvx} {sm}");
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 20);
}

#[test]
fn json_roundtrip() {
    let c = finito_certificate(ConvexSmooth, 0.1, 1.0, 50).unwrap();
    let s = serde_json::to_string(&c).unwrap();
    for key in ["\"method\"", "\"assumption\"", "\"L\"", "\"rho2\"", "\"P_params\"", "\"lambdas\"", "\"provenance\"", "\"verified\""] {
        assert!(s.contains(key), "{key} missing");
    }
    let back: RateCertificate<f64> = serde_json::from_str(&s).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.method, Method::Finito);
}

#[test]
fn single_precision_certificates() {
    let c = saga_certificate(StronglyConvex, 0.1f32, 1.0, 10, 1.0 / 3.0, None).unwrap();
    assert!(c.verified);
    let c = sdca_certificate(ConvexSmooth, 0.1f32, 1.0, 10, 0.5).unwrap();
    assert!(c.verified);
}
