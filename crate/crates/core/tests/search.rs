use jumplmi::search::{
    bisect_rate, feasible_at, published_sag_point, sag_probe, PForm, SearchConfig, SearchSpec, SearchStatus,
};
use jumplmi::{IndividualAssumption, Method};

use IndividualAssumption::{ConvexSmooth, StronglyConvex};

fn light() -> SearchConfig {
    SearchConfig { restarts: 6, max_evals: 800, ..SearchConfig::default() }
}

#[test]
fn saga_bisection_improves_on_closed_form() {
    let spec = SearchSpec::new(Method::Saga, StronglyConvex, 0.1, 1.0, 10, 1.0 / 3.0);
    let cfg = light();
    let res = bisect_rate(&spec, &cfg).unwrap();
    assert_eq!(res.status, SearchStatus::Certified);
    let best = res.rho2_best.unwrap();
    assert!(best <= 1.0 - (1.0f64 / 20.0).min(1.0 / 60.0) + cfg.rho2_tol);
    assert!(best <= res.analytic_rho2.unwrap() + cfg.rho2_tol);
    let w = res.witness.as_ref().unwrap();
    assert!(w.verify(cfg.feas_tol).unwrap());
    assert_eq!(w.rho2, best);
}

#[test]
fn sdca_bisection_dominates_and_is_deterministic() {
    let (m, l, n) = (0.1, 1.0, 50);
    let alpha = 1.0 / (l + m * n as f64);
    let spec = SearchSpec::new(Method::Sdca, ConvexSmooth, m, l, n, alpha);
    let cfg = SearchConfig { seed: 17, ..light() };
    let a = bisect_rate(&spec, &cfg).unwrap();
    assert!(a.rho2_best.unwrap() <= 1.0 - m / (l + m * n as f64) + cfg.rho2_tol);
    assert!(a.witness.as_ref().unwrap().verify(cfg.feas_tol).unwrap());
    let b = bisect_rate(&spec, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rate_one_is_feasible_for_small_stepsizes() {
    for alpha in [0.01, 0.05] {
        let spec = SearchSpec::new(Method::Saga, StronglyConvex, 0.1, 1.0, 10, alpha);
        let res = feasible_at(&spec, 1.0, &light()).unwrap();
        let w = res.witness.expect("witness at rho2 = 1");
        assert!(w.verify(1e-9).unwrap());
    }
}

#[test]
fn saga_verdict_is_scale_invariant() {
    let cfg = light();
    for (rho2, expect) in [(0.95, true), (0.93, false)] {
        for c in [1.0, 0.5, 3.0] {
            let spec = SearchSpec::new(Method::Saga, StronglyConvex, 0.1 * c, c, 10, 1.0 / (3.0 * c));
            let found = feasible_at(&spec, rho2, &cfg).unwrap().witness.is_some();
            assert_eq!(found, expect, "rho2={rho2} c={c}");
        }
    }
}

#[test]
fn finito_below_threshold_gets_a_rate() {
    // n = 10 < sqrt(50L/m) ≈ 22.4, so no closed-form point applies
    let spec = SearchSpec::new(Method::Finito, StronglyConvex, 0.1, 1.0, 10, 0.2);
    let res = bisect_rate(&spec, &light()).unwrap();
    assert_eq!(res.analytic_rho2, None);
    assert!(res.rho2_best.unwrap() < 1.0);
}

#[test]
fn sag_published_rate_has_no_block_diagonal_witness() {
    let (m, l, n) = (0.1, 1.0, 10);
    let (alpha, rho2) = published_sag_point(m, l, n);
    assert_eq!(alpha, 1.0 / 16.0);
    assert!((rho2 - 0.99375).abs() < 1e-15);
    let probe = sag_probe(StronglyConvex, m, l, n, alpha, &[rho2, 0.999, 1.0], &SearchConfig::default()).unwrap();
    assert!(probe.rows[0].restricted.is_none());
    assert!(probe.rows[0].restricted_best > 1e-9);
    assert!(probe.restricted_monotone);
    assert!(probe.invariant_monotone);
    if let Some(w) = &probe.rows[0].invariant {
        assert_eq!(w.form, PForm::Invariant);
        assert!(w.verify(1e-9).unwrap());
    }
}
