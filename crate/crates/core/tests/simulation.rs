mod common;

use jumplmi::certificates::{finito_certificate, saga_certificate, sdca_certificate, RateCertificate};
use jumplmi::jump_models::{equilibrium, JumpRealization};
use jumplmi::simulation::{
    check_onestep_contraction, empirical_rate, generate_problem, initial_point, initial_state, problem_for,
    run_method, sample_states, QuadraticFiniteSum, RunOptions, Runner, SdcaPrimal, TableInit, CONTRACTION_TOL,
};
use jumplmi::{IndividualAssumption, Method, StructuredP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const METHODS: [Method; 4] = [Method::Saga, Method::Sag, Method::Finito, Method::Sdca];

fn instance(method: Method, n: usize, p: usize, seed: u64) -> QuadraticFiniteSum {
    generate_problem(method, IndividualAssumption::SmoothOnly, 0.1, 1.0, n, p, seed).unwrap()
}

fn realization(method: Method, q: &QuadraticFiniteSum, alpha: f64) -> JumpRealization<f64> {
    let reg = (method == Method::Sdca).then_some(q.reg);
    JumpRealization::build(method, q.n, alpha, reg).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn efficient_updates_match_jump_system() {
    for method in METHODS {
        for (n, p) in [(2, 1), (3, 2), (5, 3)] {
            let q = instance(method, n, p, 7 + n as u64);
            let alpha = if method == Method::Sdca { 0.5 / (1.0 + 0.1 * n as f64) } else { 0.2 };
            let r = realization(method, &q, alpha);
            for init in [TableInit::Zero, TableInit::Gradients] {
                let x0 = initial_point(&q, 3);
                let mut exact = initial_state(method, &q, &x0, init);
                let mut run = Runner::new(method, &q, alpha, exact.clone()).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(5);
                for _ in 0..100 {
                    let i = rng.gen_range(0..n);
                    exact = r.step_exact(&exact, &q, i + 1);
                    run.step(i);
                    let scale = exact.iter().fold(1.0f64, |a, v| a.max(v.abs()));
                    assert!(max_diff(run.state(), &exact) <= 1e-12 * scale, "{method} n={n} p={p}");
                }
                assert!(max_diff(&run.iterate(), &r.output(&exact, p)) < 1e-10);
                assert_eq!(run.grad_calls(), 100);
            }
        }
    }
}

#[test]
fn single_saga_step_entrywise() {
    let q = instance(Method::Saga, 2, 1, 1);
    let r = realization(Method::Saga, &q, 0.3);
    let xi = vec![0.4, -1.1, 2.0];
    for i in 0..2 {
        let mut run = Runner::new(Method::Saga, &q, 0.3, xi.clone()).unwrap();
        run.step(i);
        let exact = r.step_exact(&xi, &q, i + 1);
        for (a, b) in run.state().iter().zip(&exact) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

#[test]
fn sdca_direct_and_recursive_primal_agree() {
    let q = generate_problem(Method::Sdca, IndividualAssumption::ConvexSmooth, 0.1, 1.0, 10, 4, 2).unwrap();
    let alpha = 1.0 / (1.0 + 0.1 * 10.0);
    let xi0 = initial_state(Method::Sdca, &q, &initial_point(&q, 9), TableInit::Zero);
    let mut direct = Runner::new(Method::Sdca, &q, alpha, xi0.clone()).unwrap().with_sdca_primal(SdcaPrimal::Direct);
    let mut rec = Runner::new(Method::Sdca, &q, alpha, xi0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let i = rng.gen_range(0..10);
        direct.step(i);
        rec.step(i);
        assert!(max_diff(&direct.iterate(), &rec.iterate()) < 1e-12);
    }
}

#[test]
fn initial_distance_is_one() {
    for method in METHODS {
        let q = instance(method, 6, 3, 4);
        let x0 = initial_point(&q, 8);
        let d: f64 = x0.iter().zip(&q.xstar).map(|(a, b)| (a - b) * (a - b)).sum();
        assert!((d - 1.0).abs() < 1e-12);
        let r = realization(method, &q, 0.1);
        let xi0 = initial_state(method, &q, &x0, TableInit::Zero);
        assert!(max_diff(&r.output(&xi0, 3), &x0) < 1e-12);
    }
}

fn contraction_certificates() -> Vec<RateCertificate<f64>> {
    let mut out: Vec<_> = common::grid()
        .iter()
        .filter(|c| c.n <= 20)
        .filter_map(common::build)
        .map(|r| r.unwrap())
        .collect();
    out.push(finito_certificate(IndividualAssumption::SmoothOnly, 0.9, 1.0, 60).unwrap());
    out
}

#[test]
fn certificates_contract_exactly() {
    let certs = contraction_certificates();
    assert!(certs.len() > 40);
    for (idx, c) in certs.iter().enumerate() {
        let p = if c.n > 20 { 3 } else { 5 };
        let q = problem_for(c, p, idx as u64).unwrap();
        let states = sample_states(c.method, &q, c.alpha, 500, 100 + idx as u64).unwrap();
        let rep = check_onestep_contraction(c, &q, &states).unwrap();
        assert!(rep.passes(CONTRACTION_TOL), "{} m={} n={}: {:e}", c.provenance, c.m, c.n, rep.max_relative);
    }
}

#[test]
fn equilibrium_has_zero_gap() {
    let c = saga_certificate(IndividualAssumption::StronglyConvex, 0.1, 1.0, 10, 1.0 / 3.0, None).unwrap();
    let q = problem_for(&c, 3, 0).unwrap();
    let eq = equilibrium(&c.realization().unwrap(), &q).unwrap();
    let rep = check_onestep_contraction(&c, &q, &[eq.xistar]).unwrap();
    assert!(rep.max_violation.abs() < 1e-20);
}

#[test]
fn overclaimed_rate_violates_contraction() {
    let cases = [
        saga_certificate(IndividualAssumption::StronglyConvex, 0.5, 1.0, 4, 1.0 / 3.0, None).unwrap(),
        finito_certificate(IndividualAssumption::StronglyConvex, 0.01, 1.0, 71).unwrap(),
        sdca_certificate(IndividualAssumption::ConvexSmooth, 0.5, 1.0, 4, 1.0 / 3.0).unwrap(),
    ];
    for mut c in cases {
        let q = problem_for(&c, 2, 1).unwrap();
        let states = sample_states(c.method, &q, c.alpha, 500, 2).unwrap();
        c.rho2 -= 0.05;
        c.gap += 0.05;
        let rep = check_onestep_contraction(&c, &q, &states).unwrap();
        assert!(rep.max_relative > CONTRACTION_TOL, "{}: {:e}", c.provenance, rep.max_relative);
    }
}

#[test]
fn mismatched_problem_is_rejected() {
    let c = saga_certificate(IndividualAssumption::StronglyConvex, 0.1, 1.0, 10, 1.0 / 3.0, None).unwrap();
    let q = generate_problem(Method::Saga, IndividualAssumption::SmoothOnly, 0.1, 1.0, 10, 2, 0).unwrap();
    assert!(check_onestep_contraction(&c, &q, &[]).is_err());
}

#[test]
fn monte_carlo_envelope_and_fit() {
    let c = saga_certificate(IndividualAssumption::StronglyConvex, 0.5, 1.0, 4, 1.0 / 3.0, None).unwrap();
    let q = problem_for(&c, 5, 3).unwrap();
    let opts = RunOptions { iters: 120, trials: 200, seed: 4, init: TableInit::Zero };
    let trace = run_method(c.method, &q, c.alpha, &c.p, &opts).unwrap();
    assert_eq!(trace.grad_calls, 120 * 200);
    assert!(trace.mean_v.iter().all(|&v| v >= 0.0));
    let fit = empirical_rate(&trace, c.rho2).unwrap();
    assert!(fit.envelope_ok, "{:?}", fit.first_violation);
    assert!(fit.slope <= c.rho2.ln() + 0.01, "{} vs {}", fit.slope, c.rho2.ln());
    assert!(fit.rows(&trace).iter().all(|r| r.envelope_status == "ok"));
    let again = run_method(c.method, &q, c.alpha, &c.p, &opts).unwrap();
    assert_eq!(trace, again);
}

#[test]
fn zero_stepsize_has_flat_decay() {
    let q = instance(Method::Saga, 5, 2, 0);
    let w = StructuredP::Diagonal { p1: 0.0, p2: 1.0 };
    let opts = RunOptions { iters: 60, trials: 100, seed: 1, init: TableInit::Zero };
    let trace = run_method(Method::Saga, &q, 0.0, &w, &opts).unwrap();
    let fit = empirical_rate(&trace, 1.0).unwrap();
    assert!(fit.slope.abs() < 1e-12);
}

#[test]
fn degenerate_and_short_traces() {
    let q = instance(Method::Saga, 5, 2, 0);
    let w = StructuredP::Diagonal { p1: 1.0, p2: 1.0 };
    let short = RunOptions { iters: 10, trials: 100, seed: 1, init: TableInit::Zero };
    let t = run_method(Method::Saga, &q, 0.1, &w, &short).unwrap();
    assert!(empirical_rate(&t, 0.9).is_err());
    let zero = StructuredP::Diagonal { p1: 0.0, p2: 0.0 };
    let opts = RunOptions { iters: 50, trials: 100, seed: 1, init: TableInit::Zero };
    let t = run_method(Method::Saga, &q, 0.1, &zero, &opts).unwrap();
    assert!(matches!(empirical_rate(&t, 0.9), Err(jumplmi::Error::DegenerateTrace(_))));
}
