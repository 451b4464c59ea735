use jumplmi::function_classes::{AssumptionProfile, IndividualAssumption};
use jumplmi::jump_models::{JumpRealization, Method};
use jumplmi::lmi::*;

fn profile(method: Method, a: IndividualAssumption, m: f64, l: f64) -> AssumptionProfile<f64> {
    match method {
        Method::Sdca => AssumptionProfile::sdca(a, m, l).unwrap(),
        _ => AssumptionProfile::primal(a, m, l).unwrap(),
    }
}

fn sample_p(method: Method) -> StructuredP<f64> {
    match method {
        Method::Saga | Method::Sag => StructuredP::Diagonal { p1: 0.8, p2: 2.5 },
        Method::Finito => StructuredP::Finito { p1: 0.9, p2: 0.3, p3: -0.07, p4: 1.1, p5: 0.02 },
        Method::Sdca => StructuredP::Sdca { p1: 1.7, p2: -0.1 },
    }
}

#[test]
fn closed_form_structure_matches_summation() {
    for method in Method::ALL {
        for a in IndividualAssumption::ALL {
            for n in [2usize, 3, 7] {
                let r = JumpRealization::build(method, n, 0.13, Some(0.05)).unwrap();
                let prof = profile(method, a, 0.05, 1.3);
                let rate = Rate::from_rho2(0.97);
                let pt = sample_p(method);
                let mult = MultiplierPair::new(0.4, 0.7);
                let full = full_lmi(&r, &prof, rate, &pt.matrix(n), &mult).unwrap();
                let s = closed_form_structure(&r, &prof, rate, &pt, &mult).unwrap();
                let diff = s.expand(n).max_abs_diff(&full);
                assert!(diff < 1e-12, "{method} {a} n={n}: {diff}");
            }
        }
    }
}

#[test]
fn printed_forms_are_rescaled_reductions() {
    // The reduced bundle and the block reduction of the full condition must
    // agree on the sign of every eigenvalue (Sylvester inertia under congruence).
    let n = 5;
    for method in [Method::Saga, Method::Finito, Method::Sdca] {
        for a in IndividualAssumption::ALL {
            let r = JumpRealization::build(method, n, 0.11, Some(0.05)).unwrap();
            let prof = profile(method, a, 0.05, 1.0);
            let rate = Rate::from_rho2(0.9);
            let pt = sample_p(method);
            let mult = MultiplierPair::new(0.3, 0.2);
            let s = closed_form_structure(&r, &prof, rate, &pt, &mult).unwrap();
            let mut red = s.reduce(n);
            if method == Method::Saga {
                // the decoupled x entry also sits on the diagonal of the mean block
                red[0] = red[0].principal_submatrix(&[0, 2]);
            }
            let inertia = |b: &jumplmi::SymMatrix<f64>| -> usize {
                b.eigenvalues().unwrap().iter().filter(|x| **x > 0.0).count()
            };
            let bundle = structured_bundle(&r, &prof, rate, &pt, &mult).unwrap();
            let ours: Vec<usize> = red.iter().map(inertia).collect();
            let theirs: Vec<usize> = bundle.nsd_blocks.iter().map(inertia).collect();
            assert_eq!(ours, theirs, "{method} {a}");
        }
    }
}
