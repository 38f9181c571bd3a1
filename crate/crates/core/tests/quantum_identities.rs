use nonlocal_core::model::{behavior_from_quantum, pad_functional, pair, BellFunctional, QuantumModel, QuantumState, Scenario};
use nonlocal_core::quantum::{bell_operator, dimension_witness_report, seesaw, violation_report, SeesawConfig};
use nonlocal_core::solvers::linalg::orthonormal_columns;
use nonlocal_core::solvers::{GaussianSampler, Matrix, RngStream};
use nonlocal_core::Settings;
use proptest::prelude::*;

fn random_povms(g: &mut GaussianSampler, d: usize, inputs: usize, outputs: usize, keep: f64) -> Vec<Vec<Matrix>> {
    (0..inputs)
        .map(|_| {
            let basis = orthonormal_columns(&g.matrix(d, d));
            let mut elems = vec![Matrix::zeros(d, d); outputs];
            for j in 0..d {
                let v = basis.column(j);
                elems[j % outputs].add_scaled(keep, &Matrix::outer(&v, &v));
            }
            elems.into_iter().map(|e| e.symmetrized()).collect()
        })
        .collect()
}

fn random_model(g: &mut GaussianSampler, d: usize, inputs: usize, outputs: usize, keep: f64) -> QuantumModel {
    QuantumModel {
        dim_a: d,
        dim_b: d,
        state: QuantumState::Pure(g.unit_vector(d * d)),
        alice: random_povms(g, d, inputs, outputs, keep),
        bob: random_povms(g, d, inputs, outputs, keep),
        complete: keep == 1.0,
    }
}

#[test]
fn bell_operator_expectation_equals_pairing() {
    let settings = Settings::default();
    let mut g = GaussianSampler::new(RngStream::new(21, 0));
    for i in 0..30 {
        let d = 2 + i % 2;
        let (n, k) = (2 + i % 3, 2 + (i / 3) % 2);
        let keep = if i % 2 == 0 { 1.0 } else { 0.75 };
        let model = random_model(&mut g, d, n, k, keep);
        let s = Scenario::new(n, k, false).unwrap();
        let m = BellFunctional::new(s, g.vector(s.tensor_len())).unwrap();
        let b = bell_operator(&m, &model.alice, &model.bob).unwrap();
        let QuantumState::Pure(psi) = &model.state else { unreachable!() };
        let expectation = b.quad_form(psi);
        // Incomplete models give sub-normalized behaviors: no-click carries no reward.
        let value = pair(&m, &behavior_from_quantum(&model, &settings.tol).unwrap()).unwrap();
        let completed = behavior_from_quantum(&model.completed(), &settings.tol).unwrap();
        let padded = pad_functional(&m);
        let on_completed: f64 = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .flat_map(|(x, y)| (0..k).flat_map(move |a| (0..k).map(move |b| (x, y, a, b))))
            .map(|(x, y, a, b)| padded.get(x, y, a, b) * completed.get(x, y, a, b))
            .sum();
        assert!((on_completed - value).abs() <= 1e-10 * m.max_abs().max(1.0));
        assert!((expectation - value).abs() <= 1e-10 * m.max_abs().max(1.0), "{expectation} vs {value}");
    }
}

#[test]
fn product_functionals_have_no_violation() {
    let settings = Settings::default();
    let mut g = GaussianSampler::new(RngStream::new(22, 0));
    for i in 0..6 {
        let s = Scenario::new(2 + i % 2, 2, false).unwrap();
        let f = g.vector(s.inputs * 2);
        let h = g.vector(s.inputs * 2);
        let m = BellFunctional::from_fn(s, |x, y, a, b| f[x * 2 + a] * h[y * 2 + b]);
        let cfg = SeesawConfig::new((2, 2), RngStream::new(22, 1 + i as u64)).with_restarts(6);
        let r = violation_report(&m, &cfg, &settings).unwrap();
        assert!((r.ratio - 1.0).abs() <= 1e-6, "ratio {}", r.ratio);
        // Unwarmed see-saw cannot exceed the classical value either.
        let plain = seesaw(&m, &cfg).unwrap().report.value;
        assert!(plain <= r.classical.value * (1.0 + 1e-6), "{plain} > {}", r.classical.value);
    }
}

#[test]
fn seesaw_value_is_attained_by_its_model() {
    let settings = Settings::default();
    let mut g = GaussianSampler::new(RngStream::new(23, 0));
    let s = Scenario::new(3, 2, false).unwrap();
    let m = BellFunctional::new(s, g.vector(s.tensor_len())).unwrap();
    let r = seesaw(&m, &SeesawConfig::new((2, 2), RngStream::new(23, 1)).with_restarts(5)).unwrap();
    let p = behavior_from_quantum(&r.model, &settings.tol).unwrap();
    let attained = r.sign * pair(&m, &p).unwrap();
    assert!((attained - r.report.value).abs() <= 1e-9 * m.max_abs(), "{attained} vs {}", r.report.value);
}

#[test]
fn dimension_table_for_chsh() {
    let cfg = SeesawConfig::new((1, 1), RngStream::new(24, 0)).with_restarts(5);
    let w = dimension_witness_report(&BellFunctional::chsh(), &[1, 2, 3], &cfg, &Settings::default()).unwrap();
    assert!(w.nondecreasing);
    assert!((w.rows[0].value - 2.0).abs() < 1e-9);
    assert!((w.rows[1].value - 2.0 * 2f64.sqrt()).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn violation_ratio_is_scale_invariant(
        coeffs in prop::collection::vec(-2.0f64..2.0, 16),
        exp in -3i32..4,
        c in 0.05f64..20.0,
    ) {
        let settings = Settings::default();
        let m = BellFunctional::new(Scenario::chsh(), coeffs).unwrap();
        prop_assume!(m.max_abs() > 1e-3);
        let cfg = SeesawConfig::new((2, 2), RngStream::new(25, 0)).with_restarts(3);
        let base = violation_report(&m, &cfg, &settings).unwrap().ratio;
        // Powers of two commute with every rounding step.
        let pow2 = violation_report(&m.scaled(2f64.powi(exp)), &cfg, &settings).unwrap().ratio;
        prop_assert_eq!(base, pow2);
        let other = violation_report(&m.scaled(-c), &cfg, &settings).unwrap().ratio;
        prop_assert!((base - other).abs() <= 1e-9, "{} vs {}", base, other);
    }
}
