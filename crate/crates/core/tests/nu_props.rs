use nonlocal_core::local::{check_equivalence, local_points, nu_of_behavior, pi_robustness, random_nonsignalling_behavior};
use nonlocal_core::model::tensor::{chsh_tsirelson_behavior, pr_box, uniform_behavior};
use nonlocal_core::model::{mix_detector_noise, Behavior, Provenance, Scenario};
use nonlocal_core::solvers::RngStream;
use nonlocal_core::Settings;
use proptest::prelude::*;

fn mix(w: f64, p: &Behavior, q: &Behavior) -> Behavior {
    Behavior::combination(&[(w, p), (1.0 - w, q)], Provenance::NonsignallingRaw).unwrap()
}

#[test]
fn pr_box_and_tsirelson_values() {
    let settings = Settings::default();
    // CHSH witness: ⟨CHSH, PR⟩ = 4 against a local maximum of 2 gives ν ≥ 2,
    // and (PR − ½(L₁ + L₂)) decompositions give ν ≤ 2.
    assert!((nu_of_behavior(&pr_box(), &settings).unwrap().nu - 2.0).abs() <= 1e-9);
    let ts = nu_of_behavior(&chsh_tsirelson_behavior(), &settings).unwrap().nu;
    assert!((ts - 2f64.sqrt()).abs() <= 1e-8, "{ts}");
}

#[test]
fn local_mixtures_have_unit_nu() {
    let settings = Settings::default();
    let s = Scenario::chsh();
    let points = local_points(&s, 16).unwrap();
    let behaviors: Vec<Behavior> = points.iter().map(|pt| pt_behavior(s, &pt.alice, &pt.bob)).collect();
    let terms: Vec<(f64, &Behavior)> = behaviors.iter().enumerate().map(|(i, b)| ((i + 1) as f64 / 136.0, b)).collect();
    let p = Behavior::combination(&terms, Provenance::Local).unwrap();
    assert!((nu_of_behavior(&p, &settings).unwrap().nu - 1.0).abs() <= 1e-9);
    assert!((pi_robustness(&p, &settings).unwrap().pi - 1.0).abs() <= 1e-8);
    assert!((nu_of_behavior(&uniform_behavior(s), &settings).unwrap().nu - 1.0).abs() <= 1e-9);
}

fn pt_behavior(s: Scenario, a: &[usize], b: &[usize]) -> Behavior {
    Behavior::from_fn(s, Provenance::Local, |x, y, i, j| f64::from(u8::from(a[x] == i && b[y] == j)))
}

#[test]
fn detector_noise_keeps_nu_at_least_one() {
    let settings = Settings::default();
    for eta in [0.5, 0.8, 0.95, 1.0] {
        let p = mix_detector_noise(&chsh_tsirelson_behavior(), eta).unwrap();
        let nu = nu_of_behavior(&p, &settings).unwrap().nu;
        assert!(nu >= 1.0 - 1e-9, "eta {eta}: {nu}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn equivalence_holds(seed in any::<u64>()) {
        let p = random_nonsignalling_behavior(RngStream::new(seed, 0));
        let e = check_equivalence(&p, &Settings::default()).unwrap();
        prop_assert!(e.residual <= 1e-5, "{}", e.residual);
        prop_assert!(e.nu.nu >= 1.0 - 1e-9);
        prop_assert!(e.pi.pi > 0.0 && e.pi.pi <= 1.0 + 1e-9);
    }

    #[test]
    fn nu_is_convex_along_noise(w in 0.0f64..1.0) {
        // Convexity: ν(w PR + (1 − w) U) ≤ w ν(PR) + (1 − w) ν(U) = 1 + w.
        let settings = Settings::default();
        let p = mix(w, &pr_box(), &uniform_behavior(Scenario::chsh()));
        let nu = nu_of_behavior(&p, &settings).unwrap().nu;
        prop_assert!(nu <= 1.0 + w + 1e-9);
        prop_assert!(nu >= 1.0 - 1e-9);
    }
}
