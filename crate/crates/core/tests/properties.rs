use faer::Mat;
use fermionic_entropy::cfs::{causal_classify, kappa_lagrangian, SpacetimePointOp};
use fermionic_entropy::linalg::{eigh, max_abs, spectral_map};
use fermionic_entropy::random::{random_density, random_density_with_spectrum, random_projector, random_unitary};
use fermionic_entropy::spectral::*;
use fermionic_entropy::{HermitianOperator, ProjectorSpec, RelativeEntropy};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sqrt_op(a: &HermitianOperator) -> Mat<fermionic_entropy::C64> {
    let (v, b) = eigh(a.as_mat()).unwrap();
    spectral_map(&v, b.as_ref(), |x| x.max(0.0).sqrt())
}

#[test]
fn eta_is_symmetric_on_a_fine_grid() {
    let n = 10_000;
    for i in 0..=n {
        let x = i as f64 / n as f64;
        assert!((eta(x) - eta(1.0 - x)).abs() < 1e-15, "x = {x}");
    }
}

/// Hermitian operator with `pos` positive and `neg` negative eigenvalues.
fn point_op(r: &mut ChaCha8Rng, dim: usize, pos: usize, neg: usize, spin: usize) -> SpacetimePointOp {
    let mut values = vec![0.0; dim];
    for v in values.iter_mut().take(pos) {
        *v = r.random_range(0.1..2.0);
    }
    for v in values.iter_mut().skip(pos).take(neg) {
        *v = -r.random_range(0.1..2.0);
    }
    SpacetimePointOp::new(random_density_with_spectrum(&values, r), spin).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn entropies_are_unitarily_invariant(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let d = random_density(n, 0.0, 1.0, &mut r);
        let d2 = random_density(n, 0.05, 0.95, &mut r);
        let u = random_unitary(n, &mut r);
        let ud = d.conjugate_by(u.as_ref()).unwrap();
        let ud2 = d2.conjugate_by(u.as_ref()).unwrap();
        prop_assert!((von_neumann_entropy(&d).unwrap() - von_neumann_entropy(&ud).unwrap()).abs() < 1e-10);
        for kappa in [0.5, 2.0, 3.0] {
            let a = renyi_entropy(&d, kappa).unwrap();
            let b = renyi_entropy(&ud, kappa).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }
        let rel = relative_entropy(&d, &d2).unwrap().as_f64();
        let urel = relative_entropy(&ud, &ud2).unwrap().as_f64();
        prop_assert!((rel - urel).abs() < 1e-9, "{} vs {}", rel, urel);
        // a subsystem given as a range operator transforms with the state
        let p = random_projector(n, n.div_ceil(2), &mut r);
        let up = p.conjugate_by(u.as_ref()).unwrap();
        let s = subsystem_entropy(&d, &ProjectorSpec::Operator(p)).unwrap();
        let us = subsystem_entropy(&ud, &ProjectorSpec::Operator(up)).unwrap();
        prop_assert!((s - us).abs() < 1e-9);
    }

    #[test]
    fn renyi_is_continuous_at_kappa_one(seed in any::<u64>(), n in 1usize..8) {
        let d = random_density(n, 0.0, 1.0, &mut rng(seed));
        let s = von_neumann_entropy(&d).unwrap();
        for kappa in [1.0 - 1e-4, 1.0 + 1e-4] {
            prop_assert!((renyi_entropy(&d, kappa).unwrap() - s).abs() <= 1e-3 * (1.0 + s));
        }
    }

    #[test]
    fn von_neumann_entropy_is_nonnegative(seed in any::<u64>(), n in 1usize..8, rank in 0usize..8) {
        let mut r = rng(seed);
        prop_assert!(von_neumann_entropy(&random_density(n, 0.0, 1.0, &mut r)).unwrap() >= 0.0);
        let p = random_projector(n, rank.min(n), &mut r);
        prop_assert!(von_neumann_entropy(&p).unwrap().abs() < 1e-10);
    }

    #[test]
    fn klein_inequality(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let a = random_density(n, 0.02, 0.98, &mut r);
        let b = random_density(n, 0.02, 0.98, &mut r);
        let v = relative_entropy(&a, &b).unwrap();
        prop_assert!(matches!(v, RelativeEntropy::Finite(x) if x > 1e-10));
        prop_assert!(relative_entropy(&a, &a).unwrap().as_f64().abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn chi_v_round_trip(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let sigma = random_density(n, 0.05, 1.0, &mut r);
        // σ_V = σ^{1/2} C σ^{1/2} with 0 ≤ C ≤ 1 is an ordered pair
        let c = random_density(n, 0.0, 1.0, &mut r);
        let root = sqrt_op(&sigma);
        let sigma_v = HermitianOperator::with_tolerance(&root * c.as_mat() * &root, 1e-10).unwrap();
        let chi = chi_v_operator(&sigma, &sigma_v, CLAMP_TOL).unwrap();
        let back = &root * chi.as_mat() * chi.as_mat() * &root;
        prop_assert!(max_abs((back - sigma_v.as_mat()).as_ref()) <= 1e-8 * sigma_v.max_abs().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn causal_structure_is_symmetric(
        seed in any::<u64>(),
        spin in 1usize..3,
        px in 0usize..3, nx in 0usize..3, py in 0usize..3, ny in 0usize..3,
        kappa in 0.0f64..2.0,
    ) {
        let mut r = rng(seed);
        let dim = 6;
        let x = point_op(&mut r, dim, px.min(spin), nx.min(spin), spin);
        let y = point_op(&mut r, dim, py.min(spin), ny.min(spin), spin);
        prop_assert_eq!(causal_classify(&x, &y, 1e-8).unwrap(), causal_classify(&y, &x, 1e-8).unwrap());
        let lxy = kappa_lagrangian(&x, &y, kappa).unwrap();
        let lyx = kappa_lagrangian(&y, &x, kappa).unwrap();
        prop_assert!((lxy.total() - lyx.total()).abs() <= 1e-12 * lxy.total().max(1.0));
        prop_assert!(lxy.spread >= 0.0 && lxy.kappa_term >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn gaussian_states_are_admissible(
        n in 2usize..8,
        mu in -3.0f64..3.0,
        delta in prop_oneof![Just(0.0), -1.5f64..1.5],
        beta in prop_oneof![Just(f64::INFINITY), 0.0f64..5.0],
        periodic in any::<bool>(),
        seed in any::<u64>(),
    ) {
        use fermionic_entropy::gaussian::*;
        let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
        let h = kitaev_chain(n, mu, 1.0, delta, boundary).unwrap();
        let state = if beta.is_infinite() { ground_state(&h) } else { thermal_state(&h, beta) }.unwrap();
        let j2 = state.kahler.j_squared_spectrum().unwrap();
        prop_assert!(j2.iter().all(|&x| (-1.0 - 1e-9..=1e-9).contains(&x)), "{:?}", j2);
        let (a, b) = state.modes.transform.defects();
        prop_assert!(a < 1e-10 && b < 1e-10);
        let s = entropy_from_j(&state.kahler).unwrap();
        let additive: f64 = state.modes.mode_entropies().iter().sum();
        prop_assert!((s - additive).abs() < 1e-9);
        if delta == 0.0 {
            let d = pp_density(&state.kahler).unwrap();
            let sites = fermionic_entropy::random::random_subset(n, n / 2, &mut rng(seed));
            let restricted = restrict_subsystem(&state.kahler, &sites).unwrap();
            let terms = subsystem_entropy_terms(&d, &ProjectorSpec::Indices(sites)).unwrap();
            let s_j = entropy_from_j(&restricted).unwrap();
            // the restricted state's entropy is the localized term; the bulk
            // term only vanishes for pure states
            prop_assert!((s_j - terms.localized).abs() < 1e-9);
            if beta.is_infinite() {
                prop_assert!((s_j - terms.entropy()).abs() < 1e-9);
            }
        }
    }
}
