use faer::Mat;
use fermionic_entropy::fock::*;
use fermionic_entropy::gaussian::*;
use fermionic_entropy::linalg::{eigh, eigvalsh, max_abs};
use fermionic_entropy::random::random_unitary;
use fermionic_entropy::spectral::{eta, subsystem_entropy, von_neumann_entropy};
use fermionic_entropy::{ProjectorSpec, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fock_hamiltonian(h: &QuadraticHamiltonian) -> Mat<C64> {
    let ops = build_mode_operators(h.n_sites()).unwrap();
    ops.quadratic_hamiltonian(h.hopping(), h.pairing()).unwrap()
}

fn fock_ground(h: &QuadraticHamiltonian) -> FockOperator {
    let (_, v) = eigh(fock_hamiltonian(h).as_ref()).unwrap();
    let psi: Vec<C64> = (0..v.nrows()).map(|i| v[(i, 0)]).collect();
    FockOperator::pure(h.n_sites(), &psi).unwrap()
}

/// `Γ = (1 + iJ)/2`, i.e. `⟨Φ_a Φ†_b⟩`.
fn correlation(k: &KahlerData) -> Mat<C64> {
    let dim = k.j.nrows();
    Mat::from_fn(dim, dim, |a, b| {
        let id = if a == b { 1.0 } else { 0.0 };
        (C64::new(id, 0.0) + C64::new(0.0, 1.0) * k.j[(a, b)]) * 0.5
    })
}

#[test]
fn bdg_spectrum_matches_fock_diagonalization() {
    let h = kitaev_chain(4, 1.0, 1.0, 1.0, Boundary::Open).unwrap();
    let fock = eigvalsh(fock_hamiltonian(&h).as_ref()).unwrap();
    let bdg = eigvalsh(h.bdg_matrix().as_ref()).unwrap();
    let quasi = &bdg[4..];
    let e0 = h.ground_energy().unwrap();
    let mut many_body: Vec<f64> = (0..16usize)
        .map(|s| e0 + (0..4).filter(|k| s >> k & 1 == 1).map(|k| quasi[k]).sum::<f64>())
        .collect();
    many_body.sort_by(f64::total_cmp);
    for (a, b) in fock.iter().zip(&many_body) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn ground_energy_matches_fock() {
    for (n, mu, t, delta, bc) in [
        (6, 1.0, 1.0, 0.5, Boundary::Open),
        (5, -0.3, 0.8, 1.1, Boundary::Periodic),
        (6, 0.5, 1.0, 0.0, Boundary::Open),
    ] {
        let h = kitaev_chain(n, mu, t, delta, bc).unwrap();
        let fock = eigvalsh(fock_hamiltonian(&h).as_ref()).unwrap()[0];
        assert!((h.ground_energy().unwrap() - fock).abs() < 1e-9);
    }
}

#[test]
fn thermal_correlations_match_fock_gibbs_state() {
    for delta in [0.0, 0.5] {
        let h = kitaev_chain(5, 0.3, 1.0, delta, Boundary::Open).unwrap();
        let beta = 2.0;
        let state = thermal_state(&h, beta).unwrap();
        let w = FockOperator::gibbs(5, fock_hamiltonian(&h).as_ref(), beta).unwrap();
        let d = two_point_matrix(&w).unwrap();
        let pairs = pairing_matrix(&w).unwrap();
        let gamma = correlation(&state.kahler);
        for i in 0..5 {
            for j in 0..5 {
                assert!((gamma[(i + 5, j + 5)] - d.as_mat()[(i, j)]).norm() < 1e-9);
                assert!((gamma[(i, j + 5)] - pairs[(i, j)]).norm() < 1e-9);
            }
        }
        assert!((entropy_from_j(&state.kahler).unwrap() - fock_entropy(&w).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn restricted_entropy_matches_fock_partial_trace() {
    let h = kitaev_chain(8, 1.0, 1.0, 0.5, Boundary::Open).unwrap();
    let state = ground_state(&h).unwrap();
    let w = fock_ground(&h);
    for sites in [vec![0, 1, 2, 3], vec![2, 5], vec![7]] {
        let fock = fock_entropy(&partial_trace(&w, &sites).unwrap()).unwrap();
        let local = entropy_from_j(&restrict_subsystem(&state.kahler, &sites).unwrap()).unwrap();
        assert!((fock - local).abs() < 1e-9, "{sites:?}: {fock} vs {local}");
    }
}

#[test]
fn number_preserving_subsystems_agree_across_formalisms() {
    for beta in [0.0, 1.0, f64::INFINITY] {
        let h = kitaev_chain(6, 0.4, 1.0, 0.0, Boundary::Open).unwrap();
        let state = thermal_state(&h, beta).unwrap();
        let d = pp_density(&state.kahler).unwrap();
        assert!((entropy_from_j(&state.kahler).unwrap() - von_neumann_entropy(&d).unwrap()).abs() < 1e-9);
        for sites in [vec![0, 1, 2], vec![1, 4], vec![5]] {
            let sub = restrict_subsystem(&state.kahler, &sites).unwrap();
            let local = von_neumann_entropy(&d.compress(&sites).unwrap()).unwrap();
            assert!((entropy_from_j(&sub).unwrap() - local).abs() < 1e-9);
            if beta.is_infinite() {
                let s = subsystem_entropy(&d, &ProjectorSpec::Indices(sites.clone())).unwrap();
                assert!((s - local).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn structural_invariants_hold() {
    for (delta, beta) in [(0.0, 0.7), (0.5, 0.7), (0.5, f64::INFINITY), (1.0, 3.0)] {
        let h = kitaev_chain(6, 0.9, 1.0, delta, Boundary::Open).unwrap();
        let s = thermal_state(&h, beta).unwrap();
        let k = &s.kahler;
        assert!(k.j_defect() < 1e-10);
        let spec = k.j_squared_spectrum().unwrap();
        assert!(spec[0] >= -1.0 - 1e-9 && spec[spec.len() - 1] <= 1e-9);
        if beta.is_infinite() {
            assert!(k.purity_defect() < 1e-8);
        }
        let (a, b) = s.modes.transform.defects();
        assert!(a < 1e-10 && b < 1e-10);
        let additive: f64 = s.modes.mode_entropies().iter().sum();
        assert!((entropy_from_j(k).unwrap() - additive).abs() < 1e-10);

        // iJ has eigenvalues ±tanh β_i
        let mut from_j = k.i_j().unwrap().eigenvalues().unwrap();
        let mut from_beta: Vec<f64> = s.modes.betas.iter().flat_map(|b| [b.tanh(), -b.tanh()]).collect();
        from_j.sort_by(f64::total_cmp);
        from_beta.sort_by(f64::total_cmp);
        for (x, y) in from_j.iter().zip(&from_beta) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn cold_thermal_state_approaches_ground_state() {
    let h = kitaev_chain(5, 0.5, 1.0, 0.7, Boundary::Open).unwrap();
    let gap = eigvalsh(h.bdg_matrix().as_ref()).unwrap()[5];
    let cold = thermal_state(&h, 50.0 / gap).unwrap();
    let ground = ground_state(&h).unwrap();
    assert!(max_abs((&cold.kahler.j - &ground.kahler.j).as_ref()) < 1e-8);
    let huge = thermal_state(&h, 2e6).unwrap();
    assert!(max_abs((&huge.kahler.j - &ground.kahler.j).as_ref()) == 0.0);
}

#[test]
fn number_operator_is_invariant_under_unitary_mode_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=6 {
        let u = random_unitary(n, &mut rng);
        let ops = build_mode_operators(n).unwrap();
        let dim = 1 << n;
        let dense_a: Vec<Mat<C64>> = ops.annihilation.iter().map(|a| a.to_dense()).collect();
        let mut total = Mat::<C64>::zeros(dim, dim);
        for i in 0..n {
            let mut a = Mat::<C64>::zeros(dim, dim);
            for j in 0..n {
                a += &dense_a[j] * faer::Scale(u[(i, j)]);
            }
            total += a.adjoint() * &a;
        }
        assert!(max_abs((&total - ops.number_operator()).as_ref()) < 1e-12);
    }
}

#[test]
fn mode_entropy_is_eta_of_occupation() {
    let h = kitaev_chain(4, 0.2, 1.0, 0.0, Boundary::Open).unwrap();
    let s = thermal_state(&h, 1.3).unwrap();
    assert_eq!(s.modes.convention, OccupationConvention::ParticleLevels);
    for (f, e) in s.modes.occupations.iter().zip(s.modes.mode_entropies()) {
        assert_eq!(eta(*f), e);
    }
}
