use std::f64::consts::PI;

use faer::Mat;
use fermionic_entropy::dirac::*;
use fermionic_entropy::linalg::{eigvalsh_real, max_abs};
use fermionic_entropy::{Error, RelativeEntropy, C64};

/// `K_ν(x) = ∫₀^∞ e^{-x cosh t} cosh(νt) dt`, trapezoid rule (spectrally
/// accurate for this analytic, rapidly decaying integrand).
fn bessel_k(nu: f64, x: f64) -> f64 {
    let dt = 1e-3;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = dt;
    loop {
        let term = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-300 || t > 50.0 {
            break;
        }
        t += dt;
    }
    sum * dt
}

fn config(mass: f64, epsilon: f64, half_width: Option<f64>) -> DiracConfig {
    DiracConfig::resolved(mass, epsilon, 1.0, half_width, &Resolution::default())
}

#[test]
fn bessel_oracle_is_sane() {
    // K_{1/2}(x) = √(π/2x) e^{-x}
    for x in [0.3, 1.0, 4.0] {
        let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
        assert!((bessel_k(0.5, x) - want).abs() < 1e-13 * want.max(1.0));
    }
}

#[test]
fn kernel_profile_matches_closed_form() {
    let (m, eps) = (5.0, 1.0 / 8.0);
    let kernel = projector_kernel(&config(m, eps, None)).unwrap();
    let h = kernel.grid.h;
    let p = &kernel.profile;
    let scale = p.a[0];
    for j in [0usize, 1, 2, 5, 17, 40, 95] {
        let d = j as f64 * h;
        let r = d.hypot(eps);
        let k1 = bessel_k(1.0, m * r);
        let a = m * eps * k1 / (2.0 * PI * r);
        let mc = m / PI * bessel_k(0.0, m * r);
        let s = m / PI * d * k1 / r;
        for (got, want) in [(p.a[j], a), (p.mc[j], mc), (p.s[j], s)] {
            assert!((got - want).abs() < 1e-9 * scale, "offset {j}: {got} vs {want}");
        }
    }
}

#[test]
fn coincidence_trace_matches_independent_quadrature() {
    let (m, eps) = (5.0, 1.0 / 16.0);
    let cfg = config(m, eps, None);
    let kernel = projector_kernel(&cfg).unwrap();
    let h = kernel.grid.h;
    let block_trace = (kernel.chiral_entry(0, 0, 0) + kernel.chiral_entry(0, 1, 1)).re / h;
    // tr Π(k) = 1, so the trace is ∫_{-K}^{K} e^{-εω} dk / 2π; composite Simpson
    let n = 10 * cfg.k_points;
    let dk = cfg.k_cutoff / n as f64;
    let f = |k: f64| (-eps * (k * k + m * m).sqrt()).exp();
    let mut simpson = f(0.0) + f(cfg.k_cutoff);
    for i in 1..n {
        simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * dk);
    }
    let quad = 2.0 * simpson * dk / 3.0 / (2.0 * PI);
    assert!((block_trace - quad).abs() < 1e-9 * quad, "{block_trace} vs {quad}");
    let bessel = m * bessel_k(1.0, m * eps) / PI;
    assert!((block_trace - bessel).abs() < 1e-8 * bessel);
}

#[test]
fn real_basis_is_a_rotation_of_the_chiral_kernel() {
    let kernel = projector_kernel(&config(10.0, 1.0 / 4.0, Some(0.5))).unwrap();
    let n = kernel.n_points();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // R = (1 - iσ_x)/√2 on every site
    let r = Mat::from_fn(2 * n, 2 * n, |a, b| {
        if a / 2 != b / 2 {
            C64::new(0.0, 0.0)
        } else if a == b {
            C64::new(s, 0.0)
        } else {
            C64::new(0.0, -s)
        }
    });
    let chiral = kernel.chiral_dense();
    let rotated = &r * &chiral * r.adjoint();
    let real = kernel.real_dense();
    let diff = Mat::from_fn(2 * n, 2 * n, |a, b| rotated[(a, b)] - C64::new(real[(a, b)], 0.0));
    assert!(max_abs(diff.as_ref()) < 1e-14);
    // Hermitian, block-Toeplitz, spectrum within the clamp band
    assert!(max_abs((&chiral - chiral.adjoint()).as_ref()) < 1e-14);
    for a in 0..2 * n - 2 {
        for b in 0..2 * n - 2 {
            assert_eq!(chiral[(a, b)], chiral[(a + 2, b + 2)]);
        }
    }
    let ev = eigvalsh_real(real.as_ref()).unwrap();
    assert!(ev[0] > -KERNEL_CLAMP_TOL && ev[ev.len() - 1] < 1.0 + KERNEL_CLAMP_TOL);
}

#[test]
fn huge_regularization_kills_the_kernel() {
    let cfg = config(5.0, 20.0, None);
    let kernel = projector_kernel(&cfg).unwrap();
    assert!(max_abs(kernel.real_dense().as_ref()) < 1e-30);
    assert!(diamond_entropy(&cfg).unwrap().entropy.abs() < 1e-30);
}

#[test]
fn whole_and_empty_regions_have_zero_entropy() {
    let kernel = projector_kernel(&config(5.0, 1.0 / 8.0, None)).unwrap();
    let n = kernel.n_points();
    for method in [Method::Auto, Method::Dense] {
        let whole = region_entropy(&kernel, Interval { start: 0, len: n }, method).unwrap();
        assert!(whole.entropy.abs() < 1e-10, "{whole:?}");
        assert!(whole.interior_term > 0.0);
        let empty = region_entropy(&kernel, Interval { start: 7, len: 0 }, method).unwrap();
        assert_eq!(empty.entropy, 0.0);
    }
}

#[test]
fn parity_sectors_match_the_dense_path() {
    let kernel = projector_kernel(&config(5.0, 1.0 / 8.0, None)).unwrap();
    let region = kernel.grid.diamond();
    let fast = region_entropy(&kernel, region, Method::Auto).unwrap();
    let dense = region_entropy(&kernel, region, Method::Dense).unwrap();
    assert!((fast.interior_term - dense.interior_term).abs() < 1e-10);
    assert!((fast.bulk_term - dense.bulk_term).abs() < 1e-10);
    assert!(fast.bulk_term > 0.0 && fast.bulk_term < fast.interior_term, "{fast:?}");
    assert!(fast.entropy > 0.0);
}

#[test]
fn entropy_is_translation_invariant() {
    let kernel = projector_kernel(&config(10.0, 1.0 / 8.0, Some(3.0))).unwrap();
    let centred = region_entropy(&kernel, kernel.grid.diamond(), Method::Auto).unwrap();
    for shift in [-5isize, -1, 3, 8] {
        let region = Interval {
            start: (kernel.grid.n_left as isize + shift) as usize,
            len: kernel.grid.n_inside,
        };
        let moved = region_entropy(&kernel, region, Method::Dense).unwrap();
        assert!(
            (moved.entropy - centred.entropy).abs() < 1e-8,
            "shift {shift}: {} vs {}",
            moved.entropy,
            centred.entropy
        );
    }
}

#[test]
fn doubling_the_domain_changes_little() {
    let cfg = config(5.0, 1.0 / 8.0, None);
    let wide = config(5.0, 1.0 / 8.0, Some(2.0 * cfg.domain_half_width));
    let s = diamond_entropy(&cfg).unwrap().entropy;
    let s2 = diamond_entropy(&wide).unwrap().entropy;
    assert!((s - s2).abs() < 0.01 * s, "{s} vs {s2}");
}

#[test]
fn entropy_grows_as_regularization_shrinks() {
    let s: Vec<f64> = [1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0]
        .iter()
        .map(|&e| diamond_entropy(&config(5.0, e, None)).unwrap().entropy)
        .collect();
    assert!(s[0] < s[1] && s[1] < s[2], "{s:?}");
}

#[test]
fn invariant_violations_are_errors() {
    let good = config(5.0, 1.0 / 8.0, None);
    let mut coarse = good.clone();
    coarse.epsilon /= 2.0;
    coarse.k_cutoff *= 2.0;
    assert!(matches!(diamond_entropy(&coarse), Err(Error::InvalidConfig(_))));
    let mut narrow = good.clone();
    narrow.domain_half_width = 0.5;
    assert!(matches!(diamond_entropy(&narrow), Err(Error::InvalidConfig(_))));
    let mut tail = good.clone();
    tail.k_cutoff = 20.0 / tail.epsilon;
    assert!(matches!(projector_kernel(&tail), Err(Error::QuadratureUnderResolved { .. })));
    let mut huge = good;
    huge.domain_half_width = 300.0;
    assert!(matches!(projector_kernel(&huge), Err(Error::InvalidConfig(_))));
}

#[test]
fn short_or_frozen_ladders() {
    let base = config(5.0, 1.0 / 8.0, None);
    let short = [0.2, 0.1, 0.05, 0.025];
    assert!(matches!(
        area_law_sweep(&base, &short, &SweepOptions::default(), |_, _| {}),
        Err(Error::LadderTooShort { len: 4, .. })
    ));
    let eps = [0.5, 0.25, 0.125, 0.0625, 0.03125];
    let fit = fit_area_law(&eps, &[0.7; 5]).unwrap();
    assert!(fit.non_scaling && !fit.monotone);
    assert!(fit.fit.slope.abs() < 1e-12);
    assert_eq!(fit.window, (2, 5));
}

#[test]
fn smoke_sweep_reports_slope_and_flags() {
    let base = config(5.0, 1.0 / 4.0, None);
    let ladder = geometric_ladder(1.0 / 4.0, 1.0 / 16.0, std::f64::consts::FRAC_1_SQRT_2);
    assert_eq!(ladder.len(), 5);
    let opts = SweepOptions {
        max_concurrent: 2,
        ..SweepOptions::default()
    };
    let mut seen = Vec::new();
    let sweep = area_law_sweep(&base, &ladder, &opts, |i, _| seen.push(i)).unwrap();
    assert_eq!(seen, vec![0, 1, 2, 3, 4]);
    assert!(sweep.fit.monotone && !sweep.fit.non_scaling);
    assert!(sweep.fit.fit.slope > 0.0);
    assert!(sweep.points.iter().all(|p| p.converged.is_some()));
    assert_eq!(sweep.mass_lambda, 5.0);
    // deterministic regardless of concurrency
    let serial = area_law_sweep(&base, &ladder, &SweepOptions::default(), |_, _| {}).unwrap();
    assert_eq!(serial, sweep);
}

fn packet(k: f64, x: f64) -> WavePacket {
    WavePacket {
        k_center: k,
        k_width: 8.0,
        x_center: x,
    }
}

#[test]
fn unmodified_state_has_zero_relative_entropy() {
    let cfg = config(5.0, 1.0 / 4.0, None);
    for scope in [RelativeScope::Diamond, RelativeScope::FullSpace] {
        let r = finite_particle_relative_entropy(&cfg, &[], &[], scope).unwrap();
        assert!(r.as_f64().abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn inside_excitation_beats_outside_excitation() {
    let cfg = config(5.0, 1.0 / 4.0, None);
    let inside = finite_particle_relative_entropy(&cfg, &[packet(4.0, 0.5)], &[], RelativeScope::Diamond)
        .unwrap()
        .as_f64();
    let outside = finite_particle_relative_entropy(&cfg, &[packet(4.0, -0.6)], &[], RelativeScope::Diamond)
        .unwrap()
        .as_f64();
    assert!(inside > outside && outside >= 0.0, "{inside} vs {outside}");
    let removal = finite_particle_relative_entropy(&cfg, &[], &[packet(-4.0, 0.5)], RelativeScope::Diamond)
        .unwrap()
        .as_f64();
    assert!(removal > 0.0);
}

#[test]
fn full_space_excitation_is_finite_and_stable_in_the_domain() {
    let values: Vec<f64> = [None, Some(1.5), Some(2.0)]
        .into_iter()
        .map(|l| {
            let r = finite_particle_relative_entropy(
                &config(5.0, 1.0 / 4.0, l),
                &[packet(4.0, 0.5)],
                &[],
                RelativeScope::FullSpace,
            )
            .unwrap();
            match r {
                RelativeEntropy::Finite(v) => v,
                RelativeEntropy::Infinite => panic!("full-space relative entropy diverged"),
            }
        })
        .collect();
    assert!(values[0] > 0.0);
    for v in &values[1..] {
        assert!((v - values[0]).abs() < 0.01 * values[0], "{values:?}");
    }
}

#[test]
fn dependent_packets_are_rejected() {
    let cfg = config(5.0, 1.0 / 4.0, None);
    let p = packet(4.0, 0.5);
    assert!(matches!(
        finite_particle_relative_entropy(&cfg, &[p, p], &[], RelativeScope::Diamond),
        Err(Error::InvalidConfig(_))
    ));
}
