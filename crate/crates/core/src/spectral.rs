//! Entropy functionals of reduced one-particle density operators.
//!
//! Every matrix function goes through a full eigendecomposition. Eigenvalues
//! slightly outside `[0, 1]` (regularized kernels produce them) are clamped
//! and counted; anything beyond the clamp band is rejected.

use faer::{Mat, MatRef};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigh, spectral_map, HermitianOperator, ProjectorSpec, C64};

/// Default half-width of the band outside `[0, 1]` that is clamped silently.
pub const CLAMP_TOL: f64 = 1e-9;

/// Rényi orders closer than this to 1 are rejected.
pub const KAPPA_GUARD: f64 = 1e-6;

/// Eigenvalues of `D` closer than this to 0 or 1 make the modular operator
/// singular.
pub const MODULAR_BOUNDARY_TOL: f64 = 1e-12;

/// `η(x) = -x log x - (1-x) log(1-x)` on `(0, 1)`, zero elsewhere.
pub fn eta(x: f64) -> f64 {
    if x > 0.0 && x < 1.0 {
        -x * x.ln() - (1.0 - x) * (-x).ln_1p()
    } else {
        0.0
    }
}

pub fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidKappa { kappa });
    }
    if (kappa - 1.0).abs() < KAPPA_GUARD {
        return Err(Error::VonNeumannLimit { kappa });
    }
    Ok(())
}

/// `η_κ(x) = log(x^κ + (1-x)^κ) / (1-κ)`, with `x` clamped to `[0, 1]`.
pub fn eta_kappa(x: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(eta_kappa_unchecked(x, kappa))
}

pub(crate) fn eta_kappa_unchecked(x: f64, kappa: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    (x.powf(kappa) + (1.0 - x).powf(kappa)).ln() / (1.0 - kappa)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ClampReport {
    pub count: usize,
    pub max_magnitude: f64,
}

impl ClampReport {
    pub fn merge(self, other: ClampReport) -> ClampReport {
        ClampReport {
            count: self.count + other.count,
            max_magnitude: self.max_magnitude.max(other.max_magnitude),
        }
    }

    /// Clamps `values` into `[0, 1]` in place, failing on anything beyond
    /// `tol`.
    pub fn clamp(values: &mut [f64], tol: f64) -> Result<ClampReport> {
        let mut report = ClampReport::default();
        for (index, v) in values.iter_mut().enumerate() {
            let excess = if *v < 0.0 {
                -*v
            } else if *v > 1.0 {
                *v - 1.0
            } else {
                continue;
            };
            if !(excess <= tol) {
                return Err(Error::SpectrumOutOfRange {
                    index,
                    value: *v,
                    tolerance: tol,
                });
            }
            *v = v.clamp(0.0, 1.0);
            report.count += 1;
            report.max_magnitude = report.max_magnitude.max(excess);
        }
        Ok(report)
    }
}

/// Eigendecomposition of a one-particle density with eigenvalues in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct DensitySpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns; the first significant component of each is
    /// real and positive.
    pub basis: Mat<C64>,
    pub clamp_report: ClampReport,
}

impl DensitySpectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        HermitianOperator::from_spectrum(&self.eigenvalues, self.basis.as_ref())
            .expect("spectral reconstruction is Hermitian")
    }

    /// `f(D)` as a matrix.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat<C64> {
        spectral_map(&self.eigenvalues, self.basis.as_ref(), f)
    }

    /// `Σ_n f(d_n) ‖Q† v_n‖²`, i.e. `tr(Q† f(D) Q)` without forming `f(D)`.
    pub fn compressed_trace(&self, q: MatRef<'_, C64>, f: impl Fn(f64) -> f64) -> f64 {
        let overlap = q.adjoint() * self.basis.as_ref();
        (0..self.dim())
            .map(|n| {
                let fd = f(self.eigenvalues[n]);
                if fd == 0.0 {
                    return 0.0;
                }
                let w: f64 = (0..overlap.nrows()).map(|i| overlap[(i, n)].norm_sqr()).sum();
                fd * w
            })
            .sum()
    }
}

/// Magnitude below which a component is not used to fix an eigenvector's
/// phase.
const PHASE_SIGNIFICANCE: f64 = 1e-8;

/// Rotates each column so its first significant component is real positive.
pub(crate) fn fix_phases(basis: &mut Mat<C64>) {
    for k in 0..basis.ncols() {
        let Some(pivot) = (0..basis.nrows()).find(|&i| basis[(i, k)].norm() > PHASE_SIGNIFICANCE)
        else {
            continue;
        };
        let z = basis[(pivot, k)];
        let phase = z.conj() / z.norm();
        for i in 0..basis.nrows() {
            basis[(i, k)] *= phase;
        }
        basis[(pivot, k)] = C64::new(basis[(pivot, k)].norm(), 0.0);
    }
}

pub fn diagonalize_density(d: &HermitianOperator, clamp_tol: f64) -> Result<DensitySpectrum> {
    let (mut eigenvalues, mut basis) = eigh(d.as_mat())?;
    let clamp_report = ClampReport::clamp(&mut eigenvalues, clamp_tol)?;
    fix_phases(&mut basis);
    Ok(DensitySpectrum {
        eigenvalues,
        basis,
        clamp_report,
    })
}

/// Clamped eigenvalues only.
pub fn density_eigenvalues(d: &HermitianOperator, clamp_tol: f64) -> Result<(Vec<f64>, ClampReport)> {
    let mut values = d.eigenvalues()?;
    let report = ClampReport::clamp(&mut values, clamp_tol)?;
    Ok((values, report))
}

/// `tr η(D)`.
pub fn von_neumann_entropy(d: &HermitianOperator) -> Result<f64> {
    let (values, _) = density_eigenvalues(d, CLAMP_TOL)?;
    Ok(values.iter().map(|&x| eta(x)).sum())
}

/// `Σ_n η_κ(d_n)`, which equals `log tr(W^κ) / (1-κ)` for the quasi-free
/// Fock state `W` built from `D`.
pub fn renyi_entropy(d: &HermitianOperator, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let (values, _) = density_eigenvalues(d, CLAMP_TOL)?;
    Ok(values.iter().map(|&x| eta_kappa_unchecked(x, kappa)).sum())
}

/// The two traces making up a localized entropy `tr η(χDχ) - tr(χ η(D) χ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyTerms {
    pub localized: f64,
    pub bulk: f64,
}

impl EntropyTerms {
    pub fn entropy(&self) -> f64 {
        self.localized - self.bulk
    }
}

pub fn subsystem_entropy_terms(d: &HermitianOperator, p: &ProjectorSpec) -> Result<EntropyTerms> {
    let q = p.range_basis(d.dim())?;
    let spectrum = diagonalize_density(d, CLAMP_TOL)?;
    if q.ncols() == 0 {
        return Ok(EntropyTerms {
            localized: 0.0,
            bulk: 0.0,
        });
    }
    let compressed = d.compress_to(q.as_ref())?;
    let (local, _) = density_eigenvalues(&compressed, CLAMP_TOL)?;
    Ok(EntropyTerms {
        localized: local.iter().map(|&x| eta(x)).sum(),
        bulk: spectrum.compressed_trace(q.as_ref(), eta),
    })
}

/// `tr η(P D P) - tr(P η(D) P)` on the range of `P`.
pub fn subsystem_entropy(d: &HermitianOperator, p: &ProjectorSpec) -> Result<f64> {
    subsystem_entropy_terms(d, p).map(|t| t.entropy())
}

/// `χ_V = (σ^{-1/2} σ_V σ^{-1/2})^{1/2}` with the inverse square root taken
/// on the support of `σ` (eigenvalues above `null_tol`).
pub fn chi_v_operator(
    sigma: &HermitianOperator,
    sigma_v: &HermitianOperator,
    null_tol: f64,
) -> Result<HermitianOperator> {
    sigma.check_same_dim(sigma_v)?;
    check_ordering(sigma, sigma_v, null_tol)?;
    let (s, basis) = eigh(sigma.as_mat())?;
    let inv_sqrt = spectral_map(&s, basis.as_ref(), |x| if x > null_tol { x.sqrt().recip() } else { 0.0 });
    let inner = HermitianOperator::with_tolerance(&inv_sqrt * sigma_v.as_mat() * &inv_sqrt, 1e-8)?;
    let (m, mb) = eigh(inner.as_mat())?;
    HermitianOperator::new(spectral_map(&m, mb.as_ref(), |x| x.max(0.0).sqrt()))
}

fn check_ordering(sigma: &HermitianOperator, sigma_v: &HermitianOperator, tol: f64) -> Result<()> {
    let min_of = |op: &HermitianOperator| -> Result<f64> {
        Ok(op.eigenvalues()?.first().copied().unwrap_or(0.0))
    };
    for op in [
        sigma_v.clone(),
        sigma.sub(sigma_v)?,
        sigma.complement(),
    ] {
        let min_eigenvalue = min_of(&op)?;
        if min_eigenvalue < -tol {
            return Err(Error::OrderingViolated { min_eigenvalue });
        }
    }
    Ok(())
}

pub fn cfs_entanglement_terms(sigma: &HermitianOperator, sigma_v: &HermitianOperator) -> Result<EntropyTerms> {
    let chi = chi_v_operator(sigma, sigma_v, CLAMP_TOL)?;
    let (local, _) = density_eigenvalues(sigma_v, CLAMP_TOL)?;
    let spectrum = diagonalize_density(sigma, CLAMP_TOL)?;
    // tr(χ η(σ) χ) = Σ_n η(s_n) ‖χ e_n‖²
    let bulk = spectrum.compressed_trace(chi.as_mat(), eta);
    Ok(EntropyTerms {
        localized: local.iter().map(|&x| eta(x)).sum(),
        bulk,
    })
}

/// `tr η(σ_V) - tr(χ_V η(σ) χ_V)`.
pub fn cfs_entanglement_entropy(sigma: &HermitianOperator, sigma_v: &HermitianOperator) -> Result<f64> {
    cfs_entanglement_terms(sigma, sigma_v).map(|t| t.entropy())
}

/// Relative entropy value; infinite when the support condition fails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn finite(self) -> Option<f64> {
        match self {
            RelativeEntropy::Finite(v) => Some(v),
            RelativeEntropy::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, RelativeEntropy::Infinite)
    }

    /// `f64::INFINITY` for the infinite case.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// Eigenvalues of `D` within this distance of 0 or 1 count as exactly 0 or 1
/// for the support condition.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Weight of `D̃` above this on a null direction of `D` makes the relative
/// entropy infinite.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-10;

/// `tr[D̃(log D̃ - log D) + (1-D̃)(log(1-D̃) - log(1-D))]`, non-negative by
/// Klein's inequality.
///
/// Evaluated in the eigenbasis `u_j` of `D` through the weights
/// `⟨u_j|D̃|u_j⟩`, so only `D̃`'s eigenvalues and `D`'s eigenpairs are needed.
pub fn relative_entropy(d_tilde: &HermitianOperator, d: &HermitianOperator) -> Result<RelativeEntropy> {
    d.check_same_dim(d_tilde)?;
    let (tilde_values, _) = density_eigenvalues(d_tilde, CLAMP_TOL)?;
    let spectrum = diagonalize_density(d, CLAMP_TOL)?;
    let rotated = d_tilde.compress_to(spectrum.basis.as_ref())?;

    let neg_entropy: f64 = -tilde_values.iter().map(|&x| eta(x)).sum::<f64>();
    let mut cross = 0.0;
    for (j, &dj) in spectrum.eigenvalues.iter().enumerate() {
        let w = rotated.as_mat()[(j, j)].re.clamp(0.0, 1.0);
        let wc = 1.0 - w;
        if dj <= SUPPORT_TOL {
            if w > SUPPORT_WEIGHT_TOL {
                return Ok(RelativeEntropy::Infinite);
            }
        } else {
            cross += w * dj.ln();
        }
        if dj >= 1.0 - SUPPORT_TOL {
            if wc > SUPPORT_WEIGHT_TOL {
                return Ok(RelativeEntropy::Infinite);
            }
        } else {
            cross += wc * (-dj).ln_1p();
        }
    }
    Ok(RelativeEntropy::Finite(neg_entropy - cross))
}

/// Spectrum of the modular operator `Δ = D⁻¹ - 1` in the eigenbasis of `D`.
#[derive(Clone, Debug)]
pub struct ModularSpectrum {
    /// `δ_n = (1 - d_n) / d_n`, ordered like the density eigenvalues.
    pub delta: Vec<f64>,
    /// Eigenvalues of the modular Hamiltonian, `Δ = exp(-H)`.
    pub hamiltonian: Vec<f64>,
    pub basis: Mat<C64>,
}

impl ModularSpectrum {
    /// `(1 + Δ)⁻¹`.
    pub fn density(&self) -> HermitianOperator {
        let d: Vec<f64> = self.delta.iter().map(|&x| 1.0 / (1.0 + x)).collect();
        HermitianOperator::from_spectrum(&d, self.basis.as_ref()).expect("spectral reconstruction is Hermitian")
    }

    pub fn delta_operator(&self) -> HermitianOperator {
        HermitianOperator::from_spectrum(&self.delta, self.basis.as_ref())
            .expect("spectral reconstruction is Hermitian")
    }
}

pub fn modular_from_density(d: &HermitianOperator) -> Result<ModularSpectrum> {
    let spectrum = diagonalize_density(d, CLAMP_TOL)?;
    for (index, &value) in spectrum.eigenvalues.iter().enumerate() {
        if value <= MODULAR_BOUNDARY_TOL || value >= 1.0 - MODULAR_BOUNDARY_TOL {
            return Err(Error::BoundaryEigenvalue { index, value });
        }
    }
    let delta = spectrum.eigenvalues.iter().map(|&x| (1.0 - x) / x).collect();
    let hamiltonian = spectrum
        .eigenvalues
        .iter()
        .map(|&x| (x / (1.0 - x)).ln())
        .collect();
    Ok(ModularSpectrum {
        delta,
        hamiltonian,
        basis: spectrum.basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn diag(values: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(values).unwrap()
    }

    #[test]
    fn eta_values() {
        assert!((eta(0.5) - LN_2).abs() < 1e-16);
        for x in [0.0, 1.0, -0.3, 1.7] {
            assert_eq!(eta(x), 0.0);
        }
        let direct = -0.1 * 0.1f64.ln() - 0.9 * 0.9f64.ln();
        assert!((eta(0.1) - direct).abs() < 1e-16);
    }

    #[test]
    fn eta_kappa_values() {
        assert!((eta_kappa(0.5, 2.0).unwrap() - LN_2).abs() < 1e-15);
        for k in [0.3, 2.0, 7.5] {
            assert_eq!(eta_kappa(0.0, k).unwrap(), 0.0);
            assert_eq!(eta_kappa(1.0, k).unwrap(), 0.0);
        }
        let direct = (0.3f64.sqrt() + 0.7f64.sqrt()).ln() / 0.5;
        assert!((eta_kappa(0.3, 0.5).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn eta_kappa_rejects_bad_orders() {
        assert!(matches!(eta_kappa(0.3, 0.0), Err(Error::InvalidKappa { .. })));
        assert!(matches!(eta_kappa(0.3, -1.0), Err(Error::InvalidKappa { .. })));
        assert!(matches!(
            eta_kappa(0.3, 1.0 + 1e-7),
            Err(Error::VonNeumannLimit { .. })
        ));
        assert!(eta_kappa(0.3, 1.0 + 2e-6).is_ok());
    }

    #[test]
    fn clamp_semantics() {
        let s = diagonalize_density(&diag(&[-1e-13, 0.4, 1.0 + 1e-13]), 1e-9).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0, 0.4, 1.0]);
        assert_eq!(s.clamp_report.count, 2);
        assert!(matches!(
            diagonalize_density(&diag(&[-1e-6, 0.4]), 1e-9),
            Err(Error::SpectrumOutOfRange { .. })
        ));
    }

    #[test]
    fn half_identity() {
        let d = diag(&[0.5; 3]);
        let s = diagonalize_density(&d, CLAMP_TOL).unwrap();
        assert!(s.eigenvalues.iter().all(|&x| (x - 0.5).abs() < 1e-15));
        assert!((von_neumann_entropy(&d).unwrap() - 3.0 * LN_2).abs() < 1e-14);
        for k in [0.5, 2.0, 3.0] {
            assert!((renyi_entropy(&d, k).unwrap() - 3.0 * LN_2).abs() < 1e-14);
        }
    }

    #[test]
    fn projector_entropies_vanish() {
        let d = diag(&[1.0, 0.0, 1.0]);
        assert_eq!(von_neumann_entropy(&d).unwrap(), 0.0);
        assert!(renyi_entropy(&d, 2.0).unwrap().abs() < 1e-15);
        let p = ProjectorSpec::Indices(vec![0, 1]);
        assert!(subsystem_entropy(&d, &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_subsystem() {
        let d = diag(&[0.5; 4]);
        let t = subsystem_entropy_terms(&d, &ProjectorSpec::Indices(vec![1, 3])).unwrap();
        assert!((t.localized - 2.0 * LN_2).abs() < 1e-14);
        assert!((t.bulk - 2.0 * LN_2).abs() < 1e-14);
    }

    #[test]
    fn chi_v_diagonal_example() {
        let sigma = diag(&[0.8, 0.5]);
        let sigma_v = diag(&[0.4, 0.1]);
        let chi = chi_v_operator(&sigma, &sigma_v, CLAMP_TOL).unwrap();
        assert!((chi.as_mat()[(0, 0)].re - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((chi.as_mat()[(1, 1)].re - 0.2f64.sqrt()).abs() < 1e-14);
        assert!(chi.as_mat()[(0, 1)].norm() < 1e-15);

        let expected = eta(0.4) + eta(0.1) - 0.5 * eta(0.8) - 0.2 * eta(0.5);
        let s = cfs_entanglement_entropy(&sigma, &sigma_v).unwrap();
        assert!((s - expected).abs() < 1e-14);
    }

    #[test]
    fn chi_v_identity_and_equal_cases() {
        let chi = chi_v_operator(&diag(&[1.0; 3]), &diag(&[1.0, 0.0, 1.0]), CLAMP_TOL).unwrap();
        for (i, want) in [1.0, 0.0, 1.0].into_iter().enumerate() {
            assert!((chi.as_mat()[(i, i)].re - want).abs() < 1e-14);
        }
        let sigma = diag(&[0.7, 0.0, 0.2]);
        let chi = chi_v_operator(&sigma, &sigma, CLAMP_TOL).unwrap();
        for (i, want) in [1.0, 0.0, 1.0].into_iter().enumerate() {
            assert!((chi.as_mat()[(i, i)].re - want).abs() < 1e-14);
        }
        assert!(cfs_entanglement_entropy(&sigma, &sigma).unwrap().abs() < 1e-14);
    }

    #[test]
    fn chi_v_rejects_disorder() {
        assert!(matches!(
            chi_v_operator(&diag(&[0.3]), &diag(&[0.5]), CLAMP_TOL),
            Err(Error::OrderingViolated { .. })
        ));
    }

    #[test]
    fn relative_entropy_cases() {
        let d = diag(&[0.3, 0.6]);
        assert!(relative_entropy(&d, &d).unwrap().finite().unwrap().abs() < 1e-15);
        assert!(relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]))
            .unwrap()
            .is_infinite());
        // single mode: Bernoulli Kullback-Leibler divergence
        let (p, q) = (0.2f64, 0.7f64);
        let kl = p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
        let r = relative_entropy(&diag(&[p]), &diag(&[q])).unwrap().finite().unwrap();
        assert!((r - kl).abs() < 1e-15);
    }

    #[test]
    fn modular_map() {
        let m = modular_from_density(&diag(&[0.5, 0.5])).unwrap();
        assert!(m.delta.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        assert!(m.hamiltonian.iter().all(|&x| x.abs() < 1e-15));

        let d = 1.0 / (1.0 + std::f64::consts::E);
        let m = modular_from_density(&diag(&[d])).unwrap();
        assert!((m.delta[0] - std::f64::consts::E).abs() < 1e-14);
        assert!((m.hamiltonian[0] + 1.0).abs() < 1e-14);

        assert!(matches!(
            modular_from_density(&diag(&[0.4, 1.0])),
            Err(Error::BoundaryEigenvalue { .. })
        ));
    }
}
