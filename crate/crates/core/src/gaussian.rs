//! Quadratic lattice Hamiltonians and their quasi-free states in the
//! covariance / complex-structure language.
//!
//! Nambu order is `Φ = (Ψ_1..Ψ_N, Ψ†_1..Ψ†_N)` and
//! `H = Σ h_ij Ψ†_iΨ_j + ½ Σ (P_ij Ψ†_iΨ†_j + h.c.) = ½ Φ† H_BdG Φ + ½ tr h`
//! with `H_BdG = [[h, P], [P†, -h*]]`.

use faer::{Mat, MatRef};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{check_indices, eigh, eigvalsh, hermiticity_defect, max_abs, HermitianOperator, C64};
use crate::spectral::eta;

/// BdG eigenvalues with `|E|` below this are zero modes.
pub const ZERO_MODE_TOL: f64 = 1e-10;

/// Above this inverse temperature the ground state is returned.
pub const BETA_CAP: f64 = 1e6;

/// Relative size of squeezing blocks tolerated by [`pp_density`].
pub const SQUEEZING_TOL: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Debug)]
pub struct QuadraticHamiltonian {
    hopping: Mat<C64>,
    pairing: Mat<C64>,
    boundary: Boundary,
}

impl QuadraticHamiltonian {
    pub fn new(hopping: Mat<C64>, pairing: Mat<C64>, boundary: Boundary) -> Result<Self> {
        let n = hopping.nrows();
        if hopping.ncols() != n || n == 0 {
            return Err(Error::BadShape {
                rows: n,
                cols: hopping.ncols(),
            });
        }
        if pairing.nrows() != n || pairing.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: pairing.nrows(),
            });
        }
        let tol = 1e-12 * max_abs(hopping.as_ref()).max(1.0);
        let deviation = hermiticity_defect(hopping.as_ref());
        if deviation > tol {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: tol,
            });
        }
        let tol = 1e-12 * max_abs(pairing.as_ref()).max(1.0);
        let asym = max_abs((&pairing + pairing.transpose()).as_ref());
        if asym > tol {
            return Err(Error::InvalidConfig(format!(
                "pairing matrix is not antisymmetric (defect {asym:e})"
            )));
        }
        Ok(Self {
            hopping,
            pairing,
            boundary,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.hopping.nrows()
    }

    pub fn hopping(&self) -> MatRef<'_, C64> {
        self.hopping.as_ref()
    }

    pub fn pairing(&self) -> MatRef<'_, C64> {
        self.pairing.as_ref()
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_particle_number_preserving(&self) -> bool {
        max_abs(self.pairing.as_ref()) == 0.0
    }

    pub fn bdg_matrix(&self) -> Mat<C64> {
        let n = self.n_sites();
        let (h, p) = (&self.hopping, &self.pairing);
        Mat::from_fn(2 * n, 2 * n, |a, b| match (a < n, b < n) {
            (true, true) => h[(a, b)],
            (true, false) => p[(a, b - n)],
            (false, true) => p[(b, a - n)].conj(),
            (false, false) => -h[(a - n, b - n)].conj(),
        })
    }

    /// `½ tr h - ½ Σ_k E_k` over the non-negative BdG energies.
    pub fn ground_energy(&self) -> Result<f64> {
        let n = self.n_sites();
        let e = eigvalsh(self.bdg_matrix().as_ref())?;
        let trace: f64 = (0..n).map(|i| self.hopping[(i, i)].re).sum();
        Ok(0.5 * trace - 0.5 * e[n..].iter().sum::<f64>())
    }
}

/// `-μ` on the diagonal, `-t` on nearest neighbours, pairing `P_{i,i+1} = Δ`.
pub fn kitaev_chain(n: usize, mu: f64, t: f64, delta: f64, boundary: Boundary) -> Result<QuadraticHamiltonian> {
    if n < 2 {
        return Err(Error::BadSize { n, min: 2 });
    }
    let mut h = Mat::<C64>::zeros(n, n);
    let mut p = Mat::<C64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = C64::new(-mu, 0.0);
    }
    let bonds = match boundary {
        Boundary::Open => n - 1,
        Boundary::Periodic => n,
    };
    for i in 0..bonds {
        let j = (i + 1) % n;
        h[(i, j)] -= C64::new(t, 0.0);
        h[(j, i)] -= C64::new(t, 0.0);
        p[(i, j)] += C64::new(delta, 0.0);
        p[(j, i)] -= C64::new(delta, 0.0);
    }
    QuadraticHamiltonian::new(h, p, boundary)
}

/// `Ψ'_k = Σ_j u_kj Ψ_j + v_kj Ψ†_j`.
#[derive(Clone, Debug)]
pub struct BogoliubovTransform {
    pub u: Mat<C64>,
    pub v: Mat<C64>,
}

impl BogoliubovTransform {
    /// Max-norm defects of `u u† + v v† = 1` and `u vᵀ + v uᵀ = 0`.
    pub fn defects(&self) -> (f64, f64) {
        let n = self.u.nrows();
        let id = Mat::<C64>::identity(n, n);
        let first = &self.u * self.u.adjoint() + &self.v * self.v.adjoint() - &id;
        let second = &self.u * self.v.transpose() + &self.v * self.u.transpose();
        (max_abs(first.as_ref()), max_abs(second.as_ref()))
    }
}

/// How mode occupations are normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationConvention {
    /// Single-particle levels of a number-preserving state, occupations in `[0, 1]`.
    ParticleLevels,
    /// Positive-energy BdG quasiparticles, occupations in `[0, ½]`.
    Quasiparticles,
}

#[derive(Clone, Debug)]
pub struct NormalModeSpectrum {
    /// Single-particle or quasiparticle energies.
    pub energies: Vec<f64>,
    /// `β_i` of the per-mode state `diag(e^{-β_i}, e^{β_i}) / (2 cosh β_i)`;
    /// infinite for pure modes.
    pub betas: Vec<f64>,
    /// `⟨Ψ'†_iΨ'_i⟩`.
    pub occupations: Vec<f64>,
    pub transform: BogoliubovTransform,
    pub convention: OccupationConvention,
}

impl NormalModeSpectrum {
    pub fn mode_entropies(&self) -> Vec<f64> {
        self.occupations.iter().map(|&f| eta(f)).collect()
    }
}

/// Anticommutation form `G`, covariance matrix `Ω` and complex structure
/// `J = Ω G⁻¹`.
#[derive(Clone, Debug)]
pub struct KahlerData {
    pub g: Mat<f64>,
    pub omega: Mat<C64>,
    pub j: Mat<C64>,
}

fn anticommutation_form(n: usize) -> Mat<f64> {
    Mat::from_fn(2 * n, 2 * n, |a, b| if (a + n) % (2 * n) == b { 1.0 } else { 0.0 })
}

impl KahlerData {
    /// From the Nambu correlation matrix `Γ_ab = ⟨Φ_a Φ†_b⟩`.
    ///
    /// `Ω_ab = -i⟨Φ_aΦ_b - Φ_bΦ_a⟩ = -i(M - Mᵀ)` with `M = Γ G`.
    pub fn from_correlation(gamma: MatRef<'_, C64>) -> Result<Self> {
        let dim = gamma.nrows();
        if dim % 2 != 0 || gamma.ncols() != dim || dim == 0 {
            return Err(Error::BadShape {
                rows: dim,
                cols: gamma.ncols(),
            });
        }
        let g = anticommutation_form(dim / 2);
        let gc = crate::linalg::real_to_complex(g.as_ref());
        let m = gamma * &gc;
        let omega = Mat::from_fn(dim, dim, |a, b| (m[(a, b)] - m[(b, a)]) * C64::new(0.0, -1.0));
        // G is its own inverse
        let j = &omega * &gc;
        Ok(Self { g, omega, j })
    }

    pub fn n_modes(&self) -> usize {
        self.g.nrows() / 2
    }

    /// `iJ = 2Γ - 1`, Hermitian.
    pub fn i_j(&self) -> Result<HermitianOperator> {
        let ij = Mat::from_fn(self.j.nrows(), self.j.ncols(), |a, b| self.j[(a, b)] * C64::new(0.0, 1.0));
        HermitianOperator::with_tolerance(ij, 1e-10)
    }

    /// Eigenvalues of `J²`, ascending.
    pub fn j_squared_spectrum(&self) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = self.i_j()?.eigenvalues()?.iter().map(|m| -m * m).collect();
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Max-norm of `J - Ω G⁻¹`.
    pub fn j_defect(&self) -> f64 {
        let gc = crate::linalg::real_to_complex(self.g.as_ref());
        max_abs((&self.omega * &gc - &self.j).as_ref())
    }

    /// Max-norm of `J² + 1`; zero for pure states.
    pub fn purity_defect(&self) -> f64 {
        let dim = self.j.nrows();
        max_abs((&self.j * &self.j + Mat::<C64>::identity(dim, dim)).as_ref())
    }
}

/// Spectrum `p` of `(1 + iJ)/2 = Γ`, validated to lie in `[0, 1]` up to
/// `1e-9`.
fn correlation_spectrum(k: &KahlerData) -> Result<Vec<f64>> {
    let mut p: Vec<f64> = k.i_j()?.eigenvalues()?.iter().map(|m| 0.5 * (1.0 + m)).collect();
    crate::spectral::ClampReport::clamp(&mut p, 1e-9)?;
    Ok(p)
}

/// `|tr((1+iJ)/2 log|(1+iJ)/2|)|`.
pub fn entropy_from_j(k: &KahlerData) -> Result<f64> {
    let p = correlation_spectrum(k)?;
    Ok(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum::<f64>().abs())
}

/// Principal `2|V| × 2|V|` block on the rows and columns of the given sites.
pub fn restrict_subsystem(k: &KahlerData, sites: &[usize]) -> Result<KahlerData> {
    let n = k.n_modes();
    check_indices(sites, n)?;
    if sites.is_empty() {
        return Err(Error::BadIndexSet {
            reason: "subsystem must contain at least one site".into(),
        });
    }
    let idx: Vec<usize> = sites.iter().copied().chain(sites.iter().map(|s| s + n)).collect();
    let m = idx.len();
    Ok(KahlerData {
        g: Mat::from_fn(m, m, |a, b| k.g[(idx[a], idx[b])]),
        omega: Mat::from_fn(m, m, |a, b| k.omega[(idx[a], idx[b])]),
        j: Mat::from_fn(m, m, |a, b| k.j[(idx[a], idx[b])]),
    })
}

/// `D_ij = ⟨Ψ†_iΨ_j⟩` of a number-preserving state, read off the top-left
/// block of `J`: `iJ_tl = 1 - 2Dᵀ`.
pub fn pp_density(k: &KahlerData) -> Result<HermitianOperator> {
    let n = k.n_modes();
    let scale = max_abs(k.omega.as_ref());
    let mut squeezing = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            squeezing = squeezing.max(k.omega[(a, b)].norm()).max(k.omega[(a + n, b + n)].norm());
        }
    }
    let tolerance = SQUEEZING_TOL * scale;
    if squeezing > tolerance {
        return Err(Error::NotParticleNumberPreserving {
            max_squeezing: squeezing,
            tolerance,
        });
    }
    let d = Mat::from_fn(n, n, |i, j| {
        let id = if i == j { ONE } else { ZERO };
        (id - C64::new(0.0, 1.0) * k.j[(j, i)]) * 0.5
    });
    HermitianOperator::with_tolerance(d, 1e-10)
}

#[derive(Clone, Debug)]
pub struct GaussianState {
    pub kahler: KahlerData,
    pub modes: NormalModeSpectrum,
    /// Number of zero-energy modes whose occupation was fixed by convention.
    pub zero_modes: usize,
}

impl GaussianState {
    pub fn has_degenerate_zero_mode(&self) -> bool {
        self.zero_modes > 0
    }
}

/// Occupation of each mode: `None` selects the ground state.
#[derive(Clone, Copy)]
enum Filling {
    Ground,
    Thermal(f64),
}

/// Quasiparticle vectors `w_k = (U_{·k}; V_{·k})` with non-negative energies.
struct Quasiparticles {
    energies: Vec<f64>,
    u: Mat<C64>,
    v: Mat<C64>,
    zero_modes: usize,
    convention: OccupationConvention,
}

fn particle_levels(h: &QuadraticHamiltonian) -> Result<Quasiparticles> {
    let n = h.n_sites();
    let (e, vecs) = eigh(h.hopping())?;
    let zero_modes = e.iter().filter(|x| x.abs() < ZERO_MODE_TOL).count();
    Ok(Quasiparticles {
        energies: e,
        u: vecs,
        v: Mat::zeros(n, n),
        zero_modes,
        convention: OccupationConvention::ParticleLevels,
    })
}

fn charge_conjugate(w: &[C64], n: usize) -> Vec<C64> {
    (0..2 * n).map(|a| w[(a + n) % (2 * n)].conj()).collect()
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn bdg_quasiparticles(h: &QuadraticHamiltonian) -> Result<Quasiparticles> {
    let n = h.n_sites();
    let (e, vecs) = eigh(h.bdg_matrix().as_ref())?;
    let col = |k: usize| -> Vec<C64> { (0..2 * n).map(|a| vecs[(a, k)]).collect() };

    let positive: Vec<usize> = (0..2 * n).filter(|&k| e[k] >= ZERO_MODE_TOL).collect();
    let zero: Vec<usize> = (0..2 * n).filter(|&k| e[k].abs() < ZERO_MODE_TOL).collect();
    if zero.len() % 2 != 0 || positive.len() + zero.len() / 2 != n {
        return Err(Error::Decomposition);
    }

    let mut columns: Vec<Vec<C64>> = positive.iter().map(|&k| col(k)).collect();
    let mut energies: Vec<f64> = positive.iter().map(|&k| e[k]).collect();

    if !zero.is_empty() {
        // Charge-conjugation invariant real basis of the zero space, then
        // pair x, y into w = (x + iy)/√2 so that w ⟂ Cw.
        let mut real_basis: Vec<Vec<C64>> = Vec::new();
        for &k in &zero {
            let z = col(k);
            let cz = charge_conjugate(&z, n);
            let x: Vec<C64> = z.iter().zip(&cz).map(|(a, b)| a + b).collect();
            let y: Vec<C64> = z.iter().zip(&cz).map(|(a, b)| (a - b) * C64::new(0.0, 1.0)).collect();
            for mut cand in [x, y] {
                for _ in 0..2 {
                    for b in &real_basis {
                        let r = inner(b, &cand).re;
                        cand.iter_mut().zip(b).for_each(|(c, bb)| *c -= bb * r);
                    }
                }
                let norm = inner(&cand, &cand).re.sqrt();
                if norm > 1e-6 && real_basis.len() < zero.len() {
                    cand.iter_mut().for_each(|c| *c /= norm);
                    real_basis.push(cand);
                }
            }
        }
        if real_basis.len() != zero.len() {
            return Err(Error::Decomposition);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for pair in real_basis.chunks(2) {
            let w: Vec<C64> = pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(x, y)| (x + y * C64::new(0.0, 1.0)) * s)
                .collect();
            columns.push(w);
            energies.push(0.0);
        }
    }

    Ok(Quasiparticles {
        energies,
        u: Mat::from_fn(n, n, |i, k| columns[k][i]),
        v: Mat::from_fn(n, n, |i, k| columns[k][i + n]),
        zero_modes: zero.len() / 2,
        convention: OccupationConvention::Quasiparticles,
    })
}

fn build_state(q: Quasiparticles, filling: Filling) -> Result<GaussianState> {
    let n = q.u.nrows();
    let occupations: Vec<f64> = q
        .energies
        .iter()
        .map(|&e| match (filling, q.convention) {
            (Filling::Thermal(beta), _) => 1.0 / (1.0 + (beta * e).exp()),
            (Filling::Ground, OccupationConvention::ParticleLevels) => {
                // zero-energy levels are filled
                if e < ZERO_MODE_TOL {
                    1.0
                } else {
                    0.0
                }
            }
            (Filling::Ground, OccupationConvention::Quasiparticles) => 0.0,
        })
        .collect();
    let betas: Vec<f64> = q
        .energies
        .iter()
        .zip(&occupations)
        .map(|(&e, &f)| match filling {
            Filling::Thermal(beta) => 0.5 * beta * e,
            Filling::Ground if f == 0.0 => f64::INFINITY,
            Filling::Ground => f64::NEG_INFINITY,
        })
        .collect();

    // W = [[U, V*], [V, U*]],  Γ = W diag(1-f, f) W†
    let w = Mat::from_fn(2 * n, 2 * n, |a, b| match (a < n, b < n) {
        (true, true) => q.u[(a, b)],
        (false, true) => q.v[(a - n, b)],
        (true, false) => q.v[(a, b - n)].conj(),
        (false, false) => q.u[(a - n, b - n)].conj(),
    });
    let weight = |b: usize| if b < n { 1.0 - occupations[b] } else { occupations[b - n] };
    let wd = Mat::from_fn(2 * n, 2 * n, |a, b| w[(a, b)] * weight(b));
    let gamma = &wd * w.adjoint();
    let kahler = KahlerData::from_correlation(gamma.as_ref())?;

    let transform = BogoliubovTransform {
        u: q.u.adjoint().to_owned(),
        v: q.v.adjoint().to_owned(),
    };
    Ok(GaussianState {
        kahler,
        modes: NormalModeSpectrum {
            energies: q.energies,
            betas,
            occupations,
            transform,
            convention: q.convention,
        },
        zero_modes: q.zero_modes,
    })
}

fn modes_of(h: &QuadraticHamiltonian) -> Result<Quasiparticles> {
    if h.is_particle_number_preserving() {
        particle_levels(h)
    } else {
        bdg_quasiparticles(h)
    }
}

/// Ground state. Zero-energy single-particle levels are filled; zero-energy
/// BdG modes are assigned the combination `(x + iy)/√2` of a
/// charge-conjugation-invariant basis as the empty quasiparticle.
pub fn ground_state(h: &QuadraticHamiltonian) -> Result<GaussianState> {
    build_state(modes_of(h)?, Filling::Ground)
}

/// `exp(-βH)/Z`; `β > 1e6` returns the ground state.
pub fn thermal_state(h: &QuadraticHamiltonian, beta: f64) -> Result<GaussianState> {
    if !(beta >= 0.0) {
        return Err(Error::NegativeBeta { beta });
    }
    if beta > BETA_CAP {
        return ground_state(h);
    }
    build_state(modes_of(h)?, Filling::Thermal(beta))
}
