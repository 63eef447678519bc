//! Brute-force Fock space for up to [`MAX_MODES`] modes.
//!
//! Basis state `s` (an integer) has mode `i` occupied iff bit `i` is set and
//! stands for `Ψ†_{i1} ⋯ Ψ†_{ik} |0⟩` with `i1 < ⋯ < ik`. Creation on mode `i`
//! therefore picks up `(-1)^{Σ_{j<i} n_j}` (Jordan–Wigner).

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{check_indices, eigh, hermiticity_defect, max_abs, HermitianOperator, C64};
use crate::spectral::{check_kappa, diagonalize_density, RelativeEntropy, CLAMP_TOL};

pub const MAX_MODES: usize = 12;

/// Tolerances used when validating a statistical operator.
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Fock eigenvalues below this count as zero probability.
pub const FOCK_NULL_TOL: f64 = 1e-14;
/// Weight of `W` above this on a null direction of `W0` makes the relative
/// entropy infinite.
pub const FOCK_WEIGHT_TOL: f64 = 1e-12;

fn check_modes(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::BadSize { n, min: 1 });
    }
    if n > MAX_MODES {
        return Err(Error::TooManyModes { n, max: MAX_MODES });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Creation,
    Annihilation,
}

/// Single-mode creation or annihilation operator. Each column holds at most
/// one nonzero entry, stored as `(row, sign)`.
#[derive(Clone, Debug)]
pub struct ModeOperator {
    pub n_modes: usize,
    pub mode: usize,
    pub kind: Ladder,
    columns: Vec<Option<(usize, f64)>>,
}

impl ModeOperator {
    fn new(n_modes: usize, mode: usize, kind: Ladder) -> Self {
        let bit = 1usize << mode;
        let below = bit - 1;
        let columns = (0..1usize << n_modes)
            .map(|s| {
                let occupied = s & bit != 0;
                let sign = if (s & below).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                match (kind, occupied) {
                    (Ladder::Creation, false) => Some((s | bit, sign)),
                    (Ladder::Annihilation, true) => Some((s & !bit, sign)),
                    _ => None,
                }
            })
            .collect();
        Self {
            n_modes,
            mode,
            kind,
            columns,
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Image of basis state `s` as `(state, sign)`.
    pub fn on_basis(&self, s: usize) -> Option<(usize, f64)> {
        self.columns[s]
    }

    /// `out += coeff · A v`.
    pub fn apply_add(&self, coeff: C64, v: &[C64], out: &mut [C64]) {
        for (s, entry) in self.columns.iter().enumerate() {
            if let Some((t, sign)) = *entry {
                out[t] += coeff * v[s] * sign;
            }
        }
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::zeros(self.dim(), self.dim());
        for (s, entry) in self.columns.iter().enumerate() {
            if let Some((t, sign)) = *entry {
                m[(t, s)] = C64::new(sign, 0.0);
            }
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct ModeOperatorSet {
    pub n_modes: usize,
    pub creation: Vec<ModeOperator>,
    pub annihilation: Vec<ModeOperator>,
}

pub fn build_mode_operators(n_modes: usize) -> Result<ModeOperatorSet> {
    check_modes(n_modes)?;
    Ok(ModeOperatorSet {
        n_modes,
        creation: (0..n_modes)
            .map(|i| ModeOperator::new(n_modes, i, Ladder::Creation))
            .collect(),
        annihilation: (0..n_modes)
            .map(|i| ModeOperator::new(n_modes, i, Ladder::Annihilation))
            .collect(),
    })
}

impl ModeOperatorSet {
    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    /// Dense matrix of the product `a b` of two ladder operators.
    pub fn product(&self, a: &ModeOperator, b: &ModeOperator) -> Mat<C64> {
        let mut m = Mat::zeros(self.dim(), self.dim());
        for s in 0..self.dim() {
            if let Some((t, sb)) = b.on_basis(s) {
                if let Some((u, sa)) = a.on_basis(t) {
                    m[(u, s)] += C64::new(sa * sb, 0.0);
                }
            }
        }
        m
    }

    /// `Σ_i Ψ†_i Ψ_i`, diagonal in the occupation basis.
    pub fn number_operator(&self) -> Mat<C64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                C64::new(i.count_ones() as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `Σ h_ij Ψ†_iΨ_j + ½ Σ (P_ij Ψ†_iΨ†_j + conj(P_ij) Ψ_jΨ_i)`.
    pub fn quadratic_hamiltonian(&self, hopping: MatRef<'_, C64>, pairing: MatRef<'_, C64>) -> Result<Mat<C64>> {
        let n = self.n_modes;
        for m in [hopping, pairing] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
        }
        let dim = self.dim();
        let mut h = Mat::<C64>::zeros(dim, dim);
        let mut add_term = |coeff: C64, a: &ModeOperator, b: &ModeOperator| {
            if coeff == C64::new(0.0, 0.0) {
                return;
            }
            for s in 0..dim {
                if let Some((t, sb)) = b.on_basis(s) {
                    if let Some((u, sa)) = a.on_basis(t) {
                        h[(u, s)] += coeff * (sa * sb);
                    }
                }
            }
        };
        for i in 0..n {
            for j in 0..n {
                add_term(hopping[(i, j)], &self.creation[i], &self.annihilation[j]);
                add_term(pairing[(i, j)] * 0.5, &self.creation[i], &self.creation[j]);
                add_term(pairing[(i, j)].conj() * 0.5, &self.annihilation[j], &self.annihilation[i]);
            }
        }
        Ok(h)
    }
}

/// Dense operator on the `2^N`-dimensional Fock space.
#[derive(Clone, Debug)]
pub struct FockOperator {
    n_modes: usize,
    matrix: Mat<C64>,
}

impl FockOperator {
    pub fn new(n_modes: usize, matrix: Mat<C64>) -> Result<Self> {
        check_modes(n_modes)?;
        let dim = 1usize << n_modes;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        Ok(Self { n_modes, matrix })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(n_modes: usize, psi: &[C64]) -> Result<Self> {
        let dim = 1usize << n_modes;
        if psi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: psi.len(),
            });
        }
        Self::new(n_modes, Mat::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj()))
    }

    /// `exp(-βH) / Z` for a Hermitian Fock Hamiltonian.
    pub fn gibbs(n_modes: usize, hamiltonian: MatRef<'_, C64>, beta: f64) -> Result<Self> {
        let (e, v) = eigh(hamiltonian)?;
        let e0 = e[0];
        let weights: Vec<f64> = e.iter().map(|&x| (-beta * (x - e0)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let p: Vec<f64> = weights.iter().map(|w| w / z).collect();
        Self::new(n_modes, crate::linalg::spectral_map(&p, v.as_ref(), |x| x))
    }

    /// Checks Hermiticity, unit trace and positivity; returns the eigenvalues.
    pub fn validate_density(&self) -> Result<(Vec<f64>, Mat<C64>)> {
        let deviation = hermiticity_defect(self.as_mat());
        let tolerance = 1e-12 * max_abs(self.as_mat()).max(1.0);
        if deviation > tolerance {
            return Err(Error::NotDensity {
                reason: format!("Hermiticity defect {deviation:e}"),
            });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotDensity {
                reason: format!("trace {} + {}i", tr.re, tr.im),
            });
        }
        let (values, basis) = eigh(self.as_mat())?;
        if values[0] < -POSITIVITY_TOL {
            return Err(Error::NotDensity {
                reason: format!("negative eigenvalue {:e}", values[0]),
            });
        }
        Ok((values, basis))
    }
}

/// The quasi-free statistical operator with one-particle density `D`, i.e.
/// `⟨Ψ†_kΨ_l⟩ = D_kl`.
///
/// Built from the eigenmodes `e_n` of `D`: with `φ†_n = Σ_k conj(e_n[k]) Ψ†_k`
/// the occupation patterns `Π φ†_n |0⟩` diagonalize `W` with eigenvalues
/// `Π (d_n or 1 - d_n)`. Eigenvalues 0 and 1 need no special treatment.
pub fn statistical_operator_from_density(d: &HermitianOperator) -> Result<FockOperator> {
    let n = d.dim();
    check_modes(n)?;
    let spectrum = diagonalize_density(d, CLAMP_TOL)?;
    let ops = build_mode_operators(n)?;
    let dim = 1usize << n;

    // columns[p] = φ†_{n1} φ†_{n2} ⋯ |0⟩ with n1 < n2 < ⋯ the bits of p,
    // scaled by the square root of the pattern weight
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(dim);
    let mut vacuum = vec![C64::new(0.0, 0.0); dim];
    vacuum[0] = C64::new(1.0, 0.0);
    columns.push(vacuum);
    for p in 1..dim {
        let lowest = p.trailing_zeros() as usize;
        let rest = &columns[p & (p - 1)];
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for k in 0..n {
            let c = spectrum.basis[(k, lowest)].conj();
            if c != C64::new(0.0, 0.0) {
                ops.creation[k].apply_add(c, rest, &mut out);
            }
        }
        columns.push(out);
    }
    let weight = |p: usize| -> f64 {
        (0..n)
            .map(|m| {
                let dm = spectrum.eigenvalues[m];
                if p >> m & 1 == 1 {
                    dm
                } else {
                    1.0 - dm
                }
            })
            .product()
    };
    let scaled = Mat::from_fn(dim, dim, |s, p| columns[p][s] * weight(p).sqrt());
    let w = &scaled * scaled.adjoint();
    FockOperator::new(n, w)
}

/// `M_kl = tr(Ψ†_k Ψ_l W)`.
pub fn two_point_matrix(w: &FockOperator) -> Result<HermitianOperator> {
    let n = w.n_modes();
    let ops = build_mode_operators(n)?;
    let mut m = Mat::<C64>::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..w.dim() {
                if let Some((u, s1)) = ops.annihilation[l].on_basis(t) {
                    if let Some((s, s2)) = ops.creation[k].on_basis(u) {
                        acc += w.matrix[(t, s)] * (s1 * s2);
                    }
                }
            }
            m[(k, l)] = acc;
        }
    }
    HermitianOperator::with_tolerance(m, 1e-10)
}

/// `M_kl = tr(Ψ_k Ψ_l W)`, the squeezing expectations.
pub fn pairing_matrix(w: &FockOperator) -> Result<Mat<C64>> {
    let n = w.n_modes();
    let ops = build_mode_operators(n)?;
    Ok(Mat::from_fn(n, n, |k, l| {
        let mut acc = C64::new(0.0, 0.0);
        for t in 0..w.dim() {
            if let Some((u, s1)) = ops.annihilation[l].on_basis(t) {
                if let Some((s, s2)) = ops.annihilation[k].on_basis(u) {
                    acc += w.matrix[(t, s)] * (s1 * s2);
                }
            }
        }
        acc
    }))
}

/// `-tr(W log W)`.
pub fn fock_entropy(w: &FockOperator) -> Result<f64> {
    let (values, _) = w.validate_density()?;
    Ok(values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum())
}

/// `log tr(W^κ) / (1-κ)`.
pub fn fock_renyi(w: &FockOperator, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let (values, _) = w.validate_density()?;
    let sum: f64 = values.iter().map(|&p| p.max(0.0).powf(kappa)).sum();
    Ok(sum.ln() / (1.0 - kappa))
}

/// Reduced state on `keep` (modes of the result in ascending order of `keep`).
///
/// Reordering `|a, b⟩` into "A creators, then B creators" costs the parity of
/// the number of pairs with a B mode below an A mode, both occupied.
pub fn partial_trace(w: &FockOperator, keep: &[usize]) -> Result<FockOperator> {
    let n = w.n_modes();
    check_indices(keep, n)?;
    if keep.is_empty() {
        return Err(Error::BadIndexSet {
            reason: "at least one mode must be kept".into(),
        });
    }
    let mut a_modes = keep.to_vec();
    a_modes.sort_unstable();
    let b_modes: Vec<usize> = (0..n).filter(|m| !a_modes.contains(m)).collect();
    let (na, nb) = (a_modes.len(), b_modes.len());

    let compose = |a: usize, b: usize| -> (usize, f64) {
        let mut s = 0usize;
        for (i, &m) in a_modes.iter().enumerate() {
            if a >> i & 1 == 1 {
                s |= 1 << m;
            }
        }
        for (j, &m) in b_modes.iter().enumerate() {
            if b >> j & 1 == 1 {
                s |= 1 << m;
            }
        }
        let mut inversions = 0u32;
        for &ma in &a_modes {
            if s >> ma & 1 == 1 {
                inversions += (s & ((1 << ma) - 1) & b_mask(&b_modes)).count_ones();
            }
        }
        (s, if inversions % 2 == 0 { 1.0 } else { -1.0 })
    };
    let table: Vec<Vec<(usize, f64)>> = (0..1usize << na)
        .map(|a| (0..1usize << nb).map(|b| compose(a, b)).collect())
        .collect();

    let da = 1usize << na;
    let reduced = Mat::from_fn(da, da, |a, a2| {
        let mut acc = C64::new(0.0, 0.0);
        for b in 0..1usize << nb {
            let (s, sg) = table[a][b];
            let (s2, sg2) = table[a2][b];
            acc += w.matrix[(s, s2)] * (sg * sg2);
        }
        acc
    });
    FockOperator::new(na, reduced)
}

fn b_mask(b_modes: &[usize]) -> usize {
    b_modes.iter().fold(0, |m, &b| m | 1 << b)
}

/// `tr W(log W - log W0)`, non-negative by Klein's inequality.
pub fn fock_relative_entropy(w: &FockOperator, w0: &FockOperator) -> Result<RelativeEntropy> {
    if w.n_modes() != w0.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: w0.n_modes(),
            found: w.n_modes(),
        });
    }
    let (p, _) = w.validate_density()?;
    let (q, basis) = w0.validate_density()?;
    let neg_entropy: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum();
    let rotated = basis.adjoint() * w.as_mat() * &basis;
    let mut cross = 0.0;
    for (j, &qj) in q.iter().enumerate() {
        let weight = rotated[(j, j)].re;
        if qj <= FOCK_NULL_TOL {
            if weight > FOCK_WEIGHT_TOL {
                return Ok(RelativeEntropy::Infinite);
            }
        } else {
            cross += weight * qj.ln();
        }
    }
    Ok(RelativeEntropy::Finite(neg_entropy - cross))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_mode_ladder() {
        let ops = build_mode_operators(1).unwrap();
        let up = ops.creation[0].to_dense();
        assert_eq!(up[(1, 0)], c(1.0));
        assert_eq!(up[(0, 1)], c(0.0));
        let anti = ops.product(&ops.annihilation[0], &ops.creation[0])
            + ops.product(&ops.creation[0], &ops.annihilation[0]);
        assert_eq!(anti, Mat::<C64>::identity(2, 2));
    }

    #[test]
    fn creation_antisymmetry() {
        let ops = build_mode_operators(2).unwrap();
        let ab = ops.product(&ops.creation[0], &ops.creation[1]);
        let ba = ops.product(&ops.creation[1], &ops.creation[0]);
        assert_eq!(ab[(3, 0)], -ba[(3, 0)]);
        assert_ne!(ab[(3, 0)], c(0.0));
    }

    #[test]
    fn mode_cap() {
        assert!(matches!(
            build_mode_operators(13),
            Err(Error::TooManyModes { n: 13, max: 12 })
        ));
    }

    #[test]
    fn vacuum_and_single_particle() {
        let w = statistical_operator_from_density(&HermitianOperator::zeros(3).unwrap()).unwrap();
        assert!((w.as_mat()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((w.trace().re - 1.0).abs() < 1e-15);

        let d = HermitianOperator::from_real_diagonal(&[1.0, 0.0]).unwrap();
        let w = statistical_operator_from_density(&d).unwrap();
        let m = two_point_matrix(&w).unwrap();
        assert!((m.as_mat()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(m.as_mat()[(1, 1)].norm() < 1e-15);
        assert!(fock_entropy(&w).unwrap().abs() < 1e-14);
    }

    #[test]
    fn product_weights() {
        let d = HermitianOperator::from_real_diagonal(&[0.3, 0.7]).unwrap();
        let w = statistical_operator_from_density(&d).unwrap();
        // bit 0 ↔ first mode
        let expected = [0.7 * 0.3, 0.3 * 0.3, 0.7 * 0.7, 0.3 * 0.7];
        for (s, e) in expected.iter().enumerate() {
            assert!((w.as_mat()[(s, s)].re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn trace_out_nothing() {
        let d = HermitianOperator::from_real_diagonal(&[0.3, 0.8, 0.5]).unwrap();
        let w = statistical_operator_from_density(&d).unwrap();
        let r = partial_trace(&w, &[0, 1, 2]).unwrap();
        assert_eq!(r.as_mat(), w.as_mat());
    }

    #[test]
    fn invalid_density_rejected() {
        let w = FockOperator::new(1, Mat::from_fn(2, 2, |i, j| c(if i == j { 0.6 } else { 0.0 }))).unwrap();
        assert!(matches!(fock_entropy(&w), Err(Error::NotDensity { .. })));
    }

    #[test]
    fn orthogonal_pure_states_infinite() {
        let a = FockOperator::pure(1, &[c(1.0), c(0.0)]).unwrap();
        let b = FockOperator::pure(1, &[c(0.0), c(1.0)]).unwrap();
        assert!(fock_relative_entropy(&a, &b).unwrap().is_infinite());
        assert!(fock_relative_entropy(&a, &a).unwrap().finite().unwrap().abs() < 1e-15);
    }
}
