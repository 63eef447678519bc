//! Causal-fermion-system description of number-preserving lattice states.
//!
//! For `D = Σ_i λ_i e_i e_i†` the local correlation operator of site `k` is
//! `F_k = -|x_k⟩⟨x_k|` with `x_k = Σ_i conj(e_i[k]) √λ_i |i⟩` in the
//! `p`-dimensional space spanned by the occupied eigenmodes. Entropies use the
//! positive parts `|x_k⟩⟨x_k|`.

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{check_indices, eigh, eigvals, HermitianOperator, C64};
use crate::spectral::{density_eigenvalues, diagonalize_density, eta, CLAMP_TOL};

/// Eigenvalues of `D` at or below this count as unoccupied.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LocalCorrelationOp {
    pub x: Vec<C64>,
}

impl LocalCorrelationOp {
    pub fn norm_sqr(&self) -> f64 {
        self.x.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `|x⟩⟨x|`.
    pub fn positive_part(&self) -> Mat<C64> {
        let p = self.x.len();
        Mat::from_fn(p, p, |i, j| self.x[i] * self.x[j].conj())
    }

    /// `F = -|x⟩⟨x|`.
    pub fn signed(&self) -> Mat<C64> {
        let p = self.x.len();
        Mat::from_fn(p, p, |i, j| -(self.x[i] * self.x[j].conj()))
    }
}

#[derive(Clone, Debug)]
pub struct LatticeCFS {
    n_sites: usize,
    occupations: Vec<f64>,
    ops: Vec<LocalCorrelationOp>,
}

pub fn build_lattice_cfs(d: &HermitianOperator) -> Result<LatticeCFS> {
    let spectrum = diagonalize_density(d, CLAMP_TOL)?;
    let occupied: Vec<usize> = (0..spectrum.dim()).filter(|&i| spectrum.eigenvalues[i] > RANK_TOL).collect();
    let ops = (0..d.dim())
        .map(|k| LocalCorrelationOp {
            x: occupied
                .iter()
                .map(|&i| spectrum.basis[(k, i)].conj() * spectrum.eigenvalues[i].sqrt())
                .collect(),
        })
        .collect();
    Ok(LatticeCFS {
        n_sites: d.dim(),
        occupations: occupied.iter().map(|&i| spectrum.eigenvalues[i]).collect(),
        ops,
    })
}

impl LatticeCFS {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Rank `p` of `D`.
    pub fn hilbert_dim(&self) -> usize {
        self.occupations.len()
    }

    /// Nonzero eigenvalues of `D`, ascending.
    pub fn occupations(&self) -> &[f64] {
        &self.occupations
    }

    pub fn ops(&self) -> &[LocalCorrelationOp] {
        &self.ops
    }

    /// `σ = Σ_k |x_k⟩⟨x_k|`.
    pub fn sigma(&self) -> Result<HermitianOperator> {
        self.sigma_v(&(0..self.n_sites).collect::<Vec<_>>())
    }

    /// `σ_V = Σ_{k∈V} |x_k⟩⟨x_k|`. With `p = 0` this is the 1×1 zero
    /// operator.
    pub fn sigma_v(&self, sites: &[usize]) -> Result<HermitianOperator> {
        check_indices(sites, self.n_sites)?;
        let p = self.hilbert_dim().max(1);
        let mut m = Mat::<C64>::zeros(p, p);
        for &k in sites {
            let x = &self.ops[k].x;
            for i in 0..x.len() {
                for j in 0..x.len() {
                    m[(i, j)] += x[i] * x[j].conj();
                }
            }
        }
        HermitianOperator::new(m)
    }

    /// Point operators `F_k` with spin dimension one.
    pub fn point_operators(&self) -> Result<Vec<SpacetimePointOp>> {
        let p = self.hilbert_dim().max(1);
        self.ops
            .iter()
            .map(|op| {
                let m = if op.x.is_empty() { Mat::zeros(p, p) } else { op.signed() };
                SpacetimePointOp::new(HermitianOperator::new(m)?, 1)
            })
            .collect()
    }
}

/// `tr η(σ_V)`.
pub fn cfs_subsystem_entropy(cfs: &LatticeCFS, sites: &[usize]) -> Result<f64> {
    let (values, _) = density_eigenvalues(&cfs.sigma_v(sites)?, CLAMP_TOL)?;
    Ok(values.iter().map(|&x| eta(x)).sum())
}

/// A symmetric operator with at most `n` positive and `n` negative
/// eigenvalues.
#[derive(Clone, Debug)]
pub struct SpacetimePointOp {
    operator: HermitianOperator,
    spin_dim: usize,
    /// Nonzero eigenvalues and their eigenvectors (columns).
    values: Vec<f64>,
    range: Mat<C64>,
}

impl SpacetimePointOp {
    pub fn new(operator: HermitianOperator, spin_dim: usize) -> Result<Self> {
        if spin_dim == 0 {
            return Err(Error::InvalidConfig("spin dimension must be positive".into()));
        }
        let (e, v) = eigh(operator.as_mat())?;
        let scale = e.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let keep: Vec<usize> = (0..e.len()).filter(|&i| e[i].abs() > RANK_TOL * scale).collect();
        let positive = keep.iter().filter(|&&i| e[i] > 0.0).count();
        let negative = keep.len() - positive;
        if positive > spin_dim || negative > spin_dim {
            return Err(Error::SpinDimensionExceeded {
                positive,
                negative,
                spin_dim,
            });
        }
        Ok(Self {
            spin_dim,
            values: keep.iter().map(|&i| e[i]).collect(),
            range: Mat::from_fn(v.nrows(), keep.len(), |r, c| v[(r, keep[c])]),
            operator,
        })
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn spin_dim(&self) -> usize {
        self.spin_dim
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }
}

/// The `2n` eigenvalues of `xy` (with algebraic multiplicity, zeros
/// included), computed from the rank-reduced product `Λ_x Q_x† y Q_x`.
pub fn product_eigenvalues(x: &SpacetimePointOp, y: &SpacetimePointOp) -> Result<Vec<C64>> {
    x.operator.check_same_dim(&y.operator)?;
    let n = x.spin_dim.max(y.spin_dim);
    let mut out = if x.rank() == 0 || y.rank() == 0 {
        Vec::new()
    } else {
        let qx = x.range.as_ref();
        let inner = qx.adjoint() * y.operator.as_mat() * qx;
        let reduced = Mat::from_fn(x.rank(), x.rank(), |i, j| inner[(i, j)] * x.values[i]);
        eigvals(reduced.as_ref())?
    };
    out.resize(2 * n, C64::new(0.0, 0.0));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalRelation {
    Spacelike,
    Timelike,
    Lightlike,
}

/// Classifies a pair from the spectrum of `xy`. Both equalities are tested
/// relative to the largest `|λ|`.
pub fn causal_classify(x: &SpacetimePointOp, y: &SpacetimePointOp, tol: f64) -> Result<CausalRelation> {
    Ok(classify_spectrum(&product_eigenvalues(x, y)?, tol))
}

pub fn classify_spectrum(lambdas: &[C64], tol: f64) -> CausalRelation {
    let abs: Vec<f64> = lambdas.iter().map(|z| z.norm()).collect();
    let max = abs.iter().cloned().fold(0.0, f64::max);
    let min = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    if max - min <= tol * max {
        return CausalRelation::Spacelike;
    }
    if lambdas.iter().all(|z| z.im.abs() <= tol * max) {
        CausalRelation::Timelike
    } else {
        CausalRelation::Lightlike
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LagrangianTerms {
    /// `(1/4n) Σ_{i,j} (|λ_i| - |λ_j|)²`, zero for spacelike pairs.
    pub spread: f64,
    /// `κ (Σ_j |λ_j|)²`.
    pub kappa_term: f64,
}

impl LagrangianTerms {
    pub fn total(&self) -> f64 {
        self.spread + self.kappa_term
    }
}

pub fn kappa_lagrangian(x: &SpacetimePointOp, y: &SpacetimePointOp, kappa: f64) -> Result<LagrangianTerms> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidConfig(format!("κ must be non-negative, got {kappa}")));
    }
    let lambdas = product_eigenvalues(x, y)?;
    let n = lambdas.len() / 2;
    let abs: Vec<f64> = lambdas.iter().map(|z| z.norm()).collect();
    let mut spread = 0.0;
    for a in &abs {
        for b in &abs {
            spread += (a - b).powi(2);
        }
    }
    let sum: f64 = abs.iter().sum();
    Ok(LagrangianTerms {
        spread: spread / (4.0 * n as f64),
        kappa_term: kappa * sum * sum,
    })
}

/// Index sets of a surface-layer integral. `boundary` stands in for `∂Ω`.
#[derive(Clone, Debug, Default)]
pub struct SurfaceLayer {
    pub boundary: Vec<usize>,
    pub omega: Vec<usize>,
    pub v: Vec<usize>,
}

/// `Σ_{x ∈ ∂Ω ∩ V} Σ_{y ∉ Ω ∪ V} L(x, y)`.
pub fn surface_layer_area(points: &[SpacetimePointOp], layer: &SurfaceLayer, kappa: f64) -> Result<f64> {
    let n = points.len();
    for set in [&layer.boundary, &layer.omega, &layer.v] {
        check_indices(set, n)?;
    }
    let mut total = 0.0;
    for &x in layer.boundary.iter().filter(|b| layer.v.contains(b)) {
        for y in (0..n).filter(|y| !layer.omega.contains(y) && !layer.v.contains(y)) {
            total += kappa_lagrangian(&points[x], &points[y], kappa)?.total();
        }
    }
    Ok(total)
}
