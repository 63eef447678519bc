//! Dense Hermitian operators and the eigendecompositions everything else is
//! built on.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

pub use faer::c64 as C64;

/// Relative tolerance used when accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest absolute entry.
pub fn max_abs<T: AbsEntry>(m: MatRef<'_, T>) -> f64 {
    let mut best = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].abs_entry());
        }
    }
    best
}

pub trait AbsEntry: Copy {
    fn abs_entry(self) -> f64;
}

impl AbsEntry for f64 {
    fn abs_entry(self) -> f64 {
        self.abs()
    }
}

impl AbsEntry for C64 {
    fn abs_entry(self) -> f64 {
        self.norm()
    }
}

/// Largest entry of `|A - A†|`.
pub fn hermiticity_defect(m: MatRef<'_, C64>) -> f64 {
    let n = m.nrows();
    let mut best = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            best = best.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    best
}

pub fn real_to_complex(m: MatRef<'_, f64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
}

/// Ascending eigenvalues and orthonormal eigenvectors (as columns) of a
/// Hermitian matrix. Only the lower triangle is read.
pub fn eigh(m: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Decomposition)?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn eigvalsh(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Decomposition)
}

pub fn eigh_real(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Decomposition)?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

pub fn eigvalsh_real(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Decomposition)
}

/// Eigenvalues of a general complex matrix.
pub fn eigvals(m: MatRef<'_, C64>) -> Result<Vec<C64>> {
    m.eigenvalues().map_err(|_| Error::Decomposition)
}

/// `Σ_n f(λ_n) |v_n⟩⟨v_n|` for eigenpairs stored as columns of `basis`.
pub fn spectral_map(values: &[f64], basis: MatRef<'_, C64>, f: impl Fn(f64) -> f64) -> Mat<C64> {
    let n = basis.nrows();
    let scaled = Mat::from_fn(n, values.len(), |i, k| basis[(i, k)] * f(values[k]));
    &scaled * basis.adjoint()
}

fn symmetrize(m: MatRef<'_, C64>) -> Mat<C64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// A square complex matrix that was checked to be Hermitian and then stored
/// exactly Hermitian.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: Mat<C64>,
}

impl HermitianOperator {
    /// Accepts `matrix` if `max|A - A†| <= 1e-12 · max|A|`.
    pub fn new(matrix: Mat<C64>) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITIAN_TOL)
    }

    pub fn with_tolerance(matrix: Mat<C64>, rel_tol: f64) -> Result<Self> {
        let (rows, cols) = (matrix.nrows(), matrix.ncols());
        if rows != cols || rows == 0 {
            return Err(Error::BadShape { rows, cols });
        }
        let tolerance = rel_tol * max_abs(matrix.as_ref());
        let deviation = hermiticity_defect(matrix.as_ref());
        if !(deviation <= tolerance) {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        Ok(Self {
            matrix: symmetrize(matrix.as_ref()),
        })
    }

    pub fn from_real(matrix: MatRef<'_, f64>) -> Result<Self> {
        Self::new(real_to_complex(matrix))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(Mat::zeros(n, n))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(Mat::identity(n, n))
    }

    /// `U diag(values) U†`.
    pub fn from_spectrum(values: &[f64], basis: MatRef<'_, C64>) -> Result<Self> {
        if basis.ncols() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.ncols(),
                found: values.len(),
            });
        }
        Self::new(spectral_map(values, basis, |x| x))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.matrix
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.matrix.as_ref())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(self.as_mat())
    }

    pub fn eigh(&self) -> Result<(Vec<f64>, Mat<C64>)> {
        eigh(self.as_mat())
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn compress(&self, indices: &[usize]) -> Result<Self> {
        check_indices(indices, self.dim())?;
        let m = &self.matrix;
        let k = indices.len();
        Ok(Self {
            matrix: Mat::from_fn(k, k, |a, b| m[(indices[a], indices[b])]),
        })
    }

    /// `Q† A Q` for a matrix `Q` with `dim` rows.
    pub fn compress_to(&self, q: MatRef<'_, C64>) -> Result<Self> {
        if q.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.nrows(),
            });
        }
        let inner = q.adjoint() * self.as_mat() * q;
        Ok(Self {
            matrix: symmetrize(inner.as_ref()),
        })
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: MatRef<'_, C64>) -> Result<Self> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.ncols(),
            });
        }
        let out = u * self.as_mat() * u.adjoint();
        Ok(Self {
            matrix: symmetrize(out.as_ref()),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// `1 - A`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self {
            matrix: Mat::from_fn(n, n, |i, j| {
                let id = if i == j { 1.0 } else { 0.0 };
                C64::new(id, 0.0) - self.matrix[(i, j)]
            }),
        }
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_indices(indices: &[usize], dim: usize) -> Result<()> {
    let mut seen = vec![false; dim];
    for &i in indices {
        if i >= dim {
            return Err(Error::BadIndexSet {
                reason: format!("index {i} out of range for dimension {dim}"),
            });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::BadIndexSet {
                reason: format!("index {i} repeated"),
            });
        }
    }
    Ok(())
}

/// Tolerance on `|P² - P|` and `|P - P†|` when accepting an explicit
/// projector.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// A subspace given either by a set of basis indices or by an orthogonal
/// projector.
#[derive(Clone, Debug)]
pub enum ProjectorSpec {
    Indices(Vec<usize>),
    Operator(HermitianOperator),
}

impl ProjectorSpec {
    /// Orthonormal basis of the range, as columns of a `dim × rank` matrix.
    pub fn range_basis(&self, dim: usize) -> Result<Mat<C64>> {
        match self {
            ProjectorSpec::Indices(idx) => {
                check_indices(idx, dim)?;
                Ok(Mat::from_fn(dim, idx.len(), |i, k| {
                    C64::new(if idx[k] == i { 1.0 } else { 0.0 }, 0.0)
                }))
            }
            ProjectorSpec::Operator(p) => {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: p.dim(),
                    });
                }
                let p2 = p.as_mat() * p.as_mat();
                let deviation = max_abs((&p2 - p.as_mat()).as_ref());
                if deviation > PROJECTOR_TOL {
                    return Err(Error::NotProjector { deviation });
                }
                let (values, basis) = p.eigh()?;
                let cols: Vec<usize> = (0..dim).filter(|&k| values[k] > 0.5).collect();
                Ok(Mat::from_fn(dim, cols.len(), |i, k| basis[(i, cols[k])]))
            }
        }
    }
}
