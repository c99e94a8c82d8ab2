use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;

/// Dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<f64>,
}

/// Eigen-decomposition with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Number of eigenvalues within `tol` of the smallest one.
    pub fn min_multiplicity(&self, tol: f64) -> usize {
        let lo = self.values[0];
        self.values.iter().take_while(|&&v| v - lo < tol).count()
    }
}

impl HermitianOperator {
    /// Wraps a square matrix, rejecting it if it is not symmetric to 1e-12.
    /// The stored matrix is the symmetrized `(A + A^T)/2`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Numerical(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::Numerical(format!("operator asymmetric by {asym:e}")));
        }
        Ok(Self::symmetrized(matrix))
    }

    pub(crate) fn symmetrized(matrix: DMatrix<f64>) -> Self {
        let t = matrix.transpose();
        Self {
            matrix: (matrix + t) * 0.5,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    /// Rank-one projector `|v><v|` (v need not be normalized).
    pub fn projector(v: &[f64]) -> Self {
        let v = DVector::from_column_slice(v);
        Self {
            matrix: &v * v.transpose(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn scaled(&self, s: f64) -> HermitianOperator {
        Self {
            matrix: &self.matrix * s,
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    /// `<v|A|v>` for a real vector.
    pub fn expectation(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        v.dot(&(&self.matrix * &v))
    }

    /// `Tr(A rho)`.
    pub fn expectation_density(&self, rho: &DMatrix<f64>) -> f64 {
        self.matrix.component_mul(rho).sum()
    }

    /// `U^T A U`.
    pub fn conjugated(&self, u: &DMatrix<f64>) -> HermitianOperator {
        Self::symmetrized(u.transpose() * &self.matrix * u)
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }

    pub fn is_symmetric(&self) -> bool {
        (&self.matrix - self.matrix.transpose()).amax() <= SYMMETRY_TOL
    }

    /// Full eigen-decomposition, checked for `||Av - lv|| <= 1e-10 ||A||`.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), order.len(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });

        let scale = self.matrix.norm().max(f64::MIN_POSITIVE);
        for (c, &lambda) in values.iter().enumerate() {
            let v = vectors.column(c);
            let residual = (&self.matrix * v - v * lambda).norm();
            if residual > RESIDUAL_TOL * scale {
                return Err(Error::Numerical(format!(
                    "eigen residual {residual:e} exceeds tolerance for eigenvalue {lambda}"
                )));
            }
        }
        Ok(Spectrum { values, vectors })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.spectrum()?.values)
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.spectrum()?.max())
    }
}
