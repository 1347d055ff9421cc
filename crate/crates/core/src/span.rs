//! Frobenius-orthonormal bases of subspaces of symmetric matrices.

use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, norm, orthonormalize, RealMatrix};

/// Norm below which a candidate is treated as the zero matrix.
const NEGLIGIBLE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct SpanBasis {
    dim: usize,
    basis: Vec<RealMatrix>,
    tol: f64,
}

/// Outcome of a membership test.
#[derive(Debug, Clone)]
pub struct Membership {
    pub inside: bool,
    /// Frobenius projections onto the basis elements.
    pub coefficients: Vec<f64>,
    /// Frobenius norm of the part of the matrix outside the span.
    pub residual: f64,
}

impl SpanBasis {
    pub fn empty(dim: usize, tol: f64) -> Self {
        Self {
            dim,
            basis: Vec::new(),
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[RealMatrix] {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn residual_vector(&self, m: &RealMatrix) -> (Vec<f64>, Vec<f64>) {
        let mut r = m.as_slice().to_vec();
        let mut coeffs = vec![0.0; self.basis.len()];
        for _ in 0..2 {
            for (c, b) in coeffs.iter_mut().zip(&self.basis) {
                let s = dot(b.as_slice(), &r);
                *c += s;
                axpy(&mut r, -s, b.as_slice());
            }
        }
        (coeffs, r)
    }

    /// Projects `m` onto the span.
    pub fn contains(&self, m: &RealMatrix) -> Result<Membership> {
        if m.dim() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: m.dim(),
            });
        }
        let (coefficients, r) = self.residual_vector(m);
        let residual = norm(&r);
        Ok(Membership {
            inside: residual <= self.tol * m.frobenius_norm().max(1.0),
            coefficients,
            residual,
        })
    }

    /// Adds the component of `m` orthogonal to the span when it exceeds `tol`
    /// relative to `‖m‖_F`. Returns whether the span grew.
    pub fn extend(&mut self, m: &RealMatrix) -> Result<bool> {
        if m.dim() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: m.dim(),
            });
        }
        let scale = m.frobenius_norm();
        if scale <= NEGLIGIBLE || self.basis.len() == self.dim * self.dim {
            return Ok(false);
        }
        let (_, mut r) = self.residual_vector(m);
        let n = norm(&r);
        if n <= self.tol * scale {
            return Ok(false);
        }
        r.iter_mut().for_each(|x| *x /= n);
        self.basis.push(RealMatrix::from_row_major(r)?);
        Ok(true)
    }

    /// `Σ c_k basis_k`.
    pub fn combine(&self, coeffs: &[f64]) -> RealMatrix {
        let mut out = RealMatrix::zeros(self.dim);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out.axpy(*c, b);
        }
        out
    }

    /// Whether every basis element of `other` lies in this span.
    pub fn includes(&self, other: &SpanBasis) -> Result<bool> {
        for b in &other.basis {
            if !self.contains(b)?.inside {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Orthonormal basis of `span{mats}`; its size is the numerical rank at `tol`.
pub fn span_basis(mats: &[RealMatrix], tol: f64) -> Result<SpanBasis> {
    let first = mats.first().ok_or(Error::EmptyInput)?;
    let dim = first.dim();
    for m in mats {
        first.check_same_dim(m)?;
    }
    let vectors: Vec<Vec<f64>> = mats.iter().map(|m| m.as_slice().to_vec()).collect();
    let basis = orthonormalize(&vectors, tol)
        .basis
        .into_iter()
        .map(RealMatrix::from_row_major)
        .collect::<Result<Vec<_>>>()?;
    Ok(SpanBasis { dim, basis, tol })
}
