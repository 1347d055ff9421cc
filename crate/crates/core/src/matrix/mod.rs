//! Dense real and complex matrices and the numerical kernels built on them.

mod dense;
mod eigen;
mod ortho;

pub use dense::{ComplexMatrix, RealMatrix};
pub use eigen::{lambda_min, sgn_map, sym_eig, sym_eigenvalues, EigenDecomposition, SignImage};
pub use ortho::{
    axpy, cholesky, cholesky_inverse, cholesky_solve, dot, least_squares, norm, null_space, null_space_scaled,
    numerical_rank, orthogonal_complement, orthonormalize, orthonormalize_complex, Orthonormalized,
};

use crate::error::Result;

/// `Tr[Aᵀ B]`.
pub fn frobenius_inner(a: &RealMatrix, b: &RealMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    Ok(dot(a.as_slice(), b.as_slice()))
}

/// Pauli X and Z as real 2×2 matrices; used throughout the tests.
pub fn pauli_x() -> RealMatrix {
    RealMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_z() -> RealMatrix {
    RealMatrix::diag(&[1.0, -1.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_examples() {
        let i3 = RealMatrix::identity(3);
        assert_eq!(frobenius_inner(&i3, &i3).unwrap(), 3.0);
        assert_eq!(frobenius_inner(&pauli_x(), &pauli_z()).unwrap(), 0.0);
        assert!(frobenius_inner(&i3, &pauli_x()).is_err());
    }
}
