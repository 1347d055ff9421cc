//! Pivoted Gram-Schmidt, numerical rank, null spaces and Cholesky solves on
//! plain `Vec<f64>` vectors.

use num_complex::Complex64;

use super::RealMatrix;
use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `a += s * b`.
pub fn axpy(a: &mut [f64], s: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

/// Result of pivoted orthonormalization.
#[derive(Debug, Clone)]
pub struct Orthonormalized {
    pub basis: Vec<Vec<f64>>,
    /// Index of the input vector chosen at each step.
    pub pivots: Vec<usize>,
}

/// Modified Gram-Schmidt with column pivoting and one re-orthogonalization pass.
///
/// Each step takes the input with the largest remaining residual, so the span
/// found does not depend on input order. Stops once every residual is at most
/// `tol` times the largest input norm.
pub fn orthonormalize(vectors: &[Vec<f64>], tol: f64) -> Orthonormalized {
    orthonormalize_scaled(vectors, tol, 0.0)
}

/// [`orthonormalize`] with the threshold taken relative to
/// `max(scale, largest input norm)`.
fn orthonormalize_scaled(vectors: &[Vec<f64>], tol: f64, scale: f64) -> Orthonormalized {
    let scale = vectors.iter().map(|v| norm(v)).fold(scale, f64::max);
    let mut out = Orthonormalized {
        basis: Vec::new(),
        pivots: Vec::new(),
    };
    if scale == 0.0 {
        return out;
    }
    let threshold = tol * scale;
    let mut residuals: Vec<Vec<f64>> = vectors.to_vec();
    let mut used = vec![false; vectors.len()];

    loop {
        let mut best = None;
        let mut best_norm = threshold;
        for (i, r) in residuals.iter().enumerate() {
            if used[i] {
                continue;
            }
            let n = norm(r);
            if n > best_norm {
                best_norm = n;
                best = Some(i);
            }
        }
        let Some(i) = best else { break };
        used[i] = true;

        let mut q = residuals[i].clone();
        for b in &out.basis {
            let c = dot(b, &q);
            axpy(&mut q, -c, b);
        }
        let n = norm(&q);
        if n <= threshold {
            continue;
        }
        q.iter_mut().for_each(|x| *x /= n);
        for (j, r) in residuals.iter_mut().enumerate() {
            if !used[j] {
                let c = dot(&q, r);
                axpy(r, -c, &q);
            }
        }
        out.basis.push(q);
        out.pivots.push(i);
    }
    out
}

/// Complex analogue of [`orthonormalize`] under `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn orthonormalize_complex(vectors: &[Vec<Complex64>], tol: f64) -> Vec<Vec<Complex64>> {
    let cnorm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = vectors.iter().map(|v| cnorm(v)).fold(0.0f64, f64::max);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    let threshold = tol * scale;
    let mut residuals: Vec<Vec<Complex64>> = vectors.to_vec();
    let mut used = vec![false; vectors.len()];
    loop {
        let mut best = None;
        let mut best_norm = threshold;
        for (i, r) in residuals.iter().enumerate() {
            let n = cnorm(r);
            if !used[i] && n > best_norm {
                best_norm = n;
                best = Some(i);
            }
        }
        let Some(i) = best else { break };
        used[i] = true;
        let mut q = residuals[i].clone();
        for b in &basis {
            let c: Complex64 = b.iter().zip(&q).map(|(x, y)| x.conj() * y).sum();
            q.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = cnorm(&q);
        if n <= threshold {
            continue;
        }
        q.iter_mut().for_each(|x| *x /= n);
        for (j, r) in residuals.iter_mut().enumerate() {
            if !used[j] {
                let c: Complex64 = q.iter().zip(r.iter()).map(|(x, y)| x.conj() * y).sum();
                r.iter_mut().zip(&q).for_each(|(x, y)| *x -= c * y);
            }
        }
        basis.push(q);
    }
    basis
}

/// Rank of a family of matrices under the Frobenius inner product.
pub fn numerical_rank(mats: &[RealMatrix], tol: f64) -> Result<usize> {
    let first = mats.first().ok_or(Error::EmptyInput)?;
    for m in mats {
        first.check_same_dim(m)?;
    }
    let vectors: Vec<Vec<f64>> = mats.iter().map(|m| m.as_slice().to_vec()).collect();
    Ok(orthonormalize(&vectors, tol).basis.len())
}

/// Orthonormal completion of an orthonormal family to all of ℝⁿ, built from the
/// standard basis vectors.
pub fn orthogonal_complement(basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = basis.to_vec();
    let mut complement = Vec::new();
    let mut candidates: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            for b in basis {
                let c = dot(b, &e);
                axpy(&mut e, -c, b);
            }
            e
        })
        .collect();
    while all.len() < n {
        let (idx, _) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm(c)))
            .fold((usize::MAX, 0.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        if idx == usize::MAX {
            break;
        }
        let mut q = candidates.swap_remove(idx);
        for _ in 0..2 {
            for b in &all {
                let c = dot(b, &q);
                axpy(&mut q, -c, b);
            }
        }
        let nq = norm(&q);
        if nq < 1e-8 {
            continue;
        }
        q.iter_mut().for_each(|x| *x /= nq);
        for c in candidates.iter_mut() {
            let s = dot(&q, c);
            axpy(c, -s, &q);
        }
        all.push(q.clone());
        complement.push(q);
    }
    complement
}

/// Orthonormal basis of `{x ∈ ℝⁿ : r·x = 0 for every row r}`.
///
/// Rows are first reduced to an orthonormal basis of the row space with
/// relative tolerance `tol`; the null space is its orthogonal complement.
pub fn null_space(rows: &[Vec<f64>], n: usize, tol: f64) -> Vec<Vec<f64>> {
    let row_basis = orthonormalize(rows, tol).basis;
    orthogonal_complement(&row_basis, n)
}

/// [`null_space`] for a map whose norm is known to be about `scale`: rows
/// shorter than `tol · scale` count as zero even when every row is tiny.
pub fn null_space_scaled(rows: &[Vec<f64>], n: usize, tol: f64, scale: f64) -> Vec<Vec<f64>> {
    let row_basis = orthonormalize_scaled(rows, tol, scale).basis;
    orthogonal_complement(&row_basis, n)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix,
/// or `None` if a pivot is not positive.
pub fn cholesky(a: &RealMatrix) -> Option<RealMatrix> {
    let n = a.dim();
    let mut l = RealMatrix::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor `L`.
pub fn cholesky_solve(l: &RealMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.dim();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Inverse of an SPD matrix from its Cholesky factor.
pub fn cholesky_inverse(l: &RealMatrix) -> RealMatrix {
    let n = l.dim();
    let mut inv = RealMatrix::zeros(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = cholesky_solve(l, &e);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    inv.symmetrize()
}

/// Least-squares solution of `A x = b` for a tall matrix given by its columns,
/// via Gram-Schmidt QR. Columns must be linearly independent.
pub fn least_squares(columns: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let k = columns.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0; k]; k];
    for (j, col) in columns.iter().enumerate() {
        let mut v = col.clone();
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = dot(qi, &v);
                r[i][j] += c;
                axpy(&mut v, -c, qi);
            }
        }
        let n = norm(&v);
        r[j][j] = n;
        v.iter_mut().for_each(|x| *x /= n);
        q.push(v);
    }
    let qtb: Vec<f64> = q.iter().map(|qi| dot(qi, b)).collect();
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qtb[i];
        for j in (i + 1)..k {
            s -= r[i][j] * x[j];
        }
        x[i] = s / r[i][i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pauli() -> (RealMatrix, RealMatrix) {
        (
            RealMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
            RealMatrix::diag(&[1.0, -1.0]),
        )
    }

    #[test]
    fn rank_examples() {
        let (x, z) = pauli();
        assert_eq!(numerical_rank(&[RealMatrix::identity(2)], 1e-9).unwrap(), 1);
        assert_eq!(
            numerical_rank(&[RealMatrix::identity(2), x, z], 1e-9).unwrap(),
            3
        );
        assert!(matches!(numerical_rank(&[], 1e-9), Err(Error::EmptyInput)));
    }

    #[test]
    fn rank_detects_dependence() {
        let (x, z) = pauli();
        let sum = &x + &z;
        assert_eq!(numerical_rank(&[x, z, sum], 1e-9).unwrap(), 2);
    }

    #[test]
    fn null_space_of_single_row() {
        let ns = null_space(&[vec![1.0, 1.0, 0.0]], 3, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot(v, &[1.0, 1.0, 0.0]).abs() < 1e-14);
            assert!((norm(v) - 1.0).abs() < 1e-14);
        }
        assert!(dot(&ns[0], &ns[1]).abs() < 1e-14);
    }

    #[test]
    fn cholesky_round_trip() {
        let a = RealMatrix::from_rows(&[&[4.0, 2.0, 0.6], &[2.0, 5.0, 1.0], &[0.6, 1.0, 3.0]]);
        let l = cholesky(&a).unwrap();
        assert!((&l * &l.transpose()).max_abs_diff(&a) < 1e-14);
        let x = cholesky_solve(&l, &[1.0, 2.0, 3.0]);
        let ax = a.mul_vec(&x);
        assert!((ax[0] - 1.0).abs() < 1e-13 && (ax[2] - 3.0).abs() < 1e-13);
        assert!((&a * &cholesky_inverse(&l)).max_abs_diff(&RealMatrix::identity(3)) < 1e-13);
        assert!(cholesky(&RealMatrix::diag(&[1.0, -1.0])).is_none());
    }

    #[test]
    fn least_squares_recovers_coefficients() {
        let cols = vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
        let b = vec![2.0, -1.0, 1.0];
        let x = least_squares(&cols, &b);
        assert!((x[0] - 2.0).abs() < 1e-14 && (x[1] + 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn rank_is_order_independent(
            seed in proptest::collection::vec(-1.0f64..1.0, 12),
            perm in Just(vec![3usize, 1, 4, 0, 2]).prop_shuffle(),
        ) {
            // Five 2×2 matrices in a 3-dimensional subspace plus one repeat.
            let basis = [
                RealMatrix::identity(2),
                RealMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
                RealMatrix::diag(&[1.0, -1.0]),
            ];
            let mats: Vec<RealMatrix> = (0..4).map(|k| {
                let mut m = RealMatrix::zeros(2);
                for (b, s) in basis.iter().zip(&seed[3 * k..3 * k + 3]) {
                    m.axpy(*s, b);
                }
                m
            }).chain(std::iter::once(basis[0].clone())).collect();
            let r0 = numerical_rank(&mats, 1e-9).unwrap();
            let shuffled: Vec<RealMatrix> = perm.iter().map(|&i| mats[i].clone()).collect();
            prop_assert_eq!(r0, numerical_rank(&shuffled, 1e-9).unwrap());
            prop_assert!(r0 <= 3);
        }
    }
}
