use super::RealMatrix;
use crate::config::Tolerances;
use crate::error::Result;

/// Off-diagonal mass (relative to ‖H‖_F) at which Jacobi sweeps stop.
const JACOBI_TARGET: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
/// Components smaller than this are skipped when fixing eigenvector signs.
const SIGN_PIVOT: f64 = 1e-12;

/// Eigenvalues in descending order; `vectors` holds the eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: RealMatrix,
}

impl EigenDecomposition {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// `V f(Λ) Vᵀ`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> RealMatrix {
        let n = self.values.len();
        let mut out = RealMatrix::zeros(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            let v = self.eigenvector(k);
            for i in 0..n {
                let vi = w * v[i];
                for j in 0..n {
                    out[(i, j)] += vi * v[j];
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> RealMatrix {
        self.apply(|x| x)
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Fails with `NotSymmetric` when the input is further than `sym_tol` from
/// symmetric; otherwise the symmetric part is decomposed.
pub fn sym_eig(h: &RealMatrix, sym_tol: f64) -> Result<EigenDecomposition> {
    h.check_symmetric(sym_tol)?;
    Ok(jacobi(&h.symmetrize()))
}

/// Eigenvalues only, descending, of the symmetric part of `h`.
pub fn sym_eigenvalues(h: &RealMatrix) -> Vec<f64> {
    jacobi(&h.symmetrize()).values
}

/// Smallest eigenvalue of the symmetric part of `h`.
pub fn lambda_min(h: &RealMatrix) -> f64 {
    jacobi(&h.symmetrize()).min()
}

fn jacobi(h: &RealMatrix) -> EigenDecomposition {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = RealMatrix::identity(n);
    let target = JACOBI_TARGET * h.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut col = v.column(k);
            if let Some(first) = col.iter().find(|x| x.abs() > SIGN_PIVOT) {
                if *first < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (a[(k, k)], col)
        })
        .collect();

    // Descending by value; within a numerically tied cluster, by the vectors
    // themselves so the output does not depend on rotation order.
    let tie = 1e-12 * h.frobenius_norm().max(f64::MIN_POSITIVE);
    pairs.sort_by(|x, y| {
        if (x.0 - y.0).abs() <= tie {
            y.1.partial_cmp(&x.1).unwrap_or(std::cmp::Ordering::Equal)
        } else {
            y.0.total_cmp(&x.0)
        }
    });

    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = RealMatrix::from_fn(n, |i, j| pairs[j].1[i]);
    EigenDecomposition { values, vectors }
}

fn off_diagonal_norm(a: &RealMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Output of the sign map.
#[derive(Debug, Clone)]
pub struct SignImage {
    pub matrix: RealMatrix,
    /// Some eigenvalue was within `singular_tol · ‖H‖₂` of zero and was mapped to 0.
    pub singular: bool,
}

/// `sgn(H) = Σ sgn(λ_j) v_j v_jᵀ`, with near-zero eigenvalues mapped to 0.
pub fn sgn_map(h: &RealMatrix, tol: &Tolerances) -> Result<SignImage> {
    let eig = sym_eig(h, tol.sym_tol)?;
    let scale = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cutoff = tol.singular_tol * scale;
    let singular = scale == 0.0 || eig.values.iter().any(|x| x.abs() <= cutoff);
    let matrix = eig.apply(|x| {
        if x.abs() <= cutoff {
            0.0
        } else {
            x.signum()
        }
    });
    Ok(SignImage { matrix, singular })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut impl Rng) -> RealMatrix {
        let m = RealMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        m.symmetrize()
    }

    /// Orthogonal matrix from Gram-Schmidt on a random square matrix.
    fn random_orthogonal(n: usize, rng: &mut impl Rng) -> RealMatrix {
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let q = crate::matrix::orthonormalize(&cols, 1e-12).basis;
        assert_eq!(q.len(), n);
        RealMatrix::from_fn(n, |i, j| q[j][i])
    }

    #[test]
    fn diagonal_input() {
        let e = sym_eig(&RealMatrix::diag(&[2.0, 1.0]), 1e-10).unwrap();
        assert_eq!(e.values, vec![2.0, 1.0]);
        assert_eq!(e.vectors, RealMatrix::identity(2));
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = RealMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = sym_eig(&x, 1e-10).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.eigenvector(0);
        let v1 = e.eigenvector(1);
        assert!((v0[0] - r).abs() < 1e-15 && (v0[1] - r).abs() < 1e-15);
        assert!((v1[0] - r).abs() < 1e-15 && (v1[1] + r).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = RealMatrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            sym_eig(&m, 1e-10),
            Err(crate::Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = random_symmetric(6, &mut rng);
        let e = sym_eig(&h, 1e-10).unwrap();
        assert!(e.reconstruct().frobenius_distance(&h) <= 1e-10 * h.frobenius_norm());
        let vtv = &e.vectors.transpose() * &e.vectors;
        assert!(vtv.max_abs_diff(&RealMatrix::identity(6)) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_symmetric(5, &mut rng);
        let a = sym_eig(&h, 1e-10).unwrap();
        let b = sym_eig(&h, 1e-10).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
    }

    #[test]
    fn sign_of_diagonal_and_identity() {
        let tol = Tolerances::default();
        let s = sgn_map(&RealMatrix::diag(&[3.0, -2.0]), &tol).unwrap();
        assert!(s.matrix.max_abs_diff(&RealMatrix::diag(&[1.0, -1.0])) < 1e-15);
        assert!(!s.singular);
        let s = sgn_map(&RealMatrix::identity(4), &tol).unwrap();
        assert!(s.matrix.max_abs_diff(&RealMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn sign_flags_zero_eigenvalue() {
        let tol = Tolerances::default();
        let s = sgn_map(&RealMatrix::diag(&[1.0, 0.0, -1.0]), &tol).unwrap();
        assert!(s.singular);
        assert!(s.matrix.max_abs_diff(&RealMatrix::diag(&[1.0, 0.0, -1.0])) < 1e-15);
        assert!(sgn_map(&RealMatrix::zeros(2), &tol).unwrap().singular);
    }

    /// Roots of the characteristic polynomial of a symmetric 3×3 matrix via the
    /// trigonometric solution of the depressed cubic.
    fn closed_form_3x3(a: &RealMatrix) -> [f64; 3] {
        let q = a.trace() / 3.0;
        let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2)
            + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = RealMatrix::from_fn(3, |i, j| {
            (a[(i, j)] - if i == j { q } else { 0.0 }) / p
        });
        let det_b = b[(0, 0)] * (b[(1, 1)] * b[(2, 2)] - b[(1, 2)] * b[(2, 1)])
            - b[(0, 1)] * (b[(1, 0)] * b[(2, 2)] - b[(1, 2)] * b[(2, 0)])
            + b[(0, 2)] * (b[(1, 0)] * b[(2, 1)] - b[(1, 1)] * b[(2, 0)]);
        let r = (det_b / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        [e1, 3.0 * q - e1 - e3, e3]
    }

    proptest! {
        #[test]
        fn eigenvalues_match_characteristic_roots(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_symmetric(3, &mut rng);
            let e = sym_eig(&h, 1e-10).unwrap();
            let roots = closed_form_3x3(&h);
            for (x, y) in e.values.iter().zip(roots) {
                prop_assert!((x - y).abs() < 1e-9);
            }
            let h2 = random_symmetric(2, &mut rng);
            let (t, det) = (h2.trace(), h2[(0, 0)] * h2[(1, 1)] - h2[(0, 1)] * h2[(1, 0)]);
            let disc = (t * t / 4.0 - det).sqrt();
            let e2 = sym_eig(&h2, 1e-10).unwrap();
            prop_assert!((e2.values[0] - (t / 2.0 + disc)).abs() < 1e-12);
            prop_assert!((e2.values[1] - (t / 2.0 - disc)).abs() < 1e-12);
        }

        #[test]
        fn sign_map_properties(seed in any::<u64>(), n in 2usize..7, scale in 0.01f64..100.0) {
            let tol = Tolerances::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_symmetric(n, &mut rng);
            let s = sgn_map(&h, &tol).unwrap();
            prop_assume!(!s.singular);
            let m = &s.matrix;
            prop_assert!(m.asymmetry() < 1e-12);
            for x in sym_eigenvalues(m) {
                prop_assert!((x.abs() - 1.0).abs() < 1e-9);
            }
            prop_assert!(lambda_min(&(m * &h)) > -1e-9);
            prop_assert!((&(m * &h) - &(&h * m)).max_abs() < 1e-9);
            // idempotence
            prop_assert!(sgn_map(m, &tol).unwrap().matrix.max_abs_diff(m) < 1e-9);
            // positive scaling
            prop_assert!(sgn_map(&h.scale(scale), &tol).unwrap().matrix.max_abs_diff(m) < 1e-9);
            // orthogonal covariance
            let u = random_orthogonal(n, &mut rng);
            let ut = u.transpose();
            let lhs = sgn_map(&(&(&u * &h) * &ut).symmetrize(), &tol).unwrap().matrix;
            let rhs = &(&u * m) * &ut;
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-9);
            // a binary observable is its own sign
            prop_assert!(sgn_map(m, &tol).unwrap().matrix.max_abs_diff(m) < 1e-9);
        }
    }
}
