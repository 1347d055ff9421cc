//! Independent reference computations (nalgebra based) and random instance
//! generators shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen, SVD};
use posthoc::matrix::{ComplexMatrix, RealMatrix};
use posthoc::strategy::{BinaryObservable, ProjectiveMeasurement, SchmidtState};
use posthoc::Tolerances;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;

pub fn to_na(m: &RealMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.as_slice())
}

pub fn to_na_c(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> RealMatrix {
    RealMatrix::from_fn(m.nrows(), |i, j| m[(i, j)])
}

pub fn gaussian_vec(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn random_orthogonal(d: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

/// Projections onto random blocks of a random orthonormal basis, `l` nonempty
/// blocks.
pub fn random_measurement(d: usize, l: usize, rng: &mut impl Rng) -> ProjectiveMeasurement {
    assert!(1 <= l && l <= d);
    let q = random_orthogonal(d, rng);
    let mut owner: Vec<usize> = (0..d).map(|i| if i < l { i } else { rng.random_range(0..l) }).collect();
    for i in (1..d).rev() {
        owner.swap(i, rng.random_range(0..=i));
    }
    let projs = (0..l)
        .map(|a| {
            let mut p = DMatrix::<f64>::zeros(d, d);
            for (i, &o) in owner.iter().enumerate() {
                if o == a {
                    let c = q.column(i);
                    p += c * c.transpose();
                }
            }
            from_na(&p)
        })
        .collect();
    ProjectiveMeasurement::new(projs, &Tolerances::default()).expect("valid measurement")
}

/// Random reflection with `plus` eigenvalues equal to +1.
pub fn random_reflection_rank(d: usize, plus: usize, rng: &mut impl Rng) -> BinaryObservable {
    let q = random_orthogonal(d, rng);
    let diag = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| if i < plus { 1.0 } else { -1.0 }));
    let m = &q * diag * q.transpose();
    BinaryObservable::new(from_na(&m).symmetrize(), &Tolerances::default()).expect("reflection")
}

pub fn random_reflection(d: usize, rng: &mut impl Rng) -> BinaryObservable {
    let plus = rng.random_range(1..d);
    random_reflection_rank(d, plus, rng)
}

pub fn random_state(d: usize, rng: &mut impl Rng) -> SchmidtState {
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.0)).collect();
    SchmidtState::normalized(w).expect("positive weights")
}

/// `sgn(H)` with eigenvalues of `H` computed by nalgebra.
pub fn sign_of(h: &DMatrix<f64>) -> DMatrix<f64> {
    let e = SymmetricEigen::new(h.clone());
    let s = DMatrix::from_diagonal(&e.eigenvalues.map(|x| if x > 0.0 { 1.0 } else { -1.0 }));
    &e.eigenvectors * s * e.eigenvectors.transpose()
}

fn lambda_min_sym(m: &DMatrix<f64>) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(s).eigenvalues.min()
}

fn lambda_min_herm(m: &DMatrix<C64>) -> f64 {
    let s = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(s).eigenvalues.min()
}

/// Orthonormal basis (as columns) of the column space of `m`.
fn range_basis<T: nalgebra::ComplexField<RealField = f64>>(m: DMatrix<T>) -> DMatrix<T> {
    let svd = SVD::new(m, true, false);
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * smax.max(1e-300))
        .collect();
    let u = svd.u.unwrap();
    u.select_columns(&keep)
}

/// Orthonormal basis (as rows) of the null space of the columns of `m`
/// (requires `nrows >= ncols`).
fn null_basis(m: DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = m.ncols();
    let scale = m.abs().max().max(1.0);
    let svd = SVD::new(m, false, true);
    let vt = svd.v_t.unwrap();
    (0..n)
        .filter(|&i| svd.singular_values[i] <= 1e-9 * scale)
        .map(|i| vt.row(i).transpose())
        .collect()
}

fn sample_max(dim: usize, samples: usize, rng: &mut impl Rng, f: impl Fn(&[f64]) -> f64) -> f64 {
    if dim == 0 {
        return f64::NEG_INFINITY;
    }
    let unit = |v: Vec<f64>| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect::<Vec<_>>()
    };
    let mut best = (f64::NEG_INFINITY, vec![0.0; dim]);
    if dim <= 2 {
        let steps = samples.max(4);
        for s in 0..steps {
            let t = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
            let c = if dim == 1 { vec![if s % 2 == 0 { 1.0 } else { -1.0 }] } else { vec![t.cos(), t.sin()] };
            let v = f(&c);
            if v > best.0 {
                best = (v, c);
            }
        }
    } else {
        for _ in 0..samples {
            let c = unit(gaussian_vec(dim, rng));
            let v = f(&c);
            if v > best.0 {
                best = (v, c);
            }
        }
    }
    // Local random refinement around the best sample.
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for _ in 0..30 {
            let trial = unit(best.1.iter().map(|x| x + step * rng.sample::<f64, _>(StandardNormal)).collect());
            let v = f(&trial);
            if v > best.0 {
                best = (v, trial);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best.0
}

/// Best `λ_min(O H)` over unit `H ∈ span{D², D A_x D}` with `O H` symmetric,
/// found by sampling the coefficient sphere.
pub fn oracle_binary(
    weights: &[f64],
    alice: &[RealMatrix],
    target: &RealMatrix,
    samples: usize,
    rng: &mut impl Rng,
) -> f64 {
    let d = weights.len();
    let dm = DMatrix::from_diagonal(&DVector::from_column_slice(weights));
    let o = to_na(target);
    let mut gens = vec![&dm * &dm];
    gens.extend(alice.iter().map(|a| &dm * to_na(a) * &dm));
    let cols: Vec<DVector<f64>> = gens.iter().map(|g| DVector::from_column_slice(g.transpose().as_slice())).collect();
    let basis = range_basis(DMatrix::from_columns(&cols));
    let hs: Vec<DMatrix<f64>> = (0..basis.ncols())
        .map(|k| DMatrix::from_row_slice(d, d, basis.column(k).as_slice()))
        .collect();
    let comm: Vec<DVector<f64>> = hs
        .iter()
        .map(|h| {
            let c = &o * h - h * &o;
            DVector::from_column_slice(c.transpose().as_slice())
        })
        .collect();
    let null = null_basis(DMatrix::from_columns(&comm));
    let family: Vec<DMatrix<f64>> = null
        .iter()
        .map(|n| {
            let mut g = DMatrix::zeros(d, d);
            for (c, h) in n.iter().zip(&hs) {
                g += h * *c;
            }
            &o * g
        })
        .collect();
    sample_max(family.len(), samples, rng, |c| {
        let mut m = DMatrix::zeros(d, d);
        for (ci, f) in c.iter().zip(&family) {
            m += f * *ci;
        }
        lambda_min_sym(&m)
    })
}

/// Best `λ_min(P)` over unit Hermitian `P` with `conj(O)^l P` in the complex
/// span of `{D², D A D}`.
pub fn oracle_general(
    weights: &[f64],
    alice_powers: &[Vec<ComplexMatrix>],
    target: &ComplexMatrix,
    l: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> f64 {
    let d = weights.len();
    let dm = DMatrix::from_diagonal(&DVector::from_column_slice(weights)).map(|x| C64::new(x, 0.0));
    let mut gens = vec![&dm * &dm];
    for p in alice_powers.iter().flatten() {
        gens.push(&dm * to_na_c(p) * &dm);
    }
    let cols: Vec<DVector<C64>> = gens
        .iter()
        .map(|g| DVector::from_column_slice(g.transpose().as_slice()))
        .collect();
    let basis = range_basis(DMatrix::from_columns(&cols));
    let proj = &basis * basis.adjoint();
    let mut w = DMatrix::<C64>::identity(d, d);
    let oc = to_na_c(target).map(|z| z.conj());
    for _ in 0..l {
        w = &w * &oc;
    }
    // Real parametrization of Hermitian matrices.
    let mut herm = Vec::new();
    for j in 0..d {
        for k in j..d {
            let mut s = DMatrix::<C64>::zeros(d, d);
            s[(j, k)] = C64::new(1.0, 0.0);
            s[(k, j)] = C64::new(1.0, 0.0);
            herm.push(if j == k { s * C64::new(0.5, 0.0) } else { s });
            if j != k {
                let mut a = DMatrix::<C64>::zeros(d, d);
                a[(j, k)] = C64::new(0.0, 1.0);
                a[(k, j)] = C64::new(0.0, -1.0);
                herm.push(a);
            }
        }
    }
    let eye = DMatrix::<C64>::identity(d * d, d * d);
    let resid: Vec<DVector<f64>> = herm
        .iter()
        .map(|e| {
            let v = DVector::from_column_slice((&w * e).transpose().as_slice());
            let r = (&eye - &proj) * v;
            DVector::from_iterator(2 * d * d, r.iter().map(|z| z.re).chain(r.iter().map(|z| z.im)))
        })
        .collect();
    let null = null_basis(DMatrix::from_columns(&resid));
    // Orthonormalize the resulting Hermitian directions under the trace inner product.
    let dirs: Vec<DVector<f64>> = null
        .iter()
        .map(|n| {
            let mut p = DMatrix::<C64>::zeros(d, d);
            for (c, e) in n.iter().zip(&herm) {
                p += e * C64::new(*c, 0.0);
            }
            DVector::from_iterator(2 * d * d, p.iter().map(|z| z.re).chain(p.iter().map(|z| z.im)))
        })
        .collect();
    if dirs.is_empty() {
        return f64::NEG_INFINITY;
    }
    let q = range_basis(DMatrix::from_columns(&dirs));
    let family: Vec<DMatrix<C64>> = (0..q.ncols())
        .map(|k| {
            let col = q.column(k);
            DMatrix::from_fn(d, d, |i, j| {
                // nalgebra stores column-major: entry (i, j) sits at j * d + i.
                C64::new(col[j * d + i], col[d * d + j * d + i])
            })
        })
        .collect();
    sample_max(family.len(), samples, rng, |c| {
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (ci, f) in c.iter().zip(&family) {
            m += f * C64::new(*ci, 0.0);
        }
        lambda_min_herm(&m)
    })
}

/// `⟨ψ|A ⊗ B|ψ⟩` with `|ψ⟩ = Σ λ_i |ii⟩`, via the explicit Kronecker product.
pub fn kron_correlation(weights: &[f64], a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let d = weights.len();
    let mut psi = DVector::<C64>::zeros(d * d);
    for (i, w) in weights.iter().enumerate() {
        psi[i * d + i] = C64::new(*w, 0.0);
    }
    let k = a.kronecker(b);
    (psi.adjoint() * k * &psi)[(0, 0)]
}

/// A random instance of the vector recovery setting: returns the bound and
/// the actual distance `‖v − ṽ‖`.
pub fn vector_recovery_instance(rng: &mut impl Rng) -> (f64, f64) {
    let dim = rng.random_range(1..=4);
    let n = rng.random_range(1..=dim.min(3));
    let ideal: Vec<DVector<f64>> = (0..n).map(|_| DVector::from_vec(gaussian_vec(dim, rng))).collect();
    let gram = DMatrix::from_fn(n, n, |j, k| ideal[j].dot(&ideal[k]));
    let lambda_min_g = SymmetricEigen::new(gram).eigenvalues.min();
    let alpha = gaussian_vec(n, rng);
    let v_ideal = ideal.iter().zip(&alpha).fold(DVector::zeros(dim), |acc, (v, a)| acc + v * *a);
    let eps_scale = 10f64.powf(rng.random_range(-4.0..-0.5));
    let actual: Vec<DVector<f64>> = ideal
        .iter()
        .map(|v| v + DVector::from_vec(gaussian_vec(dim, rng)) * (eps_scale * rng.random_range(0.0..1.0)))
        .collect();
    let mut v = &v_ideal + DVector::from_vec(gaussian_vec(dim, rng)) * (eps_scale * rng.random_range(0.0..2.0));
    if v.norm() > v_ideal.norm() {
        v *= v_ideal.norm() / v.norm() * rng.random_range(0.9..1.0);
    }
    let epsilon = ideal.iter().zip(&actual).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) * (1.0 + 1e-12) + 1e-300;
    let delta = ideal
        .iter()
        .zip(&actual)
        .map(|(vi, va)| (va.dot(&v) - vi.dot(&v_ideal)).abs())
        .fold(0.0, f64::max)
        * (1.0 + 1e-12)
        + 1e-300;
    let bound = posthoc::posthoc::vector_recovery_bound(n, lambda_min_g, epsilon, delta, v_ideal.norm())
        .expect("valid parameters");
    (bound, (v - v_ideal).norm())
}
