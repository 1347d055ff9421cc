//! Jordan-algebra closure, sign-span rounds, cut-point observables and the
//! centralizer test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::{orthonormalize, sym_eig, RealMatrix};
use crate::span::{span_basis, SpanBasis};

/// `a ⋆ b = (ab + ba) / 2`.
pub fn jordan_product(a: &RealMatrix, b: &RealMatrix) -> Result<RealMatrix> {
    a.check_same_dim(b)?;
    Ok((&(a * b) + &(b * a)).scale(0.5))
}

#[derive(Debug, Clone)]
pub struct JordanClosure {
    pub span: SpanBasis,
    /// Number of doubling rounds that enlarged the span.
    pub iterations: usize,
    /// Dimension after each round, starting with the initial span.
    pub round_dims: Vec<usize>,
}

impl JordanClosure {
    pub fn dimension(&self) -> usize {
        self.span.len()
    }

    /// The closure is all of `H_d(ℝ)`.
    pub fn is_full(&self) -> bool {
        let d = self.span.dim();
        self.span.len() == d * (d + 1) / 2
    }
}

fn check_generators(generators: &[RealMatrix], tol: &Tolerances) -> Result<usize> {
    let first = generators.first().ok_or(Error::EmptyInput)?;
    for g in generators {
        first.check_same_dim(g)?;
        g.check_symmetric(tol.sym_tol)?;
    }
    Ok(first.dim())
}

/// One doubling round: the span of the current basis and all pairwise Jordan
/// products of its elements.
pub fn doubling_round(span: &SpanBasis) -> Result<SpanBasis> {
    let mut next = span.clone();
    let basis = span.basis();
    for i in 0..basis.len() {
        for j in i..basis.len() {
            next.extend(&jordan_product(&basis[i], &basis[j])?)?;
        }
    }
    Ok(next)
}

/// Smallest Jordan algebra containing `I`, the generators and `extra`.
///
/// `extra` holds additional generators (for example the other party's
/// observables) that enter the initial span alongside `generators`.
pub fn jordan_closure(
    generators: &[RealMatrix],
    extra: &[RealMatrix],
    tol: &Tolerances,
) -> Result<JordanClosure> {
    let d = check_generators(generators, tol)?;
    let mut init = vec![RealMatrix::identity(d)];
    init.extend(generators.iter().map(RealMatrix::symmetrize));
    for e in extra {
        e.check_symmetric(tol.sym_tol)?;
        if e.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: e.dim() });
        }
        init.push(e.symmetrize());
    }
    let mut span = span_basis(&init, tol.membership_tol)?;
    let mut round_dims = vec![span.len()];
    let mut iterations = 0;
    loop {
        let next = doubling_round(&span)?;
        if next.len() == span.len() {
            break;
        }
        iterations += 1;
        round_dims.push(next.len());
        span = next;
    }
    Ok(JordanClosure {
        span,
        iterations,
        round_dims,
    })
}

/// Binary observables `sgn(H − r I)` for every midpoint `r` between consecutive
/// distinct eigenvalues of `H`, largest cut first.
///
/// Empty when `H` is a multiple of the identity.
pub fn cut_point_observables(h: &RealMatrix, tol: &Tolerances) -> Result<Vec<RealMatrix>> {
    let eig = sym_eig(h, tol.sym_tol)?;
    let scale = eig.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let gap_tol = tol.eig_tol * scale;
    let n = eig.values.len();
    let mut out = Vec::new();
    for i in 0..n.saturating_sub(1) {
        if eig.values[i] - eig.values[i + 1] > gap_tol {
            let r = 0.5 * (eig.values[i] + eig.values[i + 1]);
            out.push(eig.apply(|x| if x > r { 1.0 } else { -1.0 }));
        }
    }
    Ok(out)
}

/// One sign round: the span of the cut-point observables of elements of
/// `span`, which equals the span of all polynomials of its elements.
///
/// Elements are sampled as Gaussian combinations of the basis until
/// `patience` consecutive samples add nothing.
pub fn sign_round(
    span: &SpanBasis,
    seed: u64,
    patience: usize,
    tol: &Tolerances,
) -> Result<SpanBasis> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = span.dim();
    let mut next = span.clone();
    next.extend(&RealMatrix::identity(d))?;
    let cap = d * (d + 1) / 2;
    let mut idle = 0;
    while idle < patience && next.len() < cap {
        let coeffs: Vec<f64> = (0..span.len()).map(|_| rng.sample(StandardNormal)).collect();
        let x = span.combine(&coeffs);
        let mut grew = false;
        for o in cut_point_observables(&x, tol)? {
            grew |= next.extend(&o)?;
        }
        idle = if grew { 0 } else { idle + 1 };
    }
    Ok(next)
}

/// Whether only multiples of the identity commute with every generator,
/// decided by the rank of the commutation system in the `d²` entries of `S`.
pub fn has_trivial_centralizer(generators: &[RealMatrix], tol: &Tolerances) -> Result<bool> {
    let d = check_generators(generators, tol)?;
    let n = d * d;
    let mut rows = Vec::with_capacity(generators.len() * n);
    for a in generators {
        // (SA − AS)_ij = Σ_k S_ik A_kj − A_ik S_kj
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![0.0; n];
                for k in 0..d {
                    row[i * d + k] += a[(k, j)];
                    row[k * d + j] -= a[(i, k)];
                }
                rows.push(row);
            }
        }
    }
    let rank = orthonormalize(&rows, tol.rank_tol).basis.len();
    Ok(n - rank == 1)
}

/// Dimension-count predicate for the existence of observables that share
/// correlations with `n` questions yet are not equivalent.
pub fn degeneracy_possible(d: usize, n: usize, maximally_entangled: bool) -> bool {
    let q = d * d / 4;
    q > n + 1 || (maximally_entangled && q > n)
}
