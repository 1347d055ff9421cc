//! Regular-simplex reflections `T_x`, pair observables `T_jk` and the
//! independent family used as Bob's question set.

use std::collections::BTreeMap;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::{dot, norm, sgn_map, RealMatrix};
use crate::strategy::{BinaryObservable, SchmidtState, Strategy};

fn require_dim(d: usize, min: usize, reason: &str) -> Result<()> {
    if d < min {
        return Err(Error::BadDimension {
            dim: d,
            reason: reason.into(),
        });
    }
    Ok(())
}

/// `d + 1` unit vectors in `ℝ^d` with pairwise inner product `−1/d`.
///
/// Built by rotating the all-ones direction of `ℝ^{d+1}` onto the first axis
/// and projecting the standard basis onto its orthogonal complement.
pub fn simplex_vectors(d: usize) -> Result<Vec<Vec<f64>>> {
    require_dim(d, 2, "a simplex needs d >= 2")?;
    let n = d + 1;
    let ones = vec![1.0 / (n as f64).sqrt(); n];
    let mut rows = vec![ones.clone()];
    for i in 1..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push(e);
    }
    // Sequential (unpivoted) Gram-Schmidt keeps the all-ones row first.
    let mut u: Vec<Vec<f64>> = Vec::with_capacity(n);
    for r in rows {
        let mut q = r;
        for _ in 0..2 {
            for b in &u {
                let c = dot(b, &q);
                crate::matrix::axpy(&mut q, -c, b);
            }
        }
        let nq = norm(&q);
        q.iter_mut().for_each(|x| *x /= nq);
        u.push(q);
    }

    let vectors = (0..n)
        .map(|x| {
            let mut f = vec![0.0; n];
            f[x] = 1.0;
            let c = ones[x];
            crate::matrix::axpy(&mut f, -c, &ones);
            let nf = norm(&f);
            f.iter_mut().for_each(|v| *v /= nf);
            u[1..].iter().map(|row| dot(row, &f)).collect()
        })
        .collect();
    Ok(vectors)
}

/// `T_x = 2 v_x v_xᵀ − I`.
pub fn simplex_observables(d: usize) -> Result<Vec<BinaryObservable>> {
    let tol = Tolerances::default();
    simplex_vectors(d)?
        .iter()
        .map(|v| reflection(v, &tol))
        .collect()
}

fn reflection(v: &[f64], tol: &Tolerances) -> Result<BinaryObservable> {
    let n = v.len();
    let m = &RealMatrix::outer(v, v).scale(2.0) - &RealMatrix::identity(n);
    BinaryObservable::new(m, tol)
}

/// `T_jk = sgn(T_j + T_k)` for `0 ≤ j < k ≤ d`, via the sign map.
pub fn pair_observables(d: usize) -> Result<BTreeMap<(usize, usize), BinaryObservable>> {
    let tol = Tolerances::default();
    let t = simplex_observables(d)?;
    let mut out = BTreeMap::new();
    for j in 0..=d {
        for k in (j + 1)..=d {
            let s = sgn_map(&(t[j].matrix() + t[k].matrix()), &tol)?;
            out.insert((j, k), BinaryObservable::new(s.matrix, &tol)?);
        }
    }
    Ok(out)
}

/// Closed form `T_jk = 2 w wᵀ − I` with `w = √(d / 2(d+1)) (v_j − v_k)`.
pub fn pair_observables_closed_form(
    d: usize,
) -> Result<BTreeMap<(usize, usize), BinaryObservable>> {
    let tol = Tolerances::default();
    let v = simplex_vectors(d)?;
    let scale = (d as f64 / (2.0 * (d as f64 + 1.0))).sqrt();
    let mut out = BTreeMap::new();
    for j in 0..=d {
        for k in (j + 1)..=d {
            let w: Vec<f64> = v[j].iter().zip(&v[k]).map(|(a, b)| scale * (a - b)).collect();
            out.insert((j, k), reflection(&w, &tol)?);
        }
    }
    Ok(out)
}

/// Labels and index pairs of the independent family: every `T_x`, then every
/// `T_jk` with `1 ≤ j < k ≤ d` except `T_12`.
pub fn maximal_subset_members(d: usize) -> Vec<Member> {
    let mut members: Vec<Member> = (0..=d).map(Member::Vertex).collect();
    for j in 1..=d {
        for k in (j + 1)..=d {
            if (j, k) != (1, 2) {
                members.push(Member::Pair(j, k));
            }
        }
    }
    members
}

/// One element of the simplex families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Member {
    Vertex(usize),
    Pair(usize, usize),
}

impl Member {
    pub fn label(&self) -> String {
        match self {
            Member::Vertex(x) => format!("T{x}"),
            Member::Pair(j, k) => format!("T{j}_{k}"),
        }
    }
}

/// The family `T″`: a basis of the real symmetric `d × d` matrices made of
/// binary observables, `d(d+1)/2` elements.
pub fn maximal_independent_subset(d: usize) -> Result<Vec<BinaryObservable>> {
    require_dim(d, 3, "the pair observables only span the symmetric matrices for d >= 3")?;
    let t = simplex_observables(d)?;
    let pairs = pair_observables(d)?;
    Ok(maximal_subset_members(d)
        .into_iter()
        .map(|m| match m {
            Member::Vertex(x) => t[x].clone(),
            Member::Pair(j, k) => pairs[&(j, k)].clone(),
        })
        .collect())
}

/// Both parties measure `{T_0..T_d}` on the maximally entangled state.
pub fn initial_strategy(d: usize) -> Result<Strategy> {
    let t = simplex_observables(d)?;
    Strategy::from_binary(SchmidtState::maximally_entangled(d), &t, &t)
        .map(|mut s| {
            for (x, q) in s.alice.iter_mut().enumerate() {
                q.label = format!("T{x}");
            }
            for (y, q) in s.bob.iter_mut().enumerate() {
                q.label = format!("T{y}");
            }
            s
        })
}
