use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::solver::{maximize_lambda_min, minimize_weighted_trace};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::matrix::{
    lambda_min, null_space_scaled, orthonormalize, orthonormalize_complex, ComplexMatrix, RealMatrix,
};
use crate::strategy::{BinaryObservable, SchmidtState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    /// Best value within `feas_tol` of zero: no decision at this precision.
    Marginal,
    Infeasible,
}

impl Verdict {
    pub fn from_value(value: f64, feas_tol: f64) -> Self {
        if value > feas_tol {
            Verdict::Feasible
        } else if value >= -feas_tol {
            Verdict::Marginal
        } else {
            Verdict::Infeasible
        }
    }
}

#[derive(Debug, Clone)]
pub enum Witness {
    /// `H` in the real span with `O H` symmetric (binary criterion).
    Symmetric(RealMatrix),
    /// Hermitian `P` with `conj(O)^l P` in the complex span.
    Hermitian(ComplexMatrix),
}

#[derive(Debug, Clone)]
pub struct FeasibilityResult {
    /// The power `l` this result refers to; 1 for the binary criterion.
    pub power: usize,
    pub verdict: Verdict,
    /// Best `λ_min` over unit-norm admissible witnesses; `-∞` when no
    /// admissible direction exists.
    pub lambda_min: f64,
    /// Best candidate found; `None` when no admissible direction exists.
    pub witness: Option<Witness>,
    /// Coordinates of the witness's span element in the orthonormal span basis.
    pub coefficients: Vec<Complex64>,
    pub certificate_tol: f64,
    /// Dimension of the admissible subspace the solver searched.
    pub admissible_dim: usize,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }

    /// `λ_min` as an optional finite number, for serialization.
    pub fn lambda_min_finite(&self) -> Option<f64> {
        self.lambda_min.is_finite().then_some(self.lambda_min)
    }
}

/// Outcome of recomputing a witness's certificate from scratch.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WitnessCheck {
    /// Distance of the witness's span element from the span, relative to its norm.
    pub span_residual: f64,
    /// Binary: `‖OH − HO‖_max`. General: non-Hermiticity of `P`.
    pub symmetry_defect: f64,
    pub lambda_min: f64,
    pub passed: bool,
}

fn check_weights(coeffs: &[f64]) -> Result<()> {
    if coeffs.is_empty() || coeffs.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
        return Err(Error::InvalidState(
            "diagonal weights must be finite and strictly positive".into(),
        ));
    }
    Ok(())
}

/// `{D², D A_x D}` as real matrices.
fn real_generators(weights: &[f64], alice: &[&RealMatrix]) -> Vec<RealMatrix> {
    let d = weights.len();
    let mut gens = vec![RealMatrix::diag(&weights.iter().map(|w| w * w).collect::<Vec<_>>())];
    for a in alice {
        gens.push(RealMatrix::from_fn(d, |i, j| weights[i] * a[(i, j)] * weights[j]));
    }
    gens
}

struct BinaryFamily {
    /// Orthonormal basis of the real span of the generators.
    span: Vec<RealMatrix>,
    /// Orthonormal coordinates (over `span`) of the commuting directions.
    directions: Vec<Vec<f64>>,
    /// `O G_j` for each commuting direction `G_j`.
    family: Vec<RealMatrix>,
}

fn binary_family(
    weights: &[f64],
    alice: &[&RealMatrix],
    target: &RealMatrix,
    cfg: &Config,
) -> Result<BinaryFamily> {
    let tol = &cfg.tolerances;
    let gens = real_generators(weights, alice);
    let span: Vec<RealMatrix> = orthonormalize(
        &gens.iter().map(|g| g.as_slice().to_vec()).collect::<Vec<_>>(),
        tol.rank_tol,
    )
    .basis
    .into_iter()
    .map(RealMatrix::from_row_major)
    .collect::<Result<_>>()?;

    // Commutation system: Σ_k c_k (O H_k − H_k O) = 0, one row per entry.
    let commutators: Vec<RealMatrix> =
        span.iter().map(|h| &(target * h) - &(h * target)).collect();
    let d2 = weights.len() * weights.len();
    let rows: Vec<Vec<f64>> = (0..d2)
        .map(|i| commutators.iter().map(|c| c.as_slice()[i]).collect())
        .collect();
    // c ↦ Σ c_k [O, H_k] has norm at most 2 for orthonormal H_k.
    let directions = null_space_scaled(&rows, span.len(), tol.rank_tol, 1.0);

    let family = directions
        .iter()
        .map(|n| {
            let mut g = RealMatrix::zeros(weights.len());
            for (c, h) in n.iter().zip(&span) {
                g.axpy(*c, h);
            }
            (target * &g).symmetrize()
        })
        .collect();
    Ok(BinaryFamily {
        span,
        directions,
        family,
    })
}

/// Binary criterion: is there `H ∈ span_ℝ{D², D A_x D}` with `O H` symmetric
/// and positive definite?
pub fn posthoc_feasible_binary(
    state: &SchmidtState,
    alice: &[BinaryObservable],
    target: &BinaryObservable,
    cfg: &Config,
) -> Result<FeasibilityResult> {
    let refs: Vec<&RealMatrix> = alice.iter().map(|a| a.matrix()).collect();
    posthoc_feasible_binary_diag(state.coeffs(), &refs, target.matrix(), cfg)
}

/// [`posthoc_feasible_binary`] with arbitrary positive diagonal weights in
/// place of normalized Schmidt coefficients.
pub fn posthoc_feasible_binary_diag(
    weights: &[f64],
    alice: &[&RealMatrix],
    target: &RealMatrix,
    cfg: &Config,
) -> Result<FeasibilityResult> {
    check_weights(weights)?;
    let d = weights.len();
    for m in alice.iter().copied().chain(std::iter::once(target)) {
        if m.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: m.dim() });
        }
    }
    let fam = binary_family(weights, alice, target, cfg)?;
    let out = maximize_lambda_min(&fam.family, &cfg.tolerances, &cfg.solver)?;
    let verdict = Verdict::from_value(out.value, cfg.tolerances.feas_tol);

    let (witness, coefficients) = if fam.family.is_empty() {
        (None, Vec::new())
    } else {
        let mut span_coeffs = vec![0.0; fam.span.len()];
        for (c, n) in out.coefficients.iter().zip(&fam.directions) {
            for (s, x) in span_coeffs.iter_mut().zip(n) {
                *s += c * x;
            }
        }
        let mut h = RealMatrix::zeros(d);
        for (c, b) in span_coeffs.iter().zip(&fam.span) {
            h.axpy(*c, b);
        }
        (
            Some(Witness::Symmetric(h)),
            span_coeffs.into_iter().map(|c| Complex64::new(c, 0.0)).collect(),
        )
    };
    Ok(FeasibilityResult {
        power: 1,
        verdict,
        lambda_min: out.value,
        witness,
        coefficients,
        certificate_tol: cfg.tolerances.feas_tol,
        admissible_dim: fam.family.len(),
    })
}

/// Recomputes the binary certificate of `h` from the raw generators.
pub fn verify_binary_witness(
    weights: &[f64],
    alice: &[&RealMatrix],
    target: &RealMatrix,
    h: &RealMatrix,
    certificate_tol: f64,
) -> Result<WitnessCheck> {
    check_weights(weights)?;
    let gens = real_generators(weights, alice);
    let cols: Vec<Vec<f64>> = orthonormalize(
        &gens.iter().map(|g| g.as_slice().to_vec()).collect::<Vec<_>>(),
        1e-12,
    )
    .basis;
    let mut resid = h.as_slice().to_vec();
    for q in &cols {
        let c = crate::matrix::dot(q, &resid);
        crate::matrix::axpy(&mut resid, -c, q);
    }
    let span_residual = crate::matrix::norm(&resid) / h.frobenius_norm().max(f64::MIN_POSITIVE);
    let oh = target * h;
    let symmetry_defect = (&oh - &(h * target)).max_abs();
    let lmin = lambda_min(&oh);
    Ok(WitnessCheck {
        span_residual,
        symmetry_defect,
        lambda_min: lmin,
        passed: span_residual <= certificate_tol
            && symmetry_defect <= certificate_tol
            && lmin >= certificate_tol,
    })
}

/// Orthonormal real basis of the Hermitian `d × d` matrices under
/// `Re Tr[A† B]`.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut e = ComplexMatrix::zeros(d);
        e[(j, j)] = Complex64::new(1.0, 0.0);
        out.push(e);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = ComplexMatrix::zeros(d);
            s[(j, k)] = Complex64::new(r, 0.0);
            s[(k, j)] = Complex64::new(r, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d);
            a[(j, k)] = Complex64::new(0.0, r);
            a[(k, j)] = Complex64::new(0.0, -r);
            out.push(a);
        }
    }
    out
}

fn complex_generators(weights: &[f64], alice_powers: &[Vec<ComplexMatrix>]) -> Vec<ComplexMatrix> {
    let d = weights.len();
    let mut gens = vec![RealMatrix::diag(&weights.iter().map(|w| w * w).collect::<Vec<_>>())
        .to_complex()];
    for powers in alice_powers {
        for a in powers {
            gens.push(ComplexMatrix::from_fn(d, |i, j| weights[i] * a[(i, j)] * weights[j]));
        }
    }
    gens
}

fn project_out(basis: &[Vec<Complex64>], v: &mut [Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
    for _ in 0..2 {
        for (c, b) in coeffs.iter_mut().zip(basis) {
            let s: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            *c += s;
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= s * y);
        }
    }
    coeffs
}

struct GeneralFamily {
    span: Vec<Vec<Complex64>>,
    /// `conj(O)^l`.
    rotation: ComplexMatrix,
    /// Hermitian admissible directions `P_j`, orthonormal.
    directions: Vec<ComplexMatrix>,
}

fn general_family(
    weights: &[f64],
    alice_powers: &[Vec<ComplexMatrix>],
    target: &ComplexMatrix,
    l: usize,
    cfg: &Config,
) -> Result<GeneralFamily> {
    let tol = &cfg.tolerances;
    let d = weights.len();
    let gens = complex_generators(weights, alice_powers);
    let span = orthonormalize_complex(
        &gens.iter().map(|g| g.as_slice().to_vec()).collect::<Vec<_>>(),
        tol.rank_tol,
    );
    let rotation = target.conj().pow(l);
    let herm = hermitian_basis(d);
    let residuals: Vec<Vec<Complex64>> = herm
        .iter()
        .map(|e| {
            let mut v = (&rotation * e).as_slice().to_vec();
            project_out(&span, &mut v);
            v
        })
        .collect();
    let n = herm.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * d * d);
    for i in 0..d * d {
        rows.push(residuals.iter().map(|r| r[i].re).collect());
        rows.push(residuals.iter().map(|r| r[i].im).collect());
    }
    // The residual map is a contraction: W is unitary and E_q orthonormal.
    let null = null_space_scaled(&rows, n, tol.rank_tol, 1.0);
    let directions = null
        .iter()
        .map(|c| {
            let mut p = ComplexMatrix::zeros(d);
            for (ci, e) in c.iter().zip(&herm) {
                p.axpy(Complex64::new(*ci, 0.0), e);
            }
            p
        })
        .collect();
    Ok(GeneralFamily {
        span,
        rotation,
        directions,
    })
}

fn check_order(target: &ComplexMatrix, outputs: usize, cfg: &Config) -> Result<()> {
    if outputs < 2 {
        return Err(Error::BadParams(format!("number of outputs must be at least 2, got {outputs}")));
    }
    let d = target.dim();
    let deviation = target.pow(outputs).max_abs_diff(&ComplexMatrix::identity(d));
    if deviation > cfg.tolerances.eig_tol {
        return Err(Error::NotOrderL { order: outputs, deviation });
    }
    let unitarity = (target * &target.adjoint()).max_abs_diff(&ComplexMatrix::identity(d));
    if unitarity > cfg.tolerances.eig_tol {
        return Err(Error::InvalidObservable(format!(
            "target is not unitary (max |O O^† - I| = {unitarity:e})"
        )));
    }
    Ok(())
}

fn check_general_dims(
    weights: &[f64],
    alice_powers: &[Vec<ComplexMatrix>],
    target: &ComplexMatrix,
) -> Result<()> {
    check_weights(weights)?;
    let d = weights.len();
    for m in alice_powers.iter().flatten().chain(std::iter::once(target)) {
        if m.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: m.dim() });
        }
    }
    Ok(())
}

fn solve_power(
    weights: &[f64],
    alice_powers: &[Vec<ComplexMatrix>],
    target: &ComplexMatrix,
    l: usize,
    cfg: &Config,
) -> Result<(FeasibilityResult, GeneralFamily, Vec<f64>)> {
    let fam = general_family(weights, alice_powers, target, l, cfg)?;
    let realified: Vec<RealMatrix> = fam.directions.iter().map(ComplexMatrix::realify).collect();
    let out = maximize_lambda_min(&realified, &cfg.tolerances, &cfg.solver)?;
    let verdict = Verdict::from_value(out.value, cfg.tolerances.feas_tol);
    let (witness, coefficients) = if fam.directions.is_empty() {
        (None, Vec::new())
    } else {
        let p = combine_complex(&fam.directions, &out.coefficients);
        let mut v = (&fam.rotation * &p).as_slice().to_vec();
        let coeffs = project_out(&fam.span, &mut v);
        (Some(Witness::Hermitian(p)), coeffs)
    };
    let result = FeasibilityResult {
        power: l,
        verdict,
        lambda_min: out.value,
        witness,
        coefficients,
        certificate_tol: cfg.tolerances.feas_tol,
        admissible_dim: fam.directions.len(),
    };
    Ok((result, fam, out.coefficients))
}

fn combine_complex(mats: &[ComplexMatrix], c: &[f64]) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(mats[0].dim());
    for (ci, m) in c.iter().zip(mats) {
        p.axpy(Complex64::new(*ci, 0.0), m);
    }
    p
}

/// General criterion: for each `l ∈ [1, L−1]`, is there a Hermitian `P ≻ 0`
/// with `conj(O)^l P ∈ span_ℂ{D A_x^(j) D}`? `alice_powers[x]` lists the
/// generalized observables of question `x`; `D²` is always included.
pub fn posthoc_feasible_general(
    state: &SchmidtState,
    alice_powers: &[Vec<ComplexMatrix>],
    target: &ComplexMatrix,
    outputs: usize,
    cfg: &Config,
) -> Result<Vec<FeasibilityResult>> {
    check_general_dims(state.coeffs(), alice_powers, target)?;
    check_order(target, outputs, cfg)?;
    (1..outputs)
        .map(|l| solve_power(state.coeffs(), alice_powers, target, l, cfg).map(|r| r.0))
        .collect()
}

/// Recomputes the general certificate of a Hermitian witness `p`.
pub fn verify_general_witness(
    state: &SchmidtState,
    alice_powers: &[Vec<ComplexMatrix>],
    target: &ComplexMatrix,
    l: usize,
    p: &ComplexMatrix,
    certificate_tol: f64,
) -> Result<WitnessCheck> {
    let gens = complex_generators(state.coeffs(), alice_powers);
    let span = orthonormalize_complex(
        &gens.iter().map(|g| g.as_slice().to_vec()).collect::<Vec<_>>(),
        1e-12,
    );
    let w = &target.conj().pow(l) * p;
    let mut v = w.as_slice().to_vec();
    project_out(&span, &mut v);
    let resid = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let span_residual = resid / w.frobenius_norm().max(f64::MIN_POSITIVE);
    let symmetry_defect = p.non_hermiticity();
    let lmin = lambda_min(&p.realify());
    Ok(WitnessCheck {
        span_residual,
        symmetry_defect,
        lambda_min: lmin,
        passed: span_residual <= certificate_tol
            && symmetry_defect <= certificate_tol
            && lmin >= certificate_tol,
    })
}

#[derive(Debug, Clone)]
pub struct MinTrace {
    /// Minimal `Tr Q` subject to `Q ⪰ I`.
    pub objective: f64,
    /// Optimal `Q = D⁻¹ P D⁻¹`.
    pub q: ComplexMatrix,
    pub lambda_min_q: f64,
}

/// `min Tr Q` subject to `Q ⪰ I` and `conj(O)^l D Q D ∈ span_ℂ{D A_x^(j) D}`.
pub fn min_trace_q(
    state: &SchmidtState,
    alice_powers: &[Vec<ComplexMatrix>],
    target: &ComplexMatrix,
    l: usize,
    cfg: &Config,
) -> Result<MinTrace> {
    check_general_dims(state.coeffs(), alice_powers, target)?;
    let d = state.dim();
    let (result, fam, coeffs) = solve_power(state.coeffs(), alice_powers, target, l, cfg)?;
    if !result.is_feasible() {
        return Err(Error::Infeasible { lambda_min: result.lambda_min });
    }
    let inv: Vec<f64> = state.coeffs().iter().map(|c| 1.0 / c).collect();
    let q_dirs: Vec<ComplexMatrix> = fam
        .directions
        .iter()
        .map(|p| ComplexMatrix::from_fn(d, |i, j| inv[i] * p[(i, j)] * inv[j]))
        .collect();
    let family: Vec<RealMatrix> = q_dirs.iter().map(ComplexMatrix::realify).collect();
    let weights: Vec<f64> = q_dirs.iter().map(|q| q.trace().re).collect();

    let q0 = combine_complex(&q_dirs, &coeffs);
    let l0 = lambda_min(&q0.realify());
    let start: Vec<f64> = coeffs.iter().map(|c| c * 2.0 / l0).collect();
    let (objective, c) =
        minimize_weighted_trace(&family, &weights, start, cfg.tolerances.sdp_tol, &cfg.solver)?;
    let q = combine_complex(&q_dirs, &c);
    let lambda_min_q = lambda_min(&q.realify());
    Ok(MinTrace {
        objective,
        q,
        lambda_min_q,
    })
}
