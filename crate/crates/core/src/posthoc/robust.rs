use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::strategy::BinaryObservable;

/// Constant added to `2 (Tr Q / λ_min Q)^{1/2} λ_max(D)` in the robustness
/// bound. The derivation yields 2; callers may override it.
pub const DEFAULT_EPSILON_OFFSET: f64 = 2.0;

/// Inputs of the robustness bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessParams {
    /// Number of Alice's questions in the base strategy.
    pub n: usize,
    /// Smallest eigenvalue of the Gram matrix of the base observables.
    pub lambda_min_g: f64,
    pub trace_q: f64,
    pub lambda_min_q: f64,
    /// Largest Schmidt coefficient.
    pub lambda_max_d: f64,
    /// Condition number of the Schmidt coefficients.
    pub kappa_d: f64,
    /// Robustness of the base self-test.
    pub epsilon: f64,
    /// Tolerance on the new correlations.
    pub delta: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParams(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::BadParams(format!("{name} must be non-negative and finite, got {v}")))
    }
}

/// Robustness `ε'` of the extended self-test.
pub fn robustness_bound(p: &RobustnessParams, offset: f64) -> Result<f64> {
    if p.n == 0 {
        return Err(Error::BadParams("n must be at least 1".into()));
    }
    positive("lambda_min_g", p.lambda_min_g)?;
    positive("trace_q", p.trace_q)?;
    positive("lambda_min_q", p.lambda_min_q)?;
    positive("lambda_max_d", p.lambda_max_d)?;
    non_negative("epsilon", p.epsilon)?;
    non_negative("delta", p.delta)?;
    non_negative("epsilon offset", offset)?;
    if !(p.kappa_d >= 1.0 && p.kappa_d.is_finite()) {
        return Err(Error::BadParams(format!("kappa_d must be at least 1, got {}", p.kappa_d)));
    }
    let ratio = p.trace_q / p.lambda_min_q;
    let gram = (p.n as f64 / p.lambda_min_g).powf(0.25);
    let cond = (2.0 * ratio * p.kappa_d).sqrt();
    let inner = (2.0 * ratio.sqrt() * p.lambda_max_d + offset) * p.epsilon + p.delta;
    Ok(gram * cond * inner.sqrt() + p.epsilon)
}

/// Bound on how far the vector lifted from approximately equal correlations
/// lies from the ideal one, given `ε`-close base observables.
pub fn vector_recovery_bound(
    n: usize,
    lambda_min_g: f64,
    epsilon: f64,
    delta: f64,
    vector_norm: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::BadParams("n must be at least 1".into()));
    }
    positive("lambda_min_g", lambda_min_g)?;
    non_negative("epsilon", epsilon)?;
    non_negative("delta", delta)?;
    non_negative("vector norm", vector_norm)?;
    Ok((4.0 * n as f64 / lambda_min_g).powf(0.25)
        * (epsilon * vector_norm + delta).sqrt()
        * vector_norm.sqrt())
}

/// Largest `|a|` for which `sgn(X + a D²)` is not `±I` on the qubit state
/// `cos γ|00⟩ + sin γ|11⟩`.
pub fn analytic_sign_family_bound(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma <= std::f64::consts::FRAC_PI_4) {
        return Err(Error::BadParams(format!("gamma must lie in (0, pi/4], got {gamma}")));
    }
    Ok(1.0 / (gamma.cos() * gamma.sin()))
}

/// Closed form of `sgn(X + a D²)` for `D = diag(cos γ, sin γ)`.
pub fn analytic_sign_family(gamma: f64, a: f64) -> Result<BinaryObservable> {
    let bound = analytic_sign_family_bound(gamma)?;
    if !a.is_finite() {
        return Err(Error::BadParams(format!("a must be finite, got {a}")));
    }
    if a.abs() > bound {
        return Err(Error::TrivialRegion { a, bound });
    }
    let c2 = gamma.cos().powi(2);
    let z = a * (2.0 * c2 - 1.0);
    let r = (4.0 + z * z).sqrt();
    let m = RealMatrix::from_rows(&[&[z / r, 2.0 / r], &[2.0 / r, -z / r]]);
    BinaryObservable::new(m, &Tolerances::default())
}
