//! Numerical tolerances and solver settings.
//!
//! All quantities handled by this crate are exact in principle; the values here
//! decide when floating-point results are treated as equal, zero, or full rank.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Largest accepted `|a_ij - a_ji|` for a matrix to count as symmetric.
    pub sym_tol: f64,
    /// Accuracy expected from eigendecompositions and algebraic identities
    /// (involution, idempotence, order-L).
    pub eig_tol: f64,
    /// Relative size below which an eigenvalue is treated as zero by the sign map.
    pub singular_tol: f64,
    /// Relative residual accepted for span membership.
    pub membership_tol: f64,
    /// Relative threshold for numerical rank decisions.
    pub rank_tol: f64,
    /// Margin separating feasible / marginal / infeasible verdicts.
    pub feas_tol: f64,
    /// Duality-gap target of the barrier solvers.
    pub sdp_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym_tol: 1e-10,
            eig_tol: 1e-9,
            singular_tol: 1e-8,
            membership_tol: 1e-8,
            rank_tol: 1e-9,
            feas_tol: 1e-7,
            sdp_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Seed for every randomized component (restarts, span sampling).
    pub seed: u64,
    /// Number of randomized restarts of the sphere search.
    pub restarts: usize,
    /// Iteration cap for the sphere search, per restart.
    pub max_iterations: usize,
    /// Newton-step cap for each barrier solve.
    pub max_newton_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            restarts: 8,
            max_iterations: 400,
            max_newton_steps: 2000,
        }
    }
}

/// Everything a caller may want to override, bundled for convenience.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub tolerances: Tolerances,
    pub solver: SolverOptions,
    /// Additive constant in the epsilon coefficient of the robustness bound.
    pub robustness_epsilon_offset: Option<f64>,
}
