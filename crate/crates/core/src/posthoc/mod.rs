//! Post-hoc self-testing criteria: can Alice's new measurement be certified
//! from the correlations of an existing strategy?

mod criterion;
mod robust;
mod solver;

pub use criterion::{
    min_trace_q, posthoc_feasible_binary, posthoc_feasible_binary_diag, posthoc_feasible_general,
    verify_binary_witness, verify_general_witness, FeasibilityResult, MinTrace, Verdict, Witness,
    WitnessCheck,
};
pub use robust::{
    analytic_sign_family, analytic_sign_family_bound, robustness_bound, vector_recovery_bound,
    RobustnessParams, DEFAULT_EPSILON_OFFSET,
};
pub use solver::{maximize_lambda_min, minimize_weighted_trace, LambdaMinOutcome};
