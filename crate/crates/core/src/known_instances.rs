//! Checks of explicit instances: degenerate observable pairs that no
//! correlation can tell apart, and the qubit cheating POVM.

use serde::Serialize;

use crate::config::{Config, Tolerances};
use crate::error::{Error, Result};
use crate::jordan::has_trivial_centralizer;
use crate::matrix::{pauli_x, pauli_z, sgn_map, sym_eigenvalues, RealMatrix};
use crate::posthoc::{analytic_sign_family, analytic_sign_family_bound, posthoc_feasible_binary, Verdict};
use crate::simplex::simplex_observables;
use crate::strategy::{correlation_real, BinaryObservable, SchmidtState};

/// Largest correlation gap for which two observables count as
/// indistinguishable.
pub const DEGENERATE_GAP: f64 = 1e-9;
/// Smallest Frobenius distance for which two observables count as distinct.
pub const DEGENERATE_DISTINCTNESS: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyReport {
    /// `max_x |⟨A_x⊗B1⟩ − ⟨A_x⊗B2⟩|`.
    pub question_gap: f64,
    /// `|⟨I⊗B1⟩ − ⟨I⊗B2⟩|`.
    pub identity_gap: f64,
    /// `‖B1 − B2‖_F`.
    pub distinctness: f64,
    pub trivial_centralizer: bool,
    pub degenerate: bool,
}

/// Do `b1` and `b2` give Bob identical correlations against Alice's family
/// while being genuinely different observables?
pub fn verify_degenerate_pair(
    state: &SchmidtState,
    alice: &[BinaryObservable],
    b1: &BinaryObservable,
    b2: &BinaryObservable,
    tol: &Tolerances,
) -> Result<DegeneracyReport> {
    let d = state.dim();
    for m in alice.iter().chain([b1, b2]) {
        if m.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: m.dim() });
        }
    }
    let mut question_gap: f64 = 0.0;
    for a in alice {
        let g = correlation_real(state, a.matrix(), b1.matrix())?
            - correlation_real(state, a.matrix(), b2.matrix())?;
        question_gap = question_gap.max(g.abs());
    }
    let id = RealMatrix::identity(d);
    let identity_gap = (correlation_real(state, &id, b1.matrix())?
        - correlation_real(state, &id, b2.matrix())?)
    .abs();
    let distinctness = b1.matrix().frobenius_distance(b2.matrix());
    let gens: Vec<RealMatrix> = alice.iter().map(|a| a.matrix().clone()).collect();
    let trivial_centralizer = !gens.is_empty() && has_trivial_centralizer(&gens, tol)?;
    Ok(DegeneracyReport {
        question_gap,
        identity_gap,
        distinctness,
        trivial_centralizer,
        degenerate: question_gap.max(identity_gap) <= DEGENERATE_GAP
            && distinctness > DEGENERATE_DISTINCTNESS
            && trivial_centralizer,
    })
}

/// The pair of 3-dimensional reflections `A_{±}` that the simplex family
/// cannot distinguish under the maximally entangled state.
pub fn degenerate_pair_d3() -> (BinaryObservable, BinaryObservable) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let make = |s: f64| {
        RealMatrix::from_rows(&[
            &[0.0, -r, s * r],
            &[-r, -0.5, -s * 0.5],
            &[s * r, -s * 0.5, -0.5],
        ])
    };
    let tol = Tolerances::default();
    (
        BinaryObservable::new(make(1.0), &tol).expect("printed matrix is a reflection"),
        BinaryObservable::new(make(-1.0), &tol).expect("printed matrix is a reflection"),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct CheatingPovmReport {
    /// `‖M̂_0 + M̂_1 − I‖_max`.
    pub completeness_defect: f64,
    /// Smallest eigenvalue over both POVM elements.
    pub min_eigenvalue: f64,
    /// Largest eigenvalue over both POVM elements.
    pub max_eigenvalue: f64,
    /// Largest correlation difference against `{I, X}` between `M̂_0 − M̂_1`
    /// and the Hadamard observable.
    pub correlation_gap: f64,
    /// `⟨ψ|I⊗M̂_0M̂_1|ψ⟩`, zero for any projective measurement.
    pub overlap: f64,
    pub passed: bool,
}

fn cheating_povm() -> (RealMatrix, RealMatrix) {
    let s = std::f64::consts::SQRT_2;
    let m0 = RealMatrix::from_rows(&[&[(6.0 - s) / 8.0, s / 4.0], &[s / 4.0, s / 2.0]]);
    let m1 = RealMatrix::from_rows(&[&[(2.0 + s) / 8.0, -s / 4.0], &[-s / 4.0, 1.0 - s / 2.0]]);
    (m0, m1)
}

/// Qubit state `cos γ|00⟩ + sin γ|11⟩` with `tan γ = 1/√2`.
pub fn hadamard_instance_state() -> SchmidtState {
    let g = (1.0 / 2f64.sqrt()).atan();
    SchmidtState::new(vec![g.cos(), g.sin()]).expect("unit norm")
}

/// `(X + Z)/√2`.
pub fn hadamard_observable() -> BinaryObservable {
    let h = (&pauli_x() + &pauli_z()).scale(std::f64::consts::FRAC_1_SQRT_2);
    BinaryObservable::new(h, &Tolerances::default()).expect("Hadamard is a reflection")
}

/// Checks that the two-outcome POVM reproduces the Hadamard correlations on
/// the tilted qubit state although it is not projective.
pub fn verify_cheating_povm() -> CheatingPovmReport {
    let (m0, m1) = cheating_povm();
    let state = hadamard_instance_state();
    let completeness_defect = (&m0 + &m1).max_abs_diff(&RealMatrix::identity(2));
    let eigs: Vec<f64> = [&m0, &m1]
        .iter()
        .flat_map(|m| sym_eigenvalues(m))
        .collect();
    let min_eigenvalue = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let cheat = &m0 - &m1;
    let h = hadamard_observable();
    let mut correlation_gap: f64 = 0.0;
    for a in [RealMatrix::identity(2), pauli_x()] {
        let g = correlation_real(&state, &a, &cheat).expect("dims")
            - correlation_real(&state, &a, h.matrix()).expect("dims");
        correlation_gap = correlation_gap.max(g.abs());
    }
    let overlap =
        correlation_real(&state, &RealMatrix::identity(2), &(&m0 * &m1)).expect("dims");
    CheatingPovmReport {
        completeness_defect,
        min_eigenvalue,
        max_eigenvalue,
        correlation_gap,
        overlap,
        passed: completeness_defect <= 1e-12
            && min_eigenvalue >= -1e-12
            && max_eigenvalue <= 1.0 + 1e-12
            && correlation_gap <= 1e-12
            && overlap.abs() > 1e-3,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Points per side of the grid used for the sign family check.
const FAMILY_GRID: usize = 10;

/// The qubit and three-dimensional example checks, in a fixed order.
pub fn example_suite(cfg: &Config) -> Result<Vec<ExampleCheck>> {
    let tol = &cfg.tolerances;
    let mut out = Vec::new();

    let state = hadamard_instance_state();
    let gamma = (1.0 / 2f64.sqrt()).atan();
    let x = BinaryObservable::new(pauli_x(), tol)?;
    let bound = analytic_sign_family_bound(gamma)?;
    let d2 = RealMatrix::diag(&[gamma.cos().powi(2), gamma.sin().powi(2)]);
    let (mut worst_gap, mut all_feasible) = (0.0f64, true);
    for i in 0..=2 * FAMILY_GRID {
        let a = 0.95 * bound * (i as f64 / FAMILY_GRID as f64 - 1.0);
        let closed = analytic_sign_family(gamma, a)?;
        let mut h = pauli_x();
        h.axpy(a, &d2);
        let s = sgn_map(&h, tol)?;
        worst_gap = worst_gap.max(closed.matrix().max_abs_diff(&s.matrix));
        all_feasible &= posthoc_feasible_binary(&state, std::slice::from_ref(&x), &closed, cfg)?.is_feasible();
    }
    out.push(ExampleCheck {
        name: "sign family closed form",
        passed: worst_gap <= 1e-8 && all_feasible,
        detail: format!("max deviation from sign map {worst_gap:.3e}, all feasible: {all_feasible}"),
    });

    let r = posthoc_feasible_binary(&state, &[x], &hadamard_observable(), cfg)?;
    out.push(ExampleCheck {
        name: "Hadamard target infeasible",
        passed: r.verdict == Verdict::Infeasible,
        detail: format!("verdict {:?}, best lambda_min {:.6}", r.verdict, r.lambda_min),
    });

    let c = verify_cheating_povm();
    out.push(ExampleCheck {
        name: "cheating POVM",
        passed: c.passed,
        detail: format!("correlation gap {:.3e}, overlap {:.6}", c.correlation_gap, c.overlap),
    });

    let t = simplex_observables(3)?;
    let (p, m) = degenerate_pair_d3();
    let g = verify_degenerate_pair(&SchmidtState::maximally_entangled(3), &t, &p, &m, tol)?;
    out.push(ExampleCheck {
        name: "degenerate pair in dimension 3",
        passed: g.degenerate && g.question_gap <= 1e-12 && g.distinctness > 0.1,
        detail: format!(
            "correlation gap {:.3e}, distance {:.6}, trivial centralizer {}",
            g.question_gap.max(g.identity_gap),
            g.distinctness,
            g.trivial_centralizer
        ),
    });
    Ok(out)
}
