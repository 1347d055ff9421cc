//! End-to-end certification pipelines built on the simplex family.

use serde::{Deserialize, Serialize};

use crate::config::{Config, Tolerances};
use crate::error::{Error, Result};
use crate::jordan::{cut_point_observables, jordan_closure};
use crate::matrix::{sym_eigenvalues, RealMatrix};
use crate::posthoc::{min_trace_q, posthoc_feasible_binary, Verdict};
use crate::simplex::{maximal_independent_subset, maximal_subset_members, simplex_observables};
use crate::span::{span_basis, SpanBasis};
use crate::strategy::{
    correlation_table, generalized_observables, BinaryObservable, CorrelationTable,
    ProjectiveMeasurement, Question, SchmidtState, Strategy,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// `{2M_a − I}` for each projection of `m`.
pub fn split_measurement(m: &ProjectiveMeasurement, tol: &Tolerances) -> Result<Vec<BinaryObservable>> {
    let d = m.dim();
    let id = RealMatrix::identity(d);
    m.projections()
        .iter()
        .map(|p| {
            let mut o = p.scale(2.0);
            o.axpy(-1.0, &id);
            BinaryObservable::new(o, tol)
                .map_err(|e| Error::InvalidMeasurement(format!("projection is not a reflection after doubling: {e}")))
        })
        .collect()
}

/// A self-testing strategy together with the measurement it certifies.
#[derive(Debug, Clone)]
pub struct Certification {
    pub strategy: Strategy,
    pub target: ProjectiveMeasurement,
    /// Indices of Alice's questions that encode the target.
    pub target_questions: Vec<usize>,
}

impl Certification {
    pub fn dim(&self) -> usize {
        self.strategy.dim()
    }

    /// Number of Alice questions in the base simplex family.
    pub fn base_questions(&self) -> usize {
        self.dim() + 1
    }
}

fn base_parties(d: usize) -> Result<(Vec<Question>, Vec<Question>, Vec<BinaryObservable>)> {
    if d < 3 {
        return Err(Error::BadDimension {
            dim: d,
            reason: "certification needs d >= 3; qubit measurements are handled by other constructions"
                .into(),
        });
    }
    let t = simplex_observables(d)?;
    let alice = t
        .iter()
        .enumerate()
        .map(|(x, o)| Question::binary(format!("T{x}"), o))
        .collect();
    let bob_obs = maximal_independent_subset(d)?;
    let bob = maximal_subset_members(d)
        .iter()
        .zip(&bob_obs)
        .map(|(m, o)| Question::binary(m.label(), o))
        .collect();
    Ok((alice, bob, bob_obs))
}

fn check_in_bob_span(bob: &[BinaryObservable], o: &BinaryObservable, tol: &Tolerances) -> Result<()> {
    let d = o.dim();
    let mut mats = vec![RealMatrix::identity(d)];
    mats.extend(bob.iter().map(|b| b.matrix().clone()));
    let span = span_basis(&mats, tol.membership_tol)?;
    let m = span.contains(o.matrix())?;
    if !m.inside {
        return Err(Error::Unreachable(format!(
            "observable lies outside the span of Bob's family (residual {:e})",
            m.residual
        )));
    }
    Ok(())
}

/// Alice measures `{T_0..T_d, O}`, Bob the independent family `T″`.
pub fn binary_certification_strategy(o: &BinaryObservable, tol: &Tolerances) -> Result<Certification> {
    let d = o.dim();
    let (mut alice, bob, bob_obs) = base_parties(d)?;
    check_in_bob_span(&bob_obs, o, tol)?;
    alice.push(Question::binary("O", o));
    Ok(Certification {
        strategy: Strategy::new(SchmidtState::maximally_entangled(d), alice, bob)?,
        target: o.to_measurement(),
        target_questions: vec![d + 1],
    })
}

/// All-binary strategy certifying an `L`-output projective measurement:
/// Alice measures `{T_0..T_d}` and `2M_a − I` for every outcome `a`.
pub fn measurement_certification_strategy(
    m: &ProjectiveMeasurement,
    tol: &Tolerances,
) -> Result<Certification> {
    let d = m.dim();
    let (mut alice, bob, bob_obs) = base_parties(d)?;
    let split = split_measurement(m, tol)?;
    let mut target_questions = Vec::with_capacity(split.len());
    for (a, o) in split.iter().enumerate() {
        check_in_bob_span(&bob_obs, o, tol)?;
        target_questions.push(alice.len());
        alice.push(Question::binary(format!("M{a}"), o));
    }
    Ok(Certification {
        strategy: Strategy::new(SchmidtState::maximally_entangled(d), alice, bob)?,
        target: m.clone(),
        target_questions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Self {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanRound {
    pub party: Party,
    pub observables: Vec<BinaryObservable>,
    /// Dimension of `span{I, party's observables}` after the round.
    pub span_dim: usize,
    pub contains_target: bool,
}

#[derive(Debug, Clone)]
pub struct IterativePlan {
    pub rounds: Vec<PlanRound>,
    pub closure_dim: usize,
}

/// Idle samples before a round stops looking for new cut-point observables.
const PLAN_PATIENCE: usize = 8;

/// `⌈2 log₂ d⌉`, at least 1.
pub fn round_bound(d: usize) -> usize {
    ((2.0 * (d as f64).log2()).ceil() as usize).max(1)
}

fn party_span(obs: &[BinaryObservable], d: usize, tol: f64) -> Result<SpanBasis> {
    let mut mats = vec![RealMatrix::identity(d)];
    mats.extend(obs.iter().map(|o| o.matrix().clone()));
    span_basis(&mats, tol)
}

/// Observables of `sgn(source)` that extend `current`, the basis cut points
/// first, then those of random elements until `PLAN_PATIENCE` samples add
/// nothing.
fn round_observables(
    source: &SpanBasis,
    current: &mut SpanBasis,
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<Vec<BinaryObservable>> {
    let d = source.dim();
    let cap = d * (d + 1) / 2;
    let mut out = Vec::new();
    let take = |h: &RealMatrix, current: &mut SpanBasis, out: &mut Vec<BinaryObservable>| -> Result<bool> {
        let mut grew = false;
        for o in cut_point_observables(h, tol)? {
            if current.len() < cap && current.extend(&o)? {
                out.push(BinaryObservable::new(o, tol)?);
                grew = true;
            }
        }
        Ok(grew)
    };
    for b in source.basis() {
        take(b, current, &mut out)?;
    }
    let mut idle = 0;
    while idle < PLAN_PATIENCE && current.len() < cap {
        let c: Vec<f64> = (0..source.len()).map(|_| rng.sample(StandardNormal)).collect();
        let h = source.combine(&c);
        idle = if take(&h, current, &mut out)? { 0 } else { idle + 1 };
    }
    Ok(out)
}

/// Plans alternating post-hoc rounds, starting with Bob, that end with the
/// target certified on the party of the final round. The state is taken to
/// be maximally entangled.
pub fn iterative_plan(
    initial_alice: &[BinaryObservable],
    target: &BinaryObservable,
    cfg: &Config,
) -> Result<IterativePlan> {
    let tol = &cfg.tolerances;
    let d = target.dim();
    if initial_alice.is_empty() {
        return Err(Error::EmptyInput);
    }
    let gens: Vec<RealMatrix> = initial_alice.iter().map(|o| o.matrix().clone()).collect();
    let closure = jordan_closure(&gens, &[], tol)?;
    let member = closure.span.contains(target.matrix())?;
    if !member.inside {
        return Err(Error::Unreachable(format!(
            "target lies outside the Jordan algebra of the initial observables (dimension {}, residual {:e})",
            closure.dimension(),
            member.residual
        )));
    }

    let state = SchmidtState::maximally_entangled(d);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.solver.seed);
    let mut alice: Vec<BinaryObservable> = initial_alice.to_vec();
    let mut bob: Vec<BinaryObservable> = Vec::new();
    let mut rounds = Vec::new();
    let mut party = Party::Bob;
    let limit = 2 * round_bound(d) + 2;
    loop {
        let (own, other) = match party {
            Party::Alice => (&mut alice, &bob),
            Party::Bob => (&mut bob, &alice),
        };
        let r = posthoc_feasible_binary(&state, other, target, cfg)?;
        if r.is_feasible() {
            own.push(target.clone());
            let span_dim = party_span(own, d, tol.membership_tol)?.len();
            rounds.push(PlanRound {
                party,
                observables: vec![target.clone()],
                span_dim,
                contains_target: true,
            });
            break;
        }
        if rounds.len() + 1 >= limit {
            return Err(Error::Unreachable(format!(
                "target not certified after {} rounds",
                rounds.len()
            )));
        }
        let source = party_span(other, d, tol.membership_tol)?;
        let mut current = party_span(own, d, tol.membership_tol)?;
        let added = round_observables(&source, &mut current, &mut rng, tol)?;
        if added.is_empty() {
            return Err(Error::Unreachable(format!(
                "rounds stopped growing at span dimension {} before reaching the target",
                current.len()
            )));
        }
        own.extend(added.iter().cloned());
        rounds.push(PlanRound {
            party,
            observables: added,
            span_dim: current.len(),
            contains_target: false,
        });
        party = party.other();
    }
    Ok(IterativePlan {
        rounds,
        closure_dim: closure.dimension(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionCheck {
    pub party: Party,
    pub label: String,
    pub verdict: Verdict,
    pub lambda_min: Option<f64>,
    /// Minimal `Tr Q`; absent when the extension is not feasible.
    pub trace_q: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RobustnessSummary {
    /// Smallest eigenvalue of `Tr[A_j A_k]` over Alice's base questions.
    pub gram_min_alice_base: f64,
    /// Same for Bob's questions.
    pub gram_min_bob: f64,
    pub kappa_d: f64,
    pub lambda_max_d: f64,
    pub max_trace_q: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub dim: usize,
    pub outputs: usize,
    pub alice_questions: usize,
    pub bob_questions: usize,
    pub correlation_entries: usize,
    pub extensions: Vec<ExtensionCheck>,
    pub closure_dimension: usize,
    pub full_algebra: bool,
    pub robustness: RobustnessSummary,
    pub all_feasible: bool,
    #[serde(skip)]
    pub table: CorrelationTable,
}

fn binary_of(q: &Question) -> Result<BinaryObservable> {
    let m = q.measurement.binary_observable().ok_or_else(|| {
        Error::InvalidMeasurement(format!("question {} is not binary", q.label))
    })?;
    BinaryObservable::new(m, &Tolerances::default())
}

fn gram_min(obs: &[BinaryObservable]) -> Result<f64> {
    let n = obs.len();
    let g = RealMatrix::from_fn(n, |j, k| {
        crate::matrix::dot(obs[j].matrix().as_slice(), obs[k].matrix().as_slice())
    });
    Ok(sym_eigenvalues(&g).into_iter().fold(f64::INFINITY, f64::min))
}

fn extension_check(
    state: &SchmidtState,
    party: Party,
    label: &str,
    reference: &[BinaryObservable],
    target: &BinaryObservable,
    cfg: &Config,
) -> Result<ExtensionCheck> {
    let r = posthoc_feasible_binary(state, reference, target, cfg)?;
    let trace_q = if r.is_feasible() {
        let powers: Vec<_> = reference
            .iter()
            .map(|o| generalized_observables(&o.to_measurement()))
            .collect();
        Some(min_trace_q(state, &powers, &target.matrix().to_complex(), 1, cfg)?.objective)
    } else {
        None
    };
    Ok(ExtensionCheck {
        party,
        label: label.to_string(),
        verdict: r.verdict,
        lambda_min: r.lambda_min_finite(),
        trace_q,
    })
}

/// Feasibility of every extension in the certification strategy plus the
/// quantities entering the robustness bound.
///
/// Bob's pair observables are checked against Alice's simplex family and
/// Alice's target observables against Bob's full family.
pub fn certificate_report(cert: &Certification, cfg: &Config) -> Result<CertificateReport> {
    let s = &cert.strategy;
    let d = s.dim();
    let base = cert.base_questions();
    let alice: Vec<BinaryObservable> = s.alice.iter().map(binary_of).collect::<Result<_>>()?;
    let bob: Vec<BinaryObservable> = s.bob.iter().map(binary_of).collect::<Result<_>>()?;
    let alice_base = &alice[..base.min(alice.len())];

    let mut extensions = Vec::new();
    for (q, o) in s.bob.iter().zip(&bob).skip(base) {
        extensions.push(extension_check(&s.state, Party::Bob, &q.label, alice_base, o, cfg)?);
    }
    for &x in &cert.target_questions {
        extensions.push(extension_check(
            &s.state,
            Party::Alice,
            &s.alice[x].label,
            &bob,
            &alice[x],
            cfg,
        )?);
    }

    let gens: Vec<RealMatrix> = alice_base.iter().map(|o| o.matrix().clone()).collect();
    let closure = jordan_closure(&gens, &[], &cfg.tolerances)?;
    let table = correlation_table(s)?;
    let coeffs = s.state.coeffs();
    let max_trace_q = extensions
        .iter()
        .filter_map(|e| e.trace_q)
        .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t))));
    Ok(CertificateReport {
        dim: d,
        outputs: cert.target.outputs(),
        alice_questions: s.alice.len(),
        bob_questions: s.bob.len(),
        correlation_entries: table.len(),
        all_feasible: extensions.iter().all(|e| e.verdict == Verdict::Feasible),
        extensions,
        closure_dimension: closure.dimension(),
        full_algebra: closure.is_full(),
        robustness: RobustnessSummary {
            gram_min_alice_base: gram_min(alice_base)?,
            gram_min_bob: gram_min(&bob)?,
            kappa_d: s.state.condition_number(),
            lambda_max_d: coeffs.iter().copied().fold(0.0, f64::max),
            max_trace_q,
        },
        table,
    })
}
