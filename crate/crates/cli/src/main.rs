use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use posthoc::certify::{certificate_report, measurement_certification_strategy};
use posthoc::io::{
    read_json, read_questions, read_strategy, write_correlations_csv, write_json, QuestionDoc,
    StateDoc, StrategyDoc,
};
use posthoc::jordan::{degeneracy_possible, has_trivial_centralizer, jordan_closure};
use posthoc::known_instances::{degenerate_pair_d3, example_suite, verify_degenerate_pair};
use posthoc::matrix::RealMatrix;
use posthoc::posthoc::{
    min_trace_q, posthoc_feasible_binary, posthoc_feasible_general, robustness_bound,
    RobustnessParams, Verdict, DEFAULT_EPSILON_OFFSET,
};
use posthoc::simplex::{initial_strategy, simplex_observables};
use posthoc::strategy::{
    brute_force_correlation, correlation_table, generalized_observables, BinaryObservable,
    SchmidtState,
};
use posthoc::{Config, Error};

#[derive(Parser)]
#[command(name = "posthoc", version, about = "Self-testing strategies for real projective measurements")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// JSON file overriding tolerances and solver options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized solver component.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol_sym: Option<f64>,
    #[arg(long, global = true)]
    tol_eig: Option<f64>,
    #[arg(long, global = true)]
    tol_singular: Option<f64>,
    #[arg(long, global = true)]
    tol_membership: Option<f64>,
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    #[arg(long, global = true)]
    tol_feas: Option<f64>,
    #[arg(long, global = true)]
    tol_sdp: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the simplex strategy of dimension d.
    Simplex {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation table of a strategy file as CSV.
    Correlations {
        #[arg(long)]
        strategy: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the explicit tensor-product evaluation.
        #[arg(long)]
        brute_force: bool,
    },
    /// Decide whether a target measurement is certified by Alice's questions.
    PosthocCheck {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        alice: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Expected number of target outcomes.
        #[arg(long)]
        outputs: Option<usize>,
    },
    /// Dimension of the Jordan algebra generated by binary observables.
    JordanClosure {
        #[arg(long)]
        observables: PathBuf,
    },
    /// Build the certification strategy of a measurement.
    Certify {
        #[arg(long)]
        measurement: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the robustness bound.
    Robustness {
        #[arg(long)]
        params: PathBuf,
        /// Additive constant in the epsilon coefficient.
        #[arg(long)]
        epsilon_offset: Option<f64>,
    },
    /// Run the built-in example checks.
    VerifyExamples,
    /// Check whether two of Bob's observables share all correlations.
    DegeneracyCheck {
        /// Defaults to the maximally entangled state.
        #[arg(long, requires = "alice")]
        state: Option<PathBuf>,
        /// Alice's binary questions; the dimension-3 simplex pair is used when omitted.
        #[arg(long, requires_all = ["first", "second"])]
        alice: Option<PathBuf>,
        #[arg(long, requires = "alice")]
        first: Option<PathBuf>,
        #[arg(long, requires = "alice")]
        second: Option<PathBuf>,
    },
}

fn load_config(g: &GlobalOpts) -> Result<Config> {
    let mut cfg: Config = match &g.config {
        Some(p) => read_json(p).with_context(|| format!("reading config {}", p.display()))?,
        None => Config::default(),
    };
    let t = &mut cfg.tolerances;
    for (flag, slot) in [
        (g.tol_sym, &mut t.sym_tol),
        (g.tol_eig, &mut t.eig_tol),
        (g.tol_singular, &mut t.singular_tol),
        (g.tol_membership, &mut t.membership_tol),
        (g.tol_rank, &mut t.rank_tol),
        (g.tol_feas, &mut t.feas_tol),
        (g.tol_sdp, &mut t.sdp_tol),
    ] {
        if let Some(v) = flag {
            if !(v > 0.0 && v.is_finite()) {
                bail!(Error::BadParams(format!("tolerances must be positive, got {v}")));
            }
            *slot = v;
        }
    }
    if let Some(seed) = g.seed {
        cfg.solver.seed = seed;
    }
    Ok(cfg)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn read_question(path: &Path) -> Result<QuestionDoc> {
    read_json(path).with_context(|| format!("reading {}", path.display()))
}

fn read_binaries(path: &Path, cfg: &Config) -> Result<Vec<BinaryObservable>> {
    read_questions(path)
        .with_context(|| format!("reading {}", path.display()))?
        .iter()
        .map(|q| q.to_binary(&cfg.tolerances).map_err(Into::into))
        .collect()
}

#[derive(Serialize)]
struct PowerReport {
    l: usize,
    feasible: Verdict,
    lambda_min: Option<f64>,
    #[serde(rename = "trace_Q")]
    trace_q: Option<f64>,
}

#[derive(Serialize)]
struct PosthocReport {
    per_power: Vec<PowerReport>,
    verdict: Verdict,
}

fn posthoc_check(
    state: &Path,
    alice: &Path,
    target: &Path,
    outputs: Option<usize>,
    cfg: &Config,
) -> Result<ExitCode> {
    let tol = &cfg.tolerances;
    let state = read_json::<StateDoc>(state)
        .with_context(|| format!("reading {}", state.display()))?
        .to_state()?;
    let alice = read_questions(alice).with_context(|| format!("reading {}", alice.display()))?;
    let alice = alice
        .iter()
        .map(|q| q.to_measurement(tol))
        .collect::<posthoc::Result<Vec<_>>>()?;
    let target = read_question(target)?.to_measurement(tol)?;
    let l = target.outputs();
    if let Some(expected) = outputs {
        if expected != l {
            bail!(Error::BadParams(format!(
                "--outputs {expected} does not match the target's {l} outcomes"
            )));
        }
    }
    let powers: Vec<_> = alice.iter().map(generalized_observables).collect();
    let target_obs = generalized_observables(&target)[1].clone();
    let results = if l == 2 && alice.iter().all(|m| m.outputs() == 2) {
        let bin = alice
            .iter()
            .map(|m| BinaryObservable::new(m.binary_observable().expect("two outcomes"), tol))
            .collect::<posthoc::Result<Vec<_>>>()?;
        let o = BinaryObservable::new(target.binary_observable().expect("two outcomes"), tol)?;
        vec![posthoc_feasible_binary(&state, &bin, &o, cfg)?]
    } else {
        posthoc_feasible_general(&state, &powers, &target_obs, l, cfg)?
    };
    let mut per_power = Vec::new();
    for r in &results {
        let trace_q = if r.is_feasible() {
            Some(min_trace_q(&state, &powers, &target_obs, r.power, cfg)?.objective)
        } else {
            None
        };
        per_power.push(PowerReport {
            l: r.power,
            feasible: r.verdict,
            lambda_min: r.lambda_min_finite(),
            trace_q,
        });
    }
    let verdict = if results.iter().all(|r| r.verdict == Verdict::Feasible) {
        Verdict::Feasible
    } else if results.iter().any(|r| r.verdict == Verdict::Infeasible) {
        Verdict::Infeasible
    } else {
        Verdict::Marginal
    };
    print_json(&PosthocReport { per_power, verdict })?;
    Ok(if verdict == Verdict::Feasible { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct ClosureReport {
    dimension: usize,
    iterations: usize,
    full_algebra: bool,
    round_dims: Vec<usize>,
    trivial_centralizer: bool,
}

fn closure(path: &Path, cfg: &Config) -> Result<ExitCode> {
    let obs = read_binaries(path, cfg)?;
    if obs.is_empty() {
        bail!(Error::EmptyInput);
    }
    let gens: Vec<RealMatrix> = obs.iter().map(|o| o.matrix().clone()).collect();
    let c = jordan_closure(&gens, &[], &cfg.tolerances)?;
    print_json(&ClosureReport {
        dimension: c.dimension(),
        iterations: c.iterations,
        full_algebra: c.is_full(),
        round_dims: c.round_dims.clone(),
        trivial_centralizer: has_trivial_centralizer(&gens, &cfg.tolerances)?,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn certify(measurement: &Path, out: &Path, cfg: &Config) -> Result<ExitCode> {
    let m = read_question(measurement)?.to_measurement(&cfg.tolerances)?;
    let cert = measurement_certification_strategy(&m, &cfg.tolerances)?;
    let report = certificate_report(&cert, cfg)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(&out.join("strategy.json"), &StrategyDoc::from_certification(&cert))?;
    let csv = fs::File::create(out.join("correlations.csv"))?;
    write_correlations_csv(std::io::BufWriter::new(csv), &report.table)?;
    write_json(&out.join("report.json"), &report)?;
    println!(
        "alice {} questions, bob {} questions, {} correlations, all extensions feasible: {}",
        report.alice_questions, report.bob_questions, report.correlation_entries, report.all_feasible
    );
    Ok(if report.all_feasible { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify_examples(cfg: &Config) -> Result<ExitCode> {
    let checks = example_suite(cfg)?;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(if checks.iter().all(|c| c.passed) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct DegeneracyOutput {
    #[serde(flatten)]
    report: posthoc::known_instances::DegeneracyReport,
    /// Whether the dimension count alone guarantees degenerate pairs.
    dimension_count_predicts: bool,
}

fn degeneracy(
    state: Option<&Path>,
    alice: Option<&Path>,
    first: Option<&Path>,
    second: Option<&Path>,
    cfg: &Config,
) -> Result<ExitCode> {
    let tol = &cfg.tolerances;
    let (alice, b1, b2) = match (alice, first, second) {
        (Some(a), Some(f), Some(s)) => (
            read_binaries(a, cfg)?,
            read_question(f)?.to_binary(tol)?,
            read_question(s)?.to_binary(tol)?,
        ),
        _ => {
            let (p, m) = degenerate_pair_d3();
            (simplex_observables(3)?, p, m)
        }
    };
    let d = b1.dim();
    let state = match state {
        Some(p) => read_json::<StateDoc>(p)?.to_state()?,
        None => SchmidtState::maximally_entangled(d),
    };
    let report = verify_degenerate_pair(&state, &alice, &b1, &b2, tol)?;
    print_json(&DegeneracyOutput {
        report,
        dimension_count_predicts: degeneracy_possible(
            d,
            alice.len(),
            state.is_maximally_entangled(tol.eig_tol),
        ),
    })?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = load_config(&cli.global)?;
    match cli.command {
        Command::Simplex { dim, out } => {
            let s = initial_strategy(dim)?;
            write_json(&out, &StrategyDoc::from_strategy(&s))?;
            println!("wrote {} + {} questions to {}", s.alice.len(), s.bob.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Correlations { strategy, out, brute_force } => {
            let s = read_strategy(&strategy, &cfg.tolerances)
                .with_context(|| format!("reading {}", strategy.display()))?;
            let table = if brute_force { brute_force_correlation(&s)? } else { correlation_table(&s)? };
            match out {
                Some(p) => write_correlations_csv(std::io::BufWriter::new(fs::File::create(p)?), &table)?,
                None => write_correlations_csv(std::io::stdout().lock(), &table)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::PosthocCheck { state, alice, target, outputs } => {
            posthoc_check(&state, &alice, &target, outputs, &cfg)
        }
        Command::JordanClosure { observables } => closure(&observables, &cfg),
        Command::Certify { measurement, out } => certify(&measurement, &out, &cfg),
        Command::Robustness { params, epsilon_offset } => {
            let p: RobustnessParams =
                read_json(&params).with_context(|| format!("reading {}", params.display()))?;
            let offset = epsilon_offset
                .or(cfg.robustness_epsilon_offset)
                .unwrap_or(DEFAULT_EPSILON_OFFSET);
            println!("{:.16e}", robustness_bound(&p, offset)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyExamples => verify_examples(&cfg),
        Command::DegeneracyCheck { state, alice, first, second } => degeneracy(
            state.as_deref(),
            alice.as_deref(),
            first.as_deref(),
            second.as_deref(),
            &cfg,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let domain = e
                .chain()
                .find_map(|c| c.downcast_ref::<Error>())
                .is_some_and(Error::is_domain_verdict);
            ExitCode::from(if domain { 1 } else { 2 })
        }
    }
}
