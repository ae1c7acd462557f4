//! Command-line surface: argument parsing, dispatch, exit codes.
//!
//! Exit codes: 0 pass, 1 completed run whose structural check failed,
//! 2 input error, 3 numerical degeneracy.

use crate::presets::{self, PresetArgs};
use crate::problem::{ProblemSpec, ResolvedProblem};
use crate::report::*;
use crate::sections::*;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use tpsforge_core::algebra::{check_axioms, Algebra};
use tpsforge_core::dynamics::{
    active_tps, group_closure, identity_defect, refocus_average, refocusing_error, strobe,
    CandidateTps, GROUP_LIMIT,
};
use tpsforge_core::entangle::StateVec;
use tpsforge_core::error::{Error, Result};
use tpsforge_core::factorize::{
    chain_decompose, chain_reconstruction_dims, chain_subsystems, induced_tps, wedderburn,
    TpsFactorization,
};
use tpsforge_core::superselect::{superselect, SuperselectionOutcome};
use tpsforge_core::{Mat64, Tolerances64, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "tpsforge",
    version,
    about = "Tensor product structures induced by operator algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem file (JSON)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Random probe seed; overrides the file and TPSFORGE_SEED
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the absolute residual tolerance
    #[arg(long, global = true)]
    tol_residual: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check the subsystem axioms for the file's algebra family
    Check,
    /// Compute the induced factorization and its isometry diagnostics
    Factorize,
    /// Block decomposition of one algebra
    Wedderburn {
        /// Algebra name; may be omitted when the file defines exactly one
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Decompose a nested algebra chain into terminal sectors
    Chain,
    /// Project onto a charge's commutant and search its sectors for a TPS
    Superselect,
    /// Entropies of the computational basis states in the induced TPS
    Entangle,
    /// Which candidate family the active Hamiltonian terms induce
    Morph,
    /// Run a pulse schedule and compare against the averaged Hamiltonian
    Strobe,
    /// Run a built-in example
    Preset {
        name: String,
        /// Qubit count where the preset takes one
        #[arg(long)]
        qubits: Option<usize>,
        /// Register size where the preset takes one
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated Pauli strings where the preset takes them
        #[arg(long)]
        ops: Option<String>,
    },
    /// List the built-in examples
    ListPresets,
}

pub fn run_cli() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = file {
        return Ok(s);
    }
    match std::env::var("TPSFORGE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("TPSFORGE_SEED = `{v}` is not a u64"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

struct LoadedProblem {
    resolved: ResolvedProblem,
    digest: String,
}

fn load_problem(cli: &Cli) -> Result<LoadedProblem> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this subcommand needs --input FILE".into()))?;
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::InvalidInput(format!("{} is not UTF-8", path.display())))?;
    let spec = ProblemSpec::from_json(&text)?;
    let mut resolved = spec.resolve()?;
    if let Some(t) = cli.tol_residual {
        resolved.tol.residual_abs = t;
    }
    Ok(LoadedProblem {
        resolved,
        digest: sha256_hex(&bytes),
    })
}

fn emit(cli: &Cli, report: Report) -> Result<()> {
    let report = canonicalize(report);
    let text = match cli.format {
        Format::Json => {
            let mut t = to_json(&report);
            t.push('\n');
            t
        }
        Format::Text => render_text(&report),
    };
    write_output(cli.output.as_deref(), &text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn make_report(
    command: String,
    digest: String,
    seed: u64,
    tol: &Tolerances64,
    sections: Vec<Section>,
) -> Report {
    Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command,
        input_digest: digest,
        seed,
        tolerances: ToleranceEcho::from(tol),
        sections,
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::ListPresets => {
            write_output(cli.output.as_deref(), &presets::list_presets())?;
            Ok(0)
        }
        Command::Preset {
            name,
            qubits,
            n,
            ops,
        } => {
            let seed = resolve_seed(cli.seed, None)?;
            let mut tol = Tolerances64::default();
            if let Some(t) = cli.tol_residual {
                tol.residual_abs = t;
            }
            let args = PresetArgs {
                qubits: *qubits,
                n: *n,
                ops: ops.clone(),
            };
            let (params, sections) = presets::run_preset(name, &args, seed, &tol)?;
            let report = make_report(
                format!("preset {name}"),
                sha256_hex(params.as_bytes()),
                seed,
                &tol,
                sections,
            );
            emit(cli, report)?;
            Ok(0)
        }
        command => {
            let loaded = load_problem(cli)?;
            let seed = resolve_seed(cli.seed, loaded.resolved.seed)?;
            let tol = loaded.resolved.tol.clone();
            let name = match command {
                Command::Check => "check".to_string(),
                Command::Factorize => "factorize".to_string(),
                Command::Wedderburn { algebra } => match algebra {
                    Some(a) => format!("wedderburn {a}"),
                    None => "wedderburn".to_string(),
                },
                Command::Chain => "chain".to_string(),
                Command::Superselect => "superselect".to_string(),
                Command::Entangle => "entangle".to_string(),
                Command::Morph => "morph".to_string(),
                Command::Strobe => "strobe".to_string(),
                Command::Preset { .. } | Command::ListPresets => unreachable!(),
            };
            let outcome = dispatch(command, &loaded.resolved, seed, &tol);
            let (sections, code) = match outcome {
                Ok(v) => v,
                // a failed structural check still yields a well-formed report
                Err(e) if e.exit_code() == 1 => (failure_sections(&e), 1),
                Err(e) => return Err(e),
            };
            let report = make_report(name, loaded.digest, seed, &tol, sections);
            emit(cli, report)?;
            Ok(code)
        }
    }
}

fn failure_sections(e: &Error) -> Vec<Section> {
    match e {
        Error::AxiomsNotSatisfied { which, report } => vec![
            Section::Axioms(AxiomsSection::from_core(
                &report.algebra_names.join(" x "),
                report,
            )),
            Section::Note(NoteSection {
                title: "check failed".into(),
                body: format!("axiom violated: {which}"),
            }),
        ],
        other => vec![Section::Note(NoteSection {
            title: "check failed".into(),
            body: other.to_string(),
        })],
    }
}

fn dispatch(
    command: &Command,
    problem: &ResolvedProblem,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(Vec<Section>, i32)> {
    match command {
        Command::Check => run_check(problem, tol),
        Command::Factorize => run_factorize(problem, seed, tol),
        Command::Wedderburn { algebra } => run_wedderburn(problem, algebra.as_deref(), seed, tol),
        Command::Chain => run_chain(problem, seed, tol),
        Command::Superselect => run_superselect(problem, seed, tol),
        Command::Entangle => run_entangle(problem, seed, tol),
        Command::Morph => run_morph(problem, seed, tol),
        Command::Strobe => run_strobe(problem, seed, tol),
        Command::Preset { .. } | Command::ListPresets => unreachable!(),
    }
}

fn family_refs(problem: &ResolvedProblem) -> Result<Vec<&Algebra<f64>>> {
    if problem.algebras.is_empty() {
        return Err(Error::InvalidInput(
            "the problem file defines no algebras".into(),
        ));
    }
    Ok(problem.algebras.values().collect())
}

fn family_label(problem: &ResolvedProblem) -> String {
    problem
        .algebras
        .keys()
        .cloned()
        .collect::<Vec<_>>()
        .join(" x ")
}

fn run_check(problem: &ResolvedProblem, tol: &Tolerances64) -> Result<(Vec<Section>, i32)> {
    let refs = family_refs(problem)?;
    let report = check_axioms(&refs, problem.code_space.as_ref(), tol)?;
    let code = if report.passes() { 0 } else { 1 };
    Ok((
        vec![Section::Axioms(AxiomsSection::from_core(
            &family_label(problem),
            &report,
        ))],
        code,
    ))
}

/// Generator labels and matrices per algebra slot, in family order.
fn slot_generators(problem: &ResolvedProblem) -> Vec<(String, usize, Mat64)> {
    let mut out = Vec::new();
    for (slot, refs) in problem.algebra_refs.values().enumerate() {
        for rname in refs {
            let list = &problem.generators[rname];
            for (k, m) in list.iter().enumerate() {
                let label = if list.len() == 1 {
                    rname.clone()
                } else {
                    format!("{rname}[{k}]")
                };
                out.push((label, slot, m.clone()));
            }
        }
    }
    out
}

fn induced_from_problem(
    problem: &ResolvedProblem,
    seed: u64,
    tol: &Tolerances64,
) -> Result<TpsFactorization<f64>> {
    let refs = family_refs(problem)?;
    induced_tps(&refs, problem.code_space.as_ref(), seed, tol)
}

fn run_factorize(
    problem: &ResolvedProblem,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(Vec<Section>, i32)> {
    let tps = induced_from_problem(problem, seed, tol)?;
    let gens = slot_generators(problem);
    let rows = gens
        .iter()
        .map(|(label, slot, m)| {
            let (_, residual) = tps.slot_factor(&tps.pullback(m), *slot);
            PullbackRow {
                generator: label.clone(),
                slot: *slot,
                locality_residual: residual,
            }
        })
        .collect();
    Ok((
        vec![Section::Tps(tps_section(&family_label(problem), &tps, rows))],
        0,
    ))
}

fn run_wedderburn(
    problem: &ResolvedProblem,
    which: Option<&str>,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(Vec<Section>, i32)> {
    let algebra = match which {
        Some(name) => problem.algebras.get(name).ok_or_else(|| {
            Error::InvalidInput(format!("no algebra named `{name}` in the problem file"))
        })?,
        None if problem.algebras.len() == 1 => &problem.algebras[0],
        None => {
            return Err(Error::InvalidInput(
                "several algebras defined; pick one with --algebra NAME".into(),
            ))
        }
    };
    let dec = wedderburn(algebra, seed, tol)?;
    Ok((
        vec![Section::Wedderburn(WedderburnSection::from_core(&dec))],
        0,
    ))
}

fn run_chain(
    problem: &ResolvedProblem,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(Vec<Section>, i32)> {
    if problem.chain.is_empty() {
        return Err(Error::InvalidInput(
            "the problem file defines no `chain`".into(),
        ));
    }
    let refs: Vec<&Algebra<f64>> = problem
        .chain
        .iter()
        .map(|name| &problem.algebras[name])
        .collect();
    let dec = chain_decompose(&refs, seed, tol)?;
    let subs = chain_subsystems(&refs, tol)?;
    let recon = chain_reconstruction_dims(&refs, &subs, &dec, tol)?;
    let body = subs
        .iter()
        .enumerate()
        .map(|(i, a)| format!("A{}: dim {}", i + 1, a.dim()))
        .collect::<Vec<_>>()
        .join("\n");
    Ok((
        vec![
            Section::Chain(chain_section(&dec, Some(&recon))),
            Section::Note(NoteSection {
                title: "relative subsystem algebras".into(),
                body,
            }),
        ],
        0,
    ))
}

fn run_superselect(
    problem: &ResolvedProblem,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(Vec<Section>, i32)> {
    let charge = problem
        .charge
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("the problem file defines no `charges`".into()))?;
    let refs = family_refs(problem)?;
    let rep = superselect(&refs, charge, seed, tol)?;
    let code = match rep.outcome {
        SuperselectionOutcome::NewTps { .. } => 0,
        SuperselectionOutcome::AxiomFailure { .. } => 1,
    };
    Ok((
        vec![Section::Superselection(superselection_section(&rep))],
        code,
    ))
}

fn run_entangle(
    problem: &ResolvedProblem,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(Vec<Section>, i32)> {
    let tps = induced_from_problem(problem, seed, tol)?;
    let states = basis_states(problem.dim, problem.qubits)?;
    let mut sections = vec![Section::Entanglement(EntanglementSection {
        family: family_label(problem),
        factor_dims: tps.factor_dims.clone(),
        states: entropy_rows(&states, &tps, tol)?,
    })];
    // a generator list literally named "gates" requests operator-Schmidt data
    if let Some(gates) = problem.generators.get("gates") {
        if tps.factor_dims.len() == 2 {
            for (k, gate) in gates.iter().enumerate() {
                let coefficients = tpsforge_core::entangle::operator_schmidt(gate, &tps, tol)?;
                let rank =
                    tpsforge_core::entangle::schmidt_rank(&coefficients, tol.eig_cluster_rel);
                sections.push(Section::GateSchmidt(GateSchmidtSection {
                    family: family_label(problem),
                    gate: format!("gates[{k}]"),
                    coefficients,
                    schmidt_rank: rank,
                    pullback_eigenvalues: None,
                }));
            }
        }
    }
    Ok((sections, 0))
}

fn run_morph(
    problem: &ResolvedProblem,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(Vec<Section>, i32)> {
    let spec = problem
        .hamiltonian
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("the problem file defines no `hamiltonian`".into()))?;
    let refs = family_refs(problem)?;
    let candidate = CandidateTps {
        name: family_label(problem),
        algebras: refs.into_iter().cloned().collect(),
        code_space: problem.code_space.clone(),
    };
    let couplings = spec.couplings().to_vec();
    let rep = active_tps(spec, &couplings, &[candidate], seed, tol)?;
    Ok((
        vec![Section::Morphing(morphing_section(
            "file couplings",
            &rep,
        ))],
        0,
    ))
}

fn run_strobe(
    problem: &ResolvedProblem,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(Vec<Section>, i32)> {
    let spec = problem
        .hamiltonian
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("the problem file defines no `hamiltonian`".into()))?;
    let sched = problem
        .schedule
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("the problem file defines no `schedule`".into()))?;

    let h = spec.assemble();
    let run = strobe(&h, &sched.schedule, tol)?;

    // averaging group: the declared pulse set, or the segment pulses
    let pulses: Vec<Mat64> = match &sched.pulses {
        Some(p) => p.clone(),
        None => sched
            .schedule
            .segments()
            .iter()
            .filter_map(|s| s.pulse.clone())
            .collect(),
    };
    let (h_avg, group_order) = if pulses.is_empty() {
        (h.clone(), None)
    } else {
        (
            refocus_average(&h, &pulses, tol)?,
            Some(group_closure(&pulses, GROUP_LIMIT, tol)?.len()),
        )
    };
    let err = refocusing_error(&run.cycle_propagators[0], &h_avg, sched.period, tol)?;

    // endpoint entropies of the first code basis vector, when the file's
    // algebras induce a TPS
    let endpoint_entropies = match induced_from_problem(problem, seed, tol) {
        Ok(tps) if tps.factor_dims.len() >= 2 => {
            let start = StateVec::new(tps.isometry.col(0))?;
            let mut es = Vec::with_capacity(run.cycle_propagators.len());
            for u in &run.cycle_propagators {
                let psi = StateVec::new(u.matvec(start.amplitudes()))?;
                es.push(tpsforge_core::entangle::cut_entropy(&psi, &tps, &[0], tol)?.nats);
            }
            Some(es)
        }
        _ => None,
    };

    Ok((
        vec![Section::Strobe(StrobeSection {
            label: "file schedule".into(),
            period: sched.period,
            cycles: sched.cycles,
            segment_count: sched.schedule.segments().len(),
            group_order,
            unitarity_residual: run.diagnostics.unitarity_residual,
            average_fro_norm: h_avg.fro_norm(),
            refocusing_error: err,
            identity_defect: identity_defect(&run.total),
            endpoint_entropies,
        })],
        0,
    ))
}
