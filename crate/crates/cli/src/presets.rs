//! Built-in worked examples. Each preset builds its operators in code, runs
//! the relevant analyses, and returns report sections plus the canonical
//! parameter string that feeds the input digest.

use crate::report::*;
use crate::sections::*;
use tpsforge_core::algebra::{check_axioms, Algebra};
use tpsforge_core::builders::{
    collective_spins, embed_qubit, matrix_unit, parted_symmetric_group_matrices, pauli_string,
    pauli_x, pauli_y, pauli_z, qubit_swap, symmetric_group_matrices,
};
use tpsforge_core::dynamics::{
    active_tps, group_closure, identity_defect, refocus_average, refocusing_error, strobe,
    symmetrized_schedule, CandidateTps, HamTerm, HamiltonianSpec, GROUP_LIMIT,
};
use tpsforge_core::entangle::{cut_entropy, operator_schmidt, schmidt_rank, StateVec};
use tpsforge_core::error::{Error, Result};
use tpsforge_core::factorize::{
    chain_decompose, chain_reconstruction_dims, chain_subsystems, induced_tps, stabilizer_chain,
    syndrome_tps, wedderburn, TpsFactorization,
};
use tpsforge_core::mat::{unitary_eig, unitary_exp};
use tpsforge_core::scalar::c;
use tpsforge_core::{Mat64, Tolerances64};

#[derive(Clone, Debug, Default)]
pub struct PresetArgs {
    pub qubits: Option<usize>,
    pub n: Option<usize>,
    pub ops: Option<String>,
}

pub const CATALOG: &[(&str, &str)] = &[
    (
        "bell-chi-lambda",
        "two commuting two-qubit algebras and the entanglement they assign to product and Bell states",
    ),
    (
        "collective-vs-permutation",
        "collective spin components against qubit permutations: mirrored block structures (--qubits, default 4)",
    ),
    (
        "standard-chain",
        "nested full matrix algebras on a qubit register recovering the per-qubit factors (--n, default 3)",
    ),
    (
        "stabilizer",
        "syndrome coordinates and commutant chain for commuting self-inverse Pauli strings (--ops, default ZZI,IZZ)",
    ),
    (
        "nested-symmetric",
        "six-qubit permutation-symmetric operators refined by a two-block permutation subalgebra",
    ),
    (
        "hybrid-tripartite",
        "a four-qubit chain mixing full matrix algebras with a permutation-symmetric tail",
    ),
    (
        "morphing-3q",
        "which of two candidate factorizations three tunable interaction families induce",
    ),
    (
        "strobe-ex1",
        "pulse-cycle refocusing of a two-qubit Hamiltonian onto its one-body part, with error scaling",
    ),
];

pub fn list_presets() -> String {
    let mut out = String::new();
    for (name, blurb) in CATALOG {
        out.push_str(name);
        out.push_str(": ");
        out.push_str(blurb);
        out.push('\n');
    }
    out
}

/// Runs a preset; returns the canonical parameter string (digest input) and
/// the report sections.
pub fn run_preset(
    name: &str,
    args: &PresetArgs,
    seed: u64,
    tol: &Tolerances64,
) -> Result<(String, Vec<Section>)> {
    match name {
        "bell-chi-lambda" => Ok(("bell-chi-lambda".into(), bell_chi_lambda(seed, tol)?)),
        "collective-vs-permutation" => {
            let q = args.qubits.unwrap_or(4);
            if !(2..=6).contains(&q) {
                return Err(Error::InvalidInput(format!(
                    "--qubits {q} out of range 2..=6 for this preset"
                )));
            }
            Ok((
                format!("collective-vs-permutation qubits={q}"),
                collective_vs_permutation(q, seed, tol)?,
            ))
        }
        "standard-chain" => {
            let n = args.n.unwrap_or(3);
            if !(2..=5).contains(&n) {
                return Err(Error::InvalidInput(format!(
                    "--n {n} out of range 2..=5 for this preset"
                )));
            }
            Ok((format!("standard-chain n={n}"), standard_chain(n, seed, tol)?))
        }
        "stabilizer" => {
            let ops = args.ops.clone().unwrap_or_else(|| "ZZI,IZZ".into());
            let ops = ops.to_uppercase();
            Ok((format!("stabilizer ops={ops}"), stabilizer(&ops, seed, tol)?))
        }
        "nested-symmetric" => Ok(("nested-symmetric n=6".into(), nested_symmetric(seed, tol)?)),
        "hybrid-tripartite" => Ok(("hybrid-tripartite".into(), hybrid_tripartite(seed, tol)?)),
        "morphing-3q" => Ok(("morphing-3q".into(), morphing_3q(seed, tol)?)),
        "strobe-ex1" => Ok(("strobe-ex1".into(), strobe_ex1(seed, tol)?)),
        other => Err(Error::InvalidInput(format!(
            "unknown preset `{other}`; `tpsforge list-presets` shows the catalog"
        ))),
    }
}

fn p2(label: &str) -> Result<Mat64> {
    pauli_string::<f64>(label)
}

pub fn pair_algebras(tol: &Tolerances64) -> Result<(Algebra<f64>, Algebra<f64>)> {
    let chi = Algebra::close("chi", &[p2("YZ")?, p2("ZZ")?], tol)?;
    let lam = Algebra::close("lambda", &[p2("XY")?, p2("XX")?], tol)?;
    Ok((chi, lam))
}

pub fn qubit_algebras(n: usize, tol: &Tolerances64) -> Result<Vec<Algebra<f64>>> {
    (0..n)
        .map(|i| {
            Algebra::close(
                &format!("qubit{i}"),
                &[
                    embed_qubit(&pauli_x::<f64>(), n, i),
                    embed_qubit(&pauli_z::<f64>(), n, i),
                ],
                tol,
            )
        })
        .collect()
}

pub fn bell_states() -> Result<Vec<(String, StateVec<f64>)>> {
    let z = |re: f64| c(re, 0.0);
    Ok(vec![
        (
            "|phi+>".into(),
            StateVec::normalized(vec![z(1.0), z(0.0), z(0.0), z(1.0)])?,
        ),
        (
            "|phi->".into(),
            StateVec::normalized(vec![z(1.0), z(0.0), z(0.0), z(-1.0)])?,
        ),
        (
            "|psi+>".into(),
            StateVec::normalized(vec![z(0.0), z(1.0), z(1.0), z(0.0)])?,
        ),
        (
            "|psi->".into(),
            StateVec::normalized(vec![z(0.0), z(1.0), z(-1.0), z(0.0)])?,
        ),
    ])
}

fn family_name(tps: &TpsFactorization<f64>) -> String {
    tps.factor_names.join(" x ")
}

fn pullback_rows(
    tps: &TpsFactorization<f64>,
    generators: &[(String, usize, Mat64)],
) -> Vec<PullbackRow> {
    generators
        .iter()
        .map(|(name, slot, g)| {
            let (_, residual) = tps.slot_factor(&tps.pullback(g), *slot);
            PullbackRow {
                generator: name.clone(),
                slot: *slot,
                locality_residual: residual,
            }
        })
        .collect()
}

fn gate_schmidt_section(
    gate_name: &str,
    u: &Mat64,
    tps: &TpsFactorization<f64>,
    with_eigenvalues: bool,
    tol: &Tolerances64,
) -> Result<Section> {
    let coefficients = operator_schmidt(u, tps, tol)?;
    // Gram-based singular values carry sqrt(eps)-scale noise, far above the
    // span-rank cutoff; the spectral clustering tolerance is the right floor
    let rank = schmidt_rank(&coefficients, tol.eig_cluster_rel);
    let pullback_eigenvalues = if with_eigenvalues {
        let (vals, _) = unitary_eig(&tps.pullback(u), tol)?;
        Some(vals.iter().map(|z| Cx { re: z.re, im: z.im }).collect())
    } else {
        None
    };
    Ok(Section::GateSchmidt(GateSchmidtSection {
        family: family_name(tps),
        gate: gate_name.to_string(),
        coefficients,
        schmidt_rank: rank,
        pullback_eigenvalues,
    }))
}

fn bell_chi_lambda(seed: u64, tol: &Tolerances64) -> Result<Vec<Section>> {
    let (chi, lam) = pair_algebras(tol)?;
    let refs = [&chi, &lam];
    let axioms = check_axioms(&refs, None, tol)?;
    let mut sections = vec![Section::Axioms(AxiomsSection::from_core(
        "chi x lambda",
        &axioms,
    ))];

    let tps = induced_tps(&refs, None, seed, tol)?;
    let generators = vec![
        ("YZ".to_string(), 0, p2("YZ")?),
        ("ZZ".to_string(), 0, p2("ZZ")?),
        ("XY".to_string(), 1, p2("XY")?),
        ("XX".to_string(), 1, p2("XX")?),
    ];
    sections.push(Section::Tps(tps_section(
        "chi x lambda",
        &tps,
        pullback_rows(&tps, &generators),
    )));

    let mut states = basis_states(4, Some(2))?;
    states.extend(bell_states()?);
    sections.push(Section::Entanglement(EntanglementSection {
        family: family_name(&tps),
        factor_dims: tps.factor_dims.clone(),
        states: entropy_rows(&states, &tps, tol)?,
    }));

    let qubits = qubit_algebras(2, tol)?;
    let qrefs: Vec<&Algebra<f64>> = qubits.iter().collect();
    let standard = induced_tps(&qrefs, None, seed, tol)?;
    sections.push(Section::Entanglement(EntanglementSection {
        family: family_name(&standard),
        factor_dims: standard.factor_dims.clone(),
        states: entropy_rows(&states, &standard, tol)?,
    }));

    let swap = qubit_swap::<f64>(2, 0, 1);
    sections.push(gate_schmidt_section("SWAP", &swap, &tps, true, tol)?);
    sections.push(gate_schmidt_section("SWAP", &swap, &standard, false, tol)?);
    Ok(sections)
}

fn collective_vs_permutation(q: usize, seed: u64, tol: &Tolerances64) -> Result<Vec<Section>> {
    let coll = Algebra::close("collective", &collective_spins::<f64>(q), tol)?;
    let perm = Algebra::from_closed_span("permutation", &symmetric_group_matrices::<f64>(q), tol)?;
    let wc = wedderburn(&coll, seed, tol)?;
    let wp = wedderburn(&perm, seed, tol)?;

    let mut a = wc.block_table();
    let mut b: Vec<(usize, usize)> = wp.block_table().iter().map(|(n, d)| (*d, *n)).collect();
    a.sort_unstable();
    b.sort_unstable();
    let transposed = a == b;

    Ok(vec![
        Section::Wedderburn(WedderburnSection::from_core(&wc)),
        Section::Wedderburn(WedderburnSection::from_core(&wp)),
        Section::Note(NoteSection {
            title: "mutual commutants".into(),
            body: format!(
                "the (multiplicity, irrep dim) tables are transposes of each other: {transposed}"
            ),
        }),
    ])
}

fn standard_chain(n: usize, seed: u64, tol: &Tolerances64) -> Result<Vec<Section>> {
    let d = 1usize << n;
    let mut algebras = vec![Algebra::full("B0", d)];
    for i in 1..n {
        let sub = 1usize << (n - i);
        let pre = Mat64::identity(1usize << i);
        let mut gens = Vec::with_capacity(sub * sub);
        for j in 0..sub {
            for k in 0..sub {
                gens.push(pre.kron(&matrix_unit::<f64>(sub, j, k)));
            }
        }
        algebras.push(Algebra::from_closed_span(&format!("B{i}"), &gens, tol)?);
    }
    let refs: Vec<&Algebra<f64>> = algebras.iter().collect();
    let dec = chain_decompose(&refs, seed, tol)?;
    let subs = chain_subsystems(&refs, tol)?;
    let recon = chain_reconstruction_dims(&refs, &subs, &dec, tol)?;

    let body = subs
        .iter()
        .enumerate()
        .map(|(i, a)| format!("A{}: dim {}", i + 1, a.dim()))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(vec![
        Section::Chain(chain_section(&dec, Some(&recon))),
        Section::Note(NoteSection {
            title: "relative subsystem algebras".into(),
            body,
        }),
    ])
}

fn stabilizer(ops: &str, seed: u64, tol: &Tolerances64) -> Result<Vec<Section>> {
    let names: Vec<String> = ops
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Error::InvalidInput("--ops names no Pauli strings".into()));
    }
    let len = names[0].len();
    if names.iter().any(|s| s.len() != len) {
        return Err(Error::InvalidInput(
            "--ops strings must all have the same length".into(),
        ));
    }
    let stabs = names
        .iter()
        .map(|s| pauli_string::<f64>(s))
        .collect::<Result<Vec<_>>>()?;

    let syn = syndrome_tps(&stabs, tol)?;
    let chain = stabilizer_chain(&stabs, tol)?;
    let refs: Vec<&Algebra<f64>> = chain.iter().collect();
    let dec = chain_decompose(&refs, seed, tol)?;

    Ok(vec![
        Section::Syndrome(syndrome_section(names, &syn, &stabs)),
        Section::Chain(chain_section(&dec, None)),
    ])
}

fn nested_symmetric(seed: u64, tol: &Tolerances64) -> Result<Vec<Section>> {
    let full = Algebra::full("full", 64);
    let sym6 = Algebra::from_closed_span("sym6", &symmetric_group_matrices::<f64>(6), tol)?;
    let sym33 =
        Algebra::from_closed_span("sym3x3", &parted_symmetric_group_matrices::<f64>(6, 3), tol)?;

    let w = wedderburn(&sym6, seed, tol)?;
    let refs = [&full, &sym6, &sym33];
    let dec = chain_decompose(&refs, seed, tol)?;
    let subs = chain_subsystems(&refs, tol)?;
    let recon = chain_reconstruction_dims(&refs, &subs, &dec, tol)?;

    // a sector whose nontrivial slots are a qubit and a qutrit
    let pair = dec.sectors.iter().enumerate().find(|(_, s)| {
        let mut nt: Vec<usize> = s.factor_dims().into_iter().filter(|d| *d > 1).collect();
        nt.sort_unstable();
        nt == [2, 3]
    });
    let body = match pair {
        Some((i, s)) => format!(
            "sector {} (labels [{}]) carries factor dims [{}]: a qubit times a qutrit inside a dim-{} sector",
            i,
            s.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "),
            s.factor_dims().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "),
            s.sector_dim(),
        ),
        None => "no sector with exactly a qubit times a qutrit".into(),
    };

    Ok(vec![
        Section::Wedderburn(WedderburnSection::from_core(&w)),
        Section::Chain(chain_section(&dec, Some(&recon))),
        Section::Note(NoteSection {
            title: "two-level refinement".into(),
            body,
        }),
    ])
}

fn hybrid_tripartite(seed: u64, tol: &Tolerances64) -> Result<Vec<Section>> {
    let d = 16;
    let full = Algebra::full("full", d);
    let pre = Mat64::identity(2);
    let mut gens = Vec::with_capacity(64);
    for j in 0..8 {
        for k in 0..8 {
            gens.push(pre.kron(&matrix_unit::<f64>(8, j, k)));
        }
    }
    let tail_full = Algebra::from_closed_span("1xEnd8", &gens, tol)?;
    let tail_sym: Vec<Mat64> = symmetric_group_matrices::<f64>(3)
        .iter()
        .map(|p| pre.kron(p))
        .collect();
    let tail_perm = Algebra::from_closed_span("1xsym3", &tail_sym, tol)?;

    let refs = [&full, &tail_full, &tail_perm];
    let dec = chain_decompose(&refs, seed, tol)?;
    let subs = chain_subsystems(&refs, tol)?;
    let recon = chain_reconstruction_dims(&refs, &subs, &dec, tol)?;

    let body = dec
        .sectors
        .iter()
        .map(|s| {
            format!(
                "sector [{}]: factor dims [{}]",
                s.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "),
                s.factor_dims().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "),
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(vec![
        Section::Chain(chain_section(&dec, Some(&recon))),
        Section::Note(NoteSection {
            title: "hybrid sectors".into(),
            body,
        }),
    ])
}

pub fn three_qubit_interactions(tol: &Tolerances64) -> Result<HamiltonianSpec<f64>> {
    let mut terms = Vec::with_capacity(15);
    for (j, k) in [(0usize, 1usize), (0, 2), (1, 2)] {
        terms.push(HamTerm {
            label: format!("exchange {j}{k}"),
            op: tpsforge_core::builders::exchange_coupling::<f64>(3, j, k),
            tag: "pair".into(),
        });
    }
    for (axis, op) in ["x", "y", "z"].iter().zip(collective_spins::<f64>(3)) {
        terms.push(HamTerm {
            label: format!("collective {axis}"),
            op,
            tag: "collective".into(),
        });
    }
    for site in 0..3 {
        for (axis, p) in [
            ("x", pauli_x::<f64>()),
            ("y", pauli_y::<f64>()),
            ("z", pauli_z::<f64>()),
        ] {
            terms.push(HamTerm {
                label: format!("{axis}{site}"),
                op: embed_qubit(&p, 3, site),
                tag: "local".into(),
            });
        }
    }
    let count = terms.len();
    HamiltonianSpec::new(terms, vec![1.0; count], tol)
}

pub fn three_qubit_candidates(seed: u64, tol: &Tolerances64) -> Result<Vec<CandidateTps<f64>>> {
    let coll = Algebra::close("collective", &collective_spins::<f64>(3), tol)?;
    let perm = Algebra::from_closed_span("permutation", &symmetric_group_matrices::<f64>(3), tol)?;
    let w = wedderburn(&coll, seed, tol)?;
    let block = w
        .blocks
        .iter()
        .find(|b| b.irrep_dim == 2)
        .ok_or_else(|| Error::InvalidInput("collective algebra has no spin-1/2 block".into()))?;
    let code = block.projector.clone();
    let encoded = CandidateTps {
        name: "encoded pair".into(),
        algebras: vec![coll, perm],
        code_space: Some(code),
    };
    let standard = CandidateTps {
        name: "standard qubits".into(),
        algebras: qubit_algebras(3, tol)?,
        code_space: None,
    };
    Ok(vec![encoded, standard])
}

fn morphing_3q(seed: u64, tol: &Tolerances64) -> Result<Vec<Section>> {
    let spec = three_qubit_interactions(tol)?;
    let candidates = three_qubit_candidates(seed, tol)?;
    let coupling_for = |active: &[&str]| -> Vec<f64> {
        spec.terms()
            .iter()
            .map(|t| {
                if active.contains(&t.tag.as_str()) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    };
    let scenarios: [(&str, Vec<f64>); 3] = [
        (
            "symmetric couplings only",
            coupling_for(&["pair", "collective"]),
        ),
        ("single-site couplings only", coupling_for(&["local"])),
        (
            "all couplings",
            coupling_for(&["pair", "collective", "local"]),
        ),
    ];
    let mut sections = Vec::with_capacity(3);
    for (label, couplings) in scenarios {
        let rep = active_tps(&spec, &couplings, &candidates, seed, tol)?;
        sections.push(Section::Morphing(morphing_section(label, &rep)));
    }
    Ok(sections)
}

pub fn pair_hamiltonian(tol: &Tolerances64) -> Result<HamiltonianSpec<f64>> {
    // ZX and YI are products of one chi and one lambda element, so they
    // entangle the chi-lambda pair; every term except XI and IZ flips sign
    // somewhere in the pulse group, so the average keeps exactly those two
    let entries: [(&str, &str, f64); 8] = [
        ("XI", "chi", 0.3),
        ("YZ", "chi", 0.7),
        ("ZZ", "chi", 0.5),
        ("IZ", "lambda", 0.4),
        ("XY", "lambda", 0.6),
        ("XX", "lambda", 0.2),
        ("ZX", "cross", 0.35),
        ("YI", "cross", 0.25),
    ];
    let mut terms = Vec::with_capacity(6);
    let mut couplings = Vec::with_capacity(6);
    for (label, tag, coupling) in entries {
        terms.push(HamTerm {
            label: label.to_string(),
            op: p2(label)?,
            tag: tag.to_string(),
        });
        couplings.push(coupling);
    }
    HamiltonianSpec::new(terms, couplings, tol)
}

fn strobe_ex1(seed: u64, tol: &Tolerances64) -> Result<Vec<Section>> {
    let spec = pair_hamiltonian(tol)?;
    let h = spec.assemble();
    let pulses = vec![p2("XI")?, p2("IZ")?];
    let h_avg = refocus_average(&h, &pulses, tol)?;
    let group_order = group_closure(&pulses, GROUP_LIMIT, tol)?.len();

    let chi = Algebra::close("chi", &[p2("XI")?, p2("YZ")?, p2("ZZ")?], tol)?;
    let lam = Algebra::close("lambda", &[p2("IZ")?, p2("XY")?, p2("XX")?], tol)?;
    let tps = induced_tps(&[&chi, &lam], None, seed, tol)?;
    let start = StateVec::normalized(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])?;

    let cycles = 8;
    let periods = [0.4, 0.2, 0.1, 0.05];
    let mut sections = Vec::new();
    let mut errors = Vec::with_capacity(periods.len());
    let mut max_entropies = Vec::with_capacity(periods.len());
    for t in periods {
        let schedule = symmetrized_schedule(&pulses, t, cycles, tol)?;
        let run = strobe(&h, &schedule, tol)?;
        let err = refocusing_error(&run.cycle_propagators[0], &h_avg, t, tol)?;
        let mut entropies = Vec::with_capacity(cycles);
        for u in &run.cycle_propagators {
            let psi = StateVec::new(u.matvec(start.amplitudes()))?;
            entropies.push(cut_entropy(&psi, &tps, &[0], tol)?.nats);
        }
        errors.push(err);
        max_entropies.push(entropies.iter().cloned().fold(0.0f64, f64::max));
        sections.push(Section::Strobe(StrobeSection {
            label: format!("pair Hamiltonian, T = {t}"),
            period: t,
            cycles,
            segment_count: schedule.segments().len(),
            group_order: Some(group_order),
            unitarity_residual: run.diagnostics.unitarity_residual,
            average_fro_norm: h_avg.fro_norm(),
            refocusing_error: err,
            identity_defect: identity_defect(&run.total),
            endpoint_entropies: Some(entropies),
        }));
    }

    // quadratic fit from the two coarsest periods, checked on the finer ones
    let c_fit = (max_entropies[0] / (periods[0] * periods[0]))
        .max(max_entropies[1] / (periods[1] * periods[1]));
    let mut body = String::new();
    for (k, w) in errors.windows(2).enumerate() {
        body.push_str(&format!(
            "E({})/E({}) = {:.14e}\n",
            periods[k + 1],
            periods[k],
            r15(w[1] / w[0])
        ));
    }
    body.push_str(&format!("entropy bound constant C = {:.14e}\n", r15(c_fit)));
    for (t, s) in periods.iter().zip(&max_entropies) {
        body.push_str(&format!(
            "max endpoint entropy at T = {t}: {:.14e} (bound {:.14e})\n",
            r15(*s),
            r15(c_fit * t * t)
        ));
    }
    let free = unitary_exp(&h, cycles as f64 * periods[0], tol)?;
    let drifted = StateVec::new(free.matvec(start.amplitudes()))?;
    body.push_str(&format!(
        "entropy without pulses over the same total time ({}): {:.14e}\n",
        cycles as f64 * periods[0],
        r15(cut_entropy(&drifted, &tps, &[0], tol)?.nats)
    ));
    sections.push(Section::Note(NoteSection {
        title: "refocusing scaling".into(),
        body,
    }));

    // anticommuting single-pulse refocusing is exact at every endpoint
    let spec2 = HamiltonianSpec::new(
        vec![HamTerm {
            label: "ZZ".into(),
            op: p2("ZZ")?,
            tag: "pair".into(),
        }],
        vec![0.5],
        tol,
    )?;
    let h2 = spec2.assemble();
    let pulses2 = vec![p2("XI")?];
    let h2_avg = refocus_average(&h2, &pulses2, tol)?;
    let schedule2 = symmetrized_schedule(&pulses2, 0.7, cycles, tol)?;
    let run2 = strobe(&h2, &schedule2, tol)?;
    sections.push(Section::Strobe(StrobeSection {
        label: "exact refocus: 0.5 ZZ with XI pulses, T = 0.7".into(),
        period: 0.7,
        cycles,
        segment_count: schedule2.segments().len(),
        group_order: Some(group_closure(&pulses2, GROUP_LIMIT, tol)?.len()),
        unitarity_residual: run2.diagnostics.unitarity_residual,
        average_fro_norm: h2_avg.fro_norm(),
        refocusing_error: refocusing_error(&run2.cycle_propagators[0], &h2_avg, 0.7, tol)?,
        identity_defect: identity_defect(&run2.total),
        endpoint_entropies: None,
    }));
    Ok(sections)
}

/// Factorizations the presets induce, with their generators and home slots.
/// Shared by the report builders and the locality test suite.
pub fn tps_fixtures(
    seed: u64,
    tol: &Tolerances64,
) -> Result<Vec<(String, TpsFactorization<f64>, Vec<(String, usize, Mat64)>)>> {
    let mut out = Vec::new();

    let (chi, lam) = pair_algebras(tol)?;
    let tps = induced_tps(&[&chi, &lam], None, seed, tol)?;
    let gens = vec![
        ("YZ".to_string(), 0, p2("YZ")?),
        ("ZZ".to_string(), 0, p2("ZZ")?),
        ("XY".to_string(), 1, p2("XY")?),
        ("XX".to_string(), 1, p2("XX")?),
    ];
    out.push(("chi x lambda".to_string(), tps, gens));

    let qubits = qubit_algebras(2, tol)?;
    let qrefs: Vec<&Algebra<f64>> = qubits.iter().collect();
    let tps = induced_tps(&qrefs, None, seed, tol)?;
    let mut gens = Vec::new();
    for (i, _) in qubits.iter().enumerate() {
        gens.push((
            format!("X{i}"),
            i,
            embed_qubit(&pauli_x::<f64>(), 2, i),
        ));
        gens.push((
            format!("Z{i}"),
            i,
            embed_qubit(&pauli_z::<f64>(), 2, i),
        ));
    }
    out.push(("standard two qubits".to_string(), tps, gens));

    // the two factorizations the three-qubit interaction families induce
    let candidates = three_qubit_candidates(seed, tol)?;
    let spec = three_qubit_interactions(tol)?;
    let symmetric: Vec<f64> = spec
        .terms()
        .iter()
        .map(|t| if t.tag == "local" { 0.0 } else { 1.0 })
        .collect();
    let local: Vec<f64> = spec
        .terms()
        .iter()
        .map(|t| if t.tag == "local" { 1.0 } else { 0.0 })
        .collect();
    for (label, couplings) in [
        ("encoded pair", symmetric),
        ("standard qubits", local),
    ] {
        let rep = active_tps(&spec, &couplings, &candidates, seed, tol)?;
        let outcome = rep
            .outcomes
            .iter()
            .find(|o| o.name == label && o.induced.is_some())
            .ok_or_else(|| {
                Error::InvalidInput(format!("scenario did not induce `{label}`"))
            })?;
        let tps = outcome.induced.clone().expect("induced checked above");
        let gens = spec
            .terms()
            .iter()
            .zip(&couplings)
            .filter(|(_, c)| **c != 0.0)
            .map(|(t, _)| {
                let slot = (0..tps.factor_dims.len())
                    .min_by(|a, b| {
                        let ra = tps.slot_factor(&tps.pullback(&t.op), *a).1;
                        let rb = tps.slot_factor(&tps.pullback(&t.op), *b).1;
                        ra.partial_cmp(&rb).expect("residuals are finite")
                    })
                    .expect("at least one factor");
                (t.label.clone(), slot, t.op.clone())
            })
            .collect();
        out.push((label.to_string(), tps, gens));
    }
    Ok(out)
}
