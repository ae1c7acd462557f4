//! Report model. Reports are plain data: no matrices, every float finite.
//! Serialization writes floats with 15 significant digits, which both keeps
//! output byte-stable across runs and makes JSON -> struct -> JSON a fixed
//! point, so round-tripping a report compares equal.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::io;
use tpsforge_core::algebra::AxiomReport;
use tpsforge_core::factorize::IrrepDecomposition;
use tpsforge_core::Tolerances64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub input_digest: String,
    pub seed: u64,
    pub tolerances: ToleranceEcho,
    pub sections: Vec<Section>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceEcho {
    pub rank_rel: f64,
    pub residual_abs: f64,
    pub eig_cluster_rel: f64,
}

impl From<&Tolerances64> for ToleranceEcho {
    fn from(t: &Tolerances64) -> Self {
        ToleranceEcho {
            rank_rel: t.rank_rel,
            residual_abs: t.residual_abs,
            eig_cluster_rel: t.eig_cluster_rel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Section {
    Axioms(AxiomsSection),
    Wedderburn(WedderburnSection),
    Tps(TpsSection),
    Chain(ChainSection),
    Syndrome(SyndromeSection),
    Superselection(SuperselectionSection),
    Entanglement(EntanglementSection),
    GateSchmidt(GateSchmidtSection),
    Morphing(MorphingSection),
    Strobe(StrobeSection),
    Note(NoteSection),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomsSection {
    pub family: String,
    pub algebra_names: Vec<String>,
    pub code_dim: usize,
    pub pairwise_commute: Vec<Vec<bool>>,
    pub worst_commutation_residual: f64,
    pub each_is_factor: Vec<bool>,
    pub restricted_dims: Vec<usize>,
    pub factor_dims: Vec<usize>,
    pub join_dim: usize,
    pub expected_join_dim: usize,
    pub completeness: bool,
    pub passes: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl AxiomsSection {
    pub fn from_core(family: &str, r: &AxiomReport) -> Self {
        AxiomsSection {
            family: family.to_string(),
            algebra_names: r.algebra_names.clone(),
            code_dim: r.code_dim,
            pairwise_commute: r.pairwise_commute.clone(),
            worst_commutation_residual: r.worst_commutation_residual,
            each_is_factor: r.each_is_factor.clone(),
            restricted_dims: r.restricted_dims.clone(),
            factor_dims: r.factor_dims.clone(),
            join_dim: r.join_dim,
            expected_join_dim: r.expected_join_dim,
            completeness: r.completeness,
            passes: r.passes(),
            first_failure: r.first_failure().map(|s| s.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub multiplicity: usize,
    pub irrep_dim: usize,
    pub support_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WedderburnSection {
    pub algebra: String,
    pub space_dim: usize,
    pub algebra_dim: usize,
    pub commutant_dim: usize,
    pub support_dim: usize,
    pub blocks: Vec<BlockRow>,
}

impl WedderburnSection {
    pub fn from_core(d: &IrrepDecomposition<f64>) -> Self {
        WedderburnSection {
            algebra: d.algebra_name.clone(),
            space_dim: d.space_dim,
            algebra_dim: d.algebra_dim(),
            commutant_dim: d.commutant_dim(),
            support_dim: d.support_dim(),
            blocks: d
                .blocks
                .iter()
                .map(|b| BlockRow {
                    multiplicity: b.multiplicity,
                    irrep_dim: b.irrep_dim,
                    support_dim: b.support_dim(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullbackRow {
    pub generator: String,
    pub slot: usize,
    pub locality_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TpsSection {
    pub family: String,
    pub factor_names: Vec<String>,
    pub factor_dims: Vec<usize>,
    pub space_dim: usize,
    pub code_dim: usize,
    pub isometry_residual: f64,
    pub pullback_locality: Vec<PullbackRow>,
    pub axioms: AxiomsSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorRow {
    pub labels: Vec<usize>,
    pub multiplicities: Vec<usize>,
    pub terminal_dim: usize,
    pub factor_dims: Vec<usize>,
    pub sector_dim: usize,
    pub nontrivial: bool,
    /// Per chain level, expected vs reconstructed dimension of the outer
    /// algebra's compression into this sector.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reconstruction: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSection {
    pub levels: Vec<String>,
    pub space_dim: usize,
    pub total_dim: usize,
    pub sectors: Vec<SectorRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyndromeSection {
    pub stabilizers: Vec<String>,
    pub dims: Vec<usize>,
    pub labels: Vec<Vec<i8>>,
    pub diagonal_residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperselectionSection {
    pub charge_dim: usize,
    pub sector_dims: Vec<usize>,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateEntropyRow {
    pub state: String,
    pub cut_slot: usize,
    pub in_code: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_nats: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_bits: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leak: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementSection {
    pub family: String,
    pub factor_dims: Vec<usize>,
    pub states: Vec<StateEntropyRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSchmidtSection {
    pub family: String,
    pub gate: String,
    pub coefficients: Vec<f64>,
    pub schmidt_rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pullback_eigenvalues: Option<Vec<Cx>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphOutcomeRow {
    pub name: String,
    pub contained_in_join: bool,
    pub containment_residual: f64,
    pub per_term_accessible: bool,
    pub axioms_pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub induced_factor_dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub induced_code_dim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphingSection {
    pub scenario: String,
    pub active_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_algebra_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub outcomes: Vec<MorphOutcomeRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrobeSection {
    pub label: String,
    pub period: f64,
    pub cycles: usize,
    pub segment_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_order: Option<usize>,
    pub unitarity_residual: f64,
    pub average_fro_norm: f64,
    pub refocusing_error: f64,
    pub identity_defect: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint_entropies: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoteSection {
    pub title: String,
    pub body: String,
}

/// JSON formatter writing every f64 with 15 significant digits.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        debug_assert!(value.is_finite());
        write!(writer, "{value:.14e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(out).expect("JSON output is UTF-8")
}

/// Round-trips the report through its 15-digit serialization so that every
/// stored float is a fixed point of serialize -> parse.
pub fn canonicalize(report: Report) -> Report {
    serde_json::from_str(&to_json(&report)).expect("report round-trips")
}

/// 15-significant-digit rounding for floats embedded in note text.
pub fn r15(x: f64) -> f64 {
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn fmt_f(x: f64) -> String {
    format!("{x:.14e}")
}

fn fmt_floats(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>().join(", ")
}

fn fmt_usizes(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn fmt_bools(xs: &[bool]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Plain-text rendering with the same float precision as the JSON form.
pub fn render_text(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "tpsforge {} :: {}", report.version, report.command);
    let _ = writeln!(s, "input digest: {}", report.input_digest);
    let _ = writeln!(s, "seed: {}", report.seed);
    let _ = writeln!(
        s,
        "tolerances: rank_rel = {}, residual_abs = {}, eig_cluster_rel = {}",
        fmt_f(report.tolerances.rank_rel),
        fmt_f(report.tolerances.residual_abs),
        fmt_f(report.tolerances.eig_cluster_rel),
    );
    for section in &report.sections {
        let _ = writeln!(s);
        render_section(&mut s, section);
    }
    s
}

fn render_section(s: &mut String, section: &Section) {
    match section {
        Section::Axioms(a) => render_axioms(s, a),
        Section::Wedderburn(w) => {
            let _ = writeln!(s, "[wedderburn] {}", w.algebra);
            let _ = writeln!(
                s,
                "  space dim {}, algebra dim {}, commutant dim {}, support dim {}",
                w.space_dim, w.algebra_dim, w.commutant_dim, w.support_dim
            );
            for b in &w.blocks {
                let _ = writeln!(
                    s,
                    "  block: multiplicity {} x irrep dim {} (support {})",
                    b.multiplicity, b.irrep_dim, b.support_dim
                );
            }
        }
        Section::Tps(t) => {
            let _ = writeln!(s, "[tps] {}", t.family);
            let _ = writeln!(
                s,
                "  factors: {} with dims [{}]",
                t.factor_names.join(" x "),
                fmt_usizes(&t.factor_dims)
            );
            let _ = writeln!(
                s,
                "  space dim {}, code dim {}, isometry residual {}",
                t.space_dim,
                t.code_dim,
                fmt_f(t.isometry_residual)
            );
            for row in &t.pullback_locality {
                let _ = writeln!(
                    s,
                    "  pullback {} -> slot {} (locality residual {})",
                    row.generator,
                    row.slot,
                    fmt_f(row.locality_residual)
                );
            }
            render_axioms(s, &t.axioms);
        }
        Section::Chain(c) => {
            let _ = writeln!(s, "[chain] {}", c.levels.join(" > "));
            let _ = writeln!(s, "  space dim {}, sector total {}", c.space_dim, c.total_dim);
            for sec in &c.sectors {
                let _ = writeln!(
                    s,
                    "  sector [{}]: multiplicities [{}], terminal {}, factor dims [{}], dim {}{}",
                    fmt_usizes(&sec.labels),
                    fmt_usizes(&sec.multiplicities),
                    sec.terminal_dim,
                    fmt_usizes(&sec.factor_dims),
                    sec.sector_dim,
                    if sec.nontrivial { "" } else { " (trivial)" }
                );
                for (level, pair) in sec.reconstruction.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "    level {}: compressed dim {} reconstructed as {}",
                        level + 1,
                        pair[0],
                        pair[1]
                    );
                }
            }
        }
        Section::Syndrome(y) => {
            let _ = writeln!(s, "[syndrome] stabilizers: {}", y.stabilizers.join(", "));
            let _ = writeln!(s, "  factor dims [{}]", fmt_usizes(&y.dims));
            for (row, label) in y.labels.iter().enumerate() {
                let signs = label
                    .iter()
                    .map(|v| if *v >= 0 { "+" } else { "-" })
                    .collect::<String>();
                let _ = writeln!(s, "  sector {row}: syndrome {signs}");
            }
            let _ = writeln!(
                s,
                "  diagonal residuals [{}]",
                fmt_floats(&y.diagonal_residuals)
            );
        }
        Section::Superselection(sup) => {
            let _ = writeln!(s, "[superselection] charge dim {}", sup.charge_dim);
            let _ = writeln!(s, "  sector dims [{}]", fmt_usizes(&sup.sector_dims));
            let _ = writeln!(s, "  outcome: {}", sup.outcome);
            if let Some(i) = sup.sector_index {
                let _ = writeln!(s, "  sector index {i}");
            }
            if let Some(d) = &sup.factor_dims {
                let _ = writeln!(s, "  factor dims [{}]", fmt_usizes(d));
            }
            if let Some(d) = sup.code_dim {
                let _ = writeln!(s, "  code dim {d}");
            }
            if let Some(w) = &sup.which {
                let _ = writeln!(s, "  failed axiom: {w}");
            }
            if let Some(n) = &sup.note {
                let _ = writeln!(s, "  note: {n}");
            }
        }
        Section::Entanglement(e) => {
            let _ = writeln!(
                s,
                "[entanglement] {} with factor dims [{}]",
                e.family,
                fmt_usizes(&e.factor_dims)
            );
            for row in &e.states {
                if row.in_code {
                    let _ = writeln!(
                        s,
                        "  {} cut at slot {}: {} nats ({} bits)",
                        row.state,
                        row.cut_slot,
                        fmt_f(row.entropy_nats.unwrap_or(0.0)),
                        fmt_f(row.entropy_bits.unwrap_or(0.0)),
                    );
                } else {
                    let _ = writeln!(
                        s,
                        "  {} outside the code space (leak {})",
                        row.state,
                        fmt_f(row.leak.unwrap_or(0.0)),
                    );
                }
            }
        }
        Section::GateSchmidt(g) => {
            let _ = writeln!(s, "[gate-schmidt] {} in {}", g.gate, g.family);
            let _ = writeln!(s, "  coefficients [{}]", fmt_floats(&g.coefficients));
            let _ = writeln!(s, "  schmidt rank {}", g.schmidt_rank);
            if let Some(eigs) = &g.pullback_eigenvalues {
                let list = eigs
                    .iter()
                    .map(|z| format!("{}{}i", fmt_f(z.re), format_signed(z.im)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = writeln!(s, "  pullback eigenvalues [{list}]");
            }
        }
        Section::Morphing(m) => {
            let _ = writeln!(s, "[morphing] {}", m.scenario);
            let _ = writeln!(s, "  active terms: [{}]", m.active_labels.join(", "));
            if let Some(d) = m.active_algebra_dim {
                let _ = writeln!(s, "  active algebra dim {d}");
            }
            if let Some(n) = &m.note {
                let _ = writeln!(s, "  note: {n}");
            }
            for o in &m.outcomes {
                let _ = writeln!(
                    s,
                    "  candidate {}: contained {} (residual {}), accessible {}, axioms {}",
                    o.name,
                    o.contained_in_join,
                    fmt_f(o.containment_residual),
                    o.per_term_accessible,
                    if o.axioms_pass { "pass" } else { "fail" },
                );
                if let Some(d) = &o.induced_factor_dims {
                    let _ = writeln!(
                        s,
                        "    induced factor dims [{}] on code dim {}",
                        fmt_usizes(d),
                        o.induced_code_dim.unwrap_or(0)
                    );
                }
            }
        }
        Section::Strobe(st) => {
            let _ = writeln!(s, "[strobe] {}", st.label);
            let _ = writeln!(
                s,
                "  period {}, cycles {}, segments {}",
                fmt_f(st.period),
                st.cycles,
                st.segment_count
            );
            if let Some(g) = st.group_order {
                let _ = writeln!(s, "  pulse group order {g}");
            }
            let _ = writeln!(s, "  unitarity residual {}", fmt_f(st.unitarity_residual));
            let _ = writeln!(s, "  average |H| {}", fmt_f(st.average_fro_norm));
            let _ = writeln!(s, "  refocusing error {}", fmt_f(st.refocusing_error));
            let _ = writeln!(s, "  identity defect {}", fmt_f(st.identity_defect));
            if let Some(es) = &st.endpoint_entropies {
                let _ = writeln!(s, "  endpoint entropies [{}]", fmt_floats(es));
            }
        }
        Section::Note(n) => {
            let _ = writeln!(s, "[note] {}", n.title);
            for line in n.body.lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
    }
}

fn format_signed(x: f64) -> String {
    if x < 0.0 {
        format!(" - {}", fmt_f(-x))
    } else {
        format!(" + {}", fmt_f(x))
    }
}

fn render_axioms(s: &mut String, a: &AxiomsSection) {
    let _ = writeln!(
        s,
        "[axioms] {} -> {}",
        a.family,
        if a.passes { "pass" } else { "fail" }
    );
    let _ = writeln!(s, "  algebras: {}", a.algebra_names.join(", "));
    let _ = writeln!(s, "  code dim {}", a.code_dim);
    let _ = writeln!(
        s,
        "  worst commutation residual {}",
        fmt_f(a.worst_commutation_residual)
    );
    let _ = writeln!(s, "  factors: [{}]", fmt_bools(&a.each_is_factor));
    let _ = writeln!(
        s,
        "  restricted dims [{}], factor dims [{}]",
        fmt_usizes(&a.restricted_dims),
        fmt_usizes(&a.factor_dims)
    );
    let _ = writeln!(
        s,
        "  join dim {} (expected {}), complete: {}",
        a.join_dim, a.expected_join_dim, a.completeness
    );
    if let Some(f) = &a.first_failure {
        let _ = writeln!(s, "  first failure: {f}");
    }
}
