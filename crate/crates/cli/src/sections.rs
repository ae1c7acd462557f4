//! Builders turning core results into report sections.

use crate::report::*;
use tpsforge_core::dynamics::MorphingReport;
use tpsforge_core::factorize::{ChainDecomposition, SyndromeTps, TpsFactorization};
use tpsforge_core::superselect::{SuperselectionOutcome, SuperselectionReport};
use tpsforge_core::{Mat64, Tolerances64};

pub fn tps_section(
    family: &str,
    tps: &TpsFactorization<f64>,
    pullback_locality: Vec<PullbackRow>,
) -> TpsSection {
    let v = &tps.isometry;
    let iso_res = v
        .adjoint()
        .mul(v)
        .dist(&Mat64::identity(tps.code_dim));
    TpsSection {
        family: family.to_string(),
        factor_names: tps.factor_names.clone(),
        factor_dims: tps.factor_dims.clone(),
        space_dim: tps.space_dim,
        code_dim: tps.code_dim,
        isometry_residual: iso_res,
        pullback_locality,
        axioms: AxiomsSection::from_core(family, &tps.axiom_report),
    }
}

pub fn chain_section(
    dec: &ChainDecomposition<f64>,
    reconstruction: Option<&[Vec<(usize, usize)>]>,
) -> ChainSection {
    ChainSection {
        levels: dec.level_names.clone(),
        space_dim: dec.space_dim,
        total_dim: dec.total_dim(),
        sectors: dec
            .sectors
            .iter()
            .enumerate()
            .map(|(k, s)| SectorRow {
                labels: s.labels.clone(),
                multiplicities: s.multiplicities.clone(),
                terminal_dim: s.terminal_dim,
                factor_dims: s.factor_dims(),
                sector_dim: s.sector_dim(),
                nontrivial: s.nontrivial(),
                reconstruction: reconstruction
                    .map(|r| r[k].iter().map(|(e, g)| [*e, *g]).collect())
                    .unwrap_or_default(),
            })
            .collect(),
    }
}

pub fn syndrome_section(
    stab_names: Vec<String>,
    syn: &SyndromeTps<f64>,
    stabs: &[Mat64],
) -> SyndromeSection {
    SyndromeSection {
        stabilizers: stab_names,
        dims: syn.dims.clone(),
        labels: syn.labels.clone(),
        diagonal_residuals: stabs
            .iter()
            .enumerate()
            .map(|(i, s)| syn.slot_diagonal_residual(s, i))
            .collect(),
    }
}

pub fn superselection_section(rep: &SuperselectionReport<f64>) -> SuperselectionSection {
    let mut section = SuperselectionSection {
        charge_dim: rep.charge_dim,
        sector_dims: rep.sector_dims.clone(),
        outcome: String::new(),
        sector_index: None,
        factor_dims: None,
        code_dim: None,
        which: None,
        note: None,
    };
    match &rep.outcome {
        SuperselectionOutcome::NewTps {
            sector_index,
            factorization,
        } => {
            section.outcome = "new_tps".into();
            section.sector_index = Some(*sector_index);
            section.factor_dims = Some(factorization.factor_dims.clone());
            section.code_dim = Some(factorization.code_dim);
        }
        SuperselectionOutcome::AxiomFailure { which, note, .. } => {
            section.outcome = "axiom_failure".into();
            section.which = Some(which.clone());
            section.note = Some(note.clone());
        }
    }
    section
}

pub fn morphing_section(scenario: &str, rep: &MorphingReport<f64>) -> MorphingSection {
    MorphingSection {
        scenario: scenario.to_string(),
        active_labels: rep.active_labels.clone(),
        active_algebra_dim: rep.active_algebra_dim,
        note: rep.note.clone(),
        outcomes: rep
            .outcomes
            .iter()
            .map(|o| MorphOutcomeRow {
                name: o.name.clone(),
                contained_in_join: o.contained_in_join,
                containment_residual: o.containment_residual,
                per_term_accessible: o.per_term_accessible,
                axioms_pass: o.axioms.passes(),
                induced_factor_dims: o.induced.as_ref().map(|t| t.factor_dims.clone()),
                induced_code_dim: o.induced.as_ref().map(|t| t.code_dim),
            })
            .collect(),
    }
}

/// Entropy rows for labeled states against every single-factor cut. States
/// outside the code subspace get a leak row instead.
pub fn entropy_rows(
    states: &[(String, tpsforge_core::entangle::StateVec<f64>)],
    tps: &TpsFactorization<f64>,
    tol: &Tolerances64,
) -> tpsforge_core::Result<Vec<StateEntropyRow>> {
    use tpsforge_core::entangle::{cut_entropy, to_tps_coordinates};
    use tpsforge_core::Error;

    let slots = tps.factor_dims.len();
    let mut rows = Vec::new();
    for (label, psi) in states {
        match to_tps_coordinates(psi, tps, tol) {
            Ok(_) => {
                for slot in 0..slots {
                    let e = cut_entropy(psi, tps, &[slot], tol)?;
                    rows.push(StateEntropyRow {
                        state: label.clone(),
                        cut_slot: slot,
                        in_code: true,
                        entropy_nats: Some(e.nats),
                        entropy_bits: Some(e.bits),
                        leak: None,
                    });
                }
            }
            Err(Error::StateOutsideCode { out_norm }) => {
                rows.push(StateEntropyRow {
                    state: label.clone(),
                    cut_slot: 0,
                    in_code: false,
                    entropy_nats: None,
                    entropy_bits: None,
                    leak: Some(out_norm),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

/// Every ambient computational basis state, labeled in binary on qubit
/// spaces.
pub fn basis_states(
    dim: usize,
    qubits: Option<usize>,
) -> tpsforge_core::Result<Vec<(String, tpsforge_core::entangle::StateVec<f64>)>> {
    use tpsforge_core::entangle::StateVec;
    (0..dim)
        .map(|i| {
            Ok((
                state_label(i, dim, qubits),
                StateVec::new(tpsforge_core::builders::basis_state(dim, i))?,
            ))
        })
        .collect()
}

pub fn state_label(index: usize, dim: usize, qubits: Option<usize>) -> String {
    match qubits {
        Some(n) if (1usize << n) == dim => {
            let bits: String = (0..n)
                .rev()
                .map(|b| if index >> b & 1 == 1 { '1' } else { '0' })
                .collect();
            format!("|{bits}>")
        }
        _ => format!("|{index}>"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_labels_use_binary_for_qubit_spaces() {
        assert_eq!(state_label(0, 4, Some(2)), "|00>");
        assert_eq!(state_label(2, 4, Some(2)), "|10>");
        assert_eq!(state_label(5, 6, None), "|5>");
    }
}
