//! Superselection: which subsystem structure survives when a conserved
//! abelian charge restricts the physically realizable operations.
//!
//! Projecting each member algebra onto the commutant of the charge keeps
//! exactly the operations that preserve every charge sector. The surviving
//! family either induces a tensor product structure on one of the joint
//! charge sectors or fails the subsystem axioms everywhere; both outcomes
//! are reported with the projected algebras attached.

use crate::algebra::{check_axioms, Algebra, AxiomReport};
use crate::error::{Error, Result};
use crate::factorize::{induced_tps, TpsFactorization};
use crate::mat::{project_onto_span, Mat, Tolerances};
use crate::random::subseed;
use crate::scalar::Real;

const SALT_SECTOR_SPLIT: u64 = 0x55E1_EC70;

#[derive(Clone, Debug)]
pub enum SuperselectionOutcome<T: Real> {
    /// The projected family passes the axioms on this charge sector; the
    /// factorization lives on the sector subspace.
    NewTps {
        /// Index into the report's sector list.
        sector_index: usize,
        factorization: TpsFactorization<T>,
    },
    /// No charge sector of dimension ≥ 2 supports the projected family.
    AxiomFailure {
        which: String,
        /// Axiom report of the largest sector, when one could be computed.
        report: Option<AxiomReport>,
        note: String,
    },
}

#[derive(Clone, Debug)]
pub struct SuperselectionReport<T: Real> {
    pub charge_dim: usize,
    /// Member algebras after projection onto the charge commutant.
    pub projected_algebras: Vec<Algebra<T>>,
    /// Joint charge sector dimensions, descending; ties keep the probe
    /// order of the sector algebra's central projections.
    pub sector_dims: Vec<usize>,
    pub sector_projectors: Vec<Mat<T>>,
    pub outcome: SuperselectionOutcome<T>,
}

/// Projects the member algebras onto the commutant of the abelian charge
/// algebra `q` and searches the joint charge sectors for one where the
/// projected family still induces a tensor product structure.
///
/// Sectors of dimension 1 are never candidates: a one-dimensional space
/// carries no tensor product structure, even though the axioms hold there
/// vacuously.
pub fn superselect<T: Real>(
    algebras: &[&Algebra<T>],
    q: &Algebra<T>,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<SuperselectionReport<T>> {
    if algebras.is_empty() {
        return Err(Error::InvalidInput("superselect: no algebras".into()));
    }
    let d = algebras[0].space_dim();
    for a in algebras.iter().map(|a| *a).chain(std::iter::once(q)) {
        if a.space_dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "superselect: \"{}\" lives on dim {}, expected {}",
                a.name(),
                a.space_dim(),
                d
            )));
        }
    }
    let ab = q.commutation_residual(q);
    if ab > tol.residual_abs * T::from_f64c(10.0) {
        return Err(Error::ChargeNotAbelian {
            residual: ab.to_f64c(),
        });
    }

    // Trivial charge: the commutant is everything, so projection is the
    // identity map; reuse the original algebras verbatim.
    let projected: Vec<Algebra<T>> = if q.dim() == 1 {
        algebras.iter().map(|a| (*a).clone()).collect()
    } else {
        let qc = q.commutant("charge-commutant", tol);
        let mut out = Vec::with_capacity(algebras.len());
        for a in algebras {
            let elems: Vec<Mat<T>> = a
                .basis()
                .iter()
                .map(|b| project_onto_span(qc.basis(), b))
                .collect();
            out.push(Algebra::close(a.name(), &elems, tol)?);
        }
        out
    };

    // Sector algebra: the charge together with whatever central structure
    // the projection left behind.
    let mut sector_gens: Vec<Mat<T>> = q.basis().to_vec();
    for p in &projected {
        sector_gens.extend(p.center("z", tol).basis().iter().cloned());
    }
    let sector_alg = Algebra::close("charge-sectors", &sector_gens, tol)?;
    let projs =
        sector_alg.minimal_central_projections(subseed(seed, SALT_SECTOR_SPLIT), tol)?;

    let mut keyed: Vec<(usize, Mat<T>)> = projs
        .into_iter()
        .map(|p| (p.trace().re.to_f64c().round() as usize, p))
        .collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0));
    let sector_dims: Vec<usize> = keyed.iter().map(|k| k.0).collect();
    let sector_projectors: Vec<Mat<T>> = keyed.into_iter().map(|k| k.1).collect();

    let refs: Vec<&Algebra<T>> = projected.iter().collect();
    let identity = Mat::identity(d);
    let mut first_candidate: Option<(usize, AxiomReport)> = None;
    let mut outcome = None;

    for (si, p) in sector_projectors.iter().enumerate() {
        if sector_dims[si] < 2 {
            continue;
        }
        // A sector equal to the whole space is the unconstrained problem.
        let code = if p.dist(&identity) == T::zero() {
            None
        } else {
            Some(p)
        };
        let report = match check_axioms(&refs, code, tol) {
            Ok(r) => r,
            Err(Error::CodeSpaceNotInvariant { .. }) => continue,
            Err(e) => return Err(e),
        };
        if report.passes() {
            let factorization = induced_tps(&refs, code, seed, tol)?;
            outcome = Some(SuperselectionOutcome::NewTps {
                sector_index: si,
                factorization,
            });
            break;
        }
        if first_candidate.is_none() {
            first_candidate = Some((si, report));
        }
    }

    let outcome = outcome.unwrap_or_else(|| match first_candidate {
        Some((si, report)) => SuperselectionOutcome::AxiomFailure {
            which: report
                .first_failure()
                .unwrap_or("completeness")
                .to_string(),
            report: Some(report),
            note: format!("largest failing charge sector has dimension {}", sector_dims[si]),
        },
        None => SuperselectionOutcome::AxiomFailure {
            which: "completeness".to_string(),
            report: None,
            note: "no charge sector of dimension ≥ 2; one-dimensional sectors carry no tensor product structure".to_string(),
        },
    });

    Ok(SuperselectionReport {
        charge_dim: q.dim(),
        projected_algebras: projected,
        sector_dims,
        sector_projectors,
        outcome,
    })
}
