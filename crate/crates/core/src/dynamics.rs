//! Hamiltonians with tunable couplings, stroboscopic evolution under pulse
//! schedules, and group-average refocusing.
//!
//! Evolution is piecewise-constant: each segment is an exact
//! eigendecomposition exponential, so there is no integrator error to
//! distinguish from the averaging error the diagnostics measure.

use crate::algebra::{check_axioms, join, Algebra, AxiomReport};
use crate::error::{Error, Result};
use crate::factorize::{induced_tps, TpsFactorization};
use crate::mat::{op_norm, unitary_exp, Mat, Tolerances};
use crate::random::subseed;
use crate::scalar::{cr, Real};

const SALT_MORPH: u64 = 0x309F_0000;

/// Pulse groups larger than this abort; refocusing cycles are meant to be
/// short.
pub const GROUP_LIMIT: usize = 64;

/// One named Hermitian interaction term, tagged with the algebra family it
/// is drawn from.
#[derive(Clone, Debug)]
pub struct HamTerm<T: Real> {
    pub label: String,
    pub op: Mat<T>,
    pub tag: String,
}

/// A Hamiltonian as a weighted sum of named Hermitian terms.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec<T: Real> {
    terms: Vec<HamTerm<T>>,
    couplings: Vec<T>,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(terms: Vec<HamTerm<T>>, couplings: Vec<T>, tol: &Tolerances<T>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("Hamiltonian with no terms".into()));
        }
        if couplings.len() != terms.len() {
            return Err(Error::InvalidInput(format!(
                "{} couplings for {} terms",
                couplings.len(),
                terms.len()
            )));
        }
        let d = terms[0].op.rows();
        for t in &terms {
            if !t.op.is_square() || t.op.rows() != d {
                return Err(Error::DimensionMismatch(format!(
                    "term `{}` is {}x{}, expected {d}x{d}",
                    t.label,
                    t.op.rows(),
                    t.op.cols()
                )));
            }
            let r = t.op.hermiticity_residual();
            if r > tol.residual_for(t.op.fro_norm()) {
                return Err(Error::NotHermitian {
                    name: t.label.clone(),
                    residual: r.to_f64c(),
                });
            }
        }
        Ok(Self { terms, couplings })
    }

    pub fn terms(&self) -> &[HamTerm<T>] {
        &self.terms
    }

    pub fn couplings(&self) -> &[T] {
        &self.couplings
    }

    pub fn dim(&self) -> usize {
        self.terms[0].op.rows()
    }

    /// Weighted sum with the stored couplings.
    pub fn assemble(&self) -> Mat<T> {
        self.assemble_with(&self.couplings).expect("stored couplings match terms")
    }

    /// Weighted sum with an explicit coupling assignment.
    pub fn assemble_with(&self, couplings: &[T]) -> Result<Mat<T>> {
        if couplings.len() != self.terms.len() {
            return Err(Error::InvalidInput(format!(
                "{} couplings for {} terms",
                couplings.len(),
                self.terms.len()
            )));
        }
        let mut acc = Mat::zeros(self.dim(), self.dim());
        for (t, c) in self.terms.iter().zip(couplings) {
            acc = acc.add(&t.op.scaled_re(*c));
        }
        Ok(acc)
    }
}

/// One schedule segment: free evolution for a fraction of the period,
/// followed by an instantaneous pulse (None means no pulse).
#[derive(Clone, Debug)]
pub struct Segment<T: Real> {
    pub pulse: Option<Mat<T>>,
    pub fraction: T,
}

/// A repeating pulse cycle: `cycles` repetitions of period `period`, each
/// split into segments whose duration fractions sum to 1.
#[derive(Clone, Debug)]
pub struct PulseSchedule<T: Real> {
    period: T,
    segments: Vec<Segment<T>>,
    cycles: usize,
}

impl<T: Real> PulseSchedule<T> {
    pub fn new(
        period: T,
        segments: Vec<Segment<T>>,
        cycles: usize,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        if !(period > T::zero()) {
            return Err(Error::InvalidInput("schedule period must be positive".into()));
        }
        if cycles == 0 {
            return Err(Error::InvalidInput("schedule needs at least one cycle".into()));
        }
        if segments.is_empty() {
            return Err(Error::InvalidInput("schedule with no segments".into()));
        }
        let mut total = T::zero();
        let mut dim = None;
        for (k, s) in segments.iter().enumerate() {
            if !(s.fraction > T::zero()) {
                return Err(Error::InvalidInput(format!(
                    "segment {k} has nonpositive duration fraction"
                )));
            }
            total = total + s.fraction;
            if let Some(p) = &s.pulse {
                match dim {
                    None => dim = Some(p.rows()),
                    Some(d) if d == p.rows() => {}
                    Some(d) => {
                        return Err(Error::DimensionMismatch(format!(
                            "segment {k} pulse is {}x{}, expected {d}x{d}",
                            p.rows(),
                            p.cols()
                        )))
                    }
                }
                let r = p.unitarity_residual();
                if r > tol.residual_for(p.fro_norm()) {
                    return Err(Error::NotUnitary {
                        name: format!("segment {k} pulse"),
                        residual: r.to_f64c(),
                    });
                }
            }
        }
        if (total - T::one()).abs() > T::from_f64c(1e-9) {
            return Err(Error::InvalidInput(format!(
                "segment fractions sum to {}, expected 1",
                total.to_f64c()
            )));
        }
        Ok(Self {
            period,
            segments,
            cycles,
        })
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }
}

#[derive(Clone, Debug)]
pub struct StrobeDiagnostics<T> {
    /// Unitarity residual of the total propagator; growth flags accumulated
    /// roundoff.
    pub unitarity_residual: T,
    pub segment_count: usize,
    pub cycle_count: usize,
}

/// Propagators from running a pulse schedule: one endpoint per cycle plus
/// the total.
#[derive(Clone, Debug)]
pub struct StrobeRun<T: Real> {
    pub cycle_propagators: Vec<Mat<T>>,
    pub total: Mat<T>,
    pub diagnostics: StrobeDiagnostics<T>,
}

/// Evolves under a pulse schedule. Within one period the segments act in
/// order: free evolution under `h` for `fraction * period`, then the
/// segment's pulse. The first segment acts first (rightmost factor).
pub fn strobe<T: Real>(
    h: &Mat<T>,
    schedule: &PulseSchedule<T>,
    tol: &Tolerances<T>,
) -> Result<StrobeRun<T>> {
    let d = h.rows();
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian is {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let r = h.hermiticity_residual();
    if r > tol.residual_for(h.fro_norm()) {
        return Err(Error::NotHermitian {
            name: "strobe Hamiltonian".into(),
            residual: r.to_f64c(),
        });
    }
    let mut cycle = Mat::identity(d);
    for (k, s) in schedule.segments().iter().enumerate() {
        let free = unitary_exp(h, s.fraction * schedule.period(), tol)?;
        cycle = free.mul(&cycle);
        if let Some(p) = &s.pulse {
            if p.rows() != d {
                return Err(Error::DimensionMismatch(format!(
                    "segment {k} pulse is {}x{} on a dim-{d} space",
                    p.rows(),
                    p.cols()
                )));
            }
            cycle = p.mul(&cycle);
        }
    }
    let mut endpoints = Vec::with_capacity(schedule.cycles());
    let mut acc = Mat::identity(d);
    for _ in 0..schedule.cycles() {
        acc = cycle.mul(&acc);
        endpoints.push(acc.clone());
    }
    let total = endpoints.last().expect("cycles >= 1").clone();
    let diagnostics = StrobeDiagnostics {
        unitarity_residual: total.unitarity_residual(),
        segment_count: schedule.segments().len(),
        cycle_count: schedule.cycles(),
    };
    Ok(StrobeRun {
        cycle_propagators: endpoints,
        total,
        diagnostics,
    })
}

/// Multiplicative closure of a set of unitaries, identity included.
/// Deterministic order: identity, then the generators, then products in
/// discovery order. Errors if the closure exceeds `limit` elements.
pub fn group_closure<T: Real>(
    generators: &[Mat<T>],
    limit: usize,
    tol: &Tolerances<T>,
) -> Result<Vec<Mat<T>>> {
    let d = match generators.first() {
        Some(g) => g.rows(),
        None => return Err(Error::InvalidInput("group closure of an empty set needs a dimension; pass the identity".into())),
    };
    for (k, g) in generators.iter().enumerate() {
        if !g.is_square() || g.rows() != d {
            return Err(Error::DimensionMismatch(format!(
                "generator {k} is {}x{}, expected {d}x{d}",
                g.rows(),
                g.cols()
            )));
        }
        let r = g.unitarity_residual();
        if r > tol.residual_for(g.fro_norm()) {
            return Err(Error::NotUnitary {
                name: format!("group generator {k}"),
                residual: r.to_f64c(),
            });
        }
    }
    let close_tol = T::from_f64c(1e-9);
    let mut elements: Vec<Mat<T>> = vec![Mat::identity(d)];
    let push_new = |elements: &mut Vec<Mat<T>>, candidate: Mat<T>| -> bool {
        if elements.iter().any(|e| e.dist(&candidate) <= close_tol) {
            return false;
        }
        elements.push(candidate);
        true
    };
    for g in generators {
        push_new(&mut elements, g.clone());
    }
    // products of known elements until nothing new appears
    let mut frontier_start = 0;
    loop {
        let len_before = elements.len();
        for i in 0..len_before {
            for j in frontier_start..len_before {
                if elements.len() > limit {
                    return Err(Error::GroupTooLarge { limit });
                }
                let ab = elements[i].mul(&elements[j]);
                push_new(&mut elements, ab);
                if i >= frontier_start {
                    let ba = elements[j].mul(&elements[i]);
                    push_new(&mut elements, ba);
                }
            }
        }
        if elements.len() == len_before {
            break;
        }
        frontier_start = len_before;
    }
    if elements.len() > limit {
        return Err(Error::GroupTooLarge { limit });
    }
    Ok(elements)
}

/// Group average (1/|G|) Σ g·H·g† over the closure of the pulse set: the
/// first-order effective Hamiltonian of the symmetrized schedule. An empty
/// pulse set returns H unchanged.
pub fn refocus_average<T: Real>(
    h: &Mat<T>,
    pulses: &[Mat<T>],
    tol: &Tolerances<T>,
) -> Result<Mat<T>> {
    if pulses.is_empty() {
        return Ok(h.clone());
    }
    let group = group_closure(pulses, GROUP_LIMIT, tol)?;
    let inv = T::one() / T::from_f64c(group.len() as f64);
    let mut acc = Mat::zeros(h.rows(), h.cols());
    for g in &group {
        acc = acc.add(&g.mul(h).mul(&g.adjoint()));
    }
    Ok(acc.scaled_re(inv))
}

/// Builds the symmetrized refocusing cycle for a pulse set: with group
/// closure {g_0 = 1, g_1, ..., g_{m-1}}, the period is split into m equal
/// segments realizing Π_k g_k† · exp(−iHT/m) · g_k, whose first-order
/// effective Hamiltonian is the group average. The net pulses are
/// p_k = g_k·g_{k−1}† between segments and g_{m−1}† after the last.
pub fn symmetrized_schedule<T: Real>(
    pulses: &[Mat<T>],
    period: T,
    cycles: usize,
    tol: &Tolerances<T>,
) -> Result<PulseSchedule<T>> {
    if pulses.is_empty() {
        return PulseSchedule::new(
            period,
            vec![Segment {
                pulse: None,
                fraction: T::one(),
            }],
            cycles,
            tol,
        );
    }
    let group = group_closure(pulses, GROUP_LIMIT, tol)?;
    let m = group.len();
    let frac = T::one() / T::from_f64c(m as f64);
    let mut segments = Vec::with_capacity(m);
    for k in 1..m {
        segments.push(Segment {
            pulse: Some(group[k].mul(&group[k - 1].adjoint())),
            fraction: frac,
        });
    }
    segments.push(Segment {
        pulse: Some(group[m - 1].adjoint()),
        fraction: frac,
    });
    PulseSchedule::new(period, segments, cycles, tol)
}

/// Spectral-norm distance between a one-period propagator and the ideal
/// evolution under the averaged Hamiltonian for the same period.
pub fn refocusing_error<T: Real>(
    u_period: &Mat<T>,
    h_avg: &Mat<T>,
    period: T,
    tol: &Tolerances<T>,
) -> Result<T> {
    let ideal = unitary_exp(h_avg, period, tol)?;
    Ok(op_norm(&u_period.sub(&ideal)))
}

/// Largest phase-insensitive deviation of u from the identity:
/// min over a global phase of the spectral-norm distance, computed by
/// rotating the trace onto the positive real axis.
pub fn identity_defect<T: Real>(u: &Mat<T>) -> T {
    let tr = u.trace();
    let n = tr.norm();
    let phase = if n < T::from_f64c(1e-14) {
        cr(T::one())
    } else {
        tr.conj() * (T::one() / n)
    };
    op_norm(&u.map(|z| z * phase).sub(&Mat::identity(u.rows())))
}

/// A named TPS proposal: an algebra family plus an optional code subspace
/// projector.
#[derive(Clone, Debug)]
pub struct CandidateTps<T: Real> {
    pub name: String,
    pub algebras: Vec<Algebra<T>>,
    pub code_space: Option<Mat<T>>,
}

/// Verdict for one candidate family against the active interaction set.
#[derive(Clone, Debug)]
pub struct CandidateOutcome<T: Real> {
    pub name: String,
    /// Whether the algebra generated by the active terms lies inside the
    /// family's join, and how far outside it reaches.
    pub contained_in_join: bool,
    pub containment_residual: f64,
    /// Whether every active term lies in the span of some single member
    /// algebra. This, not join containment, is what makes the family's
    /// subsystems individually controllable by the active interactions.
    pub per_term_accessible: bool,
    pub axioms: AxiomReport,
    pub induced: Option<TpsFactorization<T>>,
}

/// Which TPSs the currently active interactions induce.
#[derive(Clone, Debug)]
pub struct MorphingReport<T: Real> {
    pub active_labels: Vec<String>,
    /// Dimension of the algebra generated by the active terms; None when
    /// nothing is active.
    pub active_algebra_dim: Option<usize>,
    pub note: Option<String>,
    pub outcomes: Vec<CandidateOutcome<T>>,
}

/// Evaluates which candidate TPSs the active part of a tunable Hamiltonian
/// induces. A term is active when its coupling is nonzero. A candidate is
/// induced when its family passes the subsystem axioms and every active
/// term is local to one of its member algebras; join containment is
/// reported alongside but does not gate, since a full matrix algebra in the
/// family would contain every interaction without making it local.
pub fn active_tps<T: Real>(
    spec: &HamiltonianSpec<T>,
    couplings: &[T],
    candidates: &[CandidateTps<T>],
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<MorphingReport<T>> {
    if couplings.len() != spec.terms().len() {
        return Err(Error::InvalidInput(format!(
            "{} couplings for {} terms",
            couplings.len(),
            spec.terms().len()
        )));
    }
    let active: Vec<&HamTerm<T>> = spec
        .terms()
        .iter()
        .zip(couplings)
        .filter(|(_, c)| **c != T::zero())
        .map(|(t, _)| t)
        .collect();
    let active_labels: Vec<String> = active.iter().map(|t| t.label.clone()).collect();

    let generated = if active.is_empty() {
        None
    } else {
        let ops: Vec<Mat<T>> = active.iter().map(|t| t.op.clone()).collect();
        Some(Algebra::close("active interactions", &ops, tol)?)
    };

    let mut outcomes = Vec::with_capacity(candidates.len());
    for (idx, cand) in candidates.iter().enumerate() {
        let refs: Vec<&Algebra<T>> = cand.algebras.iter().collect();
        let axioms = check_axioms(&refs, cand.code_space.as_ref(), tol)?;
        let (contained, residual) = match &generated {
            Some(g) => {
                let j = join("candidate join", &refs, tol)?;
                let r = g.inclusion_residual(&j);
                (r <= tol.residual_abs, r.to_f64c())
            }
            None => (true, 0.0),
        };
        let accessible = active.iter().all(|t| {
            cand.algebras
                .iter()
                .any(|a| a.contains(&t.op) <= tol.residual_for(t.op.fro_norm()))
        });
        let induced = if !active.is_empty() && accessible && axioms.passes() {
            Some(induced_tps(
                &refs,
                cand.code_space.as_ref(),
                subseed(seed, SALT_MORPH + idx as u64),
                tol,
            )?)
        } else {
            None
        };
        outcomes.push(CandidateOutcome {
            name: cand.name.clone(),
            contained_in_join: contained,
            containment_residual: residual,
            per_term_accessible: accessible,
            axioms,
            induced,
        });
    }

    Ok(MorphingReport {
        active_labels,
        active_algebra_dim: generated.as_ref().map(|g| g.dim()),
        note: if active.is_empty() {
            Some("no interactions active".into())
        } else {
            None
        },
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{
        collective_spins, embed_qubit, exchange_coupling, pauli_string, pauli_x, pauli_y, pauli_z,
        symmetric_group_matrices,
    };
    use crate::entangle::{cut_entropy, StateVec};
    use crate::factorize::wedderburn;
    use crate::scalar::cr;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    /// Two-body pair Hamiltonian: one-body-acting terms of each algebra in
    /// a fixed coupling pattern. Labels double as pauli strings.
    fn pair_hamiltonian() -> HamiltonianSpec<f64> {
        let entries = [
            ("XI", "chi", 0.3),
            ("YZ", "chi", 0.7),
            ("ZZ", "chi", 0.5),
            ("IZ", "lambda", 0.4),
            ("XY", "lambda", 0.6),
            ("XX", "lambda", 0.2),
        ];
        let mut terms = Vec::new();
        let mut couplings = Vec::new();
        for (s, tag, c) in entries {
            terms.push(HamTerm {
                label: s.to_string(),
                op: pauli_string::<f64>(s).unwrap(),
                tag: tag.to_string(),
            });
            couplings.push(c);
        }
        HamiltonianSpec::new(terms, couplings, &tol()).unwrap()
    }

    #[test]
    fn hamiltonian_spec_validates_terms() {
        let t = |s: &str| HamTerm {
            label: s.to_string(),
            op: pauli_string::<f64>(s).unwrap(),
            tag: String::new(),
        };
        assert!(HamiltonianSpec::new(vec![t("X")], vec![1.0, 2.0], &tol()).is_err());
        let mismatched = vec![t("X"), t("XX")];
        assert!(HamiltonianSpec::new(mismatched, vec![1.0, 1.0], &tol()).is_err());
        let skew = HamTerm {
            label: "raise".into(),
            op: Mat::from_fn(2, 2, |i, j| if i == 0 && j == 1 { cr(1.0) } else { cr(0.0) }),
            tag: String::new(),
        };
        assert!(matches!(
            HamiltonianSpec::new(vec![skew], vec![1.0], &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn assemble_weights_terms() {
        let spec = pair_hamiltonian();
        let zero = spec.assemble_with(&[0.0; 6]).unwrap();
        assert_eq!(zero.max_abs(), 0.0);

        let only_zz = spec.assemble_with(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(only_zz.dist(&pauli_string::<f64>("ZZ").unwrap()) < 1e-15);

        let h = spec.assemble();
        assert!(h.hermiticity_residual() < 1e-12);
    }

    #[test]
    fn pulse_schedule_validation() {
        let p = pauli_string::<f64>("XI").unwrap();
        let seg = |frac: f64| Segment {
            pulse: Some(p.clone()),
            fraction: frac,
        };
        assert!(PulseSchedule::new(0.0, vec![seg(1.0)], 1, &tol()).is_err());
        assert!(PulseSchedule::new(1.0, vec![seg(1.0)], 0, &tol()).is_err());
        assert!(PulseSchedule::new(1.0, vec![seg(0.5), seg(0.6)], 1, &tol()).is_err());
        let shear = Mat::from_fn(4, 4, |i, j| {
            if i == j {
                cr(1.0)
            } else if i == 0 && j == 1 {
                cr(0.5)
            } else {
                cr(0.0)
            }
        });
        let bad = Segment {
            pulse: Some(shear),
            fraction: 1.0,
        };
        assert!(matches!(
            PulseSchedule::new(1.0, vec![bad], 1, &tol()),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn single_free_segment_matches_the_exponential() {
        let h = pair_hamiltonian().assemble();
        let schedule = PulseSchedule::new(
            0.7,
            vec![Segment {
                pulse: None,
                fraction: 1.0,
            }],
            3,
            &tol(),
        )
        .unwrap();
        let run = strobe(&h, &schedule, &tol()).unwrap();
        let expected = unitary_exp(&h, 0.7 * 3.0, &tol()).unwrap();
        assert!(run.total.dist(&expected) < 1e-10);
        assert_eq!(run.cycle_propagators.len(), 3);
        assert!(run.cycle_propagators[0]
            .dist(&unitary_exp(&h, 0.7, &tol()).unwrap())
            < 1e-10);
        assert!(run.diagnostics.unitarity_residual < 1e-10);
    }

    #[test]
    fn anticommuting_pulse_refocuses_exactly() {
        // P = X(x)1 anticommutes with H = Z(x)Z, so P e^{-iHT/2} P undoes
        // the other half period
        let h = pauli_string::<f64>("ZZ").unwrap();
        let p = pauli_string::<f64>("XI").unwrap();
        let schedule = symmetrized_schedule(&[p], 0.9, 4, &tol()).unwrap();
        assert_eq!(schedule.segments().len(), 2);
        let run = strobe(&h, &schedule, &tol()).unwrap();
        assert!(identity_defect(&run.total) < 1e-9);
        for u in &run.cycle_propagators {
            assert!(identity_defect(u) < 1e-9);
        }
    }

    #[test]
    fn group_closure_enumerates_small_pauli_groups() {
        let g = group_closure(
            &[
                pauli_string::<f64>("XI").unwrap(),
                pauli_string::<f64>("IZ").unwrap(),
            ],
            GROUP_LIMIT,
            &tol(),
        )
        .unwrap();
        assert_eq!(g.len(), 4);
        assert!(g[0].dist(&Mat::identity(4)) == 0.0);

        // X and Y close with signs and the element iZ, but no free phase i
        let g2 = group_closure(&[pauli_x::<f64>(), pauli_y::<f64>()], GROUP_LIMIT, &tol()).unwrap();
        assert_eq!(g2.len(), 8);

        assert!(matches!(
            group_closure(&[pauli_x::<f64>(), pauli_y::<f64>()], 5, &tol()),
            Err(Error::GroupTooLarge { limit: 5 })
        ));
    }

    #[test]
    fn refocus_average_cancels_anticommuting_terms() {
        let zz = pauli_string::<f64>("ZZ").unwrap();
        let xi = pauli_string::<f64>("XI").unwrap();
        let h = zz.add(&xi);
        let avg = refocus_average(&h, &[xi.clone()], &tol()).unwrap();
        assert!(avg.dist(&xi) < 1e-12);

        let untouched = refocus_average(&h, &[], &tol()).unwrap();
        assert!(untouched.dist(&h) == 0.0);
    }

    #[test]
    fn refocus_average_keeps_only_one_body_terms_of_the_pair_hamiltonian() {
        let spec = pair_hamiltonian();
        let h = spec.assemble();
        let pulses = [
            pauli_string::<f64>("XI").unwrap(),
            pauli_string::<f64>("IZ").unwrap(),
        ];
        let avg = refocus_average(&h, &pulses, &tol()).unwrap();
        let survivors = spec
            .assemble_with(&[0.3, 0.0, 0.0, 0.4, 0.0, 0.0])
            .unwrap();
        assert!(avg.dist(&survivors) < 1e-12);
    }

    #[test]
    fn refocusing_error_shrinks_quadratically() {
        let spec = pair_hamiltonian();
        let h = spec.assemble();
        let pulses = [
            pauli_string::<f64>("XI").unwrap(),
            pauli_string::<f64>("IZ").unwrap(),
        ];
        let h_avg = refocus_average(&h, &pulses, &tol()).unwrap();
        let error_at = |t: f64| {
            let schedule = symmetrized_schedule(&pulses, t, 1, &tol()).unwrap();
            let run = strobe(&h, &schedule, &tol()).unwrap();
            refocusing_error(&run.total, &h_avg, t, &tol()).unwrap()
        };
        let periods = [0.4, 0.2, 0.1, 0.05];
        let errors: Vec<f64> = periods.iter().map(|&t| error_at(t)).collect();
        assert!(errors[0] < 0.1, "E(0.4) = {}", errors[0]);
        for w in errors.windows(2) {
            assert!(w[1] / w[0] <= 0.35, "ratio {} of {:?}", w[1] / w[0], errors);
        }
    }

    #[test]
    fn cycle_endpoints_keep_product_states_separable() {
        let spec = pair_hamiltonian();
        let h = spec.assemble();
        let pulses = [
            pauli_string::<f64>("XI").unwrap(),
            pauli_string::<f64>("IZ").unwrap(),
        ];
        let chi = Algebra::close(
            "chi",
            &[
                pauli_string::<f64>("YZ").unwrap(),
                pauli_string::<f64>("ZZ").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        let lam = Algebra::close(
            "lambda",
            &[
                pauli_string::<f64>("XY").unwrap(),
                pauli_string::<f64>("XX").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        let tps = induced_tps(&[&chi, &lam], None, 99, &tol()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let start = StateVec::new(vec![cr(r), cr(0.0), cr(0.0), cr(r)]).unwrap();

        let max_endpoint_entropy = |t: f64| -> f64 {
            let schedule = symmetrized_schedule(&pulses, t, 8, &tol()).unwrap();
            let run = strobe(&h, &schedule, &tol()).unwrap();
            run.cycle_propagators
                .iter()
                .map(|u| {
                    let evolved = StateVec::new(u.matvec(start.amplitudes())).unwrap();
                    cut_entropy(&evolved, &tps, &[0], &tol()).unwrap().nats
                })
                .fold(0.0, f64::max)
        };
        let ts = [0.4, 0.2, 0.1, 0.05];
        let s: Vec<f64> = ts.iter().map(|&t| max_endpoint_entropy(t)).collect();
        let c = (s[0] / (ts[0] * ts[0])).max(s[1] / (ts[1] * ts[1]));
        for k in 2..ts.len() {
            assert!(
                s[k] <= c * ts[k] * ts[k],
                "entropy {} above bound {} at T={}",
                s[k],
                c * ts[k] * ts[k],
                ts[k]
            );
        }
    }

    /// Three-qubit tunable Hamiltonian: pairwise exchange couplings,
    /// collective spins, and single-site fields.
    fn three_qubit_spec() -> HamiltonianSpec<f64> {
        let mut terms = Vec::new();
        for (j, k) in [(0usize, 1usize), (0, 2), (1, 2)] {
            terms.push(HamTerm {
                label: format!("exchange {j}{k}"),
                op: exchange_coupling::<f64>(3, j, k),
                tag: "exchange".into(),
            });
        }
        for (axis, op) in [('x', pauli_x::<f64>()), ('y', pauli_y()), ('z', pauli_z())] {
            let mut acc = Mat::zeros(8, 8);
            for q in 0..3 {
                acc = acc.add(&embed_qubit(&op, 3, q));
            }
            terms.push(HamTerm {
                label: format!("collective {axis}"),
                op: acc.scaled_re(0.5),
                tag: "collective".into(),
            });
        }
        for q in 0..3 {
            for (axis, op) in [('x', pauli_x::<f64>()), ('y', pauli_y()), ('z', pauli_z())] {
                terms.push(HamTerm {
                    label: format!("site {q} {axis}"),
                    op: embed_qubit(&op, 3, q),
                    tag: "local".into(),
                });
            }
        }
        let n = terms.len();
        HamiltonianSpec::new(terms, vec![1.0; n], &tol()).unwrap()
    }

    fn three_qubit_candidates() -> Vec<CandidateTps<f64>> {
        let coll = Algebra::close("collective", &collective_spins::<f64>(3), &tol()).unwrap();
        let perm = Algebra::close("permutation", &symmetric_group_matrices::<f64>(3), &tol())
            .unwrap();
        // code: the two-fold degenerate spin-1/2 sector
        let dec = wedderburn(&coll, 17, &tol()).unwrap();
        let half = dec
            .blocks
            .iter()
            .find(|b| b.irrep_dim == 2)
            .expect("spin-1/2 block");
        assert_eq!(half.multiplicity, 2);
        let encoded = CandidateTps {
            name: "encoded pair".into(),
            algebras: vec![coll, perm],
            code_space: Some(half.projector.clone()),
        };
        let standard = CandidateTps {
            name: "standard qubits".into(),
            algebras: (0..3)
                .map(|q| {
                    Algebra::close(
                        &format!("qubit {q}"),
                        &[
                            embed_qubit(&pauli_x::<f64>(), 3, q),
                            embed_qubit(&pauli_z::<f64>(), 3, q),
                        ],
                        &tol(),
                    )
                    .unwrap()
                })
                .collect(),
            code_space: None,
        };
        vec![encoded, standard]
    }

    #[test]
    fn symmetric_couplings_induce_the_encoded_pair() {
        let spec = three_qubit_spec();
        let mut couplings = vec![0.0; spec.terms().len()];
        for (i, t) in spec.terms().iter().enumerate() {
            if t.tag != "local" {
                couplings[i] = 1.0;
            }
        }
        let report = active_tps(&spec, &couplings, &three_qubit_candidates(), 23, &tol()).unwrap();
        let encoded = &report.outcomes[0];
        assert!(encoded.per_term_accessible);
        assert!(encoded.axioms.passes());
        let fact = encoded.induced.as_ref().expect("encoded TPS induced");
        assert_eq!(fact.factor_dims, vec![2, 2]);
        assert_eq!(fact.code_dim, 4);

        let standard = &report.outcomes[1];
        assert!(!standard.per_term_accessible);
        assert!(standard.induced.is_none());
    }

    #[test]
    fn local_couplings_induce_the_standard_qubits() {
        let spec = three_qubit_spec();
        let mut couplings = vec![0.0; spec.terms().len()];
        for (i, t) in spec.terms().iter().enumerate() {
            if t.tag == "local" {
                couplings[i] = 0.8;
            }
        }
        let report = active_tps(&spec, &couplings, &three_qubit_candidates(), 23, &tol()).unwrap();
        let encoded = &report.outcomes[0];
        assert!(!encoded.per_term_accessible);
        assert!(encoded.induced.is_none());

        let standard = &report.outcomes[1];
        assert!(standard.per_term_accessible);
        let fact = standard.induced.as_ref().expect("standard TPS induced");
        assert_eq!(fact.factor_dims, vec![2, 2, 2]);
    }

    #[test]
    fn all_couplings_active_induce_nothing() {
        let spec = three_qubit_spec();
        let couplings = vec![1.0; spec.terms().len()];
        let report = active_tps(&spec, &couplings, &three_qubit_candidates(), 23, &tol()).unwrap();
        // everything reachable: the active algebra is all of End(C^8)
        assert_eq!(report.active_algebra_dim, Some(64));
        for outcome in &report.outcomes {
            assert!(!outcome.per_term_accessible);
            assert!(outcome.induced.is_none());
        }
    }

    #[test]
    fn no_active_interactions_is_reported_not_an_error() {
        let spec = three_qubit_spec();
        let couplings = vec![0.0; spec.terms().len()];
        let report = active_tps(&spec, &couplings, &three_qubit_candidates(), 23, &tol()).unwrap();
        assert_eq!(report.note.as_deref(), Some("no interactions active"));
        assert_eq!(report.active_algebra_dim, None);
        assert!(report.outcomes.iter().all(|o| o.induced.is_none()));
    }
}
