//! Problem file format: a JSON document naming operators, algebras, chains,
//! charges, Hamiltonians, and schedules, resolved here into core objects.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use tpsforge_core::algebra::Algebra;
use tpsforge_core::builders::{
    collective_spin, exchange_coupling, pauli_string, qubit_permutation,
};
use tpsforge_core::dynamics::{HamTerm, HamiltonianSpec, PulseSchedule, Segment};
use tpsforge_core::error::{Error, Result};
use tpsforge_core::scalar::c;
use tpsforge_core::{Mat64, Tolerances64};

/// One operator, in any of the supported notations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    /// Pauli string with an optional complex coefficient prefix,
    /// e.g. "XY", "-0.5 ZZ", "i YZ", "0.5+0.25i XX". Case-insensitive.
    Pauli { pauli: String },
    /// Qubit permutation as a list of cycles, e.g. [[0,1],[2,3,4]].
    Perm { perm: Vec<Vec<usize>> },
    /// Heisenberg exchange between two qubits.
    Exchange { exchange: [usize; 2] },
    /// Collective spin component: "x", "y", or "z".
    Collective { collective: String },
    /// Dense matrix as separate real and imaginary entry arrays.
    Dense { dense: DenseSpec },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub op: OperatorSpec,
    #[serde(default)]
    pub tag: String,
    pub coupling: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HamiltonianFileSpec {
    pub terms: Vec<TermSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<OperatorSpec>,
    pub fraction: f64,
}

/// Either a pulse set (expanded into the symmetrized refocusing cycle) or
/// explicit segments.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub period: f64,
    #[serde(default = "one")]
    pub cycles: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulses: Option<Vec<OperatorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<SegmentSpec>>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eig_cluster_rel: Option<f64>,
}

/// The document as written by the user. Field names are the file format.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default)]
    pub generators: IndexMap<String, Vec<OperatorSpec>>,
    /// Algebra name -> generator list names whose union is closed into the
    /// algebra. When absent, every generator list doubles as an algebra.
    #[serde(default)]
    pub algebras: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_space: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charges: Option<Vec<OperatorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianFileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
}

/// Schedule ready to run: either built from a pulse set or given literally.
pub struct ResolvedSchedule {
    pub period: f64,
    pub cycles: usize,
    /// Present when the schedule was specified as a pulse set.
    pub pulses: Option<Vec<Mat64>>,
    pub schedule: PulseSchedule<f64>,
}

/// Everything in the file turned into core objects.
pub struct ResolvedProblem {
    pub dim: usize,
    pub qubits: Option<usize>,
    pub generators: IndexMap<String, Vec<Mat64>>,
    pub algebras: IndexMap<String, Algebra<f64>>,
    /// Algebra name -> generator list names it closes over.
    pub algebra_refs: IndexMap<String, Vec<String>>,
    pub chain: Vec<String>,
    pub code_space: Option<Mat64>,
    pub charge: Option<Algebra<f64>>,
    pub hamiltonian: Option<HamiltonianSpec<f64>>,
    pub schedule: Option<ResolvedSchedule>,
    pub seed: Option<u64>,
    pub tol: Tolerances64,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<ResolvedProblem> {
        let tol = self.tolerances();
        let (dim, qubits) = match (self.qubits, self.dim) {
            (Some(n), None) => {
                if n == 0 || n > 20 {
                    return Err(Error::InvalidInput(format!("qubits = {n} out of range 1..=20")));
                }
                (1usize << n, Some(n))
            }
            (None, Some(d)) => {
                if d == 0 {
                    return Err(Error::InvalidInput("dim must be positive".into()));
                }
                (d, None)
            }
            (Some(n), Some(d)) if (1usize << n) == d => (d, Some(n)),
            (Some(n), Some(d)) => {
                return Err(Error::InvalidInput(format!(
                    "qubits = {n} implies dim {}, file says dim = {d}",
                    1usize << n
                )))
            }
            (None, None) => {
                return Err(Error::InvalidInput("one of `qubits` or `dim` is required".into()))
            }
        };

        let mut generators: IndexMap<String, Vec<Mat64>> = IndexMap::new();
        for (name, specs) in &self.generators {
            let mats = specs
                .iter()
                .map(|s| resolve_operator(s, dim, qubits))
                .collect::<Result<Vec<_>>>()?;
            if mats.is_empty() {
                return Err(Error::InvalidInput(format!("generator list `{name}` is empty")));
            }
            generators.insert(name.clone(), mats);
        }

        let mut algebras: IndexMap<String, Algebra<f64>> = IndexMap::new();
        let mut algebra_refs: IndexMap<String, Vec<String>> = IndexMap::new();
        if self.algebras.is_empty() {
            for (name, mats) in &generators {
                algebras.insert(name.clone(), Algebra::close(name, mats, &tol)?);
                algebra_refs.insert(name.clone(), vec![name.clone()]);
            }
        } else {
            for (name, refs) in &self.algebras {
                let mut mats = Vec::new();
                for r in refs {
                    let list = generators.get(r).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "algebra `{name}` references unknown generator list `{r}`"
                        ))
                    })?;
                    mats.extend(list.iter().cloned());
                }
                if mats.is_empty() {
                    return Err(Error::InvalidInput(format!("algebra `{name}` has no generators")));
                }
                algebras.insert(name.clone(), Algebra::close(name, &mats, &tol)?);
                algebra_refs.insert(name.clone(), refs.clone());
            }
        }

        let chain = self.chain.clone().unwrap_or_default();
        for name in &chain {
            if !algebras.contains_key(name) {
                return Err(Error::InvalidInput(format!(
                    "chain references unknown algebra `{name}`"
                )));
            }
        }

        let code_space = match &self.code_space {
            Some(spec) => {
                let p = resolve_operator(spec, dim, qubits)?;
                let herm = p.hermiticity_residual();
                if herm > tol.residual_for(p.fro_norm()) {
                    return Err(Error::InvalidInput(format!(
                        "code_space is not Hermitian (residual {herm:.3e})"
                    )));
                }
                let idem = p.mul(&p).dist(&p);
                if idem > tol.residual_for(p.fro_norm()) {
                    return Err(Error::InvalidInput(format!(
                        "code_space is not a projector (P^2 residual {idem:.3e})"
                    )));
                }
                Some(p)
            }
            None => None,
        };

        let charge = match &self.charges {
            Some(specs) if !specs.is_empty() => {
                let mats = specs
                    .iter()
                    .map(|s| resolve_operator(s, dim, qubits))
                    .collect::<Result<Vec<_>>>()?;
                Some(Algebra::close("charge", &mats, &tol)?)
            }
            _ => None,
        };

        let hamiltonian = match &self.hamiltonian {
            Some(h) => {
                let mut terms = Vec::new();
                let mut couplings = Vec::new();
                for (k, t) in h.terms.iter().enumerate() {
                    let op = resolve_operator(&t.op, dim, qubits)?;
                    terms.push(HamTerm {
                        label: t.label.clone().unwrap_or_else(|| format!("term {k}")),
                        op,
                        tag: t.tag.clone(),
                    });
                    couplings.push(t.coupling);
                }
                Some(HamiltonianSpec::new(terms, couplings, &tol)?)
            }
            None => None,
        };

        let schedule = match &self.schedule {
            Some(s) => Some(resolve_schedule(s, dim, qubits, &tol)?),
            None => None,
        };

        Ok(ResolvedProblem {
            dim,
            qubits,
            generators,
            algebras,
            algebra_refs,
            chain,
            code_space,
            charge,
            hamiltonian,
            schedule,
            seed: self.seed,
            tol,
        })
    }

    pub fn tolerances(&self) -> Tolerances64 {
        let mut tol = Tolerances64::default();
        if let Some(t) = &self.tolerances {
            if let Some(x) = t.rank_rel {
                tol.rank_rel = x;
            }
            if let Some(x) = t.residual_abs {
                tol.residual_abs = x;
            }
            if let Some(x) = t.eig_cluster_rel {
                tol.eig_cluster_rel = x;
            }
        }
        tol
    }
}

fn resolve_schedule(
    s: &ScheduleSpec,
    dim: usize,
    qubits: Option<usize>,
    tol: &Tolerances64,
) -> Result<ResolvedSchedule> {
    match (&s.pulses, &s.segments) {
        (Some(_), Some(_)) => Err(Error::InvalidInput(
            "schedule takes either `pulses` or `segments`, not both".into(),
        )),
        (None, None) => Err(Error::InvalidInput(
            "schedule needs `pulses` or `segments`".into(),
        )),
        (Some(pulses), None) => {
            let mats = pulses
                .iter()
                .map(|p| resolve_operator(p, dim, qubits))
                .collect::<Result<Vec<_>>>()?;
            let schedule =
                tpsforge_core::dynamics::symmetrized_schedule(&mats, s.period, s.cycles, tol)?;
            Ok(ResolvedSchedule {
                period: s.period,
                cycles: s.cycles,
                pulses: Some(mats),
                schedule,
            })
        }
        (None, Some(segs)) => {
            let segments = segs
                .iter()
                .map(|seg| {
                    Ok(Segment {
                        pulse: seg
                            .pulse
                            .as_ref()
                            .map(|p| resolve_operator(p, dim, qubits))
                            .transpose()?,
                        fraction: seg.fraction,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let schedule = PulseSchedule::new(s.period, segments, s.cycles, tol)?;
            Ok(ResolvedSchedule {
                period: s.period,
                cycles: s.cycles,
                pulses: None,
                schedule,
            })
        }
    }
}

pub fn resolve_operator(spec: &OperatorSpec, dim: usize, qubits: Option<usize>) -> Result<Mat64> {
    let need_qubits = |what: &str| {
        qubits.ok_or_else(|| {
            Error::InvalidInput(format!("`{what}` operators need a `qubits` space"))
        })
    };
    match spec {
        OperatorSpec::Pauli { pauli } => {
            let n = need_qubits("pauli")?;
            let (coeff, letters) = split_pauli_entry(pauli)?;
            if letters.len() != n {
                return Err(Error::InvalidInput(format!(
                    "pauli string `{letters}` has {} letters on a {n}-qubit space",
                    letters.len()
                )));
            }
            let m = pauli_string::<f64>(&letters)?;
            Ok(m.map(|z| z * coeff))
        }
        OperatorSpec::Perm { perm } => {
            let n = need_qubits("perm")?;
            let p = cycles_to_permutation(perm, n)?;
            qubit_permutation(&p)
        }
        OperatorSpec::Exchange { exchange } => {
            let n = need_qubits("exchange")?;
            let [j, k] = *exchange;
            if j >= n || k >= n || j == k {
                return Err(Error::InvalidInput(format!(
                    "exchange [{j},{k}] out of range for {n} qubits"
                )));
            }
            Ok(exchange_coupling(n, j, k))
        }
        OperatorSpec::Collective { collective } => {
            let n = need_qubits("collective")?;
            let axis = match collective.as_str() {
                "x" | "X" => 'x',
                "y" | "Y" => 'y',
                "z" | "Z" => 'z',
                other => {
                    return Err(Error::InvalidInput(format!(
                        "collective axis `{other}` (want x, y, or z)"
                    )))
                }
            };
            collective_spin(n, axis)
        }
        OperatorSpec::Dense { dense } => {
            let rows = dense.re.len();
            if rows != dim || dense.re.iter().any(|r| r.len() != dim) {
                return Err(Error::InvalidInput(format!(
                    "dense operator must be {dim}x{dim}"
                )));
            }
            if let Some(im) = &dense.im {
                if im.len() != dim || im.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidInput(
                        "dense imaginary part must match the real part's shape".into(),
                    ));
                }
            }
            Ok(Mat64::from_fn(dim, dim, |i, j| {
                let re = dense.re[i][j];
                let im = dense.im.as_ref().map_or(0.0, |m| m[i][j]);
                c(re, im)
            }))
        }
    }
}

/// Splits "coeff letters" or bare "letters"; the coefficient grammar covers
/// real, imaginary, and a+bi forms. Defaults to 1.
fn split_pauli_entry(entry: &str) -> Result<(tpsforge_core::C64, String)> {
    let trimmed = entry.trim();
    let parts: Vec<&str> = trimmed.split_whitespace().collect();
    match parts.len() {
        1 => Ok((c(1.0, 0.0), parts[0].to_string())),
        2 => Ok((parse_complex(parts[0])?, parts[1].to_string())),
        _ => Err(Error::InvalidInput(format!(
            "pauli entry `{entry}` should be `LETTERS` or `COEFF LETTERS`"
        ))),
    }
}

fn parse_complex(token: &str) -> Result<tpsforge_core::C64> {
    let bad = || Error::InvalidInput(format!("cannot parse coefficient `{token}`"));
    let t = token.trim();
    if t.is_empty() {
        return Err(bad());
    }
    // pure imaginary: ends in i/I and the rest (possibly just a sign) is real
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // a+bi / a-bi: split at the last sign that is neither leading nor an
        // exponent sign; coefficient tokens are ASCII
        let bytes = body.as_bytes();
        if let Some(pos) = (1..bytes.len())
            .rev()
            .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        {
            let re: f64 = body[..pos].parse().map_err(|_| bad())?;
            let im_str = &body[pos..];
            let im: f64 = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                s => s.parse().map_err(|_| bad())?,
            };
            return Ok(c(re, im));
        }
        let im: f64 = match body {
            "" | "+" => 1.0,
            "-" => -1.0,
            s => s.parse().map_err(|_| bad())?,
        };
        return Ok(c(0.0, im));
    }
    let re: f64 = t.parse().map_err(|_| bad())?;
    Ok(c(re, 0.0))
}

/// Expands a cycle list into a one-line permutation of 0..n.
fn cycles_to_permutation(cycles: &[Vec<usize>], n: usize) -> Result<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut seen = vec![false; n];
    for cycle in cycles {
        for &site in cycle {
            if site >= n {
                return Err(Error::InvalidInput(format!(
                    "cycle site {site} out of range for {n} qubits"
                )));
            }
            if seen[site] {
                return Err(Error::InvalidInput(format!(
                    "site {site} appears in more than one cycle"
                )));
            }
            seen[site] = true;
        }
        if cycle.len() < 2 {
            continue;
        }
        for w in 0..cycle.len() {
            p[cycle[w]] = cycle[(w + 1) % cycle.len()];
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pauli_coefficients() {
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("-0.5").unwrap(), c(-0.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), c(0.5, 0.25));
        assert_eq!(parse_complex("1-2i").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("1e-3i").unwrap(), c(0.0, 1e-3));
        assert_eq!(parse_complex("2e-3+1e-4i").unwrap(), c(2e-3, 1e-4));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn resolves_a_small_document() {
        let text = r#"{
            "qubits": 2,
            "generators": {
                "chi": [ {"pauli": "YZ"}, {"pauli": "ZZ"} ],
                "lam": [ {"pauli": "XY"}, {"pauli": "XX"} ]
            },
            "seed": 7
        }"#;
        let spec = ProblemSpec::from_json(text).unwrap();
        let resolved = spec.resolve().unwrap();
        assert_eq!(resolved.dim, 4);
        assert_eq!(resolved.algebras.len(), 2);
        assert_eq!(resolved.algebras["chi"].dim(), 4);
        assert_eq!(resolved.seed, Some(7));
    }

    #[test]
    fn cycle_lists_become_permutations() {
        let p = cycles_to_permutation(&[vec![0, 1]], 3).unwrap();
        assert_eq!(p, vec![1, 0, 2]);
        let q = cycles_to_permutation(&[vec![0, 1, 2]], 3).unwrap();
        assert_eq!(q, vec![1, 2, 0]);
        assert!(cycles_to_permutation(&[vec![0, 1], vec![1, 2]], 3).is_err());
    }

    #[test]
    fn operator_variants_resolve() {
        let swap = resolve_operator(
            &OperatorSpec::Perm {
                perm: vec![vec![0, 1]],
            },
            4,
            Some(2),
        )
        .unwrap();
        let exchange = resolve_operator(
            &OperatorSpec::Exchange { exchange: [0, 1] },
            4,
            Some(2),
        )
        .unwrap();
        // sigma.sigma = 2 SWAP - 1
        assert!(exchange.dist(&swap.scaled_re(2.0).sub(&Mat64::identity(4))) < 1e-12);

        let dense = resolve_operator(
            &OperatorSpec::Dense {
                dense: DenseSpec {
                    re: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
                    im: None,
                },
            },
            2,
            None,
        )
        .unwrap();
        assert!(dense.dist(&tpsforge_core::builders::pauli_x::<f64>()) == 0.0);

        assert!(resolve_operator(
            &OperatorSpec::Pauli {
                pauli: "XYZ".into()
            },
            4,
            Some(2)
        )
        .is_err());
    }
}
