//! Entanglement relative to a tensor product structure: state coordinates,
//! reduced density operators, von Neumann entropy, operator Schmidt
//! coefficients of gates.
//!
//! Everything here is TPS-relative: the same state can be a product state in
//! one factorization and maximally entangled in another, so every operation
//! takes the factorization's isometry into account before measuring
//! anything.

use crate::error::{Error, Result};
use crate::factorize::TpsFactorization;
use crate::mat::{eig_sym, partial_trace, svd, Mat, Tolerances};
use crate::scalar::{Real, C};

/// Eigenvalues below this are treated as exact zeros by the entropy sum;
/// rank-deficient reductions produce them routinely.
const ENTROPY_CLIP: f64 = 1e-12;
/// Normalization slack for state vectors and density-matrix traces.
const NORM_TOL: f64 = 1e-10;

/// A normalized pure state.
#[derive(Clone, Debug)]
pub struct StateVec<T: Real> {
    amplitudes: Vec<C<T>>,
}

impl<T: Real> StateVec<T> {
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("empty state vector".into()));
        }
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if (norm - T::one()).abs() > T::from_f64c(NORM_TOL) {
            return Err(Error::InvalidInput(format!(
                "state vector norm {} is not 1",
                norm.to_f64c()
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes on the way in; errors only on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C<T>>) -> Result<Self> {
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm < T::from_f64c(1e-14) {
            return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
        }
        let inv = T::one() / norm;
        for z in &mut amplitudes {
            *z = *z * inv;
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }
}

/// A validated density operator: Hermitian, positive semidefinite, unit
/// trace.
#[derive(Clone, Debug)]
pub struct DensityMat<T: Real> {
    mat: Mat<T>,
}

impl<T: Real> DensityMat<T> {
    pub fn new(mat: Mat<T>, tol: &Tolerances<T>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidDensity(format!(
                "not square: {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let h = mat.hermiticity_residual();
        if h > tol.residual_for(mat.fro_norm()) {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (residual {:.3e})",
                h.to_f64c()
            )));
        }
        let tr = mat.trace();
        if (tr.re - T::one()).abs() > T::from_f64c(NORM_TOL)
            || tr.im.abs() > T::from_f64c(NORM_TOL)
        {
            return Err(Error::InvalidDensity(format!(
                "trace {:.12} + {:.3e}i is not 1",
                tr.re.to_f64c(),
                tr.im.to_f64c()
            )));
        }
        let (vals, _) = eig_sym(&mat.hermitize());
        if let Some(min) = vals.first() {
            if *min < -tol.residual_abs {
                return Err(Error::InvalidDensity(format!(
                    "negative eigenvalue {:.3e}",
                    min.to_f64c()
                )));
            }
        }
        Ok(Self { mat })
    }

    pub fn mat(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Von Neumann entropy of the validated state.
    pub fn entropy(&self) -> Entropy<T> {
        let (vals, _) = eig_sym(&self.mat.hermitize());
        let clip = T::from_f64c(ENTROPY_CLIP);
        let mut nats = T::zero();
        for lam in vals {
            if lam >= clip {
                nats = nats - lam * lam.ln();
            }
        }
        // tiny negative results from roundoff on pure states
        if nats < T::zero() {
            nats = T::zero();
        }
        Entropy {
            nats,
            bits: nats / T::from_f64c(std::f64::consts::LN_2),
        }
    }

    /// Tr ρ², 1 exactly for pure states.
    pub fn purity(&self) -> T {
        self.mat.mul(&self.mat).trace().re
    }
}

/// Entropy in both common units; tests and tolerances are written in nats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entropy<T> {
    pub nats: T,
    pub bits: T,
}

/// State amplitudes in TPS coordinates: a tensor with one index per factor,
/// stored row-major with factor 0 most significant.
#[derive(Clone, Debug)]
pub struct TpsState<T: Real> {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<C<T>>,
}

impl<T: Real> TpsState<T> {
    /// Amplitude matrix of a bipartite cut: rows indexed by the factors in
    /// `left`, columns by the rest, both in original factor order.
    pub fn cut_matrix(&self, left: &[usize]) -> Mat<T> {
        let n = self.dims.len();
        let right: Vec<usize> = (0..n).filter(|k| !left.contains(k)).collect();
        let rows: usize = left.iter().map(|&k| self.dims[k]).product();
        let cols: usize = right.iter().map(|&k| self.dims[k]).product();
        let mut out = Mat::zeros(rows, cols);
        for (flat, amp) in self.amplitudes.iter().enumerate() {
            let mut digits = vec![0usize; n];
            let mut rem = flat;
            for k in (0..n).rev() {
                digits[k] = rem % self.dims[k];
                rem /= self.dims[k];
            }
            let mut r = 0usize;
            for &k in left {
                r = r * self.dims[k] + digits[k];
            }
            let mut c = 0usize;
            for &k in &right {
                c = c * self.dims[k] + digits[k];
            }
            out.set(r, c, *amp);
        }
        out
    }
}

/// Expresses an ambient state in the factorization's code coordinates.
/// The state must lie in the code subspace; the error reports how much of
/// it does not.
pub fn to_tps_coordinates<T: Real>(
    psi: &StateVec<T>,
    tps: &TpsFactorization<T>,
    tol: &Tolerances<T>,
) -> Result<TpsState<T>> {
    if psi.dim() != tps.space_dim {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs ambient dim {}",
            psi.dim(),
            tps.space_dim
        )));
    }
    let coords = tps.isometry.adjoint().matvec(psi.amplitudes());
    // leak measured on the residual vector itself; 1 - |V' psi|^2 would lose
    // half the mantissa to cancellation
    let back = tps.isometry.matvec(&coords);
    let out_norm = psi
        .amplitudes()
        .iter()
        .zip(&back)
        .map(|(a, b)| (*a - *b).norm_sqr())
        .fold(T::zero(), |acc, v| acc + v)
        .sqrt();
    if out_norm > tol.residual_abs {
        return Err(Error::StateOutsideCode {
            out_norm: out_norm.to_f64c(),
        });
    }
    Ok(TpsState {
        dims: tps.factor_dims.clone(),
        amplitudes: coords,
    })
}

/// Reduced density operator on the kept factors (partial trace over the
/// complement). `keep` must be a nonempty proper subset in increasing order.
pub fn reduced_density<T: Real>(
    psi: &StateVec<T>,
    tps: &TpsFactorization<T>,
    keep: &[usize],
    tol: &Tolerances<T>,
) -> Result<DensityMat<T>> {
    if keep.is_empty() || keep.len() >= tps.factor_dims.len() {
        return Err(Error::InvalidInput(
            "keep must be a nonempty proper subset of the factors".into(),
        ));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= tps.factor_dims.len()) {
        return Err(Error::InvalidInput(
            "keep indices must be strictly increasing factor indices".into(),
        ));
    }
    let state = to_tps_coordinates(psi, tps, tol)?;
    let n = state.amplitudes.len();
    let mut rho = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            rho.set(i, j, state.amplitudes[i] * state.amplitudes[j].conj());
        }
    }
    let red = partial_trace(&rho, &state.dims, keep);
    DensityMat::new(red, tol)
}

/// Entanglement entropy of a pure state across the cut `keep | rest`.
pub fn cut_entropy<T: Real>(
    psi: &StateVec<T>,
    tps: &TpsFactorization<T>,
    keep: &[usize],
    tol: &Tolerances<T>,
) -> Result<Entropy<T>> {
    Ok(reduced_density(psi, tps, keep, tol)?.entropy())
}

/// Operator Schmidt coefficients of a gate across a bipartite factorization:
/// the singular values of the pulled-back operator reshaped so each index
/// pairs row and column of one factor. Descending; for a unitary supported
/// on the code space Σ s² = d₁·d₂.
pub fn operator_schmidt<T: Real>(
    u: &Mat<T>,
    tps: &TpsFactorization<T>,
    tol: &Tolerances<T>,
) -> Result<Vec<T>> {
    if tps.factor_dims.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "operator Schmidt decomposition needs exactly 2 factors, got {}",
            tps.factor_dims.len()
        )));
    }
    if !u.is_square() || u.rows() != tps.space_dim {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} vs ambient dim {}",
            u.rows(),
            u.cols(),
            tps.space_dim
        )));
    }
    // supported on the code subspace: U must commute with the code projector
    let proj = tps.isometry.mul(&tps.isometry.adjoint());
    let leak = proj.commutator(u).fro_norm();
    if leak > tol.residual_for(u.fro_norm()) {
        return Err(Error::CodeSpaceNotInvariant {
            name: "gate".into(),
            residual: leak.to_f64c(),
        });
    }
    let pulled = tps.pullback(u);
    let (d1, d2) = (tps.factor_dims[0], tps.factor_dims[1]);
    let mut reshaped = Mat::zeros(d1 * d1, d2 * d2);
    for i in 0..d1 {
        for ip in 0..d2 {
            for j in 0..d1 {
                for jp in 0..d2 {
                    reshaped.set(i * d1 + j, ip * d2 + jp, pulled.get(i * d2 + ip, j * d2 + jp));
                }
            }
        }
    }
    Ok(svd(&reshaped).s)
}

/// Number of coefficients above `rel_tol` times the largest one.
pub fn schmidt_rank<T: Real>(coeffs: &[T], rel_tol: T) -> usize {
    let top = coeffs.first().copied().unwrap_or(T::zero());
    coeffs.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Whether two complex multisets agree after rotating one by a single
/// global phase, within `tol` per element.
pub fn matches_up_to_global_phase<T: Real>(got: &[C<T>], want: &[C<T>], tol: T) -> bool {
    if got.len() != want.len() {
        return false;
    }
    if got.is_empty() {
        return true;
    }
    let reference = want[0];
    if reference.norm() < T::from_f64c(1e-14) {
        return false;
    }
    'candidates: for anchor in got {
        let phase = *anchor / reference;
        if (phase.norm() - T::one()).abs() > tol {
            continue;
        }
        let mut remaining: Vec<C<T>> = got.to_vec();
        for w in want {
            let target = *w * phase;
            match remaining
                .iter()
                .position(|g| (*g - target).norm() <= tol)
            {
                Some(k) => {
                    remaining.swap_remove(k);
                }
                None => continue 'candidates,
            }
        }
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::builders::{pauli_string, qubit_swap};
    use crate::factorize::induced_tps;
    use crate::mat::unitary_eig;
    use crate::random::{random_unitary, rng_from};
    use crate::scalar::cr;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn chi_lambda_tps() -> TpsFactorization<f64> {
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
        induced_tps(&[&chi, &lam], None, 2024, &tol()).unwrap()
    }

    fn standard_tps() -> TpsFactorization<f64> {
        let a1 = Algebra::close(
            "q0",
            &[
                pauli_string::<f64>("XI").unwrap(),
                pauli_string::<f64>("ZI").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        let a2 = Algebra::close(
            "q1",
            &[
                pauli_string::<f64>("IX").unwrap(),
                pauli_string::<f64>("IZ").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        induced_tps(&[&a1, &a2], None, 2024, &tol()).unwrap()
    }

    fn bell(kind: usize) -> StateVec<f64> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let amps = match kind {
            0 => vec![cr(r), cr(0.0), cr(0.0), cr(r)],   // Φ+
            1 => vec![cr(r), cr(0.0), cr(0.0), cr(-r)],  // Φ−
            2 => vec![cr(0.0), cr(r), cr(r), cr(0.0)],   // Ψ+
            _ => vec![cr(0.0), cr(r), cr(-r), cr(0.0)],  // Ψ−
        };
        StateVec::new(amps).unwrap()
    }

    fn basis_state(i: usize) -> StateVec<f64> {
        let mut amps = vec![cr(0.0); 4];
        amps[i] = cr(1.0);
        StateVec::new(amps).unwrap()
    }

    #[test]
    fn state_vec_validates_norm() {
        assert!(StateVec::new(vec![cr(1.0), cr(1.0)]).is_err());
        assert!(StateVec::normalized(vec![cr(3.0), cr(4.0)]).is_ok());
        assert!(StateVec::<f64>::normalized(vec![cr(0.0)]).is_err());
    }

    #[test]
    fn density_mat_validates_structure() {
        let good = Mat::identity(2).scaled_re(0.5);
        assert!(DensityMat::new(good, &tol()).is_ok());

        let mut wrong_trace = Mat::<f64>::identity(2);
        wrong_trace.set(1, 1, cr(0.6));
        assert!(DensityMat::new(wrong_trace, &tol()).is_err());

        let mut negative = Mat::<f64>::zeros(2, 2);
        negative.set(0, 0, cr(1.5));
        negative.set(1, 1, cr(-0.5));
        assert!(DensityMat::new(negative, &tol()).is_err());
    }

    #[test]
    fn entropy_of_known_spectra() {
        let mixed = DensityMat::new(Mat::identity(2).scaled_re(0.5), &tol()).unwrap();
        assert!((mixed.entropy().nats - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((mixed.entropy().bits - 1.0).abs() < 1e-12);

        let mut pure = Mat::<f64>::zeros(2, 2);
        pure.set(0, 0, cr(1.0));
        let pure = DensityMat::new(pure, &tol()).unwrap();
        assert_eq!(pure.entropy().nats, 0.0);

        let mut skew = Mat::<f64>::zeros(2, 2);
        skew.set(0, 0, cr(0.75));
        skew.set(1, 1, cr(0.25));
        let skew = DensityMat::new(skew, &tol()).unwrap();
        let expected = -(0.75f64.ln() * 0.75 + 0.25f64.ln() * 0.25);
        assert!((skew.entropy().nats - expected).abs() < 1e-12);
    }

    #[test]
    fn bell_states_are_products_in_the_two_body_tps() {
        let tps = chi_lambda_tps();
        for kind in 0..4 {
            let e = cut_entropy(&bell(kind), &tps, &[0], &tol()).unwrap();
            assert!(e.nats < 1e-9, "Bell {kind} entropy {}", e.nats);
        }
        // The computational basis is a product basis of the same TPS: it is
        // the joint eigenbasis of the commuting pair Z(x)Z (first factor) and
        // 1(x)Z (second factor), with nondegenerate joint spectrum. Both
        // bases are unentangled here; they are joint eigenbases of different
        // local operator pairs.
        for i in 0..4 {
            let e = cut_entropy(&basis_state(i), &tps, &[0], &tol()).unwrap();
            assert!(e.nats < 1e-9, "|{i}> entropy {}", e.nats);
        }
    }

    #[test]
    fn bell_state_is_maximally_entangled_in_the_standard_tps() {
        let tps = standard_tps();
        let rho = reduced_density(&bell(0), &tps, &[0], &tol()).unwrap();
        assert!(rho.mat().dist(&Mat::identity(2).scaled_re(0.5)) < 1e-9);
        let e = rho.entropy();
        assert!((e.nats - std::f64::consts::LN_2).abs() < 1e-9);
        // product state reduces to a pure state
        let rho2 = reduced_density(&basis_state(0), &tps, &[0], &tol()).unwrap();
        assert!((rho2.purity() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn schmidt_symmetry_between_the_two_sides() {
        let tps = standard_tps();
        let amps = StateVec::normalized(vec![cr(0.9), cr(0.1), cr(0.3), cr(0.4)]).unwrap();
        let left = cut_entropy(&amps, &tps, &[0], &tol()).unwrap();
        let right = cut_entropy(&amps, &tps, &[1], &tol()).unwrap();
        assert!((left.nats - right.nats).abs() < 1e-9);
    }

    #[test]
    fn entropy_invariant_under_per_factor_unitaries() {
        let tps = standard_tps();
        let mut rng = rng_from(7);
        let u1 = random_unitary::<f64, _>(2, &mut rng);
        let u2 = random_unitary::<f64, _>(2, &mut rng);
        let local = u1.kron(&u2);
        let psi = StateVec::normalized(vec![cr(0.5), cr(0.1), cr(-0.2), cr(0.7)]).unwrap();
        let rotated =
            StateVec::new(local.matvec(psi.amplitudes())).unwrap();
        let before = cut_entropy(&psi, &tps, &[0], &tol()).unwrap();
        let after = cut_entropy(&rotated, &tps, &[0], &tol()).unwrap();
        assert!((before.nats - after.nats).abs() < 1e-9);
    }

    #[test]
    fn out_of_code_states_are_rejected_with_the_leak_norm() {
        // restrict the chi/lambda pair to a code sector first: reuse the
        // collective spin-1 sector of 4 qubits for a genuine code subspace
        let coll = Algebra::close(
            "coll",
            &crate::builders::collective_spins::<f64>(2),
            &tol(),
        )
        .unwrap();
        let dec = crate::factorize::wedderburn(&coll, 3, &tol()).unwrap();
        let triplet = dec
            .blocks
            .iter()
            .find(|b| b.irrep_dim == 3)
            .unwrap();
        let perm = Algebra::from_closed_span(
            "swap",
            &crate::builders::symmetric_group_matrices::<f64>(2),
            &tol(),
        )
        .unwrap();
        let fact = induced_tps(&[&coll, &perm], Some(&triplet.projector), 5, &tol()).unwrap();
        // the singlet is outside the triplet code space
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = StateVec::new(vec![cr(0.0), cr(r), cr(-r), cr(0.0)]).unwrap();
        match to_tps_coordinates(&singlet, &fact, &tol()) {
            Err(Error::StateOutsideCode { out_norm }) => {
                assert!((out_norm - 1.0).abs() < 1e-9);
            }
            other => panic!("expected StateOutsideCode, got {other:?}"),
        }
    }

    #[test]
    fn swap_schmidt_coefficients_in_both_factorizations() {
        let swap = qubit_swap::<f64>(2, 0, 1);
        let std_tps = standard_tps();
        let s_std = operator_schmidt(&swap, &std_tps, &tol()).unwrap();
        assert_eq!(schmidt_rank(&s_std, 1e-8), 4);
        for s in &s_std {
            assert!((s - 1.0).abs() < 1e-8, "standard coefficients {s_std:?}");
        }

        let chi_tps = chi_lambda_tps();
        let s_chi = operator_schmidt(&swap, &chi_tps, &tol()).unwrap();
        assert_eq!(schmidt_rank(&s_chi, 1e-8), 2, "chi-lambda coefficients {s_chi:?}");
        // controlled-phase structure: eigenvalues {1,1,1,-1} up to a phase
        let pulled = chi_tps.pullback(&swap);
        let (vals, _) = unitary_eig(&pulled, &tol()).unwrap();
        let want = [cr(1.0), cr(1.0), cr(1.0), cr(-1.0)];
        assert!(
            matches_up_to_global_phase(&vals, &want, 1e-8),
            "pulled SWAP eigenvalues {vals:?}"
        );
    }

    #[test]
    fn identity_gate_has_schmidt_rank_one() {
        let tps = standard_tps();
        let s = operator_schmidt(&Mat::identity(4), &tps, &tol()).unwrap();
        assert_eq!(schmidt_rank(&s, 1e-8), 1);
        assert!((s[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn schmidt_coefficients_invariant_under_local_unitaries() {
        let tps = standard_tps();
        let swap = qubit_swap::<f64>(2, 0, 1);
        let mut rng = rng_from(11);
        let local = random_unitary::<f64, _>(2, &mut rng)
            .kron(&random_unitary::<f64, _>(2, &mut rng));
        let rotated = local.adjoint().mul(&swap).mul(&local);
        let s1 = operator_schmidt(&swap, &tps, &tol()).unwrap();
        let s2 = operator_schmidt(&rotated, &tps, &tol()).unwrap();
        for (a, b) in s1.iter().zip(&s2) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn tps_state_cut_matrix_matches_amplitudes() {
        let tps = standard_tps();
        let psi = bell(0);
        let coords = to_tps_coordinates(&psi, &tps, &tol()).unwrap();
        let m = coords.cut_matrix(&[0]);
        // Schmidt rank 2 with equal coefficients 1/√2
        let s = svd(&m).s;
        assert_eq!(s.len(), 2);
        assert!((s[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((s[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }
}
