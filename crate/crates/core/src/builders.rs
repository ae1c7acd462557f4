//! Constructors for the operators the rest of the crate analyzes: Pauli
//! strings, qubit permutations, collective spin components, exchange
//! couplings, and the group-algebra spans they generate.
//!
//! Index convention: qubits are numbered 0..n left to right, qubit 0 owns the
//! most significant bit of a basis index. `kron(a, b)` therefore applies `a`
//! to the lower-numbered qubit.

use crate::error::{Error, Result};
use crate::mat::{kron_list, Mat};
use crate::scalar::{cr, Real, C};

pub fn pauli_i<T: Real>() -> Mat<T> {
    Mat::identity(2)
}

pub fn pauli_x<T: Real>() -> Mat<T> {
    let o = T::one();
    let z = T::zero();
    Mat::from_data(
        2,
        2,
        vec![C::new(z, z), C::new(o, z), C::new(o, z), C::new(z, z)],
    )
}

pub fn pauli_y<T: Real>() -> Mat<T> {
    let o = T::one();
    let z = T::zero();
    Mat::from_data(
        2,
        2,
        vec![C::new(z, z), C::new(z, -o), C::new(z, o), C::new(z, z)],
    )
}

pub fn pauli_z<T: Real>() -> Mat<T> {
    let o = T::one();
    let z = T::zero();
    Mat::from_data(
        2,
        2,
        vec![C::new(o, z), C::new(z, z), C::new(z, z), C::new(-o, z)],
    )
}

/// Parses a Pauli string like "IXZ" (leftmost letter acts on qubit 0) into
/// the corresponding operator on n = label length qubits.
pub fn pauli_string<T: Real>(label: &str) -> Result<Mat<T>> {
    if label.is_empty() {
        return Err(Error::InvalidInput("empty Pauli string".into()));
    }
    let mut factors = Vec::with_capacity(label.len());
    for ch in label.chars() {
        factors.push(match ch.to_ascii_uppercase() {
            'I' => pauli_i(),
            'X' => pauli_x(),
            'Y' => pauli_y(),
            'Z' => pauli_z(),
            other => {
                return Err(Error::InvalidInput(format!(
                    "invalid Pauli letter '{other}' in \"{label}\""
                )))
            }
        });
    }
    Ok(kron_list(&factors))
}

/// Embeds a single-qubit operator at `slot` among `n` qubits.
pub fn embed_qubit<T: Real>(op: &Mat<T>, n: usize, slot: usize) -> Mat<T> {
    assert!(slot < n);
    assert_eq!(op.dim(), 2);
    let factors: Vec<Mat<T>> = (0..n)
        .map(|k| if k == slot { op.clone() } else { Mat::identity(2) })
        .collect();
    kron_list(&factors)
}

/// Unitary on n qubits that moves the content of qubit j to qubit perm[j].
///
/// Composition matches function composition: the matrix of `sigma` applied
/// after `tau` is the matrix of `sigma ∘ tau`.
pub fn qubit_permutation<T: Real>(perm: &[usize]) -> Result<Mat<T>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidInput(format!(
                "not a permutation of 0..{n}: {perm:?}"
            )));
        }
        seen[p] = true;
    }
    let dim = 1usize << n;
    let mut m = Mat::zeros(dim, dim);
    for i in 0..dim {
        let mut j = 0usize;
        for (k, &pk) in perm.iter().enumerate() {
            let bit = (i >> (n - 1 - k)) & 1;
            j |= bit << (n - 1 - pk);
        }
        m.set(j, i, cr(T::one()));
    }
    Ok(m)
}

/// Swap of qubits a and b among n.
pub fn qubit_swap<T: Real>(n: usize, a: usize, b: usize) -> Mat<T> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(a, b);
    qubit_permutation(&perm).expect("transposition is a permutation")
}

/// Collective spin component J_a = (1/2) sum_k sigma_a^(k).
pub fn collective_spin<T: Real>(n: usize, axis: char) -> Result<Mat<T>> {
    let local = match axis.to_ascii_lowercase() {
        'x' => pauli_x(),
        'y' => pauli_y(),
        'z' => pauli_z(),
        other => {
            return Err(Error::InvalidInput(format!(
                "invalid spin axis '{other}', expected x, y, or z"
            )))
        }
    };
    let dim = 1usize << n;
    let mut acc = Mat::zeros(dim, dim);
    for k in 0..n {
        acc = acc.add(&embed_qubit(&local, n, k));
    }
    Ok(acc.scaled_re(T::from_f64c(0.5)))
}

/// All three collective spin components for n qubits.
pub fn collective_spins<T: Real>(n: usize) -> Vec<Mat<T>> {
    ['x', 'y', 'z']
        .iter()
        .map(|&a| collective_spin(n, a).expect("fixed axis"))
        .collect()
}

/// Heisenberg exchange coupling between qubits j and k:
/// sigma_x sigma_x + sigma_y sigma_y + sigma_z sigma_z, equal to
/// 2 SWAP_{jk} - 1.
pub fn exchange_coupling<T: Real>(n: usize, j: usize, k: usize) -> Mat<T> {
    let mut acc = Mat::zeros(1 << n, 1 << n);
    for local in [pauli_x::<T>(), pauli_y(), pauli_z()] {
        acc = acc.add(&embed_qubit(&local, n, j).mul(&embed_qubit(&local, n, k)));
    }
    acc
}

/// Lexicographically ordered permutations of 0..n.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Permutation matrices of the full symmetric group on n qubits, in
/// lexicographic group-element order.
pub fn symmetric_group_matrices<T: Real>(n: usize) -> Vec<Mat<T>> {
    all_permutations(n)
        .iter()
        .map(|p| qubit_permutation(p).expect("enumerated permutation"))
        .collect()
}

/// Permutation matrices of the subgroup permuting the first `a` qubits and
/// the last `b = n - a` qubits separately, lexicographic in (left, right).
pub fn parted_symmetric_group_matrices<T: Real>(n: usize, a: usize) -> Vec<Mat<T>> {
    assert!(a <= n);
    let b = n - a;
    let lefts = all_permutations(a);
    let rights = all_permutations(b);
    let mut out = Vec::with_capacity(lefts.len() * rights.len());
    for l in &lefts {
        for r in &rights {
            let mut perm = Vec::with_capacity(n);
            perm.extend(l.iter().copied());
            perm.extend(r.iter().map(|&x| x + a));
            out.push(qubit_permutation(&perm).expect("enumerated permutation"));
        }
    }
    out
}

/// Matrix unit E_jk (1 in row j, column k).
pub fn matrix_unit<T: Real>(dim: usize, j: usize, k: usize) -> Mat<T> {
    let mut m = Mat::zeros(dim, dim);
    m.set(j, k, cr(T::one()));
    m
}

/// Computational basis vector |i> in C^dim.
pub fn basis_state<T: Real>(dim: usize, i: usize) -> Vec<C<T>> {
    assert!(i < dim);
    let mut v = vec![C::new(T::zero(), T::zero()); dim];
    v[i] = cr(T::one());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::hs_inner;
    use crate::scalar::c;

    type M = Mat<f64>;

    #[test]
    fn pauli_product_table_entry() {
        // (X x Y)(X x X) = 1 x (sigma_y sigma_x) = -i (1 x Z).
        let xy = pauli_string::<f64>("XY").unwrap();
        let xx = pauli_string::<f64>("XX").unwrap();
        let iz = pauli_string::<f64>("IZ").unwrap();
        let product = xy.mul(&xx);
        let expect = iz.scaled(c(0.0, -1.0));
        assert!(product.dist(&expect) < 1e-15);
    }

    #[test]
    fn pauli_string_rejects_garbage() {
        assert!(pauli_string::<f64>("").is_err());
        assert!(pauli_string::<f64>("XQ").is_err());
        assert!(pauli_string::<f64>("xz").is_ok());
    }

    #[test]
    fn pauli_string_matches_explicit_kron() {
        let a = pauli_string::<f64>("ZX").unwrap();
        let b = pauli_z::<f64>().kron(&pauli_x());
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn embed_qubit_slots() {
        let z0 = embed_qubit(&pauli_z::<f64>(), 2, 0);
        assert_eq!(z0.data(), pauli_string::<f64>("ZI").unwrap().data());
        let z1 = embed_qubit(&pauli_z::<f64>(), 2, 1);
        assert_eq!(z1.data(), pauli_string::<f64>("IZ").unwrap().data());
    }

    #[test]
    fn swap_is_the_swap_matrix() {
        let s = qubit_swap::<f64>(2, 0, 1);
        // |01> <-> |10>, |00> and |11> fixed.
        assert_eq!(s.get(0, 0), c(1.0, 0.0));
        assert_eq!(s.get(2, 1), c(1.0, 0.0));
        assert_eq!(s.get(1, 2), c(1.0, 0.0));
        assert_eq!(s.get(3, 3), c(1.0, 0.0));
        assert!(s.unitarity_residual() < 1e-15);
    }

    #[test]
    fn permutation_action_is_a_homomorphism() {
        // sigma = (0 1 2) -> perm [1,2,0]; tau = swap(0,1) -> [1,0,2].
        let sigma = vec![1usize, 2, 0];
        let tau = vec![1usize, 0, 2];
        let composed: Vec<usize> = (0..3).map(|k| sigma[tau[k]]).collect();
        let ps = qubit_permutation::<f64>(&sigma).unwrap();
        let pt = qubit_permutation::<f64>(&tau).unwrap();
        let pc = qubit_permutation::<f64>(&composed).unwrap();
        assert!(ps.mul(&pt).dist(&pc) < 1e-15);
    }

    #[test]
    fn qubit_permutation_rejects_non_permutations() {
        assert!(qubit_permutation::<f64>(&[0, 0, 1]).is_err());
        assert!(qubit_permutation::<f64>(&[0, 3]).is_err());
    }

    #[test]
    fn collective_spin_commutators() {
        // [Jx, Jy] = i Jz on any qubit count.
        for n in 1..=3 {
            let jx = collective_spin::<f64>(n, 'x').unwrap();
            let jy = collective_spin::<f64>(n, 'y').unwrap();
            let jz = collective_spin::<f64>(n, 'z').unwrap();
            let comm = jx.commutator(&jy);
            let expect = jz.scaled(c(0.0, 1.0));
            assert!(comm.dist(&expect) < 1e-13);
        }
    }

    #[test]
    fn casimir_spectrum_two_qubits() {
        // J^2 on two qubits: singlet 0, triplet J(J+1) = 2.
        let [jx, jy, jz]: [M; 3] = collective_spins::<f64>(2).try_into().unwrap();
        let j2 = jx.mul(&jx).add(&jy.mul(&jy)).add(&jz.mul(&jz));
        let (vals, _) = crate::mat::hermitian_eig(&j2, &Default::default()).unwrap();
        let expect = [0.0, 2.0, 2.0, 2.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn exchange_equals_twice_swap_minus_identity() {
        for (n, j, k) in [(2usize, 0usize, 1usize), (3, 0, 2), (4, 1, 3)] {
            let h = exchange_coupling::<f64>(n, j, k);
            let expect = qubit_swap::<f64>(n, j, k)
                .scaled_re(2.0)
                .sub(&M::identity(1 << n));
            assert!(h.dist(&expect) < 1e-14);
        }
    }

    #[test]
    fn permutation_enumeration_is_lexicographic_and_complete() {
        let perms = all_permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[0], vec![0, 1, 2]);
        assert_eq!(perms[5], vec![2, 1, 0]);
        for w in perms.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(all_permutations(0).len(), 1);
        assert_eq!(all_permutations(1).len(), 1);
        assert_eq!(all_permutations(4).len(), 24);
    }

    #[test]
    fn parted_group_size_and_membership() {
        let ms = parted_symmetric_group_matrices::<f64>(4, 2);
        assert_eq!(ms.len(), 4);
        // Every element commutes with SWAP(0,1) conjugated into the subgroup;
        // cheap sanity: all are unitary permutation matrices.
        for m in &ms {
            assert!(m.unitarity_residual() < 1e-15);
        }
    }

    #[test]
    fn group_matrices_commute_with_collective_spin() {
        // Schur-Weyl: permutation action commutes with collective rotations.
        let perms = symmetric_group_matrices::<f64>(3);
        assert_eq!(perms.len(), 6);
        for axis in ['x', 'y', 'z'] {
            let j = collective_spin::<f64>(3, axis).unwrap();
            for p in &perms {
                assert!(p.commutator(&j).fro_norm() < 1e-13);
            }
        }
    }

    #[test]
    fn matrix_unit_inner_products() {
        let e01 = matrix_unit::<f64>(2, 0, 1);
        let e10 = matrix_unit::<f64>(2, 1, 0);
        assert_eq!(hs_inner(&e01, &e01).unwrap(), c(1.0, 0.0));
        assert_eq!(hs_inner(&e01, &e10).unwrap(), c(0.0, 0.0));
        assert_eq!(basis_state::<f64>(4, 2)[2], c(1.0, 0.0));
    }
}
