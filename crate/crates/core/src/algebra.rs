//! Unital *-algebras of operators: generation from observables, commutants,
//! centers, joins, minimal central projections, and the subsystem axioms.
//!
//! An [`Algebra`] is stored as a Hilbert-Schmidt-orthonormal basis of its
//! span. All spans here are unital, closed under adjoints, and closed under
//! products; the constructors either enforce that (closure) or verify the
//! cheap parts and trust the caller for the rest (spans of group elements).

use crate::error::{Error, Result};
use crate::mat::{
    cluster_ranges, cpqr_range, eig_sym, extend_orthonormal_block,
    hs_inner_unchecked, kernel_of_gram, orthonormal_basis, project_onto_span, span_residual, svd,
    Mat, Tolerances,
};
use crate::random::{rng_from, subseed};
use crate::scalar::{Real, C};

/// Salt for the probe draws of minimal central projections.
const SALT_CENTRAL_PROBE: u64 = 0x6d63_7000;

#[derive(Clone)]
pub struct Algebra<T> {
    name: String,
    space_dim: usize,
    basis: Vec<Mat<T>>,
    contains_identity: bool,
}

impl<T> std::fmt::Debug for Algebra<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Algebra(\"{}\", dim {} on C^{})",
            self.name,
            self.basis.len(),
            self.space_dim
        )
    }
}

impl<T: Real> Algebra<T> {
    /// Generates the smallest unital *-closed, product-closed span containing
    /// the generators: seed with the identity, the generators, and their
    /// adjoints, then append pairwise products until the span is stable.
    pub fn close(name: &str, generators: &[Mat<T>], tol: &Tolerances<T>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput(format!(
                "closure of \"{name}\": no generators"
            )));
        }
        let d = generators[0].rows();
        for (i, g) in generators.iter().enumerate() {
            if !g.is_square() || g.rows() != d {
                return Err(Error::DimensionMismatch(format!(
                    "closure of \"{name}\": generator {i} is {}x{}, expected {d}x{d}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        let mut seeds = Vec::with_capacity(2 * generators.len() + 1);
        seeds.push(Mat::identity(d));
        for g in generators {
            seeds.push(g.clone());
            seeds.push(g.adjoint());
        }
        let drop_below = seed_drop_threshold(&seeds, tol);
        let mut basis = orthonormal_basis(&seeds, tol);
        // Worklist closure: each round multiplies the newly added elements
        // against everything seen so far, in both orders; a pair of old
        // elements was already handled in the round the younger one joined.
        let mut frontier_start = 0;
        while frontier_start < basis.len() && basis.len() < d * d {
            let frontier_end = basis.len();
            let mut block: Vec<Mat<T>> = Vec::with_capacity(64);
            'round: for f in frontier_start..frontier_end {
                for b in 0..frontier_end {
                    block.push(basis[f].mul(&basis[b]));
                    if b < frontier_start {
                        block.push(basis[b].mul(&basis[f]));
                    }
                    if block.len() >= 64 {
                        let drained = std::mem::take(&mut block);
                        extend_orthonormal_block(&mut basis, drained, drop_below);
                        if basis.len() >= d * d {
                            break 'round;
                        }
                    }
                }
            }
            if !block.is_empty() {
                extend_orthonormal_block(&mut basis, block, drop_below);
            }
            frontier_start = frontier_end;
        }
        basis.truncate(d * d);
        Ok(Self {
            name: name.to_string(),
            space_dim: d,
            basis,
            contains_identity: true,
        })
    }

    /// Wraps an already product-closed span (for example the permutation
    /// matrices of a group): orthonormalizes and verifies unitality and
    /// adjoint closure, but trusts the caller for product closure, which for
    /// group spans holds exactly.
    pub fn from_closed_span(name: &str, ops: &[Mat<T>], tol: &Tolerances<T>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidInput(format!("span of \"{name}\": empty")));
        }
        let d = ops[0].rows();
        let basis = orthonormal_basis(ops, tol);
        let alg = Self {
            name: name.to_string(),
            space_dim: d,
            basis,
            contains_identity: true,
        };
        let id_res = alg.contains(&Mat::identity(d));
        if id_res > tol.residual_for(T::from_f64c(d as f64).sqrt()) {
            return Err(Error::PropertyViolation {
                name: name.to_string(),
                property: "contains identity".into(),
                residual: id_res.to_f64c(),
            });
        }
        for (i, b) in alg.basis.iter().enumerate() {
            let res = span_residual(&alg.basis, &b.adjoint());
            if res > tol.residual_abs {
                return Err(Error::PropertyViolation {
                    name: format!("{name} basis element {i}"),
                    property: "adjoint closure".into(),
                    residual: res.to_f64c(),
                });
            }
        }
        Ok(alg)
    }

    /// The full operator algebra End(C^d), basis of matrix units.
    pub fn full(name: &str, d: usize) -> Self {
        let mut basis = Vec::with_capacity(d * d);
        for j in 0..d {
            for k in 0..d {
                basis.push(crate::builders::matrix_unit(d, j, k));
            }
        }
        Self {
            name: name.to_string(),
            space_dim: d,
            basis,
            contains_identity: true,
        }
    }

    /// The scalar multiples of the identity on C^d.
    pub fn scalars(name: &str, d: usize) -> Self {
        let norm = T::one() / T::from_f64c(d as f64).sqrt();
        Self {
            name: name.to_string(),
            space_dim: d,
            basis: vec![Mat::identity(d).scaled_re(norm)],
            contains_identity: true,
        }
    }

    pub(crate) fn from_orthonormal_basis(name: &str, space_dim: usize, basis: Vec<Mat<T>>) -> Self {
        Self {
            name: name.to_string(),
            space_dim,
            basis,
            contains_identity: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    /// Dimension of the algebra as a vector space.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mat<T>] {
        &self.basis
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.space_dim * self.space_dim
    }

    /// Residual distance of x from the algebra's span.
    pub fn contains(&self, x: &Mat<T>) -> T {
        span_residual(&self.basis, x)
    }

    /// HS-orthogonal projection of x onto the algebra's span.
    pub fn project(&self, x: &Mat<T>) -> Mat<T> {
        project_onto_span(&self.basis, x)
    }

    /// Span inclusion: worst residual of this algebra's basis in `other`.
    pub fn inclusion_residual(&self, other: &Self) -> T {
        self.basis
            .iter()
            .map(|b| other.contains(b))
            .fold(T::zero(), |a, r| a.max(r))
    }

    /// Same span, both directions.
    pub fn span_equals(&self, other: &Self, tol: &Tolerances<T>) -> bool {
        self.dim() == other.dim()
            && self.inclusion_residual(other) <= tol.residual_abs
            && other.inclusion_residual(self) <= tol.residual_abs
    }

    /// Commutant {X : [X, B] = 0 for all B in the algebra}.
    ///
    /// Two routes with identical output span: small spaces go through the
    /// Gram matrix of the stacked commutator maps (their joint kernel is the
    /// commutant); larger spaces build the commutant directly as the image of
    /// the completely positive map X -> Σ_i B_i X B_i† over the orthonormal
    /// basis, which lands in and spans the commutant for a unital *-closed
    /// span. The Gram route scales as d^6 through the eigensolver, the image
    /// route as dim(A)·d^4.
    pub fn commutant(&self, name: &str, tol: &Tolerances<T>) -> Self {
        let basis = if self.space_dim <= 8 {
            self.commutant_basis_gram(tol)
        } else {
            self.commutant_basis_image(tol)
        };
        Self {
            name: name.to_string(),
            space_dim: self.space_dim,
            basis,
            contains_identity: true,
        }
    }

    /// Joint kernel of the commutator maps X -> [X, B], via the accumulated
    /// Gram matrix on vectorized operators (row-major vec, so
    /// vec(AXB) = (A ⊗ Bᵀ) vec(X)).
    pub(crate) fn commutant_basis_gram(&self, tol: &Tolerances<T>) -> Vec<Mat<T>> {
        let d = self.space_dim;
        let id = Mat::identity(d);
        // A scalar algebra leaves the Gram matrix below assembly roundoff,
        // where the relative kernel cutoff has no scale to work with; its
        // commutant is the whole matrix space, answered directly here
        let scalars_only = self.basis.iter().all(|b| {
            let mean = b.trace() / T::from_f64c(d as f64);
            b.sub(&id.scaled(mean)).fro_norm() <= tol.residual_abs
        });
        if scalars_only {
            let mut units = Vec::with_capacity(d * d);
            for j in 0..d {
                for k in 0..d {
                    let mut u = Mat::zeros(d, d);
                    u.set(j, k, C::new(T::one(), T::zero()));
                    units.push(u);
                }
            }
            return units;
        }
        let mut gram = Mat::zeros(d * d, d * d);
        for b in &self.basis {
            let bh = b.adjoint();
            let term = bh
                .mul(b)
                .kron(&id)
                .sub(&bh.kron(&b.transpose()))
                .sub(&b.kron(&b.conj()))
                .add(&id.kron(&b.mul(&bh).transpose()));
            gram = gram.add(&term);
        }
        kernel_of_gram(&gram, tol)
            .into_iter()
            .map(|v| Mat::from_data(d, d, v))
            .collect()
    }

    /// Image of X -> Σ_i B_i X B_i† on matrix units. Candidate (j,k) equals
    /// V_j V_k† where V_j stacks the j-th columns of all basis elements.
    pub(crate) fn commutant_basis_image(&self, tol: &Tolerances<T>) -> Vec<Mat<T>> {
        let d = self.space_dim;
        let m = self.basis.len();
        let stacks: Vec<Mat<T>> = (0..d)
            .map(|j| Mat::from_fn(d, m, |r, i| self.basis[i].get(r, j)))
            .collect();
        let scale = stacks
            .iter()
            .map(|v| {
                let n = v.fro_norm();
                n * n
            })
            .fold(T::zero(), |a, b| a.max(b));
        let drop_below = tol.rank_rel * scale.max(T::min_positive_value());
        let mut basis: Vec<Mat<T>> = Vec::new();
        let mut block: Vec<Mat<T>> = Vec::with_capacity(64);
        for j in 0..d {
            for k in 0..d {
                block.push(stacks[j].mul(&stacks[k].adjoint()));
                if block.len() >= 64 {
                    let drained = std::mem::take(&mut block);
                    extend_orthonormal_block(&mut basis, drained, drop_below);
                }
            }
        }
        if !block.is_empty() {
            extend_orthonormal_block(&mut basis, block, drop_below);
        }
        basis
    }

    /// Center = A ∩ A′, using a precomputed commutant.
    pub fn center_with(&self, commutant: &Self, name: &str, tol: &Tolerances<T>) -> Self {
        intersect(self, commutant, name, tol).expect("same ambient space")
    }

    pub fn center(&self, name: &str, tol: &Tolerances<T>) -> Self {
        let comm = self.commutant("tmp", tol);
        self.center_with(&comm, name, tol)
    }

    /// Compression W† A W onto an invariant subspace given by an isometry.
    /// For invariant subspaces the compressed span is again a unital
    /// *-closed, product-closed span.
    pub fn restrict(&self, name: &str, iso: &Mat<T>, tol: &Tolerances<T>) -> Self {
        let wh = iso.adjoint();
        let compressed: Vec<Mat<T>> = self.basis.iter().map(|b| wh.mul(b).mul(iso)).collect();
        let basis = orthonormal_basis(&compressed, tol);
        Self {
            name: name.to_string(),
            space_dim: iso.cols(),
            basis,
            contains_identity: true,
        }
    }

    /// Minimal projections of the center: the block structure of the algebra.
    ///
    /// Draws a seeded random Hermitian center element, clusters its spectrum,
    /// and forms the spectral projectors; a generic draw separates every
    /// block (cluster count == center dimension, checked along with
    /// projector identities). Returns projectors ordered by ascending probe
    /// eigenvalue; callers needing a seed-independent order re-sort.
    pub fn minimal_central_projections(
        &self,
        seed: u64,
        tol: &Tolerances<T>,
    ) -> Result<Vec<Mat<T>>> {
        let comm = self.commutant("tmp", tol);
        self.minimal_central_projections_with(&comm, seed, tol)
    }

    pub fn minimal_central_projections_with(
        &self,
        commutant: &Self,
        seed: u64,
        tol: &Tolerances<T>,
    ) -> Result<Vec<Mat<T>>> {
        let d = self.space_dim;
        let center = self.center_with(commutant, "center", tol);
        if center.dim() == 1 {
            return Ok(vec![Mat::identity(d)]);
        }
        let herm = hermitian_spanning_set(center.basis(), tol);
        let blocks = center.dim();
        let mut attempts = 0;
        loop {
            attempts += 1;
            let mut rng = rng_from(subseed(seed, SALT_CENTRAL_PROBE + attempts as u64));
            let mut probe = Mat::zeros(d, d);
            for h in &herm {
                let coeff = T::std_normal(&mut rng);
                probe = probe.add(&h.scaled_re(coeff));
            }
            let (vals, vecs) = eig_sym(&probe.hermitize());
            let ranges = cluster_ranges(&vals, tol.eig_cluster_rel);
            if let Some(projs) = validate_spectral_projectors(&ranges, &vecs, blocks, &center, tol)
            {
                return Ok(projs);
            }
            if attempts >= 5 {
                return Err(Error::DegenerateDraw {
                    seed,
                    attempts,
                    context: format!(
                        "central probe of \"{}\" failed to separate {} blocks",
                        self.name, blocks
                    ),
                });
            }
        }
    }

    /// Worst commutation residual between the two algebras' bases
    /// (basis elements are HS-normalized, so this is an absolute number).
    pub fn commutation_residual(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for a in &self.basis {
            for b in &other.basis {
                worst = worst.max(a.commutator(b).fro_norm());
            }
        }
        worst
    }
}

fn seed_drop_threshold<T: Real>(seeds: &[Mat<T>], tol: &Tolerances<T>) -> T {
    let max_norm = seeds
        .iter()
        .map(|m| m.fro_norm())
        .fold(T::zero(), |a, b| a.max(b));
    tol.rank_rel * max_norm.max(T::min_positive_value())
}

/// Hermitian/anti-Hermitian splits of a basis, re-orthonormalized. Spans the
/// same complex space when the input span is adjoint-closed, but with
/// Hermitian elements, so real random combinations are Hermitian.
pub(crate) fn hermitian_spanning_set<T: Real>(basis: &[Mat<T>], tol: &Tolerances<T>) -> Vec<Mat<T>> {
    let mut parts = Vec::with_capacity(2 * basis.len());
    let mhalf_i = C::new(T::zero(), -T::from_f64c(0.5));
    for b in basis {
        parts.push(b.hermitize());
        parts.push(b.sub(&b.adjoint()).scaled(mhalf_i));
    }
    orthonormal_basis(&parts, tol)
}

fn validate_spectral_projectors<T: Real>(
    ranges: &[std::ops::Range<usize>],
    vecs: &Mat<T>,
    expected_blocks: usize,
    center: &Algebra<T>,
    tol: &Tolerances<T>,
) -> Option<Vec<Mat<T>>> {
    if ranges.len() != expected_blocks {
        return None;
    }
    let d = vecs.rows();
    let mut projs = Vec::with_capacity(ranges.len());
    let mut total = Mat::zeros(d, d);
    for range in ranges {
        let mut p = Mat::zeros(d, d);
        for k in range.clone() {
            let col = vecs.col(k);
            for i in 0..d {
                for j in 0..d {
                    let v = p.get(i, j);
                    p.set(i, j, v + col[i] * col[j].conj());
                }
            }
        }
        let scale = p.fro_norm();
        if p.mul(&p).dist(&p) > tol.residual_for(scale) {
            return None;
        }
        if center.contains(&p) > tol.residual_for(scale) {
            return None;
        }
        total = total.add(&p);
        projs.push(p);
    }
    if total.dist(&Mat::identity(d)) > tol.residual_for(T::from_f64c(d as f64).sqrt()) {
        return None;
    }
    Some(projs)
}

/// Intersection of two spans via principal angles: singular directions of
/// the cross-Gram with singular value 1 lie in both spans.
pub fn intersect<T: Real>(
    a: &Algebra<T>,
    b: &Algebra<T>,
    name: &str,
    tol: &Tolerances<T>,
) -> Result<Algebra<T>> {
    if a.space_dim != b.space_dim {
        return Err(Error::DimensionMismatch(format!(
            "intersect: spaces {} vs {}",
            a.space_dim, b.space_dim
        )));
    }
    let (small, large) = if a.dim() <= b.dim() { (a, b) } else { (b, a) };
    let cross = Mat::from_fn(small.dim(), large.dim(), |i, j| {
        hs_inner_unchecked(&small.basis[i], &large.basis[j])
    });
    let dec = svd(&cross);
    let keep = T::one() - T::from_f64c(100.0) * tol.rank_rel;
    let mut members = Vec::new();
    for (k, &s) in dec.s.iter().enumerate() {
        if s < keep {
            break;
        }
        let coeffs = dec.u.col(k);
        let mut m = Mat::zeros(small.space_dim, small.space_dim);
        for (i, &ci) in coeffs.iter().enumerate() {
            m = m.add(&small.basis[i].scaled(ci));
        }
        members.push(m);
    }
    let basis = orthonormal_basis(&members, tol);
    Ok(Algebra {
        name: name.to_string(),
        space_dim: a.space_dim,
        basis,
        contains_identity: true,
    })
}

/// Smallest algebra containing all inputs: closure of the concatenated bases.
pub fn join<T: Real>(
    name: &str,
    parts: &[&Algebra<T>],
    tol: &Tolerances<T>,
) -> Result<Algebra<T>> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("join of no algebras".into()));
    }
    let d = parts[0].space_dim;
    for p in parts {
        if p.space_dim != d {
            return Err(Error::DimensionMismatch(format!(
                "join: spaces {} vs {}",
                d, p.space_dim
            )));
        }
    }
    let gens: Vec<Mat<T>> = parts
        .iter()
        .flat_map(|p| p.basis.iter().cloned())
        .collect();
    Algebra::close(name, &gens, tol)
}

// ---------------------------------------------------------------------------
// Subsystem axioms
// ---------------------------------------------------------------------------

/// Result of checking a family of algebras as a candidate subsystem
/// decomposition of a (code) space: pairwise independence, factor property,
/// and completeness.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AxiomReport {
    pub algebra_names: Vec<String>,
    /// Code space dimension the check ran on.
    pub code_dim: usize,
    /// pairwise_commute[i][j] for i != j; diagonal entries true.
    pub pairwise_commute: Vec<Vec<bool>>,
    pub worst_commutation_residual: f64,
    pub each_is_factor: Vec<bool>,
    /// Dimension of each algebra restricted to the code space.
    pub restricted_dims: Vec<usize>,
    /// d_i with d_i² == restricted dim; meaningful where each_is_factor.
    pub factor_dims: Vec<usize>,
    pub join_dim: usize,
    pub expected_join_dim: usize,
    pub completeness: bool,
}

impl AxiomReport {
    pub fn passes(&self) -> bool {
        self.completeness
    }

    /// Name of the first failed axiom, for report text.
    pub fn first_failure(&self) -> Option<&'static str> {
        let commute_ok = self
            .pairwise_commute
            .iter()
            .all(|row| row.iter().all(|&b| b));
        if !commute_ok {
            return Some("subsystem independence");
        }
        if !self.each_is_factor.iter().all(|&b| b) {
            return Some("factor property");
        }
        if !self.completeness {
            return Some("completeness");
        }
        None
    }
}

/// Checks the subsystem axioms for a family of algebras, optionally
/// restricted to a code space given as an orthogonal projector that must
/// commute with every algebra element.
pub fn check_axioms<T: Real>(
    algebras: &[&Algebra<T>],
    code_space: Option<&Mat<T>>,
    tol: &Tolerances<T>,
) -> Result<AxiomReport> {
    if algebras.is_empty() {
        return Err(Error::InvalidInput("check_axioms: no algebras".into()));
    }
    let d = algebras[0].space_dim;
    for a in algebras {
        if a.space_dim != d {
            return Err(Error::DimensionMismatch(format!(
                "check_axioms: \"{}\" lives on dim {}, expected {}",
                a.name, a.space_dim, d
            )));
        }
    }

    let iso = match code_space {
        None => None,
        Some(p) => {
            let scale = p.fro_norm();
            if p.hermiticity_residual() > tol.residual_for(scale)
                || p.mul(p).dist(p) > tol.residual_for(scale)
            {
                return Err(Error::InvalidInput(
                    "code space is not an orthogonal projector".into(),
                ));
            }
            for a in algebras {
                let mut worst = T::zero();
                for b in a.basis() {
                    worst = worst.max(p.commutator(b).fro_norm());
                }
                if worst > tol.residual_for(scale) {
                    return Err(Error::CodeSpaceNotInvariant {
                        name: a.name.clone(),
                        residual: worst.to_f64c(),
                    });
                }
            }
            Some(cpqr_range(p, tol.rank_rel))
        }
    };

    let restricted: Vec<Algebra<T>> = match &iso {
        None => algebras.iter().map(|&a| a.clone()).collect(),
        Some(w) => algebras
            .iter()
            .map(|a| a.restrict(&a.name.clone(), w, tol))
            .collect(),
    };
    let code_dim = iso.as_ref().map(|w| w.cols()).unwrap_or(d);

    let n = restricted.len();
    let mut pairwise = vec![vec![true; n]; n];
    let mut worst_res = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let r = restricted[i].commutation_residual(&restricted[j]);
            let ok = r <= tol.residual_abs * T::from_f64c(10.0);
            pairwise[i][j] = ok;
            pairwise[j][i] = ok;
            worst_res = worst_res.max(r);
        }
    }

    let mut each_is_factor = Vec::with_capacity(n);
    let mut restricted_dims = Vec::with_capacity(n);
    let mut factor_dims = Vec::with_capacity(n);
    for a in &restricted {
        let m = a.dim();
        restricted_dims.push(m);
        let center_dim = a.center("c", tol).dim();
        let root = (m as f64).sqrt().round() as usize;
        let is_factor = center_dim == 1 && root * root == m;
        each_is_factor.push(is_factor);
        factor_dims.push(if is_factor { root } else { 0 });
    }

    let refs: Vec<&Algebra<T>> = restricted.iter().collect();
    let join_dim = join("join", &refs, tol)?.dim();
    let expected_join_dim = code_dim * code_dim;

    let commute_ok = pairwise.iter().all(|row| row.iter().all(|&b| b));
    let factors_ok = each_is_factor.iter().all(|&b| b);
    let dims_ok = factors_ok
        && factor_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .map(|prod| prod == code_dim)
            .unwrap_or(false);
    let completeness = commute_ok && factors_ok && join_dim == expected_join_dim && dims_ok;

    Ok(AxiomReport {
        algebra_names: algebras.iter().map(|a| a.name.clone()).collect(),
        code_dim,
        pairwise_commute: pairwise,
        worst_commutation_residual: worst_res.to_f64c(),
        each_is_factor,
        restricted_dims,
        factor_dims,
        join_dim,
        expected_join_dim,
        completeness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{pauli_string, qubit_swap};
    use crate::mat::hs_inner;
    use crate::scalar::cr;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn chi_algebra() -> Algebra<f64> {
        let gens = [
            pauli_string::<f64>("YZ").unwrap(),
            pauli_string::<f64>("ZZ").unwrap(),
        ];
        Algebra::close("chi", &gens, &tol()).unwrap()
    }

    fn lambda_algebra() -> Algebra<f64> {
        let gens = [
            pauli_string::<f64>("XY").unwrap(),
            pauli_string::<f64>("XX").unwrap(),
        ];
        Algebra::close("lambda", &gens, &tol()).unwrap()
    }

    fn collective_algebra(n: usize) -> Algebra<f64> {
        Algebra::close(
            "collective",
            &crate::builders::collective_spins::<f64>(n),
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn closure_of_two_paulis_gives_four_dim_algebra() {
        let a = chi_algebra();
        assert_eq!(a.dim(), 4);
        for label in ["II", "XI", "YZ", "ZZ"] {
            let p = pauli_string::<f64>(label).unwrap();
            assert!(
                a.contains(&p) < 1e-9,
                "expected {label} in span, residual {}",
                a.contains(&p)
            );
        }
        // And the partner family.
        let b = lambda_algebra();
        assert_eq!(b.dim(), 4);
        for label in ["II", "IZ", "XY", "XX"] {
            let p = pauli_string::<f64>(label).unwrap();
            assert!(b.contains(&p) < 1e-9);
        }
    }

    #[test]
    fn closure_trivial_cases() {
        let t = tol();
        let a = Algebra::close("scalars", &[Mat::<f64>::identity(3)], &t).unwrap();
        assert_eq!(a.dim(), 1);
        let b = Algebra::close(
            "one-qubit",
            &[
                crate::builders::pauli_x::<f64>(),
                crate::builders::pauli_z::<f64>(),
            ],
            &t,
        )
        .unwrap();
        assert_eq!(b.dim(), 4);
    }

    #[test]
    fn closure_basis_is_orthonormal_and_star_closed() {
        let a = collective_algebra(2);
        for (i, x) in a.basis().iter().enumerate() {
            for (j, y) in a.basis().iter().enumerate() {
                let g = hs_inner(x, y).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g.norm() - expect).abs() < 1e-9);
            }
            assert!(span_residual(a.basis(), &x.adjoint()) < 1e-9);
        }
        // product closure spot check
        let p = a.basis()[1].mul(&a.basis()[2]);
        assert!(a.contains(&p) < 1e-8);
    }

    #[test]
    fn commutant_of_full_and_scalars() {
        let t = tol();
        let full = Algebra::<f64>::full("all", 4);
        assert_eq!(full.commutant("c", &t).dim(), 1);
        let scal = Algebra::<f64>::scalars("s", 4);
        assert_eq!(scal.commutant("c", &t).dim(), 16);
    }

    #[test]
    fn commutant_of_collective_two_qubits_is_swap_span() {
        let t = tol();
        let a = collective_algebra(2);
        let c = a.commutant("perm", &t);
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&qubit_swap::<f64>(2, 0, 1)) < 1e-9);
        assert!(c.contains(&Mat::identity(4)) < 1e-9);
    }

    #[test]
    fn commutant_routes_agree() {
        let t = tol();
        for a in [chi_algebra(), lambda_algebra(), collective_algebra(2)] {
            let gram = a.commutant_basis_gram(&t);
            let image = a.commutant_basis_image(&t);
            assert_eq!(gram.len(), image.len(), "algebra {}", a.name());
            for g in &gram {
                assert!(span_residual(&image, g) < 1e-8);
            }
            for im in &image {
                assert!(span_residual(&gram, im) < 1e-8);
            }
        }
    }

    #[test]
    fn double_commutant_recovers_algebra() {
        let t = tol();
        for a in [chi_algebra(), lambda_algebra(), collective_algebra(2)] {
            let cc = a.commutant("c", &t).commutant("cc", &t);
            assert!(a.span_equals(&cc, &t), "algebra {}", a.name());
        }
    }

    #[test]
    fn center_cases() {
        let t = tol();
        assert_eq!(Algebra::<f64>::full("f", 3).center("z", &t).dim(), 1);
        // Abelian algebra is its own center.
        let diag = Algebra::close(
            "diag",
            &[crate::builders::pauli_z::<f64>()],
            &t,
        )
        .unwrap();
        let z = diag.center("z", &t);
        assert_eq!(z.dim(), diag.dim());
        assert!(z.span_equals(&diag, &t));
        // Collective spin on 2 qubits: center spanned by singlet/triplet
        // projectors, dim 2.
        let c = collective_algebra(2).center("z", &t);
        assert_eq!(c.dim(), 2);
        let swap = qubit_swap::<f64>(2, 0, 1);
        let id = Mat::<f64>::identity(4);
        let p_singlet = id.sub(&swap).scaled_re(0.5);
        assert!(c.contains(&p_singlet) < 1e-9);
    }

    #[test]
    fn join_cases() {
        let t = tol();
        let a = chi_algebra();
        let b = lambda_algebra();
        let j = join("j", &[&a, &b], &t).unwrap();
        assert_eq!(j.dim(), 16);
        // idempotence
        let jj = join("jj", &[&a, &a], &t).unwrap();
        assert!(jj.span_equals(&a, &t));
        // scalars join full
        let full = Algebra::<f64>::full("f", 4);
        let s = Algebra::<f64>::scalars("s", 4);
        let sf = join("sf", &[&s, &full], &t).unwrap();
        assert_eq!(sf.dim(), 16);
    }

    #[test]
    fn minimal_central_projections_cases() {
        let t = tol();
        // Full algebra: single projector, the identity.
        let ps = Algebra::<f64>::full("f", 4)
            .minimal_central_projections(7, &t)
            .unwrap();
        assert_eq!(ps.len(), 1);
        assert!(ps[0].dist(&Mat::identity(4)) < 1e-10);

        // Diagonal algebra on C²: the two basis projectors.
        let diag = Algebra::close("diag", &[crate::builders::pauli_z::<f64>()], &t).unwrap();
        let ps = diag.minimal_central_projections(7, &t).unwrap();
        assert_eq!(ps.len(), 2);
        for p in &ps {
            let rank = p.trace().re.round() as usize;
            assert_eq!(rank, 1);
        }

        // Collective spin on 2 qubits: ranks {1, 3}.
        let ps = collective_algebra(2)
            .minimal_central_projections(7, &t)
            .unwrap();
        assert_eq!(ps.len(), 2);
        let mut ranks: Vec<usize> = ps.iter().map(|p| p.trace().re.round() as usize).collect();
        ranks.sort();
        assert_eq!(ranks, vec![1, 3]);
        // orthogonality and completeness
        let sum = ps[0].add(&ps[1]);
        assert!(sum.dist(&Mat::identity(4)) < 1e-9);
        assert!(ps[0].mul(&ps[1]).fro_norm() < 1e-9);
    }

    #[test]
    fn intersect_finds_common_span() {
        let t = tol();
        let a = chi_algebra();
        let s = Algebra::<f64>::scalars("s", 4);
        let i = intersect(&a, &s, "i", &t).unwrap();
        assert_eq!(i.dim(), 1);
        let full = Algebra::<f64>::full("f", 4);
        let i2 = intersect(&a, &full, "i2", &t).unwrap();
        assert!(i2.span_equals(&a, &t));
    }

    #[test]
    fn axioms_pass_for_complementary_pair() {
        let t = tol();
        let a = chi_algebra();
        let b = lambda_algebra();
        let report = check_axioms(&[&a, &b], None, &t).unwrap();
        assert!(report.passes());
        assert_eq!(report.factor_dims, vec![2, 2]);
        assert_eq!(report.join_dim, 16);
        assert!(report.worst_commutation_residual < 1e-10);
    }

    #[test]
    fn axioms_pass_for_standard_qubit_pair() {
        let t = tol();
        let a = Algebra::close(
            "qubit-0",
            &[
                pauli_string::<f64>("XI").unwrap(),
                pauli_string::<f64>("ZI").unwrap(),
            ],
            &t,
        )
        .unwrap();
        let b = Algebra::close(
            "qubit-1",
            &[
                pauli_string::<f64>("IX").unwrap(),
                pauli_string::<f64>("IZ").unwrap(),
            ],
            &t,
        )
        .unwrap();
        let report = check_axioms(&[&a, &b], None, &t).unwrap();
        assert!(report.passes());
        assert_eq!(report.factor_dims, vec![2, 2]);
    }

    #[test]
    fn axioms_fail_for_duplicated_algebra() {
        let t = tol();
        let a = chi_algebra();
        let report = check_axioms(&[&a, &a], None, &t).unwrap();
        assert!(!report.passes());
        assert!(!report.pairwise_commute[0][1]);
        assert_eq!(report.first_failure(), Some("subsystem independence"));
    }

    #[test]
    fn axioms_with_code_space_restriction() {
        let t = tol();
        // Restrict the one-qubit algebra x scalars to a 2-dim code space
        // where the second qubit is |0>: P = 1 ⊗ |0><0|.
        let a = Algebra::close(
            "qubit-0",
            &[
                pauli_string::<f64>("XI").unwrap(),
                pauli_string::<f64>("ZI").unwrap(),
            ],
            &t,
        )
        .unwrap();
        let mut p = Mat::<f64>::zeros(4, 4);
        p.set(0, 0, cr(1.0));
        p.set(2, 2, cr(1.0));
        let report = check_axioms(&[&a], Some(&p), &t).unwrap();
        assert!(report.passes());
        assert_eq!(report.factor_dims, vec![2]);
        assert_eq!(report.code_dim, 2);
    }

    #[test]
    fn axioms_reject_non_invariant_code_space() {
        let t = tol();
        let a = chi_algebra();
        // Projector onto |00>: does not commute with sigma_x ⊗ 1.
        let mut p = Mat::<f64>::zeros(4, 4);
        p.set(0, 0, cr(1.0));
        let err = check_axioms(&[&a], Some(&p), &t).unwrap_err();
        assert!(matches!(err, Error::CodeSpaceNotInvariant { .. }));
    }

    #[test]
    fn from_closed_span_group_algebra() {
        let t = tol();
        let perms = crate::builders::symmetric_group_matrices::<f64>(3);
        let a = Algebra::from_closed_span("perm-3", &perms, &t).unwrap();
        // S3 on 3 qubits: irrep dims 1 (trivial), 2 (standard on ≤2-row
        // content), multiplicities 4 and 2: algebra dim = 1 + 4 = 5.
        assert_eq!(a.dim(), 5);
        // product closure holds for a group span
        let p = perms[1].mul(&perms[3]);
        assert!(a.contains(&p) < 1e-9);
    }

    #[test]
    fn antitone_commutants() {
        let t = tol();
        let small = Algebra::close("small", &[pauli_string::<f64>("ZZ").unwrap()], &t).unwrap();
        let big = chi_algebra();
        assert!(small.inclusion_residual(&big) < 1e-9);
        let cb = big.commutant("cb", &t);
        let cs = small.commutant("cs", &t);
        assert!(cb.inclusion_residual(&cs) < 1e-8);
    }

    #[test]
    fn commutant_of_scalars_is_everything() {
        // the commutator Gram matrix of a scalar algebra is all roundoff,
        // which once defeated the relative kernel cutoff
        let t = tol();
        for d in [3usize, 8] {
            let scalars = Algebra::close("scalars", &[Mat::<f64>::identity(d)], &t).unwrap();
            assert_eq!(scalars.dim(), 1);
            let c = scalars.commutant("c", &t);
            assert_eq!(c.dim(), d * d);

            let full = Algebra::<f64>::full("full", d);
            let acc = full.commutant("ac", &t).commutant("acc", &t);
            assert!(full.inclusion_residual(&acc) < 1e-9);
            assert!(acc.inclusion_residual(&full) < 1e-9);
        }
    }
}
