//! Block decomposition of *-algebras and the tensor product structures they
//! induce.
//!
//! A unital *-closed algebra on C^d splits the space into sectors, one per
//! minimal central projection, and on each sector acts as 1_n ⊗ M_d' in a
//! suitable basis. [`wedderburn`] computes those sectors together with
//! explicit isometries realizing the 1_n ⊗ M_d' form. On top of that sit
//! [`induced_tps`] (a commuting family of factors turned into an explicit
//! tensor factorization), [`chain_decompose`] (a nested chain of algebras
//! turned into a tree of encoded sectors), and the stabilizer helpers that
//! build syndrome coordinates for commuting ±1 observables.

use crate::algebra::{
    check_axioms, hermitian_spanning_set, intersect, Algebra, AxiomReport,
};
use crate::error::{Error, Result};
use crate::mat::{
    cluster_ranges, cpqr_range, eig_sym, kron_list, orthonormal_basis, partial_trace,
    polar_unitary, Mat, Tolerances,
};
use crate::random::{rng_from, subseed, random_hermitian};
use crate::scalar::{Real, C};

// Fixed probe seed for ordering blocks; deliberately not derived from the
// user seed so the reported block order is seed-independent.
const SALT_BLOCK_ORDER: u64 = 0xB10C_0DE5;
const SALT_COPY_SPLIT: u64 = 0x0C09_E550;
const SALT_COPY_LINK: u64 = 0x0011_4B17;
const SALT_TPS_SLOT: u64 = 0x7507_0000;
const SALT_CHAIN: u64 = 0xC4A1_0000;

/// One sector of a Wedderburn decomposition: the algebra acts on the range
/// of `projector` as identity ⊗ M_{irrep_dim} with `multiplicity` copies.
#[derive(Clone, Debug)]
pub struct IrrepBlock<T: Real> {
    pub multiplicity: usize,
    pub irrep_dim: usize,
    /// Minimal central projection cutting out this sector, in ambient
    /// coordinates.
    pub projector: Mat<T>,
    /// Ambient-space isometry onto the sector, columns ordered copy-major:
    /// column j·irrep_dim + a is basis vector a of copy j, so pullbacks of
    /// algebra elements take the form 1_multiplicity ⊗ m.
    pub isometry: Mat<T>,
}

impl<T: Real> IrrepBlock<T> {
    pub fn support_dim(&self) -> usize {
        self.multiplicity * self.irrep_dim
    }
}

/// Complete sector decomposition of one algebra.
#[derive(Clone, Debug)]
pub struct IrrepDecomposition<T: Real> {
    pub algebra_name: String,
    pub space_dim: usize,
    pub blocks: Vec<IrrepBlock<T>>,
}

impl<T: Real> IrrepDecomposition<T> {
    /// (multiplicity, irrep_dim) pairs in reported order.
    pub fn block_table(&self) -> Vec<(usize, usize)> {
        self.blocks
            .iter()
            .map(|b| (b.multiplicity, b.irrep_dim))
            .collect()
    }

    /// Σ d², the dimension of the algebra itself.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.irrep_dim * b.irrep_dim).sum()
    }

    /// Σ n², the dimension of the commutant.
    pub fn commutant_dim(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| b.multiplicity * b.multiplicity)
            .sum()
    }

    /// Σ n·d, the dimension of the supporting subspace.
    pub fn support_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.support_dim()).sum()
    }
}

/// Wedderburn decomposition of a unital *-algebra: minimal central sectors
/// with explicit copy-major isometries.
///
/// Blocks are ordered by ascending irrep dimension, ties by descending
/// multiplicity, remaining ties by the trace of the projector against a
/// fixed random probe (seed-independent, so two runs agree on the order).
pub fn wedderburn<T: Real>(
    a: &Algebra<T>,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<IrrepDecomposition<T>> {
    let d = a.space_dim();
    let comm = a.commutant("tmp-commutant", tol);
    let projs = a.minimal_central_projections_with(&comm, seed, tol)?;

    let mut blocks = Vec::with_capacity(projs.len());
    for (bi, p) in projs.iter().enumerate() {
        let rank_f = p.trace().re.to_f64c();
        let rank = rank_f.round() as usize;
        if rank == 0 || (rank_f - rank as f64).abs() > 1e-6 {
            return Err(Error::PropertyViolation {
                name: format!("{}#{}", a.name(), bi),
                property: "central projector has integer rank".into(),
                residual: (rank_f - rank_f.round()).abs(),
            });
        }
        let w = cpqr_range(p, tol.rank_rel);
        if w.cols() != rank {
            return Err(Error::PropertyViolation {
                name: format!("{}#{}", a.name(), bi),
                property: "projector range extraction matches its trace".into(),
                residual: (w.cols() as f64 - rank as f64).abs(),
            });
        }
        let restricted = a.restrict("sector", &w, tol);
        let m = restricted.dim();
        let irrep_dim = (m as f64).sqrt().round() as usize;
        if irrep_dim * irrep_dim != m {
            return Err(Error::NotFactorBlock {
                name: format!("{}#{}", a.name(), bi),
                dim: m,
            });
        }
        if rank % irrep_dim != 0 {
            return Err(Error::PropertyViolation {
                name: format!("{}#{}", a.name(), bi),
                property: "sector dimension is a multiple of the irrep dimension".into(),
                residual: (rank % irrep_dim) as f64,
            });
        }
        let multiplicity = rank / irrep_dim;
        let iso = block_isometry(
            &restricted,
            &w,
            multiplicity,
            irrep_dim,
            subseed(seed, SALT_COPY_SPLIT ^ (bi as u64)),
            tol,
        )?;
        blocks.push(IrrepBlock {
            multiplicity,
            irrep_dim,
            projector: p.clone(),
            isometry: iso,
        });
    }

    let mut probe_rng = rng_from(SALT_BLOCK_ORDER);
    let probe = random_hermitian::<T, _>(d, &mut probe_rng);
    let mut keyed: Vec<(usize, usize, f64, IrrepBlock<T>)> = blocks
        .into_iter()
        .map(|b| {
            let t = b.projector.mul(&probe).trace().re.to_f64c();
            (b.irrep_dim, usize::MAX - b.multiplicity, t, b)
        })
        .collect();
    keyed.sort_by(|x, y| {
        (x.0, x.1)
            .cmp(&(y.0, y.1))
            .then(x.2.partial_cmp(&y.2).expect("finite probe traces"))
    });
    let blocks: Vec<IrrepBlock<T>> = keyed.into_iter().map(|k| k.3).collect();

    let dec = IrrepDecomposition {
        algebra_name: a.name().to_string(),
        space_dim: d,
        blocks,
    };
    if dec.support_dim() != d {
        return Err(Error::PropertyViolation {
            name: a.name().to_string(),
            property: "sector dimensions sum to the space dimension".into(),
            residual: (dec.support_dim() as f64 - d as f64).abs(),
        });
    }
    if dec.algebra_dim() != a.dim() {
        return Err(Error::PropertyViolation {
            name: a.name().to_string(),
            property: "Σ d_J² equals the algebra dimension".into(),
            residual: (dec.algebra_dim() as f64 - a.dim() as f64).abs(),
        });
    }
    Ok(dec)
}

/// Rotates a sector basis so the restricted algebra reads 1_n ⊗ M_d.
///
/// The sector commutant is X ⊗ 1 in the target coordinates; eigenvector
/// clusters of a generic Hermitian element of it give one d-dimensional
/// column block per copy, each equal to u_j ⊗ G_j for unknown unitaries G_j.
/// A second generic commutant element links copy j to copy 1; the polar
/// factor of that link is G_j†G_1 up to a phase, and applying it makes every
/// copy carry the same irrep basis (the per-copy phases cancel in Y_j† a Y_k).
fn block_isometry<T: Real>(
    restricted: &Algebra<T>,
    w: &Mat<T>,
    n: usize,
    d_irr: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<Mat<T>> {
    if n == 1 || d_irr == 1 {
        // Scalar copies or a single copy: any orthonormal sector basis is
        // already copy-major.
        return Ok(w.clone());
    }
    let r = n * d_irr;
    let comm = restricted.commutant("sector-commutant", tol);
    if comm.dim() != n * n {
        return Err(Error::PropertyViolation {
            name: restricted.name().to_string(),
            property: "sector commutant dimension n²".into(),
            residual: (comm.dim() as f64 - (n * n) as f64).abs(),
        });
    }
    let herm = hermitian_spanning_set(comm.basis(), tol);

    for attempt in 1..=5u64 {
        let mut rng = rng_from(subseed(seed, SALT_COPY_SPLIT + attempt));
        let mut probe = Mat::zeros(r, r);
        for h in &herm {
            probe = probe.add(&h.scaled_re(T::std_normal(&mut rng)));
        }
        let (vals, vecs) = eig_sym(&probe.hermitize());
        let ranges = cluster_ranges(&vals, tol.eig_cluster_rel);
        if ranges.len() != n || ranges.iter().any(|rg| rg.len() != d_irr) {
            continue;
        }
        let copies: Vec<Mat<T>> = ranges
            .iter()
            .map(|rg| {
                Mat::from_fn(r, d_irr, |i, j| vecs.get(i, rg.start + j))
            })
            .collect();

        let mut link_rng = rng_from(subseed(seed, SALT_COPY_LINK + attempt));
        let mut link = Mat::zeros(r, r);
        for b in comm.basis() {
            let g = C::new(T::std_normal(&mut link_rng), T::std_normal(&mut link_rng));
            link = link.add(&b.scaled(g));
        }

        let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(r);
        for j in 0..d_irr {
            cols.push(copies[0].col(j));
        }
        let mut ok = true;
        for copy in copies.iter().skip(1) {
            let t = copy.adjoint().mul(&link).mul(&copies[0]);
            match polar_unitary(&t) {
                Ok(u) => {
                    let y = copy.mul(&u);
                    for j in 0..d_irr {
                        cols.push(y.col(j));
                    }
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let sector = Mat::from_cols(r, &cols);
        return Ok(w.mul(&sector));
    }
    Err(Error::DegenerateDraw {
        seed,
        attempts: 5,
        context: format!(
            "copy separation of sector \"{}\" ({}×{} copies)",
            restricted.name(),
            n,
            d_irr
        ),
    })
}

/// Number of spin-j irreducible blocks in the collective decomposition of
/// `n` spin-1/2 sites, with j passed as 2j to stay integral. Exact integer
/// arithmetic.
pub fn multiplicity_formula(n: u32, twice_j: u32) -> Result<u128> {
    if n == 0 || n > 64 {
        return Err(Error::InvalidInput(format!(
            "site count {n} outside the supported range 1..=64"
        )));
    }
    if twice_j > n || (n - twice_j) % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "no spin {}/2 block on {} sites",
            twice_j, n
        )));
    }
    let b = ((n - twice_j) / 2) as u128;
    let a = ((n + twice_j) / 2 + 1) as u128;
    let choose = |n: u128, k: u128| -> u128 {
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) / (i + 1);
        }
        c
    };
    let numer = (twice_j as u128 + 1) * choose(n as u128, b);
    assert_eq!(numer % a, 0, "closed form must divide exactly");
    let m = numer / a;
    // Independent route: difference of adjacent binomials.
    let alt = if b == 0 {
        1
    } else {
        choose(n as u128, b) - choose(n as u128, b - 1)
    };
    assert_eq!(m, alt, "hook-length and lattice-path counts must agree");
    Ok(m)
}

/// Explicit tensor factorization induced by a commuting family of factor
/// algebras on a code space.
#[derive(Clone, Debug)]
pub struct TpsFactorization<T: Real> {
    /// One entry per algebra, in input order.
    pub factor_dims: Vec<usize>,
    pub factor_names: Vec<String>,
    /// Ambient space dimension.
    pub space_dim: usize,
    /// Product of the factor dims; equals the code dimension.
    pub code_dim: usize,
    /// space_dim × code_dim isometry; columns are the code basis in which
    /// algebra i acts on tensor slot i.
    pub isometry: Mat<T>,
    pub axiom_report: AxiomReport,
}

impl<T: Real> TpsFactorization<T> {
    /// Compression of an ambient operator into code coordinates.
    pub fn pullback(&self, op: &Mat<T>) -> Mat<T> {
        self.isometry.adjoint().mul(op).mul(&self.isometry)
    }

    /// Local factor of a code-coordinate operator on one slot, with the
    /// distance from exact slot-locality.
    pub fn slot_factor(&self, code_op: &Mat<T>, slot: usize) -> (Mat<T>, T) {
        extract_slot(code_op, &self.factor_dims, slot)
    }
}

/// Local slot content of an operator on ⊗_k C^{dims[k]}: the partial trace
/// over the other slots, normalized, together with the residual distance
/// from `1 ⊗ local ⊗ 1`.
pub fn extract_slot<T: Real>(x: &Mat<T>, dims: &[usize], slot: usize) -> (Mat<T>, T) {
    assert!(slot < dims.len());
    let others: T = T::from_f64c(
        dims.iter()
            .enumerate()
            .filter(|&(k, _)| k != slot)
            .map(|(_, &d)| d as f64)
            .product(),
    );
    let local = partial_trace(x, dims, &[slot]).scaled_re(T::one() / others);
    let pre: usize = dims[..slot].iter().product();
    let post: usize = dims[slot + 1..].iter().product();
    let embedded = kron_list(&[Mat::identity(pre), local.clone(), Mat::identity(post)]);
    let residual = x.dist(&embedded);
    (local, residual)
}

/// Splits X ≈ 1_left ⊗ x, returning x and the residual.
fn split_left_identity<T: Real>(x: &Mat<T>, left: usize, right: usize) -> (Mat<T>, T) {
    extract_slot(x, &[left, right], 1)
}

/// Builds the explicit tensor factorization induced by a family of pairwise
/// commuting factor algebras, optionally restricted to a code space.
///
/// Checks the subsystem axioms first and fails with the report attached if
/// they do not hold. On success the returned isometry V satisfies
/// V† a V ≈ 1 ⊗ … ⊗ m ⊗ … ⊗ 1 for every a in algebra i, with m on slot i.
pub fn induced_tps<T: Real>(
    algebras: &[&Algebra<T>],
    code_space: Option<&Mat<T>>,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<TpsFactorization<T>> {
    let report = check_axioms(algebras, code_space, tol)?;
    if !report.passes() {
        return Err(Error::AxiomsNotSatisfied {
            which: report.first_failure().unwrap_or("completeness").to_string(),
            report: Box::new(report),
        });
    }

    let d = algebras[0].space_dim();
    let code_iso = match code_space {
        None => Mat::identity(d),
        Some(p) => cpqr_range(p, tol.rank_rel),
    };
    let code_dim = code_iso.cols();

    let mut v = code_iso.clone();
    let mut pending: Vec<Algebra<T>> = algebras
        .iter()
        .map(|a| a.restrict(a.name(), &code_iso, tol))
        .collect();

    let mut factor_dims = Vec::with_capacity(algebras.len());
    let mut done_prod = 1usize;
    let mut cur_dim = code_dim;

    for slot in 0..algebras.len() {
        let a_cur = pending.remove(0);
        let dec = wedderburn(&a_cur, subseed(seed, SALT_TPS_SLOT + slot as u64), tol)?;
        if dec.blocks.len() != 1 {
            return Err(Error::PropertyViolation {
                name: a_cur.name().to_string(),
                property: "factor algebra has a single sector".into(),
                residual: dec.blocks.len() as f64,
            });
        }
        let blk = &dec.blocks[0];
        let (nj, dj) = (blk.multiplicity, blk.irrep_dim);

        // The block isometry is copy-major (1_n ⊗ m); the slot wants its own
        // factor on the left, so permute columns to irrep-major (m ⊗ 1_n).
        let wt = Mat::from_fn(cur_dim, cur_dim, |row, col| {
            let a_idx = col / nj;
            let j_idx = col % nj;
            blk.isometry.get(row, j_idx * dj + a_idx)
        });

        v = v.mul(&Mat::identity(done_prod).kron(&wt));

        let wth = wt.adjoint();
        for a in pending.iter_mut() {
            let mut xs = Vec::with_capacity(a.dim());
            for b in a.basis() {
                let bt = wth.mul(b).mul(&wt);
                let (x, resid) = split_left_identity(&bt, dj, nj);
                if resid > tol.residual_for(bt.fro_norm()) {
                    return Err(Error::PropertyViolation {
                        name: a.name().to_string(),
                        property: format!("acts trivially on factor slot {slot}"),
                        residual: resid.to_f64c(),
                    });
                }
                xs.push(x);
            }
            let name = a.name().to_string();
            *a = Algebra::from_orthonormal_basis(&name, nj, orthonormal_basis(&xs, tol));
        }

        factor_dims.push(dj);
        done_prod *= dj;
        cur_dim = nj;
    }

    if cur_dim != 1 {
        return Err(Error::PropertyViolation {
            name: "induced factorization".into(),
            property: "factor dimensions exhaust the code space".into(),
            residual: cur_dim as f64,
        });
    }

    Ok(TpsFactorization {
        factor_dims,
        factor_names: algebras.iter().map(|a| a.name().to_string()).collect(),
        space_dim: d,
        code_dim,
        isometry: v,
        axiom_report: report,
    })
}

fn validate_chain<T: Real>(chain: &[&Algebra<T>], tol: &Tolerances<T>) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::InvalidInput("empty algebra chain".into()));
    }
    let d = chain[0].space_dim();
    for a in chain {
        if a.space_dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "chain member \"{}\" lives on dim {}, expected {}",
                a.name(),
                a.space_dim(),
                d
            )));
        }
    }
    if chain.len() >= 2 && !chain[0].is_full() {
        return Err(Error::InvalidInput(format!(
            "chain must start at the full operator algebra; \"{}\" has dimension {} < {}",
            chain[0].name(),
            chain[0].dim(),
            d * d
        )));
    }
    for i in 1..chain.len() {
        let resid = chain[i].inclusion_residual(chain[i - 1]);
        if resid > tol.residual_abs {
            return Err(Error::ChainInclusion {
                level: i,
                name: chain[i].name().to_string(),
                residual: resid.to_f64c(),
            });
        }
        // A repeated full algebra is a legal no-op level; anything else must
        // strictly shrink.
        if chain[i].dim() >= chain[i - 1].dim() && !chain[i].is_full() {
            return Err(Error::ChainNotStrict {
                level: i,
                outer: chain[i - 1].dim(),
                inner: chain[i].dim(),
            });
        }
    }
    Ok(())
}

/// Relative subsystem algebras of a strictly decreasing chain B_0 ⊋ B_1 ⊋ …:
/// entry i-1 is A_i = B_i′ ∩ B_{i-1}, the part of the previous level that
/// the current level cannot see.
pub fn chain_subsystems<T: Real>(
    chain: &[&Algebra<T>],
    tol: &Tolerances<T>,
) -> Result<Vec<Algebra<T>>> {
    validate_chain(chain, tol)?;
    let mut out = Vec::with_capacity(chain.len().saturating_sub(1));
    for i in 1..chain.len() {
        let comm = chain[i].commutant("tmp-commutant", tol);
        let rel = intersect(
            &comm,
            chain[i - 1],
            &format!("rel[{}]", chain[i].name()),
            tol,
        )?;
        out.push(rel);
    }
    Ok(out)
}

/// One terminal sector of a chain decomposition. The isometry columns carry
/// coordinates ⊗_k C^{multiplicities[k]} ⊗ C^{terminal_dim}: multiplicity
/// slot k is acted on by the level-k relative subsystem, the terminal slot
/// by the innermost algebra.
#[derive(Clone, Debug)]
pub struct ChainSector<T: Real> {
    /// Block index chosen at each level, outermost first.
    pub labels: Vec<usize>,
    pub multiplicities: Vec<usize>,
    pub terminal_dim: usize,
    pub isometry: Mat<T>,
}

impl<T: Real> ChainSector<T> {
    pub fn sector_dim(&self) -> usize {
        self.multiplicities.iter().product::<usize>() * self.terminal_dim
    }

    /// Tensor slot dimensions: multiplicities then the terminal factor.
    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = self.multiplicities.clone();
        dims.push(self.terminal_dim);
        dims
    }

    /// True when some multiplicity exceeds 1, i.e. the sector carries an
    /// encoded tensor factor beyond the terminal one.
    pub fn nontrivial(&self) -> bool {
        self.multiplicities.iter().any(|&n| n > 1)
    }

    /// Compression of an ambient operator into sector coordinates.
    pub fn pullback(&self, op: &Mat<T>) -> Mat<T> {
        self.isometry.adjoint().mul(op).mul(&self.isometry)
    }

    /// Local factor of an ambient operator on one sector slot, with the
    /// slot-locality residual of its pullback.
    pub fn slot_factor(&self, op: &Mat<T>, slot: usize) -> (Mat<T>, T) {
        extract_slot(&self.pullback(op), &self.factor_dims(), slot)
    }
}

/// Full sector tree of a chain.
#[derive(Clone, Debug)]
pub struct ChainDecomposition<T: Real> {
    pub level_names: Vec<String>,
    pub space_dim: usize,
    pub sectors: Vec<ChainSector<T>>,
}

impl<T: Real> ChainDecomposition<T> {
    /// Sum of sector dimensions; equals the space dimension.
    pub fn total_dim(&self) -> usize {
        self.sectors.iter().map(|s| s.sector_dim()).sum()
    }
}

/// Decomposes a strictly decreasing chain of unital *-algebras into terminal
/// sectors, iterating the Wedderburn decomposition of each level inside the
/// irrep factor of the previous one.
///
/// `chain[0]` is the ambient (full) algebra; a single-element chain is
/// decomposed directly. Sector labels record the block index chosen at each
/// level, so sectors are ordered lexicographically by label.
pub fn chain_decompose<T: Real>(
    chain: &[&Algebra<T>],
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<ChainDecomposition<T>> {
    if chain.is_empty() {
        return Err(Error::InvalidInput("empty algebra chain".into()));
    }
    let d = chain[0].space_dim();
    let levels: Vec<&Algebra<T>> = if chain.len() == 1 {
        vec![chain[0]]
    } else {
        validate_chain(chain, tol)?;
        chain[1..].to_vec()
    };

    struct Work<T: Real> {
        iso: Mat<T>,
        labels: Vec<usize>,
        mults: Vec<usize>,
        mult_prod: usize,
    }
    let mut work = vec![Work {
        iso: Mat::identity(d),
        labels: Vec::new(),
        mults: Vec::new(),
        mult_prod: 1,
    }];

    for (li, lev) in levels.iter().enumerate() {
        let mut next = Vec::new();
        for (si, w) in work.iter().enumerate() {
            let cur_irrep = w.iso.cols() / w.mult_prod;
            let wh = w.iso.adjoint();
            let mut xs = Vec::with_capacity(lev.dim());
            for b in lev.basis() {
                let full = wh.mul(b).mul(&w.iso);
                let (x, resid) = split_left_identity(&full, w.mult_prod, cur_irrep);
                if resid > tol.residual_for(full.fro_norm()) {
                    return Err(Error::PropertyViolation {
                        name: lev.name().to_string(),
                        property: format!(
                            "acts on the irrep factor of sector {:?}",
                            w.labels
                        ),
                        residual: resid.to_f64c(),
                    });
                }
                xs.push(x);
            }
            // The map b ↦ x is a unital *-homomorphism, so the image span is
            // closed without re-closing.
            let img = Algebra::from_orthonormal_basis(
                lev.name(),
                cur_irrep,
                orthonormal_basis(&xs, tol),
            );
            let dec = wedderburn(
                &img,
                subseed(seed, SALT_CHAIN + ((li as u64) << 16) + si as u64),
                tol,
            )?;
            for (bi, blk) in dec.blocks.iter().enumerate() {
                let expand = Mat::identity(w.mult_prod).kron(&blk.isometry);
                let mut labels = w.labels.clone();
                labels.push(bi);
                let mut mults = w.mults.clone();
                mults.push(blk.multiplicity);
                next.push(Work {
                    iso: w.iso.mul(&expand),
                    labels,
                    mults,
                    mult_prod: w.mult_prod * blk.multiplicity,
                });
            }
        }
        work = next;
    }

    let sectors: Vec<ChainSector<T>> = work
        .into_iter()
        .map(|w| {
            let terminal_dim = w.iso.cols() / w.mult_prod;
            ChainSector {
                labels: w.labels,
                multiplicities: w.mults,
                terminal_dim,
                isometry: w.iso,
            }
        })
        .collect();

    let dec = ChainDecomposition {
        level_names: levels.iter().map(|a| a.name().to_string()).collect(),
        space_dim: d,
        sectors,
    };
    if dec.total_dim() != d {
        return Err(Error::PropertyViolation {
            name: "chain decomposition".into(),
            property: "sector dimensions sum to the space dimension".into(),
            residual: (dec.total_dim() as f64 - d as f64).abs(),
        });
    }
    Ok(dec)
}

/// Per-sector reconstruction dimensions: inside each terminal sector, the
/// span generated by the relative subsystems below level i together with the
/// innermost algebra must match the compression of B_i itself. Returns, per
/// sector, a (expected, reconstructed) dimension pair per chain level.
pub fn chain_reconstruction_dims<T: Real>(
    chain: &[&Algebra<T>],
    subsystems: &[Algebra<T>],
    decomposition: &ChainDecomposition<T>,
    tol: &Tolerances<T>,
) -> Result<Vec<Vec<(usize, usize)>>> {
    if chain.len() < 2 {
        return Ok(decomposition.sectors.iter().map(|_| Vec::new()).collect());
    }
    let innermost = chain[chain.len() - 1];
    let mut out = Vec::with_capacity(decomposition.sectors.len());
    for sector in &decomposition.sectors {
        let wh = sector.isometry.adjoint();
        let compress = |a: &Algebra<T>| -> Vec<Mat<T>> {
            a.basis()
                .iter()
                .map(|b| wh.mul(b).mul(&sector.isometry))
                .collect()
        };
        let mut rows = Vec::with_capacity(chain.len() - 1);
        for i in 1..chain.len() {
            let expected = orthonormal_basis(&compress(chain[i]), tol).len();
            let mut gens = compress(innermost);
            for a in &subsystems[i..] {
                gens.extend(compress(a));
            }
            let joined = Algebra::close("sector-join", &gens, tol)?;
            rows.push((expected, joined.dim()));
        }
        out.push(rows);
    }
    Ok(out)
}

fn validate_stabilizers<T: Real>(stabs: &[Mat<T>], tol: &Tolerances<T>) -> Result<usize> {
    if stabs.is_empty() {
        return Err(Error::InvalidInput("no stabilizer operators given".into()));
    }
    let d = stabs[0].rows();
    for (i, x) in stabs.iter().enumerate() {
        let name = format!("X{}", i + 1);
        if !x.is_square() || x.rows() != d {
            return Err(Error::DimensionMismatch(format!(
                "stabilizer {name}: {}x{}, expected {d}x{d}",
                x.rows(),
                x.cols()
            )));
        }
        let scale = x.fro_norm();
        let h = x.hermiticity_residual();
        if h > tol.residual_for(scale) {
            return Err(Error::NotHermitian {
                name,
                residual: h.to_f64c(),
            });
        }
        let u = x.unitarity_residual();
        if u > tol.residual_for(scale) {
            return Err(Error::NotUnitary {
                name,
                residual: u.to_f64c(),
            });
        }
        let t = x.trace().norm();
        if t > tol.residual_for(scale) {
            return Err(Error::PropertyViolation {
                name,
                property: "traceless".into(),
                residual: t.to_f64c(),
            });
        }
        for (j, y) in stabs.iter().enumerate().take(i) {
            let c = x.commutator(y).fro_norm();
            if c > tol.residual_for(scale) {
                return Err(Error::PropertyViolation {
                    name: format!("X{}", i + 1),
                    property: format!("commutes with X{}", j + 1),
                    residual: c.to_f64c(),
                });
            }
        }
    }
    Ok(d)
}

/// Commutant chain of a set of commuting, traceless, self-inverse
/// observables: B_0 is the full algebra and B_i everything commuting with
/// the first i observables. Feed the result to [`chain_decompose`].
pub fn stabilizer_chain<T: Real>(
    stabs: &[Mat<T>],
    tol: &Tolerances<T>,
) -> Result<Vec<Algebra<T>>> {
    let d = validate_stabilizers(stabs, tol)?;
    let mut chain = vec![Algebra::full("full", d)];
    for i in 1..=stabs.len() {
        let gen = Algebra::close(&format!("stab[..{i}]"), &stabs[..i], tol)?;
        chain.push(gen.commutant(&format!("B{i}"), tol));
    }
    Ok(chain)
}

/// Syndrome coordinates for a commuting self-inverse set: the full space as
/// ⊗_i C² ⊗ C^{d/2^k}, one qubit slot per observable carrying its ±1 label.
#[derive(Clone, Debug)]
pub struct SyndromeTps<T: Real> {
    /// k twos followed by the cell dimension.
    pub dims: Vec<usize>,
    /// Full-space unitary; cells are column blocks in label order.
    pub isometry: Mat<T>,
    /// ±1 label pattern per cell, +1 before −1 at every level.
    pub labels: Vec<Vec<i8>>,
    /// Joint eigenprojectors, same order as labels.
    pub projectors: Vec<Mat<T>>,
}

impl<T: Real> SyndromeTps<T> {
    /// Distance of observable i's pullback from diag(1,−1) on its own slot.
    pub fn slot_diagonal_residual(&self, stab: &Mat<T>, i: usize) -> T {
        let pulled = self.isometry.adjoint().mul(stab).mul(&self.isometry);
        let pre: usize = self.dims[..i].iter().product();
        let post: usize = self.dims[i + 1..].iter().product();
        let mut zdiag = Mat::zeros(2, 2);
        zdiag.set(0, 0, C::new(T::one(), T::zero()));
        zdiag.set(1, 1, C::new(-T::one(), T::zero()));
        let expected = kron_list(&[Mat::identity(pre), zdiag, Mat::identity(post)]);
        pulled.dist(&expected)
    }
}

/// Builds syndrome coordinates from commuting, traceless, self-inverse
/// observables by refining joint eigenspaces. The observables must be
/// independent: every syndrome cell must come out with the same dimension
/// d/2^k, otherwise the set is rejected.
pub fn syndrome_tps<T: Real>(stabs: &[Mat<T>], tol: &Tolerances<T>) -> Result<SyndromeTps<T>> {
    let d = validate_stabilizers(stabs, tol)?;
    let k = stabs.len();
    if d % (1 << k) != 0 {
        return Err(Error::InvalidInput(format!(
            "space dim {d} does not split into 2^{k} equal cells"
        )));
    }
    let cell_dim = d >> k;

    let half = T::from_f64c(0.5);
    let mut cells: Vec<(Mat<T>, Vec<i8>)> = vec![(Mat::identity(d), Vec::new())];
    for x in stabs {
        let plus = Mat::identity(d).add(x).scaled_re(half);
        let minus = Mat::identity(d).sub(x).scaled_re(half);
        let mut refined = Vec::with_capacity(cells.len() * 2);
        for (q, lab) in &cells {
            for (p, sign) in [(&plus, 1i8), (&minus, -1i8)] {
                let mut lab2 = lab.clone();
                lab2.push(sign);
                refined.push((q.mul(p), lab2));
            }
        }
        cells = refined;
    }

    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(d);
    let mut labels = Vec::with_capacity(cells.len());
    let mut projectors = Vec::with_capacity(cells.len());
    for (q, lab) in cells {
        let rank = q.trace().re.to_f64c().round() as usize;
        if rank != cell_dim {
            return Err(Error::InvalidInput(format!(
                "observables are not independent: syndrome cell {:?} has dimension {} instead of {}",
                lab, rank, cell_dim
            )));
        }
        let w = cpqr_range(&q, tol.rank_rel);
        if w.cols() != cell_dim {
            return Err(Error::PropertyViolation {
                name: format!("cell {lab:?}"),
                property: "projector range extraction matches its trace".into(),
                residual: (w.cols() as f64 - cell_dim as f64).abs(),
            });
        }
        for j in 0..cell_dim {
            cols.push(w.col(j));
        }
        labels.push(lab);
        projectors.push(q);
    }

    let mut dims = vec![2usize; k];
    dims.push(cell_dim);
    Ok(SyndromeTps {
        dims,
        isometry: Mat::from_cols(d, &cols),
        labels,
        projectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{
        collective_spins, parted_symmetric_group_matrices, pauli_string,
        symmetric_group_matrices,
    };

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn collective_algebra(n: usize) -> Algebra<f64> {
        Algebra::close("collective", &collective_spins::<f64>(n), &tol()).unwrap()
    }

    fn permutation_algebra(n: usize) -> Algebra<f64> {
        Algebra::from_closed_span("perms", &symmetric_group_matrices::<f64>(n), &tol()).unwrap()
    }

    fn pullback_block_residual(a: &Algebra<f64>, blk: &IrrepBlock<f64>) -> f64 {
        // worst distance of W† b W from 1_n ⊗ m over the basis
        let wh = blk.isometry.adjoint();
        let mut worst: f64 = 0.0;
        for b in a.basis() {
            let x = wh.mul(b).mul(&blk.isometry);
            let (_, r) = split_left_identity(&x, blk.multiplicity, blk.irrep_dim);
            worst = worst.max(r);
        }
        worst
    }

    #[test]
    fn wedderburn_of_full_algebra_is_one_block() {
        let a = Algebra::full("full", 5);
        let dec = wedderburn(&a, 7, &tol()).unwrap();
        assert_eq!(dec.block_table(), vec![(1, 5)]);
        assert_eq!(dec.algebra_dim(), 25);
        assert_eq!(dec.commutant_dim(), 1);
    }

    #[test]
    fn wedderburn_of_scalars_is_one_scalar_block_per_dim() {
        let a = Algebra::scalars("sc", 4);
        let dec = wedderburn(&a, 7, &tol()).unwrap();
        assert_eq!(dec.block_table(), vec![(4, 1)]);
    }

    #[test]
    fn collective_block_tables_for_small_qubit_counts() {
        let cases: [(usize, Vec<(usize, usize)>); 3] = [
            (2, vec![(1, 1), (1, 3)]),
            (4, vec![(2, 1), (3, 3), (1, 5)]),
            (6, vec![(5, 1), (9, 3), (5, 5), (1, 7)]),
        ];
        for (n, want) in cases {
            let a = collective_algebra(n);
            let dec = wedderburn(&a, 11, &tol()).unwrap();
            assert_eq!(dec.block_table(), want, "N = {n}");
            assert_eq!(dec.algebra_dim(), a.dim(), "N = {n} dim law");
            assert_eq!(dec.support_dim(), 1 << n, "N = {n} support");
        }
    }

    #[test]
    fn permutation_blocks_transpose_the_collective_ones() {
        for n in [2usize, 4] {
            let ca = collective_algebra(n);
            let pa = permutation_algebra(n);
            let cd = wedderburn(&ca, 3, &tol()).unwrap();
            let pd = wedderburn(&pa, 3, &tol()).unwrap();
            let mut transposed: Vec<(usize, usize)> =
                cd.block_table().iter().map(|&(n, d)| (d, n)).collect();
            transposed.sort();
            let mut got = pd.block_table();
            got.sort();
            assert_eq!(got, transposed, "N = {n}");
        }
    }

    #[test]
    fn block_isometries_give_copy_major_pullbacks() {
        let a = collective_algebra(4);
        let dec = wedderburn(&a, 5, &tol()).unwrap();
        for blk in &dec.blocks {
            let r = pullback_block_residual(&a, blk);
            assert!(r < 1e-9, "block ({},{}) residual {r}", blk.multiplicity, blk.irrep_dim);
            let u = blk.isometry.adjoint().mul(&blk.isometry);
            assert!(u.dist(&Mat::identity(blk.support_dim())) < 1e-10);
        }
        // commutant dim law against an independent computation
        let comm = a.commutant("c", &tol());
        assert_eq!(dec.commutant_dim(), comm.dim());
    }

    #[test]
    fn block_order_is_seed_independent() {
        let a = permutation_algebra(4);
        let d1 = wedderburn(&a, 1, &tol()).unwrap();
        let d2 = wedderburn(&a, 998877, &tol()).unwrap();
        assert_eq!(d1.block_table(), d2.block_table());
        for (b1, b2) in d1.blocks.iter().zip(&d2.blocks) {
            assert!(b1.projector.dist(&b2.projector) < 1e-8);
        }
    }

    #[test]
    fn multiplicity_formula_matches_tables() {
        // (N, 2J) -> n_J for the tables above
        assert_eq!(multiplicity_formula(2, 0).unwrap(), 1);
        assert_eq!(multiplicity_formula(2, 2).unwrap(), 1);
        assert_eq!(multiplicity_formula(4, 0).unwrap(), 2);
        assert_eq!(multiplicity_formula(4, 2).unwrap(), 3);
        assert_eq!(multiplicity_formula(4, 4).unwrap(), 1);
        assert_eq!(multiplicity_formula(6, 0).unwrap(), 5);
        assert_eq!(multiplicity_formula(6, 2).unwrap(), 9);
        assert_eq!(multiplicity_formula(6, 4).unwrap(), 5);
        assert_eq!(multiplicity_formula(6, 6).unwrap(), 1);
        assert_eq!(multiplicity_formula(6, 1).is_err(), true);
        assert_eq!(multiplicity_formula(6, 8).is_err(), true);
    }

    #[test]
    fn multiplicities_weighted_by_dims_cover_the_space() {
        for n in [2u32, 3, 4, 5, 6, 10, 17] {
            let mut total: u128 = 0;
            let start = n % 2;
            let mut tj = start;
            while tj <= n {
                total += multiplicity_formula(n, tj).unwrap() * (tj as u128 + 1);
                tj += 2;
            }
            assert_eq!(total, 1u128 << n, "N = {n}");
        }
    }

    #[test]
    fn induced_tps_on_the_two_body_pair() {
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
        let fact = induced_tps(&[&chi, &lam], None, 42, &tol()).unwrap();
        assert_eq!(fact.factor_dims, vec![2, 2]);
        assert_eq!(fact.code_dim, 4);
        assert!(fact.isometry.unitarity_residual() < 1e-10);

        for (slot, alg) in [(0usize, &chi), (1usize, &lam)] {
            for b in alg.basis() {
                let (_, r) = fact.slot_factor(&fact.pullback(b), slot);
                assert!(r < 1e-9, "slot {slot} residual {r}");
            }
        }
    }

    #[test]
    fn induced_tps_rejects_a_non_commuting_family() {
        let a1 = Algebra::close("a1", &[pauli_string::<f64>("XI").unwrap()], &tol()).unwrap();
        let a2 = Algebra::close("a2", &[pauli_string::<f64>("ZI").unwrap()], &tol()).unwrap();
        let err = induced_tps(&[&a1, &a2], None, 1, &tol()).unwrap_err();
        match err {
            Error::AxiomsNotSatisfied { which, .. } => {
                assert_eq!(which, "subsystem independence");
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert_eq!(
            Error::AxiomsNotSatisfied {
                which: "x".into(),
                report: Box::new(
                    check_axioms(&[&a1], None, &tol()).unwrap()
                ),
            }
            .exit_code(),
            1
        );
    }

    #[test]
    fn induced_tps_standard_three_qubits() {
        let names = ["site0", "site1", "site2"];
        let gens = [["XII", "ZII"], ["IXI", "IZI"], ["IIX", "IIZ"]];
        let algs: Vec<Algebra<f64>> = names
            .iter()
            .zip(&gens)
            .map(|(nm, gg)| {
                let ops: Vec<Mat<f64>> = gg
                    .iter()
                    .map(|s| pauli_string::<f64>(s).unwrap())
                    .collect();
                Algebra::close(nm, &ops, &tol()).unwrap()
            })
            .collect();
        let refs: Vec<&Algebra<f64>> = algs.iter().collect();
        let fact = induced_tps(&refs, None, 9, &tol()).unwrap();
        assert_eq!(fact.factor_dims, vec![2, 2, 2]);
        for (slot, alg) in algs.iter().enumerate() {
            for b in alg.basis() {
                let (_, r) = fact.slot_factor(&fact.pullback(b), slot);
                assert!(r < 1e-9, "slot {slot} residual {r}");
            }
        }
    }

    #[test]
    fn chain_subsystems_recover_per_qubit_algebras() {
        // B_0 = everything, B_1 = ops on qubits 2.., B_2 = ops on qubit 3
        // (standard chain on 3 qubits). A_i must be the single-qubit algebra
        // at position i-1, up to span equality.
        let full = Algebra::full("B0", 8);
        let b1 = Algebra::close(
            "B1",
            &[
                pauli_string::<f64>("IXI").unwrap(),
                pauli_string::<f64>("IZI").unwrap(),
                pauli_string::<f64>("IIX").unwrap(),
                pauli_string::<f64>("IIZ").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        let b2 = Algebra::close(
            "B2",
            &[
                pauli_string::<f64>("IIX").unwrap(),
                pauli_string::<f64>("IIZ").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        let subs = chain_subsystems(&[&full, &b1, &b2], &tol()).unwrap();
        assert_eq!(subs.len(), 2);

        let q0 = Algebra::close(
            "q0",
            &[
                pauli_string::<f64>("XII").unwrap(),
                pauli_string::<f64>("ZII").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        let q1 = Algebra::close(
            "q1",
            &[
                pauli_string::<f64>("IXI").unwrap(),
                pauli_string::<f64>("IZI").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        assert!(subs[0].span_equals(&q0, &tol()));
        assert!(subs[1].span_equals(&q1, &tol()));
    }

    #[test]
    fn chain_decompose_standard_three_qubits() {
        let full = Algebra::full("B0", 8);
        let b1 = Algebra::close(
            "B1",
            &[
                pauli_string::<f64>("IXI").unwrap(),
                pauli_string::<f64>("IZI").unwrap(),
                pauli_string::<f64>("IIX").unwrap(),
                pauli_string::<f64>("IIZ").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        let b2 = Algebra::close(
            "B2",
            &[
                pauli_string::<f64>("IIX").unwrap(),
                pauli_string::<f64>("IIZ").unwrap(),
            ],
            &tol(),
        )
        .unwrap();
        let chain = [&full, &b1, &b2];
        let dec = chain_decompose(&chain, 13, &tol()).unwrap();
        assert_eq!(dec.sectors.len(), 1);
        let s = &dec.sectors[0];
        assert_eq!(s.multiplicities, vec![2, 2]);
        assert_eq!(s.terminal_dim, 2);
        assert!(s.nontrivial());
        assert_eq!(dec.total_dim(), 8);

        // relative subsystems act on their own slots
        let subs = chain_subsystems(&chain, &tol()).unwrap();
        for (k, a) in subs.iter().enumerate() {
            for b in a.basis() {
                let (_, r) = s.slot_factor(b, k);
                assert!(r < 1e-9, "level {k} residual {r}");
            }
        }
        for b in b2.basis() {
            let (_, r) = s.slot_factor(b, 2);
            assert!(r < 1e-9, "terminal residual {r}");
        }

        // reconstruction dims agree level by level
        let rec = chain_reconstruction_dims(&chain, &subs, &dec, &tol()).unwrap();
        for rows in &rec {
            for &(want, got) in rows {
                assert_eq!(want, got);
            }
        }
    }

    #[test]
    fn chain_decompose_rejects_non_nested_input() {
        let full = Algebra::full("B0", 4);
        let a = Algebra::close("A", &[pauli_string::<f64>("XI").unwrap()], &tol()).unwrap();
        let b = Algebra::close("B", &[pauli_string::<f64>("ZI").unwrap()], &tol()).unwrap();
        let err = chain_decompose(&[&full, &a, &b], 1, &tol()).unwrap_err();
        assert!(matches!(err, Error::ChainInclusion { level: 2, .. }));

        let err2 = chain_decompose(&[&full, &a, &a], 1, &tol()).unwrap_err();
        assert!(matches!(err2, Error::ChainNotStrict { level: 2, .. }));
    }

    #[test]
    fn single_entry_chain_falls_back_to_wedderburn() {
        let a = collective_algebra(2);
        let dec = chain_decompose(&[&a], 3, &tol()).unwrap();
        let tables: Vec<(usize, usize)> = dec
            .sectors
            .iter()
            .map(|s| (s.multiplicities[0], s.terminal_dim))
            .collect();
        assert_eq!(tables, vec![(1, 1), (1, 3)]);
    }

    #[test]
    fn repeated_full_algebra_is_one_featureless_sector() {
        let b0 = Algebra::full("B0", 4);
        let b1 = Algebra::full("B1", 4);
        let dec = chain_decompose(&[&b0, &b1], 3, &tol()).unwrap();
        assert_eq!(dec.sectors.len(), 1);
        let s = &dec.sectors[0];
        assert_eq!(s.multiplicities, vec![1]);
        assert_eq!(s.terminal_dim, 4);
        assert!(!s.nontrivial());
    }

    #[test]
    fn induced_tps_on_a_collective_code_sector() {
        // collective vs permutation algebra on 4 qubits, restricted to the
        // spin-1 central sector: a (3,3) pair of encoded qutrits.
        let coll = collective_algebra(4);
        let perm = permutation_algebra(4);
        let dec = wedderburn(&coll, 17, &tol()).unwrap();
        let blk = dec
            .blocks
            .iter()
            .find(|b| (b.multiplicity, b.irrep_dim) == (3, 3))
            .expect("spin-1 sector present");
        let fact = induced_tps(&[&coll, &perm], Some(&blk.projector), 17, &tol()).unwrap();
        assert_eq!(fact.factor_dims, vec![3, 3]);
        assert_eq!(fact.code_dim, 9);
        for (slot, alg) in [(0usize, &coll), (1usize, &perm)] {
            for b in alg.basis() {
                let (_, r) = fact.slot_factor(&fact.pullback(b), slot);
                assert!(r < 1e-8, "slot {slot} residual {r}");
            }
        }
    }

    #[test]
    fn nested_symmetric_chain_on_four_sites() {
        // permutation algebra of S4, then of S2×S2; small version of the
        // six-site case with hand-checkable sector dims.
        let full = Algebra::full("B0", 16);
        let b1 = permutation_algebra(4).renamed("B1");
        let b2 = Algebra::from_closed_span(
            "B2",
            &parted_symmetric_group_matrices::<f64>(4, 2),
            &tol(),
        )
        .unwrap();
        let chain = [&full, &b1, &b2];
        let dec = chain_decompose(&chain, 21, &tol()).unwrap();
        assert_eq!(dec.total_dim(), 16);
        // S4 blocks on 4 qubits: (n,d) = (1,1)[sym], (3,3)[mixed], (2,2)[anti-ish]
        // restricted to S2×S2 the mixed irrep splits; every sector dim must
        // still be mult-product × terminal.
        for s in &dec.sectors {
            assert_eq!(s.sector_dim(), s.isometry.cols());
            assert!(s.isometry.adjoint().mul(&s.isometry)
                .dist(&Mat::identity(s.sector_dim())) < 1e-9);
        }
        let subs = chain_subsystems(&chain, &tol()).unwrap();
        let rec = chain_reconstruction_dims(&chain, &subs, &dec, &tol()).unwrap();
        for rows in &rec {
            for &(want, got) in rows {
                assert_eq!(want, got);
            }
        }
    }

    #[test]
    fn stabilizer_chain_of_zz_has_the_eight_dimensional_middle() {
        let zz = pauli_string::<f64>("ZZ").unwrap();
        let chain = stabilizer_chain(&[zz.clone()], &tol()).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0].dim(), 16);
        assert_eq!(chain[1].dim(), 8);
        let refs: Vec<&Algebra<f64>> = chain.iter().collect();
        let dec = chain_decompose(&refs, 2, &tol()).unwrap();
        assert_eq!(dec.sectors.len(), 2);
        for s in &dec.sectors {
            assert_eq!(s.sector_dim(), 2);
            assert_eq!(s.multiplicities, vec![1]);
        }
    }

    #[test]
    fn stabilizer_validation_names_the_offending_operator() {
        let x = pauli_string::<f64>("XI").unwrap();
        let z = pauli_string::<f64>("ZI").unwrap();
        let err = stabilizer_chain(&[x.clone(), z], &tol()).unwrap_err();
        match err {
            Error::PropertyViolation { name, property, .. } => {
                assert_eq!(name, "X2");
                assert!(property.contains("commutes with X1"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        let not_traceless = Mat::<f64>::identity(4);
        let err2 = stabilizer_chain(&[not_traceless], &tol()).unwrap_err();
        assert!(matches!(err2, Error::PropertyViolation { .. }));
    }

    #[test]
    fn syndrome_tps_of_two_stabilizers_on_three_qubits() {
        let s1 = pauli_string::<f64>("ZZI").unwrap();
        let s2 = pauli_string::<f64>("IZZ").unwrap();
        let syn = syndrome_tps(&[s1.clone(), s2.clone()], &tol()).unwrap();
        assert_eq!(syn.dims, vec![2, 2, 2]);
        assert_eq!(syn.labels.len(), 4);
        assert_eq!(syn.labels[0], vec![1, 1]);
        assert_eq!(syn.labels[3], vec![-1, -1]);
        assert!(syn.isometry.unitarity_residual() < 1e-10);
        assert!(syn.slot_diagonal_residual(&s1, 0) < 1e-9);
        assert!(syn.slot_diagonal_residual(&s2, 1) < 1e-9);
    }

    #[test]
    fn syndrome_tps_rejects_dependent_sets() {
        let s1 = pauli_string::<f64>("ZZI").unwrap();
        let s2 = pauli_string::<f64>("IZZ").unwrap();
        let s3 = pauli_string::<f64>("ZIZ").unwrap(); // product of the first two
        let err = syndrome_tps(&[s1, s2, s3], &tol()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn extract_slot_reports_nonlocal_operators() {
        let swap = crate::builders::qubit_swap::<f64>(2, 0, 1);
        let (_, r) = extract_slot(&swap, &[2, 2], 0);
        assert!(r > 0.5, "SWAP is far from one-sided, got {r}");
        let local = pauli_string::<f64>("XI").unwrap();
        let (m, r2) = extract_slot(&local, &[2, 2], 0);
        assert!(r2 < 1e-12);
        assert!(m.dist(&crate::builders::pauli_x::<f64>()) < 1e-12);
    }
}
