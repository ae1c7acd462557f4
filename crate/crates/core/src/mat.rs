//! Dense complex matrices and the numerical routines everything else sits on.
//!
//! Determinism is a hard requirement here: fixed sweep orders, fixed pivot
//! rules, no data-dependent parallelism. Two calls with bit-identical inputs
//! return bit-identical outputs.
//!
//! The eigensolver is a cyclic Jacobi iteration for Hermitian matrices. It is
//! slower than a Householder reduction but unconditionally convergent, simple
//! to audit, and exactly reproducible, which matters more at the dimensions
//! this crate targets (space dimension up to a few hundred).

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Numerical thresholds used across the crate.
///
/// `rank_rel` decides rank cutoffs relative to the largest singular value,
/// `residual_abs` bounds acceptable violation of algebraic identities for
/// Hilbert-Schmidt-normalized operators, and `eig_cluster_rel` groups nearby
/// eigenvalues relative to the spectral scale. Rank decisions must be stricter
/// than cluster decisions, so `rank_rel < eig_cluster_rel` is enforced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    pub rank_rel: T,
    pub residual_abs: T,
    pub eig_cluster_rel: T,
}

impl<T: Real> Tolerances<T> {
    pub fn new(rank_rel: T, residual_abs: T, eig_cluster_rel: T) -> Result<Self> {
        if !(rank_rel > T::zero() && residual_abs > T::zero() && eig_cluster_rel > T::zero()) {
            return Err(Error::InvalidInput(
                "tolerances must be strictly positive".into(),
            ));
        }
        if !(rank_rel < eig_cluster_rel) {
            return Err(Error::InvalidInput(
                "rank_rel must be smaller than eig_cluster_rel".into(),
            ));
        }
        Ok(Self {
            rank_rel,
            residual_abs,
            eig_cluster_rel,
        })
    }

    /// Residual threshold scaled for operators of norm `scale`.
    pub fn residual_for(&self, scale: T) -> T {
        self.residual_abs * scale.max(T::one())
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rank_rel: T::from_f64c(1e-10),
            residual_abs: T::from_f64c(1e-8),
            eig_cluster_rel: T::from_f64c(1e-6),
        }
    }
}

/// Dense complex matrix, row-major.
///
/// Square matrices represent operators; rectangular ones appear as isometries
/// (orthonormal columns into a larger space). Operations panic on shape
/// mismatch: shapes are structural invariants of the calling code, not data.
#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::<T>::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = cr(T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must match shape");
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(dim: usize, cols: &[Vec<C<T>>]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length must match dimension");
            for i in 0..dim {
                m.data[i * m.cols + j] = col[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        assert!(self.is_square(), "dim() requires a square matrix");
        self.rows
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn col(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scaled(&self, z: C<T>) -> Self {
        self.map(|w| w * z)
    }

    pub fn scaled_re(&self, r: T) -> Self {
        self.map(|w| w * r)
    }

    /// Matrix product, cache-friendly ikj order.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![C::<T>::new(T::zero(), T::zero()); n * m];
        for i in 0..n {
            let arow = &self.data[i * k..(i + 1) * k];
            let orow = &mut out[i * m..(i + 1) * m];
            for (p, &a) in arow.iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let brow = &other.data[p * m..(p + 1) * m];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: n,
            cols: m,
            data: out,
        }
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![C::<T>::new(T::zero(), T::zero()); self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = C::<T>::new(T::zero(), T::zero());
            for (a, b) in row.iter().zip(v) {
                acc += *a * *b;
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> C<T> {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm, equal to the Hilbert-Schmidt norm for operators.
    pub fn fro_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn dist(&self, other: &Self) -> T {
        self.sub(other).fro_norm()
    }

    /// Hermitian part (A + A†)/2.
    pub fn hermitize(&self) -> Self {
        let half = cr(T::from_f64c(0.5));
        self.add(&self.adjoint()).scaled(half)
    }

    pub fn hermiticity_residual(&self) -> T {
        self.sub(&self.adjoint()).fro_norm()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product; the left factor owns the most significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca, rb, cb) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = Self::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let a = self.get(i, j);
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        out.set(i * rb + k, j * cb + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Unitarity defect ‖U†U − 1‖.
    pub fn unitarity_residual(&self) -> T {
        assert!(self.is_square());
        self.adjoint()
            .mul(self)
            .sub(&Self::identity(self.rows))
            .fro_norm()
    }
}

impl<T: Real> std::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self.get(i, j);
                write!(f, "{:+.3}{:+.3}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn kron_list<T: Real>(factors: &[Mat<T>]) -> Mat<T> {
    assert!(!factors.is_empty());
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = acc.kron(f);
    }
    acc
}

/// Partial trace of a square matrix viewed as an operator on ⊗_k C^{dims[k]}.
/// `keep` lists the slot indices to retain, strictly increasing; the result
/// acts on the kept factors in their original order.
pub fn partial_trace<T: Real>(x: &Mat<T>, dims: &[usize], keep: &[usize]) -> Mat<T> {
    let total: usize = dims.iter().product();
    assert_eq!(x.rows(), total, "operator does not match the factor dims");
    assert!(x.is_square());
    assert!(keep.windows(2).all(|w| w[0] < w[1]));
    assert!(keep.iter().all(|&k| k < dims.len()));
    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    // Full row index from a kept multi-index and a traced multi-index,
    // mixed-radix with slot 0 most significant (matching kron).
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let mut rem = kept_idx;
        for &k in keep.iter().rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        let mut rem = traced_idx;
        for &k in traced.iter().rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        let mut full = 0usize;
        for (k, &dk) in dims.iter().enumerate() {
            full = full * dk + digits[k];
        }
        full
    };

    let mut out = Mat::zeros(kept_dim, kept_dim);
    for a in 0..kept_dim {
        for b in 0..kept_dim {
            let mut acc = C::new(T::zero(), T::zero());
            for t in 0..traced_dim {
                acc += x.get(compose(a, t), compose(b, t));
            }
            out.set(a, b, acc);
        }
    }
    out
}

/// Hilbert-Schmidt inner product tr(A† B).
///
/// Conjugate-linear in the first argument.
pub fn hs_inner<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Result<C<T>> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(Error::DimensionMismatch(format!(
            "hs_inner: {}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(hs_inner_unchecked(a, b))
}

#[inline]
pub(crate) fn hs_inner_unchecked<T: Real>(a: &Mat<T>, b: &Mat<T>) -> C<T> {
    let mut acc = C::<T>::new(T::zero(), T::zero());
    for (x, y) in a.data.iter().zip(&b.data) {
        acc += x.conj() * *y;
    }
    acc
}

/// Modified Gram-Schmidt with a single re-orthogonalization pass.
///
/// Input order decides the basis; a vector whose residual after projection
/// falls below `rank_rel` times the largest input norm is dropped. The
/// output spans exactly the input span.
pub fn orthonormal_basis<T: Real>(ops: &[Mat<T>], tol: &Tolerances<T>) -> Vec<Mat<T>> {
    let max_norm = ops
        .iter()
        .map(|m| m.fro_norm())
        .fold(T::zero(), |a, b| a.max(b));
    if max_norm == T::zero() {
        return Vec::new();
    }
    let drop_below = tol.rank_rel * max_norm;
    let mut basis: Vec<Mat<T>> = Vec::new();
    for op in ops {
        let mut v = op.clone();
        if extend_orthonormal(&mut basis, &mut v, drop_below) {
            // vector moved into basis by the helper
        }
    }
    basis
}

/// Projects `v` against `basis` (twice, for stability) and appends the
/// normalized remainder when it survives the drop threshold. Returns whether
/// the basis grew.
pub fn extend_orthonormal<T: Real>(
    basis: &mut Vec<Mat<T>>,
    v: &mut Mat<T>,
    drop_below: T,
) -> bool {
    for _pass in 0..2 {
        for b in basis.iter() {
            let coeff = hs_inner_unchecked(b, v);
            if coeff.norm_sqr() > T::zero() {
                axpy(v, -coeff, b);
            }
        }
    }
    let n = v.fro_norm();
    if n <= drop_below {
        return false;
    }
    let inv = cr(T::one() / n);
    basis.push(v.scaled(inv));
    true
}

/// v += z * b, in place.
#[inline]
fn axpy<T: Real>(v: &mut Mat<T>, z: C<T>, b: &Mat<T>) {
    for (x, y) in v.data.iter_mut().zip(&b.data) {
        *x += z * *y;
    }
}

/// Block variant of [`extend_orthonormal`] for large candidate sets.
///
/// Projects a whole block against the existing basis with basis-major loops
/// so each basis element is streamed once per block instead of once per
/// candidate. Mathematically identical to feeding the candidates one at a
/// time through classical Gram-Schmidt with one repeat pass, then
/// orthonormalizing inside the block.
pub fn extend_orthonormal_block<T: Real>(
    basis: &mut Vec<Mat<T>>,
    block: Vec<Mat<T>>,
    drop_below: T,
) {
    let mut block = block;
    for _pass in 0..2 {
        for b in basis.iter() {
            let coeffs: Vec<C<T>> = block.iter().map(|v| hs_inner_unchecked(b, v)).collect();
            for (v, &coeff) in block.iter_mut().zip(&coeffs) {
                if coeff.norm_sqr() > T::zero() {
                    axpy(v, -coeff, b);
                }
            }
        }
    }
    for mut v in block {
        extend_orthonormal(basis, &mut v, drop_below);
    }
}

/// Orthogonal projection of `x` onto the span of an orthonormal set.
pub fn project_onto_span<T: Real>(basis: &[Mat<T>], x: &Mat<T>) -> Mat<T> {
    let mut acc = Mat::zeros(x.rows, x.cols);
    for b in basis {
        let coeff = hs_inner_unchecked(b, x);
        axpy(&mut acc, coeff, b);
    }
    acc
}

/// Distance from `x` to the span of an orthonormal set.
pub fn span_residual<T: Real>(basis: &[Mat<T>], x: &Mat<T>) -> T {
    x.dist(&project_onto_span(basis, x))
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvector columns, so `H == V diag(vals) V†` within roundoff. Fails if
/// the input is not Hermitian within `tol.residual_abs` relative to its norm.
pub fn hermitian_eig<T: Real>(h: &Mat<T>, tol: &Tolerances<T>) -> Result<(Vec<T>, Mat<T>)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig: {}x{}",
            h.rows, h.cols
        )));
    }
    let scale = h.fro_norm();
    let res = h.hermiticity_residual();
    if res > tol.residual_for(scale) {
        return Err(Error::NotHermitian {
            name: "hermitian_eig input".into(),
            residual: res.to_f64c(),
        });
    }
    Ok(eig_sym(&h.hermitize()))
}

/// Jacobi eigensolver on a matrix assumed Hermitian. Ascending eigenvalues.
pub(crate) fn eig_sym<T: Real>(h: &Mat<T>) -> (Vec<T>, Mat<T>) {
    let n = h.dim();
    if n == 0 {
        return (Vec::new(), Mat::zeros(0, 0));
    }
    let mut a = h.clone();
    let mut v = Mat::identity(n);
    let base = a.fro_norm();
    if base == T::zero() {
        return (vec![T::zero(); n], v);
    }
    let stop = base * T::epsilon() * T::from_f64c(n as f64);
    let skip = base * T::epsilon();

    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).norm_sqr();
            }
        }
        let off = (off + off).sqrt();
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a.get(p, q);
                let gn = g.norm();
                if gn <= skip {
                    a.set(p, q, C::new(T::zero(), T::zero()));
                    a.set(q, p, C::new(T::zero(), T::zero()));
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = g / gn;
                let delta = (app - aqq) / (gn + gn);
                let t = if delta == T::zero() {
                    T::one()
                } else {
                    let s = if delta > T::zero() { T::one() } else { -T::one() };
                    s / (delta.abs() + (delta * delta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // Plane rotation J: J[p,p]=c, J[p,q]=-s*phase, J[q,p]=s*conj(phase), J[q,q]=c.
                let jpq = -phase * s;
                let jqp = phase.conj() * s;
                // Columns: A <- A J, V <- V J.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * jqp);
                    a.set(k, q, akp * jpq + akq * c);
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * jqp);
                    v.set(k, q, vkp * jpq + vkq * c);
                }
                // Rows: A <- J† A.
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * jqp.conj());
                    a.set(q, k, apk * jpq.conj() + aqk * c);
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, C::new(app.re, T::zero()));
                a.set(q, q, C::new(aqq.re, T::zero()));
                a.set(p, q, C::new(T::zero(), T::zero()));
                a.set(q, p, C::new(T::zero(), T::zero()));
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap().then(i.cmp(&j)));
    let sorted_vals: Vec<T> = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = Mat::from_fn(n, n, |i, j| v.get(i, order[j]));
    (sorted_vals, sorted_vecs)
}

/// Groups sorted values into clusters separated by gaps above
/// `tol_rel * max|value|`. Returns index ranges into the sorted slice.
pub fn cluster_ranges<T: Real>(sorted_vals: &[T], tol_rel: T) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    if sorted_vals.is_empty() {
        return out;
    }
    let scale = sorted_vals
        .iter()
        .map(|v| v.abs())
        .fold(T::zero(), |a, b| a.max(b));
    let gap = tol_rel * scale;
    let mut start = 0;
    for i in 1..sorted_vals.len() {
        if sorted_vals[i] - sorted_vals[i - 1] > gap {
            out.push(start..i);
            start = i;
        }
    }
    out.push(start..sorted_vals.len());
    out
}

// ---------------------------------------------------------------------------
// Null spaces
// ---------------------------------------------------------------------------

/// Orthonormal basis of the joint kernel of a stack of row functionals.
///
/// Singular values below `rank_rel * sigma_max` count as zero. The kernel is
/// computed through the Gram matrix of the stack, so the stack itself never
/// needs to be materialized by callers that can accumulate the Gram directly
/// (see [`kernel_of_gram`]).
pub fn null_space<T: Real>(
    rows: &[Vec<C<T>>],
    ncols: usize,
    tol: &Tolerances<T>,
) -> Result<Vec<Vec<C<T>>>> {
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::DimensionMismatch(format!(
                "null_space: row {} has length {}, expected {}",
                i,
                r.len(),
                ncols
            )));
        }
    }
    let mut gram = Mat::zeros(ncols, ncols);
    for r in rows {
        for a in 0..ncols {
            let ca = r[a].conj();
            if ca.re == T::zero() && ca.im == T::zero() {
                continue;
            }
            for b in 0..ncols {
                let g = gram.get(a, b);
                gram.set(a, b, g + ca * r[b]);
            }
        }
    }
    Ok(kernel_of_gram(&gram, tol))
}

/// Kernel of a positive semidefinite Gram matrix G = M†M: the joint kernel of
/// the rows of M. Eigenvalues at or below `(rank_rel)^2 * lambda_max` are
/// treated as zero (squared because Gram eigenvalues are squared singular
/// values), clamped below at the assembly roundoff floor `n·eps·lambda_max`,
/// which the squared cutoff of the default tolerances would otherwise
/// undershoot.
pub fn kernel_of_gram<T: Real>(gram: &Mat<T>, tol: &Tolerances<T>) -> Vec<Vec<C<T>>> {
    let (vals, vecs) = eig_sym(&gram.hermitize());
    let lmax = vals.last().map(|v| v.max(T::zero())).unwrap_or(T::zero());
    let floor = T::epsilon() * T::from_f64c(gram.dim() as f64);
    let cutoff = (tol.rank_rel * tol.rank_rel).max(floor) * lmax;
    let mut out = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        if v <= cutoff {
            out.push(vecs.col(k));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// SVD, polar factor, column-pivoted range
// ---------------------------------------------------------------------------

pub struct Svd<T> {
    /// Left singular vectors, one column per retained singular value.
    pub u: Mat<T>,
    /// Singular values in descending order.
    pub s: Vec<T>,
    /// Right singular vectors, matching columns.
    pub v: Mat<T>,
}

/// Singular value decomposition through the Gram matrix of the smaller side.
///
/// Accuracy of tiny singular values is limited to roughly sqrt(machine
/// epsilon) times the largest one, which is ample for the rank and angle
/// decisions made in this crate.
pub fn svd<T: Real>(m: &Mat<T>) -> Svd<T> {
    if m.cols > m.rows {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
    }
    let gram = m.adjoint().mul(m);
    let (vals, vecs) = eig_sym(&gram.hermitize());
    let k = m.cols;
    let mut s = Vec::with_capacity(k);
    let mut vcols: Vec<Vec<C<T>>> = Vec::with_capacity(k);
    for idx in (0..k).rev() {
        s.push(vals[idx].max(T::zero()).sqrt());
        vcols.push(vecs.col(idx));
    }
    let smax = s.first().copied().unwrap_or(T::zero());
    let floor = smax * T::epsilon() * T::from_f64c(16.0);
    let mut ucols: Vec<Vec<C<T>>> = Vec::with_capacity(k);
    for (sv, vc) in s.iter().zip(&vcols) {
        if *sv > floor {
            let mut u = m.matvec(vc);
            let inv = T::one() / *sv;
            for z in &mut u {
                *z = *z * inv;
            }
            ucols.push(u);
        } else {
            ucols.push(vec![C::new(T::zero(), T::zero()); m.rows]);
        }
    }
    Svd {
        u: Mat::from_cols(m.rows, &ucols),
        s,
        v: Mat::from_cols(m.cols, &vcols),
    }
}

/// Unitary polar factor of an invertible square matrix (U from M = U P).
pub fn polar_unitary<T: Real>(m: &Mat<T>) -> Result<Mat<T>> {
    assert!(m.is_square());
    let d = svd(m);
    let smax = d.s.first().copied().unwrap_or(T::zero());
    let smin = d.s.last().copied().unwrap_or(T::zero());
    if smax == T::zero() || smin <= smax * T::from_f64c(1e-8) {
        return Err(Error::PropertyViolation {
            name: "polar factor input".into(),
            property: "invertibility".into(),
            residual: (smin / smax.max(T::min_positive_value())).to_f64c(),
        });
    }
    Ok(d.u.mul(&d.v.adjoint()))
}

/// Orthonormal basis of the range of a matrix by column-pivoted
/// Gram-Schmidt. Pivot order picks the column of largest remaining norm
/// (smallest index on ties); the returned isometry's columns are sorted by
/// ascending pivot index, which makes the result reproducible and
/// basis-stable for projectors.
pub fn cpqr_range<T: Real>(p: &Mat<T>, rank_rel: T) -> Mat<T> {
    let mut cols: Vec<Vec<C<T>>> = (0..p.cols).map(|j| p.col(j)).collect();
    let max0 = cols
        .iter()
        .map(|c| vec_norm(c))
        .fold(T::zero(), |a, b| a.max(b));
    let drop_below = rank_rel * max0;
    let mut picked: Vec<(usize, Vec<C<T>>)> = Vec::new();
    let mut alive: Vec<usize> = (0..p.cols).collect();
    loop {
        let mut best: Option<(usize, T)> = None;
        for &j in &alive {
            let n = vec_norm(&cols[j]);
            match best {
                Some((_, bn)) if n <= bn => {}
                _ => best = Some((j, n)),
            }
        }
        let Some((jbest, nbest)) = best else { break };
        if nbest <= drop_below {
            break;
        }
        let inv = T::one() / nbest;
        let q: Vec<C<T>> = cols[jbest].iter().map(|&z| z * inv).collect();
        alive.retain(|&j| j != jbest);
        for &j in &alive {
            let coeff = vec_inner(&q, &cols[j]);
            for (x, y) in cols[j].iter_mut().zip(&q) {
                *x -= coeff * *y;
            }
        }
        picked.push((jbest, q));
    }
    picked.sort_by_key(|(j, _)| *j);
    let qs: Vec<Vec<C<T>>> = picked.into_iter().map(|(_, q)| q).collect();
    Mat::from_cols(p.rows, &qs)
}

pub(crate) fn vec_norm<T: Real>(v: &[C<T>]) -> T {
    v.iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

pub(crate) fn vec_inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    let mut acc = C::<T>::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * *y;
    }
    acc
}

// ---------------------------------------------------------------------------
// Functions of operators
// ---------------------------------------------------------------------------

/// exp(-i H t) for Hermitian H, through the eigendecomposition.
pub fn unitary_exp<T: Real>(h: &Mat<T>, t: T, tol: &Tolerances<T>) -> Result<Mat<T>> {
    let (vals, vecs) = hermitian_eig(h, tol)?;
    let n = h.dim();
    let mut scaled = vecs.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let phase = C::new(T::zero(), -lam * t).exp();
        for i in 0..n {
            let z = scaled.get(i, j);
            scaled.set(i, j, z * phase);
        }
    }
    Ok(scaled.mul(&vecs.adjoint()))
}

/// Largest singular value (operator norm).
pub fn op_norm<T: Real>(m: &Mat<T>) -> T {
    if m.rows == 0 || m.cols == 0 {
        return T::zero();
    }
    let gram = if m.cols <= m.rows {
        m.adjoint().mul(m)
    } else {
        m.mul(&m.adjoint())
    };
    let (vals, _) = eig_sym(&gram.hermitize());
    vals.last().copied().unwrap_or(T::zero()).max(T::zero()).sqrt()
}

/// Eigendecomposition of a unitary (more generally, normal) matrix via joint
/// diagonalization of its Hermitian and anti-Hermitian parts. Eigenvalues are
/// ordered by ascending real part, then ascending imaginary part; the order
/// and the eigenvector gauge are deterministic.
pub fn unitary_eig<T: Real>(u: &Mat<T>, tol: &Tolerances<T>) -> Result<(Vec<C<T>>, Mat<T>)> {
    assert!(u.is_square());
    let n = u.dim();
    let res = u.unitarity_residual();
    if res > tol.residual_for(T::from_f64c(n as f64).sqrt()) {
        return Err(Error::NotUnitary {
            name: "unitary_eig input".into(),
            residual: res.to_f64c(),
        });
    }
    let half = cr(T::from_f64c(0.5));
    let re_part = u.add(&u.adjoint()).scaled(half);
    let im_part = u.sub(&u.adjoint()).scaled(C::new(T::zero(), -T::from_f64c(0.5)));
    let (avals, avecs) = eig_sym(&re_part);
    let mut cols: Vec<Vec<C<T>>> = (0..n).map(|j| avecs.col(j)).collect();
    for range in cluster_ranges(&avals, tol.eig_cluster_rel) {
        if range.len() < 2 {
            continue;
        }
        let sub = Mat::from_cols(n, &cols[range.clone()]);
        let compressed = sub.adjoint().mul(&im_part).mul(&sub);
        let (_, w) = eig_sym(&compressed.hermitize());
        let rotated = sub.mul(&w);
        for (offset, j) in range.enumerate() {
            cols[j] = rotated.col(offset);
        }
    }
    let vecs = Mat::from_cols(n, &cols);
    let mut vals = Vec::with_capacity(n);
    for j in 0..n {
        let col = vecs.col(j);
        let ucol = u.matvec(&col);
        vals.push(vec_inner(&col, &ucol));
    }
    Ok((vals, vecs))
}
