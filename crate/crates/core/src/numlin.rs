//! Complex sparse vectors, small dense matrices, and operator-norm estimates.
//!
//! Norms are always accumulated in ascending index order so that repeated
//! runs produce bit-identical results. Entries that are exactly zero are
//! never stored in a [`SparseVector`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Scalar field of every operator in the crate.
pub type ComplexScalar = Complex64;

pub(crate) const ZERO: ComplexScalar = Complex64::new(0.0, 0.0);
pub(crate) const ONE: ComplexScalar = Complex64::new(1.0, 0.0);

#[inline]
pub(crate) fn is_finite(c: ComplexScalar) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

#[inline]
/// `√(Σ|c|²)` from a plain sum of squares, falling back to a sum rescaled
/// by a power of two when the plain sum overflows or underflows. The
/// fallback only runs in those cases, so ordinary norms are unchanged.
///
/// `max_abs` gives the largest modulus; `scaled(s)` gives `Σ|s·c|²` in the
/// same order as `sq`.
pub(crate) fn guarded_norm(sq: f64, max_abs: impl FnOnce() -> f64, scaled: impl FnOnce(f64) -> f64) -> f64 {
    if sq.is_finite() && sq >= f64::MIN_POSITIVE {
        return libm::sqrt(sq);
    }
    let top = max_abs();
    if !top.is_finite() || top == 0.0 {
        return top;
    }
    // 2^-exp must itself be representable, hence the clamp for subnormals.
    let exp = libm::frexp(top).1.max(-1000);
    let s = libm::scalbn(1.0, -exp);
    libm::scalbn(libm::sqrt(scaled(s)), exp)
}

pub(crate) fn is_zero(c: ComplexScalar) -> bool {
    c.re == 0.0 && c.im == 0.0
}

/// Finitely supported complex vector indexed by `ℤ`.
///
/// Entries are kept sorted by index; exact zeros are pruned.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(i64, ComplexScalar)>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis vector `e_index`.
    pub fn basis(index: i64) -> Self {
        Self { entries: vec![(index, ONE)] }
    }

    /// `value` on every coordinate `start, start+1, …, start+len-1`.
    pub fn constant(start: i64, len: usize, value: ComplexScalar) -> Result<Self> {
        if !is_finite(value) {
            return Err(Error::NonFinite("vector entry"));
        }
        if is_zero(value) {
            return Ok(Self::zero());
        }
        let entries = (0..len as i64).map(|k| (start + k, value)).collect();
        Ok(Self { entries })
    }

    /// Builds a vector from `(index, value)` pairs in any order.
    ///
    /// Duplicate indices and non-finite values are rejected; exact zeros are
    /// dropped.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, ComplexScalar)>,
    {
        let mut entries: Vec<_> = entries.into_iter().collect();
        if entries.iter().any(|&(_, c)| !is_finite(c)) {
            return Err(Error::NonFinite("vector entry"));
        }
        entries.sort_by_key(|&(i, _)| i);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateIndex(w[0].0));
        }
        entries.retain(|&(_, c)| !is_zero(c));
        Ok(Self { entries })
    }

    /// Real-valued convenience constructor.
    pub fn from_real<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, f64)>,
    {
        Self::from_entries(entries.into_iter().map(|(i, x)| (i, Complex64::new(x, 0.0))))
    }

    /// Reads coordinates `start..start+values.len()` of a dense slice.
    pub fn from_dense(start: i64, values: &[ComplexScalar]) -> Result<Self> {
        Self::from_entries(values.iter().enumerate().map(|(k, &c)| (start + k as i64, c)))
    }

    /// Assumes `entries` sorted, duplicate free and finite; drops zeros.
    pub(crate) fn from_sorted(mut entries: Vec<(i64, ComplexScalar)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        entries.retain(|&(_, c)| !is_zero(c));
        Self { entries }
    }

    pub fn get(&self, index: i64) -> ComplexScalar {
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => ZERO,
        }
    }

    /// Stored `(index, value)` pairs in ascending index order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (i64, ComplexScalar)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entries(&self) -> &[(i64, ComplexScalar)] {
        &self.entries
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest and largest index of the support.
    pub fn support_bounds(&self) -> Option<(i64, i64)> {
        Some((self.entries.first()?.0, self.entries.last()?.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|&(_, c)| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        guarded_norm(
            self.norm_sqr(),
            || self.entries.iter().map(|&(_, c)| c.norm()).fold(0.0, f64::max),
            |s| self.entries.iter().map(|&(_, c)| (c * s).norm_sqr()).sum(),
        )
    }

    pub fn scale(&self, a: ComplexScalar) -> SparseVector {
        Self::from_sorted(self.entries.iter().map(|&(i, c)| (i, a * c)).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: ComplexScalar, other: &SparseVector, b: ComplexScalar) -> SparseVector {
        let (x, y) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            let next = match (x.get(i), y.get(j)) {
                (Some(&(ix, cx)), Some(&(iy, cy))) if ix == iy => {
                    i += 1;
                    j += 1;
                    (ix, a * cx + b * cy)
                }
                (Some(&(ix, cx)), Some(&(iy, _))) if ix < iy => {
                    i += 1;
                    (ix, a * cx)
                }
                (Some(&(ix, cx)), None) => {
                    i += 1;
                    (ix, a * cx)
                }
                (_, Some(&(iy, cy))) => {
                    j += 1;
                    (iy, b * cy)
                }
                (None, None) => unreachable!(),
            };
            out.push(next);
        }
        Self::from_sorted(out)
    }

    pub fn add(&self, other: &SparseVector) -> SparseVector {
        self.combine(ONE, other, ONE)
    }

    pub fn sub(&self, other: &SparseVector) -> SparseVector {
        self.combine(ONE, other, -ONE)
    }

    /// Drops entries with modulus strictly below `threshold`.
    pub fn prune_below(&self, threshold: f64) -> SparseVector {
        let entries = self.entries.iter().copied().filter(|&(_, c)| c.norm() >= threshold).collect();
        Self { entries }
    }

    /// Coordinates `start..start+len` as a dense array.
    pub fn to_dense(&self, start: i64, len: usize) -> Vec<ComplexScalar> {
        let mut out = vec![ZERO; len];
        for &(i, c) in &self.entries {
            let k = i - start;
            if k >= 0 && (k as usize) < len {
                out[k as usize] = c;
            }
        }
        out
    }
}

/// `ℓ²` norm, summed in ascending index order.
pub fn vec_norm(v: &SparseVector) -> f64 {
    v.norm()
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexScalar>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<ComplexScalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("shape", "matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if !data.iter().all(|&c| is_finite(c)) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ComplexScalar) -> Self {
        assert!(rows > 0 && cols > 0);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[ComplexScalar]) -> Self {
        Self::from_fn(diag.len(), diag.len(), |r, c| if r == c { diag[r] } else { ZERO })
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

    /// Entry `(r, c)`, 0-based.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> ComplexScalar {
        self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[ComplexScalar] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[ComplexScalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut data = vec![ZERO; self.rows * other.cols];
        for r in 0..self.rows {
            let out = &mut data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if is_zero(a) {
                    continue;
                }
                for (o, &b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseMatrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn mul_vec(&self, x: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows).map(|r| self.row(r).iter().zip(x).map(|(&a, &b)| a * b).sum()).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn scale(&self, a: ComplexScalar) -> DenseMatrix {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&c| a * c).collect() }
    }

    pub fn diagonal(&self) -> Vec<ComplexScalar> {
        (0..self.rows.min(self.cols)).map(|k| self.get(k, k)).collect()
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| is_zero(self.get(r, c))))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|r| (r + 1..self.cols).all(|c| is_zero(self.get(r, c))))
    }

    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.rows).map(|r| self.row(r).iter().map(|c| c.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs_col_sum(&self) -> f64 {
        (0..self.cols).map(|c| (0..self.rows).map(|r| self.get(r, c).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = DenseMatrix::identity(n).data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p * n + col].norm().total_cmp(&a[q * n + col].norm()))
                .expect("non-empty range");
            if is_zero(a[pivot * n + col]) {
                return Err(Error::Singular);
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                    inv.swap(pivot * n + k, col * n + k);
                }
            }
            let p = a[col * n + col];
            for k in 0..n {
                a[col * n + k] /= p;
                inv[col * n + k] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if is_zero(f) {
                    continue;
                }
                for k in 0..n {
                    let (ak, ik) = (a[col * n + k], inv[col * n + k]);
                    a[r * n + k] -= f * ak;
                    inv[r * n + k] -= f * ik;
                }
            }
        }
        DenseMatrix::new(n, n, inv)
    }
}

/// `Aᵐ` by repeated squaring; `A⁰` is the identity.
pub fn mat_pow(a: &DenseMatrix, m: u64) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows, cols: a.cols });
    }
    let mut result = DenseMatrix::identity(a.rows);
    let mut base = a.clone();
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            result = result.mul(&base)?;
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base)?;
        }
    }
    Ok(result)
}

/// Square linear map that can be applied together with its adjoint.
///
/// Lets the norm estimator run on structured blocks that are too large to
/// store densely.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply_into(&self, x: &[ComplexScalar], out: &mut [ComplexScalar]);
    fn apply_adjoint_into(&self, x: &[ComplexScalar], out: &mut [ComplexScalar]);
    fn max_abs_row_sum(&self) -> f64;
    fn max_abs_col_sum(&self) -> f64;
}

impl LinearMap for DenseMatrix {
    fn dim(&self) -> usize {
        assert!(self.is_square(), "LinearMap requires a square matrix");
        self.rows
    }

    fn apply_into(&self, x: &[ComplexScalar], out: &mut [ComplexScalar]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).iter().zip(x).map(|(&a, &b)| a * b).sum();
        }
    }

    fn apply_adjoint_into(&self, x: &[ComplexScalar], out: &mut [ComplexScalar]) {
        out.fill(ZERO);
        for (r, &xr) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * xr;
            }
        }
    }

    fn max_abs_row_sum(&self) -> f64 {
        DenseMatrix::max_abs_row_sum(self)
    }

    fn max_abs_col_sum(&self) -> f64 {
        DenseMatrix::max_abs_col_sum(self)
    }
}

/// Result of [`op_norm_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    /// Largest singular value from power iteration on `A*A`; never above the
    /// true norm beyond rounding.
    pub estimate: f64,
    /// `√(‖A‖₁ ‖A‖_∞)`, a guaranteed upper bound on `‖A‖₂`.
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn sum_norm_sqr(v: &[ComplexScalar]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Estimates the spectral norm `‖A‖₂`.
///
/// Runs power iteration on the Gram operator `A*A` and stops once successive
/// Rayleigh quotients differ relatively by less than `tol`, or after
/// `max_iter` rounds.
pub fn op_norm_estimate<A: LinearMap + ?Sized>(a: &A, tol: f64, max_iter: usize) -> NormEstimate {
    let n = a.dim();
    let upper_bound = libm::sqrt(a.max_abs_row_sum() * a.max_abs_col_sum());
    if upper_bound == 0.0 || n == 0 {
        return NormEstimate { estimate: 0.0, upper_bound: 0.0, iterations: 0, converged: true };
    }
    // Deterministic start with irregular entries so it is not orthogonal to a
    // structured top singular vector.
    let mut v: Vec<ComplexScalar> =
        (0..n).map(|j| Complex64::new(1.0 + ((j * 37) % 11) as f64 / 11.0, ((j * 17) % 5) as f64 / 10.0)).collect();
    let mut w = vec![ZERO; n];
    let mut rayleigh = 0.0_f64;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter.max(1) {
        iterations += 1;
        let vv = sum_norm_sqr(&v);
        a.apply_into(&v, &mut w);
        let ww = sum_norm_sqr(&w);
        let next = ww / vv;
        if ww == 0.0 && iterations == 1 {
            // Start vector in the kernel: restart from a basis vector sweep.
            v.iter_mut().enumerate().for_each(|(j, c)| *c = Complex64::new(1.0 / (1.0 + j as f64), 0.0));
            continue;
        }
        let delta = libm::fabs(next - rayleigh);
        rayleigh = rayleigh.max(next);
        if iterations > 1 && delta <= tol * next {
            converged = true;
            break;
        }
        a.apply_adjoint_into(&w, &mut v);
        let scale = libm::sqrt(sum_norm_sqr(&v));
        if scale == 0.0 {
            converged = true;
            break;
        }
        v.iter_mut().for_each(|c| *c /= scale);
    }
    NormEstimate { estimate: libm::sqrt(rayleigh), upper_bound, iterations, converged }
}
