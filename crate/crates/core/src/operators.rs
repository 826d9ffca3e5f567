//! Operator families and their exact action on finitely supported vectors.
//!
//! Shift convention: `T e_n = ω_n e_{n+1}` for the bilateral shift, with the
//! weight indexed by the source coordinate. Zero weights are legal and
//! annihilate coordinates exactly.
//!
//! Block-diagonal operators are described by a [`BlockLayout`]: either the
//! infinite nest family (block `k` is `(k+1)×(k+1)`, 2 on the superdiagonal)
//! generated on demand, or an explicit finite list of blocks. Large blocks
//! are stored as constant tridiagonal [`ToeplitzBand`]s and never densified
//! unless asked for.

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numlin::{guarded_norm, is_finite, is_zero, ComplexScalar, DenseMatrix, LinearMap, SparseVector, ONE, ZERO};

/// Weight sequence `ω_n, n ∈ ℤ` of a weighted shift.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightRule {
    /// `ω_n = 2` for `n ≥ 0`, `(|n|-1)/|n|` for `n < 0`.
    PaperExample1,
    /// `ω_n = (n+2)/(n+1)` for `n ≥ 0`, `(|n|-1)/|n|` for `n < 0`.
    PaperExample2,
    Constant(f64),
    Table {
        entries: BTreeMap<i64, f64>,
        default: f64,
    },
}

fn negative_side_weight(n: i64) -> f64 {
    let a = n.unsigned_abs();
    (a - 1) as f64 / a as f64
}

impl WeightRule {
    pub fn weight(&self, n: i64) -> f64 {
        match self {
            WeightRule::PaperExample1 if n >= 0 => 2.0,
            WeightRule::PaperExample2 if n >= 0 => (n as f64 + 2.0) / (n as f64 + 1.0),
            WeightRule::PaperExample1 | WeightRule::PaperExample2 => negative_side_weight(n),
            WeightRule::Constant(c) => *c,
            WeightRule::Table { entries, default } => entries.get(&n).copied().unwrap_or(*default),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            WeightRule::Constant(c) if !c.is_finite() => Err(Error::NonFinite("constant weight")),
            WeightRule::Table { entries, default }
                if !default.is_finite() || entries.values().any(|w| !w.is_finite()) =>
            {
                Err(Error::NonFinite("weight table"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// `T e_n = ω_n e_{n+1}` on `n ≥ 0`.
    Forward,
    /// `T e_n = ω_n e_{n-1}` on `n ≥ 0`, with `e_0 ↦ 0`.
    Backward,
}

/// Diagonal entries `λ_j, j ∈ ℤ`.
#[derive(Debug, Clone, PartialEq)]
pub enum DiagonalRule {
    Constant(ComplexScalar),
    /// `λ_j = slope·j + intercept`.
    Affine {
        slope: ComplexScalar,
        intercept: ComplexScalar,
    },
    Table {
        entries: BTreeMap<i64, ComplexScalar>,
        default: ComplexScalar,
    },
}

impl DiagonalRule {
    pub fn value(&self, j: i64) -> ComplexScalar {
        match self {
            DiagonalRule::Constant(c) => *c,
            DiagonalRule::Affine { slope, intercept } => slope * j as f64 + intercept,
            DiagonalRule::Table { entries, default } => entries.get(&j).copied().unwrap_or(*default),
        }
    }

    /// `sup_j |λ_j|`, or `None` when unbounded.
    pub fn sup_modulus(&self) -> Option<f64> {
        match self {
            DiagonalRule::Constant(c) => Some(c.norm()),
            DiagonalRule::Affine { slope, intercept } if is_zero(*slope) => Some(intercept.norm()),
            DiagonalRule::Affine { .. } => None,
            DiagonalRule::Table { entries, default } => {
                Some(entries.values().map(|c| c.norm()).fold(default.norm(), f64::max))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            DiagonalRule::Constant(c) => is_finite(*c),
            DiagonalRule::Affine { slope, intercept } => is_finite(*slope) && is_finite(*intercept),
            DiagonalRule::Table { entries, default } => is_finite(*default) && entries.values().all(|c| is_finite(*c)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("diagonal rule"))
        }
    }
}

/// Constant tridiagonal `size × size` matrix: `sub` below, `diag` on, `sup`
/// above the diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToeplitzBand {
    pub size: usize,
    pub sub: ComplexScalar,
    pub diag: ComplexScalar,
    pub sup: ComplexScalar,
}

impl ToeplitzBand {
    pub fn new(size: usize, sub: ComplexScalar, diag: ComplexScalar, sup: ComplexScalar) -> Result<Self> {
        if size == 0 {
            return Err(invalid("size", "band size must be positive"));
        }
        if !(is_finite(sub) && is_finite(diag) && is_finite(sup)) {
            return Err(Error::NonFinite("band coefficient"));
        }
        Ok(Self { size, sub, diag, sup })
    }

    /// Entry `(r, c)`, 0-based.
    pub fn entry(&self, r: usize, c: usize) -> ComplexScalar {
        if r == c {
            self.diag
        } else if c == r + 1 {
            self.sup
        } else if r == c + 1 {
            self.sub
        } else {
            ZERO
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.size, self.size, |r, c| self.entry(r, c))
    }

    pub fn is_triangular(&self) -> bool {
        is_zero(self.sub) || is_zero(self.sup)
    }

    /// New value at a position from its neighbours; absent neighbours and
    /// zero coefficients contribute nothing.
    #[inline]
    fn combine(&self, left: Option<ComplexScalar>, mid: ComplexScalar, right: Option<ComplexScalar>) -> ComplexScalar {
        let mut acc = if is_zero(self.diag) { ZERO } else { self.diag * mid };
        if let Some(l) = left.filter(|_| !is_zero(self.sub)) {
            acc += self.sub * l;
        }
        if let Some(r) = right.filter(|_| !is_zero(self.sup)) {
            acc += self.sup * r;
        }
        acc
    }

    fn step_dense(&self, v: &[ComplexScalar], out: &mut [ComplexScalar]) {
        let n = v.len();
        for p in 0..n {
            let left = if p > 0 { Some(v[p - 1]) } else { None };
            let right = v.get(p + 1).copied();
            out[p] = self.combine(left, v[p], right);
        }
    }
}

impl LinearMap for ToeplitzBand {
    fn dim(&self) -> usize {
        self.size
    }

    fn apply_into(&self, x: &[ComplexScalar], out: &mut [ComplexScalar]) {
        self.step_dense(x, out);
    }

    fn apply_adjoint_into(&self, x: &[ComplexScalar], out: &mut [ComplexScalar]) {
        let adj = ToeplitzBand { size: self.size, sub: self.sup.conj(), diag: self.diag.conj(), sup: self.sub.conj() };
        adj.step_dense(x, out);
    }

    fn max_abs_row_sum(&self) -> f64 {
        band_abs_sum(self.size, self.sub.norm(), self.diag.norm(), self.sup.norm())
    }

    fn max_abs_col_sum(&self) -> f64 {
        band_abs_sum(self.size, self.sup.norm(), self.diag.norm(), self.sub.norm())
    }
}

fn band_abs_sum(size: usize, first: f64, diag: f64, second: f64) -> f64 {
    match size {
        1 => diag,
        2 => (diag + first).max(diag + second),
        _ => diag + first + second,
    }
}

/// One diagonal block of a block-diagonal operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Dense(DenseMatrix),
    Band(ToeplitzBand),
}

impl Block {
    pub fn size(&self) -> usize {
        match self {
            Block::Dense(m) => m.rows(),
            Block::Band(b) => b.size,
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> ComplexScalar {
        match self {
            Block::Dense(m) => m.get(r, c),
            Block::Band(b) => b.entry(r, c),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Block::Dense(m) => m.clone(),
            Block::Band(b) => b.to_dense(),
        }
    }

    /// `max |diagonal entry|` when the block is triangular.
    pub fn triangular_radius(&self) -> Option<f64> {
        match self {
            Block::Band(b) if b.is_triangular() => Some(b.diag.norm()),
            Block::Dense(m) if m.is_upper_triangular() || m.is_lower_triangular() => {
                Some(m.diagonal().iter().map(|c| c.norm()).fold(0.0, f64::max))
            }
            _ => None,
        }
    }

    pub fn as_linear_map(&self) -> &dyn LinearMap {
        match self {
            Block::Dense(m) => m,
            Block::Band(b) => b,
        }
    }

    /// Pushes the image of `c·e_col` (local, 0-based) as global contributions.
    fn column_image(&self, col: usize, c: ComplexScalar, base: i64, out: &mut Vec<(i64, ComplexScalar)>) {
        match self {
            Block::Dense(m) => {
                for r in 0..m.rows() {
                    let a = m.get(r, col);
                    if !is_zero(a) {
                        out.push((base + r as i64, a * c));
                    }
                }
            }
            Block::Band(b) => {
                if col > 0 && !is_zero(b.sup) {
                    out.push((base + col as i64 - 1, b.sup * c));
                }
                if !is_zero(b.diag) {
                    out.push((base + col as i64, b.diag * c));
                }
                if col + 1 < b.size && !is_zero(b.sub) {
                    out.push((base + col as i64 + 1, b.sub * c));
                }
            }
        }
    }
}

/// How the blocks of a block-diagonal operator are generated.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockLayout {
    /// Block `k ≥ 1` is `(k+1)×(k+1)` with 2 on the superdiagonal (or on the
    /// subdiagonal when `transposed`). Generated on demand.
    Nest { transposed: bool },
    /// Explicit finite list; block `k` is `blocks[k-1]`.
    List { blocks: Vec<Block>, offsets: Vec<i64> },
}

/// Direct sum of square blocks placed on consecutive coordinate ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonal {
    start: i64,
    layout: BlockLayout,
}

impl BlockDiagonal {
    /// The infinite nest family starting at coordinate 1, so block `k` begins
    /// at `a_k = k(k+1)/2`.
    pub fn nest(transposed: bool) -> Self {
        Self { start: 1, layout: BlockLayout::Nest { transposed } }
    }

    /// Finite list of blocks laid out contiguously from `start`.
    pub fn from_blocks(start: i64, blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(invalid("blocks", "at least one block is required"));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut next = start;
        for b in &blocks {
            if let Block::Dense(m) = b {
                if !m.is_square() {
                    return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
                }
            }
            offsets.push(next);
            next = next
                .checked_add(b.size() as i64)
                .ok_or_else(|| invalid("blocks", "block layout overflows the index range"))?;
        }
        Ok(Self { start, layout: BlockLayout::List { blocks, offsets } })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    /// `None` for the infinite nest family.
    pub fn block_count(&self) -> Option<usize> {
        match &self.layout {
            BlockLayout::Nest { .. } => None,
            BlockLayout::List { blocks, .. } => Some(blocks.len()),
        }
    }

    fn has_block(&self, k: usize) -> bool {
        k >= 1 && self.block_count().is_none_or(|n| k <= n)
    }

    /// First global coordinate of block `k` (1-based).
    pub fn offset(&self, k: usize) -> Option<i64> {
        if !self.has_block(k) {
            return None;
        }
        match &self.layout {
            BlockLayout::Nest { .. } => {
                let k = k as i128;
                i64::try_from(self.start as i128 + k * (k + 1) / 2 - 1).ok()
            }
            BlockLayout::List { offsets, .. } => Some(offsets[k - 1]),
        }
    }

    pub fn block_size(&self, k: usize) -> Option<usize> {
        if !self.has_block(k) {
            return None;
        }
        match &self.layout {
            BlockLayout::Nest { .. } => Some(k + 1),
            BlockLayout::List { blocks, .. } => Some(blocks[k - 1].size()),
        }
    }

    /// Block `k`, generated on demand for the nest family.
    pub fn block(&self, k: usize) -> Option<Cow<'_, Block>> {
        if !self.has_block(k) {
            return None;
        }
        match &self.layout {
            BlockLayout::Nest { transposed } => {
                let two = Complex64::new(2.0, 0.0);
                let (sub, sup) = if *transposed { (two, ZERO) } else { (ZERO, two) };
                Some(Cow::Owned(Block::Band(ToeplitzBand { size: k + 1, sub, diag: ZERO, sup })))
            }
            BlockLayout::List { blocks, .. } => Some(Cow::Borrowed(&blocks[k - 1])),
        }
    }

    /// Block number and local 0-based position of a global coordinate.
    pub fn locate(&self, index: i64) -> Option<(usize, usize)> {
        if index < self.start {
            return None;
        }
        match &self.layout {
            BlockLayout::Nest { .. } => {
                // Largest k with k(k+1)/2 <= s + 1.
                let s = (index as i128 - self.start as i128) + 1;
                let tri = |k: i128| k * (k + 1) / 2;
                let mut k = ((libm::sqrt(8.0 * s as f64 + 1.0) - 1.0) / 2.0) as i128;
                while k > 1 && tri(k) > s {
                    k -= 1;
                }
                while tri(k + 1) <= s {
                    k += 1;
                }
                let local = (s - tri(k)) as usize;
                Some((k as usize, local))
            }
            BlockLayout::List { blocks, offsets } => {
                let pos = offsets.partition_point(|&o| o <= index);
                let k = pos.checked_sub(1)?;
                let local = (index - offsets[k]) as usize;
                (local < blocks[k].size()).then_some((k + 1, local))
            }
        }
    }

    /// One past the last coordinate, when finite.
    pub fn end(&self) -> Option<i64> {
        let n = self.block_count()?;
        Some(self.offset(n)? + self.block_size(n)? as i64)
    }
}

/// Tagged description of one operator.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorDescription {
    BilateralShift(WeightRule),
    UnilateralShift {
        weights: WeightRule,
        direction: ShiftDirection,
    },
    Diagonal(DiagonalRule),
    /// Acts on coordinates `1..=n`.
    Finite(DenseMatrix),
    /// `J_n(μ)`: μ on the diagonal and 1 on the superdiagonal, coordinates `1..=n`.
    Jordan {
        mu: ComplexScalar,
        n: usize,
    },
    BlockDiagonal(BlockDiagonal),
}

impl OperatorDescription {
    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorDescription::BilateralShift(w) => w.validate(),
            OperatorDescription::UnilateralShift { weights, .. } => weights.validate(),
            OperatorDescription::Diagonal(d) => d.validate(),
            OperatorDescription::Finite(m) if !m.is_square() => {
                Err(Error::NonSquare { rows: m.rows(), cols: m.cols() })
            }
            OperatorDescription::Finite(_) => Ok(()),
            OperatorDescription::Jordan { n: 0, .. } => Err(invalid("n", "Jordan block size must be at least 1")),
            OperatorDescription::Jordan { mu, .. } if !is_finite(*mu) => Err(Error::NonFinite("Jordan eigenvalue")),
            OperatorDescription::Jordan { .. } | OperatorDescription::BlockDiagonal(_) => Ok(()),
        }
    }

    pub fn jordan_band(mu: ComplexScalar, n: usize) -> ToeplitzBand {
        ToeplitzBand { size: n, sub: ZERO, diag: mu, sup: ONE }
    }

    /// Whether coordinate `index` belongs to the operator's domain.
    pub fn contains_index(&self, index: i64) -> bool {
        match self {
            OperatorDescription::BilateralShift(_) | OperatorDescription::Diagonal(_) => true,
            OperatorDescription::UnilateralShift { .. } => index >= 0,
            OperatorDescription::Finite(m) => index >= 1 && index <= m.rows() as i64,
            OperatorDescription::Jordan { n, .. } => index >= 1 && index <= *n as i64,
            OperatorDescription::BlockDiagonal(bd) => bd.locate(index).is_some(),
        }
    }

    pub fn check_support(&self, v: &SparseVector) -> Result<()> {
        match v.iter().find(|&(i, _)| !self.contains_index(i)) {
            Some((index, _)) => Err(Error::OutOfRange { index }),
            None => Ok(()),
        }
    }

    /// Exact image `T v`.
    pub fn apply(&self, v: &SparseVector) -> Result<SparseVector> {
        self.check_support(v)?;
        let mut contributions: Vec<(i64, ComplexScalar)> = Vec::with_capacity(v.nnz() * 2);
        match self {
            OperatorDescription::BilateralShift(w) => {
                for (n, c) in v.iter() {
                    let target = n.checked_add(1).ok_or(Error::OutOfRange { index: n })?;
                    contributions.push((target, c * w.weight(n)));
                }
            }
            OperatorDescription::UnilateralShift { weights, direction } => {
                for (n, c) in v.iter() {
                    let target = match direction {
                        ShiftDirection::Forward => n.checked_add(1).ok_or(Error::OutOfRange { index: n })?,
                        ShiftDirection::Backward if n == 0 => continue,
                        ShiftDirection::Backward => n - 1,
                    };
                    contributions.push((target, c * weights.weight(n)));
                }
            }
            OperatorDescription::Diagonal(d) => {
                for (n, c) in v.iter() {
                    contributions.push((n, d.value(n) * c));
                }
            }
            OperatorDescription::Finite(m) => {
                let block = Block::Dense(m.clone());
                for (n, c) in v.iter() {
                    block.column_image(n as usize - 1, c, 1, &mut contributions);
                }
            }
            OperatorDescription::Jordan { mu, n } => {
                let block = Block::Band(Self::jordan_band(*mu, *n));
                for (i, c) in v.iter() {
                    block.column_image(i as usize - 1, c, 1, &mut contributions);
                }
            }
            OperatorDescription::BlockDiagonal(bd) => {
                for (i, c) in v.iter() {
                    let (k, local) = bd.locate(i).ok_or(Error::OutOfRange { index: i })?;
                    let base = bd.offset(k).expect("located block has an offset");
                    let block = bd.block(k).expect("located block exists");
                    block.column_image(local, c, base, &mut contributions);
                }
            }
        }
        accumulate(contributions)
    }

    /// `max |λ|` over the spectrum of the smallest obviously invariant
    /// triangular piece containing `support`, if there is one.
    ///
    /// Used to certify `‖Tᵏ x‖ → 0` when the orbit stays in a finite
    /// triangular block (or on the support of a diagonal operator).
    pub fn local_spectral_radius(&self, support: &SparseVector) -> Option<f64> {
        match self {
            OperatorDescription::BilateralShift(_) | OperatorDescription::UnilateralShift { .. } => None,
            OperatorDescription::Diagonal(d) => {
                Some(support.iter().map(|(j, _)| d.value(j).norm()).fold(0.0, f64::max))
            }
            OperatorDescription::Finite(m) => Block::Dense(m.clone()).triangular_radius(),
            OperatorDescription::Jordan { mu, .. } => Some(mu.norm()),
            OperatorDescription::BlockDiagonal(bd) => {
                let mut radius = 0.0_f64;
                let mut last = None;
                for (i, _) in support.iter() {
                    let (k, _) = bd.locate(i)?;
                    if last == Some(k) {
                        continue;
                    }
                    last = Some(k);
                    radius = radius.max(bd.block(k)?.triangular_radius()?);
                }
                Some(radius)
            }
        }
    }
}

/// Sums contributions per target in the order they were produced.
fn accumulate(mut contributions: Vec<(i64, ComplexScalar)>) -> Result<SparseVector> {
    contributions.sort_by_key(|&(i, _)| i);
    let mut out: Vec<(i64, ComplexScalar)> = Vec::with_capacity(contributions.len());
    for (i, c) in contributions {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += c,
            _ => out.push((i, c)),
        }
    }
    if out.iter().any(|&(_, c)| !is_finite(c)) {
        return Err(Error::NonFinite("operator image"));
    }
    Ok(SparseVector::from_sorted(out))
}

/// `T v`.
pub fn apply(op: &OperatorDescription, v: &SparseVector) -> Result<SparseVector> {
    op.apply(v)
}

/// `[‖v‖, ‖Tv‖, …, ‖Tᴺv‖]` by iterated application.
pub fn orbit_norms(op: &OperatorDescription, v: &SparseVector, steps: usize) -> Result<Vec<f64>> {
    let mut orbit = Orbit::new(op, v)?;
    let mut norms = Vec::with_capacity(steps + 1);
    norms.push(orbit.norm());
    for _ in 0..steps {
        orbit.advance()?;
        norms.push(orbit.norm());
    }
    Ok(norms)
}

/// Compression of `op` to coordinates `lo..=hi`.
///
/// Coordinates outside the operator's domain give zero rows and columns.
pub fn truncate(op: &OperatorDescription, lo: i64, hi: i64) -> Result<DenseMatrix> {
    if lo > hi {
        return Err(invalid("lo", "lower coordinate exceeds upper coordinate"));
    }
    let n = usize::try_from(hi - lo + 1).map_err(|_| invalid("hi", "range too large"))?;
    let mut data = vec![ZERO; n * n];
    for c in 0..n {
        let j = lo + c as i64;
        if !op.contains_index(j) {
            continue;
        }
        for (i, value) in op.apply(&SparseVector::basis(j))?.iter() {
            if (lo..=hi).contains(&i) {
                data[(i - lo) as usize * n + c] = value;
            }
        }
    }
    DenseMatrix::new(n, n, data)
}

/// Block-local state of an orbit.
#[derive(Debug, Clone)]
enum Part<'a> {
    /// Generic sparse iteration through [`OperatorDescription::apply`].
    Sparse(SparseVector),
    /// Run-length encoded state of a band block: `(length, value)` runs
    /// covering the block, adjacent values distinct.
    Runs {
        base: i64,
        band: ToeplitzBand,
        runs: Vec<(usize, ComplexScalar)>,
    },
    /// Plain dense state of a band block, used once runs stop compressing.
    BandDense {
        base: i64,
        band: ToeplitzBand,
        v: Vec<ComplexScalar>,
        scratch: Vec<ComplexScalar>,
    },
    Dense {
        base: i64,
        matrix: Cow<'a, DenseMatrix>,
        v: Vec<ComplexScalar>,
    },
}

fn push_run(runs: &mut Vec<(usize, ComplexScalar)>, len: usize, value: ComplexScalar) {
    match runs.last_mut() {
        Some((l, v)) if *v == value => *l += len,
        _ => runs.push((len, value)),
    }
}

fn band_runs_step(band: &ToeplitzBand, runs: &[(usize, ComplexScalar)]) -> Vec<(usize, ComplexScalar)> {
    let mut out = Vec::with_capacity(runs.len() + 2);
    for (q, &(len, v)) in runs.iter().enumerate() {
        let prev = if q > 0 { Some(runs[q - 1].1) } else { None };
        let next = runs.get(q + 1).map(|r| r.1);
        if len == 1 {
            push_run(&mut out, 1, band.combine(prev, v, next));
            continue;
        }
        push_run(&mut out, 1, band.combine(prev, v, Some(v)));
        if len > 2 {
            push_run(&mut out, len - 2, band.combine(Some(v), v, Some(v)));
        }
        push_run(&mut out, 1, band.combine(Some(v), v, next));
    }
    out
}

fn runs_from_dense(v: &[ComplexScalar]) -> Vec<(usize, ComplexScalar)> {
    let mut runs = Vec::new();
    for &c in v {
        push_run(&mut runs, 1, c);
    }
    runs
}

impl Part<'_> {
    /// `Σ|s·c|²`; `s` is 1 except when rescaling around overflow.
    fn norm_sqr(&self, s: f64) -> f64 {
        match self {
            Part::Sparse(v) => v.iter().map(|(_, c)| (c * s).norm_sqr()).sum(),
            Part::Runs { runs, .. } => runs.iter().map(|&(len, c)| len as f64 * (c * s).norm_sqr()).sum(),
            Part::BandDense { v, .. } | Part::Dense { v, .. } => v.iter().map(|&c| (c * s).norm_sqr()).sum(),
        }
    }

    fn max_abs(&self) -> f64 {
        let top = |it: &mut dyn Iterator<Item = ComplexScalar>| it.map(|c| c.norm()).fold(0.0, f64::max);
        match self {
            Part::Sparse(v) => top(&mut v.iter().map(|(_, c)| c)),
            Part::Runs { runs, .. } => top(&mut runs.iter().map(|&(_, c)| c)),
            Part::BandDense { v, .. } | Part::Dense { v, .. } => top(&mut v.iter().copied()),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Part::Sparse(v) => v.is_zero(),
            Part::Runs { runs, .. } => runs.iter().all(|&(_, c)| is_zero(c)),
            Part::BandDense { v, .. } | Part::Dense { v, .. } => v.iter().all(|&c| is_zero(c)),
        }
    }

    fn entries(&self, out: &mut Vec<(i64, ComplexScalar)>) {
        match self {
            Part::Sparse(v) => out.extend(v.iter()),
            Part::Runs { base, runs, .. } => {
                let mut pos = *base;
                for &(len, c) in runs {
                    if !is_zero(c) {
                        out.extend((0..len as i64).map(|k| (pos + k, c)));
                    }
                    pos += len as i64;
                }
            }
            Part::BandDense { base, v, .. } | Part::Dense { base, v, .. } => {
                out.extend(v.iter().enumerate().filter(|(_, c)| !is_zero(**c)).map(|(k, &c)| (base + k as i64, c)));
            }
        }
    }

    fn advance(&mut self, op: &OperatorDescription) -> Result<()> {
        match self {
            Part::Sparse(v) => *v = op.apply(v)?,
            Part::Runs { base, band, runs } => {
                let next = band_runs_step(band, runs);
                if next.len() > 64 && 2 * next.len() > band.size {
                    let mut v = Vec::with_capacity(band.size);
                    for &(len, c) in &next {
                        v.extend(core::iter::repeat_n(c, len));
                    }
                    let scratch = vec![ZERO; band.size];
                    *self = Part::BandDense { base: *base, band: *band, v, scratch };
                } else {
                    *runs = next;
                }
            }
            Part::BandDense { band, v, scratch, .. } => {
                band.step_dense(v, scratch);
                core::mem::swap(v, scratch);
            }
            Part::Dense { matrix, v, .. } => *v = matrix.mul_vec(v)?,
        }
        Ok(())
    }
}

/// Lazily advanced orbit `v, Tv, T²v, …`.
///
/// Vectors inside band blocks are tracked run-length encoded, which keeps
/// witnesses such as the all-ones vector of a large `(1-ε)I + S` block cheap
/// to iterate. Block-diagonal orbits are split per block.
#[derive(Debug, Clone)]
pub struct Orbit<'a> {
    op: &'a OperatorDescription,
    parts: Vec<Part<'a>>,
    step: usize,
    norm: f64,
}

impl<'a> Orbit<'a> {
    pub fn new(op: &'a OperatorDescription, v: &SparseVector) -> Result<Self> {
        op.check_support(v)?;
        let band_part = |base: i64, band: ToeplitzBand, local: &SparseVector| -> Part<'a> {
            let dense = local.to_dense(base, band.size);
            Part::Runs { base, band, runs: runs_from_dense(&dense) }
        };
        let parts = match op {
            OperatorDescription::Jordan { mu, n } if !v.is_zero() => {
                vec![band_part(1, OperatorDescription::jordan_band(*mu, *n), v)]
            }
            OperatorDescription::Finite(m) if !v.is_zero() => {
                vec![Part::Dense { base: 1, matrix: Cow::Borrowed(m), v: v.to_dense(1, m.rows()) }]
            }
            OperatorDescription::BlockDiagonal(bd) if !v.is_zero() => {
                let mut parts = Vec::new();
                let entries = v.entries();
                let mut start = 0;
                while start < entries.len() {
                    let (k, _) = bd.locate(entries[start].0).ok_or(Error::OutOfRange { index: entries[start].0 })?;
                    let base = bd.offset(k).expect("block offset");
                    let size = bd.block_size(k).expect("block size");
                    let end = start + entries[start..].partition_point(|&(i, _)| i < base + size as i64);
                    let local = SparseVector::from_sorted(entries[start..end].to_vec());
                    parts.push(match bd.block(k).expect("block") {
                        Cow::Owned(Block::Band(b)) => band_part(base, b, &local),
                        Cow::Borrowed(Block::Band(b)) => band_part(base, *b, &local),
                        Cow::Borrowed(Block::Dense(m)) => {
                            Part::Dense { base, matrix: Cow::Borrowed(m), v: local.to_dense(base, size) }
                        }
                        Cow::Owned(Block::Dense(m)) => {
                            let v = local.to_dense(base, size);
                            Part::Dense { base, matrix: Cow::Owned(m), v }
                        }
                    });
                    start = end;
                }
                parts
            }
            _ => vec![Part::Sparse(v.clone())],
        };
        let mut orbit = Self { op, parts, step: 0, norm: 0.0 };
        orbit.refresh_norm()?;
        Ok(orbit)
    }

    fn refresh_norm(&mut self) -> Result<()> {
        let parts = &self.parts;
        let norm = guarded_norm(
            parts.iter().map(|p| p.norm_sqr(1.0)).sum(),
            || parts.iter().map(Part::max_abs).fold(0.0, f64::max),
            |s| parts.iter().map(|p| p.norm_sqr(s)).sum(),
        );
        if !norm.is_finite() {
            return Err(Error::Overflow { step: self.step });
        }
        self.norm = norm;
        Ok(())
    }

    /// Number of applications performed so far.
    pub fn step(&self) -> usize {
        self.step
    }

    /// `‖Tᵏ v‖` at the current step `k`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Whether the current iterate is exactly zero (and so are all later ones).
    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Part::is_zero)
    }

    pub fn advance(&mut self) -> Result<()> {
        if !self.is_zero() {
            for part in &mut self.parts {
                part.advance(self.op)?;
            }
        }
        self.step += 1;
        self.refresh_norm()
    }

    /// Current iterate as a sparse vector.
    pub fn vector(&self) -> SparseVector {
        let mut entries = Vec::new();
        for part in &self.parts {
            part.entries(&mut entries);
        }
        SparseVector::from_sorted(entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::mat_pow;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> ComplexScalar {
        Complex64::new(re, im)
    }

    fn real(x: f64) -> ComplexScalar {
        c(x, 0.0)
    }

    #[test]
    fn paper_weight_rules() {
        let w1 = WeightRule::PaperExample1;
        assert_eq!(w1.weight(0), 2.0);
        assert_eq!(w1.weight(17), 2.0);
        assert_eq!(w1.weight(-1), 0.0);
        assert_eq!(w1.weight(-3), 2.0 / 3.0);
        let w2 = WeightRule::PaperExample2;
        assert_eq!(w2.weight(0), 2.0);
        assert_eq!(w2.weight(2), 4.0 / 3.0);
        assert_eq!(w2.weight(-1), 0.0);
        assert_eq!(w2.weight(-4), 0.75);
    }

    #[test]
    fn apply_examples() {
        for w in [WeightRule::PaperExample1, WeightRule::PaperExample2] {
            let op = OperatorDescription::BilateralShift(w);
            assert!(op.apply(&SparseVector::basis(-1)).unwrap().is_zero());
        }

        let j = OperatorDescription::Jordan { mu: ONE, n: 2 };
        let image = j.apply(&SparseVector::basis(2)).unwrap();
        assert_eq!(image, SparseVector::from_real([(1, 1.0), (2, 1.0)]).unwrap());

        let half = OperatorDescription::Diagonal(DiagonalRule::Constant(real(0.5)));
        let v = SparseVector::from_entries([(-4, c(1.0, 2.0)), (3, c(-3.0, 0.5))]).unwrap();
        assert_eq!(half.apply(&v).unwrap(), v.scale(real(0.5)));
    }

    #[test]
    fn apply_rejects_out_of_range_support() {
        let j = OperatorDescription::Jordan { mu: ONE, n: 3 };
        assert_eq!(j.apply(&SparseVector::basis(4)), Err(Error::OutOfRange { index: 4 }));
        let u = OperatorDescription::UnilateralShift {
            weights: WeightRule::Constant(1.0),
            direction: ShiftDirection::Forward,
        };
        assert_eq!(u.apply(&SparseVector::basis(-1)), Err(Error::OutOfRange { index: -1 }));
        let nest = OperatorDescription::BlockDiagonal(BlockDiagonal::nest(false));
        assert_eq!(nest.apply(&SparseVector::basis(0)), Err(Error::OutOfRange { index: 0 }));
    }

    #[test]
    fn backward_unilateral_kills_origin() {
        let u = OperatorDescription::UnilateralShift {
            weights: WeightRule::Constant(3.0),
            direction: ShiftDirection::Backward,
        };
        assert!(u.apply(&SparseVector::basis(0)).unwrap().is_zero());
        assert_eq!(u.apply(&SparseVector::basis(2)).unwrap(), SparseVector::from_real([(1, 3.0)]).unwrap());
    }

    #[test]
    fn orbit_examples() {
        // ‖Tⁿ e_0‖ = Π_{j<n} (j+2)/(j+1) = n+1.
        let ex2 = OperatorDescription::BilateralShift(WeightRule::PaperExample2);
        let norms = orbit_norms(&ex2, &SparseVector::basis(0), 3).unwrap();
        let telescoped: Vec<f64> =
            (0..=3).map(|n| (0..n).map(|j| (j as f64 + 2.0) / (j as f64 + 1.0)).product()).collect();
        assert_eq!(norms, telescoped);
        for (a, b) in norms.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((a - b).abs() < 1e-15);
        }

        let ex1 = OperatorDescription::BilateralShift(WeightRule::PaperExample1);
        let norms = orbit_norms(&ex1, &SparseVector::basis(-3), 2).unwrap();
        assert_eq!(norms, vec![1.0, 2.0 / 3.0, 2.0 / 3.0 * 0.5]);

        let zero = OperatorDescription::Finite(DenseMatrix::zeros(3, 3));
        assert_eq!(orbit_norms(&zero, &SparseVector::basis(1), 2).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn truncate_examples() {
        let d = OperatorDescription::Diagonal(DiagonalRule::Affine { slope: ONE, intercept: ZERO });
        assert_eq!(truncate(&d, 0, 2).unwrap(), DenseMatrix::from_diagonal(&[real(0.0), real(1.0), real(2.0)]));

        let s = OperatorDescription::BilateralShift(WeightRule::Constant(1.0));
        assert_eq!(truncate(&s, 0, 1).unwrap(), DenseMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap());

        let nest = BlockDiagonal::nest(false);
        let lo = nest.offset(1).unwrap();
        let op = OperatorDescription::BlockDiagonal(nest);
        assert_eq!(truncate(&op, lo, lo + 1).unwrap(), DenseMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn nest_layout_offsets_and_location() {
        let nest = BlockDiagonal::nest(false);
        // a_1 = 1, a_n - a_{n-1} = n.
        let mut a = 1;
        for k in 1..200usize {
            assert_eq!(nest.offset(k), Some(a));
            assert_eq!(nest.block_size(k), Some(k + 1));
            for local in 0..=k {
                assert_eq!(nest.locate(a + local as i64), Some((k, local)));
            }
            a += k as i64 + 1;
        }
        assert_eq!(nest.locate(0), None);
        assert_eq!(nest.block(0), None);
    }

    #[test]
    fn list_layout_location() {
        let blocks =
            vec![Block::Dense(DenseMatrix::identity(2)), Block::Band(ToeplitzBand::new(3, ZERO, ONE, ONE).unwrap())];
        let bd = BlockDiagonal::from_blocks(5, blocks).unwrap();
        assert_eq!(bd.locate(4), None);
        assert_eq!(bd.locate(5), Some((1, 0)));
        assert_eq!(bd.locate(7), Some((2, 0)));
        assert_eq!(bd.locate(9), Some((2, 2)));
        assert_eq!(bd.locate(10), None);
        assert_eq!(bd.end(), Some(10));
    }

    #[test]
    fn run_length_orbit_matches_dense_iteration() {
        let band = ToeplitzBand::new(40, ZERO, real(0.975), real(0.05)).unwrap();
        let op = OperatorDescription::BlockDiagonal(BlockDiagonal::from_blocks(1, vec![Block::Band(band)]).unwrap());
        let ones = SparseVector::constant(1, 40, ONE).unwrap();
        let norms = orbit_norms(&op, &ones, 300).unwrap();
        let dense = band.to_dense();
        let x = ones.to_dense(1, 40);
        for (k, &n) in norms.iter().enumerate() {
            let y = mat_pow(&dense, k as u64).unwrap().mul_vec(&x).unwrap();
            let exact: f64 = libm::sqrt(y.iter().map(|c| c.norm_sqr()).sum());
            assert!((n - exact).abs() <= 1e-10 * exact, "step {k}: {n} vs {exact}");
        }
    }

    #[test]
    fn run_length_state_falls_back_to_dense() {
        // Alternating data never compresses, forcing the dense representation.
        let band = ToeplitzBand::new(300, real(0.3), real(0.5), real(-0.2)).unwrap();
        let op = OperatorDescription::BlockDiagonal(BlockDiagonal::from_blocks(1, vec![Block::Band(band)]).unwrap());
        let v = SparseVector::from_real((1..=300).map(|i| (i, if i % 2 == 0 { 1.0 } else { -0.5 + i as f64 * 1e-3 })))
            .unwrap();
        let mut orbit = Orbit::new(&op, &v).unwrap();
        let mut sparse = v.clone();
        for _ in 0..20 {
            orbit.advance().unwrap();
            sparse = op.apply(&sparse).unwrap();
            let diff = orbit.vector().sub(&sparse).norm();
            assert!(diff <= 1e-13 * sparse.norm());
        }
    }

    fn random_finite(n: usize, entries: &[(f64, f64)]) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |r, col| {
            let (re, im) = entries[r * 6 + col];
            c(re, im)
        })
    }

    proptest! {
        #[test]
        fn apply_is_linear(
            xs in proptest::collection::vec((-5i64..5, -2.0..2.0f64), 0..8),
            ys in proptest::collection::vec((-5i64..5, -2.0..2.0f64), 0..8),
            a in -3.0..3.0f64,
            b in -3.0..3.0f64,
            which in 0usize..4,
        ) {
            let dedup = |v: Vec<(i64, f64)>| {
                let map: BTreeMap<i64, f64> = v.into_iter().collect();
                SparseVector::from_real(map).unwrap()
            };
            let (x, y) = (dedup(xs), dedup(ys));
            let op = match which {
                0 => OperatorDescription::BilateralShift(WeightRule::PaperExample1),
                1 => OperatorDescription::BilateralShift(WeightRule::PaperExample2),
                2 => OperatorDescription::Diagonal(DiagonalRule::Affine { slope: c(0.5, 0.25), intercept: real(-1.0) }),
                _ => OperatorDescription::UnilateralShift { weights: WeightRule::Constant(1.5), direction: ShiftDirection::Backward },
            };
            if op.check_support(&x).is_err() || op.check_support(&y).is_err() {
                return Ok(());
            }
            let lhs = op.apply(&x.combine(real(a), &y, real(b))).unwrap();
            let rhs = op.apply(&x).unwrap().combine(real(a), &op.apply(&y).unwrap(), real(b));
            let scale = lhs.norm().max(rhs.norm()).max(1e-300);
            prop_assert!(lhs.sub(&rhs).norm() <= 1e-12 * scale);
        }

        #[test]
        fn finite_orbit_matches_matrix_powers(
            n in 1usize..6,
            entries in proptest::collection::vec((-0.8..0.8f64, -0.8..0.8f64), 36),
            x in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6),
        ) {
            let a = random_finite(n, &entries);
            let v = SparseVector::from_entries((0..n).map(|k| (k as i64 + 1, c(x[k].0, x[k].1)))).unwrap();
            let op = OperatorDescription::Finite(a.clone());
            let norms = orbit_norms(&op, &v, 50).unwrap();
            let dense = v.to_dense(1, n);
            for (i, &got) in norms.iter().enumerate() {
                let y = mat_pow(&a, i as u64).unwrap().mul_vec(&dense).unwrap();
                let exact = libm::sqrt(y.iter().map(|z| z.norm_sqr()).sum());
                prop_assert!((got - exact).abs() <= 1e-10 * exact.max(1e-300));
            }
        }

        #[test]
        fn block_orbits_stay_in_their_block(k in 1usize..30, local in 0usize..30, steps in 1usize..40) {
            let nest = BlockDiagonal::nest(false);
            let local = local % (k + 1);
            let base = nest.offset(k).unwrap();
            let size = nest.block_size(k).unwrap() as i64;
            let op = OperatorDescription::BlockDiagonal(nest);
            let mut v = SparseVector::basis(base + local as i64);
            for _ in 0..steps {
                v = op.apply(&v).unwrap();
                if let Some((lo, hi)) = v.support_bounds() {
                    prop_assert!(lo >= base && hi < base + size);
                }
            }
        }
    }
}
