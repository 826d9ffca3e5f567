//! Named operators together with their witness vectors.
//!
//! * the nest block operator `⊕ W_k`, `W_k` of size `k+1` with 2 on the
//!   superdiagonal, witnesses `x_m` = last basis vector of block `m`;
//! * the compact perturbation of the identity `I + K_ε = ⊕ ((1-ε_i)I + S_i)`
//!   with `ε_i = 4^{-i} ε`, `S_i` carrying `2ε_i` on the superdiagonal, and
//!   the all-ones witness of every block;
//! * the two example weighted shifts and Jordan blocks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numlin::{ComplexScalar, DenseMatrix, SparseVector, ONE, ZERO};
use crate::operators::{Block, BlockDiagonal, OperatorDescription, ToeplitzBand, WeightRule};

/// Witness vectors keyed by `m` (or by block index).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WitnessSet(pub BTreeMap<usize, SparseVector>);

impl WitnessSet {
    pub fn get(&self, m: usize) -> Option<&SparseVector> {
        self.0.get(&m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &SparseVector)> {
        self.0.iter().map(|(&m, v)| (m, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, m: usize, x: SparseVector) -> Result<()> {
        if x.is_zero() {
            return Err(invalid("witness", format!("witness for m = {m} is zero")));
        }
        self.0.insert(m, x);
        Ok(())
    }
}

/// The block-diagonal operator built from a nest.
#[derive(Debug, Clone, PartialEq)]
pub struct NestConstruction {
    pub operator: OperatorDescription,
    pub transposed: bool,
}

impl NestConstruction {
    fn layout(&self) -> &BlockDiagonal {
        match &self.operator {
            OperatorDescription::BlockDiagonal(bd) => bd,
            _ => unreachable!("nest construction is block diagonal"),
        }
    }

    /// `x_m`: last basis vector of block `m` (first one when transposed).
    pub fn witness(&self, m: usize) -> SparseVector {
        let bd = self.layout();
        let base = bd.offset(m).expect("nest blocks exist for every m >= 1");
        SparseVector::basis(if self.transposed { base } else { base + m as i64 })
    }

    pub fn witnesses(&self, ms: impl IntoIterator<Item = usize>) -> WitnessSet {
        WitnessSet(ms.into_iter().map(|m| (m, self.witness(m))).collect())
    }
}

/// `⊕_k W_k` with blocks at offsets `a_1 = 1`, `a_n - a_{n-1} = n`.
///
/// With `transposed` the 2s sit on the subdiagonal, matching the second case
/// of the construction; the witness then starts at the top of each block.
pub fn nest_block_operator(transposed: bool) -> NestConstruction {
    NestConstruction { operator: OperatorDescription::BlockDiagonal(BlockDiagonal::nest(transposed)), transposed }
}

pub fn example_shift_1() -> OperatorDescription {
    OperatorDescription::BilateralShift(WeightRule::PaperExample1)
}

pub fn example_shift_2() -> OperatorDescription {
    OperatorDescription::BilateralShift(WeightRule::PaperExample2)
}

pub fn jordan(mu: ComplexScalar, n: usize) -> Result<OperatorDescription> {
    let op = OperatorDescription::Jordan { mu, n };
    op.validate()?;
    Ok(op)
}

/// Growth thresholds `C_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum CRule {
    /// `C_i = i`.
    Linear,
    /// `C_i = √i`.
    Sqrt,
    /// `C_i = values[i-1]`.
    Table(Vec<f64>),
}

impl CRule {
    pub fn value(&self, i: usize) -> Option<f64> {
        match self {
            CRule::Linear => Some(i as f64),
            CRule::Sqrt => Some(libm::sqrt(i as f64)),
            CRule::Table(values) => values.get(i.checked_sub(1)?).copied(),
        }
    }

    /// Checks positivity and strict increase on `1..=count`.
    pub fn check(&self, count: usize) -> Result<Vec<f64>> {
        let mut values = Vec::with_capacity(count);
        for i in 1..=count {
            let c = self.value(i).ok_or_else(|| invalid("C", format!("no value for block {i}")))?;
            if !(c.is_finite() && c > 0.0) {
                return Err(invalid("C", format!("C_{i} = {c} is not a positive finite number")));
            }
            if values.last().is_some_and(|&prev| c <= prev) {
                return Err(invalid("C", format!("C must be strictly increasing (C_{i} = {c})")));
            }
            values.push(c);
        }
        Ok(values)
    }
}

/// Parameters of block `i` of `I + K_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkBlockParams {
    pub index: usize,
    /// `ε_i = 4^{-i} ε`.
    pub eps: f64,
    /// Least `L` with `(1+ε_i)^L ≥ √2 C_i`.
    pub big_l: u64,
    /// Least `m` with `L_i/m < 1/i`.
    pub m: u64,
    /// Block dimension `2 m_i`.
    pub n: u64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IkEpsilonParams {
    pub epsilon: f64,
    pub blocks: Vec<IkBlockParams>,
}

impl IkEpsilonParams {
    pub fn block(&self, i: usize) -> Option<&IkBlockParams> {
        self.blocks.get(i.checked_sub(1)?)
    }
}

/// Everything produced by [`build_ik_epsilon`].
#[derive(Debug, Clone, PartialEq)]
pub struct IkEpsilon {
    /// `I + K_ε` over the materialized blocks.
    pub operator: OperatorDescription,
    /// `K_ε = ⊕ (-ε_i I + S_i)`.
    pub compact: OperatorDescription,
    /// All-ones vector of block `i`, keyed by `i`.
    pub witnesses: WitnessSet,
    pub params: IkEpsilonParams,
}

/// Least positive integer `L` with `base^L ≥ target`.
fn least_exponent(base: f64, target: f64) -> u64 {
    let reaches = |l: u64| libm::pow(base, l as f64) >= target;
    if reaches(1) {
        return 1;
    }
    let mut l = libm::ceil(libm::log(target) / libm::log(base)).max(1.0) as u64;
    while l > 1 && reaches(l - 1) {
        l -= 1;
    }
    while !reaches(l) {
        l += 1;
    }
    l
}

/// Block parameters with `L_i`, `m_i` chosen as the least admissible integers.
pub fn ik_epsilon_params(epsilon: f64, c_rule: &CRule, block_count: usize) -> Result<IkEpsilonParams> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(invalid("epsilon", "must be a positive finite number"));
    }
    if block_count == 0 {
        return Err(invalid("block_count", "must be positive"));
    }
    let cs = c_rule.check(block_count)?;
    let blocks = cs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let i = k + 1;
            let eps = libm::scalbn(epsilon, -2 * i as i32);
            let big_l = least_exponent(1.0 + eps, core::f64::consts::SQRT_2 * c);
            let m = big_l * i as u64 + 1;
            IkBlockParams { index: i, eps, big_l, m, n: 2 * m, c }
        })
        .collect();
    Ok(IkEpsilonParams { epsilon, blocks })
}

fn real(x: f64) -> ComplexScalar {
    Complex64::new(x, 0.0)
}

fn perturbed_block(p: &IkBlockParams) -> Block {
    Block::Band(ToeplitzBand { size: p.n as usize, sub: ZERO, diag: real(1.0 - p.eps), sup: real(2.0 * p.eps) })
}

fn compact_block(p: &IkBlockParams) -> Block {
    Block::Band(ToeplitzBand { size: p.n as usize, sub: ZERO, diag: real(-p.eps), sup: real(2.0 * p.eps) })
}

fn identity_block(p: &IkBlockParams) -> Block {
    Block::Band(ToeplitzBand { size: p.n as usize, sub: ZERO, diag: ONE, sup: ZERO })
}

fn check_block_count(params: &IkEpsilonParams, name: &'static str, count: usize) -> Result<()> {
    if count > params.blocks.len() {
        return Err(invalid(name, format!("{count} exceeds the {} materialized blocks", params.blocks.len())));
    }
    Ok(())
}

fn ik_blocks(params: &IkEpsilonParams, perturbed: impl Fn(usize) -> bool) -> Result<OperatorDescription> {
    let blocks =
        params.blocks.iter().map(|p| if perturbed(p.index) { perturbed_block(p) } else { identity_block(p) }).collect();
    Ok(OperatorDescription::BlockDiagonal(BlockDiagonal::from_blocks(1, blocks)?))
}

/// `I + K_ε` with the first `identity_prefix` blocks replaced by identities,
/// i.e. `I + K̃_i` for `i = identity_prefix`.
pub fn ik_epsilon_operator(params: &IkEpsilonParams, identity_prefix: usize) -> Result<OperatorDescription> {
    check_block_count(params, "i", identity_prefix)?;
    ik_blocks(params, |k| k > identity_prefix)
}

/// `K_ε` alone.
pub fn ik_epsilon_compact(params: &IkEpsilonParams) -> Result<OperatorDescription> {
    let blocks = params.blocks.iter().map(compact_block).collect();
    Ok(OperatorDescription::BlockDiagonal(BlockDiagonal::from_blocks(1, blocks)?))
}

/// All-ones witnesses of every block of `operator` (built from `params`).
pub fn ik_epsilon_witnesses(params: &IkEpsilonParams) -> Result<WitnessSet> {
    let mut set = WitnessSet::default();
    let mut start = 1_i64;
    for p in &params.blocks {
        set.insert(p.index, SparseVector::constant(start, p.n as usize, ONE)?)?;
        start += p.n as i64;
    }
    Ok(set)
}

/// Materializes `block_count` blocks of `I + K_ε`.
pub fn build_ik_epsilon(epsilon: f64, c_rule: &CRule, block_count: usize) -> Result<IkEpsilon> {
    let params = ik_epsilon_params(epsilon, c_rule, block_count)?;
    Ok(IkEpsilon {
        operator: ik_epsilon_operator(&params, 0)?,
        compact: ik_epsilon_compact(&params)?,
        witnesses: ik_epsilon_witnesses(&params)?,
        params,
    })
}

/// `(I + K_ε) - K̃_i` where `K̃_i = 0 ⊕ … ⊕ 0 ⊕ K_{i+1} ⊕ K_{i+2} ⊕ …`:
/// blocks `1..=i` keep their perturbation, every later block is the identity.
pub fn ik_epsilon_truncated_perturbation(params: &IkEpsilonParams, i: usize) -> Result<OperatorDescription> {
    check_block_count(params, "i", i)?;
    ik_blocks(params, |k| k <= i)
}

/// `binom(m, t)` in floating point; exact while the value fits in 53 bits.
pub fn binomial(m: u64, t: u64) -> f64 {
    if t > m {
        return 0.0;
    }
    let t = t.min(m - t);
    let mut acc = 1.0_f64;
    for s in 1..=t {
        acc = acc * (m - t + s) as f64 / s as f64;
    }
    acc
}

/// `J_n(μ)^m` from the binomial expansion: entry `(j, k)` is
/// `binom(m, k-j) μ^{m-(k-j)}` above the diagonal, zero below.
pub fn jordan_power_closed_form(mu: ComplexScalar, n: usize, m: u64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", reason: "Jordan block size must be at least 1".into() });
    }
    Ok(DenseMatrix::from_fn(n, n, |j, k| {
        if k < j {
            return ZERO;
        }
        let t = (k - j) as u64;
        if t > m {
            return ZERO;
        }
        mu.powu((m - t) as u32) * binomial(m, t)
    }))
}
