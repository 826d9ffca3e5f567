//! Certificate verification.
//!
//! A norm-unimodality certificate claims a constant `r > 1` and witnesses
//! `x_m` with `‖Tⁱ x_m‖ ≥ rⁱ ‖x_m‖` for `i = 1..m` and `‖Tᵏ x_m‖ → 0`.
//! A weak certificate claims thresholds `C_m`, lengths `N_m` and witnesses
//! whose orbits decay while the fraction of `k < N_m` with
//! `‖Tᵏ x_m‖ ≥ C_m ‖x_m‖` reaches a target.
//!
//! Decay is a limit and is checked finitely: the orbit must drop below
//! `tol·‖x‖` by step `horizon` and stay below for `hold` more steps. An
//! exactly zero iterate short-circuits. When the simulation cannot see the
//! decay, a witness living in a finite triangular block (or on the support
//! of a diagonal operator) whose diagonal moduli are all below 1 is accepted
//! on that spectral ground; the report says which route was taken.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::constructions::WitnessSet;
use crate::error::{invalid, Error, Result};
use crate::numlin::{op_norm_estimate, ComplexScalar, DenseMatrix, NormEstimate, SparseVector};
use crate::operators::{Block, BlockDiagonal, BlockLayout, OperatorDescription, Orbit};

/// Relative slack applied to the required side of every growth inequality.
pub const GROWTH_SLACK: f64 = 1e-9;
/// Relative slack for the similarity-transfer inequality.
pub const SIMILARITY_SLACK: f64 = 1e-8;
/// Absolute tolerance when comparing a fraction with its target.
pub const FRACTION_TOL: f64 = 1e-12;
/// Largest accepted condition estimate `‖C‖·‖C⁻¹‖`.
pub const CONDITION_CAP: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPolicy {
    pub tol: f64,
    pub horizon: usize,
    pub hold: usize,
    pub spectral_fallback: bool,
}

impl Default for DecayPolicy {
    fn default() -> Self {
        Self { tol: 1e-6, horizon: 100_000, hold: 100, spectral_fallback: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayOutcome {
    /// `Tᵏ x = 0` exactly from this step on.
    ExactZero {
        step: usize,
    },
    /// Below `tol·‖x‖` from this step for at least `hold` further steps.
    BelowTolerance {
        step: usize,
    },
    /// Not observed numerically, but the witness lives in an invariant
    /// triangular piece with spectral radius below 1.
    SpectralRadius {
        radius: f64,
    },
    NotObserved {
        horizon: usize,
        min_ratio: f64,
    },
    Overflowed {
        step: usize,
    },
}

impl DecayOutcome {
    pub fn passed(&self) -> bool {
        matches!(
            self,
            DecayOutcome::ExactZero { .. } | DecayOutcome::BelowTolerance { .. } | DecayOutcome::SpectralRadius { .. }
        )
    }
}

struct DecayTracker {
    threshold: f64,
    x_norm: f64,
    policy: DecayPolicy,
    candidate: Option<usize>,
    min_ratio: f64,
    outcome: Option<DecayOutcome>,
}

impl DecayTracker {
    fn new(x_norm: f64, policy: DecayPolicy) -> Self {
        Self {
            threshold: policy.tol * x_norm,
            x_norm,
            policy,
            candidate: None,
            min_ratio: f64::INFINITY,
            outcome: None,
        }
    }

    fn observe(&mut self, orbit: &Orbit<'_>) {
        if self.outcome.is_some() {
            return;
        }
        let step = orbit.step();
        if orbit.is_zero() {
            self.outcome = Some(DecayOutcome::ExactZero { step });
            return;
        }
        let norm = orbit.norm();
        self.min_ratio = self.min_ratio.min(norm / self.x_norm);
        if norm < self.threshold {
            if self.candidate.is_none() && step <= self.policy.horizon {
                self.candidate = Some(step);
            }
            if let Some(start) = self.candidate {
                if step >= start + self.policy.hold {
                    self.outcome = Some(DecayOutcome::BelowTolerance { step: start });
                }
            }
        } else {
            self.candidate = None;
        }
    }

    /// Nothing more can be learned by iterating further.
    fn settled(&self, step: usize) -> bool {
        self.outcome.is_some() || (self.candidate.is_none() && step >= self.policy.horizon)
    }

    fn finish(self, op: &OperatorDescription, x: &SparseVector, overflow: Option<usize>) -> DecayOutcome {
        if let Some(outcome) = self.outcome {
            return outcome;
        }
        if self.policy.spectral_fallback {
            if let Some(radius) = op.local_spectral_radius(x).filter(|&r| r < 1.0) {
                return DecayOutcome::SpectralRadius { radius };
            }
        }
        match overflow {
            Some(step) => DecayOutcome::Overflowed { step },
            None => DecayOutcome::NotObserved { horizon: self.policy.horizon, min_ratio: self.min_ratio },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub m: usize,
    pub i: usize,
    pub required: f64,
    pub achieved: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A growth inequality failed.
    Growth,
    /// The orbit was not shown to decay.
    Decay,
    /// A weak-criterion fraction fell short of its target.
    Fraction,
    /// The premise of a transfer check did not hold.
    Premise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub m: usize,
    pub kind: ViolationKind,
    pub i: Option<usize>,
    pub required: f64,
    pub achieved: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRecord {
    pub m: usize,
    pub outcome: DecayOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionRecord {
    pub m: usize,
    pub n: usize,
    pub c: f64,
    pub count: usize,
    pub fraction: f64,
    pub target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionRecord {
    pub norm_c: NormEstimate,
    pub norm_c_inv: NormEstimate,
    /// `‖C‖·‖C⁻¹‖` from the estimates; used in the inequality.
    pub kappa: f64,
    /// Product of the guaranteed upper bounds.
    pub kappa_upper: f64,
}

/// Outcome of a verifier. `verdict` is `Pass` iff `violations` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub verdict: Verdict,
    pub margins: Vec<Margin>,
    pub violations: Vec<Violation>,
    pub decay: Vec<DecayRecord>,
    pub fractions: Vec<FractionRecord>,
    pub witness_verdicts: Vec<(usize, Verdict)>,
    pub condition: Option<ConditionRecord>,
}

impl CertificateReport {
    fn new() -> Self {
        Self {
            verdict: Verdict::Pass,
            margins: Vec::new(),
            violations: Vec::new(),
            decay: Vec::new(),
            fractions: Vec::new(),
            witness_verdicts: Vec::new(),
            condition: None,
        }
    }

    fn seal(mut self) -> Self {
        self.verdict = if self.violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
        for (m, verdict) in &mut self.witness_verdicts {
            if self.violations.iter().any(|v| v.m == *m) {
                *verdict = Verdict::Fail;
            }
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn witness_verdict(&self, m: usize) -> Option<Verdict> {
        self.witness_verdicts.iter().find(|(k, _)| *k == m).map(|&(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NUCertificate {
    pub r: f64,
    pub witnesses: WitnessSet,
    /// Claimed values of `m`; each needs a witness.
    pub claimed: Vec<usize>,
    pub decay: DecayPolicy,
}

impl NUCertificate {
    /// Claims every `m` for which a witness is supplied.
    pub fn new(r: f64, witnesses: WitnessSet) -> Self {
        let claimed = witnesses.iter().map(|(m, _)| m).collect();
        Self { r, witnesses, claimed, decay: DecayPolicy::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WNUCertificate {
    pub c: BTreeMap<usize, f64>,
    pub n: BTreeMap<usize, usize>,
    pub witnesses: WitnessSet,
    pub targets: BTreeMap<usize, f64>,
    pub decay: DecayPolicy,
}

fn check_policy(p: &DecayPolicy) -> Result<()> {
    if !(p.tol.is_finite() && p.tol > 0.0) {
        return Err(invalid("decay_tol", "must be positive"));
    }
    if p.horizon == 0 {
        return Err(invalid("horizon", "must be positive"));
    }
    Ok(())
}

fn witness(set: &WitnessSet, m: usize) -> Result<&SparseVector> {
    let x = set.get(m).ok_or(Error::MissingWitness(m))?;
    if x.is_zero() {
        return Err(invalid("witness", format!("witness for m = {m} is zero")));
    }
    Ok(x)
}

pub fn verify_nu(op: &OperatorDescription, cert: &NUCertificate) -> Result<CertificateReport> {
    if !(cert.r.is_finite() && cert.r > 1.0) {
        return Err(invalid("r", "norm-unimodal constant must exceed 1"));
    }
    check_policy(&cert.decay)?;
    let mut report = CertificateReport::new();
    for &m in &cert.claimed {
        let x = witness(&cert.witnesses, m)?;
        op.check_support(x)?;
        report.witness_verdicts.push((m, Verdict::Pass));
        let x_norm = x.norm();
        let mut orbit = Orbit::new(op, x)?;
        let mut tracker = DecayTracker::new(x_norm, cert.decay);
        tracker.observe(&orbit);
        let mut failed = false;
        let mut overflow = None;
        for i in 1..=m {
            if let Err(Error::Overflow { step }) = orbit.advance() {
                overflow = Some(step);
                break;
            }
            tracker.observe(&orbit);
            let required = libm::pow(cert.r, i as f64) * x_norm;
            let achieved = orbit.norm();
            report.margins.push(Margin { m, i, required, achieved });
            if !failed && achieved < required * (1.0 - GROWTH_SLACK) {
                failed = true;
                report.violations.push(Violation { m, kind: ViolationKind::Growth, i: Some(i), required, achieved });
            }
        }
        while overflow.is_none() && !tracker.settled(orbit.step()) {
            match orbit.advance() {
                Ok(()) => tracker.observe(&orbit),
                Err(Error::Overflow { step }) => overflow = Some(step),
                Err(e) => return Err(e),
            }
        }
        let outcome = tracker.finish(op, x, overflow);
        if !outcome.passed() {
            report.violations.push(Violation {
                m,
                kind: ViolationKind::Decay,
                i: None,
                required: cert.decay.tol,
                achieved: match outcome {
                    DecayOutcome::NotObserved { min_ratio, .. } => min_ratio,
                    _ => f64::INFINITY,
                },
            });
        }
        report.decay.push(DecayRecord { m, outcome });
    }
    Ok(report.seal())
}

fn strictly_increasing<T: PartialOrd + Copy>(map: &BTreeMap<usize, T>) -> bool {
    map.values().zip(map.values().skip(1)).all(|(a, b)| a < b)
}

pub fn verify_wnu(op: &OperatorDescription, cert: &WNUCertificate) -> Result<CertificateReport> {
    check_policy(&cert.decay)?;
    if cert.c.values().any(|c| !(c.is_finite() && *c > 0.0)) || !strictly_increasing(&cert.c) {
        return Err(invalid("C", "thresholds must be positive and strictly increasing"));
    }
    if !strictly_increasing(&cert.n) || cert.n.values().any(|&n| n == 0) {
        return Err(invalid("N", "lengths must be positive and strictly increasing"));
    }
    let mut report = CertificateReport::new();
    for (&m, &c) in &cert.c {
        let x = witness(&cert.witnesses, m)?;
        let n = *cert.n.get(&m).ok_or_else(|| invalid("N", format!("no N for m = {m}")))?;
        let target = *cert.targets.get(&m).ok_or_else(|| invalid("targets", format!("no target for m = {m}")))?;
        op.check_support(x)?;
        report.witness_verdicts.push((m, Verdict::Pass));

        let x_norm = x.norm();
        let threshold = c * x_norm * (1.0 - GROWTH_SLACK);
        let mut orbit = Orbit::new(op, x)?;
        let mut tracker = DecayTracker::new(x_norm, cert.decay);
        let mut count = 0;
        let mut overflow = None;
        loop {
            let k = orbit.step();
            if k < n && orbit.norm() >= threshold {
                count += 1;
            }
            tracker.observe(&orbit);
            if k + 1 >= n && tracker.settled(k) {
                break;
            }
            match orbit.advance() {
                Ok(()) => {}
                Err(Error::Overflow { step }) => {
                    overflow = Some(step);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(step) = overflow.filter(|&s| s < n) {
            return Err(Error::Overflow { step });
        }
        let fraction = count as f64 / n as f64;
        report.fractions.push(FractionRecord { m, n, c, count, fraction, target });
        if fraction < target - FRACTION_TOL {
            report.violations.push(Violation {
                m,
                kind: ViolationKind::Fraction,
                i: None,
                required: target,
                achieved: fraction,
            });
        }
        let outcome = tracker.finish(op, x, overflow);
        if !outcome.passed() {
            let achieved = match outcome {
                DecayOutcome::NotObserved { min_ratio, .. } => min_ratio,
                _ => f64::INFINITY,
            };
            report.violations.push(Violation {
                m,
                kind: ViolationKind::Decay,
                i: None,
                required: cert.decay.tol,
                achieved,
            });
        }
        report.decay.push(DecayRecord { m, outcome });
    }
    Ok(report.seal())
}

fn dense_norm(v: &[ComplexScalar]) -> f64 {
    libm::sqrt(v.iter().map(|c| c.norm_sqr()).sum())
}

/// Checks that a growth certificate for `T` transfers to `C⁻¹TC`:
/// `‖(C⁻¹TC)ⁱ C⁻¹x‖ ≥ (rⁱ/κ) ‖C⁻¹x‖` with `κ = ‖C‖·‖C⁻¹‖`.
///
/// `x` uses the 1-based coordinates of the finite matrices. The premise
/// `‖Tⁱx‖ ≥ rⁱ‖x‖` is verified first; if it fails the report fails with
/// `Premise` violations and the transfer is not attempted.
pub fn similarity_transfer_check(
    t: &DenseMatrix,
    c: &DenseMatrix,
    x: &SparseVector,
    r: f64,
    m: usize,
) -> Result<CertificateReport> {
    if !t.is_square() {
        return Err(Error::NonSquare { rows: t.rows(), cols: t.cols() });
    }
    if !c.is_square() {
        return Err(Error::NonSquare { rows: c.rows(), cols: c.cols() });
    }
    if c.rows() != t.rows() {
        return Err(Error::DimensionMismatch { expected: t.rows(), found: c.rows() });
    }
    let n = t.rows();
    if let Some((i, _)) = x.iter().find(|&(i, _)| i < 1 || i > n as i64) {
        return Err(Error::OutOfRange { index: i });
    }
    if x.is_zero() {
        return Err(invalid("x", "witness is zero"));
    }
    let mut report = CertificateReport::new();
    report.witness_verdicts.push((m, Verdict::Pass));

    let x_dense = x.to_dense(1, n);
    let x_norm = dense_norm(&x_dense);
    let mut v = x_dense.clone();
    for i in 1..=m {
        v = t.mul_vec(&v)?;
        let required = libm::pow(r, i as f64) * x_norm;
        let achieved = dense_norm(&v);
        if achieved < required * (1.0 - GROWTH_SLACK) {
            report.violations.push(Violation { m, kind: ViolationKind::Premise, i: Some(i), required, achieved });
        }
    }
    if !report.violations.is_empty() {
        return Ok(report.seal());
    }

    let c_inv = c.inverse()?;
    let norm_c = op_norm_estimate(c, 1e-15, 100_000);
    let norm_c_inv = op_norm_estimate(&c_inv, 1e-15, 100_000);
    let kappa = norm_c.estimate * norm_c_inv.estimate;
    if !(kappa.is_finite() && kappa <= CONDITION_CAP) {
        return Err(Error::IllConditioned { kappa, cap: CONDITION_CAP });
    }
    report.condition =
        Some(ConditionRecord { norm_c, norm_c_inv, kappa, kappa_upper: norm_c.upper_bound * norm_c_inv.upper_bound });

    let similar = c_inv.mul(t)?.mul(c)?;
    let mut y = c_inv.mul_vec(&x_dense)?;
    let y_norm = dense_norm(&y);
    for i in 1..=m {
        y = similar.mul_vec(&y)?;
        let required = libm::pow(r, i as f64) / kappa * y_norm;
        let achieved = dense_norm(&y);
        report.margins.push(Margin { m, i, required, achieved });
        if achieved < required * (1.0 - SIMILARITY_SLACK) {
            report.violations.push(Violation { m, kind: ViolationKind::Growth, i: Some(i), required, achieved });
        }
    }
    Ok(report.seal())
}

/// Which part of the operator a triangular spectral radius covers.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusScope {
    WholeOperator,
    /// Every block of a finite block list.
    MaterializedBlocks {
        count: usize,
    },
    /// Blocks of an infinite family met by the probe.
    ProbeBlocks {
        blocks: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangularRadius {
    pub value: f64,
    pub scope: RadiusScope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrowth {
    /// `rates[n-1] = (‖Tⁿ p‖/‖p‖)^{1/n}`, 0 once the orbit is exactly zero.
    pub rates: Vec<f64>,
    pub triangular_exact: Option<TriangularRadius>,
}

fn triangular_radius(op: &OperatorDescription, probe: &SparseVector) -> Option<TriangularRadius> {
    let whole = |value| Some(TriangularRadius { value, scope: RadiusScope::WholeOperator });
    match op {
        OperatorDescription::BilateralShift(_) | OperatorDescription::UnilateralShift { .. } => None,
        OperatorDescription::Diagonal(d) => whole(d.sup_modulus()?),
        OperatorDescription::Jordan { mu, .. } => whole(mu.norm()),
        OperatorDescription::Finite(m) => whole(Block::Dense(m.clone()).triangular_radius()?),
        OperatorDescription::BlockDiagonal(bd) => match bd.layout() {
            BlockLayout::List { blocks, .. } => {
                let mut value = 0.0_f64;
                for b in blocks {
                    value = value.max(b.triangular_radius()?);
                }
                Some(TriangularRadius { value, scope: RadiusScope::MaterializedBlocks { count: blocks.len() } })
            }
            BlockLayout::Nest { .. } => {
                let mut blocks: Vec<usize> = probe.iter().filter_map(|(i, _)| bd.locate(i).map(|(k, _)| k)).collect();
                blocks.dedup();
                let mut value = 0.0_f64;
                for &k in &blocks {
                    value = value.max(bd.block(k)?.triangular_radius()?);
                }
                Some(TriangularRadius { value, scope: RadiusScope::ProbeBlocks { blocks } })
            }
        },
    }
}

/// Gelfand-type growth rates of a probe orbit.
pub fn spectral_growth(op: &OperatorDescription, probe: &SparseVector, steps: usize) -> Result<SpectralGrowth> {
    if probe.is_zero() {
        return Err(Error::ZeroProbe);
    }
    let p_norm = probe.norm();
    let mut orbit = Orbit::new(op, probe)?;
    let mut rates = Vec::with_capacity(steps);
    for n in 1..=steps {
        orbit.advance()?;
        let ratio = orbit.norm() / p_norm;
        rates.push(if ratio == 0.0 { 0.0 } else { libm::exp2(libm::log2(ratio) / n as f64) });
    }
    Ok(SpectralGrowth { rates, triangular_exact: triangular_radius(op, probe) })
}

/// A candidate witness produced by [`witness_candidates`].
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub block: usize,
    pub vector: SparseVector,
}

/// Basis vectors and the all-ones vector of each listed block.
///
/// At most `max_basis` basis vectors are taken per block, spread evenly and
/// always including the first and last.
pub fn witness_candidates(
    bd: &BlockDiagonal,
    blocks: impl IntoIterator<Item = usize>,
    max_basis: usize,
) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for k in blocks {
        let base = bd.offset(k).ok_or_else(|| invalid("block", format!("block {k} does not exist")))?;
        let size = bd.block_size(k).expect("existing block has a size");
        out.push(Candidate { block: k, vector: SparseVector::constant(base, size, ComplexScalar::new(1.0, 0.0))? });
        let count = max_basis.min(size);
        let mut picked: Vec<usize> = match count {
            0 => Vec::new(),
            1 => alloc::vec![size - 1],
            _ => (0..count).map(|j| j * (size - 1) / (count - 1)).collect(),
        };
        picked.dedup();
        out.extend(picked.into_iter().map(|j| Candidate { block: k, vector: SparseVector::basis(base + j as i64) }));
    }
    Ok(out)
}

/// Whether `‖Tⁱ x‖ ≥ rⁱ ‖x‖` for every `i = 1..=m` (growth half only).
pub fn growth_holds(op: &OperatorDescription, x: &SparseVector, r: f64, m: usize) -> Result<bool> {
    let x_norm = x.norm();
    let mut orbit = Orbit::new(op, x)?;
    for i in 1..=m {
        orbit.advance()?;
        if orbit.norm() < libm::pow(r, i as f64) * x_norm * (1.0 - GROWTH_SLACK) {
            return Ok(false);
        }
    }
    Ok(true)
}
