//! Serializable report documents. Every report carries the tool version and
//! the fully resolved configuration that produced it.

use serde::Serialize;

use opdyn_core::criteria::{
    CertificateReport, ConditionRecord, DecayOutcome, RadiusScope, TriangularRadius, Verdict, ViolationKind,
};
use opdyn_core::numlin::NormEstimate;

use crate::manifest::ToolInfo;

#[derive(Debug, Serialize)]
pub struct Envelope<C: Serialize, B: Serialize> {
    pub tool: ToolInfo,
    pub parameters: C,
    #[serde(flatten)]
    pub body: B,
}

impl<C: Serialize, B: Serialize> Envelope<C, B> {
    pub fn new(parameters: C, body: B) -> Self {
        Self { tool: ToolInfo::current(), parameters, body }
    }
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    }
}

#[derive(Debug, Serialize)]
pub struct MarginDoc {
    pub m: usize,
    pub i: usize,
    pub required: f64,
    pub achieved: f64,
}

#[derive(Debug, Serialize)]
pub struct ViolationDoc {
    pub m: usize,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    pub required: f64,
    /// `null` when the achieved side is unbounded (overflow).
    pub achieved: Option<f64>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum DecayDoc {
    ExactZero { step: usize },
    BelowTolerance { step: usize },
    SpectralRadius { radius: f64 },
    NotObserved { horizon: usize, min_ratio: f64 },
    Overflowed { step: usize },
}

#[derive(Debug, Serialize)]
pub struct DecayRecordDoc {
    pub m: usize,
    pub passed: bool,
    #[serde(flatten)]
    pub outcome: DecayDoc,
}

#[derive(Debug, Serialize)]
pub struct FractionDoc {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "C")]
    pub c: f64,
    pub count: usize,
    pub fraction: f64,
    pub target: f64,
}

#[derive(Debug, Serialize)]
pub struct NormEstimateDoc {
    pub estimate: f64,
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl From<NormEstimate> for NormEstimateDoc {
    fn from(e: NormEstimate) -> Self {
        Self { estimate: e.estimate, upper_bound: e.upper_bound, iterations: e.iterations, converged: e.converged }
    }
}

#[derive(Debug, Serialize)]
pub struct ConditionDoc {
    pub norm_c: NormEstimateDoc,
    pub norm_c_inv: NormEstimateDoc,
    pub kappa: f64,
    pub kappa_upper: f64,
}

impl From<ConditionRecord> for ConditionDoc {
    fn from(c: ConditionRecord) -> Self {
        Self { norm_c: c.norm_c.into(), norm_c_inv: c.norm_c_inv.into(), kappa: c.kappa, kappa_upper: c.kappa_upper }
    }
}

#[derive(Debug, Serialize)]
pub struct WitnessVerdictDoc {
    pub m: usize,
    pub verdict: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CertificateDoc {
    pub verdict: &'static str,
    pub violations: Vec<ViolationDoc>,
    pub margins: Vec<MarginDoc>,
    pub decay: Vec<DecayRecordDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fractions: Vec<FractionDoc>,
    pub witnesses: Vec<WitnessVerdictDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionDoc>,
    /// Suprema and decay claims cover only the blocks that were checked.
    pub scope: &'static str,
}

fn kind(k: ViolationKind) -> &'static str {
    match k {
        ViolationKind::Growth => "growth",
        ViolationKind::Decay => "decay",
        ViolationKind::Fraction => "fraction",
        ViolationKind::Premise => "premise",
    }
}

fn decay(o: DecayOutcome) -> DecayDoc {
    match o {
        DecayOutcome::ExactZero { step } => DecayDoc::ExactZero { step },
        DecayOutcome::BelowTolerance { step } => DecayDoc::BelowTolerance { step },
        DecayOutcome::SpectralRadius { radius } => DecayDoc::SpectralRadius { radius },
        DecayOutcome::NotObserved { horizon, min_ratio } => DecayDoc::NotObserved { horizon, min_ratio },
        DecayOutcome::Overflowed { step } => DecayDoc::Overflowed { step },
    }
}

impl From<&CertificateReport> for CertificateDoc {
    fn from(r: &CertificateReport) -> Self {
        Self {
            verdict: verdict(r.verdict),
            violations: r
                .violations
                .iter()
                .map(|v| ViolationDoc {
                    m: v.m,
                    kind: kind(v.kind),
                    i: v.i,
                    required: v.required,
                    achieved: v.achieved.is_finite().then_some(v.achieved),
                })
                .collect(),
            margins: r
                .margins
                .iter()
                .map(|g| MarginDoc { m: g.m, i: g.i, required: g.required, achieved: g.achieved })
                .collect(),
            decay: r
                .decay
                .iter()
                .map(|d| DecayRecordDoc { m: d.m, passed: d.outcome.passed(), outcome: decay(d.outcome) })
                .collect(),
            fractions: r
                .fractions
                .iter()
                .map(|f| FractionDoc { m: f.m, n: f.n, c: f.c, count: f.count, fraction: f.fraction, target: f.target })
                .collect(),
            witnesses: r.witness_verdicts.iter().map(|&(m, v)| WitnessVerdictDoc { m, verdict: verdict(v) }).collect(),
            condition: r.condition.map(Into::into),
            scope: "supplied witnesses only",
        }
    }
}

/// One-line description of the first violation, for stderr.
pub fn describe_first_violation(r: &CertificateReport) -> Option<String> {
    let v = r.first_violation()?;
    let at = v.i.map(|i| format!(" at i={i}")).unwrap_or_default();
    Some(format!("m={}: {} violation{at}: achieved {} vs required {}", v.m, kind(v.kind), v.achieved, v.required))
}

#[derive(Debug, Serialize)]
pub struct RadiusDoc {
    pub value: f64,
    pub scope: String,
}

impl From<&TriangularRadius> for RadiusDoc {
    fn from(t: &TriangularRadius) -> Self {
        let scope = match &t.scope {
            RadiusScope::WholeOperator => "whole operator".to_string(),
            RadiusScope::MaterializedBlocks { count } => format!("materialized blocks 1..={count}"),
            RadiusScope::ProbeBlocks { blocks } => format!("blocks met by the probe: {blocks:?}"),
        };
        Self { value: t.value, scope }
    }
}
