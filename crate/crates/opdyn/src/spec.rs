//! JSON operator specs.
//!
//! The schema is documented in `SCHEMA.md` (also printed by `opdyn --help`).
//! Loading goes through flat raw structs rather than tagged enums so that
//! type errors keep their line, column and field path; per-kind field rules
//! are then checked by hand.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use opdyn_core::constructions::{
    ik_epsilon_operator, ik_epsilon_params, ik_epsilon_truncated_perturbation, CRule, IkEpsilonParams,
};
use opdyn_core::operators::{Block, BlockDiagonal, DiagonalRule, ShiftDirection, WeightRule};
use opdyn_core::{DenseMatrix, OperatorDescription};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::manifest::{Manifest, RawManifest};

/// A complex number written as a JSON number (real) or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexValue(pub Complex64);

impl Serialize for ComplexValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.im == 0.0 && self.0.im.is_sign_positive() {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for ComplexValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ComplexValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a [re, im] pair")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                Ok(ComplexValue(Complex64::new(v, 0.0)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(ComplexValue(Complex64::new(re, im)))
            }
        }
        d.deserialize_any(V)
    }
}

pub type MatrixSpec = Vec<Vec<ComplexValue>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WeightSpec {
    #[serde(rename = "paper_example_1")]
    PaperExample1,
    #[serde(rename = "paper_example_2")]
    PaperExample2,
    Constant {
        value: f64,
    },
    Table {
        entries: BTreeMap<i64, f64>,
        default: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DiagonalSpec {
    Constant { value: ComplexValue },
    Affine { slope: ComplexValue, intercept: ComplexValue },
    Table { entries: BTreeMap<i64, ComplexValue>, default: ComplexValue },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CRuleSpec {
    Linear,
    Sqrt,
    Table { values: Vec<f64> },
}

impl CRuleSpec {
    pub fn to_rule(&self) -> CRule {
        match self {
            CRuleSpec::Linear => CRule::Linear,
            CRuleSpec::Sqrt => CRule::Sqrt,
            CRuleSpec::Table { values } => CRule::Table(values.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BuiltinSpec {
    Nest {
        transposed: bool,
    },
    IkEpsilon {
        epsilon: f64,
        c_rule: CRuleSpec,
        blocks: usize,
        identity_prefix: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        truncate_after: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BlockSource {
    Builtin { builtin: BuiltinSpec },
    Inline { start: i64, blocks: Vec<MatrixSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorSpec {
    BilateralShift {
        weights: WeightSpec,
    },
    UnilateralShift {
        weights: WeightSpec,
        direction: Direction,
    },
    Diagonal {
        diagonal: DiagonalSpec,
    },
    Finite {
        matrix: MatrixSpec,
    },
    Jordan {
        mu: ComplexValue,
        n: usize,
    },
    BlockDiagonal {
        #[serde(flatten)]
        source: BlockSource,
    },
}

/// A load or validation failure, located as precisely as the input allows.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecError {
    pub file: String,
    /// Dotted field path, `.` for the document root.
    pub field: String,
    /// 1-based; 0 when only the field path is known.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file)?;
        if self.line > 0 {
            write!(f, ":{}:{}", self.line, self.column)?;
        }
        write!(f, ": field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for SpecError {}

/// Field-path error raised while converting raw structs.
struct FieldError {
    field: String,
    message: String,
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> FieldError {
    FieldError { field: field.into(), message: message.into() }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

fn required<T: Clone>(value: &Option<T>, prefix: &str, name: &str, context: &str) -> Result<T, FieldError> {
    value.clone().ok_or_else(|| field_err(join(prefix, name), format!("required for {context}")))
}

/// Rejects fields that are present but belong to a different variant.
fn only(present: &[(&str, bool)], allowed: &[&str], prefix: &str, context: &str) -> Result<(), FieldError> {
    match present.iter().find(|(name, set)| *set && !allowed.contains(name)) {
        Some((name, _)) => Err(field_err(join(prefix, name), format!("not used by {context}"))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    BilateralShift,
    UnilateralShift,
    Diagonal,
    Finite,
    Jordan,
    BlockDiagonal,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum WeightKind {
    #[serde(rename = "paper_example_1")]
    PaperExample1,
    #[serde(rename = "paper_example_2")]
    PaperExample2,
    Constant,
    Table,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum DiagonalKind {
    Constant,
    Affine,
    Table,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CKind {
    Linear,
    Sqrt,
    Table,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BuiltinKind {
    Nest,
    IkEpsilon,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    rule: WeightKind,
    value: Option<f64>,
    entries: Option<BTreeMap<i64, f64>>,
    default: Option<f64>,
}

impl RawWeights {
    fn convert(&self, p: &str) -> Result<WeightSpec, FieldError> {
        let present =
            [("value", self.value.is_some()), ("entries", self.entries.is_some()), ("default", self.default.is_some())];
        Ok(match self.rule {
            WeightKind::PaperExample1 | WeightKind::PaperExample2 => {
                only(&present, &[], p, "a paper example weight rule")?;
                if matches!(self.rule, WeightKind::PaperExample1) {
                    WeightSpec::PaperExample1
                } else {
                    WeightSpec::PaperExample2
                }
            }
            WeightKind::Constant => {
                only(&present, &["value"], p, "rule `constant`")?;
                WeightSpec::Constant { value: required(&self.value, p, "value", "rule `constant`")? }
            }
            WeightKind::Table => {
                only(&present, &["entries", "default"], p, "rule `table`")?;
                WeightSpec::Table {
                    entries: required(&self.entries, p, "entries", "rule `table`")?,
                    default: required(&self.default, p, "default", "rule `table`")?,
                }
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagonal {
    rule: DiagonalKind,
    value: Option<ComplexValue>,
    slope: Option<ComplexValue>,
    intercept: Option<ComplexValue>,
    entries: Option<BTreeMap<i64, ComplexValue>>,
    default: Option<ComplexValue>,
}

impl RawDiagonal {
    fn convert(&self, p: &str) -> Result<DiagonalSpec, FieldError> {
        let present = [
            ("value", self.value.is_some()),
            ("slope", self.slope.is_some()),
            ("intercept", self.intercept.is_some()),
            ("entries", self.entries.is_some()),
            ("default", self.default.is_some()),
        ];
        Ok(match self.rule {
            DiagonalKind::Constant => {
                only(&present, &["value"], p, "rule `constant`")?;
                DiagonalSpec::Constant { value: required(&self.value, p, "value", "rule `constant`")? }
            }
            DiagonalKind::Affine => {
                only(&present, &["slope", "intercept"], p, "rule `affine`")?;
                DiagonalSpec::Affine {
                    slope: required(&self.slope, p, "slope", "rule `affine`")?,
                    intercept: required(&self.intercept, p, "intercept", "rule `affine`")?,
                }
            }
            DiagonalKind::Table => {
                only(&present, &["entries", "default"], p, "rule `table`")?;
                DiagonalSpec::Table {
                    entries: required(&self.entries, p, "entries", "rule `table`")?,
                    default: required(&self.default, p, "default", "rule `table`")?,
                }
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCRule {
    rule: CKind,
    values: Option<Vec<f64>>,
}

impl RawCRule {
    fn convert(&self, p: &str) -> Result<CRuleSpec, FieldError> {
        let present = [("values", self.values.is_some())];
        Ok(match self.rule {
            CKind::Linear => {
                only(&present, &[], p, "rule `linear`")?;
                CRuleSpec::Linear
            }
            CKind::Sqrt => {
                only(&present, &[], p, "rule `sqrt`")?;
                CRuleSpec::Sqrt
            }
            CKind::Table => CRuleSpec::Table { values: required(&self.values, p, "values", "rule `table`")? },
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBuiltin {
    name: BuiltinKind,
    transposed: Option<bool>,
    epsilon: Option<f64>,
    c_rule: Option<RawCRule>,
    blocks: Option<usize>,
    identity_prefix: Option<usize>,
    truncate_after: Option<usize>,
}

impl RawBuiltin {
    fn convert(&self, p: &str) -> Result<BuiltinSpec, FieldError> {
        let present = [
            ("transposed", self.transposed.is_some()),
            ("epsilon", self.epsilon.is_some()),
            ("c_rule", self.c_rule.is_some()),
            ("blocks", self.blocks.is_some()),
            ("identity_prefix", self.identity_prefix.is_some()),
            ("truncate_after", self.truncate_after.is_some()),
        ];
        Ok(match self.name {
            BuiltinKind::Nest => {
                only(&present, &["transposed"], p, "builtin `nest`")?;
                BuiltinSpec::Nest { transposed: self.transposed.unwrap_or(false) }
            }
            BuiltinKind::IkEpsilon => {
                only(
                    &present,
                    &["epsilon", "c_rule", "blocks", "identity_prefix", "truncate_after"],
                    p,
                    "builtin `ik_epsilon`",
                )?;
                let c_rule = required(&self.c_rule, p, "c_rule", "builtin `ik_epsilon`")?;
                BuiltinSpec::IkEpsilon {
                    epsilon: required(&self.epsilon, p, "epsilon", "builtin `ik_epsilon`")?,
                    c_rule: c_rule.convert(&join(p, "c_rule"))?,
                    blocks: required(&self.blocks, p, "blocks", "builtin `ik_epsilon`")?,
                    identity_prefix: self.identity_prefix.unwrap_or(0),
                    truncate_after: self.truncate_after,
                }
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawOperator {
    kind: Kind,
    weights: Option<RawWeights>,
    direction: Option<Direction>,
    diagonal: Option<RawDiagonal>,
    matrix: Option<MatrixSpec>,
    mu: Option<ComplexValue>,
    n: Option<usize>,
    builtin: Option<RawBuiltin>,
    start: Option<i64>,
    blocks: Option<Vec<MatrixSpec>>,
}

impl RawOperator {
    fn convert(&self, p: &str) -> Result<OperatorSpec, FieldError> {
        let present = [
            ("weights", self.weights.is_some()),
            ("direction", self.direction.is_some()),
            ("diagonal", self.diagonal.is_some()),
            ("matrix", self.matrix.is_some()),
            ("mu", self.mu.is_some()),
            ("n", self.n.is_some()),
            ("builtin", self.builtin.is_some()),
            ("start", self.start.is_some()),
            ("blocks", self.blocks.is_some()),
        ];
        let weights = |ctx: &str| -> Result<WeightSpec, FieldError> {
            required(&self.weights, p, "weights", ctx)?.convert(&join(p, "weights"))
        };
        Ok(match self.kind {
            Kind::BilateralShift => {
                only(&present, &["weights"], p, "kind `bilateral_shift`")?;
                OperatorSpec::BilateralShift { weights: weights("kind `bilateral_shift`")? }
            }
            Kind::UnilateralShift => {
                only(&present, &["weights", "direction"], p, "kind `unilateral_shift`")?;
                OperatorSpec::UnilateralShift {
                    weights: weights("kind `unilateral_shift`")?,
                    direction: self.direction.unwrap_or(Direction::Forward),
                }
            }
            Kind::Diagonal => {
                only(&present, &["diagonal"], p, "kind `diagonal`")?;
                let raw = required(&self.diagonal, p, "diagonal", "kind `diagonal`")?;
                OperatorSpec::Diagonal { diagonal: raw.convert(&join(p, "diagonal"))? }
            }
            Kind::Finite => {
                only(&present, &["matrix"], p, "kind `finite`")?;
                OperatorSpec::Finite { matrix: required(&self.matrix, p, "matrix", "kind `finite`")? }
            }
            Kind::Jordan => {
                only(&present, &["mu", "n"], p, "kind `jordan`")?;
                OperatorSpec::Jordan {
                    mu: required(&self.mu, p, "mu", "kind `jordan`")?,
                    n: required(&self.n, p, "n", "kind `jordan`")?,
                }
            }
            Kind::BlockDiagonal => match (&self.builtin, &self.blocks) {
                (Some(b), None) => {
                    only(&present, &["builtin"], p, "a built-in block family")?;
                    OperatorSpec::BlockDiagonal {
                        source: BlockSource::Builtin { builtin: b.convert(&join(p, "builtin"))? },
                    }
                }
                (None, Some(blocks)) => {
                    only(&present, &["start", "blocks"], p, "inline blocks")?;
                    OperatorSpec::BlockDiagonal {
                        source: BlockSource::Inline { start: self.start.unwrap_or(1), blocks: blocks.clone() },
                    }
                }
                _ => {
                    return Err(field_err(
                        p.to_string(),
                        "kind `block_diagonal` needs exactly one of `builtin` or `blocks`",
                    ))
                }
            },
        })
    }
}

fn dense(m: &MatrixSpec, field: &str) -> Result<DenseMatrix, FieldError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if let Some(r) = m.iter().position(|row| row.len() != cols) {
        return Err(field_err(format!("{field}[{r}]"), format!("row has {} entries, expected {cols}", m[r].len())));
    }
    let data = m.iter().flatten().map(|c| c.0).collect();
    DenseMatrix::new(rows, cols, data).map_err(|e| field_err(field, e.to_string()))
}

fn weight_rule(w: &WeightSpec) -> WeightRule {
    match w {
        WeightSpec::PaperExample1 => WeightRule::PaperExample1,
        WeightSpec::PaperExample2 => WeightRule::PaperExample2,
        WeightSpec::Constant { value } => WeightRule::Constant(*value),
        WeightSpec::Table { entries, default } => WeightRule::Table { entries: entries.clone(), default: *default },
    }
}

impl OperatorSpec {
    pub fn nest(transposed: bool) -> Self {
        OperatorSpec::BlockDiagonal { source: BlockSource::Builtin { builtin: BuiltinSpec::Nest { transposed } } }
    }

    pub fn ik_epsilon(epsilon: f64, c_rule: CRuleSpec, blocks: usize, identity_prefix: usize) -> Self {
        OperatorSpec::BlockDiagonal {
            source: BlockSource::Builtin {
                builtin: BuiltinSpec::IkEpsilon { epsilon, c_rule, blocks, identity_prefix, truncate_after: None },
            },
        }
    }

    /// Parameters of an `ik_epsilon` built-in, if this is one.
    pub fn ik_params(&self) -> Option<Result<IkEpsilonParams, opdyn_core::Error>> {
        match self {
            OperatorSpec::BlockDiagonal {
                source: BlockSource::Builtin { builtin: BuiltinSpec::IkEpsilon { epsilon, c_rule, blocks, .. } },
            } => Some(ik_epsilon_params(*epsilon, &c_rule.to_rule(), *blocks)),
            _ => None,
        }
    }

    fn build_inner(&self) -> Result<OperatorDescription, FieldError> {
        fn core(field: &'static str) -> impl Fn(opdyn_core::Error) -> FieldError {
            move |e| field_err(field, e.to_string())
        }
        let op = match self {
            OperatorSpec::BilateralShift { weights } => OperatorDescription::BilateralShift(weight_rule(weights)),
            OperatorSpec::UnilateralShift { weights, direction } => OperatorDescription::UnilateralShift {
                weights: weight_rule(weights),
                direction: match direction {
                    Direction::Forward => ShiftDirection::Forward,
                    Direction::Backward => ShiftDirection::Backward,
                },
            },
            OperatorSpec::Diagonal { diagonal } => OperatorDescription::Diagonal(match diagonal {
                DiagonalSpec::Constant { value } => DiagonalRule::Constant(value.0),
                DiagonalSpec::Affine { slope, intercept } => {
                    DiagonalRule::Affine { slope: slope.0, intercept: intercept.0 }
                }
                DiagonalSpec::Table { entries, default } => DiagonalRule::Table {
                    entries: entries.iter().map(|(&k, v)| (k, v.0)).collect(),
                    default: default.0,
                },
            }),
            OperatorSpec::Finite { matrix } => OperatorDescription::Finite(dense(matrix, "matrix")?),
            OperatorSpec::Jordan { mu, n } => OperatorDescription::Jordan { mu: mu.0, n: *n },
            OperatorSpec::BlockDiagonal {
                source: BlockSource::Builtin { builtin: BuiltinSpec::Nest { transposed } },
            } => OperatorDescription::BlockDiagonal(BlockDiagonal::nest(*transposed)),
            OperatorSpec::BlockDiagonal {
                source: BlockSource::Builtin { builtin: BuiltinSpec::IkEpsilon { identity_prefix, truncate_after, .. } },
            } => {
                let params = self.ik_params().expect("ik_epsilon built-in").map_err(core("builtin"))?;
                match truncate_after {
                    None => ik_epsilon_operator(&params, *identity_prefix).map_err(core("builtin.identity_prefix"))?,
                    Some(_) if *identity_prefix > 0 => {
                        return Err(field_err(
                            "builtin.truncate_after",
                            "cannot be combined with a nonzero identity_prefix",
                        ))
                    }
                    Some(i) => {
                        ik_epsilon_truncated_perturbation(&params, *i).map_err(core("builtin.truncate_after"))?
                    }
                }
            }
            OperatorSpec::BlockDiagonal { source: BlockSource::Inline { start, blocks } } => {
                let blocks = blocks
                    .iter()
                    .enumerate()
                    .map(|(k, m)| dense(m, &format!("blocks[{k}]")).map(Block::Dense))
                    .collect::<Result<Vec<_>, _>>()?;
                OperatorDescription::BlockDiagonal(BlockDiagonal::from_blocks(*start, blocks).map_err(core("blocks"))?)
            }
        };
        op.validate().map_err(core("."))?;
        Ok(op)
    }

    /// The operator this spec describes; `file` only labels errors.
    pub fn build(&self, file: &str) -> Result<OperatorDescription, SpecError> {
        self.build_inner().map_err(|e| SpecError {
            file: file.into(),
            field: e.field,
            line: 0,
            column: 0,
            message: e.message,
        })
    }
}

/// A parsed spec file: either a bare operator spec or a build manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecDocument {
    pub operator: OperatorSpec,
    pub manifest: Option<Manifest>,
}

#[derive(Deserialize)]
struct Probe {
    kind: Option<de::IgnoredAny>,
    operator: Option<de::IgnoredAny>,
}

/// serde_json's message without its trailing location, which is reported separately.
fn bare_message(e: &serde_json::Error) -> String {
    let text = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    text.strip_suffix(&suffix).map(str::to_string).unwrap_or(text)
}

fn typed<T: for<'de> Deserialize<'de>>(text: &str, file: &str) -> Result<T, SpecError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        SpecError {
            file: file.into(),
            field,
            line: inner.line(),
            column: inner.column(),
            message: bare_message(&inner),
        }
    })?;
    de.end().map_err(|e| SpecError {
        file: file.into(),
        field: ".".into(),
        line: e.line(),
        column: e.column(),
        message: bare_message(&e),
    })?;
    Ok(value)
}

pub fn parse_spec(text: &str, file: &str) -> Result<SpecDocument, SpecError> {
    let probe: Probe = typed(text, file)?;
    let locate =
        |e: FieldError| SpecError { file: file.into(), field: e.field, line: 0, column: 0, message: e.message };
    let doc = match (probe.kind, probe.operator) {
        (Some(_), _) => {
            let raw: RawOperator = typed(text, file)?;
            SpecDocument { operator: raw.convert("").map_err(locate)?, manifest: None }
        }
        (None, Some(_)) => {
            let raw: RawManifest = typed(text, file)?;
            let operator = raw.operator.convert("operator").map_err(locate)?;
            SpecDocument { manifest: Some(raw.finish(operator.clone())), operator }
        }
        (None, None) => {
            return Err(SpecError {
                file: file.into(),
                field: ".".into(),
                line: 0,
                column: 0,
                message: "expected an operator spec (with `kind`) or a manifest (with `operator`)".into(),
            })
        }
    };
    doc.operator.build(file)?;
    Ok(doc)
}

pub fn load_spec(path: &Path) -> Result<SpecDocument, SpecError> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| SpecError {
        file: file.clone(),
        field: ".".into(),
        line: 0,
        column: 0,
        message: format!("cannot read: {e}"),
    })?;
    parse_spec(&text, &file)
}
