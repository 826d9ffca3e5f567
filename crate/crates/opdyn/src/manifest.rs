//! Build manifests: a reloadable operator spec plus construction parameters
//! and witness files (paths relative to the manifest).

use std::collections::BTreeMap;
use std::path::Path;

use opdyn_core::constructions::{IkEpsilonParams, WitnessSet};
use serde::{Deserialize, Serialize};

use crate::spec::{OperatorSpec, RawOperator};
use crate::vecfile::{read_vector, VectorFileError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockParams {
    pub index: usize,
    /// First coordinate of the block.
    pub start: i64,
    pub eps: f64,
    #[serde(rename = "L")]
    pub big_l: u64,
    pub m: u64,
    pub n: u64,
    #[serde(rename = "C")]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionParams {
    pub epsilon: f64,
    pub blocks: Vec<BlockParams>,
}

impl ConstructionParams {
    pub fn from_ik(params: &IkEpsilonParams) -> Self {
        let mut start = 1;
        let blocks = params
            .blocks
            .iter()
            .map(|p| {
                let b = BlockParams { index: p.index, start, eps: p.eps, big_l: p.big_l, m: p.m, n: p.n, c: p.c };
                start += p.n as i64;
                b
            })
            .collect();
        Self { epsilon: params.epsilon, blocks }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: ToolInfo,
    pub construction: String,
    pub operator: OperatorSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ConstructionParams>,
    /// Witness file per `m`, relative to the manifest.
    pub witnesses: BTreeMap<usize, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawManifest {
    tool: ToolInfo,
    construction: String,
    pub(crate) operator: RawOperator,
    #[serde(default)]
    params: Option<ConstructionParams>,
    #[serde(default)]
    witnesses: BTreeMap<usize, String>,
}

impl RawManifest {
    pub(crate) fn finish(self, operator: OperatorSpec) -> Manifest {
        Manifest {
            tool: self.tool,
            construction: self.construction,
            operator,
            params: self.params,
            witnesses: self.witnesses,
        }
    }
}

impl Manifest {
    pub fn load_witnesses(&self, dir: &Path) -> Result<WitnessSet, VectorFileError> {
        let mut set = WitnessSet::default();
        for (&m, file) in &self.witnesses {
            let x = read_vector(&dir.join(file))?;
            set.0.insert(m, x);
        }
        Ok(set)
    }
}
