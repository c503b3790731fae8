//! JSON form of a [`MechanismSpec`]:
//!
//! ```json
//! {
//!   "kernel": {"family": "laplace", "param": 0.5},
//!   "inputs": [0, 1],
//!   "outputs": [-1, 0, 1, 2],
//!   "supports": {"0": [-1, 0, 1], "1": [0, 1, 2]},
//!   "distance": {"type": "abs"}
//! }
//! ```
//!
//! `distance` may be omitted (defaults to `abs`) or given as
//! `{"type": "matrix", "values": [[...], ...]}` with one row per input and
//! one column per output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{DistanceModel, FamilyKind, MechanismSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelDocument {
    pub family: FamilyKind,
    pub param: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DistanceDocument {
    #[default]
    Abs,
    Matrix { values: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub kernel: KernelDocument,
    pub inputs: Vec<i64>,
    pub outputs: Vec<i64>,
    pub supports: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    pub distance: DistanceDocument,
}

impl SpecDocument {
    pub fn into_spec(self) -> Result<MechanismSpec> {
        let kernel = self.kernel.family.with_param(self.kernel.param)?;
        let mut supports = BTreeMap::new();
        for (key, support) in self.supports {
            let x: i64 = key.trim().parse().map_err(|_| {
                Error::InvalidSpec(format!("support key `{key}` is not an integer"))
            })?;
            if supports.insert(x, support).is_some() {
                return Err(Error::InvalidSpec(format!("input {x} has two support entries")));
            }
        }
        let distance = match self.distance {
            DistanceDocument::Abs => DistanceModel::AbsoluteDifference,
            DistanceDocument::Matrix { values } => DistanceModel::ExplicitMatrix(values),
        };
        MechanismSpec::new(kernel, self.inputs, self.outputs, supports, distance)
    }
}

impl From<&MechanismSpec> for SpecDocument {
    fn from(spec: &MechanismSpec) -> Self {
        let kernel = spec.kernel();
        Self {
            kernel: KernelDocument {
                family: kernel.kind(),
                param: kernel.param(),
            },
            inputs: spec.inputs().to_vec(),
            outputs: spec.outputs().to_vec(),
            supports: spec
                .supports()
                .iter()
                .map(|(x, s)| (x.to_string(), s.clone()))
                .collect(),
            distance: match spec.distance_model() {
                DistanceModel::AbsoluteDifference => DistanceDocument::Abs,
                DistanceModel::ExplicitMatrix(values) => DistanceDocument::Matrix {
                    values: values.clone(),
                },
            },
        }
    }
}

impl MechanismSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpecDocument::from(self)).expect("spec document serializes")
    }
}
