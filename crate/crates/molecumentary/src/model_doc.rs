//! Structural model document.
//!
//! ```json
//! {
//!   "types": [{"id": "capsid", "name": "Capsid", "parent": "hiv",
//!              "alt_names": [], "descriptions": ["..."]}],
//!   "instances": [{"id": "capsid-1", "type": "capsid",
//!                  "center": [0, 0, 0], "radius": 25}]
//! }
//! ```
//!
//! Unknown keys are reported as warnings and otherwise ignored.

use std::collections::BTreeMap;

use molecumentary_core::model::{Instance, StructuralModel, StructureType};
use molecumentary_core::Vec3;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::DocError;

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    #[serde(default)]
    types: Vec<TypeDoc>,
    #[serde(default)]
    instances: Vec<InstanceDoc>,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TypeDoc {
    id: String,
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    alt_names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    descriptions: Vec<String>,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    id: String,
    #[serde(rename = "type")]
    type_id: String,
    center: [f64; 3],
    radius: f64,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

/// A validated model plus the unknown keys that were skipped.
#[derive(Debug, Clone)]
pub struct ParsedModel {
    pub model: StructuralModel,
    pub warnings: Vec<String>,
}

fn note_extra(warnings: &mut Vec<String>, place: &str, extra: &BTreeMap<String, Value>) {
    for key in extra.keys() {
        warnings.push(format!("ignoring unknown key `{key}` in {place}"));
    }
}

pub fn parse_model(bytes: &[u8]) -> Result<ParsedModel, DocError> {
    let doc: ModelDoc = serde_json::from_slice(bytes)?;
    let mut warnings = Vec::new();
    note_extra(&mut warnings, "the document", &doc.extra);

    let types = doc
        .types
        .into_iter()
        .map(|t| {
            note_extra(&mut warnings, &format!("type `{}`", t.id), &t.extra);
            StructureType {
                id: t.id,
                name: t.name,
                alt_names: t.alt_names,
                parent_id: t.parent,
                local_descriptions: t.descriptions,
            }
        })
        .collect();
    let instances = doc
        .instances
        .into_iter()
        .map(|i| {
            note_extra(&mut warnings, &format!("instance `{}`", i.id), &i.extra);
            let [x, y, z] = i.center;
            Instance::new(i.id, i.type_id, Vec3::new(x, y, z), i.radius)
        })
        .collect();
    let model = StructuralModel::new(types, instances).map_err(|e| DocError::Invalid(e.to_string()))?;
    Ok(ParsedModel { model, warnings })
}

pub fn serialize_model(model: &StructuralModel) -> String {
    let doc = ModelDoc {
        types: model
            .types()
            .iter()
            .map(|t| TypeDoc {
                id: t.id.clone(),
                name: t.name.clone(),
                alt_names: t.alt_names.clone(),
                parent: t.parent_id.clone(),
                descriptions: t.local_descriptions.clone(),
                extra: BTreeMap::new(),
            })
            .collect(),
        instances: model
            .instances()
            .iter()
            .map(|i| InstanceDoc {
                id: i.id.clone(),
                type_id: i.type_id.clone(),
                center: [i.center.x, i.center.y, i.center.z],
                radius: i.radius,
                extra: BTreeMap::new(),
            })
            .collect(),
        extra: BTreeMap::new(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model serializes");
    out.push('\n');
    out
}
