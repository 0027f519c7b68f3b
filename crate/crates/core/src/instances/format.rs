//! JSON instance documents.
//!
//! ```json
//! {
//!   "elements": [{"id": 0, "weight": "7.2100000000000000e-1"}, ...],
//!   "sets": [{"id": 0, "capacity": 2, "parent": null, "members": [0, 1, 2]}, ...]
//! }
//! ```
//!
//! Weights are written as decimal strings with 17 significant digits, which
//! round-trips every finite `f64` exactly. The reader also accepts plain
//! JSON numbers.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;
use crate::matroid::{Element, ElementId, InstanceSpec, LaminarMatroid, SetId, SetSpec};

pub const FILE_EXTENSION: &str = "laminst.json";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    elements: Vec<ElementRecord>,
    #[serde(default)]
    sets: Vec<SetRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementRecord {
    id: u32,
    weight: WeightField,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightField {
    Text(String),
    Number(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetRecord {
    id: u32,
    capacity: u32,
    #[serde(default)]
    parent: Option<u32>,
    members: Vec<u32>,
}

/// Parse and validate an instance document.
pub fn parse_instance(text: &str) -> Result<LaminarMatroid, InstanceError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
    let elements = doc
        .elements
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            let weight = match r.weight {
                WeightField::Number(w) => w,
                WeightField::Text(s) => s.trim().parse::<f64>().map_err(|_| {
                    InstanceError::Parse(format!("elements[{k}].weight: `{s}` is not a decimal number"))
                })?,
            };
            Ok(Element { id: ElementId(r.id), weight })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;
    let sets = doc
        .sets
        .into_iter()
        .map(|s| SetSpec {
            id: SetId(s.id),
            capacity: s.capacity,
            parent: s.parent.map(SetId),
            members: s.members.into_iter().map(ElementId).collect(),
        })
        .collect();
    Ok(LaminarMatroid::new(InstanceSpec { elements, sets })?)
}

pub fn read_instance<R: Read>(mut source: R) -> Result<LaminarMatroid, InstanceError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_instance(&text)
}

pub fn to_document_string(matroid: &LaminarMatroid) -> String {
    let spec = matroid.to_spec();
    let doc = Document {
        elements: spec
            .elements
            .iter()
            .map(|e| ElementRecord { id: e.id.0, weight: WeightField::Text(format!("{:.16e}", e.weight)) })
            .collect(),
        sets: spec
            .sets
            .iter()
            .map(|s| SetRecord {
                id: s.id.0,
                capacity: s.capacity,
                parent: s.parent.map(|p| p.0),
                members: s.members.iter().map(|m| m.0).collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("document serializes");
    out.push('\n');
    out
}

pub fn write_instance<W: Write>(matroid: &LaminarMatroid, mut destination: W) -> Result<(), InstanceError> {
    destination.write_all(to_document_string(matroid).as_bytes())?;
    Ok(())
}
