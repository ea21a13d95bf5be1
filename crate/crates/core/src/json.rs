//! JSON forms of boxes, representations and families.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boxcore::{DimensionVector, FreeBox};
use crate::brickfamily::{format_entry, FamilyResult, FamilyStatus};
use crate::dsl::parse_element;
use crate::freecat::ArrowRef;
use crate::matrix::Matrix;
use crate::reduction::ReductionChain;
use crate::rep::Representation;
use crate::scalar::{Field, FieldSpec, ScalarError};

/// Boxes are stored with differentials written in the text syntax.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct BoxRecord {
    name: String,
    vertices: Vec<String>,
    arrows: Vec<ArrowRef>,
    #[serde(default)]
    differentials: BTreeMap<String, String>,
}

impl Serialize for FreeBox {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BoxRecord {
            name: self.name().to_string(),
            vertices: self.vertices(),
            arrows: self.arrows().cloned().collect(),
            differentials: self
                .nonzero_differentials()
                .map(|(k, e)| (k.clone(), e.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FreeBox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = BoxRecord::deserialize(d)?;
        let mut b = FreeBox::new(&r.name);
        for v in &r.vertices {
            b.add_vertex(v);
        }
        for a in r.arrows {
            b.add_arrow(a).map_err(D::Error::custom)?;
        }
        for (id, text) in &r.differentials {
            let a = b.arrow(id).map_err(D::Error::custom)?.clone();
            let e = parse_element(&b, text, (&a.source, &a.target)).map_err(D::Error::custom)?;
            b.set_differential(id, e).map_err(D::Error::custom)?;
        }
        Ok(b)
    }
}

/// A representation with entries written as field elements (`"3"`, `"-1/2"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationRecord {
    pub field: FieldSpec,
    pub dims: DimensionVector,
    /// Row-major entries per solid arrow.
    pub matrices: BTreeMap<String, Vec<Vec<String>>>,
}

impl RepresentationRecord {
    pub fn from_rep<F: Field>(field: &F, spec: FieldSpec, m: &Representation<F::Elem>) -> Self {
        RepresentationRecord {
            field: spec,
            dims: m.dims.clone(),
            matrices: m
                .matrices
                .iter()
                .map(|(k, x)| {
                    let rows = (0..x.rows())
                        .map(|r| (0..x.cols()).map(|c| field.format(x.get(r, c))).collect())
                        .collect();
                    (k.clone(), rows)
                })
                .collect(),
        }
    }

    /// Reads the matrices back; shapes come from the endpoint dimensions in `b`.
    pub fn to_rep<F: Field>(&self, field: &F, b: &FreeBox) -> Result<Representation<F::Elem>, ScalarError> {
        let shape_error = |k: &str| ScalarError::Parse(format!("matrix for {k} does not match the dimensions"));
        let dim = |v: &str| self.dims.get(v).copied().unwrap_or(0);
        let mut matrices = BTreeMap::new();
        for a in b.solid_arrows() {
            let (r, c) = (dim(&a.target), dim(&a.source));
            let rows = self.matrices.get(&a.id).map(Vec::as_slice).unwrap_or(&[]);
            if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                return Err(shape_error(&a.id));
            }
            let mut data = Vec::with_capacity(r * c);
            for x in rows.iter().flatten() {
                data.push(field.parse(x)?);
            }
            matrices.insert(a.id.clone(), Matrix::from_rows(r, c, data));
        }
        if let Some(k) = self.matrices.keys().find(|k| !matrices.contains_key(*k)) {
            return Err(ScalarError::Parse(format!("{k} is not a solid arrow")));
        }
        Ok(Representation {
            dims: b.vertices().into_iter().map(|v| (v.clone(), dim(&v))).collect(),
            matrices,
        })
    }
}

/// A brick family with polynomial entries in `t`, or the reason none exists,
/// together with the reduction chain that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub field: FieldSpec,
    pub dims: DimensionVector,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub empty: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<BTreeMap<String, Vec<Vec<String>>>>,
    pub chain: ReductionChain,
}

impl FamilyRecord {
    pub fn new<F: Field>(field: &F, spec: FieldSpec, dims: DimensionVector, r: &FamilyResult<F::Elem>) -> Self {
        let (empty, family) = match &r.status {
            FamilyStatus::Empty(reason) => (Some(format!("{reason:?}")), None),
            FamilyStatus::Family(f) => {
                let m = f
                    .matrices
                    .iter()
                    .map(|(k, x)| {
                        let rows = (0..x.rows())
                            .map(|i| (0..x.cols()).map(|j| format_entry(field, x.get(i, j))).collect())
                            .collect();
                        (k.clone(), rows)
                    })
                    .collect();
                (None, Some(m))
            }
        };
        FamilyRecord {
            field: spec,
            dims,
            empty,
            family,
            chain: r.chain.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_box;

    #[test]
    fn box_round_trip() {
        let text = std::fs::read_to_string(format!(
            "{}/corpus/box12_full.box",
            env!("CARGO_MANIFEST_DIR")
        ))
        .unwrap();
        let b = parse_box(&text).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        let back: FreeBox = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn bad_differential_is_rejected() {
        let json = r#"{"name":"x","vertices":["1"],"arrows":[{"id":"a","source":"1","target":"1","kind":"solid"}],
            "differentials":{"a":"q"}}"#;
        assert!(serde_json::from_str::<FreeBox>(json).is_err());
    }
}
