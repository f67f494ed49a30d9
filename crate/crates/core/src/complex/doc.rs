//! JSON form of a quotient complex.
//!
//! ```json
//! {"dimension": 2, "group": {"kind": "free-abelian", "rank": 2},
//!  "vertices": 7, "simplices": [[[0], ...], [[0, 1], ...], [[0, 1, 3], ...]],
//!  "orientation": {"0,1,3": 1}, "labels": {"0,1": "a b^-1"}, "tree": [[0, 1]],
//!  "coordinates": [["1/7", "2/7"], ...]}
//! ```
//!
//! `to_doc` is canonical: writing, reading and writing again reproduces the
//! same bytes.

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Map;

use super::{QuotientComplex, QuotientData};
use crate::error::{Error, Result};
use crate::group::{GroupSpec, MarkedGroup};
use crate::Q;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    pub vertices: usize,
    pub simplices: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    pub orientation: Map<String, serde_json::Value>,
    #[serde(default)]
    pub labels: Map<String, serde_json::Value>,
    #[serde(default)]
    pub tree: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<Vec<String>>>,
}

fn parse_key(key: &str) -> Result<Vec<usize>> {
    key.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::input(format!("bad simplex key `{key}`")))
        })
        .collect()
}

fn key_of(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ComplexDoc {
    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("complex documents serialize")
    }

    /// Resolve against the document's own group block (trivial group if absent).
    pub fn resolve(&self) -> Result<QuotientComplex> {
        let group = match &self.group {
            Some(spec) => spec.build()?,
            None => MarkedGroup::trivial(),
        };
        self.resolve_with(Arc::new(group))
    }

    pub fn resolve_with(&self, group: Arc<MarkedGroup>) -> Result<QuotientComplex> {
        if self.simplices.len() > self.dimension + 1 {
            return Err(Error::input(format!(
                "simplices grouped into {} dimensions, but dimension is {}",
                self.simplices.len(),
                self.dimension
            )));
        }
        let mut orientation = Vec::new();
        for (k, v) in &self.orientation {
            let sign = v
                .as_i64()
                .ok_or_else(|| Error::input(format!("orientation of `{k}` must be an integer")))?;
            orientation.push((parse_key(k)?, sign.clamp(-2, 2) as i8));
        }
        let mut labels = Vec::new();
        for (k, v) in &self.labels {
            let e = parse_key(k)?;
            if e.len() != 2 {
                return Err(Error::input(format!("label key `{k}` is not an edge")));
            }
            let word = v
                .as_str()
                .ok_or_else(|| Error::input(format!("label of `{k}` must be a word string")))?;
            labels.push((e[0], e[1], group.parse(word)?));
        }
        let coords = match &self.coordinates {
            None => None,
            Some(rows) => Some(
                rows.iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| {
                                Q::from_str(s.trim()).map_err(|_| {
                                    Error::input(format!("bad rational coordinate `{s}`"))
                                })
                            })
                            .collect::<Result<Vec<Q>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let data = QuotientData {
            dim: self.dimension,
            n_vertices: self.vertices,
            simplices: self.simplices.iter().flatten().cloned().collect(),
            orientation,
            labels,
            tree: self.tree.clone(),
            coords,
        };
        QuotientComplex::new(group, data)
    }
}

impl QuotientComplex {
    pub fn to_doc(&self) -> ComplexDoc {
        let group = self.group();
        let mut orientation = Map::new();
        for (s, sign) in self.simplices(self.dim()).iter().zip(self.orientations()) {
            orientation.insert(key_of(s), serde_json::Value::from(*sign));
        }
        let mut labels = Map::new();
        for (e, s) in self.simplices(1).iter().enumerate() {
            let l = self.edge_label(e);
            if !group.is_identity(l) {
                labels.insert(key_of(s), serde_json::Value::from(group.format(l)));
            }
        }
        ComplexDoc {
            dimension: self.dim(),
            group: Some(group.spec()),
            vertices: self.n_vertices(),
            simplices: (0..=self.dim()).map(|k| self.simplices(k).to_vec()).collect(),
            orientation,
            labels,
            tree: self
                .tree_edges()
                .iter()
                .map(|&e| {
                    let s = self.simplex(1, e);
                    (s[0], s[1])
                })
                .collect(),
            coordinates: self.coords().map(|c| {
                c.iter()
                    .map(|row| row.iter().map(|x| x.to_string()).collect())
                    .collect()
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{fixtures, SIMPLICIAL};

    #[test]
    fn canonical_round_trip_is_bit_exact() {
        for q in [fixtures::tetrahedron(), fixtures::torus7(), fixtures::genus2()] {
            let a = q.to_doc().to_json();
            let b = ComplexDoc::from_json(&a).unwrap().resolve().unwrap().to_doc().to_json();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn missing_face_is_named() {
        let mut doc = fixtures::tetrahedron().to_doc();
        doc.simplices[1].remove(0);
        let r = doc.resolve().unwrap().validate();
        assert!(r.mentions(SIMPLICIAL));
    }

    #[test]
    fn reversed_keys_are_normalized() {
        let src = r#"{"dimension": 1, "group": {"kind": "free-abelian", "rank": 1},
            "vertices": 2, "simplices": [[[0],[1]], [[0,1],[1,0]]],
            "orientation": {"1,0": 1}, "labels": {}, "tree": [[0,1]]}"#;
        let q = ComplexDoc::from_json(src).unwrap().resolve().unwrap();
        assert!(q.validate().mentions(SIMPLICIAL)); // [1,0] duplicates [0,1]
    }
}
