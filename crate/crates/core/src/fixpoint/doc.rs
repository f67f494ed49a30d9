//! JSON documents for self-maps, vector fields and raw index data.
//!
//! ```json
//! {"variant": "analytic", "complex": "torus7", "subdivision": 1,
//!  "expressions": ["0.2*sin(2*pi*x)", "0.2*sin(2*pi*y)"],
//!  "overrides": [{"translate": [0, 0], "expressions": ["...", "..."]}],
//!  "bound": 0.3}
//!
//! {"variant": "simplicial", "complex": "octahedron", "subdivision": 0,
//!  "images": [0, 1, ["a", 2], ...],
//!  "overrides": [{"deck": "a", "vertex": 3, "image": ["a b", 2]}]}
//! ```
//!
//! `complex` is a fixture name (`torus7`, `genus2`, `tetrahedron`,
//! `octahedron`, `torus-grid:M`, `surface:G`, `klein:M`) or an inline
//! complex document.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::simplicial::SimplicialMap;
use super::torus::{Component, Patch, TorusModel};
use super::SelfMapModel;
use crate::class_fn::ClassFunction;
use crate::complex::doc::ComplexDoc;
use crate::complex::{fixtures, QuotientComplex};
use crate::error::{Error, Result};
use crate::group::{GroupSpec, MarkedGroup};

pub const INDEX_DATA_NOTE: &str = "externally supplied index data";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRef {
    Named(String),
    Inline(Box<ComplexDoc>),
}

impl ComplexRef {
    pub fn resolve(&self) -> Result<QuotientComplex> {
        match self {
            ComplexRef::Inline(doc) => doc.resolve(),
            ComplexRef::Named(name) => named_complex(name),
        }
    }
}

pub fn named_complex(name: &str) -> Result<QuotientComplex> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => {
            let k = a
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::input(format!("bad fixture parameter in `{name}`")))?;
            (h.trim(), Some(k))
        }
        None => (name.trim(), None),
    };
    match (head, arg) {
        ("torus7", None) => Ok(fixtures::torus7()),
        ("genus2", None) => Ok(fixtures::genus2()),
        ("tetrahedron", None) => Ok(fixtures::tetrahedron()),
        ("octahedron", None) => Ok(fixtures::octahedron()),
        ("torus-grid", Some(m)) => fixtures::torus_grid(m),
        ("surface", Some(g)) => fixtures::surface(g),
        ("klein", Some(m)) => fixtures::klein_bottle(m),
        _ => Err(Error::input(format!(
            "unknown complex `{name}` (torus7, genus2, tetrahedron, octahedron, torus-grid:M, surface:G, klein:M)"
        ))),
    }
}

/// A cover vertex `(deck, v)`; a bare integer means the identity deck.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexRef {
    Plain(usize),
    Decked(String, usize),
}

impl VertexRef {
    fn resolve(&self, group: &MarkedGroup) -> Result<super::simplicial::Vertex> {
        match self {
            VertexRef::Plain(v) => Ok((group.identity(), *v)),
            VertexRef::Decked(w, v) => Ok((group.parse(w)?, *v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideDoc {
    /// Analytic: integer translate of the unit cube.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expressions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobian: Option<Vec<Vec<String>>>,
    /// Simplicial: the cover vertex `(deck, vertex)` and its new image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deck: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<VertexRef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    /// `analytic`, `simplicial` or (fields only) `pl`.
    pub variant: String,
    pub complex: ComplexRef,
    #[serde(default)]
    pub subdivision: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expressions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobian: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<VertexRef>>,
    /// PL fields: one vector (barycentric, as rationals) per vertex of each
    /// top simplex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<OverrideDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

impl MapDoc {
    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map documents serialize")
    }

    pub(crate) fn torus_model(&self, q: Arc<QuotientComplex>) -> Result<TorusModel> {
        let n = q.dim();
        let exprs = self
            .expressions
            .as_ref()
            .ok_or_else(|| Error::input("analytic documents need `expressions`"))?;
        let base = Component::parse(n, exprs, self.jacobian.as_deref())?;
        let mut patches = Vec::new();
        for o in &self.overrides {
            let (Some(t), Some(e)) = (&o.translate, &o.expressions) else {
                return Err(Error::input("analytic overrides need `translate` and `expressions`"));
            };
            patches.push(Patch {
                translate: t.clone(),
                comp: Component::parse(n, e, o.jacobian.as_deref())?,
            });
        }
        TorusModel::new(q, self.subdivision, base, patches, self.bound)
    }

    fn simplicial_map(&self, q: Arc<QuotientComplex>) -> Result<SimplicialMap> {
        let group = q.group().clone();
        let images = self
            .images
            .as_ref()
            .ok_or_else(|| Error::input("simplicial documents need `images`"))?
            .iter()
            .map(|v| v.resolve(&group))
            .collect::<Result<Vec<_>>>()?;
        let mut overrides = BTreeMap::new();
        for o in &self.overrides {
            let (Some(v), Some(img)) = (o.vertex, &o.image) else {
                return Err(Error::input("simplicial overrides need `vertex` and `image`"));
            };
            let d = match &o.deck {
                Some(w) => group.parse(w)?,
                None => group.identity(),
            };
            if overrides.insert((d, v), img.resolve(&group)?).is_some() {
                return Err(Error::input(format!("vertex {v} is overridden twice")));
            }
        }
        let bound = match self.bound {
            None => None,
            Some(b) if b >= 0.0 && b.fract() == 0.0 => Some(b as usize),
            Some(b) => return Err(Error::input(format!("simplicial bound must be a whole number of deck steps, got {b}"))),
        };
        SimplicialMap::new(q, self.subdivision, images, overrides, bound)
    }

    pub fn self_map(&self) -> Result<SelfMapModel> {
        let q = Arc::new(self.complex.resolve()?);
        match self.variant.as_str() {
            "analytic" => Ok(SelfMapModel::Analytic(self.torus_model(q)?)),
            "simplicial" => Ok(SelfMapModel::Simplicial(self.simplicial_map(q)?)),
            v => Err(Error::input(format!("unknown map variant `{v}` (analytic, simplicial)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FiniteDoc {
    List(Vec<(String, i64)>),
    Map(BTreeMap<String, i64>),
}

impl Default for FiniteDoc {
    fn default() -> Self {
        FiniteDoc::List(Vec::new())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexDataDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub constant: i64,
    #[serde(default)]
    pub finite: FiniteDoc,
    /// Field data: where `χ` comes from (a complex, or the number itself).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_characteristic: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct IndexData {
    pub group: Arc<MarkedGroup>,
    pub class: ClassFunction,
    /// `χ` of the quotient, when the document supplies it.
    pub euler_characteristic: Option<i64>,
    pub note: &'static str,
}

/// Per-coset index sums supplied directly (constant plus finite overrides).
pub fn ingest_index_data(src: &str) -> Result<IndexData> {
    let doc: IndexDataDoc = serde_json::from_str(src)?;
    let quotient = doc.complex.as_ref().map(|c| c.resolve()).transpose()?;
    let group = match (&doc.group, &quotient) {
        (Some(spec), _) => Arc::new(spec.build()?),
        (None, Some(q)) => q.group_arc(),
        (None, None) => Arc::new(MarkedGroup::trivial()),
    };
    if let (Some(q), Some(spec)) = (&quotient, &doc.group) {
        if spec.build()?.to_string() != q.group().to_string() {
            return Err(Error::input("`group` and the group of `complex` disagree"));
        }
    }
    let euler_characteristic = match (&quotient, doc.euler_characteristic) {
        (Some(q), Some(chi)) if q.euler_characteristic() != chi => {
            return Err(Error::input(format!(
                "declared Euler characteristic {chi} but the complex has {}",
                q.euler_characteristic()
            )))
        }
        (Some(q), _) => Some(q.euler_characteristic()),
        (None, chi) => chi,
    };
    let pairs: Vec<(String, i64)> = match doc.finite {
        FiniteDoc::List(l) => l,
        FiniteDoc::Map(m) => m.into_iter().collect(),
    };
    let mut class = ClassFunction::constant(doc.constant);
    for (w, v) in pairs {
        class.add_at(group.parse(&w)?, v);
    }
    Ok(IndexData {
        group,
        class,
        euler_characteristic,
        note: INDEX_DATA_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_data_forms() {
        let d = ingest_index_data(r#"{"group": {"kind": "free-abelian", "rank": 1}, "constant": 2}"#).unwrap();
        assert_eq!(d.class, ClassFunction::constant(2));
        assert_eq!(d.note, INDEX_DATA_NOTE);
        let d = ingest_index_data(r#"{"constant": 0, "finite": {}}"#).unwrap();
        assert!(d.class.is_zero_function());
        let d = ingest_index_data(r#"{"group": {"kind": "free", "rank": 2}, "finite": [["a b", 3], ["a", -1]]}"#)
            .unwrap();
        assert_eq!(d.class.finite_total(), 2);
        assert!(ingest_index_data(r#"{"constant": "two"}"#).is_err());
        assert!(ingest_index_data(r#"{"constant": 1, "finite": [["q", 1]]}"#).is_err());
        let d = ingest_index_data(r#"{"complex": "genus2", "constant": -2}"#).unwrap();
        assert_eq!(d.euler_characteristic, Some(-2));
        assert_eq!(d.group.to_string(), "pi_1(S_2)");
        assert!(ingest_index_data(r#"{"complex": "genus2", "euler_characteristic": 0}"#).is_err());
    }

    #[test]
    fn map_documents_round_trip() {
        let src = r#"{"variant": "analytic", "complex": "torus7", "subdivision": 1,
            "expressions": ["0.2*sin(2*pi*x)", "0.2*sin(2*pi*y)"], "bound": 0.3}"#;
        let d = MapDoc::from_json(src).unwrap();
        assert_eq!(MapDoc::from_json(&d.to_json()).unwrap(), d);
        assert!(matches!(d.self_map().unwrap(), SelfMapModel::Analytic(_)));

        let src = r#"{"variant": "simplicial", "complex": "octahedron", "images": [2, 3, 4, 5, 0, 1]}"#;
        let m = MapDoc::from_json(src).unwrap().self_map();
        assert!(m.is_ok(), "{m:?}");

        let inline = fixtures::tetrahedron().to_doc();
        let d = MapDoc {
            variant: "simplicial".into(),
            complex: ComplexRef::Inline(Box::new(inline)),
            subdivision: 0,
            expressions: None,
            jacobian: None,
            images: Some(vec![VertexRef::Plain(1), VertexRef::Plain(2), VertexRef::Plain(0), VertexRef::Plain(3)]),
            vectors: None,
            overrides: vec![],
            bound: None,
        };
        let back = MapDoc::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert!(back.self_map().is_ok());
        assert!(MapDoc::from_json(r#"{"variant": "x", "complex": "nowhere"}"#).unwrap().self_map().is_err());
    }
}
