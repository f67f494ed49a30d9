//! Bounded-geometry graphs: Cayley graphs and 1-skeleta of periodic covers.

use std::collections::HashSet;
use std::hash::Hash;

use crate::complex::{Cell, PeriodicComplex};
use crate::error::{Error, Result};
use crate::group::word::Letter;
use crate::group::{Elem, MarkedGroup};

/// A connected graph with unit edge lengths and a uniform degree bound,
/// enumerated lazily from a root.
pub trait BoundedGraph: Sync {
    type Vertex: Clone + Ord + Hash + Send + Sync + std::fmt::Debug;

    fn root(&self) -> Self::Vertex;
    /// Neighbors without repetition.
    fn neighbors(&self, v: &Self::Vertex) -> Result<Vec<Self::Vertex>>;
    fn degree_bound(&self) -> usize;
    /// Largest BFS radius the graph agrees to enumerate.
    fn radius_budget(&self) -> usize;
}

/// BFS layers `S_0, ..., S_r` around the root. Stops early when the graph is
/// exhausted.
pub fn layers<G: BoundedGraph>(graph: &G, radius: usize) -> Result<Vec<Vec<G::Vertex>>> {
    if radius > graph.radius_budget() {
        return Err(Error::Budget {
            what: format!("graph ball of radius {radius}"),
            flag: "--radius",
            needed: radius,
            limit: graph.radius_budget(),
        });
    }
    let root = graph.root();
    let mut seen: HashSet<G::Vertex> = HashSet::new();
    seen.insert(root.clone());
    let mut out = vec![vec![root]];
    for _ in 0..radius {
        let mut next = Vec::new();
        for v in out.last().unwrap() {
            for w in graph.neighbors(v)? {
                if seen.insert(w.clone()) {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CayleyGraph<'a> {
    pub group: &'a MarkedGroup,
    gens: Vec<(Letter, Elem)>,
}

impl<'a> CayleyGraph<'a> {
    pub fn new(group: &'a MarkedGroup) -> Self {
        CayleyGraph {
            group,
            gens: group.generators(),
        }
    }

    pub fn generators(&self) -> &[(Letter, Elem)] {
        &self.gens
    }
}

impl BoundedGraph for CayleyGraph<'_> {
    type Vertex = Elem;

    fn root(&self) -> Elem {
        self.group.identity()
    }

    fn neighbors(&self, v: &Elem) -> Result<Vec<Elem>> {
        let mut out = Vec::with_capacity(self.gens.len());
        for (_, s) in &self.gens {
            let w = self.group.mul(v, s)?;
            if w != *v && !out.contains(&w) {
                out.push(w);
            }
        }
        Ok(out)
    }

    fn degree_bound(&self) -> usize {
        self.gens.len()
    }

    fn radius_budget(&self) -> usize {
        self.group.ball_budget()
    }
}

/// Vertices and edges of a materialized cover.
#[derive(Clone, Debug)]
pub struct CoverSkeleton<'a> {
    pub cover: &'a PeriodicComplex,
    degree: usize,
}

impl<'a> CoverSkeleton<'a> {
    pub fn new(cover: &'a PeriodicComplex) -> Self {
        let q = cover.quotient();
        let mut deg = vec![0usize; q.n_vertices()];
        for e in q.simplices(1) {
            deg[e[0]] += 1;
            deg[e[1]] += 1;
        }
        CoverSkeleton {
            cover,
            degree: deg.into_iter().max().unwrap_or(0),
        }
    }
}

impl BoundedGraph for CoverSkeleton<'_> {
    type Vertex = Cell;

    fn root(&self) -> Cell {
        Cell {
            g: self.cover.group().identity(),
            dim: 0,
            idx: 0,
        }
    }

    fn neighbors(&self, v: &Cell) -> Result<Vec<Cell>> {
        let mut out = Vec::new();
        for (_, e) in self.cover.cofaces(v)? {
            for w in self.cover.cell_vertices(&e)? {
                if w != *v && !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        Ok(out)
    }

    fn degree_bound(&self) -> usize {
        self.degree
    }

    fn radius_budget(&self) -> usize {
        self.cover.group().ball_budget()
    }
}

/// One row of an isoperimetric table: `|∂B_r| / |B_r|`, where `∂B_r` is the
/// inner vertex boundary (vertices of `B_r` with a neighbor outside).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct IsoRow {
    pub radius: usize,
    pub ball: usize,
    pub boundary: usize,
    #[serde(serialize_with = "crate::ufh::ser_q")]
    pub ratio: crate::Q,
}

pub fn isoperimetric_probe<G: BoundedGraph>(graph: &G, radii: &[usize]) -> Result<Vec<IsoRow>> {
    let rmax = radii.iter().copied().max().unwrap_or(0);
    let ls = layers(graph, rmax)?;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let inside: HashSet<&G::Vertex> = ls.iter().take(r + 1).flatten().collect();
        // only the outermost layer can touch the outside; an exhausted graph has none
        let mut boundary = 0;
        if let Some(last) = ls.get(r) {
            for v in last {
                if graph.neighbors(v)?.iter().any(|w| !inside.contains(w)) {
                    boundary += 1;
                }
            }
        }
        rows.push(IsoRow {
            radius: r,
            ball: inside.len(),
            boundary,
            ratio: crate::Q::new((boundary as i64).into(), (inside.len() as i64).into()),
        });
    }
    Ok(rows)
}
