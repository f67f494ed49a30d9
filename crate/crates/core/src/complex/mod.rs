//! Oriented simplicial pseudomanifolds presented by finite quotient data.
//!
//! A [`QuotientComplex`] is a finite simplicial complex `N` together with a
//! deck-group labeling of its oriented edges. Every simplex is stored with its
//! vertices in increasing order; the cover cell `(g, σ)` is the lift of `σ`
//! whose least vertex sits in translate `g`, and vertex `σ_j` of that cell is
//! `(g · label(σ_0 -> σ_j), σ_j)`.

pub mod cover;
pub mod doc;
pub mod fixtures;
pub mod subdivide;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Elem, MarkedGroup};
use crate::Q;

pub use cover::{Cell, FundamentalDomain, PeriodicComplex};
pub use subdivide::{
    barycentric_subdivide, subdivide_with_carriers, trivial_subdivision, Carrier, Subdivision,
};

/// Highest dimension accepted by full pipelines; validation and Euler
/// characteristic also accept dimension 4.
pub const MAX_PIPELINE_DIM: usize = 3;
pub const MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub detail: String,
}

impl Violation {
    fn new(condition: &str, detail: impl Into<String>) -> Self {
        Violation {
            condition: condition.to_string(),
            detail: detail.into(),
        }
    }
}

pub const SIMPLICIAL: &str = "simplicial-complex condition";
pub const PSEUDOMANIFOLD: &str = "pseudomanifold";
pub const ORIENTATION: &str = "orientation";
pub const COCYCLE: &str = "cocycle";
pub const LABELS: &str = "labels";
pub const TREE: &str = "spanning tree";
pub const COORDINATES: &str = "coordinates";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, condition: &str) -> usize {
        self.violations
            .iter()
            .filter(|v| v.condition == condition)
            .count()
    }

    pub fn mentions(&self, condition: &str) -> bool {
        self.count(condition) > 0
    }
}

/// Sort a vertex list, returning the sign of the sorting permutation
/// (`0` if a vertex repeats).
pub fn sort_with_sign(v: &[usize]) -> (Vec<usize>, i8) {
    let mut s = v.to_vec();
    let mut sign = 1i8;
    // insertion sort counting transpositions
    for i in 1..s.len() {
        let mut j = i;
        while j > 0 && s[j - 1] > s[j] {
            s.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        sign = 0;
    }
    (s, sign)
}

#[derive(Clone, Debug)]
pub struct QuotientComplex {
    group: Arc<MarkedGroup>,
    dim: usize,
    n_vertices: usize,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    orientation: Vec<i8>,
    /// Label of each edge `[u, v]`, `u < v`, read in the direction `u -> v`.
    labels: Vec<Elem>,
    tree: Vec<usize>,
    coords: Option<Vec<Vec<Q>>>,
    /// Problems found while canonicalizing raw input.
    input_issues: Vec<Violation>,
}

/// Raw quotient data prior to canonicalization.
#[derive(Clone, Debug, Default)]
pub struct QuotientData {
    pub dim: usize,
    pub n_vertices: usize,
    /// Simplices of every dimension `0..=dim`, any vertex order.
    pub simplices: Vec<Vec<usize>>,
    /// Orientation of top simplices, relative to the vertex order given here.
    pub orientation: Vec<(Vec<usize>, i8)>,
    /// Oriented edge labels `(u, v, g)` meaning `label(u -> v) = g`.
    pub labels: Vec<(usize, usize, Elem)>,
    pub tree: Vec<(usize, usize)>,
    pub coords: Option<Vec<Vec<Q>>>,
}

impl QuotientData {
    /// Add every face of the given simplices.
    pub fn close_downward(&mut self) {
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in &self.simplices {
            let (sorted, _) = sort_with_sign(s);
            let k = sorted.len();
            for mask in 1u32..(1 << k) {
                let face: Vec<usize> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| sorted[i])
                    .collect();
                all.insert(face);
            }
        }
        for v in 0..self.n_vertices {
            all.insert(vec![v]);
        }
        self.simplices = all.into_iter().collect();
    }
}

impl QuotientComplex {
    pub fn new(group: Arc<MarkedGroup>, data: QuotientData) -> Result<Self> {
        let dim = data.dim;
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::input(format!(
                "dimension {dim} unsupported (1..={MAX_DIM})"
            )));
        }
        let mut issues = Vec::new();
        let mut per_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); dim + 1];
        for s in &data.simplices {
            if s.is_empty() || s.len() > dim + 1 {
                issues.push(Violation::new(
                    SIMPLICIAL,
                    format!("simplex {s:?} has the wrong size for dimension {dim}"),
                ));
                continue;
            }
            if let Some(v) = s.iter().find(|v| **v >= data.n_vertices) {
                issues.push(Violation::new(
                    SIMPLICIAL,
                    format!("simplex {s:?} uses undeclared vertex {v}"),
                ));
                continue;
            }
            let (sorted, sign) = sort_with_sign(s);
            if sign == 0 {
                issues.push(Violation::new(
                    SIMPLICIAL,
                    format!("simplex {s:?} repeats a vertex"),
                ));
                continue;
            }
            if !per_dim[sorted.len() - 1].insert(sorted) {
                issues.push(Violation::new(
                    SIMPLICIAL,
                    format!("simplex {s:?} listed twice"),
                ));
            }
        }
        for v in 0..data.n_vertices {
            per_dim[0].insert(vec![v]);
        }
        let simplices: Vec<Vec<Vec<usize>>> = per_dim
            .into_iter()
            .map(|set| set.into_iter().collect())
            .collect();
        let index: Vec<HashMap<Vec<usize>, usize>> = simplices
            .iter()
            .map(|list| {
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();

        let mut orientation = vec![0i8; simplices[dim].len()];
        for (s, sign) in &data.orientation {
            let (sorted, perm) = sort_with_sign(s);
            match index[dim].get(&sorted) {
                Some(&i) if *sign == 1 || *sign == -1 => {
                    if orientation[i] != 0 {
                        issues.push(Violation::new(
                            ORIENTATION,
                            format!("orientation of {s:?} given twice"),
                        ));
                    }
                    orientation[i] = sign * perm;
                }
                Some(_) => issues.push(Violation::new(
                    ORIENTATION,
                    format!("orientation of {s:?} must be +1 or -1"),
                )),
                None => issues.push(Violation::new(
                    ORIENTATION,
                    format!("orientation given for {s:?}, which is not a top simplex"),
                )),
            }
        }

        let n_edges = if dim >= 1 { simplices[1].len() } else { 0 };
        let mut labels: Vec<Option<Elem>> = vec![None; n_edges];
        for (u, v, g) in &data.labels {
            let (key, g) = if u < v {
                (vec![*u, *v], g.clone())
            } else {
                (vec![*v, *u], group.inv(g)?)
            };
            match index.get(1).and_then(|m| m.get(&key)) {
                Some(&e) => match &labels[e] {
                    Some(prev) if *prev != g => issues.push(Violation::new(
                        LABELS,
                        format!("edge {u}->{v}: label disagrees with the inverse of the reversed label"),
                    )),
                    _ => labels[e] = Some(g),
                },
                None => issues.push(Violation::new(
                    LABELS,
                    format!("label given for {u}->{v}, which is not an edge"),
                )),
            }
        }
        let identity = group.identity();
        let labels: Vec<Elem> = labels
            .into_iter()
            .map(|l| l.unwrap_or_else(|| identity.clone()))
            .collect();

        let mut tree = Vec::new();
        for &(u, v) in &data.tree {
            let key = if u < v { vec![u, v] } else { vec![v, u] };
            match index.get(1).and_then(|m| m.get(&key)) {
                Some(&e) => tree.push(e),
                None => issues.push(Violation::new(
                    TREE,
                    format!("tree edge {u}-{v} is not an edge of the complex"),
                )),
            }
        }
        tree.sort_unstable();

        if let Some(c) = &data.coords {
            if c.len() != data.n_vertices || c.iter().any(|p| p.len() != dim) {
                issues.push(Violation::new(
                    COORDINATES,
                    format!("expected {} coordinate vectors of length {dim}", data.n_vertices),
                ));
            }
        }

        Ok(QuotientComplex {
            group,
            dim,
            n_vertices: data.n_vertices,
            simplices,
            index,
            orientation,
            labels,
            tree,
            coords: data.coords,
            input_issues: issues,
        })
    }

    pub fn group(&self) -> &MarkedGroup {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<MarkedGroup> {
        self.group.clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn total_cells(&self) -> usize {
        (0..=self.dim).map(|k| self.count(k)).sum()
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices[k][i]
    }

    /// Index of a sorted vertex list.
    pub fn find(&self, vertices: &[usize]) -> Option<usize> {
        let k = vertices.len().checked_sub(1)?;
        self.index.get(k)?.get(vertices).copied()
    }

    pub fn orientation(&self, i: usize) -> i8 {
        self.orientation[i]
    }

    pub fn orientations(&self) -> &[i8] {
        &self.orientation
    }

    pub fn edge_label(&self, e: usize) -> &Elem {
        &self.labels[e]
    }

    pub fn tree_edges(&self) -> &[usize] {
        &self.tree
    }

    pub fn coords(&self) -> Option<&[Vec<Q>]> {
        self.coords.as_deref()
    }

    /// `label(u -> v)`; identity when `u == v`.
    pub fn label(&self, u: usize, v: usize) -> Result<Elem> {
        if u == v {
            return Ok(self.group.identity());
        }
        let key = if u < v { vec![u, v] } else { vec![v, u] };
        let e = self
            .find(&key)
            .ok_or_else(|| Error::input(format!("{u}-{v} is not an edge")))?;
        if u < v {
            Ok(self.labels[e].clone())
        } else {
            self.group.inv(&self.labels[e])
        }
    }

    /// Faces of a k-simplex: `(i, face index)` for the face omitting vertex `i`.
    pub fn faces(&self, k: usize, i: usize) -> Vec<(usize, Option<usize>)> {
        let s = &self.simplices[k][i];
        (0..s.len())
            .map(|j| {
                let mut f = s.clone();
                f.remove(j);
                (j, self.find(&f))
            })
            .collect()
    }

    /// Top simplices containing each (n-1)-simplex, with the omitted position.
    pub fn cofacets(&self) -> Vec<Vec<(usize, usize)>> {
        let n = self.dim;
        let mut out = vec![Vec::new(); self.count(n - 1)];
        for i in 0..self.count(n) {
            for (j, f) in self.faces(n, i) {
                if let Some(f) = f {
                    out[f].push((i, j));
                }
            }
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim)
            .map(|k| {
                let c = self.count(k) as i64;
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }

    pub fn max_vertex_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n_vertices];
        for k in 1..=self.dim {
            for s in self.simplices(k) {
                for &v in s {
                    deg[v] += 1;
                }
            }
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Report every pseudomanifold, orientation, cocycle and tree violation.
    /// An empty report means the datum is a valid oriented quotient.
    pub fn validate(&self) -> ValidationReport {
        let mut out = self.input_issues.clone();
        let n = self.dim;
        // faces present
        for k in 1..=n {
            for (i, s) in self.simplices[k].iter().enumerate() {
                for (j, f) in self.faces(k, i) {
                    if f.is_none() {
                        let mut face = s.clone();
                        face.remove(j);
                        out.push(Violation::new(
                            SIMPLICIAL,
                            format!("face {face:?} of {s:?} is missing"),
                        ));
                    }
                }
            }
        }
        if self.count(n) == 0 {
            out.push(Violation::new(SIMPLICIAL, "no top-dimensional simplices"));
        }
        // pseudomanifold and orientation coherence
        let cof = self.cofacets();
        for (f, list) in cof.iter().enumerate() {
            let face = &self.simplices[n - 1][f];
            if list.len() != 2 {
                out.push(Violation::new(
                    PSEUDOMANIFOLD,
                    format!("facet {face:?} lies in {} top simplices", list.len()),
                ));
                continue;
            }
            let induced: Vec<i32> = list
                .iter()
                .map(|&(i, j)| {
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    i32::from(self.orientation[i]) * sign
                })
                .collect();
            if induced.contains(&0) {
                continue; // unoriented simplex is reported below
            }
            if induced[0] != -induced[1] {
                out.push(Violation::new(
                    ORIENTATION,
                    format!(
                        "facet {face:?}: {:?} and {:?} induce the same orientation",
                        self.simplices[n][list[0].0], self.simplices[n][list[1].0]
                    ),
                ));
            }
        }
        for (i, s) in self.orientation.iter().enumerate() {
            if *s == 0 {
                out.push(Violation::new(
                    ORIENTATION,
                    format!("top simplex {:?} has no orientation sign", self.simplices[n][i]),
                ));
            }
        }
        // cocycle condition on every 2-simplex
        if n >= 2 {
            for s in &self.simplices[2] {
                let (a, b, c) = (s[0], s[1], s[2]);
                let ok = (|| -> Result<bool> {
                    let lhs = self.group.mul(&self.label(a, b)?, &self.label(b, c)?)?;
                    Ok(lhs == self.label(a, c)?)
                })();
                match ok {
                    Ok(true) => {}
                    Ok(false) => out.push(Violation::new(
                        COCYCLE,
                        format!("labels around {s:?} do not multiply to the identity"),
                    )),
                    Err(e) => out.push(Violation::new(COCYCLE, format!("{s:?}: {e}"))),
                }
            }
        }
        // tree: spanning, acyclic, identity labels
        self.check_tree(&mut out);
        out.sort();
        out.dedup();
        ValidationReport { violations: out }
    }

    fn check_tree(&self, out: &mut Vec<Violation>) {
        let nv = self.n_vertices;
        if self.group.order() == Some(1) && self.tree.is_empty() {
            // trivial deck group: labels are all trivial, no tree needed
            return;
        }
        let mut parent: Vec<usize> = (0..nv).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &e in &self.tree {
            let s = &self.simplices[1][e];
            let (a, b) = (root(&mut parent, s[0]), root(&mut parent, s[1]));
            if a == b {
                out.push(Violation::new(TREE, format!("tree edge {s:?} closes a cycle")));
            } else {
                parent[a] = b;
            }
            if !self.group.is_identity(&self.labels[e]) {
                out.push(Violation::new(
                    TREE,
                    format!("tree edge {s:?} carries a non-identity label"),
                ));
            }
        }
        let roots: HashSet<usize> = (0..nv).map(|v| root(&mut parent, v)).collect();
        if roots.len() > 1 {
            out.push(Violation::new(
                TREE,
                format!("tree does not span: {} components", roots.len()),
            ));
        }
    }

    /// Fail unless the datum is a valid oriented quotient.
    pub fn require_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.is_valid() {
            return Ok(());
        }
        let first = &r.violations[0];
        if r.violations.iter().all(|v| v.condition == ORIENTATION) {
            return Err(Error::Orientation(format!(
                "{} orientation violation(s), first: {}",
                r.violations.len(),
                first.detail
            )));
        }
        Err(Error::input(format!(
            "invalid quotient ({} violation(s)); first [{}]: {}",
            r.violations.len(),
            first.condition,
            first.detail
        )))
    }

    /// Replace the orientation signs (fixture and search helper).
    pub fn with_orientation(mut self, signs: Vec<i8>) -> Self {
        assert_eq!(signs.len(), self.orientation.len());
        self.orientation = signs;
        self
    }

    /// Raw data equivalent to this complex, in canonical order.
    pub fn to_data(&self) -> QuotientData {
        let mut labels = Vec::new();
        for (e, s) in self.simplices(1).iter().enumerate() {
            if !self.group.is_identity(&self.labels[e]) {
                labels.push((s[0], s[1], self.labels[e].clone()));
            }
        }
        QuotientData {
            dim: self.dim,
            n_vertices: self.n_vertices,
            simplices: self.simplices.iter().flatten().cloned().collect(),
            orientation: self
                .simplices(self.dim)
                .iter()
                .cloned()
                .zip(self.orientation.iter().copied())
                .collect(),
            labels,
            tree: self
                .tree
                .iter()
                .map(|&e| (self.simplices[1][e][0], self.simplices[1][e][1]))
                .collect(),
            coords: self.coords.clone(),
        }
    }
}

/// Choose a BFS spanning tree from vertex 0 and conjugate the labels so tree
/// edges carry the identity. Coordinates (free abelian case) shift with the
/// new representative lifts.
pub fn normalize_gauge(group: &MarkedGroup, data: &mut QuotientData) -> Result<()> {
    let n = data.n_vertices;
    let mut adj: Vec<Vec<(usize, Elem)>> = vec![Vec::new(); n];
    let mut label_of: HashMap<(usize, usize), Elem> = HashMap::new();
    for (u, v, g) in &data.labels {
        label_of.insert((*u, *v), g.clone());
        label_of.insert((*v, *u), group.inv(g)?);
    }
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for s in &data.simplices {
        let (s, _) = sort_with_sign(s);
        if s.len() == 2 {
            edges.insert((s[0], s[1]));
        }
    }
    for &(u, v) in &edges {
        let l = label_of.get(&(u, v)).cloned().unwrap_or_else(|| group.identity());
        adj[u].push((v, l.clone()));
        adj[v].push((u, group.inv(&l)?));
    }
    let mut tau: Vec<Option<Elem>> = vec![None; n];
    let mut tree = Vec::new();
    tau[0] = Some(group.identity());
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for (v, l) in adj[u].clone() {
            if tau[v].is_none() {
                let t = group.mul(tau[u].as_ref().unwrap(), &l)?;
                tau[v] = Some(t);
                tree.push((u.min(v), u.max(v)));
                queue.push_back(v);
            }
        }
    }
    let tau: Vec<Elem> = tau
        .into_iter()
        .map(|t| t.ok_or_else(|| Error::input("quotient 1-skeleton is disconnected")))
        .collect::<Result<_>>()?;
    let mut labels = Vec::new();
    for &(u, v) in &edges {
        let l = label_of.get(&(u, v)).cloned().unwrap_or_else(|| group.identity());
        // new label = tau(u) * l * tau(v)^-1
        let nl = group.mul(&group.mul(&tau[u], &l)?, &group.inv(&tau[v])?)?;
        if !group.is_identity(&nl) {
            labels.push((u, v, nl));
        }
    }
    if let Some(coords) = &mut data.coords {
        for (v, p) in coords.iter_mut().enumerate() {
            if let Some(shift) = group.as_vector(&tau[v]) {
                for (x, s) in p.iter_mut().zip(shift) {
                    *x += Q::from_integer(s.into());
                }
            }
        }
    }
    data.labels = labels;
    data.tree = tree;
    Ok(())
}
