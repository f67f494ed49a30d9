//! Lazy realization of the cover and its fundamental domain.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use super::QuotientComplex;
use crate::error::{Error, Result};
use crate::group::{Elem, MarkedGroup};

/// Cover cell `(g, σ)`: the lift of quotient simplex `σ` whose least vertex
/// lies in translate `g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub g: Elem,
    pub dim: usize,
    pub idx: usize,
}

#[derive(Debug)]
pub struct PeriodicComplex {
    quotient: Arc<QuotientComplex>,
    /// `offsets[k][i][j] = label(σ_0 -> σ_j)` for the k-simplex `σ = simplices[k][i]`.
    offsets: Vec<Vec<Vec<Elem>>>,
    /// `cof[k][i]`: `(coface index, omitted position)` for the k-simplex `i`.
    cof: Vec<Vec<Vec<(usize, usize)>>>,
    radius: Option<usize>,
    /// Ball of the current radius, enumerated on first use.
    region: OnceLock<Vec<Elem>>,
}

impl PeriodicComplex {
    /// Requires a valid quotient (orientation problems are tolerated so that
    /// non-orientable quotients can still be expanded and inspected).
    pub fn new(quotient: Arc<QuotientComplex>) -> Result<Self> {
        let report = quotient.validate();
        if let Some(v) = report
            .violations
            .iter()
            .find(|v| v.condition != super::ORIENTATION)
        {
            return Err(Error::input(format!(
                "cannot build the cover: [{}] {}",
                v.condition, v.detail
            )));
        }
        let mut offsets = Vec::with_capacity(quotient.dim() + 1);
        for k in 0..=quotient.dim() {
            let mut per = Vec::with_capacity(quotient.count(k));
            for s in quotient.simplices(k) {
                per.push(
                    s.iter()
                        .map(|&v| quotient.label(s[0], v))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            offsets.push(per);
        }
        let mut cof: Vec<Vec<Vec<(usize, usize)>>> =
            (0..=quotient.dim()).map(|k| vec![Vec::new(); quotient.count(k)]).collect();
        for k in 1..=quotient.dim() {
            for i in 0..quotient.count(k) {
                for (j, f) in quotient.faces(k, i) {
                    let f = f.ok_or_else(|| Error::Invariant("missing face".into()))?;
                    cof[k - 1][f].push((i, j));
                }
            }
        }
        Ok(PeriodicComplex {
            quotient,
            offsets,
            cof,
            radius: None,
            region: OnceLock::new(),
        })
    }

    pub fn quotient(&self) -> &QuotientComplex {
        &self.quotient
    }

    pub fn quotient_arc(&self) -> Arc<QuotientComplex> {
        self.quotient.clone()
    }

    pub fn group(&self) -> &MarkedGroup {
        self.quotient.group()
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// Materialize every cell whose deck coordinate lies in `ball(radius)`.
    /// Monotone: a smaller radius never shrinks the region. Membership is the
    /// length test `|g| <= radius`; the ball itself is enumerated lazily.
    pub fn expand(&mut self, radius: usize) -> Result<()> {
        if self.radius.is_none_or(|r| r < radius) {
            let budget = self.group().ball_budget();
            if radius > budget {
                return Err(Error::Budget {
                    what: format!("cover region of radius {radius}"),
                    flag: "--radius",
                    needed: radius,
                    limit: budget,
                });
            }
            self.radius = Some(radius);
            self.region = OnceLock::new();
        }
        Ok(())
    }

    pub fn radius(&self) -> Option<usize> {
        self.radius
    }

    /// Deck elements of the materialized region, in ball order.
    pub fn region(&self) -> &[Elem] {
        self.region.get_or_init(|| match self.radius {
            None => Vec::new(),
            Some(r) => self.group().ball(r).expect("radius checked against the budget"),
        })
    }

    pub fn in_region(&self, g: &Elem) -> bool {
        self.radius.is_some_and(|r| self.group().length(g) <= r)
    }

    pub fn cell_count(&self) -> usize {
        self.region().len() * self.quotient.total_cells()
    }

    /// All materialized cells, translate-major.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.cell_count());
        for g in self.region() {
            for k in 0..=self.dim() {
                for idx in 0..self.quotient.count(k) {
                    out.push(Cell {
                        g: g.clone(),
                        dim: k,
                        idx,
                    });
                }
            }
        }
        out
    }

    pub fn offsets(&self, dim: usize, idx: usize) -> &[Elem] {
        &self.offsets[dim][idx]
    }

    /// Fail with a resource error unless `g` is materialized.
    pub fn require(&self, g: &Elem) -> Result<()> {
        if self.in_region(g) {
            return Ok(());
        }
        let r = self.radius.unwrap_or(0);
        Err(Error::Region(format!(
            "cell in translate {} lies outside the materialized region (radius {r}); expand further with --radius",
            self.group().format(g)
        )))
    }

    /// Vertices of a cover cell, as 0-cells.
    pub fn cell_vertices(&self, c: &Cell) -> Result<Vec<Cell>> {
        let s = self.quotient.simplex(c.dim, c.idx);
        let off = &self.offsets[c.dim][c.idx];
        s.iter()
            .zip(off)
            .map(|(&v, o)| {
                Ok(Cell {
                    g: self.group().mul(&c.g, o)?,
                    dim: 0,
                    idx: v,
                })
            })
            .collect()
    }

    /// The sub-cell spanned by the given positions of `c`'s vertex list
    /// (positions increasing).
    pub fn sub_cell(&self, c: &Cell, positions: &[usize]) -> Result<Cell> {
        let s = self.quotient.simplex(c.dim, c.idx);
        let verts: Vec<usize> = positions.iter().map(|&p| s[p]).collect();
        let idx = self
            .quotient
            .find(&verts)
            .ok_or_else(|| Error::Invariant(format!("face {verts:?} missing")))?;
        let g = self
            .group()
            .mul(&c.g, &self.offsets[c.dim][c.idx][positions[0]])?;
        Ok(Cell {
            g,
            dim: positions.len() - 1,
            idx,
        })
    }

    /// Signed faces of a cell: `((-1)^i, face_i)`.
    pub fn faces(&self, c: &Cell) -> Result<Vec<(i64, Cell)>> {
        let k = c.dim;
        (0..=k)
            .map(|i| {
                let pos: Vec<usize> = (0..=k).filter(|&j| j != i).collect();
                let sign = if i % 2 == 0 { 1 } else { -1 };
                Ok((sign, self.sub_cell(c, &pos)?))
            })
            .collect()
    }

    /// Cofaces of a cover cell: `(sign, coface)` with `sign` the coefficient
    /// of `c` in `∂(coface)`.
    pub fn cofaces(&self, c: &Cell) -> Result<Vec<(i64, Cell)>> {
        let q = &self.quotient;
        let mut out = Vec::new();
        if c.dim >= q.dim() {
            return Ok(out);
        }
        for &(idx, i) in &self.cof[c.dim][c.idx] {
            let base_pos = if i == 0 { 1 } else { 0 };
            // c.g = h * offsets[base_pos]  =>  h = c.g * offsets[base_pos]^-1
            let off = &self.offsets[c.dim + 1][idx][base_pos];
            let h = self.group().mul(&c.g, &self.group().inv(off)?)?;
            let sign = if i % 2 == 0 { 1 } else { -1 };
            out.push((
                sign,
                Cell {
                    g: h,
                    dim: c.dim + 1,
                    idx,
                },
            ));
        }
        Ok(out)
    }

    /// Neighbor of a top cell across its i-th facet.
    pub fn neighbor(&self, c: &Cell, i: usize) -> Result<Cell> {
        let facet = self.faces(c)?.swap_remove(i).1;
        self.cofaces(&facet)?
            .into_iter()
            .map(|(_, d)| d)
            .find(|d| d != c)
            .ok_or_else(|| Error::Invariant("facet with a single coface".into()))
    }

    /// Largest number of simplices meeting a materialized vertex.
    pub fn max_vertex_degree_in_region(&self) -> Result<usize> {
        let mut deg: HashMap<Cell, usize> = HashMap::new();
        for c in self.cells() {
            if c.dim == 0 {
                continue;
            }
            for v in self.cell_vertices(&c)? {
                *deg.entry(v).or_default() += 1;
            }
        }
        // only vertices whose star is fully materialized are meaningful
        Ok(deg
            .into_iter()
            .filter(|(v, _)| self.in_region(&v.g))
            .map(|(_, d)| d)
            .max()
            .unwrap_or(0))
    }

    pub fn fundamental_domain(&self) -> Result<FundamentalDomain> {
        FundamentalDomain::new(self)
    }
}

/// One chosen lift `(h_σ, σ)` per quotient simplex. The cover cell `(g, σ)`
/// belongs to the translate `g · h_σ^-1`.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalDomain {
    /// `lifts[k][i]`.
    pub lifts: Vec<Vec<Elem>>,
    /// For lower simplices: the top simplex whose closure hosts the chosen lift.
    pub host: Vec<Vec<usize>>,
}

impl FundamentalDomain {
    fn new(pc: &PeriodicComplex) -> Result<Self> {
        let q = pc.quotient();
        let group = pc.group();
        let n = q.dim();
        let nt = q.count(n);
        let mut top: Vec<Option<Elem>> = vec![None; nt];
        if nt == 0 {
            return Err(Error::input("no top simplices"));
        }
        let cof = q.cofacets();
        top[0] = Some(group.identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let h = top[i].clone().unwrap();
            for (j, f) in q.faces(n, i) {
                let f = f.ok_or_else(|| Error::Invariant("missing facet".into()))?;
                let m = if j == 0 { 1 } else { 0 };
                let facet_g = group.mul(&h, &pc.offsets[n][i][m])?;
                for &(other, oj) in &cof[f] {
                    if top[other].is_some() {
                        continue;
                    }
                    let om = if oj == 0 { 1 } else { 0 };
                    let hg = group.mul(&facet_g, &group.inv(&pc.offsets[n][other][om])?)?;
                    top[other] = Some(hg);
                    queue.push_back(other);
                }
            }
        }
        let top: Vec<Elem> = top
            .into_iter()
            .map(|t| t.ok_or_else(|| Error::input("quotient is not strongly connected")))
            .collect::<Result<_>>()?;

        let mut lifts = Vec::with_capacity(n + 1);
        let mut host = Vec::with_capacity(n + 1);
        for k in 0..n {
            let mut lk = Vec::with_capacity(q.count(k));
            let mut hk = Vec::with_capacity(q.count(k));
            for s in q.simplices(k) {
                // least top simplex containing s (simplices are stored in lex order)
                let (ti, t) = q
                    .simplices(n)
                    .iter()
                    .enumerate()
                    .find(|(_, t)| s.iter().all(|v| t.contains(v)))
                    .ok_or_else(|| Error::input(format!("simplex {s:?} lies in no top simplex")))?;
                let m = t.iter().position(|v| *v == s[0]).unwrap();
                lk.push(group.mul(&top[ti], &pc.offsets[n][ti][m])?);
                hk.push(ti);
            }
            lifts.push(lk);
            host.push(hk);
        }
        lifts.push(top);
        host.push((0..nt).collect());
        Ok(FundamentalDomain { lifts, host })
    }

    /// The translate `g` with `cell ∈ g·K`.
    pub fn translate_of(&self, group: &MarkedGroup, c: &Cell) -> Result<Elem> {
        group.mul(&c.g, &group.inv(&self.lifts[c.dim][c.idx])?)
    }

    /// The cells of `g·K`.
    pub fn cells_of(&self, group: &MarkedGroup, g: &Elem) -> Result<Vec<Cell>> {
        let mut out = Vec::new();
        for (k, lk) in self.lifts.iter().enumerate() {
            for (idx, h) in lk.iter().enumerate() {
                out.push(Cell {
                    g: group.mul(g, h)?,
                    dim: k,
                    idx,
                });
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use std::collections::HashSet;

    fn cover(q: QuotientComplex) -> PeriodicComplex {
        PeriodicComplex::new(Arc::new(q)).unwrap()
    }

    #[test]
    fn expansion_counts() {
        let mut t = cover(fixtures::torus7());
        let total = t.quotient().total_cells();
        t.expand(0).unwrap();
        assert_eq!(t.cell_count(), total);
        assert!(t.cells().iter().all(|c| t.group().is_identity(&c.g)));
        t.expand(1).unwrap();
        assert_eq!(t.cell_count(), 5 * total);
        // monotone and idempotent
        t.expand(0).unwrap();
        assert_eq!(t.cell_count(), 5 * total);
        t.expand(1).unwrap();
        assert_eq!(t.cell_count(), 5 * total);

        let mut s = cover(fixtures::genus2());
        s.expand(1).unwrap();
        assert_eq!(s.cell_count(), 9 * s.quotient().total_cells());
    }

    #[test]
    fn deck_action_is_free_and_faces_match_cofaces() {
        let mut t = cover(fixtures::torus7());
        t.expand(2).unwrap();
        let cells = t.cells();
        let set: HashSet<&Cell> = cells.iter().collect();
        assert_eq!(set.len(), cells.len());
        for c in cells.iter().filter(|c| c.dim >= 1 && t.group().length(&c.g) <= 1) {
            for (sign, f) in t.faces(c).unwrap() {
                let back = t.cofaces(&f).unwrap();
                assert!(back.contains(&(sign, c.clone())), "{c:?} / {f:?}");
            }
        }
    }

    #[test]
    fn neighbors_are_symmetric() {
        let mut s = cover(fixtures::genus2());
        s.expand(1).unwrap();
        let c = Cell { g: s.group().identity(), dim: 2, idx: 5 };
        for i in 0..3 {
            let d = s.neighbor(&c, i).unwrap();
            let back: Vec<Cell> = (0..3).map(|j| s.neighbor(&d, j).unwrap()).collect();
            assert!(back.contains(&c));
        }
    }

    #[test]
    fn uniform_vertex_degree() {
        let mut t = cover(fixtures::torus7());
        t.expand(3).unwrap();
        // every vertex of the 7-vertex torus meets 6 edges and 6 triangles
        assert_eq!(t.max_vertex_degree_in_region().unwrap(), t.quotient().max_vertex_degree());
    }

    fn check_partition(pc: &PeriodicComplex, fd: &FundamentalDomain) {
        let group = pc.group();
        // each cell lies in exactly one translate; translates of K list it once
        let mut seen: HashMap<Cell, Elem> = HashMap::new();
        for g in pc.region() {
            for c in fd.cells_of(group, g).unwrap() {
                assert!(seen.insert(c.clone(), g.clone()).is_none(), "{c:?} twice");
            }
        }
        for c in pc.cells() {
            let g = fd.translate_of(group, &c).unwrap();
            if let Some(h) = seen.get(&c) {
                assert_eq!(*h, g);
            }
        }
        let identity_cells = fd.cells_of(group, &group.identity()).unwrap();
        assert_eq!(identity_cells.len(), pc.quotient().total_cells());
    }

    #[test]
    fn fundamental_domain_partitions() {
        let mut t = cover(fixtures::torus7());
        t.expand(2).unwrap();
        let fd = t.fundamental_domain().unwrap();
        check_partition(&t, &fd);
        // every cell of the region (deep inside) is claimed by some translate in the region
        let group = t.group().clone();
        for c in t.cells().iter().filter(|c| group.length(&c.g) == 0) {
            let g = fd.translate_of(&group, c).unwrap();
            assert!(fd.cells_of(&group, &g).unwrap().contains(c));
        }
        // base simplex is the least top simplex, lifted at the identity
        assert!(group.is_identity(&fd.lifts[2][0]));

        let mut s = cover(fixtures::genus2());
        s.expand(1).unwrap();
        let fd = s.fundamental_domain().unwrap();
        check_partition(&s, &fd);
    }

    #[test]
    fn lower_lifts_lie_in_chosen_top_closure() {
        let t = cover(fixtures::genus2());
        let fd = t.fundamental_domain().unwrap();
        let group = t.group();
        let n = t.dim();
        for k in 0..n {
            for idx in 0..t.quotient().count(k) {
                let top = Cell { g: fd.lifts[n][fd.host[k][idx]].clone(), dim: n, idx: fd.host[k][idx] };
                let s = t.quotient().simplex(k, idx).to_vec();
                let tv = t.quotient().simplex(n, top.idx).to_vec();
                let pos: Vec<usize> = s.iter().map(|v| tv.iter().position(|w| w == v).unwrap()).collect();
                let face = t.sub_cell(&top, &pos).unwrap();
                assert_eq!(face, Cell { g: fd.lifts[k][idx].clone(), dim: k, idx });
                let _ = group;
            }
        }
    }
}
