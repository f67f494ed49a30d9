//! Equivariant simplicial maps `sd^t X~ -> X~` with finitely many overridden
//! vertex images. Fixed points are solved exactly, cell by cell, in the
//! affine realization.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::chain::homology::{rank, solve};
use crate::complex::{subdivide_with_carriers, Cell, QuotientComplex, Subdivision};
use crate::error::{Error, Result};
use crate::group::{Elem, MarkedGroup};
use crate::Q;

/// Barycentric lattice step used to sample displacements.
pub const SAMPLE_STEPS: usize = 12;

/// What an affine problem `M λ = 0` has on the closed standard simplex.
#[derive(Clone, Debug, PartialEq)]
pub enum CellSolution {
    Empty,
    /// The unique solution, all coordinates positive.
    Interior(Vec<Q>),
    /// A unique solution on the boundary.
    Face(Vec<Q>),
    /// More than one solution.
    Continuum,
}

/// Solve `rows · λ = 0`, `Σ λ = 1`, `λ >= 0` by enumerating basic solutions.
pub fn solve_on_simplex(rows: &[Vec<Q>], n1: usize) -> CellSolution {
    let mut found: Vec<Vec<Q>> = Vec::new();
    for mask in 1u32..(1 << n1) {
        let support: Vec<usize> = (0..n1).filter(|i| mask & (1 << i) != 0).collect();
        let columns: Vec<Vec<Q>> = support
            .iter()
            .map(|&j| {
                let mut c: Vec<Q> = rows.iter().map(|r| r[j].clone()).collect();
                c.push(Q::one());
                c
            })
            .collect();
        // columns as rows for the rank test
        if rank(&columns) < support.len() {
            continue;
        }
        let mut rhs = vec![Q::zero(); rows.len()];
        rhs.push(Q::one());
        let Some(x) = solve(&columns, &rhs) else { continue };
        if x.iter().any(|v| v.is_negative()) {
            continue;
        }
        let mut lam = vec![Q::zero(); n1];
        for (j, v) in support.iter().zip(x) {
            lam[*j] = v;
        }
        if !found.contains(&lam) {
            found.push(lam);
        }
    }
    match found.len() {
        0 => CellSolution::Empty,
        1 => {
            let lam = found.pop().unwrap();
            if lam.iter().all(|v| v.is_positive()) {
                CellSolution::Interior(lam)
            } else {
                CellSolution::Face(lam)
            }
        }
        _ => CellSolution::Continuum,
    }
}

/// Determinant of a linear map of `R^{n+1}` that preserves `{Σ = 0}`,
/// restricted there, in the basis `e_j - e_0`.
pub fn tangent_det(m: &[Vec<Q>]) -> Q {
    let n = m.len() - 1;
    let mut t = vec![vec![Q::zero(); n]; n];
    for j in 1..=n {
        for (i, row) in t.iter_mut().enumerate() {
            row[j - 1] = &m[i + 1][j] - &m[i + 1][0];
        }
    }
    det_q(t)
}

pub fn det_q(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for r in (c + 1)..n {
            let f = &a[r][c] / &a[c][c];
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let v = &f * &a[c][k];
                a[r][k] -= v;
            }
        }
    }
    d
}

fn inverse_q(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    let columns: Vec<Vec<Q>> = (0..n).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect();
    if rank(&columns) < n {
        return None;
    }
    for j in 0..n {
        let e: Vec<Q> = (0..n).map(|i| if i == j { Q::one() } else { Q::zero() }).collect();
        cols.push(solve(&columns, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Where a top simplex `τ` of `sd^t X` sits in `X~`: its representative lift
/// lies in the base top cell `(g, U)`, vertex `j` at barycentric `a[j]`.
#[derive(Clone, Debug)]
struct Chart {
    g: Elem,
    u: usize,
    a: Vec<Vec<Q>>,
}

/// A cover vertex: deck translate and quotient vertex.
pub type Vertex = (Elem, usize);

/// Fixed point of one cover cell.
#[derive(Clone, Debug)]
pub struct CellFixedPoint {
    /// Top cell of the subdivided cover.
    pub host: Cell,
    /// Top cell of the base cover carrying it.
    pub carrier: Cell,
    pub bary: Vec<Q>,
    pub index: i64,
}

#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub base: Arc<QuotientComplex>,
    pub sd: Arc<Subdivision>,
    /// Image of the representative lift of each `sd^t` vertex.
    pub images: Vec<Vertex>,
    /// Overridden images of individual cover vertices `(g, w)`.
    pub overrides: BTreeMap<Vertex, Vertex>,
    /// Declared displacement bound in the word metric of the deck group.
    pub bound: Option<usize>,
    charts: Vec<Chart>,
    /// `offsets[τ][j] = label(τ_0 -> τ_j)` in `sd^t X`.
    offsets: Vec<Vec<Elem>>,
}

impl SimplicialMap {
    pub fn new(
        base: Arc<QuotientComplex>,
        subdivision: usize,
        images: Vec<Vertex>,
        overrides: BTreeMap<Vertex, Vertex>,
        bound: Option<usize>,
    ) -> Result<Self> {
        let sd = Arc::new(subdivide_with_carriers(base.clone(), subdivision)?);
        let fine = &sd.complex;
        if images.len() != fine.n_vertices() {
            return Err(Error::input(format!(
                "map lists {} vertex images, the subdivision has {} vertices",
                images.len(),
                fine.n_vertices()
            )));
        }
        for (_, v) in images.iter().chain(overrides.values()) {
            if *v >= base.n_vertices() {
                return Err(Error::input(format!("image vertex {v} does not exist")));
            }
        }
        if let Some(((_, w), _)) = overrides.iter().find(|((_, w), _)| *w >= fine.n_vertices()) {
            return Err(Error::input(format!("override names vertex {w}, which does not exist")));
        }
        let n = fine.dim();
        let mut offsets = Vec::with_capacity(fine.count(n));
        let mut charts = Vec::with_capacity(fine.count(n));
        for tau in fine.simplices(n) {
            let off: Vec<Elem> = tau.iter().map(|&v| fine.label(tau[0], v)).collect::<Result<_>>()?;
            charts.push(chart(&sd, tau, &off)?);
            offsets.push(off);
        }
        let m = SimplicialMap {
            base,
            sd,
            images,
            overrides,
            bound,
            charts,
            offsets,
        };
        // simpliciality on every equivariant cell and every overridden one
        for ti in 0..m.charts.len() {
            m.image_cell(&m.group().identity(), ti)?;
        }
        for (d, ti) in m.affected_cells()? {
            m.image_cell(&d, ti)?;
        }
        if let Some(b) = bound {
            let got = m.displacement()?;
            if got > b {
                return Err(Error::input(format!(
                    "declared displacement bound {b} is exceeded: a vertex moves {got} deck steps"
                )));
            }
        }
        Ok(m)
    }

    pub fn group(&self) -> &MarkedGroup {
        self.base.group()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn subdivision(&self) -> usize {
        self.sd.times
    }

    pub fn is_equivariant(&self) -> bool {
        self.overrides.is_empty()
    }

    /// Base vertex of each image: the descended map `sd^t X -> X`.
    pub fn descended(&self) -> Vec<usize> {
        self.images.iter().map(|(_, v)| *v).collect()
    }

    fn image_of(&self, deck: &Elem, w: usize) -> Result<Vertex> {
        if let Some(img) = self.overrides.get(&(deck.clone(), w)) {
            return Ok(img.clone());
        }
        let (h, v) = &self.images[w];
        Ok((self.group().mul(deck, h)?, *v))
    }

    /// Image cell of the cover cell `(d, τ)`: `(g_W, W, position of each image vertex in W)`.
    fn image_cell(&self, d: &Elem, ti: usize) -> Result<(Elem, Vec<usize>, Vec<usize>)> {
        let group = self.group();
        let fine = &self.sd.complex;
        let tau = fine.simplex(fine.dim(), ti);
        let mut imgs = Vec::with_capacity(tau.len());
        for (j, &w) in tau.iter().enumerate() {
            imgs.push(self.image_of(&group.mul(d, &self.offsets[ti][j])?, w)?);
        }
        let mut wv: Vec<usize> = imgs.iter().map(|(_, v)| *v).collect();
        wv.sort_unstable();
        wv.dedup();
        let not_simplicial = || {
            Error::input(format!(
                "map is not simplicial on cell ({}, {tau:?}): images {:?}",
                group.format(d),
                imgs.iter().map(|(g, v)| (group.format(g), *v)).collect::<Vec<_>>()
            ))
        };
        if self.base.find(&wv).is_none() {
            return Err(not_simplicial());
        }
        let mut g_w: Option<Elem> = None;
        for (deck, v) in &imgs {
            let cand = group.mul(deck, &group.inv(&self.base.label(wv[0], *v)?)?)?;
            match &g_w {
                None => g_w = Some(cand),
                Some(g) if *g != cand => return Err(not_simplicial()),
                _ => {}
            }
        }
        let pos = imgs.iter().map(|(_, v)| wv.iter().position(|x| x == v).unwrap()).collect();
        Ok((g_w.unwrap(), wv, pos))
    }

    /// Cover cells touched by an override.
    pub fn affected_cells(&self) -> Result<BTreeSet<(Elem, usize)>> {
        let group = self.group();
        let fine = &self.sd.complex;
        let n = fine.dim();
        let mut out = BTreeSet::new();
        for (g, w) in self.overrides.keys() {
            for (ti, tau) in fine.simplices(n).iter().enumerate() {
                if let Some(j) = tau.iter().position(|v| v == w) {
                    let d = group.mul(g, &group.inv(&self.offsets[ti][j])?)?;
                    out.insert((d, ti));
                }
            }
        }
        Ok(out)
    }

    /// Rows of `x - F(x)` over the cover vertices involved, as linear forms in `λ`.
    fn displacement_rows(&self, d: &Elem, ti: usize) -> Result<BTreeMap<Vertex, Vec<Q>>> {
        let group = self.group();
        let n1 = self.dim() + 1;
        let ch = &self.charts[ti];
        let u = self.base.simplex(self.dim(), ch.u);
        let gu = group.mul(d, &ch.g)?;
        let mut rows: BTreeMap<Vertex, Vec<Q>> = BTreeMap::new();
        for (i, &v) in u.iter().enumerate() {
            let key = (group.mul(&gu, &self.base.label(u[0], v)?)?, v);
            let row = rows.entry(key).or_insert_with(|| vec![Q::zero(); n1]);
            for j in 0..n1 {
                row[j] += &ch.a[j][i];
            }
        }
        let (g_w, wv, pos) = self.image_cell(d, ti)?;
        for (j, p) in pos.iter().enumerate() {
            let v = wv[*p];
            let key = (group.mul(&g_w, &self.base.label(wv[0], v)?)?, v);
            let row = rows.entry(key).or_insert_with(|| vec![Q::zero(); n1]);
            row[j] -= Q::one();
        }
        Ok(rows)
    }

    /// The fixed point of the cover cell `(d, τ)`, if any.
    pub fn solve_cell(&self, d: &Elem, ti: usize) -> Result<Option<CellFixedPoint>> {
        let n = self.dim();
        let rows: Vec<Vec<Q>> = self.displacement_rows(d, ti)?.into_values().collect();
        let tau = self.sd.complex.simplex(n, ti);
        let group = self.group();
        match solve_on_simplex(&rows, n + 1) {
            CellSolution::Empty => Ok(None),
            CellSolution::Continuum => Err(Error::NotTame(format!(
                "fixed points are not isolated in cell ({}, {tau:?})",
                group.format(d)
            ))),
            CellSolution::Face(l) => Err(Error::FaceFixedPoint(format!(
                "fixed point on a face of cell ({}, {tau:?}) at barycentric ({})",
                group.format(d),
                l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
            ))),
            CellSolution::Interior(l) => {
                let ch = &self.charts[ti];
                let (g_w, wv, pos) = self.image_cell(d, ti)?;
                let gu = group.mul(d, &ch.g)?;
                if g_w != gu || wv != self.base.simplex(n, ch.u) {
                    return Err(Error::Invariant("interior fixed point outside its own cell".into()));
                }
                // x = A λ, F(x) = B λ in the chart of U; Df = B A^-1
                let a: Vec<Vec<Q>> = (0..=n).map(|i| (0..=n).map(|j| ch.a[j][i].clone()).collect()).collect();
                let ainv = inverse_q(&a).ok_or_else(|| Error::Invariant("degenerate chart".into()))?;
                let mut m = vec![vec![Q::zero(); n + 1]; n + 1];
                for (i, row) in m.iter_mut().enumerate() {
                    for (k, cell) in row.iter_mut().enumerate() {
                        // (B A^-1)_{ik} = Σ_j B_ij Ainv_jk, B_ij = [pos_j == i]
                        let mut s = Q::zero();
                        for (j, p) in pos.iter().enumerate() {
                            if *p == i {
                                s += &ainv[j][k];
                            }
                        }
                        *cell = if i == k { Q::one() - s } else { -s };
                    }
                }
                let det = tangent_det(&m);
                if det.is_zero() {
                    return Err(Error::Invariant("isolated affine fixed point with singular derivative".into()));
                }
                Ok(Some(CellFixedPoint {
                    host: Cell {
                        g: d.clone(),
                        dim: n,
                        idx: ti,
                    },
                    carrier: Cell {
                        g: gu,
                        dim: n,
                        idx: ch.u,
                    },
                    bary: l,
                    index: if det.is_positive() { 1 } else { -1 },
                }))
            }
        }
    }

    /// ℓ¹ distance between `x` and `F(x)` in barycentric coordinates over the
    /// cover vertices (at most 2).
    pub fn displacement_at(&self, d: &Elem, ti: usize, lam: &[Q]) -> Result<Q> {
        let rows = self.displacement_rows(d, ti)?;
        Ok(rows
            .values()
            .map(|r| r.iter().zip(lam).map(|(a, b)| a * b).sum::<Q>().abs())
            .sum())
    }

    /// Minimum sampled displacement on the barycentric lattice of step
    /// `1/SAMPLE_STEPS`, skipping `|λ - λ*|_∞ < δ` around each fixed point.
    pub fn sample_min(&self, d: &Elem, ti: usize, avoid: &[(Vec<Q>, Q)]) -> Result<Q> {
        let n1 = self.dim() + 1;
        let m = SAMPLE_STEPS;
        let mut best: Option<Q> = None;
        let mut counts = vec![0usize; n1];
        let denom = Q::from_integer((m as i64).into());
        loop {
            let used: usize = counts[..n1 - 1].iter().sum();
            if used <= m {
                counts[n1 - 1] = m - used;
                let lam: Vec<Q> = counts.iter().map(|c| Q::from_integer((*c as i64).into()) / &denom).collect();
                let inside = avoid.iter().any(|(p, r)| {
                    lam.iter().zip(p).map(|(a, b)| (a - b).abs()).max().is_some_and(|v| v < *r)
                });
                if !inside {
                    let v = self.displacement_at(d, ti, &lam)?;
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
            // odometer over the first n coordinates
            let mut k = 0;
            loop {
                if k == n1 - 1 {
                    return Ok(best.unwrap_or_else(|| Q::from_integer(2.into())));
                }
                if counts[k] < m {
                    counts[k] += 1;
                    break;
                }
                counts[k] = 0;
                k += 1;
            }
        }
    }

    /// Largest deck distance between a vertex's carrier and its image.
    pub fn displacement(&self) -> Result<usize> {
        let group = self.group();
        let mut worst = 0;
        for (w, (h, _)) in self.images.iter().enumerate() {
            worst = worst.max(group.distance(&self.sd.carriers[w].g, h)?);
        }
        for ((g, w), (h, _)) in &self.overrides {
            let c = group.mul(g, &self.sd.carriers[*w].g)?;
            worst = worst.max(group.distance(&c, h)?);
        }
        Ok(worst)
    }

    /// `F ∘ θ` on one more subdivision, `θ` the least-vertex approximation of
    /// the identity `sd^{t+1} X -> sd^t X`.
    pub fn refined(&self) -> Result<Self> {
        let fine = &self.sd.complex;
        let step = subdivide_with_carriers(Arc::new(fine.clone()), 1)?;
        let theta: Vec<usize> = step
            .carriers
            .iter()
            .map(|c| fine.simplex(c.dim, c.idx)[0])
            .collect();
        let images = theta.iter().map(|&w| self.images[w].clone()).collect();
        let mut overrides = BTreeMap::new();
        for ((g, w), img) in &self.overrides {
            for (w2, t) in theta.iter().enumerate() {
                if t == w {
                    overrides.insert((g.clone(), w2), img.clone());
                }
            }
        }
        let out = SimplicialMap::new(self.base.clone(), self.sd.times + 1, images, overrides, self.bound)?;
        if out.sd.complex.n_vertices() != step.complex.n_vertices() {
            return Err(Error::Invariant("refinement does not match the subdivision tower".into()));
        }
        Ok(out)
    }

    pub fn top_count(&self) -> usize {
        self.charts.len()
    }
}

/// Chart of the representative lift of `τ` (per-vertex version of the
/// carrier composition used by the subdivision).
fn chart(sd: &Subdivision, tau: &[usize], off: &[Elem]) -> Result<Chart> {
    let base = &sd.base;
    let group = base.group();
    let n = base.dim();
    let mut union: Vec<usize> = Vec::new();
    for &w in tau {
        let c = &sd.carriers[w];
        union.extend_from_slice(base.simplex(c.dim, c.idx));
    }
    union.sort_unstable();
    union.dedup();
    if union.len() != n + 1 {
        return Err(Error::Invariant(format!("top simplex {tau:?} is not carried by a top simplex")));
    }
    let u = base
        .find(&union)
        .ok_or_else(|| Error::Invariant(format!("carrier {union:?} is not a simplex")))?;
    let mut g_u: Option<Elem> = None;
    let mut a = Vec::with_capacity(tau.len());
    for (&w, o) in tau.iter().zip(off) {
        let c = &sd.carriers[w];
        let face = base.simplex(c.dim, c.idx);
        let g = group.mul(o, &c.g)?;
        let cand = group.mul(&g, &group.inv(&base.label(union[0], face[0])?)?)?;
        match &g_u {
            None => g_u = Some(cand),
            Some(prev) if *prev != cand => {
                return Err(Error::Invariant("chart vertices disagree on their carrier translate".into()))
            }
            _ => {}
        }
        let mut col = vec![Q::zero(); n + 1];
        for (v, lam) in face.iter().zip(&c.bary) {
            col[union.iter().position(|x| x == v).unwrap()] += lam;
        }
        a.push(col);
    }
    Ok(Chart { g: g_u.unwrap(), u, a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use crate::q;

    fn trivial_map(q: QuotientComplex, vmap: Vec<usize>) -> SimplicialMap {
        let e = q.group().identity();
        SimplicialMap::new(Arc::new(q), 0, vmap.into_iter().map(|v| (e.clone(), v)).collect(), BTreeMap::new(), None)
            .unwrap()
    }

    fn fixed_points(m: &SimplicialMap) -> Result<Vec<CellFixedPoint>> {
        let e = m.group().identity();
        let mut out = Vec::new();
        for ti in 0..m.top_count() {
            out.extend(m.solve_cell(&e, ti)?);
        }
        Ok(out)
    }

    #[test]
    fn simplex_solver_cases() {
        // x - F(x) for F = rotation of the 2-simplex: unique interior point
        let rows = vec![
            vec![q(1, 1), q(0, 1), q(-1, 1)],
            vec![q(-1, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(-1, 1), q(1, 1)],
        ];
        assert_eq!(solve_on_simplex(&rows, 3), CellSolution::Interior(vec![q(1, 3); 3]));
        let zero = vec![vec![q(0, 1); 3]; 3];
        assert_eq!(solve_on_simplex(&zero, 3), CellSolution::Continuum);
        // swap of vertices 0 and 1: fixed set is a segment
        let swap = vec![
            vec![q(1, 1), q(-1, 1), q(0, 1)],
            vec![q(-1, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1); 3],
        ];
        assert_eq!(solve_on_simplex(&swap, 3), CellSolution::Continuum);
    }

    #[test]
    fn octahedron_rotation_has_two_positive_fixed_points() {
        let m = trivial_map(fixtures::octahedron(), fixtures::octahedron_rotation());
        let fps = fixed_points(&m).unwrap();
        assert_eq!(fps.len(), 2);
        for p in &fps {
            assert_eq!(p.bary, vec![q(1, 3); 3]);
            assert_eq!(p.index, 1);
        }
    }

    #[test]
    fn antipodal_map_is_fixed_point_free() {
        let m = trivial_map(fixtures::octahedron(), fixtures::octahedron_antipodal());
        assert!(fixed_points(&m).unwrap().is_empty());
        let e = m.group().identity();
        let third = vec![q(1, 3); 3];
        assert_eq!(m.displacement_at(&e, 0, &third).unwrap(), q(2, 1));
    }

    #[test]
    fn identity_is_not_tame() {
        let m = trivial_map(fixtures::octahedron(), (0..6).collect());
        assert!(matches!(fixed_points(&m), Err(Error::NotTame(_))));
    }

    #[test]
    fn refined_rotation_keeps_total_index() {
        let m = trivial_map(fixtures::octahedron(), fixtures::octahedron_rotation());
        let r = m.refined().unwrap();
        let fps = fixed_points(&r).unwrap();
        assert_eq!(fps.iter().map(|p| p.index).sum::<i64>(), 2);
        let rr = r.refined().unwrap();
        let fps = fixed_points(&rr).unwrap();
        assert_eq!(fps.iter().map(|p| p.index).sum::<i64>(), 2);
    }

    #[test]
    fn non_simplicial_vertex_map_rejected() {
        let o = fixtures::octahedron();
        let e = o.group().identity();
        let r = SimplicialMap::new(
            Arc::new(o),
            0,
            [0, 1, 2, 3, 4, 1].into_iter().map(|v| (e.clone(), v)).collect(),
            BTreeMap::new(),
            None,
        );
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn tangent_determinant_of_half_turn() {
        // I - Df for Df = -I on the tangent plane: det 4
        let mut m = vec![vec![q(0, 1); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = q(2, 1);
        }
        assert_eq!(tangent_det(&m), q(4, 1));
    }
}
