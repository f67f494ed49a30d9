//! Rational homology of a finite quotient and classical Lefschetz numbers.
//! Everything is exact; floating point never enters.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex::{sort_with_sign, subdivide_with_carriers, QuotientComplex};
use crate::error::{Error, Result};
use crate::Q;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut w = m.to_vec();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); cols];
            x[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -w[r][f].clone();
            }
            x
        })
        .collect()
}

/// Solve `Σ x_j columns[j] = v`, if possible.
pub fn solve(columns: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let n = v.len();
    let k = columns.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Q::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = m[r][k].clone();
    }
    Some(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientHomology {
    pub betti: Vec<usize>,
    /// `boundaries[k]`: matrix of `∂_k : C_k -> C_{k-1}` (rows: (k-1)-simplices).
    #[serde(skip)]
    pub boundaries: Vec<Vec<Vec<Q>>>,
    /// Cycle representatives of a homology basis, per degree.
    #[serde(skip)]
    pub cycles: Vec<Vec<Vec<Q>>>,
}

impl QuotientHomology {
    /// Coordinates of a k-cycle in the chosen homology basis.
    pub fn coordinates(&self, k: usize, z: &[Q]) -> Result<Vec<Q>> {
        let mut cols = self.cycles[k].clone();
        let h = cols.len();
        if k + 1 < self.boundaries.len() {
            let b = &self.boundaries[k + 1];
            let ncols = b.first().map_or(0, |r| r.len());
            for j in 0..ncols {
                cols.push(b.iter().map(|row| row[j].clone()).collect());
            }
        }
        let x = solve(&cols, z)
            .ok_or_else(|| Error::Invariant(format!("degree-{k} chain is not a cycle")))?;
        Ok(x[..h].to_vec())
    }
}

pub fn boundary_matrix(q: &QuotientComplex, k: usize) -> Vec<Vec<Q>> {
    let mut m = vec![vec![Q::zero(); q.count(k)]; q.count(k - 1)];
    for i in 0..q.count(k) {
        for (j, f) in q.faces(k, i) {
            if let Some(f) = f {
                m[f][i] = if j % 2 == 0 { Q::one() } else { -Q::one() };
            }
        }
    }
    m
}

pub fn quotient_homology(q: &QuotientComplex) -> Result<QuotientHomology> {
    let n = q.dim();
    let mut boundaries = vec![Vec::new()];
    for k in 1..=n {
        boundaries.push(boundary_matrix(q, k));
    }
    let mut betti = Vec::with_capacity(n + 1);
    let mut cycles = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let ck = q.count(k);
        let z = if k == 0 {
            (0..ck)
                .map(|i| {
                    let mut e = vec![Q::zero(); ck];
                    e[i] = Q::one();
                    e
                })
                .collect()
        } else {
            nullspace(&boundaries[k], ck)
        };
        let mut span: Vec<Vec<Q>> = Vec::new();
        if k < n {
            let b = &boundaries[k + 1];
            for j in 0..q.count(k + 1) {
                span.push(b.iter().map(|row| row[j].clone()).collect());
            }
        }
        // greedy extension of im ∂_{k+1} by cycles
        let mut as_rows: Vec<Vec<Q>> = span.clone();
        let mut r = rank(&as_rows);
        let mut basis = Vec::new();
        for v in z {
            as_rows.push(v.clone());
            let r2 = rank(&as_rows);
            if r2 > r {
                r = r2;
                basis.push(v);
            } else {
                as_rows.pop();
            }
        }
        betti.push(basis.len());
        cycles.push(basis);
    }
    Ok(QuotientHomology {
        betti,
        boundaries,
        cycles,
    })
}

type Chain = BTreeMap<Vec<usize>, i64>;

fn add_term(c: &mut Chain, s: Vec<usize>, a: i64) {
    if a == 0 {
        return;
    }
    let e = c.entry(s.clone()).or_insert(0);
    *e += a;
    if *e == 0 {
        c.remove(&s);
    }
}

/// Subdivision operator `C(K) -> C(sd K)`, `Sd σ = b_σ · Sd(∂σ)`.
struct SdMap<'a> {
    k: &'a QuotientComplex,
    id_of: Vec<Vec<usize>>,
    memo: HashMap<(usize, usize), Chain>,
}

impl<'a> SdMap<'a> {
    fn new(k: &'a QuotientComplex) -> Self {
        let mut id_of = Vec::new();
        let mut next = 0;
        for d in 0..=k.dim() {
            id_of.push((next..next + k.count(d)).collect());
            next += k.count(d);
        }
        SdMap {
            k,
            id_of,
            memo: HashMap::new(),
        }
    }

    fn apply_simplex(&mut self, d: usize, i: usize) -> Chain {
        if let Some(c) = self.memo.get(&(d, i)) {
            return c.clone();
        }
        let mut out = Chain::new();
        if d == 0 {
            out.insert(vec![self.id_of[0][i]], 1);
        } else {
            let b = self.id_of[d][i];
            let sign = if d.is_multiple_of(2) { 1 } else { -1 };
            for (j, f) in self.k.faces(d, i) {
                let f = f.expect("valid complex");
                let fs = if j % 2 == 0 { 1 } else { -1 };
                for (w, a) in self.apply_simplex(d - 1, f) {
                    let mut s = w;
                    s.push(b);
                    add_term(&mut out, s, sign * fs * a);
                }
            }
        }
        self.memo.insert((d, i), out.clone());
        out
    }

    fn apply(&mut self, c: &Chain) -> Chain {
        let mut out = Chain::new();
        for (s, a) in c {
            let d = s.len() - 1;
            let i = self.k.find(s).expect("simplex of the complex");
            for (w, b) in self.apply_simplex(d, i) {
                add_term(&mut out, w, a * b);
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LefschetzReport {
    pub lefschetz: i64,
    pub traces: Vec<i64>,
    /// Alternating chain-level trace (Hopf trace formula); equals `lefschetz`.
    pub hopf_trace: i64,
}

/// Classical Lefschetz number of the map induced by a simplicial map
/// `fbar: sd^t(q) -> q`, given on vertices.
pub fn lefschetz_number_quotient(q: &QuotientComplex, t: usize, fbar: &[usize]) -> Result<i64> {
    Ok(lefschetz_report(q, t, fbar)?.lefschetz)
}

pub fn lefschetz_report(q: &QuotientComplex, t: usize, fbar: &[usize]) -> Result<LefschetzReport> {
    let sd = subdivide_with_carriers(Arc::new(q.clone()), t)?;
    let fine = &sd.complex;
    if fbar.len() != fine.n_vertices() {
        return Err(Error::input(format!(
            "vertex map has {} entries, subdivision has {} vertices",
            fbar.len(),
            fine.n_vertices()
        )));
    }
    if let Some(v) = fbar.iter().find(|v| **v >= q.n_vertices()) {
        return Err(Error::input(format!("vertex map hits {v}, which is not a vertex")));
    }
    for s in fine.simplices(fine.dim()) {
        let mut img: Vec<usize> = s.iter().map(|&v| fbar[v]).collect();
        img.sort_unstable();
        img.dedup();
        if q.find(&img).is_none() {
            return Err(Error::input(format!(
                "map is not simplicial: {s:?} goes to {img:?}, which is not a simplex"
            )));
        }
    }
    // chain of levels for the iterated subdivision operator
    let mut levels = vec![q.clone()];
    for _ in 0..t {
        let next = crate::complex::barycentric_subdivide(levels.last().unwrap(), 1)?;
        levels.push(next);
    }
    let n = q.dim();
    let image = |s: &[usize]| -> Chain {
        let mut c = Chain::new();
        let mut cur: Chain = [(s.to_vec(), 1)].into_iter().collect();
        for lvl in levels.iter().take(t) {
            cur = SdMap::new(lvl).apply(&cur);
        }
        for (w, a) in cur {
            let img: Vec<usize> = w.iter().map(|&v| fbar[v]).collect();
            let (sorted, sign) = sort_with_sign(&img);
            if sign != 0 {
                add_term(&mut c, sorted, a * i64::from(sign));
            }
        }
        c
    };
    let hom = quotient_homology(q)?;
    let mut traces = Vec::with_capacity(n + 1);
    let mut hopf = 0i64;
    for k in 0..=n {
        let images: Vec<Chain> = q.simplices(k).iter().map(|s| image(s)).collect();
        let chain_trace: i64 = q
            .simplices(k)
            .iter()
            .zip(&images)
            .map(|(s, c)| c.get(s).copied().unwrap_or(0))
            .sum();
        hopf += if k % 2 == 0 { chain_trace } else { -chain_trace };
        let mut tr = Q::zero();
        for (bi, z) in hom.cycles[k].iter().enumerate() {
            let mut fz = vec![Q::zero(); q.count(k)];
            for (i, zi) in z.iter().enumerate() {
                if zi.is_zero() {
                    continue;
                }
                for (s, a) in &images[i] {
                    let j = q.find(s).expect("image simplex");
                    fz[j] += zi * Q::from_integer((*a).into());
                }
            }
            tr += &hom.coordinates(k, &fz)?[bi];
        }
        if !tr.is_integer() {
            return Err(Error::Invariant("non-integral trace on rational homology".into()));
        }
        traces.push(i64::try_from(tr.to_integer()).map_err(|_| Error::Invariant("trace overflow".into()))?);
    }
    let lefschetz = traces
        .iter()
        .enumerate()
        .map(|(k, t)| if k % 2 == 0 { *t } else { -t })
        .sum();
    Ok(LefschetzReport {
        lefschetz,
        traces,
        hopf_trace: hopf,
    })
}

/// Vertex map of `sd^t(q)` sending each vertex to the least vertex of its
/// carrier: a simplicial approximation of the identity.
pub fn identity_approximation(q: &QuotientComplex, t: usize) -> Result<Vec<usize>> {
    let sd = subdivide_with_carriers(Arc::new(q.clone()), t)?;
    Ok(sd
        .carriers
        .iter()
        .map(|c| q.simplex(c.dim, c.idx)[0])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;

    #[test]
    fn betti_numbers() {
        assert_eq!(quotient_homology(&fixtures::tetrahedron()).unwrap().betti, vec![1, 0, 1]);
        assert_eq!(quotient_homology(&fixtures::torus7()).unwrap().betti, vec![1, 2, 1]);
        assert_eq!(quotient_homology(&fixtures::genus2()).unwrap().betti, vec![1, 4, 1]);
    }

    #[test]
    fn lefschetz_of_identity_is_euler_characteristic() {
        let t7 = fixtures::torus7();
        let id: Vec<usize> = (0..7).collect();
        assert_eq!(lefschetz_number_quotient(&t7, 0, &id).unwrap(), 0);
        let s2 = fixtures::tetrahedron();
        assert_eq!(lefschetz_number_quotient(&s2, 0, &[0, 1, 2, 3]).unwrap(), 2);
        for t in 1..=2 {
            let approx = identity_approximation(&s2, t).unwrap();
            let r = lefschetz_report(&s2, t, &approx).unwrap();
            assert_eq!((r.lefschetz, r.hopf_trace), (2, 2));
        }
        let approx = identity_approximation(&t7, 1).unwrap();
        let r = lefschetz_report(&t7, 1, &approx).unwrap();
        assert_eq!(r.traces, vec![1, 2, 1]);
    }

    #[test]
    fn reflection_and_rotation() {
        // swapping two vertices of the tetrahedron reverses orientation
        let r = lefschetz_report(&fixtures::tetrahedron(), 0, &[1, 0, 2, 3]).unwrap();
        assert_eq!(r.traces, vec![1, 0, -1]);
        assert_eq!(r.lefschetz, 0);
        let o = fixtures::octahedron();
        assert_eq!(lefschetz_number_quotient(&o, 0, &fixtures::octahedron_rotation()).unwrap(), 2);
        assert_eq!(lefschetz_number_quotient(&o, 0, &fixtures::octahedron_antipodal()).unwrap(), 0);
    }

    #[test]
    fn non_simplicial_map_rejected() {
        // 6 vertices onto the octahedron: +x and -x are not adjacent
        let o = fixtures::octahedron();
        assert!(matches!(
            lefschetz_number_quotient(&o, 0, &[0, 1, 2, 3, 4, 1]),
            Err(Error::Input(_))
        ));
    }
}
