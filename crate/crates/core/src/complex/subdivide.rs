//! Barycentric subdivision with inherited orientation, labels and tree.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::{QuotientComplex, QuotientData};
use crate::error::{Error, Result};
use crate::group::Elem;
use crate::Q;

pub const MAX_SUBDIVISIONS: usize = 3;

/// Where a vertex of a subdivision sits in the original cover: inside cell
/// `(g, σ)` of the original quotient, with barycentric coordinates `bary`
/// (positive, one per vertex of `σ`). This is the carrier of the
/// representative lift `(identity, w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Carrier {
    pub g: Elem,
    pub dim: usize,
    pub idx: usize,
    pub bary: Vec<Q>,
}

#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: QuotientComplex,
    /// Original quotient.
    pub base: Arc<QuotientComplex>,
    pub times: usize,
    /// Carrier of each vertex of `complex` in `base`.
    pub carriers: Vec<Carrier>,
}

/// `times`-fold barycentric subdivision.
pub fn barycentric_subdivide(q: &QuotientComplex, times: usize) -> Result<QuotientComplex> {
    Ok(subdivide_with_carriers(Arc::new(q.clone()), times)?.complex)
}

/// Identity "subdivision" (zero steps).
pub fn trivial_subdivision(q: Arc<QuotientComplex>) -> Subdivision {
    let carriers = (0..q.n_vertices())
        .map(|v| Carrier {
            g: q.group().identity(),
            dim: 0,
            idx: v,
            bary: vec![Q::one()],
        })
        .collect();
    Subdivision {
        complex: (*q).clone(),
        base: q,
        times: 0,
        carriers,
    }
}

pub fn subdivide_with_carriers(q: Arc<QuotientComplex>, times: usize) -> Result<Subdivision> {
    if times > MAX_SUBDIVISIONS {
        return Err(Error::Budget {
            what: "barycentric subdivision".into(),
            flag: "--subdivide",
            needed: times,
            limit: MAX_SUBDIVISIONS,
        });
    }
    q.require_valid()?;
    let mut cur = trivial_subdivision(q);
    for _ in 0..times {
        cur = step(&cur)?;
    }
    Ok(cur)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut r = p.clone();
            r.insert(i, n - 1);
            out.push(r);
        }
    }
    out.sort();
    out
}

fn perm_sign(p: &[usize]) -> i8 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn step(prev: &Subdivision) -> Result<Subdivision> {
    let q = &prev.complex;
    let group = q.group_arc();
    let n = q.dim();
    // new vertex id of each simplex, dimension-major
    let mut id_of: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    let mut next = 0usize;
    for k in 0..=n {
        id_of.push((next..next + q.count(k)).collect());
        next += q.count(k);
    }
    let n_new = next;

    let mut data = QuotientData {
        dim: n,
        n_vertices: n_new,
        ..Default::default()
    };
    for (ti, t) in q.simplices(n).iter().enumerate() {
        let s = q.orientation(ti);
        for p in permutations(n + 1) {
            let mut verts = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let mut face: Vec<usize> = p[..=k].iter().map(|&i| t[i]).collect();
                face.sort_unstable();
                let idx = q
                    .find(&face)
                    .ok_or_else(|| Error::Invariant(format!("missing face {face:?}")))?;
                verts.push(id_of[k][idx]);
            }
            data.orientation.push((verts.clone(), s * perm_sign(&p)));
            data.simplices.push(verts);
        }
    }
    data.close_downward();

    // labels: b(σ) -> b(σ') for σ ⊊ σ' is label(σ'_0 -> min σ)^-1
    for kk in 1..=n {
        for (j, t) in q.simplices(kk).iter().enumerate() {
            for mask in 1u32..((1 << t.len()) - 1) {
                let s: Vec<usize> = (0..t.len())
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| t[b])
                    .collect();
                let i = q
                    .find(&s)
                    .ok_or_else(|| Error::Invariant(format!("missing face {s:?}")))?;
                let l = group.inv(&q.label(t[0], s[0])?)?;
                if !group.is_identity(&l) {
                    data.labels.push((id_of[s.len() - 1][i], id_of[kk][j], l));
                }
            }
        }
    }

    if !q.tree_edges().is_empty() {
        for k in 1..=n {
            for (j, t) in q.simplices(k).iter().enumerate() {
                data.tree.push((t[0], id_of[k][j]));
            }
        }
        for &e in q.tree_edges() {
            let s = q.simplex(1, e);
            data.tree.push((s[1], id_of[1][e]));
        }
    }

    // carriers and coordinates of the barycenters
    let mut carriers = Vec::with_capacity(n_new);
    let mut coords: Option<Vec<Vec<Q>>> = q.coords().map(|_| Vec::with_capacity(n_new));
    for k in 0..=n {
        for s in q.simplices(k) {
            carriers.push(compose_carrier(prev, s)?);
            if let (Some(out), Some(c)) = (coords.as_mut(), q.coords()) {
                let mut acc = vec![Q::zero(); n];
                for &v in s {
                    let shift = group
                        .as_vector(&q.label(s[0], v)?)
                        .unwrap_or_else(|| vec![0; n]);
                    for d in 0..n {
                        acc[d] += &c[v][d] + Q::from_integer(shift[d].into());
                    }
                }
                let m = Q::from_integer((s.len() as i64).into());
                out.push(acc.into_iter().map(|x| x / &m).collect());
            }
        }
    }
    data.coords = coords;

    let complex = QuotientComplex::new(group, data)?;
    Ok(Subdivision {
        complex,
        base: prev.base.clone(),
        times: prev.times + 1,
        carriers,
    })
}

/// Carrier of the barycenter of the representative lift of `s` (a simplex of
/// the previous level).
fn compose_carrier(prev: &Subdivision, s: &[usize]) -> Result<Carrier> {
    let q = &prev.complex;
    let base = &prev.base;
    let group = q.group();
    // vertex j of the lift sits at deck label(s_0 -> s_j) relative to its rep
    let pts: Vec<(Elem, &Carrier)> = s
        .iter()
        .map(|&v| {
            let c = &prev.carriers[v];
            Ok((group.mul(&q.label(s[0], v)?, &c.g)?, c))
        })
        .collect::<Result<_>>()?;
    let mut union: Vec<usize> = Vec::new();
    for (_, c) in &pts {
        union.extend_from_slice(base.simplex(c.dim, c.idx));
    }
    union.sort_unstable();
    union.dedup();
    let u_idx = base
        .find(&union)
        .ok_or_else(|| Error::Invariant(format!("carrier {union:?} is not a simplex")))?;
    let mut g_u: Option<Elem> = None;
    let mut bary = vec![Q::zero(); union.len()];
    for (g, c) in &pts {
        let face = base.simplex(c.dim, c.idx);
        let p0 = union.iter().position(|v| *v == face[0]).unwrap();
        // face of (g_u, U) at positions P has deck g_u * label(U_0 -> U_{P_0})
        let cand = group.mul(g, &group.inv(&base.label(union[0], union[p0])?)?)?;
        match &g_u {
            None => g_u = Some(cand),
            Some(prev_g) if *prev_g != cand => {
                return Err(Error::Invariant(
                    "subdivision vertices disagree on their carrier translate".into(),
                ))
            }
            _ => {}
        }
        for (v, lam) in face.iter().zip(&c.bary) {
            let p = union.iter().position(|u| u == v).unwrap();
            bary[p] += lam;
        }
    }
    let m = Q::from_integer((s.len() as i64).into());
    Ok(Carrier {
        g: g_u.unwrap(),
        dim: union.len() - 1,
        idx: u_idx,
        bary: bary.into_iter().map(|x| x / &m).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;

    #[test]
    fn tetrahedron_once() {
        let s = barycentric_subdivide(&fixtures::tetrahedron(), 1).unwrap();
        assert_eq!((s.count(0), s.count(1), s.count(2)), (14, 36, 24));
        assert!(s.validate().is_valid());
    }

    #[test]
    fn euler_characteristic_and_validity_survive() {
        for q in [fixtures::tetrahedron(), fixtures::torus7(), fixtures::genus2()] {
            let chi = q.euler_characteristic();
            let mut cur = q;
            for _ in 0..2 {
                cur = barycentric_subdivide(&cur, 1).unwrap();
                assert_eq!(cur.euler_characteristic(), chi);
                let r = cur.validate();
                assert!(r.is_valid(), "{:?}", &r.violations[..r.violations.len().min(3)]);
            }
        }
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            barycentric_subdivide(&fixtures::tetrahedron(), 4),
            Err(Error::Budget { flag: "--subdivide", .. })
        ));
    }

    #[test]
    fn carriers_match_coordinates() {
        // on the torus the barycenter coordinates equal the affine image of the carrier data
        let base = Arc::new(fixtures::torus7());
        let sd = subdivide_with_carriers(base.clone(), 2).unwrap();
        let coords = sd.complex.coords().unwrap();
        let group = base.group();
        let bc = base.coords().unwrap();
        for (w, c) in sd.carriers.iter().enumerate() {
            assert!(c.bary.iter().all(|x| *x > Q::zero()));
            let s = base.simplex(c.dim, c.idx);
            let corners: Vec<Vec<Q>> = s
                .iter()
                .map(|&v| {
                    let shift = group
                        .as_vector(&group.mul(&c.g, &base.label(s[0], v).unwrap()).unwrap())
                        .unwrap();
                    (0..2).map(|d| &bc[v][d] + Q::from_integer(shift[d].into())).collect()
                })
                .collect();
            assert_eq!(fixtures::affine_point(&corners, &c.bary), coords[w], "vertex {w}");
        }
    }
}
