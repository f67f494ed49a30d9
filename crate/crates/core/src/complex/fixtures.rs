//! Standard quotient complexes.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::{normalize_gauge, sort_with_sign, QuotientComplex, QuotientData};
use crate::error::{Error, Result};
use crate::group::word::letter;
use crate::group::{Elem, MarkedGroup};
use crate::{q, Q};

fn build(group: MarkedGroup, mut data: QuotientData, gauge: bool) -> Result<QuotientComplex> {
    data.close_downward();
    if gauge {
        normalize_gauge(&group, &mut data)?;
    }
    QuotientComplex::new(Arc::new(group), data)
}

/// Boundary of the 3-simplex, oriented as `∂[0,1,2,3]`.
pub fn tetrahedron() -> QuotientComplex {
    let tops = vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
    let signs = [1, -1, 1, -1];
    let data = QuotientData {
        dim: 2,
        n_vertices: 4,
        orientation: tops.iter().cloned().zip(signs).collect(),
        simplices: tops,
        ..Default::default()
    };
    build(MarkedGroup::trivial(), data, false).expect("tetrahedron fixture")
}

/// Octahedron `{±e_1, ±e_2, ±e_3}` with outward orientation. Vertex ids:
/// `+x=0, -x=1, +y=2, -y=3, +z=4, -z=5`.
pub fn octahedron() -> QuotientComplex {
    let mut tops = Vec::new();
    let mut orientation = Vec::new();
    for sx in [1i8, -1] {
        for sy in [1i8, -1] {
            for sz in [1i8, -1] {
                let id = |axis: usize, s: i8| 2 * axis + usize::from(s < 0);
                let t = vec![id(0, sx), id(1, sy), id(2, sz)];
                orientation.push((t.clone(), sx * sy * sz));
                tops.push(t);
            }
        }
    }
    let data = QuotientData {
        dim: 2,
        n_vertices: 6,
        simplices: tops,
        orientation,
        ..Default::default()
    };
    build(MarkedGroup::trivial(), data, false).expect("octahedron fixture")
}

/// Vertex maps of the octahedron: the rotation `x -> y -> z -> x`
/// and the antipodal map.
pub fn octahedron_rotation() -> Vec<usize> {
    vec![2, 3, 4, 5, 0, 1]
}

pub fn octahedron_antipodal() -> Vec<usize> {
    vec![1, 0, 3, 2, 5, 4]
}

/// Flat torus `R^2 / Z^2` triangulated by lifted triangles. `point(p)`
/// returns `(class, position)` for an integer point `p` of the triangulating
/// lattice; deck labels are read off the integer shifts of the positions.
fn flat_torus(
    n_vertices: usize,
    triangles: Vec<[(i64, i64); 3]>,
    point: impl Fn((i64, i64)) -> (usize, [Q; 2]),
    reps: Vec<[Q; 2]>,
) -> Result<QuotientComplex> {
    let group = MarkedGroup::free_abelian(2);
    let mut data = QuotientData {
        dim: 2,
        n_vertices,
        ..Default::default()
    };
    let mut labels: BTreeMap<(usize, usize), Elem> = BTreeMap::new();
    for tri in triangles {
        let pts: Vec<(usize, [Q; 2])> = tri.iter().map(|&p| point(p)).collect();
        let shift = |(c, pos): &(usize, [Q; 2])| -> Result<Vec<i64>> {
            (0..2)
                .map(|d| {
                    let s = &pos[d] - &reps[*c][d];
                    if !s.is_integer() {
                        return Err(Error::Invariant("non-integral deck shift".into()));
                    }
                    Ok(i64::try_from(s.to_integer()).expect("small shift"))
                })
                .collect()
        };
        let shifts: Vec<Vec<i64>> = pts.iter().map(shift).collect::<Result<_>>()?;
        for a in 0..3 {
            for b in 0..3 {
                if pts[a].0 < pts[b].0 {
                    let l = Elem(vec![shifts[b][0] - shifts[a][0], shifts[b][1] - shifts[a][1]]);
                    if let Some(prev) = labels.insert((pts[a].0, pts[b].0), l.clone()) {
                        if prev != l {
                            return Err(Error::Invariant("inconsistent torus labels".into()));
                        }
                    }
                }
            }
        }
        let area = (&pts[1].1[0] - &pts[0].1[0]) * (&pts[2].1[1] - &pts[0].1[1])
            - (&pts[1].1[1] - &pts[0].1[1]) * (&pts[2].1[0] - &pts[0].1[0]);
        let verts: Vec<usize> = pts.iter().map(|p| p.0).collect();
        let sign = if area.is_positive() { 1 } else { -1 };
        data.orientation.push((verts.clone(), sign));
        data.simplices.push(verts);
    }
    data.labels = labels
        .into_iter()
        .filter(|(_, l)| l.0.iter().any(|x| *x != 0))
        .map(|((u, v), l)| (u, v, l))
        .collect();
    data.coords = Some(reps.into_iter().map(|r| r.to_vec()).collect());
    build(group, data, true)
}

/// Generic offset keeping special points of `[0,1)^2` off every edge.
pub fn torus_offset() -> [Q; 2] {
    [q(1, 23), q(2, 29)]
}

/// The 7-vertex (Möbius–Császár) torus over `Z^2`. The triangulating lattice
/// `Z^2` is mapped to the plane by `(x, y) -> ((x+2y)/7, (-3x+y)/7) + o`,
/// which sends the period lattice `{x + 2y ≡ 0 mod 7}` onto `Z^2`.
pub fn torus7() -> QuotientComplex {
    let o = torus_offset();
    let class = |x: i64, y: i64| (x + 2 * y).rem_euclid(7) as usize;
    let pos = |x: i64, y: i64| [q(x + 2 * y, 7) + &o[0], q(-3 * x + y, 7) + &o[1]];
    let reps: Vec<[Q; 2]> = (0..7)
        .map(|k| [q(k, 7) + &o[0], q((-3 * k).rem_euclid(7), 7) + &o[1]])
        .collect();
    let mut triangles = Vec::new();
    for k in 0..7i64 {
        let p = (k, 0);
        triangles.push([p, (k + 1, 0), (k + 1, 1)]);
        triangles.push([p, (k, 1), (k + 1, 1)]);
    }
    flat_torus(7, triangles, |(x, y)| (class(x, y), pos(x, y)), reps).expect("7-vertex torus")
}

/// `m x m` grid torus over `Z^2`, squares cut along the main diagonal.
pub fn torus_grid(m: usize) -> Result<QuotientComplex> {
    if m < 3 {
        return Err(Error::input("grid torus needs m >= 3"));
    }
    let o = torus_offset();
    let mi = m as i64;
    let class = |x: i64, y: i64| (x.rem_euclid(mi) + mi * y.rem_euclid(mi)) as usize;
    let pos = |x: i64, y: i64| [q(x, mi) + &o[0], q(y, mi) + &o[1]];
    let reps: Vec<[Q; 2]> = (0..m * m)
        .map(|c| pos((c % m) as i64, (c / m) as i64))
        .collect();
    let mut triangles = Vec::new();
    for x in 0..mi {
        for y in 0..mi {
            triangles.push([(x, y), (x + 1, y), (x + 1, y + 1)]);
            triangles.push([(x, y), (x, y + 1), (x + 1, y + 1)]);
        }
    }
    flat_torus(m * m, triangles, |(x, y)| (class(x, y), pos(x, y)), reps)
}

/// Closed orientable surface of genus `g` over its surface group: the
/// `4g`-gon with sides split in three, a ring of inner vertices and a
/// center. For `g = 2`: `(V, E, F) = (34, 108, 72)`.
pub fn surface(genus: usize) -> Result<QuotientComplex> {
    let group = MarkedGroup::surface(genus);
    let sides = 4 * genus;
    // relator a1 b1 a1^-1 b1^-1 a2 ...
    let mut relator = Vec::with_capacity(sides);
    for i in 0..genus {
        relator.extend([
            letter(2 * i, false),
            letter(2 * i + 1, false),
            letter(2 * i, true),
            letter(2 * i + 1, true),
        ]);
    }
    let prefix: Vec<Elem> = (0..=sides)
        .map(|k| group.from_letters(&relator[..k]))
        .collect::<Result<_>>()?;
    let side_vertex = |gen: usize, s: usize| 1 + 2 * gen + (s - 1);
    let nb = 3 * sides;
    let inner0 = 1 + 2 * (2 * genus);
    let center = inner0 + nb;
    // boundary points: (quotient vertex, deck)
    let mut boundary: Vec<(usize, Elem)> = Vec::with_capacity(nb);
    for k in 0..sides {
        let l = relator[k];
        let gen = crate::group::word::gen_index(l);
        boundary.push((0, prefix[k].clone()));
        for s in 1..=2 {
            if l > 0 {
                boundary.push((side_vertex(gen, s), prefix[k].clone()));
            } else {
                boundary.push((side_vertex(gen, 3 - s), prefix[k + 1].clone()));
            }
        }
    }
    let id = group.identity();
    let inner = |i: usize| (inner0 + i % nb, id.clone());
    let bnd = |i: usize| boundary[i % nb].clone();
    let c = (center, id.clone());
    let mut tris: Vec<[(usize, Elem); 3]> = Vec::new();
    for i in 0..nb {
        tris.push([bnd(i), bnd(i + 1), inner(i)]);
        tris.push([bnd(i + 1), inner(i + 1), inner(i)]);
        tris.push([inner(i), inner(i + 1), c.clone()]);
    }
    let mut data = QuotientData {
        dim: 2,
        n_vertices: center + 1,
        ..Default::default()
    };
    let mut labels: HashMap<(usize, usize), Elem> = HashMap::new();
    for t in &tris {
        let verts: Vec<usize> = t.iter().map(|p| p.0).collect();
        // listed counterclockwise in the disk
        data.orientation.push((verts.clone(), 1));
        data.simplices.push(verts);
        for a in 0..3 {
            for b in 0..3 {
                if t[a].0 < t[b].0 {
                    let l = group.mul(&group.inv(&t[a].1)?, &t[b].1)?;
                    if let Some(prev) = labels.insert((t[a].0, t[b].0), l.clone()) {
                        if prev != l {
                            return Err(Error::Invariant("inconsistent surface labels".into()));
                        }
                    }
                }
            }
        }
    }
    let mut labels: Vec<_> = labels.into_iter().collect();
    labels.sort();
    data.labels = labels
        .into_iter()
        .filter(|(_, l)| !group.is_identity(l))
        .map(|((u, v), l)| (u, v, l))
        .collect();
    build(group, data, true)
}

pub fn genus2() -> QuotientComplex {
    surface(2).expect("genus-2 fixture")
}

/// `m x m` square grid with the top side glued to the bottom side reversed;
/// squares cut along the diagonal. Trivial deck group. The orientation signs
/// are the planar ones, which cannot be coherent.
pub fn klein_bottle(m: usize) -> Result<QuotientComplex> {
    if m < 3 {
        return Err(Error::input("Klein bottle grid needs m >= 3"));
    }
    let v = |i: usize, j: usize| -> usize {
        if j == m {
            (m - i % m) % m
        } else {
            (i % m) + m * j
        }
    };
    let mut data = QuotientData {
        dim: 2,
        n_vertices: m * m,
        ..Default::default()
    };
    for i in 0..m {
        for j in 0..m {
            let (a, b, c, d) = (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1));
            for t in [[a, b, d], [a, d, c]] {
                let (_, s) = sort_with_sign(&t);
                data.orientation.push((t.to_vec(), 1));
                if s == 0 {
                    return Err(Error::input("grid too small: degenerate triangle"));
                }
                data.simplices.push(t.to_vec());
            }
        }
    }
    build(MarkedGroup::trivial(), data, false)
}

/// Affine coordinates of a point with barycentric coordinates `bary` in the
/// cell whose vertices are at `corners`.
pub fn affine_point(corners: &[Vec<Q>], bary: &[Q]) -> Vec<Q> {
    let n = corners.first().map_or(0, |c| c.len());
    let mut out = vec![Q::zero(); n];
    for (c, l) in corners.iter().zip(bary) {
        for d in 0..n {
            out[d] += &c[d] * l;
        }
    }
    out
}

/// Vertex images of the translation `x -> x + shift` of a flat torus cover,
/// when the shift carries vertices to vertices.
pub fn translation_images(q: &QuotientComplex, shift: &[Q]) -> Result<Vec<(Elem, usize)>> {
    let coords = q
        .coords()
        .ok_or_else(|| Error::input("translation needs vertex coordinates"))?;
    let group = q.group();
    let mut out = Vec::with_capacity(coords.len());
    for c in coords {
        let target: Vec<Q> = c.iter().zip(shift).map(|(a, b)| a + b).collect();
        let hit = coords.iter().enumerate().find_map(|(w, cw)| {
            let d: Vec<Q> = target.iter().zip(cw).map(|(a, b)| a - b).collect();
            d.iter()
                .all(|x| x.is_integer())
                .then(|| (w, d.iter().map(|x| i64::try_from(x.to_integer()).unwrap_or(0)).collect::<Vec<_>>()))
        });
        let (w, h) = hit.ok_or_else(|| Error::input("translation does not preserve the vertex set"))?;
        out.push((group.from_vector(&h)?, w));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{ORIENTATION, PSEUDOMANIFOLD};

    #[test]
    fn fixtures_are_valid() {
        for (name, c) in [
            ("tetrahedron", tetrahedron()),
            ("octahedron", octahedron()),
            ("torus7", torus7()),
            ("grid", torus_grid(3).unwrap()),
            ("genus2", genus2()),
        ] {
            let r = c.validate();
            assert!(r.is_valid(), "{name}: {:?}", r.violations);
        }
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(tetrahedron().euler_characteristic(), 2);
        assert_eq!(octahedron().euler_characteristic(), 2);
        let t = torus7();
        assert_eq!((t.count(0), t.count(1), t.count(2)), (7, 21, 14));
        assert_eq!(t.euler_characteristic(), 0);
        let s = genus2();
        assert_eq!((s.count(0), s.count(1), s.count(2)), (34, 108, 72));
        assert_eq!(s.euler_characteristic(), -2);
    }

    #[test]
    fn flipped_sign_breaks_three_facets() {
        let t = tetrahedron();
        let mut signs = t.orientations().to_vec();
        signs[0] = -signs[0];
        let r = t.with_orientation(signs).validate();
        assert_eq!(r.count(ORIENTATION), 3);
        assert_eq!(r.violations.len(), 3);
    }

    #[test]
    fn klein_bottle_has_no_coherent_orientation() {
        let k = klein_bottle(3).unwrap();
        assert_eq!(k.euler_characteristic(), 0);
        let r = k.validate();
        assert!(!r.mentions(PSEUDOMANIFOLD), "{:?}", r.violations);
        assert!(r.mentions(ORIENTATION));
        // exhaustive: no sign vector is coherent
        let cof = k.cofacets();
        let nf = k.count(2);
        let coherent = |signs: u32| {
            cof.iter().all(|l| {
                let s = |(i, j): (usize, usize)| {
                    let o = if signs & (1 << i) != 0 { 1 } else { -1 };
                    if j % 2 == 0 { o } else { -o }
                };
                s(l[0]) == -s(l[1])
            })
        };
        assert!((0..(1u32 << nf)).all(|s| !coherent(s)));
        // sanity: the same search finds the orientation of the grid torus
        let t = torus_grid(3).unwrap();
        let tcof = t.cofacets();
        let found = (0..(1u32 << t.count(2))).any(|signs| {
            tcof.iter().all(|l| {
                let s = |(i, j): (usize, usize)| {
                    let o = if signs & (1 << i) != 0 { 1 } else { -1 };
                    if j % 2 == 0 { o } else { -o }
                };
                s(l[0]) == -s(l[1])
            })
        });
        assert!(found);
    }
}
