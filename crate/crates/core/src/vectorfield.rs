//! Bounded periodic vector fields: zeros, indices, the index class
//! `ind(v)` and the Poincaré–Hopf comparison with `χ · 1`.
//!
//! Analytic fields live on flat torus covers (same machinery as analytic
//! self-maps with `u = v`). PL fields assign to each vertex of each top
//! simplex a tangent vector in barycentric coordinates (entries summing to
//! zero); the field is affine on each simplex. Vectors of neighbouring
//! simplices are not required to agree.

use std::str::FromStr;
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::class_fn::{ClassFunction, ClassFunctionDoc};
use crate::complex::{Cell, FundamentalDomain, PeriodicComplex, QuotientComplex};
use crate::error::{Error, Result};
use crate::fixpoint::simplicial::{solve_on_simplex, tangent_det, CellSolution, SAMPLE_STEPS};
use crate::fixpoint::{
    localize_torus, local_index_at, require_strong, FixedPointRecord, IndexRule, Localization, Location, MapDoc,
    SearchOptions, Tameness, TamenessReport, TorusModel,
};
use crate::group::MarkedGroup;
use crate::ufh::certificate::CertificateDoc;
use crate::ufh::{decide_class_with, ClassCertificate, DecideOptions};
use crate::{q, Q};

/// Zeros are reported in the same shape as fixed points.
pub type ZeroRecord = FixedPointRecord;

#[derive(Clone, Debug)]
pub struct PlField {
    pub quotient: Arc<QuotientComplex>,
    /// `vectors[σ][j]`: barycentric tangent vector at vertex `j` of top
    /// simplex `σ`.
    pub vectors: Vec<Vec<Vec<Q>>>,
    /// Declared `sup |v|` (ℓ¹ in barycentric coordinates).
    pub bound: Option<Q>,
}

impl PlField {
    pub fn new(quotient: Arc<QuotientComplex>, vectors: Vec<Vec<Vec<Q>>>, bound: Option<Q>) -> Result<Self> {
        let n = quotient.dim();
        if vectors.len() != quotient.count(n) {
            return Err(Error::input(format!(
                "field lists vectors for {} top simplices, the complex has {}",
                vectors.len(),
                quotient.count(n)
            )));
        }
        let mut sup = Q::zero();
        for (s, vs) in vectors.iter().enumerate() {
            if vs.len() != n + 1 || vs.iter().any(|v| v.len() != n + 1) {
                return Err(Error::input(format!("simplex {s}: need {0} vectors of length {0}", n + 1)));
            }
            for v in vs {
                if !v.iter().sum::<Q>().is_zero() {
                    return Err(Error::input(format!(
                        "simplex {s}: vector entries must sum to zero (tangent to the simplex)"
                    )));
                }
                sup = sup.max(v.iter().map(|x| x.abs()).sum());
            }
        }
        // the ℓ¹ norm is convex, so the vertex vectors attain the supremum
        if let Some(b) = &bound {
            if sup > *b {
                return Err(Error::input(format!("declared bound {b} is exceeded: |v| reaches {sup}")));
            }
        }
        Ok(PlField {
            quotient,
            vectors,
            bound,
        })
    }

    fn rows(&self, ti: usize) -> Vec<Vec<Q>> {
        let n1 = self.quotient.dim() + 1;
        (0..n1).map(|k| self.vectors[ti].iter().map(|w| w[k].clone()).collect()).collect()
    }

    fn norm_at(&self, ti: usize, lam: &[Q]) -> Q {
        self.rows(ti)
            .iter()
            .map(|r| r.iter().zip(lam).map(|(a, b)| a * b).sum::<Q>().abs())
            .sum()
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for x in out.vectors.iter_mut().flatten().flatten() {
            *x = -x.clone();
        }
        out
    }

    /// Isolated zero of top simplex `ti`, with its index.
    fn solve(&self, ti: usize) -> Result<Option<(Vec<Q>, i64)>> {
        let n = self.quotient.dim();
        let tau = self.quotient.simplex(n, ti);
        match solve_on_simplex(&self.rows(ti), n + 1) {
            CellSolution::Empty => Ok(None),
            CellSolution::Continuum => Err(Error::NotTame(format!("zeros are not isolated in simplex {tau:?}"))),
            CellSolution::Face(l) => Err(Error::FaceFixedPoint(format!(
                "zero on a face of simplex {tau:?} at barycentric ({}); subdivide or move it",
                l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
            ))),
            CellSolution::Interior(l) => {
                let det = tangent_det(&self.rows(ti));
                if det.is_zero() {
                    return Err(Error::Invariant(format!("isolated PL zero in {tau:?} with singular derivative")));
                }
                Ok(Some((l, if det.is_positive() { 1 } else { -1 })))
            }
        }
    }

    fn sample_min(&self, ti: usize, avoid: Option<(&[Q], &Q)>) -> Q {
        let n1 = self.quotient.dim() + 1;
        let m = SAMPLE_STEPS;
        let mut best: Option<Q> = None;
        let mut counts = vec![0usize; n1];
        loop {
            let used: usize = counts[..n1 - 1].iter().sum();
            if used <= m {
                counts[n1 - 1] = m - used;
                let lam: Vec<Q> = counts.iter().map(|c| q(*c as i64, m as i64)).collect();
                let inside = avoid.is_some_and(|(p, r)| {
                    lam.iter().zip(p).map(|(a, b)| (a - b).abs()).max().is_some_and(|v| v < *r)
                });
                if !inside {
                    let v = self.norm_at(ti, &lam);
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
            let mut i = 0;
            loop {
                if i + 1 >= n1 {
                    return best.unwrap_or_else(Q::zero);
                }
                counts[i] += 1;
                if counts[..n1 - 1].iter().sum::<usize>() <= m {
                    break;
                }
                counts[i] = 0;
                i += 1;
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum VectorFieldModel {
    Analytic(TorusModel),
    Pl(PlField),
}

impl VectorFieldModel {
    pub fn quotient(&self) -> &Arc<QuotientComplex> {
        match self {
            VectorFieldModel::Analytic(m) => &m.quotient,
            VectorFieldModel::Pl(f) => &f.quotient,
        }
    }

    pub fn group(&self) -> &MarkedGroup {
        self.quotient().group()
    }

    pub fn fundamental_domain(&self) -> Result<FundamentalDomain> {
        PeriodicComplex::new(self.quotient().clone())?.fundamental_domain()
    }

    pub fn negated(&self) -> Self {
        match self {
            VectorFieldModel::Analytic(m) => VectorFieldModel::Analytic(m.scaled(-1.0)),
            VectorFieldModel::Pl(f) => VectorFieldModel::Pl(f.negated()),
        }
    }

    pub fn from_doc(doc: &MapDoc) -> Result<Self> {
        let q = Arc::new(doc.complex.resolve()?);
        match doc.variant.as_str() {
            "analytic" => Ok(VectorFieldModel::Analytic(doc.torus_model(q)?)),
            "pl" => {
                if doc.subdivision != 0 || !doc.overrides.is_empty() {
                    return Err(Error::Unsupported("PL fields take neither subdivision nor overrides".into()));
                }
                let raw = doc.vectors.as_ref().ok_or_else(|| Error::input("PL fields need `vectors`"))?;
                let vectors = raw
                    .iter()
                    .map(|s| s.iter().map(|v| v.iter().map(|x| parse_q(x)).collect()).collect())
                    .collect::<Result<Vec<Vec<Vec<Q>>>>>()?;
                let bound = match doc.bound {
                    Some(b) => Some(
                        Q::from_float(b).ok_or_else(|| Error::input(format!("bad bound {b}")))?,
                    ),
                    None => None,
                };
                Ok(VectorFieldModel::Pl(PlField::new(q, vectors, bound)?))
            }
            v => Err(Error::input(format!("unknown field variant `{v}` (analytic, pl)"))),
        }
    }
}

fn parse_q(s: &str) -> Result<Q> {
    Q::from_str(s.trim()).map_err(|_| Error::input(format!("bad rational `{s}`")))
}

fn localize_pl(f: &PlField, fd: &FundamentalDomain, radius: usize) -> Result<Localization> {
    let q = &f.quotient;
    let group = q.group();
    let n = q.dim();
    let mut zeros = Vec::new();
    for ti in 0..q.count(n) {
        if let Some((l, idx)) = f.solve(ti)? {
            let cell = Cell {
                g: group.identity(),
                dim: n,
                idx: ti,
            };
            let c = fd.translate_of(group, &cell)?;
            zeros.push((ti, l, idx, c));
        }
    }
    let gauge = |b: &[Q]| b.iter().min().cloned().unwrap_or_else(Q::zero);
    let delta = zeros
        .iter()
        .map(|(_, l, _, _)| gauge(l))
        .min()
        .unwrap_or_else(|| Q::from_integer(1.into()));
    let mut epsilon: Option<Q> = None;
    for ti in 0..q.count(n) {
        let z = zeros.iter().find(|z| z.0 == ti);
        let v = f.sample_min(ti, z.map(|z| (z.1.as_slice(), &delta)));
        if epsilon.as_ref().is_none_or(|e| v < *e) {
            epsilon = Some(v);
        }
    }
    let epsilon = epsilon.unwrap_or_else(Q::zero);
    let (verdict, witnesses) = if epsilon.is_positive() {
        (Tameness::StronglyTame, vec![])
    } else {
        (Tameness::NotTame, vec!["|v| vanishes at a sample point outside the isolation balls".to_string()])
    };
    let class = ClassFunction::constant(zeros.iter().map(|z| z.2).sum());
    let mut records = Vec::new();
    for h in group.ball(radius)? {
        for (ti, l, idx, c) in &zeros {
            let d = group.mul(&h, &group.inv(c)?)?;
            let cell = Cell {
                g: d,
                dim: n,
                idx: *ti,
            };
            records.push(ZeroRecord {
                host: cell.clone(),
                carrier: cell,
                location: Location::Barycentric(l.clone()),
                coset: h.clone(),
                delta: gauge(l),
                index: Some(*idx),
                periodic: true,
            });
        }
    }
    records.sort_by(|a, b| {
        (group.length(&a.coset), &a.coset, &a.host).cmp(&(group.length(&b.coset), &b.coset, &b.host))
    });
    Ok(Localization {
        records,
        class,
        tameness: TamenessReport {
            delta,
            epsilon,
            verdict,
            witnesses,
        },
    })
}

pub fn localize_field(
    v: &VectorFieldModel,
    fd: &FundamentalDomain,
    radius: usize,
    opts: SearchOptions,
) -> Result<Localization> {
    match v {
        VectorFieldModel::Analytic(m) => localize_torus(m, IndexRule::Field, fd, radius, opts),
        VectorFieldModel::Pl(f) => localize_pl(f, fd, radius),
    }
}

/// Zeros whose coset lies in `ball(R)` (and every override zero), without
/// indices.
pub fn find_zeros(v: &VectorFieldModel, radius: usize) -> Result<Vec<ZeroRecord>> {
    let fd = v.fundamental_domain()?;
    let mut out = localize_field(v, &fd, radius, SearchOptions::default())?.records;
    for r in &mut out {
        r.index = None;
    }
    Ok(out)
}

pub fn field_index(v: &VectorFieldModel, z: &ZeroRecord) -> Result<i64> {
    if !z.delta.is_positive() {
        return Err(Error::FaceFixedPoint("zero without an isolation radius".into()));
    }
    match (v, &z.location) {
        (VectorFieldModel::Analytic(m), Location::Euclidean(x)) => {
            local_index_at(m, IndexRule::Field, x, z.delta.to_f64().unwrap_or(0.0) / 2.0)
        }
        (VectorFieldModel::Pl(f), Location::Barycentric(_)) => f
            .solve(z.host.idx)?
            .map(|(_, i)| i)
            .ok_or_else(|| Error::input("no zero in the given host simplex")),
        _ => Err(Error::input("record does not belong to this kind of field")),
    }
}

/// `ind(v)`: per-coset index sums; refuses unless strongly tame.
pub fn index_class(v: &VectorFieldModel, fd: &FundamentalDomain, radius: usize) -> Result<ClassFunction> {
    let l = localize_field(v, fd, radius, SearchOptions::default())?;
    require_strong(&l.tameness)?;
    Ok(l.class)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareHopfReport {
    pub euler_characteristic: i64,
    pub index_class: ClassFunction,
    /// `ind(v) - χ · 1`.
    pub difference: ClassFunction,
    pub certificate: ClassCertificate,
    pub consistent: bool,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareHopfDoc {
    pub euler_characteristic: i64,
    pub index_class: ClassFunctionDoc,
    pub difference: ClassFunctionDoc,
    pub certificate: CertificateDoc,
    pub consistent: bool,
    pub verdict: String,
}

impl PoincareHopfReport {
    pub fn to_doc(&self, group: &MarkedGroup) -> Result<PoincareHopfDoc> {
        Ok(PoincareHopfDoc {
            euler_characteristic: self.euler_characteristic,
            index_class: self.index_class.to_doc(group),
            difference: self.difference.to_doc(group),
            certificate: self.certificate.to_doc(group)?,
            consistent: self.consistent,
            verdict: self.verdict.clone(),
        })
    }
}

/// Decides `ind(v) - χ(N) · 1` in `ℓ∞(G)_G`.
pub fn poincare_hopf_check(group: &MarkedGroup, ind: &ClassFunction, chi: i64) -> Result<PoincareHopfReport> {
    poincare_hopf_check_with(group, ind, chi, &DecideOptions::default())
}

pub fn poincare_hopf_check_with(
    group: &MarkedGroup,
    ind: &ClassFunction,
    chi: i64,
    opts: &DecideOptions,
) -> Result<PoincareHopfReport> {
    let difference = ind.sub(&ClassFunction::constant(chi));
    let certificate = decide_class_with(group, &difference, opts)?;
    let (consistent, verdict) = match certificate.verdict {
        v if v.is_zero() => (true, "consistent with Poincaré–Hopf: ind(v) = χ·1".to_string()),
        crate::ufh::Verdict::NonzeroByMean => (
            false,
            "COUNTEREXAMPLE FLAG: ind(v) - χ·1 is nonzero; since the arithmetic is exact this indicates an error in the input model"
                .to_string(),
        ),
        _ => (false, "inconclusive within the budgets".to_string()),
    };
    Ok(PoincareHopfReport {
        euler_characteristic: chi,
        index_class: ind.clone(),
        difference,
        certificate,
        consistent,
        verdict,
    })
}

/// The tetrahedron-boundary sphere with a source at the centre of face
/// `{0,1,2}`, a sink at the centre of face `{1,2,3}` and a constant flow
/// across the other two faces.
pub fn sphere_source_sink() -> PlField {
    let t = Arc::new(crate::complex::fixtures::tetrahedron());
    let third = q(1, 3);
    let vectors = t
        .simplices(2)
        .iter()
        .map(|s| {
            let e = |j: usize| -> Vec<Q> { (0..3).map(|k| if k == j { q(1, 1) } else { Q::zero() }).collect() };
            match s.as_slice() {
                [0, 1, 2] => (0..3).map(|j| e(j).into_iter().map(|x| x - &third).collect()).collect(),
                [1, 2, 3] => (0..3).map(|j| e(j).into_iter().map(|x| &third - x).collect()).collect(),
                _ => vec![vec![q(-1, 1), Q::zero(), q(1, 1)]; 3],
            }
        })
        .collect();
    PlField::new(t, vectors, Some(q(2, 1))).expect("sphere field fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use crate::fixpoint::{Component, Patch};
    use crate::ufh::Verdict;

    fn sin_field(patches: Vec<Patch>) -> VectorFieldModel {
        let c = Component::parse(2, &["sin(2*pi*x)".into(), "sin(2*pi*y)".into()], None).unwrap();
        VectorFieldModel::Analytic(TorusModel::new(Arc::new(fixtures::torus7()), 1, c, patches, Some(4.0)).unwrap())
    }

    #[test]
    fn sin_field_indices_and_class() {
        let v = sin_field(vec![]);
        let zs = find_zeros(&v, 0).unwrap();
        assert_eq!(zs.len(), 4);
        for z in &zs {
            let Location::Euclidean(x) = &z.location else { panic!() };
            let half = |t: f64| (t.rem_euclid(1.0) - 0.5).abs() < 1e-6;
            assert_eq!(field_index(&v, z).unwrap(), if half(x[0]) == half(x[1]) { 1 } else { -1 });
        }
        let fd = v.fundamental_domain().unwrap();
        let ind = index_class(&v, &fd, 1).unwrap();
        assert!(ind.is_zero_function());
        let r = poincare_hopf_check(v.group(), &ind, v.quotient().euler_characteristic()).unwrap();
        assert!(r.consistent);
        assert_eq!(r.certificate.verdict, Verdict::ZeroByBoundary);
    }

    #[test]
    fn negation_keeps_planar_indices() {
        let v = sin_field(vec![]);
        let w = v.negated();
        let a: Vec<i64> = find_zeros(&v, 0).unwrap().iter().map(|z| field_index(&v, z).unwrap()).collect();
        let b: Vec<i64> = find_zeros(&w, 0).unwrap().iter().map(|z| field_index(&w, z).unwrap()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_field_has_no_zeros() {
        let c = Component::parse(2, &["1".into(), "0.5".into()], None).unwrap();
        let v = VectorFieldModel::Analytic(TorusModel::new(Arc::new(fixtures::torus7()), 0, c, vec![], None).unwrap());
        assert!(find_zeros(&v, 2).unwrap().is_empty());
    }

    #[test]
    fn sphere_field_totals_euler_characteristic() {
        let v = VectorFieldModel::Pl(sphere_source_sink());
        let zs = find_zeros(&v, 0).unwrap();
        assert_eq!(zs.len(), 2);
        for z in &zs {
            assert_eq!(z.location, Location::Barycentric(vec![q(1, 3); 3]));
            assert_eq!(field_index(&v, z).unwrap(), 1);
        }
        let fd = v.fundamental_domain().unwrap();
        let ind = index_class(&v, &fd, 0).unwrap();
        assert_eq!(ind, ClassFunction::constant(2));
        let r = poincare_hopf_check(v.group(), &ind, v.quotient().euler_characteristic()).unwrap();
        assert_eq!(r.euler_characteristic, 2);
        assert!(r.consistent, "{}", r.verdict);
        let n = v.negated();
        assert_eq!(index_class(&n, &fd, 0).unwrap(), ClassFunction::constant(2));
    }

    #[test]
    fn override_pair_does_not_change_the_verdict() {
        let patch = Patch {
            translate: vec![0, 0],
            comp: Component::parse(
                2,
                &["sin(2*pi*x) - 4*sin(pi*x)^2*sin(pi*y)^2*sin(2*pi*x)^2".into(), "sin(2*pi*y)".into()],
                None,
            )
            .unwrap(),
        };
        let plain = sin_field(vec![]);
        let v = sin_field(vec![patch]);
        let fd = v.fundamental_domain().unwrap();
        let a = index_class(&plain, &fd, 1).unwrap();
        let b = index_class(&v, &fd, 1).unwrap();
        let zs = find_zeros(&v, 1).unwrap();
        assert_eq!(zs.iter().filter(|z| !z.periodic).count(), 3);
        let chi = v.quotient().euler_characteristic();
        let ra = poincare_hopf_check(v.group(), &a, chi).unwrap();
        let rb = poincare_hopf_check(v.group(), &b, chi).unwrap();
        assert_eq!(ra.certificate.verdict.is_zero(), rb.certificate.verdict.is_zero());
        assert!(rb.consistent);
    }

    #[test]
    fn index_data_on_genus_two() {
        let q = fixtures::genus2();
        let ind = ClassFunction::constant(-2);
        let r = poincare_hopf_check(q.group(), &ind, q.euler_characteristic()).unwrap();
        assert!(r.difference.is_zero_function());
        assert!(r.consistent);
    }

    #[test]
    fn pl_field_validation() {
        let t = Arc::new(fixtures::tetrahedron());
        let bad = vec![vec![vec![q(1, 1), Q::zero(), Q::zero()]; 3]; 4];
        assert!(PlField::new(t.clone(), bad, None).is_err());
        let good = sphere_source_sink();
        assert!(PlField::new(t, good.vectors, Some(q(1, 2))).is_err());
    }
}
