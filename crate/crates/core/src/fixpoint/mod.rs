//! Bounded-displacement self-maps of a cover: fixed points, tameness, local
//! indices and the Lefschetz class as a function on the deck group.
//!
//! Two model families: equivariant simplicial maps on a subdivision (solved
//! exactly) and closed-form periodic displacements on flat tori (Newton
//! search with interval validation). Both allow finitely many overrides.

pub mod doc;
pub mod simplicial;
pub mod torus;

pub use doc::{ingest_index_data, ComplexRef, IndexData, IndexDataDoc, MapDoc};
pub use simplicial::SimplicialMap;
pub use torus::{Component, IndexRule, Patch, TorusModel};

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::chain::homology::lefschetz_report;
use crate::class_fn::ClassFunction;
use crate::complex::{Cell, FundamentalDomain, PeriodicComplex, QuotientComplex};
use crate::error::{Error, Result};
use crate::group::{Elem, MarkedGroup};
use crate::ufh::ser_q;
use crate::Q;

use self::torus::{translates_near, RawZero, DEDUP};

#[derive(Clone, Debug)]
pub enum SelfMapModel {
    Simplicial(SimplicialMap),
    Analytic(TorusModel),
}

impl SelfMapModel {
    pub fn group(&self) -> &MarkedGroup {
        self.quotient().group()
    }

    pub fn quotient(&self) -> &Arc<QuotientComplex> {
        match self {
            SelfMapModel::Simplicial(m) => &m.base,
            SelfMapModel::Analytic(m) => &m.quotient,
        }
    }

    pub fn is_equivariant(&self) -> bool {
        match self {
            SelfMapModel::Simplicial(m) => m.is_equivariant(),
            SelfMapModel::Analytic(m) => m.is_equivariant(),
        }
    }

    pub fn subdivision(&self) -> usize {
        match self {
            SelfMapModel::Simplicial(m) => m.subdivision(),
            SelfMapModel::Analytic(m) => m.subdivision,
        }
    }

    /// The same map on one more barycentric subdivision.
    pub fn refined(&self) -> Result<Self> {
        Ok(match self {
            SelfMapModel::Simplicial(m) => SelfMapModel::Simplicial(m.refined()?),
            SelfMapModel::Analytic(m) => SelfMapModel::Analytic(m.refined()?),
        })
    }

    /// Fundamental domain of the (unsubdivided) cover; cosets are read off
    /// the base cell carrying each point, so they do not move under
    /// subdivision.
    pub fn fundamental_domain(&self) -> Result<FundamentalDomain> {
        PeriodicComplex::new(self.quotient().clone())?.fundamental_domain()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    /// Exact barycentric coordinates in the host simplex.
    Barycentric(Vec<Q>),
    /// Coordinates in the universal cover `R^n`.
    Euclidean(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointRecord {
    /// Top cell of the subdivided cover containing the point.
    pub host: Cell,
    /// Top cell of the unsubdivided cover containing the point.
    pub carrier: Cell,
    pub location: Location,
    pub coset: Elem,
    /// Isolation radius: barycentric gauge for simplicial models (the
    /// smallest coordinate), Euclidean otherwise.
    pub delta: Q,
    pub index: Option<i64>,
    /// From the equivariant part (as opposed to an override).
    pub periodic: bool,
}

impl FixedPointRecord {
    pub fn to_doc(&self, group: &MarkedGroup) -> RecordDoc {
        RecordDoc {
            host_deck: group.format(&self.host.g),
            host_simplex: self.host.idx,
            carrier_deck: group.format(&self.carrier.g),
            carrier_simplex: self.carrier.idx,
            location: match &self.location {
                Location::Barycentric(l) => l.iter().map(|x| x.to_string()).collect(),
                Location::Euclidean(x) => x.iter().map(|v| format!("{v:.12}")).collect(),
            },
            coordinates: match self.location {
                Location::Barycentric(_) => "barycentric",
                Location::Euclidean(_) => "euclidean",
            },
            coset: group.format(&self.coset),
            delta: self.delta.to_string(),
            index: self.index,
            periodic: self.periodic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecordDoc {
    pub host_deck: String,
    pub host_simplex: usize,
    pub carrier_deck: String,
    pub carrier_simplex: usize,
    pub coordinates: &'static str,
    pub location: Vec<String>,
    pub coset: String,
    pub delta: String,
    pub index: Option<i64>,
    pub periodic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tameness {
    StronglyTame,
    Tame,
    NotTame,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TamenessReport {
    #[serde(serialize_with = "ser_q")]
    pub delta: Q,
    #[serde(serialize_with = "ser_q")]
    pub epsilon: Q,
    pub verdict: Tameness,
    pub witnesses: Vec<String>,
}

impl TamenessReport {
    fn not_tame(why: String) -> Self {
        TamenessReport {
            delta: Q::zero(),
            epsilon: Q::zero(),
            verdict: Tameness::NotTame,
            witnesses: vec![why],
        }
    }
}

/// Search resolutions (per axis, per fundamental domain).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub grid: usize,
    pub sample_grid: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid: 32,
            sample_grid: 64,
        }
    }
}

/// Everything the localization produces in one pass.
#[derive(Clone, Debug)]
pub struct Localization {
    /// Points whose coset lies in `ball(R)`, plus every override point.
    pub records: Vec<FixedPointRecord>,
    pub class: ClassFunction,
    pub tameness: TamenessReport,
}

/// Rational lower approximation on the `10^-9` grid (with a little slack so
/// that exact values like `1/4` survive the float round trip).
pub(crate) fn q_floor(x: f64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let k = (x * 1e9 + 1e-3).floor() as i64;
    Q::new(BigInt::from(k), BigInt::from(1_000_000_000i64))
}

fn sort_records(group: &MarkedGroup, records: &mut [FixedPointRecord]) {
    records.sort_by(|a, b| {
        (group.length(&a.coset), &a.coset, &a.host).cmp(&(group.length(&b.coset), &b.coset, &b.host))
    });
}

/// One pass over an analytic model: zeros of `u`, indices by `rule`,
/// isolation radii, sampled lower bound, class.
pub(crate) fn localize_torus(
    m: &TorusModel,
    rule: IndexRule,
    fd: &FundamentalDomain,
    radius: usize,
    opts: SearchOptions,
) -> Result<Localization> {
    let group = m.group();
    let n = m.dim();
    for p in &m.patches {
        let g = group.from_vector(&p.translate)?;
        if group.length(&g) > radius {
            return Err(Error::Region(format!(
                "override at {} lies outside ball({radius}) (--radius)",
                group.format(&g)
            )));
        }
    }
    let zeros = m.zeros(opts.grid)?;

    // separation: half the least distance between distinct zeros
    let mut min_pair: f64 = 1.0;
    for (i, a) in zeros.iter().enumerate() {
        for b in &zeros[i + 1..] {
            if a.patch.is_none() && b.patch.is_none() {
                min_pair = min_pair.min(torus::torus_dist(&a.x, &b.x));
            }
        }
    }
    for (pi, p) in m.patches.iter().enumerate() {
        let mut pts: Vec<Vec<f64>> = zeros.iter().filter(|z| z.patch == Some(pi)).map(|z| z.x.clone()).collect();
        for z in zeros.iter().filter(|z| z.patch.is_none()) {
            pts.extend(translates_near(&z.x, &p.translate).into_iter().filter(|y| !p.contains(y, -DEDUP)));
        }
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let d = torus::dist(a, b);
                if d > DEDUP {
                    min_pair = min_pair.min(d);
                }
            }
        }
    }
    let delta = min_pair / 2.0;

    struct Located {
        z: RawZero,
        carrier: Cell,
        coset: Elem,
        host: Cell,
        clearance: f64,
        index: i64,
    }
    let mut located = Vec::with_capacity(zeros.len());
    for z in zeros.iter() {
        let (carrier, coset) = m.carrier(fd, &z.x)?;
        let (host, clearance) = m.host_of(&z.x)?;
        let eff = delta.min(clearance);
        let index = m.index(z, rule, if eff > 1e-9 { eff / 2.0 } else { delta / 2.0 })?;
        located.push(Located {
            z: z.clone(),
            carrier,
            coset,
            host,
            clearance,
            index,
        });
    }

    // sampled lower bound outside the balls
    let radii = vec![delta; zeros.len()];
    let mut epsilon = m.sample_min(&zeros, &radii, opts.sample_grid);
    let (sup, _) = m.sup_norm(opts.sample_grid);
    if let Some(b) = m.bound {
        if sup > b + 1e-12 {
            return Err(Error::input(format!(
                "declared bound {b} is exceeded: |u| reaches {sup:.6} on the sampling grid"
            )));
        }
    }
    if epsilon < 0.1 * sup {
        epsilon = epsilon.min(m.sample_min(&zeros, &radii, 2 * opts.sample_grid));
    }
    let strong_radii: Vec<f64> = located.iter().map(|l| delta.min(l.clearance)).collect();
    let strong_eps = m.sample_min(&zeros, &strong_radii, opts.sample_grid);
    let mut witnesses = Vec::new();
    let verdict = if epsilon < 1e-12 {
        witnesses.push("|u| vanishes at a sample point outside the isolation balls".to_string());
        Tameness::NotTame
    } else {
        for l in &located {
            if l.clearance <= 1e-9 {
                witnesses.push(format!(
                    "zero at {} lies on a face of its host simplex; subdivide once more",
                    torus::fmt_point(&l.z.x)
                ));
            }
        }
        if strong_eps < 1e-12 {
            witnesses.push("|u| vanishes outside the shrunken isolation balls".to_string());
        }
        if witnesses.is_empty() {
            Tameness::StronglyTame
        } else {
            Tameness::Tame
        }
    };
    let tameness = TamenessReport {
        delta: q_floor(delta),
        epsilon: q_floor(epsilon),
        verdict,
        witnesses,
    };

    // class: periodic sum plus override corrections
    let mut class = ClassFunction::constant(located.iter().filter(|l| l.z.patch.is_none()).map(|l| l.index).sum());
    for (pi, p) in m.patches.iter().enumerate() {
        for l in located.iter().filter(|l| l.z.patch.is_none()) {
            for y in translates_near(&l.z.x, &p.translate) {
                if p.contains(&y, -DEDUP) {
                    let (_, c) = m.carrier(fd, &y)?;
                    class.add_at(c, -l.index);
                }
            }
        }
        for l in located.iter().filter(|l| l.z.patch == Some(pi)) {
            class.add_at(l.coset.clone(), l.index);
        }
    }

    // records over ball(R)
    let shift_cell = |c: &Cell, s: &[i64]| -> Result<Cell> {
        let v = group.as_vector(&c.g).unwrap_or_else(|| vec![0; n]);
        let w: Vec<i64> = v.iter().zip(s).map(|(a, b)| a + b).collect();
        Ok(Cell {
            g: group.from_vector(&w)?,
            dim: c.dim,
            idx: c.idx,
        })
    };
    let mut records = Vec::new();
    for h in group.ball(radius)? {
        let hv = group.as_vector(&h).unwrap_or_else(|| vec![0; n]);
        for l in located.iter().filter(|l| l.z.patch.is_none()) {
            let cv = group.as_vector(&l.coset).unwrap_or_else(|| vec![0; n]);
            let s: Vec<i64> = hv.iter().zip(&cv).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = l.z.x.iter().zip(&s).map(|(a, b)| a + *b as f64).collect();
            if m.patches.iter().any(|p| p.contains(&y, -DEDUP)) {
                continue;
            }
            records.push(FixedPointRecord {
                host: shift_cell(&l.host, &s)?,
                carrier: shift_cell(&l.carrier, &s)?,
                location: Location::Euclidean(y),
                coset: h.clone(),
                delta: q_floor(delta.min(l.clearance)),
                index: Some(l.index),
                periodic: true,
            });
        }
    }
    for l in located.iter().filter(|l| l.z.patch.is_some()) {
        records.push(FixedPointRecord {
            host: l.host.clone(),
            carrier: l.carrier.clone(),
            location: Location::Euclidean(l.z.x.clone()),
            coset: l.coset.clone(),
            delta: q_floor(delta.min(l.clearance)),
            index: Some(l.index),
            periodic: false,
        });
    }
    sort_records(group, &mut records);
    Ok(Localization {
        records,
        class,
        tameness,
    })
}

fn localize_simplicial(m: &SimplicialMap, fd: &FundamentalDomain, radius: usize) -> Result<Localization> {
    let group = m.group();
    let e = group.identity();
    for (g, _) in m.overrides.keys() {
        if group.length(g) > radius {
            return Err(Error::Region(format!(
                "override at {} lies outside ball({radius}) (--radius)",
                group.format(g)
            )));
        }
    }
    let mut periodic = Vec::new();
    for ti in 0..m.top_count() {
        if let Some(p) = m.solve_cell(&e, ti)? {
            let c = fd.translate_of(group, &p.carrier)?;
            periodic.push((p, c));
        }
    }
    let affected = m.affected_cells()?;
    let mut class = ClassFunction::constant(periodic.iter().map(|(p, _)| p.index).sum());
    let mut replaced = Vec::new();
    for (d, ti) in &affected {
        if let Some((p, c)) = periodic.iter().find(|(p, _)| p.host.idx == *ti) {
            class.add_at(group.mul(d, c)?, -p.index);
        }
        if let Some(p) = m.solve_cell(d, *ti)? {
            let c = fd.translate_of(group, &p.carrier)?;
            class.add_at(c.clone(), p.index);
            replaced.push((p, c));
        }
    }
    let gauge = |b: &[Q]| b.iter().min().cloned().unwrap_or_else(Q::zero);
    let delta = periodic
        .iter()
        .chain(&replaced)
        .map(|(p, _)| gauge(&p.bary))
        .min()
        .unwrap_or_else(|| Q::from_integer(1.into()));

    let mut epsilon: Option<Q> = None;
    let mut consider = |v: Q| {
        if epsilon.as_ref().is_none_or(|e| v < *e) {
            epsilon = Some(v);
        }
    };
    for ti in 0..m.top_count() {
        let avoid: Vec<(Vec<Q>, Q)> = periodic
            .iter()
            .filter(|(p, _)| p.host.idx == ti)
            .map(|(p, _)| (p.bary.clone(), delta.clone()))
            .collect();
        consider(m.sample_min(&e, ti, &avoid)?);
    }
    for (d, ti) in &affected {
        let avoid: Vec<(Vec<Q>, Q)> = replaced
            .iter()
            .filter(|(p, _)| p.host.g == *d && p.host.idx == *ti)
            .map(|(p, _)| (p.bary.clone(), delta.clone()))
            .collect();
        consider(m.sample_min(d, *ti, &avoid)?);
    }
    let epsilon = epsilon.unwrap_or_else(Q::zero);
    let (verdict, witnesses) = if epsilon.is_positive() {
        (Tameness::StronglyTame, vec![])
    } else {
        (
            Tameness::NotTame,
            vec!["displacement vanishes at a sample point outside the isolation balls".to_string()],
        )
    };

    let mut records = Vec::new();
    for h in group.ball(radius)? {
        for (p, c) in &periodic {
            let d = group.mul(&h, &group.inv(c)?)?;
            if affected.contains(&(d.clone(), p.host.idx)) {
                continue;
            }
            records.push(FixedPointRecord {
                host: Cell {
                    g: d.clone(),
                    dim: p.host.dim,
                    idx: p.host.idx,
                },
                carrier: Cell {
                    g: group.mul(&d, &p.carrier.g)?,
                    dim: p.carrier.dim,
                    idx: p.carrier.idx,
                },
                location: Location::Barycentric(p.bary.clone()),
                coset: h.clone(),
                delta: gauge(&p.bary),
                index: Some(p.index),
                periodic: true,
            });
        }
    }
    for (p, c) in replaced {
        records.push(FixedPointRecord {
            delta: gauge(&p.bary),
            host: p.host,
            carrier: p.carrier,
            location: Location::Barycentric(p.bary),
            coset: c,
            index: Some(p.index),
            periodic: false,
        });
    }
    sort_records(group, &mut records);
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

pub fn localize(m: &SelfMapModel, fd: &FundamentalDomain, radius: usize, opts: SearchOptions) -> Result<Localization> {
    match m {
        SelfMapModel::Simplicial(s) => localize_simplicial(s, fd, radius),
        SelfMapModel::Analytic(a) => localize_torus(a, IndexRule::Displacement, fd, radius, opts),
    }
}

/// Fixed points whose coset lies in `ball(R)` (and every override point),
/// without indices.
pub fn find_fixed_points(m: &SelfMapModel, radius: usize) -> Result<Vec<FixedPointRecord>> {
    let fd = m.fundamental_domain()?;
    let mut out = localize(m, &fd, radius, SearchOptions::default())?.records;
    for r in &mut out {
        r.index = None;
    }
    Ok(out)
}

/// Local index at a located fixed point.
pub fn local_index(m: &SelfMapModel, p: &FixedPointRecord) -> Result<i64> {
    if !p.delta.is_positive() {
        return Err(Error::FaceFixedPoint("fixed point without an isolation radius".into()));
    }
    match (m, &p.location) {
        (SelfMapModel::Simplicial(s), Location::Barycentric(_)) => s
            .solve_cell(&p.host.g, p.host.idx)?
            .map(|c| c.index)
            .ok_or_else(|| Error::input("no fixed point in the given host cell")),
        (SelfMapModel::Analytic(a), Location::Euclidean(x)) => {
            local_index_at(a, IndexRule::Displacement, x, p.delta.to_f64_lossy() / 2.0)
        }
        _ => Err(Error::input("record does not belong to this kind of model")),
    }
}

/// Index of `u` at `x` with the planar degree radius `radius` as fallback.
pub(crate) fn local_index_at(a: &TorusModel, rule: IndexRule, x: &[f64], radius: f64) -> Result<i64> {
    let patch = a.patches.iter().position(|p| p.contains(x, -DEDUP));
    let z = RawZero { x: x.to_vec(), patch };
    a.index(&z, rule, radius)
}

/// Planar degree of the displacement on the circle of radius `radius`
/// (independent of the determinant path).
pub fn degree_at_radius(m: &TorusModel, x: &[f64], radius: f64) -> Result<i64> {
    let patch = m.patches.iter().position(|p| p.contains(x, -DEDUP));
    m.pl_degree(&RawZero { x: x.to_vec(), patch }, radius)
}

pub fn tameness_check(m: &SelfMapModel, radius: usize) -> Result<TamenessReport> {
    let fd = m.fundamental_domain()?;
    match localize(m, &fd, radius, SearchOptions::default()) {
        Ok(l) => Ok(l.tameness),
        Err(Error::NotTame(why)) => Ok(TamenessReport::not_tame(why)),
        Err(e) => Err(e),
    }
}

/// Per-coset index sums; refuses unless strongly tame.
pub fn lefschetz_class(m: &SelfMapModel, fd: &FundamentalDomain, radius: usize) -> Result<ClassFunction> {
    lefschetz_class_with(m, fd, radius, SearchOptions::default())
}

pub fn lefschetz_class_with(
    m: &SelfMapModel,
    fd: &FundamentalDomain,
    radius: usize,
    opts: SearchOptions,
) -> Result<ClassFunction> {
    let l = localize(m, fd, radius, opts)?;
    require_strong(&l.tameness)?;
    Ok(l.class)
}

pub(crate) fn require_strong(t: &TamenessReport) -> Result<()> {
    match t.verdict {
        Tameness::StronglyTame => Ok(()),
        Tameness::Tame => Err(Error::FaceFixedPoint(t.witnesses.join("; "))),
        Tameness::NotTame => Err(Error::NotTame(t.witnesses.join("; "))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    /// Constant part of the Lefschetz class.
    pub class_constant: i64,
    /// Classical Lefschetz number of the descended map (homology traces).
    pub lefschetz: i64,
    pub traces: Vec<i64>,
    pub equal: bool,
}

/// Classical Lefschetz–Hopf on the quotient as an independent check of the
/// constant part. Analytic displacements descend to maps homotopic to the
/// identity (straight-line homotopy), so their oracle is `L(id) = χ`.
pub fn equivariant_oracle_check(m: &SelfMapModel) -> Result<OracleReport> {
    if !m.is_equivariant() {
        return Err(Error::input("the oracle needs an equivariant map (no overrides)"));
    }
    let fd = m.fundamental_domain()?;
    let class = lefschetz_class(m, &fd, 0)?;
    oracle_for_class(m, &class)
}

/// Oracle comparison against an already computed class.
pub fn oracle_for_class(m: &SelfMapModel, class: &ClassFunction) -> Result<OracleReport> {
    if !m.is_equivariant() {
        return Err(Error::input("the oracle needs an equivariant map (no overrides)"));
    }
    let q = m.quotient();
    let report = match m {
        SelfMapModel::Simplicial(s) => lefschetz_report(q, s.subdivision(), &s.descended())?,
        SelfMapModel::Analytic(_) => lefschetz_report(q, 0, &(0..q.n_vertices()).collect::<Vec<_>>())?,
    };
    Ok(OracleReport {
        class_constant: class.constant,
        lefschetz: report.lefschetz,
        traces: report.traces,
        equal: class.constant == report.lefschetz && class.finite.is_empty(),
    })
}

trait LossyF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl LossyF64 for Q {
    fn to_f64_lossy(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use crate::q;
    use crate::q as q_;
    use std::collections::BTreeMap;

    pub(crate) fn sin_model(t: usize, scale: f64) -> SelfMapModel {
        let exprs = vec![format!("{scale}*sin(2*pi*x)"), format!("{scale}*sin(2*pi*y)")];
        let c = Component::parse(2, &exprs, None).unwrap();
        SelfMapModel::Analytic(TorusModel::new(Arc::new(fixtures::torus7()), t, c, vec![], Some(1.5 * scale)).unwrap())
    }

    fn octahedron_map(v: Vec<usize>) -> SelfMapModel {
        let o = fixtures::octahedron();
        let e = o.group().identity();
        SelfMapModel::Simplicial(
            SimplicialMap::new(Arc::new(o), 0, v.into_iter().map(|v| (e.clone(), v)).collect(), BTreeMap::new(), None)
                .unwrap(),
        )
    }

    #[test]
    fn sin_model_end_to_end() {
        let m = sin_model(1, 0.2);
        let fd = m.fundamental_domain().unwrap();
        let l = localize(&m, &fd, 1, SearchOptions::default()).unwrap();
        assert_eq!(l.tameness.verdict, Tameness::StronglyTame);
        assert_eq!(l.tameness.delta, q(1, 4));
        assert!(l.tameness.epsilon.is_positive());
        // 5 cosets in ball(1), 4 points each
        assert_eq!(l.records.len(), 20);
        let at_origin: Vec<i64> = l
            .records
            .iter()
            .filter(|r| m.group().is_identity(&r.coset))
            .map(|r| r.index.unwrap())
            .collect();
        assert_eq!(at_origin.iter().sum::<i64>(), 0);
        assert_eq!(at_origin.iter().filter(|i| **i == 1).count(), 2);
        assert_eq!(l.class, ClassFunction::zero());
        let o = equivariant_oracle_check(&m).unwrap();
        assert!(o.equal);
        assert_eq!(o.lefschetz, 0);
    }

    #[test]
    fn indices_by_position() {
        let m = sin_model(1, 0.2);
        let pts = find_fixed_points(&m, 0).unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            let Location::Euclidean(x) = &p.location else { panic!() };
            let frac = |v: f64| v.rem_euclid(1.0);
            let half = |v: f64| (frac(v) - 0.5).abs() < 1e-6;
            let want = if half(x[0]) == half(x[1]) { 1 } else { -1 };
            assert_eq!(local_index(&m, p).unwrap(), want);
        }
    }

    #[test]
    fn constant_displacement_has_no_fixed_points() {
        let c = Component::parse(2, &["0.3".into(), "0".into()], None).unwrap();
        let m = SelfMapModel::Analytic(TorusModel::new(Arc::new(fixtures::torus7()), 1, c, vec![], None).unwrap());
        assert!(find_fixed_points(&m, 2).unwrap().is_empty());
        let t = tameness_check(&m, 1).unwrap();
        assert_eq!(t.verdict, Tameness::StronglyTame);
        assert_eq!(t.epsilon, q(3, 10));
        let fd = m.fundamental_domain().unwrap();
        assert_eq!(lefschetz_class(&m, &fd, 1).unwrap(), ClassFunction::zero());
    }

    #[test]
    fn identity_maps_are_refused() {
        let m = octahedron_map((0..6).collect());
        assert!(matches!(find_fixed_points(&m, 0), Err(Error::NotTame(_))));
        assert_eq!(tameness_check(&m, 0).unwrap().verdict, Tameness::NotTame);
        let fd = m.fundamental_domain().unwrap();
        assert!(lefschetz_class(&m, &fd, 0).is_err());
        assert!(equivariant_oracle_check(&m).is_err());
        let c = Component::parse(2, &["0".into(), "0".into()], None).unwrap();
        let a = SelfMapModel::Analytic(TorusModel::new(Arc::new(fixtures::torus7()), 0, c, vec![], None).unwrap());
        assert_eq!(tameness_check(&a, 0).unwrap().verdict, Tameness::NotTame);
    }

    #[test]
    fn octahedron_oracles() {
        let rot = octahedron_map(fixtures::octahedron_rotation());
        let o = equivariant_oracle_check(&rot).unwrap();
        assert_eq!((o.class_constant, o.lefschetz, o.equal), (2, 2, true));
        let anti = octahedron_map(fixtures::octahedron_antipodal());
        let o = equivariant_oracle_check(&anti).unwrap();
        assert_eq!((o.class_constant, o.lefschetz, o.equal), (0, 0, true));
        let t = tameness_check(&anti, 0).unwrap();
        assert_eq!(t.verdict, Tameness::StronglyTame);
        assert!(t.epsilon.is_positive());
    }

    #[test]
    fn subdivision_and_scaling_stability() {
        for m in [octahedron_map(fixtures::octahedron_rotation()), sin_model(1, 0.2)] {
            let fd = m.fundamental_domain().unwrap();
            let a = lefschetz_class(&m, &fd, 1).unwrap();
            let b = lefschetz_class(&m.refined().unwrap(), &fd, 1).unwrap();
            assert_eq!(a, b);
        }
        let fd = sin_model(1, 0.2).fundamental_domain().unwrap();
        assert_eq!(
            lefschetz_class(&sin_model(1, 0.2), &fd, 1).unwrap(),
            lefschetz_class(&sin_model(1, 0.3), &fd, 1).unwrap()
        );
    }

    #[test]
    fn deck_invariance_of_indices() {
        let m = sin_model(1, 0.2);
        let SelfMapModel::Analytic(a) = &m else { unreachable!() };
        let base = find_fixed_points(&m, 0).unwrap();
        for p in &base {
            let Location::Euclidean(x) = &p.location else { panic!() };
            let i0 = local_index(&m, p).unwrap();
            for h in m.group().ball(2).unwrap() {
                let v = m.group().as_vector(&h).unwrap();
                let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + *b as f64).collect();
                assert_eq!(local_index_at(a, IndexRule::Displacement, &y, 0.05).unwrap(), i0);
            }
        }
    }

    #[test]
    fn translation_and_vertex_overrides() {
        let q = Arc::new(fixtures::torus_grid(4).unwrap());
        let group = q.group().clone();
        let images = fixtures::translation_images(&q, &[q_(1, 4), q_(0, 1)]).unwrap();
        let base = SimplicialMap::new(q.clone(), 0, images, BTreeMap::new(), Some(2)).unwrap();
        let m = SelfMapModel::Simplicial(base.refined().unwrap());
        let SelfMapModel::Simplicial(fine) = &m else { unreachable!() };
        let images = fine.images.clone();
        let fd = m.fundamental_domain().unwrap();
        let l = localize(&m, &fd, 1, SearchOptions::default()).unwrap();
        assert!(l.records.is_empty());
        assert_eq!(l.tameness.verdict, Tameness::StronglyTame);
        assert!(l.class.is_zero_function());

        // any admissible single-vertex change keeps the class zero
        let mut tried = 0;
        for v in (0..images.len()).step_by(11) {
            for h in group.ball(1).unwrap() {
                for w in 0..q.n_vertices() {
                    let img = (h.clone(), w);
                    if img == images[v] {
                        continue;
                    }
                    let ov = BTreeMap::from([((group.identity(), v), img)]);
                    let Ok(s) = SimplicialMap::new(q.clone(), 1, images.clone(), ov, None) else { continue };
                    let m = SelfMapModel::Simplicial(s);
                    match localize(&m, &fd, 1, SearchOptions::default()) {
                        Ok(l) if l.tameness.verdict == Tameness::StronglyTame => {
                            assert_eq!(l.class.constant, 0);
                            assert_eq!(l.class.finite_total(), 0, "override {v} -> {w}");
                            tried += 1;
                        }
                        _ => {}
                    }
                }
            }
        }
        assert!(tried > 0);
    }

    #[test]
    fn analytic_override_adds_a_cancelling_pair() {
        let base = Component::parse(2, &["0.2*sin(2*pi*x)".into(), "0.2*sin(2*pi*y)".into()], None).unwrap();
        let patch = Patch {
            translate: vec![0, 0],
            comp: Component::parse(
                2,
                &[
                    "0.2*(sin(2*pi*x) - 4*sin(pi*x)^2*sin(pi*y)^2*sin(2*pi*x)^2)".into(),
                    "0.2*sin(2*pi*y)".into(),
                ],
                None,
            )
            .unwrap(),
        };
        let q = Arc::new(fixtures::torus7());
        let plain = SelfMapModel::Analytic(TorusModel::new(q.clone(), 1, base.clone(), vec![], None).unwrap());
        let m = SelfMapModel::Analytic(TorusModel::new(q, 1, base, vec![patch], None).unwrap());
        let fd = m.fundamental_domain().unwrap();
        let a = localize(&plain, &fd, 1, SearchOptions::default()).unwrap();
        let b = localize(&m, &fd, 1, SearchOptions::default()).unwrap();
        assert_eq!(b.tameness.verdict, Tameness::StronglyTame);
        assert_eq!(b.records.len(), a.records.len() + 2);
        assert_eq!(b.records.iter().filter(|r| !r.periodic).map(|r| r.index.unwrap()).sum::<i64>(), 1);
        assert_eq!(b.class.finite_total(), 0);
        assert!(b.class.sub(&a.class).is_zero_function() || b.class.sub(&a.class).finite_total() == 0);
    }
}
