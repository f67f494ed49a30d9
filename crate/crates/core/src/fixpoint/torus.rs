//! Closed-form `Z^n`-periodic maps `u: R^n -> R^n` on flat torus covers:
//! zero search, interval validation, point location and sampling. Shared by
//! analytic self-maps (`u` = displacement) and analytic vector fields.

use std::sync::Arc;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::complex::{subdivide_with_carriers, Cell, FundamentalDomain, PeriodicComplex, QuotientComplex};
use crate::error::{Error, Result};
use crate::expr::{Expr, Interval};
use crate::group::{Elem, GroupKind, MarkedGroup};
use crate::Q;

/// Newton tolerance and zero deduplication radius.
pub const DEDUP: f64 = 1e-9;
const RESIDUAL: f64 = 1e-11;

/// `n` expressions and their Jacobian.
#[derive(Clone, Debug)]
pub struct Component {
    pub exprs: Vec<Expr>,
    pub jac: Vec<Vec<Expr>>,
}

impl Component {
    /// Parses `exprs`; without a declared Jacobian it is derived symbolically.
    pub fn parse(dim: usize, exprs: &[String], jac: Option<&[Vec<String>]>) -> Result<Self> {
        if exprs.len() != dim {
            return Err(Error::input(format!("expected {dim} expressions, got {}", exprs.len())));
        }
        let exprs: Vec<Expr> = exprs.iter().map(|s| Expr::parse(s, dim)).collect::<Result<_>>()?;
        let jac = match jac {
            Some(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::input(format!("Jacobian must be {dim}x{dim}")));
                }
                rows.iter()
                    .map(|r| r.iter().map(|s| Expr::parse(s, dim)).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?
            }
            None => exprs.iter().map(|e| (0..dim).map(|j| e.derivative(j)).collect()).collect(),
        };
        Ok(Component { exprs, jac })
    }

    pub fn dim(&self) -> usize {
        self.exprs.len()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.exprs.iter().map(|e| e.eval(x)).collect()
    }

    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jac.iter().map(|r| r.iter().map(|e| e.eval(x)).collect()).collect()
    }

    pub fn eval_box(&self, x: &[Interval]) -> Vec<Interval> {
        self.exprs.iter().map(|e| e.eval_interval(x)).collect()
    }

    pub fn jacobian_box(&self, x: &[Interval]) -> Vec<Vec<Interval>> {
        self.jac.iter().map(|r| r.iter().map(|e| e.eval_interval(x)).collect()).collect()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Component {
            exprs: self.exprs.iter().map(|e| e.scaled(k)).collect(),
            jac: self.jac.iter().map(|r| r.iter().map(|e| e.scaled(k)).collect()).collect(),
        }
    }

    /// Largest deviation from `other` on a grid of each face of the cube
    /// `k + [0,1]^n`.
    fn boundary_mismatch(&self, other: &Component, translate: &[i64]) -> f64 {
        let n = self.dim();
        let m: usize = 16;
        let mut worst: f64 = 0.0;
        for axis in 0..n {
            for side in [0.0, 1.0] {
                for flat in 0..m.pow(n as u32 - 1) {
                    let mut x = vec![0.0; n];
                    let mut rest = flat;
                    for (d, xd) in x.iter_mut().enumerate() {
                        if d == axis {
                            *xd = side;
                        } else {
                            *xd = (rest % m) as f64 / (m - 1) as f64;
                            rest /= m;
                        }
                    }
                    for (d, xd) in x.iter_mut().enumerate() {
                        *xd += translate[d] as f64;
                    }
                    let a = self.eval(&x);
                    let b = other.eval(&x);
                    worst = worst.max(norm(&sub(&a, &b)));
                }
            }
        }
        worst
    }
}

/// A finite-region replacement of the periodic map on the closed cube
/// `translate + [0,1]^n`.
#[derive(Clone, Debug)]
pub struct Patch {
    pub translate: Vec<i64>,
    pub comp: Component,
}

impl Patch {
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.iter()
            .zip(&self.translate)
            .all(|(xi, k)| *xi >= *k as f64 - slack && *xi <= *k as f64 + 1.0 + slack)
    }
}

/// How the sign of the Jacobian determinant becomes a local index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexRule {
    /// `u = f - id`: index `sign det(I - Df) = sign det(-Du)`.
    Displacement,
    /// `u = v`: index `sign det Dv`.
    Field,
}

/// A periodic closed-form map with finitely many patches, over a flat torus
/// quotient triangulated by `sd^t`.
#[derive(Clone, Debug)]
pub struct TorusModel {
    pub base: Component,
    pub patches: Vec<Patch>,
    /// Declared `sup |u|`.
    pub bound: Option<f64>,
    pub quotient: Arc<QuotientComplex>,
    pub subdivision: usize,
    host: Arc<QuotientComplex>,
    base_locator: Arc<Locator>,
    host_locator: Arc<Locator>,
}

/// A zero of `u` in absolute coordinates.
#[derive(Clone, Debug)]
pub struct RawZero {
    pub x: Vec<f64>,
    /// `None` for zeros of the periodic part (stored with `x ∈ [0,1)^n`).
    pub patch: Option<usize>,
}

/// Result of validating one zero.
#[derive(Clone, Debug)]
pub struct Validation {
    /// Krawczyk proved a unique zero in `enclosure`.
    pub unique: bool,
    pub enclosure: Vec<Interval>,
    /// Sign of `det Du` proved over `enclosure`.
    pub det_sign: Option<i8>,
}

impl TorusModel {
    pub fn new(
        quotient: Arc<QuotientComplex>,
        subdivision: usize,
        base: Component,
        patches: Vec<Patch>,
        bound: Option<f64>,
    ) -> Result<Self> {
        let n = quotient.dim();
        match quotient.group().kind() {
            GroupKind::FreeAbelian { rank } if *rank == n => {}
            _ => {
                return Err(Error::Unsupported(format!(
                    "analytic models need a flat torus quotient over Z^{n}; hyperbolic and other covers go through index data"
                )))
            }
        }
        if quotient.coords().is_none() {
            return Err(Error::input("analytic models need vertex coordinates on the quotient"));
        }
        if base.dim() != n || patches.iter().any(|p| p.comp.dim() != n || p.translate.len() != n) {
            return Err(Error::input(format!("expressions must have dimension {n}")));
        }
        for p in &patches {
            let gap = p.comp.boundary_mismatch(&base, &p.translate);
            if gap > 1e-9 {
                return Err(Error::input(format!(
                    "override at {:?} differs from the periodic map by {gap:.3e} on the boundary of its cube",
                    p.translate
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(p) = patches.iter().find(|p| !seen.insert(p.translate.clone())) {
            return Err(Error::input(format!("two overrides at {:?}", p.translate)));
        }
        let host = Arc::new(subdivide_with_carriers(quotient.clone(), subdivision)?.complex);
        let base_locator = Arc::new(Locator::new(&quotient)?);
        let host_locator = Arc::new(Locator::new(&host)?);
        Ok(TorusModel {
            base,
            patches,
            bound,
            quotient,
            subdivision,
            host,
            base_locator,
            host_locator,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn group(&self) -> &MarkedGroup {
        self.quotient.group()
    }

    pub fn host(&self) -> &Arc<QuotientComplex> {
        &self.host
    }

    pub fn is_equivariant(&self) -> bool {
        self.patches.is_empty()
    }

    /// Same model with `u` replaced by `k u`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.base = self.base.scaled(k);
        for p in &mut out.patches {
            p.comp = p.comp.scaled(k);
        }
        out.bound = self.bound.map(|b| b * k.abs());
        out
    }

    /// Same model on one more barycentric subdivision of the host.
    pub fn refined(&self) -> Result<Self> {
        TorusModel::new(
            self.quotient.clone(),
            self.subdivision + 1,
            self.base.clone(),
            self.patches.clone(),
            self.bound,
        )
    }

    /// The component in force at `x` (patches win on their closed cube).
    pub fn component_at(&self, x: &[f64]) -> &Component {
        self.patches
            .iter()
            .find(|p| p.contains(x, 0.0))
            .map_or(&self.base, |p| &p.comp)
    }

    fn component(&self, patch: Option<usize>) -> &Component {
        patch.map_or(&self.base, |i| &self.patches[i].comp)
    }

    /// Zeros of the periodic part in `[0,1)^n`, then zeros of each patch in
    /// the interior of its cube. `grid` starts per axis.
    pub fn zeros(&self, grid: usize) -> Result<Vec<RawZero>> {
        let n = self.dim();
        let mut out: Vec<RawZero> = self
            .search(&self.base, &vec![0; n], grid)?
            .into_iter()
            .map(|x| RawZero {
                x: x.iter().map(|v| wrap(*v)).collect(),
                patch: None,
            })
            .collect();
        out.sort_by(|a, b| cmp_vec(&a.x, &b.x));
        let mut periodic: Vec<RawZero> = Vec::new();
        for z in out {
            if !periodic.iter().any(|p| torus_dist(&p.x, &z.x) < DEDUP) {
                periodic.push(z);
            }
        }
        for p in &periodic {
            self.check_isolated(&self.base, &p.x)?;
        }
        let mut all = periodic;
        for (i, patch) in self.patches.iter().enumerate() {
            let mut found: Vec<Vec<f64>> = Vec::new();
            for x in self.search(&patch.comp, &patch.translate, grid)? {
                if patch.contains(&x, -DEDUP) && !found.iter().any(|y| dist(y, &x) < DEDUP) {
                    found.push(x);
                }
            }
            found.sort_by(|a, b| cmp_vec(a, b));
            for x in found {
                self.check_isolated(&patch.comp, &x)?;
                all.push(RawZero { x, patch: Some(i) });
            }
        }
        Ok(all)
    }

    /// Damped Newton from the centers of a `grid^n` lattice in `k + [0,1]^n`.
    fn search(&self, c: &Component, k: &[i64], grid: usize) -> Result<Vec<Vec<f64>>> {
        let n = self.dim();
        let total = grid.checked_pow(n as u32).filter(|t| *t <= 1 << 22).ok_or_else(|| Error::Budget {
            what: "Newton start grid".into(),
            flag: "--grid",
            needed: grid,
            limit: 2048,
        })?;
        let results: Vec<Newton> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut x = vec![0.0; n];
                let mut rest = flat;
                for (d, xd) in x.iter_mut().enumerate() {
                    *xd = k[d] as f64 + ((rest % grid) as f64 + 0.5) / grid as f64;
                    rest /= grid;
                }
                newton(c, x)
            })
            .collect();
        let mut roots = Vec::new();
        let mut stalled = Vec::new();
        for r in results {
            match r {
                Newton::Root(x) => roots.push(x),
                Newton::Stalled(x) => stalled.push(x),
                Newton::Diverged => {}
            }
        }
        // a stall close to nothing that converged marks a cell Newton cannot resolve
        for s in &stalled {
            let near = roots.iter().any(|r| torus_dist(r, s) < 1e-4);
            if !near && norm(&c.eval(s)) < 1e-7 {
                return Err(Error::Ambiguous(format!(
                    "Newton stalls near {} with residual {:.2e}; refine --grid or check the model there",
                    fmt_point(s),
                    norm(&c.eval(s))
                )));
            }
        }
        Ok(roots)
    }

    /// Rejects zeros that sit on a continuum of zeros.
    fn check_isolated(&self, c: &Component, x: &[f64]) -> Result<()> {
        let j = c.jacobian(x);
        if det(&j).abs() > 1e-9 {
            return Ok(());
        }
        let n = x.len();
        let r = 1e-3;
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for d in 0..n {
            for s in [-1.0, 1.0] {
                let mut e = vec![0.0; n];
                e[d] = s;
                dirs.push(e);
            }
        }
        let hits = dirs
            .iter()
            .filter(|e| {
                let y: Vec<f64> = x.iter().zip(e.iter()).map(|(a, b)| a + r * b).collect();
                norm(&c.eval(&y)) < 1e-13
            })
            .count();
        if hits > 0 {
            return Err(Error::NotTame(format!(
                "zeros are not isolated near {}: u vanishes at distance {r} as well",
                fmt_point(x)
            )));
        }
        Ok(())
    }

    /// Krawczyk test around `x` and the sign of `det Du` on the enclosure.
    pub fn validate(&self, z: &RawZero) -> Validation {
        let c = self.component(z.patch);
        let n = self.dim();
        let point: Vec<Interval> = z.x.iter().map(|v| Interval::point(*v)).collect();
        let Some(y) = inverse(&c.jacobian(&z.x)) else {
            return Validation {
                unique: false,
                enclosure: point,
                det_sign: None,
            };
        };
        let ux = c.eval_box(&point);
        let step: f64 = (0..n)
            .map(|i| (0..n).map(|j| (y[i][j] * ux[j].mid()).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut r = (4.0 * step).max(1e-12);
        for _ in 0..8 {
            let bx: Vec<Interval> = z.x.iter().map(|v| Interval::new(v - r, v + r)).collect();
            let jx = c.jacobian_box(&bx);
            let mut ok = true;
            for i in 0..n {
                let mut k = point[i];
                for j in 0..n {
                    k = k - Interval::point(y[i][j]) * ux[j];
                    let mut m = Interval::point(if i == j { 1.0 } else { 0.0 });
                    for (l, row) in jx.iter().enumerate() {
                        m = m - Interval::point(y[i][l]) * row[j];
                    }
                    k = k + m * Interval::new(-r, r);
                }
                ok &= k.strictly_inside(&bx[i]);
            }
            if ok {
                let d = interval_det(&jx);
                let det_sign = if d.lo > 0.0 {
                    Some(1)
                } else if d.hi < 0.0 {
                    Some(-1)
                } else {
                    None
                };
                return Validation {
                    unique: true,
                    enclosure: bx,
                    det_sign,
                };
            }
            r *= 10.0;
            if r > 1e-3 {
                break;
            }
        }
        Validation {
            unique: false,
            enclosure: point,
            det_sign: None,
        }
    }

    /// Local index at `z` by the determinant sign, falling back to the PL
    /// degree on a circle of radius `radius` when the sign is not proved.
    pub fn index(&self, z: &RawZero, rule: IndexRule, radius: f64) -> Result<i64> {
        let n = self.dim();
        let v = self.validate(z);
        let sign = match v.det_sign {
            Some(s) => i64::from(s),
            None => {
                let d = det(&self.component(z.patch).jacobian(&z.x));
                if d.abs() > 1e-6 {
                    d.signum() as i64
                } else {
                    let d = self.pl_degree(z, radius)?;
                    return Ok(if rule == IndexRule::Displacement && n % 2 == 1 { -d } else { d });
                }
            }
        };
        Ok(match rule {
            IndexRule::Field => sign,
            IndexRule::Displacement if n % 2 == 1 => -sign,
            IndexRule::Displacement => sign,
        })
    }

    /// Degree of `u` on a triangulated circle: signed crossings of a ray.
    pub fn pl_degree(&self, z: &RawZero, radius: f64) -> Result<i64> {
        if self.dim() != 2 {
            return Err(Error::Ambiguous(format!(
                "degenerate zero at {} in dimension {}: only the planar degree fallback is implemented",
                fmt_point(&z.x),
                self.dim()
            )));
        }
        let c = self.component(z.patch);
        let mut k = 64usize;
        loop {
            let pts: Vec<[f64; 2]> = (0..k)
                .map(|i| {
                    let th = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                    let y = [z.x[0] + radius * th.cos(), z.x[1] + radius * th.sin()];
                    let u = c.eval(&y);
                    [u[0], u[1]]
                })
                .collect();
            let smallest = pts.iter().map(|p| p[0].hypot(p[1])).fold(f64::INFINITY, f64::min);
            if smallest < 1e-12 {
                return Err(Error::Ambiguous(format!(
                    "u nearly vanishes on the circle of radius {radius} around {}; use a smaller radius",
                    fmt_point(&z.x)
                )));
            }
            let fine = (0..k).all(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % k]);
                let cross = a[0] * b[1] - a[1] * b[0];
                let dot = a[0] * b[0] + a[1] * b[1];
                cross.atan2(dot).abs() < std::f64::consts::FRAC_PI_4
            });
            if !fine {
                k *= 2;
                if k > 1 << 16 {
                    return Err(Error::Ambiguous(format!(
                        "degree at {} not resolved with {k} samples",
                        fmt_point(&z.x)
                    )));
                }
                continue;
            }
            // regular value: direction of the first axis, rotated until no sample sits on the ray
            let mut attempt = 0;
            loop {
                let th = 1e-3 * attempt as f64;
                let (dc, ds) = (th.cos(), th.sin());
                let rot: Vec<[f64; 2]> = pts.iter().map(|p| [p[0] * dc + p[1] * ds, -p[0] * ds + p[1] * dc]).collect();
                if rot.iter().any(|p| p[1].abs() < 1e-14 && p[0] > 0.0) {
                    attempt += 1;
                    continue;
                }
                let mut deg = 0i64;
                for i in 0..k {
                    let (a, b) = (rot[i], rot[(i + 1) % k]);
                    if (a[1] < 0.0) != (b[1] < 0.0) {
                        let x = a[0] + (b[0] - a[0]) * (-a[1]) / (b[1] - a[1]);
                        if x > 0.0 {
                            deg += if b[1] > a[1] { 1 } else { -1 };
                        }
                    }
                }
                return Ok(deg);
            }
        }
    }

    /// Cover cell of the base quotient carrying `x`, ties broken toward the
    /// least coset.
    pub fn carrier(&self, fd: &FundamentalDomain, x: &[f64]) -> Result<(Cell, Elem)> {
        let group = self.group();
        let hits = self.base_locator.locate(x);
        let mut best: Option<(Elem, Cell)> = None;
        for h in hits {
            let cell = Cell {
                g: group.from_vector(&h.shift)?,
                dim: self.dim(),
                idx: h.idx,
            };
            let coset = fd.translate_of(group, &cell)?;
            let key = (group.length(&coset), coset.clone());
            if best
                .as_ref()
                .is_none_or(|(c, _)| key < (group.length(c), c.clone()))
            {
                best = Some((coset, cell));
            }
        }
        best.map(|(c, cell)| (cell, c))
            .ok_or_else(|| Error::Invariant(format!("point {} lies in no simplex", fmt_point(x))))
    }

    /// Host top simplex of `sd^t` around `x` and the distance to its boundary.
    pub fn host_of(&self, x: &[f64]) -> Result<(Cell, f64)> {
        let hits = self.host_locator.locate(x);
        let best = hits
            .into_iter()
            .max_by(|a, b| a.clearance.total_cmp(&b.clearance))
            .ok_or_else(|| Error::Invariant(format!("point {} lies in no host simplex", fmt_point(x))))?;
        Ok((
            Cell {
                g: self.group().from_vector(&best.shift)?,
                dim: self.dim(),
                idx: best.idx,
            },
            best.clearance.max(0.0),
        ))
    }

    /// Minimum of `|u|` on the lattice `(i/m)` of `[0,1)^n` and of each patch
    /// cube, skipping points within `radius(z)` of a zero.
    pub fn sample_min(&self, zeros: &[RawZero], radii: &[f64], m: usize) -> f64 {
        let n = self.dim();
        let total = m.pow(n as u32);
        let periodic: Vec<(usize, &RawZero)> = zeros.iter().enumerate().filter(|(_, z)| z.patch.is_none()).collect();
        let base = (0..total)
            .into_par_iter()
            .map(|flat| {
                let x = lattice(flat, m, n, &vec![0; n]);
                if periodic.iter().any(|(i, z)| torus_dist(&z.x, &x) < radii[*i]) {
                    return f64::INFINITY;
                }
                norm(&self.base.eval(&x))
            })
            .reduce(|| f64::INFINITY, f64::min);
        let mut best = base;
        for (pi, p) in self.patches.iter().enumerate() {
            let local: Vec<(usize, Vec<f64>)> = zeros
                .iter()
                .enumerate()
                .flat_map(|(i, z)| match z.patch {
                    Some(q) if q == pi => vec![(i, z.x.clone())],
                    Some(_) => vec![],
                    None => translates_near(&z.x, &p.translate).into_iter().map(|y| (i, y)).collect(),
                })
                .collect();
            let edge = m + 1;
            let v = (0..edge.pow(n as u32))
                .into_par_iter()
                .map(|flat| {
                    let mut x = vec![0.0; n];
                    let mut rest = flat;
                    for (d, xd) in x.iter_mut().enumerate() {
                        *xd = p.translate[d] as f64 + (rest % edge) as f64 / m as f64;
                        rest /= edge;
                    }
                    if local.iter().any(|(i, y)| dist(y, &x) < radii[*i]) {
                        return f64::INFINITY;
                    }
                    norm(&p.comp.eval(&x))
                })
                .reduce(|| f64::INFINITY, f64::min);
            best = best.min(v);
        }
        best
    }

    /// Largest `|u|` on the sampling lattice and an interval upper bound over
    /// boxes covering the unit cube (`None` if intervals blow up).
    pub fn sup_norm(&self, m: usize) -> (f64, Option<f64>) {
        let n = self.dim();
        let mut sampled: f64 = 0.0;
        let mut comps: Vec<(&Component, Vec<i64>)> = vec![(&self.base, vec![0; n])];
        comps.extend(self.patches.iter().map(|p| (&p.comp, p.translate.clone())));
        let mut enclosure: Option<f64> = Some(0.0);
        for (c, k) in comps {
            for flat in 0..m.pow(n as u32) {
                sampled = sampled.max(norm(&c.eval(&lattice(flat, m, n, &k))));
            }
            let b = 16usize;
            for flat in 0..b.pow(n as u32) {
                let mut bx = Vec::with_capacity(n);
                let mut rest = flat;
                for kd in &k {
                    let i = (rest % b) as f64;
                    rest /= b;
                    bx.push(Interval::new(*kd as f64 + i / b as f64, *kd as f64 + (i + 1.0) / b as f64));
                }
                let sq: f64 = c
                    .eval_box(&bx)
                    .iter()
                    .map(|iv| {
                        let m = iv.lo.abs().max(iv.hi.abs());
                        m * m
                    })
                    .sum();
                enclosure = match enclosure {
                    Some(e) if sq.is_finite() => Some(e.max(sq.sqrt().next_up())),
                    _ => None,
                };
            }
        }
        (sampled, enclosure)
    }

    /// Fundamental domain of the base cover.
    pub fn fundamental_domain(&self) -> Result<FundamentalDomain> {
        PeriodicComplex::new(self.quotient.clone())?.fundamental_domain()
    }
}

/// Positions `y + h` (integer `h`) of a torus point within distance one of
/// the cube `k + [0,1]^n`.
pub fn translates_near(y: &[f64], k: &[i64]) -> Vec<Vec<f64>> {
    let n = y.len();
    let mut out = Vec::new();
    for flat in 0..4usize.pow(n as u32) {
        let mut p = Vec::with_capacity(n);
        let mut rest = flat;
        for d in 0..n {
            let off = (rest % 4) as i64 - 1;
            rest /= 4;
            p.push(y[d] + (k[d] + off) as f64);
        }
        out.push(p);
    }
    out
}

fn lattice(flat: usize, m: usize, n: usize, k: &[i64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    let mut rest = flat;
    for (d, xd) in x.iter_mut().enumerate() {
        *xd = k[d] as f64 + (rest % m) as f64 / m as f64;
        rest /= m;
    }
    x
}

enum Newton {
    Root(Vec<f64>),
    Stalled(Vec<f64>),
    Diverged,
}

fn newton(c: &Component, mut x: Vec<f64>) -> Newton {
    let mut fx = c.eval(&x);
    let mut nf = norm(&fx);
    for _ in 0..80 {
        if nf < 1e-15 {
            break;
        }
        let Some(step) = solve(&c.jacobian(&x), &fx) else {
            break;
        };
        let mut lam = 1.0;
        let (xn, fxn, nfn) = loop {
            let xn: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - lam * s).collect();
            let fxn = c.eval(&xn);
            let nfn = norm(&fxn);
            if nfn < nf || lam < 1e-4 {
                break (xn, fxn, nfn);
            }
            lam *= 0.5;
        };
        if !nfn.is_finite() || nfn >= nf {
            break;
        }
        let moved = lam * norm(&step);
        x = xn;
        fx = fxn;
        nf = nfn;
        if moved < 1e-16 {
            break;
        }
    }
    if !nf.is_finite() || x.iter().any(|v| !v.is_finite()) {
        Newton::Diverged
    } else if nf < RESIDUAL {
        Newton::Root(x)
    } else if nf < 1e-6 {
        Newton::Stalled(x)
    } else {
        Newton::Diverged
    }
}

/// Barycentric point location in a periodic triangulation of `R^n` by
/// lifted quotient simplices.
#[derive(Debug)]
pub struct Locator {
    tops: Vec<Chart>,
}

#[derive(Debug)]
struct Chart {
    idx: usize,
    /// Inverse of the `(n+1)x(n+1)` matrix with columns `(corner_j, 1)`.
    inv: Vec<Vec<f64>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    grad: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Hit {
    pub shift: Vec<i64>,
    pub idx: usize,
    pub bary: Vec<f64>,
    pub clearance: f64,
}

impl Locator {
    pub fn new(q: &QuotientComplex) -> Result<Self> {
        let n = q.dim();
        let coords = q.coords().ok_or_else(|| Error::input("quotient has no coordinates"))?;
        let group = q.group();
        let mut tops = Vec::with_capacity(q.count(n));
        for (idx, s) in q.simplices(n).iter().enumerate() {
            let mut corners = Vec::with_capacity(n + 1);
            for &v in s {
                let shift = group
                    .as_vector(&q.label(s[0], v)?)
                    .ok_or_else(|| Error::Invariant("torus labels are not vectors".into()))?;
                corners.push(
                    (0..n)
                        .map(|d| (&coords[v][d] + Q::from_integer(shift[d].into())).to_f64().unwrap_or(f64::NAN))
                        .collect::<Vec<f64>>(),
                );
            }
            let m: Vec<Vec<f64>> = (0..=n)
                .map(|r| (0..=n).map(|j| if r < n { corners[j][r] } else { 1.0 }).collect())
                .collect();
            let inv = inverse(&m).ok_or_else(|| Error::input(format!("top simplex {s:?} is degenerate in the coordinates")))?;
            let lo = (0..n).map(|d| corners.iter().map(|c| c[d]).fold(f64::INFINITY, f64::min)).collect();
            let hi = (0..n).map(|d| corners.iter().map(|c| c[d]).fold(f64::NEG_INFINITY, f64::max)).collect();
            let grad = inv.iter().map(|row| norm(&row[..n])).collect();
            tops.push(Chart { idx, inv, lo, hi, grad });
        }
        Ok(Locator { tops })
    }

    /// Every lifted top simplex whose closure contains `x` (tolerance 1e-12).
    pub fn locate(&self, x: &[f64]) -> Vec<Hit> {
        let n = x.len();
        let mut out = Vec::new();
        for t in &self.tops {
            let ranges: Vec<(i64, i64)> = (0..n)
                .map(|d| ((x[d] - t.hi[d] - 1e-9).ceil() as i64, (x[d] - t.lo[d] + 1e-9).floor() as i64))
                .collect();
            let mut shift: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            if ranges.iter().any(|r| r.0 > r.1) {
                continue;
            }
            loop {
                let mut y: Vec<f64> = (0..n).map(|d| x[d] - shift[d] as f64).collect();
                y.push(1.0);
                let bary: Vec<f64> = t.inv.iter().map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum()).collect();
                if bary.iter().all(|l| *l >= -1e-12) {
                    let clearance = bary.iter().zip(&t.grad).map(|(l, g)| l / g).fold(f64::INFINITY, f64::min);
                    out.push(Hit {
                        shift: shift.clone(),
                        idx: t.idx,
                        bary,
                        clearance,
                    });
                }
                // odometer over the candidate shifts
                let mut d = 0;
                loop {
                    if d == n {
                        break;
                    }
                    if shift[d] < ranges[d].1 {
                        shift[d] += 1;
                        break;
                    }
                    shift[d] = ranges[d].0;
                    d += 1;
                }
                if d == n {
                    break;
                }
            }
        }
        out
    }
}

// ---- small dense linear algebra in f64 ----

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

/// Distance on `R^n / Z^n`.
pub fn torus_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(1.0);
            let d = d.min(1.0 - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Representative in `[0,1)`, snapping values within the dedup radius of 1 to 0.
pub fn wrap(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    if w > 1.0 - 1e-12 {
        0.0
    } else {
        w
    }
}

fn cmp_vec(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

pub fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, v)| {
        let mut r = r.clone();
        r.push(*v);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

pub fn inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let e: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            solve(a, &e)
        })
        .collect::<Option<_>>()?;
    if cols.iter().flatten().any(|v| !v.is_finite()) {
        return None;
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

pub fn det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = a[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * a[0][j] * det(&minor)
        })
        .sum()
}

fn interval_det(a: &[Vec<Interval>]) -> Interval {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    let mut acc = Interval::point(0.0);
    for j in 0..n {
        let minor: Vec<Vec<Interval>> = a[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
            .collect();
        let term = a[0][j] * interval_det(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;

    fn sin_model(t: usize, scale: &str) -> TorusModel {
        let exprs = vec![format!("{scale}*sin(2*pi*x)"), format!("{scale}*sin(2*pi*y)")];
        let c = Component::parse(2, &exprs, None).unwrap();
        TorusModel::new(Arc::new(fixtures::torus7()), t, c, vec![], None).unwrap()
    }

    #[test]
    fn four_zeros_validated() {
        let m = sin_model(1, "0.2");
        let zs = m.zeros(32).unwrap();
        assert_eq!(zs.len(), 4);
        let expect = [[0.0, 0.0], [0.0, 0.5], [0.5, 0.0], [0.5, 0.5]];
        for (z, e) in zs.iter().zip(expect) {
            assert!(torus_dist(&z.x, &e) < 1e-12, "{:?}", z.x);
            let v = m.validate(z);
            assert!(v.unique && v.det_sign.is_some());
        }
        let idx: Vec<i64> = zs.iter().map(|z| m.index(z, IndexRule::Displacement, 0.1).unwrap()).collect();
        assert_eq!(idx, vec![1, -1, -1, 1]);
        // the planar degree agrees at two radii
        for z in &zs {
            let d = m.index(z, IndexRule::Displacement, 0.1).unwrap();
            assert_eq!(m.pl_degree(z, 0.1).unwrap(), d);
            assert_eq!(m.pl_degree(z, 0.05).unwrap(), d);
        }
    }

    #[test]
    fn degenerate_zero_uses_the_planar_degree() {
        // u = (x^2 - y^2, 2xy) near 0 has degree 2; periodized by sin
        let c = Component::parse(
            2,
            &["sin(pi*x)^2 - sin(pi*y)^2".into(), "2*sin(pi*x)*sin(pi*y)".into()],
            None,
        )
        .unwrap();
        let m = TorusModel::new(Arc::new(fixtures::torus7()), 0, c, vec![], None).unwrap();
        let z = RawZero {
            x: vec![0.0, 0.0],
            patch: None,
        };
        assert_eq!(m.index(&z, IndexRule::Field, 0.1).unwrap(), 2);
    }

    #[test]
    fn continuum_of_zeros_is_not_tame() {
        let c = Component::parse(2, &["0".into(), "0".into()], None).unwrap();
        let m = TorusModel::new(Arc::new(fixtures::torus7()), 0, c, vec![], None).unwrap();
        assert!(matches!(m.zeros(8), Err(Error::NotTame(_))));
    }

    #[test]
    fn locator_finds_unique_interior_hosts() {
        let m = sin_model(1, "0.2");
        for z in m.zeros(16).unwrap() {
            let (_, clearance) = m.host_of(&z.x).unwrap();
            assert!(clearance > 1e-3, "{:?} too close to a face: {clearance}", z.x);
        }
        let loc = Locator::new(&fixtures::torus7()).unwrap();
        // a generic point lies in exactly one lifted triangle
        assert_eq!(loc.locate(&[0.313, 0.741]).len(), 1);
    }

    #[test]
    fn patch_must_match_on_the_cube_boundary() {
        let base = Component::parse(2, &["sin(2*pi*x)".into(), "sin(2*pi*y)".into()], None).unwrap();
        let bad = Component::parse(2, &["sin(2*pi*x) + 0.1".into(), "sin(2*pi*y)".into()], None).unwrap();
        let e = TorusModel::new(
            Arc::new(fixtures::torus7()),
            0,
            base,
            vec![Patch {
                translate: vec![0, 0],
                comp: bad,
            }],
            None,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Input(_)));
    }

    #[test]
    fn hyperbolic_covers_are_unsupported() {
        let c = Component::parse(2, &["x".into(), "y".into()], None).unwrap();
        assert!(matches!(
            TorusModel::new(Arc::new(fixtures::genus2()), 0, c, vec![], None),
            Err(Error::Unsupported(_))
        ));
    }
}
