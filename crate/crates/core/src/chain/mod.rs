//! Periodic chains and cochains: an equivariant part (one integer per quotient
//! simplex, repeated in every translate) plus a finitely supported exceptional
//! part on cover cells.

pub mod homology;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::marker::PhantomData;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::class_fn::ClassFunction;
use crate::complex::{Cell, FundamentalDomain, PeriodicComplex};
use crate::error::{Error, Result};
use crate::group::Elem;

pub use homology::{lefschetz_number_quotient, quotient_homology, QuotientHomology};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainKind;
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CochainKind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Periodic<K> {
    pub degree: usize,
    pub equivariant: Vec<i64>,
    /// `(translate, quotient simplex) -> coefficient`; zeros never stored.
    pub exceptional: BTreeMap<(Elem, usize), i64>,
    _kind: PhantomData<K>,
}

pub type PeriodicChain = Periodic<ChainKind>;
pub type PeriodicCochain = Periodic<CochainKind>;

impl<K: Clone> Periodic<K> {
    pub fn zero(pc: &PeriodicComplex, degree: usize) -> Self {
        Periodic {
            degree,
            equivariant: vec![0; pc.quotient().count(degree)],
            exceptional: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    pub fn equivariant(pc: &PeriodicComplex, degree: usize, values: Vec<i64>) -> Result<Self> {
        if values.len() != pc.quotient().count(degree) {
            return Err(Error::input(format!(
                "expected {} equivariant values in degree {degree}",
                pc.quotient().count(degree)
            )));
        }
        let mut out = Self::zero(pc, degree);
        out.equivariant = values;
        Ok(out)
    }

    pub fn add_cell(&mut self, g: Elem, idx: usize, v: i64) {
        if v == 0 {
            return;
        }
        match self.exceptional.entry((g, idx)) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += v;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(v);
            }
        }
    }

    pub fn value(&self, g: &Elem, idx: usize) -> i64 {
        self.equivariant[idx]
            + self
                .exceptional
                .get(&(g.clone(), idx))
                .copied()
                .unwrap_or(0)
    }

    pub fn value_at(&self, c: &Cell) -> i64 {
        debug_assert_eq!(c.dim, self.degree);
        self.value(&c.g, c.idx)
    }

    pub fn is_finite(&self) -> bool {
        self.equivariant.iter().all(|v| *v == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.is_finite() && self.exceptional.is_empty()
    }

    /// `sup |value|` (bounded by construction).
    pub fn sup_norm(&self) -> i64 {
        let eq = self.equivariant.iter().map(|v| v.abs()).max().unwrap_or(0);
        let exc = self
            .exceptional
            .iter()
            .map(|((_, i), v)| (self.equivariant[*i] + v).abs())
            .max()
            .unwrap_or(0);
        eq.max(exc)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (a, b) in out.equivariant.iter_mut().zip(&other.equivariant) {
            *a += b;
        }
        for ((g, i), v) in &other.exceptional {
            out.add_cell(g.clone(), *i, *v);
        }
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = self.clone();
        for a in out.equivariant.iter_mut() {
            *a *= k;
        }
        out.exceptional.clear();
        for ((g, i), v) in &self.exceptional {
            out.add_cell(g.clone(), *i, v * k);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    fn check_region(&self, pc: &PeriodicComplex) -> Result<()> {
        for (g, _) in self.exceptional.keys() {
            pc.require(g)?;
        }
        Ok(())
    }

    /// Random element: equivariant values in `-bound..=bound` (or zero when
    /// `finite`), plus `cells` exceptional cells in translates of length
    /// `<= support`.
    pub fn random<R: Rng>(
        pc: &PeriodicComplex,
        degree: usize,
        rng: &mut R,
        support: &[Elem],
        cells: usize,
        finite: bool,
    ) -> Self {
        let n = pc.quotient().count(degree);
        let mut out = Self::zero(pc, degree);
        if !finite {
            for v in out.equivariant.iter_mut() {
                *v = rng.gen_range(-3..=3);
            }
        }
        for _ in 0..cells {
            let g = support[rng.gen_range(0..support.len())].clone();
            out.add_cell(g, rng.gen_range(0..n), rng.gen_range(-4..=4));
        }
        out
    }
}

fn sign(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `∂`, the alternating face sum.
pub fn boundary(pc: &PeriodicComplex, c: &PeriodicChain) -> Result<PeriodicChain> {
    if c.degree == 0 {
        return Err(Error::input("boundary of a 0-chain"));
    }
    c.check_region(pc)?;
    let q = pc.quotient();
    let k = c.degree;
    let mut out = PeriodicChain::zero(pc, k - 1);
    for (i, a) in c.equivariant.iter().enumerate() {
        if *a == 0 {
            continue;
        }
        for (j, f) in q.faces(k, i) {
            let f = f.ok_or_else(|| Error::Invariant("missing face".into()))?;
            out.equivariant[f] += sign(j) * a;
        }
    }
    for ((g, i), a) in &c.exceptional {
        let cell = Cell { g: g.clone(), dim: k, idx: *i };
        for (s, f) in pc.faces(&cell)? {
            pc.require(&f.g)?;
            out.add_cell(f.g, f.idx, s * a);
        }
    }
    Ok(out)
}

/// `δ`, the adjoint of `∂`: `(δu)(τ) = u(∂τ)`.
pub fn coboundary(pc: &PeriodicComplex, u: &PeriodicCochain) -> Result<PeriodicCochain> {
    let q = pc.quotient();
    let p = u.degree;
    if p + 1 > q.dim() {
        return Err(Error::input(format!("coboundary of a degree-{p} cochain in dimension {}", q.dim())));
    }
    u.check_region(pc)?;
    let mut out = PeriodicCochain::zero(pc, p + 1);
    for t in 0..q.count(p + 1) {
        let mut acc = 0;
        for (j, f) in q.faces(p + 1, t) {
            let f = f.ok_or_else(|| Error::Invariant("missing face".into()))?;
            acc += sign(j) * u.equivariant[f];
        }
        out.equivariant[t] = acc;
    }
    for ((g, i), a) in &u.exceptional {
        let cell = Cell { g: g.clone(), dim: p, idx: *i };
        for (s, t) in pc.cofaces(&cell)? {
            pc.require(&t.g)?;
            out.add_cell(t.g, t.idx, s * a);
        }
    }
    Ok(out)
}

/// `(-1)^(p+1) δ`: the coboundary convention under which the cap-product
/// Leibniz rule `∂(u⌢c) = (δu)⌢c + (-1)^p u⌢∂c` holds for the front/back
/// face cap below.
pub fn signed_coboundary(pc: &PeriodicComplex, u: &PeriodicCochain) -> Result<PeriodicCochain> {
    let d = coboundary(pc, u)?;
    Ok(if u.degree.is_multiple_of(2) { d.scale(-1) } else { d })
}

/// `<u, c>`; at least one side must be finitely supported.
pub fn pairing(u: &PeriodicCochain, c: &PeriodicChain) -> Result<i64> {
    if u.degree != c.degree {
        return Err(Error::input("pairing needs equal degrees"));
    }
    if c.is_finite() {
        Ok(c.exceptional
            .iter()
            .map(|((g, i), a)| a * u.value(g, *i))
            .sum())
    } else if u.is_finite() {
        Ok(u.exceptional
            .iter()
            .map(|((g, i), a)| a * c.value(g, *i))
            .sum())
    } else {
        Err(Error::input("pairing of two infinitely supported periodic objects diverges"))
    }
}

/// Cap product `u⌢σ = (-1)^(p(q-p)) u(σ|[q-p..q]) σ|[0..q-p]` on ordered
/// simplices.
pub fn cap(pc: &PeriodicComplex, u: &PeriodicCochain, c: &PeriodicChain) -> Result<PeriodicChain> {
    let (p, qd) = (u.degree, c.degree);
    if p > qd {
        return Err(Error::input(format!("cap of a degree-{p} cochain with a {qd}-chain")));
    }
    u.check_region(pc)?;
    c.check_region(pc)?;
    let q = pc.quotient();
    let d = qd - p;
    let eps: i64 = if (p * d) % 2 == 0 { 1 } else { -1 };
    let front_pos: Vec<usize> = (0..=d).collect();
    let back_pos: Vec<usize> = (d..=qd).collect();
    let mut front = Vec::with_capacity(q.count(qd));
    let mut back = Vec::with_capacity(q.count(qd));
    for s in q.simplices(qd) {
        let f: Vec<usize> = front_pos.iter().map(|&j| s[j]).collect();
        let b: Vec<usize> = back_pos.iter().map(|&j| s[j]).collect();
        front.push(q.find(&f).ok_or_else(|| Error::Invariant("missing front face".into()))?);
        back.push(q.find(&b).ok_or_else(|| Error::Invariant("missing back face".into()))?);
    }
    let group = pc.group();
    let mut out = PeriodicChain::zero(pc, d);
    for (i, a) in c.equivariant.iter().enumerate() {
        out.equivariant[front[i]] += eps * a * u.equivariant[back[i]];
    }
    for ((g, i), a) in &c.exceptional {
        let back_g = group.mul(g, &pc.offsets(qd, *i)[d])?;
        pc.require(&back_g)?;
        let uv = u.value(&back_g, back[*i]);
        out.add_cell(g.clone(), front[*i], eps * a * uv);
    }
    if !c.is_finite() {
        let mut by_back: Vec<Vec<usize>> = vec![Vec::new(); q.count(p)];
        for (i, b) in back.iter().enumerate() {
            by_back[*b].push(i);
        }
        for ((h, beta), b) in &u.exceptional {
            for &i in &by_back[*beta] {
                if c.equivariant[i] == 0 {
                    continue;
                }
                let g = group.mul(h, &group.inv(&pc.offsets(qd, i)[d])?)?;
                pc.require(&g)?;
                out.add_cell(g, front[i], eps * c.equivariant[i] * b);
            }
        }
    }
    Ok(out)
}

/// `μ`: every top simplex with its orientation sign.
pub fn fundamental_cycle(pc: &PeriodicComplex) -> Result<PeriodicChain> {
    let q = pc.quotient();
    q.require_valid()?;
    let signs = q.orientations().iter().map(|s| i64::from(*s)).collect();
    PeriodicChain::equivariant(pc, q.dim(), signs)
}

/// Sum a 0-chain over each translate `g·K`.
pub fn project_to_group(
    pc: &PeriodicComplex,
    c: &PeriodicChain,
    fd: &FundamentalDomain,
) -> Result<ClassFunction> {
    if c.degree != 0 {
        return Err(Error::input("only 0-chains project to the deck group"));
    }
    let mut f = ClassFunction::constant(c.equivariant.iter().sum());
    for ((g, v), a) in &c.exceptional {
        let cell = Cell { g: g.clone(), dim: 0, idx: *v };
        f.add_at(fd.translate_of(pc.group(), &cell)?, *a);
    }
    Ok(f)
}

/// `{degree, equivariant: {simplex id: int}, exceptional: [[word, id, int]]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDoc {
    pub degree: usize,
    #[serde(default)]
    pub equivariant: BTreeMap<usize, i64>,
    #[serde(default)]
    pub exceptional: Vec<(String, usize, i64)>,
}

impl<K: Clone> Periodic<K> {
    pub fn to_doc(&self, pc: &PeriodicComplex) -> ChainDoc {
        ChainDoc {
            degree: self.degree,
            equivariant: self
                .equivariant
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(|(i, v)| (i, *v))
                .collect(),
            exceptional: self
                .exceptional
                .iter()
                .map(|((g, i), v)| (pc.group().format(g), *i, *v))
                .collect(),
        }
    }

    pub fn from_doc(pc: &PeriodicComplex, doc: &ChainDoc) -> Result<Self> {
        let n = pc.quotient().count(doc.degree);
        let mut out = Self::zero(pc, doc.degree);
        for (i, v) in &doc.equivariant {
            if *i >= n {
                return Err(Error::input(format!("simplex id {i} out of range")));
            }
            out.equivariant[*i] = *v;
        }
        for (w, i, v) in &doc.exceptional {
            if *i >= n {
                return Err(Error::input(format!("simplex id {i} out of range")));
            }
            out.add_cell(pc.group().parse(w)?, *i, *v);
        }
        Ok(out)
    }
}
