//! 1-chains on Cayley graphs and the telescoping construction for finitely
//! supported 0-chains.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::class_fn::ClassFunction;
use crate::error::{Error, Result};
use crate::group::word::{gen_index, Letter};
use crate::group::{Elem, MarkedGroup};

/// Integer 1-chain. The key `(g, i)` is the edge `g -> g s_i` for the i-th
/// generator; `∂(g -> h) = h - g`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OneChain {
    pub edges: BTreeMap<(Elem, usize), i64>,
}

impl OneChain {
    pub fn add_edge(&mut self, g: Elem, gen: usize, v: i64) {
        if v == 0 {
            return;
        }
        match self.edges.entry((g, gen)) {
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

    /// Walk the word `w` from `start`, adding `k` times each traversed edge.
    /// Returns the endpoint.
    pub fn add_walk(&mut self, group: &MarkedGroup, start: &Elem, w: &[Letter], k: i64) -> Result<Elem> {
        let mut x = start.clone();
        for &l in w {
            let y = group.mul(&x, &group.letter_elem(l)?)?;
            if l > 0 {
                self.add_edge(x, gen_index(l), k);
            } else {
                self.add_edge(y.clone(), gen_index(l), -k);
            }
            x = y;
        }
        Ok(x)
    }

    pub fn max_coefficient(&self) -> i64 {
        self.edges.values().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn boundary(&self, group: &MarkedGroup) -> Result<BTreeMap<Elem, i64>> {
        let gens = group.generators();
        let mut out: BTreeMap<Elem, i64> = BTreeMap::new();
        for ((g, i), v) in &self.edges {
            let s = gens
                .iter()
                .find(|(l, _)| *l > 0 && gen_index(*l) == *i)
                .ok_or_else(|| Error::input(format!("no generator with index {i}")))?;
            let h = group.mul(g, &s.1)?;
            *out.entry(h).or_default() += v;
            *out.entry(g.clone()).or_default() -= v;
        }
        out.retain(|_, v| *v != 0);
        Ok(out)
    }

    /// Largest word length among edge endpoints.
    pub fn reach(&self, group: &MarkedGroup) -> Result<usize> {
        let gens = group.generators();
        let mut r = 0;
        for (g, i) in self.edges.keys() {
            r = r.max(group.length(g));
            if let Some((_, s)) = gens.iter().find(|(l, _)| *l > 0 && gen_index(*l) == *i) {
                r = r.max(group.length(&group.mul(g, s)?));
            }
        }
        Ok(r)
    }

    pub fn to_doc(&self, group: &MarkedGroup) -> Vec<(String, String, i64)> {
        self.edges
            .iter()
            .map(|((g, i), v)| (group.format(g), group.names()[*i].clone(), *v))
            .collect()
    }

    pub fn from_doc(group: &MarkedGroup, doc: &[(String, String, i64)]) -> Result<Self> {
        let mut out = OneChain::default();
        for (w, name, v) in doc {
            let i = group
                .names()
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::input(format!("unknown generator `{name}`")))?;
            out.add_edge(group.parse(w)?, i, *v);
        }
        Ok(out)
    }
}

/// `b` with `∂b = c` on the ball of radius `region_radius - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBoundary {
    pub chain: OneChain,
    pub region_radius: usize,
    pub bound: i64,
    /// `∂b = c` everywhere (total mass zero, no ray needed).
    pub global: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub ok: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn pass(detail: impl Into<String>) -> Self {
        CheckResult { ok: true, detail: detail.into() }
    }
    pub fn fail(detail: impl Into<String>) -> Self {
        CheckResult { ok: false, detail: detail.into() }
    }
}

/// Support radius of the finite part.
pub fn support_radius(group: &MarkedGroup, c: &ClassFunction) -> usize {
    c.finite.keys().map(|g| group.length(g)).max().unwrap_or(0)
}

/// Telescoping: each supported vertex sends its mass to the identity along
/// its normal-form geodesic; the total is then carried off along the ray
/// `a^k` of the first generator, truncated on the sphere of radius
/// `region_radius`.
pub fn bound_finite_mass(group: &MarkedGroup, c: &ClassFunction, region_radius: usize) -> Result<FiniteBoundary> {
    if c.constant != 0 {
        return Err(Error::input("bound_finite_mass needs a finitely supported function"));
    }
    let s = support_radius(group, c);
    if !c.finite.is_empty() && region_radius <= s {
        return Err(Error::Region(format!(
            "support reaches radius {s}, region radius {region_radius} leaves no interior around it (--radius)"
        )));
    }
    let id = group.identity();
    let mut chain = OneChain::default();
    for (v, m) in &c.finite {
        chain.add_walk(group, &id, &group.to_letters(v), *m)?;
    }
    let total = c.finite_total();
    if total != 0 {
        if group.rank() == 0 || group.order().is_some() {
            return Err(Error::input(format!(
                "total mass {total} on a finite group cannot be carried to infinity"
            )));
        }
        let ray = vec![1 as Letter; region_radius];
        // ∂ of the walk is a^R - 1; subtracting it moves the total off to a^R
        let end = chain.add_walk(group, &id, &ray, -total)?;
        if group.length(&end) != region_radius {
            return Err(Error::Invariant("first generator does not give a geodesic ray".into()));
        }
    }
    let bound = chain.max_coefficient();
    Ok(FiniteBoundary {
        chain,
        region_radius,
        bound,
        global: total == 0,
    })
}

/// Recompute `∂b` and compare with `c` on `ball(R - 1)` (everywhere when
/// `global`), and check the chain stays inside `ball(R)`.
pub fn verify_boundary(group: &MarkedGroup, c: &ClassFunction, fb: &FiniteBoundary) -> Result<CheckResult> {
    if c.constant != 0 {
        return Ok(CheckResult::fail("constant part is not finitely supported"));
    }
    let db = fb.chain.boundary(group)?;
    let interior = fb.region_radius.saturating_sub(1);
    let mut keys: Vec<&Elem> = db.keys().chain(c.finite.keys()).collect();
    keys.sort();
    keys.dedup();
    for g in keys {
        let inside = fb.global || group.length(g) <= interior;
        let want = c.finite.get(g).copied().unwrap_or(0);
        let got = db.get(g).copied().unwrap_or(0);
        if inside && want != got {
            return Ok(CheckResult::fail(format!(
                "∂b = {got} but c = {want} at {}",
                group.format(g)
            )));
        }
    }
    if fb.chain.max_coefficient() > fb.bound {
        return Ok(CheckResult::fail("coefficient exceeds the stated bound"));
    }
    if !fb.global && fb.chain.reach(group)? > fb.region_radius {
        return Ok(CheckResult::fail("chain leaves the stated region"));
    }
    Ok(CheckResult::pass(format!(
        "∂b = c on {} with |b| <= {}",
        if fb.global { "the whole group".to_string() } else { format!("ball({interior})") },
        fb.bound
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_on_z2_is_a_ray() {
        let g = MarkedGroup::free_abelian(2);
        let c = ClassFunction::from_parts(0, [(g.identity(), 1)]);
        let fb = bound_finite_mass(&g, &c, 5).unwrap();
        assert_eq!(fb.chain.edges.len(), 5);
        assert!(fb.chain.edges.values().all(|v| v.abs() == 1));
        assert!(verify_boundary(&g, &c, &fb).unwrap().ok);
        assert!(!fb.global);
    }

    #[test]
    fn dipole_is_a_path_with_global_boundary() {
        let g = MarkedGroup::free_abelian(2);
        let u = g.parse("a^2 b").unwrap();
        let v = g.parse("b^-1").unwrap();
        let c = ClassFunction::from_parts(0, [(u.clone(), 1), (v.clone(), -1)]);
        let fb = bound_finite_mass(&g, &c, 4).unwrap();
        assert!(fb.global);
        assert_eq!(fb.chain.boundary(&g).unwrap(), c.finite);
        assert_eq!(fb.chain.edges.len(), 4); // |u - v| in the word metric
    }

    #[test]
    fn mass_three_on_f2() {
        let g = MarkedGroup::free(2);
        let c = ClassFunction::from_parts(0, [(g.identity(), 3)]);
        let fb = bound_finite_mass(&g, &c, 6).unwrap();
        assert!(fb.chain.edges.values().all(|v| v.abs() == 3));
        assert_eq!(fb.bound, 3);
        assert!(verify_boundary(&g, &c, &fb).unwrap().ok);
    }

    #[test]
    fn coefficients_bounded_by_mass() {
        let g = MarkedGroup::free(2);
        let c = ClassFunction::from_parts(
            0,
            [(g.parse("a b").unwrap(), 2), (g.parse("a^2").unwrap(), -5), (g.parse("b^-1").unwrap(), 1)],
        );
        let fb = bound_finite_mass(&g, &c, 4).unwrap();
        assert!(fb.bound <= c.finite_mass());
        assert!(verify_boundary(&g, &c, &fb).unwrap().ok);
    }

    #[test]
    fn tampered_chain_is_caught() {
        let g = MarkedGroup::free_abelian(2);
        let c = ClassFunction::from_parts(0, [(g.parse("a").unwrap(), 2)]);
        let mut fb = bound_finite_mass(&g, &c, 4).unwrap();
        let k = fb.chain.edges.keys().next().unwrap().clone();
        fb.chain.add_edge(k.0, k.1, 1);
        fb.bound = 10;
        assert!(!verify_boundary(&g, &c, &fb).unwrap().ok);
    }

    #[test]
    fn small_region_is_rejected() {
        let g = MarkedGroup::free_abelian(2);
        let c = ClassFunction::from_parts(0, [(g.parse("a^3").unwrap(), 1)]);
        assert_eq!(bound_finite_mass(&g, &c, 3).unwrap_err().exit_code(), 2);
    }
}
