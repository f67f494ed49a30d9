//! Seeded property suite: chain identities, fundamental cycles,
//! subdivision stability and certificate re-verification.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{
    boundary, cap, coboundary, pairing, signed_coboundary, PeriodicChain, PeriodicCochain,
};
use crate::class_fn::ClassFunction;
use crate::complex::{fixtures, PeriodicComplex, QuotientComplex};
use crate::error::Result;
use crate::fixpoint::{lefschetz_class, SelfMapModel, SimplicialMap};
use crate::group::{Elem, MarkedGroup};
use crate::ufh::{decide_class, verify_certificate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub property: String,
    pub fixture: String,
    pub instances: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub results: Vec<PropertyResult>,
}

/// A periodic complex the chain properties run on.
pub struct Fixture {
    pub name: String,
    pub quotient: QuotientComplex,
    /// Radius of the translates random chains live on.
    pub support: usize,
    /// Radius of the materialized region.
    pub region: usize,
}

impl Fixture {
    pub fn new(name: &str, quotient: QuotientComplex, support: usize, region: usize) -> Self {
        Fixture {
            name: name.into(),
            quotient,
            support,
            region,
        }
    }
}

pub fn default_fixtures() -> Vec<Fixture> {
    vec![
        Fixture::new("tetrahedron", fixtures::tetrahedron(), 0, 0),
        Fixture::new("torus7", fixtures::torus7(), 2, 5),
        // lifted genus-2 cells reach four letters past their translate
        Fixture::new("genus2", fixtures::genus2(), 1, 6),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Random instances per property and fixture.
    pub instances: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: 0,
            instances: 20,
        }
    }
}

fn rng_for(seed: u64, salt: &str) -> ChaCha8Rng {
    // FNV-1a of the salt keeps property streams independent of each other
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in salt.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

struct Tally {
    property: String,
    fixture: String,
    instances: usize,
    counterexample: Option<String>,
}

impl Tally {
    fn new(property: &str, fixture: &str) -> Self {
        Tally {
            property: property.into(),
            fixture: fixture.into(),
            instances: 0,
            counterexample: None,
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(witness());
        }
    }

    fn error(&mut self, e: crate::Error) {
        self.instances += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(format!("error: {e}"));
        }
    }

    fn done(self) -> PropertyResult {
        PropertyResult {
            passed: self.counterexample.is_none(),
            property: self.property,
            fixture: self.fixture,
            instances: self.instances,
            counterexample: self.counterexample,
        }
    }
}

fn nonzero_cells(c: &PeriodicChain, group: &MarkedGroup) -> String {
    let mut parts: Vec<String> = c
        .equivariant
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0)
        .map(|(i, v)| format!("{v}*[{i}] on every translate"))
        .collect();
    parts.extend(
        c.exceptional
            .iter()
            .take(6)
            .map(|((g, i), v)| format!("{v}*({}, {i})", group.format(g))),
    );
    parts.join(", ")
}

fn chain_properties(f: &Fixture, opts: SelftestOptions) -> Result<Vec<PropertyResult>> {
    let mut pc = PeriodicComplex::new(Arc::new(f.quotient.clone()))?;
    pc.expand(f.region)?;
    let group = pc.group().clone();
    let support: Vec<Elem> = group.ball(f.support)?;
    let n = pc.dim();
    let mut out = Vec::new();

    // ∂μ = 0, with μ the signed sum of top simplices as given
    let mut t = Tally::new("fundamental cycle", &f.name);
    let signs = pc.quotient().orientations().iter().map(|s| i64::from(*s)).collect();
    match PeriodicChain::equivariant(&pc, n, signs).and_then(|mu| boundary(&pc, &mu)) {
        Ok(b) => t.check(b.is_zero(), || format!("∂μ ≠ 0: {}", nonzero_cells(&b, &group))),
        Err(e) => t.error(e),
    }
    out.push(t.done());

    let mut rng = rng_for(opts.seed, &format!("boundary-squared/{}", f.name));
    let mut t = Tally::new("boundary squared", &f.name);
    for _ in 0..opts.instances {
        let k = rng.gen_range(2..=n.max(2)).min(n);
        if k < 2 {
            break;
        }
        let c = PeriodicChain::random(&pc, k, &mut rng, &support, 4, false);
        match boundary(&pc, &c).and_then(|b| boundary(&pc, &b)) {
            Ok(bb) => t.check(bb.is_zero(), || format!("∂∂c ≠ 0 in degree {k}: {}", nonzero_cells(&bb, &group))),
            Err(e) => t.error(e),
        }
    }
    out.push(t.done());

    let mut rng = rng_for(opts.seed, &format!("coboundary-squared/{}", f.name));
    let mut t = Tally::new("coboundary squared", &f.name);
    for _ in 0..opts.instances {
        if n < 2 {
            break;
        }
        let k = rng.gen_range(0..=n - 2);
        let u = PeriodicCochain::random(&pc, k, &mut rng, &support, 4, false);
        match coboundary(&pc, &u).and_then(|d| coboundary(&pc, &d)) {
            Ok(dd) => t.check(dd.is_zero(), || format!("δδu ≠ 0 from degree {k}")),
            Err(e) => t.error(e),
        }
    }
    out.push(t.done());

    let mut rng = rng_for(opts.seed, &format!("adjointness/{}", f.name));
    let mut t = Tally::new("adjointness", &f.name);
    for _ in 0..opts.instances {
        let k = rng.gen_range(1..=n);
        let u = PeriodicCochain::random(&pc, k - 1, &mut rng, &support, 4, false);
        let c = PeriodicChain::random(&pc, k, &mut rng, &support, 4, true);
        let r = coboundary(&pc, &u)
            .and_then(|du| pairing(&du, &c))
            .and_then(|l| Ok((l, pairing(&u, &boundary(&pc, &c)?)?)));
        match r {
            Ok((l, r)) => t.check(l == r, || format!("<δu,c> = {l} but <u,∂c> = {r} in degree {k}")),
            Err(e) => t.error(e),
        }
    }
    out.push(t.done());

    let mut rng = rng_for(opts.seed, &format!("leibniz/{}", f.name));
    let mut t = Tally::new("cap product Leibniz rule", &f.name);
    for _ in 0..opts.instances {
        let qd = rng.gen_range(1..=n);
        let p = rng.gen_range(0..qd);
        let u = PeriodicCochain::random(&pc, p, &mut rng, &support, 4, false);
        let c = PeriodicChain::random(&pc, qd, &mut rng, &support, 4, false);
        let r = (|| -> Result<PeriodicChain> {
            let lhs = boundary(&pc, &cap(&pc, &u, &c)?)?;
            let b = cap(&pc, &u, &boundary(&pc, &c)?)?;
            let rhs = cap(&pc, &signed_coboundary(&pc, &u)?, &c)?.add(&b.scale(if p % 2 == 0 { 1 } else { -1 }));
            Ok(lhs.sub(&rhs))
        })();
        match r {
            Ok(d) => t.check(d.is_zero(), || format!("p={p}, q={qd}: defect {}", nonzero_cells(&d, &group))),
            Err(e) => t.error(e),
        }
    }
    out.push(t.done());
    Ok(out)
}

fn subdivision_stability() -> PropertyResult {
    let mut t = Tally::new("Lefschetz class under subdivision", "octahedron rotation and antipode");
    for images in [fixtures::octahedron_rotation(), fixtures::octahedron_antipodal()] {
        let r = (|| -> Result<(ClassFunction, ClassFunction)> {
            let o = Arc::new(fixtures::octahedron());
            let e = o.group().identity();
            let m = SelfMapModel::Simplicial(SimplicialMap::new(
                o,
                0,
                images.iter().map(|v| (e.clone(), *v)).collect(),
                Default::default(),
                None,
            )?);
            let fd = m.fundamental_domain()?;
            Ok((lefschetz_class(&m, &fd, 0)?, lefschetz_class(&m.refined()?, &fd, 0)?))
        })();
        match r {
            Ok((a, b)) => t.check(a == b, || format!("class {a:?} became {b:?}")),
            Err(e) => t.error(e),
        }
    }
    t.done()
}

fn certificate_reverification(opts: SelftestOptions) -> Vec<PropertyResult> {
    let mut out = Vec::new();
    for group in [MarkedGroup::free_abelian(2), MarkedGroup::free(2)] {
        let mut t = Tally::new("certificate re-verification", &group.to_string());
        let mut rng = rng_for(opts.seed, &format!("certificates/{group}"));
        let Ok(ball) = group.ball(2) else { continue };
        for _ in 0..opts.instances {
            let mut f = ClassFunction::zero();
            for _ in 0..rng.gen_range(1..=4) {
                f.add_at(ball[rng.gen_range(0..ball.len())].clone(), rng.gen_range(-4..=4));
            }
            let g = ball[rng.gen_range(0..ball.len())].clone();
            let r = (|| -> Result<(bool, bool)> {
                let h = f.sub(&f.shifted(&group, &g)?);
                let cert = decide_class(&group, &h)?;
                Ok((cert.verdict.is_zero(), verify_certificate(&group, &cert)?.ok))
            })();
            match r {
                Ok((zero, ok)) => t.check(zero && ok, || {
                    format!("f - {}·f with f = {:?}: zero verdict {zero}, verified {ok}", group.format(&g), f)
                }),
                Err(e) => t.error(e),
            }
        }
        out.push(t.done());
    }
    out
}

pub fn run_selftest(opts: SelftestOptions) -> Result<SelftestReport> {
    run_selftest_with(opts, &default_fixtures())
}

pub fn run_selftest_with(opts: SelftestOptions, fixtures: &[Fixture]) -> Result<SelftestReport> {
    let mut results = Vec::new();
    for f in fixtures {
        results.extend(chain_properties(f, opts)?);
    }
    results.push(subdivision_stability());
    results.extend(certificate_reverification(opts));
    Ok(SelftestReport {
        seed: opts.seed,
        passed: results.iter().all(|r| r.passed),
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes_and_is_deterministic() {
        let opts = SelftestOptions { seed: 3, instances: 4 };
        let a = run_selftest(opts).unwrap();
        assert!(a.passed, "{:#?}", a.results.iter().filter(|r| !r.passed).collect::<Vec<_>>());
        assert_eq!(a, run_selftest(opts).unwrap());
    }

    #[test]
    fn planted_orientation_fault_is_reported() {
        let t = fixtures::torus7();
        let mut signs = t.orientations().to_vec();
        signs[0] = -signs[0];
        let bad = Fixture::new("torus7 (one sign flipped)", t.with_orientation(signs), 1, 3);
        let r = run_selftest_with(SelftestOptions { seed: 0, instances: 2 }, &[bad]).unwrap();
        assert!(!r.passed);
        let fc = r.results.iter().find(|r| r.property == "fundamental cycle").unwrap();
        assert!(!fc.passed);
        assert!(fc.counterexample.as_ref().unwrap().starts_with("∂μ ≠ 0"));
    }
}
