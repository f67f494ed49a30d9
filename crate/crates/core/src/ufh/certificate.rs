//! Deciding classes in `ℓ∞(G)_G`, gated by the kind of group.
//!
//! - nonamenable kinds: a uniform-capacity family of truncated flows;
//! - amenable, nonzero constant part: Følner averages converge to the
//!   constant, which every invariant mean sees;
//! - amenable infinite, zero constant part: an explicit bounding 1-chain;
//! - finite groups: the class is the total sum.

use std::str::FromStr;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain1::{bound_finite_mass, support_radius, verify_boundary, CheckResult, FiniteBoundary, OneChain};
use super::flow::{verify_flow, FlowInstance, TruncatedFlow};
use crate::class_fn::{ClassFunction, ClassFunctionDoc};
use crate::error::{Error, Result};
use crate::group::{folner_average, Amenability, Elem, FolnerScheme, GroupKind, GroupSpec, MarkedGroup};
use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NonzeroByMean,
    ZeroByBoundary,
    ZeroByTruncatedFlow,
    Inconclusive,
}

impl Verdict {
    pub fn is_zero(self) -> bool {
        matches!(self, Verdict::ZeroByBoundary | Verdict::ZeroByTruncatedFlow)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanSample {
    pub index: usize,
    pub size: usize,
    pub average: Q,
    /// `mass(finite part) / |F_t|`.
    pub tolerance: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowRow {
    pub radius: usize,
    pub flow: TruncatedFlow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Mean { limit: Q, samples: Vec<MeanSample> },
    /// `target` is the function actually bounded; on a finite group it is
    /// the dense form of the input.
    Boundary { target: ClassFunction, boundary: FiniteBoundary },
    Flow { capacity: i64, rows: Vec<FlowRow> },
    Diagnostic(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCertificate {
    pub verdict: Verdict,
    pub function: ClassFunction,
    pub payload: Payload,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    /// Largest edge capacity tried by the flow search.
    pub capacity_limit: i64,
    /// Flow radii; by default a window just outside the support.
    pub flow_radii: Option<Vec<usize>>,
    /// Number of Følner averages reported.
    pub mean_samples: usize,
    /// Region radius of bounding chains; by default one past the support.
    pub boundary_radius: Option<usize>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            capacity_limit: 64,
            flow_radii: None,
            mean_samples: 8,
            boundary_radius: None,
        }
    }
}

pub const FLOW_NOTE: &str = "finite evidence: one capacity serves every listed radius; this is consistent with, \
     but not a proof of, a bounding chain on the whole group";

pub fn decide_class(group: &MarkedGroup, f: &ClassFunction) -> Result<ClassCertificate> {
    decide_class_with(group, f, &DecideOptions::default())
}

fn finite_elements(group: &MarkedGroup) -> Option<Vec<Elem>> {
    match group.order() {
        Some(1) => Some(vec![group.identity()]),
        Some(_) => group.elements(),
        None => None,
    }
}

pub fn decide_class_with(group: &MarkedGroup, f: &ClassFunction, opts: &DecideOptions) -> Result<ClassCertificate> {
    let cert = |verdict, payload| ClassCertificate {
        verdict,
        function: f.clone(),
        payload,
    };
    if let Some(elems) = finite_elements(group) {
        let dense = ClassFunction::from_parts(0, elems.iter().map(|g| (g.clone(), f.value(g))));
        let total: i64 = dense.finite_total();
        if total == 0 {
            let r = elems.iter().map(|g| group.length(g)).max().unwrap_or(0) + 1;
            let boundary = bound_finite_mass(group, &dense, r)?;
            return Ok(cert(Verdict::ZeroByBoundary, Payload::Boundary { target: dense, boundary }));
        }
        let n = elems.len() as i64;
        let avg = Q::new(total.into(), n.into());
        return Ok(cert(
            Verdict::NonzeroByMean,
            Payload::Mean {
                limit: avg.clone(),
                samples: vec![MeanSample {
                    index: 0,
                    size: elems.len(),
                    average: avg,
                    tolerance: Q::zero(),
                }],
            },
        ));
    }
    match group.amenability() {
        Amenability::Nonamenable => flow_family(group, f, opts),
        Amenability::Amenable if f.constant != 0 => {
            let scheme = match FolnerScheme::for_group(group, 1) {
                Ok(s) => s,
                Err(Error::Unsupported(m)) => {
                    return Ok(cert(Verdict::Inconclusive, Payload::Diagnostic(m)));
                }
                Err(e) => return Err(e),
            };
            let mass = Q::from_integer(f.finite_mass().into());
            let mut samples = Vec::new();
            for t in 1..=opts.mean_samples.max(1) {
                let size = scheme.size(group, t);
                samples.push(MeanSample {
                    index: t,
                    size,
                    average: folner_average(&scheme, group, f, t)?,
                    tolerance: &mass / Q::from_integer((size as i64).into()),
                });
            }
            Ok(cert(
                Verdict::NonzeroByMean,
                Payload::Mean {
                    limit: Q::from_integer(f.constant.into()),
                    samples,
                },
            ))
        }
        Amenability::Amenable => {
            let r = opts
                .boundary_radius
                .unwrap_or_else(|| support_radius(group, f) + 1);
            let boundary = bound_finite_mass(group, f, r)?;
            Ok(cert(Verdict::ZeroByBoundary, Payload::Boundary { target: f.clone(), boundary }))
        }
    }
}

fn default_flow_radii(group: &MarkedGroup, f: &ClassFunction) -> Vec<usize> {
    let s = support_radius(group, f) + 1;
    match group.kind() {
        // balls of surface groups grow like 7^r; three radii keep instances desk-sized
        GroupKind::Surface { .. } => (s.max(3)..s.max(3) + 3).collect(),
        _ => (s.max(3)..s.max(3) + 4).collect(),
    }
}

fn flow_family(group: &MarkedGroup, f: &ClassFunction, opts: &DecideOptions) -> Result<ClassCertificate> {
    let radii = opts
        .flow_radii
        .clone()
        .unwrap_or_else(|| default_flow_radii(group, f));
    if let Some(&rmax) = radii.iter().max() {
        group.ball(rmax)?; // budget check, and warms shared caches
    }
    let solved: Vec<(usize, Option<TruncatedFlow>)> = radii
        .par_iter()
        .map(|&r| Ok((r, FlowInstance::new(group, f, r)?.min_capacity(opts.capacity_limit))))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for (r, sol) in solved {
        match sol {
            Some(flow) => rows.push(FlowRow { radius: r, flow }),
            None => missing.push(r),
        }
    }
    if !missing.is_empty() {
        return Ok(ClassCertificate {
            verdict: Verdict::Inconclusive,
            function: f.clone(),
            payload: Payload::Diagnostic(format!(
                "no flow with capacity <= {} at radii {missing:?} (raise --capacity)",
                opts.capacity_limit
            )),
        });
    }
    let capacity = rows.iter().map(|r| r.flow.capacity).max().unwrap_or(0);
    Ok(ClassCertificate {
        verdict: Verdict::ZeroByTruncatedFlow,
        function: f.clone(),
        payload: Payload::Flow { capacity, rows },
    })
}

/// Average of `f` over the sample set of index `t`, recomputed from scratch.
fn recompute_average(group: &MarkedGroup, f: &ClassFunction, t: usize) -> Result<(usize, Q)> {
    if let Some(elems) = finite_elements(group) {
        let total: i64 = elems.iter().map(|g| f.value(g)).sum();
        return Ok((elems.len(), Q::new(total.into(), (elems.len() as i64).into())));
    }
    let scheme = FolnerScheme::for_group(group, 1)?;
    Ok((scheme.size(group, t), folner_average(&scheme, group, f, t)?))
}

/// Independent re-check of a certificate against its own function.
pub fn verify_certificate(group: &MarkedGroup, cert: &ClassCertificate) -> Result<CheckResult> {
    let f = &cert.function;
    match (&cert.verdict, &cert.payload) {
        (Verdict::NonzeroByMean, Payload::Mean { limit, samples }) => {
            if limit.is_zero() {
                return Ok(CheckResult::fail("limit is zero"));
            }
            let finite = finite_elements(group).is_some();
            if !finite && *limit != Q::from_integer(f.constant.into()) {
                return Ok(CheckResult::fail("limit differs from the constant part"));
            }
            if samples.is_empty() {
                return Ok(CheckResult::fail("no averages"));
            }
            let mass = Q::from_integer(f.finite_mass().into());
            for s in samples {
                let (size, avg) = recompute_average(group, f, s.index)?;
                if size != s.size || avg != s.average {
                    return Ok(CheckResult::fail(format!("average at index {} does not recompute", s.index)));
                }
                let tol = if finite {
                    Q::zero()
                } else {
                    &mass / Q::from_integer((size as i64).into())
                };
                if (&avg - limit).abs() > tol || s.tolerance != tol {
                    return Ok(CheckResult::fail(format!("average at index {} is off the limit", s.index)));
                }
            }
            Ok(CheckResult::pass(format!(
                "{} averages recomputed exactly; every invariant mean gives {limit}",
                samples.len()
            )))
        }
        (Verdict::ZeroByBoundary, Payload::Boundary { target, boundary }) => {
            if let Some(elems) = finite_elements(group) {
                if elems.iter().any(|g| target.value(g) != f.value(g)) || target.constant != 0 {
                    return Ok(CheckResult::fail("bounded function differs from the input"));
                }
            } else if target != f {
                return Ok(CheckResult::fail("bounded function differs from the input"));
            }
            verify_boundary(group, target, boundary)
        }
        (Verdict::ZeroByTruncatedFlow, Payload::Flow { capacity, rows }) => {
            if group.amenability() != Amenability::Nonamenable {
                return Ok(CheckResult::fail("truncated flows only certify nonamenable kinds"));
            }
            if rows.is_empty() {
                return Ok(CheckResult::fail("empty flow family"));
            }
            for row in rows {
                if row.flow.capacity > *capacity || row.flow.radius != row.radius {
                    return Ok(CheckResult::fail(format!("row {} exceeds the family capacity", row.radius)));
                }
                let r = verify_flow(group, f, &row.flow)?;
                if !r.ok {
                    return Ok(r);
                }
            }
            Ok(CheckResult::pass(format!(
                "∂b_R = c on ball(R-1) for R in {:?}, uniform capacity {capacity}",
                rows.iter().map(|r| r.radius).collect::<Vec<_>>()
            )))
        }
        (Verdict::Inconclusive, Payload::Diagnostic(_)) => Ok(CheckResult::pass("inconclusive; nothing to check")),
        _ => Ok(CheckResult::fail("payload does not match the verdict")),
    }
}

// ---- documents ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeanSampleDoc {
    pub index: usize,
    pub size: usize,
    pub average: String,
    pub tolerance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowRowDoc {
    pub radius: usize,
    pub min_capacity: i64,
    pub chain: Vec<(String, String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PayloadDoc {
    Mean {
        limit: String,
        samples: Vec<MeanSampleDoc>,
    },
    Boundary {
        region_radius: usize,
        bound: i64,
        global: bool,
        target: ClassFunctionDoc,
        chain: Vec<(String, String, i64)>,
    },
    Flow {
        capacity: i64,
        note: String,
        rows: Vec<FlowRowDoc>,
    },
    Diagnostic {
        message: String,
    },
}

/// `{verdict, group, function, payload, verifier_result}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub verdict: Verdict,
    pub group: GroupSpec,
    pub function: ClassFunctionDoc,
    pub payload: PayloadDoc,
    pub verifier_result: CheckResult,
}

fn parse_q(s: &str) -> Result<Q> {
    Q::from_str(s).map_err(|_| Error::input(format!("bad rational `{s}`")))
}

impl ClassCertificate {
    pub fn to_doc(&self, group: &MarkedGroup) -> Result<CertificateDoc> {
        let payload = match &self.payload {
            Payload::Mean { limit, samples } => PayloadDoc::Mean {
                limit: limit.to_string(),
                samples: samples
                    .iter()
                    .map(|s| MeanSampleDoc {
                        index: s.index,
                        size: s.size,
                        average: s.average.to_string(),
                        tolerance: s.tolerance.to_string(),
                    })
                    .collect(),
            },
            Payload::Boundary { target, boundary } => PayloadDoc::Boundary {
                region_radius: boundary.region_radius,
                bound: boundary.bound,
                global: boundary.global,
                target: target.to_doc(group),
                chain: boundary.chain.to_doc(group),
            },
            Payload::Flow { capacity, rows } => PayloadDoc::Flow {
                capacity: *capacity,
                note: FLOW_NOTE.into(),
                rows: rows
                    .iter()
                    .map(|r| FlowRowDoc {
                        radius: r.radius,
                        min_capacity: r.flow.capacity,
                        chain: r.flow.chain.to_doc(group),
                    })
                    .collect(),
            },
            Payload::Diagnostic(m) => PayloadDoc::Diagnostic { message: m.clone() },
        };
        Ok(CertificateDoc {
            verdict: self.verdict,
            group: group.spec(),
            function: self.function.to_doc(group),
            payload,
            verifier_result: verify_certificate(group, self)?,
        })
    }
}

impl CertificateDoc {
    /// Rebuild the group and certificate; the stored verifier result is
    /// ignored, callers re-run the verifier.
    pub fn resolve(&self) -> Result<(MarkedGroup, ClassCertificate)> {
        let group = self.group.build()?;
        let function = self.function.resolve(&group)?;
        let payload = match &self.payload {
            PayloadDoc::Mean { limit, samples } => Payload::Mean {
                limit: parse_q(limit)?,
                samples: samples
                    .iter()
                    .map(|s| {
                        Ok(MeanSample {
                            index: s.index,
                            size: s.size,
                            average: parse_q(&s.average)?,
                            tolerance: parse_q(&s.tolerance)?,
                        })
                    })
                    .collect::<Result<_>>()?,
            },
            PayloadDoc::Boundary {
                region_radius,
                bound,
                global,
                target,
                chain,
            } => Payload::Boundary {
                target: target.resolve(&group)?,
                boundary: FiniteBoundary {
                    chain: OneChain::from_doc(&group, chain)?,
                    region_radius: *region_radius,
                    bound: *bound,
                    global: *global,
                },
            },
            PayloadDoc::Flow { capacity, rows, .. } => Payload::Flow {
                capacity: *capacity,
                rows: rows
                    .iter()
                    .map(|r| {
                        Ok(FlowRow {
                            radius: r.radius,
                            flow: TruncatedFlow {
                                radius: r.radius,
                                capacity: r.min_capacity,
                                chain: OneChain::from_doc(&group, &r.chain)?,
                            },
                        })
                    })
                    .collect::<Result<_>>()?,
            },
            PayloadDoc::Diagnostic { message } => Payload::Diagnostic(message.clone()),
        };
        let cert = ClassCertificate {
            verdict: self.verdict,
            function,
            payload,
        };
        Ok((group, cert))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn integers_with_two_per_domain() {
        let z = MarkedGroup::free_abelian(1);
        let c = decide_class(&z, &ClassFunction::constant(2)).unwrap();
        assert_eq!(c.verdict, Verdict::NonzeroByMean);
        match &c.payload {
            Payload::Mean { limit, samples } => {
                assert_eq!(*limit, q(2, 1));
                assert!(samples.iter().all(|s| s.average == q(2, 1)));
            }
            other => panic!("{other:?}"),
        }
        assert!(verify_certificate(&z, &c).unwrap().ok);
    }

    #[test]
    fn free_group_constant_plus_finite() {
        let g = MarkedGroup::free(2);
        let f = ClassFunction::from_parts(5, [(g.parse("a b").unwrap(), 3), (g.identity(), -2)]);
        let c = decide_class(&g, &f).unwrap();
        assert_eq!(c.verdict, Verdict::ZeroByTruncatedFlow);
        assert!(verify_certificate(&g, &c).unwrap().ok);
        let doc = c.to_doc(&g).unwrap();
        assert!(doc.verifier_result.ok);
        let json = serde_json::to_string(&doc).unwrap();
        let back: CertificateDoc = serde_json::from_str(&json).unwrap();
        let (g2, c2) = back.resolve().unwrap();
        assert_eq!(c2, c);
        assert!(verify_certificate(&g2, &c2).unwrap().ok);
    }

    #[test]
    fn z2_finite_mass_at_origin() {
        let g = MarkedGroup::free_abelian(2);
        let f = ClassFunction::from_parts(0, [(g.identity(), 7)]);
        let c = decide_class(&g, &f).unwrap();
        assert_eq!(c.verdict, Verdict::ZeroByBoundary);
        assert!(verify_certificate(&g, &c).unwrap().ok);
    }

    #[test]
    fn finite_groups_use_the_total() {
        let g = MarkedGroup::cyclic(4);
        let x = g.parse(&g.names()[0]).unwrap();
        let zero = ClassFunction::from_parts(1, [(x.clone(), -4)]);
        let c = decide_class(&g, &zero).unwrap();
        assert_eq!(c.verdict, Verdict::ZeroByBoundary);
        assert!(verify_certificate(&g, &c).unwrap().ok);
        let nz = ClassFunction::from_parts(1, [(x, -1)]);
        let c = decide_class(&g, &nz).unwrap();
        assert_eq!(c.verdict, Verdict::NonzeroByMean);
        assert!(verify_certificate(&g, &c).unwrap().ok);
    }

    #[test]
    fn unsupported_amenable_kind_is_inconclusive() {
        let z = MarkedGroup::free(1);
        let c = decide_class(&z, &ClassFunction::constant(1)).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn tampered_certificates_fail() {
        let g = MarkedGroup::free_abelian(2);
        let mut c = decide_class(&g, &ClassFunction::constant(3)).unwrap();
        if let Payload::Mean { limit, .. } = &mut c.payload {
            *limit = q(2, 1);
        }
        assert!(!verify_certificate(&g, &c).unwrap().ok);
        let mut c = decide_class(&g, &ClassFunction::from_parts(0, [(g.identity(), 1)])).unwrap();
        c.function.add_at(g.identity(), 1);
        assert!(!verify_certificate(&g, &c).unwrap().ok);
    }

    #[test]
    fn coinvariant_relations_are_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [MarkedGroup::free_abelian(2), MarkedGroup::free(2)] {
            let ball = g.ball(2).unwrap();
            let gens = g.generators();
            for _ in 0..10 {
                let mut f = ClassFunction::zero();
                for _ in 0..3 {
                    f.add_at(ball[rng.gen_range(0..ball.len())].clone(), rng.gen_range(-5..=5));
                }
                let s = &gens[rng.gen_range(0..gens.len())].1;
                let rel = f.sub(&f.shifted(&g, s).unwrap());
                let c = decide_class(&g, &rel).unwrap();
                assert!(c.verdict.is_zero(), "{:?}", c.verdict);
                assert!(verify_certificate(&g, &c).unwrap().ok);
            }
        }
    }
}
