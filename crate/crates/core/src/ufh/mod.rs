//! Uniformly finite 0-homology on bounded-geometry graphs: Følner search,
//! isoperimetric tables, bounding 1-chains and class certificates in
//! `ℓ∞(G)_G`.

pub mod certificate;
pub mod chain1;
pub mod flow;
pub mod graph;

pub use certificate::{decide_class, decide_class_with, verify_certificate, ClassCertificate, DecideOptions, Verdict};
pub use chain1::{bound_finite_mass, verify_boundary, CheckResult, FiniteBoundary, OneChain};
pub use flow::{flow_certificate, verify_flow, FlowInstance, FlowOutcome, TruncatedFlow};
pub use graph::{isoperimetric_probe, layers, BoundedGraph, CayleyGraph, CoverSkeleton, IsoRow};

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FolnerScheme, MarkedGroup};
use crate::Q;

pub(crate) fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FolnerHit {
    /// Scheme index `t`.
    pub index: usize,
    pub size: usize,
    pub boundary: usize,
    #[serde(serialize_with = "ser_q")]
    pub ratio: Q,
}

/// Smallest scheme index with `|N_r(F) ∩ N_r(G - F)| / |F| < delta`.
pub fn folner_search(group: &MarkedGroup, delta: &Q, r: usize) -> Result<FolnerHit> {
    if !delta.is_positive() {
        return Err(Error::input("Følner threshold must be positive"));
    }
    let scheme = FolnerScheme::for_group(group, r)?;
    let limit = group.ball_budget();
    for t in 0..=limit {
        let ratio = scheme.ratio(group, t);
        if ratio < *delta {
            return Ok(FolnerHit {
                index: t,
                size: scheme.size(group, t),
                boundary: scheme.boundary_count(t),
                ratio,
            });
        }
    }
    Err(Error::Budget {
        what: format!("Følner search below {delta}"),
        flag: "--radius",
        needed: limit + 1,
        limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn z2_box_below_one_half() {
        let g = MarkedGroup::free_abelian(2);
        let hit = folner_search(&g, &q(1, 2), 1).unwrap();
        assert!(hit.ratio < q(1, 2));
        let s = FolnerScheme::for_group(&g, 1).unwrap();
        assert!(s.ratio(&g, hit.index - 1) >= q(1, 2));
    }

    #[test]
    fn finite_group_whole_set() {
        let g = MarkedGroup::cyclic(5);
        let hit = folner_search(&g, &q(1, 100), 1).unwrap();
        assert_eq!((hit.size, hit.boundary), (5, 0));
    }

    #[test]
    fn free_group_is_unsupported() {
        let e = folner_search(&MarkedGroup::free(2), &q(1, 2), 1).unwrap_err();
        assert!(matches!(e, Error::Unsupported(_)));
        assert!(e.to_string().contains("flow"));
    }

    #[test]
    fn isoperimetric_tables() {
        let z2 = MarkedGroup::free_abelian(2);
        let rows = isoperimetric_probe(&CayleyGraph::new(&z2), &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(rows[5].ball, 85);
        assert_eq!(rows[5].boundary, 24);
        assert!(rows[5].ratio < rows[1].ratio);
        let f2 = MarkedGroup::free(2);
        for row in isoperimetric_probe(&CayleyGraph::new(&f2), &[1, 2, 3, 4, 5, 6]).unwrap() {
            assert!(row.ratio >= q(1, 2));
            assert_eq!(row.ball, 2 * 3usize.pow(row.radius as u32) - 1);
        }
        let c6 = MarkedGroup::cyclic(6);
        let rows = isoperimetric_probe(&CayleyGraph::new(&c6), &[3, 4]).unwrap();
        assert_eq!((rows[0].ball, rows[0].boundary), (6, 0));
        assert_eq!(rows[1].boundary, 0);
    }

    #[test]
    fn cover_skeleton_is_bounded() {
        use crate::complex::{fixtures, PeriodicComplex};
        let mut pc = PeriodicComplex::new(std::sync::Arc::new(fixtures::torus7())).unwrap();
        pc.expand(3).unwrap();
        let sk = CoverSkeleton::new(&pc);
        assert_eq!(sk.degree_bound(), 6);
        for layer in layers(&sk, 2).unwrap() {
            for v in layer {
                assert_eq!(sk.neighbors(&v).unwrap().len(), 6);
            }
        }
    }
}
