use proptest::prelude::*;
use uniform_lefschetz::ufh::{decide_class, verify_certificate, Verdict};
use uniform_lefschetz::{ClassFunction, Elem, MarkedGroup};

fn groups() -> Vec<MarkedGroup> {
    vec![MarkedGroup::free_abelian(2), MarkedGroup::free(2), MarkedGroup::surface(2)]
}

fn element(g: &MarkedGroup, word: &[usize]) -> Elem {
    let gens = g.generators();
    word.iter()
        .fold(g.identity(), |acc, &i| g.mul(&acc, &gens[i % gens.len()].1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_laws(k in 0usize..3, a in prop::collection::vec(0usize..16, 0..6),
                  b in prop::collection::vec(0usize..16, 0..6), c in prop::collection::vec(0usize..16, 0..6)) {
        let g = &groups()[k];
        // surface canonical forms are budgeted to Dehn length 6
        let cap = |w: &Vec<usize>| if k == 2 { w[..w.len().min(2)].to_vec() } else { w.clone() };
        let (a, b, c) = (cap(&a), cap(&b), cap(&c));
        let (x, y, z) = (element(g, &a), element(g, &b), element(g, &c));
        let xy_z = g.mul(&g.mul(&x, &y).unwrap(), &z).unwrap();
        let x_yz = g.mul(&x, &g.mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        prop_assert!(g.is_identity(&g.mul(&x, &g.inv(&x).unwrap()).unwrap()));
        prop_assert_eq!(g.parse(&g.format(&x)).unwrap(), x.clone());
        prop_assert!(g.length(&x) <= a.len());
        prop_assert_eq!(g.distance(&x, &y).unwrap(), g.distance(&y, &x).unwrap());
    }

    #[test]
    fn translates_are_coinvariantly_equal(k in 0usize..2, shift in prop::collection::vec(0usize..16, 1..3),
                                          support in prop::collection::vec((prop::collection::vec(0usize..16, 0..3), -3i64..4), 1..4),
                                          constant in -2i64..3) {
        let g = &groups()[k];
        let mut f = ClassFunction::constant(constant);
        for (w, v) in &support {
            f.add_at(element(g, w), *v);
        }
        let s = element(g, &shift);
        let d = f.sub(&f.shifted(g, &s).unwrap());
        let cert = decide_class(g, &d).unwrap();
        prop_assert!(matches!(cert.verdict, Verdict::ZeroByBoundary | Verdict::ZeroByTruncatedFlow));
        prop_assert!(verify_certificate(g, &cert).unwrap().ok);
    }
}

#[test]
fn long_surface_products_hit_the_budget() {
    let g = MarkedGroup::surface(2);
    let x = element(&g, &[3, 7, 1, 12]);
    let start = std::time::Instant::now();
    let err = g.distance(&x, &g.inv(&x).unwrap()).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
    assert!(start.elapsed().as_secs() < 5);
    let wider = g.clone().with_ball_budget(8);
    assert_eq!(wider.ball_budget(), 8);
}
