//! Desk-scale acceptance run: one PASS/FAIL line per criterion, exit status
//! nonzero when any criterion fails. Tolerances and runtime limits are the
//! constants next to each check.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uniform_lefschetz::chain::{boundary, fundamental_cycle};
use uniform_lefschetz::cli::selftest::{run_selftest_with, Fixture, SelftestOptions};
use uniform_lefschetz::complex::{fixtures, PeriodicComplex, QuotientComplex};
use uniform_lefschetz::fixpoint::{equivariant_oracle_check, lefschetz_class, MapDoc, SelfMapModel};
use uniform_lefschetz::group::FolnerScheme;
use uniform_lefschetz::ufh::certificate::Payload;
use uniform_lefschetz::ufh::{
    decide_class, flow_certificate, isoperimetric_probe, verify_certificate, CayleyGraph, FlowInstance, Verdict,
};
use uniform_lefschetz::vectorfield::{index_class, sphere_source_sink, VectorFieldModel};
use uniform_lefschetz::{q, ClassFunction, MarkedGroup, Q};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn check(cond: bool, ok: impl Into<String>, bad: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(bad.into())
    }
}

fn map(src: &str) -> SelfMapModel {
    MapDoc::from_json(src).and_then(|d| d.self_map()).expect("map document")
}

fn sin_map(t: usize, scale: f64) -> SelfMapModel {
    map(&format!(
        r#"{{"variant": "analytic", "complex": "torus7", "subdivision": {t},
            "expressions": ["{scale}*sin(2*pi*x)", "{scale}*sin(2*pi*y)"], "bound": {}}}"#,
        1.5 * scale
    ))
}

const OCTA_ROTATION: &str = r#"{"variant": "simplicial", "complex": "octahedron", "images": [2, 3, 4, 5, 0, 1]}"#;
const OCTA_ANTIPODE: &str = r#"{"variant": "simplicial", "complex": "octahedron", "images": [1, 0, 3, 2, 5, 4]}"#;

fn connected_sum() -> Outcome {
    let z = MarkedGroup::free_abelian(1);
    let cert = decide_class(&z, &ClassFunction::constant(2)).map_err(|e| e.to_string())?;
    let Payload::Mean { limit, .. } = &cert.payload else {
        return Err(format!("verdict {:?}", cert.verdict));
    };
    // exact: zero tolerance
    check(
        cert.verdict == Verdict::NonzeroByMean && *limit == q(2, 1),
        format!("nonzero-by-mean, limit {limit}"),
        format!("verdict {:?}, limit {limit}", cert.verdict),
    )
}

fn oracle() -> Outcome {
    let cases = [
        ("S^2 rotation", map(OCTA_ROTATION), 2),
        ("sin-model descent", sin_map(1, 0.2), 0),
        ("S^2 antipode (degree -1)", map(OCTA_ANTIPODE), 0),
    ];
    let mut parts = Vec::new();
    for (name, m, expected) in cases {
        let fd = m.fundamental_domain().map_err(|e| e.to_string())?;
        let class = lefschetz_class(&m, &fd, 1).map_err(|e| format!("{name}: {e}"))?;
        let o = equivariant_oracle_check(&m).map_err(|e| format!("{name}: {e}"))?;
        if !(o.equal && class.constant == o.lefschetz && o.lefschetz == expected && class.finite.is_empty()) {
            return Err(format!("{name}: class {} vs L = {}", class.constant, o.lefschetz));
        }
        parts.push(format!("{name} {}", o.lefschetz));
    }
    Ok(parts.join(", "))
}

fn poincare_hopf() -> Outcome {
    let doc = MapDoc::from_json(
        r#"{"variant": "analytic", "complex": "torus7", "subdivision": 1,
            "expressions": ["sin(2*pi*x)", "sin(2*pi*y)"], "bound": 4.0}"#,
    )
    .map_err(|e| e.to_string())?;
    let v = VectorFieldModel::from_doc(&doc).map_err(|e| e.to_string())?;
    let fd = v.fundamental_domain().map_err(|e| e.to_string())?;
    let ind = index_class(&v, &fd, 1).map_err(|e| e.to_string())?;
    let chi = v.quotient().euler_characteristic();
    let sphere = VectorFieldModel::Pl(sphere_source_sink());
    let sfd = sphere.fundamental_domain().map_err(|e| e.to_string())?;
    let total = index_class(&sphere, &sfd, 0).map_err(|e| e.to_string())?;
    let s_chi = sphere.quotient().euler_characteristic();
    check(
        ind.is_zero_function() && chi == 0 && total == ClassFunction::constant(2) && s_chi == 2,
        format!("T^2: ind = 0 = χ·1; S^2: total {} = χ {s_chi}", total.constant),
        format!("T^2: ind {ind:?}, χ {chi}; S^2: {total:?}, χ {s_chi}"),
    )
}

fn amenability() -> Outcome {
    let z2 = MarkedGroup::free_abelian(2);
    let f2 = MarkedGroup::free(2);
    let scheme = FolnerScheme::for_group(&z2, 1).map_err(|e| e.to_string())?;
    let ratios: Vec<Q> = (2..=8).map(|t| scheme.ratio(&z2, t)).collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let r8 = ratios.last().cloned().unwrap_or_default();
    let iso = isoperimetric_probe(&CayleyGraph::new(&f2), &[1, 2, 3, 4, 5, 6]).map_err(|e| e.to_string())?;
    let iso_ok = iso.iter().all(|r| r.ratio >= q(1, 2));
    let one = ClassFunction::constant(1);
    let mut f2_flows = true;
    for r in 3..=6 {
        f2_flows &= flow_certificate(&f2, &one, r, 2).map_err(|e| e.to_string())?.is_feasible();
    }
    let cap = |r| -> Result<Option<i64>, String> {
        let inst = FlowInstance::new(&z2, &one, r).map_err(|e| e.to_string())?;
        Ok(inst.min_capacity(64).map(|f| f.capacity))
    };
    let (c4, c8) = (cap(4)?, cap(8)?);
    let growth = matches!((c4, c8), (Some(a), Some(b)) if b > a);
    let detail = format!(
        "Z^2 ratios t=2..8 decreasing: {decreasing}, ratio(8) = {r8} (< 1/3: {}); F_2 iso min {}; \
         F_2 flow at C=2 for R=3..6: {f2_flows}; Z^2 min C: R=4 {c4:?}, R=8 {c8:?}",
        r8 < q(1, 3),
        iso.iter().map(|r| r.ratio.clone()).min().unwrap_or_default(),
    );
    check(decreasing && r8 < q(1, 3) && iso_ok && f2_flows && growth, detail.clone(), detail)
}

fn random_finite(group: &MarkedGroup, rng: &mut ChaCha8Rng) -> ClassFunction {
    let ball = group.ball(2).expect("ball(2)");
    let mut f = ClassFunction::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let g = ball[rng.gen_range(0..ball.len())].clone();
        f.add_at(g, rng.gen_range(-3..=3));
    }
    f
}

fn certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut verified = 0;
    let mut relations = 0;
    for group in [MarkedGroup::free_abelian(2), MarkedGroup::free(2)] {
        let ball = group.ball(2).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let f = random_finite(&group, &mut rng);
            let cert = decide_class(&group, &f).map_err(|e| e.to_string())?;
            if matches!(cert.verdict, Verdict::ZeroByBoundary | Verdict::ZeroByTruncatedFlow) {
                let r = verify_certificate(&group, &cert).map_err(|e| e.to_string())?;
                if !r.ok {
                    return Err(format!("{group}: {}", r.detail));
                }
                verified += 1;
            }
            let mut h = random_finite(&group, &mut rng);
            h.constant = rng.gen_range(-2..=2);
            let g = &ball[rng.gen_range(0..ball.len())];
            let d = h.sub(&h.shifted(&group, g).map_err(|e| e.to_string())?);
            let c = decide_class(&group, &d).map_err(|e| e.to_string())?;
            if matches!(c.verdict, Verdict::ZeroByBoundary | Verdict::ZeroByTruncatedFlow)
                && verify_certificate(&group, &c).map_err(|e| e.to_string())?.ok
            {
                relations += 1;
            }
        }
    }
    check(
        verified == 200 && relations == 200,
        format!("{verified}/200 vanishing payloads re-verified; f - g·f zero in {relations}/200"),
        format!("{verified}/200 vanishing payloads re-verified; f - g·f zero in {relations}/200"),
    )
}

fn chain_identities() -> Outcome {
    const INSTANCES: usize = 100;
    let fixtures_at_radius_2 = [
        Fixture::new("torus7", fixtures::torus7(), 2, 5),
        Fixture::new("genus2", fixtures::genus2(), 2, 6),
    ];
    let rep = run_selftest_with(SelftestOptions { seed: 0, instances: INSTANCES }, &fixtures_at_radius_2)
        .map_err(|e| e.to_string())?;
    let wanted = ["boundary squared", "coboundary squared", "adjointness", "cap product Leibniz rule"];
    for r in rep.results.iter().filter(|r| wanted.contains(&r.property.as_str())) {
        if !r.passed || r.instances < INSTANCES {
            return Err(format!("{} on {}: {:?}", r.property, r.fixture, r.counterexample));
        }
    }
    let oriented: Vec<(&str, QuotientComplex)> = vec![
        ("tetrahedron", fixtures::tetrahedron()),
        ("octahedron", fixtures::octahedron()),
        ("torus7", fixtures::torus7()),
        ("torus grid 4", fixtures::torus_grid(4).map_err(|e| e.to_string())?),
        ("genus2", fixtures::genus2()),
        ("surface 3", fixtures::surface(3).map_err(|e| e.to_string())?),
    ];
    for (name, qc) in oriented {
        let pc = PeriodicComplex::new(Arc::new(qc)).map_err(|e| e.to_string())?;
        let mu = fundamental_cycle(&pc).map_err(|e| format!("{name}: {e}"))?;
        if !boundary(&pc, &mu).map_err(|e| e.to_string())?.is_zero() {
            return Err(format!("∂μ ≠ 0 on {name}"));
        }
    }
    let klein = fixtures::klein_bottle(3).map_err(|e| e.to_string())?;
    let rejected = !klein.validate().is_valid()
        && PeriodicComplex::new(Arc::new(klein)).and_then(|pc| fundamental_cycle(&pc)).is_err();
    check(
        rejected,
        format!("4 identities × {INSTANCES} instances on torus7 and genus2 at radius 2; ∂μ = 0 on 6 fixtures; Klein bottle rejected"),
        "Klein bottle accepted",
    )
}

fn stability() -> Outcome {
    let cases = [
        ("S^2 rotation", map(OCTA_ROTATION)),
        ("S^2 antipode", map(OCTA_ANTIPODE)),
        ("sin-model", sin_map(1, 0.2)),
    ];
    for (name, m) in cases {
        let fd = m.fundamental_domain().map_err(|e| e.to_string())?;
        let before = lefschetz_class(&m, &fd, 1).map_err(|e| format!("{name}: {e}"))?;
        let r = m.refined().map_err(|e| format!("{name}: {e}"))?;
        let rfd = r.fundamental_domain().map_err(|e| e.to_string())?;
        let after = lefschetz_class(&r, &rfd, 1).map_err(|e| format!("{name}: {e}"))?;
        if before != after {
            return Err(format!("{name}: {before:?} ≠ {after:?} after subdivision"));
        }
    }
    let a = sin_map(1, 0.2);
    let b = sin_map(1, 0.3);
    let ca = lefschetz_class(&a, &a.fundamental_domain().map_err(|e| e.to_string())?, 1).map_err(|e| e.to_string())?;
    let cb = lefschetz_class(&b, &b.fundamental_domain().map_err(|e| e.to_string())?, 1).map_err(|e| e.to_string())?;
    check(
        ca == cb,
        "3 fixtures stable under one subdivision; sin-model class unchanged under δ ↦ 1.5δ",
        format!("scaling changed the class: {ca:?} vs {cb:?}"),
    )
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_ulef");
    let mut first: Option<Vec<u8>> = None;
    for run in 0..10 {
        let out = std::process::Command::new(exe)
            .args(["selftest", "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("run {run}: exit {:?}", out.status.code()));
        }
        match &first {
            None => first = Some(out.stdout),
            Some(f) if *f != out.stdout => return Err(format!("run {run} differs from run 0")),
            Some(_) => {}
        }
    }
    Ok(format!("10 selftest runs byte-identical ({} bytes)", first.map_or(0, |f| f.len())))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "connected-sum class", Duration::from_secs(1), connected_sum),
        (2, "Lefschetz–Hopf vs classical oracle", Duration::from_secs(30), oracle),
        (3, "Poincaré–Hopf", Duration::from_secs(10), poincare_hopf),
        (4, "amenability dichotomy", Duration::from_secs(60), amenability),
        (5, "vanishing certificates re-verify", Duration::from_secs(60), certificates),
        (6, "chain-algebra identities", Duration::from_secs(60), chain_identities),
        (7, "stability suite", Duration::from_secs(60), stability),
        (8, "determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; runtime {took:.2?} exceeds {limit:?}")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {n} [{}] {name}: {detail} ({took:.2?})",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
