//! The `ulef` batch front end: read documents, run a pipeline, emit a JSON
//! report (and optionally SVG plots). Reports contain no timestamps or
//! paths, so identical inputs give byte-identical output.

pub mod selftest;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::class_fn::{ClassFunction, ClassFunctionDoc};
use crate::complex::doc::ComplexDoc;
use crate::complex::QuotientComplex;
use crate::error::{Error, Result};
use crate::fixpoint::doc::{named_complex, ComplexRef};
use crate::fixpoint::{
    ingest_index_data, localize, oracle_for_class, require_strong, Localization, MapDoc, SearchOptions, SelfMapModel,
    TorusModel,
};
use crate::group::{FolnerScheme, GroupKind, GroupSpec, MarkedGroup};
use crate::ufh::certificate::{CertificateDoc, Payload};
use crate::ufh::{decide_class_with, isoperimetric_probe, CayleyGraph, ClassCertificate, DecideOptions, FlowInstance, Verdict};
use crate::vectorfield::{localize_field, poincare_hopf_check_with, VectorFieldModel};

use self::selftest::{run_selftest, SelftestOptions};

#[derive(Parser, Debug, Clone, PartialEq, Eq)]
#[command(name = "ulef", version, about = "Uniform Lefschetz and Poincaré–Hopf classes on Galois covers")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Region radius (word length) for records, certificates and probes.
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    /// Largest edge capacity tried by flow certificates.
    #[arg(long, global = true, default_value_t = 64)]
    pub capacity: i64,
    /// Barycentric subdivision level (raises the document's level).
    #[arg(long, global = true)]
    pub subdivide: Option<usize>,
    /// Newton start grid per axis for analytic models.
    #[arg(long, global = true, default_value_t = 32)]
    pub grid: usize,
    /// Seed of the randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving `<command>.json` and plots.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write SVG plots (needs `--out`).
    #[arg(long, global = true)]
    pub plots: bool,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Check a quotient complex document (or fixture name).
    Validate { input: String },
    /// Fixed points, indices, tameness and the Lefschetz class of a map
    /// document, or a class from index data.
    MapAnalyze { input: PathBuf },
    /// Zeros, indices and the Poincaré–Hopf comparison for a field document.
    FieldAnalyze { input: PathBuf },
    /// Følner, isoperimetric and flow probes for a group (JSON spec, file,
    /// or `Z^k`, `F_k`, `surface:g`, `cyclic:n`).
    Amenability { group: String },
    /// Decide a class function document `{group, constant, finite}`.
    DecideClass { input: PathBuf },
    /// Run the seeded property suite.
    Selftest {
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::MapAnalyze { .. } => "map-analyze",
            Command::FieldAnalyze { .. } => "field-analyze",
            Command::Amenability { .. } => "amenability",
            Command::DecideClass { .. } => "decide-class",
            Command::Selftest { .. } => "selftest",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub command: &'static str,
    pub report: Value,
    /// `(file stem, svg)`.
    pub plots: Vec<(String, String)>,
    pub exit_code: i32,
}

impl RunOutput {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// JSON shape of an error, printed on stderr.
pub fn error_report(e: &Error) -> Value {
    json!({"error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()})
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    let src = match &cfg.command {
        Command::MapAnalyze { input } | Command::FieldAnalyze { input } | Command::DecideClass { input } => {
            Some(read(input)?)
        }
        _ => None,
    };
    execute_source(cfg, src.as_deref())
}

/// Like [`execute`], with the document of `map-analyze`, `field-analyze`
/// and `decide-class` passed as text instead of read from the input path.
pub fn execute_source(cfg: &RunConfig, src: Option<&str>) -> Result<RunOutput> {
    let name = cfg.command.name();
    let doc = || src.ok_or_else(|| Error::input(format!("{name} needs an input document")));
    let (report, plots, exit_code) = match &cfg.command {
        Command::Validate { input } => cmd_validate(input)?,
        Command::MapAnalyze { .. } => cmd_map_analyze(cfg, doc()?)?,
        Command::FieldAnalyze { .. } => cmd_field_analyze(cfg, doc()?)?,
        Command::Amenability { group } => cmd_amenability(cfg, group)?,
        Command::DecideClass { .. } => cmd_decide_class(cfg, doc()?)?,
        Command::Selftest { instances } => {
            let r = run_selftest(SelftestOptions {
                seed: cfg.seed,
                instances: *instances,
            })?;
            let code = if r.passed { 0 } else { 1 };
            (json!({"command": "selftest", "report": r}), vec![], code)
        }
    };
    Ok(RunOutput {
        command: name,
        report,
        plots: if cfg.plots { plots } else { vec![] },
        exit_code,
    })
}

/// Write `<out>/<command>.json` and the plots.
pub fn write_outputs(cfg: &RunConfig, out: &RunOutput) -> Result<Vec<PathBuf>> {
    let Some(dir) = &cfg.out else {
        if cfg.plots {
            return Err(Error::input("--plots needs --out"));
        }
        return Ok(vec![]);
    };
    let io = |e: std::io::Error| Error::input(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut written = vec![dir.join(format!("{}.json", out.command))];
    fs::write(&written[0], out.render()).map_err(io)?;
    for (stem, svg) in &out.plots {
        let p = dir.join(format!("{}-{stem}.svg", out.command));
        fs::write(&p, svg).map_err(io)?;
        written.push(p);
    }
    Ok(written)
}

type CmdResult = Result<(Value, Vec<(String, String)>, i32)>;

fn complex_from_arg(input: &str) -> Result<std::result::Result<QuotientComplex, Error>> {
    let path = Path::new(input);
    if path.exists() {
        let doc = ComplexDoc::from_json(&read(path)?)?;
        Ok(doc.resolve())
    } else if input.trim_start().starts_with('{') {
        Ok(ComplexDoc::from_json(input)?.resolve())
    } else {
        Ok(named_complex(input))
    }
}

fn cmd_validate(input: &str) -> CmdResult {
    match complex_from_arg(input)? {
        Err(e) => {
            let report = json!({
                "command": "validate",
                "valid": false,
                "violations": [{"condition": e.kind(), "detail": e.to_string()}],
            });
            Ok((report, vec![], 1))
        }
        Ok(q) => {
            let v = q.validate();
            let f_vector: Vec<usize> = (0..=q.dim()).map(|k| q.count(k)).collect();
            let report = json!({
                "command": "validate",
                "valid": v.is_valid(),
                "group": q.group().to_string(),
                "dimension": q.dim(),
                "f_vector": f_vector,
                "euler_characteristic": q.euler_characteristic(),
                "violations": v.violations,
            });
            Ok((report, vec![], if v.is_valid() { 0 } else { 1 }))
        }
    }
}

fn decide_opts(cfg: &RunConfig) -> DecideOptions {
    DecideOptions {
        capacity_limit: cfg.capacity,
        ..DecideOptions::default()
    }
}

/// Certificate document with the verifier's confirmation; an unverified
/// certificate is an internal error, never a report.
fn verified_doc(group: &MarkedGroup, cert: &ClassCertificate) -> Result<CertificateDoc> {
    let doc = cert.to_doc(group)?;
    if !doc.verifier_result.ok && cert.verdict != Verdict::Inconclusive {
        return Err(Error::Invariant(format!(
            "certificate failed independent verification: {}",
            doc.verifier_result.detail
        )));
    }
    Ok(doc)
}

fn lefschetz_narrative(group: &MarkedGroup, cert: &ClassCertificate) -> String {
    let infinite = group.order().is_none();
    match (&cert.verdict, &cert.payload) {
        (Verdict::NonzeroByMean, Payload::Mean { limit, .. }) => {
            let mut s = format!("The Følner mean of the class is {limit} ≠ 0, so the uniform Lefschetz class is nonzero.");
            if infinite {
                s.push_str(
                    " The cover is noncompact, so every strongly tame map uniformly homotopic to f has infinitely many fixed points.",
                );
            } else {
                s.push_str(" Every map homotopic to f has a fixed point.");
            }
            s
        }
        (Verdict::ZeroByBoundary, _) => "The class bounds an explicit 1-chain, so the uniform Lefschetz class is zero. \
             On a simply connected cover of dimension at least 2, f is then uniformly homotopic to a strongly \
             fixed-point free map (not constructed here)."
            .into(),
        (Verdict::ZeroByTruncatedFlow, _) => "Uniform-capacity flows bound the class on every probed region; the deck group \
             is nonamenable, so uniformly finite 0-homology vanishes and the class is zero. On the universal cover \
             of a closed manifold with nonamenable fundamental group, every map at bounded distance from the \
             identity is uniformly homotopic to a strongly fixed-point free map. The flows cover finitely many \
             radii: this is finite evidence consistent with, not a proof of, an infinite bounding chain."
            .into(),
        _ => "Inconclusive within the budgets; raise --radius or --capacity.".into(),
    }
}

fn mean_plot(cert: &ClassCertificate, title: &str) -> Option<(String, String)> {
    let Payload::Mean { samples, .. } = &cert.payload else { return None };
    let pts = samples
        .iter()
        .map(|s| (s.index as f64, s.average.to_f64().unwrap_or(0.0)))
        .collect();
    Some(("folner-averages".into(), svg::line_chart(title, "t", "average over F_t", &[("average".into(), pts)])))
}

fn coset_plot(group: &MarkedGroup, class: &ClassFunction, title: &str) -> Result<(String, String)> {
    let bars: Vec<(String, f64)> = group
        .ball(3)?
        .iter()
        .map(|g| (group.format(g), class.value(g) as f64))
        .collect();
    Ok(("coset-sums".into(), svg::bar_chart(title, "coset (ball of radius 3)", "index sum", &bars)))
}

fn coset_sums(group: &MarkedGroup, class: &ClassFunction, radius: usize) -> Result<Value> {
    Ok(Value::Array(
        group
            .ball(radius)?
            .iter()
            .map(|g| json!([group.format(g), class.value(g)]))
            .collect(),
    ))
}

fn complex_label(c: &ComplexRef) -> String {
    match c {
        ComplexRef::Named(n) => n.clone(),
        ComplexRef::Inline(_) => "inline".into(),
    }
}

fn index_data_report(cfg: &RunConfig, src: &str, field: bool) -> CmdResult {
    let data = ingest_index_data(src)?;
    let group = data.group.clone();
    let command = if field { "field-analyze" } else { "map-analyze" };
    let mut plots = vec![coset_plot(&group, &data.class, "per-coset index sums")?];
    if field {
        let chi = data.euler_characteristic.ok_or_else(|| {
            Error::input("field index data needs `complex` or `euler_characteristic` to compare with χ")
        })?;
        let ph = poincare_hopf_check_with(&group, &data.class, chi, &decide_opts(cfg))?;
        verified_doc(&group, &ph.certificate)?;
        plots.extend(mean_plot(&ph.certificate, "Følner averages of ind(v) - χ·1"));
        let code = if ph.consistent || ph.certificate.verdict == Verdict::Inconclusive { 0 } else { 1 };
        let report = json!({
            "command": command,
            "source": data.note,
            "group": group.to_string(),
            "poincare_hopf": ph.to_doc(&group)?,
        });
        return Ok((report, plots, code));
    }
    let cert = decide_class_with(&group, &data.class, &decide_opts(cfg))?;
    let doc = verified_doc(&group, &cert)?;
    plots.extend(mean_plot(&cert, "Følner averages of the Lefschetz class"));
    let report = json!({
        "command": command,
        "source": data.note,
        "group": group.to_string(),
        "class": data.class.to_doc(&group),
        "certificate": doc,
        "narrative": lefschetz_narrative(&group, &cert),
    });
    Ok((report, plots, 0))
}

fn refuse(command: &str, model: Value, e: &Error, tameness: Option<Value>) -> CmdResult {
    let report = json!({
        "command": command,
        "model": model,
        "tameness": tameness,
        "refused": {"error": e.kind(), "message": e.to_string()},
    });
    Ok((report, vec![], e.exit_code()))
}

fn with_subdivision_map(cfg: &RunConfig, mut m: SelfMapModel) -> Result<SelfMapModel> {
    if let Some(t) = cfg.subdivide {
        if t < m.subdivision() {
            return Err(Error::input(format!(
                "--subdivide {t} is below the document's level {}",
                m.subdivision()
            )));
        }
        while m.subdivision() < t {
            m = m.refined()?;
        }
    }
    Ok(m)
}

fn cmd_map_analyze(cfg: &RunConfig, src: &str) -> CmdResult {
    let probe: Value = serde_json::from_str(src)?;
    if probe.get("variant").is_none() {
        return index_data_report(cfg, src, false);
    }
    let doc = MapDoc::from_json(src)?;
    let m = with_subdivision_map(cfg, doc.self_map()?)?;
    let group = m.group().clone();
    let radius = cfg.radius.unwrap_or(2);
    let model = json!({
        "variant": doc.variant,
        "complex": complex_label(&doc.complex),
        "group": group.to_string(),
        "dimension": m.quotient().dim(),
        "subdivision": m.subdivision(),
        "equivariant": m.is_equivariant(),
    });
    let fd = m.fundamental_domain()?;
    let opts = SearchOptions {
        grid: cfg.grid,
        ..SearchOptions::default()
    };
    let loc: Localization = match localize(&m, &fd, radius, opts) {
        Ok(l) => l,
        Err(e @ (Error::NotTame(_) | Error::FaceFixedPoint(_) | Error::Ambiguous(_))) => {
            return refuse("map-analyze", model, &e, None)
        }
        Err(e) => return Err(e),
    };
    if let Err(e) = require_strong(&loc.tameness) {
        return refuse("map-analyze", model, &e, Some(serde_json::to_value(&loc.tameness)?));
    }
    let cert = decide_class_with(&group, &loc.class, &decide_opts(cfg))?;
    let cert_doc = verified_doc(&group, &cert)?;
    let oracle = if m.is_equivariant() {
        Some(oracle_for_class(&m, &loc.class)?)
    } else {
        None
    };
    if oracle.as_ref().is_some_and(|o| !o.equal) {
        return Err(Error::Invariant(format!(
            "index sum {} disagrees with the classical Lefschetz number {}",
            loc.class.constant,
            oracle.as_ref().map_or(0, |o| o.lefschetz)
        )));
    }
    let mut notes = vec![
        "maps are restricted to periodic-plus-finitely-many-overrides models; the class is computed for that representative"
            .to_string(),
    ];
    if let SelfMapModel::Analytic(a) = &m {
        notes.push(analytic_note(a));
    }
    let mut plots = vec![coset_plot(&group, &loc.class, "per-coset fixed-point index sums")?];
    plots.extend(mean_plot(&cert, "Følner averages of the Lefschetz class"));
    let report = json!({
        "command": "map-analyze",
        "model": model,
        "fixed_points": {
            "radius": radius,
            "count": loc.records.len(),
            "records": loc.records.iter().map(|r| r.to_doc(&group)).collect::<Vec<_>>(),
        },
        "coset_sums": coset_sums(&group, &loc.class, radius.min(2))?,
        "tameness": loc.tameness,
        "class": loc.class.to_doc(&group),
        "certificate": cert_doc,
        "oracle": oracle,
        "notes": notes,
        "narrative": lefschetz_narrative(&group, &cert),
    });
    Ok((report, plots, 0))
}

fn analytic_note(a: &TorusModel) -> String {
    let (sampled, enclosure) = a.sup_norm(64);
    match (a.bound, enclosure) {
        (Some(b), Some(e)) if e <= b => format!("bound {b} holds: sampled sup {sampled:.6}, interval enclosure {e:.6}"),
        (Some(b), _) => format!("bound {b} checked on the 64^n grid only (sampled sup {sampled:.6})"),
        (None, _) => format!("no bound declared; sampled sup {sampled:.6}"),
    }
}

fn cmd_field_analyze(cfg: &RunConfig, src: &str) -> CmdResult {
    let probe: Value = serde_json::from_str(src)?;
    if probe.get("variant").is_none() {
        return index_data_report(cfg, src, true);
    }
    let doc = MapDoc::from_json(src)?;
    let mut v = VectorFieldModel::from_doc(&doc)?;
    if let Some(t) = cfg.subdivide {
        v = match v {
            VectorFieldModel::Analytic(mut a) => {
                if t < a.subdivision {
                    return Err(Error::input(format!("--subdivide {t} is below the document's level {}", a.subdivision)));
                }
                while a.subdivision < t {
                    a = a.refined()?;
                }
                VectorFieldModel::Analytic(a)
            }
            VectorFieldModel::Pl(_) if t > 0 => {
                return Err(Error::Unsupported("PL fields are given on the unsubdivided complex".into()))
            }
            pl => pl,
        };
    }
    let group = v.group().clone();
    let radius = cfg.radius.unwrap_or(2);
    let model = json!({
        "variant": doc.variant,
        "complex": complex_label(&doc.complex),
        "group": group.to_string(),
        "dimension": v.quotient().dim(),
        "subdivision": match &v { VectorFieldModel::Analytic(a) => a.subdivision, VectorFieldModel::Pl(_) => 0 },
    });
    let fd = v.fundamental_domain()?;
    let opts = SearchOptions {
        grid: cfg.grid,
        ..SearchOptions::default()
    };
    let loc = match localize_field(&v, &fd, radius, opts) {
        Ok(l) => l,
        Err(e @ (Error::NotTame(_) | Error::FaceFixedPoint(_) | Error::Ambiguous(_))) => {
            return refuse("field-analyze", model, &e, None)
        }
        Err(e) => return Err(e),
    };
    if let Err(e) = require_strong(&loc.tameness) {
        return refuse("field-analyze", model, &e, Some(serde_json::to_value(&loc.tameness)?));
    }
    let chi = v.quotient().euler_characteristic();
    let ph = poincare_hopf_check_with(&group, &loc.class, chi, &decide_opts(cfg))?;
    verified_doc(&group, &ph.certificate)?;
    let mut notes = Vec::new();
    match &v {
        VectorFieldModel::Analytic(a) => notes.push(analytic_note(a)),
        VectorFieldModel::Pl(_) => notes.push(
            "PL field vectors are taken per simplex; agreement across shared faces is not checked".to_string(),
        ),
    }
    let mut plots = vec![coset_plot(&group, &loc.class, "per-coset zero index sums")?];
    plots.extend(mean_plot(&ph.certificate, "Følner averages of ind(v) - χ·1"));
    let code = if ph.consistent || ph.certificate.verdict == Verdict::Inconclusive { 0 } else { 1 };
    let report = json!({
        "command": "field-analyze",
        "model": model,
        "zeros": {
            "radius": radius,
            "count": loc.records.len(),
            "records": loc.records.iter().map(|r| r.to_doc(&group)).collect::<Vec<_>>(),
        },
        "coset_sums": coset_sums(&group, &loc.class, radius.min(2))?,
        "tameness": loc.tameness,
        "poincare_hopf": ph.to_doc(&group)?,
        "notes": notes,
    });
    Ok((report, plots, code))
}

/// `Z^k`, `F_k`, `surface:g`, `cyclic:n`, a JSON group spec, or a file
/// holding one.
pub fn parse_group_arg(arg: &str) -> Result<MarkedGroup> {
    let path = Path::new(arg);
    let a = arg.trim();
    if a.starts_with('{') {
        let spec: GroupSpec = serde_json::from_str(a)?;
        return spec.build();
    }
    if path.exists() {
        let spec: GroupSpec = serde_json::from_str(&read(path)?)?;
        return spec.build();
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::input(format!("bad group `{arg}` (Z^k, F_k, surface:g, cyclic:n or a JSON spec)")))
    };
    if let Some(k) = a.strip_prefix("Z^").or_else(|| a.strip_prefix('Z')) {
        return Ok(MarkedGroup::free_abelian(num(k)?));
    }
    if let Some(k) = a.strip_prefix("F_").or_else(|| a.strip_prefix('F')) {
        return Ok(MarkedGroup::free(num(k)?));
    }
    if let Some(g) = a.strip_prefix("surface:") {
        return Ok(MarkedGroup::surface(num(g)?));
    }
    if let Some(n) = a.strip_prefix("cyclic:") {
        return Ok(MarkedGroup::cyclic(num(n)?));
    }
    Err(Error::input(format!("bad group `{arg}` (Z^k, F_k, surface:g, cyclic:n or a JSON spec)")))
}

fn cmd_amenability(cfg: &RunConfig, arg: &str) -> CmdResult {
    let group = parse_group_arg(arg)?;
    let rmax = cfg.radius.unwrap_or(6);
    let radii: Vec<usize> = (1..=rmax).collect();

    let folner = match FolnerScheme::for_group(&group, 1) {
        Ok(s) => {
            let top = if matches!(group.kind(), GroupKind::Finite { .. }) { 0 } else { 8 };
            let rows: Vec<Value> = (0..=top)
                .map(|t| {
                    json!({"t": t, "size": s.size(&group, t), "boundary": s.boundary_count(t),
                           "ratio": s.ratio(&group, t).to_string()})
                })
                .collect();
            json!({"scheme": format!("{:?}", s.family), "rows": rows})
        }
        Err(Error::Unsupported(m)) => json!({"unsupported": m}),
        Err(e) => return Err(e),
    };
    let iso = isoperimetric_probe(&CayleyGraph::new(&group), &radii)?;
    let one = ClassFunction::constant(1);
    let mut flows = Vec::new();
    for &r in &radii {
        let inst = FlowInstance::new(&group, &one, r)?;
        let min = inst.min_capacity(cfg.capacity).map(|f| f.capacity);
        flows.push(json!({"radius": r, "interior": inst.vertex_count() - 1, "min_capacity": min}));
    }

    let mut plots = Vec::new();
    if let Some(rows) = folner.get("rows").and_then(|r| r.as_array()) {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| {
                let t = r["t"].as_f64()?;
                let q: crate::Q = r["ratio"].as_str()?.parse().ok()?;
                Some((t, q.to_f64()?))
            })
            .collect();
        plots.push((
            "folner".into(),
            svg::line_chart(&format!("Følner ratios, {group}"), "t", "|∂F_t| / |F_t|", &[("ratio".into(), pts)]),
        ));
    }
    let pts: Vec<(f64, f64)> = iso
        .iter()
        .map(|r| (r.radius as f64, r.ratio.to_f64().unwrap_or(0.0)))
        .collect();
    plots.push((
        "isoperimetric".into(),
        svg::line_chart(&format!("vertex-boundary ratios, {group}"), "r", "|∂B_r| / |B_r|", &[("ratio".into(), pts)]),
    ));
    let pts: Vec<(f64, f64)> = flows
        .iter()
        .filter_map(|f| Some((f["radius"].as_f64()?, f["min_capacity"].as_f64()?)))
        .collect();
    plots.push((
        "flow".into(),
        svg::line_chart(&format!("least capacity bounding 1, {group}"), "R", "capacity", &[("C".into(), pts)]),
    ));
    let report = json!({
        "command": "amenability",
        "group": group.to_string(),
        "spec": group.spec(),
        "amenability": format!("{:?}", group.amenability()),
        "folner": folner,
        "isoperimetric": iso,
        "flow": {"function": "1", "capacity_limit": cfg.capacity, "rows": flows},
    });
    Ok((report, plots, 0))
}

fn cmd_decide_class(cfg: &RunConfig, src: &str) -> CmdResult {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Doc {
        #[serde(default)]
        group: Option<GroupSpec>,
        #[serde(flatten)]
        function: ClassFunctionDoc,
    }
    let doc: Doc = serde_json::from_str(src)?;
    let group = Arc::new(match &doc.group {
        Some(s) => s.build()?,
        None => MarkedGroup::trivial(),
    });
    let f = doc.function.resolve(&group)?;
    let cert = decide_class_with(&group, &f, &decide_opts(cfg))?;
    let cert_doc = verified_doc(&group, &cert)?;
    let plots: Vec<(String, String)> = mean_plot(&cert, "Følner averages").into_iter().collect();
    let report = json!({
        "command": "decide-class",
        "group": group.to_string(),
        "certificate": cert_doc,
    });
    Ok((report, plots, 0))
}
