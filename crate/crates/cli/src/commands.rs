use std::path::Path;

use serde_json::{json, Map, Value};

use gkmforge::algebra::poly::{exp_poly, translate_jet};
use gkmforge::algebra::{divide_by_euler, divide_by_linear, eval_at_point, Division, GradedJet, Poly};
use gkmforge::chern::{chern_character, decompose_by_isotropy, domination_certificate, twisted_germ, EquivariantBundle, Presentation};
use gkmforge::cover::{build_adapted, dist_to_component, verify_adapted, Cover};
use gkmforge::examples::graph_collection;
use gkmforge::gkm::{check_class, cs_compare, gkm_dimensions, image_basis, product_graph, splitting_dimension_check, MomentGraph, Theory};
use gkmforge::ingest::{self, fan_to_graph, Document};
use gkmforge::lattice::{annihilator_of_point, in_subvariety, prec, same_component, DualGroup, Subgroup, TorsionPoint};
use gkmforge::selftest;
use gkmforge::sheaf::{cocycle_check, fixed_subgraph, glue, section_check, section_space_dimension, stalk_space, SectionOutcome, SheafModel};
use gkmforge::tcw::{fixed_subcomplex, isotropy_collection, one_skeleton, Selector, TCWComplex};
use gkmforge::{Error, Result};

use crate::{Algebra, Chern, Cli, Command, CoverCmd, Gkm, GroupArg, Ingest, Latt, Sheaf, Tcw, TheoryArg, DEFAULT_CUTOFF};

/// What a command produced: a report, or a document to print or save.
pub struct Out {
    pub ok: bool,
    cutoff: u32,
    title: String,
    body: Body,
}

enum Body {
    Report { lines: Vec<String>, json: Map<String, Value> },
    Document { value: Value, saved: Option<String> },
}

impl Out {
    fn report(title: &str, cutoff: u32, ok: bool) -> Self {
        Out {
            ok,
            cutoff,
            title: title.to_string(),
            body: Body::Report {
                lines: Vec::new(),
                json: Map::new(),
            },
        }
    }

    fn line(mut self, s: impl Into<String>) -> Self {
        if let Body::Report { lines, .. } = &mut self.body {
            lines.push(s.into());
        }
        self
    }

    fn lines(mut self, ss: impl IntoIterator<Item = String>) -> Self {
        for s in ss {
            self = self.line(s);
        }
        self
    }

    fn field(mut self, key: &str, v: Value) -> Self {
        if let Body::Report { json, .. } = &mut self.body {
            json.insert(key.to_string(), v);
        }
        self
    }

    fn document(title: &str, doc: &Document, output: Option<&Path>) -> Result<Self> {
        let saved = match output {
            Some(p) => {
                ingest::save(doc, p)?;
                Some(p.display().to_string())
            }
            None => None,
        };
        Ok(Out {
            ok: true,
            cutoff: DEFAULT_CUTOFF,
            title: title.to_string(),
            body: Body::Document {
                value: ingest::to_json(doc),
                saved,
            },
        })
    }

    pub fn render(&self, cli: &Cli) -> String {
        match &self.body {
            Body::Document { value, saved: None } => {
                let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Body::Document { value, saved: Some(path) } => {
                if cli.json {
                    let v = json!({"command": self.title, "ok": true, "kind": value["kind"], "written": path});
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("JSON values serialize"))
                } else {
                    format!("wrote {} document to {path}\n", value["kind"].as_str().unwrap_or("?"))
                }
            }
            Body::Report { lines, json } => {
                if cli.json {
                    let mut m = Map::new();
                    m.insert("command".into(), json!(self.title));
                    m.insert("cutoff".into(), json!(self.cutoff));
                    m.insert("window".into(), json!(cli.window));
                    m.insert("ok".into(), json!(self.ok));
                    m.extend(json.clone());
                    format!("{}\n", serde_json::to_string_pretty(&Value::Object(m)).expect("JSON values serialize"))
                } else {
                    let mut s = format!("# {} (cutoff {}, window {})\n", self.title, self.cutoff, cli.window);
                    for l in lines {
                        s.push_str(l);
                        s.push('\n');
                    }
                    s
                }
            }
        }
    }
}

// ------------------------------------------------------------ arguments

fn group(arg: &GroupArg) -> Result<DualGroup> {
    let bad = || Error::model("--group", format!("expected `r` or `r:t1,t2,…`, got {:?}", arg.group));
    let (free, torsion) = match arg.group.split_once(':') {
        Some((f, t)) => (f, t),
        None => (arg.group.as_str(), ""),
    };
    let free: usize = free.trim().parse().map_err(|_| bad())?;
    let torsion = if torsion.trim().is_empty() {
        Vec::new()
    } else {
        ints(torsion, "--group")?
    };
    DualGroup::new(free, torsion)
}

/// Comma-separated integers, optionally in brackets.
fn ints(s: &str, flag: &str) -> Result<Vec<i64>> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::model(flag, format!("expected integers, got {s:?}")))
        })
        .collect()
}

fn rationals(s: &str, flag: &str) -> Result<Vec<num::BigRational>> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(|x| ingest::parse_rational(x.trim().trim_matches('"')).map_err(|e| e.at(flag)))
        .collect()
}

fn point(g: &DualGroup, s: &str, flag: &str) -> Result<TorsionPoint> {
    TorsionPoint::new(g, rationals(s, flag)?).map_err(|e| e.at(flag))
}

fn json_arg(s: &str, flag: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| Error::model(flag, format!("malformed JSON: {e}")))
}

fn gens(g: &DualGroup, s: &str, flag: &str) -> Result<Subgroup> {
    ingest::subgroup_from_json(&json_arg(s, flag)?, g).map_err(|e| e.at(flag))
}

fn collection(g: &DualGroup, s: &str, flag: &str) -> Result<Vec<Subgroup>> {
    let v = json_arg(s, flag)?;
    let Value::Array(items) = v else {
        return Err(Error::model(flag, "expected a JSON list of generator lists"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, x)| ingest::subgroup_from_json(x, g).map_err(|e| e.at(&format!("{flag}/{i}"))))
        .collect()
}

fn wrong_kind(path: &Path, want: &str, doc: &Document) -> Error {
    Error::model("/kind", format!("{} holds a {} document, expected {want}", path.display(), doc.kind()))
}

macro_rules! load_as {
    ($path:expr, $variant:ident, $want:literal) => {{
        let path: &Path = $path;
        match ingest::load(path)? {
            Document::$variant(x) => x,
            other => return Err(wrong_kind(path, $want, &other)),
        }
    }};
}

fn load_graph(path: &Path) -> Result<MomentGraph> {
    Ok(load_as!(path, Graph, "graph"))
}

fn load_graph_or_model(path: &Path) -> Result<MomentGraph> {
    match ingest::load(path)? {
        Document::Graph(g) => Ok(g),
        Document::Model(m) => Ok(m.graph().clone()),
        other => Err(wrong_kind(path, "graph or model", &other)),
    }
}

fn load_model(path: &Path, cutoff: Option<u32>) -> Result<SheafModel> {
    let m = load_as!(path, Model, "model");
    Ok(match cutoff {
        Some(d) => m.with_cutoff(d),
        None => m,
    })
}

fn load_bundle(path: &Path) -> Result<EquivariantBundle> {
    Ok(load_as!(path, Bundle, "bundle"))
}

fn theory(t: TheoryArg) -> Theory {
    match t {
        TheoryArg::K => Theory::K,
        TheoryArg::H => Theory::H,
    }
}

fn param(cli: &Cli, t: TheoryArg, given: Option<u32>) -> u32 {
    given.unwrap_or(match t {
        TheoryArg::K => cli.window,
        TheoryArg::H => cli.cutoff.unwrap_or(DEFAULT_CUTOFF),
    })
}

fn subgroup_json(m: &Subgroup) -> Value {
    ingest::subgroup_json(m)
}

// ------------------------------------------------------------- dispatch

pub fn run(cli: &Cli) -> Result<Out> {
    let cutoff = cli.cutoff.unwrap_or(DEFAULT_CUTOFF);
    match &cli.command {
        Command::Latt(c) => latt(c, cutoff),
        Command::Tcw(c) => tcw(c, cutoff),
        Command::Cover(c) => cover(c, cutoff),
        Command::Algebra(c) => algebra(c, cutoff),
        Command::Chern(c) => chern(cli, c),
        Command::Sheaf(c) => sheaf(cli, c),
        Command::Gkm(c) => gkm(cli, c),
        Command::Ingest(c) => ingest_cmd(c),
        Command::Selftest { only } => selftest_cmd(*only, cutoff),
    }
}

fn verdict(title: &str, cutoff: u32, holds: bool) -> Out {
    Out::report(title, cutoff, holds)
        .line(holds.to_string())
        .field("holds", json!(holds))
}

fn latt(c: &Latt, cutoff: u32) -> Result<Out> {
    Ok(match c {
        Latt::Subgroup { group: g, gens: s } => {
            let g = group(g)?;
            let m = gens(&g, s, "--gens")?;
            let shape = m.quotient_shape();
            Out::report("latt subgroup", cutoff, true)
                .line(format!("generators: {m}"))
                .line(format!("rank: {}", m.rank()))
                .line(format!("quotient: Z^{} torsion {:?}", shape.free_rank, shape.torsion))
                .field("generators", subgroup_json(&m))
                .field("rank", json!(m.rank()))
                .field("quotient", json!({"free_rank": shape.free_rank, "torsion": shape.torsion}))
        }
        Latt::Annihilator { group: g, point: p } => {
            let g = group(g)?;
            let m = annihilator_of_point(&point(&g, p, "--point")?);
            Out::report("latt annihilator", cutoff, true)
                .line(format!("M(α) = {m}"))
                .field("generators", subgroup_json(&m))
        }
        Latt::Member { group: g, point: p, gens: s } => {
            let g = group(g)?;
            verdict("latt member", cutoff, in_subvariety(&point(&g, p, "--point")?, &gens(&g, s, "--gens")?)?)
        }
        Latt::Prec {
            group: g,
            alpha,
            beta,
            collection: a,
        } => {
            let g = group(g)?;
            let a = collection(&g, a, "--collection")?;
            verdict("latt prec", cutoff, prec(&point(&g, alpha, "--alpha")?, &point(&g, beta, "--beta")?, &a)?)
        }
        Latt::Component {
            group: g,
            alpha,
            beta,
            gens: s,
        } => {
            let g = group(g)?;
            let m = gens(&g, s, "--gens")?;
            verdict(
                "latt component",
                cutoff,
                same_component(&point(&g, alpha, "--alpha")?, &point(&g, beta, "--beta")?, &m)?,
            )
        }
    })
}

fn tcw_lines(x: &TCWComplex) -> Vec<String> {
    x.cells()
        .iter()
        .enumerate()
        .map(|(i, c)| format!("cell {i}: D^{} × T/H with M_H = {}", c.dim, c.isotropy))
        .collect()
}

fn tcw(c: &Tcw, cutoff: u32) -> Result<Out> {
    let report = |title: &str, x: TCWComplex| {
        let doc = Document::Tcw(x.clone());
        Out::report(title, cutoff, true)
            .lines(tcw_lines(&x))
            .field("cells", ingest::to_json(&doc)["cells"].clone())
    };
    Ok(match c {
        Tcw::Fixed { file, subgroup, point: p } => {
            let x = load_as!(file, Tcw, "tcw");
            let g = x.ambient().clone();
            let fixed = match (subgroup, p) {
                (Some(s), _) => fixed_subcomplex(&x, Selector::Subgroup(&gens(&g, s, "--subgroup")?))?,
                (None, Some(p)) => fixed_subcomplex(&x, Selector::Point(&point(&g, p, "--point")?))?,
                (None, None) => unreachable!("clap requires a selector"),
            };
            report("tcw fixed", fixed)
        }
        Tcw::Skeleton { file } => report("tcw skeleton", one_skeleton(&load_as!(file, Tcw, "tcw"))),
        Tcw::Collection { file } => {
            let a = isotropy_collection(&load_as!(file, Tcw, "tcw"));
            Out::report("tcw collection", cutoff, true)
                .lines(a.iter().map(|m| m.to_string()))
                .field("collection", a.iter().map(subgroup_json).collect())
        }
    })
}

fn cover(c: &CoverCmd, cutoff: u32) -> Result<Out> {
    match c {
        CoverCmd::Build {
            samples,
            collection: a,
            model,
            output,
        } => {
            let pts = load_as!(samples, Points, "points");
            let Some(first) = pts.first() else {
                return Err(Error::model("/points", "need at least one point"));
            };
            let g = first.ambient().clone();
            let a = match (a, model) {
                (Some(s), _) => collection(&g, s, "--collection")?,
                (None, Some(p)) => graph_collection(&load_graph_or_model(p)?),
                (None, None) => Vec::new(),
            };
            let built = build_adapted(&a, &pts)?;
            Out::document("cover build", &Document::Cover(built), output.as_deref())
        }
        CoverCmd::Verify { cover: file, collection: a } => {
            let cv: Cover = load_as!(file, Cover, "cover");
            let a = match a {
                Some(s) => collection(cv.ambient(), s, "--collection")?,
                None => cv.collection().to_vec(),
            };
            let report = verify_adapted(&cv, &a)?;
            let ok = report.is_adapted();
            let mut out = Out::report("cover verify", cutoff, ok);
            out = if ok {
                out.line(format!("adapted: {} balls, conditions 1-4 hold", cv.balls().len()))
            } else {
                out.lines(report.violations.iter().map(|v| v.to_string()))
            };
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| {
                    json!({
                        "condition": v.condition,
                        "alpha": ingest::point_json(&v.alpha),
                        "beta": v.beta.as_ref().map(ingest::point_json),
                        "witness": v.witness.as_ref().map(subgroup_json),
                    })
                })
                .collect();
            Ok(out.field("adapted", json!(ok)).field("violations", Value::Array(violations)))
        }
        CoverCmd::Distance {
            group: g,
            point: p,
            gens: s,
            rep,
        } => {
            let g = group(g)?;
            let d = dist_to_component(&point(&g, p, "--point")?, &gens(&g, s, "--gens")?, &point(&g, rep, "--rep")?)?;
            Ok(Out::report("cover distance", cutoff, true)
                .line(d.to_string())
                .field("distance", ingest::rational_json(&d)))
        }
    }
}

fn division_out<Q: std::fmt::Display, W: std::fmt::Display>(title: &str, cutoff: u32, d: Division<Q, W>) -> Out {
    match d {
        Division::Quotient(q) => Out::report(title, cutoff, true)
            .line(format!("divisible, quotient {q}"))
            .field("divisible", json!(true))
            .field("quotient", json!(q.to_string())),
        Division::NotDivisible(w) => Out::report(title, cutoff, false)
            .line(format!("not divisible, witness {w}"))
            .field("divisible", json!(false))
            .field("witness", json!(w.to_string())),
    }
}

fn algebra(c: &Algebra, cutoff: u32) -> Result<Out> {
    Ok(match c {
        Algebra::Eval { group: g, laurent, point: p } => {
            let g = group(g)?;
            let f = ingest::laurent_from_json(&json_arg(laurent, "--laurent")?, &g).map_err(|e| e.at("--laurent"))?;
            let v = eval_at_point(&f, &point(&g, p, "--point")?)?;
            Out::report("algebra eval", cutoff, true)
                .line(v.to_string())
                .field("value", ingest::scalar_json(&v))
        }
        Algebra::Euler { group: g, laurent, weight } => {
            let g = group(g)?;
            let f = ingest::laurent_from_json(&json_arg(laurent, "--laurent")?, &g).map_err(|e| e.at("--laurent"))?;
            let w = ints(weight, "--weight")?;
            division_out("algebra euler", cutoff, divide_by_euler(&f, &w)?)
        }
        Algebra::Linear { nvars, poly, form } => {
            let f = ingest::poly_from_json(&json_arg(poly, "--poly")?, *nvars).map_err(|e| e.at("--poly"))?;
            division_out("algebra linear", cutoff, divide_by_linear(&f, &ints(form, "--form")?)?)
        }
        Algebra::Translate { nvars, poly, shift } => {
            let f = ingest::poly_from_json(&json_arg(poly, "--poly")?, *nvars).map_err(|e| e.at("--poly"))?;
            let t = translate_jet(&GradedJet::new(cutoff, f), &rationals(shift, "--shift")?)?;
            Out::report("algebra translate", cutoff, true)
                .line(t.to_string())
                .field("jet", ingest::cyclo_poly_json(t.poly()))
        }
        Algebra::Exp { form } => {
            let l = ints(form, "--form")?;
            let e = exp_poly(&Poly::linear_form(&l), cutoff)?;
            Out::report("algebra exp", cutoff, true)
                .line(e.to_string())
                .field("jet", ingest::cyclo_poly_json(&e))
        }
    })
}

fn chern(cli: &Cli, c: &Chern) -> Result<Out> {
    let cutoff = cli.cutoff.unwrap_or(DEFAULT_CUTOFF);
    let fiber = |bundle: &Path, vertex: &str| -> Result<_> {
        let b = load_bundle(bundle)?;
        b.at(vertex)
            .cloned()
            .ok_or_else(|| Error::model("--vertex", format!("bundle has no fiber at {vertex:?}")))
    };
    Ok(match c {
        Chern::Ch { bundle, vertex } => {
            let ch = chern_character(&fiber(bundle, vertex)?, cutoff);
            Out::report("chern ch", cutoff, true)
                .line(ch.to_string())
                .field("jet", ingest::cyclo_poly_json(ch.poly()))
        }
        Chern::Decompose { bundle, vertex, point: p } => {
            let e = fiber(bundle, vertex)?;
            let alpha = point(e.ambient(), p, "--point")?;
            let parts = decompose_by_isotropy(&e, &alpha)?;
            let mut out = Out::report("chern decompose", cutoff, true);
            let mut js = Vec::new();
            for (key, sub) in &parts {
                let chars: Vec<&Vec<i64>> = sub.summands().iter().map(|s| &s.character).collect();
                out = out.line(format!("{key:?}: rank {} characters {chars:?}", sub.rank()));
                js.push(json!({"class": key, "rank": sub.rank(), "characters": chars}));
            }
            out.field("summands", Value::Array(js))
        }
        Chern::Twisted { model, bundle, point: p } => {
            let m = load_model(model, cli.cutoff)?;
            let e = load_bundle(bundle)?;
            let alpha = point(m.graph().ambient(), p, "--point")?;
            let s = twisted_germ(m.graph(), &e, &alpha, m.cutoff())?;
            let jets = s.jets(m.graph());
            Out::report("chern twisted", m.cutoff(), true)
                .lines(jets.iter().map(|(l, j)| format!("[{l}] {j}")))
                .field(
                    "jets",
                    jets.iter()
                        .map(|(l, j)| (l.clone(), ingest::cyclo_poly_json(j.poly())))
                        .collect::<Map<_, _>>()
                        .into(),
                )
        }
        Chern::Dominate {
            presentation,
            bundled,
            max_n,
        } => {
            let pres = match (presentation, bundled) {
                (Some(p), _) => load_as!(p, Presentation, "presentation"),
                (None, Some(name)) => Presentation::bundled()
                    .into_iter()
                    .find(|p| p.name.eq_ignore_ascii_case(name))
                    .ok_or_else(|| Error::model("--bundled", format!("unknown presentation {name:?} (point, cp1, cp2)")))?,
                (None, None) => unreachable!("clap requires a presentation"),
            };
            let cert = domination_certificate(&pres, *max_n, None)?;
            let mut out = Out::report("chern dominate", cutoff, cert.passes())
                .line(format!("{}: λ = {}", pres.name, cert.lambda));
            let mut rows = Vec::new();
            for r in &cert.rows {
                let margin = r.min_margin.as_ref().map_or("-".to_string(), |m| m.to_string());
                out = out.line(format!(
                    "n = {}: {} (min margin {margin})",
                    r.n,
                    if r.holds { "dominated by 2n·λ^(2n-1)" } else { "NOT dominated" }
                ));
                rows.push(json!({"n": r.n, "holds": r.holds, "min_margin": r.min_margin.as_ref().map(ingest::rational_json)}));
            }
            out.field("presentation", json!(pres.name))
                .field("lambda", json!(cert.lambda.to_string()))
                .field("rows", Value::Array(rows))
        }
    })
}

fn sheaf(cli: &Cli, c: &Sheaf) -> Result<Out> {
    let cutoff = cli.cutoff.unwrap_or(DEFAULT_CUTOFF);
    Ok(match c {
        Sheaf::Fixed { graph, point: p } => {
            let g = load_graph(graph)?;
            let alpha = point(g.ambient(), p, "--point")?;
            let sub = fixed_subgraph(&g, &alpha)?;
            Out::report("sheaf fixed", cutoff, true)
                .line(sub.to_string())
                .field("graph", ingest::to_json(&Document::Graph(sub)))
        }
        Sheaf::Stalk { model, point: p } => {
            let m = load_model(model, cli.cutoff)?;
            let alpha = point(m.graph().ambient(), p, "--point")?;
            let s = stalk_space(&m, &alpha)?;
            Out::report("sheaf stalk", m.cutoff(), true)
                .line(format!("dimensions by degree: {:?}", s.dimensions()))
                .lines(s.basis().map(|b| b.to_string()))
                .field("dimensions", json!(s.dimensions()))
                .field("vertices", json!(s.labels))
        }
        Sheaf::Glue { model, alpha, beta } => {
            let m = load_model(model, cli.cutoff)?;
            let g = m.graph().ambient().clone();
            let (a, b) = (point(&g, alpha, "--alpha")?, point(&g, beta, "--beta")?);
            let mut out = Out::report("sheaf glue", m.cutoff(), true);
            let mut images = Vec::new();
            for s in stalk_space(&m, &a)?.basis() {
                let t = glue(&m, &a, &b, s)?;
                out = out.line(format!("{s}  ↦  {t}"));
                images.push(json!(t.to_string()));
            }
            out.field("images", Value::Array(images))
        }
        Sheaf::Cocycle { model } => {
            let m = load_model(model, cli.cutoff)?;
            let centers = m.cover().centers();
            let mut ok = true;
            let mut out = Out::report("sheaf cocycle", m.cutoff(), true);
            let mut rows = Vec::new();
            for (i, j, k) in m.cocycle_triples()? {
                let r = cocycle_check(&m, centers[i], centers[j], centers[k], None)?;
                ok &= r.passes();
                let status = if r.passes() { "ok" } else { "FAILS" };
                out = out.line(format!("({}, {}, {}): {status} on {} samples", centers[i], centers[j], centers[k], r.samples));
                rows.push(json!({"triple": [i, j, k], "samples": r.samples, "first_failure": r.first_failure}));
            }
            out.ok = ok;
            out.field("triples", Value::Array(rows))
        }
        Sheaf::Section { model, bundle } => {
            let m = load_model(model, cli.cutoff)?;
            let e = load_bundle(bundle)?;
            match section_check(&m, &e)? {
                SectionOutcome::Section(s) => {
                    let mut out = Out::report("sheaf section", m.cutoff(), true);
                    let mut germs = Vec::new();
                    for germ in &s.germs {
                        let jets = germ.jets(m.graph());
                        let parts: Vec<String> = jets.iter().map(|(l, j)| format!("[{l}] {j}")).collect();
                        let shown = if parts.is_empty() { "empty fixed set".to_string() } else { parts.join("; ") };
                        out = out.line(format!("{}: {shown}", germ.point));
                        germs.push(json!({
                            "point": ingest::point_json(&germ.point),
                            "jets": jets.iter().map(|(l, j)| (l.clone(), ingest::cyclo_poly_json(j.poly()))).collect::<Map<_, _>>(),
                        }));
                    }
                    out.field("section", json!(true)).field("germs", Value::Array(germs))
                }
                mismatch @ SectionOutcome::Mismatch { .. } => Out::report("sheaf section", m.cutoff(), false)
                    .line(mismatch.to_string())
                    .field("section", json!(false))
                    .field("mismatch", json!(mismatch.to_string())),
            }
        }
        Sheaf::Dimension { model } => {
            let m = load_model(model, cli.cutoff)?;
            let d = section_space_dimension(&m)?;
            Out::report("sheaf dimension", m.cutoff(), true)
                .line(d.to_string())
                .field("dimension", json!(d))
        }
    })
}

fn gkm(cli: &Cli, c: &Gkm) -> Result<Out> {
    let cutoff = cli.cutoff.unwrap_or(DEFAULT_CUTOFF);
    Ok(match c {
        Gkm::Check { graph, class } => {
            let g = load_graph(graph)?;
            let set = load_as!(class, Classes, "classes");
            let classes = set.resolve(&g)?;
            let mut ok = true;
            let mut out = Out::report("gkm check", cutoff, true);
            let mut reports = Vec::new();
            for (i, c) in classes.iter().enumerate() {
                let r = check_class(&g, c)?;
                ok &= r.passes();
                let entries: Vec<String> = (0..c.len()).map(|v| c.entry_string(v)).collect();
                out = out.line(format!(
                    "class {i} ({}): {}",
                    entries.join(", "),
                    if r.passes() { "all edges divisible" } else { "fails" }
                ));
                let mut edges = Vec::new();
                for e in &r.edges {
                    let edge = &g.edges()[e.edge];
                    let (u, v) = (&g.vertices()[edge.u].label, &g.vertices()[edge.v].label);
                    if !e.divisible {
                        out = out.line(format!("  edge {u}-{v} (w = {:?}): not divisible, {}", edge.weight, e.detail));
                    }
                    edges.push(json!({"u": u, "v": v, "w": edge.weight, "divisible": e.divisible, "detail": e.detail}));
                }
                reports.push(json!({"passes": r.passes(), "edges": edges}));
            }
            out.ok = ok;
            out.field("classes", Value::Array(reports))
        }
        Gkm::Basis { graph, theory: t, param: p } => {
            let g = load_graph(graph)?;
            let p = param(cli, *t, *p);
            let basis = image_basis(&g, theory(*t), p)?;
            let mut out = Out::report("gkm basis", cutoff, true).line(format!("{} theory, parameter {p}: {} elements", theory(*t), basis.len()));
            let mut js = Vec::new();
            for c in &basis {
                let entries: Vec<String> = (0..c.len()).map(|v| c.entry_string(v)).collect();
                out = out.line(format!("({})", entries.join(", ")));
                js.push(json!(entries));
            }
            out.field("theory", json!(theory(*t).to_string())).field("param", json!(p)).field("basis", Value::Array(js))
        }
        Gkm::Dims { graph, max_degree } => {
            let g = load_graph(graph)?;
            let dims = gkm_dimensions(&g, *max_degree);
            Out::report("gkm dims", cutoff, true)
                .line(format!("{dims:?}"))
                .field("dimensions", json!(dims))
        }
        Gkm::Compare {
            graph,
            generators,
            theory: t,
            param: p,
        } => {
            let g = load_graph(graph)?;
            let gens = load_as!(generators, Classes, "classes").resolve(&g)?;
            let p = param(cli, *t, *p);
            let r = cs_compare(&g, &gens, theory(*t), p)?;
            let mut out = Out::report("gkm compare", cutoff, r.equal());
            let mut rows = Vec::new();
            for row in &r.rows {
                let rel = match (row.span_in_gkm, row.gkm_in_span) {
                    (true, true) => "equal",
                    (true, false) => "strict inclusion",
                    _ => "not contained",
                };
                out = out.line(format!("{} {}: image {} / GKM {}: {rel}", r.theory, row.param, row.span_dim, row.gkm_dim));
                rows.push(json!({"param": row.param, "span_dim": row.span_dim, "gkm_dim": row.gkm_dim, "relation": rel}));
            }
            out = match r.first_difference() {
                None => out.line("equal"),
                Some(d) => out.line(format!("first difference at {}", d.param)),
            };
            out.field("theory", json!(r.theory.to_string()))
                .field("equal", json!(r.equal()))
                .field("rows", Value::Array(rows))
        }
        Gkm::Split { graph, theory: t, param: p } => {
            let g = load_graph(graph)?;
            let p = param(cli, *t, *p);
            let r = splitting_dimension_check(&g, theory(*t), p)?;
            Out::report("gkm split", cutoff, r.image_equals_gkm)
                .line(format!(
                    "parameter {}: edgewise {}, image {}, GKM {}{}",
                    r.param,
                    r.edgewise_dim,
                    r.image_dim,
                    r.gkm_dim,
                    if r.image_equals_gkm { ", image = GKM" } else { ", image ≠ GKM" }
                ))
                .field("edgewise_dim", json!(r.edgewise_dim))
                .field("image_dim", json!(r.image_dim))
                .field("gkm_dim", json!(r.gkm_dim))
                .field("image_equals_gkm", json!(r.image_equals_gkm))
        }
        Gkm::Product { first, second, output } => {
            let p = product_graph(&load_graph(first)?, &load_graph(second)?);
            Out::document("gkm product", &Document::Graph(p), output.as_deref())?
        }
    })
}

fn summary(doc: &Document) -> String {
    match doc {
        Document::Graph(g) => format!("{} vertices, {} edges over {}", g.vertices().len(), g.edges().len(), g.ambient()),
        Document::Cover(c) => format!("{} balls, collection of {}", c.balls().len(), c.collection().len()),
        Document::Tcw(x) => format!("{} cells", x.cells().len()),
        Document::Fan(f) => format!("dimension {}, {} rays, {} maximal cones", f.dim(), f.rays().len(), f.max_cones().len()),
        Document::Bundle(b) => format!("{} fibers", b.by_vertex().len()),
        Document::Model(m) => format!(
            "{} vertices, {} centers, cutoff {}",
            m.graph().vertices().len(),
            m.cover().balls().len(),
            m.cutoff()
        ),
        Document::Presentation(p) => format!("{}: rank {}, {} variables", p.name, p.rank(), p.nvars),
        Document::Classes(c) => format!("{} {} classes", c.classes.len(), c.theory),
        Document::Points(p) => format!("{} points", p.len()),
    }
}

fn ingest_cmd(c: &Ingest) -> Result<Out> {
    Ok(match c {
        Ingest::Validate { file } => {
            let doc = ingest::load(file)?;
            Out::report("ingest validate", DEFAULT_CUTOFF, true)
                .line(format!("valid {} document: {}", doc.kind(), summary(&doc)))
                .field("kind", json!(doc.kind()))
                .field("summary", json!(summary(&doc)))
        }
        Ingest::Normalize { file, output } => Out::document("ingest normalize", &ingest::load(file)?, output.as_deref())?,
        Ingest::Fan { file, output } => {
            let f = load_as!(file, Fan, "fan");
            Out::document("ingest fan", &Document::Graph(fan_to_graph(&f)?), output.as_deref())?
        }
        Ingest::Examples { dir } => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.display().to_string(),
                message: e.to_string(),
            })?;
            let mut out = Out::report("ingest examples", DEFAULT_CUTOFF, true);
            let mut names = Vec::new();
            for (name, doc) in ingest::bundled_documents() {
                let path = dir.join(format!("{name}.json"));
                ingest::save(&doc, &path)?;
                out = out.line(format!("{} ({})", path.display(), doc.kind()));
                names.push(json!(name));
            }
            // condition 1 needs a radius-1/2 ball, which no cover document can hold
            for (cond, cover, _) in gkmforge::examples::adapted_counterexamples().into_iter().filter(|c| c.0 > 1) {
                let name = format!("bad-cover-c{cond}");
                ingest::save(&Document::Cover(cover), dir.join(format!("{name}.json")))?;
                out = out.line(format!("{} (cover)", dir.join(format!("{name}.json")).display()));
                names.push(json!(name));
            }
            out.field("written", Value::Array(names))
        }
    })
}

fn selftest_cmd(only: Option<u8>, cutoff: u32) -> Result<Out> {
    let results = match only {
        Some(id) => vec![selftest::run_criterion(id)
            .ok_or_else(|| Error::model("--only", format!("no criterion {id} (1-{})", selftest::CRITERIA.len())))?],
        None => selftest::run_all(),
    };
    let passed = results.iter().filter(|r| r.passed).count();
    let ok = passed == results.len();
    let rows: Vec<Value> = results
        .iter()
        .map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail}))
        .collect();
    Ok(Out::report("selftest", cutoff, ok)
        .lines(results.iter().map(|r| r.to_string()))
        .line(format!("{passed} of {} criteria passed", results.len()))
        .field("criteria", Value::Array(rows)))
}
