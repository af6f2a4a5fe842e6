//! JSON documents under the `gkm-forge/1` schema, and toric fans.
//!
//! Every document is an object with `"schema": "gkm-forge/1"` and a
//! `"kind"`; errors point into the document with a JSON pointer.
//! Rationals are written as strings (`"1/2"`); integers are also accepted
//! on input.

pub mod fan;

use std::collections::BTreeMap;
use std::path::Path;

use num::BigRational;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::algebra::{CycloScalar, LaurentElement, Poly};
use crate::chern::{EquivariantBundle, LineSummand, Presentation, SplitBundle};
use crate::cover::{Ball, Cover};
use crate::error::{Error, Result};
use crate::gkm::{check_weight, Class, Edge, MomentGraph, Theory, Vertex};
use crate::lattice::{DualGroup, Subgroup, TorsionPoint};
use crate::sheaf::SheafModel;
use crate::tcw::{Cell, TCWComplex};

pub use fan::{fan_to_graph, Fan, FanPart};

pub const SCHEMA: &str = "gkm-forge/1";

/// Labeled vertex classes, resolved against a graph on use.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSet {
    pub ambient: DualGroup,
    pub theory: Theory,
    pub classes: Vec<BTreeMap<String, ClassEntry>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassEntry {
    K(LaurentElement),
    H(Poly<CycloScalar>),
}

impl ClassSet {
    pub fn from_classes(graph: &MomentGraph, classes: &[Class]) -> Result<Self> {
        let theory = classes.first().map_or(Theory::H, Class::theory);
        let mut out = Vec::new();
        for c in classes {
            if c.theory() != theory || c.len() != graph.vertices().len() {
                return Err(Error::Precondition("classes must share a theory and cover every vertex".into()));
            }
            let labels = graph.vertices().iter().map(|v| v.label.clone());
            out.push(match c {
                Class::K(x) => labels.zip(x.iter().cloned().map(ClassEntry::K)).collect(),
                Class::H(x) => labels.zip(x.iter().cloned().map(ClassEntry::H)).collect(),
            });
        }
        Ok(ClassSet {
            ambient: graph.ambient().clone(),
            theory,
            classes: out,
        })
    }

    /// Vertex-ordered classes on `graph`; every vertex must be named.
    pub fn resolve(&self, graph: &MomentGraph) -> Result<Vec<Class>> {
        if &self.ambient != graph.ambient() {
            return Err(Error::AmbientMismatch);
        }
        let mut out = Vec::new();
        for (i, c) in self.classes.iter().enumerate() {
            if let Some(extra) = c.keys().find(|l| graph.vertex_index(l).is_none()) {
                return Err(Error::model(format!("/classes/{i}/{extra}"), "no such vertex in the graph"));
            }
            let entry = |label: &str| {
                c.get(label)
                    .ok_or_else(|| Error::model(format!("/classes/{i}"), format!("missing vertex {label:?}")))
            };
            let labels = graph.vertices().iter().map(|v| v.label.as_str());
            out.push(match self.theory {
                Theory::K => Class::K(
                    labels
                        .map(|l| match entry(l)? {
                            ClassEntry::K(x) => Ok(x.clone()),
                            ClassEntry::H(_) => unreachable!("class sets are homogeneous"),
                        })
                        .collect::<Result<_>>()?,
                ),
                Theory::H => Class::H(
                    labels
                        .map(|l| match entry(l)? {
                            ClassEntry::H(x) => Ok(x.clone()),
                            ClassEntry::K(_) => unreachable!("class sets are homogeneous"),
                        })
                        .collect::<Result<_>>()?,
                ),
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Graph(MomentGraph),
    Cover(Cover),
    Tcw(TCWComplex),
    Fan(Fan),
    Bundle(EquivariantBundle),
    Model(SheafModel),
    Presentation(Presentation),
    Classes(ClassSet),
    Points(Vec<TorsionPoint>),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Graph(_) => "graph",
            Document::Cover(_) => "cover",
            Document::Tcw(_) => "tcw",
            Document::Fan(_) => "fan",
            Document::Bundle(_) => "bundle",
            Document::Model(_) => "model",
            Document::Presentation(_) => "presentation",
            Document::Classes(_) => "classes",
            Document::Points(_) => "points",
        }
    }
}

// ---------------------------------------------------------------- input

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupDto {
    free_rank: usize,
    #[serde(default)]
    torsion: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatDto {
    Int(i64),
    Str(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CycloDto {
    order: u64,
    coeffs: Vec<RatDto>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarDto {
    Rat(RatDto),
    Cyclo(CycloDto),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexObj {
    label: String,
    #[serde(default)]
    isotropy: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VertexDto {
    Label(String),
    Full(VertexObj),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDto {
    u: String,
    v: String,
    w: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDto {
    group: GroupDto,
    vertices: Vec<VertexDto>,
    #[serde(default)]
    edges: Vec<EdgeDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallDto {
    center: Vec<RatDto>,
    radius: RatDto,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverDto {
    group: GroupDto,
    #[serde(default)]
    collection: Vec<Vec<Vec<i64>>>,
    balls: Vec<BallDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDto {
    dim: usize,
    #[serde(default)]
    isotropy: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TcwDto {
    group: GroupDto,
    cells: Vec<CellDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanDto {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDto {
    exp: Vec<i64>,
    coeff: ScalarDto,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyDto {
    terms: Vec<TermDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SummandDto {
    char: Vec<i64>,
    #[serde(default)]
    aux: Option<PolyDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleDto {
    group: GroupDto,
    summands_by_vertex: BTreeMap<String, Vec<SummandDto>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDto {
    graph: GraphDto,
    cover: CoverDto,
    cutoff: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationDto {
    #[serde(default)]
    name: String,
    nvars: usize,
    structure: Vec<Vec<Vec<PolyDto>>>,
    class: Vec<PolyDto>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassesDto {
    group: GroupDto,
    theory: String,
    classes: Vec<BTreeMap<String, PolyDto>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointsDto {
    group: GroupDto,
    points: Vec<Vec<RatDto>>,
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let pointer = if path == "." {
            String::new()
        } else {
            // serde_path_to_error renders `a.b[0].c`
            let mut p = String::new();
            for seg in path.split('.') {
                let (name, rest) = seg.split_once('[').map_or((seg, ""), |(n, r)| (n, r));
                if !name.is_empty() {
                    p.push('/');
                    p.push_str(name);
                }
                for idx in rest.split('[').filter(|s| !s.is_empty()) {
                    p.push('/');
                    p.push_str(idx.trim_end_matches(']'));
                }
            }
            p
        };
        Error::model(pointer, e.into_inner().to_string())
    })
}

fn group(g: GroupDto, at: &str) -> Result<DualGroup> {
    DualGroup::new(g.free_rank, g.torsion).map_err(|e| e.at(at))
}

fn rational(r: &RatDto, at: &str) -> Result<BigRational> {
    match r {
        RatDto::Int(n) => Ok(BigRational::from_integer((*n).into())),
        RatDto::Str(s) => {
            let s = s.trim();
            if s.ends_with("/0") || s.contains("/-") {
                return Err(Error::model(at, format!("bad rational {s:?}")));
            }
            s.parse::<BigRational>()
                .map_err(|_| Error::model(at, format!("cannot parse rational {s:?}")))
        }
    }
}

fn scalar(s: &ScalarDto, at: &str) -> Result<CycloScalar> {
    match s {
        ScalarDto::Rat(r) => Ok(CycloScalar::rational(rational(r, at)?)),
        ScalarDto::Cyclo(c) => {
            if c.order == 0 {
                return Err(Error::model(format!("{at}/order"), "order must be positive"));
            }
            let coeffs = c
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, r)| rational(r, &format!("{at}/coeffs/{i}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(CycloScalar::from_poly(c.order, coeffs))
        }
    }
}

fn subgroup(ambient: &DualGroup, gens: &[Vec<i64>], at: &str) -> Result<Subgroup> {
    for (i, g) in gens.iter().enumerate() {
        ambient.check_element(g).map_err(|e| e.at(&format!("{at}/{i}")))?;
    }
    Subgroup::canonical(ambient, gens).map_err(|e| e.at(at))
}

fn point(ambient: &DualGroup, coords: &[RatDto], at: &str) -> Result<TorsionPoint> {
    let coords = coords
        .iter()
        .enumerate()
        .map(|(i, r)| rational(r, &format!("{at}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    TorsionPoint::new(ambient, coords).map_err(|e| e.at(at))
}

fn graph(d: GraphDto, at: &str) -> Result<MomentGraph> {
    let ambient = group(d.group, &format!("{at}/group"))?;
    let mut vertices = Vec::new();
    for (i, v) in d.vertices.into_iter().enumerate() {
        let vat = format!("{at}/vertices/{i}");
        let (label, iso) = match v {
            VertexDto::Label(l) => (l, Vec::new()),
            VertexDto::Full(o) => (o.label, o.isotropy),
        };
        if vertices.iter().any(|w: &Vertex| w.label == label) {
            return Err(Error::model(vat, format!("duplicate vertex label {label:?}")));
        }
        let isotropy = subgroup(&ambient, &iso, &format!("{vat}/isotropy"))?;
        vertices.push(Vertex { label, isotropy });
    }
    let index = |l: &str, at: String| {
        vertices
            .iter()
            .position(|v| v.label == l)
            .ok_or_else(|| Error::model(at, format!("unknown vertex {l:?}")))
    };
    let mut edges = Vec::new();
    for (k, e) in d.edges.iter().enumerate() {
        let eat = format!("{at}/edges/{k}");
        let u = index(&e.u, format!("{eat}/u"))?;
        let v = index(&e.v, format!("{eat}/v"))?;
        if u == v {
            return Err(Error::model(eat, "self-loop"));
        }
        check_weight(&ambient, &e.w).map_err(|err| err.at(&format!("{eat}/w")))?;
        edges.push(Edge { u, v, weight: e.w.clone() });
    }
    MomentGraph::new(&ambient, vertices, edges).map_err(|e| e.at(at))
}

fn cover(d: CoverDto, at: &str) -> Result<Cover> {
    let ambient = group(d.group, &format!("{at}/group"))?;
    let collection = d
        .collection
        .iter()
        .enumerate()
        .map(|(i, gens)| subgroup(&ambient, gens, &format!("{at}/collection/{i}")))
        .collect::<Result<Vec<_>>>()?;
    let mut balls = Vec::new();
    for (i, b) in d.balls.iter().enumerate() {
        let bat = format!("{at}/balls/{i}");
        let center = point(&ambient, &b.center, &format!("{bat}/center"))?;
        let radius = rational(&b.radius, &format!("{bat}/radius"))?;
        balls.push(Ball::new(center, radius).map_err(|e| e.at(&format!("{bat}/radius")))?);
    }
    Cover::new(&ambient, balls, collection).map_err(|e| e.at(&format!("{at}/balls")))
}

fn poly(d: &PolyDto, nvars: usize, at: &str) -> Result<Poly<CycloScalar>> {
    let mut p = Poly::zero(nvars);
    for (i, t) in d.terms.iter().enumerate() {
        let tat = format!("{at}/terms/{i}");
        if t.exp.len() != nvars {
            return Err(Error::model(
                format!("{tat}/exp"),
                format!("expected {nvars} exponents, found {}", t.exp.len()),
            ));
        }
        let exp = t
            .exp
            .iter()
            .map(|&e| u32::try_from(e))
            .collect::<std::result::Result<Vec<u32>, _>>()
            .map_err(|_| Error::model(format!("{tat}/exp"), "polynomial exponents must be non-negative"))?;
        p.add_term(exp, scalar(&t.coeff, &format!("{tat}/coeff"))?);
    }
    Ok(p)
}

fn rational_poly(d: &PolyDto, nvars: usize, at: &str) -> Result<Poly<BigRational>> {
    let p = poly(d, nvars, at)?;
    let mut out = Poly::zero(nvars);
    for (e, c) in p.terms() {
        let q = c
            .as_rational()
            .ok_or_else(|| Error::model(at, format!("coefficient {c} is not rational")))?;
        out.add_term(e.clone(), q);
    }
    Ok(out)
}

fn laurent(d: &PolyDto, ambient: &DualGroup, at: &str) -> Result<LaurentElement> {
    let mut out = LaurentElement::zero(ambient);
    for (i, t) in d.terms.iter().enumerate() {
        let tat = format!("{at}/terms/{i}");
        ambient.check_element(&t.exp).map_err(|e| e.at(&format!("{tat}/exp")))?;
        out.add_term(&t.exp, scalar(&t.coeff, &format!("{tat}/coeff"))?);
    }
    Ok(out)
}

fn bundle(d: BundleDto) -> Result<EquivariantBundle> {
    let ambient = group(d.group, "/group")?;
    let mut by_vertex = BTreeMap::new();
    for (label, summands) in &d.summands_by_vertex {
        let vat = format!("/summands_by_vertex/{label}");
        let mut list = Vec::new();
        for (i, s) in summands.iter().enumerate() {
            let sat = format!("{vat}/{i}");
            ambient.check_element(&s.char).map_err(|e| e.at(&format!("{sat}/char")))?;
            let aux = match &s.aux {
                Some(a) => Some(poly(a, ambient.free_rank(), &format!("{sat}/aux"))?),
                None => None,
            };
            list.push(LineSummand {
                character: s.char.clone(),
                aux,
            });
        }
        by_vertex.insert(label.clone(), SplitBundle::new(&ambient, list).map_err(|e| e.at(&vat))?);
    }
    EquivariantBundle::new(&ambient, by_vertex)
}

fn theory(s: &str) -> Result<Theory> {
    match s {
        "K" | "k" => Ok(Theory::K),
        "H" | "h" => Ok(Theory::H),
        other => Err(Error::model("/theory", format!("unknown theory {other:?} (expected \"K\" or \"H\")"))),
    }
}

fn classes(d: ClassesDto) -> Result<ClassSet> {
    let ambient = group(d.group, "/group")?;
    let theory = theory(&d.theory)?;
    let mut out = Vec::new();
    for (i, c) in d.classes.iter().enumerate() {
        let mut entries = BTreeMap::new();
        for (label, p) in c {
            let at = format!("/classes/{i}/{label}");
            let entry = match theory {
                Theory::K => ClassEntry::K(laurent(p, &ambient, &at)?),
                Theory::H => ClassEntry::H(poly(p, ambient.free_rank(), &at)?),
            };
            entries.insert(label.clone(), entry);
        }
        out.push(entries);
    }
    Ok(ClassSet {
        ambient,
        theory,
        classes: out,
    })
}

fn presentation(d: PresentationDto) -> Result<Presentation> {
    let n = d.nvars;
    let structure = d
        .structure
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, col)| {
                    col.iter()
                        .enumerate()
                        .map(|(k, p)| rational_poly(p, n, &format!("/structure/{i}/{j}/{k}")))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let class = d
        .class
        .iter()
        .enumerate()
        .map(|(i, p)| rational_poly(p, n, &format!("/class/{i}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Presentation {
        name: d.name,
        nvars: n,
        structure,
        class,
    })
}

/// A rational from `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let dto = match s.trim().parse::<i64>() {
        Ok(n) => RatDto::Int(n),
        Err(_) => RatDto::Str(s.to_string()),
    };
    rational(&dto, "")
}

/// A point of `C_T` from its coordinates.
pub fn point_from_json(v: &Value, ambient: &DualGroup) -> Result<TorsionPoint> {
    let coords: Vec<RatDto> = from_value(v.clone())?;
    point(ambient, &coords, "")
}

/// A subgroup from a list of generators.
pub fn subgroup_from_json(v: &Value, ambient: &DualGroup) -> Result<Subgroup> {
    let gens: Vec<Vec<i64>> = from_value(v.clone())?;
    subgroup(ambient, &gens, "")
}

/// A polynomial `{"terms": [{"exp", "coeff"}, …]}` in `nvars` variables.
pub fn poly_from_json(v: &Value, nvars: usize) -> Result<Poly<CycloScalar>> {
    poly(&from_value(v.clone())?, nvars, "")
}

/// A Laurent element `{"terms": [{"exp", "coeff"}, …]}` of the group ring.
pub fn laurent_from_json(v: &Value, ambient: &DualGroup) -> Result<LaurentElement> {
    laurent(&from_value(v.clone())?, ambient, "")
}

pub fn group_to_json(g: &DualGroup) -> Value {
    group_json(g)
}

pub fn subgroup_json(m: &Subgroup) -> Value {
    json!(m.generators())
}

/// Parse a document from JSON text.
pub fn parse(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::model("", format!("malformed JSON: {e}")))?;
    from_json(value)
}

/// Validate and convert a JSON value.
pub fn from_json(value: Value) -> Result<Document> {
    let Value::Object(mut obj) = value else {
        return Err(Error::model("", "a document must be a JSON object"));
    };
    match obj.remove("schema") {
        Some(Value::String(s)) if s == SCHEMA => {}
        Some(other) => return Err(Error::model("/schema", format!("unsupported schema {other}, expected {SCHEMA:?}"))),
        None => return Err(Error::model("/schema", format!("missing schema (expected {SCHEMA:?})"))),
    }
    let kind = match obj.remove("kind") {
        Some(Value::String(k)) => k,
        _ => return Err(Error::model("/kind", "missing document kind")),
    };
    let rest = Value::Object(obj);
    Ok(match kind.as_str() {
        "graph" => Document::Graph(graph(from_value(rest)?, "")?),
        "cover" => Document::Cover(cover(from_value(rest)?, "")?),
        "tcw" => {
            let d: TcwDto = from_value(rest)?;
            let ambient = group(d.group, "/group")?;
            let cells = d
                .cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    Ok(Cell {
                        dim: c.dim,
                        isotropy: subgroup(&ambient, &c.isotropy, &format!("/cells/{i}/isotropy"))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Document::Tcw(TCWComplex::new(&ambient, cells)?)
        }
        "fan" => {
            let d: FanDto = from_value(rest)?;
            Document::Fan(Fan::new(d.dim, d.rays, d.max_cones).map_err(|(part, e)| {
                let at = match part {
                    FanPart::Ray(i) => format!("/rays/{i}"),
                    FanPart::Cone(i) => format!("/max_cones/{i}"),
                };
                e.at(&at)
            })?)
        }
        "bundle" => Document::Bundle(bundle(from_value(rest)?)?),
        "model" => {
            let d: ModelDto = from_value(rest)?;
            let g = graph(d.graph, "/graph")?;
            let c = cover(d.cover, "/cover")?;
            Document::Model(SheafModel::new(g, c, d.cutoff).map_err(|e| e.at("/cover/group"))?)
        }
        "presentation" => Document::Presentation(presentation(from_value(rest)?)?),
        "classes" => Document::Classes(classes(from_value(rest)?)?),
        "points" => {
            let d: PointsDto = from_value(rest)?;
            let ambient = group(d.group, "/group")?;
            Document::Points(
                d.points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| point(&ambient, p, &format!("/points/{i}")))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        other => return Err(Error::model("/kind", format!("unknown document kind {other:?}"))),
    })
}

pub fn load(path: impl AsRef<Path>) -> Result<Document> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text)
}

// --------------------------------------------------------------- output

fn group_json(g: &DualGroup) -> Value {
    json!({"free_rank": g.free_rank(), "torsion": g.torsion()})
}

pub fn rational_json(q: &BigRational) -> Value {
    Value::String(q.to_string())
}

pub fn scalar_json(c: &CycloScalar) -> Value {
    let c = c.minimal();
    match c.as_rational() {
        Some(q) => rational_json(&q),
        None => json!({"order": c.order(), "coeffs": c.coeffs().iter().map(rational_json).collect::<Vec<_>>()}),
    }
}

pub fn point_json(p: &TorsionPoint) -> Value {
    Value::Array(p.coords().iter().map(rational_json).collect())
}

fn poly_json<F: crate::algebra::Field>(p: &Poly<F>, coeff: impl Fn(&F) -> Value) -> Value {
    json!({"terms": p.terms().iter().map(|(e, c)| json!({"exp": e, "coeff": coeff(c)})).collect::<Vec<_>>()})
}

pub fn cyclo_poly_json(p: &Poly<CycloScalar>) -> Value {
    poly_json(p, scalar_json)
}

pub fn laurent_json(l: &LaurentElement) -> Value {
    json!({"terms": l.terms().iter().map(|(e, c)| json!({"exp": e, "coeff": scalar_json(c)})).collect::<Vec<_>>()})
}

fn graph_body(g: &MomentGraph) -> Map<String, Value> {
    let zero = Subgroup::zero(g.ambient());
    let vertices: Vec<Value> = g
        .vertices()
        .iter()
        .map(|v| {
            if v.isotropy == zero {
                Value::String(v.label.clone())
            } else {
                json!({"label": v.label, "isotropy": v.isotropy.generators()})
            }
        })
        .collect();
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| json!({"u": g.vertices()[e.u].label, "v": g.vertices()[e.v].label, "w": e.weight}))
        .collect();
    let mut m = Map::new();
    m.insert("group".into(), group_json(g.ambient()));
    m.insert("vertices".into(), Value::Array(vertices));
    m.insert("edges".into(), Value::Array(edges));
    m
}

fn cover_body(c: &Cover) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("group".into(), group_json(c.ambient()));
    m.insert(
        "collection".into(),
        Value::Array(c.collection().iter().map(|s| json!(s.generators())).collect()),
    );
    m.insert(
        "balls".into(),
        Value::Array(
            c.balls()
                .iter()
                .map(|b| json!({"center": point_json(&b.center), "radius": rational_json(&b.radius)}))
                .collect(),
        ),
    );
    m
}

fn body(doc: &Document) -> Map<String, Value> {
    match doc {
        Document::Graph(g) => graph_body(g),
        Document::Cover(c) => cover_body(c),
        Document::Tcw(x) => {
            let mut m = Map::new();
            m.insert("group".into(), group_json(x.ambient()));
            m.insert(
                "cells".into(),
                x.cells()
                    .iter()
                    .map(|c| json!({"dim": c.dim, "isotropy": c.isotropy.generators()}))
                    .collect(),
            );
            m
        }
        Document::Fan(f) => {
            let mut m = Map::new();
            m.insert("dim".into(), json!(f.dim()));
            m.insert("rays".into(), json!(f.rays()));
            m.insert("max_cones".into(), json!(f.max_cones()));
            m
        }
        Document::Bundle(b) => {
            let mut m = Map::new();
            m.insert("group".into(), group_json(b.ambient()));
            let by_vertex: Map<String, Value> = b
                .by_vertex()
                .iter()
                .map(|(l, s)| {
                    let list = s
                        .summands()
                        .iter()
                        .map(|x| match &x.aux {
                            Some(a) => json!({"char": x.character, "aux": cyclo_poly_json(a)}),
                            None => json!({"char": x.character}),
                        })
                        .collect();
                    (l.clone(), Value::Array(list))
                })
                .collect();
            m.insert("summands_by_vertex".into(), Value::Object(by_vertex));
            m
        }
        Document::Model(s) => {
            let mut m = Map::new();
            m.insert("graph".into(), Value::Object(graph_body(s.graph())));
            m.insert("cover".into(), Value::Object(cover_body(s.cover())));
            m.insert("cutoff".into(), json!(s.cutoff()));
            m
        }
        Document::Presentation(p) => {
            let qp = |x: &Poly<BigRational>| poly_json(x, rational_json);
            let mut m = Map::new();
            m.insert("name".into(), json!(p.name));
            m.insert("nvars".into(), json!(p.nvars));
            m.insert(
                "structure".into(),
                p.structure
                    .iter()
                    .map(|r| r.iter().map(|c| c.iter().map(qp).collect::<Vec<_>>()).collect::<Vec<_>>())
                    .collect(),
            );
            m.insert("class".into(), p.class.iter().map(qp).collect());
            m
        }
        Document::Classes(c) => {
            let mut m = Map::new();
            m.insert("group".into(), group_json(&c.ambient));
            m.insert("theory".into(), json!(c.theory.to_string()));
            m.insert(
                "classes".into(),
                c.classes
                    .iter()
                    .map(|cl| {
                        cl.iter()
                            .map(|(l, e)| {
                                let v = match e {
                                    ClassEntry::K(x) => laurent_json(x),
                                    ClassEntry::H(x) => cyclo_poly_json(x),
                                };
                                (l.clone(), v)
                            })
                            .collect::<Map<String, Value>>()
                    })
                    .map(Value::Object)
                    .collect(),
            );
            m
        }
        Document::Points(ps) => {
            let mut m = Map::new();
            let ambient = ps.first().map_or(DualGroup::free(0), |p| p.ambient().clone());
            m.insert("group".into(), group_json(&ambient));
            m.insert("points".into(), ps.iter().map(point_json).collect());
            m
        }
    }
}

/// The normalized JSON form of a document.
pub fn to_json(doc: &Document) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("kind".into(), json!(doc.kind()));
    m.extend(body(doc));
    Value::Object(m)
}

pub fn to_string(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(doc)).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn save(doc: &Document, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_string(doc)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Every built-in example as a named document.
pub fn bundled_documents() -> Vec<(String, Document)> {
    use crate::examples as ex;
    let mut out = vec![
        ("cp1".to_string(), Document::Graph(ex::cp1_graph())),
        ("cp2".to_string(), Document::Graph(ex::cp2_graph())),
        ("fan-cp2".to_string(), Document::Fan(Fan::projective(2))),
        ("fan-p1xp1".to_string(), Document::Fan(Fan::p1_times_p1())),
        ("fan-hirzebruch1".to_string(), Document::Fan(Fan::hirzebruch(1))),
    ];
    for n in 2..=6 {
        let m = ex::orbit_model(n, 0).expect("bundled orbit model");
        out.push((format!("orbit{n}-line"), Document::Bundle(ex::orbit_line(&m, 1).expect("one vertex"))));
        out.push((format!("orbit{n}-model"), Document::Model(m)));
    }
    for (m, l) in [(4, 2), (6, 3), (6, 2)] {
        out.push((
            format!("finite{m}-{l}-model"),
            Document::Model(ex::finite_orbit_model(m, l).expect("bundled finite orbit model")),
        ));
    }
    let cp2 = ex::cp2_model(6).expect("bundled CP2 model");
    out.push(("cp2-hyperplane".into(), Document::Bundle(ex::cp2_hyperplane_bundle(&cp2))));
    out.push(("cp2-model".into(), Document::Model(cp2)));
    out.push(("cp1-model".into(), Document::Model(ex::cp1_model(6).expect("bundled CP1 model"))));
    for p in Presentation::bundled() {
        out.push((format!("presentation-{}", p.name.to_lowercase()), Document::Presentation(p)));
    }
    out
}
