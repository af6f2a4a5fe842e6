//! Moment graphs, GKM divisibility tests and Chang–Skjelbred comparisons.
//!
//! A vertex is normally a fixed point. A vertex may instead carry an
//! isotropy subgroup `H_v` (stored as `M_v`), modeling an orbit `T/H_v`
//! with no edges attached; its cohomology is `S(t*)/(ℓ_m : m ∈ M_v)` and
//! its K-theory `Q(ζ)[T̂/M_v]`.

use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;
use rayon::prelude::*;

use crate::algebra::laurent::euler_coset;
use crate::algebra::linalg;
use crate::algebra::poly::{monomials_of_degree, Exponent};
use crate::algebra::{divide_by_euler, divide_by_linear, CycloScalar, Division, Field, LaurentElement, Poly};
use crate::error::{Error, Result};
use crate::lattice::{DualGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub label: String,
    /// `M_v`; the zero subgroup for a fixed point.
    pub isotropy: Subgroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentGraph {
    ambient: DualGroup,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| num::integer::gcd(g, x))
}

/// Edge weights must have infinite order with primitive free part.
pub fn check_weight(ambient: &DualGroup, w: &[i64]) -> Result<()> {
    ambient.check_element(w)?;
    let free = ambient.free_part(w);
    if free.iter().all(|&x| x == 0) {
        return Err(Error::InvalidGraph(format!("weight {w:?} has finite order")));
    }
    if gcd_all(free) != 1 {
        return Err(Error::InvalidGraph(format!("weight {w:?} is not primitive")));
    }
    Ok(())
}

impl MomentGraph {
    pub fn new(ambient: &DualGroup, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        for (i, v) in vertices.iter().enumerate() {
            if v.isotropy.ambient() != ambient {
                return Err(Error::AmbientMismatch);
            }
            if vertices[..i].iter().any(|w| w.label == v.label) {
                return Err(Error::InvalidGraph(format!("duplicate vertex label {:?}", v.label)));
            }
        }
        for (k, e) in edges.iter().enumerate() {
            if e.u >= vertices.len() || e.v >= vertices.len() {
                return Err(Error::InvalidGraph(format!("edge {k} references a missing vertex")));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("edge {k} is a self-loop")));
            }
            check_weight(ambient, &e.weight).map_err(|err| match err {
                Error::InvalidGraph(m) => Error::InvalidGraph(format!("edge {k}: {m}")),
                other => other,
            })?;
            for end in [e.u, e.v] {
                if vertices[end].isotropy != Subgroup::zero(ambient) {
                    return Err(Error::InvalidGraph(format!(
                        "edge {k} touches {:?}, which is not a fixed point",
                        vertices[end].label
                    )));
                }
            }
        }
        Ok(MomentGraph {
            ambient: ambient.clone(),
            vertices,
            edges: edges
                .into_iter()
                .map(|e| Edge {
                    weight: ambient.reduce(&e.weight),
                    ..e
                })
                .collect(),
        })
    }

    /// Fixed points labeled by `labels` joined by `(u, v, weight)` edges.
    pub fn from_fixed_points(
        ambient: &DualGroup,
        labels: &[&str],
        edges: &[(usize, usize, Vec<i64>)],
    ) -> Result<Self> {
        let vertices = labels
            .iter()
            .map(|l| Vertex {
                label: l.to_string(),
                isotropy: Subgroup::zero(ambient),
            })
            .collect();
        let edges = edges
            .iter()
            .map(|(u, v, w)| Edge { u: *u, v: *v, weight: w.clone() })
            .collect();
        Self::new(ambient, vertices, edges)
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.label == label)
    }

    pub fn nvars(&self) -> usize {
        self.ambient.free_rank()
    }

    /// A copy keeping only the given vertices (re-indexed) and the edges
    /// satisfying `keep_edge` between kept vertices.
    pub fn subgraph(&self, keep_vertex: impl Fn(&Vertex) -> bool, keep_edge: impl Fn(&Edge) -> bool) -> MomentGraph {
        let mut index = vec![None; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep_vertex(v) {
                index[i] = Some(vertices.len());
                vertices.push(v.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep_edge(e))
            .filter_map(|e| {
                Some(Edge {
                    u: index[e.u]?,
                    v: index[e.v]?,
                    weight: e.weight.clone(),
                })
            })
            .collect();
        MomentGraph {
            ambient: self.ambient.clone(),
            vertices,
            edges,
        }
    }

    pub fn vertex_chart(&self, v: usize) -> VertexChart {
        VertexChart::new(&self.ambient, &self.vertices[v].isotropy)
    }
}

impl fmt::Display for MomentGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "moment graph over {}", self.ambient)?;
        for v in &self.vertices {
            if v.isotropy == Subgroup::zero(&self.ambient) {
                writeln!(f, "  vertex {}", v.label)?;
            } else {
                writeln!(f, "  vertex {} (isotropy annihilator {})", v.label, v.isotropy)?;
            }
        }
        for e in &self.edges {
            writeln!(
                f,
                "  edge {} -- {} weight {:?}",
                self.vertices[e.u].label, self.vertices[e.v].label, e.weight
            )?;
        }
        Ok(())
    }
}

/// Normal forms at one vertex: polynomials modulo the linear forms of
/// `M_v`, and group-ring exponents modulo `M_v`.
#[derive(Debug, Clone)]
pub struct VertexChart {
    isotropy: Subgroup,
    nvars: usize,
    pivots: Vec<usize>,
    /// `u_i ↦` its normal form, for every variable.
    images: Vec<Poly<CycloScalar>>,
}

impl VertexChart {
    pub fn new(ambient: &DualGroup, isotropy: &Subgroup) -> Self {
        let p = ambient.free_rank();
        let mut rows: Vec<Vec<BigRational>> = isotropy
            .basis()
            .iter()
            .map(|r| r[..p].iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        let pivots = linalg::rref(&mut rows, p);
        let images = (0..p)
            .map(|i| match pivots.iter().position(|&c| c == i) {
                Some(r) => {
                    let mut img = Poly::zero(p);
                    for j in (0..p).filter(|j| !pivots.contains(j)) {
                        let mut e = vec![0; p];
                        e[j] = 1;
                        img.add_term(e, CycloScalar::rational(-rows[r][j].clone()));
                    }
                    img
                }
                None => Poly::var(p, i),
            })
            .collect();
        VertexChart {
            isotropy: isotropy.clone(),
            nvars: p,
            pivots,
            images,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn normalize_poly(&self, f: &Poly<CycloScalar>) -> Poly<CycloScalar> {
        if self.pivots.is_empty() || self.nvars == 0 {
            return f.clone();
        }
        f.substitute(&self.images, None)
    }

    pub fn normalize_laurent(&self, f: &LaurentElement) -> LaurentElement {
        let mut out = LaurentElement::zero(f.ambient());
        for (g, c) in f.terms() {
            out.add_term(&self.isotropy.reduce_mod(g), c.clone());
        }
        out
    }

    /// Monomials of degree `d` in the surviving variables.
    pub fn monomials(&self, d: u32) -> Vec<Exponent> {
        monomials_of_degree(self.nvars, d)
            .into_iter()
            .filter(|e| self.pivots.iter().all(|&c| e[c] == 0))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theory {
    K,
    H,
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::K => "K",
            Theory::H => "H",
        })
    }
}

/// A vertex-indexed tuple (in the graph's vertex order).
#[derive(Debug, Clone, PartialEq)]
pub enum Class {
    K(Vec<LaurentElement>),
    H(Vec<Poly<CycloScalar>>),
}

impl Class {
    pub fn theory(&self) -> Theory {
        match self {
            Class::K(_) => Theory::K,
            Class::H(_) => Theory::H,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Class::K(v) => v.len(),
            Class::H(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry_string(&self, v: usize) -> String {
        match self {
            Class::K(c) => c[v].to_string(),
            Class::H(c) => c[v].to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCheck {
    pub edge: usize,
    pub divisible: bool,
    /// The quotient when divisible, otherwise the obstruction.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub edges: Vec<EdgeCheck>,
}

impl ClassReport {
    pub fn passes(&self) -> bool {
        self.edges.iter().all(|e| e.divisible)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EdgeCheck> {
        self.edges.iter().filter(|e| !e.divisible)
    }
}

/// GKM test: every edge difference must be divisible by the edge's Euler
/// class (`1 − z^w` in K-theory, `ℓ_w` in cohomology).
pub fn check_class(g: &MomentGraph, c: &Class) -> Result<ClassReport> {
    if c.len() != g.vertices.len() {
        return Err(Error::Dimension {
            expected: g.vertices.len(),
            found: c.len(),
        });
    }
    let mut edges = Vec::with_capacity(g.edges.len());
    for (k, e) in g.edges.iter().enumerate() {
        let (divisible, detail) = match c {
            Class::K(v) => {
                if v[e.u].ambient() != &g.ambient || v[e.v].ambient() != &g.ambient {
                    return Err(Error::AmbientMismatch);
                }
                match divide_by_euler(&v[e.u].sub(&v[e.v]), &e.weight)? {
                    Division::Quotient(q) => (true, q.to_string()),
                    Division::NotDivisible(w) => (false, w.to_string()),
                }
            }
            Class::H(v) => {
                let diff = v[e.u].sub(&v[e.v]);
                match divide_by_linear(&diff, g.ambient.free_part(&e.weight))? {
                    Division::Quotient(q) => (true, q.to_string()),
                    Division::NotDivisible(w) => (false, w.to_string()),
                }
            }
        };
        edges.push(EdgeCheck { edge: k, divisible, detail });
    }
    Ok(ClassReport { edges })
}

/// Coordinates for vertex tuples in one degree (H) or one window (K).
#[derive(Debug, Clone)]
pub struct Layout {
    theory: Theory,
    ambient: DualGroup,
    /// per vertex: monomial exponents (H) or group elements (K)
    keys: Vec<Vec<Vec<i64>>>,
    charts: Vec<VertexChart>,
    offsets: Vec<usize>,
    len: usize,
}

/// Group elements with free part in `[−w, w]^p` and any torsion part.
pub fn window_elements(ambient: &DualGroup, w: i64) -> Vec<Vec<i64>> {
    let ranges: Vec<(i64, i64)> = (0..ambient.dim())
        .map(|i| match ambient.generator_order(i) {
            Some(m) => (0, m - 1),
            None => (-w, w),
        })
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|r| r.0 > r.1) {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = ranges.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < ranges[i].1 {
                cur[i] += 1;
                for j in i + 1..ranges.len() {
                    cur[j] = ranges[j].0;
                }
                break;
            }
        }
    }
}

impl Layout {
    /// Homogeneous degree-`d` polynomials at every vertex.
    pub fn cohomology(g: &MomentGraph, d: u32) -> Self {
        let charts: Vec<VertexChart> = (0..g.vertices.len()).map(|v| g.vertex_chart(v)).collect();
        let keys = charts
            .iter()
            .map(|c| {
                c.monomials(d)
                    .into_iter()
                    .map(|e| e.into_iter().map(i64::from).collect())
                    .collect()
            })
            .collect();
        Self::assemble(Theory::H, g, keys, charts)
    }

    /// Group-ring elements supported in the window at every vertex.
    pub fn k_theory(g: &MomentGraph, window: i64) -> Self {
        let charts: Vec<VertexChart> = (0..g.vertices.len()).map(|v| g.vertex_chart(v)).collect();
        let all = window_elements(&g.ambient, window);
        let keys = charts
            .iter()
            .map(|c| {
                let mut ks: Vec<Vec<i64>> = all.iter().map(|x| c.isotropy.reduce_mod(x)).collect();
                ks.sort();
                ks.dedup();
                ks
            })
            .collect();
        Self::assemble(Theory::K, g, keys, charts)
    }

    fn assemble(theory: Theory, g: &MomentGraph, keys: Vec<Vec<Vec<i64>>>, charts: Vec<VertexChart>) -> Self {
        let mut offsets = Vec::with_capacity(keys.len());
        let mut len = 0;
        for k in &keys {
            offsets.push(len);
            len += k.len();
        }
        Layout {
            theory,
            ambient: g.ambient.clone(),
            keys,
            charts,
            offsets,
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn block_len(&self, v: usize) -> usize {
        self.keys[v].len()
    }

    pub fn chart(&self, v: usize) -> &VertexChart {
        &self.charts[v]
    }

    /// Coordinates of a class, or `None` if (after normalization) some entry
    /// leaves the layout (wrong degree or outside the window).
    pub fn vector(&self, c: &Class) -> Option<Vec<CycloScalar>> {
        let mut out = vec![CycloScalar::int(0); self.len];
        for v in 0..self.keys.len() {
            let entries: Vec<(Vec<i64>, CycloScalar)> = match (c, self.theory) {
                (Class::H(x), Theory::H) => self.charts[v]
                    .normalize_poly(&x[v])
                    .terms()
                    .iter()
                    .map(|(e, c)| (e.iter().map(|&k| i64::from(k)).collect(), c.clone()))
                    .collect(),
                (Class::K(x), Theory::K) => self.charts[v]
                    .normalize_laurent(&x[v])
                    .terms()
                    .iter()
                    .map(|(g, c)| (g.clone(), c.clone()))
                    .collect(),
                _ => return None,
            };
            for (key, c) in entries {
                let i = self.keys[v].iter().position(|k| *k == key)?;
                out[self.offsets[v] + i] = c;
            }
        }
        Some(out)
    }

    pub fn class<F: Field>(&self, x: &[F], to_cyclo: impl Fn(&F) -> CycloScalar) -> Class {
        let p = self.ambient.free_rank();
        match self.theory {
            Theory::H => Class::H(
                (0..self.keys.len())
                    .map(|v| {
                        let mut poly = Poly::zero(p);
                        for (i, k) in self.keys[v].iter().enumerate() {
                            let e: Exponent = k.iter().map(|&x| x as u32).collect();
                            poly.add_term(e, to_cyclo(&x[self.offsets[v] + i]));
                        }
                        poly
                    })
                    .collect(),
            ),
            Theory::K => Class::K(
                (0..self.keys.len())
                    .map(|v| {
                        let mut l = LaurentElement::zero(&self.ambient);
                        for (i, k) in self.keys[v].iter().enumerate() {
                            l.add_term(k, to_cyclo(&x[self.offsets[v] + i]));
                        }
                        l
                    })
                    .collect(),
            ),
        }
    }

    /// Rows expressing "the difference between the `u`-block at `off_u`
    /// and the `v`-block at `off_v` is divisible by the Euler class of
    /// `weight`" on vectors of length `ncols`.
    fn edge_rows(
        &self,
        u: usize,
        v: usize,
        weight: &[i64],
        off_u: usize,
        off_v: usize,
        ncols: usize,
    ) -> Vec<Vec<BigRational>> {
        let mut rows: BTreeMap<Vec<i64>, Vec<BigRational>> = BTreeMap::new();
        let zero = || vec![BigRational::from_integer(0.into()); ncols];
        match self.theory {
            Theory::H => {
                let l = self.ambient.free_part(weight).to_vec();
                for (vert, off, sign) in [(u, off_u, 1i64), (v, off_v, -1)] {
                    for (i, k) in self.keys[vert].iter().enumerate() {
                        let e: Exponent = k.iter().map(|&x| x as u32).collect();
                        let m = Poly::<BigRational>::monomial(l.len(), e, BigRational::from_integer(sign.into()));
                        for (te, c) in m.restrict_to_kernel(&l).terms() {
                            let key: Vec<i64> = te.iter().map(|&x| i64::from(x)).collect();
                            rows.entry(key).or_insert_with(zero)[off + i] += c;
                        }
                    }
                }
            }
            Theory::K => {
                for (vert, off, sign) in [(u, off_u, 1i64), (v, off_v, -1)] {
                    for (i, k) in self.keys[vert].iter().enumerate() {
                        let (rep, _) = euler_coset(&self.ambient, k, weight);
                        rows.entry(rep).or_insert_with(zero)[off + i] += BigRational::from_integer(sign.into());
                    }
                }
            }
        }
        rows.into_values().collect()
    }

    /// All GKM constraints of `g` on this layout.
    pub fn gkm_rows(&self, g: &MomentGraph) -> Vec<Vec<BigRational>> {
        g.edges
            .iter()
            .flat_map(|e| self.edge_rows(e.u, e.v, &e.weight, self.offsets[e.u], self.offsets[e.v], self.len))
            .collect()
    }
}

/// Basis of the GKM space in one layout (the model of the image of
/// `j*`), in RREF-determined deterministic order.
pub fn gkm_space(g: &MomentGraph, layout: &Layout) -> Vec<Vec<BigRational>> {
    linalg::nullspace(&layout.gkm_rows(g), layout.len())
}

fn to_cyclo(x: &BigRational) -> CycloScalar {
    CycloScalar::rational(x.clone())
}

/// Basis of GKM classes in degree `param` (H) or window `param` (K).
pub fn image_basis(g: &MomentGraph, theory: Theory, param: u32) -> Result<Vec<Class>> {
    let layout = match theory {
        Theory::H => Layout::cohomology(g, param),
        Theory::K => {
            let l = Layout::k_theory(g, i64::from(param));
            if l.is_empty() {
                return Err(Error::Precondition("empty exponent window".into()));
            }
            l
        }
    };
    Ok(gkm_space(g, &layout)
        .iter()
        .map(|x| layout.class(x, to_cyclo))
        .collect())
}

/// Dimensions of the GKM space in degrees `0..=max_degree`.
pub fn gkm_dimensions(g: &MomentGraph, max_degree: u32) -> Vec<usize> {
    (0..=max_degree)
        .into_par_iter()
        .map(|d| gkm_space(g, &Layout::cohomology(g, d)).len())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsRow {
    /// Degree (H) or window size (K).
    pub param: u32,
    pub span_dim: usize,
    pub gkm_dim: usize,
    pub span_in_gkm: bool,
    pub gkm_in_span: bool,
}

impl CsRow {
    pub fn equal(&self) -> bool {
        self.span_in_gkm && self.gkm_in_span
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsReport {
    pub theory: Theory,
    pub rows: Vec<CsRow>,
}

impl CsReport {
    pub fn equal(&self) -> bool {
        self.rows.iter().all(CsRow::equal)
    }

    pub fn first_difference(&self) -> Option<&CsRow> {
        self.rows.iter().find(|r| !r.equal())
    }
}

/// Span of `coefficient-ring element × generator` inside the layout.
fn module_span(g: &MomentGraph, gens: &[Class], layout: &Layout, theory: Theory, param: u32) -> Vec<Vec<CycloScalar>> {
    let p = g.nvars();
    let mut vectors = Vec::new();
    match theory {
        Theory::H => {
            for gen in gens {
                let Class::H(entries) = gen else { continue };
                for k in 0..=param {
                    for m in monomials_of_degree(p, k) {
                        let mono = Poly::monomial(p, m, CycloScalar::int(1));
                        let prod = Class::H(entries.iter().map(|x| x.mul(&mono).homogeneous_part(param)).collect());
                        if let Some(v) = layout.vector(&prod) {
                            vectors.push(v);
                        }
                    }
                }
            }
        }
        Theory::K => {
            let w = i64::from(param);
            for gen in gens {
                let Class::K(entries) = gen else { continue };
                let reach = w + entries.iter().map(LaurentElement::max_free_exponent).max().unwrap_or(0);
                for e in window_elements(&g.ambient, reach) {
                    let prod = Class::K(entries.iter().map(|x| x.shift(&e)).collect());
                    let fits = match &prod {
                        Class::K(xs) => xs.iter().all(|x| {
                            x.terms().keys().all(|k| g.ambient.free_part(k).iter().all(|c| c.abs() <= w))
                        }),
                        Class::H(_) => false,
                    };
                    if fits {
                        if let Some(v) = layout.vector(&prod) {
                            vectors.push(v);
                        }
                    }
                }
            }
        }
    }
    vectors
}

/// Compare the module spanned by `generators` (the model of the image of
/// `i*`) with the GKM space (the model of the image of `j*`), per degree
/// `0..=param` (H) or in the window `param` (K).
pub fn cs_compare(g: &MomentGraph, generators: &[Class], theory: Theory, param: u32) -> Result<CsReport> {
    for (i, gen) in generators.iter().enumerate() {
        if gen.theory() != theory {
            return Err(Error::Precondition(format!("generator {i} is a {} class", gen.theory())));
        }
        let report = check_class(g, gen)?;
        if !report.passes() {
            return Err(Error::Precondition(format!(
                "generator {i} is not a GKM class (edge {} fails)",
                report.failures().next().expect("a failure").edge
            )));
        }
    }
    let params: Vec<u32> = match theory {
        Theory::H => (0..=param).collect(),
        Theory::K => vec![param],
    };
    let rows = params
        .par_iter()
        .map(|&d| {
            let layout = match theory {
                Theory::H => Layout::cohomology(g, d),
                Theory::K => Layout::k_theory(g, i64::from(d)),
            };
            let n = layout.len();
            let span = linalg::span_basis(&module_span(g, generators, &layout, theory, d), n);
            let gkm: Vec<Vec<CycloScalar>> = gkm_space(g, &layout)
                .iter()
                .map(|v| v.iter().map(to_cyclo).collect())
                .collect();
            CsRow {
                param: d,
                span_dim: span.len(),
                gkm_dim: gkm.len(),
                span_in_gkm: linalg::span_contains(&gkm, &span, n),
                gkm_in_span: linalg::span_contains(&span, &gkm, n),
            }
        })
        .collect();
    Ok(CsReport { theory, rows })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingReport {
    pub param: u32,
    /// Dimension of the edgewise model of the 1-skeleton.
    pub edgewise_dim: usize,
    /// Dimension of its image at the fixed points.
    pub image_dim: usize,
    pub gkm_dim: usize,
    pub image_equals_gkm: bool,
}

/// Build the 1-skeleton edge by edge (each edge its own sphere with a
/// GKM pair), match at shared fixed points, and compare the image at the
/// fixed points with the GKM space. Odd-degree kernel content is not
/// represented.
pub fn splitting_dimension_check(g: &MomentGraph, theory: Theory, param: u32) -> Result<SplittingReport> {
    let layout = match theory {
        Theory::H => Layout::cohomology(g, param),
        Theory::K => Layout::k_theory(g, i64::from(param)),
    };
    let nv = layout.len();
    // unknowns: vertex blocks, then a (u, v) pair of blocks per edge
    let mut edge_offsets = Vec::new();
    let mut total = nv;
    for e in &g.edges {
        edge_offsets.push((total, total + layout.block_len(e.u)));
        total += layout.block_len(e.u) + layout.block_len(e.v);
    }
    let q = |n: i64| BigRational::from_integer(n.into());
    let mut rows = Vec::new();
    for (e, &(ou, ov)) in g.edges.iter().zip(&edge_offsets) {
        rows.extend(layout.edge_rows(e.u, e.v, &e.weight, ou, ov, total));
        for (vert, off) in [(e.u, ou), (e.v, ov)] {
            for i in 0..layout.block_len(vert) {
                let mut row = vec![q(0); total];
                row[off + i] = q(1);
                row[layout.offsets[vert] + i] = q(-1);
                rows.push(row);
            }
        }
    }
    let edgewise = linalg::nullspace(&rows, total);
    let image: Vec<Vec<BigRational>> = edgewise.iter().map(|x| x[..nv].to_vec()).collect();
    let image_basis = linalg::span_basis(&image, nv);
    let gkm = gkm_space(g, &layout);
    Ok(SplittingReport {
        param,
        edgewise_dim: edgewise.len(),
        image_dim: image_basis.len(),
        gkm_dim: gkm.len(),
        image_equals_gkm: image_basis.len() == gkm.len() && linalg::span_contains(&gkm, &image_basis, nv),
    })
}

/// Moment graph of a product: vertices are pairs, edges are
/// `edge × vertex` and `vertex × edge` with the factor weights.
pub fn product_graph(g1: &MomentGraph, g2: &MomentGraph) -> MomentGraph {
    let ambient = g1.ambient.direct_sum(&g2.ambient);
    let z1 = g1.ambient.zero();
    let z2 = g2.ambient.zero();
    let n2 = g2.vertices.len();
    let mut vertices = Vec::new();
    for a in &g1.vertices {
        for b in &g2.vertices {
            let mut gens: Vec<Vec<i64>> = a
                .isotropy
                .generators()
                .iter()
                .map(|x| g1.ambient.direct_sum_element(&g2.ambient, x, &z2))
                .collect();
            gens.extend(
                b.isotropy
                    .generators()
                    .iter()
                    .map(|y| g1.ambient.direct_sum_element(&g2.ambient, &z1, y)),
            );
            vertices.push(Vertex {
                label: format!("({},{})", a.label, b.label),
                isotropy: Subgroup::canonical(&ambient, &gens).expect("embedded generators"),
            });
        }
    }
    let mut edges = Vec::new();
    for e in &g1.edges {
        for j in 0..n2 {
            edges.push(Edge {
                u: e.u * n2 + j,
                v: e.v * n2 + j,
                weight: g1.ambient.direct_sum_element(&g2.ambient, &e.weight, &z2),
            });
        }
    }
    for i in 0..g1.vertices.len() {
        for e in &g2.edges {
            edges.push(Edge {
                u: i * n2 + e.u,
                v: i * n2 + e.v,
                weight: g1.ambient.direct_sum_element(&g2.ambient, &z1, &e.weight),
            });
        }
    }
    MomentGraph::new(&ambient, vertices, edges).expect("product of valid graphs is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cp1() -> MomentGraph {
        MomentGraph::from_fixed_points(&DualGroup::free(1), &["N", "S"], &[(0, 1, vec![1])]).unwrap()
    }

    pub(crate) fn cp2() -> MomentGraph {
        MomentGraph::from_fixed_points(
            &DualGroup::free(2),
            &["p1", "p2", "p3"],
            &[(0, 1, vec![1, 0]), (0, 2, vec![0, 1]), (1, 2, vec![1, -1])],
        )
        .unwrap()
    }

    fn k(g: &DualGroup, entries: &[&[(i64, i64)]]) -> Class {
        Class::K(
            entries
                .iter()
                .map(|terms| {
                    LaurentElement::from_terms(g, terms.iter().map(|&(e, c)| (vec![e], CycloScalar::int(c)))).unwrap()
                })
                .collect(),
        )
    }

    fn hclass(entries: &[Vec<i64>]) -> Class {
        Class::H(entries.iter().map(|l| Poly::linear_form(l)).collect())
    }

    #[test]
    fn graph_validation() {
        let g = DualGroup::free(1);
        assert!(MomentGraph::from_fixed_points(&g, &["a", "b"], &[(0, 1, vec![0])]).is_err());
        assert!(MomentGraph::from_fixed_points(&g, &["a", "b"], &[(0, 1, vec![2])]).is_err());
        assert!(MomentGraph::from_fixed_points(&g, &["a", "a"], &[]).is_err());
        assert!(MomentGraph::from_fixed_points(&g, &["a"], &[(0, 0, vec![1])]).is_err());
    }

    #[test]
    fn k_theory_checks() {
        let g = cp1();
        let amb = g.ambient().clone();
        let good = k(&amb, &[&[(0, 1)], &[(1, 1)]]);
        let r = check_class(&g, &good).unwrap();
        assert!(r.passes());
        assert_eq!(r.edges[0].detail, "1");
        let bad = k(&amb, &[&[(0, 1)], &[(0, 2)]]);
        let r = check_class(&g, &bad).unwrap();
        assert!(!r.passes());
        assert_eq!(r.edges[0].detail, "-1");
    }

    #[test]
    fn cohomology_checks() {
        let g = cp2();
        let x = hclass(&[vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert!(check_class(&g, &x).unwrap().passes());
        let y = hclass(&[vec![0, 0], vec![0, 1], vec![0, 1]]);
        assert!(!check_class(&g, &y).unwrap().passes());
    }

    #[test]
    fn orientation_is_irrelevant() {
        let amb = DualGroup::free(1);
        let flipped = MomentGraph::from_fixed_points(&amb, &["N", "S"], &[(0, 1, vec![-1])]).unwrap();
        for c in [k(&amb, &[&[(0, 1)], &[(1, 1)]]), k(&amb, &[&[(0, 1)], &[(0, 2)]]), k(&amb, &[&[(2, 3)], &[(-1, 3)]])] {
            assert_eq!(check_class(&cp1(), &c).unwrap().passes(), check_class(&flipped, &c).unwrap().passes());
        }
    }

    #[test]
    fn dimensions_of_gkm_spaces() {
        assert_eq!(gkm_dimensions(&cp1(), 3), vec![1, 2, 2, 2]);
        // free module with generators in degrees 0, 1, 2 over Q[u1, u2]
        let hilbert: Vec<usize> = (0..4usize).map(|d| (0..=2.min(d)).map(|k| d - k + 1).sum()).collect();
        assert_eq!(hilbert, vec![1, 3, 6, 9]);
        assert_eq!(gkm_dimensions(&cp2(), 3), hilbert);
        let pt = MomentGraph::from_fixed_points(&DualGroup::free(2), &["o"], &[]).unwrap();
        assert_eq!(gkm_dimensions(&pt, 3), vec![1, 2, 3, 4]);
        assert_eq!(image_basis(&pt, Theory::K, 1).unwrap().len(), 9);
    }

    #[test]
    fn basis_elements_are_gkm() {
        for c in image_basis(&cp2(), Theory::H, 2).unwrap() {
            assert!(check_class(&cp2(), &c).unwrap().passes());
        }
        let basis = image_basis(&cp1(), Theory::K, 2).unwrap();
        assert_eq!(basis.len(), 9);
        for c in basis {
            assert!(check_class(&cp1(), &c).unwrap().passes());
        }
    }

    #[test]
    fn chang_skjelbred_cp2() {
        let g = cp2();
        let one = Class::H(vec![Poly::one(2); 3]);
        let x: Vec<Poly<CycloScalar>> = [vec![0, 0], vec![1, 0], vec![0, 1]].iter().map(|l| Poly::linear_form(l)).collect();
        let x2: Vec<Poly<CycloScalar>> = x.iter().map(|p| p.mul(p)).collect();
        let gens = vec![one.clone(), Class::H(x.clone()), Class::H(x2)];
        let r = cs_compare(&g, &gens, Theory::H, 4).unwrap();
        assert!(r.equal(), "{r:?}");
        let dims: Vec<usize> = r.rows.iter().map(|row| row.gkm_dim).collect();
        assert_eq!(dims, vec![1, 3, 6, 9, 12]);

        let r = cs_compare(&g, &[one, Class::H(x)], Theory::H, 4).unwrap();
        let diff = r.first_difference().unwrap();
        assert_eq!((diff.param, diff.span_dim, diff.gkm_dim), (2, 5, 6));
        assert!(diff.span_in_gkm && !diff.gkm_in_span);
    }

    #[test]
    fn chang_skjelbred_cp1_k_theory() {
        let g = cp1();
        let amb = g.ambient().clone();
        let gens = vec![k(&amb, &[&[(0, 1)], &[(0, 1)]]), k(&amb, &[&[(0, 1)], &[(1, 1)]])];
        let r = cs_compare(&g, &gens, Theory::K, 3).unwrap();
        assert!(r.equal());
        assert_eq!(r.rows[0].gkm_dim, 13);
        assert!(cs_compare(&g, &[k(&amb, &[&[(0, 1)], &[(0, 2)]])], Theory::K, 3).is_err());
    }

    #[test]
    fn splitting() {
        for d in 0..=4 {
            let r = splitting_dimension_check(&cp2(), Theory::H, d).unwrap();
            assert!(r.image_equals_gkm);
            assert_eq!(r.edgewise_dim, r.gkm_dim);
        }
        let r = splitting_dimension_check(&cp1(), Theory::H, 2).unwrap();
        assert_eq!(r.gkm_dim, 2);
        let two = MomentGraph::from_fixed_points(
            &DualGroup::free(1),
            &["a", "b", "c", "d"],
            &[(0, 1, vec![1]), (2, 3, vec![1])],
        )
        .unwrap();
        let r = splitting_dimension_check(&two, Theory::H, 1).unwrap();
        assert_eq!(r.gkm_dim, 4);
        assert!(r.image_equals_gkm);
        assert!(splitting_dimension_check(&cp1(), Theory::K, 2).unwrap().image_equals_gkm);
    }

    #[test]
    fn products() {
        let p = product_graph(&cp1(), &cp1());
        assert_eq!((p.vertices().len(), p.edges().len()), (4, 4));
        let dims = gkm_dimensions(&p, 2);
        let f = gkm_dimensions(&cp1(), 2);
        let conv: Vec<usize> = (0..=2).map(|d| (0..=d).map(|k| f[k] * f[d - k]).sum()).collect();
        assert_eq!(dims, conv);
        assert_eq!(dims, vec![1, 4, 8]);

        let pt = MomentGraph::from_fixed_points(&DualGroup::free(0), &["o"], &[]).unwrap();
        let gp = product_graph(&cp2(), &pt);
        assert_eq!(gkm_dimensions(&gp, 3), gkm_dimensions(&cp2(), 3));
        assert_eq!(product_graph(&pt, &pt).vertices().len(), 1);
    }

    #[test]
    fn isotropic_vertex_normal_forms() {
        let amb = DualGroup::free(1);
        let m = Subgroup::canonical(&amb, &[vec![3]]).unwrap();
        let g = MomentGraph::new(&amb, vec![Vertex { label: "o".into(), isotropy: m }], vec![]).unwrap();
        // H^*_T(S^1/Z_3) = Q in degree 0 only
        assert_eq!(gkm_dimensions(&g, 2), vec![1, 0, 0]);
        // K_T(S^1/Z_3) = Q[z]/(z^3 - 1)
        assert_eq!(image_basis(&g, Theory::K, 3).unwrap().len(), 3);
    }
}
