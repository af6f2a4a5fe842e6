//! Equivariant Chern characters of split bundles, the twisted germs
//! `CH_T(E)_α`, and the domination certificate for `e^c`.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, Signed};
use rayon::prelude::*;

use crate::algebra::poly::exp_poly;
use crate::algebra::{CycloScalar, Germ, GradedJet, Poly};
use crate::error::{Error, Result};
use crate::gkm::MomentGraph;
use crate::lattice::{annihilator_of_point, DualGroup, TorsionPoint};
use crate::sheaf::fixed_subgraph;

/// A line `V_λ`, optionally twisted by a non-equivariant first Chern class
/// (a linear form added to the exponent).
#[derive(Debug, Clone, PartialEq)]
pub struct LineSummand {
    pub character: Vec<i64>,
    pub aux: Option<Poly<CycloScalar>>,
}

impl LineSummand {
    pub fn new(character: Vec<i64>) -> Self {
        LineSummand { character, aux: None }
    }
}

/// A sum of line summands over one fixed component.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitBundle {
    ambient: DualGroup,
    summands: Vec<LineSummand>,
}

impl SplitBundle {
    pub fn new(ambient: &DualGroup, summands: Vec<LineSummand>) -> Result<Self> {
        for s in &summands {
            ambient.check_element(&s.character)?;
            if let Some(aux) = &s.aux {
                if aux.nvars() != ambient.free_rank() {
                    return Err(Error::Dimension {
                        expected: ambient.free_rank(),
                        found: aux.nvars(),
                    });
                }
                if aux.degree().is_some_and(|d| d > 1) {
                    return Err(Error::Precondition(format!("auxiliary class {aux} is not linear")));
                }
            }
        }
        Ok(SplitBundle {
            ambient: ambient.clone(),
            summands: summands
                .into_iter()
                .map(|s| LineSummand {
                    character: ambient.reduce(&s.character),
                    ..s
                })
                .collect(),
        })
    }

    pub fn trivial(ambient: &DualGroup, rank: usize) -> Self {
        SplitBundle {
            ambient: ambient.clone(),
            summands: vec![LineSummand::new(ambient.zero()); rank],
        }
    }

    pub fn line(ambient: &DualGroup, character: &[i64]) -> Result<Self> {
        Self::new(ambient, vec![LineSummand::new(character.to_vec())])
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    pub fn summands(&self) -> &[LineSummand] {
        &self.summands
    }

    pub fn rank(&self) -> usize {
        self.summands.len()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        SplitBundle {
            ambient: self.ambient.clone(),
            summands,
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut summands = Vec::new();
        for a in &self.summands {
            for b in &other.summands {
                let aux = match (&a.aux, &b.aux) {
                    (None, None) => None,
                    (Some(x), None) | (None, Some(x)) => Some(x.clone()),
                    (Some(x), Some(y)) => Some(x.add(y)),
                };
                summands.push(LineSummand {
                    character: self.ambient.add(&a.character, &b.character),
                    aux,
                });
            }
        }
        SplitBundle {
            ambient: self.ambient.clone(),
            summands,
        }
    }

    /// `Σ_j e^{ℓ_{λ_j}}·exp(aux_j)`, with each auxiliary exponential expanded
    /// to the cutoff.
    pub fn germ(&self, cutoff: u32) -> Germ {
        let mut g = Germ::zero(&self.ambient);
        for s in &self.summands {
            g = g.add(&summand_germ(&self.ambient, s, cutoff, &CycloScalar::int(1)));
        }
        g
    }
}

fn summand_germ(ambient: &DualGroup, s: &LineSummand, cutoff: u32, scale: &CycloScalar) -> Germ {
    let p = ambient.free_rank();
    let factor = match &s.aux {
        Some(aux) => exp_poly(aux, cutoff).expect("linear auxiliary class"),
        None => Poly::one(p),
    };
    let mut g = Germ::zero(ambient);
    g.add_term(&s.character, factor.scale(scale));
    g
}

/// A bundle given by its split restrictions to the vertices of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivariantBundle {
    ambient: DualGroup,
    by_vertex: BTreeMap<String, SplitBundle>,
}

impl EquivariantBundle {
    pub fn new(ambient: &DualGroup, by_vertex: BTreeMap<String, SplitBundle>) -> Result<Self> {
        if by_vertex.values().any(|b| b.ambient() != ambient) {
            return Err(Error::AmbientMismatch);
        }
        Ok(EquivariantBundle {
            ambient: ambient.clone(),
            by_vertex,
        })
    }

    /// The same split bundle at every vertex.
    pub fn constant(graph: &MomentGraph, fiber: &SplitBundle) -> Self {
        EquivariantBundle {
            ambient: graph.ambient().clone(),
            by_vertex: graph
                .vertices()
                .iter()
                .map(|v| (v.label.clone(), fiber.clone()))
                .collect(),
        }
    }

    /// A line bundle with the given character at each vertex.
    pub fn line(graph: &MomentGraph, characters: &[Vec<i64>]) -> Result<Self> {
        if characters.len() != graph.vertices().len() {
            return Err(Error::Dimension {
                expected: graph.vertices().len(),
                found: characters.len(),
            });
        }
        let mut by_vertex = BTreeMap::new();
        for (v, c) in graph.vertices().iter().zip(characters) {
            by_vertex.insert(v.label.clone(), SplitBundle::line(graph.ambient(), c)?);
        }
        Self::new(graph.ambient(), by_vertex)
    }

    pub fn ambient(&self) -> &DualGroup {
        &self.ambient
    }

    pub fn by_vertex(&self) -> &BTreeMap<String, SplitBundle> {
        &self.by_vertex
    }

    pub fn at(&self, label: &str) -> Option<&SplitBundle> {
        self.by_vertex.get(label)
    }

    /// Checks that the bundle is defined on exactly the vertices of `graph`.
    pub fn check_base(&self, graph: &MomentGraph) -> Result<()> {
        if graph.ambient() != &self.ambient {
            return Err(Error::AmbientMismatch);
        }
        for v in graph.vertices() {
            if !self.by_vertex.contains_key(&v.label) {
                return Err(Error::Precondition(format!("bundle has no data at vertex {:?}", v.label)));
            }
        }
        if let Some(extra) = self.by_vertex.keys().find(|l| graph.vertex_index(l).is_none()) {
            return Err(Error::Precondition(format!("bundle names unknown vertex {extra:?}")));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, f: impl Fn(&SplitBundle, &SplitBundle) -> SplitBundle) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch);
        }
        if self.by_vertex.keys().ne(other.by_vertex.keys()) {
            return Err(Error::Precondition("bundles live on different vertex sets".into()));
        }
        Ok(EquivariantBundle {
            ambient: self.ambient.clone(),
            by_vertex: self
                .by_vertex
                .iter()
                .map(|(l, b)| (l.clone(), f(b, &other.by_vertex[l])))
                .collect(),
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.combine(other, SplitBundle::direct_sum)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.combine(other, SplitBundle::tensor)
    }
}

/// Split `E` into its `Ĥ(α)`-isotypic parts, keyed by the class of the
/// character modulo `M(α)` (in increasing key order).
pub fn decompose_by_isotropy(e: &SplitBundle, alpha: &TorsionPoint) -> Result<Vec<(Vec<i64>, SplitBundle)>> {
    if e.ambient() != alpha.ambient() {
        return Err(Error::AmbientMismatch);
    }
    let m = annihilator_of_point(alpha);
    let mut parts: BTreeMap<Vec<i64>, Vec<LineSummand>> = BTreeMap::new();
    for s in e.summands() {
        parts.entry(m.reduce_mod(&s.character)).or_default().push(s.clone());
    }
    Ok(parts
        .into_iter()
        .map(|(k, summands)| {
            (
                k,
                SplitBundle {
                    ambient: e.ambient.clone(),
                    summands,
                },
            )
        })
        .collect())
}

/// `ch_T(E) = Σ_j e^{x_j}` with Chern roots `x_j = ℓ_{λ_j} + aux_j`.
pub fn chern_character(e: &SplitBundle, cutoff: u32) -> GradedJet {
    let p = e.ambient.free_rank();
    let mut acc = Poly::zero(p);
    for s in &e.summands {
        let mut root = Poly::<CycloScalar>::linear_form(e.ambient.free_part(&s.character));
        if let Some(aux) = &s.aux {
            root = root.add(aux);
        }
        acc = acc.add(&exp_poly(&root, cutoff).expect("linear Chern root"));
    }
    GradedJet::new(cutoff, acc)
}

/// A germ at a torsion point: one exponential-polynomial germ per vertex
/// of the fixed subgraph there.
#[derive(Debug, Clone, PartialEq)]
pub struct StalkElement {
    pub point: TorsionPoint,
    pub cutoff: u32,
    pub vertex_germs: BTreeMap<String, Germ>,
}

impl StalkElement {
    pub fn zero(point: &TorsionPoint, cutoff: u32, labels: impl IntoIterator<Item = String>) -> Self {
        StalkElement {
            point: point.clone(),
            cutoff,
            vertex_germs: labels.into_iter().map(|l| (l, Germ::zero(point.ambient()))).collect(),
        }
    }

    /// True when the fixed set at the point is empty.
    pub fn is_empty(&self) -> bool {
        self.vertex_germs.is_empty()
    }

    /// Vertex jets at the cutoff, normalized in each vertex chart of `graph`.
    pub fn jets(&self, graph: &MomentGraph) -> BTreeMap<String, GradedJet> {
        self.vertex_germs
            .iter()
            .map(|(l, g)| {
                let jet = g.to_jet(self.cutoff);
                let v = graph.vertex_index(l).expect("stalk vertex belongs to the graph");
                let chart = graph.vertex_chart(v);
                (l.clone(), GradedJet::new(self.cutoff, chart.normalize_poly(jet.poly())))
            })
            .collect()
    }
}

impl fmt::Display for StalkElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "at {}: empty fixed set", self.point);
        }
        write!(f, "at {}:", self.point)?;
        for (l, g) in &self.vertex_germs {
            write!(f, " [{l}] {g};")?;
        }
        Ok(())
    }
}

/// `CH_T(E)_α = Σ_{λ̄ ∈ Ĥ(α)} α(λ̄)·ch_T E(λ̄)` at every vertex of `X^α`,
/// kept as exact germs. An empty fixed set gives the empty stalk.
pub fn twisted_germ(
    graph: &MomentGraph,
    e: &EquivariantBundle,
    alpha: &TorsionPoint,
    cutoff: u32,
) -> Result<StalkElement> {
    e.check_base(graph)?;
    if alpha.ambient() != graph.ambient() {
        return Err(Error::AmbientMismatch);
    }
    let fixed = fixed_subgraph(graph, alpha)?;
    let vertex_germs = fixed
        .vertices()
        .par_iter()
        .map(|v| {
            let bundle = &e.by_vertex[&v.label];
            let mut g = Germ::zero(graph.ambient());
            for (key, part) in decompose_by_isotropy(bundle, alpha)? {
                let twist = CycloScalar::exp_2pi_i(&alpha.eval(&key));
                for s in part.summands() {
                    g = g.add(&summand_germ(graph.ambient(), s, cutoff, &twist));
                }
            }
            Ok((v.label.clone(), g))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(StalkElement {
        point: alpha.clone(),
        cutoff,
        vertex_germs,
    })
}

/// A finite presentation `a_i·a_j = Σ_k f^k_{ij} a_k` of a module over
/// `Q[u_1..u_p]` together with a class `c = Σ g_i a_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub name: String,
    pub nvars: usize,
    /// `structure[i][j][k] = f^k_{ij}`
    pub structure: Vec<Vec<Vec<Poly<BigRational>>>>,
    pub class: Vec<Poly<BigRational>>,
}

type QPoly = Poly<BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl Presentation {
    /// `H_T^*(pt)` for `T = S¹`: one generator, `c = u`.
    pub fn point() -> Self {
        Presentation {
            name: "point".into(),
            nvars: 1,
            structure: vec![vec![vec![QPoly::one(1)]]],
            class: vec![QPoly::var(1, 0)],
        }
    }

    /// `H_{S¹}^*(CP¹)` on `1, x` with `x² = u·x`, and `c = x`.
    pub fn cp1() -> Self {
        let z = QPoly::zero(1);
        let one = QPoly::one(1);
        let u = QPoly::var(1, 0);
        Presentation {
            name: "CP1".into(),
            nvars: 1,
            structure: vec![
                vec![vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]],
                vec![vec![z.clone(), one.clone()], vec![z.clone(), u]],
            ],
            class: vec![z, one],
        }
    }

    /// `H_{T²}^*(CP²)` on `1, x, x²` with `x³ = (u₁+u₂)x² − u₁u₂x`, and `c = x`.
    pub fn cp2() -> Self {
        let z = QPoly::zero(2);
        let one = QPoly::one(2);
        let s = QPoly::var(2, 0).add(&QPoly::var(2, 1));
        let p = QPoly::var(2, 0).mul(&QPoly::var(2, 1));
        // x³ and x⁴ in the basis
        let x3 = vec![z.clone(), p.neg(), s.clone()];
        let x4 = vec![z.clone(), s.mul(&p).neg(), s.mul(&s).sub(&p)];
        let e = |k: usize| {
            let mut v = vec![z.clone(); 3];
            v[k] = one.clone();
            v
        };
        Presentation {
            name: "CP2".into(),
            nvars: 2,
            structure: vec![
                vec![e(0), e(1), e(2)],
                vec![e(1), e(2), x3.clone()],
                vec![e(2), x3, x4],
            ],
            class: vec![z.clone(), one, z],
        }
    }

    pub fn bundled() -> Vec<Presentation> {
        vec![Self::point(), Self::cp1(), Self::cp2()]
    }

    pub fn rank(&self) -> usize {
        self.structure.len()
    }

    fn validate(&self) -> Result<()> {
        let m = self.rank();
        if m == 0 {
            return Err(Error::Precondition("presentation has no generators".into()));
        }
        let shape_ok = self.class.len() == m
            && self.structure.iter().all(|r| r.len() == m && r.iter().all(|c| c.len() == m));
        if !shape_ok {
            return Err(Error::Precondition(format!("structure constants must form an {m}×{m}×{m} array")));
        }
        let polys = self.structure.iter().flatten().flatten().chain(&self.class);
        if let Some(p) = polys.into_iter().find(|p| p.nvars() != self.nvars) {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: p.nvars(),
            });
        }
        for i in 0..m {
            for j in 0..m {
                if self.structure[i][j] != self.structure[j][i] {
                    return Err(Error::Precondition(format!("a_{i}·a_{j} ≠ a_{j}·a_{i}")));
                }
                for k in 0..m {
                    let left = self.mul_vec(&self.mul_basis(i, j), k);
                    let right = self.mul_vec(&self.mul_basis(j, k), i);
                    if left != right {
                        return Err(Error::Precondition(format!(
                            "(a_{i}·a_{j})·a_{k} ≠ a_{i}·(a_{j}·a_{k}): the c·a_j expansion is inconsistent"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn mul_basis(&self, i: usize, j: usize) -> Vec<QPoly> {
        self.structure[i][j].clone()
    }

    /// `(Σ_k v_k a_k)·a_j`.
    fn mul_vec(&self, v: &[QPoly], j: usize) -> Vec<QPoly> {
        let mut out = vec![QPoly::zero(self.nvars); self.rank()];
        for (k, vk) in v.iter().enumerate() {
            if vk.is_zero() {
                continue;
            }
            for (l, f) in self.structure[k][j].iter().enumerate() {
                out[l] = out[l].add(&vk.mul(f));
            }
        }
        out
    }

    /// `v·c`.
    fn mul_class(&self, v: &[QPoly]) -> Vec<QPoly> {
        let mut out = vec![QPoly::zero(self.nvars); self.rank()];
        for (j, g) in self.class.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            for (l, x) in self.mul_vec(v, j).iter().enumerate() {
                out[l] = out[l].add(&x.mul(g));
            }
        }
        out
    }

    /// Coefficientwise maximum of `|f^k_{ij}|` and `|g_i|`.
    pub fn dominating_polynomial(&self) -> QPoly {
        let mut lambda: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for p in self.structure.iter().flatten().flatten().chain(&self.class) {
            for (e, c) in p.terms() {
                let a = c.abs();
                let entry = lambda.entry(e.clone()).or_insert_with(|| q(0));
                if a > *entry {
                    *entry = a;
                }
            }
        }
        QPoly::from_terms(self.nvars, lambda).expect("exponents have the right length")
    }
}

/// `φ` is dominated by `ψ`: every coefficient of `ψ` is positive and bounds
/// the absolute value of the matching coefficient of `φ` (non-strictly).
pub fn dominated_by(phi: &QPoly, psi: &QPoly) -> bool {
    psi.terms().values().all(|c| c.is_positive())
        && phi.terms().iter().all(|(e, c)| c.abs() <= psi.coeff(e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominationRow {
    pub n: u32,
    pub holds: bool,
    /// Smallest `bound − |coefficient|` over all coefficients of `cⁿ`
    /// (`None` when `cⁿ = 0`).
    pub min_margin: Option<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominationCertificate {
    pub lambda: QPoly,
    pub rows: Vec<DominationRow>,
}

impl DominationCertificate {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Check, for `n ≤ max_n`, that every coefficient of `cⁿ` (in the basis
/// `a_1..a_m`) is dominated by `2n·λ^{2n−1}`. `lambda` defaults to the
/// coefficientwise-max construction; an explicit `lambda` must dominate
/// every `f^k_{ij}` and `g_i`.
pub fn domination_certificate(
    pres: &Presentation,
    max_n: u32,
    lambda: Option<QPoly>,
) -> Result<DominationCertificate> {
    if max_n == 0 {
        return Err(Error::Precondition("need at least one power".into()));
    }
    pres.validate()?;
    let lambda = match lambda {
        Some(l) => {
            let all = pres.structure.iter().flatten().flatten().chain(&pres.class);
            if let Some(p) = all.into_iter().find(|p| !dominated_by(p, &l)) {
                return Err(Error::Precondition(format!("{l} does not dominate {p}")));
            }
            l
        }
        None => pres.dominating_polynomial(),
    };
    let mut rows = Vec::new();
    let mut power = pres.class.clone();
    let mut lambda_pow = lambda.clone();
    for n in 1..=max_n {
        if n > 1 {
            power = pres.mul_class(&power);
            lambda_pow = lambda_pow.mul(&lambda).mul(&lambda);
        }
        let bound = lambda_pow.scale(&q(2 * i64::from(n)));
        let mut holds = true;
        let mut min_margin: Option<BigRational> = None;
        for coeff in &power {
            for (e, c) in coeff.terms() {
                let margin = bound.coeff(e) - c.abs();
                if margin.is_negative() {
                    holds = false;
                }
                if min_margin.as_ref().is_none_or(|m| margin < *m) {
                    min_margin = Some(margin);
                }
            }
        }
        rows.push(DominationRow { n, holds, min_margin });
    }
    Ok(DominationCertificate { lambda, rows })
}
