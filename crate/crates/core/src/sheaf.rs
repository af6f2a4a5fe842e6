//! The finite model of the sheaf `𝒦_T^*(X)`: stalks at cover centers as
//! GKM jet spaces of fixed subgraphs, gluing maps, the cocycle condition and
//! global sections such as `CH_T(E)`.
//!
//! Every center is lifted once to the fundamental domain `[0,1)^n`; the
//! gluing map from `α` to `β` translates by `a_β − a_α`, so branch vectors
//! add up exactly along chains.

use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;
use rayon::prelude::*;

use crate::algebra::linalg;
use crate::algebra::poly::Exponent;
use crate::algebra::{eval_at_point, CycloScalar, Germ, LaurentElement};
use crate::chern::{twisted_germ, EquivariantBundle, StalkElement};
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::gkm::{image_basis, Class, MomentGraph, Theory};
use crate::lattice::{in_subvariety, prec, TorsionPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct SheafModel {
    graph: MomentGraph,
    cover: Cover,
    cutoff: u32,
}

impl SheafModel {
    pub fn new(graph: MomentGraph, cover: Cover, cutoff: u32) -> Result<Self> {
        if graph.ambient() != cover.ambient() {
            return Err(Error::AmbientMismatch);
        }
        Ok(SheafModel { graph, cover, cutoff })
    }

    pub fn graph(&self) -> &MomentGraph {
        &self.graph
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        SheafModel {
            cutoff,
            ..self.clone()
        }
    }

    /// The lift `a_α ∈ [0,1)^n` of a center.
    pub fn lift(&self, alpha: &TorsionPoint) -> Vec<BigRational> {
        alpha.coords().to_vec()
    }

    /// `b_{αβ} = a_β − a_α`.
    pub fn branch(&self, alpha: &TorsionPoint, beta: &TorsionPoint) -> Vec<BigRational> {
        self.lift(beta)
            .iter()
            .zip(self.lift(alpha))
            .map(|(b, a)| b - a)
            .collect()
    }

    fn check_center(&self, alpha: &TorsionPoint) -> Result<()> {
        if self.cover.ball(alpha).is_none() {
            return Err(Error::Precondition(format!("{alpha} is not a cover center")));
        }
        Ok(())
    }

    /// Whether gluing from `α` to `β` is defined: the balls overlap and
    /// `α ≺ β` for the cover's collection.
    pub fn glues(&self, alpha: &TorsionPoint, beta: &TorsionPoint) -> Result<bool> {
        let (Some(a), Some(b)) = (self.cover.ball(alpha), self.cover.ball(beta)) else {
            return Ok(false);
        };
        Ok(a.overlaps(b) && prec(alpha, beta, self.cover.collection())?)
    }

    /// Ordered pairs `(i, j)`, `i ≠ j`, of center indices that glue.
    pub fn gluing_pairs(&self) -> Result<Vec<(usize, usize)>> {
        let centers = self.cover.centers();
        let mut out = Vec::new();
        for i in 0..centers.len() {
            for j in 0..centers.len() {
                if i != j && self.glues(centers[i], centers[j])? {
                    out.push((i, j));
                }
            }
        }
        Ok(out)
    }

    /// Triples `(i, j, k)` of distinct centers with all three gluing maps
    /// `i→j`, `j→k`, `i→k` defined.
    pub fn cocycle_triples(&self) -> Result<Vec<(usize, usize, usize)>> {
        let pairs = self.gluing_pairs()?;
        let glue = |i, j| pairs.binary_search(&(i, j)).is_ok();
        let n = self.cover.balls().len();
        let mut out = Vec::new();
        for &(i, j) in &pairs {
            for k in 0..n {
                if k != i && k != j && glue(j, k) && glue(i, k) {
                    out.push((i, j, k));
                }
            }
        }
        Ok(out)
    }
}

/// `X^α` in graph form: fixed points are always kept, a vertex with
/// isotropy `H_v` is kept iff `α ∈ C_{H_v}`, and an edge survives iff `α`
/// kills its weight.
pub fn fixed_subgraph(g: &MomentGraph, alpha: &TorsionPoint) -> Result<MomentGraph> {
    if alpha.ambient() != g.ambient() {
        return Err(Error::AmbientMismatch);
    }
    Ok(g.subgraph(
        |v| in_subvariety(alpha, &v.isotropy).expect("same ambient"),
        |e| alpha.kills(&e.weight),
    ))
}

/// For every edge dropped at `α`, the Euler class `1 − z^w` is a unit
/// there: it does not vanish at `α`.
pub fn removed_euler_classes_are_units(g: &MomentGraph, alpha: &TorsionPoint) -> Result<bool> {
    for e in g.edges() {
        if !alpha.kills(&e.weight) {
            let euler = LaurentElement::euler_class(g.ambient(), &e.weight);
            if eval_at_point(&euler, alpha)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Graded basis of the stalk at a center, degrees `0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct StalkSpace {
    pub point: TorsionPoint,
    pub labels: Vec<String>,
    pub by_degree: Vec<Vec<StalkElement>>,
}

impl StalkSpace {
    pub fn dimensions(&self) -> Vec<usize> {
        self.by_degree.iter().map(Vec::len).collect()
    }

    pub fn total_dimension(&self) -> usize {
        self.by_degree.iter().map(Vec::len).sum()
    }

    pub fn basis(&self) -> impl Iterator<Item = &StalkElement> {
        self.by_degree.iter().flatten()
    }
}

fn class_to_stalk(g: &MomentGraph, alpha: &TorsionPoint, cutoff: u32, fixed: &MomentGraph, c: &Class) -> StalkElement {
    let Class::H(entries) = c else {
        unreachable!("stalk bases are cohomological")
    };
    StalkElement {
        point: alpha.clone(),
        cutoff,
        vertex_germs: fixed
            .vertices()
            .iter()
            .zip(entries)
            .map(|(v, p)| (v.label.clone(), Germ::polynomial(g.ambient(), p.clone())))
            .collect(),
    }
}

/// GKM solution spaces of the fixed subgraph at `α`, degree by degree up
/// to the model's cutoff. Zero when the fixed set is empty.
pub fn stalk_space(m: &SheafModel, alpha: &TorsionPoint) -> Result<StalkSpace> {
    m.check_center(alpha)?;
    let fixed = fixed_subgraph(&m.graph, alpha)?;
    let labels: Vec<String> = fixed.vertices().iter().map(|v| v.label.clone()).collect();
    let by_degree = (0..=m.cutoff)
        .into_par_iter()
        .map(|d| {
            if labels.is_empty() {
                return Ok(Vec::new());
            }
            Ok(image_basis(&fixed, Theory::H, d)?
                .iter()
                .map(|c| class_to_stalk(&m.graph, alpha, m.cutoff, &fixed, c))
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StalkSpace {
        point: alpha.clone(),
        labels,
        by_degree,
    })
}

fn translate_all(s: &StalkElement, to: &TorsionPoint, labels: &[String], b: &[BigRational]) -> Result<StalkElement> {
    let mut vertex_germs = BTreeMap::new();
    for l in labels {
        let germ = s.vertex_germs.get(l).ok_or_else(|| {
            Error::Precondition(format!("vertex {l:?} is fixed at {to} but missing from the stalk at {}", s.point))
        })?;
        vertex_germs.insert(l.clone(), germ.translate(b)?);
    }
    Ok(StalkElement {
        point: to.clone(),
        cutoff: s.cutoff,
        vertex_germs,
    })
}

/// `φ_{αβ} = τ*_{b_{αβ}} ∘ i*`: restrict to the vertices fixed at `β`, then
/// translate every vertex germ by the branch vector.
pub fn glue(m: &SheafModel, alpha: &TorsionPoint, beta: &TorsionPoint, s: &StalkElement) -> Result<StalkElement> {
    m.check_center(alpha)?;
    m.check_center(beta)?;
    if &s.point != alpha {
        return Err(Error::Precondition(format!("stalk element lives at {}, not {alpha}", s.point)));
    }
    let (a, b) = (m.cover.ball(alpha).expect("center"), m.cover.ball(beta).expect("center"));
    if !a.overlaps(b) {
        return Err(Error::Precondition(format!("balls at {alpha} and {beta} do not overlap")));
    }
    if !prec(alpha, beta, m.cover.collection())? {
        return Err(Error::Precondition(format!("{alpha} ≺ {beta} fails for the cover's collection")));
    }
    let labels: Vec<String> = fixed_subgraph(&m.graph, beta)?
        .vertices()
        .iter()
        .map(|v| v.label.clone())
        .collect();
    translate_all(s, beta, &labels, &m.branch(alpha, beta))
}

/// The inverse of `φ_{αβ}` on its image: translate back by `b_{βα}`.
pub fn unglue(m: &SheafModel, alpha: &TorsionPoint, beta: &TorsionPoint, t: &StalkElement) -> Result<StalkElement> {
    m.check_center(alpha)?;
    if &t.point != beta {
        return Err(Error::Precondition(format!("stalk element lives at {}, not {beta}", t.point)));
    }
    let labels: Vec<String> = t.vertex_germs.keys().cloned().collect();
    translate_all(t, alpha, &labels, &m.branch(beta, alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleReport {
    pub samples: usize,
    /// Index of the first sample where the two composites differ.
    pub first_failure: Option<usize>,
}

impl CocycleReport {
    pub fn passes(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Compare `φ_{βγ} ∘ φ_{αβ}` with `φ_{αγ}` on the stalk basis at `α`
/// (or on the given samples).
pub fn cocycle_check(
    m: &SheafModel,
    alpha: &TorsionPoint,
    beta: &TorsionPoint,
    gamma: &TorsionPoint,
    samples: Option<&[StalkElement]>,
) -> Result<CocycleReport> {
    for (x, y) in [(alpha, beta), (beta, gamma), (alpha, gamma)] {
        if !m.glues(x, y)? {
            return Err(Error::Precondition(format!("gluing from {x} to {y} is not defined")));
        }
    }
    let owned;
    let samples = match samples {
        Some(s) => s,
        None => {
            owned = stalk_space(m, alpha)?.basis().cloned().collect::<Vec<_>>();
            &owned
        }
    };
    let results = samples
        .par_iter()
        .map(|s| {
            let two_step = glue(m, beta, gamma, &glue(m, alpha, beta, s)?)?;
            let direct = glue(m, alpha, gamma, s)?;
            Ok(two_step == direct)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(CocycleReport {
        samples: samples.len(),
        first_failure: results.iter().position(|ok| !ok),
    })
}

/// A family of stalk elements, one per cover center (in cover order).
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub germs: Vec<StalkElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SectionOutcome {
    Section(Section),
    Mismatch {
        alpha: TorsionPoint,
        beta: TorsionPoint,
        vertex: String,
        /// `φ_{αβ}(s_α) − s_β` at the cutoff.
        difference: String,
    },
}

impl SectionOutcome {
    pub fn is_section(&self) -> bool {
        matches!(self, SectionOutcome::Section(_))
    }
}

impl fmt::Display for SectionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectionOutcome::Section(s) => {
                for g in &s.germs {
                    writeln!(f, "{g}")?;
                }
                Ok(())
            }
            SectionOutcome::Mismatch {
                alpha,
                beta,
                vertex,
                difference,
            } => write!(f, "germs at {alpha} and {beta} disagree at vertex {vertex}: {difference}"),
        }
    }
}

/// Check that the given germs agree after gluing on every gluing pair.
pub fn check_family(m: &SheafModel, germs: Vec<StalkElement>) -> Result<SectionOutcome> {
    let centers = m.cover.centers();
    for (i, j) in m.gluing_pairs()? {
        let glued = glue(m, centers[i], centers[j], &germs[i])?.jets(&m.graph);
        let target = germs[j].jets(&m.graph);
        for (label, jet) in &target {
            let other = glued.get(label).cloned().unwrap_or_else(|| jet.sub(jet));
            if &other != jet {
                return Ok(SectionOutcome::Mismatch {
                    alpha: centers[i].clone(),
                    beta: centers[j].clone(),
                    vertex: label.clone(),
                    difference: other.sub(jet).to_string(),
                });
            }
        }
    }
    Ok(SectionOutcome::Section(Section { germs }))
}

/// Twisted Chern character germs at every center, checked for gluing.
pub fn section_check(m: &SheafModel, e: &EquivariantBundle) -> Result<SectionOutcome> {
    let germs = m
        .cover
        .centers()
        .par_iter()
        .map(|c| twisted_germ(&m.graph, e, c, m.cutoff))
        .collect::<Result<Vec<_>>>()?;
    check_family(m, germs)
}

type JetKey = (String, Exponent);

fn jet_coords(m: &SheafModel, s: &StalkElement) -> BTreeMap<JetKey, CycloScalar> {
    let mut out = BTreeMap::new();
    for (label, jet) in s.jets(&m.graph) {
        for (e, c) in jet.poly().terms() {
            out.insert((label.clone(), e.clone()), c.clone());
        }
    }
    out
}

/// Dimension of the space of compatible stalk families at the cutoff:
/// unknowns are coordinates on every stalk basis, constraints are
/// `φ_{αβ}(s_α) = s_β` on all gluing pairs.
pub fn section_space_dimension(m: &SheafModel) -> Result<usize> {
    let centers = m.cover.centers();
    let stalks = centers
        .par_iter()
        .map(|c| stalk_space(m, c).map(|s| s.basis().cloned().collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let mut offsets = Vec::with_capacity(stalks.len());
    let mut total = 0;
    for s in &stalks {
        offsets.push(total);
        total += s.len();
    }
    let pairs = m.gluing_pairs()?;
    let blocks = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut rows: BTreeMap<JetKey, Vec<CycloScalar>> = BTreeMap::new();
            let zero = || vec![CycloScalar::int(0); total];
            for (k, s) in stalks[i].iter().enumerate() {
                let glued = glue(m, centers[i], centers[j], s)?;
                for (key, c) in jet_coords(m, &glued) {
                    let row = rows.entry(key).or_insert_with(zero);
                    row[offsets[i] + k] = &row[offsets[i] + k] + &c;
                }
            }
            for (k, s) in stalks[j].iter().enumerate() {
                for (key, c) in jet_coords(m, s) {
                    let row = rows.entry(key).or_insert_with(zero);
                    row[offsets[j] + k] = &row[offsets[j] + k] - &c;
                }
            }
            Ok(rows.into_values().collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<CycloScalar>> = blocks.into_iter().flatten().collect();
    Ok(total - linalg::rank(&rows, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::lattice::point::rat;
    use crate::lattice::DualGroup;

    fn pt(g: &DualGroup, c: &[(i64, i64)]) -> TorsionPoint {
        TorsionPoint::from_fractions(g, c).unwrap()
    }

    #[test]
    fn fixed_subgraphs() {
        let cp1 = examples::cp1_graph();
        let g = cp1.ambient().clone();
        let half = fixed_subgraph(&cp1, &pt(&g, &[(1, 2)])).unwrap();
        assert_eq!((half.vertices().len(), half.edges().len()), (2, 0));
        assert_eq!(fixed_subgraph(&cp1, &TorsionPoint::zero(&g)).unwrap(), cp1);

        let cp2 = examples::cp2_graph();
        let g2 = cp2.ambient().clone();
        let h = fixed_subgraph(&cp2, &pt(&g2, &[(1, 2), (1, 2)])).unwrap();
        assert_eq!(h.edges().len(), 1);
        assert_eq!(h.edges()[0].weight, vec![1, -1]);
        for a in [pt(&g2, &[(1, 2), (1, 2)]), pt(&g2, &[(1, 3), (0, 1)]), pt(&g2, &[(1, 5), (2, 7)])] {
            assert!(removed_euler_classes_are_units(&cp2, &a).unwrap());
        }
    }

    #[test]
    fn orbit_stalks_live_on_torsion_points() {
        for n in 2..=6 {
            let m = examples::orbit_model(n, 2).unwrap();
            for c in m.cover().centers() {
                let dims = stalk_space(&m, c).unwrap().dimensions();
                let torsion = c.kills(&[n]);
                assert_eq!(dims[0], usize::from(torsion), "n = {n}, center {c}");
                assert!(dims[1..].iter().all(|&d| d == 0));
            }
        }
    }

    #[test]
    fn cp1_stalks() {
        let m = examples::cp1_model(3).unwrap();
        let g = m.graph().ambient().clone();
        let zero = stalk_space(&m, &TorsionPoint::zero(&g)).unwrap();
        assert_eq!(zero.dimensions(), vec![1, 2, 2, 2]);
        let half = stalk_space(&m, &pt(&g, &[(1, 2)])).unwrap();
        assert_eq!(half.dimensions(), vec![2, 2, 2, 2]);
        assert!(stalk_space(&m, &pt(&g, &[(1, 3)])).is_err());
    }

    #[test]
    fn stalks_depend_on_the_isotropy_only() {
        let m = examples::cp2_model(3).unwrap();
        let centers = m.cover().centers();
        for a in &centers {
            for b in &centers {
                if crate::lattice::annihilator_of_point(a) == crate::lattice::annihilator_of_point(b) {
                    assert_eq!(
                        stalk_space(&m, a).unwrap().dimensions(),
                        stalk_space(&m, b).unwrap().dimensions()
                    );
                }
            }
        }
    }

    #[test]
    fn point_stalks_are_full_jet_spaces() {
        let g = DualGroup::free(2);
        let graph = MomentGraph::from_fixed_points(&g, &["o"], &[]).unwrap();
        let sample = vec![TorsionPoint::zero(&g), pt(&g, &[(1, 3), (1, 2)])];
        let cover = crate::cover::build_adapted(&[crate::lattice::Subgroup::zero(&g)], &sample).unwrap();
        let m = SheafModel::new(graph, cover, 4).unwrap();
        for c in &sample {
            assert_eq!(stalk_space(&m, c).unwrap().dimensions(), vec![1, 2, 3, 4, 5]);
        }
    }

    #[test]
    fn product_stalks_convolve() {
        let cp1 = examples::cp1_graph();
        let prod = crate::gkm::product_graph(&cp1, &cp1);
        let g = prod.ambient().clone();
        let a = pt(&g, &[(1, 2), (0, 1)]);
        let sub = fixed_subgraph(&prod, &a).unwrap();
        let dims = crate::gkm::gkm_dimensions(&sub, 2);
        // factor stalks: (2,2,2) at 1/2 and (1,2,2) at 0
        let conv: Vec<usize> = (0..=2usize).map(|d| (0..=d).map(|k| [2, 2, 2][k] * [1, 2, 2][d - k]).sum()).collect();
        assert_eq!(dims, conv);
    }

    #[test]
    fn gluing_round_trips_and_cocycles() {
        for m in [examples::orbit_model(6, 6).unwrap(), examples::cp2_model(4).unwrap()] {
            let centers = m.cover().centers();
            let pairs = m.gluing_pairs().unwrap();
            assert!(!pairs.is_empty());
            for &(i, j) in &pairs {
                let (a, b) = (centers[i], centers[j]);
                for s in stalk_space(&m, a).unwrap().basis() {
                    let t = glue(&m, a, b, s).unwrap();
                    let back = unglue(&m, a, b, &t).unwrap();
                    let restricted: BTreeMap<_, _> = s
                        .vertex_germs
                        .iter()
                        .filter(|(l, _)| t.vertex_germs.contains_key(*l))
                        .map(|(l, g)| (l.clone(), g.clone()))
                        .collect();
                    assert_eq!(back.vertex_germs, restricted);
                }
            }
            let triples = m.cocycle_triples().unwrap();
            assert!(!triples.is_empty());
            for (i, j, k) in triples {
                let r = cocycle_check(&m, centers[i], centers[j], centers[k], None).unwrap();
                assert!(r.passes());
            }
            // α = β degenerates to the identity
            let a = centers[0];
            let s = stalk_space(&m, a).unwrap().basis().next().cloned();
            if let Some(s) = s {
                assert_eq!(glue(&m, a, a, &s).unwrap().vertex_germs, s.vertex_germs);
            }
        }
    }

    #[test]
    fn glued_stalk_elements_stay_in_the_stalk() {
        let m = examples::cp2_model(3).unwrap();
        let centers = m.cover().centers();
        for (i, j) in m.gluing_pairs().unwrap() {
            let target = stalk_space(&m, centers[j]).unwrap();
            let fixed = fixed_subgraph(m.graph(), centers[j]).unwrap();
            for s in stalk_space(&m, centers[i]).unwrap().basis() {
                let t = glue(&m, centers[i], centers[j], s).unwrap();
                let entries = fixed
                    .vertices()
                    .iter()
                    .map(|v| t.vertex_germs[&v.label].to_jet(3).into_poly())
                    .collect();
                let report = crate::gkm::check_class(&fixed, &Class::H(entries)).unwrap();
                assert!(report.passes(), "{} -> {}", centers[i], centers[j]);
            }
            assert_eq!(target.labels.len(), fixed.vertices().len());
        }
    }

    #[test]
    fn gluing_preconditions() {
        let m = examples::orbit_model(4, 2).unwrap();
        let g = m.graph().ambient().clone();
        let (a, b) = (TorsionPoint::zero(&g), pt(&g, &[(1, 2)]));
        let s = stalk_space(&m, &a).unwrap().basis().next().unwrap().clone();
        assert!(glue(&m, &a, &b, &s).is_err());
    }

    #[test]
    fn orbit_sections() {
        for n in 2..=6 {
            let m = examples::orbit_model(n, 1).unwrap();
            let e = examples::orbit_line(&m, 1).unwrap();
            let SectionOutcome::Section(s) = section_check(&m, &e).unwrap() else {
                panic!("CH of the standard line must glue");
            };
            for germ in &s.germs {
                if germ.is_empty() {
                    continue;
                }
                let jet = &germ.jets(m.graph())["o"];
                let k = (germ.point.coords()[0].clone() * rat(n, 1)).to_integer();
                let k: i64 = k.try_into().unwrap();
                assert_eq!(jet.poly(), &crate::algebra::Poly::constant(1, CycloScalar::root_of_unity(k, n as u64)));
            }
            assert_eq!(section_space_dimension(&m).unwrap(), n as usize);
        }
    }

    #[test]
    fn finite_group_orbits() {
        for (mm, l) in [(4, 2), (6, 3), (6, 2)] {
            let m = examples::finite_orbit_model(mm, l).unwrap();
            assert_eq!(section_space_dimension(&m).unwrap(), l as usize);
            let e = examples::orbit_line(&m, 1).unwrap();
            assert!(section_check(&m, &e).unwrap().is_section());
        }
    }

    #[test]
    fn cp_sections() {
        let m = examples::cp2_model(4).unwrap();
        let e = examples::cp2_hyperplane_bundle(&m);
        assert!(section_check(&m, &e).unwrap().is_section());
        let m1 = examples::cp1_model(4).unwrap();
        let e1 = EquivariantBundle::line(m1.graph(), &[vec![0], vec![1]]).unwrap();
        assert!(section_check(&m1, &e1).unwrap().is_section());
    }

    #[test]
    fn forged_families_are_caught() {
        let m = examples::cp2_model(2).unwrap();
        let e = examples::cp2_hyperplane_bundle(&m);
        let SectionOutcome::Section(mut s) = section_check(&m, &e).unwrap() else {
            panic!()
        };
        let (_, j) = m.gluing_pairs().unwrap()[0];
        let germ = s.germs[j].vertex_germs.values_mut().next().unwrap();
        *germ = germ.scale(&CycloScalar::int(2));
        assert!(!check_family(&m, s.germs).unwrap().is_section());
    }
}
