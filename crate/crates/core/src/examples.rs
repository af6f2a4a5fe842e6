//! Built-in models: projective spaces, circle and finite-group orbits, and
//! sheaf models over adapted covers of hand-picked centers.

use crate::chern::EquivariantBundle;
use crate::cover::{build_adapted, Ball, Cover};
use crate::error::Result;
use crate::lattice::point::rat;
use crate::gkm::{MomentGraph, Vertex};
use crate::lattice::{DualGroup, Subgroup, TorsionPoint};
use crate::sheaf::SheafModel;

/// `CP¹` with the rotation action of `S¹`.
pub fn cp1_graph() -> MomentGraph {
    MomentGraph::from_fixed_points(&DualGroup::free(1), &["N", "S"], &[(0, 1, vec![1])]).expect("valid graph")
}

/// `CP²` with the standard `T²` action.
pub fn cp2_graph() -> MomentGraph {
    MomentGraph::from_fixed_points(
        &DualGroup::free(2),
        &["p1", "p2", "p3"],
        &[(0, 1, vec![1, 0]), (0, 2, vec![0, 1]), (1, 2, vec![1, -1])],
    )
    .expect("valid graph")
}

/// The single orbit `S¹/Z_n`.
pub fn orbit_graph(n: i64) -> Result<MomentGraph> {
    let g = DualGroup::free(1);
    let isotropy = Subgroup::canonical(&g, &[vec![n]])?;
    MomentGraph::new(&g, vec![Vertex { label: "o".into(), isotropy }], vec![])
}

/// The single orbit `Z_m/Z_l` of the finite group `Z_m`.
pub fn finite_orbit_graph(m: i64, l: i64) -> Result<MomentGraph> {
    let g = DualGroup::cyclic(m)?;
    let isotropy = Subgroup::canonical(&g, &[vec![l]])?;
    MomentGraph::new(&g, vec![Vertex { label: "o".into(), isotropy }], vec![])
}

/// Isotropy annihilators of the cells of a graph: one per vertex and the
/// subgroup `⟨w⟩` per edge, deduplicated and sorted.
pub fn graph_collection(g: &MomentGraph) -> Vec<Subgroup> {
    let mut out: Vec<Subgroup> = g.vertices().iter().map(|v| v.isotropy.clone()).collect();
    for e in g.edges() {
        out.push(Subgroup::canonical(g.ambient(), std::slice::from_ref(&e.weight)).expect("edge weight in ambient"));
    }
    out.sort_by(|a, b| a.basis().cmp(b.basis()));
    out.dedup();
    out
}

fn point(g: &DualGroup, coords: &[(i64, i64)]) -> TorsionPoint {
    TorsionPoint::from_fractions(g, coords).expect("coordinates in range")
}

fn model(graph: MomentGraph, sample: Vec<TorsionPoint>, cutoff: u32) -> Result<SheafModel> {
    let cover = build_adapted(&graph_collection(&graph), &sample)?;
    SheafModel::new(graph, cover, cutoff)
}

/// `S¹/Z_n` with centers at the `n`-torsion points and two nearby points
/// beside each of them.
pub fn orbit_model(n: i64, cutoff: u32) -> Result<SheafModel> {
    let graph = orbit_graph(n)?;
    let g = graph.ambient().clone();
    let mut sample = Vec::new();
    for k in 0..n {
        sample.push(point(&g, &[(k, n)]));
        sample.push(point(&g, &[(16 * k + 1, 16 * n)]));
        sample.push(point(&g, &[(256 * k + 17, 256 * n)]));
    }
    model(graph, sample, cutoff)
}

/// `Z_m/Z_l` with a center at every point of `C_{Z_m}`.
pub fn finite_orbit_model(m: i64, l: i64) -> Result<SheafModel> {
    let graph = finite_orbit_graph(m, l)?;
    let g = graph.ambient().clone();
    let sample = (0..m).map(|k| point(&g, &[(k, m)])).collect();
    model(graph, sample, 0)
}

pub fn cp1_model(cutoff: u32) -> Result<SheafModel> {
    let graph = cp1_graph();
    let g = graph.ambient().clone();
    let sample = [(0, 1), (1, 2), (1, 16), (65, 1024), (33, 64)]
        .iter()
        .map(|&c| point(&g, &[c]))
        .collect();
    model(graph, sample, cutoff)
}

/// `CP²` with a chain of centers moving off the origin and a cluster
/// around `(1/2, 1/2)` on the diagonal `C_{ker(1,−1)}`.
pub fn cp2_model(cutoff: u32) -> Result<SheafModel> {
    let graph = cp2_graph();
    let g = graph.ambient().clone();
    let sample = [
        [(0, 1), (0, 1)],
        [(1, 16), (0, 1)],
        [(1, 16), (1, 1024)],
        [(1, 2), (1, 2)],
        [(33, 64), (33, 64)],
        [(33, 64), (1, 2)],
    ]
    .iter()
    .map(|c| point(&g, c))
    .collect();
    model(graph, sample, cutoff)
}

/// The line with character `k` times the first generator at every vertex.
pub fn orbit_line(m: &SheafModel, k: i64) -> Result<EquivariantBundle> {
    let g = m.graph();
    let mut chi = g.ambient().zero();
    chi[0] = k;
    let chi = g.ambient().reduce(&chi);
    EquivariantBundle::line(g, &vec![chi; g.vertices().len()])
}

/// `O(1)` on `CP²`, whose Chern character restricts to `e^x` with
/// `x = (0, u₁, u₂)`.
pub fn cp2_hyperplane_bundle(m: &SheafModel) -> EquivariantBundle {
    EquivariantBundle::line(m.graph(), &[vec![0, 0], vec![1, 0], vec![0, 1]]).expect("three vertices")
}
/// Covers of `S¹` that each violate exactly one adapted-cover condition,
/// paired with the condition number and the collection they are checked
/// against.
pub fn adapted_counterexamples() -> Vec<(u8, Cover, Vec<Subgroup>)> {
    let g = DualGroup::free(1);
    let sub = |n: i64| Subgroup::canonical(&g, &[vec![n]]).expect("subgroup of Z");
    let a = vec![sub(2)];
    let (zero, half, quarter, third) = (
        point(&g, &[(0, 1)]),
        point(&g, &[(1, 2)]),
        point(&g, &[(1, 4)]),
        point(&g, &[(1, 3)]),
    );
    let cover = |balls, collection: &[Subgroup]| Cover::new(&g, balls, collection.to_vec()).expect("valid cover");
    // a single ball of radius 1/2 is not a ball of the metric
    let c1 = cover(vec![Ball::unchecked(zero.clone(), rat(1, 2))], &a);
    // 1/2 ∈ C_{Z/2} only and 1/3 ∈ C_{Z/3} only, yet the balls meet
    let b = vec![sub(2), sub(3)];
    let c2 = cover(
        vec![
            Ball::new(half.clone(), rat(1, 8)).expect("radius"),
            Ball::new(third, rat(1, 8)).expect("radius"),
        ],
        &b,
    );
    // the ball at 1/4 reaches C_{Z/2}
    let c3 = cover(
        vec![
            Ball::new(zero.clone(), rat(1, 16)).expect("radius"),
            Ball::new(quarter, rat(3, 8)).expect("radius"),
        ],
        &a,
    );
    // two components of C_{Z/2} with overlapping balls
    let c4 = cover(
        vec![
            Ball::new(zero, rat(3, 8)).expect("radius"),
            Ball::new(half, rat(3, 8)).expect("radius"),
        ],
        &a,
    );
    vec![(1, c1, a.clone()), (2, c2, b), (3, c3, a.clone()), (4, c4, a)]
}
