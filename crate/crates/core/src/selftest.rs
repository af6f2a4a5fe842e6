//! The acceptance suite: ten end-to-end checks against hand-derived values
//! and independent oracles. Randomized checks use a fixed seed, so reports
//! are reproducible byte for byte.

use std::fmt;

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::linalg::rank;
use crate::algebra::poly::exp_poly;
use crate::algebra::{divide_by_euler, CycloScalar, Germ, LaurentElement, Poly};
use crate::chern::{domination_certificate, Presentation};
use crate::cover::{build_adapted, verify_adapted};
use crate::error::Result;
use crate::examples;
use crate::gkm::{cs_compare, gkm_dimensions, product_graph, Class, Theory};
use crate::lattice::point::rat;
use crate::lattice::{DualGroup, Subgroup, TorsionPoint};
use crate::sheaf::{
    cocycle_check, glue, section_check, section_space_dimension, stalk_space, unglue, SectionOutcome,
};

const SEED: u64 = 0x676b_6d66;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {:<28} {}", self.id, self.name, self.detail)
    }
}

/// A failed expectation, reported as the criterion's detail.
struct Failure(String);

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure(format!("error: {e}"))
    }
}

type Check = std::result::Result<String, Failure>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure(msg()))
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "circle orbit sections"),
    (2, "finite orbit sections"),
    (3, "stalk support"),
    (4, "Chang-Skjelbred comparison"),
    (5, "gluing cocycles"),
    (6, "translation of exponentials"),
    (7, "Euler class divisibility"),
    (8, "adapted covers"),
    (9, "product dimensions"),
    (10, "domination certificate"),
];

/// Run one criterion by number.
pub fn run_criterion(id: u8) -> Option<CriterionResult> {
    let (_, name) = *CRITERIA.iter().find(|(i, _)| *i == id)?;
    let outcome = match id {
        1 => circle_orbit_sections(),
        2 => finite_orbit_sections(),
        3 => stalk_support(),
        4 => chang_skjelbred(),
        5 => gluing_cocycles(),
        6 => translation(&mut ChaCha8Rng::seed_from_u64(SEED)),
        7 => euler_divisibility(&mut ChaCha8Rng::seed_from_u64(SEED + 1)),
        8 => adapted_covers(&mut ChaCha8Rng::seed_from_u64(SEED + 2)),
        9 => product_dimensions(),
        10 => domination(),
        _ => unreachable!("criterion ids are listed above"),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(Failure(d)) => (false, d),
    };
    Some(CriterionResult { id, name, passed, detail })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|&(id, _)| run_criterion(id)).collect()
}

fn root_index(alpha: &TorsionPoint, n: i64) -> i64 {
    let k = (alpha.coords()[0].clone() * rat(n, 1)).to_integer();
    i64::try_from(k).expect("small index")
}

/// Values of the section of `CH(z)` at the centers where it is nonzero,
/// checked against `ε^k` at the center `k/n`.
fn check_root_of_unity_section(m: &crate::sheaf::SheafModel, n: i64) -> std::result::Result<usize, Failure> {
    let e = examples::orbit_line(m, 1)?;
    let s = match section_check(m, &e)? {
        SectionOutcome::Section(s) => s,
        other => return Err(Failure(format!("n = {n}: {other}"))),
    };
    let mut support = 0;
    for germ in s.germs.iter().filter(|g| !g.is_empty()) {
        let k = root_index(&germ.point, n);
        let jet = &germ.jets(m.graph())["o"];
        let expected = Poly::constant(jet.nvars(), CycloScalar::root_of_unity(k, n as u64));
        ensure(jet.poly() == &expected, || {
            format!("n = {n}: value at {} is {}, expected ζ_{n}^{k}", germ.point, jet.poly())
        })?;
        support += 1;
    }
    Ok(support)
}

fn circle_orbit_sections() -> Check {
    for n in 2..=6i64 {
        let m = examples::orbit_model(n, 0)?;
        let support = check_root_of_unity_section(&m, n)?;
        ensure(support == n as usize, || format!("n = {n}: section nonzero at {support} centers"))?;
        // z^j ↦ (ε^{jk})_k is the Vandermonde matrix of the n-th roots of unity
        let vandermonde: Vec<Vec<CycloScalar>> = (0..n)
            .map(|j| (0..n).map(|k| CycloScalar::root_of_unity(j * k, n as u64)).collect())
            .collect();
        let r = rank(&vandermonde, n as usize);
        ensure(r == n as usize, || format!("n = {n}: evaluation map has rank {r}"))?;
        let dim = section_space_dimension(&m)?;
        ensure(dim == n as usize, || format!("n = {n}: section space has dimension {dim}"))?;
    }
    Ok("n = 2..6: values (1, ε, …, ε^{n-1}), evaluation map of rank n".into())
}

fn finite_orbit_sections() -> Check {
    let mut dims = Vec::new();
    for (mm, l) in [(4, 2), (6, 3), (6, 2)] {
        let m = examples::finite_orbit_model(mm, l)?;
        let dim = section_space_dimension(&m)?;
        ensure(dim == l as usize, || format!("Z_{mm}/Z_{l}: section space has dimension {dim}"))?;
        for c in m.cover().centers() {
            let total = stalk_space(&m, c)?.total_dimension();
            ensure(total == usize::from(c.kills(&[l])), || {
                format!("Z_{mm}/Z_{l}: stalk at {c} has dimension {total}")
            })?;
        }
        let support = check_root_of_unity_section(&m, mm)?;
        ensure(support == l as usize, || format!("Z_{mm}/Z_{l}: section nonzero at {support} centers"))?;
        dims.push(format!("Z_{mm}/Z_{l}: {dim}"));
    }
    Ok(format!("section dimensions {}", dims.join(", ")))
}

fn stalk_support() -> Check {
    for n in 2..=6i64 {
        let m = examples::orbit_model(n, 0)?;
        for c in m.cover().centers() {
            let dims = stalk_space(&m, c)?.dimensions();
            let expected = vec![usize::from(c.kills(&[n]))];
            ensure(dims == expected, || format!("n = {n}: stalk at {c} has dimensions {dims:?}"))?;
        }
    }
    Ok("n = 2..6: one-dimensional exactly at the n-torsion centers".into())
}

fn chang_skjelbred() -> Check {
    let cp2 = examples::cp2_graph();
    let one = Class::H(vec![Poly::one(2); 3]);
    let x: Vec<Poly<CycloScalar>> = [vec![0, 0], vec![1, 0], vec![0, 1]]
        .iter()
        .map(|l| Poly::linear_form(l))
        .collect();
    let x2: Vec<Poly<CycloScalar>> = x.iter().map(|p| p.mul(p)).collect();
    let r = cs_compare(&cp2, &[one.clone(), Class::H(x.clone()), Class::H(x2)], Theory::H, 4)?;
    let dims: Vec<usize> = r.rows.iter().map(|row| row.gkm_dim).collect();
    ensure(r.equal(), || format!("CP2: image and GKM ring differ: {:?}", r.first_difference()))?;
    ensure(dims[..4] == [1, 3, 6, 9], || format!("CP2: GKM dimensions {dims:?}"))?;

    let cp1 = examples::cp1_graph();
    let amb = cp1.ambient().clone();
    let k = |exps: [i64; 2]| {
        Class::K(
            exps.iter()
                .map(|&e| LaurentElement::monomial(&amb, &[e], CycloScalar::int(1)))
                .collect(),
        )
    };
    let r = cs_compare(&cp1, &[k([0, 0]), k([0, 1])], Theory::K, 3)?;
    ensure(r.equal(), || format!("CP1 K-theory: image and GKM ring differ: {:?}", r.first_difference()))?;

    let dropped = cs_compare(&cp2, &[one, Class::H(x)], Theory::H, 4)?;
    let diff = dropped
        .first_difference()
        .ok_or_else(|| Failure("dropping x² went unnoticed".into()))?;
    ensure(diff.param == 2 && diff.span_in_gkm && !diff.gkm_in_span, || {
        format!("dropped x²: unexpected difference {diff:?}")
    })?;
    Ok(format!(
        "CP2 H dims {:?} equal; CP1 K window 3 equal; without x² strict at degree {} ({} < {})",
        &dims[..4],
        diff.param,
        diff.span_dim,
        diff.gkm_dim
    ))
}

fn gluing_cocycles() -> Check {
    let mut triples = 0;
    let mut round_trips = 0;
    for m in [examples::orbit_model(6, 6)?, examples::cp2_model(6)?] {
        let centers = m.cover().centers();
        for (i, j) in m.gluing_pairs()? {
            let (a, b) = (centers[i], centers[j]);
            for s in stalk_space(&m, a)?.basis() {
                let t = glue(&m, a, b, s)?;
                let back = unglue(&m, a, b, &t)?;
                let same = back
                    .vertex_germs
                    .iter()
                    .all(|(l, g)| s.vertex_germs.get(l) == Some(g));
                ensure(same && back.vertex_germs.len() == t.vertex_germs.len(), || {
                    format!("round trip {a} → {b} is not the identity")
                })?;
                round_trips += 1;
            }
        }
        for (i, j, k) in m.cocycle_triples()? {
            let r = cocycle_check(&m, centers[i], centers[j], centers[k], None)?;
            ensure(r.passes(), || {
                format!("cocycle fails on ({}, {}, {})", centers[i], centers[j], centers[k])
            })?;
            triples += 1;
        }
    }
    ensure(triples > 0, || "no overlapping triples".into())?;
    Ok(format!("{triples} triples, {round_trips} round trips at cutoff 6"))
}

fn random_rational(rng: &mut ChaCha8Rng, max_den: i64) -> BigRational {
    let d = rng.gen_range(1..=max_den);
    rat(rng.gen_range(-2 * d..=2 * d), d)
}

fn translation(rng: &mut ChaCha8Rng) -> Check {
    let groups = [DualGroup::free(1), DualGroup::free(2), DualGroup::new(2, vec![3]).expect("valid group")];
    for trial in 0..50 {
        let g = &groups[trial % groups.len()];
        let lambda: Vec<i64> = (0..g.dim()).map(|_| rng.gen_range(-3..=3)).collect();
        let lambda = g.reduce(&lambda);
        let a: Vec<BigRational> = (0..g.dim()).map(|_| random_rational(rng, 12)).collect();
        let cutoff = rng.gen_range(0..=8);
        let phase: BigRational = lambda
            .iter()
            .zip(&a)
            .map(|(&l, x)| BigRational::from_integer(l.into()) * x)
            .sum();
        let root = CycloScalar::exp_2pi_i(&phase);
        let e = Germ::character(g, &lambda, CycloScalar::int(1));
        let translated = e.translate(&a)?;
        let exp = exp_poly(&Poly::linear_form(g.free_part(&lambda)), cutoff)?;
        let expected = exp.scale(&root);
        ensure(translated.to_jet(cutoff).poly() == &expected, || {
            format!("λ = {lambda:?}, a = {a:?}, D = {cutoff}: jets differ")
        })?;
        ensure(translated == e.scale(&root), || format!("λ = {lambda:?}, a = {a:?}: germs differ"))?;
    }
    Ok("50 random (λ, a, D ≤ 8) triples".into())
}

fn random_laurent(rng: &mut ChaCha8Rng, g: &DualGroup, terms: usize) -> LaurentElement {
    let mut f = LaurentElement::zero(g);
    for _ in 0..terms {
        let e: Vec<i64> = (0..g.dim()).map(|_| rng.gen_range(-3..=3)).collect();
        f.add_term(&g.reduce(&e), CycloScalar::int(rng.gen_range(-4..=4)));
    }
    f
}

fn euler_divisibility(rng: &mut ChaCha8Rng) -> Check {
    let groups = [DualGroup::free(1), DualGroup::free(2), DualGroup::new(1, vec![4]).expect("valid group")];
    let mut divisible = 0;
    for trial in 0..200 {
        let g = &groups[trial % groups.len()];
        let w = loop {
            let w: Vec<i64> = (0..g.dim()).map(|_| rng.gen_range(-2..=2)).collect();
            let w = g.reduce(&w);
            if g.has_infinite_order(&w) {
                break w;
            }
        };
        let f = if rng.gen_bool(0.5) {
            LaurentElement::euler_class(g, &w).mul(&random_laurent(rng, g, 3))
        } else {
            random_laurent(rng, g, 4)
        };
        let neg = g.neg(&w);
        let plus = divide_by_euler(&f, &w)?;
        let minus = divide_by_euler(&f, &neg)?;
        ensure(plus.is_divisible() == minus.is_divisible(), || {
            format!("f = {f}, w = {w:?}: divisibility by 1 - z^w and 1 - z^-w disagree")
        })?;
        if let (Some(q), Some(q_neg)) = (plus.quotient(), minus.quotient()) {
            divisible += 1;
            ensure(LaurentElement::euler_class(g, &w).mul(&q) == f, || format!("f = {f}, w = {w:?}: q(1 - z^w) ≠ f"))?;
            ensure(LaurentElement::euler_class(g, &neg).mul(&q_neg) == f, || {
                format!("f = {f}, w = {w:?}: q'(1 - z^-w) ≠ f")
            })?;
            let unit = LaurentElement::monomial(g, &w, CycloScalar::int(-1));
            ensure(q_neg == unit.mul(&q), || format!("f = {f}, w = {w:?}: quotients differ by more than -z^w"))?;
        }
    }
    Ok(format!("200 random (f, w), {divisible} divisible"))
}

fn random_point(rng: &mut ChaCha8Rng, g: &DualGroup) -> TorsionPoint {
    let coords = (0..g.dim())
        .map(|_| {
            let d = rng.gen_range(1..=12);
            rat(rng.gen_range(0..d), d)
        })
        .collect();
    TorsionPoint::new(g, coords).expect("coordinates in [0, 1)")
}

fn random_collection(rng: &mut ChaCha8Rng, g: &DualGroup) -> Result<Vec<Subgroup>> {
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let ngens = rng.gen_range(1..=g.dim());
        let gens: Vec<Vec<i64>> = (0..ngens)
            .map(|_| (0..g.dim()).map(|_| rng.gen_range(-4..=4)).collect())
            .collect();
        let m = Subgroup::canonical(g, &gens)?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

fn adapted_covers(rng: &mut ChaCha8Rng) -> Check {
    let groups = [DualGroup::free(1), DualGroup::free(2)];
    for trial in 0..20 {
        let g = &groups[trial % 2];
        let collection = random_collection(rng, g)?;
        let mut sample: Vec<TorsionPoint> = Vec::new();
        for _ in 0..rng.gen_range(2..=6) {
            let p = random_point(rng, g);
            if !sample.contains(&p) {
                sample.push(p);
            }
        }
        let cover = build_adapted(&collection, &sample)?;
        let report = verify_adapted(&cover, &collection)?;
        ensure(report.is_adapted(), || {
            format!("instance {trial}: built cover is not adapted: {:?}", report.violations)
        })?;
    }
    for (c, cover, collection) in examples::adapted_counterexamples() {
        let report = verify_adapted(&cover, &collection)?;
        ensure(report.condition(c).count() > 0, || format!("counterexample for condition {c} passes"))?;
    }
    Ok("20 random covers adapted; conditions 1-4 each refuted by a fixture".into())
}

fn product_dimensions() -> Check {
    let cp1 = examples::cp1_graph();
    let factor = gkm_dimensions(&cp1, 2);
    let product = gkm_dimensions(&product_graph(&cp1, &cp1), 2);
    let convolution: Vec<usize> = (0..=2).map(|d| (0..=d).map(|k| factor[k] * factor[d - k]).sum()).collect();
    ensure(factor == [1, 2, 2], || format!("CP1 dimensions {factor:?}"))?;
    ensure(product == convolution && product == [1, 4, 8], || {
        format!("CP1×CP1 dimensions {product:?}, convolution {convolution:?}")
    })?;
    Ok(format!("CP1×CP1 {product:?} = {factor:?} * {factor:?}"))
}

fn domination() -> Check {
    let mut names = Vec::new();
    for p in Presentation::bundled() {
        let cert = domination_certificate(&p, 6, None)?;
        ensure(cert.passes(), || {
            let bad = cert.rows.iter().find(|r| !r.holds).map_or(0, |r| r.n);
            format!("{}: cⁿ not dominated by 2n·λ^(2n-1) at n = {bad}", p.name)
        })?;
        names.push(format!("{} (λ = {})", p.name, cert.lambda));
    }
    Ok(format!("n ≤ 6 for {}", names.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_are_numbered_in_order() {
        for (i, (id, _)) in CRITERIA.iter().enumerate() {
            assert_eq!(usize::from(*id), i + 1);
        }
        assert!(run_criterion(11).is_none());
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [3, 6, 7, 9] {
            let r = run_criterion(id).unwrap();
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn reports_are_reproducible() {
        assert_eq!(run_criterion(7), run_criterion(7));
    }
}
