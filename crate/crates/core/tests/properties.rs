use num::BigRational;
use proptest::prelude::*;

use gkmforge::algebra::{divide_by_euler, eval_at_point, CycloScalar, LaurentElement};
use gkmforge::chern::{chern_character, LineSummand, SplitBundle};
use gkmforge::cover::{build_adapted, verify_adapted};
use gkmforge::gkm::{check_class, image_basis, Class, Edge, MomentGraph, Theory};
use gkmforge::lattice::point::rat;
use gkmforge::lattice::{annihilator_of_point, in_subvariety, prec, DualGroup, Subgroup, TorsionPoint};
use gkmforge::tcw::{fixed_subcomplex, one_skeleton, Cell, Selector, TCWComplex};

fn groups() -> Vec<DualGroup> {
    vec![
        DualGroup::free(1),
        DualGroup::free(2),
        DualGroup::new(1, vec![4]).unwrap(),
        DualGroup::new(0, vec![6]).unwrap(),
        DualGroup::new(1, vec![2, 6]).unwrap(),
    ]
}

fn group() -> impl Strategy<Value = DualGroup> {
    (0..groups().len()).prop_map(|i| groups()[i].clone())
}

fn element(g: &DualGroup, bound: i64) -> impl Strategy<Value = Vec<i64>> {
    let g = g.clone();
    proptest::collection::vec(-bound..=bound, g.dim()).prop_map(move |v| g.reduce(&v))
}

fn subgroup(g: &DualGroup) -> impl Strategy<Value = Subgroup> {
    let g = g.clone();
    proptest::collection::vec(element(&g, 4), 0..=2).prop_map(move |gens| Subgroup::canonical(&g, &gens).unwrap())
}

fn point(g: &DualGroup) -> impl Strategy<Value = TorsionPoint> {
    let g = g.clone();
    proptest::collection::vec((0i64..12, 1i64..=12), g.dim()).prop_map(move |cs| {
        let coords = cs
            .iter()
            .enumerate()
            .map(|(i, &(n, d))| {
                // torsion coordinates live in (1/m)Z for a factor Z/m
                let d = if i < g.free_rank() { d } else { g.torsion()[i - g.free_rank()] };
                rat(n % d, d)
            })
            .collect();
        TorsionPoint::new(&g, coords).unwrap()
    })
}

fn laurent(g: &DualGroup, terms: usize) -> impl Strategy<Value = LaurentElement> {
    let g = g.clone();
    proptest::collection::vec((element(&g, 3), -4i64..=4), 0..=terms).prop_map(move |ts| {
        let mut f = LaurentElement::zero(&g);
        for (e, c) in ts {
            f.add_term(&e, CycloScalar::int(c));
        }
        f
    })
}

fn infinite_order(g: &DualGroup) -> impl Strategy<Value = Vec<i64>> {
    let g2 = g.clone();
    element(g, 3).prop_filter("infinite order", move |w| g2.has_infinite_order(w))
}

fn free_group() -> impl Strategy<Value = DualGroup> {
    prop_oneof![Just(DualGroup::free(1)), Just(DualGroup::free(2)), Just(DualGroup::new(1, vec![3]).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subgroup_order_is_sum_compatible((a, b) in group().prop_flat_map(|g| (subgroup(&g), subgroup(&g)))) {
        let s = a.sum(&b).unwrap();
        prop_assert!(a.is_subgroup_of(&s).unwrap() && b.is_subgroup_of(&s).unwrap());
        prop_assert_eq!(a.is_subgroup_of(&b).unwrap(), s == b);
    }

    #[test]
    fn points_kill_exactly_their_annihilator((alpha, m) in group().prop_flat_map(|g| (point(&g), subgroup(&g)))) {
        let m_alpha = annihilator_of_point(&alpha);
        prop_assert!(in_subvariety(&alpha, &m_alpha).unwrap());
        prop_assert_eq!(in_subvariety(&alpha, &m).unwrap(), m.is_subgroup_of(&m_alpha).unwrap());
    }

    #[test]
    fn larger_annihilators_cut_smaller_subvarieties(
        (alpha, m, n) in group().prop_flat_map(|g| (point(&g), subgroup(&g), subgroup(&g)))
    ) {
        let mn = m.sum(&n).unwrap();
        if in_subvariety(&alpha, &mn).unwrap() {
            prop_assert!(in_subvariety(&alpha, &m).unwrap());
        }
    }

    #[test]
    fn prec_is_a_preorder(
        (a, b, c, coll) in group().prop_flat_map(|g| (
            point(&g), point(&g), point(&g), proptest::collection::vec(subgroup(&g), 1..4)
        ))
    ) {
        prop_assert!(prec(&a, &a, &coll).unwrap());
        if prec(&a, &b, &coll).unwrap() && prec(&b, &c, &coll).unwrap() {
            prop_assert!(prec(&a, &c, &coll).unwrap());
        }
    }

    #[test]
    fn euler_divisibility_is_symmetric_in_the_sign(
        (f, w, q) in free_group().prop_flat_map(|g| (laurent(&g, 4), infinite_order(&g), laurent(&g, 3)))
    ) {
        let g = f.ambient().clone();
        let neg = g.neg(&w);
        for f in [f.clone(), LaurentElement::euler_class(&g, &w).mul(&q)] {
            let plus = divide_by_euler(&f, &w).unwrap();
            let minus = divide_by_euler(&f, &neg).unwrap();
            prop_assert_eq!(plus.is_divisible(), minus.is_divisible());
            if let (Some(a), Some(b)) = (plus.quotient(), minus.quotient()) {
                prop_assert_eq!(LaurentElement::euler_class(&g, &w).mul(&a), f.clone());
                prop_assert_eq!(b, LaurentElement::monomial(&g, &w, CycloScalar::int(-1)).mul(&a));
            }
        }
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        (f, h, alpha) in group().prop_flat_map(|g| (laurent(&g, 3), laurent(&g, 3), point(&g)))
    ) {
        let ef = eval_at_point(&f, &alpha).unwrap();
        let eh = eval_at_point(&h, &alpha).unwrap();
        prop_assert_eq!(eval_at_point(&f.mul(&h), &alpha).unwrap(), &ef * &eh);
        prop_assert_eq!(eval_at_point(&f.add(&h), &alpha).unwrap(), &ef + &eh);
    }

    #[test]
    fn gkm_check_ignores_edge_orientation(flip in proptest::collection::vec(any::<bool>(), 3), coeffs in proptest::collection::vec(-2i64..=2, 9), bump in -1i64..=1) {
        let g = gkmforge::examples::cp2_graph();
        let edges: Vec<Edge> = g.edges().iter().zip(&flip).map(|(e, &f)| if f {
            Edge { u: e.v, v: e.u, weight: e.weight.iter().map(|x| -x).collect() }
        } else {
            e.clone()
        }).collect();
        let flipped = MomentGraph::new(g.ambient(), g.vertices().to_vec(), edges).unwrap();
        let basis = image_basis(&g, Theory::H, 1).unwrap();
        let mut entries = vec![gkmforge::algebra::Poly::zero(2); 3];
        for (c, coeff) in basis.iter().zip(&coeffs) {
            let Class::H(b) = c else { unreachable!() };
            for (e, p) in entries.iter_mut().zip(b) {
                *e = e.add(&p.scale(&CycloScalar::int(*coeff)));
            }
        }
        entries[0] = entries[0].add(&gkmforge::algebra::Poly::var(2, 0).scale(&CycloScalar::int(bump)));
        let class = Class::H(entries);
        prop_assert_eq!(check_class(&g, &class).unwrap().passes(), check_class(&flipped, &class).unwrap().passes());
        prop_assert_eq!(check_class(&g, &class).unwrap().passes(), bump == 0);
    }

    #[test]
    fn shrinking_an_adapted_cover_keeps_it_adapted(
        (coll, sample, k) in prop_oneof![Just(DualGroup::free(1)), Just(DualGroup::free(2))].prop_flat_map(|g| (
            proptest::collection::vec(subgroup(&g), 0..3),
            proptest::collection::vec(point(&g), 1..5),
            1i64..8,
        ))
    ) {
        let mut distinct: Vec<TorsionPoint> = Vec::new();
        for p in sample {
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
        let cover = build_adapted(&coll, &distinct).unwrap();
        prop_assert!(verify_adapted(&cover, &coll).unwrap().is_adapted());
        let shrunk = cover.scaled(&rat(k, 8));
        prop_assert!(verify_adapted(&shrunk, &coll).unwrap().is_adapted());
    }

    #[test]
    fn point_fixed_subcomplexes_match_isotropy(
        (cells, alpha, m) in group().prop_flat_map(|g| (
            proptest::collection::vec((0usize..3, subgroup(&g)), 0..6), point(&g), subgroup(&g)
        ))
    ) {
        let g = alpha.ambient().clone();
        let x = TCWComplex::new(&g, cells.into_iter().map(|(dim, isotropy)| Cell { dim, isotropy }).collect()).unwrap();
        let m_alpha = annihilator_of_point(&alpha);
        prop_assert_eq!(
            fixed_subcomplex(&x, Selector::Point(&alpha)).unwrap(),
            fixed_subcomplex(&x, Selector::Subgroup(&m_alpha)).unwrap()
        );
        // a smaller annihilator means a larger subgroup, hence fewer fixed cells
        let smaller = m.sum(&m_alpha).unwrap();
        let big = fixed_subcomplex(&x, Selector::Subgroup(&smaller)).unwrap();
        let small = fixed_subcomplex(&x, Selector::Subgroup(&m)).unwrap();
        prop_assert!(small.cells().iter().all(|c| big.cells().contains(c)));
        let skel = one_skeleton(&x);
        prop_assert_eq!(one_skeleton(&skel), skel.clone());
        prop_assert!(skel.cells().iter().all(|c| c.isotropy.rank() <= 1));
    }

    #[test]
    fn chern_character_is_additive_and_multiplicative(
        (g, a, b, cutoff) in free_group().prop_flat_map(|g| (
            Just(g.clone()),
            proptest::collection::vec(element(&g, 3), 1..3),
            proptest::collection::vec(element(&g, 3), 1..3),
            0u32..5,
        ))
    ) {
        let bundle = |cs: &[Vec<i64>]| SplitBundle::new(&g, cs.iter().map(|c| LineSummand::new(c.clone())).collect()).unwrap();
        let (e, f) = (bundle(&a), bundle(&b));
        let ch = |x: &SplitBundle| chern_character(x, cutoff);
        prop_assert_eq!(ch(&e.direct_sum(&f)), ch(&e).add(&ch(&f)));
        prop_assert_eq!(ch(&e.tensor(&f)), ch(&e).mul(&ch(&f)));
        let rank = BigRational::from_integer((a.len() as i64).into());
        prop_assert_eq!(ch(&e).poly().coeff(&vec![0; g.free_rank()]), CycloScalar::rational(rank));
    }
}
