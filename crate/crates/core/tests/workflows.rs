use gkmforge::cover::{build_adapted, verify_adapted};
use gkmforge::examples::{cp1_graph, cp2_graph, graph_collection};
use gkmforge::gkm::{gkm_dimensions, product_graph};
use gkmforge::ingest::{self, fan_to_graph, Document, Fan};
use gkmforge::lattice::point::rat;
use gkmforge::lattice::TorsionPoint;

#[test]
fn bundled_documents_survive_a_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for (name, doc) in ingest::bundled_documents() {
        let path = dir.path().join(format!("{name}.json"));
        ingest::save(&doc, &path).unwrap();
        let back = ingest::load(&path).unwrap();
        assert_eq!(ingest::to_string(&back), ingest::to_string(&doc), "{name}");
    }
}

#[test]
fn surfaces_with_four_fixed_points_share_gkm_dimensions() {
    let expected = gkm_dimensions(&product_graph(&cp1_graph(), &cp1_graph()), 3);
    assert_eq!(&expected[..3], &[1, 4, 8]);
    for fan in [Fan::p1_times_p1(), Fan::hirzebruch(1), Fan::hirzebruch(2)] {
        let g = fan_to_graph(&fan).unwrap();
        assert_eq!(gkm_dimensions(&g, 3), expected);
    }
    let cp2 = fan_to_graph(&Fan::projective(2)).unwrap();
    assert_eq!(gkm_dimensions(&cp2, 3), gkm_dimensions(&cp2_graph(), 3));
}

#[test]
fn covers_built_from_a_graph_verify_after_reloading() {
    let g = cp2_graph();
    let a = graph_collection(&g);
    let pts: Vec<TorsionPoint> = [(0, 1), (1, 2), (1, 3)]
        .iter()
        .flat_map(|&(n, d)| {
            let g = g.ambient().clone();
            [
                TorsionPoint::new(&g, vec![rat(n, d), rat(0, 1)]).unwrap(),
                TorsionPoint::new(&g, vec![rat(n, d), rat(n, d)]).unwrap(),
            ]
        })
        .fold(Vec::new(), |mut acc, p| {
            if !acc.contains(&p) {
                acc.push(p);
            }
            acc
        });
    let cover = build_adapted(&a, &pts).unwrap();
    let text = ingest::to_string(&Document::Cover(cover));
    let Document::Cover(back) = ingest::parse(&text).unwrap() else {
        panic!("expected a cover");
    };
    assert!(verify_adapted(&back, &a).unwrap().is_adapted());
}
