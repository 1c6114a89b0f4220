use rre_web::{deploy, deploy_view, fixture_text, network_view, order_table, order_table_view};

#[test]
fn deploy_runs_every_scheme() {
    let v = deploy_view(12, 40, 2000.0, 10_000.0, 5).unwrap();
    assert_eq!(v.readers.len(), 12);
    assert_eq!(v.tags.len(), 40);
    assert_eq!(v.results.len(), 6);
    let mut order = v.order.clone();
    order.sort();
    assert_eq!(order, (0..12).collect::<Vec<_>>());
    for r in &v.results {
        if ["rre", "leo", "leo_rre", "drre"].contains(&r.algorithm) {
            assert!(r.coverage_preserved, "{}", r.algorithm);
        }
        assert_eq!(r.coverage_preserved, r.uncovered.is_empty());
    }
    assert_eq!(deploy(12, 40, 2000.0, 10_000.0, 5), deploy(12, 40, 2000.0, 10_000.0, 5));
}

#[test]
fn order_table_matches_fixture() {
    let t = order_table_view("ex1").unwrap();
    assert_eq!(t.optimal, 1);
    assert_eq!(t.rows.len(), 6);
    let oa = t.algorithms.iter().position(|a| *a == "oa").unwrap();
    let leo = t.algorithms.iter().position(|a| *a == "leo").unwrap();
    assert_eq!(t.pod[oa], 1.0);
    assert!((t.pod[leo] - 1.0 / 3.0).abs() < 1e-12);
    let leo_hits: Vec<_> = t
        .rows
        .iter()
        .filter(|r| r.detected[leo] == vec![1])
        .map(|r| r.order.clone())
        .collect();
    assert_eq!(leo_hits, vec![vec![0, 2, 1], vec![2, 0, 1]]);
}

#[test]
fn network_text_round_trip() {
    let v = network_view(&fixture_text("ex2"), "1,0,2").unwrap();
    let leo = v.results.iter().find(|r| r.algorithm == "leo").unwrap();
    assert_eq!(leo.redundant, vec![0, 2]);
    assert_eq!(v.order, vec![1, 0, 2]);
}

#[test]
fn errors_are_json() {
    assert!(order_table("nope").contains("\"error\""));
    assert!(rre_web::run_network("garbage", "").contains("\"error\""));
    assert!(deploy(0, 5, 1.0, 10.0, 1).contains("\"error\""));
}
