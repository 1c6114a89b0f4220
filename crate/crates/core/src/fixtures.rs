//! Small hand-built networks with known answers, and a checker that replays
//! them against the expected detection tables.
//!
//! Ids are 0-based: reader `R1` of a drawing is reader 0 here, tag `T1` is
//! tag 0.

use std::collections::BTreeSet;

use crate::algorithms::{self, AlgorithmId};
use crate::metrics;
use crate::network::{ExecutionOrder, ReaderId, RfidNetwork};

fn explicit(readers: usize, tags: usize, sets: &[&[usize]]) -> RfidNetwork {
    let relation: Vec<(usize, usize)> = sets
        .iter()
        .enumerate()
        .flat_map(|(r, s)| s.iter().map(move |&t| (r, t)))
        .collect();
    RfidNetwork::build_explicit(readers, tags, &relation).expect("fixture is well formed")
}

/// Three readers, five tags; the middle reader is redundant.
pub fn ex0() -> RfidNetwork {
    explicit(3, 5, &[&[0, 1], &[1, 2, 3], &[2, 3, 4]])
}

/// [`ex0`] with its last tag removed: simultaneous-query detection now
/// switches off two readers and uncovers tags 2 and 3.
pub fn ex0_without_t5() -> RfidNetwork {
    ex0().without_tag(4).expect("tag 4 exists")
}

/// Three readers in a chain over six tags; only the middle reader is
/// removable.
pub fn ex1() -> RfidNetwork {
    explicit(3, 6, &[&[0, 1, 2], &[1, 2, 3, 4], &[3, 4, 5]])
}

/// One large reader covering four tags flanked by two small ones.
pub fn ex2() -> RfidNetwork {
    explicit(3, 4, &[&[0, 1], &[0, 1, 2, 3], &[3]])
}

pub fn by_name(name: &str) -> Option<RfidNetwork> {
    match name.to_ascii_lowercase().as_str() {
        "ex0" => Some(ex0()),
        "ex0-t5" | "ex0_without_t5" | "ex0-minus-t5" => Some(ex0_without_t5()),
        "ex1" => Some(ex1()),
        "ex2" => Some(ex2()),
        _ => None,
    }
}

pub const NAMES: [&str; 4] = ["ex0", "ex0-t5", "ex1", "ex2"];

/// Expected detected set of [`ex1`] under every order (lexicographic), for
/// LEO, RRE, LEO+RRE and OA.
pub const EX1_ORDER_TABLE: [([ReaderId; 3], [&[ReaderId]; 4]); 6] = [
    ([0, 1, 2], [&[], &[], &[], &[1]]),
    ([0, 2, 1], [&[1], &[], &[1], &[1]]),
    ([1, 0, 2], [&[], &[], &[], &[1]]),
    ([1, 2, 0], [&[], &[], &[], &[1]]),
    ([2, 0, 1], [&[1], &[], &[1], &[1]]),
    ([2, 1, 0], [&[], &[], &[], &[1]]),
];

pub const TABLE_ALGORITHMS: [AlgorithmId; 4] = [
    AlgorithmId::Leo,
    AlgorithmId::Rre,
    AlgorithmId::LeoRre,
    AlgorithmId::Oa,
];

/// Expected POD as (optimal orders, all orders) for LEO, RRE, LEO+RRE, OA.
pub const EX1_POD: [(u64, u64); 4] = [(2, 6), (0, 6), (2, 6), (6, 6)];
pub const EX2_POD: [(u64, u64); 4] = [(2, 6), (6, 6), (6, 6), (6, 6)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, expected: impl std::fmt::Debug, got: impl std::fmt::Debug) -> FixtureCheck {
    let expected = format!("{expected:?}");
    let got = format!("{got:?}");
    FixtureCheck {
        name: name.into(),
        passed: expected == got,
        detail: format!("expected {expected}, got {got}"),
    }
}

fn set(ids: &[ReaderId]) -> BTreeSet<ReaderId> {
    ids.iter().copied().collect()
}

fn detect(alg: AlgorithmId, net: &RfidNetwork, order: &[ReaderId]) -> BTreeSet<ReaderId> {
    let order = ExecutionOrder::new(order.to_vec(), net.reader_count()).expect("fixture order");
    algorithms::run(alg, net, &order).expect("fixture run").redundant
}

fn pod_counts(net: &RfidNetwork, alg: AlgorithmId) -> (u64, u64) {
    let r = metrics::metrics(net, alg).expect("fixture metrics");
    (r.optimal_orders, r.orders_evaluated)
}

/// Replays every fixture against its expected table.
pub fn verify_all() -> Vec<FixtureCheck> {
    let mut out = Vec::new();
    let ex0 = ex0();
    let ex0_cut = ex0_without_t5();
    let ex1 = ex1();
    let ex2 = ex2();

    out.push(check(
        "ex0 naive detects R2",
        set(&[1]),
        algorithms::run_naive(&ex0).redundant,
    ));
    for alg in [AlgorithmId::Naive, AlgorithmId::Oa] {
        out.push(check(
            format!("ex0-t5 {alg} detects R2,R3"),
            set(&[1, 2]),
            detect(alg, &ex0_cut, &[0, 1, 2]),
        ));
    }
    out.push(check(
        "ex0-t5 removing R2,R3 uncovers T3,T4",
        set(&[2, 3]),
        metrics::verify_coverage(&ex0_cut, &set(&[1, 2]))
            .expect("ids in range")
            .uncovered,
    ));

    let rre = algorithms::run_rre(&ex2, &ExecutionOrder::ascending(3)).expect("fixture run");
    out.push(check(
        "ex2 rre R1>R2>R3 leaves (R2,4) on every tag",
        vec![(Some(1), 4); 4],
        rre.final_tags
            .iter()
            .map(|m| (m.holder, m.tag_count))
            .collect::<Vec<_>>(),
    ));
    out.push(check("ex2 rre R1>R2>R3 detects R1,R3", set(&[0, 2]), rre.redundant));

    let leo_holders = |order: &[ReaderId]| {
        let order = ExecutionOrder::new(order.to_vec(), 3).expect("fixture order");
        algorithms::run_leo(&ex1, &order)
            .expect("fixture run")
            .final_tags
            .iter()
            .map(|m| m.holder)
            .collect::<Vec<_>>()
    };
    out.push(check(
        "ex1 leo R1>R3>R2 holders",
        [0, 0, 0, 2, 2, 2].map(Some).to_vec(),
        leo_holders(&[0, 2, 1]),
    ));
    out.push(check(
        "ex1 leo R1>R2>R3 holders",
        [0, 0, 0, 1, 1, 2].map(Some).to_vec(),
        leo_holders(&[0, 1, 2]),
    ));

    for (order, expected) in EX1_ORDER_TABLE {
        for (alg, want) in TABLE_ALGORITHMS.iter().zip(expected) {
            let label = order.map(|r| format!("R{}", r + 1)).join(">");
            out.push(check(
                format!("ex1 order {label} {alg}"),
                set(want),
                detect(*alg, &ex1, &order),
            ));
        }
    }
    for (alg, want) in TABLE_ALGORITHMS.iter().zip(EX1_POD) {
        out.push(check(format!("ex1 pod {alg}"), want, pod_counts(&ex1, *alg)));
    }
    for (alg, want) in TABLE_ALGORITHMS.iter().zip(EX2_POD) {
        out.push(check(format!("ex2 pod {alg}"), want, pod_counts(&ex2, *alg)));
    }
    let leo = metrics::metrics(&ex2, AlgorithmId::Leo).expect("fixture metrics");
    out.push(check(
        "ex2 prd leo",
        (4u64, 6u64),
        (leo.detecting_orders, leo.orders_evaluated),
    ));
    out.push(check(
        "ex1 oa R2>R1>R3 detects R2",
        set(&[1]),
        detect(AlgorithmId::Oa, &ex1, &[1, 0, 2]),
    ));
    out.push(check(
        "ex2 oa R1>R2>R3 detects R1,R3",
        set(&[0, 2]),
        detect(AlgorithmId::Oa, &ex2, &[0, 1, 2]),
    ));
    out
}
