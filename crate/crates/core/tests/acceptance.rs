//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rre_core::algorithms::{self, AlgorithmId};
use rre_core::experiment::{csv_string, run_plan, summarize, PointSummary, RunOptions};
use rre_core::fixtures::{self, EX1_ORDER_TABLE, TABLE_ALGORITHMS};
use rre_core::metrics::{self, oa_characterization, verify_coverage};
use rre_core::scenario::{ExperimentPlan, ScenarioConfig, SweepParam};
use rre_core::{ExecutionOrder, RfidNetwork};

const FIXTURE_BUDGET: Duration = Duration::from_secs(1);
const SWEEP_BUDGET: Duration = Duration::from_secs(120);
const CORPUS_SIZE: usize = 1000;
const CORPUS_SEED: u64 = 0x5eed_2013;
const SWEEP_SEED: u64 = 20_130_601;
const SWEEP_TRIALS: usize = 20;
const SWEEP_TAG_COUNTS: [usize; 3] = [200, 1000, 4000];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn set(ids: &[usize]) -> BTreeSet<usize> {
    ids.iter().copied().collect()
}

fn pod_counts(net: &RfidNetwork, alg: AlgorithmId) -> (u64, u64) {
    let r = metrics::metrics(net, alg).expect("metrics");
    (r.optimal_orders, r.orders_evaluated)
}

fn percent_floor((num, den): (u64, u64)) -> u64 {
    100 * num / den
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ex1 = fixtures::ex1();
    for (order, expected) in EX1_ORDER_TABLE {
        let order = ExecutionOrder::new(order.to_vec(), 3).unwrap();
        for (alg, want) in TABLE_ALGORITHMS.iter().zip(expected) {
            let got = algorithms::run(*alg, &ex1, &order).unwrap().redundant;
            ensure(got == set(want), || {
                format!("order {order} {alg}: expected {want:?}, got {got:?}")
            })?;
        }
    }
    let pods: Vec<u64> = TABLE_ALGORITHMS
        .iter()
        .map(|&a| percent_floor(pod_counts(&ex1, a)))
        .collect();
    ensure(pods == [33, 0, 33, 100], || format!("POD % {pods:?}"))?;
    let exact: Vec<_> = TABLE_ALGORITHMS.iter().map(|&a| pod_counts(&ex1, a)).collect();
    ensure(exact == [(2, 6), (0, 6), (2, 6), (6, 6)], || format!("POD {exact:?}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < FIXTURE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("24 cells match, POD 33/0/33/100%, {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let ex2 = fixtures::ex2();
    let exact: Vec<_> = TABLE_ALGORITHMS.iter().map(|&a| pod_counts(&ex2, a)).collect();
    ensure(exact == [(2, 6), (6, 6), (6, 6), (6, 6)], || format!("POD {exact:?}"))?;
    let leo = metrics::metrics(&ex2, AlgorithmId::Leo).unwrap();
    ensure(
        (leo.detecting_orders, leo.orders_evaluated) == (4, 6)
            && percent_floor((leo.detecting_orders, 6)) == 66
            && percent_floor((leo.optimal_orders, 6)) == 33,
        || format!("LEO prd {}/6 pod {}/6", leo.detecting_orders, leo.optimal_orders),
    )?;
    let rre = algorithms::run_rre(&ex2, &ExecutionOrder::ascending(3)).unwrap();
    let state: Vec<_> = rre.final_tags.iter().map(|m| (m.holder, m.tag_count)).collect();
    ensure(state == vec![(Some(1), 4); 4], || format!("RRE tags {state:?}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < FIXTURE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "POD 33/100/100/100%, PRD(LEO) 66%, RRE (R2,4) x4, {elapsed:?}"
    ))
}

fn criterion_3() -> Outcome {
    let net = fixtures::ex0_without_t5();
    let naive = algorithms::run_naive(&net).redundant;
    ensure(naive == set(&[1, 2]), || format!("naive {naive:?}"))?;
    for order in (0..3).permutations(3) {
        let order = ExecutionOrder::new(order, 3).unwrap();
        let oa = algorithms::run_oa(&net, &order).unwrap().redundant;
        ensure(oa == set(&[1, 2]), || format!("OA {order}: {oa:?}"))?;
    }
    let verdict = verify_coverage(&net, &set(&[1, 2])).unwrap();
    ensure(verdict.uncovered == set(&[2, 3]), || {
        format!("uncovered {:?}", verdict.uncovered)
    })?;
    Ok("naive = OA = {R2,R3}; uncovered {T3,T4}".into())
}

/// 1000 random explicit networks, M ≤ 6, N ≤ 12.
fn corpus() -> Vec<RfidNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|_| {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(0..=12);
            let density = rng.gen_range(0.15..0.7);
            let relation: Vec<(usize, usize)> = (0..m)
                .cartesian_product(0..n)
                .filter(|_| rng.gen_bool(density))
                .collect();
            RfidNetwork::build_explicit(m, n, &relation).unwrap()
        })
        .collect()
}

fn all_orders(net: &RfidNetwork) -> impl Iterator<Item = ExecutionOrder> + '_ {
    let m = net.reader_count();
    (0..m)
        .permutations(m)
        .map(move |p| ExecutionOrder::new(p, m).unwrap())
}

fn criterion_4(corpus: &[RfidNetwork]) -> Outcome {
    let mut runs = 0u64;
    let mut violations = Vec::new();
    for (idx, net) in corpus.iter().enumerate() {
        let covered = net.covered_tag_count() as u64;
        let sum = net.total_coverage() as u64;
        for order in all_orders(net) {
            let w = |a| algorithms::run(a, net, &order).unwrap().writes_total;
            let (leo, oa, rre, drre) = (
                w(AlgorithmId::Leo),
                w(AlgorithmId::Oa),
                w(AlgorithmId::Rre),
                w(AlgorithmId::Drre),
            );
            runs += 1;
            if leo != covered {
                violations.push(format!("net {idx} {order}: LEO {leo} != {covered}"));
            }
            if oa > 3 * net.tag_count() as u64 {
                violations.push(format!("net {idx} {order}: OA {oa} > 3N"));
            }
            if rre > sum {
                violations.push(format!("net {idx} {order}: RRE {rre} > {sum}"));
            }
            if !(sum <= drre && drre <= 2 * sum) {
                violations.push(format!("net {idx} {order}: DRRE {drre} vs {sum}"));
            }
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first: {}", violations.len(), violations[0])
    })?;
    Ok(format!("{} networks, {runs} orders, zero violations", corpus.len()))
}

fn criterion_5(corpus: &[RfidNetwork]) -> Outcome {
    const SAFE: [AlgorithmId; 4] = [
        AlgorithmId::Leo,
        AlgorithmId::Rre,
        AlgorithmId::LeoRre,
        AlgorithmId::Drre,
    ];
    let mut runs = 0u64;
    let mut violations = Vec::new();
    for (idx, net) in corpus.iter().enumerate() {
        let expected = oa_characterization(net);
        let naive = algorithms::run_naive(net).redundant;
        if naive != expected {
            violations.push(format!("net {idx}: naive {naive:?} != {expected:?}"));
        }
        for order in all_orders(net) {
            runs += 1;
            let oa = algorithms::run_oa(net, &order).unwrap().redundant;
            if oa != expected {
                violations.push(format!("net {idx} {order}: OA {oa:?} != {expected:?}"));
            }
            for alg in SAFE {
                let detected = algorithms::run(alg, net, &order).unwrap().redundant;
                if !verify_coverage(net, &detected).unwrap().preserved {
                    violations.push(format!("net {idx} {order}: {alg} uncovers"));
                }
            }
        }
        for alg in SAFE {
            let r = metrics::metrics(net, alg).unwrap();
            if r.filtered_orders != 0 || r.violation_orders != 0 {
                violations.push(format!("net {idx}: {alg} safety filter triggered"));
            }
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first: {}", violations.len(), violations[0])
    })?;
    Ok(format!("{} networks, {runs} orders, zero violations", corpus.len()))
}

fn sweep_plan() -> ExperimentPlan {
    let sweep = SWEEP_TAG_COUNTS
        .iter()
        .map(|&nt| ScenarioConfig::new(100, nt, 500.0, 0))
        .collect();
    ExperimentPlan::custom("A6", 0, SweepParam::TagCount, sweep, SWEEP_TRIALS, SWEEP_SEED)
        .expect("valid plan")
}

fn mean(summary: &[PointSummary], nt: usize, alg: AlgorithmId) -> &PointSummary {
    summary
        .iter()
        .find(|s| s.param_value == nt as f64 && s.algorithm == alg)
        .expect("point present")
}

/// Criterion 6 split into its three trend checks.
fn criterion_6(csv: &mut Option<String>) -> Vec<(&'static str, Outcome)> {
    let start = Instant::now();
    let plan = sweep_plan();
    let rows = run_plan(&plan, RunOptions::default());
    let elapsed = start.elapsed();
    *csv = Some(csv_string(&rows));
    let summary = summarize(&rows);

    let detection = (|| {
        for nt in SWEEP_TAG_COUNTS {
            let oa = mean(&summary, nt, AlgorithmId::Oa).mean_detected;
            for alg in [AlgorithmId::Leo, AlgorithmId::Rre, AlgorithmId::LeoRre, AlgorithmId::Drre] {
                let other = mean(&summary, nt, alg).mean_detected;
                ensure(oa >= other, || format!("NT={nt}: OA {oa:.2} < {alg} {other:.2}"))?;
            }
        }
        ensure(elapsed < SWEEP_BUDGET, || format!("sweep took {elapsed:?}"))?;
        Ok(format!("OA mean detected highest at NT 200/1000/4000, sweep {elapsed:?}"))
    })();

    let writes = (|| {
        let mut report = Vec::new();
        let mut failures = Vec::new();
        for nt in SWEEP_TAG_COUNTS {
            let w = |a| mean(&summary, nt, a).mean_writes;
            let chain = [
                (AlgorithmId::Leo, w(AlgorithmId::Leo)),
                (AlgorithmId::Oa, w(AlgorithmId::Oa)),
                (AlgorithmId::Rre, w(AlgorithmId::Rre)),
                (AlgorithmId::Drre, w(AlgorithmId::Drre)),
            ];
            report.push(format!(
                "NT={nt}: {}",
                chain.iter().map(|(a, v)| format!("{a}={v:.1}")).join(" ")
            ));
            for pair in chain.windows(2) {
                if pair[0].1 > pair[1].1 {
                    failures.push(format!("NT={nt}: {} > {}", pair[0].0, pair[1].0));
                }
            }
        }
        let report = report.join("; ");
        if failures.is_empty() {
            Ok(report)
        } else {
            Err(format!("{} [{}]", failures.join(", "), report))
        }
    })();

    let degradation = (|| {
        let ratios: Vec<f64> = SWEEP_TAG_COUNTS
            .iter()
            .map(|&nt| {
                mean(&summary, nt, AlgorithmId::Rre).mean_detected
                    / mean(&summary, nt, AlgorithmId::Oa).mean_detected
            })
            .collect();
        ensure(ratios.windows(2).all(|w| w[1] < w[0]), || {
            format!("RRE/OA detection ratio not falling: {ratios:.3?}")
        })?;
        Ok(format!("RRE/OA detection ratio {ratios:.3?}"))
    })();

    vec![
        ("6a", detection),
        ("6b", writes),
        ("6c", degradation),
    ]
}

fn criterion_7(first: Option<&str>) -> Outcome {
    let first = first.ok_or("criterion 6 did not produce a CSV")?;
    let plan = sweep_plan();
    let again = csv_string(&run_plan(&plan, RunOptions::default()));
    let serial = csv_string(&run_plan(&plan, RunOptions { workers: 1, timing: false }));
    ensure(again == first, || "rerun differs".into())?;
    ensure(serial == first, || "serial run differs".into())?;
    Ok(format!("{} bytes identical across reruns and worker counts", first.len()))
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1", criterion_1()),
        ("2", criterion_2()),
        ("3", criterion_3()),
    ];
    let corpus = corpus();
    results.push(("4", criterion_4(&corpus)));
    results.push(("5", criterion_5(&corpus)));
    let mut csv = None;
    results.extend(criterion_6(&mut csv));
    results.push(("7", criterion_7(csv.as_deref())));

    let mut failed = 0;
    for (id, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {id}: PASS  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id}: FAIL  {detail}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", results.len());
        ExitCode::FAILURE
    }
}
