//! Ground-truth oracles and order-enumeration metrics.
//!
//! POD is the fraction of all M! execution orders in which a scheme detects
//! the optimal number of removable readers without breaking coverage. PRD is
//! the fraction of orders in which it flags at least one reader.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use itertools::Itertools;
use thiserror::Error;

use crate::algorithms::{self, AlgorithmError, AlgorithmId};
use crate::network::{ExecutionOrder, ReaderId, RfidNetwork, TagId};

/// Largest reader count for exhaustive subset search.
pub const MAX_SUBSET_READERS: usize = 20;
/// Largest reader count for enumerating every execution order.
pub const MAX_PERMUTATION_READERS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{what} needs at most {limit} readers, network has {got}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    #[error("reader {0} does not exist")]
    UnknownReader(ReaderId),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageVerdict {
    pub preserved: bool,
    pub uncovered: BTreeSet<TagId>,
}

/// Tags that were covered initially but lose every coverer once `removed`
/// is switched off.
pub fn verify_coverage(
    net: &RfidNetwork,
    removed: &BTreeSet<ReaderId>,
) -> Result<CoverageVerdict, MetricsError> {
    if let Some(&bad) = removed.iter().find(|&&r| r >= net.reader_count()) {
        return Err(MetricsError::UnknownReader(bad));
    }
    let uncovered: BTreeSet<TagId> = net
        .covered_tags()
        .filter(|&t| {
            net.coverers(t)
                .expect("tag in range")
                .iter()
                .all(|r| removed.contains(r))
        })
        .collect();
    Ok(CoverageVerdict {
        preserved: uncovered.is_empty(),
        uncovered,
    })
}

/// Readers none of whose tags is covered by them alone.
pub fn oa_characterization(net: &RfidNetwork) -> BTreeSet<ReaderId> {
    let type1 = net.type1_tags();
    (0..net.reader_count())
        .filter(|&r| net.covered(r).iter().all(|t| !type1.contains(t)))
        .collect()
}

/// Distinct coverer bitmasks of covered tags.
fn coverer_masks(net: &RfidNetwork) -> Vec<u32> {
    let masks: BTreeSet<u32> = net
        .covered_tags()
        .map(|t| {
            net.coverers(t)
                .expect("tag in range")
                .iter()
                .fold(0u32, |m, &r| m | (1 << r))
        })
        .collect();
    masks.into_iter().collect()
}

/// Size of the largest reader set whose removal keeps every initially
/// covered tag covered. Exhaustive branch and bound; refuses above
/// [`MAX_SUBSET_READERS`].
pub fn optimal_redundant_count(net: &RfidNetwork) -> Result<usize, MetricsError> {
    let m = net.reader_count();
    if m > MAX_SUBSET_READERS {
        return Err(MetricsError::GuardExceeded {
            what: "optimal redundancy search",
            limit: MAX_SUBSET_READERS,
            got: m,
        });
    }
    let masks = coverer_masks(net);
    // A reader that is the sole coverer of some tag can never be removed.
    let pinned = masks
        .iter()
        .filter(|m| m.count_ones() == 1)
        .fold(0u32, |acc, m| acc | m);
    let candidates: Vec<usize> = (0..m).filter(|r| pinned & (1 << r) == 0).collect();

    fn search(
        idx: usize,
        removed: u32,
        count: usize,
        candidates: &[usize],
        masks: &[u32],
        best: &mut usize,
    ) {
        if count + (candidates.len() - idx) <= *best {
            return;
        }
        if idx == candidates.len() {
            *best = count;
            return;
        }
        let with = removed | (1 << candidates[idx]);
        if masks.iter().all(|mask| mask & !with != 0) {
            search(idx + 1, with, count + 1, candidates, masks, best);
        }
        search(idx + 1, removed, count, candidates, masks, best);
    }

    let mut best = 0;
    search(0, 0, 0, &candidates, &masks, &mut best);
    Ok(best)
}

/// A feasible (not necessarily optimal) removable count for networks of any
/// size: readers are tried in ascending |S_i| and removed whenever every one
/// of their tags still has another active coverer.
pub fn greedy_redundant_count(net: &RfidNetwork) -> usize {
    let mut active_cover: Vec<usize> = (0..net.tag_count())
        .map(|t| net.multiplicity(t).expect("tag in range"))
        .collect();
    let mut readers: Vec<ReaderId> = (0..net.reader_count()).collect();
    readers.sort_by_key(|&r| (net.covered(r).len(), r));
    let mut removed = 0;
    for r in readers {
        if net.covered(r).iter().all(|&t| active_cover[t] >= 2) {
            for &t in net.covered(r) {
                active_cover[t] -= 1;
            }
            removed += 1;
        }
    }
    removed
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderOutcome {
    pub order: ExecutionOrder,
    pub detected: BTreeSet<ReaderId>,
    pub safe: bool,
}

/// Runs `algorithm` under every execution order, lexicographically.
pub fn evaluate_orders(
    net: &RfidNetwork,
    algorithm: AlgorithmId,
) -> Result<Vec<OrderOutcome>, MetricsError> {
    let m = net.reader_count();
    if m > MAX_PERMUTATION_READERS {
        return Err(MetricsError::GuardExceeded {
            what: "order enumeration",
            limit: MAX_PERMUTATION_READERS,
            got: m,
        });
    }
    (0..m)
        .permutations(m)
        .map(|perm| {
            let order = ExecutionOrder::new(perm, m).expect("permutation");
            let detected = algorithms::run(algorithm, net, &order)?.redundant;
            let safe = verify_coverage(net, &detected)?.preserved;
            Ok(OrderOutcome {
                order,
                detected,
                safe,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub algorithm: AlgorithmId,
    pub pod: f64,
    pub prd: f64,
    pub optimal: usize,
    pub orders_evaluated: u64,
    /// Orders counted towards POD.
    pub optimal_orders: u64,
    /// Orders counted towards PRD.
    pub detecting_orders: u64,
    /// Number of orders per detected-set size.
    pub per_order_detected: BTreeMap<usize, u64>,
    /// Orders whose detected set uncovers a tag.
    pub violation_orders: u64,
    /// Orders that reached the optimal size but were excluded from POD
    /// because they break coverage.
    pub filtered_orders: u64,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str =
        "network,algorithm,pod,prd,optimal,orders_evaluated,violation_orders,filtered_orders,histogram";

    /// One CSV row. The histogram is `size:count` pairs joined by `;`.
    pub fn to_csv_row(&self, network: &str) -> String {
        let mut hist = String::new();
        for (i, (size, n)) in self.per_order_detected.iter().enumerate() {
            if i > 0 {
                hist.push(';');
            }
            let _ = write!(hist, "{size}:{n}");
        }
        format!(
            "{network},{},{:.6},{:.6},{},{},{},{},{hist}",
            self.algorithm,
            self.pod,
            self.prd,
            self.optimal,
            self.orders_evaluated,
            self.violation_orders,
            self.filtered_orders
        )
    }
}

pub fn metrics(net: &RfidNetwork, algorithm: AlgorithmId) -> Result<MetricsReport, MetricsError> {
    let outcomes = evaluate_orders(net, algorithm)?;
    let optimal = optimal_redundant_count(net)?;
    let mut report = MetricsReport {
        algorithm,
        pod: 0.0,
        prd: 0.0,
        optimal,
        orders_evaluated: outcomes.len() as u64,
        optimal_orders: 0,
        detecting_orders: 0,
        per_order_detected: BTreeMap::new(),
        violation_orders: 0,
        filtered_orders: 0,
    };
    for o in &outcomes {
        let size = o.detected.len();
        *report.per_order_detected.entry(size).or_default() += 1;
        if size >= 1 {
            report.detecting_orders += 1;
        }
        if !o.safe {
            report.violation_orders += 1;
        }
        if size == optimal {
            if o.safe {
                report.optimal_orders += 1;
            } else {
                report.filtered_orders += 1;
            }
        }
    }
    let total = report.orders_evaluated as f64;
    report.pod = report.optimal_orders as f64 / total;
    report.prd = report.detecting_orders as f64 / total;
    Ok(report)
}

pub fn pod(net: &RfidNetwork, algorithm: AlgorithmId) -> Result<f64, MetricsError> {
    metrics(net, algorithm).map(|r| r.pod)
}

pub fn prd(net: &RfidNetwork, algorithm: AlgorithmId) -> Result<f64, MetricsError> {
    metrics(net, algorithm).map(|r| r.prd)
}
