//! Redundant-reader detection schemes.
//!
//! Every scheme is a pure function of `(network, execution order)`. Readers
//! take turns in the given order and communicate only through tag memory.
//! All comparisons are strict, so on ties the earlier writer keeps a tag.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::network::{write_id_list, ExecutionOrder, OrderError, ReaderId, RfidNetwork};
use crate::tag_memory::{MemoryError, Mutation, TagArena, TagMemory, TagStatus, TagWrite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    Naive,
    Rre,
    Leo,
    LeoRre,
    Oa,
    Drre,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 6] = [
        AlgorithmId::Naive,
        AlgorithmId::Rre,
        AlgorithmId::Leo,
        AlgorithmId::LeoRre,
        AlgorithmId::Oa,
        AlgorithmId::Drre,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::Naive => "naive",
            AlgorithmId::Rre => "rre",
            AlgorithmId::Leo => "leo",
            AlgorithmId::LeoRre => "leo_rre",
            AlgorithmId::Oa => "oa",
            AlgorithmId::Drre => "drre",
        }
    }

    /// Whether the scheme's detected set is guaranteed not to break coverage.
    pub fn is_coverage_safe(self) -> bool {
        !matches!(self, AlgorithmId::Naive | AlgorithmId::Oa)
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown algorithm {0:?} (expected naive, rre, leo, leo_rre, oa or drre)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for AlgorithmId {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(AlgorithmId::Naive),
            "rre" => Ok(AlgorithmId::Rre),
            "leo" => Ok(AlgorithmId::Leo),
            "leo_rre" | "leo+rre" | "lrre" => Ok(AlgorithmId::LeoRre),
            "oa" => Ok(AlgorithmId::Oa),
            "drre" => Ok(AlgorithmId::Drre),
            _ => Err(UnknownAlgorithm(s.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgorithmError {
    #[error("invalid execution order: {0}")]
    Order(#[from] OrderError),
    #[error("tag memory contract violated: {0}")]
    Memory(#[from] MemoryError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionResult {
    pub algorithm: AlgorithmId,
    pub order: ExecutionOrder,
    pub redundant: BTreeSet<ReaderId>,
    pub writes_total: u64,
    pub writes_per_reader: Vec<u64>,
    pub final_tags: Vec<TagMemory>,
    /// Per-reader priority used by the capture sweep: |S_i| for RRE and
    /// LEO+RRE, neighbour count for DRRE, empty otherwise.
    pub priorities: Vec<usize>,
    /// Every state-changing write, in application order.
    pub mutations: Vec<Mutation>,
}

impl DetectionResult {
    fn from_arena(
        algorithm: AlgorithmId,
        order: &ExecutionOrder,
        redundant: BTreeSet<ReaderId>,
        priorities: Vec<usize>,
        arena: TagArena,
    ) -> Self {
        let writes_total = arena.cumulative_total();
        let writes_per_reader = arena.cumulative_per_reader();
        let (final_tags, mutations) = arena.into_parts();
        Self {
            algorithm,
            order: order.clone(),
            redundant,
            writes_total,
            writes_per_reader,
            final_tags,
            priorities,
            mutations,
        }
    }

    /// Run-result text: `result`, `redundant`, `writes`, then one `tagstate`
    /// line per tag.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", format!("result {} {}", self.algorithm, self.order).trim_end());
        let mut line = String::from("redundant ");
        let _ = write_id_list(&mut line, self.redundant.iter().copied());
        let _ = writeln!(out, "{}", line.trim_end());
        let _ = writeln!(out, "writes {}", self.writes_total);
        for (t, mem) in self.final_tags.iter().enumerate() {
            let holder = mem.holder.map_or_else(|| "-".to_string(), |h| h.to_string());
            let _ = writeln!(out, "tagstate {t} {holder} {} {}", mem.tag_count, mem.status);
        }
        out
    }
}

pub fn run(
    algorithm: AlgorithmId,
    net: &RfidNetwork,
    order: &ExecutionOrder,
) -> Result<DetectionResult, AlgorithmError> {
    match algorithm {
        AlgorithmId::Naive => {
            order.check(net)?;
            let mut r = run_naive(net);
            r.order = order.clone();
            Ok(r)
        }
        AlgorithmId::Rre => run_rre(net, order),
        AlgorithmId::Leo => run_leo(net, order),
        AlgorithmId::LeoRre => run_leo_rre(net, order),
        AlgorithmId::Oa => run_oa(net, order),
        AlgorithmId::Drre => run_drre(net, order),
    }
}

/// Simultaneous broadcast: a tag inside two or more zones cannot answer, so
/// a reader whose tags are all multiply covered hears nothing.
pub fn run_naive(net: &RfidNetwork) -> DetectionResult {
    let redundant = (0..net.reader_count())
        .filter(|&r| {
            net.covered(r)
                .iter()
                .all(|&t| net.multiplicity(t).expect("tag in range") >= 2)
        })
        .collect();
    let arena = TagArena::new(net.tag_count(), net.reader_count());
    DetectionResult::from_arena(
        AlgorithmId::Naive,
        &ExecutionOrder::ascending(net.reader_count()),
        redundant,
        Vec::new(),
        arena,
    )
}

/// Readers in `order` take every tag whose recorded priority is lower than
/// their own (or that has no holder yet).
fn capture_sweep(
    net: &RfidNetwork,
    arena: &mut TagArena,
    order: impl IntoIterator<Item = ReaderId>,
    priority: &[usize],
) -> Result<(), AlgorithmError> {
    for reader in order {
        let p = priority[reader];
        for &t in net.covered(reader) {
            let mem = arena.tag(t);
            if mem.holder.is_none() || mem.tag_count < p {
                arena.write(reader, t, TagWrite::HolderCount { holder: reader, count: p })?;
            }
        }
    }
    Ok(())
}

fn holders_of_nothing(
    net: &RfidNetwork,
    arena: &TagArena,
    readers: impl IntoIterator<Item = ReaderId>,
) -> BTreeSet<ReaderId> {
    readers
        .into_iter()
        .filter(|&r| net.covered(r).iter().all(|&t| arena.tag(t).holder != Some(r)))
        .collect()
}

pub fn run_rre(net: &RfidNetwork, order: &ExecutionOrder) -> Result<DetectionResult, AlgorithmError> {
    order.check(net)?;
    let counts: Vec<usize> = net.coverage().iter().map(Vec::len).collect();
    let mut arena = TagArena::new(net.tag_count(), net.reader_count());
    capture_sweep(net, &mut arena, order.as_slice().iter().copied(), &counts)?;
    let redundant = holders_of_nothing(net, &arena, 0..net.reader_count());
    Ok(DetectionResult::from_arena(AlgorithmId::Rre, order, redundant, counts, arena))
}

/// First come, first hold. Returns the readers that claimed nothing.
fn leo_pass(
    net: &RfidNetwork,
    arena: &mut TagArena,
    order: &ExecutionOrder,
) -> Result<BTreeSet<ReaderId>, AlgorithmError> {
    let mut redundant = BTreeSet::new();
    for &reader in order.as_slice() {
        let mut claimed = false;
        for &t in net.covered(reader) {
            if arena.tag(t).holder.is_none() {
                claimed |= arena.write(reader, t, TagWrite::Holder(reader))?;
            }
        }
        if !claimed {
            redundant.insert(reader);
        }
    }
    Ok(redundant)
}

pub fn run_leo(net: &RfidNetwork, order: &ExecutionOrder) -> Result<DetectionResult, AlgorithmError> {
    order.check(net)?;
    let mut arena = TagArena::new(net.tag_count(), net.reader_count());
    let redundant = leo_pass(net, &mut arena, order)?;
    Ok(DetectionResult::from_arena(AlgorithmId::Leo, order, redundant, Vec::new(), arena))
}

/// LEO, switch off what it found, wipe tag memory, then RRE over the
/// surviving readers in the same relative order.
pub fn run_leo_rre(net: &RfidNetwork, order: &ExecutionOrder) -> Result<DetectionResult, AlgorithmError> {
    order.check(net)?;
    let mut arena = TagArena::new(net.tag_count(), net.reader_count());
    let mut redundant = leo_pass(net, &mut arena, order)?;
    arena.reset();

    let counts: Vec<usize> = net.coverage().iter().map(Vec::len).collect();
    let survivors: Vec<ReaderId> = order
        .as_slice()
        .iter()
        .copied()
        .filter(|r| !redundant.contains(r))
        .collect();
    capture_sweep(net, &mut arena, survivors.iter().copied(), &counts)?;
    redundant.extend(holders_of_nothing(net, &arena, survivors));
    Ok(DetectionResult::from_arena(AlgorithmId::LeoRre, order, redundant, counts, arena))
}

/// Overlap-aware detection in four global rounds (claim, mark, lock, decide),
/// each visiting readers in `order`.
pub fn run_oa(net: &RfidNetwork, order: &ExecutionOrder) -> Result<DetectionResult, AlgorithmError> {
    order.check(net)?;
    let mut arena = TagArena::new(net.tag_count(), net.reader_count());
    let readers = order.as_slice();

    for &r in readers {
        for &t in net.covered(r) {
            if arena.tag(t).holder.is_none() {
                arena.write(r, t, TagWrite::Holder(r))?;
            }
        }
    }
    for &r in readers {
        for &t in net.covered(r) {
            let mem = arena.tag(t);
            if mem.holder != Some(r) && mem.status == TagStatus::Null {
                arena.write(r, t, TagWrite::Status(TagStatus::Overlap))?;
            }
        }
    }
    for &r in readers {
        for &t in net.covered(r) {
            let mem = arena.tag(t);
            if mem.holder != Some(r) && mem.status != TagStatus::Null {
                arena.write(r, t, TagWrite::Status(TagStatus::Lock))?;
            }
        }
    }
    let redundant = readers
        .iter()
        .copied()
        .filter(|&r| {
            !net.covered(r).iter().any(|&t| {
                let mem = arena.tag(t);
                mem.holder == Some(r) && mem.status != TagStatus::Lock
            })
        })
        .collect();
    Ok(DetectionResult::from_arena(AlgorithmId::Oa, order, redundant, Vec::new(), arena))
}

/// Density-priority detection. Readers first sign every tag they cover; each
/// then counts the distinct other signers on its tags (its neighbours) and a
/// capture sweep runs with that count as priority.
pub fn run_drre(net: &RfidNetwork, order: &ExecutionOrder) -> Result<DetectionResult, AlgorithmError> {
    order.check(net)?;
    let mut arena = TagArena::new(net.tag_count(), net.reader_count());
    for &r in order.as_slice() {
        for &t in net.covered(r) {
            arena.write(r, t, TagWrite::CovererAppend(r))?;
        }
    }

    let neighbours: Vec<usize> = (0..net.reader_count())
        .map(|r| {
            net.covered(r)
                .iter()
                .flat_map(|&t| arena.tag(t).coverer_list.iter().copied())
                .filter(|&k| k != r)
                .collect::<BTreeSet<_>>()
                .len()
        })
        .collect();

    capture_sweep(net, &mut arena, order.as_slice().iter().copied(), &neighbours)?;
    let redundant = holders_of_nothing(net, &arena, 0..net.reader_count());
    Ok(DetectionResult::from_arena(AlgorithmId::Drre, order, redundant, neighbours, arena))
}
