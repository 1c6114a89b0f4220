//! Writable per-tag state and the ledger that counts write-to-tag operations.
//!
//! A write that would leave its field unchanged is suppressed: the reader
//! reads the tag first, so no mutation happens and nothing is counted.

use std::fmt;

use thiserror::Error;

use crate::network::{ReaderId, TagId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub enum TagStatus {
    #[default]
    Null,
    Overlap,
    Lock,
}

impl TagStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TagStatus::Null => "null",
            TagStatus::Overlap => "overlap",
            TagStatus::Lock => "lock",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "null" => Some(TagStatus::Null),
            "overlap" => Some(TagStatus::Overlap),
            "lock" => Some(TagStatus::Lock),
            _ => None,
        }
    }
}

impl fmt::Display for TagStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagMemory {
    pub holder: Option<ReaderId>,
    pub tag_count: usize,
    pub status: TagStatus,
    pub coverer_list: Vec<ReaderId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TagField {
    Holder,
    RreHolderCount,
    Status,
    CovererAppend,
}

/// A single write-to-tag request. `HolderCount` updates holder and tag count
/// together and counts as one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagWrite {
    Holder(ReaderId),
    HolderCount { holder: ReaderId, count: usize },
    Status(TagStatus),
    CovererAppend(ReaderId),
}

impl TagWrite {
    pub fn field(&self) -> TagField {
        match self {
            TagWrite::Holder(_) => TagField::Holder,
            TagWrite::HolderCount { .. } => TagField::RreHolderCount,
            TagWrite::Status(_) => TagField::Status,
            TagWrite::CovererAppend(_) => TagField::CovererAppend,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MemoryError {
    #[error("tag {tag}: status cannot move from {from} back to {to}")]
    BackwardStatus {
        tag: TagId,
        from: TagStatus,
        to: TagStatus,
    },
    #[error("tag {0} does not exist")]
    UnknownTag(TagId),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WriteLedger {
    pub total: u64,
    pub per_reader: Vec<u64>,
}

impl WriteLedger {
    fn new(reader_count: usize) -> Self {
        Self {
            total: 0,
            per_reader: vec![0; reader_count],
        }
    }
}

/// One state-changing write as it was applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mutation {
    pub reader: ReaderId,
    pub tag: TagId,
    pub write: TagWrite,
}

/// The tag memories of one run, owned exclusively by that run.
#[derive(Debug, Clone)]
pub struct TagArena {
    tags: Vec<TagMemory>,
    ledger: WriteLedger,
    log: Vec<Mutation>,
    carried_total: u64,
    carried_per_reader: Vec<u64>,
}

impl TagArena {
    pub fn new(tag_count: usize, reader_count: usize) -> Self {
        Self {
            tags: vec![TagMemory::default(); tag_count],
            ledger: WriteLedger::new(reader_count),
            log: Vec::new(),
            carried_total: 0,
            carried_per_reader: vec![0; reader_count],
        }
    }

    pub fn tag(&self, tag: TagId) -> &TagMemory {
        &self.tags[tag]
    }

    pub fn tags(&self) -> &[TagMemory] {
        &self.tags
    }

    /// Ledger since the last reset.
    pub fn ledger(&self) -> &WriteLedger {
        &self.ledger
    }

    /// Every state-changing write since creation, across resets.
    pub fn log(&self) -> &[Mutation] {
        &self.log
    }

    /// Applies `write` on behalf of `reader`. Returns whether the tag changed.
    pub fn write(&mut self, reader: ReaderId, tag: TagId, write: TagWrite) -> Result<bool, MemoryError> {
        let mem = self.tags.get_mut(tag).ok_or(MemoryError::UnknownTag(tag))?;
        let changed = match write {
            TagWrite::Holder(h) => {
                let changed = mem.holder != Some(h);
                mem.holder = Some(h);
                changed
            }
            TagWrite::HolderCount { holder, count } => {
                let changed = mem.holder != Some(holder) || mem.tag_count != count;
                mem.holder = Some(holder);
                mem.tag_count = count;
                changed
            }
            TagWrite::Status(to) => {
                if to < mem.status {
                    return Err(MemoryError::BackwardStatus {
                        tag,
                        from: mem.status,
                        to,
                    });
                }
                let changed = mem.status != to;
                mem.status = to;
                changed
            }
            TagWrite::CovererAppend(r) => {
                if mem.coverer_list.contains(&r) {
                    false
                } else {
                    mem.coverer_list.push(r);
                    true
                }
            }
        };
        if changed {
            self.ledger.total += 1;
            if self.ledger.per_reader.len() <= reader {
                self.ledger.per_reader.resize(reader + 1, 0);
            }
            self.ledger.per_reader[reader] += 1;
            self.log.push(Mutation { reader, tag, write });
        }
        Ok(changed)
    }

    /// Fresh memories and a zeroed ledger. Counts from before the reset stay
    /// in the cumulative totals.
    pub fn reset(&mut self) {
        self.carried_total += self.ledger.total;
        if self.carried_per_reader.len() < self.ledger.per_reader.len() {
            self.carried_per_reader.resize(self.ledger.per_reader.len(), 0);
        }
        for (c, n) in self.carried_per_reader.iter_mut().zip(&self.ledger.per_reader) {
            *c += n;
        }
        self.ledger = WriteLedger::new(self.ledger.per_reader.len());
        self.tags.iter_mut().for_each(|t| *t = TagMemory::default());
    }

    pub fn cumulative_total(&self) -> u64 {
        self.carried_total + self.ledger.total
    }

    pub fn cumulative_per_reader(&self) -> Vec<u64> {
        self.carried_per_reader
            .iter()
            .zip(&self.ledger.per_reader)
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn into_parts(self) -> (Vec<TagMemory>, Vec<Mutation>) {
        (self.tags, self.log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_on_null_counts() {
        let mut a = TagArena::new(1, 1);
        assert!(a.write(0, 0, TagWrite::Status(TagStatus::Overlap)).unwrap());
        assert_eq!(a.ledger().total, 1);
    }

    #[test]
    fn idempotent_lock_is_suppressed() {
        let mut a = TagArena::new(1, 2);
        a.write(0, 0, TagWrite::Status(TagStatus::Lock)).unwrap();
        assert!(!a.write(1, 0, TagWrite::Status(TagStatus::Lock)).unwrap());
        assert_eq!(a.ledger().total, 1);
        assert_eq!(a.ledger().per_reader, vec![1, 0]);
    }

    #[test]
    fn pair_write_is_one_operation() {
        let mut a = TagArena::new(1, 2);
        a.write(0, 0, TagWrite::HolderCount { holder: 0, count: 2 }).unwrap();
        assert!(a.write(1, 0, TagWrite::HolderCount { holder: 1, count: 4 }).unwrap());
        assert_eq!(a.ledger().total, 2);
        assert_eq!(a.tag(0).holder, Some(1));
        assert_eq!(a.tag(0).tag_count, 4);
    }

    #[test]
    fn backward_status_fails() {
        let mut a = TagArena::new(1, 1);
        a.write(0, 0, TagWrite::Status(TagStatus::Lock)).unwrap();
        let err = a.write(0, 0, TagWrite::Status(TagStatus::Overlap)).unwrap_err();
        assert_eq!(
            err,
            MemoryError::BackwardStatus {
                tag: 0,
                from: TagStatus::Lock,
                to: TagStatus::Overlap
            }
        );
        assert!(a.write(0, 0, TagWrite::Status(TagStatus::Null)).is_err());
    }

    #[test]
    fn reset_preserves_cumulative_total() {
        let mut a = TagArena::new(2, 2);
        a.write(0, 0, TagWrite::Holder(0)).unwrap();
        a.write(1, 1, TagWrite::Holder(1)).unwrap();
        a.reset();
        a.reset();
        assert!(a.tags().iter().all(|t| *t == TagMemory::default()));
        assert_eq!(a.ledger().total, 0);
        a.write(0, 1, TagWrite::Status(TagStatus::Overlap)).unwrap();
        assert_eq!(a.cumulative_total(), 3);
        assert_eq!(a.cumulative_per_reader(), vec![2, 1]);
        assert_eq!(a.log().len(), 3);
    }

    #[test]
    fn coverer_append_is_set_like() {
        let mut a = TagArena::new(1, 2);
        assert!(a.write(0, 0, TagWrite::CovererAppend(0)).unwrap());
        assert!(a.write(1, 0, TagWrite::CovererAppend(1)).unwrap());
        assert!(!a.write(1, 0, TagWrite::CovererAppend(1)).unwrap());
        assert_eq!(a.tag(0).coverer_list, vec![0, 1]);
    }
}
