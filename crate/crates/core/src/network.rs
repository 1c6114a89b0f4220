//! Readers, tags and the coverage relation between them.
//!
//! A network is built either from 2-D geometry (closed interrogation disks)
//! or from an explicit `(reader, tag)` relation. Once built it is immutable.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type ReaderId = usize;
pub type TagId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("duplicate reader id {0}")]
    DuplicateReader(ReaderId),
    #[error("duplicate tag id {0}")]
    DuplicateTag(TagId),
    #[error("reader ids are not contiguous from 0 (missing {0})")]
    ReaderIdGap(ReaderId),
    #[error("tag ids are not contiguous from 0 (missing {0})")]
    TagIdGap(TagId),
    #[error("reader {0} has no position")]
    MissingReaderPosition(ReaderId),
    #[error("reader {0} has no radius")]
    MissingRadius(ReaderId),
    #[error("tag {0} has no position")]
    MissingTagPosition(TagId),
    #[error("reader {0} has a non-positive or non-finite radius")]
    BadRadius(ReaderId),
    #[error("non-finite coordinate on {0}")]
    NonFinite(String),
    #[error("reader id {0} out of range")]
    ReaderOutOfRange(ReaderId),
    #[error("tag id {0} out of range")]
    TagOutOfRange(TagId),
    #[error("duplicate coverage pair (reader {0}, tag {1})")]
    DuplicatePair(ReaderId, TagId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_sq(&self, other: &Point2D) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReaderSpec {
    pub id: ReaderId,
    pub position: Option<Point2D>,
    pub radius: Option<f64>,
}

impl ReaderSpec {
    pub fn placed(id: ReaderId, x: f64, y: f64, radius: f64) -> Self {
        Self {
            id,
            position: Some(Point2D::new(x, y)),
            radius: Some(radius),
        }
    }

    pub fn abstract_reader(id: ReaderId) -> Self {
        Self {
            id,
            position: None,
            radius: None,
        }
    }

    /// Closed-disk membership: a tag exactly on the rim is covered.
    pub fn covers_point(&self, p: &Point2D) -> bool {
        match (self.position, self.radius) {
            (Some(c), Some(r)) => c.distance_sq(p) <= r * r,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagSpec {
    pub id: TagId,
    pub position: Option<Point2D>,
}

impl TagSpec {
    pub fn placed(id: TagId, x: f64, y: f64) -> Self {
        Self {
            id,
            position: Some(Point2D::new(x, y)),
        }
    }

    pub fn abstract_tag(id: TagId) -> Self {
        Self { id, position: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Geometric,
    Explicit,
}

/// Readers, tags, and for each reader the ascending list of tags it covers.
#[derive(Debug, Clone, PartialEq)]
pub struct RfidNetwork {
    readers: Vec<ReaderSpec>,
    tags: Vec<TagSpec>,
    coverage: Vec<Vec<TagId>>,
    coverers: Vec<Vec<ReaderId>>,
    origin: Origin,
}

fn sort_dense<T>(
    mut items: Vec<T>,
    id: impl Fn(&T) -> usize,
    dup: impl Fn(usize) -> NetworkError,
    gap: impl Fn(usize) -> NetworkError,
) -> Result<Vec<T>, NetworkError> {
    items.sort_by_key(&id);
    for (expected, item) in items.iter().enumerate() {
        let got = id(item);
        if got < expected {
            return Err(dup(got));
        }
        if got > expected {
            return Err(gap(expected));
        }
    }
    Ok(items)
}

impl RfidNetwork {
    /// Builds a network whose coverage follows from reader disks and tag
    /// positions. Coverage is computed through a uniform grid whose cell side
    /// is the largest radius.
    pub fn build_geometric(
        readers: Vec<ReaderSpec>,
        tags: Vec<TagSpec>,
    ) -> Result<Self, NetworkError> {
        let readers = sort_dense(
            readers,
            |r| r.id,
            NetworkError::DuplicateReader,
            NetworkError::ReaderIdGap,
        )?;
        let tags = sort_dense(
            tags,
            |t| t.id,
            NetworkError::DuplicateTag,
            NetworkError::TagIdGap,
        )?;

        let mut max_radius: f64 = 0.0;
        for r in &readers {
            let p = r
                .position
                .ok_or(NetworkError::MissingReaderPosition(r.id))?;
            if !p.is_finite() {
                return Err(NetworkError::NonFinite(format!("reader {}", r.id)));
            }
            let radius = r.radius.ok_or(NetworkError::MissingRadius(r.id))?;
            if !(radius.is_finite() && radius > 0.0) {
                return Err(NetworkError::BadRadius(r.id));
            }
            max_radius = max_radius.max(radius);
        }
        for t in &tags {
            let p = t.position.ok_or(NetworkError::MissingTagPosition(t.id))?;
            if !p.is_finite() {
                return Err(NetworkError::NonFinite(format!("tag {}", t.id)));
            }
        }

        let coverage = if readers.is_empty() {
            Vec::new()
        } else {
            let grid = TagGrid::build(&tags, max_radius);
            readers.iter().map(|r| grid.covered_by(r, &tags)).collect()
        };

        Ok(Self::assemble(readers, tags, coverage, Origin::Geometric))
    }

    /// Builds a network from an explicit coverage relation. Readers and tags
    /// carry no geometry.
    pub fn build_explicit(
        reader_count: usize,
        tag_count: usize,
        relation: &[(ReaderId, TagId)],
    ) -> Result<Self, NetworkError> {
        let mut sets: Vec<BTreeSet<TagId>> = vec![BTreeSet::new(); reader_count];
        for &(r, t) in relation {
            if r >= reader_count {
                return Err(NetworkError::ReaderOutOfRange(r));
            }
            if t >= tag_count {
                return Err(NetworkError::TagOutOfRange(t));
            }
            if !sets[r].insert(t) {
                return Err(NetworkError::DuplicatePair(r, t));
            }
        }
        let readers = (0..reader_count).map(ReaderSpec::abstract_reader).collect();
        let tags = (0..tag_count).map(TagSpec::abstract_tag).collect();
        let coverage = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(Self::assemble(readers, tags, coverage, Origin::Explicit))
    }

    fn assemble(
        readers: Vec<ReaderSpec>,
        tags: Vec<TagSpec>,
        coverage: Vec<Vec<TagId>>,
        origin: Origin,
    ) -> Self {
        let mut coverers = vec![Vec::new(); tags.len()];
        for (r, set) in coverage.iter().enumerate() {
            for &t in set {
                coverers[t].push(r);
            }
        }
        Self {
            readers,
            tags,
            coverage,
            coverers,
            origin,
        }
    }

    pub fn reader_count(&self) -> usize {
        self.readers.len()
    }

    pub fn tag_count(&self) -> usize {
        self.tags.len()
    }

    pub fn readers(&self) -> &[ReaderSpec] {
        &self.readers
    }

    pub fn tags(&self) -> &[TagSpec] {
        &self.tags
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// Tags covered by `reader`, ascending. Panics on an unknown reader.
    pub fn covered(&self, reader: ReaderId) -> &[TagId] {
        &self.coverage[reader]
    }

    pub fn coverage(&self) -> &[Vec<TagId>] {
        &self.coverage
    }

    /// Readers whose zone contains `tag`, ascending.
    pub fn coverers(&self, tag: TagId) -> Result<&[ReaderId], NetworkError> {
        self.coverers
            .get(tag)
            .map(Vec::as_slice)
            .ok_or(NetworkError::TagOutOfRange(tag))
    }

    pub fn multiplicity(&self, tag: TagId) -> Result<usize, NetworkError> {
        self.coverers(tag).map(<[ReaderId]>::len)
    }

    /// Tags covered by exactly one reader.
    pub fn type1_tags(&self) -> BTreeSet<TagId> {
        self.coverers
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() == 1)
            .map(|(t, _)| t)
            .collect()
    }

    /// Tags covered by at least one reader.
    pub fn covered_tags(&self) -> impl Iterator<Item = TagId> + '_ {
        self.coverers
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(t, _)| t)
    }

    pub fn covered_tag_count(&self) -> usize {
        self.covered_tags().count()
    }

    /// Σ|S_i| over all readers.
    pub fn total_coverage(&self) -> usize {
        self.coverage.iter().map(Vec::len).sum()
    }

    /// A copy of this network with `tag` deleted; later tag ids shift down
    /// by one.
    pub fn without_tag(&self, tag: TagId) -> Result<Self, NetworkError> {
        if tag >= self.tags.len() {
            return Err(NetworkError::TagOutOfRange(tag));
        }
        let shift = |t: TagId| if t > tag { t - 1 } else { t };
        let tags = self
            .tags
            .iter()
            .filter(|t| t.id != tag)
            .map(|t| TagSpec {
                id: shift(t.id),
                position: t.position,
            })
            .collect();
        let coverage = self
            .coverage
            .iter()
            .map(|s| s.iter().filter(|&&t| t != tag).map(|&t| shift(t)).collect())
            .collect();
        Ok(Self::assemble(
            self.readers.clone(),
            tags,
            coverage,
            self.origin,
        ))
    }
}

/// Uniform bucket grid over tag positions.
struct TagGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<TagId>>,
}

impl TagGrid {
    fn build(tags: &[TagSpec], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<TagId>> = HashMap::new();
        for t in tags {
            let p = t.position.expect("validated");
            buckets
                .entry(Self::cell_of(p, cell))
                .or_default()
                .push(t.id);
        }
        Self { cell, buckets }
    }

    fn cell_of(p: Point2D, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    fn covered_by(&self, reader: &ReaderSpec, tags: &[TagSpec]) -> Vec<TagId> {
        let centre = reader.position.expect("validated");
        let radius = reader.radius.expect("validated");
        let span = (radius / self.cell).ceil() as i64;
        let (cx, cy) = Self::cell_of(centre, self.cell);
        let mut hits = Vec::new();
        for dx in -span..=span {
            for dy in -span..=span {
                if let Some(bucket) = self.buckets.get(&(cx + dx, cy + dy)) {
                    hits.extend(bucket.iter().copied().filter(|&t| {
                        reader.covers_point(tags[t].position.as_ref().expect("validated"))
                    }));
                }
            }
        }
        hits.sort_unstable();
        hits
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("order has {got} entries, network has {expected} readers")]
    WrongLength { expected: usize, got: usize },
    #[error("order names reader {0} more than once")]
    Repeated(ReaderId),
    #[error("order names unknown reader {0}")]
    Unknown(ReaderId),
    #[error("cannot parse order entry {0:?}")]
    Syntax(String),
}

/// A permutation of all reader ids: the sequence in which readers take turns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExecutionOrder(Vec<ReaderId>);

impl ExecutionOrder {
    pub fn new(order: Vec<ReaderId>, reader_count: usize) -> Result<Self, OrderError> {
        if order.len() != reader_count {
            return Err(OrderError::WrongLength {
                expected: reader_count,
                got: order.len(),
            });
        }
        let mut seen = vec![false; reader_count];
        for &r in &order {
            if r >= reader_count {
                return Err(OrderError::Unknown(r));
            }
            if std::mem::replace(&mut seen[r], true) {
                return Err(OrderError::Repeated(r));
            }
        }
        Ok(Self(order))
    }

    pub fn ascending(reader_count: usize) -> Self {
        Self((0..reader_count).collect())
    }

    /// Parses a comma-separated id list such as `1,0,2`.
    pub fn parse(text: &str, reader_count: usize) -> Result<Self, OrderError> {
        let ids = if text.trim().is_empty() {
            Vec::new()
        } else {
            text.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<ReaderId>()
                        .map_err(|_| OrderError::Syntax(s.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        Self::new(ids, reader_count)
    }

    pub fn as_slice(&self) -> &[ReaderId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn check(&self, net: &RfidNetwork) -> Result<(), OrderError> {
        if self.0.len() == net.reader_count() {
            Ok(())
        } else {
            Err(OrderError::WrongLength {
                expected: net.reader_count(),
                got: self.0.len(),
            })
        }
    }
}

impl fmt::Display for ExecutionOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_id_list(f, self.0.iter().copied())
    }
}

pub(crate) fn write_id_list(
    f: &mut impl fmt::Write,
    ids: impl IntoIterator<Item = usize>,
) -> fmt::Result {
    for (i, id) in ids.into_iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{id}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rim_is_covered() {
        let net = RfidNetwork::build_geometric(
            vec![ReaderSpec::placed(0, 0.0, 0.0, 500.0)],
            vec![TagSpec::placed(0, 500.0, 0.0)],
        )
        .unwrap();
        assert_eq!(net.covered(0), &[0]);
    }

    #[test]
    fn just_outside_rim_is_not_covered() {
        let net = RfidNetwork::build_geometric(
            vec![ReaderSpec::placed(0, 0.0, 0.0, 500.0)],
            vec![TagSpec::placed(0, 500.001, 0.0)],
        )
        .unwrap();
        assert!(net.covered(0).is_empty());
    }

    #[test]
    fn disjoint_disks() {
        let net = RfidNetwork::build_geometric(
            vec![
                ReaderSpec::placed(0, 0.0, 0.0, 5.0),
                ReaderSpec::placed(1, 100.0, 0.0, 5.0),
            ],
            vec![TagSpec::placed(0, 0.0, 1.0), TagSpec::placed(1, 100.0, 1.0)],
        )
        .unwrap();
        assert_eq!(net.coverage(), &[vec![0], vec![1]]);
    }

    #[test]
    fn geometric_rejects_bad_input() {
        let dup = RfidNetwork::build_geometric(
            vec![
                ReaderSpec::placed(0, 0.0, 0.0, 1.0),
                ReaderSpec::placed(0, 1.0, 0.0, 1.0),
            ],
            vec![],
        );
        assert_eq!(dup.unwrap_err(), NetworkError::DuplicateReader(0));

        let gap = RfidNetwork::build_geometric(vec![ReaderSpec::placed(1, 0.0, 0.0, 1.0)], vec![]);
        assert_eq!(gap.unwrap_err(), NetworkError::ReaderIdGap(0));

        let missing = RfidNetwork::build_geometric(vec![ReaderSpec::abstract_reader(0)], vec![]);
        assert_eq!(missing.unwrap_err(), NetworkError::MissingReaderPosition(0));

        let nan = RfidNetwork::build_geometric(
            vec![ReaderSpec::placed(0, 0.0, 0.0, 1.0)],
            vec![TagSpec::placed(0, f64::NAN, 0.0)],
        );
        assert!(matches!(nan, Err(NetworkError::NonFinite(_))));

        let radius = RfidNetwork::build_geometric(vec![ReaderSpec::placed(0, 0.0, 0.0, 0.0)], vec![]);
        assert_eq!(radius.unwrap_err(), NetworkError::BadRadius(0));
    }

    #[test]
    fn explicit_rejects_bad_relation() {
        assert_eq!(
            RfidNetwork::build_explicit(1, 1, &[(1, 0)]).unwrap_err(),
            NetworkError::ReaderOutOfRange(1)
        );
        assert_eq!(
            RfidNetwork::build_explicit(1, 1, &[(0, 3)]).unwrap_err(),
            NetworkError::TagOutOfRange(3)
        );
        assert_eq!(
            RfidNetwork::build_explicit(1, 1, &[(0, 0), (0, 0)]).unwrap_err(),
            NetworkError::DuplicatePair(0, 0)
        );
    }

    #[test]
    fn coverers_of_unknown_tag_fails() {
        let net = RfidNetwork::build_explicit(0, 0, &[]).unwrap();
        assert_eq!(net.coverers(0).unwrap_err(), NetworkError::TagOutOfRange(0));
    }

    #[test]
    fn without_tag_renumbers() {
        let net = RfidNetwork::build_explicit(2, 3, &[(0, 0), (0, 2), (1, 1), (1, 2)]).unwrap();
        let cut = net.without_tag(1).unwrap();
        assert_eq!(cut.tag_count(), 2);
        assert_eq!(cut.coverage(), &[vec![0, 1], vec![1]]);
    }

    #[test]
    fn order_validation() {
        assert!(ExecutionOrder::parse("1,0,2", 3).is_ok());
        assert_eq!(
            ExecutionOrder::parse("1,1,2", 3).unwrap_err(),
            OrderError::Repeated(1)
        );
        assert_eq!(
            ExecutionOrder::parse("0,1,3", 3).unwrap_err(),
            OrderError::Unknown(3)
        );
        assert!(matches!(
            ExecutionOrder::parse("0,x", 2),
            Err(OrderError::Syntax(_))
        ));
        assert_eq!(ExecutionOrder::ascending(3).to_string(), "0,1,2");
        assert!(ExecutionOrder::parse("", 0).unwrap().is_empty());
    }
}
