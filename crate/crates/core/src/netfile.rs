//! Line-oriented network file.
//!
//! ```text
//! rfidnet 1
//! # free-form comment lines
//! reader <id> <x> <y> <radius>     (geometric)   | reader <id> -   (explicit)
//! tag <id> <x> <y>                 (geometric)   | tag <id> -      (explicit)
//! covers <reader-id> <tag-id>      (explicit only)
//! ```
//!
//! Reals are written with at most six fractional digits, trailing zeros
//! trimmed, never in exponent form.

use std::fmt::Write as _;

use thiserror::Error;

use crate::network::{NetworkError, Origin, ReaderSpec, RfidNetwork, TagSpec};

pub const HEADER: &str = "rfidnet 1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}: {text:?}")]
    Line {
        line: usize,
        text: String,
        message: String,
    },
    #[error("missing `{HEADER}` header")]
    MissingHeader,
    #[error("invalid network: {0}")]
    Network(#[from] NetworkError),
}

/// A parsed network together with the comment lines that followed the header.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFile {
    pub comments: Vec<String>,
    pub network: RfidNetwork,
}

/// Formats a real with at most six fractional digits and no exponent.
pub fn format_real(v: f64) -> String {
    let mut s = format!("{v:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

pub fn to_text(net: &RfidNetwork, comments: &[String]) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let explicit = net.origin() == Origin::Explicit;
    for r in net.readers() {
        match (explicit, r.position, r.radius) {
            (false, Some(p), Some(rad)) => {
                let _ = writeln!(
                    out,
                    "reader {} {} {} {}",
                    r.id,
                    format_real(p.x),
                    format_real(p.y),
                    format_real(rad)
                );
            }
            _ => {
                let _ = writeln!(out, "reader {} -", r.id);
            }
        }
    }
    for t in net.tags() {
        match (explicit, t.position) {
            (false, Some(p)) => {
                let _ = writeln!(out, "tag {} {} {}", t.id, format_real(p.x), format_real(p.y));
            }
            _ => {
                let _ = writeln!(out, "tag {} -", t.id);
            }
        }
    }
    if explicit {
        for (r, set) in net.coverage().iter().enumerate() {
            for t in set {
                let _ = writeln!(out, "covers {r} {t}");
            }
        }
    }
    out
}

pub fn parse(text: &str) -> Result<NetworkFile, ParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim_end() == HEADER => {}
        _ => return Err(ParseError::MissingHeader),
    }

    let mut comments = Vec::new();
    let mut readers = Vec::new();
    let mut tags = Vec::new();
    let mut relation = Vec::new();
    let mut mode: Option<Origin> = None;

    for (idx, raw) in lines {
        let line = raw.trim();
        let fail = |message: &str| ParseError::Line {
            line: idx + 1,
            text: raw.to_string(),
            message: message.to_string(),
        };
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let id = |i: usize| -> Result<usize, ParseError> {
            fields
                .get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| fail("expected a non-negative integer id"))
        };
        let real = |i: usize| -> Result<f64, ParseError> {
            fields
                .get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| fail("expected a real number"))
        };
        let mut set_mode = |m: Origin| -> Result<(), ParseError> {
            match mode {
                None => {
                    mode = Some(m);
                    Ok(())
                }
                Some(prev) if prev == m => Ok(()),
                Some(_) => Err(fail("mixes geometric and explicit entries")),
            }
        };

        match fields[0] {
            "reader" if fields.len() == 3 && fields[2] == "-" => {
                set_mode(Origin::Explicit)?;
                readers.push(ReaderSpec::abstract_reader(id(1)?));
            }
            "reader" if fields.len() == 5 => {
                set_mode(Origin::Geometric)?;
                readers.push(ReaderSpec::placed(id(1)?, real(2)?, real(3)?, real(4)?));
            }
            "tag" if fields.len() == 3 && fields[2] == "-" => {
                set_mode(Origin::Explicit)?;
                tags.push(TagSpec::abstract_tag(id(1)?));
            }
            "tag" if fields.len() == 4 => {
                set_mode(Origin::Geometric)?;
                tags.push(TagSpec::placed(id(1)?, real(2)?, real(3)?));
            }
            "covers" if fields.len() == 3 => {
                set_mode(Origin::Explicit)?;
                relation.push((id(1)?, id(2)?));
            }
            "reader" | "tag" | "covers" => return Err(fail("wrong number of fields")),
            _ => return Err(fail("unknown record")),
        }
    }

    let network = match mode {
        Some(Origin::Geometric) => RfidNetwork::build_geometric(readers, tags)?,
        _ => {
            let reader_count = readers.len();
            let tag_count = tags.len();
            // Ids must still be dense and unique in explicit mode.
            let mut r_ids: Vec<_> = readers.iter().map(|r| r.id).collect();
            let mut t_ids: Vec<_> = tags.iter().map(|t| t.id).collect();
            r_ids.sort_unstable();
            t_ids.sort_unstable();
            check_dense(&r_ids, NetworkError::DuplicateReader, NetworkError::ReaderIdGap)?;
            check_dense(&t_ids, NetworkError::DuplicateTag, NetworkError::TagIdGap)?;
            RfidNetwork::build_explicit(reader_count, tag_count, &relation)?
        }
    };
    Ok(NetworkFile { comments, network })
}

fn check_dense(
    sorted: &[usize],
    dup: impl Fn(usize) -> NetworkError,
    gap: impl Fn(usize) -> NetworkError,
) -> Result<(), NetworkError> {
    for (expected, &got) in sorted.iter().enumerate() {
        if got < expected {
            return Err(dup(got));
        }
        if got > expected {
            return Err(gap(expected));
        }
    }
    Ok(())
}
