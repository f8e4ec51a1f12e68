//! Text formats for finite maps.
//!
//! TSV (default):
//!
//! ```text
//! # source=N order=q-standard depth=2
//! # enumeration_indices=0,1,2,3
//! 3  0  -2
//! 1  1  -1
//! ...
//! ```
//!
//! one tab-separated `domain, image-rank, image-value` line per entry,
//! sorted by image. JSON lines carry the same data: a metadata object, then one object
//! per entry.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::construct::ConstructionState;
use crate::error::Error;
use crate::map::{Entry, FiniteOrderedMap};
use crate::order::{CountableOrder, OrderPoint};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    JsonLines,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "tsv" => Ok(Format::Tsv),
            "json-lines" | "jsonl" => Ok(Format::JsonLines),
            other => Err(Error::Precondition(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub source: String,
    pub order: String,
    pub depth: usize,
    pub enumeration_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct EntryLine {
    domain: Rational,
    rank: usize,
    image: Rational,
}

pub fn metadata(state: &ConstructionState) -> Metadata {
    let mut indices: Vec<usize> = std::iter::once(0)
        .chain(
            state
                .audit()
                .iter()
                .flat_map(|s| s.placements.iter().filter_map(|p| p.enumeration_index)),
        )
        .collect();
    indices.sort_unstable();
    Metadata {
        source: state.source().to_string(),
        order: state.order().name().to_string(),
        depth: state.depth(),
        enumeration_indices: indices,
    }
}

pub fn emit_map(map: &FiniteOrderedMap, meta: Option<&Metadata>, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Tsv => {
            if let Some(meta) = meta {
                let indices: Vec<String> = meta.enumeration_indices.iter().map(|i| i.to_string()).collect();
                let _ = writeln!(out, "# source={} order={} depth={}", meta.source, meta.order, meta.depth);
                let _ = writeln!(out, "# enumeration_indices={}", indices.join(","));
            }
            for (rank, e) in map.entries().iter().enumerate() {
                let _ = writeln!(out, "{}\t{}\t{}", e.domain, rank, e.image);
            }
        }
        Format::JsonLines => {
            if let Some(meta) = meta {
                out.push_str(&serde_json::to_string(meta).expect("serializable"));
                out.push('\n');
            }
            for (rank, e) in map.entries().iter().enumerate() {
                let line = EntryLine { domain: e.domain.clone(), rank, image: e.image.0.clone() };
                out.push_str(&serde_json::to_string(&line).expect("serializable"));
                out.push('\n');
            }
        }
    }
    out
}

/// Serializes `f_n` with its provenance.
pub fn emit_prefix(state: &ConstructionState, format: Format) -> String {
    emit_map(&state.map(), Some(&metadata(state)), format)
}

/// One JSON object per construction step.
pub fn emit_audit(state: &ConstructionState) -> String {
    let mut out = String::new();
    for step in state.audit() {
        out.push_str(&serde_json::to_string(step).expect("serializable"));
        out.push('\n');
    }
    out
}

fn parse_err(line_no: usize, msg: impl std::fmt::Display) -> Error {
    Error::Precondition(format!("line {line_no}: {msg}"))
}

/// Reads a map from TSV or JSON lines.
///
/// Without `order`, the second column (or `rank`) gives the image position
/// and need only be distinct integers. With `order`, the last column (or
/// `image`) is a point of that order.
pub fn parse_map(text: &str, order: Option<Arc<CountableOrder>>) -> Result<FiniteOrderedMap, Error> {
    let mut ranked: Vec<(i64, Rational)> = Vec::new();
    let mut placed: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('{') {
            let value: serde_json::Value = serde_json::from_str(line).map_err(|e| parse_err(line_no, e))?;
            if value.get("domain").is_none() {
                continue; // metadata
            }
            let entry: EntryLineLoose = serde_json::from_value(value).map_err(|e| parse_err(line_no, e))?;
            match &order {
                Some(_) => {
                    let image = entry.image.ok_or_else(|| parse_err(line_no, "missing image"))?;
                    placed.push(Entry { domain: entry.domain, image: OrderPoint(image) });
                }
                None => {
                    let rank = entry.rank.ok_or_else(|| parse_err(line_no, "missing rank"))?;
                    ranked.push((rank, entry.domain));
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split(['\t', ' ']).filter(|c| !c.is_empty()).collect();
        if cols.len() < 2 {
            return Err(parse_err(line_no, "expected at least two columns"));
        }
        let domain: Rational = cols[0].parse().map_err(|e| parse_err(line_no, e))?;
        match &order {
            Some(_) => {
                let image: Rational = cols[cols.len() - 1].parse().map_err(|e| parse_err(line_no, e))?;
                placed.push(Entry { domain, image: OrderPoint(image) });
            }
            None => {
                let rank: i64 = cols[1].parse().map_err(|_| parse_err(line_no, "rank must be an integer"))?;
                ranked.push((rank, domain));
            }
        }
    }
    match order {
        Some(order) => {
            if let Some(e) = placed.iter().find(|e| !order.contains(&e.image.0)) {
                return Err(Error::Precondition(format!("{} is not a point of {}", e.image, order.name())));
            }
            FiniteOrderedMap::from_entries(order, placed)
        }
        None => {
            ranked.sort_by_key(|a| a.0);
            if let Some(w) = ranked.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::NotInjective(format!("rank {} used twice", w[0].0)));
            }
            FiniteOrderedMap::from_ranking(ranked.into_iter().map(|(_, d)| d).collect())
        }
    }
}

#[derive(Deserialize)]
struct EntryLineLoose {
    domain: Rational,
    #[serde(default)]
    rank: Option<i64>,
    #[serde(default)]
    image: Option<Rational>,
}
