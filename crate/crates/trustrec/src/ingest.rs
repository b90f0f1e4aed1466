//! Parsing of trust and rating files plus dense re-indexing of raw ids.
//!
//! Both input formats are line-oriented text: blank lines and `#` comments are
//! skipped, fields are separated by runs of whitespace or by one configured
//! character. Raw identifiers are arbitrary non-negative integers and get
//! re-indexed into a dense `0..n` range; the mapping is kept for round-trips.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::{build_trust_graph, Convention, TrustGraph};
use crate::ratings::RatingsTable;

/// Dense user index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserId(pub u32);

/// Dense item index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Bijection between raw dataset ids and dense indices.
///
/// Dense indices are assigned by ascending raw id, so dense order and raw
/// order agree and every deterministic tie-break on dense ids is also a
/// deterministic tie-break on raw ids.
#[derive(Debug, Clone, Default)]
pub struct IdMap {
    forward: HashMap<u64, u32>,
    reverse: Vec<u64>,
}

impl IdMap {
    /// Builds the map over the given raw ids (duplicates welcome).
    pub fn from_raw_ids(mut raw: Vec<u64>) -> Self {
        raw.sort_unstable();
        raw.dedup();
        let forward = raw
            .iter()
            .enumerate()
            .map(|(d, &r)| (r, d as u32))
            .collect();
        IdMap {
            forward,
            reverse: raw,
        }
    }

    pub fn len(&self) -> usize {
        self.reverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reverse.is_empty()
    }

    /// Dense index of a raw id, if the id was seen at build time.
    pub fn dense(&self, raw: u64) -> Option<u32> {
        self.forward.get(&raw).copied()
    }

    /// Raw id behind a dense index.
    pub fn raw(&self, dense: u32) -> u64 {
        self.reverse[dense as usize]
    }
}

/// Splits a record line into fields.
fn fields(line: &str, delimiter: Option<char>) -> Vec<&str> {
    match delimiter {
        None => line.split_whitespace().collect(),
        Some(c) => line.split(c).map(str::trim).collect(),
    }
}

fn parse_id(tok: &str, line_no: usize, what: &str) -> Result<u64> {
    if let Ok(signed) = tok.parse::<i64>() {
        if signed < 0 {
            return Err(Error::parse(line_no, format!("negative {what} id '{tok}'")));
        }
    }
    tok.parse::<u64>()
        .map_err(|_| Error::parse(line_no, format!("invalid {what} id '{tok}'")))
}

/// Reads `truster trustee [weight]` lines into raw id pairs.
///
/// A third field, when present, must be the weight 1 — the network is
/// unweighted and anything else is treated as corrupt input.
pub fn parse_trust_edges(input: impl BufRead, delimiter: Option<char>) -> Result<Vec<(u64, u64)>> {
    let mut edges = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f = fields(line, delimiter);
        if f.len() < 2 || f.len() > 3 {
            return Err(Error::parse(
                line_no,
                format!(
                    "expected 'truster trustee [weight]', got {} fields",
                    f.len()
                ),
            ));
        }
        let truster = parse_id(f[0], line_no, "truster")?;
        let trustee = parse_id(f[1], line_no, "trustee")?;
        if f.len() == 3 {
            let w: f64 = f[2]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid trust weight '{}'", f[2])))?;
            if w != 1.0 {
                return Err(Error::parse(
                    line_no,
                    format!("trust weight must be 1, got {w}"),
                ));
            }
        }
        edges.push((truster, trustee));
    }
    Ok(edges)
}

/// Reads `user item rating` lines into raw records.
///
/// Ratings must lie in `[1, 5]`.
pub fn parse_ratings(input: impl BufRead, delimiter: Option<char>) -> Result<Vec<(u64, u64, f64)>> {
    let mut records = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f = fields(line, delimiter);
        if f.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 'user item rating', got {} fields", f.len()),
            ));
        }
        let user = parse_id(f[0], line_no, "user")?;
        let item = parse_id(f[1], line_no, "item")?;
        let rating: f64 = f[2]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid rating '{}'", f[2])))?;
        if !(1.0..=5.0).contains(&rating) {
            return Err(Error::parse(
                line_no,
                format!("rating {rating} outside [1, 5]"),
            ));
        }
        records.push((user, item, rating));
    }
    Ok(records)
}

/// Counters reported after ingestion.
#[derive(Debug, Clone, Copy)]
pub struct IngestStats {
    pub users: usize,
    pub items: usize,
    pub ratings: usize,
    pub edges: usize,
    pub density: f64,
    pub dropped_self_loops: usize,
    pub duplicate_edges: usize,
    pub duplicate_ratings: usize,
}

impl IngestStats {
    /// Single-line `key=value` report.
    ///
    /// `duplicates` totals collapsed trust statements and overwritten rating
    /// records.
    pub fn summary_line(&self) -> String {
        format!(
            "users={} items={} ratings={} edges={} density={} dropped_self_loops={} duplicates={}",
            self.users,
            self.items,
            self.ratings,
            self.edges,
            self.density,
            self.dropped_self_loops,
            self.duplicate_edges + self.duplicate_ratings
        )
    }
}

/// Fully ingested dataset: graph, ratings, and the id maps tying dense
/// indices back to raw identifiers.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: TrustGraph,
    pub ratings: RatingsTable,
    pub user_map: IdMap,
    pub item_map: IdMap,
    pub stats: IngestStats,
}

/// Assembles a [`Dataset`] from parsed raw records.
///
/// The user universe is the union of ids appearing in either input, so users
/// present only in the trust network still get (empty) rating rows and users
/// present only in the ratings still get (isolated) graph nodes.
pub fn build_dataset(
    trust: &[(u64, u64)],
    ratings: &[(u64, u64, f64)],
    convention: Convention,
) -> Result<Dataset> {
    let mut raw_users: Vec<u64> = Vec::with_capacity(trust.len() * 2 + ratings.len());
    for &(a, b) in trust {
        raw_users.push(a);
        raw_users.push(b);
    }
    for &(u, _, _) in ratings {
        raw_users.push(u);
    }
    let user_map = IdMap::from_raw_ids(raw_users);
    let item_map = IdMap::from_raw_ids(ratings.iter().map(|&(_, i, _)| i).collect());

    let dense_edges: Vec<(u32, u32)> = trust
        .iter()
        .map(|&(a, b)| (user_map.dense(a).unwrap(), user_map.dense(b).unwrap()))
        .collect();
    let graph = build_trust_graph(&dense_edges, user_map.len(), convention)?;

    let dense_records: Vec<(u32, u32, f64)> = ratings
        .iter()
        .map(|&(u, i, r)| (user_map.dense(u).unwrap(), item_map.dense(i).unwrap(), r))
        .collect();
    let table = RatingsTable::from_records(user_map.len(), item_map.len(), &dense_records);

    let stats = IngestStats {
        users: user_map.len(),
        items: item_map.len(),
        ratings: table.n_ratings(),
        edges: graph.n_edges(),
        density: graph.density(),
        dropped_self_loops: graph.dropped_self_loops(),
        duplicate_edges: graph.duplicate_edges(),
        duplicate_ratings: table.duplicates(),
    };
    Ok(Dataset {
        graph,
        ratings: table,
        user_map,
        item_map,
        stats,
    })
}
