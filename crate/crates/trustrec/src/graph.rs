//! Directed trust network and its adjacency-matrix views.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Orientation of the adjacency matrix built from trust statements.
///
/// A trust statement is the directed edge `truster -> trustee`. Under
/// [`Convention::TrusteeRows`] the edge lands at `A[trustee][truster]`, so row
/// `i` lists the users who trust `i`; this is the orientation the similarity
/// recurrence is defined on and the default everywhere. The flipped
/// [`Convention::TrusterRows`] stores `A[truster][trustee]`, making row `u`
/// the users that `u` trusts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    #[default]
    TrusteeRows,
    TrusterRows,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::TrusteeRows => "trustee-rows",
            Convention::TrusterRows => "truster-rows",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "trustee-rows" => Ok(Convention::TrusteeRows),
            "truster-rows" => Ok(Convention::TrusterRows),
            other => Err(Error::Config(format!(
                "unknown convention '{other}' (expected trustee-rows or truster-rows)"
            ))),
        }
    }
}

/// Trust network over densely indexed users.
#[derive(Debug, Clone)]
pub struct TrustGraph {
    n_users: usize,
    /// De-duplicated `(truster, trustee)` pairs, sorted, self-loops removed.
    edges: Vec<(u32, u32)>,
    adjacency: SparseMatrix,
    convention: Convention,
    dropped_self_loops: usize,
    duplicate_edges: usize,
}

/// Builds the graph from raw `(truster, trustee)` pairs with dense ids.
///
/// Self-loops are dropped and duplicate statements collapse to a single
/// unweighted edge; both are counted for the ingestion report.
pub fn build_trust_graph(
    edges: &[(u32, u32)],
    n_users: usize,
    convention: Convention,
) -> Result<TrustGraph> {
    for &(a, b) in edges {
        if a as usize >= n_users || b as usize >= n_users {
            return Err(Error::Dimension(format!(
                "edge ({a}, {b}) references a user outside 0..{n_users}"
            )));
        }
    }
    let mut clean: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
    let mut dropped_self_loops = 0;
    for &(a, b) in edges {
        if a == b {
            dropped_self_loops += 1;
        } else {
            clean.push((a, b));
        }
    }
    clean.sort_unstable();
    let before = clean.len();
    clean.dedup();
    let duplicate_edges = before - clean.len();
    let triplets = clean
        .iter()
        .map(|&(truster, trustee)| match convention {
            Convention::TrusteeRows => (trustee, truster, 1.0),
            Convention::TrusterRows => (truster, trustee, 1.0),
        })
        .collect();
    let adjacency = SparseMatrix::from_triplets(n_users, n_users, triplets)?;
    Ok(TrustGraph {
        n_users,
        edges: clean,
        adjacency,
        convention,
        dropped_self_loops,
        duplicate_edges,
    })
}

impl TrustGraph {
    pub fn n_users(&self) -> usize {
        self.n_users
    }

    /// Distinct trust edges after cleaning.
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Cleaned `(truster, trustee)` pairs.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Adjacency matrix in the graph's configured orientation.
    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn duplicate_edges(&self) -> usize {
        self.duplicate_edges
    }

    /// Edge count over the square of the user count.
    pub fn density(&self) -> f64 {
        if self.n_users == 0 {
            return 0.0;
        }
        self.n_edges() as f64 / (self.n_users as f64 * self.n_users as f64)
    }

    /// Adjacency with trustee rows regardless of the stored convention.
    pub fn trustee_rows_adjacency(&self) -> SparseMatrix {
        match self.convention {
            Convention::TrusteeRows => self.adjacency.clone(),
            Convention::TrusterRows => self.adjacency.transpose(),
        }
    }
}

/// Which degree a [`DegreeVector`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    /// Trust statements received: `|{v : v trusts u}|`.
    In,
    /// Received plus expressed: in-degree + out-degree.
    Combined,
}

impl DegreeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DegreeMode::In => "in",
            DegreeMode::Combined => "combined",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "in" => Ok(DegreeMode::In),
            "combined" => Ok(DegreeMode::Combined),
            other => Err(Error::Config(format!(
                "unknown degree mode '{other}' (expected in or combined)"
            ))),
        }
    }
}

/// Per-user degree counts in graph terms (independent of matrix orientation).
#[derive(Debug, Clone)]
pub struct DegreeVector {
    mode: DegreeMode,
    values: Vec<u32>,
}

/// Computes the per-user degree counts for `mode`.
pub fn degree_vector(graph: &TrustGraph, mode: DegreeMode) -> DegreeVector {
    let mut values = vec![0u32; graph.n_users()];
    for &(truster, trustee) in graph.edges() {
        match mode {
            DegreeMode::In => values[trustee as usize] += 1,
            DegreeMode::Combined => {
                values[trustee as usize] += 1;
                values[truster as usize] += 1;
            }
        }
    }
    DegreeVector { mode, values }
}

impl DegreeVector {
    /// Wraps precomputed counts; callers are responsible for the mode tag
    /// matching how the values were counted.
    #[cfg(test)]
    pub(crate) fn from_parts(mode: DegreeMode, values: Vec<u32>) -> Self {
        DegreeVector { mode, values }
    }

    pub fn mode(&self) -> DegreeMode {
        self.mode
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
