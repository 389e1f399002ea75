//! Compressed adjacency storage for undirected weighted graphs.
//!
//! Every undirected edge `{i, j}` with `i != j` is stored twice, once in the
//! adjacency list of each endpoint. A self-loop is stored once; its stored
//! weight is the loop's contribution to the weighted degree, i.e. twice the
//! weight of an undirected loop read from an input file. Under this
//! convention `2m` is simply the sum of all stored entries, which is also the
//! value super-vertex self-loops carry after aggregation.

mod io;

pub use io::{load_edge_list, load_matrix_market, EdgeListOptions};

use crate::error::{Error, Result};
use crate::quality::CommunityAssignment;

/// Vertex (and community) identifier.
pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_weight_2m: f64,
}

impl Graph {
    /// Builds a graph from undirected edges `(u, v, w)`.
    ///
    /// Reverse entries are inserted, parallel edges are merged by summing
    /// their weights, and self-loops are stored once with doubled weight.
    pub fn from_undirected_edges<I>(num_vertices: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, f64)>,
    {
        let mut entries = Vec::new();
        for (u, v, w) in edges {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            if u as usize >= num_vertices || v as usize >= num_vertices {
                return Err(Error::Validation(format!(
                    "edge ({u}, {v}) is outside the vertex range 0..{num_vertices}"
                )));
            }
            if u == v {
                entries.push((u, u, 2.0 * w));
            } else {
                entries.push((u, v, w));
                entries.push((v, u, w));
            }
        }
        Self::from_directed_entries(num_vertices, entries)
    }

    /// Builds a graph from already-directed adjacency entries. Duplicates are
    /// summed in a canonical order so the result does not depend on the input
    /// order. Symmetry is the caller's responsibility and is checked.
    pub(crate) fn from_directed_entries(
        num_vertices: usize,
        mut entries: Vec<(VertexId, VertexId, f64)>,
    ) -> Result<Self> {
        if num_vertices >= VertexId::MAX as usize {
            return Err(Error::Validation(format!(
                "{num_vertices} vertices exceed the 32-bit id range"
            )));
        }
        entries.sort_unstable_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then_with(|| a.2.total_cmp(&b.2))
        });

        let mut offsets = vec![0usize; num_vertices + 1];
        let mut neighbors: Vec<VertexId> = Vec::with_capacity(entries.len());
        let mut weights: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(VertexId, VertexId)> = None;
        for (u, v, w) in entries {
            if last == Some((u, v)) {
                *weights.last_mut().unwrap() += w;
                continue;
            }
            last = Some((u, v));
            offsets[u as usize + 1] += 1;
            neighbors.push(v);
            weights.push(w);
        }
        for i in 0..num_vertices {
            offsets[i + 1] += offsets[i];
        }
        let graph = Self::from_parts(offsets, neighbors, weights);
        graph.check_invariants()?;
        Ok(graph)
    }

    fn from_parts(offsets: Vec<usize>, neighbors: Vec<VertexId>, weights: Vec<f64>) -> Self {
        let n = offsets.len() - 1;
        let degrees: Vec<f64> = (0..n)
            .map(|i| weights[offsets[i]..offsets[i + 1]].iter().sum())
            .collect();
        let total_weight_2m = degrees.iter().sum();
        Self {
            offsets,
            neighbors,
            weights,
            degrees,
            total_weight_2m,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored adjacency entries.
    pub fn num_directed_edges(&self) -> usize {
        self.neighbors.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_ids(&self) -> &[VertexId] {
        &self.neighbors
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        let range = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Weighted degree `K_v`.
    #[inline]
    pub fn weighted_degree(&self, v: VertexId) -> f64 {
        self.degrees[v as usize]
    }

    pub fn weighted_degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn total_weight_2m(&self) -> f64 {
        self.total_weight_2m
    }

    /// Stored weight of entry `(u, v)`, if present.
    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        let range = self.offsets[u as usize]..self.offsets[u as usize + 1];
        self.neighbors[range.clone()]
            .binary_search(&v)
            .ok()
            .map(|p| self.weights[range.start + p])
    }

    /// Bytes held by the adjacency arrays.
    pub fn memory_bytes(&self) -> usize {
        self.offsets.len() * std::mem::size_of::<usize>()
            + self.neighbors.len() * std::mem::size_of::<VertexId>()
            + (self.weights.len() + self.degrees.len()) * std::mem::size_of::<f64>()
    }

    /// Exhaustive structural check: offsets, sorted neighbors, positivity,
    /// symmetry and the `Σ K_i = 2m` identity.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.num_vertices();
        if self.offsets[0] != 0 || self.offsets[n] != self.neighbors.len() {
            return Err(Error::Consistency(
                "offsets do not span the adjacency arrays".into(),
            ));
        }
        if self.neighbors.len() != self.weights.len() {
            return Err(Error::Consistency(
                "neighbor and weight arrays differ in length".into(),
            ));
        }
        for u in 0..n as VertexId {
            let ids = &self.neighbors[self.offsets[u as usize]..self.offsets[u as usize + 1]];
            if ids.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::Consistency(format!(
                    "adjacency of {u} is not strictly sorted"
                )));
            }
            for (v, w) in self.neighbors(u) {
                if v as usize >= n {
                    return Err(Error::Consistency(format!("entry ({u}, {v}) out of range")));
                }
                if !(w > 0.0) {
                    return Err(Error::Validation(format!(
                        "entry ({u}, {v}) has weight {w}"
                    )));
                }
                if u != v && self.edge_weight(v, u) != Some(w) {
                    return Err(Error::Consistency(format!(
                        "entry ({u}, {v}, {w}) has no matching reverse entry"
                    )));
                }
            }
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - self.total_weight_2m).abs() > 1e-9 * sum.abs().max(1.0) {
            return Err(Error::Consistency(format!(
                "total weight {} differs from recomputed {}",
                self.total_weight_2m, sum
            )));
        }
        Ok(())
    }
}

/// Weighted link `source -> target` between two communities, emitted by an
/// aggregation pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommunityEdge {
    pub source: VertexId,
    pub target: VertexId,
    pub weight: f64,
}

/// How cross-community weights are reconciled when the super-vertex graph is
/// assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateMode {
    /// Both directions must agree (exact accumulation); a mismatch is an error.
    Exact,
    /// Directions may disagree (sketch accumulation); they are averaged, with
    /// a missing direction counted as zero.
    Symmetrize,
}

const SYMMETRY_RTOL: f64 = 1e-9;

/// Assembles the super-vertex graph whose vertices are the communities of
/// `assignment`. Intra-community weight arrives as a `(c, c, w)` edge and is
/// kept as the super-vertex self-loop.
pub fn build_aggregate_graph(
    g: &Graph,
    assignment: &CommunityAssignment,
    edges: &[CommunityEdge],
    mode: AggregateMode,
) -> Result<Graph> {
    let n = assignment.community_count();
    if assignment.membership().len() != g.num_vertices() {
        return Err(Error::Validation(
            "membership does not cover the graph's vertices".into(),
        ));
    }
    let mut directed: Vec<(VertexId, VertexId, f64)> = Vec::with_capacity(edges.len());
    for e in edges {
        if e.source as usize >= n || e.target as usize >= n {
            return Err(Error::Validation(format!(
                "community edge ({}, {}) outside 0..{n}",
                e.source, e.target
            )));
        }
        if e.weight > 0.0 {
            directed.push((e.source, e.target, e.weight));
        }
    }
    directed.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
    directed.dedup_by(|next, kept| {
        if (next.0, next.1) == (kept.0, kept.1) {
            kept.2 += next.2;
            true
        } else {
            false
        }
    });

    let lookup = |u: VertexId, v: VertexId| -> Option<f64> {
        directed
            .binary_search_by(|e| (e.0, e.1).cmp(&(u, v)))
            .ok()
            .map(|p| directed[p].2)
    };

    let mut entries = Vec::with_capacity(directed.len() + 8);
    for &(u, v, w) in &directed {
        if u == v {
            entries.push((u, v, w));
            continue;
        }
        match lookup(v, u) {
            Some(rev) => {
                if mode == AggregateMode::Exact
                    && (w - rev).abs() > SYMMETRY_RTOL * w.abs().max(rev.abs())
                {
                    return Err(Error::Consistency(format!(
                        "cross-community weight ({u}, {v}) = {w} but ({v}, {u}) = {rev}"
                    )));
                }
                // Same expression from both sides keeps the result symmetric.
                let (a, b) = if u < v { (w, rev) } else { (rev, w) };
                entries.push((u, v, 0.5 * (a + b)));
            }
            None => {
                if mode == AggregateMode::Exact {
                    return Err(Error::Consistency(format!(
                        "cross-community edge ({u}, {v}) has no reverse"
                    )));
                }
                entries.push((u, v, 0.5 * w));
                entries.push((v, u, 0.5 * w));
            }
        }
    }
    let aggregate = Graph::from_directed_entries(n, entries)?;
    if mode == AggregateMode::Exact {
        let (before, after) = (g.total_weight_2m(), aggregate.total_weight_2m());
        if (before - after).abs() > 1e-6 * before.abs().max(1.0) {
            return Err(Error::Consistency(format!(
                "aggregation changed total weight from {before} to {after}"
            )));
        }
    }
    Ok(aggregate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quality::recompute_community_totals;

    fn triangle() -> Graph {
        Graph::from_undirected_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap()
    }

    #[test]
    fn triangle_is_symmetric() {
        let g = triangle();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_directed_edges(), 6);
        assert_eq!(g.total_weight_2m(), 6.0);
        assert_eq!(g.weighted_degrees(), &[2.0, 2.0, 2.0]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn self_loop_is_stored_once_with_doubled_weight() {
        let g = Graph::from_undirected_edges(2, [(0, 0, 1.5), (0, 1, 1.0)]).unwrap();
        assert_eq!(g.num_directed_edges(), 3);
        assert_eq!(g.edge_weight(0, 0), Some(3.0));
        assert_eq!(g.weighted_degree(0), 4.0);
        assert_eq!(g.total_weight_2m(), 5.0);
    }

    #[test]
    fn rejects_non_positive_weight() {
        assert!(matches!(
            Graph::from_undirected_edges(2, [(0, 1, 0.0)]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Graph::from_undirected_edges(2, [(0, 1, -1.0)]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn asymmetric_entries_fail_the_check() {
        let err = Graph::from_directed_entries(2, vec![(0, 1, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }

    #[test]
    fn exact_aggregation_rejects_asymmetry() {
        let g = triangle();
        let a = recompute_community_totals(&g, &[0, 0, 1]);
        let edges = [
            CommunityEdge {
                source: 0,
                target: 0,
                weight: 2.0,
            },
            CommunityEdge {
                source: 0,
                target: 1,
                weight: 2.0,
            },
            CommunityEdge {
                source: 1,
                target: 0,
                weight: 1.0,
            },
            CommunityEdge {
                source: 1,
                target: 1,
                weight: 1.0,
            },
        ];
        assert!(matches!(
            build_aggregate_graph(&g, &a, &edges, AggregateMode::Exact),
            Err(Error::Consistency(_))
        ));
        let s = build_aggregate_graph(&g, &a, &edges, AggregateMode::Symmetrize).unwrap();
        assert_eq!(s.edge_weight(0, 1), Some(1.5));
        assert_eq!(s.edge_weight(1, 0), Some(1.5));
    }

    #[test]
    fn symmetrize_fills_missing_direction() {
        let g = triangle();
        let a = recompute_community_totals(&g, &[0, 1, 1]);
        let edges = [CommunityEdge {
            source: 0,
            target: 1,
            weight: 4.0,
        }];
        let s = build_aggregate_graph(&g, &a, &edges, AggregateMode::Symmetrize).unwrap();
        assert_eq!(s.edge_weight(0, 1), Some(2.0));
        assert_eq!(s.edge_weight(1, 0), Some(2.0));
    }
}
