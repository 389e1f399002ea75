//! Modularity, delta-modularity and per-community weight totals.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Vertex-to-community mapping with dense ids and per-community total
/// incident weight `Σ_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityAssignment {
    membership: Vec<VertexId>,
    totals: Vec<f64>,
}

impl CommunityAssignment {
    /// Every vertex in its own community.
    pub fn singletons(g: &Graph) -> Self {
        Self {
            membership: (0..g.num_vertices() as VertexId).collect(),
            totals: g.weighted_degrees().to_vec(),
        }
    }

    pub fn membership(&self) -> &[VertexId] {
        &self.membership
    }

    pub fn community_totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn community_count(&self) -> usize {
        self.totals.len()
    }

    pub fn community_of(&self, v: VertexId) -> VertexId {
        self.membership[v as usize]
    }

    pub fn into_membership(self) -> Vec<VertexId> {
        self.membership
    }
}

/// Relabels ids densely in order of first appearance (vertex 0's community
/// becomes 0). Returns the relabeled vector and the number of communities.
pub fn renumber(membership: &[VertexId]) -> (Vec<VertexId>, usize) {
    let bound = membership
        .iter()
        .map(|&c| c as usize + 1)
        .max()
        .unwrap_or(0);
    let mut map = vec![VertexId::MAX; bound];
    let mut next: VertexId = 0;
    let out = membership
        .iter()
        .map(|&c| {
            let slot = &mut map[c as usize];
            if *slot == VertexId::MAX {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect();
    (out, next as usize)
}

/// Densely renumbers `membership` and sums `Σ_c = Σ_{C_i = c} K_i`.
pub fn recompute_community_totals(g: &Graph, membership: &[VertexId]) -> CommunityAssignment {
    assert_eq!(
        membership.len(),
        g.num_vertices(),
        "membership must cover every vertex"
    );
    let (membership, count) = renumber(membership);
    let mut totals = vec![0.0; count];
    for (v, &c) in membership.iter().enumerate() {
        totals[c as usize] += g.weighted_degree(v as VertexId);
    }
    CommunityAssignment { membership, totals }
}

/// `Q = Σ_c [σ_c / 2m − (Σ_c / 2m)²]`, with `σ_c` the sum of stored
/// entries whose endpoints both lie in `c`.
pub fn modularity(g: &Graph, membership: &[VertexId]) -> Result<f64> {
    let two_m = g.total_weight_2m();
    if !(two_m > 0.0) {
        return Err(Error::UndefinedQuality);
    }
    if membership.len() != g.num_vertices() {
        return Err(Error::Validation(
            "membership does not cover the graph's vertices".into(),
        ));
    }
    let (dense, count) = renumber(membership);
    let mut internal = vec![0.0; count];
    let mut totals = vec![0.0; count];
    for u in 0..g.num_vertices() as VertexId {
        let cu = dense[u as usize];
        totals[cu as usize] += g.weighted_degree(u);
        internal[cu as usize] += g
            .neighbors(u)
            .filter(|&(v, _)| dense[v as usize] == cu)
            .map(|(_, w)| w)
            .sum::<f64>();
    }
    Ok(internal
        .iter()
        .zip(&totals)
        .map(|(&sigma, &total)| sigma / two_m - (total / two_m).powi(2))
        .sum())
}

/// Splits every community into its connected components. Labels follow the
/// first appearance of each component in vertex order. Separating parts that
/// share no edge never lowers modularity.
pub fn split_disconnected(g: &Graph, membership: &[VertexId]) -> Vec<VertexId> {
    let n = g.num_vertices();
    let mut out = vec![VertexId::MAX; n];
    let mut stack = Vec::new();
    let mut next = 0;
    for s in 0..n {
        if out[s] != VertexId::MAX {
            continue;
        }
        out[s] = next;
        stack.push(s as VertexId);
        while let Some(u) = stack.pop() {
            for (v, _) in g.neighbors(u) {
                if out[v as usize] == VertexId::MAX
                    && membership[v as usize] == membership[u as usize]
                {
                    out[v as usize] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    out
}

/// Modularity change of moving vertex `i` from its community `d` to `c`:
///
/// `ΔQ = (K_i→c − K_i→d) / m − K_i (K_i + Σ_c − Σ_d) / (2m²)`
///
/// `sigma_d` includes `K_i`; `k_i_to_d` excludes any self-loop on `i`.
#[inline]
pub fn delta_modularity(
    k_i_to_c: f64,
    k_i_to_d: f64,
    k_i: f64,
    sigma_c: f64,
    sigma_d: f64,
    two_m: f64,
) -> f64 {
    let m = 0.5 * two_m;
    (k_i_to_c - k_i_to_d) / m - k_i * (k_i + sigma_c - sigma_d) / (2.0 * m * m)
}
