//! Neighborhood scans shared by local-moving, refinement and label
//! propagation.

use std::sync::atomic::{AtomicU32, Ordering};

use crate::accumulator::{Accumulator, AccumulatorStrategy, NeighborAccumulator};
use crate::graph::{Graph, VertexId};
use crate::parallel::AtomicF64;
use crate::quality::delta_modularity;

/// Scratch state owned by one worker.
#[derive(Debug)]
pub(crate) struct Worker {
    pub local: Accumulator,
    aggregate: Option<Accumulator>,
    pub candidates: Vec<(VertexId, f64)>,
    pub gain: f64,
    pub moved: usize,
    pub visited: usize,
}

impl Worker {
    pub fn new(strategy: &AccumulatorStrategy, num_vertices: usize) -> Self {
        let agg = strategy.aggregation_strategy();
        Self {
            local: strategy.build(num_vertices),
            aggregate: (agg != *strategy).then(|| agg.build(num_vertices)),
            candidates: Vec::new(),
            gain: 0.0,
            moved: 0,
            visited: 0,
        }
    }

    pub fn aggregation_accumulator(&mut self) -> &mut Accumulator {
        self.aggregate.as_mut().unwrap_or(&mut self.local)
    }

    pub fn aux_memory_bytes(&self) -> usize {
        self.local.aux_memory_bytes() + self.aggregate.as_ref().map_or(0, |a| a.aux_memory_bytes())
    }

    pub fn reset_counters(&mut self) {
        self.gain = 0.0;
        self.moved = 0;
        self.visited = 0;
    }
}

pub(crate) fn make_workers(
    strategy: &AccumulatorStrategy,
    num_vertices: usize,
    count: usize,
) -> Vec<Worker> {
    (0..count.max(1))
        .map(|_| Worker::new(strategy, num_vertices))
        .collect()
}

pub(crate) fn atomic_ids(ids: &[VertexId]) -> Vec<AtomicU32> {
    ids.iter().map(|&c| AtomicU32::new(c)).collect()
}

pub(crate) fn load_ids(ids: &[AtomicU32]) -> Vec<VertexId> {
    ids.iter().map(|c| c.load(Ordering::Relaxed)).collect()
}

/// How candidate weights are obtained after the accumulation scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weighing {
    /// Re-scan the edges and compute exact linking weights for the
    /// candidates (no-op for strategies that store every key).
    Exact,
    /// Use the accumulated sketch values as they are.
    SketchOnly,
}

/// Accumulates `(C_j, w_ij)` over neighbors `j != i` (and, when `bounds` is
/// given, only those sharing `i`'s bound), fills `worker.candidates` and
/// returns the linking weight to `current`.
pub(crate) fn collect_candidates(
    g: &Graph,
    i: VertexId,
    membership: &[AtomicU32],
    bounds: Option<&[VertexId]>,
    current: VertexId,
    weighing: Weighing,
    worker: &mut Worker,
) -> f64 {
    let keep = |j: VertexId| j != i && bounds.map_or(true, |b| b[j as usize] == b[i as usize]);
    let acc = &mut worker.local;
    acc.clear();
    for (j, w) in g.neighbors(i) {
        if keep(j) {
            acc.accumulate(membership[j as usize].load(Ordering::Relaxed), w);
        }
    }
    let cands = &mut worker.candidates;
    cands.clear();
    acc.candidates_into(cands);

    if let Some(k_current) = acc.stored_value(current) {
        return k_current;
    }
    if weighing == Weighing::SketchOnly {
        return cands.iter().find(|e| e.0 == current).map_or(0.0, |e| e.1);
    }
    for e in cands.iter_mut() {
        e.1 = 0.0;
    }
    let mut k_current = 0.0;
    for (j, w) in g.neighbors(i) {
        if !keep(j) {
            continue;
        }
        let c = membership[j as usize].load(Ordering::Relaxed);
        if c == current {
            k_current += w;
        }
        if let Some(e) = cands.iter_mut().find(|e| e.0 == c) {
            e.1 += w;
        }
    }
    k_current
}

/// Best strictly positive delta-modularity move among the worker's
/// candidates. Equal gains resolve to the smallest community id; a zero
/// gain never moves.
pub(crate) fn best_move(
    candidates: &[(VertexId, f64)],
    current: VertexId,
    k_i_to_current: f64,
    k_i: f64,
    totals: &[AtomicF64],
    two_m: f64,
) -> Option<(VertexId, f64)> {
    let sigma_d = totals[current as usize].load();
    let mut best: Option<(VertexId, f64)> = None;
    for &(c, k_c) in candidates {
        if c == current {
            continue;
        }
        let gain = delta_modularity(
            k_c,
            k_i_to_current,
            k_i,
            totals[c as usize].load(),
            sigma_d,
            two_m,
        );
        let better = match best {
            None => gain > 0.0,
            Some((bc, bg)) => gain > bg || (gain == bg && c < bc),
        };
        if better {
            best = Some((c, gain));
        }
    }
    best
}
