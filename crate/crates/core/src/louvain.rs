//! Multi-pass Louvain: local-moving, then aggregation of communities into
//! super-vertices, repeated on the smaller graph.

use std::sync::atomic::{AtomicU32, Ordering};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::accumulator::{AccumulatorStrategy, NeighborAccumulator};
use crate::error::{Error, Result};
use crate::graph::{build_aggregate_graph, AggregateMode, CommunityEdge, Graph, VertexId};
use crate::parallel::{atomic_f64_vec, default_threads, for_each_chunk, AtomicF64};
use crate::quality::{recompute_community_totals, CommunityAssignment};
use crate::scan::{
    atomic_ids, best_move, collect_candidates, load_ids, make_workers, Weighing, Worker,
};

/// Convergence and strategy settings shared by Louvain and Leiden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LouvainConfig {
    pub strategy: AccumulatorStrategy,
    /// A local-moving phase stops once one sweep gains less than this much
    /// modularity in total.
    pub iteration_tolerance: f64,
    /// The tolerance is divided by this after every pass.
    pub tolerance_decline_factor: f64,
    pub max_iterations: usize,
    pub max_passes: usize,
    /// Passes stop once `communities / vertices` exceeds this ratio.
    pub aggregation_stop_ratio: f64,
    /// Worker count; 0 picks the available parallelism.
    pub threads: usize,
    /// Single worker, ascending vertex order.
    pub deterministic: bool,
    /// Recorded with the run; vertex order does not depend on it.
    pub seed: u64,
}

/// Leiden takes the same settings; only the default strategy differs.
pub type LeidenConfig = LouvainConfig;

impl Default for LouvainConfig {
    fn default() -> Self {
        Self {
            strategy: AccumulatorStrategy::misra_gries(8),
            iteration_tolerance: 1e-2,
            tolerance_decline_factor: 10.0,
            max_iterations: 20,
            max_passes: 10,
            aggregation_stop_ratio: 0.8,
            threads: 0,
            deterministic: false,
            seed: 0,
        }
    }
}

impl LouvainConfig {
    /// Defaults for Leiden (64-slot sketch).
    pub fn leiden() -> Self {
        Self {
            strategy: AccumulatorStrategy::misra_gries(64),
            ..Self::default()
        }
    }

    pub fn with_strategy(mut self, strategy: AccumulatorStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn deterministic(mut self) -> Self {
        self.deterministic = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.strategy.validate()?;
        if !(self.iteration_tolerance > 0.0) {
            return Err(Error::Config("iteration tolerance must be positive".into()));
        }
        if !(self.tolerance_decline_factor >= 1.0) {
            return Err(Error::Config(
                "tolerance decline factor must be at least 1".into(),
            ));
        }
        if self.max_iterations == 0 || self.max_passes == 0 {
            return Err(Error::Config(
                "iteration and pass caps must be at least 1".into(),
            ));
        }
        if !(self.aggregation_stop_ratio > 0.0 && self.aggregation_stop_ratio < 1.0) {
            return Err(Error::Config(
                "aggregation stop ratio must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn worker_count(&self) -> usize {
        if self.deterministic {
            1
        } else if self.threads == 0 {
            default_threads()
        } else {
            self.threads
        }
    }
}

/// Per-pass measurements.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PassRecord {
    /// Vertices of the graph this pass ran on.
    pub vertices: usize,
    /// Total weight `2m` of that graph.
    pub total_weight_2m: f64,
    pub iterations: usize,
    pub vertices_moved: usize,
    pub total_gain: f64,
    /// Communities (Leiden: refined sub-communities) after the pass.
    pub communities: usize,
    pub local_moving_ms: f64,
    pub refinement_ms: f64,
    pub aggregation_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PassTrace {
    pub passes: Vec<PassRecord>,
}

/// Result of a multi-pass run on the original graph.
#[derive(Debug, Clone)]
pub struct Detection {
    pub assignment: CommunityAssignment,
    pub trace: PassTrace,
    pub workers: usize,
    /// Sum of the workers' accumulator scratch sizes.
    pub aux_memory_bytes: usize,
}

pub(crate) struct MoveStats {
    pub iterations: usize,
    pub moved: usize,
    pub gain: f64,
}

/// Repeated local-moving sweeps over all vertices until one sweep gains
/// less than `tolerance` or `max_iterations` sweeps have run.
pub(crate) fn local_moving(
    g: &Graph,
    membership: &[AtomicU32],
    totals: &[AtomicF64],
    tolerance: f64,
    max_iterations: usize,
    workers: &mut [Worker],
) -> MoveStats {
    let two_m = g.total_weight_2m();
    let mut stats = MoveStats {
        iterations: 0,
        moved: 0,
        gain: 0.0,
    };
    for _ in 0..max_iterations {
        workers.iter_mut().for_each(Worker::reset_counters);
        for_each_chunk(workers, g.num_vertices(), |w, range| {
            for i in range {
                let i = i as VertexId;
                let d = membership[i as usize].load(Ordering::Relaxed);
                let k_d = collect_candidates(g, i, membership, None, d, Weighing::Exact, w);
                let k_i = g.weighted_degree(i);
                if let Some((c, gain)) = best_move(&w.candidates, d, k_d, k_i, totals, two_m) {
                    membership[i as usize].store(c, Ordering::Relaxed);
                    totals[d as usize].fetch_add(-k_i);
                    totals[c as usize].fetch_add(k_i);
                    w.gain += gain;
                    w.moved += 1;
                }
            }
        });
        let gain: f64 = workers.iter().map(|w| w.gain).sum();
        stats.iterations += 1;
        stats.moved += workers.iter().map(|w| w.moved).sum::<usize>();
        stats.gain += gain;
        if gain < tolerance {
            break;
        }
    }
    stats
}

#[derive(Debug, Clone)]
pub struct LocalMoveOutcome {
    pub assignment: CommunityAssignment,
    pub iterations: usize,
    pub vertices_moved: usize,
    pub total_gain: f64,
}

/// One local-moving phase starting from `assignment`, using
/// `config.iteration_tolerance` and `config.max_iterations`.
pub fn local_moving_pass(
    g: &Graph,
    assignment: &CommunityAssignment,
    config: &LouvainConfig,
) -> Result<LocalMoveOutcome> {
    config.validate()?;
    let membership = atomic_ids(assignment.membership());
    let mut totals = vec![0.0; g.num_vertices()];
    for (t, &s) in totals.iter_mut().zip(assignment.community_totals()) {
        *t = s;
    }
    let totals = atomic_f64_vec(&totals);
    let mut workers = make_workers(&config.strategy, g.num_vertices(), config.worker_count());
    let stats = local_moving(
        g,
        &membership,
        &totals,
        config.iteration_tolerance,
        config.max_iterations,
        &mut workers,
    );
    Ok(LocalMoveOutcome {
        assignment: recompute_community_totals(g, &load_ids(&membership)),
        iterations: stats.iterations,
        vertices_moved: stats.moved,
        total_gain: stats.gain,
    })
}

pub(crate) fn aggregate_edges(
    g: &Graph,
    assignment: &CommunityAssignment,
    workers: &mut [Worker],
) -> Vec<CommunityEdge> {
    let count = assignment.community_count();
    let mut offsets = vec![0usize; count + 1];
    for &c in assignment.membership() {
        offsets[c as usize + 1] += 1;
    }
    for c in 0..count {
        offsets[c + 1] += offsets[c];
    }
    let mut members = vec![0 as VertexId; g.num_vertices()];
    let mut fill = offsets.clone();
    for (v, &c) in assignment.membership().iter().enumerate() {
        members[fill[c as usize]] = v as VertexId;
        fill[c as usize] += 1;
    }

    let mut states: Vec<(&mut Worker, Vec<(usize, Vec<CommunityEdge>)>)> =
        workers.iter_mut().map(|w| (w, Vec::new())).collect();
    let membership = assignment.membership();
    for_each_chunk(&mut states, count, |(w, out), range| {
        let start = range.start;
        let mut edges = Vec::new();
        let mut cands = Vec::new();
        for c in range {
            let acc = w.aggregation_accumulator();
            acc.clear();
            for &i in &members[offsets[c]..offsets[c + 1]] {
                for (j, weight) in g.neighbors(i) {
                    acc.accumulate(membership[j as usize], weight);
                }
            }
            cands.clear();
            acc.candidates_into(&mut cands);
            edges.extend(cands.iter().map(|&(d, weight)| CommunityEdge {
                source: c as VertexId,
                target: d,
                weight,
            }));
        }
        out.push((start, edges));
    });
    let mut chunks: Vec<_> = states.into_iter().flat_map(|(_, out)| out).collect();
    chunks.sort_unstable_by_key(|c| c.0);
    chunks.into_iter().flat_map(|c| c.1).collect()
}

/// Accumulates, per community, the weight linking it to each neighboring
/// community (itself included, giving the super-vertex self-loop). Sketch
/// strategies emit their accumulated values without a corrective re-scan.
pub fn aggregation_pass(
    g: &Graph,
    assignment: &CommunityAssignment,
    strategy: &AccumulatorStrategy,
) -> Vec<CommunityEdge> {
    let mut workers = make_workers(strategy, g.num_vertices(), 1);
    aggregate_edges(g, assignment, &mut workers)
}

pub(crate) fn aggregate_mode(strategy: &AccumulatorStrategy) -> AggregateMode {
    if strategy.aggregates_exactly() {
        AggregateMode::Exact
    } else {
        AggregateMode::Symmetrize
    }
}

pub(crate) fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs Louvain from singleton communities.
pub fn detect_louvain(g: &Graph, config: &LouvainConfig) -> Result<Detection> {
    config.validate()?;
    let n = g.num_vertices();
    let mut workers = make_workers(&config.strategy, n, config.worker_count());
    let aux_memory_bytes = workers.iter().map(Worker::aux_memory_bytes).sum();
    let mode = aggregate_mode(&config.strategy);

    let mut top: Vec<VertexId> = (0..n as VertexId).collect();
    let mut owned: Option<Graph> = None;
    let mut tolerance = config.iteration_tolerance;
    let mut trace = PassTrace::default();

    for pass in 0..config.max_passes {
        let graph = owned.as_ref().unwrap_or(g);
        let start = Instant::now();
        let membership = atomic_ids(&(0..graph.num_vertices() as VertexId).collect::<Vec<_>>());
        let totals = atomic_f64_vec(graph.weighted_degrees());
        let stats = local_moving(
            graph,
            &membership,
            &totals,
            tolerance,
            config.max_iterations,
            &mut workers,
        );
        let assignment = recompute_community_totals(graph, &load_ids(&membership));
        for t in top.iter_mut() {
            *t = assignment.community_of(*t);
        }
        let mut record = PassRecord {
            vertices: graph.num_vertices(),
            total_weight_2m: graph.total_weight_2m(),
            iterations: stats.iterations,
            vertices_moved: stats.moved,
            total_gain: stats.gain,
            communities: assignment.community_count(),
            local_moving_ms: elapsed_ms(start),
            ..Default::default()
        };

        let shrink = assignment.community_count() as f64 / graph.num_vertices().max(1) as f64;
        if stats.moved == 0
            || shrink > config.aggregation_stop_ratio
            || pass + 1 == config.max_passes
        {
            trace.passes.push(record);
            break;
        }
        let start = Instant::now();
        let edges = aggregate_edges(graph, &assignment, &mut workers);
        let next = build_aggregate_graph(graph, &assignment, &edges, mode)?;
        record.aggregation_ms = elapsed_ms(start);
        trace.passes.push(record);
        owned = Some(next);
        tolerance /= config.tolerance_decline_factor;
    }

    Ok(Detection {
        assignment: recompute_community_totals(g, &top),
        trace,
        workers: workers.len(),
        aux_memory_bytes,
    })
}
