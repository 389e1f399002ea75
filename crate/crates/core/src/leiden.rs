//! Leiden: local-moving, a single refinement sweep inside the local-moving
//! communities, then aggregation of the refined sub-communities.

use std::sync::atomic::{AtomicU32, AtomicU8, Ordering};
use std::time::Instant;

use crate::accumulator::AccumulatorStrategy;
use crate::error::Result;
use crate::graph::{build_aggregate_graph, Graph, VertexId};
use crate::louvain::{
    aggregate_edges, aggregate_mode, elapsed_ms, local_moving, Detection, LeidenConfig, PassRecord,
    PassTrace,
};
use crate::parallel::{atomic_f64_vec, for_each_chunk, load_f64_vec, AtomicF64};
use crate::quality::{recompute_community_totals, renumber, split_disconnected};
use crate::scan::{
    atomic_ids, best_move, collect_candidates, load_ids, make_workers, Weighing, Worker,
};

// Sub-community states, indexed by the seed vertex id.
const UNTOUCHED: u8 = 0;
const SEED_LEFT: u8 = 1;
const JOINED: u8 = 2;

#[derive(Debug, Clone)]
pub struct RefinementState {
    pub community_bound: Vec<VertexId>,
    /// Sub-community of each vertex, named by its seed vertex.
    pub sub_membership: Vec<VertexId>,
    pub sub_totals: Vec<f64>,
    /// Whether the sub-community seeded at each vertex absorbed another vertex.
    pub touched: Vec<bool>,
    pub vertices_processed: usize,
    pub vertices_moved: usize,
}

/// Tries to move `i` out of its singleton into `target`. Fails when another
/// vertex has already joined `i`, or `target`'s seed has left it.
fn claim_move(state: &[AtomicU8], i: VertexId, target: VertexId) -> bool {
    if state[i as usize]
        .compare_exchange(UNTOUCHED, SEED_LEFT, Ordering::AcqRel, Ordering::Acquire)
        .is_err()
    {
        return false;
    }
    let slot = &state[target as usize];
    loop {
        match slot.load(Ordering::Acquire) {
            JOINED => return true,
            SEED_LEFT => break,
            _ => {
                if slot
                    .compare_exchange(UNTOUCHED, JOINED, Ordering::AcqRel, Ordering::Acquire)
                    .is_ok()
                {
                    return true;
                }
            }
        }
    }
    state[i as usize].store(UNTOUCHED, Ordering::Release);
    false
}

pub(crate) struct Refined {
    pub sub: Vec<AtomicU32>,
    pub totals: Vec<AtomicF64>,
    pub state: Vec<AtomicU8>,
    pub processed: usize,
    pub moved: usize,
}

pub(crate) fn refine(g: &Graph, bounds: &[VertexId], workers: &mut [Worker]) -> Refined {
    let n = g.num_vertices();
    let two_m = g.total_weight_2m();
    let sub = atomic_ids(&(0..n as VertexId).collect::<Vec<_>>());
    let totals = atomic_f64_vec(g.weighted_degrees());
    let state: Vec<AtomicU8> = (0..n).map(|_| AtomicU8::new(UNTOUCHED)).collect();
    workers.iter_mut().for_each(Worker::reset_counters);
    for_each_chunk(workers, n, |w, range| {
        for i in range {
            w.visited += 1;
            let i = i as VertexId;
            if state[i as usize].load(Ordering::Acquire) != UNTOUCHED {
                continue;
            }
            let d = sub[i as usize].load(Ordering::Relaxed);
            let k_d = collect_candidates(g, i, &sub, Some(bounds), d, Weighing::Exact, w);
            let k_i = g.weighted_degree(i);
            let Some((c, _)) = best_move(&w.candidates, d, k_d, k_i, &totals, two_m) else {
                continue;
            };
            if claim_move(&state, i, c) {
                sub[i as usize].store(c, Ordering::Relaxed);
                totals[d as usize].fetch_add(-k_i);
                totals[c as usize].fetch_add(k_i);
                w.moved += 1;
            }
        }
    });
    Refined {
        sub,
        totals,
        state,
        processed: workers.iter().map(|w| w.visited).sum(),
        moved: workers.iter().map(|w| w.moved).sum(),
    }
}

/// Single refinement sweep: every vertex starts as its own sub-community and
/// may join a sub-community of a neighbor inside the same bound, provided no
/// other vertex has joined its own.
pub fn refinement_pass(
    g: &Graph,
    bounds: &[VertexId],
    strategy: &AccumulatorStrategy,
    config: &LeidenConfig,
) -> Result<RefinementState> {
    strategy.validate()?;
    let mut workers = make_workers(strategy, g.num_vertices(), config.worker_count());
    let r = refine(g, bounds, &mut workers);
    Ok(RefinementState {
        community_bound: bounds.to_vec(),
        sub_membership: load_ids(&r.sub),
        sub_totals: load_f64_vec(&r.totals),
        touched: r
            .state
            .iter()
            .map(|s| s.load(Ordering::Relaxed) == JOINED)
            .collect(),
        vertices_processed: r.processed,
        vertices_moved: r.moved,
    })
}

/// Runs Leiden from singleton communities.
pub fn detect_leiden(g: &Graph, config: &LeidenConfig) -> Result<Detection> {
    config.validate()?;
    let n = g.num_vertices();
    let mut workers = make_workers(&config.strategy, n, config.worker_count());
    let aux_memory_bytes = workers.iter().map(Worker::aux_memory_bytes).sum();
    let mode = aggregate_mode(&config.strategy);

    // Original vertex -> vertex of the current (super-vertex) graph.
    let mut top: Vec<VertexId> = (0..n as VertexId).collect();
    let mut initial: Vec<VertexId> = top.clone();
    let mut owned: Option<Graph> = None;
    let mut tolerance = config.iteration_tolerance;
    let mut trace = PassTrace::default();
    let mut final_membership: Option<Vec<VertexId>> = None;

    for pass in 0..config.max_passes {
        let graph = owned.as_ref().unwrap_or(g);
        let start = Instant::now();
        let init = recompute_community_totals(graph, &initial);
        let membership = atomic_ids(init.membership());
        let mut totals = init.community_totals().to_vec();
        totals.resize(graph.num_vertices(), 0.0);
        let totals = atomic_f64_vec(&totals);
        let stats = local_moving(
            graph,
            &membership,
            &totals,
            tolerance,
            config.max_iterations,
            &mut workers,
        );
        let (bounds, bound_count) = renumber(&load_ids(&membership));
        let mut record = PassRecord {
            vertices: graph.num_vertices(),
            total_weight_2m: graph.total_weight_2m(),
            iterations: stats.iterations,
            vertices_moved: stats.moved,
            total_gain: stats.gain,
            local_moving_ms: elapsed_ms(start),
            ..Default::default()
        };
        if stats.moved == 0 {
            record.communities = bound_count;
            trace.passes.push(record);
            final_membership = Some(top.iter().map(|&t| bounds[t as usize]).collect());
            break;
        }

        let start = Instant::now();
        let refined = refine(graph, &bounds, &mut workers);
        debug_assert_eq!(refined.processed, graph.num_vertices());
        let subs = recompute_community_totals(graph, &load_ids(&refined.sub));
        record.refinement_ms = elapsed_ms(start);
        record.communities = subs.community_count();

        let mut sub_bound = vec![0 as VertexId; subs.community_count()];
        for (v, &s) in subs.membership().iter().enumerate() {
            sub_bound[s as usize] = bounds[v];
        }
        for t in top.iter_mut() {
            *t = subs.community_of(*t);
        }

        let shrink = subs.community_count() as f64 / graph.num_vertices().max(1) as f64;
        if shrink > config.aggregation_stop_ratio || pass + 1 == config.max_passes {
            trace.passes.push(record);
            final_membership = Some(top.iter().map(|&t| sub_bound[t as usize]).collect());
            break;
        }
        let start = Instant::now();
        let edges = aggregate_edges(graph, &subs, &mut workers);
        let next = build_aggregate_graph(graph, &subs, &edges, mode)?;
        record.aggregation_ms = elapsed_ms(start);
        trace.passes.push(record);
        owned = Some(next);
        initial = sub_bound;
        tolerance /= config.tolerance_decline_factor;
    }

    let membership = split_disconnected(g, &final_membership.unwrap_or(top));
    Ok(Detection {
        assignment: recompute_community_totals(g, &membership),
        trace,
        workers: workers.len(),
        aux_memory_bytes,
    })
}
