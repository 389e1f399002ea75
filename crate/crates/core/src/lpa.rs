//! Label propagation: every vertex repeatedly adopts the label with the
//! largest linking weight among its neighbors.

use std::sync::atomic::Ordering;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::accumulator::AccumulatorStrategy;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::louvain::{elapsed_ms, PassRecord, PassTrace};
use crate::parallel::{default_threads, for_each_chunk};
use crate::quality::{recompute_community_totals, CommunityAssignment};
use crate::scan::{atomic_ids, collect_candidates, load_ids, make_workers, Weighing, Worker};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpaConfig {
    pub strategy: AccumulatorStrategy,
    /// 2: re-weigh sketch candidates exactly; 1: trust sketch values.
    pub scans: u8,
    /// Stop once fewer than this fraction of vertices change label.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub threads: usize,
    pub deterministic: bool,
    pub seed: u64,
}

impl Default for LpaConfig {
    fn default() -> Self {
        Self {
            strategy: AccumulatorStrategy::misra_gries(8),
            scans: 2,
            tolerance: 0.05,
            max_iterations: 20,
            threads: 0,
            deterministic: false,
            seed: 0,
        }
    }
}

impl LpaConfig {
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
        if self.scans != 1 && self.scans != 2 {
            return Err(Error::Config(format!(
                "scans must be 1 or 2, got {}",
                self.scans
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::Config("tolerance must lie in (0, 1)".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max iterations must be at least 1".into()));
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

#[derive(Debug, Clone)]
pub struct LpaDetection {
    pub assignment: CommunityAssignment,
    pub trace: PassTrace,
    /// Fraction of vertices that changed label, per iteration.
    pub changed_fractions: Vec<f64>,
    pub workers: usize,
    pub aux_memory_bytes: usize,
}

/// Heaviest label; ties prefer `current`, then the smallest label. An empty
/// candidate list keeps `current`.
pub fn label_argmax(candidates: &[(VertexId, f64)], current: VertexId) -> VertexId {
    let mut best: Option<(VertexId, f64)> = None;
    for &(c, w) in candidates {
        best = match best {
            None => Some((c, w)),
            Some((bc, bw)) => {
                let wins =
                    w > bw || (w == bw && c != bc && (c == current || (bc != current && c < bc)));
                if wins {
                    Some((c, w))
                } else {
                    Some((bc, bw))
                }
            }
        };
    }
    best.map_or(current, |(c, _)| c)
}

pub fn detect_lpa(g: &Graph, config: &LpaConfig) -> Result<LpaDetection> {
    config.validate()?;
    let n = g.num_vertices();
    let mut workers = make_workers(&config.strategy, n, config.worker_count());
    let aux_memory_bytes = workers.iter().map(Worker::aux_memory_bytes).sum();
    let weighing = if config.scans == 2 {
        Weighing::Exact
    } else {
        Weighing::SketchOnly
    };

    let labels = atomic_ids(&(0..n as VertexId).collect::<Vec<_>>());
    let start = Instant::now();
    let mut changed_fractions = Vec::new();
    let mut moved = 0;
    for _ in 0..config.max_iterations {
        workers.iter_mut().for_each(Worker::reset_counters);
        for_each_chunk(&mut workers, n, |w, range| {
            for i in range {
                let i = i as VertexId;
                let current = labels[i as usize].load(Ordering::Relaxed);
                collect_candidates(g, i, &labels, None, current, weighing, w);
                let next = label_argmax(&w.candidates, current);
                if next != current {
                    labels[i as usize].store(next, Ordering::Relaxed);
                    w.moved += 1;
                }
            }
        });
        let changed: usize = workers.iter().map(|w| w.moved).sum();
        moved += changed;
        let fraction = if n == 0 {
            0.0
        } else {
            changed as f64 / n as f64
        };
        changed_fractions.push(fraction);
        if fraction < config.tolerance {
            break;
        }
    }
    let assignment = recompute_community_totals(g, &load_ids(&labels));
    let trace = PassTrace {
        passes: vec![PassRecord {
            vertices: n,
            total_weight_2m: g.total_weight_2m(),
            iterations: changed_fractions.len(),
            vertices_moved: moved,
            total_gain: 0.0,
            communities: assignment.community_count(),
            local_moving_ms: elapsed_ms(start),
            ..Default::default()
        }],
    };
    Ok(LpaDetection {
        assignment,
        trace,
        changed_fractions,
        workers: workers.len(),
        aux_memory_bytes,
    })
}
