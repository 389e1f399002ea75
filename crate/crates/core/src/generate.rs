//! Synthetic graphs with planted community structure, in the spirit of the
//! LFR benchmark: power-law community sizes and degrees, and a mixing
//! parameter giving the fraction of each vertex's edges that leave its
//! community.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedPartitionConfig {
    pub vertices: usize,
    pub min_community: usize,
    pub max_community: usize,
    pub community_exponent: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    pub degree_exponent: f64,
    /// Fraction of a vertex's generated edges that go to other communities.
    pub mixing: f64,
    pub seed: u64,
}

impl Default for PlantedPartitionConfig {
    fn default() -> Self {
        Self {
            vertices: 10_000,
            min_community: 20,
            max_community: 200,
            community_exponent: 1.5,
            min_degree: 5,
            max_degree: 50,
            degree_exponent: 2.5,
            mixing: 0.3,
            seed: 42,
        }
    }
}

fn power_law(rng: &mut impl Rng, min: f64, max: f64, exponent: f64) -> f64 {
    let a = 1.0 - exponent;
    let u: f64 = rng.gen();
    ((max.powf(a) - min.powf(a)) * u + min.powf(a)).powf(1.0 / a)
}

/// Returns the graph and its planted membership.
pub fn planted_partition(cfg: &PlantedPartitionConfig) -> Result<(Graph, Vec<VertexId>)> {
    if cfg.min_community < 2 || cfg.min_community > cfg.max_community {
        return Err(Error::Config(
            "community sizes must satisfy 2 <= min <= max".into(),
        ));
    }
    if cfg.min_degree == 0 || cfg.min_degree > cfg.max_degree {
        return Err(Error::Config("degrees must satisfy 1 <= min <= max".into()));
    }
    if !(0.0..=1.0).contains(&cfg.mixing) {
        return Err(Error::Config("mixing must lie in [0, 1]".into()));
    }
    if cfg.vertices < cfg.min_community {
        return Err(Error::Config("too few vertices for one community".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.vertices;

    let mut sizes = Vec::new();
    let mut placed = 0;
    while placed < n {
        let s = power_law(
            &mut rng,
            cfg.min_community as f64,
            cfg.max_community as f64 + 1.0,
            cfg.community_exponent,
        ) as usize;
        let s = s
            .clamp(cfg.min_community, cfg.max_community)
            .min(n - placed);
        sizes.push(s);
        placed += s;
    }
    // Fold an undersized tail into the previous community.
    if sizes.len() > 1 && *sizes.last().unwrap() < cfg.min_community {
        let tail = sizes.pop().unwrap();
        *sizes.last_mut().unwrap() += tail;
    }

    let mut membership = Vec::with_capacity(n);
    let mut starts = Vec::with_capacity(sizes.len());
    for (c, &s) in sizes.iter().enumerate() {
        starts.push(membership.len());
        membership.extend(std::iter::repeat(c as VertexId).take(s));
    }

    let mut edges = Vec::new();
    for v in 0..n {
        let c = membership[v] as usize;
        let (lo, size) = (starts[c], sizes[c]);
        let degree = power_law(
            &mut rng,
            cfg.min_degree as f64,
            cfg.max_degree as f64 + 1.0,
            cfg.degree_exponent,
        ) as usize;
        let degree = degree.clamp(cfg.min_degree, cfg.max_degree);
        let external = (cfg.mixing * degree as f64).round() as usize;
        for _ in 0..degree - external {
            let mut u = lo + rng.gen_range(0..size - 1);
            if u >= v {
                u += 1;
            }
            edges.push((v as VertexId, u as VertexId, 1.0));
        }
        if size < n {
            for _ in 0..external {
                let mut u = rng.gen_range(0..n - size);
                if u >= lo {
                    u += size;
                }
                edges.push((v as VertexId, u as VertexId, 1.0));
            }
        }
    }
    let graph = Graph::from_undirected_edges(n, edges)?;
    Ok((graph, membership))
}
