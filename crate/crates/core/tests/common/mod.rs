#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sketchcomm::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Loopless undirected edges with random positive weights, deduplicated.
pub fn random_edges(rng: &mut impl Rng, n: usize, p: f64, integer: bool) -> Vec<(u32, u32, f64)> {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.gen_bool(p) {
                let w = if integer {
                    rng.gen_range(1..=5) as f64
                } else {
                    rng.gen_range(0.1..4.0)
                };
                edges.push((u, v, w));
            }
        }
    }
    edges
}

pub fn graph(n: usize, edges: &[(u32, u32, f64)]) -> Graph {
    Graph::from_undirected_edges(n, edges.iter().copied()).unwrap()
}

pub fn two_triangles_edges() -> Vec<(u32, u32, f64)> {
    vec![
        (0, 1, 1.0),
        (1, 2, 1.0),
        (2, 0, 1.0),
        (3, 4, 1.0),
        (4, 5, 1.0),
        (5, 3, 1.0),
    ]
}

/// Modularity straight from an undirected loopless edge list.
pub fn oracle_modularity(n: usize, edges: &[(u32, u32, f64)], membership: &[u32]) -> f64 {
    let m: f64 = edges.iter().map(|e| e.2).sum();
    let mut inside: HashMap<u32, f64> = HashMap::new();
    let mut degree_sum: HashMap<u32, f64> = HashMap::new();
    let mut deg = vec![0.0; n];
    for &(u, v, w) in edges {
        deg[u as usize] += w;
        deg[v as usize] += w;
        if membership[u as usize] == membership[v as usize] {
            *inside.entry(membership[u as usize]).or_default() += w;
        }
    }
    for (v, &c) in membership.iter().enumerate() {
        *degree_sum.entry(c).or_default() += deg[v];
    }
    degree_sum
        .iter()
        .map(|(c, &d)| inside.get(c).copied().unwrap_or(0.0) / m - (d / (2.0 * m)).powi(2))
        .sum()
}

/// Every set partition of `0..n` as restricted-growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, n: usize, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..=next {
            prefix.push(c);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// Whether two memberships describe the same partition.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(&x, &y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

/// Communities whose induced subgraph is disconnected.
pub fn disconnected_communities(g: &Graph, membership: &[u32]) -> Vec<u32> {
    let n = g.num_vertices();
    let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
    for (v, &c) in membership.iter().enumerate() {
        groups.entry(c).or_default().push(v as u32);
    }
    let mut seen = vec![false; n];
    let mut bad = Vec::new();
    for (&c, members) in &groups {
        let start = members[0];
        seen[start as usize] = true;
        let mut queue = VecDeque::from([start]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for (v, _) in g.neighbors(u) {
                if membership[v as usize] == c && !seen[v as usize] {
                    seen[v as usize] = true;
                    reached += 1;
                    queue.push_back(v);
                }
            }
        }
        if reached != members.len() {
            bad.push(c);
        }
    }
    bad.sort_unstable();
    bad
}
