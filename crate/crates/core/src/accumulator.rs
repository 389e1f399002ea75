//! Per-worker neighbor-community accumulators.
//!
//! Each algorithm scans a vertex's (or a community's) edges and accumulates
//! the edge weight per neighboring community. The baseline uses a dense,
//! collision-free table sized to the vertex count; the alternatives keep
//! only a bounded summary: a mod-indexed table of reduced size, a single
//! weighted Boyer-Moore candidate, or a weighted Misra-Gries sketch with `k`
//! slots.

use serde::{Deserialize, Serialize};
use std::mem::size_of;

use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Largest supported Misra-Gries slot count.
pub const MAX_SLOTS: usize = 256;

/// Default small-hashtable size relative to the vertex count.
pub const DEFAULT_SLOTS_FRACTION: f64 = 3e-4;

/// Slot count of the sketch used to aggregate when local-moving uses BM.
pub const BM_AGGREGATION_SLOTS: usize = 4;

const EMPTY_KEY: VertexId = VertexId::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubtractionPolicy {
    /// Subtract from every slot only when a new key finds no free slot; the
    /// new key is then dropped.
    #[default]
    Conditional,
    /// Subtract from every slot before inserting any new key, then insert it
    /// if a slot is (or became) free.
    Unconditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AccumulatorStrategy {
    FarKv,
    SmallHash {
        slots_fraction: f64,
    },
    BoyerMoore,
    MisraGries {
        slots: usize,
        subtraction: SubtractionPolicy,
    },
}

impl AccumulatorStrategy {
    pub fn misra_gries(slots: usize) -> Self {
        Self::MisraGries {
            slots,
            subtraction: SubtractionPolicy::Conditional,
        }
    }

    pub fn small_hash() -> Self {
        Self::SmallHash {
            slots_fraction: DEFAULT_SLOTS_FRACTION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::MisraGries { slots, .. } if !(1..=MAX_SLOTS).contains(&slots) => Err(
                Error::Config(format!("slot count {slots} outside 1..={MAX_SLOTS}")),
            ),
            Self::SmallHash { slots_fraction }
                if !(slots_fraction > 0.0 && slots_fraction <= 1.0) =>
            {
                Err(Error::Config(format!(
                    "slots fraction {slots_fraction} outside (0, 1]"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Short name used in reports, e.g. `mg8`, `far_kv`.
    pub fn label(&self) -> String {
        match *self {
            Self::FarKv => "far_kv".into(),
            Self::SmallHash { .. } => "small_hash".into(),
            Self::BoyerMoore => "bm".into(),
            Self::MisraGries {
                slots,
                subtraction: SubtractionPolicy::Conditional,
            } => {
                format!("mg{slots}")
            }
            Self::MisraGries {
                slots,
                subtraction: SubtractionPolicy::Unconditional,
            } => {
                format!("mg{slots}u")
            }
        }
    }

    /// Candidate weights are exact per-community sums (or, for the small
    /// table, collision-merged sums) and need no second scan.
    pub fn stores_all_keys(&self) -> bool {
        matches!(self, Self::FarKv | Self::SmallHash { .. })
    }

    /// Strategy used for the aggregation phase. BM would only keep one
    /// neighbor per community, so a 4-slot sketch is used instead.
    pub fn aggregation_strategy(&self) -> Self {
        match *self {
            Self::BoyerMoore => Self::misra_gries(BM_AGGREGATION_SLOTS),
            other => other,
        }
    }

    /// Whether aggregated cross-community weights are exact, so that the two
    /// directions of every super-edge must agree.
    pub fn aggregates_exactly(&self) -> bool {
        matches!(self.aggregation_strategy(), Self::FarKv)
    }

    pub fn build(&self, num_vertices: usize) -> Accumulator {
        match *self {
            Self::FarKv => Accumulator::FarKv(FarKvTable::new(num_vertices)),
            Self::SmallHash { slots_fraction } => Accumulator::SmallHash(SmallHashTable::new(
                small_hash_slots(slots_fraction, num_vertices),
            )),
            Self::BoyerMoore => Accumulator::BoyerMoore(BmCandidate::new()),
            Self::MisraGries { slots, subtraction } => {
                Accumulator::MisraGries(MgSketch::new(slots, subtraction))
            }
        }
    }
}

impl Default for AccumulatorStrategy {
    fn default() -> Self {
        Self::misra_gries(8)
    }
}

/// `max(1, round(fraction * n))`.
pub fn small_hash_slots(slots_fraction: f64, num_vertices: usize) -> usize {
    ((slots_fraction * num_vertices as f64).round() as usize).max(1)
}

/// Common interface of the four accumulation strategies.
pub trait NeighborAccumulator {
    /// Adds `weight > 0` for `community`.
    fn accumulate(&mut self, community: VertexId, weight: f64);

    /// Appends the current `(community, weight)` candidates to `out`.
    fn candidates_into(&self, out: &mut Vec<(VertexId, f64)>);

    /// Resets to the empty state.
    fn clear(&mut self);

    /// Resident scratch size in bytes.
    fn aux_memory_bytes(&self) -> usize;

    fn candidates(&self) -> Vec<(VertexId, f64)> {
        let mut out = Vec::new();
        self.candidates_into(&mut out);
        out
    }
}

/// Collision-free table: dense value array indexed by community id plus the
/// list of touched keys, so clearing costs O(touched).
#[derive(Debug, Clone)]
pub struct FarKvTable {
    keys: Vec<VertexId>,
    values: Vec<f64>,
}

impl FarKvTable {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            keys: Vec::with_capacity(num_vertices),
            values: vec![0.0; num_vertices],
        }
    }

    pub fn key_count(&self) -> usize {
        self.keys.len()
    }

    pub fn get(&self, community: VertexId) -> f64 {
        self.values[community as usize]
    }

    /// Clears the touched entries and returns how many values were reset.
    pub fn clear_touched(&mut self) -> usize {
        let resets = self.keys.len();
        for &k in &self.keys {
            self.values[k as usize] = 0.0;
        }
        self.keys.clear();
        resets
    }
}

impl NeighborAccumulator for FarKvTable {
    #[inline]
    fn accumulate(&mut self, community: VertexId, weight: f64) {
        let slot = &mut self.values[community as usize];
        if *slot == 0.0 {
            self.keys.push(community);
        }
        *slot += weight;
    }

    fn candidates_into(&self, out: &mut Vec<(VertexId, f64)>) {
        out.extend(self.keys.iter().map(|&k| (k, self.values[k as usize])));
    }

    fn clear(&mut self) {
        self.clear_touched();
    }

    fn aux_memory_bytes(&self) -> usize {
        self.values.len() * size_of::<f64>()
            + self.keys.capacity() * size_of::<VertexId>()
            + size_of::<usize>()
    }
}

/// Reduced-size table: community `c` accumulates into slot `c mod s`; the
/// first community hashed to a slot owns it.
#[derive(Debug, Clone)]
pub struct SmallHashTable {
    keys: Vec<VertexId>,
    values: Vec<f64>,
}

impl SmallHashTable {
    pub fn new(slots: usize) -> Self {
        let slots = slots.max(1);
        Self {
            keys: Vec::with_capacity(slots),
            values: vec![0.0; slots],
        }
    }

    pub fn slots(&self) -> usize {
        self.values.len()
    }

    #[inline]
    fn slot_of(&self, community: VertexId) -> usize {
        community as usize % self.values.len()
    }

    /// Accumulated value of the slot `community` hashes to.
    pub fn get(&self, community: VertexId) -> f64 {
        self.values[self.slot_of(community)]
    }

    /// Slot value if `community` owns its slot, else zero.
    pub fn owned_value(&self, community: VertexId) -> f64 {
        let slot = self.slot_of(community);
        match self.keys.iter().find(|&&k| self.slot_of(k) == slot) {
            Some(&k) if k == community => self.values[slot],
            _ => 0.0,
        }
    }
}

impl NeighborAccumulator for SmallHashTable {
    #[inline]
    fn accumulate(&mut self, community: VertexId, weight: f64) {
        let slot = self.slot_of(community);
        if self.values[slot] == 0.0 {
            self.keys.push(community);
        }
        self.values[slot] += weight;
    }

    fn candidates_into(&self, out: &mut Vec<(VertexId, f64)>) {
        out.extend(self.keys.iter().map(|&k| (k, self.values[self.slot_of(k)])));
    }

    fn clear(&mut self) {
        for i in 0..self.keys.len() {
            let slot = self.slot_of(self.keys[i]);
            self.values[slot] = 0.0;
        }
        self.keys.clear();
    }

    fn aux_memory_bytes(&self) -> usize {
        self.values.len() * size_of::<f64>()
            + self.keys.capacity() * size_of::<VertexId>()
            + size_of::<usize>()
    }
}

/// Weighted Boyer-Moore majority candidate.
///
/// A mismatching add lowers the vote weight (clamped at zero). At zero the
/// candidate id is kept but may be replaced by the next add.
#[derive(Debug, Clone, Copy, Default)]
pub struct BmCandidate {
    candidate: Option<VertexId>,
    vote_weight: f64,
}

impl BmCandidate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn candidate(&self) -> Option<VertexId> {
        self.candidate
    }

    pub fn vote_weight(&self) -> f64 {
        self.vote_weight
    }
}

impl NeighborAccumulator for BmCandidate {
    #[inline]
    fn accumulate(&mut self, community: VertexId, weight: f64) {
        if self.candidate == Some(community) {
            self.vote_weight += weight;
        } else if self.vote_weight == 0.0 {
            self.candidate = Some(community);
            self.vote_weight = weight;
        } else {
            self.vote_weight = (self.vote_weight - weight).max(0.0);
        }
    }

    fn candidates_into(&self, out: &mut Vec<(VertexId, f64)>) {
        if let Some(c) = self.candidate {
            if self.vote_weight > 0.0 {
                out.push((c, self.vote_weight));
            }
        }
    }

    fn clear(&mut self) {
        *self = Self::default();
    }

    fn aux_memory_bytes(&self) -> usize {
        size_of::<Self>()
    }
}

/// Weighted Misra-Gries sketch with `k` key/value slots. A slot is empty iff
/// its value is exactly zero.
#[derive(Debug, Clone)]
pub struct MgSketch {
    keys: Vec<VertexId>,
    values: Vec<f64>,
    policy: SubtractionPolicy,
}

impl MgSketch {
    pub fn new(slots: usize, policy: SubtractionPolicy) -> Self {
        assert!(
            (1..=MAX_SLOTS).contains(&slots),
            "slot count {slots} out of range"
        );
        Self {
            keys: vec![EMPTY_KEY; slots],
            values: vec![0.0; slots],
            policy,
        }
    }

    pub fn slots(&self) -> usize {
        self.keys.len()
    }

    pub fn policy(&self) -> SubtractionPolicy {
        self.policy
    }

    /// Raw `(key, value)` slot contents, including empty slots.
    pub fn slot_contents(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.keys.iter().copied().zip(self.values.iter().copied())
    }

    /// No key other than the empty sentinel appears in more than one slot,
    /// and no value is negative.
    pub fn check_invariants(&self) -> bool {
        let k = self.keys.len();
        self.values.iter().all(|&v| v >= 0.0)
            && (0..k)
                .all(|p| self.keys[p] == EMPTY_KEY || !self.keys[p + 1..].contains(&self.keys[p]))
    }

    #[inline]
    fn subtract_all(&mut self, weight: f64) {
        for v in self.values.iter_mut() {
            *v = (*v - weight).max(0.0);
        }
    }

    /// Index of the last empty slot.
    #[inline]
    fn find_empty(&self) -> Option<usize> {
        let mut e = None;
        for (p, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                e = Some(p);
            }
        }
        e
    }
}

impl NeighborAccumulator for MgSketch {
    #[inline]
    fn accumulate(&mut self, community: VertexId, weight: f64) {
        // Fixed-width scans over all k slots, no early exit.
        let mut has = false;
        for (k, v) in self.keys.iter().zip(self.values.iter_mut()) {
            if *k == community {
                *v += weight;
                has = true;
            }
        }
        if has {
            return;
        }
        if self.policy == SubtractionPolicy::Unconditional {
            self.subtract_all(weight);
        }
        match self.find_empty() {
            Some(p) => {
                self.keys[p] = community;
                self.values[p] = weight;
            }
            None if self.policy == SubtractionPolicy::Conditional => self.subtract_all(weight),
            None => {}
        }
    }

    fn candidates_into(&self, out: &mut Vec<(VertexId, f64)>) {
        out.extend(self.slot_contents().filter(|&(_, v)| v > 0.0));
    }

    fn clear(&mut self) {
        self.keys.fill(EMPTY_KEY);
        self.values.fill(0.0);
    }

    fn aux_memory_bytes(&self) -> usize {
        self.keys.len() * size_of::<VertexId>() + self.values.len() * size_of::<f64>()
    }
}

/// Any one of the four strategies, dispatched statically per call.
#[derive(Debug, Clone)]
pub enum Accumulator {
    FarKv(FarKvTable),
    SmallHash(SmallHashTable),
    BoyerMoore(BmCandidate),
    MisraGries(MgSketch),
}

impl Accumulator {
    /// Accumulated weight recorded for `community`, for strategies that keep
    /// every key (a small table reports zero unless the key owns its slot).
    /// Sketches return `None`.
    #[inline]
    pub fn stored_value(&self, community: VertexId) -> Option<f64> {
        match self {
            Self::FarKv(t) => Some(t.get(community)),
            Self::SmallHash(t) => Some(t.owned_value(community)),
            Self::BoyerMoore(_) | Self::MisraGries(_) => None,
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $acc:ident => $body:expr) => {
        match $self {
            Accumulator::FarKv($acc) => $body,
            Accumulator::SmallHash($acc) => $body,
            Accumulator::BoyerMoore($acc) => $body,
            Accumulator::MisraGries($acc) => $body,
        }
    };
}

impl NeighborAccumulator for Accumulator {
    #[inline]
    fn accumulate(&mut self, community: VertexId, weight: f64) {
        dispatch!(self, a => a.accumulate(community, weight))
    }

    fn candidates_into(&self, out: &mut Vec<(VertexId, f64)>) {
        dispatch!(self, a => a.candidates_into(out))
    }

    fn clear(&mut self) {
        dispatch!(self, a => a.clear())
    }

    fn aux_memory_bytes(&self) -> usize {
        dispatch!(self, a => a.aux_memory_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: VertexId = 0;
    const B: VertexId = 1;
    const C: VertexId = 2;

    fn sorted(mut v: Vec<(VertexId, f64)>) -> Vec<(VertexId, f64)> {
        v.sort_by_key(|e| e.0);
        v
    }

    fn feed(acc: &mut impl NeighborAccumulator, stream: &[(VertexId, f64)]) {
        for &(c, w) in stream {
            acc.accumulate(c, w);
        }
    }

    // Clamped subtraction of the incoming weight bounds neither the miss nor
    // the deficit by W/(k+1) once weights vary.
    #[test]
    fn weighted_sketch_bounds_do_not_hold() {
        let mut mg = MgSketch::new(1, SubtractionPolicy::Conditional);
        mg.accumulate(0, 1.0);
        mg.accumulate(1, 5.0);
        assert!(mg.candidates().is_empty());

        let mut mg = MgSketch::new(1, SubtractionPolicy::Conditional);
        for (c, w) in [(1, 1.0), (0, 10.0), (0, 1.0)] {
            mg.accumulate(c, w);
        }
        assert_eq!(mg.candidates(), vec![(0, 1.0)]);

        let mut bm = BmCandidate::new();
        for (c, w) in [(1, 1.0), (0, 2.0), (1, 1.0), (0, 2.0)] {
            bm.accumulate(c, w);
        }
        assert!(bm.candidates().is_empty());
    }

    #[test]
    fn mg_conditional_drops_key_when_full() {
        let mut mg = MgSketch::new(2, SubtractionPolicy::Conditional);
        feed(&mut mg, &[(A, 5.0), (B, 3.0), (C, 1.0)]);
        assert_eq!(sorted(mg.candidates()), vec![(A, 4.0), (B, 2.0)]);
    }

    #[test]
    fn mg_accumulates_without_eviction() {
        let mut mg = MgSketch::new(4, SubtractionPolicy::Conditional);
        feed(&mut mg, &[(A, 2.0), (A, 3.0)]);
        assert_eq!(mg.candidates(), vec![(A, 5.0)]);
    }

    #[test]
    fn mg_unconditional_subtracts_before_every_insert() {
        let mut mg = MgSketch::new(2, SubtractionPolicy::Unconditional);
        feed(&mut mg, &[(A, 5.0), (B, 3.0)]);
        // b's insertion already charged a.
        assert_eq!(sorted(mg.candidates()), vec![(A, 2.0), (B, 3.0)]);
        mg.accumulate(C, 4.0);
        assert_eq!(mg.candidates(), vec![(C, 4.0)]);
        assert!(mg.check_invariants());
    }

    #[test]
    fn mg_unconditional_inserts_into_opened_slot() {
        let mut mg = MgSketch::new(2, SubtractionPolicy::Unconditional);
        feed(&mut mg, &[(A, 5.0), (A, 4.0), (B, 3.0), (B, 3.0), (C, 4.0)]);
        // a: 5+4-3 = 6, b: 3+3 = 6; c subtracts 4 from both, no slot opens.
        assert_eq!(sorted(mg.candidates()), vec![(A, 2.0), (B, 2.0)]);
        mg.accumulate(C, 2.0);
        // Both slots drained to zero, c takes the last empty one.
        assert_eq!(mg.candidates(), vec![(C, 2.0)]);
    }

    #[test]
    fn mg_revives_stale_key_in_empty_slot() {
        let mut mg = MgSketch::new(1, SubtractionPolicy::Conditional);
        feed(&mut mg, &[(A, 1.0), (B, 1.0)]);
        assert!(mg.candidates().is_empty());
        mg.accumulate(A, 2.0);
        assert_eq!(mg.candidates(), vec![(A, 2.0)]);
        assert!(mg.check_invariants());
    }

    #[test]
    fn bm_weighted_vote() {
        let mut bm = BmCandidate::new();
        feed(&mut bm, &[(A, 3.0), (B, 1.0), (A, 2.0)]);
        assert_eq!(bm.candidate(), Some(A));
        assert_eq!(bm.vote_weight(), 4.0);
        assert_eq!(bm.candidates(), vec![(A, 4.0)]);
    }

    #[test]
    fn bm_keeps_id_at_zero_until_next_add() {
        let mut bm = BmCandidate::new();
        feed(&mut bm, &[(A, 1.0), (B, 2.0)]);
        assert_eq!(bm.candidate(), Some(A));
        assert_eq!(bm.vote_weight(), 0.0);
        assert!(bm.candidates().is_empty());
        bm.accumulate(C, 1.0);
        assert_eq!(bm.candidates(), vec![(C, 1.0)]);
    }

    #[test]
    fn far_kv_is_exact_and_clears_sparsely() {
        let mut t = FarKvTable::new(10);
        feed(&mut t, &[(A, 1.0), (B, 2.0), (A, 0.5), (9, 1.0)]);
        assert_eq!(t.candidates(), vec![(A, 1.5), (B, 2.0), (9, 1.0)]);
        assert_eq!(t.key_count(), 3);
        assert_eq!(t.clear_touched(), 3);
        assert!(t.candidates().is_empty());
        assert!((0..10).all(|c| t.get(c) == 0.0));
    }

    #[test]
    fn small_hash_merges_collisions_into_first_key() {
        let mut t = SmallHashTable::new(1);
        feed(&mut t, &[(A, 1.0), (B, 2.0)]);
        assert_eq!(t.candidates(), vec![(A, 3.0)]);
        let mut t = SmallHashTable::new(2);
        feed(&mut t, &[(3, 1.0), (1, 2.0), (2, 4.0)]);
        assert_eq!(t.candidates(), vec![(3, 3.0), (2, 4.0)]);
        t.clear();
        assert!(t.candidates().is_empty());
    }

    #[test]
    fn clear_empties_every_strategy() {
        for s in [
            AccumulatorStrategy::FarKv,
            AccumulatorStrategy::small_hash(),
            AccumulatorStrategy::BoyerMoore,
            AccumulatorStrategy::misra_gries(8),
        ] {
            let mut acc = s.build(100);
            feed(&mut acc, &[(A, 1.0), (B, 2.0), (C, 3.0)]);
            assert!(!acc.candidates().is_empty());
            acc.clear();
            assert!(acc.candidates().is_empty(), "{s:?}");
        }
        let mut mg = MgSketch::new(8, SubtractionPolicy::Conditional);
        feed(&mut mg, &[(A, 1.0), (B, 2.0)]);
        mg.clear();
        assert!(mg.slot_contents().all(|(k, v)| k == EMPTY_KEY && v == 0.0));
    }

    #[test]
    fn memory_footprints() {
        let mg8 = AccumulatorStrategy::misra_gries(8);
        assert!(mg8.build(1000).aux_memory_bytes() <= 512);
        assert_eq!(
            mg8.build(1000).aux_memory_bytes(),
            mg8.build(1_000_000).aux_memory_bytes()
        );
        assert!(
            AccumulatorStrategy::FarKv
                .build(1_000_000)
                .aux_memory_bytes()
                >= 8_000_000
        );
        assert!(
            AccumulatorStrategy::BoyerMoore
                .build(1_000_000)
                .aux_memory_bytes()
                <= 16
        );
        let small = AccumulatorStrategy::small_hash().build(1_000_000);
        assert_eq!(small_hash_slots(DEFAULT_SLOTS_FRACTION, 1_000_000), 300);
        assert!(small.aux_memory_bytes() < 300 * 24);
    }

    #[test]
    fn strategy_validation() {
        assert!(AccumulatorStrategy::misra_gries(0).validate().is_err());
        assert!(AccumulatorStrategy::misra_gries(257).validate().is_err());
        assert!(AccumulatorStrategy::misra_gries(256).validate().is_ok());
        assert!(AccumulatorStrategy::SmallHash {
            slots_fraction: 0.0
        }
        .validate()
        .is_err());
        assert!(AccumulatorStrategy::SmallHash {
            slots_fraction: 1.5
        }
        .validate()
        .is_err());
        assert_eq!(small_hash_slots(1e-9, 10), 1);
        assert_eq!(
            AccumulatorStrategy::BoyerMoore.aggregation_strategy(),
            AccumulatorStrategy::misra_gries(4)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::collections::BTreeMap;

        fn exact(stream: &[(VertexId, f64)]) -> BTreeMap<VertexId, f64> {
            let mut m = BTreeMap::new();
            for &(c, w) in stream {
                *m.entry(c).or_insert(0.0) += w;
            }
            m
        }

        fn stream() -> impl Strategy<Value = Vec<(VertexId, f64)>> {
            prop::collection::vec((0u32..40, 1u32..100), 0..300)
                .prop_map(|v| v.into_iter().map(|(c, w)| (c, w as f64 * 0.25)).collect())
        }

        proptest! {
            #[test]
            fn far_kv_matches_map(s in stream()) {
                let mut t = FarKvTable::new(40);
                feed(&mut t, &s);
                let got: BTreeMap<_, _> = t.candidates().into_iter().collect();
                prop_assert_eq!(got, exact(&s));
            }

            #[test]
            fn small_hash_matches_mod_groups(s in stream(), slots in 1usize..16) {
                let mut t = SmallHashTable::new(slots);
                feed(&mut t, &s);
                let mut groups = BTreeMap::new();
                for &(c, w) in &s {
                    *groups.entry(c as usize % slots).or_insert(0.0) += w;
                }
                let got: BTreeMap<_, _> = t
                    .candidates()
                    .into_iter()
                    .map(|(c, w)| (c as usize % slots, w))
                    .collect();
                prop_assert_eq!(got, groups);
            }

            #[test]
            fn mg_never_overcounts_and_keeps_unique_keys(
                s in stream(),
                slots in 1usize..12,
                unconditional in any::<bool>(),
            ) {
                let policy = if unconditional {
                    SubtractionPolicy::Unconditional
                } else {
                    SubtractionPolicy::Conditional
                };
                let mut mg = MgSketch::new(slots, policy);
                for &(c, w) in &s {
                    mg.accumulate(c, w);
                    prop_assert!(mg.check_invariants());
                }
                let truth = exact(&s);
                for (c, v) in mg.candidates() {
                    prop_assert!(v <= truth[&c]);
                }
            }

            #[test]
            fn mg_unit_weights_find_heavy_hitters(
                keys in prop::collection::vec(0u32..10, 1..400),
                slots in 1usize..8,
            ) {
                let s: Vec<_> = keys.iter().map(|&c| (c, 1.0)).collect();
                let mut mg = MgSketch::new(slots, SubtractionPolicy::Conditional);
                feed(&mut mg, &s);
                let total = s.len() as f64;
                let got: BTreeMap<_, _> = mg.candidates().into_iter().collect();
                for (c, w) in exact(&s) {
                    let approx = got.get(&c).copied().unwrap_or(0.0);
                    prop_assert!(w - approx <= total / (slots as f64 + 1.0));
                    if w > total / (slots as f64 + 1.0) {
                        prop_assert!(got.contains_key(&c));
                    }
                }
            }
        }
    }
}
