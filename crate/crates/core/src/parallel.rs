//! Minimal shared-memory scheduling: a fixed set of workers, each owning its
//! scratch state, pulls index chunks from a shared cursor.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

/// `f64` stored as bits in an `AtomicU64`.
#[derive(Debug, Default)]
pub struct AtomicF64(AtomicU64);

impl AtomicF64 {
    pub fn new(v: f64) -> Self {
        Self(AtomicU64::new(v.to_bits()))
    }

    #[inline]
    pub fn load(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    pub fn store(&self, v: f64) {
        self.0.store(v.to_bits(), Ordering::Relaxed)
    }

    #[inline]
    pub fn fetch_add(&self, delta: f64) -> f64 {
        let mut cur = self.0.load(Ordering::Relaxed);
        loop {
            let next = (f64::from_bits(cur) + delta).to_bits();
            match self
                .0
                .compare_exchange_weak(cur, next, Ordering::AcqRel, Ordering::Relaxed)
            {
                Ok(prev) => return f64::from_bits(prev),
                Err(actual) => cur = actual,
            }
        }
    }
}

pub fn atomic_f64_vec(values: &[f64]) -> Vec<AtomicF64> {
    values.iter().map(|&v| AtomicF64::new(v)).collect()
}

pub fn load_f64_vec(values: &[AtomicF64]) -> Vec<f64> {
    values.iter().map(AtomicF64::load).collect()
}

/// Worker count to use when none is configured.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

const CHUNK: usize = 2048;

/// Runs `f(state, range)` over `0..n` in chunks. With a single state the
/// chunks run in ascending order on the calling thread; otherwise each state
/// is moved to its own scoped thread and chunks are handed out dynamically.
pub fn for_each_chunk<S, F>(states: &mut [S], n: usize, f: F)
where
    S: Send,
    F: Fn(&mut S, Range<usize>) + Sync,
{
    assert!(!states.is_empty(), "at least one worker state is required");
    if states.len() == 1 || n <= CHUNK {
        let state = &mut states[0];
        let mut start = 0;
        while start < n {
            let end = (start + CHUNK).min(n);
            f(state, start..end);
            start = end;
        }
        return;
    }
    let cursor = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for state in states.iter_mut() {
            let (cursor, f) = (&cursor, &f);
            scope.spawn(move || loop {
                let start = cursor.fetch_add(CHUNK, Ordering::Relaxed);
                if start >= n {
                    break;
                }
                f(state, start..(start + CHUNK).min(n));
            });
        }
    });
}
