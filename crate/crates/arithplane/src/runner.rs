//! Scoped-thread runner over `partition_ranges`.

use std::thread;

use arithplane_core::scan::{scan_range, PrimeScan, Runner};
use arithplane_core::sieve::partition_ranges;

/// Runs one range per worker thread and merges the results in range order,
/// so the output matches [`arithplane_core::scan::Chunked`] with the same
/// count and the serial run.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    pub workers: usize,
}

impl Threaded {
    pub fn new(workers: usize) -> Self {
        Self { workers: workers.max(1) }
    }
}

impl Runner for Threaded {
    fn run<S: PrimeScan>(&self, scan: &S, n: u64) -> S::Acc {
        let ranges = partition_ranges(n, self.workers);
        if ranges.len() <= 1 {
            return arithplane_core::Serial.run(scan, n);
        }
        let parts: Vec<S::Acc> = thread::scope(|s| {
            let handles: Vec<_> = ranges
                .iter()
                .map(|r| {
                    let (lo, hi) = (*r.start(), *r.end());
                    s.spawn(move || scan_range(scan, lo, hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e))).collect()
        });
        let mut acc = scan.init();
        for part in parts {
            if scan.done(&acc) {
                break;
            }
            scan.merge(&mut acc, part);
        }
        acc
    }
}
