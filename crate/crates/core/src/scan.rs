//! Map-reduce over the rational primes up to a bound.
//!
//! A scan visits the primes of one contiguous range into an accumulator;
//! accumulators of adjacent ranges are merged in ascending order. Output
//! therefore does not depend on how `[2, N]` was partitioned.

use crate::sieve::{PrimeStream, DEFAULT_SEGMENT};

pub trait PrimeScan: Sync {
    type Acc: Send;

    fn init(&self) -> Self::Acc;

    fn visit(&self, p: u64, acc: &mut Self::Acc);

    /// Appends `later`, which covers strictly larger primes, onto `acc`.
    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc);

    /// Stop visiting this range once the accumulator says so.
    fn done(&self, _acc: &Self::Acc) -> bool {
        false
    }
}

/// Visits the primes in `[lo, hi]` in ascending order.
pub fn scan_range<S: PrimeScan + ?Sized>(scan: &S, lo: u64, hi: u64) -> S::Acc {
    let mut acc = scan.init();
    for p in PrimeStream::new(lo, hi, DEFAULT_SEGMENT) {
        if scan.done(&acc) {
            break;
        }
        scan.visit(p, &mut acc);
    }
    acc
}

/// Strategy for running a scan over `[2, N]`.
pub trait Runner {
    fn run<S: PrimeScan>(&self, scan: &S, n: u64) -> S::Acc;
}

/// Single-threaded runner.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Runner for Serial {
    fn run<S: PrimeScan>(&self, scan: &S, n: u64) -> S::Acc {
        scan_range(scan, 2, n)
    }
}

/// Runs the ranges of `partition_ranges(n, parts)` one after another and
/// merges them; the serial reference for partitioned runners.
#[derive(Debug, Clone, Copy)]
pub struct Chunked(pub usize);

impl Runner for Chunked {
    fn run<S: PrimeScan>(&self, scan: &S, n: u64) -> S::Acc {
        let mut acc = scan.init();
        for r in crate::sieve::partition_ranges(n, self.0) {
            if scan.done(&acc) {
                break;
            }
            let part = scan_range(scan, *r.start(), *r.end());
            scan.merge(&mut acc, part);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    struct Collect;
    impl PrimeScan for Collect {
        type Acc = Vec<u64>;
        fn init(&self) -> Vec<u64> {
            Vec::new()
        }
        fn visit(&self, p: u64, acc: &mut Vec<u64>) {
            acc.push(p);
        }
        fn merge(&self, acc: &mut Vec<u64>, later: Vec<u64>) {
            acc.extend(later);
        }
    }

    struct FirstAbove(u64);
    impl PrimeScan for FirstAbove {
        type Acc = Option<u64>;
        fn init(&self) -> Option<u64> {
            None
        }
        fn visit(&self, p: u64, acc: &mut Option<u64>) {
            if p > self.0 && acc.is_none() {
                *acc = Some(p);
            }
        }
        fn merge(&self, acc: &mut Option<u64>, later: Option<u64>) {
            if acc.is_none() {
                *acc = later;
            }
        }
        fn done(&self, acc: &Option<u64>) -> bool {
            acc.is_some()
        }
    }

    #[test]
    fn chunking_does_not_change_results() {
        let whole = Serial.run(&Collect, 10_000);
        for parts in [1, 2, 5, 13] {
            assert_eq!(Chunked(parts).run(&Collect, 10_000), whole);
        }
        assert_eq!(Serial.run(&FirstAbove(100), 1000), Some(101));
        assert_eq!(Chunked(7).run(&FirstAbove(100), 1000), Some(101));
    }
}
