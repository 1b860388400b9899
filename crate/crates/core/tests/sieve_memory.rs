//! Peak heap usage of a prime stream is the segment plus `O(√N)`.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use arithplane_core::sieve::PrimeStream;

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let now = CURRENT.fetch_add(layout.size(), Ordering::SeqCst) + layout.size();
        PEAK.fetch_max(now, Ordering::SeqCst);
        unsafe { System.alloc(layout) }
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        CURRENT.fetch_sub(layout.size(), Ordering::SeqCst);
        unsafe { System.dealloc(ptr, layout) }
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

// Tests in this file share the counters.
static SERIAL: Mutex<()> = Mutex::new(());

/// Extra bytes allocated at peak while streaming `[2, n]`, and the count.
fn measure(n: u64, segment: usize) -> (usize, usize) {
    let before = CURRENT.load(Ordering::SeqCst);
    PEAK.store(before, Ordering::SeqCst);
    let count = PrimeStream::new(2, n, segment).count();
    (PEAK.load(Ordering::SeqCst) - before, count)
}

#[test]
fn peak_allocation_does_not_grow_with_n() {
    let _guard = SERIAL.lock().unwrap();
    let segment = 1 << 16;
    let mut peaks = Vec::new();
    for (n, primes) in [(1_000_000u64, 78_498usize), (10_000_000, 664_579), (100_000_000, 5_761_455)] {
        let (peak, count) = measure(n, segment);
        assert_eq!(count, primes);
        // bitset + base-prime sieve (one byte per integer up to √n) + base primes
        let root = n.isqrt() as usize;
        let bound = segment / 8 + root + 8 * root + 4096;
        assert!(peak <= bound, "n = {n}: peak {peak} > {bound}");
        peaks.push(peak);
    }
    // a hundredfold larger bound costs only the √N base data
    assert!(peaks[2] < peaks[0] + 9 * 10_000 + 4096, "{peaks:?}");
}

#[test]
fn segment_dominates_peak() {
    let _guard = SERIAL.lock().unwrap();
    let (small, _) = measure(1_000_000, 1 << 12);
    let (large, _) = measure(1_000_000, 1 << 20);
    assert!(large >= (1 << 20) / 8);
    assert!(small < (1 << 20) / 8);
}
