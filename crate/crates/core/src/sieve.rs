//! Segmented sieve of Eratosthenes over odd numbers.
//!
//! A [`PrimeStream`] walks `[lo, hi]` one segment at a time, so memory is
//! the segment bitset plus the base primes up to `√hi`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

/// Default segment length, in odd candidates.
pub const DEFAULT_SEGMENT: usize = 1 << 20;

/// Primes up to `n` by a plain sieve; used for base primes.
fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Ascending stream of the primes in `[lo, hi]`.
pub struct PrimeStream {
    hi: u64,
    segment: usize,
    base: Vec<u64>,
    /// Odd number represented by bit 0 of the current segment.
    seg_start: u64,
    bits: Vec<u64>,
    seg_len: usize,
    pos: usize,
    emit_two: bool,
    done: bool,
}

impl PrimeStream {
    pub fn new(lo: u64, hi: u64, segment: usize) -> Self {
        let segment = segment.max(64);
        let lo = lo.max(2);
        // odd primes only in the base list; 2 is handled separately
        let base = small_primes(hi.isqrt()).into_iter().skip(1).collect();
        let first_odd = if lo.is_multiple_of(2) { lo + 1 } else { lo }.max(3);
        let mut s = Self {
            hi,
            segment,
            base,
            seg_start: first_odd,
            bits: vec![0; segment.div_ceil(64)],
            seg_len: 0,
            pos: 0,
            emit_two: lo <= 2 && hi >= 2,
            done: lo > hi,
        };
        if !s.done {
            s.fill();
        }
        s
    }

    /// Stream of all primes `≤ n`.
    pub fn up_to(n: u64) -> Self {
        Self::new(2, n, DEFAULT_SEGMENT)
    }

    fn fill(&mut self) {
        if self.seg_start > self.hi {
            self.seg_len = 0;
            self.done = true;
            return;
        }
        let remaining = ((self.hi - self.seg_start) / 2 + 1) as usize;
        self.seg_len = remaining.min(self.segment);
        self.pos = 0;
        self.bits.iter_mut().for_each(|w| *w = !0);
        let seg_end = self.seg_start + 2 * (self.seg_len as u64 - 1);
        for &q in &self.base {
            if q * q > seg_end {
                break;
            }
            // first odd multiple of q in the segment, at least q²
            let mut m = q * q;
            if m < self.seg_start {
                let k = (self.seg_start - m).div_ceil(2 * q);
                m += k * 2 * q;
            }
            let mut i = ((m - self.seg_start) / 2) as usize;
            while i < self.seg_len {
                self.bits[i / 64] &= !(1u64 << (i % 64));
                i += q as usize;
            }
        }
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.emit_two {
            self.emit_two = false;
            return Some(2);
        }
        loop {
            if self.done {
                return None;
            }
            while self.pos < self.seg_len {
                let word = self.bits[self.pos / 64] >> (self.pos % 64);
                if word == 0 {
                    self.pos = (self.pos / 64 + 1) * 64;
                    continue;
                }
                self.pos += word.trailing_zeros() as usize;
                if self.pos >= self.seg_len {
                    break;
                }
                let n = self.seg_start + 2 * self.pos as u64;
                self.pos += 1;
                return Some(n);
            }
            self.seg_start += 2 * self.seg_len as u64;
            self.fill();
        }
    }
}

/// Splits `[2, n]` into `workers` contiguous, disjoint, covering ranges in
/// ascending order. Fewer ranges are returned when `n` is tiny.
pub fn partition_ranges(n: u64, workers: usize) -> Vec<RangeInclusive<u64>> {
    let workers = workers.max(1) as u64;
    if n < 2 {
        return Vec::new();
    }
    let len = n - 1;
    let parts = workers.min(len);
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 2;
    for i in 0..parts {
        let size = len / parts + u64::from(i < len % parts);
        out.push(start..=start + size - 1);
        start += size;
    }
    out
}
