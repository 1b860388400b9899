//! Word-sized modular arithmetic and small integer utilities.

use alloc::vec::Vec;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= p {
        s.wrapping_sub(p)
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u128, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`; `None` when `a ≡ 0`.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return None;
    }
    // extended Euclid on signed 128-bit values
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    Some(s0.rem_euclid(p as i128) as u64)
}

/// Reduces a signed integer into `[0, p)`.
#[inline]
pub fn reduce_signed(c: i128, p: u64) -> u64 {
    c.rem_euclid(p as i128) as u64
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d as u128, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `base^exp` in 128 bits, `None` on overflow.
pub fn checked_pow_u128(base: u64, exp: u32) -> Option<u128> {
    (base as u128).checked_pow(exp)
}

/// Prime divisors of `|n|` found by trial division up to `limit`.
///
/// Returns the sorted divisors and the cofactor left over (1 when `n` was
/// fully factored). `n = 0` yields no divisors and cofactor 0.
pub fn prime_divisors(n: i128, limit: u64) -> (Vec<u64>, u128) {
    let mut m = n.unsigned_abs();
    let mut out = Vec::new();
    if m == 0 {
        return (out, 0);
    }
    let mut d: u64 = 2;
    while d <= limit && (d as u128) * (d as u128) <= m {
        if m.is_multiple_of(d as u128) {
            out.push(d);
            while m.is_multiple_of(d as u128) {
                m /= d as u128;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 && m <= u64::MAX as u128 && is_prime(m as u64) {
        out.push(m as u64);
        m = 1;
    }
    (out, m)
}
