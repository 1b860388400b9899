//! Dense univariate polynomials over a [`Field`], stored constant term
//! first with no trailing zeros (the zero polynomial is empty).

use alloc::vec;
use alloc::vec::Vec;

use super::Field;

pub fn trim<F: Field>(f: &F, mut a: Vec<F::Elem>) -> Vec<F::Elem> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

/// Degree, `None` for the zero polynomial.
pub fn degree<E>(a: &[E]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn x<F: Field>(f: &F) -> Vec<F::Elem> {
    trim(f, vec![f.zero(), f.one()])
}

pub fn constant<F: Field>(f: &F, c: F::Elem) -> Vec<F::Elem> {
    trim(f, vec![c])
}

pub fn is_one<F: Field>(f: &F, a: &[F::Elem]) -> bool {
    a.len() == 1 && a[0] == f.one()
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(f, out)
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.sub(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => f.neg(y),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(f, out)
}

pub fn scale<F: Field>(f: &F, a: &[F::Elem], c: &F::Elem) -> Vec<F::Elem> {
    trim(f, a.iter().map(|x| f.mul(x, c)).collect())
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

/// Quotient and remainder; panics on division by the zero polynomial.
pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
    let db = degree(b).expect("polynomial division by zero");
    let lead_inv = f.inv(&b[db]).expect("leading coefficient is nonzero");
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![f.zero(); rem.len() - db];
    for k in (0..quot.len()).rev() {
        let c = f.mul(&rem[k + db], &lead_inv);
        if f.is_zero(&c) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            rem[k + j] = f.sub(&rem[k + j], &f.mul(&c, y));
        }
        quot[k] = c;
    }
    rem.truncate(db);
    (trim(f, quot), trim(f, rem))
}

pub fn rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    divrem(f, a, b).1
}

pub fn div_exact<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let (q, r) = divrem(f, a, b);
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    match a.last() {
        None => Vec::new(),
        Some(lc) => {
            let inv = f.inv(lc).expect("nonzero leading coefficient");
            scale(f, a, &inv)
        }
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    while !r1.is_empty() {
        let r = rem(f, &r0, &r1);
        r0 = r1;
        r1 = r;
    }
    monic(f, &r0)
}

pub fn derivative<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    let out = a.iter().enumerate().skip(1).map(|(i, c)| f.mul(c, &f.from_int(i as i128))).collect();
    trim(f, out)
}

pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

pub fn mulmod<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem], modulus: &[F::Elem]) -> Vec<F::Elem> {
    rem(f, &mul(f, a, b), modulus)
}

/// `base^e mod modulus`.
pub fn powmod<F: Field>(f: &F, base: &[F::Elem], mut e: u128, modulus: &[F::Elem]) -> Vec<F::Elem> {
    let mut acc = rem(f, &constant(f, f.one()), modulus);
    let mut b = rem(f, base, modulus);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &b, modulus);
        }
        e >>= 1;
        if e > 0 {
            b = mulmod(f, &b, &b, modulus);
        }
    }
    acc
}

/// Maps every coefficient through the field's integer embedding.
pub fn from_ints<F: Field>(f: &F, coeffs: &[i128]) -> Vec<F::Elem> {
    trim(f, coeffs.iter().map(|&c| f.from_int(c)).collect())
}
