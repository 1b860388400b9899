use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::Rng;

use super::{factor, poly, Field, FieldError, FiniteField, PrimeField};
use crate::arith;

pub const MAX_EXTENSION_DEGREE: usize = 16;

/// Fixed-size coefficient array of a reduced element.
pub(crate) type Slots = [u64; MAX_EXTENSION_DEGREE];

fn barrett_constant(p: u64) -> u64 {
    if p < 1 << 32 {
        ((1u128 << 64) / p as u128) as u64
    } else {
        0
    }
}

/// Canonical representative of an element of `F_p[t]/(g)`: the reduced
/// polynomial in `t`, constant term first, trailing zeros removed.
///
/// Ordering follows the integer encoding `Σ cᵢ pⁱ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FqElement(Vec<u64>);

impl FqElement {
    /// Wraps coefficients already reduced mod `p` and of degree below the
    /// modulus.
    pub(crate) fn from_reduced(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FqElement(coeffs)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The element as a prime-field scalar, if it has degree ≤ 0.
    pub fn as_scalar(&self) -> Option<u64> {
        match self.0.len() {
            0 => Some(0),
            1 => Some(self.0[0]),
            _ => None,
        }
    }
}

impl Ord for FqElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for FqElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("t")?,
                (1, c) => write!(f, "{c}t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// `F_q = F_p[t]/(g)` for a monic irreducible `g` of degree `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqField {
    base: PrimeField,
    modulus: Vec<u64>,
    order: u128,
    /// `⌊2⁶⁴/p⌋` when `p < 2³²`, for Barrett reduction; zero otherwise.
    barrett: u64,
}

impl FqField {
    pub fn new(p: u64, modulus: &[u64]) -> Result<Self, FieldError> {
        let base = PrimeField::new(p)?;
        let g = poly::trim(&base, modulus.iter().map(|&c| c % p).collect());
        if g.len() < 2 || *g.last().unwrap() != 1 {
            return Err(FieldError::InvalidModulus);
        }
        let m = g.len() - 1;
        if m > MAX_EXTENSION_DEGREE {
            return Err(FieldError::DegreeTooLarge(m));
        }
        let order = arith::checked_pow_u128(p, m as u32).ok_or(FieldError::DegreeTooLarge(m))?;
        if !factor::is_irreducible(&base, &g) {
            return Err(FieldError::ReducibleModulus(p));
        }
        Ok(Self { base, modulus: g, order, barrett: barrett_constant(p) })
    }

    /// Builds the field from a modulus already known to be monic and
    /// irreducible (a local factor produced by factorization).
    pub(crate) fn from_irreducible(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        let m = modulus.len() - 1;
        if m > MAX_EXTENSION_DEGREE {
            return Err(FieldError::DegreeTooLarge(m));
        }
        let order = arith::checked_pow_u128(p, m as u32).ok_or(FieldError::DegreeTooLarge(m))?;
        Ok(Self { base: PrimeField::new_unchecked(p), modulus, order, barrett: barrett_constant(p) })
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn prime_field(&self) -> PrimeField {
        self.base
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Reduces an arbitrary polynomial in `t` (coefficients already in
    /// `[0, p)` or not) into the field.
    pub fn element(&self, coeffs: &[u64]) -> FqElement {
        let p = self.p();
        let a = poly::trim(&self.base, coeffs.iter().map(|&c| c % p).collect());
        FqElement(poly::rem(&self.base, &a, &self.modulus))
    }

    pub fn scalar(&self, c: u64) -> FqElement {
        self.element(&[c])
    }

    /// The class of `t`.
    pub fn generator(&self) -> FqElement {
        self.element(&[0, 1])
    }

    pub fn frobenius(&self, a: &FqElement) -> FqElement {
        self.pow(a, self.p() as u128)
    }

    /// `x ↦ x^((p^m − 1)/(p^s − 1))`, the norm onto the subfield of degree
    /// `s`. Zero maps to zero.
    pub fn norm(&self, x: &FqElement, sub_degree: usize) -> Result<FqElement, FieldError> {
        let m = self.degree();
        if sub_degree == 0 || !m.is_multiple_of(sub_degree) {
            return Err(FieldError::InvalidSubfield { sub: sub_degree, degree: m });
        }
        if x.is_zero() {
            return Ok(self.zero());
        }
        Ok(self.pow(x, self.norm_exponent(sub_degree)))
    }

    pub fn norm_exponent(&self, sub_degree: usize) -> u128 {
        let sub_order = (self.p() as u128).pow(sub_degree as u32);
        (self.order - 1) / (sub_order - 1)
    }

    /// Monic minimal polynomial over `F_p`, constant term first.
    pub fn minpoly(&self, x: &FqElement) -> Vec<u64> {
        let mut conjugates = vec![x.clone()];
        let mut c = self.frobenius(x);
        while c != *x {
            conjugates.push(c.clone());
            c = self.frobenius(&c);
        }
        let mut acc = vec![self.one()];
        for c in &conjugates {
            acc = poly::mul(self, &acc, &[self.neg(c), self.one()]);
        }
        acc.into_iter().map(|e| e.as_scalar().expect("minimal polynomial lies over F_p")).collect()
    }

    /// Integer encoding `Σ cᵢ pⁱ`, a bijection onto `[0, q)`.
    pub fn encode(&self, a: &FqElement) -> u128 {
        a.0.iter().rev().fold(0u128, |acc, &c| acc * self.p() as u128 + c as u128)
    }

    pub fn decode(&self, mut n: u128) -> FqElement {
        let p = self.p() as u128;
        let mut coeffs = Vec::with_capacity(self.degree());
        while n > 0 {
            coeffs.push((n % p) as u64);
            n /= p;
        }
        FqElement(coeffs)
    }

    pub(crate) fn load(&self, a: &FqElement) -> Slots {
        let mut s = [0; MAX_EXTENSION_DEGREE];
        s[..a.0.len()].copy_from_slice(&a.0);
        s
    }

    pub(crate) fn store(&self, s: &Slots) -> FqElement {
        let len = s[..self.degree()].iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        FqElement(s[..len].to_vec())
    }

    /// Product of two reduced coefficient arrays, without allocating.
    pub(crate) fn mul_slots(&self, a: &Slots, b: &Slots) -> Slots {
        let m = self.degree();
        let p = self.p();
        let br = self.barrett;
        let mm = |x: u64, y: u64| {
            if br == 0 {
                return arith::mul_mod(x, y, p);
            }
            let z = x * y;
            let q = ((z as u128 * br as u128) >> 64) as u64;
            let mut r = z - q * p;
            while r >= p {
                r -= p;
            }
            r
        };
        let mut c = [0u64; 2 * MAX_EXTENSION_DEGREE];
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                c[i + j] = arith::add_mod(c[i + j], mm(a[i], b[j]), p);
            }
        }
        let g = &self.modulus;
        for k in (m..2 * m - 1).rev() {
            let t = c[k];
            if t != 0 {
                let nt = p - t;
                for i in 0..m {
                    c[k - m + i] = arith::add_mod(c[k - m + i], mm(nt, g[i]), p);
                }
            }
        }
        let mut out = [0; MAX_EXTENSION_DEGREE];
        out[..m].copy_from_slice(&c[..m]);
        out
    }

    pub(crate) fn pow_slots(&self, a: &Slots, mut e: u128) -> Slots {
        let mut acc = [0; MAX_EXTENSION_DEGREE];
        acc[0] = 1;
        let mut base = *a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slots(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_slots(&base, &base);
            }
        }
        acc
    }

    pub(crate) fn decode_slots(&self, mut n: u128) -> Slots {
        let p = self.p() as u128;
        let mut s = [0; MAX_EXTENSION_DEGREE];
        for c in s.iter_mut().take(self.degree()) {
            *c = (n % p) as u64;
            n /= p;
        }
        s
    }

    pub(crate) fn encode_slots(&self, s: &Slots) -> u128 {
        s[..self.degree()].iter().rev().fold(0u128, |acc, &c| acc * self.p() as u128 + c as u128)
    }

    /// All elements in canonical order. Intended for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FqElement> + '_ {
        (0..self.order).map(move |n| self.decode(n))
    }
}

impl Field for FqField {
    type Elem = FqElement;

    fn zero(&self) -> FqElement {
        FqElement(Vec::new())
    }
    fn one(&self) -> FqElement {
        FqElement(vec![1])
    }
    fn is_zero(&self, a: &FqElement) -> bool {
        a.0.is_empty()
    }
    fn add(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement(poly::add(&self.base, &a.0, &b.0))
    }
    fn sub(&self, a: &FqElement, b: &FqElement) -> FqElement {
        FqElement(poly::sub(&self.base, &a.0, &b.0))
    }
    fn neg(&self, a: &FqElement) -> FqElement {
        FqElement(a.0.iter().map(|c| self.base.neg(c)).collect())
    }
    fn mul(&self, a: &FqElement, b: &FqElement) -> FqElement {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        self.store(&self.mul_slots(&self.load(a), &self.load(b)))
    }
    fn pow(&self, a: &FqElement, e: u128) -> FqElement {
        self.store(&self.pow_slots(&self.load(a), e))
    }
    fn inv(&self, a: &FqElement) -> Option<FqElement> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.order - 2))
        }
    }
    fn from_int(&self, c: i128) -> FqElement {
        FqElement(poly::trim(&self.base, vec![self.base.from_int(c)]))
    }
}

impl FiniteField for FqField {
    fn characteristic(&self) -> u64 {
        self.p()
    }
    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
    fn order(&self) -> u128 {
        self.order
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FqElement {
        let coeffs: Vec<u64> = (0..self.degree()).map(|_| rng.random_range(0..self.p())).collect();
        FqElement(poly::trim(&self.base, coeffs))
    }
    fn elem_hash(&self, a: &FqElement) -> u64 {
        super::mix_words(a.0.len() as u64, a.0.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> FqField {
        FqField::new(3, &[1, 0, 1]).unwrap()
    }

    #[test]
    fn construction() {
        assert_eq!(f9().order(), 9);
        assert_eq!(FqField::new(5, &[1, 0, 1]), Err(FieldError::ReducibleModulus(5)));
        assert_eq!(FqField::new(2, &[0, 1]).unwrap().order(), 2);
        assert_eq!(FqField::new(4, &[1, 1]), Err(FieldError::InvalidPrime(4)));
        assert_eq!(FqField::new(3, &[1, 0, 2]), Err(FieldError::InvalidModulus));
    }

    #[test]
    fn powers() {
        let f = f9();
        let t = f.generator();
        assert_eq!(f.pow(&t, 4), f.one());
        assert_eq!(f.pow(&f.zero(), 0), f.one());
        let t1 = f.element(&[1, 1]);
        assert_eq!(f.pow(&t1, 2), f.element(&[0, 2]));
    }

    #[test]
    fn norm_examples() {
        let f = f9();
        let t1 = f.element(&[1, 1]);
        assert_eq!(f.norm(&t1, 1).unwrap(), f.scalar(2));
        assert_eq!(f.norm(&f.one(), 1).unwrap(), f.one());
        assert_eq!(f.norm(&t1, 2).unwrap(), t1);
        assert_eq!(f.norm(&f.zero(), 1).unwrap(), f.zero());
        let f8 = FqField::new(2, &[1, 1, 0, 1]).unwrap();
        assert_eq!(f8.norm(&f8.generator(), 2), Err(FieldError::InvalidSubfield { sub: 2, degree: 3 }));
    }

    #[test]
    fn minpoly_examples() {
        let f = f9();
        assert_eq!(f.minpoly(&f.generator()), vec![1, 0, 1]);
        assert_eq!(f.minpoly(&f.scalar(2)), vec![1, 1]);
        assert_eq!(f.minpoly(&f.element(&[1, 1])), vec![2, 1, 1]);
    }

    #[test]
    fn encoding_is_a_bijection() {
        let f = FqField::new(5, &[2, 0, 1]).unwrap();
        let all: Vec<_> = f.elements().collect();
        assert_eq!(all.len(), 25);
        for (i, e) in all.iter().enumerate() {
            assert_eq!(f.encode(e), i as u128);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn display() {
        let f = f9();
        assert_eq!(alloc::format!("{}", f.element(&[2, 1])), "t + 2");
        assert_eq!(alloc::format!("{}", f.zero()), "0");
    }
}
