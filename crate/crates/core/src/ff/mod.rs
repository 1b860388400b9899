//! Finite fields `F_p` and `F_p[t]/(g)`, dense polynomials over them, and
//! univariate factorization (squarefree, distinct-degree, equal-degree).

use core::fmt::Debug;

use rand::Rng;

use crate::arith;

pub(crate) mod ext;
pub mod factor;
pub mod linalg;
pub mod poly;

pub use ext::{FqElement, FqField, MAX_EXTENSION_DEGREE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    InvalidPrime(u64),
    #[error("modulus must be monic of degree at least 1")]
    InvalidModulus,
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("extension degree {0} exceeds the supported maximum")]
    DegreeTooLarge(usize),
    #[error("subfield degree {sub} does not divide {degree}")]
    InvalidSubfield { sub: usize, degree: usize },
}

/// A field given as an explicit object; elements carry no back-reference.
pub trait Field {
    type Elem: Clone + Eq + Ord + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Image of a rational integer.
    fn from_int(&self, c: i128) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, mut e: u128) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

pub trait FiniteField: Field {
    fn characteristic(&self) -> u64;
    /// Degree over the prime field.
    fn degree(&self) -> usize;
    fn order(&self) -> u128;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    fn elem_hash(&self, a: &Self::Elem) -> u64;

    /// The unique `p`-th root, `a^(q/p)`.
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.order() / self.characteristic() as u128)
    }
}

/// The prime field `F_p`, elements in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if arith::is_prime(p) {
            Ok(Self { p })
        } else {
            Err(FieldError::InvalidPrime(p))
        }
    }

    /// Caller guarantees `p` is prime.
    pub(crate) fn new_unchecked(p: u64) -> Self {
        Self { p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        arith::add_mod(*a, *b, self.p)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        arith::sub_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        arith::sub_mod(0, *a, self.p)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        arith::mul_mod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        arith::inv_mod(*a, self.p)
    }
    fn from_int(&self, c: i128) -> u64 {
        arith::reduce_signed(c, self.p)
    }
    fn pow(&self, a: &u64, e: u128) -> u64 {
        arith::pow_mod(*a, e, self.p)
    }
}

impl FiniteField for PrimeField {
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        1
    }
    fn order(&self) -> u128 {
        self.p as u128
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }
    fn elem_hash(&self, a: &u64) -> u64 {
        *a
    }
    fn pth_root(&self, a: &u64) -> u64 {
        *a
    }
}

/// FNV-1a style mixing of a word stream; used only to seed splitting.
pub(crate) fn mix_words(seed: u64, words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for w in words {
        h ^= w;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
        h ^= h >> 29;
    }
    h
}
