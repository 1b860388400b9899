//! Exact integer and rational polynomials: resultants, discriminants,
//! reduction modulo `p` and certification of declared embeddings.
//!
//! Coefficients are machine integers; every intermediate is computed in
//! 128 bits with checked arithmetic and overflow is reported as an error.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, Zero};

use crate::arith;

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("arithmetic overflow in 128-bit intermediates")]
    Overflow,
    #[error("a denominator is not invertible modulo {p}")]
    DenominatorNotInvertible { p: u64 },
}

/// Integer polynomial, constant term first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![0, 1])
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|&c| Rational::from_integer(c as i128)).collect())
    }

    /// Coefficients reduced into `[0, p)`, trailing zeros removed.
    pub fn reduce(&self, p: u64) -> Vec<u64> {
        let mut out: Vec<u64> = self.coeffs.iter().map(|&c| arith::reduce_signed(c as i128, p)).collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    fn wide(&self) -> Vec<i128> {
        self.coeffs.iter().map(|&c| c as i128).collect()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, Rational)> =
            self.coeffs.iter().enumerate().map(|(i, &c)| (i, Rational::from_integer(c as i128))).collect();
        write_terms(f, &terms)
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(usize, Rational)]) -> fmt::Result {
    let mut first = true;
    for (i, c) in terms.iter().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        let unit = mag.is_one();
        match (*i, unit) {
            (0, _) => write!(f, "{mag}")?,
            (1, true) => f.write_str("x")?,
            (1, false) => write!(f, "{mag}*x")?,
            (i, true) => write!(f, "x^{i}")?,
            (i, false) => write!(f, "{mag}*x^{i}")?,
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

fn trim_wide(mut v: Vec<i128>) -> Vec<i128> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn content(v: &[i128]) -> i128 {
    v.iter().fold(0i128, |g, &c| g.gcd(&c))
}

fn checked_pow(base: i128, exp: usize) -> Result<i128, PolyError> {
    let mut acc: i128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).ok_or(PolyError::Overflow)?;
    }
    Ok(acc)
}

/// Pseudo-remainder `lc(b)^(deg a − deg b + 1) · a mod b`.
fn pseudo_rem(a: &[i128], b: &[i128]) -> Result<Vec<i128>, PolyError> {
    let db = b.len() - 1;
    let lb = b[db];
    let mut r = a.to_vec();
    let delta = a.len() - b.len();
    let mut steps = 0usize;
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr];
        let shift = dr - db;
        for v in r.iter_mut() {
            *v = v.checked_mul(lb).ok_or(PolyError::Overflow)?;
        }
        for (j, &c) in b.iter().enumerate() {
            let t = lr.checked_mul(c).ok_or(PolyError::Overflow)?;
            r[shift + j] = r[shift + j].checked_sub(t).ok_or(PolyError::Overflow)?;
        }
        r = trim_wide(r);
        steps += 1;
    }
    let fix = checked_pow(lb, delta + 1 - steps)?;
    r.iter().map(|&c| c.checked_mul(fix).ok_or(PolyError::Overflow)).collect()
}

fn exact_div(v: &[i128], d: i128) -> Vec<i128> {
    v.iter()
        .map(|&c| {
            debug_assert_eq!(c % d, 0, "inexact subresultant division");
            c / d
        })
        .collect()
}

/// Resultant by the subresultant pseudo-remainder sequence.
pub fn resultant(a: &IntPoly, b: &IntPoly) -> Result<i128, PolyError> {
    if a.is_zero() || b.is_zero() {
        return Ok(0);
    }
    let (mut pa, mut pb) = (a.wide(), b.wide());
    let (ca, cb) = (content(&pa), content(&pb));
    pa = exact_div(&pa, ca);
    pb = exact_div(&pb, cb);
    let t = checked_pow(ca, pb.len() - 1)?.checked_mul(checked_pow(cb, pa.len() - 1)?).ok_or(PolyError::Overflow)?;
    let mut s: i128 = 1;
    if pa.len() < pb.len() {
        core::mem::swap(&mut pa, &mut pb);
        if (pa.len() - 1) % 2 == 1 && (pb.len() - 1) % 2 == 1 {
            s = -1;
        }
    }
    let (mut g, mut h): (i128, i128) = (1, 1);
    loop {
        let (da, db) = (pa.len() - 1, pb.len() - 1);
        if db == 0 {
            let num = checked_pow(pb[0], da)?;
            let den = checked_pow(h, da.saturating_sub(1))?;
            let last = num / den;
            return s.checked_mul(t).and_then(|v| v.checked_mul(last)).ok_or(PolyError::Overflow);
        }
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = pseudo_rem(&pa, &pb)?;
        if r.is_empty() {
            return Ok(0);
        }
        pa = pb;
        let divisor = g.checked_mul(checked_pow(h, delta)?).ok_or(PolyError::Overflow)?;
        pb = exact_div(&r, divisor);
        g = *pa.last().unwrap();
        h = if delta == 0 { h } else { checked_pow(g, delta)? / checked_pow(h, delta - 1)? };
    }
}

pub fn derivative(f: &IntPoly) -> Result<IntPoly, PolyError> {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c.checked_mul(i as i64).ok_or(PolyError::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntPoly::new(coeffs))
}

/// `disc(f) = (−1)^(n(n−1)/2) · Res(f, f′)` for monic `f` of degree `n`.
pub fn discriminant(f: &IntPoly) -> Result<i128, PolyError> {
    let n = f.degree().unwrap_or(0);
    let res = resultant(f, &derivative(f)?)?;
    let sign = if (n * n.saturating_sub(1) / 2).is_multiple_of(2) { 1 } else { -1 };
    let lc = *f.coeffs.last().unwrap_or(&1) as i128;
    Ok(sign * res / lc)
}

/// Polynomial with rational coefficients in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn x() -> Self {
        IntPoly::x().to_rat()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Distinct prime divisors of the denominators.
    pub fn denominator_primes(&self) -> Vec<u64> {
        let mut out: Vec<u64> =
            self.coeffs.iter().flat_map(|c| arith::prime_divisors(*c.denom(), u64::MAX).0).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn has_denominator_divisible_by(&self, p: u64) -> bool {
        self.coeffs.iter().any(|c| c.denom() % p as i128 == 0)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&z);
                let b = other.coeffs.get(i).unwrap_or(&z);
                a.checked_add(b).ok_or(PolyError::Overflow)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(coeffs))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&z);
                let b = other.coeffs.get(i).unwrap_or(&z);
                a.checked_sub(b).ok_or(PolyError::Overflow)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(coeffs))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = a.checked_mul(b).ok_or(PolyError::Overflow)?;
                out[i + j] = out[i + j].checked_add(&t).ok_or(PolyError::Overflow)?;
            }
        }
        Ok(Self::new(out))
    }

    /// Remainder modulo a monic integer polynomial.
    pub fn rem_monic(&self, modulus: &IntPoly) -> Result<Self, PolyError> {
        debug_assert!(modulus.is_monic());
        let dm = modulus.degree().expect("nonzero modulus");
        let mut r = self.coeffs.clone();
        while r.len() > dm {
            let top = r.len() - 1;
            let lead = r[top];
            let shift = top - dm;
            for (j, &c) in modulus.coeffs.iter().enumerate() {
                let t = lead.checked_mul(&Rational::from_integer(c as i128)).ok_or(PolyError::Overflow)?;
                r[shift + j] = r[shift + j].checked_sub(&t).ok_or(PolyError::Overflow)?;
            }
            debug_assert!(r[top].is_zero());
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Ok(Self::new(r))
    }

    /// `self(inner) mod modulus`, by Horner's rule with reduction at every
    /// step.
    pub fn compose_mod(&self, inner: &RatPoly, modulus: &IntPoly) -> Result<Self, PolyError> {
        let mut acc = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(inner)?.checked_add(&RatPoly::constant(*c))?.rem_monic(modulus)?;
        }
        Ok(acc)
    }

    /// Integer polynomial, if every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        self.coeffs
            .iter()
            .map(|c| if c.is_integer() { i64::try_from(c.to_integer()).ok() } else { None })
            .collect::<Option<Vec<_>>>()
            .map(IntPoly::new)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, Rational)> = self.coeffs.iter().copied().enumerate().collect();
        write_terms(f, &terms)
    }
}

/// Reduces every coefficient `num/den` to `num · den⁻¹ mod p`.
pub fn reduce_mod_p(h: &RatPoly, p: u64) -> Result<Vec<u64>, PolyError> {
    let mut out = h
        .coeffs
        .iter()
        .map(|c| {
            let inv = arith::inv_mod(arith::reduce_signed(*c.denom(), p), p)
                .ok_or(PolyError::DenominatorNotInvertible { p })?;
            Ok(arith::mul_mod(arith::reduce_signed(*c.numer(), p), inv, p))
        })
        .collect::<Result<Vec<u64>, PolyError>>()?;
    while out.last() == Some(&0) {
        out.pop();
    }
    Ok(out)
}

/// Whether `f_src(h(x)) ≡ 0 (mod f_dst)`, i.e. `h` names a root of `f_src`
/// inside `Q[x]/(f_dst)`. Overflow makes the check fail.
pub fn validate_embedding(h: &RatPoly, f_src: &IntPoly, f_dst: &IntPoly) -> bool {
    try_validate_embedding(h, f_src, f_dst).unwrap_or(false)
}

pub fn try_validate_embedding(h: &RatPoly, f_src: &IntPoly, f_dst: &IntPoly) -> Result<bool, PolyError> {
    let h = h.rem_monic(f_dst)?;
    Ok(f_src.to_rat().compose_mod(&h, f_dst)?.is_zero())
}
