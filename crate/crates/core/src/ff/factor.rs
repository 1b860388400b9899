//! Factorization of univariate polynomials over a finite field.
//!
//! Squarefree decomposition, then distinct-degree factorization, then
//! Cantor–Zassenhaus equal-degree splitting. The splitting stream is a
//! ChaCha generator seeded from `p` and a hash of the input, so repeated
//! calls (and parallel scans) give identical output.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{mix_words, poly, FiniteField};

/// Irreducible monic factors with multiplicities.
pub type Factorization<E> = Vec<(Vec<E>, usize)>;

/// Squarefree decomposition of a monic `f`: pairwise coprime squarefree
/// parts with their multiplicities (parts may share no factor).
pub fn squarefree<F: FiniteField>(field: &F, f: &[F::Elem]) -> Factorization<F::Elem> {
    let mut out = Vec::new();
    squarefree_into(field, &poly::monic(field, f), 1, &mut out);
    out
}

fn squarefree_into<F: FiniteField>(field: &F, f: &[F::Elem], scale: usize, out: &mut Factorization<F::Elem>) {
    if poly::degree(f).unwrap_or(0) == 0 {
        return;
    }
    let df = poly::derivative(field, f);
    let mut c = poly::gcd(field, f, &df);
    let mut w = poly::div_exact(field, f, &c);
    let mut i = 1;
    while !poly::is_one(field, &w) {
        let y = poly::gcd(field, &w, &c);
        let part = poly::div_exact(field, &w, &y);
        if poly::degree(&part).unwrap_or(0) > 0 {
            out.push((part, i * scale));
        }
        w = y;
        c = poly::div_exact(field, &c, &w);
        i += 1;
    }
    if !poly::is_one(field, &c) {
        // c is a polynomial in x^p: take p-th roots coefficientwise
        let p = field.characteristic() as usize;
        let root: Vec<F::Elem> = c.iter().step_by(p).map(|a| field.pth_root(a)).collect();
        squarefree_into(field, &poly::trim(field, root), scale * p, out);
    }
}

/// Splits a squarefree monic `f` into products of all irreducible factors
/// of each degree `d`. Output pairs are `(product, d)`, ascending in `d`.
pub fn distinct_degree<F: FiniteField>(field: &F, f: &[F::Elem]) -> Vec<(Vec<F::Elem>, usize)> {
    let q = field.order();
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x = poly::x(field);
    let mut h = poly::rem(field, &x, &rest);
    let mut d = 1;
    while poly::degree(&rest).unwrap_or(0) >= 2 * d {
        h = poly::powmod(field, &h, q, &rest);
        let g = poly::gcd(field, &rest, &poly::sub(field, &h, &x));
        if !poly::is_one(field, &g) {
            rest = poly::div_exact(field, &rest, &g);
            h = poly::rem(field, &h, &rest);
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(deg) = poly::degree(&rest) {
        if deg > 0 {
            out.push((rest, deg));
        }
    }
    out
}

/// Splits a monic `g` whose irreducible factors all have degree `d`.
pub fn equal_degree<F: FiniteField>(field: &F, g: &[F::Elem], d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<F::Elem>> {
    let n = poly::degree(g).expect("nonzero polynomial");
    if n == d {
        return vec![g.to_vec()];
    }
    loop {
        let r: Vec<F::Elem> = poly::trim(field, (0..n).map(|_| field.random(rng)).collect());
        if poly::degree(&r).unwrap_or(0) == 0 {
            continue;
        }
        let s = splitting_probe(field, &r, d, g);
        let u = poly::gcd(field, g, &s);
        let du = poly::degree(&u).unwrap_or(0);
        if du > 0 && du < n {
            let v = poly::div_exact(field, g, &u);
            let mut out = equal_degree(field, &u, d, rng);
            out.extend(equal_degree(field, &v, d, rng));
            return out;
        }
    }
}

/// `r^((q^d−1)/2) − 1` in odd characteristic, the trace
/// `r + r^2 + … + r^(2^(kd−1))` in characteristic 2 (q = 2^k).
fn splitting_probe<F: FiniteField>(field: &F, r: &[F::Elem], d: usize, g: &[F::Elem]) -> Vec<F::Elem> {
    let q = field.order();
    if field.characteristic() == 2 {
        let steps = field.degree() * d;
        let mut term = poly::rem(field, r, g);
        let mut acc = term.clone();
        for _ in 1..steps {
            term = poly::mulmod(field, &term, &term, g);
            acc = poly::add(field, &acc, &term);
        }
        acc
    } else {
        // r^(1 + q + … + q^(d−1)) then raise to (q − 1)/2; avoids
        // exponents beyond 128 bits.
        let mut conj = poly::rem(field, r, g);
        let mut prod = conj.clone();
        for _ in 1..d {
            conj = poly::powmod(field, &conj, q, g);
            prod = poly::mulmod(field, &prod, &conj, g);
        }
        let pw = poly::powmod(field, &prod, (q - 1) / 2, g);
        poly::sub(field, &pw, &poly::constant(field, field.one()))
    }
}

fn seeded_rng<F: FiniteField>(field: &F, f: &[F::Elem]) -> ChaCha8Rng {
    let seed = mix_words(field.characteristic(), f.iter().map(|c| field.elem_hash(c)).chain([field.order() as u64]));
    ChaCha8Rng::seed_from_u64(seed)
}

/// Full factorization of `f` (degree ≥ 1) into monic irreducibles, sorted
/// by degree then by coefficient sequence (constant term first).
pub fn factor<F: FiniteField>(field: &F, f: &[F::Elem]) -> Factorization<F::Elem> {
    let mut rng = seeded_rng(field, f);
    let mut out = Vec::new();
    for (part, mult) in squarefree(field, f) {
        for (g, d) in distinct_degree(field, &part) {
            for h in equal_degree(field, &g, d, &mut rng) {
                out.push((h, mult));
            }
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    if cfg!(debug_assertions) {
        let mut prod = poly::constant(field, field.one());
        for (g, e) in &out {
            for _ in 0..*e {
                prod = poly::mul(field, &prod, g);
            }
        }
        assert_eq!(prod, poly::monic(field, f), "factorization does not multiply back");
    }
    out
}

/// Degrees of the irreducible factors with multiplicities, sorted, without
/// equal-degree splitting.
pub fn factor_degrees<F: FiniteField>(field: &F, f: &[F::Elem]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (part, mult) in squarefree(field, f) {
        for (g, d) in distinct_degree(field, &part) {
            let count = poly::degree(&g).unwrap() / d;
            out.extend(core::iter::repeat_n((d, mult), count));
        }
    }
    out.sort();
    out
}

pub fn is_irreducible<F: FiniteField>(field: &F, f: &[F::Elem]) -> bool {
    match poly::degree(f) {
        None | Some(0) => false,
        Some(n) => factor_degrees(field, f) == [(n, 1)],
    }
}

/// Roots in the field, ascending.
pub fn roots<F: FiniteField>(field: &F, f: &[F::Elem]) -> Vec<F::Elem> {
    let monic = poly::monic(field, f);
    let sqfree_linear = {
        // gcd with x^q − x isolates the distinct linear factors
        let x = poly::x(field);
        let xq = poly::powmod(field, &x, field.order(), &monic);
        poly::gcd(field, &monic, &poly::sub(field, &xq, &x))
    };
    if poly::degree(&sqfree_linear).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut rng = seeded_rng(field, f);
    let mut out: Vec<F::Elem> =
        equal_degree(field, &sqfree_linear, 1, &mut rng).into_iter().map(|l| field.neg(&l[0])).collect();
    out.sort();
    out
}
