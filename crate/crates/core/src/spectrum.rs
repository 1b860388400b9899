//! Points of `Sp_K`: rational primes split by Dedekind factorization,
//! residue fields with their naming homomorphisms, and the splitting
//! predicates `P^N`, `Π_{K,L}`, `Ψ_{K,L}`.
//!
//! Points are computed per rational prime on demand. A prime dividing the
//! discriminant (or an embedding denominator) still splits into points with
//! `ramified` set, but every predicate refuses it.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ff::{factor, poly, Field, FieldError, FiniteField, FqElement, FqField, PrimeField};
use crate::intpoly::{self, IntPoly, PolyError, RatPoly};
use crate::lattice::{Exclusion, Extension, NumberField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectrumError {
    #[error("prime {p} is excluded for {extension}: {reason}")]
    Ramified { p: u64, extension: String, reason: Exclusion },
    #[error("{upper} does not lie over {lower}")]
    NotLyingOver { upper: String, lower: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A point `pK = (p, g(α))` of `Sp_K`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitPrime {
    pub field: String,
    pub p: u64,
    /// Monic irreducible factor of `f mod p`, constant term first.
    pub local_factor: Vec<u64>,
    /// Multiplicity of the local factor in `f mod p`.
    pub ramification: usize,
    /// `p` divides `disc(f)`.
    pub ramified: bool,
}

impl SplitPrime {
    pub fn residue_degree(&self) -> usize {
        self.local_factor.len() - 1
    }

    /// `|pK| = p^deg`.
    pub fn norm(&self) -> u128 {
        (self.p as u128).pow(self.residue_degree() as u32)
    }

    /// `F_pK = F_p[t]/(g)`.
    pub fn residue_field(&self) -> Result<FqField, FieldError> {
        FqField::from_irreducible(self.p, self.local_factor.clone())
    }

    /// `res_pK(γ)` for `γ = c(α)` with integer coefficients: `c(t) mod (p, g)`.
    pub fn residue_name(&self, field: &FqField, gamma: &IntPoly) -> FqElement {
        field.element(&gamma.reduce(self.p))
    }

    /// `res_pK` of a rational polynomial expression in `α`.
    pub fn residue_name_rat(&self, field: &FqField, gamma: &RatPoly) -> Result<FqElement, SpectrumError> {
        Ok(field.element(&intpoly::reduce_mod_p(gamma, self.p)?))
    }
}

impl fmt::Display for SplitPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = IntPoly::new(self.local_factor.iter().map(|&c| c as i64).collect());
        write!(f, "{}:({}, {})", self.field, self.p, g)?;
        if self.ramification > 1 {
            write!(f, "^{}", self.ramification)?;
        }
        Ok(())
    }
}

/// All points of `Sp_K` over `p`, in canonical local-factor order.
pub fn split_prime(field: &NumberField, p: u64) -> Vec<SplitPrime> {
    let fp = PrimeField::new_unchecked(p);
    let ramified = field.is_singular_at(p);
    factor::factor(&fp, &field.poly().reduce(p))
        .into_iter()
        .map(|(g, e)| SplitPrime { field: field.name().to_string(), p, local_factor: g, ramification: e, ramified })
        .collect()
}

/// The unique point of `Sp_Q` over `p`.
pub fn rational_point(p: u64) -> SplitPrime {
    SplitPrime {
        field: crate::lattice::BASE_FIELD.to_string(),
        p,
        local_factor: alloc::vec![0, 1],
        ramification: 1,
        ramified: false,
    }
}

fn check_pair(upper: &SplitPrime, lower: &SplitPrime, ext: &Extension) -> Result<(), SpectrumError> {
    if upper.field != ext.top.name() || lower.field != ext.base.name() || upper.p != lower.p {
        return Err(not_lying_over(upper, lower));
    }
    Ok(())
}

fn not_lying_over(upper: &SplitPrime, lower: &SplitPrime) -> SpectrumError {
    SpectrumError::NotLyingOver { upper: upper.to_string(), lower: lower.to_string() }
}

/// `res_pK(h(α_K))`, the residue of the image of `α_L` at `pK`.
pub fn base_generator_residue(
    upper: &SplitPrime,
    field: &FqField,
    ext: &Extension,
) -> Result<FqElement, SpectrumError> {
    upper.residue_name_rat(field, &ext.image)
}

/// Whether `ker res_pK ∩ O_L = ker res_pL`: the local factor of `pL`
/// vanishes at the residue of `α_L` in `F_pK`.
pub fn lies_over(upper: &SplitPrime, lower: &SplitPrime, ext: &Extension) -> Result<bool, SpectrumError> {
    if upper.field != ext.top.name() || lower.field != ext.base.name() || upper.p != lower.p {
        return Ok(false);
    }
    let field = upper.residue_field()?;
    let theta = base_generator_residue(upper, &field, ext)?;
    let g: Vec<FqElement> = lower.local_factor.iter().map(|&c| field.scalar(c)).collect();
    Ok(field.is_zero(&poly::eval(&field, &g, &theta)))
}

/// `|F_pK : F_pL|`.
pub fn relative_degree(upper: &SplitPrime, lower: &SplitPrime, ext: &Extension) -> Result<usize, SpectrumError> {
    check_pair(upper, lower, ext)?;
    if !lies_over(upper, lower, ext)? {
        return Err(not_lying_over(upper, lower));
    }
    let field = upper.residue_field()?;
    let theta = base_generator_residue(upper, &field, ext)?;
    Ok(upper.residue_degree() / (field.minpoly(&theta).len() - 1))
}

/// Points of `Sp_K` lying over `pL`, found by splitting `K` absolutely.
pub fn primes_over(ext: &Extension, lower: &SplitPrime) -> Result<Vec<SplitPrime>, SpectrumError> {
    let mut out = Vec::new();
    for upper in split_prime(&ext.top, lower.p) {
        if lies_over(&upper, lower, ext)? {
            out.push(upper);
        }
    }
    Ok(out)
}

fn ensure_evaluable(ext: &Extension, lower: &SplitPrime) -> Result<(), SpectrumError> {
    if lower.field != ext.base.name() {
        return Err(SpectrumError::NotLyingOver { upper: ext.top.name().to_string(), lower: lower.to_string() });
    }
    match ext.exclusion(lower.p) {
        Some(reason) => Err(SpectrumError::Ramified { p: lower.p, extension: ext.name(), reason }),
        None => Ok(()),
    }
}

/// Relative degrees `|F_pK : F_pL|` of all `pK` over `pL`, ascending.
///
/// Factors the relative polynomial over `F_pL`: the common part of `f_K(x)`
/// and `h(x) − θ`, where `h` expresses `α_L` in `α_K` and `θ = res_pL(α_L)`.
/// Its roots are exactly the roots of `f_K` lying over `pL`.
pub fn relative_splitting(ext: &Extension, lower: &SplitPrime) -> Result<Vec<usize>, SpectrumError> {
    ensure_evaluable(ext, lower)?;
    let p = lower.p;
    let image = intpoly::reduce_mod_p(&ext.image, p)?;
    let f_top = ext.top.poly().reduce(p);
    let degrees = if lower.residue_degree() == 1 {
        let field = PrimeField::new_unchecked(p);
        let theta = field.neg(&lower.local_factor[0]);
        relative_degrees(&field, theta, &f_top, &image)
    } else {
        let field = lower.residue_field()?;
        let theta = field.generator();
        relative_degrees(&field, theta, &f_top, &image)
    };
    Ok(degrees)
}

fn relative_degrees<F: FiniteField>(field: &F, theta: F::Elem, f_top: &[u64], image: &[u64]) -> Vec<usize> {
    let lift = |c: &[u64]| poly::trim(field, c.iter().map(|&a| field.from_int(a as i128)).collect());
    let f = lift(f_top);
    let h = poly::sub(field, &lift(image), &poly::constant(field, theta));
    let rel = poly::gcd(field, &f, &h);
    factor::factor_degrees(field, &rel).into_iter().flat_map(|(d, e)| core::iter::repeat_n(d, e)).collect()
}

/// Same relative degrees through the absolute route: split `K`, keep the
/// points lying over `pL`, take `relative_degree` of each.
pub fn relative_splitting_absolute(ext: &Extension, lower: &SplitPrime) -> Result<Vec<usize>, SpectrumError> {
    ensure_evaluable(ext, lower)?;
    let mut out = primes_over(ext, lower)?
        .iter()
        .map(|upper| relative_degree(upper, lower, ext))
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_unstable();
    Ok(out)
}

/// `pL ∈ Π_{K,L}`: some `pK` over `pL` has `F_pK ≅ F_pL`.
pub fn in_pi(ext: &Extension, lower: &SplitPrime) -> Result<bool, SpectrumError> {
    Ok(relative_splitting(ext, lower)?.contains(&1))
}

/// `pL ∈ Ψ_{K,L}`: every `pK` over `pL` has `F_pK ≅ F_pL`.
pub fn in_psi(ext: &Extension, lower: &SplitPrime) -> Result<bool, SpectrumError> {
    let degrees = relative_splitting(ext, lower)?;
    Ok(!degrees.is_empty() && degrees.iter().all(|&d| d == 1))
}

/// `(|pK| − 1)/(|pL| − 1)`, the size of every nonzero norm fibre.
pub fn fibre_multiplicity(upper: &SplitPrime, lower: &SplitPrime) -> u128 {
    (upper.norm() - 1) / (lower.norm() - 1)
}

/// `P^N_{K,L}(pK, pL)`: some nonzero `y ∈ Fb_pL` has at most `N` preimages
/// in `Fb_pK`, i.e. `(|pK| − 1)/(|pL| − 1) ≤ N`.
pub fn pn_holds(upper: &SplitPrime, lower: &SplitPrime, ext: &Extension, n: u128) -> Result<bool, SpectrumError> {
    check_pair(upper, lower, ext)?;
    if !lies_over(upper, lower, ext)? {
        return Err(not_lying_over(upper, lower));
    }
    Ok(fibre_multiplicity(upper, lower) <= n)
}

/// Membership of `pL` in each `Π_{K,L}` of the family, in order.
pub fn fingerprint(lower: &SplitPrime, family: &[Extension]) -> Result<Vec<bool>, SpectrumError> {
    family.iter().map(|ext| in_pi(ext, lower)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::tests::{ip, tower};
    use crate::lattice::Lattice;
    use alloc::vec;

    fn point(l: &Lattice, field: &str, p: u64, factor: &[u64]) -> SplitPrime {
        split_prime(l.field(field).unwrap(), p).into_iter().find(|s| s.local_factor == factor).unwrap()
    }

    #[test]
    fn split_examples() {
        let l = tower();
        let qi = l.field("Qi").unwrap();
        let s5 = split_prime(qi, 5);
        assert_eq!(s5.iter().map(|s| s.local_factor.clone()).collect::<Vec<_>>(), vec![vec![2, 1], vec![3, 1]]);
        assert!(s5.iter().all(|s| s.ramification == 1 && !s.ramified));
        let s3 = split_prime(qi, 3);
        assert_eq!(s3.len(), 1);
        assert_eq!(s3[0].residue_degree(), 2);
        let s2 = split_prime(qi, 2);
        assert_eq!(s2.len(), 1);
        assert_eq!(s2[0].local_factor, vec![1, 1]);
        assert_eq!(s2[0].ramification, 2);
        assert!(s2[0].ramified);
    }

    #[test]
    fn residue_examples() {
        let l = tower();
        let q = point(&l, "Qi", 5, &[3, 1]);
        let f = q.residue_field().unwrap();
        assert_eq!(q.residue_name(&f, &IntPoly::x()), f.scalar(2));
        assert_eq!(q.residue_name(&f, &IntPoly::constant(5)), f.zero());
        assert_eq!(q.residue_name(&f, &IntPoly::constant(1)), f.one());
    }

    #[test]
    fn lies_over_examples() {
        let l = tower();
        let qi_q = l.extension("Qi", "Q").unwrap();
        let inert = point(&l, "Qi", 3, &[1, 0, 1]);
        assert!(lies_over(&inert, &rational_point(3), &qi_q).unwrap());

        let q8_qi = l.extension("Q8", "Qi").unwrap();
        let upper = point(&l, "Q8", 5, &[2, 0, 1]);
        assert!(lies_over(&upper, &point(&l, "Qi", 5, &[2, 1]), &q8_qi).unwrap());
        assert!(!lies_over(&upper, &point(&l, "Qi", 5, &[3, 1]), &q8_qi).unwrap());
    }

    #[test]
    fn relative_degree_examples() {
        let l = tower();
        let qi_q = l.extension("Qi", "Q").unwrap();
        let inert = point(&l, "Qi", 3, &[1, 0, 1]);
        assert_eq!(relative_degree(&inert, &rational_point(3), &qi_q), Ok(2));
        let q8_qi = l.extension("Q8", "Qi").unwrap();
        for upper in split_prime(l.field("Q8").unwrap(), 3) {
            assert_eq!(relative_degree(&upper, &inert, &q8_qi), Ok(1));
        }
        let split = point(&l, "Qi", 5, &[2, 1]);
        assert_eq!(relative_degree(&split, &rational_point(5), &qi_q), Ok(1));
        assert!(matches!(
            relative_degree(&point(&l, "Q8", 5, &[2, 0, 1]), &point(&l, "Qi", 5, &[3, 1]), &q8_qi),
            Err(SpectrumError::NotLyingOver { .. })
        ));
    }

    #[test]
    fn pi_psi_examples() {
        let l = tower();
        let qi = l.extension("Qi", "Q").unwrap();
        let qc2 = l.extension("Qc2", "Q").unwrap();
        assert_eq!(in_pi(&qi, &rational_point(5)), Ok(true));
        assert_eq!(in_pi(&qi, &rational_point(3)), Ok(false));
        assert_eq!(in_pi(&qc2, &rational_point(5)), Ok(true));
        assert_eq!(in_pi(&qc2, &rational_point(7)), Ok(false));
        assert_eq!(in_psi(&qc2, &rational_point(31)), Ok(true));
        assert_eq!(in_psi(&qc2, &rational_point(5)), Ok(false));
        assert_eq!(in_psi(&qi, &rational_point(13)), Ok(true));
        assert!(matches!(
            in_pi(&qi, &rational_point(2)),
            Err(SpectrumError::Ramified { p: 2, reason: Exclusion::TopDiscriminant, .. })
        ));
    }

    #[test]
    fn pn_examples() {
        let l = tower();
        let qi = l.extension("Qi", "Q").unwrap();
        let inert = point(&l, "Qi", 3, &[1, 0, 1]);
        assert_eq!(pn_holds(&inert, &rational_point(3), &qi, 4), Ok(true));
        assert_eq!(pn_holds(&inert, &rational_point(3), &qi, 3), Ok(false));
        let split = point(&l, "Qi", 5, &[2, 1]);
        assert_eq!(pn_holds(&split, &rational_point(5), &qi, 1), Ok(true));
    }

    #[test]
    fn fingerprint_examples() {
        let l = tower();
        let fam = [l.extension("Qi", "Q").unwrap(), l.extension("Qs2", "Q").unwrap()];
        assert_eq!(fingerprint(&rational_point(7), &fam), Ok(vec![false, true]));
        assert_eq!(fingerprint(&rational_point(17), &fam), Ok(vec![true, true]));
        assert_eq!(fingerprint(&rational_point(3), &fam), Ok(vec![false, false]));
    }

    #[test]
    fn relative_route_over_a_quadratic_base() {
        let l = tower();
        let q8_qi = l.extension("Q8", "Qi").unwrap();
        // inert 3 of Qi: both Q8 points have F_9 = F_9
        let inert = point(&l, "Qi", 3, &[1, 0, 1]);
        assert_eq!(relative_splitting(&q8_qi, &inert), Ok(vec![1, 1]));
        // 5 splits in Qi, each Qi point has one Q8 point of relative degree 2
        assert_eq!(relative_splitting(&q8_qi, &point(&l, "Qi", 5, &[2, 1])), Ok(vec![2]));
    }

    #[test]
    fn degree_one_field_is_its_own_extension() {
        let mut b = crate::lattice::LatticeBuilder::new();
        b.add_field("L", ip(&[-3, 1]), false).unwrap();
        let l = b.build().unwrap();
        let ext = l.extension("L", "Q").unwrap();
        assert_eq!(in_pi(&ext, &rational_point(7)), Ok(true));
        assert_eq!(in_psi(&ext, &rational_point(7)), Ok(true));
    }

    fn good_primes(l: &Lattice, top: &str, base: &str, n: u64) -> Vec<u64> {
        let ext = l.extension(top, base).unwrap();
        crate::sieve::PrimeStream::up_to(n).filter(|&p| ext.exclusion(p).is_none()).collect()
    }

    fn base_points(l: &Lattice, base: &str, p: u64) -> Vec<SplitPrime> {
        if base == "Q" {
            vec![rational_point(p)]
        } else {
            split_prime(l.field(base).unwrap(), p)
        }
    }

    #[test]
    fn partition_identity() {
        let l = tower();
        for name in ["Qi", "Qs2", "Q8", "Qc2"] {
            let k = l.field(name).unwrap();
            for p in crate::sieve::PrimeStream::up_to(500) {
                let total: usize = split_prime(k, p).iter().map(|s| s.ramification * s.residue_degree()).sum();
                assert_eq!(total, k.degree(), "{name} at {p}");
            }
        }
    }

    #[test]
    fn residue_kernel_meets_integers_in_p() {
        let l = tower();
        for p in crate::sieve::PrimeStream::up_to(60) {
            for s in split_prime(l.field("Qc2").unwrap(), p) {
                let f = s.residue_field().unwrap();
                for c in -130i64..130 {
                    let zero = f.is_zero(&s.residue_name(&f, &IntPoly::constant(c)));
                    assert_eq!(zero, c.rem_euclid(p as i64) == 0);
                }
            }
        }
    }

    #[test]
    fn relative_and_absolute_routes_agree() {
        let l = tower();
        for (top, base) in [("Qi", "Q"), ("Qc2", "Q"), ("Q8", "Q"), ("Q8", "Qi"), ("Q8", "Qs2")] {
            let ext = l.extension(top, base).unwrap();
            for p in good_primes(&l, top, base, 400) {
                for lower in base_points(&l, base, p) {
                    let rel = relative_splitting(&ext, &lower).unwrap();
                    assert_eq!(rel, relative_splitting_absolute(&ext, &lower).unwrap(), "{top}/{base} at {lower}");
                    // every pK over pL contributes |pK : pL| to [K:L]
                    assert_eq!(rel.iter().sum::<usize>(), ext.degree(), "{top}/{base} at {lower}");
                }
            }
        }
    }

    #[test]
    fn psi_inside_pi_and_equal_for_galois_tops() {
        let l = tower();
        for (top, base) in [("Qi", "Q"), ("Qc2", "Q"), ("Q8", "Q"), ("Q8", "Qi")] {
            let ext = l.extension(top, base).unwrap();
            let galois = l.is_galois(top);
            for p in good_primes(&l, top, base, 2000) {
                for lower in base_points(&l, base, p) {
                    let (pi, psi) = (in_pi(&ext, &lower).unwrap(), in_psi(&ext, &lower).unwrap());
                    assert!(!psi || pi);
                    if galois {
                        assert_eq!(pi, psi, "{top}/{base} at {lower}");
                    }
                }
            }
        }
    }

    #[test]
    fn pn_one_is_residue_degree_one() {
        let l = tower();
        for (top, base) in [("Qi", "Q"), ("Q8", "Qi"), ("Qc2", "Q")] {
            let ext = l.extension(top, base).unwrap();
            for p in good_primes(&l, top, base, 300) {
                for lower in base_points(&l, base, p) {
                    for upper in primes_over(&ext, &lower).unwrap() {
                        let one = relative_degree(&upper, &lower, &ext).unwrap() == 1;
                        assert_eq!(pn_holds(&upper, &lower, &ext, 1).unwrap(), one);
                    }
                }
            }
        }
    }

    #[test]
    fn fingerprint_picks_out_pi_sets() {
        let l = tower();
        let fam = [l.extension("Qi", "Q").unwrap(), l.extension("Qs2", "Q").unwrap(), l.extension("Qc2", "Q").unwrap()];
        for p in crate::sieve::PrimeStream::new(5, 500, 64) {
            let bits = fingerprint(&rational_point(p), &fam).unwrap();
            for (bit, ext) in bits.iter().zip(&fam) {
                assert_eq!(*bit, in_pi(ext, &rational_point(p)).unwrap());
            }
            // Qi splits at p ≡ 1 mod 4, Qs2 at p ≡ ±1 mod 8
            assert_eq!(bits[0], p % 4 == 1);
            assert_eq!(bits[1], p % 8 == 1 || p % 8 == 7);
        }
    }
}
