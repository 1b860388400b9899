//! Fibres `Fb_pK` realised as residue-field values, the `O_K`-action, the
//! fibrewise norm projection `π_{K,L}`, the induced action, closed sets
//! `S_(γ)` and the Galois action on spectra.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ff::ext::Slots;
use crate::ff::{linalg, mix_words, poly, Field, FiniteField, FqElement, FqField, MAX_EXTENSION_DEGREE};
use crate::intpoly::{IntPoly, RatPoly};
use crate::lattice::{Exclusion, Extension, NumberField};
use crate::scan::{PrimeScan, Runner};
use crate::spectrum::{self, split_prime, SpectrumError, SplitPrime};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlaneError {
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("{0} lies over no prime of the base field")]
    NoBasePoint(String),
    #[error("hypothesis violated for {q}: {reason}")]
    HypothesisViolated { q: String, reason: String },
    #[error("no unique image of {0} under the automorphism")]
    NoImage(String),
    #[error("fibre point belongs to {found}, expected {expected}")]
    WrongFibre { expected: String, found: String },
}

/// A point of `A_K`: a value in the residue field of `prime`, zero being
/// the distinguished zero of the fibre.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FiberPoint {
    pub prime: SplitPrime,
    pub value: FqElement,
}

impl FiberPoint {
    pub fn new(prime: SplitPrime, value: FqElement) -> Self {
        Self { prime, value }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl fmt::Display for FiberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_zero() {
            write!(f, "0 @ {}", self.prime)
        } else {
            write!(f, "{} @ {}", self.value, self.prime)
        }
    }
}

/// A cross-section `pK ↦ a_pK` of nonzero base points.
pub trait Section {
    fn base_point(&self, prime: &SplitPrime, field: &FqField) -> FqElement;
}

/// `a_pK = 1` everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitSection;

impl Section for UnitSection {
    fn base_point(&self, _: &SplitPrime, field: &FqField) -> FqElement {
        field.one()
    }
}

/// A pseudo-random nonzero base point per prime, fixed by the seed.
#[derive(Debug, Clone, Copy)]
pub struct SeededSection {
    pub seed: u64,
}

impl Section for SeededSection {
    fn base_point(&self, prime: &SplitPrime, field: &FqField) -> FqElement {
        let name = prime.field.bytes().map(u64::from);
        let words = name.chain([prime.p]).chain(prime.local_factor.iter().copied());
        let mut rng = ChaCha8Rng::seed_from_u64(mix_words(self.seed, words));
        loop {
            let a = field.random(&mut rng);
            if !a.is_zero() {
                return a;
            }
        }
    }
}

/// `γ·x = res_pK(γ)·x`.
pub fn act(gamma: &IntPoly, x: &FiberPoint) -> Result<FiberPoint, PlaneError> {
    let field = x.prime.residue_field().map_err(SpectrumError::from)?;
    let value = field.mul(&x.value, &x.prime.residue_name(&field, gamma));
    Ok(FiberPoint::new(x.prime.clone(), value))
}

/// `π^Sp_{K,L}`: the unique point of `Sp_L` under `upper`.
pub fn spectral_projection(upper: &SplitPrime, ext: &Extension) -> Result<SplitPrime, PlaneError> {
    refuse_excluded(ext, upper.p)?;
    for lower in split_prime(&ext.base, upper.p) {
        if spectrum::lies_over(upper, &lower, ext)? {
            return Ok(lower);
        }
    }
    Err(PlaneError::NoBasePoint(upper.to_string()))
}

fn refuse_excluded(ext: &Extension, p: u64) -> Result<(), PlaneError> {
    match ext.exclusion(p) {
        Some(reason) => Err(SpectrumError::Ramified { p, extension: ext.name(), reason }.into()),
        None => Ok(()),
    }
}

/// The norm morphism between one fibre `Fb_pK` and the fibre `Fb_pL` under
/// it, with `F_pL` identified with a subfield of `F_pK` through `α_L ↦ h(α_K)`.
#[derive(Debug, Clone)]
pub struct FiberMap {
    upper: SplitPrime,
    lower: SplitPrime,
    upper_field: FqField,
    lower_field: FqField,
    /// `θ^j` for `j < deg pL`, where `θ = res_pK(h)`.
    theta_powers: Vec<FqElement>,
    /// Left inverse of the `θ^j` columns.
    pullback: Vec<Vec<u64>>,
    /// Columns of `x ↦ x^|pL|` on `F_pK` as an `F_p`-linear map.
    frobenius: Vec<Slots>,
    /// `|F_pK : F_pL|`.
    relative_degree: usize,
}

impl FiberMap {
    /// The map from the fibre of `upper` to the fibre of `π^Sp(upper)`.
    pub fn new(ext: &Extension, upper: SplitPrime) -> Result<Self, PlaneError> {
        let lower = spectral_projection(&upper, ext)?;
        Self::between(ext, upper, lower)
    }

    pub fn between(ext: &Extension, upper: SplitPrime, lower: SplitPrime) -> Result<Self, PlaneError> {
        refuse_excluded(ext, upper.p)?;
        if !spectrum::lies_over(&upper, &lower, ext)? {
            return Err(SpectrumError::NotLyingOver { upper: upper.to_string(), lower: lower.to_string() }.into());
        }
        let upper_field = upper.residue_field().map_err(SpectrumError::from)?;
        let lower_field = lower.residue_field().map_err(SpectrumError::from)?;
        let theta = spectrum::base_generator_residue(&upper, &upper_field, ext)?;
        let d = lower.residue_degree();
        let mut theta_powers = Vec::with_capacity(d);
        let mut acc = upper_field.one();
        for _ in 0..d {
            theta_powers.push(acc.clone());
            acc = upper_field.mul(&acc, &theta);
        }
        let columns: Vec<Vec<u64>> = theta_powers.iter().map(|e| e.coeffs().to_vec()).collect();
        let pullback = linalg::left_inverse(&upper_field.prime_field(), &columns, upper.residue_degree())
            .expect("powers of a generator of the subfield are independent");
        let q_lower = lower.norm();
        let frobenius = (0..upper.residue_degree())
            .map(|j| {
                let mut unit = vec![0u64; j + 1];
                unit[j] = 1;
                upper_field.load(&upper_field.pow(&upper_field.element(&unit), q_lower))
            })
            .collect();
        let relative_degree = upper.residue_degree() / d;
        Ok(Self { upper, lower, upper_field, lower_field, theta_powers, pullback, frobenius, relative_degree })
    }

    pub fn upper(&self) -> &SplitPrime {
        &self.upper
    }

    pub fn lower(&self) -> &SplitPrime {
        &self.lower
    }

    pub fn upper_field(&self) -> &FqField {
        &self.upper_field
    }

    pub fn lower_field(&self) -> &FqField {
        &self.lower_field
    }

    /// `F_pL → F_pK`.
    pub fn embed(&self, y: &FqElement) -> FqElement {
        let f = &self.upper_field;
        y.coeffs().iter().zip(&self.theta_powers).fold(f.zero(), |acc, (&c, t)| f.add(&acc, &f.mul(&f.scalar(c), t)))
    }

    /// Inverse of [`FiberMap::embed`] on its image; `None` off the subfield.
    pub fn restrict(&self, z: &FqElement) -> Option<FqElement> {
        let y = self.restrict_unchecked(z);
        (self.embed(&y) == *z).then_some(y)
    }

    fn restrict_unchecked(&self, z: &FqElement) -> FqElement {
        let fp = self.upper_field.prime_field();
        let coords: Vec<u64> = self
            .pullback
            .iter()
            .map(|row| row.iter().zip(z.coeffs()).fold(0, |acc, (a, b)| fp.add(&acc, &fp.mul(a, b))))
            .collect();
        FqElement::from_reduced(coords)
    }

    /// `Norm_{F_pK/F_pL}`, landing in `F_pL`.
    pub fn norm(&self, x: &FqElement) -> FqElement {
        if x.is_zero() {
            return self.lower_field.zero();
        }
        let y = self.restrict_slots(&self.norm_slots(&self.upper_field.load(x)));
        self.lower_field.store(&y)
    }

    /// Product of the conjugates `x·x^|pL|·x^|pL|²⋯`, which equals
    /// `x^((|pK|−1)/(|pL|−1))`.
    fn norm_slots(&self, x: &Slots) -> Slots {
        let uf = &self.upper_field;
        let fp = uf.prime_field();
        let m = self.upper.residue_degree();
        let mut acc = *x;
        let mut conj = *x;
        for _ in 1..self.relative_degree {
            let mut next = [0; MAX_EXTENSION_DEGREE];
            for (j, col) in self.frobenius.iter().enumerate() {
                if conj[j] != 0 {
                    for i in 0..m {
                        next[i] = fp.add(&next[i], &fp.mul(&conj[j], &col[i]));
                    }
                }
            }
            conj = next;
            acc = uf.mul_slots(&acc, &conj);
        }
        acc
    }

    fn restrict_slots(&self, z: &Slots) -> Slots {
        let fp = self.upper_field.prime_field();
        let mut y = [0; MAX_EXTENSION_DEGREE];
        for (yi, row) in y.iter_mut().zip(&self.pullback) {
            *yi = row.iter().zip(z).fold(0, |acc, (r, c)| fp.add(&acc, &fp.mul(r, c)));
        }
        y
    }

    /// `π(η·a_pK) = Norm(η)·a_pL` on raw values.
    pub fn project_value(&self, x: &FqElement, a_upper: &FqElement, a_lower: &FqElement) -> FqElement {
        let inv = self.upper_field.inv(a_upper).expect("base points are nonzero");
        self.project_with_inverse(x, &inv, a_lower)
    }

    fn project_with_inverse(&self, x: &FqElement, a_upper_inv: &FqElement, a_lower: &FqElement) -> FqElement {
        if x.is_zero() {
            return self.lower_field.zero();
        }
        let eta = self.upper_field.mul(x, a_upper_inv);
        self.lower_field.mul(&self.norm(&eta), a_lower)
    }

    pub fn project(&self, x: &FiberPoint, upper: &dyn Section, lower: &dyn Section) -> Result<FiberPoint, PlaneError> {
        self.expect_fibre(&self.upper, &x.prime)?;
        let a = upper.base_point(&self.upper, &self.upper_field);
        let b = lower.base_point(&self.lower, &self.lower_field);
        Ok(FiberPoint::new(self.lower.clone(), self.project_value(&x.value, &a, &b)))
    }

    /// `γ·b := Norm(res_pK(γ))·b` for `b` in the fibre under `pK`.
    pub fn induced_action(&self, gamma: &IntPoly, b: &FiberPoint) -> Result<FiberPoint, PlaneError> {
        self.expect_fibre(&self.lower, &b.prime)?;
        let g = self.upper.residue_name(&self.upper_field, gamma);
        Ok(FiberPoint::new(self.lower.clone(), self.lower_field.mul(&self.norm(&g), &b.value)))
    }

    /// The induced action computed the long way round: lift `b` to some
    /// `x` with `π(x) = b`, act on `x` upstairs, project back down.
    /// `table` is [`FiberMap::norm_preimages`]; `pick` chooses among lifts.
    pub fn induced_action_via_projection(
        &self,
        gamma: &IntPoly,
        b: &FiberPoint,
        upper: &dyn Section,
        lower: &dyn Section,
        table: &[Vec<FqElement>],
        pick: usize,
    ) -> Result<FiberPoint, PlaneError> {
        self.expect_fibre(&self.lower, &b.prime)?;
        let x = if b.is_zero() {
            self.upper_field.zero()
        } else {
            let a_l = lower.base_point(&self.lower, &self.lower_field);
            let beta = self.lower_field.mul(&b.value, &self.lower_field.inv(&a_l).unwrap());
            let lifts = &table[self.lower_field.encode(&beta) as usize];
            let eta = &lifts[pick % lifts.len()];
            self.upper_field.mul(eta, &upper.base_point(&self.upper, &self.upper_field))
        };
        let x = FiberPoint::new(self.upper.clone(), x);
        debug_assert_eq!(self.project(&x, upper, lower)?.value, b.value);
        self.project(&act(gamma, &x)?, upper, lower)
    }

    /// `|π⁻¹(y) ∩ Fb_pK|` from the closed formula.
    pub fn preimage_size(&self, y: &FiberPoint) -> Result<u128, PlaneError> {
        self.expect_fibre(&self.lower, &y.prime)?;
        Ok(if y.is_zero() { 1 } else { spectrum::fibre_multiplicity(&self.upper, &self.lower) })
    }

    /// Preimage counts of every `y ∈ Fb_pL` by enumerating `Fb_pK`, indexed
    /// by the integer encoding of `y`.
    pub fn preimage_counts(&self, upper: &dyn Section, lower: &dyn Section) -> Vec<u128> {
        let a = upper.base_point(&self.upper, &self.upper_field);
        let a_inv = self.upper_field.inv(&a).expect("base points are nonzero");
        let b = lower.base_point(&self.lower, &self.lower_field);
        let (uf, lf) = (&self.upper_field, &self.lower_field);
        let (a_inv, b) = (uf.load(&a_inv), lf.load(&b));
        let mut counts = vec![0u128; lf.order() as usize];
        counts[0] = 1;
        for code in 1..uf.order() {
            let eta = uf.mul_slots(&uf.decode_slots(code), &a_inv);
            let y = self.restrict_slots(&self.norm_slots(&eta));
            counts[lf.encode_slots(&lf.mul_slots(&y, &b)) as usize] += 1;
        }
        counts
    }

    /// For every `y ∈ F_pL`, all `η ∈ F_pK` with `Norm(η) = y`.
    pub fn norm_preimages(&self) -> Vec<Vec<FqElement>> {
        let mut table = vec![Vec::new(); self.lower_field.order() as usize];
        for x in self.upper_field.elements() {
            let y = self.norm(&x);
            table[self.lower_field.encode(&y) as usize].push(x);
        }
        table
    }

    fn expect_fibre(&self, expected: &SplitPrime, found: &SplitPrime) -> Result<(), PlaneError> {
        if expected != found {
            return Err(PlaneError::WrongFibre { expected: expected.to_string(), found: found.to_string() });
        }
        Ok(())
    }
}

/// `π_{K,L}(x)` with the given sections.
pub fn project(
    x: &FiberPoint,
    ext: &Extension,
    upper: &dyn Section,
    lower: &dyn Section,
) -> Result<FiberPoint, PlaneError> {
    FiberMap::new(ext, x.prime.clone())?.project(x, upper, lower)
}

/// Induced action of `γ ∈ O_K` on `b ∈ Fb_pL` through `pK` over `pL`.
pub fn induced_action(
    gamma: &IntPoly,
    b: &FiberPoint,
    upper: &SplitPrime,
    ext: &Extension,
) -> Result<FiberPoint, PlaneError> {
    FiberMap::between(ext, upper.clone(), b.prime.clone())?.induced_action(gamma, b)
}

pub fn preimage_size(y: &FiberPoint, upper: &SplitPrime, ext: &Extension) -> Result<u128, PlaneError> {
    FiberMap::between(ext, upper.clone(), y.prime.clone())?.preimage_size(y)
}

/// The local factor of `pK` lifted to `O_K`: it lies in `pK` and in no
/// other point over the same rational prime.
pub fn separating_element(prime: &SplitPrime) -> IntPoly {
    IntPoly::new(prime.local_factor.iter().map(|&c| c as i64).collect())
}

/// Some `γ` with `γ·x = x'` for nonzero `x, x'` in the same fibre.
pub fn transporter(x: &FiberPoint, target: &FiberPoint) -> Result<Option<IntPoly>, PlaneError> {
    if x.prime != target.prime {
        return Err(PlaneError::WrongFibre { expected: x.prime.to_string(), found: target.prime.to_string() });
    }
    let field = x.prime.residue_field().map_err(SpectrumError::from)?;
    let Some(inv) = field.inv(&x.value) else {
        return Ok(None);
    };
    let ratio = field.mul(&target.value, &inv);
    Ok(Some(IntPoly::new(ratio.coeffs().iter().map(|&c| c as i64).collect())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaloisMode {
    /// Transport the local factor's root through the automorphism.
    Direct,
    /// Search fibre pairs for a witness of the defining formula.
    BruteForce,
}

/// Whether `σ` restricts to the identity on `L`.
pub fn fixes_base(ext: &Extension, sigma: &RatPoly) -> bool {
    ext.image.compose_mod(sigma, ext.top.poly()).is_ok_and(|img| img == ext.image)
}

/// The automorphisms among `autos` that fix `L`, i.e. `Gal(K/L)` when
/// `autos` is the full group of `K`.
pub fn relative_group(ext: &Extension, autos: &[RatPoly]) -> Vec<RatPoly> {
    autos.iter().filter(|s| fixes_base(ext, s)).cloned().collect()
}

/// The image `q^σ` of a point of `Sp_K` under an automorphism `σ` of `K`
/// fixing `L`, given as the image `σ(α_K)`.
pub fn galois_image(
    ext: &Extension,
    sigma: &RatPoly,
    q: &SplitPrime,
    mode: GaloisMode,
) -> Result<SplitPrime, PlaneError> {
    let p = q.p;
    refuse_excluded(ext, p)?;
    if sigma.has_denominator_divisible_by(p) {
        return Err(SpectrumError::Ramified { p, extension: ext.name(), reason: Exclusion::Denominator }.into());
    }
    if !fixes_base(ext, sigma) {
        return Err(PlaneError::HypothesisViolated {
            q: q.to_string(),
            reason: format!("automorphism does not fix {}", ext.base.name()),
        });
    }
    match mode {
        GaloisMode::Direct => galois_direct(ext, sigma, q),
        GaloisMode::BruteForce => galois_brute_force(ext, sigma, q),
    }
}

fn galois_direct(ext: &Extension, sigma: &RatPoly, q: &SplitPrime) -> Result<SplitPrime, PlaneError> {
    let mut found = Vec::new();
    for cand in split_prime(&ext.top, q.p) {
        let field = cand.residue_field().map_err(SpectrumError::from)?;
        let r = cand.residue_name_rat(&field, sigma)?;
        let g: Vec<FqElement> = q.local_factor.iter().map(|&c| field.scalar(c)).collect();
        if field.is_zero(&poly::eval(&field, &g, &r)) {
            found.push(cand);
        }
    }
    single(found, q)
}

fn galois_brute_force(ext: &Extension, sigma: &RatPoly, q: &SplitPrime) -> Result<SplitPrime, PlaneError> {
    let lower = spectral_projection(q, ext)?;
    if !spectrum::in_psi(ext, &lower)? {
        return Err(PlaneError::HypothesisViolated {
            q: q.to_string(),
            reason: format!("{lower} is not in Psi({})", ext.name()),
        });
    }
    let here = FiberMap::between(ext, q.clone(), lower.clone())?;
    let alpha = here.upper_field.generator();
    let mut found = Vec::new();
    for cand in spectrum::primes_over(ext, &lower)? {
        let there = FiberMap::between(ext, cand.clone(), lower.clone())?;
        let s = cand.residue_name_rat(&there.upper_field, sigma)?;
        let one_u = there.upper_field.one();
        let one_l = there.lower_field.one();
        let pr = |m: &FiberMap, x: &FqElement| m.project_with_inverse(x, &one_u, &one_l);
        let mut buckets: BTreeMap<u128, Vec<FqElement>> = BTreeMap::new();
        for x in there.upper_field.elements().skip(1) {
            let key = there.lower_field.encode(&pr(&there, &x));
            buckets.entry(key).or_default().push(x);
        }
        let witnessed = here.upper_field.elements().skip(1).any(|x| {
            let key = here.lower_field.encode(&pr(&here, &x));
            let target = pr(&here, &here.upper_field.mul(&alpha, &x));
            buckets.get(&key).is_some_and(|xs| xs.iter().any(|x2| pr(&there, &there.upper_field.mul(&s, x2)) == target))
        });
        if witnessed {
            found.push(cand);
        }
    }
    single(found, q)
}

fn single(mut found: Vec<SplitPrime>, q: &SplitPrime) -> Result<SplitPrime, PlaneError> {
    if found.len() == 1 {
        Ok(found.pop().unwrap())
    } else {
        Err(PlaneError::NoImage(q.to_string()))
    }
}

struct AnnihilatorScan<'a> {
    gamma: &'a IntPoly,
    field: &'a NumberField,
}

impl PrimeScan for AnnihilatorScan<'_> {
    type Acc = Vec<SplitPrime>;

    fn init(&self) -> Self::Acc {
        Vec::new()
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        for q in split_prime(self.field, p) {
            let f = q.residue_field().expect("local factor degree within limits");
            if q.residue_name(&f, self.gamma).is_zero() {
                acc.push(q);
            }
        }
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        acc.extend(later);
    }
}

/// Points `pK` with `p ≤ n` and `γ ∈ pK`, i.e. `S_(γ)` truncated at `n`.
pub fn annihilator_set<R: Runner>(gamma: &IntPoly, field: &NumberField, n: u64, runner: &R) -> Vec<SplitPrime> {
    runner.run(&AnnihilatorScan { gamma, field }, n)
}

/// Outcome of comparing enumerated norm fibres with the closed formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormFiberReport {
    pub points: u64,
    /// Points whose fibre was enumerated in full.
    pub enumerated: u64,
    /// Nonzero `y` whose preimage count was compared.
    pub fibres: u64,
    pub mismatches: Vec<String>,
    pub excluded: Vec<(u64, Exclusion)>,
}

impl NormFiberReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn absorb(&mut self, later: Self) {
        self.points += later.points;
        self.enumerated += later.enumerated;
        self.fibres += later.fibres;
        self.mismatches.extend(later.mismatches);
        self.excluded.extend(later.excluded);
    }
}

struct NormFiberScan<'a> {
    ext: &'a Extension,
    enum_limit: u128,
}

impl PrimeScan for NormFiberScan<'_> {
    type Acc = NormFiberReport;

    fn init(&self) -> Self::Acc {
        NormFiberReport::default()
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        if let Some(reason) = self.ext.exclusion(p) {
            acc.excluded.push((p, reason));
            return;
        }
        for upper in split_prime(&self.ext.top, p) {
            acc.points += 1;
            if upper.norm() > self.enum_limit {
                continue;
            }
            let map = match FiberMap::new(self.ext, upper.clone()) {
                Ok(m) => m,
                Err(e) => {
                    acc.mismatches.push(format!("{upper}: {e}"));
                    continue;
                }
            };
            acc.enumerated += 1;
            let counts = map.preimage_counts(&UnitSection, &UnitSection);
            let expected = spectrum::fibre_multiplicity(map.upper(), map.lower());
            if counts[0] != 1 {
                acc.mismatches.push(format!("{upper}: zero has {} preimages", counts[0]));
            }
            for (code, &c) in counts.iter().enumerate().skip(1) {
                acc.fibres += 1;
                if c != expected {
                    let y = map.lower_field().decode(code as u128);
                    acc.mismatches.push(format!("{upper}: y = {y} has {c} preimages, expected {expected}"));
                }
            }
            let total: u128 = counts[1..].iter().sum();
            if total != upper.norm() - 1 {
                acc.mismatches.push(format!("{upper}: nonzero fibres hold {total} points"));
            }
        }
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        acc.absorb(later);
    }
}

/// Enumerates `π⁻¹(y)` for every nonzero `y` under every unexcluded
/// `pK` with `p ≤ n` and `|pK| ≤ enum_limit`.
pub fn check_norm_fiber<R: Runner>(ext: &Extension, n: u64, enum_limit: u128, runner: &R) -> NormFiberReport {
    runner.run(&NormFiberScan { ext, enum_limit }, n)
}

/// All `γ = Σ cᵢ αⁱ` with `i < degree` and `|cᵢ| ≤ radius`.
pub fn gamma_box(degree: usize, radius: i64) -> impl Iterator<Item = IntPoly> {
    let side = (2 * radius + 1) as u64;
    let count = side.pow(degree as u32);
    (0..count).map(move |mut n| {
        let coeffs = (0..degree)
            .map(|_| {
                let c = (n % side) as i64 - radius;
                n /= side;
                c
            })
            .collect();
        IntPoly::new(coeffs)
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SectionReport {
    pub points: u64,
    pub comparisons: u64,
    pub mismatches: Vec<String>,
    pub excluded: Vec<(u64, Exclusion)>,
}

impl SectionReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Parameters for [`check_section_independence`].
#[derive(Debug, Clone, Copy)]
pub struct SectionTrials {
    /// Random re-choices of both sections per point.
    pub trials: u32,
    /// Box radius for `γ`.
    pub radius: i64,
    pub seed: u64,
    /// Skip points with larger residue fields.
    pub table_limit: u128,
}

struct SectionScan<'a> {
    ext: &'a Extension,
    cfg: SectionTrials,
}

impl SectionScan<'_> {
    fn visit_point(&self, map: &FiberMap, acc: &mut SectionReport) -> Result<(), PlaneError> {
        let table = map.norm_preimages();
        let words = [map.upper().p].into_iter().chain(map.upper().local_factor.iter().copied());
        let mut rng = ChaCha8Rng::seed_from_u64(mix_words(self.cfg.seed, words));
        let lf = map.lower_field();
        for _ in 0..self.cfg.trials {
            let su = SeededSection { seed: rng.random() };
            let sl = SeededSection { seed: rng.random() };
            for gamma in gamma_box(self.ext.top.degree(), self.cfg.radius) {
                let b = loop {
                    let v = lf.random(&mut rng);
                    if !v.is_zero() {
                        break FiberPoint::new(map.lower().clone(), v);
                    }
                };
                let pick = rng.random::<u32>() as usize;
                let formula = map.induced_action(&gamma, &b)?;
                let random = map.induced_action_via_projection(&gamma, &b, &su, &sl, &table, pick)?;
                let unit = map.induced_action_via_projection(&gamma, &b, &UnitSection, &UnitSection, &table, 0)?;
                acc.comparisons += 1;
                if random != formula || unit != formula {
                    acc.mismatches.push(format!(
                        "{}: gamma = {gamma}, b = {}: formula {}, unit sections {}, random sections {}",
                        map.upper(),
                        b.value,
                        formula.value,
                        unit.value,
                        random.value
                    ));
                }
            }
        }
        Ok(())
    }
}

impl PrimeScan for SectionScan<'_> {
    type Acc = SectionReport;

    fn init(&self) -> Self::Acc {
        SectionReport::default()
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        if let Some(reason) = self.ext.exclusion(p) {
            acc.excluded.push((p, reason));
            return;
        }
        for upper in split_prime(&self.ext.top, p) {
            if upper.norm() > self.cfg.table_limit {
                continue;
            }
            acc.points += 1;
            let result = FiberMap::new(self.ext, upper.clone()).and_then(|map| self.visit_point(&map, acc));
            if let Err(e) = result {
                acc.mismatches.push(format!("{upper}: {e}"));
            }
        }
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        acc.points += later.points;
        acc.comparisons += later.comparisons;
        acc.mismatches.extend(later.mismatches);
        acc.excluded.extend(later.excluded);
    }
}

/// Compares the induced action computed through random lifts and random
/// sections against `Norm(res γ)·b`.
pub fn check_section_independence<R: Runner>(ext: &Extension, n: u64, cfg: SectionTrials, runner: &R) -> SectionReport {
    runner.run(&SectionScan { ext, cfg }, n)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GaloisModesReport {
    pub comparisons: u64,
    /// Rational primes skipped because they are not in `Ψ`.
    pub outside_psi: u64,
    pub disagreements: Vec<String>,
    pub excluded: Vec<u64>,
}

struct GaloisModesScan<'a> {
    ext: &'a Extension,
    automorphisms: &'a [RatPoly],
}

impl PrimeScan for GaloisModesScan<'_> {
    type Acc = GaloisModesReport;

    fn init(&self) -> Self::Acc {
        GaloisModesReport::default()
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        if self.ext.exclusion(p).is_some() || self.automorphisms.iter().any(|s| s.has_denominator_divisible_by(p)) {
            acc.excluded.push(p);
            return;
        }
        for lower in split_prime(&self.ext.base, p) {
            if !spectrum::in_psi(self.ext, &lower).unwrap_or(false) {
                acc.outside_psi += 1;
                continue;
            }
            for q in spectrum::primes_over(self.ext, &lower).unwrap_or_default() {
                for sigma in self.automorphisms {
                    acc.comparisons += 1;
                    let direct = galois_image(self.ext, sigma, &q, GaloisMode::Direct);
                    let brute = galois_image(self.ext, sigma, &q, GaloisMode::BruteForce);
                    if direct != brute || direct.is_err() {
                        acc.disagreements.push(format!("{q} under {sigma}: direct {direct:?}, brute force {brute:?}"));
                    }
                }
            }
        }
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        acc.comparisons += later.comparisons;
        acc.outside_psi += later.outside_psi;
        acc.disagreements.extend(later.disagreements);
        acc.excluded.extend(later.excluded);
    }
}

/// Runs both Galois modes on every point over `Ψ` primes up to `n`.
pub fn check_galois_modes<R: Runner>(
    ext: &Extension,
    automorphisms: &[RatPoly],
    n: u64,
    runner: &R,
) -> GaloisModesReport {
    runner.run(&GaloisModesScan { ext, automorphisms }, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intpoly::resultant;
    use crate::lattice::tests::{ip, rat, tower};
    use crate::lattice::Lattice;
    use crate::scan::Serial;
    use crate::spectrum::rational_point;
    use proptest::prelude::*;

    fn point(l: &Lattice, field: &str, p: u64, factor: &[u64]) -> SplitPrime {
        split_prime(l.field(field).unwrap(), p).into_iter().find(|s| s.local_factor == factor).unwrap()
    }

    fn fp(prime: &SplitPrime, coeffs: &[u64]) -> FiberPoint {
        let f = prime.residue_field().unwrap();
        FiberPoint::new(prime.clone(), f.element(coeffs))
    }

    #[test]
    fn act_examples() {
        let l = tower();
        let q = point(&l, "Qi", 5, &[3, 1]);
        let x = fp(&q, &[1]);
        assert_eq!(act(&IntPoly::x(), &x).unwrap().value.as_scalar(), Some(2));
        assert!(act(&IntPoly::constant(5), &x).unwrap().is_zero());
        assert_eq!(act(&IntPoly::constant(1), &x).unwrap(), x);
    }

    #[test]
    fn project_examples() {
        let l = tower();
        let ext = l.extension("Qi", "Q").unwrap();
        let inert = point(&l, "Qi", 3, &[1, 0, 1]);
        let down = project(&fp(&inert, &[1]), &ext, &UnitSection, &UnitSection).unwrap();
        assert_eq!(down.prime, rational_point(3));
        assert_eq!(down.value.as_scalar(), Some(1));
        let down = project(&fp(&inert, &[1, 1]), &ext, &UnitSection, &UnitSection).unwrap();
        assert_eq!(down.value.as_scalar(), Some(2));
        assert!(project(&fp(&inert, &[]), &ext, &UnitSection, &UnitSection).unwrap().is_zero());
    }

    #[test]
    fn induced_action_examples() {
        let l = tower();
        let ext = l.extension("Qi", "Q").unwrap();
        let inert = point(&l, "Qi", 3, &[1, 0, 1]);
        let b = fp(&rational_point(3), &[1]);
        assert_eq!(induced_action(&IntPoly::x(), &b, &inert, &ext).unwrap(), b);
        assert_eq!(induced_action(&ip(&[1, 1]), &b, &inert, &ext).unwrap().value.as_scalar(), Some(2));
        assert!(induced_action(&IntPoly::constant(3), &b, &inert, &ext).unwrap().is_zero());
        let wrong = fp(&rational_point(5), &[1]);
        assert!(induced_action(&IntPoly::x(), &wrong, &inert, &ext).is_err());
    }

    #[test]
    fn preimage_size_examples() {
        let l = tower();
        let ext = l.extension("Qi", "Q").unwrap();
        let inert = point(&l, "Qi", 3, &[1, 0, 1]);
        assert_eq!(preimage_size(&fp(&rational_point(3), &[2]), &inert, &ext), Ok(4));
        let split = point(&l, "Qi", 5, &[2, 1]);
        assert_eq!(preimage_size(&fp(&rational_point(5), &[3]), &split, &ext), Ok(1));
        assert_eq!(preimage_size(&fp(&rational_point(3), &[]), &inert, &ext), Ok(1));
        // enumeration of F_9 → F_3
        let map = FiberMap::new(&ext, inert).unwrap();
        assert_eq!(map.preimage_counts(&UnitSection, &UnitSection), vec![1, 4, 4]);
    }

    #[test]
    fn norm_is_the_power_map() {
        let l = tower();
        for (top, base) in [("Qi", "Q"), ("Q8", "Qi"), ("Q8", "Q"), ("Qc2", "Q")] {
            let ext = l.extension(top, base).unwrap();
            for p in [5u64, 7, 11, 13] {
                for upper in split_prime(&ext.top, p) {
                    let map = FiberMap::new(&ext, upper).unwrap();
                    let sub = map.lower().residue_degree();
                    for x in map.upper_field().elements() {
                        let direct = map.upper_field().norm(&x, sub).unwrap();
                        assert_eq!(map.embed(&map.norm(&x)), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn fast_preimage_counts_match_elementwise_projection() {
        let l = tower();
        for (top, base) in [("Qi", "Q"), ("Q8", "Qi"), ("Qc2", "Q")] {
            let ext = l.extension(top, base).unwrap();
            for p in [5u64, 7, 13, 17, 31] {
                for upper in split_prime(&ext.top, p) {
                    let map = FiberMap::new(&ext, upper).unwrap();
                    let (su, sl) = (SeededSection { seed: 3 }, SeededSection { seed: 4 });
                    let mut slow = vec![0u128; map.lower_field().order() as usize];
                    for x in map.upper_field().elements() {
                        let y = map.project(&FiberPoint::new(map.upper().clone(), x), &su, &sl).unwrap();
                        slow[map.lower_field().encode(&y.value) as usize] += 1;
                    }
                    assert_eq!(map.preimage_counts(&su, &sl), slow);
                }
            }
        }
    }

    #[test]
    fn relative_fibres_over_a_quadratic_base() {
        let l = tower();
        let ext = l.extension("Q8", "Qi").unwrap();
        for p in [3u64, 5, 7, 11, 13, 17] {
            for upper in split_prime(l.field("Q8").unwrap(), p) {
                let map = FiberMap::new(&ext, upper.clone()).unwrap();
                let expected = spectrum::fibre_multiplicity(map.upper(), map.lower());
                let counts = map.preimage_counts(&SeededSection { seed: p }, &SeededSection { seed: 1 });
                assert_eq!(counts[0], 1);
                assert!(counts[1..].iter().all(|&c| c == expected), "{upper}");
                // the subfield embedding is a section of restriction
                for y in map.lower_field().elements() {
                    assert_eq!(map.restrict(&map.embed(&y)), Some(y));
                }
            }
        }
    }

    #[test]
    fn galois_examples() {
        let l = tower();
        let ext = l.extension("Qi", "Q").unwrap();
        let conj = rat(&[0, -1]);
        let q = point(&l, "Qi", 5, &[3, 1]);
        for mode in [GaloisMode::Direct, GaloisMode::BruteForce] {
            assert_eq!(galois_image(&ext, &conj, &q, mode).unwrap().local_factor, vec![2, 1]);
            assert_eq!(galois_image(&ext, &RatPoly::x(), &q, mode).unwrap(), q);
        }
        let inert = point(&l, "Qi", 3, &[1, 0, 1]);
        assert_eq!(galois_image(&ext, &conj, &inert, GaloisMode::Direct).unwrap(), inert);
        assert!(matches!(
            galois_image(&ext, &conj, &inert, GaloisMode::BruteForce),
            Err(PlaneError::HypothesisViolated { .. })
        ));
        let group = |l: &Lattice, top: &str, base: &str| {
            let ext = l.extension(top, base).unwrap();
            (relative_group(&ext, l.automorphisms(top).unwrap()).len(), ext.degree())
        };
        assert_eq!(group(&l, "Q8", "Qi"), (2, 2));
        assert_eq!(group(&l, "Q8", "Q"), (4, 4));
        let s3 = crate::chebotarev::tests::with_s3();
        assert_eq!(group(&s3, "S3", "Qc2"), (2, 2));
        assert_eq!(group(&s3, "S3", "Q"), (6, 6));
    }

    #[test]
    fn galois_requires_fixing_the_base() {
        let l = tower();
        let ext = l.extension("Q8", "Qi").unwrap();
        // x ↦ −x fixes i = x²; x ↦ x³ sends i to −i
        let q = split_prime(l.field("Q8").unwrap(), 17).remove(0);
        assert!(galois_image(&ext, &rat(&[0, -1]), &q, GaloisMode::Direct).is_ok());
        assert!(matches!(
            galois_image(&ext, &rat(&[0, 0, 0, 1]), &q, GaloisMode::Direct),
            Err(PlaneError::HypothesisViolated { .. })
        ));
    }

    #[test]
    fn galois_modes_agree_on_small_primes() {
        let l = tower();
        for (top, base) in [("Qi", "Q"), ("Q8", "Q"), ("Q8", "Qi")] {
            let ext = l.extension(top, base).unwrap();
            let autos: Vec<RatPoly> = l
                .automorphisms(top)
                .unwrap()
                .iter()
                .filter(|s| ext.image.compose_mod(s, ext.top.poly()).unwrap() == ext.image)
                .cloned()
                .collect();
            let report = check_galois_modes(&ext, &autos, 120, &Serial);
            assert!(report.comparisons > 0);
            assert!(report.disagreements.is_empty(), "{:?}", report.disagreements);
        }
    }

    #[test]
    fn galois_action_permutes_points() {
        let l = tower();
        let ext = l.extension("Q8", "Q").unwrap();
        for p in [3u64, 5, 7, 17, 41] {
            let points = split_prime(l.field("Q8").unwrap(), p);
            for sigma in l.automorphisms("Q8").unwrap() {
                let mut images: Vec<SplitPrime> =
                    points.iter().map(|q| galois_image(&ext, sigma, q, GaloisMode::Direct).unwrap()).collect();
                images.sort();
                assert_eq!(images, points);
            }
        }
    }

    #[test]
    fn annihilator_examples() {
        let l = tower();
        let qi = l.field("Qi").unwrap();
        let s = annihilator_set(&ip(&[2, 1]), qi, 100, &Serial);
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].p, s[0].local_factor.clone()), (5, vec![2, 1]));
        let s = annihilator_set(&IntPoly::constant(3), qi, 100, &Serial);
        assert_eq!(s, split_prime(qi, 3));
        assert!(annihilator_set(&IntPoly::constant(1), qi, 100, &Serial).is_empty());
    }

    fn trial_division_primes(mut n: u128) -> Vec<u64> {
        let mut out = Vec::new();
        let mut d = 2u128;
        while d * d <= n {
            if n.is_multiple_of(d) {
                out.push(d as u64);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n as u64);
        }
        out
    }

    #[test]
    fn annihilator_support_matches_absolute_norm() {
        let l = tower();
        for name in ["Qi", "Qc2", "Q8"] {
            let k = l.field(name).unwrap();
            for gamma in [ip(&[2, 1]), ip(&[3, -1, 1]), ip(&[7]), ip(&[1, 1]), ip(&[5, 0, 2])] {
                let norm = resultant(k.poly(), &gamma).unwrap().unsigned_abs();
                let bound = 10_000;
                let mut expected: Vec<u64> = trial_division_primes(norm).into_iter().filter(|&p| p <= bound).collect();
                let mut got: Vec<u64> = annihilator_set(&gamma, k, bound, &Serial).iter().map(|q| q.p).collect();
                expected.dedup();
                got.dedup();
                assert_eq!(got, expected, "{name}, {gamma}");
            }
        }
    }

    #[test]
    fn norm_fibres_match_formula() {
        let l = tower();
        for (top, base) in [("Qi", "Q"), ("Qc2", "Q"), ("Q8", "Qi"), ("Q8", "Qs2"), ("Q8", "Q")] {
            let ext = l.extension(top, base).unwrap();
            let report = check_norm_fiber(&ext, 60, 10_000, &Serial);
            assert!(report.enumerated > 0);
            assert!(report.passed(), "{top}/{base}: {:?}", report.mismatches);
        }
    }

    #[test]
    fn induced_action_is_section_independent() {
        let l = tower();
        let cfg = SectionTrials { trials: 4, radius: 2, seed: 7, table_limit: 10_000 };
        for (top, base) in [("Qi", "Q"), ("Q8", "Qi")] {
            let ext = l.extension(top, base).unwrap();
            let report = check_section_independence(&ext, 30, cfg, &Serial);
            assert!(report.comparisons > 0);
            assert!(report.passed(), "{:?}", report.mismatches);
        }
    }

    #[test]
    fn induced_action_on_base_elements() {
        // for γ ∈ O_L the induced action is b ↦ γ̄^f·b with f = |F_pK : F_pL|,
        // the action of O_L exactly when f = 1
        let l = tower();
        let ext = l.extension("Q8", "Qi").unwrap();
        for p in [3u64, 5, 13] {
            for upper in split_prime(l.field("Q8").unwrap(), p) {
                let map = FiberMap::new(&ext, upper).unwrap();
                for c in [ip(&[1, 1]), ip(&[2, -1]), ip(&[0, 3])] {
                    // c(α_L) seen in K is c(h(α_K)) = c(α_K²)
                    let in_k = ip(&c.coeffs().iter().enumerate().fold(vec![0i64; 3], |mut v, (i, &a)| {
                        v[2 * i] += a;
                        v
                    }));
                    let b = fp(map.lower(), &[1, 2]);
                    let f = spectrum::relative_degree(map.upper(), map.lower(), &ext).unwrap();
                    let lf = map.lower_field();
                    let gbar = map.lower().residue_name(lf, &c);
                    let expected = FiberPoint::new(b.prime.clone(), lf.mul(&lf.pow(&gbar, f as u128), &b.value));
                    let induced = map.induced_action(&in_k, &b).unwrap();
                    assert_eq!(induced, expected);
                    if f == 1 {
                        assert_eq!(induced, act(&c, &b).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn action_separates_points() {
        let l = tower();
        for (top, base) in [("Q8", "Qi"), ("Qc2", "Q"), ("Q8", "Q")] {
            let ext = l.extension(top, base).unwrap();
            for p in crate::sieve::PrimeStream::up_to(200).filter(|&p| ext.exclusion(p).is_none()) {
                for lower in split_prime(&ext.base, p) {
                    let uppers = spectrum::primes_over(&ext, &lower).unwrap();
                    let b = fp(&lower, &[1]);
                    for q in &uppers {
                        let gamma = separating_element(q);
                        for q2 in &uppers {
                            let kills = induced_action(&gamma, &b, q2, &ext).unwrap().is_zero();
                            assert_eq!(kills, q == q2, "{q} vs {q2}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn orbits_are_transitive() {
        let l = tower();
        for p in [3u64, 5, 7, 11] {
            for q in split_prime(l.field("Qi").unwrap(), p) {
                let f = q.residue_field().unwrap();
                let nonzero: Vec<FqElement> = f.elements().skip(1).collect();
                for x in &nonzero {
                    for y in &nonzero {
                        let (x, y) = (FiberPoint::new(q.clone(), x.clone()), FiberPoint::new(q.clone(), y.clone()));
                        // discrete search over a box of γ
                        let found = gamma_box(2, p as i64).find(|g| act(g, &x).unwrap() == y);
                        assert!(found.is_some());
                        let t = transporter(&x, &y).unwrap().unwrap();
                        assert_eq!(act(&t, &x).unwrap(), y);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn projection_is_equivariant(
            pi in 0usize..12,
            c in proptest::collection::vec(-20i64..20, 4),
            v in proptest::collection::vec(0u64..1000, 4),
            seeds in (any::<u64>(), any::<u64>()),
        ) {
            let l = tower();
            let ext = l.extension("Q8", "Qi").unwrap();
            let p = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41][pi];
            let gamma = IntPoly::new(c);
            let (su, sl) = (SeededSection { seed: seeds.0 }, SeededSection { seed: seeds.1 });
            for upper in split_prime(l.field("Q8").unwrap(), p) {
                let map = FiberMap::new(&ext, upper.clone()).unwrap();
                let x = FiberPoint::new(upper, map.upper_field().element(&v));
                let lhs = map.project(&act(&gamma, &x).unwrap(), &su, &sl).unwrap();
                let rhs = map.induced_action(&gamma, &map.project(&x, &su, &sl).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
