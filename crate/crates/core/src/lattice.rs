//! The declared lattice of number fields: defining polynomials, embeddings,
//! automorphism groups and Galois closures.
//!
//! Every field is the monogenic order `Z[α]` of a monic integer polynomial.
//! The base field `Q` (polynomial `x`) is always present and embeds into
//! every field by the constant `0`. Nothing here factors over `Q`: closures
//! and composita are declared, and the builder certifies the declarations.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::arith;
use crate::ff::{factor, PrimeField};
use crate::intpoly::{self, IntPoly, PolyError, RatPoly};

/// Name of the implicit base field.
pub const BASE_FIELD: &str = "Q";

/// Primes tried when looking for an irreducibility certificate.
pub const CERTIFICATE_PRIME_BOUND: u64 = 200;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("field `{0}` declared twice")]
    DuplicateField(String),
    #[error("`Q` is the implicit base field and cannot be redeclared")]
    ReservedName,
    #[error("defining polynomial of `{0}` must be monic of degree at least 1")]
    NotMonic(String),
    #[error("arithmetic overflow while processing `{0}`")]
    Overflow(String),
    #[error("no prime up to {CERTIFICATE_PRIME_BOUND} certifies `{0}` irreducible; mark it trusted")]
    IrreducibilityUnproven(String),
    #[error("degree of `{src}` does not divide degree of `{dst}`")]
    DegreeMismatch { src: String, dst: String },
    #[error("embedding {src} -> {dst} does not map a root of {src} to a root")]
    EmbeddingInvalid { src: String, dst: String },
    #[error("embedding {src} -> {dst} declared twice")]
    DuplicateEmbedding { src: String, dst: String },
    #[error("embedding graph has a cycle through `{0}`")]
    EmbeddingCycle(String),
    #[error("embeddings {src} -> {mid} -> {dst} compose to a map different from the declared {src} -> {dst}")]
    EmbeddingInconsistent { src: String, mid: String, dst: String },
    #[error("no embedding path from `{src}` to `{dst}`")]
    NoEmbeddingPath { src: String, dst: String },
    #[error("automorphism of `{0}` does not map the generator to a root")]
    AutomorphismInvalid(String),
    #[error("automorphism of `{0}` is not invertible")]
    AutomorphismNotInvertible(String),
    #[error("automorphisms of `{0}` are not closed under composition")]
    GroupNotClosed(String),
    #[error("`{field}` asserted Galois but has {count} automorphisms for degree {degree}")]
    GaloisAssertion { field: String, count: usize, degree: usize },
    #[error("closure `{closure}` of `{field}` is not Galois or does not contain `{field}`")]
    ClosureInvalid { field: String, closure: String },
}

/// How irreducibility over `Q` was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Degree one.
    Linear,
    /// Irreducible modulo this prime.
    IrreducibleMod(u64),
    /// Accepted on the user's word.
    Trusted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberField {
    name: String,
    poly: IntPoly,
    disc: i128,
    certificate: Certificate,
}

impl NumberField {
    pub fn new(name: &str, poly: IntPoly, trusted: bool) -> Result<Self, LatticeError> {
        if !poly.is_monic() || poly.degree().unwrap_or(0) == 0 {
            return Err(LatticeError::NotMonic(name.to_string()));
        }
        let disc = intpoly::discriminant(&poly).map_err(|_| LatticeError::Overflow(name.to_string()))?;
        let certificate = if poly.degree() == Some(1) {
            Certificate::Linear
        } else if let Some(p) = irreducibility_witness(&poly) {
            Certificate::IrreducibleMod(p)
        } else if trusted {
            Certificate::Trusted
        } else {
            return Err(LatticeError::IrreducibilityUnproven(name.to_string()));
        };
        Ok(Self { name: name.to_string(), poly, disc, certificate })
    }

    pub fn rationals() -> Self {
        Self { name: BASE_FIELD.to_string(), poly: IntPoly::x(), disc: 1, certificate: Certificate::Linear }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap()
    }

    pub fn discriminant(&self) -> i128 {
        self.disc
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    /// Whether `p` divides the discriminant of the defining polynomial.
    pub fn is_singular_at(&self, p: u64) -> bool {
        self.disc % p as i128 == 0
    }

    /// Prime divisors of the discriminant.
    pub fn bad_primes(&self) -> Vec<u64> {
        arith::prime_divisors(self.disc, 1 << 24).0
    }
}

fn irreducibility_witness(f: &IntPoly) -> Option<u64> {
    crate::sieve::PrimeStream::up_to(CERTIFICATE_PRIME_BOUND)
        .find(|&p| factor::is_irreducible(&PrimeField::new_unchecked(p), &f.reduce(p)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub src: String,
    pub dst: String,
    /// Image of the generator of `src`, as a polynomial in the generator of
    /// `dst`, reduced modulo the defining polynomial of `dst`.
    pub image: RatPoly,
}

/// A field extension `K/L` resolved from the lattice: both fields and the
/// image of `α_L` inside `Q[α_K]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub top: NumberField,
    pub base: NumberField,
    pub image: RatPoly,
}

/// Why a rational prime is excluded from predicate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exclusion {
    /// `p` divides the discriminant of the upper field's polynomial.
    TopDiscriminant,
    /// `p` divides the discriminant of the lower field's polynomial.
    BaseDiscriminant,
    /// `p` divides a denominator of the embedding.
    Denominator,
}

impl core::fmt::Display for Exclusion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Exclusion::TopDiscriminant => "divides discriminant of upper field",
            Exclusion::BaseDiscriminant => "divides discriminant of base field",
            Exclusion::Denominator => "divides an embedding denominator",
        })
    }
}

impl Extension {
    pub fn name(&self) -> String {
        alloc::format!("{}/{}", self.top.name, self.base.name)
    }

    pub fn degree(&self) -> usize {
        self.top.degree() / self.base.degree()
    }

    pub fn exclusion(&self, p: u64) -> Option<Exclusion> {
        if self.top.is_singular_at(p) {
            Some(Exclusion::TopDiscriminant)
        } else if self.base.is_singular_at(p) {
            Some(Exclusion::BaseDiscriminant)
        } else if self.image.has_denominator_divisible_by(p) {
            Some(Exclusion::Denominator)
        } else {
            None
        }
    }

    /// All primes excluded for this extension, ascending.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut out = self.top.bad_primes();
        out.extend(self.base.bad_primes());
        out.extend(self.image.denominator_primes());
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Accumulates declarations; [`LatticeBuilder::build`] checks the
/// whole-lattice invariants.
#[derive(Debug, Clone, Default)]
pub struct LatticeBuilder {
    fields: BTreeMap<String, NumberField>,
    order: Vec<String>,
    embeddings: Vec<Embedding>,
    automorphisms: BTreeMap<String, Vec<RatPoly>>,
    closures: Vec<(String, String)>,
    galois: Vec<String>,
}

impl LatticeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&self, name: &str) -> Result<&NumberField, LatticeError> {
        if name == BASE_FIELD {
            return Err(LatticeError::ReservedName);
        }
        self.fields.get(name).ok_or_else(|| LatticeError::UnknownField(name.to_string()))
    }

    pub fn add_field(&mut self, name: &str, poly: IntPoly, trusted: bool) -> Result<(), LatticeError> {
        if name == BASE_FIELD {
            return Err(LatticeError::ReservedName);
        }
        if self.fields.contains_key(name) {
            return Err(LatticeError::DuplicateField(name.to_string()));
        }
        let field = NumberField::new(name, poly, trusted)?;
        self.fields.insert(name.to_string(), field);
        self.order.push(name.to_string());
        Ok(())
    }

    pub fn add_embedding(&mut self, src: &str, dst: &str, image: RatPoly) -> Result<(), LatticeError> {
        let (s, d) = (self.get(src)?, self.get(dst)?);
        let pair = || (src.to_string(), dst.to_string());
        if d.degree() % s.degree() != 0 {
            let (src, dst) = pair();
            return Err(LatticeError::DegreeMismatch { src, dst });
        }
        if self.embeddings.iter().any(|e| e.src == src && e.dst == dst) {
            let (src, dst) = pair();
            return Err(LatticeError::DuplicateEmbedding { src, dst });
        }
        let image = image.rem_monic(d.poly()).map_err(|_| LatticeError::Overflow(dst.to_string()))?;
        if !intpoly::validate_embedding(&image, s.poly(), d.poly()) {
            let (src, dst) = pair();
            return Err(LatticeError::EmbeddingInvalid { src, dst });
        }
        self.embeddings.push(Embedding { src: src.to_string(), dst: dst.to_string(), image });
        Ok(())
    }

    pub fn add_automorphism(&mut self, field: &str, image: RatPoly) -> Result<(), LatticeError> {
        let f = self.get(field)?.clone();
        let overflow = |_| LatticeError::Overflow(field.to_string());
        let image = image.rem_monic(f.poly()).map_err(overflow)?;
        if !intpoly::validate_embedding(&image, f.poly(), f.poly()) {
            return Err(LatticeError::AutomorphismInvalid(field.to_string()));
        }
        // some power returns to the identity within `degree` steps
        let x = RatPoly::x().rem_monic(f.poly()).map_err(overflow)?;
        let mut power = image.clone();
        let mut invertible = false;
        for _ in 0..f.degree() {
            if power == x {
                invertible = true;
                break;
            }
            power = compose(&power, &image, f.poly()).map_err(overflow)?;
        }
        if !invertible {
            return Err(LatticeError::AutomorphismNotInvertible(field.to_string()));
        }
        let group = self.automorphisms.entry(field.to_string()).or_default();
        if !group.contains(&image) {
            group.push(image);
        }
        Ok(())
    }

    pub fn add_closure(&mut self, field: &str, closure: &str) -> Result<(), LatticeError> {
        self.get(field)?;
        self.get(closure)?;
        self.closures.push((field.to_string(), closure.to_string()));
        Ok(())
    }

    pub fn assert_galois(&mut self, field: &str) -> Result<(), LatticeError> {
        self.get(field)?;
        self.galois.push(field.to_string());
        Ok(())
    }

    pub fn build(self) -> Result<Lattice, LatticeError> {
        let mut fields = self.fields;
        fields.insert(BASE_FIELD.to_string(), NumberField::rationals());
        let mut order = vec![BASE_FIELD.to_string()];
        order.extend(self.order);

        let mut groups = BTreeMap::new();
        for name in &order {
            let f = &fields[name];
            let x = RatPoly::x().rem_monic(f.poly()).map_err(|_| LatticeError::Overflow(name.clone()))?;
            let mut group = self.automorphisms.get(name).cloned().unwrap_or_default();
            if !group.contains(&x) {
                group.insert(0, x);
            }
            for a in &group {
                for b in &group {
                    let ab = compose(a, b, f.poly()).map_err(|_| LatticeError::Overflow(name.clone()))?;
                    if !group.contains(&ab) {
                        return Err(LatticeError::GroupNotClosed(name.clone()));
                    }
                }
            }
            groups.insert(name.clone(), group);
        }

        let lattice = Lattice {
            fields,
            order,
            embeddings: self.embeddings,
            groups,
            closures: self.closures.iter().cloned().collect(),
        };
        lattice.check_acyclic()?;
        lattice.check_consistency()?;
        for name in &self.galois {
            let (count, degree) = (lattice.groups[name].len(), lattice.fields[name].degree());
            if count != degree {
                return Err(LatticeError::GaloisAssertion { field: name.clone(), count, degree });
            }
        }
        for (field, closure) in &self.closures {
            let ok = lattice.is_galois(closure) && lattice.embedding_image(field, closure).is_ok();
            if !ok {
                return Err(LatticeError::ClosureInvalid { field: field.clone(), closure: closure.clone() });
            }
        }
        Ok(lattice)
    }
}

/// Generator image of a composite automorphism: `outer(inner(x)) mod f`.
fn compose(outer: &RatPoly, inner: &RatPoly, f: &IntPoly) -> Result<RatPoly, PolyError> {
    outer.compose_mod(inner, f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    fields: BTreeMap<String, NumberField>,
    order: Vec<String>,
    embeddings: Vec<Embedding>,
    groups: BTreeMap<String, Vec<RatPoly>>,
    closures: BTreeMap<String, String>,
}

impl Default for Lattice {
    fn default() -> Self {
        LatticeBuilder::new().build().expect("empty lattice is valid")
    }
}

impl Lattice {
    pub fn field(&self, name: &str) -> Result<&NumberField, LatticeError> {
        self.fields.get(name).ok_or_else(|| LatticeError::UnknownField(name.to_string()))
    }

    /// Fields in declaration order, starting with `Q`.
    pub fn fields(&self) -> impl Iterator<Item = &NumberField> {
        self.order.iter().map(|n| &self.fields[n])
    }

    pub fn embeddings(&self) -> &[Embedding] {
        &self.embeddings
    }

    /// The automorphism group as generator images, identity included.
    pub fn automorphisms(&self, field: &str) -> Result<&[RatPoly], LatticeError> {
        self.groups.get(field).map(Vec::as_slice).ok_or_else(|| LatticeError::UnknownField(field.to_string()))
    }

    pub fn is_galois(&self, field: &str) -> bool {
        match (self.groups.get(field), self.fields.get(field)) {
            (Some(g), Some(f)) => g.len() == f.degree(),
            _ => false,
        }
    }

    pub fn closure(&self, field: &str) -> Option<&str> {
        self.closures.get(field).map(String::as_str)
    }

    /// Image of the generator of `src` inside `dst`, following declared
    /// embeddings (breadth first, so the shortest path).
    pub fn embedding_image(&self, src: &str, dst: &str) -> Result<RatPoly, LatticeError> {
        let s = self.field(src)?;
        let d = self.field(dst)?;
        let overflow = |_| LatticeError::Overflow(dst.to_string());
        if src == dst {
            return RatPoly::x().rem_monic(d.poly()).map_err(overflow);
        }
        if src == BASE_FIELD {
            return Ok(RatPoly::zero());
        }
        if d.degree() % s.degree() != 0 {
            return Err(LatticeError::NoEmbeddingPath { src: src.to_string(), dst: dst.to_string() });
        }
        // BFS carrying the image of α_src expressed in the current field
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        queue.push_back((src, RatPoly::x()));
        seen.insert(src);
        while let Some((cur, image)) = queue.pop_front() {
            if cur == dst {
                return Ok(image);
            }
            for e in self.embeddings.iter().filter(|e| e.src == cur) {
                if seen.insert(e.dst.as_str()) {
                    let next = &self.fields[&e.dst];
                    let composed = image.compose_mod(&e.image, next.poly()).map_err(overflow)?;
                    queue.push_back((e.dst.as_str(), composed));
                }
            }
        }
        Err(LatticeError::NoEmbeddingPath { src: src.to_string(), dst: dst.to_string() })
    }

    /// The extension `top/base`; requires an embedding path base → top.
    pub fn extension(&self, top: &str, base: &str) -> Result<Extension, LatticeError> {
        let image = self.embedding_image(base, top)?;
        Ok(Extension { top: self.field(top)?.clone(), base: self.field(base)?.clone(), image })
    }

    fn check_acyclic(&self) -> Result<(), LatticeError> {
        // Kahn's algorithm
        let mut indegree: BTreeMap<&str, usize> = self.order.iter().map(|n| (n.as_str(), 0)).collect();
        for e in &self.embeddings {
            *indegree.get_mut(e.dst.as_str()).unwrap() += 1;
        }
        let mut ready: Vec<&str> = indegree.iter().filter(|(_, &d)| d == 0).map(|(n, _)| *n).collect();
        let mut visited = 0;
        while let Some(n) = ready.pop() {
            visited += 1;
            for e in self.embeddings.iter().filter(|e| e.src == n) {
                let d = indegree.get_mut(e.dst.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(e.dst.as_str());
                }
            }
        }
        if visited == indegree.len() {
            Ok(())
        } else {
            let stuck = indegree.iter().find(|(_, &d)| d > 0).map(|(n, _)| n.to_string()).unwrap();
            Err(LatticeError::EmbeddingCycle(stuck))
        }
    }

    fn check_consistency(&self) -> Result<(), LatticeError> {
        for a in &self.embeddings {
            for b in self.embeddings.iter().filter(|b| b.src == a.dst) {
                let Some(direct) = self.embeddings.iter().find(|c| c.src == a.src && c.dst == b.dst) else {
                    continue;
                };
                let f = self.fields[&b.dst].poly();
                let composed = a.image.compose_mod(&b.image, f).map_err(|_| LatticeError::Overflow(b.dst.clone()))?;
                if composed != direct.image {
                    return Err(LatticeError::EmbeddingInconsistent {
                        src: a.src.clone(),
                        mid: a.dst.clone(),
                        dst: b.dst.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Report-only diagnostics for the whole lattice.
    pub fn validate(&self) -> Diagnostics {
        let fields = self
            .fields()
            .map(|f| FieldDiagnostic {
                name: f.name.clone(),
                degree: f.degree(),
                discriminant: f.disc,
                certificate: f.certificate,
                automorphisms: self.groups[&f.name].len(),
                galois: self.is_galois(&f.name),
                closure: self.closure(&f.name).map(str::to_string),
                bad_primes: f.bad_primes(),
            })
            .collect::<Vec<_>>();
        let mut pairs = Vec::new();
        for f in self.fields().filter(|f| f.name != BASE_FIELD) {
            if let Ok(ext) = self.extension(&f.name, BASE_FIELD) {
                pairs.push(PairDiagnostic {
                    src: BASE_FIELD.to_string(),
                    dst: f.name.clone(),
                    bad_primes: ext.bad_primes(),
                });
            }
        }
        for e in &self.embeddings {
            if let Ok(ext) = self.extension(&e.dst, &e.src) {
                pairs.push(PairDiagnostic { src: e.src.clone(), dst: e.dst.clone(), bad_primes: ext.bad_primes() });
            }
        }
        let warnings = fields
            .iter()
            .filter(|d| !d.galois && d.closure.is_none())
            .map(|d| {
                alloc::format!("{} is not Galois and has no declared closure; Chebotarev predictions need one", d.name)
            })
            .collect();
        Diagnostics { fields, pairs, warnings }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDiagnostic {
    pub name: String,
    pub degree: usize,
    pub discriminant: i128,
    pub certificate: Certificate,
    pub automorphisms: usize,
    pub galois: bool,
    pub closure: Option<String>,
    pub bad_primes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDiagnostic {
    pub src: String,
    pub dst: String,
    pub bad_primes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub fields: Vec<FieldDiagnostic>,
    pub pairs: Vec<PairDiagnostic>,
    pub warnings: Vec<String>,
}
