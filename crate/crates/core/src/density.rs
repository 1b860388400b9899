//! Boolean combinations of the special sets `Π_{K,L}`, `Ψ_{K,L}` and
//! finite prime sets, their empirical natural densities over `|pL| ≤ N`,
//! Frobenius cycle-type statistics and the checkers built on them.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::ff::{factor, PrimeField};
use crate::lattice::{Exclusion, Extension, Lattice, LatticeError, NumberField, BASE_FIELD};
use crate::scan::{PrimeScan, Runner};
use crate::spectrum::{self, split_prime, SplitPrime};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DensityError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("atoms over different base fields: {0} and {1}")]
    MixedBase(String, String),
    #[error("{0} is not defined over Q")]
    NotOverQ(String),
    #[error("bound {0} is below the minimum {1}")]
    BoundTooSmall(u64, u64),
    #[error("need at least {0} extensions")]
    TooFewExtensions(usize),
}

/// Which special set an atom names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Pi,
    Psi,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predicate::Pi => "Pi",
            Predicate::Psi => "Psi",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    Atom {
        pred: Predicate,
        top: String,
        base: String,
    },
    /// Points of `Sp_L` over the listed rational primes.
    Primes(Vec<u64>),
    Not(Box<SetExpr>),
    And(Box<SetExpr>, Box<SetExpr>),
    Or(Box<SetExpr>, Box<SetExpr>),
}

impl SetExpr {
    pub fn pi(top: &str, base: &str) -> Self {
        SetExpr::Atom { pred: Predicate::Pi, top: top.to_string(), base: base.to_string() }
    }

    pub fn psi(top: &str, base: &str) -> Self {
        SetExpr::Atom { pred: Predicate::Psi, top: top.to_string(), base: base.to_string() }
    }

    pub fn complement(self) -> Self {
        SetExpr::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        SetExpr::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        SetExpr::Or(Box::new(self), Box::new(other))
    }

    /// The common base field of all atoms; `None` if there are no
    /// `Pi`/`Psi` atoms.
    pub fn base(&self) -> Result<Option<&str>, DensityError> {
        match self {
            SetExpr::Atom { base, .. } => Ok(Some(base)),
            SetExpr::Primes(_) => Ok(None),
            SetExpr::Not(e) => e.base(),
            SetExpr::And(a, b) | SetExpr::Or(a, b) => match (a.base()?, b.base()?) {
                (Some(x), Some(y)) if x != y => Err(DensityError::MixedBase(x.to_string(), y.to_string())),
                (x, y) => Ok(x.or(y)),
            },
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            SetExpr::Atom { pred, top, base } => write!(f, "{pred}({top}/{base})"),
            SetExpr::Primes(ps) => {
                f.write_str("{")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("}")
            }
            SetExpr::Not(e) => {
                f.write_str("!")?;
                e.fmt_prec(f, 3)
            }
            SetExpr::And(a, b) => wrap(f, prec > 2, |f| {
                a.fmt_prec(f, 2)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 3)
            }),
            SetExpr::Or(a, b) => wrap(f, prec > 1, |f| {
                a.fmt_prec(f, 1)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 2)
            }),
        }
    }
}

fn wrap(
    f: &mut fmt::Formatter<'_>,
    parens: bool,
    body: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    if parens {
        f.write_str("(")?;
    }
    body(f)?;
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Atom(Predicate, usize),
    Primes(Vec<u64>),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
}

/// A set expression resolved against a lattice.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    source: SetExpr,
    base: NumberField,
    exts: Vec<Extension>,
    root: Node,
}

/// Why a point could not be evaluated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Skipped {
    pub p: u64,
    pub extension: String,
    pub reason: Exclusion,
}

impl fmt::Display for Skipped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}: {})", self.p, self.extension, self.reason)
    }
}

impl CompiledExpr {
    pub fn new(expr: &SetExpr, lattice: &Lattice) -> Result<Self, DensityError> {
        let base_name = expr.base()?.unwrap_or(BASE_FIELD).to_string();
        let base = lattice.field(&base_name)?.clone();
        let mut exts: Vec<Extension> = Vec::new();
        let root = Self::resolve(expr, lattice, &mut exts)?;
        Ok(Self { source: expr.clone(), base, exts, root })
    }

    fn resolve(expr: &SetExpr, lattice: &Lattice, exts: &mut Vec<Extension>) -> Result<Node, DensityError> {
        Ok(match expr {
            SetExpr::Atom { pred, top, base } => {
                let idx = match exts.iter().position(|e| e.top.name() == top && e.base.name() == base) {
                    Some(i) => i,
                    None => {
                        exts.push(lattice.extension(top, base)?);
                        exts.len() - 1
                    }
                };
                Node::Atom(*pred, idx)
            }
            SetExpr::Primes(ps) => Node::Primes(ps.clone()),
            SetExpr::Not(e) => Node::Not(Box::new(Self::resolve(e, lattice, exts)?)),
            SetExpr::And(a, b) => {
                Node::And(Box::new(Self::resolve(a, lattice, exts)?), Box::new(Self::resolve(b, lattice, exts)?))
            }
            SetExpr::Or(a, b) => {
                Node::Or(Box::new(Self::resolve(a, lattice, exts)?), Box::new(Self::resolve(b, lattice, exts)?))
            }
        })
    }

    pub fn source(&self) -> &SetExpr {
        &self.source
    }

    pub fn base(&self) -> &NumberField {
        &self.base
    }

    /// Distinct extensions named by the atoms, in first-use order.
    pub fn extensions(&self) -> &[Extension] {
        &self.exts
    }

    /// First extension refusing `p`, if any.
    pub fn exclusion(&self, p: u64) -> Option<Skipped> {
        self.exts.iter().find_map(|e| e.exclusion(p).map(|reason| Skipped { p, extension: e.name(), reason }))
    }

    /// Membership of `pL`; the caller has checked [`CompiledExpr::exclusion`].
    pub fn eval(&self, lower: &SplitPrime) -> bool {
        let mut cache: Vec<Option<Vec<usize>>> = vec![None; self.exts.len()];
        self.eval_node(&self.root, lower, &mut cache)
    }

    /// Evaluates the tree with atoms decided by `atom` (called with the
    /// predicate and the index into [`CompiledExpr::extensions`]) and every
    /// finite prime set taken as empty.
    pub(crate) fn eval_symbolic(&self, atom: &mut dyn FnMut(Predicate, usize) -> bool) -> bool {
        fn go(node: &Node, atom: &mut dyn FnMut(Predicate, usize) -> bool) -> bool {
            match node {
                Node::Atom(pred, i) => atom(*pred, *i),
                Node::Primes(_) => false,
                Node::Not(e) => !go(e, atom),
                Node::And(a, b) => go(a, atom) & go(b, atom),
                Node::Or(a, b) => go(a, atom) | go(b, atom),
            }
        }
        go(&self.root, atom)
    }

    fn eval_node(&self, node: &Node, lower: &SplitPrime, cache: &mut [Option<Vec<usize>>]) -> bool {
        match node {
            Node::Atom(pred, i) => {
                let degrees = cache[*i].get_or_insert_with(|| {
                    spectrum::relative_splitting(&self.exts[*i], lower).expect("excluded primes are filtered")
                });
                match pred {
                    Predicate::Pi => degrees.contains(&1),
                    Predicate::Psi => !degrees.is_empty() && degrees.iter().all(|&d| d == 1),
                }
            }
            Node::Primes(ps) => ps.contains(&lower.p),
            Node::Not(e) => !self.eval_node(e, lower, cache),
            Node::And(a, b) => self.eval_node(a, lower, cache) & self.eval_node(b, lower, cache),
            Node::Or(a, b) => self.eval_node(a, lower, cache) | self.eval_node(b, lower, cache),
        }
    }
}

/// Powers of ten below `n`, then `n` itself.
pub fn checkpoints(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 10u64;
    while c < n {
        out.push(c);
        match c.checked_mul(10) {
            Some(next) => c = next,
            None => break,
        }
    }
    out.push(n);
    out
}

/// Minimum bound accepted by [`estimate_density`].
pub const MIN_DENSITY_BOUND: u64 = 100;

/// Counters bucketed by checkpoint: bucket `i` holds points with
/// `cp[i−1] < |pL| ≤ cp[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Buckets<const K: usize> {
    counts: Vec<[u64; K]>,
}

impl<const K: usize> Buckets<K> {
    fn new(len: usize) -> Self {
        Self { counts: vec![[0; K]; len] }
    }

    fn add(&mut self, cps: &[u64], norm: u128, row: [bool; K]) {
        let i = cps.partition_point(|&c| (c as u128) < norm);
        for (slot, hit) in self.counts[i].iter_mut().zip(row) {
            *slot += u64::from(hit);
        }
    }

    fn merge(&mut self, other: Self) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    fn cumulative(&self) -> Vec<[u64; K]> {
        let mut acc = [0; K];
        self.counts
            .iter()
            .map(|row| {
                for (a, r) in acc.iter_mut().zip(row) {
                    *a += r;
                }
                acc
            })
            .collect()
    }
}

/// Points of `Sp_L` over `p` with `|pL| ≤ n`.
fn base_points(base: &NumberField, p: u64, n: u64) -> Vec<SplitPrime> {
    if base.degree() == 1 {
        return vec![spectrum::rational_point(p)];
    }
    split_prime(base, p).into_iter().filter(|q| q.norm() <= n as u128).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    pub n: u64,
    pub hits: u64,
    pub total: u64,
}

impl Checkpoint {
    pub fn density(&self) -> f64 {
        ratio(self.hits, self.total)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityEstimate {
    pub expr: String,
    pub base: String,
    pub bound: u64,
    pub hits: u64,
    pub total: u64,
    /// One entry per excluded rational prime.
    pub skipped: Vec<Skipped>,
    /// Points of `Sp_L` left out because their prime was excluded.
    pub skipped_points: u64,
    pub trace: Vec<Checkpoint>,
}

impl DensityEstimate {
    pub fn value(&self) -> f64 {
        ratio(self.hits, self.total)
    }
}

#[derive(Debug, Clone)]
struct Tally<const K: usize> {
    buckets: Buckets<K>,
    skipped: Vec<Skipped>,
    skipped_points: u64,
}

struct DensityScan<'a, const K: usize> {
    exprs: [&'a CompiledExpr; K],
    base: &'a NumberField,
    bound: u64,
    cps: Vec<u64>,
    /// Slot `K − 1` counts evaluable points when set; otherwise all slots
    /// are expression hits.
    count_total: bool,
}

impl<const K: usize> DensityScan<'_, K> {
    fn exclusion(&self, p: u64) -> Option<Skipped> {
        self.exprs.iter().find_map(|e| e.exclusion(p))
    }
}

impl<const K: usize> PrimeScan for DensityScan<'_, K> {
    type Acc = Tally<K>;

    fn init(&self) -> Self::Acc {
        Tally { buckets: Buckets::new(self.cps.len()), skipped: Vec::new(), skipped_points: 0 }
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        let points = base_points(self.base, p, self.bound);
        if points.is_empty() {
            return;
        }
        if let Some(s) = self.exclusion(p) {
            acc.skipped.push(s);
            acc.skipped_points += points.len() as u64;
            return;
        }
        for q in points {
            let mut row = [true; K];
            let n = if self.count_total { K - 1 } else { K };
            for (slot, e) in row.iter_mut().zip(&self.exprs[..n]) {
                *slot = e.eval(&q);
            }
            acc.buckets.add(&self.cps, q.norm(), row);
        }
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        acc.buckets.merge(later.buckets);
        acc.skipped.extend(later.skipped);
        acc.skipped_points += later.skipped_points;
    }
}

/// Empirical `dn(S)` over the points of `Sp_L` with `|pL| ≤ n`.
pub fn estimate_density<R: Runner>(expr: &CompiledExpr, n: u64, runner: &R) -> Result<DensityEstimate, DensityError> {
    if n < MIN_DENSITY_BOUND {
        return Err(DensityError::BoundTooSmall(n, MIN_DENSITY_BOUND));
    }
    let scan = DensityScan { exprs: [expr, expr], base: expr.base(), bound: n, cps: checkpoints(n), count_total: true };
    let tally = runner.run(&scan, n);
    let trace: Vec<Checkpoint> = scan
        .cps
        .iter()
        .zip(tally.buckets.cumulative())
        .map(|(&n, [hits, total])| Checkpoint { n, hits, total })
        .collect();
    let last = *trace.last().unwrap();
    Ok(DensityEstimate {
        expr: expr.source().to_string(),
        base: expr.base().name().to_string(),
        bound: n,
        hits: last.hits,
        total: last.total,
        skipped: tally.skipped,
        skipped_points: tally.skipped_points,
        trace,
    })
}

/// A Frobenius cycle type: factor degrees of `f mod p`, ascending.
pub type CycleType = Vec<usize>;

pub fn format_cycle_type(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|d| d.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusStats {
    pub field: String,
    pub bound: u64,
    pub counts: BTreeMap<CycleType, u64>,
    pub total: u64,
    /// Primes dividing the discriminant.
    pub skipped: Vec<u64>,
}

impl FrobeniusStats {
    pub fn frequency(&self, t: &[usize]) -> f64 {
        ratio(self.counts.get(t).copied().unwrap_or(0), self.total)
    }
}

struct FrobeniusScan<'a> {
    field: &'a NumberField,
}

impl PrimeScan for FrobeniusScan<'_> {
    type Acc = (BTreeMap<CycleType, u64>, Vec<u64>);

    fn init(&self) -> Self::Acc {
        (BTreeMap::new(), Vec::new())
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        if self.field.is_singular_at(p) {
            acc.1.push(p);
            return;
        }
        let fp = PrimeField::new_unchecked(p);
        let mut t: CycleType = factor::factor_degrees(&fp, &self.field.poly().reduce(p))
            .into_iter()
            .flat_map(|(d, e)| core::iter::repeat_n(d, e))
            .collect();
        t.sort_unstable();
        *acc.0.entry(t).or_default() += 1;
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        for (k, v) in later.0 {
            *acc.0.entry(k).or_default() += v;
        }
        acc.1.extend(later.1);
    }
}

/// Histogram of cycle types of `f mod p` over unramified `p ≤ n`.
pub fn frobenius_histogram<R: Runner>(field: &NumberField, n: u64, runner: &R) -> FrobeniusStats {
    let (counts, skipped) = runner.run(&FrobeniusScan { field }, n);
    let total = counts.values().sum();
    FrobeniusStats { field: field.name().to_string(), bound: n, counts, total, skipped }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiProductViolation {
    pub point: SplitPrime,
    /// `pL ∈ Ψ_{K1} ∩ Ψ_{K2}`.
    pub intersection: bool,
    /// `pL ∈ Ψ_{K}` for the composite.
    pub composite: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiProductReport {
    pub extensions: [String; 3],
    pub bound: u64,
    pub checked: u64,
    pub intersection_hits: u64,
    pub violations: Vec<PsiProductViolation>,
    pub skipped: Vec<Skipped>,
}

impl PsiProductReport {
    pub fn intersection_density(&self) -> f64 {
        ratio(self.intersection_hits, self.checked)
    }
}

struct PsiProductScan<'a> {
    exts: [&'a Extension; 3],
    n: u64,
}

type PsiProductAcc = (u64, u64, Vec<PsiProductViolation>, Vec<Skipped>);

impl PrimeScan for PsiProductScan<'_> {
    type Acc = PsiProductAcc;

    fn init(&self) -> Self::Acc {
        (0, 0, Vec::new(), Vec::new())
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        let points = base_points(&self.exts[0].base, p, self.n);
        if points.is_empty() {
            return;
        }
        if let Some(s) = first_exclusion(&self.exts, p) {
            acc.3.push(s);
            return;
        }
        for q in points {
            let psi = |e: &Extension| spectrum::in_psi(e, &q).expect("excluded primes are filtered");
            let both = psi(self.exts[0]) && psi(self.exts[1]);
            let composite = psi(self.exts[2]);
            acc.0 += 1;
            acc.1 += u64::from(both);
            if both != composite {
                acc.2.push(PsiProductViolation { point: q, intersection: both, composite });
            }
        }
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        acc.0 += later.0;
        acc.1 += later.1;
        acc.2.extend(later.2);
        acc.3.extend(later.3);
    }
}

fn first_exclusion(exts: &[&Extension], p: u64) -> Option<Skipped> {
    exts.iter().find_map(|e| e.exclusion(p).map(|reason| Skipped { p, extension: e.name(), reason }))
}

/// Compares `Ψ_{K1,L} ∩ Ψ_{K2,L}` with `Ψ_{K,L}` for the composite `K`.
pub fn check_psi_product<R: Runner>(
    lattice: &Lattice,
    k1: &str,
    k2: &str,
    composite: &str,
    base: &str,
    n: u64,
    runner: &R,
) -> Result<PsiProductReport, DensityError> {
    lattice.embedding_image(k1, composite)?;
    lattice.embedding_image(k2, composite)?;
    let e1 = lattice.extension(k1, base)?;
    let e2 = lattice.extension(k2, base)?;
    let e = lattice.extension(composite, base)?;
    let (checked, hits, violations, skipped) = runner.run(&PsiProductScan { exts: [&e1, &e2, &e], n }, n);
    Ok(PsiProductReport {
        extensions: [e1.name(), e2.name(), e.name()],
        bound: n,
        checked,
        intersection_hits: hits,
        violations,
        skipped,
    })
}

/// How many disagreeing points a report lists in full.
pub const EXAMPLE_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiEqPsiReport {
    pub extension: String,
    pub galois: bool,
    pub bound: u64,
    pub checked: u64,
    pub disagreements: u64,
    /// The first few disagreeing points.
    pub examples: Vec<SplitPrime>,
    pub skipped: Vec<Skipped>,
}

impl PiEqPsiReport {
    pub fn disagreement_density(&self) -> f64 {
        ratio(self.disagreements, self.checked)
    }
}

struct PiEqPsiScan<'a> {
    ext: &'a Extension,
    n: u64,
}

impl PrimeScan for PiEqPsiScan<'_> {
    type Acc = (u64, u64, Vec<SplitPrime>, Vec<Skipped>);

    fn init(&self) -> Self::Acc {
        (0, 0, Vec::new(), Vec::new())
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        let points = base_points(&self.ext.base, p, self.n);
        if points.is_empty() {
            return;
        }
        if let Some(s) = first_exclusion(&[self.ext], p) {
            acc.3.push(s);
            return;
        }
        for q in points {
            let d = spectrum::relative_splitting(self.ext, &q).expect("excluded primes are filtered");
            let pi = d.contains(&1);
            let psi = d.iter().all(|&x| x == 1);
            acc.0 += 1;
            if pi != psi {
                acc.1 += 1;
                if acc.2.len() < EXAMPLE_LIMIT {
                    acc.2.push(q);
                }
            }
        }
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        acc.0 += later.0;
        acc.1 += later.1;
        let room = EXAMPLE_LIMIT - acc.2.len();
        acc.2.extend(later.2.into_iter().take(room));
        acc.3.extend(later.3);
    }
}

/// Counts points `pL` with `|pL| ≤ n` where `Π_{K,L}` and `Ψ_{K,L}` differ.
pub fn check_pi_eq_psi<R: Runner>(
    lattice: &Lattice,
    top: &str,
    base: &str,
    n: u64,
    runner: &R,
) -> Result<PiEqPsiReport, DensityError> {
    let ext = lattice.extension(top, base)?;
    let (checked, disagreements, examples, skipped) = runner.run(&PiEqPsiScan { ext: &ext, n }, n);
    Ok(PiEqPsiReport {
        extension: ext.name(),
        galois: lattice.is_galois(top),
        bound: n,
        checked,
        disagreements,
        examples,
        skipped,
    })
}

/// One point of `Sp_K` in the pullback comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackRow {
    pub upper: SplitPrime,
    /// `π^Sp_{K,L}(pK)`.
    pub lower: SplitPrime,
    /// Relative degrees of `KM` over `pK`.
    pub direct_degrees: Vec<usize>,
    /// Relative degrees of `M` over `pL`.
    pub pullback_degrees: Vec<usize>,
    /// `π^Sp(pK) ∈ Π_{M,L}`.
    pub pi_pullback: bool,
    /// `pK ∈ Π_{KM,K}`.
    pub pi_direct: bool,
    pub psi_pullback: bool,
    pub psi_direct: bool,
}

impl PullbackRow {
    pub fn pi_agrees(&self) -> bool {
        self.pi_pullback == self.pi_direct
    }

    pub fn psi_agrees(&self) -> bool {
        self.psi_pullback == self.psi_direct
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackReport {
    /// `[L, K, M, KM]`.
    pub fields: [String; 4],
    pub bound: u64,
    pub rows: Vec<PullbackRow>,
    pub skipped: Vec<Skipped>,
}

impl PullbackReport {
    pub fn pi_agreements(&self) -> usize {
        self.rows.iter().filter(|r| r.pi_agrees()).count()
    }

    pub fn psi_agreements(&self) -> usize {
        self.rows.iter().filter(|r| r.psi_agrees()).count()
    }

    /// Rows over the rational prime `p`.
    pub fn rows_over(&self, p: u64) -> impl Iterator<Item = &PullbackRow> {
        self.rows.iter().filter(move |r| r.upper.p == p)
    }
}

struct PullbackScan<'a> {
    k_over_l: &'a Extension,
    m_over_l: &'a Extension,
    km_over_k: &'a Extension,
}

impl PrimeScan for PullbackScan<'_> {
    type Acc = (Vec<PullbackRow>, Vec<Skipped>);

    fn init(&self) -> Self::Acc {
        (Vec::new(), Vec::new())
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        if let Some(s) = first_exclusion(&[self.km_over_k, self.m_over_l, self.k_over_l], p) {
            acc.1.push(s);
            return;
        }
        for upper in split_prime(&self.k_over_l.top, p) {
            let lower =
                crate::plane::spectral_projection(&upper, self.k_over_l).expect("unexcluded points lie over the base");
            let direct = spectrum::relative_splitting(self.km_over_k, &upper).expect("excluded primes are filtered");
            let pulled = spectrum::relative_splitting(self.m_over_l, &lower).expect("excluded primes are filtered");
            acc.0.push(PullbackRow {
                pi_pullback: pulled.contains(&1),
                pi_direct: direct.contains(&1),
                psi_pullback: pulled.iter().all(|&d| d == 1),
                psi_direct: direct.iter().all(|&d| d == 1),
                upper,
                lower,
                direct_degrees: direct,
                pullback_degrees: pulled,
            });
        }
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        acc.0.extend(later.0);
        acc.1.extend(later.1);
    }
}

/// Compares `π⁻¹_{K,L}(Π_{M,L})` with `Π_{KM,K}` (and the same for `Ψ`)
/// point by point over `p ≤ n`.
pub fn check_pullback<R: Runner>(
    lattice: &Lattice,
    l: &str,
    k: &str,
    m: &str,
    km: &str,
    n: u64,
    runner: &R,
) -> Result<PullbackReport, DensityError> {
    let k_over_l = lattice.extension(k, l)?;
    let m_over_l = lattice.extension(m, l)?;
    let km_over_k = lattice.extension(km, k)?;
    lattice.embedding_image(m, km)?;
    let scan = PullbackScan { k_over_l: &k_over_l, m_over_l: &m_over_l, km_over_k: &km_over_k };
    let (rows, skipped) = runner.run(&scan, n);
    Ok(PullbackReport {
        fields: [l.to_string(), k.to_string(), m.to_string(), km.to_string()],
        bound: n,
        rows,
        skipped,
    })
}

/// Counts at one checkpoint of the inclusion–exclusion check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InclusionExclusionRow {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub union: u64,
    pub intersection: u64,
    pub total: u64,
}

impl InclusionExclusionRow {
    /// `hits(A∪B) + hits(A∩B) = hits(A) + hits(B)`.
    pub fn identity_holds(&self) -> bool {
        self.union + self.intersection == self.a + self.b
    }

    pub fn densities(&self) -> [f64; 4] {
        [self.a, self.b, self.union, self.intersection].map(|h| ratio(h, self.total))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionExclusionReport {
    pub a: String,
    pub b: String,
    pub bound: u64,
    pub rows: Vec<InclusionExclusionRow>,
    pub skipped: Vec<Skipped>,
}

impl InclusionExclusionReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(InclusionExclusionRow::identity_holds)
    }
}

/// Evaluates `A`, `B`, `A | B` and `A & B` as four independent expressions
/// and checks the counting identity at every checkpoint.
pub fn check_inclusion_exclusion<R: Runner>(
    lattice: &Lattice,
    a: &SetExpr,
    b: &SetExpr,
    n: u64,
    runner: &R,
) -> Result<InclusionExclusionReport, DensityError> {
    if n < MIN_DENSITY_BOUND {
        return Err(DensityError::BoundTooSmall(n, MIN_DENSITY_BOUND));
    }
    let union = a.clone().or(b.clone());
    let inter = a.clone().and(b.clone());
    // type-checks the common base
    union.base()?;
    let compiled = [a, b, &union, &inter].map(|e| CompiledExpr::new(e, lattice));
    let [ca, cb, cu, ci] = compiled;
    let (ca, cb, cu, ci) = (ca?, cb?, cu?, ci?);
    let base = if a.base()?.is_some() { ca.base() } else { cb.base() };
    let scan = DensityScan { exprs: [&ca, &cb, &cu, &ci, &ca], base, bound: n, cps: checkpoints(n), count_total: true };
    let tally = runner.run(&scan, n);
    let rows = scan
        .cps
        .iter()
        .zip(tally.buckets.cumulative())
        .map(|(&n, [a, b, union, intersection, total])| InclusionExclusionRow { n, a, b, union, intersection, total })
        .collect();
    Ok(InclusionExclusionReport { a: a.to_string(), b: b.to_string(), bound: n, rows, skipped: tally.skipped })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiIntersectionReport {
    pub extensions: Vec<String>,
    pub bound: u64,
    /// Smallest point of `⋂ Π_{Ki,L}` with `|pL| ≤ n`.
    pub witness: Option<SplitPrime>,
    pub skipped: Vec<Skipped>,
}

struct PiIntersectionScan<'a> {
    exts: Vec<&'a Extension>,
    n: u64,
}

impl PrimeScan for PiIntersectionScan<'_> {
    type Acc = (Option<SplitPrime>, Vec<Skipped>);

    fn init(&self) -> Self::Acc {
        (None, Vec::new())
    }

    fn visit(&self, p: u64, acc: &mut Self::Acc) {
        let points = base_points(&self.exts[0].base, p, self.n);
        if points.is_empty() {
            return;
        }
        if let Some(s) = first_exclusion(&self.exts, p) {
            acc.1.push(s);
            return;
        }
        acc.0 = points
            .into_iter()
            .find(|q| self.exts.iter().all(|e| spectrum::in_pi(e, q).expect("excluded primes are filtered")));
    }

    fn merge(&self, acc: &mut Self::Acc, later: Self::Acc) {
        if acc.0.is_none() {
            acc.0 = later.0;
            acc.1.extend(later.1);
        }
    }

    fn done(&self, acc: &Self::Acc) -> bool {
        acc.0.is_some()
    }
}

/// Searches for the smallest common point of the `Π_{Ki,L}`.
pub fn check_pi_intersection<R: Runner>(
    lattice: &Lattice,
    tops: &[&str],
    base: &str,
    n: u64,
    runner: &R,
) -> Result<PiIntersectionReport, DensityError> {
    if tops.is_empty() {
        return Err(DensityError::TooFewExtensions(1));
    }
    let exts = tops.iter().map(|t| lattice.extension(t, base)).collect::<Result<Vec<_>, _>>()?;
    let scan = PiIntersectionScan { exts: exts.iter().collect(), n };
    let (witness, skipped) = runner.run(&scan, n);
    Ok(PiIntersectionReport { extensions: exts.iter().map(Extension::name).collect(), bound: n, witness, skipped })
}

/// Requires `field` to have the integers as its lattice base.
pub fn require_over_q(lattice: &Lattice, field: &str) -> Result<(), DensityError> {
    lattice.extension(field, BASE_FIELD).map(|_| ()).map_err(|e| match e {
        LatticeError::UnknownField(_) => DensityError::Lattice(e),
        _ => DensityError::NotOverQ(field.to_string()),
    })
}
