//! Density predictions by counting elements of a declared Galois group.
//!
//! For an expression over `L`, pick a Galois field `M` of the lattice into
//! which the base and every atom's field embed (smallest degree first, then
//! name). The roots of an atom `K/L` are the conjugates of the image of `α_K`
//! under `Gal(M/L)`; Frobenius at a point fixes a root exactly when the point
//! has a residue degree one extension. The prediction is the fraction of
//! `σ ∈ Gal(M/L)` satisfying the expression, finite prime sets being empty.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::density::{CompiledExpr, Predicate};
use crate::intpoly::{RatPoly, Rational};
use crate::lattice::Lattice;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    /// The Galois field whose group was counted.
    pub closure: String,
    /// `|Gal(M/L)|`.
    pub group_order: usize,
    /// Elements satisfying the expression.
    pub count: usize,
    pub value: Rational,
}

/// `None` when no declared Galois field contains the base and all atoms.
pub fn chebotarev_predict(expr: &CompiledExpr, lattice: &Lattice) -> Option<Prediction> {
    let base = expr.base().name();
    let mut candidates: Vec<_> = lattice
        .fields()
        .filter(|m| lattice.is_galois(m.name()))
        .filter(|m| lattice.embedding_image(base, m.name()).is_ok())
        .filter(|m| expr.extensions().iter().all(|e| lattice.embedding_image(e.top.name(), m.name()).is_ok()))
        .collect();
    candidates.sort_by(|a, b| (a.degree(), a.name()).cmp(&(b.degree(), b.name())));
    let m = candidates.first()?;
    let f = m.poly();
    let act = |r: &RatPoly, s: &RatPoly| r.compose_mod(s, f).ok();

    let base_image = lattice.embedding_image(base, m.name()).ok()?;
    let mut group = Vec::new();
    for s in lattice.automorphisms(m.name()).ok()? {
        if act(&base_image, s)? == base_image {
            group.push(s.clone());
        }
    }

    let mut roots: Vec<Vec<RatPoly>> = Vec::new();
    for e in expr.extensions() {
        let image = lattice.embedding_image(e.top.name(), m.name()).ok()?;
        let mut orbit: Vec<RatPoly> = Vec::new();
        for s in &group {
            let r = act(&image, s)?;
            if !orbit.contains(&r) {
                orbit.push(r);
            }
        }
        roots.push(orbit);
    }

    let mut count = 0;
    for s in &group {
        let mut fixed: Vec<Option<(usize, usize)>> = alloc::vec![None; roots.len()];
        let mut failed = false;
        let hit = expr.eval_symbolic(&mut |pred, i| {
            let (n_fixed, n_roots) = *fixed[i].get_or_insert_with(|| {
                let n = roots[i]
                    .iter()
                    .filter(|r| match act(r, s) {
                        Some(img) => img == **r,
                        None => {
                            failed = true;
                            false
                        }
                    })
                    .count();
                (n, roots[i].len())
            });
            match pred {
                Predicate::Pi => n_fixed > 0,
                Predicate::Psi => n_fixed == n_roots,
            }
        });
        if failed {
            return None;
        }
        count += usize::from(hit);
    }
    Some(Prediction {
        closure: m.name().to_string(),
        group_order: group.len(),
        count,
        value: Ratio::new(count as i128, group.len() as i128),
    })
}
