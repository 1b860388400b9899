//! Text and CSV rendering.

use std::fmt::Write as _;

use arithplane_core::chebotarev::Prediction;
use arithplane_core::density::{format_cycle_type, DensityEstimate, FrobeniusStats};
use arithplane_core::Lattice;

use crate::cli::certificate;

/// `N,hits,total,density`, one row per checkpoint.
pub fn density_csv(est: &DensityEstimate) -> String {
    let mut s = String::from("N,hits,total,density\n");
    for c in &est.trace {
        let _ = writeln!(s, "{},{},{},{:.6}", c.n, c.hits, c.total, c.density());
    }
    s
}

/// `cycle_type,count,total,frequency`, cycle types ascending.
pub fn frobenius_csv(stats: &FrobeniusStats) -> String {
    let mut s = String::from("cycle_type,count,total,frequency\n");
    for (t, c) in &stats.counts {
        let _ = writeln!(s, "\"{}\",{},{},{:.6}", format_cycle_type(t), c, stats.total, stats.frequency(t));
    }
    s
}

pub fn density(est: &DensityEstimate, prediction: Option<&Prediction>, out: &mut String) {
    let _ = writeln!(out, "expression: {}", est.expr);
    let _ = writeln!(out, "base: {}  bound: {}", est.base, est.bound);
    let _ = writeln!(out, "hits: {}  total: {}", est.hits, est.total);
    let _ = writeln!(out, "density: {:.6}", est.value());
    match prediction {
        Some(p) => {
            let _ = writeln!(
                out,
                "chebotarev: {} ({} of {} elements of Gal({}/{}))",
                p.value, p.count, p.group_order, p.closure, est.base
            );
        }
        None => {
            let _ = writeln!(out, "chebotarev: unavailable");
        }
    }
    if est.skipped.is_empty() {
        let _ = writeln!(out, "excluded: none");
    } else {
        let list: Vec<String> = est.skipped.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "excluded: {} point(s) over {}", est.skipped_points, list.join(", "));
    }
    let _ = writeln!(out, "N hits total density");
    for c in &est.trace {
        let _ = writeln!(out, "{} {} {} {:.6}", c.n, c.hits, c.total, c.density());
    }
}

pub fn validate(lattice: &Lattice, out: &mut String) {
    let d = lattice.validate();
    let _ = writeln!(out, "fields:");
    for f in &d.fields {
        let bad: Vec<String> = f.bad_primes.iter().map(u64::to_string).collect();
        let _ = writeln!(
            out,
            "  {}: degree {}, discriminant {}, {}, {} automorphism(s), {}{}, bad primes {{{}}}",
            f.name,
            f.degree,
            f.discriminant,
            certificate(f.certificate),
            f.automorphisms,
            if f.galois { "Galois" } else { "not Galois" },
            f.closure.as_ref().map(|c| format!(", closure {c}")).unwrap_or_default(),
            bad.join(",")
        );
        if let Ok(autos) = lattice.automorphisms(&f.name) {
            if autos.len() > 1 {
                for (i, a) in autos.iter().enumerate() {
                    let _ = writeln!(out, "    auto {i}: x -> {a}");
                }
            }
        }
    }
    if !lattice.embeddings().is_empty() {
        let _ = writeln!(out, "embeddings:");
        for e in lattice.embeddings() {
            let _ = writeln!(out, "  {} -> {}: x -> {}", e.src, e.dst, e.image);
        }
    }
    if !d.pairs.is_empty() {
        let _ = writeln!(out, "excluded primes per extension:");
        for p in &d.pairs {
            let bad: Vec<String> = p.bad_primes.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "  {}/{}: {{{}}}", p.dst, p.src, bad.join(","));
        }
    }
    for w in &d.warnings {
        let _ = writeln!(out, "note: {w}");
    }
}
