//! The line-oriented lattice configuration format.
//!
//! ```text
//! # comment
//! field Qi
//!   poly 1 0 1
//! field Q8 trusted
//!   poly 1 0 0 0 1
//! embed Qi -> Q8
//!   map 0 0 1
//! auto Qi
//!   map 0 -1
//! closure Qc2 -> S3
//! galois Qi
//! ```
//!
//! Directives start in column 0; `poly` and `map` bodies are indented and
//! belong to the directive above them. Coefficients are constant-first.

use std::fmt;
use std::path::Path;

use arithplane_core::lattice::LatticeError;
use arithplane_core::{IntPoly, Lattice, LatticeBuilder, RatPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based; `None` when the problem is not tied to one line.
    pub line: Option<usize>,
    pub kind: ConfigErrorKind,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
}

pub fn load_lattice_file(path: &Path) -> Result<Lattice, LoadError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse_lattice(&text).map_err(|source| LoadError::Config { path: path.display().to_string(), source })
}

#[derive(Debug)]
enum Decl {
    Field { name: String, trusted: bool, poly: Option<IntPoly> },
    Embed { src: String, dst: String, map: Option<RatPoly> },
    Auto { field: String, map: Option<RatPoly> },
    Closure { field: String, closure: String },
    Galois(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError { line: Some(line), kind: ConfigErrorKind::Syntax(msg.into()) }
}

fn at(line: usize) -> impl Fn(LatticeError) -> ConfigError {
    move |e| ConfigError { line: Some(line), kind: e.into() }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn name(line: usize, s: &str) -> Result<String, ConfigError> {
    if is_identifier(s) {
        Ok(s.to_string())
    } else {
        Err(syntax(line, format!("invalid field name `{s}`")))
    }
}

/// Parses `<a> -> <b>`.
fn arrow(line: usize, args: &[&str], directive: &str) -> Result<(String, String), ConfigError> {
    match args {
        [a, "->", b] => Ok((name(line, a)?, name(line, b)?)),
        _ => Err(syntax(line, format!("expected `{directive} <field> -> <field>`"))),
    }
}

pub fn parse_rational(tok: &str) -> Option<Rational> {
    let (num, den) = match tok.split_once('/') {
        Some((n, d)) => (n.parse::<i128>().ok()?, d.parse::<i128>().ok()?),
        None => (tok.parse::<i128>().ok()?, 1),
    };
    (den != 0).then(|| Rational::new(num, den))
}

/// Whitespace-separated constant-first coefficients, integer or `num/den`.
pub fn parse_rat_poly(text: &str) -> Result<RatPoly, String> {
    let coeffs = text
        .split_whitespace()
        .map(|t| parse_rational(t).ok_or_else(|| format!("bad coefficient `{t}`")))
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.is_empty() {
        return Err("empty coefficient list".into());
    }
    Ok(RatPoly::new(coeffs))
}

pub fn parse_int_poly(text: &str) -> Result<IntPoly, String> {
    let coeffs = text
        .split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| format!("bad integer coefficient `{t}`")))
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.is_empty() {
        return Err("empty coefficient list".into());
    }
    Ok(IntPoly::new(coeffs))
}

fn parse_decls(text: &str) -> Result<Vec<(usize, Decl)>, ConfigError> {
    let mut decls: Vec<(usize, Decl)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let indented = content.starts_with([' ', '\t']);
        if indented {
            let (keyword, rest) = (words[0], content.trim_start()[words[0].len()..].trim());
            let slot = decls.last_mut().map(|(_, d)| d);
            match (keyword, slot) {
                ("poly", Some(Decl::Field { poly: p @ None, .. })) => {
                    *p = Some(parse_int_poly(rest).map_err(|m| syntax(line, m))?);
                }
                ("map", Some(Decl::Embed { map: m @ None, .. } | Decl::Auto { map: m @ None, .. })) => {
                    *m = Some(parse_rat_poly(rest).map_err(|e| syntax(line, e))?);
                }
                ("poly" | "map", _) => {
                    return Err(syntax(line, format!("unexpected `{keyword}` line")));
                }
                _ => return Err(syntax(line, format!("unknown body line `{keyword}`"))),
            }
            continue;
        }
        let args = &words[1..];
        let decl = match words[0] {
            "field" => match args {
                [n] => Decl::Field { name: name(line, n)?, trusted: false, poly: None },
                [n, "trusted"] => Decl::Field { name: name(line, n)?, trusted: true, poly: None },
                _ => return Err(syntax(line, "expected `field <name> [trusted]`")),
            },
            "embed" => {
                let (src, dst) = arrow(line, args, "embed")?;
                Decl::Embed { src, dst, map: None }
            }
            "auto" => match args {
                [f] => Decl::Auto { field: name(line, f)?, map: None },
                _ => return Err(syntax(line, "expected `auto <field>`")),
            },
            "closure" => {
                let (field, closure) = arrow(line, args, "closure")?;
                Decl::Closure { field, closure }
            }
            "galois" => match args {
                [f] => Decl::Galois(name(line, f)?),
                _ => return Err(syntax(line, "expected `galois <field>`")),
            },
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        };
        decls.push((line, decl));
    }
    for (line, d) in &decls {
        let missing = match d {
            Decl::Field { poly: None, .. } => Some("poly"),
            Decl::Embed { map: None, .. } | Decl::Auto { map: None, .. } => Some("map"),
            _ => None,
        };
        if let Some(what) = missing {
            return Err(syntax(*line, format!("missing indented `{what}` line")));
        }
    }
    Ok(decls)
}

/// Parses and validates a lattice document.
pub fn parse_lattice(text: &str) -> Result<Lattice, ConfigError> {
    let decls = parse_decls(text)?;
    let mut b = LatticeBuilder::new();
    // Fields first so that other directives may refer forward.
    for (line, d) in &decls {
        if let Decl::Field { name, trusted, poly: Some(poly) } = d {
            b.add_field(name, poly.clone(), *trusted).map_err(at(*line))?;
        }
    }
    for (line, d) in &decls {
        match d {
            Decl::Embed { src, dst, map: Some(h) } => b.add_embedding(src, dst, h.clone()).map_err(at(*line))?,
            Decl::Auto { field, map: Some(h) } => b.add_automorphism(field, h.clone()).map_err(at(*line))?,
            Decl::Closure { field, closure } => b.add_closure(field, closure).map_err(at(*line))?,
            Decl::Galois(f) => b.assert_galois(f).map_err(at(*line))?,
            _ => {}
        }
    }
    b.build().map_err(|e| ConfigError { line: blame(&decls, &e), kind: e.into() })
}

/// Line of the directive most plausibly responsible for a whole-lattice error.
fn blame(decls: &[(usize, Decl)], e: &LatticeError) -> Option<usize> {
    decls.iter().find_map(|(line, d)| {
        let hit = match (e, d) {
            (LatticeError::GroupNotClosed(f), Decl::Auto { field, .. }) => f == field,
            (LatticeError::GaloisAssertion { field, .. }, Decl::Galois(g)) => field == g,
            (LatticeError::ClosureInvalid { field, closure }, Decl::Closure { field: f, closure: c }) => {
                field == f && closure == c
            }
            (LatticeError::EmbeddingCycle(f), Decl::Embed { src, .. }) => f == src,
            (LatticeError::EmbeddingInconsistent { src, dst, .. }, Decl::Embed { src: s, dst: d, .. }) => {
                src == s && dst == d
            }
            (LatticeError::Overflow(f), Decl::Field { name, .. }) => f == name,
            _ => false,
        };
        hit.then_some(*line)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOWER: &str = "\
field Qi
  poly 1 0 1
field Q8 trusted
  poly 1 0 0 0 1
embed Qi -> Q8
  map 0 0 1
";

    #[test]
    fn tower_parses() {
        let l = parse_lattice(TOWER).unwrap();
        assert_eq!(l.field("Q8").unwrap().degree(), 4);
        assert!(l.extension("Q8", "Qi").is_ok());
    }

    #[test]
    fn empty_document_is_just_q() {
        let l = parse_lattice("").unwrap();
        assert_eq!(l.fields().count(), 1);
        let l = parse_lattice("# nothing\n\n   \n").unwrap();
        assert_eq!(l.fields().count(), 1);
    }

    #[test]
    fn invalid_embedding_names_the_pair() {
        let text = "field Qi\n  poly 1 0 1\nfield Qs2\n  poly -2 0 1\nembed Qi -> Qs2\n  map 0 1\n";
        let e = parse_lattice(text).unwrap_err();
        assert_eq!(e.line, Some(5));
        assert_eq!(
            e.kind,
            ConfigErrorKind::Lattice(LatticeError::EmbeddingInvalid { src: "Qi".into(), dst: "Qs2".into() })
        );
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let cases = [
            ("field Qi\n  poly 1 0 1\nfrobnicate Qi\n", 3),
            ("field Qi\n", 1),
            ("field Qi\n  poly 1 x 1\n", 2),
            ("  poly 1 0 1\n", 1),
            ("field Qi\n  poly 1 0 1\n  poly 1 0 1\n", 3),
            ("embed Qi Q8\n", 1),
            ("field 8Q\n  poly 0 1\n", 1),
            ("auto Qi\n  map 1/0\n", 2),
            ("field Qi extra\n", 1),
        ];
        for (text, line) in cases {
            let e = parse_lattice(text).unwrap_err();
            assert_eq!(e.line, Some(line), "{text:?}: {e}");
            assert!(matches!(e.kind, ConfigErrorKind::Syntax(_)), "{text:?}: {e}");
        }
    }

    #[test]
    fn unknown_field_reference() {
        let e = parse_lattice("galois Qi\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        assert_eq!(e.kind, ConfigErrorKind::Lattice(LatticeError::UnknownField("Qi".into())));
    }

    #[test]
    fn group_errors_are_blamed() {
        let text = "field Qc2\n  poly -2 0 0 1\ngalois Qc2\n";
        let e = parse_lattice(text).unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(matches!(e.kind, ConfigErrorKind::Lattice(LatticeError::GaloisAssertion { count: 1, degree: 3, .. })));
    }

    #[test]
    fn comments_and_rationals() {
        let text = "field Qi # gaussian\n  poly 1 0 1\nauto Qi\n  map 0 -2/2 # -x\n";
        let l = parse_lattice(text).unwrap();
        assert!(l.is_galois("Qi"));
    }

    #[test]
    fn forward_references_are_allowed() {
        let text = "embed Qi -> Q8\n  map 0 0 1\nfield Q8 trusted\n  poly 1 0 0 0 1\nfield Qi\n  poly 1 0 1\n";
        assert!(parse_lattice(text).is_ok());
    }

    #[test]
    fn sample_lattice_loads() {
        let text = include_str!("../lattices/sample.lat");
        let l = parse_lattice(text).unwrap();
        for f in ["Qi", "Qs2", "Q8", "S3"] {
            assert!(l.is_galois(f), "{f}");
        }
        assert!(!l.is_galois("Qc2"));
        assert_eq!(l.closure("Qc2"), Some("S3"));
    }
}
