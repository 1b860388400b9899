//! Recursive-descent parser for set expressions.
//!
//! ```text
//! expr   := term ('|' term)*
//! term   := factor ('&' factor)*
//! factor := '!' factor | '(' expr ')' | atom
//! atom   := ('Pi' | 'Psi') '(' name '/' name ')' | '{' prime (',' prime)* '}'
//! ```
//!
//! Whitespace is allowed between tokens.

use arithplane_core::arith::is_prime;
use arithplane_core::SetExpr;

use crate::config::is_identifier;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Sym(char),
    Word(String),
    End,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if "|&!(){},/".contains(c) {
            out.push((i + 1, Tok::Sym(c)));
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start + 1, Tok::Word(chars[start..i].iter().collect())));
        } else {
            return Err(ExprError { column: i + 1, message: format!("unexpected character `{c}`") });
        }
    }
    out.push((chars.len() + 1, Tok::End));
    Ok(out)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Word(w) => format!("`{w}`"),
        Tok::End => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn column(&self) -> usize {
        self.toks[self.pos].0
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ExprError> {
        Err(ExprError {
            column: self.column(),
            message: format!("expected {expected}, found {}", describe(self.peek())),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&format!("`{c}`"))
        }
    }

    fn expr(&mut self) -> Result<SetExpr, ExprError> {
        let mut e = self.term()?;
        while self.eat('|') {
            e = e.or(self.term()?);
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<SetExpr, ExprError> {
        let mut e = self.factor()?;
        while self.eat('&') {
            e = e.and(self.factor()?);
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<SetExpr, ExprError> {
        if self.eat('!') {
            return Ok(self.factor()?.complement());
        }
        if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        self.atom()
    }

    fn name(&mut self) -> Result<String, ExprError> {
        match self.peek() {
            Tok::Word(w) if is_identifier(w) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.fail("a field name"),
        }
    }

    fn prime(&mut self) -> Result<u64, ExprError> {
        let column = self.column();
        match self.peek() {
            Tok::Word(w) if w.bytes().all(|b| b.is_ascii_digit()) => {
                let p = w
                    .parse::<u64>()
                    .ok()
                    .filter(|&p| is_prime(p))
                    .ok_or_else(|| ExprError { column, message: format!("`{w}` is not a prime") })?;
                self.pos += 1;
                Ok(p)
            }
            _ => self.fail("a prime"),
        }
    }

    fn atom(&mut self) -> Result<SetExpr, ExprError> {
        if self.eat('{') {
            let mut ps = vec![self.prime()?];
            while self.eat(',') {
                ps.push(self.prime()?);
            }
            self.expect('}')?;
            ps.sort_unstable();
            ps.dedup();
            return Ok(SetExpr::Primes(ps));
        }
        let pred = match self.peek() {
            Tok::Word(w) if w == "Pi" || w == "Psi" => w.clone(),
            _ => return self.fail("`Pi`, `Psi`, `{`, `(` or `!`"),
        };
        self.pos += 1;
        self.expect('(')?;
        let top = self.name()?;
        self.expect('/')?;
        let base = self.name()?;
        self.expect(')')?;
        Ok(if pred == "Pi" { SetExpr::pi(&top, &base) } else { SetExpr::psi(&top, &base) })
    }
}

pub fn parse_expr(src: &str) -> Result<SetExpr, ExprError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("`|`, `&` or end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn atoms() {
        assert_eq!(parse_expr("Psi(Qi/Q)").unwrap(), SetExpr::psi("Qi", "Q"));
        assert_eq!(parse_expr(" Pi ( Q8 / Qi ) ").unwrap(), SetExpr::pi("Q8", "Qi"));
        assert_eq!(parse_expr("{5, 3,5}").unwrap(), SetExpr::Primes(vec![3, 5]));
    }

    #[test]
    fn precedence() {
        let e = parse_expr("Psi(Qi/Q) | {3} & !Pi(Qs2/Q)").unwrap();
        let want = SetExpr::psi("Qi", "Q").or(SetExpr::Primes(vec![3]).and(SetExpr::pi("Qs2", "Q").complement()));
        assert_eq!(e, want);
        let e = parse_expr("!!Psi(Qi/Q)").unwrap();
        assert_eq!(e, SetExpr::psi("Qi", "Q").complement().complement());
        let e = parse_expr("(Psi(Qi/Q) | {3}) & Pi(Qi/Q)").unwrap();
        assert_eq!(e, SetExpr::psi("Qi", "Q").or(SetExpr::Primes(vec![3])).and(SetExpr::pi("Qi", "Q")));
    }

    #[test]
    fn left_associative() {
        let (a, b, c) = (SetExpr::psi("A", "Q"), SetExpr::psi("B", "Q"), SetExpr::psi("C", "Q"));
        assert_eq!(parse_expr("Psi(A/Q) | Psi(B/Q) | Psi(C/Q)").unwrap(), a.clone().or(b.clone()).or(c.clone()));
        assert_eq!(parse_expr("Psi(A/Q) & Psi(B/Q) & Psi(C/Q)").unwrap(), a.and(b).and(c));
    }

    #[test]
    fn error_columns() {
        let cases = [
            ("", 1),
            ("Psi(Qi/Q", 9),
            ("Psi(Qi Q)", 8),
            ("Phi(Qi/Q)", 1),
            ("{4}", 2),
            ("{3,}", 4),
            ("Psi(Qi/Q) Psi(Qi/Q)", 11),
            ("Psi(Qi/Q) + {3}", 11),
            ("()", 2),
            ("Psi(1x/Q)", 5),
        ];
        for (src, column) in cases {
            let e = parse_expr(src).unwrap_err();
            assert_eq!(e.column, column, "{src:?}: {e}");
        }
    }

    fn arb_expr() -> impl Strategy<Value = SetExpr> {
        let leaf = prop_oneof![
            (prop::sample::select(vec!["Qi", "Qs2", "Q8"]), any::<bool>()).prop_map(|(f, pi)| if pi {
                SetExpr::pi(f, "Q")
            } else {
                SetExpr::psi(f, "Q")
            }),
            prop::collection::btree_set(prop::sample::select(vec![2u64, 3, 5, 7, 11, 101]), 1..4)
                .prop_map(|s| SetExpr::Primes(s.into_iter().collect())),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(SetExpr::complement),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner).prop_map(|(a, b)| a.or(b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_round_trips(e in arb_expr()) {
            prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
    }
}
