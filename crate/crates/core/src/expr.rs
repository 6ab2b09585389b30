//! Linear expressions over named basis classes, e.g. "(W1+N_5+N_6)/2" or "-2e1_1-3e2_1".

use crate::arith::Q;
use crate::error::{LatticeError, Result};
use crate::matrix::{vadd, vscale, vsub};
use num_traits::Zero;
use std::collections::HashMap;

#[derive(Clone, Debug, Default)]
pub struct Symbols {
    dim: usize,
    table: HashMap<String, Vec<Q>>,
}

impl Symbols {
    pub fn new(dim: usize) -> Self {
        Symbols { dim, table: HashMap::new() }
    }

    /// Symbols naming the unit vectors of a labelled basis.
    pub fn from_labels(labels: &[String]) -> Self {
        let mut s = Symbols::new(labels.len());
        for (i, l) in labels.iter().enumerate() {
            s.insert(l, crate::matrix::unit(labels.len(), i));
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn insert(&mut self, name: &str, v: Vec<Q>) {
        assert_eq!(v.len(), self.dim, "symbol {name} has wrong length");
        self.table.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&Vec<Q>> {
        self.table.get(name)
    }

    /// Evaluates and binds the result to a new name.
    pub fn define(&mut self, name: &str, expr: &str) -> Result<Vec<Q>> {
        let v = self.eval(expr)?;
        self.insert(name, v.clone());
        Ok(v)
    }

    /// Writes v as a combination of the named classes, e.g. "(2t1+N_1-N_2)/2".
    pub fn express(&self, names: &[&str], v: &[Q]) -> Option<String> {
        let rows: Option<Vec<Vec<Q>>> = names.iter().map(|n| self.get(n).cloned()).collect();
        let m = crate::matrix::QMatrix::from_rows(rows?, self.dim);
        let c = m.solve_left(v)?;
        Some(format_combination(names, &c))
    }

    pub fn eval(&self, s: &str) -> Result<Vec<Q>> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0, syms: self };
        let v = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(LatticeError::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }
}

/// "(a-2b+c)/2" from names and rational coefficients.
pub fn format_combination(names: &[&str], c: &[Q]) -> String {
    let d = crate::arith::common_denom(c.iter());
    let mut out = String::new();
    for (n, x) in names.iter().zip(c) {
        if x.is_zero() {
            continue;
        }
        let k = (x * Q::from_integer(d.clone())).to_integer();
        let neg = k < 0.into();
        let a = if neg { -k } else { k };
        if neg {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if a != 1.into() {
            out.push_str(&a.to_string());
        }
        out.push_str(n);
    }
    if out.is_empty() {
        return "0".into();
    }
    if d == 1.into() {
        out
    } else {
        format!("({out})/{d}")
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => { out.push(Tok::Plus); i += 1; }
            '-' | '−' => { out.push(Tok::Minus); i += 1; }
            '*' | '·' => { out.push(Tok::Star); i += 1; }
            '/' => { out.push(Tok::Slash); i += 1; }
            '(' => { out.push(Tok::LParen); i += 1; }
            ')' => { out.push(Tok::RParen); i += 1; }
            d if d.is_ascii_digit() => {
                let st = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let n: String = cs[st..i].iter().collect();
                out.push(Tok::Num(Q::from_integer(n.parse().unwrap())));
            }
            a if a.is_ascii_alphabetic() => {
                let st = i;
                while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                    i += 1;
                }
                out.push(Tok::Ident(cs[st..i].iter().collect()));
            }
            other => return Err(LatticeError::Parse(format!("unexpected character {other:?} in {s:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    syms: &'a Symbols,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Vec<Q>> {
        let mut acc = vec![Q::zero(); self.syms.dim];
        let mut sign = match self.peek() {
            Some(Tok::Minus) => { self.pos += 1; false }
            Some(Tok::Plus) => { self.pos += 1; true }
            _ => true,
        };
        loop {
            let t = self.term()?;
            acc = if sign { vadd(&acc, &t) } else { vsub(&acc, &t) };
            match self.peek() {
                Some(Tok::Plus) => { self.pos += 1; sign = true; }
                Some(Tok::Minus) => { self.pos += 1; sign = false; }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Vec<Q>> {
        let mut coef = Q::from_integer(1.into());
        if let Some(Tok::Num(n)) = self.peek().cloned() {
            self.pos += 1;
            coef = n;
            if let Some(Tok::Star) = self.peek() {
                self.pos += 1;
            }
            // "3/4 x" style rational coefficient
            if let (Some(Tok::Slash), Some(Tok::Num(d))) = (self.toks.get(self.pos), self.toks.get(self.pos + 1)) {
                if matches!(self.toks.get(self.pos + 2), Some(Tok::Ident(_)) | Some(Tok::LParen)) {
                    coef /= d.clone();
                    self.pos += 2;
                }
            }
        }
        let mut v = match self.next() {
            Some(Tok::Ident(name)) => self
                .syms
                .get(&name)
                .cloned()
                .ok_or_else(|| LatticeError::Unknown(name.clone()))?,
            Some(Tok::LParen) => {
                let v = self.expr()?;
                if self.next() != Some(Tok::RParen) {
                    return Err(LatticeError::Parse("missing ')'".into()));
                }
                v
            }
            t => return Err(LatticeError::Parse(format!("expected a class, found {t:?}"))),
        };
        while let Some(Tok::Slash) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(d)) if !d.is_zero() => coef /= d,
                t => return Err(LatticeError::Parse(format!("expected a divisor, found {t:?}"))),
            }
        }
        v = vscale(&v, &coef);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qf};

    fn syms() -> Symbols {
        let labels: Vec<String> = ["a", "b", "N_5", "t11"].iter().map(|s| s.to_string()).collect();
        Symbols::from_labels(&labels)
    }

    #[test]
    fn parses_linear_forms() {
        let s = syms();
        assert_eq!(s.eval("-2a-3b").unwrap(), vec![q(-2), q(-3), q(0), q(0)]);
        assert_eq!(s.eval("(a+N_5+t11)/2").unwrap(), vec![qf(1, 2), q(0), qf(1, 2), qf(1, 2)]);
        assert_eq!(s.eval("t11-3t11+2*(a-b)").unwrap(), vec![q(2), q(-2), q(0), q(-2)]);
        assert_eq!(s.eval("3/4 a").unwrap(), vec![qf(3, 4), q(0), q(0), q(0)]);
    }

    #[test]
    fn express_round_trips() {
        let s = syms();
        let v = s.eval("(a+N_5)/2-3t11").unwrap();
        let e = s.express(&["a", "b", "N_5", "t11"], &v).unwrap();
        assert_eq!(e, "(a+N_5-6t11)/2");
        assert_eq!(s.eval(&e).unwrap(), v);
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(matches!(syms().eval("a+zz"), Err(LatticeError::Unknown(_))));
        assert!(syms().eval("(a+b").is_err());
    }
}
