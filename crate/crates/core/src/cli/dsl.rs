//! The document language:
//!
//! ```text
//! vars n=3 cap=4;
//! poly f = 3/2*x1^2*x3 - x2;
//! form w = x3*dx3 + x1^2*dx1;
//! mv L = x3*@1^@2;
//! map phi { x1 = x1 + x2^2; x3 = 2*x3; }
//! ```
//!
//! Whitespace is free and `#` starts a comment. Products of parenthesized
//! sums are truncated at the cap; a single written monomial above the cap
//! is an error. Map components not assigned are the identity.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exterior::{DiffForm, MultiVector};
use crate::poly::{CoordMap, Monomial, Rational, TruncatedPoly};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Var(usize),
    Dx(usize),
    At(usize),
    Sym(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{}'", s),
            Tok::Int(i) => write!(f, "'{}'", i),
            Tok::Var(i) => write!(f, "'x{}'", i),
            Tok::Dx(i) => write!(f, "'dx{}'", i),
            Tok::At(i) => write!(f, "'@{}'", i),
            Tok::Sym(c) => write!(f, "'{}'", c),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err_at(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let bump = |i: &mut usize, col: &mut usize| {
            *i += 1;
            *col += 1;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            bump(&mut i, &mut col);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut col);
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump(&mut i, &mut col);
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump(&mut i, &mut col);
            }
            let s: String = chars[start..i].iter().collect();
            let index = |p: &str| -> Option<usize> {
                let rest = s.strip_prefix(p)?;
                if !rest.is_empty() && rest.chars().all(|d| d.is_ascii_digit()) {
                    rest.parse().ok()
                } else {
                    None
                }
            };
            let tok = if let Some(k) = index("dx") {
                Tok::Dx(k)
            } else if let Some(k) = index("x") {
                Tok::Var(k)
            } else {
                Tok::Ident(s)
            };
            out.push(Token {
                tok,
                line: l0,
                col: c0,
            });
        } else if c == '@' {
            bump(&mut i, &mut col);
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump(&mut i, &mut col);
            }
            if start == i {
                return Err(err_at(l0, c0, "expected an index after '@'"));
            }
            let s: String = chars[start..i].iter().collect();
            let k = s.parse().map_err(|_| err_at(l0, c0, "index too large"))?;
            out.push(Token {
                tok: Tok::At(k),
                line: l0,
                col: c0,
            });
        } else if "=;+-*/^(){},".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                col: c0,
            });
            bump(&mut i, &mut col);
        } else {
            return Err(err_at(l0, c0, format!("unexpected character '{}'", c)));
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Poly(TruncatedPoly),
    Form(DiffForm),
    Mv(MultiVector),
    Map(CoordMap),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Poly(_) => "poly",
            Object::Form(_) => "form",
            Object::Mv(_) => "mv",
            Object::Map(_) => "map",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslDocument {
    pub n_vars: usize,
    pub cap: u32,
    pub decls: Vec<(String, Object)>,
}

macro_rules! getter {
    ($name:ident, $variant:ident, $ty:ty, $kind:literal) => {
        pub fn $name(&self, name: &str) -> Result<&$ty> {
            match self.get(name)? {
                Object::$variant(v) => Ok(v),
                other => Err(Error::Precondition(format!(
                    "'{}' is a {}, expected a {}",
                    name,
                    other.kind(),
                    $kind
                ))),
            }
        }
    };
}

impl DslDocument {
    pub fn get(&self, name: &str) -> Result<&Object> {
        self.decls
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, o)| o)
            .ok_or_else(|| Error::Precondition(format!("unknown name '{}'", name)))
    }

    getter!(poly, Poly, TruncatedPoly, "poly");
    getter!(form, Form, DiffForm, "form");
    getter!(mv, Mv, MultiVector, "mv");
    getter!(map, Map, CoordMap, "map");

    /// Canonical text; `parse` of it gives back an equal document.
    pub fn to_canonical_string(&self) -> String {
        let mut out = format!("vars n={} cap={};\n", self.n_vars, self.cap);
        for (name, obj) in &self.decls {
            match obj {
                Object::Poly(p) => out.push_str(&format!("poly {} = {};\n", name, p)),
                Object::Form(w) => out.push_str(&format!("form {} = {};\n", name, w)),
                Object::Mv(l) => out.push_str(&format!("mv {} = {};\n", name, l)),
                Object::Map(m) => {
                    out.push_str(&format!("map {} {{\n", name));
                    for (i, c) in m.components().iter().enumerate() {
                        out.push_str(&format!("  x{} = {};\n", i + 1, c));
                    }
                    out.push_str("}\n");
                }
            }
        }
        out
    }
}

impl fmt::Display for DslDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

/// Value of a subexpression.
#[derive(Clone, Debug)]
enum Val {
    Poly(TruncatedPoly),
    Form(DiffForm),
    Mv(MultiVector),
}

impl Val {
    fn kind(&self) -> String {
        match self {
            Val::Poly(_) => "polynomial".into(),
            Val::Form(w) => format!("{}-form", w.degree()),
            Val::Mv(l) => format!("{}-vector", l.degree()),
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    n: usize,
    cap: u32,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, t: &Token, msg: impl Into<String>) -> Error {
        err_at(t.line, t.col, msg)
    }

    fn expect_sym(&mut self, c: char) -> Result<Token> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(t)
        } else {
            Err(self.err(&t, format!("expected '{}', found {}", c, t.tok)))
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect_int(&mut self) -> Result<(BigInt, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Int(v) => Ok((v.clone(), t.clone())),
            other => Err(self.err(&t, format!("expected an integer, found {}", other))),
        }
    }

    fn small_int(&self, v: &BigInt, t: &Token) -> Result<u32> {
        u32::try_from(v).map_err(|_| self.err(t, "integer too large"))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Token> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t),
            other => Err(self.err(&t, format!("expected '{}', found {}", kw, other))),
        }
    }

    fn index(&self, k: usize, t: &Token) -> Result<usize> {
        if k == 0 || k > self.n {
            Err(self.err(t, format!("index out of range: {} (n = {})", k, self.n)))
        } else {
            Ok(k - 1)
        }
    }

    fn header(&mut self) -> Result<()> {
        self.expect_keyword("vars")?;
        self.expect_keyword("n")?;
        self.expect_sym('=')?;
        let (n, t) = self.expect_int()?;
        let n = self.small_int(&n, &t)? as usize;
        if n == 0 {
            return Err(self.err(&t, "n must be positive"));
        }
        self.expect_keyword("cap")?;
        self.expect_sym('=')?;
        let (cap, t) = self.expect_int()?;
        let cap = self.small_int(&cap, &t)?;
        if cap == 0 {
            return Err(self.err(&t, "cap must be positive"));
        }
        self.expect_sym(';')?;
        self.n = n;
        self.cap = cap;
        Ok(())
    }

    fn expr(&mut self) -> Result<Val> {
        let mut acc = self.term()?;
        loop {
            let t = self.peek().clone();
            let neg = match t.tok {
                Tok::Sym('+') => false,
                Tok::Sym('-') => true,
                _ => return Ok(acc),
            };
            self.next();
            let rhs = self.term()?;
            acc = self.add(acc, rhs, neg, &t)?;
        }
    }

    fn add(&self, a: Val, b: Val, neg: bool, t: &Token) -> Result<Val> {
        let mismatch =
            |a: &Val, b: &Val| self.err(t, format!("cannot add a {} and a {}", a.kind(), b.kind()));
        Ok(match (a, b) {
            (Val::Poly(x), Val::Poly(y)) => Val::Poly(if neg { &x - &y } else { &x + &y }),
            (Val::Form(x), Val::Form(y))
                if x.degree() == y.degree() || x.is_zero() || y.is_zero() =>
            {
                let y = if neg { y.scale(&-Rational::one()) } else { y };
                Val::Form(
                    x.try_add(&y)
                        .map_err(|_| mismatch(&Val::Form(x.clone()), &Val::Form(y.clone())))?,
                )
            }
            (Val::Mv(x), Val::Mv(y)) if x.degree() == y.degree() || x.is_zero() || y.is_zero() => {
                let y = if neg { y.scale(&-Rational::one()) } else { y };
                Val::Mv(
                    x.try_add(&y)
                        .map_err(|_| mismatch(&Val::Mv(x.clone()), &Val::Mv(y.clone())))?,
                )
            }
            (a, b) => return Err(mismatch(&a, &b)),
        })
    }

    fn term(&mut self) -> Result<Val> {
        let start = self.peek().clone();
        let mut neg = false;
        while let Tok::Sym(c @ ('+' | '-')) = self.peek().tok {
            neg ^= c == '-';
            self.next();
        }
        let mut literal_degree = 0u32;
        let mut acc = self.factor(&mut literal_degree)?;
        while self.is_sym('*') {
            let t = self.next();
            let rhs = self.factor(&mut literal_degree)?;
            acc = self.mul(acc, rhs, &t)?;
        }
        if literal_degree > self.cap {
            return Err(self.err(
                &start,
                format!(
                    "monomial of degree {} exceeds cap {}",
                    literal_degree, self.cap
                ),
            ));
        }
        if neg {
            let m = -Rational::one();
            acc = match acc {
                Val::Poly(p) => Val::Poly(p.scale(&m)),
                Val::Form(w) => Val::Form(w.scale(&m)),
                Val::Mv(l) => Val::Mv(l.scale(&m)),
            };
        }
        Ok(acc)
    }

    fn mul(&self, a: Val, b: Val, t: &Token) -> Result<Val> {
        Ok(match (a, b) {
            (Val::Poly(x), Val::Poly(y)) => Val::Poly(&x * &y),
            (Val::Poly(f), Val::Form(w)) | (Val::Form(w), Val::Poly(f)) => Val::Form(w.mul_fn(&f)),
            (Val::Poly(f), Val::Mv(l)) | (Val::Mv(l), Val::Poly(f)) => Val::Mv(l.mul_fn(&f)),
            (a, b) => {
                return Err(self.err(
                    t,
                    format!(
                        "cannot multiply a {} by a {}; join basis elements with '^'",
                        a.kind(),
                        b.kind()
                    ),
                ))
            }
        })
    }

    fn factor(&mut self, literal_degree: &mut u32) -> Result<Val> {
        let t = self.next();
        let (n, cap) = (self.n, self.cap);
        match t.tok.clone() {
            Tok::Int(a) => {
                let mut c = Rational::from_integer(a);
                if self.is_sym('/') {
                    self.next();
                    let (b, tb) = self.expect_int()?;
                    if b.is_zero() {
                        return Err(self.err(&tb, "division by zero"));
                    }
                    c /= Rational::from_integer(b);
                }
                Ok(Val::Poly(TruncatedPoly::constant(c, n, cap)))
            }
            Tok::Var(k) => {
                let i = self.index(k, &t)?;
                let mut e = 1;
                if self.is_sym('^') {
                    self.next();
                    let (v, te) = self.expect_int()?;
                    e = self.small_int(&v, &te)?;
                }
                *literal_degree += e;
                if e > cap {
                    return Err(self.err(&t, format!("x{}^{} exceeds cap {}", k, e, cap)));
                }
                Ok(Val::Poly(TruncatedPoly::monomial(
                    Monomial::var(i, n).with_exp(i, e),
                    Rational::one(),
                    cap,
                )))
            }
            Tok::Dx(_) | Tok::At(_) => {
                let covariant = matches!(t.tok, Tok::Dx(_));
                let mut idx = Vec::new();
                let mut cur = t.clone();
                loop {
                    let k = match (&cur.tok, covariant) {
                        (Tok::Dx(k), true) | (Tok::At(k), false) => *k,
                        (other, _) => {
                            return Err(self.err(
                                &cur,
                                format!(
                                    "expected {} basis element, found {}",
                                    if covariant { "a dx" } else { "an @" },
                                    other
                                ),
                            ))
                        }
                    };
                    let i = self.index(k, &cur)?;
                    if idx.contains(&i) {
                        return Err(self.err(&cur, "repeated basis element"));
                    }
                    idx.push(i);
                    if !self.is_sym('^') {
                        break;
                    }
                    self.next();
                    cur = self.next();
                }
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                let sign = crate::exterior::sort_with_sign(&idx)
                    .map(|(_, s)| s)
                    .unwrap_or(1);
                let c = TruncatedPoly::constant(Rational::from_integer(sign.into()), n, cap);
                Ok(if covariant {
                    Val::Form(DiffForm::term(c, &sorted))
                } else {
                    Val::Mv(MultiVector::term(c, &sorted))
                })
            }
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                if self.is_sym('^') {
                    self.next();
                    let (e, te) = self.expect_int()?;
                    let e = self.small_int(&e, &te)?;
                    return match v {
                        Val::Poly(p) => Ok(Val::Poly(p.pow(e))),
                        other => {
                            Err(self
                                .err(&te, format!("cannot raise a {} to a power", other.kind())))
                        }
                    };
                }
                Ok(v)
            }
            other => Err(self.err(&t, format!("unexpected {}", other))),
        }
    }

    fn to_object(&self, kind: &str, v: Val, t: &Token) -> Result<Object> {
        match (kind, v) {
            ("poly", Val::Poly(p)) => Ok(Object::Poly(p)),
            ("form", Val::Poly(p)) => Ok(Object::Form(DiffForm::scalar(p))),
            ("form", Val::Form(w)) => Ok(Object::Form(w)),
            ("mv", Val::Poly(p)) => Ok(Object::Mv(MultiVector::scalar(p))),
            ("mv", Val::Mv(l)) => Ok(Object::Mv(l)),
            (k, v) => Err(self.err(t, format!("a {} declaration cannot hold a {}", k, v.kind()))),
        }
    }

    fn map_block(&mut self) -> Result<Object> {
        let open = self.expect_sym('{')?;
        let (n, cap) = (self.n, self.cap);
        let mut comps: Vec<Option<TruncatedPoly>> = vec![None; n];
        while !self.is_sym('}') {
            let t = self.next();
            let i = match t.tok {
                Tok::Var(k) => self.index(k, &t)?,
                ref other => {
                    return Err(self.err(&t, format!("expected a coordinate x<i>, found {}", other)))
                }
            };
            if comps[i].is_some() {
                return Err(self.err(&t, format!("x{} assigned twice", i + 1)));
            }
            self.expect_sym('=')?;
            let e = self.peek().clone();
            match self.expr()? {
                Val::Poly(p) => comps[i] = Some(p),
                other => {
                    return Err(self.err(
                        &e,
                        format!("map component must be a polynomial, not a {}", other.kind()),
                    ))
                }
            }
            self.expect_sym(';')?;
        }
        self.next();
        if self.is_sym(';') {
            self.next();
        }
        let comps = comps
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.unwrap_or_else(|| TruncatedPoly::var(i, n, cap)))
            .collect();
        CoordMap::new(comps)
            .map(Object::Map)
            .map_err(|e| self.err(&open, e.to_string()))
    }
}

/// Parses a document; errors carry line and column (1-based).
pub fn parse(text: &str) -> Result<DslDocument> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        n: 0,
        cap: 0,
    };
    p.header()?;
    let mut names = HashSet::new();
    let mut decls = Vec::new();
    loop {
        let t = p.next();
        let kind = match &t.tok {
            Tok::Eof => break,
            Tok::Ident(k) if ["poly", "form", "mv", "map"].contains(&k.as_str()) => k.clone(),
            other => {
                return Err(p.err(
                    &t,
                    format!(
                        "expected a declaration (poly, form, mv, map), found {}",
                        other
                    ),
                ))
            }
        };
        let nt = p.next();
        let name = match &nt.tok {
            Tok::Ident(s) if !["poly", "form", "mv", "map", "vars"].contains(&s.as_str()) => {
                s.clone()
            }
            other => return Err(p.err(&nt, format!("expected a name, found {}", other))),
        };
        if !names.insert(name.clone()) {
            return Err(p.err(&nt, format!("duplicate name '{}'", name)));
        }
        let obj = if kind == "map" {
            p.map_block()?
        } else {
            p.expect_sym('=')?;
            let e = p.peek().clone();
            let v = p.expr()?;
            p.expect_sym(';')?;
            p.to_object(&kind, v, &e)?
        };
        decls.push((name, obj));
    }
    Ok(DslDocument {
        n_vars: p.n,
        cap: p.cap,
        decls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn examples() {
        let d = parse("vars n=3 cap=4; form w = x3*dx3 + x1^2*dx1;").unwrap();
        let w = d.form("w").unwrap();
        assert_eq!(w.num_terms(), 2);
        assert_eq!(w.coeff(&[0]).to_canonical_string(), "x1^2");

        let d = parse("vars n=3 cap=4;\nmv L = x3*@1^@2;").unwrap();
        let l = d.mv("L").unwrap();
        assert_eq!(l.degree(), 2);
        assert_eq!(l.coeff(&[0, 1]), TruncatedPoly::var(2, 3, 4));

        let e = parse("vars n=3 cap=4;\nform w = dx4;").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 2,
                col: 10,
                msg: "index out of range: 4 (n = 3)".into()
            }
        );
    }

    #[test]
    fn arithmetic_and_signs() {
        let d = parse("vars n=2 cap=3; poly f = -(x1 - 1/2*x2)^2 + 3; form w = dx2^dx1; map m { x2 = x2 + x1^2; }")
            .unwrap();
        let x = |i| TruncatedPoly::var(i, 2, 3);
        let f = (&x(0) - &x(1).scale(&rat(1, 2))).pow(2).scale(&rat(-1, 1))
            + TruncatedPoly::from_int(3, 2, 3);
        assert_eq!(d.poly("f").unwrap(), &f);
        assert_eq!(
            d.form("w").unwrap().coeff(&[0, 1]),
            TruncatedPoly::from_int(-1, 2, 3)
        );
        assert_eq!(d.map("m").unwrap().component(1), &(&x(1) + &x(0).pow(2)));
    }

    #[test]
    fn errors_carry_positions() {
        let cases = [
            ("vars n=2 cap=2; poly f = x1^3;", 1, 26, "exceeds cap"),
            ("vars n=2 cap=2; poly f = x1*x2*x1;", 1, 26, "exceeds cap"),
            (
                "vars n=2 cap=2;\npoly f = 1;\npoly f = 2;",
                3,
                6,
                "duplicate name",
            ),
            (
                "vars n=2 cap=2; form w = dx1 + dx1^dx2;",
                1,
                30,
                "cannot add",
            ),
            (
                "vars n=2 cap=2; form w = dx1 * dx2;",
                1,
                30,
                "cannot multiply",
            ),
            (
                "vars n=2 cap=2; poly f = 1 $ 2;",
                1,
                28,
                "unexpected character",
            ),
            ("vars n=2; poly f = 1;", 1, 9, "expected 'cap'"),
            (
                "vars n=2 cap=2; map m { x1 = x1 + 1; }",
                1,
                23,
                "constant term",
            ),
            (
                "vars n=2 cap=2; mv L = @1^dx2;",
                1,
                27,
                "expected an @ basis element",
            ),
            ("vars n=2 cap=2; poly f = 1/0;", 1, 28, "division by zero"),
        ];
        for (text, line, col, msg) in cases {
            match parse(text) {
                Err(Error::Parse {
                    line: l,
                    col: c,
                    msg: m,
                }) => {
                    assert_eq!((l, c), (line, col), "{}: {}", text, m);
                    assert!(m.contains(msg), "{}: {}", text, m);
                }
                other => panic!("{}: {:?}", text, other),
            }
        }
    }

    #[test]
    fn canonical_round_trip() {
        let text = "vars n=3 cap=4; # header\n poly f = x2 - 3/2*x1^2*x3;\n form w = (x1 + x2)*dx2^dx1 - x3*dx1^dx3;\n mv L = x3*@1^@2 + @2^@3;\n map phi { x1 = x1 + x2^2; }";
        let d = parse(text).unwrap();
        let printed = d.to_canonical_string();
        let d2 = parse(&printed).unwrap();
        assert_eq!(d, d2);
        assert_eq!(printed, d2.to_canonical_string());
    }
}
