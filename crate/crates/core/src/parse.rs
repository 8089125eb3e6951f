//! Text input: polynomial and form expressions, ring specs, matrices.
//!
//! Expressions use `x1..x9` (or whatever names the context declares), integer
//! literals, `+ - * / ^` and parentheses. `dx3` is a differential; `a ^ b`
//! is a power when `b` is an integer literal and a wedge product otherwise,
//! so `x1^2*dx1^dx3` parses as expected. `/` divides by a constant.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::form::{Form, IndexSet};
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::ring::{Ring, RingSpec};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(src: &str, column_offset: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1usize, 1 + column_offset);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            out.push(Token { tok: t, line: l0, column: c0 });
            col += 1;
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Num(s.parse().expect("digits")),
                line: l0,
                column: c0,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
        } else {
            return Err(Error::Parse {
                line: l0,
                column: c0,
                message: format!("unexpected character '{c}'"),
            });
        }
        col += i - start;
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

/// Largest `k` such that `xk` or `dxk` occurs in any of the inputs.
pub fn max_x_index(inputs: &[&str]) -> Result<usize> {
    let mut best = 0;
    for s in inputs {
        for t in tokenize(s, 0)? {
            if let Tok::Ident(name) = t.tok {
                let name = name.strip_prefix('d').filter(|r| r.starts_with('x')).unwrap_or(&name);
                if let Some(k) = name.strip_prefix('x').and_then(|r| r.parse::<usize>().ok()) {
                    best = best.max(k);
                }
            }
        }
    }
    Ok(best)
}

/// Names and constants an expression may refer to.
#[derive(Clone, Debug)]
pub struct ExprContext<R: Ring> {
    ring: R,
    names: Vec<String>,
    params: Vec<(String, R::Elem)>,
}

impl<R: Ring> ExprContext<R> {
    /// Variables `x1..x{nvars}`.
    pub fn new(ring: &R, nvars: usize) -> Self {
        Self::with_names(ring, (1..=nvars).map(|i| format!("x{i}")).collect())
    }

    pub fn with_names(ring: &R, names: Vec<String>) -> Self {
        ExprContext {
            ring: ring.clone(),
            names,
            params: Vec::new(),
        }
    }

    /// Lets `name` stand for the ring element `value`.
    pub fn with_param(mut self, name: &str, value: R::Elem) -> Self {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parse_form(&self, src: &str) -> Result<Form<R>> {
        self.parse_form_at(src, 0)
    }

    fn parse_form_at(&self, src: &str, column_offset: usize) -> Result<Form<R>> {
        let toks = tokenize(src, column_offset)?;
        let mut p = Parser { ctx: self, toks, pos: 0 };
        let f = p.sum()?;
        let t = p.peek();
        if t.tok != Tok::End {
            return Err(p.error(t, "unexpected trailing input"));
        }
        Ok(f)
    }

    pub fn parse_poly(&self, src: &str) -> Result<Poly<R>> {
        self.parse_poly_at(src, 0)
    }

    fn parse_poly_at(&self, src: &str, column_offset: usize) -> Result<Poly<R>> {
        let f = self.parse_form_at(src, column_offset)?;
        if f.degrees().iter().any(|&k| k > 0) {
            return Err(Error::Parse {
                line: 1,
                column: 1 + column_offset,
                message: "expected a polynomial, found a differential form".into(),
            });
        }
        Ok(f.component(IndexSet::EMPTY))
    }

    /// A constant: an expression without variables.
    pub fn parse_constant(&self, src: &str) -> Result<R::Elem> {
        self.parse_constant_at(src, 0)
    }

    fn parse_constant_at(&self, src: &str, column_offset: usize) -> Result<R::Elem> {
        let g = self.parse_poly_at(src, column_offset)?;
        if !g.is_constant() {
            return Err(Error::Parse {
                line: 1,
                column: 1 + column_offset,
                message: format!("expected a constant, found '{}'", src.trim()),
            });
        }
        Ok(g.constant_term())
    }

    /// Row-major `[a,b;c,d]` with constant entries.
    pub fn parse_matrix(&self, src: &str) -> Result<Matrix<R>> {
        let err = |column: usize, m: &str| Error::Parse {
            line: 1,
            column,
            message: m.to_string(),
        };
        let open = src.find('[').ok_or_else(|| err(1, "matrix must start with '['"))?;
        if src[..open].trim() != "" {
            return Err(err(1, "matrix must start with '['"));
        }
        let close = src.rfind(']').ok_or_else(|| err(src.len() + 1, "missing ']'"))?;
        if src[close + 1..].trim() != "" {
            return Err(err(close + 2, "unexpected input after ']'"));
        }
        let body = &src[open + 1..close];
        let mut rows = Vec::new();
        let mut offset = open + 1;
        for row in body.split(';') {
            let mut entries = Vec::new();
            let mut col_off = offset;
            for entry in row.split(',') {
                if entry.trim().is_empty() {
                    return Err(err(col_off + 1, "empty matrix entry"));
                }
                entries.push(self.parse_constant_at(entry, col_off)?);
                col_off += entry.len() + 1;
            }
            offset += row.len() + 1;
            rows.push(entries);
        }
        Matrix::from_rows(&self.ring, rows)
            .map_err(|e| err(1, &format!("malformed matrix: {e}")))
    }
}

struct Parser<'a, R: Ring> {
    ctx: &'a ExprContext<R>,
    toks: Vec<Token>,
    pos: usize,
}

impl<R: Ring> Parser<'_, R> {
    fn peek(&self) -> Token {
        self.toks[self.pos].clone()
    }

    fn next(&mut self) -> Token {
        let t = self.peek();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: Token, msg: &str) -> Error {
        Error::Parse {
            line: t.line,
            column: t.column,
            message: msg.to_string(),
        }
    }

    fn constant(&self, c: R::Elem) -> Form<R> {
        let n = self.ctx.nvars();
        Form::function(Poly::constant(&self.ctx.ring, n, c))
    }

    fn sum(&mut self) -> Result<Form<R>> {
        let mut acc = if self.peek().tok == Tok::Minus {
            self.next();
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Form<R>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    acc = acc.wedge(&self.unary()?);
                }
                Tok::Slash => {
                    self.next();
                    let t = self.peek();
                    let d = self.unary()?;
                    let c = match d.degrees().as_slice() {
                        [0] => d.component(IndexSet::EMPTY),
                        _ => return Err(self.error(t, "can only divide by a constant")),
                    };
                    if !c.is_constant() {
                        return Err(self.error(t, "can only divide by a constant"));
                    }
                    let inv = self.ctx.ring.inv(&c.constant_term()).ok_or_else(|| {
                        self.error(t, &format!("{} is not invertible in {}", c, self.ctx.ring))
                    })?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Form<R>> {
        if self.peek().tok == Tok::Minus {
            self.next();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Form<R>> {
        let mut acc = self.atom()?;
        while self.peek().tok == Tok::Caret {
            self.next();
            let t = self.peek();
            if let Tok::Num(e) = &t.tok {
                self.next();
                if acc.degrees().iter().any(|&k| k > 0) {
                    return Err(self.error(t, "cannot raise a differential form to a power"));
                }
                let e = e
                    .to_u32()
                    .ok_or_else(|| self.error(t.clone(), "exponent too large"))?;
                let base = acc.component(IndexSet::EMPTY);
                acc = Form::function(base.pow(e));
            } else {
                acc = acc.wedge(&self.atom()?);
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Form<R>> {
        let t = self.next();
        let ring = &self.ctx.ring;
        let n = self.ctx.nvars();
        match &t.tok {
            Tok::Num(v) => Ok(self.constant(ring.from_bigint(v))),
            Tok::LParen => {
                let inner = self.sum()?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return Err(self.error(close, "expected ')'"));
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(i) = self.ctx.names.iter().position(|s| s == name) {
                    return Ok(Form::function(Poly::var(ring, n, i)));
                }
                if let Some((_, v)) = self.ctx.params.iter().find(|(s, _)| s == name) {
                    return Ok(self.constant(v.clone()));
                }
                if let Some(rest) = name.strip_prefix('d') {
                    if let Some(i) = self.ctx.names.iter().position(|s| s == rest) {
                        return Ok(Form::dx(ring, n, i));
                    }
                }
                let known = match self.ctx.names.len() {
                    0 => "no variables are available".to_string(),
                    _ => format!("known variables: {}", self.ctx.names.join(", ")),
                };
                Err(self.error(t.clone(), &format!("unknown name '{name}' ({known})")))
            }
            Tok::End => Err(self.error(t.clone(), "unexpected end of input")),
            other => Err(self.error(t.clone(), &format!("unexpected {}", describe(other)))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::Num(_) => "number",
        Tok::Ident(_) => "name",
        Tok::End => "end of input",
    }
}

/// A parsed ring spec; `padic:...:D=60` also carries a series cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedRing {
    pub spec: RingSpec,
    pub cutoff: Option<usize>,
}

/// `ZZ`, `QQ`, `Zmod:m`, `series:<base>:<var>:<order>`,
/// `padic:p=<p>:N=<N>[:D=<D>]`.
pub fn parse_ring_spec(src: &str) -> Result<ParsedRing> {
    let parts: Vec<&str> = src.trim().split(':').collect();
    let mut pos = 0;
    let out = ring_spec_at(&parts, &mut pos)?;
    if pos != parts.len() {
        return Err(Error::InvalidRingSpec(format!(
            "unexpected '{}' in ring spec '{src}'",
            parts[pos..].join(":")
        )));
    }
    Ok(out)
}

fn ring_spec_at(parts: &[&str], pos: &mut usize) -> Result<ParsedRing> {
    let bad = |m: String| Error::InvalidRingSpec(m);
    let take = |pos: &mut usize, what: &str| -> Result<String> {
        let s = parts
            .get(*pos)
            .ok_or_else(|| Error::InvalidRingSpec(format!("missing {what}")))?;
        *pos += 1;
        Ok(s.to_string())
    };
    let head = take(pos, "ring kind")?;
    let plain = |spec| ParsedRing { spec, cutoff: None };
    match head.as_str() {
        "ZZ" => Ok(plain(RingSpec::Integers)),
        "QQ" => Ok(plain(RingSpec::Rationals)),
        "Zmod" => {
            let m = take(pos, "modulus")?;
            let m: BigInt = m.parse().map_err(|_| bad(format!("bad modulus '{m}'")))?;
            Ok(plain(RingSpec::modular(m)?))
        }
        "series" => {
            let base = ring_spec_at(parts, pos)?;
            let var = take(pos, "series variable")?;
            if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(bad(format!("bad series variable '{var}'")));
            }
            let order = take(pos, "series order")?;
            let order: usize = order.parse().map_err(|_| bad(format!("bad series order '{order}'")))?;
            Ok(plain(RingSpec::series(base.spec, var, order)?))
        }
        "padic" => {
            let (mut p, mut n, mut d) = (None, None, None);
            while let Some(kv) = parts.get(*pos) {
                let Some((k, v)) = kv.split_once('=') else { break };
                let v: u64 = v.parse().map_err(|_| bad(format!("bad value in '{kv}'")))?;
                match k {
                    "p" => p = Some(v),
                    "N" => n = Some(v),
                    "D" => d = Some(v),
                    _ => return Err(bad(format!("unknown p-adic parameter '{k}'"))),
                }
                *pos += 1;
            }
            let p = p.ok_or_else(|| bad("padic needs p=".into()))?;
            let n = n.ok_or_else(|| bad("padic needs N=".into()))?;
            let n = u32::try_from(n).map_err(|_| bad(format!("precision {n} too large")))?;
            Ok(ParsedRing {
                spec: RingSpec::padic(p, n)?,
                cutoff: d.map(|d| d as usize),
            })
        }
        other => Err(bad(format!("unknown ring kind '{other}'"))),
    }
}

/// Context over a ring spec, with `lambda` bound to the series variable
/// when the ring is a truncated series ring.
pub fn spec_context(spec: &RingSpec, nvars: usize) -> ExprContext<RingSpec> {
    let ctx = ExprContext::new(spec, nvars);
    match spec.series_base() {
        Some((_, var, order)) if order > 1 => {
            let v = spec.series_var_pow(1);
            ctx.with_param(var, v)
        }
        Some((_, var, _)) => ctx.with_param(var, spec.zero()),
        None => ctx,
    }
}

/// Whether `src` mentions `name` as an identifier.
pub fn mentions(src: &str, name: &str) -> bool {
    tokenize(src, 0)
        .map(|ts| ts.iter().any(|t| t.tok == Tok::Ident(name.to_string())))
        .unwrap_or(false)
}

/// Nonzero check used when a flag must not evaluate to zero.
pub fn is_zero_poly<R: Ring>(g: &Poly<R>) -> bool {
    g.is_zero() || (g.is_constant() && g.ring().is_zero(&g.constant_term()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::RatFuncField;

    #[test]
    fn polynomials() {
        let q = RingSpec::Rationals;
        let ctx = ExprContext::new(&q, 2);
        let g = ctx.parse_poly("x1^3/3 - 2*(x1 + x2)^2").unwrap();
        assert_eq!(g, ctx.parse_poly("-2*x1^2 + x1^3/3 - 4*x1*x2 - 2*x2^2").unwrap());
        assert_eq!(ctx.parse_poly("-x1").unwrap(), Poly::var(&q, 2, 0).neg());
    }

    #[test]
    fn forms_use_caret_as_wedge() {
        let z = RingSpec::Integers;
        let ctx = ExprContext::new(&z, 3);
        let w = ctx.parse_form("x2^2 * dx1^dx3 - dx3^dx1").unwrap();
        let expect = Form::monomial(
            ctx.parse_poly("x2^2 + 1").unwrap(),
            IndexSet::from_indices(&[0, 2]),
        );
        assert_eq!(w, expect);
        assert!(ctx.parse_form("dx1^dx1").unwrap().is_zero());
        assert!(ctx.parse_poly("x1*dx1").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let z = RingSpec::Integers;
        let ctx = ExprContext::new(&z, 2);
        match ctx.parse_poly("x1 + x3") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("{other:?}"),
        }
        match ctx.parse_poly("x1 +\n  (x2") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 6)),
            other => panic!("{other:?}"),
        }
        match ctx.parse_poly("x1/2") {
            Err(Error::Parse { column, message, .. }) => {
                assert_eq!(column, 4);
                assert!(message.contains("not invertible"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(ctx.parse_poly("x1 $ 2"), Err(Error::Parse { column: 4, .. })));
    }

    #[test]
    fn ring_specs_round_trip() {
        for s in ["ZZ", "QQ", "Zmod:343", "series:QQ:lambda:8", "series:Zmod:7:lambda:3", "padic:p=5:N=20"] {
            let r = parse_ring_spec(s).unwrap();
            assert_eq!(r.spec.to_string(), s);
            assert_eq!(r.cutoff, None);
        }
        let r = parse_ring_spec("padic:p=5:N=20:D=60").unwrap();
        assert_eq!(r.cutoff, Some(60));
        for bad in ["", "RR", "Zmod", "Zmod:1", "series:QQ:lambda", "series:QQ:lambda:0", "padic:p=4:N=3", "QQ:1"] {
            assert!(matches!(parse_ring_spec(bad), Err(Error::InvalidRingSpec(_))), "{bad}");
        }
    }

    #[test]
    fn matrices() {
        let q = RingSpec::Rationals;
        let ctx = ExprContext::new(&q, 0);
        let m = ctx.parse_matrix("[2, 1/2; 1/2, -1]").unwrap();
        assert_eq!(m.to_string(), "[2,1/2;1/2,-1]");
        match ctx.parse_matrix("[1,2;3,x1]") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 8),
            other => panic!("{other:?}"),
        }
        assert!(ctx.parse_matrix("[1,2;3]").is_err());
    }

    #[test]
    fn parameters() {
        let k = RatFuncField::new("lambda");
        let ctx = ExprContext::new(&k, 1).with_param("lambda", k.param());
        let f = ctx.parse_poly("x1^3/3 - lambda*x1").unwrap();
        assert_eq!(f.to_string(), "1/3*x1^3 - lambda*x1");
        let s = parse_ring_spec("series:ZZ:lambda:4").unwrap().spec;
        let g = spec_context(&s, 1).parse_poly("lambda*x1^3").unwrap();
        assert_eq!(g.degree(), Some(3));
        assert_eq!(max_x_index(&["x1*dx4", "x2"]).unwrap(), 4);
        assert!(mentions("x1 - lambda", "lambda"));
    }
}
