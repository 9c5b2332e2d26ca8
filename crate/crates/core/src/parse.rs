//! Text notation for numbers, points, maps and one-parameter families.
//!
//! * numbers: `3`, `-1/2`, `1+2*sqrt(5)`, `(1+sqrt(5))/2`, `i`
//! * points: `2:1`, `(1:sqrt(2))`, products as `1:2;1:5`
//! * maps: `P1:[x^2 - y^2, x*y]`, `P1 -> P1 : [...]`, `P1xP1:[x^2,y^2];[x^3,y^3]`,
//!   or an affine polynomial in `x` such as `x^2 - 1`
//! * families: an affine polynomial in `x` and one parameter, e.g. `x^2 + c`

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{rat_int, AlgNum, Rat};
use crate::error::{DynError, Result};
use crate::poly::{default_var_names, HomPoly};
use crate::projective::{PolyEndo, ProjPoint};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str, base_col: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = base_col + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((Tok::Num(text.parse().expect("digits")), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(DynError::parse(
                col,
                format!("unexpected character '{}'", c),
            ));
        }
    }
    Ok(out)
}

/// Operations the expression grammar needs from a value type.
trait Algebra: Sized + Clone {
    fn int(n: BigInt) -> Self;
    fn ident(&self, name: &str, col: usize) -> Result<Self>;
    fn call(&self, name: &str, arg: Self, col: usize) -> Result<Self>;
    fn add(a: Self, b: Self, col: usize) -> Result<Self>;
    fn sub(a: Self, b: Self, col: usize) -> Result<Self>;
    fn mul(a: Self, b: Self, col: usize) -> Result<Self>;
    fn div(a: Self, b: Self, col: usize) -> Result<Self>;
    fn neg(a: Self) -> Self;
    fn pow(a: Self, e: u32, col: usize) -> Result<Self>;
}

struct Parser<'a, A: Algebra> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    ctx: &'a A,
}

impl<'a, A: Algebra> Parser<'a, A> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.end_col)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<A> {
        let mut acc = self.term()?;
        loop {
            let col = self.col();
            if self.eat('+') {
                acc = A::add(acc, self.term()?, col)?;
            } else if self.eat('-') {
                acc = A::sub(acc, self.term()?, col)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<A> {
        let mut acc = self.unary()?;
        loop {
            let col = self.col();
            if self.eat('*') {
                acc = A::mul(acc, self.unary()?, col)?;
            } else if self.eat('/') {
                acc = A::div(acc, self.unary()?, col)?;
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                acc = A::mul(acc, self.power()?, col)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<A> {
        if self.eat('-') {
            return Ok(A::neg(self.unary()?));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<A> {
        let base = self.atom()?;
        let col = self.col();
        if self.eat('^') {
            let ecol = self.col();
            match self.toks.get(self.pos).cloned() {
                Some((Tok::Num(n), _)) => {
                    self.pos += 1;
                    let e = n
                        .to_u32()
                        .filter(|&e| e <= 256)
                        .ok_or_else(|| DynError::parse(ecol, "exponent too large"))?;
                    A::pow(base, e, col)
                }
                _ => Err(DynError::parse(
                    ecol,
                    "expected a nonnegative integer exponent",
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<A> {
        let col = self.col();
        match self.toks.get(self.pos).cloned() {
            Some((Tok::Num(n), _)) => {
                self.pos += 1;
                Ok(A::int(n))
            }
            Some((Tok::Ident(name), _)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Op('(')) {
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(DynError::parse(self.col(), "expected ')'"));
                    }
                    return self.ctx.call(&name, arg, col);
                }
                self.ctx.ident(&name, col)
            }
            Some((Tok::Op('('), _)) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(DynError::parse(self.col(), "expected ')'"));
                }
                Ok(v)
            }
            Some((Tok::Op(c), _)) => Err(DynError::parse(col, format!("unexpected '{}'", c))),
            None => Err(DynError::parse(col, "unexpected end of input")),
        }
    }
}

fn parse_with<A: Algebra>(s: &str, base_col: usize, ctx: &A) -> Result<A> {
    let toks = tokenize(s, base_col)?;
    let end_col = base_col + s.chars().count();
    let mut p = Parser {
        toks,
        pos: 0,
        end_col,
        ctx,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(DynError::parse(p.col(), "trailing input"));
    }
    Ok(v)
}

impl Algebra for AlgNum {
    fn int(n: BigInt) -> Self {
        AlgNum::from(n)
    }
    fn ident(&self, name: &str, col: usize) -> Result<Self> {
        match name {
            "i" => Ok(AlgNum::sqrt_int(-1)),
            _ => Err(DynError::parse(col, format!("unknown symbol '{}'", name))),
        }
    }
    fn call(&self, name: &str, arg: Self, col: usize) -> Result<Self> {
        if name != "sqrt" {
            return Err(DynError::parse(col, format!("unknown function '{}'", name)));
        }
        let r = arg
            .as_rat()
            .filter(|r| r.is_integer())
            .and_then(|r| r.to_integer().to_i64())
            .ok_or_else(|| DynError::parse(col, "sqrt takes an integer argument"))?;
        if r == 0 {
            return Ok(AlgNum::zero());
        }
        Ok(AlgNum::sqrt_int(r))
    }
    fn add(a: Self, b: Self, col: usize) -> Result<Self> {
        a.try_add(&b)
            .map_err(|e| DynError::parse(col, e.to_string()))
    }
    fn sub(a: Self, b: Self, col: usize) -> Result<Self> {
        a.try_sub(&b)
            .map_err(|e| DynError::parse(col, e.to_string()))
    }
    fn mul(a: Self, b: Self, col: usize) -> Result<Self> {
        a.try_mul(&b)
            .map_err(|e| DynError::parse(col, e.to_string()))
    }
    fn div(a: Self, b: Self, col: usize) -> Result<Self> {
        a.try_div(&b)
            .map_err(|e| DynError::parse(col, e.to_string()))
    }
    fn neg(a: Self) -> Self {
        AlgNum::neg(&a)
    }
    fn pow(a: Self, e: u32, col: usize) -> Result<Self> {
        a.pow(e)
            .map_err(|err| DynError::parse(col, err.to_string()))
    }
}

fn parse_algnum_at(s: &str, base_col: usize) -> Result<AlgNum> {
    // the context value is unused for numbers; any element works
    parse_with(s, base_col, &AlgNum::zero())
}

pub fn parse_algnum(s: &str) -> Result<AlgNum> {
    parse_algnum_at(s, 1)
}

/// Rational number such as `-3/4`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    match parse_algnum(s)? {
        AlgNum::Rat(r) => Ok(r),
        AlgNum::Quad(_) => Err(DynError::parse(1, format!("'{}' is not rational", s))),
    }
}

fn split_with_cols(s: &str, sep: char, base_col: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        if c == sep {
            out.push((&s[start..i], base_col + s[..start].chars().count()));
            start = i + c.len_utf8();
        }
    }
    out.push((&s[start..], base_col + s[..start].chars().count()));
    out
}

fn strip_parens(s: &str, col: usize) -> (&str, usize) {
    let lead = s.len() - s.trim_start().len();
    let t = s.trim();
    let col = col + lead;
    if t.starts_with('(') && t.ends_with(')') && t.len() >= 2 {
        (&t[1..t.len() - 1], col + 1)
    } else {
        (t, col)
    }
}

pub fn parse_point(s: &str) -> Result<ProjPoint> {
    let mut blocks = Vec::new();
    for (part, col) in split_with_cols(s, ';', 1) {
        let (inner, col) = strip_parens(part, col);
        let coords = split_with_cols(inner, ':', col)
            .into_iter()
            .map(|(c, ccol)| parse_algnum_at(c, ccol))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() < 2 {
            return Err(DynError::parse(
                col,
                "a projective point needs ':'-separated coordinates",
            ));
        }
        blocks.push(coords);
    }
    ProjPoint::new(blocks)
}

/// Polynomials with rational coefficients in named variables.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RatPoly {
    vars: std::rc::Rc<Vec<String>>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl RatPoly {
    fn constant(vars: &std::rc::Rc<Vec<String>>, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars.len()], c);
        }
        RatPoly {
            vars: vars.clone(),
            terms,
        }
    }

    fn combine(mut a: Self, b: Self, sign: i64) -> Self {
        for (e, c) in b.terms {
            let entry = a.terms.entry(e).or_insert_with(Rat::zero);
            *entry += c * rat_int(sign);
        }
        a.terms.retain(|_, c| !c.is_zero());
        a
    }

    fn product(a: &Self, b: &Self) -> Self {
        let mut terms: BTreeMap<Vec<u32>, Rat> = BTreeMap::new();
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert_with(Rat::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        RatPoly {
            vars: a.vars.clone(),
            terms,
        }
    }

    fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            if e.iter().all(|&k| k == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }
}

impl Algebra for RatPoly {
    fn int(n: BigInt) -> Self {
        // variables are attached when the value meets a context-built operand
        RatPoly {
            vars: std::rc::Rc::new(Vec::new()),
            terms: if n.is_zero() {
                BTreeMap::new()
            } else {
                BTreeMap::from([(Vec::new(), Rat::from_integer(n))])
            },
        }
    }
    fn ident(&self, name: &str, col: usize) -> Result<Self> {
        let idx = self.vars.iter().position(|v| v == name).ok_or_else(|| {
            DynError::parse(
                col,
                format!(
                    "unknown variable '{}' (expected one of {})",
                    name,
                    self.vars.join(", ")
                ),
            )
        })?;
        let mut e = vec![0; self.vars.len()];
        e[idx] = 1;
        Ok(RatPoly {
            vars: self.vars.clone(),
            terms: BTreeMap::from([(e, Rat::one())]),
        })
    }
    fn call(&self, name: &str, _arg: Self, col: usize) -> Result<Self> {
        Err(DynError::parse(
            col,
            format!("functions are not allowed in maps ('{}')", name),
        ))
    }
    fn add(a: Self, b: Self, _col: usize) -> Result<Self> {
        let (a, b) = unify(a, b);
        Ok(RatPoly::combine(a, b, 1))
    }
    fn sub(a: Self, b: Self, _col: usize) -> Result<Self> {
        let (a, b) = unify(a, b);
        Ok(RatPoly::combine(a, b, -1))
    }
    fn mul(a: Self, b: Self, _col: usize) -> Result<Self> {
        let (a, b) = unify(a, b);
        Ok(RatPoly::product(&a, &b))
    }
    fn div(a: Self, b: Self, col: usize) -> Result<Self> {
        let (a, b) = unify(a, b);
        let c = b
            .as_constant()
            .ok_or_else(|| DynError::parse(col, "division is only allowed by constants"))?;
        if c.is_zero() {
            return Err(DynError::parse(col, "division by zero"));
        }
        let inv = RatPoly::constant(&a.vars, c.recip());
        Ok(RatPoly::product(&a, &inv))
    }
    fn neg(a: Self) -> Self {
        RatPoly {
            vars: a.vars.clone(),
            terms: a.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
    fn pow(a: Self, e: u32, _col: usize) -> Result<Self> {
        let mut acc = RatPoly::constant(&a.vars, Rat::one());
        if a.vars.is_empty() {
            acc.terms = a
                .as_constant()
                .map(|_| BTreeMap::from([(Vec::new(), Rat::one())]))
                .unwrap();
        }
        for _ in 0..e {
            acc = RatPoly::product(&acc, &a);
        }
        Ok(acc)
    }
}

/// Lifts bare constants (built without a variable list) into the other operand's variables.
fn unify(a: RatPoly, b: RatPoly) -> (RatPoly, RatPoly) {
    let lift = |p: RatPoly, vars: &std::rc::Rc<Vec<String>>| {
        if p.vars.len() == vars.len() {
            return p;
        }
        let c = p.as_constant().expect("bare constants only");
        RatPoly::constant(vars, c)
    };
    if a.vars.len() >= b.vars.len() {
        let vars = a.vars.clone();
        (a, lift(b, &vars))
    } else {
        let vars = b.vars.clone();
        (lift(a, &vars), b)
    }
}

fn parse_ratpoly(s: &str, vars: &[String], base_col: usize) -> Result<RatPoly> {
    let ctx = RatPoly {
        vars: std::rc::Rc::new(vars.to_vec()),
        terms: BTreeMap::new(),
    };
    let p = parse_with(s, base_col, &ctx)?;
    let vars = ctx.vars.clone();
    Ok(unify(p, RatPoly::constant(&vars, Rat::zero())).0)
}

fn block_from_ratpolys(polys: Vec<RatPoly>, col: usize) -> Result<Vec<HomPoly>> {
    let lcm = polys
        .iter()
        .flat_map(|p| p.terms.values())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scale = Rat::from_integer(lcm);
    let n = polys[0].vars.len();
    let out: Vec<HomPoly> = polys
        .iter()
        .map(|p| {
            HomPoly::from_terms(
                n,
                p.terms
                    .iter()
                    .map(|(e, c)| (e.clone(), (c * &scale).to_integer())),
            )
        })
        .collect();
    if out
        .iter()
        .any(|p| !p.is_zero() && p.homogeneous_degree().is_none())
    {
        return Err(DynError::parse(
            col,
            "polynomials in a block must be homogeneous",
        ));
    }
    Ok(out)
}

fn parse_ambient(s: &str, col: usize) -> Result<Vec<usize>> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut dims = Vec::new();
    for part in cleaned.split(['x', 'X']) {
        let n = part
            .strip_prefix('P')
            .or_else(|| part.strip_prefix('p'))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&d| d >= 1)
            .ok_or_else(|| DynError::parse(col, format!("bad ambient factor '{}'", part)))?;
        dims.push(n);
    }
    Ok(dims)
}

/// Variable names accepted in a block with `n + 1` coordinates.
fn block_var_sets(n: usize) -> Vec<Vec<String>> {
    let generic: Vec<String> = (0..=n).map(|i| format!("x{}", i)).collect();
    let short = default_var_names(n + 1);
    if short == generic {
        vec![generic]
    } else {
        vec![short, generic]
    }
}

pub fn parse_map(s: &str) -> Result<PolyEndo> {
    let Some(colon) = s.find(':') else {
        return parse_affine_map(s);
    };
    let head = &s[..colon];
    let head_src = head.split("->").next().unwrap();
    let dims = parse_ambient(head_src, 1)?;
    if let Some(target) = head.split("->").nth(1) {
        let tcol = head.find("->").unwrap() + 3;
        if parse_ambient(target, tcol)? != dims {
            return Err(DynError::parse(tcol, "only self-maps are supported"));
        }
    }
    let body = &s[colon + 1..];
    let body_col = colon + 2;
    let parts = split_with_cols(body, ';', body_col);
    if parts.len() != dims.len() {
        return Err(DynError::parse(
            body_col,
            format!("expected {} block(s), found {}", dims.len(), parts.len()),
        ));
    }
    let mut blocks = Vec::new();
    for ((part, col), &n) in parts.into_iter().zip(&dims) {
        let lead = part.len() - part.trim_start().len();
        let t = part.trim();
        let col = col + lead;
        if !(t.starts_with('[') && t.ends_with(']')) {
            return Err(DynError::parse(
                col,
                "each block must be written as [p0, p1, ...]",
            ));
        }
        let inner = &t[1..t.len() - 1];
        let comps = split_with_cols(inner, ',', col + 1);
        if comps.len() != n + 1 {
            return Err(DynError::parse(
                col,
                format!(
                    "a self-map of P{} needs {} polynomials, found {}",
                    n,
                    n + 1,
                    comps.len()
                ),
            ));
        }
        let mut last_err = None;
        let mut parsed = None;
        for vars in block_var_sets(n) {
            match comps
                .iter()
                .map(|(c, ccol)| parse_ratpoly(c, &vars, *ccol))
                .collect::<Result<Vec<_>>>()
            {
                Ok(ps) => {
                    parsed = Some(ps);
                    break;
                }
                // report the attempt that got furthest
                Err(e) => {
                    let col = |e: &DynError| match e {
                        DynError::Parse { column, .. } => *column,
                        _ => 0,
                    };
                    if last_err.as_ref().is_none_or(|old| col(&e) > col(old)) {
                        last_err = Some(e);
                    }
                }
            }
        }
        let polys = match parsed {
            Some(p) => p,
            None => return Err(last_err.unwrap()),
        };
        blocks.push(block_from_ratpolys(polys, col)?);
    }
    PolyEndo::new(blocks)
}

/// Affine polynomial in `x`, homogenized to a self-map of P^1.
pub fn parse_affine_map(s: &str) -> Result<PolyEndo> {
    let p = parse_ratpoly(s, &["x".to_string()], 1)?;
    let deg = p.degree_in(0);
    let coeffs: Vec<Rat> = (0..=deg)
        .map(|k| p.terms.get(&vec![k]).cloned().unwrap_or_else(Rat::zero))
        .collect();
    PolyEndo::from_affine_poly(&coeffs)
}

/// One-parameter family of affine maps `x -> p_c(x)`.
#[derive(Clone, Debug)]
pub struct AffineFamily {
    source: String,
    param: String,
    // coefficients indexed by [power of x][power of c]
    coeffs: Vec<Vec<Rat>>,
}

impl AffineFamily {
    pub fn parse(s: &str, param: &str) -> Result<Self> {
        let vars = vec!["x".to_string(), param.to_string()];
        let p = parse_ratpoly(s, &vars, 1)?;
        let dx = p.degree_in(0) as usize;
        let dc = p.degree_in(1) as usize;
        let mut coeffs = vec![vec![Rat::zero(); dc + 1]; dx + 1];
        for (e, c) in &p.terms {
            coeffs[e[0] as usize][e[1] as usize] = c.clone();
        }
        if dx == 0 {
            return Err(DynError::parse(1, "family must depend on x"));
        }
        Ok(AffineFamily {
            source: s.to_string(),
            param: param.to_string(),
            coeffs,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn param(&self) -> &str {
        &self.param
    }

    /// Degree in `x` for a generic parameter value.
    pub fn generic_degree(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn specialize(&self, c: &Rat) -> Result<PolyEndo> {
        let xs: Vec<Rat> = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter().enumerate().fold(Rat::zero(), |acc, (k, a)| {
                    acc + a * num_traits::pow(c.clone(), k)
                })
            })
            .collect();
        PolyEndo::from_affine_poly(&xs)
    }
}

/// Integer or rational parameter lists: `-2..1`, `0,-1,-2`, `1/2`, or `box:5`
/// for all distinct `p/q` with `|p|, |q| <= 5`.
pub fn parse_param_list(s: &str) -> Result<Vec<Rat>> {
    let t = s.trim();
    if let Some(n) = t.strip_prefix("box:") {
        let n: i64 = n
            .trim()
            .parse()
            .map_err(|_| DynError::parse(5, "box:N needs an integer N"))?;
        if n < 1 {
            return Err(DynError::parse(5, "box:N needs N >= 1"));
        }
        let mut set = std::collections::BTreeSet::new();
        for p in -n..=n {
            for q in 1..=n {
                set.insert(Rat::new(p.into(), q.into()));
            }
        }
        return Ok(set.into_iter().collect());
    }
    if let Some((lo, hi)) = t.split_once("..") {
        let lo: i64 = lo
            .trim()
            .parse()
            .map_err(|_| DynError::parse(1, format!("bad range start '{}'", lo)))?;
        let hi: i64 = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| DynError::parse(1, format!("bad range end '{}'", hi)))?;
        if lo > hi {
            return Err(DynError::parse(1, "empty range"));
        }
        return Ok((lo..=hi).map(rat_int).collect());
    }
    split_with_cols(t, ',', 1)
        .into_iter()
        .map(|(p, col)| match parse_algnum_at(p, col)? {
            AlgNum::Rat(r) => Ok(r),
            AlgNum::Quad(_) => Err(DynError::parse(col, "parameters must be rational")),
        })
        .collect()
}
