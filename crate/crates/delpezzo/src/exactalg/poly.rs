use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::ring::Ring;
use super::AlgError;

/// Monomial exponent vector with graded-lexicographic order, which is the
/// deterministic order every iteration in the crate relies on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mono(pub Vec<u16>);

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        let da: u32 = self.0.iter().map(|&e| e as u32).sum();
        let db: u32 = other.0.iter().map(|&e| e as u32).sum();
        da.cmp(&db).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial; no zero coefficients are ever stored.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<R: Ring> {
    pub nvars: usize,
    pub terms: BTreeMap<Mono, R::El>,
}

impl<R: Ring> MultiPoly<R> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: &R, nvars: usize, c: R::El) -> Self {
        let mut p = Self::zero(nvars);
        p.insert(ring, Mono(vec![0; nvars]), c);
        p
    }

    pub fn var(ring: &R, nvars: usize, i: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.insert(ring, Mono(e), ring.one());
        p
    }

    pub fn insert(&mut self, ring: &R, m: Mono, c: R::El) {
        if ring.is_zero(&c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = ring.add(e.get(), &c);
                if ring.is_zero(&s) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, ring: &R, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(ring, m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, ring: &R) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), ring.neg(c));
        }
        out
    }

    pub fn sub(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.neg(ring))
    }

    pub fn mul(&self, ring: &R, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = Mono(ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect());
                out.insert(ring, m, ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn scale(&self, ring: &R, c: &R::El) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            let s = ring.mul(v, c);
            if !ring.is_zero(&s) {
                out.terms.insert(m.clone(), s);
            }
        }
        out
    }

    pub fn pow(&self, ring: &R, e: u32) -> Self {
        let mut acc = Self::constant(ring, self.nvars, ring.one());
        for _ in 0..e {
            acc = acc.mul(ring, self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.0.iter().map(|&e| e as u32).sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut deg = None;
        for m in self.terms.keys() {
            let d: u32 = m.0.iter().map(|&e| e as u32).sum();
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return false,
                _ => {}
            }
        }
        true
    }

    pub fn coeff(&self, ring: &R, m: &Mono) -> R::El {
        self.terms.get(m).cloned().unwrap_or_else(|| ring.zero())
    }

    /// Evaluate by substituting one value per variable.
    pub fn eval(&self, ring: &R, vals: &[R::El]) -> R::El {
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = ring.mul(&t, &vals[i]);
                }
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { chars: src.chars().collect(), pos: 0, src }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.chars.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn err(&self, msg: &str) -> AlgError {
        AlgError::Parse(format!("{} in `{}` at {}", msg, self.src, self.pos))
    }
}

/// Parse an expression in the given variables over `ring`. Identifiers that
/// are not variables must appear in `params`. Supports `+ - * ^`, integer
/// literals, parentheses, and `/` by a constant.
pub fn parse_poly<R: Ring>(
    ring: &R,
    src: &str,
    vars: &[&str],
    params: &BTreeMap<String, R::El>,
) -> Result<MultiPoly<R>, AlgError> {
    let mut p = Parser::new(src);
    let out = parse_sum(ring, &mut p, vars, params)?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

fn parse_sum<R: Ring>(
    ring: &R,
    p: &mut Parser,
    vars: &[&str],
    params: &BTreeMap<String, R::El>,
) -> Result<MultiPoly<R>, AlgError> {
    let mut neg_first = false;
    if let Some(c) = p.peek() {
        if c == '-' {
            p.bump();
            neg_first = true;
        } else if c == '+' {
            p.bump();
        }
    }
    let mut acc = parse_product(ring, p, vars, params)?;
    if neg_first {
        acc = acc.neg(ring);
    }
    while let Some(c) = p.peek() {
        match c {
            '+' => {
                p.bump();
                let t = parse_product(ring, p, vars, params)?;
                acc = acc.add(ring, &t);
            }
            '-' => {
                p.bump();
                let t = parse_product(ring, p, vars, params)?;
                acc = acc.sub(ring, &t);
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_product<R: Ring>(
    ring: &R,
    p: &mut Parser,
    vars: &[&str],
    params: &BTreeMap<String, R::El>,
) -> Result<MultiPoly<R>, AlgError> {
    let mut acc = parse_power(ring, p, vars, params)?;
    loop {
        match p.peek() {
            Some('*') => {
                p.bump();
                let t = parse_power(ring, p, vars, params)?;
                acc = acc.mul(ring, &t);
            }
            Some('/') => {
                p.bump();
                let t = parse_power(ring, p, vars, params)?;
                if t.total_degree().unwrap_or(0) != 0 {
                    return Err(p.err("division only by constants"));
                }
                let c = t.coeff(ring, &Mono(vec![0; acc.nvars.max(t.nvars)]));
                let ci = ring.inv(&c).map_err(|_| p.err("division by zero"))?;
                acc = acc.scale(ring, &ci);
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn parse_power<R: Ring>(
    ring: &R,
    p: &mut Parser,
    vars: &[&str],
    params: &BTreeMap<String, R::El>,
) -> Result<MultiPoly<R>, AlgError> {
    let base = parse_atom(ring, p, vars, params)?;
    if p.peek() == Some('^') {
        p.bump();
        let mut digits = String::new();
        while let Some(c) = p.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                p.bump();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(p.err("expected exponent"));
        }
        let e: u32 = digits.parse().map_err(|_| p.err("bad exponent"))?;
        return Ok(base.pow(ring, e));
    }
    Ok(base)
}

fn parse_atom<R: Ring>(
    ring: &R,
    p: &mut Parser,
    vars: &[&str],
    params: &BTreeMap<String, R::El>,
) -> Result<MultiPoly<R>, AlgError> {
    match p.peek() {
        Some('(') => {
            p.bump();
            let inner = parse_sum(ring, p, vars, params)?;
            if p.bump() != Some(')') {
                return Err(p.err("expected `)`"));
            }
            Ok(inner)
        }
        Some('-') => {
            p.bump();
            let inner = parse_atom(ring, p, vars, params)?;
            Ok(inner.neg(ring))
        }
        Some(c) if c.is_ascii_digit() => {
            let mut digits = String::new();
            while let Some(c) = p.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    p.bump();
                } else {
                    break;
                }
            }
            let n: i64 = digits.parse().map_err(|_| p.err("bad integer"))?;
            Ok(MultiPoly::constant(ring, vars.len(), ring.from_int(n)))
        }
        Some(c) if c.is_ascii_alphabetic() => {
            let mut ident = String::new();
            while let Some(c) = p.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    p.bump();
                } else {
                    break;
                }
            }
            if let Some(i) = vars.iter().position(|v| *v == ident) {
                Ok(MultiPoly::var(ring, vars.len(), i))
            } else if let Some(val) = params.get(&ident) {
                Ok(MultiPoly::constant(ring, vars.len(), val.clone()))
            } else {
                Err(p.err(&format!("unknown identifier `{}`", ident)))
            }
        }
        _ => Err(p.err("expected atom")),
    }
}

#[cfg(test)]
mod tests {
    use super::super::field::Field;
    use super::*;

    #[test]
    fn parse_plain_ascii_notation() {
        let q = Field::rationals();
        let params = BTreeMap::new();
        let f = parse_poly(&q, "x^2*z+x*y^2+y^3", &["x", "y", "z"], &params).unwrap();
        assert_eq!(f.terms.len(), 3);
        assert!(f.is_homogeneous());
        let g = parse_poly(&q, "x*y+z^2", &["x", "y", "z"], &params).unwrap();
        let one = q.one();
        assert_eq!(g.eval(&q, &[one.clone(), q.neg(&one), one.clone()]), q.zero());
    }

    #[test]
    fn parse_with_parameter() {
        let q = Field::rationals();
        let mut params = BTreeMap::new();
        params.insert("a".to_string(), q.from_int(2));
        let f = parse_poly(&q, "x+a*y", &["x", "y", "z"], &params).unwrap();
        assert_eq!(f.eval(&q, &[q.from_int(0), q.one(), q.zero()]), q.from_int(2));
    }

    #[test]
    fn graded_lex_order_is_deterministic() {
        let q = Field::rationals();
        let f = parse_poly(&q, "z^2+x*y+x^2*z", &["x", "y", "z"], &BTreeMap::new()).unwrap();
        let degs: Vec<u32> =
            f.terms.keys().map(|m| m.0.iter().map(|&e| e as u32).sum()).collect();
        let mut sorted = degs.clone();
        sorted.sort();
        assert_eq!(degs, sorted);
    }
}
