use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ring::{Ring, RingOver};
use super::AlgError;

/// Exact rational number. Kept as a reduced fraction of `BigInt`s; we do not
/// pull in `num-rational` because the handful of operations needed here are
/// shorter than the impedance mismatch.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rat {
    pub num: BigInt,
    pub den: BigInt, // always > 0
}

impl Rat {
    pub fn from_int(n: i64) -> Self {
        Rat { num: BigInt::from(n), den: BigInt::one() }
    }

    /// num/den as a reduced fraction; den must be nonzero.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Rat { num: BigInt::from(num), den: BigInt::from(den) }.reduce()
    }

    fn reduce(mut self) -> Self {
        use num_integer::Integer;
        if self.den.is_negative() {
            self.num = -self.num;
            self.den = -self.den;
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() && !g.is_zero() {
            self.num /= &g;
            self.den /= &g;
        }
        if self.num.is_zero() {
            self.den = BigInt::one();
        }
        self
    }

    fn add(&self, o: &Rat) -> Rat {
        Rat { num: &self.num * &o.den + &o.num * &self.den, den: &self.den * &o.den }.reduce()
    }

    fn mul(&self, o: &Rat) -> Rat {
        Rat { num: &self.num * &o.num, den: &self.den * &o.den }.reduce()
    }

    fn neg(&self) -> Rat {
        Rat { num: -self.num.clone(), den: self.den.clone() }
    }

    fn inv(&self) -> Option<Rat> {
        if self.num.is_zero() {
            None
        } else {
            Some(Rat { num: self.den.clone(), den: self.num.clone() }.reduce())
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Description of the base field: ℚ, or 𝔽_{p^k} with a fixed monic modulus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FieldKind {
    Rationals,
    /// `modulus` has length k+1, is monic, coefficients in `[0, p)`.
    /// For k = 1 the modulus is just `t`, i.e. elements are scalars.
    Finite { p: u64, k: usize, modulus: Vec<u64> },
}

/// A base field, cheap to clone and compare.
#[derive(Clone)]
pub struct Field(Arc<FieldKind>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::Finite { p, k, .. } => write!(f, "F_{}^{}", p, k),
        }
    }
}

/// Element of a base field. Finite-field elements are coefficient vectors of
/// length k in the power basis `1, t, …, t^{k−1}`.
#[derive(Clone, PartialEq, Debug)]
pub enum KElem {
    Q(Rat),
    Fq(Vec<u64>),
}

/// Fixed moduli for the extension fields the corpus uses, so behaviour is
/// reproducible bit for bit: 𝔽₄: t²+t+1, 𝔽₈: t³+t+1, 𝔽₉: t²+1,
/// 𝔽₂₅: t²−2, 𝔽₂₇: t³−t+1, 𝔽₁₆: t⁴+t+1, 𝔽₈₁: t⁴−t²−1.
const FIXED_MODULI: &[(u64, usize, &[u64])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 2, 0, 1]),
    (5, 2, &[3, 0, 1]),
];

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_mod_div(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    // remainder of a by monic-normalized b over F_p
    let mut r: Vec<u64> = a.to_vec();
    let db = b.iter().rposition(|&c| c != 0).unwrap();
    let lead_inv = mod_inv(b[db], p);
    while let Some(dr) = r.iter().rposition(|&c| c != 0) {
        if dr < db {
            break;
        }
        let f = r[dr] * lead_inv % p;
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = (r[idx] + p - f * b[i] % p) % p;
        }
    }
    while r.len() > 1 && *r.last().unwrap() == 0 {
        r.pop();
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    let mut res = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            res = res * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    res
}

fn is_irreducible(m: &[u64], p: u64) -> bool {
    // m monic of degree k <= 4: check divisibility by all monic polys of
    // degree 1..=k/2.
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        // iterate monic polynomials of degree d
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut cand = vec![0u64; d + 1];
            let mut v = idx;
            for c in cand.iter_mut().take(d) {
                *c = v % p;
                v /= p;
            }
            cand[d] = 1;
            let r = poly_mod_div(m, &cand, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    // degree-1 polynomials always checked above when k >= 2; for k == 1 any
    // monic linear polynomial is irreducible
    true
}

/// Construct 𝔽_{p^k} with the fixed modulus for (p, k), falling back to the
/// lexicographically smallest monic irreducible.
pub fn fq_make(p: u64, k: usize) -> Result<Field, AlgError> {
    if !is_prime(p) {
        return Err(AlgError::NonPrime(p));
    }
    if k == 0 || k > 4 {
        return Err(AlgError::BadExtensionDegree(k));
    }
    if k == 1 {
        return Ok(Field(Arc::new(FieldKind::Finite { p, k, modulus: vec![0, 1] })));
    }
    if let Some((_, _, m)) = FIXED_MODULI.iter().find(|(fp, fk, _)| *fp == p && *fk == k) {
        debug_assert!(is_irreducible(m, p));
        return Ok(Field(Arc::new(FieldKind::Finite { p, k, modulus: m.to_vec() })));
    }
    let count = p.pow(k as u32);
    for idx in 0..count {
        let mut m = vec![0u64; k + 1];
        let mut v = idx;
        for c in m.iter_mut().take(k) {
            *c = v % p;
            v /= p;
        }
        m[k] = 1;
        if is_irreducible(&m, p) {
            return Ok(Field(Arc::new(FieldKind::Finite { p, k, modulus: m })));
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    pub fn rationals() -> Field {
        Field(Arc::new(FieldKind::Rationals))
    }

    pub fn prime(p: u64) -> Result<Field, AlgError> {
        fq_make(p, 1)
    }

    pub fn kind(&self) -> &FieldKind {
        &self.0
    }

    pub fn char_p(&self) -> u64 {
        match &*self.0 {
            FieldKind::Rationals => 0,
            FieldKind::Finite { p, .. } => *p,
        }
    }

    pub fn extension_degree(&self) -> usize {
        match &*self.0 {
            FieldKind::Rationals => 1,
            FieldKind::Finite { k, .. } => *k,
        }
    }

    /// Number of elements, `None` for ℚ.
    pub fn order(&self) -> Option<u64> {
        match &*self.0 {
            FieldKind::Rationals => None,
            FieldKind::Finite { p, k, .. } => Some(p.pow(*k as u32)),
        }
    }

    /// All elements of a finite field, in the deterministic power-basis order.
    pub fn elements(&self) -> Vec<KElem> {
        match &*self.0 {
            FieldKind::Rationals => panic!("cannot enumerate the rationals"),
            FieldKind::Finite { p, k, .. } => {
                let mut out = Vec::with_capacity(p.pow(*k as u32) as usize);
                let total = p.pow(*k as u32);
                for idx in 0..total {
                    let mut coeffs = vec![0u64; *k];
                    let mut v = idx;
                    for c in coeffs.iter_mut() {
                        *c = v % p;
                        v /= p;
                    }
                    out.push(KElem::Fq(coeffs));
                }
                out
            }
        }
    }

    /// The generator `t` of the power basis (equals 0 for k = 1 only when p…
    /// for k = 1 this is the image of t, i.e. 0 since t ≡ 0 mod t).
    pub fn gen(&self) -> KElem {
        match &*self.0 {
            FieldKind::Rationals => panic!("no generator over Q"),
            FieldKind::Finite { k, .. } => {
                if *k == 1 {
                    KElem::Fq(vec![0])
                } else {
                    let mut c = vec![0u64; *k];
                    c[1] = 1;
                    KElem::Fq(c)
                }
            }
        }
    }

    fn fq_reduce(&self, mut a: Vec<u64>) -> Vec<u64> {
        match &*self.0 {
            FieldKind::Finite { p, k, modulus } => {
                if a.len() > *k {
                    a = poly_mod_div(&a, modulus, *p);
                }
                a.resize(*k, 0);
                a
            }
            _ => unreachable!(),
        }
    }

    pub fn display(&self, x: &KElem) -> String {
        match x {
            KElem::Q(r) => format!("{}", r),
            KElem::Fq(c) => {
                let mut parts = Vec::new();
                for (i, &ci) in c.iter().enumerate().rev() {
                    if ci == 0 {
                        continue;
                    }
                    let part = match i {
                        0 => format!("{}", ci),
                        1 if ci == 1 => "t".to_string(),
                        1 => format!("{}*t", ci),
                        _ if ci == 1 => format!("t^{}", i),
                        _ => format!("{}*t^{}", ci, i),
                    };
                    parts.push(part);
                }
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join("+")
                }
            }
        }
    }
}

impl Ring for Field {
    type El = KElem;

    fn zero(&self) -> KElem {
        match &*self.0 {
            FieldKind::Rationals => KElem::Q(Rat::from_int(0)),
            FieldKind::Finite { k, .. } => KElem::Fq(vec![0; *k]),
        }
    }

    fn one(&self) -> KElem {
        self.from_int(1)
    }

    fn from_int(&self, n: i64) -> KElem {
        match &*self.0 {
            FieldKind::Rationals => KElem::Q(Rat::from_int(n)),
            FieldKind::Finite { p, k, .. } => {
                let r = n.rem_euclid(*p as i64) as u64;
                let mut c = vec![0u64; *k];
                c[0] = r;
                KElem::Fq(c)
            }
        }
    }

    fn add(&self, a: &KElem, b: &KElem) -> KElem {
        match (a, b, &*self.0) {
            (KElem::Q(x), KElem::Q(y), _) => KElem::Q(x.add(y)),
            (KElem::Fq(x), KElem::Fq(y), FieldKind::Finite { p, .. }) => {
                KElem::Fq(x.iter().zip(y).map(|(u, v)| (u + v) % p).collect())
            }
            _ => panic!("field element mismatch"),
        }
    }

    fn neg(&self, a: &KElem) -> KElem {
        match (a, &*self.0) {
            (KElem::Q(x), _) => KElem::Q(x.neg()),
            (KElem::Fq(x), FieldKind::Finite { p, .. }) => {
                KElem::Fq(x.iter().map(|u| (p - u) % p).collect())
            }
            _ => panic!("field element mismatch"),
        }
    }

    fn mul(&self, a: &KElem, b: &KElem) -> KElem {
        match (a, b, &*self.0) {
            (KElem::Q(x), KElem::Q(y), _) => KElem::Q(x.mul(y)),
            (KElem::Fq(x), KElem::Fq(y), FieldKind::Finite { p, .. }) => {
                let mut prod = vec![0u64; x.len() + y.len()];
                for (i, &xi) in x.iter().enumerate() {
                    if xi == 0 {
                        continue;
                    }
                    for (j, &yj) in y.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + xi * yj) % p;
                    }
                }
                KElem::Fq(self.fq_reduce(prod))
            }
            _ => panic!("field element mismatch"),
        }
    }

    fn is_zero(&self, a: &KElem) -> bool {
        match a {
            KElem::Q(x) => x.num.is_zero(),
            KElem::Fq(c) => c.iter().all(|&u| u == 0),
        }
    }

    fn is_unit(&self, a: &KElem) -> bool {
        !self.is_zero(a)
    }

    fn inv(&self, a: &KElem) -> Result<KElem, AlgError> {
        if self.is_zero(a) {
            return Err(AlgError::NonUnit);
        }
        match a {
            KElem::Q(x) => Ok(KElem::Q(x.inv().unwrap())),
            KElem::Fq(_) => {
                // a^(q-2); fields are tiny so square-and-multiply is plenty
                let q = self.order().unwrap();
                let mut e = q - 2;
                let mut acc = self.one();
                let mut base = a.clone();
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(&acc, &base);
                    }
                    base = self.mul(&base, &base);
                    e >>= 1;
                }
                Ok(acc)
            }
        }
    }

    fn characteristic(&self) -> u64 {
        self.char_p()
    }
}

impl RingOver<Field> for Field {
    fn embed(&self, x: &KElem) -> KElem {
        x.clone()
    }
}

/// The dual numbers F[ε]/(ε²) over a base field.
pub fn dual_extend(f: &Field) -> super::ring::DualRing<Field> {
    super::ring::DualRing::new(f.clone(), 2)
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::exactalg::DualRing;
    use proptest::prelude::*;

    fn rat() -> impl Strategy<Value = KElem> {
        (-1000i64..1000, 1i64..200).prop_map(|(n, d)| KElem::Q(Rat::new(n, d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn rational_ring_axioms(a in rat(), b in rat(), c in rat()) {
            let q = Field::rationals();
            prop_assert_eq!(q.sub(&q.add(&a, &b), &b), a.clone());
            prop_assert_eq!(q.mul(&q.mul(&a, &b), &c), q.mul(&a, &q.mul(&b, &c)));
            let lhs = q.mul(&a, &q.add(&b, &c));
            let rhs = q.add(&q.mul(&a, &b), &q.mul(&a, &c));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dual_units_invert(a in rat(), b in rat()) {
            let q = Field::rationals();
            prop_assume!(!q.is_zero(&a));
            let d = DualRing::new(q, 2);
            let x = crate::exactalg::TruncEl(vec![a, b]);
            let xi = d.inv(&x).unwrap();
            prop_assert_eq!(d.mul(&x, &xi), d.one());
        }
    }
}
