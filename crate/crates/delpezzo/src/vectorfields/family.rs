//! Symbolic verification of parametric stabilizer families: a polynomial ring
//! in the family parameters with monomial rewriting (xⁿ → 1 for torsion
//! units, xⁿ → 0 for nilpotents), the fixed-point conditions run over it, and
//! the closure of the family shape under multiplication.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cluster::BlowupConfig;
use crate::exactalg::{linalg, parse_poly, AlgError, Field, KElem, Ring, RingOver};

use super::{lift_config, stabilizer_residuals};

/// How a parameter behaves in the coefficient ring.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParamKind {
    /// invertible; exponents reduced modulo the torsion when present (xⁿ = 1)
    Unit { torsion: Option<u32> },
    /// xⁿ = 0
    Nilpotent { order: u32 },
    /// unconstrained coordinate parameter
    Free,
}

impl ParamKind {
    fn identity_value(&self) -> i64 {
        match self {
            ParamKind::Unit { .. } => 1,
            _ => 0,
        }
    }
}

/// k[params] with the fixed rewriting rules of the tables. Unit parameters
/// carry signed exponents (Laurent); nilpotent monomials die at their order.
#[derive(Clone, PartialEq, Debug)]
pub struct FamRing {
    pub base: Field,
    pub names: Vec<String>,
    pub kinds: Vec<ParamKind>,
}

pub type FamEl = BTreeMap<Vec<i32>, KElem>;

impl FamRing {
    pub fn generator(&self, i: usize) -> FamEl {
        let mut e = vec![0i32; self.names.len()];
        e[i] = 1;
        let mut m = BTreeMap::new();
        m.insert(e, self.base.one());
        m
    }

    fn reduce_exp(&self, mut exps: Vec<i32>) -> Option<Vec<i32>> {
        for (i, kind) in self.kinds.iter().enumerate() {
            match kind {
                ParamKind::Unit { torsion: Some(n) } => {
                    exps[i] = exps[i].rem_euclid(*n as i32);
                }
                ParamKind::Unit { torsion: None } => {}
                ParamKind::Nilpotent { order } => {
                    if exps[i] >= *order as i32 {
                        return None;
                    }
                    debug_assert!(exps[i] >= 0);
                }
                ParamKind::Free => {
                    debug_assert!(exps[i] >= 0);
                }
            }
        }
        Some(exps)
    }

    fn insert(&self, el: &mut FamEl, exps: Vec<i32>, c: KElem) {
        if self.base.is_zero(&c) {
            return;
        }
        let Some(exps) = self.reduce_exp(exps) else { return };
        match el.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = self.base.add(e.get(), &c);
                if self.base.is_zero(&s) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Total nilpotency bound: any product of more than this many nilpotent
    /// terms vanishes.
    fn nil_bound(&self) -> usize {
        1 + self
            .kinds
            .iter()
            .map(|k| match k {
                ParamKind::Nilpotent { order } => (*order as usize).saturating_sub(1),
                _ => 0,
            })
            .sum::<usize>()
    }

    fn term_is_nilpotent(&self, exps: &[i32]) -> bool {
        exps.iter().zip(&self.kinds).any(|(&e, k)| {
            matches!(k, ParamKind::Nilpotent { .. }) && e > 0
        })
    }

    fn term_units_only(&self, exps: &[i32]) -> bool {
        exps.iter().zip(&self.kinds).all(|(&e, k)| {
            e == 0 || matches!(k, ParamKind::Unit { .. })
        })
    }
}

impl Ring for FamRing {
    type El = FamEl;

    fn zero(&self) -> FamEl {
        BTreeMap::new()
    }

    fn one(&self) -> FamEl {
        self.from_int(1)
    }

    fn from_int(&self, n: i64) -> FamEl {
        let c = self.base.from_int(n);
        let mut m = BTreeMap::new();
        if !self.base.is_zero(&c) {
            m.insert(vec![0; self.names.len()], c);
        }
        m
    }

    fn add(&self, a: &FamEl, b: &FamEl) -> FamEl {
        let mut out = a.clone();
        for (e, c) in b {
            self.insert(&mut out, e.clone(), c.clone());
        }
        out
    }

    fn neg(&self, a: &FamEl) -> FamEl {
        a.iter().map(|(e, c)| (e.clone(), self.base.neg(c))).collect()
    }

    fn mul(&self, a: &FamEl, b: &FamEl) -> FamEl {
        let mut out = BTreeMap::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                let exps: Vec<i32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                self.insert(&mut out, exps, self.base.mul(ca, cb));
            }
        }
        out
    }

    fn is_zero(&self, a: &FamEl) -> bool {
        a.is_empty()
    }

    fn is_unit(&self, a: &FamEl) -> bool {
        let core: Vec<_> = a.iter().filter(|(e, _)| !self.term_is_nilpotent(e)).collect();
        core.len() == 1
            && self.term_units_only(core[0].0)
            && self.base.is_unit(core[0].1)
    }

    fn inv(&self, a: &FamEl) -> Result<FamEl, AlgError> {
        // invertible elements have the shape (unit monomial)·(1 + nilpotent)
        let core: Vec<(&Vec<i32>, &KElem)> =
            a.iter().filter(|(e, _)| !self.term_is_nilpotent(e)).collect();
        if core.len() != 1 || !self.term_units_only(core[0].0) {
            return Err(AlgError::NonUnit);
        }
        let (lead_exp, lead_coef) = (core[0].0.clone(), core[0].1.clone());
        let lead_inv_coef = self.base.inv(&lead_coef)?;
        let lead_inv_exp: Vec<i32> = lead_exp.iter().map(|e| -e).collect();
        let mut t_inv = BTreeMap::new();
        self.insert(&mut t_inv, lead_inv_exp, lead_inv_coef);
        // w = a·t⁻¹ − 1, nilpotent by construction
        let mut w = self.mul(a, &t_inv);
        self.insert(&mut w, vec![0; self.names.len()], self.base.from_int(-1));
        let mut acc = self.one();
        let mut pw = self.one();
        for _ in 0..self.nil_bound() {
            pw = self.mul(&pw, &self.neg(&w));
            if self.is_zero(&pw) {
                break;
            }
            acc = self.add(&acc, &pw);
        }
        if !self.is_zero(&self.mul(&pw, &self.neg(&w))) {
            return Err(AlgError::NonUnit);
        }
        Ok(self.mul(&acc, &t_inv))
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
}

impl RingOver<Field> for FamRing {
    fn embed(&self, x: &KElem) -> FamEl {
        let mut m = BTreeMap::new();
        if !self.base.is_zero(x) {
            m.insert(vec![0; self.names.len()], x.clone());
        }
        m
    }
}

/// A parametric matrix family from the classification tables: entries are
/// polynomials in named parameters, with torsion/nilpotency relations and a
/// list of invertible parameters.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StabFamily {
    pub matrix: [[String; 3]; 3],
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub units: Vec<String>,
}

struct ParsedRelation {
    name: String,
    exponent: u32,
    torsion: bool,
}

fn parse_relation(s: &str) -> Result<ParsedRelation, AlgError> {
    let (lhs, rhs) = match s.split_once('=') {
        Some((l, r)) => (l.trim(), r.trim()),
        None => (s.trim(), "0"),
    };
    let torsion = match rhs {
        "0" => false,
        "1" => true,
        _ => return Err(AlgError::Parse(format!("relation `{}` must equal 0 or 1", s))),
    };
    let (name, exp) = match lhs.split_once('^') {
        Some((n, e)) => (
            n.trim().to_string(),
            e.trim()
                .parse::<u32>()
                .map_err(|_| AlgError::Parse(format!("bad exponent in `{}`", s)))?,
        ),
        None => (lhs.to_string(), 1),
    };
    Ok(ParsedRelation { name, exponent: exp, torsion })
}

impl StabFamily {
    /// Parameter names in first-appearance order. The table families use
    /// single-letter parameters.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for row in &self.matrix {
            for entry in row {
                for ch in entry.chars() {
                    if ch.is_ascii_alphabetic() {
                        let s = ch.to_string();
                        if !names.contains(&s) {
                            names.push(s);
                        }
                    }
                }
            }
        }
        names
    }

    /// Build the coefficient ring over the given base field, with one extra
    /// disjoint copy of the parameters when `copies == 2` (for the closure
    /// check).
    pub fn ring(&self, base: &Field, copies: usize) -> Result<FamRing, AlgError> {
        let names = self.param_names();
        let mut kinds = vec![ParamKind::Free; names.len()];
        for u in &self.units {
            let i = names
                .iter()
                .position(|n| n == u)
                .ok_or_else(|| AlgError::Parse(format!("unit `{}` not in matrix", u)))?;
            kinds[i] = ParamKind::Unit { torsion: None };
        }
        for r in &self.relations {
            let pr = parse_relation(r)?;
            let i = names
                .iter()
                .position(|n| n == &pr.name)
                .ok_or_else(|| AlgError::Parse(format!("relation `{}` names no parameter", r)))?;
            let new_kind = if pr.torsion {
                ParamKind::Unit { torsion: Some(pr.exponent) }
            } else {
                ParamKind::Nilpotent { order: pr.exponent }
            };
            match kinds[i] {
                ParamKind::Free | ParamKind::Unit { torsion: None } => kinds[i] = new_kind,
                _ => {
                    return Err(AlgError::Invalid(format!(
                        "conflicting relations for parameter `{}`: reduction is not confluent",
                        pr.name
                    )))
                }
            }
        }
        let mut all_names: Vec<String> = names.clone();
        let mut all_kinds = kinds.clone();
        if copies == 2 {
            for (n, k) in names.iter().zip(&kinds) {
                all_names.push(format!("{}__2", n));
                all_kinds.push(*k);
            }
        }
        Ok(FamRing { base: base.clone(), names: all_names, kinds: all_kinds })
    }

    /// Parse the matrix over the ring, using the parameter copy `copy`
    /// (0 or 1).
    pub fn matrix_over(
        &self,
        ring: &FamRing,
        copy: usize,
    ) -> Result<[[FamEl; 3]; 3], AlgError> {
        let base_names = self.param_names();
        let offset = copy * base_names.len();
        let mut params = BTreeMap::new();
        for (i, n) in base_names.iter().enumerate() {
            params.insert(n.clone(), ring.generator(offset + i));
        }
        let mut out: [[FamEl; 3]; 3] = Default::default();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                let p = parse_poly(ring, s, &[], &params)?;
                out[i][j] = p.coeff(ring, &crate::exactalg::Mono(vec![]));
            }
        }
        Ok(out)
    }
}

/// Verify that every member of the family fixes the configuration, working
/// symbolically over the parameter ring, and that the family shape is closed
/// under multiplication modulo the relations.
pub fn verify_family(cfg: &BlowupConfig, fam: &StabFamily) -> Result<bool, AlgError> {
    let ring = fam.ring(&cfg.field, 1)?;
    let g = fam.matrix_over(&ring, 0)?;
    let towers = lift_config(&ring, cfg);
    match stabilizer_residuals(&ring, &g, &towers)? {
        None => return Ok(false),
        Some(res) => {
            if !res.iter().all(|r| ring.is_zero(r)) {
                return Ok(false);
            }
        }
    }
    closure_holds(cfg, fam)
}

/// The product of two generic members reduces to the family shape with
/// derived parameter values, and the derived values satisfy the relations.
fn closure_holds(cfg: &BlowupConfig, fam: &StabFamily) -> Result<bool, AlgError> {
    let ring2 = fam.ring(&cfg.field, 2)?;
    let g1 = fam.matrix_over(&ring2, 0)?;
    let g2 = fam.matrix_over(&ring2, 1)?;
    let mut prod: [[FamEl; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = ring2.zero();
            for k in 0..3 {
                acc = ring2.add(&acc, &ring2.mul(&g1[i][k], &g2[k][j]));
            }
            prod[i][j] = acc;
        }
    }
    // positions where a parameter appears bare
    let names = fam.param_names();
    let mut pos = BTreeMap::new();
    for (i, row) in fam.matrix.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            if names.iter().any(|n| n == s.trim()) {
                pos.insert(s.trim().to_string(), (i, j));
            }
        }
    }
    for n in &names {
        if !pos.contains_key(n) {
            return Err(AlgError::Invalid(format!(
                "parameter `{}` never appears bare; closure cannot derive it",
                n
            )));
        }
    }
    if fam.matrix[0][0].trim() != "1" {
        return Err(AlgError::Invalid("family matrices must be normalized with entry (0,0) = 1".into()));
    }
    let p00 = prod[0][0].clone();
    // combined parameter values are P_pos/P00, expressed projectively
    let comb = |n: &str| -> FamEl {
        let (i, j) = pos[n];
        prod[i][j].clone()
    };
    // each matrix entry must satisfy pattern(P_pos/P00) = P_ij/P00,
    // homogenized by P00-powers
    let base_names = names.clone();
    let entry_ring = fam.ring(&cfg.field, 1)?; // pattern parsing space
    for (i, row) in fam.matrix.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            let mut params = BTreeMap::new();
            for (idx, n) in base_names.iter().enumerate() {
                params.insert(n.clone(), entry_ring.generator(idx));
            }
            let pattern = parse_poly(&entry_ring, s, &[], &params)?
                .coeff(&entry_ring, &crate::exactalg::Mono(vec![]));
            // total degree of the pattern in the parameters
            let deg = pattern
                .keys()
                .map(|e| e.iter().map(|&x| x.max(0) as usize).sum::<usize>())
                .max()
                .unwrap_or(0)
                .max(1);
            // LHS: Σ c_α Π P_pos^α · P00^{deg−|α|}
            let mut lhs = ring2.zero();
            for (exps, c) in &pattern {
                let mut term = ring2.embed(c);
                let mut total = 0usize;
                for (idx, &e) in exps.iter().enumerate() {
                    if e < 0 {
                        return Err(AlgError::Invalid(
                            "negative exponents in family patterns are not supported".into(),
                        ));
                    }
                    for _ in 0..e {
                        term = ring2.mul(&term, &comb(&base_names[idx]));
                    }
                    total += e as usize;
                }
                for _ in total..deg {
                    term = ring2.mul(&term, &p00);
                }
                lhs = ring2.add(&lhs, &term);
            }
            // RHS: P_ij · P00^{deg−1}
            let mut rhs = prod[i][j].clone();
            for _ in 1..deg {
                rhs = ring2.mul(&rhs, &p00);
            }
            if !ring2.is_zero(&ring2.sub(&lhs, &rhs)) {
                return Ok(false);
            }
        }
    }
    // derived parameters satisfy the relations
    for r in &fam.relations {
        let pr = parse_relation(r)?;
        let v = comb(&pr.name);
        let mut pw = ring2.one();
        for _ in 0..pr.exponent {
            pw = ring2.mul(&pw, &v);
        }
        let target = if pr.torsion {
            // vⁿ = P00ⁿ
            let mut t = ring2.one();
            for _ in 0..pr.exponent {
                t = ring2.mul(&t, &p00);
            }
            t
        } else {
            ring2.zero()
        };
        if !ring2.is_zero(&ring2.sub(&pw, &target)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tangent-space dimension of the family at the identity in characteristic p:
/// parameters are displaced by ε·δ over F_p[ε]/(ε²); a torsion relation
/// xⁿ = 1 kills its δ unless p divides n; the dimension is the rank of the
/// matrix of entry-differentials in the surviving directions.
pub fn family_tangent_dim(fam: &StabFamily, p: u64) -> Result<usize, AlgError> {
    let field = if p == 0 { Field::rationals() } else { crate::exactalg::fq_make(p, 1)? };
    let ring = fam.ring(&field, 1)?;
    let names = fam.param_names();
    let survives: Vec<bool> = ring
        .kinds
        .iter()
        .map(|k| match k {
            ParamKind::Unit { torsion: Some(n) } => p != 0 && (*n as u64) % p == 0,
            _ => true,
        })
        .collect();
    let mut rows: Vec<Vec<KElem>> = Vec::new();
    for row in &fam.matrix {
        for s in row {
            let mut params = BTreeMap::new();
            for (idx, n) in names.iter().enumerate() {
                params.insert(n.clone(), ring.generator(idx));
            }
            let pattern =
                parse_poly(&ring, s, &[], &params)?.coeff(&ring, &crate::exactalg::Mono(vec![]));
            // differential at the identity values
            let mut drow = Vec::with_capacity(names.len());
            for qi in 0..names.len() {
                if !survives[qi] {
                    drow.push(field.zero());
                    continue;
                }
                let mut acc = field.zero();
                for (exps, c) in &pattern {
                    let eq = exps[qi];
                    if eq == 0 {
                        continue;
                    }
                    // Π_{r≠q} id_r^{e_r} vanishes unless every non-unit
                    // parameter with nonzero exponent is the differentiated one
                    let others_ok = exps.iter().enumerate().all(|(r, &e)| {
                        r == qi || e == 0 || ring.kinds[r].identity_value() == 1
                    });
                    if !others_ok {
                        continue;
                    }
                    let contrib = match ring.kinds[qi].identity_value() {
                        1 => field.mul(c, &field.from_int(eq as i64)),
                        _ => {
                            if eq == 1 {
                                c.clone()
                            } else {
                                field.zero()
                            }
                        }
                    };
                    acc = field.add(&acc, &contrib);
                }
                drow.push(acc);
            }
            rows.push(drow);
        }
    }
    Ok(linalg::rank(&field, &rows, names.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(matrix: [[&str; 3]; 3], relations: &[&str], units: &[&str]) -> StabFamily {
        StabFamily {
            matrix: matrix.map(|r| r.map(|s| s.to_string())),
            relations: relations.iter().map(|s| s.to_string()).collect(),
            units: units.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn tangent_dims() {
        // full PGL₃
        let full = fam(
            [["1", "b", "c"], ["d", "e", "f"], ["g", "h", "i"]],
            &[],
            &["e", "i"],
        );
        assert_eq!(family_tangent_dim(&full, 0).unwrap(), 8);
        // μ₂ inside the torus
        let mu2 = fam([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "i"]], &["i^2=1"], &["i"]);
        assert_eq!(family_tangent_dim(&mu2, 2).unwrap(), 1);
        assert_eq!(family_tangent_dim(&mu2, 5).unwrap(), 0);
        // the degree-1 height-8 family in characteristic 2
        let t1 = fam(
            [["1", "b", "c"], ["0", "e", "b^2*e"], ["0", "0", "e^3"]],
            &["b^4"],
            &["e"],
        );
        assert_eq!(family_tangent_dim(&t1, 2).unwrap(), 3);
        // additive entry b²+b
        let q3 = fam(
            [["1", "b", "c"], ["0", "1", "b^2+b"], ["0", "0", "1"]],
            &[],
            &[],
        );
        assert_eq!(family_tangent_dim(&q3, 2).unwrap(), 2);
    }

    #[test]
    fn famring_inverts_units() {
        let field = crate::exactalg::fq_make(2, 1).unwrap();
        let f = fam(
            [["1", "b", "c"], ["0", "e", "b^2*e"], ["0", "0", "e^3"]],
            &["b^4"],
            &["e"],
        );
        let ring = f.ring(&field, 1).unwrap();
        let b = ring.generator(0);
        let e = ring.generator(2);
        // e·(1 + b) is a unit: (unit monomial)·(1 + nilpotent)
        let one = ring.one();
        let x = ring.mul(&e, &ring.add(&one, &b));
        let xi = ring.inv(&x).unwrap();
        assert_eq!(ring.mul(&x, &xi), one);
        // 1 + c is not (c is free)
        let c = ring.generator(1);
        assert!(ring.inv(&ring.add(&one, &c)).is_err());
        // b is nilpotent
        let mut b4 = ring.one();
        for _ in 0..4 {
            b4 = ring.mul(&b4, &b);
        }
        assert!(ring.is_zero(&b4));
    }
}
