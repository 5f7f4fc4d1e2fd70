use std::collections::BTreeMap;

use super::ring::Ring;
use super::AlgError;

/// Polynomial in two local variables (u, v), sparse in the exponent pair.
/// Used for everything that happens in an affine chart around a point.
#[derive(Clone, PartialEq, Debug)]
pub struct LocalPoly<R: Ring> {
    pub terms: BTreeMap<(u16, u16), R::El>,
}

impl<R: Ring> LocalPoly<R> {
    pub fn zero() -> Self {
        LocalPoly { terms: BTreeMap::new() }
    }

    pub fn insert(&mut self, ring: &R, m: (u16, u16), c: R::El) {
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

    pub fn coeff(&self, ring: &R, m: (u16, u16)) -> R::El {
        self.terms.get(&m).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest total degree of a nonzero term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a as u32 + b as u32).min()
    }

    pub fn add(&self, ring: &R, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert(ring, *m, c.clone());
        }
        out
    }

    pub fn mul_trunc(&self, ring: &R, o: &Self, u_max: u16) -> Self {
        let mut out = Self::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &o.terms {
                let a = a1 + a2;
                if a > u_max {
                    continue;
                }
                out.insert(ring, (a, b1 + b2), ring.mul(c1, c2));
            }
        }
        out
    }

    /// Substitute v ↦ series(u) and return the resulting series in u,
    /// truncated at u^u_max.
    pub fn eval_v_series(&self, ring: &R, psi: &[R::El], u_max: u16) -> Vec<R::El> {
        // psi[i] is the coefficient of u^{i+1}; the series has no constant term
        let mut out = vec![ring.zero(); u_max as usize + 1];
        // group terms by v-exponent
        let max_b = self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0);
        // psi powers as u-series
        let mut pw: Vec<Vec<R::El>> = Vec::with_capacity(max_b as usize + 1);
        let mut one = vec![ring.zero(); u_max as usize + 1];
        one[0] = ring.one();
        pw.push(one);
        for _ in 1..=max_b {
            let prev = pw.last().unwrap();
            let mut next = vec![ring.zero(); u_max as usize + 1];
            for (i, c) in prev.iter().enumerate() {
                if ring.is_zero(c) {
                    continue;
                }
                for (j, d) in psi.iter().enumerate() {
                    let e = i + j + 1;
                    if e > u_max as usize {
                        break;
                    }
                    next[e] = ring.add(&next[e], &ring.mul(c, d));
                }
            }
            pw.push(next);
        }
        for (&(a, b), c) in &self.terms {
            if a > u_max {
                continue;
            }
            let powers = &pw[b as usize];
            for (j, d) in powers.iter().enumerate() {
                let e = a as usize + j;
                if e > u_max as usize {
                    break;
                }
                if !ring.is_zero(d) {
                    out[e] = ring.add(&out[e], &ring.mul(c, d));
                }
            }
        }
        out
    }

    /// Substitute v ↦ v + series(u), truncating u-degrees beyond u_max.
    pub fn shift_v_by_series(&self, ring: &R, psi: &[R::El], u_max: u16) -> Self {
        let mut out = Self::zero();
        let max_b = self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0);
        // (v + ψ)^b expanded as Σ_j C(b,j) v^j ψ^{b−j}
        let mut psi_pow: Vec<Vec<R::El>> = Vec::new();
        let mut one = vec![ring.zero(); u_max as usize + 1];
        one[0] = ring.one();
        psi_pow.push(one);
        for _ in 1..=max_b {
            let prev = psi_pow.last().unwrap();
            let mut next = vec![ring.zero(); u_max as usize + 1];
            for (i, c) in prev.iter().enumerate() {
                if ring.is_zero(c) {
                    continue;
                }
                for (j, d) in psi.iter().enumerate() {
                    let e = i + j + 1;
                    if e > u_max as usize {
                        break;
                    }
                    next[e] = ring.add(&next[e], &ring.mul(c, d));
                }
            }
            psi_pow.push(next);
        }
        for (&(a, b), c) in &self.terms {
            if a > u_max {
                continue;
            }
            for j in 0..=b {
                let binom = binomial(b as u64, j as u64);
                let bc = ring.from_int(binom as i64);
                if ring.is_zero(&bc) {
                    continue;
                }
                let coef = ring.mul(c, &bc);
                for (idx, d) in psi_pow[(b - j) as usize].iter().enumerate() {
                    let ue = a as usize + idx;
                    if ue > u_max as usize {
                        break;
                    }
                    if !ring.is_zero(d) {
                        out.insert(ring, (ue as u16, j), ring.mul(&coef, d));
                    }
                }
            }
        }
        out
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Solve f(u, ψ(u)) ≡ 0 mod u^{order+1} for the unique series ψ with
/// ψ(0) = 0, given f(0,0) = 0 and a unit coefficient of v in f. Returns the
/// coefficients of u¹ … u^order.
pub fn hensel_graph<R: Ring>(
    ring: &R,
    f: &LocalPoly<R>,
    order: usize,
) -> Result<Vec<R::El>, AlgError> {
    if !ring.is_zero(&f.coeff(ring, (0, 0))) {
        return Err(AlgError::Invalid("germ does not pass through the origin".into()));
    }
    let fv = f.coeff(ring, (0, 1));
    if !ring.is_unit(&fv) {
        return Err(AlgError::SingularGerm);
    }
    let fv_inv = ring.inv(&fv)?;
    let mut psi: Vec<R::El> = Vec::with_capacity(order);
    for j in 1..=order {
        // residual of f(u, ψ_{j−1}(u)) at u^j
        let series = f.eval_v_series(ring, &psi, j as u16);
        let r = series[j].clone();
        let c = ring.neg(&ring.mul(&r, &fv_inv));
        psi.push(c);
    }
    Ok(psi)
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::exactalg::Field;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hensel_solution_vanishes_to_order(
            coeffs in proptest::collection::vec(-3i64..4, 16),
        ) {
            let q = Field::rationals();
            let mut f = LocalPoly::zero();
            let mut idx = 0;
            for a in 0..4u16 {
                for b in 0..4u16 {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    if idx < coeffs.len() {
                        f.insert(&q, (a, b), q.from_int(coeffs[idx]));
                        idx += 1;
                    }
                }
            }
            f.terms.remove(&(0, 1));
            f.insert(&q, (0, 1), q.one());
            let order = 5;
            let psi = hensel_graph(&q, &f, order).unwrap();
            let series = f.eval_v_series(&q, &psi, order as u16);
            for c in series.iter().take(order + 1) {
                prop_assert!(q.is_zero(c));
            }
        }
    }
}
