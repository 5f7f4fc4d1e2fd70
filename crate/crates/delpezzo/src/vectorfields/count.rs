//! Stabilizer point counting over small finite fields: an empirical dimension
//! probe for the smoothness column. The search space is pre-reduced by the
//! linear constraints "g fixes every base point and every tangent flag"; only
//! the resulting matrix subspace is enumerated, filtered by unit determinant
//! and the full fixed-point conditions.

use rayon::prelude::*;

use crate::cluster::BlowupConfig;
use crate::exactalg::{fq_make, AlgError, Field, FieldKind, KElem, Ring};

use super::{lift_config, LiftedTower};

/// 𝔽_q for tiny q with full lookup tables; elements are indices 0..q in the
/// power-basis order of `Field::elements`.
#[derive(Clone, PartialEq, Debug)]
pub struct SmallFq {
    pub q: usize,
    pub p: u64,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl SmallFq {
    pub fn build(field: &Field) -> Result<SmallFq, AlgError> {
        let q = field
            .order()
            .ok_or_else(|| AlgError::Invalid("point counting needs a finite field".into()))?
            as usize;
        if q > 128 {
            return Err(AlgError::Invalid(format!("field size {} too large for tables", q)));
        }
        let els = field.elements();
        let index_of = |x: &KElem| els.iter().position(|e| e == x).unwrap() as u8;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for (i, a) in els.iter().enumerate() {
            neg[i] = index_of(&field.neg(a));
            inv[i] = if field.is_zero(a) { 0 } else { index_of(&field.inv(a).unwrap()) };
            for (j, b) in els.iter().enumerate() {
                add[i * q + j] = index_of(&field.add(a, b));
                mul[i * q + j] = index_of(&field.mul(a, b));
            }
        }
        Ok(SmallFq { q, p: field.char_p(), add, mul, neg, inv })
    }

    #[inline]
    pub fn addx(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mulx(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }
}

impl Ring for SmallFq {
    type El = u8;

    fn zero(&self) -> u8 {
        0
    }

    fn one(&self) -> u8 {
        1
    }

    fn from_int(&self, n: i64) -> u8 {
        let r = n.rem_euclid(self.p as i64) as u8;
        r // prime-field scalars sit at indices 0..p in the power basis
    }

    fn add(&self, a: &u8, b: &u8) -> u8 {
        self.addx(*a, *b)
    }

    fn neg(&self, a: &u8) -> u8 {
        self.neg[*a as usize]
    }

    fn mul(&self, a: &u8, b: &u8) -> u8 {
        self.mulx(*a, *b)
    }

    fn is_zero(&self, a: &u8) -> bool {
        *a == 0
    }

    fn is_unit(&self, a: &u8) -> bool {
        *a != 0
    }

    fn inv(&self, a: &u8) -> Result<u8, AlgError> {
        if *a == 0 {
            Err(AlgError::NonUnit)
        } else {
            Ok(self.inv[*a as usize])
        }
    }

    fn characteristic(&self) -> u64 {
        self.p
    }
}

/// Embedding of the configuration field into the counting field: images of
/// the power basis 1, t, t², …
pub struct FqEmbedding {
    pub target: SmallFq,
    basis_images: Vec<u8>,
    src_p: u64,
}

impl FqEmbedding {
    pub fn new(src: &Field, q: u64) -> Result<FqEmbedding, AlgError> {
        let (p, k, modulus) = match src.kind() {
            FieldKind::Finite { p, k, modulus } => (*p, *k, modulus.clone()),
            FieldKind::Rationals => {
                return Err(AlgError::Invalid("cannot count points over Q".into()))
            }
        };
        // q must be a power of p whose degree is divisible by k
        let mut m = 0usize;
        let mut v = q;
        while v % p == 0 {
            v /= p;
            m += 1;
        }
        if v != 1 || m == 0 {
            return Err(AlgError::Invalid(format!("{} is not a power of the characteristic {}", q, p)));
        }
        if m % k != 0 {
            return Err(AlgError::Invalid(format!(
                "F_{} does not contain the coordinate field F_{}^{}",
                q, p, k
            )));
        }
        let big = fq_make(p, m)?;
        let target = SmallFq::build(&big)?;
        // find the first root of the source modulus in the target field
        let mut root = None;
        if k == 1 {
            root = Some(0u8);
        } else {
            'search: for cand in 0..target.q as u8 {
                // evaluate the monic modulus at cand
                let mut acc = 0u8;
                for &c in modulus.iter().rev() {
                    acc = target.mulx(acc, cand);
                    acc = target.addx(acc, target.from_int(c as i64));
                }
                if acc == 0 {
                    root = Some(cand);
                    break 'search;
                }
            }
        }
        let beta = root.ok_or_else(|| {
            AlgError::Invalid("coordinate field does not embed into the counting field".into())
        })?;
        let mut basis_images = vec![1u8];
        for _ in 1..k {
            let last = *basis_images.last().unwrap();
            basis_images.push(target.mulx(last, beta));
        }
        Ok(FqEmbedding { target, basis_images, src_p: p })
    }

    pub fn embed(&self, x: &KElem) -> u8 {
        match x {
            KElem::Fq(coeffs) => {
                let mut acc = 0u8;
                for (c, b) in coeffs.iter().zip(&self.basis_images) {
                    let scalar = (*c % self.src_p) as u8;
                    acc = self.target.addx(acc, self.target.mulx(scalar, *b));
                }
                acc
            }
            KElem::Q(_) => unreachable!("rational element in finite-field embedding"),
        }
    }
}

fn det3_fq(f: &SmallFq, g: &[u8; 9]) -> u8 {
    let m = |i: usize, j: usize| g[3 * i + j];
    let t1 = f.mulx(m(0, 0), f.addx(f.mulx(m(1, 1), m(2, 2)), f.neg[f.mulx(m(1, 2), m(2, 1)) as usize]));
    let t2 = f.mulx(m(0, 1), f.addx(f.mulx(m(1, 0), m(2, 2)), f.neg[f.mulx(m(1, 2), m(2, 0)) as usize]));
    let t3 = f.mulx(m(0, 2), f.addx(f.mulx(m(1, 0), m(2, 1)), f.neg[f.mulx(m(1, 1), m(2, 0)) as usize]));
    f.addx(f.addx(t1, f.neg[t2 as usize]), t3)
}

/// Count the elements of PGL₃(𝔽_q) fixing the configuration.
pub fn stabilizer_point_count(cfg: &BlowupConfig, q: u64) -> Result<u64, AlgError> {
    if cfg.towers.is_empty() {
        // the stabilizer of nothing is the whole group
        return Ok(pgl3_order(q));
    }
    if cfg.towers.len() == 1 && cfg.towers[0].height == 1 {
        // orbit–stabilizer for the transitive action on P²
        return Ok(pgl3_order(q) / (q * q + q + 1));
    }
    let emb = FqEmbedding::new(&cfg.field, q)?;
    let fq = emb.target.clone();
    // lift towers into the counting field
    let towers_k = lift_config(&cfg.field, cfg);
    let towers: Vec<LiftedTower<SmallFq>> = towers_k
        .iter()
        .map(|t| LiftedTower {
            point: [emb.embed(&t.point[0]), emb.embed(&t.point[1]), emb.embed(&t.point[2])],
            chart: t.chart,
            u_index: t.u_index,
            v_index: t.v_index,
            base_u: emb.embed(&t.base_u),
            base_v: emb.embed(&t.base_v),
            psi: t.psi.iter().map(|c| emb.embed(c)).collect(),
            height: t.height,
        })
        .collect();
    // linear pre-reduction: fixing each base point and each tangent flag is
    // linear in the nine entries of g
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for t in &towers {
        let p = &t.point;
        // (g·P) ∧ P = 0: three rows, coefficients on g[i][j]
        for (c1, c2) in [(1usize, 2usize), (2, 0), (0, 1)] {
            let mut row = vec![0u8; 9];
            for j in 0..3 {
                row[3 * c1 + j] = fq.addx(row[3 * c1 + j], fq.mulx(p[j], p[c2]));
                row[3 * c2 + j] = fq.addx(row[3 * c2 + j], fq.neg[fq.mulx(p[j], p[c1]) as usize]);
            }
            rows.push(row);
        }
        if t.height >= 2 {
            // tangent line λ = P × T with T the tangent direction point
            let mut tdir = [0u8, 0, 0];
            tdir[t.u_index] = 1;
            tdir[t.v_index] = if t.psi.is_empty() { 0 } else { t.psi[0] };
            let cross = |a: &[u8; 3], b: &[u8; 3]| -> [u8; 3] {
                [
                    fq.addx(fq.mulx(a[1], b[2]), fq.neg[fq.mulx(a[2], b[1]) as usize]),
                    fq.addx(fq.mulx(a[2], b[0]), fq.neg[fq.mulx(a[0], b[2]) as usize]),
                    fq.addx(fq.mulx(a[0], b[1]), fq.neg[fq.mulx(a[1], b[0]) as usize]),
                ]
            };
            let lam = cross(p, &tdir);
            // (λ·g) ∧ λ = 0: (λg)_i = Σ_k λ_k g[k][i]
            for (c1, c2) in [(1usize, 2usize), (2, 0), (0, 1)] {
                let mut row = vec![0u8; 9];
                for k in 0..3 {
                    row[3 * k + c1] = fq.addx(row[3 * k + c1], fq.mulx(lam[k], lam[c2]));
                    row[3 * k + c2] =
                        fq.addx(row[3 * k + c2], fq.neg[fq.mulx(lam[k], lam[c1]) as usize]);
                }
                rows.push(row);
            }
        }
    }
    let basis = crate::exactalg::linalg::kernel_basis(&fq, &rows, 9);
    // the scalar matrices always satisfy the linear constraints; re-express
    // the solution space with the identity as its first basis vector and
    // enumerate projective representatives, one per PGL₃ class
    let identity = [1u8, 0, 0, 0, 1, 0, 0, 0, 1];
    let mut solve_rows: Vec<Vec<u8>> = Vec::new();
    for slot in 0..9 {
        let mut row: Vec<u8> = basis.iter().map(|b| b[slot]).collect();
        row.push(identity[slot]);
        solve_rows.push(row);
    }
    let ncols = basis.len() + 1;
    let id_coeffs = crate::exactalg::linalg::kernel_basis(&fq, &solve_rows, ncols)
        .into_iter()
        .find(|v| v[basis.len()] != 0)
        .expect("the identity lies in the stabilizer subspace");
    let skip = (0..basis.len())
        .find(|&i| id_coeffs[i] != 0)
        .expect("identity has a nonzero coefficient");
    let mut proj_basis: Vec<[u8; 9]> = vec![identity];
    for (i, b) in basis.iter().enumerate() {
        if i != skip {
            let mut arr = [0u8; 9];
            arr.copy_from_slice(b);
            proj_basis.push(arr);
        }
    }
    let dim = proj_basis.len();
    let qb = fq.q as u64;
    // the linear system already enforces base points and tangent directions,
    // so only towers of height ≥ 3 need the nonlinear jet check
    let jet_towers: Vec<FastTower> = towers
        .iter()
        .filter(|t| t.height >= 3)
        .map(|t| {
            let mut psi = [0u8; MAX_LEN];
            for (j, &c) in t.psi.iter().enumerate() {
                if j + 1 < MAX_LEN {
                    psi[j + 1] = c;
                }
            }
            FastTower {
                chart: t.chart,
                u_index: t.u_index,
                v_index: t.v_index,
                base_u: t.base_u,
                base_v: t.base_v,
                psi,
                height: t.height,
            }
        })
        .collect();
    // projective representatives: leading coefficient 1 at each pivot
    let total: u64 = (0..dim)
        .into_par_iter()
        .map(|pivot| {
            let g = proj_basis[pivot];
            if pivot + 1 == dim {
                let mut count = 0;
                enumerate_rest(&fq, &proj_basis, dim, &g, &jet_towers, &mut count);
                return count;
            }
            (0..qb)
                .into_par_iter()
                .map(|c| {
                    let mut start = g;
                    if c != 0 {
                        for (slot, &b) in proj_basis[pivot + 1].iter().enumerate() {
                            start[slot] = fq.addx(start[slot], fq.mulx(c as u8, b));
                        }
                    }
                    let mut count = 0;
                    enumerate_rest(&fq, &proj_basis, pivot + 2, &start, &jet_towers, &mut count);
                    count
                })
                .sum()
        })
        .sum();
    Ok(total)
}

const MAX_LEN: usize = 9;

/// Jet data in fixed-size buffers for the enumeration hot loop.
struct FastTower {
    chart: usize,
    u_index: usize,
    v_index: usize,
    base_u: u8,
    base_v: u8,
    psi: [u8; MAX_LEN],
    height: usize,
}

fn fixes_jets_fast(fq: &SmallFq, g: &[u8; 9], towers: &[FastTower]) -> bool {
    // staged precision: almost every candidate fails at its first nontrivial
    // jet level, so grow the truncation order one level at a time
    towers.iter().all(|t| (3..=t.height).all(|len| check_tower_to(fq, g, t, len)))
}

fn check_tower_to(fq: &SmallFq, g: &[u8; 9], t: &FastTower, len: usize) -> bool {
    // image under g of the branch path
    // B_chart = 1, B_u = base_u + t, B_v = base_v + ψ(t)
    let mut img = [[0u8; MAX_LEN]; 3];
    for i in 0..3 {
        let (gc, gu, gv) = (g[3 * i + t.chart], g[3 * i + t.u_index], g[3 * i + t.v_index]);
        img[i][0] = fq.addx(gc, fq.addx(fq.mulx(gu, t.base_u), fq.mulx(gv, t.base_v)));
        img[i][1] = fq.addx(img[i][1], gu);
        if gv != 0 {
            for k in 1..len {
                img[i][k] = fq.addx(img[i][k], fq.mulx(gv, t.psi[k]));
            }
        }
    }
    // invert the chart component
    let c0 = img[t.chart][0];
    if c0 == 0 {
        return false;
    }
    let mut denom = [0u8; MAX_LEN];
    let c0i = fq.inv[c0 as usize];
    denom[0] = c0i;
    for n in 1..len {
        let mut acc = 0u8;
        for k in 1..=n {
            acc = fq.addx(acc, fq.mulx(img[t.chart][k], denom[n - k]));
        }
        denom[n] = fq.neg[fq.mulx(c0i, acc) as usize];
    }
    let series_mul = |a: &[u8; MAX_LEN], b: &[u8; MAX_LEN]| {
        let mut out = [0u8; MAX_LEN];
        for i in 0..len {
            if a[i] == 0 {
                continue;
            }
            for j in 0..len - i {
                if b[j] != 0 {
                    out[i + j] = fq.addx(out[i + j], fq.mulx(a[i], b[j]));
                }
            }
        }
        out
    };
    let mut u_t = series_mul(&img[t.u_index], &denom);
    let mut v_t = series_mul(&img[t.v_index], &denom);
    u_t[0] = 0;
    v_t[0] = 0;
    // expected = ψ(ũ) by Horner, compared against ṽ
    let mut expected = [0u8; MAX_LEN];
    for k in (1..len.min(t.height)).rev() {
        expected = series_mul(&expected, &u_t);
        expected[0] = fq.addx(expected[0], t.psi[k]);
    }
    expected = series_mul(&expected, &u_t);
    // earlier levels were already checked at the previous truncation order
    let start = if len <= 3 { 1 } else { len - 1 };
    for j in start..len.min(t.height) {
        if v_t[j] != expected[j] {
            return false;
        }
    }
    true
}

fn enumerate_rest(
    fq: &SmallFq,
    basis: &[[u8; 9]],
    level: usize,
    partial: &[u8; 9],
    jet_towers: &[FastTower],
    count: &mut u64,
) {
    if level == basis.len() {
        let g = partial;
        if det3_fq(fq, g) == 0 {
            return;
        }
        if jet_towers.is_empty() || fixes_jets_fast(fq, g, jet_towers) {
            *count += 1;
        }
        return;
    }
    for c in 0..fq.q as u8 {
        let mut next = *partial;
        if c != 0 {
            for (slot, &b) in basis[level].iter().enumerate() {
                next[slot] = fq.addx(next[slot], fq.mulx(c, b));
            }
        }
        enumerate_rest(fq, basis, level + 1, &next, jet_towers, count);
    }
}

/// |PGL₃(𝔽_q)| = (q³−1)(q³−q)(q³−q²)/(q−1).
pub fn pgl3_order(q: u64) -> u64 {
    let q3 = q * q * q;
    (q3 - 1) * (q3 - q) * (q3 - q * q) / (q - 1)
}

/// Dimension estimate from stabilizer counts at increasing field sizes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DimEstimate {
    Dim(usize),
    Undetermined,
}

/// Largest component count considered for the stabilizer's group of
/// connected components. By Lang's theorem every component of the stabilizer
/// with a rational point contributes exactly |S⁰(𝔽_q)| points, so the counts
/// are N_q·|S⁰(𝔽_q)| with N_q bounded by the number of geometric components.
const MAX_COMPONENTS: u64 = 12;

fn group_order_model(q: u64, u: u32, t: u32, s: u32, w: u32) -> Option<u64> {
    let mut acc: u128 = 1;
    for _ in 0..u {
        acc = acc.checked_mul(q as u128)?;
    }
    for _ in 0..t {
        acc = acc.checked_mul((q - 1) as u128)?;
    }
    for _ in 0..s {
        acc = acc.checked_mul((q + 1) as u128)?;
    }
    for _ in 0..w {
        acc = acc.checked_mul((q * q + q + 1) as u128)?;
    }
    u64::try_from(acc).ok()
}

/// Dimensions consistent with the counts: the identity component of a
/// stabilizer inside PGL₃ has order q^u·(q−1)^t·(q+1)^s·(q²+q+1)^w over 𝔽_q,
/// and the observed count is that order times a small rational-component
/// count. Every count must be divided exactly.
fn structural_dims(counts: &[(u64, u64)]) -> Vec<usize> {
    let mut dims = Vec::new();
    for u in 0..=8u32 {
        for t in 0..=4u32 {
            for s in 0..=2u32 {
                for w in 0..=1u32 {
                    let dim = u + t + s + 2 * w;
                    if dim > 8 {
                        continue;
                    }
                    let ok = counts.iter().all(|&(q, c)| {
                        group_order_model(q, u, t, s, w).is_some_and(|m| {
                            m != 0 && c % m == 0 && c / m >= 1 && c / m <= MAX_COMPONENTS
                        })
                    });
                    if ok {
                        dims.push(dim as usize);
                    }
                }
            }
        }
    }
    dims.sort();
    dims.dedup();
    dims
}

/// Fit the counts against the exact orders of connected algebraic subgroups
/// of PGL₃, allowing a bounded component-group factor per field size; when no
/// unique structural fit exists, fall back to a power-law slope between the
/// two largest sizes with a 20% relative-residual guard.
pub fn reduced_dim_estimate(counts: &[(u64, u64)]) -> Result<DimEstimate, AlgError> {
    if counts.len() < 2 {
        return Err(AlgError::Invalid("need at least two point counts".into()));
    }
    if counts.iter().any(|&(_, c)| c == 0) {
        return Err(AlgError::Invalid("stabilizer counts cannot be zero".into()));
    }
    let dims = structural_dims(counts);
    if dims.len() == 1 {
        return Ok(DimEstimate::Dim(dims[0]));
    }
    if dims.len() > 1 {
        // ambiguous between several component-contaminated models; the caller
        // may refine with a further field size
        return Ok(DimEstimate::Undetermined);
    }
    // power-law slope between the two largest sizes
    let mut sorted = counts.to_vec();
    sorted.sort();
    let (q1, c1) = sorted[sorted.len() - 2];
    let (q2, c2) = sorted[sorted.len() - 1];
    let ratio = c2 as f64 / c1 as f64;
    let rq = q2 as f64 / q1 as f64;
    let d = (ratio.ln() / rq.ln()).round();
    if d < 0.0 {
        return Ok(DimEstimate::Undetermined);
    }
    let fit = rq.powf(d);
    let rel = (ratio - fit).abs() / ratio;
    if rel > 0.2 {
        Ok(DimEstimate::Undetermined)
    } else {
        Ok(DimEstimate::Dim(d as usize))
    }
}
