//! Computation of h⁰(X,T_X) via dual-number stabilizers, estimation of the
//! reduced dimension of Aut⁰ via finite-field point counting, smoothness
//! verdicts, and symbolic verification of parametric stabilizer families.

pub mod count;
pub mod family;
mod series;

use serde::Serialize;

use crate::cluster::{agp_check, BlowupConfig};
use crate::exactalg::{linalg, AlgError, DualRing, Field, Ring, RingOver};
use crate::plane::PglElem;

pub use count::{reduced_dim_estimate, stabilizer_point_count, DimEstimate};
pub use family::{family_tangent_dim, verify_family, StabFamily};

/// Branch data of one tower, lifted into an arbitrary ring: the base point,
/// the coordinate roles of the canonical chart, and the jet coefficients.
#[derive(Clone, Debug)]
pub struct LiftedTower<R: Ring> {
    pub point: [R::El; 3],
    /// coordinate index that equals 1 in the chart
    pub chart: usize,
    /// coordinate index of the branch parameter u
    pub u_index: usize,
    /// coordinate index of the graph variable v
    pub v_index: usize,
    /// affine coordinates of the base in (u, v) order
    pub base_u: R::El,
    pub base_v: R::El,
    /// ψ₁ … ψ_{height−1}
    pub psi: Vec<R::El>,
    pub height: usize,
}

/// Lift the towers of a configuration into a ring over the base field.
pub fn lift_config<R: RingOver<Field>>(ring: &R, cfg: &BlowupConfig) -> Vec<LiftedTower<R>> {
    cfg.towers
        .iter()
        .map(|t| {
            let chart = t.jet.chart;
            let (ia, ib) = match chart {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (u_index, v_index) =
                if t.jet.v_is_second { (ia, ib) } else { (ib, ia) };
            let (bu, bv) = if t.jet.v_is_second {
                (t.jet.base.0.clone(), t.jet.base.1.clone())
            } else {
                (t.jet.base.1.clone(), t.jet.base.0.clone())
            };
            LiftedTower {
                point: [
                    ring.embed(&t.base.coords[0]),
                    ring.embed(&t.base.coords[1]),
                    ring.embed(&t.base.coords[2]),
                ],
                chart,
                u_index,
                v_index,
                base_u: ring.embed(&bu),
                base_v: ring.embed(&bv),
                psi: t.jet.psi.iter().take(t.height.saturating_sub(1)).map(|c| ring.embed(c)).collect(),
                height: t.height,
            }
        })
        .collect()
}

/// The fixed-point residuals of a matrix acting on a lifted configuration:
/// per tower, the three components of (g·P) ∧ P followed by the differences
/// of the first height−1 graph coefficients of the transformed branch.
/// `Ok(None)` means the transformed tangent left the canonical chart, which
/// can only happen over rings with zero divisors absent, i.e. when g visibly
/// does not fix the tower.
pub fn stabilizer_residuals<R: Ring>(
    ring: &R,
    g: &[[R::El; 3]; 3],
    towers: &[LiftedTower<R>],
) -> Result<Option<Vec<R::El>>, AlgError> {
    let mut out = Vec::new();
    for t in towers {
        // base condition: g·P proportional to P
        let mut gp = [ring.zero(), ring.zero(), ring.zero()];
        for (i, x) in gp.iter_mut().enumerate() {
            for j in 0..3 {
                *x = ring.add(x, &ring.mul(&g[i][j], &t.point[j]));
            }
        }
        let p = &t.point;
        out.push(ring.sub(&ring.mul(&gp[1], &p[2]), &ring.mul(&gp[2], &p[1])));
        out.push(ring.sub(&ring.mul(&gp[2], &p[0]), &ring.mul(&gp[0], &p[2])));
        out.push(ring.sub(&ring.mul(&gp[0], &p[1]), &ring.mul(&gp[1], &p[0])));
        if t.height < 2 {
            continue;
        }
        // branch path B(t) in homogeneous coordinates, as series of length h
        let len = t.height;
        let mut comp = [vec![ring.zero(); len], vec![ring.zero(); len], vec![ring.zero(); len]];
        comp[t.chart][0] = ring.one();
        comp[t.u_index][0] = t.base_u.clone();
        if len > 1 {
            comp[t.u_index][1] = ring.one();
        }
        comp[t.v_index][0] = t.base_v.clone();
        for (j, c) in t.psi.iter().enumerate() {
            if j + 1 < len {
                comp[t.v_index][j + 1] = c.clone();
            }
        }
        // image path C(t) = g·B(t)
        let mut img = [vec![ring.zero(); len], vec![ring.zero(); len], vec![ring.zero(); len]];
        for i in 0..3 {
            for j in 0..3 {
                if ring.is_zero(&g[i][j]) {
                    continue;
                }
                for k in 0..len {
                    let s = ring.mul(&g[i][j], &comp[j][k]);
                    img[i][k] = ring.add(&img[i][k], &s);
                }
            }
        }
        // affine image in the same chart; a vanishing chart coordinate means
        // the image left the chart, i.e. g does not fix the tower
        if ring.is_zero(&img[t.chart][0]) {
            return Ok(None);
        }
        let denom = series::series_inv(ring, &img[t.chart], len)?;
        let au = series::series_mul(ring, &img[t.u_index], &denom, len);
        let av = series::series_mul(ring, &img[t.v_index], &denom, len);
        // recentre at the transformed base; the transformed branch follows
        // the original one iff ṽ(t) = ψ(ũ(t)) as jets (this also catches a
        // tangent rotated out of the chart: then ũ₁ = 0 forces ṽ₁ ≠ 0)
        let mut u_t: Vec<R::El> = au.clone();
        u_t[0] = ring.zero();
        let mut v_t: Vec<R::El> = av.clone();
        v_t[0] = ring.zero();
        let mut psi_series = vec![ring.zero(); len];
        for (j, c) in t.psi.iter().enumerate() {
            if j + 1 < len {
                psi_series[j + 1] = c.clone();
            }
        }
        let expected = series::series_compose(ring, &psi_series, &u_t, len);
        for j in 1..t.height {
            out.push(ring.sub(&v_t[j], &expected[j]));
        }
    }
    Ok(Some(out))
}

/// Does g fix every tower of the configuration: the base points projectively
/// and the infinitely near points up to each tower's height.
pub fn fixes_config<R: RingOver<Field>>(
    ring: &R,
    g: &PglElem<R>,
    cfg: &BlowupConfig,
) -> Result<bool, AlgError> {
    let towers = lift_config(ring, cfg);
    match stabilizer_residuals(ring, &g.m, &towers)? {
        None => Ok(false),
        Some(res) => Ok(res.iter().all(|r| ring.is_zero(r))),
    }
}

/// h⁰(X, T_X): the dimension of the Lie algebra of the stabilizer scheme.
///
/// Writes g = I + εM over the dual numbers; the fixed-point residuals are
/// linear in the entries of M because ε² = 0, so evaluating them on the nine
/// elementary matrices assembles the full linear system. The nullspace always
/// contains the scalar line εI; the reported dimension is taken in pgl₃.
pub fn h0_vector_fields(cfg: &BlowupConfig) -> Result<usize, AlgError> {
    let violations = agp_check(cfg)?;
    if !violations.is_empty() {
        return Err(AlgError::Invalid(format!(
            "configuration is not in almost general position: {:?}",
            violations
        )));
    }
    h0_vector_fields_unchecked(cfg)
}

pub(crate) fn h0_vector_fields_unchecked(cfg: &BlowupConfig) -> Result<usize, AlgError> {
    let field = cfg.field.clone();
    let dual = DualRing::new(field.clone(), 2);
    let towers = lift_config(&dual, cfg);
    let mut columns: Vec<Vec<crate::exactalg::KElem>> = Vec::with_capacity(9);
    let mut nrows = None;
    for k in 0..3 {
        for l in 0..3 {
            let mut g = [
                [dual.zero(), dual.zero(), dual.zero()],
                [dual.zero(), dual.zero(), dual.zero()],
                [dual.zero(), dual.zero(), dual.zero()],
            ];
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = dual.one();
            }
            g[k][l] = dual.add(&g[k][l], &dual.eps());
            let res = stabilizer_residuals(&dual, &g, &towers)?
                .expect("infinitesimal deformations cannot rotate the tangent");
            match nrows {
                None => nrows = Some(res.len()),
                Some(n) => debug_assert_eq!(n, res.len()),
            }
            let col: Vec<crate::exactalg::KElem> = res
                .iter()
                .map(|r| {
                    debug_assert!(field.is_zero(&dual.coeff(r, 0)));
                    dual.coeff(r, 1)
                })
                .collect();
            columns.push(col);
        }
    }
    let nrows = nrows.unwrap_or(0);
    let mut rows = Vec::with_capacity(nrows);
    for r in 0..nrows {
        rows.push(columns.iter().map(|c| c[r].clone()).collect::<Vec<_>>());
    }
    let null = linalg::kernel_dim(&field, &rows, 9);
    Ok(null - 1)
}

/// Smoothness verdict for the connected automorphism scheme.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothVerdict {
    Smooth,
    NonReduced,
    Undetermined,
}

/// h⁰, the point-count dimension estimate, and the comparison of the two.
#[derive(Clone, Debug, Serialize)]
pub struct StabilizerReport {
    pub h0: usize,
    pub reduced_dim_estimate: Option<usize>,
    pub smooth: SmoothVerdict,
    pub point_counts: Vec<(u64, u64)>,
}

/// Compute the report. In characteristic zero group schemes are smooth and
/// no probe is run; in finite characteristic the stabilizer is counted over
/// the given field sizes and the growth exponent is compared with h⁰.
pub fn smoothness_verdict(cfg: &BlowupConfig, qs: &[u64]) -> Result<StabilizerReport, AlgError> {
    let h0 = h0_vector_fields(cfg)?;
    if cfg.field.char_p() == 0 {
        return Ok(StabilizerReport {
            h0,
            reduced_dim_estimate: None,
            smooth: SmoothVerdict::Smooth,
            point_counts: Vec::new(),
        });
    }
    let mut counts = Vec::new();
    for &q in qs {
        counts.push((q, stabilizer_point_count(cfg, q)?));
    }
    let mut est = reduced_dim_estimate(&counts)?;
    // several component-contaminated models can fit two counts; a further
    // field size separates them
    let k = cfg.field.extension_degree() as u32;
    let mut refinements = 0;
    while est == DimEstimate::Undetermined && refinements < 2 {
        let q_max = counts.iter().map(|&(q, _)| q).max().unwrap();
        let p = cfg.field.char_p();
        let mut next = q_max * p;
        while {
            let mut m = 0u32;
            let mut v = next;
            while v % p == 0 {
                v /= p;
                m += 1;
            }
            m % k != 0
        } {
            next *= p;
        }
        if next > 128 {
            break;
        }
        counts.push((next, stabilizer_point_count(cfg, next)?));
        est = reduced_dim_estimate(&counts)?;
        refinements += 1;
    }
    let (smooth, dim) = match est {
        DimEstimate::Undetermined => (SmoothVerdict::Undetermined, None),
        DimEstimate::Dim(d) => {
            let verdict = if d == h0 {
                SmoothVerdict::Smooth
            } else if d < h0 {
                SmoothVerdict::NonReduced
            } else {
                SmoothVerdict::Undetermined
            };
            (verdict, Some(d))
        }
    };
    Ok(StabilizerReport { h0, reduced_dim_estimate: dim, smooth, point_counts: counts })
}
