//! Truncated power-series helpers over an arbitrary ring, used to transport
//! branch jets through projective transformations.

use crate::exactalg::{AlgError, Ring};

pub fn series_mul<R: Ring>(ring: &R, a: &[R::El], b: &[R::El], len: usize) -> Vec<R::El> {
    let mut out = vec![ring.zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if ring.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] = ring.add(&out[i + j], &ring.mul(x, y));
        }
    }
    out
}

/// Multiplicative inverse of a series with unit constant term.
pub fn series_inv<R: Ring>(ring: &R, a: &[R::El], len: usize) -> Result<Vec<R::El>, AlgError> {
    let a0 = ring.inv(&a[0])?;
    let mut out = vec![ring.zero(); len];
    out[0] = a0.clone();
    for n in 1..len {
        let mut acc = ring.zero();
        for k in 1..=n {
            if k < a.len() {
                acc = ring.add(&acc, &ring.mul(&a[k], &out[n - k]));
            }
        }
        out[n] = ring.neg(&ring.mul(&a0, &acc));
    }
    Ok(out)
}

/// Compose f(g(t)) for a series g with g(0) = 0.
pub fn series_compose<R: Ring>(ring: &R, f: &[R::El], g: &[R::El], len: usize) -> Vec<R::El> {
    debug_assert!(g.is_empty() || ring.is_zero(&g[0]));
    // Horner from the top coefficient down
    let mut out = vec![ring.zero(); len];
    for c in f.iter().rev() {
        out = series_mul(ring, &out, g, len);
        out[0] = ring.add(&out[0], c);
    }
    out
}
