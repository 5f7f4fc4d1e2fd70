use super::ring::Ring;

/// Row-reduce in place over a field (every nonzero pivot must be a unit).
/// Returns the rank.
pub fn row_reduce<R: Ring>(ring: &R, rows: &mut Vec<Vec<R::El>>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let mut pivot = None;
        for (r, row) in rows.iter().enumerate().skip(rank) {
            if ring.is_unit(&row[col]) {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let inv = ring.inv(&rows[rank][col]).expect("unit pivot");
        for x in rows[rank].iter_mut() {
            *x = ring.mul(x, &inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || ring.is_zero(&row[col]) {
                continue;
            }
            let f = row[col].clone();
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                *x = ring.sub(x, &ring.mul(&f, pv));
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub fn rank<R: Ring>(ring: &R, rows: &[Vec<R::El>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    row_reduce(ring, &mut m, ncols)
}

pub fn kernel_dim<R: Ring>(ring: &R, rows: &[Vec<R::El>], ncols: usize) -> usize {
    ncols - rank(ring, rows, ncols)
}

/// Basis of the right kernel {x : A·x = 0}.
pub fn kernel_basis<R: Ring>(ring: &R, rows: &[Vec<R::El>], ncols: usize) -> Vec<Vec<R::El>> {
    let mut m = rows.to_vec();
    let rk = row_reduce(ring, &mut m, ncols);
    m.truncate(rk);
    // locate pivot columns
    let mut pivots = Vec::with_capacity(rk);
    for row in &m {
        let c = (0..ncols).find(|&c| !ring.is_zero(&row[c])).expect("nonzero row");
        pivots.push(c);
    }
    let is_pivot = |c: usize| pivots.contains(&c);
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot(free) {
            continue;
        }
        let mut v = vec![ring.zero(); ncols];
        v[free] = ring.one();
        for (row, &pc) in m.iter().zip(&pivots) {
            // pivot entry is 1 after reduction
            v[pc] = ring.neg(&row[free]);
        }
        basis.push(v);
    }
    basis
}
