//! Integer lattices in `Z^n`: Hermite echelon form, integer solving, kernels.

/// Row echelon form `H = U · A` with `U` unimodular. Returns `(H, U, rank)`;
/// the first `rank` rows of `H` are nonzero, the remaining rows of `U` span
/// the integer left kernel of `A`.
pub fn echelon(rows: &[Vec<i64>], ncols: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, usize) {
    let m = rows.len();
    let mut h: Vec<Vec<i64>> = rows.to_vec();
    let mut u: Vec<Vec<i64>> =
        (0..m).map(|i| (0..m).map(|j| (i == j) as i64).collect()).collect();
    let mut r = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below r becomes the pivot
            let piv = (r..m).filter(|&i| h[i][col] != 0).min_by_key(|&i| h[i][col].abs());
            let Some(p) = piv else { break };
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[i][col] != 0 {
                    let q = h[i][col].div_euclid(h[r][col]);
                    sub_row(&mut h, i, r, q);
                    sub_row(&mut u, i, r, q);
                    if h[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[r][col] != 0 {
            if h[r][col] < 0 {
                h[r].iter_mut().for_each(|x| *x = -*x);
                u[r].iter_mut().for_each(|x| *x = -*x);
            }
            r += 1;
        }
    }
    (h, u, r)
}

fn sub_row(mat: &mut [Vec<i64>], i: usize, r: usize, q: i64) {
    let (a, b) = if i < r {
        let (lo, hi) = mat.split_at_mut(r);
        (&mut lo[i], &hi[0])
    } else {
        let (lo, hi) = mat.split_at_mut(i);
        (&mut hi[0], &lo[r])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x -= q * y;
    }
}

/// Rank over the rationals.
pub fn rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    echelon(rows, ncols).2
}

/// Integer coefficients `c` with `sum c_i gens_i = target`, if any.
pub fn solve(gens: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    let n = target.len();
    if gens.is_empty() {
        return target.iter().all(|&x| x == 0).then(Vec::new);
    }
    let (h, u, r) = echelon(gens, n);
    // x · H = target, solved pivot by pivot
    let mut rest = target.to_vec();
    let mut x = vec![0i64; gens.len()];
    let mut col = 0;
    for (i, row) in h.iter().enumerate().take(r) {
        while col < n && row[col] == 0 {
            if rest[col] != 0 {
                return None;
            }
            col += 1;
        }
        if rest[col] % row[col] != 0 {
            return None;
        }
        let q = rest[col] / row[col];
        x[i] = q;
        for (rj, hj) in rest.iter_mut().zip(row) {
            *rj -= q * hj;
        }
        col += 1;
    }
    if rest.iter().any(|&v| v != 0) {
        return None;
    }
    // c = x · U
    let mut c = vec![0i64; gens.len()];
    for (i, &xi) in x.iter().enumerate() {
        for (cj, uij) in c.iter_mut().zip(&u[i]) {
            *cj += xi * uij;
        }
    }
    Some(c)
}

pub fn contains(gens: &[Vec<i64>], v: &[i64]) -> bool {
    solve(gens, v).is_some()
}

/// Basis of `{ c : sum c_i rows_i = 0 }`.
pub fn left_kernel(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let (_, u, r) = echelon(rows, ncols);
    u[r..].to_vec()
}

/// Basis (echelon rows) of the lattice spanned by `gens`.
pub fn basis(gens: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let (h, _, r) = echelon(gens, ncols);
    h[..r].to_vec()
}

/// `{ c in Z^k : sum c_i a_i in span(lattice) }` for vectors `a_1..a_k`, as a basis.
pub fn preimage(a: &[Vec<i64>], lattice: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let k = a.len();
    let mut rows = a.to_vec();
    rows.extend(lattice.iter().cloned());
    let ker = left_kernel(&rows, ncols);
    let proj: Vec<Vec<i64>> = ker.iter().map(|c| c[..k].to_vec()).collect();
    basis(&proj, k)
}

/// Whether two generating sets span the same lattice.
pub fn same_span(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    a.iter().all(|v| contains(b, v)) && b.iter().all(|v| contains(a, v))
}
