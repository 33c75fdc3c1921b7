//! Deliberately naive reference computations for tests.
//!
//! Nothing here is shared with the production crates; every routine is the
//! textbook method on dense matrices or an exhaustive search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Dense = Vec<Vec<BigInt>>;

pub fn dense_from_i64(rows: &[Vec<i64>]) -> Dense {
    rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

fn ncols(m: &Dense, fallback: usize) -> usize {
    m.first().map_or(fallback, |r| r.len())
}

/// Invariant factors (nonzero diagonal of the Smith form), in divisibility order.
pub fn snf_diagonal(m: &Dense) -> Vec<BigInt> {
    let mut a = m.clone();
    let rows = a.len();
    let cols = ncols(&a, 0);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        if !move_min_to(&mut a, t, t..rows, t..cols) {
            break;
        }
        loop {
            for i in t + 1..rows {
                let q = round_div(&a[i][t], &a[t][t]);
                if !q.is_zero() {
                    for j in t..cols {
                        let v = &a[t][j] * &q;
                        a[i][j] -= v;
                    }
                }
            }
            for j in t + 1..cols {
                let q = round_div(&a[t][j], &a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let v = &row[t] * &q;
                        row[j] -= v;
                    }
                }
            }
            let row_left = (t + 1..cols).any(|j| !a[t][j].is_zero());
            let col_left = (t + 1..rows).any(|i| !a[i][t].is_zero());
            if row_left || col_left {
                // a smaller remainder exists in the pivot cross
                let mut best = (t, t);
                for j in t + 1..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                for i in t + 1..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                a.swap(t, best.0);
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

fn round_div(x: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = x.div_mod_floor(d);
    if (&r + &r).abs() > d.abs() {
        q + 1
    } else {
        q
    }
}

fn move_min_to(a: &mut Dense, t: usize, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> bool {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    let Some((pi, pj)) = best else { return false };
    a.swap(t, pi);
    for row in a.iter_mut() {
        row.swap(t, pj);
    }
    true
}

/// Rank over Q by fraction-free elimination.
pub fn rank_q(m: &Dense) -> usize {
    snf_diagonal(m).len()
}

/// Rank over F_p by Gaussian elimination on residues.
pub fn rank_mod_p(m: &Dense, p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| {
                    let x = v.mod_floor(&pb);
                    x.try_into().unwrap()
                })
                .collect()
        })
        .collect();
    let rows = a.len();
    let cols = ncols(m, 0);
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let inv = |x: u64| {
        let (mut r, mut b, mut e) = (1u64, x, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, pr);
        let iv = inv(a[rank][c]);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = mul(a[r][c], iv);
                for k in c..cols {
                    let s = mul(f, a[rank][k]);
                    a[r][k] = (a[r][k] + p - s) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn mat_mul(a: &Dense, b: &Dense, inner: usize, cols: usize) -> Dense {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Integer basis of the kernel of `m` (as columns), from column Hermite
/// reduction of `[m; I]`.
pub fn kernel_basis(m: &Dense, cols: usize) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    let mut a: Dense = m.clone();
    for i in 0..cols {
        let mut r = vec![BigInt::zero(); cols];
        r[i] = BigInt::one();
        a.push(r);
    }
    let mut piv_col = 0;
    for r in 0..rows {
        loop {
            let nz: Vec<usize> = (piv_col..cols).filter(|&j| !a[r][j].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let jmin = *nz.iter().min_by_key(|&&j| a[r][j].abs()).unwrap();
            for row in a.iter_mut() {
                row.swap(piv_col, jmin);
            }
            let mut done = true;
            for j in piv_col + 1..cols {
                if a[r][j].is_zero() {
                    continue;
                }
                let q = a[r][j].div_floor(&a[r][piv_col]);
                for row in a.iter_mut() {
                    let v = &row[piv_col] * &q;
                    row[j] -= v;
                }
                if !a[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                piv_col += 1;
                break;
            }
        }
    }
    (piv_col..cols).map(|j| (rows..rows + cols).map(|i| a[i][j].clone()).collect()).collect()
}

/// Homology of `C_{k+1} -> C_k -> C_{k-1}` at `C_k` computed from the full
/// presentation: image coordinates in a kernel basis, then Smith form.
/// Returns (betti, nontrivial invariant factors).
pub fn homology(d_k: &Dense, d_k1: &Dense, dim: usize, dim_in: usize) -> (usize, Vec<BigInt>) {
    let ker = kernel_basis(d_k, dim);
    let z = ker.len();
    if z == 0 {
        return (0, Vec::new());
    }
    // solve ker * X = d_k1 over Z column by column using the rational
    // pseudo-inverse on an invertible minor of the kernel basis
    let kt: Dense = (0..dim).map(|i| (0..z).map(|j| ker[j][i].clone()).collect()).collect();
    let sel = independent_rows(&kt, z);
    let mut coords: Dense = vec![vec![BigInt::zero(); dim_in]; z];
    for c in 0..dim_in {
        let rhs: Vec<BigInt> = sel.iter().map(|&i| d_k1[i][c].clone()).collect();
        let sq: Dense = sel.iter().map(|&i| kt[i].clone()).collect();
        let x = solve_integer(&sq, &rhs);
        for j in 0..z {
            coords[j][c] = x[j].clone();
        }
    }
    let diag = snf_diagonal(&coords);
    let betti = z - diag.len();
    let torsion = diag.into_iter().filter(|d| !d.is_one()).collect();
    (betti, torsion)
}

fn independent_rows(m: &Dense, want: usize) -> Vec<usize> {
    let mut chosen: Dense = Vec::new();
    let mut idx = Vec::new();
    for (i, r) in m.iter().enumerate() {
        chosen.push(r.clone());
        if rank_q(&chosen) == chosen.len() {
            idx.push(i);
            if idx.len() == want {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    idx
}

/// Cramer's rule for a square nonsingular system with an integral solution.
fn solve_integer(a: &Dense, b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    let det = determinant(a);
    (0..n)
        .map(|j| {
            let mut aj = a.clone();
            for i in 0..n {
                aj[i][j] = b[i].clone();
            }
            let num = determinant(&aj);
            assert!((&num % &det).is_zero(), "image not in kernel lattice");
            num / &det
        })
        .collect()
}

/// Bareiss determinant.
pub fn determinant(a: &Dense) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// All integer vectors in the box `|v_i| <= bound` minimizing `v^T G v`
/// over nonzero vectors. Returns (minimum, vectors).
pub fn box_minimal_vectors(gram: &[Vec<i64>], bound: i64) -> (i64, Vec<Vec<i64>>) {
    let n = gram.len();
    let mut best = i64::MAX;
    let mut out = Vec::new();
    let mut v = vec![-bound; n];
    loop {
        if v.iter().any(|&x| x != 0) {
            let mut q = 0;
            for i in 0..n {
                for j in 0..n {
                    q += v[i] * gram[i][j] * v[j];
                }
            }
            if q < best {
                best = q;
                out.clear();
            }
            if q == best {
                out.push(v.clone());
            }
        }
        let mut i = 0;
        while i < n && v[i] == bound {
            v[i] = -bound;
            i += 1;
        }
        if i == n {
            break;
        }
        v[i] += 1;
    }
    (best, out)
}

/// Every matrix in GL_n(Z) with entries in `[-bound, bound]`.
pub fn unimodular_box(n: usize, bound: i64) -> Vec<Vec<Vec<i64>>> {
    let total = n * n;
    let mut e = vec![-bound; total];
    let mut out = Vec::new();
    loop {
        let m: Vec<Vec<i64>> = (0..n).map(|i| e[i * n..(i + 1) * n].to_vec()).collect();
        let d = determinant(&dense_from_i64(&m));
        if d.abs().is_one() {
            out.push(m);
        }
        let mut i = 0;
        while i < total && e[i] == bound {
            e[i] = -bound;
            i += 1;
        }
        if i == total {
            break;
        }
        e[i] += 1;
    }
    out
}

/// Number of points of P^{k-1}(Z/m) by counting unimodular-content rows
/// and dividing by the unit count.
pub fn projective_count(k: usize, m: u64) -> u64 {
    let mut rows = 0u64;
    let mut v = vec![0u64; k];
    loop {
        let g = v.iter().fold(m, |g, &x| g.gcd(&x));
        if g == 1 {
            rows += 1;
        }
        let mut i = 0;
        while i < k && v[i] == m - 1 {
            v[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        v[i] += 1;
    }
    let units = (1..=m).filter(|x| x.gcd(&m) == 1).count() as u64;
    rows / units
}

/// Hurwitz-free Dirichlet series partial sum with an alternating tail
/// average, used to cross-check L-values at s >= 2.
pub fn dirichlet_series(chi: impl Fn(u64) -> f64, s: f64, terms: u64) -> f64 {
    let mut sum = 0.0;
    for k in (1..=terms).rev() {
        sum += chi(k) / (k as f64).powf(s);
    }
    sum
}
