//! Smith normal form: sparse unit-pivot pre-elimination followed by a dense
//! arbitrary-precision endgame on the reduced core.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::elim::{self, BigIntArith, Eliminator, Interrupt, SmallInt};
use crate::error::{ExactLaError, Result};
use crate::matrix::SparseIntMatrix;

/// Knobs for [`smith_normal_form_with`].
#[derive(Clone, Debug)]
pub struct SnfOptions {
    /// Switch to the dense endgame once the active core is at least this dense...
    pub dense_density: f64,
    /// ...and has at most this many columns.
    pub dense_max_cols: usize,
    /// Upper bound on the dense core footprint in bytes.
    pub memory_budget: Option<usize>,
    pub deadline: Option<Instant>,
}

impl Default for SnfOptions {
    fn default() -> Self {
        SnfOptions {
            dense_density: 0.2,
            dense_max_cols: 2000,
            memory_budget: None,
            deadline: None,
        }
    }
}

/// Rank and invariant factors of an integer matrix.
///
/// `torsion` holds the invariant factors greater than one in divisibility
/// order; the factors equal to one are only counted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ElementaryDivisors {
    rank: usize,
    ones: usize,
    torsion: Vec<BigUint>,
}

impl ElementaryDivisors {
    /// Builds from a full list of nonzero invariant factors, checking the
    /// divisibility chain.
    pub fn from_chain(divisors: Vec<BigUint>) -> Result<Self> {
        for w in divisors.windows(2) {
            if w[0].is_zero() || !(&w[1] % &w[0]).is_zero() {
                return Err(ExactLaError::DimensionMismatch(format!(
                    "{} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        if divisors.iter().any(|d| d.is_zero()) {
            return Err(ExactLaError::DimensionMismatch("zero invariant factor".into()));
        }
        let ones = divisors.iter().take_while(|d| d.is_one()).count();
        Ok(ElementaryDivisors {
            rank: divisors.len(),
            ones,
            torsion: divisors[ones..].to_vec(),
        })
    }

    /// Normalizes an arbitrary list of nonzero diagonal entries into the
    /// divisibility chain.
    pub fn from_diagonal(diag: Vec<BigUint>) -> Self {
        let mut d: Vec<BigUint> = diag.into_iter().filter(|x| !x.is_zero()).collect();
        let n = d.len();
        for i in 0..n {
            for j in i + 1..n {
                if (&d[j] % &d[i]).is_zero() {
                    continue;
                }
                let g = d[i].gcd(&d[j]);
                let l = &d[i] / &g * &d[j];
                d[i] = g;
                d[j] = l;
            }
        }
        let ones = d.iter().take_while(|x| x.is_one()).count();
        ElementaryDivisors {
            rank: n,
            ones,
            torsion: d[ones..].to_vec(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn unit_count(&self) -> usize {
        self.ones
    }

    pub fn torsion(&self) -> &[BigUint] {
        &self.torsion
    }

    pub fn divisors(&self) -> Vec<BigUint> {
        let mut v = vec![BigUint::one(); self.ones];
        v.extend(self.torsion.iter().cloned());
        v
    }

    pub fn torsion_order(&self) -> BigUint {
        self.torsion.iter().fold(BigUint::one(), |a, b| a * b)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Number of invariant factors not divisible by `p`, i.e. the rank of the
    /// matrix over `F_p`.
    pub fn rank_mod(&self, p: u64) -> usize {
        let p = BigUint::from(p);
        self.ones + self.torsion.iter().filter(|d| !(*d % &p).is_zero()).count()
    }
}

pub fn smith_normal_form(m: &SparseIntMatrix) -> ElementaryDivisors {
    smith_normal_form_with(m, &SnfOptions::default()).expect("no budgets configured")
}

pub fn smith_normal_form_with(m: &SparseIntMatrix, opts: &SnfOptions) -> Result<ElementaryDivisors> {
    let rows = m.row_lists();
    let dense_now = |nnz: usize, ar: usize, ac: usize| {
        ar > 0 && ac <= opts.dense_max_cols && (nnz as f64) >= opts.dense_density * (ar as f64) * (ac as f64)
    };
    let deadline_err = |pivots: usize, ar: usize, ac: usize| ExactLaError::TimeBudget {
        pivots,
        rows: ar,
        cols: ac,
    };

    let (pivots, core) = match elim::narrow(&rows) {
        Some(small) => {
            let mut e = Eliminator::new(SmallInt, m.cols(), small);
            match e.run(opts.deadline, |e| dense_now(e.nnz(), e.active_rows(), e.active_cols())) {
                Ok(_) => (e.pivots, to_big_core(e.into_core())),
                Err(Interrupt::Deadline) => {
                    return Err(deadline_err(e.pivots, e.active_rows(), e.active_cols()))
                }
                Err(Interrupt::Overflow) => {
                    let mut e = e.widen();
                    run_big(&mut e, opts, &dense_now)
                        .map_err(|_| deadline_err(e.pivots, e.active_rows(), e.active_cols()))?;
                    (e.pivots, e.into_core())
                }
            }
        }
        None => {
            let big = rows
                .into_iter()
                .map(|r| r.into_iter().map(|(c, v)| (c as u32, v)).collect())
                .collect();
            let mut e = Eliminator::new(BigIntArith, m.cols(), big);
            run_big(&mut e, opts, &dense_now)
                .map_err(|_| deadline_err(e.pivots, e.active_rows(), e.active_cols()))?;
            (e.pivots, e.into_core())
        }
    };

    let core_rows = core.rows.len();
    let core_cols = core.cols;
    if let Some(budget) = opts.memory_budget {
        let needed = core_rows
            .saturating_mul(core_cols)
            .saturating_mul(std::mem::size_of::<BigInt>());
        if needed > budget {
            return Err(ExactLaError::MemoryBudget {
                rows: core_rows,
                cols: core_cols,
                needed,
                budget,
            });
        }
    }
    let mut dense = vec![vec![BigInt::zero(); core_cols]; core_rows];
    for (i, row) in core.rows.into_iter().enumerate() {
        for (c, v) in row {
            dense[i][c as usize] = v;
        }
    }
    let diag = dense_smith(dense, core_cols, opts.deadline).map_err(|_| ExactLaError::TimeBudget {
        pivots,
        rows: core_rows,
        cols: core_cols,
    })?;
    let mut all = vec![BigUint::one(); pivots];
    all.extend(diag);
    Ok(ElementaryDivisors::from_diagonal(all))
}

fn run_big(
    e: &mut Eliminator<BigIntArith>,
    opts: &SnfOptions,
    dense_now: &dyn Fn(usize, usize, usize) -> bool,
) -> std::result::Result<(), Interrupt> {
    e.run(opts.deadline, |e| dense_now(e.nnz(), e.active_rows(), e.active_cols()))
        .map(|_| ())
}

fn to_big_core(core: elim::Core<i64>) -> elim::Core<BigInt> {
    elim::Core {
        rows: core
            .rows
            .into_iter()
            .map(|r| r.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect())
            .collect(),
        cols: core.cols,
    }
}

/// Diagonalizes a dense matrix by unimodular row and column operations and
/// returns the absolute values of the nonzero diagonal (not yet a chain).
pub(crate) fn dense_smith(
    mut a: Vec<Vec<BigInt>>,
    n: usize,
    deadline: Option<Instant>,
) -> std::result::Result<Vec<BigUint>, Interrupt> {
    let m = a.len();
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        if let Some(d) = deadline {
            if Instant::now() > d {
                return Err(Interrupt::Deadline);
            }
        }
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if v.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                    if v.abs().is_one() {
                        break;
                    }
                }
            }
            if best.is_some_and(|(bi, bj)| a[bi][bj].abs().is_one()) {
                break;
            }
        }
        let Some((pi, pj)) = best else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut().skip(t) {
            row.swap(t, pj);
        }
        loop {
            if a[t][t].is_negative() {
                for v in a[t].iter_mut().skip(t) {
                    *v = -std::mem::take(v);
                }
            }
            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&p);
                if !q.is_zero() {
                    let (top, bottom) = a.split_at_mut(i);
                    let pivot_row = &top[t];
                    for (x, y) in bottom[0].iter_mut().zip(pivot_row.iter()).skip(t) {
                        if !y.is_zero() {
                            *x -= &q * y;
                        }
                    }
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            if clean {
                // column t is zero below the pivot, so column operations only touch row t
                for j in t + 1..n {
                    if a[t][j].is_zero() {
                        continue;
                    }
                    let r = a[t][j].mod_floor(&p);
                    if !r.is_zero() {
                        clean = false;
                    }
                    a[t][j] = r;
                }
            }
            if clean {
                break;
            }
            // move the smallest remainder in row t or column t into the pivot
            let mut bi = t;
            let mut bj = t;
            let mut bv = p.abs();
            for i in t + 1..m {
                let v = a[i][t].abs();
                if !v.is_zero() && v < bv {
                    bv = v;
                    bi = i;
                    bj = t;
                }
            }
            for j in t + 1..n {
                let v = a[t][j].abs();
                if !v.is_zero() && v < bv {
                    bv = v;
                    bi = t;
                    bj = j;
                }
            }
            a.swap(t, bi);
            for row in a.iter_mut().skip(t) {
                row.swap(t, bj);
            }
        }
        diag.push(a[t][t].magnitude().clone());
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(m: &SparseIntMatrix) -> (usize, Vec<u64>) {
        let e = smith_normal_form(m);
        (
            e.rank(),
            e.divisors().iter().map(|d| d.to_u64_digits().first().copied().unwrap_or(0)).collect(),
        )
    }

    #[test]
    fn two_by_two_example() {
        let m = SparseIntMatrix::from_dense(&[[2, 4], [6, 8]]);
        assert_eq!(chain(&m), (2, vec![2, 4]));
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(chain(&SparseIntMatrix::identity(4)), (4, vec![1, 1, 1, 1]));
        let z = SparseIntMatrix::zeros(3, 5);
        let e = smith_normal_form(&z);
        assert_eq!(e.rank(), 0);
        assert!(e.divisors().is_empty());
    }

    #[test]
    fn diagonal_is_normalized_to_chain() {
        let m = SparseIntMatrix::from_dense(&[[4, 0, 0], [0, 6, 0], [0, 0, 1]]);
        assert_eq!(chain(&m), (3, vec![1, 2, 12]));
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 3;
        let m = SparseIntMatrix::from_dense(&[[1, big, big], [big, 1, big], [big, big, 1]]);
        let e = smith_normal_form(&m);
        assert_eq!(e.rank(), 3);
        // determinant magnitude equals the product of invariant factors
        let dense = m.to_dense();
        let det = &dense[0][0] * (&dense[1][1] * &dense[2][2] - &dense[1][2] * &dense[2][1])
            - &dense[0][1] * (&dense[1][0] * &dense[2][2] - &dense[1][2] * &dense[2][0])
            + &dense[0][2] * (&dense[1][0] * &dense[2][1] - &dense[1][1] * &dense[2][0]);
        assert_eq!(&e.torsion_order(), det.magnitude());
    }

    #[test]
    fn dense_endgame_engages_for_tiny_threshold() {
        let m = SparseIntMatrix::from_dense(&[[1, 2, 3], [4, 5, 6], [7, 8, 10]]);
        let opts = SnfOptions {
            dense_density: 0.0,
            dense_max_cols: usize::MAX,
            ..Default::default()
        };
        let a = smith_normal_form_with(&m, &opts).unwrap();
        assert_eq!(a, smith_normal_form(&m));
        assert_eq!(a.torsion_order(), BigUint::from(3u32));
    }

    #[test]
    fn memory_budget_names_core() {
        let m = SparseIntMatrix::from_dense(&[[2, 4], [6, 8]]);
        let opts = SnfOptions {
            memory_budget: Some(1),
            ..Default::default()
        };
        match smith_normal_form_with(&m, &opts) {
            Err(ExactLaError::MemoryBudget { rows: 2, cols: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chain_constructor_rejects_bad_chain() {
        assert!(ElementaryDivisors::from_chain(vec![2u32.into(), 3u32.into()]).is_err());
        let e = ElementaryDivisors::from_chain(vec![1u32.into(), 2u32.into(), 6u32.into()]).unwrap();
        assert_eq!(e.rank_mod(2), 1);
        assert_eq!(e.rank_mod(3), 2);
        assert_eq!(e.rank_mod(5), 3);
    }
}
