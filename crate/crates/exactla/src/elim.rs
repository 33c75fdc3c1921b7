//! Sparse Gaussian elimination on unit pivots.
//!
//! The same engine drives rank computations over `F_p` (every nonzero value is
//! a unit) and the integer pre-elimination that precedes a dense Smith normal
//! form (only `±1` are units). Pivots are chosen by a Markowitz score
//! `(row_len - 1) * (col_len - 1)`; singleton columns go first.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficient arithmetic for the eliminator.
pub(crate) trait Arith {
    type V: Clone + std::fmt::Debug;

    fn is_zero(&self, v: &Self::V) -> bool;
    fn is_unit(&self, v: &Self::V) -> bool;
    /// `a * u^{-1}` for a unit `u`.
    fn div_unit(&self, a: &Self::V, u: &Self::V) -> Self::V;
    /// `x - f * y`, `None` on overflow.
    fn sub_mul(&self, x: &Self::V, f: &Self::V, y: &Self::V) -> Option<Self::V>;
    /// `-f * y`, `None` on overflow.
    fn neg_mul(&self, f: &Self::V, y: &Self::V) -> Option<Self::V>;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp(pub u64);

impl Fp {
    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    pub(crate) fn inv(&self, a: u64) -> u64 {
        // Fermat; p is prime
        let mut base = a % self.0;
        let mut e = self.0 - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

impl Arith for Fp {
    type V = u64;

    fn is_zero(&self, v: &u64) -> bool {
        *v == 0
    }

    fn is_unit(&self, v: &u64) -> bool {
        *v != 0
    }

    fn div_unit(&self, a: &u64, u: &u64) -> u64 {
        self.mul(*a, self.inv(*u))
    }

    fn sub_mul(&self, x: &u64, f: &u64, y: &u64) -> Option<u64> {
        let fy = self.mul(*f, *y);
        Some(if *x >= fy { x - fy } else { x + self.0 - fy })
    }

    fn neg_mul(&self, f: &u64, y: &u64) -> Option<u64> {
        let fy = self.mul(*f, *y);
        Some(if fy == 0 { 0 } else { self.0 - fy })
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SmallInt;

impl Arith for SmallInt {
    type V = i64;

    fn is_zero(&self, v: &i64) -> bool {
        *v == 0
    }

    fn is_unit(&self, v: &i64) -> bool {
        *v == 1 || *v == -1
    }

    fn div_unit(&self, a: &i64, u: &i64) -> i64 {
        a * u
    }

    fn sub_mul(&self, x: &i64, f: &i64, y: &i64) -> Option<i64> {
        f.checked_mul(*y).and_then(|fy| x.checked_sub(fy))
    }

    fn neg_mul(&self, f: &i64, y: &i64) -> Option<i64> {
        f.checked_mul(*y).and_then(|fy| fy.checked_neg())
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct BigIntArith;

impl Arith for BigIntArith {
    type V = BigInt;

    fn is_zero(&self, v: &BigInt) -> bool {
        v.is_zero()
    }

    fn is_unit(&self, v: &BigInt) -> bool {
        v.abs().is_one()
    }

    fn div_unit(&self, a: &BigInt, u: &BigInt) -> BigInt {
        a * u
    }

    fn sub_mul(&self, x: &BigInt, f: &BigInt, y: &BigInt) -> Option<BigInt> {
        Some(x - f * y)
    }

    fn neg_mul(&self, f: &BigInt, y: &BigInt) -> Option<BigInt> {
        Some(-(f * y))
    }
}

#[derive(Debug)]
pub(crate) enum Interrupt {
    Overflow,
    Deadline,
}

/// Why the elimination loop stopped without interruption.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    /// No unit pivot is left.
    NoUnitPivot,
    /// The caller's dense-switch predicate fired.
    Dense,
}

pub(crate) struct Eliminator<A: Arith> {
    pub(crate) arith: A,
    rows: Vec<Vec<(u32, A::V)>>,
    col_rows: Vec<Vec<u32>>,
    col_count: Vec<u32>,
    unit_rows: BTreeSet<(u32, u32)>,
    singletons: BTreeSet<u32>,
    row_has_unit: Vec<bool>,
    pub(crate) pivots: usize,
    nnz: usize,
    active_rows: usize,
    active_cols: usize,
    search_rows: usize,
}

pub(crate) struct Core<V> {
    pub rows: Vec<Vec<(u32, V)>>,
    pub cols: usize,
}

impl<A: Arith> Eliminator<A> {
    pub(crate) fn new(arith: A, ncols: usize, rows: Vec<Vec<(u32, A::V)>>) -> Self {
        let mut col_rows = vec![Vec::new(); ncols];
        let mut col_count = vec![0u32; ncols];
        let mut nnz = 0;
        let mut active_rows = 0;
        for (i, row) in rows.iter().enumerate() {
            if !row.is_empty() {
                active_rows += 1;
            }
            for (c, _) in row {
                col_rows[*c as usize].push(i as u32);
                col_count[*c as usize] += 1;
                nnz += 1;
            }
        }
        let active_cols = col_count.iter().filter(|&&c| c > 0).count();
        let mut e = Eliminator {
            arith,
            row_has_unit: vec![false; rows.len()],
            rows,
            col_rows,
            col_count,
            unit_rows: BTreeSet::new(),
            singletons: BTreeSet::new(),
            pivots: 0,
            nnz,
            active_rows,
            active_cols,
            search_rows: 4,
        };
        for i in 0..e.rows.len() {
            e.index_row(i);
        }
        for (c, &n) in e.col_count.iter().enumerate() {
            if n == 1 {
                e.singletons.insert(c as u32);
            }
        }
        e
    }

    pub(crate) fn active_rows(&self) -> usize {
        self.active_rows
    }

    pub(crate) fn active_cols(&self) -> usize {
        self.active_cols
    }

    pub(crate) fn nnz(&self) -> usize {
        self.nnz
    }

    fn index_row(&mut self, i: usize) {
        let has_unit = self.rows[i].iter().any(|(_, v)| self.arith.is_unit(v));
        self.row_has_unit[i] = has_unit;
        if has_unit {
            self.unit_rows.insert((self.rows[i].len() as u32, i as u32));
        }
    }

    fn unindex_row(&mut self, i: usize) {
        if self.row_has_unit[i] {
            self.unit_rows.remove(&(self.rows[i].len() as u32, i as u32));
            self.row_has_unit[i] = false;
        }
    }

    fn bump_col(&mut self, c: u32, up: bool) {
        let n = &mut self.col_count[c as usize];
        let before = *n;
        if up {
            *n += 1;
        } else {
            *n -= 1;
        }
        let after = *n;
        if before == 1 {
            self.singletons.remove(&c);
        }
        if after == 1 {
            self.singletons.insert(c);
        }
        if before == 0 && after > 0 {
            self.active_cols += 1;
        }
        if before > 0 && after == 0 {
            self.active_cols -= 1;
        }
    }

    fn entry(&self, row: usize, col: u32) -> Option<&A::V> {
        let r = &self.rows[row];
        r.binary_search_by_key(&col, |e| e.0).ok().map(|k| &r[k].1)
    }

    /// Picks the next pivot `(row, col)`.
    fn choose_pivot(&self) -> Option<(usize, u32)> {
        // bounded scan: singleton columns holding non-units can pile up
        for &c in self.singletons.iter().take(64) {
            let Some(row) = self.col_rows[c as usize]
                .iter()
                .copied()
                .find(|&r| self.entry(r as usize, c).is_some())
            else {
                continue;
            };
            if let Some(v) = self.entry(row as usize, c) {
                if self.arith.is_unit(v) {
                    return Some((row as usize, c));
                }
            }
        }
        let mut best: Option<(u64, usize, u32)> = None;
        for (seen, &(len, row)) in self.unit_rows.iter().enumerate() {
            if seen >= self.search_rows && best.is_some() {
                break;
            }
            let row = row as usize;
            for (c, v) in &self.rows[row] {
                if !self.arith.is_unit(v) {
                    continue;
                }
                let score = (len as u64 - 1) * (self.col_count[*c as usize] as u64 - 1);
                let cand = (score, row, *c);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
            if best.is_some_and(|b| b.0 == 0) {
                break;
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    /// Eliminates on `(pr, pc)`. On overflow the pivot row is restored and the
    /// matrix stays equivalent to the input (rows already updated are valid
    /// row operations).
    fn pivot(&mut self, pr: usize, pc: u32) -> Result<(), Interrupt> {
        let pivot_row = std::mem::take(&mut self.rows[pr]);
        let pv = match pivot_row.binary_search_by_key(&pc, |e| e.0) {
            Ok(k) => pivot_row[k].1.clone(),
            Err(_) => unreachable!("pivot entry vanished"),
        };
        let mut targets: Vec<u32> = std::mem::take(&mut self.col_rows[pc as usize]);
        targets.sort_unstable();
        targets.dedup();
        for &t in &targets {
            let t = t as usize;
            if t == pr {
                continue;
            }
            let Some(a) = self.entry(t, pc).cloned() else {
                continue;
            };
            let f = self.arith.div_unit(&a, &pv);
            let merged = match self.merge(t, &f, &pivot_row, pc) {
                Some(m) => m,
                None => {
                    self.rows[pr] = pivot_row;
                    self.col_rows[pc as usize] = targets;
                    return Err(Interrupt::Overflow);
                }
            };
            self.commit_row(t, merged);
        }
        // drop the pivot row and the pivot column
        if self.row_has_unit[pr] {
            self.unit_rows.remove(&(pivot_row.len() as u32, pr as u32));
            self.row_has_unit[pr] = false;
        }
        for (c, _) in &pivot_row {
            self.bump_col(*c, false);
        }
        self.nnz -= pivot_row.len();
        self.active_rows -= 1;
        self.pivots += 1;
        Ok(())
    }

    /// Computes `row_t - f * pivot_row` with the pivot column removed.
    fn merge(&self, t: usize, f: &A::V, pivot_row: &[(u32, A::V)], pc: u32) -> Option<Vec<(u32, A::V)>> {
        let row = &self.rows[t];
        let mut out = Vec::with_capacity(row.len() + pivot_row.len());
        let (mut i, mut j) = (0, 0);
        while i < row.len() || j < pivot_row.len() {
            let ci = row.get(i).map(|e| e.0).unwrap_or(u32::MAX);
            let cj = pivot_row.get(j).map(|e| e.0).unwrap_or(u32::MAX);
            if ci < cj {
                out.push(row[i].clone());
                i += 1;
            } else if cj < ci {
                if cj != pc {
                    let v = self.arith.neg_mul(f, &pivot_row[j].1)?;
                    if !self.arith.is_zero(&v) {
                        out.push((cj, v));
                    }
                }
                j += 1;
            } else {
                if ci != pc {
                    let v = self.arith.sub_mul(&row[i].1, f, &pivot_row[j].1)?;
                    if !self.arith.is_zero(&v) {
                        out.push((ci, v));
                    }
                }
                i += 1;
                j += 1;
            }
        }
        Some(out)
    }

    fn commit_row(&mut self, t: usize, merged: Vec<(u32, A::V)>) {
        self.unindex_row(t);
        let old = std::mem::replace(&mut self.rows[t], merged);
        // column bookkeeping from the symmetric difference of supports
        let new = &self.rows[t];
        let (mut i, mut j) = (0, 0);
        let mut added = Vec::new();
        let mut removed = Vec::new();
        while i < old.len() || j < new.len() {
            let ci = old.get(i).map(|e| e.0).unwrap_or(u32::MAX);
            let cj = new.get(j).map(|e| e.0).unwrap_or(u32::MAX);
            if ci < cj {
                removed.push(ci);
                i += 1;
            } else if cj < ci {
                added.push(cj);
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        self.nnz = self.nnz + added.len() - removed.len();
        if old.is_empty() && !self.rows[t].is_empty() {
            self.active_rows += 1;
        }
        if !old.is_empty() && self.rows[t].is_empty() {
            self.active_rows -= 1;
        }
        for c in removed {
            self.bump_col(c, false);
        }
        for c in added {
            self.col_rows[c as usize].push(t as u32);
            self.bump_col(c, true);
        }
        self.index_row(t);
    }

    /// Runs elimination until no unit pivot remains or `dense_now` fires.
    pub(crate) fn run(
        &mut self,
        deadline: Option<Instant>,
        mut dense_now: impl FnMut(&Self) -> bool,
    ) -> Result<Stop, Interrupt> {
        loop {
            if dense_now(self) {
                return Ok(Stop::Dense);
            }
            if self.pivots % 256 == 0 {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        return Err(Interrupt::Deadline);
                    }
                }
            }
            let Some((r, c)) = self.choose_pivot() else {
                return Ok(Stop::NoUnitPivot);
            };
            self.pivot(r, c)?;
        }
    }

    pub(crate) fn into_core(self) -> Core<A::V> {
        let mut col_map = vec![u32::MAX; self.col_count.len()];
        let mut next = 0u32;
        for (c, &n) in self.col_count.iter().enumerate() {
            if n > 0 {
                col_map[c] = next;
                next += 1;
            }
        }
        let rows = self
            .rows
            .into_iter()
            .filter(|r| !r.is_empty())
            .map(|r| r.into_iter().map(|(c, v)| (col_map[c as usize], v)).collect())
            .collect();
        Core {
            rows,
            cols: next as usize,
        }
    }

}

impl Eliminator<SmallInt> {
    /// Switches to arbitrary precision, keeping pivot count and state.
    pub(crate) fn widen(self) -> Eliminator<BigIntArith> {
        let ncols = self.col_count.len();
        let pivots = self.pivots;
        let rows = self
            .rows
            .into_iter()
            .map(|r| r.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect())
            .collect();
        let mut e = Eliminator::new(BigIntArith, ncols, rows);
        e.pivots = pivots;
        e
    }
}

/// Converts BigInt rows into `i64` rows when every value fits.
pub(crate) fn narrow(rows: &[Vec<(usize, BigInt)>]) -> Option<Vec<Vec<(u32, i64)>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|(c, v)| v.to_i64().map(|x| (*c as u32, x)))
                .collect::<Option<Vec<_>>>()
        })
        .collect()
}
