//! Sparse integer matrices and the sparse triple text format.
//!
//! The text format is line oriented:
//!
//! ```text
//! %%sparse-int-matrix v1
//! % key=value
//! <rows> <cols> <nnz>
//! <row> <col> <value>
//! ```
//!
//! Indices are zero based and values are decimal integers of arbitrary size.
//! Lines starting with `%` after the magic line carry metadata.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{ExactLaError, Result};

pub const TRIPLE_MAGIC: &str = "%%sparse-int-matrix v1";

/// An exact sparse integer matrix.
///
/// Entries are kept sorted by `(row, col)`, never contain an explicit zero and
/// hold at most one value per position.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, BigInt)>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseIntMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, BigInt::one())).collect(),
        }
    }

    /// Builds a matrix from explicit triples. Zero values are dropped; a
    /// repeated position is an error.
    pub fn from_triplets<I, V>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, V)>,
        V: Into<BigInt>,
    {
        let mut entries = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(ExactLaError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            let v = v.into();
            if !v.is_zero() {
                entries.push((r, c, v));
            }
        }
        entries.sort_by_key(|a| (a.0, a.1));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(ExactLaError::DuplicateEntry {
                    row: w[0].0,
                    col: w[0].1,
                });
            }
        }
        Ok(SparseIntMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from triples, summing values that share a position.
    pub fn from_summed_triplets<I, V>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, V)>,
        V: Into<BigInt>,
    {
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(ExactLaError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            *acc.entry((r, c)).or_default() += v.into();
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(SparseIntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_dense<R: AsRef<[i64]>>(data: &[R]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::new();
        for (i, row) in data.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    entries.push((i, j, BigInt::from(v)));
                }
            }
        }
        SparseIntMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, usize, BigInt)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> BigInt {
        match self
            .entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(row, col)))
        {
            Ok(i) => self.entries[i].2.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|(r, c, v)| (*c, *r, v.clone()))
            .collect();
        entries.sort_by_key(|a| (a.0, a.1));
        SparseIntMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    /// Entries grouped by row, each row sorted by column.
    pub fn row_lists(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            out[*r].push((*c, v.clone()));
        }
        out
    }

    /// Entries grouped by column, each column sorted by row.
    pub fn col_lists(&self) -> Vec<Vec<(usize, BigInt)>> {
        let mut out = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            out[*c].push((*r, v.clone()));
        }
        out
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries
            .iter()
            .map(|e| e.2.abs())
            .max()
            .unwrap_or_default()
    }

    /// Product `self * other`.
    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != other.rows {
            return Err(ExactLaError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let other_rows = other.row_lists();
        let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
        let mut entries = Vec::new();
        let mut i = 0;
        while i < self.entries.len() {
            let r = self.entries[i].0;
            acc.clear();
            while i < self.entries.len() && self.entries[i].0 == r {
                let (_, k, a) = &self.entries[i];
                for (c, b) in &other_rows[*k] {
                    *acc.entry(*c).or_default() += a * b;
                }
                i += 1;
            }
            for (c, v) in std::mem::take(&mut acc) {
                if !v.is_zero() {
                    entries.push((r, c, v));
                }
            }
        }
        Ok(SparseIntMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// Relabels rows and columns: entry `(r, c)` moves to
    /// `(row_perm[r], col_perm[c])`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> SparseIntMatrix {
        assert_eq!(row_perm.len(), self.rows);
        assert_eq!(col_perm.len(), self.cols);
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|(r, c, v)| (row_perm[*r], col_perm[*c], v.clone()))
            .collect();
        entries.sort_by_key(|a| (a.0, a.1));
        SparseIntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn write_triples<W: Write>(&self, mut w: W, metadata: &[(&str, String)]) -> Result<()> {
        writeln!(w, "{TRIPLE_MAGIC}")?;
        for (k, v) in metadata {
            writeln!(w, "% {k}={v}")?;
        }
        writeln!(w, "{} {} {}", self.rows, self.cols, self.entries.len())?;
        let mut line = String::new();
        for (r, c, v) in &self.entries {
            line.clear();
            let _ = writeln!(line, "{r} {c} {v}");
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Parses the triple format, returning the matrix and its metadata.
    pub fn read_triples<R: BufRead>(r: R) -> Result<(SparseIntMatrix, Vec<(String, String)>)> {
        let mut lines = r.lines().enumerate();
        let parse_err = |line: usize, msg: &str| ExactLaError::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (_, magic) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
        if magic?.trim() != TRIPLE_MAGIC {
            return Err(parse_err(0, "missing sparse-int-matrix header"));
        }
        let mut metadata = Vec::new();
        let mut dims = None;
        for (no, line) in lines.by_ref() {
            let line = line?;
            let t = line.trim();
            if let Some(meta) = t.strip_prefix('%') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    metadata.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if t.is_empty() {
                continue;
            }
            let parts: Vec<usize> = t
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| parse_err(no, "bad dimension line"))?;
            if parts.len() != 3 {
                return Err(parse_err(no, "dimension line needs rows cols nnz"));
            }
            dims = Some((parts[0], parts[1], parts[2]));
            break;
        }
        let (rows, cols, nnz) = dims.ok_or_else(|| parse_err(0, "missing dimension line"))?;
        let mut triplets = Vec::with_capacity(nnz);
        for (no, line) in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let mut it = t.split_whitespace();
            let (Some(a), Some(b), Some(c), None) = (it.next(), it.next(), it.next(), it.next())
            else {
                return Err(parse_err(no, "entry line needs row col value"));
            };
            let row = a.parse::<usize>().map_err(|_| parse_err(no, "bad row"))?;
            let col = b.parse::<usize>().map_err(|_| parse_err(no, "bad column"))?;
            let val = c
                .parse::<BigInt>()
                .map_err(|_| parse_err(no, "bad value"))?;
            triplets.push((row, col, val));
        }
        if triplets.len() != nnz {
            return Err(parse_err(
                0,
                &format!("header announces {nnz} entries, found {}", triplets.len()),
            ));
        }
        let m = SparseIntMatrix::from_triplets(rows, cols, triplets)?;
        Ok((m, metadata))
    }
}

/// Returns `true` when every entry is `0` or `±1`.
pub fn is_unimodular_pattern(m: &SparseIntMatrix) -> bool {
    m.entries().iter().all(|e| e.2.abs().is_one())
}
