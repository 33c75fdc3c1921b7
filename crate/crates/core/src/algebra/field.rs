use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly;
use crate::error::{CoreError, Result};
use crate::linalg::{self, Rat};

/// Coordinates of an algebraic integer in the integral basis.
pub type Elt = Vec<i64>;

/// Counts of real roots and complex-conjugate root pairs of a monic,
/// irreducible integer polynomial.
pub fn signature(poly: &[i64]) -> Result<(usize, usize)> {
    if poly.len() < 2 || *poly.last().unwrap() != 1 {
        return Err(CoreError::InvalidInput("defining polynomial must be monic of degree >= 1".into()));
    }
    if !poly::is_irreducible(poly) {
        return Err(CoreError::InvalidInput(format!("polynomial {poly:?} is reducible over Q")));
    }
    let roots = poly::complex_roots(poly);
    let real = roots.iter().filter(|z| z.im.abs() < 1e-9).count();
    Ok((real, (roots.len() - real) / 2))
}

#[derive(Clone, Debug)]
pub struct NumberField {
    pub label: String,
    pub poly: Vec<i64>,
    pub degree: usize,
    pub r: usize,
    pub s: usize,
    pub discriminant: i64,
    pub integral_basis: Vec<Vec<i64>>,
    pub fundamental_units: Vec<Elt>,
    pub roots_of_unity_order: u32,
    pub class_number: u32,
    /// Image of each basis element under an automorphism inducing complex
    /// conjugation at every complex place; `None` when there is none.
    pub conjugation: Option<Vec<Elt>>,
    /// `r` real roots in increasing order, then one root per complex pair
    /// (positive imaginary part).
    pub embeddings: Vec<Complex64>,
    /// Raw catalog record, hashed by cache files.
    pub record: String,
    mul_table: Vec<Vec<Elt>>,
    roots_of_unity: Vec<Elt>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn parse_ints(s: &str, line: usize) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim().parse::<i64>().map_err(|e| CoreError::Catalog {
                line,
                msg: format!("bad integer `{t}`: {e}"),
            })
        })
        .collect()
}

fn parse_rows(s: &str, line: usize) -> Result<Vec<Vec<i64>>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split('|').map(|r| parse_ints(r, line)).collect()
}

impl NumberField {
    /// Parse and validate one catalog record.
    pub fn from_record(record: &str, line: usize) -> Result<Self> {
        let err = |msg: String| CoreError::Catalog { line, msg };
        let mut fields = std::collections::BTreeMap::new();
        for part in record.split(';') {
            let Some((k, v)) = part.split_once('=') else {
                return Err(err(format!("malformed field `{part}`")));
            };
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| fields.get(k).cloned().ok_or_else(|| err(format!("missing `{k}`")));
        let num = |k: &str| -> Result<i64> {
            get(k)?.parse::<i64>().map_err(|e| err(format!("bad `{k}`: {e}")))
        };
        let label = get("label")?;
        let poly = parse_ints(&get("poly")?, line)?;
        let (r, s) = signature(&poly).map_err(|e| err(e.to_string()))?;
        let degree = poly.len() - 1;
        if num("r")? as usize != r || num("s")? as usize != s {
            return Err(err(format!("signature mismatch: roots give ({r}, {s})")));
        }
        let discriminant = num("disc")?;
        let basis = parse_rows(&get("basis")?, line)?;
        let identity: Vec<Vec<i64>> = (0..degree).map(|i| (0..degree).map(|j| i64::from(i == j)).collect()).collect();
        if basis != identity {
            return Err(err("only power integral bases are supported".into()));
        }
        if poly::discriminant(&poly) != BigInt::from(discriminant) {
            return Err(err(format!(
                "discriminant of the basis is {}, catalog says {discriminant}",
                poly::discriminant(&poly)
            )));
        }
        let units = parse_rows(&get("units")?, line)?;
        let conj_rows = parse_rows(&get("conj")?, line)?;
        let torsion = num("torsion")? as u32;
        let class_number = num("class_number")? as u32;

        let mut roots = poly::complex_roots(&poly);
        let mut real: Vec<Complex64> = roots.iter().filter(|z| z.im.abs() < 1e-9).map(|z| Complex64::new(z.re, 0.0)).collect();
        real.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        roots.retain(|z| z.im > 1e-9);
        roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        real.extend(roots);

        let mul_table = power_basis_table(&poly);
        let mut field = NumberField {
            label,
            poly,
            degree,
            r,
            s,
            discriminant,
            integral_basis: basis,
            fundamental_units: units,
            roots_of_unity_order: torsion,
            class_number,
            conjugation: if conj_rows.is_empty() { None } else { Some(conj_rows) },
            embeddings: real,
            record: record.trim().to_string(),
            mul_table,
            roots_of_unity: Vec::new(),
        };
        field.validate(line)?;
        field.roots_of_unity = field.find_roots_of_unity().ok_or_else(|| err("roots of unity not found".into()))?;
        Ok(field)
    }

    fn validate(&self, line: usize) -> Result<()> {
        let err = |msg: String| CoreError::Catalog { line, msg };
        if self.degree != self.r + 2 * self.s {
            return Err(err("degree != r + 2s".into()));
        }
        if self.fundamental_units.len() != self.r + self.s - 1 {
            return Err(err(format!("unit rank must be {}", self.r + self.s - 1)));
        }
        for u in &self.fundamental_units {
            if u.len() != self.degree || self.norm(u).abs() != BigInt::one() {
                return Err(err(format!("{u:?} is not a unit")));
            }
        }
        if let Some(c) = &self.conjugation {
            if c.len() != self.degree || c.iter().any(|r| r.len() != self.degree) {
                return Err(err("conjugation matrix has wrong shape".into()));
            }
            // must be a ring map, an involution and complex conjugation at every place
            for i in 0..self.degree {
                for j in 0..self.degree {
                    let lhs = self.conj(&self.mul(&unit_vec(self.degree, i), &unit_vec(self.degree, j)));
                    let rhs = self.mul(&c[i], &c[j]);
                    if lhs != rhs {
                        return Err(err("conjugation is not multiplicative".into()));
                    }
                }
                if self.conj(&c[i]) != unit_vec(self.degree, i) {
                    return Err(err("conjugation is not an involution".into()));
                }
                for k in 0..self.r + self.s {
                    let a = self.embed(&unit_vec(self.degree, i), k).conj();
                    let b = self.embed(&c[i], k);
                    if (a - b).norm() > 1e-9 {
                        return Err(err("conjugation does not restrict to complex conjugation".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn find_roots_of_unity(&self) -> Option<Vec<Elt>> {
        let w = self.roots_of_unity_order as usize;
        let m = self.degree;
        let total = 5usize.pow(m as u32);
        let mut found: Vec<Elt> = Vec::new();
        for code in 0..total {
            let x: Elt = (0..m).map(|i| ((code / 5usize.pow(i as u32)) % 5) as i64 - 2).collect();
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            if (0..self.r + self.s).all(|k| (self.embed(&x, k).norm() - 1.0).abs() < 1e-9) {
                found.push(x);
            }
        }
        found.sort();
        (found.len() == w).then_some(found)
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    pub fn unit_rank(&self) -> usize {
        self.r + self.s - 1
    }

    pub fn zero(&self) -> Elt {
        vec![0; self.degree]
    }

    pub fn one(&self) -> Elt {
        unit_vec(self.degree, 0)
    }

    pub fn from_int(&self, a: i64) -> Elt {
        let mut v = self.zero();
        v[0] = a;
        v
    }

    /// All roots of unity in O, sorted by coordinates.
    pub fn roots_of_unity(&self) -> &[Elt] {
        &self.roots_of_unity
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Elt {
        a.iter().zip(b).map(|(x, y)| x.checked_add(*y).expect("coefficient overflow")).collect()
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Elt {
        a.iter().zip(b).map(|(x, y)| x.checked_sub(*y).expect("coefficient overflow")).collect()
    }

    pub fn neg(&self, a: &[i64]) -> Elt {
        a.iter().map(|x| -x).collect()
    }

    pub fn scale(&self, a: &[i64], k: i64) -> Elt {
        a.iter().map(|x| x.checked_mul(k).expect("coefficient overflow")).collect()
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Elt {
        let m = self.degree;
        let mut acc = vec![0i128; m];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let xy = x as i128 * y as i128;
                for (k, &t) in self.mul_table[i][j].iter().enumerate() {
                    acc[k] += xy * t as i128;
                }
            }
        }
        acc.into_iter().map(|v| i64::try_from(v).expect("coefficient overflow")).collect()
    }

    pub fn is_zero(&self, a: &[i64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Image under complex conjugation; panics when the field has none.
    pub fn conj(&self, a: &[i64]) -> Elt {
        let c = self.conjugation.as_ref().expect("field has no complex conjugation");
        let mut out = self.zero();
        for (i, &x) in a.iter().enumerate() {
            if x != 0 {
                for (k, &t) in c[i].iter().enumerate() {
                    out[k] += x * t;
                }
            }
        }
        out
    }

    /// Matrix `M` with `coords(a * y) = M coords(y)`.
    pub fn mult_matrix(&self, a: &[i64]) -> Vec<Vec<i64>> {
        let m = self.degree;
        let cols: Vec<Elt> = (0..m).map(|j| self.mul(a, &unit_vec(m, j))).collect();
        (0..m).map(|i| (0..m).map(|j| cols[j][i]).collect()).collect()
    }

    pub fn trace(&self, a: &[i64]) -> i64 {
        let mm = self.mult_matrix(a);
        (0..self.degree).map(|i| mm[i][i]).sum()
    }

    pub fn norm(&self, a: &[i64]) -> BigInt {
        let mm: Vec<Vec<BigInt>> = self.mult_matrix(a).into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        linalg::det(&mm)
    }

    pub fn is_unit(&self, a: &[i64]) -> bool {
        self.norm(a).abs().is_one()
    }

    /// Value of `a` at archimedean place `k` (0-based, real places first).
    pub fn embed(&self, a: &[i64], k: usize) -> Complex64 {
        let z = self.embeddings[k];
        let mut pw = Complex64::new(1.0, 0.0);
        let mut out = Complex64::new(0.0, 0.0);
        for &c in a {
            out += pw * c as f64;
            pw *= z;
        }
        out
    }

    /// Product in K with rational coordinates.
    pub fn mul_q(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let m = self.degree;
        let mut out = vec![Rat::zero(); m];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, &t) in self.mul_table[i][j].iter().enumerate() {
                    if t != 0 {
                        out[k] += &xy * Rat::from_integer(BigInt::from(t));
                    }
                }
            }
        }
        out
    }

    pub fn conj_q(&self, a: &[Rat]) -> Vec<Rat> {
        let c = self.conjugation.as_ref().expect("field has no complex conjugation");
        let mut out = vec![Rat::zero(); self.degree];
        for (i, x) in a.iter().enumerate() {
            for (k, &t) in c[i].iter().enumerate() {
                if t != 0 {
                    out[k] += x * Rat::from_integer(BigInt::from(t));
                }
            }
        }
        out
    }

    /// Inverse in K; `None` for zero.
    pub fn inv_q(&self, a: &[Rat]) -> Option<Vec<Rat>> {
        let m = self.degree;
        // solve M_a x = 1
        let cols: Vec<Vec<Rat>> = (0..m).map(|j| self.mul_q(a, &unit_vec_q(m, j))).collect();
        let mat: Vec<Vec<Rat>> = (0..m).map(|i| (0..m).map(|j| cols[j][i].clone()).collect()).collect();
        let inv = linalg::inverse(&mat)?;
        Some((0..m).map(|i| inv[i][0].clone()).collect())
    }

    pub fn trace_q(&self, a: &[Rat]) -> Rat {
        (0..self.degree).map(|j| self.mul_q(a, &unit_vec_q(self.degree, j))[j].clone()).sum()
    }

    pub fn norm_q(&self, a: &[Rat]) -> Rat {
        let m = self.degree;
        let cols: Vec<Vec<Rat>> = (0..m).map(|j| self.mul_q(a, &unit_vec_q(m, j))).collect();
        // determinant over Q by elimination
        let mut mat: Vec<Vec<Rat>> = (0..m).map(|i| (0..m).map(|j| cols[j][i].clone()).collect()).collect();
        let mut det = Rat::one();
        for c in 0..m {
            let Some(p) = (c..m).find(|&i| !mat[i][c].is_zero()) else { return Rat::zero() };
            if p != c {
                mat.swap(p, c);
                det = -det;
            }
            det *= mat[c][c].clone();
            for i in c + 1..m {
                let f = &mat[i][c] / &mat[c][c];
                for j in c..m {
                    let t = &mat[c][j] * &f;
                    mat[i][j] -= t;
                }
            }
        }
        det
    }

    pub fn to_q(&self, a: &[i64]) -> Vec<Rat> {
        a.iter().map(|&x| linalg::rat(x)).collect()
    }

    /// Integral coordinates when `a` lies in O.
    pub fn to_integral(&self, a: &[Rat]) -> Option<Elt> {
        a.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
    }
}

fn unit_vec(m: usize, i: usize) -> Elt {
    (0..m).map(|j| i64::from(i == j)).collect()
}

fn unit_vec_q(m: usize, i: usize) -> Vec<Rat> {
    (0..m).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()
}

/// `theta^i * theta^j` reduced modulo the defining polynomial.
fn power_basis_table(poly: &[i64]) -> Vec<Vec<Elt>> {
    let m = poly.len() - 1;
    let mut powers: Vec<Elt> = Vec::with_capacity(2 * m);
    for k in 0..2 * m - 1 {
        let mut v = vec![0i64; m];
        if k < m {
            v[k] = 1;
        } else {
            // theta^k = theta * theta^(k-1)
            let prev = &powers[k - 1];
            let top = prev[m - 1];
            for i in (1..m).rev() {
                v[i] = prev[i - 1];
            }
            v[0] = 0;
            for i in 0..m {
                v[i] -= top * poly[i];
            }
        }
        powers.push(v);
    }
    (0..m).map(|i| (0..m).map(|j| powers[i + j].clone()).collect()).collect()
}

static CATALOG: OnceLock<Vec<NumberField>> = OnceLock::new();

/// Catalog text shipped with the crate.
pub const CATALOG_TEXT: &str = include_str!("catalog.txt");

pub fn parse_catalog(text: &str) -> Result<Vec<NumberField>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| NumberField::from_record(l, i + 1))
        .collect()
}

pub fn catalog() -> &'static [NumberField] {
    CATALOG.get_or_init(|| parse_catalog(CATALOG_TEXT).expect("shipped catalog is valid"))
}

/// Look up a field by label. `Q(i)` is accepted for `Q(sqrt-1)`.
pub fn field(label: &str) -> Result<&'static NumberField> {
    let label = match label {
        "Q(i)" => "Q(sqrt-1)",
        "Z" => "Q",
        other => other,
    };
    catalog()
        .iter()
        .find(|f| f.label == label)
        .ok_or_else(|| CoreError::UnknownField(label.to_string()))
}
