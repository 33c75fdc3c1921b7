use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::field::{Elt, NumberField};
use crate::error::{CoreError, Result};
use crate::linalg::{self, Rat};

/// An element of O^n, flattened: block `i` holds the integral-basis
/// coordinates of the `i`-th entry.
pub type Vector = Vec<i64>;

/// An n x n matrix over O.
pub type OMat = Vec<Vec<Elt>>;

/// The rational vector space of Hermitian n x n matrices over K with a fixed
/// Q-basis, and for each basis matrix H the integer Gram matrix of
/// `x -> Tr_{K/Q}(x^* H x)` on O^n.
#[derive(Clone, Debug)]
pub struct FormSpace {
    pub field: &'static NumberField,
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    pub basis: Vec<OMat>,
    pub grams: Vec<Vec<Vec<i64>>>,
    plus_len: usize,
}

/// A point of the form space, stored by its coordinates and the combined
/// trace Gram matrix on O^n.
#[derive(Clone, Debug, PartialEq)]
pub struct FormPoint {
    pub coeffs: Vec<Rat>,
    pub gram: Vec<Vec<Rat>>,
}

fn unit_elt(m: usize, i: usize) -> Elt {
    let mut e = vec![0; m];
    e[i] = 1;
    e
}

impl FormSpace {
    pub fn new(field: &'static NumberField, n: usize) -> Result<Self> {
        if field.conjugation.is_none() {
            return Err(CoreError::FormSpaceNotRational(field.label.clone()));
        }
        if n == 0 {
            return Err(CoreError::InvalidInput("rank must be positive".into()));
        }
        let m = field.degree;
        // Q-basis of the fixed field of conjugation, from traces e + conj(e)
        let mut plus: Vec<Elt> = Vec::new();
        for i in 0..m {
            let e = unit_elt(m, i);
            let t = field.add(&e, &field.conj(&e));
            let t: Vec<BigInt> = linalg::make_primitive(t.into_iter().map(BigInt::from).collect());
            let mut rows: Vec<Vec<BigInt>> = plus.iter().map(|p| p.iter().map(|&x| BigInt::from(x)).collect()).collect();
            rows.push(t.clone());
            if linalg::rank_int(&rows) == rows.len() {
                plus.push(t.iter().map(|x| x.to_i64().expect("small")).collect());
            }
        }
        let zero_mat = || vec![vec![field.zero(); n]; n];
        let mut basis = Vec::new();
        for i in 0..n {
            for b in &plus {
                let mut h = zero_mat();
                h[i][i] = b.clone();
                basis.push(h);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for a in 0..m {
                    let mut h = zero_mat();
                    let w = unit_elt(m, a);
                    h[j][i] = field.conj(&w);
                    h[i][j] = w;
                    basis.push(h);
                }
            }
        }
        let omegas: Vec<Elt> = (0..m).map(|a| unit_elt(m, a)).collect();
        let grams = basis
            .iter()
            .map(|h| {
                let mut g = vec![vec![0i64; n * m]; n * m];
                for i in 0..n {
                    for j in 0..n {
                        if field.is_zero(&h[i][j]) {
                            continue;
                        }
                        for a in 0..m {
                            let left = field.mul(&field.conj(&omegas[a]), &h[i][j]);
                            for b in 0..m {
                                g[i * m + a][j * m + b] = field.trace(&field.mul(&left, &omegas[b]));
                            }
                        }
                    }
                }
                g
            })
            .collect();
        Ok(FormSpace {
            field,
            n,
            m,
            dim: basis.len(),
            basis,
            grams,
            plus_len: plus.len(),
        })
    }

    pub fn split(&self, v: &[i64]) -> Vec<Elt> {
        v.chunks(self.m).map(|c| c.to_vec()).collect()
    }

    pub fn flatten(&self, x: &[Elt]) -> Vector {
        x.iter().flatten().copied().collect()
    }

    /// Coordinates of the rank-one point q(v) against the basis of forms:
    /// entry k is `Tr(v^* H_k v)`, so the value of a form c at v is `c . ray(v)`.
    pub fn ray(&self, v: &[i64]) -> Vec<BigInt> {
        self.grams
            .iter()
            .map(|g| {
                let mut acc: i128 = 0;
                for (i, gi) in g.iter().enumerate() {
                    if v[i] == 0 {
                        continue;
                    }
                    let row: i128 = gi.iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum();
                    acc += row * v[i] as i128;
                }
                BigInt::from(acc)
            })
            .collect()
    }

    pub fn point(&self, coeffs: Vec<Rat>) -> FormPoint {
        let nm = self.n * self.m;
        let mut gram = vec![vec![Rat::zero(); nm]; nm];
        for (c, g) in coeffs.iter().zip(&self.grams) {
            if c.is_zero() {
                continue;
            }
            for i in 0..nm {
                for j in 0..nm {
                    if g[i][j] != 0 {
                        gram[i][j] += c * linalg::rat(g[i][j]);
                    }
                }
            }
        }
        FormPoint { coeffs, gram }
    }

    /// Coordinates of the identity Hermitian matrix.
    pub fn identity(&self) -> Vec<Rat> {
        let mut c = vec![Rat::zero(); self.dim];
        for i in 0..self.n {
            c[i * self.plus_len] = linalg::rat(1);
        }
        c
    }

    pub fn value(&self, coeffs: &[Rat], v: &[i64]) -> Rat {
        linalg::dot_rat(&self.ray(v), coeffs)
    }

    /// The rank-one Hermitian matrix `x x^*`.
    pub fn q_map(&self, x: &[Elt]) -> Result<OMat> {
        if x.len() != self.n {
            return Err(CoreError::InvalidInput(format!("vector has {} entries, expected {}", x.len(), self.n)));
        }
        if x.iter().all(|e| self.field.is_zero(e)) {
            return Err(CoreError::InvalidInput("q is undefined at the zero vector".into()));
        }
        let k = self.field;
        Ok(x.iter().map(|a| x.iter().map(|b| k.mul(a, &k.conj(b))).collect()).collect())
    }

    pub fn conj_transpose(&self, g: &OMat) -> OMat {
        (0..g[0].len()).map(|i| (0..g.len()).map(|j| self.field.conj(&g[j][i])).collect()).collect()
    }

    pub fn mat_mul(&self, a: &OMat, b: &OMat) -> OMat {
        let k = self.field;
        (0..a.len())
            .map(|i| {
                (0..b[0].len())
                    .map(|j| {
                        let mut acc = k.zero();
                        for (l, brow) in b.iter().enumerate() {
                            acc = k.add(&acc, &k.mul(&a[i][l], &brow[j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// The action `g . H = g H g^*`.
    pub fn act(&self, g: &OMat, h: &OMat) -> OMat {
        self.mat_mul(&self.mat_mul(g, h), &self.conj_transpose(g))
    }

    pub fn mat_vec(&self, g: &OMat, v: &[i64]) -> Vector {
        let k = self.field;
        let x = self.split(v);
        let y: Vec<Elt> = g
            .iter()
            .map(|row| row.iter().zip(&x).fold(k.zero(), |acc, (a, b)| k.add(&acc, &k.mul(a, b))))
            .collect();
        self.flatten(&y)
    }

    pub fn scale_vector(&self, z: &[i64], v: &[i64]) -> Vector {
        let x = self.split(v);
        self.flatten(&x.iter().map(|e| self.field.mul(z, e)).collect::<Vec<_>>())
    }

    /// Canonical representative of `v` modulo roots of unity (q(zv) = q(v)).
    pub fn normalize_ray(&self, v: &[i64]) -> Vector {
        self.field
            .roots_of_unity()
            .iter()
            .map(|z| self.scale_vector(z, v))
            .min()
            .expect("roots of unity are nonempty")
    }

    /// The Hermitian matrix with the given coordinates.
    pub fn hermitian(&self, coeffs: &[Rat]) -> Vec<Vec<Vec<Rat>>> {
        let m = self.m;
        let mut h = vec![vec![vec![Rat::zero(); m]; self.n]; self.n];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for i in 0..self.n {
                for j in 0..self.n {
                    for a in 0..m {
                        if b[i][j][a] != 0 {
                            h[i][j][a] += c * linalg::rat(b[i][j][a]);
                        }
                    }
                }
            }
        }
        h
    }

    /// Floating blocks of the form at each archimedean place.
    pub fn place_blocks(&self, coeffs: &[Rat]) -> Vec<Vec<Vec<Complex64>>> {
        let h = self.hermitian(coeffs);
        let k = self.field;
        (0..k.r + k.s)
            .map(|place| {
                let z = k.embeddings[place];
                h.iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| {
                                let mut pw = Complex64::new(1.0, 0.0);
                                let mut out = Complex64::new(0.0, 0.0);
                                for c in e {
                                    out += pw * c.to_f64().unwrap_or(f64::NAN);
                                    pw *= z;
                                }
                                out
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::field;

    #[test]
    fn dimensions() {
        assert_eq!(FormSpace::new(field("Q").unwrap(), 2).unwrap().dim, 3);
        assert_eq!(FormSpace::new(field("Q").unwrap(), 4).unwrap().dim, 10);
        assert_eq!(FormSpace::new(field("Q(sqrt-1)").unwrap(), 2).unwrap().dim, 4);
        assert_eq!(FormSpace::new(field("Q(zeta5)").unwrap(), 2).unwrap().dim, 8);
        assert!(matches!(
            FormSpace::new(field("cubic-23").unwrap(), 2),
            Err(CoreError::FormSpaceNotRational(_))
        ));
    }

    #[test]
    fn q_map_examples() {
        let s = FormSpace::new(field("Q").unwrap(), 2).unwrap();
        assert_eq!(s.q_map(&[vec![1], vec![0]]).unwrap(), vec![vec![vec![1], vec![0]], vec![vec![0], vec![0]]]);
        assert!(s.q_map(&[vec![0], vec![0]]).is_err());
        let g = FormSpace::new(field("Q(sqrt-1)").unwrap(), 2).unwrap();
        let h = g.q_map(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(h, vec![vec![vec![1, 0], vec![0, -1]], vec![vec![0, 1], vec![1, 0]]]);
    }

    #[test]
    fn identity_values_are_traces_of_norms() {
        let s = FormSpace::new(field("Q(sqrt-1)").unwrap(), 2).unwrap();
        let id = s.identity();
        // Tr(|1+i|^2 + |2|^2) = 2 * (2 + 4)
        assert_eq!(s.value(&id, &[1, 1, 2, 0]), linalg::rat(12));
        let p = s.point(id);
        assert_eq!(p.gram[0][0], linalg::rat(2));
    }
}
