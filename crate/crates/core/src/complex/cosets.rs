use std::collections::HashMap;

use crate::algebra::field::{Elt, NumberField};
use crate::algebra::ideal::{ideal_factor, OIdeal};
use crate::algebra::residue::ResidueRing;
use crate::error::{CoreError, Result};
use crate::voronoi::OMat;

/// P^{n-1}(O / p^e) for one prime power of the level.
#[derive(Clone, Debug)]
struct LocalSpace {
    ring: ResidueRing<'static>,
    prime: OIdeal,
    /// Order of the unit group of the local ring.
    units: u64,
    points: Vec<Vec<Elt>>,
    lookup: HashMap<u64, usize>,
}

impl LocalSpace {
    fn new(field: &'static NumberField, n: usize, prime: OIdeal, e: u32) -> Self {
        let modulus = prime.pow(field, e);
        let q = prime.norm;
        let units = modulus.norm - modulus.norm / q;
        let ring = ResidueRing::new(field, modulus);
        let all: Vec<Elt> = ring.elements().collect();
        let in_prime: Vec<Elt> = all.iter().filter(|x| prime.contains(x)).cloned().collect();
        let one = ring.reduce(&field.one());
        let mut points = Vec::new();
        for lead in 0..n {
            let mut cur: Vec<Vec<Elt>> = vec![Vec::new()];
            for j in 0..n {
                let choices: &[Elt] = if j < lead {
                    &in_prime
                } else if j == lead {
                    std::slice::from_ref(&one)
                } else {
                    &all
                };
                cur = cur
                    .into_iter()
                    .flat_map(|p| {
                        choices.iter().map(move |c| {
                            let mut p = p.clone();
                            p.push(c.clone());
                            p
                        })
                    })
                    .collect();
            }
            points.extend(cur);
        }
        let mut space = LocalSpace {
            ring,
            prime,
            units,
            points: Vec::new(),
            lookup: HashMap::new(),
        };
        for (i, p) in points.iter().enumerate() {
            space.lookup.insert(space.key(p), i);
        }
        space.points = points;
        space
    }

    fn key(&self, row: &[Elt]) -> u64 {
        let c = self.ring.cardinality();
        row.iter().rev().fold(0u64, |acc, x| acc * c + self.ring.index_of(x))
    }

    fn normalize(&self, row: &[Elt]) -> Result<usize> {
        let lead = row
            .iter()
            .position(|x| !self.prime.contains(x))
            .ok_or_else(|| CoreError::InvalidInput("row is not unimodular at the level".into()))?;
        let inv = self.ring.pow(&row[lead], self.units - 1);
        let scaled: Vec<Elt> = row.iter().map(|x| self.ring.mul(x, &inv)).collect();
        self.lookup
            .get(&self.key(&scaled))
            .copied()
            .ok_or_else(|| CoreError::InvalidInput("normalized row missing from the coset table".into()))
    }
}

/// Right cosets of Gamma_0(level) in GL_n(O), as bottom rows in
/// P^{n-1}(O / level). Points are numbered `0..index` in mixed radix over
/// the prime-power components, optionally relabelled by a permutation.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    pub field: &'static NumberField,
    pub n: usize,
    pub level: OIdeal,
    pub index: usize,
    components: Vec<LocalSpace>,
    /// internal -> external label, and back
    order: Vec<usize>,
    unorder: Vec<usize>,
}

/// Enumerate P^{n-1}(O / level).
pub fn gamma0_cosets(field: &'static NumberField, n: usize, level: &OIdeal) -> Result<CosetSpace> {
    if n == 0 {
        return Err(CoreError::InvalidInput("rank must be positive".into()));
    }
    if level.norm == 0 {
        return Err(CoreError::InvalidInput("zero level".into()));
    }
    let components: Vec<LocalSpace> = ideal_factor(field, level)?
        .into_iter()
        .map(|(p, e)| LocalSpace::new(field, n, p.ideal, e))
        .collect();
    let index = components.iter().map(|c| c.points.len()).product();
    Ok(CosetSpace {
        field,
        n,
        level: level.clone(),
        index,
        components,
        order: (0..index).collect(),
        unorder: (0..index).collect(),
    })
}

impl CosetSpace {
    /// The same space with point `i` relabelled `perm[i]`.
    pub fn relabelled(mut self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.index];
        if perm.len() != self.index || perm.iter().any(|&p| p >= self.index || std::mem::replace(&mut seen[p], true)) {
            return Err(CoreError::InvalidInput("relabelling is not a permutation of the cosets".into()));
        }
        let order: Vec<usize> = self.order.iter().map(|&e| perm[e]).collect();
        let mut unorder = vec![0; self.index];
        for (i, &e) in order.iter().enumerate() {
            unorder[e] = i;
        }
        self.order = order;
        self.unorder = unorder;
        Ok(self)
    }

    fn split(&self, mut internal: usize) -> Vec<usize> {
        self.components
            .iter()
            .map(|c| {
                let l = internal % c.points.len();
                internal /= c.points.len();
                l
            })
            .collect()
    }

    fn join(&self, local: &[usize]) -> usize {
        self.components.iter().zip(local).rev().fold(0, |acc, (c, &l)| acc * c.points.len() + l)
    }

    /// Label of the class of a bottom row.
    pub fn locate(&self, row: &[Elt]) -> Result<usize> {
        if row.len() != self.n {
            return Err(CoreError::InvalidInput(format!("row of length {} for rank {}", row.len(), self.n)));
        }
        let local = self
            .components
            .iter()
            .map(|c| c.normalize(&row.iter().map(|x| c.ring.reduce(x)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.order[self.join(&local)])
    }

    /// Local representatives of point `label`, one row per prime power.
    pub fn point(&self, label: usize) -> Vec<Vec<Elt>> {
        let local = self.split(self.unorder[label]);
        self.components.iter().zip(local).map(|(c, l)| c.points[l].clone()).collect()
    }

    /// Right action `x -> x g` on bottom rows.
    pub fn act(&self, label: usize, g: &OMat) -> Result<usize> {
        let k = self.field;
        let local = self.split(self.unorder[label]);
        let mut out = Vec::with_capacity(local.len());
        for (c, l) in self.components.iter().zip(local) {
            let x = &c.points[l];
            let row: Vec<Elt> = (0..self.n)
                .map(|j| {
                    let mut acc = k.zero();
                    for (i, xi) in x.iter().enumerate() {
                        if !k.is_zero(xi) {
                            acc = k.add(&acc, &k.mul(xi, &g[i][j]));
                        }
                    }
                    c.ring.reduce(&acc)
                })
                .collect();
            out.push(c.normalize(&row)?);
        }
        Ok(self.order[self.join(&out)])
    }
}
