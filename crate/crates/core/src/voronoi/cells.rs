use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::cone;
use super::forms::{FormSpace, OMat, Vector};
use super::isometry::{self, isometries, k_rank, Configuration};
use super::perfect::{enumerate_perfect_forms, PerfectForm};
use crate::error::{CoreError, Result};
use crate::linalg::{self, Rat};

pub const STABILIZER_BUDGET: usize = 20_000_000;
pub const MAX_PERFECT_FORMS: usize = 500;

/// A facet of a cell: `gamma` maps the representative of orbit `orbit`
/// (one dimension lower) onto the facet; `sign` is the incidence number
/// against the reference orientations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetRef {
    pub orbit: usize,
    pub gamma: OMat,
    pub sign: i8,
}

/// Representative of a GL_n(O)-orbit of cells meeting the positive cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellOrbit {
    pub dim: usize,
    /// Spanning rays as normalized vectors of O^n, sorted.
    pub vectors: Vec<Vector>,
    /// Ordered reference basis of the cone's span (indices into `vectors`).
    pub basis: Vec<usize>,
    pub pivots: Vec<usize>,
    pub base_sign: i8,
    pub stabilizer: Vec<OMat>,
    /// Action of each stabilizer element on the reference orientation.
    pub orientation: Vec<i8>,
    /// Indices into `stabilizer` of a generating set.
    pub generators: Vec<usize>,
    pub facets: Vec<FacetRef>,
}

/// The Koecher fan modulo GL_n(O): cell orbits by dimension with incidence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fan {
    pub field: String,
    pub n: usize,
    pub form_dim: usize,
    /// Perfect form coordinates as decimal fractions.
    pub perfect_forms: Vec<Vec<String>>,
    /// `cells[d]` lists the orbits of cell dimension `d`.
    pub cells: Vec<Vec<CellOrbit>>,
}

impl Fan {
    pub fn min_dim(&self) -> usize {
        self.cells.iter().position(|c| !c.is_empty()).unwrap_or(self.cells.len())
    }

    pub fn top_dim(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn orbit_counts(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }
}

fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn restricted_det(rows: &[Vec<BigInt>], pivots: &[usize]) -> BigInt {
    let m: Vec<Vec<BigInt>> = rows.iter().map(|r| pivots.iter().map(|&c| r[c].clone()).collect()).collect();
    linalg::det(&m)
}

impl CellOrbit {
    fn new(s: &FormSpace, vectors: Vec<Vector>, dim: usize) -> Result<(Self, Configuration)> {
        let rays: Vec<Vec<BigInt>> = vectors.iter().map(|v| s.ray(v)).collect();
        let mut basis: Vec<usize> = Vec::new();
        for i in 0..rays.len() {
            let mut trial: Vec<Vec<BigInt>> = basis.iter().map(|&b| rays[b].clone()).collect();
            trial.push(rays[i].clone());
            if linalg::rank_int(&trial) == trial.len() {
                basis.push(i);
            }
        }
        if basis.len() != dim + 1 {
            return Err(CoreError::FacetEnumeration(format!("cell {vectors:?} has span {} not {}", basis.len(), dim + 1)));
        }
        let brows: Vec<Vec<BigInt>> = basis.iter().map(|&b| rays[b].clone()).collect();
        let pivots = cone::span_coordinates(&brows);
        let base_sign = sign_of(&restricted_det(&brows, &pivots));
        let conf = Configuration::new(s, vectors.clone())?;
        let stabilizer = isometry::stabilizer(s, &conf, STABILIZER_BUDGET)?;
        let mut cell = CellOrbit {
            dim,
            vectors,
            basis,
            pivots,
            base_sign,
            stabilizer: Vec::new(),
            orientation: Vec::new(),
            generators: Vec::new(),
            facets: Vec::new(),
        };
        let orientation = stabilizer.iter().map(|h| cell.orientation_sign(s, h)).collect::<Result<Vec<_>>>()?;
        let gens = isometry::generators(s, &stabilizer);
        cell.generators = gens.iter().map(|g| stabilizer.iter().position(|h| h == g).expect("generator in list")).collect();
        cell.stabilizer = stabilizer;
        cell.orientation = orientation;
        Ok((cell, conf))
    }

    /// Sign of the determinant of `rows` (vectors of the cell's span) in the
    /// reference basis.
    pub fn orient(&self, rows: &[Vec<BigInt>]) -> i8 {
        sign_of(&restricted_det(rows, &self.pivots)) * self.base_sign
    }

    pub fn reference_rays(&self, s: &FormSpace, g: Option<&OMat>) -> Vec<Vec<BigInt>> {
        self.basis
            .iter()
            .map(|&b| match g {
                Some(g) => s.ray(&s.mat_vec(g, &self.vectors[b])),
                None => s.ray(&self.vectors[b]),
            })
            .collect()
    }

    /// Orientation character of a stabilizer element on this cell.
    pub fn orientation_sign(&self, s: &FormSpace, h: &OMat) -> Result<i8> {
        let keys: std::collections::HashSet<Vector> = self.vectors.iter().cloned().collect();
        if !self.vectors.iter().all(|v| keys.contains(&s.normalize_ray(&s.mat_vec(h, v)))) {
            return Err(CoreError::NotInStabilizer);
        }
        let rows = self.reference_rays(s, Some(h));
        let sg = self.orient(&rows);
        if sg == 0 {
            return Err(CoreError::NotInStabilizer);
        }
        Ok(sg)
    }
}

/// Build all cell orbits meeting the positive cone, from the perfect forms
/// down to the lowest dimension.
pub fn cell_complex(s: &FormSpace) -> Result<Fan> {
    let perfect = enumerate_perfect_forms(s, MAX_PERFECT_FORMS)?;
    cells_from_perfect(s, &perfect)
}

pub fn cells_from_perfect(s: &FormSpace, perfect: &[PerfectForm]) -> Result<Fan> {
    let top = s.dim - 1;
    let mut cells: Vec<Vec<CellOrbit>> = vec![Vec::new(); s.dim];
    let mut confs: Vec<Vec<Configuration>> = vec![Vec::new(); s.dim];
    for f in perfect {
        let (c, conf) = CellOrbit::new(s, f.rays.clone(), top)?;
        cells[top].push(c);
        confs[top].push(conf);
    }
    for d in (1..=top).rev() {
        let mut idx = 0;
        while idx < cells[d].len() {
            let sigma = cells[d][idx].clone();
            let rays: Vec<Vec<BigInt>> = sigma.vectors.iter().map(|v| s.ray(v)).collect();
            let mut refs = Vec::new();
            for fc in cone::facets(&rays)? {
                let fvecs: Vec<Vector> = fc.rays.iter().map(|&i| sigma.vectors[i].clone()).collect();
                if k_rank(s, &fvecs) < s.n {
                    continue;
                }
                let conf = Configuration::new(s, fvecs.clone())?;
                let mut found = None;
                for (j, c) in confs[d - 1].iter().enumerate() {
                    if let Some(g) = isometries(s, c, &conf, true, STABILIZER_BUDGET)?.into_iter().next() {
                        found = Some((j, g));
                        break;
                    }
                }
                let (orbit, gamma) = match found {
                    Some(x) => x,
                    None => {
                        let (c, cf) = CellOrbit::new(s, fvecs.clone(), d - 1)?;
                        cells[d - 1].push(c);
                        confs[d - 1].push(cf);
                        (cells[d - 1].len() - 1, isometry::omat_identity(s))
                    }
                };
                let tau = &cells[d - 1][orbit];
                let outside = (0..sigma.vectors.len())
                    .find(|i| !fc.rays.contains(i))
                    .ok_or_else(|| CoreError::FacetEnumeration("facet contains every ray".into()))?;
                let mut rows = vec![rays[outside].clone()];
                rows.extend(tau.reference_rays(s, Some(&gamma)));
                let sign = sigma.orient(&rows);
                if sign == 0 {
                    return Err(CoreError::FacetEnumeration(format!("degenerate incidence in cell {:?}", sigma.vectors)));
                }
                refs.push(FacetRef { orbit, gamma, sign });
            }
            cells[d][idx].facets = refs;
            idx += 1;
        }
    }
    let perfect_forms = perfect.iter().map(|f| f.point.coeffs.iter().map(BigRational::to_string).collect()).collect();
    Ok(Fan {
        field: s.field.label.clone(),
        n: s.n,
        form_dim: s.dim,
        perfect_forms,
        cells,
    })
}

/// Rational coordinates back from the cache representation.
pub fn parse_coeffs(v: &[String]) -> Result<Vec<Rat>> {
    v.iter()
        .map(|t| t.parse::<Rat>().map_err(|e| CoreError::InvalidInput(format!("bad coefficient `{t}`: {e}"))))
        .collect()
}
