use rayon::prelude::*;
use vk_exactla::{homology_of_pair, ElementaryDivisors, SparseIntMatrix};

use super::cosets::CosetSpace;
use crate::algebra::ideal::OIdeal;
use crate::error::{CoreError, Result};
use crate::voronoi::{CellOrbit, Fan, FormSpace, OMat};

const KILLED: u32 = u32::MAX;

/// A basis element of V_k: a cell orbit paired with the least coset label
/// of its stabilizer orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedGenerator {
    pub cell_orbit: usize,
    pub coset: usize,
}

/// How the cosets of one cell orbit collapse under its stabilizer.
#[derive(Clone, Debug)]
struct CosetTable {
    /// Generator index in V_k, or `KILLED`.
    target: Vec<u32>,
    sign: Vec<i8>,
}

#[derive(Clone, Debug)]
pub struct VoronoiComplex {
    pub field: String,
    pub n: usize,
    pub level: OIdeal,
    pub index: usize,
    /// `generators[k]` spans V_k.
    pub generators: Vec<Vec<OrientedGenerator>>,
    /// `boundaries[k]` is d_k : V_k -> V_{k-1} (`boundaries[0]` has no rows).
    pub boundaries: Vec<SparseIntMatrix>,
}

/// Sign of a stabilizer element on the reference orientation of `cell`.
pub fn orientation_character(s: &FormSpace, gamma: &OMat, cell: &CellOrbit) -> Result<i8> {
    cell.orientation_sign(s, gamma)
}

fn coset_tables(cell: &CellOrbit, cosets: &CosetSpace, generators: &mut Vec<OrientedGenerator>, orbit: usize) -> Result<CosetTable> {
    let m = cosets.index;
    let mut target = vec![KILLED; m];
    let mut sign = vec![0i8; m];
    let gens: Vec<(&OMat, i8)> = cell.generators.iter().map(|&g| (&cell.stabilizer[g], cell.orientation[g])).collect();
    let mut visited = vec![false; m];
    let mut members = Vec::new();
    for start in 0..m {
        if visited[start] {
            continue;
        }
        members.clear();
        visited[start] = true;
        sign[start] = 1;
        members.push(start);
        let mut killed = false;
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            head += 1;
            for (g, o) in &gens {
                let y = cosets.act(x, g)?;
                let sy = sign[x] * o;
                if visited[y] {
                    if sign[y] != sy {
                        killed = true;
                    }
                } else {
                    visited[y] = true;
                    sign[y] = sy;
                    members.push(y);
                }
            }
        }
        let t = if killed {
            KILLED
        } else {
            generators.push(OrientedGenerator { cell_orbit: orbit, coset: start });
            (generators.len() - 1) as u32
        };
        for &x in &members {
            target[x] = t;
        }
    }
    Ok(CosetTable { target, sign })
}

/// Chain complex of the fan modulo Gamma_0(level) with orientation-twisted
/// coefficients. Fails with `BoundarySquare` if d^2 != 0.
pub fn assemble_complex(fan: &Fan, cosets: &CosetSpace) -> Result<VoronoiComplex> {
    if fan.field != cosets.field.label || fan.n != cosets.n {
        return Err(CoreError::InvalidInput(format!(
            "fan over ({}, {}) with cosets over ({}, {})",
            fan.field, fan.n, cosets.field.label, cosets.n
        )));
    }
    let top = fan.top_dim();
    let mut generators: Vec<Vec<OrientedGenerator>> = vec![Vec::new(); top + 1];
    let mut tables: Vec<Vec<CosetTable>> = Vec::with_capacity(top + 1);
    for (k, orbits) in fan.cells.iter().enumerate() {
        let mut t = Vec::with_capacity(orbits.len());
        for (o, cell) in orbits.iter().enumerate() {
            t.push(coset_tables(cell, cosets, &mut generators[k], o)?);
        }
        tables.push(t);
    }
    let mut boundaries = vec![SparseIntMatrix::zeros(0, generators[0].len())];
    for k in 1..=top {
        let cols: Vec<Vec<(usize, usize, i64)>> = generators[k]
            .par_iter()
            .enumerate()
            .map(|(col, g)| {
                let cell = &fan.cells[k][g.cell_orbit];
                let mut out = Vec::new();
                for f in &cell.facets {
                    let y = cosets.act(g.coset, &f.gamma)?;
                    let t = &tables[k - 1][f.orbit];
                    if t.target[y] != KILLED {
                        out.push((t.target[y] as usize, col, (f.sign * t.sign[y]) as i64));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        boundaries.push(SparseIntMatrix::from_summed_triplets(
            generators[k - 1].len(),
            generators[k].len(),
            cols.into_iter().flatten(),
        )?);
    }
    for k in 2..=top {
        let prod = boundaries[k - 1].mul(&boundaries[k])?;
        if let Some((row, col, _)) = prod.entries().first() {
            return Err(CoreError::BoundarySquare { degree: k, row: *row, col: *col });
        }
    }
    Ok(VoronoiComplex {
        field: fan.field.clone(),
        n: fan.n,
        level: cosets.level.clone(),
        index: cosets.index,
        generators,
        boundaries,
    })
}

impl VoronoiComplex {
    pub fn top_dim(&self) -> usize {
        self.generators.len() - 1
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.generators.iter().map(Vec::len).collect()
    }

    /// d_k, with zero maps outside the stored range.
    pub fn boundary(&self, k: usize) -> SparseIntMatrix {
        let dim = |j: usize| self.generators.get(j).map_or(0, Vec::len);
        match self.boundaries.get(k) {
            Some(d) => d.clone(),
            None => SparseIntMatrix::zeros(dim(k.wrapping_sub(1)), dim(k)),
        }
    }
}

/// H_k = ker d_k / im d_{k+1}.
pub fn voronoi_homology(c: &VoronoiComplex, k: usize) -> Result<(usize, ElementaryDivisors)> {
    let h = homology_of_pair(&c.boundary(k), &c.boundary(k + 1))?;
    Ok((h.betti, h.torsion))
}
