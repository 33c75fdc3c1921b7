use super::field::{Elt, NumberField};
use super::ideal::OIdeal;

/// The finite ring O / I with elements as reduced coordinate vectors.
#[derive(Clone, Debug)]
pub struct ResidueRing<'a> {
    pub field: &'a NumberField,
    pub modulus: OIdeal,
}

impl<'a> ResidueRing<'a> {
    pub fn new(field: &'a NumberField, modulus: OIdeal) -> Self {
        ResidueRing { field, modulus }
    }

    pub fn cardinality(&self) -> u64 {
        self.modulus.norm
    }

    pub fn reduce(&self, x: &[i64]) -> Elt {
        self.modulus.reduce(x)
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Elt {
        self.reduce(&self.field.add(a, b))
    }

    pub fn sub(&self, a: &[i64], b: &[i64]) -> Elt {
        self.reduce(&self.field.sub(a, b))
    }

    pub fn mul(&self, a: &[i64], b: &[i64]) -> Elt {
        self.reduce(&self.field.mul(a, b))
    }

    pub fn pow(&self, a: &[i64], mut e: u64) -> Elt {
        let mut r = self.reduce(&self.field.one());
        let mut b = self.reduce(a);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Position of a reduced element in `0..cardinality` (mixed radix on
    /// the HNF diagonal).
    pub fn index_of(&self, x: &[i64]) -> u64 {
        let x = self.reduce(x);
        let mut idx = 0u64;
        for i in (0..x.len()).rev() {
            idx = idx * self.modulus.hnf[i][i] as u64 + x[i] as u64;
        }
        idx
    }

    pub fn element(&self, mut idx: u64) -> Elt {
        let m = self.field.degree;
        let mut x = vec![0i64; m];
        for (i, xi) in x.iter_mut().enumerate() {
            let d = self.modulus.hnf[i][i] as u64;
            *xi = (idx % d) as i64;
            idx /= d;
        }
        x
    }

    pub fn elements(&self) -> impl Iterator<Item = Elt> + '_ {
        (0..self.cardinality()).map(|i| self.element(i))
    }

    pub fn is_zero(&self, x: &[i64]) -> bool {
        self.modulus.contains(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::field;

    #[test]
    fn gaussian_residues_mod_three() {
        let k = field("Q(sqrt-1)").unwrap();
        let r = ResidueRing::new(k, OIdeal::from_integer(k, 3).unwrap());
        assert_eq!(r.cardinality(), 9);
        assert_eq!(r.elements().count(), 9);
        for i in 0..9 {
            assert_eq!(r.index_of(&r.element(i)), i);
        }
        // F_9: every nonzero element has order dividing 8
        for x in r.elements().skip(1) {
            assert_eq!(r.pow(&x, 8), vec![1, 0]);
        }
    }
}
