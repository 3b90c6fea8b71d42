use std::fmt;

use crate::exactmath::{Poly, Rational};
use crate::index_bracket::IntegerCombination;
use crate::rng::Lcg64;

use super::GeometryError;

/// A vector field `sum_k V^k d_k` with polynomial components on an
/// `n`-dimensional chart.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyVectorField {
    components: Vec<Poly>,
}

impl PolyVectorField {
    pub fn new(components: Vec<Poly>) -> Result<Self, GeometryError> {
        let n = components.len();
        if n == 0 {
            return Err(GeometryError::Dimension { expected: 1, found: 0 });
        }
        if let Some(bad) = components.iter().find(|p| p.nvars() != n) {
            return Err(GeometryError::Dimension {
                expected: n,
                found: bad.nvars(),
            });
        }
        Ok(PolyVectorField { components })
    }

    pub fn zero(dim: usize) -> Self {
        PolyVectorField {
            components: vec![Poly::zero(dim); dim],
        }
    }

    /// The coordinate field `d_k` (zero-based `k`).
    pub fn coordinate(dim: usize, k: usize) -> Self {
        let mut f = PolyVectorField::zero(dim);
        f.components[k] = Poly::one(dim);
        f
    }

    pub fn random(dim: usize, rng: &mut Lcg64, degree: u32, coeff: i64) -> Self {
        PolyVectorField {
            components: (0..dim).map(|_| rng.poly(dim, degree, coeff)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Poly {
        &self.components[k]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub(crate) fn check(&self, dim: usize) -> Result<(), GeometryError> {
        if self.dim() != dim {
            return Err(GeometryError::Dimension {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyVectorField) -> PolyVectorField {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyVectorField) -> PolyVectorField {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> PolyVectorField {
        PolyVectorField {
            components: self.components.iter().map(|p| -p).collect(),
        }
    }

    pub fn scale(&self, f: &Poly) -> PolyVectorField {
        PolyVectorField {
            components: self.components.iter().map(|p| p * f).collect(),
        }
    }

    fn zip(&self, other: &PolyVectorField, op: impl Fn(&Poly, &Poly) -> Poly) -> PolyVectorField {
        assert_eq!(self.dim(), other.dim(), "field dimensions differ");
        PolyVectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    /// The derivation `V(f) = sum_a V^a d_a f`.
    pub fn apply_to(&self, f: &Poly) -> Poly {
        let partials: Vec<Poly> = (0..self.dim())
            .map(|a| f.diff(a).expect("variable in range"))
            .collect();
        Poly::sum_of_products(self.dim(), self.components.iter().zip(&partials))
            .expect("dimensions agree")
    }

    pub fn eval(&self, point: &[Rational]) -> Vec<Rational> {
        self.components
            .iter()
            .map(|p| p.eval(point).expect("point has the chart dimension"))
            .collect()
    }
}

impl IntegerCombination for PolyVectorField {
    fn add_scaled(&mut self, other: &Self, c: i64) {
        let c = Rational::from(c);
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            *a = &*a + &b.scale(&c);
        }
    }
}

impl fmt::Debug for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A pointwise linear operator on vector fields; `entries[l][k]` is the
/// `d_l` component of the image of `d_k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EndomorphismField {
    dim: usize,
    entries: Vec<Poly>,
}

impl EndomorphismField {
    pub fn zero(dim: usize) -> Self {
        EndomorphismField {
            dim,
            entries: vec![Poly::zero(dim); dim * dim],
        }
    }

    /// Builds the operator from the images of the coordinate fields.
    pub fn from_columns(columns: &[PolyVectorField]) -> Self {
        let dim = columns.len();
        let mut entries = vec![Poly::zero(dim); dim * dim];
        for (k, col) in columns.iter().enumerate() {
            for l in 0..dim {
                entries[l * dim + k] = col.component(l).clone();
            }
        }
        EndomorphismField { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, l: usize, k: usize) -> &Poly {
        &self.entries[l * self.dim + k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn apply(&self, v: &PolyVectorField) -> PolyVectorField {
        let n = self.dim;
        PolyVectorField {
            components: (0..n)
                .map(|l| {
                    Poly::sum_of_products(n, (0..n).map(|k| (self.entry(l, k), v.component(k))))
                        .expect("dimensions agree")
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &EndomorphismField) -> EndomorphismField {
        EndomorphismField {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl fmt::Debug for EndomorphismField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|k| self.entry(l, k).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
