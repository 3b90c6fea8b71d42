use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::{MathError, Poly, Rational};

/// A dense rectangular matrix of polynomials sharing one variable count.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    nvars: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            nvars,
            entries: vec![Poly::zero(nvars); rows * cols],
        }
    }

    pub fn identity(size: usize, nvars: usize) -> Self {
        let mut m = PolyMatrix::zeros(size, size, nvars);
        for i in 0..size {
            m.entries[i * size + i] = Poly::one(nvars);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<Poly>,
    ) -> Result<Self, MathError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(MathError::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let nvars = entries[0].nvars();
        if let Some(bad) = entries.iter().find(|p| p.nvars() != nvars) {
            return Err(MathError::DimensionMismatch {
                expected: nvars,
                found: bad.nvars(),
            });
        }
        Ok(PolyMatrix {
            rows,
            cols,
            nvars,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, row: usize, col: usize) -> &Poly {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Poly) {
        assert_eq!(value.nvars(), self.nvars, "entry variable count");
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        let entries: Vec<Poly> = self.entries.iter().map(f).collect();
        let nvars = entries.first().map_or(self.nvars, Poly::nvars);
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars,
            entries,
        }
    }

    pub fn try_map(
        &self,
        f: impl Fn(&Poly) -> Result<Poly, MathError>,
    ) -> Result<PolyMatrix, MathError> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        let nvars = entries.first().map_or(self.nvars, Poly::nvars);
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars,
            entries,
        })
    }

    pub fn scale(&self, c: &Rational) -> PolyMatrix {
        self.map(|p| p.scale(c))
    }

    pub fn scale_poly(&self, f: &Poly) -> PolyMatrix {
        self.map(|p| p * f)
    }

    pub fn diff(&self, var: usize) -> Result<PolyMatrix, MathError> {
        self.try_map(|p| p.diff(var))
    }

    pub fn remap(&self, new_nvars: usize, map: &[usize]) -> Result<PolyMatrix, MathError> {
        let mut out = self.try_map(|p| p.remap(new_nvars, map))?;
        out.nvars = new_nvars;
        Ok(out)
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>, MathError> {
        self.entries.iter().map(|p| p.eval(point)).collect()
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.cols, self.rows, self.nvars);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn try_add(&self, other: &PolyMatrix) -> Result<PolyMatrix, MathError> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.with_entries(entries))
    }

    pub fn try_sub(&self, other: &PolyMatrix) -> Result<PolyMatrix, MathError> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.with_entries(entries))
    }

    pub fn try_mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, MathError> {
        if self.cols != other.rows {
            return Err(MathError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.nvars != other.nvars {
            return Err(MathError::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols, self.nvars);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero(self.nvars);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Poly]) -> Result<Vec<Poly>, MathError> {
        if v.len() != self.cols {
            return Err(MathError::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero(self.nvars);
                for (k, vk) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !vk.is_zero() {
                        acc = acc.try_add(&a.try_mul(vk)?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    fn with_entries(&self, entries: Vec<Poly>) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            entries,
        }
    }

    fn check_same_shape(&self, other: &PolyMatrix) -> Result<(), MathError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MathError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.nvars != other.nvars {
            return Err(MathError::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    /// True when the matrix is square, triangular (upper or lower) and has
    /// the constant 1 on its diagonal.
    pub fn is_unipotent(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let n = self.rows;
        let one = Poly::one(self.nvars);
        if (0..n).any(|i| *self.get(i, i) != one) {
            return false;
        }
        let upper = (0..n).all(|i| (0..i).all(|j| self.get(i, j).is_zero()));
        let lower = (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j).is_zero()));
        upper || lower
    }

    /// Inverse of a unipotent triangular matrix, which is again polynomial:
    /// with `N = M - I` nilpotent, `M^{-1} = I - N + N^2 - ... `.
    pub fn unipotent_inverse(&self) -> Result<PolyMatrix, MathError> {
        if !self.is_unipotent() {
            return Err(MathError::Shape(
                "only unipotent triangular matrices have a polynomial inverse here".into(),
            ));
        }
        let n = self.rows;
        let id = PolyMatrix::identity(n, self.nvars);
        let nil = self.try_sub(&id)?;
        let mut result = id.clone();
        let mut power = id;
        for k in 1..n {
            power = power.try_mul(&nil)?;
            result = if k % 2 == 1 {
                result.try_sub(&power)?
            } else {
                result.try_add(&power)?
            };
        }
        Ok(result)
    }
}

impl Add for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.try_add(rhs).expect("matrix shapes differ")
    }
}

impl Sub for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.try_sub(rhs).expect("matrix shapes differ")
    }
}

impl Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.try_mul(rhs).expect("matrix shapes differ")
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix {}x{} [{} vars]", self.rows, self.cols, self.nvars)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i).unwrap()
    }

    #[test]
    fn two_by_two_unipotent() {
        let m = PolyMatrix::from_entries(2, 2, vec![Poly::one(1), x(1, 0), Poly::zero(1), Poly::one(1)]).unwrap();
        let inv = m.unipotent_inverse().unwrap();
        let expected =
            PolyMatrix::from_entries(2, 2, vec![Poly::one(1), -x(1, 0), Poly::zero(1), Poly::one(1)]).unwrap();
        assert_eq!(inv, expected);
    }

    #[test]
    fn identity_is_its_own_inverse() {
        let id = PolyMatrix::identity(3, 2);
        assert_eq!(id.unipotent_inverse().unwrap(), id);
    }

    #[test]
    fn lower_triangular_three_by_three() {
        let mut m = PolyMatrix::identity(3, 2);
        m.set(1, 0, x(2, 0));
        m.set(2, 0, x(2, 1).pow(2));
        m.set(2, 1, &x(2, 0) + &Poly::one(2));
        let inv = m.unipotent_inverse().unwrap();
        assert_eq!(&m * &inv, PolyMatrix::identity(3, 2));
        assert_eq!(&inv * &m, PolyMatrix::identity(3, 2));
    }

    #[test]
    fn non_unipotent_is_rejected() {
        let mut m = PolyMatrix::identity(2, 1);
        m.set(0, 0, x(1, 0));
        assert!(matches!(m.unipotent_inverse(), Err(MathError::Shape(_))));
        let mut full = PolyMatrix::identity(2, 1);
        full.set(0, 1, x(1, 0));
        full.set(1, 0, x(1, 0));
        assert!(full.unipotent_inverse().is_err());
    }
}
