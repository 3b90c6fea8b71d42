//! Sparse multivariate polynomials over [`Rational`].
//!
//! Terms are kept in a vector sorted by graded lexicographic monomial order
//! with no zero coefficients, so two polynomials are equal exactly when
//! their term vectors are equal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{MathError, Rational};

/// Most variables a polynomial may have.
pub const MAX_VARS: usize = 14;
/// Largest exponent of a single variable.
pub const MAX_EXPONENT: u16 = 255;

const DEGREE_SHIFT: u32 = 112;
// top bit of every exponent byte and of the degree field
const HIGH_BITS: u128 = (0x8000u128 << DEGREE_SHIFT) | 0x8080_8080_8080_8080_8080_8080_8080u128;

/// Exponent vector packed into one integer: the total degree sits in the
/// top 16 bits, then one byte per variable with variable 0 most
/// significant. Integer order is therefore graded lexicographic order and
/// multiplication is addition.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(u128);

fn byte_shift(var: usize) -> u32 {
    DEGREE_SHIFT - 8 * (var as u32 + 1)
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(0)
    }

    /// Panics when there are more than [`MAX_VARS`] exponents or one exceeds
    /// [`MAX_EXPONENT`]; see [`Monomial::try_from_exponents`].
    pub fn from_exponents(exps: &[u16]) -> Self {
        Self::try_from_exponents(exps).expect("monomial out of range")
    }

    pub fn try_from_exponents(exps: &[u16]) -> Result<Self, MathError> {
        if exps.len() > MAX_VARS {
            return Err(MathError::Capacity(format!(
                "{} variables (at most {MAX_VARS} supported)",
                exps.len()
            )));
        }
        let mut key = 0u128;
        let mut degree = 0u128;
        for (v, &e) in exps.iter().enumerate() {
            if e > MAX_EXPONENT {
                return Err(MathError::Capacity(format!(
                    "exponent {e} (at most {MAX_EXPONENT} supported)"
                )));
            }
            key |= (e as u128) << byte_shift(v);
            degree += e as u128;
        }
        Ok(Monomial(key | (degree << DEGREE_SHIFT)))
    }

    pub fn exponent(&self, var: usize) -> u16 {
        if var >= MAX_VARS {
            return 0;
        }
        ((self.0 >> byte_shift(var)) & 0xff) as u16
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u16> {
        (0..nvars).map(|v| self.exponent(v)).collect()
    }

    pub fn degree(&self) -> u32 {
        (self.0 >> DEGREE_SHIFT) as u32
    }

    /// Index one past the last variable with a nonzero exponent.
    fn span(&self) -> usize {
        (0..MAX_VARS).rev().find(|&v| self.exponent(v) != 0).map_or(0, |v| v + 1)
    }

    fn mul(self, other: Monomial) -> Monomial {
        if (self.0 | other.0) & HIGH_BITS == 0 {
            return Monomial(self.0 + other.0);
        }
        let exps: Vec<u16> = (0..MAX_VARS)
            .map(|v| self.exponent(v) + other.exponent(v))
            .collect();
        Monomial::from_exponents(&exps)
    }

    fn lowered(self, var: usize) -> Monomial {
        Monomial(self.0 - (1u128 << byte_shift(var)) - (1u128 << DEGREE_SHIFT))
    }
}

/// A polynomial in a fixed number of variables with exact rational
/// coefficients. Variables are 0-based in the API and printed 1-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    /// Panics if `nvars` exceeds [`MAX_VARS`].
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables are supported");
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        if c.is_zero() {
            return Poly::zero(nvars);
        }
        let mut p = Poly::zero(nvars);
        p.terms.push((Monomial::one(), c));
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_{var+1}`.
    pub fn var(nvars: usize, var: usize) -> Result<Self, MathError> {
        if var >= nvars {
            return Err(MathError::VariableOutOfRange { index: var, nvars });
        }
        let mut exps = vec![0u16; nvars];
        exps[var] = 1;
        Poly::monomial(nvars, &exps, Rational::one())
    }

    pub fn monomial(nvars: usize, exps: &[u16], c: Rational) -> Result<Self, MathError> {
        if exps.len() != nvars {
            return Err(MathError::DimensionMismatch {
                expected: nvars,
                found: exps.len(),
            });
        }
        let m = Monomial::try_from_exponents(exps)?;
        if c.is_zero() {
            return Ok(Poly::zero(nvars));
        }
        Ok(Poly {
            nvars,
            terms: vec![(m, c)],
        })
    }

    /// Builds a canonical polynomial from arbitrary (possibly repeated,
    /// possibly zero) terms.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self, MathError> {
        let terms: Vec<_> = terms.into_iter().collect();
        if nvars > MAX_VARS {
            return Err(MathError::Capacity(format!(
                "{nvars} variables (at most {MAX_VARS} supported)"
            )));
        }
        if let Some((m, _)) = terms.iter().find(|(m, _)| m.span() > nvars) {
            return Err(MathError::VariableOutOfRange {
                index: m.span() - 1,
                nvars,
            });
        }
        Ok(Poly::canonical(nvars, terms))
    }

    fn canonical(nvars: usize, mut terms: Vec<(Monomial, Rational)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += &c,
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if lc.is_zero() {
                out.pop();
            }
        }
        Poly { nvars, terms: out }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().map(|(m, c)| (m, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.last().map(|(m, _)| m.degree())
    }

    /// The constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.degree() == 0 => Some(c.clone()),
            _ => None,
        }
    }

    fn check_same(&self, other: &Poly) -> Result<(), MathError> {
        if self.nvars != other.nvars {
            Err(MathError::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            })
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, MathError> {
        self.check_same(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, MathError> {
        self.check_same(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, MathError> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let rhs = |c: &Rational| if negate { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, rhs(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (*m, rhs(c))));
        Poly {
            nvars: self.nvars,
            terms: out,
        }
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut prod = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                prod.push((ma.mul(*mb), ca * cb));
            }
        }
        Poly::canonical(self.nvars, prod)
    }

    /// `sum_k a_k * b_k`, collected once at the end.
    pub fn sum_of_products<'a>(
        nvars: usize,
        pairs: impl IntoIterator<Item = (&'a Poly, &'a Poly)>,
    ) -> Result<Poly, MathError> {
        let mut prod = Vec::new();
        for (a, b) in pairs {
            for p in [a, b] {
                if p.nvars != nvars {
                    return Err(MathError::DimensionMismatch {
                        expected: nvars,
                        found: p.nvars,
                    });
                }
            }
            for (ma, ca) in &a.terms {
                for (mb, cb) in &b.terms {
                    prod.push((ma.mul(*mb), ca * cb));
                }
            }
        }
        Ok(Poly::canonical(nvars, prod))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (*m, a * c))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..exp {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var` (0-based).
    pub fn diff(&self, var: usize) -> Result<Poly, MathError> {
        if var >= self.nvars {
            return Err(MathError::VariableOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(var);
            if e == 0 {
                return None;
            }
            Some((m.lowered(var), c * &Rational::from_integer(e as i64)))
        });
                Ok(Poly::canonical(self.nvars, terms.collect()))
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, MathError> {
        if point.len() != self.nvars {
            return Err(MathError::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut powers: Vec<Vec<Rational>> = point.iter().map(|v| vec![Rational::one(), v.clone()]).collect();
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in 0..self.nvars {
                let e = m.exponent(v);
                if e == 0 {
                    continue;
                }
                let table = &mut powers[v];
                while table.len() <= e as usize {
                    let next = table.last().unwrap() * &point[v];
                    table.push(next);
                }
                t *= &table[e as usize];
            }
            total += t;
        }
        Ok(total)
    }

    /// Substitutes rational values for the variables marked `Some`, keeping
    /// the variable count unchanged.
    pub fn eval_partial(&self, values: &[Option<Rational>]) -> Result<Poly, MathError> {
        if values.len() != self.nvars {
            return Err(MathError::DimensionMismatch {
                expected: self.nvars,
                found: values.len(),
            });
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut coeff = c.clone();
            let mut exps = m.exponents(self.nvars);
            for (v, val) in values.iter().enumerate() {
                if let Some(val) = val {
                    coeff *= &val.pow(exps[v] as u32);
                    exps[v] = 0;
                }
            }
            (Monomial::from_exponents(&exps), coeff)
        });
        Ok(Poly::canonical(self.nvars, terms.collect()))
    }

    /// Re-expresses the polynomial in `new_nvars` variables, sending variable
    /// `i` to variable `map[i]`. Several variables may map to the same target
    /// (exponents add), which is how diagonal restrictions are formed.
    pub fn remap(&self, new_nvars: usize, map: &[usize]) -> Result<Poly, MathError> {
        if map.len() != self.nvars {
            return Err(MathError::DimensionMismatch {
                expected: self.nvars,
                found: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&t| t >= new_nvars) {
            return Err(MathError::VariableOutOfRange {
                index: bad,
                nvars: new_nvars,
            });
        }
        if new_nvars > MAX_VARS {
            return Err(MathError::Capacity(format!(
                "{new_nvars} variables (at most {MAX_VARS} supported)"
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut exps = vec![0u16; new_nvars];
            for (i, &target) in map.iter().enumerate() {
                exps[target] += m.exponent(i);
            }
            terms.push((Monomial::try_from_exponents(&exps)?, c.clone()));
        }
        Ok(Poly::canonical(new_nvars, terms))
    }

    /// Formats with caller-supplied variable names.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Default variable names `x1..xn`.
    pub fn default_names(nvars: usize) -> Vec<String> {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }

    /// Names for a polynomial over `points` blocks of `dim` variables:
    /// one point gives `x1..xn`, two give `y1..yn, x1..xn`, three give
    /// `z.., y.., x..`.
    pub fn point_names(points: usize, dim: usize) -> Vec<String> {
        const LETTERS: [&str; 4] = ["x", "y", "z", "t"];
        (0..points)
            .flat_map(|b| {
                let letter = LETTERS[(points - 1 - b).min(3)];
                (1..=dim).map(move |i| format!("{letter}{i}"))
            })
            .collect()
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.degree() == 0 {
                factors.push(mag.to_string());
            }
            for v in 0..self.poly.nvars {
                let e = m.exponent(v);
                let name = self.names.get(v).cloned().unwrap_or_else(|| format!("x{}", v + 1));
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Poly::default_names(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.nvars, self)
    }
}

// Operator forms panic on a variable-count mismatch; the `try_*` methods
// report it as an error instead.
macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomial variable counts differ")
            }
        }
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $trait<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, try_add);
poly_binop!(Sub, sub, try_sub);
poly_binop!(Mul, mul, try_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn difference_of_squares() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let lhs = (&x1 + &x2) * (&x1 - &x2);
        assert_eq!(lhs, &x1 * &x1 - &x2 * &x2);
    }

    #[test]
    fn additive_inverse_is_zero() {
        let p = x(2, 0).pow(3) + x(2, 1).scale(&r(5, 7));
        assert!((&p + &p.scale(&r(-1, 1))).is_zero());
    }

    #[test]
    fn rational_cancellation() {
        let p = x(2, 0).scale(&r(3, 2)) * x(2, 1).scale(&r(2, 3));
        assert_eq!(p, x(2, 0) * x(2, 1));
    }

    #[test]
    fn mismatched_variable_counts_error() {
        assert!(matches!(
            x(2, 0).try_add(&x(3, 0)),
            Err(MathError::DimensionMismatch { .. })
        ));
        assert!(x(2, 0).try_mul(&x(3, 0)).is_err());
    }

    #[test]
    fn power_rule_and_constants() {
        let p = x(2, 0).pow(2) * x(2, 1);
        assert_eq!(p.diff(0).unwrap(), (x(2, 0) * x(2, 1)).scale(&r(2, 1)));
        assert!(x(2, 0).diff(1).unwrap().is_zero());
        assert!(matches!(p.diff(2), Err(MathError::VariableOutOfRange { .. })));
    }

    #[test]
    fn derivative_of_cube_matches_termwise_expansion() {
        let s = x(2, 0) + x(2, 1);
        let cube = s.pow(3);
        // cube expanded: x1^3 + 3x1^2x2 + 3x1x2^2 + x2^3, differentiated by hand
        let oracle = x(2, 0).pow(2).scale(&r(3, 1))
            + (x(2, 0) * x(2, 1)).scale(&r(6, 1))
            + x(2, 1).pow(2).scale(&r(3, 1));
        assert_eq!(cube.diff(0).unwrap(), oracle);
        assert_eq!(oracle, s.pow(2).scale(&r(3, 1)));
    }

    #[test]
    fn evaluation() {
        let p = x(2, 0).pow(2) + x(2, 1);
        assert_eq!(p.eval(&[r(2, 1), r(3, 1)]).unwrap(), r(7, 1));
        assert_eq!(Poly::zero(3).eval(&[r(1, 2), r(5, 1), r(-1, 1)]).unwrap(), Rational::zero());
        assert!(p.eval(&[r(1, 1)]).is_err());
    }

    #[test]
    fn remap_to_diagonal() {
        // f(y, x) = y1 * x1^2 restricted to y = x gives x1^3
        let f = x(2, 0) * x(2, 1).pow(2);
        assert_eq!(f.remap(1, &[0, 0]).unwrap(), x(1, 0).pow(3));
        let g = x(1, 0).remap(3, &[2]).unwrap();
        assert_eq!(g, x(3, 2));
    }

    #[test]
    fn partial_evaluation() {
        let f = x(2, 0) * x(2, 1) + x(2, 1);
        let g = f.eval_partial(&[Some(r(2, 1)), None]).unwrap();
        assert_eq!(g, x(2, 1).scale(&r(3, 1)));
    }

    #[test]
    fn display_is_graded_descending() {
        let p = x(2, 0).pow(2) * x(2, 1) + x(2, 1).scale(&r(3, 2)) - Poly::one(2);
        assert_eq!(p.to_string(), "x1^2*x2 + 3/2*x2 - 1");
        let names = Poly::point_names(2, 1);
        assert_eq!(names, vec!["y1".to_string(), "x1".to_string()]);
    }

    #[test]
    fn packed_monomials_order_graded_lex() {
        let m = |e: &[u16]| Monomial::from_exponents(e);
        assert!(m(&[0, 0, 1]) > m(&[0, 0, 0]));
        assert!(m(&[0, 2, 0]) > m(&[1, 0, 0]));
        assert!(m(&[1, 0, 0]) > m(&[0, 1, 0]));
        assert_eq!(m(&[1, 2, 3]).degree(), 6);
        assert_eq!(m(&[1, 2, 3]).exponents(3), vec![1, 2, 3]);
        assert_eq!(m(&[200, 1]).mul(m(&[55, 2])), m(&[255, 3]));
    }

    #[test]
    fn capacity_limits_are_errors() {
        assert!(matches!(
            Poly::monomial(2, &[256, 0], Rational::one()),
            Err(MathError::Capacity(_))
        ));
        assert!(Monomial::try_from_exponents(&[0; MAX_VARS + 1]).is_err());
        assert!(x(2, 0).remap(MAX_VARS + 1, &[0, 1]).is_err());
    }
}
