use std::cell::RefCell;
use std::collections::HashMap;

use crate::exactmath::Poly;
use crate::rng::Lcg64;

use super::{EndomorphismField, GeometryError, PolyVectorField};

/// Christoffel coefficients `gamma(k, alpha, beta)`: `k` is the upper
/// index, `alpha` the differentiation direction, `beta` the argument.
/// No symmetry is assumed, so torsion is allowed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Connection {
    dim: usize,
    gamma: Vec<Poly>,
}

impl Connection {
    pub fn new(dim: usize, gamma: Vec<Poly>) -> Result<Self, GeometryError> {
        if dim == 0 || gamma.len() != dim * dim * dim {
            return Err(GeometryError::Dimension {
                expected: dim * dim * dim,
                found: gamma.len(),
            });
        }
        if let Some(bad) = gamma.iter().find(|p| p.nvars() != dim) {
            return Err(GeometryError::Dimension {
                expected: dim,
                found: bad.nvars(),
            });
        }
        Ok(Connection { dim, gamma })
    }

    pub fn flat(dim: usize) -> Self {
        Connection {
            dim,
            gamma: vec![Poly::zero(dim); dim * dim * dim],
        }
    }

    /// Sets the zero-based entry `(k, alpha, beta)`.
    pub fn set(&mut self, k: usize, alpha: usize, beta: usize, value: Poly) -> Result<(), GeometryError> {
        let n = self.dim;
        if k >= n || alpha >= n || beta >= n {
            return Err(GeometryError::Index(format!(
                "({},{},{}) outside 1..{n}",
                k + 1,
                alpha + 1,
                beta + 1
            )));
        }
        if value.nvars() != n {
            return Err(GeometryError::Dimension {
                expected: n,
                found: value.nvars(),
            });
        }
        self.gamma[(k * n + alpha) * n + beta] = value;
        Ok(())
    }

    /// Every entry has degree at most `degree` and integer coefficients in
    /// `-coeff..=coeff`.
    pub fn random(dim: usize, rng: &mut Lcg64, degree: u32, coeff: i64) -> Self {
        Connection {
            dim,
            gamma: (0..dim * dim * dim).map(|_| rng.poly(dim, degree, coeff)).collect(),
        }
    }

    /// A torsion-free random connection.
    pub fn random_symmetric(dim: usize, rng: &mut Lcg64, degree: u32, coeff: i64) -> Self {
        let mut c = Connection::flat(dim);
        for k in 0..dim {
            for a in 0..dim {
                for b in a..dim {
                    let p = rng.poly(dim, degree, coeff);
                    c.gamma[(k * dim + a) * dim + b] = p.clone();
                    c.gamma[(k * dim + b) * dim + a] = p;
                }
            }
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self, k: usize, alpha: usize, beta: usize) -> &Poly {
        &self.gamma[(k * self.dim + alpha) * self.dim + beta]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim;
        (0..n).all(|k| (0..n).all(|a| (0..n).all(|b| self.gamma(k, a, b) == self.gamma(k, b, a))))
    }

    /// `T(d_alpha, d_beta)^l = gamma(l,alpha,beta) - gamma(l,beta,alpha)`.
    pub fn coordinate_torsion(&self, l: usize, alpha: usize, beta: usize) -> Poly {
        self.gamma(l, alpha, beta) - self.gamma(l, beta, alpha)
    }

    /// The `d_l` component of `R(d_alpha, d_beta) d_k` from the classical
    /// coordinate formula.
    pub fn coordinate_curvature(&self, l: usize, k: usize, alpha: usize, beta: usize) -> Poly {
        let n = self.dim;
        let mut out = self.gamma(l, beta, k).diff(alpha).expect("in range")
            - self.gamma(l, alpha, k).diff(beta).expect("in range");
        for m in 0..n {
            out = out + self.gamma(l, alpha, m) * self.gamma(m, beta, k)
                - self.gamma(l, beta, m) * self.gamma(m, alpha, k);
        }
        out
    }

    fn check(&self, fields: &[&PolyVectorField]) -> Result<(), GeometryError> {
        fields.iter().try_for_each(|f| f.check(self.dim))
    }

    pub fn calculus(&self) -> Calculus<'_> {
        Calculus::new(self)
    }

    pub fn cov_deriv(&self, a: &PolyVectorField, b: &PolyVectorField) -> Result<PolyVectorField, GeometryError> {
        self.check(&[a, b])?;
        Ok(self.calculus().cov_deriv(a, b))
    }

    pub fn torsion_op(&self, a: &PolyVectorField, b: &PolyVectorField) -> Result<PolyVectorField, GeometryError> {
        self.check(&[a, b])?;
        Ok(self.calculus().torsion(a, b))
    }

    /// `R(A,B)C` straight from the operator definition, without using that
    /// it is tensorial in `C`.
    pub fn curvature_op(
        &self,
        a: &PolyVectorField,
        b: &PolyVectorField,
        c: &PolyVectorField,
    ) -> Result<PolyVectorField, GeometryError> {
        self.check(&[a, b, c])?;
        Ok(self.calculus().curvature_direct(a, b, c))
    }

    pub fn nabla_r(
        &self,
        a: &PolyVectorField,
        b: &PolyVectorField,
        c: &PolyVectorField,
        d: &PolyVectorField,
    ) -> Result<PolyVectorField, GeometryError> {
        self.check(&[a, b, c, d])?;
        Ok(self.calculus().nabla_r(a, b, c, d))
    }

    pub fn nabla_t(
        &self,
        a: &PolyVectorField,
        b: &PolyVectorField,
        c: &PolyVectorField,
    ) -> Result<PolyVectorField, GeometryError> {
        self.check(&[a, b, c])?;
        Ok(self.calculus().nabla_t(a, b, c))
    }

    pub fn nabla_nabla_r(
        &self,
        fields: [&PolyVectorField; 5],
    ) -> Result<PolyVectorField, GeometryError> {
        self.check(&fields)?;
        let [a, b, c, d, e] = fields;
        Ok(self.calculus().nabla_nabla_r(a, b, c, d, e))
    }

    pub fn curvature_action_on_r(
        &self,
        fields: [&PolyVectorField; 5],
    ) -> Result<PolyVectorField, GeometryError> {
        self.check(&fields)?;
        let [a, b, c, d, e] = fields;
        Ok(self.calculus().curvature_action_on_r(a, b, c, d, e))
    }

    pub fn curvature_action_on_t(
        &self,
        fields: [&PolyVectorField; 4],
    ) -> Result<PolyVectorField, GeometryError> {
        self.check(&fields)?;
        let [a, b, c, d] = fields;
        Ok(self.calculus().curvature_action_on_t(a, b, c, d))
    }
}

/// `[A,B]^k = A(B^k) - B(A^k)`.
pub fn lie_bracket(a: &PolyVectorField, b: &PolyVectorField) -> Result<PolyVectorField, GeometryError> {
    b.check(a.dim())?;
    Ok(lie_bracket_unchecked(a, b))
}

fn lie_bracket_unchecked(a: &PolyVectorField, b: &PolyVectorField) -> PolyVectorField {
    let comps = (0..a.dim())
        .map(|k| a.apply_to(b.component(k)) - b.apply_to(a.component(k)))
        .collect();
    PolyVectorField::new(comps).expect("dimensions agree")
}

type FieldPair = (PolyVectorField, PolyVectorField);

/// Operator evaluation against one connection, memoizing covariant
/// derivatives and curvature endomorphisms. Callers are responsible for
/// passing fields of the connection's dimension.
pub struct Calculus<'c> {
    conn: &'c Connection,
    contracted: RefCell<HashMap<PolyVectorField, EndomorphismField>>,
    covd: RefCell<HashMap<FieldPair, PolyVectorField>>,
    curvature: RefCell<HashMap<FieldPair, EndomorphismField>>,
    coordinate: RefCell<Option<Vec<EndomorphismField>>>,
}

impl<'c> Calculus<'c> {
    pub fn new(conn: &'c Connection) -> Self {
        Calculus {
            conn,
            contracted: RefCell::default(),
            covd: RefCell::default(),
            curvature: RefCell::default(),
            coordinate: RefCell::default(),
        }
    }

    pub fn connection(&self) -> &Connection {
        self.conn
    }

    pub fn dim(&self) -> usize {
        self.conn.dim
    }

    /// `(gamma_A)^k_beta = sum_alpha A^alpha gamma(k, alpha, beta)`.
    fn contracted_gamma(&self, a: &PolyVectorField) -> EndomorphismField {
        if let Some(e) = self.contracted.borrow().get(a) {
            return e.clone();
        }
        let n = self.dim();
        let cols: Vec<PolyVectorField> = (0..n)
            .map(|beta| {
                let comps = (0..n)
                    .map(|k| {
                        Poly::sum_of_products(
                            n,
                            (0..n).map(|alpha| (a.component(alpha), self.conn.gamma(k, alpha, beta))),
                        )
                        .expect("dimensions agree")
                    })
                    .collect();
                PolyVectorField::new(comps).expect("dimensions agree")
            })
            .collect();
        let e = EndomorphismField::from_columns(&cols);
        self.contracted.borrow_mut().insert(a.clone(), e.clone());
        e
    }

    pub fn lie_bracket(&self, a: &PolyVectorField, b: &PolyVectorField) -> PolyVectorField {
        lie_bracket_unchecked(a, b)
    }

    /// `(nabla_A B)^k = sum_alpha A^alpha (d_alpha B^k + sum_beta gamma(k,alpha,beta) B^beta)`.
    pub fn cov_deriv(&self, a: &PolyVectorField, b: &PolyVectorField) -> PolyVectorField {
        let key = (a.clone(), b.clone());
        if let Some(v) = self.covd.borrow().get(&key) {
            return v.clone();
        }
        let n = self.dim();
        let gb = self.contracted_gamma(a).apply(b);
        let comps = (0..n)
            .map(|k| a.apply_to(b.component(k)) + gb.component(k).clone())
            .collect();
        let v = PolyVectorField::new(comps).expect("dimensions agree");
        self.covd.borrow_mut().insert(key, v.clone());
        v
    }

    /// `T(A,B) = nabla_A B - nabla_B A - [A,B]`.
    pub fn torsion(&self, a: &PolyVectorField, b: &PolyVectorField) -> PolyVectorField {
        self.cov_deriv(a, b)
            .sub(&self.cov_deriv(b, a))
            .sub(&self.lie_bracket(a, b))
    }

    /// `R(A,B)C = nabla_A nabla_B C - nabla_B nabla_A C - nabla_[A,B] C`.
    pub fn curvature_direct(&self, a: &PolyVectorField, b: &PolyVectorField, c: &PolyVectorField) -> PolyVectorField {
        let ab = self.lie_bracket(a, b);
        self.cov_deriv(a, &self.cov_deriv(b, c))
            .sub(&self.cov_deriv(b, &self.cov_deriv(a, c)))
            .sub(&self.cov_deriv(&ab, c))
    }

    /// `R(d_alpha, d_beta)` from the operator definition, indexed
    /// `alpha * n + beta`; computed once.
    fn coordinate_curvatures(&self) -> Vec<EndomorphismField> {
        if let Some(c) = self.coordinate.borrow().as_ref() {
            return c.clone();
        }
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for alpha in 0..n {
            for beta in 0..n {
                let (da, db) = (PolyVectorField::coordinate(n, alpha), PolyVectorField::coordinate(n, beta));
                let cols: Vec<PolyVectorField> = (0..n)
                    .map(|k| self.curvature_direct(&da, &db, &PolyVectorField::coordinate(n, k)))
                    .collect();
                out.push(EndomorphismField::from_columns(&cols));
            }
        }
        *self.coordinate.borrow_mut() = Some(out.clone());
        out
    }

    /// `R(A,B)` as an endomorphism: `sum A^alpha B^beta R(d_alpha, d_beta)`,
    /// using that the curvature is tensorial in every slot.
    pub fn curvature(&self, a: &PolyVectorField, b: &PolyVectorField) -> EndomorphismField {
        let key = (a.clone(), b.clone());
        if let Some(e) = self.curvature.borrow().get(&key) {
            return e.clone();
        }
        let n = self.dim();
        let coord = self.coordinate_curvatures();
        let weights: Vec<Poly> = (0..n * n)
            .map(|ab| a.component(ab / n) * b.component(ab % n))
            .collect();
        let cols: Vec<PolyVectorField> = (0..n)
            .map(|k| {
                let comps = (0..n)
                    .map(|l| {
                        Poly::sum_of_products(n, (0..n * n).map(|ab| (&weights[ab], coord[ab].entry(l, k))))
                            .expect("dimensions agree")
                    })
                    .collect();
                PolyVectorField::new(comps).expect("dimensions agree")
            })
            .collect();
        let e = EndomorphismField::from_columns(&cols);
        self.curvature.borrow_mut().insert(key, e.clone());
        e
    }

    pub fn curvature_apply(&self, a: &PolyVectorField, b: &PolyVectorField, c: &PolyVectorField) -> PolyVectorField {
        self.curvature(a, b).apply(c)
    }

    /// `(nabla_A R)(B,C)D` by the Leibniz rule.
    pub fn nabla_r(
        &self,
        a: &PolyVectorField,
        b: &PolyVectorField,
        c: &PolyVectorField,
        d: &PolyVectorField,
    ) -> PolyVectorField {
        self.cov_deriv(a, &self.curvature_apply(b, c, d))
            .sub(&self.curvature_apply(&self.cov_deriv(a, b), c, d))
            .sub(&self.curvature_apply(b, &self.cov_deriv(a, c), d))
            .sub(&self.curvature_apply(b, c, &self.cov_deriv(a, d)))
    }

    /// `(nabla_A T)(B,C)` by the Leibniz rule.
    pub fn nabla_t(&self, a: &PolyVectorField, b: &PolyVectorField, c: &PolyVectorField) -> PolyVectorField {
        self.cov_deriv(a, &self.torsion(b, c))
            .sub(&self.torsion(&self.cov_deriv(a, b), c))
            .sub(&self.torsion(b, &self.cov_deriv(a, c)))
    }

    /// `(nabla_A (nabla_B R))(C,D)E`, with `B` held fixed while
    /// differentiating along `A`.
    pub fn nabla_nabla_r(
        &self,
        a: &PolyVectorField,
        b: &PolyVectorField,
        c: &PolyVectorField,
        d: &PolyVectorField,
        e: &PolyVectorField,
    ) -> PolyVectorField {
        self.cov_deriv(a, &self.nabla_r(b, c, d, e))
            .sub(&self.nabla_r(b, &self.cov_deriv(a, c), d, e))
            .sub(&self.nabla_r(b, c, &self.cov_deriv(a, d), e))
            .sub(&self.nabla_r(b, c, d, &self.cov_deriv(a, e)))
    }

    /// `(R(A,B)R)(C,D)E`, the endomorphism `R(A,B)` acting on the tensor `R`.
    pub fn curvature_action_on_r(
        &self,
        a: &PolyVectorField,
        b: &PolyVectorField,
        c: &PolyVectorField,
        d: &PolyVectorField,
        e: &PolyVectorField,
    ) -> PolyVectorField {
        let rab = self.curvature(a, b);
        rab.apply(&self.curvature_apply(c, d, e))
            .sub(&self.curvature_apply(&rab.apply(c), d, e))
            .sub(&self.curvature_apply(c, &rab.apply(d), e))
            .sub(&self.curvature_apply(c, d, &rab.apply(e)))
    }

    /// `(R(A,B)T)(C,D)`.
    pub fn curvature_action_on_t(
        &self,
        a: &PolyVectorField,
        b: &PolyVectorField,
        c: &PolyVectorField,
        d: &PolyVectorField,
    ) -> PolyVectorField {
        let rab = self.curvature(a, b);
        rab.apply(&self.torsion(c, d))
            .sub(&self.torsion(&rab.apply(c), d))
            .sub(&self.torsion(c, &rab.apply(d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::Rational;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i).unwrap()
    }

    fn field(comps: Vec<Poly>) -> PolyVectorField {
        PolyVectorField::new(comps).unwrap()
    }

    fn d(n: usize, k: usize) -> PolyVectorField {
        PolyVectorField::coordinate(n, k)
    }

    fn sample_connection() -> Connection {
        let mut c = Connection::flat(2);
        c.set(0, 0, 1, x(2, 1)).unwrap();
        c
    }

    #[test]
    fn lie_bracket_examples() {
        assert!(lie_bracket(&d(2, 0), &d(2, 1)).unwrap().is_zero());
        let a = field(vec![Poly::zero(2), x(2, 0)]);
        assert_eq!(lie_bracket(&a, &d(2, 0)).unwrap(), d(2, 1).neg());
        assert!(lie_bracket(&a, &a).unwrap().is_zero());
    }

    #[test]
    fn cov_deriv_examples() {
        let mut rng = Lcg64::new(3);
        let b = PolyVectorField::random(2, &mut rng, 2, 3);
        let flat = Connection::flat(2);
        let expected = field(vec![b.component(0).diff(0).unwrap(), b.component(1).diff(0).unwrap()]);
        assert_eq!(flat.cov_deriv(&d(2, 0), &b).unwrap(), expected);

        let conn = sample_connection();
        assert_eq!(conn.cov_deriv(&d(2, 0), &d(2, 1)).unwrap(), field(vec![x(2, 1), Poly::zero(2)]));

        let conn = Connection::random(2, &mut rng, 2, 3);
        let a = PolyVectorField::random(2, &mut rng, 1, 2);
        let f = rng.poly(2, 2, 3);
        assert_eq!(
            conn.cov_deriv(&a.scale(&f), &b).unwrap(),
            conn.cov_deriv(&a, &b).unwrap().scale(&f)
        );
    }

    #[test]
    fn flat_connection_has_no_curvature_or_torsion() {
        let mut rng = Lcg64::new(9);
        let conn = Connection::flat(2);
        let f: Vec<PolyVectorField> = (0..5).map(|_| PolyVectorField::random(2, &mut rng, 2, 3)).collect();
        assert!(conn.torsion_op(&f[0], &f[1]).unwrap().is_zero());
        assert!(conn.curvature_op(&f[0], &f[1], &f[2]).unwrap().is_zero());
        assert!(conn.nabla_r(&f[0], &f[1], &f[2], &f[3]).unwrap().is_zero());
        assert!(conn.nabla_t(&f[0], &f[1], &f[2]).unwrap().is_zero());
        let refs = [&f[0], &f[1], &f[2], &f[3], &f[4]];
        assert!(conn.nabla_nabla_r(refs).unwrap().is_zero());
        assert!(conn.curvature_action_on_r(refs).unwrap().is_zero());
        assert!(conn.curvature_action_on_t([&f[0], &f[1], &f[2], &f[3]]).unwrap().is_zero());
    }

    #[test]
    fn coordinate_oracles() {
        let mut rng = Lcg64::new(11);
        let conn = Connection::random(2, &mut rng, 2, 3);
        for a in 0..2 {
            for b in 0..2 {
                let t = conn.torsion_op(&d(2, a), &d(2, b)).unwrap();
                for l in 0..2 {
                    assert_eq!(*t.component(l), conn.coordinate_torsion(l, a, b));
                }
                for k in 0..2 {
                    let r = conn.curvature_op(&d(2, a), &d(2, b), &d(2, k)).unwrap();
                    for l in 0..2 {
                        assert_eq!(*r.component(l), conn.coordinate_curvature(l, k, a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn tensoriality() {
        let mut rng = Lcg64::new(21);
        let conn = Connection::random(2, &mut rng, 1, 2);
        let [a, b, c, e] = [(); 4].map(|_| PolyVectorField::random(2, &mut rng, 1, 2));
        let f = rng.poly(2, 1, 3);
        let calc = conn.calculus();
        let r = calc.curvature_direct(&a, &b, &c);
        assert_eq!(calc.curvature_direct(&a.scale(&f), &b, &c), r.scale(&f));
        assert_eq!(calc.curvature_direct(&a, &b, &c.scale(&f)), r.scale(&f));
        assert_eq!(calc.curvature_apply(&a, &b, &c), r);
        assert_eq!(calc.torsion(&a.scale(&f), &b), calc.torsion(&a, &b).scale(&f));
        assert_eq!(
            calc.nabla_r(&a, &b.scale(&f), &c, &e),
            calc.nabla_r(&a, &b, &c, &e).scale(&f)
        );
        assert!(calc.nabla_t(&a, &b, &b).is_zero());
    }

    #[test]
    fn operator_commutator_collapse() {
        let mut rng = Lcg64::new(5);
        let conn = Connection::random(2, &mut rng, 1, 2);
        let [a, b, c, dd, e] = [(); 5].map(|_| PolyVectorField::random(2, &mut rng, 1, 2));
        let calc = conn.calculus();
        let lhs = calc
            .curvature_action_on_r(&a, &b, &c, &dd, &e)
            .add(&calc.curvature_apply(&calc.curvature_apply(&a, &b, &c), &dd, &e))
            .add(&calc.curvature_apply(&c, &calc.curvature_apply(&a, &b, &dd), &e));
        let rhs = calc
            .curvature_apply(&a, &b, &calc.curvature_apply(&c, &dd, &e))
            .sub(&calc.curvature_apply(&c, &dd, &calc.curvature_apply(&a, &b, &e)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn ricci_identity_for_second_derivative() {
        // nabla_A(nabla_B R) - nabla_B(nabla_A R) - nabla_[A,B] R = R(A,B).R
        let mut rng = Lcg64::new(8);
        let conn = Connection::random(2, &mut rng, 1, 2);
        let [a, b, c, dd, e] = [(); 5].map(|_| PolyVectorField::random(2, &mut rng, 1, 1));
        let calc = conn.calculus();
        let lhs = calc
            .nabla_nabla_r(&a, &b, &c, &dd, &e)
            .sub(&calc.nabla_nabla_r(&b, &a, &c, &dd, &e))
            .sub(&calc.nabla_r(&calc.lie_bracket(&a, &b), &c, &dd, &e));
        assert_eq!(lhs, calc.curvature_action_on_r(&a, &b, &c, &dd, &e));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let conn = Connection::flat(2);
        assert!(conn.cov_deriv(&d(3, 0), &d(2, 0)).is_err());
        assert!(lie_bracket(&d(3, 0), &d(2, 0)).is_err());
        let mut c = Connection::flat(2);
        assert!(c.set(2, 0, 0, Poly::one(2)).is_err());
        assert!(c.set(0, 0, 0, Poly::constant(3, Rational::one())).is_err());
    }
}
