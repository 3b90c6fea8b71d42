use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::exactmath::{Poly, PolyMatrix};
use crate::geometry::lie_bracket;
use crate::index_bracket::Label;

use super::family::BundleSection;
use super::ops::{add_vec, check_dim, gen_cov_deriv, scale_vec, sub_vec, Layout};
use super::scenario::TransportScenario;
use super::{TransportError, VectorFieldOnBase};

/// Diagonal values `H_ab(x,x)`, `Gamma_ab(x,x)` and their total
/// derivatives for one ordered pair.
#[derive(Clone, Debug)]
struct DiagonalPair {
    h: PolyMatrix,
    dh: Vec<PolyMatrix>,
    g: Vec<PolyMatrix>,
    // dg[beta][alpha] = d Gamma_alpha / dx^beta
    dg: Vec<Vec<PolyMatrix>>,
}

/// Single-point derivatives obtained by evaluating the two-point ones on
/// the diagonal `y = x`, and the curvature components of their
/// compositions.
#[derive(Clone, Debug)]
pub struct DiagonalCalculus {
    base_dim: usize,
    fiber_dim: usize,
    pairs: BTreeMap<(Label, Label), DiagonalPair>,
}

/// Components of the first curvature `R`, the second curvature `D` and the
/// mixed coefficients `K` for a label chain `a -> b -> c`.
///
/// `r(beta, alpha)` is the matrix `R^j_{i beta alpha}`; `d` and `k` carry
/// an extra upper index `gamma` that contracts with `nabla_gamma T`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenCurvatureComponents {
    labels: [Label; 3],
    base_dim: usize,
    r: Vec<PolyMatrix>,
    d: Vec<PolyMatrix>,
    k: Vec<PolyMatrix>,
}

impl GenCurvatureComponents {
    pub fn labels(&self) -> &[Label; 3] {
        &self.labels
    }

    pub fn r(&self, beta: usize, alpha: usize) -> &PolyMatrix {
        &self.r[beta * self.base_dim + alpha]
    }

    pub fn d(&self, gamma: usize, beta: usize, alpha: usize) -> &PolyMatrix {
        &self.d[(gamma * self.base_dim + beta) * self.base_dim + alpha]
    }

    pub fn k(&self, gamma: usize, beta: usize, alpha: usize) -> &PolyMatrix {
        &self.k[(gamma * self.base_dim + beta) * self.base_dim + alpha]
    }

    pub fn r_is_zero(&self) -> bool {
        self.r.iter().all(PolyMatrix::is_zero)
    }

    pub fn d_is_zero(&self) -> bool {
        self.d.iter().all(PolyMatrix::is_zero)
    }

    /// `R(W,V) T = R^j_{i beta alpha} T^i W^beta V^alpha`.
    pub fn apply_r(&self, w: &VectorFieldOnBase, v: &VectorFieldOnBase, t: &[Poly]) -> Result<Vec<Poly>, TransportError> {
        let n = self.base_dim;
        let mut acc = vec![Poly::zero(n); t.len()];
        for beta in 0..n {
            for alpha in 0..n {
                let wv = w.component(beta) * v.component(alpha);
                if !wv.is_zero() {
                    acc = add_vec(&acc, &scale_vec(&self.r(beta, alpha).apply(t)?, &wv));
                }
            }
        }
        Ok(acc)
    }

    /// `D(W,V) T = D^{j gamma}_{i beta alpha} (nabla_gamma T)^i W^beta V^alpha`
    /// given the derivatives `nabla_gamma T` of the source bundle.
    pub fn apply_d(
        &self,
        w: &VectorFieldOnBase,
        v: &VectorFieldOnBase,
        nabla_t: &[Vec<Poly>],
    ) -> Result<Vec<Poly>, TransportError> {
        let n = self.base_dim;
        check_dim(nabla_t.len(), n)?;
        let mut acc = vec![Poly::zero(n); nabla_t[0].len()];
        for beta in 0..n {
            for alpha in 0..n {
                let wv = w.component(beta) * v.component(alpha);
                if wv.is_zero() {
                    continue;
                }
                for (gamma, ng) in nabla_t.iter().enumerate() {
                    acc = add_vec(&acc, &scale_vec(&self.d(gamma, beta, alpha).apply(ng)?, &wv));
                }
            }
        }
        Ok(acc)
    }

    /// First pair `(beta, alpha)` where `R` or `D` fails to be
    /// antisymmetric, if any.
    pub fn antisymmetry_witness(&self) -> Option<Value> {
        let n = self.base_dim;
        for beta in 0..n {
            for alpha in 0..n {
                let sum = self.r(beta, alpha) + self.r(alpha, beta);
                if !sum.is_zero() {
                    return Some(json!({"component": "R", "beta": beta + 1, "alpha": alpha + 1, "sum": format!("{sum:?}")}));
                }
                for gamma in 0..n {
                    let sum = self.d(gamma, beta, alpha) + self.d(gamma, alpha, beta);
                    if !sum.is_zero() {
                        return Some(json!({"component": "D", "gamma": gamma + 1, "beta": beta + 1, "alpha": alpha + 1, "sum": format!("{sum:?}")}));
                    }
                }
            }
        }
        None
    }

    /// First index tuple where the two component sets differ.
    pub fn difference(&self, other: &GenCurvatureComponents) -> Option<Value> {
        let n = self.base_dim;
        for beta in 0..n {
            for alpha in 0..n {
                if self.r(beta, alpha) != other.r(beta, alpha) {
                    return Some(json!({"component": "R", "beta": beta + 1, "alpha": alpha + 1,
                        "left": format!("{:?}", self.r(beta, alpha)), "right": format!("{:?}", other.r(beta, alpha))}));
                }
                for gamma in 0..n {
                    if self.d(gamma, beta, alpha) != other.d(gamma, beta, alpha) {
                        return Some(json!({"component": "D", "gamma": gamma + 1, "beta": beta + 1, "alpha": alpha + 1,
                            "left": format!("{:?}", self.d(gamma, beta, alpha)), "right": format!("{:?}", other.d(gamma, beta, alpha))}));
                    }
                }
            }
        }
        None
    }
}

impl DiagonalCalculus {
    pub fn new(scenario: &TransportScenario) -> Result<Self, TransportError> {
        let n = scenario.base_dim();
        let two = Layout::new(n, 2);
        let labels = scenario.labels();
        let mut pairs = BTreeMap::new();
        for a in &labels {
            for b in &labels {
                let h = two.diagonal_matrix(scenario.transport(a, b)?.h())?;
                let g = scenario
                    .gamma(a, b)?
                    .coeffs()
                    .iter()
                    .map(|c| two.diagonal_matrix(c))
                    .collect::<Result<Vec<_>, _>>()?;
                let dh = (0..n).map(|beta| h.diff(beta)).collect::<Result<Vec<_>, _>>()?;
                let dg = (0..n)
                    .map(|beta| g.iter().map(|ga| ga.diff(beta)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                pairs.insert((a.clone(), b.clone()), DiagonalPair { h, dh, g, dg });
            }
        }
        Ok(DiagonalCalculus {
            base_dim: n,
            fiber_dim: scenario.fiber_dim(),
            pairs,
        })
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    fn pair(&self, a: &Label, b: &Label) -> Result<&DiagonalPair, TransportError> {
        self.pairs
            .get(&(a.clone(), b.clone()))
            .ok_or_else(|| TransportError::UnknownLabel(format!("{a}->{b}")))
    }

    /// `I_{x->x}` from `a` to `b`: multiplication by `H_ab(x,x)`.
    pub fn transport(&self, a: &Label, b: &Label, s: &[Poly]) -> Result<Vec<Poly>, TransportError> {
        Ok(self.pair(a, b)?.h.apply(s)?)
    }

    /// The diagonal derivative `V^alpha [H_ab(x,x) d_alpha s + Gamma_ab,alpha(x,x) s]`.
    pub fn nabla(&self, a: &Label, b: &Label, v: &VectorFieldOnBase, s: &[Poly]) -> Result<Vec<Poly>, TransportError> {
        let p = self.pair(a, b)?;
        check_dim(v.dim(), self.base_dim)?;
        check_dim(s.len(), self.fiber_dim)?;
        let mut acc = vec![Poly::zero(self.base_dim); self.fiber_dim];
        for alpha in 0..self.base_dim {
            let va = v.component(alpha);
            if va.is_zero() {
                continue;
            }
            let ds: Vec<Poly> = s.iter().map(|q| q.diff(alpha)).collect::<Result<_, _>>()?;
            let term = add_vec(&p.h.apply(&ds)?, &p.g[alpha].apply(s)?);
            acc = add_vec(&acc, &scale_vec(&term, va));
        }
        Ok(acc)
    }

    /// `nabla_gamma s` inside bundle `a`, for every coordinate direction.
    pub fn own_nablas(&self, a: &Label, s: &[Poly]) -> Result<Vec<Vec<Poly>>, TransportError> {
        (0..self.base_dim)
            .map(|gamma| self.nabla(a, a, &VectorFieldOnBase::coordinate(self.base_dim, gamma), s))
            .collect()
    }

    /// `nabla_bc_W (nabla_ab_V T)`.
    pub fn composition(
        &self,
        labels: [&Label; 3],
        w: &VectorFieldOnBase,
        v: &VectorFieldOnBase,
        t: &[Poly],
    ) -> Result<Vec<Poly>, TransportError> {
        let [a, b, c] = labels;
        self.nabla(b, c, w, &self.nabla(a, b, v, t)?)
    }

    /// `nabla_W nabla_V - nabla_V nabla_W - I o nabla_[W,V]` applied to `T`.
    pub fn antisymmetrized(
        &self,
        labels: [&Label; 3],
        w: &VectorFieldOnBase,
        v: &VectorFieldOnBase,
        t: &[Poly],
    ) -> Result<Vec<Poly>, TransportError> {
        let [a, b, c] = labels;
        let wv = lie_bracket(w, v)?;
        let first = self.composition(labels, w, v, t)?;
        let second = self.composition(labels, v, w, t)?;
        let third = self.transport(b, c, &self.nabla(a, b, &wv, t)?)?;
        Ok(sub_vec(&sub_vec(&first, &second), &third))
    }

    /// The mixed coefficients, indexed `(gamma, beta, alpha)`:
    /// `K = H_bc (dH_ab/dx^beta d^gamma_alpha + Gamma_ab,alpha d^gamma_beta)
    ///    + Gamma_bc,beta H_ab d^gamma_alpha`.
    pub fn k_coefficients(&self, labels: [&Label; 3]) -> Result<Vec<PolyMatrix>, TransportError> {
        let [a, b, c] = labels;
        let (ab, bc) = (self.pair(a, b)?, self.pair(b, c)?);
        let (n, m) = (self.base_dim, self.fiber_dim);
        let mut out = Vec::with_capacity(n * n * n);
        for gamma in 0..n {
            for beta in 0..n {
                for alpha in 0..n {
                    let mut inner = PolyMatrix::zeros(m, m, n);
                    let mut outer = PolyMatrix::zeros(m, m, n);
                    if gamma == alpha {
                        inner = inner.try_add(&ab.dh[beta])?;
                        outer = outer.try_add(&bc.g[beta].try_mul(&ab.h)?)?;
                    }
                    if gamma == beta {
                        inner = inner.try_add(&ab.g[alpha])?;
                    }
                    out.push(bc.h.try_mul(&inner)?.try_add(&outer)?);
                }
            }
        }
        Ok(out)
    }

    /// Components from their closed forms: `D` is the `(alpha, beta)`
    /// antisymmetrization of `K`, and
    /// `R_{beta alpha} = [Gamma_bc,beta Gamma_ab,alpha + H_bc dGamma_ab,alpha/dx^beta]_[alpha,beta]
    ///                 - D^gamma_{beta alpha} Gamma_aa,gamma`.
    pub fn curvature(&self, labels: [&Label; 3]) -> Result<GenCurvatureComponents, TransportError> {
        let [a, b, c] = labels;
        let n = self.base_dim;
        let k = self.k_coefficients(labels)?;
        let idx = |g: usize, be: usize, al: usize| (g * n + be) * n + al;
        let mut d = Vec::with_capacity(n * n * n);
        for gamma in 0..n {
            for beta in 0..n {
                for alpha in 0..n {
                    d.push(k[idx(gamma, beta, alpha)].try_sub(&k[idx(gamma, alpha, beta)])?);
                }
            }
        }
        let (ab, bc, aa) = (self.pair(a, b)?, self.pair(b, c)?, self.pair(a, a)?);
        let x = |beta: usize, alpha: usize| -> Result<PolyMatrix, TransportError> {
            Ok(bc.g[beta].try_mul(&ab.g[alpha])?.try_add(&bc.h.try_mul(&ab.dg[beta][alpha])?)?)
        };
        let mut r = Vec::with_capacity(n * n);
        for beta in 0..n {
            for alpha in 0..n {
                let mut rb = x(beta, alpha)?.try_sub(&x(alpha, beta)?)?;
                for gamma in 0..n {
                    rb = rb.try_sub(&d[idx(gamma, beta, alpha)].try_mul(&aa.g[gamma])?)?;
                }
                r.push(rb);
            }
        }
        Ok(GenCurvatureComponents {
            labels: [a.clone(), b.clone(), c.clone()],
            base_dim: n,
            r,
            d,
            k,
        })
    }

    /// Components read off the antisymmetrized composition itself, applied
    /// to coordinate fields and the sections `e_i` and `x^gamma e_i`. Since
    /// the operator is `R(W,V) T + D(W,V) nabla T`, the second curvature is
    /// `op(x^gamma e_i) - x^gamma op(e_i)` and the first is what remains of
    /// `op(e_i)` after removing the `D` contraction.
    pub fn extract_curvature(&self, labels: [&Label; 3]) -> Result<GenCurvatureComponents, TransportError> {
        let (n, m) = (self.base_dim, self.fiber_dim);
        let aa = self.pair(labels[0], labels[0])?;
        let basis = |i: usize, factor: Poly| -> Vec<Poly> {
            (0..m).map(|j| if j == i { factor.clone() } else { Poly::zero(n) }).collect()
        };
        let coord = |k: usize| VectorFieldOnBase::coordinate(n, k);
        let mut r = vec![PolyMatrix::zeros(m, m, n); n * n];
        let mut d = vec![PolyMatrix::zeros(m, m, n); n * n * n];
        let idx = |g: usize, be: usize, al: usize| (g * n + be) * n + al;
        for beta in 0..n {
            for alpha in 0..n {
                let (w, v) = (coord(beta), coord(alpha));
                let mut on_basis = Vec::with_capacity(m);
                for i in 0..m {
                    let on_e = self.antisymmetrized(labels, &w, &v, &basis(i, Poly::one(n)))?;
                    for gamma in 0..n {
                        let xg = Poly::var(n, gamma)?;
                        let on_xe = self.antisymmetrized(labels, &w, &v, &basis(i, xg.clone()))?;
                        let column = sub_vec(&on_xe, &scale_vec(&on_e, &xg));
                        for (j, entry) in column.into_iter().enumerate() {
                            d[idx(gamma, beta, alpha)].set(j, i, entry);
                        }
                    }
                    on_basis.push(on_e);
                }
                // the D contraction needs every column of D first
                for (i, on_e) in on_basis.into_iter().enumerate() {
                    let mut remainder = on_e;
                    for gamma in 0..n {
                        let dg = d[idx(gamma, beta, alpha)].try_mul(&aa.g[gamma])?;
                        remainder = sub_vec(&remainder, &dg.apply(&basis(i, Poly::one(n)))?);
                    }
                    for (j, entry) in remainder.into_iter().enumerate() {
                        r[beta * n + alpha].set(j, i, entry);
                    }
                }
            }
        }
        Ok(GenCurvatureComponents {
            labels: labels.map(Label::clone),
            base_dim: n,
            r,
            d,
            k: self.k_coefficients(labels)?,
        })
    }

    /// The expanded single-point formula for `nabla_bc_W o nabla_ab_V T`:
    /// `I_bc(nabla_ab_{W(V)} T) + W^beta V^alpha {[Gamma_bc,beta Gamma_ab,alpha
    ///  + H_bc dGamma_ab,alpha/dx^beta - K^gamma Gamma_aa,gamma] T
    ///  + K^gamma nabla_gamma T + H_ac d_beta d_alpha T}`.
    pub fn expanded_composition(
        &self,
        labels: [&Label; 3],
        w: &VectorFieldOnBase,
        v: &VectorFieldOnBase,
        t: &[Poly],
    ) -> Result<Vec<Poly>, TransportError> {
        let [a, b, c] = labels;
        let n = self.base_dim;
        let (ab, bc, ac, aa) = (self.pair(a, b)?, self.pair(b, c)?, self.pair(a, c)?, self.pair(a, a)?);
        let k = self.k_coefficients(labels)?;
        let w_of_v = VectorFieldOnBase::new((0..n).map(|al| w.apply_to(v.component(al))).collect())?;
        let mut acc = self.transport(b, c, &self.nabla(a, b, &w_of_v, t)?)?;
        let nablas = self.own_nablas(a, t)?;
        for beta in 0..n {
            for alpha in 0..n {
                let wv = w.component(beta) * v.component(alpha);
                if wv.is_zero() {
                    continue;
                }
                let mut t_coeff = bc.g[beta].try_mul(&ab.g[alpha])?.try_add(&bc.h.try_mul(&ab.dg[beta][alpha])?)?;
                let mut term = vec![Poly::zero(n); t.len()];
                for (gamma, ng) in nablas.iter().enumerate() {
                    let kg = &k[(gamma * n + beta) * n + alpha];
                    t_coeff = t_coeff.try_sub(&kg.try_mul(&aa.g[gamma])?)?;
                    term = add_vec(&term, &kg.apply(ng)?);
                }
                term = add_vec(&term, &t_coeff.apply(t)?);
                let second: Vec<Poly> = t
                    .iter()
                    .map(|p| p.diff(alpha).and_then(|q| q.diff(beta)))
                    .collect::<Result<_, _>>()?;
                term = add_vec(&term, &ac.h.apply(&second)?);
                acc = add_vec(&acc, &scale_vec(&term, &wv));
            }
        }
        Ok(acc)
    }
}

/// `nabla_bc_W o nabla_ab_V T` by applying the two-point derivative twice
/// and setting `y = x` after each step.
pub fn direct_diagonal_composition(
    scenario: &TransportScenario,
    labels: [&Label; 3],
    w: &VectorFieldOnBase,
    v: &VectorFieldOnBase,
    t: &BundleSection,
) -> Result<Vec<Poly>, TransportError> {
    let [a, b, c] = labels;
    let two = Layout::new(scenario.base_dim(), 2);
    let first = gen_cov_deriv(scenario.transport(a, b)?, scenario.gamma(a, b)?, v, t)?;
    let on_diag: Vec<Poly> = first.iter().map(|p| two.diagonal(p)).collect::<Result<_, _>>()?;
    let s = BundleSection::new(b.clone(), on_diag);
    let second = gen_cov_deriv(scenario.transport(b, c)?, scenario.gamma(b, c)?, w, &s)?;
    Ok(second.iter().map(|p| two.diagonal(p)).collect::<Result<_, _>>()?)
}
