use serde_json::{json, Value};

use crate::exactmath::{MathError, Poly, PolyMatrix, Rational};
use crate::rng::Lcg64;
use crate::verification::VerificationResult;

use super::family::{BundleSection, FormalGamma, TransportCoeffs};
use super::scenario::TransportScenario;
use super::{TransportError, VectorFieldOnBase};

/// A polynomial ring over `points` copies of an `n`-dimensional chart.
/// Block `k` holds the coordinates of point `k`; the last block is the
/// innermost point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    dim: usize,
    points: usize,
}

impl Layout {
    pub fn new(dim: usize, points: usize) -> Self {
        Layout { dim, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.dim * self.points
    }

    pub fn var(&self, block: usize, k: usize) -> usize {
        block * self.dim + k
    }

    /// `x1..`, `y1.., x1..` or `z1.., y1.., x1..`.
    pub fn names(&self) -> Vec<String> {
        Poly::point_names(self.points, self.dim)
    }

    /// A one-point polynomial placed on `block`.
    pub fn embed(&self, p: &Poly, block: usize) -> Result<Poly, MathError> {
        let map: Vec<usize> = (0..self.dim).map(|k| self.var(block, k)).collect();
        p.remap(self.nvars(), &map)
    }

    /// A two-point polynomial `p(y, x)` placed on blocks `(out, inner)`.
    pub fn embed_pair(&self, p: &Poly, out: usize, inner: usize) -> Result<Poly, MathError> {
        let map: Vec<usize> = (0..self.dim)
            .map(|k| self.var(out, k))
            .chain((0..self.dim).map(|k| self.var(inner, k)))
            .collect();
        p.remap(self.nvars(), &map)
    }

    pub fn embed_matrix(&self, m: &PolyMatrix, block: usize) -> Result<PolyMatrix, MathError> {
        m.try_map(|p| self.embed(p, block))
    }

    pub fn embed_matrix_pair(&self, m: &PolyMatrix, out: usize, inner: usize) -> Result<PolyMatrix, MathError> {
        m.try_map(|p| self.embed_pair(p, out, inner))
    }

    pub fn embed_all(&self, ps: &[Poly], block: usize) -> Result<Vec<Poly>, MathError> {
        ps.iter().map(|p| self.embed(p, block)).collect()
    }

    /// Sets every point equal, giving a polynomial on the chart itself.
    pub fn diagonal(&self, p: &Poly) -> Result<Poly, MathError> {
        let map: Vec<usize> = (0..self.nvars()).map(|v| v % self.dim).collect();
        p.remap(self.dim, &map)
    }

    pub fn diagonal_matrix(&self, m: &PolyMatrix) -> Result<PolyMatrix, MathError> {
        m.try_map(|p| self.diagonal(p))
    }
}

pub(crate) fn add_vec(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(p, q)| p + q).collect()
}

pub(crate) fn sub_vec(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

pub(crate) fn scale_vec(a: &[Poly], f: &Poly) -> Vec<Poly> {
    a.iter().map(|p| p * f).collect()
}

pub(crate) fn is_zero_vec(a: &[Poly]) -> bool {
    a.iter().all(Poly::is_zero)
}

pub(crate) fn show_vec(a: &[Poly], names: &[String]) -> Value {
    json!(a.iter().map(|p| p.display_with(names).to_string()).collect::<Vec<_>>())
}

/// `V^alpha(inner) [H(out,inner) d_alpha T + Gamma_alpha(out,inner) T]`,
/// with `T` already living in `layout` and differentiated in its `inner`
/// block. This is the one formula every derivative in this module uses.
pub(crate) fn apply_formal(
    layout: Layout,
    h: &PolyMatrix,
    coeffs: &[PolyMatrix],
    v: &VectorFieldOnBase,
    t: &[Poly],
    out: usize,
    inner: usize,
) -> Result<Vec<Poly>, TransportError> {
    let n = layout.dim();
    check_dim(v.dim(), n)?;
    check_dim(coeffs.len(), n)?;
    check_dim(t.len(), h.cols())?;
    let h = layout.embed_matrix_pair(h, out, inner)?;
    let mut acc = vec![Poly::zero(layout.nvars()); h.rows()];
    for alpha in 0..n {
        let va = layout.embed(v.component(alpha), inner)?;
        if va.is_zero() {
            continue;
        }
        let dt = t
            .iter()
            .map(|p| p.diff(layout.var(inner, alpha)))
            .collect::<Result<Vec<_>, _>>()?;
        let g = layout.embed_matrix_pair(&coeffs[alpha], out, inner)?;
        let term = add_vec(&h.apply(&dt)?, &g.apply(t)?);
        acc = add_vec(&acc, &scale_vec(&term, &va));
    }
    Ok(acc)
}

pub(crate) fn check_dim(found: usize, expected: usize) -> Result<(), TransportError> {
    if found != expected {
        return Err(TransportError::Dimension { expected, found });
    }
    Ok(())
}

fn check_label(expected: &crate::index_bracket::Label, found: &crate::index_bracket::Label) -> Result<(), TransportError> {
    if expected != found {
        return Err(TransportError::LabelMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

/// `(I_x T)(y) = H(y,x) T(x)` with the point `x` fixed: a section of the
/// target bundle in the variables `y`.
pub fn transport_section(
    tc: &TransportCoeffs,
    t: &BundleSection,
    x: &[Rational],
) -> Result<BundleSection, TransportError> {
    check_label(tc.source(), t.label())?;
    let n = tc.base_dim();
    check_dim(x.len(), n)?;
    let two = Layout::new(n, 2);
    let tx = two.embed_all(t.components(), 1)?;
    let values: Vec<Option<Rational>> = (0..2 * n)
        .map(|v| if v < n { None } else { Some(x[v - n].clone()) })
        .collect();
    let back: Vec<usize> = (0..2 * n).map(|v| v % n).collect();
    let comps = tc
        .h()
        .apply(&tx)?
        .iter()
        .map(|p| p.eval_partial(&values)?.remap(n, &back))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BundleSection::new(tc.target().clone(), comps))
}

/// The generalized covariant derivative `(nabla_V T)(y)` of a section of
/// the source bundle, as a polynomial in `(y, x)`.
pub fn gen_cov_deriv(
    tc: &TransportCoeffs,
    g: &FormalGamma,
    v: &VectorFieldOnBase,
    t: &BundleSection,
) -> Result<Vec<Poly>, TransportError> {
    check_label(tc.source(), g.source())?;
    check_label(tc.target(), g.target())?;
    check_label(tc.source(), t.label())?;
    let two = Layout::new(tc.base_dim(), 2);
    let tx = two.embed_all(t.components(), 1)?;
    apply_formal(two, tc.h(), g.coeffs(), v, &tx, 0, 1)
}

/// The transport derivative: the same formula with `Gamma = dH/dx`.
pub fn transport_deriv(
    tc: &TransportCoeffs,
    v: &VectorFieldOnBase,
    t: &BundleSection,
) -> Result<Vec<Poly>, TransportError> {
    check_label(tc.source(), t.label())?;
    let two = Layout::new(tc.base_dim(), 2);
    let tx = two.embed_all(t.components(), 1)?;
    apply_formal(two, tc.h(), tc.hx_all(), v, &tx, 0, 1)
}

/// `Gamma_ab(y,x) = H_ab(y,x) Gamma_a(x)` from one diagonal coefficient
/// family per source bundle; consistent by construction.
pub fn consistent_gamma_from_diagonal(
    tc: &TransportCoeffs,
    diag: &[PolyMatrix],
) -> Result<FormalGamma, TransportError> {
    let n = tc.base_dim();
    check_dim(diag.len(), n)?;
    let two = Layout::new(n, 2);
    let coeffs = diag
        .iter()
        .map(|d| {
            check_dim(d.nvars(), n)?;
            Ok(tc.h().try_mul(&two.embed_matrix(d, 1)?)?)
        })
        .collect::<Result<Vec<_>, TransportError>>()?;
    FormalGamma::new(tc.source().clone(), tc.target().clone(), coeffs)
}

pub(crate) fn mat_mul(a: &[Rational], b: &[Rational], m: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); m * m];
    for i in 0..m {
        for k in 0..m {
            if a[i * m + k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i * m + j] += &(&a[i * m + k] * &b[k * m + j]);
            }
        }
    }
    out
}

pub(crate) fn show_rationals(v: &[Rational]) -> Value {
    json!(v.iter().map(|r| r.to_string()).collect::<Vec<_>>())
}

pub(crate) fn random_point(rng: &mut Lcg64, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rng.rational(9, 5)).collect()
}

/// Consistency of the formal connections with the transports:
/// `Gamma_ab(z,x) = H_cb(z,y) Gamma_ac(y,x)` for every label triple at
/// `points` random rational triples, plus the `y = x` case with `c = a`.
pub fn check_consistency(
    scenario: &TransportScenario,
    points: u64,
    seed: u64,
) -> Result<VerificationResult, TransportError> {
    let labels = scenario.labels();
    let (n, m) = (scenario.base_dim(), scenario.fiber_dim());
    let mut checks = 0u64;
    for trial in 0..points {
        let mut rng = Lcg64::fork(seed, trial);
        let (z, y, x) = (random_point(&mut rng, n), random_point(&mut rng, n), random_point(&mut rng, n));
        for a in &labels {
            for b in &labels {
                for c in &labels {
                    let mut cases = vec![(c, y.clone())];
                    if c == a {
                        cases.push((a, x.clone()));
                    }
                    for (mid, ypt) in cases {
                        let h = scenario.transport(mid, b)?.eval(&z, &ypt)?;
                        for alpha in 0..n {
                            let zx: Vec<Rational> = z.iter().chain(&x).cloned().collect();
                            let yx: Vec<Rational> = ypt.iter().chain(&x).cloned().collect();
                            let lhs = scenario.gamma(a, b)?.coeff(alpha).eval(&zx)?;
                            let inner = scenario.gamma(a, mid)?.coeff(alpha).eval(&yx)?;
                            let rhs = mat_mul(&h, &inner, m);
                            checks += 1;
                            if lhs != rhs {
                                let witness = json!({
                                    "labels": [a.as_str(), b.as_str(), mid.as_str()],
                                    "alpha": alpha + 1,
                                    "z": show_rationals(&z),
                                    "y": show_rationals(&ypt),
                                    "x": show_rationals(&x),
                                    "lhs": show_rationals(&lhs),
                                    "rhs": show_rationals(&rhs),
                                });
                                return Ok(VerificationResult::violated("3.20", trial + 1, witness)
                                    .with_stat("seed", seed)
                                    .with_stat("checks", checks));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(VerificationResult::verified("3.20", points)
        .with_stat("seed", seed)
        .with_stat("checks", checks))
}

/// `nabla_bc_W o nabla_ab_V` applied to `T`, computed by applying the
/// two-point derivative twice and, independently, from the expanded
/// coefficient formula. Both results live on the layout `(t, y, x)`.
pub fn compose_two_point(
    scenario: &TransportScenario,
    labels: [&crate::index_bracket::Label; 3],
    w: &VectorFieldOnBase,
    v: &VectorFieldOnBase,
    t: &BundleSection,
) -> Result<(Vec<Poly>, Vec<Poly>), TransportError> {
    let [a, b, c] = labels;
    check_label(a, t.label())?;
    let n = scenario.base_dim();
    let three = Layout::new(n, 3);
    let (tc_ab, g_ab) = (scenario.transport(a, b)?, scenario.gamma(a, b)?);
    let (tc_bc, g_bc) = (scenario.transport(b, c)?, scenario.gamma(b, c)?);
    let tx = three.embed_all(t.components(), 2)?;

    let inner = apply_formal(three, tc_ab.h(), g_ab.coeffs(), v, &tx, 1, 2)?;
    let direct = apply_formal(three, tc_bc.h(), g_bc.coeffs(), w, &inner, 0, 1)?;

    let m = scenario.fiber_dim();
    let h_ab = three.embed_matrix_pair(tc_ab.h(), 1, 2)?;
    let mut expanded = vec![Poly::zero(three.nvars()); m];
    for alpha in 0..n {
        let wa = three.embed(w.component(alpha), 1)?;
        if wa.is_zero() {
            continue;
        }
        let hx_bc = three.embed_matrix_pair(tc_bc.hx(alpha), 0, 1)?;
        let h_bc = three.embed_matrix_pair(tc_bc.h(), 0, 1)?;
        let g_bc_a = three.embed_matrix_pair(g_bc.coeff(alpha), 0, 1)?;
        let outer = g_bc_a.try_sub(&hx_bc)?;
        for beta in 0..n {
            let vb = three.embed(v.component(beta), 2)?;
            if vb.is_zero() {
                continue;
            }
            let g_ab_b = three.embed_matrix_pair(g_ab.coeff(beta), 1, 2)?;
            let dg = g_ab_b.diff(three.var(1, alpha))?;
            let t_coeff = hx_bc.try_mul(&g_ab_b)?.try_add(&h_bc.try_mul(&dg)?)?;
            let dt: Vec<Poly> = tx
                .iter()
                .map(|p| p.diff(three.var(2, beta)))
                .collect::<Result<_, _>>()?;
            let nabla_beta = add_vec(&h_ab.apply(&dt)?, &g_ab_b.apply(&tx)?);
            let term = add_vec(&t_coeff.apply(&tx)?, &outer.apply(&nabla_beta)?);
            expanded = add_vec(&expanded, &scale_vec(&term, &(&wa * &vb)));
        }
    }
    Ok((direct, expanded))
}
