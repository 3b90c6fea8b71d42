use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::exactmath::{Poly, PolyMatrix, Rational};
use crate::index_bracket::{IntegerCombination, Label};
use crate::rng::Lcg64;

use super::ops::Layout;
use super::TransportError;

/// One unipotent frame `F_a(x)` per bundle label, all `m x m` over `n`
/// base variables. Transports factor as `H_ab(y,x) = F_b(y)^-1 F_a(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameFamily {
    base_dim: usize,
    fiber_dim: usize,
    frames: BTreeMap<Label, PolyMatrix>,
}

impl FrameFamily {
    pub fn new(
        base_dim: usize,
        fiber_dim: usize,
        frames: BTreeMap<Label, PolyMatrix>,
    ) -> Result<Self, TransportError> {
        if frames.is_empty() {
            return Err(TransportError::Scenario("a frame family needs at least one label".into()));
        }
        for (label, f) in &frames {
            if f.rows() != fiber_dim || f.cols() != fiber_dim {
                return Err(TransportError::Dimension {
                    expected: fiber_dim,
                    found: if f.rows() != fiber_dim { f.rows() } else { f.cols() },
                });
            }
            if f.nvars() != base_dim {
                return Err(TransportError::Dimension {
                    expected: base_dim,
                    found: f.nvars(),
                });
            }
            if !f.is_unipotent() {
                return Err(TransportError::NotUnipotent(label.to_string()));
            }
        }
        Ok(FrameFamily {
            base_dim,
            fiber_dim,
            frames,
        })
    }

    pub fn identity(base_dim: usize, fiber_dim: usize, labels: &[Label]) -> Self {
        let frames = labels
            .iter()
            .map(|l| (l.clone(), PolyMatrix::identity(fiber_dim, base_dim)))
            .collect();
        FrameFamily {
            base_dim,
            fiber_dim,
            frames,
        }
    }

    /// Random unipotent frames, alternately upper and lower triangular so
    /// that transports between neighbours are genuinely full matrices.
    pub fn random(
        base_dim: usize,
        fiber_dim: usize,
        labels: &[Label],
        degree: u32,
        coeff: i64,
        rng: &mut Lcg64,
    ) -> Self {
        let frames = labels
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let mut f = PolyMatrix::identity(fiber_dim, base_dim);
                for i in 0..fiber_dim {
                    for j in 0..i {
                        let (r, c) = if k % 2 == 0 { (j, i) } else { (i, j) };
                        f.set(r, c, rng.poly(base_dim, degree, coeff));
                    }
                }
                (l.clone(), f)
            })
            .collect();
        FrameFamily {
            base_dim,
            fiber_dim,
            frames,
        }
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn labels(&self) -> Vec<Label> {
        self.frames.keys().cloned().collect()
    }

    pub fn frame(&self, label: &Label) -> Result<&PolyMatrix, TransportError> {
        self.frames
            .get(label)
            .ok_or_else(|| TransportError::UnknownLabel(label.to_string()))
    }

    /// Transport coefficients from bundle `a` to bundle `b`.
    pub fn transports(&self, a: &Label, b: &Label) -> Result<TransportCoeffs, TransportError> {
        let n = self.base_dim;
        let two = Layout::new(n, 2);
        let fa = two.embed_matrix(self.frame(a)?, 1)?;
        let fb_inv = two.embed_matrix(&self.frame(b)?.unipotent_inverse()?, 0)?;
        let h = fb_inv.try_mul(&fa)?;
        let hx = (0..n)
            .map(|alpha| h.diff(two.var(1, alpha)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TransportCoeffs {
            source: a.clone(),
            target: b.clone(),
            base_dim: n,
            h,
            hx,
        })
    }
}

/// `H_ab(y,x)` and its partials in `x`, over the two-point layout `(y, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportCoeffs {
    source: Label,
    target: Label,
    base_dim: usize,
    h: PolyMatrix,
    hx: Vec<PolyMatrix>,
}

impl TransportCoeffs {
    pub fn source(&self) -> &Label {
        &self.source
    }

    pub fn target(&self) -> &Label {
        &self.target
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.h.rows()
    }

    pub fn h(&self) -> &PolyMatrix {
        &self.h
    }

    /// `d H / d x^alpha`.
    pub fn hx(&self, alpha: usize) -> &PolyMatrix {
        &self.hx[alpha]
    }

    pub fn hx_all(&self) -> &[PolyMatrix] {
        &self.hx
    }

    /// `H(y, x)` evaluated at a pair of rational points.
    pub fn eval(&self, y: &[Rational], x: &[Rational]) -> Result<Vec<Rational>, TransportError> {
        let point: Vec<Rational> = y.iter().chain(x).cloned().collect();
        Ok(self.h.eval(&point)?)
    }
}

/// Coefficients `Gamma_ab^j_{i alpha}(y, x)` of a formal connection from
/// bundle `a` to bundle `b`, one `m x m` matrix per base direction.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalGamma {
    source: Label,
    target: Label,
    coeffs: Vec<PolyMatrix>,
}

impl FormalGamma {
    pub fn new(source: Label, target: Label, coeffs: Vec<PolyMatrix>) -> Result<Self, TransportError> {
        let n = coeffs.len();
        let m = coeffs.first().map_or(0, PolyMatrix::rows);
        for c in &coeffs {
            if c.rows() != m || c.cols() != m {
                return Err(TransportError::Dimension {
                    expected: m,
                    found: c.cols(),
                });
            }
            if c.nvars() != 2 * n {
                return Err(TransportError::Dimension {
                    expected: 2 * n,
                    found: c.nvars(),
                });
            }
        }
        Ok(FormalGamma {
            source,
            target,
            coeffs,
        })
    }

    /// Coefficients with no relation to the transports at all.
    pub fn random(
        source: Label,
        target: Label,
        base_dim: usize,
        fiber_dim: usize,
        degree: u32,
        coeff: i64,
        rng: &mut Lcg64,
    ) -> Self {
        let coeffs = (0..base_dim)
            .map(|_| {
                let entries = (0..fiber_dim * fiber_dim)
                    .map(|_| rng.poly(2 * base_dim, degree, coeff))
                    .collect();
                PolyMatrix::from_entries(fiber_dim, fiber_dim, entries).expect("square")
            })
            .collect();
        FormalGamma {
            source,
            target,
            coeffs,
        }
    }

    /// The coefficients of the transport derivative: `Gamma = dH/dx`.
    pub fn from_transport_derivative(tc: &TransportCoeffs) -> Self {
        FormalGamma {
            source: tc.source.clone(),
            target: tc.target.clone(),
            coeffs: tc.hx.clone(),
        }
    }

    pub fn source(&self) -> &Label {
        &self.source
    }

    pub fn target(&self) -> &Label {
        &self.target
    }

    pub fn base_dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, alpha: usize) -> &PolyMatrix {
        &self.coeffs[alpha]
    }

    pub fn coeffs(&self) -> &[PolyMatrix] {
        &self.coeffs
    }

    /// Adds `value` to entry `(row, col)` of the `alpha` coefficient.
    pub fn perturb(&mut self, alpha: usize, row: usize, col: usize, value: &Poly) {
        let c = &mut self.coeffs[alpha];
        let updated = c.get(row, col) + value;
        c.set(row, col, updated);
    }
}

/// A section of bundle `label`: `m` component polynomials in the base
/// variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSection {
    label: Label,
    components: Vec<Poly>,
}

impl BundleSection {
    pub fn new(label: Label, components: Vec<Poly>) -> Self {
        BundleSection { label, components }
    }

    pub fn random(label: Label, base_dim: usize, fiber_dim: usize, degree: u32, coeff: i64, rng: &mut Lcg64) -> Self {
        let components = (0..fiber_dim).map(|_| rng.poly(base_dim, degree, coeff)).collect();
        BundleSection { label, components }
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Poly> {
        self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        json!({
            "bundle": self.label.as_str(),
            "components": self.components.iter().map(|p| p.display_with(names).to_string()).collect::<Vec<_>>(),
        })
    }
}

impl IntegerCombination for BundleSection {
    fn add_scaled(&mut self, other: &Self, c: i64) {
        let c = Rational::from(c);
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            *a = &*a + &b.scale(&c);
        }
    }
}
