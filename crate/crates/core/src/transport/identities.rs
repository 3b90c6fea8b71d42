use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exactmath::{Poly, PolyMatrix, Rational};
use crate::geometry::FIELD_NAMES;
use crate::index_bracket::{cyclic_sum, instantiate, IndexTuple, Label, TupleSum};
use crate::rng::Lcg64;
use crate::verification::VerificationResult;

use super::curvature::{direct_diagonal_composition, DiagonalCalculus, GenCurvatureComponents};
use super::family::BundleSection;
use super::ops::{
    add_vec, apply_formal, check_consistency, compose_two_point, is_zero_vec, mat_mul, random_point, scale_vec,
    show_rationals, show_vec, sub_vec, Layout,
};
use super::scenario::TransportScenario;
use super::{TransportError, VectorFieldOnBase};

const FIELD_DEGREE: u32 = 1;
const SECTION_DEGREE: u32 = 2;
const COEFF: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransportIdentity {
    Groupoid,
    IdentityTransport,
    DerivativeKillsTransport,
    DerivativeOfDerivative,
    TransportDerivativeConsistency,
    Consistency,
    TransportDerivativeCriterion,
    TwoPointComposition,
    DiagonalComposition,
    MixedCoefficientSymmetry,
    CurvatureOperator,
    SecondCurvatureVanishes,
    CurvatureSkew,
    CyclicOperator,
    ClassicalCurvature,
    Flatness,
}

impl TransportIdentity {
    pub const ALL: [TransportIdentity; 16] = [
        TransportIdentity::Groupoid,
        TransportIdentity::IdentityTransport,
        TransportIdentity::DerivativeKillsTransport,
        TransportIdentity::DerivativeOfDerivative,
        TransportIdentity::TransportDerivativeConsistency,
        TransportIdentity::Consistency,
        TransportIdentity::TransportDerivativeCriterion,
        TransportIdentity::TwoPointComposition,
        TransportIdentity::DiagonalComposition,
        TransportIdentity::MixedCoefficientSymmetry,
        TransportIdentity::CurvatureOperator,
        TransportIdentity::SecondCurvatureVanishes,
        TransportIdentity::CurvatureSkew,
        TransportIdentity::CyclicOperator,
        TransportIdentity::ClassicalCurvature,
        TransportIdentity::Flatness,
    ];

    pub fn id(self) -> &'static str {
        use TransportIdentity::*;
        match self {
            Groupoid => "3.2",
            IdentityTransport => "3.3",
            DerivativeKillsTransport => "3.15",
            DerivativeOfDerivative => "3.16",
            TransportDerivativeConsistency => "3.17",
            Consistency => "3.20",
            TransportDerivativeCriterion => "3.27",
            TwoPointComposition => "4.2",
            DiagonalComposition => "4.4",
            MixedCoefficientSymmetry => "4.6",
            CurvatureOperator => "4.7",
            SecondCurvatureVanishes => "4.10",
            CurvatureSkew => "4.11",
            CyclicOperator => "4.12",
            ClassicalCurvature => "classical",
            Flatness => "flatness",
        }
    }

    /// Only holds when the derivatives are consistent with the transports.
    pub fn needs_consistency(self) -> bool {
        self == TransportIdentity::Consistency
    }
}

impl fmt::Display for TransportIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TransportIdentity {
    type Err = TransportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TransportIdentity::ALL
            .into_iter()
            .find(|t| t.id() == s.trim())
            .ok_or_else(|| TransportError::UnknownIdentity(s.trim().to_string()))
    }
}

struct Draw {
    w: VectorFieldOnBase,
    v: VectorFieldOnBase,
    // components in the base variables, to be placed on a block
    t: Vec<Poly>,
}

impl Draw {
    fn new(scenario: &TransportScenario, seed: u64, trial: u64) -> Self {
        let (n, m) = (scenario.base_dim(), scenario.fiber_dim());
        let mut rng = Lcg64::fork(seed, trial);
        let w = VectorFieldOnBase::random(n, &mut rng, FIELD_DEGREE, COEFF);
        let v = VectorFieldOnBase::random(n, &mut rng, FIELD_DEGREE, COEFF);
        let t = (0..m).map(|_| rng.poly(n, SECTION_DEGREE, COEFF)).collect();
        Draw { w, v, t }
    }

    fn section(&self, label: &Label) -> BundleSection {
        BundleSection::new(label.clone(), self.t.clone())
    }

    fn describe(&self, names: &[String]) -> Value {
        json!({
            "W": self.w.to_string(),
            "V": self.v.to_string(),
            "T": show_vec(&self.t, names),
        })
    }
}

fn triples(labels: &[Label]) -> Vec<[&Label; 3]> {
    let mut out = Vec::new();
    for a in labels {
        for b in labels {
            for c in labels {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn label_names(labels: &[&Label]) -> Value {
    json!(labels.iter().map(|l| l.as_str()).collect::<Vec<_>>())
}

/// Collects the first failing instance while counting checks.
struct Outcome {
    id: &'static str,
    checks: u64,
    witness: Option<Value>,
}

impl Outcome {
    fn new(id: TransportIdentity) -> Self {
        Outcome {
            id: id.id(),
            checks: 0,
            witness: None,
        }
    }

    /// Records one check; returns true once a failure is known.
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) -> bool {
        self.checks += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
        self.witness.is_some()
    }

    fn finish(self, trials: u64, seed: u64) -> VerificationResult {
        VerificationResult::from_witness(self.id, trials, self.witness)
            .with_stat("seed", seed)
            .with_stat("checks", self.checks)
    }
}

/// Evaluates one identity on a scenario. `trials` random instances
/// (points, fields or sections) are drawn per label combination from
/// streams forked off `seed`.
pub fn verify_transport_identity(
    scenario: &TransportScenario,
    id: TransportIdentity,
    trials: u64,
    seed: u64,
) -> Result<VerificationResult, TransportError> {
    use TransportIdentity::*;
    let trials = trials.max(1);
    let result = match id {
        Groupoid => groupoid(scenario, trials, seed)?,
        IdentityTransport => identity_transport(scenario, trials, seed)?,
        DerivativeKillsTransport | DerivativeOfDerivative | TransportDerivativeConsistency => {
            transport_derivative_laws(scenario, id, trials, seed)?
        }
        Consistency => check_consistency(scenario, trials, seed)?,
        TransportDerivativeCriterion => criterion(scenario, trials, seed)?,
        TwoPointComposition => two_point(scenario, trials, seed)?,
        DiagonalComposition => diagonal(scenario, trials, seed)?,
        MixedCoefficientSymmetry => k_symmetry(scenario, seed)?,
        CurvatureOperator => curvature_operator(scenario, trials, seed)?,
        SecondCurvatureVanishes => second_curvature_vanishes(scenario, seed)?,
        CurvatureSkew => curvature_skew(scenario, seed)?,
        CyclicOperator => cyclic_operator(scenario, trials, seed)?,
        ClassicalCurvature => classical(scenario, seed)?,
        Flatness => flatness(scenario, seed)?,
    };
    Ok(result
        .with_stat("base_dim", scenario.base_dim() as u64)
        .with_stat("fiber_dim", scenario.fiber_dim() as u64)
        .with_stat("labels", scenario.labels().len() as u64))
}

fn groupoid(s: &TransportScenario, trials: u64, seed: u64) -> Result<VerificationResult, TransportError> {
    let labels = s.labels();
    let (n, m) = (s.base_dim(), s.fiber_dim());
    let mut out = Outcome::new(TransportIdentity::Groupoid);
    for trial in 0..trials {
        let mut rng = Lcg64::fork(seed, trial);
        let (z, y, x) = (random_point(&mut rng, n), random_point(&mut rng, n), random_point(&mut rng, n));
        for [a, b, c] in triples(&labels) {
            let lhs = mat_mul(&s.transport(b, c)?.eval(&z, &y)?, &s.transport(a, b)?.eval(&y, &x)?, m);
            let rhs = s.transport(a, c)?.eval(&z, &x)?;
            if out.check(lhs == rhs, || {
                json!({"labels": label_names(&[a, b, c]), "trial": trial,
                    "z": show_rationals(&z), "y": show_rationals(&y), "x": show_rationals(&x),
                    "lhs": show_rationals(&lhs), "rhs": show_rationals(&rhs)})
            }) {
                return Ok(out.finish(trials, seed));
            }
        }
    }
    Ok(out.finish(trials, seed))
}

fn identity_transport(s: &TransportScenario, trials: u64, seed: u64) -> Result<VerificationResult, TransportError> {
    let (n, m) = (s.base_dim(), s.fiber_dim());
    let one = PolyMatrix::identity(m, 0);
    let id: Vec<Rational> = one.entries().iter().map(|p| p.as_constant().expect("constant")).collect();
    let mut out = Outcome::new(TransportIdentity::IdentityTransport);
    for trial in 0..trials {
        let mut rng = Lcg64::fork(seed, trial);
        let x = random_point(&mut rng, n);
        for a in s.labels() {
            let h = s.transport(&a, &a)?.eval(&x, &x)?;
            if out.check(h == id, || json!({"label": a.as_str(), "x": show_rationals(&x), "value": show_rationals(&h)})) {
                return Ok(out.finish(trials, seed));
            }
        }
    }
    Ok(out.finish(trials, seed))
}

/// The three exact laws of the transport derivative, on the layout
/// `(z, y, x)`.
fn transport_derivative_laws(
    s: &TransportScenario,
    id: TransportIdentity,
    trials: u64,
    seed: u64,
) -> Result<VerificationResult, TransportError> {
    let n = s.base_dim();
    let three = Layout::new(n, 3);
    let names = three.names();
    let labels = s.labels();
    let mut out = Outcome::new(id);
    for trial in 0..trials {
        let draw = Draw::new(s, seed, trial);
        for [a, b, c] in triples(&labels) {
            let (ab, bc, ac) = (s.transport(a, b)?, s.transport(b, c)?, s.transport(a, c)?);
            let residual = match id {
                TransportIdentity::DerivativeKillsTransport => {
                    // I_y T is the section x -> H_ab(x, y) T(y)
                    let ty = three.embed_all(&draw.t, 1)?;
                    let moved = three.embed_matrix_pair(ab.h(), 2, 1)?.apply(&ty)?;
                    apply_formal(three, bc.h(), bc.hx_all(), &draw.v, &moved, 0, 2)?
                }
                TransportIdentity::DerivativeOfDerivative => {
                    let tx = three.embed_all(&draw.t, 2)?;
                    let inner = apply_formal(three, ab.h(), ab.hx_all(), &draw.w, &tx, 1, 2)?;
                    apply_formal(three, bc.h(), bc.hx_all(), &draw.v, &inner, 0, 1)?
                }
                _ => {
                    let tx = three.embed_all(&draw.t, 2)?;
                    let inner = apply_formal(three, ab.h(), ab.hx_all(), &draw.v, &tx, 1, 2)?;
                    let lhs = three.embed_matrix_pair(bc.h(), 0, 1)?.apply(&inner)?;
                    let rhs = apply_formal(three, ac.h(), ac.hx_all(), &draw.v, &tx, 0, 2)?;
                    sub_vec(&lhs, &rhs)
                }
            };
            if out.check(is_zero_vec(&residual), || {
                json!({"labels": label_names(&[a, b, c]), "trial": trial,
                    "inputs": draw.describe(&Poly::default_names(n)),
                    "residual": show_vec(&residual, &names)})
            }) {
                return Ok(out.finish(trials, seed));
            }
        }
    }
    Ok(out.finish(trials, seed))
}

/// `nabla_bc_V o I_y` equals `V^a (Gamma_bc,a - dH_bc/dx^a) H_ab(x,y) T(y)`,
/// so it vanishes exactly when the derivative is the transport derivative.
/// Checked on the scenario's derivatives and on the transport derivative.
fn criterion(s: &TransportScenario, trials: u64, seed: u64) -> Result<VerificationResult, TransportError> {
    let n = s.base_dim();
    let three = Layout::new(n, 3);
    let names = three.names();
    let labels = s.labels();
    let flat = s.with_transport_derivative();
    let mut out = Outcome::new(TransportIdentity::TransportDerivativeCriterion);
    let mut equal_pairs = 0u64;
    for (which, sc) in [("scenario", s), ("transport-derivative", &flat)] {
        for trial in 0..trials {
            let draw = Draw::new(s, seed, trial);
            let ty = three.embed_all(&draw.t, 1)?;
            for [a, b, c] in triples(&labels) {
                let (ab, bc, g) = (sc.transport(a, b)?, sc.transport(b, c)?, sc.gamma(b, c)?);
                let moved = three.embed_matrix_pair(ab.h(), 2, 1)?.apply(&ty)?;
                let composed = apply_formal(three, bc.h(), g.coeffs(), &draw.v, &moved, 0, 2)?;
                let mut formula = vec![Poly::zero(three.nvars()); moved.len()];
                let mut same = true;
                for alpha in 0..n {
                    let diff = g.coeff(alpha).try_sub(bc.hx(alpha))?;
                    same &= diff.is_zero();
                    let term = three.embed_matrix_pair(&diff, 0, 2)?.apply(&moved)?;
                    formula = add_vec(&formula, &scale_vec(&term, &three.embed(draw.v.component(alpha), 2)?));
                }
                if which == "scenario" && trial == 0 && a == b {
                    equal_pairs += same as u64;
                }
                let ok = composed == formula && is_zero_vec(&composed) == same;
                if out.check(ok, || {
                    json!({"derivative": which, "labels": label_names(&[a, b, c]), "trial": trial,
                        "gamma_equals_transport_derivative": same,
                        "composition": show_vec(&composed, &names),
                        "formula": show_vec(&formula, &names)})
                }) {
                    return Ok(out.finish(trials, seed));
                }
            }
        }
    }
    Ok(out
        .finish(trials, seed)
        .with_stat("pairs_equal_to_transport_derivative", equal_pairs))
}

fn two_point(s: &TransportScenario, trials: u64, seed: u64) -> Result<VerificationResult, TransportError> {
    let names = Layout::new(s.base_dim(), 3).names();
    let labels = s.labels();
    let mut out = Outcome::new(TransportIdentity::TwoPointComposition);
    for trial in 0..trials {
        let draw = Draw::new(s, seed, trial);
        for abc in triples(&labels) {
            let (direct, expanded) = compose_two_point(s, abc, &draw.w, &draw.v, &draw.section(abc[0]))?;
            if out.check(direct == expanded, || {
                json!({"labels": label_names(&abc), "trial": trial,
                    "inputs": draw.describe(&Poly::default_names(s.base_dim())),
                    "residual": show_vec(&sub_vec(&direct, &expanded), &names)})
            }) {
                return Ok(out.finish(trials, seed));
            }
        }
    }
    Ok(out.finish(trials, seed).with_stat("section_derivative_order", 1u64))
}

fn diagonal(s: &TransportScenario, trials: u64, seed: u64) -> Result<VerificationResult, TransportError> {
    let calc = DiagonalCalculus::new(s)?;
    let names = Poly::default_names(s.base_dim());
    let labels = s.labels();
    let mut out = Outcome::new(TransportIdentity::DiagonalComposition);
    for trial in 0..trials {
        let draw = Draw::new(s, seed, trial);
        for abc in triples(&labels) {
            let direct = direct_diagonal_composition(s, abc, &draw.w, &draw.v, &draw.section(abc[0]))?;
            let expanded = calc.expanded_composition(abc, &draw.w, &draw.v, &draw.t)?;
            if out.check(direct == expanded, || {
                json!({"labels": label_names(&abc), "trial": trial, "inputs": draw.describe(&names),
                    "residual": show_vec(&sub_vec(&direct, &expanded), &names)})
            }) {
                return Ok(out.finish(trials, seed));
            }
        }
    }
    Ok(out.finish(trials, seed))
}

/// `K` is symmetric in its lower pair and has the closed form
/// `G_alpha d^gamma_beta + G_beta d^gamma_alpha`, where `G` is
/// `Gamma_aa(x,x)` when all labels agree and `dH_ac/dx(x,x)` for the
/// transport derivative.
fn k_symmetry(s: &TransportScenario, seed: u64) -> Result<VerificationResult, TransportError> {
    let n = s.base_dim();
    let two = Layout::new(n, 2);
    let labels = s.labels();
    let mut out = Outcome::new(TransportIdentity::MixedCoefficientSymmetry);
    let flat = s.with_transport_derivative();
    let cases: Vec<(&str, &TransportScenario, Vec<[&Label; 3]>)> = vec![
        ("equal-labels", s, labels.iter().map(|a| [a, a, a]).collect()),
        ("transport-derivative", &flat, triples(&labels)),
    ];
    for (which, sc, combos) in cases {
        let calc = DiagonalCalculus::new(sc)?;
        for abc in combos {
            let [a, _, c] = abc;
            let k = calc.k_coefficients(abc)?;
            let g: Vec<PolyMatrix> = (0..n)
                .map(|al| {
                    let source = if which == "equal-labels" {
                        sc.gamma(a, a)?.coeff(al)
                    } else {
                        sc.transport(a, c)?.hx(al)
                    };
                    Ok(two.diagonal_matrix(source)?)
                })
                .collect::<Result<_, TransportError>>()?;
            for gamma in 0..n {
                for beta in 0..n {
                    for alpha in 0..n {
                        let here = &k[(gamma * n + beta) * n + alpha];
                        let mirror = &k[(gamma * n + alpha) * n + beta];
                        let mut closed = PolyMatrix::zeros(s.fiber_dim(), s.fiber_dim(), n);
                        if gamma == beta {
                            closed = closed.try_add(&g[alpha])?;
                        }
                        if gamma == alpha {
                            closed = closed.try_add(&g[beta])?;
                        }
                        if out.check(here == mirror && *here == closed, || {
                            json!({"case": which, "labels": label_names(&abc),
                                "gamma": gamma + 1, "beta": beta + 1, "alpha": alpha + 1,
                                "k": format!("{here:?}"), "k_swapped": format!("{mirror:?}"),
                                "closed_form": format!("{closed:?}")})
                        }) {
                            return Ok(out.finish(1, seed));
                        }
                    }
                }
            }
        }
    }
    Ok(out.finish(1, seed))
}

fn curvature_operator(s: &TransportScenario, trials: u64, seed: u64) -> Result<VerificationResult, TransportError> {
    let calc = DiagonalCalculus::new(s)?;
    let names = Poly::default_names(s.base_dim());
    let labels = s.labels();
    let mut out = Outcome::new(TransportIdentity::CurvatureOperator);
    for abc in triples(&labels) {
        let closed = calc.curvature(abc)?;
        let extracted = calc.extract_curvature(abc)?;
        if let Some(diff) = extracted.difference(&closed) {
            out.check(false, || json!({"labels": label_names(&abc), "extracted_vs_closed_form": diff}));
            return Ok(out.finish(trials, seed));
        }
        out.checks += 1;
        for trial in 0..trials {
            let draw = Draw::new(s, seed, trial);
            let lhs = calc.antisymmetrized(abc, &draw.w, &draw.v, &draw.t)?;
            let nablas = calc.own_nablas(abc[0], &draw.t)?;
            let rhs = add_vec(
                &closed.apply_r(&draw.w, &draw.v, &draw.t)?,
                &closed.apply_d(&draw.w, &draw.v, &nablas)?,
            );
            if out.check(lhs == rhs, || {
                json!({"labels": label_names(&abc), "trial": trial, "inputs": draw.describe(&names),
                    "residual": show_vec(&sub_vec(&lhs, &rhs), &names)})
            }) {
                return Ok(out.finish(trials, seed));
            }
        }
    }
    Ok(out.finish(trials, seed))
}

fn second_curvature_vanishes(s: &TransportScenario, seed: u64) -> Result<VerificationResult, TransportError> {
    let labels = s.labels();
    let mut out = Outcome::new(TransportIdentity::SecondCurvatureVanishes);
    let flat = s.with_transport_derivative();
    let cases: Vec<(&str, &TransportScenario, Vec<[&Label; 3]>)> = vec![
        ("equal-labels", s, labels.iter().map(|a| [a, a, a]).collect()),
        ("transport-derivative", &flat, triples(&labels)),
    ];
    for (which, sc, combos) in cases {
        let calc = DiagonalCalculus::new(sc)?;
        for abc in combos {
            let comps = calc.extract_curvature(abc)?;
            if out.check(comps.d_is_zero(), || json!({"case": which, "labels": label_names(&abc)})) {
                return Ok(out.finish(1, seed));
            }
        }
    }
    Ok(out.finish(1, seed))
}

fn curvature_skew(s: &TransportScenario, seed: u64) -> Result<VerificationResult, TransportError> {
    let calc = DiagonalCalculus::new(s)?;
    let labels = s.labels();
    let mut out = Outcome::new(TransportIdentity::CurvatureSkew);
    for abc in triples(&labels) {
        let comps = calc.extract_curvature(abc)?;
        let w = comps.antisymmetry_witness();
        if out.check(w.is_none(), || json!({"labels": label_names(&abc), "failure": w})) {
            break;
        }
    }
    Ok(out.finish(1, seed))
}

/// `nabla_cd_A o (R_abc(B,C) + D_abc(B,C) + I_bc o nabla_ab_[B,C])
///  - (R_bcd(B,C) + D_bcd(B,C) + I_cd o nabla_bc_[B,C]) o nabla_ab_A`.
fn grouped_summand(
    calc: &DiagonalCalculus,
    comps: &[&GenCurvatureComponents; 2],
    labels: [&Label; 4],
    fields: [&VectorFieldOnBase; 3],
    t: &[Poly],
) -> Result<Vec<Poly>, TransportError> {
    let [a, b, c, d] = labels;
    let [fa, fb, fc] = fields;
    let bc_bracket = crate::geometry::lie_bracket(fb, fc)?;
    let inner = add_vec(
        &add_vec(&comps[0].apply_r(fb, fc, t)?, &comps[0].apply_d(fb, fc, &calc.own_nablas(a, t)?)?),
        &calc.transport(b, c, &calc.nabla(a, b, &bc_bracket, t)?)?,
    );
    let first = calc.nabla(c, d, fa, &inner)?;
    let moved = calc.nabla(a, b, fa, t)?;
    let second = add_vec(
        &add_vec(&comps[1].apply_r(fb, fc, &moved)?, &comps[1].apply_d(fb, fc, &calc.own_nablas(b, &moved)?)?),
        &calc.transport(c, d, &calc.nabla(b, c, &bc_bracket, &moved)?)?,
    );
    Ok(sub_vec(&first, &second))
}

/// The same summand with the curvature brackets replaced by the operator
/// differences they stand for.
fn operator_summand(
    calc: &DiagonalCalculus,
    labels: [&Label; 4],
    fields: [&VectorFieldOnBase; 3],
    t: &[Poly],
) -> Result<Vec<Poly>, TransportError> {
    let [a, b, c, d] = labels;
    let [fa, fb, fc] = fields;
    let inner = sub_vec(&calc.composition([a, b, c], fb, fc, t)?, &calc.composition([a, b, c], fc, fb, t)?);
    let first = calc.nabla(c, d, fa, &inner)?;
    let moved = calc.nabla(a, b, fa, t)?;
    let second = sub_vec(&calc.composition([b, c, d], fb, fc, &moved)?, &calc.composition([b, c, d], fc, fb, &moved)?);
    Ok(sub_vec(&first, &second))
}

fn cyclic_operator(s: &TransportScenario, trials: u64, seed: u64) -> Result<VerificationResult, TransportError> {
    let calc = DiagonalCalculus::new(s)?;
    let (n, m) = (s.base_dim(), s.fiber_dim());
    let names = Poly::default_names(n);
    let labels = s.labels();
    let field_labels: Vec<Label> = FIELD_NAMES[..3].iter().map(|f| Label::new(f)).collect();
    let cyc = cyclic_sum(&TupleSum::singleton(IndexTuple::new(field_labels.clone())), &field_labels)
        .expect("distinct labels");
    let mut curvatures = std::collections::BTreeMap::new();
    for abc in triples(&labels) {
        curvatures.insert(abc, calc.curvature(abc)?);
    }
    let chains: Vec<[&Label; 4]> = triples(&labels)
        .into_iter()
        .flat_map(|[a, b, c]| labels.iter().map(move |d| [a, b, c, d]))
        .collect();
    let mut out = Outcome::new(TransportIdentity::CyclicOperator);
    let mut groupings_agree = true;
    for trial in 0..trials {
        let mut rng = Lcg64::fork(seed, trial);
        let fields: Vec<VectorFieldOnBase> =
            (0..3).map(|_| VectorFieldOnBase::random(n, &mut rng, FIELD_DEGREE, COEFF)).collect();
        let t: Vec<Poly> = (0..m).map(|_| rng.poly(n, SECTION_DEGREE + 1, COEFF)).collect();
        let evaluate = |chain: &[&Label; 4]| -> Result<(Vec<Poly>, bool), TransportError> {
            let [a, b, c, d] = *chain;
            let comps = [&curvatures[&[a, b, c]], &curvatures[&[b, c, d]]];
            let mut agree = true;
            let mut failure = None;
            let zero = BundleSection::new(d.clone(), vec![Poly::zero(n); m]);
            let total = instantiate(&cyc, zero.clone(), |tuple| {
                let pick = |k: usize| {
                    let pos = field_labels.iter().position(|l| *l == tuple.labels()[k]).expect("field");
                    &fields[pos]
                };
                let args = [pick(0), pick(1), pick(2)];
                let grouped = grouped_summand(&calc, &comps, *chain, args, &t);
                let operator = operator_summand(&calc, *chain, args, &t);
                match (grouped, operator) {
                    (Ok(g), Ok(o)) => {
                        agree &= g == o;
                        BundleSection::new(d.clone(), g)
                    }
                    (Err(e), _) | (_, Err(e)) => {
                        failure.get_or_insert(e);
                        zero.clone()
                    }
                }
            });
            match failure {
                Some(e) => Err(e),
                None => Ok((total.into_components(), agree)),
            }
        };
        let results: Vec<_> = chains.par_iter().map(evaluate).collect();
        for (chain, result) in chains.iter().zip(results) {
            let (residual, agree) = result?;
            groupings_agree &= agree;
            if out.check(is_zero_vec(&residual) && agree, || {
                json!({"labels": label_names(chain), "trial": trial,
                    "fields": fields.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                    "T": show_vec(&t, &names),
                    "groupings_agree": agree,
                    "residual": show_vec(&residual, &names)})
            }) {
                return Ok(out.finish(trials, seed).with_stat("groupings_agree", groupings_agree));
            }
        }
    }
    Ok(out.finish(trials, seed).with_stat("groupings_agree", groupings_agree))
}

/// For equal labels the first curvature is the curvature of the diagonal
/// connection `G = Gamma_aa(x,x)`:
/// `R_{beta alpha} = dG_alpha/dx^beta - dG_beta/dx^alpha + G_beta G_alpha - G_alpha G_beta`,
/// and the second curvature vanishes.
fn classical(s: &TransportScenario, seed: u64) -> Result<VerificationResult, TransportError> {
    let calc = DiagonalCalculus::new(s)?;
    let n = s.base_dim();
    let two = Layout::new(n, 2);
    let mut out = Outcome::new(TransportIdentity::ClassicalCurvature);
    for a in s.labels() {
        let comps = calc.extract_curvature([&a, &a, &a])?;
        let g: Vec<PolyMatrix> = s
            .gamma(&a, &a)?
            .coeffs()
            .iter()
            .map(|c| two.diagonal_matrix(c))
            .collect::<Result<_, _>>()?;
        for beta in 0..n {
            for alpha in 0..n {
                let expected = g[alpha]
                    .diff(beta)?
                    .try_sub(&g[beta].diff(alpha)?)?
                    .try_add(&g[beta].try_mul(&g[alpha])?)?
                    .try_sub(&g[alpha].try_mul(&g[beta])?)?;
                let got = comps.r(beta, alpha);
                if out.check(*got == expected && comps.d_is_zero(), || {
                    json!({"label": a.as_str(), "beta": beta + 1, "alpha": alpha + 1,
                        "extracted": format!("{got:?}"), "classical": format!("{expected:?}"),
                        "second_curvature_zero": comps.d_is_zero()})
                }) {
                    return Ok(out.finish(1, seed));
                }
            }
        }
    }
    Ok(out.finish(1, seed))
}

/// With the transport derivative every curvature vanishes. On the scenario
/// itself, a label whose diagonal coefficients equal `dH_aa/dx(x,x)` must
/// have zero curvature; the observed converse is reported as a statistic.
fn flatness(s: &TransportScenario, seed: u64) -> Result<VerificationResult, TransportError> {
    let n = s.base_dim();
    let two = Layout::new(n, 2);
    let labels = s.labels();
    let mut out = Outcome::new(TransportIdentity::Flatness);
    let flat = s.with_transport_derivative();
    let flat_calc = DiagonalCalculus::new(&flat)?;
    for abc in triples(&labels) {
        let comps = flat_calc.extract_curvature(abc)?;
        if out.check(comps.r_is_zero() && comps.d_is_zero(), || {
            json!({"case": "transport-derivative", "labels": label_names(&abc),
                "first_zero": comps.r_is_zero(), "second_zero": comps.d_is_zero()})
        }) {
            return Ok(out.finish(1, seed));
        }
    }
    let calc = DiagonalCalculus::new(s)?;
    let mut converse_holds = true;
    let mut flat_labels = 0u64;
    for a in &labels {
        let mut equal = true;
        for alpha in 0..n {
            let g = two.diagonal_matrix(s.gamma(a, a)?.coeff(alpha))?;
            let hx = two.diagonal_matrix(s.transport(a, a)?.hx(alpha))?;
            equal &= g == hx;
        }
        let r_zero = calc.extract_curvature([a, a, a])?.r_is_zero();
        flat_labels += r_zero as u64;
        converse_holds &= equal || !r_zero;
        if out.check(!equal || r_zero, || json!({"case": "scenario", "label": a.as_str(), "gamma_equals_transport_derivative": equal})) {
            break;
        }
    }
    Ok(out
        .finish(1, seed)
        .with_stat("zero_curvature_labels", flat_labels)
        .with_stat("converse_observed", converse_holds))
}
