use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::index_bracket::{cyclic_sum, instantiate, IndexTuple, Label, TupleSum};
use crate::rng::Lcg64;
use crate::verification::VerificationResult;

use super::{Calculus, Connection, GeometryError, PolyVectorField};

/// The curvature and torsion identities that can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeometryIdentity {
    CurvatureSkew,
    SecondBianchi,
    FourthOrderPrinted,
    CurvatureActionCycle,
    CommutatorTerms,
    CommutatorTermsRegrouped,
    TorsionSkew,
    FirstBianchi,
    TorsionFreeFirstBianchi,
    CurvatureTorsionAction,
    TorsionDerivativeCycle,
}

impl GeometryIdentity {
    pub const ALL: [GeometryIdentity; 11] = [
        GeometryIdentity::CurvatureSkew,
        GeometryIdentity::SecondBianchi,
        GeometryIdentity::FourthOrderPrinted,
        GeometryIdentity::CurvatureActionCycle,
        GeometryIdentity::CommutatorTerms,
        GeometryIdentity::CommutatorTermsRegrouped,
        GeometryIdentity::TorsionSkew,
        GeometryIdentity::FirstBianchi,
        GeometryIdentity::TorsionFreeFirstBianchi,
        GeometryIdentity::CurvatureTorsionAction,
        GeometryIdentity::TorsionDerivativeCycle,
    ];

    pub fn id(self) -> &'static str {
        match self {
            GeometryIdentity::CurvatureSkew => "2.2",
            GeometryIdentity::SecondBianchi => "2.3",
            GeometryIdentity::FourthOrderPrinted => "2.4",
            GeometryIdentity::CurvatureActionCycle => "2.5",
            GeometryIdentity::CommutatorTerms => "2.6",
            GeometryIdentity::CommutatorTermsRegrouped => "2.6'",
            GeometryIdentity::TorsionSkew => "2.7",
            GeometryIdentity::FirstBianchi => "2.8",
            GeometryIdentity::TorsionFreeFirstBianchi => "2.8tf",
            GeometryIdentity::CurvatureTorsionAction => "2.9",
            GeometryIdentity::TorsionDerivativeCycle => "2.9i",
        }
    }

    /// Only meaningful for torsion-free connections.
    pub fn needs_symmetric_connection(self) -> bool {
        self == GeometryIdentity::TorsionFreeFirstBianchi
    }

    /// Identities run by `--all`: everything that holds for any connection.
    pub fn general() -> Vec<GeometryIdentity> {
        GeometryIdentity::ALL
            .into_iter()
            .filter(|g| !g.needs_symmetric_connection())
            .collect()
    }

    /// Labels of the fields the identity reads.
    fn arity(self) -> usize {
        match self {
            GeometryIdentity::TorsionSkew => 2,
            GeometryIdentity::CurvatureSkew
            | GeometryIdentity::FirstBianchi
            | GeometryIdentity::TorsionFreeFirstBianchi => 3,
            GeometryIdentity::SecondBianchi
            | GeometryIdentity::CurvatureTorsionAction
            | GeometryIdentity::TorsionDerivativeCycle => 4,
            _ => 5,
        }
    }

    /// Labels permuted by the outer cyclic sum.
    fn cycled(self) -> usize {
        match self {
            GeometryIdentity::CurvatureSkew | GeometryIdentity::TorsionSkew => 2,
            GeometryIdentity::SecondBianchi
            | GeometryIdentity::FirstBianchi
            | GeometryIdentity::TorsionFreeFirstBianchi => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for GeometryIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for GeometryIdentity {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, GeometryError> {
        let normalized = s.trim().replace('\u{2032}', "'");
        GeometryIdentity::ALL
            .into_iter()
            .find(|g| g.id() == normalized)
            .ok_or_else(|| GeometryError::UnknownIdentity(s.to_string()))
    }
}

pub const FIELD_NAMES: [&str; 5] = ["A", "B", "C", "D", "E"];

/// Named vector fields `A..E`.
pub type FieldSet = BTreeMap<Label, PolyVectorField>;

fn summand(calc: &Calculus<'_>, id: GeometryIdentity, f: &[&PolyVectorField]) -> PolyVectorField {
    use GeometryIdentity::*;
    let r = |a: &PolyVectorField, b: &PolyVectorField, c: &PolyVectorField| calc.curvature_apply(a, b, c);
    let t = |a: &PolyVectorField, b: &PolyVectorField| calc.torsion(a, b);
    let br = |a: &PolyVectorField, b: &PolyVectorField| calc.lie_bracket(a, b);
    let nr = |a: &PolyVectorField, b: &PolyVectorField, c: &PolyVectorField, d: &PolyVectorField| {
        calc.nabla_r(a, b, c, d)
    };
    let nt = |a: &PolyVectorField, b: &PolyVectorField, c: &PolyVectorField| calc.nabla_t(a, b, c);
    let cov = |a: &PolyVectorField, b: &PolyVectorField| calc.cov_deriv(a, b);
    match id {
        CurvatureSkew => r(f[0], f[1], f[2]),
        TorsionSkew => t(f[0], f[1]),
        SecondBianchi => nr(f[0], f[1], f[2], f[3]).add(&r(&t(f[0], f[1]), f[2], f[3])),
        FirstBianchi => r(f[0], f[1], f[2])
            .sub(&nt(f[0], f[1], f[2]))
            .sub(&t(&t(f[0], f[1]), f[2])),
        TorsionFreeFirstBianchi => r(f[0], f[1], f[2]),
        CurvatureActionCycle => {
            let rab = calc.curvature(f[0], f[1]);
            calc.curvature_action_on_r(f[0], f[1], f[2], f[3], f[4])
                .add(&r(&rab.apply(f[2]), f[3], f[4]))
                .add(&r(f[2], &rab.apply(f[3]), f[4]))
        }
        CommutatorTerms => commutator_terms(calc, f),
        CommutatorTermsRegrouped => {
            let (a, b, e) = (f[0], f[1], f[4]);
            let x = br(f[2], f[3]);
            let local: BTreeMap<&str, &PolyVectorField> =
                [("X", &x), ("A", a), ("B", b)].into_iter().collect();
            let inner = TupleSum::singleton(IndexTuple::from_names(&["X", "A", "B"]));
            let cyc = cyclic_sum(&inner, &[Label::new("X"), Label::new("A"), Label::new("B")])
                .expect("distinct labels");
            instantiate(&cyc, PolyVectorField::zero(calc.dim()), |tuple| {
                let g: Vec<&PolyVectorField> = tuple.labels().iter().map(|l| local[l.as_str()]).collect();
                nr(g[0], g[1], g[2], e).add(&r(&t(g[0], g[1]), g[2], e))
            })
        }
        FourthOrderPrinted => {
            let (a, b, c, d, e) = (f[0], f[1], f[2], f[3], f[4]);
            calc.curvature_action_on_r(a, b, c, d, e)
                .add(&commutator_terms(calc, f))
                .add(&r(a, &r(c, b, d), e))
                .add(&r(a, &r(c, d, b), e))
        }
        CurvatureTorsionAction => {
            let (a, b, c, d) = (f[0], f[1], f[2], f[3]);
            let rab = calc.curvature(a, b);
            rab.apply(&t(c, d))
                .sub(&calc.curvature_action_on_t(a, b, c, d))
                .sub(&t(&rab.apply(c), d))
                .sub(&t(c, &rab.apply(d)))
        }
        TorsionDerivativeCycle => {
            let (a, b, c, d) = (f[0], f[1], f[2], f[3]);
            nt(a, &cov(b, c), d)
                .add(&nt(a, c, &cov(b, d)))
                .add(&nt(a, &cov(d, c), b))
                .add(&nt(a, c, &cov(d, b)))
        }
    }
}

/// The summand of the identity built only from commutator terms.
fn commutator_terms(calc: &Calculus<'_>, f: &[&PolyVectorField]) -> PolyVectorField {
    let (a, b, c, d, e) = (f[0], f[1], f[2], f[3], f[4]);
    let ab = calc.lie_bracket(a, b);
    let bc = calc.lie_bracket(b, c);
    let cd = calc.lie_bracket(c, d);
    calc.nabla_r(&ab, c, d, e)
        .add(&calc.nabla_r(a, b, &cd, e))
        .add(&calc.nabla_r(a, &bc, d, e))
        .sub(&calc.curvature_apply(a, &calc.torsion(b, &cd), e))
        .sub(&calc.curvature_apply(a, &calc.torsion(&bc, d), e))
        .add(&calc.curvature_apply(&calc.torsion(a, b), &cd, e))
}

/// The left side of an identity as an exact polynomial vector field.
pub fn evaluate_identity(
    calc: &Calculus<'_>,
    id: GeometryIdentity,
    fields: &FieldSet,
) -> Result<PolyVectorField, GeometryError> {
    let labels: Vec<Label> = FIELD_NAMES[..id.arity()].iter().map(|s| Label::new(s)).collect();
    for l in &labels {
        let f = fields
            .get(l)
            .ok_or_else(|| GeometryError::MissingField(l.to_string()))?;
        f.check(calc.dim())?;
    }
    let base = TupleSum::singleton(IndexTuple::new(labels.clone()));
    let cyc = cyclic_sum(&base, &labels[..id.cycled()]).expect("distinct labels");
    Ok(instantiate(&cyc, PolyVectorField::zero(calc.dim()), |tuple| {
        let args: Vec<&PolyVectorField> = tuple.labels().iter().map(|l| &fields[l]).collect();
        summand(calc, id, &args)
    }))
}

/// How the fields of each trial are produced: fixed fields are used as
/// given, missing ones are drawn at random.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub fixed: FieldSet,
    pub degree: u32,
    pub coeff: i64,
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec {
            fixed: FieldSet::new(),
            degree: 2,
            coeff: 3,
        }
    }
}

impl FieldSpec {
    pub fn fields_for_trial(&self, dim: usize, seed: u64, trial: u64) -> FieldSet {
        let mut rng = Lcg64::fork(seed, trial);
        FIELD_NAMES
            .iter()
            .map(|name| {
                let label = Label::new(name);
                let random = PolyVectorField::random(dim, &mut rng, self.degree, self.coeff);
                let f = self.fixed.get(&label).cloned().unwrap_or(random);
                (label, f)
            })
            .collect()
    }

    pub fn all_fixed(&self) -> bool {
        FIELD_NAMES.iter().all(|n| self.fixed.contains_key(&Label::new(n)))
    }
}

/// A connection together with the fields to test it on.
#[derive(Debug, Clone)]
pub struct GeometryScenario {
    pub connection: Connection,
    pub fields: FieldSpec,
}

impl GeometryScenario {
    /// Random connection with entries of degree `gamma_degree` and
    /// coefficients in `-coeff..=coeff`; random fields of degree
    /// `field_degree`.
    pub fn random(dim: usize, seed: u64, gamma_degree: u32, field_degree: u32, coeff: i64) -> Self {
        let mut rng = Lcg64::new(seed);
        GeometryScenario {
            connection: Connection::random(dim, &mut rng, gamma_degree, coeff),
            fields: FieldSpec {
                fixed: FieldSet::new(),
                degree: field_degree,
                coeff,
            },
        }
    }
}

const WITNESS_CHARS: usize = 2000;

fn clip(s: String) -> String {
    if s.len() <= WITNESS_CHARS {
        return s;
    }
    let mut cut = WITNESS_CHARS;
    while !s.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{} ...", &s[..cut])
}

/// Checks one identity on `trials` seeded field sets; each trial must give
/// the zero polynomial field.
pub fn verify_geometry_identity(
    scenario: &GeometryScenario,
    id: GeometryIdentity,
    trials: u64,
    seed: u64,
) -> Result<VerificationResult, GeometryError> {
    let conn = &scenario.connection;
    if id.needs_symmetric_connection() && !conn.is_symmetric() {
        return Err(GeometryError::NeedsTorsionFree(id.id().to_string()));
    }
    let trials = if scenario.fields.all_fixed() { 1 } else { trials.max(1) };
    let mut max_terms = 0;
    for trial in 0..trials {
        let fields = scenario.fields.fields_for_trial(conn.dim(), seed, trial);
        let calc = conn.calculus();
        let value = evaluate_identity(&calc, id, &fields)?;
        if !value.is_zero() {
            let named: serde_json::Map<String, Value> = fields
                .iter()
                .map(|(l, f)| (l.to_string(), json!(f.to_string())))
                .collect();
            let residual_terms: usize = value.components().iter().map(|p| p.len()).sum();
            let w = json!({
                "trial": trial,
                "fields": named,
                "residual": clip(value.to_string()),
                "residual_terms": residual_terms,
            });
            return Ok(VerificationResult::violated(id.id(), trial + 1, w).with_stat("dim", conn.dim()));
        }
        max_terms = max_terms.max(fields.values().map(|f| f.components().iter().map(|p| p.len()).sum::<usize>()).max().unwrap_or(0));
    }
    Ok(VerificationResult::verified(id.id(), trials)
        .with_stat("dim", conn.dim())
        .with_stat("seed", seed)
        .with_stat("max_field_terms", max_terms))
}
