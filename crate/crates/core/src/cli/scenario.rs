//! Scenario files: line-oriented `key = value` text with `[section]`
//! headers and `#` comments.
//!
//! Geometry:
//!
//! ```text
//! kind = geometry
//! dim = 2
//! [generate]          # random connection; omit both sections for a flat one
//! seed = 11
//! gamma_degree = 2
//! [gamma]             # Gamma^k_{alpha beta}, 1-based k,alpha,beta
//! 1,1,2 = x2
//! [field.A]           # fixed vector field; missing fields are random
//! 1 = x1*x2
//! ```
//!
//! Transport:
//!
//! ```text
//! kind = transport
//! base_dim = 1
//! fiber_dim = 2
//! labels = a, b, c
//! gamma = consistent  # consistent | transport-derivative | arbitrary | perturbed
//! [frame.a]           # unipotent frame F_a(x), entries row,col; rest identity
//! 1,2 = x1
//! [diagonal.a]        # Gamma_a(x) for consistent data, entries alpha,row,col
//! 1,2,1 = 1
//! [gamma.a.b]         # two-point Gamma_ab(y,x) for arbitrary data
//! 1,1,1 = y1 - x1
//! ```
//!
//! A transport file without frame, diagonal or gamma sections is generated
//! at random from its `[generate]` block.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exactmath::{Poly, PolyMatrix};
use crate::geometry::{Connection, FieldSet, FieldSpec, GeometryScenario, PolyVectorField, FIELD_NAMES};
use crate::index_bracket::Label;
use crate::rng::Lcg64;
use crate::transport::{FormalGamma, FrameFamily, GammaKind, TransportParams, TransportScenario};

use super::parse::parse_poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

fn at(line: usize, column: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    // column of the first character of the value
    value_column: usize,
}

#[derive(Debug, Clone)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), ScenarioError> {
        match self.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
            Some(e) => Err(at(e.line, 1, format!("unknown key `{}`", e.key))),
            None => Ok(()),
        }
    }

    fn int<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ScenarioError> {
        self.get(key)
            .map(|e| {
                e.value
                    .parse()
                    .map_err(|_| at(e.line, e.value_column, format!("`{key}` must be a non-negative integer")))
            })
            .transpose()
    }

    fn required_int<T: std::str::FromStr>(&self, key: &str) -> Result<T, ScenarioError> {
        self.int(key)?
            .ok_or_else(|| ScenarioError::Invalid(format!("missing `{key}` in the header")))
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>, ScenarioError> {
    let mut sections = vec![Section {
        name: String::new(),
        line: 0,
        entries: Vec::new(),
    }];
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| at(line, indent + trimmed.len() + 1, "expected `]`"))?
                .trim()
                .to_string();
            if let Some(prev) = sections.iter().find(|s| s.name == name) {
                return Err(at(
                    line,
                    indent + 1,
                    format!("section [{name}] already defined on line {}", prev.line),
                ));
            }
            sections.push(Section {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let eq = content
            .find('=')
            .ok_or_else(|| at(line, indent + 1, "expected `key = value`"))?;
        let key: String = content[..eq].split_whitespace().collect();
        let after = &content[eq + 1..];
        let value = after.trim().to_string();
        if key.is_empty() {
            return Err(at(line, indent + 1, "missing key"));
        }
        if value.is_empty() {
            return Err(at(line, eq + 2, "missing value"));
        }
        let section = sections.last_mut().expect("header section");
        if let Some(prev) = section.get(&key) {
            return Err(at(
                line,
                indent + 1,
                format!("`{key}` already defined on line {}", prev.line),
            ));
        }
        let value_column = eq + 2 + (after.len() - after.trim_start().len());
        section.entries.push(Entry {
            key,
            value,
            line,
            value_column,
        });
    }
    Ok(sections)
}

/// Parses a polynomial value, translating its error position into a
/// file column.
fn poly_value(e: &Entry, n: usize, two_point: bool) -> Result<Poly, ScenarioError> {
    parse_poly(&e.value, n, two_point).map_err(|p| at(e.line, e.value_column + p.position, p.message))
}

/// A comma-separated 1-based index key such as `1,2,1`, converted to
/// 0-based and checked against `bounds`.
fn index_key(e: &Entry, bounds: &[(usize, &str)]) -> Result<Vec<usize>, ScenarioError> {
    let parts: Vec<&str> = e.key.split(',').collect();
    if parts.len() != bounds.len() {
        let names: Vec<&str> = bounds.iter().map(|b| b.1).collect();
        return Err(at(
            e.line,
            1,
            format!("key `{}` should have the form {}", e.key, names.join(",")),
        ));
    }
    parts
        .iter()
        .zip(bounds)
        .map(|(p, (bound, name))| match p.parse::<usize>() {
            Ok(i) if (1..=*bound).contains(&i) => Ok(i - 1),
            _ => Err(at(
                e.line,
                1,
                format!("{name} `{p}` in `{}` is outside 1..{bound}", e.key),
            )),
        })
        .collect()
}

/// Generation block of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    /// When absent the command-line seed is used.
    pub seed: Option<u64>,
    pub frame_degree: u32,
    pub gamma_degree: u32,
    pub field_degree: u32,
    pub coeff: i64,
    pub symmetric: bool,
}

impl Default for Generation {
    fn default() -> Self {
        Generation {
            seed: None,
            frame_degree: 1,
            gamma_degree: 2,
            field_degree: 2,
            coeff: 3,
            symmetric: false,
        }
    }
}

fn generation(section: Option<&Section>, defaults: Generation) -> Result<Generation, ScenarioError> {
    let Some(s) = section else {
        return Ok(defaults);
    };
    s.check_keys(&["seed", "frame_degree", "gamma_degree", "field_degree", "coeff", "symmetric"])?;
    let symmetric = match s.get("symmetric") {
        None => defaults.symmetric,
        Some(e) => match e.value.as_str() {
            "true" => true,
            "false" => false,
            _ => return Err(at(e.line, e.value_column, "`symmetric` must be true or false")),
        },
    };
    Ok(Generation {
        seed: s.int("seed")?,
        frame_degree: s.int("frame_degree")?.unwrap_or(defaults.frame_degree),
        gamma_degree: s.int("gamma_degree")?.unwrap_or(defaults.gamma_degree),
        field_degree: s.int("field_degree")?.unwrap_or(defaults.field_degree),
        coeff: s.int("coeff")?.unwrap_or(defaults.coeff),
        symmetric,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConnectionSource {
    Flat,
    Random,
    Explicit(Vec<Poly>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryDefinition {
    pub dim: usize,
    pub generation: Generation,
    pub connection: ConnectionSource,
    pub fields: FieldSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportDefinition {
    pub base_dim: usize,
    pub fiber_dim: usize,
    pub labels: Vec<Label>,
    pub kind: GammaKind,
    pub generation: Generation,
    /// Explicit frames, diagonal and two-point coefficients; `None` means
    /// everything is generated.
    pub explicit: Option<ExplicitTransport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitTransport {
    pub frames: BTreeMap<Label, PolyMatrix>,
    pub diagonal: BTreeMap<Label, Vec<PolyMatrix>>,
    pub gammas: BTreeMap<(Label, Label), Vec<PolyMatrix>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioBody {
    Geometry(GeometryDefinition),
    Transport(TransportDefinition),
}

/// A parsed scenario file together with the digest of its text.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub digest: String,
    pub body: ScenarioBody,
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let sections = split_sections(text)?;
        let header = &sections[0];
        let kind = header
            .get("kind")
            .ok_or_else(|| ScenarioError::Invalid("missing `kind` in the header".into()))?;
        let body = match kind.value.as_str() {
            "geometry" => ScenarioBody::Geometry(parse_geometry(&sections)?),
            "transport" => ScenarioBody::Transport(parse_transport(&sections)?),
            other => {
                return Err(at(
                    kind.line,
                    kind.value_column,
                    format!("unknown kind `{other}` (expected geometry or transport)"),
                ))
            }
        };
        Ok(Scenario {
            digest: digest(text),
            body,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text)
    }
}

fn parse_geometry(sections: &[Section]) -> Result<GeometryDefinition, ScenarioError> {
    let header = &sections[0];
    header.check_keys(&["kind", "dim"])?;
    let dim: usize = header.required_int("dim")?;
    if dim == 0 || dim > crate::exactmath::MAX_VARS {
        return Err(ScenarioError::Invalid(format!("dim = {dim} is outside 1..{}", crate::exactmath::MAX_VARS)));
    }
    let mut gen_section = None;
    let mut gamma_section = None;
    let mut fields = FieldSet::new();
    for s in &sections[1..] {
        if s.name == "generate" {
            gen_section = Some(s);
        } else if s.name == "gamma" {
            gamma_section = Some(s);
        } else if let Some(name) = s.name.strip_prefix("field.") {
            if !FIELD_NAMES.contains(&name) {
                return Err(at(s.line, 1, format!("unknown field `{name}` (expected one of A..E)")));
            }
            let mut comps = vec![Poly::zero(dim); dim];
            for e in &s.entries {
                let k = index_key(e, &[(dim, "component")])?[0];
                comps[k] = poly_value(e, dim, false)?;
            }
            let field = PolyVectorField::new(comps).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
            fields.insert(Label::new(name), field);
        } else {
            return Err(at(s.line, 1, format!("unknown section [{}]", s.name)));
        }
    }
    let generation = generation(gen_section, Generation::default())?;
    let connection = match (gamma_section, gen_section) {
        (Some(g), None) => {
            let mut entries = vec![Poly::zero(dim); dim * dim * dim];
            for e in &g.entries {
                let idx = index_key(e, &[(dim, "k"), (dim, "alpha"), (dim, "beta")])?;
                entries[(idx[0] * dim + idx[1]) * dim + idx[2]] = poly_value(e, dim, false)?;
            }
            ConnectionSource::Explicit(entries)
        }
        (Some(g), Some(_)) => {
            return Err(at(g.line, 1, "[gamma] and [generate] cannot both define the connection"));
        }
        (None, Some(_)) => ConnectionSource::Random,
        (None, None) => ConnectionSource::Flat,
    };
    Ok(GeometryDefinition {
        dim,
        generation,
        connection,
        fields,
    })
}

impl GeometryDefinition {
    pub fn build(&self, seed: u64) -> Result<GeometryScenario, ScenarioError> {
        let g = &self.generation;
        let connection = match &self.connection {
            ConnectionSource::Flat => Connection::flat(self.dim),
            ConnectionSource::Explicit(entries) => {
                Connection::new(self.dim, entries.clone()).map_err(|e| ScenarioError::Invalid(e.to_string()))?
            }
            ConnectionSource::Random => {
                let mut rng = Lcg64::new(g.seed.unwrap_or(seed));
                if g.symmetric {
                    Connection::random_symmetric(self.dim, &mut rng, g.gamma_degree, g.coeff)
                } else {
                    Connection::random(self.dim, &mut rng, g.gamma_degree, g.coeff)
                }
            }
        };
        Ok(GeometryScenario {
            connection,
            fields: FieldSpec {
                fixed: self.fields.clone(),
                degree: g.field_degree,
                coeff: g.coeff,
            },
        })
    }
}

fn label_in<'a>(labels: &'a [Label], name: &str, line: usize) -> Result<&'a Label, ScenarioError> {
    labels
        .iter()
        .find(|l| l.as_str() == name)
        .ok_or_else(|| at(line, 1, format!("label `{name}` is not listed in `labels`")))
}

fn parse_transport(sections: &[Section]) -> Result<TransportDefinition, ScenarioError> {
    let header = &sections[0];
    header.check_keys(&["kind", "base_dim", "fiber_dim", "labels", "gamma"])?;
    let n: usize = header.required_int("base_dim")?;
    let m: usize = header.required_int("fiber_dim")?;
    if n == 0 || 3 * n > crate::exactmath::MAX_VARS {
        return Err(ScenarioError::Invalid(format!(
            "base_dim = {n} is outside 1..{}",
            crate::exactmath::MAX_VARS / 3
        )));
    }
    if m == 0 {
        return Err(ScenarioError::Invalid("fiber_dim must be positive".into()));
    }
    let labels_entry = header
        .get("labels")
        .ok_or_else(|| ScenarioError::Invalid("missing `labels` in the header".into()))?;
    let mut labels: Vec<Label> = Vec::new();
    for name in labels_entry.value.split(',').map(str::trim) {
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(at(labels_entry.line, labels_entry.value_column, format!("bad label `{name}`")));
        }
        if labels.iter().any(|l| l.as_str() == name) {
            return Err(at(labels_entry.line, labels_entry.value_column, format!("label `{name}` listed twice")));
        }
        labels.push(Label::new(name));
    }
    let kind = match header.get("gamma") {
        None => GammaKind::Consistent,
        Some(e) => e
            .value
            .parse()
            .map_err(|err: crate::transport::TransportError| at(e.line, e.value_column, err.to_string()))?,
    };

    let defaults = Generation {
        gamma_degree: 1,
        coeff: 2,
        ..Generation::default()
    };
    let mut gen_section = None;
    let mut frames = BTreeMap::new();
    let mut diagonal = BTreeMap::new();
    let mut gammas = BTreeMap::new();
    let matrices = |s: &Section, two_point: bool| -> Result<Vec<PolyMatrix>, ScenarioError> {
        let nvars = if two_point { 2 * n } else { n };
        let mut out = vec![PolyMatrix::zeros(m, m, nvars); n];
        for e in &s.entries {
            let idx = index_key(e, &[(n, "alpha"), (m, "row"), (m, "col")])?;
            out[idx[0]].set(idx[1], idx[2], poly_value(e, n, two_point)?);
        }
        Ok(out)
    };
    for s in &sections[1..] {
        if s.name == "generate" {
            gen_section = Some(s);
        } else if let Some(name) = s.name.strip_prefix("frame.") {
            let label = label_in(&labels, name, s.line)?;
            let mut f = PolyMatrix::identity(m, n);
            for e in &s.entries {
                let idx = index_key(e, &[(m, "row"), (m, "col")])?;
                f.set(idx[0], idx[1], poly_value(e, n, false)?);
            }
            if !f.is_unipotent() {
                return Err(at(s.line, 1, format!("frame `{name}` is not unipotent triangular")));
            }
            frames.insert(label.clone(), f);
        } else if let Some(name) = s.name.strip_prefix("diagonal.") {
            let label = label_in(&labels, name, s.line)?;
            diagonal.insert(label.clone(), matrices(s, false)?);
        } else if let Some(pair) = s.name.strip_prefix("gamma.") {
            let (a, b) = pair
                .split_once('.')
                .ok_or_else(|| at(s.line, 1, "expected a section name [gamma.<a>.<b>]"))?;
            let key = (label_in(&labels, a, s.line)?.clone(), label_in(&labels, b, s.line)?.clone());
            gammas.insert(key, matrices(s, true)?);
        } else {
            return Err(at(s.line, 1, format!("unknown section [{}]", s.name)));
        }
    }
    let uses_diagonal = matches!(kind, GammaKind::Consistent | GammaKind::Perturbed);
    if !diagonal.is_empty() && !uses_diagonal {
        return Err(ScenarioError::Invalid(format!("[diagonal.*] sections are not used by gamma = {kind}")));
    }
    if !gammas.is_empty() && kind != GammaKind::Arbitrary {
        return Err(ScenarioError::Invalid(format!("[gamma.*] sections are not used by gamma = {kind}")));
    }
    let explicit = if frames.is_empty() && diagonal.is_empty() && gammas.is_empty() {
        None
    } else {
        if gen_section.is_some() {
            return Err(ScenarioError::Invalid(
                "explicit frames or coefficients cannot be combined with [generate]".into(),
            ));
        }
        for l in &labels {
            frames.entry(l.clone()).or_insert_with(|| PolyMatrix::identity(m, n));
        }
        Some(ExplicitTransport {
            frames,
            diagonal,
            gammas,
        })
    };
    Ok(TransportDefinition {
        base_dim: n,
        fiber_dim: m,
        labels,
        kind,
        generation: generation(gen_section, defaults)?,
        explicit,
    })
}

impl TransportDefinition {
    pub fn build(&self, seed: u64) -> Result<TransportScenario, ScenarioError> {
        let invalid = |e: crate::transport::TransportError| ScenarioError::Invalid(e.to_string());
        let (n, m) = (self.base_dim, self.fiber_dim);
        let Some(ex) = &self.explicit else {
            let g = &self.generation;
            return Ok(TransportScenario::random_with_labels(
                &TransportParams {
                    base_dim: n,
                    fiber_dim: m,
                    labels: self.labels.len(),
                    frame_degree: g.frame_degree,
                    gamma_degree: g.gamma_degree,
                    coeff: g.coeff,
                    kind: self.kind,
                    seed: g.seed.unwrap_or(seed),
                },
                &self.labels,
            ));
        };
        let frames = FrameFamily::new(n, m, ex.frames.clone()).map_err(invalid)?;
        let diagonal: BTreeMap<Label, Vec<PolyMatrix>> = self
            .labels
            .iter()
            .map(|l| {
                let d = ex.diagonal.get(l).cloned();
                (l.clone(), d.unwrap_or_else(|| vec![PolyMatrix::zeros(m, m, n); n]))
            })
            .collect();
        match self.kind {
            GammaKind::Consistent => TransportScenario::consistent(frames, &diagonal).map_err(invalid),
            GammaKind::Perturbed => {
                let mut s = TransportScenario::consistent(frames, &diagonal).map_err(invalid)?;
                s.perturb_first_pair();
                Ok(s)
            }
            GammaKind::TransportDerivative => TransportScenario::transport_derivative(frames).map_err(invalid),
            GammaKind::Arbitrary => {
                let mut gammas = BTreeMap::new();
                for a in &self.labels {
                    for b in &self.labels {
                        let coeffs = ex
                            .gammas
                            .get(&(a.clone(), b.clone()))
                            .cloned()
                            .unwrap_or_else(|| vec![PolyMatrix::zeros(m, m, 2 * n); n]);
                        let g = FormalGamma::new(a.clone(), b.clone(), coeffs).map_err(invalid)?;
                        gammas.insert((a.clone(), b.clone()), g);
                    }
                }
                TransportScenario::new(frames, gammas).map_err(invalid)
            }
        }
    }
}
