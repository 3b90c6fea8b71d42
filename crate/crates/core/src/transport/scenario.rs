use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::exactmath::{Poly, PolyMatrix};
use crate::index_bracket::Label;
use crate::rng::Lcg64;

use super::family::{FormalGamma, FrameFamily, TransportCoeffs};
use super::ops::{consistent_gamma_from_diagonal, Layout};
use super::TransportError;

/// How the formal connection coefficients of a random scenario are made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaKind {
    /// `Gamma_ab(y,x) = H_ab(y,x) Gamma_a(x)` from random diagonal data.
    Consistent,
    /// `Gamma_ab = dH_ab/dx`, i.e. the derivative equals the transport
    /// derivative.
    TransportDerivative,
    /// Independent random two-point coefficients for every pair.
    Arbitrary,
    /// Consistent, then `x1` added to one entry of one off-diagonal pair.
    Perturbed,
}

impl fmt::Display for GammaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaKind::Consistent => "consistent",
            GammaKind::TransportDerivative => "transport-derivative",
            GammaKind::Arbitrary => "arbitrary",
            GammaKind::Perturbed => "perturbed",
        })
    }
}

impl FromStr for GammaKind {
    type Err = TransportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "consistent" => Ok(GammaKind::Consistent),
            "transport-derivative" => Ok(GammaKind::TransportDerivative),
            "arbitrary" => Ok(GammaKind::Arbitrary),
            "perturbed" => Ok(GammaKind::Perturbed),
            other => Err(TransportError::Scenario(format!("unknown gamma kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportParams {
    pub base_dim: usize,
    pub fiber_dim: usize,
    pub labels: usize,
    pub frame_degree: u32,
    pub gamma_degree: u32,
    pub coeff: i64,
    pub kind: GammaKind,
    pub seed: u64,
}

impl Default for TransportParams {
    fn default() -> Self {
        TransportParams {
            base_dim: 2,
            fiber_dim: 2,
            labels: 4,
            frame_degree: 1,
            gamma_degree: 1,
            coeff: 2,
            kind: GammaKind::Consistent,
            seed: 0,
        }
    }
}

/// Frames, all pairwise transports and one formal connection per ordered
/// pair of labels.
#[derive(Clone, Debug)]
pub struct TransportScenario {
    frames: FrameFamily,
    transports: BTreeMap<(Label, Label), TransportCoeffs>,
    gammas: BTreeMap<(Label, Label), FormalGamma>,
}

fn all_transports(frames: &FrameFamily) -> Result<BTreeMap<(Label, Label), TransportCoeffs>, TransportError> {
    let labels = frames.labels();
    let mut out = BTreeMap::new();
    for a in &labels {
        for b in &labels {
            out.insert((a.clone(), b.clone()), frames.transports(a, b)?);
        }
    }
    Ok(out)
}

/// Bundle labels `a`, `b`, ... for random scenarios.
pub fn letter_labels(count: usize) -> Vec<Label> {
    (0..count)
        .map(|k| Label::new(&((b'a' + (k % 26) as u8) as char).to_string()))
        .collect()
}

impl TransportScenario {
    /// Uses the given coefficients, which must cover every ordered pair.
    pub fn new(
        frames: FrameFamily,
        gammas: BTreeMap<(Label, Label), FormalGamma>,
    ) -> Result<Self, TransportError> {
        let transports = all_transports(&frames)?;
        for (a, b) in transports.keys() {
            let g = gammas.get(&(a.clone(), b.clone())).ok_or_else(|| {
                TransportError::Scenario(format!("no connection coefficients for the pair ({a},{b})"))
            })?;
            if g.base_dim() != frames.base_dim() {
                return Err(TransportError::Dimension {
                    expected: frames.base_dim(),
                    found: g.base_dim(),
                });
            }
            if g.coeffs().iter().any(|c| c.rows() != frames.fiber_dim()) {
                return Err(TransportError::Dimension {
                    expected: frames.fiber_dim(),
                    found: g.coeff(0).rows(),
                });
            }
        }
        Ok(TransportScenario {
            frames,
            transports,
            gammas,
        })
    }

    /// Consistent coefficients from one diagonal family `Gamma_a(x)` per
    /// label.
    pub fn consistent(
        frames: FrameFamily,
        diagonal: &BTreeMap<Label, Vec<PolyMatrix>>,
    ) -> Result<Self, TransportError> {
        let transports = all_transports(&frames)?;
        let mut gammas = BTreeMap::new();
        for ((a, b), tc) in &transports {
            let diag = diagonal
                .get(a)
                .ok_or_else(|| TransportError::Scenario(format!("no diagonal coefficients for `{a}`")))?;
            gammas.insert((a.clone(), b.clone()), consistent_gamma_from_diagonal(tc, diag)?);
        }
        Ok(TransportScenario {
            frames,
            transports,
            gammas,
        })
    }

    /// Coefficients of the transport derivative for every pair.
    pub fn transport_derivative(frames: FrameFamily) -> Result<Self, TransportError> {
        let transports = all_transports(&frames)?;
        let gammas = transports
            .iter()
            .map(|(k, tc)| (k.clone(), FormalGamma::from_transport_derivative(tc)))
            .collect();
        Ok(TransportScenario {
            frames,
            transports,
            gammas,
        })
    }

    /// Same frames, with the derivative replaced by the transport derivative.
    pub fn with_transport_derivative(&self) -> Self {
        let gammas = self
            .transports
            .iter()
            .map(|(k, tc)| (k.clone(), FormalGamma::from_transport_derivative(tc)))
            .collect();
        TransportScenario {
            frames: self.frames.clone(),
            transports: self.transports.clone(),
            gammas,
        }
    }

    pub fn random(params: &TransportParams) -> Self {
        TransportScenario::random_with_labels(params, &letter_labels(params.labels))
    }

    /// Like [`TransportScenario::random`] with caller-chosen label names;
    /// `params.labels` is ignored.
    pub fn random_with_labels(params: &TransportParams, labels: &[Label]) -> Self {
        let (n, m) = (params.base_dim, params.fiber_dim);
        let mut rng = Lcg64::fork(params.seed, 0x7472_616e_7370);
        let frames = FrameFamily::random(n, m, labels, params.frame_degree, params.coeff, &mut rng);
        let random_diagonal = |rng: &mut Lcg64| -> BTreeMap<Label, Vec<PolyMatrix>> {
            labels
                .iter()
                .map(|l| {
                    let coeffs = (0..n)
                        .map(|_| {
                            let entries = (0..m * m)
                                .map(|_| rng.poly(n, params.gamma_degree, params.coeff))
                                .collect();
                            PolyMatrix::from_entries(m, m, entries).expect("square")
                        })
                        .collect();
                    (l.clone(), coeffs)
                })
                .collect()
        };
        let built = match params.kind {
            GammaKind::Consistent => TransportScenario::consistent(frames, &random_diagonal(&mut rng)),
            GammaKind::TransportDerivative => TransportScenario::transport_derivative(frames),
            GammaKind::Arbitrary => {
                let mut gammas = BTreeMap::new();
                for a in labels {
                    for b in labels {
                        let g = FormalGamma::random(
                            a.clone(),
                            b.clone(),
                            n,
                            m,
                            params.gamma_degree,
                            params.coeff,
                            &mut rng,
                        );
                        gammas.insert((a.clone(), b.clone()), g);
                    }
                }
                TransportScenario::new(frames, gammas)
            }
            GammaKind::Perturbed => {
                TransportScenario::consistent(frames, &random_diagonal(&mut rng)).map(|mut s| {
                    s.perturb_first_pair();
                    s
                })
            }
        };
        built.expect("randomly generated scenarios are well formed")
    }

    /// Adds `x1` to entry (1,1) of the first coefficient of the pair made
    /// of the first two labels (or the only label).
    pub fn perturb_first_pair(&mut self) {
        let labels = self.labels();
        let a = labels[0].clone();
        let b = labels.get(1).cloned().unwrap_or_else(|| a.clone());
        let n = self.base_dim();
        let two = Layout::new(n, 2);
        let x1 = Poly::var(two.nvars(), two.var(1, 0)).expect("in range");
        if let Some(g) = self.gammas.get_mut(&(a, b)) {
            g.perturb(0, 0, 0, &x1);
        }
    }

    pub fn frames(&self) -> &FrameFamily {
        &self.frames
    }

    pub fn labels(&self) -> Vec<Label> {
        self.frames.labels()
    }

    pub fn base_dim(&self) -> usize {
        self.frames.base_dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.frames.fiber_dim()
    }

    pub fn transport(&self, a: &Label, b: &Label) -> Result<&TransportCoeffs, TransportError> {
        self.transports
            .get(&(a.clone(), b.clone()))
            .ok_or_else(|| TransportError::UnknownLabel(format!("{a}->{b}")))
    }

    pub fn gamma(&self, a: &Label, b: &Label) -> Result<&FormalGamma, TransportError> {
        self.gammas
            .get(&(a.clone(), b.clone()))
            .ok_or_else(|| TransportError::UnknownLabel(format!("{a}->{b}")))
    }
}
