//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every comparison is exact (zero residual); the only tolerances are the
//! runtime budgets below. A criterion listed in `KNOWN_RED` may print FAIL
//! without failing the test, but only with exactly the documented failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use genjacobi::cli::{Scenario, ScenarioBody};
use genjacobi::exactmath::{Poly, PolyMatrix, Rational};
use genjacobi::geometry::{verify_geometry_identity, Connection, GeometryIdentity, GeometryScenario, PolyVectorField};
use genjacobi::index_bracket::Label;
use genjacobi::jacobi_verify::{verify_identity15_formal, verify_pth_jacobi_matrix, verify_pth_jacobi_symbolic, verify_reduction};
use genjacobi::rng::Lcg64;
use genjacobi::transport::{
    verify_transport_identity, DiagonalCalculus, GammaKind, Layout, TransportIdentity, TransportParams,
    TransportScenario,
};

const IDENTITY15_BUDGET: Duration = Duration::from_secs(1);
const JACOBI_P6_BUDGET: Duration = Duration::from_secs(10);
const GEOMETRY_BUDGET: Duration = Duration::from_secs(60);

/// Criterion 5 is red: the expression labelled 2.9i is not identically
/// zero for connections with torsion. Every other identity must pass.
const KNOWN_RED: &[u32] = &[5];

struct Line {
    number: u32,
    pass: bool,
    // the failure matches the documented deviation
    expected_red: bool,
}

fn report(number: u32, pass: bool, summary: &str, detail: String) -> Line {
    let mut out = std::io::stdout().lock();
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "[criterion {number:>2}] {verdict}  {summary}  ({detail})");
    Line {
        number,
        pass,
        expected_red: false,
    }
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let results: Vec<_> = (2..=4).map(|p| verify_identity15_formal(p).unwrap()).collect();
    let elapsed = start.elapsed();
    let ok = results.iter().all(|r| r.is_verified()) && elapsed < IDENTITY15_BUDGET;
    report(
        1,
        ok,
        "reversed-tail identity cancels formally for p = 2, 3, 4",
        format!("empty tuple sums: {}, {elapsed:.2?} < {IDENTITY15_BUDGET:?}", results.iter().filter(|r| r.is_verified()).count()),
    )
}

fn criterion_2() -> Line {
    let mut ok = true;
    let mut p6 = Duration::ZERO;
    let mut sizes = Vec::new();
    for p in 2..=6 {
        let start = Instant::now();
        let r = verify_pth_jacobi_symbolic(p).unwrap();
        if p == 6 {
            p6 = start.elapsed();
        }
        ok &= r.is_verified() && r.stats["residual_terms"] == 0;
        sizes.push(format!("p={p}:{}", r.stats["lhs_words"]));
    }
    ok &= p6 < JACOBI_P6_BUDGET;
    report(
        2,
        ok,
        "p-th Jacobi identity exact in the free algebra, p = 2..6",
        format!("residual 0, expanded words {}, p=6 in {p6:.2?} < {JACOBI_P6_BUDGET:?}", sizes.join(" ")),
    )
}

fn criterion_3() -> Line {
    let mut ok = true;
    let mut runs = 0;
    for p in 2..=5 {
        for dim in 2..=4 {
            let r = verify_pth_jacobi_matrix(p, dim, 20, 1000 + (p * 10 + dim) as u64).unwrap();
            ok &= r.is_verified() && r.trials == 20;
            runs += 1;
        }
    }
    report(
        3,
        ok,
        "matrix commutators: LHS = p * RHS exactly",
        format!("{runs} (p, dim) pairs x 20 seeded trials"),
    )
}

fn criterion_4() -> Line {
    let results: Vec<_> = (2..=4).map(|p| verify_reduction(p).unwrap()).collect();
    let ok = results.iter().all(|r| r.is_verified());
    let factors: Vec<String> = results.iter().map(|r| r.stats["factor"].to_string()).collect();
    report(
        4,
        ok,
        "product-word instantiation reproduces the order-2/3/4 cyclic identities",
        format!("factors {}", factors.join(", ")),
    )
}

fn criterion_5() -> Line {
    use GeometryIdentity::*;
    let ids = [
        CurvatureSkew,
        SecondBianchi,
        CurvatureActionCycle,
        CommutatorTerms,
        CommutatorTermsRegrouped,
        TorsionSkew,
        FirstBianchi,
        CurvatureTorsionAction,
        TorsionDerivativeCycle,
    ];
    let start = Instant::now();
    let mut failures: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    let seeds: Vec<(usize, u64)> = (1..=5).map(|s| (2, s)).chain((6..=10).map(|s| (3, s))).collect();
    for &(n, seed) in &seeds {
        let scenario = GeometryScenario::random(n, seed, 2, 2, 3);
        for id in ids {
            let r = verify_geometry_identity(&scenario, id, 1, seed).unwrap();
            if !r.is_verified() {
                failures.entry(id.id()).or_default().push(seed);
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < GEOMETRY_BUDGET;
    let mut line = report(
        5,
        ok,
        "geometry identities on 10 random connections (n = 2, 3)",
        format!(
            "violated: {}; other identities all zero; {elapsed:.1?} < {GEOMETRY_BUDGET:?}",
            if failures.is_empty() {
                "none".to_string()
            } else {
                failures.iter().map(|(id, s)| format!("{id} on {} scenarios", s.len())).collect::<Vec<_>>().join(", ")
            }
        ),
    );
    line.expected_red = failures.keys().eq(["2.9i"].iter()) && failures["2.9i"].len() == seeds.len() && elapsed < GEOMETRY_BUDGET;
    line
}

fn criterion_6() -> Line {
    let mut ok = true;
    for seed in 0..10u64 {
        let n = 2 + (seed % 2) as usize;
        let conn = Connection::random(n, &mut Lcg64::new(500 + seed), 2, 3);
        let e = |k: usize| PolyVectorField::coordinate(n, k);
        let g = |l: usize, a: usize, b: usize| conn.gamma(l, a, b).clone();
        for a in 0..n {
            for b in 0..n {
                let t = conn.torsion_op(&e(a), &e(b)).unwrap();
                for l in 0..n {
                    ok &= *t.component(l) == &g(l, a, b) - &g(l, b, a);
                }
                for k in 0..n {
                    let r = conn.curvature_op(&e(a), &e(b), &e(k)).unwrap();
                    for l in 0..n {
                        let mut expected = &g(l, b, k).diff(a).unwrap() - &g(l, a, k).diff(b).unwrap();
                        for m in 0..n {
                            expected = &expected + &(&(&g(l, a, m) * &g(m, b, k)) - &(&g(l, b, m) * &g(m, a, k)));
                        }
                        ok &= *r.component(l) == expected;
                    }
                }
            }
        }
    }
    report(
        6,
        ok,
        "operator curvature and torsion equal the coordinate formulas",
        "10 random connections, all coordinate fields".into(),
    )
}

fn transport_params(n: usize, m: usize, labels: usize, kind: GammaKind, seed: u64) -> TransportParams {
    TransportParams {
        base_dim: n,
        fiber_dim: m,
        labels,
        kind,
        seed,
        ..TransportParams::default()
    }
}

fn criterion_7() -> Line {
    use TransportIdentity::*;
    let families = [(1, 2), (1, 3), (2, 2), (2, 3), (1, 2)];
    let mut ok = true;
    let mut points = 0;
    for (k, &(n, m)) in families.iter().enumerate() {
        let s = TransportScenario::random(&transport_params(n, m, 4, GammaKind::Consistent, 70 + k as u64));
        for id in [Groupoid, IdentityTransport] {
            let r = verify_transport_identity(&s, id, 10, k as u64).unwrap();
            ok &= r.is_verified() && r.trials == 10;
            points += r.trials;
        }
        for id in [DerivativeKillsTransport, DerivativeOfDerivative, TransportDerivativeConsistency] {
            ok &= verify_transport_identity(&s, id, 2, k as u64).unwrap().is_verified();
        }
    }
    report(
        7,
        ok,
        "transport groupoid laws and transport-derivative identities",
        format!("5 frame families, |labels| = 4, {points} point draws, exact polynomial checks"),
    )
}

fn criterion_8() -> Line {
    use TransportIdentity::*;
    let mut ok = true;
    let mut failures = Vec::new();
    for (k, kind) in [GammaKind::Consistent, GammaKind::Arbitrary, GammaKind::Perturbed].into_iter().enumerate() {
        let s = TransportScenario::random(&transport_params(2, 2, 3, kind, 80 + k as u64));
        for (id, trials) in [
            (TwoPointComposition, 3),
            (DiagonalComposition, 3),
            (MixedCoefficientSymmetry, 1),
            (SecondCurvatureVanishes, 1),
            (CurvatureSkew, 1),
            (CurvatureOperator, 10),
        ] {
            let r = verify_transport_identity(&s, id, trials, 8).unwrap();
            if !r.is_verified() {
                failures.push(format!("{id} on {kind}"));
            }
            ok &= r.is_verified();
        }
    }
    report(
        8,
        ok,
        "generalized curvature: expansions, symmetry, vanishing, skewness, operator agreement",
        if failures.is_empty() {
            "consistent, arbitrary and perturbed scenarios; 10 sections for the operator check".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn criterion_9() -> Line {
    use TransportIdentity::*;
    let mut ok = true;
    for (k, kind) in [GammaKind::Consistent, GammaKind::Arbitrary, GammaKind::TransportDerivative].into_iter().enumerate() {
        let s = TransportScenario::random(&transport_params(2, 2, 3, kind, 90 + k as u64));
        ok &= verify_transport_identity(&s, ClassicalCurvature, 1, 9).unwrap().is_verified();
        ok &= verify_transport_identity(&s, Flatness, 1, 9).unwrap().is_verified();
    }

    // Consistent data whose diagonal coefficients are dH_aa/dx(x,x):
    // the derivative is then the transport derivative and every curvature
    // vanishes. Shifting one diagonal coefficient makes R_aaa nonzero.
    let frames = TransportScenario::random(&transport_params(2, 2, 3, GammaKind::Consistent, 99)).frames().clone();
    let two = Layout::new(2, 2);
    let mut diagonal: BTreeMap<Label, Vec<PolyMatrix>> = BTreeMap::new();
    for a in frames.labels() {
        let tc = frames.transports(&a, &a).unwrap();
        let d = (0..2).map(|al| two.diagonal_matrix(tc.hx(al)).unwrap()).collect();
        diagonal.insert(a, d);
    }
    let flat = TransportScenario::consistent(frames.clone(), &diagonal).unwrap();
    let labels = flat.labels();
    let calc = DiagonalCalculus::new(&flat).unwrap();
    let mut flat_zero = true;
    for a in &labels {
        for b in &labels {
            for alpha in 0..2 {
                flat_zero &= flat.gamma(a, b).unwrap().coeff(alpha) == flat.transport(a, b).unwrap().hx(alpha);
            }
            for c in &labels {
                let comps = calc.extract_curvature([a, b, c]).unwrap();
                flat_zero &= comps.r_is_zero() && comps.d_is_zero();
            }
        }
    }
    let a = &labels[0];
    let mut m = diagonal[a][1].clone();
    m.set(0, 1, m.get(0, 1) + &Poly::var(2, 0).unwrap());
    diagonal.get_mut(a).unwrap()[1] = m;
    let shifted = TransportScenario::consistent(frames, &diagonal).unwrap();
    let shifted_nonzero = !DiagonalCalculus::new(&shifted)
        .unwrap()
        .extract_curvature([a, a, a])
        .unwrap()
        .r_is_zero();
    ok &= flat_zero && shifted_nonzero;
    report(
        9,
        ok,
        "equal-label curvature is the classical curvature; transport-derivative data is flat",
        format!("classical on 3 scenarios, flat construction all-zero: {flat_zero}, shifted coefficient gives R != 0: {shifted_nonzero}"),
    )
}

fn criterion_10() -> Line {
    let mut ok = true;
    let mut checks = 0;
    for seed in 1..=5u64 {
        let s = TransportScenario::random(&transport_params(2, 2, 4, GammaKind::Consistent, 100 + seed));
        let r = verify_transport_identity(&s, TransportIdentity::CyclicOperator, 1, seed).unwrap();
        ok &= r.is_verified() && r.stats["groupings_agree"] == serde_json::Value::Bool(true);
        checks += r.stats["checks"].as_u64().unwrap_or(0);
    }
    report(
        10,
        ok,
        "cyclic generalized-curvature operator identity",
        format!("5 consistent scenarios, |labels| = 4, {checks} label chains, both groupings agree"),
    )
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_genjacobi"))
}

fn scenario_path(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn rationals(v: &serde_json::Value) -> Vec<Rational> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().parse().unwrap()).collect()
}

/// Re-evaluates both sides of the consistency condition at the printed
/// witness point.
fn witness_is_genuine(path: &str, seed: u64, w: &serde_json::Value) -> bool {
    let ScenarioBody::Transport(def) = Scenario::load(path.as_ref()).unwrap().body else {
        return false;
    };
    let s = def.build(seed).unwrap();
    let names: Vec<&str> = w["labels"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
    let (a, b, c) = (Label::new(names[0]), Label::new(names[1]), Label::new(names[2]));
    let alpha = w["alpha"].as_u64().unwrap() as usize - 1;
    let (z, y, x) = (rationals(&w["z"]), rationals(&w["y"]), rationals(&w["x"]));
    let cat = |p: &[Rational], q: &[Rational]| -> Vec<Rational> { p.iter().chain(q).cloned().collect() };
    let lhs = s.gamma(&a, &b).unwrap().coeff(alpha).eval(&cat(&z, &x)).unwrap();
    let h = s.transport(&c, &b).unwrap().h().eval(&cat(&z, &y)).unwrap();
    let inner = s.gamma(&a, &c).unwrap().coeff(alpha).eval(&cat(&y, &x)).unwrap();
    let m = s.fiber_dim();
    let mut rhs = vec![Rational::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                rhs[i * m + j] += &(&h[i * m + k] * &inner[k * m + j]);
            }
        }
    }
    lhs != rhs && lhs == rationals(&w["lhs"]) && rhs == rationals(&w["rhs"])
}

fn criterion_11() -> Line {
    let path = scenario_path("perturbed_transport.scenario");
    let out = bin()
        .args(["--seed", "3", "--deterministic", "verify", "transport", "--scenario", &path, "--identities", "3.20"])
        .output()
        .unwrap();
    let report_json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let result = &report_json["results"][0];
    let perturbed_ok = out.status.code() == Some(1)
        && result["verdict"] == "violated"
        && witness_is_genuine(&path, 3, &result["witness"]);

    let out = bin()
        .args(["--seed", "3", "verify", "antisymmetry", "--ring", "anticommutator3", "--k", "2"])
        .output()
        .unwrap();
    let sym: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let symmetric_ok = out.status.code() == Some(1)
        && sym["results"][0]["verdict"] == "violated"
        && sym["results"][0]["witness"]["identity"] == "1.2";
    report(
        11,
        perturbed_ok && symmetric_ok,
        "negative controls fail with witnesses and exit status 1",
        format!("perturbed consistency: {perturbed_ok}, symmetric product at order 2: {symmetric_ok}"),
    )
}

#[test]
fn acceptance_criteria() {
    let lines = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    let passed = lines.iter().filter(|l| l.pass).count();
    let _ = writeln!(std::io::stdout().lock(), "acceptance: {passed}/{} criteria pass", lines.len());
    for l in &lines {
        if KNOWN_RED.contains(&l.number) {
            assert!(l.pass || l.expected_red, "criterion {} failed in an undocumented way", l.number);
        } else {
            assert!(l.pass, "criterion {} failed", l.number);
        }
    }
}
