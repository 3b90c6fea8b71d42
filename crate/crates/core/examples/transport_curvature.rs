//! Generalized curvature of a consistent transport family, and what
//! happens to consistency after a perturbation.
use genjacobi::transport::{
    check_consistency, verify_transport_identity, DiagonalCalculus, GammaKind, TransportIdentity, TransportParams,
    TransportScenario,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = TransportParams { base_dim: 2, fiber_dim: 2, labels: 3, seed: 8, ..TransportParams::default() };
    let scenario = TransportScenario::random(&params);
    let calc = DiagonalCalculus::new(&scenario)?;
    let l = scenario.labels();
    let curv = calc.curvature([&l[0], &l[1], &l[2]])?;
    println!("R^({},{},{})_(1,0) =\n{:?}", l[0], l[1], l[2], curv.r(1, 0));

    for id in [TransportIdentity::CurvatureOperator, TransportIdentity::CurvatureSkew, TransportIdentity::CyclicOperator] {
        let r = verify_transport_identity(&scenario, id, 2, 8)?;
        println!("{:<10} {:?}", id.id(), r.verdict);
    }

    let mut perturbed = TransportScenario::random(&TransportParams { kind: GammaKind::Consistent, ..params });
    perturbed.perturb_first_pair();
    let r = check_consistency(&perturbed, 2, 8)?;
    println!("after perturbation: {} {:?}", r.identity, r.verdict);
    Ok(())
}
