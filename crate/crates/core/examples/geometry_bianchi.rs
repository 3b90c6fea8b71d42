//! Curvature and torsion identities for a random polynomial connection.
use genjacobi::geometry::{verify_geometry_identity, GeometryIdentity, GeometryScenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = GeometryScenario::random(2, 11, 1, 1, 2);
    for id in GeometryIdentity::general() {
        let r = verify_geometry_identity(&scenario, id, 1, 11)?;
        let terms = r.witness.as_ref().map(|w| w["residual_terms"].clone());
        println!("{:<6} {:?}  residual terms {:?}", id.id(), r.verdict, terms);
    }
    Ok(())
}
