//! Loads a scenario file and prints a JSON report, as the CLI does.
use genjacobi::cli::{Report, Scenario, ScenarioBody};
use genjacobi::geometry::{verify_geometry_identity, GeometryIdentity};
use genjacobi::transport::{verify_transport_identity, TransportIdentity};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/consistent_transport.scenario").into());
    let seed = 1;
    let scenario = Scenario::load(path.as_ref())?;
    let results = match &scenario.body {
        ScenarioBody::Geometry(def) => {
            let g = def.build(seed)?;
            GeometryIdentity::general()
                .into_iter()
                .map(|id| verify_geometry_identity(&g, id, 1, seed))
                .collect::<Result<Vec<_>, _>>()?
        }
        ScenarioBody::Transport(def) => {
            let t = def.build(seed)?;
            [TransportIdentity::Consistency, TransportIdentity::CurvatureOperator, TransportIdentity::Flatness]
                .into_iter()
                .map(|id| verify_transport_identity(&t, id, 1, seed))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let mut report = Report::new(seed, scenario.digest.clone(), results);
    report.strip_timings();
    print!("{}", report.emit(genjacobi::cli::OutputFormat::Json));
    std::process::exit(report.exit_code());
}
