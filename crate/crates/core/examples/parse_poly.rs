//! Parsing polynomials in the scenario syntax.
use genjacobi::cli::parse_poly;
use genjacobi::exactmath::Poly;

fn main() {
    let p = parse_poly("3/2*x1^2*x2 - x2 + 7", 2, false).unwrap();
    println!("{p}");
    println!("d/dx1 = {}", p.diff(0).unwrap());

    let two = parse_poly("y1 - x1 + 2*y1*x2", 2, true).unwrap();
    println!("{}", two.display_with(&Poly::point_names(2, 2)));

    match parse_poly("x1 +* 2", 2, false) {
        Err(e) => println!("error: {e}"),
        Ok(p) => println!("unexpected: {p}"),
    }
}
