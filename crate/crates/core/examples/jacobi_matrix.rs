//! Seeded checks of the generalized Jacobi identity in concrete rings.
use genjacobi::jacobi_verify::{verify_pth_jacobi_in, verify_pth_jacobi_matrix, RingInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 17;
    for dim in 2..=4 {
        for p in 2..=5 {
            let r = verify_pth_jacobi_matrix(p, dim, 20, seed)?;
            println!("{dim}x{dim} matrices  {:<8} {:?}", r.identity, r.verdict);
        }
    }
    let r = verify_pth_jacobi_in(RingInstance::CrossProduct3, 4, 20, seed)?;
    println!("cross product  {:<8} {:?}", r.identity, r.verdict);
    Ok(())
}
