//! The reversed-tail cyclic identity and its reduction to the commutator
//! identities. p = 5 is included to show where it stops holding.
use genjacobi::jacobi_verify::{reduction_factor, verify_identity15_formal, verify_reduction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in 2..=5 {
        let r = verify_identity15_formal(p)?;
        println!("{:<8} {:?}", r.identity, r.verdict);
    }
    for p in 2..=4 {
        let r = verify_reduction(p)?;
        println!("{:<14} {:?}  factor {:?}", r.identity, r.verdict, reduction_factor(p));
    }
    Ok(())
}
