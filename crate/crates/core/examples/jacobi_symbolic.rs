//! The p-th generalized Jacobi identity in the free associative algebra.
use genjacobi::jacobi_verify::verify_pth_jacobi_symbolic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in 2..=6 {
        let r = verify_pth_jacobi_symbolic(p)?;
        println!(
            "{:<8} {:?}  tuples={} lhs_words={} nested_words={}",
            r.identity, r.verdict, r.stats["bracket_tuples"], r.stats["lhs_words"], r.stats["nested_words"]
        );
    }
    Ok(())
}
