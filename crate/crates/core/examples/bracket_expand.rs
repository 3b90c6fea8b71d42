//! Expands the index bracket of a tuple and its cyclic sum.
use genjacobi::index_bracket::{bracket_apply, cyclic_sum, BracketPositions, IndexTuple, Label, TupleSum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tuple = TupleSum::singleton(IndexTuple::from_names(&["i", "j", "k"]));
    for positions in [&[2, 3][..], &[1, 2, 3][..], &[3, 1][..]] {
        let pos = BracketPositions::new(positions, 3)?;
        let expanded = bracket_apply(&tuple, &pos)?;
        println!("{positions:?}: {expanded}  (coefficient sum {})", expanded.coefficient_sum());
    }

    let labels: Vec<Label> = ["i", "j", "k"].iter().map(|s| Label::new(s)).collect();
    let inner = bracket_apply(&tuple, &BracketPositions::new(&[2, 3], 3)?)?;
    println!("cyclic sum of [i,[j,k]]: {}", cyclic_sum(&inner, &labels)?);
    Ok(())
}
