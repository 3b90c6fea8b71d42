//! The free associative algebra over indexed generators with integer
//! coefficients. Words never commute, so an expression is zero only when
//! every coefficient cancels.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::index_bracket::{IntegerCombination, Label};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeAlgebraError {
    #[error("nested commutator needs at least 2 entries, got {0}")]
    Arity(usize),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Generator {
    pub symbol: Label,
    pub index: Label,
}

impl Generator {
    pub fn new(symbol: &str, index: &str) -> Self {
        Generator {
            symbol: Label::new(symbol),
            index: Label::new(index),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.index.as_str();
        if idx.chars().all(|c| c.is_ascii_digit()) {
            write!(f, "{}{}", self.symbol, idx)
        } else {
            write!(f, "{}_{}", self.symbol, idx)
        }
    }
}

/// A monomial of the free monoid; the empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(Vec<Generator>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn new(gens: Vec<Generator>) -> Self {
        Word(gens)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn concat(&self, other: &Word) -> Word {
        let mut gens = Vec::with_capacity(self.0.len() + other.0.len());
        gens.extend_from_slice(&self.0);
        gens.extend_from_slice(&other.0);
        Word(gens)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(Generator::to_string).collect();
        f.write_str(&parts.join("*"))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FreeExpr {
    terms: BTreeMap<Word, BigInt>,
}

impl FreeExpr {
    pub fn zero() -> Self {
        FreeExpr::default()
    }

    pub fn unit() -> Self {
        FreeExpr::from_word(Word::unit(), BigInt::one())
    }

    pub fn generator(symbol: &str, index: &str) -> Self {
        FreeExpr::from_word(Word(vec![Generator::new(symbol, index)]), BigInt::one())
    }

    pub fn from_word(word: Word, coeff: BigInt) -> Self {
        let mut e = FreeExpr::zero();
        e.add_term(word, coeff);
        e
    }

    /// The product word `A_{l1} * .. * A_{lq}`.
    pub fn product_word(symbol: &str, labels: &[Label]) -> Self {
        let gens = labels
            .iter()
            .map(|l| Generator {
                symbol: Label::new(symbol),
                index: l.clone(),
            })
            .collect();
        FreeExpr::from_word(Word(gens), BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &Word) -> BigInt {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, word: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &FreeExpr) -> FreeExpr {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FreeExpr) -> FreeExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FreeExpr {
        FreeExpr {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> FreeExpr {
        if c.is_zero() {
            return FreeExpr::zero();
        }
        FreeExpr {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &FreeExpr) -> FreeExpr {
        let mut out = FreeExpr::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }

    pub fn commutator(&self, other: &FreeExpr) -> FreeExpr {
        self.mul(other).sub(&other.mul(self))
    }

    /// Right-nested `[e1,[e2,[..,[e_{p-1},e_p]..]]]`.
    pub fn nested_commutator(entries: &[FreeExpr]) -> Result<FreeExpr, FreeAlgebraError> {
        if entries.len() < 2 {
            return Err(FreeAlgebraError::Arity(entries.len()));
        }
        let (last, rest) = entries.split_last().expect("len >= 2");
        Ok(rest.iter().rev().fold(last.clone(), |acc, e| e.commutator(&acc)))
    }
}

impl IntegerCombination for FreeExpr {
    fn add_scaled(&mut self, other: &Self, c: i64) {
        let c = BigInt::from(c);
        for (w, v) in &other.terms {
            self.add_term(w.clone(), v * &c);
        }
    }
}

impl fmt::Display for FreeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (n, neg) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            let mag = c.abs();
            if mag.is_one() {
                write!(f, "{w}")?;
            } else if w.is_empty() {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: &str) -> FreeExpr {
        FreeExpr::generator("A", i)
    }

    fn word(indices: &[&str]) -> Word {
        Word(indices.iter().map(|i| Generator::new("A", i)).collect())
    }

    #[test]
    fn products() {
        let p = a("1").mul(&a("2"));
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient(&word(&["1", "2"])), BigInt::one());
        let d = a("1").add(&a("2")).mul(&a("3"));
        assert_eq!(d, a("1").mul(&a("3")).add(&a("2").mul(&a("3"))));
        assert_eq!(FreeExpr::unit().mul(&d), d);
    }

    #[test]
    fn commutators() {
        let c = a("1").commutator(&a("2"));
        assert_eq!(c.to_string(), "A1*A2 - A2*A1");
        let e = a("1").add(&a("2").mul(&a("3")));
        assert!(e.commutator(&e).is_zero());
        assert_eq!(a("1").neg().commutator(&a("2")), c.neg());
    }

    #[test]
    fn nested_triple_matches_hand_expansion() {
        let n = FreeExpr::nested_commutator(&[a("1"), a("2"), a("3")]).unwrap();
        let mut expected = FreeExpr::zero();
        for (w, c) in [
            (&["1", "2", "3"], 1),
            (&["1", "3", "2"], -1),
            (&["2", "3", "1"], -1),
            (&["3", "2", "1"], 1),
        ] {
            expected.add_term(word(w), BigInt::from(c));
        }
        assert_eq!(n, expected);
    }

    #[test]
    fn nested_word_counts() {
        let gens: Vec<FreeExpr> = (1..=6).map(|i| a(&i.to_string())).collect();
        assert_eq!(FreeExpr::nested_commutator(&gens[..2]).unwrap().len(), 2);
        assert_eq!(FreeExpr::nested_commutator(&gens[..4]).unwrap().len(), 8);
        let six = FreeExpr::nested_commutator(&gens).unwrap();
        assert_eq!(six.len(), 32);
        assert!(six.terms().all(|(_, c)| c.abs().is_one()));
        assert_eq!(
            FreeExpr::nested_commutator(&gens[..1]),
            Err(FreeAlgebraError::Arity(1))
        );
    }

    #[test]
    fn zero_checks() {
        let c = a("1").commutator(&a("2"));
        assert!(c.sub(&c).is_zero());
        assert!(c.add(&a("2").commutator(&a("1"))).is_zero());
        assert!(!c.is_zero());
    }
}
