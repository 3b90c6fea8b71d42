//! Formal integer combinations of index tuples and the recursive
//! multi-index bracket built from the cycles `tau_p`.
//!
//! A bracket on positions `(r1,..,rp)` maps a tuple to a signed sum of
//! tuples. It is computed on placeholder variables `v1..vq` first: each
//! step replaces `X` by `X - sigma(X)`, where `sigma` substitutes the
//! variables `v_{r1} -> v_{r2} -> .. -> v_{rp} -> v_{r1}`, and then recurses
//! on `(r2,..,rp)`. The placeholders are finally replaced by the actual
//! labels, so repeated labels are handled by plain substitution.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BracketError {
    #[error("invalid bracket positions {positions:?} for tuples of length {len}")]
    Position { positions: Vec<usize>, len: usize },
    #[error("cycle labels must be distinct, `{0}` is repeated")]
    RepeatedLabel(String),
    #[error("arity {0} is too small, at least 2 is required")]
    Arity(usize),
    #[error("tuple length {found} does not match {expected}")]
    Length { expected: usize, found: usize },
}

/// An opaque index label such as `i1` or `A`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(name: &str) -> Self {
        Label(Arc::from(name))
    }

    /// The canonical labels `i1, .., in`.
    pub fn canonical(n: usize) -> Vec<Label> {
        (1..=n).map(|s| Label::new(&format!("i{s}"))).collect()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct IndexTuple(Vec<Label>);

impl IndexTuple {
    pub fn new(labels: Vec<Label>) -> Self {
        IndexTuple(labels)
    }

    pub fn from_names(names: &[&str]) -> Self {
        IndexTuple(names.iter().map(|s| Label::new(s)).collect())
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn substitute(&self, map: &BTreeMap<&Label, &Label>) -> IndexTuple {
        IndexTuple(
            self.0
                .iter()
                .map(|l| map.get(l).map_or_else(|| l.clone(), |&t| t.clone()))
                .collect(),
        )
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(Label::as_str).collect();
        write!(f, "({})", names.join(","))
    }
}

/// Bracket positions `r1..rp`, stored zero-based, pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketPositions(Vec<usize>);

impl BracketPositions {
    /// Takes one-based positions as written in formulas.
    pub fn new(one_based: &[usize], len: usize) -> Result<Self, BracketError> {
        let err = || BracketError::Position {
            positions: one_based.to_vec(),
            len,
        };
        if one_based.len() < 2 || one_based.len() > len {
            return Err(err());
        }
        let mut seen = vec![false; len];
        for &r in one_based {
            if r == 0 || r > len || seen[r - 1] {
                return Err(err());
            }
            seen[r - 1] = true;
        }
        Ok(BracketPositions(one_based.iter().map(|r| r - 1).collect()))
    }

    /// Positions `1..=p`.
    pub fn leading(p: usize, len: usize) -> Result<Self, BracketError> {
        BracketPositions::new(&(1..=p).collect::<Vec<_>>(), len)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|r| r + 1).collect()
    }
}

/// A bijection of `{1..q}` stored zero-based as its image array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(q: usize) -> Self {
        Permutation((0..q).collect())
    }

    pub fn image(&self) -> &[usize] {
        &self.0
    }

    /// Places the label from slot `tau(a)` into slot `a`.
    pub fn apply(&self, tuple: &IndexTuple) -> IndexTuple {
        IndexTuple(self.0.iter().map(|&s| tuple.0[s].clone()).collect())
    }
}

/// The cycle `r1 -> r2 -> .. -> rp -> r1` on slots, identity elsewhere.
pub fn tau_perm(pos: &BracketPositions, q: usize) -> Result<Permutation, BracketError> {
    if pos.0.iter().any(|&r| r >= q) {
        return Err(BracketError::Position {
            positions: pos.one_based(),
            len: q,
        });
    }
    let mut image: Vec<usize> = (0..q).collect();
    let p = pos.0.len();
    for a in 0..p {
        image[pos.0[a]] = pos.0[(a + 1) % p];
    }
    Ok(Permutation(image))
}

/// Anything that integer combinations of tuples can be mapped into.
pub trait IntegerCombination: Clone {
    /// `self += c * other`
    fn add_scaled(&mut self, other: &Self, c: i64);
}

/// A formal integer combination of index tuples of a common length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TupleSum {
    len: usize,
    terms: BTreeMap<IndexTuple, i64>,
}

impl TupleSum {
    pub fn zero(len: usize) -> Self {
        TupleSum {
            len,
            terms: BTreeMap::new(),
        }
    }

    pub fn singleton(tuple: IndexTuple) -> Self {
        let mut ts = TupleSum::zero(tuple.len());
        ts.terms.insert(tuple, 1);
        ts
    }

    pub fn from_terms(
        len: usize,
        terms: impl IntoIterator<Item = (IndexTuple, i64)>,
    ) -> Result<Self, BracketError> {
        let mut ts = TupleSum::zero(len);
        for (t, c) in terms {
            if t.len() != len {
                return Err(BracketError::Length {
                    expected: len,
                    found: t.len(),
                });
            }
            ts.add_term(t, c);
        }
        Ok(ts)
    }

    pub fn tuple_len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexTuple, i64)> {
        self.terms.iter().map(|(t, &c)| (t, c))
    }

    pub fn coefficient(&self, tuple: &IndexTuple) -> i64 {
        self.terms.get(tuple).copied().unwrap_or(0)
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.terms.values().sum()
    }

    fn add_term(&mut self, tuple: IndexTuple, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(tuple) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TupleSum, c: i64) {
        assert_eq!(self.len, other.len, "tuple lengths differ");
        for (t, &v) in &other.terms {
            self.add_term(t.clone(), v * c);
        }
    }

    pub fn relabel(&self, map: &BTreeMap<&Label, &Label>) -> TupleSum {
        let mut out = TupleSum::zero(self.len);
        for (t, &c) in &self.terms {
            out.add_term(t.substitute(map), c);
        }
        out
    }

    pub fn permute(&self, perm: &Permutation) -> TupleSum {
        let mut out = TupleSum::zero(self.len);
        for (t, &c) in &self.terms {
            out.add_term(perm.apply(t), c);
        }
        out
    }
}

impl IntegerCombination for TupleSum {
    fn add_scaled(&mut self, other: &Self, c: i64) {
        TupleSum::add_scaled(self, other, c);
    }
}

impl fmt::Display for TupleSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (t, &c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if c < 0 { "- " } else { "+ " })?;
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Signed placeholder tuples produced by the bracket on `v1..vq`.
fn placeholder_expansion(pos: &[usize], q: usize) -> Vec<(Vec<usize>, i64)> {
    let mut current: Vec<(Vec<usize>, i64)> = vec![((0..q).collect(), 1)];
    for start in 0..pos.len() - 1 {
        let cycle = &pos[start..];
        let mut shift = vec![usize::MAX; q];
        for a in 0..cycle.len() {
            shift[cycle[a]] = cycle[(a + 1) % cycle.len()];
        }
        let mut next = Vec::with_capacity(current.len() * 2);
        for (t, c) in &current {
            let moved: Vec<usize> = t
                .iter()
                .map(|&v| if shift[v] == usize::MAX { v } else { shift[v] })
                .collect();
            next.push((t.clone(), *c));
            next.push((moved, -c));
        }
        current = next;
    }
    current
}

/// The multi-index bracket on the given positions, extended linearly.
pub fn bracket_apply(ts: &TupleSum, pos: &BracketPositions) -> Result<TupleSum, BracketError> {
    let q = ts.len;
    if pos.0.iter().any(|&r| r >= q) {
        return Err(BracketError::Position {
            positions: pos.one_based(),
            len: q,
        });
    }
    let pattern = placeholder_expansion(&pos.0, q);
    let mut out = TupleSum::zero(q);
    for (tuple, &c) in &ts.terms {
        for (slots, sign) in &pattern {
            let t = IndexTuple(slots.iter().map(|&s| tuple.0[s].clone()).collect());
            out.add_term(t, c * sign);
        }
    }
    Ok(out)
}

/// Sum over the cyclic relabelings `l1 -> l2 -> .. -> l1` applied k times.
pub fn cyclic_sum(ts: &TupleSum, labels: &[Label]) -> Result<TupleSum, BracketError> {
    for (a, l) in labels.iter().enumerate() {
        if labels[..a].contains(l) {
            return Err(BracketError::RepeatedLabel(l.to_string()));
        }
    }
    let n = labels.len();
    let mut out = TupleSum::zero(ts.len);
    for k in 0..n.max(1) {
        let map: BTreeMap<&Label, &Label> = (0..n).map(|s| (&labels[s], &labels[(s + k) % n])).collect();
        out.add_scaled(&ts.relabel(&map), 1);
    }
    Ok(out)
}

/// `+(i1,..,ip) + (-1)^p (i1,ip,ip-1,..,i2)` on canonical labels.
pub fn reversed_tail_term(p: usize) -> Result<TupleSum, BracketError> {
    if p < 2 {
        return Err(BracketError::Arity(p));
    }
    let labels = Label::canonical(p);
    let forward = IndexTuple(labels.clone());
    let mut reversed = vec![labels[0].clone()];
    reversed.extend(labels[1..].iter().rev().cloned());
    let sign = if p % 2 == 0 { 1 } else { -1 };
    TupleSum::from_terms(p, [(forward, 1), (IndexTuple(reversed), sign)])
}

/// Linear extension `sum coeff * assign(tuple)`.
pub fn instantiate<T: IntegerCombination>(
    ts: &TupleSum,
    zero: T,
    mut assign: impl FnMut(&IndexTuple) -> T,
) -> T {
    let mut acc = zero;
    for (t, &c) in &ts.terms {
        acc.add_scaled(&assign(t), c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(names: &[&str]) -> IndexTuple {
        IndexTuple::from_names(names)
    }

    fn sum(len: usize, terms: &[(&[&str], i64)]) -> TupleSum {
        TupleSum::from_terms(len, terms.iter().map(|(n, c)| (t(n), *c))).unwrap()
    }

    #[test]
    fn tau_examples() {
        let p = tau_perm(&BracketPositions::new(&[1, 2], 2).unwrap(), 2).unwrap();
        assert_eq!(p.apply(&t(&["i", "j"])), t(&["j", "i"]));
        let p = tau_perm(&BracketPositions::new(&[1, 2, 3], 3).unwrap(), 3).unwrap();
        assert_eq!(p.apply(&t(&["i", "j", "k"])), t(&["j", "k", "i"]));
        let p = tau_perm(&BracketPositions::new(&[2, 4], 4).unwrap(), 4).unwrap();
        assert_eq!(p.apply(&t(&["a", "b", "c", "d"])), t(&["a", "d", "c", "b"]));
    }

    #[test]
    fn invalid_positions() {
        assert!(BracketPositions::new(&[1, 1], 3).is_err());
        assert!(BracketPositions::new(&[1, 4], 3).is_err());
        assert!(BracketPositions::new(&[2], 3).is_err());
        let pos = BracketPositions::new(&[1, 3], 3).unwrap();
        assert!(bracket_apply(&TupleSum::singleton(t(&["i", "j"])), &pos).is_err());
    }

    #[test]
    fn bracket_examples() {
        let two = BracketPositions::new(&[1, 2], 2).unwrap();
        assert_eq!(
            bracket_apply(&TupleSum::singleton(t(&["i", "j"])), &two).unwrap(),
            sum(2, &[(&["i", "j"], 1), (&["j", "i"], -1)])
        );
        let tail = BracketPositions::new(&[2, 3], 3).unwrap();
        assert_eq!(
            bracket_apply(&TupleSum::singleton(t(&["i", "j", "k"])), &tail).unwrap(),
            sum(3, &[(&["i", "j", "k"], 1), (&["i", "k", "j"], -1)])
        );
        // relabeling reading: the last term is (k,j,i)
        let full = BracketPositions::leading(3, 3).unwrap();
        assert_eq!(
            bracket_apply(&TupleSum::singleton(t(&["i", "j", "k"])), &full).unwrap(),
            sum(
                3,
                &[
                    (&["i", "j", "k"], 1),
                    (&["i", "k", "j"], -1),
                    (&["j", "k", "i"], -1),
                    (&["k", "j", "i"], 1)
                ]
            )
        );
    }

    #[test]
    fn repeated_labels_cancel() {
        let full = BracketPositions::leading(2, 2).unwrap();
        assert!(bracket_apply(&TupleSum::singleton(t(&["i", "i"])), &full).unwrap().is_empty());
    }

    #[test]
    fn cyclic_examples() {
        let ij = [Label::new("i"), Label::new("j")];
        assert_eq!(
            cyclic_sum(&TupleSum::singleton(t(&["i", "j"])), &ij).unwrap(),
            sum(2, &[(&["i", "j"], 1), (&["j", "i"], 1)])
        );
        assert!(cyclic_sum(&sum(2, &[(&["i", "j"], 1), (&["j", "i"], -1)]), &ij)
            .unwrap()
            .is_empty());
        let ijk = [Label::new("i"), Label::new("j"), Label::new("k")];
        assert_eq!(
            cyclic_sum(&TupleSum::singleton(t(&["i", "j", "k"])), &ijk).unwrap(),
            sum(3, &[(&["i", "j", "k"], 1), (&["j", "k", "i"], 1), (&["k", "i", "j"], 1)])
        );
        assert!(matches!(
            cyclic_sum(&TupleSum::zero(2), &[Label::new("i"), Label::new("i")]),
            Err(BracketError::RepeatedLabel(_))
        ));
    }

    #[test]
    fn reversed_tail_examples() {
        assert_eq!(reversed_tail_term(2).unwrap(), sum(2, &[(&["i1", "i2"], 2)]));
        assert_eq!(
            reversed_tail_term(3).unwrap(),
            sum(3, &[(&["i1", "i2", "i3"], 1), (&["i1", "i3", "i2"], -1)])
        );
        assert_eq!(
            reversed_tail_term(4).unwrap(),
            sum(4, &[(&["i1", "i2", "i3", "i4"], 1), (&["i1", "i4", "i3", "i2"], 1)])
        );
        assert_eq!(reversed_tail_term(1), Err(BracketError::Arity(1)));
    }

    #[test]
    fn display_is_signed_tuples() {
        let full = BracketPositions::leading(3, 3).unwrap();
        let out = bracket_apply(&TupleSum::singleton(IndexTuple::new(Label::canonical(3))), &full).unwrap();
        assert_eq!(
            out.to_string(),
            "+ (i1,i2,i3) - (i1,i3,i2) - (i2,i3,i1) + (i3,i2,i1)"
        );
        assert_eq!(TupleSum::zero(2).to_string(), "0");
        assert_eq!(reversed_tail_term(2).unwrap().to_string(), "+ 2(i1,i2)");
    }

    #[test]
    fn full_bracket_has_power_of_two_terms() {
        for p in 2..=6 {
            let pos = BracketPositions::leading(p, p).unwrap();
            let out = bracket_apply(&TupleSum::singleton(IndexTuple::new(Label::canonical(p))), &pos).unwrap();
            assert_eq!(out.len(), 1 << (p - 1));
            assert_eq!(out.coefficient_sum(), 0);
        }
    }
}
