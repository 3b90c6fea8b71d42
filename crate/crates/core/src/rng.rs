//! Seeded 64-bit linear congruential generator.
//!
//! `state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
//! and each draw returns the upper 32 bits of the new state. The constants
//! are Knuth's MMIX parameters. Any implementation that follows these two
//! lines reproduces every randomized trial in this crate bit for bit.

use crate::exactmath::{Monomial, Poly, Rational};

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    /// Derive an independent stream, e.g. one per trial index.
    pub fn fork(seed: u64, stream: u64) -> Self {
        let mut rng = Lcg64::new(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        rng.next_u32();
        rng
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform integer in `0..bound` (bound > 0), by rejection.
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0, "empty range");
        let zone = u32::MAX - (u32::MAX % bound);
        loop {
            let v = self.next_u32();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Uniform integer in the closed range `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range");
        lo + i64::from(self.below((hi - lo + 1) as u32))
    }

    /// Rational `a/b` with `|a| <= num_bound`, `1 <= b <= den_bound`.
    pub fn rational(&mut self, num_bound: i64, den_bound: i64) -> Rational {
        let num = self.range(-num_bound, num_bound);
        let den = self.range(1, den_bound.max(1));
        Rational::new(num, den)
    }

    /// Random polynomial in `nvars` variables: every monomial of total degree
    /// at most `degree` gets an integer coefficient in `-coeff..=coeff`.
    pub fn poly(&mut self, nvars: usize, degree: u32, coeff: i64) -> Poly {
        let mut terms = Vec::new();
        for exps in monomials_up_to(nvars, degree) {
            let c = self.range(-coeff, coeff);
            if c != 0 {
                terms.push((Monomial::from_exponents(&exps), Rational::from(c)));
            }
        }
        Poly::from_terms(nvars, terms).expect("generated exponents have the right length")
    }

    /// Like [`Lcg64::poly`] but each monomial is kept with probability
    /// `keep_percent`/100, which keeps large scenarios sparse.
    pub fn sparse_poly(&mut self, nvars: usize, degree: u32, coeff: i64, keep_percent: u32) -> Poly {
        let mut terms = Vec::new();
        for exps in monomials_up_to(nvars, degree) {
            if self.below(100) >= keep_percent {
                continue;
            }
            let c = self.range(-coeff, coeff);
            if c != 0 {
                terms.push((Monomial::from_exponents(&exps), Rational::from(c)));
            }
        }
        Poly::from_terms(nvars, terms).expect("generated exponents have the right length")
    }
}

/// All exponent vectors in `nvars` variables with total degree `<= degree`,
/// in a fixed order.
pub fn monomials_up_to(nvars: usize, degree: u32) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut current = vec![0u16; nvars];
    fn rec(pos: usize, left: u32, current: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for e in 0..=left {
            current[pos] = e as u16;
            rec(pos + 1, left - e, current, out);
        }
        current[pos] = 0;
    }
    rec(0, degree, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_draws_are_pinned() {
        // state_1 = 1442695040888963407, state_2 = state_1*a + c (mod 2^64)
        let mut rng = Lcg64::new(0);
        assert_eq!(rng.next_u32(), (1442695040888963407u64 >> 32) as u32);
        let s2 = 1442695040888963407u64
            .wrapping_mul(MULTIPLIER)
            .wrapping_add(INCREMENT);
        assert_eq!(rng.next_u32(), (s2 >> 32) as u32);
    }

    #[test]
    fn ranges_are_respected() {
        let mut rng = Lcg64::new(42);
        for _ in 0..1000 {
            let v = rng.range(-9, 9);
            assert!((-9..=9).contains(&v));
        }
    }

    #[test]
    fn monomial_count_is_binomial() {
        // C(n + d, d)
        assert_eq!(monomials_up_to(2, 2).len(), 6);
        assert_eq!(monomials_up_to(3, 2).len(), 10);
        assert_eq!(monomials_up_to(0, 3).len(), 1);
    }
}
