use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector over a fixed variable table, with its total degree and a
/// 64-bit support mask cached for quick divisibility rejection.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u16]>,
    degree: u32,
    mask: u64,
}

fn support_mask(exps: &[u16]) -> u64 {
    exps.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .fold(0u64, |m, (i, _)| m | (1u64 << (i % 64)))
}

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        let degree = exps.iter().map(|&e| e as u32).sum();
        let mask = support_mask(&exps);
        Monomial { exps: exps.into_boxed_slice(), degree, mask }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars].into_boxed_slice(), degree: 0, mask: 0 }
    }

    pub fn variable(nvars: usize, index: usize, exp: u16) -> Self {
        let mut exps = vec![0; nvars];
        exps[index] = exp;
        Monomial::new(exps)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn exponent(&self, var: usize) -> u16 {
        self.exps[var]
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    /// Indices of variables with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Vec<u16> = self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect();
        Monomial { exps: exps.into_boxed_slice(), degree: self.degree + other.degree, mask: self.mask | other.mask }
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        if self.mask & !other.mask != 0 || self.degree > other.degree {
            return false;
        }
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial::new(other.exps.iter().zip(self.exps.iter()).map(|(b, a)| b - a).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.exps.iter().zip(other.exps.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        if self.mask & other.mask == 0 {
            return true;
        }
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// If this monomial is a pure power `v^m` with `m >= 1`, the variable `v`.
    pub fn pure_power_variable(&self) -> Option<usize> {
        let mut support = self.support();
        let first = support.next()?;
        support.next().is_none().then_some(first)
    }

    fn partial_degree(&self, upto: usize) -> u32 {
        self.exps[..upto].iter().map(|&e| e as u32).sum()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// Monomial order. Variable precedence is the order of the variable table:
/// earlier variables are greater.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonomialOrder {
    /// Total degree first, ties broken lexicographically.
    GrLex,
    Lex,
    /// Eliminates the first `k` variables: graded-lex on the first block,
    /// then graded-lex on the rest.
    Block(usize),
}

impl Default for MonomialOrder {
    fn default() -> Self {
        MonomialOrder::GrLex
    }
}

impl MonomialOrder {
    #[inline]
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::GrLex => a.degree.cmp(&b.degree).then_with(|| a.exps.cmp(&b.exps)),
            MonomialOrder::Block(k) => {
                let k = k.min(a.exps.len());
                let (da, db) = (a.partial_degree(k), b.partial_degree(k));
                da.cmp(&db)
                    .then_with(|| a.exps[..k].cmp(&b.exps[..k]))
                    .then_with(|| (a.degree - da).cmp(&(b.degree - db)))
                    .then_with(|| a.exps[k..].cmp(&b.exps[k..]))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            MonomialOrder::GrLex => "grlex".to_string(),
            MonomialOrder::Lex => "lex".to_string(),
            MonomialOrder::Block(k) => format!("block({k})"),
        }
    }

    pub fn parse(name: &str) -> Option<MonomialOrder> {
        match name {
            "grlex" => Some(MonomialOrder::GrLex),
            "lex" => Some(MonomialOrder::Lex),
            _ => {
                let k = name.strip_prefix("block(")?.strip_suffix(')')?;
                k.parse().ok().map(MonomialOrder::Block)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(e: &[u16]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn grlex_examples() {
        let o = MonomialOrder::GrLex;
        assert_eq!(o.compare(&m(&[2, 0]), &m(&[1, 1])), Ordering::Greater);
        assert_eq!(o.compare(&m(&[1, 1]), &m(&[0, 2])), Ordering::Greater);
        assert_eq!(o.compare(&m(&[0, 2]), &m(&[1, 0])), Ordering::Greater);
        assert_eq!(MonomialOrder::Lex.compare(&m(&[0, 2]), &m(&[1, 0])), Ordering::Less);
    }

    #[test]
    fn block_order_eliminates_first_block() {
        let o = MonomialOrder::Block(1);
        assert_eq!(o.compare(&m(&[1, 0, 0]), &m(&[0, 5, 5])), Ordering::Greater);
        assert_eq!(o.compare(&m(&[1, 0, 2]), &m(&[1, 1, 0])), Ordering::Greater);
        assert_eq!(o.compare(&m(&[0, 1, 2]), &m(&[0, 2, 0])), Ordering::Greater);
    }

    #[test]
    fn divisibility_helpers() {
        assert!(m(&[1, 0, 1]).divides(&m(&[2, 1, 1])));
        assert!(!m(&[1, 0, 2]).divides(&m(&[2, 1, 1])));
        assert_eq!(m(&[1, 0, 1]).quotient_of(&m(&[2, 1, 1])), Some(m(&[1, 1, 0])));
        assert!(m(&[1, 0, 0]).is_coprime(&m(&[0, 3, 1])));
        assert_eq!(m(&[0, 4, 0]).pure_power_variable(), Some(1));
        assert_eq!(m(&[1, 4, 0]).pure_power_variable(), None);
        assert_eq!(m(&[0, 0, 0]).pure_power_variable(), None);
    }

    fn mono(n: usize) -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0u16..4, n).prop_map(Monomial::new)
    }

    fn order() -> impl Strategy<Value = MonomialOrder> {
        prop_oneof![
            Just(MonomialOrder::GrLex),
            Just(MonomialOrder::Lex),
            (0usize..5).prop_map(MonomialOrder::Block)
        ]
    }

    proptest! {
        #[test]
        fn order_axioms(a in mono(4), b in mono(4), c in mono(4), o in order()) {
            // totality and antisymmetry
            prop_assert_eq!(o.compare(&a, &b), o.compare(&b, &a).reverse());
            prop_assert_eq!(o.compare(&a, &b) == Ordering::Equal, a == b);
            // divisibility refinement
            if a.divides(&b) {
                prop_assert_ne!(o.compare(&a, &b), Ordering::Greater);
            }
            // multiplicativity
            if o.compare(&a, &b) == Ordering::Less {
                prop_assert_eq!(o.compare(&a.mul(&c), &b.mul(&c)), Ordering::Less);
            }
            // transitivity
            if o.compare(&a, &b) != Ordering::Greater && o.compare(&b, &c) != Ordering::Greater {
                prop_assert_ne!(o.compare(&a, &c), Ordering::Greater);
            }
        }
    }
}
