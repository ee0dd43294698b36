//! Basis indices of based free modules.
//!
//! Keys are ordered degree-first so sparse element maps sort
//! deterministically.

use std::cmp::Ordering;

/// Index into the distinguished basis of a bialgebra family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BasisIndex {
    /// Exponent vector over the family's symbol list. Group families may
    /// carry negative exponents.
    Monomial(Vec<i64>),
    /// Word over a finite alphabet, stored as letter indices.
    Word(Vec<u16>),
    /// Normal form of a trace-monoid element (lexicographically least in
    /// its commutation class).
    TraceNF(Vec<u16>),
    /// Pair of indices, for tensor-product bialgebras.
    Pair(Box<BasisIndex>, Box<BasisIndex>),
}

impl BasisIndex {
    pub fn degree(&self) -> i64 {
        match self {
            BasisIndex::Monomial(exps) => exps.iter().map(|e| e.abs()).sum(),
            BasisIndex::Word(w) | BasisIndex::TraceNF(w) => w.len() as i64,
            BasisIndex::Pair(a, b) => a.degree() + b.degree(),
        }
    }

    fn variant_rank(&self) -> u8 {
        match self {
            BasisIndex::Monomial(_) => 0,
            BasisIndex::Word(_) => 1,
            BasisIndex::TraceNF(_) => 2,
            BasisIndex::Pair(_, _) => 3,
        }
    }
}

impl Ord for BasisIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.variant_rank().cmp(&other.variant_rank()))
            .then_with(|| match (self, other) {
                (BasisIndex::Monomial(a), BasisIndex::Monomial(b)) => a.cmp(b),
                (BasisIndex::Word(a), BasisIndex::Word(b)) => a.cmp(b),
                (BasisIndex::TraceNF(a), BasisIndex::TraceNF(b)) => a.cmp(b),
                (BasisIndex::Pair(a1, a2), BasisIndex::Pair(b1, b2)) => {
                    a1.cmp(b1).then_with(|| a2.cmp(b2))
                }
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for BasisIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_graded() {
        let x0 = BasisIndex::Monomial(vec![0]);
        let x1 = BasisIndex::Monomial(vec![1]);
        let x2 = BasisIndex::Monomial(vec![2]);
        let gm1 = BasisIndex::Monomial(vec![-1]);
        assert!(x0 < x1 && x1 < x2);
        assert_eq!(gm1.degree(), 1);
        let mut v = vec![x2.clone(), x0.clone(), x1.clone()];
        v.sort();
        assert_eq!(v, vec![x0, x1, x2]);
    }

    #[test]
    fn pair_degree_adds() {
        let p = BasisIndex::Pair(
            Box::new(BasisIndex::Monomial(vec![-2])),
            Box::new(BasisIndex::Word(vec![0, 1, 0])),
        );
        assert_eq!(p.degree(), 5);
    }
}
