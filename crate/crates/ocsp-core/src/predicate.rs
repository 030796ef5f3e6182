//! Ordering predicates: subsets of `S_k` stored as lexicographic ranks.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::perm::{factorial, ord, Permutation};
use crate::Rational;

/// A predicate on permutations of arity `k`, stored as the set of
/// lexicographic ranks it accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingPredicate {
    k: usize,
    satisfied: BTreeSet<u64>,
}

impl OrderingPredicate {
    pub fn new(k: usize, ranks: impl IntoIterator<Item = u64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPredicate("arity must be positive".into()));
        }
        let total = factorial(k).map_err(|_| {
            Error::InvalidPredicate(format!("arity {k} too large for rank arithmetic"))
        })?;
        let satisfied: BTreeSet<u64> = ranks.into_iter().collect();
        if let Some(&r) = satisfied.iter().next_back() {
            if r >= total {
                return Err(Error::InvalidPredicate(format!(
                    "rank {r} out of range for arity {k} (k! = {total})"
                )));
            }
        }
        Ok(Self { k, satisfied })
    }

    /// Forward-edge predicate on pairs: accepts exactly `[0 1]`.
    pub fn mas() -> Self {
        Self {
            k: 2,
            satisfied: BTreeSet::from([0]),
        }
    }

    /// Betweenness on triples: accepts `[0 1 2]` and `[2 1 0]`.
    pub fn betweenness() -> Self {
        let asc = Permutation::identity(3).rank();
        let desc = Permutation::from_image(vec![2, 1, 0]).unwrap().rank();
        Self {
            k: 3,
            satisfied: BTreeSet::from([asc, desc]),
        }
    }

    pub fn all_ones(k: usize) -> Result<Self> {
        let total = factorial(k)?;
        Self::new(k, 0..total)
    }

    pub fn from_support<'a>(
        k: usize,
        support: impl IntoIterator<Item = &'a Permutation>,
    ) -> Result<Self> {
        let mut ranks = Vec::new();
        for pi in support {
            if pi.arity() != k {
                return Err(Error::ArityMismatch {
                    expected: k,
                    found: pi.arity(),
                });
            }
            ranks.push(pi.rank());
        }
        Self::new(k, ranks)
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn satisfied_ranks(&self) -> &BTreeSet<u64> {
        &self.satisfied
    }

    pub fn contains_rank(&self, rank: u64) -> bool {
        self.satisfied.contains(&rank)
    }

    pub fn support_size(&self) -> usize {
        self.satisfied.len()
    }

    /// The accepted permutations, in rank order.
    pub fn support(&self) -> Vec<Permutation> {
        self.satisfied
            .iter()
            .map(|&r| Permutation::unrank(self.k, r).expect("stored ranks are valid"))
            .collect()
    }

    pub fn evaluate(&self, pi: &Permutation) -> Result<bool> {
        if pi.arity() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: pi.arity(),
            });
        }
        Ok(self.satisfied.contains(&pi.rank()))
    }

    /// Evaluate on a tuple of distinct values via its sorting permutation.
    pub fn evaluate_tuple<T: Ord>(&self, a: &[T]) -> Result<bool> {
        if a.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: a.len(),
            });
        }
        self.evaluate(&ord(a)?)
    }

    /// Fraction of `S_k` accepted: the random-ordering value.
    pub fn rho(&self) -> Rational {
        let total = factorial(self.k).expect("arity validated at construction");
        Rational::new(self.satisfied.len() as i64, total as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mas_ranks() {
        let mas = OrderingPredicate::mas();
        assert_eq!(mas.arity(), 2);
        assert!(mas.contains_rank(0));
        assert!(!mas.contains_rank(1));
        assert!(mas.evaluate(&Permutation::identity(2)).unwrap());
        assert!(!mas
            .evaluate(&Permutation::from_image(vec![1, 0]).unwrap())
            .unwrap());
    }

    #[test]
    fn betweenness_ranks() {
        let btwn = OrderingPredicate::betweenness();
        let accepted: Vec<_> = btwn.support();
        assert_eq!(accepted.len(), 2);
        assert_eq!(accepted[0], Permutation::identity(3));
        assert_eq!(accepted[1], Permutation::from_image(vec![2, 1, 0]).unwrap());
    }

    #[test]
    fn rho_values() {
        assert_eq!(OrderingPredicate::mas().rho(), Rational::new(1, 2));
        assert_eq!(OrderingPredicate::betweenness().rho(), Rational::new(1, 3));
        assert_eq!(
            OrderingPredicate::all_ones(3).unwrap().rho(),
            Rational::new(1, 1)
        );
    }

    #[test]
    fn rejects_bad_ranks() {
        assert!(OrderingPredicate::new(2, [2]).is_err());
        assert!(OrderingPredicate::new(0, []).is_err());
        assert!(OrderingPredicate::new(3, [5]).is_ok());
    }

    #[test]
    fn evaluate_tuple_uses_ord() {
        let mas = OrderingPredicate::mas();
        assert!(mas.evaluate_tuple(&[3, 9]).unwrap());
        assert!(!mas.evaluate_tuple(&[9, 3]).unwrap());
        assert_eq!(
            mas.evaluate_tuple(&[4, 4]).unwrap_err(),
            Error::DuplicateEntries
        );
    }
}
