//! Instances: a variable count, one ordering predicate, and a multiset of
//! constraints given as tuples of distinct variable indices.

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::perm::{ord, Permutation};
use crate::predicate::OrderingPredicate;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OcspInstance {
    n: usize,
    predicate: OrderingPredicate,
    constraints: Vec<Vec<usize>>,
}

/// Check one constraint tuple: distinct entries, all below `n`, arity `k`.
fn validate_constraint(tuple: &[usize], n: usize, k: usize) -> Result<()> {
    if tuple.len() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            found: tuple.len(),
        });
    }
    for (i, &v) in tuple.iter().enumerate() {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, bound: n });
        }
        if tuple[..i].contains(&v) {
            return Err(Error::DuplicateEntries);
        }
    }
    Ok(())
}

impl OcspInstance {
    pub fn new(
        n: usize,
        predicate: OrderingPredicate,
        constraints: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let k = predicate.arity();
        if constraints.len() as u128 > i64::MAX as u128 {
            return Err(Error::TooLarge {
                size: constraints.len() as u128,
                limit: i64::MAX as u128,
            });
        }
        for tuple in &constraints {
            validate_constraint(tuple, n, k)?;
        }
        Ok(Self {
            n,
            predicate,
            constraints,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.predicate.arity()
    }

    pub fn predicate(&self) -> &OrderingPredicate {
        &self.predicate
    }

    pub fn constraints(&self) -> &[Vec<usize>] {
        &self.constraints
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    /// The constraint hypergraph: same vertex set, one edge per constraint.
    pub fn hypergraph(&self) -> Hypergraph {
        Hypergraph::new(self.n, self.arity(), self.constraints.clone())
            .expect("constraints validated at construction")
    }

    /// Fraction of constraints satisfied by the ordering `sigma`, exactly.
    pub fn value(&self, sigma: &Permutation) -> Result<Rational> {
        if self.constraints.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if sigma.arity() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: sigma.arity(),
            });
        }
        let mut satisfied = 0i64;
        for tuple in &self.constraints {
            if evaluate_constraint(&self.predicate, sigma, tuple)? {
                satisfied += 1;
            }
        }
        Ok(Rational::new(satisfied, self.constraints.len() as i64))
    }
}

/// Whether the ordering `sigma` satisfies the constraint `tuple` under
/// `predicate`: the induced order of the positions `sigma(j_0), ...` must be
/// accepted.
pub fn evaluate_constraint(
    predicate: &OrderingPredicate,
    sigma: &Permutation,
    tuple: &[usize],
) -> Result<bool> {
    if tuple.len() != predicate.arity() {
        return Err(Error::ArityMismatch {
            expected: predicate.arity(),
            found: tuple.len(),
        });
    }
    let mut positions = Vec::with_capacity(tuple.len());
    for (i, &v) in tuple.iter().enumerate() {
        if v >= sigma.arity() {
            return Err(Error::IndexOutOfRange {
                index: v,
                bound: sigma.arity(),
            });
        }
        if tuple[..i].contains(&v) {
            return Err(Error::DuplicateEntries);
        }
        positions.push(sigma.apply(v));
    }
    predicate.evaluate(&ord(&positions)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::factorial;

    fn mas_instance(n: usize, edges: &[(usize, usize)]) -> OcspInstance {
        OcspInstance::new(
            n,
            OrderingPredicate::mas(),
            edges.iter().map(|&(u, v)| vec![u, v]).collect(),
        )
        .unwrap()
    }

    /// Exhaustive maximum of `value` over all orderings, computed without the
    /// rank machinery: direct position comparisons per predicate.
    fn brute_force_max(inst: &OcspInstance) -> Rational {
        let n = inst.n();
        let total = factorial(n).unwrap();
        let mut best = Rational::new(0, 1);
        for r in 0..total {
            let sigma = Permutation::unrank(n, r).unwrap();
            let v = inst.value(&sigma).unwrap();
            if v > best {
                best = v;
            }
        }
        best
    }

    #[test]
    fn evaluate_constraint_cases() {
        let mas = OrderingPredicate::mas();
        let id3 = Permutation::identity(3);
        assert!(evaluate_constraint(&mas, &id3, &[0, 2]).unwrap());
        assert!(!evaluate_constraint(&mas, &id3, &[2, 0]).unwrap());
        let btwn = OrderingPredicate::betweenness();
        assert!(evaluate_constraint(&btwn, &id3, &[0, 1, 2]).unwrap());
        assert!(!evaluate_constraint(&btwn, &id3, &[1, 0, 2]).unwrap());
        assert!(matches!(
            evaluate_constraint(&mas, &id3, &[0, 3]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert_eq!(
            evaluate_constraint(&mas, &id3, &[1, 1]).unwrap_err(),
            Error::DuplicateEntries
        );
    }

    #[test]
    fn value_transitive_tournament() {
        let inst = mas_instance(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(
            inst.value(&Permutation::identity(3)).unwrap(),
            Rational::new(1, 1)
        );
    }

    #[test]
    fn value_directed_three_cycle() {
        let inst = mas_instance(3, &[(0, 1), (1, 2), (2, 0)]);
        let id = inst.value(&Permutation::identity(3)).unwrap();
        assert_eq!(id, Rational::new(2, 3));
        // No ordering beats 2/3 on the cycle.
        assert_eq!(brute_force_max(&inst), Rational::new(2, 3));
    }

    #[test]
    fn value_betweenness_pair() {
        let inst = OcspInstance::new(
            3,
            OrderingPredicate::betweenness(),
            vec![vec![0, 1, 2], vec![1, 0, 2]],
        )
        .unwrap();
        assert_eq!(
            inst.value(&Permutation::identity(3)).unwrap(),
            Rational::new(1, 2)
        );
        // The two constraints are never simultaneously satisfiable.
        assert_eq!(brute_force_max(&inst), Rational::new(1, 2));
    }

    #[test]
    fn empty_instance_value_is_error() {
        let inst = mas_instance(3, &[]);
        assert_eq!(
            inst.value(&Permutation::identity(3)).unwrap_err(),
            Error::EmptyInstance
        );
    }

    #[test]
    fn constructor_validation() {
        assert!(OcspInstance::new(3, OrderingPredicate::mas(), vec![vec![0, 3]]).is_err());
        assert!(OcspInstance::new(3, OrderingPredicate::mas(), vec![vec![1, 1]]).is_err());
        assert!(OcspInstance::new(3, OrderingPredicate::mas(), vec![vec![0, 1, 2]]).is_err());
        // Duplicate constraints are multiset semantics, not an error.
        assert!(
            OcspInstance::new(3, OrderingPredicate::mas(), vec![vec![0, 1], vec![0, 1]]).is_ok()
        );
    }

    #[test]
    fn value_invariant_under_relabeling() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let inst = mas_instance(5, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 0)]);
        for _ in 0..50 {
            let relabel = Permutation::random(5, &mut rng);
            let sigma = Permutation::random(5, &mut rng);
            // Apply the same bijection to variables in sigma and constraints.
            let relabeled = OcspInstance::new(
                5,
                OrderingPredicate::mas(),
                inst.constraints()
                    .iter()
                    .map(|c| c.iter().map(|&v| relabel.apply(v)).collect())
                    .collect(),
            )
            .unwrap();
            let sigma_relabeled = sigma.compose(&relabel.invert()).unwrap();
            assert_eq!(
                inst.value(&sigma).unwrap(),
                relabeled.value(&sigma_relabeled).unwrap()
            );
        }
    }
}
