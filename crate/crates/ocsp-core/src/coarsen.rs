//! Coarsening to a finite alphabet: predicates over `[q]^k`, partitions of the
//! variables, the two ordering/partition conversions, and constraint width.
//!
//! The coarsened predicate of an ordering predicate accepts a tuple iff its
//! entries are pairwise distinct and the sorting permutation of the tuple is
//! accepted. Small tables are materialized as bitsets; larger alphabets are
//! evaluated on demand with identical semantics.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::instance::OcspInstance;
use crate::perm::{ord, Permutation};
use crate::predicate::OrderingPredicate;
use crate::Rational;

/// Alphabet sizes with `q^k` at most this are stored as explicit tables.
pub const TABLE_LIMIT: u128 = 1 << 24;
/// Guard for full `[q]^k` enumerations (width, satisfied counts).
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

/// A vector in `[q]^n`, read either as a CSP assignment or as a partition of
/// the variables into blocks by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    q: usize,
    labels: Vec<usize>,
}

impl Partition {
    pub fn new(q: usize, labels: Vec<usize>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidAlphabet { q });
        }
        for &l in &labels {
            if l >= q {
                return Err(Error::IndexOutOfRange { index: l, bound: q });
            }
        }
        Ok(Self { q, labels })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// `b|_j`: the labels at the given indices.
    pub fn restrict(&self, tuple: &[usize]) -> Result<Vec<usize>> {
        tuple
            .iter()
            .map(|&v| {
                if v >= self.labels.len() {
                    Err(Error::IndexOutOfRange {
                        index: v,
                        bound: self.labels.len(),
                    })
                } else {
                    Ok(self.labels[v])
                }
            })
            .collect()
    }

    /// Indices carrying label `i`.
    pub fn block(&self, i: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == i)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.q];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Labels shifted by `t` modulo `q`.
    pub fn shifted(&self, t: usize) -> Partition {
        Partition {
            q: self.q,
            labels: self.labels.iter().map(|&l| (l + t) % self.q).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.q];
        for &l in &self.labels {
            if seen[l] {
                return false;
            }
            seen[l] = true;
        }
        true
    }
}

fn pow_u128(q: usize, k: usize) -> u128 {
    (q as u128).saturating_pow(k as u32)
}

/// Base-`q` code of a tuple, most significant entry first.
fn encode_base_q(tuple: &[usize], q: usize) -> u64 {
    let mut code = 0u64;
    for &a in tuple {
        code = code * q as u64 + a as u64;
    }
    code
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    /// Bitset over base-q codes of `[q]^k`.
    Table(Vec<u64>),
    /// Membership computed from the ordering predicate on demand.
    Derived(OrderingPredicate),
}

/// A predicate `f: [q]^k -> {0,1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarsePredicate {
    k: usize,
    q: usize,
    repr: Repr,
}

impl CoarsePredicate {
    /// The coarsening of an ordering predicate to alphabet `[q]`.
    ///
    /// For `q < arity` no tuple has distinct entries and the result is
    /// identically zero; see [`CoarsePredicate::is_unsatisfiable_alphabet`].
    pub fn coarsen(predicate: &OrderingPredicate, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidAlphabet { q });
        }
        let k = predicate.arity();
        let size = pow_u128(q, k);
        if size <= TABLE_LIMIT {
            let mut bits = vec![0u64; (size as usize).div_ceil(64)];
            let mut tuple = vec![0usize; k];
            loop {
                if tuple_distinct(&tuple) && predicate.evaluate(&ord(&tuple)?)? {
                    let code = encode_base_q(&tuple, q);
                    bits[(code / 64) as usize] |= 1 << (code % 64);
                }
                if !next_tuple(&mut tuple, q) {
                    break;
                }
            }
            Ok(Self {
                k,
                q,
                repr: Repr::Table(bits),
            })
        } else {
            Ok(Self {
                k,
                q,
                repr: Repr::Derived(predicate.clone()),
            })
        }
    }

    /// Explicit table from base-q codes of satisfied tuples.
    pub fn from_table(
        k: usize,
        q: usize,
        satisfied: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidAlphabet { q });
        }
        let size = pow_u128(q, k);
        if size > TABLE_LIMIT {
            return Err(Error::TooLarge {
                size,
                limit: TABLE_LIMIT,
            });
        }
        let mut bits = vec![0u64; (size as usize).div_ceil(64)];
        for code in satisfied {
            if code as u128 >= size {
                return Err(Error::OutOfRange {
                    value: code,
                    bound: size as u64,
                });
            }
            bits[(code / 64) as usize] |= 1 << (code % 64);
        }
        Ok(Self {
            k,
            q,
            repr: Repr::Table(bits),
        })
    }

    pub fn always_true(k: usize, q: usize) -> Result<Self> {
        let size = pow_u128(q, k);
        if size > TABLE_LIMIT {
            return Err(Error::TooLarge {
                size,
                limit: TABLE_LIMIT,
            });
        }
        Self::from_table(k, q, 0..size as u64)
    }

    pub fn always_false(k: usize, q: usize) -> Result<Self> {
        Self::from_table(k, q, std::iter::empty())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.repr, Repr::Table(_))
    }

    /// True when `q < k`, which forces the coarsened predicate to be zero.
    pub fn is_unsatisfiable_alphabet(&self) -> bool {
        self.q < self.k
    }

    /// The ordering predicate this table was derived from, if not materialized.
    pub fn derived_from(&self) -> Option<&OrderingPredicate> {
        match &self.repr {
            Repr::Derived(p) => Some(p),
            Repr::Table(_) => None,
        }
    }

    pub fn eval(&self, tuple: &[usize]) -> Result<bool> {
        if tuple.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: tuple.len(),
            });
        }
        for &a in tuple {
            if a >= self.q {
                return Err(Error::IndexOutOfRange {
                    index: a,
                    bound: self.q,
                });
            }
        }
        match &self.repr {
            Repr::Table(bits) => {
                let code = encode_base_q(tuple, self.q);
                Ok(bits[(code / 64) as usize] >> (code % 64) & 1 == 1)
            }
            Repr::Derived(predicate) => {
                if !tuple_distinct(tuple) {
                    return Ok(false);
                }
                predicate.evaluate(&ord(tuple)?)
            }
        }
    }

    /// Number of satisfied tuples in `[q]^k`.
    pub fn satisfied_count(&self) -> u64 {
        match &self.repr {
            Repr::Table(bits) => bits.iter().map(|w| w.count_ones() as u64).sum(),
            Repr::Derived(predicate) => {
                // Distinct-entry tuples with an accepted sorting permutation:
                // one per (value set, accepted order) pair.
                let k = self.k as u64;
                let q = self.q as u64;
                if q < k {
                    return 0;
                }
                let mut binom = 1u64;
                for i in 0..k {
                    binom = binom * (q - i) / (i + 1);
                }
                binom * predicate.support_size() as u64
            }
        }
    }

    /// Codes of satisfied tuples, for serialization. Materialized tables only.
    pub fn satisfied_codes(&self) -> Option<Vec<u64>> {
        match &self.repr {
            Repr::Table(bits) => {
                let size = pow_u128(self.q, self.k) as u64;
                let mut out = Vec::new();
                for code in 0..size {
                    if bits[(code / 64) as usize] >> (code % 64) & 1 == 1 {
                        out.push(code);
                    }
                }
                Some(out)
            }
            Repr::Derived(_) => None,
        }
    }

    /// Fraction of `[q]^k` satisfied: the random-assignment value.
    pub fn rho(&self) -> Result<Rational> {
        let size = pow_u128(self.q, self.k);
        if size > i64::MAX as u128 {
            return Err(Error::TooLarge {
                size,
                limit: i64::MAX as u128,
            });
        }
        Ok(Rational::new(self.satisfied_count() as i64, size as i64))
    }

    /// Width: the best base tuple's fraction of common shifts that satisfy
    /// the predicate, `max_b #{l in [q] : f(b + l) = 1} / q`.
    pub fn width(&self) -> Result<Rational> {
        let size = pow_u128(self.q, self.k);
        if size > ENUMERATION_LIMIT {
            return Err(Error::TooLarge {
                size,
                limit: ENUMERATION_LIMIT,
            });
        }
        let mut best = 0usize;
        let mut base = vec![0usize; self.k];
        let mut shifted = vec![0usize; self.k];
        loop {
            let mut hits = 0;
            for l in 0..self.q {
                for (s, &b) in shifted.iter_mut().zip(base.iter()) {
                    *s = (b + l) % self.q;
                }
                if self.eval(&shifted)? {
                    hits += 1;
                }
            }
            if hits > best {
                best = hits;
                if best == self.q {
                    break;
                }
            }
            if !next_tuple(&mut base, self.q) {
                break;
            }
        }
        Ok(Rational::new(best as i64, self.q as i64))
    }
}

fn tuple_distinct(tuple: &[usize]) -> bool {
    for (i, &a) in tuple.iter().enumerate() {
        if tuple[..i].contains(&a) {
            return false;
        }
    }
    true
}

/// Advance a base-q odometer; returns false after the last tuple.
pub fn next_tuple(tuple: &mut [usize], q: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < q {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Value of the assignment `b` on the instance's constraints under `f`.
pub fn csp_value(instance: &OcspInstance, f: &CoarsePredicate, b: &Partition) -> Result<Rational> {
    if instance.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    if b.n() != instance.n() {
        return Err(Error::LengthMismatch {
            expected: instance.n(),
            found: b.n(),
        });
    }
    if f.k() != instance.arity() {
        return Err(Error::ArityMismatch {
            expected: instance.arity(),
            found: f.k(),
        });
    }
    if b.q() != f.q() {
        return Err(Error::AlphabetMismatch {
            left: b.q(),
            right: f.q(),
        });
    }
    let mut satisfied = 0i64;
    for tuple in instance.constraints() {
        let restricted = b.restrict(tuple)?;
        if f.eval(&restricted)? {
            satisfied += 1;
        }
    }
    Ok(Rational::new(satisfied, instance.m() as i64))
}

/// Order the variables by block label, ascending variable index inside each
/// block. Lower labels come first, so `b_i < b_j` implies `sigma(i) < sigma(j)`.
pub fn lift_partition_to_ordering(b: &Partition) -> Permutation {
    let mut position = vec![0usize; b.n()];
    let mut next = 0;
    for label in 0..b.q() {
        for (v, &l) in b.labels().iter().enumerate() {
            if l == label {
                position[v] = next;
                next += 1;
            }
        }
    }
    Permutation::from_image(position).expect("positions form a bijection")
}

/// Coarsen an ordering into interval blocks: `b_i = floor(sigma(i) / floor(gamma*n))`.
///
/// The result is monotone (`sigma(i) < sigma(j)` implies `b_i <= b_j`) and
/// every block has size at most `floor(gamma*n)`.
pub fn interval_coarsen(sigma: &Permutation, gamma: Rational, q: usize) -> Result<Partition> {
    if q == 0 {
        return Err(Error::InvalidAlphabet { q });
    }
    let n = sigma.arity();
    let width = (gamma * Rational::new(n as i64, 1))
        .floor()
        .to_integer()
        .to_i64()
        .filter(|&w| w >= 0)
        .ok_or(Error::BlockTooSmall)? as usize;
    if width == 0 {
        return Err(Error::BlockTooSmall);
    }
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = sigma.apply(i) / width;
        if label >= q {
            return Err(Error::AlphabetTooSmall { label, q });
        }
        labels.push(label);
    }
    Partition::new(q, labels)
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

    #[test]
    fn coarsened_mas_table() {
        let f = CoarsePredicate::coarsen(&OrderingPredicate::mas(), 3).unwrap();
        assert!(f.is_materialized());
        // Satisfied tuples are exactly the strictly increasing pairs.
        let mut satisfied = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                if f.eval(&[x, y]).unwrap() {
                    satisfied.push((x, y));
                }
            }
        }
        assert_eq!(satisfied, vec![(0, 1), (0, 2), (1, 2)]);
        for q in 2..=9 {
            let f = CoarsePredicate::coarsen(&OrderingPredicate::mas(), q).unwrap();
            assert_eq!(f.satisfied_count(), (q * (q - 1) / 2) as u64);
        }
    }

    #[test]
    fn coarsened_betweenness_small_alphabet_is_zero() {
        let f = CoarsePredicate::coarsen(&OrderingPredicate::betweenness(), 2).unwrap();
        assert!(f.is_unsatisfiable_alphabet());
        assert_eq!(f.satisfied_count(), 0);
        let mut tuple = vec![0usize; 3];
        loop {
            assert!(!f.eval(&tuple).unwrap());
            if !next_tuple(&mut tuple, 2) {
                break;
            }
        }
    }

    #[test]
    fn derived_and_table_agree() {
        // Force the derived representation by taking q^k over the table limit,
        // then compare on a sample of tuples against a small-table sibling.
        let pred = OrderingPredicate::betweenness();
        let big = CoarsePredicate {
            k: 3,
            q: 7,
            repr: Repr::Derived(pred.clone()),
        };
        let table = CoarsePredicate::coarsen(&pred, 7).unwrap();
        assert!(table.is_materialized());
        let mut tuple = vec![0usize; 3];
        loop {
            assert_eq!(big.eval(&tuple).unwrap(), table.eval(&tuple).unwrap());
            if !next_tuple(&mut tuple, 7) {
                break;
            }
        }
        assert_eq!(big.satisfied_count(), table.satisfied_count());
    }

    #[test]
    fn csp_value_cases() {
        let cycle = mas_instance(3, &[(0, 1), (1, 2), (2, 0)]);
        let f2 = CoarsePredicate::coarsen(&OrderingPredicate::mas(), 2).unwrap();
        let b = Partition::new(2, vec![0, 1, 0]).unwrap();
        assert_eq!(csp_value(&cycle, &f2, &b).unwrap(), Rational::new(1, 3));

        let zero = CoarsePredicate::always_false(2, 2).unwrap();
        assert_eq!(csp_value(&cycle, &zero, &b).unwrap(), Rational::new(0, 1));

        let path = mas_instance(3, &[(0, 1), (1, 2)]);
        let f3 = CoarsePredicate::coarsen(&OrderingPredicate::mas(), 3).unwrap();
        let inc = Partition::new(3, vec![0, 1, 2]).unwrap();
        assert_eq!(csp_value(&path, &f3, &inc).unwrap(), Rational::new(1, 1));
    }

    #[test]
    fn lift_partition_cases() {
        let b = Partition::new(3, vec![2, 0, 1]).unwrap();
        let sigma = lift_partition_to_ordering(&b);
        assert_eq!(sigma.apply(1), 0);
        assert_eq!(sigma.apply(2), 1);
        assert_eq!(sigma.apply(0), 2);

        let constant = Partition::new(2, vec![0, 0, 0, 0]).unwrap();
        assert_eq!(
            lift_partition_to_ordering(&constant),
            Permutation::identity(4)
        );

        let b = Partition::new(2, vec![0, 1, 0, 1]).unwrap();
        let sigma = lift_partition_to_ordering(&b);
        assert_eq!(
            (
                sigma.apply(0),
                sigma.apply(2),
                sigma.apply(1),
                sigma.apply(3)
            ),
            (0, 1, 2, 3)
        );
    }

    #[test]
    fn interval_coarsen_cases() {
        // floor(0.3 * 10) = 3, so position 7 lands in block 2 and 9 in block 3.
        let gamma = Rational::new(3, 10);
        let mut image: Vec<usize> = (0..10).collect();
        image.swap(0, 7);
        let sigma = Permutation::from_image(image).unwrap();
        let b = interval_coarsen(&sigma, gamma, 4).unwrap();
        assert_eq!(b.label(0), 2);
        let sigma9 = Permutation::identity(10);
        let b9 = interval_coarsen(&sigma9, gamma, 4).unwrap();
        assert_eq!(b9.label(9), 3);

        // gamma >= 1 puts everything in block 0.
        let whole = interval_coarsen(&sigma9, Rational::new(1, 1), 1).unwrap();
        assert!(whole.labels().iter().all(|&l| l == 0));

        assert_eq!(
            interval_coarsen(&sigma9, Rational::new(1, 100), 4).unwrap_err(),
            Error::BlockTooSmall
        );
        assert!(matches!(
            interval_coarsen(&sigma9, gamma, 3),
            Err(Error::AlphabetTooSmall { label: 3, q: 3 })
        ));
    }

    #[test]
    fn interval_coarsen_is_monotone_with_small_blocks() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let sigma = Permutation::random(9, &mut rng);
            let gamma = Rational::new(1, 3);
            let b = interval_coarsen(&sigma, gamma, 3).unwrap();
            for i in 0..9 {
                for j in 0..9 {
                    if sigma.apply(i) < sigma.apply(j) {
                        assert!(b.label(i) <= b.label(j));
                    }
                }
            }
            let cap = 3; // floor(gamma * n)
            assert!(b.block_sizes().iter().all(|&s| s <= cap));
        }
    }

    #[test]
    fn width_cases() {
        let f5 = CoarsePredicate::coarsen(&OrderingPredicate::mas(), 5).unwrap();
        // Enumerate all 25 base pairs directly as an independent check.
        let mut oracle_best = 0;
        for x in 0..5u64 {
            for y in 0..5u64 {
                let hits = (0..5u64).filter(|l| (x + l) % 5 < (y + l) % 5).count();
                oracle_best = oracle_best.max(hits);
            }
        }
        assert_eq!(oracle_best, 4);
        assert_eq!(f5.width().unwrap(), Rational::new(4, 5));

        let ones = CoarsePredicate::always_true(2, 4).unwrap();
        assert_eq!(ones.width().unwrap(), Rational::new(1, 1));

        // Width of a coarsened predicate with nonempty support meets 1-(k-1)/q.
        for q in 3..=7 {
            let f = CoarsePredicate::coarsen(&OrderingPredicate::betweenness(), q).unwrap();
            let bound = Rational::new(1, 1) - Rational::new(2, q as i64);
            assert!(f.width().unwrap() >= bound, "q={q}");
        }
    }

    #[test]
    fn width_at_least_rho_when_nonzero() {
        for q in 2..=5 {
            for pred in [OrderingPredicate::mas(), OrderingPredicate::betweenness()] {
                let f = CoarsePredicate::coarsen(&pred, q).unwrap();
                if f.satisfied_count() > 0 {
                    assert!(f.width().unwrap() >= f.rho().unwrap());
                }
            }
        }
    }

    #[test]
    fn monotonicity_lift_dominates_csp_value_exhaustive() {
        // Every assignment: ordering value of the lifted permutation is at
        // least the coarse value, for every small instance tried.
        let instances = [
            mas_instance(4, &[(0, 1), (1, 2), (2, 0), (3, 0)]),
            mas_instance(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
            OcspInstance::new(
                6,
                OrderingPredicate::betweenness(),
                vec![vec![0, 1, 2], vec![3, 4, 5], vec![2, 3, 1], vec![5, 0, 2]],
            )
            .unwrap(),
        ];
        for inst in &instances {
            for q in 2..=3 {
                let f = CoarsePredicate::coarsen(inst.predicate(), q).unwrap();
                let mut labels = vec![0usize; inst.n()];
                loop {
                    let b = Partition::new(q, labels.clone()).unwrap();
                    let coarse = csp_value(inst, &f, &b).unwrap();
                    let lifted = lift_partition_to_ordering(&b);
                    let fine = inst.value(&lifted).unwrap();
                    assert!(fine >= coarse, "instance n={} q={q} b={labels:?}", inst.n());
                    // Proof step: every constraint satisfied by b is satisfied
                    // by the lifted ordering.
                    for tuple in inst.constraints() {
                        let restricted = b.restrict(tuple).unwrap();
                        if f.eval(&restricted).unwrap() {
                            assert!(crate::instance::evaluate_constraint(
                                inst.predicate(),
                                &lifted,
                                tuple
                            )
                            .unwrap());
                        }
                    }
                    if !next_tuple(&mut labels, q) {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn shifted_partition_wraps() {
        let b = Partition::new(3, vec![0, 1, 2, 2]).unwrap();
        assert_eq!(b.shifted(2).labels(), &[2, 0, 1, 1]);
        assert_eq!(b.shifted(3).labels(), b.labels());
    }

    #[test]
    fn table_limit_is_respected() {
        // 9^8 > 2^24: the coarsening stays derived.
        let pred = OrderingPredicate::all_ones(8).unwrap();
        let f = CoarsePredicate::coarsen(&pred, 9).unwrap();
        assert!(!f.is_materialized());
        assert!(f.derived_from().is_some());
    }

    #[test]
    fn factorial_guard() {
        assert!(factorial(21).is_err());
    }
}
