//! The seeded YES/NO instance distributions.
//!
//! Both distributions draw a hidden label vector `b` and a sequence of
//! independent partial hypermatchings. In a YES sample an edge survives with
//! probability `1/q` when its labels form a shifted contiguous run (in the
//! pattern order); in a NO sample every edge survives with probability
//! `1/q^k` and `b` is irrelevant. The surviving edges, matching by matching
//! in sampled order, are the constraint stream.
//!
//! Sampling draws one child seed per matching from the caller's generator, so
//! matchings can be regenerated independently while the stream stays
//! byte-identical for a fixed seed.

use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coarsen::Partition;
use crate::error::{Error, Result};
use crate::hypergraph::{sample_hypermatching, Hypermatching};
use crate::instance::OcspInstance;
use crate::perm::Permutation;
use crate::predicate::OrderingPredicate;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionParams {
    pub q: usize,
    pub n: usize,
    pub alpha: Rational,
    /// Number of hypermatching rounds.
    pub rounds: usize,
    pub predicate: OrderingPredicate,
    /// Pattern permutation for YES sampling; must be accepted by the predicate.
    pub pattern: Option<Permutation>,
}

impl DistributionParams {
    pub fn k(&self) -> usize {
        self.predicate.arity()
    }

    /// Edges per matching: `floor(alpha * n)`.
    pub fn edge_count(&self) -> usize {
        let scaled = self.alpha * Rational::new(self.n as i64, 1);
        scaled.floor().to_integer().to_i64().map_or(0, |v| v.max(0)) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if self.q == 0 {
            return Err(Error::InvalidAlphabet { q: self.q });
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if self.rounds == 0 {
            return Err(Error::InvalidParameter("rounds must be positive".into()));
        }
        let zero = Rational::new(0, 1);
        let max_alpha = Rational::new(1, k as i64);
        if self.alpha <= zero || self.alpha > max_alpha {
            return Err(Error::InvalidParameter(format!(
                "alpha {} outside (0, 1/{k}]",
                self.alpha
            )));
        }
        if let Some(pattern) = &self.pattern {
            if pattern.arity() != k {
                return Err(Error::ArityMismatch {
                    expected: k,
                    found: pattern.arity(),
                });
            }
            if !self.predicate.evaluate(pattern)? {
                return Err(Error::InvalidParameter(
                    "pattern permutation is not accepted by the predicate".into(),
                ));
            }
        }
        Ok(())
    }

    fn validate_yes(&self) -> Result<&Permutation> {
        self.validate()?;
        if self.k() > self.q {
            return Err(Error::InvalidParameter(format!(
                "contiguous runs need k <= q (k={}, q={})",
                self.k(),
                self.q
            )));
        }
        self.pattern.as_ref().ok_or_else(|| {
            Error::InvalidParameter("YES sampling requires a pattern permutation".into())
        })
    }
}

/// The contiguous run `(ell, ell+1, ..., ell+k-1)` modulo `q`.
///
/// The run may wrap, in which case its sorting permutation is not the
/// identity.
pub fn contiguous_tuple(q: usize, k: usize, ell: usize) -> Result<Vec<usize>> {
    if ell >= q {
        return Err(Error::OutOfRange {
            value: ell as u64,
            bound: q as u64,
        });
    }
    if k > q {
        return Err(Error::OutOfRange {
            value: k as u64,
            bound: q as u64,
        });
    }
    Ok((0..k).map(|i| (ell + i) % q).collect())
}

/// Reorder a tuple by a permutation: entry `i` of the result is
/// `a[pi^{-1}(i)]`. For distinct entries this composes sorting permutations:
/// `ord(permute_tuple(a, pi)) = pi.compose(ord(a))`.
pub fn permute_tuple<T: Clone>(a: &[T], pi: &Permutation) -> Result<Vec<T>> {
    if a.len() != pi.arity() {
        return Err(Error::ArityMismatch {
            expected: pi.arity(),
            found: a.len(),
        });
    }
    let inv = pi.invert();
    Ok((0..a.len()).map(|i| a[inv.apply(i)].clone()).collect())
}

/// The unique shift `ell` with `b|_j` equal to the permuted contiguous run,
/// if one exists. The first entry of the run pins the shift, so at most one
/// candidate needs checking.
pub fn identifier(b: &Partition, tuple: &[usize], pattern: &Permutation) -> Result<Option<usize>> {
    let k = pattern.arity();
    if tuple.len() != k {
        return Err(Error::ArityMismatch {
            expected: k,
            found: tuple.len(),
        });
    }
    let q = b.q();
    if k > q {
        return Ok(None);
    }
    let labels = b.restrict(tuple)?;
    let inv = pattern.invert();
    // labels[i] must equal inv(i) + ell (mod q); read ell off position 0.
    let anchor = inv.apply(0);
    let ell = (labels[0] + q - anchor) % q;
    for (i, &l) in labels.iter().enumerate() {
        if l != (inv.apply(i) + ell) % q {
            return Ok(None);
        }
    }
    Ok(Some(ell))
}

#[derive(Debug, Clone)]
pub struct YesSample {
    pub params: DistributionParams,
    pub instance: OcspInstance,
    pub hidden_partition: Partition,
    pub matchings: Vec<Hypermatching>,
    /// Survival mask per matching, aligned with its edges.
    pub kept: Vec<Vec<bool>>,
}

#[derive(Debug, Clone)]
pub struct NoSample {
    pub params: DistributionParams,
    pub instance: OcspInstance,
    pub matchings: Vec<Hypermatching>,
    pub kept: Vec<Vec<bool>>,
}

fn uniform_partition<R: Rng + ?Sized>(q: usize, n: usize, rng: &mut R) -> Partition {
    let labels = (0..n).map(|_| rng.gen_range(0..q)).collect();
    Partition::new(q, labels).expect("labels drawn below q")
}

fn child_seeds<R: Rng + ?Sized>(rounds: usize, rng: &mut R) -> Vec<u64> {
    (0..rounds).map(|_| rng.gen()).collect()
}

pub fn sample_yes<R: Rng + ?Sized>(params: &DistributionParams, rng: &mut R) -> Result<YesSample> {
    let pattern = params.validate_yes()?.clone();
    let (q, n, k) = (params.q, params.n, params.k());
    let edge_count = params.edge_count();
    if k.checked_mul(edge_count).is_none_or(|need| need > n) {
        return Err(Error::TooManyEdges {
            edges: edge_count,
            k,
            n,
        });
    }
    let b = uniform_partition(q, n, rng);
    let seeds = child_seeds(params.rounds, rng);
    let mut matchings = Vec::with_capacity(params.rounds);
    let mut kept = Vec::with_capacity(params.rounds);
    let mut constraints = Vec::new();
    for seed in seeds {
        let mut child = ChaCha8Rng::seed_from_u64(seed);
        let matching = sample_hypermatching(n, k, edge_count, &mut child)?;
        let mut mask = Vec::with_capacity(edge_count);
        for edge in matching.edges() {
            let keep = identifier(&b, edge, &pattern)?.is_some() && child.gen_range(0..q) == 0;
            if keep {
                constraints.push(edge.clone());
            }
            mask.push(keep);
        }
        matchings.push(matching);
        kept.push(mask);
    }
    let instance = OcspInstance::new(n, params.predicate.clone(), constraints)?;
    Ok(YesSample {
        params: params.clone(),
        instance,
        hidden_partition: b,
        matchings,
        kept,
    })
}

pub fn sample_no<R: Rng + ?Sized>(params: &DistributionParams, rng: &mut R) -> Result<NoSample> {
    params.validate()?;
    let (q, n, k) = (params.q, params.n, params.k());
    let edge_count = params.edge_count();
    if k.checked_mul(edge_count).is_none_or(|need| need > n) {
        return Err(Error::TooManyEdges {
            edges: edge_count,
            k,
            n,
        });
    }
    // The hidden labels play no role here; drawn anyway so YES and NO share
    // the same sampling skeleton.
    let _b = uniform_partition(q, n, rng);
    let seeds = child_seeds(params.rounds, rng);
    let mut matchings = Vec::with_capacity(params.rounds);
    let mut kept = Vec::with_capacity(params.rounds);
    let mut constraints = Vec::new();
    for seed in seeds {
        let mut child = ChaCha8Rng::seed_from_u64(seed);
        let matching = sample_hypermatching(n, k, edge_count, &mut child)?;
        let mut mask = Vec::with_capacity(edge_count);
        for edge in matching.edges() {
            // k independent draws: survival probability exactly q^-k.
            let mut keep = true;
            for _ in 0..k {
                if child.gen_range(0..q) != 0 {
                    keep = false;
                }
            }
            if keep {
                constraints.push(edge.clone());
            }
            mask.push(keep);
        }
        matchings.push(matching);
        kept.push(mask);
    }
    let instance = OcspInstance::new(n, params.predicate.clone(), constraints)?;
    Ok(NoSample {
        params: params.clone(),
        instance,
        matchings,
        kept,
    })
}

/// Evaluate every shifted copy of the hidden labels as a coarse assignment
/// and return the best shift with its value (smallest shift on ties).
///
/// The returned value is always at least `1 - (k-1)/q`: shifts rotate every
/// constraint's run through the non-wrapping range.
pub fn best_shifted_assignment(sample: &YesSample) -> Result<(usize, Rational)> {
    if sample.instance.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    let q = sample.params.q;
    let f = crate::coarsen::CoarsePredicate::coarsen(&sample.params.predicate, q)?;
    let mut best: Option<(usize, Rational)> = None;
    for t in 0..q {
        let shifted = sample.hidden_partition.shifted(t);
        let value = crate::coarsen::csp_value(&sample.instance, &f, &shifted)?;
        match &best {
            Some((_, v)) if *v >= value => {}
            _ => best = Some((t, value)),
        }
    }
    Ok(best.expect("q >= 1"))
}
