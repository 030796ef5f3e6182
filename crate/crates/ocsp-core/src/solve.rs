//! Exact solvers for ordering and coarsened values, the random-ordering
//! baseline, and the subsample-and-solve estimator.

use rand::Rng;

use crate::coarsen::{next_tuple, CoarsePredicate, Partition};
use crate::error::{Error, Result};
use crate::instance::OcspInstance;
use crate::perm::Permutation;
use crate::predicate::OrderingPredicate;
use crate::Rational;

/// Exact ordering search is guarded at this many variables (10! orderings).
pub const OCSP_EXACT_MAX_N: usize = 10;
/// Exact assignment search is guarded at `q^n` of this size.
pub const CSP_EXACT_LIMIT: u128 = 10_000_000;
/// Touched-variable budget under which subsampled instances solve exactly.
pub const SUBSOLVE_EXACT_MAX_N: usize = OCSP_EXACT_MAX_N;

const LOCAL_SEARCH_RESTARTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Ordering(Permutation),
    Assignment(Partition),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub optimum: Rational,
    pub witness: Witness,
    /// Search nodes visited.
    pub explored: u64,
    pub mode: SolveMode,
}

/// Lexicographic rank of the sorting permutation of distinct values, without
/// allocating: argsort into a stack buffer, then a Lehmer double loop.
fn sorted_rank(vals: &[usize]) -> u64 {
    debug_assert!(vals.len() <= 16);
    let k = vals.len();
    let mut idx = [0usize; 16];
    for (i, slot) in idx.iter_mut().enumerate().take(k) {
        *slot = i;
    }
    // Insertion sort indices by value.
    for i in 1..k {
        let mut j = i;
        while j > 0 && vals[idx[j - 1]] > vals[idx[j]] {
            idx.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut rank = 0u64;
    let mut suffix = 1u64;
    for i in (0..k).rev() {
        let smaller_after = idx[i + 1..k].iter().filter(|&&v| v < idx[i]).count() as u64;
        rank += smaller_after * suffix;
        suffix *= (k - i) as u64;
    }
    rank
}

/// Rank membership test, specialized to a bitmask when `k!` fits.
enum RankMatcher<'a> {
    Mask(u128),
    Set(&'a OrderingPredicate),
}

impl<'a> RankMatcher<'a> {
    fn new(predicate: &'a OrderingPredicate) -> Self {
        let total = crate::perm::factorial(predicate.arity()).expect("arity bounded");
        if total <= 128 {
            let mut mask = 0u128;
            for &r in predicate.satisfied_ranks() {
                mask |= 1 << r;
            }
            RankMatcher::Mask(mask)
        } else {
            RankMatcher::Set(predicate)
        }
    }

    #[inline]
    fn contains(&self, rank: u64) -> bool {
        match self {
            RankMatcher::Mask(mask) => mask >> rank & 1 == 1,
            RankMatcher::Set(predicate) => predicate.contains_rank(rank),
        }
    }
}

struct OrderingSearch<'a> {
    instance: &'a OcspInstance,
    matcher: RankMatcher<'a>,
    /// Constraint indices bucketed by their largest variable.
    by_max_var: Vec<Vec<usize>>,
    /// Upper bound on constraints still satisfiable once variables below a
    /// depth are placed: constraints sharing a variable set can never all be
    /// satisfied together, so each set contributes its best single-order
    /// count.
    remaining_bound: Vec<i64>,
    position_of: Vec<usize>,
    used: Vec<bool>,
    best_count: i64,
    best_witness: Vec<usize>,
    explored: u64,
}

impl<'a> OrderingSearch<'a> {
    fn new(instance: &'a OcspInstance) -> Self {
        let n = instance.n();
        let mut by_max_var = vec![Vec::new(); n];
        for (i, tuple) in instance.constraints().iter().enumerate() {
            let max = *tuple.iter().max().expect("arity >= 1");
            by_max_var[max].push(i);
        }
        // Group constraints on the same variable set; only one relative order
        // of that set can hold, capping the group's joint contribution.
        let matcher = RankMatcher::new(instance.predicate());
        let k = instance.arity();
        let mut groups: std::collections::BTreeMap<Vec<usize>, Vec<usize>> =
            std::collections::BTreeMap::new();
        for (i, tuple) in instance.constraints().iter().enumerate() {
            let mut key = tuple.clone();
            key.sort_unstable();
            groups.entry(key).or_default().push(i);
        }
        let mut group_cap_at = vec![0i64; n + 1];
        for (key, members) in &groups {
            let max_var = *key.last().expect("arity >= 1");
            let mut best_cap = 0i64;
            for order in crate::perm::Permutation::all(k).expect("arity bounded") {
                // Positions consistent with this relative order of the set.
                let mut pos = vec![0usize; n];
                for (rankpos, &slot) in order.image().iter().enumerate() {
                    pos[key[slot]] = rankpos;
                }
                let mut cap = 0i64;
                for &ci in members {
                    let tuple = &instance.constraints()[ci];
                    let mut vals = [0usize; 16];
                    for (j, &v) in tuple.iter().enumerate() {
                        vals[j] = pos[v];
                    }
                    if matcher.contains(sorted_rank(&vals[..k])) {
                        cap += 1;
                    }
                }
                best_cap = best_cap.max(cap);
            }
            group_cap_at[max_var] += best_cap;
        }
        let mut remaining_bound = vec![0i64; n + 1];
        for d in (0..n).rev() {
            remaining_bound[d] = remaining_bound[d + 1] + group_cap_at[d];
        }
        Self {
            instance,
            matcher,
            by_max_var,
            remaining_bound,
            position_of: vec![0; n],
            used: vec![false; n],
            best_count: -1,
            best_witness: Vec::new(),
            explored: 0,
        }
    }

    fn run(&mut self) {
        self.descend(0, 0);
    }

    fn descend(&mut self, depth: usize, satisfied: i64) {
        let n = self.instance.n();
        if depth == n {
            if satisfied > self.best_count {
                self.best_count = satisfied;
                self.best_witness = self.position_of.clone();
            }
            return;
        }
        let k = self.instance.arity();
        for pos in 0..n {
            if self.used[pos] {
                continue;
            }
            self.explored += 1;
            self.used[pos] = true;
            self.position_of[depth] = pos;
            // Constraints with largest variable == depth are now decided.
            let mut now_satisfied = satisfied;
            for &ci in &self.by_max_var[depth] {
                let tuple = &self.instance.constraints()[ci];
                let mut vals = [0usize; 16];
                for (j, &v) in tuple.iter().enumerate() {
                    vals[j] = self.position_of[v];
                }
                if self.matcher.contains(sorted_rank(&vals[..k])) {
                    now_satisfied += 1;
                }
            }
            // Even the per-set caps on undecided constraints cannot beat the
            // best found so far.
            if now_satisfied + self.remaining_bound[depth + 1] > self.best_count {
                self.descend(depth + 1, now_satisfied);
            }
            self.used[pos] = false;
            if self.best_count == self.instance.m() as i64 {
                break;
            }
        }
    }
}

/// Exact optimum over all orderings, with the lexicographically smallest
/// witness. Guarded at [`OCSP_EXACT_MAX_N`] variables.
pub fn solve_ocsp_exact(instance: &OcspInstance) -> Result<SolveReport> {
    if instance.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    if instance.n() > OCSP_EXACT_MAX_N {
        return Err(Error::TooLarge {
            size: instance.n() as u128,
            limit: OCSP_EXACT_MAX_N as u128,
        });
    }
    let mut search = OrderingSearch::new(instance);
    search.run();
    let witness = Permutation::from_image(search.best_witness).expect("search fills a bijection");
    Ok(SolveReport {
        optimum: Rational::new(search.best_count, instance.m() as i64),
        witness: Witness::Ordering(witness),
        explored: search.explored,
        mode: SolveMode::Exact,
    })
}

/// Exact optimum over all assignments in `[q]^n`, with the lexicographically
/// smallest witness. Guarded at `q^n <=` [`CSP_EXACT_LIMIT`].
pub fn solve_csp_exact(instance: &OcspInstance, f: &CoarsePredicate) -> Result<SolveReport> {
    if instance.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    if f.k() != instance.arity() {
        return Err(Error::ArityMismatch {
            expected: instance.arity(),
            found: f.k(),
        });
    }
    let q = f.q();
    let size = (q as u128).saturating_pow(instance.n() as u32);
    if size > CSP_EXACT_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: CSP_EXACT_LIMIT,
        });
    }
    let m = instance.m() as i64;
    let mut labels = vec![0usize; instance.n()];
    let mut restricted = vec![0usize; instance.arity()];
    let mut best_count = -1i64;
    let mut best_labels = labels.clone();
    let mut explored = 0u64;
    loop {
        explored += 1;
        let mut satisfied = 0i64;
        for tuple in instance.constraints() {
            for (slot, &v) in restricted.iter_mut().zip(tuple.iter()) {
                *slot = labels[v];
            }
            if f.eval(&restricted)? {
                satisfied += 1;
            }
        }
        if satisfied > best_count {
            best_count = satisfied;
            best_labels.copy_from_slice(&labels);
            if best_count == m {
                break;
            }
        }
        if !next_tuple(&mut labels, q) {
            break;
        }
    }
    Ok(SolveReport {
        optimum: Rational::new(best_count, m),
        witness: Witness::Assignment(Partition::new(q, best_labels)?),
        explored,
        mode: SolveMode::Exact,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineEstimate {
    /// Exact mean of the sampled values.
    pub mean: Rational,
    pub stderr: f64,
    pub trials: u64,
}

impl BaselineEstimate {
    pub fn mean_f64(&self) -> f64 {
        rational_to_f64(self.mean)
    }
}

pub(crate) fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Monte Carlo mean of the instance value under uniformly random orderings.
pub fn random_ordering_baseline<R: Rng + ?Sized>(
    instance: &OcspInstance,
    trials: u64,
    rng: &mut R,
) -> Result<BaselineEstimate> {
    if instance.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut sum = Rational::new(0, 1);
    let mut sum_sq = 0.0f64;
    for _ in 0..trials {
        let sigma = Permutation::random(instance.n(), rng);
        let v = instance.value(&sigma)?;
        sum += v;
        sum_sq += rational_to_f64(v).powi(2);
    }
    let mean = sum / Rational::new(trials as i64, 1);
    let mean_f = rational_to_f64(mean);
    let variance = (sum_sq / trials as f64 - mean_f * mean_f).max(0.0);
    let stderr = (variance / trials as f64).sqrt();
    Ok(BaselineEstimate {
        mean,
        stderr,
        trials,
    })
}

/// Uniform sample of `s` items without replacement from a stream.
pub fn reservoir_sample<T, R: Rng + ?Sized>(
    stream: impl IntoIterator<Item = T>,
    s: usize,
    rng: &mut R,
) -> Vec<T> {
    let mut reservoir: Vec<T> = Vec::with_capacity(s);
    for (i, item) in stream.into_iter().enumerate() {
        if reservoir.len() < s {
            reservoir.push(item);
        } else {
            let j = rng.gen_range(0..=i);
            if j < s {
                reservoir[j] = item;
            }
        }
    }
    reservoir
}

/// Reservoir-sample `s` constraints from the stream, restrict to the touched
/// variables, and solve the subinstance: exactly when it is small enough,
/// otherwise by adjacent-transposition local search (flagged heuristic).
pub fn subsample_and_solve<R: Rng + ?Sized>(
    n: usize,
    predicate: &OrderingPredicate,
    stream: impl IntoIterator<Item = Vec<usize>>,
    s: usize,
    rng: &mut R,
) -> Result<SolveReport> {
    if s == 0 {
        return Err(Error::InvalidParameter(
            "sample size must be positive".into(),
        ));
    }
    let sampled = reservoir_sample(stream, s, rng);
    if sampled.is_empty() {
        return Err(Error::EmptyStream);
    }
    // Compact the touched variables, preserving index order.
    let mut touched: Vec<usize> = sampled.iter().flatten().copied().collect();
    touched.sort_unstable();
    touched.dedup();
    if let Some(&max) = touched.last() {
        if max >= n {
            return Err(Error::IndexOutOfRange {
                index: max,
                bound: n,
            });
        }
    }
    let mut compact = vec![usize::MAX; n];
    for (new, &old) in touched.iter().enumerate() {
        compact[old] = new;
    }
    let constraints: Vec<Vec<usize>> = sampled
        .iter()
        .map(|tuple| tuple.iter().map(|&v| compact[v]).collect())
        .collect();
    let sub = OcspInstance::new(touched.len(), predicate.clone(), constraints)?;
    if sub.n() <= SUBSOLVE_EXACT_MAX_N {
        solve_ocsp_exact(&sub)
    } else {
        local_search(&sub, rng)
    }
}

fn local_search<R: Rng + ?Sized>(instance: &OcspInstance, rng: &mut R) -> Result<SolveReport> {
    let n = instance.n();
    let mut best_value = Rational::new(-1, 1);
    let mut best_witness = Permutation::identity(n);
    let mut explored = 0u64;
    for _ in 0..LOCAL_SEARCH_RESTARTS {
        let mut sigma = Permutation::random(n, rng);
        let mut value = instance.value(&sigma)?;
        explored += 1;
        loop {
            let mut improved = false;
            for i in 0..n - 1 {
                // Swap the variables occupying adjacent positions i, i+1.
                let mut image = sigma.image().to_vec();
                let a = image.iter().position(|&p| p == i).expect("bijection");
                let b = image.iter().position(|&p| p == i + 1).expect("bijection");
                image.swap(a, b);
                let candidate = Permutation::from_image(image)?;
                let cv = instance.value(&candidate)?;
                explored += 1;
                if cv > value {
                    sigma = candidate;
                    value = cv;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        if value > best_value {
            best_value = value;
            best_witness = sigma;
        }
    }
    Ok(SolveReport {
        optimum: best_value,
        witness: Witness::Ordering(best_witness),
        explored,
        mode: SolveMode::Heuristic,
    })
}
