//! Ordered hypergraphs, uniform partial hypermatchings, and the two
//! small-set expansion notions used to separate ordering values from
//! coarsened values.
//!
//! An edge *lies on* a vertex set when it touches two distinct vertices of the
//! set; it *congregates* on a partition when it lies on one of the blocks.
//! Certification computes the minimal `delta` such that every small set (or
//! small-block partition) is lain on (congregated on) by at most a `delta`
//! fraction of the edges — exactly for small graphs, as a sampled lower bound
//! otherwise.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coarsen::Partition;
use crate::error::{Error, Result};
use crate::Rational;

/// Exact set certification scans subsets; guard on the vertex count.
pub const SSHE_EXACT_MAX_N: usize = 24;
/// Exact partition certification guard: `q^n` at most this.
pub const SPHE_EXACT_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, k: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "edge arity must be positive".into(),
            ));
        }
        for edge in &edges {
            if edge.len() != k {
                return Err(Error::ArityMismatch {
                    expected: k,
                    found: edge.len(),
                });
            }
            for (i, &v) in edge.iter().enumerate() {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, bound: n });
                }
                if edge[..i].contains(&v) {
                    return Err(Error::DuplicateEntries);
                }
            }
        }
        Ok(Self { n, k, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Number of edges incident on at least two distinct vertices of `s`.
    pub fn lying_count(&self, s: &BTreeSet<usize>) -> usize {
        self.edges
            .iter()
            .filter(|edge| edge.iter().filter(|v| s.contains(v)).count() >= 2)
            .count()
    }

    /// Number of edges with two distinct vertices in a single block of `b`.
    pub fn congregating_count(&self, b: &Partition) -> Result<usize> {
        if b.n() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: b.n(),
            });
        }
        let mut count = 0;
        let mut seen = vec![0u32; b.q()];
        let mut stamp = 0u32;
        for edge in &self.edges {
            stamp += 1;
            let mut congregates = false;
            for &v in edge {
                let label = b.label(v);
                if seen[label] == stamp {
                    congregates = true;
                    break;
                }
                seen[label] = stamp;
            }
            if congregates {
                count += 1;
            }
        }
        Ok(count)
    }
}

/// A hypergraph whose edges are pairwise vertex-disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypermatching {
    graph: Hypergraph,
}

impl Hypermatching {
    pub fn new(graph: Hypergraph) -> Result<Self> {
        let mut used = vec![false; graph.n()];
        for edge in graph.edges() {
            for &v in edge {
                if used[v] {
                    return Err(Error::InvalidParameter(format!(
                        "vertex {v} appears in two edges"
                    )));
                }
                used[v] = true;
            }
        }
        Ok(Self { graph })
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        self.graph.edges()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }
}

/// Sample a uniformly random hypermatching with `edge_count` ordered
/// `k`-edges on `[n]`: shuffle the vertices, take the first `k * edge_count`,
/// and chunk them in order.
///
/// Every matching (as a set of ordered edges) arises from exactly
/// `edge_count! * (n - k * edge_count)!` shuffles, so the outcome is uniform.
pub fn sample_hypermatching<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    edge_count: usize,
    rng: &mut R,
) -> Result<Hypermatching> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "edge arity must be positive".into(),
        ));
    }
    if k.checked_mul(edge_count).is_none_or(|need| need > n) {
        return Err(Error::TooManyEdges {
            edges: edge_count,
            k,
            n,
        });
    }
    let mut vertices: Vec<usize> = (0..n).collect();
    vertices.shuffle(rng);
    let edges: Vec<Vec<usize>> = vertices[..k * edge_count]
        .chunks(k)
        .map(|chunk| chunk.to_vec())
        .collect();
    Hypermatching::new(Hypergraph::new(n, k, edges)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifyMode {
    Exact,
    /// Sampled search: the reported delta only bounds the true value from below.
    LowerBound {
        trials: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyReport {
    pub gamma: Rational,
    pub delta: Rational,
    pub mode: CertifyMode,
}

fn floor_gamma_n(gamma: Rational, n: usize) -> usize {
    use num_traits::ToPrimitive;
    let scaled = gamma * Rational::new(n as i64, 1);
    scaled.floor().to_integer().to_i64().map_or(0, |v| v.max(0)) as usize
}

/// Exact minimal `delta` such that every set of at most `gamma * n` vertices
/// is lain on by at most a `delta` fraction of edges.
pub fn sshe_certify_exact(g: &Hypergraph, gamma: Rational) -> Result<Rational> {
    if g.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    if g.n() > SSHE_EXACT_MAX_N {
        return Err(Error::ExactModeTooLarge {
            size: 1u128 << g.n().min(127),
            limit: 1u128 << SSHE_EXACT_MAX_N,
        });
    }
    let s = floor_gamma_n(gamma, g.n()).min(g.n());
    if s < 2 {
        return Ok(Rational::new(0, 1));
    }
    // Lying counts are monotone in the set, so only maximal sets matter.
    let edge_masks: Vec<u32> = g
        .edges()
        .iter()
        .map(|edge| edge.iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    let mut best = 0usize;
    let mut combo: Vec<usize> = (0..s).collect();
    loop {
        let mask = combo.iter().fold(0u32, |m, &v| m | 1 << v);
        let lying = edge_masks
            .iter()
            .filter(|&&em| (em & mask).count_ones() >= 2)
            .count();
        best = best.max(lying);
        if best == g.m() {
            break;
        }
        if !next_combination(&mut combo, g.n()) {
            break;
        }
    }
    Ok(Rational::new(best as i64, g.m() as i64))
}

/// Advance a sorted index combination; returns false after the last one.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let s = combo.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if combo[i] < n - (s - i) {
            combo[i] += 1;
            for j in i + 1..s {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Sampled lower bound on the SSHE delta over random small sets.
pub fn sshe_certify_sampled<R: Rng + ?Sized>(
    g: &Hypergraph,
    gamma: Rational,
    trials: u64,
    rng: &mut R,
) -> Result<Rational> {
    if g.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    let s = floor_gamma_n(gamma, g.n()).min(g.n());
    if s < 2 {
        return Ok(Rational::new(0, 1));
    }
    let mut best = 0usize;
    let mut vertices: Vec<usize> = (0..g.n()).collect();
    for _ in 0..trials {
        vertices.shuffle(rng);
        let set: BTreeSet<usize> = vertices[..s].iter().copied().collect();
        best = best.max(g.lying_count(&set));
        if best == g.m() {
            break;
        }
    }
    Ok(Rational::new(best as i64, g.m() as i64))
}

/// Certify small-set expansion: exact when the vertex count allows a full
/// subset scan, otherwise a sampled lower bound.
pub fn sshe_certify<R: Rng + ?Sized>(
    g: &Hypergraph,
    gamma: Rational,
    trials: u64,
    rng: &mut R,
) -> Result<CertifyReport> {
    if g.n() <= SSHE_EXACT_MAX_N {
        Ok(CertifyReport {
            gamma,
            delta: sshe_certify_exact(g, gamma)?,
            mode: CertifyMode::Exact,
        })
    } else {
        Ok(CertifyReport {
            gamma,
            delta: sshe_certify_sampled(g, gamma, trials, rng)?,
            mode: CertifyMode::LowerBound { trials },
        })
    }
}

/// Exact minimal `delta` such that every partition with at most `q` blocks,
/// each of size at most `gamma * n`, is congregated on by at most a `delta`
/// fraction of edges.
///
/// Partitions are enumerated as restricted-growth strings, so relabelings of
/// the same partition are visited once. If no partition satisfies the block
/// cap the property holds vacuously and the result is 0.
pub fn sphe_certify_exact(g: &Hypergraph, gamma: Rational, q: usize) -> Result<Rational> {
    if q == 0 {
        return Err(Error::InvalidAlphabet { q });
    }
    if g.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    let size = (q as u128).saturating_pow(g.n() as u32);
    if size > SPHE_EXACT_LIMIT {
        return Err(Error::ExactModeTooLarge {
            size,
            limit: SPHE_EXACT_LIMIT,
        });
    }
    let cap = floor_gamma_n(gamma, g.n());
    if cap == 0 || cap.saturating_mul(q) < g.n() {
        return Ok(Rational::new(0, 1));
    }
    let mut labels = vec![0usize; g.n()];
    let mut sizes = vec![0usize; q];
    let mut best = 0usize;
    rgs_scan(g, q, cap, 0, 0, &mut labels, &mut sizes, &mut best);
    Ok(Rational::new(best as i64, g.m() as i64))
}

#[allow(clippy::too_many_arguments)]
fn rgs_scan(
    g: &Hypergraph,
    q: usize,
    cap: usize,
    vertex: usize,
    used: usize,
    labels: &mut Vec<usize>,
    sizes: &mut Vec<usize>,
    best: &mut usize,
) {
    if vertex == g.n() {
        let b = Partition::new(q, labels.clone()).expect("labels below q by construction");
        let c = g.congregating_count(&b).expect("length matches");
        *best = (*best).max(c);
        return;
    }
    // Restricted growth: the next label is at most one past the largest used.
    let limit = (used + 1).min(q);
    for label in 0..limit {
        if sizes[label] == cap {
            continue;
        }
        sizes[label] += 1;
        labels[vertex] = label;
        let now_used = used.max(label + 1);
        rgs_scan(g, q, cap, vertex + 1, now_used, labels, sizes, best);
        sizes[label] -= 1;
        if *best == g.m() {
            return;
        }
    }
}

/// Sampled lower bound on the SPHE delta over random capped partitions.
pub fn sphe_certify_sampled<R: Rng + ?Sized>(
    g: &Hypergraph,
    gamma: Rational,
    q: usize,
    trials: u64,
    rng: &mut R,
) -> Result<Rational> {
    if q == 0 {
        return Err(Error::InvalidAlphabet { q });
    }
    if g.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    let cap = floor_gamma_n(gamma, g.n());
    if cap == 0 || cap.saturating_mul(q) < g.n() {
        return Ok(Rational::new(0, 1));
    }
    let mut best = 0usize;
    let mut vertices: Vec<usize> = (0..g.n()).collect();
    for _ in 0..trials {
        // Fill blocks in shuffled vertex order, never exceeding the cap.
        vertices.shuffle(rng);
        let mut labels = vec![0usize; g.n()];
        for (slot, &v) in vertices.iter().enumerate() {
            labels[v] = slot / cap;
        }
        let b = Partition::new(q, labels).expect("slot/cap < q by feasibility");
        best = best.max(g.congregating_count(&b)?);
        if best == g.m() {
            break;
        }
    }
    Ok(Rational::new(best as i64, g.m() as i64))
}

/// Certify small-partition expansion, exact when `q^n` is within the guard.
pub fn sphe_certify<R: Rng + ?Sized>(
    g: &Hypergraph,
    gamma: Rational,
    q: usize,
    trials: u64,
    rng: &mut R,
) -> Result<CertifyReport> {
    let size = (q as u128).saturating_pow(g.n() as u32);
    if size <= SPHE_EXACT_LIMIT {
        Ok(CertifyReport {
            gamma,
            delta: sphe_certify_exact(g, gamma, q)?,
            mode: CertifyMode::Exact,
        })
    } else {
        Ok(CertifyReport {
            gamma,
            delta: sphe_certify_sampled(g, gamma, q, trials, rng)?,
            mode: CertifyMode::LowerBound { trials },
        })
    }
}
