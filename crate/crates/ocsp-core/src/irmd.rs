//! The T-player masked-vector detection game and its reduction to streaming.
//!
//! Each player holds a partial hypermatching and, per edge, a masked copy of
//! the hidden labels: in a YES instance the mask adds one common shift to the
//! whole edge, in a NO instance the mask is uniform on `[q]^k`. The reduction
//! turns each player's input into a constraint stream — an edge is emitted
//! exactly when its masked tuple equals the permuted base run — and pipes the
//! streams through a bounded-state algorithm in player order. The per-edge
//! emission probability is `1/q` on pattern edges of YES instances and
//! `1/q^k` in NO instances, which is what makes the emitted streams match the
//! hard instance distributions.
//!
//! The matching matrix is never materialized: row `r` of player `t`'s matrix
//! selects vertex `r mod k` of edge `r / k`, so the matching plus this row
//! convention carries the same information.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coarsen::Partition;
use crate::dist::{contiguous_tuple, permute_tuple, DistributionParams};
use crate::error::{Error, Result};
use crate::hypergraph::{sample_hypermatching, Hypermatching};
use crate::perm::Permutation;
use crate::stats::wilson_interval;
use crate::Rational;

/// Game parameters; unlike [`DistributionParams`] no predicate is involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameParams {
    pub q: usize,
    pub n: usize,
    pub k: usize,
    pub alpha: Rational,
    pub rounds: usize,
}

impl GameParams {
    pub fn edge_count(&self) -> usize {
        use num_traits::ToPrimitive;
        let scaled = self.alpha * Rational::new(self.n as i64, 1);
        scaled.floor().to_integer().to_i64().map_or(0, |v| v.max(0)) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::InvalidAlphabet { q: self.q });
        }
        if self.k == 0 || self.n == 0 || self.rounds == 0 {
            return Err(Error::InvalidParameter(
                "k, n, and rounds must be positive".into(),
            ));
        }
        let zero = Rational::new(0, 1);
        if self.alpha <= zero || self.alpha > Rational::new(1, self.k as i64) {
            return Err(Error::InvalidParameter(format!(
                "alpha {} outside (0, 1/{}]",
                self.alpha, self.k
            )));
        }
        if self.k * self.edge_count() > self.n {
            return Err(Error::TooManyEdges {
                edges: self.edge_count(),
                k: self.k,
                n: self.n,
            });
        }
        Ok(())
    }
}

impl DistributionParams {
    pub fn game_params(&self) -> GameParams {
        GameParams {
            q: self.q,
            n: self.n,
            k: self.k(),
            alpha: self.alpha,
            rounds: self.rounds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrmdCase {
    Yes,
    No,
}

#[derive(Debug, Clone)]
pub struct PlayerInput {
    pub matching: Hypermatching,
    /// One masked tuple in `[q]^k` per matching edge.
    pub masked: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct IrmdInstance {
    pub params: GameParams,
    pub hidden_partition: Partition,
    pub players: Vec<PlayerInput>,
    pub case: IrmdCase,
}

pub fn sample_irmd<R: Rng + ?Sized>(
    params: &GameParams,
    case: IrmdCase,
    rng: &mut R,
) -> Result<IrmdInstance> {
    params.validate()?;
    let (q, n, k) = (params.q, params.n, params.k);
    let labels = (0..n).map(|_| rng.gen_range(0..q)).collect();
    let b = Partition::new(q, labels)?;
    let mut players = Vec::with_capacity(params.rounds);
    for _ in 0..params.rounds {
        let matching = sample_hypermatching(n, k, params.edge_count(), rng)?;
        let mut masked = Vec::with_capacity(matching.m());
        for edge in matching.edges() {
            let base = b.restrict(edge)?;
            let tuple = match case {
                IrmdCase::Yes => {
                    let shift = rng.gen_range(0..q);
                    base.iter().map(|&l| (l + shift) % q).collect()
                }
                IrmdCase::No => base
                    .iter()
                    .map(|&l| (l + rng.gen_range(0..q)) % q)
                    .collect::<Vec<usize>>(),
            };
            masked.push(tuple);
        }
        players.push(PlayerInput { matching, masked });
    }
    Ok(IrmdInstance {
        params: params.clone(),
        hidden_partition: b,
        players,
        case,
    })
}

/// Constraints a player contributes to the stream: each matching edge whose
/// masked tuple equals the permuted base run.
pub fn reduction_emit(
    player: &PlayerInput,
    pattern: &Permutation,
    q: usize,
) -> Result<Vec<Vec<usize>>> {
    let k = pattern.arity();
    let target = permute_tuple(&contiguous_tuple(q, k, 0)?, pattern)?;
    let mut emitted = Vec::new();
    for (edge, masked) in player.matching.edges().iter().zip(&player.masked) {
        if masked.len() != k {
            return Err(Error::ArityMismatch {
                expected: k,
                found: masked.len(),
            });
        }
        if *masked == target {
            emitted.push(edge.clone());
        }
    }
    Ok(emitted)
}

/// A streaming algorithm with a declared state budget. The serialized state
/// is probed between constraints and stands in for the message a player
/// forwards, so it must capture everything `finish` depends on.
pub trait StreamingAlgorithm {
    fn init(&mut self, n: usize, arity: usize);
    fn ingest(&mut self, constraint: &[usize]);
    fn finish(&mut self) -> bool;
    /// Serialized state; its bit length is checked against the bound.
    fn serialized_state(&self) -> Vec<u8>;
    /// Declared state bound in bits.
    fn state_bound_bits(&self) -> usize;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutcome {
    pub output: bool,
    /// Largest serialized state observed, in bits: the communication proxy.
    pub max_state_bits: usize,
    pub constraints_emitted: usize,
}

/// Run the reduction: players emit their constraints in order into `alg`,
/// probing the serialized state after every constraint.
pub fn run_reduction(
    alg: &mut dyn StreamingAlgorithm,
    inst: &IrmdInstance,
    pattern: &Permutation,
) -> Result<ReductionOutcome> {
    alg.init(inst.params.n, inst.params.k);
    let mut max_state_bits = 0usize;
    let mut emitted_total = 0usize;
    for player in &inst.players {
        for constraint in reduction_emit(player, pattern, inst.params.q)? {
            alg.ingest(&constraint);
            let bits = alg.serialized_state().len() * 8;
            if bits > alg.state_bound_bits() {
                return Err(Error::StateBoundExceeded {
                    bits,
                    bound: alg.state_bound_bits(),
                });
            }
            max_state_bits = max_state_bits.max(bits);
            emitted_total += 1;
        }
        // The handoff to the next player carries the same serialized state.
        let bits = alg.serialized_state().len() * 8;
        max_state_bits = max_state_bits.max(bits);
    }
    Ok(ReductionOutcome {
        output: alg.finish(),
        max_state_bits,
        constraints_emitted: emitted_total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageReport {
    pub advantage: f64,
    pub yes_rate: f64,
    pub no_rate: f64,
    /// Sum of the two Wilson 95% interval widths.
    pub interval: f64,
    pub trials: u64,
    pub max_state_bits: usize,
}

/// Empirical distinguishing advantage of an algorithm over `trials` games per
/// case, with fresh per-trial child seeds.
pub fn estimate_advantage<F>(
    mut factory: F,
    params: &GameParams,
    pattern: &Permutation,
    trials: u64,
    rng: &mut (impl Rng + ?Sized),
) -> Result<AdvantageReport>
where
    F: FnMut() -> Box<dyn StreamingAlgorithm>,
{
    if trials < 2 {
        return Err(Error::InvalidParameter(
            "advantage estimation needs at least 2 trials".into(),
        ));
    }
    params.validate()?;
    let mut ones = [0u64; 2];
    let mut max_state_bits = 0usize;
    for case in [IrmdCase::Yes, IrmdCase::No] {
        for _ in 0..trials {
            let mut child = ChaCha8Rng::seed_from_u64(rng.gen());
            let inst = sample_irmd(params, case, &mut child)?;
            let mut alg = factory();
            let outcome = run_reduction(alg.as_mut(), &inst, pattern)?;
            if outcome.output {
                ones[matches!(case, IrmdCase::No) as usize] += 1;
            }
            max_state_bits = max_state_bits.max(outcome.max_state_bits);
        }
    }
    let yes_rate = ones[0] as f64 / trials as f64;
    let no_rate = ones[1] as f64 / trials as f64;
    let (ylo, yhi) = wilson_interval(ones[0], trials);
    let (nlo, nhi) = wilson_interval(ones[1], trials);
    Ok(AdvantageReport {
        advantage: (yes_rate - no_rate).abs(),
        yes_rate,
        no_rate,
        interval: (yhi - ylo) + (nhi - nlo),
        trials,
        max_state_bits,
    })
}

// ---------------------------------------------------------------------------
// Built-in algorithms: plumbing baselines plus an unbounded reference tracker.
// ---------------------------------------------------------------------------

/// Ignores the stream and always answers the same bit.
#[derive(Debug, Clone, Default)]
pub struct ConstantAlg {
    pub output: bool,
}

impl StreamingAlgorithm for ConstantAlg {
    fn init(&mut self, _n: usize, _arity: usize) {}
    fn ingest(&mut self, _constraint: &[usize]) {}
    fn finish(&mut self) -> bool {
        self.output
    }
    fn serialized_state(&self) -> Vec<u8> {
        vec![self.output as u8]
    }
    fn state_bound_bits(&self) -> usize {
        8
    }
}

/// Answers 1 once the stream reaches a fixed length.
#[derive(Debug, Clone)]
pub struct CountThresholdAlg {
    pub threshold: u64,
    count: u64,
}

impl CountThresholdAlg {
    pub fn new(threshold: u64) -> Self {
        Self {
            threshold,
            count: 0,
        }
    }
}

impl StreamingAlgorithm for CountThresholdAlg {
    fn init(&mut self, _n: usize, _arity: usize) {
        self.count = 0;
    }
    fn ingest(&mut self, _constraint: &[usize]) {
        self.count += 1;
    }
    fn finish(&mut self) -> bool {
        self.count >= self.threshold
    }
    fn serialized_state(&self) -> Vec<u8> {
        self.count.to_le_bytes().to_vec()
    }
    fn state_bound_bits(&self) -> usize {
        64
    }
}

/// Hashes endpoints into a fixed bank of counters and thresholds the heaviest
/// bucket's share of all endpoint hits.
#[derive(Debug, Clone)]
pub struct DegreeSketchAlg {
    buckets: [u32; 64],
    total: u64,
    pub share_threshold: f64,
}

impl DegreeSketchAlg {
    pub fn new(share_threshold: f64) -> Self {
        Self {
            buckets: [0; 64],
            total: 0,
            share_threshold,
        }
    }
}

impl StreamingAlgorithm for DegreeSketchAlg {
    fn init(&mut self, _n: usize, _arity: usize) {
        self.buckets = [0; 64];
        self.total = 0;
    }
    fn ingest(&mut self, constraint: &[usize]) {
        for &v in constraint {
            // Fibonacci hashing into 64 buckets.
            let h = (v as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 58;
            self.buckets[h as usize] += 1;
            self.total += 1;
        }
    }
    fn finish(&mut self) -> bool {
        if self.total == 0 {
            return false;
        }
        let heaviest = *self.buckets.iter().max().expect("nonempty") as f64;
        heaviest / self.total as f64 >= self.share_threshold
    }
    fn serialized_state(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 * 4 + 8);
        for b in &self.buckets {
            out.extend_from_slice(&b.to_le_bytes());
        }
        out.extend_from_slice(&self.total.to_le_bytes());
        out
    }
    fn state_bound_bits(&self) -> usize {
        (64 * 4 + 8) * 8
    }
}

/// Stores the whole stream and thresholds the exact optimum: a reference
/// distinguisher with unbounded state, not a streaming baseline.
pub struct ExactThresholdAlg {
    pub predicate: crate::predicate::OrderingPredicate,
    pub threshold: f64,
    n: usize,
    constraints: Vec<Vec<usize>>,
}

impl ExactThresholdAlg {
    pub fn new(predicate: crate::predicate::OrderingPredicate, threshold: f64) -> Self {
        Self {
            predicate,
            threshold,
            n: 0,
            constraints: Vec::new(),
        }
    }
}

impl StreamingAlgorithm for ExactThresholdAlg {
    fn init(&mut self, n: usize, _arity: usize) {
        self.n = n;
        self.constraints.clear();
    }
    fn ingest(&mut self, constraint: &[usize]) {
        self.constraints.push(constraint.to_vec());
    }
    fn finish(&mut self) -> bool {
        if self.constraints.is_empty() {
            return false;
        }
        let inst = match crate::instance::OcspInstance::new(
            self.n,
            self.predicate.clone(),
            self.constraints.clone(),
        ) {
            Ok(inst) => inst,
            Err(_) => return false,
        };
        match crate::solve::solve_ocsp_exact(&inst) {
            Ok(report) => crate::solve::rational_to_f64(report.optimum) >= self.threshold,
            Err(_) => false,
        }
    }
    fn serialized_state(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for c in &self.constraints {
            for &v in c {
                out.extend_from_slice(&(v as u64).to_le_bytes());
            }
        }
        out
    }
    fn state_bound_bits(&self) -> usize {
        usize::MAX
    }
}
