//! Deterministic trial parallelism: every trial gets its own generator
//! seeded from (master seed, trial index), results are collected in trial
//! order, so the thread count never changes the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step: the per-trial seed derivation.
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master, index))
}

/// Run `trials` independent jobs over `threads` workers and return results
/// in trial order.
pub fn run_trials<T, F>(trials: u64, threads: usize, seed: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, ChaCha8Rng) -> T + Sync,
{
    let threads = threads.max(1);
    if threads == 1 || trials <= 1 {
        return (0..trials).map(|t| job(t, trial_rng(seed, t))).collect();
    }
    let mut slots: Vec<Option<T>> = (0..trials).map(|_| None).collect();
    let chunk = slots.len().div_ceil(threads);
    std::thread::scope(|scope| {
        for (w, slice) in slots.chunks_mut(chunk).enumerate() {
            let job = &job;
            scope.spawn(move || {
                let base = (w * chunk) as u64;
                for (off, slot) in slice.iter_mut().enumerate() {
                    let t = base + off as u64;
                    *slot = Some(job(t, trial_rng(seed, t)));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("all trials ran"))
        .collect()
}
