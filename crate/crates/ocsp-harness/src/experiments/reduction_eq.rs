//! Exactness of the game-to-stream reduction, two ways: an exhaustive scan of
//! the mask space (per-edge emission probabilities are exactly `1/q` on
//! pattern edges and `1/q^k` otherwise), and a two-sample fingerprint test
//! between reduction-built and directly sampled constraint streams.

use ocsp_core::coarsen::{next_tuple, Partition};
use ocsp_core::dist::{contiguous_tuple, identifier, permute_tuple, sample_no, sample_yes};
use ocsp_core::irmd::{reduction_emit, sample_irmd, IrmdCase};
use ocsp_core::perm::Permutation;

use super::ExperimentReport;
use crate::config::{fnv1a, ExperimentConfig};
use crate::csvout::{fmt_f64, CsvDoc};
use crate::error::Result;
use crate::runner::run_trials;
use crate::stats::{chi_square_critical, two_sample_chi_square};

const FINGERPRINT_BUCKETS: usize = 16;

/// Exhaustively count emissions over the mask space for every base label
/// tuple: YES emits on exactly one shift iff the labels carry a run
/// identifier, NO emits on exactly one full mask.
fn exhaustive_emission_check(k: usize, q: usize, pattern: &Permutation) -> Result<bool> {
    let target = permute_tuple(&contiguous_tuple(q, k, 0)?, pattern)?;
    let mut base = vec![0usize; k];
    loop {
        let b = Partition::new(q, base.clone())?;
        let tuple: Vec<usize> = (0..k).collect();
        let has_id = identifier(&b, &tuple, pattern)?.is_some();
        let yes_hits = (0..q)
            .filter(|&shift| {
                base.iter()
                    .zip(&target)
                    .all(|(&l, &t)| (l + shift) % q == t)
            })
            .count();
        if yes_hits != has_id as usize {
            return Ok(false);
        }
        let mut mask = vec![0usize; k];
        let mut no_hits = 0usize;
        loop {
            if base
                .iter()
                .zip(&mask)
                .zip(&target)
                .all(|((&l, &y), &t)| (l + y) % q == t)
            {
                no_hits += 1;
            }
            if !next_tuple(&mut mask, q) {
                break;
            }
        }
        if no_hits != 1 {
            return Ok(false);
        }
        if !next_tuple(&mut base, q) {
            break;
        }
    }
    Ok(true)
}

fn fingerprint(constraints: &[Vec<usize>]) -> usize {
    let mut bytes = Vec::with_capacity(constraints.len() * 9);
    for c in constraints {
        for &v in c {
            bytes.push(v as u8);
        }
        bytes.push(0xff);
    }
    (fnv1a(&bytes) % FINGERPRINT_BUCKETS as u64) as usize
}

pub fn exp_reduction_equivalence(config: &ExperimentConfig) -> Result<ExperimentReport> {
    super::require_trials(config)?;
    let mut doc = CsvDoc::new(config, &["part", "k", "q", "case", "value", "ok"]);
    let mut all_ok = true;

    // Part 1: exhaustive mask-space enumeration over the small grid.
    for k in 1..=3usize {
        for q in k..=5usize {
            for pattern in Permutation::all(k)? {
                let ok = exhaustive_emission_check(k, q, &pattern)?;
                all_ok &= ok;
                doc.push_row(vec![
                    "exhaustive".into(),
                    k.to_string(),
                    q.to_string(),
                    format!("pattern={pattern}"),
                    "exact".into(),
                    ok.to_string(),
                ]);
            }
        }
    }

    // Part 2: two-sample fingerprint chi-square, reduction vs direct.
    let params = config.distribution_params();
    params.validate()?;
    if params.k() > config.q {
        return Err(crate::error::HarnessError::Config(format!(
            "reduction-equivalence needs k <= q (k={}, q={})",
            params.k(),
            config.q
        )));
    }
    let game = params.game_params();
    let pattern = config.pattern.clone().ok_or_else(|| {
        crate::error::HarnessError::Config(
            "reduction-equivalence needs a pattern permutation".into(),
        )
    })?;
    let threshold = chi_square_critical(FINGERPRINT_BUCKETS - 1, 1e-3);
    for case in [IrmdCase::Yes, IrmdCase::No] {
        let case_name = match case {
            IrmdCase::Yes => "yes",
            IrmdCase::No => "no",
        };
        // Distinct seed stream per case, shared across thread counts.
        let case_seed = config.seed ^ fnv1a(case_name.as_bytes());
        let counts = run_trials(config.trials, config.threads, case_seed, |_, mut rng| {
            let inst = sample_irmd(&game, case, &mut rng).expect("validated params");
            let mut stream = Vec::new();
            for player in &inst.players {
                stream.extend(reduction_emit(player, &pattern, game.q).expect("valid player"));
            }
            let reduced = fingerprint(&stream);
            let direct = match case {
                IrmdCase::Yes => fingerprint(
                    sample_yes(&params, &mut rng)
                        .expect("validated params")
                        .instance
                        .constraints(),
                ),
                IrmdCase::No => {
                    let mut no_params = params.clone();
                    no_params.pattern = None;
                    fingerprint(
                        sample_no(&no_params, &mut rng)
                            .expect("validated params")
                            .instance
                            .constraints(),
                    )
                }
            };
            (reduced, direct)
        });
        let mut reduced = vec![0f64; FINGERPRINT_BUCKETS];
        let mut direct = vec![0f64; FINGERPRINT_BUCKETS];
        for (r, d) in counts {
            reduced[r] += 1.0;
            direct[d] += 1.0;
        }
        let chi2 = two_sample_chi_square(&reduced, &direct);
        let ok = chi2 <= threshold;
        all_ok &= ok;
        doc.push_row(vec![
            "fingerprint".into(),
            params.k().to_string(),
            config.q.to_string(),
            case_name.into(),
            fmt_f64(chi2),
            ok.to_string(),
        ]);
    }
    doc.push_summary("chi2_threshold", fmt_f64(threshold));
    doc.push_summary("all_ok", all_ok);

    Ok(ExperimentReport {
        name: "reduction-equivalence".into(),
        passed: all_ok,
        summary: format!(
            "reduction-equivalence: exhaustive grid k<=3,q<=5 and {} fingerprint trials per case: {}",
            config.trials,
            if all_ok { "pass" } else { "FAIL" }
        ),
        csv: doc.render(),
    })
}
