//! Paired YES/NO sampling with exact solving: every nonempty YES sample must
//! carry a shifted assignment worth at least `1 - (k-1)/q`, confirmed by the
//! exact optimum.

use ocsp_core::dist::{best_shifted_assignment, sample_no, sample_yes};
use ocsp_core::solve::solve_ocsp_exact;
use ocsp_core::Rational;

use super::{to_f64, ExperimentReport};
use crate::config::ExperimentConfig;
use crate::csvout::{fmt_f64, fmt_rational, CsvDoc};
use crate::error::{HarnessError, Result};
use crate::runner::run_trials;

struct TrialRow {
    yes_m: usize,
    yes_shift: Option<usize>,
    yes_shift_value: Option<Rational>,
    yes_exact: Option<Rational>,
    bound_ok: bool,
    exact_dominates: bool,
    no_m: usize,
    no_exact: Option<Rational>,
}

pub fn exp_value_gap(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.n > ocsp_core::solve::OCSP_EXACT_MAX_N {
        return Err(HarnessError::Config(format!(
            "value-gap needs n <= {} for exact solving",
            ocsp_core::solve::OCSP_EXACT_MAX_N
        )));
    }
    super::require_trials(config)?;
    let params = config.distribution_params();
    params.validate()?;
    if config.pattern.is_none() {
        return Err(HarnessError::Config(
            "value-gap needs a pattern permutation for YES sampling".into(),
        ));
    }
    let k = config.predicate.arity() as i64;
    let bound = Rational::new(1, 1) - Rational::new(k - 1, config.q as i64);

    let rows = run_trials(config.trials, config.threads, config.seed, |_, mut rng| {
        let yes = sample_yes(&params, &mut rng).expect("validated params");
        let mut no_params = params.clone();
        no_params.pattern = None;
        let no = sample_no(&no_params, &mut rng).expect("validated params");
        let (yes_shift, yes_shift_value, yes_exact, bound_ok, exact_dominates) =
            if yes.instance.m() > 0 {
                let (t, v) = best_shifted_assignment(&yes).expect("nonempty");
                let exact = solve_ocsp_exact(&yes.instance).expect("guarded").optimum;
                (Some(t), Some(v), Some(exact), v >= bound, exact >= v)
            } else {
                (None, None, None, true, true)
            };
        let no_exact = if no.instance.m() > 0 {
            Some(solve_ocsp_exact(&no.instance).expect("guarded").optimum)
        } else {
            None
        };
        TrialRow {
            yes_m: yes.instance.m(),
            yes_shift,
            yes_shift_value,
            yes_exact,
            bound_ok,
            exact_dominates,
            no_m: no.instance.m(),
            no_exact,
        }
    });

    let mut doc = CsvDoc::new(
        config,
        &[
            "trial",
            "yes_m",
            "yes_shift",
            "yes_shift_value",
            "yes_exact",
            "yes_bound_ok",
            "no_m",
            "no_exact",
        ],
    );
    let mut yes_sum = 0.0;
    let mut yes_count = 0u64;
    let mut no_sum = 0.0;
    let mut no_count = 0u64;
    let mut all_ok = true;
    for (t, row) in rows.iter().enumerate() {
        all_ok &= row.bound_ok && row.exact_dominates;
        if let Some(v) = row.yes_exact {
            yes_sum += to_f64(v);
            yes_count += 1;
        }
        if let Some(v) = row.no_exact {
            no_sum += to_f64(v);
            no_count += 1;
        }
        doc.push_row(vec![
            t.to_string(),
            row.yes_m.to_string(),
            row.yes_shift.map_or_else(|| "-".into(), |s| s.to_string()),
            row.yes_shift_value.map_or_else(|| "-".into(), fmt_rational),
            row.yes_exact.map_or_else(|| "-".into(), fmt_rational),
            (row.bound_ok && row.exact_dominates).to_string(),
            row.no_m.to_string(),
            row.no_exact.map_or_else(|| "-".into(), fmt_rational),
        ]);
    }
    let yes_mean = if yes_count > 0 {
        yes_sum / yes_count as f64
    } else {
        f64::NAN
    };
    let no_mean = if no_count > 0 {
        no_sum / no_count as f64
    } else {
        f64::NAN
    };
    doc.push_summary("bound", fmt_rational(bound));
    doc.push_summary("yes_nonempty", yes_count);
    doc.push_summary("no_nonempty", no_count);
    doc.push_summary("yes_exact_mean", fmt_f64(yes_mean));
    doc.push_summary("no_exact_mean", fmt_f64(no_mean));
    doc.push_summary("all_bounds_hold", all_ok);

    Ok(ExperimentReport {
        name: "value-gap".into(),
        passed: all_ok,
        summary: format!(
            "value-gap: {} trials, yes mean {:.4} (bound {}), no mean {:.4}, bounds {}",
            config.trials,
            yes_mean,
            fmt_rational(bound),
            no_mean,
            if all_ok { "hold" } else { "VIOLATED" }
        ),
        csv: doc.render(),
    })
}
