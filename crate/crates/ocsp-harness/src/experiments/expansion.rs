//! Expansion certification on NO samples: the partition-expansion budget is
//! always within the `2/gamma + 1` factor of the set-expansion budget.

use ocsp_core::dist::sample_no;
use ocsp_core::hypergraph::{
    sphe_certify_exact, sshe_certify_exact, SPHE_EXACT_LIMIT, SSHE_EXACT_MAX_N,
};
use ocsp_core::Rational;

use super::ExperimentReport;
use crate::config::ExperimentConfig;
use crate::csvout::{fmt_rational, CsvDoc};
use crate::error::{HarnessError, Result};
use crate::runner::run_trials;

struct TrialRow {
    m: usize,
    delta_set: Rational,
    delta_part: Rational,
    relation_ok: bool,
}

pub fn exp_expansion(config: &ExperimentConfig) -> Result<ExperimentReport> {
    super::require_trials(config)?;
    let gamma = config
        .gamma
        .ok_or_else(|| HarnessError::Config("expansion needs --gamma".into()))?;
    let q_part = config.coarse_q.unwrap_or(config.q);
    if config.n > SSHE_EXACT_MAX_N {
        return Err(HarnessError::Config(format!(
            "expansion needs n <= {SSHE_EXACT_MAX_N} for the exact subset scan"
        )));
    }
    let space = (q_part as u128).saturating_pow(config.n as u32);
    if space > SPHE_EXACT_LIMIT {
        return Err(HarnessError::Config(format!(
            "expansion needs q^n <= {SPHE_EXACT_LIMIT} for the exact partition scan"
        )));
    }
    let mut params = config.distribution_params();
    params.pattern = None;
    params.validate()?;
    let factor = Rational::new(2, 1) / gamma + Rational::new(1, 1);

    let rows = run_trials(config.trials, config.threads, config.seed, |_, mut rng| {
        let sample = sample_no(&params, &mut rng).expect("validated params");
        let g = sample.instance.hypergraph();
        if g.m() == 0 {
            // Empty graphs congregate on nothing; both budgets vanish.
            return TrialRow {
                m: 0,
                delta_set: Rational::new(0, 1),
                delta_part: Rational::new(0, 1),
                relation_ok: true,
            };
        }
        let delta_set = sshe_certify_exact(&g, gamma).expect("guarded");
        let delta_part = sphe_certify_exact(&g, gamma, q_part).expect("guarded");
        TrialRow {
            m: g.m(),
            delta_set,
            delta_part,
            relation_ok: delta_part <= delta_set * factor,
        }
    });

    let mut doc = CsvDoc::new(
        config,
        &["trial", "m", "delta_sshe", "delta_sphe", "relation_ok"],
    );
    let mut all_ok = true;
    let mut nonempty = 0u64;
    for (t, row) in rows.iter().enumerate() {
        all_ok &= row.relation_ok;
        if row.m > 0 {
            nonempty += 1;
        }
        doc.push_row(vec![
            t.to_string(),
            row.m.to_string(),
            fmt_rational(row.delta_set),
            fmt_rational(row.delta_part),
            row.relation_ok.to_string(),
        ]);
    }
    doc.push_summary("gamma", fmt_rational(gamma));
    doc.push_summary("partition_q", q_part);
    doc.push_summary("factor", fmt_rational(factor));
    doc.push_summary("nonempty", nonempty);
    doc.push_summary("relation_holds", all_ok);

    Ok(ExperimentReport {
        name: "expansion".into(),
        passed: all_ok,
        summary: format!(
            "expansion: {} trials ({} nonempty), delta_sphe <= delta_sshe*(2/gamma+1) {}",
            config.trials,
            nonempty,
            if all_ok { "holds" } else { "VIOLATED" }
        ),
        csv: doc.render(),
    })
}
