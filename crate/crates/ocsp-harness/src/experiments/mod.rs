//! Invariant-verification experiments. Each one samples under a seeded config,
//! checks its per-instance assertions exactly, and renders a deterministic
//! CSV document; `passed` reports whether every asserted invariant held.

mod expansion;
mod no_trend;
mod reduction_eq;
mod value_gap;

pub use expansion::exp_expansion;
pub use no_trend::{exp_no_trend, trend_rounds_for_q, TREND_BASE_ROUNDS, TREND_QS};
pub use reduction_eq::exp_reduction_equivalence;
pub use value_gap::exp_value_gap;

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub csv: String,
}

pub(crate) fn require_trials(config: &crate::config::ExperimentConfig) -> crate::error::Result<()> {
    if config.trials == 0 {
        return Err(crate::error::HarnessError::Config(
            "experiments need at least one trial".into(),
        ));
    }
    Ok(())
}

pub(crate) fn to_f64(r: ocsp_core::Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
