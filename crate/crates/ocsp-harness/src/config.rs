//! Experiment configuration: everything an experiment needs to be re-run
//! byte-for-byte, serialized into every output header.

use ocsp_core::perm::Permutation;
use ocsp_core::predicate::OrderingPredicate;
use ocsp_core::Rational;
use serde::Serialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub predicate: OrderingPredicate,
    pub predicate_name: String,
    pub q: usize,
    pub n: usize,
    pub alpha: Rational,
    pub rounds: usize,
    pub pattern: Option<Permutation>,
    pub gamma: Option<Rational>,
    pub coarse_q: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    pub threads: usize,
}

#[derive(Serialize)]
struct ConfigDto<'a> {
    experiment: &'a str,
    predicate: &'a str,
    k: usize,
    q: usize,
    n: usize,
    alpha: String,
    rounds: usize,
    pattern: Option<String>,
    gamma: Option<String>,
    coarse_q: Option<usize>,
    trials: u64,
    seed: u64,
}

impl ExperimentConfig {
    pub fn new(experiment: &str, predicate_name: &str, seed: u64) -> Result<Self> {
        let predicate = predicate_by_name(predicate_name)?;
        // Default pattern: the first accepted permutation (none if the
        // predicate accepts nothing).
        let pattern = predicate.support().into_iter().next();
        Ok(Self {
            experiment: experiment.to_string(),
            predicate,
            predicate_name: predicate_name.to_string(),
            q: 4,
            n: 10,
            alpha: Rational::new(1, 8),
            rounds: 40,
            pattern,
            gamma: None,
            coarse_q: None,
            trials: 100,
            seed,
            threads: 1,
        })
    }

    /// Canonical single-line JSON of the config (thread count excluded: it
    /// must never change results).
    pub fn canonical_json(&self) -> String {
        let dto = ConfigDto {
            experiment: &self.experiment,
            predicate: &self.predicate_name,
            k: self.predicate.arity(),
            q: self.q,
            n: self.n,
            alpha: self.alpha.to_string(),
            rounds: self.rounds,
            pattern: self.pattern.as_ref().map(|p| p.to_string()),
            gamma: self.gamma.map(|g| g.to_string()),
            coarse_q: self.coarse_q,
            trials: self.trials,
            seed: self.seed,
        };
        serde_json::to_string(&dto).expect("config serializes")
    }

    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical_json().as_bytes())
    }

    pub fn distribution_params(&self) -> ocsp_core::dist::DistributionParams {
        ocsp_core::dist::DistributionParams {
            q: self.q,
            n: self.n,
            alpha: self.alpha,
            rounds: self.rounds,
            predicate: self.predicate.clone(),
            pattern: self.pattern.clone(),
        }
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

pub fn predicate_by_name(name: &str) -> Result<OrderingPredicate> {
    match name {
        "MAS" => Ok(OrderingPredicate::mas()),
        "Btwn" => Ok(OrderingPredicate::betweenness()),
        other => {
            // Fall back to a predicate file on disk.
            let text = std::fs::read_to_string(other).map_err(|e| {
                HarnessError::Config(format!(
                    "predicate {other:?} is neither \"MAS\"/\"Btwn\" nor a readable file: {e}"
                ))
            })?;
            Ok(ocsp_core::json::parse_predicate_json(&text)?)
        }
    }
}

/// Parse `a/b`, an integer, or a plain decimal like `0.3` into an exact
/// rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = |_| HarnessError::Config(format!("cannot parse {s:?} as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().map_err(bad)?;
        let d: i64 = den.trim().parse().map_err(bad)?;
        if d == 0 {
            return Err(HarnessError::Config("zero denominator".into()));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') {
            -1
        } else {
            1
        };
        let w: i64 = if whole.is_empty() || whole == "-" {
            0
        } else {
            whole.trim().parse().map_err(bad)?
        };
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(HarnessError::Config(format!(
                "cannot parse {s:?} as a rational"
            )));
        }
        let digits: i64 = frac.parse().map_err(bad)?;
        let scale = 10i64.pow(frac.len() as u32);
        return Ok(Rational::new(w, 1) + Rational::new(sign * digits, scale));
    }
    let n: i64 = s.parse().map_err(bad)?;
    Ok(Rational::new(n, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/8").unwrap(), Rational::new(1, 8));
        assert_eq!(parse_rational("3").unwrap(), Rational::new(3, 1));
        assert_eq!(parse_rational("0.3").unwrap(), Rational::new(3, 10));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
        assert_eq!(parse_rational(" 2/6 ").unwrap(), Rational::new(1, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn config_hash_is_stable_and_thread_independent() {
        let mut a = ExperimentConfig::new("value-gap", "MAS", 7).unwrap();
        let b = ExperimentConfig::new("value-gap", "MAS", 7).unwrap();
        assert_eq!(a.hash(), b.hash());
        a.threads = 8;
        assert_eq!(a.hash(), b.hash());
        a.seed = 8;
        assert_ne!(a.hash(), b.hash());
    }
}
