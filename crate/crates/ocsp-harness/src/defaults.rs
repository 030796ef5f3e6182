//! Derived parameter defaults: the alphabet, sparsity, block, and round
//! constants that make the NO distribution's value collapse provable at
//! scale. Exposed as computed defaults; only the formulas are promised, not
//! feasibility of the resulting sizes.

use num_traits::ToPrimitive;
use ocsp_core::predicate::OrderingPredicate;
use ocsp_core::Rational;
use serde::Serialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct DefaultParams {
    pub epsilon: String,
    pub k: usize,
    pub alpha: String,
    pub rho: String,
    /// Smallest alphabet the analysis supports: `ceil(192 k^2 / epsilon)`.
    pub q0: u64,
    /// Sparsity ceiling `1/(2k)`.
    pub alpha0: String,
    /// Small-set fraction `epsilon / (96 k^2)`.
    pub gamma: String,
    /// Coarse-value slack `epsilon / 4`.
    pub eta: String,
    /// Set-expansion budget `8 k^2 gamma^2`.
    pub delta: String,
    /// Partition-expansion budget `24 k^2 gamma` (equals `epsilon / 4`).
    pub delta_prime: String,
    /// Round floor at `q = q0`.
    pub t0: f64,
    #[serde(skip)]
    pub epsilon_exact: Rational,
    #[serde(skip)]
    pub alpha_exact: Rational,
    #[serde(skip)]
    pub rho_exact: Rational,
    #[serde(skip)]
    pub gamma_exact: Rational,
    #[serde(skip)]
    pub eta_exact: Rational,
    #[serde(skip)]
    pub delta_exact: Rational,
    #[serde(skip)]
    pub delta_prime_exact: Rational,
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl DefaultParams {
    /// Round floor at an arbitrary alphabet size: the larger of the
    /// set-expansion term and the assignment-counting term.
    pub fn t0_for_q(&self, q: u64) -> f64 {
        self.t0_counting_term(q).max(self.t0_assignment_term(q))
    }

    /// `4 ln(2) q^k / (gamma^2 alpha)`.
    pub fn t0_counting_term(&self, q: u64) -> f64 {
        let qk = (q as f64).powi(self.k as i32);
        4.0 * std::f64::consts::LN_2 * qk
            / (to_f64(self.gamma_exact).powi(2) * to_f64(self.alpha_exact))
    }

    /// `8 (rho + eta) q^k ln(q) / (eta^2 alpha)`.
    pub fn t0_assignment_term(&self, q: u64) -> f64 {
        let qk = (q as f64).powi(self.k as i32);
        8.0 * (to_f64(self.rho_exact) + to_f64(self.eta_exact)) * qk * (q as f64).ln()
            / (to_f64(self.eta_exact).powi(2) * to_f64(self.alpha_exact))
    }
}

pub fn derive_defaults(
    epsilon: Rational,
    alpha: Rational,
    predicate: &OrderingPredicate,
) -> Result<DefaultParams> {
    let zero = Rational::new(0, 1);
    let one = Rational::new(1, 1);
    if epsilon <= zero || epsilon >= one {
        return Err(HarnessError::InvalidEpsilon(epsilon.to_string()));
    }
    let k = predicate.arity();
    let kk = Rational::new((k * k) as i64, 1);
    let alpha0 = Rational::new(1, 2 * k as i64);
    if alpha <= zero || alpha > alpha0 {
        return Err(HarnessError::Config(format!(
            "alpha {alpha} outside (0, {alpha0}]"
        )));
    }
    let q0_exact = (Rational::new(192, 1) * kk / epsilon).ceil();
    let q0 = q0_exact
        .to_integer()
        .to_u64()
        .ok_or_else(|| HarnessError::Config("q0 overflows".into()))?;
    let gamma = epsilon / (Rational::new(96, 1) * kk);
    let eta = epsilon / Rational::new(4, 1);
    let delta = Rational::new(8, 1) * kk * gamma * gamma;
    let delta_prime = Rational::new(24, 1) * kk * gamma;
    debug_assert_eq!(delta_prime, eta);
    let rho = predicate.rho();
    let mut params = DefaultParams {
        epsilon: epsilon.to_string(),
        k,
        alpha: alpha.to_string(),
        rho: rho.to_string(),
        q0,
        alpha0: alpha0.to_string(),
        gamma: gamma.to_string(),
        eta: eta.to_string(),
        delta: delta.to_string(),
        delta_prime: delta_prime.to_string(),
        t0: 0.0,
        epsilon_exact: epsilon,
        alpha_exact: alpha,
        rho_exact: rho,
        gamma_exact: gamma,
        eta_exact: eta,
        delta_exact: delta,
        delta_prime_exact: delta_prime,
    };
    params.t0 = params.t0_for_q(q0);
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mas_defaults_at_half() {
        let p = derive_defaults(
            Rational::new(1, 2),
            Rational::new(1, 4),
            &OrderingPredicate::mas(),
        )
        .unwrap();
        assert_eq!(p.q0, 1536);
        assert_eq!(p.alpha0, "1/4");
        assert_eq!(p.delta_prime_exact, Rational::new(1, 8));
        assert_eq!(p.eta_exact, Rational::new(1, 8));
        assert_eq!(p.gamma_exact, Rational::new(1, 768));
        assert_eq!(p.delta_exact, Rational::new(32, 589824));
        assert!(p.t0 > 0.0);
        // The counting term dominates at any fixed epsilon.
        assert!(p.t0_counting_term(p.q0) > p.t0_assignment_term(p.q0));
    }

    #[test]
    fn epsilon_bounds() {
        let mas = OrderingPredicate::mas();
        assert!(derive_defaults(Rational::new(0, 1), Rational::new(1, 4), &mas).is_err());
        assert!(derive_defaults(Rational::new(1, 1), Rational::new(1, 4), &mas).is_err());
        assert!(derive_defaults(Rational::new(1, 2), Rational::new(1, 2), &mas).is_err());
    }

    #[test]
    fn delta_prime_is_quarter_epsilon() {
        for (num, den) in [(1i64, 2i64), (1, 4), (3, 10)] {
            let eps = Rational::new(num, den);
            let p = derive_defaults(eps, Rational::new(1, 6), &OrderingPredicate::betweenness())
                .unwrap();
            assert_eq!(p.delta_prime_exact, eps / Rational::new(4, 1));
        }
    }
}
