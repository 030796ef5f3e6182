//! Test statistics: chi-square thresholds and binomial moments.

/// Upper critical value of the chi-square distribution.
///
/// Exact table entries for the (df, alpha) pairs the experiments use;
/// Wilson-Hilferty approximation otherwise.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    const TABLE_1E3: &[(usize, f64)] = &[
        (1, 10.828),
        (3, 16.266),
        (9, 27.877),
        (15, 37.697),
        (31, 61.098),
        (63, 103.442),
    ];
    if (alpha - 1e-3).abs() < 1e-12 {
        if let Some(&(_, v)) = TABLE_1E3.iter().find(|&&(d, _)| d == df) {
            return v;
        }
    }
    // Wilson-Hilferty: chi2 ~ df (1 - 2/(9 df) + z sqrt(2/(9 df)))^3.
    let z = normal_quantile(1.0 - alpha);
    let d = df as f64;
    let t = 1.0 - 2.0 / (9.0 * d) + z * (2.0 / (9.0 * d)).sqrt();
    d * t.powi(3)
}

/// Inverse standard normal CDF (Acklam's rational approximation).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

/// Mean, variance, and fourth central moment of Binomial(m, p).
pub fn binomial_moments(m: u64, p: f64) -> (f64, f64, f64) {
    let mf = m as f64;
    let pq = p * (1.0 - p);
    let mean = mf * p;
    let var = mf * pq;
    let mu4 = mf * pq * (1.0 - 3.0 * pq) + 3.0 * mf * (mf - 1.0) * pq * pq;
    (mean, var, mu4)
}

/// Standard deviation of the unbiased sample variance of `n` draws from a
/// distribution with the given central moments.
pub fn sample_variance_sd(n: u64, var: f64, mu4: f64) -> f64 {
    let nf = n as f64;
    ((mu4 - var * var * (nf - 3.0) / (nf - 1.0)) / nf)
        .max(0.0)
        .sqrt()
}

/// Two-sample chi-square statistic over matched count buckets.
pub fn two_sample_chi_square(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (na, nb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut chi2 = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let total = x + y;
        if total > 0.0 {
            let d = ka * x - kb * y;
            chi2 += d * d / total;
        }
    }
    chi2
}
