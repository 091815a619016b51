//! Small statistics toolkit: moments, two-sample tests, least squares.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal, StudentsT};

/// z-value of a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Upper quantile of the standard normal: `P(Z > q) = tail`.
pub fn normal_upper_quantile(tail: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    n.inverse_cdf(1.0 - tail)
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").cdf(x)
}

/// Result of one two-sample test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSampleTest {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
}

/// Welch's t-test for equal means, two-sided.
pub fn welch_t(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    let se = (va + vb).sqrt();
    if se == 0.0 {
        return (0.0, if mean(a) == mean(b) { 1.0 } else { 0.0 });
    }
    let t = (mean(a) - mean(b)) / se;
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    (t, 2.0 * (1.0 - dist.cdf(t.abs())))
}

/// F-test for equal variances, two-sided.
pub fn f_test(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (va, vb) = (variance(a), variance(b));
    let f = va / vb;
    let dist = FisherSnedecor::new(a.len() as f64 - 1.0, b.len() as f64 - 1.0).expect("valid F distribution");
    let c = dist.cdf(f);
    (f, (2.0 * c.min(1.0 - c)).min(1.0))
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let s = ne.sqrt();
    let lambda = (s + 0.12 + 0.11 / s) * d;
    (d, kolmogorov_tail(lambda))
}

/// `P(K > λ)` for the Kolmogorov distribution.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Empirical quantile with linear interpolation, `q ∈ [0, 1]`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_known_values() {
        // P(K > 1.36) ≈ 0.049, P(K > 1.63) ≈ 0.0098
        assert!((kolmogorov_tail(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_tail(1.628) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn ks_identical_and_shifted() {
        let a: Vec<f64> = (0..500).map(|k| k as f64 / 500.0).collect();
        assert_eq!(ks_two_sample(&a, &a).0, 0.0);
        let b: Vec<f64> = a.iter().map(|v| v + 0.3).collect();
        let (d, p) = ks_two_sample(&a, &b);
        assert!((d - 0.3).abs() < 0.01);
        assert!(p < 1e-10);
    }

    #[test]
    fn fit_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (s, c) = linear_fit(&x, &y);
        assert!((s + 0.5).abs() < 1e-12 && (c - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quantiles() {
        assert!((normal_upper_quantile(0.025) - Z95).abs() < 1e-9);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5), 2.0);
    }
}
