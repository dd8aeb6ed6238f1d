//! Summary statistics, the Kolmogorov–Smirnov distance to N(0,1), and
//! percentile bootstrap intervals.

use rand::Rng;

use crate::rng::rng_from_seed;
use crate::special::normal_cdf;

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// R⁻¹ Σ (vᵢ − mean)².
pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
}

pub fn std_dev(v: &[f64]) -> f64 {
    variance(v).sqrt()
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// sup_z |F_R(z) − Φ(z)|, evaluated on both sides of every jump.
pub fn ks_normal(z: &[f64]) -> f64 {
    let mut s = z.to_vec();
    s.sort_by(f64::total_cmp);
    let r = s.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        // group ties: the empirical CDF jumps once per distinct value
        let mut j = i;
        while j + 1 < s.len() && s[j + 1] == s[i] {
            j += 1;
        }
        let phi = normal_cdf(s[i]);
        d = d.max(phi - i as f64 / r).max((j + 1) as f64 / r - phi);
        i = j + 1;
    }
    d
}

/// Percentile bootstrap interval for the mean at confidence `level`.
pub fn bootstrap_mean_ci(v: &[f64], level: f64, resamples: usize, seed: u64) -> (f64, f64) {
    let n = v.len();
    let mut rng = rng_from_seed(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| v[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let idx = (p * (resamples - 1) as f64).round() as usize;
        means[idx.min(resamples - 1)]
    };
    let a = (1.0 - level) / 2.0;
    (q(a), q(1.0 - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_quantile;

    #[test]
    fn basic_summaries() {
        let v = [1.0, 2.0, 4.0, 9.0];
        assert_eq!(mean(&v), 4.0);
        assert_eq!(median(&v), 3.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert!((variance(&v) - 9.5).abs() < 1e-12);
        assert_eq!(std_dev(&[5.0]), 0.0);
    }

    #[test]
    fn ks_degenerate_sample() {
        let v = 0.4;
        let d = ks_normal(&[v; 50]);
        let phi = normal_cdf(v);
        assert!((d - phi.max(1.0 - phi)).abs() < 1e-15);
    }

    #[test]
    fn ks_of_exact_quantiles_is_half_step() {
        let r = 200;
        let z: Vec<f64> = (0..r).map(|i| normal_quantile((i as f64 + 0.5) / r as f64)).collect();
        assert!((ks_normal(&z) - 0.5 / r as f64).abs() < 1e-12);
    }

    #[test]
    fn bootstrap_brackets_the_mean() {
        let v: Vec<f64> = (0..100).map(|i| (i % 7) as f64).collect();
        let (lo, hi) = bootstrap_mean_ci(&v, 0.99, 2000, 1);
        let m = mean(&v);
        assert!(lo < m && m < hi);
        assert!(hi - lo < 1.5);
    }
}
