//! Small estimators shared by the experiment modules.

use serde::Serialize;

/// Two-sided 95% standard-normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Sample mean with its standard error (sample std / sqrt(n)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MeanEstimate {
    /// Fold in iteration order, so the result depends only on the order of
    /// `values`, never on how they were produced.
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let mut acc = Accumulator::default();
        for v in values {
            acc.push(v);
        }
        acc.finish()
    }

    pub fn contains(&self, target: f64, n_se: f64) -> bool {
        (self.mean - target).abs() <= n_se * self.std_error
    }
}

/// Welford running mean/variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn finish(&self) -> MeanEstimate {
        let std_error = if self.n == 0 {
            f64::NAN
        } else {
            (self.variance() / self.n as f64).sqrt()
        };
        MeanEstimate {
            mean: if self.n == 0 { f64::NAN } else { self.mean },
            std_error,
            n: self.n,
        }
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Clamp so the interval always contains p_hat despite rounding at the edges.
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_matches_hand_computation() {
        let (lo, hi) = wilson_interval(346, 1000, Z_95);
        assert!((lo - 0.3171).abs() < 5e-4, "{lo}");
        assert!((hi - 0.3760).abs() < 5e-4, "{hi}");
    }

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 50, Z_95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 50, Z_95);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.9);
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert_eq!(normal_cdf(0.0), 0.5);
        let v = normal_cdf(1.959_963_984_540_054);
        assert!((v - 0.975).abs() < 1e-15, "{v:.17}");
        let w = normal_cdf(-1.0);
        assert!((w - 0.158_655_253_931_457_05).abs() < 1e-15, "{w:.17}");
    }

    #[test]
    fn accumulator_matches_two_pass() {
        let xs = [1.0, 2.5, -3.0, 4.25, 0.5];
        let est = MeanEstimate::from_values(xs);
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((est.mean - mean).abs() < 1e-15);
        assert!((est.std_error - (var / 5.0).sqrt()).abs() < 1e-15);
    }
}
