use serde::{Deserialize, Serialize};

/// Least-squares line through `(log x, log y)` samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub exponent: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub samples: Vec<(f64, f64)>,
}

impl SlopeFit {
    /// Fits `log y = exponent * log x + intercept`. Returns `None` when fewer
    /// than two samples are finite and positive.
    pub fn from_points(xs: &[f64], ys: &[f64]) -> Option<SlopeFit> {
        let samples: Vec<(f64, f64)> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| (x.ln(), y.ln()))
            .collect();
        Self::from_log_samples(samples)
    }

    pub fn from_log_samples(samples: Vec<(f64, f64)>) -> Option<SlopeFit> {
        let (exponent, intercept, stderr, r_squared) = linear_regression(&samples)?;
        Some(SlopeFit {
            exponent,
            intercept,
            stderr,
            r_squared,
            samples,
        })
    }

    /// The declared growth rule: slope exceeds three standard errors.
    pub fn is_growing(&self) -> bool {
        self.exponent > 3.0 * self.stderr
    }
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, stderr(a), r²)`.
pub fn linear_regression(samples: &[(f64, f64)]) -> Option<(f64, f64, f64, f64)> {
    let n = samples.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let syy: f64 = samples.iter().map(|s| (s.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let sse: f64 = samples.iter().map(|s| (s.1 - a * s.0 - b).powi(2)).sum();
    let stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Some((a, b, stderr, r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_has_zero_stderr() {
        let xs: Vec<f64> = (1..=6).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(0.5)).collect();
        let fit = SlopeFit::from_points(&xs, &ys).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.is_growing());
    }

    #[test]
    fn flat_noise_is_not_growing() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.0];
        let ys = [1.0, 1.01, 0.99, 1.0, 1.005];
        let fit = SlopeFit::from_points(&xs, &ys).unwrap();
        assert!(!fit.is_growing());
    }
}
