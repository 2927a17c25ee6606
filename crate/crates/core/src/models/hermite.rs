/// Normalized Hermite functions `h_k(x)`, `k < modes`, at every `x`, laid out
/// as `out[k * xs.len() + i]`.
///
/// Uses the function-normalized recurrence
/// `h_{k+1} = x √(2/(k+1)) h_k − √(k/(k+1)) h_{k−1}` started from the
/// polynomial part only; the Gaussian factor and any rescaling are folded in
/// through a running logarithm so large `|x|` neither overflows nor
/// underflows early.
pub fn hermite_functions(modes: usize, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut out = vec![0.0; modes * n];
    let c0 = std::f64::consts::PI.powf(-0.25);
    for (i, &x) in xs.iter().enumerate() {
        let mut log_scale = -0.5 * x * x;
        let mut prev = 0.0;
        let mut cur = c0;
        for k in 0..modes {
            out[k * n + i] = cur * log_scale.exp();
            let kf = k as f64;
            let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            let big = cur.abs().max(prev.abs());
            if big > 1e100 {
                prev /= big;
                cur /= big;
                log_scale += big.ln();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_closed_forms() {
        let xs = [-1.3, 0.0, 0.7, 2.5];
        let t = hermite_functions(3, &xs);
        let c = std::f64::consts::PI.powf(-0.25);
        for (i, &x) in xs.iter().enumerate() {
            let g = (-0.5 * x * x).exp();
            assert!((t[i] - c * g).abs() < 1e-15);
            assert!((t[4 + i] - c * 2f64.sqrt() * x * g).abs() < 1e-15);
            assert!((t[8 + i] - c * (2.0 * x * x - 1.0) / 2f64.sqrt() * g).abs() < 1e-14);
        }
    }

    #[test]
    fn finite_far_out() {
        let xs = [-60.0, 45.0];
        let t = hermite_functions(400, &xs);
        assert!(t.iter().all(|v| v.is_finite()));
    }
}
