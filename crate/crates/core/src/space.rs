//! Finite metric measure spaces: weighted point sets carrying a metric, with
//! ball geometry, covering nets and the discrete maximal function.
//!
//! Balls are open everywhere: `B(x, r) = { y : d(x, y) < r }`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::stats::SlopeFit;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Euclidean,
    /// Coordinates are periodic with the given period along every axis.
    TorusPeriodic { period: f64 },
    /// One radial coordinate `r >= 0` with `d(r, s) = |r - s|`.
    HalfLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricMeasureSpace {
    coords: Vec<f64>,
    dim: usize,
    weights: Vec<f64>,
    metric: MetricKind,
    dimension_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
}

/// A `ρ/10`-separated, `ρ/10`-covering set of centers with disjointized cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Net {
    pub centers: Vec<usize>,
    pub separation_rho: f64,
    pub cells: Vec<Vec<usize>>,
}

impl MetricMeasureSpace {
    pub fn new(
        coords: Vec<f64>,
        dim: usize,
        weights: Vec<f64>,
        metric: MetricKind,
        dimension_n: f64,
    ) -> Result<Self> {
        if dim == 0 || coords.len() != dim * weights.len() {
            return Err(Error::Config(format!(
                "{} coordinates do not describe {} points in dimension {dim}",
                coords.len(),
                weights.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::Config("space has no points".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::Config(format!("point weight {w} is not strictly positive")));
        }
        if matches!(metric, MetricKind::HalfLine) && (dim != 1 || coords.iter().any(|&r| r < 0.0)) {
            return Err(Error::Config("half-line spaces hold one nonnegative coordinate".into()));
        }
        if let MetricKind::TorusPeriodic { period } = metric {
            if !(period > 0.0) {
                return Err(Error::Config("torus period must be positive".into()));
            }
        }
        Ok(MetricMeasureSpace {
            coords,
            dim,
            weights,
            metric,
            dimension_n,
        })
    }

    /// Uniform `n_per_axis^dims` grid on the torus `[0, 2π)^dims`.
    pub fn torus_grid(dims: usize, n_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&dims) || n_per_axis == 0 {
            return Err(Error::Config("torus grid needs dims in {1,2} and points".into()));
        }
        let h = 2.0 * PI / n_per_axis as f64;
        let axis: Vec<f64> = (0..n_per_axis).map(|i| i as f64 * h).collect();
        let (coords, count) = tensor_coords(&axis, dims);
        Self::new(
            coords,
            dims,
            vec![h.powi(dims as i32); count],
            MetricKind::TorusPeriodic { period: 2.0 * PI },
            dims as f64,
        )
    }

    /// Interior points `a + i (b - a)/(n + 1)`, `i = 1..=n`, with equal weights.
    pub fn interval_grid(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) || n == 0 {
            return Err(Error::Config("interval grid needs b > a and points".into()));
        }
        let h = (b - a) / (n + 1) as f64;
        let coords = (1..=n).map(|i| a + i as f64 * h).collect();
        Self::new(coords, 1, vec![h; n], MetricKind::Euclidean, 1.0)
    }

    /// Uniform grid on `[-halfwidth, halfwidth]^dims` including both ends.
    pub fn line_grid(dims: usize, halfwidth: f64, n_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&dims) || n_per_axis < 2 || !(halfwidth > 0.0) {
            return Err(Error::Config("line grid needs dims in {1,2}, >= 2 points, halfwidth > 0".into()));
        }
        let h = 2.0 * halfwidth / (n_per_axis - 1) as f64;
        let axis: Vec<f64> = (0..n_per_axis).map(|i| -halfwidth + i as f64 * h).collect();
        let (coords, count) = tensor_coords(&axis, dims);
        Self::new(coords, dims, vec![h.powi(dims as i32); count], MetricKind::Euclidean, dims as f64)
    }

    /// Midpoint grid on `(0, r_max)` with radial weights `r^{n-1} Δr`.
    pub fn half_line_grid(r_max: f64, n: usize, dimension_n: f64) -> Result<Self> {
        if !(r_max > 0.0) || n == 0 || dimension_n < 1.0 {
            return Err(Error::Config("half-line grid needs r_max > 0, points, n >= 1".into()));
        }
        let h = r_max / n as f64;
        let coords: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        let weights = coords.iter().map(|r| r.powf(dimension_n - 1.0) * h).collect();
        Self::new(coords, 1, weights, MetricKind::HalfLine, dimension_n)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dimension_n(&self) -> f64 {
        self.dimension_n
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Returns a copy with every weight multiplied by `c > 0`.
    pub fn with_scaled_weights(&self, c: f64) -> Result<Self> {
        Self::new(
            self.coords.clone(),
            self.dim,
            self.weights.iter().map(|w| w * c).collect(),
            self.metric,
            self.dimension_n,
        )
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::arg("x", format!("point index {i} out of range 0..{}", self.len())))
        }
    }

    pub fn distance_to(&self, i: usize, y: &[f64]) -> f64 {
        let x = self.point(i);
        match self.metric {
            MetricKind::TorusPeriodic { period } => x
                .iter()
                .zip(y)
                .map(|(a, b)| {
                    let d = (a - b).rem_euclid(period);
                    d.min(period - d).powi(2)
                })
                .sum::<f64>()
                .sqrt(),
            MetricKind::Euclidean | MetricKind::HalfLine => {
                x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            }
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance_to(i, self.point(j))
    }

    /// Diameter of the point set. Exact for tensor grids; an upper bound for
    /// scattered Euclidean points (bounding-box diagonal).
    pub fn diameter(&self) -> f64 {
        match self.metric {
            MetricKind::TorusPeriodic { period } => {
                let mut extent = 0.0f64;
                for axis in 0..self.dim {
                    let mut vals: Vec<f64> = (0..self.len())
                        .map(|i| self.coords[i * self.dim + axis].rem_euclid(period))
                        .collect();
                    vals.sort_by(f64::total_cmp);
                    // largest circular distance realised between samples
                    let mut best = 0.0f64;
                    let target = period / 2.0;
                    let mut lo = 0;
                    for &v in &vals {
                        while lo < vals.len() && vals[lo] < v - target {
                            lo += 1;
                        }
                        for k in [lo.saturating_sub(1), lo.min(vals.len() - 1)] {
                            let d = (v - vals[k]).abs();
                            best = best.max(d.min(period - d));
                        }
                    }
                    extent += best * best;
                }
                extent.sqrt()
            }
            _ => {
                let mut extent = 0.0;
                for axis in 0..self.dim {
                    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                    for i in 0..self.len() {
                        let v = self.coords[i * self.dim + axis];
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                    extent += (hi - lo).powi(2);
                }
                extent.sqrt()
            }
        }
    }

    pub fn ball_members(&self, ball: Ball) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.distance(ball.center, j) < ball.radius)
            .collect()
    }

    /// `V(x, r) = μ(B(x, r))` for the open ball.
    pub fn ball_volume(&self, x: usize, r: f64) -> Result<f64> {
        self.check_index(x)?;
        if !(r >= 0.0) {
            return Err(Error::arg("r", "radius must be nonnegative"));
        }
        Ok((0..self.len())
            .filter(|&j| self.distance(x, j) < r)
            .map(|j| self.weights[j])
            .sum())
    }

    /// Smallest doubling constant `C` with `V(x, λr) <= C λ^n V(x, r)` over
    /// the sampled centers and radius pairs (n = declared dimension), and
    /// the pooled log-log slope of `V(x, r)` against `r`.
    pub fn doubling_fit(&self, centers: &[usize], radii: &[f64]) -> Result<(f64, f64)> {
        if radii.len() < 4 {
            return Err(Error::arg("radii_grid", "at least four dyadic levels are required"));
        }
        if centers.is_empty() {
            return Err(Error::arg("center_sample", "no centers given"));
        }
        let half_diam = self.diameter() / 2.0;
        if let Some(r) = radii.iter().find(|&&r| r > half_diam) {
            return Err(Error::Domain(format!(
                "radius {r} exceeds half the diameter {half_diam}; boundary effects corrupt the fit"
            )));
        }
        for w in radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::arg("radii_grid", "radii must increase"));
            }
        }
        let n = self.dimension_n;
        let mut c_est = 0.0f64;
        let mut samples = Vec::new();
        for &x in centers {
            let vols: Vec<f64> = radii
                .iter()
                .map(|&r| self.ball_volume(x, r))
                .collect::<Result<_>>()?;
            for (a, (&ra, &va)) in radii.iter().zip(&vols).enumerate() {
                if va > 0.0 {
                    samples.push((ra.ln(), va.ln()));
                }
                for (&rb, &vb) in radii.iter().zip(&vols).skip(a + 1) {
                    if va > 0.0 {
                        c_est = c_est.max(vb / ((rb / ra).powf(n) * va));
                    }
                }
            }
        }
        let fit = SlopeFit::from_log_samples(samples)
            .ok_or_else(|| Error::Data("all sampled balls are empty".into()))?;
        Ok((c_est, fit.exponent))
    }

    /// Greedy maximal `ρ/10`-separated subset in point-index order, with
    /// cells `B̄(x_m, ρ/10) \ ∪_{ℓ<m} B̄(x_ℓ, ρ/10)`.
    pub fn build_net(&self, rho: f64) -> Result<Net> {
        if !(rho > 0.0) {
            return Err(Error::arg("rho", "separation must be positive"));
        }
        let sep = rho / 10.0;
        let mut centers: Vec<usize> = Vec::new();
        for i in 0..self.len() {
            if centers.iter().all(|&c| self.distance(c, i) > sep) {
                centers.push(i);
            }
        }
        let mut cells = vec![Vec::new(); centers.len()];
        for i in 0..self.len() {
            let m = centers
                .iter()
                .position(|&c| self.distance(c, i) <= sep)
                .expect("maximal separated set covers every point");
            cells[m].push(i);
        }
        Ok(Net {
            centers,
            separation_rho: rho,
            cells,
        })
    }

    /// Number of broken net invariants: center pairs closer than `ρ/10`,
    /// points not in exactly one cell, and cell members farther than `ρ/10`
    /// from their center.
    pub fn net_violations(&self, net: &Net) -> usize {
        let sep = net.separation_rho / 10.0;
        let mut bad = 0;
        for (a, &ca) in net.centers.iter().enumerate() {
            bad += net.centers[a + 1..].iter().filter(|&&cb| self.distance(ca, cb) <= sep).count();
        }
        let mut seen = vec![0usize; self.len()];
        for (m, cell) in net.cells.iter().enumerate() {
            for &i in cell {
                seen[i] += 1;
                if self.distance(net.centers[m], i) > sep {
                    bad += 1;
                }
            }
        }
        bad + seen.iter().filter(|&&c| c != 1).count()
    }

    /// `K = max_m #{ℓ : d(x_m, x_ℓ) <= 2ρ}`.
    pub fn overlap_count(&self, net: &Net) -> usize {
        let reach = 2.0 * net.separation_rho;
        net.centers
            .iter()
            .map(|&m| {
                net.centers
                    .iter()
                    .filter(|&&l| self.distance(m, l) <= reach)
                    .count()
            })
            .max()
            .unwrap_or(0)
    }

    /// Weighted `L^p(μ)` norm; `p = ∞` gives the maximum modulus.
    pub fn lp_norm(&self, f: &Field, p: f64) -> Result<f64> {
        lp_norm_weighted(f.values(), &self.weights, p)
    }

    /// Uncentered `r₀`-maximal function over the ball family
    /// `{B(x_j, r) : j any point, r in radii}`.
    pub fn maximal_function(&self, f: &Field, r0: f64, radii: &[f64]) -> Result<Vec<f64>> {
        if radii.is_empty() {
            return Err(Error::arg("radii", "ball family is empty"));
        }
        if !(r0 >= 1.0) {
            return Err(Error::arg("r_index", "maximal exponent must be >= 1"));
        }
        if f.len() != self.len() {
            return Err(Error::arg("f", "field length does not match the space"));
        }
        let mut radii = radii.to_vec();
        radii.sort_by(f64::total_cmp);
        let powered: Vec<f64> = f.values().iter().map(|z| z.norm().powf(r0)).collect();
        let n = self.len();
        let mut out = vec![0.0f64; n];
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
        let mut ball_vals = vec![0.0; radii.len()];
        for j in 0..n {
            order.clear();
            order.extend((0..n).map(|i| (self.distance(j, i), i)));
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            // averages over the nested balls around x_j
            let (mut num, mut den) = (0.0, 0.0);
            let mut q = 0;
            for (k, &r) in radii.iter().enumerate() {
                while q < n && order[q].0 < r {
                    let i = order[q].1;
                    num += powered[i] * self.weights[i];
                    den += self.weights[i];
                    q += 1;
                }
                ball_vals[k] = if den > 0.0 { (num / den).powf(1.0 / r0) } else { 0.0 };
            }
            for k in (0..radii.len().saturating_sub(1)).rev() {
                ball_vals[k] = ball_vals[k].max(ball_vals[k + 1]);
            }
            let mut k = 0;
            for &(d, i) in order.iter() {
                while k < radii.len() && radii[k] <= d {
                    k += 1;
                }
                if k == radii.len() {
                    break;
                }
                out[i] = out[i].max(ball_vals[k]);
            }
        }
        Ok(out)
    }
}

/// `(Σ |f_i|^p w_i)^{1/p}`, or `max |f_i|` for `p = ∞`.
pub fn lp_norm_weighted(values: &[num_complex::Complex64], weights: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::arg("p", format!("exponent {p} is below 1")));
    }
    if values.len() != weights.len() {
        return Err(Error::arg("f", "field length does not match the space"));
    }
    if p.is_infinite() {
        return Ok(values.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    // scale by the max modulus to avoid overflow for large p
    let m = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = values
        .iter()
        .zip(weights)
        .map(|(z, w)| (z.norm() / m).powf(p) * w)
        .sum();
    Ok(m * s.powf(1.0 / p))
}

fn tensor_coords(axis: &[f64], dims: usize) -> (Vec<f64>, usize) {
    match dims {
        1 => (axis.to_vec(), axis.len()),
        _ => {
            let mut coords = Vec::with_capacity(axis.len() * axis.len() * 2);
            for &y in axis {
                for &x in axis {
                    coords.push(x);
                    coords.push(y);
                }
            }
            (coords, axis.len() * axis.len())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn ball_volume_edges() {
        let s = MetricMeasureSpace::torus_grid(1, 64).unwrap();
        assert_eq!(s.ball_volume(3, 0.0).unwrap(), 0.0);
        let full = s.ball_volume(3, s.diameter() + 1e-9).unwrap();
        assert!((full - s.total_mass()).abs() < 1e-12);
        assert!(s.ball_volume(64, 1.0).is_err());
    }

    #[test]
    fn torus_quarter_pi_ball_matches_point_count() {
        let s = MetricMeasureSpace::torus_grid(1, 64).unwrap();
        let h = 2.0 * PI / 64.0;
        let r = PI / 4.0;
        // direct count: offsets k with |k| h < r
        let count = (-64i32..=64).filter(|k| (*k as f64 * h).abs() < r && k.abs() < 32).count();
        let v = s.ball_volume(10, r).unwrap();
        assert!((v - count as f64 * h).abs() < 1e-12);
        assert!((v - 2.0 * r).abs() <= h + 1e-12);
    }

    #[test]
    fn torus_diameter() {
        let s = MetricMeasureSpace::torus_grid(1, 64).unwrap();
        assert!((s.diameter() - PI).abs() < 1e-12);
        let s2 = MetricMeasureSpace::torus_grid(2, 16).unwrap();
        assert!((s2.diameter() - PI * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn doubling_fit_recovers_dimension() {
        let s = MetricMeasureSpace::torus_grid(1, 512).unwrap();
        let h = 2.0 * PI / 512.0;
        let radii: Vec<f64> = (1..7).map(|k| h * 2f64.powi(k)).collect();
        let (c, n) = s.doubling_fit(&[0, 100, 300], &radii).unwrap();
        assert!((n - 1.0).abs() < 0.1, "n_est {n}");
        assert!(c >= 1.0 && c < 1.5);

        let s2 = MetricMeasureSpace::torus_grid(2, 128).unwrap();
        let h2 = 2.0 * PI / 128.0;
        let radii: Vec<f64> = (2..6).map(|k| h2 * 2f64.powi(k)).collect();
        let (_, n2) = s2.doubling_fit(&[0, 8256], &radii).unwrap();
        assert!((n2 - 2.0).abs() < 0.1, "n_est {n2}");
    }

    #[test]
    fn doubling_fit_half_line_radial_weight() {
        let s = MetricMeasureSpace::half_line_grid(20.0, 4096, 3.0).unwrap();
        let radii = [0.5, 1.0, 2.0, 4.0, 8.0];
        let (_, n) = s.doubling_fit(&[0], &radii).unwrap();
        assert!((n - 3.0).abs() < 0.2, "n_est {n}");
    }

    #[test]
    fn doubling_fit_rejects_large_radii() {
        let s = MetricMeasureSpace::torus_grid(1, 64).unwrap();
        let err = s.doubling_fit(&[0], &[0.5, 1.0, 2.0, 4.0]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(s.doubling_fit(&[0], &[0.1, 0.2, 0.4]).is_err());
    }

    fn check_net(s: &MetricMeasureSpace, net: &Net) {
        assert_eq!(s.net_violations(net), 0);
    }

    #[test]
    fn net_on_uniform_line() {
        let s = MetricMeasureSpace::interval_grid(0.0, 101.0, 100).unwrap();
        let h = 1.0;
        let net = s.build_net(10.0 * h).unwrap();
        check_net(&s, &net);
        for i in 0..s.len() {
            let cover = net.centers.iter().map(|&c| s.distance(c, i)).fold(f64::INFINITY, f64::min);
            assert!(cover <= h + 1e-12);
        }
        let k = s.overlap_count(&net);
        assert!(k <= 41, "K = {k}");
        assert_eq!(k, 21);
    }

    #[test]
    fn huge_rho_gives_single_center() {
        let s = MetricMeasureSpace::torus_grid(2, 12).unwrap();
        let net = s.build_net(10.0 * s.diameter()).unwrap();
        assert_eq!(net.centers, vec![0]);
        assert_eq!(net.cells[0].len(), s.len());
        assert_eq!(s.overlap_count(&net), 1);
    }

    #[test]
    fn net_on_torus_2d() {
        let s = MetricMeasureSpace::torus_grid(2, 24).unwrap();
        let h = 2.0 * PI / 24.0;
        let net = s.build_net(15.0 * h).unwrap();
        check_net(&s, &net);
        assert!(s.overlap_count(&net) <= 41 * 41);
    }

    #[test]
    fn lp_norm_basics() {
        let s = MetricMeasureSpace::torus_grid(1, 32).unwrap();
        let one = Field::from_real(&vec![1.0; 32]);
        assert!((s.lp_norm(&one, 1.0).unwrap() - s.total_mass()).abs() < 1e-12);
        let mut e = Field::zeros(32);
        e[5] = Complex64::new(1.0, 0.0);
        assert!((s.lp_norm(&e, 2.0).unwrap() - s.weights()[5].sqrt()).abs() < 1e-15);
        assert!(s.lp_norm(&e, 0.5).is_err());
        assert_eq!(s.lp_norm(&e, f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn maximal_function_constant_and_point_mass() {
        let s = MetricMeasureSpace::torus_grid(1, 64).unwrap();
        let h = 2.0 * PI / 64.0;
        // smallest radius h/2 isolates every grid point
        let radii: Vec<f64> = (0..7).map(|k| 0.5 * h * 2f64.powi(k)).collect();
        let c = Field::from_real(&vec![2.5; 64]);
        let m = s.maximal_function(&c, 1.0, &radii).unwrap();
        assert!(m.iter().all(|v| (v - 2.5).abs() < 1e-12));

        let mut delta = Field::zeros(64);
        delta[20] = Complex64::new(1.0, 0.0);
        let m = s.maximal_function(&delta, 1.0, &radii).unwrap();
        for x in 0..64 {
            let d = s.distance(x, 20);
            if x == 20 || 2.0 * d > radii[6] {
                continue;
            }
            let bound = s.weights()[20] / s.ball_volume(x, 2.0 * d * (1.0 + 1e-12)).unwrap();
            assert!(m[x] >= bound - 1e-12, "x={x}: {} < {bound}", m[x]);
        }
        // smallest ball only holds its own center
        assert!((m[20] - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn lp_norm_holder_and_minkowski(vals in proptest::collection::vec(-5.0f64..5.0, 16),
                                        other in proptest::collection::vec(-5.0f64..5.0, 16),
                                        p in 1.0f64..6.0) {
            let s = MetricMeasureSpace::torus_grid(1, 16).unwrap();
            let f = Field::from_real(&vals);
            let g = Field::from_real(&other);
            let n1 = s.lp_norm(&f, 1.0).unwrap();
            let n2 = s.lp_norm(&f, 2.0).unwrap();
            let ninf = s.lp_norm(&f, f64::INFINITY).unwrap();
            prop_assert!(n2 <= (n1 * ninf).sqrt() + 1e-12);
            let lhs = s.lp_norm(&f.add(&g), p).unwrap();
            let rhs = s.lp_norm(&f, p).unwrap() + s.lp_norm(&g, p).unwrap();
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn maximal_function_sublinear(vals in proptest::collection::vec(-3.0f64..3.0, 24),
                                      other in proptest::collection::vec(-3.0f64..3.0, 24),
                                      c in -4.0f64..4.0) {
            let s = MetricMeasureSpace::torus_grid(1, 24).unwrap();
            let h = 2.0 * PI / 24.0;
            let radii: Vec<f64> = (0..4).map(|k| 0.5 * h * 2f64.powi(k)).collect();
            let f = Field::from_real(&vals);
            let g = Field::from_real(&other);
            let mf = s.maximal_function(&f, 1.0, &radii).unwrap();
            let mg = s.maximal_function(&g, 1.0, &radii).unwrap();
            let mfg = s.maximal_function(&f.add(&g), 1.0, &radii).unwrap();
            let mcf = s.maximal_function(&f.scale(Complex64::new(c, 0.0)), 1.0, &radii).unwrap();
            for i in 0..24 {
                prop_assert!(mfg[i] <= mf[i] + mg[i] + 1e-12);
                prop_assert!((mcf[i] - c.abs() * mf[i]).abs() < 1e-10);
                prop_assert!(mf[i] >= vals[i].abs() - 1e-12);
            }
        }

        #[test]
        fn ball_volume_monotone(r1 in 0.0f64..4.0, dr in 0.0f64..2.0, x in 0usize..40) {
            let s = MetricMeasureSpace::torus_grid(1, 40).unwrap();
            prop_assert!(s.ball_volume(x, r1).unwrap() <= s.ball_volume(x, r1 + dr).unwrap());
        }
    }
}
