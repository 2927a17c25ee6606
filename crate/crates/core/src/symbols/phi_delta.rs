//! Frequency pieces `φ_{δ,j}(s) = (2π)^{-1} ∫ ζ_j(u) φ̂_δ(u) cos(su) du` of
//! `φ_δ(s) = φ(δ^{-1}(1 - s²))`, computed on a periodic grid by FFT.

use super::{bumps, zeta_family, ArgumentKind, Symbol};
use crate::error::{Error, Result};
use crate::stats::SlopeFit;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Discretization of the `s`-line used for the transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiDeltaSpec {
    /// Length of the periodic `s` window.
    pub period: f64,
    /// Number of pieces beyond `j0` (`J = j0 + j_extra`).
    pub j_extra: i32,
    /// Largest admissible FFT length.
    pub max_points: usize,
    /// Samples are kept for `0 <= s < s_store`.
    pub s_store: f64,
}

impl Default for PhiDeltaSpec {
    fn default() -> Self {
        PhiDeltaSpec {
            period: 32.0,
            j_extra: 12,
            max_points: 1 << 22,
            s_store: 8.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhiDeltaFamily {
    pub delta: f64,
    pub j0: i32,
    pub j_max: i32,
    h_s: f64,
    /// `pieces[j - j0][i] = φ_{δ,j}(i h_s)`
    pieces: Vec<Arc<Vec<f64>>>,
    phi: Symbol,
}

/// `j0 = -⌊log₂ δ⌋ - 1`.
pub fn j0_for(delta: f64) -> i32 {
    -(delta.log2().floor() as i32) - 1
}

/// Builds `φ_{δ,j}` for `j0 <= j <= j0 + spec.j_extra` with the shipped `η`
/// and the given bump `phi` (supported in `[-1/2, 1/2]`).
pub fn phi_delta_family(delta: f64, phi: &Symbol, spec: PhiDeltaSpec) -> Result<PhiDeltaFamily> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::arg("delta", "must lie in (0, 1]"));
    }
    let j0 = j0_for(delta);
    let j_max = j0 + spec.j_extra;
    // Nyquist must cover supp ζ_{j_max} = [-2^{j_max+1}, 2^{j_max+1}]
    let h_target = PI / 2f64.powi(j_max + 1);
    let needed = (spec.period / h_target).ceil() as usize;
    let n = needed.next_power_of_two();
    if n > spec.max_points {
        return Err(Error::Config(format!(
            "phi_delta grid needs {n} points (> {}) to resolve frequencies up to 2^{}",
            spec.max_points,
            j_max + 1
        )));
    }
    let h_s = spec.period / n as f64;
    if h_s * 32.0 > delta {
        return Err(Error::Config("s-grid does not resolve the delta-width bump".into()));
    }
    let phi_d = {
        let p = phi.clone();
        move |s: f64| p.eval_re((1.0 - s * s) / delta)
    };
    let mut spectrum: Vec<Complex64> = (0..n)
        .map(|m| {
            let idx = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            Complex64::new(phi_d(idx * h_s), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    fwd.process(&mut spectrum);
    let du = 2.0 * PI / spec.period;
    let zetas = zeta_family(j0, j_max, &bumps::eta_symbol())?;
    let n_store = ((spec.s_store / h_s).ceil() as usize).min(n / 2);
    let pieces: Vec<Arc<Vec<f64>>> = zetas
        .par_iter()
        .map(|z| {
            let mut buf: Vec<Complex64> = spectrum
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
                    v * z.eval_re(kk * du)
                })
                .collect();
            inv.process(&mut buf);
            Arc::new(buf[..n_store].iter().map(|c| c.re / n as f64).collect())
        })
        .collect();
    Ok(PhiDeltaFamily {
        delta,
        j0,
        j_max,
        h_s,
        pieces,
        phi: phi.clone(),
    })
}

fn cubic_interp(samples: &[f64], h: f64, s: f64) -> f64 {
    let x = s.abs() / h;
    let n = samples.len();
    if n < 4 || x >= (n - 1) as f64 {
        return 0.0;
    }
    let i = x.floor() as usize;
    let t = x - i as f64;
    // even extension across s = 0
    let at = |k: isize| samples[k.unsigned_abs().min(n - 1)];
    let k = i as isize;
    let (p0, p1, p2, p3) = (at(k - 1), at(k), at(k + 1), at(k + 2));
    let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    p0 * l0 + p1 * l1 + p2 * l2 + p3 * l3
}

impl PhiDeltaFamily {
    pub fn grid_step(&self) -> f64 {
        self.h_s
    }

    pub fn n_stored(&self) -> usize {
        self.pieces[0].len()
    }

    pub fn samples(&self, j: i32) -> &[f64] {
        &self.pieces[(j - self.j0) as usize]
    }

    /// `φ_δ(s)` evaluated directly.
    pub fn phi_delta(&self, s: f64) -> f64 {
        self.phi.eval_re((1.0 - s * s) / self.delta)
    }

    /// Sampled symbol with cubic interpolation, even in `s`, zero beyond the
    /// stored window.
    pub fn symbol(&self, j: i32) -> Symbol {
        let data = self.pieces[(j - self.j0) as usize].clone();
        let h = self.h_s;
        Symbol::real(format!("phi_delta_j(delta={},j={j})", self.delta), ArgumentKind::OfSqrtL, None, move |s| {
            cubic_interp(&data, h, s)
        })
    }

    /// `max |Σ_j φ_{δ,j}(s) - φ_δ(s)|` over grid points with `s <= s_max`.
    pub fn reconstruction_error(&self, s_max: f64) -> f64 {
        let top = ((s_max / self.h_s).floor() as usize + 1).min(self.n_stored());
        (0..top)
            .map(|i| {
                let total: f64 = self.pieces.iter().map(|p| p[i]).sum();
                (total - self.phi_delta(i as f64 * self.h_s)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `sup |φ_{δ,j}(s)|` over stored grid points with `lo <= s <= hi`.
    pub fn sup_on(&self, j: i32, lo: f64, hi: f64) -> f64 {
        let p = self.samples(j);
        let a = (lo / self.h_s).ceil() as usize;
        let b = ((hi / self.h_s).floor() as usize).min(p.len() - 1);
        p[a..=b].iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Log₂ decay of `sup_{s∈[1/4,8]} |φ_{δ,j}|` against `j`, fitted over the
    /// last `window` pieces with `j >= j_from` whose sup stays above `floor`.
    pub fn decay_fit(&self, j_from: i32, floor: f64, window: usize) -> Option<SlopeFit> {
        let above: Vec<(f64, f64)> = (j_from.max(self.j0)..=self.j_max)
            .map(|j| (j as f64, self.sup_on(j, 0.25, 8.0)))
            .take_while(|(_, v)| *v > floor)
            .map(|(j, v)| (j, v.log2()))
            .collect();
        let start = above.len().saturating_sub(window);
        SlopeFit::from_log_samples(above[start..].to_vec())
    }

    /// Smallest `C` with `|φ_{δ,j}(s)| <= C 2^{j-j0} (1 + 2^j |s-1|)^{-n}` on
    /// the stored grid outside `[1/4, 8]`.
    pub fn envelope_constant(&self, j: i32, n_pow: f64) -> f64 {
        let p = self.samples(j);
        let scale = 2f64.powi(j - self.j0);
        let tj = 2f64.powi(j);
        p.iter()
            .enumerate()
            .filter_map(|(i, v)| {
                let s = i as f64 * self.h_s;
                if (0.25..=8.0).contains(&s) {
                    None
                } else {
                    Some(v.abs() / (scale * (1.0 + tj * (s - 1.0).abs()).powf(-n_pow)))
                }
            })
            .fold(0.0, f64::max)
    }
}
