//! Versioned probe fields for sup-over-`f` lower bounds.

use crate::field::{CoefficientVector, Field};
use crate::models::SpectralModel;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const PROBE_FAMILY_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub name: String,
    pub field: Field,
}

/// Index of the grid point closest to the barycentre of the grid.
pub fn central_point(model: &SpectralModel) -> usize {
    let s = model.space();
    let d = s.dim();
    let mut mid = vec![0.0; d];
    for i in 0..s.len() {
        for (m, x) in mid.iter_mut().zip(s.point(i)) {
            *m += x / s.len() as f64;
        }
    }
    (0..s.len())
        .min_by(|&a, &b| s.distance_to(a, &mid).total_cmp(&s.distance_to(b, &mid)))
        .unwrap_or(0)
}

/// `exp(-d(x, x0)² / 2w²)`.
pub fn gaussian_bump(model: &SpectralModel, center: usize, width: f64) -> Field {
    let s = model.space();
    let c = s.point(center).to_vec();
    Field::from_fn(s.len(), |i| Complex64::new((-(s.distance_to(i, &c) / width).powi(2) / 2.0).exp(), 0.0))
}

/// `Σ_{k < band} conj(e_k(x0)) e_k`, the reproducing kernel of the band at `x0`.
pub fn dirichlet_probe(model: &SpectralModel, center: usize) -> Field {
    let mut c = CoefficientVector::zeros(model.truncation_k());
    for k in 0..model.band_limit() {
        c.0[k] = model.eigenfunction(k, center).conj();
    }
    model.synthesis(&c).expect("shapes match by construction")
}

/// Coefficients `±1` on the band, seeded.
pub fn random_sign_coefficients(model: &SpectralModel, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = CoefficientVector::zeros(model.truncation_k());
    for k in 0..model.band_limit() {
        c.0[k] = Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0);
    }
    model.synthesis(&c).expect("shapes match by construction")
}

/// The version-1 family: point masses, single modes, Gaussian bumps at three
/// widths, modulated bumps, Dirichlet-kernel analogues and seeded random
/// `±1` coefficient fields.
pub fn probe_family(model: &SpectralModel, seed: u64) -> Vec<Probe> {
    let s = model.space();
    let n = s.len();
    let x0 = central_point(model);
    let diam = s.diameter();
    let mut out = Vec::new();
    for (tag, i) in [("center", x0), ("edge", 0)] {
        let mut f = Field::zeros(n);
        f[i] = Complex64::new(1.0 / s.weights()[i], 0.0);
        out.push(Probe { name: format!("point-mass-{tag}"), field: f });
    }
    let band = model.band_limit();
    for k in [0, band / 2, band.saturating_sub(1)] {
        out.push(Probe { name: format!("mode-{k}"), field: model.mode_field(k) });
    }
    for (tag, frac) in [("narrow", 1.0 / 64.0), ("medium", 1.0 / 16.0), ("wide", 1.0 / 4.0)] {
        out.push(Probe { name: format!("gauss-{tag}"), field: gaussian_bump(model, x0, frac * diam) });
    }
    let g = gaussian_bump(model, x0, diam / 16.0);
    let carrier = model.mode_field(band / 2);
    out.push(Probe {
        name: "modulated-gauss".into(),
        field: Field(g.values().iter().zip(carrier.values()).map(|(a, b)| a * b).collect()),
    });
    out.push(Probe { name: "dirichlet-center".into(), field: dirichlet_probe(model, x0) });
    out.push(Probe { name: "dirichlet-edge".into(), field: dirichlet_probe(model, n / 7) });
    for r in 0..2u64 {
        out.push(Probe {
            name: format!("random-sign-{r}"),
            field: random_sign_coefficients(model, seed.wrapping_add(r)),
        });
    }
    out.into_iter().filter(|p| p.field.max_abs() > 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_deterministic_and_nonzero() {
        let m = SpectralModel::torus(1, 12, 32).unwrap();
        let a = probe_family(&m, 5);
        let b = probe_family(&m, 5);
        assert_eq!(a, b);
        assert!(a.len() >= 12);
        assert!(a.iter().all(|p| p.field.is_finite()));
    }

    #[test]
    fn dirichlet_probe_peaks_at_center() {
        let m = SpectralModel::torus(1, 12, 40).unwrap();
        let c = central_point(&m);
        let d = dirichlet_probe(&m, c);
        let peak = d.values().iter().map(|z| z.norm()).enumerate().fold((0, 0.0), |a, (i, v)| if v > a.1 { (i, v) } else { a });
        assert_eq!(peak.0, c);
        let want = m.band_limit() as f64 / (2.0 * std::f64::consts::PI);
        assert!((peak.1 - want).abs() < 1e-12);
    }
}
