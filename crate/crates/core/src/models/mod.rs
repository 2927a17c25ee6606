//! Model self-adjoint operators with analytic eigendata, discretized on the
//! quadrature of a [`MetricMeasureSpace`].

#[cfg(feature = "bessel")]
pub mod bessel;
mod hermite;

use crate::error::{Error, Result};
use crate::field::{CoefficientVector, Field};
use crate::space::MetricMeasureSpace;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

pub use hermite::hermite_functions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Torus1d,
    Torus2d,
    IntervalDirichlet,
    Hermite1d,
    Hermite2d,
    BesselRadial,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Torus1d => "torus-1d",
            ModelKind::Torus2d => "torus-2d",
            ModelKind::IntervalDirichlet => "interval-dirichlet",
            ModelKind::Hermite1d => "hermite-1d",
            ModelKind::Hermite2d => "hermite-2d",
            ModelKind::BesselRadial => "bessel-radial",
        }
    }

    /// Whether the continuum operator has finite propagation speed.
    pub fn has_finite_speed(&self) -> bool {
        !matches!(self, ModelKind::Hermite1d | ModelKind::Hermite2d)
    }
}

/// Declarative model description, as found in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    #[serde(rename = "torus-1d")]
    Torus1d { modes: usize, grid: usize },
    #[serde(rename = "torus-2d")]
    Torus2d { modes: usize, grid: usize },
    IntervalDirichlet { modes: usize, grid: usize },
    #[serde(rename = "hermite-1d")]
    Hermite1d { modes: usize, halfwidth: f64, grid: usize },
    #[serde(rename = "hermite-2d")]
    Hermite2d { modes: usize, halfwidth: f64, grid: usize },
    BesselRadial { n: usize, c: f64, modes: usize, r_domain: f64, grid: usize },
}

impl ModelSpec {
    pub fn build(&self) -> Result<SpectralModel> {
        match *self {
            ModelSpec::Torus1d { modes, grid } => SpectralModel::torus(1, modes, grid),
            ModelSpec::Torus2d { modes, grid } => SpectralModel::torus(2, modes, grid),
            ModelSpec::IntervalDirichlet { modes, grid } => {
                SpectralModel::interval_dirichlet(modes, grid)
            }
            ModelSpec::Hermite1d { modes, halfwidth, grid } => {
                SpectralModel::hermite(1, modes, halfwidth, grid)
            }
            ModelSpec::Hermite2d { modes, halfwidth, grid } => {
                SpectralModel::hermite(2, modes, halfwidth, grid)
            }
            #[cfg(feature = "bessel")]
            ModelSpec::BesselRadial { n, c, modes, r_domain, grid } => {
                bessel::bessel_model(n, c, modes, r_domain, grid)
            }
            #[cfg(not(feature = "bessel"))]
            ModelSpec::BesselRadial { .. } => Err(Error::Config(
                "bessel-radial models need the `bessel` feature".into(),
            )),
        }
    }

    /// Number of kernel entries `N²` a dense kernel on this model needs.
    pub fn point_count(&self) -> usize {
        match *self {
            ModelSpec::Torus1d { grid, .. }
            | ModelSpec::IntervalDirichlet { grid, .. }
            | ModelSpec::Hermite1d { grid, .. }
            | ModelSpec::BesselRadial { grid, .. } => grid,
            ModelSpec::Torus2d { grid, .. } | ModelSpec::Hermite2d { grid, .. } => grid * grid,
        }
    }

    /// Same model with the mode count scaled by `factor` and the grid
    /// enlarged to keep the model's preconditions.
    pub fn refined(&self, factor: usize) -> ModelSpec {
        let mut s = self.clone();
        match &mut s {
            ModelSpec::Torus1d { modes, grid }
            | ModelSpec::Torus2d { modes, grid }
            | ModelSpec::IntervalDirichlet { modes, grid } => {
                *modes *= factor;
                *grid *= factor;
            }
            ModelSpec::Hermite1d { modes, halfwidth, grid }
            | ModelSpec::Hermite2d { modes, halfwidth, grid } => {
                *modes *= factor;
                let hw = ((2 * *modes + 1) as f64).sqrt() + 4.0;
                if *halfwidth < hw {
                    *grid = ((*grid as f64) * hw / *halfwidth).ceil() as usize;
                    *halfwidth = hw;
                }
                *grid *= factor.max(1);
            }
            ModelSpec::BesselRadial { modes, grid, .. } => {
                *modes *= factor;
                *grid *= factor;
            }
        }
        s
    }
}

/// A truncated spectral resolution `L = Σ_k λ_k e_k ⊗ ē_k` sampled on a space.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    space: MetricMeasureSpace,
    kind: ModelKind,
    eigenvalues: Vec<f64>,
    labels: Vec<[i64; 2]>,
    /// mode-major samples `e_k(x_i)` at `k * N + i`
    basis: Vec<Complex64>,
    ortho_tol: f64,
}

impl SpectralModel {
    /// Assembles a model from explicit eigendata; modes must be sorted by
    /// eigenvalue.
    pub fn from_parts(
        space: MetricMeasureSpace,
        kind: ModelKind,
        eigenvalues: Vec<f64>,
        labels: Vec<[i64; 2]>,
        basis: Vec<Complex64>,
        ortho_tol: f64,
    ) -> Result<Self> {
        let k = eigenvalues.len();
        if k == 0 {
            return Err(Error::Config("model retains no modes".into()));
        }
        if labels.len() != k || basis.len() != k * space.len() {
            return Err(Error::Config("eigendata shapes do not match".into()));
        }
        if eigenvalues.iter().any(|l| !(*l >= 0.0)) || eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("eigenvalues must be nonnegative and sorted".into()));
        }
        if basis.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numeric("eigenfunction samples are not finite".into()));
        }
        Ok(SpectralModel {
            space,
            kind,
            eigenvalues,
            labels,
            basis,
            ortho_tol,
        })
    }

    /// Flat torus `[0, 2π)^dims` with frequencies `|k|² <= modes²`.
    pub fn torus(dims: usize, modes_per_axis: usize, grid_per_axis: usize) -> Result<Self> {
        if grid_per_axis < 2 * modes_per_axis + 1 {
            return Err(Error::Config(format!(
                "grid_per_axis {grid_per_axis} < 2*modes+1 = {}: quadrature aliases",
                2 * modes_per_axis + 1
            )));
        }
        let space = MetricMeasureSpace::torus_grid(dims, grid_per_axis)?;
        let m = modes_per_axis as i64;
        let mut labels: Vec<[i64; 2]> = match dims {
            1 => (-m..=m).map(|k| [k, 0]).collect(),
            _ => {
                let mut v = Vec::new();
                for k1 in -m..=m {
                    for k2 in -m..=m {
                        if k1 * k1 + k2 * k2 <= m * m {
                            v.push([k1, k2]);
                        }
                    }
                }
                v
            }
        };
        labels.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1], k[0].abs(), k[0], k[1]));
        let eigenvalues: Vec<f64> = labels.iter().map(|k| (k[0] * k[0] + k[1] * k[1]) as f64).collect();
        let norm = (2.0 * PI).powf(-(dims as f64) / 2.0);
        let n = space.len();
        let mut basis = vec![Complex64::new(0.0, 0.0); labels.len() * n];
        basis.par_chunks_mut(n).zip(&labels).for_each(|(row, k)| {
            for (i, v) in row.iter_mut().enumerate() {
                let x = space.point(i);
                let phase = k[0] as f64 * x[0] + if dims == 2 { k[1] as f64 * x[1] } else { 0.0 };
                *v = Complex64::from_polar(norm, phase);
            }
        });
        let kind = if dims == 1 { ModelKind::Torus1d } else { ModelKind::Torus2d };
        Self::from_parts(space, kind, eigenvalues, labels, basis, 1e-8)
    }

    /// Dirichlet Laplacian on `(0, π)`: `λ_k = k²`, `e_k = √(2/π) sin(kx)`.
    pub fn interval_dirichlet(modes: usize, grid: usize) -> Result<Self> {
        if modes == 0 || grid < modes {
            return Err(Error::Config(format!(
                "interval grid {grid} cannot resolve {modes} sine modes"
            )));
        }
        let space = MetricMeasureSpace::interval_grid(0.0, PI, grid)?;
        let labels: Vec<[i64; 2]> = (1..=modes as i64).map(|k| [k, 0]).collect();
        let eigenvalues = labels.iter().map(|k| (k[0] * k[0]) as f64).collect();
        let n = space.len();
        let c = (2.0 / PI).sqrt();
        let mut basis = vec![Complex64::new(0.0, 0.0); modes * n];
        basis.par_chunks_mut(n).zip(&labels).for_each(|(row, k)| {
            for (i, v) in row.iter_mut().enumerate() {
                *v = Complex64::new(c * (k[0] as f64 * space.point(i)[0]).sin(), 0.0);
            }
        });
        Self::from_parts(space, ModelKind::IntervalDirichlet, eigenvalues, labels, basis, 1e-8)
    }

    /// Harmonic oscillator `-Δ + |x|²` on `[-halfwidth, halfwidth]^dims`,
    /// modes of total degree `< modes`.
    pub fn hermite(dims: usize, modes: usize, halfwidth: f64, grid: usize) -> Result<Self> {
        if modes == 0 || !(1..=2).contains(&dims) {
            return Err(Error::Config("hermite model needs modes > 0 and dims in {1,2}".into()));
        }
        let turning = ((2 * modes + 1) as f64).sqrt();
        if halfwidth < turning + 4.0 {
            return Err(Error::Config(format!(
                "halfwidth {halfwidth} does not cover the allowed region of the top mode: need >= {:.4}",
                turning + 4.0
            )));
        }
        let space = MetricMeasureSpace::line_grid(dims, halfwidth, grid)?;
        let h = 2.0 * halfwidth / (grid - 1) as f64;
        if h * turning > 2.0 {
            return Err(Error::Config(format!(
                "grid spacing {h:.4} under-resolves the top mode (need spacing <= {:.4})",
                2.0 / turning
            )));
        }
        let axis: Vec<f64> = (0..grid).map(|i| -halfwidth + i as f64 * h).collect();
        // table[k * grid + i] = h_k(axis[i])
        let table = hermite_functions(modes, &axis);
        let n = space.len();
        let (labels, eigenvalues): (Vec<[i64; 2]>, Vec<f64>) = match dims {
            1 => (0..modes as i64).map(|k| ([k, 0], (2 * k + 1) as f64)).unzip(),
            _ => {
                let mut v = Vec::new();
                for deg in 0..modes as i64 {
                    for k1 in (0..=deg).rev() {
                        v.push(([k1, deg - k1], (2 * deg + 2) as f64));
                    }
                }
                v.into_iter().unzip()
            }
        };
        let mut basis = vec![Complex64::new(0.0, 0.0); labels.len() * n];
        basis.par_chunks_mut(n).zip(&labels).for_each(|(row, k)| {
            if dims == 1 {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = Complex64::new(table[k[0] as usize * grid + i], 0.0);
                }
            } else {
                for (i, v) in row.iter_mut().enumerate() {
                    let (ix, iy) = (i % grid, i / grid);
                    let val = table[k[0] as usize * grid + ix] * table[k[1] as usize * grid + iy];
                    *v = Complex64::new(val, 0.0);
                }
            }
        });
        let kind = if dims == 1 { ModelKind::Hermite1d } else { ModelKind::Hermite2d };
        Self::from_parts(space, kind, eigenvalues, labels, basis, 1e-6)
    }

    pub fn space(&self) -> &MetricMeasureSpace {
        &self.space
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn labels(&self) -> &[[i64; 2]] {
        &self.labels
    }

    pub fn truncation_k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n_points(&self) -> usize {
        self.space.len()
    }

    pub fn ortho_tol(&self) -> f64 {
        self.ortho_tol
    }

    /// Sampled eigenfunction `e_k(x_i)`.
    pub fn eigenfunction(&self, k: usize, i: usize) -> Complex64 {
        self.basis[k * self.space.len() + i]
    }

    /// Samples of `e_k` over all points.
    pub fn mode(&self, k: usize) -> &[Complex64] {
        let n = self.space.len();
        &self.basis[k * n..(k + 1) * n]
    }

    pub fn mode_field(&self, k: usize) -> Field {
        Field(self.mode(k).to_vec())
    }

    pub fn has_zero_mode(&self) -> bool {
        self.eigenvalues[0] == 0.0
    }

    /// `c_k = ⟨f, e_k⟩_μ`.
    pub fn analysis(&self, f: &Field) -> Result<CoefficientVector> {
        if f.len() != self.n_points() {
            return Err(Error::arg("f", "field length does not match the model grid"));
        }
        let w = self.space.weights();
        let fw: Vec<Complex64> = f.values().iter().zip(w).map(|(z, &m)| z * m).collect();
        let coeffs = (0..self.truncation_k())
            .into_par_iter()
            .map(|k| {
                self.mode(k)
                    .iter()
                    .zip(&fw)
                    .fold(Complex64::new(0.0, 0.0), |acc, (e, v)| acc + e.conj() * v)
            })
            .collect();
        Ok(CoefficientVector(coeffs))
    }

    /// `f(x_i) = Σ_k c_k e_k(x_i)`.
    pub fn synthesis(&self, c: &CoefficientVector) -> Result<Field> {
        if c.len() != self.truncation_k() {
            return Err(Error::arg("c", "coefficient length does not match the model"));
        }
        let n = self.n_points();
        let vals = (0..n)
            .into_par_iter()
            .map(|i| {
                c.0.iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (k, ck)| acc + ck * self.basis[k * n + i])
            })
            .collect();
        Ok(Field(vals))
    }

    /// Largest entry of `|G - I|` for the quadrature Gram matrix
    /// `G_{jk} = ⟨e_j, e_k⟩_μ`.
    pub fn orthonormality_error(&self) -> f64 {
        let w = self.space.weights();
        let k = self.truncation_k();
        (0..k)
            .into_par_iter()
            .map(|a| {
                let ea = self.mode(a);
                (a..k)
                    .map(|b| {
                        let g = ea
                            .iter()
                            .zip(self.mode(b))
                            .zip(w)
                            .fold(Complex64::new(0.0, 0.0), |acc, ((x, y), &m)| acc + x * y.conj() * m);
                        let target = if a == b { 1.0 } else { 0.0 };
                        (g - target).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Number of modes the band-limit contract admits (`0.8 K`).
    pub fn band_limit(&self) -> usize {
        ((0.8 * self.truncation_k() as f64).floor() as usize).max(1)
    }

    /// Random band-limited field with standard normal-ish coefficients on
    /// the first `band_limit()` modes; the zero mode is dropped when asked.
    pub fn random_band_limited(&self, seed: u64, zero_mode_free: bool) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = CoefficientVector::zeros(self.truncation_k());
        for k in 0..self.band_limit() {
            if zero_mode_free && self.eigenvalues[k] == 0.0 {
                continue;
            }
            c.0[k] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        if self.kind_is_real() {
            // real-valued eigenfunctions: keep fields real
            for z in c.0.iter_mut() {
                z.im = 0.0;
            }
        }
        self.synthesis(&c).expect("shapes match by construction")
    }

    fn kind_is_real(&self) -> bool {
        !matches!(self.kind, ModelKind::Torus1d | ModelKind::Torus2d)
    }

    /// CSV listing `k,label1,label2,eigenvalue`.
    pub fn eigendata_csv(&self) -> String {
        let mut s = String::from("k,label1,label2,eigenvalue\n");
        for (k, (l, e)) in self.labels.iter().zip(&self.eigenvalues).enumerate() {
            let _ = writeln!(s, "{k},{},{},{e}", l[0], l[1]);
        }
        s
    }
}
