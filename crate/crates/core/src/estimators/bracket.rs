//! `p → q` operator-norm brackets: exact endpoints, ascent lower bounds,
//! interpolation and Hölder upper bounds.

use crate::calculus::{KernelMatrix, OperatorHandle};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::space::lp_norm_weighted;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// A linear operator on fields over a weighted point set.
pub trait LinearOp: Sync {
    fn weights(&self) -> &[f64];
    fn apply(&self, f: &Field) -> Result<Field>;
    /// Adjoint with respect to the weighted inner product.
    fn apply_adjoint(&self, g: &Field) -> Result<Field>;
    /// Exact `‖T‖_{2→2}` when known.
    fn exact_2_2(&self) -> Option<f64> {
        None
    }
    /// An upper bound for `‖T‖_{2→2}`.
    fn upper_2_2(&self) -> Option<f64> {
        self.exact_2_2()
    }
    /// `‖T(δ_j/μ_j)‖_2` for every `j`, when cheaply available.
    fn column_norms_2(&self) -> Option<Vec<f64>> {
        None
    }
    fn dim(&self) -> usize {
        self.weights().len()
    }
}

impl LinearOp for OperatorHandle<'_> {
    fn weights(&self) -> &[f64] {
        self.model.space().weights()
    }

    fn apply(&self, f: &Field) -> Result<Field> {
        OperatorHandle::apply(self, f)
    }

    fn apply_adjoint(&self, g: &Field) -> Result<Field> {
        self.adjoint().apply(g)
    }

    fn exact_2_2(&self) -> Option<f64> {
        Some(self.diag.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    fn column_norms_2(&self) -> Option<Vec<f64>> {
        let m = self.model;
        let d2: Vec<f64> = self.diag.iter().map(|z| z.norm_sqr()).collect();
        Some(
            (0..m.n_points())
                .into_par_iter()
                .map(|j| {
                    d2.iter()
                        .enumerate()
                        .fold(0.0, |acc, (k, w)| acc + w * m.eigenfunction(k, j).norm_sqr())
                        .sqrt()
                })
                .collect(),
        )
    }
}

impl LinearOp for KernelMatrix {
    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn apply(&self, f: &Field) -> Result<Field> {
        KernelMatrix::apply(self, f)
    }

    fn apply_adjoint(&self, g: &Field) -> Result<Field> {
        if g.len() != self.n {
            return Err(Error::arg("g", "field length does not match the kernel"));
        }
        let gw: Vec<Complex64> = g.values().iter().zip(&self.weights).map(|(z, &m)| z * m).collect();
        Ok(Field(
            (0..self.n)
                .into_par_iter()
                .map(|j| {
                    (0..self.n).fold(Complex64::new(0.0, 0.0), |acc, i| acc + self.at(i, j).conj() * gw[i])
                })
                .collect(),
        ))
    }

    fn column_norms_2(&self) -> Option<Vec<f64>> {
        Some(
            (0..self.n)
                .map(|j| (0..self.n).map(|i| self.at(i, j).norm_sqr() * self.weights[i]).sum::<f64>().sqrt())
                .collect(),
        )
    }
}

/// `f ↦ T(W f)` for a real multiplier `W`.
pub struct MultipliedOp<'a> {
    pub inner: &'a dyn LinearOp,
    pub multiplier: Vec<f64>,
}

impl LinearOp for MultipliedOp<'_> {
    fn weights(&self) -> &[f64] {
        self.inner.weights()
    }

    fn apply(&self, f: &Field) -> Result<Field> {
        self.inner.apply(&Field(
            f.values().iter().zip(&self.multiplier).map(|(z, w)| z * w).collect(),
        ))
    }

    fn apply_adjoint(&self, g: &Field) -> Result<Field> {
        let h = self.inner.apply_adjoint(g)?;
        Ok(Field(h.values().iter().zip(&self.multiplier).map(|(z, w)| z * w).collect()))
    }

    fn upper_2_2(&self) -> Option<f64> {
        let m = self.multiplier.iter().map(|w| w.abs()).fold(0.0, f64::max);
        self.inner.upper_2_2().map(|u| u * m)
    }

    fn column_norms_2(&self) -> Option<Vec<f64>> {
        self.inner
            .column_norms_2()
            .map(|c| c.iter().zip(&self.multiplier).map(|(a, w)| a * w.abs()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerMethod {
    RandomProbe,
    Ascent,
    ExactDiagonal,
    ExactRowCol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperMethod {
    Exact,
    Interpolation,
    Holder,
    None,
}

/// Two-sided estimate of `‖T‖_{p→q}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub p: f64,
    pub q: f64,
    pub lower: f64,
    /// `None` when no upper method applies.
    pub upper: Option<f64>,
    pub lower_method: LowerMethod,
    pub upper_method: UpperMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Field>,
}

impl NormBracket {
    pub fn exact(p: f64, q: f64, value: f64, method: LowerMethod, witness: Option<Field>) -> Self {
        NormBracket {
            p,
            q,
            lower: value,
            upper: Some(value),
            lower_method: method,
            upper_method: UpperMethod::Exact,
            witness,
        }
    }

    pub fn is_sound(&self) -> bool {
        self.upper.is_none_or(|u| self.lower <= u * (1.0 + 1e-10) + 1e-300)
    }

    /// `upper / lower`, infinite without an upper bound.
    pub fn gap(&self) -> f64 {
        match self.upper {
            Some(u) if self.lower > 0.0 => u / self.lower,
            Some(0.0) => 1.0,
            _ => f64::INFINITY,
        }
    }

    pub fn contains(&self, v: f64, rel: f64) -> bool {
        v >= self.lower * (1.0 - rel) && self.upper.is_none_or(|u| v <= u * (1.0 + rel))
    }

    pub fn overlaps(&self, other: &NormBracket, rel: f64) -> bool {
        let hi_a = self.upper.unwrap_or(f64::INFINITY);
        let hi_b = other.upper.unwrap_or(f64::INFINITY);
        self.lower <= hi_b * (1.0 + rel) && other.lower <= hi_a * (1.0 + rel)
    }

    /// Both ends raised to a power (e.g. `‖E‖_{p→p'} = ‖E‖_{p→2}²`).
    pub fn powi(&self, k: i32) -> NormBracket {
        NormBracket {
            lower: self.lower.powi(k),
            upper: self.upper.map(|u| u.powi(k)),
            witness: None,
            ..self.clone()
        }
    }

    pub fn without_witness(&self) -> NormBracket {
        NormBracket { witness: None, ..self.clone() }
    }
}

/// `‖Tf‖_q / ‖f‖_p`.
pub fn norm_ratio(op: &dyn LinearOp, f: &Field, p: f64, q: f64) -> Result<f64> {
    let w = op.weights();
    let den = lp_norm_weighted(f.values(), w, p)?;
    if den == 0.0 {
        return Err(Error::arg("f", "probe has zero norm"));
    }
    let g = op.apply(f)?;
    Ok(lp_norm_weighted(g.values(), w, q)? / den)
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z / r
    }
}

/// Norming functional of `v` in `L^r(μ)`: `u` with `‖u‖_{r'} = 1` and
/// `⟨v, u⟩ = ‖v‖_r`.
fn norming(v: &Field, w: &[f64], r: f64) -> Result<Field> {
    let nv = lp_norm_weighted(v.values(), w, r)?;
    if nv == 0.0 || !nv.is_finite() {
        return Err(Error::Numeric("norming functional of a zero or non-finite vector".into()));
    }
    if r == 1.0 {
        return Ok(Field(v.values().iter().map(|z| phase(*z)).collect()));
    }
    if r.is_infinite() {
        let (i, _) = v
            .values()
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, z)| if z.norm() > bv { (i, z.norm()) } else { (bi, bv) });
        let mut u = Field::zeros(v.len());
        u[i] = phase(v[i]) / w[i];
        return Ok(u);
    }
    Ok(Field(v.values().iter().map(|z| phase(*z) * (z.norm() / nv).powf(r - 1.0)).collect()))
}

/// Settings of the projected ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
    /// Dense column sets are formed only when `N²` stays within this.
    pub max_kernel_entries: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            restarts: 4,
            steps: 30,
            seed: 0,
            max_kernel_entries: 1 << 22,
        }
    }
}

/// Start fields for the ascent: point masses, coordinate bumps and random
/// complex fields.
fn structured_starts(n: usize, w: &[f64], restarts: usize, seed: u64) -> Vec<Field> {
    let mut starts = Vec::new();
    for &i in &[0, n / 3, n / 2, (2 * n) / 3, n - 1] {
        let mut f = Field::zeros(n);
        f[i] = Complex64::new(1.0 / w[i], 0.0);
        starts.push(f);
    }
    starts.push(Field(vec![Complex64::new(1.0, 0.0); n]));
    for width in [n as f64 / 64.0, n as f64 / 16.0, n as f64 / 4.0] {
        let c = n as f64 / 2.0;
        starts.push(Field::from_fn(n, |i| {
            Complex64::new((-((i as f64 - c) / width.max(1.0)).powi(2) / 2.0).exp(), 0.0)
        }));
        starts.push(Field::from_fn(n, |i| {
            let g = (-((i as f64 - c) / width.max(1.0)).powi(2) / 2.0).exp();
            Complex64::from_polar(g, 0.25 * std::f64::consts::PI * i as f64)
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        starts.push(Field::from_fn(n, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    }
    starts
}

/// Lower bound by alternating norming-functional ascent; the returned
/// witness reproduces the ratio.
pub fn ascent_lower(op: &dyn LinearOp, p: f64, q: f64, opts: &AscentOptions, extra: &[Field]) -> Result<(f64, Field)> {
    check_exponents(p, q)?;
    let n = op.dim();
    let w = op.weights();
    let pp = conjugate(p);
    let mut best = (0.0f64, Field::zeros(n));
    let mut starts = structured_starts(n, w, opts.restarts, opts.seed);
    starts.extend(extra.iter().cloned());
    for start in starts {
        if lp_norm_weighted(start.values(), w, p)? == 0.0 {
            continue;
        }
        let mut f = start;
        let mut last = 0.0;
        for _ in 0..=opts.steps {
            let r = norm_ratio(op, &f, p, q)?;
            if !r.is_finite() {
                return Err(Error::Numeric(format!("ascent produced a non-finite ratio for p={p}, q={q}")));
            }
            if r > best.0 {
                best = (r, f.clone());
            }
            if r == 0.0 || (r - last).abs() <= 1e-13 * r {
                break;
            }
            last = r;
            let g = op.apply(&f)?;
            let h = norming(&g, w, q)?;
            let v = op.apply_adjoint(&h)?;
            if v.max_abs() == 0.0 {
                break;
            }
            f = norming(&v, w, pp)?;
        }
    }
    let witness = best.1;
    let lower = if best.0 > 0.0 { norm_ratio(op, &witness, p, q)? } else { 0.0 };
    Ok((lower, witness))
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::arg("p", format!("exponent {p} is below 1")));
    }
    if !(q >= 1.0) {
        return Err(Error::arg("q", format!("exponent {q} is below 1")));
    }
    Ok(())
}

/// Images of the normalized point masses under `T` and `T*`.
struct Columns {
    cols: Vec<Field>,
    adj_cols: Vec<Field>,
}

impl Columns {
    fn build(op: &dyn LinearOp) -> Result<Columns> {
        let n = op.dim();
        let w = op.weights();
        let delta = |j: usize| {
            let mut f = Field::zeros(n);
            f[j] = Complex64::new(1.0 / w[j], 0.0);
            f
        };
        let cols = (0..n).map(|j| op.apply(&delta(j))).collect::<Result<Vec<_>>>()?;
        let adj_cols = (0..n).map(|i| op.apply_adjoint(&delta(i))).collect::<Result<Vec<_>>>()?;
        Ok(Columns { cols, adj_cols })
    }

    /// `‖T‖_{1→q} = max_j ‖T(δ_j/μ_j)‖_q`.
    fn one_to(&self, w: &[f64], q: f64) -> Result<(f64, usize)> {
        let mut best = (0.0, 0);
        for (j, c) in self.cols.iter().enumerate() {
            let v = lp_norm_weighted(c.values(), w, q)?;
            if v > best.0 {
                best = (v, j);
            }
        }
        Ok(best)
    }

    /// `‖T‖_{p→∞} = max_i ‖K(x_i, ·)‖_{p'}`.
    fn to_inf(&self, w: &[f64], p: f64) -> Result<(f64, usize)> {
        let pp = conjugate(p);
        let mut best = (0.0, 0);
        for (i, c) in self.adj_cols.iter().enumerate() {
            let v = lp_norm_weighted(c.values(), w, pp)?;
            if v > best.0 {
                best = (v, i);
            }
        }
        Ok(best)
    }
}

/// Exact endpoint norms `(1, q)` and `(p, ∞)` of a dense kernel.
pub fn opnorm_rowcol(k: &KernelMatrix, p: f64, q: f64) -> Result<NormBracket> {
    check_exponents(p, q)?;
    let w = &k.weights;
    let n = k.n;
    if p == 1.0 {
        let mut best = (0.0, 0);
        for j in 0..n {
            let col: Vec<Complex64> = (0..n).map(|i| k.at(i, j)).collect();
            let v = lp_norm_weighted(&col, w, q)?;
            if v > best.0 {
                best = (v, j);
            }
        }
        let mut f = Field::zeros(n);
        f[best.1] = Complex64::new(1.0 / w[best.1], 0.0);
        return Ok(NormBracket::exact(p, q, best.0, LowerMethod::ExactRowCol, Some(f)));
    }
    if q.is_infinite() {
        let pp = conjugate(p);
        let mut best = (0.0, 0);
        for i in 0..n {
            let v = lp_norm_weighted(k.row(i), w, pp)?;
            if v > best.0 {
                best = (v, i);
            }
        }
        let row = Field(k.row(best.1).iter().map(|z| z.conj()).collect());
        let f = if best.0 > 0.0 { norming(&row, w, pp)? } else { Field(vec![Complex64::new(1.0, 0.0); n]) };
        return Ok(NormBracket::exact(p, q, best.0, LowerMethod::ExactRowCol, Some(f)));
    }
    Err(Error::arg("p", format!("({p}, {q}) is not an exact row/column endpoint")))
}

/// `‖T‖_{2→2} = sup_k |F_k|` for a diagonal operator.
pub fn opnorm_2_2(handle: &OperatorHandle) -> NormBracket {
    let (k, v) = handle
        .diag
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bk, bv), (k, z)| if z.norm() > bv { (k, z.norm()) } else { (bk, bv) });
    NormBracket::exact(2.0, 2.0, v, LowerMethod::ExactDiagonal, Some(handle.model.mode_field(k)))
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn from_inv(x: f64) -> f64 {
    if x <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

/// Upper bound for `‖T‖_{p→q}` from Riesz-Thorin on exact endpoints and
/// Hölder on the total mass.
fn upper_bound(op: &dyn LinearOp, cols: Option<&Columns>, p: f64, q: f64) -> Result<Option<(f64, UpperMethod)>> {
    let w = op.weights();
    let (x, y) = (inv(p), inv(q));
    let mut best: Option<(f64, UpperMethod)> = None;
    let mut offer = |v: f64, m: UpperMethod| {
        if v.is_finite() && best.is_none_or(|(b, _)| v < b) {
            best = Some((v, m));
        }
    };
    let u22 = op.upper_2_2();
    let c12 = op.column_norms_2().map(|c| c.into_iter().fold(0.0, f64::max));
    // isolated points (1/p, 1/q, bound)
    let mut points: Vec<(f64, f64, f64)> = Vec::new();
    if let Some(u) = u22 {
        points.push((0.5, 0.5, u));
    }
    if let Some(c) = c12 {
        points.push((1.0, 0.5, c));
    }
    for &(px, py, v) in &points {
        if (px - x).abs() < 1e-15 && (py - y).abs() < 1e-15 {
            offer(v, UpperMethod::Interpolation);
        }
    }
    for a in 0..points.len() {
        for b in 0..points.len() {
            if a == b {
                continue;
            }
            let (pa, pb) = (points[a], points[b]);
            // T = (1-θ) A + θ B
            let (dx, dy) = (pb.0 - pa.0, pb.1 - pa.1);
            let theta = if dx.abs() > dy.abs() { (x - pa.0) / dx } else { (y - pa.1) / dy };
            let on = ((pa.0 + theta * dx) - x).abs() < 1e-12 && ((pa.1 + theta * dy) - y).abs() < 1e-12;
            if on && (0.0..=1.0).contains(&theta) {
                offer(pa.2.powf(1.0 - theta) * pb.2.powf(theta), UpperMethod::Interpolation);
            }
        }
    }
    if let Some(cols) = cols {
        let one = |yy: f64| cols.one_to(w, from_inv(yy)).map(|r| r.0);
        let inf = |xx: f64| cols.to_inf(w, from_inv(xx)).map(|r| r.0);
        if x == 1.0 {
            offer(one(y)?, UpperMethod::Exact);
        }
        if y == 0.0 {
            offer(inf(x)?, UpperMethod::Exact);
        }
        // segments from an isolated point through T to a family line
        for &(px, py, v) in &points {
            if x > px && x < 1.0 {
                let s = (1.0 - px) / (x - px);
                let qy = py + s * (y - py);
                if (0.0..=1.0).contains(&qy) {
                    let theta = 1.0 / s;
                    offer(v.powf(1.0 - theta) * one(qy)?.powf(theta), UpperMethod::Interpolation);
                }
            }
            if y < py && y > 0.0 {
                let s = py / (py - y);
                let qx = px + s * (x - px);
                if (0.0..=1.0).contains(&qx) {
                    let theta = 1.0 / s;
                    offer(v.powf(1.0 - theta) * inf(qx)?.powf(theta), UpperMethod::Interpolation);
                }
            }
        }
        // segments between the two family lines
        if x < 1.0 && y > 0.0 {
            for m in 1..=32 {
                let yp = y + (1.0 - y) * m as f64 / 32.0;
                let theta = 1.0 - y / yp;
                if theta <= 0.0 {
                    continue;
                }
                let xq = (x - (1.0 - theta)) / theta;
                if (0.0..=1.0).contains(&xq) {
                    offer(one(yp)?.powf(1.0 - theta) * inf(xq)?.powf(theta), UpperMethod::Interpolation);
                }
            }
        }
    }
    // Hölder on a finite measure: ‖T‖_{p→q} <= ‖T‖_{2→2} μ(X)^{(1/2-1/p) + (1/q-1/2)}
    if let Some(u) = u22 {
        if x <= 0.5 && y >= 0.5 {
            let mass: f64 = w.iter().sum();
            offer(u * mass.powf((0.5 - x) + (y - 0.5)), UpperMethod::Holder);
        }
    }
    Ok(best)
}

/// Bracket for `‖T‖_{p→q}`: ascent from structured and random starts below,
/// exact endpoints / interpolation / Hölder above.
pub fn opnorm_bracket(op: &dyn LinearOp, p: f64, q: f64, opts: &AscentOptions) -> Result<NormBracket> {
    check_exponents(p, q)?;
    let n = op.dim();
    let cols = if n.saturating_mul(n) <= opts.max_kernel_entries {
        Some(Columns::build(op)?)
    } else {
        None
    };
    let w = op.weights();
    // exact endpoint pairs: witness is the maximizing point mass / norming row
    if let Some(c) = &cols {
        if p == 1.0 {
            let (v, j) = c.one_to(w, q)?;
            let mut f = Field::zeros(n);
            f[j] = Complex64::new(1.0 / w[j], 0.0);
            let lower = norm_ratio(op, &f, p, q)?;
            return Ok(NormBracket {
                lower,
                ..NormBracket::exact(p, q, v, LowerMethod::ExactRowCol, Some(f))
            });
        }
        if q.is_infinite() {
            let (v, i) = c.to_inf(w, p)?;
            let row = c.adj_cols[i].clone();
            let f = if v > 0.0 { norming(&row, w, conjugate(p))? } else { Field(vec![Complex64::new(1.0, 0.0); n]) };
            let lower = norm_ratio(op, &f, p, q)?;
            return Ok(NormBracket {
                lower,
                ..NormBracket::exact(p, q, v, LowerMethod::ExactRowCol, Some(f))
            });
        }
    }
    let (lower, witness) = ascent_lower(op, p, q, opts, &[])?;
    let (upper, upper_method) = match upper_bound(op, cols.as_ref(), p, q)? {
        Some((u, m)) => (Some(u.max(lower)), m),
        None => (None, UpperMethod::None),
    };
    Ok(NormBracket {
        p,
        q,
        lower,
        upper,
        lower_method: LowerMethod::Ascent,
        upper_method,
        witness: Some(witness),
    })
}

/// `‖T‖_{1→2}` for an operator with cheap column norms, with its witness.
pub fn opnorm_1_2_columns(op: &dyn LinearOp) -> Result<NormBracket> {
    let cn = op
        .column_norms_2()
        .ok_or_else(|| Error::arg("op", "operator has no cheap column norms"))?;
    let (j, v) = cn
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bj, bv), (j, &c)| if c > bv { (j, c) } else { (bj, bv) });
    let w = op.weights();
    let mut f = Field::zeros(op.dim());
    f[j] = Complex64::new(1.0 / w[j], 0.0);
    Ok(NormBracket::exact(1.0, 2.0, v, LowerMethod::ExactRowCol, Some(f)))
}

/// Bracket for `‖T‖_{p→2}`, `1 <= p <= 2`: exact at `p = 1` from column
/// norms, otherwise ascent below and interpolation between `(1→2)` and
/// `(2→2)` above. No dense column set is formed.
pub fn opnorm_p_2(op: &dyn LinearOp, p: f64, opts: &AscentOptions) -> Result<NormBracket> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::arg("p", format!("{p} must lie in [1, 2]")));
    }
    if p == 1.0 {
        return opnorm_1_2_columns(op);
    }
    let (lower, witness) = ascent_lower(op, p, 2.0, opts, &[])?;
    let (upper, upper_method) = match upper_bound(op, None, p, 2.0)? {
        Some((u, m)) => (Some(u.max(lower)), m),
        None => (None, UpperMethod::None),
    };
    Ok(NormBracket {
        p,
        q: 2.0,
        lower,
        upper,
        lower_method: LowerMethod::Ascent,
        upper_method,
        witness: Some(witness),
    })
}
