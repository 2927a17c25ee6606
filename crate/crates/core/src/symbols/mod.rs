//! Spectral symbols, their partitions of unity and decompositions, the
//! Mellin transform and symbol norms.

pub mod bumps;
mod families;
mod mellin;
mod norms;
mod phi_delta;
mod subordination;

pub use families::{
    br_symbol, dyadic_decompose, eta_lambda_family, partition_defect, psi_family, zeta_family,
    DyadicDecomposition,
};
pub use mellin::{mellin, mellin_weight, MellinConvergence, MellinData};
pub use norms::{cluster_seminorm, sobolev_norm};
pub use phi_delta::{phi_delta_family, PhiDeltaFamily, PhiDeltaSpec};
pub use subordination::{
    subordination_check, subordination_constant, subordination_cprime, subordination_rhs,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

/// Whether a symbol is applied as `F(√L)` or `F(L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArgumentKind {
    OfSqrtL,
    OfL,
}

type Eval = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A scalar function of the spectral parameter with an optional declared
/// support interval.
#[derive(Clone)]
pub struct Symbol {
    name: String,
    kind: ArgumentKind,
    support: Option<(f64, f64)>,
    f: Eval,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("support", &self.support)
            .finish()
    }
}

/// Outside-support values up to this size count as zero.
pub const SUPPORT_TOL: f64 = 1e-12;

impl Symbol {
    pub fn new(
        name: impl Into<String>,
        kind: ArgumentKind,
        support: Option<(f64, f64)>,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Symbol {
            name: name.into(),
            kind,
            support,
            f: Arc::new(f),
        }
    }

    pub fn real(
        name: impl Into<String>,
        kind: ArgumentKind,
        support: Option<(f64, f64)>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, kind, support, move |x| Complex64::new(f(x), 0.0))
    }

    pub fn constant(c: f64, kind: ArgumentKind) -> Self {
        Self::real(format!("const({c})"), kind, None, move |_| c)
    }

    /// Indicator of `[a, b)`.
    pub fn indicator(a: f64, b: f64, kind: ArgumentKind) -> Self {
        Self::real(format!("1[{a},{b})"), kind, Some((a, b)), move |x| {
            if x >= a && x < b {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ArgumentKind {
        self.kind
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.f)(x)
    }

    pub fn eval_re(&self, x: f64) -> f64 {
        (self.f)(x).re
    }

    /// Value on the eigenvalue `λ`: `F(√λ)` or `F(λ)` according to the kind.
    pub fn on_eigenvalue(&self, lambda: f64) -> Complex64 {
        match self.kind {
            ArgumentKind::OfSqrtL => self.eval(lambda.max(0.0).sqrt()),
            ArgumentKind::OfL => self.eval(lambda),
        }
    }

    /// The dilate `x ↦ F(r x)`.
    pub fn dilate(&self, r: f64) -> Symbol {
        let f = self.f.clone();
        let support = self.support.map(|(a, b)| {
            let (u, v) = (a / r, b / r);
            (u.min(v), u.max(v))
        });
        Symbol {
            name: format!("{}(·*{r})", self.name),
            kind: self.kind,
            support,
            f: Arc::new(move |x| f(r * x)),
        }
    }

    pub fn product(&self, other: &Symbol) -> Symbol {
        let (f, g) = (self.f.clone(), other.f.clone());
        let support = match (self.support, other.support) {
            (Some((a, b)), Some((c, d))) => Some((a.max(c), b.min(d))),
            (s, None) | (None, s) => s,
        };
        Symbol {
            name: format!("{}*{}", self.name, other.name),
            kind: self.kind,
            support,
            f: Arc::new(move |x| f(x) * g(x)),
        }
    }

    pub fn conj(&self) -> Symbol {
        let f = self.f.clone();
        Symbol {
            name: format!("conj({})", self.name),
            kind: self.kind,
            support: self.support,
            f: Arc::new(move |x| f(x).conj()),
        }
    }

    pub fn map(&self, name: impl Into<String>, g: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Symbol {
        let f = self.f.clone();
        Symbol {
            name: name.into(),
            kind: self.kind,
            support: self.support,
            f: Arc::new(move |x| g(f(x))),
        }
    }

    pub fn with_kind(mut self, kind: ArgumentKind) -> Symbol {
        self.kind = kind;
        self
    }

    /// Checks `|F| <= 1e-12` on `probes` points on each side outside the
    /// declared support, out to one support length beyond it.
    pub fn verify_support(&self, probes: usize) -> Result<()> {
        let Some((a, b)) = self.support else {
            return Ok(());
        };
        let width = (b - a).abs().max(1.0);
        for i in 0..probes {
            let t = (i as f64 + 0.5) / probes as f64;
            for x in [a - t * width, b + t * width] {
                let v = self.eval(x).norm();
                if v > SUPPORT_TOL {
                    return Err(Error::arg(
                        "support",
                        format!("{} = {v:e} at {x} outside declared support [{a}, {b}]", self.name),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `(grid, re, im)` samples as CSV.
    pub fn to_csv(&self, grid: &[f64]) -> String {
        let mut s = String::from("x,re,im\n");
        for &x in grid {
            let v = self.eval(x);
            let _ = writeln!(s, "{x},{},{}", v.re, v.im);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn indicator_and_support() {
        let s = Symbol::indicator(0.0, 1.0, ArgumentKind::OfSqrtL);
        assert_eq!(s.eval_re(0.0), 1.0);
        assert_eq!(s.eval_re(1.0), 0.0);
        assert!(s.verify_support(100).is_ok());
        let liar = Symbol::real("liar", ArgumentKind::OfL, Some((0.0, 1.0)), |x| (-x * x).exp());
        assert!(liar.verify_support(100).is_err());
    }

    #[test]
    fn eigenvalue_argument() {
        let s = Symbol::real("id", ArgumentKind::OfSqrtL, None, |x| x);
        assert_eq!(s.on_eigenvalue(9.0).re, 3.0);
        assert_eq!(s.clone().with_kind(ArgumentKind::OfL).on_eigenvalue(9.0).re, 9.0);
    }

    #[test]
    fn csv_export() {
        let s = Symbol::constant(2.0, ArgumentKind::OfL);
        assert_eq!(s.to_csv(&[0.0, 1.5]), "x,re,im\n0,2,0\n1.5,2,0\n");
    }

    proptest! {
        #[test]
        fn dilation_coherence(r in 0.1f64..10.0, q in 0.1f64..10.0, x in -5.0f64..5.0) {
            let f = Symbol::real("g", ArgumentKind::OfSqrtL, None, |x| (x * 1.3).sin() * (-x * x).exp());
            let a = f.dilate(q).dilate(r).eval_re(x);
            let b = f.dilate(r * q).eval_re(x);
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
