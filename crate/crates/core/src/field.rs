use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Index, IndexMut};

/// Complex values sampled at the points of a space, in point-index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field(pub Vec<Complex64>);

impl Field {
    pub fn zeros(len: usize) -> Self {
        Field(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn from_real(values: &[f64]) -> Self {
        Field(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Field((0..len).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn abs(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm()).collect()
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field(self.0.iter().map(|&z| z * c).collect())
    }

    pub fn add(&self, other: &Field) -> Field {
        assert_eq!(self.len(), other.len(), "field length mismatch");
        Field(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Field) -> Field {
        assert_eq!(self.len(), other.len(), "field length mismatch");
        Field(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Pointwise product with a real weight.
    pub fn weighted(&self, w: &[f64]) -> Field {
        assert_eq!(self.len(), w.len(), "weight length mismatch");
        Field(self.0.iter().zip(w).map(|(z, &c)| z * c).collect())
    }

    pub fn conj(&self) -> Field {
        Field(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for Field {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Field {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

/// Expansion coefficients against the retained modes of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector(pub Vec<Complex64>);

impl CoefficientVector {
    pub fn zeros(len: usize) -> Self {
        CoefficientVector(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l2(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}
