//! State-space vectors.

use std::fmt;

use crate::error::ModelError;

/// A point in `R^d`. Every constructor enforces `d >= 1` and finite entries;
/// sampler steps re-validate finiteness so a diverging chain is caught at the
/// step where it blows up rather than downstream.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting empty or non-finite input.
    pub fn new(coords: Vec<f64>) -> Result<Self, ModelError> {
        if coords.is_empty() {
            return Err(ModelError::EmptyPoint);
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(ModelError::NonFiniteCoord {
                index: i,
                value: coords[i],
            });
        }
        Ok(Self { coords })
    }

    /// Origin of `R^d`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            coords: vec![0.0; dim],
        }
    }

    /// Unchecked constructor for internal arithmetic whose inputs are already
    /// validated. Finiteness is re-checked by the sampler loop.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.coords.iter().map(|c| c.abs()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_vec_unchecked(self.coords.iter().map(|c| s * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::from_vec_unchecked(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::from_vec_unchecked(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `self + s * other`, the workhorse of every sampler update.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::from_vec_unchecked(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}
