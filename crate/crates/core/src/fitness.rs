//! Edge-cost instances for TSP-style fitness.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Cost matrix over `n` cities, optionally with the coordinates it was
/// derived from. Costs need not be symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    n: usize,
    coords: Option<Vec<(f64, f64)>>,
    matrix: Vec<f64>,
}

impl TspInstance {
    /// Row-major `n x n` matrix. The diagonal must be zero and every entry
    /// finite and non-negative.
    pub fn from_matrix(n: usize, matrix: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall { n, min: 2 });
        }
        if matrix.len() != n * n {
            return Err(Error::SizeMismatch {
                left: matrix.len(),
                right: n * n,
            });
        }
        if matrix.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidInstance("costs must be finite and non-negative"));
        }
        if (0..n).any(|i| matrix[i * n + i] != 0.0) {
            return Err(Error::InvalidInstance("diagonal must be zero"));
        }
        Ok(Self {
            n,
            coords: None,
            matrix,
        })
    }

    /// Euclidean distances between the given points.
    pub fn from_coords(coords: Vec<(f64, f64)>) -> Result<Self> {
        let n = coords.len();
        if n < 2 {
            return Err(Error::TooSmall { n, min: 2 });
        }
        if coords.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidInstance("coordinates must be finite"));
        }
        let mut matrix = Vec::with_capacity(n * n);
        for &(xi, yi) in &coords {
            for &(xj, yj) in &coords {
                matrix.push(libm::hypot(xi - xj, yi - yj));
            }
        }
        Ok(Self {
            n,
            coords: Some(coords),
            matrix,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    /// Cost of travelling from city `i` to city `j` (0-based).
    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.n + j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.cost(i, j) == self.cost(j, i)))
    }

    /// Rounds every cost to the nearest integer, keeping coordinates.
    pub fn rounded(mut self) -> Self {
        for c in &mut self.matrix {
            *c = libm::round(*c);
        }
        self
    }
}

/// `n` cities drawn uniformly in `[0, width) x [0, height)`.
pub fn random_euclidean_instance<R: Rng + ?Sized>(
    n: usize,
    width: f64,
    height: f64,
    rng: &mut R,
) -> Result<TspInstance> {
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::InvalidInstance("dimensions must be positive"));
    }
    let coords = (0..n)
        .map(|_| (rng.gen::<f64>() * width, rng.gen::<f64>() * height))
        .collect();
    TspInstance::from_coords(coords)
}

/// `n` cities on integer grid points of a `width x height` grid, with costs
/// rounded to integers so that tour costs add up exactly.
pub fn random_grid_instance<R: Rng + ?Sized>(
    n: usize,
    width: u32,
    height: u32,
    rng: &mut R,
) -> Result<TspInstance> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInstance("dimensions must be positive"));
    }
    let coords = (0..n)
        .map(|_| {
            (
                rng.gen_range(0..width) as f64,
                rng.gen_range(0..height) as f64,
            )
        })
        .collect();
    Ok(TspInstance::from_coords(coords)?.rounded())
}

/// Sum of edge costs along the closed tour.
pub fn tour_cost(p: &Permutation, inst: &TspInstance) -> Result<f64> {
    let n = p.len();
    if n != inst.n {
        return Err(Error::SizeMismatch {
            left: n,
            right: inst.n,
        });
    }
    Ok((0..n)
        .map(|i| inst.cost(p.apply(i), p.apply((i + 1) % n)))
        .sum())
}
