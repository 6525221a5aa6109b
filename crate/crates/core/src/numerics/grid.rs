use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_legendre, reference_rule};
use crate::error::{invalid, Result};

/// How cell edges are distributed on `[0, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grading {
    Uniform,
    /// Edges `r_max (j/n)^gamma`, clustering cells at the origin.
    GradedToOrigin {
        gamma: f64,
    },
}

/// Radial mesh on `(0, r_max]` made of `n` cells.
///
/// `nodes` are cell midpoints and `weights` are cell widths, so
/// `Σ weights = r_max` exactly. The cell edges are kept because the
/// cell-averaged discretizations need them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub edges: Vec<f64>,
    pub r_max: f64,
    pub grading: Grading,
}

impl RadialGrid {
    pub fn uniform(n: usize, r_max: f64) -> Result<Self> {
        Self::new(n, r_max, Grading::Uniform)
    }

    pub fn graded(n: usize, r_max: f64, gamma: f64) -> Result<Self> {
        Self::new(n, r_max, Grading::GradedToOrigin { gamma })
    }

    pub fn new(n: usize, r_max: f64, grading: Grading) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "radial grid needs at least one cell"));
        }
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(invalid("r_max", "must be positive and finite"));
        }
        let gamma = match grading {
            Grading::Uniform => 1.0,
            Grading::GradedToOrigin { gamma } => {
                if !(gamma >= 1.0) || !gamma.is_finite() {
                    return Err(invalid("gamma", "grading exponent must be >= 1"));
                }
                gamma
            }
        };
        let edges: Vec<f64> = (0..=n)
            .map(|j| {
                if j == n {
                    r_max
                } else {
                    r_max * (j as f64 / n as f64).powf(gamma)
                }
            })
            .collect();
        Ok(Self::from_edges_unchecked(edges, grading))
    }

    fn from_edges_unchecked(edges: Vec<f64>, grading: Grading) -> Self {
        let nodes = edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect();
        let weights = edges.windows(2).map(|e| e[1] - e[0]).collect();
        let r_max = *edges.last().unwrap();
        Self {
            nodes,
            weights,
            edges,
            r_max,
            grading,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same grading with every cell split in two; the new edge set
    /// contains the old one.
    pub fn refined(&self) -> Self {
        let n = self.len();
        match self.grading {
            Grading::Uniform | Grading::GradedToOrigin { .. } => {
                Self::new(2 * n, self.r_max, self.grading).expect("refining a valid grid")
            }
        }
    }

    /// Gauss points inside every cell: `q` per cell, returned per cell.
    pub fn cell_gauss(&self, q: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
        let (x, w) = reference_rule(q);
        self.edges
            .windows(2)
            .map(|e| {
                let half = 0.5 * (e[1] - e[0]);
                let mid = 0.5 * (e[1] + e[0]);
                (
                    x.iter().map(|t| mid + half * t).collect(),
                    w.iter().map(|v| half * v).collect(),
                )
            })
            .collect()
    }
}

/// Tensor-product Gauss–Legendre mesh on `[-L, L]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxGrid {
    pub dimension: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub half_width: f64,
}

impl BoxGrid {
    /// `n` must be even so no node sits at a coordinate zero.
    pub fn new(dimension: usize, n: usize, half_width: f64) -> Result<Self> {
        if dimension < 3 {
            return Err(invalid("dimension", "box grids need d >= 3"));
        }
        if n == 0 || n % 2 != 0 {
            return Err(invalid("n", "points per axis must be even and positive"));
        }
        if !(half_width > 0.0) {
            return Err(invalid("half_width", "must be positive"));
        }
        let (nodes, weights) = gauss_legendre(n, -half_width, half_width)?;
        Ok(Self {
            dimension,
            nodes,
            weights,
            half_width,
        })
    }

    pub fn per_axis(&self) -> usize {
        self.nodes.len()
    }

    pub fn cardinality(&self) -> usize {
        self.per_axis().pow(self.dimension as u32)
    }

    /// Point and weight of flat index `idx` (last axis fastest).
    pub fn point(&self, mut idx: usize, out: &mut [f64]) -> f64 {
        let n = self.per_axis();
        let mut w = 1.0;
        for k in (0..self.dimension).rev() {
            let i = idx % n;
            idx /= n;
            out[k] = self.nodes[i];
            w *= self.weights[i];
        }
        w
    }

    /// Sum `f(x) w(x)` over the mesh.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T> + Default,
        F: Fn(&[f64]) -> T,
    {
        let mut x = alloc::vec![0.0; self.dimension];
        let mut acc = T::default();
        for idx in 0..self.cardinality() {
            let w = self.point(idx, &mut x);
            acc = acc + f(&x) * w;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_weights_sum_to_r_max() {
        let g = RadialGrid::uniform(37, 5.0).unwrap();
        let s: f64 = g.weights.iter().sum();
        assert!((s - 5.0).abs() < 1e-13);
        assert!(g.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(g.nodes[0] > 0.0 && *g.nodes.last().unwrap() <= 5.0);
    }

    #[test]
    fn graded_edges_follow_power_law() {
        let g = RadialGrid::graded(10, 40.0, 2.0).unwrap();
        assert!((g.edges[5] - 10.0).abs() < 1e-12);
        assert!(g.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn refinement_is_nested() {
        let g = RadialGrid::graded(12, 3.0, 2.0).unwrap();
        let f = g.refined();
        for (j, e) in g.edges.iter().enumerate() {
            assert!((f.edges[2 * j] - e).abs() < 1e-13 * (1.0 + e));
        }
    }

    #[test]
    fn box_grid_avoids_origin() {
        let b = BoxGrid::new(3, 6, 2.0).unwrap();
        assert!(b.nodes.iter().all(|x| x.abs() > 1e-3));
        assert!(BoxGrid::new(3, 5, 2.0).is_err());
        let vol: f64 = b.integrate(|_| 1.0);
        assert!((vol - 64.0).abs() < 1e-11);
    }
}
