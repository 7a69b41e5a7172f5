//! Gauss–Hermite quadrature for the standard Gaussian probability measure.
//!
//! Nodes come from the eigenvalues of the Jacobi matrix of the orthonormal
//! recurrence (Golub–Welsch) and are polished by Newton steps on `h_n`.
//! Weights use `w_i = 1 / (n·h_{n−1}(x_i)²)`, which keeps relative accuracy
//! for the tiny tail weights.

use nalgebra::DMatrix;

use super::RecurrenceTable;

#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// `n`-point rule, exact for polynomials of degree `≤ 2n − 1` against `γ_1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        if n == 1 {
            return Self {
                nodes: vec![0.0],
                weights: vec![1.0],
            };
        }
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let off = (k as f64).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(f64::total_cmp);

        let table = RecurrenceTable::new(n + 1);
        let mut vals = vec![0.0; n + 1];
        let nf = n as f64;
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                table.fill(*x, &mut vals);
                let deriv = nf.sqrt() * vals[n - 1];
                if deriv == 0.0 {
                    break;
                }
                *x -= vals[n] / deriv;
            }
        }
        // enforce exact symmetry about the origin
        for i in 0..n / 2 {
            let m = 0.5 * (nodes[n - 1 - i] - nodes[i]);
            nodes[i] = -m;
            nodes[n - 1 - i] = m;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let mut weights: Vec<f64> = nodes
            .iter()
            .map(|&x| {
                table.fill(x, &mut vals);
                1.0 / (nf * vals[n - 1] * vals[n - 1])
            })
            .collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f dγ_1`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `∫ f dγ_d` on the tensor grid; cost `len()^d` evaluations.
    pub fn integrate_nd<F: FnMut(&[f64]) -> f64>(&self, dim: usize, mut f: F) -> f64 {
        let n = self.len();
        let mut idx = vec![0usize; dim];
        let mut x = vec![0.0; dim];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for (i, &k) in idx.iter().enumerate() {
                x[i] = self.nodes[k];
                w *= self.weights[k];
            }
            total += w * f(&x);
            let mut pos = 0;
            loop {
                if pos == dim {
                    return total;
                }
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}
