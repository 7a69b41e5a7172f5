//! Orthonormal probabilists' Hermite basis `h_n = He_n / √(n!)` and sparse
//! multivariate expansions in the tensorized basis `h_α(x) = ∏ h_{α_i}(x_i)`.
//!
//! Under the standard Gaussian measure the basis is orthonormal, so the L2 norm
//! is the Euclidean norm of the coefficients and the Ornstein–Uhlenbeck
//! operator acts diagonally with eigenvalue `ρ^{|α|}`.

mod expansion;
mod multi_index;
mod product;
pub mod quadrature;

pub use expansion::{CompiledExpansion, CompiledForm, EvalForm, HermiteExpansion};
pub use multi_index::{count_up_to, indices_up_to, MultiIndex};
pub use product::{linearization_coeffs, linearize_pair};

/// Evaluates `h_n(x)` by the normalized three-term recurrence
/// `h_{k+1} = (x·h_k − √k·h_{k−1}) / √(k+1)`.
pub fn hermite_eval(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..n {
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// Precomputed recurrence constants for evaluating `h_0..=h_max` repeatedly.
#[derive(Debug, Clone)]
pub struct RecurrenceTable {
    // a_k = 1/√(k+1), b_k = √(k/(k+1))
    a: Vec<f64>,
    b: Vec<f64>,
}

impl RecurrenceTable {
    pub fn new(max_degree: usize) -> Self {
        let a = (0..max_degree.max(1))
            .map(|k| 1.0 / ((k + 1) as f64).sqrt())
            .collect();
        let b = (0..max_degree.max(1))
            .map(|k| (k as f64 / (k + 1) as f64).sqrt())
            .collect();
        Self { a, b }
    }

    pub fn max_degree(&self) -> usize {
        self.a.len()
    }

    /// Writes `h_0(x), …, h_{out.len()−1}(x)` into `out`.
    pub fn fill(&self, x: f64, out: &mut [f64]) {
        let n = out.len();
        if n == 0 {
            return;
        }
        debug_assert!(n <= self.a.len() + 1);
        out[0] = 1.0;
        if n > 1 {
            out[1] = x;
        }
        for k in 1..n.saturating_sub(1) {
            out[k + 1] = x * out[k] * self.a[k] - out[k - 1] * self.b[k];
        }
    }

    /// `Σ_n coeffs[n]·h_n(x)` without storing the basis values.
    pub fn sum_series(&self, coeffs: &[f64], x: f64) -> f64 {
        let Some((&c0, rest)) = coeffs.split_first() else {
            return 0.0;
        };
        let mut acc = c0;
        if rest.is_empty() {
            return acc;
        }
        let (mut prev, mut cur) = (1.0, x);
        acc += rest[0] * cur;
        for (k, &c) in rest.iter().enumerate().skip(1) {
            let next = x * cur * self.a[k] - prev * self.b[k];
            prev = cur;
            cur = next;
            acc += c * cur;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_order_values() {
        assert_eq!(hermite_eval(0, 3.7), 1.0);
        assert_eq!(hermite_eval(1, 2.0), 2.0);
        assert_relative_eq!(hermite_eval(2, 1.0), 0.0, epsilon = 1e-15);
        // h_3 = (x³ − 3x)/√6
        let x: f64 = 0.7;
        assert_relative_eq!(
            hermite_eval(3, x),
            (x.powi(3) - 3.0 * x) / 6f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn table_matches_scalar_recurrence() {
        let table = RecurrenceTable::new(60);
        let mut out = vec![0.0; 61];
        for &x in &[-4.0, -0.3, 0.0, 1.1, 5.5] {
            table.fill(x, &mut out);
            for (n, v) in out.iter().enumerate() {
                assert_relative_eq!(*v, hermite_eval(n, x), max_relative = 1e-12, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn series_sum_matches_explicit_sum() {
        let table = RecurrenceTable::new(40);
        let coeffs: Vec<f64> = (0..=40).map(|n| 1.0 / (1.0 + n as f64)).collect();
        let x = 1.3;
        let direct: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * hermite_eval(n, x))
            .sum();
        assert_relative_eq!(table.sum_series(&coeffs, x), direct, max_relative = 1e-12);
        assert_eq!(table.sum_series(&[], x), 0.0);
        assert_eq!(table.sum_series(&[2.5], x), 2.5);
    }

    #[test]
    fn high_degree_stays_finite() {
        for &x in &[-8.0, 0.5, 8.0] {
            assert!(hermite_eval(2000, x).is_finite());
        }
    }
}
