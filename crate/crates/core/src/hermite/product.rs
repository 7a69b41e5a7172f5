use std::collections::{BTreeMap, HashMap};

use super::{HermiteExpansion, MultiIndex};

/// `λ_k` for `k = 0..=min(a, b)` in `h_a·h_b = Σ_k λ_k h_{a+b−2k}`, where
/// `λ_k = C(a,k)·C(b,k)·k!·√((a+b−2k)!) / √(a!·b!)`.
///
/// Computed from `λ_0 = √C(a+b, a)` by the ratio
/// `λ_{k+1}/λ_k = (a−k)(b−k) / ((k+1)·√(m(m−1)))` with `m = a+b−2k`.
pub fn linearization_coeffs(a: u32, b: u32) -> Vec<f64> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut out = Vec::with_capacity(lo as usize + 1);
    let mut lambda = sqrt_binomial(hi + lo, lo);
    out.push(lambda);
    for k in 0..lo {
        let m = (a + b - 2 * k) as f64;
        lambda *= ((a - k) as f64 * (b - k) as f64) / ((k + 1) as f64 * (m * (m - 1.0)).sqrt());
        out.push(lambda);
    }
    out
}

fn sqrt_binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    if n <= 120 {
        // exact while the running product fits in u128
        let mut c: u128 = 1;
        for i in 1..=k as u128 {
            c = c * (n as u128 - k as u128 + i) / i;
        }
        (c as f64).sqrt()
    } else {
        let ln: f64 = (1..=k)
            .map(|i| ((n - k + i) as f64 / i as f64).ln())
            .sum();
        (0.5 * ln).exp()
    }
}

/// Product linearization as a map from degree `a+b−2k` to `λ_k`.
pub fn linearize_pair(a: u32, b: u32) -> BTreeMap<u32, f64> {
    linearization_coeffs(a, b)
        .into_iter()
        .enumerate()
        .map(|(k, l)| (a + b - 2 * k as u32, l))
        .collect()
}

impl HermiteExpansion {
    /// Expansion of `x ↦ ¼(1 + P(x))²`, formed by tensorized pair linearization.
    ///
    /// The result is exact up to rounding relative to its own coefficient
    /// scale, but that scale grows roughly like `3^{deg P}` (fourth moments of
    /// high-degree polynomials), so evaluating the expanded form loses all
    /// accuracy long before `¼(1 + P(x))²` does. Evaluate `EvalForm::SquaredAffine`
    /// for anything but moderate degrees.
    pub fn affine_square(&self) -> HermiteExpansion {
        let dim = self.dim();
        let square = if dim == 1 {
            square_1d(self)
        } else {
            square_nd(self)
        };
        let base = HermiteExpansion::constant(dim, 1.0)
            .add(&self.scale(2.0))
            .and_then(|s| s.add(&square))
            .expect("same dimension");
        base.scale(0.25)
    }
}

fn square_1d(p: &HermiteExpansion) -> HermiteExpansion {
    let c = p.dense_1d().unwrap_or_default();
    if c.is_empty() {
        return HermiteExpansion::new(1);
    }
    let top = c.len() - 1;
    let mut acc = vec![0.0; 2 * top + 1];
    for a in 0..=top {
        if c[a] == 0.0 {
            continue;
        }
        for b in a..=top {
            if c[b] == 0.0 {
                continue;
            }
            let w = if a == b { c[a] * c[a] } else { 2.0 * c[a] * c[b] };
            for (k, l) in linearization_coeffs(a as u32, b as u32).into_iter().enumerate() {
                acc[a + b - 2 * k] += w * l;
            }
        }
    }
    HermiteExpansion::from_dense_1d(&acc)
}

fn square_nd(p: &HermiteExpansion) -> HermiteExpansion {
    let dim = p.dim();
    let terms: Vec<(&MultiIndex, f64)> = p.terms().collect();
    let mut cache: HashMap<(u32, u32), Vec<(u32, f64)>> = HashMap::new();
    let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
    let mut factors: Vec<Vec<(u32, f64)>> = Vec::with_capacity(dim);
    for (i, &(alpha, ca)) in terms.iter().enumerate() {
        for &(beta, cb) in &terms[i..] {
            let w = if std::ptr::eq(alpha, beta) { ca * ca } else { 2.0 * ca * cb };
            factors.clear();
            for (&x, &y) in alpha.exponents().iter().zip(beta.exponents()) {
                let key = (x.min(y), x.max(y));
                let list = cache
                    .entry(key)
                    .or_insert_with(|| linearize_pair(key.0, key.1).into_iter().collect());
                factors.push(list.clone());
            }
            let mut idx = vec![0u32; dim];
            tensor_accumulate(&factors, 0, w, &mut idx, &mut acc);
        }
    }
    HermiteExpansion::from_terms(dim, acc.into_iter().map(|(k, v)| (MultiIndex::new(k), v)))
        .expect("consistent dimension")
}

fn tensor_accumulate(
    factors: &[Vec<(u32, f64)>],
    pos: usize,
    weight: f64,
    idx: &mut [u32],
    acc: &mut HashMap<Vec<u32>, f64>,
) {
    if pos == factors.len() {
        *acc.entry(idx.to_vec()).or_insert(0.0) += weight;
        return;
    }
    for &(deg, l) in &factors[pos] {
        idx[pos] = deg;
        tensor_accumulate(factors, pos + 1, weight * l, idx, acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pair_examples() {
        let one = linearize_pair(0, 5);
        assert_eq!(one.len(), 1);
        assert_relative_eq!(one[&5], 1.0, epsilon = 1e-15);

        let xx = linearize_pair(1, 1);
        assert_relative_eq!(xx[&2], 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(xx[&0], 1.0, epsilon = 1e-15);

        let p21 = linearize_pair(2, 1);
        assert_relative_eq!(p21[&3], 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(p21[&1], 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn symmetric_in_arguments() {
        for a in 0..15 {
            for b in 0..15 {
                assert_eq!(linearization_coeffs(a, b), linearization_coeffs(b, a));
            }
        }
    }

    #[test]
    fn large_degree_binomial_path_is_continuous() {
        // both branches of sqrt_binomial near the switch point
        let exact = sqrt_binomial(120, 60);
        let ln: f64 = (1..=60u32).map(|i| ((60 + i) as f64 / i as f64).ln()).sum();
        assert_relative_eq!(exact, (0.5 * ln).exp(), max_relative = 1e-12);
        assert!(linearization_coeffs(400, 400).iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn affine_square_examples() {
        let zero = HermiteExpansion::new(1);
        assert_eq!(zero.affine_square(), HermiteExpansion::constant(1, 0.25));

        let h1 = HermiteExpansion::from_dense_1d(&[0.0, 1.0]);
        let q = h1.affine_square();
        let d = q.dense_1d().unwrap();
        assert_eq!(d.len(), 3);
        assert_relative_eq!(d[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(d[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(d[2], 2f64.sqrt() / 4.0, epsilon = 1e-15);

        let minus_one = HermiteExpansion::constant(2, -1.0);
        assert!(minus_one.affine_square().is_empty());
    }
}
