#![allow(dead_code)]

use std::f64::consts::PI;

use nonneg_approx::{HermiteExpansion, MultiIndex};
use rand::Rng;

/// Gauss–Hermite rule for `γ_1`, computed independently of the library:
/// Newton iteration on the normalized physicists' recurrence for weight
/// `e^{−z²}`, then `x = √2·z`, `w ↦ w/√π`. The asymptotic starting guesses
/// stop converging to distinct roots somewhere below 200 nodes.
pub fn oracle_gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!((2..=180).contains(&n), "oracle rule supports 2..=180 nodes");
    let nf = n as f64;
    let mut z_nodes = vec![0.0; n];
    let mut w_nodes = vec![0.0; n];
    let m = n.div_ceil(2);
    let pim4 = PI.powf(-0.25);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * z_nodes[0],
            3 => 1.91 * z - 0.91 * z_nodes[1],
            _ => 2.0 * z - z_nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (pim4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        z_nodes[i] = z;
        z_nodes[n - 1 - i] = -z;
        w_nodes[i] = 2.0 / (pp * pp);
        w_nodes[n - 1 - i] = w_nodes[i];
    }
    // ascending order
    let x = z_nodes.iter().rev().map(|z| z * 2f64.sqrt()).collect();
    let w = w_nodes.iter().rev().map(|w| w / PI.sqrt()).collect();
    (x, w)
}

/// `h_n(x)` from the explicit sum `He_n(x) = n! Σ_k (−1)^k x^{n−2k} / (k! (n−2k)! 2^k)`,
/// divided by `√(n!)`. Only for small `n`.
pub fn explicit_hermite(n: u32, x: f64) -> f64 {
    let fact = |k: u32| (1..=k).map(|i| i as f64).product::<f64>();
    let mut s = 0.0;
    for k in 0..=n / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * x.powi((n - 2 * k) as i32) / (fact(k) * fact(n - 2 * k) * 2f64.powi(k as i32));
    }
    s * fact(n) / fact(n).sqrt()
}

/// Random expansion with up to `terms` entries of total degree `≤ max_degree`.
pub fn random_expansion<R: Rng>(rng: &mut R, dim: usize, max_degree: u32, terms: usize) -> HermiteExpansion {
    let items = (0..terms).map(|_| {
        let mut left = rng.random_range(0..=max_degree);
        let mut e = vec![0u32; dim];
        for slot in e.iter_mut().take(dim - 1) {
            let k = rng.random_range(0..=left);
            *slot = k;
            left -= k;
        }
        e[dim - 1] = left;
        (MultiIndex::new(e), rng.random_range(-1.0..1.0))
    });
    HermiteExpansion::from_terms(dim, items).unwrap()
}

/// Tensor-grid integral against `γ_d` with the oracle rule.
pub fn oracle_integrate_nd(nodes: usize, dim: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let (x, w) = oracle_gauss_hermite(nodes);
    let mut idx = vec![0usize; dim];
    let mut pt = vec![0.0; dim];
    let mut total = 0.0;
    loop {
        let mut weight = 1.0;
        for (i, &k) in idx.iter().enumerate() {
            pt[i] = x[k];
            weight *= w[k];
        }
        total += weight * f(&pt);
        let mut pos = 0;
        loop {
            if pos == dim {
                return total;
            }
            idx[pos] += 1;
            if idx[pos] < nodes {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Coefficients of `2·1{x ≤ θ} − 1` up to degree `t` by quadrature of its smooth
/// image `2Φ((θ − ρx)/√(1−ρ²)) − 1` under `T_ρ`, divided by `ρ^n`.
pub fn oracle_halfspace_coeffs(theta: f64, t: u32, nodes: usize) -> Vec<f64> {
    let rho: f64 = 0.9;
    let s = (1.0 - rho * rho).sqrt();
    let (x, w) = oracle_gauss_hermite(nodes);
    let smooth: Vec<f64> = x
        .iter()
        .map(|&x| 2.0 * nonneg_approx::stats::normal_cdf((theta - rho * x) / s) - 1.0)
        .collect();
    (0..=t)
        .map(|n| {
            let q: f64 = x
                .iter()
                .zip(&w)
                .zip(&smooth)
                .map(|((&x, &w), &g)| w * g * oracle_hermite(n, x))
                .sum();
            q / rho.powi(n as i32)
        })
        .collect()
}

// three-term recurrence; checked against `explicit_hermite` in hermite_engine
fn oracle_hermite(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}
