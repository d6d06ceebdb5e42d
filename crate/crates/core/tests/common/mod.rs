//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Product rule on `S²(R)`: Gauss–Legendre in `cos θ`, trapezoid in `φ`.
/// Exact for polynomials of degree below `2n`.
pub fn sphere_rule(radius: f64, n: usize) -> Vec<([f64; 3], f64)> {
    let mut out = Vec::new();
    for (z, w) in gauss_legendre(n) {
        let s = (1.0 - z * z).sqrt();
        for k in 0..2 * n {
            let phi = PI * k as f64 / n as f64;
            let p = [radius * s * phi.cos(), radius * s * phi.sin(), radius * z];
            out.push((p, w * PI / n as f64 * radius * radius));
        }
    }
    out
}

/// Product rule on `B³(R)`: Gauss–Legendre in the radius times [`sphere_rule`].
pub fn ball_rule(radius: f64, n: usize) -> Vec<([f64; 3], f64)> {
    let mut out = Vec::new();
    for (t, wr) in gauss_legendre(n) {
        let r = radius * (t + 1.0) / 2.0;
        for (p, w) in sphere_rule(r, n) {
            out.push((p, w * wr * radius / 2.0));
        }
    }
    out
}

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: usize) -> f64 {
    match k {
        1 => PI.sqrt(),
        2 => 1.0,
        _ => (k as f64 / 2.0 - 1.0) * gamma_half(k - 2),
    }
}

/// `∫_{S^{m−1}} x^α` by the Gamma-function formula.
pub fn monomial_sphere_integral(alpha: &[usize]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let num: f64 = alpha.iter().map(|&a| gamma_half(a + 1)).product();
    2.0 * num / gamma_half(alpha.iter().sum::<usize>() + alpha.len())
}
