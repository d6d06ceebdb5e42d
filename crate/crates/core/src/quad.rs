//! Exact integration over `S^{m−1}(R)` and `B^m(R)`.
//!
//! Every integral is returned in units of the unit-sphere measure
//! `|S^{m−1}(1)|`, which stays symbolic, so identity residuals reduce to
//! exact rational comparisons. Radius powers are folded into the
//! coefficient since radii are rational.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyform::{Monomial, Polynomial};
use crate::scalar::{pow_i, Scalar, Q};

/// Smallest radial exponent accepted by [`RadialDensity`].
pub const MIN_RADIAL_EXPONENT: i32 = -3;

/// `|S^{m−1}(1)|`, the measure of the unit sphere in `R^m`.
pub fn unit_sphere_measure(m: usize) -> f64 {
    use std::f64::consts::PI;
    // |S^0| = 2, |S^1| = 2π, |S^{k}| = 2π/(k−1) |S^{k−2}|
    match m {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 2.0) * unit_sphere_measure(m - 2),
    }
}

thread_local! {
    static MOMENTS: RefCell<HashMap<(usize, Monomial), Q>> = RefCell::new(HashMap::new());
}

/// Average of `x^α` over `S^{m−1}(1)`.
///
/// Zero when any exponent is odd; otherwise `∏(α_i−1)!! / ∏_{k<|α|/2}(m+2k)`.
pub fn sphere_average(alpha: &[usize], m: usize) -> Q {
    if alpha.iter().any(|a| a % 2 == 1) {
        return Q::zero();
    }
    let mut num = BigInt::one();
    for &a in alpha {
        let mut k = a as i64 - 1;
        while k > 1 {
            num *= k;
            k -= 2;
        }
    }
    let half: usize = alpha.iter().sum::<usize>() / 2;
    let mut den = BigInt::one();
    for k in 0..half {
        den *= (m + 2 * k) as i64;
    }
    Q::new(num, den)
}

fn monomial_average(mono: &Monomial, m: usize) -> Q {
    if (0..mono.width()).any(|k| mono.exp(k) % 2 == 1) {
        return Q::zero();
    }
    MOMENTS.with(|cache| {
        if let Some(v) = cache.borrow().get(&(m, mono.clone())) {
            return v.clone();
        }
        let v = sphere_average(&mono.exponents(m), m);
        cache.borrow_mut().insert((m, mono.clone()), v.clone());
        v
    })
}

/// Average of a polynomial over the unit sphere.
pub fn polynomial_sphere_average<S: Scalar>(p: &Polynomial<S>, m: usize) -> S {
    p.terms().fold(S::zero(), |acc, (mono, c)| {
        let avg = monomial_average(mono, m);
        if avg.is_zero() {
            acc
        } else {
            acc + c.clone() * S::from_q(&avg)
        }
    })
}

/// A value `units · |S^{m−1}(1)|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral<S> {
    pub m: usize,
    pub units: S,
}

/// An exact integral: a rational multiple of the unit-sphere measure.
pub type ExactScalar = Integral<Q>;

impl<S: Scalar> Integral<S> {
    pub fn zero(m: usize) -> Self {
        Integral { m, units: S::zero() }
    }

    pub fn new(m: usize, units: S) -> Self {
        Integral { m, units }
    }

    pub fn is_zero(&self) -> bool {
        self.units.is_zero()
    }

    pub fn scale(&self, c: &S) -> Self {
        Integral::new(self.m, self.units.clone() * c.clone())
    }

    /// Numeric value including the transcendental unit.
    pub fn to_f64(&self) -> f64 {
        self.units.to_f64() * unit_sphere_measure(self.m)
    }
}

impl<S: Scalar> Add for Integral<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.m, rhs.m);
        Integral::new(self.m, self.units + rhs.units)
    }
}

impl<S: Scalar> Sub for Integral<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.m, rhs.m);
        Integral::new(self.m, self.units - rhs.units)
    }
}

impl<S: Scalar> Neg for Integral<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Integral::new(self.m, -self.units)
    }
}

/// `Σ_j r^j P_j(x)` with integer `j ≥ −3` and polynomial `P_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialDensity<S> {
    m: usize,
    parts: BTreeMap<i32, Polynomial<S>>,
}

impl<S: Scalar> RadialDensity<S> {
    pub fn zero(m: usize) -> Self {
        RadialDensity {
            m,
            parts: BTreeMap::new(),
        }
    }

    pub fn polynomial(m: usize, p: Polynomial<S>) -> Self {
        Self::radial(m, 0, p).expect("exponent 0 is always admissible")
    }

    /// `r^j · p`.
    pub fn radial(m: usize, j: i32, p: Polynomial<S>) -> Result<Self> {
        if j < MIN_RADIAL_EXPONENT {
            return Err(Error::RadialExponentTooSingular(j));
        }
        let mut d = Self::zero(m);
        if !p.is_zero() {
            d.parts.insert(j, p);
        }
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn parts(&self) -> impl Iterator<Item = (i32, &Polynomial<S>)> {
        self.parts.iter().map(|(j, p)| (*j, p))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.m);
        for (j, p) in &self.parts {
            let q = p.scale(c);
            if !q.is_zero() {
                out.parts.insert(*j, q);
            }
        }
        out
    }

    pub fn mul_poly(&self, f: &Polynomial<S>) -> Self {
        let mut out = Self::zero(self.m);
        for (j, p) in &self.parts {
            let q = p * f;
            if !q.is_zero() {
                out.parts.insert(*j, q);
            }
        }
        out
    }

    /// Product of densities; fails if an exponent drops below −3.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.m);
        for (ja, pa) in &self.parts {
            for (jb, pb) in &other.parts {
                let j = ja + jb;
                if j < MIN_RADIAL_EXPONENT {
                    return Err(Error::RadialExponentTooSingular(j));
                }
                let prod = pa * pb;
                out = out + RadialDensity::radial(self.m, j, prod)?;
            }
        }
        Ok(out)
    }

    /// Pointwise value.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.parts.iter().map(|(j, p)| r.powi(*j) * p.eval_f64(x)).sum()
    }
}

impl<S: Scalar> Add for RadialDensity<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (j, p) in rhs.parts {
            let sum = match self.parts.remove(&j) {
                Some(q) => q + p,
                None => p,
            };
            if !sum.is_zero() {
                self.parts.insert(j, sum);
            }
        }
        self
    }
}

/// `∫_{S^{m−1}(R)} P da` for a polynomial `P`.
pub fn sphere_integral<S: Scalar>(p: &Polynomial<S>, m: usize, radius: &S) -> Integral<S> {
    let mut powers: BTreeMap<usize, S> = BTreeMap::new();
    let mut acc = S::zero();
    for (mono, c) in p.terms() {
        let avg = monomial_average(mono, m);
        if avg.is_zero() {
            continue;
        }
        let d = mono.degree();
        let rp = powers
            .entry(d)
            .or_insert_with(|| pow_i(radius, (d + m - 1) as i32))
            .clone();
        acc = acc + c.clone() * S::from_q(&avg) * rp;
    }
    Integral::new(m, acc)
}

/// `∫_{B^m(R)} P dv` for a polynomial `P`.
pub fn ball_integral<S: Scalar>(p: &Polynomial<S>, m: usize, radius: &S) -> Integral<S> {
    let mut acc = S::zero();
    let mut powers: BTreeMap<usize, S> = BTreeMap::new();
    for (mono, c) in p.terms() {
        let avg = monomial_average(mono, m);
        if avg.is_zero() {
            continue;
        }
        let e = mono.degree() + m;
        let rp = powers
            .entry(e)
            .or_insert_with(|| pow_i(radius, e as i32) / S::from_i64(e as i64))
            .clone();
        acc = acc + c.clone() * S::from_q(&avg) * rp;
    }
    Integral::new(m, acc)
}

/// `∫_{S^{m−1}(R)} d da`, substituting `r = R`.
pub fn integrate_sphere<S: Scalar>(d: &RadialDensity<S>, radius: &S) -> Integral<S> {
    d.parts.iter().fold(Integral::zero(d.m), |acc, (j, p)| {
        acc + sphere_integral(p, d.m, radius).scale(&pow_i(radius, *j))
    })
}

/// `∫_{B^m(R)} d dv` by radial separation.
pub fn integrate_ball<S: Scalar>(d: &RadialDensity<S>, radius: &S) -> Result<Integral<S>> {
    let m = d.m;
    let mut acc = S::zero();
    for (j, p) in &d.parts {
        for (deg, piece) in p.homogeneous_parts() {
            let e = j + deg as i32 + m as i32;
            if e <= 0 {
                return Err(Error::NotIntegrable {
                    exponent: *j,
                    degree: deg,
                    dim: m,
                });
            }
            let avg = polynomial_sphere_average(&piece, m);
            acc = acc + avg * pow_i(radius, e) / S::from_i64(e as i64);
        }
    }
    Ok(Integral::new(m, acc))
}

/// Integration region for the Monte Carlo oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Sphere,
    Ball,
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
}

impl McEstimate {
    /// Number of standard errors between the estimate and `exact`.
    pub fn z_score(&self, exact: f64) -> f64 {
        if self.std_err == 0.0 {
            return if (self.value - exact).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        (self.value - exact).abs() / self.std_err
    }
}

const MC_CHUNK: usize = 1 << 15;

/// Independent stochastic estimate of `∫ d` over the sphere or ball.
///
/// Samples are drawn in fixed-size chunks, each from its own ChaCha stream
/// derived from `seed`, and reduced in chunk order, so the result does not
/// depend on the thread count.
pub fn mc_oracle<S: Scalar>(
    d: &RadialDensity<S>,
    radius: f64,
    region: Region,
    samples: usize,
    seed: u64,
) -> McEstimate {
    let m = d.m;
    let density = RadialDensity {
        m,
        parts: d
            .parts
            .iter()
            .map(|(j, p)| (*j, p.convert(|c| c.to_f64())))
            .collect::<BTreeMap<i32, Polynomial<f64>>>(),
    };
    let chunks = samples.div_ceil(MC_CHUNK);
    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let n = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut x = vec![0.0; m];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let mut norm = 0.0;
                for v in x.iter_mut() {
                    *v = rng.sample::<f64, _>(StandardNormal);
                    norm += *v * *v;
                }
                let mut scale = radius / norm.sqrt();
                if region == Region::Ball {
                    let u: f64 = rng.random();
                    scale *= u.powf(1.0 / m as f64);
                }
                x.iter_mut().for_each(|v| *v *= scale);
                let f = density.eval_f64(&x);
                s1 += f;
                s2 += f * f;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partials.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    let measure = match region {
        Region::Sphere => unit_sphere_measure(m) * radius.powi(m as i32 - 1),
        Region::Ball => unit_sphere_measure(m) * radius.powi(m as i32) / m as f64,
    };
    McEstimate {
        value: measure * mean,
        std_err: measure * (var / n).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    type P = Polynomial<Q>;

    fn x1sq() -> P {
        &P::var(0) * &P::var(0)
    }

    #[test]
    fn sphere_average_examples() {
        assert_eq!(sphere_average(&[2, 0, 0], 3), q(1, 3));
        assert_eq!(sphere_average(&[4, 0, 0], 3), q(1, 5));
        assert_eq!(sphere_average(&[2, 2, 0], 3), q(1, 15));
        assert_eq!(sphere_average(&[1, 1, 0], 3), qi(0));
        assert_eq!(sphere_average(&[0, 0], 2), qi(1));
    }

    #[test]
    fn sphere_integral_examples() {
        let one = RadialDensity::polynomial(3, P::one());
        assert_eq!(integrate_sphere(&one, &qi(1)).units, qi(1));
        let d = RadialDensity::polynomial(3, x1sq());
        assert_eq!(integrate_sphere(&d, &qi(1)).units, q(1, 3));
        let d = RadialDensity::radial(3, 2, P::one()).unwrap();
        assert_eq!(integrate_sphere(&d, &qi(2)).units, qi(16));
    }

    #[test]
    fn ball_integral_examples() {
        let one = RadialDensity::polynomial(3, P::one());
        assert_eq!(integrate_ball(&one, &qi(1)).unwrap().units, q(1, 3));
        let d = RadialDensity::polynomial(3, x1sq());
        assert_eq!(integrate_ball(&d, &qi(1)).unwrap().units, q(1, 15));
        let d = RadialDensity::radial(3, -1, x1sq()).unwrap();
        assert_eq!(integrate_ball(&d, &qi(1)).unwrap().units, q(1, 12));
    }

    #[test]
    fn singular_density_rejected() {
        let d = RadialDensity::radial(2, -3, P::one()).unwrap();
        assert!(matches!(integrate_ball(&d, &qi(1)), Err(Error::NotIntegrable { .. })));
        assert!(RadialDensity::radial(3, -4, P::one()).is_err());
        // r^{-3} x1² in m=2 has total exponent 1: integrable
        let d = RadialDensity::radial(2, -3, x1sq()).unwrap();
        assert_eq!(integrate_ball(&d, &qi(1)).unwrap().units, q(1, 2));
    }

    #[test]
    fn polynomial_fast_paths_match_density_routes() {
        let p = &(&x1sq() * &P::var(1)) * &P::var(1) + P::constant(q(3, 2));
        let r = q(3, 2);
        let d = RadialDensity::polynomial(4, p.clone());
        assert_eq!(sphere_integral(&p, 4, &r), integrate_sphere(&d, &r));
        assert_eq!(ball_integral(&p, 4, &r), integrate_ball(&d, &r).unwrap());
    }

    #[test]
    fn unit_sphere_measures() {
        use std::f64::consts::PI;
        assert!((unit_sphere_measure(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_measure(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_measure(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let d = RadialDensity::polynomial(3, x1sq());
        let a = mc_oracle(&d, 1.0, Region::Sphere, 20_000, 11);
        let b = mc_oracle(&d, 1.0, Region::Sphere, 20_000, 11);
        assert_eq!(a, b);
    }
}
