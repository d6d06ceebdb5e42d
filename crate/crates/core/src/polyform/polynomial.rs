use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::scalar::Scalar;

/// Exponent tuple with trailing zeros trimmed, so `x1` is the same monomial
/// in every ambient dimension. Ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[u8; 8]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn new(exps: &[usize]) -> Self {
        let mut v: SmallVec<[u8; 8]> = exps.iter().map(|&e| e as u8).collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn var(k: usize) -> Self {
        let mut e = vec![0; k + 1];
        e[k] = 1;
        Monomial::new(&e)
    }

    pub fn exp(&self, k: usize) -> usize {
        self.0.get(k).map_or(0, |&e| e as usize)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// Exponents padded to `dim` entries.
    pub fn exponents(&self, dim: usize) -> Vec<usize> {
        (0..dim.max(self.0.len())).map(|k| self.exp(k)).collect()
    }

    /// Number of variables actually referenced.
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let mut v: SmallVec<[u8; 8]> = SmallVec::with_capacity(n);
        for k in 0..n {
            v.push((self.exp(k) + other.exp(k)) as u8);
        }
        Monomial(v)
    }

    /// Divides out one power of `x_k`, returning the old exponent.
    fn lower(&self, k: usize) -> Option<(usize, Monomial)> {
        let e = self.exp(k);
        if e == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[k] -= 1;
        while v.last() == Some(&0) {
            v.pop();
        }
        Some((e, Monomial(v)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for k in 0..n {
                match self.exp(k).cmp(&other.exp(k)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| {
                if e == 1 {
                    format!("x{}", k + 1)
                } else {
                    format!("x{}^{}", k + 1, e)
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Sparse multivariate polynomial with zero coefficients pruned.
#[derive(Clone, PartialEq)]
pub struct Polynomial<S> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn constant(c: S) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// The coordinate function `x_k` (zero-based).
    pub fn var(k: usize) -> Self {
        Self::term(Monomial::var(k), S::one())
    }

    /// `|x|² = Σ_{k<dim} x_k²`.
    pub fn radius_sq(dim: usize) -> Self {
        let mut p = Self::zero();
        for k in 0..dim {
            let mut e = vec![0; k + 1];
            e[k] = 2;
            p.add_term(Monomial::new(&e), S::one());
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn width(&self) -> usize {
        self.terms.keys().map(Monomial::width).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Splits into homogeneous components keyed by degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<usize, Polynomial<S>> {
        let mut out: BTreeMap<usize, Polynomial<S>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(Self::zero)
                .add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())))
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect(),
        }
    }

    /// Partial derivative `∂/∂x_k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.lower(k) {
                out.add_term(lowered, c.clone() * S::from_i64(e as i64));
            }
        }
        out
    }

    /// Euclidean Laplacian `Σ ∂_k²` over the first `dim` variables.
    pub fn laplacian(&self, dim: usize) -> Self {
        let mut out = Self::zero();
        for k in 0..dim {
            out = out + self.derivative(k).derivative(k);
        }
        out
    }

    pub fn gradient(&self, dim: usize) -> Vec<Self> {
        (0..dim).map(|k| self.derivative(k)).collect()
    }

    pub fn eval(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (k, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    v = v * x[k].clone();
                }
            }
            acc = acc + v;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .enumerate()
                    .fold(c.to_f64(), |v, (k, &e)| v * x[k].powi(e as i32))
            })
            .sum()
    }

    /// Converts the coefficient field.
    pub fn convert<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Polynomial<T> {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

impl<S: Scalar> Zero for Polynomial<S> {
    fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Scalar> One for Polynomial<S> {
    fn one() -> Self {
        Self::constant(S::one())
    }
}

impl<S: Scalar> Add<&Polynomial<S>> for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Add for Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(mut self, rhs: Polynomial<S>) -> Polynomial<S> {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<S: Scalar> Sub<&Polynomial<S>> for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(mut self, rhs: Polynomial<S>) -> Polynomial<S> {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl<S: Scalar> Mul<&Polynomial<S>> for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<S: Scalar> Mul for Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: Polynomial<S>) -> Polynomial<S> {
        &self * &rhs
    }
}

impl<S: Scalar> Neg for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl<S: Scalar> Neg for Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        -&self
    }
}

impl<S: fmt::Debug> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(m, c)| format!("{c:?}*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                if m.degree() == 0 {
                    format!("{c}")
                } else if c.is_one() {
                    format!("{m}")
                } else {
                    format!("{c}*{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi, Q};

    type P = Polynomial<Q>;

    #[test]
    fn graded_order() {
        let x1 = Monomial::var(0);
        let x2 = Monomial::var(1);
        let x1sq = Monomial::new(&[2]);
        assert!(x1 > x2);
        assert!(x1sq > x1);
        assert!(Monomial::one() < x2);
        assert_eq!(Monomial::new(&[1, 0, 0]), Monomial::var(0));
    }

    #[test]
    fn arithmetic_prunes_zeros() {
        let x = P::var(0);
        let y = P::var(1);
        let s = &(&x + &y) * &(&x - &y);
        let expected = &(&x * &x) - &(&y * &y);
        assert_eq!(s, expected);
        assert!((&s - &expected).is_zero());
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn derivatives_and_laplacian() {
        let x = P::var(0);
        let y = P::var(1);
        let f = &(&x * &x) * &y; // x²y
        assert_eq!(f.derivative(0), (&x * &y).scale(&qi(2)));
        assert_eq!(f.derivative(2), P::zero());
        let r2 = P::radius_sq(3);
        assert_eq!(r2.laplacian(3), P::constant(qi(6)));
        let h = &(&x * &x) - &(&y * &y);
        assert!(h.laplacian(2).is_zero());
    }

    #[test]
    fn evaluation() {
        let f = &P::radius_sq(2) + &P::var(0);
        assert_eq!(f.eval(&[qi(1), qi(2)]), qi(6));
        assert_eq!(f.eval_f64(&[1.0, 2.0]), 6.0);
    }

    #[test]
    fn homogeneous_split() {
        let f = &P::radius_sq(3) + &P::constant(qi(-1));
        let parts = f.homogeneous_parts();
        assert_eq!(parts.len(), 2);
        assert!(parts[&2].is_homogeneous());
        assert_eq!(f.degree(), Some(2));
    }
}
