use num_traits::Zero;

use super::Polynomial;
use crate::scalar::Scalar;

/// A vector field on `R^m` with polynomial components.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField<S> {
    comps: Vec<Polynomial<S>>,
}

impl<S: Scalar> PolyVectorField<S> {
    pub fn new(comps: Vec<Polynomial<S>>) -> Self {
        PolyVectorField { comps }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![Polynomial::zero(); dim])
    }

    /// The position field `x ↦ x`.
    pub fn position(dim: usize) -> Self {
        Self::new((0..dim).map(Polynomial::var).collect())
    }

    pub fn constant(v: &[S]) -> Self {
        Self::new(v.iter().map(|c| Polynomial::constant(c.clone())).collect())
    }

    pub fn gradient(f: &Polynomial<S>, dim: usize) -> Self {
        Self::new(f.gradient(dim))
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Polynomial<S>] {
        &self.comps
    }

    pub fn component(&self, k: usize) -> &Polynomial<S> {
        &self.comps[k]
    }

    /// `J[a][b] = ∂_b F_a`, i.e. `(∇F)(e_b) = Σ_a J[a][b] e_a`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial<S>>> {
        let m = self.dim();
        self.comps
            .iter()
            .map(|fa| (0..m).map(|b| fa.derivative(b)).collect())
            .collect()
    }

    pub fn divergence(&self) -> Polynomial<S> {
        self.comps
            .iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (k, c)| acc + c.derivative(k))
    }

    pub fn dot(&self, other: &Self) -> Polynomial<S> {
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(Polynomial::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.comps.iter().map(|p| p.scale(c)).collect())
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolyVectorField<T> {
        PolyVectorField::new(self.comps.iter().map(|p| p.convert(&f)).collect())
    }
}
