//! Differential forms on `R^m` with polynomial coefficients, and the flat
//! operators `d`, `δ`, `Δ`, `∇`, `i_F`, `∇_F`, `∇F(·)`.
//!
//! Sign conventions: `δ = −Σ_k i_{e_k} ∂_k`, so on 1-forms
//! `δ(Σ ω_k dx_k) = −Σ ∂_k ω_k`, and the Hodge Laplacian `Δ = dδ + δd` is
//! non-negative (`Δf = −Σ ∂_k² f` on functions).

mod polynomial;
mod vector_field;

pub use polynomial::{Monomial, Polynomial};
pub use vector_field::PolyVectorField;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exalg::{ConstantForm, Form, MultiIndex};
use crate::scalar::Scalar;

/// A differential form with polynomial coefficients.
pub type PolyForm<S> = Form<Polynomial<S>>;

/// Default cap on coefficient degree for randomized inputs.
pub const DEFAULT_MAX_COEFF_DEGREE: usize = 8;

impl<S: Scalar> Form<Polynomial<S>> {
    /// Embeds a constant form.
    pub fn from_constant(c: &ConstantForm<S>) -> Self {
        c.map(|v| Polynomial::constant(v.clone()))
    }

    /// Scalar function `f` as a 0-form.
    pub fn function(dim: usize, f: Polynomial<S>) -> Self {
        Form::scalar(dim, f)
    }

    /// Multiplies every coefficient by the scalar `c`.
    pub fn scale_scalar(&self, c: &S) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Multiplies every coefficient by the polynomial `f`.
    pub fn mul_poly(&self, f: &Polynomial<S>) -> Self {
        self.map(|p| p * f)
    }

    /// Componentwise partial derivative `∂_k ω`.
    pub fn partial(&self, k: usize) -> Self {
        self.map(|p| p.derivative(k))
    }

    /// Highest coefficient degree, `None` for the zero form.
    pub fn coefficient_degree(&self) -> Option<usize> {
        self.terms().filter_map(|(_, p)| p.degree()).max()
    }

    /// True when every coefficient is homogeneous of one common degree.
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms().filter_map(|(_, p)| {
            if p.is_homogeneous() {
                p.degree()
            } else {
                Some(usize::MAX)
            }
        });
        match degs.next() {
            None => true,
            Some(usize::MAX) => false,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Value of the field at a point.
    pub fn eval_at(&self, x: &[S]) -> ConstantForm<S> {
        self.map(|p| p.eval(x))
    }

    pub fn eval_f64(&self, x: &[f64]) -> ConstantForm<f64> {
        self.map(|p| p.eval_f64(x))
    }

    /// Converts the coefficient field.
    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolyForm<T> {
        self.map(|p| p.convert(&f))
    }

    /// Exterior derivative. Rejects top-degree input.
    pub fn exterior_d(&self) -> Result<Self> {
        if self.degree() >= self.dim() {
            return Err(Error::InvalidDegree {
                op: "exterior derivative",
                degree: self.degree(),
            });
        }
        Ok(self.d_unchecked())
    }

    fn d_unchecked(&self) -> Self {
        let mut out = Form::zero(self.dim(), self.degree() + 1);
        if self.degree() >= self.dim() {
            return out;
        }
        for (idx, c) in self.terms() {
            for k in 0..self.dim() {
                let dc = c.derivative(k);
                if dc.is_zero() {
                    continue;
                }
                if let Some((j, sign)) = MultiIndex::single(k).wedge(idx) {
                    out.add_term(j, if sign > 0 { dc } else { -dc });
                }
            }
        }
        out
    }

    /// Codifferential `δω = −Σ_k i_{e_k}(∂_k ω)`. Rejects 0-forms.
    pub fn codifferential(&self) -> Result<Self> {
        if self.degree() == 0 {
            return Err(Error::InvalidDegree {
                op: "codifferential",
                degree: 0,
            });
        }
        Ok(self.delta_unchecked())
    }

    fn delta_unchecked(&self) -> Self {
        let mut out = Form::zero(self.dim(), self.degree().saturating_sub(1));
        if self.degree() == 0 {
            return out;
        }
        for (idx, c) in self.terms() {
            for pos in 0..idx.len() {
                let k = idx.get(pos);
                let dc = c.derivative(k);
                if dc.is_zero() {
                    continue;
                }
                // −i_{e_k}: the sign of removing slot `pos` is (−1)^pos.
                out.add_term(idx.without(pos), if pos % 2 == 0 { -dc } else { dc });
            }
        }
        out
    }

    /// Hodge Laplacian `Δ = dδ + δd`, with the missing term zero at degree 0 or `m`.
    pub fn hodge_laplacian(&self) -> Self {
        let mut out = Form::zero(self.dim(), self.degree());
        if self.degree() > 0 {
            out = &out + &self.delta_unchecked().d_unchecked();
        }
        if self.degree() < self.dim() {
            out = &out + &self.d_unchecked().delta_unchecked();
        }
        out
    }

    /// Flat connection: component `k` is `∇_{e_k} ω = ∂_k ω`.
    pub fn covariant_gradient(&self) -> Vec<Self> {
        (0..self.dim()).map(|k| self.partial(k)).collect()
    }

    /// `|∇ω|² = Σ_k |∇_{e_k} ω|²`.
    pub fn gradient_norm_sq(&self) -> Polynomial<S> {
        self.covariant_gradient()
            .iter()
            .fold(Polynomial::zero(), |acc, g| acc + g.norm_sq())
    }

    /// Connection Laplacian `∇*∇ω = −Σ_k ∂_k² ω`.
    pub fn rough_laplacian(&self) -> Self {
        self.map(|p| -p.laplacian(self.dim()))
    }

    /// Pointwise interior product `i_F ω`.
    pub fn interior_field(&self, field: &PolyVectorField<S>) -> Result<Self> {
        self.interior(field.components())
    }

    /// `∇F(ω)`: the tensor lift of the Jacobian of `F`.
    pub fn gradient_action(&self, field: &PolyVectorField<S>) -> Result<Self> {
        self.tensor_lift(&field.jacobian())
    }

    /// `∇_F ω = Σ_k F_k ∂_k ω`.
    pub fn directional_derivative(&self, field: &PolyVectorField<S>) -> Result<Self> {
        if field.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: field.dim(),
            });
        }
        let mut out = Form::zero(self.dim(), self.degree());
        for (k, fk) in field.components().iter().enumerate() {
            if fk.is_zero() {
                continue;
            }
            out = &out + &self.partial(k).mul_poly(fk);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi, Q};

    type P = Polynomial<Q>;
    type F = PolyForm<Q>;

    fn x(k: usize) -> P {
        P::var(k)
    }

    fn mono(dim: usize, idx: &[usize], c: P) -> F {
        Form::monomial(dim, MultiIndex::new(idx, dim).unwrap(), c)
    }

    #[test]
    fn exterior_d_examples() {
        // d(x2 dx1) = −dx1∧dx2
        let w = mono(3, &[0], x(1));
        assert_eq!(w.exterior_d().unwrap(), mono(3, &[0, 1], P::constant(qi(-1))));
        // d(x1 dx1) = 0
        assert!(mono(3, &[0], x(0)).exterior_d().unwrap().is_zero());
        // d(x1 dx2 − x2 dx1) = 2 dx1∧dx2
        let w = &mono(3, &[1], x(0)) - &mono(3, &[0], x(1));
        assert_eq!(w.exterior_d().unwrap(), mono(3, &[0, 1], P::constant(qi(2))));
        assert!(mono(2, &[0, 1], x(0)).exterior_d().is_err());
    }

    #[test]
    fn codifferential_examples() {
        assert_eq!(
            mono(3, &[0], x(0)).codifferential().unwrap(),
            F::function(3, P::constant(qi(-1)))
        );
        assert!(mono(3, &[0], x(1)).codifferential().unwrap().is_zero());
        assert!(mono(3, &[1, 2], x(0)).codifferential().unwrap().is_zero());
        assert!(F::function(3, x(0)).codifferential().is_err());
    }

    #[test]
    fn laplacian_examples() {
        let f = F::function(3, P::radius_sq(3));
        assert_eq!(f.hodge_laplacian(), F::function(3, P::constant(qi(-6))));
        assert!(mono(3, &[1], x(0)).hodge_laplacian().is_zero());
        let h = F::function(3, &(&x(0) * &x(0)) - &(&x(1) * &x(1)));
        assert!(h.hodge_laplacian().is_zero());
    }

    #[test]
    fn covariant_gradient_examples() {
        let w = mono(3, &[1], x(0));
        let g = w.covariant_gradient();
        assert_eq!(g[0], mono(3, &[1], P::constant(qi(1))));
        assert!(g[1].is_zero() && g[2].is_zero());
        let w = mono(3, &[0], &x(0) * &x(1));
        let g = w.covariant_gradient();
        assert_eq!(g[0], mono(3, &[0], x(1)));
        assert_eq!(g[1], mono(3, &[0], x(0)));
        assert!(g[2].is_zero());
        let c = mono(3, &[0, 2], P::constant(qi(5)));
        assert!(c.covariant_gradient().iter().all(|g| g.is_zero()));
    }

    #[test]
    fn interior_field_examples() {
        let pos = PolyVectorField::<Q>::position(3);
        let w = mono(3, &[0, 1], P::constant(qi(1)));
        let expected = &mono(3, &[1], x(0)) - &mono(3, &[0], x(1));
        assert_eq!(w.interior_field(&pos).unwrap(), expected);
        let e1 = PolyVectorField::constant(&[qi(1), qi(0), qi(0)]);
        assert_eq!(
            mono(3, &[0], P::constant(qi(1))).interior_field(&e1).unwrap(),
            F::function(3, P::constant(qi(1)))
        );
        assert!(w.interior_field(&PolyVectorField::zero(3)).unwrap().is_zero());
    }

    #[test]
    fn gradient_action_examples() {
        let pos = PolyVectorField::<Q>::position(4);
        let w = &mono(4, &[0, 2], x(1)) + &mono(4, &[1, 3], x(3));
        assert_eq!(w.gradient_action(&pos).unwrap(), w.scale_scalar(&qi(2)));
        let c = PolyVectorField::constant(&[qi(1), qi(2), qi(3), qi(4)]);
        assert!(w.gradient_action(&c).unwrap().is_zero());
        let half_r2 = P::radius_sq(3).scale(&Q::new(1.into(), 2.into()));
        let grad = PolyVectorField::gradient(&half_r2, 3);
        let e12 = mono(3, &[0, 1], P::constant(qi(1)));
        assert_eq!(e12.gradient_action(&grad).unwrap(), e12.scale_scalar(&qi(2)));
    }

    #[test]
    fn directional_derivative_examples() {
        let e1 = PolyVectorField::constant(&[qi(1), qi(0), qi(0)]);
        let w = mono(3, &[1], x(0));
        assert_eq!(
            w.directional_derivative(&e1).unwrap(),
            mono(3, &[1], P::constant(qi(1)))
        );
        // Euler: homogeneous of degree 3
        let w = &mono(3, &[0, 2], &(&x(0) * &x(1)) * &x(2)) + &mono(3, &[1, 2], &(&x(1) * &x(1)) * &x(0));
        let pos = PolyVectorField::position(3);
        assert_eq!(w.directional_derivative(&pos).unwrap(), w.scale_scalar(&qi(3)));
        assert!(w.directional_derivative(&PolyVectorField::zero(3)).unwrap().is_zero());
    }
}
