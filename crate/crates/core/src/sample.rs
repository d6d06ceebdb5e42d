//! Seeded random inputs with small integer coefficients.

use num_traits::Zero;
use rand::Rng;

use crate::exalg::{Form, MultiIndex};
use crate::polyform::{Monomial, PolyForm, PolyVectorField, Polynomial};
use crate::scalar::{qi, Q};

/// Largest coefficient magnitude drawn by the samplers.
pub const MAX_COEFF: i64 = 3;

fn coeff<R: Rng + ?Sized>(rng: &mut R) -> Q {
    loop {
        let c = rng.random_range(-MAX_COEFF..=MAX_COEFF);
        if c != 0 {
            return qi(c);
        }
    }
}

fn monomial<R: Rng + ?Sized>(rng: &mut R, m: usize, degree: usize) -> Monomial {
    let mut exps = vec![0; m];
    for _ in 0..degree {
        exps[rng.random_range(0..m)] += 1;
    }
    Monomial::new(&exps)
}

/// Polynomial with up to `terms` monomials of degree at most `max_degree`.
pub fn polynomial<R: Rng + ?Sized>(rng: &mut R, m: usize, max_degree: usize, terms: usize) -> Polynomial<Q> {
    let mut p = Polynomial::zero();
    for _ in 0..terms {
        let d = rng.random_range(0..=max_degree);
        p.add_term(monomial(rng, m, d), coeff(rng));
    }
    p
}

/// Polynomial `p`-form with up to `terms` monomial terms.
pub fn form<R: Rng + ?Sized>(rng: &mut R, m: usize, p: usize, max_degree: usize, terms: usize) -> PolyForm<Q> {
    let basis = MultiIndex::all(m, p);
    let mut w = Form::zero(m, p);
    for _ in 0..terms {
        let idx = basis[rng.random_range(0..basis.len())].clone();
        let d = rng.random_range(0..=max_degree);
        w.add_term(idx, Polynomial::term(monomial(rng, m, d), coeff(rng)));
    }
    w
}

/// Polynomial `p`-form with `per_component` random terms in every component.
pub fn dense_form<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    p: usize,
    max_degree: usize,
    per_component: usize,
) -> PolyForm<Q> {
    let mut w = Form::zero(m, p);
    for idx in MultiIndex::all(m, p) {
        for _ in 0..per_component {
            let d = rng.random_range(1..=max_degree.max(1));
            w.add_term(idx.clone(), Polynomial::term(monomial(rng, m, d), coeff(rng)));
        }
    }
    w
}

/// Constant `p`-form with every coefficient drawn (zeros allowed).
pub fn constant_form<R: Rng + ?Sized>(rng: &mut R, m: usize, p: usize) -> Form<Q> {
    let mut w = Form::zero(m, p);
    for idx in MultiIndex::all(m, p) {
        w.add_term(idx, qi(rng.random_range(-MAX_COEFF..=MAX_COEFF)));
    }
    w
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<Q> {
    (0..m).map(|_| qi(rng.random_range(-MAX_COEFF..=MAX_COEFF))).collect()
}

pub fn vector_field<R: Rng + ?Sized>(rng: &mut R, m: usize, max_degree: usize, terms: usize) -> PolyVectorField<Q> {
    PolyVectorField::new((0..m).map(|_| polynomial(rng, m, max_degree, terms)).collect())
}

/// Polynomial in `r² = |x|²` of degree at most `max_degree`.
pub fn radial_polynomial<R: Rng + ?Sized>(rng: &mut R, m: usize, max_degree: usize) -> Polynomial<Q> {
    let r2 = Polynomial::radius_sq(m);
    let mut p = Polynomial::constant(coeff(rng));
    let mut power = Polynomial::constant(qi(1));
    for _ in 0..max_degree / 2 {
        power = &power * &r2;
        p = p + power.scale(&coeff(rng));
    }
    p
}
