//! Algebraic and analytic invariants checked on generated inputs.

use formlab::ballgeom::{BallDomain, WeightFunction};
use formlab::exalg::{Form, MultiIndex};
use formlab::identities::{verify_stokes, verify_weighted_reilly};
use formlab::linalg::{generalized_eigen, to_f64_matrix};
use formlab::polyform::{Monomial, PolyForm, Polynomial};
use formlab::quad::{ball_integral, sphere_integral};
use formlab::scalar::{q, q_to_f64, qi, rationalize, Q};
use num_traits::Zero;
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = i64> {
    prop_oneof![-4i64..=-1, 1i64..=4]
}

fn polynomial(m: usize, max_degree: usize) -> impl Strategy<Value = Polynomial<Q>> {
    prop::collection::vec((prop::collection::vec(0usize..=max_degree, m), coeff()), 1..5).prop_map(move |terms| {
        let mut p = Polynomial::zero();
        for (mut exps, c) in terms {
            while exps.iter().sum::<usize>() > max_degree {
                let k = exps.iter().position(|&e| e > 0).unwrap();
                exps[k] -= 1;
            }
            p.add_term(Monomial::new(&exps), qi(c));
        }
        p
    })
}

fn poly_form(m: usize, p: usize, max_degree: usize) -> impl Strategy<Value = PolyForm<Q>> {
    let basis = MultiIndex::all(m, p);
    let n = basis.len();
    prop::collection::vec((0..n, polynomial(m, max_degree)), 1..4).prop_map(move |parts| {
        let mut w = Form::zero(m, p);
        for (k, c) in parts {
            w.add_term(basis[k].clone(), c);
        }
        w
    })
}

fn constant_form(m: usize, p: usize) -> impl Strategy<Value = Form<Q>> {
    let basis = MultiIndex::all(m, p);
    prop::collection::vec(-3i64..=3, basis.len()).prop_map(move |cs| {
        let mut w = Form::zero(m, p);
        for (i, c) in basis.iter().zip(cs) {
            w.add_term(i.clone(), qi(c));
        }
        w
    })
}

/// `(m, p)` with `0 <= p <= m`.
fn dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4).prop_flat_map(|m| (Just(m), 0..=m))
}

fn sign(k: usize) -> Q {
    if k.is_multiple_of(2) {
        qi(1)
    } else {
        qi(-1)
    }
}

fn is_zero_form(w: &PolyForm<Q>) -> bool {
    w.terms().all(|(_, c)| c.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_and_delta_squared_vanish(((m, p), w) in dims().prop_flat_map(|(m, p)| (Just((m, p)), poly_form(m, p, 4)))) {
        if p + 2 <= m {
            prop_assert!(is_zero_form(&w.exterior_d().unwrap().exterior_d().unwrap()));
        }
        if p >= 2 {
            prop_assert!(is_zero_form(&w.codifferential().unwrap().codifferential().unwrap()));
        }
    }

    #[test]
    fn hodge_laplacian_is_minus_componentwise_laplacian(((m, _p), w) in dims().prop_flat_map(|(m, p)| (Just((m, p)), poly_form(m, p, 4)))) {
        let lap = w.hodge_laplacian();
        for (idx, c) in w.terms() {
            prop_assert_eq!(lap.coeff(idx), -c.laplacian(m));
        }
        let mut sum = Form::zero(m, w.degree());
        if w.degree() > 0 {
            sum = sum + w.codifferential().unwrap().exterior_d().unwrap();
        }
        if w.degree() < m {
            sum = sum + w.exterior_d().unwrap().codifferential().unwrap();
        }
        prop_assert!(is_zero_form(&(sum - lap)));
    }

    #[test]
    fn double_hodge_star_is_signed_identity(((m, p), a) in dims().prop_flat_map(|(m, p)| (Just((m, p)), constant_form(m, p)))) {
        prop_assert_eq!(a.hodge_star().hodge_star(), a.scale(&sign(p * (m - p))));
        // ⟨a, a⟩ vol = a ∧ *a
        let top = a.wedge(&a.hodge_star()).unwrap();
        let vol = MultiIndex::all(m, m).remove(0);
        prop_assert_eq!(top.coeff(&vol), a.norm_sq());
    }

    #[test]
    fn wedge_is_graded_commutative_and_contraction_is_antiderivation(
        (m, p, r, a, b, x) in (2usize..=4)
            .prop_flat_map(|m| (Just(m), 0..=m, 0..=m))
            .prop_filter("degree fits", |(m, p, r)| p + r <= *m)
            .prop_flat_map(|(m, p, r)| (Just(m), Just(p), Just(r), constant_form(m, p), constant_form(m, r), prop::collection::vec(-3i64..=3, m)))
    ) {
        let ab = a.wedge(&b).unwrap();
        prop_assert_eq!(ab.clone(), b.wedge(&a).unwrap().scale(&sign(p * r)));
        let x: Vec<Q> = x.into_iter().map(qi).collect();
        if p + r > 0 {
            let lhs = ab.interior(&x).unwrap();
            let mut rhs = Form::zero(m, p + r - 1);
            if p > 0 {
                rhs = rhs + a.interior(&x).unwrap().wedge(&b).unwrap();
            }
            if r > 0 {
                rhs = rhs + a.wedge(&b.interior(&x).unwrap()).unwrap().scale(&sign(p));
            }
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn stokes_holds_exactly(
        (m, phi, psi, rn, rd) in (2usize..=4)
            .prop_flat_map(|m| (Just(m), 0..m))
            .prop_flat_map(|(m, p)| (Just(m), poly_form(m, p, 3), poly_form(m, p + 1, 3), 1i64..=5, 1i64..=3))
    ) {
        let domain = BallDomain::new(m, q(rn, rd)).unwrap();
        let r = verify_stokes(&domain, &phi, &psi).unwrap();
        prop_assert!(r.pass, "{r:?}");
    }

    #[test]
    fn weighted_reilly_holds_exactly(
        (m, w, f, rn) in (2usize..=4)
            .prop_flat_map(|m| (Just(m), 1..m))
            .prop_flat_map(|(m, p)| (Just(m), poly_form(m, p, 3), polynomial(m, 3), 1i64..=4))
    ) {
        let domain = BallDomain::new(m, q(rn, 2)).unwrap();
        let r = verify_weighted_reilly(&domain, &WeightFunction::from_polynomial(m, f), &w).unwrap();
        prop_assert_eq!(r.residual.as_str(), "0");
    }

    #[test]
    fn float_integrals_track_exact_ones((m, f, rn) in (2usize..=4).prop_flat_map(|m| (Just(m), polynomial(m, 5), 1i64..=6))) {
        let r = q(rn, 3);
        for (exact, float) in [
            (sphere_integral(&f, m, &r), sphere_integral(&f.convert(q_to_f64), m, &q_to_f64(&r))),
            (ball_integral(&f, m, &r), ball_integral(&f.convert(q_to_f64), m, &q_to_f64(&r))),
        ] {
            let (a, b) = (exact.to_f64(), float.to_f64());
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn integrals_are_linear_and_scale_with_radius(
        (m, f, g, k, rn) in (2usize..=4).prop_flat_map(|m| (Just(m), polynomial(m, 4), polynomial(m, 4), -3i64..=3, 1i64..=5))
    ) {
        let r = q(rn, 2);
        let combo = &f.scale(&qi(k)) + &g;
        prop_assert_eq!(
            sphere_integral(&combo, m, &r).units,
            sphere_integral(&f, m, &r).units * qi(k) + sphere_integral(&g, m, &r).units
        );
        // a homogeneous degree-d piece scales like R^(d + m - 1) on the sphere and R^(d + m) on the ball
        for (d, part) in f.homogeneous_parts() {
            let unit_s = sphere_integral(&part, m, &qi(1)).units;
            let unit_b = ball_integral(&part, m, &qi(1)).units;
            let rs = (0..d + m - 1).fold(qi(1), |acc, _| acc * &r);
            prop_assert_eq!(sphere_integral(&part, m, &r).units, &unit_s * &rs);
            prop_assert_eq!(ball_integral(&part, m, &r).units, unit_b * rs * &r);
        }
    }

    #[test]
    fn rationalize_recovers_small_fractions(num in -500i64..=500, den in 1i64..=200) {
        prop_assert_eq!(rationalize(num as f64 / den as f64, 10_000), q(num, den));
    }

    #[test]
    fn generalized_eigenvalues_match_nalgebra(
        (a, b) in (2usize..=6).prop_flat_map(|n| (
            prop::collection::vec(prop::collection::vec(-5i64..=5, n), n),
            prop::collection::vec(prop::collection::vec(-5i64..=5, n), n),
        ))
    ) {
        let n = a.len();
        // symmetric A and positive definite G = BᵀB + I
        let a: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| qi(a[i][j] + a[j][i])).collect()).collect();
        let g: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).map(|j| {
                let s: i64 = (0..n).map(|k| b[k][i] * b[k][j]).sum();
                qi(s + i64::from(i == j))
            }).collect())
            .collect();
        let (ours, _) = generalized_eigen(&to_f64_matrix(&a), &to_f64_matrix(&g)).unwrap();
        let am = nalgebra::DMatrix::from_fn(n, n, |i, j| q_to_f64(&a[i][j]));
        let gm = nalgebra::DMatrix::from_fn(n, n, |i, j| q_to_f64(&g[i][j]));
        let l = gm.cholesky().unwrap().l();
        let linv = l.try_inverse().unwrap();
        let reduced = &linv * am * linv.transpose();
        let mut theirs: Vec<f64> = reduced.symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&theirs) {
            prop_assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0), "{ours:?} vs {theirs:?}");
        }
    }
}
