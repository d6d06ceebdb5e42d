//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line; the
//! process exits non-zero if any criterion fails.

use std::time::Instant;

use formlab::ballgeom::{BallDomain, WeightFunction};
use formlab::curvature::{bochner_convergence, curvature_at, weitzenbock_bound_check, ChartMetric, DEFAULT_STEP};
use formlab::harmonic::FormSpaceKind;
use formlab::identities::{
    adjunction_residual, boundary_adjointness_residual, codifferential_of_wedge_residual,
    codifferential_product_residual, interior_derivative_residual, pointwise_hessian_estimate, replay_proof_chain,
    unit_weight_agreement, verify_function_reilly, verify_pohozhaev, verify_weighted_reilly, ChainKind,
    SpectralHessian,
};
use formlab::polyform::{PolyForm, PolyVectorField, Polynomial};
use formlab::quad::{ball_integral, mc_oracle, sphere_integral, unit_sphere_measure, RadialDensity, Region};
use formlab::runner::{self, RunConfig};
use formlab::sample;
use formlab::scalar::{q, qi, Q};
use formlab::spectral::{assemble_operator, check_bounds, dtn_eigenforms, BoundsReport, OperatorKind, SpectrumReport};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const MC_SEED: u64 = 1_000;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: formlab::Error) -> String {
    e.to_string()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero_form(rng: &mut ChaCha8Rng, m: usize, p: usize, degree: usize) -> PolyForm<Q> {
    loop {
        let w = sample::dense_form(rng, m, p, degree, 2);
        if !w.is_zero() {
            return w;
        }
    }
}

fn form_is_zero(w: &PolyForm<Q>) -> bool {
    w.terms().all(|(_, c)| c.is_zero())
}

fn spectrum(op: OperatorKind, m: usize, p: usize, radius: Q, l_max: usize) -> Result<SpectrumReport, String> {
    assemble_operator(op, &BallDomain::new(m, radius).map_err(err)?, p, l_max, None).map_err(err)
}

fn weighted_reilly() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut cases = 0;
    let mut nontrivial = 0;
    for m in 2..=4 {
        for k in 0..18 {
            let p = 1 + k % (m - 1);
            let degree = 1 + k % 4;
            let domain = BallDomain::<Q>::new(m, q(r.random_range(1..=3), r.random_range(1..=2))).map_err(err)?;
            let omega = nonzero_form(&mut r, m, p, degree);
            let f = sample::polynomial(&mut r, m, 4, 4);
            for weight in [WeightFunction::from_polynomial(m, f), domain.canonical_weight()] {
                let rep = verify_weighted_reilly(&domain, &weight, &omega).map_err(err)?;
                ensure(rep.exact && rep.residual == "0", || {
                    format!("m={m} p={p} deg={degree}: residual {}", rep.residual)
                })?;
                nontrivial += usize::from(rep.lhs != "0");
            }
            cases += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("took {secs:.1}s"))?;
    ensure(nontrivial >= cases, || format!("only {nontrivial} non-zero left sides"))?;
    Ok(format!("{cases} cases x 2 weights, residual 0, {secs:.1}s"))
}

fn specializations() -> Outcome {
    let mut r = rng(202);
    let mut n = 0;
    for m in 2..=4 {
        for p in 1..m {
            let domain = BallDomain::<Q>::unit(m).map_err(err)?;
            let omega = nonzero_form(&mut r, m, p, 3);
            ensure(unit_weight_agreement(&domain, &omega).map_err(err)?, || {
                format!("f = 1 mismatch m={m} p={p}")
            })?;
            n += 1;
        }
        let domain = BallDomain::<Q>::new(m, q(3, 2)).map_err(err)?;
        let u = sample::polynomial(&mut r, m, 4, 5);
        let weight = WeightFunction::from_polynomial(m, sample::polynomial(&mut r, m, 2, 3));
        let du = PolyForm::function(m, u.clone()).exterior_d().map_err(err)?;
        let as_form = verify_weighted_reilly(&domain, &weight, &du).map_err(err)?;
        let as_function = verify_function_reilly(&domain, &weight, &u).map_err(err)?;
        ensure(as_form.residual == "0" && as_function.residual == "0", || {
            format!("m={m}: residuals {} {}", as_form.residual, as_function.residual)
        })?;
        ensure(as_form.lhs == as_function.lhs && as_form.rhs == as_function.rhs, || {
            format!("m={m}: du sides differ")
        })?;
        n += 1;
    }
    Ok(format!("{n} specializations exact"))
}

fn pohozhaev() -> Outcome {
    let mut r = rng(303);
    let mut n = 0;
    for m in 2..=4 {
        for p in 1..m {
            let domain = BallDomain::<Q>::new(m, q(r.random_range(1..=3), 2)).map_err(err)?;
            let phi = nonzero_form(&mut r, m, p - 1, 3);
            let canonical = domain.canonical_weight().gradient;
            let random = [
                sample::vector_field(&mut r, m, 2, 2),
                sample::vector_field(&mut r, m, 3, 2),
            ];
            for field in [PolyVectorField::position(m), canonical].into_iter().chain(random) {
                let rep = verify_pohozhaev(&domain, &field, &phi).map_err(err)?;
                ensure(rep.residual == "0", || {
                    format!("m={m} p={p}: residual {}", rep.residual)
                })?;
                n += 1;
            }
        }
    }
    ensure(n >= 20, || format!("only {n} cases"))?;
    Ok(format!("{n} cases, residual 0"))
}

fn pointwise_lemmas() -> Outcome {
    let mut r = rng(404);
    let mut n = 0;
    for m in 2..=4 {
        for p in 1..m {
            for _ in 0..2 {
                let domain = BallDomain::<Q>::new(m, q(r.random_range(1..=3), r.random_range(1..=2))).map_err(err)?;
                let omega = nonzero_form(&mut r, m, p, 3);
                let lower = nonzero_form(&mut r, m, p - 1, 3);
                let f = sample::polynomial(&mut r, m, 3, 4);
                let field = sample::vector_field(&mut r, m, 2, 2);
                let tag = format!("m={m} p={p}");
                ensure(
                    form_is_zero(&codifferential_of_wedge_residual(&f, &omega).map_err(err)?),
                    || format!("codifferential of wedge {tag}"),
                )?;
                ensure(
                    form_is_zero(&interior_derivative_residual(&field, &omega).map_err(err)?),
                    || format!("derivative of contraction {tag}"),
                )?;
                ensure(
                    form_is_zero(&codifferential_product_residual(&f, &omega).map_err(err)?),
                    || format!("product rule {tag}"),
                )?;
                ensure(
                    boundary_adjointness_residual(&domain, &lower, &omega)
                        .map_err(err)?
                        .is_zero(),
                    || format!("adjointness {tag}"),
                )?;
                ensure(domain.normal_split_check(&omega).map_err(err)?.is_zero(), || {
                    format!("normal derivative relation {tag}")
                })?;
                let phi = sample::constant_form(&mut r, m, p);
                let psi = sample::constant_form(&mut r, m, p - 1);
                let x = sample::vector(&mut r, m);
                ensure(adjunction_residual(&phi, &x, &psi).map_err(err)?.is_zero(), || {
                    format!("adjunction {tag}")
                })?;
                let split = domain.reduce(&domain.normal_split_pointwise(&omega).map_err(err)?);
                ensure(split.is_zero(), || format!("|w|^2 split {tag}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("7 lemmas on {n} samples, all exactly 0"))
}

fn dtn_spectra() -> Outcome {
    for (m, p, sigma, mult) in [(3, 1, 2.0, 3), (4, 1, 2.0, 6), (4, 2, 3.0, 4)] {
        let rep = spectrum(OperatorKind::D, m, p, qi(1), 1)?;
        let g = &rep.eigenvalues[0];
        ensure(rep.certified, || format!("m={m} p={p} not certified"))?;
        ensure((g.value - sigma).abs() <= 1e-8 && g.multiplicity == mult, || {
            format!("m={m} p={p}: {} x{}", g.value, g.multiplicity)
        })?;
        ensure(
            rep.blocks.iter().all(|b| b.max_deviation <= 1e-8 && b.certificate.pass),
            || format!("m={m} p={p} block check"),
        )?;
    }
    Ok("sigma_1 = 2 x3, 2 x6, 3 x4 with exact nullity certificates".into())
}

fn block(rep: &SpectrumReport, l: usize, space: FormSpaceKind) -> Result<&formlab::spectral::BlockReport, String> {
    rep.blocks
        .iter()
        .find(|b| b.l == l && b.space == space)
        .ok_or_else(|| format!("missing l={l} {} block", space.label()))
}

fn normal_free_spectrum() -> Outcome {
    let t = spectrum(OperatorKind::T, 3, 1, qi(1), 1)?;
    let d = spectrum(OperatorKind::D, 3, 1, qi(1), 1)?;
    let exact = block(&t, 1, FormSpaceKind::Closed)?;
    let coexact = block(&t, 1, FormSpaceKind::NormalNull)?;
    ensure(
        exact.expected == "5/3" && (exact.eigenvalues[0].value - 5.0 / 3.0).abs() <= 1e-8,
        || format!("exact block {:?}", exact.eigenvalues),
    )?;
    ensure(
        coexact.expected == "2" && (coexact.eigenvalues[0].value - 2.0).abs() <= 1e-8,
        || format!("co-exact block {:?}", coexact.eigenvalues),
    )?;
    let (nu, sigma) = (t.first().unwrap_or(f64::NAN), d.first().unwrap_or(f64::NAN));
    ensure(t.certified && nu <= sigma, || format!("nu_1 = {nu}, sigma_1 = {sigma}"))?;
    Ok(format!("blocks 5/3 and 2; nu_1 = {nu:.10} <= sigma_1 = {sigma:.10}"))
}

fn bounds_report(m: usize, p: usize, radius: Q, l_max: usize) -> Result<BoundsReport, String> {
    let d = spectrum(OperatorKind::D, m, p, radius.clone(), l_max)?;
    let t = spectrum(OperatorKind::T, m, p, radius.clone(), l_max)?;
    let h = spectrum(OperatorKind::HodgeBoundary, m, p, radius, l_max)?;
    check_bounds(&d, &t, &h).map_err(err)
}

fn boundary_laplacian() -> Outcome {
    let h = spectrum(OperatorKind::HodgeBoundary, 3, 1, qi(1), 1)?;
    for space in [FormSpaceKind::Closed, FormSpaceKind::NormalNull] {
        let b = block(&h, 1, space)?;
        ensure(
            b.expected == "2" && b.eigenvalues.iter().all(|g| (g.value - 2.0).abs() <= 1e-8),
            || format!("{} block {:?}", space.label(), b.eigenvalues),
        )?;
    }
    let bounds = bounds_report(3, 1, qi(1), 2)?;
    let equalities: Vec<_> = bounds
        .checks
        .iter()
        .filter(|c| c.exact.is_some() && c.name.contains("lambda"))
        .collect();
    ensure(equalities.len() == 3, || {
        format!("{} exact comparison equalities", equalities.len())
    })?;
    ensure(equalities.iter().all(|c| c.exact == Some(true) && c.pass), || {
        format!("{equalities:?}")
    })?;
    Ok("both l=1 blocks equal 2; sigma_k (n-p)c = lambda_k exactly for k = 1..3".into())
}

fn equality_chain() -> Outcome {
    let domain = BallDomain::<Q>::unit(3).map_err(err)?;
    let eig = dtn_eigenforms(&domain, 1, 1, None).map_err(err)?;
    let chain = replay_proof_chain(ChainKind::Bound, &domain, &eig[0]).map_err(err)?;
    for name in ["d phi is parallel", "-i_N d phi = (p+1)c J*phi", "equality on the ball"] {
        let step = chain
            .steps
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| format!("missing step {name}"))?;
        ensure(step.pass && step.lhs == step.rhs, || {
            format!("{name}: {} vs {}", step.lhs, step.rhs)
        })?;
    }
    let comparison = replay_proof_chain(ChainKind::Comparison, &domain, &eig[0]).map_err(err)?;
    ensure(chain.pass && comparison.pass, || "chain replay failed".into())?;
    for c in [q(1, 2), qi(1), qi(3)] {
        let radius = Q::from_integer(1.into()) / &c;
        let rep = spectrum(OperatorKind::D, 3, 1, radius, 1)?;
        let want = 2.0 * formlab::scalar::q_to_f64(&c);
        let got = rep.first().unwrap_or(f64::NAN);
        ensure((got - want).abs() <= 1e-10, || {
            format!("c={c}: sigma_1 = {got}, want {want}")
        })?;
        let e = dtn_eigenforms(
            &BallDomain::new(3, Q::from_integer(1.into()) / &c).map_err(err)?,
            1,
            1,
            None,
        )
        .map_err(err)?;
        ensure(e[0].sigma == &c * qi(2), || {
            format!("c={c}: exact sigma {}", e[0].sigma)
        })?;
    }
    Ok("comparison exact, grad d phi = 0, rigidity exact; sigma_1 = 2c for c in {1/2, 1, 3}".into())
}

fn non_sharp_bound() -> Outcome {
    let mut cases = 0;
    for (m, ps) in [(3, vec![1, 2]), (4, vec![1, 2, 3])] {
        for p in ps {
            for radius in [qi(1), q(1, 2), qi(3)] {
                let rep = spectrum(OperatorKind::D, m, p, radius.clone(), 2)?;
                let c = 1.0 / formlab::scalar::q_to_f64(&radius);
                let sigma = rep.first().unwrap_or(f64::NAN);
                ensure(sigma > (p as f64 + 1.0) * c / 2.0, || {
                    format!("m={m} p={p} R={radius}: {sigma}")
                })?;
                cases += 1;
            }
        }
    }
    let mut forms = 0;
    let mut chains = 0;
    for (m, p) in [(3, 1), (3, 2), (4, 1), (4, 2), (4, 3)] {
        let domain = BallDomain::<Q>::new(m, q(3, 2)).map_err(err)?;
        for e in dtn_eigenforms(&domain, p, 1, None).map_err(err)? {
            let dphi = e.extension.exterior_d().map_err(err)?;
            let diff = &domain.b_term(&dphi).map_err(err)? - &domain.b_term_alternate(&dphi).map_err(err)?;
            ensure(domain.reduce(&diff).is_zero(), || {
                format!("B expressions differ m={m} p={p}")
            })?;
            forms += 1;
        }
        if p + 2 <= m {
            let chain = replay_proof_chain(
                ChainKind::NonSharp,
                &domain,
                &dtn_eigenforms(&domain, p, 1, None).map_err(err)?[0],
            )
            .map_err(err)?;
            ensure(chain.pass, || format!("non-sharp chain m={m} p={p}"))?;
            chains += 1;
        }
    }
    Ok(format!(
        "strict bound in {cases} spectra and {chains} exact replays; B forms agree on {forms} eigenform differentials"
    ))
}

fn hessian_estimate() -> Outcome {
    let mut r = rng(1010);
    let mut trials = 0;
    for (m, p) in [(3, 1), (4, 1), (4, 2)] {
        let c = q(r.random_range(1..=4), r.random_range(1..=2));
        for _ in 0..100 {
            let h = SpectralHessian::random(&mut r, m, &c);
            let eta = sample::constant_form(&mut r, m, p + 1);
            let rep = pointwise_hessian_estimate(&h, &eta, &c, &Q::zero()).map_err(err)?;
            ensure(rep.precondition && rep.expansion_matches && rep.holds, || {
                format!("m={m} p={p}: {rep:?}")
            })?;
            trials += 1;
        }
        let eta = sample::constant_form(&mut r, m, p + 1);
        let iso = pointwise_hessian_estimate(&SpectralHessian::isotropic(m, &c), &eta, &c, &Q::zero()).map_err(err)?;
        ensure(iso.equality && iso.lhs == iso.bound, || {
            format!("isotropic m={m}: {} vs {}", iso.lhs, iso.bound)
        })?;
    }
    Ok(format!(
        "{trials} random Hessians, 0 violations; isotropic equality exact"
    ))
}

fn quadrature() -> Outcome {
    let mut r = rng(1111);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let m = 2 + k % 3;
        let radius = q(r.random_range(1..=4), 2);
        let poly = sample::polynomial(&mut r, m, 4, 4);
        let region = if k % 2 == 0 { Region::Sphere } else { Region::Ball };
        let exact = match region {
            Region::Sphere => sphere_integral(&poly, m, &radius),
            Region::Ball => ball_integral(&poly, m, &radius),
        };
        let density = RadialDensity::polynomial(m, poly);
        let est = mc_oracle(
            &density,
            formlab::scalar::q_to_f64(&radius),
            region,
            1_000_000,
            MC_SEED + k as u64,
        );
        let z = est.z_score(exact.to_f64());
        worst = worst.max(z);
        ensure(z <= 3.0, || format!("density {k}: z = {z:.2}"))?;
    }
    let volume = ball_integral(&Polynomial::<Q>::constant(qi(1)), 3, &qi(1));
    let moment = sphere_integral(&(&Polynomial::<Q>::var(0) * &Polynomial::var(0)), 3, &qi(1));
    ensure(volume.units == q(1, 3) && moment.units == q(1, 3), || {
        format!("{} {}", volume.units, moment.units)
    })?;
    let four_thirds_pi = 4.0 * std::f64::consts::PI / 3.0;
    ensure(
        (volume.to_f64() - four_thirds_pi).abs() < 1e-12
            && (unit_sphere_measure(3) - 4.0 * std::f64::consts::PI).abs() < 1e-12,
        || "closed values".into(),
    )?;
    Ok(format!(
        "20 densities within 3 SE (worst z = {worst:.2}); |B^3| = |S^2|/3 and int x1^2 = |S^2|/3 exactly"
    ))
}

fn curvature() -> Outcome {
    let points = |m: usize| -> Vec<Vec<f64>> {
        vec![
            vec![0.0; m],
            (0..m).map(|i| 0.3 - 0.2 * i as f64).collect(),
            (0..m).map(|i| -0.25 + 0.15 * i as f64).collect(),
        ]
    };
    let mut r = rng(1212);
    let mut worst_order = f64::INFINITY;
    for m in 2..=4 {
        for x in points(m) {
            let flat = curvature_at(&ChartMetric::flat(m), &x).map_err(err)?;
            ensure(
                flat.riemann.iter().flatten().flatten().flatten().all(|v| *v == 0.0),
                || "flat Riemann".into(),
            )?;
            for p in 0..=m {
                ensure(
                    flat.weitzenbock(p)
                        .map_err(err)?
                        .matrix
                        .iter()
                        .flatten()
                        .all(|v| *v == 0.0),
                    || "flat W".into(),
                )?;
                let w = curvature_at(&ChartMetric::round_sphere(m), &x)
                    .map_err(err)?
                    .weitzenbock(p)
                    .map_err(err)?;
                let target = (p * (m - p)) as f64;
                for (i, row) in w.matrix.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        let t = if i == j { target } else { 0.0 };
                        ensure((v - t).abs() <= 1e-8, || format!("W^[{p}] m={m}: {v} vs {t}"))?;
                    }
                }
            }
        }
        let round = ChartMetric::round_sphere(m);
        for p in 1..m {
            let omega = sample::form(&mut r, m, p, 1, 4);
            if omega.is_zero() {
                continue;
            }
            let rep = bochner_convergence(&round, &omega, &points(m)[1], DEFAULT_STEP).map_err(err)?;
            let order = rep.order.ok_or_else(|| format!("no order m={m} p={p}"))?;
            worst_order = worst_order.min(order);
            ensure(order >= 1.9, || format!("Bochner order {order} m={m} p={p}"))?;
            let gm = weitzenbock_bound_check(&round, p, 1.0, &points(m), 20, &mut r).map_err(err)?;
            ensure(gm.pass, || format!("Weitzenbock bound m={m} p={p}"))?;
        }
    }
    Ok(format!(
        "flat exact zero; W^[p] = p(m-p) Id; Bochner order >= {worst_order:.3}; W^[p] >= p(m-p) gamma at every sample"
    ))
}

fn determinism() -> Outcome {
    let mut cfg = RunConfig {
        dims: vec![3, 4],
        degrees: vec![1],
        radii: vec![qi(1), q(1, 2)],
        cases: 2,
        ..RunConfig::default()
    };
    let mut reports = Vec::new();
    for jobs in [1, 4, 4] {
        cfg.jobs = jobs;
        reports.push(runner::run(&cfg).map_err(err)?.document.to_json());
    }
    ensure(reports.windows(2).all(|w| w[0] == w[1]), || {
        "reports differ across runs".into()
    })?;
    Ok(format!(
        "3 runs (jobs 1, 4, 4) give byte-identical reports ({} bytes)",
        reports[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("weighted Reilly identity", weighted_reilly),
        ("unit-weight and gradient specializations", specializations),
        ("Pohozhaev identity", pohozhaev),
        ("pointwise lemmas", pointwise_lemmas),
        ("Dirichlet-to-Neumann spectra", dtn_spectra),
        ("normal-free operator spectrum", normal_free_spectrum),
        ("boundary Hodge Laplacian and comparison", boundary_laplacian),
        ("equality chain and radius scaling", equality_chain),
        ("non-sharp bound and B expressions", non_sharp_bound),
        ("pointwise Hessian estimate", hessian_estimate),
        ("quadrature", quadrature),
        ("curvature", curvature),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
