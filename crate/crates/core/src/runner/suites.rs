//! The four check suites. Each expands the configuration into independent
//! tasks with their own random streams, so results do not depend on the
//! order in which the worker pool runs them.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::{Mode, RunConfig, Suite};
use super::report::{CheckRecord, Table};
use crate::ballgeom::{BallDomain, WeightFunction};
use crate::curvature::{bochner_convergence, curvature_at, weitzenbock_bound_check, ChartMetric, DEFAULT_STEP};
use crate::error::Result;
use crate::exalg::Form;
use crate::harmonic::BasisCache;
use crate::identities::{
    adjunction_residual, boundary_adjointness_residual, codifferential_of_wedge_residual,
    codifferential_product_residual, interior_derivative_residual, pointwise_hessian_estimate, replay_proof_chain,
    unit_weight_agreement, verify_function_reilly, verify_pohozhaev, verify_stokes, verify_unweighted_reilly,
    verify_weighted_reilly, ChainKind, IdentityReport, SpectralHessian,
};
use crate::polyform::{PolyForm, PolyVectorField, Polynomial};
use crate::sample;
use crate::scalar::{q_to_f64, qi, Scalar, Q};
use crate::spectral::{assemble_operator, check_bounds, dtn_eigenforms, scaling_check, OperatorKind};

/// Output of one suite: its check records and its CSV table.
pub struct SuiteOutput {
    pub records: Vec<CheckRecord>,
    pub table: Table,
}

/// Deterministic random stream for one task.
pub fn task_rng(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = key
        .iter()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, k| (h ^ k).wrapping_mul(0x0100_0000_01b3));
    rng.set_stream(stream);
    rng
}

fn params(m: usize, p: usize, radius: &Q) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("m".to_string(), m.to_string()),
        ("p".to_string(), p.to_string()),
        ("R".to_string(), radius.to_string()),
    ])
}

fn with(mut base: BTreeMap<String, String>, key: &str, value: impl ToString) -> BTreeMap<String, String> {
    base.insert(key.to_string(), value.to_string());
    base
}

fn record(
    suite: Suite,
    id: &str,
    params: BTreeMap<String, String>,
    residual: Option<String>,
    values: serde_json::Value,
    pass: bool,
) -> CheckRecord {
    CheckRecord {
        suite,
        id: id.to_string(),
        params,
        residual,
        values,
        pass,
    }
}

fn negligible<S: Scalar>(v: &S) -> bool {
    if S::is_exact() {
        v.is_zero()
    } else {
        v.to_f64().abs() <= 1e-8
    }
}

fn form_negligible<S: Scalar>(w: &PolyForm<S>) -> bool {
    w.terms().all(|(_, c)| c.terms().all(|(_, v)| negligible(v)))
}

/// Random inputs for one identity case, drawn in exact arithmetic.
struct CaseInputs {
    omega: PolyForm<Q>,
    lower: PolyForm<Q>,
    weight: Polynomial<Q>,
    u: Polynomial<Q>,
    field: PolyVectorField<Q>,
    const_upper: Form<Q>,
    const_lower: Form<Q>,
    vector: Vec<Q>,
}

impl CaseInputs {
    fn draw(rng: &mut ChaCha8Rng, m: usize, p: usize, degree: usize) -> Self {
        let mut omega = sample::dense_form(rng, m, p, degree, 2);
        while omega.is_zero() {
            omega = sample::dense_form(rng, m, p, degree, 2);
        }
        CaseInputs {
            omega,
            lower: sample::dense_form(rng, m, p - 1, degree, 2),
            weight: sample::polynomial(rng, m, degree, 3),
            u: sample::polynomial(rng, m, degree + 1, 3),
            field: sample::vector_field(rng, m, 2, 2),
            const_upper: sample::constant_form(rng, m, p),
            const_lower: sample::constant_form(rng, m, p - 1),
            vector: sample::vector(rng, m),
        }
    }
}

fn identity_record(r: &IdentityReport, params: BTreeMap<String, String>) -> CheckRecord {
    record(
        Suite::Identities,
        &r.id,
        params,
        Some(r.residual.clone()),
        serde_json::to_value(r).expect("serializable"),
        r.pass,
    )
}

fn identity_case<S: Scalar>(
    domain: &BallDomain<S>,
    inp: &CaseInputs,
    base: &BTreeMap<String, String>,
) -> Result<Vec<CheckRecord>> {
    let m = domain.dim();
    let conv = |v: &Q| S::from_q(v);
    let omega = inp.omega.convert(conv);
    let lower = inp.lower.convert(conv);
    let weight = WeightFunction::from_polynomial(m, inp.weight.convert(conv));
    let canonical = domain.canonical_weight();
    let u = inp.u.convert(conv);
    let field = inp.field.convert(conv);
    let mut out = Vec::new();

    out.push(identity_record(
        &verify_weighted_reilly(domain, &weight, &omega)?,
        with(base.clone(), "weight", "polynomial"),
    ));
    out.push(identity_record(
        &verify_weighted_reilly(domain, &canonical, &omega)?,
        with(base.clone(), "weight", "canonical"),
    ));
    out.push(identity_record(
        &verify_unweighted_reilly(domain, &omega)?,
        base.clone(),
    ));
    let agree = unit_weight_agreement(domain, &omega)?;
    out.push(record(
        Suite::Identities,
        "unit-weight-specialization",
        base.clone(),
        None,
        json!({ "term_for_term": agree }),
        agree,
    ));

    let fr = verify_function_reilly(domain, &weight, &u)?;
    let du = PolyForm::function(m, u.clone()).exterior_d()?;
    let as_form = verify_weighted_reilly(domain, &weight, &du)?;
    let both = fr.pass && as_form.pass;
    out.push(record(
        Suite::Identities,
        "function-reilly",
        with(base.clone(), "weight", "polynomial"),
        Some(fr.residual.clone()),
        json!({ "function_case": fr, "gradient_form_case_residual": as_form.residual }),
        both,
    ));
    out.push(identity_record(
        &verify_function_reilly(domain, &canonical, &u)?,
        with(base.clone(), "weight", "canonical"),
    ));

    out.push(identity_record(&verify_stokes(domain, &lower, &omega)?, base.clone()));

    let euler = PolyVectorField::position(m);
    for (name, f) in [
        ("position", &euler),
        ("canonical-gradient", &canonical.gradient),
        ("random", &field),
    ] {
        out.push(identity_record(
            &verify_pohozhaev(domain, f, &lower)?,
            with(base.clone(), "field", name),
        ));
    }

    let lemma =
        |id: &str, ok: bool, detail: serde_json::Value| record(Suite::Identities, id, base.clone(), None, detail, ok);
    let r = codifferential_of_wedge_residual(&weight.f, &omega)?;
    out.push(lemma(
        "codifferential-of-wedge",
        form_negligible(&r),
        json!({ "residual_terms": r.terms().count() }),
    ));
    let r = interior_derivative_residual(&field, &omega)?;
    out.push(lemma(
        "derivative-of-contraction",
        form_negligible(&r),
        json!({ "residual_terms": r.terms().count() }),
    ));
    let r = codifferential_product_residual(&weight.f, &omega)?;
    out.push(lemma(
        "codifferential-product-rule",
        form_negligible(&r),
        json!({ "residual_terms": r.terms().count() }),
    ));
    let r = adjunction_residual(
        &inp.const_upper.map(conv),
        &inp.vector.iter().map(conv).collect::<Vec<_>>(),
        &inp.const_lower.map(conv),
    )?;
    out.push(lemma(
        "wedge-contraction-adjunction",
        negligible(&r),
        json!({ "residual": r.to_string() }),
    ));
    let r = boundary_adjointness_residual(domain, &lower, &omega)?;
    out.push(lemma(
        "boundary-adjointness",
        negligible(&r.units),
        json!({ "residual": r.units.to_string() }),
    ));
    let r = domain.normal_split_check(&omega)?;
    out.push(lemma(
        "normal-derivative-relation",
        negligible(&r.units),
        json!({ "residual": r.units.to_string() }),
    ));
    let r = domain.reduce(&domain.normal_split_pointwise(&omega)?);
    let ok = r.terms().all(|(_, v)| negligible(v));
    out.push(lemma(
        "normal-tangential-split",
        ok,
        json!({ "residual_terms": r.len() }),
    ));
    Ok(out)
}

pub fn identities(cfg: &RunConfig) -> Result<SuiteOutput> {
    let mut tasks = Vec::new();
    for &m in &cfg.dims {
        for &p in &cfg.degrees {
            for (ri, r) in cfg.radii.iter().enumerate() {
                for case in 0..cfg.cases {
                    tasks.push((m, p, ri, r.clone(), case));
                }
            }
        }
    }
    let results: Vec<Vec<CheckRecord>> = tasks
        .par_iter()
        .map(|(m, p, ri, r, case)| {
            let mut rng = task_rng(cfg.seed, &[1, *m as u64, *p as u64, *ri as u64, *case as u64]);
            let inputs = CaseInputs::draw(&mut rng, *m, *p, cfg.coeff_degree);
            let base = with(with(params(*m, *p, r), "case", case), "mode", cfg.mode);
            match cfg.mode {
                Mode::Exact => identity_case(&BallDomain::new(*m, r.clone())?, &inputs, &base),
                Mode::Float => identity_case(&BallDomain::new(*m, q_to_f64(r))?, &inputs, &base),
            }
        })
        .collect::<Result<_>>()?;
    let records: Vec<CheckRecord> = results.into_iter().flatten().collect();
    let mut table = Table::new(&["id", "m", "p", "R", "case", "variant", "residual", "pass"]);
    for r in &records {
        let variant = r
            .params
            .get("weight")
            .or_else(|| r.params.get("field"))
            .cloned()
            .unwrap_or_default();
        table.push(vec![
            r.id.clone(),
            r.params["m"].clone(),
            r.params["p"].clone(),
            r.params["R"].clone(),
            r.params["case"].clone(),
            variant,
            r.residual.clone().unwrap_or_else(|| "-".into()),
            r.pass.to_string(),
        ]);
    }
    Ok(SuiteOutput { records, table })
}

const OPERATORS: [OperatorKind; 3] = [OperatorKind::D, OperatorKind::T, OperatorKind::HodgeBoundary];

pub fn spectra(cfg: &RunConfig, cache: Option<&BasisCache>) -> Result<SuiteOutput> {
    let mut tasks = Vec::new();
    for &m in &cfg.dims {
        for &p in &cfg.degrees {
            for r in &cfg.radii {
                for op in OPERATORS {
                    tasks.push((m, p, r.clone(), op));
                }
            }
        }
    }
    let reports = tasks
        .par_iter()
        .map(|(m, p, r, op)| assemble_operator(*op, &BallDomain::new(*m, r.clone())?, *p, cfg.l_max, cache))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "operator",
        "m",
        "p",
        "R",
        "l",
        "space",
        "eigenvalue",
        "multiplicity",
        "formula",
        "difference",
    ]);
    let mut records = Vec::new();
    for ((m, p, r, op), rep) in tasks.iter().zip(reports) {
        for b in &rep.blocks {
            for g in &b.eigenvalues {
                table.push(vec![
                    op.label().to_string(),
                    m.to_string(),
                    p.to_string(),
                    r.to_string(),
                    b.l.to_string(),
                    b.space.label().to_string(),
                    format!("{:.12}", g.value),
                    g.multiplicity.to_string(),
                    b.expected.clone(),
                    format!("{:.3e}", (g.value - b.expected_f64).abs()),
                ]);
            }
        }
        let pass = rep.certified;
        records.push(record(
            Suite::Spectra,
            &format!("spectrum-{}", op.label()),
            with(params(*m, *p, r), "l_max", cfg.l_max),
            None,
            serde_json::to_value(&rep).expect("serializable"),
            pass,
        ));
    }
    Ok(SuiteOutput { records, table })
}

/// Number of random Hessians per `(m, p)` in the pointwise estimate.
pub const HESSIAN_TRIALS: usize = 100;

fn hessian_trials(cfg: &RunConfig, m: usize, p: usize, c: &Q) -> Result<serde_json::Value> {
    let mut rng = task_rng(cfg.seed, &[3, m as u64, p as u64]);
    let mut violations = 0;
    let mut precondition_failures = 0;
    let mut expansion_failures = 0;
    for _ in 0..HESSIAN_TRIALS {
        let h = SpectralHessian::random(&mut rng, m, c);
        let eta = sample::constant_form(&mut rng, m, p + 1);
        let r = pointwise_hessian_estimate(&h, &eta, c, &Q::from_integer(0.into()))?;
        violations += usize::from(!r.holds);
        precondition_failures += usize::from(!r.precondition);
        expansion_failures += usize::from(!r.expansion_matches);
    }
    let eta = sample::constant_form(&mut rng, m, p + 1);
    let iso = pointwise_hessian_estimate(&SpectralHessian::isotropic(m, c), &eta, c, &Q::from_integer(0.into()))?;
    Ok(json!({
        "trials": HESSIAN_TRIALS,
        "violations": violations,
        "precondition_failures": precondition_failures,
        "expansion_failures": expansion_failures,
        "isotropic_equality": iso.equality,
        "pass": violations == 0 && precondition_failures == 0 && expansion_failures == 0
            && iso.equality,
    }))
}

pub fn bounds(cfg: &RunConfig, cache: Option<&BasisCache>) -> Result<SuiteOutput> {
    let mut tasks = Vec::new();
    for &m in &cfg.dims {
        for &p in &cfg.degrees {
            for r in &cfg.radii {
                tasks.push((m, p, r.clone()));
            }
        }
    }
    let results: Vec<Vec<CheckRecord>> = tasks
        .par_iter()
        .map(|(m, p, r)| -> Result<Vec<CheckRecord>> {
            let (m, p) = (*m, *p);
            let domain = BallDomain::new(m, r.clone())?;
            let base = params(m, p, r);
            let spectra: Vec<_> = OPERATORS
                .iter()
                .map(|op| assemble_operator(*op, &domain, p, cfg.l_max, cache))
                .collect::<Result<_>>()?;
            let mut out = Vec::new();
            let b = check_bounds(&spectra[0], &spectra[1], &spectra[2])?;
            out.push(record(
                Suite::Bounds,
                "eigenvalue-bounds",
                base.clone(),
                None,
                serde_json::to_value(&b).expect("serializable"),
                b.pass,
            ));

            let reference_radius = if *r == qi(1) { qi(2) } else { qi(1) };
            let reference = BallDomain::new(m, reference_radius.clone())?;
            for (k, op) in OPERATORS.iter().enumerate() {
                let other = assemble_operator(*op, &reference, p, cfg.l_max, cache)?;
                let s = if *r == qi(1) {
                    scaling_check(&spectra[k], &other)?
                } else {
                    scaling_check(&other, &spectra[k])?
                };
                out.push(record(
                    Suite::Bounds,
                    &format!("radius-scaling-{}", op.label()),
                    with(base.clone(), "reference_R", &reference_radius),
                    None,
                    serde_json::to_value(&s).expect("serializable"),
                    s.pass,
                ));
            }

            let eig = dtn_eigenforms(&domain, p, 1, cache)?;
            for kind in [ChainKind::Bound, ChainKind::Comparison, ChainKind::NonSharp] {
                let chain = replay_proof_chain(kind, &domain, &eig[0])?;
                let id = match kind {
                    ChainKind::Bound => "sharp-bound-replay",
                    ChainKind::Comparison => "comparison-replay",
                    ChainKind::NonSharp => "non-sharp-bound-replay",
                };
                out.push(record(
                    Suite::Bounds,
                    id,
                    base.clone(),
                    None,
                    serde_json::to_value(&chain).expect("serializable"),
                    chain.pass,
                ));
            }

            let c = domain.curvature();
            let trials = hessian_trials(cfg, m, p, &c)?;
            let pass = trials["pass"].as_bool().unwrap_or(false);
            out.push(record(
                Suite::Bounds,
                "pointwise-hessian-estimate",
                base,
                None,
                trials,
                pass,
            ));
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let records: Vec<CheckRecord> = results.into_iter().flatten().collect();
    let mut table = Table::new(&["id", "m", "p", "R", "check", "lhs", "relation", "rhs", "pass"]);
    for r in &records {
        let steps = r
            .values
            .get("checks")
            .or_else(|| r.values.get("steps"))
            .and_then(|v| v.as_array());
        match steps {
            Some(steps) => {
                for s in steps {
                    table.push(vec![
                        r.id.clone(),
                        r.params["m"].clone(),
                        r.params["p"].clone(),
                        r.params["R"].clone(),
                        s["name"].as_str().unwrap_or_default().to_string(),
                        s["lhs"].to_string().trim_matches('"').to_string(),
                        s["relation"].as_str().unwrap_or_default().to_string(),
                        s["rhs"].to_string().trim_matches('"').to_string(),
                        s["pass"].to_string(),
                    ]);
                }
            }
            None => table.push(vec![
                r.id.clone(),
                r.params["m"].clone(),
                r.params["p"].clone(),
                r.params["R"].clone(),
                "-".into(),
                "-".into(),
                "-".into(),
                "-".into(),
                r.pass.to_string(),
            ]),
        }
    }
    Ok(SuiteOutput { records, table })
}

/// Sample points for the chart checks, inside the unit ball of the chart.
fn chart_points(m: usize) -> Vec<Vec<f64>> {
    let base = [0.3, -0.2, 0.1, 0.45, -0.35, 0.15];
    vec![
        vec![0.0; m],
        (0..m).map(|i| base[i % base.len()]).collect(),
        (0..m).map(|i| -0.5 * base[(i + 2) % base.len()]).collect(),
    ]
}

pub fn curvature(cfg: &RunConfig) -> Result<SuiteOutput> {
    let results: Vec<Vec<CheckRecord>> = cfg
        .dims
        .par_iter()
        .map(|&m| -> Result<Vec<CheckRecord>> {
            let mut out = Vec::new();
            let points = chart_points(m);
            let base = BTreeMap::from([("m".to_string(), m.to_string())]);

            let flat = ChartMetric::flat(m);
            let mut flat_zero = true;
            for x in &points {
                let d = curvature_at(&flat, x)?;
                flat_zero &= d.riemann.iter().flatten().flatten().flatten().all(|v| *v == 0.0);
                for p in 0..=m {
                    flat_zero &= d.weitzenbock(p)?.matrix.iter().flatten().all(|v| *v == 0.0);
                }
            }
            out.push(record(Suite::Curvature, "flat-chart-zero", base.clone(), None, json!({ "exact_zero": flat_zero }), flat_zero));

            let round = ChartMetric::round_sphere(m);
            let mut worst = 0.0f64;
            let mut defect = 0.0f64;
            let mut asymmetry = 0.0f64;
            let mut duality = 0.0f64;
            for x in &points {
                let d = curvature_at(&round, x)?;
                defect = defect.max(d.symmetry_defect);
                for p in 0..=m {
                    let w = d.weitzenbock(p)?;
                    asymmetry = asymmetry.max(w.asymmetry());
                    let target = (p * (m - p)) as f64;
                    for (i, row) in w.matrix.iter().enumerate() {
                        for (j, v) in row.iter().enumerate() {
                            let t = if i == j { target } else { 0.0 };
                            worst = worst.max((v - t).abs());
                        }
                    }
                    let dual = d.weitzenbock(m - p)?;
                    for (a, b) in w.eigenvalues().iter().zip(dual.eigenvalues()) {
                        duality = duality.max((a - b).abs());
                    }
                }
            }
            let pass = worst <= 1e-8 && defect <= 1e-10 && asymmetry <= 1e-10 && duality <= 1e-8;
            out.push(record(
                Suite::Curvature,
                "constant-curvature-weitzenbock",
                base.clone(),
                None,
                json!({ "max_deviation": worst, "symmetry_defect": defect, "asymmetry": asymmetry, "hodge_dual_gap": duality }),
                pass,
            ));

            for &p in cfg.degrees.iter().filter(|&&p| p <= m) {
                let mut rng = task_rng(cfg.seed, &[4, m as u64, p as u64]);
                let mut w = sample::form(&mut rng, m, p, 1, 4);
                while w.is_zero() {
                    w = sample::form(&mut rng, m, p, 1, 4);
                }
                let r = bochner_convergence(&round, &w, &points[1], DEFAULT_STEP)?;
                let pass = r.order.is_some_and(|o| o >= 1.9);
                out.push(record(
                    Suite::Curvature,
                    "bochner-finite-difference",
                    with(base.clone(), "p", p),
                    Some(format!("{:e}", r.residual)),
                    serde_json::to_value(&r).expect("serializable"),
                    pass,
                ));
                let gm = weitzenbock_bound_check(&round, p, 1.0, &points, 20, &mut rng)?;
                out.push(record(
                    Suite::Curvature,
                    "weitzenbock-lower-bound",
                    with(base.clone(), "p", p),
                    None,
                    serde_json::to_value(&gm).expect("serializable"),
                    gm.pass,
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let records: Vec<CheckRecord> = results.into_iter().flatten().collect();
    let mut table = Table::new(&["id", "m", "p", "residual", "pass"]);
    for r in &records {
        table.push(vec![
            r.id.clone(),
            r.params["m"].clone(),
            r.params.get("p").cloned().unwrap_or_else(|| "-".into()),
            r.residual.clone().unwrap_or_else(|| "-".into()),
            r.pass.to_string(),
        ]);
    }
    Ok(SuiteOutput { records, table })
}
