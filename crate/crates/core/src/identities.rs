//! Exact verification of the integral identities on `B^m(R)`, the pointwise
//! lemmas behind them, and replays of the eigenvalue-bound arguments.
//!
//! Integral values are reported in units of `|S^{m−1}(1)|`. Every check is
//! organized term by term so a failing run names the term at fault.

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::ballgeom::{BallDomain, BoundaryForm, WeightFunction};
use crate::error::{Error, Result};
use crate::exalg::{ConstantForm, Form, LinearEndomorphism, MultiIndex};
use crate::linalg::{determinant, inverse, is_psd};
use crate::polyform::{PolyForm, PolyVectorField, Polynomial};
use crate::quad::Integral;
use crate::scalar::{qi, Scalar, Q};

/// Relative tolerance for float-mode identity checks.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// One named term of an identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermValue {
    pub name: String,
    /// Value in units of `|S^{m−1}(1)|`.
    pub value: String,
    /// Numeric value including the sphere measure.
    pub approx: f64,
}

/// Outcome of one identity evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub m: usize,
    pub p: usize,
    pub radius: String,
    pub exact: bool,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
    pub residual_f64: f64,
    pub lhs_terms: Vec<TermValue>,
    pub rhs_terms: Vec<TermValue>,
    pub pass: bool,
}

/// Collects the two sides of an identity term by term.
struct Balance<S: Scalar> {
    m: usize,
    lhs: Vec<(String, Integral<S>)>,
    rhs: Vec<(String, Integral<S>)>,
}

impl<S: Scalar> Balance<S> {
    fn new(m: usize) -> Self {
        Balance {
            m,
            lhs: Vec::new(),
            rhs: Vec::new(),
        }
    }

    fn left(&mut self, name: &str, v: Integral<S>) {
        self.lhs.push((name.to_string(), v));
    }

    fn right(&mut self, name: &str, v: Integral<S>) {
        self.rhs.push((name.to_string(), v));
    }

    fn finish(self, id: &str, p: usize, radius: &S) -> IdentityReport {
        let sum =
            |side: &[(String, Integral<S>)]| side.iter().fold(Integral::zero(self.m), |acc, (_, v)| acc + v.clone());
        let lhs = sum(&self.lhs);
        let rhs = sum(&self.rhs);
        let residual = lhs.clone() - rhs.clone();
        let scale = self
            .lhs
            .iter()
            .chain(&self.rhs)
            .map(|(_, v)| v.units.to_f64().abs())
            .fold(1.0, f64::max);
        let pass = if S::is_exact() {
            residual.units.is_zero()
        } else {
            residual.units.to_f64().abs() <= FLOAT_TOLERANCE * scale
        };
        let render = |side: Vec<(String, Integral<S>)>| {
            side.into_iter()
                .map(|(name, v)| TermValue {
                    name,
                    value: v.units.to_string(),
                    approx: v.to_f64(),
                })
                .collect()
        };
        IdentityReport {
            id: id.to_string(),
            m: self.m,
            p,
            radius: radius.to_string(),
            exact: S::is_exact(),
            lhs: lhs.units.to_string(),
            rhs: rhs.units.to_string(),
            residual: residual.units.to_string(),
            residual_f64: residual.to_f64(),
            lhs_terms: render(self.lhs),
            rhs_terms: render(self.rhs),
            pass,
        }
    }
}

/// `∫_M ⟨dφ, ψ⟩ = ∫_M ⟨φ, δψ⟩ − ∫_Σ ⟨J*φ, i_Nψ⟩`.
pub fn verify_stokes<S: Scalar>(
    domain: &BallDomain<S>,
    phi: &PolyForm<S>,
    psi: &PolyForm<S>,
) -> Result<IdentityReport> {
    let p = phi.degree();
    if psi.degree() != p + 1 {
        return Err(Error::DegreeMismatch {
            expected: p + 1,
            actual: psi.degree(),
        });
    }
    let mut b = Balance::new(domain.dim());
    b.left("<d phi, psi>", domain.ball_integral(&phi.exterior_d()?.inner(psi)?));
    b.right(
        "<phi, delta psi>",
        domain.ball_integral(&phi.inner(&psi.codifferential()?)?),
    );
    let boundary = domain.boundary_pointwise_inner(phi, &domain.contract_normal(psi)?)?;
    b.right("-<J*phi, i_N psi>", -domain.sphere_integral(&boundary));
    Ok(b.finish("stokes", p, domain.radius()))
}

/// Every term of the weighted Reilly formula for one `(f, ω)` pair.
#[derive(Clone, Debug)]
pub struct ReillyTerms<S: Scalar> {
    /// `∫_M f(|δω|² + |dω|² − |∇ω|²)`
    pub lhs: Integral<S>,
    /// `−2∫_M ⟨ω, i_{∇f} dω⟩`
    pub gradient_contraction: Integral<S>,
    /// `∫_M ⟨ω, ∇²f(ω)⟩`
    pub hessian: Integral<S>,
    /// `∫_M Δf |ω|²`
    pub laplacian: Integral<S>,
    /// `∫_M f ⟨W ω, ω⟩`, identically zero on a Euclidean ball.
    pub curvature: Integral<S>,
    /// `−∫_Σ f_N |J*ω|²`
    pub normal_derivative: Integral<S>,
    /// `2∫_Σ f ⟨δ^Σ J*ω, i_Nω⟩`
    pub boundary_codifferential: Integral<S>,
    /// `∫_Σ f B(ω,ω)`
    pub shape: Integral<S>,
}

impl<S: Scalar> ReillyTerms<S> {
    pub fn compute(domain: &BallDomain<S>, weight: &WeightFunction<S>, omega: &PolyForm<S>) -> Result<Self> {
        let m = domain.dim();
        let p = omega.degree();
        if p == 0 || p > m {
            return Err(Error::InvalidDegree {
                op: "weighted Reilly formula",
                degree: p,
            });
        }
        let f = &weight.f;
        let two = S::from_i64(2);
        let delta = omega.codifferential()?;
        let d = if p < m {
            omega.exterior_d()?
        } else {
            Form::zero(m, p + 1)
        };
        let energy = delta.norm_sq() + d.norm_sq() - omega.gradient_norm_sq();
        let lhs = domain.ball_integral(&(f * &energy));

        let gradient_contraction = if p < m {
            let c = omega.inner(&d.interior_field(&weight.gradient)?)?;
            domain.ball_integral(&c).scale(&(-two.clone()))
        } else {
            Integral::zero(m)
        };
        let hessian = domain.ball_integral(&omega.inner(&weight.hessian_action(omega)?)?);
        let laplacian = domain.ball_integral(&(&weight.laplacian * &omega.norm_sq()));

        let f_n = weight.normal_derivative(domain);
        let pullback_sq = domain.boundary_pointwise_inner(omega, omega)?;
        let normal_derivative = -domain.sphere_integral(&(&f_n * &pullback_sq));
        let inw = domain.contract_normal(omega)?;
        let ds = domain.boundary_delta(&BoundaryForm::new(omega.clone()))?;
        let pairing = domain.boundary_pointwise_inner(&ds.rep, &inw)?;
        let boundary_codifferential = domain.sphere_integral(&(f * &pairing)).scale(&two);
        let shape = domain.sphere_integral(&(f * &domain.b_term(omega)?));
        Ok(ReillyTerms {
            lhs,
            gradient_contraction,
            hessian,
            laplacian,
            curvature: Integral::zero(m),
            normal_derivative,
            boundary_codifferential,
            shape,
        })
    }

    fn rhs_named(&self) -> Vec<(&'static str, Integral<S>)> {
        vec![
            ("-2<omega, i_grad_f d omega>", self.gradient_contraction.clone()),
            ("<omega, hess_f(omega)>", self.hessian.clone()),
            ("lap_f |omega|^2", self.laplacian.clone()),
            ("f <W omega, omega>", self.curvature.clone()),
            ("-f_N |J*omega|^2", self.normal_derivative.clone()),
            ("2 f <delta_S J*omega, i_N omega>", self.boundary_codifferential.clone()),
            ("f B(omega, omega)", self.shape.clone()),
        ]
    }
}

/// The weighted Reilly formula for differential forms.
pub fn verify_weighted_reilly<S: Scalar>(
    domain: &BallDomain<S>,
    weight: &WeightFunction<S>,
    omega: &PolyForm<S>,
) -> Result<IdentityReport> {
    let t = ReillyTerms::compute(domain, weight, omega)?;
    let mut b = Balance::new(domain.dim());
    b.left("f(|delta omega|^2 + |d omega|^2 - |grad omega|^2)", t.lhs.clone());
    for (name, v) in t.rhs_named() {
        b.right(name, v);
    }
    Ok(b.finish("weighted-reilly", omega.degree(), domain.radius()))
}

/// The unweighted Reilly formula
/// `∫|dω|² + |δω|² = ∫|∇ω|² + 2∫_Σ⟨δ^ΣJ*ω, i_Nω⟩ + ∫_Σ B(ω,ω)`,
/// evaluated independently of the weighted terms.
pub fn verify_unweighted_reilly<S: Scalar>(domain: &BallDomain<S>, omega: &PolyForm<S>) -> Result<IdentityReport> {
    let m = domain.dim();
    let p = omega.degree();
    if p == 0 || p > m {
        return Err(Error::InvalidDegree {
            op: "Reilly formula",
            degree: p,
        });
    }
    let mut b = Balance::new(m);
    if p < m {
        b.left("|d omega|^2", domain.ball_integral(&omega.exterior_d()?.norm_sq()));
    }
    b.left(
        "|delta omega|^2",
        domain.ball_integral(&omega.codifferential()?.norm_sq()),
    );
    b.right("|grad omega|^2", domain.ball_integral(&omega.gradient_norm_sq()));
    b.right("<W omega, omega>", Integral::zero(m));
    let ds = domain.boundary_delta(&BoundaryForm::new(omega.clone()))?;
    let pairing = domain.boundary_pointwise_inner(&ds.rep, &domain.contract_normal(omega)?)?;
    b.right(
        "2 <delta_S J*omega, i_N omega>",
        domain.sphere_integral(&pairing).scale(&S::from_i64(2)),
    );
    b.right("B(omega, omega)", domain.sphere_integral(&domain.b_term(omega)?));
    Ok(b.finish("unweighted-reilly", p, domain.radius()))
}

/// Term-for-term comparison of the weighted formula at `f ≡ 1` against
/// the unweighted one: same left side, and the weighted right side has its
/// extra terms vanish while the shared ones coincide.
pub fn unit_weight_agreement<S: Scalar>(domain: &BallDomain<S>, omega: &PolyForm<S>) -> Result<bool> {
    let m = domain.dim();
    let t = ReillyTerms::compute(domain, &WeightFunction::constant(m, S::one()), omega)?;
    let u = verify_unweighted_reilly(domain, omega)?;
    let grad_sq = domain.ball_integral(&omega.gradient_norm_sq());
    let mut d_delta = domain.ball_integral(&omega.codifferential()?.norm_sq());
    if omega.degree() < m {
        d_delta = d_delta + domain.ball_integral(&omega.exterior_d()?.norm_sq());
    }
    let close = |a: &S, b: &S| {
        if S::is_exact() {
            a == b
        } else {
            let (a, b) = (a.to_f64(), b.to_f64());
            (a - b).abs() <= FLOAT_TOLERANCE * a.abs().max(b.abs()).max(1.0)
        }
    };
    let lhs_match = close(&t.lhs.units, &(d_delta - grad_sq).units);
    let zero = S::zero();
    let extras_vanish = [&t.gradient_contraction, &t.hessian, &t.laplacian, &t.normal_derivative]
        .iter()
        .all(|v| close(&v.units, &zero));
    let term_match = |k: usize, v: &Integral<S>| {
        let term = &u.rhs_terms[k];
        if S::is_exact() {
            term.value == v.units.to_string()
        } else {
            let b = v.to_f64();
            (term.approx - b).abs() <= FLOAT_TOLERANCE * term.approx.abs().max(b.abs()).max(1.0)
        }
    };
    let boundary_match = term_match(2, &t.boundary_codifferential) && term_match(3, &t.shape);
    Ok(lhs_match && extras_vanish && boundary_match && u.pass)
}

/// The function case:
/// `∫ f((Δu)² − |∇²u|²) = ∫_Σ f(2u_NΔ_Σu + nH u_N² + h(∇_Σu, ∇_Σu)) − ∫_Σ f_N|∇_Σu|²
///  + ∫ (∇²f + Δf g)(∇u, ∇u)`,
/// with every boundary quantity computed from ambient derivatives of `u`.
pub fn verify_function_reilly<S: Scalar>(
    domain: &BallDomain<S>,
    weight: &WeightFunction<S>,
    u: &Polynomial<S>,
) -> Result<IdentityReport> {
    let m = domain.dim();
    let r2 = domain.radius().clone() * domain.radius().clone();
    let inv_r2 = S::one() / r2;
    let n = S::from_i64(domain.boundary_dim() as i64);
    let f = &weight.f;
    let grad = u.gradient(m);
    let hess: Vec<Vec<Polynomial<S>>> = grad.iter().map(|g| g.gradient(m)).collect();
    let lap_u = -u.laplacian(m);
    let hess_sq = hess.iter().flatten().fold(Polynomial::zero(), |acc, h| acc + h * h);
    let x = PolyVectorField::<S>::position(m);
    let radial = x.dot(&PolyVectorField::new(grad.clone()));
    let mut x_hess_x = Polynomial::zero();
    for a in 0..m {
        for b in 0..m {
            x_hess_x = x_hess_x + &(&Polynomial::var(a) * &Polynomial::var(b)) * &hess[a][b];
        }
    }
    let grad_sq = grad.iter().fold(Polynomial::zero(), |acc, g| acc + g * g);
    let u_n = radial.scale(&(-domain.curvature()));
    let sphere_lap = lap_u.clone() + x_hess_x.scale(&inv_r2) + radial.scale(&(n.clone() * inv_r2.clone()));
    let tangential_sq = grad_sq.clone() - (&radial * &radial).scale(&inv_r2);
    let second_form = tangential_sq.scale(&domain.curvature());

    let mut b = Balance::new(m);
    b.left("f (lap u)^2", domain.ball_integral(&(f * &(&lap_u * &lap_u))));
    b.left("-f |hess u|^2", -domain.ball_integral(&(f * &hess_sq)));
    let two = S::from_i64(2);
    b.right(
        "2 f u_N lap_S u",
        domain.sphere_integral(&(f * &(&u_n * &sphere_lap))).scale(&two),
    );
    b.right(
        "f nH u_N^2",
        domain
            .sphere_integral(&(f * &(&u_n * &u_n)))
            .scale(&(n * domain.mean_curvature())),
    );
    b.right("f h(grad_S u, grad_S u)", domain.sphere_integral(&(f * &second_form)));
    let f_n = weight.normal_derivative(domain);
    b.right("-f_N |grad_S u|^2", -domain.sphere_integral(&(&f_n * &tangential_sq)));
    let mut hess_f_grad = Polynomial::zero();
    for a in 0..m {
        for c in 0..m {
            hess_f_grad = hess_f_grad + &weight.hessian[a][c] * &(&grad[a] * &grad[c]);
        }
    }
    b.right("hess f(grad u, grad u)", domain.ball_integral(&hess_f_grad));
    b.right(
        "lap f |grad u|^2",
        domain.ball_integral(&(&weight.laplacian * &grad_sq)),
    );
    b.right("f Ric(grad u, grad u)", Integral::zero(m));
    Ok(b.finish("function-reilly", 0, domain.radius()))
}

/// The Pohozhaev-type identity
/// `∫|dφ|² div F = −∫_Σ|dφ|²⟨F,N⟩ − 2∫⟨i_F dφ, δdφ⟩ + 2∫_Σ⟨J*i_F dφ, i_N dφ⟩ + 2∫⟨∇F(dφ), dφ⟩`.
pub fn verify_pohozhaev<S: Scalar>(
    domain: &BallDomain<S>,
    field: &PolyVectorField<S>,
    phi: &PolyForm<S>,
) -> Result<IdentityReport> {
    let m = domain.dim();
    let dphi = phi.exterior_d()?;
    let two = S::from_i64(2);
    let norm = dphi.norm_sq();
    let i_f = dphi.interior_field(field)?;
    let mut b = Balance::new(m);
    b.left("|d phi|^2 div F", domain.ball_integral(&(&norm * &field.divergence())));
    let f_dot_n = field.dot(&domain.normal_field());
    b.right("-|d phi|^2 <F, N>", -domain.sphere_integral(&(&norm * &f_dot_n)));
    let dd = dphi.codifferential()?;
    b.right(
        "-2 <i_F d phi, delta d phi>",
        domain.ball_integral(&i_f.inner(&dd)?).scale(&(-two.clone())),
    );
    let pairing = domain.boundary_pointwise_inner(&i_f, &domain.contract_normal(&dphi)?)?;
    b.right(
        "2 <J* i_F d phi, i_N d phi>",
        domain.sphere_integral(&pairing).scale(&two),
    );
    b.right(
        "2 <grad F(d phi), d phi>",
        domain
            .ball_integral(&dphi.gradient_action(field)?.inner(&dphi)?)
            .scale(&two),
    );
    Ok(b.finish("pohozhaev", phi.degree(), domain.radius()))
}

/// `δ(df∧ω) − (Δf·ω − ∇_{∇f}ω + ∇²f(ω) − df∧δω)`; the zero form.
pub fn codifferential_of_wedge_residual<S: Scalar>(f: &Polynomial<S>, omega: &PolyForm<S>) -> Result<PolyForm<S>> {
    let m = omega.dim();
    let df = PolyForm::function(m, f.clone()).exterior_d()?;
    let lhs = df.wedge(omega)?.codifferential()?;
    let weight = WeightFunction::from_polynomial(m, f.clone());
    let mut rhs = omega.mul_poly(&weight.laplacian) - omega.directional_derivative(&weight.gradient)?
        + weight.hessian_action(omega)?;
    if omega.degree() > 0 {
        rhs = rhs - df.wedge(&omega.codifferential()?)?;
    }
    Ok(lhs - rhs)
}

/// `d(i_F ω) − (−i_F dω + ∇_F ω + ∇F(ω))`; the zero form.
pub fn interior_derivative_residual<S: Scalar>(field: &PolyVectorField<S>, omega: &PolyForm<S>) -> Result<PolyForm<S>> {
    let lhs = omega.interior_field(field)?.exterior_d()?;
    let mut rhs = omega.directional_derivative(field)? + omega.gradient_action(field)?;
    if omega.degree() < omega.dim() {
        rhs = rhs - omega.exterior_d()?.interior_field(field)?;
    }
    Ok(lhs - rhs)
}

/// `δ(fω) − (−i_{∇f}ω + fδω)`; the zero form.
pub fn codifferential_product_residual<S: Scalar>(f: &Polynomial<S>, omega: &PolyForm<S>) -> Result<PolyForm<S>> {
    let m = omega.dim();
    let lhs = omega.mul_poly(f).codifferential()?;
    let grad = PolyVectorField::gradient(f, m);
    let rhs = omega.codifferential()?.mul_poly(f) - omega.interior_field(&grad)?;
    Ok(lhs - rhs)
}

/// `⟨φ, X♭∧ψ⟩ − ⟨i_Xφ, ψ⟩` for constant forms.
pub fn adjunction_residual<S: Scalar>(phi: &ConstantForm<S>, x: &[S], psi: &ConstantForm<S>) -> Result<S> {
    let xf = Form::from_vector(x);
    let lhs = phi.inner(&xf.wedge(psi)?)?;
    let rhs = phi.interior(x)?.inner(psi)?;
    Ok(lhs - rhs)
}

/// `∫_Σ⟨d^Σα, β⟩ − ∫_Σ⟨α, δ^Σβ⟩` with `δ^Σ` from the ambient normal relations.
pub fn boundary_adjointness_residual<S: Scalar>(
    domain: &BallDomain<S>,
    alpha: &PolyForm<S>,
    beta: &PolyForm<S>,
) -> Result<Integral<S>> {
    let a = BoundaryForm::new(alpha.clone());
    let b = BoundaryForm::new(beta.clone());
    let left = domain.boundary_inner(&domain.boundary_d(&a)?, &b)?;
    let right = domain.boundary_inner(&a, &domain.boundary_delta(&b)?)?;
    Ok(left - right)
}

/// An eigenpair of the Dirichlet-to-Neumann operator: the harmonic,
/// co-closed extension `φ̃` and its eigenvalue `σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DtnEigenform {
    pub extension: PolyForm<Q>,
    pub sigma: Q,
}

/// Which argument to replay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainKind {
    /// Sharp lower bound `σ₁ ≥ (p+1)c` and its equality case.
    Bound,
    /// Comparison `σ_k ≤ λ_k / ((n−p)c)`.
    Comparison,
    /// Non-sharp bound `σ₁ > (p+1)c/2`.
    NonSharp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Equal,
    AtLeast,
    Greater,
}

/// One step of a replayed argument: `lhs relation rhs`, checked exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    pub name: String,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub kind: ChainKind,
    pub m: usize,
    pub p: usize,
    pub radius: String,
    pub sigma: String,
    pub steps: Vec<ChainStep>,
    pub pass: bool,
}

struct Steps(Vec<ChainStep>);

impl Steps {
    fn check(&mut self, name: &str, lhs: &Q, relation: Relation, rhs: &Q) {
        let pass = match relation {
            Relation::Equal => lhs == rhs,
            Relation::AtLeast => lhs >= rhs,
            Relation::Greater => lhs > rhs,
        };
        self.0.push(ChainStep {
            name: name.to_string(),
            lhs: lhs.to_string(),
            relation,
            rhs: rhs.to_string(),
            pass,
        });
    }

    fn flag(&mut self, name: &str, holds: bool) {
        self.check(name, &qi(if holds { 0 } else { 1 }), Relation::Equal, &Q::zero());
    }
}

/// Replays one of the eigenvalue arguments on an explicit eigenform,
/// evaluating every intermediate identity and inequality exactly.
pub fn replay_proof_chain(kind: ChainKind, domain: &BallDomain<Q>, eig: &DtnEigenform) -> Result<ChainReport> {
    let phi = &eig.extension;
    let sigma = &eig.sigma;
    let m = domain.dim();
    let p = phi.degree();
    // the sharp bound covers 1 <= p <= n; the other two need J*dφ ≠ 0, i.e. p <= n - 1
    let top = match kind {
        ChainKind::Bound => m - 1,
        ChainKind::Comparison | ChainKind::NonSharp => m - 2,
    };
    if p == 0 || p > top {
        return Err(Error::InvalidDegree {
            op: "proof replay",
            degree: p,
        });
    }
    let n = qi(domain.boundary_dim() as i64);
    let pq = qi(p as i64);
    let c = domain.curvature();
    let weight = domain.canonical_weight();
    let dphi = phi.exterior_d()?;
    let mut s = Steps(Vec::new());

    s.flag(
        "harmonic extension",
        phi.hodge_laplacian().is_zero() && phi.codifferential()?.is_zero(),
    );
    let i_n_dphi = domain.contract_normal(&dphi)?;
    let eigen_residual = -&i_n_dphi - phi.scale_scalar(sigma);
    let eigen_norm = domain.boundary_norm_sq(&BoundaryForm::new(eigen_residual))?.units;
    s.check(
        "eigen equation -i_N d phi = sigma J*phi",
        &eigen_norm,
        Relation::Equal,
        &Q::zero(),
    );

    let phi_sq = domain.boundary_norm_sq(&BoundaryForm::new(phi.clone()))?.units;
    let tangential = domain.boundary_norm_sq(&BoundaryForm::new(dphi.clone()))?.units;
    let normal = domain.sphere_integral(&i_n_dphi.norm_sq()).units;
    let hess_term = domain.ball_integral(&dphi.inner(&weight.hessian_action(&dphi)?)?).units;
    let lap_term = domain.ball_integral(&(&weight.laplacian * &dphi.norm_sq())).units;
    let weighted_grad = domain.ball_integral(&(&weight.f * &dphi.gradient_norm_sq())).units;
    let dirichlet = domain.ball_integral(&dphi.norm_sq()).units;

    match kind {
        ChainKind::Bound => {
            s.check(
                "weighted Reilly with omega = d phi",
                &tangential,
                Relation::Equal,
                &(&hess_term + &lap_term + &weighted_grad),
            );
            let poh = verify_pohozhaev(domain, &weight.gradient, phi)?;
            s.flag("Pohozhaev identity with F = grad f", poh.pass);
            s.check(
                "Pohozhaev specialization",
                &(&lap_term + &hess_term * qi(2)),
                Relation::Equal,
                &(&tangential - &normal),
            );
            s.check(
                "sum of the two identities",
                &normal,
                Relation::Equal,
                &(-&hess_term + &weighted_grad),
            );
            s.check("normal energy", &normal, Relation::Equal, &(sigma * sigma * &phi_sq));
            s.check("Dirichlet energy", &dirichlet, Relation::Equal, &(sigma * &phi_sq));
            let p1c = (&pq + qi(1)) * &c;
            s.check(
                "Hessian lower bound",
                &(-&hess_term),
                Relation::AtLeast,
                &(&p1c * &dirichlet),
            );
            s.check("sharp bound sigma >= (p+1)c", sigma, Relation::AtLeast, &p1c);
            s.check("equality on the ball", sigma, Relation::Equal, &p1c);
            s.flag(
                "d phi is parallel",
                dphi.covariant_gradient().iter().all(|g| g.is_zero()),
            );
            let rigidity = -&i_n_dphi - phi.scale_scalar(&p1c);
            let rigidity_norm = domain.boundary_norm_sq(&BoundaryForm::new(rigidity))?.units;
            s.check("-i_N d phi = (p+1)c J*phi", &rigidity_norm, Relation::Equal, &Q::zero());
        }
        ChainKind::Comparison => {
            s.check(
                "weighted Reilly with omega = d phi",
                &tangential,
                Relation::Equal,
                &(&hess_term + &lap_term + &weighted_grad),
            );
            let gap = &(&weight.laplacian * &dphi.norm_sq()) + &dphi.inner(&weight.hessian_action(&dphi)?)?
                - dphi.norm_sq().scale(&((&n - &pq) * &c));
            s.flag("pointwise Hessian estimate is an equality", gap.is_zero());
            let factor = (&n - &pq) * &c;
            s.check(
                "boundary energy bound",
                &tangential,
                Relation::AtLeast,
                &(&factor * &dirichlet + &weighted_grad),
            );
            let lambda = &tangential / &phi_sq;
            s.check(
                "sigma (n-p) c <= lambda",
                &lambda,
                Relation::AtLeast,
                &(sigma * &factor),
            );
            s.check("equality on the ball", &lambda, Relation::Equal, &(sigma * &factor));
        }
        ChainKind::NonSharp => {
            let rs = verify_unweighted_reilly(domain, &dphi)?;
            s.flag("unweighted Reilly with omega = d phi", rs.pass);
            let ds = domain.boundary_delta(&BoundaryForm::new(dphi.clone()))?;
            let pairing = domain
                .sphere_integral(&domain.boundary_pointwise_inner(&ds.rep, &i_n_dphi)?)
                .units;
            let b_int = domain.sphere_integral(&domain.b_term(&dphi)?).units;
            let zero_side = domain.ball_integral(&dphi.gradient_norm_sq()).units + &pairing * qi(2) + &b_int;
            s.check(
                "0 = |grad d phi|^2 + 2<delta_S, i_N> + B",
                &zero_side,
                Relation::Equal,
                &Q::zero(),
            );
            s.check(
                "normal trace substitution",
                &pairing,
                Relation::Equal,
                &(-(sigma * &tangential)),
            );
            let alt = domain.b_term(&dphi)? - domain.b_term_alternate(&dphi)?;
            s.flag("alternate boundary form", domain.reduce(&alt).is_zero());
            let p1c = (&pq + qi(1)) * &c;
            s.check(
                "B >= (p+1)c |J* d phi|^2",
                &b_int,
                Relation::AtLeast,
                &(&p1c * &tangential),
            );
            s.check("J* d phi is nonzero", &tangential, Relation::Greater, &Q::zero());
            s.check(
                "strict bound sigma > (p+1)c/2",
                sigma,
                Relation::Greater,
                &(p1c / qi(2)),
            );
        }
    }
    let pass = s.0.iter().all(|st| st.pass);
    Ok(ChainReport {
        kind,
        m,
        p,
        radius: domain.radius().to_string(),
        sigma: sigma.to_string(),
        steps: s.0,
        pass,
    })
}

/// A symmetric matrix `−Σ γ_i e_i e_iᵀ` given by an orthonormal frame and
/// the eigenvalues `γ_i` of its negative.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralHessian {
    /// Column `i` is the eigenvector `e_i`.
    pub frame: Vec<Vec<Q>>,
    pub gammas: Vec<Q>,
}

impl SpectralHessian {
    pub fn isotropic(m: usize, c: &Q) -> Self {
        let frame = (0..m)
            .map(|i| (0..m).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        SpectralHessian {
            frame,
            gammas: vec![c.clone(); m],
        }
    }

    /// Random rotation (Cayley transform of a random skew matrix) and
    /// eigenvalues `γ_i ≥ lower`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, m: usize, lower: &Q) -> Self {
        let mut k = vec![vec![Q::zero(); m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let v = Q::new(rng.random_range(-3..=3).into(), rng.random_range(1..=3).into());
                k[i][j] = v.clone();
                k[j][i] = -v;
            }
        }
        let frame = cayley(&k);
        let gammas = (0..m)
            .map(|_| lower + Q::new(rng.random_range(0..=6).into(), 2.into()))
            .collect();
        SpectralHessian { frame, gammas }
    }

    /// The matrix `Hess = −E diag(γ) Eᵀ`.
    pub fn hessian(&self) -> LinearEndomorphism<Q> {
        let m = self.gammas.len();
        let entries = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        -(0..m).fold(Q::zero(), |acc, i| {
                            acc + &self.gammas[i] * &self.frame[a][i] * &self.frame[b][i]
                        })
                    })
                    .collect()
            })
            .collect();
        LinearEndomorphism::new(entries).expect("square by construction")
    }
}

/// `(I − K)(I + K)⁻¹`, orthogonal for skew `K`.
fn cayley(k: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let m = k.len();
    let id = |i: usize, j: usize| if i == j { Q::one() } else { Q::zero() };
    let plus: Vec<Vec<Q>> = (0..m).map(|i| (0..m).map(|j| id(i, j) + &k[i][j]).collect()).collect();
    let minus: Vec<Vec<Q>> = (0..m).map(|i| (0..m).map(|j| id(i, j) - &k[i][j]).collect()).collect();
    let inv = inverse(&plus).expect("I + K is invertible for skew K");
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (0..m).fold(Q::zero(), |acc, t| acc + &minus[i][t] * &inv[t][j]))
                .collect()
        })
        .collect()
}

/// Result of the pointwise estimate
/// `Δf|η|² + ⟨η, Hess^[q]η⟩ ≥ (n−p)(c−ε)|η|²` for a `q = p+1`-form `η`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HessianEstimateReport {
    /// `−Hess ⪰ (c−ε)·Id`, checked exactly.
    pub precondition: bool,
    pub lhs: String,
    pub bound: String,
    /// Whether the eigenvalue-sum expansion reproduces `lhs` exactly.
    pub expansion_matches: bool,
    pub holds: bool,
    pub equality: bool,
}

pub fn pointwise_hessian_estimate(
    h: &SpectralHessian,
    eta: &ConstantForm<Q>,
    c: &Q,
    eps: &Q,
) -> Result<HessianEstimateReport> {
    let m = h.gammas.len();
    if eta.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: eta.dim(),
        });
    }
    let q = eta.degree();
    let hess = h.hessian();
    let shifted: Vec<Vec<Q>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let id = if a == b { c - eps } else { Q::zero() };
                    -hess.entry(a, b).clone() - id
                })
                .collect()
        })
        .collect();
    let precondition = is_psd(&shifted);
    let lap_f = -hess.trace();
    let norm = eta.norm_sq();
    let lhs = &lap_f * &norm + eta.inner(&hess.lift(q, eta)?)?;
    let bound = qi(m as i64 - q as i64) * (c - eps) * &norm;

    // η in the eigenframe: η(e_I) = Σ_J η_J det(E[J, I])
    let mut expansion = Q::zero();
    let total: Q = h.gammas.iter().fold(Q::zero(), |acc, g| acc + g);
    for big_i in MultiIndex::all(m, q) {
        let mut coeff = Q::zero();
        for (j, v) in eta.terms() {
            let minor: Vec<Vec<Q>> = j
                .indices()
                .map(|r| big_i.indices().map(|col| h.frame[r][col].clone()).collect())
                .collect();
            coeff += v * determinant(&minor);
        }
        let inside: Q = big_i.indices().fold(Q::zero(), |acc, i| acc + &h.gammas[i]);
        expansion += (&total - inside) * &coeff * &coeff;
    }
    Ok(HessianEstimateReport {
        precondition,
        lhs: lhs.to_string(),
        bound: bound.to_string(),
        expansion_matches: expansion == lhs,
        holds: lhs >= bound,
        equality: lhs == bound,
    })
}
