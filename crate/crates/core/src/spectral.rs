//! Harmonic extensions of boundary forms and the spectra of the
//! Dirichlet-to-Neumann maps and the boundary Hodge Laplacian on
//! truncated co-closed trial spaces of the ball.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::ballgeom::{BallDomain, BoundaryForm};
use crate::error::{Error, Result};
use crate::exalg::MultiIndex;
use crate::harmonic::{cached_form_space, monomial_keys, BasisCache, FormSpaceKind};
use crate::identities::DtnEigenform;
use crate::linalg::{
    generalized_eigen, group_eigenvalues, is_symmetric, jacobi_eigen, pencil_nullity, solve, solve_many, sparse_rows,
    to_f64_matrix, SparseRow,
};
use crate::polyform::{Monomial, PolyForm, PolyVectorField, Polynomial};
use crate::scalar::{q_to_f64, qi, rationalize, Q};

/// Absolute tolerance for grouping float eigenvalues into multiplicities.
pub const GROUPING_TOLERANCE: f64 = 1e-7;
/// Agreement required between float eigenvalues and exact targets.
pub const EIGEN_TOLERANCE: f64 = 1e-8;
/// Extra ansatz degree tried beyond the default before giving up.
pub const MAX_DEGREE_ESCALATION: usize = 4;

/// Boundary-value problem defining a harmonic extension `φ̃` of `φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExtensionKind {
    /// `Δφ̃ = 0`, `δφ̃ = 0`, `J*φ̃ = φ`.
    CoClosed,
    /// `Δφ̃ = 0`, `J*φ̃ = φ`, `i_Nφ̃ = 0`.
    NormalFree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionProblem {
    pub kind: ExtensionKind,
    pub datum: BoundaryForm<Q>,
    /// Initial coefficient degree of the polynomial ansatz.
    pub degree: usize,
}

impl ExtensionProblem {
    /// Problem with the default ansatz degree `deg φ + 2`.
    pub fn new(kind: ExtensionKind, datum: BoundaryForm<Q>) -> Self {
        let degree = datum.rep.coefficient_degree().unwrap_or(0) + 2;
        ExtensionProblem { kind, datum, degree }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extension {
    pub form: PolyForm<Q>,
    /// Ansatz degree at which the system became solvable.
    pub degree: usize,
    /// `∫_Σ |J*φ̃ − φ|²` plus `∫_Σ |i_Nφ̃|²` for the normal-free kind.
    pub misfit: Q,
    /// Dimension of the solution set's homogeneous part within the ansatz.
    pub ambiguity: usize,
}

/// Linear constraints on the coefficients of a degree-`≤ L` ansatz.
struct AnsatzSystem {
    keys: Vec<(MultiIndex, Monomial)>,
    rows: Vec<SparseRow>,
    boundary_rows: BTreeMap<(MultiIndex, Monomial), usize>,
}

type RowKey = (u8, MultiIndex, Monomial);

impl AnsatzSystem {
    fn build(
        domain: &BallDomain<Q>,
        kind: ExtensionKind,
        p: usize,
        degree: usize,
        with_boundary: bool,
    ) -> Result<Self> {
        let m = domain.dim();
        let keys: Vec<_> = (0..=degree).flat_map(|d| monomial_keys(m, d, p)).collect();
        let position = PolyVectorField::<Q>::position(m);
        let images: Vec<Vec<(RowKey, Q)>> = keys
            .par_iter()
            .map(|(idx, mono)| -> Result<Vec<(RowKey, Q)>> {
                let mut e = PolyForm::<Q>::zero(m, p);
                e.add_term(idx.clone(), Polynomial::term(mono.clone(), Q::one()));
                let mut out = Vec::new();
                let mut push = |block: u8, form: &PolyForm<Q>| {
                    for (i, c) in form.terms() {
                        for (mo, v) in c.terms() {
                            out.push(((block, i.clone(), mo.clone()), v.clone()));
                        }
                    }
                };
                push(0, &e.hodge_laplacian());
                match kind {
                    ExtensionKind::CoClosed => push(1, &e.codifferential()?),
                    ExtensionKind::NormalFree => {
                        let normal = e.interior_field(&position)?;
                        let reduced = normal.map(|c| domain.reduce(c));
                        push(1, &reduced);
                    }
                }
                if with_boundary {
                    for ((i, mo), v) in domain.boundary_coordinates(&e) {
                        out.push(((2, i, mo), v));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut index: BTreeMap<RowKey, SparseRow> = BTreeMap::new();
        for (j, image) in images.into_iter().enumerate() {
            for (key, v) in image {
                index.entry(key).or_default().insert(j, v);
            }
        }
        let mut rows = Vec::with_capacity(index.len());
        let mut boundary_rows = BTreeMap::new();
        for ((block, i, mo), row) in index {
            if block == 2 {
                boundary_rows.insert((i, mo), rows.len());
            }
            rows.push(row);
        }
        Ok(AnsatzSystem {
            keys,
            rows,
            boundary_rows,
        })
    }

    /// Right-hand side for `J*φ̃ = φ`, or `None` when the datum has a
    /// boundary coordinate outside the ansatz's reach.
    fn rhs(&self, domain: &BallDomain<Q>, datum: &PolyForm<Q>) -> Option<SparseRow> {
        let mut b = SparseRow::new();
        for (key, v) in domain.boundary_coordinates(datum) {
            b.insert(*self.boundary_rows.get(&key)?, v);
        }
        Some(b)
    }

    fn assemble(&self, m: usize, p: usize, x: &[Q]) -> PolyForm<Q> {
        let mut form = PolyForm::zero(m, p);
        for ((idx, mono), c) in self.keys.iter().zip(x) {
            if !c.is_zero() {
                form.add_term(idx.clone(), Polynomial::term(mono.clone(), c.clone()));
            }
        }
        form
    }
}

fn misfit(domain: &BallDomain<Q>, kind: ExtensionKind, ext: &PolyForm<Q>, datum: &PolyForm<Q>) -> Result<Q> {
    let gap = domain.boundary_norm_sq(&BoundaryForm::new(ext - datum))?.units;
    Ok(match kind {
        ExtensionKind::CoClosed => gap,
        ExtensionKind::NormalFree => gap + domain.sphere_integral(&domain.contract_normal(ext)?.norm_sq()).units,
    })
}

/// Smallest boundary misfit reachable by ansatz forms satisfying the
/// interior constraints, found by an exact Gram-matrix least-squares solve.
fn least_squares_misfit(domain: &BallDomain<Q>, kind: ExtensionKind, datum: &PolyForm<Q>, degree: usize) -> Result<Q> {
    let m = domain.dim();
    let p = datum.degree();
    let sys = AnsatzSystem::build(domain, kind, p, degree, false)?;
    let (_, nullspace) = solve_many(&sys.rows, &[], sys.keys.len());
    let trial: Vec<PolyForm<Q>> = nullspace.iter().map(|v| sys.assemble(m, p, v)).collect();
    let energy = |a: &PolyForm<Q>, b: &PolyForm<Q>| -> Result<Q> {
        let mut v = domain
            .boundary_inner(&BoundaryForm::new(a.clone()), &BoundaryForm::new(b.clone()))?
            .units;
        if kind == ExtensionKind::NormalFree {
            let na = domain.contract_normal(a)?;
            let nb = domain.contract_normal(b)?;
            v += domain.sphere_integral(&na.inner(&nb)?).units;
        }
        Ok(v)
    };
    let n = trial.len();
    let mut gram = vec![vec![Q::zero(); n]; n];
    let mut h = vec![Q::zero(); n];
    for i in 0..n {
        for j in i..n {
            let v = energy(&trial[i], &trial[j])?;
            gram[j][i] = v.clone();
            gram[i][j] = v;
        }
        h[i] = domain
            .boundary_inner(&BoundaryForm::new(trial[i].clone()), &BoundaryForm::new(datum.clone()))?
            .units;
    }
    let total = domain.boundary_norm_sq(&BoundaryForm::new(datum.clone()))?.units;
    let y = solve(&sparse_rows(&gram), &h, n).expect("normal equations are consistent");
    let explained = h.iter().zip(&y.particular).fold(Q::zero(), |acc, (a, b)| acc + a * b);
    Ok(total - explained)
}

/// Solves a batch of extension problems of one kind and form degree,
/// sharing the elimination. The ansatz degree starts at `degree` and rises
/// by two until every problem is solvable, at most
/// [`MAX_DEGREE_ESCALATION`] above the start.
pub fn extend_all(
    domain: &BallDomain<Q>,
    kind: ExtensionKind,
    data: &[PolyForm<Q>],
    degree: usize,
) -> Result<Vec<Extension>> {
    let Some(first) = data.first() else {
        return Ok(Vec::new());
    };
    let m = domain.dim();
    let p = first.degree();
    if p == 0 || p >= m {
        return Err(Error::InvalidDegree {
            op: "harmonic extension",
            degree: p,
        });
    }
    let mut level = degree;
    loop {
        let sys = AnsatzSystem::build(domain, kind, p, level, true)?;
        let rhs: Option<Vec<SparseRow>> = data.iter().map(|d| sys.rhs(domain, d)).collect();
        if let Some(rhs) = rhs {
            let (solutions, nullspace) = solve_many(&sys.rows, &rhs, sys.keys.len());
            if solutions.iter().all(Option::is_some) {
                return solutions
                    .into_iter()
                    .zip(data)
                    .map(|(x, datum)| {
                        let form = sys.assemble(m, p, &x.expect("checked above"));
                        let misfit = misfit(domain, kind, &form, datum)?;
                        Ok(Extension {
                            form,
                            degree: level,
                            misfit,
                            ambiguity: nullspace.len(),
                        })
                    })
                    .collect();
            }
        }
        if level >= degree + MAX_DEGREE_ESCALATION {
            let mut worst = Q::zero();
            for d in data {
                let r = least_squares_misfit(domain, kind, d, level)?;
                if r > worst {
                    worst = r;
                }
            }
            return Err(Error::AnsatzInsufficient {
                degree: level,
                misfit: q_to_f64(&worst),
            });
        }
        level += 2;
    }
}

/// Solves one extension problem.
pub fn extend(domain: &BallDomain<Q>, problem: &ExtensionProblem) -> Result<Extension> {
    let mut out = extend_all(
        domain,
        problem.kind,
        std::slice::from_ref(&problem.datum.rep),
        problem.degree,
    )?;
    Ok(out.remove(0))
}

/// Operators whose boundary spectra are assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    /// `Dφ = −i_N dφ̃` with the co-closed harmonic extension.
    D,
    /// `Tφ = −i_N dφ̃` with the normal-free harmonic extension.
    T,
    /// `Δ_Σ = d^Σδ^Σ + δ^Σd^Σ`.
    HodgeBoundary,
}

impl OperatorKind {
    pub fn label(self) -> &'static str {
        match self {
            OperatorKind::D => "D",
            OperatorKind::T => "T",
            OperatorKind::HodgeBoundary => "HodgeBoundary",
        }
    }

    /// Power of `1/R` carried by the eigenvalues.
    pub fn scaling_exponent(self) -> i32 {
        match self {
            OperatorKind::HodgeBoundary => 2,
            _ => 1,
        }
    }

    fn blocks(self) -> &'static [FormSpaceKind] {
        match self {
            OperatorKind::D => &[FormSpaceKind::NormalNull],
            _ => &[FormSpaceKind::Closed, FormSpaceKind::NormalNull],
        }
    }
}

/// Closed-form eigenvalue of `op` on the trial block with label `l`:
/// `J*H′_{l−1,p}` for [`FormSpaceKind::Closed`], `J*H″_{l,p}` for
/// [`FormSpaceKind::NormalNull`].
pub fn block_eigenvalue(op: OperatorKind, m: usize, p: usize, l: usize, space: FormSpaceKind, c: &Q) -> Q {
    let n = qi(m as i64 - 1);
    let (l, p) = (qi(l as i64), qi(p as i64));
    let one = Q::one();
    let two = qi(2);
    match (op, space) {
        (OperatorKind::HodgeBoundary, FormSpaceKind::Closed) => (&l + &p - &one) * (&n + &l - &p) * c * c,
        (OperatorKind::HodgeBoundary, _) => (&l + &p) * (&n + &l - &p - &one) * c * c,
        (OperatorKind::T, FormSpaceKind::Closed) => {
            (&l + &p - &one) * (&n + &two * &l + &one) / (&n + &two * &l - &one) * c
        }
        _ => (l + p) * c,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenGroup {
    pub value: f64,
    pub multiplicity: usize,
}

/// Exact check that `θ` is an eigenvalue of the pencil `(A, G)` with the
/// given multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub theta: String,
    pub expected: usize,
    pub nullity: usize,
    pub pass: bool,
}

impl Certificate {
    pub fn into_result(self) -> Result<Self> {
        if self.pass {
            Ok(self)
        } else {
            Err(Error::CertificationMismatch {
                expected: self.expected,
                actual: self.nullity,
            })
        }
    }
}

pub fn certify_eigenvalue(a: &[Vec<Q>], g: &[Vec<Q>], theta: &Q, expected: usize) -> Certificate {
    let nullity = pencil_nullity(a, g, theta);
    Certificate {
        theta: theta.to_string(),
        expected,
        nullity,
        pass: nullity == expected,
    }
}

/// Spectrum of one trial block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockReport {
    pub l: usize,
    pub space: FormSpaceKind,
    /// Coefficient degree of the block's forms.
    pub degree: usize,
    pub dim: usize,
    pub expected: String,
    pub expected_f64: f64,
    pub eigenvalues: Vec<EigenGroup>,
    pub max_deviation: f64,
    pub certificate: Certificate,
    /// Ansatz degree used by the extension solver, when one was needed.
    pub extension_degree: Option<usize>,
    pub extension_misfit: Option<String>,
}

/// A rationalized merged eigenvalue and its exact multiplicity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalEigenvalue {
    pub value: f64,
    pub multiplicity: usize,
    pub rational: String,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub operator: OperatorKind,
    pub m: usize,
    pub p: usize,
    pub radius: String,
    pub l_max: usize,
    /// Merged spectrum over all blocks, ascending.
    pub eigenvalues: Vec<EigenGroup>,
    /// Spectrum restricted to the co-closed blocks `J*H″_{l,p}`, ascending
    /// and listed with multiplicity.
    pub coclosed: Vec<f64>,
    pub blocks: Vec<BlockReport>,
    pub rational: Vec<RationalEigenvalue>,
    pub symmetric: bool,
    /// Whether every `J*H″` trial form is co-closed on the sphere.
    pub coclosed_trial: bool,
    /// Ratio of the extreme eigenvalues of the Gram matrix.
    pub gram_condition: f64,
    pub certified: bool,
    #[serde(skip)]
    pub stiffness: Vec<Vec<Q>>,
    #[serde(skip)]
    pub gram: Vec<Vec<Q>>,
}

impl SpectrumReport {
    /// Eigenvalues listed with multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .flat_map(|g| std::iter::repeat_n(g.value, g.multiplicity))
            .collect()
    }

    pub fn first(&self) -> Option<f64> {
        self.eigenvalues.first().map(|g| g.value)
    }
}

fn sub_matrix(a: &[Vec<Q>], idx: &[usize]) -> Vec<Vec<Q>> {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect())
        .collect()
}

fn float_spectrum(a: &[Vec<Q>], g: &[Vec<Q>]) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    Ok(generalized_eigen(&to_f64_matrix(a), &to_f64_matrix(g))?.0)
}

struct Trial {
    l: usize,
    space: FormSpaceKind,
    degree: usize,
    forms: Vec<PolyForm<Q>>,
    extensions: Option<Vec<Extension>>,
}

fn symmetric_matrix<F>(n: usize, entry: F) -> Result<Vec<Vec<Q>>>
where
    F: Fn(usize, usize) -> Result<Q> + Sync,
{
    let rows: Vec<Vec<Q>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| entry(i, j)).collect::<Result<Vec<Q>>>())
        .collect::<Result<_>>()?;
    Ok(rows)
}

/// Assembles `op` on `⊕_{l=1..l_max}` of its trial blocks and solves the
/// generalized eigenproblem `A v = θ G v`.
pub fn assemble_operator(
    op: OperatorKind,
    domain: &BallDomain<Q>,
    p: usize,
    l_max: usize,
    cache: Option<&BasisCache>,
) -> Result<SpectrumReport> {
    let m = domain.dim();
    if p == 0 || p >= m {
        return Err(Error::InvalidDegree {
            op: "operator assembly",
            degree: p,
        });
    }
    if l_max == 0 {
        return Err(Error::Config("l_max must be at least 1".into()));
    }
    let c = domain.curvature();
    let mut trials = Vec::new();
    for l in 1..=l_max {
        for &space in op.blocks() {
            let degree = if space == FormSpaceKind::Closed { l - 1 } else { l };
            let basis = cached_form_space(cache, m, degree, p, space)?;
            if basis.is_empty() {
                continue;
            }
            let extensions = match op {
                OperatorKind::D => Some(extend_all(domain, ExtensionKind::CoClosed, &basis.basis, degree + 2)?),
                OperatorKind::T => Some(extend_all(domain, ExtensionKind::NormalFree, &basis.basis, degree + 2)?),
                OperatorKind::HodgeBoundary => None,
            };
            trials.push(Trial {
                l,
                space,
                degree,
                forms: basis.basis,
                extensions,
            });
        }
    }
    let forms: Vec<&PolyForm<Q>> = trials.iter().flat_map(|t| &t.forms).collect();
    let n = forms.len();
    let bf = |w: &PolyForm<Q>| BoundaryForm::new(w.clone());

    let coclosed_trial = trials
        .iter()
        .filter(|t| t.space == FormSpaceKind::NormalNull)
        .flat_map(|t| &t.forms)
        .map(|w| domain.boundary_delta(&bf(w)).and_then(|d| domain.boundary_norm_sq(&d)))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|v| v.is_zero());

    let gram = symmetric_matrix(n, |i, j| Ok(domain.boundary_inner(&bf(forms[i]), &bf(forms[j]))?.units))?;
    let stiffness = match op {
        OperatorKind::D | OperatorKind::T => {
            let ext: Vec<&PolyForm<Q>> = trials
                .iter()
                .flat_map(|t| t.extensions.as_ref().expect("extended above"))
                .map(|e| &e.form)
                .collect();
            let neumann: Vec<PolyForm<Q>> = ext
                .par_iter()
                .map(|e| Ok(-domain.contract_normal(&e.exterior_d()?)?))
                .collect::<Result<_>>()?;
            if op == OperatorKind::D {
                symmetric_matrix(n, |i, j| {
                    Ok(domain
                        .sphere_integral(&domain.boundary_pointwise_inner(&neumann[i], forms[j])?)
                        .units)
                })?
            } else {
                let d: Vec<PolyForm<Q>> = ext.iter().map(|e| e.exterior_d()).collect::<Result<_>>()?;
                let delta: Vec<PolyForm<Q>> = ext.iter().map(|e| e.codifferential()).collect::<Result<_>>()?;
                symmetric_matrix(n, |i, j| {
                    let density = d[i].inner(&d[j])? + delta[i].inner(&delta[j])?;
                    Ok(domain.ball_integral(&density).units)
                })?
            }
        }
        OperatorKind::HodgeBoundary => {
            let ds: Vec<Option<BoundaryForm<Q>>> = forms
                .iter()
                .map(|w| {
                    if p + 2 <= m {
                        domain.boundary_d(&bf(w)).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<_>>()?;
            let deltas: Vec<BoundaryForm<Q>> = forms
                .iter()
                .map(|w| domain.boundary_delta(&bf(w)))
                .collect::<Result<_>>()?;
            symmetric_matrix(n, |i, j| {
                let mut v = domain.boundary_inner(&deltas[i], &deltas[j])?.units;
                if let (Some(a), Some(b)) = (&ds[i], &ds[j]) {
                    v += domain.boundary_inner(a, b)?.units;
                }
                Ok(v)
            })?
        }
    };
    let symmetric = is_symmetric(&stiffness);

    let values = float_spectrum(&stiffness, &gram)?;
    let (gram_values, _) = jacobi_eigen(&to_f64_matrix(&gram), 1e-14);
    let gram_condition = match (gram_values.first(), gram_values.last()) {
        (Some(lo), Some(hi)) if *lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    };
    let eigenvalues: Vec<EigenGroup> = group_eigenvalues(&values, GROUPING_TOLERANCE)
        .into_iter()
        .map(|(value, multiplicity)| EigenGroup { value, multiplicity })
        .collect();

    let mut blocks = Vec::new();
    let mut offset = 0;
    let mut coclosed_idx = Vec::new();
    for t in &trials {
        let idx: Vec<usize> = (offset..offset + t.forms.len()).collect();
        offset += t.forms.len();
        if t.space == FormSpaceKind::NormalNull {
            coclosed_idx.extend(idx.iter().copied());
        }
        let a = sub_matrix(&stiffness, &idx);
        let g = sub_matrix(&gram, &idx);
        let expected = block_eigenvalue(op, m, p, t.l, t.space, &c);
        let expected_f64 = q_to_f64(&expected);
        let vals = float_spectrum(&a, &g)?;
        let max_deviation = vals.iter().map(|v| (v - expected_f64).abs()).fold(0.0, f64::max);
        blocks.push(BlockReport {
            l: t.l,
            space: t.space,
            degree: t.degree,
            dim: t.forms.len(),
            expected: expected.to_string(),
            expected_f64,
            eigenvalues: group_eigenvalues(&vals, GROUPING_TOLERANCE)
                .into_iter()
                .map(|(value, multiplicity)| EigenGroup { value, multiplicity })
                .collect(),
            max_deviation,
            certificate: certify_eigenvalue(&a, &g, &expected, t.forms.len()),
            extension_degree: t.extensions.as_ref().and_then(|e| e.iter().map(|x| x.degree).max()),
            extension_misfit: t.extensions.as_ref().map(|e| {
                e.iter()
                    .map(|x| x.misfit.clone())
                    .max()
                    .unwrap_or_else(Q::zero)
                    .to_string()
            }),
        });
    }
    let coclosed = float_spectrum(
        &sub_matrix(&stiffness, &coclosed_idx),
        &sub_matrix(&gram, &coclosed_idx),
    )?;

    let rational: Vec<RationalEigenvalue> = eigenvalues
        .par_iter()
        .map(|g| {
            let theta = rationalize(g.value, 10_000);
            RationalEigenvalue {
                value: g.value,
                multiplicity: g.multiplicity,
                rational: theta.to_string(),
                certificate: certify_eigenvalue(&stiffness, &gram, &theta, g.multiplicity),
            }
        })
        .collect();

    let certified = symmetric
        && coclosed_trial
        && blocks
            .iter()
            .all(|b| b.certificate.pass && b.max_deviation <= EIGEN_TOLERANCE)
        && rational.iter().all(|r| r.certificate.pass)
        && eigenvalues.iter().all(|g| {
            blocks
                .iter()
                .any(|b| (g.value - b.expected_f64).abs() <= EIGEN_TOLERANCE)
        });

    Ok(SpectrumReport {
        operator: op,
        m,
        p,
        radius: domain.radius().to_string(),
        l_max,
        eigenvalues,
        coclosed,
        blocks,
        rational,
        symmetric,
        coclosed_trial,
        gram_condition,
        certified,
        stiffness,
        gram,
    })
}

/// Eigenforms of `D` on `J*H″_{l,p}` with their extensions, each checked
/// against `−i_N dφ̃ = (p+l)c J*φ` exactly.
pub fn dtn_eigenforms(
    domain: &BallDomain<Q>,
    p: usize,
    l: usize,
    cache: Option<&BasisCache>,
) -> Result<Vec<DtnEigenform>> {
    let m = domain.dim();
    let basis = cached_form_space(cache, m, l, p, FormSpaceKind::NormalNull)?;
    if basis.is_empty() {
        return Err(Error::MissingEigenform(format!(
            "J*H''_{{{l},{p}}} is empty for m = {m}"
        )));
    }
    let sigma = block_eigenvalue(OperatorKind::D, m, p, l, FormSpaceKind::NormalNull, &domain.curvature());
    let ext = extend_all(domain, ExtensionKind::CoClosed, &basis.basis, l + 2)?;
    ext.into_iter()
        .zip(&basis.basis)
        .map(|(e, datum)| {
            let residual = -domain.contract_normal(&e.form.exterior_d()?)? - datum.scale_scalar(&sigma);
            if !domain.boundary_norm_sq(&BoundaryForm::new(residual))?.is_zero() {
                return Err(Error::MissingEigenform(format!(
                    "extension of a J*H''_{{{l},{p}}} basis form is not an eigenform"
                )));
            }
            Ok(DtnEigenform {
                extension: e.form,
                sigma: sigma.clone(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundRelation {
    AtLeast,
    Greater,
    Equal,
}

/// One inequality or equality between computed spectral quantities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub relation: BoundRelation,
    pub rhs: f64,
    /// Exact confirmation by pencil nullity, where applicable.
    pub exact: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub m: usize,
    pub p: usize,
    pub radius: String,
    pub checks: Vec<BoundCheck>,
    pub pass: bool,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Checks the eigenvalue inequalities on the ball:
/// `σ₁ ≥ (p+1)c` with equality, `σ_k (n−p)c ≤ λ_k` with equality for
/// `k ≤ C(n+1, p+1)`, `σ₁ > (p+1)c/2`, and `ν₁ ≤ σ₁`.
pub fn check_bounds(d: &SpectrumReport, t: &SpectrumReport, h: &SpectrumReport) -> Result<BoundsReport> {
    let (m, p) = (d.m, d.p);
    if (t.m, t.p, &t.radius) != (m, p, &d.radius) || (h.m, h.p, &h.radius) != (m, p, &d.radius) {
        return Err(Error::Config("spectrum reports disagree on (m, p, R)".into()));
    }
    let n = m - 1;
    let radius: Q = d
        .radius
        .parse()
        .map_err(|_| Error::Config(format!("bad radius {}", d.radius)))?;
    let c = Q::one() / radius;
    let sharp = (qi(p as i64) + Q::one()) * &c;
    let sharp_f = q_to_f64(&sharp);
    let sigma = d.expanded();
    let nu = t.expanded();
    let sigma1 = *sigma
        .first()
        .ok_or_else(|| Error::MissingEigenform("empty D spectrum".into()))?;
    let nu1 = *nu
        .first()
        .ok_or_else(|| Error::MissingEigenform("empty T spectrum".into()))?;
    let mut checks = Vec::new();
    let mut push = |name: String, lhs: f64, relation, rhs: f64, exact: Option<bool>| {
        let pass = match relation {
            BoundRelation::AtLeast => lhs >= rhs - EIGEN_TOLERANCE,
            BoundRelation::Greater => lhs > rhs,
            BoundRelation::Equal => (lhs - rhs).abs() <= EIGEN_TOLERANCE,
        } && exact.unwrap_or(true);
        checks.push(BoundCheck {
            name,
            lhs,
            relation,
            rhs,
            exact,
            pass,
        });
    };
    let mult = binomial(n + 1, p + 1);
    let sharp_cert = pencil_nullity(&d.stiffness, &d.gram, &sharp) == mult;
    push(
        "sigma_1 >= (p+1)c".into(),
        sigma1,
        BoundRelation::AtLeast,
        sharp_f,
        None,
    );
    push(
        "sigma_1 = (p+1)c on the ball".into(),
        sigma1,
        BoundRelation::Equal,
        sharp_f,
        Some(sharp_cert),
    );
    push(
        "sigma_1 > (p+1)c/2".into(),
        sigma1,
        BoundRelation::Greater,
        sharp_f / 2.0,
        None,
    );
    push("nu_1 <= sigma_1".into(), sigma1, BoundRelation::AtLeast, nu1, None);
    if p < n {
        let factor = (qi(n as i64) - qi(p as i64)) * &c;
        let factor_f = q_to_f64(&factor);
        let lambda = &h.coclosed;
        let coclosed_idx: Vec<usize> = {
            let mut idx = Vec::new();
            let mut offset = 0;
            for b in &h.blocks {
                if b.space == FormSpaceKind::NormalNull {
                    idx.extend(offset..offset + b.dim);
                }
                offset += b.dim;
            }
            idx
        };
        let lambda_cert = pencil_nullity(
            &sub_matrix(&h.stiffness, &coclosed_idx),
            &sub_matrix(&h.gram, &coclosed_idx),
            &(&sharp * &factor),
        ) >= mult;
        for k in 0..sigma.len().min(lambda.len()) {
            let lhs = sigma[k] * factor_f;
            if k < mult {
                push(
                    format!("sigma_{} (n-p)c = lambda_{}", k + 1, k + 1),
                    lhs,
                    BoundRelation::Equal,
                    lambda[k],
                    Some(sharp_cert && lambda_cert),
                );
            } else {
                push(
                    format!("sigma_{} (n-p)c <= lambda_{}", k + 1, k + 1),
                    lambda[k],
                    BoundRelation::AtLeast,
                    lhs,
                    None,
                );
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(BoundsReport {
        m,
        p,
        radius: d.radius.clone(),
        checks,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub operator: OperatorKind,
    pub radius: String,
    pub exponent: i32,
    pub max_relative_error: f64,
    pub pass: bool,
}

/// Compares a spectrum at radius `R` with the unit-radius one under
/// `θ(R) = θ(1)/R^e`.
pub fn scaling_check(unit: &SpectrumReport, scaled: &SpectrumReport) -> Result<ScalingReport> {
    if unit.operator != scaled.operator || unit.m != scaled.m || unit.p != scaled.p || unit.l_max != scaled.l_max {
        return Err(Error::Config(
            "scaling check needs matching operator, m, p and l_max".into(),
        ));
    }
    let radius: Q = scaled
        .radius
        .parse()
        .map_err(|_| Error::Config(format!("bad radius {}", scaled.radius)))?;
    let e = unit.operator.scaling_exponent();
    let r = q_to_f64(&radius).powi(e);
    let a = unit.expanded();
    let b = scaled.expanded();
    let max_relative_error = if a.len() != b.len() {
        f64::INFINITY
    } else {
        a.iter()
            .zip(&b)
            .map(|(x, y)| (y * r - x).abs() / x.abs().max(1.0))
            .fold(0.0, f64::max)
    };
    Ok(ScalingReport {
        operator: unit.operator,
        radius: scaled.radius.clone(),
        exponent: e,
        max_relative_error,
        pass: max_relative_error <= 1e-10,
    })
}
