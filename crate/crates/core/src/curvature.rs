//! Pointwise curvature of a metric given in a single chart: Christoffel
//! symbols, the Riemann tensor, the Weitzenböck operator on `Λ^p`, a
//! finite-difference Bochner check, and the lower bound of `W^[p]` by the curvature operator.
//!
//! Tensors are evaluated in `f64`. Metric derivatives are analytic; only
//! the second derivatives inside the Bochner check use finite differences.

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exalg::{Form, MultiIndex};
use crate::linalg::{cholesky, jacobi_eigen};
use crate::polyform::{PolyForm, Polynomial};
use crate::scalar::{q_to_f64, Q};

type Matrix = Vec<Vec<f64>>;
type Tensor3 = Vec<Vec<Vec<f64>>>;
type Tensor4 = Vec<Vec<Vec<Vec<f64>>>>;

/// Admissible finite-difference steps.
pub const STEP_RANGE: (f64, f64) = (1e-4, 1e-2);
pub const DEFAULT_STEP: f64 = 1e-3;

/// A Riemannian metric on a coordinate chart.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartMetric {
    /// Polynomial components `g_ij`.
    Polynomial(Vec<Vec<Polynomial<Q>>>),
    /// The unit round sphere in stereographic coordinates, `4δ/(1+|u|²)²`.
    RoundSphere { m: usize },
}

/// Metric components and their first two derivatives at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet {
    pub g: Vec<Vec<f64>>,
    /// `dg[k][i][j] = ∂_k g_ij`
    pub dg: Vec<Vec<Vec<f64>>>,
    /// `ddg[k][l][i][j] = ∂_k ∂_l g_ij`
    pub ddg: Vec<Vec<Vec<Vec<f64>>>>,
}

impl ChartMetric {
    pub fn flat(m: usize) -> Self {
        Self::scaled_flat(m, Q::from_integer(1.into()))
    }

    /// The constant metric `a·δ`.
    pub fn scaled_flat(m: usize, a: Q) -> Self {
        let g = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            Polynomial::constant(a.clone())
                        } else {
                            Polynomial::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        ChartMetric::Polynomial(g)
    }

    pub fn round_sphere(m: usize) -> Self {
        ChartMetric::RoundSphere { m }
    }

    /// Polynomial metric; the component matrix must be square and symmetric.
    pub fn polynomial(g: Vec<Vec<Polynomial<Q>>>) -> Result<Self> {
        let m = g.len();
        if let Some(row) = g.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: row.len(),
            });
        }
        if (0..m).any(|i| (0..i).any(|j| g[i][j] != g[j][i])) {
            return Err(Error::DegenerateMetric);
        }
        Ok(ChartMetric::Polynomial(g))
    }

    pub fn dim(&self) -> usize {
        match self {
            ChartMetric::Polynomial(g) => g.len(),
            ChartMetric::RoundSphere { m } => *m,
        }
    }

    pub fn jet(&self, x: &[f64]) -> MetricJet {
        let m = self.dim();
        match self {
            ChartMetric::Polynomial(g) => {
                let at = |p: &Polynomial<Q>| p.convert(q_to_f64).eval_f64(x);
                let gv = g.iter().map(|r| r.iter().map(at).collect()).collect();
                let dg = (0..m)
                    .map(|k| {
                        g.iter()
                            .map(|r| r.iter().map(|p| at(&p.derivative(k))).collect())
                            .collect()
                    })
                    .collect();
                let ddg = (0..m)
                    .map(|k| {
                        (0..m)
                            .map(|l| {
                                g.iter()
                                    .map(|r| r.iter().map(|p| at(&p.derivative(k).derivative(l))).collect())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                MetricJet { g: gv, dg, ddg }
            }
            ChartMetric::RoundSphere { .. } => {
                let s: f64 = x.iter().map(|v| v * v).sum();
                let w = 1.0 + s;
                let phi = 4.0 / (w * w);
                let dphi: Vec<f64> = x.iter().map(|u| -16.0 * u / w.powi(3)).collect();
                let ddphi = |k: usize, l: usize| {
                    let diag = if k == l { -16.0 / w.powi(3) } else { 0.0 };
                    diag + 96.0 * x[k] * x[l] / w.powi(4)
                };
                let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                MetricJet {
                    g: (0..m).map(|i| (0..m).map(|j| phi * delta(i, j)).collect()).collect(),
                    dg: (0..m)
                        .map(|k| {
                            (0..m)
                                .map(|i| (0..m).map(|j| dphi[k] * delta(i, j)).collect())
                                .collect()
                        })
                        .collect(),
                    ddg: (0..m)
                        .map(|k| {
                            (0..m)
                                .map(|l| {
                                    (0..m)
                                        .map(|i| (0..m).map(|j| ddphi(k, l) * delta(i, j)).collect())
                                        .collect()
                                })
                                .collect()
                        })
                        .collect(),
                }
            }
        }
    }
}

fn invert(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let l = cholesky(a).map_err(|_| Error::DegenerateMetric)?;
    // A⁻¹ = L⁻ᵀ L⁻¹
    let linv = lower_inverse(&l);
    Ok((0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| linv[k][i] * linv[k][j]).sum()).collect())
        .collect())
}

fn lower_inverse(l: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = l.len();
    let mut inv = vec![vec![0.0; n]; n];
    for j in 0..n {
        inv[j][j] = 1.0 / l[j][j];
        for i in j + 1..n {
            let s: f64 = (j..i).map(|k| l[i][k] * inv[k][j]).sum();
            inv[i][j] = -s / l[i][i];
        }
    }
    inv
}

fn det(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let Some(piv) = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())) else {
            return 1.0;
        };
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        d *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for k in c..n {
                m[i][k] -= f * m[c][k];
            }
        }
    }
    d
}

fn minor(a: &[Vec<f64>], rows: &MultiIndex, cols: &MultiIndex) -> f64 {
    let sub: Vec<Vec<f64>> = rows
        .indices()
        .map(|r| cols.indices().map(|c| a[r][c]).collect())
        .collect();
    det(&sub)
}

/// Curvature quantities at one point of the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData {
    pub point: Vec<f64>,
    pub metric: Vec<Vec<f64>>,
    pub inverse: Vec<Vec<f64>>,
    /// `christoffel[l][j][k] = Γ^l_jk`
    pub christoffel: Vec<Vec<Vec<f64>>>,
    /// `riemann[i][j][k][l] = g(R(∂_i, ∂_j)∂_k, ∂_l)` with
    /// `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`.
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    /// Orthonormal frame, `e_a = Σ_i frame[i][a] ∂_i`.
    pub frame: Vec<Vec<f64>>,
    /// `Σ_i coframe[a][i] dx_i = e^a`.
    pub coframe: Vec<Vec<f64>>,
    /// The Riemann tensor in the orthonormal frame.
    pub frame_riemann: Vec<Vec<Vec<Vec<f64>>>>,
    /// Largest violation among the antisymmetries, pair symmetry and the
    /// first Bianchi identity, relative to the largest component.
    pub symmetry_defect: f64,
}

fn tensor4(m: usize) -> Vec<Vec<Vec<Vec<f64>>>> {
    vec![vec![vec![vec![0.0; m]; m]; m]; m]
}

/// Christoffel symbols and their first derivatives from a metric jet.
fn christoffel_jet(jet: &MetricJet) -> Result<(Matrix, Tensor3, Tensor4)> {
    let m = jet.g.len();
    let ginv = invert(&jet.g)?;
    let first = |j: usize, k: usize, a: usize| 0.5 * (jet.dg[j][a][k] + jet.dg[k][a][j] - jet.dg[a][j][k]);
    let mut gamma = vec![vec![vec![0.0; m]; m]; m];
    for l in 0..m {
        for j in 0..m {
            for k in 0..m {
                gamma[l][j][k] = (0..m).map(|a| ginv[l][a] * first(j, k, a)).sum();
            }
        }
    }
    // ∂_i g^{la} = −g^{lb} ∂_i g_bc g^{ca}
    let dginv: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|l| {
                    (0..m)
                        .map(|a| {
                            let mut s = 0.0;
                            for b in 0..m {
                                for c in 0..m {
                                    s -= ginv[l][b] * jet.dg[i][b][c] * ginv[c][a];
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut dgamma = tensor4(m);
    for i in 0..m {
        for l in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut s = 0.0;
                    for a in 0..m {
                        let d_first = 0.5 * (jet.ddg[i][j][a][k] + jet.ddg[i][k][a][j] - jet.ddg[i][a][j][k]);
                        s += dginv[i][l][a] * first(j, k, a) + ginv[l][a] * d_first;
                    }
                    dgamma[i][l][j][k] = s;
                }
            }
        }
    }
    Ok((ginv, gamma, dgamma))
}

fn christoffel_at(metric: &ChartMetric, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    Ok(christoffel_jet(&metric.jet(x))?.1)
}

pub fn curvature_at(metric: &ChartMetric, point: &[f64]) -> Result<CurvatureData> {
    let m = metric.dim();
    if point.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: point.len(),
        });
    }
    let jet = metric.jet(point);
    let (ginv, gamma, dgamma) = christoffel_jet(&jet)?;
    let mut up = tensor4(m); // up[l][i][j][k] = R^l_ijk
    for l in 0..m {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut s = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for a in 0..m {
                        s += gamma[l][i][a] * gamma[a][j][k] - gamma[l][j][a] * gamma[a][i][k];
                    }
                    up[l][i][j][k] = s;
                }
            }
        }
    }
    let mut riemann = tensor4(m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    riemann[i][j][k][l] = (0..m).map(|a| jet.g[l][a] * up[a][i][j][k]).sum();
                }
            }
        }
    }
    let l = cholesky(&jet.g).map_err(|_| Error::DegenerateMetric)?;
    let linv = lower_inverse(&l);
    let frame: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|a| linv[a][i]).collect()).collect();
    let coframe: Vec<Vec<f64>> = (0..m).map(|a| (0..m).map(|i| l[i][a]).collect()).collect();
    let mut frame_riemann = tensor4(m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut s = 0.0;
                    for i in 0..m {
                        for j in 0..m {
                            for k in 0..m {
                                for ll in 0..m {
                                    s += riemann[i][j][k][ll] * frame[i][a] * frame[j][b] * frame[k][c] * frame[ll][d];
                                }
                            }
                        }
                    }
                    frame_riemann[a][b][c][d] = s;
                }
            }
        }
    }
    let symmetry_defect = symmetry_defect(&riemann);
    Ok(CurvatureData {
        point: point.to_vec(),
        metric: jet.g,
        inverse: ginv,
        christoffel: gamma,
        riemann,
        frame,
        coframe,
        frame_riemann,
        symmetry_defect,
    })
}

fn symmetry_defect(r: &[Vec<Vec<Vec<f64>>>]) -> f64 {
    let m = r.len();
    let mut scale: f64 = 1.0;
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v = r[i][j][k][l];
                    scale = scale.max(v.abs());
                    worst = worst
                        .max((v + r[j][i][k][l]).abs())
                        .max((v + r[i][j][l][k]).abs())
                        .max((v - r[k][l][i][j]).abs())
                        .max((v + r[j][k][i][l] + r[k][i][j][l]).abs());
                }
            }
        }
    }
    worst / scale
}

/// A symmetric operator on `Λ^p` in the orthonormal coframe basis
/// `e^A`, `A` running over [`MultiIndex::all`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormOperator {
    pub p: usize,
    pub indices: Vec<Vec<usize>>,
    /// `matrix[B][A]` is the `e^B` component of the image of `e^A`.
    pub matrix: Vec<Vec<f64>>,
}

impl FormOperator {
    pub fn asymmetry(&self) -> f64 {
        let n = self.matrix.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.matrix[i][j] - self.matrix[j][i]).abs())
            .fold(0.0, f64::max)
    }

    /// Ascending eigenvalues of the symmetrized matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.matrix.len();
        let sym: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| 0.5 * (self.matrix[i][j] + self.matrix[j][i])).collect())
            .collect();
        jacobi_eigen(&sym, 1e-14).0
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl CurvatureData {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    /// Sectional curvature of the plane spanned by frame vectors `a`, `b`.
    pub fn sectional(&self, a: usize, b: usize) -> f64 {
        self.frame_riemann[a][b][b][a]
    }

    /// Ricci tensor in the orthonormal frame.
    pub fn ricci(&self) -> Vec<Vec<f64>> {
        let m = self.dim();
        (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| (0..m).map(|k| self.frame_riemann[k][a][b][k]).sum())
                    .collect()
            })
            .collect()
    }

    /// Curvature operator on 2-forms, `⟨ℛ(e_a∧e_b), e_c∧e_d⟩ = R(e_a,e_b,e_d,e_c)`.
    pub fn curvature_operator(&self) -> FormOperator {
        let idx = MultiIndex::all(self.dim(), 2);
        let r = &self.frame_riemann;
        let matrix = idx
            .iter()
            .map(|cd| {
                let (c, d) = (cd.get(0), cd.get(1));
                idx.iter().map(|ab| r[ab.get(0)][ab.get(1)][d][c]).collect()
            })
            .collect();
        FormOperator {
            p: 2,
            indices: idx.iter().map(MultiIndex::to_vec).collect(),
            matrix,
        }
    }

    /// `R(e_k, e_j)` acting on forms as a derivation.
    fn rotation(&self, k: usize, j: usize) -> Vec<Vec<f64>> {
        let m = self.dim();
        (0..m)
            .map(|a| (0..m).map(|b| self.frame_riemann[k][j][a][b]).collect())
            .collect()
    }

    /// `W^[p] = Σ_{j,k} e^j ∧ i_{e_k} R(e_k, e_j)` on `Λ^p`.
    pub fn weitzenbock(&self, p: usize) -> Result<FormOperator> {
        let m = self.dim();
        if p > m {
            return Err(Error::DegreeOverflow { degree: p, dim: m });
        }
        let idx = MultiIndex::all(m, p);
        let rotations: Vec<Vec<Vec<Vec<f64>>>> =
            (0..m).map(|k| (0..m).map(|j| self.rotation(k, j)).collect()).collect();
        let mut matrix = vec![vec![0.0; idx.len()]; idx.len()];
        for (col, a) in idx.iter().enumerate() {
            let basis = Form::<f64>::monomial(m, a.clone(), 1.0);
            let mut image = Form::zero(m, p);
            if p > 0 {
                for k in 0..m {
                    for j in 0..m {
                        let rotated = basis.tensor_lift(&rotations[k][j])?;
                        let contracted = rotated.interior_basis(k)?;
                        image = image + Form::<f64>::basis(m, &[j])?.wedge(&contracted)?;
                    }
                }
            }
            for (row, b) in idx.iter().enumerate() {
                matrix[row][col] = image.coeff(b);
            }
        }
        Ok(FormOperator {
            p,
            indices: idx.iter().map(MultiIndex::to_vec).collect(),
            matrix,
        })
    }

    /// Orthonormal-frame components `ω(e_A)` of a form given in `dx_I`.
    pub fn to_frame(&self, w: &Form<f64>) -> Vec<f64> {
        let idx = MultiIndex::all(self.dim(), w.degree());
        idx.iter()
            .map(|a| w.terms().map(|(i, c)| c * minor(&self.frame, i, a)).sum())
            .collect()
    }

    /// Coordinate form with orthonormal-frame components `v`.
    pub fn from_frame(&self, p: usize, v: &[f64]) -> Form<f64> {
        let m = self.dim();
        let idx = MultiIndex::all(m, p);
        let mut out = Form::zero(m, p);
        for i in &idx {
            let c: f64 = idx.iter().zip(v).map(|(a, va)| va * minor(&self.coframe, a, i)).sum();
            out.add_term(i.clone(), c);
        }
        out
    }
}

/// `W^[p]` at a point.
pub fn weitzenbock_at(metric: &ChartMetric, point: &[f64], p: usize) -> Result<FormOperator> {
    curvature_at(metric, point)?.weitzenbock(p)
}

/// Coordinate components of `∇_j ω` at `x` for each `j`, from the exact
/// partial derivatives of `ω`.
fn covariant_derivative(metric: &ChartMetric, w: &PolyForm<f64>, x: &[f64]) -> Result<Vec<Form<f64>>> {
    let gamma = christoffel_at(metric, x)?;
    let m = metric.dim();
    let value = w.eval_f64(x);
    (0..m)
        .map(|j| {
            let lift: Vec<Vec<f64>> = (0..m).map(|l| (0..m).map(|c| gamma[l][j][c]).collect()).collect();
            Ok(w.partial(j).eval_f64(x) - value.tensor_lift(&lift)?)
        })
        .collect()
}

/// `(δω)_K = −g^{ij} (∇_j ω)(∂_i, ∂_K)`.
fn codifferential_from(ginv: &[Vec<f64>], nabla: &[Form<f64>]) -> Result<Form<f64>> {
    let m = ginv.len();
    let p = nabla[0].degree();
    let mut out = Form::zero(m, p - 1);
    for i in 0..m {
        for j in 0..m {
            if ginv[i][j] != 0.0 {
                out = out - nabla[j].interior_basis(i)?.scale(&ginv[i][j]);
            }
        }
    }
    Ok(out)
}

fn exterior_from_partials(m: usize, partials: &[Form<f64>]) -> Result<Form<f64>> {
    let p = partials[0].degree();
    let mut out = Form::zero(m, p + 1);
    for (k, dk) in partials.iter().enumerate() {
        out = out + Form::<f64>::basis(m, &[k])?.wedge(dk)?;
    }
    Ok(out)
}

fn shifted(x: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += h;
    y
}

fn centered<F>(x: &[f64], k: usize, h: f64, f: &F) -> Result<Vec<Form<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<Form<f64>>>,
{
    let plus = f(&shifted(x, k, h))?;
    let minus = f(&shifted(x, k, -h))?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(a, b)| (a - b).scale(&(0.5 / h)))
        .collect())
}

/// Frame norm of `Δω − ∇*∇ω − W^[p]ω` at `x`, with the outer derivative of
/// each second-order operator taken by centered differences of step `h`.
pub fn bochner_residual(metric: &ChartMetric, w: &PolyForm<Q>, x: &[f64], h: f64) -> Result<f64> {
    if !(STEP_RANGE.0..=STEP_RANGE.1).contains(&h) {
        return Err(Error::StepOutOfRange(h));
    }
    let m = metric.dim();
    let p = w.degree();
    let wf = w.convert(q_to_f64);
    let data = curvature_at(metric, x)?;
    let gamma = &data.christoffel;
    let ginv = &data.inverse;

    // ∇*∇ω = −g^{ij} ∇_i ∇_j ω
    let nabla = |y: &[f64]| covariant_derivative(metric, &wf, y);
    let t = nabla(x)?;
    let mut rough = Form::zero(m, p);
    for i in 0..m {
        let di = centered(x, i, h, &nabla)?;
        let lift_i: Vec<Vec<f64>> = (0..m).map(|l| (0..m).map(|c| gamma[l][i][c]).collect()).collect();
        for j in 0..m {
            if ginv[i][j] == 0.0 {
                continue;
            }
            let mut second = di[j].clone() - t[j].tensor_lift(&lift_i)?;
            for (l, tl) in t.iter().enumerate() {
                second = second - tl.scale(&gamma[l][i][j]);
            }
            rough = rough - second.scale(&ginv[i][j]);
        }
    }

    // dδω
    let mut laplace = Form::zero(m, p);
    if p > 0 {
        let delta = |y: &[f64]| -> Result<Vec<Form<f64>>> {
            let g = curvature_inverse(metric, y)?;
            Ok(vec![codifferential_from(&g, &nabla(y)?)?])
        };
        let partials: Vec<Form<f64>> = (0..m)
            .map(|k| Ok(centered(x, k, h, &delta)?.remove(0)))
            .collect::<Result<_>>()?;
        laplace = laplace + exterior_from_partials(m, &partials)?;
    }
    // δdω
    if p < m {
        let dw = |y: &[f64]| -> Result<Vec<Form<f64>>> {
            let partials: Vec<Form<f64>> = (0..m).map(|k| wf.partial(k).eval_f64(y)).collect();
            Ok(vec![exterior_from_partials(m, &partials)?])
        };
        let value = dw(x)?.remove(0);
        let nabla_d: Vec<Form<f64>> = (0..m)
            .map(|j| {
                let lift: Vec<Vec<f64>> = (0..m).map(|l| (0..m).map(|c| gamma[l][j][c]).collect()).collect();
                Ok(centered(x, j, h, &dw)?.remove(0) - value.tensor_lift(&lift)?)
            })
            .collect::<Result<_>>()?;
        laplace = laplace + codifferential_from(ginv, &nabla_d)?;
    }

    let weitzenbock = data.weitzenbock(p)?;
    let lhs = data.to_frame(&(laplace - rough));
    let curv = weitzenbock.apply(&data.to_frame(&wf.eval_f64(x)));
    Ok(lhs.iter().zip(&curv).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
}

fn curvature_inverse(metric: &ChartMetric, x: &[f64]) -> Result<Vec<Vec<f64>>> {
    invert(&metric.jet(x).g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BochnerReport {
    pub point: Vec<f64>,
    pub degree: usize,
    pub step: f64,
    pub residual: f64,
    pub residual_half_step: f64,
    /// `log₂` of the residual ratio between steps `h` and `h/2`; absent
    /// when the residual is at rounding level.
    pub order: Option<f64>,
}

/// Residuals at `h` and `h/2` and the observed convergence order.
pub fn bochner_convergence(metric: &ChartMetric, w: &PolyForm<Q>, x: &[f64], h: f64) -> Result<BochnerReport> {
    let residual = bochner_residual(metric, w, x, h)?;
    let half = (h / 2.0).max(STEP_RANGE.0);
    let residual_half_step = bochner_residual(metric, w, x, half)?;
    let order =
        (residual > 1e-11 && residual_half_step > 0.0).then(|| (residual / residual_half_step).ln() / (h / half).ln());
    Ok(BochnerReport {
        point: x.to_vec(),
        degree: w.degree(),
        step: h,
        residual,
        residual_half_step,
        order,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeitzenbockBoundSample {
    pub point: Vec<f64>,
    /// Smallest eigenvalue of the curvature operator.
    pub curvature_floor: f64,
    /// Smallest eigenvalue of `W^[p]`.
    pub weitzenbock_floor: f64,
    /// Smallest `⟨W^[p]ω, ω⟩ / |ω|²` over the sampled forms.
    pub sampled_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeitzenbockBoundReport {
    pub p: usize,
    pub gamma: f64,
    pub bound: f64,
    /// Whether the curvature operator is bounded below by `γ` everywhere.
    pub precondition: bool,
    pub samples: Vec<WeitzenbockBoundSample>,
    pub pass: bool,
}

/// Checks `⟨W^[p]ω, ω⟩ ≥ p(m−p)γ|ω|²` at each point for `forms_per_point`
/// random forms, given curvature operator `≥ γ`.
pub fn weitzenbock_bound_check<R: Rng + ?Sized>(
    metric: &ChartMetric,
    p: usize,
    gamma: f64,
    points: &[Vec<f64>],
    forms_per_point: usize,
    rng: &mut R,
) -> Result<WeitzenbockBoundReport> {
    const SLACK: f64 = 1e-8;
    let m = metric.dim();
    let bound = (p * (m - p.min(m))) as f64 * gamma;
    let mut samples = Vec::new();
    let mut precondition = true;
    let mut pass = true;
    for x in points {
        let data = curvature_at(metric, x)?;
        let curvature_floor = data.curvature_operator().eigenvalues().first().copied().unwrap_or(0.0);
        precondition &= curvature_floor >= gamma - SLACK;
        let w = data.weitzenbock(p)?;
        let weitzenbock_floor = w.eigenvalues().first().copied().unwrap_or(0.0);
        let mut sampled_ratio = f64::INFINITY;
        for _ in 0..forms_per_point {
            let v: Vec<f64> = (0..w.matrix.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm: f64 = v.iter().map(|a| a * a).sum();
            if norm == 0.0 {
                continue;
            }
            let wv = w.apply(&v);
            let ratio = wv.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / norm;
            sampled_ratio = sampled_ratio.min(ratio);
        }
        pass &= sampled_ratio >= bound - SLACK && weitzenbock_floor >= bound - SLACK;
        samples.push(WeitzenbockBoundSample {
            point: x.clone(),
            curvature_floor,
            weitzenbock_floor,
            sampled_ratio,
        });
    }
    Ok(WeitzenbockBoundReport {
        p,
        gamma,
        bound,
        precondition,
        samples,
        pass: pass && precondition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn flat_metrics_have_no_curvature() {
        for metric in [ChartMetric::flat(3), ChartMetric::scaled_flat(3, qi(5))] {
            let d = curvature_at(&metric, &[0.2, -0.1, 0.4]).unwrap();
            assert!(d.riemann.iter().flatten().flatten().flatten().all(|v| *v == 0.0));
            let w = d.weitzenbock(2).unwrap();
            assert!(w.matrix.iter().flatten().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn round_sphere_sectional_curvature() {
        let d = curvature_at(&ChartMetric::round_sphere(3), &[0.0; 3]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    assert!(close(d.sectional(a, b), 1.0, 1e-12));
                }
            }
        }
        assert!(d.symmetry_defect < 1e-10);
    }

    #[test]
    fn weitzenbock_on_one_forms_is_ricci() {
        let d = curvature_at(&ChartMetric::round_sphere(4), &[0.3, -0.2, 0.1, 0.5]).unwrap();
        let w = d.weitzenbock(1).unwrap();
        let ric = d.ricci();
        for a in 0..4 {
            for b in 0..4 {
                assert!(close(w.matrix[a][b], ric[a][b], 1e-10));
            }
        }
        assert!(close(ric[0][0], 3.0, 1e-10));
    }

    #[test]
    fn frame_round_trip() {
        let d = curvature_at(&ChartMetric::round_sphere(3), &[0.3, 0.1, -0.4]).unwrap();
        let w = Form::<f64>::basis(3, &[0, 2]).unwrap().scale(&2.5) + Form::basis(3, &[1, 2]).unwrap();
        let back = d.from_frame(2, &d.to_frame(&w));
        for (i, c) in w.terms() {
            assert!(close(back.coeff(i), *c, 1e-12));
        }
    }

    #[test]
    fn step_range_is_enforced() {
        let w = PolyForm::<Q>::from_constant(&Form::basis(2, &[0]).unwrap());
        assert!(matches!(
            bochner_residual(&ChartMetric::flat(2), &w, &[0.0, 0.0], 0.5),
            Err(Error::StepOutOfRange(_))
        ));
    }
}
