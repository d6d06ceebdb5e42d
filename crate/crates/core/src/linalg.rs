//! Exact sparse elimination over the rationals and a small dense symmetric
//! eigensolver for the generalized problems `A v = θ G v`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{q_to_f64, Q};

/// Sparse rational row: column → nonzero value.
pub type SparseRow = BTreeMap<usize, Q>;

/// Reduced row echelon form of a sparse rational matrix.
///
/// Pivots are chosen column by column as the entry of largest magnitude
/// among unused rows, ties going to the lowest row index, so the result
/// is reproducible.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    /// Pivot rows, normalized to a leading 1, in pivot-column order.
    rows: Vec<SparseRow>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(rows: Vec<SparseRow>, cols: usize) -> Self {
        Self::reduce(rows, cols, cols)
    }

    /// Eliminates using pivots only in columns `< pivot_limit`.
    fn reduce(mut rows: Vec<SparseRow>, cols: usize, pivot_limit: usize) -> Self {
        rows.retain(|r| !r.is_empty());
        let mut used = vec![false; rows.len()];
        let mut order: Vec<(usize, usize)> = Vec::new();
        for j in 0..pivot_limit {
            let mut best: Option<usize> = None;
            for (i, row) in rows.iter().enumerate() {
                if used[i] {
                    continue;
                }
                if let Some(v) = row.get(&j) {
                    let better = match best {
                        None => true,
                        Some(b) => v.abs() > rows[b][&j].abs(),
                    };
                    if better {
                        best = Some(i);
                    }
                }
            }
            let Some(pi) = best else { continue };
            used[pi] = true;
            let inv = Q::from_integer(1.into()) / rows[pi][&j].clone();
            for v in rows[pi].values_mut() {
                *v *= &inv;
            }
            let pivot_row = rows[pi].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == pi {
                    continue;
                }
                let Some(factor) = row.get(&j).cloned() else {
                    continue;
                };
                for (k, v) in &pivot_row {
                    let e = row.entry(*k).or_insert_with(Q::zero);
                    *e -= &factor * v;
                    if e.is_zero() {
                        row.remove(k);
                    }
                }
            }
            order.push((j, pi));
        }
        let mut leftover: Vec<SparseRow> = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if !used[i] && !row.is_empty() {
                leftover.push(row.clone());
            }
        }
        let pivots: Vec<usize> = order.iter().map(|(j, _)| *j).collect();
        let mut out_rows: Vec<SparseRow> = order.iter().map(|(_, i)| rows[*i].clone()).collect();
        // rows with no admissible pivot (only possible when pivot_limit < cols)
        out_rows.extend(leftover);
        Echelon {
            cols,
            rows: out_rows,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Nullspace basis, one vector per free column in ascending order,
    /// each carrying a 1 at its free column.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &j in &self.pivots {
                v[j] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::from_integer(1.into());
            for (row, &pj) in self.rows.iter().zip(&self.pivots) {
                if let Some(c) = row.get(&free) {
                    v[pj] = -c.clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Solution set of a linear system `A x = b`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Vec<Q>,
    pub nullspace: Vec<Vec<Q>>,
}

/// Solves `A x = b` exactly, returning `None` when inconsistent.
///
/// `rows[i]` holds row `i` of `A` and `rhs[i]` the matching entry of `b`.
pub fn solve(rows: &[SparseRow], rhs: &[Q], cols: usize) -> Option<Solution> {
    let aug: Vec<SparseRow> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            if !b.is_zero() {
                r.insert(cols, b.clone());
            }
            r
        })
        .collect();
    let ech = Echelon::reduce(aug, cols + 1, cols);
    for row in &ech.rows[ech.rank()..] {
        if row.keys().any(|&k| k == cols) {
            return None;
        }
    }
    let mut particular = vec![Q::zero(); cols];
    for (row, &pj) in ech.rows.iter().zip(&ech.pivots) {
        if let Some(b) = row.get(&cols) {
            particular[pj] = b.clone();
        }
    }
    let homogeneous = Echelon {
        cols,
        rows: ech
            .rows
            .iter()
            .take(ech.rank())
            .map(|r| {
                r.iter()
                    .filter(|(k, _)| **k < cols)
                    .map(|(k, v)| (*k, v.clone()))
                    .collect()
            })
            .collect(),
        pivots: ech.pivots.clone(),
    };
    Some(Solution {
        particular,
        nullspace: homogeneous.nullspace(),
    })
}

/// Solves `A x = b_k` for several right-hand sides with one elimination.
///
/// `rhs[k]` maps row indices to the nonzero entries of `b_k`. Returns one
/// particular solution per consistent system and the shared nullspace.
pub fn solve_many(rows: &[SparseRow], rhs: &[SparseRow], cols: usize) -> (Vec<Option<Vec<Q>>>, Vec<Vec<Q>>) {
    let mut aug: Vec<SparseRow> = rows.to_vec();
    for (k, b) in rhs.iter().enumerate() {
        for (&i, v) in b {
            if !v.is_zero() {
                aug[i].insert(cols + k, v.clone());
            }
        }
    }
    let ech = Echelon::reduce(aug, cols + rhs.len(), cols);
    let mut consistent = vec![true; rhs.len()];
    for row in &ech.rows[ech.rank()..] {
        for &k in row.keys() {
            if k >= cols {
                consistent[k - cols] = false;
            }
        }
    }
    let solutions = (0..rhs.len())
        .map(|k| {
            consistent[k].then(|| {
                let mut x = vec![Q::zero(); cols];
                for (row, &pj) in ech.rows.iter().zip(&ech.pivots) {
                    if let Some(b) = row.get(&(cols + k)) {
                        x[pj] = b.clone();
                    }
                }
                x
            })
        })
        .collect();
    let homogeneous = Echelon {
        cols,
        rows: ech
            .rows
            .iter()
            .take(ech.rank())
            .map(|r| r.range(..cols).map(|(k, v)| (*k, v.clone())).collect())
            .collect(),
        pivots: ech.pivots.clone(),
    };
    (solutions, homogeneous.nullspace())
}

/// Exact inverse by Gauss–Jordan elimination; `None` when singular.
pub fn inverse(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let rows: Vec<SparseRow> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: SparseRow = r
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k, v.clone()))
                .collect();
            row.insert(n + i, Q::from_integer(1.into()));
            row
        })
        .collect();
    let ech = Echelon::reduce(rows, 2 * n, n);
    if ech.rank() < n {
        return None;
    }
    let mut inv = vec![vec![Q::zero(); n]; n];
    for (row, &pj) in ech.rows.iter().zip(&ech.pivots) {
        for (k, v) in row.range(n..) {
            inv[pj][k - n] = v.clone();
        }
    }
    Some(inv)
}

/// Exact determinant by Gaussian elimination with row swaps.
pub fn determinant(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a.to_vec();
    let mut det = Q::from_integer(1.into());
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &m[col][col];
            for k in col..n {
                let delta = &f * &m[col][k];
                m[r][k] -= delta;
            }
        }
    }
    det
}

/// Exact positive-semidefiniteness test for a symmetric rational matrix,
/// by symmetric elimination on the largest diagonal entry.
pub fn is_psd(a: &[Vec<Q>]) -> bool {
    let mut m: Vec<Vec<Q>> = a.to_vec();
    let mut alive: Vec<usize> = (0..m.len()).collect();
    while !alive.is_empty() {
        if alive.iter().any(|&i| m[i][i].is_negative()) {
            return false;
        }
        let &k = alive
            .iter()
            .max_by(|&&i, &&j| m[i][i].cmp(&m[j][j]).then(j.cmp(&i)))
            .expect("non-empty");
        if m[k][k].is_zero() {
            return alive.iter().all(|&i| alive.iter().all(|&j| m[i][j].is_zero()));
        }
        alive.retain(|&i| i != k);
        let pivot = m[k][k].clone();
        for &i in &alive {
            for &j in &alive {
                let delta = &m[i][k] * &m[k][j] / &pivot;
                m[i][j] -= delta;
            }
        }
    }
    true
}

/// Converts a dense rational matrix into sparse rows.
pub fn sparse_rows(a: &[Vec<Q>]) -> Vec<SparseRow> {
    a.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| (k, v.clone()))
                .collect()
        })
        .collect()
}

pub fn rank(a: &[Vec<Q>]) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    Echelon::new(sparse_rows(a), cols).rank()
}

/// Dimension of the nullspace of `A − θG`.
pub fn pencil_nullity(a: &[Vec<Q>], g: &[Vec<Q>], theta: &Q) -> usize {
    let shifted: Vec<Vec<Q>> = a
        .iter()
        .zip(g)
        .map(|(ra, rg)| ra.iter().zip(rg).map(|(x, y)| x - theta * y).collect())
        .collect();
    shifted.len() - rank(&shifted)
}

pub fn is_symmetric(a: &[Vec<Q>]) -> bool {
    (0..a.len()).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

pub fn to_f64_matrix(a: &[Vec<Q>]) -> Vec<Vec<f64>> {
    a.iter().map(|r| r.iter().map(q_to_f64).collect()).collect()
}

/// Lower-triangular `L` with `G = L Lᵀ`.
pub fn cholesky(g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = g.len();
    let scale = (0..n).map(|i| g[i][i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = g[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 1e-13 * scale {
                    return Err(Error::BasisConditioning { index: i, pivot: s });
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// ascending eigenvalues and the matching orthonormal eigenvectors as columns.
pub fn jacobi_eigen(a: &[Vec<f64>], tol: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let frob = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= tol * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    (values, vectors)
}

/// Eigenvalues of the symmetric-definite pencil `A v = θ G v`, ascending,
/// with `G`-orthonormal eigenvectors as columns.
pub fn generalized_eigen(a: &[Vec<f64>], g: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    let l = cholesky(g)?;
    // C = L⁻¹ A L⁻ᵀ via forward substitution on columns then rows
    let solve_lower = |b: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let s: f64 = b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>();
            y[i] = s / l[i][i];
        }
        y
    };
    let mut x = vec![vec![0.0; n]; n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| a[i][j]).collect();
        let y = solve_lower(&col);
        for i in 0..n {
            x[i][j] = y[i];
        }
    }
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        let y = solve_lower(&x[i]);
        c[i] = y;
    }
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (c[i][j] + c[j][i]);
            c[i][j] = s;
            c[j][i] = s;
        }
    }
    let (values, y) = jacobi_eigen(&c, 1e-12);
    // back-substitute Lᵀ v = y
    let mut vectors = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in (0..n).rev() {
            let s: f64 = y[i][col] - (i + 1..n).map(|k| l[k][i] * vectors[k][col]).sum::<f64>();
            vectors[i][col] = s / l[i][i];
        }
    }
    Ok((values, vectors))
}

/// Groups sorted eigenvalues whose consecutive gaps are within `tol`,
/// returning `(mean, multiplicity)` pairs.
pub fn group_eigenvalues(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &v in values {
        match groups.last_mut() {
            Some(g) if (v - *g.last().expect("groups are non-empty")).abs() <= tol => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    groups
        .into_iter()
        .map(|g| (g.iter().sum::<f64>() / g.len() as f64, g.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(k, v)| (k, qi(v))).collect()
    }

    #[test]
    fn nullspace_of_rank_one() {
        let e = Echelon::new(vec![row(&[(0, 1), (1, 1), (2, 1)]), row(&[(0, 2), (1, 2), (2, 2)])], 3);
        assert_eq!(e.rank(), 1);
        let ns = e.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(&v[0] + &v[1] + &v[2], qi(0));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let rows = vec![row(&[(0, 1), (1, 1)]), row(&[(0, 1), (1, -1)])];
        let s = solve(&rows, &[qi(3), qi(1)], 2).unwrap();
        assert_eq!(s.particular, vec![qi(2), qi(1)]);
        assert!(s.nullspace.is_empty());
        let rows = vec![row(&[(0, 1)]), row(&[(0, 2)])];
        assert!(solve(&rows, &[qi(1), qi(3)], 1).is_none());
        let s = solve(&[row(&[(0, 2)])], &[qi(1)], 2).unwrap();
        assert_eq!(s.particular, vec![q(1, 2), qi(0)]);
        assert_eq!(s.nullspace.len(), 1);
    }

    #[test]
    fn solve_many_shares_elimination() {
        let rows = vec![row(&[(0, 1), (1, 1)]), row(&[(0, 2), (1, 2)])];
        let rhs = vec![row(&[(0, 1), (1, 2)]), row(&[(0, 1), (1, 1)])];
        let (sols, ns) = solve_many(&rows, &rhs, 2);
        assert_eq!(sols[0], Some(vec![qi(1), qi(0)]));
        assert!(sols[1].is_none());
        assert_eq!(ns.len(), 1);
    }

    #[test]
    fn generalized_eigen_diagonal_pencil() {
        let a = vec![vec![2.0, 0.0], vec![0.0, 9.0]];
        let g = vec![vec![1.0, 0.0], vec![0.0, 3.0]];
        let (vals, _) = generalized_eigen(&a, &g).unwrap();
        assert!((vals[0] - 2.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        assert!(matches!(
            generalized_eigen(&a, &[vec![1.0, 1.0], vec![1.0, 1.0]]),
            Err(Error::BasisConditioning { .. })
        ));
    }

    #[test]
    fn pencil_nullity_counts_multiplicity() {
        let a = vec![vec![qi(2), qi(0)], vec![qi(0), qi(2)]];
        let g = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        assert_eq!(pencil_nullity(&a, &g, &qi(2)), 2);
        assert_eq!(pencil_nullity(&a, &g, &q(7, 3)), 0);
    }

    #[test]
    fn inverse_determinant_psd() {
        let a = vec![vec![qi(2), qi(1)], vec![qi(1), qi(1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![qi(1), qi(-1)], vec![qi(-1), qi(2)]]);
        assert_eq!(determinant(&a), qi(1));
        assert!(is_psd(&a));
        assert!(is_psd(&[vec![qi(1), qi(1)], vec![qi(1), qi(1)]]));
        assert!(!is_psd(&[vec![qi(1), qi(2)], vec![qi(2), qi(1)]]));
        assert!(!is_psd(&[vec![qi(0), qi(1)], vec![qi(1), qi(0)]]));
        assert!(inverse(&[vec![qi(1), qi(2)], vec![qi(2), qi(4)]]).is_none());
    }

    #[test]
    fn grouping() {
        let g = group_eigenvalues(&[1.0, 1.0 + 1e-9, 2.0], 1e-7);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].1, 2);
    }
}
