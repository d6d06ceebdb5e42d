//! Pointwise exterior algebra over `R^m` in the standard orthonormal frame.
//!
//! [`Form`] is generic over its coefficient ring so the same wedge,
//! interior product, Hodge star and tensor lift serve both constant forms
//! (coefficients in a [`Scalar`]) and polynomial forms (coefficients in
//! [`Polynomial`](crate::polyform::Polynomial)).
//!
//! Indices are zero-based internally; `Display` prints them one-based.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficient ring of a form.
pub trait Ring:
    Clone + fmt::Debug + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Send + Sync
{
}

impl<T> Ring for T where T: Clone + fmt::Debug + PartialEq + Zero + One + Neg<Output = T> + Sub<Output = T> + Send + Sync
{}

/// Strictly increasing tuple of zero-based coordinate indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(SmallVec<[u8; 8]>);

impl MultiIndex {
    /// Validates that `indices` is strictly increasing and below `dim`.
    pub fn new(indices: &[usize], dim: usize) -> Result<Self> {
        let ok = indices.windows(2).all(|w| w[0] < w[1]) && indices.iter().all(|&i| i < dim);
        if !ok || indices.len() > dim {
            return Err(Error::InvalidMultiIndex {
                indices: indices.to_vec(),
                dim,
            });
        }
        Ok(MultiIndex(indices.iter().map(|&i| i as u8).collect()))
    }

    pub fn empty() -> Self {
        MultiIndex(SmallVec::new())
    }

    pub fn single(i: usize) -> Self {
        MultiIndex(smallvec::smallvec![i as u8])
    }

    /// Sorts an arbitrary index list, returning the permutation sign, or
    /// `None` when an index repeats.
    pub fn sorted_with_sign(indices: &[usize]) -> Option<(Self, i32)> {
        let mut v: SmallVec<[u8; 8]> = indices.iter().map(|&i| i as u8).collect();
        let mut sign = 1;
        // insertion sort counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((MultiIndex(v), sign))
    }

    /// All strictly increasing `p`-tuples in `0..dim`, lexicographically.
    pub fn all(dim: usize, p: usize) -> Vec<Self> {
        fn rec(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex(cur.iter().map(|&i| i as u8).collect()));
                return;
            }
            for i in start..dim {
                if dim - i < left {
                    break;
                }
                cur.push(i);
                rec(i + 1, dim, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if p <= dim {
            rec(0, dim, p, &mut Vec::new(), &mut out);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn get(&self, pos: usize) -> usize {
        self.0[pos] as usize
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&(i as u8))
    }

    pub fn position(&self, i: usize) -> Option<usize> {
        self.0.iter().position(|&x| x as usize == i)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.indices().collect()
    }

    /// Index set with the entry at `pos` removed.
    pub fn without(&self, pos: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(pos);
        MultiIndex(v)
    }

    pub fn complement(&self, dim: usize) -> Self {
        MultiIndex((0..dim as u8).filter(|i| !self.0.contains(i)).collect())
    }

    /// `dx_I ∧ dx_J = sign · dx_K`, or `None` when the sets overlap.
    pub fn wedge(&self, other: &Self) -> Option<(Self, i32)> {
        let mut inversions = 0usize;
        for &a in &self.0 {
            for &b in &other.0 {
                if a == b {
                    return None;
                }
                if a > b {
                    inversions += 1;
                }
            }
        }
        let mut v: SmallVec<[u8; 8]> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        Some((MultiIndex(v), if inversions.is_multiple_of(2) { 1 } else { -1 }))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("dx{}", i + 1)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// A `p`-form on `R^m` with coefficients in `C` over the basis `dx_I`.
#[derive(Clone, PartialEq)]
pub struct Form<C> {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, C>,
}

/// A form with scalar coefficients: the value of a field at one point.
pub type ConstantForm<S> = Form<S>;

impl<C: Ring> Form<C> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Form {
            dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The scalar `c` as a 0-form.
    pub fn scalar(dim: usize, c: C) -> Self {
        let mut f = Self::zero(dim, 0);
        f.add_term(MultiIndex::empty(), c);
        f
    }

    /// `c · dx_I`.
    pub fn monomial(dim: usize, index: MultiIndex, c: C) -> Self {
        let mut f = Self::zero(dim, index.len());
        f.add_term(index, c);
        f
    }

    /// Builds `dx_{i_1} ∧ … ∧ dx_{i_p}` from zero-based, strictly increasing indices.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        let idx = MultiIndex::new(indices, dim)?;
        Ok(Self::monomial(dim, idx, C::one()))
    }

    /// The 1-form `Σ v_a dx_a` dual to the vector `v`.
    pub fn from_vector(v: &[C]) -> Self {
        let mut f = Self::zero(v.len(), 1);
        for (a, c) in v.iter().enumerate() {
            f.add_term(MultiIndex::single(a), c.clone());
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, index: &MultiIndex) -> C {
        self.coeffs.get(index).cloned().unwrap_or_else(C::zero)
    }

    /// Accumulates `c · dx_I`, pruning a resulting zero.
    pub fn add_term(&mut self, index: MultiIndex, c: C) {
        debug_assert_eq!(index.len(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// Applies `g` to every coefficient; `g` must be additive for the
    /// result to be meaningful.
    pub fn map<D: Ring>(&self, mut g: impl FnMut(&C) -> D) -> Form<D> {
        let mut out = Form::zero(self.dim, self.degree);
        for (i, c) in &self.coeffs {
            out.add_term(i.clone(), g(c));
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                actual: other.degree,
            });
        }
        Ok(())
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::DegreeOverflow { degree, dim: self.dim });
        }
        let mut out = Self::zero(self.dim, degree);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if let Some((k, sign)) = i.wedge(j) {
                    let c = a.clone() * b.clone();
                    out.add_term(k, if sign > 0 { c } else { -c });
                }
            }
        }
        Ok(out)
    }

    /// Interior product `i_X` with the vector `X = Σ x_a e_a`.
    pub fn interior(&self, x: &[C]) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::InvalidDegree {
                op: "interior product",
                degree: 0,
            });
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let mut out = Self::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.coeffs {
            for pos in 0..idx.len() {
                let a = idx.get(pos);
                if x[a].is_zero() {
                    continue;
                }
                let v = x[a].clone() * c.clone();
                out.add_term(idx.without(pos), if pos % 2 == 0 { v } else { -v });
            }
        }
        Ok(out)
    }

    /// Interior product with the coordinate vector `e_a`.
    pub fn interior_basis(&self, a: usize) -> Result<Self> {
        let mut x = vec![C::zero(); self.dim];
        x[a] = C::one();
        self.interior(&x)
    }

    /// Hodge star with `*dx_I = sign(I, I^c) dx_{I^c}`.
    pub fn hodge_star(&self) -> Self {
        let mut out = Self::zero(self.dim, self.dim - self.degree);
        for (idx, c) in &self.coeffs {
            let comp = idx.complement(self.dim);
            let (_, sign) = idx.wedge(&comp).expect("complement is disjoint");
            out.add_term(comp, if sign > 0 { c.clone() } else { -c.clone() });
        }
        out
    }

    /// Pointwise inner product in the orthonormal basis `dx_I`.
    pub fn inner(&self, other: &Self) -> Result<C> {
        self.check_same(other)?;
        let mut acc = C::zero();
        for (idx, a) in &self.coeffs {
            if let Some(b) = other.coeffs.get(idx) {
                acc = acc + a.clone() * b.clone();
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> C {
        self.inner(self).expect("same degree")
    }

    /// The derivation `T^[p]` induced by the (1,1)-tensor with
    /// `T e_b = Σ_a t[a][b] e_a`:
    /// `(T^[p]ω)(X_1,…,X_p) = Σ_i ω(X_1,…,T X_i,…,X_p)`; `T^[0] = 0`.
    pub fn tensor_lift(&self, t: &[Vec<C>]) -> Result<Self> {
        if t.len() != self.dim || t.iter().any(|row| row.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: t.len(),
            });
        }
        let mut out = Self::zero(self.dim, self.degree);
        if self.degree == 0 {
            return Ok(out);
        }
        // T^[1] dx_a = Σ_b t[a][b] dx_b, extended as a derivation.
        for (idx, c) in &self.coeffs {
            let list = idx.to_vec();
            for pos in 0..list.len() {
                let a = list[pos];
                for (b, tab) in t[a].iter().enumerate() {
                    if tab.is_zero() {
                        continue;
                    }
                    let mut replaced = list.clone();
                    replaced[pos] = b;
                    if let Some((k, sign)) = MultiIndex::sorted_with_sign(&replaced) {
                        let v = c.clone() * tab.clone();
                        out.add_term(k, if sign > 0 { v } else { -v });
                    }
                }
            }
        }
        Ok(out)
    }
}

impl<C: Ring> Add for &Form<C> {
    type Output = Form<C>;
    fn add(self, rhs: &Form<C>) -> Form<C> {
        assert_eq!(
            (self.dim, self.degree),
            (rhs.dim, rhs.degree),
            "adding forms of different shape"
        );
        let mut out = self.clone();
        for (i, c) in &rhs.coeffs {
            out.add_term(i.clone(), c.clone());
        }
        out
    }
}

impl<C: Ring> Add for Form<C> {
    type Output = Form<C>;
    fn add(self, rhs: Form<C>) -> Form<C> {
        &self + &rhs
    }
}

impl<C: Ring> Sub for &Form<C> {
    type Output = Form<C>;
    fn sub(self, rhs: &Form<C>) -> Form<C> {
        self + &(-rhs)
    }
}

impl<C: Ring> Sub for Form<C> {
    type Output = Form<C>;
    fn sub(self, rhs: Form<C>) -> Form<C> {
        &self - &rhs
    }
}

impl<C: Ring> Neg for &Form<C> {
    type Output = Form<C>;
    fn neg(self) -> Form<C> {
        self.map(|c| -c.clone())
    }
}

impl<C: Ring> Neg for Form<C> {
    type Output = Form<C>;
    fn neg(self) -> Form<C> {
        -&self
    }
}

impl<C: Ring + fmt::Display> fmt::Display for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(i, c)| format!("({c}) {i}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<C: Ring> fmt::Debug for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Form")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

/// A (1,1)-tensor on `R^m`: `T e_b = Σ_a entries[a][b] e_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEndomorphism<S> {
    entries: Vec<Vec<S>>,
}

impl<S: Scalar> LinearEndomorphism<S> {
    pub fn new(entries: Vec<Vec<S>>) -> Result<Self> {
        let m = entries.len();
        if let Some(bad) = entries.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: bad.len(),
            });
        }
        Ok(LinearEndomorphism { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![S::one(); dim])
    }

    pub fn diagonal(d: &[S]) -> Self {
        let m = d.len();
        let entries = (0..m)
            .map(|a| (0..m).map(|b| if a == b { d[a].clone() } else { S::zero() }).collect())
            .collect();
        LinearEndomorphism { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<S>] {
        &self.entries
    }

    pub fn entry(&self, a: usize, b: usize) -> &S {
        &self.entries[a][b]
    }

    pub fn trace(&self) -> S {
        (0..self.dim()).fold(S::zero(), |acc, i| acc + self.entries[i][i].clone())
    }

    /// Applies `T` to a vector.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (t, x)| acc + t.clone() * x.clone())
            })
            .collect()
    }

    /// `T^[p] α` for a constant form of degree `p`.
    pub fn lift(&self, p: usize, alpha: &ConstantForm<S>) -> Result<ConstantForm<S>> {
        if alpha.degree() != p {
            return Err(Error::DegreeMismatch {
                expected: p,
                actual: alpha.degree(),
            });
        }
        alpha.tensor_lift(&self.entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi, Q};

    fn b(dim: usize, idx: &[usize]) -> ConstantForm<Q> {
        Form::basis(dim, idx).unwrap()
    }

    #[test]
    fn wedge_basis_and_anticommutativity() {
        let dx1 = b(3, &[0]);
        let dx2 = b(3, &[1]);
        assert_eq!(dx1.wedge(&dx2).unwrap(), b(3, &[0, 1]));
        assert_eq!(dx2.wedge(&dx1).unwrap(), -b(3, &[0, 1]));
        let sum = &dx1 + &dx2;
        assert_eq!(sum.wedge(&dx1).unwrap(), -b(3, &[0, 1]));
    }

    #[test]
    fn wedge_errors() {
        let a = b(3, &[0, 1]);
        let c = b(3, &[1, 2]);
        assert!(matches!(a.wedge(&c), Err(Error::DegreeOverflow { .. })));
        let d = b(2, &[0]);
        assert!(matches!(a.wedge(&d), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn interior_examples() {
        let w = b(3, &[0, 1]);
        assert_eq!(w.interior_basis(0).unwrap(), b(3, &[1]));
        assert!(w.interior_basis(2).unwrap().is_zero());
        assert_eq!(w.interior_basis(1).unwrap(), -b(3, &[0]));
        let f = ConstantForm::<Q>::scalar(3, qi(1));
        assert!(f.interior_basis(0).is_err());
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(b(3, &[0]).hodge_star(), b(3, &[1, 2]));
        assert_eq!(b(3, &[0, 1, 2]).hodge_star(), ConstantForm::scalar(3, qi(1)));
        assert_eq!(b(2, &[0]).hodge_star().hodge_star(), -b(2, &[0]));
    }

    #[test]
    fn inner_examples() {
        assert_eq!(b(3, &[0, 1]).inner(&b(3, &[0, 1])).unwrap(), qi(1));
        assert_eq!(b(3, &[0, 1]).inner(&b(3, &[0, 2])).unwrap(), qi(0));
        let two = b(3, &[0]).scale(&qi(2));
        let three = b(3, &[0]).scale(&qi(3));
        assert_eq!(two.inner(&three).unwrap(), qi(6));
        assert!(b(3, &[0]).inner(&b(3, &[0, 1])).is_err());
    }

    #[test]
    fn tensor_lift_examples() {
        let t = LinearEndomorphism::diagonal(&[qi(2), qi(3), qi(5)]);
        assert_eq!(t.lift(2, &b(3, &[0, 1])).unwrap(), b(3, &[0, 1]).scale(&qi(5)));
        let id = LinearEndomorphism::<Q>::identity(4);
        let w = &b(4, &[0, 2, 3]) + &b(4, &[1, 2, 3]).scale(&qi(-7));
        assert_eq!(id.lift(3, &w).unwrap(), w.scale(&qi(3)));
        let s = ConstantForm::scalar(3, qi(4));
        assert!(t.lift(0, &s).unwrap().is_zero());
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(MultiIndex::all(4, 2).len(), 6);
        assert_eq!(MultiIndex::all(3, 0), vec![MultiIndex::empty()]);
        assert!(MultiIndex::new(&[1, 0], 3).is_err());
        assert!(MultiIndex::new(&[0, 3], 3).is_err());
        assert_eq!(MultiIndex::sorted_with_sign(&[2, 0, 1]).unwrap().1, 1);
        assert_eq!(MultiIndex::sorted_with_sign(&[1, 0]).unwrap().1, -1);
        assert!(MultiIndex::sorted_with_sign(&[1, 1]).is_none());
    }
}
