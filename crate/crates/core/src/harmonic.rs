//! Homogeneous polynomial form spaces on `R^m`:
//!
//! * `P_{l,p}`: all `p`-forms with coefficients homogeneous of degree `l`;
//! * `H_{l,p}`: those with `Δω = 0` and `δω = 0`;
//! * `H′_{l,p}`: closed elements of `H_{l,p}`;
//! * `H″_{l,p}`: elements of `H_{l,p}` with `i_x ω ≡ 0`.
//!
//! Every space is computed as an exact rational nullspace with
//! deterministic pivoting, so bases are reproducible run to run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ballgeom::{BallDomain, BoundaryForm};
use crate::error::{Error, Result};
use crate::exalg::{Form, MultiIndex};
use crate::linalg::{Echelon, SparseRow};
use crate::polyform::{Monomial, PolyForm, PolyVectorField, Polynomial};
use crate::scalar::{Scalar, Q};

/// Reduces `q` modulo `|x|² − R²` by eliminating `x_m² = R² − Σ_{i<m} x_i²`.
///
/// The result has every exponent of the last variable below 2; it is the
/// unique such representative, so two polynomials agree on the sphere iff
/// their reductions are equal.
pub fn sphere_reduce<S: Scalar>(q: &Polynomial<S>, m: usize, radius: &S) -> Polynomial<S> {
    let last = m - 1;
    if q.terms().all(|(mono, _)| mono.exp(last) < 2) {
        return q.clone();
    }
    let mut s = Polynomial::constant(radius.clone() * radius.clone());
    for i in 0..last {
        s = s - &Polynomial::var(i) * &Polynomial::var(i);
    }
    let mut powers: Vec<Polynomial<S>> = vec![Polynomial::constant(S::one())];
    let mut out = Polynomial::zero();
    for (mono, c) in q.terms() {
        let e = mono.exp(last);
        if e < 2 {
            out.add_term(mono.clone(), c.clone());
            continue;
        }
        while powers.len() <= e / 2 {
            let next = powers.last().expect("non-empty") * &s;
            powers.push(next);
        }
        let mut exps = mono.exponents(m);
        exps[last] = e % 2;
        let base = Monomial::new(&exps);
        out = out + powers[e / 2].mul_monomial(&base).scale(c);
    }
    out
}

/// Monomials of degree `l` in `m` variables, in descending graded order.
pub fn monomials(m: usize, l: usize) -> Vec<Monomial> {
    fn rec(m: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Monomial>) {
        if k + 1 == m {
            cur[k] = left;
            out.push(Monomial::new(cur));
            return;
        }
        for e in (0..=left).rev() {
            cur[k] = e;
            rec(m, k + 1, left - e, cur, out);
        }
        cur[k] = 0;
    }
    let mut out = Vec::new();
    rec(m, 0, l, &mut vec![0; m], &mut out);
    out
}

/// Which subspace a basis spans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormSpaceKind {
    /// `P_{l,p}`
    Monomial,
    /// `H_{l,p}`
    Harmonic,
    /// `H′_{l,p}`
    Closed,
    /// `H″_{l,p}`
    NormalNull,
}

impl FormSpaceKind {
    pub fn label(self) -> &'static str {
        match self {
            FormSpaceKind::Monomial => "P",
            FormSpaceKind::Harmonic => "H",
            FormSpaceKind::Closed => "H-closed",
            FormSpaceKind::NormalNull => "H-normal-null",
        }
    }
}

/// A basis of one of the spaces, with coordinates over the monomial basis
/// of `P_{l,p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormSpaceBasis {
    pub m: usize,
    pub l: usize,
    pub p: usize,
    pub kind: FormSpaceKind,
    /// Coordinate vectors over [`monomial_keys`]`(m, l, p)`.
    pub coords: Vec<Vec<Q>>,
    pub basis: Vec<PolyForm<Q>>,
}

impl FormSpaceBasis {
    fn from_coords(m: usize, l: usize, p: usize, kind: FormSpaceKind, coords: Vec<Vec<Q>>) -> Self {
        let keys = monomial_keys(m, l, p);
        let basis = coords.iter().map(|v| assemble(m, p, &keys, v)).collect();
        FormSpaceBasis {
            m,
            l,
            p,
            kind,
            coords,
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Gram matrix `∫_{S^{m−1}(1)} ⟨ω_i, ω_j⟩` in units of `|S^{m−1}(1)|`.
    pub fn gram(&self) -> Vec<Vec<Q>> {
        let domain = BallDomain::<Q>::unit(self.m).expect("m ≥ 2");
        self.basis
            .iter()
            .map(|a| {
                self.basis
                    .iter()
                    .map(|b| domain.sphere_integral(&a.inner(b).expect("same degree")).units)
                    .collect()
            })
            .collect()
    }
}

/// Index of the monomial basis of `P_{l,p}`: form index major, monomial minor.
pub fn monomial_keys(m: usize, l: usize, p: usize) -> Vec<(MultiIndex, Monomial)> {
    let monos = monomials(m, l);
    MultiIndex::all(m, p)
        .into_iter()
        .flat_map(|idx| monos.iter().map(move |mono| (idx.clone(), mono.clone())))
        .collect()
}

fn assemble(m: usize, p: usize, keys: &[(MultiIndex, Monomial)], v: &[Q]) -> PolyForm<Q> {
    let mut form = Form::zero(m, p);
    for ((idx, mono), c) in keys.iter().zip(v) {
        if !c.is_zero() {
            form.add_term(idx.clone(), Polynomial::term(mono.clone(), c.clone()));
        }
    }
    form
}

/// Builds the constraint rows `Σ_j v_j L(e_j) = 0` from the images of basis elements.
fn constraint_rows(images: &[Vec<PolyForm<Q>>]) -> Vec<SparseRow> {
    let mut rows: BTreeMap<(usize, MultiIndex, Monomial), SparseRow> = BTreeMap::new();
    for (j, parts) in images.iter().enumerate() {
        for (block, form) in parts.iter().enumerate() {
            for (idx, poly) in form.terms() {
                for (mono, c) in poly.terms() {
                    rows.entry((block, idx.clone(), mono.clone()))
                        .or_default()
                        .insert(j, c.clone());
                }
            }
        }
    }
    rows.into_values().collect()
}

/// Nullspace of the stacked maps within the span of `forms`, as coefficient
/// vectors over `forms`, normalized to integer entries.
fn kernel_within(forms: &[PolyForm<Q>], maps: impl Fn(&PolyForm<Q>) -> Vec<PolyForm<Q>>) -> Vec<Vec<Q>> {
    let images: Vec<Vec<PolyForm<Q>>> = forms.iter().map(maps).collect();
    let rows = constraint_rows(&images);
    Echelon::new(rows, forms.len())
        .nullspace()
        .into_iter()
        .map(integer_normalize)
        .collect()
}

/// Scales a rational vector to coprime integers with a positive leading entry.
fn integer_normalize(v: Vec<Q>) -> Vec<Q> {
    use num_integer::Integer;
    let lcm = v
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * Q::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = ints
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::from(0), |acc, c| acc.gcd(c));
    let lead_negative = ints.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
    let gcd = if lead_negative { -gcd } else { gcd };
    if gcd.is_zero() {
        return v;
    }
    ints.into_iter().map(|c| Q::new(c, gcd.clone())).collect()
}

fn combine(coords: &[Vec<Q>], weights: &[Q]) -> Vec<Q> {
    let n = coords.first().map_or(0, Vec::len);
    let mut out = vec![Q::zero(); n];
    for (w, v) in weights.iter().zip(coords) {
        if w.is_zero() {
            continue;
        }
        for (o, c) in out.iter_mut().zip(v) {
            *o += w * c;
        }
    }
    out
}

/// `P_{l,p}`, dimension `C(m,p)·C(l+m−1, m−1)`.
pub fn monomial_form_basis(m: usize, l: usize, p: usize) -> Result<FormSpaceBasis> {
    if p > m {
        return Err(Error::DegreeOverflow { degree: p, dim: m });
    }
    let n = monomial_keys(m, l, p).len();
    let coords = (0..n)
        .map(|j| {
            let mut v = vec![Q::zero(); n];
            v[j] = Q::from_integer(1.into());
            v
        })
        .collect();
    Ok(FormSpaceBasis::from_coords(m, l, p, FormSpaceKind::Monomial, coords))
}

/// `H_{l,p} = {ω ∈ P_{l,p} : Δω = 0, δω = 0}`.
pub fn harmonic_field_basis(m: usize, l: usize, p: usize) -> Result<FormSpaceBasis> {
    let full = monomial_form_basis(m, l, p)?;
    let kernel = kernel_within(&full.basis, |w| {
        let mut parts = vec![w.hodge_laplacian()];
        if p > 0 {
            parts.push(w.codifferential().expect("p ≥ 1"));
        }
        parts
    });
    Ok(FormSpaceBasis::from_coords(m, l, p, FormSpaceKind::Harmonic, kernel))
}

/// Splits `H_{l,p}` into `(H′_{l,p}, H″_{l,p})`.
pub fn split_closed_normal_null(h: &FormSpaceBasis) -> Result<(FormSpaceBasis, FormSpaceBasis)> {
    if h.kind != FormSpaceKind::Harmonic {
        return Err(Error::Config(format!(
            "expected a harmonic-field basis, got {}",
            h.kind.label()
        )));
    }
    let (m, l, p) = (h.m, h.l, h.p);
    let closed = kernel_within(&h.basis, |w| {
        if p < m {
            vec![w.exterior_d().expect("p < m")]
        } else {
            Vec::new()
        }
    });
    let position = PolyVectorField::position(m);
    let normal_null = kernel_within(&h.basis, |w| {
        if p > 0 {
            vec![w.interior_field(&position).expect("p ≥ 1")]
        } else {
            vec![w.clone()]
        }
    });
    let lift = |ws: Vec<Vec<Q>>| ws.iter().map(|w| integer_normalize(combine(&h.coords, w))).collect();
    Ok((
        FormSpaceBasis::from_coords(m, l, p, FormSpaceKind::Closed, lift(closed)),
        FormSpaceBasis::from_coords(m, l, p, FormSpaceKind::NormalNull, lift(normal_null)),
    ))
}

/// Builds the requested space directly.
pub fn form_space(m: usize, l: usize, p: usize, kind: FormSpaceKind) -> Result<FormSpaceBasis> {
    match kind {
        FormSpaceKind::Monomial => monomial_form_basis(m, l, p),
        FormSpaceKind::Harmonic => harmonic_field_basis(m, l, p),
        FormSpaceKind::Closed => Ok(split_closed_normal_null(&harmonic_field_basis(m, l, p)?)?.0),
        FormSpaceKind::NormalNull => Ok(split_closed_normal_null(&harmonic_field_basis(m, l, p)?)?.1),
    }
}

/// Exact rank of a family of boundary forms.
pub fn boundary_rank(domain: &BallDomain<Q>, forms: &[PolyForm<Q>]) -> usize {
    let mut keys: BTreeMap<(MultiIndex, Monomial), usize> = BTreeMap::new();
    let mut rows: Vec<SparseRow> = Vec::new();
    for (j, f) in forms.iter().enumerate() {
        for (key, v) in domain.boundary_coordinates(f) {
            let next = keys.len();
            let r = *keys.entry(key).or_insert(next);
            if r == rows.len() {
                rows.push(SparseRow::new());
            }
            rows[r].insert(j, v);
        }
    }
    Echelon::new(rows, forms.len()).rank()
}

/// Ranks certifying that `δ^Σ : J*H′_{l,p} → J*H″_{l+1,p−1}` is an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsomorphismRanks {
    pub source_dim: usize,
    pub target_dim: usize,
    pub image_rank: usize,
    /// Rank of image and target together; equals `target_dim` iff the image lies in the target.
    pub joint_rank: usize,
}

impl IsomorphismRanks {
    pub fn is_isomorphism(&self) -> bool {
        self.source_dim == self.target_dim && self.image_rank == self.source_dim && self.joint_rank == self.target_dim
    }
}

pub fn delta_sigma_isomorphism(domain: &BallDomain<Q>, l: usize, p: usize) -> Result<IsomorphismRanks> {
    let m = domain.dim();
    if p == 0 {
        return Err(Error::InvalidDegree {
            op: "boundary codifferential",
            degree: 0,
        });
    }
    let closed = form_space(m, l, p, FormSpaceKind::Closed)?;
    let target = form_space(m, l + 1, p - 1, FormSpaceKind::NormalNull)?;
    let image: Vec<PolyForm<Q>> = closed
        .basis
        .iter()
        .map(|w| domain.boundary_delta(&BoundaryForm::new(w.clone())).map(|b| b.rep))
        .collect::<Result<_>>()?;
    let mut joint = image.clone();
    joint.extend(target.basis.iter().cloned());
    Ok(IsomorphismRanks {
        source_dim: closed.dim(),
        target_dim: boundary_rank(domain, &target.basis),
        image_rank: boundary_rank(domain, &image),
        joint_rank: boundary_rank(domain, &joint),
    })
}

/// Portable encoding of a rational: `[sign, numerator, denominator]` as decimal strings.
fn encode_q(v: &Q) -> [String; 3] {
    let sign = if v.is_negative() { "-" } else { "+" };
    [
        sign.to_string(),
        v.numer().magnitude().to_string(),
        v.denom().to_string(),
    ]
}

fn decode_q(e: &[String; 3]) -> Option<Q> {
    let num: BigInt = BigInt::from_biguint(Sign::Plus, e[1].parse().ok()?);
    let den: BigInt = e[2].parse().ok()?;
    if den.is_zero() {
        return None;
    }
    let v = Q::new(num, den);
    match e[0].as_str() {
        "+" => Some(v),
        "-" => Some(-v),
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
struct CacheDocument {
    m: usize,
    l: usize,
    p: usize,
    kind: FormSpaceKind,
    dimension: usize,
    ambient_dimension: usize,
    coefficients: Vec<Vec<[String; 3]>>,
}

/// On-disk store of computed bases, one JSON document per `(m, l, p, kind)`.
///
/// Documents are written to a temporary file and renamed into place, so
/// concurrent readers never observe a partial document and the last writer
/// wins with identical content.
#[derive(Clone, Debug)]
pub struct BasisCache {
    dir: PathBuf,
}

impl BasisCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(BasisCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, m: usize, l: usize, p: usize, kind: FormSpaceKind) -> PathBuf {
        self.dir.join(format!("basis-m{m}-l{l}-p{p}-{}.json", kind.label()))
    }

    pub fn load(&self, m: usize, l: usize, p: usize, kind: FormSpaceKind) -> Result<Option<FormSpaceBasis>> {
        let path = self.path(m, l, p, kind);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let bad = |reason: &str| Error::Cache {
            path: path.display().to_string(),
            reason: reason.to_string(),
        };
        let doc: CacheDocument = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
        if (doc.m, doc.l, doc.p, doc.kind) != (m, l, p, kind) {
            return Err(bad("key does not match file name"));
        }
        let ambient = monomial_keys(m, l, p).len();
        if doc.ambient_dimension != ambient || doc.coefficients.len() != doc.dimension {
            return Err(bad("dimension mismatch"));
        }
        let coords = doc
            .coefficients
            .iter()
            .map(|row| {
                if row.len() != ambient {
                    return Err(bad("coefficient vector has wrong length"));
                }
                row.iter()
                    .map(|e| decode_q(e).ok_or_else(|| bad("malformed rational")))
                    .collect()
            })
            .collect::<Result<Vec<Vec<Q>>>>()?;
        Ok(Some(FormSpaceBasis::from_coords(m, l, p, kind, coords)))
    }

    pub fn store(&self, basis: &FormSpaceBasis) -> Result<()> {
        let doc = CacheDocument {
            m: basis.m,
            l: basis.l,
            p: basis.p,
            kind: basis.kind,
            dimension: basis.dim(),
            ambient_dimension: monomial_keys(basis.m, basis.l, basis.p).len(),
            coefficients: basis.coords.iter().map(|v| v.iter().map(encode_q).collect()).collect(),
        };
        let path = self.path(basis.m, basis.l, basis.p, basis.kind);
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        let text = serde_json::to_string(&doc).expect("cache document serializes");
        fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    /// Loads the basis, computing and storing it on a miss.
    pub fn get(&self, m: usize, l: usize, p: usize, kind: FormSpaceKind) -> Result<FormSpaceBasis> {
        if let Some(b) = self.load(m, l, p, kind)? {
            return Ok(b);
        }
        let b = form_space(m, l, p, kind)?;
        self.store(&b)?;
        Ok(b)
    }
}

/// Fetches a basis through the optional cache.
pub fn cached_form_space(
    cache: Option<&BasisCache>,
    m: usize,
    l: usize,
    p: usize,
    kind: FormSpaceKind,
) -> Result<FormSpaceBasis> {
    match cache {
        Some(c) => c.get(m, l, p, kind),
        None => form_space(m, l, p, kind),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi, Q};
    use num_traits::One;

    type P = Polynomial<Q>;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn sphere_reduce_examples() {
        let r2 = P::radius_sq(3);
        assert_eq!(sphere_reduce(&r2, 3, &qi(1)), P::one());
        let x1sq = &P::var(0) * &P::var(0);
        let q = &(&x1sq * &r2) - &x1sq;
        assert!(sphere_reduce(&q, 3, &qi(1)).is_zero());
        let z4 = &(&P::var(2) * &P::var(2)) * &(&P::var(2) * &P::var(1));
        let once = sphere_reduce(&z4, 3, &qi(2));
        assert_eq!(sphere_reduce(&once, 3, &qi(2)), once);
    }

    #[test]
    fn monomial_dimensions() {
        for (m, l, p) in [(3, 0, 1), (3, 1, 1), (4, 2, 2), (2, 3, 0)] {
            let b = monomial_form_basis(m, l, p).unwrap();
            assert_eq!(b.dim(), binom(m, p) * binom(l + m - 1, m - 1));
        }
    }

    #[test]
    fn harmonic_l1_p1_in_three_dimensions() {
        let h = harmonic_field_basis(3, 1, 1).unwrap();
        for w in &h.basis {
            assert!(w.hodge_laplacian().is_zero());
            assert!(w.codifferential().unwrap().is_zero());
        }
        let (closed, normal_null) = split_closed_normal_null(&h).unwrap();
        assert_eq!(normal_null.dim(), 3);
        // rotation x2 dx1 − x1 dx2 lies in H″
        let rot = &PolyForm::from_constant(&Form::basis(3, &[0]).unwrap()).mul_poly(&P::var(1))
            - &PolyForm::from_constant(&Form::basis(3, &[1]).unwrap()).mul_poly(&P::var(0));
        let mut family = normal_null.basis.clone();
        family.push(rot);
        let domain = BallDomain::unit(3).unwrap();
        assert_eq!(boundary_rank(&domain, &family), 3);
        // closed + normal-null fill H exactly at l = 1
        assert_eq!(closed.dim() + normal_null.dim(), h.dim());
    }

    #[test]
    fn constants_are_closed_harmonic() {
        let h = harmonic_field_basis(3, 0, 1).unwrap();
        assert_eq!(h.dim(), 3);
        let (closed, _) = split_closed_normal_null(&h).unwrap();
        assert_eq!(closed.dim(), 3);
    }

    #[test]
    fn rational_encoding_round_trips() {
        for v in [qi(0), qi(-7), Q::new(3.into(), (-8).into())] {
            assert_eq!(decode_q(&encode_q(&v)).unwrap(), v);
        }
    }
}
