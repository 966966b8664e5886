//! Stabilizer Lie algebras of calibration packages and the compliancy
//! criteria built on them.
//!
//! Every operation is generic over [`Linalg`]: with [`Rational`]
//! coefficients it is exact and reproducible, with `f64` it uses singular
//! value ranks with a configurable threshold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calibrations::{convert_form, evaluate_on_plane, CalibrationPackage};
use crate::exterior::{combinations, pairs, Form, OrientedPlane, SkewEndomorphism};
use crate::linalg::Linalg;
use crate::matrix::Mat;
use crate::scalar::{Rational, Scalar};
use crate::{Error, Result};

mod table;

pub use table::{expected_dims, table_packages, table_row, TableRow};

/// A linear subspace of `so(n)` with a canonical basis: reduced echelon
/// rows for exact coefficients, orthonormal for `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieSubspace<T: Scalar> {
    n: usize,
    basis: Vec<SkewEndomorphism<T>>,
    pub label: String,
}

impl<T: Linalg> LieSubspace<T> {
    /// The span of `elements`, reduced to a canonical basis.
    pub fn span(n: usize, elements: &[SkewEndomorphism<T>], label: impl Into<String>, tol: f64) -> Result<Self> {
        if let Some(x) = elements.iter().find(|x| x.ambient_dim() != n) {
            return Err(Error::DimensionMismatch(x.ambient_dim(), n));
        }
        let coords: Vec<Vec<T>> = elements.iter().map(SkewEndomorphism::coords).collect();
        Self::from_coords(n, &coords, label, tol)
    }

    fn from_coords(n: usize, coords: &[Vec<T>], label: impl Into<String>, tol: f64) -> Result<Self> {
        let d = n * n.saturating_sub(1) / 2;
        let basis = T::span(coords, d, tol)
            .iter()
            .map(|c| SkewEndomorphism::from_coords(n, c))
            .collect::<Result<_>>()?;
        Ok(Self { n, basis, label: label.into() })
    }

    /// All of `so(n)`.
    pub fn full(n: usize) -> Self {
        let basis = pairs(n)
            .map(|(i, j)| {
                let mut m = Mat::zeros(n, n);
                m[(i, j)] = T::one();
                m[(j, i)] = -T::one();
                SkewEndomorphism::from_matrix(m).expect("skew by construction")
            })
            .collect();
        Self { n, basis, label: format!("so({n})") }
    }

    pub fn zero(n: usize, label: impl Into<String>) -> Self {
        Self { n, basis: Vec::new(), label: label.into() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SkewEndomorphism<T>] {
        &self.basis
    }

    fn coords(&self) -> Vec<Vec<T>> {
        self.basis.iter().map(SkewEndomorphism::coords).collect()
    }

    /// Frobenius distance from `x` to the subspace.
    pub fn residual(&self, x: &SkewEndomorphism<T>) -> f64 {
        // Frobenius norm is √2 times the coordinate norm.
        std::f64::consts::SQRT_2 * T::residual(&self.coords(), &x.coords())
    }

    /// Membership: exact for rationals, `residual ≤ tol·max(1, ‖x‖)` for
    /// floats.
    pub fn contains(&self, x: &SkewEndomorphism<T>, tol: f64) -> bool {
        let r = self.residual(x);
        if T::is_exact() {
            r == 0.0
        } else {
            r <= tol * x.matrix().frobenius_norm().max(1.0)
        }
    }

    pub fn is_subspace_of(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n && self.basis.iter().all(|x| other.contains(x, tol))
    }

    /// Equality as subspaces, by double inclusion.
    pub fn same_subspace(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other, tol) && other.is_subspace_of(self, tol)
    }

    /// `[X, Y] ∈ self` for all basis elements.
    pub fn is_closed_under_bracket(&self, tol: f64) -> Result<bool> {
        brackets_within(self, self, self, tol)
    }

    /// Elements `Σ cᵢ gᵢ` of `self` whose image under `constraint` vanishes.
    fn solve_within(
        &self,
        label: impl Into<String>,
        tol: f64,
        constraint: impl Fn(&SkewEndomorphism<T>) -> Result<Vec<T>>,
    ) -> Result<Self> {
        if self.basis.is_empty() {
            return Ok(Self::zero(self.n, label));
        }
        let columns = self.basis.iter().map(&constraint).collect::<Result<Vec<_>>>()?;
        let rows = columns[0].len();
        let m = Mat::from_fn(rows, columns.len(), |r, c| columns[c][r].clone());
        let coords = self.coords();
        let d = coords[0].len();
        let combos: Vec<Vec<T>> = T::nullspace(&m, tol)
            .into_iter()
            .map(|c| {
                (0..d)
                    .map(|i| c.iter().zip(&coords).fold(T::zero(), |acc, (ci, g)| acc + ci.clone() * g[i].clone()))
                    .collect()
            })
            .collect();
        Self::from_coords(self.n, &combos, label, tol)
    }

    pub fn to_f64(&self) -> LieSubspace<f64> {
        let coords: Vec<Vec<f64>> = self.coords().iter().map(|c| c.iter().map(T::to_f64).collect()).collect();
        LieSubspace::from_coords(self.n, &coords, self.label.clone(), crate::linalg::DEFAULT_RANK_TOL)
            .expect("same dimension")
    }
}

/// True when `[x, y] ∈ target` for all basis elements `x ∈ a`, `y ∈ b`.
fn brackets_within<T: Linalg>(a: &LieSubspace<T>, b: &LieSubspace<T>, target: &LieSubspace<T>, tol: f64) -> Result<bool> {
    for x in a.basis() {
        for y in b.basis() {
            if !target.contains(&x.bracket(y)?, tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `𝔤 = {X ∈ so(n) : X ⋄ αⱼ = 0 for all j}`; all of `so(n)` when `forms`
/// is empty.
pub fn stabilizer_algebra<T: Linalg>(n: usize, forms: &[Form<T>], tol: f64) -> Result<LieSubspace<T>> {
    if let Some(f) = forms.iter().find(|f| f.ambient_dim() != n) {
        return Err(Error::DimensionMismatch(f.ambient_dim(), n));
    }
    let full = LieSubspace::<T>::full(n);
    if forms.is_empty() {
        return Ok(full);
    }
    let rows: Vec<(usize, Vec<usize>)> = forms
        .iter()
        .enumerate()
        .flat_map(|(j, f)| combinations(n, f.degree()).into_iter().map(move |i| (j, i)))
        .collect();
    full.solve_within("g", tol, |x| {
        let images = forms.iter().map(|f| f.diamond(x)).collect::<Result<Vec<_>>>()?;
        Ok(rows.iter().map(|(j, i)| images[*j].coefficient(i)).collect())
    })
}

/// Entries of `a X b`, row-major.
fn sandwich<T: Scalar>(a: &Mat<T>, x: &SkewEndomorphism<T>, b: &Mat<T>) -> Result<Vec<T>> {
    let m = a.mul(x.matrix())?.mul(b)?;
    Ok((0..m.rows()).flat_map(|i| m.row(i).to_vec()).collect())
}

fn projectors<T: Linalg>(g: &LieSubspace<T>, plane: &OrientedPlane<T>) -> Result<(Mat<T>, Mat<T>)> {
    if plane.ambient_dim() != g.ambient_dim() {
        return Err(Error::DimensionMismatch(plane.ambient_dim(), g.ambient_dim()));
    }
    let p = plane.projector();
    let perp = Mat::identity(g.ambient_dim()).sub(&p)?;
    Ok((p, perp))
}

/// `𝔥 = 𝔤 ∩ (Λ²W ⊕ Λ²W⊥)`: the elements with `Π X Π⊥ = 0`.
pub fn block_intersection<T: Linalg>(g: &LieSubspace<T>, plane: &OrientedPlane<T>, tol: f64) -> Result<LieSubspace<T>> {
    let (p, perp) = projectors(g, plane)?;
    g.solve_within("h", tol, |x| sandwich(&p, x, &perp))
}

/// `𝔤 ∩ (W ⊗ W⊥)`: the elements with `Π X Π = 0` and `Π⊥ X Π⊥ = 0`.
pub fn offdiagonal_intersection<T: Linalg>(
    g: &LieSubspace<T>,
    plane: &OrientedPlane<T>,
    tol: f64,
) -> Result<LieSubspace<T>> {
    let (p, perp) = projectors(g, plane)?;
    g.solve_within("g_cap_offdiag", tol, |x| {
        let mut v = sandwich(&p, x, &p)?;
        v.extend(sandwich(&perp, x, &perp)?);
        Ok(v)
    })
}

/// Orthogonal complement of `h` inside `g` for the `Λ²` inner product.
pub fn orthogonal_complement_in<T: Linalg>(g: &LieSubspace<T>, h: &LieSubspace<T>, tol: f64) -> Result<LieSubspace<T>> {
    if !h.is_subspace_of(g, tol) {
        return Err(Error::NotSubspace);
    }
    g.solve_within("h_perp_g", tol, |x| h.basis().iter().map(|y| y.inner(x)).collect())
}

/// `φ_W = Id_W × (-Id_{W⊥}) = 2Π - I`.
pub fn plane_involution<T: Scalar>(plane: &OrientedPlane<T>) -> Mat<T> {
    let p = plane.projector();
    p.scale(&T::from_i64(2)).sub(&Mat::identity(plane.ambient_dim())).expect("square")
}

fn check_orthogonal<T: Scalar>(p: &Mat<T>, tol: f64) -> Result<()> {
    if !p.is_square() {
        return Err(Error::Shape("expected a square matrix".into()));
    }
    let gram = p.transpose().mul(p)?;
    let id = Mat::<T>::identity(p.rows());
    let ok = if T::is_exact() {
        gram == id
    } else {
        gram.to_f64().max_abs_diff(&id.to_f64()) <= tol
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotOrthogonal)
    }
}

fn forms_agree<T: Scalar>(a: &Form<T>, b: &Form<T>, tol: f64) -> Result<bool> {
    if T::is_exact() {
        return Ok(a == b);
    }
    Ok(a.sub(b)?.norm() <= tol * b.norm().max(1.0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HatGMembership {
    pub member: bool,
    /// `P*αⱼ = signs[j] αⱼ`, or `0` when `P*αⱼ` is neither `αⱼ` nor `-αⱼ`.
    pub signs: Vec<i32>,
}

/// Whether `P*αⱼ = ±αⱼ` for every form.
pub fn hat_g_membership<T: Scalar>(p: &Mat<T>, forms: &[Form<T>], tol: f64) -> Result<HatGMembership> {
    check_orthogonal(p, tol)?;
    let mut signs = Vec::with_capacity(forms.len());
    for f in forms {
        let pulled = f.pullback(p)?;
        let sign = if forms_agree(&pulled, f, tol)? {
            1
        } else if forms_agree(&pulled, &f.neg(), tol)? {
            -1
        } else {
            0
        };
        signs.push(sign);
    }
    Ok(HatGMembership { member: signs.iter().all(|&s| s != 0), signs })
}

/// Whether `P X Pᵀ ∈ 𝔤` for every basis element of `𝔤`.
pub fn ad_preserves_check<T: Linalg>(g: &LieSubspace<T>, p: &Mat<T>, tol: f64) -> Result<bool> {
    for x in g.basis() {
        if !g.contains(&x.conjugate(p)?, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricPair {
    pub hh_in_h: bool,
    pub hm_in_m: bool,
    pub mm_in_h: bool,
}

impl SymmetricPair {
    pub fn all(&self) -> bool {
        self.hh_in_h && self.hm_in_m && self.mm_in_h
    }
}

/// Bracket relations `[𝔥,𝔥] ⊆ 𝔥`, `[𝔥,𝔪] ⊆ 𝔪`, `[𝔪,𝔪] ⊆ 𝔥`.
pub fn symmetric_pair_check<T: Linalg>(h: &LieSubspace<T>, m: &LieSubspace<T>, tol: f64) -> Result<SymmetricPair> {
    Ok(SymmetricPair {
        hh_in_h: brackets_within(h, h, h, tol)?,
        hm_in_m: brackets_within(h, m, m, tol)?,
        mm_in_h: brackets_within(m, m, h, tol)?,
    })
}

/// `‖X - proj_S X‖` in the Frobenius norm.
pub fn project_membership<T: Linalg>(s: &LieSubspace<T>, x: &SkewEndomorphism<T>) -> f64 {
    s.residual(x)
}

/// Parity of the normal degree `q` over the nonzero type components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

pub fn parity_class<T: Scalar>(form: &Form<T>, plane: &OrientedPlane<T>, tol: f64) -> Result<Parity> {
    let components = form.type_components(plane)?;
    let qs: Vec<usize> = components
        .iter()
        .filter(|(_, c)| T::is_exact() || c.norm() > tol)
        .map(|((_, q), _)| *q)
        .collect();
    Ok(if qs.iter().all(|q| q % 2 == 0) {
        Parity::Even
    } else if qs.iter().all(|q| q % 2 == 1) {
        Parity::Odd
    } else {
        Parity::Mixed
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub g: usize,
    pub h: usize,
    pub h_perp_g: usize,
    pub g_cap_offdiag: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub package: String,
    pub dims: Dims,
    /// `𝔥^⊥_𝔤 = 𝔤 ∩ (W ⊗ W⊥)` as subspaces.
    pub compliant: bool,
    pub parity: BTreeMap<String, Parity>,
    #[serde(rename = "involution_in_hatG")]
    pub involution_in_hat_g: bool,
    pub signs: BTreeMap<String, i32>,
    pub ad_phi_preserves_g: bool,
    pub symmetric_pair: SymmetricPair,
}

impl ComplianceReport {
    pub fn parity_uniform(&self) -> bool {
        self.parity.values().all(|p| *p != Parity::Mixed)
    }

    /// The implications `φ ∈ Ĝ ⇒ Ad-invariance`, `uniform parity ⇒
    /// compliant` and the equivalence `Ad-invariance ⇔ compliant`, plus
    /// `dim 𝔤 = dim 𝔥 + dim 𝔥^⊥_𝔤`.
    pub fn criteria_consistent(&self) -> bool {
        (!self.parity_uniform() || self.compliant)
            && (self.ad_phi_preserves_g == self.compliant)
            && (!self.involution_in_hat_g || self.ad_phi_preserves_g)
            && self.dims.g == self.dims.h + self.dims.h_perp_g
    }
}

/// The stabilizer data of a package at a plane, kept for reuse.
#[derive(Clone, Debug)]
pub struct Stabilizers<T: Scalar> {
    pub g: LieSubspace<T>,
    pub h: LieSubspace<T>,
    pub h_perp: LieSubspace<T>,
    pub offdiag: LieSubspace<T>,
}

impl<T: Linalg> Stabilizers<T> {
    pub fn compute(forms: &[Form<T>], plane: &OrientedPlane<T>, tol: f64) -> Result<Self> {
        let g = stabilizer_algebra(plane.ambient_dim(), forms, tol)?;
        let h = block_intersection(&g, plane, tol)?;
        let h_perp = orthogonal_complement_in(&g, &h, tol)?;
        let offdiag = offdiagonal_intersection(&g, plane, tol)?;
        Ok(Self { g, h, h_perp, offdiag })
    }

    pub fn for_package(package: &CalibrationPackage, plane: &OrientedPlane<T>, tol: f64) -> Result<Self> {
        let forms: Vec<Form<T>> = package.forms.iter().map(|(_, f)| convert_form(f)).collect();
        Self::compute(&forms, plane, tol)
    }

    pub fn dims(&self) -> Dims {
        Dims {
            g: self.g.dim(),
            h: self.h.dim(),
            h_perp_g: self.h_perp.dim(),
            g_cap_offdiag: self.offdiag.dim(),
        }
    }
}

/// Runs every compliancy criterion for `package` at `plane`, which must be
/// calibrated by the package's calibration.
pub fn compliance_check<T: Linalg>(
    package: &CalibrationPackage,
    plane: &OrientedPlane<T>,
    tol: f64,
) -> Result<ComplianceReport> {
    let forms: Vec<Form<T>> = package.forms.iter().map(|(_, f)| convert_form(f)).collect();
    let value = evaluate_on_plane(&forms[0], plane)?;
    let calibrated = if T::is_exact() {
        value == T::one()
    } else {
        (value.to_f64() - 1.0).abs() <= tol
    };
    if !calibrated {
        return Err(Error::NotCalibrated(format!("{value:?}")));
    }
    let st = Stabilizers::compute(&forms, plane, tol)?;
    let involution = plane_involution(plane);
    let hat_g = hat_g_membership(&involution, &forms, tol)?;
    let labels = package.forms.iter().map(|(l, _)| l.clone());
    let parity = labels
        .clone()
        .zip(&forms)
        .map(|(l, f)| Ok((l, parity_class(f, plane, tol)?)))
        .collect::<Result<_>>()?;
    Ok(ComplianceReport {
        package: package.name.to_string(),
        dims: st.dims(),
        compliant: st.h_perp.same_subspace(&st.offdiag, tol),
        parity,
        involution_in_hat_g: hat_g.member,
        signs: labels.zip(hat_g.signs).collect(),
        ad_phi_preserves_g: ad_preserves_check(&st.g, &involution, tol)?,
        symmetric_pair: symmetric_pair_check(&st.h, &st.h_perp, tol)?,
    })
}

/// Exact report at the package's standard plane.
pub fn standard_compliance(package: &CalibrationPackage) -> Result<ComplianceReport> {
    compliance_check::<Rational>(package, &package.plane, 0.0)
}
