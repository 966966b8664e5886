//! Finite-difference extrinsic geometry of parametrized submanifolds of flat
//! `Rⁿ`, and residual checks of the structure equations satisfied by
//! calibrated submanifolds.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

mod catalog;
mod checks;
#[cfg(test)]
mod tests;

pub use catalog::{Example, ExampleName, Geometry};
pub use checks::{
    calibrated_residual, convergence, run_checks, CheckResult, ConvergenceEntry, ImmersionConfig, ResidualReport,
    CONVERGENCE_FLOOR, CONVERGENCE_RANGE,
};

/// Smallest singular value of `∂F` accepted as an immersion.
pub const IMMERSION_SIGMA_MIN: f64 = 1e-6;

/// Position and central-difference derivatives of a parametrization at `u`.
#[derive(Clone, Debug)]
pub struct ImmersionJet {
    pub u: Vec<f64>,
    pub h: f64,
    pub position: DVector<f64>,
    /// `n × k`, column `a` is `∂_a F`.
    pub first: DMatrix<f64>,
    /// `second[a]` is `n × k` with column `b` equal to `∂_a ∂_b F`.
    pub second: Vec<DMatrix<f64>>,
}

fn shifted(u: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut v = u.to_vec();
    for &(a, d) in moves {
        v[a] += d;
    }
    v
}

/// Samples `F` and its first and second derivatives at `u` with step `h`.
pub fn sample_jet(geometry: &Geometry, u: &[f64], h: f64) -> Result<ImmersionJet> {
    let k = geometry.param_dim();
    let n = geometry.ambient_dim();
    if u.len() != k {
        return Err(Error::DimensionMismatch(u.len(), k));
    }
    let f = |moves: &[(usize, f64)]| DVector::from_vec(geometry.eval(&shifted(u, moves)));
    let position = f(&[]);
    let mut first = DMatrix::zeros(n, k);
    for a in 0..k {
        first.set_column(a, &((f(&[(a, h)]) - f(&[(a, -h)])) / (2.0 * h)));
    }
    let mut second = vec![DMatrix::zeros(n, k); k];
    for a in 0..k {
        let d = (f(&[(a, h)]) - &position * 2.0 + f(&[(a, -h)])) / (h * h);
        second[a].set_column(a, &d);
        for b in 0..a {
            let d = (f(&[(a, h), (b, h)]) - f(&[(a, h), (b, -h)]) - f(&[(a, -h), (b, h)]) + f(&[(a, -h), (b, -h)]))
                / (4.0 * h * h);
            second[a].set_column(b, &d);
            second[b].set_column(a, &d);
        }
    }
    let sigma = first.singular_values().min();
    if sigma <= IMMERSION_SIGMA_MIN {
        return Err(Error::NotImmersion { point: u.to_vec(), sigma });
    }
    Ok(ImmersionJet { u: u.to_vec(), h, position, first, second })
}

/// Orthonormal adapted frame at a point.
#[derive(Clone, Debug)]
pub struct Frames {
    /// `n × k` Gram–Schmidt of the columns of `∂F`.
    pub tangent: DMatrix<f64>,
    /// `n × (n-k)`, oriented so that `det[T | N] > 0`.
    pub normal: DMatrix<f64>,
    /// Upper triangular `R` with `∂F = T R`.
    pub r: DMatrix<f64>,
}

impl Frames {
    /// `[T | N]`.
    pub fn full(&self) -> DMatrix<f64> {
        let (n, k) = self.tangent.shape();
        let mut f = DMatrix::zeros(n, n);
        f.view_mut((0, 0), (n, k)).copy_from(&self.tangent);
        f.view_mut((0, k), (n, n - k)).copy_from(&self.normal);
        f
    }

    /// `R⁻¹`: column `i` holds the coordinates of `e_i` in `∂_1F, …, ∂_kF`.
    pub fn r_inverse(&self) -> DMatrix<f64> {
        self.r.clone().try_inverse().expect("immersion has invertible R")
    }
}

/// Extends the orthonormal list `start` by Gram–Schmidt on `candidates`,
/// dropping candidates whose residual norm is at most `skip`.
fn gram_schmidt(start: &[DVector<f64>], candidates: &[DVector<f64>], skip: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = start.to_vec();
    for c in candidates {
        let mut v = c.clone();
        // Two passes keep the result orthonormal to machine precision.
        for _ in 0..2 {
            for q in &out {
                let d = q.dot(&v);
                v.axpy(-d, q, 1.0);
            }
        }
        let norm = v.norm();
        if norm > skip {
            out.push(v / norm);
        }
    }
    out
}

/// Tangent frame from `∂F`; normal frame from the projections of the
/// columns of `completion` onto the normal space, in order, skipping
/// near-parallel candidates.
pub fn adapted_frames(jet: &ImmersionJet, completion: &DMatrix<f64>) -> Result<Frames> {
    let (n, k) = jet.first.shape();
    let columns: Vec<DVector<f64>> = (0..k).map(|a| jet.first.column(a).into_owned()).collect();
    let tangent_cols = gram_schmidt(&[], &columns, 0.0);
    if tangent_cols.len() != k {
        return Err(Error::NotImmersion { point: jet.u.clone(), sigma: 0.0 });
    }
    let tangent = DMatrix::from_columns(&tangent_cols);
    let r = tangent.transpose() * &jet.first;
    let candidates: Vec<DVector<f64>> = (0..completion.ncols()).map(|j| completion.column(j).into_owned()).collect();
    let mut all = gram_schmidt(&tangent_cols, &candidates, 0.3);
    if all.len() < n {
        let standard: Vec<DVector<f64>> = (0..n)
            .map(|i| DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect();
        all = gram_schmidt(&all, &standard, 0.3);
    }
    if all.len() != n {
        return Err(Error::Shape("could not complete the normal frame".into()));
    }
    let mut normal = DMatrix::from_columns(&all[k..]);
    let frames = Frames { tangent, normal: normal.clone(), r };
    if n > k && frames.full().determinant() < 0.0 {
        let last = n - k - 1;
        normal.column_mut(last).neg_mut();
        return Ok(Frames { normal, ..frames });
    }
    Ok(frames)
}

/// Second fundamental form and derived operators at a point.
#[derive(Clone, Debug)]
pub struct ExtrinsicData {
    pub u: Vec<f64>,
    pub frames: Frames,
    /// `a[ξ][(i, j)] = ⟨A(e_i, e_j), ν_ξ⟩`.
    pub a: Vec<DMatrix<f64>>,
    /// Mean curvature vector `Σ_j A(e_j, e_j)` in ambient coordinates.
    pub mean_curvature: DVector<f64>,
    /// `B_{e_i}` as ambient skew matrices.
    pub b: Vec<DMatrix<f64>>,
    /// `B_{∂_a F}` as ambient skew matrices.
    pub b_coord: Vec<DMatrix<f64>>,
}

/// `Σ_{j,ξ} c[ξ][j] (ν_ξ e_jᵀ - e_j ν_ξᵀ)`.
fn assemble_b(frames: &Frames, c: &[DVector<f64>]) -> DMatrix<f64> {
    let n = frames.tangent.nrows();
    let mut b = DMatrix::zeros(n, n);
    for (xi, row) in c.iter().enumerate() {
        let nu = frames.normal.column(xi);
        for (j, &v) in row.iter().enumerate() {
            let e = frames.tangent.column(j);
            b += (nu * e.transpose() - e * nu.transpose()) * v;
        }
    }
    b
}

pub fn second_fundamental_form(jet: &ImmersionJet, frames: &Frames) -> ExtrinsicData {
    let (n, k) = jet.first.shape();
    let r_inv = frames.r_inverse();
    // Coordinate components ⟨∂_a∂_b F, ν_ξ⟩.
    let coord: Vec<DMatrix<f64>> = (0..n - k)
        .map(|xi| {
            let nu = frames.normal.column(xi);
            DMatrix::from_fn(k, k, |a, b| nu.dot(&jet.second[a].column(b)))
        })
        .collect();
    let a: Vec<DMatrix<f64>> = coord.iter().map(|c| r_inv.transpose() * c * &r_inv).collect();
    let mut mean_curvature = DVector::zeros(n);
    for (xi, m) in a.iter().enumerate() {
        mean_curvature += frames.normal.column(xi) * m.trace();
    }
    let b = (0..k)
        .map(|i| assemble_b(frames, &a.iter().map(|m| m.row(i).transpose()).collect::<Vec<_>>()))
        .collect();
    // A(∂_a, e_j) = Σ_c R⁻¹_{cj} A(∂_a, ∂_c).
    let b_coord = (0..k)
        .map(|ca| {
            let rows: Vec<DVector<f64>> = coord.iter().map(|m| (m.row(ca) * &r_inv).transpose()).collect();
            assemble_b(frames, &rows)
        })
        .collect();
    ExtrinsicData { u: jet.u.clone(), frames: frames.clone(), a, mean_curvature, b, b_coord }
}
