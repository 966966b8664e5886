use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Floating planes must have `‖QᵀQ - I‖_max` below this.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// An oriented `k`-plane in `Rⁿ`, given by an orthonormal basis whose column
/// order fixes the orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedPlane<T: Scalar> {
    basis: Mat<T>,
}

impl<T: Scalar> OrientedPlane<T> {
    /// Checks orthonormality exactly for exact scalars, to
    /// [`ORTHONORMAL_TOL`] otherwise.
    pub fn new(basis: Mat<T>) -> Result<Self> {
        if basis.cols() > basis.rows() {
            return Err(Error::DegreeOverflow {
                degree: basis.cols(),
                n: basis.rows(),
            });
        }
        let gram = basis.transpose().mul(&basis)?;
        let id = Mat::identity(basis.cols());
        let ok = if T::is_exact() {
            gram == id
        } else {
            gram.to_f64().max_abs_diff(&id.to_f64()) <= ORTHONORMAL_TOL
        };
        if !ok {
            return Err(Error::NotOrthonormal);
        }
        Ok(Self { basis })
    }

    /// The coordinate plane spanned by `e_{i₁}, …, e_{i_k}` in that order
    /// (1-based indices).
    pub fn axis(n: usize, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::InvalidIndex {
                index: indices.to_vec(),
                n,
            });
        }
        Self::new(Mat::from_fn(n, indices.len(), |i, j| {
            if indices[j] == i + 1 {
                T::one()
            } else {
                T::zero()
            }
        }))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn plane_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Mat<T> {
        &self.basis
    }

    /// Orthogonal projector `Q Qᵀ` onto the plane.
    pub fn projector(&self) -> Mat<T> {
        self.basis.mul(&self.basis.transpose()).expect("shapes agree")
    }

    /// Coordinate indices (1-based) when every column is `±e_i`.
    pub fn axis_indices(&self) -> Option<Vec<usize>> {
        (0..self.plane_dim())
            .map(|j| {
                let nz: Vec<usize> = (0..self.ambient_dim())
                    .filter(|&i| !self.basis[(i, j)].is_zero())
                    .collect();
                (nz.len() == 1).then(|| nz[0] + 1)
            })
            .collect()
    }

    /// Applies an orthogonal map: the plane spanned by `P q_j`.
    pub fn transformed(&self, p: &Mat<T>) -> Result<Self> {
        Self::new(p.mul(&self.basis)?)
    }

    pub fn to_f64(&self) -> OrientedPlane<f64> {
        OrientedPlane {
            basis: self.basis.to_f64(),
        }
    }

    /// An oriented orthonormal basis of `W⊥`, chosen so that `[W | W⊥]` is
    /// positively oriented.
    ///
    /// Exact planes are supported only when axis-aligned (rational
    /// orthonormal completions need not exist in general).
    pub fn orthogonal_complement(&self) -> Result<Mat<T>> {
        let n = self.ambient_dim();
        let k = self.plane_dim();
        let mut columns: Vec<Vec<T>> = Vec::with_capacity(n - k);
        if T::is_exact() {
            let used = self.axis_indices().ok_or_else(|| {
                Error::Unsupported("exact complement of a non-axis-aligned plane".into())
            })?;
            for i in 1..=n {
                if !used.contains(&i) {
                    columns.push((1..=n).map(|r| if r == i { T::one() } else { T::zero() }).collect());
                }
            }
        } else {
            let mut frame: Vec<Vec<f64>> = (0..k).map(|j| self.basis.column(j).iter().map(T::to_f64).collect()).collect();
            for i in 0..n {
                if frame.len() == n {
                    break;
                }
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                for f in &frame {
                    let d: f64 = f.iter().zip(&v).map(|(a, b)| a * b).sum();
                    for (vi, fi) in v.iter_mut().zip(f) {
                        *vi -= d * fi;
                    }
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                // Skip candidates nearly inside the span built so far.
                if norm < 0.3 {
                    continue;
                }
                v.iter_mut().for_each(|x| *x /= norm);
                frame.push(v);
            }
            for v in &frame[k..] {
                columns.push(v.iter().map(|&x| T::from_f64_lossy(x)).collect());
            }
        }
        let mut complement = Mat::from_columns(n, &columns)?;
        if n > k {
            let full = Mat::from_fn(n, n, |i, j| {
                if j < k {
                    self.basis[(i, j)].clone()
                } else {
                    complement[(i, j - k)].clone()
                }
            });
            if full.det()? < T::zero() {
                for i in 0..n {
                    let v = complement[(i, n - k - 1)].clone();
                    complement[(i, n - k - 1)] = -v;
                }
            }
        }
        Ok(complement)
    }
}
