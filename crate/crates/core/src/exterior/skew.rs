use crate::exterior::Form;
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// An element of `so(n)`, stored as an `n × n` skew matrix.
///
/// The identification with 2-forms is `e^i∧e^j (i < j) ↦ X` with
/// `X_ij = 1 = -X_ji`, which makes [`Form::diamond`] agree with the
/// coordinate formula for `X ⋄ α`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewEndomorphism<T: Scalar> {
    m: Mat<T>,
}

impl<T: Scalar> SkewEndomorphism<T> {
    pub fn zero(n: usize) -> Self {
        Self { m: Mat::zeros(n, n) }
    }

    /// Accepts `m` only if it is square with `m_ij = -m_ji` exactly.
    pub fn from_matrix(m: Mat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("skew endomorphism must be square".into()));
        }
        let n = m.rows();
        for i in 0..n {
            for j in 0..=i {
                if m[(i, j)] != -m[(j, i)].clone() {
                    return Err(Error::NotSkew);
                }
            }
        }
        Ok(Self { m })
    }

    /// The skew part `(m - mᵀ)/2` of a square matrix.
    pub fn skew_part(m: &Mat<T>) -> Result<Self> {
        let two = T::from_i64(2);
        let s = m.sub(&m.transpose())?;
        Self::from_matrix(s.map(|x| x.clone() / two.clone()))
    }

    pub fn from_form(form: &Form<T>) -> Result<Self> {
        if form.degree() != 2 {
            return Err(Error::DegreeMismatch(form.degree(), 2));
        }
        let n = form.ambient_dim();
        let mut m = Mat::zeros(n, n);
        for (index, coef) in form.terms() {
            let (i, j) = (index[0] - 1, index[1] - 1);
            m[(i, j)] = coef.clone();
            m[(j, i)] = -coef.clone();
        }
        Ok(Self { m })
    }

    pub fn to_form(&self) -> Form<T> {
        let n = self.ambient_dim();
        Form::from_terms(
            n,
            2,
            pairs(n).map(|(i, j)| (vec![i + 1, j + 1], self.m[(i, j)].clone())),
        )
        .expect("valid indices")
    }

    /// Coordinates on the basis `e_i∧e_j`, `i < j`, in lexicographic order.
    pub fn coords(&self) -> Vec<T> {
        pairs(self.ambient_dim())
            .map(|(i, j)| self.m[(i, j)].clone())
            .collect()
    }

    pub fn from_coords(n: usize, coords: &[T]) -> Result<Self> {
        if coords.len() != n * (n - 1) / 2 {
            return Err(Error::Shape(format!(
                "expected {} coordinates for so({n})",
                n * (n - 1) / 2
            )));
        }
        let mut m = Mat::zeros(n, n);
        for ((i, j), c) in pairs(n).zip(coords) {
            m[(i, j)] = c.clone();
            m[(j, i)] = -c.clone();
        }
        Ok(Self { m })
    }

    pub fn ambient_dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.m[(i, j)]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            m: self.m.add(&other.m)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            m: self.m.sub(&other.m)?,
        })
    }

    pub fn scale(&self, factor: &T) -> Self {
        Self {
            m: self.m.scale(factor),
        }
    }

    /// Matrix commutator `XY - YX`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let xy = self.m.mul(&other.m)?;
        let yx = other.m.mul(&self.m)?;
        Ok(Self { m: xy.sub(&yx)? })
    }

    /// `P X Pᵀ`, which is `Ad(P) X` for orthogonal `P`.
    pub fn conjugate(&self, p: &Mat<T>) -> Result<Self> {
        let m = p.mul(&self.m)?.mul(&p.transpose())?;
        Self::from_matrix(m.clone()).or_else(|_| {
            if T::is_exact() {
                Err(Error::NotSkew)
            } else {
                Self::skew_part(&m)
            }
        })
    }

    /// Inner product matching `Form::inner` on 2-forms: `Σ_{i<j} X_ij Y_ij`.
    pub fn inner(&self, other: &Self) -> Result<T> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch(self.ambient_dim(), other.ambient_dim()));
        }
        Ok(self
            .coords()
            .into_iter()
            .zip(other.coords())
            .fold(T::zero(), |acc, (a, b)| acc + a * b))
    }

    pub fn to_f64(&self) -> SkewEndomorphism<f64> {
        SkewEndomorphism {
            m: self.m.to_f64(),
        }
    }
}

/// Index pairs `(i, j)`, `i < j`, 0-based, in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}
