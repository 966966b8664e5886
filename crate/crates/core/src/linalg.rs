//! Subspace computations shared by the exact and floating pipelines.
//!
//! Subspaces of `R^d` are stored as lists of basis vectors. The exact
//! backend keeps them in reduced row echelon form (so equal subspaces have
//! equal bases); the floating backend keeps orthonormal bases obtained from
//! singular value decompositions.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::matrix::Mat;
use crate::scalar::{Rational, Scalar};

/// Default absolute singular-value threshold of the floating backend.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Linear algebra used by the stabilizer pipeline. `tol` is ignored by the
/// exact backend.
pub trait Linalg: Scalar {
    /// A basis of `{x : m x = 0}`.
    fn nullspace(m: &Mat<Self>, tol: f64) -> Vec<Vec<Self>>;

    /// A canonical basis of the span of `vectors` (all of length `dim`).
    fn span(vectors: &[Vec<Self>], dim: usize, tol: f64) -> Vec<Vec<Self>>;

    /// Euclidean distance from `v` to the span of a basis returned by
    /// [`Linalg::span`] or [`Linalg::nullspace`] after canonicalization.
    fn residual(basis: &[Vec<Self>], v: &[Self]) -> f64;
}

impl Linalg for Rational {
    fn nullspace(m: &Mat<Self>, _tol: f64) -> Vec<Vec<Self>> {
        let (rref, pivots) = rref(m);
        let d = m.cols();
        let mut out = Vec::new();
        for free in (0..d).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Rational::zero(); d];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -rref[(row, free)].clone();
            }
            out.push(v);
        }
        Self::span(&out, d, 0.0)
    }

    fn span(vectors: &[Vec<Self>], dim: usize, _tol: f64) -> Vec<Vec<Self>> {
        if vectors.is_empty() {
            return Vec::new();
        }
        let m = Mat::from_rows(vectors.to_vec()).expect("vectors share a length");
        let (rref, pivots) = rref(&m);
        debug_assert_eq!(m.cols(), dim);
        (0..pivots.len()).map(|r| rref.row(r).to_vec()).collect()
    }

    fn residual(basis: &[Vec<Self>], v: &[Self]) -> f64 {
        exact_residual_squared(basis, v).to_f64().sqrt()
    }
}

impl Linalg for f64 {
    fn nullspace(m: &Mat<Self>, tol: f64) -> Vec<Vec<Self>> {
        let d = m.cols();
        if d == 0 {
            return Vec::new();
        }
        // Pad to at least d rows so the thin SVD returns a full V.
        let rows = m.rows().max(d);
        let a = DMatrix::from_fn(rows, d, |i, j| if i < m.rows() { m[(i, j)] } else { 0.0 });
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested V");
        (0..d)
            .filter(|&i| svd.singular_values[i] <= tol)
            .map(|i| v_t.row(i).iter().copied().collect())
            .collect()
    }

    fn span(vectors: &[Vec<Self>], dim: usize, tol: f64) -> Vec<Vec<Self>> {
        if vectors.is_empty() || dim == 0 {
            return Vec::new();
        }
        let a = DMatrix::from_fn(dim, vectors.len(), |i, j| vectors[j][i]);
        let svd = a.svd(true, false);
        let u = svd.u.expect("requested U");
        (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > tol)
            .map(|i| u.column(i).iter().copied().collect())
            .collect()
    }

    fn residual(basis: &[Vec<Self>], v: &[Self]) -> f64 {
        let mut r = v.to_vec();
        for b in basis {
            let d: f64 = b.iter().zip(v).map(|(x, y)| x * y).sum();
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= d * bi;
            }
        }
        r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `‖v - proj v‖²` computed exactly through the Gram system of `basis`.
pub fn exact_residual_squared(basis: &[Vec<Rational>], v: &[Rational]) -> Rational {
    let dot = |a: &[Rational], b: &[Rational]| {
        a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
    };
    let vv = dot(v, v);
    if basis.is_empty() {
        return vv;
    }
    let r = basis.len();
    let gram = Mat::from_fn(r, r, |i, j| dot(&basis[i], &basis[j]));
    let rhs: Vec<Rational> = basis.iter().map(|b| dot(b, v)).collect();
    let inv = crate::exterior::invert(&gram).expect("basis is independent");
    let coeffs = inv.mul_vec(&rhs).expect("shapes agree");
    // ‖v‖² - bᵀ G⁻¹ b
    vv - dot(&coeffs, &rhs)
}

/// Reduced row echelon form by fraction-free (Bareiss) forward elimination
/// followed by back substitution. The pivot in each column is the first
/// nonzero entry at or below the current row, so the result is
/// deterministic. Returns the reduced matrix and the pivot columns.
pub fn rref(m: &Mat<Rational>) -> (Mat<Rational>, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows).map(|i| integer_row(m.row(i))).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        // Rows above the pivot row keep their entries; only the rows below
        // are in Bareiss form, which is all back substitution needs.
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }

    let mut out = Mat::from_fn(rows, cols, |i, j| Rational::from_integer(a[i][j].clone()));
    for (row, &c) in pivots.iter().enumerate().rev() {
        let pv = out[(row, c)].clone();
        for j in 0..cols {
            out[(row, j)] = out[(row, j)].clone() / pv.clone();
        }
        for above in 0..row {
            let f = out[(above, c)].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..cols {
                let v = out[(row, j)].clone() * f.clone();
                out[(above, j)] = out[(above, j)].clone() - v;
            }
        }
    }
    (out, pivots)
}

/// Scales a rational row by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Rank of a rational matrix.
pub fn rank(m: &Mat<Rational>) -> usize {
    rref(m).1.len()
}

/// True when `v` is the zero vector (exactly, or within `tol`).
pub fn is_zero_vector<T: Scalar>(v: &[T], tol: f64) -> bool {
    if T::is_exact() {
        v.iter().all(|x| x.is_zero())
    } else {
        v.iter().all(|x| x.to_f64().abs() <= tol)
    }
}

/// Largest absolute entry.
pub fn max_abs<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::strategy::Strategy;

    fn mat(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn rref_matches_hand_reduction() {
        let m = mat(&[&[2, 4, 1, 3], &[1, 2, 1, 1], &[3, 6, 2, 4]]);
        let (r, pivots) = rref(&m);
        assert_eq!(pivots, vec![0, 2]);
        assert_eq!(r.row(0), &[int(1), int(2), int(0), int(2)]);
        assert_eq!(r.row(1), &[int(0), int(0), int(1), int(-1)]);
        assert!(r.row(2).iter().all(Zero::is_zero));
    }

    #[test]
    fn exact_nullspace_is_annihilated() {
        let m = mat(&[&[1, 1, 1, 1], &[1, -1, 2, 0]]);
        let ns = Rational::nullspace(&m, 0.0);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(is_zero_vector(&m.mul_vec(v).unwrap(), 0.0));
        }
    }

    #[test]
    fn exact_residual_against_a_line() {
        let basis = vec![vec![int(1), int(1)]];
        assert_eq!(exact_residual_squared(&basis, &[int(1), int(-1)]), int(2));
        assert_eq!(exact_residual_squared(&basis, &[rat(3, 2), rat(3, 2)]), int(0));
    }

    #[test]
    fn float_nullspace_matches_exact_dimension() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(f64::nullspace(&m.to_f64(), DEFAULT_RANK_TOL).len(), 2);
        assert_eq!(Rational::nullspace(&m, 0.0).len(), 2);
        assert_eq!(rank(&m), 1);
    }

    /// Plain rational Gauss–Jordan, used as an oracle for the Bareiss path.
    fn naive_rref(m: &Mat<Rational>) -> Mat<Rational> {
        let mut a = m.clone();
        let mut r = 0;
        for c in 0..a.cols() {
            let Some(p) = (r..a.rows()).find(|&i| !a[(i, c)].is_zero()) else { continue };
            for j in 0..a.cols() {
                let (x, y) = (a[(r, j)].clone(), a[(p, j)].clone());
                a[(r, j)] = y;
                a[(p, j)] = x;
            }
            let pv = a[(r, c)].clone();
            for j in 0..a.cols() {
                a[(r, j)] = a[(r, j)].clone() / pv.clone();
            }
            for i in 0..a.rows() {
                if i != r {
                    let f = a[(i, c)].clone();
                    for j in 0..a.cols() {
                        let v = a[(r, j)].clone() * f.clone();
                        a[(i, j)] = a[(i, j)].clone() - v;
                    }
                }
            }
            r += 1;
            if r == a.rows() {
                break;
            }
        }
        a
    }

    proptest::proptest! {
        #[test]
        fn bareiss_agrees_with_naive_elimination(
            (rows, cols, entries) in (1usize..6, 1usize..7)
                .prop_flat_map(|(r, c)| (proptest::strategy::Just(r), proptest::strategy::Just(c),
                    proptest::collection::vec((-3i64..=3, 1i64..=3), r * c)))
        ) {
            let m = Mat::from_fn(rows, cols, |i, j| {
                let (p, q) = entries[i * cols + j];
                // Sparse-ish entries exercise skipped pivot columns.
                if (p + q) % 3 == 0 { int(0) } else { rat(p, q) }
            });
            proptest::prop_assert_eq!(rref(&m).0, naive_rref(&m));
        }
    }

    #[test]
    fn float_span_is_orthonormal() {
        let vs = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]];
        let b = f64::span(&vs, 3, DEFAULT_RANK_TOL);
        assert_eq!(b.len(), 2);
        assert!(f64::residual(&b, &[1.0, 2.0, 1.0]) < 1e-12);
        assert!((f64::residual(&b, &[1.0, -1.0, 1.0]) - 3f64.sqrt()).abs() < 1e-12);
    }
}
