//! Exterior forms on `Rⁿ` with exact (or floating) coefficients.
//!
//! A [`Form`] of degree `k` is stored sparsely on strictly increasing,
//! 1-based multi-indices `i₁ < … < i_k`, with no `1/k!` normalization:
//! `Form::monomial(3, &[1, 2], 1)` is `e¹∧e²`. Zero coefficients are never
//! stored, so two exact forms are equal iff their term maps are equal.
//!
//! Matrices ([`Mat`], [`SkewEndomorphism`]) are 0-based: the coordinate vector
//! `e_i` is column `i - 1`.

mod json;
mod plane;
mod skew;

use std::collections::BTreeMap;

pub use json::FormJson;
pub use plane::OrientedPlane;
pub use skew::{pairs, SkewEndomorphism};

use crate::matrix::Mat;
use crate::scalar::{Rational, Scalar};
use crate::{Error, Result};

pub type MultiIndex = Vec<usize>;

/// Type `(p, q)`: `p` indices along a plane `W`, `q` along `W⊥`.
pub type FormType = (usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Form<T: Scalar = Rational> {
    n: usize,
    k: usize,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> Form<T> {
    pub fn zero(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("ambient dimension must be at least 1".into()));
        }
        if k > n {
            return Err(Error::DegreeOverflow { degree: k, n });
        }
        Ok(Self {
            n,
            k,
            terms: BTreeMap::new(),
        })
    }

    /// `coef · e^{i₁}∧…∧e^{i_k}` for indices in any order; repeated indices
    /// give the zero form.
    pub fn monomial(n: usize, index: &[usize], coef: T) -> Result<Self> {
        Self::from_terms(n, index.len(), [(index.to_vec(), coef)])
    }

    /// Sums the given terms, sorting each index with the permutation sign.
    pub fn from_terms<I>(n: usize, k: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, T)>,
    {
        let mut form = Self::zero(n, k)?;
        for (mut index, coef) in terms {
            if index.len() != k {
                return Err(Error::DegreeMismatch(index.len(), k));
            }
            if index.iter().any(|&i| i == 0 || i > n) {
                return Err(Error::InvalidIndex { index, n });
            }
            if let Some(sign) = sort_with_sign(&mut index) {
                form.accumulate(index, if sign < 0 { -coef } else { coef });
            }
        }
        Ok(form)
    }

    /// The 1-form `Σ coeffs[i] e^{i+1}`.
    pub fn one_form(coeffs: &[T]) -> Result<Self> {
        let n = coeffs.len();
        Self::from_terms(
            n,
            1,
            coeffs.iter().enumerate().map(|(i, c)| (vec![i + 1], c.clone())),
        )
    }

    /// The constant 0-form `c`.
    pub fn constant(n: usize, c: T) -> Result<Self> {
        Self::from_terms(n, 0, [(Vec::new(), c)])
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Terms in lexicographic order of their multi-index.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &T)> {
        self.terms.iter().map(|(i, c)| (i.as_slice(), c))
    }

    /// Coefficient of `e^I` for a strictly increasing `I`.
    pub fn coefficient(&self, index: &[usize]) -> T {
        self.terms.get(index).cloned().unwrap_or_else(T::zero)
    }

    fn accumulate(&mut self, index: MultiIndex, coef: T) {
        if coef.is_zero() {
            return;
        }
        match self.terms.get_mut(&index) {
            Some(existing) => {
                let sum = existing.clone() + coef;
                if sum.is_zero() {
                    self.terms.remove(&index);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(index, coef);
            }
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.k != other.k {
            return Err(Error::DegreeMismatch(self.k, other.k));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (index, coef) in &other.terms {
            out.accumulate(index.clone(), coef.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    pub fn scale(&self, factor: &T) -> Self {
        let terms = if factor.is_zero() {
            BTreeMap::new()
        } else {
            self.terms
                .iter()
                .map(|(i, c)| (i.clone(), c.clone() * factor.clone()))
                .filter(|(_, c)| !c.is_zero())
                .collect()
        };
        Self {
            n: self.n,
            k: self.k,
            terms,
        }
    }

    /// `a ∧ b`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let k = self.k + other.k;
        let mut out = Self::zero(self.n, k).map_err(|_| Error::DegreeOverflow {
            degree: k,
            n: self.n,
        })?;
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((sign, index)) = merge_sorted(a, b) {
                    let coef = ca.clone() * cb.clone();
                    out.accumulate(index, if sign < 0 { -coef } else { coef });
                }
            }
        }
        Ok(out)
    }

    /// `e_j ⨼ a` for the coordinate vector `e_j` (1-based `j`).
    pub fn interior(&self, j: usize) -> Result<Self> {
        if self.k == 0 {
            return Err(Error::DegreeZeroContraction);
        }
        if j == 0 || j > self.n {
            return Err(Error::InvalidIndex {
                index: vec![j],
                n: self.n,
            });
        }
        let mut out = Self::zero(self.n, self.k - 1)?;
        for (index, coef) in &self.terms {
            if let Some(r) = index.iter().position(|&i| i == j) {
                let mut rest = index.clone();
                rest.remove(r);
                // (-1)^(r) with r 0-based equals (-1)^(r-1) with r 1-based.
                let c = if r % 2 == 0 { coef.clone() } else { -coef.clone() };
                out.accumulate(rest, c);
            }
        }
        Ok(out)
    }

    /// `v ⨼ a` for a vector `v` given in coordinates (0-based slots).
    pub fn interior_vector(&self, v: &[T]) -> Result<Self> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(v.len(), self.n));
        }
        let mut out = Self::zero(self.n, self.k.checked_sub(1).ok_or(Error::DegreeZeroContraction)?)?;
        for (slot, vj) in v.iter().enumerate() {
            if !vj.is_zero() {
                out = out.add(&self.interior(slot + 1)?.scale(vj))?;
            }
        }
        Ok(out)
    }

    /// Hodge star for the standard metric and orientation `e¹∧…∧eⁿ`:
    /// `⋆e^I = sgn(I, Iᶜ) e^{Iᶜ}`.
    pub fn hodge_star(&self) -> Self {
        let mut out = Self::zero(self.n, self.n - self.k).expect("n - k <= n");
        for (index, coef) in &self.terms {
            let complement: MultiIndex = (1..=self.n).filter(|i| !index.contains(i)).collect();
            // Inversions of the concatenation (I, Iᶜ) are Σ_r (i_r - r).
            let inversions: usize = index.iter().enumerate().map(|(r, &i)| i - (r + 1)).sum();
            let c = if inversions % 2 == 0 { coef.clone() } else { -coef.clone() };
            out.accumulate(complement, c);
        }
        out
    }

    /// `⟨a, b⟩` with `⟨e^I, e^J⟩ = δ_IJ` on increasing multi-indices.
    pub fn inner(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(i, a)| other.terms.get(i).map(|b| a.clone() * b.clone()))
            .fold(T::zero(), |acc, x| acc + x))
    }

    pub fn norm_squared(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().to_f64().sqrt()
    }

    /// `X ⋄ a = X_ij e_i ∧ (e_j ⨼ a)`.
    ///
    /// On a monomial this replaces each slot `i_r` in turn by every `i` with
    /// weight `X_{i, i_r}`, which is the coordinate formula
    /// `(X ⋄ a)_{i₁…i_k} = X_{i₁p} a_{p i₂…i_k} + … + X_{i_k p} a_{i₁…p}`.
    pub fn diamond(&self, x: &SkewEndomorphism<T>) -> Result<Self> {
        if x.ambient_dim() != self.n {
            return Err(Error::DimensionMismatch(x.ambient_dim(), self.n));
        }
        let m = x.matrix();
        let mut out = Self::zero(self.n, self.k)?;
        for (index, coef) in &self.terms {
            for r in 0..index.len() {
                let j = index[r];
                for i in 1..=self.n {
                    let xij = &m[(i - 1, j - 1)];
                    if xij.is_zero() || (i != j && index.contains(&i)) {
                        continue;
                    }
                    let mut replaced = index.clone();
                    replaced[r] = i;
                    if let Some(sign) = sort_with_sign(&mut replaced) {
                        let c = coef.clone() * xij.clone();
                        out.accumulate(replaced, if sign < 0 { -c } else { c });
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(P* a)(v₁,…,v_k) = a(Pv₁,…,Pv_k)`.
    pub fn pullback(&self, p: &Mat<T>) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::Shape("pullback needs a square matrix".into()));
        }
        if p.rows() != self.n {
            return Err(Error::DimensionMismatch(p.rows(), self.n));
        }
        let mut out = Self::zero(self.n, self.k)?;
        if self.k == 0 {
            return Ok(self.clone());
        }
        for target in combinations(self.n, self.k) {
            let cols: Vec<usize> = target.iter().map(|j| j - 1).collect();
            let mut total = T::zero();
            for (index, coef) in &self.terms {
                let rows: Vec<usize> = index.iter().map(|i| i - 1).collect();
                let minor = p.select(&rows, &cols).det()?;
                if !minor.is_zero() {
                    total = total + coef.clone() * minor;
                }
            }
            out.accumulate(target, total);
        }
        Ok(out)
    }

    /// `a(v₁,…,v_k)` for the columns of the `n × k` matrix `vectors`.
    pub fn evaluate(&self, vectors: &Mat<T>) -> Result<T> {
        if vectors.rows() != self.n {
            return Err(Error::DimensionMismatch(vectors.rows(), self.n));
        }
        if vectors.cols() != self.k {
            return Err(Error::DegreeMismatch(vectors.cols(), self.k));
        }
        let cols: Vec<usize> = (0..self.k).collect();
        let mut total = T::zero();
        for (index, coef) in &self.terms {
            let rows: Vec<usize> = index.iter().map(|i| i - 1).collect();
            total = total + coef.clone() * vectors.select(&rows, &cols).det()?;
        }
        Ok(total)
    }

    /// Decomposes into components of type `(p, q)` relative to `W`.
    ///
    /// With `L_t = Π_W + t Π_{W⊥}`, the pullback `L_t* a` equals
    /// `Σ_q t^q a^{k-q, q}`; sampling `t = 0..=k` and inverting the
    /// Vandermonde system recovers each component. Only nonzero components
    /// appear in the result.
    pub fn type_components(&self, plane: &OrientedPlane<T>) -> Result<BTreeMap<FormType, Self>> {
        if plane.ambient_dim() != self.n {
            return Err(Error::DimensionMismatch(plane.ambient_dim(), self.n));
        }
        let proj = plane.projector();
        let id = Mat::<T>::identity(self.n);
        let perp = id.sub(&proj)?;
        let nodes: Vec<T> = (0..=self.k).map(|t| T::from_i64(t as i64)).collect();
        let samples = nodes
            .iter()
            .map(|t| self.pullback(&proj.add(&perp.scale(t))?))
            .collect::<Result<Vec<_>>>()?;
        let vandermonde = Mat::from_fn(nodes.len(), nodes.len(), |s, q| pow(&nodes[s], q));
        let inverse = invert(&vandermonde).expect("Vandermonde on distinct nodes is invertible");
        let mut out = BTreeMap::new();
        for q in 0..=self.k {
            let mut component = Self::zero(self.n, self.k)?;
            for (s, sample) in samples.iter().enumerate() {
                component = component.add(&sample.scale(&inverse[(q, s)]))?;
            }
            if !T::is_exact() {
                component = component.pruned(1e-12);
            }
            if !component.is_zero() {
                out.insert((self.k - q, q), component);
            }
        }
        Ok(out)
    }

    /// Embeds into `Rᵐ` by shifting every index by `offset`.
    pub fn embed(&self, m: usize, offset: usize) -> Result<Self> {
        if self.n + offset > m {
            return Err(Error::DimensionMismatch(self.n + offset, m));
        }
        Self::from_terms(
            m,
            self.k,
            self.terms
                .iter()
                .map(|(i, c)| (i.iter().map(|x| x + offset).collect(), c.clone())),
        )
    }

    /// Drops coefficients with magnitude at most `tol` (floating cleanup).
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            n: self.n,
            k: self.k,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.to_f64().abs() > tol)
                .map(|(i, c)| (i.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn to_f64(&self) -> Form<f64> {
        Form {
            n: self.n,
            k: self.k,
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (i.clone(), c.to_f64()))
                .filter(|(_, c)| *c != 0.0)
                .collect(),
        }
    }
}

/// All strictly increasing 1-based multi-indices of length `k` in `1..=n`,
/// in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<MultiIndex> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(1, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Sorts in place and returns the permutation sign, or `None` on a repeat.
fn sort_with_sign(index: &mut [usize]) -> Option<i8> {
    let mut sign = 1i8;
    for i in 1..index.len() {
        let mut j = i;
        while j > 0 && index[j - 1] > index[j] {
            index.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && index[j - 1] == index[j] {
            return None;
        }
    }
    if index.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

/// Merges two increasing multi-indices, returning the shuffle sign.
fn merge_sorted(a: &[usize], b: &[usize]) -> Option<(i8, MultiIndex)> {
    let mut inversions = 0usize;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            if i < a.len() && a[i] == b[j] {
                return None;
            }
            // b[j] jumps over the remaining elements of a.
            inversions += a.len() - i;
            out.push(b[j]);
            j += 1;
        }
    }
    Some((if inversions % 2 == 0 { 1 } else { -1 }, out))
}

fn pow<T: Scalar>(base: &T, e: usize) -> T {
    (0..e).fold(T::one(), |acc, _| acc * base.clone())
}

/// Gauss–Jordan inverse; `None` when singular.
pub(crate) fn invert<T: Scalar>(m: &Mat<T>) -> Option<Mat<T>> {
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = Mat::<T>::identity(n);
    for c in 0..n {
        let p = (c..n)
            .filter(|&r| !a[(r, c)].is_zero())
            .max_by(|&x, &y| {
                a[(x, c)]
                    .abs()
                    .partial_cmp(&a[(y, c)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(y.cmp(&x))
            })?;
        for j in 0..n {
            let (t1, t2) = (a[(c, j)].clone(), a[(p, j)].clone());
            a[(c, j)] = t2;
            a[(p, j)] = t1;
            let (t1, t2) = (inv[(c, j)].clone(), inv[(p, j)].clone());
            inv[(c, j)] = t2;
            inv[(p, j)] = t1;
        }
        let pv = a[(c, c)].clone();
        for j in 0..n {
            a[(c, j)] = a[(c, j)].clone() / pv.clone();
            inv[(c, j)] = inv[(c, j)].clone() / pv.clone();
        }
        for r in 0..n {
            if r == c || a[(r, c)].is_zero() {
                continue;
            }
            let f = a[(r, c)].clone();
            for j in 0..n {
                a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(c, j)].clone();
                inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(c, j)].clone();
            }
        }
    }
    Some(inv)
}
