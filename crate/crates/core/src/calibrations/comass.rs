//! Lower bounds on the comass by projected gradient ascent over orthonormal
//! frames.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exterior::Form;
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ComassConfig {
    pub samples: usize,
    pub iters: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ComassConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            iters: 200,
            seed: 0,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComassReport {
    pub max_found: f64,
    /// Orthonormal columns of the best frame found.
    pub argmax_plane: Vec<Vec<f64>>,
    /// `max_found <= 1 + tol`.
    pub certificate: bool,
    pub tol: f64,
    pub samples: usize,
    pub iters: usize,
    pub seed: u64,
}

/// Coefficients of a form as `(0-based rows, value)` pairs.
struct Terms {
    n: usize,
    k: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl Terms {
    fn new<T: Scalar>(form: &Form<T>) -> Self {
        Self {
            n: form.ambient_dim(),
            k: form.degree(),
            terms: form
                .terms()
                .map(|(i, c)| (i.iter().map(|x| x - 1).collect(), c.to_f64()))
                .collect(),
        }
    }

    fn value(&self, v: &DMatrix<f64>) -> f64 {
        self.terms
            .iter()
            .map(|(rows, c)| c * v.select_rows(rows.iter()).determinant())
            .sum()
    }

    /// Euclidean gradient of `V ↦ α(v₁, …, v_k)`, by cofactor expansion.
    fn gradient(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        let k = self.k;
        let mut g = DMatrix::zeros(self.n, k);
        for (rows, c) in &self.terms {
            let m = v.select_rows(rows.iter());
            for r in 0..k {
                for col in 0..k {
                    let minor = if k == 1 {
                        1.0
                    } else {
                        m.clone().remove_row(r).remove_column(col).determinant()
                    };
                    let sign = if (r + col) % 2 == 0 { 1.0 } else { -1.0 };
                    g[(rows[r], col)] += c * sign * minor;
                }
            }
        }
        g
    }
}

/// Modified Gram–Schmidt on the columns; keeps orientation (positive `R`
/// diagonal). `None` if the columns are numerically dependent.
pub(crate) fn orthonormalize(v: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut q = v.clone();
    for j in 0..q.ncols() {
        for i in 0..j {
            let d = q.column(i).dot(&q.column(j));
            let qi = q.column(i).clone_owned();
            q.column_mut(j).axpy(-d, &qi, 1.0);
        }
        let norm = q.column(j).norm();
        if norm < 1e-12 {
            return None;
        }
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Some(q)
}

fn random_frame(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DMatrix<f64> {
    loop {
        let v = DMatrix::from_fn(n, k, |_, _| StandardNormal.sample(rng));
        if let Some(q) = orthonormalize(&v) {
            return q;
        }
    }
}

fn start_rng(seed: u64, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    rng
}

/// Ascent on the Stiefel manifold from one starting frame.
fn ascend(terms: &Terms, mut v: DMatrix<f64>, iters: usize) -> (f64, DMatrix<f64>) {
    let mut value = terms.value(&v);
    let mut step = 0.5;
    for _ in 0..iters {
        let g = terms.gradient(&v);
        let vtg = v.transpose() * &g;
        let sym = (&vtg + vtg.transpose()) * 0.5;
        let riem = &g - &v * sym;
        let slope = riem.norm_squared();
        if slope < 1e-26 {
            break;
        }
        loop {
            let candidate = orthonormalize(&(&v + &riem * step));
            let gain = candidate.as_ref().map(|c| terms.value(c) - value);
            match (candidate, gain) {
                // Armijo condition: require a fraction of the predicted gain.
                (Some(c), Some(gain)) if gain >= 1e-4 * step * slope => {
                    value += gain;
                    v = c;
                    step = (step * 1.5).min(1.0);
                    break;
                }
                _ => {
                    step *= 0.5;
                    if step < 1e-14 {
                        return (value, v);
                    }
                }
            }
        }
    }
    (value, v)
}

/// Best value of `α(w₁, …, w_k)` over `samples` ascents from random
/// orthonormal frames. Starts run in parallel, each with its own seeded
/// stream; the reduction is sequential, so the report depends only on the
/// configuration.
pub fn comass_search<T: Scalar>(form: &Form<T>, config: &ComassConfig) -> Result<ComassReport> {
    let n = form.ambient_dim();
    let k = form.degree();
    if k == 0 {
        return Err(Error::Unsupported("comass of a 0-form".into()));
    }
    if config.samples == 0 {
        return Err(Error::Config("comass search needs at least one sample".into()));
    }
    let terms = Terms::new(form);
    let (max_found, best) = if form.is_zero() {
        (0.0, DMatrix::identity(n, k))
    } else {
        let results: Vec<(f64, DMatrix<f64>)> = (0..config.samples)
            .into_par_iter()
            .map(|s| {
                let mut rng = start_rng(config.seed, s);
                ascend(&terms, random_frame(&mut rng, n, k), config.iters)
            })
            .collect();
        let mut best = 0;
        for (i, (value, _)) in results.iter().enumerate() {
            if *value > results[best].0 {
                best = i;
            }
        }
        results.into_iter().nth(best).expect("at least one sample")
    };
    Ok(ComassReport {
        max_found,
        argmax_plane: (0..k).map(|j| best.column(j).iter().copied().collect()).collect(),
        certificate: max_found <= 1.0 + config.tol,
        tol: config.tol,
        samples: config.samples,
        iters: config.iters,
        seed: config.seed,
    })
}

/// Largest `|α(w₁, …, w_k)|` over `planes` random orthonormal frames.
pub fn monte_carlo_bound<T: Scalar>(form: &Form<T>, planes: usize, seed: u64) -> f64 {
    let terms = Terms::new(form);
    (0..planes)
        .into_par_iter()
        .map(|s| {
            let mut rng = start_rng(seed, s);
            terms.value(&random_frame(&mut rng, terms.n, terms.k)).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns of the same size.
pub fn principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let proj = b * b.transpose();
    let residual = a - proj * a;
    let sigma = residual.singular_values().max();
    sigma.min(1.0).asin()
}
