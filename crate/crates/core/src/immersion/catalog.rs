//! Built-in parametrizations.

use std::fmt;
use std::str::FromStr;

use crate::calibrations::{CalibrationPackage, PackageName};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A parametrized `k`-dimensional submanifold of `Rⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    /// `t ↦ Σ tᵢ wᵢ` for the given columns.
    Plane { columns: Vec<Vec<f64>> },
    /// `(x, y) ↦ (x, y, Re g, Im g)` with `g = z² + c z̄²` on `C² = R⁴`
    /// (interleaved coordinates).
    ComplexGraph { conj: f64 },
    /// `x ↦ (x, ∇u)` for `u = x₁³ - 3x₁x₂²` in block coordinates of `C²`.
    SlagGraph,
    /// `Rˡ × Σ`: the flat factor spans the axes in `flat` and `Σ` is the
    /// graph `x_c + i x_d = (x_a + i x_b)²` (1-based ambient indices).
    Product { n: usize, flat: Vec<usize>, surface: [usize; 4] },
}

impl Geometry {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Geometry::Plane { columns } => columns.first().map_or(0, Vec::len),
            Geometry::ComplexGraph { .. } | Geometry::SlagGraph => 4,
            Geometry::Product { n, .. } => *n,
        }
    }

    pub fn param_dim(&self) -> usize {
        match self {
            Geometry::Plane { columns } => columns.len(),
            Geometry::ComplexGraph { .. } | Geometry::SlagGraph => 2,
            Geometry::Product { flat, .. } => flat.len() + 2,
        }
    }

    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Geometry::Plane { columns } => {
                let mut out = vec![0.0; self.ambient_dim()];
                for (t, w) in u.iter().zip(columns) {
                    for (o, wi) in out.iter_mut().zip(w) {
                        *o += t * wi;
                    }
                }
                out
            }
            Geometry::ComplexGraph { conj } => {
                let (x, y) = (u[0], u[1]);
                let (re, im) = (x * x - y * y, 2.0 * x * y);
                vec![x, y, re + conj * re, im - conj * im]
            }
            Geometry::SlagGraph => {
                let (x1, x2) = (u[0], u[1]);
                vec![x1, x2, 3.0 * x1 * x1 - 3.0 * x2 * x2, -6.0 * x1 * x2]
            }
            Geometry::Product { n, flat, surface } => {
                let mut out = vec![0.0; *n];
                for (t, &i) in u.iter().zip(flat) {
                    out[i - 1] = *t;
                }
                let l = flat.len();
                let (s, t) = (u[l], u[l + 1]);
                let [a, b, c, d] = *surface;
                out[a - 1] = s;
                out[b - 1] = t;
                out[c - 1] = s * s - t * t;
                out[d - 1] = 2.0 * s * t;
                out
            }
        }
    }
}

/// Named catalog entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleName {
    Plane,
    ComplexGraph,
    SlagGraph,
    AssocProduct,
    CoassocProduct,
    CayleyProduct,
    NoncalibratedControl,
}

impl ExampleName {
    pub const ALL: [ExampleName; 7] = [
        ExampleName::Plane,
        ExampleName::ComplexGraph,
        ExampleName::SlagGraph,
        ExampleName::AssocProduct,
        ExampleName::CoassocProduct,
        ExampleName::CayleyProduct,
        ExampleName::NoncalibratedControl,
    ];

    fn as_str(&self) -> &'static str {
        match self {
            ExampleName::Plane => "plane",
            ExampleName::ComplexGraph => "complex-graph",
            ExampleName::SlagGraph => "slag-graph",
            ExampleName::AssocProduct => "assoc-product",
            ExampleName::CoassocProduct => "coassoc-product",
            ExampleName::CayleyProduct => "cayley-product",
            ExampleName::NoncalibratedControl => "noncalibrated-control",
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('_', "-");
        ExampleName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown example '{s}'")))
    }
}

/// A parametrization together with the package it is checked against and
/// the center of its sampling grid.
#[derive(Clone, Debug)]
pub struct Example {
    pub name: ExampleName,
    pub geometry: Geometry,
    pub package: CalibrationPackage,
    pub center: Vec<f64>,
    /// Linear parametrizations get the tighter calibration gate.
    pub is_plane: bool,
}

impl Example {
    /// The catalog entry `name`; `package` selects the plane for
    /// [`ExampleName::Plane`] and is otherwise ignored unless it matches.
    pub fn new(name: ExampleName, package: Option<PackageName>) -> Result<Self> {
        let default = match name {
            ExampleName::Plane => PackageName::Assoc,
            ExampleName::ComplexGraph | ExampleName::NoncalibratedControl => PackageName::Kahler { m: 2, p: 1 },
            ExampleName::SlagGraph => PackageName::Slag { m: 2 },
            ExampleName::AssocProduct => PackageName::Assoc,
            ExampleName::CoassocProduct => PackageName::Coassoc,
            ExampleName::CayleyProduct => PackageName::Cayley,
        };
        let pkg_name = package.unwrap_or(default);
        if name != ExampleName::Plane && pkg_name != default {
            return Err(Error::Config(format!("example '{name}' is built for package '{default}'")));
        }
        let package = CalibrationPackage::new(pkg_name)?;
        let geometry = match name {
            ExampleName::Plane => {
                let basis = package.plane.basis();
                Geometry::Plane {
                    columns: (0..basis.cols()).map(|j| basis.column(j).iter().map(Scalar::to_f64).collect()).collect(),
                }
            }
            ExampleName::ComplexGraph => Geometry::ComplexGraph { conj: 0.0 },
            ExampleName::NoncalibratedControl => Geometry::ComplexGraph { conj: 0.1 },
            ExampleName::SlagGraph => Geometry::SlagGraph,
            // Σ is a complex curve for x₅ + i x₄ and x₇ + i x₆, which is
            // calibrated by -(e⁴⁵ + e⁶⁷).
            ExampleName::AssocProduct => Geometry::Product { n: 7, flat: vec![1], surface: [5, 4, 7, 6] },
            ExampleName::CoassocProduct => Geometry::Product { n: 7, flat: vec![2, 3], surface: [5, 4, 7, 6] },
            // Same surface in x⁴..x⁷, stored at indices 5..8.
            ExampleName::CayleyProduct => Geometry::Product { n: 8, flat: vec![1, 2], surface: [6, 5, 8, 7] },
        };
        let k = geometry.param_dim();
        let center = match name {
            ExampleName::Plane => vec![0.0; k],
            ExampleName::ComplexGraph | ExampleName::NoncalibratedControl => vec![0.2, 0.3],
            ExampleName::SlagGraph => vec![0.3, 0.4],
            _ => (0..k).map(|i| 0.1 * (i + 1) as f64).collect(),
        };
        Ok(Self { name, geometry, package, center, is_plane: name == ExampleName::Plane })
    }

    /// `points^k` grid points `center + spacing·(i₁ - c, …, i_k - c)` with
    /// `iₐ < points` and `c = (points - 1)/2`; the first axis varies fastest.
    pub fn grid(&self, points: usize, spacing: f64) -> Vec<Vec<f64>> {
        let k = self.center.len();
        let offset = (points as f64 - 1.0) / 2.0;
        let total = points.pow(k as u32);
        (0..total)
            .map(|mut idx| {
                (0..k)
                    .map(|a| {
                        let i = idx % points;
                        idx /= points;
                        self.center[a] + spacing * (i as f64 - offset)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn label(&self) -> String {
        self.name.to_string()
    }
}
