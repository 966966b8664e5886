//! The catalog of calibration packages and the operators derived from them.
//!
//! Basis conventions, pinned by tests:
//!
//! * Kähler packages use the interleaved basis `(x¹, y¹, x², y², …)`, so
//!   `ω = Σ e^{2j-1}∧e^{2j}` and the standard plane is `e₁, …, e_{2p}`.
//! * Special Lagrangian packages keep the block order
//!   `(x¹, …, x^m, y¹, …, y^m)`, so `ω = Σ e^j∧e^{m+j}` and the standard plane
//!   is `e₁, …, e_m`.
//! * The Cayley package reindexes `x⁰, …, x⁷` as `1, …, 8`.

mod comass;
mod forms;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use comass::{comass_search, monte_carlo_bound, principal_angle, ComassConfig, ComassReport};
pub use forms::{cayley_form, double_point_form, kahler_omega, phi, psi, slag_omega, upsilon};

use crate::exterior::{Form, FormJson, OrientedPlane};
use crate::matrix::Mat;
use crate::scalar::{format_rational, int, Rational, Scalar};
use crate::{Error, Result};

/// Names of the catalog packages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PackageName {
    Kahler { m: usize, p: usize },
    Slag { m: usize },
    Assoc,
    Coassoc,
    Cayley,
    DoublePoint,
}

impl fmt::Display for PackageName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PackageName::Kahler { m, p } => write!(f, "kahler-{m}-{p}"),
            PackageName::Slag { m } => write!(f, "slag-{m}"),
            PackageName::Assoc => f.write_str("assoc"),
            PackageName::Coassoc => f.write_str("coassoc"),
            PackageName::Cayley => f.write_str("cayley"),
            PackageName::DoublePoint => f.write_str("double-point"),
        }
    }
}

impl FromStr for PackageName {
    type Err = Error;

    /// Accepts `kahler-M-P`, `slag-M`, `assoc`, `coassoc`, `cayley`,
    /// `double-point` (underscores allowed in place of dashes).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('_', "-");
        let parts: Vec<&str> = lower.split('-').collect();
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidPackage(format!("bad number {t:?} in {s:?}")))
        };
        let name = match parts.as_slice() {
            ["kahler", m, p] => PackageName::Kahler { m: num(m)?, p: num(p)? },
            ["slag", m] => PackageName::Slag { m: num(m)? },
            ["assoc"] => PackageName::Assoc,
            ["coassoc"] => PackageName::Coassoc,
            ["cayley"] => PackageName::Cayley,
            ["double", "point"] => PackageName::DoublePoint,
            _ => return Err(Error::InvalidPackage(format!("unknown package {s:?}"))),
        };
        name.validate()?;
        Ok(name)
    }
}

impl PackageName {
    /// The five rows of Table 1 at their smallest interesting sizes, plus the
    /// double point example.
    pub fn catalog() -> Vec<PackageName> {
        vec![
            PackageName::Kahler { m: 2, p: 1 },
            PackageName::Slag { m: 3 },
            PackageName::Assoc,
            PackageName::Coassoc,
            PackageName::Cayley,
            PackageName::DoublePoint,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PackageName::Kahler { m, p } if p == 0 || p > m => Err(Error::InvalidPackage(format!(
                "kahler needs 1 <= p <= m, got m = {m}, p = {p}"
            ))),
            PackageName::Slag { m } if m < 2 => {
                Err(Error::InvalidPackage(format!("slag needs m >= 2, got {m}")))
            }
            _ => Ok(()),
        }
    }
}

/// Extra structure carried by a package.
#[derive(Clone, Debug, PartialEq)]
pub enum Aux {
    None,
    /// Index into `forms` of the Kähler form `ω`, giving `J` via
    /// `ω(u, v) = ⟨Ju, v⟩`.
    ComplexStructure { omega: usize },
    /// `α₀(X₁, …, X_k) = ⟨P(X₁, …, X_{k-1}), X_k⟩` with `arity = k - 1`.
    CrossProduct { arity: usize },
    /// Both of the above (Kähler with `p = 1`).
    ComplexAndCross { omega: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationPackage {
    pub name: PackageName,
    pub n: usize,
    pub k: usize,
    /// `(label, form)`; the first entry is the calibration `α₀`.
    pub forms: Vec<(String, Form)>,
    pub plane: OrientedPlane<Rational>,
    pub group_label: String,
    pub subgroup_label: String,
    pub aux: Aux,
}

impl CalibrationPackage {
    pub fn new(name: PackageName) -> Result<Self> {
        name.validate()?;
        let pkg = match name {
            PackageName::Kahler { m, p } => {
                let omega = kahler_omega(m)?;
                let mut power = Form::constant(2 * m, int(1))?;
                for j in 1..=p {
                    power = power.wedge(&omega)?.scale(&Rational::new(1.into(), (j as i64).into()));
                }
                let axes: Vec<usize> = (1..=2 * p).collect();
                Self {
                    name,
                    n: 2 * m,
                    k: 2 * p,
                    forms: vec![(format!("omega^{p}/{p}!"), power), ("omega".into(), omega)],
                    plane: OrientedPlane::axis(2 * m, &axes)?,
                    group_label: format!("U({m})"),
                    subgroup_label: format!("U({p}) x U({})", m - p),
                    aux: if p == 1 {
                        Aux::ComplexAndCross { omega: 1 }
                    } else {
                        Aux::ComplexStructure { omega: 1 }
                    },
                }
            }
            PackageName::Slag { m } => {
                let (re, im) = upsilon(m)?;
                let axes: Vec<usize> = (1..=m).collect();
                Self {
                    name,
                    n: 2 * m,
                    k: m,
                    forms: vec![
                        ("Re Upsilon".into(), re),
                        ("omega".into(), slag_omega(m)?),
                        ("Im Upsilon".into(), im),
                    ],
                    plane: OrientedPlane::axis(2 * m, &axes)?,
                    group_label: format!("SU({m})"),
                    subgroup_label: format!("SO({m})"),
                    aux: Aux::ComplexStructure { omega: 1 },
                }
            }
            PackageName::Assoc => Self {
                name,
                n: 7,
                k: 3,
                forms: vec![("phi".into(), phi())],
                plane: OrientedPlane::axis(7, &[1, 2, 3])?,
                group_label: "G2".into(),
                subgroup_label: "SO(4) = Sp(1)^2/{±1}".into(),
                aux: Aux::CrossProduct { arity: 2 },
            },
            PackageName::Coassoc => Self {
                name,
                n: 7,
                k: 4,
                forms: vec![("psi".into(), psi()), ("phi".into(), phi())],
                plane: OrientedPlane::axis(7, &[4, 5, 6, 7])?,
                group_label: "G2".into(),
                subgroup_label: "SO(4) = Sp(1)^2/{±1}".into(),
                aux: Aux::None,
            },
            PackageName::Cayley => Self {
                name,
                n: 8,
                k: 4,
                forms: vec![("Phi".into(), cayley_form())],
                plane: OrientedPlane::axis(8, &[1, 2, 3, 4])?,
                group_label: "Spin(7)".into(),
                subgroup_label: "Sp(1)^3/{±1}".into(),
                aux: Aux::CrossProduct { arity: 3 },
            },
            PackageName::DoublePoint => Self {
                name,
                n: 7,
                k: 3,
                forms: vec![("alpha".into(), double_point_form())],
                plane: OrientedPlane::axis(7, &[1, 2, 3])?,
                group_label: "(SO(3) x SO(3)) ∪ M".into(),
                subgroup_label: "SO(3) x SO(3)".into(),
                aux: Aux::None,
            },
        };
        Ok(pkg)
    }

    /// Same package with the calibration replaced (for negative controls and
    /// user-supplied forms). The standard plane is kept.
    pub fn with_calibration(mut self, form: Form) -> Result<Self> {
        if form.ambient_dim() != self.n || form.degree() != self.k {
            return Err(Error::Shape(format!(
                "replacement form has (n, k) = ({}, {}), package needs ({}, {})",
                form.ambient_dim(),
                form.degree(),
                self.n,
                self.k
            )));
        }
        self.forms[0].1 = form;
        Ok(self)
    }

    pub fn calibration(&self) -> &Form {
        &self.forms[0].1
    }

    pub fn form_list(&self) -> Vec<Form> {
        self.forms.iter().map(|(_, f)| f.clone()).collect()
    }

    /// `n × n` matrix `J` with `ω(u, v) = ⟨Ju, v⟩`.
    pub fn complex_structure(&self) -> Result<Mat<Rational>> {
        let omega = match self.aux {
            Aux::ComplexStructure { omega } | Aux::ComplexAndCross { omega } => &self.forms[omega].1,
            _ => {
                return Err(Error::Unsupported(format!(
                    "{} has no complex structure",
                    self.name
                )))
            }
        };
        let n = self.n;
        let mut j = Mat::zeros(n, n);
        for (idx, c) in omega.terms() {
            let (a, b) = (idx[0] - 1, idx[1] - 1);
            // ω(e_a, e_b) = c = ⟨J e_a, e_b⟩ = J_ba
            j[(b, a)] = c.clone();
            j[(a, b)] = -c.clone();
        }
        Ok(j)
    }

    /// `P(v₁, …, v_{k-1})` with `⟨P(v…), w⟩ = α₀(v…, w)` for every `w`.
    pub fn cross_product<T: Scalar>(&self, args: &[Vec<T>]) -> Result<Vec<T>> {
        let arity = match self.aux {
            Aux::CrossProduct { arity } => arity,
            Aux::ComplexAndCross { .. } => 1,
            _ => {
                return Err(Error::Unsupported(format!(
                    "{} has no vector cross product",
                    self.name
                )))
            }
        };
        if args.len() != arity {
            return Err(Error::Shape(format!("expected {arity} arguments, got {}", args.len())));
        }
        let alpha = convert_form::<T>(self.calibration());
        cross_product_of(&alpha, args)
    }

    pub fn manifest(&self) -> Manifest {
        let basis = self.plane.basis();
        Manifest {
            name: self.name.to_string(),
            n: self.n,
            k: self.k,
            group_label: self.group_label.clone(),
            plane: (0..basis.cols())
                .map(|j| basis.column(j).iter().map(format_rational).collect())
                .collect(),
        }
    }

    pub fn export(&self) -> PackageExport {
        PackageExport {
            manifest: self.manifest(),
            forms: self
                .forms
                .iter()
                .map(|(label, f)| LabeledForm {
                    label: label.clone(),
                    form: FormJson::from(f),
                })
                .collect(),
        }
    }
}

/// `α(v₁, …, v_{k-1}, ·)` as a vector.
pub fn cross_product_of<T: Scalar>(alpha: &Form<T>, args: &[Vec<T>]) -> Result<Vec<T>> {
    let n = alpha.ambient_dim();
    if args.len() + 1 != alpha.degree() {
        return Err(Error::DegreeMismatch(args.len() + 1, alpha.degree()));
    }
    if let Some(bad) = args.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(bad.len(), n));
    }
    (0..n)
        .map(|l| {
            let mut cols = args.to_vec();
            cols.push((0..n).map(|i| if i == l { T::one() } else { T::zero() }).collect());
            alpha.evaluate(&Mat::from_columns(n, &cols)?)
        })
        .collect()
}

/// `λ(W)` with `α|_W = λ(W) vol_W`.
pub fn evaluate_on_plane<T: Scalar>(alpha: &Form<T>, plane: &OrientedPlane<T>) -> Result<T> {
    if alpha.degree() != plane.plane_dim() {
        return Err(Error::DegreeMismatch(alpha.degree(), plane.plane_dim()));
    }
    alpha.evaluate(plane.basis())
}

/// Converts rational coefficients into the target scalar.
pub fn convert_form<T: Scalar>(form: &Form) -> Form<T> {
    Form::from_terms(
        form.ambient_dim(),
        form.degree(),
        form.terms().map(|(i, c)| (i.to_vec(), T::from_rational(c))),
    )
    .expect("valid form")
}

/// JSON manifest of a package.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub group_label: String,
    /// Columns of the standard plane, entries as `"p/q"`.
    pub plane: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledForm {
    pub label: String,
    pub form: FormJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageExport {
    pub manifest: Manifest,
    pub forms: Vec<LabeledForm>,
}
