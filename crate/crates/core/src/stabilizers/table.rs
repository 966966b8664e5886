//! The rows of Table 1 with computed dimensions.

use serde::{Deserialize, Serialize};

use super::{standard_compliance, Dims, Stabilizers};
use crate::calibrations::{CalibrationPackage, PackageName};
use crate::scalar::Rational;
use crate::{Error, Result};

/// Packages covered by the table: `kahler(m, p)` for `m ≤ 4`, `p ≤ min(3, m)`;
/// `slag(m)` for `2 ≤ m ≤ 4`; the three exceptional geometries and the
/// double point.
pub fn table_packages() -> Vec<PackageName> {
    let mut out = Vec::new();
    for m in 1..=4 {
        for p in 1..=m.min(3) {
            out.push(PackageName::Kahler { m, p });
        }
    }
    out.extend((2..=4).map(|m| PackageName::Slag { m }));
    out.extend([PackageName::Assoc, PackageName::Coassoc, PackageName::Cayley, PackageName::DoublePoint]);
    out
}

/// `(dim 𝔤, dim 𝔥)` for the group pair listed in Table 1.
pub fn expected_dims(name: PackageName) -> (usize, usize) {
    match name {
        PackageName::Kahler { m, p } => (m * m, p * p + (m - p) * (m - p)),
        PackageName::Slag { m } => (m * m - 1, m * (m - 1) / 2),
        PackageName::Assoc | PackageName::Coassoc => (14, 6),
        PackageName::Cayley => (21, 9),
        PackageName::DoublePoint => (6, 6),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub package: String,
    pub n: usize,
    pub k: usize,
    pub calibration: String,
    pub group_label: String,
    pub subgroup_label: String,
    pub dims: Dims,
    pub expected_g: usize,
    pub expected_h: usize,
    /// `None` when the standard plane is not calibrated.
    pub compliant: Option<bool>,
    pub pass: bool,
}

/// Computes one row exactly. Every package in the table is expected to be
/// compliant.
pub fn table_row(package: &CalibrationPackage) -> Result<TableRow> {
    let dims = Stabilizers::<Rational>::for_package(package, &package.plane, 0.0)?.dims();
    let compliant = match standard_compliance(package) {
        Ok(report) => Some(report.compliant && report.criteria_consistent()),
        Err(Error::NotCalibrated(_)) => None,
        Err(e) => return Err(e),
    };
    let (expected_g, expected_h) = expected_dims(package.name);
    Ok(TableRow {
        package: package.name.to_string(),
        n: package.n,
        k: package.k,
        calibration: package.forms[0].0.clone(),
        group_label: package.group_label.clone(),
        subgroup_label: package.subgroup_label.clone(),
        dims,
        expected_g,
        expected_h,
        compliant,
        pass: dims.g == expected_g && dims.h == expected_h && compliant == Some(true),
    })
}
