use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use caliber::calibrations::{comass_search, principal_angle, CalibrationPackage, ComassConfig, PackageName};
use caliber::immersion::{
    convergence, run_checks, ConvergenceEntry, Example, ExampleName, ImmersionConfig, ResidualReport,
    CONVERGENCE_FLOOR,
};
use caliber::stabilizers::{
    compliance_check, standard_compliance, table_packages, table_row, ComplianceReport, Parity, TableRow,
};
use caliber::{Form, Mat, OrientedPlane};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::{Command, Output, PackageArgs};

/// Usage, input and I/O failures; reported with exit code 2.
type Failure = String;

/// Runs a subcommand; `Ok(false)` means a check failed.
pub fn run(command: Command) -> Result<bool, Failure> {
    configure_threads()?;
    match command {
        Command::Tables { assoc_form, output } => tables(assoc_form.as_deref(), &output),
        Command::Compliancy { package, plane, rank_tol, output } => {
            compliancy(&package, plane.as_deref(), rank_tol, &output)
        }
        Command::Immersion {
            example,
            package,
            m,
            p,
            grid,
            spacing,
            step,
            tol,
            tol_deriv,
            gate_tol,
            ungated,
            convergence,
            output,
        } => {
            let name: ExampleName = example.parse().map_err(|e| format!("{e}"))?;
            let package = package.map(|pkg| resolve_package(&pkg, m, p)).transpose()?;
            if grid < 3 {
                return Err(format!("--grid must be at least 3, got {grid}"));
            }
            positive("--step", step)?;
            positive("--spacing", spacing)?;
            positive("--tol", tol)?;
            positive("--tol-deriv", tol_deriv)?;
            if let Some(g) = gate_tol {
                positive("--gate-tol", g)?;
            }
            let config = ImmersionConfig {
                step,
                points: grid,
                spacing,
                tol,
                tol_deriv,
                gate_tol,
                gated: !ungated,
                ..ImmersionConfig::default()
            };
            immersion(name, package, &config, convergence, &output)
        }
        Command::Comass { package, m, p, form, samples, iters, seed, tol, output } => {
            if samples == 0 {
                return Err("--samples must be positive".into());
            }
            positive("--tol", tol)?;
            let config = ComassConfig { samples, iters, seed, tol };
            let (label, form, package) = match (package, form) {
                (Some(name), None) => {
                    let pkg = CalibrationPackage::new(resolve_package(&name, m, p)?).map_err(|e| e.to_string())?;
                    (pkg.name.to_string(), pkg.calibration().clone(), Some(pkg.name))
                }
                (None, Some(path)) => (path.display().to_string(), read_form(&path)?, None),
                _ => return Err("comass needs exactly one of --package or --form".into()),
            };
            comass(&label, &form, package, &config, &output)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("CALIBER_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CALIBER_THREADS must be a positive integer, got {value:?}"))?;
    // A second call in the same process (tests) keeps the existing pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn positive(flag: &str, value: f64) -> Result<(), Failure> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(format!("{flag} must be positive, got {value}"))
    }
}

/// `kahler` and `slag` take `--m`/`--p` (defaults 2, 1 and 3); full names
/// such as `kahler-3-1` are accepted as well.
fn resolve_package(name: &str, m: Option<usize>, p: Option<usize>) -> Result<PackageName, Failure> {
    let lower = name.trim().to_ascii_lowercase().replace('_', "-");
    let pkg = match lower.as_str() {
        "kahler" => PackageName::Kahler { m: m.unwrap_or(2), p: p.unwrap_or(1) },
        "slag" if p.is_none() => PackageName::Slag { m: m.unwrap_or(3) },
        _ if m.is_some() || p.is_some() => {
            return Err(format!("--m/--p apply only to the bare names kahler and slag, not {name:?}"))
        }
        _ => lower.parse().map_err(|e| format!("{e}"))?,
    };
    pkg.validate().map_err(|e| e.to_string())?;
    Ok(pkg)
}

fn read_form(path: &Path) -> Result<Form, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Form::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit<T: Serialize>(output: &Output, text: &str, value: &T) -> Result<(), Failure> {
    let body = if output.json {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
        s.push('\n');
        s
    } else {
        text.to_string()
    };
    match &output.out {
        Some(path) => fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct TablesReport {
    rows: Vec<TableRow>,
    pass: bool,
}

fn tables(assoc_form: Option<&Path>, output: &Output) -> Result<bool, Failure> {
    let replacement = assoc_form.map(read_form).transpose()?;
    let packages: Vec<CalibrationPackage> = table_packages()
        .into_iter()
        .map(|name| {
            let pkg = CalibrationPackage::new(name)?;
            match (&replacement, name) {
                (Some(form), PackageName::Assoc) => pkg.with_calibration(form.clone()),
                _ => Ok(pkg),
            }
        })
        .collect::<caliber::Result<_>>()
        .map_err(|e| e.to_string())?;
    let rows: Vec<TableRow> = packages
        .par_iter()
        .map(table_row)
        .collect::<caliber::Result<_>>()
        .map_err(|e| e.to_string())?;
    let pass = rows.iter().all(|r| r.pass);

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:<14} {:>2} {:>2}  {:<12} {:<22} {:<22} {:>9} {:>9} {:>4} {:>4}  {:<9} status",
        "package", "n", "k", "calibration", "G", "H", "dim g", "dim h", "perp", "off", "compliant"
    );
    for r in &rows {
        let _ = writeln!(
            text,
            "{:<14} {:>2} {:>2}  {:<12} {:<22} {:<22} {:>4} ({:>2}) {:>4} ({:>2}) {:>4} {:>4}  {:<9} {}",
            r.package,
            r.n,
            r.k,
            r.calibration,
            r.group_label,
            r.subgroup_label,
            r.dims.g,
            r.expected_g,
            r.dims.h,
            r.expected_h,
            r.dims.h_perp_g,
            r.dims.g_cap_offdiag,
            r.compliant.map_or("n/a", yes_no),
            if r.pass { "ok" } else { "MISMATCH" }
        );
    }
    let _ = writeln!(text, "{}", if pass { "all rows match" } else { "some rows do not match" });
    emit(output, &text, &TablesReport { rows, pass })?;
    Ok(pass)
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
        Parity::Mixed => "mixed",
    }
}

fn read_plane(path: &Path, n: usize) -> Result<OrientedPlane<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let columns: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let basis = Mat::from_columns(n, &columns).map_err(|e| format!("{}: {e}", path.display()))?;
    OrientedPlane::new(basis).map_err(|e| format!("{}: {e}", path.display()))
}

fn compliancy(args: &PackageArgs, plane: Option<&Path>, rank_tol: f64, output: &Output) -> Result<bool, Failure> {
    positive("--rank-tol", rank_tol)?;
    let pkg = CalibrationPackage::new(resolve_package(&args.package, args.m, args.p)?).map_err(|e| e.to_string())?;
    let report: ComplianceReport = match plane {
        None => standard_compliance(&pkg),
        Some(path) => compliance_check(&pkg, &read_plane(path, pkg.n)?, rank_tol),
    }
    .map_err(|e| e.to_string())?;
    let consistent = report.criteria_consistent();

    let d = report.dims;
    let mut text = String::new();
    let _ = writeln!(text, "package: {}", report.package);
    let _ = writeln!(text, "dims: g {}, h {}, h_perp_g {}, g_cap_offdiag {}", d.g, d.h, d.h_perp_g, d.g_cap_offdiag);
    let _ = writeln!(text, "compliant: {}", yes_no(report.compliant));
    let parity: Vec<String> = pkg
        .forms
        .iter()
        .map(|(l, _)| format!("{l} {}", parity_name(report.parity[l])))
        .collect();
    let _ = writeln!(text, "parity: {}", parity.join(", "));
    let signs: Vec<String> = pkg.forms.iter().map(|(l, _)| format!("{l} {}", sign_name(report.signs[l]))).collect();
    let _ = writeln!(text, "involution in hat G: {} (signs: {})", yes_no(report.involution_in_hat_g), signs.join(", "));
    let _ = writeln!(text, "Ad(involution) preserves g: {}", yes_no(report.ad_phi_preserves_g));
    let s = &report.symmetric_pair;
    let _ = writeln!(
        text,
        "symmetric pair: [h,h] in h {}, [h,m] in m {}, [m,m] in h {}",
        yes_no(s.hh_in_h),
        yes_no(s.hm_in_m),
        yes_no(s.mm_in_h)
    );
    let _ = writeln!(text, "criteria consistent: {}", yes_no(consistent));
    emit(output, &text, &report)?;
    Ok(consistent)
}

#[derive(Serialize)]
struct ImmersionOutput<'a> {
    report: &'a ResidualReport,
    convergence: &'a [ConvergenceEntry],
}

fn immersion(
    name: ExampleName,
    package: Option<PackageName>,
    config: &ImmersionConfig,
    with_convergence: bool,
    output: &Output,
) -> Result<bool, Failure> {
    let example = Example::new(name, package).map_err(|e| e.to_string())?;
    let report = run_checks(&example, config).map_err(|e| e.to_string())?;
    let entries = if with_convergence {
        convergence(&example, config, CONVERGENCE_FLOOR).map_err(|e| e.to_string())?
    } else {
        Vec::new()
    };
    let pass = report.passed() && entries.iter().all(|e| e.pass);

    let mut text = String::new();
    let _ = writeln!(
        text,
        "example: {}  package: {}  grid: {} points  step: {:e}",
        report.example, report.package, report.points, report.step
    );
    let _ = writeln!(text, "calibrated: {}", yes_no(report.calibrated));
    let _ = writeln!(text, "{:<28} {:>12} {:>10}  status", "check", "max residual", "tolerance");
    for c in &report.checks {
        let status = match (c.applicable, c.pass) {
            (false, _) => "n/a",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        let _ = writeln!(text, "{:<28} {:>12.3e} {:>10.1e}  {status}", c.name, c.max_residual, c.tolerance);
    }
    if with_convergence {
        let _ = writeln!(text, "\n{:<28} {:>12} {:>12} {:>7}  status", "check", "h", "h/2", "ratio");
        for e in &entries {
            let status = match (e.applicable, e.pass) {
                (false, _) => "roundoff",
                (true, true) => "pass",
                (true, false) => "FAIL",
            };
            let _ = writeln!(
                text,
                "{:<28} {:>12.3e} {:>12.3e} {:>7.2}  {status}",
                e.name, e.residual_h, e.residual_half, e.ratio
            );
        }
    }
    let _ = writeln!(text, "{}", if pass { "all checks pass" } else { "some checks fail" });
    if with_convergence {
        emit(output, &text, &ImmersionOutput { report: &report, convergence: &entries })?;
    } else {
        emit(output, &text, &report)?;
    }
    Ok(pass)
}

fn comass(
    label: &str,
    form: &Form,
    package: Option<PackageName>,
    config: &ComassConfig,
    output: &Output,
) -> Result<bool, Failure> {
    let report = comass_search(form, config).map_err(|e| e.to_string())?;
    let pass = report.certificate && report.max_found >= 1.0 - config.tol;

    let mut text = String::new();
    let _ = writeln!(text, "form: {label}");
    let _ = writeln!(
        text,
        "samples: {}  iters: {}  seed: {}",
        report.samples, report.iters, report.seed
    );
    let _ = writeln!(text, "max found: {:.12}", report.max_found);
    let _ = writeln!(text, "upper certificate (<= 1 + {:e}): {}", config.tol, yes_no(report.certificate));
    let _ = writeln!(text, "argmax plane columns:");
    for col in &report.argmax_plane {
        let entries: Vec<String> = col.iter().map(|v| format!("{v:+.6}")).collect();
        let _ = writeln!(text, "  [{}]", entries.join(", "));
    }
    if package == Some(PackageName::DoublePoint) {
        let n = form.ambient_dim();
        let argmax = DMatrix::from_fn(n, report.argmax_plane.len(), |i, j| report.argmax_plane[j][i]);
        let axis = |first: usize| DMatrix::from_fn(n, 3, |i, j| if i == first + j { 1.0 } else { 0.0 });
        let angle = principal_angle(&argmax, &axis(0)).min(principal_angle(&argmax, &axis(3)));
        let _ = writeln!(text, "principal angle to nearest calibrated axis plane: {angle:.3e}");
    }
    let _ = writeln!(text, "{}", if pass { "comass one confirmed" } else { "comass one not confirmed" });
    emit(output, &text, &report)?;
    Ok(pass)
}

fn sign_name(s: i32) -> &'static str {
    match s {
        1 => "+1",
        -1 => "-1",
        _ => "neither",
    }
}
