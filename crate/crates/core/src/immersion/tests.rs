use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use super::*;
use crate::calibrations::{convert_form, CalibrationPackage, PackageName};

fn ex(name: ExampleName) -> Example {
    Example::new(name, None).unwrap()
}

fn standard_completion(n: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n - k, |i, j| if i == j + k { 1.0 } else { 0.0 })
}

fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    (a - b).abs().max() <= tol
}

#[test]
fn complex_graph_jet_at_origin() {
    let jet = sample_jet(&Geometry::ComplexGraph { conj: 0.0 }, &[0.0, 0.0], 1e-3).unwrap();
    let id = DMatrix::from_fn(4, 2, |i, j| if i == j { 1.0 } else { 0.0 });
    assert!(close(&jet.first, &id, 1e-12));
    // Hessians of Re z² = x² - y² and Im z² = 2xy.
    let xx = DVector::from_vec(vec![0.0, 0.0, 2.0, 0.0]);
    let yy = DVector::from_vec(vec![0.0, 0.0, -2.0, 0.0]);
    let xy = DVector::from_vec(vec![0.0, 0.0, 0.0, 2.0]);
    assert!((jet.second[0].column(0) - xx).norm() < 1e-9);
    assert!((jet.second[1].column(1) - yy).norm() < 1e-9);
    assert!((jet.second[0].column(1) - &xy).norm() < 1e-9);
    assert!((jet.second[1].column(0) - xy).norm() < 1e-9);
}

#[test]
fn slag_graph_jet_matches_hand_derivatives() {
    let (x1, x2) = (0.1, 0.2);
    let jet = sample_jet(&Geometry::SlagGraph, &[x1, x2], 1e-3).unwrap();
    let first = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 6.0 * x1, -6.0 * x2, -6.0 * x2, -6.0 * x1]);
    assert!(close(&jet.first, &first, 1e-8));
    let d11 = DVector::from_vec(vec![0.0, 0.0, 6.0, 0.0]);
    let d22 = DVector::from_vec(vec![0.0, 0.0, -6.0, 0.0]);
    let d12 = DVector::from_vec(vec![0.0, 0.0, 0.0, -6.0]);
    assert!((jet.second[0].column(0) - d11).norm() < 1e-6);
    assert!((jet.second[1].column(1) - d22).norm() < 1e-6);
    assert!((jet.second[0].column(1) - d12).norm() < 1e-6);
    // The potential is harmonic.
    assert!((jet.second[0][(2, 0)] + jet.second[1][(2, 1)]).abs() < 1e-6);
}

#[test]
fn plane_jet_has_no_second_derivatives() {
    for name in [PackageName::Assoc, PackageName::Cayley, PackageName::Kahler { m: 3, p: 2 }] {
        let e = Example::new(ExampleName::Plane, Some(name)).unwrap();
        let jet = sample_jet(&e.geometry, &e.center, 1e-3).unwrap();
        assert!(jet.second.iter().all(|m| m.iter().all(|&v| v == 0.0)));
    }
}

#[test]
fn non_immersion_is_rejected() {
    let g = Geometry::Plane { columns: vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]] };
    assert!(matches!(sample_jet(&g, &[0.0, 0.0], 1e-3), Err(crate::Error::NotImmersion { .. })));
    assert!(matches!(sample_jet(&g, &[0.0], 1e-3), Err(crate::Error::DimensionMismatch(1, 2))));
}

#[test]
fn axis_plane_frames_are_standard() {
    let e = Example::new(ExampleName::Plane, Some(PackageName::Assoc)).unwrap();
    let jet = sample_jet(&e.geometry, &e.center, 1e-3).unwrap();
    let frames = adapted_frames(&jet, &standard_completion(7, 3)).unwrap();
    assert!(close(&frames.full(), &DMatrix::identity(7, 7), 0.0));
    assert!(close(&frames.r, &DMatrix::identity(3, 3), 0.0));
}

#[test]
fn frames_are_orthonormal_and_span_the_tangent_space() {
    for name in ExampleName::ALL {
        let e = ex(name);
        let n = e.geometry.ambient_dim();
        let k = e.geometry.param_dim();
        for u in e.grid(3, 0.1) {
            let jet = sample_jet(&e.geometry, &u, 1e-3).unwrap();
            let f = adapted_frames(&jet, &standard_completion(n, k)).unwrap();
            let full = f.full();
            assert!(close(&(full.transpose() * &full), &DMatrix::identity(n, n), 1e-12), "{name}");
            assert!(full.determinant() > 0.0);
            // ∂F lies in the tangent span, with ∂F = T R.
            assert!(close(&(&f.tangent * &f.r), &jet.first, 1e-12), "{name}");
            assert!((f.normal.transpose() * &jet.first).abs().max() < 1e-12);
        }
    }
}

#[test]
fn second_fundamental_form_of_z_squared_at_origin() {
    let jet = sample_jet(&Geometry::ComplexGraph { conj: 0.0 }, &[0.0, 0.0], 1e-3).unwrap();
    let frames = adapted_frames(&jet, &standard_completion(4, 2)).unwrap();
    let d = second_fundamental_form(&jet, &frames);
    let a3 = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -2.0]);
    let a4 = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]);
    assert!(close(&d.a[0], &a3, 1e-8));
    assert!(close(&d.a[1], &a4, 1e-8));
    assert!(d.mean_curvature.norm() < 1e-8);
    // B_{e₁} e₁ = A(e₁, e₁) = 2 ν₁ and B_{e₁} ν₁ = -A*_{e₁} ν₁ = -2 e₁.
    let b = &d.b[0];
    assert!((b.column(0) - DVector::from_vec(vec![0.0, 0.0, 2.0, 0.0])).norm() < 1e-8);
    assert!((b.column(2) - DVector::from_vec(vec![-2.0, 0.0, 0.0, 0.0])).norm() < 1e-8);
}

/// `A(∂_a, ∂_b) = π_N ∂_a∂_b F` from hand derivatives of the slag graph.
#[test]
fn slag_second_fundamental_form_matches_analytic_oracle() {
    let (x1, x2) = (0.1, 0.2);
    let jet = sample_jet(&Geometry::SlagGraph, &[x1, x2], 1e-3).unwrap();
    let frames = adapted_frames(&jet, &standard_completion(4, 2)).unwrap();
    let d = second_fundamental_form(&jet, &frames);

    let df = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 6.0 * x1, -6.0 * x2, -6.0 * x2, -6.0 * x1]);
    let g_inv = (df.transpose() * &df).try_inverse().unwrap();
    let proj = DMatrix::identity(4, 4) - &df * &g_inv * df.transpose();
    let hess = [[[0.0, 0.0, 6.0, 0.0], [0.0, 0.0, 0.0, -6.0]], [[0.0, 0.0, 0.0, -6.0], [0.0, 0.0, -6.0, 0.0]]];
    let mut mean = DVector::zeros(4);
    for a in 0..2 {
        for b in 0..2 {
            let second = &proj * DVector::from_row_slice(&hess[a][b]);
            // Same quantity in the numerical frame: Σ_ij R_ia R_jb A(e_i, e_j).
            let numeric = (0..2)
                .map(|xi| {
                    let nu = frames.normal.column(xi).into_owned();
                    let v: f64 = (0..2)
                        .flat_map(|i| (0..2).map(move |j| (i, j)))
                        .map(|(i, j)| frames.r[(i, a)] * frames.r[(j, b)] * d.a[xi][(i, j)])
                        .sum();
                    nu * v
                })
                .fold(DVector::zeros(4), |acc, v| acc + v);
            assert!((numeric - &second).norm() < 1e-6);
            mean += second * g_inv[(a, b)];
        }
    }
    // Special Lagrangian, hence minimal.
    assert!(mean.norm() < 1e-12);
    assert!(d.mean_curvature.norm() < 1e-8);
}

/// Gauss curvature of the graph of a holomorphic `f` is
/// `-2|f''|² / (1 + |f'|²)³`; the Gauss equation gives it as `Σ_ξ det A^ξ`.
#[test]
fn gauss_equation_matches_holomorphic_curvature() {
    for u in [[0.0, 0.0], [0.2, 0.3], [-0.4, 0.1]] {
        let jet = sample_jet(&Geometry::ComplexGraph { conj: 0.0 }, &u, 1e-3).unwrap();
        let frames = adapted_frames(&jet, &standard_completion(4, 2)).unwrap();
        let d = second_fundamental_form(&jet, &frames);
        let k: f64 = d.a.iter().map(|a| a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).sum();
        let z2 = u[0] * u[0] + u[1] * u[1];
        let expected = -8.0 / (1.0 + 4.0 * z2).powi(3);
        assert!((k - expected).abs() < 1e-6, "{u:?}: {k} vs {expected}");
    }
}

#[test]
fn b_operators_are_skew_and_block_off_diagonal() {
    for name in ExampleName::ALL {
        let e = ex(name);
        let jet = sample_jet(&e.geometry, &e.center, 1e-3).unwrap();
        let n = e.geometry.ambient_dim();
        let k = e.geometry.param_dim();
        let frames = adapted_frames(&jet, &standard_completion(n, k)).unwrap();
        let d = second_fundamental_form(&jet, &frames);
        let f = frames.full();
        for b in d.b.iter().chain(&d.b_coord) {
            assert_eq!((b + b.transpose()).abs().max(), 0.0);
            let local = f.transpose() * b * &f;
            assert!(local.view((0, 0), (k, k)).abs().max() < 1e-12);
            assert!(local.view((k, k), (n - k, n - k)).abs().max() < 1e-12);
        }
        // B_{∂_a} = Σ_i R_ia B_{e_i}.
        for a in 0..k {
            let combo = (0..k).fold(DMatrix::zeros(n, n), |acc, i| acc + &d.b[i] * frames.r[(i, a)]);
            assert!(close(&combo, &d.b_coord[a], 1e-9));
        }
    }
}

#[test]
fn planes_pass_with_zero_second_order_residuals() {
    for name in PackageName::catalog() {
        let e = Example::new(ExampleName::Plane, Some(name)).unwrap();
        let r = run_checks(&e, &ImmersionConfig::default()).unwrap();
        assert!(r.calibrated && r.passed(), "{name}");
        assert!(r.check("calibrated").unwrap().max_residual <= 1e-14);
        assert_eq!(r.check("calibrated").unwrap().tolerance, 1e-14);
        for c in &r.checks {
            assert!(c.max_residual <= 1e-14, "{name} {}", c.name);
        }
    }
}

#[test]
fn curved_examples_pass_every_check() {
    for name in [ExampleName::ComplexGraph, ExampleName::SlagGraph, ExampleName::AssocProduct] {
        let r = run_checks(&ex(name), &ImmersionConfig::default()).unwrap();
        assert!(r.calibrated, "{name}");
        let failing: Vec<_> = r.checks.iter().filter(|c| !c.pass).map(|c| &c.name).collect();
        assert!(failing.is_empty(), "{name}: {failing:?}");
        assert_eq!(r.points, 5usize.pow(ex(name).geometry.param_dim() as u32));
    }
}

#[test]
fn reports_carry_the_expected_checks() {
    let r = run_checks(&ex(ExampleName::SlagGraph), &ImmersionConfig::default()).unwrap();
    for name in [
        "calibrated",
        "mean_curvature",
        "minimality",
        "diamond:Re Upsilon",
        "diamond:omega",
        "diamond:Im Upsilon",
        "nabla_hat:omega",
        "g_membership",
        "bracket_in_h",
        "codazzi_in_h_perp",
        "gcr_closure",
        "gauss",
        "ricci",
        "identity:J(tangent)",
        "identity:J(normal)",
        "identity:Re Upsilon(1,1)",
    ] {
        assert!(r.check(name).is_some(), "{name}");
    }
    let r = run_checks(&ex(ExampleName::AssocProduct), &ImmersionConfig { points: 3, ..Default::default() }).unwrap();
    for name in ["identity:cross(v,v)", "identity:cross(v,xi)", "identity:cross(xi,xi)"] {
        assert!(r.check(name).is_some(), "{name}");
    }
}

#[test]
fn noncalibrated_control_fails_the_gate() {
    let r = run_checks(&ex(ExampleName::NoncalibratedControl), &ImmersionConfig::default()).unwrap();
    assert!(!r.calibrated);
    assert!(!r.passed());
    assert!(r.check("calibrated").unwrap().max_residual > 1e-6);
    let diamond = r.check("diamond:omega").unwrap();
    assert!(!diamond.applicable);
    assert!(diamond.max_residual > 1e-3);
    // The curvature identities do not depend on calibration.
    assert!(r.check("gcr_closure").unwrap().pass);
}

#[test]
fn ungated_run_marks_everything_applicable() {
    let config = ImmersionConfig { gated: false, points: 3, ..Default::default() };
    let r = run_checks(&ex(ExampleName::NoncalibratedControl), &config).unwrap();
    assert!(r.checks.iter().all(|c| c.applicable));
    assert!(!r.check("g_membership").unwrap().pass);
}

#[test]
fn convergence_is_second_order() {
    let entries = convergence(&ex(ExampleName::SlagGraph), &ImmersionConfig::default(), CONVERGENCE_FLOOR).unwrap();
    let applicable: Vec<_> = entries.iter().filter(|e| e.applicable).collect();
    assert!(applicable.iter().any(|e| e.name == "gauss"));
    for e in applicable {
        assert!(e.pass, "{} ratio {}", e.name, e.ratio);
    }
}

#[test]
fn invalid_configurations_are_rejected() {
    let e = ex(ExampleName::ComplexGraph);
    for config in [
        ImmersionConfig { step: 0.0, ..Default::default() },
        ImmersionConfig { step: 0.05, ..Default::default() },
        ImmersionConfig { points: 0, ..Default::default() },
    ] {
        assert!(matches!(run_checks(&e, &config), Err(crate::Error::Config(_))));
    }
}

#[test]
fn example_names_round_trip() {
    for name in ExampleName::ALL {
        assert_eq!(name.to_string().parse::<ExampleName>().unwrap(), name);
    }
    assert_eq!("complex_graph".parse::<ExampleName>().unwrap(), ExampleName::ComplexGraph);
    assert!("torus".parse::<ExampleName>().is_err());
    assert!(Example::new(ExampleName::SlagGraph, Some(PackageName::Assoc)).is_err());
}

#[test]
fn report_json_shape() {
    let r = run_checks(&ex(ExampleName::ComplexGraph), &ImmersionConfig { points: 3, ..Default::default() }).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["example", "package", "grid", "step", "checks"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let c = &v["checks"][0];
    for key in ["name", "max_residual", "tolerance", "pass"] {
        assert!(c.get(key).is_some(), "{key}");
    }
    let back: ResidualReport = serde_json::from_value(v).unwrap();
    assert_eq!(back, r);
}

#[test]
fn grid_is_centered() {
    let e = ex(ExampleName::SlagGraph);
    let grid = e.grid(5, 0.05);
    assert_eq!(grid.len(), 25);
    let mean: Vec<f64> = (0..2).map(|a| grid.iter().map(|u| u[a]).sum::<f64>() / 25.0).collect();
    assert!((mean[0] - e.center[0]).abs() < 1e-12 && (mean[1] - e.center[1]).abs() < 1e-12);
    assert!((grid[1][0] - grid[0][0] - 0.05).abs() < 1e-15);
}

#[test]
fn calibrated_residual_detects_orientation() {
    let pkg = CalibrationPackage::new(PackageName::Kahler { m: 2, p: 1 }).unwrap();
    let omega = convert_form::<f64>(&pkg.forms[0].1);
    // Swapping the parameters reverses the orientation: λ = -1.
    let g = Geometry::Plane { columns: vec![vec![0.0, 1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0, 0.0]] };
    let jet = sample_jet(&g, &[0.0, 0.0], 1e-3).unwrap();
    let frames = adapted_frames(&jet, &standard_completion(4, 2)).unwrap();
    let d = second_fundamental_form(&jet, &frames);
    assert!((calibrated_residual(&d, &omega) - 2.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Holomorphic graphs are calibrated everywhere; `B_u` lies in `u(2)`
    /// and kills `ω`.
    #[test]
    fn holomorphic_graph_pointwise(x in -0.6f64..0.6, y in -0.6f64..0.6) {
        let pkg = CalibrationPackage::new(PackageName::Kahler { m: 2, p: 1 }).unwrap();
        let omega = convert_form::<f64>(&pkg.forms[0].1);
        let jet = sample_jet(&Geometry::ComplexGraph { conj: 0.0 }, &[x, y], 1e-3).unwrap();
        let frames = adapted_frames(&jet, &standard_completion(4, 2)).unwrap();
        let d = second_fundamental_form(&jet, &frames);
        prop_assert!(calibrated_residual(&d, &omega) < 1e-10);
        prop_assert!(d.mean_curvature.norm() < 1e-6);
        for b in &d.b {
            let x = crate::exterior::SkewEndomorphism::skew_part(&crate::Mat::from_nalgebra(b)).unwrap();
            prop_assert!(omega.diamond(&x).unwrap().norm() < 1e-6);
        }
        for a in &d.a {
            prop_assert!((a - a.transpose()).abs().max() < 1e-10);
        }
    }
}
