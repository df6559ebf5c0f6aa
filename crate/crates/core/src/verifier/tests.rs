use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{lower_curvature, MetricField, TensorField};
use crate::report::Status;
use crate::tensor::{residual, PointTensor};
use crate::zoo::{self, Sampler, SphereChart};

fn sample(model: &AcmsField, n: usize) -> Sample {
    Sample::new(model, n, 7)
}

/// Flat `R^(2n+1)` with a constant structure; `∇ξ = 0`, so `η` is not contact.
fn flat_cosymplectic(n: usize) -> AcmsField {
    let dim = 2 * n + 1;
    let g = PointTensor::from_fn(0, 2, dim, |i| if i[0] == i[1] { 1.0 } else { 0.0 });
    let mut phi = vec![0.0; dim * dim];
    for k in 0..n {
        phi[(2 * k + 1) * dim + 2 * k] = 1.0;
        phi[2 * k * dim + 2 * k + 1] = -1.0;
    }
    let mut xi = vec![0.0; dim];
    xi[dim - 1] = 1.0;
    AcmsField::new(
        "flat-cosymplectic",
        MetricField::new(TensorField::constant(g), vec![1; dim]).unwrap(),
        TensorField::constant(PointTensor::from_matrix(dim, &phi)),
        TensorField::constant(PointTensor::vector(xi.clone())),
        TensorField::constant(PointTensor::covector(xi)),
        Sampler::Cube { half_width: 1.0 },
        1e-8,
    )
    .unwrap()
}

#[test]
fn every_check_passes_on_nearly_sasakian_models() {
    for info in zoo::catalogue().into_iter().filter(|m| !m.negative_control) {
        let model = zoo::model(info.id).unwrap();
        let s = sample(&model, 4);
        for r in run_checks(&CheckId::ALL, &model, &s, model.default_tolerance(), CheckOptions::default()) {
            assert!(
                matches!(r.status, Status::Pass | Status::Skipped),
                "{} on {}: {:?} {:?} {:?} {:?}",
                r.check,
                r.model,
                r.status,
                r.residuals.iter().filter(|x| !x.passed).collect::<Vec<_>>(),
                r.observations.iter().filter(|x| !x.satisfied).collect::<Vec<_>>(),
                r.notes
            );
        }
    }
}

#[test]
fn gate_turns_negative_control_into_errors() {
    let model = zoo::model("darboux-perturbed:2").unwrap();
    let s = sample(&model, 3);
    assert!(!gate(&model, &s, model.default_tolerance()).passed);
    let r = run_check(CheckId::EasyFacts, &model, &s, 1e-8, CheckOptions::default());
    assert_eq!(r.status, Status::Errored);
    assert!(r.notes[0].contains("not nearly Sasakian"));
    let l = run_check(CheckId::LefschetzInjectivity, &model, &s, 1e-8, CheckOptions::default());
    assert_eq!(l.status, Status::Pass);
}

#[test]
fn every_model_dependent_check_fails_on_some_negative_control() {
    let off = CheckOptions { enforce_gate: false };
    let controls = [
        zoo::model("darboux-perturbed:2").unwrap(),
        zoo::model("darboux-perturbed:3").unwrap(),
        flat_cosymplectic(3),
        zoo::s5_with_chart("s5-reversed-reeb", SphereChart { reeb_sign: -1.0, ..SphereChart::default() }).unwrap(),
    ];
    let samples: Vec<Sample> = controls.iter().map(|m| sample(m, 3)).collect();
    for id in CheckId::ALL.into_iter().filter(|c| c.gated()) {
        let failed = controls
            .iter()
            .zip(&samples)
            .any(|(m, s)| run_check(id, m, s, 1e-8, off).status == Status::Fail);
        assert!(failed, "{} never fails", id.name());
    }
}

#[test]
fn pseudo_riemannian_model_skips_spectral_checks() {
    let model = zoo::model("darboux-pseudo:2:+-").unwrap();
    let s = sample(&model, 3);
    for id in [CheckId::Contactness, CheckId::Eigenbundles, CheckId::MainTheoremMechanism] {
        let r = run_check(id, &model, &s, model.default_tolerance(), CheckOptions::default());
        assert_eq!(r.status, Status::Skipped);
        assert!(r.notes[0].contains("positive definite"));
    }
    let c = run_check(CheckId::CharpolyConstancy, &model, &s, model.default_tolerance(), CheckOptions::default());
    assert_eq!(c.status, Status::Pass);
}

#[test]
fn sasakian_spectrum_and_main_chain() {
    let model = zoo::model("darboux-sasakian:3").unwrap();
    let s = sample(&model, 3);
    let c = run_check(CheckId::Contactness, &model, &s, 1e-8, CheckOptions::default());
    let spec = c.spectrum.unwrap();
    assert_eq!(spec.multiplicities.len(), 2);
    assert!((spec.multiplicities[0].0).abs() < 1e-12 && spec.multiplicities[0].1 == 1);
    assert!((spec.multiplicities[1].0 + 1.0).abs() < 1e-12 && spec.multiplicities[1].1 == 6);
    assert!(spec.newton_residual() < 1e-12);
    let m = run_check(CheckId::MainTheoremMechanism, &model, &s, 1e-8, CheckOptions::default());
    assert_eq!(m.status, Status::Pass);
    assert_eq!(m.observation("lefschetz_kernel_dim"), Some(0.0));
    let k = run_check(CheckId::ImageKernelCases, &model, &s, 1e-8, CheckOptions::default());
    assert!(k.notes.iter().any(|n| n.contains("image case vacuous")));
}

#[test]
fn five_sphere_main_chain_is_inconclusive_by_dimension() {
    let model = zoo::model("s5-nearly-sasakian").unwrap();
    let s = sample(&model, 3);
    let m = run_check(CheckId::MainTheoremMechanism, &model, &s, model.default_tolerance(), CheckOptions::default());
    assert_eq!(m.status, Status::Skipped);
    assert_eq!(m.observation("lefschetz_kernel_dim"), Some(5.0));
    assert!(m.observation("psi_norm").unwrap() > 1e-3);
    assert!(m.residual("d_eta_wedge_psi_on_contact_distribution").unwrap() < 1e-9);
}

#[test]
fn point_outside_chart_reports_errored_with_point() {
    let model = zoo::model("s5-nearly-sasakian").unwrap();
    let coords = vec![vec![0.1; 5], vec![0.9, 0.9, 0.0, 0.0, 0.0]];
    let s = Sample::from_coords(&model, coords, 1);
    let r = run_check(CheckId::EasyFacts, &model, &s, 1e-7, CheckOptions::default());
    assert_eq!(r.status, Status::Errored);
    assert_eq!(r.errored_point, Some(vec![0.9, 0.9, 0.0, 0.0, 0.0]));
}

#[test]
fn i_phi_riem_formula_holds_for_arbitrary_skew_phi() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for id in ["darboux-perturbed:3", "s5-nearly-sasakian"] {
        let model = zoo::model(id).unwrap();
        let x = model.sample_points(1, 2).remove(0);
        let p = model.point(&x).unwrap();
        let n = p.dim;
        let mut s = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(-1.0..1.0);
                s[i * n + j] = v;
                s[j * n + i] = -v;
            }
        }
        // φ = g⁻¹S is g-skew
        let gi = p.ginv.components();
        let phi = PointTensor::from_fn(1, 1, n, |i| (0..n).map(|b| gi[i[0] * n + b] * s[b * n + i[1]]).sum());
        let rphi = &p.r.compose(&phi).unwrap() - &phi.compose(&p.r).unwrap();
        let lhs = p.riem.i_phi(&phi).unwrap();
        let rhs = algebraic::ge(&lower_curvature(&p.g, &rphi), "1 + (1,3)(2,4)");
        assert!(residual(&lhs, &rhs) < 1e-12, "{id}");
        let sym = lhs.polarization_vanishing_test(1e-9);
        assert!(sym.is_ok(), "{id}: {sym:?}");
        assert_eq!(sym.unwrap(), lhs.max_abs() < 1e-9);
    }
}

#[test]
fn reports_are_reproducible() {
    let model = zoo::model("s5-nearly-sasakian").unwrap();
    let a = run_checks(&CheckId::ALL, &model, &sample(&model, 3), 1e-7, CheckOptions::default());
    let b = run_checks(&CheckId::ALL, &model, &sample(&model, 3), 1e-7, CheckOptions::default());
    assert_eq!(a, b);
}

#[test]
fn check_ids_round_trip() {
    for id in CheckId::ALL {
        assert_eq!(CheckId::parse(id.name()), Some(id));
    }
    assert_eq!(CheckId::parse("check_nothing"), None);
    assert_eq!(checks_catalogue().len(), 12);
}
