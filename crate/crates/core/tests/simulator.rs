mod common;

use blockade::fock_sim::{
    coherent_state, evolve, g2_exact, thermal_state, DensityMatrix, Simulator, StepControl,
};
use blockade::optimize::verify_drive;
use blockade::{BlockadeError, DriveSpec, SystemParams, Truncation};
use common::{bichromatic_reference, coherent_amplitude};

#[test]
fn linear_cavity_stays_coherent() {
    let (eps, delta, kappa) = (0.01, 0.03, 0.02);
    let p = SystemParams::new(0.0, kappa).unwrap();
    let t = Truncation::new(8, 1).unwrap();
    let d = DriveSpec::monochromatic(eps, delta).unwrap();
    let s = evolve(
        &DensityMatrix::vacuum(t),
        &p,
        &d,
        3.0 * p.period(),
        &StepControl::default(),
    )
    .unwrap();
    for k in (10..s.len()).step_by(37) {
        let time = s.times[k] * p.period();
        let n = coherent_amplitude(eps, delta, kappa, time).norm_sqr();
        let mut poisson = (-n).exp();
        for m in 0..4 {
            assert!((s.p(m, k) - poisson).abs() < 1e-9, "p{m} at t = {time}");
            poisson *= n / (m + 1) as f64;
        }
        let g2 = s.g2[k].unwrap();
        assert!((g2 - 1.0).abs() < 1e-6, "g2 = {g2}");
    }
}

#[test]
fn coherent_state_has_unit_g2() {
    let t = Truncation::new(30, 1).unwrap();
    for alpha in [0.05, 0.7, 1.9] {
        let rho = coherent_state(blockade::C64::from_polar(alpha, 0.4), t);
        assert!((g2_exact(&rho).unwrap() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn mechanics_relaxes_toward_bath() {
    let (gamma, bath) = (0.05, 0.5);
    let p = SystemParams::baseline()
        .with_mechanical_bath(gamma, bath)
        .unwrap();
    let t = Truncation::new(1, 30).unwrap();
    let target = thermal_state(bath, t).unwrap().phonon_populations();
    let sim = Simulator::new(&p, t).unwrap();
    let mut distances = Vec::new();
    let mut worst_mean: f64 = 0.0;
    sim.evolve_with(
        &thermal_state(1.0, t).unwrap(),
        &DriveSpec::none(),
        4.0 * p.period(),
        &StepControl::fixed(1),
        |s, rho| {
            let pops = rho.phonon_populations();
            let mean: f64 = pops.iter().enumerate().map(|(m, q)| m as f64 * q).sum();
            let want = bath + (1.0 - bath) * (-gamma * s * p.period()).exp();
            worst_mean = worst_mean.max((mean - want).abs());
            distances.push(
                0.5 * pops
                    .iter()
                    .zip(&target)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>(),
            );
            Ok(())
        },
    )
    .unwrap();
    assert!(
        worst_mean < 1e-5,
        "mean phonon number off by {worst_mean:.2e}"
    );
    assert!(distances.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    assert!(distances.last().unwrap() < &(0.5 * distances[0]));
}

#[test]
fn bichromatic_result_is_truncation_robust() {
    let p = SystemParams::baseline();
    let d = bichromatic_reference();
    let g2_at = |t: Truncation| {
        let s = evolve(
            &DensityMatrix::vacuum(t),
            &p,
            &d,
            5.0 * p.period(),
            &StepControl::fixed(1),
        )
        .unwrap();
        s.g2[s.index_at(5.0)].unwrap()
    };
    let small = g2_at(Truncation::standard());
    let large = g2_at(Truncation::new(8, 20).unwrap());
    assert!((small / large - 1.0).abs() < 1e-3, "{small} vs {large}");
    assert!((small / 5.785e-5 - 1.0).abs() < 1e-3);
}

#[test]
fn step_refinement_reports_change() {
    let p = SystemParams::baseline();
    let t = Truncation::new(3, 8).unwrap();
    let s = evolve(
        &DensityMatrix::vacuum(t),
        &p,
        &bichromatic_reference(),
        p.period(),
        &StepControl::default(),
    )
    .unwrap();
    assert_eq!(s.substeps, 2);
    assert!(s.step_change.unwrap() < 1e-7);
    assert_eq!(s.len(), 201);
}

#[test]
fn silent_drive_leaves_g2_undefined() {
    let p = SystemParams::baseline();
    let (v, _) = verify_drive(
        &DriveSpec::none(),
        &p,
        Truncation::new(3, 6).unwrap(),
        1.0,
        None,
        &StepControl::fixed(1),
    )
    .unwrap();
    assert_eq!(v.g2, None);
    assert!(!v.validated);
    assert!(matches!(
        g2_exact(&DensityMatrix::vacuum(Truncation::new(2, 2).unwrap())),
        Err(BlockadeError::Undefined(_))
    ));
}

#[test]
fn mismatched_state_is_rejected() {
    let p = SystemParams::baseline();
    let sim = Simulator::new(&p, Truncation::new(2, 3).unwrap()).unwrap();
    let rho = DensityMatrix::vacuum(Truncation::new(3, 3).unwrap());
    let r = sim.evolve(&rho, &DriveSpec::none(), 1.0, &StepControl::fixed(1));
    assert!(matches!(r, Err(BlockadeError::DimensionMismatch { .. })));
}
