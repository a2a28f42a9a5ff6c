//! Worked examples for the pipelines, presets, thresholds and the
//! feasibility calculator.

use std::f64::consts::PI;

use micromacro::gaussian;
use micromacro::protocol::{
    feasibility, find_threshold, metric, nanobeam, run_fock_protocol, run_gaussian_protocol,
    trampoline, Engine, Parameter, ProtocolConfig, RegimeThresholds, ZERO_THRESHOLD,
};
use micromacro::sweep::{preset, preset_base, PRESET_NAMES};
use micromacro::Error;

#[test]
fn ideal_pipeline_is_lossless() {
    for r in [0.1, 0.5, 1.0] {
        let out = run_gaussian_protocol(&ProtocolConfig::ideal(r)).unwrap();
        assert!((out.e_n - 2.0 * r).abs() < 1e-10);
        assert!((out.nu_min - (-2.0 * r).exp() / 2.0).abs() < 1e-12);
    }
}

#[test]
fn coupling_examples() {
    let base = ProtocolConfig::default();
    assert!(run_gaussian_protocol(&base).unwrap().e_n > 0.0);
    assert_eq!(
        run_gaussian_protocol(&base.with(Parameter::Y, 0.99))
            .unwrap()
            .e_n,
        0.0
    );
}

#[test]
fn channel_coefficient_examples() {
    let c = gaussian::channel_coefficients(0.0, 0.1).unwrap();
    assert!((c.c1 - 0.99).abs() < 1e-15);
    assert!((c.c2_mag - 0.099498743710662).abs() < 1e-12);
    assert!((c.f1 - 0.1).abs() < 1e-15);
    assert_eq!(c.f2, 0.0);
    let c = gaussian::channel_coefficients(0.01, 0.1).unwrap();
    assert!((c.f1 - 0.1040).abs() < 5e-5);
    assert!((c.f2 - 0.1364).abs() < 5e-5);
    assert!((c.closure() - 1.0).abs() < 1e-12);
    let near_one = gaussian::channel_coefficients(0.3, 1.0 - 1e-6).unwrap();
    assert!(near_one.f2 < 1e-5);
}

#[test]
fn phase_noise_example() {
    let s = gaussian::GaussianTwoModeState::vacuum();
    let out = gaussian::phase_noise(&s, gaussian::Mode::A, 0.01, 5000.0 * 0.99f64.powi(2)).unwrap();
    assert!((out.cov[(1, 1)] - 0.5 - 0.9801).abs() < 1e-12);
}

#[test]
fn preset_captions() {
    // (preset, r, N_D, y, x, N_in, N_th, sigma, eta1, eta2, eta_c, engine)
    let table = [
        (
            "fig2",
            0.5,
            5000.0,
            0.1,
            0.01,
            1.0,
            10.0,
            0.01,
            0.8,
            0.8,
            0.8,
            Engine::Gaussian,
        ),
        (
            "fig3",
            0.5,
            5000.0,
            0.1,
            0.01,
            1.0,
            10.0,
            0.01,
            0.8,
            0.8,
            0.8,
            Engine::Gaussian,
        ),
        (
            "fig4",
            0.5,
            5000.0,
            0.1,
            0.01,
            1.0,
            10.0,
            0.01,
            0.8,
            0.8,
            0.8,
            Engine::Gaussian,
        ),
        (
            "fig5",
            0.5,
            5000.0,
            0.1,
            0.01,
            1.0,
            10.0,
            0.01,
            0.8,
            0.8,
            0.8,
            Engine::Gaussian,
        ),
        (
            "figA1",
            0.5,
            5000.0,
            0.1,
            0.01,
            1.0,
            10.0,
            0.01,
            0.8,
            0.8,
            1.0,
            Engine::Fock,
        ),
    ];
    assert_eq!(table.len(), PRESET_NAMES.len());
    for (name, r, n_d, y, x, n_in, n_th, sigma, eta1, eta2, eta_c, engine) in table {
        let b = preset_base(name).unwrap();
        let got = [
            b.r, b.n_d, b.y, b.x, b.n_in, b.n_th, b.sigma, b.eta1, b.eta2, b.eta_c,
        ];
        let want = [r, n_d, y, x, n_in, n_th, sigma, eta1, eta2, eta_c];
        assert_eq!(got, want, "{name}");
        assert_eq!(b.engine, engine, "{name}");
    }
    assert!(preset_base("figA1").unwrap().truncation_override);
}

#[test]
fn gaussian_presets_have_their_axes() {
    let expect = [
        ("fig2", Parameter::Y, Parameter::NIn, vec![0.0, 1.0, 10.0]),
        (
            "fig3",
            Parameter::DisplacementPhotons,
            Parameter::Sigma,
            vec![0.005, 0.01, 0.02],
        ),
        ("fig4", Parameter::X, Parameter::NTh, vec![1.0, 5.0, 10.0]),
        (
            "fig5",
            Parameter::Eta1,
            Parameter::Eta2,
            vec![0.6, 0.8, 1.0],
        ),
    ];
    for (name, axis, series, values) in expect {
        let spec = preset(name).unwrap();
        assert_eq!(spec.axis1.param, axis, "{name}");
        let s = spec.series.unwrap();
        assert_eq!((s.param, s.values), (series, values), "{name}");
        assert!(spec.axis2.is_none());
    }
}

#[test]
fn preset_base_round_trips() {
    for name in PRESET_NAMES {
        let b = preset_base(name).unwrap();
        let mut back = ProtocolConfig::ideal(0.0);
        back.apply_kv(&b.to_kv_string()).unwrap();
        assert_eq!(back, b, "{name}");
    }
}

#[test]
fn mechanical_noise_threshold() {
    let cfg = preset_base("fig4").unwrap();
    let x_star = find_threshold(&cfg, Parameter::X, 0.0, 0.2, 1e-5).unwrap();
    let product = cfg.n_th * x_star;
    assert!((0.1..=0.4).contains(&product), "N_th x* = {product}");
    // Beyond the returned value the entanglement stays at zero.
    for k in 1..=10 {
        let x = x_star + (0.2 - x_star) * k as f64 / 10.0;
        assert!(metric(&cfg.with(Parameter::X, x)).unwrap() < ZERO_THRESHOLD);
    }
}

#[test]
fn threshold_without_sign_change_is_an_error() {
    let cfg = preset_base("fig5").unwrap();
    assert!(matches!(
        find_threshold(&cfg, Parameter::Eta1, 0.6, 1.0, 1e-5),
        Err(Error::Bracket(_))
    ));
}

fn fock_base() -> ProtocolConfig {
    ProtocolConfig {
        engine: Engine::Fock,
        n_th: 0.2,
        eta_c: 1.0,
        ..Default::default()
    }
}

#[test]
fn fock_guard_and_override() {
    let hot = ProtocolConfig {
        n_th: 10.0,
        ..fock_base()
    };
    assert!(matches!(run_fock_protocol(&hot), Err(Error::Truncation(_))));
    let out = run_fock_protocol(&ProtocolConfig {
        truncation_override: true,
        ..hot
    })
    .unwrap();
    assert!(out.thermal_leakage > 0.1);
    assert!(out
        .warnings
        .iter()
        .any(|w| w.contains("thermal state truncated")));
}

#[test]
fn fock_displacement_threshold() {
    let cfg = fock_base().with(Parameter::Sigma, 0.1);
    let n_star = find_threshold(&cfg, Parameter::DisplacementPhotons, 0.0, 1e5, 1.0).unwrap();
    assert!(n_star > 0.0 && n_star < 1e5);
    assert!(
        run_fock_protocol(&cfg.with(Parameter::DisplacementPhotons, n_star))
            .unwrap()
            .concurrence
            < ZERO_THRESHOLD
    );
    assert!(
        run_fock_protocol(&cfg.with(Parameter::DisplacementPhotons, 0.5 * n_star))
            .unwrap()
            .concurrence
            > 0.0
    );
}

#[test]
fn nanobeam_report() {
    let r = feasibility(&nanobeam(), RegimeThresholds::default()).unwrap();
    assert!((r.big_g / (2.0 * PI) / 3.2e6 - 1.0).abs() < 0.02);
    assert!((r.n_th - 10.8).abs() / 10.8 < 0.02);
    assert!(r.suppression < 0.02);
    assert!((r.suppression - 0.018).abs() < 5e-4);
    assert!((r.y_g.unwrap() - 0.134).abs() < 1e-3);
    assert!(r.resolved_sideband && r.adiabatic);
    assert!(r.notes.iter().any(|n| n.contains("y = 0.1 needs tau")));
}

#[test]
fn trampoline_report() {
    let r = feasibility(&trampoline(), RegimeThresholds::default()).unwrap();
    assert!((r.decoherence_time / 7.6e-3 - 1.0).abs() < 0.05);
    assert!(r.detectable);
}

#[test]
fn stricter_regime_threshold_flips_flags() {
    let strict = RegimeThresholds {
        much_greater: 10.0,
        ..Default::default()
    };
    let r = feasibility(&nanobeam(), strict).unwrap();
    assert!(!r.resolved_sideband);
    assert!(r.adiabatic);
}
