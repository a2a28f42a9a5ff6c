//! End-to-end behaviour of the command-line front end.

use std::fs;

use micromacro::protocol::{
    run_gaussian_protocol, Parameter, PhaseNoiseConvention, ProtocolConfig,
};
use micromacro::sweep::{format_number, preset_base, CSV_SIGNIFICANT_DIGITS};
use micromacro_cli::{run, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};

fn run_capture(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("micromacro").chain(args.iter().copied());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn csv_value(csv: &str) -> String {
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2, "{csv}");
    rows[1].rsplit(',').next().unwrap().to_string()
}

fn e_n_text(cfg: &ProtocolConfig) -> String {
    format_number(
        run_gaussian_protocol(cfg).unwrap().e_n,
        CSV_SIGNIFICANT_DIGITS,
    )
}

#[test]
fn feasibility_preset_reports_effective_coupling() {
    let (code, out, _) = run_capture(&["feasibility", "--preset", "nanobeam"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "G = 2pi x 3.2e+06 Hz"), "{out}");
}

#[test]
fn feasibility_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tramp.cfg");
    let two_pi = 2.0 * std::f64::consts::PI;
    let text = format!(
        "# trampoline at 1 mK\nomega_m = {}\nkappa = {}\nQ = 1e6\ng = {}\nT = 1e-3\n",
        two_pi * 10e3,
        two_pi * 1.5e3,
        (two_pi * 200.0 * two_pi * 1.5e3f64).sqrt()
    );
    fs::write(&path, text).unwrap();
    let (code, out, _) = run_capture(&["feasibility", "--config", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (_, preset_out, _) = run_capture(&["feasibility", "--preset", "trampoline"]);
    assert_eq!(out, preset_out);
}

#[test]
fn threshold_on_loss_is_of_order_point_four() {
    let (code, out, _) = run_capture(&[
        "threshold",
        "--preset",
        "fig5",
        "--param",
        "eta1",
        "--lo",
        "0.1",
        "--hi",
        "0.9",
    ]);
    assert_eq!(code, EXIT_OK);
    let value: f64 = out.trim().strip_prefix("eta1 = ").unwrap().parse().unwrap();
    assert!((0.3..=0.5).contains(&value), "{value}");
}

#[test]
fn threshold_without_sign_change_fails() {
    let (code, _, err) = run_capture(&[
        "threshold",
        "--preset",
        "fig5",
        "--param",
        "eta1",
        "--lo",
        "0.7",
        "--hi",
        "0.9",
    ]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(err.contains("bracket"), "{err}");
}

#[test]
fn sweep_writes_csv_and_sidecar_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let args = [
        "sweep",
        "--preset",
        "fig2",
        "--set",
        "axis1=y linear 0 1 5",
        "--out",
        out.to_str().unwrap(),
    ];
    let (code, stdout, _) = run_capture(&args);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.is_empty());
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "y,E_N[N_in=0],E_N[N_in=1],E_N[N_in=10]"
    );
    assert_eq!(csv.lines().count(), 6);
    assert!(!csv.contains('\r'));
    assert_eq!(
        fs::read_to_string(dir.path().join("fig2.csv.log")).unwrap(),
        ""
    );
}

#[test]
fn truncation_warnings_go_to_the_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hot.cfg");
    fs::write(
        &cfg,
        "engine = fock\nN_th = 10\ntruncation_override = true\naxis1 = N_D values 100\n",
    )
    .unwrap();
    let out = dir.path().join("hot.csv");
    let (code, _, _) = run_capture(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let csv = fs::read_to_string(&out).unwrap();
    assert!(!csv.contains("truncated"));
    let log = fs::read_to_string(dir.path().join("hot.csv.log")).unwrap();
    assert!(log.contains("thermal state truncated"), "{log}");
}

#[test]
fn fock_guard_is_a_domain_failure() {
    let (code, _, err) = run_capture(&[
        "sweep",
        "--preset",
        "fig2",
        "--set",
        "engine=fock",
        "--set",
        "axis1=y values 0.5",
    ]);
    assert_eq!(code, EXIT_FAILURE);
    assert!(err.contains("truncation"), "{err}");
}

#[test]
fn single_point_ideal_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ideal.cfg");
    let mut text = ProtocolConfig::ideal(0.5).to_kv_string();
    text.push_str("axis1 = r values 0.5\n");
    fs::write(&cfg, text).unwrap();
    let (code, out, _) = run_capture(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "r,E_N\n0.5,1\n");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["sweep", "--preset", "fig2", "--nope"],
        vec!["sweep"],
        vec!["sweep", "--preset", "fig9"],
        vec!["sweep", "--preset", "fig2", "--set", "nonsense=1"],
        vec!["sweep", "--preset", "fig2", "--set", "eta1"],
        vec!["sweep", "--preset", "fig2", "--parallel", "0"],
        vec!["sweep", "--config", "/nonexistent/file.cfg"],
        vec!["threshold", "--param", "zeta", "--lo", "0", "--hi", "1"],
        vec!["feasibility"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = run_capture(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn domain_errors_exit_one() {
    let (code, _, err) = run_capture(&[
        "threshold",
        "--set",
        "eta2=1.5",
        "--param",
        "eta1",
        "--lo",
        "0",
        "--hi",
        "1",
    ]);
    assert_eq!(code, EXIT_FAILURE, "{err}");
}

#[test]
fn selftest_passes() {
    let (code, out, _) = run_capture(&["selftest"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().count() >= 7);
    assert!(out.lines().all(|l| l.starts_with("PASS ")), "{out}");
}

/// Distinct valid values for the preset, config-file and `--set` layers.
fn layer_values(p: Parameter) -> (f64, f64) {
    match p {
        Parameter::R => (0.45, 0.4),
        Parameter::DisplacementPhotons => (4000.0, 3000.0),
        Parameter::Y => (0.12, 0.14),
        Parameter::X => (0.012, 0.008),
        Parameter::NIn => (1.2, 0.8),
        Parameter::NTh => (9.0, 8.0),
        Parameter::Sigma => (0.012, 0.008),
        Parameter::Eta1 | Parameter::Eta2 | Parameter::EtaC => (0.75, 0.7),
    }
}

#[test]
fn overrides_follow_set_then_config_then_preset() {
    let base = preset_base("fig4").unwrap();
    let dir = tempfile::tempdir().unwrap();
    for p in Parameter::ALL {
        // Pin the swept and series parameters to their preset values on
        // parameters other than the one under test.
        let mut others = [Parameter::EtaC, Parameter::Eta2, Parameter::Eta1]
            .into_iter()
            .filter(|&q| q != p);
        let (a, s) = (others.next().unwrap(), others.next().unwrap());
        let (from_config, from_set) = layer_values(p);
        let cfg = dir.path().join(format!("{p}.cfg"));
        fs::write(
            &cfg,
            format!(
                "{p} = {from_config}\naxis1 = {a} values {}\nseries = {s} {}\n",
                base.get(a),
                base.get(s)
            ),
        )
        .unwrap();
        let cfg = cfg.to_str().unwrap();

        let (code, preset_only, err) = run_capture(&[
            "sweep",
            "--preset",
            "fig4",
            "--set",
            &format!("axis1={a} values {}", base.get(a)),
            "--set",
            &format!("series={s} {}", base.get(s)),
        ]);
        assert_eq!(code, EXIT_OK, "{err}");
        assert_eq!(
            csv_value(&preset_only),
            e_n_text(&base),
            "{p}: preset layer"
        );

        let (_, with_config, _) = run_capture(&["sweep", "--preset", "fig4", "--config", cfg]);
        assert_eq!(
            csv_value(&with_config),
            e_n_text(&base.with(p, from_config)),
            "{p}: config layer"
        );
        assert_ne!(
            csv_value(&with_config),
            csv_value(&preset_only),
            "{p}: config layer has no effect"
        );

        let set = format!("{p}={from_set}");
        let (_, with_set, _) =
            run_capture(&["sweep", "--preset", "fig4", "--config", cfg, "--set", &set]);
        assert_eq!(
            csv_value(&with_set),
            e_n_text(&base.with(p, from_set)),
            "{p}: set layer"
        );
        assert_ne!(
            csv_value(&with_set),
            csv_value(&with_config),
            "{p}: set layer has no effect"
        );
    }
}

#[test]
fn convention_override_precedence() {
    let base = preset_base("fig4").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("conv.cfg");
    fs::write(
        &cfg,
        "phase_noise_convention = paper_literal\naxis1 = eta1 values 0.8\nseries = eta2 0.8\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let literal = ProtocolConfig {
        phase_noise_convention: PhaseNoiseConvention::PaperLiteral,
        ..base
    };
    let (_, out, _) = run_capture(&["sweep", "--preset", "fig4", "--config", cfg]);
    assert_eq!(csv_value(&out), e_n_text(&literal));
    let (_, out, _) = run_capture(&[
        "sweep",
        "--preset",
        "fig4",
        "--config",
        cfg,
        "--set",
        "phase_noise_convention=propagated_mean",
    ]);
    assert_eq!(csv_value(&out), e_n_text(&base));
}

#[test]
fn two_dimensional_sweep_is_thread_count_independent() {
    let args = |workers: &'static str| {
        [
            "sweep",
            "--preset",
            "fig4",
            "--set",
            "axis1=x linear 0 0.04 9",
            "--set",
            "axis2=sigma values 0,0.02",
            "--parallel",
            workers,
        ]
    };
    let (code, one, _) = run_capture(&args("1"));
    assert_eq!(code, EXIT_OK);
    assert_eq!(one.lines().count(), 1 + 9 * 2);
    assert!(one.starts_with("sigma,x,"));
    for workers in ["2", "3", "8"] {
        assert_eq!(run_capture(&args(workers)).1, one, "{workers} workers");
    }
}
