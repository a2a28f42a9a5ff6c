//! Deterministic invariant checks that can run on any installation.

use nalgebra::Complex;

use crate::error::Result;
use crate::fock;
use crate::gaussian::{self, Mode};
use crate::protocol::{
    run_fock_protocol, run_gaussian_protocol, Engine, Parameter, ProtocolConfig,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check {
            name,
            passed,
            detail,
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Deterministic pseudo-random points in the unit square (Halton bases 2, 3).
fn halton(i: usize, base: usize) -> f64 {
    let (mut f, mut r, mut i) = (1.0, 0.0, i + 1);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn ideal_entanglement() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for r in [0.1, 0.5, 1.0] {
        let e = run_gaussian_protocol(&ProtocolConfig::ideal(r))?.e_n;
        worst = worst.max((e - 2.0 * r).abs());
    }
    Ok((worst < 1e-10, format!("max |E_N - 2r| = {worst:.2e}")))
}

fn closure() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let x = halton(i, 2);
        let y = 0.01 + 0.98 * halton(i, 3);
        let c = gaussian::channel_coefficients(x, y)?;
        worst = worst.max((c.closure() - 1.0).abs());
    }
    Ok((
        worst < 1e-12,
        format!("max closure defect = {worst:.2e} over 1000 points"),
    ))
}

fn displacement_neutrality() -> Result<(bool, String)> {
    let base = ProtocolConfig::default().with(Parameter::Sigma, 0.0);
    let reference = run_gaussian_protocol(&base.with(Parameter::DisplacementPhotons, 0.0))?.e_n;
    let same = [5000.0, 1e8].iter().all(|&n| {
        run_gaussian_protocol(&base.with(Parameter::DisplacementPhotons, n))
            .map(|o| o.e_n == reference)
            .unwrap_or(false)
    });
    Ok((
        same,
        format!("E_N = {reference} for N_D in {{0, 5000, 1e8}}"),
    ))
}

fn channel_physicality() -> Result<(bool, String)> {
    let state = gaussian::tmsv_state(0.5)?;
    let mut ok = true;
    for i in 0..50 {
        let c = gaussian::channel_coefficients(halton(i, 2), 0.01 + 0.98 * halton(i, 3))?;
        let out = gaussian::storage_retrieval_channel(
            &state,
            Mode::A,
            &c,
            2.0 * halton(i, 5),
            10.0 * halton(i, 7),
        )?;
        ok &= gaussian::physicality_check(&out)?.is_physical;
    }
    Ok((ok, "50 channel outputs checked".into()))
}

fn cross_engine() -> Result<(bool, String)> {
    let (x, y, n_in, n_th, r) = (0.05, 0.4, 0.3, 0.2, 0.3);
    let coeffs = gaussian::channel_coefficients(x, y)?;
    let g = gaussian::storage_retrieval_channel(
        &gaussian::tmsv_state(r)?,
        Mode::A,
        &coeffs,
        n_in,
        n_th,
    )?;
    let rho = fock::tmsv_state(r, fock::DEFAULT_DIMS)?;
    let out = fock::linear_channel_apply(&rho, Mode::A, &coeffs, n_in, n_th, fock::DEFAULT_DIMS)?;
    let m = fock::gaussian_moments(&out.rho)?;
    let err = (m.cov - g.cov).amax().max((m.mean - g.mean).amax());
    Ok((err < 1e-4, format!("max moment mismatch = {err:.2e}")))
}

fn displacement_unitarity() -> Result<(bool, String)> {
    let alpha = Complex::new(0.7, -0.3);
    let d = fock::displacement_matrix(alpha, 40);
    let back = fock::displacement_matrix(-alpha, 40);
    let prod = &back * &d;
    // Only the low block is free of truncation effects.
    let err = (0..10)
        .flat_map(|r| (0..10).map(move |c| (r, c)))
        .map(|(r, c)| {
            (prod[(r, c)]
                - if r == c {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                })
            .norm()
        })
        .fold(0.0, f64::max);
    Ok((
        err < 1e-10,
        format!("max |D(-a)D(a) - 1| on 10 levels = {err:.2e}"),
    ))
}

fn fock_ideal_concurrence() -> Result<(bool, String)> {
    let cfg = ProtocolConfig {
        engine: Engine::Fock,
        ..ProtocolConfig::ideal(0.5)
    };
    let c = run_fock_protocol(&cfg)?.concurrence;
    Ok(((c - 1.0).abs() < 1e-6, format!("concurrence = {c}")))
}

/// Run every check; the suite passes when all of them do.
pub fn run_selftest() -> Vec<Check> {
    vec![
        check("ideal pipeline E_N = 2r", ideal_entanglement()),
        check("channel coefficient closure", closure()),
        check("displacement neutrality", displacement_neutrality()),
        check("channel output physicality", channel_physicality()),
        check("Gaussian/Fock moment agreement", cross_engine()),
        check("displacement operator inverse", displacement_unitarity()),
        check("ideal single-photon concurrence", fock_ideal_concurrence()),
    ]
}
