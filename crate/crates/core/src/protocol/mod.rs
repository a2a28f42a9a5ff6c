//! The full entangle, displace, store, retrieve and undisplace pipeline on
//! either engine, plus threshold search and the hardware feasibility
//! calculator.

mod config;
mod feasibility;
mod threshold;

pub use config::{
    parse_kv, Engine, Parameter, PhaseNoiseConvention, ProtocolConfig, Undisplacement,
    FOCK_MAX_N_TH,
};
pub use feasibility::{
    feasibility, nanobeam, trampoline, FeasibilityInput, FeasibilityReport, RegimeThresholds,
    BOLTZMANN, HBAR,
};
pub use threshold::{find_threshold, metric, ZERO_THRESHOLD};

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::fock::{self, FockDensityMatrix, C64};
use crate::gaussian::{self, GaussianTwoModeState, Mode};

/// Maximum change in concurrence between two quadrature orders before the
/// phase-noise average is reported as unconverged.
pub const QUADRATURE_CONVERGENCE: f64 = 1e-6;

/// Extra nodes used for the convergence check of the phase-noise average.
pub const QUADRATURE_CHECK_EXTRA_NODES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianOutcome {
    pub e_n: f64,
    pub nu_min: f64,
    pub output_state: GaussianTwoModeState,
    /// Magnitude of the mode-A mean amplitude left after undisplacement.
    pub mean_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOutcome {
    pub concurrence: f64,
    pub projection_probability: f64,
    /// Trace lost to basis cutoffs along the pipeline.
    pub leakage: f64,
    /// Largest Bose–Einstein tail dropped from a thermal environment mode.
    pub thermal_leakage: f64,
    pub warnings: Vec<String>,
}

/// Squared mean amplitude of the retrieved mode that multiplies `σ²` in the
/// phase-noise term, before any loss after the memory.
fn phase_noise_amplitude_sq(config: &ProtocolConfig, c1: f64) -> f64 {
    match config.phase_noise_convention {
        PhaseNoiseConvention::PaperLiteral => config.n_d * (1.0 - config.y * config.y).powi(2),
        PhaseNoiseConvention::PropagatedMean => config.n_d * config.eta1 * c1 * c1,
    }
}

/// Covariance-matrix pipeline with a displaced two-mode squeezed input.
pub fn run_gaussian_protocol(config: &ProtocolConfig) -> Result<GaussianOutcome> {
    config.validate()?;
    if config.engine != Engine::Gaussian {
        return Err(Error::Domain(
            "run_gaussian_protocol needs engine = gaussian".into(),
        ));
    }
    let coeffs = gaussian::channel_coefficients(config.x, config.y)?;
    let alpha = Complex::new(config.n_d.sqrt(), 0.0);

    let mut state = gaussian::tmsv_state(config.r)?;
    state = gaussian::displace(&state, Mode::A, alpha)?;
    state = gaussian::loss_channel(&state, Mode::A, config.eta1)?;
    state =
        gaussian::storage_retrieval_channel(&state, Mode::A, &coeffs, config.n_in, config.n_th)?;
    let amp_sq = match config.phase_noise_convention {
        PhaseNoiseConvention::PropagatedMean => state.mean_photon_amplitude_sq(Mode::A),
        PhaseNoiseConvention::PaperLiteral => phase_noise_amplitude_sq(config, coeffs.c1),
    };
    state = gaussian::phase_noise(&state, Mode::A, config.sigma, amp_sq)?;
    state = gaussian::loss_channel(&state, Mode::A, config.eta2)?;
    let back = match config.undisplacement {
        Undisplacement::Propagated => -state.mean_amplitude(Mode::A),
        Undisplacement::PaperLiteral => alpha * (1.0 - config.y * config.y),
    };
    state = gaussian::displace(&state, Mode::A, back)?;
    if config.undisplacement == Undisplacement::Propagated {
        // Cancel the rounding left by the floating-point subtraction.
        state.mean[0] = 0.0;
        state.mean[1] = 0.0;
    }
    let mean_residual = state.mean_amplitude(Mode::A).norm();
    state = gaussian::loss_channel(&state, Mode::C, config.eta_c)?;

    let ln = gaussian::log_negativity(&state)?;
    Ok(GaussianOutcome {
        e_n: ln.e_n,
        nu_min: ln.nu_min,
        output_state: state,
        mean_residual,
    })
}

/// Output of the Fock pipeline before qubit projection.
pub(crate) struct FockRun {
    pub rho: FockDensityMatrix,
    pub leakage: f64,
    pub thermal_leakage: f64,
    pub warnings: Vec<String>,
}

/// Displaced-frame single-photon pipeline up to the final density matrix.
///
/// The macroscopic displacement cancels against the undisplacement, so the
/// input is the undisplaced entangled state and `N_D` only enters through
/// the phase-noise variance.
pub(crate) fn fock_pipeline(config: &ProtocolConfig, nodes: usize) -> Result<FockRun> {
    let dims = config.fock_dims;
    let coeffs = gaussian::channel_coefficients(config.x, config.y)?;
    let mut rho = fock::single_photon_entangled_input(C64::new(0.0, 0.0), dims)?;
    let start = rho.trace();
    rho = fock::pure_loss_channel(&rho, Mode::A, config.eta1)?;
    let channel =
        fock::linear_channel_apply(&rho, Mode::A, &coeffs, config.n_in, config.n_th, dims)?;
    rho = channel.rho;
    let variance = 2.0 * phase_noise_amplitude_sq(config, coeffs.c1) * config.sigma * config.sigma;
    rho = fock::phase_noise_average(&rho, Mode::A, variance, nodes)?;
    rho = fock::pure_loss_channel(&rho, Mode::A, config.eta2)?;
    rho = fock::pure_loss_channel(&rho, Mode::C, config.eta_c)?;
    let leakage = start - rho.trace();
    let mut warnings = channel.warnings;
    if leakage > fock::DEFAULT_LEAKAGE_BUDGET {
        warnings.push(format!(
            "{leakage:.3e} of the trace left the {dims}-level basis"
        ));
    }
    Ok(FockRun {
        rho,
        leakage,
        thermal_leakage: channel.thermal_leakage,
        warnings,
    })
}

fn fock_concurrence(run: &FockRun) -> Result<(f64, f64)> {
    let q = fock::qubit_project(&run.rho)?;
    Ok((fock::concurrence(&q)?, q.projection_probability))
}

/// Truncated-Fock pipeline with a single-photon entangled input, reporting
/// the concurrence of the state projected onto `{|0⟩, |1⟩}` per mode.
///
/// The phase-noise average is repeated with more quadrature nodes and a
/// warning is attached when the two results disagree.
pub fn run_fock_protocol(config: &ProtocolConfig) -> Result<FockOutcome> {
    config.validate()?;
    if config.engine != Engine::Fock {
        return Err(Error::Domain(
            "run_fock_protocol needs engine = fock".into(),
        ));
    }
    let run = fock_pipeline(config, config.quadrature_nodes)?;
    let (concurrence, projection_probability) = fock_concurrence(&run)?;
    let mut warnings = run.warnings.clone();
    if config.sigma > 0.0 && config.n_d > 0.0 {
        let finer = fock_pipeline(
            config,
            config.quadrature_nodes + QUADRATURE_CHECK_EXTRA_NODES,
        )?;
        let (c_fine, _) = fock_concurrence(&finer)?;
        let delta = (c_fine - concurrence).abs();
        if delta > QUADRATURE_CONVERGENCE {
            let msg = format!(
                "phase-noise quadrature unconverged: concurrence moved by {delta:.3e} between {} and {} nodes",
                config.quadrature_nodes,
                config.quadrature_nodes + QUADRATURE_CHECK_EXTRA_NODES
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    Ok(FockOutcome {
        concurrence,
        projection_probability,
        leakage: run.leakage,
        thermal_leakage: run.thermal_leakage,
        warnings,
    })
}
