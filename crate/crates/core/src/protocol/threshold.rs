use super::{fock_pipeline, run_gaussian_protocol, Engine, Parameter, ProtocolConfig};
use crate::error::{Error, Result};
use crate::fock;

/// Metric values below this count as exactly zero entanglement.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Entanglement figure of merit for a configuration: `E_N` on the Gaussian
/// engine, concurrence on the Fock engine (without the quadrature
/// convergence re-run).
pub fn metric(config: &ProtocolConfig) -> Result<f64> {
    match config.engine {
        Engine::Gaussian => Ok(run_gaussian_protocol(config)?.e_n),
        Engine::Fock => {
            config.validate()?;
            let run = fock_pipeline(config, config.quadrature_nodes)?;
            let q = fock::qubit_project(&run.rho)?;
            fock::concurrence(&q)
        }
    }
}

fn is_zero(v: f64) -> bool {
    v < ZERO_THRESHOLD
}

/// Bisect `param` over `[lo, hi]` for the boundary between zero and
/// positive entanglement, to an interval width below `tol`.
///
/// The ends must straddle the boundary. The returned value is the end of
/// the final interval on the zero side, so the metric vanishes there.
pub fn find_threshold(
    config: &ProtocolConfig,
    param: Parameter,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!(
            "bracket [{lo}, {hi}] is not an increasing finite interval"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let eval = |v: f64| metric(&config.with(param, v));
    let (m_lo, m_hi) = (eval(lo)?, eval(hi)?);
    if is_zero(m_lo) == is_zero(m_hi) {
        let side = if is_zero(m_lo) { "zero" } else { "positive" };
        return Err(Error::Bracket(format!(
            "{param} in [{lo}, {hi}]: entanglement is {side} at both ends ({m_lo:e}, {m_hi:e})"
        )));
    }
    let (mut zero_side, mut positive_side) = if is_zero(m_lo) { (lo, hi) } else { (hi, lo) };
    while (zero_side - positive_side).abs() >= tol {
        let mid = 0.5 * (zero_side + positive_side);
        if is_zero(eval(mid)?) {
            zero_side = mid;
        } else {
            positive_side = mid;
        }
    }
    Ok(zero_side)
}
