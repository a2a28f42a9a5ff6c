use std::f64::consts::{FRAC_PI_2, PI};

use super::operators::{beam_splitter_block, displacement_matrix, LocalOperator};
use super::quadrature::gauss_hermite;
use super::{FockDensityMatrix, C64};
use crate::error::{domain, ensure_finite, Error, Result};
use crate::gaussian::{ChannelCoefficients, Mode};

/// Tolerated probability lost to the cutoff before a warning is emitted.
pub const DEFAULT_LEAKAGE_BUDGET: f64 = 1e-6;

const CLOSURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalTruncation {
    /// Rescale the kept populations to unit trace.
    #[default]
    Renormalize,
    /// Keep the bare Bose–Einstein weights; the trace falls short by the leakage.
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    pub rho: FockDensityMatrix,
    /// Bose–Einstein weight above the cutoff.
    pub leakage: f64,
}

impl ThermalState {
    pub fn populations(&self) -> Vec<f64> {
        self.rho.populations(0)
    }

    pub fn warning(&self, budget: f64) -> Option<String> {
        (self.leakage > budget).then(|| {
            format!(
                "thermal state truncated at {} levels loses {:.3e} of its weight",
                self.rho.dims()[0],
                self.leakage
            )
        })
    }
}

pub fn thermal_state(
    mean_occupation: f64,
    n_levels: usize,
    truncation: ThermalTruncation,
) -> Result<ThermalState> {
    ensure_finite("mean occupation", mean_occupation)?;
    if mean_occupation < 0.0 {
        return domain(format!(
            "mean occupation must be >= 0, got {mean_occupation}"
        ));
    }
    if n_levels == 0 {
        return domain("thermal state needs at least one level");
    }
    let ratio = mean_occupation / (mean_occupation + 1.0);
    let mut weights: Vec<f64> = (0..n_levels)
        .map(|n| ratio.powi(n as i32) / (mean_occupation + 1.0))
        .collect();
    let leakage = ratio.powi(n_levels as i32);
    if truncation == ThermalTruncation::Renormalize {
        let kept: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= kept);
    }
    let state = ThermalState {
        rho: FockDensityMatrix::from_populations(vec![n_levels], &weights)?,
        leakage,
    };
    if let Some(w) = state.warning(DEFAULT_LEAKAGE_BUDGET) {
        log::warn!("{w}");
    }
    Ok(state)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Photon loss with transmission `eta` as a Kraus sum; the `k`-th operator
/// removes `k` photons with amplitude `sqrt(C(n,k) η^{n-k} (1-η)^k)`.
pub fn pure_loss_channel(
    rho: &FockDensityMatrix,
    mode: Mode,
    eta: f64,
) -> Result<FockDensityMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return domain(format!("transmission must lie in [0, 1], got {eta}"));
    }
    let idx = rho.mode_index(mode)?;
    if eta == 1.0 {
        return Ok(rho.clone());
    }
    let d = rho.dims()[idx];
    let kraus: Vec<LocalOperator> = (0..d)
        .map(|k| {
            let entries = (k..d)
                .map(|n| {
                    let amp =
                        (binomial(n, k) * eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32))
                            .sqrt();
                    (n - k, n, C64::new(amp, 0.0))
                })
                .filter(|e| e.2.re != 0.0)
                .collect();
            LocalOperator::new(d, entries)
        })
        .collect();
    Ok(rho.apply_local_kraus(idx, &kraus))
}

/// Mixing angles and phases of the three beam splitters that realise the
/// storage-and-retrieval map as a dilation: the signal mode meets the
/// initial mechanical mode, then the optical noise mode, then the
/// mechanical bath mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationAngles {
    pub theta: [f64; 3],
    pub phi: [f64; 3],
}

impl DilationAngles {
    /// In the Heisenberg picture each splitter maps
    /// `a → cos θ a - e^{-iφ} sin θ b`, so the cascade yields
    /// `a → -c1 a - i c2 B_in + f1 δA + f2 δB`.
    pub fn from_coefficients(c: &ChannelCoefficients) -> Self {
        let kept = (c.c1 * c.c1 + c.c2_mag * c.c2_mag).sqrt();
        let before_bath = (kept * kept + c.f1 * c.f1).sqrt();
        DilationAngles {
            theta: [
                c.c2_mag.atan2(-c.c1),
                c.f1.atan2(kept),
                c.f2.atan2(before_bath),
            ],
            phi: [-FRAC_PI_2, PI, PI],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub rho: FockDensityMatrix,
    /// Trace lost to the signal-mode cutoff.
    pub trace_loss: f64,
    /// Largest Bose–Einstein tail dropped from an environment mode.
    pub thermal_leakage: f64,
    pub warnings: Vec<String>,
}

/// Beam splitter between `mode_index` and an environment mode prepared in a
/// Fock-diagonal state, environment traced out.
fn environment_beam_splitter(
    rho: &FockDensityMatrix,
    mode_index: usize,
    theta: f64,
    phi: f64,
    env_populations: &[f64],
) -> FockDensityMatrix {
    let d = rho.dims()[mode_index];
    let k_max = env_populations.len().saturating_sub(1);
    let blocks: Vec<_> = (0..d + k_max)
        .map(|total| beam_splitter_block(theta, phi, total))
        .collect();
    let mut kraus = Vec::new();
    for (k, &p) in env_populations.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let scale = p.sqrt();
        for m in 0..(d + k) {
            let entries: Vec<_> = (0..d)
                .filter_map(|n| {
                    let total = n + k;
                    if m > total || total - m >= d {
                        return None;
                    }
                    let amp = blocks[total][(total - m, n)] * scale;
                    (amp.norm_sqr() > 0.0).then_some((total - m, n, amp))
                })
                .collect();
            if !entries.is_empty() {
                kraus.push(LocalOperator::new(d, entries));
            }
        }
    }
    rho.apply_local_kraus(mode_index, &kraus)
}

/// Storage and retrieval on `mode` with the mechanical oscillator starting
/// thermal at `n_in` and a bath at `n_th`; environment modes are truncated
/// at `env_levels`.
pub fn linear_channel_apply(
    rho: &FockDensityMatrix,
    mode: Mode,
    coeffs: &ChannelCoefficients,
    n_in: f64,
    n_th: f64,
    env_levels: usize,
) -> Result<ChannelOutput> {
    let closure = coeffs.closure();
    if (closure - 1.0).abs() > CLOSURE_TOLERANCE {
        return Err(Error::Numerical(format!(
            "channel coefficients violate closure: sum of squares = {closure}"
        )));
    }
    let idx = rho.mode_index(mode)?;
    let mechanical = thermal_state(n_in, env_levels, ThermalTruncation::Renormalize)?;
    let bath = thermal_state(n_th, env_levels, ThermalTruncation::Renormalize)?;
    let mut warnings: Vec<String> = [&mechanical, &bath]
        .iter()
        .filter_map(|t| t.warning(DEFAULT_LEAKAGE_BUDGET))
        .collect();

    let angles = DilationAngles::from_coefficients(coeffs);
    let before = rho.trace();
    let vacuum = [1.0];
    let mut out = environment_beam_splitter(
        rho,
        idx,
        angles.theta[0],
        angles.phi[0],
        &mechanical.populations(),
    );
    out = environment_beam_splitter(&out, idx, angles.theta[1], angles.phi[1], &vacuum);
    out = environment_beam_splitter(
        &out,
        idx,
        angles.theta[2],
        angles.phi[2],
        &bath.populations(),
    );

    let trace_loss = before - out.trace();
    if trace_loss > DEFAULT_LEAKAGE_BUDGET {
        warnings.push(format!(
            "storage channel pushed {trace_loss:.3e} of the trace above the cutoff"
        ));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(ChannelOutput {
        rho: out,
        trace_loss,
        thermal_leakage: mechanical.leakage.max(bath.leakage),
        warnings,
    })
}

/// Average of `D(iΔp/√2) ρ D(iΔp/√2)†` on `mode` over a normally
/// distributed momentum kick `Δp` of the given variance.
///
/// Every displacement matrix element is `e^{-s²/2}` times a polynomial in
/// the kick amplitude `s = Δp/√2`, so each term of the average is a
/// polynomial against the Gaussian `e^{-s²/v} e^{-s²}`. The rule is built
/// for that combined weight, which keeps it accurate for any variance and
/// exact once `n_nodes` reaches twice the cutoff. A rule against the bare
/// kick distribution would place nearly all nodes far outside the basis
/// when the variance is large.
pub fn phase_noise_average(
    rho: &FockDensityMatrix,
    mode: Mode,
    variance: f64,
    n_nodes: usize,
) -> Result<FockDensityMatrix> {
    ensure_finite("variance", variance)?;
    if variance < 0.0 {
        return domain(format!("momentum variance must be >= 0, got {variance}"));
    }
    if n_nodes < 3 || n_nodes.is_multiple_of(2) {
        return domain(format!(
            "quadrature node count must be odd and >= 3, got {n_nodes}"
        ));
    }
    let idx = rho.mode_index(mode)?;
    if variance == 0.0 {
        return Ok(rho.clone());
    }
    let d = rho.dims()[idx];
    let rule = gauss_hermite(n_nodes)?;
    // Std of s under the combined weight, and that weight's total mass.
    let std = (variance / (2.0 * (1.0 + variance))).sqrt();
    let mass = 1.0 / (1.0 + variance).sqrt();
    let kraus: Vec<LocalOperator> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            let s = std * t;
            let scale = (w * mass).sqrt() * (0.5 * s * s).exp();
            LocalOperator::from_dense(
                &(displacement_matrix(C64::new(0.0, s), d) * C64::new(scale, 0.0)),
            )
        })
        .collect();
    Ok(rho.apply_local_kraus(idx, &kraus))
}
