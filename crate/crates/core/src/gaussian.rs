//! Two-mode Gaussian states described by first and second moments.
//!
//! Quadratures are ordered `(X_A, P_A, X_C, P_C)` with `X = (a + a†)/√2`,
//! `P = -i(a - a†)/√2`, so the vacuum has variance 1/2 in every quadrature.
//! Mode `A` is the one that is displaced and stored in the mechanical
//! oscillator; mode `C` stays on the optical side.

use nalgebra::{Complex, Matrix2, Matrix4, Vector4};

use crate::error::{domain, ensure_finite, Error, Result};

/// Vacuum quadrature variance.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Magnitude below which negative radicands and eigenvalues are treated as
/// round-off and clamped to zero.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

const SYMMETRY_TOLERANCE: f64 = 1e-12;
const PHYSICALITY_TOLERANCE: f64 = 1e-9;
const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// One of the two optical modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    C,
}

impl Mode {
    fn offset(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::C => 2,
        }
    }

    pub fn other(self) -> Mode {
        match self {
            Mode::A => Mode::C,
            Mode::C => Mode::A,
        }
    }
}

pub(crate) fn clamp_small_negative(what: &str, v: f64) -> Option<f64> {
    if v >= 0.0 {
        Some(v)
    } else if v > -CLAMP_TOLERANCE {
        log::debug!("clamping {what} = {v:e} to zero");
        Some(0.0)
    } else {
        None
    }
}

/// Mean vector and covariance matrix of a two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTwoModeState {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
}

impl GaussianTwoModeState {
    pub fn vacuum() -> Self {
        Self {
            mean: Vector4::zeros(),
            cov: Matrix4::identity() * VACUUM_VARIANCE,
        }
    }

    /// Build a state from raw moments, rejecting non-symmetric covariances.
    pub fn from_moments(mean: Vector4<f64>, cov: Matrix4<f64>) -> Result<Self> {
        let state = Self { mean, cov };
        state.check_symmetric()?;
        Ok(state)
    }

    fn check_symmetric(&self) -> Result<()> {
        let asym = (self.cov - self.cov.transpose()).amax();
        if asym > SYMMETRY_TOLERANCE || !self.cov.iter().all(|v| v.is_finite()) {
            return Err(Error::Structural(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        Ok(())
    }

    /// 2×2 covariance block of one mode.
    pub fn block(&self, mode: Mode) -> Matrix2<f64> {
        let o = mode.offset();
        self.cov.fixed_view::<2, 2>(o, o).into_owned()
    }

    /// 2×2 correlation block between modes A (rows) and C (columns).
    pub fn cross_block(&self) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Complex mean amplitude `⟨a⟩` of a mode.
    pub fn mean_amplitude(&self, mode: Mode) -> Complex<f64> {
        let o = mode.offset();
        Complex::new(self.mean[o], self.mean[o + 1]) / std::f64::consts::SQRT_2
    }

    /// `|⟨a⟩|²` for a mode.
    pub fn mean_photon_amplitude_sq(&self, mode: Mode) -> f64 {
        self.mean_amplitude(mode).norm_sqr()
    }
}

/// Two-mode squeezed vacuum with squeezing strength `r`.
pub fn tmsv_state(r: f64) -> Result<GaussianTwoModeState> {
    ensure_finite("r", r)?;
    if r < 0.0 {
        return domain(format!("squeezing r must be >= 0, got {r}"));
    }
    let (s, c) = (r.sinh(), r.cosh());
    let diag = s * s + VACUUM_VARIANCE;
    let corr = s * c;
    let mut cov = Matrix4::from_diagonal_element(diag);
    cov[(0, 2)] = corr;
    cov[(2, 0)] = corr;
    cov[(1, 3)] = -corr;
    cov[(3, 1)] = -corr;
    Ok(GaussianTwoModeState {
        mean: Vector4::zeros(),
        cov,
    })
}

/// Phase-space displacement `D(alpha)` on one mode. Only the mean moves.
pub fn displace(
    state: &GaussianTwoModeState,
    mode: Mode,
    alpha: Complex<f64>,
) -> Result<GaussianTwoModeState> {
    ensure_finite("Re alpha", alpha.re)?;
    ensure_finite("Im alpha", alpha.im)?;
    let mut out = *state;
    let o = mode.offset();
    out.mean[o] += std::f64::consts::SQRT_2 * alpha.re;
    out.mean[o + 1] += std::f64::consts::SQRT_2 * alpha.im;
    Ok(out)
}

/// Photon-number variance `(2n+1)|α|²` of the displaced Fock state `D(α)|n⟩`.
pub fn component_variance(n: u64, displacement_photons: f64) -> f64 {
    (2 * n + 1) as f64 * displacement_photons
}

/// Beam splitter with transmission `eta` against vacuum on one mode.
pub fn loss_channel(
    state: &GaussianTwoModeState,
    mode: Mode,
    eta: f64,
) -> Result<GaussianTwoModeState> {
    if !(0.0..=1.0).contains(&eta) {
        return domain(format!("transmission must lie in [0, 1], got {eta}"));
    }
    let t = eta.sqrt();
    let mut scale = Matrix4::identity();
    let o = mode.offset();
    scale[(o, o)] = t;
    scale[(o + 1, o + 1)] = t;
    let mut cov = scale * state.cov * scale;
    cov[(o, o)] += (1.0 - eta) * VACUUM_VARIANCE;
    cov[(o + 1, o + 1)] += (1.0 - eta) * VACUUM_VARIANCE;
    Ok(GaussianTwoModeState {
        mean: scale * state.mean,
        cov,
    })
}

/// Coefficients of the damped storage-and-retrieval map
///
/// `A_out = -c1 A_in - i c2 B_in + f1 δA + f2 δB`
///
/// where `B_in` is the initial mechanical mode, `δA` optical vacuum noise and
/// `δB` thermal mechanical noise. `x = γ/G` and `y = e^{-G'τ}` with
/// `G' = G + γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelCoefficients {
    pub x: f64,
    pub y: f64,
    pub c1: f64,
    pub c2_mag: f64,
    pub f1: f64,
    pub f2: f64,
}

impl ChannelCoefficients {
    /// `c1² + c2² + f1² + f2²`, equal to one for a bosonic output mode.
    pub fn closure(&self) -> f64 {
        self.c1 * self.c1 + self.c2_mag * self.c2_mag + self.f1 * self.f1 + self.f2 * self.f2
    }
}

/// Channel coefficients as closed-form functions of `(x, y)`.
///
/// `y = 1` is the no-coupling limit (light is reflected, the output is pure
/// vacuum noise) and `y = 0` is the instantaneous-transfer limit, both taken
/// exactly.
pub fn channel_coefficients(x: f64, y: f64) -> Result<ChannelCoefficients> {
    ensure_finite("x", x)?;
    ensure_finite("y", y)?;
    if x < 0.0 {
        return domain(format!("damping ratio x must be >= 0, got {x}"));
    }
    if !(0.0..=1.0).contains(&y) {
        return domain(format!("coupling parameter y must lie in [0, 1], got {y}"));
    }
    if y == 1.0 {
        return Ok(ChannelCoefficients {
            x,
            y,
            c1: 0.0,
            c2_mag: 0.0,
            f1: 1.0,
            f2: 0.0,
        });
    }
    let y2 = y * y;
    let one_minus = 1.0 - y2;
    let norm = 1.0 / (1.0 + x);
    // 4 x y G'τ / sqrt(2 cosh(2G'τ) - 2) with G'τ = -ln y; vanishes as y -> 0.
    let log_term = if y == 0.0 {
        0.0
    } else {
        4.0 * x * y2 * y.ln() / one_minus
    };
    let f1_rad = x * x + y2 - log_term;
    let f2_rad = x * (1.0 + y2) + x * one_minus * one_minus + log_term;
    let f1_rad = clamp_small_negative("f1 radicand", f1_rad)
        .ok_or_else(|| Error::Numerical(format!("negative f1 radicand {f1_rad:e}")))?;
    let f2_rad = clamp_small_negative("f2 radicand", f2_rad)
        .ok_or_else(|| Error::Numerical(format!("negative f2 radicand {f2_rad:e}")))?;
    Ok(ChannelCoefficients {
        x,
        y,
        c1: one_minus * norm,
        c2_mag: y * (one_minus * norm).sqrt(),
        f1: norm * f1_rad.sqrt(),
        f2: norm * f2_rad.sqrt(),
    })
}

/// Storage in and retrieval from the mechanical oscillator, acting on `mode`.
///
/// In quadratures: `X → -c1 X + c2 P_B + f1 δX_A + f2 δX_B` and
/// `P → -c1 P - c2 X_B + f1 δP_A + f2 δP_B`. The mechanical mode starts
/// thermal with occupation `n_in`, the bath has occupation `n_th`.
pub fn storage_retrieval_channel(
    state: &GaussianTwoModeState,
    mode: Mode,
    coeffs: &ChannelCoefficients,
    n_in: f64,
    n_th: f64,
) -> Result<GaussianTwoModeState> {
    ensure_finite("N_in", n_in)?;
    ensure_finite("N_th", n_th)?;
    if n_in < 0.0 || n_th < 0.0 {
        return domain(format!(
            "thermal occupations must be >= 0, got N_in={n_in}, N_th={n_th}"
        ));
    }
    let o = mode.offset();
    let mut transfer = Matrix4::identity();
    transfer[(o, o)] = -coeffs.c1;
    transfer[(o + 1, o + 1)] = -coeffs.c1;
    let mut cov = transfer * state.cov * transfer.transpose();
    let added = coeffs.c2_mag.powi(2) * (n_in + VACUUM_VARIANCE)
        + coeffs.f1.powi(2) * VACUUM_VARIANCE
        + coeffs.f2.powi(2) * (n_th + VACUUM_VARIANCE);
    cov[(o, o)] += added;
    cov[(o + 1, o + 1)] += added;
    Ok(GaussianTwoModeState {
        mean: transfer * state.mean,
        cov,
    })
}

/// Leading-order effect of a small random phase on a bright mode: extra
/// momentum variance `2 · amp_sq · σ²`.
pub fn phase_noise(
    state: &GaussianTwoModeState,
    mode: Mode,
    sigma: f64,
    amp_sq: f64,
) -> Result<GaussianTwoModeState> {
    ensure_finite("sigma", sigma)?;
    ensure_finite("amp_sq", amp_sq)?;
    if sigma < 0.0 || amp_sq < 0.0 {
        return domain(format!(
            "phase noise needs sigma >= 0 and amp_sq >= 0, got {sigma}, {amp_sq}"
        ));
    }
    let mut out = *state;
    let p = mode.offset() + 1;
    out.cov[(p, p)] += 2.0 * amp_sq * sigma * sigma;
    Ok(out)
}

/// Logarithmic negativity together with the smallest symplectic eigenvalue
/// of the partially transposed covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNegativity {
    pub e_n: f64,
    pub nu_min: f64,
}

fn symplectic_pair(sigma_sum: f64, det_v: f64) -> Result<(f64, f64)> {
    let disc = sigma_sum * sigma_sum - 4.0 * det_v;
    let disc = if disc < -DEGENERACY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "symplectic discriminant {disc:e} is negative"
        )));
    } else {
        disc.max(0.0)
    };
    let root = disc.sqrt();
    let lo = (sigma_sum - root) / 2.0;
    let lo = clamp_small_negative("squared symplectic eigenvalue", lo).ok_or_else(|| {
        Error::Numerical(format!("negative squared symplectic eigenvalue {lo:e}"))
    })?;
    Ok((lo.sqrt(), ((sigma_sum + root) / 2.0).sqrt()))
}

pub fn log_negativity(state: &GaussianTwoModeState) -> Result<LogNegativity> {
    state.check_symmetric()?;
    let det_a = state.block(Mode::A).determinant();
    let det_b = state.block(Mode::C).determinant();
    let det_c = state.cross_block().determinant();
    let sigma = det_a + det_b - 2.0 * det_c;
    let (nu_min, _) = symplectic_pair(sigma, state.cov.determinant())?;
    let e_n = if 2.0 * nu_min >= 1.0 {
        0.0
    } else {
        -(2.0 * nu_min).ln()
    };
    Ok(LogNegativity { e_n, nu_min })
}

/// Result of the uncertainty-relation check on a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub is_physical: bool,
    pub symplectic_eigenvalues: (f64, f64),
}

/// Symplectic eigenvalues from the symmetric matrix `(√V Ω √V)ᵀ(√V Ω √V)`,
/// whose spectrum is `ν₁², ν₁², ν₂², ν₂²`. Unlike the closed form this
/// stays accurate for pure states, where the two eigenvalues coincide.
/// `None` when `cov` is not positive definite.
fn symplectic_spectrum(cov: &Matrix4<f64>) -> Option<(f64, f64)> {
    let eig = cov.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&e| e <= 0.0) {
        return None;
    }
    let roots = Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let sqrt_v = eig.eigenvectors * roots * eig.eigenvectors.transpose();
    let mut omega = Matrix4::zeros();
    omega[(0, 1)] = 1.0;
    omega[(1, 0)] = -1.0;
    omega[(2, 3)] = 1.0;
    omega[(3, 2)] = -1.0;
    let m = sqrt_v * omega * sqrt_v;
    let mut sq: Vec<f64> = (m.transpose() * m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    sq.sort_by(f64::total_cmp);
    Some((
        (0.5 * (sq[0] + sq[1])).max(0.0).sqrt(),
        (0.5 * (sq[2] + sq[3])).max(0.0).sqrt(),
    ))
}

pub fn physicality_check(state: &GaussianTwoModeState) -> Result<Physicality> {
    state.check_symmetric()?;
    let (lo, hi) = match symplectic_spectrum(&state.cov) {
        Some(pair) => pair,
        None => {
            let det_a = state.block(Mode::A).determinant();
            let det_b = state.block(Mode::C).determinant();
            let det_c = state.cross_block().determinant();
            symplectic_pair(det_a + det_b + 2.0 * det_c, state.cov.determinant())?
        }
    };
    Ok(Physicality {
        is_physical: lo >= VACUUM_VARIANCE - PHYSICALITY_TOLERANCE,
        symplectic_eigenvalues: (lo, hi),
    })
}
