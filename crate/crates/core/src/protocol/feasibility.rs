use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817_65e-34;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Hardware parameters. Frequencies are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityInput {
    pub omega_m: f64,
    pub kappa: f64,
    /// Mechanical damping rate.
    pub gamma: f64,
    /// Drive-enhanced optomechanical coupling.
    pub g: f64,
    /// Storage/retrieval pulse duration (s); coupling parameters are only
    /// reported when it is given.
    pub tau: Option<f64>,
    /// Bath temperature (K).
    pub temperature: f64,
}

impl FeasibilityInput {
    /// Flat `key = value` document with angular frequencies `omega_m`,
    /// `kappa`, `g` and either `gamma` or the quality factor `Q`, plus `T`
    /// and the optional `tau`.
    pub fn from_kv(text: &str) -> Result<FeasibilityInput> {
        let (mut omega_m, mut kappa, mut gamma, mut g, mut tau, mut t, mut q) =
            (None, None, None, None, None, None, None);
        for (key, value) in super::parse_kv(text)? {
            let v = value
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("{key}: '{value}' is not a number")))?;
            let slot = match key.as_str() {
                "omega_m" => &mut omega_m,
                "kappa" => &mut kappa,
                "gamma" => &mut gamma,
                "g" => &mut g,
                "tau" => &mut tau,
                "T" => &mut t,
                "Q" => &mut q,
                other => return Err(Error::Parse(format!("unknown feasibility key '{other}'"))),
            };
            *slot = Some(v);
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Parse(format!("feasibility input needs '{name}'")))
        };
        let omega_m = need(omega_m, "omega_m")?;
        let gamma = match (gamma, q) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse("give either 'gamma' or 'Q', not both".into()))
            }
            (Some(gamma), None) => gamma,
            (None, Some(q)) => omega_m / q,
            (None, None) => {
                return Err(Error::Parse(
                    "feasibility input needs 'gamma' or 'Q'".into(),
                ))
            }
        };
        Ok(FeasibilityInput {
            omega_m,
            kappa: need(kappa, "kappa")?,
            gamma,
            g: need(g, "g")?,
            tau,
            temperature: need(t, "T")?,
        })
    }
}

/// Ratio a "much greater than" comparison has to reach, and the largest
/// `N_th · x` for which entanglement is considered detectable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    pub much_greater: f64,
    pub max_decoherence_ratio: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            much_greater: 5.0,
            max_decoherence_ratio: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub input: FeasibilityInput,
    /// Effective coupling `g²/κ`.
    pub big_g: f64,
    /// `γ/G`.
    pub x: f64,
    /// `e^{-Gτ}`.
    pub y_g: Option<f64>,
    /// `e^{-(G+γ)τ}`.
    pub y_g_prime: Option<f64>,
    /// Bose–Einstein occupation at `ω_m` and the bath temperature.
    pub n_th: f64,
    /// Counter-rotating (Stokes) suppression `(κ/ω_m)²`.
    pub suppression: f64,
    /// `1/(N_th γ)` (s).
    pub decoherence_time: f64,
    /// `N_th · x`.
    pub decoherence_ratio: f64,
    /// `ω_m ≫ κ`.
    pub resolved_sideband: bool,
    /// `κ ≫ g`.
    pub adiabatic: bool,
    /// `N_th x` below the detectability bound.
    pub detectable: bool,
    pub notes: Vec<String>,
}

impl FeasibilityReport {
    /// Human-readable multi-line summary with frequencies in units of 2π Hz.
    pub fn render(&self) -> String {
        let hz = |w: f64| w / (2.0 * PI);
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!(
            "omega_m = 2pi x {} Hz",
            fmt_sig(hz(self.input.omega_m))
        ));
        line(format!(
            "kappa = 2pi x {} Hz",
            fmt_sig(hz(self.input.kappa))
        ));
        line(format!(
            "gamma = 2pi x {} Hz",
            fmt_sig(hz(self.input.gamma))
        ));
        line(format!("g = 2pi x {} Hz", fmt_sig(hz(self.input.g))));
        line(format!("T = {} K", fmt_sig(self.input.temperature)));
        line(format!("G = 2pi x {} Hz", fmt_sig(hz(self.big_g))));
        line(format!("x = {}", fmt_sig(self.x)));
        if let (Some(tau), Some(y), Some(yp)) = (self.input.tau, self.y_g, self.y_g_prime) {
            line(format!("tau = {} s", fmt_sig(tau)));
            line(format!("y_G = {}", fmt_sig(y)));
            line(format!("y_Gprime = {}", fmt_sig(yp)));
        }
        line(format!("N_th = {}", fmt_sig(self.n_th)));
        line(format!("suppression = {}", fmt_sig(self.suppression)));
        line(format!(
            "decoherence_time = {} s",
            fmt_sig(self.decoherence_time)
        ));
        line(format!("N_th*x = {}", fmt_sig(self.decoherence_ratio)));
        line(format!("resolved_sideband = {}", self.resolved_sideband));
        line(format!("adiabatic = {}", self.adiabatic));
        line(format!("detectable = {}", self.detectable));
        for n in &self.notes {
            line(format!("note: {n}"));
        }
        out
    }
}

/// Six significant digits, trailing zeros trimmed.
fn fmt_sig(v: f64) -> String {
    crate::sweep::format_number(v, 6)
}

/// Derived coupling, noise and regime figures for a hardware platform.
pub fn feasibility(
    input: &FeasibilityInput,
    thresholds: RegimeThresholds,
) -> Result<FeasibilityReport> {
    let named = [
        ("omega_m", input.omega_m),
        ("kappa", input.kappa),
        ("gamma", input.gamma),
        ("g", input.g),
        ("T", input.temperature),
    ];
    for (name, v) in named {
        if !(v.is_finite() && v > 0.0) {
            return domain(format!("{name} must be positive and finite, got {v}"));
        }
    }
    if let Some(tau) = input.tau {
        if !(tau.is_finite() && tau > 0.0) {
            return domain(format!("tau must be positive and finite, got {tau}"));
        }
    }
    let big_g = input.g * input.g / input.kappa;
    let x = input.gamma / big_g;
    let n_th = 1.0 / (HBAR * input.omega_m / (BOLTZMANN * input.temperature)).exp_m1();
    let suppression = (input.kappa / input.omega_m).powi(2);
    let decoherence_time = 1.0 / (n_th * input.gamma);
    let decoherence_ratio = n_th * x;
    let y_g = input.tau.map(|t| (-big_g * t).exp());
    let y_g_prime = input.tau.map(|t| (-(big_g + input.gamma) * t).exp());

    let mut notes = Vec::new();
    if let (Some(tau), Some(y)) = (input.tau, y_g) {
        notes.push(format!(
            "y_G = {} at tau = {} s; y = 0.1 needs tau = {} s",
            fmt_sig(y),
            fmt_sig(tau),
            fmt_sig(10f64.ln() / big_g)
        ));
    }
    let regime_g = big_g / (n_th * input.gamma);
    notes.push(format!("G / (N_th gamma) = {}", fmt_sig(regime_g)));

    Ok(FeasibilityReport {
        input: *input,
        big_g,
        x,
        y_g,
        y_g_prime,
        n_th,
        suppression,
        decoherence_time,
        decoherence_ratio,
        resolved_sideband: input.omega_m >= thresholds.much_greater * input.kappa,
        adiabatic: input.kappa >= thresholds.much_greater * input.g,
        detectable: decoherence_ratio < thresholds.max_decoherence_ratio,
        notes,
    })
}

/// Integrated nanobeam resonator at 2 K with a 100 ns pulse.
pub fn nanobeam() -> FeasibilityInput {
    let two_pi = 2.0 * PI;
    FeasibilityInput {
        omega_m: two_pi * 3.7e9,
        kappa: two_pi * 500e6,
        gamma: two_pi * 35e3,
        g: two_pi * 40e6,
        tau: Some(100e-9),
        temperature: 2.0,
    }
}

/// Trampoline resonator at 1 mK; `g` is chosen so that `G = 2π·200 Hz`
/// with `κ = 2π·1.5 kHz`.
pub fn trampoline() -> FeasibilityInput {
    let two_pi = 2.0 * PI;
    let omega_m = two_pi * 10e3;
    let kappa = two_pi * 1.5e3;
    let big_g = two_pi * 200.0;
    FeasibilityInput {
        omega_m,
        kappa,
        gamma: omega_m / 1e6,
        g: (big_g * kappa).sqrt(),
        tau: None,
        temperature: 1e-3,
    }
}
