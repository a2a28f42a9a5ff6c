use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which simulation engine evaluates a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Displaced two-mode squeezed vacuum, logarithmic negativity.
    #[default]
    Gaussian,
    /// Displaced single-photon entanglement on a truncated basis, concurrence.
    Fock,
}

/// Mean amplitude that multiplies the phase-noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseNoiseConvention {
    /// `N_D (1 - y²)²`: the lossless, undamped amplitude.
    PaperLiteral,
    /// The squared mean amplitude the retrieved mode actually carries,
    /// including the input loss and the `1/(1+x)` damping factor.
    #[default]
    PropagatedMean,
}

/// How the final "undisplacement" is sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Undisplacement {
    /// Cancel the propagated mean exactly.
    #[default]
    Propagated,
    /// Displace back by `(1 - y²) α`.
    PaperLiteral,
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $(Self::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(Self::$variant),)+
                    other => Err(Error::Parse(format!(
                        "unknown {} '{other}'", stringify!($ty)
                    ))),
                }
            }
        }
    };
}

keyword_enum!(Engine { Gaussian => "gaussian", Fock => "fock" });
keyword_enum!(PhaseNoiseConvention {
    PaperLiteral => "paper_literal",
    PropagatedMean => "propagated_mean",
});
keyword_enum!(Undisplacement {
    Propagated => "propagated",
    PaperLiteral => "paper_literal",
});

/// Numeric knobs that sweeps and threshold searches can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameter {
    R,
    DisplacementPhotons,
    Y,
    X,
    NIn,
    NTh,
    Sigma,
    Eta1,
    Eta2,
    EtaC,
}

impl Parameter {
    pub const ALL: [Parameter; 10] = [
        Parameter::R,
        Parameter::DisplacementPhotons,
        Parameter::Y,
        Parameter::X,
        Parameter::NIn,
        Parameter::NTh,
        Parameter::Sigma,
        Parameter::Eta1,
        Parameter::Eta2,
        Parameter::EtaC,
    ];

    /// Key used in config files, CSV headers and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Parameter::R => "r",
            Parameter::DisplacementPhotons => "N_D",
            Parameter::Y => "y",
            Parameter::X => "x",
            Parameter::NIn => "N_in",
            Parameter::NTh => "N_th",
            Parameter::Sigma => "sigma",
            Parameter::Eta1 => "eta1",
            Parameter::Eta2 => "eta2",
            Parameter::EtaC => "eta_c",
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown parameter '{s}'")))
    }
}

/// Every knob of the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    /// Two-mode squeezing strength.
    pub r: f64,
    /// Displacement photon number `|α|²`; `α` is taken real.
    pub n_d: f64,
    /// Coupling parameter `e^{-G'τ}`.
    pub y: f64,
    /// Damping ratio `γ/G`.
    pub x: f64,
    /// Initial mechanical occupation.
    pub n_in: f64,
    /// Bath occupation.
    pub n_th: f64,
    /// Phase-noise standard deviation (rad).
    pub sigma: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta_c: f64,
    pub engine: Engine,
    pub phase_noise_convention: PhaseNoiseConvention,
    pub undisplacement: Undisplacement,
    pub fock_dims: usize,
    pub quadrature_nodes: usize,
    /// Allow the Fock engine to run with a hot bath it cannot hold exactly.
    pub truncation_override: bool,
}

/// Largest bath occupation the Fock engine accepts without an override.
pub const FOCK_MAX_N_TH: f64 = 0.5;

impl Default for ProtocolConfig {
    /// The common parameter set of the figure presets.
    fn default() -> Self {
        ProtocolConfig {
            r: 0.5,
            n_d: 5000.0,
            y: 0.1,
            x: 0.01,
            n_in: 1.0,
            n_th: 10.0,
            sigma: 0.01,
            eta1: 0.8,
            eta2: 0.8,
            eta_c: 0.8,
            engine: Engine::Gaussian,
            phase_noise_convention: PhaseNoiseConvention::default(),
            undisplacement: Undisplacement::default(),
            fock_dims: crate::fock::DEFAULT_DIMS,
            quadrature_nodes: 31,
            truncation_override: false,
        }
    }
}

impl ProtocolConfig {
    /// Perfect transfer: no damping, noise or loss, instantaneous coupling.
    pub fn ideal(r: f64) -> Self {
        ProtocolConfig {
            r,
            y: 0.0,
            x: 0.0,
            n_in: 0.0,
            n_th: 0.0,
            sigma: 0.0,
            eta1: 1.0,
            eta2: 1.0,
            eta_c: 1.0,
            ..Default::default()
        }
    }

    pub fn get(&self, p: Parameter) -> f64 {
        match p {
            Parameter::R => self.r,
            Parameter::DisplacementPhotons => self.n_d,
            Parameter::Y => self.y,
            Parameter::X => self.x,
            Parameter::NIn => self.n_in,
            Parameter::NTh => self.n_th,
            Parameter::Sigma => self.sigma,
            Parameter::Eta1 => self.eta1,
            Parameter::Eta2 => self.eta2,
            Parameter::EtaC => self.eta_c,
        }
    }

    pub fn set(&mut self, p: Parameter, v: f64) {
        let slot = match p {
            Parameter::R => &mut self.r,
            Parameter::DisplacementPhotons => &mut self.n_d,
            Parameter::Y => &mut self.y,
            Parameter::X => &mut self.x,
            Parameter::NIn => &mut self.n_in,
            Parameter::NTh => &mut self.n_th,
            Parameter::Sigma => &mut self.sigma,
            Parameter::Eta1 => &mut self.eta1,
            Parameter::Eta2 => &mut self.eta2,
            Parameter::EtaC => &mut self.eta_c,
        };
        *slot = v;
    }

    pub fn with(mut self, p: Parameter, v: f64) -> Self {
        self.set(p, v);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: String| if ok { Ok(()) } else { Err(Error::Domain(what)) };
        for p in Parameter::ALL {
            let v = self.get(p);
            check(v.is_finite(), format!("{p} must be finite, got {v}"))?;
        }
        for p in [
            Parameter::R,
            Parameter::DisplacementPhotons,
            Parameter::X,
            Parameter::NIn,
            Parameter::NTh,
            Parameter::Sigma,
        ] {
            let v = self.get(p);
            check(v >= 0.0, format!("{p} must be >= 0, got {v}"))?;
        }
        for p in [
            Parameter::Y,
            Parameter::Eta1,
            Parameter::Eta2,
            Parameter::EtaC,
        ] {
            let v = self.get(p);
            check(
                (0.0..=1.0).contains(&v),
                format!("{p} must lie in [0, 1], got {v}"),
            )?;
        }
        check(
            self.fock_dims >= 2,
            format!("fock_dims must be >= 2, got {}", self.fock_dims),
        )?;
        check(
            self.quadrature_nodes >= 3 && self.quadrature_nodes % 2 == 1,
            format!(
                "quadrature_nodes must be odd and >= 3, got {}",
                self.quadrature_nodes
            ),
        )?;
        if self.engine == Engine::Fock && self.n_th > FOCK_MAX_N_TH && !self.truncation_override {
            return Err(Error::Truncation(format!(
                "N_th = {} exceeds {FOCK_MAX_N_TH} on a {}-level basis; set truncation_override = true to run anyway",
                self.n_th, self.fock_dims
            )));
        }
        Ok(())
    }

    /// Set one field from its textual key and value.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        if let Ok(p) = key.parse::<Parameter>() {
            let v = value
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("{key}: '{value}' is not a number")))?;
            self.set(p, v);
            return Ok(());
        }
        let parse_usize = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Parse(format!("{key}: '{v}' is not a non-negative integer")))
        };
        match key {
            "engine" => self.engine = value.parse()?,
            "phase_noise_convention" => self.phase_noise_convention = value.parse()?,
            "undisplacement" => self.undisplacement = value.parse()?,
            "fock_dims" => self.fock_dims = parse_usize(value)?,
            "quadrature_nodes" => self.quadrature_nodes = parse_usize(value)?,
            "truncation_override" => {
                self.truncation_override = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("{key}: '{value}' is not true/false")))?
            }
            other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn is_key(key: &str) -> bool {
        key.parse::<Parameter>().is_ok()
            || matches!(
                key,
                "engine"
                    | "phase_noise_convention"
                    | "undisplacement"
                    | "fock_dims"
                    | "quadrature_nodes"
                    | "truncation_override"
            )
    }

    /// Flat `key = value` document; parses back to an identical config.
    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for p in Parameter::ALL {
            out.push_str(&format!("{} = {}\n", p.name(), self.get(p)));
        }
        out.push_str(&format!("engine = {}\n", self.engine));
        out.push_str(&format!(
            "phase_noise_convention = {}\n",
            self.phase_noise_convention
        ));
        out.push_str(&format!("undisplacement = {}\n", self.undisplacement));
        out.push_str(&format!("fock_dims = {}\n", self.fock_dims));
        out.push_str(&format!("quadrature_nodes = {}\n", self.quadrature_nodes));
        out.push_str(&format!(
            "truncation_override = {}\n",
            self.truncation_override
        ));
        out
    }

    /// Apply every `key = value` line of a document on top of `self`.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (key, value) in parse_kv(text)? {
            self.set_key(&key, &value)?;
        }
        Ok(())
    }
}

/// Split a flat `key = value` document; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!(
                "line {}: expected 'key = value', got '{raw}'",
                lineno + 1
            ))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", lineno + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = ProtocolConfig {
            engine: Engine::Fock,
            sigma: 0.0123456789012345,
            truncation_override: true,
            ..Default::default()
        };
        cfg.set(Parameter::X, 1.0 / 3.0);
        let mut back = ProtocolConfig::ideal(0.0);
        back.apply_kv(&cfg.to_kv_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn parse_comments_and_errors() {
        let mut cfg = ProtocolConfig::default();
        cfg.apply_kv("# header\n y = 0.3 # trailing\n\nengine=fock\n")
            .unwrap();
        assert_eq!(cfg.y, 0.3);
        assert_eq!(cfg.engine, Engine::Fock);
        assert!(cfg.apply_kv("bogus = 1").is_err());
        assert!(cfg.apply_kv("y 0.3").is_err());
        assert!(cfg.apply_kv("y = 0,3").is_err());
        assert!(cfg.apply_kv("engine = quantum").is_err());
    }

    #[test]
    fn validation() {
        assert!(ProtocolConfig::default().validate().is_ok());
        assert!(ProtocolConfig::default()
            .with(Parameter::Y, 1.2)
            .validate()
            .is_err());
        assert!(ProtocolConfig::default()
            .with(Parameter::Sigma, -0.1)
            .validate()
            .is_err());
        let hot_fock = ProtocolConfig {
            engine: Engine::Fock,
            ..Default::default()
        };
        assert!(matches!(hot_fock.validate(), Err(Error::Truncation(_))));
        let overridden = ProtocolConfig {
            truncation_override: true,
            ..hot_fock
        };
        assert!(overridden.validate().is_ok());
        let even_nodes = ProtocolConfig {
            quadrature_nodes: 20,
            ..Default::default()
        };
        assert!(even_nodes.validate().is_err());
    }

    #[test]
    fn parameter_names() {
        for p in Parameter::ALL {
            assert_eq!(p.name().parse::<Parameter>().unwrap(), p);
        }
        assert!("N_x".parse::<Parameter>().is_err());
    }
}
