use std::path::Path;

use capflow::{contact_cos, gradient_regime_threshold, Config, InitialProfile};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Parses and validates a JSON flow configuration.
pub fn parse_config(text: &str) -> CliResult<Config> {
    let config: Config = serde_json::from_str(text).map_err(|e| {
        CliError::Config(format!("invalid configuration: {e}"))
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> CliResult<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

/// Settings used by `verify` when no configuration file is given.
pub fn default_config() -> Config {
    Config::new(2, std::f64::consts::FRAC_PI_3, 64, 1.0, InitialProfile::Cap { radius: 1.0 })
}

/// Where `|cos θ|` sits relative to `(3n+1)/(5n-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub cos_theta: f64,
    pub threshold: f64,
    pub inside: bool,
}

impl Regime {
    pub fn of(config: &Config) -> Self {
        Self {
            cos_theta: contact_cos(config.theta),
            threshold: gradient_regime_threshold(config.n),
            inside: config.in_gradient_regime(),
        }
    }

    pub fn describe(&self, n: usize) -> String {
        format!(
            "regime: |cos theta| = {:.6} {} (3n+1)/(5n-1) = {}/{} = {:.5} ({})",
            self.cos_theta.abs(),
            if self.inside { "<" } else { ">=" },
            3 * n + 1,
            5 * n - 1,
            self.threshold,
            if self.inside { "inside" } else { "outside" },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: &str = r#"{"n": 2, "theta": 1.0471975511965976, "resolution": 32,
        "t_final": 0.1, "initial": {"kind": "cap", "radius": 1.0}}"#;

    #[test]
    fn two_dimensional_threshold_is_seven_ninths() {
        let r = Regime::of(&parse_config(CAP).unwrap());
        assert!((r.threshold - 7.0 / 9.0).abs() < 1e-15);
        assert!(r.inside);
        assert!(r.describe(2).contains("0.77778"));
    }

    #[test]
    fn right_angle_is_inside_for_every_dimension() {
        for n in 2..8 {
            let mut c = default_config();
            c.n = n;
            c.theta = std::f64::consts::FRAC_PI_2;
            let r = Regime::of(&c);
            assert_eq!(r.cos_theta, 0.0);
            assert!(r.inside);
        }
    }

    #[test]
    fn zero_angle_is_rejected_by_name() {
        let err = parse_config(&CAP.replace("1.0471975511965976", "0.0")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("theta"), "{err}");
    }

    #[test]
    fn unknown_and_missing_fields_are_named() {
        let err = parse_config(&CAP.replace("\"t_final\"", "\"t_end\"")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("t_end") || msg.contains("t_final"), "{msg}");
        let err = parse_config(r#"{"n": 2}"#).unwrap_err();
        assert!(err.to_string().contains("theta"), "{err}");
    }

    #[test]
    fn defaults_validate() {
        default_config().validate().unwrap();
    }
}
