//! Run configuration, read from TOML or taken from a built-in fixture.

use serde::{Deserialize, Serialize};

use crate::expr::{parse_expression, parse_field};
use crate::fixtures::{
    FIXTURE_N, FIXTURE_Q, HYPERPLANE_D0, HYPERPLANE_DEFINING, HYPERPLANE_N, HYPERPLANE_U,
    HYPERPLANE_V, HYPERPLANE_XI,
};
use crate::hypersurface::{ExplicitFrame, HypersurfaceSpec};
use crate::report::Tolerances;

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypersurface: Option<HypersurfaceConfig>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypersurfaceConfig {
    /// Defining function `F` of `M = {F = 0}`.
    pub defining: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameConfig>,
}

/// Explicit frame: one expression per chart coordinate for each member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub xi: Vec<String>,
    #[serde(rename = "N")]
    pub n: Vec<String>,
    #[serde(rename = "V")]
    pub v: Vec<String>,
    #[serde(rename = "U")]
    pub u: Vec<String>,
    #[serde(rename = "D0", default)]
    pub d0: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    ExplicitPoints,
    RandomBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub mode: SamplingMode,
    pub seed: u64,
    pub count: usize,
    pub box_half_width: f64,
    pub points: Vec<Vec<f64>>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            mode: SamplingMode::RandomBox,
            seed: 0,
            count: 100,
            box_half_width: 1.0,
            points: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Random triples for the space-form fit.
    pub space_form_samples: usize,
    /// Minimum number of phi-sections for the curvature command.
    pub phi_sections: usize,
    /// Judge obstruction classes by their residual alone.
    pub strict_obstructions: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            space_form_samples: 64,
            phi_sections: 20,
            strict_obstructions: false,
        }
    }
}

fn strings<const N: usize>(a: [&str; N]) -> Vec<String> {
    a.iter().map(|s| s.to_string()).collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Built-in setups selectable by name.
    pub fn fixture(name: &str) -> Result<Self, CliError> {
        let hypersurface = match name {
            "standard-structure" => None,
            "hyperplane-x1-y3" => Some(HypersurfaceConfig {
                defining: HYPERPLANE_DEFINING.to_string(),
                frame: Some(FrameConfig {
                    xi: strings(HYPERPLANE_XI),
                    n: strings(HYPERPLANE_N),
                    v: strings(HYPERPLANE_V),
                    u: strings(HYPERPLANE_U),
                    d0: HYPERPLANE_D0.iter().map(|c| strings(*c)).collect(),
                }),
            }),
            other => {
                return Err(CliError::Config(format!(
                    "unknown fixture `{other}` (expected standard-structure or hyperplane-x1-y3)"
                )))
            }
        };
        Ok(Self {
            n: FIXTURE_N,
            q: FIXTURE_Q,
            hypersurface,
            sampling: SamplingConfig {
                seed: 42,
                ..SamplingConfig::default()
            },
            tolerances: Tolerances::default(),
            options: Options::default(),
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [("analytic", t.analytic), ("fd", t.fd), ("fit", t.fit)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!(
                    "tolerance `{name}` must be positive, got {v}"
                )));
            }
        }
        let s = &self.sampling;
        if !(s.box_half_width.is_finite() && s.box_half_width > 0.0) {
            return Err(CliError::Config(
                "sampling.box_half_width must be positive".into(),
            ));
        }
        match s.mode {
            SamplingMode::RandomBox if s.count == 0 => {
                return Err(CliError::Config("sampling.count must be at least 1".into()))
            }
            SamplingMode::ExplicitPoints if s.points.is_empty() => {
                return Err(CliError::Config(
                    "explicit-points mode needs sampling.points".into(),
                ))
            }
            _ => {}
        }
        if let Some(bad) = s.points.iter().find(|p| p.len() != self.dim()) {
            return Err(CliError::Config(format!(
                "sample point has {} coordinates, expected {}",
                bad.len(),
                self.dim()
            )));
        }
        if self.options.space_form_samples < 2 {
            return Err(CliError::Config(
                "options.space_form_samples must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// Parses the hypersurface section, if any.
    pub fn hypersurface_spec(&self) -> Result<Option<HypersurfaceSpec>, CliError> {
        let Some(h) = &self.hypersurface else {
            return Ok(None);
        };
        let defining = parse_expression(&h.defining, self.n)?;
        let explicit_frame = match &h.frame {
            None => None,
            Some(f) => Some(ExplicitFrame {
                xi: parse_field("xi", &f.xi, self.n)?,
                n: parse_field("N", &f.n, self.n)?,
                v: parse_field("V", &f.v, self.n)?,
                u: parse_field("U", &f.u, self.n)?,
                d0: f
                    .d0
                    .iter()
                    .enumerate()
                    .map(|(k, c)| parse_field(&format!("D0[{k}]"), c, self.n))
                    .collect::<Result<_, _>>()?,
            }),
        };
        Ok(Some(HypersurfaceSpec {
            defining,
            explicit_frame,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_takes_defaults() {
        let c =
            RunConfig::from_toml("n = 3\nq = 2\n[hypersurface]\ndefining = \"x1 - y3\"\n").unwrap();
        assert_eq!(c.sampling, SamplingConfig::default());
        assert_eq!(c.tolerances, Tolerances::default());
        assert!(c
            .hypersurface_spec()
            .unwrap()
            .unwrap()
            .explicit_frame
            .is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::from_toml("n = 3\nq = 2\ncolour = 1\n"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn malformed_expression_reports_position() {
        let c = RunConfig::from_toml("n = 3\nq = 2\n[hypersurface]\ndefining = \"x1 - * y3\"\n")
            .unwrap();
        let msg = c.hypersurface_spec().unwrap_err().to_string();
        assert!(msg.contains("position 5"), "{msg}");
    }

    #[test]
    fn fixture_round_trips_through_toml() {
        let c = RunConfig::fixture("hyperplane-x1-y3").unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
        assert!(RunConfig::fixture("nope").is_err());
    }
}
