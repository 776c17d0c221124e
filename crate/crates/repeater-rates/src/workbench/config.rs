//! TOML run configuration and the manifest written alongside every result.
//!
//! A manifest is a config file with a `[manifest]` section recording the
//! artifact version and the subcommand that produced it. Feeding a manifest
//! back through the same subcommand reproduces the run bit for bit; feeding
//! it to a different subcommand is an error.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{
    HardwarePreset, Scheme, SchemeParams, DEFAULT_C_FIBER_M_PER_S, DEFAULT_L_ATT_M,
    DEFAULT_MAX_ATTEMPTS_PER_TRIAL,
};
use crate::{Error, Result};

/// Run-metadata block present only in manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestMeta {
    pub version: String,
    pub command: String,
}

/// Which engine(s) a command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    #[default]
    Analytic,
    Mc,
    Both,
}

impl EngineKind {
    pub fn runs_analytic(self) -> bool {
        matches!(self, EngineKind::Analytic | EngineKind::Both)
    }

    pub fn runs_mc(self) -> bool {
        matches!(self, EngineKind::Mc | EngineKind::Both)
    }

    pub fn label(self) -> &'static str {
        match self {
            EngineKind::Analytic => "analytic",
            EngineKind::Mc => "mc",
            EngineKind::Both => "both",
        }
    }
}

/// Result file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Memory lifetimes in config files are milliseconds, or the string `"inf"`
/// (TOML's bare `inf` float is accepted too); infinite lifetimes serialize
/// back as `"inf"`.
mod lifetime_ms {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number of milliseconds or \"inf\", got \"{t}\""
            ))),
        }
    }
}

pub(crate) fn parse_lifetime_ms(text: &str) -> Result<f64> {
    if text == "inf" {
        return Ok(f64::INFINITY);
    }
    text.parse().map_err(|_| Error::Config(format!(
        "expected a number of milliseconds or \"inf\", got \"{text}\""
    )))
}

/// The repeater configuration one rate computation or simulation acts on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    /// Scheme label: "1+1", "2+2", "2~+1", "2~+2".
    pub kind: String,
    #[serde(default = "default_distance_km")]
    pub total_distance_km: f64,
    /// Delivery topology; the scheme's default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_links: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default = "one")]
    pub eta_s: f64,
    #[serde(default = "one")]
    pub eta_d: f64,
    #[serde(default = "one")]
    pub eta_m: f64,
    #[serde(default = "inf", with = "lifetime_ms")]
    pub tau_m_ms: f64,
    #[serde(default = "default_l_att_km")]
    pub attenuation_length_km: f64,
    #[serde(default = "default_c_fiber")]
    pub fiber_speed_m_per_s: f64,
}

impl Default for SchemeSection {
    /// Ideal hardware with no scheme chosen yet; the CLI fills `kind` from
    /// flags and rejects it if it stays empty.
    fn default() -> SchemeSection {
        SchemeSection {
            kind: String::new(),
            total_distance_km: default_distance_km(),
            num_links: None,
            gamma: None,
            eta_s: 1.0,
            eta_d: 1.0,
            eta_m: 1.0,
            tau_m_ms: f64::INFINITY,
            attenuation_length_km: DEFAULT_L_ATT_M / 1e3,
            fiber_speed_m_per_s: DEFAULT_C_FIBER_M_PER_S,
        }
    }
}

impl SchemeSection {
    pub fn from_preset(p: &HardwarePreset, total_distance_km: f64) -> SchemeSection {
        SchemeSection {
            kind: p.scheme.label().to_string(),
            total_distance_km,
            num_links: None,
            gamma: p.gamma,
            eta_s: p.eta_s,
            eta_d: p.eta_d,
            eta_m: p.eta_m,
            tau_m_ms: p.tau_m_s * 1e3,
            attenuation_length_km: DEFAULT_L_ATT_M / 1e3,
            fiber_speed_m_per_s: DEFAULT_C_FIBER_M_PER_S,
        }
    }

    pub fn scheme(&self) -> Result<Scheme> {
        Scheme::from_label(&self.kind)
    }

    /// Warnings about fields that are present but play no role; the fields
    /// are dropped from the resolved configuration.
    pub fn normalize(&mut self) -> Vec<String> {
        let mut warnings = Vec::new();
        if let Ok(scheme) = self.scheme() {
            if !scheme.uses_gamma() && self.gamma.is_some() {
                warnings.push(format!(
                    "gamma is not a parameter of scheme {}; ignoring it",
                    scheme.label()
                ));
                self.gamma = None;
            }
        }
        warnings
    }

    pub fn to_params(&self) -> Result<SchemeParams> {
        let scheme = self.scheme()?;
        let mut b = SchemeParams::builder(scheme, self.total_distance_km * 1e3)
            .eta_s(self.eta_s)
            .eta_d(self.eta_d)
            .eta_m(self.eta_m)
            .tau_m_s(self.tau_m_ms / 1e3)
            .l_att_m(self.attenuation_length_km * 1e3)
            .c_fiber_m_per_s(self.fiber_speed_m_per_s);
        if let Some(n) = self.num_links {
            b = b.num_links(n);
        }
        if let Some(g) = self.gamma {
            b = b.gamma(g);
        }
        b.build()
    }
}

/// Simulation effort and seeding. Worker-thread count is deliberately not
/// here: results are bit-identical for any thread count, so it is execution
/// environment, not a parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineSection {
    pub kind: EngineKind,
    pub trials: u64,
    pub seed: u64,
    pub max_attempts_per_trial: u64,
    /// Leading trials whose full attempt history goes to a dump file
    /// (`simulate` only).
    pub dump_trials: u64,
}

impl Default for EngineSection {
    fn default() -> Self {
        EngineSection {
            kind: EngineKind::Analytic,
            trials: 200_000,
            seed: 0,
            max_attempts_per_trial: DEFAULT_MAX_ATTEMPTS_PER_TRIAL,
            dump_trials: 0,
        }
    }
}

/// Memory-lifetime x memory-efficiency grid. Defaults resolve the
/// low-lifetime, low-efficiency corner where iso-rate curves concentrate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemorySweepSection {
    pub tau_min_ms: f64,
    pub tau_max_ms: f64,
    /// Log-spaced lifetime points.
    pub tau_points: u32,
    pub eta_m_min: f64,
    pub eta_m_max: f64,
    /// Linearly spaced efficiency points.
    pub eta_points: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_rate_hz: Option<f64>,
}

impl Default for MemorySweepSection {
    fn default() -> Self {
        MemorySweepSection {
            tau_min_ms: 0.1,
            tau_max_ms: 10_000.0,
            tau_points: 60,
            eta_m_min: 0.05,
            eta_m_max: 1.0,
            eta_points: 40,
            target_rate_hz: None,
        }
    }
}

/// Distance axis and the presets swept over it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistanceSweepSection {
    pub min_km: f64,
    pub max_km: f64,
    pub points: u32,
    pub presets: Vec<String>,
}

impl Default for DistanceSweepSection {
    fn default() -> Self {
        DistanceSweepSection {
            min_km: 10.0,
            max_km: 200.0,
            points: 39,
            presets: ["A", "B", "C", "D", "E", "F"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

/// Validation-suite selection and effort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSection {
    pub suites: Vec<String>,
    pub beta_samples: u64,
    pub tdif_trials: u64,
    pub cross_trials: u64,
    pub compare_samples: u64,
}

impl Default for ValidateSection {
    fn default() -> Self {
        ValidateSection {
            suites: super::validate::SUITES.iter().map(|s| s.to_string()).collect(),
            beta_samples: 100_000,
            tdif_trials: 1_000_000,
            cross_trials: 400_000,
            compare_samples: 400_000,
        }
    }
}

/// Point grid for the deadline-versus-exponential comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareCutoffSection {
    pub p0_values: Vec<f64>,
    pub tau_over_t0_values: Vec<f64>,
    pub samples: u64,
}

impl Default for CompareCutoffSection {
    fn default() -> Self {
        CompareCutoffSection {
            p0_values: vec![0.01, 0.1],
            tau_over_t0_values: vec![1.0, 10.0, 100.0, 1000.0],
            samples: 400_000,
        }
    }
}

/// Where and how results are written. The directory is resolved at run time
/// (flag, then this field, then the `REPEATER_RATES_OUT_DIR` environment
/// variable) and is not part of manifests: a rerun should not be forced to
/// overwrite the original output.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing)]
    pub dir: Option<String>,
    pub format: OutputFormat,
}

/// One run's full configuration; serialized with a [`ManifestMeta`] it is
/// the manifest.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeSection>,
    pub engine: EngineSection,
    pub memory_sweep: MemorySweepSection,
    pub distance_sweep: DistanceSweepSection,
    pub validate: ValidateSection,
    pub compare_cutoff: CompareCutoffSection,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Rejects a manifest replayed through the wrong subcommand and reports
    /// a version drift warning; plain configs pass silently.
    pub fn check_replay(&self, command: &str) -> Result<Vec<String>> {
        let Some(meta) = &self.manifest else {
            return Ok(Vec::new());
        };
        if meta.command != command {
            return Err(Error::Config(format!(
                "manifest was written by `{}`; rerun it with that subcommand, not `{command}`",
                meta.command
            )));
        }
        let mut warnings = Vec::new();
        if meta.version != env!("CARGO_PKG_VERSION") {
            warnings.push(format!(
                "manifest was written by version {}, this is {}",
                meta.version,
                env!("CARGO_PKG_VERSION")
            ));
        }
        Ok(warnings)
    }

    /// The manifest for this resolved configuration.
    pub fn manifest_for(&self, command: &str) -> RunConfig {
        let mut m = self.clone();
        m.manifest = Some(ManifestMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
        });
        m
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("cannot serialize configuration: {e}")))
    }
}

fn one() -> f64 {
    1.0
}

fn inf() -> f64 {
    f64::INFINITY
}

fn default_distance_km() -> f64 {
    100.0
}

fn default_l_att_km() -> f64 {
    DEFAULT_L_ATT_M / 1e3
}

fn default_c_fiber() -> f64 {
    DEFAULT_C_FIBER_M_PER_S
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PresetRegistry;

    #[test]
    fn minimal_config_round_trips() {
        let text = r#"
            [scheme]
            kind = "2+2"
            eta_s = 0.5
            eta_d = 0.95
            eta_m = 0.7
            tau_m_ms = 1.0
        "#;
        let cfg: RunConfig = toml::from_str(text).unwrap();
        let scheme = cfg.scheme.as_ref().unwrap();
        assert_eq!(scheme.total_distance_km, 100.0);
        let params = scheme.to_params().unwrap();
        assert_eq!(params.num_links(), 2);
        assert_eq!(params.tau_m_s(), 1e-3);

        let back: RunConfig = toml::from_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn lifetime_accepts_inf_spellings() {
        for spelling in ["\"inf\"", "inf"] {
            let text = format!("[scheme]\nkind = \"2+2\"\ntau_m_ms = {spelling}\n");
            let cfg: RunConfig = toml::from_str(&text).unwrap();
            assert!(cfg.scheme.unwrap().tau_m_ms.is_infinite());
        }
        let cfg = RunConfig {
            scheme: Some(SchemeSection::from_preset(
                PresetRegistry::new().lookup("C").unwrap(),
                100.0,
            )),
            ..RunConfig::default()
        };
        let mut with_inf = cfg;
        with_inf.scheme.as_mut().unwrap().tau_m_ms = f64::INFINITY;
        let text = with_inf.to_toml_string().unwrap();
        assert!(text.contains("tau_m_ms = \"inf\""), "{text}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("[scheme]\nkind = \"2+2\"\neta_x = 1.0\n");
        assert!(err.is_err());
    }

    #[test]
    fn replay_guards_command_and_version() {
        let manifest = RunConfig::default().manifest_for("rate");
        assert!(manifest.check_replay("rate").unwrap().is_empty());
        let err = manifest.check_replay("simulate").unwrap_err();
        assert!(err.to_string().contains("rate"), "{err}");

        let mut stale = manifest;
        stale.manifest.as_mut().unwrap().version = "0.0.0".to_string();
        let warnings = stale.check_replay("rate").unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn gamma_on_two_photon_scheme_is_dropped_with_warning() {
        let mut section = SchemeSection::from_preset(
            PresetRegistry::new().lookup("C").unwrap(),
            100.0,
        );
        section.gamma = Some(0.2);
        let warnings = section.normalize();
        assert_eq!(warnings.len(), 1);
        assert!(section.gamma.is_none());
        section.to_params().unwrap();
    }
}
