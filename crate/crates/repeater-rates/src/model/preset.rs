//! Named hardware presets and the registry the CLI resolves them from.

use crate::{Error, Result};

use super::{Scheme, SchemeParams};

/// A named set of hardware efficiencies and the scheme they belong to.
/// Distance is not part of a preset; supply it in [`HardwarePreset::params_at`].
#[derive(Debug, Clone, PartialEq)]
pub struct HardwarePreset {
    pub name: &'static str,
    pub description: &'static str,
    pub scheme: Scheme,
    pub gamma: Option<f64>,
    pub eta_s: f64,
    pub eta_d: f64,
    pub eta_m: f64,
    pub tau_m_s: f64,
}

impl HardwarePreset {
    /// Parameter set at the given end-to-end distance, using the scheme's
    /// default delivery topology and the standard fiber constants.
    pub fn params_at(&self, total_distance_m: f64) -> Result<SchemeParams> {
        let mut b = SchemeParams::builder(self.scheme, total_distance_m)
            .eta_s(self.eta_s)
            .eta_d(self.eta_d)
            .eta_m(self.eta_m)
            .tau_m_s(self.tau_m_s);
        if let Some(g) = self.gamma {
            b = b.gamma(g);
        }
        b.build()
    }
}

/// Built-in presets. A/C/E/F pair fast millisecond-scale memories with bright
/// or lossy sources; B/D trade source efficiency for second-scale storage.
pub const BUILTIN_PRESETS: [HardwarePreset; 6] = [
    HardwarePreset {
        name: "A",
        description: "1+1, bright emissive source, fast memory (tau 1 ms)",
        scheme: Scheme::SpsSingle,
        gamma: Some(0.2),
        eta_s: 0.75,
        eta_d: 0.95,
        eta_m: 0.70,
        tau_m_s: 1e-3,
    },
    HardwarePreset {
        name: "B",
        description: "1+1, lossy source, long-lived memory (tau 220 ms)",
        scheme: Scheme::SpsSingle,
        gamma: Some(0.2),
        eta_s: 0.15,
        eta_d: 0.95,
        eta_m: 0.75,
        tau_m_s: 0.220,
    },
    HardwarePreset {
        name: "C",
        description: "2+2, efficient pair source, fast memory (tau 1 ms)",
        scheme: Scheme::DppsDouble,
        gamma: None,
        eta_s: 0.5,
        eta_d: 0.95,
        eta_m: 0.70,
        tau_m_s: 1e-3,
    },
    HardwarePreset {
        name: "D",
        description: "2+2, lossy pair source, long-lived memory (tau 220 ms)",
        scheme: Scheme::DppsDouble,
        gamma: None,
        eta_s: 0.15,
        eta_d: 0.95,
        eta_m: 0.75,
        tau_m_s: 0.220,
    },
    HardwarePreset {
        name: "E",
        description: "2~+1, low-rate spontaneous pair source, fast memory",
        scheme: Scheme::NdppsSingle,
        gamma: None,
        eta_s: 0.03,
        eta_d: 0.95,
        eta_m: 0.70,
        tau_m_s: 1e-3,
    },
    HardwarePreset {
        name: "F",
        description: "2~+2, low-rate spontaneous pair source, fast memory",
        scheme: Scheme::NdppsDouble,
        gamma: None,
        eta_s: 0.03,
        eta_d: 0.95,
        eta_m: 0.70,
        tau_m_s: 1e-3,
    },
];

/// Lookup table of presets; starts with the built-ins, accepts user additions.
/// Names are matched case-insensitively.
#[derive(Debug, Clone)]
pub struct PresetRegistry {
    presets: Vec<HardwarePreset>,
}

impl Default for PresetRegistry {
    fn default() -> Self {
        PresetRegistry {
            presets: BUILTIN_PRESETS.to_vec(),
        }
    }
}

impl PresetRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = &HardwarePreset> {
        self.presets.iter()
    }

    /// Adds a preset; a name collision (case-insensitive) replaces the old
    /// entry so users can shadow a built-in.
    pub fn register(&mut self, preset: HardwarePreset) {
        if let Some(slot) = self
            .presets
            .iter_mut()
            .find(|p| p.name.eq_ignore_ascii_case(preset.name))
        {
            *slot = preset;
        } else {
            self.presets.push(preset);
        }
    }

    pub fn lookup(&self, name: &str) -> Result<&HardwarePreset> {
        self.presets
            .iter()
            .find(|p| p.name.eq_ignore_ascii_case(name.trim()))
            .ok_or_else(|| Error::UnknownPreset {
                name: name.to_string(),
                available: self
                    .presets
                    .iter()
                    .map(|p| p.name)
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BsmKind;

    #[test]
    fn builtins_all_build_valid_params() {
        let reg = PresetRegistry::new();
        for preset in reg.iter() {
            let p = preset.params_at(100_000.0).unwrap();
            assert_eq!(p.scheme(), preset.scheme);
            assert_eq!(p.eta_d(), 0.95);
        }
    }

    #[test]
    fn lookup_is_case_insensitive_and_lists_available_on_miss() {
        let reg = PresetRegistry::new();
        assert_eq!(reg.lookup("c").unwrap().name, "C");
        let err = reg.lookup("Z").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Z") && msg.contains("A") && msg.contains("F"), "{msg}");
    }

    #[test]
    fn register_shadows_builtin() {
        let mut reg = PresetRegistry::new();
        let mut custom = reg.lookup("C").unwrap().clone();
        custom.eta_s = 0.9;
        reg.register(custom);
        assert_eq!(reg.lookup("c").unwrap().eta_s, 0.9);
        assert_eq!(reg.iter().count(), 6);
    }

    #[test]
    fn preset_topologies_follow_scheme_defaults() {
        let reg = PresetRegistry::new();
        let a = reg.lookup("A").unwrap().params_at(5e4).unwrap();
        assert_eq!(a.num_links(), 4);
        assert_eq!(a.scheme().bsm(), BsmKind::SinglePhoton);
        let c = reg.lookup("C").unwrap().params_at(5e4).unwrap();
        assert_eq!(c.num_links(), 2);
    }
}
