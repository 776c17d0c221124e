//! Domain types: repeater schemes, validated physical parameters, derived link
//! geometry, and memory decay models.
//!
//! Internally everything is strict SI (meters, seconds). Unit conversions
//! (km, ms) happen only at the config/CLI boundary in [`crate::workbench`].

mod preset;

pub use preset::{HardwarePreset, PresetRegistry};

use crate::{Error, Result};

/// Photon count consumed by the entanglement-swapping measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsmKind {
    /// Interference of one retrieved photon per link; heralds on a single click.
    SinglePhoton,
    /// Coincidence of one retrieved photon from each link.
    TwoPhoton,
}

/// Source/measurement configuration of the elementary links.
///
/// The label convention is `<photons emitted per source>+<photons in the swap>`,
/// with `~` marking non-deterministic pair sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Deterministic single-photon sources, single-photon swap ("1+1").
    SpsSingle,
    /// Deterministic photon-pair sources, two-photon swap ("2+2").
    DppsDouble,
    /// Non-deterministic pair sources, single-photon swap ("2~+1").
    NdppsSingle,
    /// Non-deterministic pair sources, two-photon swap ("2~+2").
    NdppsDouble,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::SpsSingle,
        Scheme::DppsDouble,
        Scheme::NdppsSingle,
        Scheme::NdppsDouble,
    ];

    pub fn bsm(self) -> BsmKind {
        match self {
            Scheme::SpsSingle | Scheme::NdppsSingle => BsmKind::SinglePhoton,
            Scheme::DppsDouble | Scheme::NdppsDouble => BsmKind::TwoPhoton,
        }
    }

    /// Canonical ASCII label ("1+1", "2+2", "2~+1", "2~+2").
    pub fn label(self) -> &'static str {
        match self {
            Scheme::SpsSingle => "1+1",
            Scheme::DppsDouble => "2+2",
            Scheme::NdppsSingle => "2~+1",
            Scheme::NdppsDouble => "2~+2",
        }
    }

    /// Parses a scheme label. Accepts the ASCII tilde form and the combining
    /// tilde often produced by copy-paste.
    pub fn from_label(s: &str) -> Result<Scheme> {
        match s.trim() {
            "1+1" => Ok(Scheme::SpsSingle),
            "2+2" => Ok(Scheme::DppsDouble),
            "2~+1" | "2\u{303}+1" => Ok(Scheme::NdppsSingle),
            "2~+2" | "2\u{303}+2" => Ok(Scheme::NdppsDouble),
            other => Err(Error::InvalidParameter {
                field: "scheme",
                value: other.to_string(),
                allowed: "1+1, 2+2, 2~+1, 2~+2",
            }),
        }
    }

    /// Whether the local beam-splitter transmission `gamma` enters this
    /// scheme's generation probability.
    pub fn uses_gamma(self) -> bool {
        matches!(self, Scheme::SpsSingle)
    }

    /// Default delivery topology: single-photon-swap schemes deliver usable
    /// two-photon entanglement through the postselected double chain (4 links),
    /// two-photon-swap schemes directly through the two-link chain.
    pub fn default_num_links(self) -> u32 {
        match self.bsm() {
            BsmKind::SinglePhoton => 4,
            BsmKind::TwoPhoton => 2,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// How a stored excitation loses retrieval fidelity while it waits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemoryModel {
    /// Fidelity multiplied by `exp(-dt / tau_m_s)` per stored excitation.
    ExponentialDecay { tau_m_s: f64 },
    /// Fidelity kept intact up to the cutoff, zero afterwards. The cutoff is
    /// budgeted against the *summed* storage time, so an excitation pair
    /// (multiplicity 2) reaches it after half the wall-clock wait.
    HardCutoff { cutoff_s: f64 },
}

impl MemoryModel {
    /// Multiplicative fidelity factor after waiting `dt_s`, with `multiplicity`
    /// excitations decaying simultaneously (1 for a shared single excitation,
    /// 2 when both memories of a link hold a photon).
    pub fn decay_factor(self, dt_s: f64, multiplicity: u32) -> f64 {
        debug_assert!(dt_s >= 0.0);
        let m = multiplicity as f64;
        match self {
            MemoryModel::ExponentialDecay { tau_m_s } => {
                if tau_m_s.is_infinite() || dt_s == 0.0 {
                    1.0
                } else {
                    (-m * dt_s / tau_m_s).exp()
                }
            }
            MemoryModel::HardCutoff { cutoff_s } => {
                if m * dt_s <= cutoff_s {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Geometry quantities derived from a parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Elementary link length (m): total distance over the links in series.
    pub l0_m: f64,
    /// Duration of one generation attempt (s): `l0 / c`, photon flight plus
    /// heralding signal.
    pub t0_s: f64,
    /// Dimensionless decay per attempt of differential wait: `t0 / tau_m`.
    /// Exactly 0 for infinite memory lifetime.
    pub r: f64,
    /// Fiber transmission over one elementary link: `exp(-l0 / l_att)`.
    pub eta_t: f64,
}

/// Attenuation length default for telecom fiber (m).
pub const DEFAULT_L_ATT_M: f64 = 22_000.0;
/// Speed of light in fiber default (m/s).
pub const DEFAULT_C_FIBER_M_PER_S: f64 = 2.0e8;
/// Swap-attempt cap per Monte Carlo trial; hits are reported, never dropped.
pub const DEFAULT_MAX_ATTEMPTS_PER_TRIAL: u64 = 10_000_000;

/// Validated physical parameter set for one repeater configuration.
///
/// Construct through [`SchemeParams::builder`]; every instance has passed
/// range validation, so the engines can evaluate without re-checking.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    scheme: Scheme,
    total_distance_m: f64,
    num_links: u32,
    gamma: Option<f64>,
    eta_s: f64,
    eta_d: f64,
    eta_m: f64,
    tau_m_s: f64,
    l_att_m: f64,
    c_fiber_m_per_s: f64,
}

impl SchemeParams {
    pub fn builder(scheme: Scheme, total_distance_m: f64) -> SchemeParamsBuilder {
        SchemeParamsBuilder {
            scheme,
            total_distance_m,
            num_links: scheme.default_num_links(),
            gamma: None,
            eta_s: 1.0,
            eta_d: 1.0,
            eta_m: 1.0,
            tau_m_s: f64::INFINITY,
            l_att_m: DEFAULT_L_ATT_M,
            c_fiber_m_per_s: DEFAULT_C_FIBER_M_PER_S,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
    pub fn total_distance_m(&self) -> f64 {
        self.total_distance_m
    }
    /// 2 for the plain two-link chain, 4 for the postselected double chain.
    pub fn num_links(&self) -> u32 {
        self.num_links
    }
    /// Local beam-splitter transmission; `Some` only meaningful for "1+1".
    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }
    pub fn eta_s(&self) -> f64 {
        self.eta_s
    }
    pub fn eta_d(&self) -> f64 {
        self.eta_d
    }
    pub fn eta_m(&self) -> f64 {
        self.eta_m
    }
    pub fn tau_m_s(&self) -> f64 {
        self.tau_m_s
    }
    pub fn l_att_m(&self) -> f64 {
        self.l_att_m
    }
    pub fn c_fiber_m_per_s(&self) -> f64 {
        self.c_fiber_m_per_s
    }

    /// Exponential memory model with this parameter set's lifetime.
    pub fn memory_model(&self) -> MemoryModel {
        MemoryModel::ExponentialDecay {
            tau_m_s: self.tau_m_s,
        }
    }

    /// Derived link geometry.
    ///
    /// Two links always sit in series between the end nodes, so the elementary
    /// link length is half the total distance. The postselected topology
    /// (`num_links == 4`) adds a second two-link chain in *parallel* between
    /// the same end nodes; it doubles the link count without shortening links.
    pub fn geometry(&self) -> LinkGeometry {
        let l0_m = self.total_distance_m / 2.0;
        let t0_s = l0_m / self.c_fiber_m_per_s;
        let r = if self.tau_m_s.is_infinite() {
            0.0
        } else {
            t0_s / self.tau_m_s
        };
        let eta_t = (-l0_m / self.l_att_m).exp();
        LinkGeometry { l0_m, t0_s, r, eta_t }
    }

    /// Copy with a different total distance (used by distance sweeps).
    pub fn at_distance(&self, total_distance_m: f64) -> Result<SchemeParams> {
        let mut p = self.clone();
        p.total_distance_m = total_distance_m;
        validate(&p)?;
        Ok(p)
    }

    /// Copy with different memory parameters (used by memory sweeps).
    pub fn with_memory(&self, eta_m: f64, tau_m_s: f64) -> Result<SchemeParams> {
        let mut p = self.clone();
        p.eta_m = eta_m;
        p.tau_m_s = tau_m_s;
        validate(&p)?;
        Ok(p)
    }

    /// Copy with a different link count (2 or 4).
    pub fn with_num_links(&self, num_links: u32) -> Result<SchemeParams> {
        let mut p = self.clone();
        p.num_links = num_links;
        validate(&p)?;
        Ok(p)
    }
}

/// Builder for [`SchemeParams`]. Unset efficiencies default to 1, the lifetime
/// to infinity, fiber constants to the telecom defaults, and the link count to
/// the scheme's delivery topology.
#[derive(Debug, Clone)]
pub struct SchemeParamsBuilder {
    scheme: Scheme,
    total_distance_m: f64,
    num_links: u32,
    gamma: Option<f64>,
    eta_s: f64,
    eta_d: f64,
    eta_m: f64,
    tau_m_s: f64,
    l_att_m: f64,
    c_fiber_m_per_s: f64,
}

impl SchemeParamsBuilder {
    pub fn num_links(mut self, n: u32) -> Self {
        self.num_links = n;
        self
    }
    pub fn gamma(mut self, g: f64) -> Self {
        self.gamma = Some(g);
        self
    }
    pub fn eta_s(mut self, v: f64) -> Self {
        self.eta_s = v;
        self
    }
    pub fn eta_d(mut self, v: f64) -> Self {
        self.eta_d = v;
        self
    }
    pub fn eta_m(mut self, v: f64) -> Self {
        self.eta_m = v;
        self
    }
    pub fn tau_m_s(mut self, v: f64) -> Self {
        self.tau_m_s = v;
        self
    }
    pub fn l_att_m(mut self, v: f64) -> Self {
        self.l_att_m = v;
        self
    }
    pub fn c_fiber_m_per_s(mut self, v: f64) -> Self {
        self.c_fiber_m_per_s = v;
        self
    }

    pub fn build(self) -> Result<SchemeParams> {
        let p = SchemeParams {
            scheme: self.scheme,
            total_distance_m: self.total_distance_m,
            num_links: self.num_links,
            gamma: self.gamma,
            eta_s: self.eta_s,
            eta_d: self.eta_d,
            eta_m: self.eta_m,
            tau_m_s: self.tau_m_s,
            l_att_m: self.l_att_m,
            c_fiber_m_per_s: self.c_fiber_m_per_s,
        };
        validate(&p)?;
        Ok(p)
    }
}

fn require_unit_interval(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value: format!("{v}"),
            allowed: "(0, 1]",
        })
    }
}

fn require_positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value: format!("{v}"),
            allowed: "(0, inf)",
        })
    }
}

fn validate(p: &SchemeParams) -> Result<()> {
    require_positive("total_distance_m", p.total_distance_m)?;
    require_unit_interval("eta_s", p.eta_s)?;
    require_unit_interval("eta_d", p.eta_d)?;
    require_unit_interval("eta_m", p.eta_m)?;
    require_positive("l_att_m", p.l_att_m)?;
    require_positive("c_fiber_m_per_s", p.c_fiber_m_per_s)?;
    // Lifetime may be +inf (ideal memory) but must be positive.
    if !(p.tau_m_s > 0.0) || p.tau_m_s.is_nan() {
        return Err(Error::InvalidParameter {
            field: "tau_m_s",
            value: format!("{}", p.tau_m_s),
            allowed: "(0, inf]",
        });
    }
    if p.num_links != 2 && p.num_links != 4 {
        return Err(Error::InvalidParameter {
            field: "num_links",
            value: format!("{}", p.num_links),
            allowed: "2 or 4",
        });
    }
    if p.num_links == 4 && p.scheme.bsm() != BsmKind::SinglePhoton {
        return Err(Error::TopologyMismatch {
            context: format!(
                "postselected topology (num_links = 4) requires a single-photon-swap \
                 scheme, got \"{}\"",
                p.scheme
            ),
        });
    }
    match (p.scheme.uses_gamma(), p.gamma) {
        (true, None) => {
            return Err(Error::InvalidParameter {
                field: "gamma",
                value: "missing".to_string(),
                allowed: "(0, 1), required for scheme 1+1",
            })
        }
        (_, Some(g)) => {
            if !(g.is_finite() && g > 0.0 && g < 1.0) {
                return Err(Error::InvalidParameter {
                    field: "gamma",
                    value: format!("{g}"),
                    allowed: "(0, 1)",
                });
            }
        }
        (false, None) => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SchemeParamsBuilder {
        SchemeParams::builder(Scheme::DppsDouble, 100_000.0)
            .eta_s(0.5)
            .eta_d(0.95)
            .eta_m(0.7)
            .tau_m_s(1e-3)
    }

    #[test]
    fn geometry_matches_hand_values() {
        let p = base().build().unwrap();
        let g = p.geometry();
        assert_eq!(g.l0_m, 50_000.0);
        assert_eq!(g.t0_s, 2.5e-4);
        assert!((g.eta_t - (-50.0f64 / 22.0).exp()).abs() < 1e-15);
        assert!((g.r - 0.25).abs() < 1e-15);
    }

    #[test]
    fn infinite_lifetime_gives_zero_decay_rate() {
        let p = base().tau_m_s(f64::INFINITY).build().unwrap();
        assert_eq!(p.geometry().r, 0.0);
        assert_eq!(p.memory_model().decay_factor(123.0, 2), 1.0);
    }

    #[test]
    fn exponential_decay_multiplicity_doubles_exponent() {
        let m = MemoryModel::ExponentialDecay { tau_m_s: 2.0 };
        let one = m.decay_factor(1.0, 1);
        let two = m.decay_factor(1.0, 2);
        assert!((two - one * one).abs() < 1e-15);
    }

    #[test]
    fn hard_cutoff_halves_budget_for_pairs() {
        let m = MemoryModel::HardCutoff { cutoff_s: 1.0 };
        assert_eq!(m.decay_factor(0.49, 2), 1.0);
        assert_eq!(m.decay_factor(0.51, 2), 0.0);
        assert_eq!(m.decay_factor(0.99, 1), 1.0);
        assert_eq!(m.decay_factor(1.01, 1), 0.0);
    }

    #[test]
    fn validation_reports_field_names() {
        let err = base().eta_d(1.2).build().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("eta_d") && msg.contains("1.2"), "{msg}");

        let err = SchemeParams::builder(Scheme::SpsSingle, 1e5).build().unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");

        let err = base().tau_m_s(0.0).build().unwrap_err();
        assert!(err.to_string().contains("tau_m_s"), "{err}");
    }

    #[test]
    fn postselected_topology_rejected_for_two_photon_swap() {
        let err = base().num_links(4).build().unwrap_err();
        assert!(matches!(err, Error::TopologyMismatch { .. }), "{err}");
    }

    #[test]
    fn scheme_labels_roundtrip() {
        for s in Scheme::ALL {
            assert_eq!(Scheme::from_label(s.label()).unwrap(), s);
        }
        assert!(Scheme::from_label("3+3").is_err());
    }

    #[test]
    fn single_photon_schemes_default_to_postselected_topology() {
        assert_eq!(Scheme::SpsSingle.default_num_links(), 4);
        assert_eq!(Scheme::NdppsSingle.default_num_links(), 4);
        assert_eq!(Scheme::DppsDouble.default_num_links(), 2);
    }
}
