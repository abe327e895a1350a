//! JSON run configuration, unit handling and shipped presets.

use serde::{Deserialize, Serialize};

use crate::dressing::{calibrate_well, v0, DressingParams};
use crate::error::{Error, Result};
use crate::lindblad::SpinChainModel;
use crate::pair_potential::{eigencurves_with, log_grid, molecular_potential, BranchSelector, DispersionCoeffs, MolecularPotential, MwCoupling};
use crate::squeezing::{Dissipation, Method, Scheme, SchemeSetup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    /// Energies in units of the dressing Rabi frequency, used as given.
    Omega,
    /// Energies as `E/2π` in MHz; stored internally as angular frequency (rad/μs).
    #[serde(rename = "mhz_2pi")]
    Mhz2pi,
}

impl Units {
    /// Multiplier from input units to internal angular-frequency units.
    pub fn factor(self) -> f64 {
        match self {
            Units::Omega => 1.0,
            Units::Mhz2pi => std::f64::consts::TAU,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DressingSection {
    pub omega: f64,
    pub delta: f64,
    pub gamma: f64,
    /// Raman coupling; mutually exclusive with `g_over_v0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_over_v0: Option<f64>,
    #[serde(default)]
    pub delta0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MwSection {
    pub omega_mw: f64,
    pub delta_mw: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffSection {
    pub c6_ss: f64,
    pub c6_pp: f64,
    #[serde(default)]
    pub c3_sp: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchChoice {
    Lowest,
    Middle,
    Highest,
    MostSs,
}

impl From<BranchChoice> for BranchSelector {
    fn from(b: BranchChoice) -> Self {
        match b {
            BranchChoice::Lowest => BranchSelector::Lowest,
            BranchChoice::Middle => BranchSelector::Middle,
            BranchChoice::Highest => BranchSelector::Highest,
            BranchChoice::MostSs => BranchSelector::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    #[serde(default = "default_branch")]
    pub branch: BranchChoice,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Rescale the well so that `U(Rc) + 2Δ` equals this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2_at_rc: Option<f64>,
}

fn default_branch() -> BranchChoice {
    BranchChoice::Highest
}
fn default_r_min() -> f64 {
    0.3
}
fn default_r_max() -> f64 {
    20.0
}
fn default_points() -> usize {
    2000
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self { branch: default_branch(), r_min: default_r_min(), r_max: default_r_max(), points: default_points(), delta2_at_rc: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub n_sites: usize,
    /// `Rc / a`.
    pub lattice_ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Rmd,
    Srd,
}

impl From<SchemeName> for Scheme {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::Rmd => Scheme::Rmd,
            SchemeName::Srd => Scheme::Srd,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    ExactMe,
    ConditionalNh,
    Analytic,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::ExactMe => Method::ExactMe,
            MethodName::ConditionalNh => Method::ConditionalNh,
            MethodName::Analytic => Method::Analytic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissipationName {
    Full,
    NoTwoBody,
    Coherent,
}

impl From<DissipationName> for Dissipation {
    fn from(d: DissipationName) -> Self {
        match d {
            DissipationName::Full => Dissipation::Full,
            DissipationName::NoTwoBody => Dissipation::NoTwoBody,
            DissipationName::Coherent => Dissipation::Coherent,
        }
    }
}

fn default_dissipation() -> DissipationName {
    DissipationName::Full
}
fn default_samples() -> usize {
    201
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub scheme: SchemeName,
    pub method: MethodName,
    #[serde(default = "default_dissipation")]
    pub dissipation: DissipationName,
    /// Dressing-time window in units of `1/|V0|`.
    pub tau_range: [f64; 2],
    /// Number of τ samples written by the squeeze command.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsModel {
    /// Many-body spin chain (dense master equation).
    Chain,
    /// Two atoms: three-level and effective two-level models side by side.
    Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    AllDown,
    Equator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    pub model: DynamicsModel,
    /// End of the window in units of `1/|V0|`.
    pub t_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Rydberg pair shift for the pair model; defaults to `U(Rc)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u12: Option<f64>,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
}

fn default_initial() -> InitialState {
    InitialState::Equator
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub schemes: Vec<SchemeName>,
    pub lattice_ratios: Vec<f64>,
    pub n_list: Vec<usize>,
    pub gamma_list: Vec<f64>,
    /// Optimization window in units of `1/|V0|`.
    pub tau_range: [f64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: String,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

/// A validated run configuration. Energy-valued fields hold internal
/// (angular-frequency) values; [`RunConfig::reported`] converts back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub units: Units,
    pub dressing: DressingSection,
    pub mw: MwSection,
    pub coeffs: CoeffSection,
    #[serde(default)]
    pub potential: PotentialSection,
    pub chain: ChainSection,
    pub protocol: ProtocolSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    pub output: OutputSection,
}

fn scale_energies(cfg: &mut RunConfig, f: f64) {
    let d = &mut cfg.dressing;
    d.omega *= f;
    d.delta *= f;
    d.gamma *= f;
    d.delta0 *= f;
    if let Some(g) = d.g.as_mut() {
        *g *= f;
    }
    cfg.mw.omega_mw *= f;
    cfg.mw.delta_mw *= f;
    cfg.coeffs.c6_ss *= f;
    cfg.coeffs.c6_pp *= f;
    cfg.coeffs.c3_sp *= f;
    if let Some(t) = cfg.potential.delta2_at_rc.as_mut() {
        *t *= f;
    }
    if let Some(u) = cfg.dynamics.as_mut().and_then(|d| d.u12.as_mut()) {
        *u *= f;
    }
    if let Some(s) = cfg.scan.as_mut() {
        for g in &mut s.gamma_list {
            *g *= f;
        }
    }
}

fn finite(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be finite, got {x}")))
    }
}

fn window(field: &str, r: [f64; 2]) -> Result<()> {
    if r[0] > 0.0 && r[1] > r[0] && r[1].is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("needs 0 < lo < hi < ∞, got {:?}", r)))
    }
}

impl RunConfig {
    /// Parses JSON text; unit conversion is applied here and nowhere else.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        let f = cfg.units.factor();
        scale_energies(&mut cfg, f);
        Ok(cfg)
    }

    /// Copy with energy fields expressed in the configured input units.
    pub fn reported(&self) -> Self {
        let mut out = self.clone();
        scale_energies(&mut out, 1.0 / self.units.factor());
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.reported()).expect("config serializes")
    }

    fn validate(&self) -> Result<()> {
        let d = &self.dressing;
        for (f, x) in [("dressing.omega", d.omega), ("dressing.delta", d.delta), ("dressing.gamma", d.gamma), ("dressing.delta0", d.delta0)] {
            finite(f, x)?;
        }
        if !(d.omega > 0.0) {
            return Err(Error::validation("dressing.omega", "must be positive"));
        }
        if d.delta == 0.0 {
            return Err(Error::validation("dressing.delta", "must be nonzero"));
        }
        if d.gamma < 0.0 {
            return Err(Error::validation("dressing.gamma", "must be non-negative"));
        }
        match (d.g, d.g_over_v0) {
            (Some(_), Some(_)) => return Err(Error::validation("dressing.g", "give either g or g_over_v0, not both")),
            (Some(g), None) => finite("dressing.g", g)?,
            (None, Some(g)) => finite("dressing.g_over_v0", g)?,
            (None, None) => {}
        }
        finite("mw.omega_mw", self.mw.omega_mw)?;
        finite("mw.delta_mw", self.mw.delta_mw)?;
        if self.mw.omega_mw < 0.0 {
            return Err(Error::validation("mw.omega_mw", "must be non-negative"));
        }
        finite("coeffs.c6_ss", self.coeffs.c6_ss)?;
        finite("coeffs.c6_pp", self.coeffs.c6_pp)?;
        finite("coeffs.c3_sp", self.coeffs.c3_sp)?;
        let p = &self.potential;
        if !(p.r_min > 0.0 && p.r_max > p.r_min && p.r_max.is_finite()) {
            return Err(Error::validation("potential.r_min", "grid needs 0 < r_min < r_max < ∞"));
        }
        if p.points < 3 {
            return Err(Error::validation("potential.points", "needs at least three points"));
        }
        if let Some(t) = p.delta2_at_rc {
            finite("potential.delta2_at_rc", t)?;
        }
        if self.chain.n_sites == 0 {
            return Err(Error::validation("chain.n_sites", "must be at least 1"));
        }
        if !(self.chain.lattice_ratio > 0.0 && self.chain.lattice_ratio.is_finite()) {
            return Err(Error::validation("chain.lattice_ratio", "must be positive and finite"));
        }
        window("protocol.tau_range", self.protocol.tau_range)?;
        if self.protocol.samples < 2 {
            return Err(Error::validation("protocol.samples", "needs at least two samples"));
        }
        if let Some(dy) = &self.dynamics {
            if !(dy.t_max > 0.0 && dy.t_max.is_finite()) {
                return Err(Error::validation("dynamics.t_max", "must be positive and finite"));
            }
            if dy.samples < 2 {
                return Err(Error::validation("dynamics.samples", "needs at least two samples"));
            }
            if let Some(u) = dy.u12 {
                finite("dynamics.u12", u)?;
            }
        }
        if let Some(s) = &self.scan {
            window("scan.tau_range", s.tau_range)?;
            if s.schemes.is_empty() || s.lattice_ratios.is_empty() || s.n_list.is_empty() || s.gamma_list.is_empty() {
                return Err(Error::validation("scan", "every list must be non-empty"));
            }
            if s.lattice_ratios.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                return Err(Error::validation("scan.lattice_ratios", "entries must be positive and finite"));
            }
            if s.n_list.contains(&0) {
                return Err(Error::validation("scan.n_list", "entries must be at least 1"));
            }
            if s.gamma_list.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
                return Err(Error::validation("scan.gamma_list", "entries must be finite and non-negative"));
            }
        }
        if self.output.path.is_empty() {
            return Err(Error::validation("output.path", "must not be empty"));
        }
        Ok(())
    }

    /// Dressing parameters with `g` resolved (internal units).
    pub fn params(&self) -> Result<DressingParams<f64>> {
        let d = &self.dressing;
        let mut p = DressingParams::new(d.omega, d.delta, d.gamma, 0.0, d.delta0)?;
        p.g = match (d.g, d.g_over_v0) {
            (Some(g), _) => g,
            (None, Some(r)) => r * v0(&p)?.abs(),
            (None, None) => 0.0,
        };
        Ok(p)
    }

    pub fn mw(&self) -> Result<MwCoupling<f64>> {
        MwCoupling::new(self.mw.omega_mw, self.mw.delta_mw)
    }

    pub fn coeffs(&self) -> Result<DispersionCoeffs<f64>> {
        DispersionCoeffs::new(self.coeffs.c6_ss, self.coeffs.c6_pp, self.coeffs.c3_sp)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        log_grid(self.potential.r_min, self.potential.r_max, self.potential.points)
    }

    /// Molecular potential of the configured branch, before calibration.
    pub fn bare_potential(&self) -> Result<MolecularPotential<f64>> {
        let curves = eigencurves_with(&self.grid()?, &self.mw()?, &self.coeffs()?, self.potential.branch.into())?;
        molecular_potential(&curves)
    }

    /// Molecular potential with the optional `Δ2(Rc)` calibration applied.
    pub fn potential(&self) -> Result<MolecularPotential<f64>> {
        let bare = self.bare_potential()?;
        match self.potential.delta2_at_rc {
            Some(t) => calibrate_well(&bare, &self.params()?, t),
            None => Ok(bare),
        }
    }

    pub fn setup(&self) -> Result<SchemeSetup<f64>> {
        Ok(SchemeSetup { params: self.params()?, potential: self.potential()? })
    }

    /// Spin chain for the configured scheme and lattice.
    pub fn chain_model(&self) -> Result<SpinChainModel<f64>> {
        let p = self.params()?;
        self.setup()?.chain(self.protocol.scheme.into(), self.chain.n_sites, self.chain.lattice_ratio, p.gamma)
    }

    /// `|V0|` in internal units.
    pub fn v0_abs(&self) -> Result<f64> {
        Ok(v0(&self.params()?)?.abs())
    }
}

pub fn load_config(path: impl AsRef<std::path::Path>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    RunConfig::from_json(&text)
}

/// Names of the shipped presets.
pub const PRESETS: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "figS1", "figS2"];

pub fn preset_json(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1" => include_str!("../presets/fig1.json"),
        "fig2" => include_str!("../presets/fig2.json"),
        "fig3" => include_str!("../presets/fig3.json"),
        "fig4" => include_str!("../presets/fig4.json"),
        "figS1" => include_str!("../presets/figS1.json"),
        "figS2" => include_str!("../presets/figS2.json"),
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<RunConfig> {
    let text = preset_json(name).ok_or_else(|| Error::validation("preset", format!("unknown preset `{name}`")))?;
    RunConfig::from_json(text)
}
