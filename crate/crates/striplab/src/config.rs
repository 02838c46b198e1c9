//! Run configuration: strict TOML with defaults for every field, explicit
//! rejection of unknown keys, and field-named validation errors.

use crate::eigen::EigOptions;
use crate::error::{Error, Result};
use crate::geometry::{Profile, DEFAULT_STRIP_WIDTH};
use crate::grid::{build_grid2d, Grading, Grid2D};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Oscillator,
    Hardy,
    MuCurve,
    Evolve,
    FullReport,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Oscillator => "oscillator",
            ExperimentKind::Hardy => "hardy",
            ExperimentKind::MuCurve => "mu_curve",
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::FullReport => "full_report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub profile: ProfileConfig,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub oscillator: OscillatorConfig,
    pub hardy: HardyConfig,
    pub mu_curve: MuCurveConfig,
    pub evolve: EvolveConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: ExperimentKind::FullReport,
            profile: ProfileConfig::default(),
            grid: GridConfig::default(),
            solver: SolverConfig::default(),
            oscillator: OscillatorConfig::default(),
            hardy: HardyConfig::default(),
            mu_curve: MuCurveConfig::default(),
            evolve: EvolveConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Boundary profile for the spectral experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileConfig {
    /// "straight", "smooth_bump", or "tent".
    pub kind: String,
    pub amplitude: f64,
    pub half_width: f64,
    /// Strip width; the transverse ground energy is (pi/d)^2.
    pub d: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            kind: "smooth_bump".to_string(),
            amplitude: 1.0,
            half_width: 1.0,
            d: DEFAULT_STRIP_WIDTH,
        }
    }
}

fn profile_from_parts(
    field_prefix: &str,
    kind: &str,
    amplitude: f64,
    half_width: f64,
    d: f64,
) -> Result<Profile> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::config(format!("{field_prefix}.d"), format!("{d} must be positive")));
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::config(
            format!("{field_prefix}.half_width"),
            format!("{half_width} must be positive"),
        ));
    }
    if !amplitude.is_finite() {
        return Err(Error::config(
            format!("{field_prefix}.amplitude"),
            format!("{amplitude} is not finite"),
        ));
    }
    match kind {
        "straight" => Profile::straight(d),
        "smooth_bump" => Profile::smooth_bump(amplitude, half_width, d),
        "tent" => Profile::tent(amplitude, half_width, d),
        other => {
            return Err(Error::config(
                format!("{field_prefix}.kind"),
                format!("unknown kind `{other}`; expected straight, smooth_bump, or tent"),
            ))
        }
    }
    .map_err(|e| Error::config(field_prefix.to_string(), e.to_string()))
}

impl ProfileConfig {
    pub fn to_profile(&self) -> Result<Profile> {
        profile_from_parts("profile", &self.kind, self.amplitude, self.half_width, self.d)
    }
}

/// Grid for the scaled-family and Hardy solves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub x_extent: f64,
    pub n_x: usize,
    pub n_z: usize,
    /// "uniform" or "geometric" (cells shrinking toward x = 0).
    pub grading: String,
    pub grading_ratio: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            x_extent: 8.0,
            n_x: 801,
            n_z: 40,
            grading: "geometric".to_string(),
            grading_ratio: 0.99,
        }
    }
}

impl GridConfig {
    pub fn build(&self, d: f64) -> Result<Grid2D> {
        if !(self.x_extent.is_finite() && self.x_extent > 0.0) {
            return Err(Error::config("grid.x_extent", format!("{} must be positive", self.x_extent)));
        }
        if self.n_x < 4 {
            return Err(Error::config("grid.n_x", format!("{} is too small; need at least 4", self.n_x)));
        }
        if self.n_z < 4 {
            return Err(Error::config("grid.n_z", format!("{} is too small; need at least 4", self.n_z)));
        }
        let grading = match self.grading.as_str() {
            "uniform" => Grading::Uniform,
            "geometric" => {
                if !(self.grading_ratio > 0.0 && self.grading_ratio <= 1.0) {
                    return Err(Error::config(
                        "grid.grading_ratio",
                        format!("{} outside (0, 1]", self.grading_ratio),
                    ));
                }
                if self.n_x % 2 == 0 {
                    return Err(Error::config(
                        "grid.n_x",
                        format!("{} is even; geometric grading needs an odd count for the center node", self.n_x),
                    ));
                }
                Grading::GeometricTowardZero { ratio: self.grading_ratio }
            }
            other => {
                return Err(Error::config(
                    "grid.grading",
                    format!("unknown grading `{other}`; expected uniform or geometric"),
                ))
            }
        };
        build_grid2d(self.x_extent, self.n_x, self.n_z, d, grading)
            .map_err(|e| Error::config("grid", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub eig_tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = EigOptions::default();
        SolverConfig { eig_tol: o.tol, max_iterations: o.max_iter, seed: o.seed }
    }
}

impl SolverConfig {
    pub fn to_options(&self) -> Result<EigOptions> {
        if !(self.eig_tol.is_finite() && self.eig_tol > 0.0) {
            return Err(Error::config("solver.eig_tol", format!("{} must be positive", self.eig_tol)));
        }
        if self.max_iterations == 0 {
            return Err(Error::config("solver.max_iterations", "must be at least 1".to_string()));
        }
        Ok(EigOptions {
            tol: self.eig_tol,
            max_iter: self.max_iterations,
            seed: self.seed,
            ..EigOptions::default()
        })
    }
}

/// Confinement-ladder experiment parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillatorConfig {
    pub x_extent: f64,
    pub n: usize,
    pub levels: usize,
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        OscillatorConfig { x_extent: 12.0, n: 1200, levels: 3 }
    }
}

impl OscillatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_extent.is_finite() && self.x_extent > 0.0) {
            return Err(Error::config("oscillator.x_extent", format!("{} must be positive", self.x_extent)));
        }
        if self.n < 4 {
            return Err(Error::config("oscillator.n", format!("{} is too small", self.n)));
        }
        if self.levels == 0 {
            return Err(Error::config("oscillator.levels", "must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// Truncated Hardy-constant sweep over x-extents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HardyConfig {
    pub x_extents: Vec<f64>,
    /// Target uniform x-spacing; the node count is derived per extent.
    pub target_spacing: f64,
    pub n_z: usize,
}

impl Default for HardyConfig {
    fn default() -> Self {
        HardyConfig { x_extents: vec![4.0, 8.0, 12.0, 16.0], target_spacing: 0.04, n_z: 40 }
    }
}

impl HardyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.x_extents.is_empty() {
            return Err(Error::config("hardy.x_extents", "must be nonempty".to_string()));
        }
        if self.x_extents.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::config("hardy.x_extents", "entries must be positive".to_string()));
        }
        if self.x_extents.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("hardy.x_extents", "must be strictly ascending".to_string()));
        }
        if !(self.target_spacing.is_finite() && self.target_spacing > 0.0) {
            return Err(Error::config(
                "hardy.target_spacing",
                format!("{} must be positive", self.target_spacing),
            ));
        }
        if self.n_z < 4 {
            return Err(Error::config("hardy.n_z", format!("{} is too small", self.n_z)));
        }
        Ok(())
    }

    /// Interior node count giving roughly the target spacing on [-x, x].
    pub fn n_x_for(&self, x_extent: f64) -> usize {
        ((2.0 * x_extent / self.target_spacing).round() as usize).max(5) - 1
    }
}

/// Scaled-family ground-curve sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuCurveConfig {
    pub s_values: Vec<f64>,
}

impl Default for MuCurveConfig {
    fn default() -> Self {
        MuCurveConfig { s_values: (0..=12).map(|k| 0.5 * k as f64).collect() }
    }
}

impl MuCurveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s_values.is_empty() {
            return Err(Error::config("mu_curve.s_values", "must be nonempty".to_string()));
        }
        if self.s_values.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("mu_curve.s_values", "entries must be finite".to_string()));
        }
        if self.s_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("mu_curve.s_values", "must be strictly ascending".to_string()));
        }
        Ok(())
    }
}

/// Time-domain decay experiment. Runs its own profile (default: tent) and
/// the straight reference on identical grids, data, and windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub profile_kind: String,
    pub amplitude: f64,
    pub half_width: f64,
    pub x_extent: f64,
    pub n_x: usize,
    pub n_z: usize,
    /// Defaults to (0.4 x_extent)^2 when absent.
    pub t_final: Option<f64>,
    /// Defaults to 4 min(h)^2 when absent.
    pub dt: Option<f64>,
    pub record_every: usize,
    pub fit_t_min: f64,
    pub u0_center: f64,
    pub u0_width: f64,
    /// Also fit the alternative initial states.
    pub dictionary: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            profile_kind: "tent".to_string(),
            amplitude: 1.0,
            half_width: 1.0,
            x_extent: 16.0,
            n_x: 799,
            n_z: 40,
            t_final: None,
            dt: None,
            record_every: 4,
            fit_t_min: 5.0,
            u0_center: 0.0,
            u0_width: 1.0,
            dictionary: true,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_extent.is_finite() && self.x_extent > 0.0) {
            return Err(Error::config("evolve.x_extent", format!("{} must be positive", self.x_extent)));
        }
        if self.n_x < 4 {
            return Err(Error::config("evolve.n_x", format!("{} is too small", self.n_x)));
        }
        if self.n_z < 4 {
            return Err(Error::config("evolve.n_z", format!("{} is too small", self.n_z)));
        }
        if let Some(t) = self.t_final {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::config("evolve.t_final", format!("{t} must be positive")));
            }
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config("evolve.dt", format!("{dt} must be positive")));
            }
        }
        if self.record_every == 0 {
            return Err(Error::config("evolve.record_every", "must be at least 1".to_string()));
        }
        if !(self.fit_t_min.is_finite() && self.fit_t_min >= 0.0) {
            return Err(Error::config("evolve.fit_t_min", format!("{} must be nonnegative", self.fit_t_min)));
        }
        if !(self.u0_width.is_finite() && self.u0_width > 0.0) {
            return Err(Error::config("evolve.u0_width", format!("{} must be positive", self.u0_width)));
        }
        if !self.u0_center.is_finite() {
            return Err(Error::config("evolve.u0_center", "must be finite".to_string()));
        }
        Ok(())
    }

    pub fn to_profile(&self, d: f64) -> Result<Profile> {
        profile_from_parts("evolve", &self.profile_kind, self.amplitude, self.half_width, d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: String,
    /// Also dump assembled operators as 1-indexed triplet files.
    pub dump_operator: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: "out".to_string(), dump_operator: false }
    }
}

impl RunConfig {
    /// Range and cross-field checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<()> {
        self.profile.to_profile()?;
        self.grid.build(self.profile.d)?;
        self.solver.to_options()?;
        self.oscillator.validate()?;
        self.hardy.validate()?;
        self.mu_curve.validate()?;
        self.evolve.validate()?;
        self.evolve.to_profile(self.profile.d)?;
        if self.output.directory.is_empty() {
            return Err(Error::config("output.directory", "must be nonempty".to_string()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Parse and validate a TOML configuration. Unknown keys anywhere are
/// rejected; missing keys take defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        toml::from_str(text).map_err(|e| Error::config("parse", e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
