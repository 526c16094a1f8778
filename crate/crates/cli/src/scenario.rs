//! Scenario files: TOML parsing and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// What a scenario simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Fields and fluxes of a prescribed worldline.
    Fields,
    /// Lorentz–Dirac equation integrated as a third-order system.
    LorentzDirac,
    ReducedOrder,
    /// Six-dimensional reaction force along a prescribed worldline.
    SixD,
    #[serde(rename = "tail_2plus1")]
    Tail2plus1,
    /// Scalar self-force along a prescribed worldline.
    Scalar,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Fields => "fields",
            ModelKind::LorentzDirac => "lorentz_dirac",
            ModelKind::ReducedOrder => "reduced_order",
            ModelKind::SixD => "six_d",
            ModelKind::Tail2plus1 => "tail_2plus1",
            ModelKind::Scalar => "scalar",
        }
    }

    fn allowed_dimensions(self) -> &'static [usize] {
        match self {
            ModelKind::Fields => &[4, 6],
            ModelKind::LorentzDirac | ModelKind::ReducedOrder | ModelKind::Scalar => &[4],
            ModelKind::SixD => &[6],
            ModelKind::Tail2plus1 => &[3],
        }
    }

    /// Integrated models evolve from initial data in an external field;
    /// the rest follow a prescribed worldline.
    pub fn is_dynamic(self) -> bool {
        matches!(self, ModelKind::LorentzDirac | ModelKind::ReducedOrder | ModelKind::Tail2plus1)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WorldlineSpec {
    Rest {
        position: Vec<f64>,
    },
    Uniform {
        position: Vec<f64>,
        /// Spatial velocity.
        velocity: Vec<f64>,
    },
    Hyperbolic {
        g: f64,
    },
    Circular {
        radius: f64,
        omega: f64,
    },
    Oscillating {
        amplitude: f64,
        omega: f64,
    },
    /// CSV with columns `tau, z0, ..., z{d-1}`, relative to the scenario file.
    Spline {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalFieldSpec {
    #[serde(default)]
    pub electric: Vec<f64>,
    /// Three components in four dimensions, one in 2+1.
    #[serde(default)]
    pub magnetic: Vec<f64>,
    /// Switch-on time and smooth ramp duration; no ramp when absent.
    pub ramp: Option<f64>,
    #[serde(default)]
    pub t_on: f64,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default)]
    pub position: Vec<f64>,
    #[serde(default)]
    pub velocity: Vec<f64>,
    /// Spatial part of the initial acceleration (Lorentz–Dirac only).
    #[serde(default)]
    pub acceleration: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSpec {
    pub tau_end: f64,
    #[serde(default)]
    pub tau_start: f64,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub h_max: Option<f64>,
    /// History length for the 2+1 tail.
    pub horizon: Option<f64>,
    /// Near-coincidence window of the 2+1 tail.
    pub near_window: Option<f64>,
    /// Raw Lorentz–Dirac integration stops once `|a| τ₀` exceeds this.
    pub max_scaled_acceleration: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Sphere {
        radius: f64,
        #[serde(default)]
        center: Vec<f64>,
        t: [f64; 2],
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default = "default_panels")]
        panels: usize,
    },
    /// Retarded tube `ρ = radius`; without `tau` it spans the trajectory.
    Tube {
        radius: f64,
        tau: Option<[f64; 2]>,
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default = "default_panels")]
        panels: usize,
    },
    Slab {
        t: f64,
        inner: f64,
        outer: f64,
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default = "default_panels")]
        panels: usize,
    },
}

fn default_order() -> usize {
    12
}

fn default_panels() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Lab time of the slice.
    pub t: f64,
    /// Direction of the ray from `origin`.
    pub direction: Vec<f64>,
    #[serde(default)]
    pub origin: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ForcesSpec {
    pub tau: [f64; 2],
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub field_grid: Option<GridSpec>,
    pub forces: Option<ForcesSpec>,
    #[serde(default = "yes")]
    pub trajectory: bool,
    #[serde(default = "yes")]
    pub balance: bool,
    /// Gauss–Legendre panels for the post-hoc 2+1 self-force impulse.
    #[serde(default = "default_tail_panels")]
    pub tail_panels: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { field_grid: None, forces: None, trajectory: true, balance: true, tail_panels: default_tail_panels() }
    }
}

fn yes() -> bool {
    true
}

fn default_tail_panels() -> usize {
    32
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest accepted flux error estimate relative to the flux.
    #[serde(default = "default_flux_rel")]
    pub flux_rel: f64,
    /// Absolute floor below which flux errors are ignored.
    #[serde(default = "default_flux_abs")]
    pub flux_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { flux_rel: default_flux_rel(), flux_abs: default_flux_abs() }
    }
}

fn default_flux_rel() -> f64 {
    1e-3
}

fn default_flux_abs() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dimension: usize,
    pub model: ModelKind,
    /// Charge `e`, or the coupling `g` for the scalar model.
    pub charge: f64,
    #[serde(default = "one")]
    pub mass: f64,
    /// Scalar field mass; zero for the massless field.
    #[serde(default)]
    pub field_mass: f64,
    pub worldline: Option<WorldlineSpec>,
    pub external_field: Option<ExternalFieldSpec>,
    pub initial: Option<InitialState>,
    pub integration: Option<IntegrationSpec>,
    #[serde(default)]
    pub surfaces: Vec<SurfaceSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn one() -> f64 {
    1.0
}

/// A scenario with the file it came from.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub path: PathBuf,
    /// Hex SHA-256 of the file contents.
    pub hash: String,
}

/// A scenario that failed to parse or validate.
#[derive(Debug)]
pub enum ScenarioError {
    Read(PathBuf, std::io::Error),
    Parse(String),
    Invalid { field: String, message: String },
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            ScenarioError::Parse(m) => write!(f, "parse error: {m}"),
            ScenarioError::Invalid { field, message } => write!(f, "validation error in `{field}`: {message}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

fn invalid(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field: field.into(), message: message.into() }
}

pub fn load(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Read(path.to_path_buf(), e))?;
    let scenario = parse(&text)?;
    let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
    Ok(LoadedScenario { scenario, path: path.to_path_buf(), hash })
}

pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string().trim_end().to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

fn positive(field: &str, v: f64) -> Result<(), ScenarioError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: &[f64]) -> Result<(), ScenarioError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid(field, "components must be finite"))
    }
}

fn length(field: &str, v: &[f64], n: usize, allow_empty: bool) -> Result<(), ScenarioError> {
    if (allow_empty && v.is_empty()) || v.len() == n {
        finite(field, v)
    } else {
        Err(invalid(field, format!("expected {n} components, got {}", v.len())))
    }
}

impl Scenario {
    pub fn spatial(&self) -> usize {
        self.dimension - 1
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let ok_name = !self.name.is_empty()
            && self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !ok_name {
            return Err(invalid("name", "use letters, digits, '_' and '-' only"));
        }
        let allowed = self.model.allowed_dimensions();
        if !allowed.contains(&self.dimension) {
            return Err(invalid(
                "dimension",
                format!("model `{}` requires dimension {:?}, got {}", self.model.name(), allowed, self.dimension),
            ));
        }
        if !self.charge.is_finite() {
            return Err(invalid("charge", "must be finite"));
        }
        positive("mass", self.mass)?;
        if !(self.field_mass >= 0.0 && self.field_mass.is_finite()) {
            return Err(invalid("field_mass", "must be non-negative"));
        }
        if self.field_mass > 0.0 && self.model != ModelKind::Scalar {
            return Err(invalid("field_mass", "only the scalar model has a field mass"));
        }
        positive("tolerances.flux_rel", self.tolerances.flux_rel)?;
        positive("tolerances.flux_abs", self.tolerances.flux_abs)?;
        let n = self.spatial();
        if self.model.is_dynamic() {
            self.validate_dynamic(n)?;
        } else {
            let w = self.worldline.as_ref().ok_or_else(|| {
                invalid("worldline", format!("model `{}` follows a prescribed worldline", self.model.name()))
            })?;
            self.validate_worldline(w, n)?;
            if self.external_field.is_some() || self.initial.is_some() {
                return Err(invalid("external_field", "prescribed-worldline models take no external field or initial state"));
            }
        }
        for (i, s) in self.surfaces.iter().enumerate() {
            self.validate_surface(&format!("surfaces[{i}]"), s, n)?;
        }
        if let Some(g) = &self.output.field_grid {
            if self.dimension != 4 || self.model != ModelKind::Fields {
                return Err(invalid("output.field_grid", "field grids are written for four-dimensional `fields` scenarios"));
            }
            length("output.field_grid.direction", &g.direction, n, false)?;
            length("output.field_grid.origin", &g.origin, n, true)?;
            if g.direction.iter().all(|x| *x == 0.0) {
                return Err(invalid("output.field_grid.direction", "must be nonzero"));
            }
            positive("output.field_grid.r_min", g.r_min)?;
            if !(g.r_max >= g.r_min) || g.n == 0 {
                return Err(invalid("output.field_grid", "need r_max ≥ r_min and n ≥ 1"));
            }
        }
        if let Some(f) = &self.output.forces {
            if !matches!(self.model, ModelKind::SixD | ModelKind::Scalar) {
                return Err(invalid("output.forces", "force tables are for the six_d and scalar models"));
            }
            if !(f.tau[1] > f.tau[0]) || f.n < 2 {
                return Err(invalid("output.forces", "need tau[1] > tau[0] and n ≥ 2"));
            }
        }
        if self.output.tail_panels == 0 {
            return Err(invalid("output.tail_panels", "must be at least 1"));
        }
        Ok(())
    }

    fn validate_dynamic(&self, n: usize) -> Result<(), ScenarioError> {
        if self.worldline.is_some() {
            return Err(invalid("worldline", format!("model `{}` integrates its own worldline", self.model.name())));
        }
        let field = self.external_field.as_ref().ok_or_else(|| invalid("external_field", "required"))?;
        let magnetic = if self.dimension == 3 { 1 } else { 3 };
        length("external_field.electric", &field.electric, n, true)?;
        length("external_field.magnetic", &field.magnetic, magnetic, true)?;
        if let Some(r) = field.ramp {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(invalid("external_field.ramp", "must be non-negative"));
            }
        }
        let init = self.initial.clone().unwrap_or_default();
        length("initial.position", &init.position, n, true)?;
        length("initial.velocity", &init.velocity, n, true)?;
        if init.velocity.iter().map(|v| v * v).sum::<f64>() >= 1.0 {
            return Err(invalid("initial.velocity", "speed must be below 1"));
        }
        length("initial.acceleration", &init.acceleration, n, true)?;
        if !init.acceleration.is_empty() && self.model != ModelKind::LorentzDirac {
            return Err(invalid("initial.acceleration", "only the lorentz_dirac model takes an initial acceleration"));
        }
        let integ = self.integration.as_ref().ok_or_else(|| invalid("integration", "required"))?;
        finite("integration.tau_start", &[integ.tau_start])?;
        if !(integ.tau_end.is_finite() && integ.tau_end != integ.tau_start) {
            return Err(invalid("integration.tau_end", "must be finite and differ from tau_start"));
        }
        if self.model == ModelKind::Tail2plus1 && integ.tau_end < integ.tau_start {
            return Err(invalid("integration.tau_end", "the tail equation integrates forward only"));
        }
        for (name, v) in [
            ("integration.rtol", integ.rtol),
            ("integration.atol", integ.atol),
            ("integration.h_max", integ.h_max),
            ("integration.horizon", integ.horizon),
            ("integration.near_window", integ.near_window),
            ("integration.max_scaled_acceleration", integ.max_scaled_acceleration),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        Ok(())
    }

    fn validate_worldline(&self, w: &WorldlineSpec, n: usize) -> Result<(), ScenarioError> {
        match w {
            WorldlineSpec::Rest { position } => length("worldline.position", position, n, false),
            WorldlineSpec::Uniform { position, velocity } => {
                length("worldline.position", position, n, false)?;
                length("worldline.velocity", velocity, n, false)?;
                if velocity.iter().map(|v| v * v).sum::<f64>() >= 1.0 {
                    return Err(invalid("worldline.velocity", "speed must be below 1"));
                }
                Ok(())
            }
            WorldlineSpec::Hyperbolic { g } => positive("worldline.g", *g),
            WorldlineSpec::Circular { radius, omega } => {
                positive("worldline.radius", *radius)?;
                if !((omega * radius).abs() < 1.0) {
                    return Err(invalid("worldline.omega", "orbital speed ωR must be below 1"));
                }
                Ok(())
            }
            WorldlineSpec::Oscillating { amplitude, omega } => {
                positive("worldline.amplitude", *amplitude)?;
                positive("worldline.omega", *omega)?;
                if amplitude * omega >= 1.0 {
                    return Err(invalid("worldline.omega", "peak speed Aω must be below 1"));
                }
                Ok(())
            }
            WorldlineSpec::Spline { file } => {
                if file.as_os_str().is_empty() {
                    return Err(invalid("worldline.file", "must name a CSV file"));
                }
                Ok(())
            }
        }
    }

    fn validate_surface(&self, field: &str, s: &SurfaceSpec, n: usize) -> Result<(), ScenarioError> {
        let (order, panels) = match s {
            SurfaceSpec::Sphere { radius, center, t, order, panels } => {
                positive(&format!("{field}.radius"), *radius)?;
                length(&format!("{field}.center"), center, n, true)?;
                if !(t[1] > t[0]) {
                    return Err(invalid(&format!("{field}.t"), "need t[1] > t[0]"));
                }
                (*order, *panels)
            }
            SurfaceSpec::Tube { radius, tau, order, panels } => {
                positive(&format!("{field}.radius"), *radius)?;
                match tau {
                    Some(t) if !(t[1] > t[0]) => return Err(invalid(&format!("{field}.tau"), "need tau[1] > tau[0]")),
                    None if !self.model.is_dynamic() => {
                        return Err(invalid(&format!("{field}.tau"), "required for a prescribed worldline"))
                    }
                    _ => {}
                }
                (*order, *panels)
            }
            SurfaceSpec::Slab { inner, outer, center, order, panels, .. } => {
                positive(&format!("{field}.inner"), *inner)?;
                if !(outer > inner) {
                    return Err(invalid(&format!("{field}.outer"), "must exceed inner"));
                }
                length(&format!("{field}.center"), center, n, true)?;
                (*order, *panels)
            }
        };
        if order < 2 || panels == 0 {
            return Err(invalid(field, "order must be ≥ 2 and panels ≥ 1"));
        }
        if self.model == ModelKind::Tail2plus1 {
            return Err(invalid(field, "2+1 fluxes are not computed; the ledger uses the tail self-force"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LD5: &str = r#"
name = "bad"
dimension = 5
model = "lorentz_dirac"
charge = 0.1
[external_field]
magnetic = [0.0, 0.0, 1.0]
[integration]
tau_end = 1.0
"#;

    #[test]
    fn wrong_dimension_names_the_field() {
        let err = parse(LD5).unwrap_err().to_string();
        assert!(err.contains("`dimension`") && err.contains("lorentz_dirac"), "{err}");
    }

    #[test]
    fn parse_errors_carry_the_line() {
        let err = parse("name = \"x\"\ndimension = \"four\"\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = parse(&LD5.replace("charge = 0.1", "charge = 0.1\ncolour = 1")).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn minimal_fields_scenario() {
        let s = parse(
            r#"
name = "coulomb"
dimension = 4
model = "fields"
charge = 1.0
[worldline]
kind = "rest"
position = [0.0, 0.0, 0.0]
"#,
        )
        .unwrap();
        assert!(s.output.balance && s.surfaces.is_empty());
    }

    #[test]
    fn rejects_superluminal_and_nonpositive_values() {
        let base = LD5.replace("dimension = 5", "dimension = 4");
        assert!(parse(&base).is_ok());
        let fast = format!("{base}\n[initial]\nvelocity = [0.8, 0.7, 0.0]\n");
        assert!(parse(&fast).unwrap_err().to_string().contains("initial.velocity"));
        let neg = base.replace("tau_end = 1.0", "tau_end = 1.0\nrtol = -1.0");
        assert!(parse(&neg).unwrap_err().to_string().contains("integration.rtol"));
    }
}
