use std::path::{Path, PathBuf};

use radial_boltzmann::verify::VerifyOptions;
use radial_boltzmann::{CrossSectionForm, Model, QuadratureSpec};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for random initial data and the random verification runs.
    pub seed: u64,
    /// Truncation order N.
    pub truncation: usize,
    pub output_dir: PathBuf,
    pub model: ModelSection,
    pub initial: InitialData,
    pub time: TimeSection,
    pub quadrature: QuadratureSpec,
    pub verify: VerifySection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            truncation: 64,
            output_dir: PathBuf::from("radboltz-out"),
            model: ModelSection::default(),
            initial: InitialData::default(),
            time: TimeSection::default(),
            quadrature: QuadratureSpec::default(),
            verify: VerifySection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub s: f64,
    pub amplitude: f64,
    pub form: CrossSectionForm,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            s: 0.5,
            amplitude: 1.0,
            form: CrossSectionForm::PowerLawSine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// Radial coefficients b_0, b_1, ...; missing entries are zero.
    Coefficients { values: Vec<f64> },
    Mode { mode: usize, amplitude: f64 },
    /// Projected onto the basis; `remove_invariants` zeroes b_0 and b_1.
    GaussianBump {
        center: f64,
        width: f64,
        amplitude: f64,
        #[serde(default)]
        remove_invariants: bool,
    },
    /// Uniform draw on modes 2..=N, rescaled to the given norm.
    Random { norm: f64 },
}

impl Default for InitialData {
    fn default() -> Self {
        Self::Mode {
            mode: 2,
            amplitude: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    /// `t = 0` followed by geometric spacing from `t_min` to `t_end`.
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: f64,
    pub n_points: usize,
    pub spacing: Spacing,
    pub t_min: f64,
    /// Slack in the decay bound, 0 < delta < 1.
    pub delta: f64,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            t_end: 5.0,
            n_points: 51,
            spacing: Spacing::Linear,
            t_min: 1e-3,
            delta: 0.5,
        }
    }
}

impl TimeSection {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.n_points;
        match self.spacing {
            Spacing::Linear => (0..n).map(|i| self.t_end * i as f64 / (n - 1) as f64).collect(),
            Spacing::Log => {
                let (a, b) = (self.t_min.ln(), self.t_end.ln());
                std::iter::once(0.0)
                    .chain((0..n - 1).map(|i| {
                        if i == n - 2 {
                            self.t_end
                        } else {
                            (a + (b - a) * i as f64 / (n - 2).max(1) as f64).exp()
                        }
                    }))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    /// Run the verification suites as part of `solve`.
    pub enabled: bool,
    pub jmax: usize,
    pub random_trials: usize,
    pub initial_norm: f64,
    pub t_end: f64,
    pub dynamics_truncation: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        let d = VerifyOptions::default();
        Self {
            enabled: false,
            jmax: d.jmax,
            random_trials: d.random_trials,
            initial_norm: d.initial_norm,
            t_end: d.t_end,
            dynamics_truncation: d.dynamics_truncation,
        }
    }
}

fn invalid(field: &str, detail: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("invalid value for `{field}`: {detail}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Failure::Config(msg) => Failure::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let cfg: Self = toml::from_str(text).map_err(|e| Failure::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn model(&self) -> Result<Model, Failure> {
        Model::new(self.model.s, self.model.amplitude, self.model.form).map_err(|e| invalid("model", e))
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            jmax: self.verify.jmax,
            random_trials: self.verify.random_trials,
            initial_norm: self.verify.initial_norm,
            delta: self.time.delta,
            t_end: self.verify.t_end,
            seed: self.seed,
            dynamics_truncation: self.verify.dynamics_truncation,
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if !(self.model.s > 0.0 && self.model.s < 1.0) {
            return Err(invalid("model.s", format!("{} is outside (0, 1)", self.model.s)));
        }
        if !(self.model.amplitude > 0.0 && self.model.amplitude.is_finite()) {
            return Err(invalid("model.amplitude", format!("{} must be positive", self.model.amplitude)));
        }
        self.model()?;
        if self.truncation < 2 {
            return Err(invalid("truncation", format!("{} is below 2", self.truncation)));
        }
        let n = self.truncation;
        match &self.initial {
            InitialData::Coefficients { values } => {
                if values.len() > n + 1 {
                    return Err(invalid("initial.values", format!("{} entries exceed N + 1 = {}", values.len(), n + 1)));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(invalid("initial.values", "entries must be finite"));
                }
            }
            InitialData::Mode { mode, amplitude } => {
                if *mode > n {
                    return Err(invalid("initial.mode", format!("{mode} exceeds N = {n}")));
                }
                if !amplitude.is_finite() {
                    return Err(invalid("initial.amplitude", "must be finite"));
                }
            }
            InitialData::GaussianBump { center, width, amplitude, .. } => {
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(invalid("initial.width", format!("{width} must be positive")));
                }
                if !(center.is_finite() && *center >= 0.0) {
                    return Err(invalid("initial.center", format!("{center} must be a finite radius")));
                }
                if !amplitude.is_finite() {
                    return Err(invalid("initial.amplitude", "must be finite"));
                }
            }
            InitialData::Random { norm } => {
                if !(*norm >= 0.0 && norm.is_finite()) {
                    return Err(invalid("initial.norm", format!("{norm} must be nonnegative")));
                }
            }
        }
        let t = &self.time;
        if !(t.t_end > 0.0 && t.t_end.is_finite()) {
            return Err(invalid("time.t_end", format!("{} must be positive", t.t_end)));
        }
        if t.n_points < 2 {
            return Err(invalid("time.n_points", format!("{} is below 2", t.n_points)));
        }
        if t.spacing == Spacing::Log && !(t.t_min > 0.0 && t.t_min < t.t_end) {
            return Err(invalid("time.t_min", format!("{} must lie in (0, t_end)", t.t_min)));
        }
        if !(t.delta > 0.0 && t.delta < 1.0) {
            return Err(invalid("time.delta", format!("{} is outside (0, 1)", t.delta)));
        }
        self.quadrature.validate().map_err(|e| invalid("quadrature", e))?;
        let v = &self.verify;
        if v.dynamics_truncation < 2 {
            return Err(invalid("verify.dynamics_truncation", "must be at least 2"));
        }
        if !(v.t_end > 0.0 && v.t_end.is_finite()) {
            return Err(invalid("verify.t_end", "must be positive"));
        }
        if !(v.initial_norm > 0.0 && v.initial_norm.is_finite()) {
            return Err(invalid("verify.initial_norm", "must be positive"));
        }
        Ok(())
    }
}
