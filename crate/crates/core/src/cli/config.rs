//! Run configuration: TOML in, fully resolved structure out.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::fock::{binomial, enumerate_basis};
use crate::models::{
    so_n_generators, GaugeGroup, GaugeModel, GeneratorSet, ModeLayout, PotentialSpec,
};
use crate::projector::{HaarQuadrature, ProjectorMethod, ProjectorMethodKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

fn harmonic() -> PotentialSpec {
    PotentialSpec::Harmonic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    SoNVector {
        n: usize,
        #[serde(default = "harmonic")]
        potential: PotentialSpec,
        /// Added to one entry of the first generator; nonzero values build a
        /// deliberately broken generator set.
        #[serde(default)]
        generator_perturbation: f64,
    },
    Su2Ym {
        coupling: f64,
        #[serde(default)]
        generator_perturbation: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectorConfig {
    pub method: ProjectorMethodKind,
    /// Also build the other applicable methods and report agreement norms.
    pub compare: bool,
}

impl Default for ProjectorConfig {
    fn default() -> Self {
        Self {
            method: ProjectorMethodKind::Nullspace,
            compare: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuadratureConfig {
    /// Deterministic rule exact on every block of the truncated space.
    Exact {},
    Trapezoid {
        points: usize,
    },
    EulerProduct {
        angle_points: usize,
        beta_points: usize,
    },
    MonteCarlo {
        samples: usize,
        seed: Option<u64>,
    },
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::Exact {}
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// Random coherent points per pointwise check.
    pub points: usize,
    /// Random group elements for invariance checks.
    pub group_elements: usize,
    /// Points for the closed-form SO(N) kernel comparison.
    pub closed_form_points: usize,
    /// Bound on `|uv|` for the closed-form comparison.
    pub max_uv: f64,
    /// Random points for the Yang–Mills closed-form audit.
    pub audit_points: usize,
    /// Typical modulus of each coordinate of a random point.
    pub point_scale: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            points: 20,
            group_elements: 20,
            closed_form_points: 100,
            max_uv: 1.0,
            audit_points: 50,
            point_scale: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Cutoffs for the ground-energy sweep; empty disables it.
    pub sweep: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub time: f64,
    pub slices: Vec<usize>,
    /// Slice lengths for the pointwise single-slice check.
    pub pointwise_epsilons: Vec<f64>,
    pub pointwise_points: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            time: 1.0,
            slices: vec![16, 32, 64, 128],
            pointwise_epsilons: vec![0.08, 0.04, 0.02, 0.01],
            pointwise_points: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Report file; standard output when absent.
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Every threshold a check is certified under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub generator_algebra: f64,
    pub fock_algebra: f64,
    pub hermiticity: f64,
    pub gauge_commutator: f64,
    pub scalar_product: f64,
    pub projector_law: f64,
    pub method_agreement: f64,
    pub basis_agreement: f64,
    pub closed_form: f64,
    pub invariance: f64,
    pub ym_agreement: f64,
    pub spectrum: f64,
    pub sweep_monotonicity: f64,
    pub evolution_projection: f64,
    pub spectral_reconstruction: f64,
    pub h_ef_origin: f64,
    pub h_ef_invariance: f64,
    pub global_order_min: f64,
    pub global_order_max: f64,
    pub local_order_min: f64,
    pub local_order_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            generator_algebra: 1e-12,
            fock_algebra: 1e-12,
            hermiticity: 1e-10,
            gauge_commutator: 1e-10,
            scalar_product: 1e-10,
            projector_law: 1e-10,
            method_agreement: 1e-8,
            basis_agreement: 1e-10,
            closed_form: 1e-8,
            invariance: 1e-10,
            ym_agreement: 1e-8,
            spectrum: 1e-9,
            sweep_monotonicity: 1e-9,
            evolution_projection: 1e-10,
            spectral_reconstruction: 1e-9,
            h_ef_origin: 1e-10,
            h_ef_invariance: 1e-9,
            global_order_min: 0.8,
            global_order_max: 1.2,
            local_order_min: 1.8,
            local_order_max: 2.2,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 21] {
        [
            ("generator_algebra", self.generator_algebra),
            ("fock_algebra", self.fock_algebra),
            ("hermiticity", self.hermiticity),
            ("gauge_commutator", self.gauge_commutator),
            ("scalar_product", self.scalar_product),
            ("projector_law", self.projector_law),
            ("method_agreement", self.method_agreement),
            ("basis_agreement", self.basis_agreement),
            ("closed_form", self.closed_form),
            ("invariance", self.invariance),
            ("ym_agreement", self.ym_agreement),
            ("spectrum", self.spectrum),
            ("sweep_monotonicity", self.sweep_monotonicity),
            ("evolution_projection", self.evolution_projection),
            ("spectral_reconstruction", self.spectral_reconstruction),
            ("h_ef_origin", self.h_ef_origin),
            ("h_ef_invariance", self.h_ef_invariance),
            ("global_order_min", self.global_order_min),
            ("global_order_max", self.global_order_max),
            ("local_order_min", self.local_order_min),
            ("local_order_max", self.local_order_max),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    /// Largest truncated Fock dimension accepted.
    pub max_dimension: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_dimension: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelConfig,
    pub cutoff: usize,
    /// Seed for random sample points and group elements.
    pub seed: u64,
    pub projector: ProjectorConfig,
    pub quadrature: QuadratureConfig,
    pub sampling: SamplingConfig,
    pub spectrum: SpectrumConfig,
    pub evolution: EvolutionConfig,
    pub output: OutputConfig,
    pub tolerances: Tolerances,
    pub limits: Limits,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model: ModelConfig::SoNVector {
                n: 2,
                potential: PotentialSpec::Harmonic,
                generator_perturbation: 0.0,
            },
            cutoff: 4,
            seed: 0,
            projector: ProjectorConfig::default(),
            quadrature: QuadratureConfig::default(),
            sampling: SamplingConfig::default(),
            spectrum: SpectrumConfig::default(),
            evolution: EvolutionConfig::default(),
            output: OutputConfig::default(),
            tolerances: Tolerances::default(),
            limits: Limits::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub cutoff: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::new("config", e.message().to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// `--seed` replaces the sampling seed and, for Monte Carlo rules, the
    /// quadrature seed.
    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
            if let QuadratureConfig::MonteCarlo { seed: s, .. } = &mut self.quadrature {
                *s = Some(seed);
            }
        }
        if let Some(cutoff) = overrides.cutoff {
            self.cutoff = cutoff;
        }
        if let Some(path) = &overrides.output {
            self.output.path = Some(path.clone());
        }
        if let Some(format) = overrides.format {
            self.output.format = format;
        }
    }

    pub fn num_modes(&self) -> usize {
        match &self.model {
            ModelConfig::SoNVector { n, .. } => *n,
            ModelConfig::Su2Ym { .. } => 9,
        }
    }

    pub fn group(&self) -> GaugeGroup {
        match &self.model {
            ModelConfig::SoNVector { n, .. } => GaugeGroup::SO(*n),
            ModelConfig::Su2Ym { .. } => GaugeGroup::SO(3),
        }
    }

    pub fn potential(&self) -> PotentialSpec {
        match &self.model {
            ModelConfig::SoNVector { potential, .. } => potential.clone(),
            ModelConfig::Su2Ym { coupling, .. } => PotentialSpec::YangMillsQuartic { coupling: *coupling },
        }
    }

    fn check_cutoff(&self, field: &str, cutoff: usize) -> Result<(), ConfigError> {
        let degree = self.potential().degree().max(2);
        if cutoff < degree {
            return Err(ConfigError::new(
                field,
                format!("cutoff {cutoff} is below the Hamiltonian degree {degree}"),
            ));
        }
        let dim = binomial((self.num_modes() + cutoff) as u64, cutoff as u64) as usize;
        if dim > self.limits.max_dimension {
            return Err(ConfigError::new(
                field,
                format!(
                    "Fock dimension {dim} exceeds limits.max_dimension = {}",
                    self.limits.max_dimension
                ),
            ));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        match &self.model {
            ModelConfig::SoNVector {
                n,
                potential,
                generator_perturbation,
            } => {
                if *n < 2 {
                    return Err(ConfigError::new("model.n", "the vector model needs n ≥ 2"));
                }
                match potential {
                    PotentialSpec::YangMillsQuartic { .. } => {
                        return Err(ConfigError::new(
                            "model.potential",
                            "the Yang–Mills quartic needs model.type = \"su2_ym\"",
                        ))
                    }
                    PotentialSpec::PolynomialInX2 { coefficients } => {
                        if coefficients.iter().any(|c| !c.is_finite()) {
                            return Err(ConfigError::new("model.potential.coefficients", "must be finite"));
                        }
                    }
                    PotentialSpec::Harmonic => {}
                }
                if !generator_perturbation.is_finite() {
                    return Err(ConfigError::new("model.generator_perturbation", "must be finite"));
                }
            }
            ModelConfig::Su2Ym {
                coupling,
                generator_perturbation,
            } => {
                if !coupling.is_finite() {
                    return Err(ConfigError::new("model.coupling", "must be finite"));
                }
                if !generator_perturbation.is_finite() {
                    return Err(ConfigError::new("model.generator_perturbation", "must be finite"));
                }
            }
        }
        self.check_cutoff("cutoff", self.cutoff)?;
        for (i, &c) in self.spectrum.sweep.iter().enumerate() {
            self.check_cutoff(&format!("spectrum.sweep[{i}]"), c)?;
        }
        if self.projector.method == ProjectorMethodKind::ClosedFormBasis
            && !matches!(self.model, ModelConfig::SoNVector { .. })
        {
            return Err(ConfigError::new(
                "projector.method",
                "closed_form_basis is only available for the so_n_vector model",
            ));
        }
        self.validate_quadrature()?;
        let s = &self.sampling;
        for (field, v) in [
            ("sampling.points", s.points),
            ("sampling.group_elements", s.group_elements),
            ("sampling.closed_form_points", s.closed_form_points),
            ("sampling.audit_points", s.audit_points),
        ] {
            if v == 0 {
                return Err(ConfigError::new(field, "must be positive"));
            }
        }
        for (field, v) in [("sampling.max_uv", s.max_uv), ("sampling.point_scale", s.point_scale)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(field, "must be positive"));
            }
        }
        let e = &self.evolution;
        if !(e.time.is_finite() && e.time > 0.0) {
            return Err(ConfigError::new("evolution.time", "must be positive"));
        }
        if e.slices.len() < 2 || e.slices.contains(&0) {
            return Err(ConfigError::new(
                "evolution.slices",
                "needs at least two positive slice counts",
            ));
        }
        if e.pointwise_epsilons.len() < 2 || e.pointwise_epsilons.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(ConfigError::new(
                "evolution.pointwise_epsilons",
                "needs at least two positive slice lengths",
            ));
        }
        if e.pointwise_points == 0 {
            return Err(ConfigError::new("evolution.pointwise_points", "must be positive"));
        }
        for (name, v) in self.tolerances.entries() {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(format!("tolerances.{name}"), "must be positive"));
            }
        }
        let t = &self.tolerances;
        if t.global_order_min > t.global_order_max {
            return Err(ConfigError::new("tolerances.global_order_min", "exceeds global_order_max"));
        }
        if t.local_order_min > t.local_order_max {
            return Err(ConfigError::new("tolerances.local_order_min", "exceeds local_order_max"));
        }
        Ok(())
    }

    fn validate_quadrature(&self) -> Result<(), ConfigError> {
        let group = self.group();
        match (&self.quadrature, group) {
            (QuadratureConfig::Exact {}, GaugeGroup::SO(n)) if n > 3 => Err(ConfigError::new(
                "quadrature.rule",
                format!("no deterministic exact rule for SO({n}); use monte_carlo"),
            )),
            (QuadratureConfig::Trapezoid { points }, GaugeGroup::SO(n)) => {
                if n != 2 {
                    Err(ConfigError::new("quadrature.rule", "trapezoid is the SO(2) rule"))
                } else if *points == 0 {
                    Err(ConfigError::new("quadrature.points", "must be positive"))
                } else {
                    Ok(())
                }
            }
            (
                QuadratureConfig::EulerProduct {
                    angle_points,
                    beta_points,
                },
                GaugeGroup::SO(n),
            ) => {
                if n != 3 {
                    Err(ConfigError::new("quadrature.rule", "euler_product is the SO(3) rule"))
                } else if *angle_points == 0 || *beta_points == 0 {
                    Err(ConfigError::new("quadrature", "angle_points and beta_points must be positive"))
                } else {
                    Ok(())
                }
            }
            (QuadratureConfig::MonteCarlo { samples, seed }, _) => {
                if *samples == 0 {
                    Err(ConfigError::new("quadrature.samples", "must be positive"))
                } else if seed.is_none() {
                    Err(ConfigError::new("quadrature.seed", "required for the monte_carlo rule"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// The model with generators perturbed when requested.
    pub fn build_model(&self) -> crate::Result<GaugeModel> {
        self.build_model_at(self.cutoff)
    }

    pub fn build_model_at(&self, cutoff: usize) -> crate::Result<GaugeModel> {
        let (layout, rep, perturbation) = match &self.model {
            ModelConfig::SoNVector {
                n,
                generator_perturbation,
                ..
            } => (ModeLayout::Vector { n: *n }, *n, *generator_perturbation),
            ModelConfig::Su2Ym {
                generator_perturbation,
                ..
            } => (ModeLayout::Matrix { rows: 3, cols: 3 }, 3, *generator_perturbation),
        };
        let generators = perturbed_generators(rep, perturbation)?;
        GaugeModel::new(
            Arc::new(enumerate_basis(layout.num_modes(), cutoff)),
            generators,
            layout,
            self.potential(),
            self.group(),
        )
    }

    pub fn quadrature_rule(&self, model: &GaugeModel) -> crate::Result<HaarQuadrature> {
        match &self.quadrature {
            QuadratureConfig::Exact {} => HaarQuadrature::exact_for_model(model),
            QuadratureConfig::Trapezoid { points } => HaarQuadrature::so2_trapezoid(*points),
            QuadratureConfig::EulerProduct {
                angle_points,
                beta_points,
            } => HaarQuadrature::so3_euler(*angle_points, *beta_points),
            QuadratureConfig::MonteCarlo { samples, seed } => {
                let GaugeGroup::SO(n) = self.group();
                HaarQuadrature::so_n_montecarlo(n, *samples, seed.unwrap_or(self.seed))
            }
        }
    }

    pub fn projector_method(&self, kind: ProjectorMethodKind, model: &GaugeModel) -> crate::Result<ProjectorMethod> {
        Ok(match kind {
            ProjectorMethodKind::Nullspace => ProjectorMethod::Nullspace,
            ProjectorMethodKind::GroupAverage => ProjectorMethod::GroupAverage(self.quadrature_rule(model)?),
            ProjectorMethodKind::ClosedFormBasis => ProjectorMethod::ClosedFormBasis,
        })
    }
}

fn perturbed_generators(n: usize, perturbation: f64) -> crate::Result<GeneratorSet> {
    let base = so_n_generators(n)?;
    if perturbation == 0.0 {
        return Ok(base);
    }
    let mut generators: Vec<DMatrix<f64>> = base.generators().to_vec();
    generators[0][(0, 1)] += perturbation;
    let len = base.len();
    let f = (0..len * len * len)
        .map(|i| base.f(i / (len * len), (i / len) % len, i % len))
        .collect();
    GeneratorSet::new_unchecked(generators, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_materialize_from_minimal_file() {
        let cfg = RunConfig::from_toml_str("cutoff = 4\n[model]\ntype = \"so_n_vector\"\nn = 3\n").unwrap();
        assert_eq!(cfg.cutoff, 4);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.potential(), PotentialSpec::Harmonic);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::from_toml_str("cutof = 4\n").is_err());
        assert!(RunConfig::from_toml_str("[quadrature]\nrule = \"exact\"\nseed = 3\n").is_err());
    }

    #[test]
    fn monte_carlo_needs_seed() {
        let mut cfg = RunConfig::from_toml_str(
            "[model]\ntype = \"so_n_vector\"\nn = 4\n[quadrature]\nrule = \"monte_carlo\"\nsamples = 10\n",
        )
        .unwrap();
        cfg.cutoff = 4;
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.field, "quadrature.seed");
        cfg.apply(&Overrides {
            seed: Some(5),
            ..Default::default()
        });
        cfg.validate().unwrap();
    }

    #[test]
    fn field_level_messages() {
        let mut cfg = RunConfig::default();
        cfg.tolerances.spectrum = -1.0;
        assert_eq!(cfg.validate().unwrap_err().field, "tolerances.spectrum");
        let mut cfg = RunConfig::default();
        cfg.cutoff = 1;
        assert_eq!(cfg.validate().unwrap_err().field, "cutoff");
        let mut cfg = RunConfig::default();
        cfg.model = ModelConfig::Su2Ym {
            coupling: 1.0,
            generator_perturbation: 0.0,
        };
        cfg.cutoff = 8;
        assert!(cfg.validate().unwrap_err().message.contains("max_dimension"));
    }

    #[test]
    fn round_trip_through_toml() {
        let cfg = RunConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn perturbation_breaks_antisymmetry() {
        let mut cfg = RunConfig::default();
        cfg.model = ModelConfig::SoNVector {
            n: 3,
            potential: PotentialSpec::Harmonic,
            generator_perturbation: 0.1,
        };
        let model = cfg.build_model().unwrap();
        assert!(model.generators().antisymmetry_defect() > 0.05);
    }
}
