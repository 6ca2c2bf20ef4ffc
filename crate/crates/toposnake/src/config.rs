//! Experiment description, loadable from JSON.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use toposnake_core::levelset::InitSpec;
use toposnake_core::regularize::EdgeParams;
use toposnake_core::solver::aos::AosParams;
use toposnake_core::solver::splitbregman::{SolverParams, WMode};
use toposnake_core::synth;
use toposnake_core::{GridDims, ScalarField};

use crate::io::load_image;

/// Built-in synthetic scenes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scene {
    TwoCircles,
    Hand,
    /// 96×96, a 4×4 lattice of blobs.
    #[value(alias = "blobs")]
    Cells,
    /// 128×128, a 6×6 lattice of blobs.
    Grains,
}

impl Scene {
    pub fn render(self) -> ScalarField {
        match self {
            Scene::TwoCircles => synth::two_circles_default(),
            Scene::Hand => synth::hand(),
            Scene::Cells => blobs(96, 4),
            Scene::Grains => blobs(128, 6),
        }
    }
}

fn blobs(side: usize, per_side: usize) -> ScalarField {
    synth::blobs(GridDims::new(side, side).expect("valid dims"), per_side)
        .expect("fixed layout is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Path(PathBuf),
    Synthetic(Scene),
}

impl Input {
    pub fn load(&self) -> Result<ScalarField> {
        match self {
            Input::Path(p) => load_image(p),
            Input::Synthetic(s) => Ok(s.render()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    #[value(name = "sb")]
    SplitBregman,
    Aos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub input: Input,
    pub init: InitSpec,
    #[serde(default)]
    pub edge: EdgeParams,
    #[serde(default)]
    pub solver: SolverKind,
    #[serde(default)]
    pub split_bregman: SolverParams,
    #[serde(default)]
    pub w_mode: WMode,
    #[serde(default)]
    pub aos: AosParams,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks what deserialization cannot: parameter ranges and that an
    /// input file exists.
    pub fn validate(&self) -> Result<()> {
        if let Input::Path(p) = &self.input {
            if !p.is_file() {
                bail!("input {} does not exist", p.display());
            }
        }
        let e = &self.edge;
        EdgeParams::with_radius(e.rho(), e.sigma(), e.power(), e.kernel_radius())
            .context("edge parameters")?;
        match self.solver {
            SolverKind::SplitBregman => self.split_bregman.validate(),
            SolverKind::Aos => self.aos.validate(),
        }
        .context("solver parameters")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_fills_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"input": {"synthetic": "two-circles"},
                "init": {"kind": "circle", "center": [64, 64], "radius": 50},
                "split_bregman": {"tau": 0.05, "weights": {"gamma": 5, "alpha": 4.5, "beta": 0.3, "mu": 8}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.solver, SolverKind::SplitBregman);
        assert_eq!(cfg.split_bregman.tau, 0.05);
        assert_eq!(cfg.split_bregman.inner_iters, 3);
        assert_eq!(cfg.split_bregman.weights.beta, 0.3);
        assert_eq!(cfg.out, PathBuf::from("out"));
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_fields_and_bad_values_are_rejected() {
        let extra = r#"{"input": {"synthetic": "hand"}, "init": {"kind": "threshold", "level": 0.5}, "bogus": 1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(extra).is_err());
        let neg = r#"{"input": {"synthetic": "hand"}, "init": {"kind": "threshold", "level": 0.5},
                      "split_bregman": {"tau": -1}}"#;
        let cfg: ExperimentConfig = serde_json::from_str(neg).unwrap();
        assert!(cfg.validate().is_err());
        let missing = r#"{"input": {"path": "/no/such/file.pgm"}, "init": {"kind": "threshold", "level": 0.5}}"#;
        let cfg: ExperimentConfig = serde_json::from_str(missing).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = crate::presets::preset(Scene::Hand);
        let back: ExperimentConfig = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
}
