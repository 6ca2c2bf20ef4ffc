//! Ready-made experiments on the synthetic scenes.

use std::path::PathBuf;

use toposnake_core::energy::EnergyWeights;
use toposnake_core::levelset::InitSpec;
use toposnake_core::regularize::EdgeParams;
use toposnake_core::repulsion::RepulsionParams;
use toposnake_core::solver::aos::AosParams;
use toposnake_core::solver::splitbregman::{SolverParams, WMode};

use crate::config::{ExperimentConfig, Input, Scene, SolverKind};

/// Edge map used by every preset: high contrast, so only true edges stop
/// the balloon.
pub fn edge_params() -> EdgeParams {
    EdgeParams::new(1000.0, 1.0, 2).expect("valid edge parameters")
}

fn weights(gamma: f64, alpha: f64, beta: f64, mu: f64) -> EnergyWeights {
    EnergyWeights::new(gamma, alpha, beta, mu).expect("valid weights")
}

fn sb(weights: EnergyWeights, d: f64, tau: f64, tol: f64) -> SolverParams {
    SolverParams {
        weights,
        rep: RepulsionParams::new(d, 2).expect("valid repulsion"),
        tau,
        tol_outer: tol,
        ..SolverParams::default()
    }
}

fn aos_like(p: &SolverParams) -> AosParams {
    AosParams {
        weights: p.weights,
        reg: p.reg,
        rep: p.rep,
        tau: p.tau,
        outer_iters: p.outer_iters,
        tol: p.tol_outer,
        ..AosParams::default()
    }
}

/// One rectangle enclosing both disks with a 6 px margin.
pub fn two_circles_init() -> InitSpec {
    InitSpec::Rectangle {
        corner_a: (36.0, 12.5),
        corner_b: (92.0, 116.5),
    }
}

pub fn preset(scene: Scene) -> ExperimentConfig {
    let (params, init) = match scene {
        Scene::TwoCircles => (
            sb(weights(4.0, 4.0, 0.2, 8.0), 5.0, 0.1, 1e-5),
            two_circles_init(),
        ),
        Scene::Hand => (
            sb(weights(5.0, 4.5, 0.3, 8.0), 4.0, 0.05, 1e-6),
            InitSpec::Threshold { level: 0.55 },
        ),
        Scene::Cells => (
            sb(weights(5.0, 4.5, 0.25, 9.0), 4.0, 0.02, 1e-6),
            InitSpec::Threshold { level: 0.55 },
        ),
        Scene::Grains => (
            sb(weights(5.0, 5.0, 0.25, 8.0), 4.0, 0.02, 1e-6),
            InitSpec::Threshold { level: 0.55 },
        ),
    };
    ExperimentConfig {
        input: Input::Synthetic(scene),
        init,
        edge: edge_params(),
        solver: SolverKind::SplitBregman,
        split_bregman: params,
        w_mode: WMode::Threshold,
        aos: aos_like(&params),
        out: PathBuf::from("out"),
    }
}
