//! End-to-end runs: load, build the edge map, initialize, solve, report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};

use toposnake_core::contour::{extract_zero_level, Polyline};
use toposnake_core::energy::EnergyBreakdown;
use toposnake_core::levelset::init_level_set;
use toposnake_core::regularize::edge_detector;
use toposnake_core::solver::aos::Aos;
use toposnake_core::solver::splitbregman::SplitBregman;
use toposnake_core::solver::Termination;
use toposnake_core::topology::{count_regions, BinaryMask, Connectivity};
use toposnake_core::ScalarField;

use crate::config::{ExperimentConfig, SolverKind};
use crate::io::{save_mask, save_overlay};

/// Foreground regions are counted with 4-connectivity, the background with
/// 8-connectivity, so the two counts describe the same digital topology.
pub const INSIDE: Connectivity = Connectivity::Four;
pub const BACKGROUND: Connectivity = Connectivity::Eight;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionCounts {
    pub inside: usize,
    pub background: usize,
}

impl RegionCounts {
    pub fn of(phi: &ScalarField) -> Self {
        let mask = BinaryMask::inside(phi);
        Self {
            inside: count_regions(&mask, INSIDE),
            background: count_regions(&mask.complement(), BACKGROUND),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SegmentationReport {
    pub image: ScalarField,
    pub initial: ScalarField,
    pub phi: ScalarField,
    /// `{φ < 0}` of the final level set.
    pub mask: BinaryMask,
    pub polylines: Vec<Polyline>,
    pub initial_regions: RegionCounts,
    pub regions: RegionCounts,
    /// Region counts after every iteration.
    pub region_log: Vec<RegionCounts>,
    pub iterations: usize,
    pub termination: Termination,
    /// Energy of the initial state, then one entry per iteration.
    pub energy_log: Vec<EnergyBreakdown>,
    pub phi_change_log: Vec<f64>,
    /// Solver time, excluding loading and the edge map.
    pub wall_time: Duration,
    /// Largest `‖b‖∞` seen; split Bregman only.
    pub max_bregman: Option<f64>,
    /// Largest `||w| − 1|` over projected pixels of every `w` update; split
    /// Bregman only.
    pub max_unit_error: Option<f64>,
}

impl SegmentationReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SegmentationReport> {
    cfg.validate()?;
    let image = cfg.input.load().context("loading input")?;
    let g = edge_detector(&image, &cfg.edge).context("edge map")?;
    let initial =
        init_level_set(&cfg.init, image.dims(), Some(&image)).context("initialization")?;
    let initial_regions = RegionCounts::of(&initial);
    let mut region_log = Vec::new();
    let start = Instant::now();
    let (phi, iterations, termination, energy_log, phi_change_log, max_bregman, max_unit) =
        match cfg.solver {
            SolverKind::SplitBregman => {
                let mut max_b = 0.0f64;
                let mut max_unit = 0.0f64;
                let out = SplitBregman::new(image.dims(), cfg.split_bregman)
                    .and_then(|mut sb| {
                        sb.run_with(&g, initial.clone(), cfg.w_mode, |r| {
                            region_log.push(RegionCounts::of(&r.state.phi));
                            max_b = max_b.max(r.state.b.max_abs());
                            max_unit = max_unit.max(r.projection.max_unit_error);
                        })
                    })
                    .context("split Bregman solve")?;
                let s = out.state;
                (
                    s.phi,
                    s.k,
                    out.termination,
                    s.energy_log,
                    s.phi_change_log,
                    Some(max_b),
                    Some(max_unit),
                )
            }
            SolverKind::Aos => {
                let out = Aos::new(image.dims(), cfg.aos)
                    .and_then(|mut aos| {
                        aos.run_with(&g, initial.clone(), |_, phi| {
                            region_log.push(RegionCounts::of(phi))
                        })
                    })
                    .context("AOS solve")?;
                (
                    out.phi,
                    out.iterations,
                    out.termination,
                    out.energy_log,
                    out.phi_change_log,
                    None,
                    None,
                )
            }
        };
    let wall_time = start.elapsed();
    let mask = BinaryMask::inside(&phi);
    Ok(SegmentationReport {
        polylines: extract_zero_level(&phi),
        regions: RegionCounts::of(&phi),
        image,
        initial,
        phi,
        mask,
        initial_regions,
        region_log,
        iterations,
        termination,
        energy_log,
        phi_change_log,
        wall_time,
        max_bregman,
        max_unit_error: max_unit,
    })
}

/// `iter,E_g,E_a,E_r,E_penalty,E_total,rel_phi_change`; the initial row has
/// no change value.
pub fn energy_csv(r: &SegmentationReport) -> String {
    let mut s = String::from("iter,E_g,E_a,E_r,E_penalty,E_total,rel_phi_change\n");
    for (k, e) in r.energy_log.iter().enumerate() {
        let change = match k {
            0 => String::new(),
            _ => r.phi_change_log[k - 1].to_string(),
        };
        writeln!(
            s,
            "{k},{},{},{},{},{},{change}",
            e.geodesic, e.balloon, e.repulsion, e.penalty, e.total
        )
        .expect("writing to a string");
    }
    s
}

/// `polyline,vertex,row,col`, one line per vertex.
pub fn polylines_csv(lines: &[Polyline]) -> String {
    let mut s = String::from("polyline,vertex,row,col\n");
    for (p, line) in lines.iter().enumerate() {
        for (v, (r, c)) in line.points.iter().enumerate() {
            writeln!(s, "{p},{v},{r},{c}").expect("writing to a string");
        }
    }
    s
}

pub fn summary(r: &SegmentationReport) -> String {
    let d = r.phi.dims();
    let mut s = String::new();
    let mut line = |k: &str, v: String| writeln!(s, "{k}: {v}").expect("writing to a string");
    line("size", format!("{}x{}", d.rows(), d.cols()));
    line("iterations", r.iterations.to_string());
    line(
        "termination",
        match r.termination {
            Termination::Converged => "converged".into(),
            Termination::IterationCap => "iteration cap".into(),
        },
    );
    line(
        "final_rel_phi_change",
        r.phi_change_log
            .last()
            .map_or_else(|| "-".into(), |c| c.to_string()),
    );
    line(
        "inside_regions_initial",
        r.initial_regions.inside.to_string(),
    );
    line("inside_regions", r.regions.inside.to_string());
    line(
        "background_regions_initial",
        r.initial_regions.background.to_string(),
    );
    line("background_regions", r.regions.background.to_string());
    line("inside_pixels", r.mask.count().to_string());
    line("polylines", r.polylines.len().to_string());
    if let Some(e) = r.energy_log.last() {
        line("final_energy", e.total.to_string());
    }
    s
}

/// Writes the overlay, mask, contours, energy log and summary into `dir`.
/// Every file except `timing.txt` depends only on the configuration.
pub fn write_outputs(r: &SegmentationReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    save_overlay(&dir.join("overlay.png"), &r.image, &r.mask)?;
    save_mask(&dir.join("mask.png"), &r.mask)?;
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        fs::write(&p, text).with_context(|| format!("cannot write {}", p.display()))
    };
    write("contours.csv", polylines_csv(&r.polylines))?;
    write("energy.csv", energy_csv(r))?;
    write("summary.txt", summary(r))?;
    let secs = r.wall_time.as_secs_f64();
    write(
        "timing.txt",
        format!(
            "wall_time_s: {secs:.3}\nper_iteration_ms: {:.3}\n",
            1e3 * secs / r.iterations.max(1) as f64
        ),
    )?;
    Ok(())
}
