use rand::{rngs::StdRng, Rng, SeedableRng};

use toposnake_core::energy::repulsion_energy;
use toposnake_core::regularize::RegularizerParams;
use toposnake_core::repulsion::{nonlocal_vector, repulsion_force, RepulsionParams};
use toposnake_core::{GridDims, ScalarField, VectorField2};

const BETA: f64 = 0.2;

/// Worst relative error between the analytic force and the negated central
/// difference of `β E_r`, over band pixels with a non-negligible gradient.
fn worst_error(seed: u64) -> (f64, usize) {
    let dims = GridDims::new(8, 8).unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    let reg = RegularizerParams::default();
    let rep = RepulsionParams::default();
    let mut phi = ScalarField::from_fn(dims, |_, _| rng.gen_range(-2.5..2.5));
    let w = VectorField2::from_fn(dims, |_, _| {
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        (t.cos(), t.sin())
    });
    let v = nonlocal_vector(&w, &phi, &rep, &reg).unwrap();
    let force = repulsion_force(&phi, &w, &v, BETA, &reg).unwrap();
    let step = 1e-6;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for k in 0..dims.len() {
        let x = phi.as_slice()[k];
        if x.abs() >= reg.band_reach() {
            continue;
        }
        phi.as_mut_slice()[k] = x + step;
        let up = BETA * repulsion_energy(&phi, &w, &rep, &reg).unwrap();
        phi.as_mut_slice()[k] = x - step;
        let down = BETA * repulsion_energy(&phi, &w, &rep, &reg).unwrap();
        phi.as_mut_slice()[k] = x;
        let fd = -(up - down) / (2.0 * step);
        if fd.abs() <= 1e-6 {
            continue;
        }
        checked += 1;
        worst = worst.max((force.as_slice()[k] - fd).abs() / fd.abs());
    }
    (worst, checked)
}

#[test]
fn analytic_force_matches_finite_differences() {
    let mut total = 0;
    for seed in 0..10 {
        let (err, checked) = worst_error(seed);
        total += checked;
        assert!(err <= 1e-3, "instance {seed}: relative error {err}");
    }
    assert!(total > 50, "only {total} pixels checked");
}
