//! Independent reference implementations checked against the library.

use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use toposnake_core::fft::{Complex64, Fft, RealFft2};
use toposnake_core::grid::{divergence_backward, gradient_forward};
use toposnake_core::regularize::RegularizerParams;
use toposnake_core::repulsion::{nonlocal_vector, RepulsionParams};
use toposnake_core::topology::{count_regions, BinaryMask, Connectivity};
use toposnake_core::tridiag::{thomas_solve, TridiagonalSystem};
use toposnake_core::{GridDims, ScalarField, VectorField2};

/// Dense Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn densify(sys: &TridiagonalSystem) -> Vec<Vec<f64>> {
    let n = sys.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = sys.diag[i];
        if i + 1 < n {
            a[i][i + 1] = sys.sup[i];
            a[i + 1][i] = sys.sub[i];
        }
    }
    a
}

fn random_dominant(rng: &mut StdRng, n: usize) -> TridiagonalSystem {
    let sub: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sup: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag = (0..n)
        .map(|i| {
            let l = if i > 0 { sub[i - 1].abs() } else { 0.0 };
            let u = if i + 1 < n { sup[i].abs() } else { 0.0 };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            sign * (l + u + rng.gen_range(0.01..2.0))
        })
        .collect();
    let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    TridiagonalSystem {
        sub,
        diag,
        sup,
        rhs,
    }
}

#[test]
fn thomas_three_by_three_matches_dense_elimination() {
    let sys = TridiagonalSystem {
        sub: vec![-1.0, -1.0],
        diag: vec![3.0, 3.0, 3.0],
        sup: vec![-1.0, -1.0],
        rhs: vec![1.0, 2.0, 3.0],
    };
    let x = thomas_solve(&sys).unwrap();
    let y = dense_solve(densify(&sys), sys.rhs.clone());
    for (a, b) in x.iter().zip(&y) {
        assert!((a - b).abs() <= 1e-14, "{a} vs {b}");
    }
}

#[test]
fn thomas_random_dominant_systems() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let sys = random_dominant(&mut rng, 64);
        let x = thomas_solve(&sys).unwrap();
        let residual = sys
            .apply(&x)
            .iter()
            .zip(&sys.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(residual <= 1e-12, "residual {residual}");
        let y = dense_solve(densify(&sys), sys.rhs.clone());
        let scale = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn thomas_identity_returns_rhs() {
    let sys = TridiagonalSystem {
        sub: vec![0.0; 4],
        diag: vec![1.0; 5],
        sup: vec![0.0; 4],
        rhs: vec![1.5, -2.0, 0.0, 7.25, 3.0],
    };
    assert_eq!(thomas_solve(&sys).unwrap(), sys.rhs);
}

/// The plain double loop over the truncated window.
fn brute_force_nonlocal(
    w: &VectorField2,
    phi: &ScalarField,
    d: f64,
    half: isize,
    reg: &RegularizerParams,
) -> (Vec<f64>, Vec<f64>) {
    let dims = phi.dims();
    let (rows, cols) = (dims.rows() as isize, dims.cols() as isize);
    let mut v1 = vec![0.0; dims.len()];
    let mut v2 = vec![0.0; dims.len()];
    for i in 0..rows {
        for j in 0..cols {
            let (mut a1, mut a2) = (0.0, 0.0);
            for p in -half..=half {
                for q in -half..=half {
                    let (ii, jj) = (i + p, j + q);
                    if ii < 0 || jj < 0 || ii >= rows || jj >= cols {
                        continue;
                    }
                    let (ii, jj) = (ii as usize, jj as usize);
                    let kernel = libm::exp(-((p * p + q * q) as f64) / (d * d));
                    let h = reg.narrow_band(phi.get(ii, jj));
                    let (w1, w2) = w.get(ii, jj);
                    a1 += kernel * (w1 * h);
                    a2 += kernel * (w2 * h);
                }
            }
            v1[(i * cols + j) as usize] = a1;
            v2[(i * cols + j) as usize] = a2;
        }
    }
    (v1, v2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonlocal_vector_equals_double_loop_exactly(
        rows in 3usize..14,
        cols in 3usize..14,
        half in 1usize..4,
        d in 0.5f64..6.0,
        seed in any::<u64>(),
        spread in 0.5f64..6.0,
    ) {
        let dims = GridDims::new(rows, cols).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let phi = ScalarField::from_fn(dims, |_, _| rng.gen_range(-spread..spread));
        let w = VectorField2::from_fn(dims, |_, _| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let reg = RegularizerParams::default();
        let rep = RepulsionParams::new(d, half).unwrap();
        let v = nonlocal_vector(&w, &phi, &rep, &reg).unwrap();
        let (b1, b2) = brute_force_nonlocal(&w, &phi, d, half as isize, &reg);
        prop_assert_eq!(v.channel1(), &b1[..]);
        prop_assert_eq!(v.channel2(), &b2[..]);
    }

    #[test]
    fn gradient_and_divergence_are_adjoint(
        rows in 3usize..12,
        cols in 3usize..12,
        seed in any::<u64>(),
    ) {
        let dims = GridDims::new(rows, cols).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let phi = ScalarField::from_fn(dims, |_, _| rng.gen_range(-1.0..1.0));
        let v = VectorField2::from_fn(dims, |_, _| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let grad = gradient_forward(&phi).unwrap();
        let div = divergence_backward(&v).unwrap();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut scale = 0.0;
        for i in 0..rows {
            for j in 0..cols {
                let (g1, g2) = grad.get(i, j);
                let (v1, v2) = v.get(i, j);
                lhs += g1 * v1 + g2 * v2;
                rhs -= phi.get(i, j) * div.get(i, j);
                scale += (g1 * v1).abs() + (g2 * v2).abs();
            }
        }
        prop_assert!((lhs - rhs).abs() <= 1e-14 * scale.max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn count_regions_equals_flood_fill(
        rows in 3usize..24,
        cols in 3usize..24,
        density in 0.1f64..0.9,
        seed in any::<u64>(),
    ) {
        let dims = GridDims::new(rows, cols).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let cells: Vec<bool> = (0..dims.len()).map(|_| rng.gen_bool(density)).collect();
        let mask = BinaryMask::from_fn(dims, |i, j| cells[i * cols + j]);
        for (conn, eight) in [(Connectivity::Four, false), (Connectivity::Eight, true)] {
            prop_assert_eq!(count_regions(&mask, conn), flood_fill_count(&cells, rows, cols, eight));
        }
    }
}

/// Depth-first flood fill with an explicit stack.
fn flood_fill_count(cells: &[bool], rows: usize, cols: usize, eight: bool) -> usize {
    let mut seen = vec![false; cells.len()];
    let mut count = 0;
    let steps: &[(isize, isize)] = if eight {
        &[
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ]
    } else {
        &[(-1, 0), (1, 0), (0, -1), (0, 1)]
    };
    for start in 0..cells.len() {
        if !cells[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(k) = stack.pop() {
            let (i, j) = ((k / cols) as isize, (k % cols) as isize);
            for &(di, dj) in steps {
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 || ni >= rows as isize || nj >= cols as isize {
                    continue;
                }
                let n = ni as usize * cols + nj as usize;
                if cells[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
    }
    count
}

#[test]
fn flood_fill_reference_on_fixed_masks() {
    // diagonal pair: two 4-regions, one 8-region
    let cells = [true, false, false, true];
    assert_eq!(flood_fill_count(&cells, 2, 2, false), 2);
    assert_eq!(flood_fill_count(&cells, 2, 2, true), 1);
}

#[test]
fn fft_matches_rustfft() {
    let mut planner = FftPlanner::<f64>::new();
    let mut rng = StdRng::seed_from_u64(11);
    for n in [1usize, 2, 7, 16, 45, 64, 100, 128, 131] {
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let ours = Fft::new(n);
        let mut scratch = vec![Complex64::new(0.0, 0.0); ours.scratch_len()];
        for inverse in [false, true] {
            let mut a = x.clone();
            ours.process(&mut a, inverse, &mut scratch);
            let mut b: Vec<Complex<f64>> = x.iter().map(|z| Complex::new(z.re, z.im)).collect();
            if inverse {
                planner.plan_fft_inverse(n).process(&mut b);
            } else {
                planner.plan_fft_forward(n).process(&mut b);
            }
            for (p, q) in a.iter().zip(&b) {
                assert!(
                    (p.re - q.re).abs() < 1e-10 && (p.im - q.im).abs() < 1e-10,
                    "n={n}"
                );
            }
        }
    }
}

#[test]
fn real_two_dimensional_fft_matches_rustfft() {
    let mut planner = FftPlanner::<f64>::new();
    let mut rng = StdRng::seed_from_u64(5);
    for (rows, cols) in [(64, 64), (30, 45), (7, 12), (128, 96)] {
        let x: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // reference: rows then columns with rustfft
        let mut full: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        let row_plan = planner.plan_fft_forward(cols);
        for row in full.chunks_mut(cols) {
            row_plan.process(row);
        }
        let col_plan = planner.plan_fft_forward(rows);
        let mut line = vec![Complex::new(0.0, 0.0); rows];
        for j in 0..cols {
            for i in 0..rows {
                line[i] = full[i * cols + j];
            }
            col_plan.process(&mut line);
            for i in 0..rows {
                full[i * cols + j] = line[i];
            }
        }
        let mut ours = RealFft2::new(rows, cols);
        let hc = ours.half_cols();
        let mut spec = vec![Complex64::new(0.0, 0.0); ours.spectrum_len()];
        ours.forward(&x, &mut spec);
        for i in 0..rows {
            for l in 0..hc {
                let (a, b) = (spec[i * hc + l], full[i * cols + l]);
                assert!((a.re - b.re).abs() < 1e-9 && (a.im - b.im).abs() < 1e-9);
            }
        }
    }
}
