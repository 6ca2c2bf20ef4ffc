//! Complex FFTs for arbitrary lengths: iterative radix-2 for powers of two,
//! Bluestein's chirp-z for everything else. Inverse transforms are
//! unnormalized.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use num_complex::Complex64;

#[derive(Debug, Clone)]
struct Radix2 {
    n: usize,
    /// Twiddles of all stages back to back: for a stage of half-length `h`,
    /// `exp(-iπk/h)` for `k < h`, starting at offset `h − 1`.
    twiddles: Vec<Complex64>,
    /// Bit-reversal swap pairs `(i, j)` with `i < j`.
    swaps: Vec<(u32, u32)>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let mut twiddles = Vec::with_capacity(n.saturating_sub(1));
        let mut half = 1;
        while half < n {
            for k in 0..half {
                let (s, c) = libm::sincos(-PI * k as f64 / half as f64);
                twiddles.push(Complex64::new(c, s));
            }
            half <<= 1;
        }
        let bits = n.trailing_zeros();
        let swaps = (0..n)
            .filter_map(|i| {
                let j = if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                };
                (j > i).then_some((i as u32, j as u32))
            })
            .collect();
        Self { n, twiddles, swaps }
    }

    fn process(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        let buf = &mut buf[..n];
        for &(i, j) in &self.swaps {
            buf.swap(i as usize, j as usize);
        }
        for pair in buf.chunks_exact_mut(2) {
            let (a, b) = (pair[0], pair[1]);
            pair[0] = a + b;
            pair[1] = a - b;
        }
        let mut half = 2;
        while half < n {
            let tw = &self.twiddles[half - 1..2 * half - 1];
            for block in buf.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                if inverse {
                    for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                        let t = *b * w.conj();
                        *b = *a - t;
                        *a += t;
                    }
                } else {
                    for ((a, b), w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                        let t = *b * w;
                        *b = *a - t;
                        *a += t;
                    }
                }
            }
            half <<= 1;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    n: usize,
    inner: Radix2,
    /// `exp(-iπk²/n)` for `k < n`.
    chirp: Vec<Complex64>,
    /// Forward transform of the conjugate chirp, pre-scaled by `1/m`.
    kernel: Vec<Complex64>,
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = (2 * n - 1).next_power_of_two();
        let inner = Radix2::new(m);
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                // k² mod 2n keeps the angle small and exact
                let k2 = (k as u128 * k as u128 % (2 * n as u128)) as f64;
                let (s, c) = libm::sincos(-PI * k2 / n as f64);
                Complex64::new(c, s)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        inner.process(&mut kernel, false);
        let scale = 1.0 / m as f64;
        kernel.iter_mut().for_each(|x| *x *= scale);
        Self {
            n,
            inner,
            chirp,
            kernel,
        }
    }

    fn process(&self, buf: &mut [Complex64], inverse: bool, scratch: &mut [Complex64]) {
        let m = self.inner.n;
        let scratch = &mut scratch[..m];
        for (k, s) in scratch.iter_mut().enumerate() {
            *s = if k < self.n {
                let x = if inverse { buf[k].conj() } else { buf[k] };
                x * self.chirp[k]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        self.inner.process(scratch, false);
        for (s, k) in scratch.iter_mut().zip(&self.kernel) {
            *s *= k;
        }
        self.inner.process(scratch, true);
        for k in 0..self.n {
            let x = scratch[k] * self.chirp[k];
            buf[k] = if inverse { x.conj() } else { x };
        }
    }
}

#[derive(Debug, Clone)]
enum Plan {
    Radix2(Radix2),
    Bluestein(Bluestein),
}

/// One-dimensional transform of a fixed length.
#[derive(Debug, Clone)]
pub struct Fft {
    plan: Plan,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "FFT length must be positive");
        let plan = if n.is_power_of_two() {
            Plan::Radix2(Radix2::new(n))
        } else {
            Plan::Bluestein(Bluestein::new(n))
        };
        Self { plan }
    }

    pub fn len(&self) -> usize {
        match &self.plan {
            Plan::Radix2(r) => r.n,
            Plan::Bluestein(b) => b.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Scratch length required by [`Fft::process`].
    pub fn scratch_len(&self) -> usize {
        match &self.plan {
            Plan::Radix2(_) => 0,
            Plan::Bluestein(b) => b.inner.n,
        }
    }

    pub fn process(&self, buf: &mut [Complex64], inverse: bool, scratch: &mut [Complex64]) {
        match &self.plan {
            Plan::Radix2(r) => r.process(buf, inverse),
            Plan::Bluestein(b) => b.process(buf, inverse, scratch),
        }
    }
}

/// Row-major 2D transform; rows first, then columns.
#[derive(Debug, Clone)]
pub struct Fft2 {
    rows: usize,
    cols: usize,
    row_fft: Fft,
    col_fft: Fft,
    line: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let row_fft = Fft::new(cols);
        let col_fft = Fft::new(rows);
        let scratch_len = row_fft.scratch_len().max(col_fft.scratch_len());
        Self {
            rows,
            cols,
            row_fft,
            col_fft,
            line: vec![Complex64::new(0.0, 0.0); rows],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    /// Complex scalars held outside the caller's buffer.
    pub fn aux_len(&self) -> usize {
        self.line.len() + self.scratch.len()
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.process(data, false);
    }

    /// Unnormalized inverse.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.process(data, true);
    }

    fn process(&mut self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.rows * self.cols);
        for row in data.chunks_mut(self.cols) {
            self.row_fft.process(row, inverse, &mut self.scratch);
        }
        for j in 0..self.cols {
            for i in 0..self.rows {
                self.line[i] = data[i * self.cols + j];
            }
            self.col_fft
                .process(&mut self.line, inverse, &mut self.scratch);
            for i in 0..self.rows {
                data[i * self.cols + j] = self.line[i];
            }
        }
    }
}

/// 2D transform of real row-major data. Only the `cols / 2 + 1` leading
/// columns of the Hermitian spectrum are kept. Rows are transformed in
/// pairs packed as real and imaginary parts of one complex row.
#[derive(Debug, Clone)]
pub struct RealFft2 {
    rows: usize,
    cols: usize,
    row_fft: Fft,
    col_fft: Fft,
    row_buf: Vec<Complex64>,
    line: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl RealFft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let row_fft = Fft::new(cols);
        let col_fft = Fft::new(rows);
        let scratch_len = row_fft.scratch_len().max(col_fft.scratch_len());
        Self {
            rows,
            cols,
            row_fft,
            col_fft,
            row_buf: vec![Complex64::new(0.0, 0.0); cols],
            line: vec![Complex64::new(0.0, 0.0); rows],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    /// Width of the stored half spectrum.
    pub fn half_cols(&self) -> usize {
        self.cols / 2 + 1
    }

    /// Length of the spectrum buffer, `rows × half_cols`.
    pub fn spectrum_len(&self) -> usize {
        self.rows * self.half_cols()
    }

    /// Complex scalars held besides the spectrum.
    pub fn aux_len(&self) -> usize {
        self.row_buf.len() + self.line.len() + self.scratch.len()
    }

    pub fn forward(&mut self, input: &[f64], spectrum: &mut [Complex64]) {
        let (rows, cols, hc) = (self.rows, self.cols, self.half_cols());
        assert_eq!(input.len(), rows * cols);
        assert_eq!(spectrum.len(), rows * hc);
        let mut i = 0;
        while i < rows {
            let pair = i + 1 < rows;
            for j in 0..cols {
                let im = if pair { input[(i + 1) * cols + j] } else { 0.0 };
                self.row_buf[j] = Complex64::new(input[i * cols + j], im);
            }
            self.row_fft
                .process(&mut self.row_buf, false, &mut self.scratch);
            for l in 0..hc {
                let z = self.row_buf[l];
                let zc = self.row_buf[(cols - l) % cols].conj();
                spectrum[i * hc + l] = (z + zc) * 0.5;
                if pair {
                    // (z − z̄') / 2i
                    let d = (z - zc) * 0.5;
                    spectrum[(i + 1) * hc + l] = Complex64::new(d.im, -d.re);
                }
            }
            i += 2;
        }
        self.columns(spectrum, false);
    }

    /// Unnormalized inverse; `spectrum` is used as scratch.
    pub fn inverse(&mut self, spectrum: &mut [Complex64], output: &mut [f64]) {
        let (rows, cols, hc) = (self.rows, self.cols, self.half_cols());
        assert_eq!(output.len(), rows * cols);
        assert_eq!(spectrum.len(), rows * hc);
        self.columns(spectrum, true);
        let mut i = 0;
        while i < rows {
            let pair = i + 1 < rows;
            let zero = Complex64::new(0.0, 0.0);
            for l in 0..cols {
                let (a, b) = if l < hc {
                    let b = if pair {
                        spectrum[(i + 1) * hc + l]
                    } else {
                        zero
                    };
                    (spectrum[i * hc + l], b)
                } else {
                    let m = cols - l;
                    let b = if pair {
                        spectrum[(i + 1) * hc + m].conj()
                    } else {
                        zero
                    };
                    (spectrum[i * hc + m].conj(), b)
                };
                // a + i b
                self.row_buf[l] = Complex64::new(a.re - b.im, a.im + b.re);
            }
            self.row_fft
                .process(&mut self.row_buf, true, &mut self.scratch);
            for j in 0..cols {
                output[i * cols + j] = self.row_buf[j].re;
                if pair {
                    output[(i + 1) * cols + j] = self.row_buf[j].im;
                }
            }
            i += 2;
        }
    }

    fn columns(&mut self, spectrum: &mut [Complex64], inverse: bool) {
        let hc = self.half_cols();
        for l in 0..hc {
            for i in 0..self.rows {
                self.line[i] = spectrum[i * hc + l];
            }
            self.col_fft
                .process(&mut self.line, inverse, &mut self.scratch);
            for i in 0..self.rows {
                spectrum[i * hc + l] = self.line[i];
            }
        }
    }
}
