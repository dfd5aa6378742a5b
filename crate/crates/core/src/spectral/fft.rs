//! Unnormalized 3D complex FFT on an `n³` row-major cube.
//!
//! Each axis pass transforms the contiguous axis as a batch and then rotates
//! the cube `[a][b][c] -> [c][a][b]`, so three passes return to the original
//! layout.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

pub(crate) fn plan(n: usize) -> Arc<Fft3> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    /// `X(k) = Σ_x x e^{-ik·x}` without normalization.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(&*self.forward, data);
    }

    /// `x = Σ_k X(k) e^{ik·x}` without normalization.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(&*self.inverse, data);
    }

    fn run(&self, fft: &dyn Fft<f64>, data: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(data.len(), n * n * n);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut rotated = vec![Complex64::default(); data.len()];
        for _ in 0..3 {
            fft.process_with_scratch(data, &mut scratch);
            rotate(data, &mut rotated, n);
            data.copy_from_slice(&rotated);
        }
    }
}

fn rotate(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    let nn = n * n;
    for a in 0..n {
        for b in 0..n {
            let row = &src[a * nn + b * n..a * nn + b * n + n];
            for (c, &v) in row.iter().enumerate() {
                dst[c * nn + a * n + b] = v;
            }
        }
    }
}
