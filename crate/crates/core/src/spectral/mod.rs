//! Discrete Fourier representation of real periodic vector fields on the
//! cube `[0, 2π)³`.
//!
//! Spectral coefficients are stored for the full `n³` lattice with the
//! forward transform carrying the `n⁻³` factor:
//!
//! ```text
//! c(k) = n⁻³ Σ_x f(x) e^{-ik·x},     f(x) = Σ_k c(k) e^{ik·x}
//! ```
//!
//! Index `i` on an axis maps to wavenumber `i` for `i < n/2` and `i - n`
//! otherwise, so the Nyquist index carries `-n/2`. Operators that are odd in
//! `k` (derivatives, divergence, the Leray projector, pressure) use a zero
//! wavenumber on a Nyquist axis; otherwise the partner `-k` of a Nyquist mode
//! would not see the negated wavevector and Hermitian symmetry would break.
//! Even operators (`|k|^s`, diffusion, norms) use `|k_i| = n/2`.

mod fft;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) use fft::plan;

pub const TWO_PI: f64 = 2.0 * PI;

/// Periodic cubic lattice with `n` points per axis on `[0, 2π)³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "grid n must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Grid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of lattice points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        TWO_PI / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Volume of the periodic box, `(2π)³`.
    pub fn volume(&self) -> f64 {
        TWO_PI.powi(3)
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n + i[1]) * self.n + i[2]
    }

    pub fn indices(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Integer wavevector stored at a flat index.
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let [a, b, c] = self.indices(idx);
        [self.wavenumber(a), self.wavenumber(b), self.wavenumber(c)]
    }

    /// Flat index storing the wavevector `k` (taken modulo `n`).
    pub fn index_of_mode(&self, k: [i64; 3]) -> usize {
        let n = self.n as i64;
        let w = |x: i64| x.rem_euclid(n) as usize;
        self.index([w(k[0]), w(k[1]), w(k[2])])
    }

    /// Flat index of the Hermitian partner `-k`.
    pub fn conj_index(&self, idx: usize) -> usize {
        let n = self.n;
        let [a, b, c] = self.indices(idx);
        let neg = |x: usize| (n - x) % n;
        self.index([neg(a), neg(b), neg(c)])
    }

    /// `|k|²` with Nyquist components counted as `n/2`.
    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.mode(idx);
        k.iter().map(|&x| (x * x) as f64).sum()
    }

    /// Wavevector used by first-derivative operators; Nyquist components are 0.
    pub fn derivative_wavevector(&self, idx: usize) -> [f64; 3] {
        let half = self.n as i64 / 2;
        let k = self.mode(idx);
        k.map(|x| if x == -half { 0.0 } else { x as f64 })
    }

    /// Physical coordinates of node `idx`, `2π (i, j, l) / n`.
    pub fn node(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        self.indices(idx).map(|i| i as f64 * h)
    }

    /// True if every component satisfies the 2/3-rule band `3|k_i| <= n`.
    pub fn is_resolved(&self, k: [i64; 3]) -> bool {
        k.iter().all(|&x| 3 * x.unsigned_abs() as usize <= self.n)
    }
}

/// Complex Fourier coefficients of a real 3-component field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVectorField {
    grid: Grid,
    comps: [Vec<Complex64>; 3],
}

impl SpectralVectorField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![Complex64::default(); grid.len()];
        SpectralVectorField {
            grid,
            comps: [z.clone(), z.clone(), z],
        }
    }

    pub fn from_components(grid: Grid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Shape(format!(
                "spectral components must have {} coefficients",
                grid.len()
            )));
        }
        Ok(SpectralVectorField { grid, comps })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    pub fn coeff(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn coeff_at(&self, k: [i64; 3]) -> [Complex64; 3] {
        self.coeff(self.grid.index_of_mode(k))
    }

    /// Sets the coefficient at `k` and its conjugate at `-k`. Self-conjugate
    /// modes keep only the real part.
    pub fn set_mode(&mut self, k: [i64; 3], v: [Complex64; 3]) {
        let idx = self.grid.index_of_mode(k);
        let cidx = self.grid.conj_index(idx);
        for (comp, vc) in self.comps.iter_mut().zip(v) {
            if idx == cidx {
                comp[idx] = Complex64::new(vc.re, 0.0);
            } else {
                comp[idx] = vc;
                comp[cidx] = vc.conj();
            }
        }
    }

    /// `max_k |c(k) - conj c(-k)|` over all components.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for comp in &self.comps {
            for (idx, v) in comp.iter().enumerate() {
                let partner = comp[self.grid.conj_index(idx)];
                worst = worst.max((v - partner.conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    /// `Σ_k |c(k)|²` summed over components.
    pub fn power_sum(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum()
    }

    pub fn mean(&self) -> [Complex64; 3] {
        self.coeff(0)
    }

    pub fn set_mean_zero(&mut self) {
        for c in &mut self.comps {
            c[0] = Complex64::default();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re == 0.0 && v.im == 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|_, v| v * a)
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_same_grid(self.grid, other.grid)?;
        let mut out = self.clone();
        for (dst, src) in out.comps.iter_mut().zip(&other.comps) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = *d * a + *s * b;
            }
        }
        Ok(out)
    }

    /// Applies `f(idx, coeff)` to every coefficient of every component.
    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for comp in &mut out.comps {
            for (idx, v) in comp.iter_mut().enumerate() {
                *v = f(idx, *v);
            }
        }
        out
    }

    /// Maximum relative difference `max|a-b| / max|a|`, falling back to the
    /// absolute difference when `self` is zero.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        let scale = self.max_abs();
        let mut worst = 0.0_f64;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).norm());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

/// Fourier coefficients of a real scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralScalarField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalarField {
    pub(crate) fn new(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralScalarField { grid, coeffs }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff_at(&self, k: [i64; 3]) -> Complex64 {
        self.coeffs[self.grid.index_of_mode(k)]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    pub fn to_physical(&self) -> Vec<f64> {
        inverse_single(self.grid, &self.coeffs)
    }
}

/// Real vector field sampled at the nodes `2π (i, j, l) / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalVectorField {
    grid: Grid,
    values: [Vec<f64>; 3],
}

impl PhysicalVectorField {
    pub fn zeros(grid: Grid) -> Self {
        let z = vec![0.0; grid.len()];
        PhysicalVectorField {
            grid,
            values: [z.clone(), z.clone(), z],
        }
    }

    pub fn from_components(grid: Grid, values: [Vec<f64>; 3]) -> Result<Self> {
        if values.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Shape(format!(
                "physical components must have {} values",
                grid.len()
            )));
        }
        Ok(PhysicalVectorField { grid, values })
    }

    /// Samples `f` at every lattice node.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.node(idx));
            for (comp, vc) in out.values.iter_mut().zip(v) {
                comp[idx] = vc;
            }
        }
        out
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.values
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        self.values
    }

    pub fn value(&self, idx: usize) -> [f64; 3] {
        [
            self.values[0][idx],
            self.values[1][idx],
            self.values[2][idx],
        ]
    }

    /// Euclidean magnitude at node `idx`.
    pub fn magnitude(&self, idx: usize) -> f64 {
        let [a, b, c] = self.value(idx);
        (a * a + b * b + c * c).sqrt()
    }

    pub fn max_magnitude(&self) -> f64 {
        (0..self.grid.len()).fold(0.0_f64, |m, i| m.max(self.magnitude(i)))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }
}

pub(crate) fn check_same_grid(a: Grid, b: Grid) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!(
            "grid mismatch: n={} vs n={}",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// Forward transform with the `n⁻³` normalization.
pub fn to_spectral(f: &PhysicalVectorField) -> Result<SpectralVectorField> {
    if !f.is_finite() {
        return Err(Error::InvalidField(
            "physical field contains non-finite values".into(),
        ));
    }
    let grid = f.grid;
    let (c0, c1) = forward_pair(grid, &f.values[0], &f.values[1]);
    let c2 = forward_single(grid, &f.values[2]);
    Ok(SpectralVectorField {
        grid,
        comps: [c0, c1, c2],
    })
}

/// Inverse transform. Hermitian symmetry is checked to `1e-12` of the
/// largest coefficient; the imaginary residue is discarded.
pub fn to_physical(g: &SpectralVectorField) -> Result<PhysicalVectorField> {
    let tolerance = 1e-12 * g.max_abs();
    let defect = g.hermitian_defect();
    if defect > tolerance {
        return Err(Error::Symmetry { defect, tolerance });
    }
    Ok(PhysicalVectorField {
        grid: g.grid,
        values: physical_components(g),
    })
}

/// Per-mode projection `v ↦ v - k(k·v)/|k|²` onto divergence-free fields.
pub fn leray_project(g: &SpectralVectorField) -> SpectralVectorField {
    let grid = g.grid;
    let mut out = g.clone();
    for idx in 1..grid.len() {
        let k = grid.derivative_wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let v = g.coeff(idx);
        let kv = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        for c in 0..3 {
            out.comps[c][idx] = v[c] - kv * k[c];
        }
    }
    out
}

/// Scales `c(k)` by `|k|^s`. The mean mode is left untouched for `s = 0` and
/// zeroed otherwise.
pub fn fractional_multiplier(g: &SpectralVectorField, s: f64) -> SpectralVectorField {
    if s == 0.0 {
        return g.clone();
    }
    let grid = g.grid;
    let half = s / 2.0;
    g.map(|idx, v| {
        if idx == 0 {
            Complex64::default()
        } else {
            v * grid.k_squared(idx).powf(half)
        }
    })
}

/// Zeroes every coefficient with some `|k_i| > n/3`.
pub fn dealias_two_thirds(g: &SpectralVectorField) -> SpectralVectorField {
    let mut out = g.clone();
    dealias_in_place(&mut out);
    out
}

pub(crate) fn dealias_in_place(g: &mut SpectralVectorField) {
    let grid = g.grid;
    let mask = dealias_mask(grid);
    for comp in &mut g.comps {
        for (v, &keep) in comp.iter_mut().zip(&mask) {
            if !keep {
                *v = Complex64::default();
            }
        }
    }
}

pub(crate) fn dealias_mask(grid: Grid) -> Vec<bool> {
    (0..grid.len())
        .map(|idx| grid.is_resolved(grid.mode(idx)))
        .collect()
}

/// `max_k |k·c(k)|`, zero exactly for discretely solenoidal fields.
pub fn divergence_max(g: &SpectralVectorField) -> f64 {
    let grid = g.grid;
    let mut worst = 0.0_f64;
    for idx in 0..grid.len() {
        let k = grid.derivative_wavevector(idx);
        let v = g.coeff(idx);
        let d = v[0] * k[0] + v[1] * k[1] + v[2] * k[2];
        worst = worst.max(d.norm());
    }
    worst
}

// Real-data transform kernels. Two real arrays share one complex FFT; the
// split `F(k) = (Z(k) + conj Z(-k))/2` makes the outputs exactly Hermitian.

pub(crate) fn forward_pair(grid: Grid, f: &[f64], g: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut z: Vec<Complex64> = f
        .iter()
        .zip(g)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect();
    plan(grid.n()).forward(&mut z);
    let scale = 1.0 / grid.len() as f64;
    let mut a = vec![Complex64::default(); grid.len()];
    let mut b = vec![Complex64::default(); grid.len()];
    for idx in 0..grid.len() {
        let zk = z[idx];
        let zc = z[grid.conj_index(idx)].conj();
        a[idx] = (zk + zc) * (0.5 * scale);
        let d = (zk - zc) * (0.5 * scale);
        // divide by i
        b[idx] = Complex64::new(d.im, -d.re);
    }
    (a, b)
}

pub(crate) fn forward_single(grid: Grid, f: &[f64]) -> Vec<Complex64> {
    let mut z: Vec<Complex64> = f.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    plan(grid.n()).forward(&mut z);
    let scale = 1.0 / grid.len() as f64;
    (0..grid.len())
        .map(|idx| (z[idx] + z[grid.conj_index(idx)].conj()) * (0.5 * scale))
        .collect()
}

pub(crate) fn inverse_pair(grid: Grid, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| Complex64::new(x.re - y.im, x.im + y.re))
        .collect();
    plan(grid.n()).inverse(&mut z);
    z.into_iter().map(|v| (v.re, v.im)).unzip()
}

pub(crate) fn inverse_single(grid: Grid, a: &[Complex64]) -> Vec<f64> {
    let mut z = a.to_vec();
    plan(grid.n()).inverse(&mut z);
    z.into_iter().map(|v| v.re).collect()
}

pub(crate) fn physical_components(g: &SpectralVectorField) -> [Vec<f64>; 3] {
    let (v0, v1) = inverse_pair(g.grid, &g.comps[0], &g.comps[1]);
    let v2 = inverse_single(g.grid, &g.comps[2]);
    [v0, v1, v2]
}

/// Physical values of two fields, sharing FFTs across the six components.
pub(crate) fn physical_pair(
    a: &SpectralVectorField,
    b: &SpectralVectorField,
) -> (PhysicalVectorField, PhysicalVectorField) {
    let grid = a.grid;
    // keep an exactly zero field exactly zero
    if a.is_zero() || b.is_zero() {
        return (
            PhysicalVectorField {
                grid,
                values: physical_components(a),
            },
            PhysicalVectorField {
                grid,
                values: physical_components(b),
            },
        );
    }
    let mut pa: [Vec<f64>; 3] = Default::default();
    let mut pb: [Vec<f64>; 3] = Default::default();
    for c in 0..3 {
        let (x, y) = inverse_pair(grid, &a.comps[c], &b.comps[c]);
        pa[c] = x;
        pb[c] = y;
    }
    (
        PhysicalVectorField { grid, values: pa },
        PhysicalVectorField { grid, values: pb },
    )
}
