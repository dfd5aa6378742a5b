//! Pseudo-spectral time integration of the Elsasser system
//!
//! ```text
//! ∂t W⁺ + (W⁻·∇)W⁺ = κΔW⁺ + λΔW⁻ - ∇P
//! ∂t W⁻ + (W⁺·∇)W⁻ = κΔW⁻ + λΔW⁺ - ∇P
//! ```
//!
//! Diffusion is integrated exactly per mode. The nonlinear terms are taken in
//! divergence form, dealiased with the 2/3 rule and projected onto
//! divergence-free fields. Time stepping is the integrating-factor Heun
//! scheme
//!
//! ```text
//! ũ      = E(u + dt N(u))
//! u(n+1) = E(u + dt/2 N(u)) + dt/2 N(ũ)
//! ```
//!
//! which is second order and exact when the nonlinearity vanishes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditions::{evaluate_all, ConditionParams, ConditionReport};
use crate::error::{Error, Result};
use crate::fields::{ElsasserState, FluidParams};
use crate::norms::MonitorSeries;
use crate::spectral::{
    check_same_grid, dealias_mask, forward_pair, forward_single, physical_pair, Grid,
    SpectralScalarField, SpectralVectorField,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub blowup_threshold: f64,
    pub monitor_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            t_end: 1.0,
            cfl_safety: 0.5,
            blowup_threshold: 1e6,
            monitor_every: 10,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Parameter(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::Parameter(format!(
                "cfl_safety must be in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::Parameter(format!(
                "blowup_threshold must be > 0, got {}",
                self.blowup_threshold
            )));
        }
        if self.monitor_every == 0 {
            return Err(Error::Parameter("monitor_every must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of steps of size `dt` that reach `t_end` from `t0`.
    pub fn steps_from(&self, t0: f64) -> usize {
        let span = self.t_end - t0;
        if span <= 0.0 {
            0
        } else {
            (span / self.dt).round() as usize
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BlowupDetected,
    CflViolation,
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::BlowupDetected => "blowup_detected",
            RunStatus::CflViolation => "cfl_violation",
        }
    }
}

/// Why a single step could not be taken.
#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum StepFailure {
    #[error("dt = {dt} exceeds the CFL limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("non-finite value during step")]
    NonFinite,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    /// Last state reached. For a CFL stop this is the state before the
    /// rejected step.
    pub final_state: ElsasserState,
    pub series: MonitorSeries,
    pub status: RunStatus,
    pub steps_taken: usize,
    /// Condition reports for the initial data.
    pub conditions: Vec<ConditionReport>,
}

/// Per-mode diffusion factors `(½(e_u + e_b), ½(e_u - e_b))` over one step.
///
/// In the `(u, B)` basis the propagator is diagonal with decay rates
/// `κ + λ` and `κ - λ`; mapped back to `(W⁺, W⁻)` it mixes the two fields
/// through the difference factor.
fn diffusion_factors(grid: Grid, params: &FluidParams, dt: f64) -> (Vec<f64>, Vec<f64>) {
    let nu_u = params.velocity_diffusivity();
    let nu_b = params.magnetic_diffusivity();
    (0..grid.len())
        .map(|idx| {
            let k2 = grid.k_squared(idx);
            let eu = (-nu_u * k2 * dt).exp();
            let eb = (-nu_b * k2 * dt).exp();
            (0.5 * (eu + eb), 0.5 * (eu - eb))
        })
        .unzip()
}

/// Exact solution of the linear part over `dt`.
pub fn diffusion_step(e: &ElsasserState, params: &FluidParams, dt: f64) -> ElsasserState {
    let grid = e.grid();
    let (sum, diff) = diffusion_factors(grid, params, dt);
    let mut wp = [0, 1, 2].map(|_| vec![Complex64::default(); grid.len()]);
    let mut wm = wp.clone();
    for c in 0..3 {
        let a = e.w_plus.component(c);
        let b = e.w_minus.component(c);
        for idx in 0..grid.len() {
            wp[c][idx] = a[idx] * sum[idx] + b[idx] * diff[idx];
            wm[c][idx] = a[idx] * diff[idx] + b[idx] * sum[idx];
        }
    }
    ElsasserState {
        w_plus: vector(grid, wp),
        w_minus: vector(grid, wm),
        time: e.time + dt,
    }
}

fn vector(grid: Grid, comps: [Vec<Complex64>; 3]) -> SpectralVectorField {
    SpectralVectorField::from_components(grid, comps).expect("component lengths match grid")
}

/// Dealiased spectral coefficients of `T_ij = a_i b_j`, plus the largest
/// pointwise magnitude of either field.
struct Products {
    t: [[Vec<Complex64>; 3]; 3],
    max_speed: f64,
}

fn products(
    a: &SpectralVectorField,
    b: &SpectralVectorField,
    mask: &[bool],
) -> std::result::Result<Products, StepFailure> {
    let grid = a.grid();
    let (pa, pb) = physical_pair(a, b);
    if !pa.is_finite() || !pb.is_finite() {
        return Err(StepFailure::NonFinite);
    }
    let max_speed = pa.max_magnitude().max(pb.max_magnitude());
    let mut out: [[Vec<Complex64>; 3]; 3] = Default::default();

    let prod = |i: usize, j: usize| -> Vec<f64> {
        pa.component(i)
            .iter()
            .zip(pb.component(j))
            .map(|(x, y)| x * y)
            .collect()
    };
    let pairs = [
        (0, 0),
        (0, 1),
        (0, 2),
        (1, 0),
        (1, 1),
        (1, 2),
        (2, 0),
        (2, 1),
        (2, 2),
    ];
    for chunk in pairs.chunks(2) {
        if let [(i0, j0), (i1, j1)] = *chunk {
            let (x, y) = forward_pair(grid, &prod(i0, j0), &prod(i1, j1));
            out[i0][j0] = x;
            out[i1][j1] = y;
        } else {
            let (i, j) = chunk[0];
            out[i][j] = forward_single(grid, &prod(i, j));
        }
    }
    for row in &mut out {
        for comp in row.iter_mut() {
            for (v, &keep) in comp.iter_mut().zip(mask) {
                if !keep {
                    *v = Complex64::default();
                }
            }
        }
    }
    Ok(Products { t: out, max_speed })
}

/// Projected right-hand sides `(N⁺, N⁻)` with
/// `N⁺ = -P[(W⁻·∇)W⁺]` and `N⁻ = -P[(W⁺·∇)W⁻]`, and the peak speed.
fn rhs(
    w_plus: &SpectralVectorField,
    w_minus: &SpectralVectorField,
    mask: &[bool],
) -> std::result::Result<(SpectralVectorField, SpectralVectorField, f64), StepFailure> {
    let grid = w_plus.grid();
    let Products { t, max_speed } = products(w_plus, w_minus, mask)?;
    let mut np = [0, 1, 2].map(|_| vec![Complex64::default(); grid.len()]);
    let mut nm = np.clone();
    for idx in 0..grid.len() {
        if !mask[idx] {
            continue;
        }
        let k = grid.derivative_wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        // (W⁻·∇)W⁺_i = ∂_j T_ij and (W⁺·∇)W⁻_i = ∂_j T_ji
        let mut vp = [Complex64::default(); 3];
        let mut vm = [Complex64::default(); 3];
        for i in 0..3 {
            for j in 0..3 {
                vp[i] += t[i][j][idx] * k[j];
                vm[i] += t[j][i][idx] * k[j];
            }
            // N = -i k_j T
            vp[i] = Complex64::new(vp[i].im, -vp[i].re);
            vm[i] = Complex64::new(vm[i].im, -vm[i].re);
        }
        let dp = (vp[0] * k[0] + vp[1] * k[1] + vp[2] * k[2]) / k2;
        let dm = (vm[0] * k[0] + vm[1] * k[1] + vm[2] * k[2]) / k2;
        for c in 0..3 {
            np[c][idx] = vp[c] - dp * k[c];
            nm[c][idx] = vm[c] - dm * k[c];
        }
    }
    Ok((vector(grid, np), vector(grid, nm), max_speed))
}

/// The projected, dealiased nonlinear terms `(N⁺, N⁻)` of `e`.
pub fn nonlinear_term(
    e: &ElsasserState,
) -> std::result::Result<(SpectralVectorField, SpectralVectorField), StepFailure> {
    let mask = dealias_mask(e.grid());
    let (np, nm, _) = rhs(&e.w_plus, &e.w_minus, &mask)?;
    Ok((np, nm))
}

/// Pressure from `ΔP = -∂_i∂_j(W⁻_i W⁺_j)`, zero mean, built from the same
/// dealiased products as the nonlinear term.
pub fn recover_pressure(e: &ElsasserState) -> Result<SpectralScalarField> {
    let grid = e.grid();
    let mask = dealias_mask(grid);
    let Products { t, .. } = products(&e.w_plus, &e.w_minus, &mask)
        .map_err(|_| Error::InvalidField("state contains non-finite values".into()))?;
    let mut p = vec![Complex64::default(); grid.len()];
    for (idx, out) in p.iter_mut().enumerate() {
        let k = grid.derivative_wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let mut s = Complex64::default();
        for i in 0..3 {
            for j in 0..3 {
                s += t[i][j][idx] * (k[i] * k[j]);
            }
        }
        *out = -s / k2;
    }
    Ok(SpectralScalarField::new(grid, p))
}

/// Fixed-step integrator with the diffusion factors precomputed.
#[derive(Clone, Debug)]
pub struct Integrator {
    grid: Grid,
    params: FluidParams,
    dt: f64,
    cfl_safety: f64,
    sum: Vec<f64>,
    diff: Vec<f64>,
    mask: Vec<bool>,
}

impl Integrator {
    pub fn new(grid: Grid, params: FluidParams, dt: f64, cfl_safety: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Parameter(format!("dt must be > 0, got {dt}")));
        }
        if !(cfl_safety > 0.0 && cfl_safety <= 1.0) {
            return Err(Error::Parameter(format!(
                "cfl_safety must be in (0, 1], got {cfl_safety}"
            )));
        }
        let (sum, diff) = diffusion_factors(grid, &params, dt);
        Ok(Integrator {
            grid,
            params,
            dt,
            cfl_safety,
            sum,
            diff,
            mask: dealias_mask(grid),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    /// `E(a + h na, b + h nb)` restricted to dealiased modes.
    fn propagate(
        &self,
        a: &SpectralVectorField,
        na: &SpectralVectorField,
        b: &SpectralVectorField,
        nb: &SpectralVectorField,
        h: f64,
    ) -> (SpectralVectorField, SpectralVectorField) {
        let len = self.grid.len();
        let mut wp = [0, 1, 2].map(|_| vec![Complex64::default(); len]);
        let mut wm = wp.clone();
        for c in 0..3 {
            let (a, na) = (a.component(c), na.component(c));
            let (b, nb) = (b.component(c), nb.component(c));
            for idx in 0..len {
                if !self.mask[idx] {
                    continue;
                }
                let x = a[idx] + na[idx] * h;
                let y = b[idx] + nb[idx] * h;
                wp[c][idx] = x * self.sum[idx] + y * self.diff[idx];
                wm[c][idx] = x * self.diff[idx] + y * self.sum[idx];
            }
        }
        (vector(self.grid, wp), vector(self.grid, wm))
    }

    /// Largest stable step for a peak speed `speed`.
    pub fn cfl_limit(&self, speed: f64) -> f64 {
        if speed > 0.0 {
            self.cfl_safety * self.grid.spacing() / speed
        } else {
            f64::INFINITY
        }
    }

    /// One step. The output is dealiased and divergence-free.
    pub fn step(&self, e: &ElsasserState) -> std::result::Result<ElsasserState, StepFailure> {
        let dt = self.dt;
        let (np, nm, speed) = rhs(&e.w_plus, &e.w_minus, &self.mask)?;
        let limit = self.cfl_limit(speed);
        if dt > limit {
            return Err(StepFailure::Cfl { dt, limit });
        }
        let (pp, pm) = self.propagate(&e.w_plus, &np, &e.w_minus, &nm, dt);
        let (np2, nm2, _) = rhs(&pp, &pm, &self.mask)?;
        let (hp, hm) = self.propagate(&e.w_plus, &np, &e.w_minus, &nm, 0.5 * dt);
        let w_plus = hp.lin_comb(1.0, &np2, 0.5 * dt).expect("same grid");
        let w_minus = hm.lin_comb(1.0, &nm2, 0.5 * dt).expect("same grid");
        if !w_plus.is_finite() || !w_minus.is_finite() {
            return Err(StepFailure::NonFinite);
        }
        Ok(ElsasserState {
            w_plus,
            w_minus,
            time: e.time + dt,
        })
    }

    /// Takes `steps` steps, stamping times as `t0 + i dt`.
    pub fn advance(
        &self,
        e: &ElsasserState,
        steps: usize,
    ) -> std::result::Result<ElsasserState, StepFailure> {
        let t0 = e.time;
        let mut state = e.clone();
        for i in 0..steps {
            state = self.step(&state)?;
            state.time = t0 + (i + 1) as f64 * self.dt;
        }
        Ok(state)
    }
}

/// One step of the scheme with fresh setup; prefer [`Integrator`] in loops.
pub fn step(
    e: &ElsasserState,
    params: &FluidParams,
    cfg: &IntegratorConfig,
) -> std::result::Result<ElsasserState, StepFailure> {
    let integ = Integrator::new(e.grid(), *params, cfg.dt, cfg.cfl_safety)
        .map_err(|_| StepFailure::NonFinite)?;
    integ.step(e)
}

fn blown_up(norms: &crate::norms::StateNorms, threshold: f64) -> bool {
    !norms.is_finite() || norms.max_norm() > threshold
}

/// Integrates from `initial` to `cfg.t_end`, recording monitor rows at the
/// start, every `monitor_every` steps and at the final step.
///
/// The initial data is dealiased before the first step.
pub fn simulate(
    initial: &ElsasserState,
    params: &FluidParams,
    cfg: &IntegratorConfig,
    cp: &ConditionParams,
) -> Result<RunResult> {
    simulate_with(initial, params, cfg, cp, |_| {})
}

/// [`simulate`], calling `observe` on the dealiased initial state and on
/// every accepted step.
pub fn simulate_with(
    initial: &ElsasserState,
    params: &FluidParams,
    cfg: &IntegratorConfig,
    cp: &ConditionParams,
    mut observe: impl FnMut(&ElsasserState),
) -> Result<RunResult> {
    cfg.validate()?;
    cp.validate()?;
    check_same_grid(initial.w_plus.grid(), initial.w_minus.grid())?;
    initial.validate()?;
    let grid = initial.grid();
    let integ = Integrator::new(grid, *params, cfg.dt, cfg.cfl_safety)?;

    let mut state = ElsasserState {
        w_plus: crate::spectral::dealias_two_thirds(&initial.w_plus),
        w_minus: crate::spectral::dealias_two_thirds(&initial.w_minus),
        time: initial.time,
    };
    observe(&state);
    let conditions = evaluate_all(params, &state, cp)?;
    let mut series = MonitorSeries::new(*params, "");
    let norms = series.record(&state)?;
    let finish = |state, series, status, steps_taken, conditions| {
        Ok(RunResult {
            final_state: state,
            series,
            status,
            steps_taken,
            conditions,
        })
    };
    if blown_up(&norms, cfg.blowup_threshold) {
        return finish(state, series, RunStatus::BlowupDetected, 0, conditions);
    }

    let t0 = initial.time;
    let total = cfg.steps_from(t0);
    for i in 0..total {
        match integ.step(&state) {
            Ok(mut next) => {
                next.time = t0 + (i + 1) as f64 * cfg.dt;
                state = next;
                observe(&state);
            }
            Err(StepFailure::Cfl { .. }) => {
                return finish(state, series, RunStatus::CflViolation, i, conditions);
            }
            Err(StepFailure::NonFinite) => {
                return finish(state, series, RunStatus::BlowupDetected, i, conditions);
            }
        }
        let taken = i + 1;
        if taken % cfg.monitor_every == 0 || taken == total {
            let norms = series.record(&state)?;
            if blown_up(&norms, cfg.blowup_threshold) {
                return finish(state, series, RunStatus::BlowupDetected, taken, conditions);
            }
        }
    }
    finish(state, series, RunStatus::Completed, total, conditions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{generate_initial, make_params, to_elsasser, InitialDataSpec};
    use crate::norms::hs_norm;
    use crate::spectral::{to_physical, to_spectral, PhysicalVectorField};

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    fn from_fn(g: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> SpectralVectorField {
        to_spectral(&PhysicalVectorField::from_fn(g, f)).unwrap()
    }

    fn tg_state(n: usize, amplitude: f64, ratio: f64, pert: f64) -> ElsasserState {
        let spec = InitialDataSpec::taylor_green(amplitude).with_magnetic(ratio, pert);
        to_elsasser(&generate_initial(&spec, grid(n)).unwrap()).unwrap()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn crossed_cosines_nonlinear_term() {
        let g = grid(16);
        let wm = from_fn(g, |x| [x[1].cos(), 0.0, 0.0]);
        let wp = from_fn(g, |x| [0.0, x[0].cos(), 0.0]);
        let e = ElsasserState::new(wp, wm, 0.0).unwrap();
        let (np, nm) = nonlinear_term(&e).unwrap();
        let np = to_physical(&np).unwrap();
        let nm = to_physical(&nm).unwrap();
        let ep = PhysicalVectorField::from_fn(g, |x| {
            [
                -0.5 * x[0].cos() * x[1].sin(),
                0.5 * x[0].sin() * x[1].cos(),
                0.0,
            ]
        });
        let em = PhysicalVectorField::from_fn(g, |x| {
            [
                0.5 * x[0].cos() * x[1].sin(),
                -0.5 * x[0].sin() * x[1].cos(),
                0.0,
            ]
        });
        for c in 0..3 {
            assert!(max_diff(np.component(c), ep.component(c)) < 1e-13);
            assert!(max_diff(nm.component(c), em.component(c)) < 1e-13);
        }
    }

    #[test]
    fn crossed_cosines_pressure() {
        let g = grid(16);
        let wm = from_fn(g, |x| [x[1].cos(), 0.0, 0.0]);
        let wp = from_fn(g, |x| [0.0, x[0].cos(), 0.0]);
        let e = ElsasserState::new(wp, wm, 0.0).unwrap();
        let p = recover_pressure(&e).unwrap().to_physical();
        let expected: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.node(i);
                0.5 * x[0].sin() * x[1].sin()
            })
            .collect();
        assert!(max_diff(&p, &expected) < 1e-13);
    }

    #[test]
    fn zero_field_has_zero_pressure_and_rhs() {
        let e = ElsasserState::zeros(grid(8));
        assert_eq!(recover_pressure(&e).unwrap().max_abs(), 0.0);
        let (np, nm) = nonlinear_term(&e).unwrap();
        assert!(np.is_zero() && nm.is_zero());
    }

    #[test]
    fn aligned_state_is_pure_heat_flow() {
        let e = tg_state(16, 1.0, 1.0, 0.0);
        assert!(e.w_minus.is_zero());
        let (np, nm) = nonlinear_term(&e).unwrap();
        assert!(np.is_zero() && nm.is_zero());
        let params = make_params(10.0, 10.0, 1.0).unwrap();
        let integ = Integrator::new(e.grid(), params, 1e-2, 0.5).unwrap();
        let next = integ.advance(&e, 10).unwrap();
        let kappa = params.kappa();
        let decay = (-kappa * 3.0 * 0.1f64).exp();
        let coeff = e.w_plus.coeff_at([1, 1, 1])[0];
        let got = next.w_plus.coeff_at([1, 1, 1])[0];
        assert!(((got - coeff * decay).norm()) < 1e-15);
        assert!(next.w_minus.is_zero());
    }

    #[test]
    fn diffusion_steps_compose() {
        let e = tg_state(8, 1.0, 0.3, 0.4);
        let params = make_params(3.0, 0.7, 1.0).unwrap();
        let twice = diffusion_step(&diffusion_step(&e, &params, 0.1), &params, 0.2);
        let once = diffusion_step(&e, &params, 0.3);
        assert!(twice.max_rel_diff(&once) < 1e-14);
        assert!((twice.time - 0.3).abs() < 1e-15);
    }

    #[test]
    fn diffusion_mixes_fields_when_lambda_nonzero() {
        let e = tg_state(8, 1.0, 1.0, 0.0);
        let params = make_params(1.0, 2.0, 1.0).unwrap();
        let next = diffusion_step(&e, &params, 0.1);
        assert!(!next.w_minus.is_zero());
    }

    #[test]
    fn step_preserves_divergence_free_and_symmetry() {
        let e = tg_state(16, 1.0, 0.3, 0.5);
        let params = make_params(50.0, 40.0, 1.0).unwrap();
        let integ = Integrator::new(e.grid(), params, 1e-2, 0.5).unwrap();
        let next = integ.advance(&e, 5).unwrap();
        assert!(next.divergence_max() < 1e-12);
        assert!(next.w_plus.hermitian_defect() < 1e-14 * next.w_plus.max_abs().max(1.0));
        assert!(next.w_minus.hermitian_defect() < 1e-14 * next.w_minus.max_abs().max(1.0));
        assert!((next.time - 0.05).abs() < 1e-15);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let e = tg_state(16, 100.0, 0.0, 0.0);
        let params = make_params(1.0, 1.0, 1.0).unwrap();
        let integ = Integrator::new(e.grid(), params, 0.5, 0.5).unwrap();
        assert!(matches!(integ.step(&e), Err(StepFailure::Cfl { .. })));
        let cfg = IntegratorConfig {
            dt: 0.5,
            t_end: 1.0,
            ..IntegratorConfig::default()
        };
        let r = simulate(&e, &params, &cfg, &ConditionParams::default()).unwrap();
        assert_eq!(r.status, RunStatus::CflViolation);
        assert_eq!(r.steps_taken, 0);
    }

    #[test]
    fn tiny_threshold_flags_initial_row() {
        let e = tg_state(8, 1.0, 0.0, 0.0);
        let params = make_params(1.0, 1.0, 1.0).unwrap();
        let cfg = IntegratorConfig {
            blowup_threshold: 1e-9,
            ..IntegratorConfig::default()
        };
        let r = simulate(&e, &params, &cfg, &ConditionParams::default()).unwrap();
        assert_eq!(r.status, RunStatus::BlowupDetected);
        assert_eq!(r.steps_taken, 0);
        assert_eq!(r.series.len(), 1);
    }

    #[test]
    fn energy_decreases() {
        let e = tg_state(16, 1.0, 0.5, 0.5);
        let params = make_params(20.0, 20.0, 1.0).unwrap();
        let cfg = IntegratorConfig {
            dt: 5e-3,
            t_end: 0.5,
            monitor_every: 5,
            ..IntegratorConfig::default()
        };
        let r = simulate(&e, &params, &cfg, &ConditionParams::default()).unwrap();
        assert_eq!(r.status, RunStatus::Completed);
        assert_eq!(r.steps_taken, 100);
        assert!((r.final_state.time - 0.5).abs() < 1e-12);
        let energies: Vec<f64> = r.series.rows.iter().map(|row| row.total_energy()).collect();
        assert!(energies.windows(2).all(|w| w[1] < w[0]));
        assert!(r.series.rows.iter().all(|row| row.div_max < 1e-10));
    }

    #[test]
    fn simulate_is_deterministic() {
        let e = tg_state(16, 1.0, 0.2, 0.6);
        let params = make_params(30.0, 10.0, 1.0).unwrap();
        let cfg = IntegratorConfig {
            dt: 1e-2,
            t_end: 0.1,
            monitor_every: 2,
            ..IntegratorConfig::default()
        };
        let cp = ConditionParams::default();
        let a = simulate(&e, &params, &cfg, &cp).unwrap();
        let b = simulate(&e, &params, &cfg, &cp).unwrap();
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.series.rows, b.series.rows);
        assert_eq!(a.conditions, b.conditions);
    }

    #[test]
    fn zero_steps_keeps_initial_row_only() {
        let e = tg_state(8, 1.0, 0.0, 0.0);
        let params = make_params(1.0, 1.0, 1.0).unwrap();
        let cfg = IntegratorConfig {
            t_end: 0.0,
            ..IntegratorConfig::default()
        };
        let r = simulate(&e, &params, &cfg, &ConditionParams::default()).unwrap();
        assert_eq!(r.status, RunStatus::Completed);
        assert_eq!(r.series.len(), 1);
        assert_eq!(r.conditions.len(), 4);
        let h = hs_norm(&r.final_state.w_plus, 0.5).unwrap();
        assert!(h > 0.0);
    }
}
