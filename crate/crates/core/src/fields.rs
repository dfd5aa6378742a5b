//! Physical parameters, primitive and Elsasser states, the unit-diffusivity
//! rescaling, and initial-data generators.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{hs_norm, lp_norm};
use crate::spectral::{
    check_same_grid, divergence_max, leray_project, to_physical, Grid, SpectralVectorField,
};

/// Fluid parameters. `kappa` and `lambda` are the half-sum and half-difference
/// of the diffusivities `1/Re` and `1/Rm`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    re: f64,
    rm: f64,
    s_coupling: f64,
    kappa: f64,
    lambda: f64,
}

/// Builds parameters from Reynolds numbers and the coupling `S`.
pub fn make_params(re: f64, rm: f64, s_coupling: f64) -> Result<FluidParams> {
    FluidParams::new(re, rm, s_coupling)
}

impl FluidParams {
    pub fn new(re: f64, rm: f64, s_coupling: f64) -> Result<Self> {
        if !(re > 0.0 && re.is_finite()) {
            return Err(Error::Parameter(format!("re must be > 0, got {re}")));
        }
        if !(rm > 0.0 && rm.is_finite()) {
            return Err(Error::Parameter(format!("rm must be > 0, got {rm}")));
        }
        if !(s_coupling >= 0.0 && s_coupling.is_finite()) {
            return Err(Error::Parameter(format!(
                "s must be >= 0, got {s_coupling}"
            )));
        }
        let kappa = 0.5 / re + 0.5 / rm;
        let lambda = 0.5 / re - 0.5 / rm;
        Ok(FluidParams {
            re,
            rm,
            s_coupling,
            kappa,
            lambda,
        })
    }

    /// Builds parameters directly from `(κ, λ)`; requires `κ > |λ|`.
    pub fn from_diffusivities(kappa: f64, lambda: f64, s_coupling: f64) -> Result<Self> {
        if !(kappa.is_finite() && lambda.is_finite() && kappa > lambda.abs()) {
            return Err(Error::Parameter(format!(
                "need kappa > |lambda|, got kappa={kappa}, lambda={lambda}"
            )));
        }
        if !(s_coupling >= 0.0 && s_coupling.is_finite()) {
            return Err(Error::Parameter(format!(
                "s must be >= 0, got {s_coupling}"
            )));
        }
        Ok(FluidParams {
            re: 1.0 / (kappa + lambda),
            rm: 1.0 / (kappa - lambda),
            s_coupling,
            kappa,
            lambda,
        })
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn rm(&self) -> f64 {
        self.rm
    }

    pub fn s_coupling(&self) -> f64 {
        self.s_coupling
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `κ + λ`, the diffusivity of `u`.
    pub fn velocity_diffusivity(&self) -> f64 {
        self.kappa + self.lambda
    }

    /// `κ - λ`, the diffusivity of `B`.
    pub fn magnetic_diffusivity(&self) -> f64 {
        self.kappa - self.lambda
    }

    /// `√S`, the factor applied to `B` at ingestion.
    pub fn coupling_factor(&self) -> f64 {
        self.s_coupling.sqrt()
    }

    pub fn lambda_kappa_ratio(&self) -> f64 {
        self.lambda.abs() / self.kappa
    }
}

/// Elsasser pair `W± = u ± B` at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct ElsasserState {
    pub w_plus: SpectralVectorField,
    pub w_minus: SpectralVectorField,
    pub time: f64,
}

impl ElsasserState {
    pub fn new(
        w_plus: SpectralVectorField,
        w_minus: SpectralVectorField,
        time: f64,
    ) -> Result<Self> {
        check_same_grid(w_plus.grid(), w_minus.grid())?;
        Ok(ElsasserState {
            w_plus,
            w_minus,
            time,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        ElsasserState {
            w_plus: SpectralVectorField::zeros(grid),
            w_minus: SpectralVectorField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> Grid {
        self.w_plus.grid()
    }

    pub fn divergence_max(&self) -> f64 {
        divergence_max(&self.w_plus).max(divergence_max(&self.w_minus))
    }

    /// Checks the state invariants: solenoidal to `1e-10`, mean zero, finite.
    pub fn validate(&self) -> Result<()> {
        if !(self.w_plus.is_finite() && self.w_minus.is_finite() && self.time.is_finite()) {
            return Err(Error::InvalidField(
                "state contains non-finite values".into(),
            ));
        }
        let div = self.divergence_max();
        if div >= 1e-10 {
            return Err(Error::InvalidField(format!(
                "state is not divergence-free (residual {div:e})"
            )));
        }
        let mean = self
            .w_plus
            .mean()
            .iter()
            .chain(&self.w_minus.mean())
            .any(|v| v.norm() != 0.0);
        if mean {
            return Err(Error::InvalidField("state has a nonzero mean mode".into()));
        }
        Ok(())
    }

    /// Maximum relative coefficient difference over both fields.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        let scale = self.w_plus.max_abs().max(self.w_minus.max_abs());
        let diff = |a: &SpectralVectorField, b: &SpectralVectorField| -> f64 {
            a.components()
                .iter()
                .zip(b.components())
                .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
                .fold(0.0, f64::max)
        };
        let worst = diff(&self.w_plus, &other.w_plus).max(diff(&self.w_minus, &other.w_minus));
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

/// Velocity and magnetic field at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveState {
    pub u: SpectralVectorField,
    pub b: SpectralVectorField,
    pub time: f64,
}

impl PrimitiveState {
    pub fn new(u: SpectralVectorField, b: SpectralVectorField, time: f64) -> Result<Self> {
        check_same_grid(u.grid(), b.grid())?;
        Ok(PrimitiveState { u, b, time })
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    /// Replaces `B` by `√S·B` so the dynamics run with unit coupling.
    pub fn absorb_coupling(&self, params: &FluidParams) -> PrimitiveState {
        PrimitiveState {
            u: self.u.clone(),
            b: self.b.scaled(params.coupling_factor()),
            time: self.time,
        }
    }

    /// Undoes [`absorb_coupling`](Self::absorb_coupling). `None` when `S = 0`.
    pub fn release_coupling(&self, params: &FluidParams) -> Option<PrimitiveState> {
        let f = params.coupling_factor();
        (f > 0.0).then(|| PrimitiveState {
            u: self.u.clone(),
            b: self.b.scaled(1.0 / f),
            time: self.time,
        })
    }
}

/// `W± = u ± B`. `B` is expected to carry the `√S` factor already.
pub fn to_elsasser(p: &PrimitiveState) -> Result<ElsasserState> {
    Ok(ElsasserState {
        w_plus: p.u.lin_comb(1.0, &p.b, 1.0)?,
        w_minus: p.u.lin_comb(1.0, &p.b, -1.0)?,
        time: p.time,
    })
}

/// `u = (W⁺ + W⁻)/2`, `B = (W⁺ - W⁻)/2`.
pub fn from_elsasser(e: &ElsasserState) -> PrimitiveState {
    PrimitiveState {
        u: e.w_plus
            .lin_comb(0.5, &e.w_minus, 0.5)
            .expect("state fields share a grid"),
        b: e.w_plus
            .lin_comb(0.5, &e.w_minus, -0.5)
            .expect("state fields share a grid"),
        time: e.time,
    }
}

/// Maps `W±(x, t)` to `V±(x, κt) = κ⁻¹W±(x, t)` and returns the parameters
/// `κ' = 1`, `λ' = λ/κ` under which `V±` solves the same system.
pub fn rescale_to_v(
    e: &ElsasserState,
    params: &FluidParams,
) -> Result<(ElsasserState, FluidParams)> {
    let kappa = params.kappa();
    if !(kappa > 0.0) {
        return Err(Error::Parameter(format!("kappa must be > 0, got {kappa}")));
    }
    if kappa == 1.0 {
        return Ok((e.clone(), *params));
    }
    let scaled = ElsasserState {
        w_plus: e.w_plus.map(|_, v| v / kappa),
        w_minus: e.w_minus.map(|_, v| v / kappa),
        time: e.time * kappa,
    };
    let params =
        FluidParams::from_diffusivities(1.0, params.lambda() / kappa, params.s_coupling())?;
    Ok((scaled, params))
}

/// Inverse of [`rescale_to_v`] for a state in V-variables, given the original
/// `κ`.
pub fn rescale_from_v(v: &ElsasserState, kappa: f64) -> ElsasserState {
    if kappa == 1.0 {
        return v.clone();
    }
    ElsasserState {
        w_plus: v.w_plus.scaled(kappa),
        w_minus: v.w_minus.scaled(kappa),
        time: v.time / kappa,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    TaylorGreen,
    SingleMode,
    RandomSolenoidal,
}

impl InitialKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "taylor-green" => Some(InitialKind::TaylorGreen),
            "single-mode" => Some(InitialKind::SingleMode),
            "random-solenoidal" => Some(InitialKind::RandomSolenoidal),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialKind::TaylorGreen => "taylor-green",
            InitialKind::SingleMode => "single-mode",
            InitialKind::RandomSolenoidal => "random-solenoidal",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormName {
    L2,
    L3,
    H12,
}

impl NormName {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "l2" => Some(NormName::L2),
            "l3" => Some(NormName::L3),
            "h12" => Some(NormName::H12),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NormName::L2 => "l2",
            NormName::L3 => "l3",
            NormName::H12 => "h12",
        }
    }

    pub fn evaluate(&self, g: &SpectralVectorField) -> Result<f64> {
        match self {
            NormName::L2 => hs_norm(g, 0.0),
            NormName::H12 => hs_norm(g, 0.5),
            NormName::L3 => lp_norm(&to_physical(g)?, 3.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetNorm {
    pub norm: NormName,
    pub value: f64,
}

/// Recipe for the initial velocity and magnetic field.
///
/// The velocity profile is `amplitude·U` for the unit profile `U` of `kind`.
/// The magnetic field is `magnetic_ratio·u + magnetic_perturbation·Ru`, where
/// `Ru(x) = R u(R⁻¹x)` is the velocity rotated by the cyclic axis permutation
/// `e₁ → e₂ → e₃ → e₁`. `magnetic_ratio = 1` gives `W⁻ = -magnetic_perturbation·Ru`.
/// With `target_norm`, both fields are rescaled together so that `u` has the
/// requested norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub seed: u64,
    pub k0: u32,
    pub target_norm: Option<TargetNorm>,
    pub magnetic_ratio: f64,
    pub magnetic_perturbation: f64,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        InitialDataSpec {
            kind: InitialKind::TaylorGreen,
            amplitude: 1.0,
            seed: 0,
            k0: 1,
            target_norm: None,
            magnetic_ratio: 0.0,
            magnetic_perturbation: 0.0,
        }
    }
}

impl InitialDataSpec {
    pub fn taylor_green(amplitude: f64) -> Self {
        InitialDataSpec {
            amplitude,
            ..Default::default()
        }
    }

    pub fn with_magnetic(mut self, ratio: f64, perturbation: f64) -> Self {
        self.magnetic_ratio = ratio;
        self.magnetic_perturbation = perturbation;
        self
    }

    pub fn validate(&self, grid: Grid) -> Result<()> {
        for (name, v) in [
            ("amplitude", self.amplitude),
            ("magnetic_ratio", self.magnetic_ratio),
            ("magnetic_perturbation", self.magnetic_perturbation),
        ] {
            if !v.is_finite() {
                return Err(Error::Spec(format!("{name} must be finite, got {v}")));
            }
        }
        let k0 = self.k0 as i64;
        if k0 < 1 || !grid.is_resolved([k0, k0, k0]) {
            return Err(Error::Spec(format!(
                "k0={} is outside the resolved band 1..={} for n={}",
                self.k0,
                grid.n() / 3,
                grid.n()
            )));
        }
        if let Some(t) = &self.target_norm {
            if !(t.value.is_finite() && t.value >= 0.0) {
                return Err(Error::Spec(format!(
                    "target norm value must be finite and >= 0, got {}",
                    t.value
                )));
            }
        }
        Ok(())
    }
}

/// Builds a divergence-free, mean-zero primitive state at `t = 0`.
pub fn generate_initial(spec: &InitialDataSpec, grid: Grid) -> Result<PrimitiveState> {
    spec.validate(grid)?;
    let unit = match spec.kind {
        InitialKind::TaylorGreen => taylor_green_profile(grid, spec.k0 as i64),
        InitialKind::SingleMode => single_mode_profile(grid, spec.k0 as i64),
        InitialKind::RandomSolenoidal => random_profile(grid, spec.k0 as f64, spec.seed),
    };
    let u = unit.scaled(spec.amplitude);
    let rotated = rotate_cyclic(&u);
    let b = u.lin_comb(spec.magnetic_ratio, &rotated, spec.magnetic_perturbation)?;
    let (u, b) = match &spec.target_norm {
        None => (u, b),
        Some(t) => {
            let current = t.norm.evaluate(&u)?;
            if current == 0.0 {
                return Err(Error::Spec(format!(
                    "cannot rescale a zero velocity to {}={}",
                    t.norm.name(),
                    t.value
                )));
            }
            let f = t.value / current;
            (u.scaled(f), b.scaled(f))
        }
    };
    PrimitiveState::new(u, b, 0.0)
}

/// `(sin k₀x₁ cos k₀x₂ cos k₀x₃, -cos k₀x₁ sin k₀x₂ cos k₀x₃, 0)` set
/// directly from its eight Fourier modes.
fn taylor_green_profile(grid: Grid, k0: i64) -> SpectralVectorField {
    let mut g = SpectralVectorField::zeros(grid);
    for s1 in [-1_i64, 1] {
        for s2 in [-1_i64, 1] {
            for s3 in [-1_i64, 1] {
                let k = [s1 * k0, s2 * k0, s3 * k0];
                let idx = grid.index_of_mode(k);
                // sin(a) = (e^{ia} - e^{-ia}) / 2i, so each mode carries ∓i/8
                g.components_mut()[0][idx] = Complex64::new(0.0, -(s1 as f64) / 8.0);
                g.components_mut()[1][idx] = Complex64::new(0.0, (s2 as f64) / 8.0);
            }
        }
    }
    g
}

/// `cos(k₀x₁)·e₂`.
fn single_mode_profile(grid: Grid, k0: i64) -> SpectralVectorField {
    let mut g = SpectralVectorField::zeros(grid);
    g.set_mode(
        [k0, 0, 0],
        [
            Complex64::default(),
            Complex64::new(0.5, 0.0),
            Complex64::default(),
        ],
    );
    g
}

/// Gaussian solenoidal field with shell spectrum `E(k) ∝ k⁴ exp(-2(k/k₀)²)`
/// on the dealiased band, normalized to unit rms magnitude.
fn random_profile(grid: Grid, k0: f64, seed: u64) -> SpectralVectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SpectralVectorField::zeros(grid);
    for idx in 1..grid.len() {
        let cidx = grid.conj_index(idx);
        if cidx <= idx || !grid.is_resolved(grid.mode(idx)) {
            continue;
        }
        let k = grid.k_squared(idx).sqrt();
        let energy = k.powi(4) * (-2.0 * (k / k0).powi(2)).exp();
        let amp = (energy / (4.0 * std::f64::consts::PI * k * k)).sqrt();
        let mut v = [Complex64::default(); 3];
        for c in &mut v {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *c = Complex64::new(re, im) * amp;
        }
        for (c, val) in v.iter().enumerate() {
            g.components_mut()[c][idx] = *val;
            g.components_mut()[c][cidx] = val.conj();
        }
    }
    let mut g = leray_project(&g);
    g.set_mean_zero();
    let rms = g.power_sum().sqrt();
    if rms > 0.0 {
        g = g.scaled(1.0 / rms);
    }
    g
}

/// `x ↦ R u(R⁻¹x)` with `R: e₁ → e₂ → e₃ → e₁`; in Fourier space
/// `ĉ'(k) = R ĉ(R⁻¹k)`. Preserves solenoidality and all norms.
pub fn rotate_cyclic(u: &SpectralVectorField) -> SpectralVectorField {
    let grid = u.grid();
    let mut out = SpectralVectorField::zeros(grid);
    for idx in 0..grid.len() {
        let k = grid.mode(idx);
        let src = grid.index_of_mode([k[1], k[2], k[0]]);
        let v = u.coeff(src);
        let dst = out.components_mut();
        dst[0][idx] = v[2];
        dst[1][idx] = v[0];
        dst[2][idx] = v[1];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{to_spectral, PhysicalVectorField, TWO_PI};
    use approx::assert_relative_eq;

    fn cos_e2(grid: Grid, a: f64) -> SpectralVectorField {
        to_spectral(&PhysicalVectorField::from_fn(grid, |x| {
            [0.0, a * x[0].cos(), 0.0]
        }))
        .unwrap()
    }

    #[test]
    fn params_examples() {
        let p = make_params(1.0, 1.0, 1.0).unwrap();
        assert_eq!((p.kappa(), p.lambda()), (1.0, 0.0));
        let p = make_params(1.0, 1.0 / 3.0, 1.0).unwrap();
        assert_relative_eq!(p.kappa(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(p.lambda(), -1.0, max_relative = 1e-15);
        assert!(p.kappa() > p.lambda().abs());
        let p = make_params(100.0, 100.0, 4.0).unwrap();
        assert_relative_eq!(p.kappa(), 0.01, max_relative = 1e-15);
        assert_eq!(p.lambda(), 0.0);
        assert_eq!(p.coupling_factor(), 2.0);
    }

    #[test]
    fn params_rejected() {
        assert!(make_params(0.0, 1.0, 1.0).is_err());
        assert!(make_params(1.0, -2.0, 1.0).is_err());
        assert!(make_params(1.0, 1.0, -1.0).is_err());
        let msg = make_params(0.0, 1.0, 1.0).unwrap_err().to_string();
        assert!(msg.contains("re must be > 0"), "{msg}");
        assert!(FluidParams::from_diffusivities(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn elsasser_examples() {
        let g = Grid::new(8).unwrap();
        let c = cos_e2(g, 1.0);
        let p = PrimitiveState::new(c.clone(), c.clone(), 0.0).unwrap();
        let e = to_elsasser(&p).unwrap();
        assert_eq!(e.w_plus, c.scaled(2.0));
        assert!(e.w_minus.is_zero());

        let p = PrimitiveState::new(c.clone(), c.scaled(-1.0), 0.0).unwrap();
        let e = to_elsasser(&p).unwrap();
        assert!(e.w_plus.is_zero());
        assert_eq!(e.w_minus, c.scaled(2.0));

        let e = ElsasserState::new(c.scaled(2.0), SpectralVectorField::zeros(g), 0.0).unwrap();
        let p = from_elsasser(&e);
        assert_eq!(p.u, c);
        assert_eq!(p.b, c);
        let e = ElsasserState::new(c.clone(), c.clone(), 0.0).unwrap();
        let p = from_elsasser(&e);
        assert_eq!(p.u, c);
        assert!(p.b.is_zero());
    }

    #[test]
    fn grid_mismatch_is_shape_error() {
        let a = SpectralVectorField::zeros(Grid::new(8).unwrap());
        let b = SpectralVectorField::zeros(Grid::new(16).unwrap());
        assert!(matches!(
            PrimitiveState::new(a, b, 0.0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn coupling_absorption() {
        let g = Grid::new(8).unwrap();
        let c = cos_e2(g, 1.0);
        let params = make_params(1.0, 1.0, 4.0).unwrap();
        let p = PrimitiveState::new(c.clone(), c.clone(), 0.0).unwrap();
        let absorbed = p.absorb_coupling(&params);
        assert_eq!(absorbed.b, c.scaled(2.0));
        assert_eq!(absorbed.release_coupling(&params).unwrap(), p);
        let zero = make_params(1.0, 1.0, 0.0).unwrap();
        assert!(absorbed.release_coupling(&zero).is_none());
    }

    #[test]
    fn rescale_examples() {
        let g = Grid::new(8).unwrap();
        let params = FluidParams::from_diffusivities(2.0, 0.5, 1.0).unwrap();
        let e = ElsasserState::new(cos_e2(g, 4.0), cos_e2(g, 1.0), 1.0).unwrap();
        let (v, vp) = rescale_to_v(&e, &params).unwrap();
        assert_eq!(v.time, 2.0);
        assert_eq!(v.w_plus, cos_e2(g, 4.0).scaled(0.5));
        assert_eq!(vp.kappa(), 1.0);
        assert_eq!(vp.lambda(), 0.25);
        assert_eq!(rescale_from_v(&v, 2.0), e);

        let unit = make_params(1.0, 1.0, 1.0).unwrap();
        let (same, sp) = rescale_to_v(&e, &unit).unwrap();
        assert_eq!(same, e);
        assert_eq!(sp, unit);
    }

    #[test]
    fn taylor_green_matches_sampled_profile() {
        let g = Grid::new(16).unwrap();
        let spec = InitialDataSpec::taylor_green(1.0);
        let p = generate_initial(&spec, g).unwrap();
        let sampled = to_spectral(&PhysicalVectorField::from_fn(g, |x| {
            [
                x[0].sin() * x[1].cos() * x[2].cos(),
                -x[0].cos() * x[1].sin() * x[2].cos(),
                0.0,
            ]
        }))
        .unwrap();
        assert!(p.u.max_rel_diff(&sampled) < 1e-14);
        assert!(divergence_max(&p.u) < 1e-12);
        assert!(p.b.is_zero());
    }

    #[test]
    fn rotated_taylor_green() {
        let g = Grid::new(16).unwrap();
        let u = generate_initial(&InitialDataSpec::taylor_green(1.0), g)
            .unwrap()
            .u;
        let r = rotate_cyclic(&u);
        let sampled = to_spectral(&PhysicalVectorField::from_fn(g, |x| {
            [
                0.0,
                x[1].sin() * x[2].cos() * x[0].cos(),
                -x[1].cos() * x[2].sin() * x[0].cos(),
            ]
        }))
        .unwrap();
        assert!(r.max_rel_diff(&sampled) < 1e-14);
        assert_eq!(divergence_max(&r), 0.0);
    }

    #[test]
    fn single_mode_h12() {
        let g = Grid::new(16).unwrap();
        let a = 0.7;
        let spec = InitialDataSpec {
            kind: InitialKind::SingleMode,
            amplitude: a,
            ..Default::default()
        };
        let u = generate_initial(&spec, g).unwrap().u;
        let h = hs_norm(&u, 0.5).unwrap();
        assert_relative_eq!(h * h, TWO_PI.powi(3) * a * a / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn random_is_deterministic_and_solenoidal() {
        let g = Grid::new(16).unwrap();
        let spec = InitialDataSpec {
            kind: InitialKind::RandomSolenoidal,
            amplitude: 1.5,
            seed: 42,
            k0: 2,
            ..Default::default()
        }
        .with_magnetic(0.5, 0.3);
        let a = generate_initial(&spec, g).unwrap();
        let b = generate_initial(&spec, g).unwrap();
        assert_eq!(a, b);
        assert!(divergence_max(&a.u) < 1e-10 && divergence_max(&a.b) < 1e-10);
        assert_eq!(a.u.mean(), [Complex64::default(); 3]);
        assert_eq!(a.u.hermitian_defect(), 0.0);
        let rms = hs_norm(&a.u, 0.0).unwrap() / TWO_PI.powf(1.5);
        assert_relative_eq!(rms, 1.5, max_relative = 1e-12);

        let other = InitialDataSpec { seed: 43, ..spec };
        assert_ne!(generate_initial(&other, g).unwrap(), a);
    }

    #[test]
    fn target_norm_rescales_both_fields() {
        let g = Grid::new(16).unwrap();
        let spec = InitialDataSpec {
            target_norm: Some(TargetNorm {
                norm: NormName::H12,
                value: 3.0,
            }),
            ..InitialDataSpec::taylor_green(1.0).with_magnetic(1.0, 0.0)
        };
        let p = generate_initial(&spec, g).unwrap();
        assert_relative_eq!(hs_norm(&p.u, 0.5).unwrap(), 3.0, max_relative = 1e-14);
        assert_eq!(p.u, p.b);
    }

    #[test]
    fn unresolved_k0_rejected() {
        let g = Grid::new(16).unwrap();
        let spec = InitialDataSpec {
            k0: 6,
            ..Default::default()
        };
        assert!(matches!(generate_initial(&spec, g), Err(Error::Spec(_))));
        let spec = InitialDataSpec {
            k0: 0,
            ..Default::default()
        };
        assert!(generate_initial(&spec, g).is_err());
    }
}
