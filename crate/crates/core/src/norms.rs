//! Lebesgue and homogeneous Sobolev norms on the torus, and the time series
//! of a priori functionals recorded along a trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ElsasserState, FluidParams};
use crate::spectral::{physical_pair, Grid, PhysicalVectorField, SpectralVectorField};

/// `(Σ_x |f(x)|^p (2π/n)³)^{1/p}` with `|·|` the pointwise Euclidean magnitude.
pub fn lp_norm(f: &PhysicalVectorField, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Parameter(format!("p must be >= 1, got {p}")));
    }
    let grid = f.grid();
    let [x, y, z] = f.components();
    let sum: f64 = if p == 2.0 {
        (0..grid.len())
            .map(|i| x[i] * x[i] + y[i] * y[i] + z[i] * z[i])
            .sum()
    } else {
        let half = p / 2.0;
        (0..grid.len())
            .map(|i| (x[i] * x[i] + y[i] * y[i] + z[i] * z[i]).powf(half))
            .sum()
    };
    Ok((sum * grid.cell_volume()).powf(1.0 / p))
}

/// `(Σ_x |f(x)|^p (2π/n)³)^{1/p}` for a scalar sampled on `grid`.
pub fn scalar_lp_norm(grid: Grid, values: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Parameter(format!("p must be >= 1, got {p}")));
    }
    if values.len() != grid.len() {
        return Err(Error::Shape(format!(
            "expected {} samples, got {}",
            grid.len(),
            values.len()
        )));
    }
    let sum: f64 = values.iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * grid.cell_volume()).powf(1.0 / p))
}

/// `((2π)³ Σ_k |k|^{2s} |c(k)|²)^{1/2}`.
///
/// The mean mode has weight `0^{2s}`: 1 for `s = 0` (so `s = 0` is the `L²`
/// norm), 0 for `s > 0`, and a domain error for `s < 0` when it is nonzero.
pub fn hs_norm(g: &SpectralVectorField, s: f64) -> Result<f64> {
    Ok(hs_norm_sq(g, s)?.sqrt())
}

pub fn hs_norm_sq(g: &SpectralVectorField, s: f64) -> Result<f64> {
    let grid = g.grid();
    let mean_weight = if s == 0.0 {
        1.0
    } else if s > 0.0 {
        0.0
    } else if g.mean().iter().any(|v| v.norm() != 0.0) {
        return Err(Error::Domain(format!(
            "Hs norm with s={s} < 0 needs a zero mean mode"
        )));
    } else {
        0.0
    };
    let [a, b, c] = g.components();
    let mut sum = mean_weight * (a[0].norm_sqr() + b[0].norm_sqr() + c[0].norm_sqr());
    for idx in 1..grid.len() {
        let p = a[idx].norm_sqr() + b[idx].norm_sqr() + c[idx].norm_sqr();
        if p == 0.0 {
            continue;
        }
        let w = if s == 0.0 {
            1.0
        } else {
            grid.k_squared(idx).powf(s)
        };
        sum += w * p;
    }
    Ok(grid.volume() * sum)
}

/// Instantaneous norms of an Elsasser state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateNorms {
    pub l2_wp: f64,
    pub l2_wm: f64,
    pub l3_wp: f64,
    pub l3_wm: f64,
    pub l9_wp: f64,
    pub h12_wp: f64,
    pub h12_wm: f64,
    pub h32_wp_sq: f64,
    pub h32_wm_sq: f64,
    pub energy_u: f64,
    pub energy_b: f64,
    /// `‖∇u‖²/Re + ‖∇B‖²/Rm`.
    pub dissipation_rate: f64,
    pub div_max: f64,
}

impl StateNorms {
    pub fn compute(e: &ElsasserState, params: &FluidParams) -> Result<Self> {
        let (pp, pm) = physical_pair(&e.w_plus, &e.w_minus);
        let grid = e.grid();
        let volume = grid.volume();
        let nu_u = params.velocity_diffusivity();
        let nu_b = params.magnetic_diffusivity();

        let mut energy_u = 0.0;
        let mut energy_b = 0.0;
        let mut dissipation = 0.0;
        for idx in 0..grid.len() {
            let a = e.w_plus.coeff(idx);
            let b = e.w_minus.coeff(idx);
            let mut pu = 0.0;
            let mut pb = 0.0;
            for c in 0..3 {
                pu += ((a[c] + b[c]) * 0.5).norm_sqr();
                pb += ((a[c] - b[c]) * 0.5).norm_sqr();
            }
            energy_u += pu;
            energy_b += pb;
            let k2 = grid.k_squared(idx);
            dissipation += k2 * (nu_u * pu + nu_b * pb);
        }

        Ok(StateNorms {
            l2_wp: hs_norm(&e.w_plus, 0.0)?,
            l2_wm: hs_norm(&e.w_minus, 0.0)?,
            l3_wp: lp_norm(&pp, 3.0)?,
            l3_wm: lp_norm(&pm, 3.0)?,
            l9_wp: lp_norm(&pp, 9.0)?,
            h12_wp: hs_norm(&e.w_plus, 0.5)?,
            h12_wm: hs_norm(&e.w_minus, 0.5)?,
            h32_wp_sq: hs_norm_sq(&e.w_plus, 1.5)?,
            h32_wm_sq: hs_norm_sq(&e.w_minus, 1.5)?,
            energy_u: 0.5 * volume * energy_u,
            energy_b: 0.5 * volume * energy_b,
            dissipation_rate: volume * dissipation,
            div_max: e.divergence_max(),
        })
    }

    pub fn is_finite(&self) -> bool {
        [
            self.l2_wp,
            self.l2_wm,
            self.l3_wp,
            self.l3_wm,
            self.l9_wp,
            self.h12_wp,
            self.h12_wm,
            self.h32_wp_sq,
            self.h32_wm_sq,
            self.energy_u,
            self.energy_b,
            self.dissipation_rate,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Largest of the magnitude-type norms, compared against blowup thresholds.
    pub fn max_norm(&self) -> f64 {
        [
            self.l2_wp,
            self.l2_wm,
            self.l3_wp,
            self.l3_wm,
            self.l9_wp,
            self.h12_wp,
            self.h12_wm,
            self.h32_wp_sq.sqrt(),
            self.h32_wm_sq.sqrt(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// One recorded instant. Running integrals use the trapezoidal rule over the
/// recorded instants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorRow {
    pub t: f64,
    pub l3_wp: f64,
    pub l3_wm: f64,
    pub h12_wp: f64,
    pub h12_wm: f64,
    /// `∫₀ᵗ ‖W⁺‖²_{Ḣ^{3/2}}`
    pub h32_wp_sq_int: f64,
    /// `∫₀ᵗ ‖W⁻‖²_{Ḣ^{3/2}}`
    pub h32_wm_sq_int: f64,
    /// `∫₀ᵗ ‖W⁺‖³_{L⁹}`
    pub l9_wp_cubed_int: f64,
    pub energy_u: f64,
    pub energy_b: f64,
    /// `κ⁻³ (sup_{s≤t} ‖W⁻(s)‖_{L³})³`
    pub a_minus_l3: f64,
    /// `sup_{s≤t} κ⁻²‖W⁻(s)‖²_{Ḣ^{1/2}} + κ⁻¹ ∫₀ᵗ ‖W⁻‖²_{Ḣ^{3/2}}`, the
    /// unit-diffusivity functional expressed in the original variables.
    pub a_minus_h12: f64,
    pub div_max: f64,
    /// `∫₀ᵗ (‖∇u‖²/Re + ‖∇B‖²/Rm)`. Not part of the CSV schema.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dissipation_int: Option<f64>,
}

impl MonitorRow {
    pub fn values(&self) -> [f64; 13] {
        [
            self.t,
            self.l3_wp,
            self.l3_wm,
            self.h12_wp,
            self.h12_wm,
            self.h32_wp_sq_int,
            self.h32_wm_sq_int,
            self.l9_wp_cubed_int,
            self.energy_u,
            self.energy_b,
            self.a_minus_l3,
            self.a_minus_h12,
            self.div_max,
        ]
    }

    pub fn from_values(v: [f64; 13]) -> Self {
        MonitorRow {
            t: v[0],
            l3_wp: v[1],
            l3_wm: v[2],
            h12_wp: v[3],
            h12_wm: v[4],
            h32_wp_sq_int: v[5],
            h32_wm_sq_int: v[6],
            l9_wp_cubed_int: v[7],
            energy_u: v[8],
            energy_b: v[9],
            a_minus_l3: v[10],
            a_minus_h12: v[11],
            div_max: v[12],
            dissipation_int: None,
        }
    }

    pub fn total_energy(&self) -> f64 {
        self.energy_u + self.energy_b
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Accumulator {
    h32_wp_sq: f64,
    h32_wm_sq: f64,
    l9_wp_cubed: f64,
    dissipation_rate: f64,
    sup_l3_wm: f64,
    sup_h12_wm_sq: f64,
}

/// Time-ordered monitor rows for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct MonitorSeries {
    pub rows: Vec<MonitorRow>,
    pub params: FluidParams,
    pub config_digest: String,
    accum: Option<Accumulator>,
}

impl MonitorSeries {
    pub fn new(params: FluidParams, config_digest: impl Into<String>) -> Self {
        MonitorSeries {
            rows: Vec::new(),
            params,
            config_digest: config_digest.into(),
            accum: None,
        }
    }

    /// Series rebuilt from stored rows; it can be inspected but not extended.
    pub fn from_rows(
        rows: Vec<MonitorRow>,
        params: FluidParams,
        config_digest: impl Into<String>,
    ) -> Self {
        MonitorSeries {
            rows,
            params,
            config_digest: config_digest.into(),
            accum: None,
        }
    }

    pub fn last(&self) -> Option<&MonitorRow> {
        self.rows.last()
    }

    pub fn first(&self) -> Option<&MonitorRow> {
        self.rows.first()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row for `e`, returning the instantaneous norms it was built
    /// from.
    pub fn record(&mut self, e: &ElsasserState) -> Result<StateNorms> {
        let norms = StateNorms::compute(e, &self.params)?;
        self.push(e.time, &norms)?;
        Ok(norms)
    }

    /// Appends a row from precomputed norms at time `t`.
    pub fn push(&mut self, t: f64, n: &StateNorms) -> Result<()> {
        let kappa = self.params.kappa();
        let h12_wm_sq = n.h12_wm * n.h12_wm;
        let next = match (self.rows.last(), self.accum) {
            (None, _) => MonitorRow {
                t,
                l3_wp: n.l3_wp,
                l3_wm: n.l3_wm,
                h12_wp: n.h12_wp,
                h12_wm: n.h12_wm,
                h32_wp_sq_int: 0.0,
                h32_wm_sq_int: 0.0,
                l9_wp_cubed_int: 0.0,
                energy_u: n.energy_u,
                energy_b: n.energy_b,
                a_minus_l3: (n.l3_wm / kappa).powi(3),
                a_minus_h12: h12_wm_sq / (kappa * kappa),
                div_max: n.div_max,
                dissipation_int: Some(0.0),
            },
            (Some(_), None) => {
                return Err(Error::NotResumable(
                    "series was loaded from stored rows without integrand state".into(),
                ))
            }
            (Some(prev), Some(acc)) => {
                if !(t > prev.t) {
                    return Err(Error::Ordering {
                        last: prev.t,
                        new: t,
                    });
                }
                let dt = t - prev.t;
                let trap = |a: f64, b: f64| 0.5 * (a + b) * dt;
                let h32_wm_sq_int = prev.h32_wm_sq_int + trap(acc.h32_wm_sq, n.h32_wm_sq);
                let sup_l3 = acc.sup_l3_wm.max(n.l3_wm);
                let sup_h12 = acc.sup_h12_wm_sq.max(h12_wm_sq);
                MonitorRow {
                    t,
                    l3_wp: n.l3_wp,
                    l3_wm: n.l3_wm,
                    h12_wp: n.h12_wp,
                    h12_wm: n.h12_wm,
                    h32_wp_sq_int: prev.h32_wp_sq_int + trap(acc.h32_wp_sq, n.h32_wp_sq),
                    h32_wm_sq_int,
                    l9_wp_cubed_int: prev.l9_wp_cubed_int + trap(acc.l9_wp_cubed, n.l9_wp.powi(3)),
                    energy_u: n.energy_u,
                    energy_b: n.energy_b,
                    a_minus_l3: (sup_l3 / kappa).powi(3),
                    a_minus_h12: sup_h12 / (kappa * kappa) + h32_wm_sq_int / kappa,
                    div_max: n.div_max,
                    dissipation_int: prev
                        .dissipation_int
                        .map(|d| d + trap(acc.dissipation_rate, n.dissipation_rate)),
                }
            }
        };
        let prev_acc = self.accum;
        self.accum = Some(Accumulator {
            h32_wp_sq: n.h32_wp_sq,
            h32_wm_sq: n.h32_wm_sq,
            l9_wp_cubed: n.l9_wp.powi(3),
            dissipation_rate: n.dissipation_rate,
            sup_l3_wm: prev_acc.map_or(n.l3_wm, |a| a.sup_l3_wm.max(n.l3_wm)),
            sup_h12_wm_sq: prev_acc.map_or(h12_wm_sq, |a| a.sup_h12_wm_sq.max(h12_wm_sq)),
        });
        self.rows.push(next);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_params;
    use crate::spectral::{to_spectral, Grid, TWO_PI};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn cos_e2(grid: Grid) -> PhysicalVectorField {
        PhysicalVectorField::from_fn(grid, |x| [0.0, x[0].cos(), 0.0])
    }

    #[test]
    fn lp_fixtures() {
        let g = Grid::new(16).unwrap();
        let one = PhysicalVectorField::from_fn(g, |_| [0.6, 0.0, 0.8]);
        assert_relative_eq!(lp_norm(&one, 3.0).unwrap(), TWO_PI, max_relative = 1e-14);
        assert_relative_eq!(
            lp_norm(&cos_e2(g), 2.0).unwrap(),
            TWO_PI.powf(1.5) / 2f64.sqrt(),
            max_relative = 1e-14
        );
        assert!(matches!(lp_norm(&one, 0.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn hs_fixtures() {
        let g = Grid::new(16).unwrap();
        let s = to_spectral(&cos_e2(g)).unwrap();
        let expected = (TWO_PI.powi(3) / 2.0).sqrt();
        assert_relative_eq!(hs_norm(&s, 0.5).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(expected, 11.137, epsilon = 1e-3);
        assert_relative_eq!(
            hs_norm(&s, 0.0).unwrap(),
            lp_norm(&cos_e2(g), 2.0).unwrap(),
            max_relative = 1e-12
        );
        assert_eq!(hs_norm(&SpectralVectorField::zeros(g), 1.5).unwrap(), 0.0);
    }

    #[test]
    fn negative_s_needs_zero_mean() {
        let g = Grid::new(8).unwrap();
        let mut s = SpectralVectorField::zeros(g);
        s.set_mode([0, 0, 0], [Complex64::new(1.0, 0.0); 3]);
        assert!(matches!(hs_norm(&s, -0.5), Err(Error::Domain(_))));
        assert!(hs_norm(&s, 0.5).unwrap() == 0.0);
    }

    #[test]
    fn zero_trajectory_has_zero_functionals() {
        let g = Grid::new(8).unwrap();
        let params = make_params(2.0, 2.0, 1.0).unwrap();
        let mut series = MonitorSeries::new(params, "test");
        let mut e = ElsasserState::zeros(g);
        for i in 0..4 {
            e.time = i as f64 * 0.1;
            series.record(&e).unwrap();
        }
        assert!(series
            .rows
            .iter()
            .all(|r| r.a_minus_l3 == 0.0 && r.a_minus_h12 == 0.0));
    }

    #[test]
    fn first_row_functional() {
        let g = Grid::new(16).unwrap();
        let params = make_params(1.0, 0.5, 1.0).unwrap();
        let wm = to_spectral(&cos_e2(g)).unwrap();
        let e = ElsasserState::new(wm.scaled(2.0), wm.clone(), 0.0).unwrap();
        let mut series = MonitorSeries::new(params, "test");
        series.record(&e).unwrap();
        let l3 = lp_norm(&cos_e2(g), 3.0).unwrap();
        let row = series.rows[0];
        assert_relative_eq!(
            row.a_minus_l3,
            l3.powi(3) / params.kappa().powi(3),
            max_relative = 1e-13
        );
        assert_eq!(row.h32_wm_sq_int, 0.0);
    }

    #[test]
    fn time_regression_rejected() {
        let g = Grid::new(8).unwrap();
        let params = make_params(1.0, 1.0, 1.0).unwrap();
        let mut series = MonitorSeries::new(params, "test");
        let mut e = ElsasserState::zeros(g);
        e.time = 0.0;
        series.record(&e).unwrap();
        e.time = 0.0;
        assert!(matches!(series.record(&e), Err(Error::Ordering { .. })));
        let mut loaded = MonitorSeries::from_rows(series.rows.clone(), params, "x");
        e.time = 1.0;
        assert!(matches!(loaded.record(&e), Err(Error::NotResumable(_))));
    }
}
