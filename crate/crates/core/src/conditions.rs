//! Smallness conditions for global existence.
//!
//! Two families are evaluated on the initial data: the `L³` form, valid when
//! `λ = 0`, and the `Ḣ^{1/2}` form with its `λ/κ` corrections. Each has a
//! variant and its mirror with `W⁺₀` and `W⁻₀` exchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{ElsasserState, FluidParams};
use crate::norms::{hs_norm, lp_norm};
use crate::spectral::physical_pair;

/// User-chosen values for the generic constants `ε₀` and `C₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionParams {
    pub epsilon0: f64,
    pub c0: f64,
}

impl Default for ConditionParams {
    fn default() -> Self {
        ConditionParams {
            epsilon0: 0.01,
            c0: 1.0,
        }
    }
}

impl ConditionParams {
    pub fn new(epsilon0: f64, c0: f64) -> Result<Self> {
        let cp = ConditionParams { epsilon0, c0 };
        cp.validate()?;
        Ok(cp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon0 > 0.0 && self.epsilon0 < 0.5) {
            return Err(Error::Parameter(format!(
                "epsilon0 must be in (0, 0.5), got {}",
                self.epsilon0
            )));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::Parameter(format!("c0 must be > 0, got {}", self.c0)));
        }
        Ok(())
    }

    /// `ε₀^{1/4}`, the bound on `|λ|/κ` implied by either `Ḣ^{1/2}` condition.
    pub fn implied_ratio_bound(&self) -> f64 {
        self.epsilon0.powf(0.25)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// `L³` form, smallness of `W⁻₀`.
    #[serde(rename = "thm1-2.1")]
    Thm1Minus,
    /// `L³` form, smallness of `W⁺₀`.
    #[serde(rename = "thm1-2.2")]
    Thm1Plus,
    /// `Ḣ^{1/2}` form, smallness of `W⁻₀`.
    #[serde(rename = "thm2-2.7")]
    Thm2Minus,
    /// `Ḣ^{1/2}` form, smallness of `W⁺₀`.
    #[serde(rename = "thm2-2.8")]
    Thm2Plus,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::Thm1Minus,
        Condition::Thm1Plus,
        Condition::Thm2Minus,
        Condition::Thm2Plus,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Condition::Thm1Minus => "thm1-2.1",
            Condition::Thm1Plus => "thm1-2.2",
            Condition::Thm2Minus => "thm2-2.7",
            Condition::Thm2Plus => "thm2-2.8",
        }
    }

    pub fn is_thm2(&self) -> bool {
        matches!(self, Condition::Thm2Minus | Condition::Thm2Plus)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub which: Condition,
    pub lhs: f64,
    pub epsilon0: f64,
    pub holds: bool,
    pub lambda_kappa_ratio: f64,
    pub implied_ratio_bound: f64,
    /// Set for the `L³` conditions when `λ ≠ 0`, outside their hypothesis.
    pub lambda_nonzero: bool,
}

/// The initial-data norms the conditions depend on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialNorms {
    pub l3_wp: f64,
    pub l3_wm: f64,
    pub h12_wp: f64,
    pub h12_wm: f64,
}

impl InitialNorms {
    pub fn compute(w0: &ElsasserState) -> Result<Self> {
        let (pp, pm) = physical_pair(&w0.w_plus, &w0.w_minus);
        Ok(InitialNorms {
            l3_wp: lp_norm(&pp, 3.0)?,
            l3_wm: lp_norm(&pm, 3.0)?,
            h12_wp: hs_norm(&w0.w_plus, 0.5)?,
            h12_wm: hs_norm(&w0.w_minus, 0.5)?,
        })
    }

    pub fn swapped(&self) -> Self {
        InitialNorms {
            l3_wp: self.l3_wm,
            l3_wm: self.l3_wp,
            h12_wp: self.h12_wm,
            h12_wm: self.h12_wp,
        }
    }
}

/// `κ⁻³ small³ · exp(C₀ κ⁻³ large³)`.
pub fn thm1_lhs(kappa: f64, small_l3: f64, large_l3: f64, c0: f64) -> f64 {
    let a = small_l3 / kappa;
    let b = large_l3 / kappa;
    let prefactor = a.powi(3);
    if prefactor == 0.0 {
        return 0.0;
    }
    prefactor * (c0 * b.powi(3)).exp()
}

/// `(κ⁻² small² + r²(κ⁻² large² + r²)) · exp(C₀(κ⁻⁴ large⁴ + r⁴))` with
/// `r = λ/κ`.
pub fn thm2_lhs(kappa: f64, lambda: f64, small_h12: f64, large_h12: f64, c0: f64) -> f64 {
    let r2 = (lambda / kappa).powi(2);
    let a2 = (small_h12 / kappa).powi(2);
    let b2 = (large_h12 / kappa).powi(2);
    let prefactor = a2 + r2 * (b2 + r2);
    if prefactor == 0.0 {
        return 0.0;
    }
    prefactor * (c0 * (b2 * b2 + r2 * r2)).exp()
}

/// Evaluates one condition from precomputed initial norms.
pub fn evaluate_from_norms(
    params: &FluidParams,
    norms: &InitialNorms,
    cp: &ConditionParams,
    which: Condition,
) -> ConditionReport {
    let kappa = params.kappa();
    let lambda = params.lambda();
    let lhs = match which {
        Condition::Thm1Minus => thm1_lhs(kappa, norms.l3_wm, norms.l3_wp, cp.c0),
        Condition::Thm1Plus => thm1_lhs(kappa, norms.l3_wp, norms.l3_wm, cp.c0),
        Condition::Thm2Minus => thm2_lhs(kappa, lambda, norms.h12_wm, norms.h12_wp, cp.c0),
        Condition::Thm2Plus => thm2_lhs(kappa, lambda, norms.h12_wp, norms.h12_wm, cp.c0),
    };
    ConditionReport {
        which,
        lhs,
        epsilon0: cp.epsilon0,
        holds: lhs < cp.epsilon0,
        lambda_kappa_ratio: params.lambda_kappa_ratio(),
        implied_ratio_bound: cp.implied_ratio_bound(),
        lambda_nonzero: !which.is_thm2() && lambda != 0.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Thm1Variant {
    /// Smallness of `W⁻₀`.
    Eq21,
    /// Smallness of `W⁺₀`.
    Eq22,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Thm2Variant {
    /// Smallness of `W⁻₀`.
    Eq27,
    /// Smallness of `W⁺₀`.
    Eq28,
}

pub fn evaluate_thm1(
    params: &FluidParams,
    w0: &ElsasserState,
    cp: &ConditionParams,
    variant: Thm1Variant,
) -> Result<ConditionReport> {
    let norms = InitialNorms::compute(w0)?;
    let which = match variant {
        Thm1Variant::Eq21 => Condition::Thm1Minus,
        Thm1Variant::Eq22 => Condition::Thm1Plus,
    };
    Ok(evaluate_from_norms(params, &norms, cp, which))
}

pub fn evaluate_thm2(
    params: &FluidParams,
    w0: &ElsasserState,
    cp: &ConditionParams,
    variant: Thm2Variant,
) -> Result<ConditionReport> {
    let norms = InitialNorms::compute(w0)?;
    let which = match variant {
        Thm2Variant::Eq27 => Condition::Thm2Minus,
        Thm2Variant::Eq28 => Condition::Thm2Plus,
    };
    Ok(evaluate_from_norms(params, &norms, cp, which))
}

/// All four reports, in the order of [`Condition::ALL`].
pub fn evaluate_all(
    params: &FluidParams,
    w0: &ElsasserState,
    cp: &ConditionParams,
) -> Result<Vec<ConditionReport>> {
    let norms = InitialNorms::compute(w0)?;
    Ok(Condition::ALL
        .iter()
        .map(|&c| evaluate_from_norms(params, &norms, cp, c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{generate_initial, make_params, to_elsasser, InitialDataSpec};
    use crate::spectral::Grid;
    use approx::assert_relative_eq;

    fn norms(l3p: f64, l3m: f64, hp: f64, hm: f64) -> InitialNorms {
        InitialNorms {
            l3_wp: l3p,
            l3_wm: l3m,
            h12_wp: hp,
            h12_wm: hm,
        }
    }

    #[test]
    fn vanishing_minus_field_satisfies_thm1() {
        let g = Grid::new(8).unwrap();
        let spec = InitialDataSpec::taylor_green(3.0).with_magnetic(1.0, 0.0);
        let w0 = to_elsasser(&generate_initial(&spec, g).unwrap()).unwrap();
        let params = make_params(1.0, 1.0, 1.0).unwrap();
        for eps in [1e-12, 1e-3, 0.49] {
            let cp = ConditionParams::new(eps, 1.0).unwrap();
            let r = evaluate_thm1(&params, &w0, &cp, Thm1Variant::Eq21).unwrap();
            assert_eq!(r.lhs, 0.0);
            assert!(r.holds);
            assert!(!r.lambda_nonzero);
        }
    }

    #[test]
    fn thm1_arithmetic() {
        let params = make_params(1.0, 1.0, 1.0).unwrap();
        let cp = ConditionParams::new(0.01, 1.0).unwrap();
        let n = norms(1.0, 0.1, 0.0, 0.0);
        let r = evaluate_from_norms(&params, &n, &cp, Condition::Thm1Minus);
        assert_relative_eq!(r.lhs, 0.001 * std::f64::consts::E, max_relative = 1e-14);
        assert_relative_eq!(r.lhs, 0.00272, epsilon = 1e-5);
        assert!(r.holds);
        let mirrored = evaluate_from_norms(&params, &n.swapped(), &cp, Condition::Thm1Plus);
        assert_eq!(mirrored.lhs, r.lhs);
    }

    #[test]
    fn thm2_arithmetic() {
        let params = FluidParams::from_diffusivities(1.0, 0.1, 1.0).unwrap();
        let cp = ConditionParams::new(0.05, 1.0).unwrap();
        let n = norms(0.0, 0.0, 1.0, 0.1);
        let r = evaluate_from_norms(&params, &n, &cp, Condition::Thm2Minus);
        let expected = (0.01 + 0.01 * 1.01) * 1.0001f64.exp();
        assert_relative_eq!(r.lhs, expected, max_relative = 1e-14);
        assert_relative_eq!(r.lhs, 0.0546, epsilon = 1e-4);
        assert!(!r.holds);
        assert_relative_eq!(r.lambda_kappa_ratio, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn thm2_zero_case() {
        let params = make_params(2.0, 2.0, 1.0).unwrap();
        let cp = ConditionParams::default();
        let r = evaluate_from_norms(
            &params,
            &norms(0.0, 0.0, 5.0, 0.0),
            &cp,
            Condition::Thm2Minus,
        );
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn thm1_flags_nonzero_lambda() {
        let params = make_params(1.0, 2.0, 1.0).unwrap();
        let cp = ConditionParams::default();
        let r = evaluate_from_norms(
            &params,
            &norms(0.0, 0.0, 0.0, 0.0),
            &cp,
            Condition::Thm1Minus,
        );
        assert!(r.lambda_nonzero);
        let r = evaluate_from_norms(
            &params,
            &norms(0.0, 0.0, 0.0, 0.0),
            &cp,
            Condition::Thm2Minus,
        );
        assert!(!r.lambda_nonzero);
    }

    #[test]
    fn condition_params_validation() {
        assert!(ConditionParams::new(0.5, 1.0).is_err());
        assert!(ConditionParams::new(0.0, 1.0).is_err());
        assert!(ConditionParams::new(0.1, 0.0).is_err());
        assert_eq!(
            ConditionParams::default(),
            ConditionParams::new(0.01, 1.0).unwrap()
        );
    }

    #[test]
    fn overflow_does_not_hold() {
        let params = make_params(1.0, 1.0, 1.0).unwrap();
        let cp = ConditionParams::default();
        let r = evaluate_from_norms(
            &params,
            &norms(100.0, 1e-3, 100.0, 1e-3),
            &cp,
            Condition::Thm1Minus,
        );
        assert!(r.lhs.is_infinite());
        assert!(!r.holds);
    }
}
