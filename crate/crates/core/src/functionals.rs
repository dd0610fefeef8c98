//! Extremals, sharp constants, deficits and the lifting map between the
//! GN and Sobolev sides.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::{beta_moment, ParamSet};
use crate::profile::{CylField, RadialProfile};
use crate::quad::{gradient_norm, h1_seminorm, lp_norm, QuadratureGrid};

/// Radii below this bound count as the finite part of the grid when checking
/// that a profile stays positive; beyond it `u` may legitimately underflow.
const POSITIVITY_RADIUS: f64 = 1e8;

/// Relative mismatch tolerated by preconditions that compare two quadratures.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// The GN extremal `v_{λ,0}(r) = λ^{n/2t} (1 + λ² r²)^{-1/(t-1)}`.
pub fn extremal_v(p: &ParamSet, lambda: f64) -> RadialProfile {
    RadialProfile::atom(lambda.powf(p.dilation_weight()), lambda, p.extremal_power())
}

/// The Sobolev extremal `z F_{s,0}`.
pub fn extremal_f(p: &ParamSet, s: f64, z: f64) -> CylField {
    CylField::extremal(p, s, z)
}

/// The three norms entering the GN inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnNorms {
    /// `‖∇u‖_2`
    pub grad: f64,
    /// `‖u‖_{t+1}`
    pub low: f64,
    /// `‖u‖_{2t}`
    pub high: f64,
}

impl GnNorms {
    pub fn of(u: &RadialProfile, p: &ParamSet, g: &QuadratureGrid) -> Result<Self> {
        Ok(Self {
            grad: gradient_norm(u, p, g)?,
            low: lp_norm(u, p.t() + 1.0, p, g)?,
            high: lp_norm(u, 2.0 * p.t(), p, g)?,
        })
    }

    /// `‖u‖_{t+1}^{t+1} / ‖∇u‖_2^2`, the quantity fixed by the ratio normalization.
    pub fn ratio(&self, p: &ParamSet) -> f64 {
        self.low.powf(p.t() + 1.0) / (self.grad * self.grad)
    }
}

/// Sharp GN constant `A_{n,t} = ‖v‖_{2t} / (‖∇v‖_2^μ ‖v‖_{t+1}^{1-μ})`.
pub fn sharp_a(p: &ParamSet, g: &QuadratureGrid) -> Result<f64> {
    let nv = GnNorms::of(&extremal_v(p, 1.0), p, g)?;
    Ok(nv.high / (nv.grad.powf(p.mu()) * nv.low.powf(1.0 - p.mu())))
}

/// Sharp Sobolev constant `S_{m,n} = ‖F‖_{2*} / ‖F‖_{Ḣ¹}`.
pub fn sharp_s(p: &ParamSet, g: &QuadratureGrid) -> Result<f64> {
    let f = extremal_f(p, 1.0, 1.0);
    Ok(lp_norm(&f, p.two_star(), p, g)? / h1_seminorm(&f, p, g)?)
}

/// `C_1 = (∫_0^∞ (1+θ²)^{-(m+n)} ω_m θ^{m-1} dθ)^{2/2*}` in closed form.
pub fn c1_constant(p: &ParamSet) -> f64 {
    let integral = p.omega_m() * beta_moment(p.m(), p.total_dim()).expect("m+n > m/2 always");
    integral.powf(2.0 / p.two_star())
}

/// `C_1` with the moment integral done by quadrature instead.
pub fn c1_quadrature(p: &ParamSet, g: &QuadratureGrid) -> Result<f64> {
    g.check_params(p)?;
    let d = p.total_dim();
    let integral = g.integrate_height(|rho| (1.0 + rho * rho).powf(-d));
    Ok(integral.powf(2.0 / p.two_star()))
}

/// `‖v‖_{2t}^{2t} = ω_n ∫ r^{n-1} (1+r²)^{-2t/(t-1)} dr` in closed form.
pub fn extremal_v_mass(p: &ParamSet) -> f64 {
    let power = 2.0 * p.t() * p.extremal_power();
    p.omega_n() * beta_moment(p.n_f64(), power).expect("2t/(t-1) > n/2 on the admissible range")
}

/// `‖F‖_{2*}` in closed form, integrating out `ρ` first.
pub fn extremal_f_critical_norm(p: &ParamSet) -> f64 {
    let d = p.total_dim();
    let inner = p.omega_m() * beta_moment(p.m(), d).expect("m+n > m/2 always");
    let outer = p.omega_n() * beta_moment(p.n_f64(), d - p.m() / 2.0).expect("m/2+n > n/2 always");
    (inner * outer).powf(1.0 / p.two_star())
}

/// All sharp constants for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpConstants {
    pub a: f64,
    pub s: f64,
    pub c1: f64,
}

impl SharpConstants {
    pub fn compute(p: &ParamSet, g: &QuadratureGrid) -> Result<Self> {
        Ok(Self {
            a: sharp_a(p, g)?,
            s: sharp_s(p, g)?,
            c1: c1_constant(p),
        })
    }
}

fn gn_deficit_from(norms: &GnNorms, a: f64, p: &ParamSet) -> (f64, f64) {
    let k = p.deficit_power();
    let mu = p.mu();
    let first = a.powf(k) * norms.grad.powf(mu * k) * norms.low.powf((1.0 - mu) * k);
    let second = norms.high.powf(k);
    (first - second, first)
}

/// `δ_GN[u] = A^{4t/2*} ‖∇u‖^{4tμ/2*} ‖u‖_{t+1}^{4t(1-μ)/2*} - ‖u‖_{2t}^{4t/2*}`.
pub fn gn_deficit(u: &RadialProfile, p: &ParamSet, g: &QuadratureGrid) -> Result<f64> {
    let a = sharp_a(p, g)?;
    Ok(gn_deficit_from(&GnNorms::of(u, p, g)?, a, p).0)
}

/// `S² ‖φ‖²_{Ḣ¹} - ‖φ‖²_{2*}`.
pub fn sobolev_deficit(phi: &CylField, p: &ParamSet, g: &QuadratureGrid) -> Result<f64> {
    let s = sharp_s(p, g)?;
    sobolev_deficit_with(phi, s, p, g)
}

pub(crate) fn sobolev_deficit_with(
    phi: &CylField,
    s: f64,
    p: &ParamSet,
    g: &QuadratureGrid,
) -> Result<f64> {
    let h1 = h1_seminorm(phi, p, g)?;
    let crit = lp_norm(phi, p.two_star(), p, g)?;
    Ok(s * s * h1 * h1 - crit * crit)
}

/// Lifts `u` to `φ_u = [u^{-4/(m+2n-4)} + ρ²]^{-γ}`.
///
/// Fails if `u` is negative anywhere on the grid, or vanishes on its finite part.
pub fn lift(u: &RadialProfile, p: &ParamSet, g: &QuadratureGrid) -> Result<CylField> {
    g.check_params(p)?;
    for &r in &g.radial.nodes {
        let val = u.eval(r);
        if val.is_nan() || val < 0.0 || (val == 0.0 && r < POSITIVITY_RADIUS) {
            return Err(domain(format!(
                "profile is not strictly positive at r = {r:.6e} (u = {val:.3e}); \
                 the lift needs u > 0, shrink the perturbation amplitude"
            )));
        }
    }
    Ok(CylField::lifted(u.clone(), p))
}

/// Mass-preserving dilation `u_λ(r) = λ^{n/2t} u(λ r)`.
pub fn scale_u(u: &RadialProfile, lambda: f64, p: &ParamSet) -> RadialProfile {
    u.dilated(lambda, lambda.powf(p.dilation_weight()))
}

/// Dilates `u` so that `‖u‖_{t+1}^{t+1}/‖∇u‖²` matches the value for `v`.
pub fn normalize_ratio(u: &RadialProfile, p: &ParamSet, g: &QuadratureGrid) -> Result<RadialProfile> {
    let e = p.ratio_scaling_exponent();
    if e == 0.0 {
        return Err(Error::Internal("ratio scaling exponent vanished".into()));
    }
    let target = GnNorms::of(&extremal_v(p, 1.0), p, g)?.ratio(p);
    let current = GnNorms::of(u, p, g)?.ratio(p);
    if !(current > 0.0) || !current.is_finite() {
        return Err(domain("profile has vanishing or infinite norm ratio"));
    }
    let lambda = (target / current).powf(1.0 / e);
    Ok(scale_u(u, lambda, p))
}

/// Rescales `u` by a constant so that `‖u‖_{2t} = ‖v‖_{2t}`.
pub fn normalize_mass(u: &RadialProfile, p: &ParamSet, g: &QuadratureGrid) -> Result<RadialProfile> {
    let target = lp_norm(&extremal_v(p, 1.0), 2.0 * p.t(), p, g)?;
    let current = lp_norm(u, 2.0 * p.t(), p, g)?;
    if !(current > 0.0) {
        return Err(domain("cannot mass-normalize a profile with zero L^{2t} norm"));
    }
    Ok(u.scaled(target / current))
}

/// Both deficits of `u` and the residual of the identity linking them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub gn_deficit: f64,
    pub sobolev_deficit: f64,
    pub c1: f64,
    /// `|C_1^{-1} · sobolev_deficit - gn_deficit|`
    pub identity_residual: f64,
    /// `max(|δ_GN|, C_1^{-1}|sobolev_deficit|, ‖u‖_{2t}^{4t/2*})`, the yardstick for the residual.
    pub scale: f64,
}

impl DeficitReport {
    pub fn relative_residual(&self) -> f64 {
        self.identity_residual / self.scale
    }
}

/// Evaluates `C_1^{-1}(S²‖φ_u‖²_{Ḣ¹} - ‖φ_u‖²_{2*})` and `δ_GN[u]` for a
/// ratio-normalized `u`.
pub fn deficit_identity(u: &RadialProfile, p: &ParamSet, g: &QuadratureGrid) -> Result<DeficitReport> {
    let consts = SharpConstants::compute(p, g)?;
    let norms = GnNorms::of(u, p, g)?;
    let target = GnNorms::of(&extremal_v(p, 1.0), p, g)?.ratio(p);
    let ratio = norms.ratio(p);
    if ((ratio - target) / target).abs() > NORMALIZATION_TOL {
        return Err(Error::Precondition(format!(
            "profile ratio ‖u‖_(t+1)^(t+1)/‖∇u‖² = {ratio:.9e} differs from the extremal's {target:.9e}; \
             call normalize_ratio first"
        )));
    }
    let (gn, _) = gn_deficit_from(&norms, consts.a, p);
    let phi = lift(u, p, g)?;
    let sob = sobolev_deficit_with(&phi, consts.s, p, g)?;
    let residual = (sob / consts.c1 - gn).abs();
    let scale = gn.abs().max((sob / consts.c1).abs()).max(norms.high.powf(p.deficit_power()));
    Ok(DeficitReport {
        gn_deficit: gn,
        sobolev_deficit: sob,
        c1: consts.c1,
        identity_residual: residual,
        scale,
    })
}

/// The first (sharp-constant) term of the GN deficit, used as a tolerance yardstick.
pub fn gn_leading_term(u: &RadialProfile, p: &ParamSet, g: &QuadratureGrid) -> Result<f64> {
    let a = sharp_a(p, g)?;
    Ok(gn_deficit_from(&GnNorms::of(u, p, g)?, a, p).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;
    use crate::quad::build_grid;

    #[test]
    fn extremal_v_values() {
        let p = derive_params(2, 3.0).unwrap();
        let v = extremal_v(&p, 1.0);
        assert!((v.eval(0.0) - 1.0).abs() < 1e-15);
        assert!((v.eval(1.0) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn extremal_f_at_origin() {
        let p = derive_params(2, 3.0).unwrap();
        assert!((extremal_f(&p, 1.0, 1.0).eval(0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn c1_closed_form_m2() {
        let p = derive_params(2, 3.0).unwrap();
        let expected = (std::f64::consts::PI / 3.0).sqrt();
        assert!((c1_constant(&p) - expected).abs() < 1e-14);
    }

    #[test]
    fn scale_identity_at_one() {
        let p = derive_params(3, 2.0).unwrap();
        let u = extremal_v(&p, 1.0).plus(0.1, &RadialProfile::atom(1.0, 1.0, 3.0));
        let same = scale_u(&u, 1.0, &p);
        for &r in &[0.0, 0.7, 3.0] {
            assert_eq!(same.eval(r), u.eval(r));
        }
    }

    #[test]
    fn lift_rejects_sign_change() {
        let p = derive_params(2, 3.0).unwrap();
        let g = build_grid(&p, 16).unwrap();
        let u = extremal_v(&p, 1.0).plus(-2.0, &RadialProfile::atom(1.0, 1.0, 1.5));
        assert!(matches!(lift(&u, &p, &g), Err(Error::Domain(_))));
    }

    #[test]
    fn unnormalized_input_rejected() {
        let p = derive_params(2, 3.0).unwrap();
        let g = build_grid(&p, 32).unwrap();
        let u = extremal_v(&p, 2.0);
        assert!(matches!(deficit_identity(&u, &p, &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn mass_normalize_zero_fails() {
        let p = derive_params(2, 3.0).unwrap();
        let g = build_grid(&p, 16).unwrap();
        assert!(normalize_mass(&RadialProfile::zero(), &p, &g).is_err());
    }
}
