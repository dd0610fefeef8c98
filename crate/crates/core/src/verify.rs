//! Numerical checks of the stability estimate, the two lemmas behind it, the
//! pointwise bound used on the set `{H/2 ≤ w_u < H}`, and the
//! Bianchi–Egnell quotient.

use serde::{Deserialize, Serialize};

use crate::corpus::{orthogonal_direction, BumpShape, CorpusMember, Normalization};
use crate::error::{domain, Error, Result};
use crate::fit::{fit_loglog, local_slopes, LogLogFit};
use crate::functionals::{
    extremal_f_critical_norm, extremal_v, extremal_v_mass, gn_deficit, lift, GnNorms, NORMALIZATION_TOL,
};
use crate::manifold::{h1_distance, l1_gn_distance, lp_distance, BeTerms};
use crate::params::{beta_moment, ParamSet};
use crate::profile::{CylField, RadialProfile};
use crate::quad::{integrate_ball, lp_norm, QuadratureGrid};

/// Local slopes further apart than this count as curvature in a log-log fit.
const CURVATURE_TOL: f64 = 0.05;
/// Gauss-Jacobi order for the truncated integral in `C_5`.
const BALL_ORDER: usize = 48;

/// Deficits and `L¹` distances along `u_ε = normalize_mass(v + ε bump)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub params: ParamSet,
    pub bump: BumpShape,
    /// Decreasing.
    pub epsilons: Vec<f64>,
    pub deficits: Vec<f64>,
    pub l1_distances: Vec<f64>,
    pub lambda_opts: Vec<f64>,
    /// `Ḣ¹` distance of the lifted profile, for reference.
    pub h1_distances: Vec<f64>,
    /// Slope of `ln l1_distance` against `ln deficit`; absent with fewer than 4 usable points.
    pub fitted_slope: Option<f64>,
    pub residual: Option<f64>,
    /// Points that entered the fit (the two largest `ε` may be dropped on curvature).
    pub points_used: usize,
    /// False when deficits fail to decrease with `ε`, i.e. the quadrature noise floor was reached.
    pub monotone: bool,
    /// `max l1_distance / deficit^{1/2}` over the sweep.
    pub k1_estimate: f64,
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn sorted_epsilons(eps: &[f64], max: f64) -> Result<Vec<f64>> {
    if eps.len() < 4 {
        return Err(domain(format!("a probe needs at least 4 amplitudes, got {}", eps.len())));
    }
    if let Some(bad) = eps.iter().find(|e| !(**e > 0.0 && **e <= max)) {
        return Err(domain(format!("amplitude {bad} is outside (0, {max}]")));
    }
    let mut out = eps.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    out.dedup();
    Ok(out)
}

/// Fits the log-log slope, dropping the two largest-`ε` points when there are
/// at least 6 and the local slopes show curvature.
fn asymptotic_fit(xs: &[f64], ys: &[f64]) -> Option<LogLogFit> {
    if xs.len() < 4 {
        return None;
    }
    let slopes = local_slopes(xs, ys);
    let curved = slopes.len() >= 2 && (slopes[0] - slopes[slopes.len() - 1]).abs() > CURVATURE_TOL;
    let skip = if xs.len() >= 6 && curved { 2 } else { 0 };
    fit_loglog(&xs[skip..], &ys[skip..]).ok()
}

/// Sweeps `ε` and fits `ln ‖u^{2t} - v_λ^{2t}‖_1` against `ln δ_GN[u]`.
pub fn stability_probe(
    p: &ParamSet,
    g: &QuadratureGrid,
    bump: BumpShape,
    epsilons: &[f64],
) -> Result<ProbeResult> {
    let eps = sorted_epsilons(epsilons, 0.2_f64.min(bump.max_epsilon()))?;
    let mut deficits = Vec::with_capacity(eps.len());
    let mut l1 = Vec::with_capacity(eps.len());
    let mut lambdas = Vec::with_capacity(eps.len());
    let mut h1 = Vec::with_capacity(eps.len());
    for &e in &eps {
        let member = CorpusMember::build(p, g, vec![(bump, e)], Normalization::Mass)?;
        let u = &member.profile;
        deficits.push(gn_deficit(u, p, g)?);
        let fit = l1_gn_distance(u, p, g)?;
        l1.push(fit.distance);
        lambdas.push(fit.scale());
        h1.push(h1_distance(&lift(u, p, g)?, p, g)?.distance);
    }
    let monotone = strictly_decreasing(&deficits) && deficits.iter().all(|d| *d > 0.0);
    let fit = if monotone { asymptotic_fit(&deficits, &l1) } else { None };
    let k1_estimate = l1
        .iter()
        .zip(&deficits)
        .map(|(d, def)| d / def.max(0.0).sqrt())
        .fold(0.0, f64::max);
    Ok(ProbeResult {
        params: *p,
        bump,
        epsilons: eps,
        deficits,
        l1_distances: l1,
        lambda_opts: lambdas,
        h1_distances: h1,
        fitted_slope: fit.map(|f| f.slope),
        residual: fit.map(|f| f.residual),
        points_used: fit.map_or(0, |f| f.points),
        monotone,
        k1_estimate,
    })
}

/// Quotients `deficit / (d^β ‖φ‖^{2-β})` along `φ_ε = F + ε η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub params: ParamSet,
    pub beta: f64,
    /// Decreasing.
    pub epsilons: Vec<f64>,
    pub ratios: Vec<f64>,
    pub sobolev_deficits: Vec<f64>,
    pub h1_distances: Vec<f64>,
    pub h1_norms: Vec<f64>,
    /// The ratios decrease strictly along the sweep.
    pub strictly_decreasing: bool,
}

impl SharpnessResult {
    /// `ratio(ε) / ratio(ε/2)`-style factors between consecutive sweep points.
    pub fn decay_factors(&self) -> Vec<f64> {
        self.ratios.windows(2).map(|w| w[0] / w[1]).collect()
    }
}

/// Evaluates the Bianchi–Egnell quotient with exponent `β` along a direction
/// transversal to the extremal manifold.
pub fn sharpness_probe(p: &ParamSet, g: &QuadratureGrid, beta: f64, epsilons: &[f64]) -> Result<SharpnessResult> {
    if !(beta <= 2.0) || !(beta >= 0.0) {
        return Err(domain(format!("sharpness exponent β = {beta} must lie in [0, 2]")));
    }
    let eps = sorted_epsilons(epsilons, 0.2)?;
    let eta = orthogonal_direction(p, g)?;
    let f = CylField::extremal(p, 1.0, 1.0);
    let mut out = SharpnessResult {
        params: *p,
        beta,
        epsilons: eps.clone(),
        ratios: Vec::new(),
        sobolev_deficits: Vec::new(),
        h1_distances: Vec::new(),
        h1_norms: Vec::new(),
        strictly_decreasing: false,
    };
    for &e in &eps {
        let terms = BeTerms::compute(&f.plus(e, &eta), p, g)?;
        out.ratios.push(terms.ratio(beta)?);
        out.sobolev_deficits.push(terms.sobolev_deficit);
        out.h1_distances.push(terms.fit.distance);
        out.h1_norms.push(terms.h1_norm);
    }
    out.strictly_decreasing = strictly_decreasing(&out.ratios);
    Ok(out)
}

/// Outcome of one lemma check on one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheckRecord {
    pub params: ParamSet,
    pub input_id: String,
    pub hypothesis_ok: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub margin: f64,
    pub note: Option<String>,
}

impl LemmaCheckRecord {
    /// True unless the hypothesis held and the inequality failed.
    pub fn passes(&self) -> bool {
        !self.hypothesis_ok || self.margin >= 0.0
    }

    fn skipped(p: &ParamSet, id: &str, note: String) -> Self {
        Self {
            params: *p,
            input_id: id.to_string(),
            hypothesis_ok: false,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            note: Some(note),
        }
    }
}

fn geometric_factor(p: &ParamSet) -> f64 {
    // (ω_m ω_n / (m n))^{1/2*}
    (p.omega_m() * p.omega_n() / (p.m() * p.n_f64())).powf(1.0 / p.two_star())
}

/// The three-term minimum bounding `δ^{1/2}` in the `L^{2*}` lemma.
pub fn lemma31_cap(p: &ParamSet) -> f64 {
    let (g, s) = (p.gamma(), p.two_star());
    let geo = geometric_factor(p);
    let f_crit = extremal_f_critical_norm(p).powf(s);
    let second = (4f64.powf(g) - 3f64.powf(g)) / (12f64.powf(g) * 3f64.powf(1.0 + 1.0 / s)) * geo;
    let third = g / (12f64.powf(g) * 2f64.powf(4.0 + g + 1.0 / s)) * geo;
    f_crit.min(second).min(third)
}

/// `C_4 = 2 + 12^γ 2^{3+γ+1/2*} (mn/(ω_m ω_n))^{1/2*} ‖F‖_{2*}`.
pub fn c4_constant(p: &ParamSet) -> f64 {
    let (g, s) = (p.gamma(), p.two_star());
    2.0 + 12f64.powf(g) * 2f64.powf(3.0 + g + 1.0 / s) / geometric_factor(p) * extremal_f_critical_norm(p)
}

/// The default `δ`: a quarter of the cap on `δ^{1/2}`, squared.
pub fn default_lemma31_delta(p: &ParamSet) -> f64 {
    (0.25 * lemma31_cap(p)).powi(2)
}

/// Checks `‖φ - F‖_{2*} ≤ C_4 δ^{1/2}` on lifted, mass-normalized corpus
/// members whose `L^{2*}` distance to the manifold is at most `δ^{1/2}`.
pub fn check_lemma31(
    p: &ParamSet,
    g: &QuadratureGrid,
    corpus: &[CorpusMember],
    delta: Option<f64>,
) -> Result<Vec<LemmaCheckRecord>> {
    let cap = lemma31_cap(p);
    let delta = delta.unwrap_or_else(|| default_lemma31_delta(p));
    let root = delta.sqrt();
    if !(root > 0.0 && root < cap) {
        return Err(Error::Precondition(format!(
            "δ^(1/2) = {root:.6e} must lie in (0, {cap:.6e})"
        )));
    }
    let c4 = c4_constant(p);
    let f = CylField::extremal(p, 1.0, 1.0);
    let f_norm = lp_norm(&f, p.two_star(), p, g)?;
    corpus
        .iter()
        .map(|member| {
            let phi = member.lift(p, g)?;
            let phi_norm = lp_norm(&phi, p.two_star(), p, g)?;
            if ((phi_norm - f_norm) / f_norm).abs() > NORMALIZATION_TOL {
                return Ok(LemmaCheckRecord::skipped(
                    p,
                    &member.id,
                    format!("‖φ‖_2* = {phi_norm:.9e} differs from ‖F‖_2* = {f_norm:.9e}"),
                ));
            }
            let fit = lp_distance(&phi, p, g)?;
            let lhs = lp_norm(&phi.plus(-1.0, &f), p.two_star(), p, g)?;
            let rhs = c4 * root;
            let hypothesis_ok = fit.converged && fit.distance <= root;
            Ok(LemmaCheckRecord {
                params: *p,
                input_id: member.id.clone(),
                hypothesis_ok,
                lhs,
                rhs,
                margin: rhs - lhs,
                note: (!hypothesis_ok).then(|| {
                    format!("manifold distance {:.3e} exceeds δ^(1/2) = {root:.3e}", fit.distance)
                }),
            })
        })
        .collect()
}

/// Ingredients of the displayed `C_5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct C5Parts {
    /// `∫_0^∞ ω_m θ^{m-1} (1+θ²)^{-2*(m+n)/2} dθ`
    pub full_integral: f64,
    /// `∫_0^{√2} ω_m θ^{m-1} (1+θ²)^{-(m+n)} dθ`
    pub truncated_integral: f64,
    pub first: f64,
    pub second: f64,
    /// Whether the `2 < m+n ≤ 4` branch applies.
    pub low_dimension: bool,
    pub c5: f64,
}

/// `C_5(m, n)` with the full-range integral in closed form and the
/// truncated one by Gauss-Jacobi quadrature.
pub fn c5_constant(p: &ParamSet) -> Result<C5Parts> {
    let (m, s, d) = (p.m(), p.two_star(), p.total_dim());
    let full_integral = p.omega_m() * beta_moment(m, s * d / 2.0)?;
    let truncated_integral = integrate_ball(m, 2f64.sqrt(), BALL_ORDER, |th| (1.0 + th * th).powf(-d))?;
    let half = p.half_lifted_dim();
    let first = 2f64.powf(half) * 2.0 * half / (d - 2.0)
        * extremal_v_mass(p).powf(1.0 - 1.0 / s)
        * full_integral.powf(-1.0 / s);
    let low_dimension = d <= 4.0;
    let power = if low_dimension { 3.0 * s } else { s * (d - 1.0) };
    let second = 2f64.powf(power) / (d - 2.0).powf(s) / truncated_integral;
    Ok(C5Parts {
        full_integral,
        truncated_integral,
        first,
        second,
        low_dimension,
        c5: 4.0 * first.max(second),
    })
}

/// Checks `‖u^{2t} - v^{2t}‖_1 ≤ C_5 ‖φ_u - F‖_{2*}` on ratio-normalized
/// corpus members with `‖φ_u - F‖_{2*} ≤ 1`.
pub fn check_lemma41(p: &ParamSet, g: &QuadratureGrid, corpus: &[CorpusMember]) -> Result<Vec<LemmaCheckRecord>> {
    let c5 = c5_constant(p)?.c5;
    let v = extremal_v(p, 1.0);
    let target = GnNorms::of(&v, p, g)?.ratio(p);
    let f = CylField::extremal(p, 1.0, 1.0);
    let two_t = 2.0 * p.t();
    corpus
        .iter()
        .map(|member| {
            let u = &member.profile;
            let ratio = GnNorms::of(u, p, g)?.ratio(p);
            if ((ratio - target) / target).abs() > NORMALIZATION_TOL {
                return Ok(LemmaCheckRecord::skipped(
                    p,
                    &member.id,
                    format!("norm ratio {ratio:.9e} differs from the extremal's {target:.9e}"),
                ));
            }
            let phi = lift(u, p, g)?;
            let dist = lp_norm(&phi.plus(-1.0, &f), p.two_star(), p, g)?;
            let lhs = g.integrate_radial(|r| (u.eval(r).powf(two_t) - v.eval(r).powf(two_t)).abs());
            let rhs = c5 * dist;
            let hypothesis_ok = dist <= 1.0;
            Ok(LemmaCheckRecord {
                params: *p,
                input_id: member.id.clone(),
                hypothesis_ok,
                lhs,
                rhs,
                margin: rhs - lhs,
                note: (!hypothesis_ok).then(|| format!("‖φ_u - F‖_2* = {dist:.3e} exceeds 1")),
            })
        })
        .collect()
}

/// One sample of the pointwise mean-value bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseCheck {
    pub r: f64,
    pub w: f64,
    pub h: f64,
    /// `H/2 ≤ w_u < H`; points outside are skipped.
    pub in_region: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// At each radius with `H/2 ≤ w_u < H`, where `H = 1 + r²`, checks
/// `|w_u^{-(m+2n)/2} - H^{-(m+2n)/2}| ≤ 2^{(m+2n)/2} (m+2n) |H - w_u| / H^{(m+2n)/2+1}`.
pub fn check_est13_pointwise(p: &ParamSet, u: &RadialProfile, radii: &[f64]) -> Vec<PointwiseCheck> {
    let half = p.half_lifted_dim();
    radii
        .iter()
        .map(|&r| {
            let uv = u.eval(r);
            let w = if uv > 0.0 { uv.powf(1.0 - p.t()) } else { f64::INFINITY };
            let h = 1.0 + r * r;
            // w = H/2 is attained exactly only up to rounding in the powers above
            let in_region = w >= 0.5 * h * (1.0 - 1e-12) && w < h;
            let lhs = (w.powf(-half) - h.powf(-half)).abs();
            let rhs = 2f64.powf(half) * 2.0 * half * (h - w).abs() / h.powf(half + 1.0);
            PointwiseCheck {
                r,
                w,
                h,
                in_region,
                lhs,
                rhs,
                holds: !in_region || lhs <= rhs,
            }
        })
        .collect()
}

/// Empirical upper bound for the best Bianchi–Egnell constant on a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    /// Index of the minimizing field.
    pub argmin: usize,
    pub used: usize,
    /// Fields dropped by the distance guard or a failed search.
    pub skipped: usize,
}

/// `min be_ratio` over the fields that pass the degeneracy guard.
pub fn estimate_alpha(p: &ParamSet, g: &QuadratureGrid, fields: &[CylField]) -> Result<AlphaEstimate> {
    let mut best: Option<(usize, f64)> = None;
    let mut skipped = 0;
    for (i, phi) in fields.iter().enumerate() {
        match BeTerms::compute(phi, p, g)?.ratio(2.0) {
            Ok(r) => {
                if best.is_none_or(|(_, b)| r < b) {
                    best = Some((i, r));
                }
            }
            Err(Error::Degenerate(_)) | Err(Error::Domain(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let (argmin, alpha) = best.ok_or_else(|| {
        Error::Degenerate(format!("all {} fields lie too close to the extremal manifold", fields.len()))
    })?;
    Ok(AlphaEstimate {
        alpha,
        argmin,
        used: fields.len() - skipped,
        skipped,
    })
}

/// Lifted single-bump profiles plus fields along the orthogonal direction:
/// 12 fields, all well away from the manifold.
pub fn default_alpha_fields(p: &ParamSet, g: &QuadratureGrid) -> Result<Vec<CylField>> {
    let mut out = Vec::new();
    for shape in BumpShape::ALL {
        for eps in [0.05, 0.1, 0.2] {
            out.push(CorpusMember::build(p, g, vec![(shape, eps)], Normalization::Mass)?.lift(p, g)?);
        }
    }
    let eta = orthogonal_direction(p, g)?;
    let f = CylField::extremal(p, 1.0, 1.0);
    for eps in [0.05, 0.1, 0.2] {
        out.push(f.plus(eps, &eta));
    }
    Ok(out)
}
