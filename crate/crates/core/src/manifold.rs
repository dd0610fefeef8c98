//! Distances from a field (or a GN profile) to the manifold of extremals.
//!
//! All searches run over the dilation parameter on a log scale; the
//! translation parameter stays at the origin because every input is radial.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::functionals::{extremal_v, sobolev_deficit};
use crate::optimize::{golden_section, Minimum};
use crate::params::ParamSet;
use crate::profile::{CylField, RadialProfile};
use crate::quad::{h1_seminorm, FieldSamples, QuadratureGrid};

/// Initial search bracket for `s` (or `λ`).
pub const BRACKET: (f64, f64) = (1.0 / 16.0, 16.0);
/// Bracket used after the minimum was found on an edge of [`BRACKET`].
pub const WIDE_BRACKET: (f64, f64) = (1.0 / 256.0, 256.0);
/// Final width of the search interval in `ln s`, i.e. a relative tolerance on `s`.
pub const SEARCH_TOL: f64 = 1e-6;
/// `be_ratio` refuses fields closer to the manifold than this fraction of their norm.
pub const DEGENERACY_GUARD: f64 = 1e-4;

/// Result of one projection onto the extremal manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldFit {
    pub distance: f64,
    /// Optimal amplitude (1 for the GN-side fit, whose family has no free amplitude).
    pub z_opt: f64,
    /// Optimal Sobolev dilation `s`, for the `Ḣ¹` and `L^{2*}` fits.
    pub s_opt: Option<f64>,
    /// Optimal GN dilation `λ`, for the `L¹` fit.
    pub lambda_opt: Option<f64>,
    /// Objective evaluations spent by the outer search.
    pub iterations: usize,
    /// Bracket of the last search that ran.
    pub bracket: (f64, f64),
    /// False when the minimum sat on an edge of the widened bracket.
    pub converged: bool,
}

impl ManifoldFit {
    /// The dilation parameter of whichever family was fitted.
    pub fn scale(&self) -> f64 {
        self.s_opt.or(self.lambda_opt).unwrap_or(f64::NAN)
    }
}

struct LogSearch {
    min: Minimum,
    bracket: (f64, f64),
    iterations: usize,
    converged: bool,
}

/// Golden-section on `ln x` over [`BRACKET`], widened once on an edge hit.
fn log_search(mut f: impl FnMut(f64) -> f64) -> LogSearch {
    let mut run = |b: (f64, f64)| golden_section(|ls| f(ls.exp()), b.0.ln(), b.1.ln(), SEARCH_TOL);
    let first = run(BRACKET);
    if !first.at_edge {
        return LogSearch {
            iterations: first.evaluations,
            min: first,
            bracket: BRACKET,
            converged: true,
        };
    }
    let second = run(WIDE_BRACKET);
    LogSearch {
        iterations: first.evaluations + second.evaluations,
        converged: !second.at_edge,
        min: second,
        bracket: WIDE_BRACKET,
    }
}

/// Cached samples for minimizing `‖φ - z F_s‖_{Ḣ¹}`.
pub struct H1Projection<'a> {
    p: &'a ParamSet,
    grid: &'a QuadratureGrid,
    weights: Vec<f64>,
    phi: FieldSamples,
    /// `‖F_1‖²_{Ḣ¹}`, which does not depend on `s`.
    f_norm2: f64,
}

impl<'a> H1Projection<'a> {
    pub fn new(phi: &CylField, p: &'a ParamSet, grid: &'a QuadratureGrid) -> Result<Self> {
        // validates grid and decay of φ before anything is sampled
        h1_seminorm(phi, p, grid)?;
        let weights = grid.cell_weights();
        let f1 = grid.sample(&CylField::extremal(p, 1.0, 1.0));
        let f_norm2 = f1.h1_dot(&f1, &weights);
        Ok(Self {
            p,
            grid,
            phi: grid.sample(phi),
            weights,
            f_norm2,
        })
    }

    fn extremal(&self, s: f64) -> FieldSamples {
        self.grid.sample(&CylField::extremal(self.p, s, 1.0))
    }

    /// `z*(s) = ⟨φ, F_s⟩_{Ḣ¹} / ‖F_1‖²_{Ḣ¹}`.
    pub fn optimal_z(&self, s: f64) -> f64 {
        self.phi.h1_dot(&self.extremal(s), &self.weights) / self.f_norm2
    }

    fn residual_with(&self, f: &FieldSamples, z: f64) -> f64 {
        let phi = &self.phi;
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let a = phi.d_r[i] - z * f.d_r[i];
                let b = phi.d_rho[i] - z * f.d_rho[i];
                w * (a * a + b * b)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `‖φ - z F_s‖_{Ḣ¹}`.
    pub fn objective(&self, z: f64, s: f64) -> f64 {
        self.residual_with(&self.extremal(s), z)
    }

    /// `‖φ - z F_s‖_{Ḣ¹}` for several `z` at one `s`.
    pub fn objectives(&self, zs: &[f64], s: f64) -> Vec<f64> {
        let f = self.extremal(s);
        zs.iter().map(|&z| self.residual_with(&f, z)).collect()
    }

    /// `min_z ‖φ - z F_s‖_{Ḣ¹}`.
    pub fn profile(&self, s: f64) -> f64 {
        let f = self.extremal(s);
        let z = self.phi.h1_dot(&f, &self.weights) / self.f_norm2;
        self.residual_with(&f, z)
    }

    pub fn fit(&self) -> ManifoldFit {
        let search = log_search(|s| self.profile(s));
        let s = search.min.x.exp();
        ManifoldFit {
            distance: search.min.value,
            z_opt: self.optimal_z(s),
            s_opt: Some(s),
            lambda_opt: None,
            iterations: search.iterations,
            bracket: search.bracket,
            converged: search.converged,
        }
    }
}

/// `inf_{z,s} ‖φ - z F_{s,0}‖_{Ḣ¹}`.
pub fn h1_distance(phi: &CylField, p: &ParamSet, g: &QuadratureGrid) -> Result<ManifoldFit> {
    Ok(H1Projection::new(phi, p, g)?.fit())
}

/// Cached samples for minimizing `‖φ - z F_s‖_{2*}`.
pub struct LpProjection<'a> {
    p: &'a ParamSet,
    grid: &'a QuadratureGrid,
    weights: Vec<f64>,
    phi: Vec<f64>,
    exponent: f64,
    phi_norm: f64,
}

impl<'a> LpProjection<'a> {
    pub fn new(phi: &CylField, p: &'a ParamSet, grid: &'a QuadratureGrid) -> Result<Self> {
        let exponent = p.two_star();
        let phi_norm = crate::quad::lp_norm(phi, exponent, p, grid)?;
        Ok(Self {
            p,
            grid,
            weights: grid.cell_weights(),
            phi: grid.sample(phi).values,
            exponent,
            phi_norm,
        })
    }

    fn extremal(&self, s: f64) -> Vec<f64> {
        self.grid.sample(&CylField::extremal(self.p, s, 1.0)).values
    }

    fn power_sum(&self, f: &[f64], z: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.phi)
            .zip(f)
            .map(|((w, a), b)| w * (a - z * b).abs().powf(self.exponent))
            .sum()
    }

    /// Minimizes the strictly convex `z ↦ ∫|φ - z F|^p` by Newton's method,
    /// falling back to bisection whenever a step leaves the sign bracket.
    fn inner(&self, f: &[f64]) -> f64 {
        let p = self.exponent;
        let f_norm = self
            .weights
            .iter()
            .zip(f)
            .map(|(w, b)| w * b.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        if !(f_norm > 0.0) {
            return 0.0;
        }
        // beyond |z| = 2‖φ‖/‖F‖ the residual exceeds ‖φ‖, the value at z = 0
        let bound = 2.0 * self.phi_norm / f_norm + f64::MIN_POSITIVE;
        let (mut a, mut b) = (-bound, bound);
        let (num, den) = self
            .weights
            .iter()
            .zip(&self.phi)
            .zip(f)
            .fold((0.0, 0.0), |(num, den), ((w, x), y)| {
                let fp = y.abs().powf(p - 2.0);
                (num + w * x * y * fp, den + w * fp * y * y)
            });
        let mut z = if den > 0.0 { (num / den).clamp(a, b) } else { 0.0 };
        for _ in 0..200 {
            let (d1, d2) = self
                .weights
                .iter()
                .zip(&self.phi)
                .zip(f)
                .fold((0.0, 0.0), |(d1, d2), ((w, x), y)| {
                    let e = x - z * y;
                    let k = w * e.abs().powf(p - 2.0);
                    (d1 - k * e * y, d2 + k * y * y)
                });
            if d1 == 0.0 {
                break;
            }
            if d1 > 0.0 {
                b = z;
            } else {
                a = z;
            }
            let newton = z - d1 / ((p - 1.0) * d2);
            let next = if d2 > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            let done = (next - z).abs() <= 1e-14 * bound;
            z = next;
            if done || b - a <= 1e-14 * bound {
                break;
            }
        }
        z
    }

    pub fn optimal_z(&self, s: f64) -> f64 {
        self.inner(&self.extremal(s))
    }

    /// `‖φ - z F_s‖_{2*}`.
    pub fn objective(&self, z: f64, s: f64) -> f64 {
        self.power_sum(&self.extremal(s), z).powf(1.0 / self.exponent)
    }

    /// `‖φ - z F_s‖_{2*}` for several `z` at one `s`.
    pub fn objectives(&self, zs: &[f64], s: f64) -> Vec<f64> {
        let f = self.extremal(s);
        zs.iter()
            .map(|&z| self.power_sum(&f, z).powf(1.0 / self.exponent))
            .collect()
    }

    /// `min_z ‖φ - z F_s‖_{2*}` together with the minimizing `z`.
    pub fn profile(&self, s: f64) -> (f64, f64) {
        let f = self.extremal(s);
        let z = self.inner(&f);
        (self.power_sum(&f, z).powf(1.0 / self.exponent), z)
    }

    pub fn fit(&self) -> ManifoldFit {
        let search = log_search(|s| self.profile(s).0);
        let s = search.min.x.exp();
        let (distance, z) = self.profile(s);
        ManifoldFit {
            distance,
            z_opt: z,
            s_opt: Some(s),
            lambda_opt: None,
            iterations: search.iterations,
            bracket: search.bracket,
            converged: search.converged,
        }
    }
}

/// `inf_{z,s} ‖φ - z F_{s,0}‖_{2*}`.
pub fn lp_distance(phi: &CylField, p: &ParamSet, g: &QuadratureGrid) -> Result<ManifoldFit> {
    Ok(LpProjection::new(phi, p, g)?.fit())
}

/// Cached samples for minimizing `‖u^{2t} - v_λ^{2t}‖_1`.
pub struct L1GnProjection<'a> {
    p: &'a ParamSet,
    grid: &'a QuadratureGrid,
    target: Vec<f64>,
}

impl<'a> L1GnProjection<'a> {
    pub fn new(u: &RadialProfile, p: &'a ParamSet, grid: &'a QuadratureGrid) -> Result<Self> {
        let two_t = 2.0 * p.t();
        crate::quad::lp_norm(u, two_t, p, grid)?;
        Ok(Self {
            p,
            grid,
            target: grid.radial.nodes.iter().map(|&r| u.eval(r).abs().powf(two_t)).collect(),
        })
    }

    /// `‖u^{2t} - v_λ^{2t}‖_1`.
    pub fn objective(&self, lambda: f64) -> f64 {
        let v = extremal_v(self.p, lambda);
        let two_t = 2.0 * self.p.t();
        let radial = &self.grid.radial;
        radial
            .nodes
            .iter()
            .zip(&radial.weights)
            .zip(&self.target)
            .map(|((&r, w), a)| w * (a - v.eval(r).powf(two_t)).abs())
            .sum()
    }

    pub fn fit(&self) -> ManifoldFit {
        let search = log_search(|l| self.objective(l));
        ManifoldFit {
            distance: search.min.value,
            z_opt: 1.0,
            s_opt: None,
            lambda_opt: Some(search.min.x.exp()),
            iterations: search.iterations,
            bracket: search.bracket,
            converged: search.converged,
        }
    }
}

/// `inf_λ ‖u^{2t} - v_{λ,0}^{2t}‖_1`.
pub fn l1_gn_distance(u: &RadialProfile, p: &ParamSet, g: &QuadratureGrid) -> Result<ManifoldFit> {
    Ok(L1GnProjection::new(u, p, g)?.fit())
}

/// The pieces of the Bianchi–Egnell quotient for one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeTerms {
    pub sobolev_deficit: f64,
    pub h1_norm: f64,
    pub fit: ManifoldFit,
}

impl BeTerms {
    pub fn compute(phi: &CylField, p: &ParamSet, g: &QuadratureGrid) -> Result<Self> {
        Ok(Self {
            sobolev_deficit: sobolev_deficit(phi, p, g)?,
            h1_norm: h1_seminorm(phi, p, g)?,
            fit: h1_distance(phi, p, g)?,
        })
    }

    /// `deficit / (d^β ‖φ‖^{2-β})`; `β = 2` gives the Bianchi–Egnell ratio.
    pub fn ratio(&self, beta: f64) -> Result<f64> {
        let d = self.fit.distance;
        if !(d > DEGENERACY_GUARD * self.h1_norm) {
            return Err(Error::Degenerate(format!(
                "distance {d:.3e} to the manifold is below {DEGENERACY_GUARD:e} × ‖φ‖ = {:.3e}",
                DEGENERACY_GUARD * self.h1_norm
            )));
        }
        if !self.fit.converged {
            return Err(domain("distance search did not converge inside the widened bracket"));
        }
        Ok(self.sobolev_deficit / (d.powf(beta) * self.h1_norm.powf(2.0 - beta)))
    }
}

/// `(S²‖φ‖²_{Ḣ¹} - ‖φ‖²_{2*}) / d(φ, M)²`.
pub fn be_ratio(phi: &CylField, p: &ParamSet, g: &QuadratureGrid) -> Result<f64> {
    BeTerms::compute(phi, p, g)?.ratio(2.0)
}
