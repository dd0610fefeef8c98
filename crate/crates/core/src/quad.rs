//! Weighted quadrature in continuous dimension.
//!
//! Each radial variable is integrated against `ω_d s^{d-1} ds` on `[0, ∞)`,
//! split at `s = 1`:
//!
//! * on `[0, 1]` a Gauss-Jacobi rule with weight `s^{d-1}` absorbs the
//!   (possibly singular, for `d < 1`) density, so no singular value is sampled;
//! * on `[1, ∞)` the substitution `s = 1/σ`, followed by `σ = τ^q`, maps the
//!   tail onto `(0, 1]` where a Gauss-Legendre rule is used. The extra power
//!   `q` turns the algebraic endpoint behaviour at `τ = 0` into a high-order
//!   zero, so tails with non-integer decay still converge quickly.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::params::{omega, ParamSet};
use crate::profile::{CylField, RadialProfile};
use crate::special::beta;

/// Default number of nodes per panel.
pub const DEFAULT_RESOLUTION: usize = 64;
/// Smallest accepted number of nodes per panel.
pub const MIN_RESOLUTION: usize = 8;
/// Exponent `q` of the second tail substitution `σ = τ^q`.
pub const TAIL_POWER: f64 = 4.0;

/// Gauss-Jacobi nodes and weights on `[-1, 1]` for the weight
/// `(1 - x)^α (1 + x)^β`, via the Golub-Welsch eigenvalue method.
pub fn gauss_jacobi(order: usize, alpha: f64, beta_exp: f64) -> Result<Vec<(f64, f64)>> {
    if order == 0 {
        return Err(Error::Config("Gauss-Jacobi rule needs at least one node".into()));
    }
    if !(alpha > -1.0) || !(beta_exp > -1.0) {
        return Err(domain(format!(
            "Jacobi exponents must exceed -1 (alpha = {alpha}, beta = {beta_exp})"
        )));
    }
    let ab = alpha + beta_exp;
    let mut jac = DMatrix::<f64>::zeros(order, order);
    for k in 0..order {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta_exp - alpha) / (ab + 2.0)
        } else {
            (beta_exp * beta_exp - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < order {
            let j = kf + 1.0;
            let num = 4.0 * j * (j + alpha) * (j + beta_exp) * (j + ab);
            let den = (2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0);
            let off = (num / den).sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * beta(alpha + 1.0, beta_exp + 1.0);
    let eig = SymmetricEigen::new(jac);
    let mut rule: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(rule)
}

/// A one-dimensional rule for `∫_0^∞ f(s) ω_d s^{d-1} ds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialRule {
    pub dim: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialRule {
    /// Composite rule with `resolution` nodes on each of `[0,1]` and `[1,∞)`.
    pub fn new(dim: f64, resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::Config(format!(
                "resolution {resolution} is below the minimum of {MIN_RESOLUTION}"
            )));
        }
        if !(dim > 0.0) {
            return Err(domain(format!("measure dimension {dim} must be positive")));
        }
        let area = 2.0 * std::f64::consts::PI.powf(dim / 2.0) / crate::special::gamma(dim / 2.0);
        let mut nodes = Vec::with_capacity(2 * resolution);
        let mut weights = Vec::with_capacity(2 * resolution);

        // [0, 1]: s = (1 + x)/2, s^{d-1} ds = 2^{-d} (1 + x)^{d-1} dx.
        let inner = gauss_jacobi(resolution, 0.0, dim - 1.0)?;
        let inner_scale = 0.5f64.powf(dim);
        for (x, w) in inner {
            nodes.push(0.5 * (1.0 + x));
            weights.push(area * inner_scale * w);
        }

        // [1, ∞): s = τ^{-q}, s^{d-1} ds = q τ^{-q d - 1} dτ, τ = (1 + x)/2.
        let q = TAIL_POWER;
        let tail = gauss_jacobi(resolution, 0.0, 0.0)?;
        for (x, w) in tail.into_iter().rev() {
            let tau = 0.5 * (1.0 + x);
            nodes.push(tau.powf(-q));
            weights.push(area * 0.5 * w * q * tau.powf(-q * dim - 1.0));
        }
        Ok(Self { dim, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(s))
            .sum()
    }
}

/// Tensor grid for `R^n × [0, ∞)` with measure `ω_n r^{n-1} dr · ω_m ρ^{m-1} dρ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub resolution: usize,
    pub radial: RadialRule,
    pub height: RadialRule,
    pub domain_split: Vec<f64>,
}

impl QuadratureGrid {
    pub fn n_dim(&self) -> f64 {
        self.radial.dim
    }

    pub fn m_dim(&self) -> f64 {
        self.height.dim
    }

    /// Errors unless the grid was built for the dimensions of `p`.
    pub fn check_params(&self, p: &ParamSet) -> Result<()> {
        if self.radial.dim != p.n_f64() || (self.height.dim - p.m()).abs() > 1e-12 * p.m().max(1.0) {
            return Err(Error::Config(format!(
                "grid built for (n, m) = ({}, {}) used with {}",
                self.radial.dim,
                self.height.dim,
                p.label()
            )));
        }
        Ok(())
    }

    /// `∫_{R^n} f(|x|) dx`.
    pub fn integrate_radial(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.radial.integrate(f)
    }

    /// `∫_0^∞ f(ρ) ω_m ρ^{m-1} dρ`.
    pub fn integrate_height(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.height.integrate(f)
    }

    /// `∫_{R^n} ∫_0^∞ f(|x|, ρ) dΩ(ρ) dx`.
    pub fn integrate_cyl(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.radial
            .nodes
            .iter()
            .zip(&self.radial.weights)
            .map(|(&r, &wr)| {
                let row: f64 = self
                    .height
                    .nodes
                    .iter()
                    .zip(&self.height.weights)
                    .map(|(&rho, &wh)| wh * f(r, rho))
                    .sum();
                wr * row
            })
            .sum()
    }

    /// Product weights in row-major `(r, ρ)` order, matching [`FieldSamples`].
    pub fn cell_weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.radial.len() * self.height.len());
        for &wr in &self.radial.weights {
            for &wh in &self.height.weights {
                out.push(wr * wh);
            }
        }
        out
    }

    /// Samples a field and its partials at every grid cell.
    pub fn sample(&self, f: &CylField) -> FieldSamples {
        let cells = self.radial.len() * self.height.len();
        let mut values = Vec::with_capacity(cells);
        let mut d_r = Vec::with_capacity(cells);
        let mut d_rho = Vec::with_capacity(cells);
        for &r in &self.radial.nodes {
            for &rho in &self.height.nodes {
                let e = f.eval_all(r, rho);
                values.push(e[0]);
                d_r.push(e[1]);
                d_rho.push(e[2]);
            }
        }
        FieldSamples { values, d_r, d_rho }
    }
}

/// Field values and partial derivatives on every cell of a [`QuadratureGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub values: Vec<f64>,
    pub d_r: Vec<f64>,
    pub d_rho: Vec<f64>,
}

impl FieldSamples {
    /// Discrete `Ḣ¹` inner product.
    pub fn h1_dot(&self, other: &FieldSamples, weights: &[f64]) -> f64 {
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * (self.d_r[i] * other.d_r[i] + self.d_rho[i] * other.d_rho[i]))
            .sum()
    }
}

/// `∫_0^R f(s) ω_d s^{d-1} ds` by an `order`-point Gauss-Jacobi rule on the ball.
pub fn integrate_ball(dim: f64, radius: f64, order: usize, f: impl Fn(f64) -> f64) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(domain(format!("ball radius must be positive and finite, got {radius}")));
    }
    let rule = gauss_jacobi(order, 0.0, dim - 1.0)?;
    // x = (1+y)/2 maps the Jacobi weight (1+y)^{d-1} onto 2^{d-1} x^{d-1}
    let sum: f64 = rule.iter().map(|(y, w)| w * f(radius * 0.5 * (1.0 + y))).sum();
    Ok(omega(dim)? * radius.powf(dim) * sum / 2f64.powf(dim))
}

/// Builds the composite grid for `p` with `resolution` nodes per panel.
pub fn build_grid(p: &ParamSet, resolution: usize) -> Result<QuadratureGrid> {
    Ok(QuadratureGrid {
        resolution,
        radial: RadialRule::new(p.n_f64(), resolution)?,
        height: RadialRule::new(p.m(), resolution)?,
        domain_split: vec![0.0, 1.0, f64::INFINITY],
    })
}

/// Objects whose weighted `L^p` norms can be evaluated on a grid.
pub trait Measurable {
    /// Asserted power-law decay at infinity.
    fn decay_exponent(&self) -> f64;
    /// Dimension of the measure the object is integrated against.
    fn measure_dimension(&self, p: &ParamSet) -> f64;
    /// `∫ |f|^{p_exp}` on the grid.
    fn power_integral(&self, p_exp: f64, grid: &QuadratureGrid) -> f64;
}

impl Measurable for RadialProfile {
    fn decay_exponent(&self) -> f64 {
        RadialProfile::decay_exponent(self)
    }

    fn measure_dimension(&self, p: &ParamSet) -> f64 {
        p.n_f64()
    }

    fn power_integral(&self, p_exp: f64, grid: &QuadratureGrid) -> f64 {
        grid.integrate_radial(|r| self.eval(r).abs().powf(p_exp))
    }
}

impl Measurable for CylField {
    fn decay_exponent(&self) -> f64 {
        CylField::decay_exponent(self)
    }

    fn measure_dimension(&self, p: &ParamSet) -> f64 {
        p.total_dim()
    }

    fn power_integral(&self, p_exp: f64, grid: &QuadratureGrid) -> f64 {
        grid.integrate_cyl(|r, rho| self.eval(r, rho).abs().powf(p_exp))
    }
}

fn check_decay(decay: f64, integrand_power: f64, dim: f64, what: &str) -> Result<()> {
    // ∫ s^{-power·decay} s^{dim-1} ds converges at infinity iff power·decay > dim.
    if decay.is_infinite() {
        return Ok(());
    }
    if !(integrand_power * decay > dim) {
        return Err(domain(format!(
            "{what} diverges: decay exponent {decay} raised to {integrand_power} does not beat dimension {dim}"
        )));
    }
    Ok(())
}

/// Weighted `L^{p_exp}` norm of a radial profile or cylindrical field.
pub fn lp_norm<F: Measurable + ?Sized>(
    f: &F,
    p_exp: f64,
    p: &ParamSet,
    grid: &QuadratureGrid,
) -> Result<f64> {
    grid.check_params(p)?;
    if !(p_exp >= 1.0) {
        return Err(domain(format!("L^p exponent {p_exp} must be at least 1")));
    }
    check_decay(f.decay_exponent(), p_exp, f.measure_dimension(p), "L^p norm")?;
    Ok(f.power_integral(p_exp, grid).powf(1.0 / p_exp))
}

/// `‖∇u‖_2` for a radial profile on `R^n`.
pub fn gradient_norm(u: &RadialProfile, p: &ParamSet, grid: &QuadratureGrid) -> Result<f64> {
    grid.check_params(p)?;
    check_decay(u.decay_exponent() + 1.0, 2.0, p.n_f64(), "gradient norm")?;
    Ok(grid.integrate_radial(|r| u.deriv(r).powi(2)).sqrt())
}

/// `‖φ‖_{Ḣ¹}`: the `L^2` norm of `(∂_r φ, ∂_ρ φ)` under `dΩ(ρ) dx`.
pub fn h1_seminorm(phi: &CylField, p: &ParamSet, grid: &QuadratureGrid) -> Result<f64> {
    grid.check_params(p)?;
    check_decay(phi.decay_exponent() + 1.0, 2.0, p.total_dim(), "Ḣ¹ seminorm")?;
    Ok(grid
        .integrate_cyl(|r, rho| {
            let e = phi.eval_all(r, rho);
            e[1] * e[1] + e[2] * e[2]
        })
        .sqrt())
}

/// Compares `∫|f|^{p_exp}` at `resolution` and `2·resolution`; a disagreement
/// above `1e-6` relative usually means the declared decay is wrong.
pub fn tail_refinement_check<F: Measurable + ?Sized>(
    f: &F,
    p_exp: f64,
    p: &ParamSet,
    resolution: usize,
) -> Result<f64> {
    let coarse = f.power_integral(p_exp, &build_grid(p, resolution)?);
    let fine = f.power_integral(p_exp, &build_grid(p, 2 * resolution)?);
    let rel = (coarse - fine).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if rel > 1e-6 {
        return Err(domain(format!(
            "tail refinement disagreement {rel:.3e} exceeds 1e-6; check the declared decay exponent"
        )));
    }
    Ok(rel)
}
