//! Dimension and exponent bookkeeping.
//!
//! A [`ParamSet`] is the only place where the exponents of the
//! Gagliardo-Nirenberg family and of the lifted Sobolev inequality are
//! computed. Everything downstream reads them from here.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::special::{beta, gamma};

/// Dimensions and exponents tying a GN inequality on `R^n` to the Sobolev
/// inequality in continuous dimension `m + n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    n: u32,
    m: f64,
    t: f64,
    two_star: f64,
    gamma: f64,
    mu: f64,
}

impl ParamSet {
    /// Builds the parameter set for GN exponent `t` on `R^n`.
    ///
    /// The auxiliary dimension is `m = 4t/(t-1) - 2n`, the inverse of
    /// `t = (m + 2n)/(m + 2n - 4)`.
    pub fn derive(n: u32, t: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("dimension n = {n} must be at least 2")));
        }
        if !t.is_finite() || t <= 1.0 {
            return Err(domain(format!("exponent t = {t} must be finite and greater than 1")));
        }
        let m = 4.0 * t / (t - 1.0) - 2.0 * n as f64;
        if m <= 0.0 {
            return Err(domain(format!(
                "t = {t} is at or beyond the Sobolev endpoint n/(n-2) for n = {n} (m = {m})"
            )));
        }
        Ok(Self::assemble(n, m, t))
    }

    /// Builds the parameter set from the pair of dimensions `(n, m)`.
    pub fn from_dims(n: u32, m: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("dimension n = {n} must be at least 2")));
        }
        if !m.is_finite() || m <= 0.0 {
            return Err(domain(format!("auxiliary dimension m = {m} must be positive")));
        }
        let nf = n as f64;
        let t = (m + 2.0 * nf) / (m + 2.0 * nf - 4.0);
        Ok(Self::assemble(n, m, t))
    }

    fn assemble(n: u32, m: f64, t: f64) -> Self {
        let nf = n as f64;
        let d = m + nf;
        let two_star = 2.0 * d / (d - 2.0);
        let gamma = (d - 2.0) / 2.0;
        let mu = nf * (t - 1.0) / (t * (2.0 * nf - (t + 1.0) * (nf - 2.0)));
        Self { n, m, t, two_star, gamma, mu }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_f64(&self) -> f64 {
        self.n as f64
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Critical exponent `2* = 2(m+n)/(m+n-2)`.
    pub fn two_star(&self) -> f64 {
        self.two_star
    }

    /// Decay exponent `γ = (m+n-2)/2` of the Sobolev extremal.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Interpolation weight `μ` of the GN inequality.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Total continuous dimension `m + n`.
    pub fn total_dim(&self) -> f64 {
        self.m + self.n as f64
    }

    /// The power `4t/2*` applied to both sides of the GN inequality in the deficit.
    pub fn deficit_power(&self) -> f64 {
        4.0 * self.t / self.two_star
    }

    /// Power `1/(t-1)` of the GN extremal `(1 + r^2)^{-1/(t-1)}`.
    pub fn extremal_power(&self) -> f64 {
        1.0 / (self.t - 1.0)
    }

    /// Exponent `n/(2t)` of the mass-preserving dilation `λ^{n/2t} u(λ·)`.
    pub fn dilation_weight(&self) -> f64 {
        self.n as f64 / (2.0 * self.t)
    }

    /// Exponent `e` with `R(u_λ) = λ^e R(u)` for `R(u) = ‖u‖_{t+1}^{t+1}/‖∇u‖_2^2`.
    pub fn ratio_scaling_exponent(&self) -> f64 {
        self.n as f64 * (self.t - 1.0) / (2.0 * self.t) - 2.0
    }

    /// `(m + 2n)/2`, the power with `u^{2t} = w_u^{-(m+2n)/2}`.
    pub fn half_lifted_dim(&self) -> f64 {
        (self.m + 2.0 * self.n as f64) / 2.0
    }

    pub fn omega_m(&self) -> f64 {
        sphere_area(self.m)
    }

    pub fn omega_n(&self) -> f64 {
        sphere_area(self.n as f64)
    }

    /// Short label used in reports, e.g. `n=2,t=3,m=2`.
    pub fn label(&self) -> String {
        format!("n={},t={},m={}", self.n, self.t, self.m)
    }
}

/// Generalized area of the unit sphere in `R^m`, `2π^{m/2}/Γ(m/2)`.
pub fn omega(m: f64) -> Result<f64> {
    if !m.is_finite() || m <= 0.0 {
        return Err(domain(format!("sphere dimension m = {m} must be positive")));
    }
    Ok(sphere_area(m))
}

fn sphere_area(m: f64) -> f64 {
    2.0 * PI.powf(m / 2.0) / gamma(m / 2.0)
}

/// Shorthand for [`ParamSet::derive`].
pub fn derive_params(n: u32, t: f64) -> Result<ParamSet> {
    ParamSet::derive(n, t)
}

/// Closed form of `∫_0^∞ ρ^{a-1} (1+ρ^2)^{-b} dρ = ½ B(a/2, b - a/2)`.
pub fn beta_moment(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(domain(format!("moment order a = {a} must be positive")));
    }
    if !(b > a / 2.0) || !b.is_finite() {
        return Err(domain(format!("moment integral diverges for a = {a}, b = {b} (needs b > a/2)")));
    }
    Ok(0.5 * beta(a / 2.0, b - a / 2.0))
}

/// Residual of the exponent identity `(1-μ)4t/(2*(t+1)) = 1 - 2μt/2*` that makes
/// the lifted Sobolev deficit a function of the GN deficit alone.
pub fn check_exponent_identity(p: &ParamSet) -> f64 {
    let t = p.t();
    let mu = p.mu();
    let s = p.two_star();
    let lhs = (1.0 - mu) * 4.0 * t / (s * (t + 1.0));
    let rhs = 1.0 - mu * 2.0 * t / s;
    (lhs - rhs).abs()
}
