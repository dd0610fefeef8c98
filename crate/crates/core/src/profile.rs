//! Closed-form radial profiles on `R^n` and cylindrically symmetric fields on
//! `R^n × [0, ∞)`.
//!
//! Every object here carries analytic first derivatives, so no seminorm is
//! ever computed by numerical differentiation.

use serde::{Deserialize, Serialize};

use crate::params::ParamSet;

/// One term `coef · (1 + scale² r²)^{-power}` of a radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerAtom {
    pub coef: f64,
    pub scale: f64,
    pub power: f64,
}

impl PowerAtom {
    pub fn new(coef: f64, scale: f64, power: f64) -> Self {
        Self { coef, scale, power }
    }

    #[inline]
    fn value_and_deriv(&self, r: f64) -> (f64, f64) {
        let k2 = self.scale * self.scale;
        let base = 1.0 + k2 * r * r;
        let v = self.coef * base.powf(-self.power);
        (v, -2.0 * self.power * k2 * r * v / base)
    }
}

/// Radial function `u(|x|)` on `R^n`, stored as a finite sum of [`PowerAtom`]s.
///
/// The class is closed under linear combination and under the dilation
/// `u ↦ λ^{n/2t} u(λ·)`, which covers every extremal and perturbation the
/// crate works with.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RadialProfile {
    atoms: Vec<PowerAtom>,
}

impl RadialProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_atoms(atoms: Vec<PowerAtom>) -> Self {
        Self { atoms }
    }

    pub fn atom(coef: f64, scale: f64, power: f64) -> Self {
        Self::from_atoms(vec![PowerAtom::new(coef, scale, power)])
    }

    pub fn atoms(&self) -> &[PowerAtom] {
        &self.atoms
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.atoms.iter().map(|a| a.value_and_deriv(r).0).sum()
    }

    pub fn deriv(&self, r: f64) -> f64 {
        self.atoms.iter().map(|a| a.value_and_deriv(r).1).sum()
    }

    pub fn eval_with_deriv(&self, r: f64) -> (f64, f64) {
        self.atoms.iter().fold((0.0, 0.0), |(v, d), a| {
            let (av, ad) = a.value_and_deriv(r);
            (v + av, d + ad)
        })
    }

    /// Asserted power `β` with `u(r) = O(r^{-β})`; infinite for the zero profile.
    pub fn decay_exponent(&self) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.coef != 0.0)
            .map(|a| if a.scale == 0.0 { 0.0 } else { 2.0 * a.power })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_atoms(
            self.atoms
                .iter()
                .map(|a| PowerAtom { coef: c * a.coef, ..*a })
                .collect(),
        )
    }

    /// `self + c · other`.
    pub fn plus(&self, c: f64, other: &RadialProfile) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().map(|a| PowerAtom { coef: c * a.coef, ..*a }));
        Self { atoms }
    }

    /// `r ↦ weight · u(λ r)`.
    pub fn dilated(&self, lambda: f64, weight: f64) -> Self {
        Self::from_atoms(
            self.atoms
                .iter()
                .map(|a| PowerAtom {
                    coef: weight * a.coef,
                    scale: a.scale * lambda,
                    power: a.power,
                })
                .collect(),
        )
    }
}

/// One term `coef · (offset + a_r r² + a_rho ρ²)^{-power}` of a cylindrical field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldAtom {
    pub coef: f64,
    pub offset: f64,
    pub a_r: f64,
    pub a_rho: f64,
    pub power: f64,
}

impl FieldAtom {
    #[inline]
    fn eval_all(&self, r: f64, rho: f64) -> [f64; 3] {
        let base = self.offset + self.a_r * r * r + self.a_rho * rho * rho;
        let v = self.coef * base.powf(-self.power);
        let g = -2.0 * self.power * v / base;
        [v, g * self.a_r * r, g * self.a_rho * rho]
    }

    fn decay_exponent(&self) -> f64 {
        if self.coef == 0.0 {
            f64::INFINITY
        } else if self.a_r == 0.0 || self.a_rho == 0.0 {
            0.0
        } else {
            2.0 * self.power
        }
    }
}

/// The lift `φ_u(r, ρ) = [w_u(r) + ρ²]^{-γ}` with `w_u = u^{-4/(m+2n-4)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedField {
    pub profile: RadialProfile,
    /// `4/(m+2n-4)`, which equals `t - 1`.
    pub w_exponent: f64,
    pub gamma: f64,
}

impl LiftedField {
    /// `w_u(r)`; infinite where `u` vanishes.
    pub fn w(&self, r: f64) -> f64 {
        let u = self.profile.eval(r);
        if u > 0.0 {
            u.powf(-self.w_exponent)
        } else {
            f64::INFINITY
        }
    }

    fn eval_all(&self, r: f64, rho: f64) -> [f64; 3] {
        let (u, du) = self.profile.eval_with_deriv(r);
        if !(u > 0.0) {
            return [0.0; 3];
        }
        let w = u.powf(-self.w_exponent);
        if !w.is_finite() {
            return [0.0; 3];
        }
        let base = w + rho * rho;
        let phi = base.powf(-self.gamma);
        // ∂_r φ = -γ φ w'/(w+ρ²) with w'/w = -(t-1) u'/u
        let d_r = self.gamma * self.w_exponent * phi * (w / base) * (du / u);
        let d_rho = -2.0 * self.gamma * rho * phi / base;
        [phi, d_r, d_rho]
    }

    fn decay_exponent(&self) -> f64 {
        let radial = self.profile.decay_exponent() * self.w_exponent * self.gamma;
        radial.min(2.0 * self.gamma)
    }
}

/// A cylindrically symmetric field `φ(r, ρ)` with analytic partial derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CylField {
    Atoms(Vec<FieldAtom>),
    Lifted(LiftedField),
    /// `Σ c_i φ_i`.
    Combination(Vec<(f64, CylField)>),
    /// `weight · φ(σ r, σ ρ)`.
    Dilated {
        sigma: f64,
        weight: f64,
        inner: Box<CylField>,
    },
}

impl CylField {
    /// The Sobolev extremal `z s^γ (1 + s² r² + s² ρ²)^{-γ}`.
    pub fn extremal(p: &ParamSet, s: f64, z: f64) -> Self {
        let g = p.gamma();
        CylField::Atoms(vec![FieldAtom {
            coef: z * s.powf(g),
            offset: 1.0,
            a_r: s * s,
            a_rho: s * s,
            power: g,
        }])
    }

    pub fn lifted(profile: RadialProfile, p: &ParamSet) -> Self {
        CylField::Lifted(LiftedField {
            profile,
            w_exponent: p.t() - 1.0,
            gamma: p.gamma(),
        })
    }

    /// Value, `∂_r`, `∂_ρ` at one point.
    pub fn eval_all(&self, r: f64, rho: f64) -> [f64; 3] {
        match self {
            CylField::Atoms(atoms) => atoms.iter().fold([0.0; 3], |acc, a| {
                let e = a.eval_all(r, rho);
                [acc[0] + e[0], acc[1] + e[1], acc[2] + e[2]]
            }),
            CylField::Lifted(l) => l.eval_all(r, rho),
            CylField::Combination(parts) => parts.iter().fold([0.0; 3], |acc, (c, f)| {
                let e = f.eval_all(r, rho);
                [acc[0] + c * e[0], acc[1] + c * e[1], acc[2] + c * e[2]]
            }),
            CylField::Dilated { sigma, weight, inner } => {
                let e = inner.eval_all(sigma * r, sigma * rho);
                [weight * e[0], weight * sigma * e[1], weight * sigma * e[2]]
            }
        }
    }

    pub fn eval(&self, r: f64, rho: f64) -> f64 {
        self.eval_all(r, rho)[0]
    }

    pub fn d_r(&self, r: f64, rho: f64) -> f64 {
        self.eval_all(r, rho)[1]
    }

    pub fn d_rho(&self, r: f64, rho: f64) -> f64 {
        self.eval_all(r, rho)[2]
    }

    /// Asserted joint decay power in `(r, ρ)`.
    pub fn decay_exponent(&self) -> f64 {
        match self {
            CylField::Atoms(atoms) => atoms
                .iter()
                .map(FieldAtom::decay_exponent)
                .fold(f64::INFINITY, f64::min),
            CylField::Lifted(l) => l.decay_exponent(),
            CylField::Combination(parts) => parts
                .iter()
                .filter(|(c, _)| *c != 0.0)
                .map(|(_, f)| f.decay_exponent())
                .fold(f64::INFINITY, f64::min),
            CylField::Dilated { inner, .. } => inner.decay_exponent(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        CylField::Combination(vec![(c, self.clone())])
    }

    /// `self + c · other`.
    pub fn plus(&self, c: f64, other: &CylField) -> Self {
        CylField::Combination(vec![(1.0, self.clone()), (c, other.clone())])
    }

    /// Critical-norm preserving dilation `σ^γ φ(σ r, σ ρ)`; maps `F_s` to `F_{σ s}`.
    pub fn dilated(&self, p: &ParamSet, sigma: f64) -> Self {
        CylField::Dilated {
            sigma,
            weight: sigma.powf(p.gamma()),
            inner: Box::new(self.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6 * (1.0 + x.abs());
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn radial_derivative_matches_finite_difference() {
        let u = RadialProfile::from_atoms(vec![
            PowerAtom::new(1.0, 1.0, 0.5),
            PowerAtom::new(-0.3, 2.0, 1.7),
        ]);
        for &r in &[0.0, 0.3, 1.0, 4.0] {
            let exact = u.deriv(r);
            let approx = fd(|x| u.eval(x), r);
            assert!((exact - approx).abs() < 1e-7, "r = {r}");
        }
    }

    #[test]
    fn field_partials_match_finite_difference() {
        let p = derive_params(3, 2.0).unwrap();
        let v = RadialProfile::atom(1.0, 1.0, p.extremal_power())
            .plus(0.1, &RadialProfile::atom(1.0, 0.5, 3.0));
        let fields = [
            CylField::extremal(&p, 1.3, 0.8),
            CylField::lifted(v, &p),
            CylField::extremal(&p, 0.7, 1.0).dilated(&p, 1.9).plus(-0.2, &CylField::extremal(&p, 2.0, 1.0)),
        ];
        for f in &fields {
            for &(r, rho) in &[(0.2, 0.4), (1.1, 0.05), (2.5, 3.0)] {
                let e = f.eval_all(r, rho);
                assert!((e[1] - fd(|x| f.eval(x, rho), r)).abs() < 1e-7);
                assert!((e[2] - fd(|y| f.eval(r, y), rho)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn lift_of_extremal_is_sobolev_extremal() {
        let p = derive_params(2, 3.0).unwrap();
        let v = RadialProfile::atom(1.0, 1.0, p.extremal_power());
        let phi = CylField::lifted(v, &p);
        let f = CylField::extremal(&p, 1.0, 1.0);
        for &(r, rho) in &[(0.0, 0.0), (0.5, 1.5), (3.0, 0.1)] {
            assert!((phi.eval(r, rho) - f.eval(r, rho)).abs() < 1e-14);
        }
        if let CylField::Lifted(l) = &phi {
            // (n, t) = (2, 3): w_v = 1 + r²
            assert!((l.w(2.0) - 5.0).abs() < 1e-13);
        }
    }

    #[test]
    fn dilation_maps_extremal_scale() {
        let p = derive_params(2, 2.0).unwrap();
        let a = CylField::extremal(&p, 1.5, 1.0).dilated(&p, 2.0);
        let b = CylField::extremal(&p, 3.0, 1.0);
        for &(r, rho) in &[(0.1, 0.2), (1.0, 1.0)] {
            assert!((a.eval(r, rho) - b.eval(r, rho)).abs() < 1e-13);
        }
    }

    #[test]
    fn decay_exponents() {
        let p = derive_params(2, 3.0).unwrap();
        assert_eq!(CylField::extremal(&p, 1.0, 1.0).decay_exponent(), 2.0);
        let v = RadialProfile::atom(1.0, 1.0, 0.5);
        assert_eq!(v.decay_exponent(), 1.0);
        assert_eq!(CylField::lifted(v, &p).decay_exponent(), 2.0);
        assert_eq!(RadialProfile::zero().decay_exponent(), f64::INFINITY);
    }
}
