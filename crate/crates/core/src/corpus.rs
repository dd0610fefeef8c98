//! Perturbation families used by the probes and lemma checks.
//!
//! With `k = 1/(t-1)` the extremal is `v = (1+r²)^{-k}` and the tangent
//! directions of `{c v_λ}` at `v` span `(1+r²)^{-k}` and `(1+r²)^{-k-1}`;
//! every bump below stays out of that span.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{extremal_v, lift, normalize_mass, normalize_ratio};
use crate::params::ParamSet;
use crate::profile::{CylField, FieldAtom, PowerAtom, RadialProfile};
use crate::quad::QuadratureGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumpShape {
    /// `(1+r²)^{-(2k+1)}`, concentrated near the origin.
    Core,
    /// `(1+r²)^{-(2k+1)} - 2(1+r²)^{-(2k+2)}`, negative near the origin and positive further out.
    Shell,
    /// `(1+r²/4)^{-(2k+1)}`, spread over a wider radius.
    Wide,
}

impl BumpShape {
    pub const ALL: [BumpShape; 3] = [BumpShape::Core, BumpShape::Shell, BumpShape::Wide];

    pub fn name(self) -> &'static str {
        match self {
            BumpShape::Core => "core",
            BumpShape::Shell => "shell",
            BumpShape::Wide => "wide",
        }
    }

    /// The bump as a radial profile.
    pub fn profile(self, p: &ParamSet) -> RadialProfile {
        let q = 2.0 * p.extremal_power() + 1.0;
        match self {
            BumpShape::Core => RadialProfile::atom(1.0, 1.0, q),
            BumpShape::Shell => RadialProfile::from_atoms(vec![
                PowerAtom::new(1.0, 1.0, q),
                PowerAtom::new(-2.0, 1.0, q + 1.0),
            ]),
            BumpShape::Wide => RadialProfile::atom(1.0, 0.5, q),
        }
    }

    /// Largest `ε > 0` for which `v + ε bump > 0` is guaranteed.
    pub fn max_epsilon(self) -> f64 {
        match self {
            BumpShape::Core | BumpShape::Wide => f64::INFINITY,
            BumpShape::Shell => 1.0,
        }
    }
}

impl fmt::Display for BumpShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BumpShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BumpShape::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown bump shape `{s}` (expected core, shell or wide)")))
    }
}

/// `v + Σ ε_i bump_i`, not normalized.
pub fn perturbed(p: &ParamSet, terms: &[(BumpShape, f64)]) -> RadialProfile {
    terms
        .iter()
        .fold(extremal_v(p, 1.0), |acc, (shape, eps)| acc.plus(*eps, &shape.profile(p)))
}

/// How a corpus profile is rescaled after perturbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `‖u‖_{2t} = ‖v‖_{2t}`
    Mass,
    /// `‖u‖_{t+1}^{t+1}/‖∇u‖² = ‖v‖_{t+1}^{t+1}/‖∇v‖²`
    Ratio,
}

/// One labeled corpus profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMember {
    pub id: String,
    pub terms: Vec<(BumpShape, f64)>,
    pub profile: RadialProfile,
}

impl CorpusMember {
    pub fn build(
        p: &ParamSet,
        g: &QuadratureGrid,
        terms: Vec<(BumpShape, f64)>,
        normalization: Normalization,
    ) -> Result<Self> {
        let raw = perturbed(p, &terms);
        let profile = match normalization {
            Normalization::Mass => normalize_mass(&raw, p, g)?,
            Normalization::Ratio => normalize_ratio(&raw, p, g)?,
        };
        Ok(Self {
            id: member_id(&terms),
            terms,
            profile,
        })
    }

    pub fn lift(&self, p: &ParamSet, g: &QuadratureGrid) -> Result<CylField> {
        lift(&self.profile, p, g)
    }
}

/// `core:1e-3+wide:5e-2`, or `v` for the unperturbed extremal.
pub fn member_id(terms: &[(BumpShape, f64)]) -> String {
    if terms.is_empty() {
        return "v".to_string();
    }
    terms
        .iter()
        .map(|(s, e)| format!("{s}:{e:e}"))
        .collect::<Vec<_>>()
        .join("+")
}

/// Every `shape × ε` single-bump profile, normalized as requested.
pub fn single_bump_corpus(
    p: &ParamSet,
    g: &QuadratureGrid,
    shapes: &[BumpShape],
    epsilons: &[f64],
    normalization: Normalization,
) -> Result<Vec<CorpusMember>> {
    shapes
        .iter()
        .flat_map(|&s| epsilons.iter().map(move |&e| (s, e)))
        .map(|(s, e)| CorpusMember::build(p, g, vec![(s, e)], normalization))
        .collect()
}

/// Amplitudes used by the lemma checks, from deep inside to well outside the
/// small-perturbation regime.
pub const LEMMA_EPSILONS: [f64; 6] = [1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.05];

/// Amplitudes used by the stability and sharpness probes.
pub const PROBE_EPSILONS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// `coef (1 + a_r r² + ρ²)^{-power}`.
fn radial_power(power: f64, coef: f64, a_r: f64) -> FieldAtom {
    FieldAtom {
        coef,
        offset: 1.0,
        a_r,
        a_rho: 1.0,
        power,
    }
}

/// A fixed field `η` that is `Ḣ¹`-orthogonal (on the grid) to `F` and to
/// `∂_s F_s|_{s=1}`, normalized to `‖η‖_{Ḣ¹} = ‖F‖_{Ḣ¹}`.
pub fn orthogonal_direction(p: &ParamSet, g: &QuadratureGrid) -> Result<CylField> {
    g.check_params(p)?;
    let gamma = p.gamma();
    let f = CylField::extremal(p, 1.0, 1.0);
    // ∂_s F_s at s = 1, divided by γ
    let tangent = CylField::Atoms(vec![
        radial_power(gamma, -1.0, 1.0),
        radial_power(gamma + 1.0, 2.0, 1.0),
    ]);
    let psi = CylField::Atoms(vec![radial_power(gamma + 1.0, 1.0, 2.0)]);

    let w = g.cell_weights();
    let sf = g.sample(&f);
    let st = g.sample(&tangent);
    let sp = g.sample(&psi);
    let (ff, ft, tt) = (sf.h1_dot(&sf, &w), sf.h1_dot(&st, &w), st.h1_dot(&st, &w));
    let (pf, pt) = (sp.h1_dot(&sf, &w), sp.h1_dot(&st, &w));
    let det = ff * tt - ft * ft;
    if !(det > 0.0) {
        return Err(Error::Internal("tangent Gram matrix is singular".into()));
    }
    let a = (pf * tt - pt * ft) / det;
    let b = (pt * ff - pf * ft) / det;
    let eta = CylField::Combination(vec![(1.0, psi), (-a, f), (-b, tangent)]);
    let se = g.sample(&eta);
    let scale = (ff / se.h1_dot(&se, &w)).sqrt();
    Ok(eta.scaled(scale))
}
