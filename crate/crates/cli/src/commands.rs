//! One table per (command, ParamSet).

use gnslab_core::corpus::{BumpShape, LEMMA_EPSILONS, PROBE_EPSILONS};
use gnslab_core::functionals::{
    c1_quadrature, deficit_identity, gn_deficit, gn_leading_term, sobolev_deficit, SharpConstants,
};
use gnslab_core::manifold::{h1_distance, l1_gn_distance, lp_distance};
use gnslab_core::verify::{
    c4_constant, c5_constant, check_est13_pointwise, check_lemma31, check_lemma41, default_alpha_fields,
    default_lemma31_delta, estimate_alpha, lemma31_cap, sharpness_probe, stability_probe, LemmaCheckRecord,
};
use gnslab_core::{build_grid, CorpusMember, Normalization, ParamSet, QuadratureGrid, Result};

use crate::report::{Cell, ItemReport, Table};
use crate::spec::{Command, Recipe, RunSpec};

/// Relative tolerance for the deficit identity rows.
pub const IDENTITY_TOL: f64 = 1e-6;
/// Relative agreement required between `C_1` in closed form and by quadrature.
pub const CONSTANT_TOL: f64 = 1e-8;
/// Radii sampled by the pointwise lemma check.
pub const EST13_RADII: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
/// Exponents of the sharpness sweep emitted by `alpha`.
pub const SHARPNESS_BETAS: [f64; 3] = [0.0, 1.5, 2.0];

/// Computes the table for one ParamSet. Errors here abort only this item.
pub fn evaluate(spec: &RunSpec, p: &ParamSet) -> Result<ItemReport> {
    let g = build_grid(p, spec.resolution)?;
    let (table, failed_checks) = match spec.command {
        Command::Constants => constants(p, &g)?,
        Command::Deficit => deficit(p, &g, &spec.corpus),
        Command::Identity => identity(p, &g, &spec.corpus),
        Command::Distance => distance(p, &g, &spec.corpus),
        Command::Probe => probe(p, &g, &spec.corpus),
        Command::Lemmas => lemmas(p, &g, &spec.corpus)?,
        Command::Alpha => alpha(p, &g, &spec.corpus)?,
    };
    Ok(ItemReport {
        command: spec.command,
        params: *p,
        resolution: spec.resolution,
        table,
        failed_checks,
    })
}

/// `(terms, bump, epsilon)` for every member the recipes describe, the bare
/// extremal first when `with_extremal`.
fn members(recipes: &[Recipe], default_eps: &[f64], with_extremal: bool) -> Vec<Vec<(BumpShape, f64)>> {
    let mut out = Vec::new();
    if with_extremal {
        out.push(vec![]);
    }
    if recipes.is_empty() {
        for shape in BumpShape::ALL {
            out.extend(default_eps.iter().map(|&e| vec![(shape, e)]));
        }
    } else {
        for r in recipes {
            out.extend(r.epsilons.iter().map(|&e| vec![(r.bump, e)]));
        }
    }
    out
}

fn member_cells(terms: &[(BumpShape, f64)]) -> Vec<(&'static str, Cell)> {
    let id = gnslab_core::corpus::member_id(terms);
    match terms.first() {
        Some((shape, eps)) => vec![("member", id.into()), ("bump", shape.name().into()), ("epsilon", (*eps).into())],
        None => vec![("member", id.into()), ("epsilon", 0.0.into())],
    }
}

fn constants(p: &ParamSet, g: &QuadratureGrid) -> Result<(Table, usize)> {
    let consts = SharpConstants::compute(p, g)?;
    let c1q = c1_quadrature(p, g)?;
    let c5 = c5_constant(p)?;
    let mut t = Table::new(&["quantity", "value"]);
    let rows: [(&str, f64); 14] = [
        ("two_star", p.two_star()),
        ("gamma", p.gamma()),
        ("mu", p.mu()),
        ("A", consts.a),
        ("S", consts.s),
        ("S2", consts.s * consts.s),
        ("C1", consts.c1),
        ("C1_quadrature", c1q),
        ("C4", c4_constant(p)),
        ("lemma31_cap", lemma31_cap(p)),
        ("lemma31_delta", default_lemma31_delta(p)),
        ("C5", c5.c5),
        ("C5_full_integral", c5.full_integral),
        ("C5_truncated_integral", c5.truncated_integral),
    ];
    for (name, value) in rows {
        t.push(vec![("quantity", name.into()), ("value", value.into())]);
    }
    let failed = usize::from(((c1q - consts.c1) / consts.c1).abs() > CONSTANT_TOL);
    Ok((t, failed))
}

fn deficit(p: &ParamSet, g: &QuadratureGrid, recipes: &[Recipe]) -> (Table, usize) {
    let mut t = Table::new(&[
        "member",
        "bump",
        "epsilon",
        "deficit",
        "gn_leading_term",
        "sobolev_deficit",
        "error",
    ]);
    let mut failed = 0;
    for terms in members(recipes, &LEMMA_EPSILONS, true) {
        let mut cells = member_cells(&terms);
        let row = (|| {
            let m = CorpusMember::build(p, g, terms.clone(), Normalization::Mass)?;
            let d = gn_deficit(&m.profile, p, g)?;
            let lead = gn_leading_term(&m.profile, p, g)?;
            let sd = sobolev_deficit(&m.lift(p, g)?, p, g)?;
            Ok::<_, gnslab_core::Error>(vec![
                ("deficit", d.into()),
                ("gn_leading_term", lead.into()),
                ("sobolev_deficit", sd.into()),
            ])
        })();
        match row {
            Ok(r) => cells.extend(r),
            Err(e) => {
                failed += 1;
                cells.push(("error", e.to_string().into()));
            }
        }
        t.push(cells);
    }
    (t, failed)
}

fn identity(p: &ParamSet, g: &QuadratureGrid, recipes: &[Recipe]) -> (Table, usize) {
    let mut t = Table::new(&[
        "member",
        "bump",
        "epsilon",
        "deficit",
        "sobolev_deficit",
        "c1",
        "identity_residual",
        "relative_residual",
        "passes",
        "error",
    ]);
    let mut failed = 0;
    for terms in members(recipes, &LEMMA_EPSILONS, true) {
        let mut cells = member_cells(&terms);
        let row = CorpusMember::build(p, g, terms.clone(), Normalization::Ratio)
            .and_then(|m| deficit_identity(&m.profile, p, g));
        match row {
            Ok(r) => {
                let passes = r.relative_residual() <= IDENTITY_TOL;
                failed += usize::from(!passes);
                cells.extend([
                    ("deficit", r.gn_deficit.into()),
                    ("sobolev_deficit", r.sobolev_deficit.into()),
                    ("c1", r.c1.into()),
                    ("identity_residual", r.identity_residual.into()),
                    ("relative_residual", r.relative_residual().into()),
                    ("passes", passes.into()),
                ]);
            }
            Err(e) => {
                failed += 1;
                cells.extend([("passes", false.into()), ("error", e.to_string().into())]);
            }
        }
        t.push(cells);
    }
    (t, failed)
}

fn distance(p: &ParamSet, g: &QuadratureGrid, recipes: &[Recipe]) -> (Table, usize) {
    let mut t = Table::new(&[
        "member",
        "bump",
        "epsilon",
        "deficit",
        "l1_distance",
        "lambda_opt",
        "h1_distance",
        "h1_z",
        "h1_s",
        "lp_distance",
        "lp_z",
        "lp_s",
        "converged",
        "error",
    ]);
    let mut failed = 0;
    for terms in members(recipes, &PROBE_EPSILONS, true) {
        let mut cells = member_cells(&terms);
        let row = (|| {
            let mass = CorpusMember::build(p, g, terms.clone(), Normalization::Mass)?;
            let l1 = l1_gn_distance(&mass.profile, p, g)?;
            let phi = CorpusMember::build(p, g, terms.clone(), Normalization::Ratio)?.lift(p, g)?;
            let h1 = h1_distance(&phi, p, g)?;
            let lp = lp_distance(&phi, p, g)?;
            Ok::<_, gnslab_core::Error>(vec![
                ("deficit", gn_deficit(&mass.profile, p, g)?.into()),
                ("l1_distance", l1.distance.into()),
                ("lambda_opt", l1.lambda_opt.into()),
                ("h1_distance", h1.distance.into()),
                ("h1_z", h1.z_opt.into()),
                ("h1_s", h1.s_opt.into()),
                ("lp_distance", lp.distance.into()),
                ("lp_z", lp.z_opt.into()),
                ("lp_s", lp.s_opt.into()),
                ("converged", (l1.converged && h1.converged && lp.converged).into()),
            ])
        })();
        match row {
            Ok(r) => cells.extend(r),
            Err(e) => {
                failed += 1;
                cells.push(("error", e.to_string().into()));
            }
        }
        t.push(cells);
    }
    (t, failed)
}

fn probe(p: &ParamSet, g: &QuadratureGrid, recipes: &[Recipe]) -> (Table, usize) {
    let mut t = Table::new(&[
        "epsilon",
        "deficit",
        "l1_distance",
        "h1_distance",
        "slope",
        "bump",
        "lambda_opt",
        "fit_residual",
        "points_used",
        "monotone",
        "k1_estimate",
        "error",
    ]);
    let default: Vec<Recipe> = BumpShape::ALL
        .into_iter()
        .map(|bump| Recipe {
            bump,
            epsilons: PROBE_EPSILONS.to_vec(),
        })
        .collect();
    let recipes = if recipes.is_empty() { &default[..] } else { recipes };
    let mut failed = 0;
    for r in recipes {
        match stability_probe(p, g, r.bump, &r.epsilons) {
            Ok(res) => {
                for i in 0..res.epsilons.len() {
                    t.push(vec![
                        ("epsilon", res.epsilons[i].into()),
                        ("deficit", res.deficits[i].into()),
                        ("l1_distance", res.l1_distances[i].into()),
                        ("h1_distance", res.h1_distances[i].into()),
                        ("slope", res.fitted_slope.into()),
                        ("bump", r.bump.name().into()),
                        ("lambda_opt", res.lambda_opts[i].into()),
                        ("fit_residual", res.residual.into()),
                        ("points_used", res.points_used.into()),
                        ("monotone", res.monotone.into()),
                        ("k1_estimate", res.k1_estimate.into()),
                    ]);
                }
            }
            Err(e) => {
                failed += 1;
                t.push(vec![("bump", r.bump.name().into()), ("error", e.to_string().into())]);
            }
        }
    }
    (t, failed)
}

fn corpus(
    p: &ParamSet,
    g: &QuadratureGrid,
    recipes: &[Recipe],
    norm: Normalization,
    table: &mut Table,
    failed: &mut usize,
) -> Vec<CorpusMember> {
    let mut out = Vec::new();
    for terms in members(recipes, &LEMMA_EPSILONS, true) {
        match CorpusMember::build(p, g, terms.clone(), norm) {
            Ok(m) => out.push(m),
            Err(e) => {
                *failed += 1;
                let mut cells = vec![("check", "corpus".into()), ("passes", false.into()), ("note", e.to_string().into())];
                cells.push(("member", gnslab_core::corpus::member_id(&terms).into()));
                table.push(cells);
            }
        }
    }
    out
}

fn lemmas(p: &ParamSet, g: &QuadratureGrid, recipes: &[Recipe]) -> Result<(Table, usize)> {
    let mut t = Table::new(&["check", "member", "r", "hypothesis_ok", "lhs", "rhs", "margin", "passes", "note"]);
    let mut failed = 0;
    let push = |t: &mut Table, check: &'static str, rec: &LemmaCheckRecord| {
        t.push(vec![
            ("check", check.into()),
            ("member", rec.input_id.as_str().into()),
            ("hypothesis_ok", rec.hypothesis_ok.into()),
            ("lhs", rec.lhs.into()),
            ("rhs", rec.rhs.into()),
            ("margin", rec.margin.into()),
            ("passes", rec.passes().into()),
            ("note", rec.note.clone().map_or(Cell::Empty, Cell::Text)),
        ]);
    };

    let mass = corpus(p, g, recipes, Normalization::Mass, &mut t, &mut failed);
    for rec in check_lemma31(p, g, &mass, None)? {
        failed += usize::from(!rec.passes());
        push(&mut t, "lemma31", &rec);
    }
    let ratio = corpus(p, g, recipes, Normalization::Ratio, &mut t, &mut failed);
    for rec in check_lemma41(p, g, &ratio)? {
        failed += usize::from(!rec.passes());
        push(&mut t, "lemma41", &rec);
    }
    for m in &mass {
        for c in check_est13_pointwise(p, &m.profile, &EST13_RADII) {
            failed += usize::from(!c.holds);
            t.push(vec![
                ("check", "est13".into()),
                ("member", m.id.as_str().into()),
                ("r", c.r.into()),
                ("hypothesis_ok", c.in_region.into()),
                ("lhs", c.lhs.into()),
                ("rhs", c.rhs.into()),
                ("margin", (c.rhs - c.lhs).into()),
                ("passes", c.holds.into()),
            ]);
        }
    }
    Ok((t, failed))
}

fn alpha(p: &ParamSet, g: &QuadratureGrid, recipes: &[Recipe]) -> Result<(Table, usize)> {
    let mut t = Table::new(&[
        "kind",
        "beta",
        "epsilon",
        "value",
        "sobolev_deficit",
        "h1_distance",
        "h1_norm",
        "used",
        "skipped",
        "argmin",
        "error",
    ]);
    let mut failed = 0;
    let fields = default_alpha_fields(p, g)?;
    match estimate_alpha(p, g, &fields) {
        Ok(a) => {
            failed += usize::from(a.alpha.is_nan() || a.alpha <= 0.0);
            t.push(vec![
                ("kind", "alpha".into()),
                ("beta", 2.0.into()),
                ("value", a.alpha.into()),
                ("used", a.used.into()),
                ("skipped", a.skipped.into()),
                ("argmin", a.argmin.into()),
            ]);
        }
        Err(e) => {
            failed += 1;
            t.push(vec![("kind", "alpha".into()), ("error", e.to_string().into())]);
        }
    }
    let epsilons = recipes.first().map_or(PROBE_EPSILONS.to_vec(), |r| r.epsilons.clone());
    for beta in SHARPNESS_BETAS {
        match sharpness_probe(p, g, beta, &epsilons) {
            Ok(s) => {
                for i in 0..s.epsilons.len() {
                    t.push(vec![
                        ("kind", "sharpness".into()),
                        ("beta", beta.into()),
                        ("epsilon", s.epsilons[i].into()),
                        ("value", s.ratios[i].into()),
                        ("sobolev_deficit", s.sobolev_deficits[i].into()),
                        ("h1_distance", s.h1_distances[i].into()),
                        ("h1_norm", s.h1_norms[i].into()),
                    ]);
                }
            }
            Err(e) => {
                failed += 1;
                t.push(vec![
                    ("kind", "sharpness".into()),
                    ("beta", beta.into()),
                    ("error", e.to_string().into()),
                ]);
            }
        }
    }
    Ok((t, failed))
}
