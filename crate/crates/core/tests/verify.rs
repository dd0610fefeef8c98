use gnslab_core::corpus::{single_bump_corpus, BumpShape, Normalization, LEMMA_EPSILONS, PROBE_EPSILONS};
use gnslab_core::functionals::{extremal_f, extremal_v, normalize_mass};
use gnslab_core::verify::{
    c4_constant, c5_constant, check_est13_pointwise, check_lemma31, check_lemma41, default_alpha_fields,
    default_lemma31_delta, estimate_alpha, lemma31_cap, sharpness_probe, stability_probe,
};
use gnslab_core::{build_grid, derive_params, CorpusMember, Error, ParamSet, QuadratureGrid};

fn setup(n: u32, t: f64) -> (ParamSet, QuadratureGrid) {
    let p = derive_params(n, t).unwrap();
    let g = build_grid(&p, 48).unwrap();
    (p, g)
}

#[test]
fn stability_probe_planar() {
    let (p, g) = setup(2, 3.0);
    let probe = stability_probe(&p, &g, BumpShape::Wide, &PROBE_EPSILONS).unwrap();
    assert!(probe.monotone);
    assert_eq!(probe.points_used, 4);
    let slope = probe.fitted_slope.unwrap();
    assert!((0.45..=0.55).contains(&slope), "{slope}");
    assert!(probe.k1_estimate.is_finite() && probe.k1_estimate > 0.0);
    // both sides shrink with ε
    assert!(probe.deficits.windows(2).all(|w| w[1] < w[0]));
    assert!(probe.l1_distances.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn stability_probe_rejects_short_or_large_sweeps() {
    let (p, g) = setup(2, 3.0);
    assert!(stability_probe(&p, &g, BumpShape::Core, &[0.1, 0.05, 0.025]).is_err());
    assert!(stability_probe(&p, &g, BumpShape::Core, &[0.3, 0.1, 0.05, 0.025]).is_err());
}

#[test]
fn sharpness_probe_scaling() {
    let (p, g) = setup(2, 3.0);
    let sub = sharpness_probe(&p, &g, 1.5, &PROBE_EPSILONS).unwrap();
    assert!(sub.strictly_decreasing);
    // deficit ~ ε², distance ~ ε, so the β = 1.5 quotient shrinks by √2 per halving
    for f in sub.decay_factors() {
        assert!(f >= 1.35, "{f}");
    }
    let last = *sub.decay_factors().last().unwrap();
    assert!((last / 2f64.sqrt() - 1.0).abs() < 0.02);

    let crit = sharpness_probe(&p, &g, 2.0, &PROBE_EPSILONS).unwrap();
    let lo = crit.ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = crit.ratios.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.0 && lo > 0.9 * hi);

    let zero = sharpness_probe(&p, &g, 0.0, &PROBE_EPSILONS).unwrap();
    for (a, b) in zero.decay_factors().iter().zip(sub.decay_factors()) {
        assert!(*a > b);
    }
}

#[test]
fn lemma31_constants_planar() {
    let p = derive_params(2, 3.0).unwrap();
    let pi = std::f64::consts::PI;
    // γ = 1, 2* = 4, ω_2 = 2π: the cap's third term is (π²)^{1/4} / (12 · 2^{5.25})
    let third = pi.sqrt() / (12.0 * 2f64.powf(5.25));
    assert!((lemma31_cap(&p) / third - 1.0).abs() < 1e-13);
    assert!((default_lemma31_delta(&p).sqrt() - third / 4.0).abs() < 1e-15);
    assert!(c4_constant(&p) > 2.0);
}

#[test]
fn lemma31_records() {
    let (p, g) = setup(2, 3.0);
    let v = CorpusMember::build(&p, &g, vec![], Normalization::Mass).unwrap();
    let records = check_lemma31(&p, &g, &[v], None).unwrap();
    let expected = c4_constant(&p) * default_lemma31_delta(&p).sqrt();
    assert!(records[0].lhs < 1e-6 && (records[0].margin - expected).abs() < 1e-6);

    let corpus = single_bump_corpus(&p, &g, &BumpShape::ALL, &LEMMA_EPSILONS, Normalization::Mass).unwrap();
    let records = check_lemma31(&p, &g, &corpus, None).unwrap();
    assert!(records.iter().any(|r| r.hypothesis_ok));
    assert!(records.iter().any(|r| !r.hypothesis_ok));
    assert!(records.iter().all(|r| r.passes()));
}

#[test]
fn lemma31_skips_unnormalized_members() {
    let (p, g) = setup(2, 3.0);
    let mut v = CorpusMember::build(&p, &g, vec![], Normalization::Mass).unwrap();
    v.profile = v.profile.scaled(1.1);
    let rec = &check_lemma31(&p, &g, &[v], None).unwrap()[0];
    assert!(!rec.hypothesis_ok && rec.note.is_some());
}

#[test]
fn lemma31_rejects_delta_above_cap() {
    let (p, g) = setup(2, 3.0);
    let delta = (2.0 * lemma31_cap(&p)).powi(2);
    assert!(matches!(check_lemma31(&p, &g, &[], Some(delta)), Err(Error::Precondition(_))));
}

#[test]
fn lemma41_records() {
    let (p, g) = setup(2, 3.0);
    assert!(c5_constant(&p).unwrap().low_dimension);
    let v = CorpusMember::build(&p, &g, vec![], Normalization::Ratio).unwrap();
    let rec = &check_lemma41(&p, &g, &[v]).unwrap()[0];
    assert!(rec.hypothesis_ok && rec.lhs < 1e-10 && rec.margin >= 0.0);
    for (n, t) in [(2, 3.0), (3, 2.0), (4, 1.5)] {
        let (p, g) = setup(n, t);
        let corpus = single_bump_corpus(&p, &g, &BumpShape::ALL, &[0.05], Normalization::Ratio).unwrap();
        for rec in check_lemma41(&p, &g, &corpus).unwrap() {
            assert!(rec.hypothesis_ok && rec.margin >= 0.0, "{rec:?}");
        }
    }
}

#[test]
fn est13_on_mixed_extremals() {
    let (p, g) = setup(2, 3.0);
    let u = extremal_v(&p, 1.0).scaled(0.9).plus(0.1, &extremal_v(&p, 2.0));
    let u = normalize_mass(&u, &p, &g).unwrap();
    let checks = check_est13_pointwise(&p, &u, &[0.0, 0.5, 1.0, 2.0]);
    assert!(checks.iter().all(|c| c.holds));
    // v itself sits on the upper edge w = H
    let checks = check_est13_pointwise(&p, &extremal_v(&p, 1.0), &[0.0, 1.0, 3.0]);
    assert!(checks.iter().all(|c| (c.w / c.h - 1.0).abs() < 1e-12 && c.holds));
}

#[test]
fn alpha_estimates() {
    let (p, g) = setup(2, 2.0);
    let fields = default_alpha_fields(&p, &g).unwrap();
    assert!(fields.len() >= 10);
    let est = estimate_alpha(&p, &g, &fields).unwrap();
    assert!(est.alpha > 0.0 && est.used == fields.len());

    let manifold_only = vec![extremal_f(&p, 1.0, 1.0), extremal_f(&p, 3.0, 2.0)];
    assert!(estimate_alpha(&p, &g, &manifold_only).is_err());

    let mut more = fields.clone();
    more.push(extremal_f(&p, 1.0, 1.0).plus(0.01, &fields[0]));
    assert!(estimate_alpha(&p, &g, &more).unwrap().alpha <= est.alpha);
}
