mod common;

use asylat::geometry::{IMat2, Label, Mat2, Point, Rect};
use asylat::labelling::{label_sequence, LabellingConfig, SequenceConfig};
use asylat::lattice::{AsymptoticLattice, LabelEntry, LabelMap, LinearLabelling, Region};
use asylat::recovery::{fit_chart, jacobian_field, rotation_number, FitOptions, OriginMode, RecoveryReport};
use asylat::synth::{generate, GroundTruth, ModelSystem, NoiseModel};
use asylat::{ChartJet, Error, PolyMap};

const HBARS: [f64; 5] = [0.1, 0.07, 0.05, 0.035, 0.02];

fn unit_region() -> Region {
    Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.0)).unwrap()
}

fn wide_domain() -> Rect {
    Rect::from_bounds(-0.2, -0.8, 1.2, 1.2)
}

fn setup(chart: &ChartJet, noise: &NoiseModel) -> (AsymptoticLattice, GroundTruth) {
    generate(chart, &unit_region(), &HBARS, noise).unwrap()
}

fn max_coeff_error(a: &PolyMap, b: &PolyMap) -> f64 {
    let d = a.degree().max(b.degree());
    let (a, b) = (a.raised_to(d), b.raised_to(d));
    a.x_coeffs()
        .iter()
        .chain(a.y_coeffs())
        .zip(b.x_coeffs().iter().chain(b.y_coeffs()))
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

fn relabel(labelling: &LinearLabelling, f: impl Fn(usize, Label) -> Label) -> LinearLabelling {
    let maps = labelling
        .maps()
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let entries = m
                .entries()
                .iter()
                .map(|e| LabelEntry {
                    point: e.point,
                    k: f(j, e.k),
                })
                .collect();
            LabelMap::new(m.hbar(), entries).unwrap()
        })
        .collect();
    LinearLabelling::new(maps).unwrap()
}

#[test]
fn identity_chart_is_recovered() {
    let chart = ChartJet::new(wide_domain(), vec![PolyMap::identity()]).unwrap();
    let (lat, gt) = setup(&chart, &NoiseModel::none());
    let r = fit_chart(&gt.labelling().unwrap(), &lat, &FitOptions::new(1, 0, OriginMode::Fixed)).unwrap();
    assert!(max_coeff_error(r.fitted_chart.g0(), &PolyMap::identity()) <= 1e-9);
    assert!(r.residuals.iter().all(|s| s.max <= 1e-12));
}

#[test]
fn harmonic_pair_with_first_order_term() {
    let chart = ModelSystem::HarmonicPair.chart(wide_domain()).unwrap();
    let (lat, gt) = setup(&chart, &NoiseModel::none());
    let r = fit_chart(&gt.labelling().unwrap(), &lat, &FitOptions::new(1, 1, OriginMode::Fixed)).unwrap();
    let terms = r.fitted_chart.terms();
    assert!(max_coeff_error(&terms[0], &PolyMap::identity()) <= 1e-9);
    assert!(max_coeff_error(&terms[1], &PolyMap::constant(Point::new(0.5, 0.5))) <= 1e-9);
}

#[test]
fn polar_action_residuals_stay_at_the_noise_level() {
    let chart = ModelSystem::PolarAction(1.0).chart(wide_domain()).unwrap();
    let (lat, gt) = setup(&chart, &NoiseModel::new(3, 1.0, 9).unwrap());
    let r = fit_chart(&gt.labelling().unwrap(), &lat, &FitOptions::new(2, 1, OriginMode::Fixed)).unwrap();
    // the chart is quadratic, so the only misfit is the noise (radius ħ³)
    let h_min = HBARS[4];
    let h_max = HBARS[0];
    for s in &r.residuals {
        assert!(s.max <= 2.0 * h_max.powi(3), "{s:?}");
    }
    assert!(r.residuals.iter().find(|s| s.hbar == h_min).unwrap().max <= 2.0 * h_max.powi(3));
    // a linear fit cannot follow the curvature
    let lin = fit_chart(&gt.labelling().unwrap(), &lat, &FitOptions::new(1, 1, OriginMode::Fixed)).unwrap();
    assert!(lin.residuals.iter().all(|s| s.max > 1e-2));
}

#[test]
fn residuals_decay_with_the_jet_order() {
    // G_ħ = G₀ + ħG₁ + ħ²G₂ fitted with J = 1
    let g0 = ModelSystem::PolarAction(0.8).chart(wide_domain()).unwrap().g0().clone();
    let g1 = PolyMap::affine(Mat2::new(0.2, -0.1, 0.1, 0.3), Point::new(0.1, -0.2));
    let g2 = PolyMap::new(2, vec![0.3, 0.0, 0.0, 0.4, 0.0, 0.0], vec![-0.2, 0.0, 0.0, 0.0, 0.5, 0.0]).unwrap();
    let chart = ChartJet::new(wide_domain(), vec![g0, g1, g2.clone()]).unwrap();
    let (lat, gt) = setup(&chart, &NoiseModel::new(3, 1.0, 4).unwrap());
    let r = fit_chart(&gt.labelling().unwrap(), &lat, &FitOptions::new(2, 1, OriginMode::Fixed)).unwrap();
    // |G₂| on the domain, sampled
    let b = wide_domain();
    let g2_max = (0..=20)
        .flat_map(|i| (0..=20).map(move |j| (i, j)))
        .map(|(i, j)| {
            let p = Point::new(
                b.min.x + (b.max.x - b.min.x) * i as f64 / 20.0,
                b.min.y + (b.max.y - b.min.y) * j as f64 / 20.0,
            );
            g2.eval(p).norm()
        })
        .fold(0.0, f64::max);
    for s in &r.residuals {
        let bound = 4.0 * (g2_max * s.hbar.powi(2) + s.hbar.powi(3));
        assert!(s.max <= bound, "hbar {}: residual {} > {bound}", s.hbar, s.max);
    }
    let first = r.residuals.first().unwrap().max;
    let last = r.residuals.last().unwrap().max;
    assert!(last < first / 4.0, "{first} -> {last}");
}

#[test]
fn jacobian_field_matches_closed_forms() {
    for (model, s) in [(ModelSystem::Shear(0.4), 0.4), (ModelSystem::PolarAction(1.0), 0.0)] {
        let chart = model.chart(wide_domain()).unwrap();
        let (lat, gt) = setup(&chart, &NoiseModel::none());
        let r = fit_chart(&gt.labelling().unwrap(), &lat, &FitOptions::new(2, 1, OriginMode::Fixed)).unwrap();
        let at = [Point::new(0.3, 0.4), Point::new(0.6, 0.5), Point::new(0.5, 0.7)];
        for e in jacobian_field(&r, &at).unwrap() {
            let want = match model {
                ModelSystem::Shear(_) => Mat2::new(1.0, 0.0, s, 1.0),
                // preimage of (x, y) is (x, y − x²/2), DG₀ = [[1, 0], [x, 1]]
                _ => Mat2::new(1.0, 0.0, e.point.x, 1.0),
            };
            let err = e.jacobian.sub(&want).frobenius();
            assert!(err <= 1e-6, "{model:?} at {}: {err}", e.point);
        }
    }
}

#[test]
fn rotation_numbers_of_the_models() {
    for s in [-0.7, 0.0, 0.25] {
        let chart = ModelSystem::Shear(s).chart(wide_domain()).unwrap();
        let (lat, gt) = setup(&chart, &NoiseModel::none());
        let r = fit_chart(&gt.labelling().unwrap(), &lat, &FitOptions::new(1, 1, OriginMode::Fixed)).unwrap();
        let rho = rotation_number(&r, Point::new(0.5, 0.5)).unwrap().rho;
        assert!((rho + s).abs() <= 1e-9, "shear({s}): {rho}");
    }
    let chart = ModelSystem::PolarAction(1.0).chart(wide_domain()).unwrap();
    let (lat, gt) = setup(&chart, &NoiseModel::none());
    let r = fit_chart(&gt.labelling().unwrap(), &lat, &FitOptions::default()).unwrap();
    for x in [0.25, 0.5, 0.75] {
        let rho = rotation_number(&r, Point::new(x, 0.5)).unwrap().rho;
        assert!((rho + x).abs() <= 1e-6, "polar_action at x = {x}: {rho}");
    }
}

fn pipeline(chart: &ChartJet, noise: &NoiseModel) -> (AsymptoticLattice, LinearLabelling) {
    let (lat, _) = setup(chart, noise);
    let out = label_sequence(&lat, &LabellingConfig::default(), &SequenceConfig::default()).unwrap();
    (lat, out.labelling)
}

fn g0_jacobians(r: &RecoveryReport, at: &[Point]) -> Vec<Mat2> {
    jacobian_field(r, at).unwrap().into_iter().map(|e| e.jacobian).collect()
}

const PROBES: [Point; 3] = [Point { x: 0.3, y: 0.3 }, Point { x: 0.5, y: 0.6 }, Point { x: 0.7, y: 0.4 }];

#[test]
fn per_slice_origins_do_not_matter() {
    let chart = ModelSystem::PolarAction(1.0).chart(wide_domain()).unwrap();
    let (lat, labelling) = pipeline(&chart, &NoiseModel::none());
    let opts = FitOptions::default();
    let base = fit_chart(&labelling, &lat, &opts).unwrap();
    let shifts = [Label::new(3, -2), Label::new(-7, 1), Label::new(0, 5), Label::new(11, 11), Label::new(-4, -9)];
    let moved = relabel(&labelling, |j, k| k + shifts[j]);
    let other = fit_chart(&moved, &lat, &opts).unwrap();
    for (a, b) in g0_jacobians(&base, &PROBES).iter().zip(g0_jacobians(&other, &PROBES)) {
        assert!(a.sub(&b).frobenius() <= 1e-9, "{a:?} vs {b:?}");
    }
    for (a, b) in base.rotation.iter().zip(&other.rotation) {
        assert!((a.rho - b.rho).abs() <= 1e-9);
    }
}

#[test]
fn basis_change_is_covariant() {
    let chart = ModelSystem::PolarAction(1.0).chart(wide_domain()).unwrap();
    let (lat, labelling) = pipeline(&chart, &NoiseModel::none());
    let opts = FitOptions::default();
    let base = fit_chart(&labelling, &lat, &opts).unwrap();
    for m in [IMat2::new(1, 1, 0, 1), IMat2::new(2, 1, 1, 1), IMat2::new(0, -1, 1, 0)] {
        let other = fit_chart(&relabel(&labelling, |_, k| m.apply(k)), &lat, &opts).unwrap();
        let minv = m.inverse().unwrap().to_real();
        for (a, b) in g0_jacobians(&base, &PROBES).iter().zip(g0_jacobians(&other, &PROBES)) {
            let err = a.mul(&minv).sub(&b).frobenius();
            assert!(err <= 1e-8, "M = {m:?}: {err}");
        }
    }
}

#[test]
fn collinear_labels_are_underdetermined() {
    let h = 0.1;
    let maps: Vec<LabelMap> = [h, 0.07]
        .iter()
        .map(|&h| {
            let entries = (0..10)
                .map(|i| LabelEntry {
                    point: Point::new(h * i as f64, 0.5),
                    k: Label::new(i, 0),
                })
                .collect();
            LabelMap::new(h, entries).unwrap()
        })
        .collect();
    let labelling = LinearLabelling::new(maps).unwrap();
    let lat = AsymptoticLattice::new(
        unit_region(),
        labelling
            .maps()
            .iter()
            .map(|m| asylat::lattice::LatticeSample::new(m.hbar(), m.points().collect(), &unit_region()).unwrap())
            .collect(),
    )
    .unwrap();
    match fit_chart(&labelling, &lat, &FitOptions::new(1, 0, OriginMode::Fixed)) {
        Err(e @ Error::Underdetermined { .. }) => assert!(e.to_string().contains("underdetermined"), "{e}"),
        other => panic!("expected underdetermined, got {other:?}"),
    }
}
