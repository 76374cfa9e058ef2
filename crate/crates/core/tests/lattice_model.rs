mod common;

use asylat::equivalence::{labelling_equivalent, Witness};
use asylat::geometry::{IMat2, Label, Point, Rect};
use asylat::lattice::{validate_lattice, AsymptoticLattice, LatticeSample, Region};
use asylat::synth::{generate, ModelSystem, NoiseModel};
use asylat::Error;

use common::{brute_force_witness, brute_min_gap, grid_map};

#[test]
fn equivalence_of_shifted_labels() {
    let a = grid_map(0.1, 5, |k| k);
    let b = grid_map(0.1, 5, |k| k + Label::new(3, -2));
    let r = labelling_equivalent(&a, &b, 1e-12).unwrap();
    assert!(r.equivalent);
    assert_eq!(r.witness, Some(Witness::new(IMat2::IDENTITY, Label::new(3, -2))));
}

#[test]
fn equivalence_with_itself() {
    let a = grid_map(0.1, 5, |k| k);
    assert_eq!(labelling_equivalent(&a, &a, 0.0).unwrap().witness, Some(Witness::IDENTITY));
}

#[test]
fn k1_negation_is_not_equivalent() {
    let a = grid_map(0.1, 5, |k| k);
    let b = grid_map(0.1, 5, |k| Label::new(-k.k1, k.k2));
    // exhaustive search over det +1 matrices with small entries finds nothing
    assert_eq!(brute_force_witness(&a, &b, 2, 1), None);
    assert!(brute_force_witness(&a, &b, 2, -1).is_some());
    let r = labelling_equivalent(&a, &b, 1e-12).unwrap();
    assert!(!r.equivalent);
    assert_eq!(r.witness, None);
    assert_eq!(r.reflected.map(|w| w.m), Some(IMat2::REFLECT_K1));
}

#[test]
fn mismatched_point_sets() {
    let a = grid_map(0.1, 5, |k| k);
    let b = grid_map(0.1, 4, |k| k);
    assert!(matches!(
        labelling_equivalent(&a, &b, 1e-12),
        Err(Error::StructuralMismatch { only_a: 9, only_b: 0 })
    ));
}

#[test]
fn exact_unit_lattice_spacing() {
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.0)).unwrap();
    let pts: Vec<Point> = (0..=10)
        .flat_map(|j| (0..=10).map(move |i| Point::new(0.1 * i as f64, 0.1 * j as f64)))
        .collect();
    let lat = AsymptoticLattice::new(region, vec![LatticeSample::new(0.1, pts, &region).unwrap()]).unwrap();
    let d = validate_lattice(&lat, 0.5);
    let s = &d.slices[0];
    assert!((s.min_gap - 0.1).abs() < 1e-12);
    assert!((s.gap_ratio - 1.0).abs() < 1e-10);
    assert_eq!(s.point_count, 121);
    assert_eq!(s.inner_count, 81);
    assert!(d.all_well_spaced());
}

#[test]
fn duplicated_points_never_reach_validation() {
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.0)).unwrap();
    let pts = vec![Point::new(0.2, 0.2), Point::new(0.4, 0.2), Point::new(0.2, 0.2)];
    assert!(matches!(LatticeSample::new(0.1, pts, &region), Err(Error::InvalidSample { .. })));
}

#[test]
fn polar_action_spacing_matches_brute_force() {
    let chart = ModelSystem::PolarAction(1.0).chart(Rect::from_bounds(0.0, 0.0, 1.0, 1.0)).unwrap();
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.5)).unwrap();
    let (lat, _) = generate(&chart, &region, &[0.05], &NoiseModel::none()).unwrap();
    let d = validate_lattice(&lat, 0.5);
    let oracle = brute_min_gap(lat.samples()[0].points());
    assert!((d.slices[0].min_gap - oracle).abs() < 1e-15);
    assert!((0.045..=0.055).contains(&oracle), "min gap {oracle}");
}
