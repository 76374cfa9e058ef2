//! Label one slice and compare with the ground truth.

use asylat::labelling::label_single_with_stats;
use asylat::{generate, LabellingConfig, ModelSystem, NoiseModel, Point, Rect, Region};

fn main() -> asylat::Result<()> {
    let chart = ModelSystem::Shear(0.4).chart(Rect::from_bounds(0.0, -0.5, 1.0, 1.0))?;
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.0))?;
    let (lattice, truth) = generate(&chart, &region, &[0.05], &NoiseModel::none())?;

    let cfg = LabellingConfig::default().with_anchor(Point::new(0.5, 0.5));
    let (map, stats) = label_single_with_stats(&lattice.samples()[0], &region, &cfg)?;
    println!(
        "{} of {} points labelled with {} queries, basepoint {}",
        stats.labelled,
        stats.candidates,
        stats.queries,
        map.basepoint().unwrap()
    );

    let eq = truth.verify_map(&map, 1e-12)?;
    match eq.witness {
        Some(w) => println!("equivalent to the truth: M = {}, t = {}", w.m, w.t),
        None => println!("not equivalent"),
    }
    Ok(())
}
