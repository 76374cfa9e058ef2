//! Render a labelled slice to an SVG file (first argument, default `slice.svg`).

use asylat::cli::svg;
use asylat::{generate, label_single, LabellingConfig, ModelSystem, NoiseModel, Rect, Region};

fn main() -> asylat::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "slice.svg".into());
    let chart = ModelSystem::PolarAction(1.0).chart(Rect::from_bounds(0.0, -0.6, 1.0, 1.0))?;
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.0))?;
    let (lattice, _) = generate(&chart, &region, &[0.1], &NoiseModel::none())?;
    let sample = &lattice.samples()[0];
    let map = label_single(sample, &region, &LabellingConfig::default())?;
    std::fs::write(&path, svg::render(&region, sample, Some(&map))).map_err(|e| asylat::Error::InvalidConfig(e.to_string()))?;
    println!("wrote {path} ({} points, {} labels)", sample.len(), map.len());
    Ok(())
}
