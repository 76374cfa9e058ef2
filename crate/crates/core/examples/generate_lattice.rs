//! Sample a model system on a few ħ and print what each slice contains.

use asylat::lattice::validate_lattice;
use asylat::{generate, ModelSystem, NoiseModel, Rect, Region};

fn main() -> asylat::Result<()> {
    let chart = ModelSystem::PolarAction(1.0).chart(Rect::from_bounds(0.0, -0.6, 1.0, 1.0))?;
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.0))?;
    let noise = NoiseModel::new(3, 1.0, 42)?;
    let (lattice, truth) = generate(&chart, &region, &[0.1, 0.07, 0.05], &noise)?;

    for (s, d) in truth.slices().iter().zip(validate_lattice(&lattice, 0.5).slices) {
        println!(
            "hbar {:<5} {:>4} points ({} in B0), min gap {:.4}, gap/hbar {:.3}",
            s.hbar,
            s.points.len(),
            d.inner_count,
            d.min_gap,
            d.gap_ratio
        );
    }
    println!("{}", serde_json::to_string(&lattice.samples()[0].points()[..3]).unwrap());
    Ok(())
}
