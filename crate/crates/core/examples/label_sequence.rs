//! Label every slice and make the choices of basis coherent across ħ.

use asylat::{generate, label_sequence, LabellingConfig, ModelSystem, NoiseModel, Rect, Region, SequenceConfig};

fn main() -> asylat::Result<()> {
    let chart = ModelSystem::PolarAction(0.8).chart(Rect::from_bounds(0.0, -0.6, 1.0, 1.0))?;
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.0))?;
    let hbars = [0.1, 0.07, 0.05, 0.035, 0.025];
    let (lattice, truth) = generate(&chart, &region, &hbars, &NoiseModel::new(3, 1.0, 1)?)?;

    let out = label_sequence(&lattice, &LabellingConfig::default(), &SequenceConfig::default())?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    for link in &out.links {
        println!(
            "{} -> {}: correction M = {}, frame deviation {:.2e}",
            link.from_hbar, link.to_hbar, link.witness.m, link.deviation
        );
    }
    for map in out.labelling.maps() {
        let w = truth.verify_map(map, 1e-12)?.witness.expect("equivalent");
        println!("hbar {:<6} {:>4} labels, basis {} relative to the truth", map.hbar(), map.len(), w.m);
    }
    Ok(())
}
