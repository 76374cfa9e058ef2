//! Rotation numbers from the full pipeline, in the engine's basis and in the
//! basis of the ground truth.

use asylat::recovery::rotation_number_in_basis;
use asylat::{
    fit_chart, generate, label_sequence, rotation_number, FitOptions, LabellingConfig, ModelSystem, NoiseModel, Point,
    Rect, Region, SequenceConfig,
};

fn main() -> asylat::Result<()> {
    let chart = ModelSystem::PolarAction(1.0).chart(Rect::from_bounds(0.0, -1.0, 1.0, 2.0))?;
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.0, 1.0))?;
    let (lattice, truth) = generate(&chart, &region, &[0.1, 0.07, 0.05, 0.035, 0.02], &NoiseModel::new(3, 1.0, 5)?)?;
    let out = label_sequence(&lattice, &LabellingConfig::default(), &SequenceConfig::default())?;
    let report = fit_chart(&out.labelling, &lattice, &FitOptions::default())?;
    let basis = truth.verify_map(&out.labelling.maps()[0], 1e-12)?.witness.expect("equivalent").m;

    for x in [0.25, 0.5, 0.75] {
        let at = Point::new(x, 0.5);
        let own = rotation_number(&report, at);
        let theirs = rotation_number_in_basis(&report, at, basis)?;
        let own = own.map(|r| format!("{:+.4}", r.rho)).unwrap_or_else(|e| e.to_string());
        println!(
            "at {at}: rho {own} (engine basis), {:+.4} ± {:.1e} (truth basis, expect {:+})",
            theirs.rho, theirs.radius, -x
        );
    }
    Ok(())
}
