//! Fit a chart jet to a labelled lattice and print the fitted coefficients.

use asylat::recovery::OriginMode;
use asylat::{fit_chart, generate, FitOptions, ModelSystem, NoiseModel, Rect, Region};

fn main() -> asylat::Result<()> {
    let chart = ModelSystem::HarmonicPair.chart(Rect::from_bounds(0.0, 0.0, 1.0, 1.0))?;
    let region = Region::with_default_margin(Rect::from_bounds(0.0, 0.0, 1.1, 1.1))?;
    let (lattice, truth) = generate(&chart, &region, &[0.1, 0.07, 0.05, 0.035, 0.02], &NoiseModel::none())?;

    // ground-truth labels are a good labelling, so the origin is fixed
    let report = fit_chart(&truth.labelling()?, &lattice, &FitOptions::new(1, 1, OriginMode::Fixed))?;
    for (i, g) in report.fitted_chart.terms().iter().enumerate() {
        println!("G{i}: x {:?}", g.x_coeffs());
        println!("    y {:?}", g.y_coeffs());
    }
    for r in &report.residuals {
        println!("hbar {:<6} max residual {:.2e}", r.hbar, r.max);
    }
    Ok(())
}
