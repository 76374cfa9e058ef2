//! Generate, label, verify and recover in one go, on a random curved chart.

use asylat::geometry::Mat2;
use asylat::{
    fit_chart, generate, label_sequence, ChartJet, FitOptions, LabellingConfig, NoiseModel, Point, PolyMap, Rect,
    Region, SequenceConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> asylat::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut small = || rng.random_range(-0.05..0.05);
    let a = Mat2::new(1.0 + small(), 0.3 + small(), small(), 0.8 + small());
    let g0 = PolyMap::new(
        2,
        vec![small(), a.a, a.b, small(), small(), small()],
        vec![small(), a.c, a.d, small(), small(), small()],
    )?;
    let chart = ChartJet::new(Rect::from_bounds(-1.6, -1.6, 1.6, 1.6), vec![g0])?;
    let region = Region::with_default_margin(Rect::from_bounds(-1.0, -1.0, 1.0, 1.0))?;
    let hbars = [0.1, 0.07, 0.05];
    let (lattice, truth) = generate(&chart, &region, &hbars, &NoiseModel::new(3, 1.0, seed)?)?;

    let out = label_sequence(&lattice, &LabellingConfig::default(), &SequenceConfig::default())?;
    for map in out.labelling.maps() {
        let eq = truth.verify_map(map, 1e-12)?;
        println!("hbar {:<5} {:>4} labels, equivalent to truth: {}", map.hbar(), map.len(), eq.equivalent);
    }
    let report = fit_chart(&out.labelling, &lattice, &FitOptions::default())?;
    let p = Point::new(0.2, -0.3);
    let j = report.jacobian_field.iter().min_by(|x, y| (x.point - p).norm().total_cmp(&(y.point - p).norm()));
    if let Some(e) = j {
        println!("fitted DG0 near {}: {:?}", e.point, e.jacobian);
    }
    println!("max residual {:.2e}", report.residuals.iter().map(|r| r.max).fold(0.0, f64::max));
    Ok(())
}
