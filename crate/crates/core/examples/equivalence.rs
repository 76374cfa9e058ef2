//! Decide whether two labellings differ by an SL(2,Z) change of basis and a shift.

use asylat::geometry::IMat2;
use asylat::lattice::LabelEntry;
use asylat::{labelling_equivalent, Label, LabelMap, Point};

fn grid(f: impl Fn(Label) -> Label) -> asylat::Result<LabelMap> {
    let entries = (0..5)
        .flat_map(|j| (0..5).map(move |i| (i, j)))
        .map(|(i, j)| LabelEntry {
            point: Point::new(0.1 * i as f64, 0.1 * j as f64),
            k: f(Label::new(i, j)),
        })
        .collect();
    LabelMap::new(0.1, entries)
}

fn main() -> asylat::Result<()> {
    let a = grid(|k| k)?;
    let m = IMat2::new(2, 1, 1, 1);
    let b = grid(|k| m.apply(k) + Label::new(3, -1))?;
    let c = grid(|k| Label::new(-k.k1, k.k2))?;

    for (name, other) in [("change of basis", &b), ("k1 negated", &c)] {
        let eq = labelling_equivalent(&a, other, 0.0)?;
        match (eq.witness, eq.reflected) {
            (Some(w), _) => println!("{name}: equivalent, M = {}, t = {}", w.m, w.t),
            (None, Some(r)) => println!("{name}: not equivalent, reflected match M = {}, t = {}", r.m, r.t),
            (None, None) => println!("{name}: not equivalent"),
        }
    }
    Ok(())
}
