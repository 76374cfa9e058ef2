//! Shared instance generators and brute-force oracles for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use asylat::geometry::{IMat2, Label, Mat2, Point, Rect};
use asylat::lattice::{LabelEntry, LabelMap, Region};
use asylat::{ChartJet, PolyMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::new(c, -s, s, c)
}

/// Random chart instance: `G₀(x) = A·x + b + q(x)` with `q` quadratic (or
/// zero), Jacobian condition number at most 4 on `U`, and `U` covering the
/// preimage of the region `[−1, 1]²`.
pub struct Instance {
    pub chart: ChartJet,
    pub region: Region,
    pub quadratic: bool,
}

pub fn unit_region() -> Region {
    Region::with_default_margin(Rect::from_bounds(-1.0, -1.0, 1.0, 1.0)).unwrap()
}

fn max_condition(g: &PolyMap, dom: Rect) -> f64 {
    let n = 12;
    let mut worst: f64 = 0.0;
    for j in 0..=n {
        for i in 0..=n {
            let p = Point::new(
                dom.min.x + dom.width() * i as f64 / n as f64,
                dom.min.y + dom.height() * j as f64 / n as f64,
            );
            worst = worst.max(g.jacobian(p).condition_number());
        }
    }
    worst
}

pub fn instance(seed: u64, quadratic: bool) -> Instance {
    let mut r = rng(seed);
    let region = unit_region();
    loop {
        let s1 = r.random_range(0.8..1.2);
        let kappa = r.random_range(1.0..3.5);
        let a = rotation(r.random_range(0.0..std::f64::consts::TAU))
            .mul(&Mat2::new(s1, 0.0, 0.0, s1 / kappa))
            .mul(&rotation(r.random_range(0.0..std::f64::consts::TAU)));
        let b = Point::new(r.random_range(-0.1..0.1), r.random_range(-0.1..0.1));
        let q: Vec<f64> = (0..6)
            .map(|_| if quadratic { r.random_range(-0.06..0.06) } else { 0.0 })
            .collect();
        let g0 = PolyMap::new(
            2,
            vec![b.x, a.a, a.b, q[0], q[1], q[2]],
            vec![b.y, a.c, a.d, q[3], q[4], q[5]],
        )
        .unwrap();
        // preimage of the region boundary under the affine part, padded
        let ai = a.inverse().unwrap();
        let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
            .map(|(x, y)| ai.apply(Point::new(x, y) - b));
        let bb = Rect::bounding(corners).unwrap();
        let pad = 0.25 * bb.width().max(bb.height());
        let dom = Rect::from_bounds(bb.min.x - pad, bb.min.y - pad, bb.max.x + pad, bb.max.y + pad);
        if max_condition(&g0, dom) > 4.0 {
            continue;
        }
        let Ok(chart) = ChartJet::new(dom, vec![g0]) else { continue };
        if quadratic && !covers_region(&chart, &region) {
            continue;
        }
        return Instance {
            chart,
            region,
            quadratic,
        };
    }
}

/// Every boundary point of the region has a preimage inside `U`.
fn covers_region(chart: &ChartJet, region: &Region) -> bool {
    let b = region.bounds();
    let dom = chart.domain();
    let n = 16;
    (0..4 * n).all(|i| {
        let t = (i % n) as f64 / n as f64;
        let p = match i / n {
            0 => Point::new(b.min.x + t * b.width(), b.min.y),
            1 => Point::new(b.max.x, b.min.y + t * b.height()),
            2 => Point::new(b.max.x - t * b.width(), b.max.y),
            _ => Point::new(b.min.x, b.max.y - t * b.height()),
        };
        chart
            .invert_g0(p, dom.center())
            .is_some_and(|x| dom.shrink(0.05 * dom.width().min(dom.height())).contains(x))
    })
}

/// Brute-force witness search: every `M` with entries in `{−bound..bound}`
/// and `det M = det`, with `t` fixed by the first matched point.
/// Points are matched by exact coordinates.
pub fn brute_force_witness(a: &LabelMap, b: &LabelMap, bound: i64, det: i64) -> Option<(IMat2, Label)> {
    let key = |p: Point| (p.x.to_bits(), p.y.to_bits());
    let in_b: HashMap<(u64, u64), Label> = b.entries().iter().map(|e| (key(e.point), e.k)).collect();
    if in_b.len() != a.len() {
        return None;
    }
    let pairs: Vec<(Label, Label)> = a
        .entries()
        .iter()
        .map(|e| in_b.get(&key(e.point)).map(|kb| (e.k, *kb)))
        .collect::<Option<_>>()?;
    let (a0, b0) = pairs[0];
    for p in -bound..=bound {
        for q in -bound..=bound {
            for r in -bound..=bound {
                for s in -bound..=bound {
                    if p * s - q * r != det {
                        continue;
                    }
                    let m = IMat2::new(p, q, r, s);
                    let t = b0 - m.apply(a0);
                    if pairs.iter().all(|(ka, kb)| m.apply(*ka) + t == *kb) {
                        return Some((m, t));
                    }
                }
            }
        }
    }
    None
}

/// `n × n` label map on the points `h·(i, j)` with labels `f(i, j)`.
pub fn grid_map(h: f64, n: i64, f: impl Fn(Label) -> Label) -> LabelMap {
    let mut e = Vec::new();
    for j in 0..n {
        for i in 0..n {
            e.push(LabelEntry {
                point: Point::new(h * i as f64, h * j as f64),
                k: f(Label::new(i, j)),
            });
        }
    }
    LabelMap::new(h, e).unwrap()
}

/// Minimum pairwise distance by exhaustive comparison.
pub fn brute_min_gap(points: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(points[i].dist(points[j]));
        }
    }
    best
}

/// Length of the shortest nonzero vector of `A·ℤ²`, by enumeration.
pub fn shortest_vector(a: &Mat2) -> f64 {
    let mut best = f64::INFINITY;
    for i in -6i64..=6 {
        for j in -6i64..=6 {
            if (i, j) != (0, 0) {
                best = best.min(a.apply(Point::new(i as f64, j as f64)).norm());
            }
        }
    }
    best
}

/// Random unimodular matrix with entries in `{−bound..bound}`.
pub fn random_sl2(r: &mut ChaCha8Rng, bound: i64) -> IMat2 {
    loop {
        let m = IMat2::new(
            r.random_range(-bound..=bound),
            r.random_range(-bound..=bound),
            r.random_range(-bound..=bound),
            r.random_range(-bound..=bound),
        );
        if m.det() == 1 {
            return m;
        }
    }
}
