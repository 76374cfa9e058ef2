//! Nearest-neighbour pools over a fixed planar point set.
//!
//! A [`PointPool`] answers "closest remaining point to a target" queries and
//! supports permanent removal of claimed points. Equidistant candidates are
//! resolved by the smallest `(x, y)` in lexicographic order, so every query
//! has a unique answer regardless of the backing index.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// Backing structure for a [`PointPool`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    /// Uniform grid with about one point per cell.
    GridBucket,
    /// Static k-d tree with per-subtree live counts.
    #[default]
    Kd,
}

trait SpatialIndex: Send + Sync {
    fn nearest(&self, target: Point, accept: &mut dyn FnMut(usize) -> bool) -> Option<usize>;
    fn remove(&mut self, idx: usize);
}

/// Order candidates by squared distance, then lexicographically.
fn closer(points: &[Point], target: Point, i: usize, j: usize) -> bool {
    let (pi, pj) = (points[i], points[j]);
    match pi.dist_sq(target).total_cmp(&pj.dist_sq(target)) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => pi.lex_cmp(&pj) == Ordering::Less,
    }
}

/// A removable set of points with counted nearest-neighbour queries.
pub struct PointPool {
    points: Vec<Point>,
    alive: Vec<bool>,
    remaining: usize,
    queries: usize,
    index: Box<dyn SpatialIndex>,
}

impl PointPool {
    pub fn new(points: Vec<Point>, kind: IndexKind) -> Self {
        let index: Box<dyn SpatialIndex> = match kind {
            IndexKind::Kd => Box::new(KdIndex::build(&points)),
            IndexKind::GridBucket => Box::new(GridIndex::build(&points)),
        };
        let n = points.len();
        Self {
            points,
            alive: vec![true; n],
            remaining: n,
            queries: 0,
            index,
        }
    }

    pub fn point(&self, idx: usize) -> Point {
        self.points[idx]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn is_alive(&self, idx: usize) -> bool {
        self.alive[idx]
    }

    /// Number of nearest-neighbour queries answered so far.
    pub fn queries(&self) -> usize {
        self.queries
    }

    /// Closest remaining point to `target`.
    pub fn nearest(&mut self, target: Point) -> Option<usize> {
        self.nearest_where(target, |_| true)
    }

    /// Closest remaining point to `target` among those accepted by `accept`.
    pub fn nearest_where<F>(&mut self, target: Point, mut accept: F) -> Option<usize>
    where
        F: FnMut(usize) -> bool,
    {
        self.queries += 1;
        self.index.nearest(target, &mut accept)
    }

    /// Remove a point from the pool. Removing twice is a no-op.
    pub fn remove(&mut self, idx: usize) {
        if self.alive[idx] {
            self.alive[idx] = false;
            self.remaining -= 1;
            self.index.remove(idx);
        }
    }
}

const NONE: u32 = u32::MAX;

struct KdNode {
    point: u32,
    axis: u8,
    left: u32,
    right: u32,
    parent: u32,
    live: u32,
    alive: bool,
}

struct KdIndex {
    points: Vec<Point>,
    nodes: Vec<KdNode>,
    node_of: Vec<u32>,
    root: u32,
}

impl KdIndex {
    fn build(points: &[Point]) -> Self {
        let mut ids: Vec<u32> = (0..points.len() as u32).collect();
        let mut idx = KdIndex {
            points: points.to_vec(),
            nodes: Vec::with_capacity(points.len()),
            node_of: vec![NONE; points.len()],
            root: NONE,
        };
        idx.root = idx.build_rec(&mut ids, 0, NONE);
        idx
    }

    fn coord(p: Point, axis: u8) -> f64 {
        if axis == 0 {
            p.x
        } else {
            p.y
        }
    }

    fn build_rec(&mut self, ids: &mut [u32], depth: usize, parent: u32) -> u32 {
        if ids.is_empty() {
            return NONE;
        }
        let axis = (depth % 2) as u8;
        let mid = ids.len() / 2;
        let pts = &self.points;
        ids.select_nth_unstable_by(mid, |&i, &j| {
            Self::coord(pts[i as usize], axis)
                .total_cmp(&Self::coord(pts[j as usize], axis))
                .then(i.cmp(&j))
        });
        let me = self.nodes.len() as u32;
        let point = ids[mid];
        self.nodes.push(KdNode {
            point,
            axis,
            left: NONE,
            right: NONE,
            parent,
            live: ids.len() as u32,
            alive: true,
        });
        self.node_of[point as usize] = me;
        let (lo, rest) = ids.split_at_mut(mid);
        let hi = &mut rest[1..];
        let left = self.build_rec(lo, depth + 1, me);
        let right = self.build_rec(hi, depth + 1, me);
        self.nodes[me as usize].left = left;
        self.nodes[me as usize].right = right;
        me
    }

    fn search(
        &self,
        node: u32,
        target: Point,
        best: &mut Option<(usize, f64)>,
        accept: &mut dyn FnMut(usize) -> bool,
    ) {
        if node == NONE {
            return;
        }
        let n = &self.nodes[node as usize];
        if n.live == 0 {
            return;
        }
        let idx = n.point as usize;
        let p = self.points[idx];
        if n.alive && accept(idx) {
            let better = match *best {
                None => true,
                Some((b, _)) => closer(&self.points, target, idx, b),
            };
            if better {
                *best = Some((idx, p.dist_sq(target)));
            }
        }
        let diff = Self::coord(target, n.axis) - Self::coord(p, n.axis);
        let (near, far) = if diff <= 0.0 {
            (n.left, n.right)
        } else {
            (n.right, n.left)
        };
        self.search(near, target, best, accept);
        // Equality keeps exact ties reachable on the far side.
        if best.is_none_or(|(_, d2)| diff * diff <= d2) {
            self.search(far, target, best, accept);
        }
    }
}

impl SpatialIndex for KdIndex {
    fn nearest(&self, target: Point, accept: &mut dyn FnMut(usize) -> bool) -> Option<usize> {
        let mut best = None;
        self.search(self.root, target, &mut best, accept);
        best.map(|(i, _)| i)
    }

    fn remove(&mut self, idx: usize) {
        let mut node = self.node_of[idx];
        if node == NONE || !self.nodes[node as usize].alive {
            return;
        }
        self.nodes[node as usize].alive = false;
        while node != NONE {
            let n = &mut self.nodes[node as usize];
            n.live -= 1;
            node = n.parent;
        }
    }
}

struct GridIndex {
    points: Vec<Point>,
    alive: Vec<bool>,
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl GridIndex {
    fn build(points: &[Point]) -> Self {
        let n = points.len().max(1);
        let (origin, w, h) = match crate::geometry::Rect::bounding(points.iter().copied()) {
            Some(r) => (r.min, r.width(), r.height()),
            None => (Point::default(), 0.0, 0.0),
        };
        let mut cell = if w > 0.0 && h > 0.0 {
            (w * h / n as f64).sqrt()
        } else {
            w.max(h) / n as f64
        };
        if !(cell > 0.0 && cell.is_finite()) {
            cell = 1.0;
        }
        let nx = ((w / cell).floor() as usize + 1).min(1 << 16);
        let ny = ((h / cell).floor() as usize + 1).min(1 << 16);
        let mut g = GridIndex {
            points: points.to_vec(),
            alive: vec![true; points.len()],
            origin,
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
        };
        for (i, &p) in points.iter().enumerate() {
            let (cx, cy) = g.cell_of(p);
            g.cells[cy * nx + cx].push(i as u32);
        }
        g
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        let cx = fx.clamp(0.0, (self.nx - 1) as f64) as usize;
        let cy = fy.clamp(0.0, (self.ny - 1) as f64) as usize;
        (cx, cy)
    }

    /// Lower bound on the distance from `target` to any cell outside the
    /// block of Chebyshev radius `r` around `(cx, cy)`; `None` when the block
    /// already covers the whole grid.
    fn outside_bound(&self, target: Point, cx: usize, cy: usize, r: usize) -> Option<f64> {
        let mut bound = f64::INFINITY;
        let (cx, cy, r) = (cx as i64, cy as i64, r as i64);
        if cx - r > 0 {
            let edge = self.origin.x + (cx - r) as f64 * self.cell;
            bound = bound.min(target.x - edge);
        }
        if cx + r < self.nx as i64 - 1 {
            let edge = self.origin.x + (cx + r + 1) as f64 * self.cell;
            bound = bound.min(edge - target.x);
        }
        if cy - r > 0 {
            let edge = self.origin.y + (cy - r) as f64 * self.cell;
            bound = bound.min(target.y - edge);
        }
        if cy + r < self.ny as i64 - 1 {
            let edge = self.origin.y + (cy + r + 1) as f64 * self.cell;
            bound = bound.min(edge - target.y);
        }
        if bound.is_infinite() {
            None
        } else {
            Some(bound.max(0.0))
        }
    }
}

impl SpatialIndex for GridIndex {
    fn nearest(&self, target: Point, accept: &mut dyn FnMut(usize) -> bool) -> Option<usize> {
        let (cx, cy) = self.cell_of(target);
        let mut best: Option<usize> = None;
        let max_r = self.nx.max(self.ny);
        for r in 0..=max_r {
            let (x0, x1) = (cx.saturating_sub(r), (cx + r).min(self.nx - 1));
            let (y0, y1) = (cy.saturating_sub(r), (cy + r).min(self.ny - 1));
            for y in y0..=y1 {
                for x in x0..=x1 {
                    if x.abs_diff(cx) != r && y.abs_diff(cy) != r {
                        continue;
                    }
                    for &i in &self.cells[y * self.nx + x] {
                        let i = i as usize;
                        if !self.alive[i] || !accept(i) {
                            continue;
                        }
                        if best.is_none_or(|b| closer(&self.points, target, i, b)) {
                            best = Some(i);
                        }
                    }
                }
            }
            match self.outside_bound(target, cx, cy, r) {
                None => break,
                Some(bound) => {
                    if let Some(b) = best {
                        if self.points[b].dist(target) < bound {
                            break;
                        }
                    }
                }
            }
        }
        best
    }

    fn remove(&mut self, idx: usize) {
        self.alive[idx] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(points: &[Point], alive: &[bool], target: Point) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..points.len() {
            if alive[i] && best.is_none_or(|b| closer(points, target, i, b)) {
                best = Some(i);
            }
        }
        best
    }

    fn check_against_brute(kind: IndexKind, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Point> = (0..300)
            .map(|_| Point::new(rng.random_range(-1.0..2.0), rng.random_range(0.0..0.5)))
            .collect();
        let mut pool = PointPool::new(points.clone(), kind);
        let mut alive = vec![true; points.len()];
        for step in 0..400 {
            let target = Point::new(rng.random_range(-3.0..4.0), rng.random_range(-2.0..2.0));
            let got = pool.nearest(target);
            assert_eq!(got, brute(&points, &alive, target), "step {step}");
            if let Some(i) = got {
                if step % 2 == 0 {
                    pool.remove(i);
                    alive[i] = false;
                }
            }
        }
        assert_eq!(pool.queries(), 400);
    }

    #[test]
    fn kd_matches_brute_force() {
        for seed in 0..5 {
            check_against_brute(IndexKind::Kd, seed);
        }
    }

    #[test]
    fn grid_matches_brute_force() {
        for seed in 0..5 {
            check_against_brute(IndexKind::GridBucket, seed);
        }
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let pts = vec![
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(-1.0, 0.0),
            Point::new(0.0, -1.0),
        ];
        for kind in [IndexKind::Kd, IndexKind::GridBucket] {
            let mut pool = PointPool::new(pts.clone(), kind);
            assert_eq!(pool.nearest(Point::new(0.0, 0.0)), Some(2));
            pool.remove(2);
            assert_eq!(pool.nearest(Point::new(0.0, 0.0)), Some(3));
        }
    }

    #[test]
    fn filtered_query_and_exhaustion() {
        let pts: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 0.0)).collect();
        for kind in [IndexKind::Kd, IndexKind::GridBucket] {
            let mut pool = PointPool::new(pts.clone(), kind);
            assert_eq!(pool.nearest_where(Point::new(0.0, 0.0), |i| i % 3 == 2), Some(2));
            for i in 0..10 {
                pool.remove(i);
            }
            assert_eq!(pool.remaining(), 0);
            assert_eq!(pool.nearest(Point::new(0.0, 0.0)), None);
        }
    }
}
