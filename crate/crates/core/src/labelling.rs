//! Good labellings of asymptotic lattices.
//!
//! [`label_single`] labels one slice by walking rows and columns of the
//! lattice from a point near the anchor `c`, extrapolating each next point
//! linearly from the two previous ones and claiming the closest unlabelled
//! point. [`label_sequence`] labels every slice and then corrects the
//! per-slice choices of basis inductively in `hbar`, so the result is a
//! linear labelling (a good labelling up to the choice of origin).

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equivalence::Witness;
use crate::error::{Error, Result};
use crate::geometry::{IMat2, Label, Mat2, Point, Rect};
use crate::lattice::{AsymptoticLattice, LabelEntry, LabelMap, LatticeSample, LinearLabelling, Region};
use crate::spatial::{IndexKind, PointPool};

/// Policy for equidistant nearest-point candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Smallest `(x, y)` in lexicographic order.
    #[default]
    LexSmallest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabellingConfig {
    /// Anchor `c ∈ B₀`; the centre of `B₀` when absent.
    pub anchor: Option<Point>,
    pub tie_break: TieBreak,
    /// Largest `|k2|` to label.
    pub max_rows: Option<u32>,
    /// Largest `|k1|` to label.
    pub max_cols: Option<u32>,
    pub neighbor_index: IndexKind,
    /// Candidates for `(0,1)` closer than this angle (radians) to the
    /// `(1,0)` direction are skipped.
    pub angle_eps: f64,
}

impl Default for LabellingConfig {
    fn default() -> Self {
        Self {
            anchor: None,
            tie_break: TieBreak::LexSmallest,
            max_rows: None,
            max_cols: None,
            neighbor_index: IndexKind::Kd,
            angle_eps: 1e-6,
        }
    }
}

impl LabellingConfig {
    pub fn with_anchor(self, anchor: Point) -> Self {
        Self {
            anchor: Some(anchor),
            ..self
        }
    }

    fn resolve_anchor(&self, region: &Region) -> Result<Point> {
        let inner = region.inner();
        let c = self.anchor.unwrap_or_else(|| inner.center());
        if !inner.contains(c) {
            return Err(Error::InvalidConfig(format!(
                "anchor {c} lies outside the working subregion {} .. {}",
                inner.min, inner.max
            )));
        }
        Ok(c)
    }
}

/// Counters collected while labelling one slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelStats {
    /// Nearest-neighbour queries issued.
    pub queries: usize,
    /// Points that received a label.
    pub labelled: usize,
    /// Points of the slice inside `B₀`.
    pub candidates: usize,
    /// Whether the final orientation flip `k1 ↦ −k1` was applied.
    pub flipped: bool,
}

struct Walk {
    pool: PointPool,
    inner: Rect,
    labels: HashMap<Label, usize>,
    max_rows: Option<i64>,
    max_cols: Option<i64>,
    e1: Point,
    e2: Point,
}

impl Walk {
    fn pos(&self, k: Label) -> Option<Point> {
        self.labels.get(&k).map(|&i| self.pool.point(i))
    }

    fn has(&self, k: Label) -> bool {
        self.labels.contains_key(&k)
    }

    fn within_caps(&self, k: Label) -> bool {
        self.max_cols.is_none_or(|m| k.k1.abs() <= m) && self.max_rows.is_none_or(|m| k.k2.abs() <= m)
    }

    fn take(&mut self, k: Label, idx: usize) {
        self.pool.remove(idx);
        self.labels.insert(k, idx);
    }

    /// Claim the closest unlabelled point to an extrapolated `target` as `k`.
    /// Fails without a query when the target leaves `B₀`; fails after the
    /// query when the closest point is farther than `radius`.
    fn claim(&mut self, k: Label, target: Point, radius: f64) -> bool {
        if self.has(k) || !self.within_caps(k) || !self.inner.contains(target) {
            return false;
        }
        match self.pool.nearest(target) {
            Some(i) if self.pool.point(i).dist(target) <= radius => {
                self.take(k, i);
                true
            }
            _ => false,
        }
    }

    /// Row step used to extend row `r` from `k` in direction `d`.
    fn row_step(&self, r: i64, k: i64, d: i64) -> Point {
        let here = self.pos(Label::new(k, r)).expect("walk extends from a labelled point");
        if let Some(back) = self.pos(Label::new(k - d, r)) {
            return here - back;
        }
        for prev in [r - r.signum(), r + r.signum()] {
            if prev == r {
                continue;
            }
            if let (Some(a), Some(b)) = (self.pos(Label::new(k, prev)), self.pos(Label::new(k + d, prev))) {
                return b - a;
            }
        }
        self.e1 * d as f64
    }

    /// Extend row `r` in both directions from a labelled seed at `k`.
    fn extend_row(&mut self, r: i64, seed: i64) {
        for d in [1i64, -1] {
            let mut k = seed;
            while self.has(Label::new(k + d, r)) {
                k += d;
            }
            loop {
                let step = self.row_step(r, k, d);
                let target = self.pos(Label::new(k, r)).unwrap() + step;
                if !self.claim(Label::new(k + d, r), target, 0.5 * step.norm()) {
                    break;
                }
                k += d;
            }
        }
    }

    /// Local row vector at `(k, r)`.
    fn local_row_vector(&self, k: i64, r: i64) -> Point {
        let here = self.pos(Label::new(k, r));
        match (here, self.pos(Label::new(k + 1, r)), self.pos(Label::new(k - 1, r))) {
            (Some(h), Some(n), _) => n - h,
            (Some(h), None, Some(p)) => h - p,
            _ => self.e1,
        }
    }

    /// Seed row `r_new` from the adjacent row `r_new − s`. Column 0 is tried
    /// first, then the other labelled columns by increasing `|k|`.
    fn seed_row(&mut self, r_new: i64, s: i64) -> Option<i64> {
        let prev = r_new - s;
        let mut cols: Vec<i64> = self.labels.keys().filter(|l| l.k2 == prev).map(|l| l.k1).collect();
        cols.sort_by_key(|&k| (k.abs(), -k));
        for k in cols {
            let base = self.pos(Label::new(k, prev)).unwrap();
            let step = match self.pos(Label::new(k, prev - s)) {
                Some(back) => base - back,
                None => self.e2 * s as f64,
            };
            let radius = 0.5 * step.norm().min(self.local_row_vector(k, prev).norm());
            if self.claim(Label::new(k, r_new), base + step, radius) {
                return Some(k);
            }
        }
        None
    }
}

/// Label one slice.
pub fn label_single(sample: &LatticeSample, region: &Region, cfg: &LabellingConfig) -> Result<LabelMap> {
    label_single_with_stats(sample, region, cfg).map(|(m, _)| m)
}

/// [`label_single`] together with query and coverage counters.
pub fn label_single_with_stats(
    sample: &LatticeSample,
    region: &Region,
    cfg: &LabellingConfig,
) -> Result<(LabelMap, LabelStats)> {
    let c = cfg.resolve_anchor(region)?;
    let inner = region.inner();
    let inside: Vec<Point> = sample.points().iter().copied().filter(|p| inner.contains(*p)).collect();
    let hbar = sample.hbar();
    if inside.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} point(s) inside the working subregion at hbar {hbar}, need at least 4",
            inside.len()
        )));
    }
    let candidates = inside.len();
    let mut w = Walk {
        pool: PointPool::new(inside, cfg.neighbor_index),
        inner,
        labels: HashMap::new(),
        max_rows: cfg.max_rows.map(i64::from),
        max_cols: cfg.max_cols.map(i64::from),
        e1: Point::default(),
        e2: Point::default(),
    };

    // origin: closest point to the anchor
    let i00 = w.pool.nearest(c).expect("pool has at least four points");
    w.take(Label::ORIGIN, i00);
    let o = w.pool.point(i00);

    // (1,0): closest point to the origin
    let i10 = w.pool.nearest(o).expect("pool has at least three points left");
    w.take(Label::new(1, 0), i10);
    w.e1 = w.pool.point(i10) - o;

    w.extend_row(0, 0);

    // (0,1): closest unlabelled point not collinear with the first row
    let (e1, sin_eps) = (w.e1, cfg.angle_eps.sin());
    let pts = w.pool.points().to_vec();
    let i01 = w
        .pool
        .nearest_where(o, |i| {
            let v = pts[i] - o;
            e1.cross(v).abs() > sin_eps * e1.norm() * v.norm()
        })
        .ok_or_else(|| {
            Error::InsufficientData(format!("all points inside the working subregion are collinear at hbar {hbar}"))
        })?;
    w.take(Label::new(0, 1), i01);
    w.e2 = w.pool.point(i01) - o;

    // rows above, then below
    for s in [1i64, -1] {
        let mut r = 0;
        if s == 1 {
            r = 1;
            w.extend_row(1, 0);
        }
        while let Some(seed) = w.seed_row(r + s, s) {
            r += s;
            w.extend_row(r, seed);
        }
    }

    let flipped = w.e1.cross(w.e2) < 0.0;
    let entries: Vec<LabelEntry> = w
        .labels
        .iter()
        .map(|(&k, &i)| LabelEntry {
            point: w.pool.point(i),
            k: if flipped { Label::new(-k.k1, k.k2) } else { k },
        })
        .collect();
    let stats = LabelStats {
        queries: w.pool.queries(),
        labelled: entries.len(),
        candidates,
        flipped,
    };
    Ok((LabelMap::new(hbar, entries)?, stats))
}

/// Parameters of the inductive correction across slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SequenceConfig {
    /// Consecutive `hbar` ratios below this trigger a density warning.
    pub density_ratio: f64,
    /// Labelled points required in the 3×3 label box around each origin.
    pub overlap_min: usize,
    /// Largest admissible relative Frobenius deviation between consecutive
    /// rescaled frames after correction.
    pub coherence_tol: f64,
    /// Entry bound for the basis-change search.
    pub search_bound: i64,
    /// Origins are aligned when a point of the next slice lies within
    /// `hbarᴺ` of the previous origin, with `N` this order.
    pub origin_order: u32,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        Self {
            density_ratio: 0.5,
            overlap_min: 5,
            coherence_tol: 0.25,
            search_bound: 2,
            origin_order: 3,
        }
    }
}

impl SequenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.density_ratio > 0.0 && self.density_ratio <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "density ratio {} must lie in (0, 1]",
                self.density_ratio
            )));
        }
        if !(self.coherence_tol > 0.0) || self.search_bound < 1 {
            return Err(Error::InvalidConfig("coherence tolerance and search bound must be positive".into()));
        }
        Ok(())
    }
}

/// How slice `j` was matched to slice `j − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceLink {
    pub from_hbar: f64,
    pub to_hbar: f64,
    /// Relabelling applied to the candidate map of the finer slice.
    pub witness: Witness,
    /// Relative frame deviation after correction.
    pub deviation: f64,
    /// Whether the origin was moved onto a point shared with the coarser slice.
    pub origin_aligned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceOutcome {
    pub labelling: LinearLabelling,
    pub links: Vec<SliceLink>,
    pub stats: Vec<LabelStats>,
    pub warnings: Vec<String>,
}

fn origin_label(map: &LabelMap) -> Option<Label> {
    map.basepoint().map(|_| Label::ORIGIN)
}

fn frame_at_origin(map: &LabelMap, scfg: &SequenceConfig) -> Result<Mat2> {
    let broken = |reason: String| Error::InsufficientData(format!("hbar {}: {reason}", map.hbar()));
    let center = origin_label(map).ok_or_else(|| broken("no point labelled (0,0)".into()))?;
    let near = map
        .entries()
        .iter()
        .filter(|e| (e.k.k1 - center.k1).abs() <= 1 && (e.k.k2 - center.k2).abs() <= 1)
        .count();
    if near < scfg.overlap_min {
        return Err(broken(format!(
            "only {near} labelled point(s) around the origin, need {}",
            scfg.overlap_min
        )));
    }
    map.local_frame(center, 1)
        .ok_or_else(|| broken("labels around the origin do not span the plane".into()))
}

/// Best basis change `N` (entries bounded, `det N = 1`) with `F'·N ≈ F`,
/// and the relative deviation it leaves.
fn best_basis_change(f_new: &Mat2, f_prev: &Mat2, bound: i64) -> (IMat2, f64) {
    let scale = f_prev.frobenius();
    let mut best = (IMat2::IDENTITY, f64::INFINITY);
    for n in IMat2::enumerate(bound, 1) {
        let dev = f_new.mul(&n.to_real()).sub(f_prev).frobenius() / scale;
        if dev < best.1 {
            best = (n, dev);
        }
    }
    best
}

/// Inductive correction of per-slice candidate maps (sorted by decreasing
/// `hbar`) into a linear labelling.
pub fn correct_sequence(candidates: Vec<LabelMap>, scfg: &SequenceConfig) -> Result<SequenceOutcome> {
    scfg.validate()?;
    let mut warnings = Vec::new();
    let mut iter = candidates.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InsufficientData("no slices to label".into()))?;
    let mut prev_frame = frame_at_origin(&first, scfg).ok();
    let mut maps = vec![first];
    let mut links = Vec::new();
    for cand in iter {
        let prev = maps.last().unwrap();
        let (from, to) = (prev.hbar(), cand.hbar());
        if to / from < scfg.density_ratio {
            warnings.push(format!(
                "hbar ratio {to}/{from} = {:.4} is below the density ratio {}",
                to / from,
                scfg.density_ratio
            ));
        }
        let sequence_break = |reason: String| Error::SequenceBreak { from, to, reason };
        let f_prev = match prev_frame {
            Some(f) => f,
            None => frame_at_origin(prev, scfg).map_err(|e| sequence_break(e.to_string()))?,
        };
        let f_new = frame_at_origin(&cand, scfg).map_err(|e| sequence_break(e.to_string()))?;
        let (n, deviation) = best_basis_change(&f_new, &f_prev, scfg.search_bound);
        if !(deviation < scfg.coherence_tol) {
            return Err(sequence_break(format!(
                "rescaled frames differ by {deviation:.4} after the best basis change (tolerance {})",
                scfg.coherence_tol
            )));
        }
        let m = n.inverse().expect("det 1");

        // origin alignment on a shared point
        let tol = to.powi(scfg.origin_order as i32);
        let shared = prev.basepoint().and_then(|o| {
            cand.entries()
                .iter()
                .filter(|e| e.point.dist(o) <= tol)
                .min_by(|a, b| a.point.dist(o).total_cmp(&b.point.dist(o)))
                .map(|e| e.k)
        });
        let t = shared.map_or(Label::ORIGIN, |k| -m.apply(k));
        let witness = Witness::new(m, t);
        let corrected = cand.transformed(m, t)?;
        prev_frame = frame_at_origin(&corrected, scfg).ok();
        links.push(SliceLink {
            from_hbar: from,
            to_hbar: to,
            witness,
            deviation,
            origin_aligned: shared.is_some(),
        });
        maps.push(corrected);
    }
    Ok(SequenceOutcome {
        labelling: LinearLabelling::new(maps)?,
        links,
        stats: Vec::new(),
        warnings,
    })
}

/// Label every slice, then correct the sequence inductively.
pub fn label_sequence(
    lattice: &AsymptoticLattice,
    cfg: &LabellingConfig,
    scfg: &SequenceConfig,
) -> Result<SequenceOutcome> {
    scfg.validate()?;
    let region = lattice.region();
    let labelled = lattice
        .samples()
        .par_iter()
        .map(|s| label_single_with_stats(s, region, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (candidates, stats): (Vec<_>, Vec<_>) = labelled.into_iter().unzip();
    let mut outcome = correct_sequence(candidates, scfg)?;
    if lattice.samples().len() == 1 {
        outcome
            .warnings
            .push("single slice: no inductive correction was performed".into());
    }
    outcome.stats = stats;
    Ok(outcome)
}

/// Basis change that best matches each slice's rescaled frame to the
/// previous one; all identities for a corrected labelling.
pub fn coherence_witnesses(labelling: &LinearLabelling, scfg: &SequenceConfig) -> Result<Vec<IMat2>> {
    labelling
        .maps()
        .windows(2)
        .map(|w| {
            let f_prev = frame_at_origin(&w[0], scfg)?;
            let f_new = frame_at_origin(&w[1], scfg)?;
            let (n, _) = best_basis_change(&f_new, &f_prev, scfg.search_bound);
            Ok(n.inverse().expect("det 1"))
        })
        .collect()
}
