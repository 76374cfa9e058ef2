//! Asymptotic lattices, label maps and linear labellings.
//!
//! A lattice is a decreasing sequence of `hbar` slices over a common
//! rectangular region `B`. Each slice is a finite set of distinct points of
//! `B`. Labellings assign integer pairs `(k1, k2)` to the points of a slice.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{IMat2, Label, Mat2, Point, Rect};
use crate::spatial::{IndexKind, PointPool};

/// Points closer than this are treated as duplicates.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-12;

/// Fraction of the smaller side used as the default inner margin.
pub const DEFAULT_MARGIN_FRACTION: f64 = 0.1;

/// The spectral window `B` and the working subregion `B₀` obtained by
/// shrinking it by `inner_margin` on every side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRegion", into = "RawRegion")]
pub struct Region {
    bounds: Rect,
    inner_margin: f64,
}

#[derive(Serialize, Deserialize)]
struct RawRegion {
    min: Point,
    max: Point,
    inner_margin: f64,
}

impl TryFrom<RawRegion> for Region {
    type Error = Error;
    fn try_from(r: RawRegion) -> Result<Self> {
        Region::new(Rect::new(r.min, r.max), r.inner_margin)
    }
}

impl From<Region> for RawRegion {
    fn from(r: Region) -> Self {
        RawRegion {
            min: r.bounds.min,
            max: r.bounds.max,
            inner_margin: r.inner_margin,
        }
    }
}

impl Region {
    pub fn new(bounds: Rect, inner_margin: f64) -> Result<Self> {
        if !bounds.is_proper() {
            return Err(Error::InvalidRegion(format!(
                "rectangle {} .. {} must have positive width and height",
                bounds.min, bounds.max
            )));
        }
        let half_side = 0.5 * bounds.width().min(bounds.height());
        if !(inner_margin >= 0.0 && inner_margin < half_side) {
            return Err(Error::InvalidRegion(format!(
                "inner margin {inner_margin} must lie in [0, {half_side})"
            )));
        }
        Ok(Self {
            bounds,
            inner_margin,
        })
    }

    /// Region with the default margin (10% of the smaller side).
    pub fn with_default_margin(bounds: Rect) -> Result<Self> {
        let m = DEFAULT_MARGIN_FRACTION * bounds.width().min(bounds.height());
        Self::new(bounds, m)
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    pub fn inner_margin(&self) -> f64 {
        self.inner_margin
    }

    /// The working subregion `B₀`.
    pub fn inner(&self) -> Rect {
        self.bounds.shrink(self.inner_margin)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.bounds.contains(p)
    }

    pub fn inner_contains(&self, p: Point) -> bool {
        self.inner().contains(p)
    }
}

/// One `hbar` slice: a finite set of distinct points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSample {
    hbar: f64,
    points: Vec<Point>,
}

impl LatticeSample {
    pub fn new(hbar: f64, points: Vec<Point>, region: &Region) -> Result<Self> {
        Self::with_min_separation(hbar, points, region, DEFAULT_MIN_SEPARATION)
    }

    pub fn with_min_separation(
        hbar: f64,
        points: Vec<Point>,
        region: &Region,
        min_separation: f64,
    ) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidSample { hbar, reason };
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar must be positive and finite".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite() || !region.contains(**p)) {
            return Err(invalid(format!("point {p} lies outside the region")));
        }
        if let Some((i, j)) = find_close_pair(&points, min_separation) {
            return Err(invalid(format!(
                "points #{i} {} and #{j} {} are closer than {min_separation}",
                points[i], points[j]
            )));
        }
        Ok(Self { hbar, points })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
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
}

/// Finds some pair of points closer than `eps` by an x-sorted sweep.
fn find_close_pair(points: &[Point], eps: f64) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].lex_cmp(&points[j]));
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[a + 1..] {
            if points[j].x - points[i].x >= eps {
                break;
            }
            if points[i].dist(points[j]) < eps {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// A strictly decreasing `hbar` sequence of slices over a common region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLattice")]
pub struct AsymptoticLattice {
    region: Region,
    #[serde(rename = "slices")]
    samples: Vec<LatticeSample>,
}

#[derive(Deserialize)]
struct RawLattice {
    region: Region,
    slices: Vec<RawSample>,
}

#[derive(Deserialize)]
struct RawSample {
    hbar: f64,
    points: Vec<Point>,
}

impl TryFrom<RawLattice> for AsymptoticLattice {
    type Error = Error;
    fn try_from(raw: RawLattice) -> Result<Self> {
        let samples = raw
            .slices
            .into_iter()
            .map(|s| LatticeSample::new(s.hbar, s.points, &raw.region))
            .collect::<Result<Vec<_>>>()?;
        AsymptoticLattice::new(raw.region, samples)
    }
}

impl AsymptoticLattice {
    /// Samples must already be valid for `region`; they are re-checked.
    pub fn new(region: Region, samples: Vec<LatticeSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidLattice("at least one slice is required".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].hbar < w[0].hbar) {
                return Err(Error::InvalidLattice(format!(
                    "hbar values must be strictly decreasing ({} then {})",
                    w[0].hbar, w[1].hbar
                )));
            }
        }
        if let Some(s) = samples
            .iter()
            .find(|s| s.points.iter().any(|p| !region.contains(*p)))
        {
            return Err(Error::InvalidSample {
                hbar: s.hbar,
                reason: "point outside the lattice region".into(),
            });
        }
        Ok(Self { region, samples })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn samples(&self) -> &[LatticeSample] {
        &self.samples
    }

    /// The admissible `hbar` values of this lattice, in decreasing order.
    pub fn hbars(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.hbar).collect()
    }
}

/// One labelled point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub point: Point,
    pub k: Label,
}

/// Integer labels for (part of) one slice. Entries are kept sorted by
/// `(k2, k1)`; labels and points are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLabelMap")]
pub struct LabelMap {
    hbar: f64,
    entries: Vec<LabelEntry>,
    #[serde(skip)]
    by_label: HashMap<Label, usize>,
}

#[derive(Deserialize)]
struct RawLabelMap {
    hbar: f64,
    entries: Vec<LabelEntry>,
}

impl TryFrom<RawLabelMap> for LabelMap {
    type Error = Error;
    fn try_from(raw: RawLabelMap) -> Result<Self> {
        LabelMap::new(raw.hbar, raw.entries)
    }
}

impl LabelMap {
    pub fn new(hbar: f64, mut entries: Vec<LabelEntry>) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidLabelMap(format!("hbar {hbar} must be positive")));
        }
        entries.sort_by(|a, b| (a.k.k2, a.k.k1).cmp(&(b.k.k2, b.k.k1)));
        let mut by_label = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if !e.point.is_finite() {
                return Err(Error::InvalidLabelMap(format!("non-finite point for label {}", e.k)));
            }
            if by_label.insert(e.k, i).is_some() {
                return Err(Error::InvalidLabelMap(format!("label {} assigned twice", e.k)));
            }
        }
        let pts: Vec<Point> = entries.iter().map(|e| e.point).collect();
        if let Some((i, j)) = find_close_pair(&pts, DEFAULT_MIN_SEPARATION) {
            return Err(Error::InvalidLabelMap(format!(
                "point {} carries two labels {} and {}",
                pts[i], entries[i].k, entries[j].k
            )));
        }
        Ok(Self {
            hbar,
            entries,
            by_label,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn entries(&self) -> &[LabelEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, k: Label) -> Option<Point> {
        self.by_label.get(&k).map(|&i| self.entries[i].point)
    }

    /// The point labelled `(0, 0)`, if any.
    pub fn basepoint(&self) -> Option<Point> {
        self.get(Label::ORIGIN)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.entries.iter().map(|e| e.point)
    }

    /// `det(λ₁,₀ − λ₀,₀, λ₀,₁ − λ₀,₀)`, when the three labels exist.
    pub fn orientation_det(&self) -> Option<f64> {
        let o = self.basepoint()?;
        let e1 = self.get(Label::new(1, 0))? - o;
        let e2 = self.get(Label::new(0, 1))? - o;
        Some(e1.cross(e2))
    }

    /// `false` only when the orientation determinant exists and is not positive.
    pub fn is_oriented(&self) -> bool {
        self.orientation_det().is_none_or(|d| d > 0.0)
    }

    /// Relabel every entry as `m·k + t`.
    pub fn transformed(&self, m: IMat2, t: Label) -> Result<LabelMap> {
        let entries = self
            .entries
            .iter()
            .map(|e| LabelEntry {
                point: e.point,
                k: m.apply(e.k) + t,
            })
            .collect();
        LabelMap::new(self.hbar, entries)
    }

    /// Keep only the entries whose point is within `tol` of one of `points`.
    pub fn restricted_to(&self, points: &[Point], tol: f64) -> LabelMap {
        let mut pool = PointPool::new(points.to_vec(), IndexKind::Kd);
        let entries = self
            .entries
            .iter()
            .filter(|e| {
                pool.nearest(e.point)
                    .is_some_and(|i| pool.point(i).dist(e.point) <= tol)
            })
            .copied()
            .collect();
        LabelMap::new(self.hbar, entries).expect("subset of a valid label map")
    }

    /// Local lattice frame around `center`, rescaled by `1/hbar`.
    ///
    /// Least-squares fit of `λ ≈ a + F·(k − center)` over labels within
    /// Chebyshev distance `radius` of `center`; the radius grows until the
    /// labels span the plane. Columns of the result are the two basis vectors.
    pub fn local_frame(&self, center: Label, radius: i64) -> Option<Mat2> {
        let max_radius = self
            .entries
            .iter()
            .map(|e| (e.k.k1 - center.k1).abs().max((e.k.k2 - center.k2).abs()))
            .max()?;
        let mut r = radius.max(1);
        loop {
            let near: Vec<&LabelEntry> = self
                .entries
                .iter()
                .filter(|e| (e.k.k1 - center.k1).abs().max((e.k.k2 - center.k2).abs()) <= r)
                .collect();
            if let Some(f) = fit_frame(&near) {
                let s = 1.0 / self.hbar;
                return Some(Mat2::new(f.a * s, f.b * s, f.c * s, f.d * s));
            }
            if r >= max_radius {
                return None;
            }
            r *= 2;
        }
    }
}

/// Affine least squares `λ ≈ a + F k`; `None` if the labels are collinear.
fn fit_frame(entries: &[&LabelEntry]) -> Option<Mat2> {
    if entries.len() < 3 {
        return None;
    }
    let n = entries.len() as f64;
    let (mut kbar, mut lbar) = (Point::default(), Point::default());
    for e in entries {
        kbar = kbar + e.k.as_point();
        lbar = lbar + e.point;
    }
    kbar = kbar * (1.0 / n);
    lbar = lbar * (1.0 / n);
    let mut s = Mat2::new(0.0, 0.0, 0.0, 0.0);
    let mut c = Mat2::new(0.0, 0.0, 0.0, 0.0);
    for e in entries {
        let dk = e.k.as_point() - kbar;
        let dl = e.point - lbar;
        s = Mat2::new(s.a + dk.x * dk.x, s.b + dk.x * dk.y, s.c + dk.y * dk.x, s.d + dk.y * dk.y);
        c = Mat2::new(c.a + dl.x * dk.x, c.b + dl.x * dk.y, c.c + dl.y * dk.x, c.d + dl.y * dk.y);
    }
    if s.det().abs() < 1e-9 * (s.a + s.d).powi(2).max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(c.mul(&s.inverse()?))
}

/// A coherent family of label maps, one per slice, defined up to a common
/// choice of origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinearLabelling")]
pub struct LinearLabelling {
    #[serde(rename = "slices")]
    maps: Vec<LabelMap>,
}

#[derive(Deserialize)]
struct RawLinearLabelling {
    slices: Vec<LabelMap>,
}

impl TryFrom<RawLinearLabelling> for LinearLabelling {
    type Error = Error;
    fn try_from(raw: RawLinearLabelling) -> Result<Self> {
        LinearLabelling::new(raw.slices)
    }
}

impl LinearLabelling {
    pub fn new(maps: Vec<LabelMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidLabelMap("a labelling needs at least one slice".into()));
        }
        for w in maps.windows(2) {
            if !(w[1].hbar < w[0].hbar) {
                return Err(Error::InvalidLabelMap(format!(
                    "slice hbar values must be strictly decreasing ({} then {})",
                    w[0].hbar, w[1].hbar
                )));
            }
        }
        Ok(Self { maps })
    }

    pub fn maps(&self) -> &[LabelMap] {
        &self.maps
    }

    pub fn into_maps(self) -> Vec<LabelMap> {
        self.maps
    }

    /// Check that the labelling has one map per slice with matching `hbar`
    /// values, and that every labelled point belongs to its slice.
    pub fn check_against(&self, lattice: &AsymptoticLattice) -> Result<()> {
        if self.maps.len() != lattice.samples().len() {
            return Err(Error::InvalidLabelMap(format!(
                "labelling has {} slices, lattice has {}",
                self.maps.len(),
                lattice.samples().len()
            )));
        }
        for (m, s) in self.maps.iter().zip(lattice.samples()) {
            if m.hbar != s.hbar() {
                return Err(Error::InvalidLabelMap(format!(
                    "labelling slice hbar {} does not match lattice hbar {}",
                    m.hbar,
                    s.hbar()
                )));
            }
            let kept = m.restricted_to(s.points(), 1e-9);
            if kept.len() != m.len() {
                return Err(Error::InvalidLabelMap(format!(
                    "{} labelled point(s) at hbar {} are not lattice points",
                    m.len() - kept.len(),
                    m.hbar
                )));
            }
        }
        Ok(())
    }
}

/// Per-slice well-spacedness report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceDiagnostics {
    pub hbar: f64,
    pub point_count: usize,
    /// Points inside the working subregion `B₀`.
    pub inner_count: usize,
    /// Minimum pairwise distance (∞ for fewer than two points).
    pub min_gap: f64,
    /// `min_gap / hbar`.
    pub gap_ratio: f64,
    pub well_spaced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDiagnostics {
    pub slices: Vec<SliceDiagnostics>,
}

impl LatticeDiagnostics {
    pub fn all_well_spaced(&self) -> bool {
        self.slices.iter().all(|s| s.well_spaced)
    }
}

/// Minimum pairwise distance of a point set via nearest-neighbour queries.
pub fn min_pairwise_gap(points: &[Point]) -> f64 {
    let mut pool = PointPool::new(points.to_vec(), IndexKind::Kd);
    let mut best = f64::INFINITY;
    for (i, &p) in points.iter().enumerate() {
        if let Some(j) = pool.nearest_where(p, |j| j != i) {
            best = best.min(pool.point(j).dist(p));
        }
    }
    best
}

/// Reports per-slice spacing diagnostics; the slice is well spaced when its
/// minimum gap is at least `min_gap_ratio · hbar`.
pub fn validate_lattice(lattice: &AsymptoticLattice, min_gap_ratio: f64) -> LatticeDiagnostics {
    let inner = lattice.region().inner();
    let slices = lattice
        .samples()
        .iter()
        .map(|s| {
            let min_gap = min_pairwise_gap(s.points());
            SliceDiagnostics {
                hbar: s.hbar(),
                point_count: s.len(),
                inner_count: s.points().iter().filter(|p| inner.contains(**p)).count(),
                min_gap,
                gap_ratio: min_gap / s.hbar(),
                well_spaced: min_gap >= min_gap_ratio * s.hbar(),
            }
        })
        .collect();
    LatticeDiagnostics { slices }
}
