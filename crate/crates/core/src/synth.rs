//! Synthetic asymptotic lattices with known labels.
//!
//! Each slice is the image `G_ℏ(ℏk)` of the integer points `ℏk ∈ U`, with an
//! optional perturbation of norm at most `C·ℏᴺ` standing in for the
//! `O(ℏ^∞)` remainder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartJet, PolyMap};
use crate::equivalence::{labelling_equivalent, Equivalence};
use crate::error::{Error, Result};
use crate::geometry::{Label, Mat2, Point, Rect};
use crate::lattice::{AsymptoticLattice, LabelEntry, LabelMap, LatticeSample, LinearLabelling, Region};

/// Perturbation of each generated point, uniform in the disk of radius `C·ℏᴺ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoise", into = "RawNoise")]
pub struct NoiseModel {
    order: u32,
    amplitude: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct RawNoise {
    order: u32,
    amplitude: f64,
    #[serde(default)]
    seed: u64,
}

impl TryFrom<RawNoise> for NoiseModel {
    type Error = Error;
    fn try_from(r: RawNoise) -> Result<Self> {
        NoiseModel::new(r.order, r.amplitude, r.seed)
    }
}

impl From<NoiseModel> for RawNoise {
    fn from(n: NoiseModel) -> Self {
        RawNoise {
            order: n.order,
            amplitude: n.amplitude,
            seed: n.seed,
        }
    }
}

impl Default for NoiseModel {
    /// `N = 3`, `C = 1`, seed 0.
    fn default() -> Self {
        Self {
            order: 3,
            amplitude: 1.0,
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn new(order: u32, amplitude: f64, seed: u64) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidConfig(format!("noise order {order} must be at least 2")));
        }
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise amplitude {amplitude} must be finite and nonnegative"
            )));
        }
        Ok(Self {
            order,
            amplitude,
            seed,
        })
    }

    /// No perturbation at all.
    pub fn none() -> Self {
        Self {
            order: 3,
            amplitude: 0.0,
            seed: 0,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// Hard cap `C·ℏᴺ` on the perturbation norm.
    pub fn radius(&self, hbar: f64) -> f64 {
        self.amplitude * hbar.powi(self.order as i32)
    }

    /// Random stream of slice `index`; independent of every other slice.
    fn stream(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Closed-form charts used as test systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "param", rename_all = "snake_case")]
pub enum ModelSystem {
    /// Two uncoupled harmonic oscillators: `G₀ = id`, `G₁ = (½, ½)`.
    HarmonicPair,
    /// `G₀(x, y) = (x, y + s·x)`.
    Shear(f64),
    /// `G₀(x, y) = (x, y + a·x²/2)`.
    PolarAction(f64),
}

impl ModelSystem {
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |p: Option<f64>| {
            p.filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidConfig(format!("model '{name}' needs a finite parameter")))
        };
        match name {
            "harmonic_pair" => Ok(Self::HarmonicPair),
            "shear" => Ok(Self::Shear(need(param)?)),
            "polar_action" => Ok(Self::PolarAction(need(param)?)),
            other => Err(Error::UnsupportedModel(other.to_string())),
        }
    }

    pub fn chart(&self, domain: Rect) -> Result<ChartJet> {
        let terms = match *self {
            Self::HarmonicPair => vec![PolyMap::identity(), PolyMap::constant(Point::new(0.5, 0.5))],
            Self::Shear(s) => vec![PolyMap::affine(Mat2::new(1.0, 0.0, s, 1.0), Point::default()), PolyMap::zero()],
            Self::PolarAction(a) => vec![
                PolyMap::new(2, vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.5 * a, 0.0, 0.0])?,
                PolyMap::zero(),
            ],
        };
        ChartJet::new(domain, terms)
    }
}

/// Chart of a named model system on `domain`.
pub fn model_system(name: &str, param: Option<f64>, domain: Rect) -> Result<ChartJet> {
    ModelSystem::from_name(name, param)?.chart(domain)
}

/// Exact labels of one generated slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSlice {
    pub hbar: f64,
    pub points: Vec<Point>,
    /// Parallel to `points`.
    pub labels: Vec<Label>,
    /// Lattice indices with `ℏk ∈ U` whose image left the region.
    #[serde(default)]
    pub dropped: Vec<Label>,
}

impl TruthSlice {
    pub fn label_map(&self) -> Result<LabelMap> {
        let entries = self
            .points
            .iter()
            .zip(&self.labels)
            .map(|(&point, &k)| LabelEntry { point, k })
            .collect();
        LabelMap::new(self.hbar, entries)
    }
}

/// The generating chart and the exact `(k, point)` pairs of every slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGroundTruth")]
pub struct GroundTruth {
    region: Region,
    slices: Vec<TruthSlice>,
    chart: ChartJet,
}

#[derive(Deserialize)]
struct RawGroundTruth {
    region: Region,
    slices: Vec<TruthSlice>,
    chart: ChartJet,
}

impl TryFrom<RawGroundTruth> for GroundTruth {
    type Error = Error;
    fn try_from(r: RawGroundTruth) -> Result<Self> {
        let gt = GroundTruth {
            region: r.region,
            slices: r.slices,
            chart: r.chart,
        };
        for s in &gt.slices {
            if s.points.len() != s.labels.len() {
                return Err(Error::InvalidLattice(format!(
                    "ground truth at hbar {} has {} points but {} labels",
                    s.hbar,
                    s.points.len(),
                    s.labels.len()
                )));
            }
            s.label_map()?;
        }
        gt.lattice()?;
        Ok(gt)
    }
}

impl GroundTruth {
    pub fn chart(&self) -> &ChartJet {
        &self.chart
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn slices(&self) -> &[TruthSlice] {
        &self.slices
    }

    pub fn lattice(&self) -> Result<AsymptoticLattice> {
        let samples = self
            .slices
            .iter()
            .map(|s| LatticeSample::new(s.hbar, s.points.clone(), &self.region))
            .collect::<Result<Vec<_>>>()?;
        AsymptoticLattice::new(self.region, samples)
    }

    pub fn labelling(&self) -> Result<LinearLabelling> {
        LinearLabelling::new(self.slices.iter().map(TruthSlice::label_map).collect::<Result<_>>()?)
    }

    /// Compare a label map against the true labels of the slice with the
    /// same `hbar`, restricted to the points the map actually labels.
    pub fn verify_map(&self, map: &LabelMap, tol: f64) -> Result<Equivalence> {
        let slice = self
            .slices
            .iter()
            .find(|s| s.hbar == map.hbar())
            .ok_or_else(|| Error::InvalidLabelMap(format!("no ground-truth slice at hbar {}", map.hbar())))?;
        let labelled: Vec<Point> = map.points().collect();
        let truth = slice.label_map()?.restricted_to(&labelled, tol);
        labelling_equivalent(&truth, map, tol)
    }
}

/// Generate one slice per `hbar` from `chart`, keeping the points whose
/// (perturbed) image lies in the region.
pub fn generate(
    chart: &ChartJet,
    region: &Region,
    hbars: &[f64],
    noise: &NoiseModel,
) -> Result<(AsymptoticLattice, GroundTruth)> {
    if hbars.is_empty() {
        return Err(Error::InvalidConfig("at least one hbar value is required".into()));
    }
    if hbars.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidConfig("hbar values must be positive and finite".into()));
    }
    if hbars.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidConfig("hbar values must be strictly decreasing".into()));
    }
    let slices = hbars
        .par_iter()
        .enumerate()
        .map(|(i, &h)| generate_slice(chart, region, h, noise, i))
        .collect::<Result<Vec<_>>>()?;
    let truth = GroundTruth {
        region: *region,
        slices,
        chart: chart.clone(),
    };
    let lattice = truth.lattice()?;
    Ok((lattice, truth))
}

/// Integer range `{k : lo ≤ h·k ≤ hi}` with a little slack for rounding.
fn index_range(lo: f64, hi: f64, h: f64) -> std::ops::RangeInclusive<i64> {
    let eps = 1e-9;
    let a = (lo / h - eps).ceil() as i64;
    let b = (hi / h + eps).floor() as i64;
    a..=b
}

fn generate_slice(chart: &ChartJet, region: &Region, h: f64, noise: &NoiseModel, index: usize) -> Result<TruthSlice> {
    let dom = chart.domain();
    let radius = noise.radius(h);
    let mut rng = noise.stream(index);
    let (mut points, mut labels, mut dropped) = (Vec::new(), Vec::new(), Vec::new());
    for k2 in index_range(dom.min.y, dom.max.y, h) {
        for k1 in index_range(dom.min.x, dom.max.x, h) {
            let x = Point::new(h * k1 as f64, h * k2 as f64);
            let mut p = chart.eval(h, x);
            if radius > 0.0 {
                p = p + disk_sample(&mut rng, radius);
            }
            let k = Label::new(k1, k2);
            if region.contains(p) {
                points.push(p);
                labels.push(k);
            } else {
                dropped.push(k);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::DegenerateSlice { hbar: h });
    }
    Ok(TruthSlice {
        hbar: h,
        points,
        labels,
        dropped,
    })
}

fn disk_sample(rng: &mut ChaCha8Rng, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    let v = Point::new(r * theta.cos(), r * theta.sin());
    let n = v.norm();
    if n > radius {
        v * (radius / n)
    } else {
        v
    }
}
