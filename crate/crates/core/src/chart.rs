//! Polynomial chart jets `G_ℏ = G₀ + ℏG₁ + … + ℏᴶG_J`.
//!
//! Each `G_i` is a map ℝ² → ℝ² whose two components are bivariate
//! polynomials in the graded monomial order
//! `1, x, y, x², xy, y², x³, x²y, …`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Mat2, Point, Rect};

/// Number of monomials of total degree at most `degree`.
pub fn monomial_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Exponent pairs `(a, b)` of `x^a y^b` in graded order.
pub fn monomial_exponents(degree: usize) -> Vec<(u32, u32)> {
    let mut v = Vec::with_capacity(monomial_count(degree));
    for t in 0..=degree as u32 {
        for a in (0..=t).rev() {
            v.push((a, t - a));
        }
    }
    v
}

fn powers(v: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        p.push(acc);
        acc *= v;
    }
    p
}

/// Values of every monomial of total degree ≤ `degree` at `p`.
pub fn monomial_values(degree: usize, p: Point) -> Vec<f64> {
    let (px, py) = (powers(p.x, degree), powers(p.y, degree));
    monomial_exponents(degree)
        .into_iter()
        .map(|(a, b)| px[a as usize] * py[b as usize])
        .collect()
}

/// Partial derivatives `(∂/∂x, ∂/∂y)` of every monomial at `p`.
pub fn monomial_gradients(degree: usize, p: Point) -> Vec<(f64, f64)> {
    let (px, py) = (powers(p.x, degree), powers(p.y, degree));
    monomial_exponents(degree)
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (a as usize, b as usize);
            let dx = if a > 0 { a as f64 * px[a - 1] * py[b] } else { 0.0 };
            let dy = if b > 0 { b as f64 * px[a] * py[b - 1] } else { 0.0 };
            (dx, dy)
        })
        .collect()
}

/// A polynomial map ℝ² → ℝ² of bounded total degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolyMap", into = "RawPolyMap")]
pub struct PolyMap {
    degree: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPolyMap {
    degree: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl TryFrom<RawPolyMap> for PolyMap {
    type Error = Error;
    fn try_from(r: RawPolyMap) -> Result<Self> {
        PolyMap::new(r.degree, r.x, r.y)
    }
}

impl From<PolyMap> for RawPolyMap {
    fn from(p: PolyMap) -> Self {
        RawPolyMap {
            degree: p.degree,
            x: p.x,
            y: p.y,
        }
    }
}

impl PolyMap {
    pub fn new(degree: usize, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = monomial_count(degree);
        if x.len() != n || y.len() != n {
            return Err(Error::InvalidChart(format!(
                "degree {degree} needs {n} coefficients per component, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(&y).any(|c| !c.is_finite()) {
            return Err(Error::InvalidChart("non-finite coefficient".into()));
        }
        Ok(Self { degree, x, y })
    }

    pub fn zero() -> Self {
        Self::constant(Point::default())
    }

    pub fn constant(c: Point) -> Self {
        Self {
            degree: 0,
            x: vec![c.x],
            y: vec![c.y],
        }
    }

    /// `p ↦ m·p + offset`.
    pub fn affine(m: Mat2, offset: Point) -> Self {
        Self {
            degree: 1,
            x: vec![offset.x, m.a, m.b],
            y: vec![offset.y, m.c, m.d],
        }
    }

    pub fn identity() -> Self {
        Self::affine(Mat2::IDENTITY, Point::default())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn x_coeffs(&self) -> &[f64] {
        &self.x
    }

    pub fn y_coeffs(&self) -> &[f64] {
        &self.y
    }

    /// Coefficient of `x^a y^b` in each component (zero beyond the degree).
    pub fn coeff(&self, a: u32, b: u32) -> Point {
        let t = (a + b) as usize;
        if t > self.degree {
            return Point::default();
        }
        let i = monomial_count(t) - 1 - a as usize;
        Point::new(self.x[i], self.y[i])
    }

    /// Same map written with coefficient arrays of a higher degree.
    pub fn raised_to(&self, degree: usize) -> PolyMap {
        let degree = degree.max(self.degree);
        let mut x = vec![0.0; monomial_count(degree)];
        let mut y = x.clone();
        x[..self.x.len()].copy_from_slice(&self.x);
        y[..self.y.len()].copy_from_slice(&self.y);
        PolyMap { degree, x, y }
    }

    pub fn eval(&self, p: Point) -> Point {
        let m = monomial_values(self.degree, p);
        let dot = |c: &[f64]| c.iter().zip(&m).map(|(c, v)| c * v).sum::<f64>();
        Point::new(dot(&self.x), dot(&self.y))
    }

    /// Exact Jacobian `[[∂x/∂x, ∂x/∂y], [∂y/∂x, ∂y/∂y]]` at `p`.
    pub fn jacobian(&self, p: Point) -> Mat2 {
        let g = monomial_gradients(self.degree, p);
        let mut j = Mat2::new(0.0, 0.0, 0.0, 0.0);
        for ((cx, cy), (dx, dy)) in self.x.iter().zip(&self.y).zip(&g) {
            j.a += cx * dx;
            j.b += cx * dy;
            j.c += cy * dx;
            j.d += cy * dy;
        }
        j
    }

    /// Convert coefficients given in the scaled variable
    /// `u = ((x − center.x)/scale.x, (y − center.y)/scale.y)` into raw monomials.
    pub fn from_scaled(degree: usize, xs: &[f64], ys: &[f64], center: Point, scale: Point) -> Result<Self> {
        let exps = monomial_exponents(degree);
        if xs.len() != exps.len() || ys.len() != exps.len() {
            return Err(Error::InvalidChart("scaled coefficient length mismatch".into()));
        }
        let binom = binomials(degree);
        let mut x = vec![0.0; exps.len()];
        let mut y = vec![0.0; exps.len()];
        let index = |a: usize, b: usize| monomial_count(a + b) - 1 - a;
        for (t, &(a, b)) in exps.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            let f = scale.x.powi(-(a as i32)) * scale.y.powi(-(b as i32));
            for i in 0..=a {
                let fx = binom[a][i] * (-center.x).powi((a - i) as i32);
                for j in 0..=b {
                    let w = f * fx * binom[b][j] * (-center.y).powi((b - j) as i32);
                    let k = index(i, j);
                    x[k] += w * xs[t];
                    y[k] += w * ys[t];
                }
            }
        }
        PolyMap::new(degree, x, y)
    }
}

fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1.0; i + 1];
        for j in 1..i {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

/// Truncated expansion `G₀ + ℏG₁ + … + ℏᴶG_J` on a rectangular domain `U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChartJet")]
pub struct ChartJet {
    domain: Rect,
    terms: Vec<PolyMap>,
}

#[derive(Deserialize)]
struct RawChartJet {
    domain: Rect,
    terms: Vec<PolyMap>,
}

impl TryFrom<RawChartJet> for ChartJet {
    type Error = Error;
    fn try_from(r: RawChartJet) -> Result<Self> {
        ChartJet::new(r.domain, r.terms)
    }
}

/// Grid resolution used to check that `G₀` is a local diffeomorphism on `U`.
const JACOBIAN_GRID: usize = 21;

impl ChartJet {
    /// Fails when `terms` is empty or the Jacobian determinant of `G₀`
    /// vanishes or changes sign on a sample grid of the domain.
    pub fn new(domain: Rect, terms: Vec<PolyMap>) -> Result<Self> {
        if !domain.is_proper() {
            return Err(Error::InvalidChart("domain must have positive width and height".into()));
        }
        let g0 = terms
            .first()
            .ok_or_else(|| Error::InvalidChart("a chart jet needs at least G0".into()))?;
        let mut sign = 0.0;
        for j in 0..JACOBIAN_GRID {
            for i in 0..JACOBIAN_GRID {
                let t = |k: usize| k as f64 / (JACOBIAN_GRID - 1) as f64;
                let p = Point::new(
                    domain.min.x + t(i) * domain.width(),
                    domain.min.y + t(j) * domain.height(),
                );
                let det = g0.jacobian(p).det();
                if !det.is_finite() || det == 0.0 || (sign != 0.0 && det.signum() != sign) {
                    return Err(Error::InvalidChart(format!(
                        "Jacobian determinant of G0 vanishes or changes sign near {p}"
                    )));
                }
                sign = det.signum();
            }
        }
        Ok(Self { domain, terms })
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    /// Highest `ℏ` power `J`.
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[PolyMap] {
        &self.terms
    }

    pub fn g0(&self) -> &PolyMap {
        &self.terms[0]
    }

    /// `G_ℏ(p) = Σ ℏⁱ G_i(p)`.
    pub fn eval(&self, hbar: f64, p: Point) -> Point {
        let mut acc = Point::default();
        let mut w = 1.0;
        for g in &self.terms {
            acc = acc + g.eval(p) * w;
            w *= hbar;
        }
        acc
    }

    pub fn jacobian0(&self, p: Point) -> Mat2 {
        self.terms[0].jacobian(p)
    }

    /// Newton solve of `G₀(x) = target`, started from `start`.
    pub fn invert_g0(&self, target: Point, start: Point) -> Option<Point> {
        let g0 = self.g0();
        let mut x = start;
        for _ in 0..100 {
            let r = g0.eval(x) - target;
            let step = g0.jacobian(x).inverse()?.apply(r);
            x = x - step;
            if !x.is_finite() {
                return None;
            }
            if step.norm() <= 1e-15 * (1.0 + x.norm()) {
                break;
            }
        }
        (g0.eval(x).dist(target) <= 1e-10 * (1.0 + target.norm())).then_some(x)
    }
}
