//! Planar points, integer labels, rectangles and small 2×2 matrices.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point (or vector) of the spectral plane. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist_sq(self, other: Point) -> f64 {
        (self - other).norm_sq()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product, i.e. `det(self, other)`.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Lexicographic order on `(x, y)` using IEEE total ordering.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An integer lattice label `(k1, k2)`. Serialized as `[k1, k2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Label {
    pub k1: i64,
    pub k2: i64,
}

impl Label {
    pub const ORIGIN: Label = Label { k1: 0, k2: 0 };

    pub const fn new(k1: i64, k2: i64) -> Self {
        Self { k1, k2 }
    }

    pub fn as_point(self) -> Point {
        Point::new(self.k1 as f64, self.k2 as f64)
    }
}

impl From<[i64; 2]> for Label {
    fn from([k1, k2]: [i64; 2]) -> Self {
        Self { k1, k2 }
    }
}

impl From<Label> for [i64; 2] {
    fn from(l: Label) -> Self {
        [l.k1, l.k2]
    }
}

impl Add for Label {
    type Output = Label;
    fn add(self, o: Label) -> Label {
        Label::new(self.k1 + o.k1, self.k2 + o.k2)
    }
}

impl Sub for Label {
    type Output = Label;
    fn sub(self, o: Label) -> Label {
        Label::new(self.k1 - o.k1, self.k2 - o.k2)
    }
}

impl Neg for Label {
    type Output = Label;
    fn neg(self) -> Label {
        Label::new(-self.k1, -self.k2)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

/// 2×2 integer matrix, row-major. Serialized as `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct IMat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IMat2 {
    pub const IDENTITY: IMat2 = IMat2::new(1, 0, 0, 1);
    /// `k1 ↦ -k1`.
    pub const REFLECT_K1: IMat2 = IMat2::new(-1, 0, 0, 1);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, k: Label) -> Label {
        Label::new(self.a * k.k1 + self.b * k.k2, self.c * k.k1 + self.d * k.k2)
    }

    pub fn mul(&self, o: &IMat2) -> IMat2 {
        IMat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Inverse of a unimodular matrix; `None` when `|det| != 1`.
    pub fn inverse(&self) -> Option<IMat2> {
        match self.det() {
            1 => Some(IMat2::new(self.d, -self.b, -self.c, self.a)),
            -1 => Some(IMat2::new(-self.d, self.b, self.c, -self.a)),
            _ => None,
        }
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn to_real(&self) -> Mat2 {
        Mat2::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }

    /// All matrices with entries in `-bound..=bound` and the given determinant,
    /// in a fixed order.
    pub fn enumerate(bound: i64, det: i64) -> impl Iterator<Item = IMat2> {
        let r = -bound..=bound;
        r.clone()
            .flat_map(move |a| r.clone().map(move |b| (a, b)))
            .flat_map(move |(a, b)| {
                let r = -bound..=bound;
                r.clone().flat_map(move |c| r.clone().map(move |d| IMat2::new(a, b, c, d)))
            })
            .filter(move |m| m.det() == det)
    }
}

impl From<[[i64; 2]; 2]> for IMat2 {
    fn from([[a, b], [c, d]]: [[i64; 2]; 2]) -> Self {
        Self { a, b, c, d }
    }
}

impl From<IMat2> for [[i64; 2]; 2] {
    fn from(m: IMat2) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

impl fmt::Display for IMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// 2×2 real matrix, row-major. Serialized as `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Matrix whose columns are `u` and `v`.
    pub fn from_cols(u: Point, v: Point) -> Self {
        Self::new(u.x, v.x, u.y, v.y)
    }

    pub fn col(&self, j: usize) -> Point {
        match j {
            0 => Point::new(self.a, self.c),
            _ => Point::new(self.b, self.d),
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det))
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(self.a * p.x + self.b * p.y, self.c * p.x + self.d * p.y)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    /// Ratio of singular values (∞ for singular matrices).
    pub fn condition_number(&self) -> f64 {
        let f2 = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det().abs();
        if det == 0.0 {
            return f64::INFINITY;
        }
        // σ1² + σ2² = ‖A‖_F², σ1 σ2 = |det A|.
        let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
        let s1 = ((f2 + disc) / 2.0).sqrt();
        let s2 = det / s1;
        s1 / s2
    }
}

impl From<[[f64; 2]; 2]> for Mat2 {
    fn from([[a, b], [c, d]]: [[f64; 2]; 2]) -> Self {
        Self { a, b, c, d }
    }
}

impl From<Mat2> for [[f64; 2]; 2] {
    fn from(m: Mat2) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

/// Closed axis-aligned rectangle. Serialized as `{"min": [x, y], "max": [x, y]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn from_bounds(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self::new(Point::new(x0, y0), Point::new(x1, y1))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }

    pub fn is_proper(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.width() > 0.0 && self.height() > 0.0
    }

    /// Absolute slack used by [`Rect::contains`] so that points computed as
    /// `h * k` on the boundary are not lost to rounding.
    pub fn slack(&self) -> f64 {
        let scale = self
            .min
            .x
            .abs()
            .max(self.min.y.abs())
            .max(self.max.x.abs())
            .max(self.max.y.abs())
            .max(self.width())
            .max(self.height())
            .max(1.0);
        1e-12 * scale
    }

    pub fn contains(&self, p: Point) -> bool {
        let s = self.slack();
        p.x >= self.min.x - s && p.x <= self.max.x + s && p.y >= self.min.y - s && p.y <= self.max.y + s
    }

    pub fn shrink(&self, margin: f64) -> Rect {
        Rect::from_bounds(
            self.min.x + margin,
            self.min.y + margin,
            self.max.x - margin,
            self.max.y - margin,
        )
    }

    /// Smallest rectangle containing all points, `None` for an empty input.
    pub fn bounding<I: IntoIterator<Item = Point>>(points: I) -> Option<Rect> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first, first);
        for p in it {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        Some(Rect::new(lo, hi))
    }
}
