//! Equivalence of label maps under `SL(2, ℤ) ⋉ ℤ²`.
//!
//! Two label maps of the same point set are equivalent when one is obtained
//! from the other by `k ↦ M·k + t` with `M` an integer matrix of determinant
//! `+1` and `t` an integer shift. Orientation-reversing matches
//! (`det M = −1`) are reported separately and do not count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{IMat2, Label};
use crate::lattice::LabelMap;
use crate::spatial::{IndexKind, PointPool};

/// A relabelling `k ↦ m·k + t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub m: IMat2,
    pub t: Label,
}

impl Witness {
    pub const IDENTITY: Witness = Witness {
        m: IMat2::IDENTITY,
        t: Label::ORIGIN,
    };

    pub fn new(m: IMat2, t: Label) -> Self {
        Self { m, t }
    }

    pub fn apply(&self, k: Label) -> Label {
        self.m.apply(k) + self.t
    }

    /// `(M⁻¹, −M⁻¹t)`; `None` unless `|det M| = 1`.
    pub fn inverse(&self) -> Option<Witness> {
        let mi = self.m.inverse()?;
        Some(Witness::new(mi, -mi.apply(self.t)))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Witness) -> Witness {
        Witness::new(self.m.mul(&first.m), self.m.apply(first.t) + self.t)
    }

    pub fn is_pure_shift(&self) -> bool {
        self.m == IMat2::IDENTITY
    }
}

/// Outcome of [`labelling_equivalent`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// `(M, t)` with `det M = +1` mapping labels of `a` to labels of `b`.
    pub witness: Option<Witness>,
    /// Orientation-reversing match (`det M = −1`), when no proper one exists.
    pub reflected: Option<Witness>,
    /// Number of matched points.
    pub matched: usize,
}

/// Pairs `(label in a, label in b)` of points matched within `tol`.
pub fn match_labels(a: &LabelMap, b: &LabelMap, tol: f64) -> Result<Vec<(Label, Label)>> {
    if a.hbar() != b.hbar() {
        return Err(Error::InvalidLabelMap(format!(
            "cannot compare label maps at hbar {} and {}",
            a.hbar(),
            b.hbar()
        )));
    }
    let mut pool = PointPool::new(b.points().collect(), IndexKind::Kd);
    let mut pairs = Vec::with_capacity(a.len());
    let mut only_a = 0;
    for e in a.entries() {
        match pool.nearest(e.point) {
            Some(j) if pool.point(j).dist(e.point) <= tol => {
                pool.remove(j);
                pairs.push((e.k, b.entries()[j].k));
            }
            _ => only_a += 1,
        }
    }
    let only_b = pool.remaining();
    if only_a > 0 || only_b > 0 {
        return Err(Error::StructuralMismatch { only_a, only_b });
    }
    Ok(pairs)
}

/// Decide whether `b` is a relabelling of `a` by some `(M, t)` with
/// `det M = +1`. Points are matched within `tol`.
pub fn labelling_equivalent(a: &LabelMap, b: &LabelMap, tol: f64) -> Result<Equivalence> {
    let pairs = match_labels(a, b, tol)?;
    let matched = pairs.len();
    let (witness, reflected) = match solve_witness(&pairs) {
        Some(w) if w.m.det() == 1 => (Some(w), None),
        Some(w) => (None, Some(w)),
        None => (None, None),
    };
    Ok(Equivalence {
        equivalent: witness.is_some(),
        witness,
        reflected,
        matched,
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `a·x + b·y = g = gcd(a, b)`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Unimodular matrix (det +1) whose first column is the primitive vector `u`.
fn complete_basis(u: Label) -> IMat2 {
    let (_, x, y) = ext_gcd(u.k1, u.k2);
    // u.k1·x + u.k2·y = 1
    IMat2::new(u.k1, -y, u.k2, x)
}

/// Find `(M, t)` with `|det M| = 1` and `b = M·a + t` for every pair.
///
/// When the `a` labels span the plane the solution is unique and obtained by
/// an exact rational solve. When they are collinear the answer is completed
/// to a determinant `+1` matrix.
pub fn solve_witness(pairs: &[(Label, Label)]) -> Option<Witness> {
    let Some(&(a0, b0)) = pairs.first() else {
        return Some(Witness::IDENTITY);
    };
    let Some(i1) = pairs.iter().position(|(a, _)| *a != a0) else {
        return Some(Witness::new(IMat2::IDENTITY, b0 - a0));
    };
    let da1 = pairs[i1].0 - a0;
    let db1 = pairs[i1].1 - b0;
    let cross = |u: Label, v: Label| u.k1 as i128 * v.k2 as i128 - u.k2 as i128 * v.k1 as i128;
    let m = match pairs.iter().position(|(a, _)| cross(da1, *a - a0) != 0) {
        Some(i2) => {
            let da2 = pairs[i2].0 - a0;
            let db2 = pairs[i2].1 - b0;
            let det = cross(da1, da2);
            // M = DB · adj(DA) / det(DA)
            let (p, q, r, s) = (
                da2.k2 as i128,
                -(da2.k1 as i128),
                -(da1.k2 as i128),
                da1.k1 as i128,
            );
            let num = [
                db1.k1 as i128 * p + db2.k1 as i128 * r,
                db1.k1 as i128 * q + db2.k1 as i128 * s,
                db1.k2 as i128 * p + db2.k2 as i128 * r,
                db1.k2 as i128 * q + db2.k2 as i128 * s,
            ];
            if num.iter().any(|n| n % det != 0) {
                return None;
            }
            let e: Vec<i64> = num.iter().map(|n| i64::try_from(n / det)).collect::<Result<_, _>>().ok()?;
            IMat2::new(e[0], e[1], e[2], e[3])
        }
        None => {
            // All `a` labels lie on the line a0 + ℤu.
            let g = gcd(da1.k1, da1.k2);
            let u = Label::new(da1.k1 / g, da1.k2 / g);
            if db1.k1 % g != 0 || db1.k2 % g != 0 {
                return None;
            }
            let w = Label::new(db1.k1 / g, db1.k2 / g);
            if gcd(w.k1, w.k2) != 1 {
                return None;
            }
            let mu = complete_basis(u);
            let mw = complete_basis(w);
            mw.mul(&mu.inverse()?)
        }
    };
    if m.det().abs() != 1 {
        return None;
    }
    let w = Witness::new(m, b0 - m.apply(a0));
    pairs.iter().all(|(a, b)| w.apply(*a) == *b).then_some(w)
}
