//! Chart recovery from a labelled asymptotic lattice.
//!
//! [`fit_chart`] fits `λ ≈ Σᵢ ℏⁱ Ĝᵢ(ℏk + s_j)` by least squares over all
//! labelled points, with polynomial `Ĝᵢ` written in monomials of the
//! variable centred on the fitted domain and scaled to `[−1, 1]²`. The
//! per-slice offsets `s_j` absorb the arbitrary origin of each slice of a
//! linear labelling; with [`OriginMode::Fixed`] they are all zero and the
//! problem is linear.
//!
//! The rotation number at a spectral point `λ` is
//! `ρ = (DĜ₀⁻¹)₂₁ / (DĜ₀⁻¹)₁₁ = −J₂₁ / J₂₂` with `J = DĜ₀(Ĝ₀⁻¹(λ))`. It depends
//! on the lattice basis; [`rotation_number_in_basis`] re-expresses it in
//! another one.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{monomial_count, monomial_exponents, monomial_gradients, monomial_values, ChartJet, PolyMap};
use crate::error::{Error, Result};
use crate::geometry::{IMat2, Label, Mat2, Point, Rect};
use crate::lattice::{AsymptoticLattice, LinearLabelling};

/// How the origin of each slice's labels relates to the chart variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginMode {
    /// `λ = G_ℏ(ℏk)`: labels are a good labelling (e.g. ground truth).
    Fixed,
    /// `λ = G_ℏ(ℏk + s_j)` with a free offset per slice and `s₀ = 0`:
    /// labels are a linear labelling. Constant terms of `Ĝᵢ`, `i ≥ 1`, are
    /// not identifiable in this mode and are fixed to zero.
    #[default]
    PerSlice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Total degree `d ≥ 1` of every `Ĝᵢ`.
    pub degree: usize,
    /// Highest `ℏ` power `J_fit ∈ {0, 1}`.
    pub jet_order: usize,
    pub origin: OriginMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            degree: 2,
            jet_order: 1,
            origin: OriginMode::PerSlice,
        }
    }
}

impl FitOptions {
    pub fn new(degree: usize, jet_order: usize, origin: OriginMode) -> Self {
        Self {
            degree,
            jet_order,
            origin,
        }
    }
}

/// Affine change of variable `u = (x − center) / scale` used by the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitBasis {
    pub center: Point,
    pub scale: Point,
}

impl FitBasis {
    fn to_unit(&self, x: Point) -> Point {
        Point::new((x.x - self.center.x) / self.scale.x, (x.y - self.center.y) / self.scale.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceResidual {
    pub hbar: f64,
    pub points: usize,
    pub max: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianEntry {
    /// Spectral point.
    pub point: Point,
    /// `Ĝ₀⁻¹(point)`.
    pub preimage: Point,
    pub jacobian: Mat2,
    /// The preimage lies outside the fitted domain.
    pub extrapolated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub point: Point,
    pub rho: f64,
    /// Three standard deviations, propagated to first order from the
    /// coefficient covariance of the fit.
    pub radius: f64,
    pub inverse_jacobian: Mat2,
    pub extrapolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub fitted_chart: ChartJet,
    pub options: FitOptions,
    pub basis: FitBasis,
    /// Offsets `s_j`, one per slice (all zero with a fixed origin).
    pub slice_offsets: Vec<Point>,
    /// Jacobians at the labelled points of the coarsest slice.
    pub jacobian_field: Vec<JacobianEntry>,
    /// Rotation numbers at the labelled points of the coarsest slice.
    pub rotation: Vec<RotationEstimate>,
    pub residuals: Vec<SliceResidual>,
    /// Jacobian determinants have one sign across `jacobian_field`.
    pub jacobian_consistent: bool,
    /// Covariance of the `Ĝ₀` coefficients in the scaled basis: `x`
    /// component first, then `y`.
    pub g0_covariance: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// A coefficient column of the design matrix.
#[derive(Debug, Clone, Copy)]
enum Column {
    Coeff { comp: usize, term: usize, mono: usize },
    Offset { slice: usize, comp: usize },
}

struct Observation {
    slice: usize,
    hbar: f64,
    k: Label,
    point: Point,
}

struct Problem {
    degree: usize,
    jet: usize,
    basis: FitBasis,
    columns: Vec<Column>,
    obs: Vec<Observation>,
}

impl Problem {
    fn coeff_columns(&self) -> usize {
        self.columns
            .iter()
            .filter(|c| matches!(c, Column::Coeff { .. }))
            .count()
    }

    /// Coefficients `[term][comp][mono]` and offsets from a parameter vector.
    fn unpack(&self, p: &[f64], slices: usize) -> (Vec<[Vec<f64>; 2]>, Vec<Point>) {
        let m = monomial_count(self.degree);
        let mut coeffs = vec![[vec![0.0; m], vec![0.0; m]]; self.jet + 1];
        let mut offsets = vec![Point::default(); slices];
        for (c, v) in self.columns.iter().zip(p) {
            match *c {
                Column::Coeff { comp, term, mono } => coeffs[term][comp][mono] = *v,
                Column::Offset { slice, comp } => {
                    if comp == 0 {
                        offsets[slice].x = *v;
                    } else {
                        offsets[slice].y = *v;
                    }
                }
            }
        }
        (coeffs, offsets)
    }

    fn predict(&self, coeffs: &[[Vec<f64>; 2]], x: Point, hbar: f64) -> Point {
        let vals = monomial_values(self.degree, self.basis.to_unit(x));
        let mut out = Point::default();
        let mut w = 1.0;
        for term in coeffs {
            let dot = |c: &[f64]| c.iter().zip(&vals).map(|(a, b)| a * b).sum::<f64>();
            out = out + Point::new(dot(&term[0]), dot(&term[1])) * w;
            w *= hbar;
        }
        out
    }

    /// `∂/∂x` of `Σ ℏⁱ Ĝᵢ` at `x`, in the raw variable.
    fn predict_jacobian(&self, coeffs: &[[Vec<f64>; 2]], x: Point, hbar: f64) -> Mat2 {
        let grads = monomial_gradients(self.degree, self.basis.to_unit(x));
        let (sx, sy) = (self.basis.scale.x, self.basis.scale.y);
        let mut j = Mat2::new(0.0, 0.0, 0.0, 0.0);
        let mut w = 1.0;
        for term in coeffs {
            for ((cx, cy), (gx, gy)) in term[0].iter().zip(&term[1]).zip(&grads) {
                j.a += w * cx * gx / sx;
                j.b += w * cx * gy / sy;
                j.c += w * cy * gx / sx;
                j.d += w * cy * gy / sy;
            }
            w *= hbar;
        }
        j
    }

    /// Design matrix (two rows per observation) and residual vector at `p`.
    fn linearize(&self, p: &[f64], slices: usize, with_offsets: bool) -> (DMatrix<f64>, DVector<f64>) {
        let (coeffs, offsets) = self.unpack(p, slices);
        let ncols = self.columns.len();
        let rows: Vec<([Vec<f64>; 2], Point)> = self
            .obs
            .par_iter()
            .map(|o| {
                let x = o.k.as_point() * o.hbar + offsets[o.slice];
                let vals = monomial_values(self.degree, self.basis.to_unit(x));
                let jac = with_offsets.then(|| self.predict_jacobian(&coeffs, x, o.hbar));
                let mut rx = vec![0.0; ncols];
                let mut ry = vec![0.0; ncols];
                for (ci, c) in self.columns.iter().enumerate() {
                    match *c {
                        Column::Coeff { comp, term, mono } => {
                            let v = o.hbar.powi(term as i32) * vals[mono];
                            if comp == 0 {
                                rx[ci] = v;
                            } else {
                                ry[ci] = v;
                            }
                        }
                        Column::Offset { slice, comp } => {
                            if let (Some(j), true) = (jac, slice == o.slice) {
                                let col = j.col(comp);
                                rx[ci] = col.x;
                                ry[ci] = col.y;
                            }
                        }
                    }
                }
                let r = o.point - self.predict(&coeffs, x, o.hbar);
                ([rx, ry], r)
            })
            .collect();
        let mut a = DMatrix::zeros(2 * rows.len(), ncols);
        let mut r = DVector::zeros(2 * rows.len());
        for (i, ([rx, ry], res)) in rows.into_iter().enumerate() {
            for c in 0..ncols {
                a[(2 * i, c)] = rx[c];
                a[(2 * i + 1, c)] = ry[c];
            }
            r[2 * i] = res.x;
            r[2 * i + 1] = res.y;
        }
        (a, r)
    }

    fn column_name(&self, c: Column) -> String {
        match c {
            Column::Coeff { comp, term, mono } => {
                let (a, b) = monomial_exponents(self.degree)[mono];
                format!("G{term}.{}[u^{a} v^{b}]", ["x", "y"][comp])
            }
            Column::Offset { slice, comp } => format!("offset{slice}.{}", ["x", "y"][comp]),
        }
    }
}

const RANK_TOL: f64 = 1e-10;

struct Solved {
    step: DVector<f64>,
    /// `V Σ⁻² Vᵀ`.
    gram_pinv: DMatrix<f64>,
}

fn solve_step(problem: &Problem, a: DMatrix<f64>, r: &DVector<f64>, active: &[usize]) -> Result<Solved> {
    let ncols = a.ncols();
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * RANK_TOL;
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let v_t = svd.v_t.as_ref().expect("requested V");
    if rank < ncols {
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let null = v_t.row(imin);
        let mut parts: Vec<(f64, String)> = null
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > 1e-3)
            .map(|(i, v)| (*v, problem.column_name(problem.columns[active[i]])))
            .collect();
        parts.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
        let deficient = parts
            .iter()
            .take(6)
            .map(|(v, n)| format!("{v:+.3}·{n}"))
            .collect::<Vec<_>>()
            .join(" ");
        return Err(Error::Underdetermined {
            rank,
            unknowns: ncols,
            deficient: format!("null direction {deficient}"),
        });
    }
    let step = svd
        .solve(r, tol)
        .map_err(|e| Error::InsufficientData(format!("least-squares solve failed: {e}")))?;
    let inv_sq = DVector::from_iterator(ncols, svd.singular_values.iter().map(|s| 1.0 / (s * s)));
    let v = v_t.transpose();
    let gram_pinv = &v * DMatrix::from_diagonal(&inv_sq) * v.transpose();
    Ok(Solved { step, gram_pinv })
}

/// Affine least squares `λ ≈ a + F·x` over `(x, λ)` pairs.
fn affine_fit(pairs: &[(Point, Point)]) -> Option<(Point, Mat2)> {
    if pairs.len() < 3 {
        return None;
    }
    let a = DMatrix::from_fn(pairs.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => pairs[i].0.x,
        _ => pairs[i].0.y,
    });
    let svd = a.svd(true, true);
    if svd.singular_values.min() <= svd.singular_values.max() * 1e-12 {
        return None;
    }
    let bx = DVector::from_iterator(pairs.len(), pairs.iter().map(|p| p.1.x));
    let by = DVector::from_iterator(pairs.len(), pairs.iter().map(|p| p.1.y));
    let cx = svd.solve(&bx, 0.0).ok()?;
    let cy = svd.solve(&by, 0.0).ok()?;
    Some((Point::new(cx[0], cy[0]), Mat2::new(cx[1], cx[2], cy[1], cy[2])))
}

/// Fit the chart jet of a labelled lattice.
pub fn fit_chart(labelling: &LinearLabelling, lattice: &AsymptoticLattice, opts: &FitOptions) -> Result<RecoveryReport> {
    if opts.degree < 1 {
        return Err(Error::InvalidConfig("fit degree must be at least 1".into()));
    }
    if opts.jet_order > 1 {
        return Err(Error::InvalidConfig(format!(
            "jet order {} is not supported (0 or 1)",
            opts.jet_order
        )));
    }
    labelling.check_against(lattice)?;
    let maps = labelling.maps();
    let mut warnings = Vec::new();
    let mut opts = *opts;
    if maps.len() == 1 && opts.jet_order > 0 {
        warnings.push("single slice: jet order forced to 0".into());
        opts.jet_order = 0;
    }
    let m = monomial_count(opts.degree);
    let needed = 3 * m * (opts.jet_order + 1);
    let total: usize = maps.iter().map(|l| l.len()).sum();
    if total < needed {
        return Err(Error::InsufficientData(format!(
            "{total} labelled point(s), need at least {needed} for degree {} and jet order {}",
            opts.degree, opts.jet_order
        )));
    }
    let per_slice = opts.origin == OriginMode::PerSlice && maps.len() > 1;

    // initial offsets from per-slice affine fits
    let mut offsets = vec![Point::default(); maps.len()];
    if per_slice {
        let fits: Vec<Option<(Point, Mat2)>> = maps
            .iter()
            .map(|l| {
                let pairs: Vec<(Point, Point)> =
                    l.entries().iter().map(|e| (e.k.as_point() * l.hbar(), e.point)).collect();
                affine_fit(&pairs)
            })
            .collect();
        let (a0, f0) = fits[0].ok_or_else(|| {
            Error::InsufficientData(format!("labels of slice hbar {} do not span the plane", maps[0].hbar()))
        })?;
        let f0_inv = f0
            .inverse()
            .ok_or_else(|| Error::InsufficientData("degenerate affine frame on the coarsest slice".into()))?;
        for (j, fit) in fits.iter().enumerate().skip(1) {
            let (aj, _) = fit.ok_or_else(|| {
                Error::InsufficientData(format!("labels of slice hbar {} do not span the plane", maps[j].hbar()))
            })?;
            offsets[j] = f0_inv.apply(aj - a0);
        }
    }

    let obs: Vec<Observation> = maps
        .iter()
        .enumerate()
        .flat_map(|(j, l)| {
            l.entries().iter().map(move |e| Observation {
                slice: j,
                hbar: l.hbar(),
                k: e.k,
                point: e.point,
            })
        })
        .collect();
    let domain = Rect::bounding(obs.iter().map(|o| o.k.as_point() * o.hbar + offsets[o.slice]))
        .expect("at least one observation");
    let half = |w: f64| if w > 0.0 { 0.5 * w } else { 1.0 };
    let basis = FitBasis {
        center: domain.center(),
        scale: Point::new(half(domain.width()), half(domain.height())),
    };

    let mut columns = Vec::new();
    for comp in 0..2 {
        for term in 0..=opts.jet_order {
            for mono in 0..m {
                if per_slice && term > 0 && mono == 0 {
                    continue;
                }
                columns.push(Column::Coeff { comp, term, mono });
            }
        }
    }
    let n_coeff = columns.len();
    if per_slice {
        for slice in 1..maps.len() {
            for comp in 0..2 {
                columns.push(Column::Offset { slice, comp });
            }
        }
    }
    let problem = Problem {
        degree: opts.degree,
        jet: opts.jet_order,
        basis,
        columns,
        obs,
    };
    let slices = maps.len();
    let mut params = vec![0.0; problem.columns.len()];
    for (ci, c) in problem.columns.iter().enumerate() {
        if let Column::Offset { slice, comp } = *c {
            params[ci] = if comp == 0 { offsets[slice].x } else { offsets[slice].y };
        }
    }

    // linear solve for the coefficients, then joint Gauss-Newton refinement
    let coeff_idx: Vec<usize> = (0..n_coeff).collect();
    let all_idx: Vec<usize> = (0..problem.columns.len()).collect();
    let mut gram = DMatrix::zeros(0, 0);
    let max_iter = if per_slice { 50 } else { 3 };
    for iter in 0..max_iter {
        let joint = per_slice && iter > 0;
        let (a, r) = problem.linearize(&params, slices, joint);
        let (a, active) = if joint {
            (a, &all_idx)
        } else {
            (a.columns(0, n_coeff).into_owned(), &coeff_idx)
        };
        let solved = solve_step(&problem, a, &r, active)?;
        for (i, &ci) in active.iter().enumerate() {
            params[ci] += solved.step[i];
        }
        gram = solved.gram_pinv;
        let pnorm = params.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (joint || !per_slice) && solved.step.norm() <= 1e-14 * (1.0 + pnorm) {
            break;
        }
    }

    let (coeffs, offsets) = problem.unpack(&params, slices);
    let (a, r) = problem.linearize(&params, slices, per_slice);
    let dof = a.nrows().saturating_sub(a.ncols());
    let sigma2 = if dof > 0 { r.norm_squared() / dof as f64 } else { 0.0 };

    // covariance of the G0 coefficients (columns are ordered by component, term)
    let g0_cols: Vec<usize> = problem
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, Column::Coeff { term: 0, .. }))
        .map(|(i, _)| i)
        .collect();
    let g0_covariance: Vec<Vec<f64>> = g0_cols
        .iter()
        .map(|&i| g0_cols.iter().map(|&j| sigma2 * gram[(i, j)]).collect())
        .collect();

    let mut residuals = Vec::with_capacity(slices);
    for (j, l) in maps.iter().enumerate() {
        let (mut max, mut sq) = (0.0f64, 0.0);
        for e in l.entries() {
            let x = e.k.as_point() * l.hbar() + offsets[j];
            let d = e.point.dist(problem.predict(&coeffs, x, l.hbar()));
            max = max.max(d);
            sq += d * d;
        }
        residuals.push(SliceResidual {
            hbar: l.hbar(),
            points: l.len(),
            max,
            rms: (sq / l.len().max(1) as f64).sqrt(),
        });
    }

    let terms = coeffs
        .iter()
        .map(|t| PolyMap::from_scaled(opts.degree, &t[0], &t[1], basis.center, basis.scale))
        .collect::<Result<Vec<_>>>()?;
    let fitted_chart = ChartJet::new(domain, terms)
        .map_err(|e| Error::InsufficientData(format!("fitted chart is not a local diffeomorphism: {e}")))?;

    let mut report = RecoveryReport {
        fitted_chart,
        options: opts,
        basis,
        slice_offsets: offsets,
        jacobian_field: Vec::new(),
        rotation: Vec::new(),
        residuals,
        jacobian_consistent: true,
        g0_covariance,
        warnings,
    };
    debug_assert_eq!(problem.coeff_columns(), n_coeff);

    let coarse = &maps[0];
    let starts: Vec<(Point, Point)> = coarse
        .entries()
        .iter()
        .map(|e| (e.point, e.k.as_point() * coarse.hbar() + report.slice_offsets[0]))
        .collect();
    let mut field = Vec::with_capacity(starts.len());
    let mut rotation = Vec::with_capacity(starts.len());
    let mut poles = 0;
    for (p, x0) in starts {
        let Some(entry) = jacobian_from(&report, p, x0) else {
            report
                .warnings
                .push(format!("could not invert the fitted G0 at {p}"));
            continue;
        };
        match rotation_from(&report, &entry, IMat2::IDENTITY) {
            Ok(r) => rotation.push(r),
            Err(_) => poles += 1,
        }
        field.push(entry);
    }
    if poles > 0 {
        report
            .warnings
            .push(format!("rotation number has a pole at {poles} labelled point(s)"));
    }
    let signs: Vec<f64> = field.iter().map(|e| e.jacobian.det().signum()).collect();
    report.jacobian_consistent = signs.windows(2).all(|w| w[0] == w[1]);
    if !report.jacobian_consistent {
        report
            .warnings
            .push("Jacobian determinant changes sign across the sample points".into());
    }
    report.jacobian_field = field;
    report.rotation = rotation;
    Ok(report)
}

fn jacobian_from(report: &RecoveryReport, p: Point, start: Point) -> Option<JacobianEntry> {
    let chart = &report.fitted_chart;
    let x = chart.invert_g0(p, start)?;
    Some(JacobianEntry {
        point: p,
        preimage: x,
        jacobian: chart.jacobian0(x),
        extrapolated: !chart.domain().contains(x),
    })
}

/// Newton start: the best point of a coarse grid over the fitted domain.
fn initial_guess(chart: &ChartJet, p: Point) -> Point {
    let d = chart.domain();
    let n = 8;
    let mut best = (d.center(), f64::INFINITY);
    for j in 0..=n {
        for i in 0..=n {
            let x = Point::new(
                d.min.x + d.width() * i as f64 / n as f64,
                d.min.y + d.height() * j as f64 / n as f64,
            );
            let e = chart.g0().eval(x).dist_sq(p);
            if e < best.1 {
                best = (x, e);
            }
        }
    }
    best.0
}

/// Exact `DĜ₀` at the preimages of the given spectral points.
pub fn jacobian_field(report: &RecoveryReport, at: &[Point]) -> Result<Vec<JacobianEntry>> {
    at.iter()
        .map(|&p| {
            jacobian_from(report, p, initial_guess(&report.fitted_chart, p))
                .ok_or_else(|| Error::InsufficientData(format!("could not invert the fitted G0 at {p}")))
        })
        .collect()
}

fn rotation_from(report: &RecoveryReport, entry: &JacobianEntry, basis: IMat2) -> Result<RotationEstimate> {
    let j = entry.jacobian.mul(&basis.to_real());
    let scale = j.frobenius();
    if j.d.abs() <= 1e-12 * scale {
        return Err(Error::Pole {
            x: entry.point.x,
            y: entry.point.y,
        });
    }
    let inv = j
        .inverse()
        .ok_or_else(|| Error::InsufficientData(format!("singular Jacobian at {}", entry.point)))?;
    let rho = -j.c / j.d;

    // first-order propagation through the y-component coefficients of Ĝ₀
    let m = monomial_count(report.options.degree);
    let grads = monomial_gradients(report.options.degree, report.basis.to_unit(entry.preimage));
    let (sx, sy) = (report.basis.scale.x, report.basis.scale.y);
    let (w1, w2) = (basis.b as f64, basis.d as f64);
    let (v1, v2) = (basis.a as f64, basis.c as f64);
    // J₂₁ = Σ cy·(gx/sx·v1 + gy/sy·v2), J₂₂ = Σ cy·(gx/sx·w1 + gy/sy·w2)
    let g: Vec<f64> = grads
        .iter()
        .map(|(gx, gy)| {
            let d21 = gx / sx * v1 + gy / sy * v2;
            let d22 = gx / sx * w1 + gy / sy * w2;
            -d21 / j.d + j.c * d22 / (j.d * j.d)
        })
        .collect();
    let cov = &report.g0_covariance;
    let var = if cov.len() == 2 * m {
        let mut v = 0.0;
        for (a, ga) in g.iter().enumerate() {
            for (b, gb) in g.iter().enumerate() {
                v += ga * cov[m + a][m + b] * gb;
            }
        }
        v.max(0.0)
    } else {
        0.0
    };
    Ok(RotationEstimate {
        point: entry.point,
        rho,
        radius: 3.0 * var.sqrt(),
        inverse_jacobian: inv,
        extrapolated: entry.extrapolated,
    })
}

/// Rotation number at the spectral point `at`, in the basis of the fitted labels.
pub fn rotation_number(report: &RecoveryReport, at: Point) -> Result<RotationEstimate> {
    rotation_number_in_basis(report, at, IMat2::IDENTITY)
}

/// Rotation number in another lattice basis. `basis` is the matrix `W`
/// relating reference labels to the fitted ones by `k_fit = W·k_ref + t`,
/// so that the reference chart is `Ĝ₀ ∘ W` and its Jacobian `DĜ₀·W`.
pub fn rotation_number_in_basis(report: &RecoveryReport, at: Point, basis: IMat2) -> Result<RotationEstimate> {
    if basis.det() != 1 {
        return Err(Error::InvalidConfig(format!("basis change {basis} must have determinant +1")));
    }
    let entry = jacobian_field(report, &[at])?.remove(0);
    rotation_from(report, &entry, basis)
}
