//! Singular points: isolation in a box, Jacobian classification, and the
//! degenerate invariants `(α, β, λ, k, n)` with their index case.
//!
//! In the eigenframe `(e₁, e₂)` of a simple degenerate zero the field reads
//!
//! ```text
//! u·e₁ = α y + λ xᵏ + f(x, y)
//! u·e₂ = β xⁿ − k λ y xᵏ⁻¹ + g(x, y)
//! ```
//!
//! and `k`, `n` are the orders of the first nonvanishing pure-`x` Taylor
//! coefficients of the two components.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

use crate::geom::{Mat2, Rect, Vec2};
use crate::index::{winding_along, WindingOptions};
use crate::poly::{binomials, Poly};
use crate::vecfield::{FieldError, Frame, PolyVectorField, MAX_DEGREE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SingularError {
    #[error("search box is degenerate")]
    InvalidBox,
    #[error("subdivision exceeded the budget of {cells} cells")]
    BudgetExceeded { cells: usize },
    #[error("point is not a zero of the field (|u| = {residual:e})")]
    NotSingular { residual: f64 },
    #[error("zero is not degenerate (det Du = {det:e})")]
    NotDegenerate { det: f64 },
    #[error("Jacobian vanishes at the zero: degeneracy is not simple")]
    NotSimple,
    #[error(
        "all pure-x derivatives of u·e{component} vanish up to the field degree: \
         the zero cannot be certified isolated"
    )]
    NotIsolatedOrder { component: u8 },
    #[error("invalid invariants: {0}")]
    InvalidInvariants(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Tuning for [`find_singular_points`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Residual `|u|` a polished zero must reach.
    pub res_tol: f64,
    /// Zeros closer than this are merged.
    pub cluster_radius: f64,
    /// Finest cell is `box / 2^max_depth` per side.
    pub max_depth: u32,
    pub max_cells: usize,
    /// `|det Du| ≤ det_tol · scale²` counts as degenerate.
    pub det_tol: f64,
    pub newton_iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            res_tol: 1e-10,
            cluster_radius: 1e-6,
            max_depth: 14,
            max_cells: 1_000_000,
            det_tol: 1e-9,
            newton_iters: 50,
        }
    }
}

/// Tuning for [`extract_degeneracy`] and [`classify_case`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Relative threshold below which a Taylor coefficient counts as zero.
    pub coef_tol: f64,
    /// Relative width of the `λ²k + αβ = 0` band reported as S5.
    pub s5_tol: f64,
    /// `|det Du| ≤ det_tol · scale²` counts as degenerate.
    pub det_tol: f64,
    /// Distance by which the supplied point may miss the true zero. Taylor
    /// coefficients that such a shift, or the tilt of the kernel direction
    /// it causes, could produce are treated as zero.
    pub location_uncertainty: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            coef_tol: 1e-9,
            s5_tol: 1e-9,
            det_tol: 1e-9,
            location_uncertainty: 0.0,
        }
    }
}

/// The seven complementary regimes of the index formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseLabel {
    /// `2k > n+1`, `n` even.
    S1,
    /// `2k > n+1`, `n` odd, `αβ > 0`.
    S2,
    /// `2k > n+1`, `n` odd, `αβ < 0`.
    S3,
    /// `2k = n+1`, `λ²k + αβ > 0`.
    S4,
    /// `2k = n+1`, `λ²k + αβ = 0`: higher-order terms decide.
    S5,
    /// `2k = n+1`, `λ²k + αβ < 0`.
    S6,
    /// `2k < n+1`.
    S7,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Index of an isolated zero, or `Indeterminate` when the truncated
/// expansion does not decide it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointIndex {
    Minus,
    Zero,
    Plus,
    Indeterminate,
}

impl PointIndex {
    pub fn value(self) -> Option<i32> {
        match self {
            PointIndex::Minus => Some(-1),
            PointIndex::Zero => Some(0),
            PointIndex::Plus => Some(1),
            PointIndex::Indeterminate => None,
        }
    }
}

impl fmt::Display for PointIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("indeterminate"),
        }
    }
}

/// The Taylor invariants of a simple degenerate zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub k: u32,
    pub n: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyData {
    pub frame: Frame,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub k: u32,
    pub n: u32,
    pub case_label: CaseLabel,
    pub index: PointIndex,
}

impl DegeneracyData {
    pub fn invariants(&self) -> Invariants {
        Invariants {
            alpha: self.alpha,
            beta: self.beta,
            lambda: self.lambda,
            k: self.k,
            n: self.n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointKind {
    Saddle,
    Center,
    Degenerate(DegeneracyData),
    /// Degenerate zero whose invariants could not be extracted.
    Unresolved,
}

impl PointKind {
    pub fn name(&self) -> &'static str {
        match self {
            PointKind::Saddle => "saddle",
            PointKind::Center => "center",
            PointKind::Degenerate(_) => "degenerate",
            PointKind::Unresolved => "unresolved",
        }
    }

    /// Index of the zero when known.
    pub fn index(&self) -> Option<i32> {
        match self {
            PointKind::Saddle => Some(-1),
            PointKind::Center => Some(1),
            PointKind::Degenerate(d) => d.index.value(),
            PointKind::Unresolved => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub location: Vec2,
    pub jac: Mat2,
    pub kind: PointKind,
    pub residual: f64,
    /// Estimated distance to the exact zero.
    pub uncertainty: f64,
}

/// Locates the zeros of `field` in `rect`.
///
/// Cells are discarded when a centred-form bound proves one component
/// nonzero, or when `det Du` keeps one sign on the cell and the boundary
/// winding is 0. Cells that a constant-sign Jacobian certifies to hold a
/// single zero seed Newton directly; the rest are refined down to
/// `max_depth` and seed Newton from their centres. Results are merged within
/// `cluster_radius` and sorted lexicographically.
pub fn find_singular_points(
    field: &PolyVectorField,
    rect: &Rect,
    opts: &SearchOptions,
) -> Result<Vec<SingularPoint>, SingularError> {
    if !rect.is_valid() {
        return Err(SingularError::InvalidBox);
    }
    let det = field.jacobian_det_poly();
    let winding_opts = WindingOptions {
        zero_tol: 1e-9,
        max_samples: 4096,
        initial_samples: 16,
    };
    let margin = 1e-9 * rect.diameter();

    let mut clusters: Vec<Cluster> = Vec::new();
    let mut stack: Vec<(Rect, u32)> = Vec::from([(*rect, 0)]);
    let mut cells = 0usize;
    while let Some((cell, depth)) = stack.pop() {
        cells += 1;
        if cells > opts.max_cells {
            return Err(SingularError::BudgetExceeded { cells });
        }
        let c = cell.center();
        let (hx, hy) = (0.5 * cell.width(), 0.5 * cell.height());
        if field.u().shifted(c.x, c.y).centered_lower_bound(hx, hy) > 0.0
            || field.v().shifted(c.x, c.y).centered_lower_bound(hx, hy) > 0.0
        {
            continue;
        }
        let det_sign = {
            let d = det.shifted(c.x, c.y);
            if d.centered_lower_bound(hx, hy) > 0.0 {
                d.coeff(0, 0).signum() as i32
            } else {
                0
            }
        };
        if det_sign != 0 {
            if let Ok(w) = winding_along(field, &winding_opts, |t| cell.boundary_point(t)) {
                let count = w.winding * det_sign;
                if count == 0 {
                    continue;
                }
                if count == 1 {
                    let out = newton_polish(field, c, opts);
                    if out.residual < opts.res_tol && cell.expanded(margin).contains(out.point) {
                        add_to_clusters(&mut clusters, out, opts.cluster_radius);
                        continue;
                    }
                }
            }
        }
        if depth >= opts.max_depth {
            let out = newton_polish(field, c, opts);
            if out.residual < opts.res_tol && rect.expanded(margin).contains(out.point) {
                add_to_clusters(&mut clusters, out, opts.cluster_radius);
            }
            continue;
        }
        // reversed so the first quadrant is processed first
        for q in cell.split4().iter().rev() {
            stack.push((*q, depth + 1));
        }
    }

    merge_degenerate(field, &mut clusters, opts, rect.diameter());
    let mut points: Vec<SingularPoint> = clusters
        .iter()
        .map(|cl| {
            let extract = ExtractOptions {
                location_uncertainty: 10.0 * cl.spread.max(cl.last_step),
                det_tol: opts.det_tol,
                ..ExtractOptions::default()
            };
            classify_nondegenerate(field, cl.point, opts, &extract)
        })
        .collect();
    points.sort_by(|a, b| lexicographic(a.location, b.location));
    Ok(points)
}

fn lexicographic(a: Vec2, b: Vec2) -> Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

struct Cluster {
    point: Vec2,
    residual: f64,
    last_step: f64,
    spread: f64,
}

fn add_to_clusters(clusters: &mut Vec<Cluster>, out: NewtonOutcome, radius: f64) {
    for cl in clusters.iter_mut() {
        let d = cl.point.dist(out.point);
        if d <= radius {
            cl.spread = cl.spread.max(d);
            if out.last_step < cl.last_step {
                cl.point = out.point;
                cl.residual = out.residual;
                cl.last_step = out.last_step;
            }
            return;
        }
    }
    clusters.push(Cluster {
        point: out.point,
        residual: out.residual,
        last_step: out.last_step,
        spread: 0.0,
    });
}

/// Newton converges only linearly at a multiple zero, so one degenerate
/// zero can leave several clusters a little apart, and a slowly converging
/// run can stop early where the field is merely small. Clusters within `1e-3`
/// of the box diameter of a numerically singular one are merged when both
/// are singular, or when the other lies inside its own uncertainty radius.
/// The separation becomes location uncertainty.
fn merge_degenerate(field: &PolyVectorField, clusters: &mut Vec<Cluster>, opts: &SearchOptions, diam: f64) {
    let scale = field.scale();
    let tol = opts.det_tol * scale * scale;
    let degenerate = |p: Vec2| field.jacobian(p).det().abs() <= tol;
    let reach = |cl: &Cluster| 10.0 * cl.spread.max(cl.last_step);
    let mut i = 0;
    while i < clusters.len() {
        let di = degenerate(clusters[i].point);
        let mut merged = false;
        let mut j = 0;
        while j < clusters.len() {
            if j == i {
                j += 1;
                continue;
            }
            let d = clusters[i].point.dist(clusters[j].point);
            let dj = degenerate(clusters[j].point);
            let close = d <= 1e-3 * diam
                && ((di && dj) || (di && d <= reach(&clusters[j])) || (dj && d <= reach(&clusters[i])));
            if close {
                let other = clusters.remove(j);
                if j < i {
                    i -= 1;
                }
                let keep = &mut clusters[i];
                keep.spread = keep.spread.max(other.spread).max(d);
                if other.last_step < keep.last_step {
                    keep.point = other.point;
                    keep.residual = other.residual;
                    keep.last_step = other.last_step;
                }
                merged = true;
                break;
            }
            j += 1;
        }
        if !merged {
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonOutcome {
    point: Vec2,
    residual: f64,
    /// Length of the Newton correction at `point`.
    last_step: f64,
}

/// Damped Newton iteration with a least-squares fallback at singular
/// Jacobians.
///
/// Steps are accepted by the natural monotonicity test (the simplified
/// correction at the trial point must be shorter than the step), which
/// unlike a residual test is insensitive to the strong anisotropy around
/// degenerate zeros. Near a multiple zero successive steps shrink at a
/// steady ratio `ρ ≈ 1 − 1/m`; the step is then multiplied by the estimated
/// multiplicity `m` whenever that shortens the following Newton step.
///
/// The iterate returned is the one with the shortest Newton correction among
/// those meeting `res_tol`: near a degenerate zero the residual is strongly
/// anisotropic and a poor guide to the distance from the zero.
pub(crate) fn newton_polish(field: &PolyVectorField, start: Vec2, opts: &SearchOptions) -> NewtonOutcome {
    let newton_step = |p: Vec2| -> (Vec2, Mat2) {
        let j = field.jacobian(p);
        (solve_or_damped(&j, -field.eval(p)), j)
    };
    let mut p = start;
    let r0 = field.eval(p).norm();
    // (point, residual, correction) of the best iterate so far
    let mut best = (p, r0, f64::INFINITY);
    let mut history: Vec<f64> = Vec::new();
    for _ in 0..opts.newton_iters {
        let r = field.eval(p).norm();
        if r == 0.0 {
            best = (p, 0.0, 0.0);
            break;
        }
        let (full, j) = newton_step(p);
        if !full.is_finite() {
            break;
        }
        let better = if r < opts.res_tol {
            best.1 >= opts.res_tol || full.norm() < best.2
        } else {
            best.1 >= opts.res_tol && r < best.1
        };
        if better {
            best = (p, r, full.norm());
        }
        let simplified = |q: Vec2| solve_or_damped(&j, -field.eval(q));
        let mut lambda = 1.0;
        let mut step = full;
        let mut accepted = false;
        for _ in 0..30 {
            step = full * lambda;
            let bar = simplified(p + step);
            if bar.is_finite() && bar.norm() < full.norm() {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
        history.push(step.norm());
        let n = history.len();
        if lambda == 1.0 && n >= 3 {
            let r1 = history[n - 1] / history[n - 2];
            let r2 = history[n - 2] / history[n - 3];
            if (r1 - r2).abs() < 0.05 && r1 > 0.3 && r1 < 0.99 {
                let m = 1.0 / (1.0 - r1);
                let jump = p + step * m;
                let plain_next = newton_step(p + step).0.norm();
                let (jump_next, _) = newton_step(jump);
                if jump_next.is_finite() && jump_next.norm() < 0.5 * plain_next {
                    step = step * m;
                    history.clear();
                }
            }
        }
        p = p + step;
        if step.norm() <= 1e-16 * (1.0 + p.norm()) {
            break;
        }
    }
    NewtonOutcome {
        point: best.0,
        residual: best.1,
        last_step: best.2,
    }
}

/// Cramer's rule whenever it gives a finite answer, however ill-conditioned:
/// near a degenerate zero the large kernel component is exactly the progress
/// Newton needs. Damped least squares only for an exactly singular matrix.
fn solve_or_damped(j: &Mat2, rhs: Vec2) -> Vec2 {
    let det = j.det();
    if det != 0.0 {
        let s = Vec2::new(
            (j.m[1][1] * rhs.x - j.m[0][1] * rhs.y) / det,
            (j.m[0][0] * rhs.y - j.m[1][0] * rhs.x) / det,
        );
        if s.is_finite() {
            return s;
        }
    }
    let sc = j.max_abs();
    j.solve_damped(rhs, 1e-12 * sc * sc + f64::MIN_POSITIVE)
}

/// Types a zero by the sign of `det Du`. Divergence-free fields have no foci,
/// so `det > 0` is a center. Near-zero determinants go to
/// [`extract_degeneracy`].
pub fn classify_nondegenerate(
    field: &PolyVectorField,
    p: Vec2,
    opts: &SearchOptions,
    extract: &ExtractOptions,
) -> SingularPoint {
    let jac = field.jacobian(p);
    let residual = field.eval(p).norm();
    let scale = field.scale();
    let tol = opts.det_tol * scale * scale;
    let det = jac.det();
    let kind = if det < -tol {
        PointKind::Saddle
    } else if det > tol {
        PointKind::Center
    } else {
        match extract_degeneracy(field, p, extract) {
            Ok(d) => PointKind::Degenerate(d),
            Err(_) => PointKind::Unresolved,
        }
    };
    SingularPoint {
        location: p,
        jac,
        kind,
        residual,
        uncertainty: extract.location_uncertainty,
    }
}

/// Builds the eigenframe of a simple degenerate zero at `p` and reads off
/// `(α, β, λ, k, n)`.
///
/// `e₁` spans `ker Du(p)` and points into the right half-plane (upper half
/// when vertical); `e₂` is `e₁` turned counter-clockwise, so the frame is
/// right-handed and `α = e₁ · Du e₂` carries the intrinsic sign.
pub fn extract_degeneracy(
    field: &PolyVectorField,
    p: Vec2,
    opts: &ExtractOptions,
) -> Result<DegeneracyData, SingularError> {
    let scale = field.scale().max(f64::MIN_POSITIVE);
    let residual = field.eval(p).norm();
    if residual > 1e-8 * scale.max(1.0) {
        return Err(SingularError::NotSingular { residual });
    }
    let jac = field.jacobian(p);
    if jac.max_abs() <= opts.coef_tol * scale {
        return Err(SingularError::NotSimple);
    }
    let det = jac.det();
    if det.abs() > opts.det_tol * scale * scale {
        return Err(SingularError::NotDegenerate { det });
    }
    let frame = kernel_frame(&jac, p)?;
    let alpha = frame.e1.dot(jac.apply(frame.e2));

    let local = field.recenter_and_rotate(&frame);
    let local_scale = local.scale().max(f64::MIN_POSITIVE);
    let delta = opts.location_uncertainty;
    let tilt = kernel_tilt(field, &frame, delta);
    let (k, lambda) = leading_pure_x(local.u(), opts.coef_tol * local_scale, delta, tilt)
        .ok_or(SingularError::NotIsolatedOrder { component: 1 })?;
    let (n, beta) = leading_pure_x(local.v(), opts.coef_tol * local_scale, delta, tilt)
        .ok_or(SingularError::NotIsolatedOrder { component: 2 })?;

    let inv = Invariants {
        alpha,
        beta,
        lambda,
        k,
        n,
    };
    let (case_label, index) = classify_case(&inv, opts)?;
    Ok(DegeneracyData {
        frame,
        alpha,
        beta,
        lambda,
        k,
        n,
        case_label,
        index,
    })
}

/// Right-handed frame at `p` whose `e₁` spans the kernel of the rank-one
/// matrix `jac`, pointing right (up when vertical).
pub(crate) fn kernel_frame(jac: &Mat2, p: Vec2) -> Result<Frame, FieldError> {
    let (r0, r1) = (jac.row(0), jac.row(1));
    let row = if r0.norm() >= r1.norm() { r0 } else { r1 };
    let mut e1 = row.perp().normalized();
    let flip = if e1.x.abs() > 1e-12 { e1.x < 0.0 } else { e1.y < 0.0 };
    if flip {
        e1 = -e1;
    }
    Frame::from_direction(p, e1)
}

/// Largest angle between the kernel direction at `frame.origin` and at the
/// four points `delta` away along the axes.
fn kernel_tilt(field: &PolyVectorField, frame: &Frame, delta: f64) -> f64 {
    if !(delta > 0.0) {
        return 0.0;
    }
    let o = frame.origin;
    [Vec2::new(delta, 0.0), Vec2::new(-delta, 0.0), Vec2::new(0.0, delta), Vec2::new(0.0, -delta)]
        .iter()
        .filter_map(|&s| kernel_frame(&field.jacobian(o + s), o + s).ok())
        .map(|f| crate::math::atan2(f.e1.cross(frame.e1).abs(), f.e1.dot(frame.e1).abs()))
        .fold(0.0, f64::max)
}

/// First `m ≥ 2` whose `xᵐ` coefficient exceeds `tol` plus what moving the
/// origin by `delta` and turning the axes by `tilt` could have introduced.
///
/// Under `x → x + δ − θ y`, `y → y + δ + θ x` the term `c xⁱ yʲ` feeds
/// `xᵐ` with at most `|c|` times the `xᵐ` coefficient of `(x + δ)ⁱ (θ x + δ)ʲ`.
fn leading_pure_x(p: &Poly, tol: f64, delta: f64, tilt: f64) -> Option<(u32, f64)> {
    let top = p.max_exponent();
    let binom = binomials(top + 1);
    let pw = crate::math::powi;
    for m in 2..=top {
        let c = p.coeff(m, 0);
        let mut shift_bound = 0.0;
        if delta > 0.0 || tilt > 0.0 {
            for (i, j, a) in p.terms() {
                if i + j < m || (i, j) == (m, 0) {
                    continue;
                }
                let mut w = 0.0;
                for b in 0..=j.min(m) {
                    let ai = m - b;
                    if ai > i {
                        continue;
                    }
                    w += binom[i][ai]
                        * pw(delta, (i - ai) as u32)
                        * binom[j][b]
                        * pw(tilt, b as u32)
                        * pw(delta, (j - b) as u32);
                }
                shift_bound += a.abs() * w;
            }
        }
        if c.abs() > tol + shift_bound {
            return Some((m as u32, c));
        }
    }
    None
}

/// Assigns the case label and index from `(α, β, λ, k, n)`.
pub fn classify_case(
    inv: &Invariants,
    opts: &ExtractOptions,
) -> Result<(CaseLabel, PointIndex), SingularError> {
    let Invariants {
        alpha,
        beta,
        lambda,
        k,
        n,
    } = *inv;
    if !(alpha.abs() > opts.coef_tol) {
        return Err(SingularError::InvalidInvariants("alpha must be nonzero"));
    }
    if !(beta.abs() > opts.coef_tol) {
        return Err(SingularError::InvalidInvariants("beta must be nonzero"));
    }
    if !(lambda.abs() > opts.coef_tol) {
        return Err(SingularError::InvalidInvariants("lambda must be nonzero"));
    }
    if k < 2 || n < 2 {
        return Err(SingularError::InvalidInvariants("k and n must be at least 2"));
    }
    let (two_k, n1) = (2 * k, n + 1);
    let ab = alpha * beta;
    Ok(match two_k.cmp(&n1) {
        Ordering::Greater if n % 2 == 0 => (CaseLabel::S1, PointIndex::Zero),
        Ordering::Greater if ab > 0.0 => (CaseLabel::S2, PointIndex::Minus),
        Ordering::Greater => (CaseLabel::S3, PointIndex::Plus),
        Ordering::Equal => {
            let lk = lambda * lambda * k as f64;
            let q = lk + ab;
            if q.abs() <= opts.s5_tol * (lk + ab.abs()) {
                (CaseLabel::S5, PointIndex::Indeterminate)
            } else if q > 0.0 {
                (CaseLabel::S4, PointIndex::Minus)
            } else {
                (CaseLabel::S6, PointIndex::Plus)
            }
        }
        Ordering::Less => (CaseLabel::S7, PointIndex::Minus),
    })
}

/// The truncated field `(α y + λ xᵏ, β xⁿ − k λ xᵏ⁻¹ y)`.
pub fn make_normal_form(
    alpha: f64,
    beta: f64,
    lambda: f64,
    k: u32,
    n: u32,
) -> Result<PolyVectorField, SingularError> {
    for (v, what) in [
        (alpha, "alpha must be nonzero"),
        (beta, "beta must be nonzero"),
        (lambda, "lambda must be nonzero"),
    ] {
        if !(v != 0.0 && v.is_finite()) {
            return Err(SingularError::InvalidInvariants(what));
        }
    }
    if k < 2 || n < 2 {
        return Err(SingularError::InvalidInvariants("k and n must be at least 2"));
    }
    if k as usize > MAX_DEGREE || n as usize > MAX_DEGREE {
        return Err(FieldError::DegreeTooHigh {
            degree: k.max(n) as usize,
        }
        .into());
    }
    Ok(PolyVectorField::from_terms(
        &[(0, 1, alpha), (k, 0, lambda)],
        &[(n, 0, beta), (k - 1, 1, -(k as f64) * lambda)],
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv(alpha: f64, beta: f64, lambda: f64, k: u32, n: u32) -> Invariants {
        Invariants {
            alpha,
            beta,
            lambda,
            k,
            n,
        }
    }

    fn case(i: Invariants) -> (CaseLabel, PointIndex) {
        classify_case(&i, &ExtractOptions::default()).unwrap()
    }

    #[test]
    fn case_examples() {
        assert_eq!(case(inv(1.0, 1.0, 1.0, 3, 3)), (CaseLabel::S2, PointIndex::Minus));
        assert_eq!(case(inv(1.0, -3.0, 1.0, 2, 3)), (CaseLabel::S6, PointIndex::Plus));
        assert_eq!(case(inv(1.0, 1.0, 1.0, 2, 2)), (CaseLabel::S1, PointIndex::Zero));
        assert_eq!(
            case(inv(1.0, -2.0, 1.0, 2, 3)),
            (CaseLabel::S5, PointIndex::Indeterminate)
        );
        assert_eq!(case(inv(1.0, -1.0, 1.0, 3, 3)), (CaseLabel::S3, PointIndex::Plus));
        assert_eq!(case(inv(1.0, 1.0, 1.0, 2, 3)), (CaseLabel::S4, PointIndex::Minus));
        assert_eq!(case(inv(1.0, 1.0, 1.0, 2, 5)), (CaseLabel::S7, PointIndex::Minus));
    }

    #[test]
    fn case_rejects_zero_invariants() {
        let opts = ExtractOptions::default();
        assert!(classify_case(&inv(0.0, 1.0, 1.0, 2, 3), &opts).is_err());
        assert!(classify_case(&inv(1.0, 1e-12, 1.0, 2, 3), &opts).is_err());
        assert!(classify_case(&inv(1.0, 1.0, 1.0, 1, 3), &opts).is_err());
    }

    #[test]
    fn normal_form_examples() {
        let f = make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap();
        let expected =
            PolyVectorField::from_terms(&[(0, 1, 1.0), (2, 0, 1.0)], &[(3, 0, 1.0), (1, 1, -2.0)])
                .unwrap();
        assert_eq!(f, expected);
        let f = make_normal_form(1.0, 1.0, 1.0, 3, 3).unwrap();
        let expected =
            PolyVectorField::from_terms(&[(0, 1, 1.0), (3, 0, 1.0)], &[(3, 0, 1.0), (2, 1, -3.0)])
                .unwrap();
        assert_eq!(f, expected);
        assert!(make_normal_form(-2.5, 0.5, 3.0, 4, 7)
            .unwrap()
            .check_divergence_free()
            .ok);
    }

    #[test]
    fn nondegenerate_kinds() {
        let opts = SearchOptions::default();
        let ex = ExtractOptions::default();
        let saddle = PolyVectorField::from_terms(&[(1, 0, 1.0)], &[(0, 1, -1.0)]).unwrap();
        let center = PolyVectorField::from_terms(&[(0, 1, -1.0)], &[(1, 0, 1.0)]).unwrap();
        let shear = PolyVectorField::from_terms(&[(0, 1, 1.0)], &[]).unwrap();
        assert_eq!(classify_nondegenerate(&saddle, Vec2::ZERO, &opts, &ex).kind, PointKind::Saddle);
        assert_eq!(classify_nondegenerate(&center, Vec2::ZERO, &opts, &ex).kind, PointKind::Center);
        // (y, 0) has a line of zeros: routed to extraction, which refuses
        assert_eq!(
            classify_nondegenerate(&shear, Vec2::ZERO, &opts, &ex).kind,
            PointKind::Unresolved
        );
        assert_eq!(
            extract_degeneracy(&shear, Vec2::ZERO, &ex).unwrap_err(),
            SingularError::NotIsolatedOrder { component: 1 }
        );
    }

    #[test]
    fn extract_normal_forms() {
        let ex = ExtractOptions::default();
        let d = extract_degeneracy(&make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap(), Vec2::ZERO, &ex)
            .unwrap();
        assert_eq!((d.alpha, d.lambda, d.k, d.beta, d.n), (1.0, 1.0, 2, 1.0, 3));
        assert_eq!(d.frame, Frame::identity());
        assert_eq!(d.case_label, CaseLabel::S4);
        let d = extract_degeneracy(&make_normal_form(1.0, 1.0, 1.0, 3, 3).unwrap(), Vec2::ZERO, &ex)
            .unwrap();
        assert_eq!((d.alpha, d.lambda, d.k, d.beta, d.n), (1.0, 1.0, 3, 1.0, 3));
        assert_eq!(d.index, PointIndex::Minus);
    }

    #[test]
    fn extract_refusals() {
        let ex = ExtractOptions::default();
        let quad = PolyVectorField::from_terms(&[(2, 0, 1.0)], &[(1, 1, -2.0)]).unwrap();
        assert_eq!(
            extract_degeneracy(&quad, Vec2::ZERO, &ex).unwrap_err(),
            SingularError::NotSimple
        );
        let saddle = PolyVectorField::from_terms(&[(1, 0, 1.0)], &[(0, 1, -1.0)]).unwrap();
        assert!(matches!(
            extract_degeneracy(&saddle, Vec2::ZERO, &ex),
            Err(SingularError::NotDegenerate { .. })
        ));
        assert!(matches!(
            extract_degeneracy(&saddle, Vec2::new(1.0, 0.0), &ex),
            Err(SingularError::NotSingular { .. })
        ));
        // u·e₂ has no pure-x part: v = −2xy only
        let no_beta = PolyVectorField::from_terms(&[(0, 1, 1.0), (2, 0, 1.0)], &[(1, 1, -2.0)]).unwrap();
        assert_eq!(
            extract_degeneracy(&no_beta, Vec2::ZERO, &ex).unwrap_err(),
            SingularError::NotIsolatedOrder { component: 2 }
        );
    }

    #[test]
    fn negative_alpha_is_kept_with_a_right_handed_frame() {
        let f = make_normal_form(-2.0, 1.0, 1.0, 3, 3).unwrap();
        let d = extract_degeneracy(&f, Vec2::ZERO, &ExtractOptions::default()).unwrap();
        assert_eq!(d.alpha, -2.0);
        assert!(d.frame.is_valid());
        assert_eq!(d.case_label, CaseLabel::S3);
    }

    #[test]
    fn find_simple_saddle() {
        let saddle = PolyVectorField::from_terms(&[(1, 0, 1.0)], &[(0, 1, -1.0)]).unwrap();
        let pts = find_singular_points(&saddle, &Rect::new(-1.0, -1.0, 1.0, 1.0), &SearchOptions::default())
            .unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].location.norm() < 1e-12);
        assert_eq!(pts[0].kind, PointKind::Saddle);
    }

    #[test]
    fn find_reports_degenerate_zero() {
        let f = make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap();
        let pts = find_singular_points(&f, &Rect::new(-1.0, -1.0, 1.0, 1.0), &SearchOptions::default())
            .unwrap();
        assert_eq!(pts.len(), 1, "{pts:?}");
        match pts[0].kind {
            PointKind::Degenerate(d) => {
                assert_eq!((d.k, d.n, d.case_label), (2, 3, CaseLabel::S4));
            }
            other => panic!("expected degenerate point, got {other:?}"),
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap();
        let opts = SearchOptions {
            max_cells: 10,
            ..SearchOptions::default()
        };
        assert!(matches!(
            find_singular_points(&f, &Rect::new(-1.0, -1.0, 1.0, 1.0), &opts),
            Err(SingularError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn invalid_box() {
        let f = make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap();
        assert_eq!(
            find_singular_points(&f, &Rect::new(0.0, 0.0, 0.0, 1.0), &SearchOptions::default())
                .unwrap_err(),
            SingularError::InvalidBox
        );
    }
}
