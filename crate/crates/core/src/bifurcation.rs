//! Structural bifurcation of a first-order family `u⁰ + (t − t₀) u¹` at a
//! simple degenerate zero `x₀` of `u⁰`.
//!
//! Throughout, `ε = t₀ − t`, so the field at parameter `ε` is `u⁰ − ε u¹`.
//! In the eigenframe of `x₀` the perturbation contributes
//! `u¹·e₁ = λ₁ + …` and `u¹·e₂ = λ₀ + λ₂ x + λ₃ y + …`.
//!
//! Eliminating `y = −(λ xᵏ − ε λ₁) / α` from the first equation leaves a
//! scalar equation whose leading part is
//!
//! ```text
//! h(x) = C xᵐ − ε (λ₀ + D x),     m = min(n, 2k − 1)
//! ```
//!
//! with `C = β` (`2k > n+1`), `k λ² / α` (`2k < n+1`) or their sum
//! (`2k = n+1`), and `D = λ₂ (+ 2 λ λ₁ / α when k = 2)`. Every branch formula
//! and every Jacobian sign below follows from `h` and `det Du = −α h'(x)`.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::geom::{Rect, Vec2};
use crate::index::{index_sum, WindingOptions};
use crate::math;
use crate::singular::{
    extract_degeneracy, find_singular_points, kernel_frame, CaseLabel, DegeneracyData, ExtractOptions,
    PointIndex, PointKind, SearchOptions, SingularError, SingularPoint,
};
use crate::vecfield::{Frame, PolyVectorField, TimeFamily};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BifurcationError {
    #[error("case {0} is outside the supported bifurcation theory")]
    UnsupportedCase(CaseLabel),
    #[error(
        "indeterminate: λ₀ vanishes but the genericity condition fails, \
         so higher-order terms decide"
    )]
    Indeterminate,
    #[error("no bifurcation: branch tables do not apply")]
    NoBifurcation,
    #[error("epsilon ladder must contain nonzero finite values")]
    InvalidLadder,
    #[error(transparent)]
    Singular(#[from] SingularError),
}

/// Taylor coefficients of `u¹` at `x₀` in the eigenframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationData {
    /// `u¹(x₀)·e₂`
    pub lambda0: f64,
    /// `u¹(x₀)·e₁`
    pub lambda1: f64,
    /// `∂(u¹·e₂)/∂x` at `x₀`
    pub lambda2: f64,
    /// `∂(u¹·e₂)/∂y` at `x₀`; carried but unused at leading order.
    pub lambda3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    NoBifurcation,
    /// One saddle becomes two saddles and a center.
    SaddleSplit,
    /// One center becomes two centers and a saddle.
    CenterSplit,
    Indeterminate,
}

impl Decision {
    pub fn name(self) -> &'static str {
        match self {
            Decision::NoBifurcation => "no-bifurcation",
            Decision::SaddleSplit => "saddle-split",
            Decision::CenterSplit => "center-split",
            Decision::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Leading-order regime of the split branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `k = 2`, `n = 3`.
    K2N3,
    /// `k = 2`, `n > 3`.
    K2NAbove3,
    /// `k > 2`, `2k < n + 1`.
    KAbove2Below,
    /// `k > 2`, `2k > n + 1`.
    KAbove2Above,
    /// `k > 2`, `2k = n + 1`.
    KAbove2Balanced,
}

impl Regime {
    pub fn of(k: u32, n: u32) -> Regime {
        let (two_k, n1) = (2 * k, n + 1);
        if k == 2 {
            if n == 3 {
                Regime::K2N3
            } else {
                Regime::K2NAbove3
            }
        } else if two_k < n1 {
            Regime::KAbove2Below
        } else if two_k > n1 {
            Regime::KAbove2Above
        } else {
            Regime::KAbove2Balanced
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::K2N3 => "k=2,n=3",
            Regime::K2NAbove3 => "k=2,n>3",
            Regime::KAbove2Below => "k>2,2k<n+1",
            Regime::KAbove2Above => "k>2,2k>n+1",
            Regime::KAbove2Balanced => "k>2,2k=n+1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchLabel {
    X0,
    XPlus,
    XMinus,
}

impl BranchLabel {
    pub fn name(self) -> &'static str {
        match self {
            BranchLabel::X0 => "x0",
            BranchLabel::XPlus => "x+",
            BranchLabel::XMinus => "x-",
        }
    }
}

/// Leading-order description of one branch of zeros, in frame coordinates.
///
/// The frame coordinate satisfies `x ≈ coefficient · |ε|^(num/den)`; the
/// `x₀` branch of a split is `O(ε)` with an undetermined coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub label: BranchLabel,
    pub exponent: (u32, u32),
    pub coefficient: Option<f64>,
    /// `det Du ≈ jacobian_coefficient · ε` along the branch.
    pub jacobian_coefficient: f64,
    /// Expected type on the side where the branch exists.
    pub kind: BranchKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchKind {
    Saddle,
    Center,
}

impl BranchKind {
    pub fn name(self) -> &'static str {
        match self {
            BranchKind::Saddle => "saddle",
            BranchKind::Center => "center",
        }
    }
}

impl Branch {
    /// Frame `x` coordinate at parameter `ε`, when known.
    pub fn local_x(&self, eps: f64) -> Option<f64> {
        let c = self.coefficient?;
        let (p, q) = self.exponent;
        Some(c * math::powf(eps.abs(), p as f64 / q as f64))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub decision: Decision,
    pub regime: Option<Regime>,
    /// Sign of `ε` on which three zeros exist (`None` without a split).
    pub side: Option<i8>,
    pub branches: Vec<Branch>,
    /// The tables place the three zeros on the side where the genericity
    /// quantity is positive; set when the sign analysis disagrees.
    pub table_orientation_disagrees: bool,
    /// `A` in `xᵉ = A ε` for a split, `λ₀ / C` in `xᵐ = ε λ₀ / C` otherwise.
    pub radicand_coefficient: f64,
    pub root_degree: u32,
}

impl Prediction {
    /// World position of `label` at parameter `ε`, using
    /// `y = −(λ xᵏ − ε λ₁) / α` for the frame `y` coordinate.
    pub fn world_point(
        &self,
        d: &DegeneracyData,
        p: &PerturbationData,
        label: BranchLabel,
        eps: f64,
    ) -> Option<Vec2> {
        let x = match (self.decision, label) {
            (Decision::NoBifurcation, BranchLabel::X0) => {
                math::odd_root(eps * self.radicand_coefficient, self.root_degree)
            }
            (_, BranchLabel::X0) => 0.0,
            (_, _) => {
                if self.side != Some(sign(eps)) {
                    return None;
                }
                let b = self.branches.iter().find(|b| b.label == label)?;
                b.local_x(eps)?
            }
        };
        let y = -(d.lambda * math::powi(x, d.k) - eps * p.lambda1) / d.alpha;
        Some(d.frame.to_world(Vec2::new(x, y)))
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Reads `λ₀..λ₃` from `u¹` in `frame`.
pub fn extract_perturbation(u1: &PolyVectorField, frame: &Frame) -> PerturbationData {
    let local = u1.recenter_and_rotate(frame);
    PerturbationData {
        lambda0: local.v().coeff(0, 0),
        lambda1: local.u().coeff(0, 0),
        lambda2: local.v().coeff(1, 0),
        lambda3: local.v().coeff(0, 1),
    }
}

/// Genericity quantity: `2λλ₁ + αλ₂` for `k = 2`, `λ₂` for `k > 2`.
pub fn genericity_quantity(d: &DegeneracyData, p: &PerturbationData) -> f64 {
    if d.k == 2 {
        2.0 * d.lambda * p.lambda1 + d.alpha * p.lambda2
    } else {
        p.lambda2
    }
}

/// Chooses between no bifurcation, a saddle split and a center split.
///
/// `tol` is the threshold below which `λ₀` and the genericity quantity count
/// as zero.
pub fn decide(
    d: &DegeneracyData,
    p: &PerturbationData,
    tol: f64,
) -> Result<Decision, BifurcationError> {
    if matches!(d.case_label, CaseLabel::S1 | CaseLabel::S5) {
        return Err(BifurcationError::UnsupportedCase(d.case_label));
    }
    if p.lambda0.abs() > tol {
        return Ok(Decision::NoBifurcation);
    }
    if genericity_quantity(d, p).abs() <= tol {
        return Ok(Decision::Indeterminate);
    }
    Ok(match d.index {
        PointIndex::Minus => Decision::SaddleSplit,
        PointIndex::Plus => Decision::CenterSplit,
        _ => return Err(BifurcationError::UnsupportedCase(d.case_label)),
    })
}

/// `(C, m)` of the reduced equation `h(x) = C xᵐ − …`.
fn leading_term(d: &DegeneracyData) -> (f64, u32) {
    let (two_k, n1) = (2 * d.k, d.n + 1);
    let from_u = d.k as f64 * d.lambda * d.lambda / d.alpha;
    if two_k > n1 {
        (d.beta, d.n)
    } else if two_k < n1 {
        (from_u, two_k - 1)
    } else {
        (d.beta + from_u, d.n)
    }
}

/// The three split branches `x₀`, `x₊`, `x₋`.
pub fn branch_asymptotics(
    d: &DegeneracyData,
    p: &PerturbationData,
) -> Result<Vec<Branch>, BifurcationError> {
    Ok(split_prediction(d, p)?.branches)
}

fn split_prediction(d: &DegeneracyData, p: &PerturbationData) -> Result<Prediction, BifurcationError> {
    let decision = decide(d, p, 0.0)?;
    let (c, m) = leading_term(d);
    let g = genericity_quantity(d, p);
    let dd = if d.k == 2 { g / d.alpha } else { p.lambda2 };
    let e = m - 1;
    let a = dd / c;
    let side = sign(a);
    // det Du = −α h'(x): α D ε at x₀ and −e α D ε at x±
    let j0 = d.alpha * dd;
    let jpm = -(e as f64) * j0;
    let kind = |j: f64| {
        if j * side as f64 > 0.0 {
            BranchKind::Center
        } else {
            BranchKind::Saddle
        }
    };
    let mag = math::powf(a.abs(), 1.0 / e as f64);
    let branches = Vec::from([
        Branch {
            label: BranchLabel::X0,
            exponent: (1, 1),
            coefficient: None,
            jacobian_coefficient: j0,
            kind: kind(j0),
        },
        Branch {
            label: BranchLabel::XPlus,
            exponent: (1, e),
            coefficient: Some(mag),
            jacobian_coefficient: jpm,
            kind: kind(jpm),
        },
        Branch {
            label: BranchLabel::XMinus,
            exponent: (1, e),
            coefficient: Some(-mag),
            jacobian_coefficient: jpm,
            kind: kind(jpm),
        },
    ]);
    let table_sign = if d.k == 2 { g } else { d.alpha * p.lambda2 };
    Ok(Prediction {
        decision,
        regime: Some(Regime::of(d.k, d.n)),
        side: Some(side),
        branches,
        table_orientation_disagrees: sign(table_sign) != side,
        radicand_coefficient: a,
        root_degree: e,
    })
}

/// Decision plus branch predictions. Without a split the single branch
/// solves `C xᵐ = ε λ₀`.
pub fn predict(
    d: &DegeneracyData,
    p: &PerturbationData,
    tol: f64,
) -> Result<Prediction, BifurcationError> {
    match decide(d, p, tol)? {
        Decision::Indeterminate => Err(BifurcationError::Indeterminate),
        Decision::NoBifurcation => {
            let (c, m) = leading_term(d);
            let kind = match d.index {
                PointIndex::Plus => BranchKind::Center,
                _ => BranchKind::Saddle,
            };
            let a = p.lambda0 / c;
            Ok(Prediction {
                decision: Decision::NoBifurcation,
                regime: None,
                side: None,
                branches: Vec::from([Branch {
                    label: BranchLabel::X0,
                    exponent: (1, m),
                    coefficient: Some(math::powf(a.abs(), 1.0 / m as f64)),
                    jacobian_coefficient: 0.0,
                    kind,
                }]),
                table_orientation_disagrees: false,
                radicand_coefficient: a,
                root_degree: m,
            })
        }
        _ => {
            // the split itself was decided with `tol`; the tables assume λ₀ = 0
            let mut q = *p;
            q.lambda0 = 0.0;
            split_prediction(d, &q)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Anti,
    Reflectional,
    None,
}

impl Symmetry {
    pub fn name(self) -> &'static str {
        match self {
            Symmetry::Anti => "anti",
            Symmetry::Reflectional => "reflectional",
            Symmetry::None => "none",
        }
    }
}

/// Defining conditions of the generic symmetric subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenericCondition {
    /// `u⁰` and `u¹` share an anti-symmetry or a reflectional symmetry.
    Symmetric,
    /// `u⁰(x₀) = 0` and `det Du⁰(x₀) = 0`.
    DegenerateZero,
    /// `Du⁰(x₀) ≠ 0`.
    JacobianNonzero,
    /// `n = 3`.
    NIsThree,
    /// `k = 3` (anti) or `k = 2` (reflectional).
    KValue,
    /// `λ²k + αβ ≠ 0`.
    IndexNondegenerate,
    /// `λ₂ ≠ 0` (anti) or `2λλ₁ + αλ₂ ≠ 0` (reflectional).
    Genericity,
}

impl GenericCondition {
    pub fn name(self) -> &'static str {
        match self {
            GenericCondition::Symmetric => "symmetric",
            GenericCondition::DegenerateZero => "degenerate-zero",
            GenericCondition::JacobianNonzero => "jacobian-nonzero",
            GenericCondition::NIsThree => "n=3",
            GenericCondition::KValue => "k-value",
            GenericCondition::IndexNondegenerate => "lambda^2*k+alpha*beta!=0",
            GenericCondition::Genericity => "genericity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericMembership {
    pub symmetry: Symmetry,
    pub in_generic_subset: bool,
    pub failed_conditions: Vec<GenericCondition>,
}

/// Evaluates each defining condition of the open dense subsets of
/// anti-symmetric and reflectional families on which a split is guaranteed.
///
/// Conditions that cannot be evaluated because an earlier one failed
/// (no degenerate zero, vanishing Jacobian) are not listed.
pub fn check_generic_membership(family: &TimeFamily, p0: Vec2) -> GenericMembership {
    let anti = family.u0.check_antisymmetric(p0) && family.u1.check_antisymmetric(p0);
    let refl = family.u0.check_reflectional(p0) && family.u1.check_reflectional(p0);
    let mut failed = Vec::new();
    let opts = ExtractOptions::default();
    let scale = family.u0.scale().max(f64::MIN_POSITIVE);
    let jac = family.u0.jacobian(p0);
    let zero = family.u0.eval(p0).norm() <= 1e-8 * scale.max(1.0)
        && jac.det().abs() <= opts.det_tol * scale * scale;

    let early = |symmetry: Symmetry, failed: GenericCondition| {
        let mut list = Vec::new();
        if symmetry == Symmetry::None {
            list.push(GenericCondition::Symmetric);
        }
        list.push(failed);
        GenericMembership {
            symmetry,
            in_generic_subset: false,
            failed_conditions: list,
        }
    };
    let plain = if anti {
        Symmetry::Anti
    } else if refl {
        Symmetry::Reflectional
    } else {
        Symmetry::None
    };
    if !zero {
        return early(plain, GenericCondition::DegenerateZero);
    }
    if jac.max_abs() <= opts.coef_tol * scale {
        return early(plain, GenericCondition::JacobianNonzero);
    }

    let inv = raw_invariants(&family.u0, p0, &opts);
    // fields with both symmetries are told apart by the parity of k
    let symmetry = match (anti, refl) {
        (true, true) => match inv.k {
            Some(k) if k % 2 == 0 => Symmetry::Reflectional,
            _ => Symmetry::Anti,
        },
        (true, false) => Symmetry::Anti,
        (false, true) => Symmetry::Reflectional,
        _ => Symmetry::None,
    };
    if inv.n != Some(3) {
        failed.push(GenericCondition::NIsThree);
    }
    let want_k = match symmetry {
        Symmetry::Anti => Some(3),
        Symmetry::Reflectional => Some(2),
        Symmetry::None => None,
    };
    if let Some(want) = want_k {
        if inv.k != Some(want) {
            failed.push(GenericCondition::KValue);
        }
    }
    if let (Some(k), Some(lambda), Some(beta)) = (inv.k, inv.lambda, inv.beta) {
        let lk = lambda * lambda * k as f64;
        let ab = inv.alpha * beta;
        if (lk + ab).abs() <= opts.s5_tol * (lk + ab.abs()) {
            failed.push(GenericCondition::IndexNondegenerate);
        }
    }
    let p = extract_perturbation(&family.u1, &inv.frame);
    let tol = opts.coef_tol * family.u1.scale().max(1.0);
    let generic = match (symmetry, inv.lambda) {
        (Symmetry::Reflectional, Some(lambda)) => {
            (2.0 * lambda * p.lambda1 + inv.alpha * p.lambda2).abs() > tol
        }
        (Symmetry::Reflectional, None) => false,
        _ => match inv.k {
            Some(2) => match inv.lambda {
                Some(lambda) => (2.0 * lambda * p.lambda1 + inv.alpha * p.lambda2).abs() > tol,
                None => false,
            },
            _ => p.lambda2.abs() > tol,
        },
    };
    if !generic {
        failed.push(GenericCondition::Genericity);
    }
    if symmetry == Symmetry::None {
        failed.insert(0, GenericCondition::Symmetric);
    }
    GenericMembership {
        symmetry,
        in_generic_subset: failed.is_empty(),
        failed_conditions: failed,
    }
}

struct RawInvariants {
    frame: Frame,
    alpha: f64,
    lambda: Option<f64>,
    beta: Option<f64>,
    k: Option<u32>,
    n: Option<u32>,
}

/// Like [`extract_degeneracy`] but tolerant of missing orders, so that each
/// membership condition can be reported on its own.
fn raw_invariants(field: &PolyVectorField, p: Vec2, opts: &ExtractOptions) -> RawInvariants {
    let jac = field.jacobian(p);
    let frame = kernel_frame(&jac, p).unwrap_or_else(|_| Frame::identity());
    let alpha = frame.e1.dot(jac.apply(frame.e2));
    let local = field.recenter_and_rotate(&frame);
    let tol = opts.coef_tol * local.scale().max(f64::MIN_POSITIVE);
    let first = |poly: &crate::poly::Poly| {
        (2..=poly.max_exponent())
            .find(|&m| poly.coeff(m, 0).abs() > tol)
            .map(|m| (m as u32, poly.coeff(m, 0)))
    };
    let ku = first(local.u());
    let nv = first(local.v());
    RawInvariants {
        frame,
        alpha,
        lambda: ku.map(|t| t.1),
        beta: nv.map(|t| t.1),
        k: ku.map(|t| t.0),
        n: nv.map(|t| t.0),
    }
}

/// Options for [`verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Parameter values before scaling; both signs should be present.
    pub eps_ladder: Vec<f64>,
    pub eps_scale: f64,
    pub search: SearchOptions,
    pub extract: ExtractOptions,
    /// Threshold for `λ₀` and the genericity quantity.
    pub decision_tol: f64,
    /// Radius around `x₀` in which other zeros of `u⁰` limit the search box.
    pub neighborhood: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            eps_ladder: Vec::from([1e-2, -1e-2, 1e-3, -1e-3, 1e-4, -1e-4]),
            eps_scale: 1.0,
            search: SearchOptions::default(),
            extract: ExtractOptions::default(),
            decision_tol: 1e-9,
            neighborhood: 1.0,
        }
    }
}

/// Outcome of the numerical check of a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    Refuted(&'static str),
    Inconclusive(&'static str),
}

impl Verdict {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, Verdict::Confirmed)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Confirmed => f.write_str("confirmed"),
            Verdict::Refuted(why) => write!(f, "refuted ({why})"),
            Verdict::Inconclusive(why) => write!(f, "inconclusive ({why})"),
        }
    }
}

/// Measurements at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderRung {
    pub eps: f64,
    pub search_box: Rect,
    pub roots: Vec<SingularPoint>,
    pub saddles: usize,
    pub centers: usize,
    pub index_sum: Option<i32>,
    /// `max |x_found / x_predicted − 1|` over the branches that exist.
    pub asymptotic_error: Option<f64>,
    /// Part of `asymptotic_error` explained by the location uncertainty of
    /// `x₀` alone.
    pub error_floor: f64,
    /// Frame `x` coordinates of the zeros matched to `x₊` and `x₋`.
    pub branch_x: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationReport {
    pub point: Vec2,
    pub degeneracy: DegeneracyData,
    pub perturbation: PerturbationData,
    pub prediction: Prediction,
    /// Threshold actually used for `λ₀` and the genericity quantity: the
    /// requested one widened by their variation over the location
    /// uncertainty of `x₀`.
    pub decision_tol: f64,
    pub rungs: Vec<LadderRung>,
    pub verdict: Verdict,
}

impl BifurcationReport {
    pub fn decision(&self) -> Decision {
        self.prediction.decision
    }
}

/// Predicts the bifurcation at `p0` and checks it by locating the zeros of
/// `u⁰ − ε u¹` for every `ε` of the ladder.
///
/// The search box around `x₀` has half-width `max(10 |x₊(ε)|, 10³ res_tol)`,
/// never more than half the distance to the next zero of `u⁰`.
pub fn verify(
    family: &TimeFamily,
    p0: Vec2,
    opts: &VerifyOptions,
) -> Result<BifurcationReport, BifurcationError> {
    let ladder: Vec<f64> = opts.eps_ladder.iter().map(|e| e * opts.eps_scale).collect();
    if ladder.is_empty() || ladder.iter().any(|e| !(e.is_finite() && *e != 0.0)) {
        return Err(BifurcationError::InvalidLadder);
    }

    // locate x₀ precisely and find how far the neighbouring zeros are
    let hood = Rect::centered(p0, opts.neighborhood);
    let zeros = find_singular_points(&family.u0, &hood, &opts.search)?;
    let near = zeros
        .iter()
        .min_by(|a, b| a.location.dist(p0).total_cmp(&b.location.dist(p0)))
        .filter(|z| z.location.dist(p0) < 1e-3 * opts.neighborhood + 1e-6);
    // the search already extracted the invariants with the location spread
    let (x0, d, delta) = match near {
        Some(SingularPoint {
            location,
            kind: PointKind::Degenerate(d),
            uncertainty,
            ..
        }) => (*location, *d, *uncertainty),
        Some(z) => (
            z.location,
            extract_degeneracy(&family.u0, z.location, &opts.extract)?,
            z.uncertainty,
        ),
        None => (p0, extract_degeneracy(&family.u0, p0, &opts.extract)?, 0.0),
    };
    let cap = zeros
        .iter()
        .map(|z| z.location.dist(x0))
        .filter(|&r| r > 1e-6)
        .fold(2.0 * opts.neighborhood, f64::min)
        * 0.5;

    let p = extract_perturbation(&family.u1, &d.frame);
    let decision_tol = opts.decision_tol + decision_slack(family, &d, &p, delta);
    let prediction = predict(&d, &p, decision_tol)?;

    let winding = WindingOptions::default();
    let mut rungs = Vec::with_capacity(ladder.len());
    for &eps in &ladder {
        let field = family.perturbed(eps);
        // predicted distance of the outer zeros (or the single zero) from x₀
        let reach = math::powf(
            (eps * prediction.radicand_coefficient).abs(),
            1.0 / prediction.root_degree as f64,
        );
        let half = (10.0 * reach).max(1e3 * opts.search.res_tol).min(cap);
        let search_box = Rect::centered(x0, half);
        let search = SearchOptions {
            cluster_radius: opts.search.cluster_radius.min(1e-3 * reach),
            ..opts.search
        };
        let roots = find_singular_points(&field, &search_box, &search)?;
        let saddles = roots.iter().filter(|r| r.kind == PointKind::Saddle).count();
        let centers = roots.iter().filter(|r| r.kind == PointKind::Center).count();
        let index_sum = index_sum(&field, &search_box, &winding).ok().map(|r| r.winding);

        let error_floor = if reach > 0.0 { delta / reach } else { 0.0 };
        let mut asymptotic_error = None;
        let mut branch_x = None;
        match prediction.decision {
            Decision::NoBifurcation => {
                if let (Some(target), Some(b)) = (
                    prediction.world_point(&d, &p, BranchLabel::X0, eps),
                    prediction.branches.first(),
                ) {
                    if let Some(r) = nearest(&roots, target) {
                        let xf = d.frame.to_local(r.location).x;
                        let xp = math::odd_root(eps * prediction.radicand_coefficient, b.exponent.1);
                        asymptotic_error = Some((xf / xp - 1.0).abs());
                    }
                }
            }
            _ => {
                if roots.len() == 3 && prediction.side == Some(sign(eps)) {
                    let plus = prediction.world_point(&d, &p, BranchLabel::XPlus, eps);
                    let minus = prediction.world_point(&d, &p, BranchLabel::XMinus, eps);
                    if let (Some(tp), Some(tm)) = (plus, minus) {
                        let rp = nearest(&roots, tp);
                        let rm = nearest(&roots, tm);
                        if let (Some(rp), Some(rm)) = (rp, rm) {
                            let xp = d.frame.to_local(rp.location).x;
                            let xm = d.frame.to_local(rm.location).x;
                            let pp = d.frame.to_local(tp).x;
                            let pm = d.frame.to_local(tm).x;
                            let err = (xp / pp - 1.0).abs().max((xm / pm - 1.0).abs());
                            asymptotic_error = Some(err);
                            branch_x = Some((xp, xm));
                        }
                    }
                }
            }
        }
        rungs.push(LadderRung {
            eps,
            search_box,
            roots,
            saddles,
            centers,
            index_sum,
            asymptotic_error,
            error_floor,
            branch_x,
        });
    }

    let verdict = judge(&d, &prediction, &rungs);
    Ok(BifurcationReport {
        point: x0,
        degeneracy: d,
        perturbation: p,
        prediction,
        decision_tol,
        rungs,
        verdict,
    })
}

/// How far `λ₀` and the genericity quantity can move when `x₀` moves by
/// `delta`: both are re-read in the kernel frames at the four points
/// `x₀ ± delta eᵢ`.
fn decision_slack(family: &TimeFamily, d: &DegeneracyData, p: &PerturbationData, delta: f64) -> f64 {
    if !(delta > 0.0) {
        return 0.0;
    }
    let g = genericity_quantity(d, p);
    let x0 = d.frame.origin;
    let mut slack: f64 = 0.0;
    for step in [Vec2::new(delta, 0.0), Vec2::new(-delta, 0.0), Vec2::new(0.0, delta), Vec2::new(0.0, -delta)] {
        let q = x0 + step;
        let Ok(mut frame) = kernel_frame(&family.u0.jacobian(q), q) else {
            continue;
        };
        // keep e₁ on the same side as at x₀
        if frame.e1.dot(d.frame.e1) < 0.0 {
            frame = frame.flipped();
        }
        let pq = extract_perturbation(&family.u1, &frame);
        slack = slack
            .max((pq.lambda0 - p.lambda0).abs())
            .max((genericity_quantity(d, &pq) - g).abs());
    }
    slack
}

fn nearest(roots: &[SingularPoint], target: Vec2) -> Option<&SingularPoint> {
    roots
        .iter()
        .min_by(|a, b| a.location.dist(target).total_cmp(&b.location.dist(target)))
}

/// Expected `(count, saddles, centers)` on the side of `ε`.
fn expected_counts(d: &DegeneracyData, pred: &Prediction, eps: f64) -> (usize, usize, usize) {
    let single = match d.index {
        PointIndex::Plus => (1, 0, 1),
        _ => (1, 1, 0),
    };
    match pred.decision {
        Decision::SaddleSplit if pred.side == Some(sign(eps)) => (3, 2, 1),
        Decision::CenterSplit if pred.side == Some(sign(eps)) => (3, 1, 2),
        _ => single,
    }
}

fn judge(d: &DegeneracyData, pred: &Prediction, rungs: &[LadderRung]) -> Verdict {
    let want_index = d.index.value();
    for side in [1i8, -1] {
        let mut on_side: Vec<&LadderRung> = rungs.iter().filter(|r| sign(r.eps) == side).collect();
        if on_side.is_empty() {
            continue;
        }
        on_side.sort_by(|a, b| b.eps.abs().total_cmp(&a.eps.abs()));
        let smallest = &on_side[on_side.len().saturating_sub(2)..];
        if smallest.len() == 2 && smallest[0].roots.len() != smallest[1].roots.len() {
            return Verdict::Inconclusive("root counts differ between the two smallest |eps|");
        }
        for r in smallest {
            let (n, s, c) = expected_counts(d, pred, r.eps);
            if r.roots.len() != n {
                return Verdict::Refuted("root count differs from the prediction");
            }
            if r.saddles != s || r.centers != c {
                return Verdict::Refuted("root types differ from the prediction");
            }
        }
        // convergence towards the leading-order formula, 10% slack per rung
        // on top of what the uncertainty in x₀ explains
        let errs: Vec<(f64, f64)> = on_side
            .iter()
            .filter_map(|r| r.asymptotic_error.map(|e| (e, r.error_floor)))
            .collect();
        for w in errs.windows(2) {
            if w[1].0 > 1.1 * w[0].0 + w[1].1 + 1e-9 {
                return Verdict::Refuted("asymptotic error does not decrease along the ladder");
            }
        }
    }
    for r in rungs {
        match r.index_sum {
            None => return Verdict::Inconclusive("index sum could not be computed"),
            Some(s) if Some(s) != want_index => {
                return Verdict::Refuted("index sum differs from the index of the degenerate zero")
            }
            _ => {}
        }
    }
    Verdict::Confirmed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singular::{make_normal_form, ExtractOptions};

    fn degeneracy(alpha: f64, beta: f64, lambda: f64, k: u32, n: u32) -> DegeneracyData {
        let f = make_normal_form(alpha, beta, lambda, k, n).unwrap();
        extract_degeneracy(&f, Vec2::ZERO, &ExtractOptions::default()).unwrap()
    }

    fn pert(l0: f64, l1: f64, l2: f64, l3: f64) -> PerturbationData {
        PerturbationData {
            lambda0: l0,
            lambda1: l1,
            lambda2: l2,
            lambda3: l3,
        }
    }

    fn field(u: &[(u32, u32, f64)], v: &[(u32, u32, f64)]) -> PolyVectorField {
        PolyVectorField::from_terms(u, v).unwrap()
    }

    #[test]
    fn perturbation_examples() {
        let id = Frame::identity();
        assert_eq!(extract_perturbation(&field(&[], &[(1, 0, 1.0)]), &id), pert(0.0, 0.0, 1.0, 0.0));
        assert_eq!(extract_perturbation(&field(&[(0, 0, 1.0)], &[]), &id), pert(0.0, 1.0, 0.0, 0.0));
        assert_eq!(extract_perturbation(&field(&[], &[(0, 0, 1.0)]), &id), pert(1.0, 0.0, 0.0, 0.0));
        let anti = field(&[(1, 0, 0.7), (2, 1, -1.0)], &[(0, 1, 2.0), (3, 0, 0.5)]);
        let p = extract_perturbation(&anti, &id);
        assert_eq!((p.lambda0, p.lambda1), (0.0, 0.0));
    }

    #[test]
    fn decision_examples() {
        let s4 = degeneracy(1.0, 1.0, 1.0, 2, 3);
        assert_eq!(decide(&s4, &pert(0.0, 1.0, 0.0, 0.0), 1e-9).unwrap(), Decision::SaddleSplit);
        assert_eq!(decide(&s4, &pert(1.0, 0.0, 0.0, 0.0), 1e-9).unwrap(), Decision::NoBifurcation);
        assert_eq!(decide(&s4, &pert(0.0, 0.0, 0.0, 1.0), 1e-9).unwrap(), Decision::Indeterminate);
        let s3 = degeneracy(1.0, -1.0, 1.0, 3, 3);
        assert_eq!(decide(&s3, &pert(0.0, 0.0, 1.0, 0.0), 1e-9).unwrap(), Decision::CenterSplit);
        let s1 = degeneracy(1.0, 1.0, 1.0, 2, 2);
        assert_eq!(
            decide(&s1, &pert(0.0, 1.0, 0.0, 0.0), 1e-9).unwrap_err(),
            BifurcationError::UnsupportedCase(CaseLabel::S1)
        );
        let s5 = degeneracy(1.0, -2.0, 1.0, 2, 3);
        assert_eq!(
            decide(&s5, &pert(0.0, 1.0, 0.0, 0.0), 1e-9).unwrap_err(),
            BifurcationError::UnsupportedCase(CaseLabel::S5)
        );
    }

    #[test]
    fn asymptotics_k2_n3() {
        let d = degeneracy(1.0, 1.0, 1.0, 2, 3);
        let pr = predict(&d, &pert(0.0, 1.0, 0.0, 0.0), 1e-9).unwrap();
        assert_eq!(pr.regime, Some(Regime::K2N3));
        assert_eq!(pr.side, Some(1));
        assert!(!pr.table_orientation_disagrees);
        let plus = pr.branches[1];
        assert_eq!(plus.exponent, (1, 2));
        assert!((plus.coefficient.unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(plus.kind, BranchKind::Saddle);
        assert!((plus.jacobian_coefficient + 4.0).abs() < 1e-15);
        assert_eq!(pr.branches[0].kind, BranchKind::Center);
        assert!((pr.branches[0].jacobian_coefficient - 2.0).abs() < 1e-15);
    }

    #[test]
    fn asymptotics_other_examples() {
        let d = degeneracy(1.0, 1.0, 1.0, 3, 3);
        let br = branch_asymptotics(&d, &pert(0.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(br[1].exponent, (1, 2));
        assert!((br[1].coefficient.unwrap() - 1.0).abs() < 1e-15);
        let d = degeneracy(1.0, 1.0, 1.0, 2, 5);
        let pr = predict(&d, &pert(0.0, 1.0, 0.0, 0.0), 1e-9).unwrap();
        assert_eq!(pr.regime, Some(Regime::K2NAbove3));
        assert!((pr.branches[1].coefficient.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn center_split_side_follows_the_radicand() {
        // A = λ₂ / β = −1: three zeros for ε < 0
        let d = degeneracy(1.0, -1.0, 1.0, 3, 3);
        let pr = predict(&d, &pert(0.0, 0.0, 1.0, 0.0), 1e-9).unwrap();
        assert_eq!(pr.side, Some(-1));
        assert!(pr.table_orientation_disagrees);
        assert_eq!(pr.branches[1].kind, BranchKind::Center);
        assert_eq!(pr.branches[0].kind, BranchKind::Saddle);
    }

    #[test]
    fn membership_examples() {
        let u0 = field(&[(0, 1, 1.0), (3, 0, 1.0)], &[(3, 0, 1.0), (2, 1, -3.0)]);
        let fam = TimeFamily::new(u0.clone(), field(&[], &[(1, 0, 1.0)]), 0.0);
        let m = check_generic_membership(&fam, Vec2::ZERO);
        assert_eq!(m.symmetry, Symmetry::Anti);
        assert!(m.in_generic_subset, "{m:?}");
        let fam = TimeFamily::new(u0, field(&[], &[(0, 1, 1.0)]), 0.0);
        let m = check_generic_membership(&fam, Vec2::ZERO);
        assert_eq!(m.failed_conditions, Vec::from([GenericCondition::Genericity]));

        let u0 = field(&[(0, 1, 1.0), (2, 0, 1.0)], &[(3, 0, 1.0), (1, 1, -2.0)]);
        let fam = TimeFamily::new(u0, field(&[(0, 0, 1.0)], &[]), 0.0);
        let m = check_generic_membership(&fam, Vec2::ZERO);
        assert_eq!(m.symmetry, Symmetry::Reflectional);
        assert!(m.in_generic_subset, "{m:?}");
    }

    #[test]
    fn verify_saddle_split() {
        let fam = TimeFamily::new(
            make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap(),
            field(&[(0, 0, 1.0)], &[]),
            0.0,
        );
        let rep = verify(&fam, Vec2::ZERO, &VerifyOptions::default()).unwrap();
        assert_eq!(rep.decision(), Decision::SaddleSplit);
        assert_eq!(rep.verdict, Verdict::Confirmed, "{:#?}", rep.rungs);
    }

    #[test]
    fn verify_no_bifurcation() {
        let fam = TimeFamily::new(
            make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap(),
            field(&[], &[(0, 0, 1.0)]),
            0.0,
        );
        let rep = verify(&fam, Vec2::ZERO, &VerifyOptions::default()).unwrap();
        assert_eq!(rep.decision(), Decision::NoBifurcation);
        assert_eq!(rep.verdict, Verdict::Confirmed, "{:#?}", rep.rungs);
        assert!(rep.rungs.iter().all(|r| r.roots.len() == 1 && r.saddles == 1));
    }

    #[test]
    fn bad_ladder() {
        let fam = TimeFamily::new(
            make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap(),
            field(&[], &[(0, 0, 1.0)]),
            0.0,
        );
        let opts = VerifyOptions {
            eps_ladder: Vec::from([0.0]),
            ..VerifyOptions::default()
        };
        assert_eq!(
            verify(&fam, Vec2::ZERO, &opts).unwrap_err(),
            BifurcationError::InvalidLadder
        );
    }
}
