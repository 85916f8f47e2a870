//! Polynomial vector fields, orthonormal frames and the first-order time family.

use alloc::vec::Vec;

use thiserror::Error;

use crate::geom::{Mat2, Vec2};
use crate::poly::Poly;

/// Highest total degree accepted for a field. Frame changes expand binomials,
/// so the cost grows quickly with degree.
pub const MAX_DEGREE: usize = 16;

/// Absolute tolerance for coefficient-level exactness claims.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("field degree {degree} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeTooHigh { degree: usize },
    #[error("field has a non-finite coefficient")]
    NonFinite,
    #[error("frame axes are not an orthonormal right-handed pair")]
    InvalidFrame,
}

/// A planar polynomial vector field `(u, v)`.
///
/// Partial derivatives are precomputed, so evaluation of the Jacobian does
/// not allocate.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    u: Poly,
    v: Poly,
    du_dx: Poly,
    du_dy: Poly,
    dv_dx: Poly,
    dv_dy: Poly,
}

impl PolyVectorField {
    pub fn new(u: Poly, v: Poly) -> Result<Self, FieldError> {
        if !u.is_finite() || !v.is_finite() {
            return Err(FieldError::NonFinite);
        }
        let degree = u.degree().max(v.degree());
        if degree > MAX_DEGREE {
            return Err(FieldError::DegreeTooHigh { degree });
        }
        Ok(Self {
            du_dx: u.d_dx(),
            du_dy: u.d_dy(),
            dv_dx: v.d_dx(),
            dv_dy: v.d_dy(),
            u,
            v,
        })
    }

    /// Field from `(i, j, c)` triples meaning `c xⁱ yʲ` in each component.
    pub fn from_terms(u: &[(u32, u32, f64)], v: &[(u32, u32, f64)]) -> Result<Self, FieldError> {
        Self::new(Poly::from_terms(u), Poly::from_terms(v))
    }

    pub fn zero() -> Self {
        Self::new(Poly::zero(), Poly::zero()).expect("zero field is valid")
    }

    pub fn u(&self) -> &Poly {
        &self.u
    }

    pub fn v(&self) -> &Poly {
        &self.v
    }

    pub fn max_degree(&self) -> usize {
        self.u.degree().max(self.v.degree())
    }

    /// Largest coefficient magnitude; the natural scale of the field.
    pub fn scale(&self) -> f64 {
        self.u.max_abs_coeff().max(self.v.max_abs_coeff())
    }

    #[inline]
    pub fn eval(&self, p: Vec2) -> Vec2 {
        Vec2::new(self.u.eval(p.x, p.y), self.v.eval(p.x, p.y))
    }

    #[inline]
    pub fn jacobian(&self, p: Vec2) -> Mat2 {
        Mat2::new(
            self.du_dx.eval(p.x, p.y),
            self.du_dy.eval(p.x, p.y),
            self.dv_dx.eval(p.x, p.y),
            self.dv_dy.eval(p.x, p.y),
        )
    }

    /// The polynomial `det Du`.
    pub fn jacobian_det_poly(&self) -> Poly {
        self.du_dx
            .mul(&self.dv_dy)
            .sub(&self.du_dy.mul(&self.dv_dx))
    }

    /// The polynomial `∂u/∂x + ∂v/∂y`.
    pub fn divergence_poly(&self) -> Poly {
        self.du_dx.add(&self.dv_dy)
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: f64, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(self.u.axpy(s, &other.u), self.v.axpy(s, &other.v))
            .expect("sum of admissible fields is admissible")
    }

    pub fn scaled(&self, s: f64) -> PolyVectorField {
        PolyVectorField::new(self.u.scale(s), self.v.scale(s)).expect("scaling keeps degree")
    }

    pub fn negated(&self) -> PolyVectorField {
        self.scaled(-1.0)
    }

    /// Coefficient-level divergence check.
    pub fn check_divergence_free(&self) -> DivergenceReport {
        let div = self.divergence_poly();
        let mut worst = 0.0;
        let mut at = None;
        for (i, j, c) in div.terms() {
            if c.abs() > worst {
                worst = c.abs();
                at = Some((i, j));
            }
        }
        DivergenceReport {
            ok: worst <= EXACT_TOL,
            worst_violation: worst,
            worst_monomial: at,
        }
    }

    /// Stream function `ψ` with `u = ∂ψ/∂y`, `v = −∂ψ/∂x`, `ψ(0,0) = 0`.
    /// `None` unless the field is divergence-free.
    pub fn stream_function(&self) -> Option<Poly> {
        if !self.check_divergence_free().ok {
            return None;
        }
        let mut v_on_axis = Poly::zero();
        for (i, j, c) in self.v.terms() {
            if j == 0 {
                v_on_axis.add_term(i as u32, 0, c);
            }
        }
        Some(self.u.integrate_y().sub(&v_on_axis.integrate_x()))
    }

    /// `true` iff every even-total-degree monomial vanishes after moving the
    /// origin to `center`, i.e. `u(c − x) = −u(c + x)`.
    pub fn check_antisymmetric(&self, center: Vec2) -> bool {
        let tol = EXACT_TOL * self.scale().max(1.0);
        let u = self.u.shifted(center.x, center.y);
        let v = self.v.shifted(center.x, center.y);
        let odd = u
            .terms()
            .chain(v.terms())
            .all(|(i, j, c)| (i + j) % 2 == 1 || c.abs() <= tol);
        odd
    }

    /// `true` iff, about the vertical axis through `axis_origin`, the first
    /// component is even in `x` and the second is odd in `x`.
    pub fn check_reflectional(&self, axis_origin: Vec2) -> bool {
        let tol = EXACT_TOL * self.scale().max(1.0);
        let u = self.u.shifted(axis_origin.x, axis_origin.y);
        let v = self.v.shifted(axis_origin.x, axis_origin.y);
        u.terms().all(|(i, _, c)| i % 2 == 0 || c.abs() <= tol)
            && v.terms().all(|(i, _, c)| i % 2 == 1 || c.abs() <= tol)
    }

    /// The field written in the coordinates of `frame`: for local `(X, Y)`,
    /// `U(X, Y) = Rᵀ u(o + X e₁ + Y e₂)` with `R = [e₁ e₂]`.
    pub fn recenter_and_rotate(&self, frame: &Frame) -> PolyVectorField {
        let (o, e1, e2) = (frame.origin, frame.e1, frame.e2);
        let u = self
            .u
            .shifted(o.x, o.y)
            .linear_substitution(e1.x, e2.x, e1.y, e2.y);
        let v = self
            .v
            .shifted(o.x, o.y)
            .linear_substitution(e1.x, e2.x, e1.y, e2.y);
        let uu = u.scale(e1.x).axpy(e1.y, &v);
        let vv = u.scale(e2.x).axpy(e2.y, &v);
        PolyVectorField::new(uu, vv).expect("orthogonal change of frame preserves degree")
    }

    /// Drops coefficients with magnitude at most `tol`.
    pub fn chop(&self, tol: f64) -> PolyVectorField {
        PolyVectorField::new(self.u.chop(tol), self.v.chop(tol)).expect("chop keeps degree")
    }

    /// Nonzero coefficients as `(component, i, j, c)` with component 0 = u.
    pub fn coefficients(&self) -> Vec<(usize, usize, usize, f64)> {
        self.u
            .terms()
            .map(|(i, j, c)| (0, i, j, c))
            .chain(self.v.terms().map(|(i, j, c)| (1, i, j, c)))
            .collect()
    }
}

/// Outcome of [`PolyVectorField::check_divergence_free`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport {
    pub ok: bool,
    pub worst_violation: f64,
    /// Monomial `xⁱ yʲ` of the divergence carrying the worst violation.
    pub worst_monomial: Option<(usize, usize)>,
}

/// Orthonormal right-handed frame `(origin, e₁, e₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub origin: Vec2,
    pub e1: Vec2,
    pub e2: Vec2,
}

impl Frame {
    pub fn identity() -> Self {
        Self {
            origin: Vec2::ZERO,
            e1: Vec2::new(1.0, 0.0),
            e2: Vec2::new(0.0, 1.0),
        }
    }

    /// Frame at `origin` with first axis along `dir` (normalised) and
    /// `e₂ = e₁` rotated counter-clockwise.
    pub fn from_direction(origin: Vec2, dir: Vec2) -> Result<Self, FieldError> {
        let n = dir.norm();
        if !(n.is_finite() && n > 0.0) || !origin.is_finite() {
            return Err(FieldError::InvalidFrame);
        }
        let e1 = dir * (1.0 / n);
        Ok(Self {
            origin,
            e1,
            e2: e1.perp(),
        })
    }

    pub fn from_axes(origin: Vec2, e1: Vec2, e2: Vec2) -> Result<Self, FieldError> {
        let f = Self { origin, e1, e2 };
        if f.is_valid() {
            Ok(f)
        } else {
            Err(FieldError::InvalidFrame)
        }
    }

    pub fn is_valid(&self) -> bool {
        (self.e1.norm() - 1.0).abs() < 1e-12
            && (self.e2.norm() - 1.0).abs() < 1e-12
            && self.e1.dot(self.e2).abs() < 1e-12
            && (self.e1.cross(self.e2) - 1.0).abs() < 1e-12
            && self.origin.is_finite()
    }

    pub fn to_world(&self, local: Vec2) -> Vec2 {
        self.origin + self.e1 * local.x + self.e2 * local.y
    }

    pub fn to_local(&self, world: Vec2) -> Vec2 {
        let d = world - self.origin;
        Vec2::new(d.dot(self.e1), d.dot(self.e2))
    }

    /// Frame whose `recenter_and_rotate` undoes this one's.
    pub fn inverse(&self) -> Frame {
        let e1 = Vec2::new(self.e1.x, self.e2.x);
        let e2 = Vec2::new(self.e1.y, self.e2.y);
        let origin = -Vec2::new(self.origin.dot(self.e1), self.origin.dot(self.e2));
        Frame { origin, e1, e2 }
    }

    /// The same axes turned by half a turn.
    pub fn flipped(&self) -> Frame {
        Frame {
            origin: self.origin,
            e1: -self.e1,
            e2: -self.e2,
        }
    }
}

/// First-order family `u(x, t) = u⁰(x) + (t − t₀) u¹(x)`; no remainder term.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFamily {
    pub u0: PolyVectorField,
    pub u1: PolyVectorField,
    pub t0: f64,
}

impl TimeFamily {
    pub fn new(u0: PolyVectorField, u1: PolyVectorField, t0: f64) -> Self {
        Self { u0, u1, t0 }
    }

    pub fn at_time(&self, t: f64) -> PolyVectorField {
        self.u0.axpy(t - self.t0, &self.u1)
    }

    /// `u⁰ − ε u¹`, i.e. the field at `t = t₀ − ε`.
    pub fn perturbed(&self, eps: f64) -> PolyVectorField {
        self.u0.axpy(-eps, &self.u1)
    }
}
