//! Winding number of a vector field along closed curves (Brouwer degree in
//! the plane).
//!
//! The field direction is followed along the curve with adaptive parameter
//! subdivision. An arc is accepted only when the turn between its endpoints
//! stays below a quarter turn and agrees with the sum of the turns over its
//! two halves, so that narrow arcs where a degenerate zero concentrates most
//! of the rotation are resolved rather than mis-unwrapped.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::geom::{Rect, Vec2};
use crate::math;
use crate::vecfield::PolyVectorField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingOptions {
    /// Relative magnitude (against the largest magnitude seen on the curve)
    /// below which the field is treated as vanishing on the curve.
    pub zero_tol: f64,
    /// Total evaluation budget.
    pub max_samples: usize,
    /// Uniform samples before adaptive refinement.
    pub initial_samples: usize,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            zero_tol: 1e-12,
            max_samples: 1 << 20,
            initial_samples: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexResult {
    pub winding: i32,
    pub min_field_magnitude_on_curve: f64,
    pub samples_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IndexError {
    #[error("field vanishes on the curve near ({}, {}) (|u| = {magnitude:e})", at.x, at.y)]
    ZeroOnCurve { at: Vec2, magnitude: f64 },
    #[error("winding number did not stabilise within {samples} samples")]
    NonConvergent { samples: usize },
    #[error("curve is degenerate")]
    InvalidCurve,
}

/// Index of `field` along the circle of `radius` about `center`.
pub fn winding_index(
    field: &PolyVectorField,
    center: Vec2,
    radius: f64,
    opts: &WindingOptions,
) -> Result<IndexResult, IndexError> {
    if !(radius.is_finite() && radius > 0.0) || !center.is_finite() {
        return Err(IndexError::InvalidCurve);
    }
    winding_along(field, opts, |t| {
        let a = TAU * t;
        center + Vec2::new(math::cos(a), math::sin(a)) * radius
    })
}

/// Winding along the counter-clockwise boundary of `rect`, i.e. the sum of
/// the indices of the zeros enclosed.
pub fn index_sum(
    field: &PolyVectorField,
    rect: &Rect,
    opts: &WindingOptions,
) -> Result<IndexResult, IndexError> {
    if !rect.is_valid() {
        return Err(IndexError::InvalidCurve);
    }
    winding_along(field, opts, |t| rect.boundary_point(t))
}

/// Winding of `field` along the closed curve `t ↦ curve(t)`, `t ∈ [0, 1]`.
pub fn winding_along<C>(
    field: &PolyVectorField,
    opts: &WindingOptions,
    curve: C,
) -> Result<IndexResult, IndexError>
where
    C: Fn(f64) -> Vec2,
{
    let mut used = 0usize;
    let mut n = opts.initial_samples.max(4);
    let mut previous: Option<i32> = None;
    loop {
        let pass = turn_along(field, &curve, n, opts.max_samples.saturating_sub(used))?;
        used += pass.samples;
        if pass.min_mag <= opts.zero_tol * pass.max_mag {
            return Err(IndexError::ZeroOnCurve {
                at: pass.min_at,
                magnitude: pass.min_mag,
            });
        }
        let turns = pass.total / TAU;
        let w = math::round(turns);
        let clean = (turns - w).abs() < 1e-6;
        if clean && previous == Some(w as i32) {
            return Ok(IndexResult {
                winding: w as i32,
                min_field_magnitude_on_curve: pass.min_mag,
                samples_used: used,
            });
        }
        previous = clean.then_some(w as i32);
        n *= 2;
        if used >= opts.max_samples {
            return Err(IndexError::NonConvergent { samples: used });
        }
    }
}

struct Pass {
    total: f64,
    min_mag: f64,
    min_at: Vec2,
    max_mag: f64,
    samples: usize,
}

/// Signed turn from `a` to `b` in `(-π, π]`.
fn turn(a: Vec2, b: Vec2) -> f64 {
    math::atan2(a.cross(b), a.dot(b))
}

fn turn_along<C>(
    field: &PolyVectorField,
    curve: &C,
    n: usize,
    budget: usize,
) -> Result<Pass, IndexError>
where
    C: Fn(f64) -> Vec2,
{
    let mut pass = Pass {
        total: 0.0,
        min_mag: f64::INFINITY,
        min_at: Vec2::ZERO,
        max_mag: 0.0,
        samples: 0,
    };
    let sample = |t: f64, pass: &mut Pass| -> Vec2 {
        let p = curve(t);
        let f = field.eval(p);
        let m = f.norm();
        if m < pass.min_mag {
            pass.min_mag = m;
            pass.min_at = p;
        }
        pass.max_mag = pass.max_mag.max(m);
        pass.samples += 1;
        f
    };

    let first = sample(0.0, &mut pass);
    let mut prev = first;
    // explicit stack of pending arcs, processed left to right
    let mut stack: Vec<(f64, f64, Vec2, Vec2)> = Vec::new();
    for s in 0..n {
        let ta = s as f64 / n as f64;
        let tb = (s + 1) as f64 / n as f64;
        let fb = if s + 1 == n { first } else { sample(tb, &mut pass) };
        stack.push((ta, tb, prev, fb));
        while let Some((a, b, fa, fb)) = stack.pop() {
            if pass.samples > budget {
                return Err(IndexError::NonConvergent {
                    samples: pass.samples,
                });
            }
            if fa.norm_sq() == 0.0 || fb.norm_sq() == 0.0 {
                let (t, mag) = if fa.norm_sq() == 0.0 { (a, 0.0) } else { (b, 0.0) };
                return Err(IndexError::ZeroOnCurve {
                    at: curve(t),
                    magnitude: mag,
                });
            }
            let whole = turn(fa, fb);
            let m = 0.5 * (a + b);
            if b - a < 1e-15 {
                if whole.abs() > FRAC_PI_2 {
                    return Err(IndexError::ZeroOnCurve {
                        at: curve(m),
                        magnitude: pass.min_mag,
                    });
                }
                pass.total += whole;
                continue;
            }
            let fm = sample(m, &mut pass);
            let (left, right) = (turn(fa, fm), turn(fm, fb));
            if whole.abs() < FRAC_PI_2
                && left.abs() < FRAC_PI_2
                && right.abs() < FRAC_PI_2
                && (left + right - whole).abs() < 1e-9 * PI
            {
                pass.total += left + right;
            } else {
                // right half first so the left half is processed next
                stack.push((m, b, fm, fb));
                stack.push((a, m, fa, fm));
            }
        }
        prev = fb;
    }
    Ok(pass)
}
