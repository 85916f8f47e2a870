//! Thin wrappers over `libm` so the numeric code reads like `std` code.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn powf(x: f64, e: f64) -> f64 {
    libm::pow(x, e)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Real `m`-th root for odd `m`, keeping the sign of `x`.
pub(crate) fn odd_root(x: f64, m: u32) -> f64 {
    let r = powf(x.abs(), 1.0 / m as f64);
    if x < 0.0 {
        -r
    } else {
        r
    }
}

/// `x^e` for a small non-negative integer exponent.
pub(crate) fn powi(x: f64, e: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e {
        acc *= x;
    }
    acc
}
