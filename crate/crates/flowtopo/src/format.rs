//! Number formatting shared by every subcommand.

use flowtopo_core::Vec2;

/// Significant digits of every printed real.
pub const DIGITS: usize = 12;

/// Shortest form of `x` at twelve significant digits, `%g` style: fixed
/// notation for exponents in `[-5, 12)`, scientific otherwise, trailing
/// zeros dropped. Negative zero prints as `0`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn point(p: Vec2) -> String {
    format!("({}, {})", num(p.x), num(p.y))
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn opt_int(x: Option<i32>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Index with an explicit sign, `?` when unknown.
pub fn signed_index(i: Option<i32>) -> String {
    match i {
        Some(v) if v > 0 => format!("+{v}"),
        Some(v) => v.to_string(),
        None => "?".into(),
    }
}
