//! Shared fixtures and independent oracles for the integration tests.

#![allow(dead_code)]

use std::f64::consts::TAU;

use flowtopo_core::{
    make_normal_form, signature, BifurcationReport, PolyVectorField, Rect, SignatureOptions,
    TimeFamily, TopologySignature, Vec2,
};

pub fn field(u: &[(u32, u32, f64)], v: &[(u32, u32, f64)]) -> PolyVectorField {
    PolyVectorField::from_terms(u, v).unwrap()
}

/// Normal form `(α, β, λ, k, n)` at the origin perturbed along `u1`.
pub fn normal_family(
    alpha: f64,
    beta: f64,
    lambda: f64,
    k: u32,
    n: u32,
    u1: PolyVectorField,
) -> TimeFamily {
    TimeFamily::new(make_normal_form(alpha, beta, lambda, k, n).unwrap(), u1, 0.0)
}

/// `u¹ = (1, 0)`
pub fn push_x() -> PolyVectorField {
    field(&[(0, 0, 1.0)], &[])
}

/// `u¹ = (0, 1)`
pub fn push_y() -> PolyVectorField {
    field(&[], &[(0, 0, 1.0)])
}

/// `u¹ = (0, x)`
pub fn shear() -> PolyVectorField {
    field(&[], &[(1, 0, 1.0)])
}

/// Half-width of a box that holds every zero born at `eps`, with room for
/// the separatrices between them.
pub fn topology_half_width(rep: &BifurcationReport, eps: f64) -> f64 {
    let pr = &rep.prediction;
    let reach = (eps * pr.radicand_coefficient).abs().powf(1.0 / pr.root_degree as f64);
    3.0 * reach
}

/// Signatures at `−ε̂` and `+ε̂` for the smallest `|ε|` of the report's ladder.
pub fn signatures_across(family: &TimeFamily, rep: &BifurcationReport) -> (TopologySignature, TopologySignature) {
    let eps = rep
        .rungs
        .iter()
        .map(|r| r.eps.abs())
        .fold(f64::INFINITY, f64::min);
    let sig = |e: f64| {
        let half = topology_half_width(rep, e);
        let bbox = Rect::centered(rep.point, half);
        signature(&family.perturbed(e), &bbox, &SignatureOptions::default()).unwrap()
    };
    (sig(-eps), sig(eps))
}

/// Winding of `field` around the boundary of `cell`, from a fixed number of
/// samples per edge with the principal-value turn between neighbours.
pub fn sampled_winding(field: &PolyVectorField, cell: &Rect, per_edge: usize) -> Option<i32> {
    let corners = [
        Vec2::new(cell.x0, cell.y0),
        Vec2::new(cell.x1, cell.y0),
        Vec2::new(cell.x1, cell.y1),
        Vec2::new(cell.x0, cell.y1),
    ];
    let mut pts = Vec::with_capacity(4 * per_edge);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        for s in 0..per_edge {
            let t = s as f64 / per_edge as f64;
            pts.push(a + (b - a) * t);
        }
    }
    let mut total = 0.0;
    let mut prev = field.eval(pts[0]);
    for i in 1..=pts.len() {
        let f = field.eval(pts[i % pts.len()]);
        if f.norm() == 0.0 || prev.norm() == 0.0 {
            return None;
        }
        total += prev.cross(f).atan2(prev.dot(f));
        prev = f;
    }
    let w = total / TAU;
    let r = w.round();
    ((w - r).abs() < 1e-3).then_some(r as i32)
}

/// Brute-force zero isolation on an `n × n` grid: cells with nonzero sampled
/// winding, grouped into 8-connected clusters. Returns each cluster's mean
/// cell centre and summed winding.
pub fn grid_roots(field: &PolyVectorField, rect: &Rect, n: usize) -> Vec<(Vec2, i32)> {
    let (w, h) = (rect.width() / n as f64, rect.height() / n as f64);
    let mut hit = vec![vec![0i32; n]; n];
    for i in 0..n {
        for j in 0..n {
            let cell = Rect::new(
                rect.x0 + i as f64 * w,
                rect.y0 + j as f64 * h,
                rect.x0 + (i + 1) as f64 * w,
                rect.y0 + (j + 1) as f64 * h,
            );
            hit[i][j] = sampled_winding(field, &cell, 32).unwrap_or(i32::MAX);
        }
    }
    let mut seen = vec![vec![false; n]; n];
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if seen[i][j] || hit[i][j] == 0 {
                continue;
            }
            let mut stack = vec![(i, j)];
            seen[i][j] = true;
            let (mut sum, mut centre, mut cells) = (0i32, Vec2::ZERO, 0.0);
            while let Some((a, b)) = stack.pop() {
                sum = sum.saturating_add(hit[a][b]);
                centre = centre
                    + Vec2::new(rect.x0 + (a as f64 + 0.5) * w, rect.y0 + (b as f64 + 0.5) * h);
                cells += 1.0;
                for da in -1i64..=1 {
                    for db in -1i64..=1 {
                        let (x, y) = (a as i64 + da, b as i64 + db);
                        if x < 0 || y < 0 || x >= n as i64 || y >= n as i64 {
                            continue;
                        }
                        let (x, y) = (x as usize, y as usize);
                        if !seen[x][y] && hit[x][y] != 0 {
                            seen[x][y] = true;
                            stack.push((x, y));
                        }
                    }
                }
            }
            out.push((centre * (1.0 / cells), sum));
        }
    }
    out
}

/// Least-squares slope of `log|y|` against `log|x|`.
pub fn log_slope(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|(x, y)| (x.abs().ln(), y.abs().ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
