//! Streamlines, separatrices and the separatrix graph ("signature") of a
//! field in a box. Two fields are treated as topologically equivalent when
//! their signatures are isomorphic.

use alloc::vec::Vec;

use thiserror::Error;

use crate::geom::{Rect, Vec2};
use crate::index::{index_sum, WindingOptions};
use crate::math;
use crate::poly::Poly;
use crate::singular::{find_singular_points, PointKind, SearchOptions, SingularError, SingularPoint};
use crate::vecfield::PolyVectorField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("seed lies outside the box")]
    SeedOutside,
    #[error("box is degenerate")]
    InvalidBox,
    #[error("streamline did not terminate within {steps} steps")]
    StepLimitExceeded { steps: usize },
    #[error("point is not a nondegenerate saddle")]
    NotASaddle,
    #[error("stable and unstable directions do not alternate around the saddle")]
    EigenvectorDegeneracy,
    #[error(transparent)]
    Singular(#[from] SingularError),
}

/// How an orbit starts or stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitEnd {
    /// Started at a user seed.
    Seed,
    /// Captured by (or launched from) capture point `i`.
    Singular(usize),
    BoxExit,
    /// Returned to its seed with a matching direction.
    Closed,
    /// Step size collapsed away from every known zero.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub points: Vec<Vec2>,
    pub start: OrbitEnd,
    pub end: OrbitEnd,
    /// Passed within ten capture radii of a zero without being captured.
    pub ambiguous: bool,
    pub arc_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamlineOptions {
    pub bbox: Rect,
    /// Local error per step.
    pub tol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
    pub max_step: f64,
    pub capture_radius: f64,
    pub closure_tol: f64,
    /// Known zeros that end an orbit passing within `capture_radius`.
    pub capture_points: Vec<Vec2>,
    /// Integrate along `−u` instead of `u`.
    pub backward: bool,
    /// Keep the orbit on this stream-function level (divergence-free fields
    /// only); defaults to the level of the seed.
    pub level: Option<f64>,
}

impl StreamlineOptions {
    /// Defaults scaled to the diameter of `bbox`.
    pub fn for_box(bbox: Rect) -> Self {
        let diam = bbox.diameter();
        Self {
            bbox,
            tol: 1e-9,
            max_steps: 200_000,
            initial_step: 1e-3 * diam,
            max_step: diam / 200.0,
            capture_radius: 1e-5 * diam,
            closure_tol: 1e-6 * diam,
            capture_points: Vec::new(),
            backward: false,
            level: None,
        }
    }
}

struct Direction<'a> {
    field: &'a PolyVectorField,
    sign: f64,
}

impl Direction<'_> {
    fn at(&self, p: Vec2) -> Vec2 {
        let f = self.field.eval(p);
        let n = f.norm();
        if n == 0.0 || !n.is_finite() {
            Vec2::ZERO
        } else {
            f * (self.sign / n)
        }
    }
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One embedded step; returns the fifth-order point and the error estimate.
fn dopri_step(dir: &Direction<'_>, p: Vec2, h: f64) -> (Vec2, f64) {
    let _ = C;
    let mut k = [Vec2::ZERO; 7];
    k[0] = dir.at(p);
    for s in 1..7 {
        let mut q = p;
        for (j, a) in A[s].iter().enumerate().take(s) {
            q += k[j] * (h * a);
        }
        k[s] = dir.at(q);
    }
    let mut hi = p;
    let mut err = Vec2::ZERO;
    for s in 0..7 {
        hi += k[s] * (h * B5[s]);
        err += k[s] * (h * (B5[s] - B4[s]));
    }
    (hi, err.norm())
}

/// Integrates `dx/ds = ±u/|u|` from `seed` until the orbit leaves the box,
/// closes, or reaches a capture point.
pub fn integrate_streamline(
    field: &PolyVectorField,
    seed: Vec2,
    opts: &StreamlineOptions,
) -> Result<Orbit, TopologyError> {
    if !opts.bbox.is_valid() {
        return Err(TopologyError::InvalidBox);
    }
    if !opts.bbox.contains(seed) {
        return Err(TopologyError::SeedOutside);
    }
    let dir = Direction {
        field,
        sign: if opts.backward { -1.0 } else { 1.0 },
    };
    let psi = field.stream_function();
    let level = psi.as_ref().map(|s| opts.level.unwrap_or_else(|| s.eval(seed.x, seed.y)));

    let mut armed: Vec<bool> = opts
        .capture_points
        .iter()
        .map(|c| c.dist(seed) > 2.0 * opts.capture_radius)
        .collect();
    let mut closest: Vec<f64> = alloc::vec![f64::INFINITY; opts.capture_points.len()];
    let seed_dir = dir.at(seed);
    let mut closure_armed = false;

    let mut points = Vec::from([seed]);
    let mut p = seed;
    let mut h = opts.initial_step.min(opts.max_step);
    let mut arc = 0.0;
    let min_step = 1e-14 * opts.bbox.diameter();
    let mut steps = 0usize;
    let finish = |points: Vec<Vec2>, end: OrbitEnd, arc: f64, closest: &[f64], captured: Option<usize>| {
        let ambiguous = closest.iter().enumerate().any(|(i, &d)| {
            Some(i) != captured && d < 10.0 * opts.capture_radius
        });
        Orbit {
            points,
            start: OrbitEnd::Seed,
            end,
            ambiguous,
            arc_length: arc,
        }
    };
    if seed_dir == Vec2::ZERO {
        return Ok(finish(points, OrbitEnd::Stalled, 0.0, &closest, None));
    }

    loop {
        steps += 1;
        if steps > opts.max_steps {
            return Err(TopologyError::StepLimitExceeded { steps: opts.max_steps });
        }
        let (mut q, err) = dopri_step(&dir, p, h);
        let accept = err <= opts.tol && q.is_finite();
        let factor = if err > 0.0 {
            (0.9 * math::powf(opts.tol / err, 0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        if !accept {
            h *= factor.min(0.9);
            if h < min_step {
                return Ok(finish(points, OrbitEnd::Stalled, arc, &closest, None));
            }
            continue;
        }
        if let (Some(s), Some(l0)) = (psi.as_ref(), level) {
            q = project_to_level(field, s, q, l0, h);
        }
        let taken = h;
        h = (h * factor).min(opts.max_step);

        if !opts.bbox.contains(q) {
            let b = opts.bbox;
            let outside = |x: Vec2| (b.x0 - x.x).max(x.x - b.x1).max(b.y0 - x.y).max(x.y - b.y1);
            let mut exit = land(&dir, p, taken, outside);
            if !b.contains(exit) {
                exit = b.clip_exit(p, exit);
            }
            arc += p.dist(exit);
            points.push(exit);
            return Ok(finish(points, OrbitEnd::BoxExit, arc, &closest, None));
        }
        for (i, c) in opts.capture_points.iter().enumerate() {
            if armed[i] {
                let d = c.dist_to_segment(p, q);
                closest[i] = closest[i].min(d);
                if d < opts.capture_radius {
                    arc += p.dist(*c);
                    points.push(*c);
                    return Ok(finish(points, OrbitEnd::Singular(i), arc, &closest, Some(i)));
                }
            } else if c.dist(q) > 2.0 * opts.capture_radius {
                armed[i] = true;
            }
        }
        if closure_armed {
            let ahead = |x: Vec2| (x - seed).dot(seed_dir);
            if ahead(p) < 0.0 && ahead(q) >= 0.0 && seed.dist(p) < 2.0 * taken + opts.closure_tol {
                let mut hit = land(&dir, p, taken, ahead);
                if let (Some(s), Some(l0)) = (psi.as_ref(), level) {
                    hit = project_to_level(field, s, hit, l0, taken);
                }
                if hit.dist(seed) < opts.closure_tol {
                    arc += p.dist(seed);
                    points.push(seed);
                    return Ok(finish(points, OrbitEnd::Closed, arc, &closest, None));
                }
            }
        } else if q.dist(seed) > 4.0 * opts.closure_tol && arc > 10.0 * opts.closure_tol {
            closure_armed = true;
        }
        arc += taken;
        points.push(q);
        p = q;
    }
}

/// Bisects the step length in `[0, h]` so that the step from `p` lands where
/// `g` changes sign (`g(p) < 0 ≤ g(step(h))`).
fn land<G: Fn(Vec2) -> f64>(dir: &Direction<'_>, p: Vec2, h: f64, g: G) -> Vec2 {
    let (mut lo, mut hi) = (0.0, h);
    let mut best = dopri_step(dir, p, h).0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let q = dopri_step(dir, p, mid).0;
        if g(q) >= 0.0 {
            hi = mid;
            best = q;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * h {
            break;
        }
    }
    best
}

/// One Newton correction towards `ψ = level`, skipped when it would move the
/// point by more than a tenth of the step.
fn project_to_level(field: &PolyVectorField, psi: &Poly, q: Vec2, level: f64, h: f64) -> Vec2 {
    let f = field.eval(q);
    let grad = Vec2::new(-f.y, f.x);
    let g2 = grad.norm_sq();
    if g2 == 0.0 {
        return q;
    }
    let corr = grad * ((psi.eval(q.x, q.y) - level) / g2);
    if corr.norm() < 0.1 * h {
        q - corr
    } else {
        q
    }
}

/// A separatrix of a saddle, tagged by its stability.
#[derive(Debug, Clone, PartialEq)]
pub struct Separatrix {
    pub orbit: Orbit,
    pub stable: bool,
    pub direction: Vec2,
}

/// Eigenvectors `(unstable, stable)` of a trace-free saddle Jacobian.
fn saddle_directions(s: &SingularPoint) -> Result<(Vec2, Vec2), TopologyError> {
    let j = s.jac;
    let det = j.det();
    let tr = j.trace();
    let disc = tr * tr - 4.0 * det;
    if !(det < 0.0) || !(disc > 0.0) {
        return Err(TopologyError::NotASaddle);
    }
    let root = math::sqrt(disc);
    let eig = |mu: f64| {
        let (a, b, c, d) = (j.m[0][0], j.m[0][1], j.m[1][0], j.m[1][1]);
        let v1 = Vec2::new(b, mu - a);
        let v2 = Vec2::new(mu - d, c);
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        v.normalized()
    };
    let unstable = eig(0.5 * (tr + root));
    let stable = eig(0.5 * (tr - root));
    if !unstable.is_finite() || !stable.is_finite() || unstable.cross(stable).abs() < 1e-12 {
        return Err(TopologyError::EigenvectorDegeneracy);
    }
    Ok((unstable, stable))
}

/// The four separatrices of a saddle, launched `offset` away along ± each
/// eigenvector; the stable pair is integrated backward in time. Orbits are
/// returned in counter-clockwise order of their launch directions.
pub fn separatrices(
    field: &PolyVectorField,
    saddle: &SingularPoint,
    offset: f64,
    opts: &StreamlineOptions,
) -> Result<Vec<Separatrix>, TopologyError> {
    if saddle.kind != PointKind::Saddle {
        return Err(TopologyError::NotASaddle);
    }
    let (unstable, stable) = saddle_directions(saddle)?;
    let mut launches = [
        (unstable, false),
        (stable, true),
        (-unstable, false),
        (-stable, true),
    ];
    launches.sort_by(|a, b| a.0.angle().total_cmp(&b.0.angle()));
    for w in 0..4 {
        if launches[w].1 == launches[(w + 1) % 4].1 {
            return Err(TopologyError::EigenvectorDegeneracy);
        }
    }
    let level = field.stream_function().map(|s| s.eval(saddle.location.x, saddle.location.y));
    let own = opts
        .capture_points
        .iter()
        .position(|c| c.dist(saddle.location) <= opts.capture_radius);
    let mut out = Vec::with_capacity(4);
    for (d, is_stable) in launches {
        let o = StreamlineOptions {
            backward: is_stable,
            level,
            ..opts.clone()
        };
        let seed = saddle.location + d * offset;
        let mut orbit = integrate_streamline(field, seed, &o)?;
        orbit.points.insert(0, saddle.location);
        orbit.arc_length += offset;
        orbit.start = own.map_or(OrbitEnd::Seed, OrbitEnd::Singular);
        out.push(Separatrix {
            orbit,
            stable: is_stable,
            direction: d,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureOptions {
    pub search: SearchOptions,
    /// Capture radius as a fraction of the box diameter.
    pub capture_rel: f64,
    /// Separatrix launch offset as a fraction of the box diameter.
    pub offset_rel: f64,
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for SignatureOptions {
    fn default() -> Self {
        Self {
            search: SearchOptions::default(),
            capture_rel: 1e-5,
            offset_rel: 1e-6,
            tol: 1e-9,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Saddle,
    Center,
    /// Degenerate or unresolved zero, tagged with its index when known.
    Degenerate(Option<i32>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureNode {
    pub location: Vec2,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeEnd {
    Node(usize),
    Boundary,
    /// Step limit, stall or near miss.
    Unresolved,
}

/// A separatrix, directed along the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignatureEdge {
    pub from: EdgeEnd,
    pub to: EdgeEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologySignature {
    pub nodes: Vec<SignatureNode>,
    pub edges: Vec<SignatureEdge>,
    /// Number of center regions.
    pub loops: usize,
    pub ambiguous: bool,
    /// Winding along the box boundary, when it could be computed.
    pub index_sum: Option<i32>,
    /// Every traced separatrix, for rendering.
    pub orbits: Vec<Orbit>,
}

impl TopologySignature {
    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    pub fn saddles(&self) -> usize {
        self.count(NodeKind::Saddle)
    }

    pub fn centers(&self) -> usize {
        self.count(NodeKind::Center)
    }

    /// Edges joining two different nodes.
    pub fn connections(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| matches!((e.from, e.to), (EdgeEnd::Node(a), EdgeEnd::Node(b)) if a != b))
            .count()
    }

    /// Edges from a node back to itself.
    pub fn self_loops(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| matches!((e.from, e.to), (EdgeEnd::Node(a), EdgeEnd::Node(b)) if a == b))
            .count()
    }

    pub fn boundary_edges(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.from == EdgeEnd::Boundary || e.to == EdgeEnd::Boundary)
            .count()
    }

    /// Edge endpoints at node `i`, a self-loop counting twice.
    pub fn degree(&self, i: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.from == EdgeEnd::Node(i)) as usize + (e.to == EdgeEnd::Node(i)) as usize)
            .sum()
    }

    /// Sum of the node indices; `None` if one is unknown.
    pub fn node_index_total(&self) -> Option<i32> {
        self.nodes
            .iter()
            .map(|n| match n.kind {
                NodeKind::Saddle => Some(-1),
                NodeKind::Center => Some(1),
                NodeKind::Degenerate(i) => i,
            })
            .sum()
    }
}

/// Builds the separatrix graph of `field` in `bbox`.
///
/// Unstable separatrices give directed edges to whatever captures them.
/// Stable separatrices only contribute the edges that come in from the
/// boundary; the others repeat an unstable edge of another saddle.
pub fn signature(
    field: &PolyVectorField,
    bbox: &Rect,
    opts: &SignatureOptions,
) -> Result<TopologySignature, TopologyError> {
    if !bbox.is_valid() {
        return Err(TopologyError::InvalidBox);
    }
    let points = find_singular_points(field, bbox, &opts.search)?;
    let nodes: Vec<SignatureNode> = points
        .iter()
        .map(|p| SignatureNode {
            location: p.location,
            kind: match p.kind {
                PointKind::Saddle => NodeKind::Saddle,
                PointKind::Center => NodeKind::Center,
                other => NodeKind::Degenerate(other.index()),
            },
        })
        .collect();
    let diam = bbox.diameter();
    let mut sl = StreamlineOptions::for_box(*bbox);
    sl.tol = opts.tol;
    sl.max_steps = opts.max_steps;
    sl.capture_radius = opts.capture_rel * diam;
    sl.capture_points = nodes.iter().map(|n| n.location).collect();

    let mut edges = Vec::new();
    let mut orbits = Vec::new();
    let mut ambiguous = nodes.iter().any(|n| matches!(n.kind, NodeKind::Degenerate(_)));
    for (i, p) in points.iter().enumerate() {
        if p.kind != PointKind::Saddle {
            continue;
        }
        let seps = match separatrices(field, p, opts.offset_rel * diam, &sl) {
            Ok(s) => s,
            Err(TopologyError::StepLimitExceeded { .. }) => {
                ambiguous = true;
                edges.extend([SignatureEdge {
                    from: EdgeEnd::Node(i),
                    to: EdgeEnd::Unresolved,
                }; 4]);
                continue;
            }
            Err(e) => return Err(e),
        };
        for s in seps {
            let end = match (s.orbit.end, s.orbit.ambiguous) {
                (_, true) | (OrbitEnd::Stalled, _) | (OrbitEnd::Closed, _) | (OrbitEnd::Seed, _) => {
                    ambiguous = true;
                    EdgeEnd::Unresolved
                }
                (OrbitEnd::BoxExit, _) => EdgeEnd::Boundary,
                (OrbitEnd::Singular(j), _) => EdgeEnd::Node(j),
            };
            if s.stable {
                if end == EdgeEnd::Boundary || end == EdgeEnd::Unresolved {
                    edges.push(SignatureEdge {
                        from: end,
                        to: EdgeEnd::Node(i),
                    });
                }
            } else {
                edges.push(SignatureEdge {
                    from: EdgeEnd::Node(i),
                    to: end,
                });
            }
            orbits.push(s.orbit);
        }
    }
    edges.sort();
    let index_sum = index_sum(field, bbox, &WindingOptions::default())
        .ok()
        .map(|r| r.winding);
    Ok(TopologySignature {
        loops: nodes.iter().filter(|n| n.kind == NodeKind::Center).count(),
        nodes,
        edges,
        ambiguous,
        index_sum,
        orbits,
    })
}

/// Isomorphism of separatrix graphs: a bijection of nodes preserving kinds
/// that maps the directed edge multiset of `a` onto that of `b`.
pub fn equivalent(a: &TopologySignature, b: &TopologySignature) -> bool {
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() || a.loops != b.loops {
        return false;
    }
    let mut ka: Vec<NodeKind> = a.nodes.iter().map(|n| n.kind).collect();
    let mut kb: Vec<NodeKind> = b.nodes.iter().map(|n| n.kind).collect();
    ka.sort();
    kb.sort();
    if ka != kb {
        return false;
    }
    let target = b.edges.clone();
    let mut target_sorted = target;
    target_sorted.sort();
    let mut map: Vec<Option<usize>> = alloc::vec![None; a.nodes.len()];
    let mut used = alloc::vec![false; b.nodes.len()];
    search(a, b, 0, &mut map, &mut used, &target_sorted)
}

fn search(
    a: &TopologySignature,
    b: &TopologySignature,
    i: usize,
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    target: &[SignatureEdge],
) -> bool {
    if i == a.nodes.len() {
        let m = |e: EdgeEnd| match e {
            EdgeEnd::Node(k) => EdgeEnd::Node(map[k].expect("complete mapping")),
            other => other,
        };
        let mut mapped: Vec<SignatureEdge> = a
            .edges
            .iter()
            .map(|e| SignatureEdge {
                from: m(e.from),
                to: m(e.to),
            })
            .collect();
        mapped.sort();
        return mapped == target;
    }
    for j in 0..b.nodes.len() {
        if !used[j] && b.nodes[j].kind == a.nodes[i].kind {
            used[j] = true;
            map[i] = Some(j);
            if search(a, b, i + 1, map, used, target) {
                return true;
            }
            used[j] = false;
            map[i] = None;
        }
    }
    false
}
