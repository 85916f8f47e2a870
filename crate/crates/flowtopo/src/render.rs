//! SVG and CSV pictures of a field in a box.
//!
//! The SVG uses a fixed `1000 × 1000` viewbox with `y` pointing up in world
//! coordinates; the mapping is written into a comment at the top of the file.

use std::fmt::Write as _;

use flowtopo_core::topology::NodeKind;
use flowtopo_core::{
    integrate_streamline, Orbit, PolyVectorField, Rect, StreamlineOptions, TopologySignature, Vec2,
};

use crate::format::num;

pub const VIEW: f64 = 1000.0;

/// Linear world-to-view map of a box onto the viewbox.
#[derive(Debug, Clone, Copy)]
pub struct ViewMap {
    pub bbox: Rect,
    pub sx: f64,
    pub sy: f64,
}

impl ViewMap {
    pub fn new(bbox: Rect) -> Self {
        Self {
            bbox,
            sx: VIEW / bbox.width(),
            sy: VIEW / bbox.height(),
        }
    }

    pub fn apply(&self, p: Vec2) -> (f64, f64) {
        ((p.x - self.bbox.x0) * self.sx, (self.bbox.y1 - p.y) * self.sy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Separatrix,
    Streamline,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Separatrix => "separatrix",
            Role::Streamline => "streamline",
        }
    }
}

pub struct Picture {
    pub orbits: Vec<(Role, Orbit)>,
    pub nodes: Vec<(Vec2, NodeKind)>,
    /// Seeds whose streamline hit the step limit.
    pub dropped: usize,
}

/// Separatrices of `sig` plus forward streamlines from an `grid × grid`
/// lattice of cell centres.
pub fn picture(field: &PolyVectorField, bbox: &Rect, sig: &TopologySignature, grid: usize) -> Picture {
    let mut orbits: Vec<(Role, Orbit)> = sig.orbits.iter().map(|o| (Role::Separatrix, o.clone())).collect();
    let mut opts = StreamlineOptions::for_box(*bbox);
    opts.capture_points = sig.nodes.iter().map(|n| n.location).collect();
    opts.max_steps = 20_000;
    let mut dropped = 0;
    for i in 0..grid {
        for j in 0..grid {
            let seed = Vec2::new(
                bbox.x0 + (i as f64 + 0.5) * bbox.width() / grid as f64,
                bbox.y0 + (j as f64 + 0.5) * bbox.height() / grid as f64,
            );
            if field.eval(seed).norm() == 0.0 {
                continue;
            }
            match integrate_streamline(field, seed, &opts) {
                Ok(o) => orbits.push((Role::Streamline, o)),
                Err(_) => dropped += 1,
            }
        }
    }
    Picture {
        orbits,
        nodes: sig.nodes.iter().map(|n| (n.location, n.kind)).collect(),
        dropped,
    }
}

fn node_color(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Saddle => "#d62728",
        NodeKind::Center => "#1f77b4",
        NodeKind::Degenerate(_) => "#ff7f0e",
    }
}

pub fn node_name(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Saddle => "saddle",
        NodeKind::Center => "center",
        NodeKind::Degenerate(_) => "degenerate",
    }
}

pub fn svg(pic: &Picture, bbox: &Rect) -> String {
    let map = ViewMap::new(*bbox);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        "<!-- world-to-view: X = (x - {}) * {}, Y = ({} - y) * {}; box [{}, {}] x [{}, {}] -->",
        num(bbox.x0),
        num(map.sx),
        num(bbox.y1),
        num(map.sy),
        num(bbox.x0),
        num(bbox.x1),
        num(bbox.y0),
        num(bbox.y1)
    );
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 1000" width="1000" height="1000">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="1000" height="1000" fill="white" stroke="black"/>"#);
    for (role, orbit) in &pic.orbits {
        if orbit.points.len() < 2 {
            continue;
        }
        let (stroke, width) = match role {
            Role::Separatrix => ("#000000", "2"),
            Role::Streamline => ("#9a9a9a", "1"),
        };
        let mut d = String::new();
        for (i, p) in orbit.points.iter().enumerate() {
            let (x, y) = map.apply(*p);
            let _ = write!(d, "{}{:.3},{:.3}", if i == 0 { "M" } else { " L" }, x, y);
        }
        let _ = writeln!(
            s,
            r#"<path class="{}" d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
            role.name()
        );
    }
    for (p, kind) in &pic.nodes {
        let (x, y) = map.apply(*p);
        let _ = writeln!(
            s,
            r#"<circle class="{}" cx="{x:.3}" cy="{y:.3}" r="7" fill="{}"/>"#,
            node_name(*kind),
            node_color(*kind)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Columns: `orbit,role,point,x,y`.
pub fn csv(pic: &Picture) -> String {
    let mut s = String::from("orbit,role,point,x,y\n");
    for (k, (role, orbit)) in pic.orbits.iter().enumerate() {
        for (i, p) in orbit.points.iter().enumerate() {
            let _ = writeln!(s, "{k},{},{i},{},{}", role.name(), num(p.x), num(p.y));
        }
    }
    s
}
