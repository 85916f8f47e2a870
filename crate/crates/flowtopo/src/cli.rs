//! Command line: argument parsing, validation into a [`RunConfig`], and the
//! subcommands.
//!
//! Exit codes: `0` success, `1` error (bad input, numerical failure, refuted
//! prediction), `2` the analysis declined to answer (case S5, a degenerate
//! zero that is not simple, an indeterminate decision, an inconclusive check).

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use flowtopo_core::topology::{EdgeEnd, NodeKind};
use flowtopo_core::{
    check_generic_membership, find_singular_points, integrate_streamline, signature, verify,
    winding_index, BifurcationError, CaseLabel, Decision, IndexError, OrbitEnd, PointKind,
    PolyVectorField, Rect, SearchOptions, SignatureOptions, SingularError, SingularPoint,
    StreamlineOptions, TopologyError, Vec2, Verdict, VerifyOptions, WindingOptions,
};

use crate::fieldfile::{parse_field_file, FieldFile};
use crate::format::{num, opt_int, opt_num, point, signed_index, yes_no};
use crate::render;

#[derive(Debug, Parser)]
#[command(name = "flowtopo", version, about = "Degenerate singular points and local bifurcations of planar incompressible polynomial flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Field or family file.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Treat a divergence violation as an error instead of a warning.
    #[arg(long)]
    pub strict: bool,
    /// For a family file, analyze u0 + (t - t0) u1 at this time (default t0).
    #[arg(long, allow_negative_numbers = true)]
    pub time: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoxArg {
    /// Analysis box.
    #[arg(long = "box", num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true)]
    pub bbox: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a file and report divergence and symmetry.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Locate and classify the singular points in a box.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bbox: BoxArg,
        /// Residual tolerance of the root search.
        #[arg(long)]
        tol: Option<f64>,
        /// Relative threshold on det Du for degeneracy.
        #[arg(long)]
        det_tol: Option<f64>,
    },
    /// Winding number of the field along a circle.
    Index {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true, required = true)]
        center: Vec<f64>,
        #[arg(long, default_value_t = 1e-2)]
        radius: f64,
    },
    /// Predict and verify the local bifurcation of a family at a point.
    Bifurcate {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true, required = true)]
        point: Vec<f64>,
        /// Comma-separated parameter values; sorted by |eps| descending.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eps_ladder: Option<Vec<f64>>,
        /// Factor applied to every ladder value.
        #[arg(long, default_value_t = 1.0)]
        eps_scale: f64,
        /// Threshold for lambda0 and the genericity quantity.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Integrate one streamline.
    Trace {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bbox: BoxArg,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true, required = true)]
        seed: Vec<f64>,
        /// Follow -u instead of u.
        #[arg(long)]
        backward: bool,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Separatrix graph of the field in a box.
    Signature {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bbox: BoxArg,
    },
    /// Draw streamlines and separatrices to SVG, with the polylines as CSV.
    Render {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bbox: BoxArg,
        /// SVG output path.
        #[arg(long)]
        out: PathBuf,
        /// CSV output path (default: the SVG path with a .csv extension).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Streamline seeds per box side.
        #[arg(long, default_value_t = 10)]
        grid: usize,
    },
}

/// Validated settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub input: PathBuf,
    pub bbox: Rect,
    pub format: OutputFormat,
    pub strict: bool,
    pub time: Option<f64>,
    pub search: SearchOptions,
    pub verify: VerifyOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Check,
    Classify,
    Index { center: Vec2, radius: f64 },
    Bifurcate { point: Vec2 },
    Trace { seed: Vec2, backward: bool, max_steps: Option<usize> },
    Signature,
    Render { svg: PathBuf, csv: PathBuf, grid: usize },
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        bail!("--{name} must be a positive finite number, got {x}")
    }
}

fn to_box(b: &BoxArg) -> Result<Rect> {
    let Some(v) = &b.bbox else {
        return Ok(Rect::new(-1.0, -1.0, 1.0, 1.0));
    };
    let r = Rect::new(v[0], v[1], v[2], v[3]);
    if !r.is_valid() || v.iter().any(|x| !x.is_finite()) {
        bail!("--box needs x0 < x1 and y0 < y1");
    }
    Ok(r)
}

fn to_point(name: &str, v: &[f64]) -> Result<Vec2> {
    let p = Vec2::new(v[0], v[1]);
    if !p.is_finite() {
        bail!("--{name} must be finite");
    }
    Ok(p)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<RunConfig> {
        let mut search = SearchOptions::default();
        let mut verify = VerifyOptions::default();
        let unit = BoxArg { bbox: None };
        let (common, bbox, task) = match cli.command {
            Command::Check { common } => (common, unit, Task::Check),
            Command::Classify { common, bbox, tol, det_tol } => {
                if let Some(t) = tol {
                    search.res_tol = positive("tol", t)?;
                }
                if let Some(t) = det_tol {
                    search.det_tol = positive("det-tol", t)?;
                }
                (common, bbox, Task::Classify)
            }
            Command::Index { common, center, radius } => {
                let task = Task::Index {
                    center: to_point("center", &center)?,
                    radius: positive("radius", radius)?,
                };
                (common, unit, task)
            }
            Command::Bifurcate { common, point, eps_ladder, eps_scale, tol } => {
                if let Some(mut ladder) = eps_ladder {
                    if ladder.is_empty() || ladder.iter().any(|e| !e.is_finite() || *e == 0.0) {
                        bail!("--eps-ladder values must be nonzero and finite");
                    }
                    ladder.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
                    verify.eps_ladder = ladder;
                }
                verify.eps_scale = positive("eps-scale", eps_scale)?;
                if let Some(t) = tol {
                    verify.decision_tol = positive("tol", t)?;
                }
                (common, unit, Task::Bifurcate { point: to_point("point", &point)? })
            }
            Command::Trace { common, bbox, seed, backward, max_steps } => {
                if max_steps == Some(0) {
                    bail!("--max-steps must be positive");
                }
                let task = Task::Trace {
                    seed: to_point("seed", &seed)?,
                    backward,
                    max_steps,
                };
                (common, bbox, task)
            }
            Command::Signature { common, bbox } => (common, bbox, Task::Signature),
            Command::Render { common, bbox, out, csv, grid } => {
                let csv = csv.unwrap_or_else(|| out.with_extension("csv"));
                if csv == out {
                    bail!("--csv and --out name the same file");
                }
                (common, bbox, Task::Render { svg: out, csv, grid })
            }
        };
        if let Some(t) = common.time {
            if !t.is_finite() {
                bail!("--time must be finite");
            }
        }
        Ok(RunConfig {
            task,
            input: common.file,
            bbox: to_box(&bbox)?,
            format: common.format,
            strict: common.strict,
            time: common.time,
            search,
            verify,
        })
    }
}

/// How a successful run ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Done,
    /// The analysis declined to answer; the reason was already printed.
    Refused,
}

impl Status {
    pub fn code(&self) -> u8 {
        match self {
            Status::Done => 0,
            Status::Refused => 2,
        }
    }
}

/// Loads the input, reports divergence, and runs the task. Results go to
/// `out`, warnings and refusals to `diag`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, diag: &mut dyn Write) -> Result<Status> {
    let file = parse_field_file(&cfg.input)?;
    for (tag, rep) in file.divergence() {
        if !rep.ok {
            let (i, j) = rep.worst_monomial.unwrap_or((0, 0));
            let msg = format!(
                "{tag} is not divergence-free: coefficient of x^{i} y^{j} in the divergence is {}",
                num(rep.worst_violation)
            );
            if cfg.strict {
                bail!(msg);
            }
            writeln!(diag, "warning: {msg}")?;
        }
    }
    match &cfg.task {
        Task::Check => check(cfg, &file, out),
        Task::Classify => classify(cfg, &file, out, diag),
        Task::Index { center, radius } => index(cfg, &file, *center, *radius, out),
        Task::Bifurcate { point } => bifurcate(cfg, &file, *point, out, diag),
        Task::Trace { seed, backward, max_steps } => trace(cfg, &file, *seed, *backward, *max_steps, out),
        Task::Signature => signature_cmd(cfg, &file, out, diag),
        Task::Render { svg, csv, grid } => render_cmd(cfg, &file, svg, csv, *grid, out, diag),
    }
}

fn check(cfg: &RunConfig, file: &FieldFile, out: &mut dyn Write) -> Result<Status> {
    let parts: Vec<(&str, PolyVectorField)> = match file {
        FieldFile::Field { field, .. } => vec![("u", field.clone())],
        FieldFile::Family { family, .. } => vec![("u0", family.u0.clone()), ("u1", family.u1.clone())],
    };
    match cfg.format {
        OutputFormat::Csv => {
            writeln!(out, "component,degree,divergence_free,worst_violation,antisymmetric,reflectional")?;
            for (tag, f) in &parts {
                let rep = f.check_divergence_free();
                writeln!(
                    out,
                    "{tag},{},{},{},{},{}",
                    f.max_degree(),
                    yes_no(rep.ok),
                    num(rep.worst_violation),
                    yes_no(f.check_antisymmetric(Vec2::ZERO)),
                    yes_no(f.check_reflectional(Vec2::ZERO))
                )?;
            }
        }
        OutputFormat::Text => {
            let kind = if file.family().is_some() { "family" } else { "field" };
            writeln!(out, "{kind} {}", file.name())?;
            if let Some(fam) = file.family() {
                writeln!(out, "t0 {}", num(fam.t0))?;
            }
            for (tag, f) in &parts {
                let rep = f.check_divergence_free();
                writeln!(
                    out,
                    "{tag}: degree {} divergence-free {} worst-violation {} antisymmetric {} reflectional {}",
                    f.max_degree(),
                    yes_no(rep.ok),
                    num(rep.worst_violation),
                    yes_no(f.check_antisymmetric(Vec2::ZERO)),
                    yes_no(f.check_reflectional(Vec2::ZERO))
                )?;
            }
        }
    }
    Ok(Status::Done)
}

/// Why the analysis cannot answer at `p`, grouped by reason.
fn refusal_of(p: &SingularPoint) -> Option<&'static str> {
    match p.kind {
        PointKind::Degenerate(d) if d.case_label == CaseLabel::S5 => {
            Some("case S5: lambda^2 k + alpha beta vanishes, the index needs higher-order terms")
        }
        PointKind::Unresolved => Some("degenerate zero that is not simple or could not be resolved"),
        _ => None,
    }
}

fn classify(cfg: &RunConfig, file: &FieldFile, out: &mut dyn Write, diag: &mut dyn Write) -> Result<Status> {
    let field = file.field_at(cfg.time);
    let pts = find_singular_points(&field, &cfg.bbox, &cfg.search)?;
    match cfg.format {
        OutputFormat::Csv => {
            writeln!(out, "x,y,kind,case,index,alpha,beta,lambda,k,n,residual,uncertainty")?;
            for p in &pts {
                let (case, a, b, l, k, n) = match p.kind {
                    PointKind::Degenerate(d) => (
                        d.case_label.to_string(),
                        num(d.alpha),
                        num(d.beta),
                        num(d.lambda),
                        d.k.to_string(),
                        d.n.to_string(),
                    ),
                    _ => Default::default(),
                };
                writeln!(
                    out,
                    "{},{},{},{case},{},{a},{b},{l},{k},{n},{},{}",
                    num(p.location.x),
                    num(p.location.y),
                    p.kind.name(),
                    opt_int(p.kind.index()),
                    num(p.residual),
                    num(p.uncertainty)
                )?;
            }
        }
        OutputFormat::Text => {
            if pts.is_empty() {
                writeln!(out, "no singular points in the box")?;
            }
            for p in &pts {
                let idx = signed_index(p.kind.index());
                match p.kind {
                    PointKind::Degenerate(d) => writeln!(
                        out,
                        "{} degenerate {} index={} alpha={} beta={} lambda={} k={} n={}",
                        point(p.location),
                        d.case_label,
                        d.index.value().map_or("?".into(), |v| v.to_string()),
                        num(d.alpha),
                        num(d.beta),
                        num(d.lambda),
                        d.k,
                        d.n
                    )?,
                    _ => writeln!(out, "{} {} index={idx}", point(p.location), p.kind.name())?,
                }
            }
        }
    }
    let mut reasons: Vec<(&str, Vec2, usize)> = Vec::new();
    for p in &pts {
        if let Some(why) = refusal_of(p) {
            match reasons.iter_mut().find(|r| r.0 == why) {
                Some(r) => r.2 += 1,
                None => reasons.push((why, p.location, 1)),
            }
        }
    }
    for (why, at, count) in &reasons {
        let more = if *count > 1 { format!(" and {} more", count - 1) } else { String::new() };
        writeln!(diag, "refused: {why} (at {}{more})", point(*at))?;
    }
    Ok(if reasons.is_empty() { Status::Done } else { Status::Refused })
}

fn index(cfg: &RunConfig, file: &FieldFile, center: Vec2, radius: f64, out: &mut dyn Write) -> Result<Status> {
    let field = file.field_at(cfg.time);
    let r = winding_index(&field, center, radius, &WindingOptions::default()).map_err(|e| match e {
        IndexError::ZeroOnCurve { .. } => anyhow!("zero-on-curve: {e}"),
        other => anyhow!(other),
    })?;
    match cfg.format {
        OutputFormat::Csv => {
            writeln!(out, "center_x,center_y,radius,index,min_magnitude,samples")?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                num(center.x),
                num(center.y),
                num(radius),
                r.winding,
                num(r.min_field_magnitude_on_curve),
                r.samples_used
            )?;
        }
        OutputFormat::Text => {
            writeln!(out, "index {}", r.winding)?;
            writeln!(out, "circle center {} radius {}", point(center), num(radius))?;
            writeln!(out, "min |u| on curve {}", num(r.min_field_magnitude_on_curve))?;
            writeln!(out, "samples {}", r.samples_used)?;
        }
    }
    Ok(Status::Done)
}

fn bifurcate(
    cfg: &RunConfig,
    file: &FieldFile,
    p0: Vec2,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<Status> {
    let Some(family) = file.family() else {
        bail!("bifurcate needs a family file with u0 and u1 blocks");
    };
    let rep = match verify(family, p0, &cfg.verify) {
        Ok(rep) => rep,
        Err(e) => {
            let why = match &e {
                BifurcationError::UnsupportedCase(CaseLabel::S5) => {
                    Some("case S5 is indeterminate: the index needs higher-order terms".to_string())
                }
                BifurcationError::UnsupportedCase(label) => {
                    Some(format!("case {label} is outside the supported bifurcation theory"))
                }
                BifurcationError::Indeterminate => Some(e.to_string()),
                BifurcationError::Singular(SingularError::NotSimple) => Some(e.to_string()),
                _ => None,
            };
            return match why {
                Some(why) => {
                    writeln!(diag, "refused: {why}")?;
                    Ok(Status::Refused)
                }
                None => Err(e.into()),
            };
        }
    };
    let d = &rep.degeneracy;
    let pr = &rep.prediction;
    let membership = check_generic_membership(family, p0);
    match cfg.format {
        OutputFormat::Csv => {
            writeln!(
                out,
                "record,label,eps,exponent,coefficient,type,roots,saddles,centers,index_sum,asymptotic_error"
            )?;
            writeln!(out, "decision,{},,,,{},,,,,", pr.decision, verdict_word(&rep.verdict))?;
            for b in &pr.branches {
                writeln!(
                    out,
                    "branch,{},,{}/{},{},{},,,,,",
                    b.label.name(),
                    b.exponent.0,
                    b.exponent.1,
                    opt_num(b.coefficient),
                    b.kind.name()
                )?;
            }
            for r in &rep.rungs {
                writeln!(
                    out,
                    "rung,,{},,,,{},{},{},{},{}",
                    num(r.eps),
                    r.roots.len(),
                    r.saddles,
                    r.centers,
                    opt_int(r.index_sum),
                    opt_num(r.asymptotic_error)
                )?;
            }
        }
        OutputFormat::Text => {
            writeln!(out, "point {}", point(rep.point))?;
            writeln!(
                out,
                "degeneracy {} index={} alpha={} beta={} lambda={} k={} n={}",
                d.case_label,
                d.index.value().map_or("?".into(), |v| v.to_string()),
                num(d.alpha),
                num(d.beta),
                num(d.lambda),
                d.k,
                d.n
            )?;
            writeln!(out, "frame e1={} e2={}", point(d.frame.e1), point(d.frame.e2))?;
            let p = &rep.perturbation;
            writeln!(
                out,
                "perturbation lambda0={} lambda1={} lambda2={} lambda3={}",
                num(p.lambda0),
                num(p.lambda1),
                num(p.lambda2),
                num(p.lambda3)
            )?;
            writeln!(out, "decision {}", pr.decision)?;
            if let Some(regime) = pr.regime {
                // rungs are at t = t0 - eps
                let side = match pr.side {
                    Some(s) if s > 0 => "three zeros for t < t0",
                    Some(_) => "three zeros for t > t0",
                    None => "side unknown",
                };
                writeln!(out, "regime {} {side}", regime.name())?;
            }
            if pr.table_orientation_disagrees {
                writeln!(out, "note: the three zeros sit on the side where the genericity quantity is negative")?;
            }
            writeln!(
                out,
                "symmetry {} generic-subset {}{}",
                membership.symmetry.name(),
                yes_no(membership.in_generic_subset),
                if membership.failed_conditions.is_empty() {
                    String::new()
                } else {
                    let names: Vec<&str> = membership.failed_conditions.iter().map(|c| c.name()).collect();
                    format!(" failed {}", names.join(","))
                }
            )?;
            if !pr.branches.is_empty() {
                writeln!(out, "branches")?;
                writeln!(out, "  {:<6} {:<9} {:<20} type", "label", "exponent", "coefficient")?;
                for b in &pr.branches {
                    writeln!(
                        out,
                        "  {:<6} {:<9} {:<20} {}",
                        b.label.name(),
                        format!("{}/{}", b.exponent.0, b.exponent.1),
                        b.coefficient.map_or("-".into(), num),
                        b.kind.name()
                    )?;
                }
            }
            writeln!(out, "verification at t = t0 - eps")?;
            writeln!(
                out,
                "  {:<20} {:<6} {:<8} {:<8} {:<10} asymptotic-error",
                "eps", "roots", "saddles", "centers", "index-sum"
            )?;
            for r in &rep.rungs {
                writeln!(
                    out,
                    "  {:<20} {:<6} {:<8} {:<8} {:<10} {}",
                    num(r.eps),
                    r.roots.len(),
                    r.saddles,
                    r.centers,
                    r.index_sum.map_or("?".into(), |v| v.to_string()),
                    r.asymptotic_error.map_or("-".into(), num)
                )?;
            }
            writeln!(out, "verdict {}", rep.verdict)?;
        }
    }
    match rep.verdict {
        Verdict::Confirmed => Ok(Status::Done),
        Verdict::Refuted(why) => bail!("prediction {} refuted: {why}", pr.decision),
        Verdict::Inconclusive(why) => {
            writeln!(diag, "refused: verification inconclusive ({why})")?;
            Ok(Status::Refused)
        }
    }
    .map(|s| {
        if pr.decision == Decision::Indeterminate {
            Status::Refused
        } else {
            s
        }
    })
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::Confirmed => "confirmed",
        Verdict::Refuted(_) => "refuted",
        Verdict::Inconclusive(_) => "inconclusive",
    }
}

fn end_name(e: OrbitEnd) -> String {
    match e {
        OrbitEnd::Seed => "seed".into(),
        OrbitEnd::Singular(i) => format!("singular-{i}"),
        OrbitEnd::BoxExit => "box-exit".into(),
        OrbitEnd::Closed => "closed".into(),
        OrbitEnd::Stalled => "stalled".into(),
    }
}

fn trace(
    cfg: &RunConfig,
    file: &FieldFile,
    seed: Vec2,
    backward: bool,
    max_steps: Option<usize>,
    out: &mut dyn Write,
) -> Result<Status> {
    let field = file.field_at(cfg.time);
    let zeros = find_singular_points(&field, &cfg.bbox, &cfg.search)?;
    let mut opts = StreamlineOptions::for_box(cfg.bbox);
    opts.capture_points = zeros.iter().map(|z| z.location).collect();
    opts.backward = backward;
    if let Some(m) = max_steps {
        opts.max_steps = m;
    }
    let orbit = integrate_streamline(&field, seed, &opts).map_err(|e| match e {
        TopologyError::SeedOutside => anyhow!("seed {} lies outside the box", point(seed)),
        other => anyhow!(other),
    })?;
    match cfg.format {
        OutputFormat::Csv => {
            writeln!(out, "i,x,y")?;
            for (i, p) in orbit.points.iter().enumerate() {
                writeln!(out, "{i},{},{}", num(p.x), num(p.y))?;
            }
        }
        OutputFormat::Text => {
            writeln!(out, "start {}", end_name(orbit.start))?;
            let end = match orbit.end {
                OrbitEnd::Singular(i) => format!("{} at {}", end_name(orbit.end), point(opts.capture_points[i])),
                e => end_name(e),
            };
            writeln!(out, "end {end}")?;
            writeln!(out, "ambiguous {}", yes_no(orbit.ambiguous))?;
            writeln!(out, "arc-length {}", num(orbit.arc_length))?;
            writeln!(out, "points {}", orbit.points.len())?;
            for p in &orbit.points {
                writeln!(out, "{} {}", num(p.x), num(p.y))?;
            }
        }
    }
    Ok(Status::Done)
}

fn edge_end(e: EdgeEnd) -> String {
    match e {
        EdgeEnd::Node(i) => i.to_string(),
        EdgeEnd::Boundary => "boundary".into(),
        EdgeEnd::Unresolved => "unresolved".into(),
    }
}

fn signature_cmd(cfg: &RunConfig, file: &FieldFile, out: &mut dyn Write, diag: &mut dyn Write) -> Result<Status> {
    let field = file.field_at(cfg.time);
    let opts = SignatureOptions {
        search: cfg.search,
        ..SignatureOptions::default()
    };
    let sig = signature(&field, &cfg.bbox, &opts)?;
    match cfg.format {
        OutputFormat::Csv => {
            writeln!(out, "record,id,kind,x,y,from,to")?;
            for (i, n) in sig.nodes.iter().enumerate() {
                writeln!(
                    out,
                    "node,{i},{},{},{},,",
                    render::node_name(n.kind),
                    num(n.location.x),
                    num(n.location.y)
                )?;
            }
            for (i, e) in sig.edges.iter().enumerate() {
                writeln!(out, "edge,{i},,,,{},{}", edge_end(e.from), edge_end(e.to))?;
            }
        }
        OutputFormat::Text => {
            writeln!(
                out,
                "nodes {} saddles {} centers {} degenerate {}",
                sig.nodes.len(),
                sig.saddles(),
                sig.centers(),
                sig.nodes.len() - sig.saddles() - sig.centers()
            )?;
            for (i, n) in sig.nodes.iter().enumerate() {
                let idx = match n.kind {
                    NodeKind::Saddle => Some(-1),
                    NodeKind::Center => Some(1),
                    NodeKind::Degenerate(i) => i,
                };
                writeln!(
                    out,
                    "node {i} {} {} index={}",
                    render::node_name(n.kind),
                    point(n.location),
                    signed_index(idx)
                )?;
            }
            for e in &sig.edges {
                writeln!(out, "edge {} -> {}", edge_end(e.from), edge_end(e.to))?;
            }
            writeln!(
                out,
                "connections {} self-loops {} boundary-edges {} loops {}",
                sig.connections(),
                sig.self_loops(),
                sig.boundary_edges(),
                sig.loops
            )?;
            writeln!(out, "index-sum {}", signed_index(sig.index_sum))?;
            writeln!(out, "ambiguous {}", yes_no(sig.ambiguous))?;
        }
    }
    if sig.ambiguous {
        writeln!(diag, "warning: some separatrices passed close to a zero without being captured")?;
    }
    if sig.index_sum.is_some() && sig.node_index_total() != sig.index_sum {
        writeln!(diag, "warning: node indices do not add up to the winding along the box")?;
    }
    Ok(Status::Done)
}

fn render_cmd(
    cfg: &RunConfig,
    file: &FieldFile,
    svg_path: &Path,
    csv_path: &Path,
    grid: usize,
    out: &mut dyn Write,
    diag: &mut dyn Write,
) -> Result<Status> {
    let field = file.field_at(cfg.time);
    let opts = SignatureOptions {
        search: cfg.search,
        ..SignatureOptions::default()
    };
    let sig = signature(&field, &cfg.bbox, &opts)?;
    let pic = render::picture(&field, &cfg.bbox, &sig, grid);
    if pic.dropped > 0 {
        writeln!(diag, "warning: {} streamlines hit the step limit and were dropped", pic.dropped)?;
    }
    std::fs::write(svg_path, render::svg(&pic, &cfg.bbox))
        .with_context(|| format!("writing {}", svg_path.display()))?;
    std::fs::write(csv_path, render::csv(&pic)).with_context(|| format!("writing {}", csv_path.display()))?;
    writeln!(
        out,
        "wrote {} and {} ({} orbits, {} nodes)",
        svg_path.display(),
        csv_path.display(),
        pic.orbits.len(),
        pic.nodes.len()
    )?;
    Ok(Status::Done)
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, diag: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(diag, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg, out, diag));
    match result {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(diag, "error: {e:#}");
            1
        }
    }
}
