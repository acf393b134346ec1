//! Forward floating-point evaluation of constructions.
//!
//! The symbolic pipeline never touches floats; this module exists to
//! cross-check it. A construction is replayed step by step at concrete
//! mover positions, every intersection branch is taken, and the tracer's
//! positions come back as plain `f64` pairs. Degenerate samples (parallel
//! lines, empty intersections) are skipped and noted rather than failing
//! the whole trace.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::{
    constant_coords, round_half_away, Axis, ConstructionProgram, Expr, GeoDef, RadiusSpec,
};
use crate::poly::rational_to_f64;

/// How far a line/ray mover parameter reaches; segments use [0,1] exactly.
const RAY_SPAN: f64 = 10.0;
const SEED: u64 = 0x10c_e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathKind {
    Full,
    Segment,
    Ray,
}

#[derive(Debug, Clone)]
enum NumObj {
    Point(f64, f64),
    Line {
        anchor: [f64; 2],
        dir: [f64; 2],
        kind: PathKind,
    },
    Circle {
        center: [f64; 2],
        r2: f64,
    },
}

type Scene = HashMap<String, NumObj>;

/// Traced positions plus notes about skipped degenerate samples.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub points: Vec<(f64, f64)>,
    pub notes: Vec<String>,
}

/// Mover parameter values: a uniform grid with three seeded jitters mixed
/// in, `samples` values in total so callers get one point per sample on
/// branch-free constructions.
fn parameter_values(samples: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples);
    let grid = if samples > 3 { samples - 3 } else { samples };
    for i in 0..grid {
        out.push(i as f64 / grid as f64);
    }
    if samples > 3 {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..3 {
            out.push(rng.gen::<f64>());
        }
    }
    out
}

/// Replays the construction at `samples` mover positions and collects the
/// positions of `tracer`. `mover` must be the program's on-path point.
pub(crate) fn trace_tracer(
    program: &ConstructionProgram,
    tracer: &str,
    mover: &str,
    samples: usize,
) -> Trace {
    let mut trace = Trace::default();
    if program.steps.is_empty() || samples == 0 {
        return trace;
    }
    let branch_slots: usize = program
        .steps
        .iter()
        .filter(|(_, d)| matches!(d, GeoDef::Intersection(..)))
        .count();
    let combos = 1u64 << branch_slots.min(6); // ≤ 64 branch combinations

    for u in parameter_values(samples) {
        let mut seen: Vec<(u64, u64)> = Vec::new();
        for branch in 0..combos {
            match eval_scene(program, mover, u, branch) {
                Err(note) => {
                    // one note per sample+failure kind is enough
                    let msg = format!("sample u={u:.4} skipped: {note}");
                    if !trace.notes.contains(&msg) {
                        trace.notes.push(msg);
                    }
                }
                Ok(scene) => match scene.get(tracer) {
                    Some(NumObj::Point(x, y)) => {
                        let key = (x.to_bits(), y.to_bits());
                        // identical across branch bits that played no role
                        if !seen.contains(&key) {
                            seen.push(key);
                            trace.points.push((*x, *y));
                        }
                    }
                    _ => {
                        let msg = format!("sample u={u:.4} skipped: tracer `{tracer}` missing");
                        if !trace.notes.contains(&msg) {
                            trace.notes.push(msg);
                        }
                    }
                },
            }
        }
    }
    trace
}

/// Point positions of one replay, for inspection in tests and reports.
pub(crate) fn scene_points(
    program: &ConstructionProgram,
    mover: &str,
    u: f64,
    branch: u64,
) -> Result<HashMap<String, (f64, f64)>, String> {
    let scene = eval_scene(program, mover, u, branch)?;
    Ok(scene
        .into_iter()
        .filter_map(|(n, o)| match o {
            NumObj::Point(x, y) => Some((n, (x, y))),
            _ => None,
        })
        .collect())
}

fn point_of(scene: &Scene, name: &str) -> (f64, f64) {
    match &scene[name] {
        NumObj::Point(x, y) => (*x, *y),
        _ => unreachable!("kind-checked as a point"),
    }
}

fn line_of(scene: &Scene, name: &str) -> ([f64; 2], [f64; 2]) {
    match &scene[name] {
        NumObj::Line { anchor, dir, .. } => (*anchor, *dir),
        _ => unreachable!("kind-checked as a line"),
    }
}

fn eval_expr(scene: &Scene, e: &Expr) -> f64 {
    match e {
        Expr::Const(c) => rational_to_f64(c),
        Expr::Coord(axis, name) => {
            let (x, y) = point_of(scene, name);
            match axis {
                Axis::X => x,
                Axis::Y => y,
            }
        }
        Expr::Neg(e) => -eval_expr(scene, e),
        Expr::Add(a, b) => eval_expr(scene, a) + eval_expr(scene, b),
        Expr::Sub(a, b) => eval_expr(scene, a) - eval_expr(scene, b),
        Expr::Scale(c, e) => rational_to_f64(c) * eval_expr(scene, e),
    }
}

/// Position on a path for parameter u ∈ [0,1): circles take a full turn
/// starting at the rightmost point; segments cover exactly their span;
/// rays and full lines sweep a ±`RAY_SPAN` window of direction units.
fn param_point(obj: &NumObj, u: f64) -> (f64, f64) {
    match obj {
        NumObj::Circle { center, r2 } => {
            let r = r2.max(0.0).sqrt();
            let th = std::f64::consts::TAU * u;
            (center[0] + r * th.cos(), center[1] + r * th.sin())
        }
        NumObj::Line { anchor, dir, kind } => {
            let s = match kind {
                PathKind::Segment => u,
                PathKind::Ray => RAY_SPAN * u,
                PathKind::Full => RAY_SPAN * (2.0 * u - 1.0),
            };
            (anchor[0] + s * dir[0], anchor[1] + s * dir[1])
        }
        NumObj::Point(..) => unreachable!("points are not paths"),
    }
}

/// Intersection of a line with a circle; `pick_second` selects the larger
/// parameter root. Near-tangency collapses both branches to one point.
fn line_circle(
    anchor: [f64; 2],
    dir: [f64; 2],
    center: [f64; 2],
    r2: f64,
    pick_second: bool,
) -> Result<(f64, f64), String> {
    let ax = anchor[0] - center[0];
    let ay = anchor[1] - center[1];
    let a = dir[0] * dir[0] + dir[1] * dir[1];
    let b = 2.0 * (dir[0] * ax + dir[1] * ay);
    let c = ax * ax + ay * ay - r2;
    if a < 1e-18 {
        return Err("zero direction".to_string());
    }
    let disc = b * b - 4.0 * a * c;
    let tol = 1e-9 * (b * b + 4.0 * a.abs() * c.abs()).max(1.0);
    if disc < -tol {
        return Err("no real intersection".to_string());
    }
    let s = if disc <= tol {
        -b / (2.0 * a)
    } else {
        let root = disc.sqrt();
        if pick_second {
            (-b + root) / (2.0 * a)
        } else {
            (-b - root) / (2.0 * a)
        }
    };
    Ok((anchor[0] + s * dir[0], anchor[1] + s * dir[1]))
}

fn intersect(scene: &Scene, f: &str, g: &str, pick_second: bool) -> Result<(f64, f64), String> {
    match (&scene[f], &scene[g]) {
        (
            NumObj::Line {
                anchor: a, dir: d, ..
            },
            NumObj::Line {
                anchor: b, dir: e, ..
            },
        ) => {
            let den = d[0] * e[1] - d[1] * e[0];
            let scale = (d[0].abs() + d[1].abs()) * (e[0].abs() + e[1].abs());
            if den.abs() <= 1e-12 * scale.max(1.0) {
                return Err(format!("lines `{f}` and `{g}` are parallel"));
            }
            let rx = b[0] - a[0];
            let ry = b[1] - a[1];
            let s = (rx * e[1] - ry * e[0]) / den;
            Ok((a[0] + s * d[0], a[1] + s * d[1]))
        }
        (NumObj::Line { anchor, dir, .. }, NumObj::Circle { center, r2 }) => {
            line_circle(*anchor, *dir, *center, *r2, pick_second)
        }
        (NumObj::Circle { center, r2 }, NumObj::Line { anchor, dir, .. }) => {
            line_circle(*anchor, *dir, *center, *r2, pick_second)
        }
        (
            NumObj::Circle {
                center: c1,
                r2: r2a,
            },
            NumObj::Circle {
                center: c2,
                r2: r2b,
            },
        ) => {
            // radical line: 2(c2−c1)·X = (|c2|²−|c1|²) − (r2b−r2a)
            let nx = 2.0 * (c2[0] - c1[0]);
            let ny = 2.0 * (c2[1] - c1[1]);
            let n2 = nx * nx + ny * ny;
            if n2 <= 1e-18 {
                return Err(format!("circles `{f}` and `{g}` are concentric"));
            }
            let k = (c2[0] * c2[0] + c2[1] * c2[1]) - (c1[0] * c1[0] + c1[1] * c1[1])
                - (r2b - r2a);
            let anchor = [nx * k / n2, ny * k / n2];
            let dir = [-ny, nx];
            line_circle(anchor, dir, *c1, *r2a, pick_second)
        }
        (NumObj::Point(..), _) | (_, NumObj::Point(..)) => {
            unreachable!("kind-checked as paths")
        }
    }
}

fn eval_scene(
    program: &ConstructionProgram,
    mover: &str,
    u: f64,
    branch: u64,
) -> Result<Scene, String> {
    let mut scene: Scene = HashMap::new();
    let mut branch_slot = 0usize;
    for (name, def) in &program.steps {
        let obj = match def {
            GeoDef::FreePoint(a, b) => NumObj::Point(rational_to_f64(a), rational_to_f64(b)),
            GeoDef::DynamicPoint { source } => {
                let (a, b) = constant_coords(program, source)
                    .ok_or_else(|| format!("`{source}` has no fixed coordinates"))?;
                NumObj::Point(
                    rational_to_f64(&round_half_away(&a)),
                    rational_to_f64(&round_half_away(&b)),
                )
            }
            GeoDef::ComputedPoint(ex, ey) => {
                NumObj::Point(eval_expr(&scene, ex), eval_expr(&scene, ey))
            }
            GeoDef::Midpoint(a, b) => {
                let pa = point_of(&scene, a);
                let pb = point_of(&scene, b);
                NumObj::Point((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0)
            }
            GeoDef::PointOnPath(path) => {
                if name != mover {
                    return Err(format!("`{name}` is a second free point on a path"));
                }
                let (x, y) = param_point(&scene[path.as_str()], u);
                NumObj::Point(x, y)
            }
            GeoDef::Intersection(f, g) => {
                let pick_second = (branch >> branch_slot.min(63)) & 1 == 1;
                branch_slot += 1;
                let (x, y) = intersect(&scene, f, g, pick_second)?;
                NumObj::Point(x, y)
            }
            GeoDef::Line(a, b) | GeoDef::Segment(a, b) | GeoDef::Ray(a, b) => {
                let pa = point_of(&scene, a);
                let pb = point_of(&scene, b);
                NumObj::Line {
                    anchor: [pa.0, pa.1],
                    dir: [pb.0 - pa.0, pb.1 - pa.1],
                    kind: match def {
                        GeoDef::Segment(..) => PathKind::Segment,
                        GeoDef::Ray(..) => PathKind::Ray,
                        _ => PathKind::Full,
                    },
                }
            }
            GeoDef::Parallel { through, to } => {
                let p = point_of(&scene, through);
                let (_, dir) = line_of(&scene, to);
                NumObj::Line {
                    anchor: [p.0, p.1],
                    dir,
                    kind: PathKind::Full,
                }
            }
            GeoDef::Perpendicular { through, to } => {
                let p = point_of(&scene, through);
                let (_, dir) = line_of(&scene, to);
                NumObj::Line {
                    anchor: [p.0, p.1],
                    dir: [-dir[1], dir[0]],
                    kind: PathKind::Full,
                }
            }
            GeoDef::PerpendicularBisector(a, b) => {
                let pa = point_of(&scene, a);
                let pb = point_of(&scene, b);
                NumObj::Line {
                    anchor: [(pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0],
                    dir: [pa.1 - pb.1, pb.0 - pa.0],
                    kind: PathKind::Full,
                }
            }
            GeoDef::Circle { center, radius } => {
                let c = point_of(&scene, center);
                let r2 = match radius {
                    RadiusSpec::Length(q) => {
                        let r = rational_to_f64(q);
                        r * r
                    }
                    RadiusSpec::Through(p) => {
                        let pp = point_of(&scene, p);
                        (pp.0 - c.0).powi(2) + (pp.1 - c.1).powi(2)
                    }
                    RadiusSpec::SegmentLength(s) => {
                        let (_, d) = line_of(&scene, s);
                        d[0] * d[0] + d[1] * d[1]
                    }
                };
                NumObj::Circle {
                    center: [c.0, c.1],
                    r2,
                }
            }
            GeoDef::Equation(_) => return Err(format!("`{name}` is not constructible")),
        };
        scene.insert(name.clone(), obj);
    }
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Goal, GoalKind};
    use crate::poly::relative_residual;
    use crate::rational::rat_int;
    use crate::text::parse_poly;
    use crate::vars::VarRegistry;

    fn free(a: i64, b: i64) -> GeoDef {
        GeoDef::FreePoint(rat_int(a), rat_int(b))
    }

    fn circle_midpoint_program() -> ConstructionProgram {
        let mut p = ConstructionProgram::default();
        p.push("C", free(2, 3));
        p.push(
            "c",
            GeoDef::Circle {
                center: "C".into(),
                radius: RadiusSpec::Length(rat_int(4)),
            },
        );
        p.push("P", GeoDef::PointOnPath("c".into()));
        p.push("M", GeoDef::Midpoint("P".into(), "C".into()));
        p.goal = Some(Goal {
            kind: GoalKind::LocusEquation,
            target: "M".into(),
            mover: "P".into(),
        });
        p
    }

    #[test]
    fn parameter_zero_is_the_rightmost_circle_point() {
        let p = circle_midpoint_program();
        let pts = scene_points(&p, "P", 0.0, 0).unwrap();
        let (px, py) = pts["P"];
        assert!((px - 6.0).abs() < 1e-12 && (py - 3.0).abs() < 1e-12);
        let (mx, my) = pts["M"];
        assert!((mx - 4.0).abs() < 1e-12 && (my - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eight_samples_trace_eight_points_on_the_halved_circle() {
        let p = circle_midpoint_program();
        let tr = trace_tracer(&p, "M", "P", 8);
        assert_eq!(tr.points.len(), 8);
        assert!(tr.notes.is_empty());
        // midpoint circle: center (2,3), radius 2
        let reg = VarRegistry::new(vec!["x", "y"]);
        let curve = parse_poly("x^2 - 4x + y^2 - 6y + 9", reg).unwrap();
        for (x, y) in &tr.points {
            assert!(relative_residual(&curve, &[*x, *y]) < 1e-9);
        }
    }

    #[test]
    fn empty_construction_traces_nothing() {
        let tr = trace_tracer(&ConstructionProgram::default(), "M", "P", 8);
        assert!(tr.points.is_empty() && tr.notes.is_empty());
    }

    #[test]
    fn intersection_branches_are_both_taken() {
        let mut p = ConstructionProgram::default();
        p.push("A", free(0, 0));
        p.push("B", free(3, 0));
        p.push(
            "c1",
            GeoDef::Circle {
                center: "A".into(),
                radius: RadiusSpec::Length(rat_int(2)),
            },
        );
        p.push(
            "c2",
            GeoDef::Circle {
                center: "B".into(),
                radius: RadiusSpec::Length(rat_int(2)),
            },
        );
        p.push("P", GeoDef::Intersection("c1".into(), "c2".into()));
        p.push("f", GeoDef::Line("A".into(), "B".into()));
        p.push("D", GeoDef::PointOnPath("f".into()));
        p.push("M", GeoDef::Midpoint("P".into(), "D".into()));
        let tr = trace_tracer(&p, "M", "D", 4);
        // 4 mover positions × 2 intersection branches
        assert_eq!(tr.points.len(), 8);
        let above = tr.points.iter().filter(|(_, y)| *y > 0.0).count();
        assert_eq!(above, 4, "both circle branches must appear");
        // P = (3/2, ±√7/2), D = (d, 0) → M.y = ±√7/4
        let expect = (7.0f64).sqrt() / 4.0;
        for (_, y) in &tr.points {
            assert!((y.abs() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn parallel_line_intersections_are_skipped_with_note() {
        let mut p = ConstructionProgram::default();
        p.push("A", free(0, 0));
        p.push("B", free(1, 0));
        p.push("C", free(0, 1));
        p.push("f", GeoDef::Line("A".into(), "B".into()));
        p.push(
            "g",
            GeoDef::Parallel {
                through: "C".into(),
                to: "f".into(),
            },
        );
        p.push("P", GeoDef::Intersection("f".into(), "g".into()));
        p.push("D", GeoDef::PointOnPath("f".into()));
        p.push("M", GeoDef::Midpoint("P".into(), "D".into()));
        let tr = trace_tracer(&p, "M", "D", 5);
        assert!(tr.points.is_empty());
        assert!(!tr.notes.is_empty());
        assert!(tr.notes[0].contains("parallel"));
    }

    #[test]
    fn segment_movers_stay_between_the_endpoints() {
        let mut p = ConstructionProgram::default();
        p.push("A", free(0, 0));
        p.push("B", free(10, 0));
        p.push("s", GeoDef::Segment("A".into(), "B".into()));
        p.push("D", GeoDef::PointOnPath("s".into()));
        let tr = trace_tracer(&p, "D", "D", 12);
        assert_eq!(tr.points.len(), 12);
        for (x, y) in &tr.points {
            assert!((0.0..=10.0).contains(x), "x = {x} escaped the segment");
            assert_eq!(*y, 0.0);
        }
    }
}
