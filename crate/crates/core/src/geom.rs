//! Ruler-and-compass construction programs and their polynomial translation.
//!
//! A construction is a straight-line sequence of named steps. Every
//! point-valued step contributes two fresh coordinate variables and binding
//! equations; lines, segments, rays and circles are definitional and turn
//! into incidence polynomials only where a point is required to meet them.
//! The translation is exact — rational inputs stay rational — so the system
//! can be handed to elimination without any numeric loss.
//!
//! `validate` walks a program and reports everything questionable as
//! findings (it never fails); `algebraize` performs the translation and
//! returns the first hard error instead.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_traits::Signed;
use thiserror::Error;

use crate::poly::{MultiPoly, PolyError};
use crate::rational::Rational;
use crate::vars::VarRegistry;

/// Which coordinate of a point an expression refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Affine coordinate expression, as written in computed points like
/// `B = (10 - y(A), 0)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Rational),
    Coord(Axis, String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Scale(Rational, Box<Expr>),
}

impl Expr {
    fn collect_refs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Const(_) => {}
            Expr::Coord(_, name) => out.push(name),
            Expr::Neg(e) | Expr::Scale(_, e) => e.collect_refs(out),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.collect_refs(out);
                b.collect_refs(out);
            }
        }
    }
}

/// How a circle's radius is given.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiusSpec {
    /// Circle through this point.
    Through(String),
    /// Fixed rational radius.
    Length(Rational),
    /// Radius equal to the length of a named segment.
    SegmentLength(String),
}

/// One construction step. Names in the variants refer to earlier steps.
#[derive(Debug, Clone, PartialEq)]
pub enum GeoDef {
    FreePoint(Rational, Rational),
    /// Integer-snapped copy of another point; coordinates are rounded at
    /// translation time, so the copy enters the system with integer values.
    DynamicPoint { source: String },
    ComputedPoint(Expr, Expr),
    /// A point constrained to a one-dimensional path; the usual mover.
    PointOnPath(String),
    Midpoint(String, String),
    /// Both intersection points satisfy the system — no branch is chosen.
    Intersection(String, String),
    Line(String, String),
    Segment(String, String),
    Ray(String, String),
    Parallel { through: String, to: String },
    Perpendicular { through: String, to: String },
    PerpendicularBisector(String, String),
    Circle { center: String, radius: RadiusSpec },
    /// A curve handed over as a bare formula. Recorded so tooling can name
    /// what it saw, but there is nothing to construct — always rejected.
    Equation(String),
}

impl GeoDef {
    pub fn kind_name(&self) -> &'static str {
        match self {
            GeoDef::FreePoint(..) => "point",
            GeoDef::DynamicPoint { .. } => "dynamic point",
            GeoDef::ComputedPoint(..) => "computed point",
            GeoDef::PointOnPath(..) => "point on path",
            GeoDef::Midpoint(..) => "midpoint",
            GeoDef::Intersection(..) => "intersection",
            GeoDef::Line(..) => "line",
            GeoDef::Segment(..) => "segment",
            GeoDef::Ray(..) => "ray",
            GeoDef::Parallel { .. } => "parallel line",
            GeoDef::Perpendicular { .. } => "perpendicular line",
            GeoDef::PerpendicularBisector(..) => "perpendicular bisector",
            GeoDef::Circle { .. } => "circle",
            GeoDef::Equation(..) => "equation-defined curve",
        }
    }

    /// Steps that denote a point (and therefore carry coordinate variables).
    pub fn is_point(&self) -> bool {
        matches!(
            self,
            GeoDef::FreePoint(..)
                | GeoDef::DynamicPoint { .. }
                | GeoDef::ComputedPoint(..)
                | GeoDef::PointOnPath(..)
                | GeoDef::Midpoint(..)
                | GeoDef::Intersection(..)
        )
    }

    /// Steps that denote a one-dimensional path a point can ride on.
    pub fn is_path(&self) -> bool {
        self.is_line_like() || matches!(self, GeoDef::Circle { .. })
    }

    fn is_line_like(&self) -> bool {
        matches!(
            self,
            GeoDef::Line(..)
                | GeoDef::Segment(..)
                | GeoDef::Ray(..)
                | GeoDef::Parallel { .. }
                | GeoDef::Perpendicular { .. }
                | GeoDef::PerpendicularBisector(..)
        )
    }

    /// Names of earlier steps this definition depends on.
    pub fn references(&self) -> Vec<&str> {
        let mut out = Vec::new();
        match self {
            GeoDef::FreePoint(..) | GeoDef::Equation(..) => {}
            GeoDef::DynamicPoint { source } => out.push(source.as_str()),
            GeoDef::ComputedPoint(ex, ey) => {
                ex.collect_refs(&mut out);
                ey.collect_refs(&mut out);
            }
            GeoDef::PointOnPath(path) => out.push(path.as_str()),
            GeoDef::Midpoint(a, b)
            | GeoDef::Intersection(a, b)
            | GeoDef::Line(a, b)
            | GeoDef::Segment(a, b)
            | GeoDef::Ray(a, b)
            | GeoDef::PerpendicularBisector(a, b) => {
                out.push(a.as_str());
                out.push(b.as_str());
            }
            GeoDef::Parallel { through, to } | GeoDef::Perpendicular { through, to } => {
                out.push(through.as_str());
                out.push(to.as_str());
            }
            GeoDef::Circle { center, radius } => {
                out.push(center.as_str());
                match radius {
                    RadiusSpec::Through(p) => out.push(p.as_str()),
                    RadiusSpec::SegmentLength(s) => out.push(s.as_str()),
                    RadiusSpec::Length(_) => {}
                }
            }
        }
        out
    }
}

/// What the program ultimately asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalKind {
    /// Implicit equation of the traced curve.
    LocusEquation,
    /// Numeric trace only; no elimination is run.
    Locus,
    /// Implicit equation of the envelope of a family of paths.
    Envelope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Goal {
    pub kind: GoalKind,
    /// Traced point (locus) or swept path object (envelope).
    pub target: String,
    /// The driving point; must be a `PointOnPath` step.
    pub mover: String,
}

/// A full construction: ordered steps plus at most one goal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstructionProgram {
    pub steps: Vec<(String, GeoDef)>,
    pub goal: Option<Goal>,
}

impl ConstructionProgram {
    pub fn push(&mut self, name: impl Into<String>, def: GeoDef) {
        self.steps.push((name.into(), def));
    }

    pub fn def_of(&self, name: &str) -> Option<&GeoDef> {
        self.steps
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, d)| d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One validation result, tied to the step it is about.
#[derive(Debug, Clone)]
pub struct Finding {
    pub severity: Severity,
    /// Step name the finding concerns; empty for program-level findings.
    pub subject: String,
    pub message: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("unsupported step `{name}`: {what}")]
    Unsupported { name: String, what: String },
    #[error("dangling reference {name}")]
    DanglingReference { name: String },
    #[error("`{name}` is used before it is defined")]
    ForwardReference { name: String },
    #[error("duplicate definition of `{name}`")]
    DuplicateName { name: String },
    #[error("`{name}` is reserved for the locus plane")]
    ReservedName { name: String },
    #[error("`{name}` is not a point")]
    NotAPoint { name: String },
    #[error("`{name}` is not a path")]
    NotAPath { name: String },
    #[error("`{name}` is not a line")]
    NotALine { name: String },
    #[error("mover `{name}` is not bound to a path")]
    MoverNotOnPath { name: String },
    #[error("dynamic point source `{name}` has no fixed coordinates")]
    DynamicSourceNotConstant { name: String },
    #[error("invalid circle radius: {given}")]
    InvalidRadius { given: String },
    #[error("construction has {dof} degrees of freedom; a locus needs exactly 1")]
    WrongDegreesOfFreedom { dof: i64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A step translated to algebra: a pair of variables for points, or the
/// symbolic data needed to write incidence conditions for paths.
#[derive(Debug, Clone)]
pub enum AlgObject {
    Point {
        x: usize,
        y: usize,
    },
    /// Anchor point and direction vector, both as polynomials over the
    /// construction registry. Segments and rays coincide with their carrier
    /// line algebraically; the distinction only matters to numeric sampling.
    Line {
        anchor: [MultiPoly; 2],
        dir: [MultiPoly; 2],
    },
    Circle {
        center: [MultiPoly; 2],
        radius_sq: MultiPoly,
    },
}

impl AlgObject {
    /// Polynomial that vanishes exactly when `(px, py)` lies on the object.
    /// Callers guarantee the object is a path, not a point.
    pub fn incidence_at(&self, px: &MultiPoly, py: &MultiPoly) -> MultiPoly {
        match self {
            AlgObject::Point { .. } => panic!("incidence on a point"),
            AlgObject::Line { anchor, dir } => {
                // (P − anchor) × dir = 0, i.e. dx·(py−ay) − dy·(px−ax)
                let rx = px.sub(&anchor[0]).expect("same registry");
                let ry = py.sub(&anchor[1]).expect("same registry");
                let a = dir[0].mul(&ry).expect("same registry");
                let b = dir[1].mul(&rx).expect("same registry");
                a.sub(&b).expect("same registry")
            }
            AlgObject::Circle { center, radius_sq } => {
                let dx = px.sub(&center[0]).expect("same registry");
                let dy = py.sub(&center[1]).expect("same registry");
                dx.pow(2)
                    .add(&dy.pow(2))
                    .expect("same registry")
                    .sub(radius_sq)
                    .expect("same registry")
            }
        }
    }
}

/// One translated step: its coordinate variables (points only), its binding
/// equations, and whether it lies downstream of the goal's mover.
#[derive(Debug, Clone)]
pub struct AlgStep {
    pub name: String,
    pub vars: Vec<usize>,
    pub equations: Vec<MultiPoly>,
    pub from_mover: bool,
}

/// The polynomial system of a construction. The registry lists construction
/// variables in step order followed by the two locus-plane variables `x`, `y`
/// (which no binding equation mentions).
#[derive(Debug)]
pub struct Algebraized {
    pub registry: Arc<VarRegistry>,
    pub steps: Vec<AlgStep>,
    pub objects: HashMap<String, AlgObject>,
    /// Indices of the plane variables `x` and `y`.
    pub plane: (usize, usize),
    pub goal: Option<Goal>,
    pub warnings: Vec<String>,
}

impl Algebraized {
    /// All binding equations, in step order.
    pub fn equations(&self) -> Vec<MultiPoly> {
        self.steps
            .iter()
            .flat_map(|s| s.equations.iter().cloned())
            .collect()
    }

    /// Coordinate variables of steps in the mover's dependency cone.
    pub fn aux_vars(&self) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.from_mover)
            .flat_map(|s| s.vars.iter().copied())
            .collect()
    }

    /// Binding equations of steps in the mover's dependency cone.
    pub fn mover_equations(&self) -> Vec<MultiPoly> {
        self.steps
            .iter()
            .filter(|s| s.from_mover)
            .flat_map(|s| s.equations.iter().cloned())
            .collect()
    }

    pub fn point_vars(&self, name: &str) -> Option<(usize, usize)> {
        match self.objects.get(name) {
            Some(AlgObject::Point { x, y }) => Some((*x, *y)),
            _ => None,
        }
    }
}

/// Walks the program and reports every problem found, without stopping at
/// the first. Errors here are exactly the conditions `algebraize` rejects.
pub fn validate(program: &ConstructionProgram) -> Vec<Finding> {
    scan(program).0
}

/// Rounds half away from zero, the convention of dynamic-point snapping.
pub(crate) fn round_half_away(r: &Rational) -> Rational {
    if r.is_negative() {
        -round_half_away(&-r.clone())
    } else {
        (r + Rational::new(1.into(), 2.into())).floor()
    }
}

/// Constant coordinates of a point, when its definition pins them without
/// reference to any mover: free points, snapped copies, computed points and
/// midpoints over such points.
pub(crate) fn constant_coords(program: &ConstructionProgram, name: &str) -> Option<(Rational, Rational)> {
    match program.def_of(name)? {
        GeoDef::FreePoint(a, b) => Some((a.clone(), b.clone())),
        GeoDef::DynamicPoint { source } => {
            let (a, b) = constant_coords(program, source)?;
            Some((round_half_away(&a), round_half_away(&b)))
        }
        GeoDef::ComputedPoint(ex, ey) => Some((
            eval_const_expr(program, ex)?,
            eval_const_expr(program, ey)?,
        )),
        GeoDef::Midpoint(a, b) => {
            let (ax, ay) = constant_coords(program, a)?;
            let (bx, by) = constant_coords(program, b)?;
            let half = Rational::new(1.into(), 2.into());
            Some(((ax + bx) * half.clone(), (ay + by) * half))
        }
        _ => None,
    }
}

fn eval_const_expr(program: &ConstructionProgram, e: &Expr) -> Option<Rational> {
    match e {
        Expr::Const(c) => Some(c.clone()),
        Expr::Coord(axis, name) => {
            let (x, y) = constant_coords(program, name)?;
            Some(match axis {
                Axis::X => x,
                Axis::Y => y,
            })
        }
        Expr::Neg(e) => Some(-eval_const_expr(program, e)?),
        Expr::Add(a, b) => Some(eval_const_expr(program, a)? + eval_const_expr(program, b)?),
        Expr::Sub(a, b) => Some(eval_const_expr(program, a)? - eval_const_expr(program, b)?),
        Expr::Scale(c, e) => Some(c.clone() * eval_const_expr(program, e)?),
    }
}

struct Scanner {
    findings: Vec<Finding>,
    first_error: Option<GeomError>,
    dof: i64,
}

impl Scanner {
    fn error(&mut self, subject: &str, message: String, typed: GeomError) {
        self.findings.push(Finding {
            severity: Severity::Error,
            subject: subject.to_string(),
            message,
        });
        if self.first_error.is_none() {
            self.first_error = Some(typed);
        }
    }

    fn warn(&mut self, subject: &str, message: String) {
        self.findings.push(Finding {
            severity: Severity::Warning,
            subject: subject.to_string(),
            message,
        });
    }
}

/// Single walk shared by `validate` (keeps all findings) and `algebraize`
/// (stops at the first typed error).
fn scan(program: &ConstructionProgram) -> (Vec<Finding>, Option<GeomError>) {
    let mut sc = Scanner {
        findings: Vec::new(),
        first_error: None,
        dof: 0,
    };
    let all_names: HashSet<&str> = program.steps.iter().map(|(n, _)| n.as_str()).collect();
    let mut defined: HashMap<&str, usize> = HashMap::new();

    for (i, (name, def)) in program.steps.iter().enumerate() {
        if defined.contains_key(name.as_str()) {
            sc.error(
                name,
                format!("`{name}` is defined twice"),
                GeomError::DuplicateName { name: name.clone() },
            );
        }
        if name == "x" || name == "y" {
            sc.error(
                name,
                format!("`{name}` is reserved for the locus plane"),
                GeomError::ReservedName { name: name.clone() },
            );
        }

        let mut refs_ok = true;
        for r in def.references() {
            match defined.get(r) {
                Some(_) => {}
                None if all_names.contains(r) => {
                    refs_ok = false;
                    sc.error(
                        name,
                        format!("`{r}` is used before it is defined"),
                        GeomError::ForwardReference { name: r.to_string() },
                    );
                }
                None => {
                    refs_ok = false;
                    sc.error(
                        name,
                        format!("dangling reference {r}"),
                        GeomError::DanglingReference { name: r.to_string() },
                    );
                }
            }
        }

        if refs_ok {
            check_kinds(program, &mut sc, name, def);
        }

        match def {
            GeoDef::FreePoint(a, b) => {
                if !a.is_integer() || !b.is_integer() {
                    sc.warn(name, "non-integer coordinate".to_string());
                }
            }
            GeoDef::PointOnPath(_) => sc.dof += 1,
            _ => {}
        }

        defined.insert(name.as_str(), i);
    }

    if let Some(goal) = &program.goal {
        check_goal(program, &mut sc, goal);
    }

    (sc.findings, sc.first_error)
}

/// Per-kind argument checks; all references are known to resolve backwards.
fn check_kinds(program: &ConstructionProgram, sc: &mut Scanner, name: &str, def: &GeoDef) {
    let kind_of = |n: &str| program.def_of(n).expect("reference resolved");
    let need_point = |sc: &mut Scanner, n: &str| {
        if !kind_of(n).is_point() {
            sc.error(
                name,
                format!("`{n}` is not a point"),
                GeomError::NotAPoint { name: n.to_string() },
            );
        }
    };
    match def {
        GeoDef::FreePoint(..) => {}
        GeoDef::DynamicPoint { source } => {
            need_point(sc, source);
            if kind_of(source).is_point() && constant_coords(program, source).is_none() {
                sc.error(
                    name,
                    format!("`{source}` has no fixed coordinates to snap"),
                    GeomError::DynamicSourceNotConstant {
                        name: source.clone(),
                    },
                );
            } else if kind_of(source).is_point() {
                let (a, b) = constant_coords(program, source).expect("checked");
                let (ra, rb) = (round_half_away(&a), round_half_away(&b));
                if ra != a || rb != b {
                    sc.warn(name, format!("coordinates snapped to ({ra}, {rb})"));
                }
            }
        }
        GeoDef::ComputedPoint(ex, ey) => {
            let mut refs = Vec::new();
            ex.collect_refs(&mut refs);
            ey.collect_refs(&mut refs);
            for r in refs {
                need_point(sc, r);
            }
        }
        GeoDef::PointOnPath(path) => {
            if !kind_of(path).is_path() {
                sc.error(
                    name,
                    format!("`{path}` is not a path"),
                    GeomError::NotAPath { name: path.clone() },
                );
            }
        }
        GeoDef::Midpoint(a, b) => {
            need_point(sc, a);
            need_point(sc, b);
        }
        GeoDef::Intersection(f, g) => {
            for n in [f, g] {
                if !kind_of(n).is_path() {
                    sc.error(
                        name,
                        format!("`{n}` is not a path"),
                        GeomError::NotAPath { name: n.clone() },
                    );
                }
            }
        }
        GeoDef::Line(a, b) | GeoDef::Segment(a, b) | GeoDef::Ray(a, b) => {
            need_point(sc, a);
            need_point(sc, b);
            if a == b {
                sc.error(
                    name,
                    format!("`{name}` has identical endpoints"),
                    GeomError::Unsupported {
                        name: name.to_string(),
                        what: "identical endpoints".to_string(),
                    },
                );
            }
        }
        GeoDef::PerpendicularBisector(a, b) => {
            need_point(sc, a);
            need_point(sc, b);
            if a == b {
                sc.error(
                    name,
                    format!("`{name}` bisects a degenerate segment"),
                    GeomError::Unsupported {
                        name: name.to_string(),
                        what: "identical endpoints".to_string(),
                    },
                );
            }
        }
        GeoDef::Parallel { through, to } | GeoDef::Perpendicular { through, to } => {
            need_point(sc, through);
            if !kind_of(to).is_line_like() {
                sc.error(
                    name,
                    format!("`{to}` is not a line"),
                    GeomError::NotALine { name: to.clone() },
                );
            }
        }
        GeoDef::Circle { center, radius } => {
            need_point(sc, center);
            match radius {
                RadiusSpec::Through(p) => {
                    need_point(sc, p);
                    if p == center {
                        sc.error(
                            name,
                            format!("`{name}` passes through its own center"),
                            GeomError::InvalidRadius {
                                given: "the center itself".to_string(),
                            },
                        );
                    }
                }
                RadiusSpec::Length(q) => {
                    if !q.is_positive() {
                        sc.error(
                            name,
                            format!("radius {q} is not positive"),
                            GeomError::InvalidRadius { given: q.to_string() },
                        );
                    }
                }
                RadiusSpec::SegmentLength(s) => {
                    if !matches!(kind_of(s), GeoDef::Segment(..)) {
                        sc.error(
                            name,
                            format!("`{s}` is not a segment"),
                            GeomError::Unsupported {
                                name: name.to_string(),
                                what: format!("radius reference `{s}` is not a segment"),
                            },
                        );
                    }
                }
            }
        }
        GeoDef::Equation(_) => {
            sc.error(
                name,
                format!("`{name}` is a curve given by a raw formula"),
                GeomError::Unsupported {
                    name: name.to_string(),
                    what: "curve given by a raw formula".to_string(),
                },
            );
        }
    }
}

fn check_goal(program: &ConstructionProgram, sc: &mut Scanner, goal: &Goal) {
    match program.def_of(&goal.target) {
        None => sc.error(
            "",
            format!("dangling reference {}", goal.target),
            GeomError::DanglingReference {
                name: goal.target.clone(),
            },
        ),
        Some(def) => match goal.kind {
            GoalKind::LocusEquation | GoalKind::Locus => {
                if !def.is_point() {
                    sc.error(
                        "",
                        format!("locus target `{}` is not a point", goal.target),
                        GeomError::NotAPoint {
                            name: goal.target.clone(),
                        },
                    );
                }
            }
            GoalKind::Envelope => {
                if !def.is_path() {
                    sc.error(
                        "",
                        format!("envelope target `{}` is not a path", goal.target),
                        GeomError::NotAPath {
                            name: goal.target.clone(),
                        },
                    );
                }
            }
        },
    }
    match program.def_of(&goal.mover) {
        None => sc.error(
            "",
            format!("dangling reference {}", goal.mover),
            GeomError::DanglingReference {
                name: goal.mover.clone(),
            },
        ),
        Some(GeoDef::PointOnPath(_)) => {}
        Some(_) => sc.error(
            "",
            format!("mover `{}` is not bound to a path", goal.mover),
            GeomError::MoverNotOnPath {
                name: goal.mover.clone(),
            },
        ),
    }
    if sc.dof != 1 {
        sc.error(
            "",
            format!(
                "construction has {} degrees of freedom; a locus needs exactly 1",
                sc.dof
            ),
            GeomError::WrongDegreesOfFreedom { dof: sc.dof },
        );
    }
}

/// Translates the program into its polynomial system.
pub fn algebraize(program: &ConstructionProgram) -> Result<Algebraized, GeomError> {
    let (findings, hard) = scan(program);
    if let Some(err) = hard {
        return Err(err);
    }
    let warnings = findings
        .into_iter()
        .filter(|f| f.severity == Severity::Warning)
        .map(|f| {
            if f.subject.is_empty() {
                f.message
            } else {
                format!("{}: {}", f.subject, f.message)
            }
        })
        .collect();

    let mut names: Vec<String> = Vec::new();
    for (name, def) in &program.steps {
        if def.is_point() {
            names.push(format!("x_{name}"));
            names.push(format!("y_{name}"));
        }
    }
    names.push("x".to_string());
    names.push("y".to_string());
    let plane = (names.len() - 2, names.len() - 1);
    let registry = VarRegistry::new(names);

    let mover_name = program.goal.as_ref().map(|g| g.mover.as_str());
    let mut objects: HashMap<String, AlgObject> = HashMap::new();
    let mut cone: HashSet<&str> = HashSet::new();
    let mut steps = Vec::new();
    let mut next_var = 0usize;

    let point_coords = |objects: &HashMap<String, AlgObject>, n: &str| -> [MultiPoly; 2] {
        match &objects[n] {
            AlgObject::Point { x, y } => [
                MultiPoly::var(registry.clone(), *x),
                MultiPoly::var(registry.clone(), *y),
            ],
            _ => unreachable!("kind-checked as a point"),
        }
    };

    for (name, def) in &program.steps {
        let from_mover = mover_name == Some(name.as_str())
            || def.references().iter().any(|r| cone.contains(r));
        if from_mover {
            cone.insert(name.as_str());
        }

        let mut vars = Vec::new();
        let mut equations = Vec::new();
        if def.is_point() {
            let (xi, yi) = (next_var, next_var + 1);
            next_var += 2;
            vars.extend([xi, yi]);
            let px = MultiPoly::var(registry.clone(), xi);
            let py = MultiPoly::var(registry.clone(), yi);
            match def {
                GeoDef::FreePoint(a, b) => {
                    equations.push(px.sub(&MultiPoly::constant(registry.clone(), a.clone()))?);
                    equations.push(py.sub(&MultiPoly::constant(registry.clone(), b.clone()))?);
                }
                GeoDef::DynamicPoint { source } => {
                    let (a, b) = constant_coords(program, source)
                        .expect("scan verified a constant source");
                    let ra = MultiPoly::constant(registry.clone(), round_half_away(&a));
                    let rb = MultiPoly::constant(registry.clone(), round_half_away(&b));
                    equations.push(px.sub(&ra)?);
                    equations.push(py.sub(&rb)?);
                }
                GeoDef::ComputedPoint(ex, ey) => {
                    equations.push(px.sub(&expr_poly(ex, &objects, &registry)?)?);
                    equations.push(py.sub(&expr_poly(ey, &objects, &registry)?)?);
                }
                GeoDef::Midpoint(a, b) => {
                    let pa = point_coords(&objects, a);
                    let pb = point_coords(&objects, b);
                    let two = Rational::from_integer(2.into());
                    equations.push(px.scale(&two).sub(&pa[0].add(&pb[0])?)?);
                    equations.push(py.scale(&two).sub(&pa[1].add(&pb[1])?)?);
                }
                GeoDef::PointOnPath(path) => {
                    equations.push(objects[path].incidence_at(&px, &py));
                }
                GeoDef::Intersection(f, g) => {
                    equations.push(objects[f].incidence_at(&px, &py));
                    equations.push(objects[g].incidence_at(&px, &py));
                }
                _ => unreachable!("point kinds covered"),
            }
            objects.insert(name.clone(), AlgObject::Point { x: xi, y: yi });
        } else {
            let obj = match def {
                GeoDef::Line(a, b) | GeoDef::Segment(a, b) | GeoDef::Ray(a, b) => {
                    let pa = point_coords(&objects, a);
                    let pb = point_coords(&objects, b);
                    let dir = [pb[0].sub(&pa[0])?, pb[1].sub(&pa[1])?];
                    AlgObject::Line { anchor: pa, dir }
                }
                GeoDef::Parallel { through, to } => AlgObject::Line {
                    anchor: point_coords(&objects, through),
                    dir: line_dir(&objects, to),
                },
                GeoDef::Perpendicular { through, to } => {
                    let [dx, dy] = line_dir(&objects, to);
                    AlgObject::Line {
                        anchor: point_coords(&objects, through),
                        dir: [dy.neg(), dx],
                    }
                }
                GeoDef::PerpendicularBisector(a, b) => {
                    let pa = point_coords(&objects, a);
                    let pb = point_coords(&objects, b);
                    let half = Rational::new(1.into(), 2.into());
                    let anchor = [
                        pa[0].add(&pb[0])?.scale(&half),
                        pa[1].add(&pb[1])?.scale(&half),
                    ];
                    let dir = [pa[1].sub(&pb[1])?, pb[0].sub(&pa[0])?];
                    AlgObject::Line { anchor, dir }
                }
                GeoDef::Circle { center, radius } => {
                    let c = point_coords(&objects, center);
                    let radius_sq = match radius {
                        RadiusSpec::Length(q) => {
                            MultiPoly::constant(registry.clone(), q.clone() * q.clone())
                        }
                        RadiusSpec::Through(p) => {
                            let pp = point_coords(&objects, p);
                            let dx = pp[0].sub(&c[0])?;
                            let dy = pp[1].sub(&c[1])?;
                            dx.pow(2).add(&dy.pow(2))?
                        }
                        RadiusSpec::SegmentLength(s) => {
                            let [dx, dy] = line_dir(&objects, s);
                            dx.pow(2).add(&dy.pow(2))?
                        }
                    };
                    AlgObject::Circle {
                        center: c,
                        radius_sq,
                    }
                }
                _ => unreachable!("scan rejects unsupported kinds"),
            };
            objects.insert(name.clone(), obj);
        }
        steps.push(AlgStep {
            name: name.clone(),
            vars,
            equations,
            from_mover,
        });
    }

    Ok(Algebraized {
        registry,
        steps,
        objects,
        plane,
        goal: program.goal.clone(),
        warnings,
    })
}

fn line_dir(objects: &HashMap<String, AlgObject>, name: &str) -> [MultiPoly; 2] {
    match &objects[name] {
        AlgObject::Line { dir, .. } => dir.clone(),
        _ => unreachable!("kind-checked as a line"),
    }
}

fn expr_poly(
    e: &Expr,
    objects: &HashMap<String, AlgObject>,
    registry: &Arc<VarRegistry>,
) -> Result<MultiPoly, PolyError> {
    Ok(match e {
        Expr::Const(c) => MultiPoly::constant(registry.clone(), c.clone()),
        Expr::Coord(axis, name) => match &objects[name.as_str()] {
            AlgObject::Point { x, y } => {
                let i = match axis {
                    Axis::X => *x,
                    Axis::Y => *y,
                };
                MultiPoly::var(registry.clone(), i)
            }
            _ => unreachable!("kind-checked as a point"),
        },
        Expr::Neg(e) => expr_poly(e, objects, registry)?.neg(),
        Expr::Add(a, b) => {
            expr_poly(a, objects, registry)?.add(&expr_poly(b, objects, registry)?)?
        }
        Expr::Sub(a, b) => {
            expr_poly(a, objects, registry)?.sub(&expr_poly(b, objects, registry)?)?
        }
        Expr::Scale(c, e) => expr_poly(e, objects, registry)?.scale(c),
    })
}
