//! Implicit equations of traced loci.
//!
//! The pipeline: algebraize the construction, pin the tracer point to the
//! plane variables x and y, eliminate every construction variable, and
//! reduce what survives to a single squarefree canonical curve. The curve
//! always *contains* the true locus — elimination projects, and projection
//! can pick up extra components — so every result carries an unconditional
//! superset warning. `numeric_trace` replays the construction in floating
//! point as the independent cross-check.

use std::sync::Arc;

use thiserror::Error;

use crate::gcd::{gcd, squarefree_all};
use crate::geom::{algebraize, ConstructionProgram, GeomError, GoalKind};
use crate::groebner::{eliminate, eliminate_staged, Budget, GroebnerError, PolySystem};
use crate::numeric::trace_tracer;
pub use crate::numeric::Trace;
use crate::order::MonomialOrder;
use crate::poly::{MultiPoly, PolyError};
use crate::rational::Rational;
use crate::vars::VarRegistry;

/// Above this many variables to eliminate, the basis is computed in
/// dependent-first stages rather than one shot.
const STAGED_THRESHOLD: usize = 10;
const STAGE_BATCH: usize = 4;
/// Linear factors ay + bx + c are probed for |a|,|b|,|c| up to this bound.
const PROBE_BOUND: i64 = 10;

#[derive(Debug, Error)]
pub enum LocusError {
    /// The construction is inconsistent; no position satisfies it.
    #[error("empty locus: the construction admits no position")]
    EmptyLocus,
    /// The tracer sweeps a two-dimensional region; no curve equation exists.
    #[error("locus is not an algebraic curve")]
    NonAlgebraicLocus,
    /// The tracer is pinned to finitely many positions.
    #[error("locus is a finite point set, not a curve")]
    ZeroDimensionalLocus,
    #[error("program has no locus goal")]
    NotALocusGoal,
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A canonical nonzero polynomial in the plane variables x, y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicitCurve {
    poly: MultiPoly,
    degree: u32,
}

impl ImplicitCurve {
    /// Canonicalizes; the polynomial must be nonzero and live in a
    /// two-variable registry.
    pub fn new(poly: MultiPoly) -> Result<Self, LocusError> {
        assert_eq!(poly.registry().len(), 2, "plane curves have two variables");
        if poly.is_zero() {
            return Err(LocusError::NonAlgebraicLocus);
        }
        let canon = poly.canonicalize()?;
        let degree = canon.total_degree();
        Ok(ImplicitCurve { poly: canon, degree })
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The displayed form, e.g. `x^2 - 6x + y^2 - 4y + 9 = 0`.
    pub fn equation_string(&self) -> String {
        format!("{} = 0", self.poly)
    }
}

#[derive(Debug)]
pub struct LocusResult {
    pub curve: ImplicitCurve,
    pub degree: u32,
    /// Linear factors found by probing; each divides `curve` exactly.
    pub known_factors: Vec<ImplicitCurve>,
    /// curve = product(known_factors) · cofactor, exactly.
    pub cofactor: ImplicitCurve,
    /// Always true: the curve contains the locus but may be larger.
    pub superset_warning: bool,
    pub warnings: Vec<String>,
}

/// The plane registry every result lives in.
pub fn plane_registry() -> Arc<VarRegistry> {
    VarRegistry::new(vec!["x", "y"])
}

/// Computes the implicit equation of the curve traced by the goal's target
/// point as the mover sweeps its path.
pub fn locus_equation(program: &ConstructionProgram) -> Result<LocusResult, LocusError> {
    locus_equation_with_budget(program, &Budget::default())
}

pub fn locus_equation_with_budget(
    program: &ConstructionProgram,
    budget: &Budget,
) -> Result<LocusResult, LocusError> {
    let goal = program.goal.as_ref().ok_or(LocusError::NotALocusGoal)?;
    if !matches!(goal.kind, GoalKind::LocusEquation | GoalKind::Locus) {
        return Err(LocusError::NotALocusGoal);
    }
    let alg = algebraize(program)?;
    let (tx, ty) = alg
        .point_vars(&goal.target)
        .expect("goal target checked as a point");
    let (px, py) = alg.plane;
    let reg = alg.registry.clone();
    let mut eqs = alg.equations();
    // pin the tracer to the plane: x − x_T, y − y_T
    eqs.push(MultiPoly::var(reg.clone(), px).sub(&MultiPoly::var(reg.clone(), tx))?);
    eqs.push(MultiPoly::var(reg.clone(), py).sub(&MultiPoly::var(reg.clone(), ty))?);
    project_to_plane(reg, eqs, (px, py), budget, alg.warnings)
}

/// Shared tail of the locus and envelope pipelines: eliminate everything
/// but the plane variables and normalize the survivor into a curve.
pub(crate) fn project_to_plane(
    registry: Arc<VarRegistry>,
    equations: Vec<MultiPoly>,
    plane: (usize, usize),
    budget: &Budget,
    mut warnings: Vec<String>,
) -> Result<LocusResult, LocusError> {
    let keep = [plane.0, plane.1];
    let elim_count = registry.len() - 2;
    let system = PolySystem::new(registry.clone(), equations, MonomialOrder::GradedLex)?;
    let gens = if elim_count > STAGED_THRESHOLD {
        eliminate_staged(&system, &keep, STAGE_BATCH, budget)?
    } else {
        eliminate(&system, &keep, budget)?
    };

    if gens.is_empty() {
        return Err(LocusError::NonAlgebraicLocus);
    }
    let restricted: Vec<MultiPoly> = gens
        .iter()
        .map(|g| restrict_to_plane(g, plane))
        .collect::<Result<_, _>>()?;
    if restricted.iter().any(|g| g.is_constant()) {
        // a nonzero constant in the basis: the system has no solutions
        return Err(LocusError::EmptyLocus);
    }
    if restricted.len() > 1 && is_zero_dimensional(&restricted) {
        return Err(LocusError::ZeroDimensionalLocus);
    }

    // several generators cut out a subset of each one's curve; report the
    // gcd-free product (the union of their squarefree components) so the
    // superset direction is kept
    let mut combined = restricted[0].clone();
    for g in &restricted[1..] {
        let common = gcd(&combined, g);
        let reduced = common.divide_exact(g).expect("gcd divides");
        combined = combined.mul(&reduced)?;
    }
    let curve = ImplicitCurve::new(squarefree_all(&combined))?;
    if restricted.len() > 1 {
        warnings.push(format!(
            "elimination produced {} generators; their product is reported",
            restricted.len()
        ));
    }

    let (known_factors, cofactor) = probe_split(&curve)?;
    Ok(LocusResult {
        degree: curve.degree(),
        curve,
        known_factors,
        cofactor,
        superset_warning: true,
        warnings,
    })
}

/// Re-expresses a polynomial that uses only the plane variables over the
/// two-variable output registry.
fn restrict_to_plane(g: &MultiPoly, plane: (usize, usize)) -> Result<MultiPoly, PolyError> {
    let reg = plane_registry();
    let terms = g
        .terms()
        .iter()
        .map(|(m, c)| {
            let e = m.exps();
            debug_assert!(e
                .iter()
                .enumerate()
                .all(|(i, &k)| k == 0 || i == plane.0 || i == plane.1));
            (
                crate::monomial::Monomial::new(vec![e[plane.0], e[plane.1]]),
                c.clone(),
            )
        })
        .collect();
    MultiPoly::from_terms(reg, terms).canonicalize()
}

/// A basis over k[x,y] cuts out finitely many points exactly when some
/// leading monomial is a pure power of x and some other of y.
fn is_zero_dimensional(gens: &[MultiPoly]) -> bool {
    let mut pure = [false, false];
    for g in gens {
        if let Some((m, _)) = g.leading_term(MonomialOrder::GradedLex) {
            let e = m.exps();
            if e[0] > 0 && e[1] == 0 {
                pure[0] = true;
            }
            if e[1] > 0 && e[0] == 0 {
                pure[1] = true;
            }
        }
    }
    pure[0] && pure[1]
}

/// Finds all canonical linear factors ay + bx + c with small integer
/// coefficients that divide the curve.
pub fn probe_linear_factors(curve: &ImplicitCurve) -> Vec<ImplicitCurve> {
    probe_split(curve).map(|(f, _)| f).unwrap_or_default()
}

fn probe_split(curve: &ImplicitCurve) -> Result<(Vec<ImplicitCurve>, ImplicitCurve), LocusError> {
    let reg = curve.poly().registry().clone();
    let linear = |a: i64, b: i64, c: i64| -> MultiPoly {
        let x = MultiPoly::var(reg.clone(), 0);
        let y = MultiPoly::var(reg.clone(), 1);
        y.scale(&Rational::from_integer(a.into()))
            .add(&x.scale(&Rational::from_integer(b.into())))
            .expect("same registry")
            .add(&MultiPoly::constant(
                reg.clone(),
                Rational::from_integer(c.into()),
            ))
            .expect("same registry")
    };
    let mut factors = Vec::new();
    let mut rest = curve.poly().clone();
    // canonical candidates only: coefficient of x positive, or zero with
    // the coefficient of y positive; content 1
    for b in 0..=PROBE_BOUND {
        let a_range = if b == 0 { 1..=PROBE_BOUND } else { -PROBE_BOUND..=PROBE_BOUND };
        for a in a_range {
            for c in -PROBE_BOUND..=PROBE_BOUND {
                if gcd3(a.abs(), b.abs(), c.abs()) != 1 {
                    continue;
                }
                let cand = linear(a, b, c);
                if let Some(q) = cand.divide_exact(&rest) {
                    factors.push(ImplicitCurve::new(cand)?);
                    rest = q;
                }
            }
        }
    }
    Ok((factors, ImplicitCurve::new(rest)?))
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn g(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            g(b, a % b)
        }
    }
    g(g(a, b), c)
}

/// Replays the construction numerically and returns the tracer's sampled
/// positions; the specialization oracle for every symbolic result.
pub fn numeric_trace(program: &ConstructionProgram, samples: usize) -> Result<Trace, LocusError> {
    if program.steps.is_empty() {
        return Ok(Trace::default());
    }
    let goal = program.goal.as_ref().ok_or(LocusError::NotALocusGoal)?;
    if !matches!(goal.kind, GoalKind::LocusEquation | GoalKind::Locus) {
        return Err(LocusError::NotALocusGoal);
    }
    // full validation (dangling refs, kinds, degrees of freedom)
    algebraize(program)?;
    Ok(trace_tracer(program, &goal.target, &goal.mover, samples))
}
