//! Implicit equations of envelopes of one-parameter path families.
//!
//! A construction whose goal is `Envelope[f, D]` sweeps the object f as the
//! mover D rides its path. The envelope is cut out by the family incidence
//! L(x, y, aux) together with the vanishing of the Jacobian determinant of
//! the mover-side constraints and L with respect to the mover-side
//! variables; eliminating those variables leaves the plane curve. When the
//! constraints chain down to a single parameter t, the classical
//! {F, ∂F/∂t} system is used instead — same ideal, much smaller
//! determinant work.

use thiserror::Error;

use crate::geom::{
    algebraize, AlgObject, Algebraized, ConstructionProgram, GeoDef, GeomError, GoalKind,
};
use crate::groebner::Budget;
use crate::locus::{project_to_plane, LocusError, LocusResult};
use crate::numeric::scene_points;
use crate::poly::{rational_to_f64, MultiPoly, PolyError};
use crate::rational::Rational;
use crate::vars::VarRegistry;

/// Cofactor expansion handles Jacobians up to this size; corpus
/// constructions stay well under it.
const MAX_AUX: usize = 8;

#[derive(Debug, Error)]
pub enum EnvelopeError {
    #[error("program has no envelope goal")]
    NotAnEnvelopeGoal,
    #[error("family is not one-parameter: {aux} variables, {constraints} constraints")]
    NotOneParameter { aux: usize, constraints: usize },
    #[error("family has {count} parameters; at most {MAX_AUX} supported")]
    TooManyParameters { count: usize },
    #[error("family does not move with the parameter")]
    DegenerateFamily,
    #[error("constraints do not reduce to a single parameter")]
    NotReducible,
    #[error("substituting y = ax + b does not yield a quadratic in x")]
    NotQuadratic,
    #[error("family cannot be pinned to numeric coefficients")]
    WitnessesUnavailable,
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Locus(#[from] LocusError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A one-parameter family: the algebraized construction plus the swept
/// object's incidence polynomial L(x, y, aux).
#[derive(Debug)]
pub struct FamilySpec {
    pub alg: Algebraized,
    /// Name of the swept path object.
    pub target: String,
    /// L(x, y, aux): vanishes when the plane point (x, y) lies on the
    /// family member selected by the aux variables.
    pub incidence: MultiPoly,
}

/// Builds the family from a program with an `Envelope` goal.
pub fn family_spec(program: &ConstructionProgram) -> Result<FamilySpec, EnvelopeError> {
    let goal = program
        .goal
        .as_ref()
        .filter(|g| g.kind == GoalKind::Envelope)
        .ok_or(EnvelopeError::NotAnEnvelopeGoal)?;
    let target = goal.target.clone();
    let alg = algebraize(program)?;
    let (px, py) = alg.plane;
    let vx = MultiPoly::var(alg.registry.clone(), px);
    let vy = MultiPoly::var(alg.registry.clone(), py);
    let incidence = match &alg.objects[&target] {
        AlgObject::Point { .. } => unreachable!("goal checked as a path"),
        obj => obj.incidence_at(&vx, &vy),
    };
    let aux = alg.aux_vars().len();
    let constraints = alg.mover_equations().len();
    if aux != constraints + 1 {
        return Err(EnvelopeError::NotOneParameter { aux, constraints });
    }
    Ok(FamilySpec {
        alg,
        target,
        incidence,
    })
}

/// Which envelope condition to build. `Auto` prefers the single-parameter
/// reduction and falls back to the Jacobian determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeMethod {
    Auto,
    Jacobian,
    SingleParameter,
}

pub fn envelope_equation(spec: &FamilySpec) -> Result<LocusResult, EnvelopeError> {
    envelope_equation_with(spec, EnvelopeMethod::Auto, &Budget::default())
}

pub fn envelope_equation_with(
    spec: &FamilySpec,
    method: EnvelopeMethod,
    budget: &Budget,
) -> Result<LocusResult, EnvelopeError> {
    let aux = spec.alg.aux_vars();
    if aux
        .iter()
        .all(|&v| spec.incidence.partial_derivative(v).is_zero())
    {
        return Err(EnvelopeError::DegenerateFamily);
    }

    let condition = match method {
        EnvelopeMethod::SingleParameter => single_parameter_condition(spec)?,
        EnvelopeMethod::Jacobian => jacobian_condition(spec)?,
        EnvelopeMethod::Auto => match single_parameter_condition(spec) {
            Ok(c) => c,
            Err(EnvelopeError::NotReducible) => jacobian_condition(spec)?,
            Err(e) => return Err(e),
        },
    };

    let mut equations = spec.alg.equations();
    equations.extend(condition);
    let result = project_to_plane(
        spec.alg.registry.clone(),
        equations,
        spec.alg.plane,
        budget,
        spec.alg.warnings.clone(),
    )?;
    Ok(result)
}

/// {F, ∂F/∂t} after chaining the constraints down to one parameter.
fn single_parameter_condition(spec: &FamilySpec) -> Result<Vec<MultiPoly>, EnvelopeError> {
    let (f, t) = single_parameter_reduce(spec)?;
    let ft = f.partial_derivative(t);
    if ft.is_zero() {
        return Err(EnvelopeError::DegenerateFamily);
    }
    Ok(vec![f, ft])
}

/// {L, det J} with J = ∂(constraints, L)/∂(aux).
fn jacobian_condition(spec: &FamilySpec) -> Result<Vec<MultiPoly>, EnvelopeError> {
    let aux = spec.alg.aux_vars();
    let constraints = spec.alg.mover_equations();
    if aux.len() != constraints.len() + 1 {
        return Err(EnvelopeError::NotOneParameter {
            aux: aux.len(),
            constraints: constraints.len(),
        });
    }
    if aux.len() > MAX_AUX {
        return Err(EnvelopeError::TooManyParameters { count: aux.len() });
    }
    let mut rows: Vec<Vec<MultiPoly>> = Vec::with_capacity(aux.len());
    for c in constraints.iter().chain(std::iter::once(&spec.incidence)) {
        rows.push(aux.iter().map(|&v| c.partial_derivative(v)).collect());
    }
    let det = determinant(&rows, &spec.alg)?;
    if det.is_zero() {
        return Err(EnvelopeError::DegenerateFamily);
    }
    Ok(vec![spec.incidence.clone(), det])
}

/// Determinant by cofactor expansion over column subsets; exponential in
/// the dimension, which `MAX_AUX` keeps small.
fn determinant(m: &[Vec<MultiPoly>], alg: &Algebraized) -> Result<MultiPoly, PolyError> {
    let n = m.len();
    let one = MultiPoly::constant(alg.registry.clone(), Rational::from_integer(1.into()));
    let mut dp: Vec<Option<MultiPoly>> = vec![None; 1 << n];
    dp[0] = Some(one);
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = MultiPoly::zero(alg.registry.clone());
        let mut pos = 0usize;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            if !m[row][col].is_zero() {
                let minor = dp[mask ^ (1 << col)].as_ref().expect("filled in order");
                let mut term = m[row][col].mul(minor)?;
                if (row + pos) % 2 == 1 {
                    term = term.neg();
                }
                acc = acc.add(&term)?;
            }
            pos += 1;
        }
        dp[mask] = Some(acc);
    }
    Ok(dp[(1 << n) - 1].take().expect("full mask filled"))
}

/// Chains the construction equations to express the family by a single
/// parameter: returns F(x, y, t) and the registry index of t. Each
/// equation must be spent solving one variable that occurs linearly with
/// a constant coefficient — free-point pins resolve first, which turns
/// line directions into constants and unlocks the rest of the chain. A
/// mover on a circle leaves its quadratic incidence standing and is not
/// reducible.
pub fn single_parameter_reduce(spec: &FamilySpec) -> Result<(MultiPoly, usize), EnvelopeError> {
    let mut eqs = spec.alg.equations();
    let mut l = spec.incidence.clone();
    let (px, py) = spec.alg.plane;

    let mut progress = true;
    while progress && !eqs.is_empty() {
        progress = false;
        // later-step variables are solved first, so the surviving
        // parameter is a coordinate of the mover itself
        'search: for ei in 0..eqs.len() {
            for v in (0..spec.alg.registry.len()).rev() {
                if v == px || v == py {
                    continue;
                }
                let e = &eqs[ei];
                if e.deg_in(v) != 1 {
                    continue;
                }
                let coeff = e.coeff_of_power(v, 1);
                if !coeff.is_constant() || coeff.is_zero() {
                    continue;
                }
                // e = c·v + rest, so v := −rest/c everywhere
                let c = coeff.terms()[0].1.clone();
                let rest = e.coeff_of_power(v, 0);
                let sub = rest.scale(&(-c.recip()));
                eqs.remove(ei);
                for e in &mut eqs {
                    *e = e.substitute(v, &sub)?;
                }
                l = l.substitute(v, &sub)?;
                progress = true;
                break 'search;
            }
        }
    }
    if !eqs.is_empty() {
        return Err(EnvelopeError::NotReducible);
    }
    let used = l.vars_used();
    let left: Vec<usize> = (0..spec.alg.registry.len())
        .filter(|&v| used[v] && v != px && v != py)
        .collect();
    match left.as_slice() {
        [] => Err(EnvelopeError::DegenerateFamily),
        [t] => Ok((l, *t)),
        _ => Err(EnvelopeError::NotReducible),
    }
}

/// Numeric envelope points: for sampled parameter values t₀ the
/// characteristic point solves {F = 0, ∂F/∂t = 0}, a linear system in
/// (x, y) for line families. Solved exactly in rationals where the family
/// reduces to one parameter; otherwise the mover is placed numerically
/// and {L = 0, det J = 0} — still linear in (x, y) — is solved per
/// placement. Returned as f64 either way.
pub fn envelope_witnesses(
    program: &ConstructionProgram,
    samples: usize,
) -> Result<Vec<(f64, f64)>, EnvelopeError> {
    let spec = family_spec(program)?;
    let (f, t) = match single_parameter_reduce(&spec) {
        Ok(pair) => pair,
        Err(EnvelopeError::NotReducible) => {
            return jacobian_witnesses(program, &spec, samples)
        }
        Err(e) => return Err(e),
    };
    let (px, py) = spec.alg.plane;
    let ft = f.partial_derivative(t);

    let mut out = Vec::new();
    for k in 0..samples {
        // spread over a window, avoiding simple integer coincidences
        let t0 = Rational::new((3 * k as i64 - (samples as i64)).into(), 7.into());
        let reg = spec.alg.registry.clone();
        let t0p = MultiPoly::constant(reg.clone(), t0);
        let g1 = f.substitute(t, &t0p)?;
        let g2 = ft.substitute(t, &t0p)?;
        let lin = |g: &MultiPoly| -> Option<(Rational, Rational, Rational)> {
            if g.deg_in(px) > 1 || g.deg_in(py) > 1 {
                return None;
            }
            let a = g.coeff_of_power(px, 1).coeff_of_power(py, 0);
            let b = g.coeff_of_power(py, 1).coeff_of_power(px, 0);
            let c = g.coeff_of_power(px, 0).coeff_of_power(py, 0);
            let as_const = |p: MultiPoly| -> Option<Rational> {
                if p.is_zero() {
                    Some(Rational::from_integer(0.into()))
                } else if p.is_constant() {
                    Some(p.terms()[0].1.clone())
                } else {
                    None
                }
            };
            Some((as_const(a)?, as_const(b)?, as_const(c)?))
        };
        let (Some((a1, b1, c1)), Some((a2, b2, c2))) = (lin(&g1), lin(&g2)) else {
            return Err(EnvelopeError::WitnessesUnavailable);
        };
        let det = a1.clone() * b2.clone() - a2.clone() * b1.clone();
        if det == Rational::from_integer(0.into()) {
            continue; // singular parameter value
        }
        let x = (b1.clone() * c2.clone() - b2.clone() * c1.clone()) / det.clone();
        let y = (a2 * c1 - a1 * c2) / det;
        out.push((rational_to_f64(&x), rational_to_f64(&y)));
    }
    Ok(out)
}

/// Places the mover numerically and solves the (x, y)-linear system
/// {L = 0, det J = 0} per placement: L is affine in the plane variables
/// and the determinant is expanded along the L row, so it is too.
fn jacobian_witnesses(
    program: &ConstructionProgram,
    spec: &FamilySpec,
    samples: usize,
) -> Result<Vec<(f64, f64)>, EnvelopeError> {
    let cond = jacobian_condition(spec)?;
    let (px, py) = spec.alg.plane;
    let mut coeffs = Vec::new();
    for g in &cond {
        if g.deg_in(px) > 1 || g.deg_in(py) > 1 {
            return Err(EnvelopeError::WitnessesUnavailable);
        }
        let a = g.coeff_of_power(px, 1).coeff_of_power(py, 0);
        let b = g.coeff_of_power(py, 1).coeff_of_power(px, 0);
        let c = g.coeff_of_power(px, 0).coeff_of_power(py, 0);
        coeffs.push((a, b, c));
    }
    let goal = program.goal.as_ref().expect("family_spec checked the goal");
    let branch_slots = program
        .steps
        .iter()
        .filter(|(_, d)| matches!(d, GeoDef::Intersection(..)))
        .count()
        .min(6);
    let mut out = Vec::new();
    for k in 0..samples {
        let u = k as f64 / samples.max(2).saturating_sub(1) as f64;
        for branch in 0..(1u64 << branch_slots) {
            let Ok(scene) = scene_points(program, &goal.mover, u, branch) else {
                continue;
            };
            let mut at = vec![0.0f64; spec.alg.registry.len()];
            for step in &spec.alg.steps {
                if let [vx, vy] = step.vars[..] {
                    let Some(&(sx, sy)) = scene.get(&step.name) else {
                        continue;
                    };
                    at[vx] = sx;
                    at[vy] = sy;
                }
            }
            let rows: Vec<(f64, f64, f64)> = coeffs
                .iter()
                .map(|(a, b, c)| (a.eval_f64(&at), b.eval_f64(&at), c.eval_f64(&at)))
                .collect();
            let (a1, b1, c1) = rows[0];
            let (a2, b2, c2) = rows[1];
            let det = a1 * b2 - a2 * b1;
            let scale = a1.abs().max(b1.abs()).max(a2.abs()).max(b2.abs()).max(1.0);
            if det.abs() <= 1e-9 * scale * scale {
                continue; // singular placement
            }
            out.push(((b1 * c2 - b2 * c1) / det, (a2 * c1 - a1 * c2) / det));
        }
    }
    if out.is_empty() {
        return Err(EnvelopeError::WitnessesUnavailable);
    }
    Ok(out)
}

/// Discriminant of the curve restricted to the symbolic line y = ax + b,
/// as a polynomial over the registry [a, b]. The curve polynomial is used
/// exactly as given — no normalization — so the result matches hand
/// expansion coefficient for coefficient; it vanishes iff the line is
/// tangent (or degenerately secant) to the curve.
pub fn tangency_discriminant(curve: &MultiPoly) -> Result<MultiPoly, EnvelopeError> {
    assert_eq!(curve.registry().len(), 2, "plane curve expected");
    let reg4 = VarRegistry::new(vec!["a", "b", "x", "y"]);
    let embedded = curve.embed(reg4.clone(), &[2, 3]);
    let line = MultiPoly::var(reg4.clone(), 0)
        .mul(&MultiPoly::var(reg4.clone(), 2))?
        .add(&MultiPoly::var(reg4.clone(), 1))?;
    let restricted = embedded.substitute(3, &line)?;
    if restricted.deg_in(2) != 2 {
        return Err(EnvelopeError::NotQuadratic);
    }
    let p2 = restricted.coeff_of_power(2, 2);
    let p1 = restricted.coeff_of_power(2, 1);
    let p0 = restricted.coeff_of_power(2, 0);
    let four = Rational::from_integer(4.into());
    let disc = p1.pow(2).sub(&p2.mul(&p0)?.scale(&four))?;
    // re-express over [a, b]; x and y no longer occur
    let reg2 = VarRegistry::new(vec!["a", "b"]);
    let terms = disc
        .terms()
        .iter()
        .map(|(m, c)| {
            let e = m.exps();
            debug_assert_eq!((e[2], e[3]), (0, 0));
            (crate::monomial::Monomial::new(vec![e[0], e[1]]), c.clone())
        })
        .collect();
    Ok(MultiPoly::from_terms(reg2, terms))
}
