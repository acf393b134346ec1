//! Buchberger's algorithm, polynomial reduction and elimination.
//!
//! The engine works fraction-free: generators are cleared to primitive
//! integer form and reductions cross-multiply by leading coefficients,
//! stripping content as it accumulates. Pair selection is the normal
//! strategy (smallest lcm degree first) with Buchberger's coprimality
//! and chain criteria; the pair queue order is fully deterministic, so
//! two runs on the same input produce identical bases.
//!
//! Elimination uses a block order ([`MonomialOrder::BlockElim`]) with
//! the doomed variables in the front block; the basis elements free of
//! that block generate the elimination ideal. Before any basis is
//! computed, a presolve pass substitutes away eliminable variables that
//! occur linearly with a constant coefficient, which is sound because
//! k[v, rest]/(c*v - g) is isomorphic to k[rest] for constant nonzero c.
//! Runs are guarded by a step and wall-clock budget and fail with an
//! explicit error rather than returning a wrong or partial answer.

use crate::monomial::Monomial;
use crate::order::MonomialOrder;
use crate::poly::{MultiPoly, PolyError};
use crate::rational::Rational;
use crate::vars::VarRegistry;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroebnerError {
    #[error("resource budget exhausted after {steps} reduction steps ({elapsed_ms} ms)")]
    ResourceLimit { steps: u64, elapsed_ms: u128 },
    #[error("empty polynomial system")]
    EmptySystem,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Resource guard for a basis computation. The defaults allow a million
/// leading-term cancellations and unlimited time.
#[derive(Clone, Debug)]
pub struct Budget {
    pub max_steps: u64,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps: 1_000_000, time_limit: None }
    }
}

struct Meter {
    steps: u64,
    max_steps: u64,
    deadline: Option<Instant>,
    started: Instant,
}

impl Meter {
    fn new(budget: &Budget) -> Self {
        let started = Instant::now();
        Meter {
            steps: 0,
            max_steps: budget.max_steps,
            deadline: budget.time_limit.map(|d| started + d),
            started,
        }
    }

    #[inline]
    fn tick(&mut self) -> Result<(), GroebnerError> {
        self.steps += 1;
        if self.steps > self.max_steps
            || (self.steps & 0xff == 0
                && self.deadline.map_or(false, |d| Instant::now() > d))
        {
            return Err(GroebnerError::ResourceLimit {
                steps: self.steps,
                elapsed_ms: self.started.elapsed().as_millis(),
            });
        }
        Ok(())
    }
}

/// A system of canonical generators with the order its basis runs use.
#[derive(Clone, Debug)]
pub struct PolySystem {
    pub registry: Arc<VarRegistry>,
    pub generators: Vec<MultiPoly>,
    pub order: MonomialOrder,
}

impl PolySystem {
    /// Canonicalizes every generator and drops zeros.
    pub fn new(
        registry: Arc<VarRegistry>,
        generators: Vec<MultiPoly>,
        order: MonomialOrder,
    ) -> Result<Self, PolyError> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if !g.registry().same_as(&registry) {
                return Err(PolyError::RegistryMismatch);
            }
            if !g.is_zero() {
                gens.push(g.canonicalize()?);
            }
        }
        Ok(PolySystem { registry, generators: gens, order })
    }
}

/// Integer polynomial sorted descending under a fixed order; primitive
/// with a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
struct IPoly {
    terms: Vec<(Monomial, BigInt)>,
}

impl IPoly {
    fn lead(&self) -> &(Monomial, BigInt) {
        &self.terms[0]
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn to_ipoly(p: &MultiPoly, order: MonomialOrder) -> IPoly {
    let mut den_lcm = BigInt::one();
    for (_, c) in p.terms() {
        den_lcm = den_lcm.lcm(c.denom());
    }
    let mut terms: Vec<(Monomial, BigInt)> = p
        .terms()
        .iter()
        .map(|(m, c)| (m.clone(), c.numer() * (&den_lcm / c.denom())))
        .collect();
    terms.sort_by(|(a, _), (b, _)| order.cmp(b, a));
    strip_content(&mut terms);
    IPoly { terms }
}

fn from_ipoly(p: &IPoly, registry: Arc<VarRegistry>) -> MultiPoly {
    MultiPoly::from_terms(
        registry,
        p.terms
            .iter()
            .map(|(m, c)| (m.clone(), Rational::from_integer(c.clone())))
            .collect(),
    )
}

/// Divides by the coefficient gcd and makes the first coefficient positive.
fn strip_content(terms: &mut Vec<(Monomial, BigInt)>) {
    if terms.is_empty() {
        return;
    }
    let mut content = BigInt::zero();
    for (_, c) in terms.iter() {
        content = content.gcd(c);
        if content.is_one() {
            break;
        }
    }
    if terms[0].1.is_negative() {
        content = -content;
    }
    if !content.is_one() {
        for (_, c) in terms.iter_mut() {
            *c = &*c / &content;
        }
    }
}

/// cf * f + cg * (shift * g), merged in descending `order`.
fn combine(
    f: &[(Monomial, BigInt)],
    cf: &BigInt,
    g: &[(Monomial, BigInt)],
    cg: &BigInt,
    shift: &Monomial,
    order: MonomialOrder,
) -> Vec<(Monomial, BigInt)> {
    let mut out = Vec::with_capacity(f.len() + g.len());
    let (mut i, mut j) = (0, 0);
    while i < f.len() && j < g.len() {
        let ma = &f[i].0;
        let mb = g[j].0.mul(shift);
        match order.cmp(ma, &mb) {
            Ordering::Greater => {
                out.push((ma.clone(), &f[i].1 * cf));
                i += 1;
            }
            Ordering::Less => {
                out.push((mb, &g[j].1 * cg));
                j += 1;
            }
            Ordering::Equal => {
                let c = &f[i].1 * cf + &g[j].1 * cg;
                if !c.is_zero() {
                    out.push((mb, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    for (m, c) in &f[i..] {
        out.push((m.clone(), c * cf));
    }
    for (m, c) in &g[j..] {
        out.push((m.mul(shift), c * cg));
    }
    out
}

/// S-polynomial in integer form: cross-multiplied so leading terms
/// cancel exactly.
fn s_poly_int(f: &IPoly, g: &IPoly, order: MonomialOrder) -> Vec<(Monomial, BigInt)> {
    let (lm_f, lc_f) = f.lead();
    let (lm_g, lc_g) = g.lead();
    let lcm = lm_f.lcm(lm_g);
    let shift_f = lcm.div(lm_f).expect("lcm divisible");
    let shift_g = lcm.div(lm_g).expect("lcm divisible");
    let d = lc_f.gcd(lc_g);
    let cf = lc_g / &d;
    let cg = -(lc_f / &d);
    // shift f first, then fold in g
    let shifted_f: Vec<(Monomial, BigInt)> = f
        .terms
        .iter()
        .map(|(m, c)| (m.mul(&shift_f), c.clone()))
        .collect();
    combine(&shifted_f, &cf, &g.terms, &cg, &shift_g, order)
}

/// Full fraction-free normal form of `terms` against `basis`. Every
/// monomial of the result is free of the basis leading monomials. The
/// result is a positive integer multiple of the true rational normal
/// form, which is all the basis construction needs.
fn reduce_int(
    mut terms: Vec<(Monomial, BigInt)>,
    basis: &[IPoly],
    order: MonomialOrder,
    meter: &mut Meter,
) -> Result<IPoly, GroebnerError> {
    let mut done: Vec<(Monomial, BigInt)> = Vec::new();
    let mut since_strip = 0u32;
    'outer: while let Some((m, c)) = terms.first().cloned() {
        for g in basis {
            let (lm, lc) = g.lead();
            if let Some(q) = m.div(lm) {
                meter.tick()?;
                let d = c.gcd(lc);
                let a = lc / &d; // positive: basis leads are positive
                let b = -(&c / &d);
                terms = combine(&terms, &a, &g.terms, &b, &q, order);
                if !a.is_one() {
                    for (_, k) in done.iter_mut() {
                        *k = &*k * &a;
                    }
                }
                since_strip += 1;
                if since_strip >= 64 {
                    since_strip = 0;
                    // strip content shared by the frozen and active parts
                    let mut content = BigInt::zero();
                    for (_, k) in done.iter().chain(terms.iter()) {
                        content = content.gcd(k);
                        if content.is_one() {
                            break;
                        }
                    }
                    if !content.is_zero() && !content.is_one() {
                        for (_, k) in done.iter_mut().chain(terms.iter_mut()) {
                            *k = &*k / &content;
                        }
                    }
                }
                continue 'outer;
            }
        }
        // irreducible leading term: freeze it
        done.push((m, c));
        terms.remove(0);
    }
    strip_content(&mut done);
    Ok(IPoly { terms: done })
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct PairKey {
    lcm_degree: u32,
    lcm_exps: Vec<u32>,
    i: usize,
    j: usize,
}

/// Buchberger's algorithm under `system.order`. Returns a reduced basis
/// with canonical elements, sorted ascending by leading monomial.
pub fn buchberger(system: &PolySystem, budget: &Budget) -> Result<Vec<MultiPoly>, GroebnerError> {
    if system.generators.is_empty() {
        return Err(GroebnerError::EmptySystem);
    }
    let mut meter = Meter::new(budget);
    buchberger_int(system, &mut meter)
}

fn buchberger_int(
    system: &PolySystem,
    meter: &mut Meter,
) -> Result<Vec<MultiPoly>, GroebnerError> {
    let order = system.order;
    let mut basis: Vec<IPoly> = Vec::new();
    for g in &system.generators {
        let ip = to_ipoly(g, order);
        if !ip.is_zero() && !basis.contains(&ip) {
            basis.push(ip);
        }
    }
    let mut pairs: BinaryHeap<std::cmp::Reverse<PairKey>> = BinaryHeap::new();
    let mut treated: HashSet<(usize, usize)> = HashSet::new();
    let push_pair = |pairs: &mut BinaryHeap<std::cmp::Reverse<PairKey>>,
                     basis: &[IPoly],
                     i: usize,
                     j: usize| {
        let lcm = basis[i].lead().0.lcm(&basis[j].lead().0);
        pairs.push(std::cmp::Reverse(PairKey {
            lcm_degree: lcm.total_degree(),
            lcm_exps: lcm.exps().to_vec(),
            i,
            j,
        }));
    };
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            push_pair(&mut pairs, &basis, i, j);
        }
    }
    while let Some(std::cmp::Reverse(PairKey { i, j, .. })) = pairs.pop() {
        treated.insert((i, j));
        let (lm_i, lm_j) = (basis[i].lead().0.clone(), basis[j].lead().0.clone());
        if lm_i.coprime(&lm_j) {
            continue; // product criterion
        }
        let lcm = lm_i.lcm(&lm_j);
        // chain criterion: a third element dividing the lcm whose pairs
        // with both ends are already discharged
        let chained = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].lead().0.divides(&lcm)
                && treated.contains(&key(i, k))
                && treated.contains(&key(j, k))
        });
        if chained {
            continue;
        }
        let s = s_poly_int(&basis[i], &basis[j], order);
        let r = reduce_int(s, &basis, order, meter)?;
        if !r.is_zero() {
            let new_idx = basis.len();
            basis.push(r);
            for t in 0..new_idx {
                push_pair(&mut pairs, &basis, t, new_idx);
            }
        }
    }
    // minimalize: drop elements whose lead is divisible by another's
    let mut order_idx: Vec<usize> = (0..basis.len()).collect();
    order_idx.sort_by(|&a, &b| order.cmp(&basis[a].lead().0, &basis[b].lead().0));
    let mut kept: Vec<IPoly> = Vec::new();
    for idx in order_idx {
        let lm = basis[idx].lead().0.clone();
        if !kept.iter().any(|k| k.lead().0.divides(&lm)) {
            kept.push(basis[idx].clone());
        }
    }
    // tail-reduce each element against the others
    for i in 0..kept.len() {
        let me = kept[i].clone();
        let others: Vec<IPoly> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if !others.is_empty() {
            kept[i] = reduce_int(me.terms, &others, order, meter)?;
        }
    }
    let mut out: Vec<MultiPoly> = kept
        .iter()
        .filter(|p| !p.is_zero())
        .map(|p| {
            from_ipoly(p, system.registry.clone())
                .canonicalize()
                .expect("nonzero")
        })
        .collect();
    out.sort_by(|a, b| {
        let (la, _) = a.leading_term(order).expect("nonzero");
        let (lb, _) = b.leading_term(order).expect("nonzero");
        order.cmp(la, lb).then_with(|| a.terms().len().cmp(&b.terms().len()))
    });
    Ok(out)
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Rational S-polynomial: `lcm/lt(p) * p - lcm/lt(q) * q` with leading
/// coefficients divided out.
pub fn s_polynomial(
    p: &MultiPoly,
    q: &MultiPoly,
    order: MonomialOrder,
) -> Result<MultiPoly, GroebnerError> {
    if !p.registry().same_as(q.registry()) {
        return Err(PolyError::RegistryMismatch.into());
    }
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::ZeroPolynomial.into());
    }
    let (lm_p, lc_p) = p.leading_term(order).expect("nonzero");
    let (lm_q, lc_q) = q.leading_term(order).expect("nonzero");
    let lcm = lm_p.lcm(lm_q);
    let a = p.mul_term(&lcm.div(lm_p).expect("divisible"), &(Rational::one() / lc_p));
    let b = q.mul_term(&lcm.div(lm_q).expect("divisible"), &(Rational::one() / lc_q));
    Ok(a.sub(&b)?)
}

/// Full normal form of `p` against `basis` under `order`, with exact
/// rational division: no monomial of the result is divisible by any
/// basis leading monomial, and `p - result` lies in the ideal generated
/// by `basis`. The reducer picked at each step is the first match in
/// basis order, so the result is deterministic even for non-Groebner
/// inputs.
pub fn reduce(
    p: &MultiPoly,
    basis: &[MultiPoly],
    order: MonomialOrder,
) -> Result<MultiPoly, GroebnerError> {
    if basis.is_empty() {
        return Err(GroebnerError::EmptySystem);
    }
    for b in basis {
        if !b.registry().same_as(p.registry()) {
            return Err(PolyError::RegistryMismatch.into());
        }
        if b.is_zero() {
            return Err(PolyError::ZeroPolynomial.into());
        }
    }
    let leads: Vec<(&Monomial, &Rational)> = basis
        .iter()
        .map(|b| b.leading_term(order).expect("nonzero"))
        .collect();
    // working copy sorted under `order`
    let mut work: Vec<(Monomial, Rational)> = p.terms().to_vec();
    work.sort_by(|(a, _), (b, _)| order.cmp(b, a));
    let mut done: Vec<(Monomial, Rational)> = Vec::new();
    'outer: while let Some((m, c)) = work.first().cloned() {
        for (g, (lm, lc)) in basis.iter().zip(&leads) {
            if let Some(q) = m.div(lm) {
                let factor = &c / *lc;
                // work -= factor * q * g
                let mut sub: Vec<(Monomial, Rational)> = g
                    .terms()
                    .iter()
                    .map(|(gm, gc)| (gm.mul(&q), gc * &factor))
                    .collect();
                sub.sort_by(|(a, _), (b, _)| order.cmp(b, a));
                work = merge_rational(&work, &sub, order);
                continue 'outer;
            }
        }
        done.push((m, c));
        work.remove(0);
    }
    Ok(MultiPoly::from_terms(p.registry().clone(), done))
}

/// a - b, both sorted descending under `order`.
fn merge_rational(
    a: &[(Monomial, Rational)],
    b: &[(Monomial, Rational)],
    order: MonomialOrder,
) -> Vec<(Monomial, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match order.cmp(&a[i].0, &b[j].0) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((b[j].0.clone(), -&b[j].1));
                j += 1;
            }
            Ordering::Equal => {
                let c = &a[i].1 - &b[j].1;
                if !c.is_zero() {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    for (m, c) in &b[j..] {
        out.push((m.clone(), -c));
    }
    out
}

/// Result of the presolve pass.
struct Presolved {
    generators: Vec<MultiPoly>,
    inconsistent: bool,
}

/// Substitutes away non-kept variables that occur linearly with a
/// constant coefficient in some generator. Preserves the elimination
/// ideal over the kept variables exactly.
fn presolve(
    mut gens: Vec<MultiPoly>,
    keep: &[bool],
    registry: &Arc<VarRegistry>,
) -> Result<Presolved, GroebnerError> {
    'restart: loop {
        for v in 0..registry.len() {
            if keep[v] {
                continue;
            }
            for gi in 0..gens.len() {
                let g = &gens[gi];
                if g.deg_in(v) != 1 {
                    continue;
                }
                let c1 = g.coeff_of_power(v, 1);
                if !c1.is_constant() || c1.is_zero() {
                    continue;
                }
                let c1 = c1.terms()[0].1.clone();
                let rest = g.coeff_of_power(v, 0);
                let replacement = rest.scale(&(-Rational::one() / c1));
                gens.remove(gi);
                let mut next = Vec::with_capacity(gens.len());
                for p in &gens {
                    let s = p.substitute(v, &replacement)?;
                    if !s.is_zero() {
                        next.push(s.canonicalize()?);
                    }
                }
                next.dedup_by(|a, b| a == b);
                gens = next;
                continue 'restart;
            }
        }
        break;
    }
    let inconsistent = gens.iter().any(|g| !g.is_zero() && g.is_constant());
    Ok(Presolved { generators: gens, inconsistent })
}

/// Elimination ideal basis: generators of `system` projected onto the
/// kept variables (indices into the registry). The system's own order is
/// ignored; a block order with the eliminated block in front is used.
/// Output polynomials live in the original registry, mention only kept
/// variables, and form a Groebner basis of the elimination ideal under
/// graded-lex restricted to the kept block.
pub fn eliminate(
    system: &PolySystem,
    keep: &[usize],
    budget: &Budget,
) -> Result<Vec<MultiPoly>, GroebnerError> {
    let mut meter = Meter::new(budget);
    eliminate_metered(system, keep, &mut meter)
}

fn eliminate_metered(
    system: &PolySystem,
    keep: &[usize],
    meter: &mut Meter,
) -> Result<Vec<MultiPoly>, GroebnerError> {
    let n = system.registry.len();
    let mut kept = vec![false; n];
    for &k in keep {
        assert!(k < n, "keep index out of range");
        kept[k] = true;
    }
    let pre = presolve(system.generators.clone(), &kept, &system.registry)?;
    if pre.inconsistent {
        let one = MultiPoly::constant(system.registry.clone(), Rational::one());
        return Ok(vec![one]);
    }
    if pre.generators.is_empty() {
        return Ok(Vec::new());
    }
    // variables still to eliminate: those occurring and not kept
    let mut occurs = vec![false; n];
    for g in &pre.generators {
        for (i, used) in g.vars_used().into_iter().enumerate() {
            occurs[i] = occurs[i] || used;
        }
    }
    let elim: Vec<usize> = (0..n).filter(|&i| occurs[i] && !kept[i]).collect();
    // permutation: eliminated block first, everything else after
    let mut perm_new_to_old: Vec<usize> = elim.clone();
    perm_new_to_old.extend((0..n).filter(|i| !elim.contains(i)));
    let permuted_names: Vec<String> = perm_new_to_old
        .iter()
        .map(|&i| system.registry.name(i).to_string())
        .collect();
    let permuted_reg = VarRegistry::new(permuted_names);
    let permuted_gens: Vec<MultiPoly> = pre
        .generators
        .iter()
        .map(|g| g.map_registry(permuted_reg.clone(), &perm_new_to_old))
        .collect();
    let block = PolySystem::new(
        permuted_reg.clone(),
        permuted_gens,
        MonomialOrder::BlockElim(elim.len()),
    )?;
    let basis = buchberger_int(&block, meter)?;
    // invert the permutation for mapping back
    let mut perm_old_to_new = vec![0usize; n];
    for (new, &old) in perm_new_to_old.iter().enumerate() {
        perm_old_to_new[old] = new;
    }
    let mut out = Vec::new();
    for b in basis {
        let used = b.vars_used();
        let pure = (0..elim.len()).all(|front| !used[front]);
        if pure {
            out.push(b.map_registry(system.registry.clone(), &perm_old_to_new));
        }
    }
    Ok(out)
}

/// Staged elimination: removes the non-kept variables in batches,
/// dependent-first (highest registry index first), running a full basis
/// per stage. Slower per stage but each stage has a smaller block, which
/// can succeed where the one-shot order blows up.
pub fn eliminate_staged(
    system: &PolySystem,
    keep: &[usize],
    batch: usize,
    budget: &Budget,
) -> Result<Vec<MultiPoly>, GroebnerError> {
    assert!(batch > 0);
    let mut meter = Meter::new(budget);
    let n = system.registry.len();
    let mut kept = vec![false; n];
    for &k in keep {
        kept[k] = true;
    }
    let mut gens = system.generators.clone();
    loop {
        let mut occurs = vec![false; n];
        for g in &gens {
            for (i, used) in g.vars_used().into_iter().enumerate() {
                occurs[i] = occurs[i] || used;
            }
        }
        let remaining: Vec<usize> = (0..n).filter(|&i| occurs[i] && !kept[i]).collect();
        if remaining.is_empty() {
            break;
        }
        // batch from the dependent end
        let cut = remaining.len().saturating_sub(batch);
        let batch_vars: HashSet<usize> = remaining[cut..].iter().copied().collect();
        let stage_keep: Vec<usize> = (0..n).filter(|i| !batch_vars.contains(i)).collect();
        let stage = PolySystem::new(system.registry.clone(), gens, system.order)?;
        gens = eliminate_metered(&stage, &stage_keep, &mut meter)?;
        if gens.is_empty() {
            return Ok(Vec::new());
        }
    }
    // final pass guarantees a Groebner basis over the kept variables
    let last = PolySystem::new(system.registry.clone(), gens, system.order)?;
    eliminate_metered(&last, keep, &mut meter)
}
