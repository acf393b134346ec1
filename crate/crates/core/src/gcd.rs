//! Multivariate gcd and squarefree parts.
//!
//! Gcds are computed by primitive pseudo-remainder sequences: pick a
//! main variable, split each polynomial into content times primitive
//! part (the content gcd recurses into fewer variables), run a
//! fraction-free remainder loop, and strip contents as they appear.
//! Everything returned is canonical, so gcds are unique representatives.

use crate::monomial::Monomial;
use crate::poly::MultiPoly;
use crate::rational::Rational;
use num_traits::One;

/// Degree of `p` in variable `v`; None when `p` is zero.
fn deg_v(p: &MultiPoly, v: usize) -> Option<u32> {
    if p.is_zero() {
        None
    } else {
        Some(p.deg_in(v))
    }
}

/// gcd of all coefficients of `p` viewed as a polynomial in `v`.
fn content_wrt(p: &MultiPoly, v: usize) -> MultiPoly {
    let d = p.deg_in(v);
    let mut acc = MultiPoly::zero(p.registry().clone());
    for k in 0..=d {
        let c = p.coeff_of_power(v, k);
        if !c.is_zero() {
            acc = gcd(&acc, &c);
            if acc.is_constant() && !acc.is_zero() {
                break;
            }
        }
    }
    acc
}

fn primitive_wrt(p: &MultiPoly, v: usize) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_wrt(p, v);
    c.divide_exact(p).expect("content divides")
}

/// One fraction-free division pass: reduces `a` below `deg_v(b)`.
fn pseudo_rem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let db = b.deg_in(v);
    let lb = b.coeff_of_power(v, db);
    let mut r = a.clone();
    while let Some(dr) = deg_v(&r, v) {
        if dr < db {
            break;
        }
        let lr = r.coeff_of_power(v, dr);
        let shift = Monomial::var(r.registry().len(), v, dr - db);
        let scaled_b = b.mul(&lr).expect("registry").mul_term(&shift, &Rational::one());
        r = r.mul(&lb).expect("registry").sub(&scaled_b).expect("registry");
    }
    r
}

/// Canonical gcd over the rationals. `gcd(0, q)` is canonical `q`; two
/// constants have gcd 1 (units of the coefficient field).
pub fn gcd(p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    debug_assert!(p.registry().same_as(q.registry()));
    if p.is_zero() {
        return if q.is_zero() { q.clone() } else { q.canonicalize().expect("nonzero") };
    }
    if q.is_zero() {
        return p.canonicalize().expect("nonzero");
    }
    if p.is_constant() || q.is_constant() {
        return MultiPoly::constant(p.registry().clone(), Rational::one());
    }
    // main variable: first one occurring in either operand
    let used_p = p.vars_used();
    let used_q = q.vars_used();
    let v = (0..p.registry().len())
        .find(|&i| used_p[i] || used_q[i])
        .expect("non-constant operands use a variable");
    let (cont_p, cont_q) = (content_wrt(p, v), content_wrt(q, v));
    let d = gcd(&cont_p, &cont_q);
    let mut a = cont_p.divide_exact(p).expect("content divides");
    let mut b = cont_q.divide_exact(q).expect("content divides");
    if a.deg_in(v) < b.deg_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        match deg_v(&b, v) {
            None => {
                let g = primitive_wrt(&a, v);
                return d.mul(&g).expect("registry").canonicalize().expect("nonzero");
            }
            Some(0) => {
                // primitive parts coprime in v
                return d.canonicalize().expect("nonzero");
            }
            Some(_) => {
                let r = pseudo_rem(&a, &b, v);
                a = b;
                b = primitive_wrt(&r, v);
            }
        }
    }
}

/// Removes factors repeated along `v`: `p / gcd(p, dp/dv)`, canonical.
/// A polynomial free of `v` is returned canonicalized unchanged.
pub fn squarefree_part(p: &MultiPoly, v: usize) -> MultiPoly {
    assert!(!p.is_zero(), "squarefree part of zero");
    if p.deg_in(v) == 0 {
        return p.canonicalize().expect("nonzero");
    }
    // split off the part free of v: factors in the content must survive
    // untouched, or dividing by gcd(p, dp/dv) would strip them too
    let cont = content_wrt(p, v);
    let prim = cont.divide_exact(p).expect("content divides");
    let dp = prim.partial_derivative(v);
    let g = gcd(&prim, &dp);
    let reduced = g.divide_exact(&prim).expect("gcd divides");
    cont.mul(&reduced)
        .expect("same registry")
        .canonicalize()
        .expect("nonzero")
}

/// Squarefree along every variable that occurs.
pub fn squarefree_all(p: &MultiPoly) -> MultiPoly {
    let mut out = p.canonicalize().expect("nonzero");
    for v in 0..p.registry().len() {
        if out.deg_in(v) > 0 {
            out = squarefree_part(&out, v);
        }
    }
    out
}
