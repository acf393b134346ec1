//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept sorted by descending pure-lex monomial order with no
//! zero coefficients, so equality is structural and text output falls
//! straight out of iteration order. The canonical comparison form
//! (integer coefficients, content 1, lex-greatest monomial positive) is
//! produced by [`MultiPoly::canonicalize`].

use crate::monomial::Monomial;
use crate::order::MonomialOrder;
use crate::rational::Rational;
use crate::vars::VarRegistry;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomials use different variable registries")]
    RegistryMismatch,
    #[error("the zero polynomial has no canonical form")]
    ZeroPolynomial,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Debug)]
pub struct MultiPoly {
    registry: Arc<VarRegistry>,
    /// Sorted by descending lex monomial, no zero coefficients.
    terms: Vec<(Monomial, Rational)>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.registry.same_as(&other.registry) && self.terms == other.terms
    }
}
impl Eq for MultiPoly {}

impl MultiPoly {
    pub fn zero(registry: Arc<VarRegistry>) -> Self {
        MultiPoly { registry, terms: Vec::new() }
    }

    pub fn constant(registry: Arc<VarRegistry>, c: Rational) -> Self {
        let mut p = MultiPoly::zero(registry);
        if !c.is_zero() {
            let one = Monomial::one(p.registry.len());
            p.terms.push((one, c));
        }
        p
    }

    pub fn var(registry: Arc<VarRegistry>, i: usize) -> Self {
        assert!(i < registry.len());
        let m = Monomial::var(registry.len(), i, 1);
        MultiPoly { registry, terms: vec![(m, Rational::one())] }
    }

    pub fn var_named(registry: &Arc<VarRegistry>, name: &str) -> Result<Self, PolyError> {
        let i = registry
            .index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(MultiPoly::var(registry.clone(), i))
    }

    /// Builds from arbitrary (monomial, coefficient) pairs: sorts, merges
    /// duplicates, drops zeros.
    pub fn from_terms(registry: Arc<VarRegistry>, terms: Vec<(Monomial, Rational)>) -> Self {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), registry.len(), "monomial arity mismatch");
            let entry = map.entry(m).or_insert_with(Rational::zero);
            *entry += c;
        }
        let terms: Vec<_> = map.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        MultiPoly { registry, terms }
    }

    pub fn registry(&self) -> &Arc<VarRegistry> {
        &self.registry
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Max total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.total_degree()).max().unwrap_or(0)
    }

    /// Max exponent of variable `i`.
    pub fn deg_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m[i]).max().unwrap_or(0)
    }

    /// Which variables actually occur.
    pub fn vars_used(&self) -> Vec<bool> {
        let mut used = vec![false; self.registry.len()];
        for (m, _) in &self.terms {
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        used
    }

    fn check_registry(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.registry.same_as(&other.registry) {
            Ok(())
        } else {
            Err(PolyError::RegistryMismatch)
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_registry(other)?;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match mb.cmp(ma) {
                std::cmp::Ordering::Less => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((mb.clone(), cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = ca + cb;
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Ok(MultiPoly { registry: self.registry.clone(), terms: out })
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            registry: self.registry.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.registry.clone());
        }
        MultiPoly {
            registry: self.registry.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Multiplies by a single term. Scaling preserves descending order
    /// because monomial multiplication is order-compatible.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.registry.clone());
        }
        MultiPoly {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mm, k)| (mm.mul(m), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_registry(other)?;
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let entry = map.entry(m).or_insert_with(Rational::zero);
                *entry += ca * cb;
            }
        }
        let terms: Vec<_> = map.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Ok(MultiPoly { registry: self.registry.clone(), terms })
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut base = self.clone();
        let one_reg = self.registry.clone();
        let mut acc = MultiPoly::constant(one_reg, Rational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same registry");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same registry");
            }
        }
        acc
    }

    /// d/dv, exact.
    pub fn partial_derivative(&self, v: usize) -> MultiPoly {
        assert!(v < self.registry.len());
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m[v];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[v] = e - 1;
            terms.push((Monomial::new(exps), c * Rational::from_integer(BigInt::from(e))));
        }
        // Lowering one exponent preserves relative lex order of the
        // surviving terms.
        MultiPoly { registry: self.registry.clone(), terms }
    }

    /// Coefficient of v^k, as a polynomial with the v-exponent zeroed.
    pub fn coeff_of_power(&self, v: usize, k: u32) -> MultiPoly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            if m[v] == k {
                let mut exps = m.exps().to_vec();
                exps[v] = 0;
                terms.push((Monomial::new(exps), c.clone()));
            }
        }
        MultiPoly::from_terms(self.registry.clone(), terms)
    }

    /// Substitutes `replacement` for variable `v` (Horner on v-degree).
    pub fn substitute(&self, v: usize, replacement: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_registry(replacement)?;
        let d = self.deg_in(v);
        if d == 0 {
            return Ok(self.clone());
        }
        let mut acc = self.coeff_of_power(v, d);
        for k in (0..d).rev() {
            acc = acc.mul(replacement)?.add(&self.coeff_of_power(v, k))?;
        }
        Ok(acc)
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.registry.len());
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.registry.len());
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (i, &e) in m.exps().iter().enumerate() {
                t *= point[i].powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Leading term under `order` (linear scan; the storage order is
    /// already the answer for Lex).
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Rational)> {
        if order == MonomialOrder::Lex {
            return self.terms.first().map(|(m, c)| (m, c));
        }
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
            .map(|(m, c)| (m, c))
    }

    /// Canonical comparison form: integer coefficients, content 1, and a
    /// positive coefficient on the lexicographically greatest monomial.
    /// The zero polynomial has no canonical form.
    pub fn canonicalize(&self) -> Result<MultiPoly, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut den_lcm = BigInt::one();
        for (_, c) in &self.terms {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigInt::zero();
        let ints: Vec<BigInt> = self
            .terms
            .iter()
            .map(|(_, c)| {
                let n = c.numer() * (&den_lcm / c.denom());
                content = content.gcd(&n);
                n
            })
            .collect();
        // Lex-greatest monomial is terms[0] by the storage invariant.
        if ints[0].is_negative() {
            content = -content;
        }
        let terms = self
            .terms
            .iter()
            .zip(ints)
            .map(|((m, _), n)| (m.clone(), Rational::from_integer(n / &content)))
            .collect();
        Ok(MultiPoly { registry: self.registry.clone(), terms })
    }

    /// Exact division: returns `q` with `self * q == dividend`, or None.
    pub fn divide_exact(&self, dividend: &MultiPoly) -> Option<MultiPoly> {
        if !self.registry.same_as(&dividend.registry) || self.is_zero() {
            return None;
        }
        let mut rem = dividend.clone();
        let mut quot_terms: Vec<(Monomial, Rational)> = Vec::new();
        let (lm, lc) = (&self.terms[0].0, &self.terms[0].1);
        while !rem.is_zero() {
            let (rm, rc) = (&rem.terms[0].0, &rem.terms[0].1);
            let m = rm.div(lm)?;
            let c = rc / lc;
            // rem loses its lex-leading term each round, so this ends.
            rem = rem.sub(&self.mul_term(&m, &c)).expect("same registry");
            quot_terms.push((m, c));
        }
        Some(MultiPoly::from_terms(self.registry.clone(), quot_terms))
    }

    /// True when `self` divides `other` exactly.
    pub fn divides(&self, other: &MultiPoly) -> bool {
        self.divide_exact(other).is_some()
    }

    /// Reinterprets over `new_registry`; `perm[new_index] = old_index`.
    pub fn map_registry(&self, new_registry: Arc<VarRegistry>, perm: &[usize]) -> MultiPoly {
        assert_eq!(new_registry.len(), self.registry.len());
        assert_eq!(perm.len(), self.registry.len());
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.permuted(perm), c.clone()))
            .collect();
        MultiPoly::from_terms(new_registry, terms)
    }

    /// Carries the polynomial into a larger registry; `var_map[old_index] = new_index`.
    pub fn embed(&self, new_registry: Arc<VarRegistry>, var_map: &[usize]) -> MultiPoly {
        assert_eq!(var_map.len(), self.registry.len());
        assert!(new_registry.len() >= self.registry.len());
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![0u32; new_registry.len()];
                for (old, &e) in m.exps().iter().enumerate() {
                    exps[var_map[old]] = e;
                }
                (Monomial::new(exps), c.clone())
            })
            .collect();
        MultiPoly::from_terms(new_registry, terms)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Out-of-range big integers: fall back to a quotient of lossy halves.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// |p(at)| scaled by the sum of absolute term values at the same point, so
/// the result is comparable across curves of any coefficient size. Zero
/// denominators (all terms vanish) fall back to the absolute value.
pub fn relative_residual(p: &MultiPoly, at: &[f64]) -> f64 {
    assert_eq!(at.len(), p.registry().len());
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (m, c) in p.terms() {
        let mut t = rational_to_f64(c);
        for (v, &e) in m.exps().iter().enumerate() {
            t *= at[v].powi(e as i32);
        }
        num += t;
        den += t.abs();
    }
    if den == 0.0 {
        num.abs()
    } else {
        num.abs() / den
    }
}
