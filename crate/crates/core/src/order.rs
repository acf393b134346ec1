//! Monomial orders.
//!
//! All three are total, multiplicative (`a > b` implies `ac > bc`) and
//! have 1 as the unique minimum, so polynomial division and Buchberger's
//! algorithm terminate under any of them.

use crate::monomial::Monomial;
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Pure lexicographic on the exponent vector.
    Lex,
    /// Total degree first, ties broken lexicographically.
    GradedLex,
    /// Elimination order: the first `k` exponents compared by GradedLex,
    /// ties broken by GradedLex on the rest. Any monomial touching the
    /// first block beats every monomial outside it, which is what makes
    /// basis elements free of the block generate the elimination ideal.
    BlockElim(usize),
}

fn graded_lex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.len(), b.len());
        match *self {
            MonomialOrder::Lex => a.exps().cmp(b.exps()),
            MonomialOrder::GradedLex => graded_lex(a.exps(), b.exps()),
            MonomialOrder::BlockElim(k) => {
                let k = k.min(a.len());
                graded_lex(&a.exps()[..k], &b.exps()[..k])
                    .then_with(|| graded_lex(&a.exps()[k..], &b.exps()[k..]))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonomialOrder::Lex => "lex",
            MonomialOrder::GradedLex => "grlex",
            MonomialOrder::BlockElim(_) => "block-elim",
        }
    }
}

impl std::fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MonomialOrder::BlockElim(k) => write!(f, "block-elim({k})"),
            other => f.write_str(other.name()),
        }
    }
}
