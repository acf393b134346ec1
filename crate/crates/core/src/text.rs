//! Polynomial text form: rendering and exact round-trip parsing.
//!
//! Output lists terms in descending pure-lex monomial order with `^`
//! for powers, e.g. `x^2 - 6x + y^2 - 4y + 9`. For registries whose
//! names are all single letters, variable factors are juxtaposed
//! (`xy^2`); otherwise an explicit `*` separates them so the text stays
//! unambiguous. The parser accepts both spellings, rational
//! coefficients (`3/4x`), and an optional trailing `= 0`.

use crate::monomial::Monomial;
use crate::poly::{MultiPoly, PolyError};
use crate::rational::{rational_to_string, Rational};
use crate::vars::VarRegistry;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let compact = self.registry().names().iter().all(|n| n.len() == 1);
        for (i, (m, c)) in self.terms().iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let abs = c.abs();
            if m.is_one() {
                f.write_str(&rational_to_string(&abs))?;
                continue;
            }
            let mut wrote_factor = false;
            if !abs.is_one() {
                f.write_str(&rational_to_string(&abs))?;
                wrote_factor = true;
            }
            for (v, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if wrote_factor && !compact {
                    f.write_str("*")?;
                }
                wrote_factor = true;
                f.write_str(self.registry().name(v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn read_uint(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
        }
    }

    fn read_ident_run(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.bytes.len() || !self.bytes[self.pos].is_ascii_alphabetic() {
            return None;
        }
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }
}

/// Splits an identifier run like `xy` into registry variables, greedily
/// matching the longest name first.
fn split_vars(run: &str, reg: &VarRegistry) -> Result<Vec<usize>, PolyError> {
    let mut out = Vec::new();
    let mut rest = run;
    'outer: while !rest.is_empty() {
        let mut candidates: Vec<&str> = reg.names().iter().map(|s| s.as_str()).collect();
        candidates.sort_by_key(|n| std::cmp::Reverse(n.len()));
        for name in candidates {
            if rest.starts_with(name) {
                out.push(reg.index_of(name).expect("registry name"));
                rest = &rest[name.len()..];
                continue 'outer;
            }
        }
        return Err(PolyError::UnknownVariable(rest.to_string()));
    }
    Ok(out)
}

/// Parses the text form produced by `Display`. Accepts an optional
/// trailing `= 0`.
pub fn parse_poly(text: &str, registry: Arc<VarRegistry>) -> Result<MultiPoly, PolyError> {
    let mut text = text.trim();
    if let Some(stripped) = text.strip_suffix('0') {
        let stripped = stripped.trim_end();
        if let Some(before_eq) = stripped.strip_suffix('=') {
            text = before_eq.trim_end();
        }
    }
    if text.is_empty() {
        return Err(PolyError::Parse("empty polynomial".into()));
    }
    if text == "0" {
        return Ok(MultiPoly::zero(registry));
    }
    let mut cur = Cursor { bytes: text.as_bytes(), pos: 0 };
    let nvars = registry.len();
    let mut terms: Vec<(Monomial, Rational)> = Vec::new();
    let mut first = true;
    loop {
        let mut sign = 1i32;
        match cur.peek() {
            None if first => return Err(PolyError::Parse("empty polynomial".into())),
            None => break,
            Some(b'+') => cur.bump(),
            Some(b'-') => {
                sign = -1;
                cur.bump();
            }
            Some(_) if first => {}
            Some(c) => {
                return Err(PolyError::Parse(format!(
                    "expected `+` or `-` before next term, found `{}`",
                    c as char
                )))
            }
        }
        first = false;
        // coefficient
        let mut coeff = Rational::one();
        let mut saw_anything = false;
        if let Some(num) = cur.read_uint() {
            saw_anything = true;
            let n: BigInt = num.parse().expect("digits");
            coeff = Rational::from_integer(n);
            if cur.peek() == Some(b'/') {
                cur.bump();
                let den = cur
                    .read_uint()
                    .ok_or_else(|| PolyError::Parse("expected denominator after `/`".into()))?;
                let d: BigInt = den.parse().expect("digits");
                if d.is_zero() {
                    return Err(PolyError::Parse("zero denominator".into()));
                }
                coeff /= Rational::from_integer(d);
            }
        }
        if sign < 0 {
            coeff = -coeff;
        }
        // monomial factors
        let mut exps = vec![0u32; nvars];
        loop {
            if cur.peek() == Some(b'*') {
                cur.bump();
            }
            let Some(run) = cur.read_ident_run() else { break };
            saw_anything = true;
            let vars = split_vars(&run, &registry)?;
            // a power binds to the last variable of the run
            let mut power = 1u32;
            if cur.peek() == Some(b'^') {
                cur.bump();
                let e = cur
                    .read_uint()
                    .ok_or_else(|| PolyError::Parse("expected exponent after `^`".into()))?;
                power = e
                    .parse()
                    .map_err(|_| PolyError::Parse(format!("exponent `{e}` out of range")))?;
            }
            for (i, &v) in vars.iter().enumerate() {
                let p = if i + 1 == vars.len() { power } else { 1 };
                exps[v] = exps[v]
                    .checked_add(p)
                    .ok_or_else(|| PolyError::Parse("exponent overflow".into()))?;
            }
        }
        if !saw_anything {
            return Err(PolyError::Parse("expected a term".into()));
        }
        terms.push((Monomial::new(exps), coeff));
        if cur.peek().is_none() {
            break;
        }
    }
    Ok(MultiPoly::from_terms(registry, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg_xy() -> Arc<VarRegistry> {
        VarRegistry::new(vec!["x", "y"])
    }

    #[test]
    fn renders_descending_lex() {
        let reg = reg_xy();
        let p = parse_poly("y^2 + 9 - 6x - 4y + x^2", reg).unwrap();
        assert_eq!(p.to_string(), "x^2 - 6x + y^2 - 4y + 9");
    }

    #[test]
    fn renders_unit_and_negative_coefficients() {
        let reg = reg_xy();
        assert_eq!(parse_poly("-xy - x + y^2 + 3y + 2", reg.clone()).unwrap().to_string(),
            "-xy - x + y^2 + 3y + 2");
        assert_eq!(parse_poly("y - x + 2", reg.clone()).unwrap().to_string(), "-x + y + 2");
        assert_eq!(parse_poly("0", reg).unwrap().to_string(), "0");
    }

    #[test]
    fn round_trips_exactly() {
        let reg = reg_xy();
        for s in [
            "x^2 - 6x + y^2 - 4y + 9",
            "-xy - x + y^2 + 3y + 2",
            "x^4y - 40x^3y - 2x^2y^3 + 600x^2y - 120xy^3 - 4000xy + y^5 - 200y^3 + 10000y",
            "3/4x^2 - 1/2y + 7",
            "x^8y^4 - 2x^4y^4 - 2x^4y^2 + y^4 - 2y^2 + 1",
        ] {
            let p = parse_poly(s, reg.clone()).unwrap();
            let q = parse_poly(&p.to_string(), reg.clone()).unwrap();
            assert_eq!(p, q, "{s}");
        }
    }

    #[test]
    fn accepts_star_spelling_and_equation_suffix() {
        let reg = reg_xy();
        let a = parse_poly("x^2 - 6x + y^2 - 4y + 9 = 0", reg.clone()).unwrap();
        let b = parse_poly("x^2 - 6*x + y^2 - 4*y + 9", reg.clone()).unwrap();
        let c = parse_poly("x*x - 6x + y*y - 4y + 9", reg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn multi_char_names_render_with_stars() {
        let reg = VarRegistry::new(vec!["x_P", "y_P"]);
        let p = parse_poly("x_P * y_P + 2", reg.clone()).unwrap();
        assert_eq!(p.to_string(), "x_P*y_P + 2");
        assert_eq!(parse_poly(&p.to_string(), reg).unwrap(), p);
    }

    #[test]
    fn rejects_unknown_variables_and_garbage() {
        let reg = reg_xy();
        assert!(matches!(
            parse_poly("x + z", reg.clone()),
            Err(PolyError::UnknownVariable(_))
        ));
        assert!(parse_poly("x + + y", reg.clone()).is_err());
        assert!(parse_poly("x ^", reg.clone()).is_err());
        assert!(parse_poly("", reg).is_err());
    }
}
