//! The construction script language.
//!
//! One statement per line: either a named step (`P' = Midpoint[P, C]`,
//! `C = (2, 3)`) or the goal (`LocusEquation[P', P]`, `Locus[P', P]`,
//! `Envelope[f, A]`). `#` starts a comment. Identifiers admit the
//! apostrophe so names like `P'` read as written. Parsing recovers per
//! line: every bad line yields its own diagnostic with a 1-based
//! position, and the whole script is checked for duplicate names,
//! forward references, and the single-goal rule.

use std::collections::HashMap;

use crate::geom::{
    Axis, ConstructionProgram, Expr, GeoDef, Goal, GoalKind, RadiusSpec, Severity,
};
use crate::rational::{rational_to_string, Rational};
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
}

impl std::fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {tag}: {}", self.line, self.column, self.message)
    }
}

/// Parse outcome: the program is present unless an error-severity
/// diagnostic was raised; warnings ride along either way.
#[derive(Debug)]
pub struct ParseResult {
    pub program: Option<ConstructionProgram>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseResult {
    pub fn into_program(self) -> Result<ConstructionProgram, Vec<ParseDiagnostic>> {
        match self.program {
            Some(p) => Ok(p),
            None => Err(self.diagnostics),
        }
    }
}

// ---------------------------------------------------------------- lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(Rational),
    Eq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(r) => write!(f, "`{}`", rational_to_string(r)),
            Tok::Eq => write!(f, "`=`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Sp {
    tok: Tok,
    col: usize,
}

fn diag(line: usize, column: usize, message: impl Into<String>) -> ParseDiagnostic {
    ParseDiagnostic {
        line,
        column,
        severity: Severity::Error,
        message: message.into(),
    }
}

/// Exact decimals only: at most this many fractional digits.
const MAX_DECIMAL_PLACES: usize = 6;

fn lex_line(line: &str, lineno: usize) -> Result<Vec<Sp>, ParseDiagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '=' => {
                out.push(Sp { tok: Tok::Eq, col });
                i += 1;
            }
            '(' => {
                out.push(Sp { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Sp { tok: Tok::RParen, col });
                i += 1;
            }
            '[' => {
                out.push(Sp { tok: Tok::LBracket, col });
                i += 1;
            }
            ']' => {
                out.push(Sp { tok: Tok::RBracket, col });
                i += 1;
            }
            ',' => {
                out.push(Sp { tok: Tok::Comma, col });
                i += 1;
            }
            '+' => {
                out.push(Sp { tok: Tok::Plus, col });
                i += 1;
            }
            '-' => {
                out.push(Sp { tok: Tok::Minus, col });
                i += 1;
            }
            '*' => {
                out.push(Sp { tok: Tok::Star, col });
                i += 1;
            }
            '/' => {
                out.push(Sp { tok: Tok::Slash, col });
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Sp { tok: Tok::Ident(s), col });
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut frac = String::new();
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    let fstart = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    frac = chars[fstart..i].iter().collect();
                    if frac.is_empty() {
                        return Err(diag(lineno, col, "digits expected after the decimal point"));
                    }
                }
                let text: String = chars[start..i].iter().collect();
                if frac.len() > MAX_DECIMAL_PLACES {
                    return Err(diag(
                        lineno,
                        col,
                        format!(
                            "literal `{text}` has more than {MAX_DECIMAL_PLACES} decimal places; \
                             write it as a fraction"
                        ),
                    ));
                }
                let int_part: BigInt = chars[start..i]
                    .iter()
                    .take_while(|c| c.is_ascii_digit())
                    .collect::<String>()
                    .parse()
                    .expect("digits");
                let den = BigInt::from(10).pow(frac.len() as u32);
                let num = if frac.is_empty() {
                    int_part
                } else {
                    int_part * &den + frac.parse::<BigInt>().expect("digits")
                };
                out.push(Sp {
                    tok: Tok::Number(Rational::new(num, den)),
                    col,
                });
            }
            other => {
                return Err(diag(lineno, col, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(out)
}

// --------------------------------------------------------------- parsing

struct Cursor<'a> {
    toks: &'a [Sp],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Sp], line: usize, end_col: usize) -> Self {
        Cursor {
            toks,
            pos: 0,
            line,
            end_col,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|s| s.col)
            .unwrap_or(self.end_col)
    }

    fn next(&mut self) -> Option<&Sp> {
        let sp = self.toks.get(self.pos);
        if sp.is_some() {
            self.pos += 1;
        }
        sp
    }

    fn err(&self, message: impl Into<String>) -> ParseDiagnostic {
        diag(self.line, self.col(), message)
    }

    fn expect(&mut self, want: Tok, ctx: &str) -> Result<(), ParseDiagnostic> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want} {ctx}, found {t}"))),
            None => Err(self.err(format!("expected {want} {ctx}, found end of line"))),
        }
    }

    fn expect_ident(&mut self, ctx: &str) -> Result<String, ParseDiagnostic> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.err(format!("expected a name {ctx}, found {t}"))),
            None => Err(self.err(format!("expected a name {ctx}, found end of line"))),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseDiagnostic> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected {t} after the statement"))),
        }
    }
}

enum Stmt {
    Step(String, GeoDef),
    Goal(Goal),
}

const GOAL_COMMANDS: [(&str, GoalKind); 3] = [
    ("LocusEquation", GoalKind::LocusEquation),
    ("Locus", GoalKind::Locus),
    ("Envelope", GoalKind::Envelope),
];

fn goal_kind(name: &str) -> Option<GoalKind> {
    GOAL_COMMANDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, k)| *k)
}

fn goal_name(kind: GoalKind) -> &'static str {
    GOAL_COMMANDS
        .iter()
        .find(|(_, k)| *k == kind)
        .map(|(n, _)| *n)
        .expect("all goal kinds listed")
}

/// Kinds already defined, for resolving `Circle[C, X]` second arguments.
type KindTable<'a> = HashMap<&'a str, &'a GeoDef>;

fn parse_statement(c: &mut Cursor, kinds: &KindTable) -> Result<Stmt, ParseDiagnostic> {
    // goal statements have no `Name =` prefix
    if let (Some(Tok::Ident(id)), Some(Tok::LBracket)) = (c.peek(), c.peek2()) {
        if let Some(kind) = goal_kind(id) {
            let cmd = id.clone();
            c.next();
            c.next();
            let target = c.expect_ident(&format!("as the first argument of `{cmd}`"))?;
            c.expect(Tok::Comma, &format!("between the arguments of `{cmd}`"))?;
            let mover = c.expect_ident(&format!("as the second argument of `{cmd}`"))?;
            c.expect(Tok::RBracket, &format!("to close `{cmd}`"))?;
            c.expect_end()?;
            return Ok(Stmt::Goal(Goal {
                kind,
                target,
                mover,
            }));
        }
    }

    let name = c.expect_ident("at the start of the statement")?;
    c.expect(Tok::Eq, &format!("after `{name}`"))?;
    let def = match c.peek() {
        Some(Tok::LParen) => parse_tuple(c)?,
        Some(Tok::Ident(_)) => {
            let cmd_col = c.col();
            let cmd = c.expect_ident("as a command")?;
            if goal_kind(&cmd).is_some() {
                return Err(diag(
                    c.line,
                    cmd_col,
                    format!("`{cmd}` is a goal statement and takes no name"),
                ));
            }
            parse_command(c, &cmd, cmd_col, kinds)?
        }
        Some(t) => {
            let t = format!("{t}");
            return Err(c.err(format!("expected a command or a point tuple, found {t}")));
        }
        None => return Err(c.err("expected a command or a point tuple, found end of line")),
    };
    c.expect_end()?;
    Ok(Stmt::Step(name, def))
}

fn parse_command(
    c: &mut Cursor,
    cmd: &str,
    cmd_col: usize,
    kinds: &KindTable,
) -> Result<GeoDef, ParseDiagnostic> {
    c.expect(Tok::LBracket, &format!("after `{cmd}`"))?;
    let line = c.line;
    let arity_err = move |n: usize| {
        diag(
            line,
            cmd_col,
            format!("`{cmd}` expects {n} argument{}", if n == 1 { "" } else { "s" }),
        )
    };
    let def = match cmd {
        "Point" => {
            let path = c.expect_ident("as the path argument").map_err(|_| arity_err(1))?;
            GeoDef::PointOnPath(path)
        }
        "Midpoint" | "Line" | "Segment" | "Ray" | "PerpendicularBisector" | "Intersect"
        | "Parallel" | "Perpendicular" => {
            let a = c.expect_ident("as the first argument").map_err(|_| arity_err(2))?;
            c.expect(Tok::Comma, "between the arguments")
                .map_err(|_| arity_err(2))?;
            let b = c.expect_ident("as the second argument").map_err(|_| arity_err(2))?;
            match cmd {
                "Midpoint" => GeoDef::Midpoint(a, b),
                "Line" => GeoDef::Line(a, b),
                "Segment" => GeoDef::Segment(a, b),
                "Ray" => GeoDef::Ray(a, b),
                "PerpendicularBisector" => GeoDef::PerpendicularBisector(a, b),
                "Intersect" => GeoDef::Intersection(a, b),
                "Parallel" => GeoDef::Parallel { through: a, to: b },
                _ => GeoDef::Perpendicular { through: a, to: b },
            }
        }
        "Circle" => {
            let center = c
                .expect_ident("as the center of `Circle`")
                .map_err(|_| arity_err(2))?;
            c.expect(Tok::Comma, "between the arguments of `Circle`")
                .map_err(|_| arity_err(2))?;
            let radius = match (c.peek(), c.peek2()) {
                (Some(Tok::Ident(p)), Some(Tok::RBracket)) => {
                    let p = p.clone();
                    c.next();
                    // a named segment gives its length; any other name is
                    // read as a point the circle passes through
                    if matches!(kinds.get(p.as_str()), Some(GeoDef::Segment(..))) {
                        RadiusSpec::SegmentLength(p)
                    } else {
                        RadiusSpec::Through(p)
                    }
                }
                _ => {
                    let col = c.col();
                    let e = parse_expr(c)?;
                    match fold_const(&e) {
                        Some(r) => RadiusSpec::Length(r),
                        None => {
                            return Err(diag(
                                c.line,
                                col,
                                "the radius must be a number, a point, or a segment",
                            ))
                        }
                    }
                }
            };
            GeoDef::Circle { center, radius }
        }
        "DynamicCoordinates" => {
            let source = c
                .expect_ident("as the source point")
                .map_err(|_| arity_err(3))?;
            for axis in ["x", "y"] {
                c.expect(Tok::Comma, "between the arguments")
                    .map_err(|_| arity_err(3))?;
                parse_round(c, axis, &source)?;
            }
            GeoDef::DynamicPoint { source }
        }
        other => {
            return Err(diag(c.line, cmd_col, format!("unknown command `{other}`")));
        }
    };
    c.expect(Tok::RBracket, &format!("to close `{cmd}`")).map_err(|e| {
        if matches!(c.peek(), Some(Tok::Comma)) {
            diag(c.line, c.col(), format!("too many arguments to `{cmd}`"))
        } else {
            e
        }
    })?;
    Ok(def)
}

/// The literal `round(x(P))` / `round(y(P))` argument shape.
fn parse_round(c: &mut Cursor, axis: &str, source: &str) -> Result<(), ParseDiagnostic> {
    let id = c.expect_ident("as a rounding expression")?;
    if id != "round" {
        return Err(diag(
            c.line,
            c.col().saturating_sub(id.chars().count()),
            format!("expected `round`, found `{id}`"),
        ));
    }
    c.expect(Tok::LParen, "after `round`")?;
    let ax = c.expect_ident("as the coordinate")?;
    if ax != axis {
        return Err(c.err(format!("expected `{axis}(...)` here, found `{ax}(...)`")));
    }
    c.expect(Tok::LParen, &format!("after `{axis}`"))?;
    let p = c.expect_ident("as the point")?;
    if p != source {
        return Err(c.err(format!(
            "rounding must apply to the source point `{source}`, found `{p}`"
        )));
    }
    c.expect(Tok::RParen, &format!("to close `{axis}(`"))?;
    c.expect(Tok::RParen, "to close `round(`")?;
    Ok(())
}

fn parse_tuple(c: &mut Cursor) -> Result<GeoDef, ParseDiagnostic> {
    c.expect(Tok::LParen, "to open the point tuple")?;
    let ex = parse_expr(c)?;
    c.expect(Tok::Comma, "between the coordinates")?;
    let ey = parse_expr(c)?;
    c.expect(Tok::RParen, "to close the point tuple")?;
    match (fold_const(&ex), fold_const(&ey)) {
        (Some(a), Some(b)) => Ok(GeoDef::FreePoint(a, b)),
        _ => Ok(GeoDef::ComputedPoint(ex, ey)),
    }
}

fn fold_const(e: &Expr) -> Option<Rational> {
    match e {
        Expr::Const(r) => Some(r.clone()),
        _ => None,
    }
}

// expr := term (('+'|'-') term)*
fn parse_expr(c: &mut Cursor) -> Result<Expr, ParseDiagnostic> {
    let mut acc = parse_term(c)?;
    loop {
        let add = match c.peek() {
            Some(Tok::Plus) => true,
            Some(Tok::Minus) => false,
            _ => return Ok(acc),
        };
        c.next();
        let rhs = parse_term(c)?;
        acc = match (fold_const(&acc), fold_const(&rhs)) {
            (Some(a), Some(b)) => Expr::Const(if add { a + b } else { a - b }),
            _ if add => Expr::Add(Box::new(acc), Box::new(rhs)),
            _ => Expr::Sub(Box::new(acc), Box::new(rhs)),
        };
    }
}

// term := factor (('*'|'/') factor)*; products stay affine
fn parse_term(c: &mut Cursor) -> Result<Expr, ParseDiagnostic> {
    let mut acc = parse_factor(c)?;
    loop {
        let mul = match c.peek() {
            Some(Tok::Star) => true,
            Some(Tok::Slash) => false,
            _ => return Ok(acc),
        };
        let op_col = c.col();
        c.next();
        let rhs = parse_factor(c)?;
        acc = if mul {
            match (fold_const(&acc), fold_const(&rhs)) {
                (Some(a), Some(b)) => Expr::Const(a * b),
                (Some(a), None) => Expr::Scale(a, Box::new(rhs)),
                (None, Some(b)) => Expr::Scale(b, Box::new(acc)),
                (None, None) => {
                    return Err(diag(
                        c.line,
                        op_col,
                        "products of coordinates are not affine",
                    ))
                }
            }
        } else {
            match fold_const(&rhs) {
                Some(b) if b.is_zero() => {
                    return Err(diag(c.line, op_col, "division by zero"))
                }
                Some(b) => match fold_const(&acc) {
                    Some(a) => Expr::Const(a / b),
                    None => Expr::Scale(b.recip(), Box::new(acc)),
                },
                None => {
                    return Err(diag(
                        c.line,
                        op_col,
                        "division by a coordinate is not affine",
                    ))
                }
            }
        };
    }
}

fn parse_factor(c: &mut Cursor) -> Result<Expr, ParseDiagnostic> {
    match c.peek() {
        Some(Tok::Minus) => {
            c.next();
            let inner = parse_factor(c)?;
            Ok(match fold_const(&inner) {
                Some(r) => Expr::Const(-r),
                None => Expr::Neg(Box::new(inner)),
            })
        }
        Some(Tok::Number(r)) => {
            let r = r.clone();
            c.next();
            Ok(Expr::Const(r))
        }
        Some(Tok::Ident(id)) => {
            let axis = match id.as_str() {
                "x" => Axis::X,
                "y" => Axis::Y,
                other => {
                    let other = other.to_string();
                    return Err(c.err(format!(
                        "expected a coordinate reference like `x(A)`, found `{other}`"
                    )));
                }
            };
            c.next();
            c.expect(Tok::LParen, "after the coordinate")?;
            let p = c.expect_ident("as the point")?;
            c.expect(Tok::RParen, "to close the coordinate reference")?;
            Ok(Expr::Coord(axis, p))
        }
        Some(Tok::LParen) => {
            c.next();
            let e = parse_expr(c)?;
            c.expect(Tok::RParen, "to close the parenthesis")?;
            Ok(e)
        }
        Some(t) => {
            let t = format!("{t}");
            Err(c.err(format!("expected a number or a coordinate, found {t}")))
        }
        None => Err(c.err("expected a number or a coordinate, found end of line")),
    }
}

// ----------------------------------------------------------- whole script

pub fn parse(source: &str) -> ParseResult {
    let mut diagnostics = Vec::new();
    let mut stmts: Vec<(usize, Stmt)> = Vec::new();
    let mut kinds: HashMap<String, GeoDef> = HashMap::new();

    let mut last_line = 0usize;
    for (idx, raw) in source.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let toks = match lex_line(raw, lineno) {
            Ok(t) => t,
            Err(d) => {
                diagnostics.push(d);
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        let end_col = raw.chars().count() + 1;
        let kind_view: KindTable = kinds.iter().map(|(k, v)| (k.as_str(), v)).collect();
        let mut cursor = Cursor::new(&toks, lineno, end_col);
        match parse_statement(&mut cursor, &kind_view) {
            Ok(Stmt::Step(name, def)) => {
                kinds.entry(name.clone()).or_insert_with(|| def.clone());
                stmts.push((lineno, Stmt::Step(name, def)));
            }
            Ok(goal) => stmts.push((lineno, goal)),
            Err(d) => diagnostics.push(d),
        }
    }

    check_script(&stmts, &mut diagnostics, last_line.max(1));

    let has_error = diagnostics.iter().any(|d| d.severity == Severity::Error);
    diagnostics.sort_by_key(|d| (d.line, d.column));
    let program = if has_error {
        None
    } else {
        let mut p = ConstructionProgram::default();
        for (_, stmt) in stmts {
            match stmt {
                Stmt::Step(name, def) => p.push(name, def),
                Stmt::Goal(g) => p.goal = Some(g),
            }
        }
        Some(p)
    };
    ParseResult {
        program,
        diagnostics,
    }
}

/// Script-level rules: unique names, no forward or unknown references,
/// exactly one goal.
fn check_script(stmts: &[(usize, Stmt)], diagnostics: &mut Vec<ParseDiagnostic>, eof: usize) {
    let mut defined_at: HashMap<&str, usize> = HashMap::new();
    for (lineno, stmt) in stmts {
        if let Stmt::Step(name, _) = stmt {
            if let Some(first) = defined_at.get(name.as_str()) {
                diagnostics.push(diag(
                    *lineno,
                    1,
                    format!("duplicate name `{name}`; first defined at line {first}"),
                ));
            } else {
                defined_at.insert(name, *lineno);
            }
        }
    }

    let mut seen: HashMap<&str, ()> = HashMap::new();
    let mut goal_line: Option<usize> = None;
    for (lineno, stmt) in stmts {
        match stmt {
            Stmt::Step(name, def) => {
                for r in def.references() {
                    if seen.contains_key(r) {
                        continue;
                    }
                    let msg = if defined_at.contains_key(r) {
                        format!("forward reference to `{r}`")
                    } else {
                        format!("unknown name `{r}`")
                    };
                    diagnostics.push(diag(*lineno, 1, msg));
                }
                seen.insert(name, ());
            }
            Stmt::Goal(g) => {
                if let Some(first) = goal_line {
                    diagnostics.push(diag(
                        *lineno,
                        1,
                        format!(
                            "`{}` conflicts with the goal at line {first}; \
                             a script has exactly one goal",
                            goal_name(g.kind)
                        ),
                    ));
                } else {
                    goal_line = Some(*lineno);
                }
                for r in [&g.target, &g.mover] {
                    if !defined_at.contains_key(r.as_str()) {
                        diagnostics.push(diag(*lineno, 1, format!("unknown name `{r}`")));
                    }
                }
            }
        }
    }
    if goal_line.is_none() {
        diagnostics.push(ParseDiagnostic {
            line: eof,
            column: 1,
            severity: Severity::Warning,
            message: "missing goal statement".into(),
        });
    }
}

// --------------------------------------------------------- pretty print

pub fn pretty_print(program: &ConstructionProgram) -> String {
    let mut out = String::new();
    for (name, def) in &program.steps {
        let rhs = match def {
            GeoDef::FreePoint(a, b) => {
                format!("({}, {})", rational_to_string(a), rational_to_string(b))
            }
            GeoDef::DynamicPoint { source } => format!(
                "DynamicCoordinates[{source}, round(x({source})), round(y({source}))]"
            ),
            GeoDef::ComputedPoint(ex, ey) => {
                format!("({}, {})", expr_string(ex), expr_string(ey))
            }
            GeoDef::PointOnPath(p) => format!("Point[{p}]"),
            GeoDef::Midpoint(a, b) => format!("Midpoint[{a}, {b}]"),
            GeoDef::Intersection(a, b) => format!("Intersect[{a}, {b}]"),
            GeoDef::Line(a, b) => format!("Line[{a}, {b}]"),
            GeoDef::Segment(a, b) => format!("Segment[{a}, {b}]"),
            GeoDef::Ray(a, b) => format!("Ray[{a}, {b}]"),
            GeoDef::Parallel { through, to } => format!("Parallel[{through}, {to}]"),
            GeoDef::Perpendicular { through, to } => format!("Perpendicular[{through}, {to}]"),
            GeoDef::PerpendicularBisector(a, b) => format!("PerpendicularBisector[{a}, {b}]"),
            GeoDef::Circle { center, radius } => match radius {
                RadiusSpec::Length(r) => format!("Circle[{center}, {}]", rational_to_string(r)),
                RadiusSpec::Through(p) => format!("Circle[{center}, {p}]"),
                RadiusSpec::SegmentLength(s) => format!("Circle[{center}, {s}]"),
            },
            GeoDef::Equation(src) => {
                // nothing to construct; keep the text visible as a comment
                out.push_str(&format!("# {name}: unsupported raw equation {src}\n"));
                continue;
            }
        };
        out.push_str(&format!("{name} = {rhs}\n"));
    }
    match &program.goal {
        Some(g) => out.push_str(&format!("{}[{}, {}]\n", goal_name(g.kind), g.target, g.mover)),
        None => out.push_str("# missing goal statement\n"),
    }
    out
}

/// Precedence-aware rendering that reproduces the parser's tree shapes:
/// scalars print before the scaled factor, and only additive
/// sub-expressions need parentheses inside factors.
fn expr_string(e: &Expr) -> String {
    match e {
        Expr::Const(r) => rational_to_string(r),
        Expr::Coord(Axis::X, p) => format!("x({p})"),
        Expr::Coord(Axis::Y, p) => format!("y({p})"),
        Expr::Neg(inner) => format!("-{}", factor_string(inner)),
        Expr::Add(a, b) => format!("{} + {}", expr_string(a), term_string(b)),
        Expr::Sub(a, b) => format!("{} - {}", expr_string(a), term_string(b)),
        Expr::Scale(c, inner) => {
            format!("{} * {}", rational_to_string(c), factor_string(inner))
        }
    }
}

fn term_string(e: &Expr) -> String {
    match e {
        Expr::Add(..) | Expr::Sub(..) => format!("({})", expr_string(e)),
        _ => expr_string(e),
    }
}

fn factor_string(e: &Expr) -> String {
    match e {
        Expr::Add(..) | Expr::Sub(..) | Expr::Neg(..) => format!("({})", expr_string(e)),
        _ => expr_string(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn parse_ok(src: &str) -> ConstructionProgram {
        let r = parse(src);
        assert!(
            r.program.is_some(),
            "unexpected diagnostics: {:?}",
            r.diagnostics
        );
        r.program.unwrap()
    }

    fn errors(src: &str) -> Vec<ParseDiagnostic> {
        parse(src)
            .diagnostics
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect()
    }

    const CIRCLE_MIDPOINT: &str = "C = (2, 3)\n\
                                   c = Circle[C, 4]\n\
                                   P = Point[c]\n\
                                   P' = Midpoint[P, C]\n\
                                   Locus[P', P]\n";

    #[test]
    fn five_line_midpoint_script_parses() {
        let p = parse_ok(CIRCLE_MIDPOINT);
        assert_eq!(p.steps.len(), 4);
        assert_eq!(
            p.def_of("C"),
            Some(&GeoDef::FreePoint(rat_int(2), rat_int(3)))
        );
        assert_eq!(
            p.def_of("c"),
            Some(&GeoDef::Circle {
                center: "C".into(),
                radius: RadiusSpec::Length(rat_int(4)),
            })
        );
        assert_eq!(p.def_of("P"), Some(&GeoDef::PointOnPath("c".into())));
        assert_eq!(
            p.def_of("P'"),
            Some(&GeoDef::Midpoint("P".into(), "C".into()))
        );
        let goal = p.goal.unwrap();
        assert_eq!(goal.kind, GoalKind::Locus);
        assert_eq!(goal.target, "P'");
        assert_eq!(goal.mover, "P");
    }

    #[test]
    fn scripts_round_trip_through_pretty_print() {
        let p = parse_ok(CIRCLE_MIDPOINT);
        assert_eq!(parse_ok(&pretty_print(&p)), p);

        // every remaining step kind in one program
        let mut q = ConstructionProgram::default();
        q.push("A", GeoDef::FreePoint(rat(1, 2), rat(-3, 2)));
        q.push("B", GeoDef::DynamicPoint { source: "A".into() });
        q.push(
            "E",
            GeoDef::ComputedPoint(
                Expr::Sub(
                    Box::new(Expr::Const(rat_int(10))),
                    Box::new(Expr::Coord(Axis::Y, "A".into())),
                ),
                Expr::Scale(
                    rat(-1, 2),
                    Box::new(Expr::Add(
                        Box::new(Expr::Coord(Axis::X, "A".into())),
                        Box::new(Expr::Coord(Axis::Y, "B".into())),
                    )),
                ),
            ),
        );
        q.push("s", GeoDef::Segment("A".into(), "B".into()));
        q.push("r", GeoDef::Ray("A".into(), "E".into()));
        q.push(
            "par",
            GeoDef::Parallel {
                through: "E".into(),
                to: "s".into(),
            },
        );
        q.push(
            "per",
            GeoDef::Perpendicular {
                through: "E".into(),
                to: "s".into(),
            },
        );
        q.push("bis", GeoDef::PerpendicularBisector("A".into(), "B".into()));
        q.push(
            "k",
            GeoDef::Circle {
                center: "A".into(),
                radius: RadiusSpec::Through("B".into()),
            },
        );
        q.push(
            "m",
            GeoDef::Circle {
                center: "B".into(),
                radius: RadiusSpec::SegmentLength("s".into()),
            },
        );
        q.push("X", GeoDef::Intersection("k".into(), "m".into()));
        q.push("D", GeoDef::PointOnPath("per".into()));
        q.goal = Some(Goal {
            kind: GoalKind::Envelope,
            target: "par".into(),
            mover: "D".into(),
        });
        assert_eq!(parse_ok(&pretty_print(&q)), q);
    }

    #[test]
    fn affine_coordinate_expressions_parse_exactly() {
        let p = parse_ok(
            "A = (0, 0)\n\
             s = Segment[A, A]\n\
             M = Point[s]\n\
             B = (10 - y(M), 2 * x(M) + x(M) / 2)\n\
             Locus[B, M]\n",
        );
        let Some(GeoDef::ComputedPoint(ex, ey)) = p.def_of("B") else {
            panic!("computed point expected");
        };
        assert_eq!(
            ex,
            &Expr::Sub(
                Box::new(Expr::Const(rat_int(10))),
                Box::new(Expr::Coord(Axis::Y, "M".into())),
            )
        );
        assert_eq!(
            ey,
            &Expr::Add(
                Box::new(Expr::Scale(
                    rat_int(2),
                    Box::new(Expr::Coord(Axis::X, "M".into())),
                )),
                Box::new(Expr::Scale(
                    rat(1, 2),
                    Box::new(Expr::Coord(Axis::X, "M".into())),
                )),
            )
        );
    }

    #[test]
    fn each_bad_line_gets_its_own_diagnostic() {
        let src = "A = (0, 0)\n\
                   B = Wurble[A]\n\
                   X = Midpoint[A]\n\
                   C = (1, @)\n\
                   D = Midpoint[A, A]\n";
        let errs = errors(src);
        assert_eq!(errs.len(), 3);
        assert_eq!(errs[0].line, 2);
        assert!(errs[0].message.contains("unknown command `Wurble`"));
        assert_eq!(errs[1].line, 3);
        assert!(errs[1].message.contains("`Midpoint` expects 2 arguments"));
        assert_eq!(errs[2].line, 4);
        assert!(errs[2].message.contains("unexpected character `@`"));
        assert!(parse(src).program.is_none());
    }

    #[test]
    fn positions_are_one_based_columns() {
        let errs = errors("A = (1, @)\n");
        assert_eq!((errs[0].line, errs[0].column), (1, 9));
    }

    #[test]
    fn goals_are_exactly_one_per_script() {
        let none = parse("A = (0, 0)\n");
        assert!(none.program.is_some());
        assert!(none
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Warning && d.message.contains("missing goal")));

        let double = "A = (0, 0)\n\
                      s = Segment[A, A]\n\
                      M = Point[s]\n\
                      Locus[M, M]\n\
                      LocusEquation[M, M]\n";
        let errs = errors(double);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 5);
        assert!(errs[0].message.contains("exactly one goal"));

        let named = errors("A = LocusEquation[A, A]\n");
        assert!(named[0].message.contains("takes no name"));
    }

    #[test]
    fn references_are_checked_with_direction() {
        let src = "M = Midpoint[A, B]\n\
                   A = (0, 0)\n\
                   L = Line[A, Q]\n";
        let errs = errors(src);
        assert!(errs
            .iter()
            .any(|d| d.line == 1 && d.message == "forward reference to `A`"));
        assert!(errs
            .iter()
            .any(|d| d.line == 1 && d.message == "unknown name `B`"));
        assert!(errs
            .iter()
            .any(|d| d.line == 3 && d.message == "unknown name `Q`"));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let errs = errors("A = (0, 0)\nA = (1, 1)\n");
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 2);
        assert!(errs[0].message.contains("duplicate name `A`"));
    }

    #[test]
    fn decimal_literals_are_exact_small_rationals() {
        let p = parse_ok("A = (0.5, 1.25)\n# goalless on purpose\n");
        assert_eq!(p.def_of("A"), Some(&GeoDef::FreePoint(rat(1, 2), rat(5, 4))));

        let errs = errors("A = (0.1234567, 0)\n");
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("0.1234567"));
        assert!(errs[0].message.contains("decimal places"));
    }

    #[test]
    fn circle_radius_argument_resolves_by_kind() {
        let p = parse_ok(
            "A = (0, 0)\n\
             B = (3, 4)\n\
             s = Segment[A, B]\n\
             c = Circle[A, B]\n\
             d = Circle[B, s]\n\
             e = Circle[A, 5/2]\n",
        );
        assert_eq!(
            p.def_of("c"),
            Some(&GeoDef::Circle {
                center: "A".into(),
                radius: RadiusSpec::Through("B".into()),
            })
        );
        assert_eq!(
            p.def_of("d"),
            Some(&GeoDef::Circle {
                center: "B".into(),
                radius: RadiusSpec::SegmentLength("s".into()),
            })
        );
        assert_eq!(
            p.def_of("e"),
            Some(&GeoDef::Circle {
                center: "A".into(),
                radius: RadiusSpec::Length(rat(5, 2)),
            })
        );
    }

    #[test]
    fn dynamic_coordinates_validate_their_rounding() {
        let p = parse_ok(
            "A = (1, 2)\n\
             B = DynamicCoordinates[A, round(x(A)), round(y(A))]\n",
        );
        assert_eq!(p.def_of("B"), Some(&GeoDef::DynamicPoint { source: "A".into() }));

        let swapped = errors("A = (1, 2)\nB = DynamicCoordinates[A, round(y(A)), round(x(A))]\n");
        assert!(swapped[0].message.contains("expected `x(...)`"));

        let wrong_src = errors("A = (1, 2)\nB = DynamicCoordinates[A, round(x(B)), round(y(A))]\n");
        assert!(wrong_src[0].message.contains("source point `A`"));
    }

    #[test]
    fn non_affine_expressions_are_diagnosed() {
        let base = "A = (0, 0)\ns = Segment[A, A]\nM = Point[s]\n";
        let prod = errors(&format!("{base}B = (x(M) * y(M), 0)\n"));
        assert!(prod[0].message.contains("not affine"));
        let div = errors(&format!("{base}B = (1 / x(M), 0)\n"));
        assert!(div[0].message.contains("not affine"));
        let zero = errors(&format!("{base}B = (x(M) / 0, 0)\n"));
        assert!(zero[0].message.contains("division by zero"));
    }

    #[test]
    fn too_many_arguments_are_reported() {
        let errs = errors("A = (0, 0)\nB = (1, 1)\nM = Midpoint[A, B, A]\n");
        assert!(errs[0].message.contains("too many arguments to `Midpoint`"));
    }
}
