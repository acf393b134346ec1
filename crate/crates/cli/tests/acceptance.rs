//! Acceptance gate: one test per shipped guarantee, each printing a
//! `criterion N: PASS/FAIL` line with its runtime. Every check pins the
//! exact value or tolerance it promises; nothing here is advisory.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use loceq_core::dsl;
use loceq_core::envelope::{
    envelope_equation, envelope_equation_with, envelope_witnesses, family_spec,
    tangency_discriminant, EnvelopeMethod,
};
use loceq_core::geom::{ConstructionProgram, GoalKind};
use loceq_core::groebner::{buchberger, eliminate, reduce, s_polynomial, Budget, PolySystem};
use loceq_core::locus::{locus_equation, numeric_trace, plane_registry};
use loceq_core::order::MonomialOrder;
use loceq_core::poly::{relative_residual, MultiPoly};
use loceq_core::rational::{rat, rat_int};
use loceq_core::render::{emit_svg, rasterize, Viewport};
use loceq_core::text::parse_poly;
use loceq_core::vars::VarRegistry;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn program(source: &str) -> ConstructionProgram {
    let parsed = dsl::parse(source);
    for d in &parsed.diagnostics {
        eprintln!("{d}");
    }
    parsed.program.expect("script parses")
}

fn program_file(name: &str) -> ConstructionProgram {
    let src = std::fs::read_to_string(corpus_dir().join(name)).expect("corpus script exists");
    program(&src)
}

fn pxy(s: &str) -> MultiPoly {
    parse_poly(s, plane_registry())
        .expect("parses")
        .canonicalize()
        .expect("canonicalizes")
}

fn report(n: u32, detail: &str, started: Instant) {
    println!(
        "criterion {n}: PASS ({} ms) — {detail}",
        started.elapsed().as_millis()
    );
}

fn midpoint_script(cx: i64, cy: i64) -> String {
    format!(
        "C = ({cx}, {cy})\n\
         c = Circle[C, 4]\n\
         P = Point[c]\n\
         M = Midpoint[P, C]\n\
         LocusEquation[M, P]\n"
    )
}

// The printed equation for the midpoint-of-radius circle around (2, 3):
// the target string carries the center coordinates transposed (it is the
// center-(3, 2) curve), so this stays red; the passing transposed check
// lives in `criterion_02`.
#[test]
fn criterion_01_midpoint_circle_prints_the_stated_equation() {
    let started = Instant::now();
    let r = locus_equation(&program(&midpoint_script(2, 3))).expect("solves");
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "took {} ms, promised < 1000 ms",
        elapsed.as_millis()
    );
    assert_eq!(
        r.curve.equation_string(),
        "x^2 - 6x + y^2 - 4y + 9 = 0",
        "center (2, 3) computes the transposed coefficients; the stated \
         string is the center-(3, 2) equation"
    );
    report(1, "midpoint circle equation and sub-second runtime", started);
}

#[test]
fn criterion_02_translated_centers_follow_the_closed_form() {
    let started = Instant::now();
    for (a, b) in [(0i64, 0i64), (1, -2), (5, 7), (-3, 4), (2, 3)] {
        let r = locus_equation(&program(&midpoint_script(a, b))).expect("solves");
        let x = MultiPoly::var(plane_registry(), 0);
        let y = MultiPoly::var(plane_registry(), 1);
        let want = x
            .pow(2)
            .add(&y.pow(2))
            .unwrap()
            .add(&x.scale(&rat_int(-2 * a)))
            .unwrap()
            .add(&y.scale(&rat_int(-2 * b)))
            .unwrap()
            .add(&MultiPoly::constant(
                plane_registry(),
                rat_int(a * a + b * b - 4),
            ))
            .unwrap();
        assert_eq!(
            r.curve.poly(),
            &want.canonicalize().unwrap(),
            "center ({a}, {b})"
        );
    }
    report(2, "x^2 - 2ax + y^2 - 2by + a^2 + b^2 - 4 at five centers", started);
}

fn orthocenter_script(p: (i64, i64), q: (i64, i64), b: (i64, i64), c: (i64, i64)) -> String {
    format!(
        "P = ({}, {})\nQ = ({}, {})\nB = ({}, {})\nC = ({}, {})\n\
         f = Line[P, Q]\n\
         A = Point[f]\n\
         ac = Line[A, C]\n\
         ab = Line[A, B]\n\
         hb = Perpendicular[B, ac]\n\
         hc = Perpendicular[C, ab]\n\
         D = Intersect[hb, hc]\n\
         LocusEquation[D, A]\n",
        p.0, p.1, q.0, q.1, b.0, b.1, c.0, c.1
    )
}

#[test]
fn criterion_03_parallel_orthocenter_locus_splits_into_probed_lines() {
    let started = Instant::now();
    let r = locus_equation(&program(&orthocenter_script(
        (1, 1),
        (2, 0),
        (3, -1),
        (3, 1),
    )))
    .expect("solves");
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "took {} ms, promised < 10 s",
        elapsed.as_millis()
    );
    assert_eq!(r.curve.poly(), &pxy("-xy - x + y^2 + 3y + 2"));
    let probed: Vec<&MultiPoly> = r.known_factors.iter().map(|f| f.poly()).collect();
    let l1 = pxy("y + 1");
    let l2 = pxy("y - x + 2");
    assert!(probed.contains(&&l1), "probe misses y + 1: {probed:?}");
    assert!(probed.contains(&&l2), "probe misses x - y - 2: {probed:?}");
    let mut prod = r.cofactor.poly().clone();
    for f in &r.known_factors {
        prod = prod.mul(f.poly()).unwrap();
    }
    assert_eq!(&prod.canonicalize().unwrap(), r.curve.poly(), "exact reconstruction");
    report(3, "degenerate conic, both lines probed, product reconstructs", started);
}

#[test]
fn criterion_04_random_parallel_configurations_stay_conics() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut done = 0;
    while done < 10 {
        let p = (rng.gen_range(-5..=5i64), rng.gen_range(-5..=5i64));
        let (dx, dy) = (rng.gen_range(-3..=3i64), rng.gen_range(-3..=3i64));
        if (dx, dy) == (0, 0) {
            continue;
        }
        let q = (p.0 + dx, p.1 + dy);
        let b = (rng.gen_range(-5..=5i64), rng.gen_range(-5..=5i64));
        // B off line PQ keeps the triangle honest; C = B + k·(PQ) keeps
        // the base parallel to the sweep line.
        if (b.0 - p.0) * dy - (b.1 - p.1) * dx == 0 {
            continue;
        }
        let k = *[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap();
        let c = (b.0 + k * dx, b.1 + k * dy);

        let each = Instant::now();
        let r = locus_equation(&program(&orthocenter_script(p, q, b, c))).expect("solves");
        let elapsed = each.elapsed();
        assert!(
            elapsed < Duration::from_secs(10),
            "config {done} took {} ms, promised < 10 s each",
            elapsed.as_millis()
        );
        assert!(
            r.degree <= 2,
            "config {done} (P {p:?} Q {q:?} B {b:?} C {c:?}): degree {}",
            r.degree
        );
        done += 1;
    }
    report(4, "10 random parallel configurations, all degree <= 2", started);
}

#[test]
fn criterion_05_doodle_curve_contains_the_witch() {
    let started = Instant::now();
    let r = locus_equation(&program_file("agnesi_doodle.lcs")).expect("solves");
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "took {} ms, promised < 30 s",
        elapsed.as_millis()
    );
    let witch = pxy("x^2y + y - 1");
    assert!(
        witch.divides(r.curve.poly()),
        "witch does not divide {}",
        r.curve.poly()
    );
    report(5, "witch divides the doodle locus", started);
}

// Stretch: the 24-step straightedge-and-compass witch. Skips (without
// failing) only if the 300-second budget is exhausted.
#[test]
fn criterion_06_full_construction_yields_the_four_mirror_product() {
    let started = Instant::now();
    let budget = Budget {
        time_limit: Some(Duration::from_secs(300)),
        ..Budget::default()
    };
    let program = program_file("agnesi_full.lcs");
    let r = match loceq_core::locus::locus_equation_with_budget(&program, &budget) {
        Ok(r) => r,
        Err(loceq_core::locus::LocusError::Groebner(
            loceq_core::groebner::GroebnerError::ResourceLimit { .. },
        )) => {
            println!("criterion 6: SKIP — stretch budget (300 s) exhausted");
            return;
        }
        Err(e) => panic!("unexpected failure: {e}"),
    };
    let witch = pxy("x^2y + y - 1");
    assert!(witch.divides(r.curve.poly()), "witch missing from the product");
    assert_eq!(r.degree, 12, "expected total degree 12");
    let product = pxy("x^8y^4 - 2x^4y^4 - 2x^4y^2 + y^4 - 2y^2 + 1");
    assert!(
        product.divides(r.curve.poly()),
        "four-mirror product does not divide the result"
    );
    report(6, "degree-12 product of the four witch mirrors", started);
}

#[test]
fn criterion_07_crease_envelope_is_the_parabola() {
    let started = Instant::now();
    let spec = family_spec(&program_file("bisector_envelope.lcs")).expect("family");
    let r = envelope_equation(&spec).expect("solves");
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "took {} ms, promised < 5 s",
        elapsed.as_millis()
    );
    assert_eq!(r.curve.equation_string(), "x^2 - 2y + 1 = 0");

    // Independent oracle: the crease through (t, 0) equidistant from
    // (0, 1) is 2tx - t^2 - 2y + 1 = 0; eliminating t from it and its
    // t-derivative must give the same parabola.
    let reg = VarRegistry::new(vec!["t", "x", "y"]);
    let t = MultiPoly::var(reg.clone(), 0);
    let x = MultiPoly::var(reg.clone(), 1);
    let y = MultiPoly::var(reg.clone(), 2);
    let f = t
        .mul(&x)
        .unwrap()
        .scale(&rat_int(2))
        .sub(&t.pow(2))
        .unwrap()
        .sub(&y.scale(&rat_int(2)))
        .unwrap()
        .add(&MultiPoly::constant(reg.clone(), rat_int(1)))
        .unwrap();
    let ft = f.partial_derivative(0);
    let system = PolySystem::new(reg.clone(), vec![f, ft], MonomialOrder::Lex).unwrap();
    let gens = eliminate(&system, &[1, 2], &Budget::default()).expect("eliminates");
    assert_eq!(gens.len(), 1, "one generator expected");
    // Compare in the three-variable registry: the envelope result embeds
    // at positions (x, y) = (1, 2).
    let embedded = r.curve.poly().embed(reg, &[1, 2]);
    assert_eq!(gens[0].canonicalize().unwrap(), embedded.canonicalize().unwrap());
    report(7, "x^2 - 2y + 1 confirmed by direct t-elimination", started);
}

#[test]
fn criterion_08_string_art_keeps_both_pencils_and_the_rail() {
    let started = Instant::now();
    let spec = family_spec(&program_file("string_art.lcs")).expect("family");
    let r = envelope_equation(&spec).expect("solves");
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "took {} ms, promised < 60 s",
        elapsed.as_millis()
    );

    // y · ((x - y)^2 - 20x - 20y + 100) · ((x + y)^2 - 20x + 20y + 100),
    // built term by term rather than pasted in expanded form.
    let x = MultiPoly::var(plane_registry(), 0);
    let y = MultiPoly::var(plane_registry(), 1);
    let c100 = MultiPoly::constant(plane_registry(), rat_int(100));
    let p1 = x
        .sub(&y)
        .unwrap()
        .pow(2)
        .sub(&x.scale(&rat_int(20)))
        .unwrap()
        .sub(&y.scale(&rat_int(20)))
        .unwrap()
        .add(&c100)
        .unwrap();
    let p2 = x
        .add(&y)
        .unwrap()
        .pow(2)
        .sub(&x.scale(&rat_int(20)))
        .unwrap()
        .add(&y.scale(&rat_int(20)))
        .unwrap()
        .add(&c100)
        .unwrap();
    let product = y.mul(&p1).unwrap().mul(&p2).unwrap().canonicalize().unwrap();
    assert_eq!(r.curve.poly(), &product, "exact product of rail and both pencils");

    let quintic = pxy(
        "x^4y - 40x^3y - 2x^2y^3 + 600x^2y - 120xy^3 - 4000xy + y^5 - 200y^3 + 10000y",
    );
    assert_eq!(product, quintic, "expansion matches the quintic");
    report(8, "rail times both parabola pencils, expansion verified", started);
}

#[test]
fn criterion_09_tangency_discriminant_vanishes_on_the_tangent_family() {
    let started = Instant::now();
    // Lines y = ax + b tangent to the crease parabola 2y = x^2 + 1.
    let curve = pxy("x^2 - 2y + 1");
    let disc = tangency_discriminant(&curve).expect("quadratic substitution");

    let reg_ab = VarRegistry::new(vec!["a", "b"]);
    let a = MultiPoly::var(reg_ab.clone(), 0);
    let b = MultiPoly::var(reg_ab.clone(), 1);
    let closed_form = a
        .pow(2)
        .add(&b.scale(&rat_int(2)))
        .unwrap()
        .sub(&MultiPoly::constant(reg_ab, rat_int(1)))
        .unwrap();
    assert_eq!(
        disc.canonicalize().unwrap(),
        closed_form.canonicalize().unwrap(),
        "symbolic discriminant"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(90);
    for _ in 0..20 {
        let d = rat(rng.gen_range(-40..=40), rng.gen_range(1..=20));
        // The tangent at x = d has slope a = 1 - 2·(1/2 - d)... spelled
        // directly: a = 1 - 2d, b = 2d - 2d^2 parameterize the family.
        let a0 = rat_int(1) - rat_int(2) * d.clone();
        let b0 = rat_int(2) * d.clone() - rat_int(2) * d.clone() * d.clone();
        let at = disc
            .substitute(0, &MultiPoly::constant(disc.registry().clone(), a0))
            .unwrap()
            .substitute(1, &MultiPoly::constant(disc.registry().clone(), b0))
            .unwrap();
        assert!(at.is_zero(), "discriminant nonzero at d = {d}");
    }
    report(9, "a^2 + 2b - 1, exactly zero at 20 rational tangents", started);
}

#[test]
fn criterion_10_sampled_positions_satisfy_every_corpus_equation() {
    let started = Instant::now();
    let mut scripts: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus dir")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "lcs").unwrap_or(false))
        .collect();
    scripts.sort();
    assert!(!scripts.is_empty(), "corpus is not empty");

    let budget = Budget {
        time_limit: Some(Duration::from_secs(300)),
        ..Budget::default()
    };
    for path in &scripts {
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let src = std::fs::read_to_string(path).unwrap();
        let program = dsl::parse(&src).program.expect("corpus script parses");
        let goal = program.goal.clone().expect("corpus script has a goal");

        let (curve, points): (MultiPoly, Vec<(f64, f64)>) = match goal.kind {
            GoalKind::Locus => {
                // No equation goal: check the sampled trace against the
                // recorded equation instead.
                let expected = std::fs::read_to_string(path.with_extension("expected")).unwrap();
                let line = expected
                    .lines()
                    .find_map(|l| l.trim().strip_prefix("equation:").map(str::to_string))
                    .expect("trace entry records an equation");
                (pxy(line.trim()), numeric_trace(&program, 20).expect("traces").points)
            }
            GoalKind::LocusEquation => {
                let r = loceq_core::locus::locus_equation_with_budget(&program, &budget)
                    .expect("solves");
                let t = numeric_trace(&program, 20).expect("traces");
                (r.curve.poly().clone(), t.points)
            }
            GoalKind::Envelope => {
                let spec = family_spec(&program).expect("family");
                let r = envelope_equation_with(&spec, EnvelopeMethod::Auto, &budget)
                    .expect("solves");
                let w = envelope_witnesses(&program, 20).expect("witnesses");
                (r.curve.poly().clone(), w)
            }
        };
        assert!(!points.is_empty(), "{name}: no sample points");
        for &(x, y) in &points {
            let res = relative_residual(&curve, &[x, y]);
            assert!(
                res < 1e-9,
                "{name}: residual {res:.3e} at ({x}, {y}) on {curve}"
            );
        }
    }
    report(
        10,
        &format!("{} corpus scripts, all samples within 1e-9", scripts.len()),
        started,
    );
}

#[test]
fn criterion_11_basis_fixtures_prove_the_groebner_property() {
    let started = Instant::now();
    let fixtures: Vec<(Arc<VarRegistry>, Vec<&str>, Vec<usize>)> = vec![
        (
            VarRegistry::new(vec!["x", "y"]),
            vec!["x^2 + y^2 - 4", "xy - 1"],
            vec![1],
        ),
        (
            VarRegistry::new(vec!["t", "x", "y"]),
            vec!["x - t^2", "y - t^3"],
            vec![1, 2],
        ),
        (
            VarRegistry::new(vec!["u", "v", "x", "y"]),
            vec!["x - u^2 + v^2", "y - 2uv", "u^2 + v^2 - 1"],
            vec![2, 3],
        ),
    ];
    for (reg, gens, keep) in &fixtures {
        let polys: Vec<MultiPoly> = gens
            .iter()
            .map(|s| parse_poly(s, reg.clone()).unwrap())
            .collect();
        let system = PolySystem::new(reg.clone(), polys.clone(), MonomialOrder::GradedLex).unwrap();
        let basis = buchberger(&system, &Budget::default()).expect("basis");

        // Every S-polynomial of the returned basis reduces to zero.
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let s = s_polynomial(&basis[i], &basis[j], MonomialOrder::GradedLex).unwrap();
                if s.is_zero() {
                    continue;
                }
                let nf = reduce(&s, &basis, MonomialOrder::GradedLex).unwrap();
                assert!(nf.is_zero(), "S({i},{j}) does not reduce to zero");
            }
        }
        // The inputs lie in the ideal the basis generates.
        for p in &polys {
            let nf = reduce(p, &basis, MonomialOrder::GradedLex).unwrap();
            assert!(nf.is_zero(), "input {p} not a member of its own ideal");
        }
        // Elimination output mentions only the kept block.
        let projected = eliminate(&system, keep, &Budget::default()).unwrap();
        assert!(!projected.is_empty(), "elimination kept something");
        for g in &projected {
            for (v, used) in g.vars_used().iter().enumerate() {
                assert!(!used || keep.contains(&v), "impure generator {g}");
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(5),
        "took {} ms, promised < 5 s",
        elapsed.as_millis()
    );
    report(11, "S-pairs, membership, and purity on three fixtures", started);
}

#[test]
fn criterion_12_renderer_accuracy_convergence_and_determinism() {
    let started = Instant::now();
    let circle = loceq_core::locus::ImplicitCurve::new(pxy("x^2 + y^2 - 4")).unwrap();

    // Vertex accuracy: every marching-squares vertex of the radius-2
    // circle on [-3, 3]^2 sits within two cells of the true circle.
    let err_at = |grid: u32| -> f64 {
        let vp = Viewport::square(3, grid).unwrap();
        let paths = rasterize(&circle, &vp);
        let mut worst = 0.0f64;
        let mut saw_points = false;
        for pl in &paths.paths {
            for &(x, y) in &pl.points {
                saw_points = true;
                worst = worst.max(((x * x + y * y).sqrt() - 2.0).abs());
            }
        }
        assert!(saw_points, "grid {grid} produced no vertices");
        worst
    };
    let coarse = err_at(256);
    let fine = err_at(512);
    assert!(fine < 2.0 * 6.0 / 512.0, "fine-grid error {fine}");
    assert!(fine <= coarse, "doubling the grid must not worsen the error");

    // Determinism: identical bytes for identical input.
    let vp = Viewport::square(3, 128).unwrap();
    let a = emit_svg(&rasterize(&circle, &vp), &vp, &circle.equation_string());
    let b = emit_svg(&rasterize(&circle, &vp), &vp, &circle.equation_string());
    assert_eq!(a.into_bytes(), b.into_bytes(), "SVG bytes differ between runs");
    report(12, "vertex error bound, grid convergence, stable bytes", started);
}
