//! Acceptance suite: one pass/fail line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness so the report is always shown.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use crnf::curve::CurveJet;
use crnf::equivalence::{dilation_match, prepare, Match};
use crnf::format::{parse_germ, parse_map};
use crnf::locus::{chain_slope, classify_case, compute_type, cross, eval_exact, from_real, locus_equations, type_along_curve, CaseTag};
use crnf::map::MapJet;
use crnf::model::{pz_mod_harmonic, ModelClass, PolyModel};
use crnf::normalizer::{
    apply_map, degenerate_chain, kolar_normalize, special_normalize, strong_normalize, tubular_coupled_system, NormalizationParams,
    NormalizationResult,
};
use crnf::scalar::{rat, rat_int};
use crnf::surface::{phi_to_theta, reality_residual, theta_to_phi, GermPhi};
use crnf::{Grading, MultiIndex, Rational, Scalar, Vars, WSeries};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Rng8 = ChaCha8Rng;

fn small_rat(rng: &mut Rng8) -> Rational {
    let n: i64 = rng.gen_range(-5..=5);
    let d: i64 = rng.gen_range(1..=4);
    rat(n, d)
}

fn nonzero_rat(rng: &mut Rng8) -> Rational {
    loop {
        let r = small_rat(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

fn small_scalar(rng: &mut Rng8) -> Scalar {
    Scalar::new(small_rat(rng), small_rat(rng))
}

/// All `(a, b, m)` with weight in `lo..=hi` accepted by `keep(k, a, b, m)`.
fn indices(k: u32, lo: u32, hi: u32, keep: impl Fn(u32, u32, u32, u32) -> bool) -> Vec<(u32, u32, u32)> {
    let mut out = vec![];
    for m in 0..=hi / k {
        for a in 0..=hi {
            for b in 0..=hi {
                let w = a + b + k * m;
                if (lo..=hi).contains(&w) && a + b + m >= 2 && keep(k, a, b, m) {
                    out.push((a, b, m));
                }
            }
        }
    }
    out
}

/// `model + Σ c z^a z̄^b u^m + conjugates`, with up to `n` random terms from `pool`.
fn random_germ(rng: &mut Rng8, model: &PolyModel, w: u32, n: usize, pool: &[(u32, u32, u32)]) -> GermPhi {
    let gr = Grading::new(model.k).unwrap();
    let mut p = model.series(gr, w, Vars::Phi);
    let count = rng.gen_range(1..=n);
    for &(a, b, m) in pool.choose_multiple(rng, count) {
        let c = if a == b { Scalar::real(nonzero_rat(rng)) } else { small_scalar(rng) };
        p.add_term(MultiIndex::new(a, b, m), c.clone());
        if a != b {
            p.add_term(MultiIndex::new(b, a, m), c.conj());
        }
    }
    GermPhi::new(p).unwrap()
}

fn generic_model(rng: &mut Rng8) -> PolyModel {
    loop {
        let r = small_rat(rng);
        let a = vec![Scalar::zero(), Scalar::one(), Scalar::real(r), Scalar::one(), Scalar::zero()];
        if let Ok(m) = PolyModel::from_coeffs(4, a) {
            if m.class == ModelClass::Generic {
                return m;
            }
        }
    }
}

fn model_of(rng: &mut Rng8, class: ModelClass) -> PolyModel {
    match class {
        ModelClass::Tubular => PolyModel::tubular(*[3, 4].choose(rng).unwrap()),
        ModelClass::Circular => PolyModel::circular(2),
        ModelClass::Generic => generic_model(rng),
    }
}

const CLASSES: [ModelClass; 3] = [ModelClass::Tubular, ModelClass::Circular, ModelClass::Generic];

/// A random germ of the given class above its model, truncated at `3k`.
fn class_germ(rng: &mut Rng8, class: ModelClass, keep: impl Fn(u32, u32, u32, u32) -> bool) -> GermPhi {
    let model = model_of(rng, class);
    let w = 3 * model.k;
    let pool = indices(model.k, model.k + 1, w, keep);
    random_germ(rng, &model, w, 6, &pool)
}

/// `(λ z + f̃, λ^k w + g̃)` with random higher-weight terms.
fn random_jet(rng: &mut Rng8, k: u32, w: u32, preserve_gamma: bool) -> MapJet {
    let gr = Grading::new(k).unwrap();
    let lambda = nonzero_rat(rng);
    let mut f = WSeries::zero(gr, w, Vars::Map);
    let mut g = WSeries::zero(gr, w, Vars::Map);
    f.add_term(MultiIndex::new(1, 0, 0), Scalar::real(lambda.clone()));
    g.add_term(MultiIndex::new(0, 0, 1), Scalar::real(num_traits::pow(lambda, k as usize)));
    for _ in 0..rng.gen_range(1..=4) {
        let (a, j) = (rng.gen_range(0..=3u32), rng.gen_range(0..=2u32));
        if a + k * j >= 2 && a + k * j <= w && !(a == 1 && j == 0) && !(preserve_gamma && a == 0) {
            f.add_term(MultiIndex::new(a, 0, j), small_scalar(rng));
        }
    }
    for _ in 0..rng.gen_range(1..=4) {
        let (a, j) = (rng.gen_range(0..=2 * k), rng.gen_range(0..=2u32));
        if a + k * j > k && a + k * j <= w {
            let c = if preserve_gamma && a == 0 { Scalar::real(small_rat(rng)) } else { small_scalar(rng) };
            g.add_term(MultiIndex::new(a, 0, j), c);
        }
    }
    MapJet::new(f, g).unwrap()
}

fn describe_failures(r: &NormalizationResult) -> String {
    let bad: Vec<String> = r.conditions.iter().filter(|c| !c.pass()).map(|c| format!("{} = {}", c.condition, c.value)).collect();
    format!("residual zero: {}, failing: {bad:?}", r.residual.is_zero())
}

fn criterion_1(rng: &mut Rng8) {
    for n in 0..200 {
        let k = [3, 4, 5, 6][n % 4];
        let w = 3 * k;
        let pool = indices(k, k + 1, w, |_, _, _, _| true);
        let germ = random_germ(rng, &PolyModel::tubular(k), w, 12, &pool);
        let theta = phi_to_theta(&germ).unwrap();
        assert!(reality_residual(&theta).unwrap().is_zero(), "germ {n}: reality residual");
        assert_eq!(theta_to_phi(&theta).unwrap(), germ, "germ {n}: round trip");
    }
}

fn criterion_2(rng: &mut Rng8) {
    for class in CLASSES {
        for n in 0..50 {
            let g = class_germ(rng, class, |_, _, _, _| true);
            let r = kolar_normalize(&g, &NormalizationParams::default(), g.trunc())
                .unwrap_or_else(|e| panic!("{class:?} #{n}: {e}\n{}", crnf::format::write_germ_phi(&g)));
            assert!(r.certified(), "{class:?} #{n}: {}", describe_failures(&r));
            assert!(!r.conditions.is_empty());
        }
    }
}

fn criterion_3(rng: &mut Rng8) {
    for class in CLASSES {
        for n in 0..8 {
            let g = class_germ(rng, class, |_, _, _, _| true);
            let (k, w) = (g.k(), g.trunc());
            let base = kolar_normalize(&g, &NormalizationParams::default(), w).unwrap();
            let again = kolar_normalize(&g, &NormalizationParams::default(), w).unwrap();
            assert_eq!((&base.germ, &base.map), (&again.germ, &again.map), "{class:?} #{n}: repeat");
            let mu = nonzero_rat(rng);
            let other = kolar_normalize(&g, &NormalizationParams::with_lambda(mu.clone()), w).unwrap();
            for (i, _) in base.germ.series().terms().iter().chain(other.germ.series().terms()) {
                let weight = (i.a + i.b + k * i.m) as i64;
                let factor = num_traits::pow(mu.clone(), (weight - k as i64).unsigned_abs() as usize);
                let factor = if weight > k as i64 { factor.recip() } else { factor };
                assert_eq!(other.germ.series().coeff(i.a, i.b, i.m), base.germ.series().coeff(i.a, i.b, i.m).scale(&factor), "{class:?} #{n} at {i:?}");
            }
        }
    }
}

/// Applies a random jet to a normal form, renormalizes, and recovers the
/// original through an exact dilation.
fn roundtrip(rng: &mut Rng8, special: bool) {
    let mut done = 0;
    for class in [ModelClass::Tubular, ModelClass::Generic].iter().cycle() {
        if done >= 26 {
            break;
        }
        let g = class_germ(rng, *class, |_, a, b, _| !special || a + b > 0);
        let w = g.trunc();
        let normalize = |g: &GermPhi| {
            let p = NormalizationParams::default();
            if special { special_normalize(g, &p, w) } else { kolar_normalize(g, &p, w) }.unwrap()
        };
        let n = normalize(&g).germ;
        let h = random_jet(rng, g.k(), w, special);
        let moved = apply_map(&n, &h).unwrap();
        if special {
            assert!(moved.slice(0, 0).is_zero(), "curve-preserving jet moved the curve");
        }
        let m = normalize(&moved);
        assert!(m.certified(), "{}", describe_failures(&m));
        match dilation_match(&n, &m.germ).unwrap() {
            Match::Found(d) => {
                let lam = MapJet::dilation(n.series().grading(), w, &d.lambda);
                assert_eq!(apply_map(&n, &lam).unwrap(), m.germ, "witness lambda={} does not verify", d.lambda);
            }
            other => panic!("{class:?}: {other:?}"),
        }
        done += 1;
    }
}

fn criterion_4(rng: &mut Rng8) {
    roundtrip(rng, false);
}

fn criterion_5(rng: &mut Rng8) {
    for class in CLASSES {
        for n in 0..50 {
            let g = class_germ(rng, class, |_, a, b, _| a + b > 0);
            let r = special_normalize(&g, &NormalizationParams::default(), g.trunc()).unwrap();
            assert!(r.certified(), "{class:?} #{n}: {}", describe_failures(&r));
            assert!(r.germ.slice(0, 0).is_zero() && r.map.f.slice(0, 0).is_zero());
        }
    }
    roundtrip(rng, true);
}

/// `Σ c_j x^j` (`x = Re z`) as a germ in grading `k`.
fn tube_germ(k: u32, w: u32, coeffs: &[(u32, Rational)]) -> GermPhi {
    let gr = Grading::new(k).unwrap();
    let mut p = WSeries::zero(gr, w, Vars::Phi);
    for (j, c) in coeffs {
        let scale = c / num_traits::pow(rat_int(2), *j as usize);
        let mut binom = Rational::one();
        for a in 0..=*j {
            p.add_term(MultiIndex::new(a, j - a, 0), Scalar::real(&scale * &binom));
            binom = binom * rat_int((j - a) as i64) / rat_int(a as i64 + 1);
        }
    }
    GermPhi::new(p).unwrap()
}

/// Strong form along `chain`, or along the degenerate chain of a T2 germ.
fn strong_certified(germ: &GermPhi, chain: Option<&CurveJet>, t2: bool) {
    let w = germ.trunc();
    let prep = prepare(germ, w).unwrap();
    let chain = match chain {
        Some(c) => prep.carry(c, w).unwrap(),
        None => degenerate_chain(&prep.germ, w).unwrap(),
    };
    let params = NormalizationParams::default();
    let r = strong_normalize(&prep.germ, &chain, &params, w).unwrap();
    assert!(r.certified(), "{}", describe_failures(&r));
    if t2 {
        assert!(r.conditions.iter().any(|c| c.role == crnf::normalizer::ConditionRole::Claim));
        assert!(r.claims_hold(), "T2 claim fails: {}", describe_failures(&r));
        assert_eq!(r.germ, kolar_normalize(&prep.germ, &params, w).unwrap().germ, "strong and Kolar forms differ");
    }
    assert!(type_along_curve(r.germ.series(), &CurveJet::gamma(), w).unwrap().constant);
}

fn criterion_6(rng: &mut Rng8) {
    // germs for which Γ is a curve of constant type (and, for T2, lies in
    // the degeneracy set, whose own chain is used instead)
    let gamma = CurveJet::gamma();
    for class in CLASSES {
        for _ in 0..6 {
            let g = class_germ(rng, class, |k, a, b, _| a >= 1 && b >= 1 && a + b >= k);
            let t2 = classify_case(g.series(), &[]).unwrap().case == CaseTag::T2;
            strong_certified(&g, if t2 { None } else { Some(&gamma) }, t2);
        }
    }
    // T2 tubes v = x^k + higher powers of x
    for n in 0..6 {
        let k = [3, 4][n % 2];
        let mut coeffs = vec![(k, Rational::one())];
        for j in k + 1..=3 * k {
            if rng.gen_bool(0.5) {
                coeffs.push((j, small_rat(rng)));
            }
        }
        let g = tube_germ(k, 3 * k, &coeffs);
        assert_eq!(classify_case(g.series(), &[]).unwrap().case, CaseTag::T2);
        strong_certified(&g, None, true);
    }
    // the T1 example along both of its chains
    let example = t1_example();
    for sign in [1, -1] {
        strong_certified(&example, Some(&gamma_pm(sign)), false);
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn t1_example() -> GermPhi {
    parse_germ(&std::fs::read_to_string(data("t1_example.germ")).unwrap()).unwrap().to_phi().unwrap()
}

/// `γ± = {Re z = 0, Im z = ±u, v = 0}`, parametrized by `u = t`.
fn gamma_pm(sign: i64) -> CurveJet {
    CurveJet::new(vec![Scalar::zero(), Scalar::from_ints(0, sign)], vec![Scalar::zero(), Scalar::one()]).unwrap()
}

fn criterion_7() {
    let g = t1_example();
    let report = classify_case(g.series(), &[gamma_pm(1), gamma_pm(-1)]).unwrap();
    assert_eq!((report.k, report.class, report.case), (4, Some(ModelClass::Tubular), CaseTag::T1));
    for (sign, r) in [1, -1].into_iter().zip(&report.curves) {
        let r = r.as_ref().unwrap();
        assert!(r.constant && r.type_at_origin == 4, "gamma {sign}");
        assert!(r.samples.iter().all(|(_, t)| *t == 4));
        let direct = type_along_curve(g.series(), &gamma_pm(sign), 12).unwrap();
        assert!(direct.constant);
    }
    for u0 in [rat(1, 1), rat(-1, 2), rat(1, 3)] {
        assert_eq!(compute_type(g.series(), &Scalar::zero(), &u0).unwrap(), 3);
    }
    let gens = locus_equations(g.series(), 4).unwrap();
    for sign in [1, -1] {
        for t in [rat(1, 2), rat(-2, 3), rat(5, 1)] {
            let z = Scalar::new(Rational::zero(), t.clone() * rat_int(sign));
            let u = Scalar::real(t);
            for gen in &gens {
                assert!(eval_exact(&gen.series, [&z, &z.conj(), &u]).unwrap().is_zero(), "{gen} at t on gamma {sign}");
            }
        }
    }
}

fn real_poly(terms: &[(u32, u32, u32, i64)]) -> WSeries {
    let g1 = Grading::new(1).unwrap();
    from_real(&WSeries::from_terms(g1, 60, Vars::Real, terms.iter().map(|&(a, b, m, c)| (a, b, m, Scalar::from_int(c))))).unwrap()
}

fn parallel(a: &[Rational; 3], b: &[Rational; 3]) -> bool {
    cross(a, b).iter().all(Zero::is_zero) && a.iter().any(|x| !x.is_zero())
}

fn criterion_8() {
    let tube = real_poly(&[(4, 0, 0, 1)]);
    let report = classify_case(&tube, &[]).unwrap();
    assert_eq!(report.case, CaseTag::T2);
    assert!(report.chart.is_some(), "exact chart certificate");
    let vertical = [Rational::zero(), Rational::zero(), Rational::one()];
    let points = [(0, 0), (1, 2), (-1, 3), (2, -5), (7, 4), (-3, -1)];
    for &(y, u) in &points {
        let p = [Rational::zero(), rat(y, 3), rat(u, 2)];
        let s = chain_slope(&tube, &p).unwrap();
        assert!(parallel(&s.l, &vertical), "l at {p:?}");
        assert!(s.transverse());
    }
    // H(z, w) = (z + a w, w) maps the tube onto v = (x − a u)^4 and Σ onto {x = a u};
    // dH sends (0, 0, 1) to (a, 0, 1).
    for a in [2i64, -3] {
        let sheared = real_poly(&[(4, 0, 0, 1), (3, 0, 1, -4 * a), (2, 0, 2, 6 * a * a), (1, 0, 3, -4 * a * a * a), (0, 0, 4, a.pow(4))]);
        let image = [rat_int(a), Rational::zero(), Rational::one()];
        for &(y, u) in &points {
            let p = [rat(a * u, 2), rat(y, 3), rat(u, 2)];
            let s = chain_slope(&sheared, &p).unwrap();
            assert!(parallel(&s.l, &image), "l at H(p) = {p:?}, a = {a}");
        }
    }
}

fn criterion_9(rng: &mut Rng8) {
    for class in CLASSES {
        for n in 0..20 {
            let g = class_germ(rng, class, |_, _, _, _| true);
            let r = kolar_normalize(&g, &NormalizationParams::default(), g.trunc()).unwrap();
            let q = pz_mod_harmonic(&r.model).ok();
            for sol in &r.weights {
                assert!(sol.weight <= g.trunc());
                for row in &sol.rows {
                    assert!(row.eval(&sol.normal_part, q.as_ref()).is_zero(), "{class:?} #{n} weight {}: {row}", sol.weight);
                }
            }
        }
    }
    for k in 3..=8u32 {
        let sys = tubular_coupled_system(k).unwrap();
        let det = sys.matrix.determinant().unwrap();
        assert!(!det.is_zero(), "k={k}");
        assert_eq!(det, (rat_int(k as i64 - 3) + rat_int(k as i64 - 1) * &sys.c) / rat_int(2), "k={k}");
    }
}

fn crnf(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_crnf")).args(args).output().expect("binary runs");
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn criterion_10() {
    let dir = std::env::temp_dir().join(format!("crnf-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_owned();
    let (example, tube, circ) = (s(&data("t1_example.germ")), s(&data("tube4.germ")), s(&data("circular4.germ")));

    let (code, out) = crnf(&["classify", &example]);
    assert_eq!((code, out.lines().next()), (0, Some("k=4 nu=1 class=tubular case=T1")));
    let (code, out) = crnf(&["classify", &circ]);
    assert_eq!((code, out.lines().next()), (0, Some("k=4 nu=2 class=circular case=C")));
    let bad = dir.join("bad.germ");
    std::fs::write(&bad, "phi k=3 W=9\n2 1 0 1/0 0/1\n").unwrap();
    assert_eq!(crnf(&["classify", &s(&bad)]).0, 2);

    // normalize: files re-parse to the emitted objects; the output certifies itself
    let (germ_out, map_out) = (dir.join("n.germ"), dir.join("n.map"));
    let (code, cert) = crnf(&["normalize", &s(&data("tube3_bumped.germ")), "--out", &s(&germ_out), "--map-out", &s(&map_out)]);
    assert_eq!(code, 0);
    assert!(cert.lines().skip(1).all(|l| l.ends_with("0 = 0")));
    let normal = parse_germ(&std::fs::read_to_string(&germ_out).unwrap()).unwrap();
    assert!(normal.to_phi().unwrap().series().coeff(3, 1, 0).is_zero());
    assert_eq!(crnf::format::write_germ(&normal), std::fs::read_to_string(&germ_out).unwrap());
    parse_map(&std::fs::read_to_string(&map_out).unwrap()).unwrap();
    let again = dir.join("again.map");
    let (code, out) = crnf(&["normalize", &s(&germ_out), "--map-out", &s(&again)]);
    assert_eq!(code, 0);
    assert_eq!(parse_germ(&out).unwrap(), normal);
    assert!(parse_map(&std::fs::read_to_string(&again).unwrap()).unwrap().is_identity());
    assert_eq!(crnf(&["normalize", &example, "--form", "strong"]).0, 4);

    assert_eq!(crnf(&["equiv", &tube, &tube]), (0, "equivalent lambda=1\n".into()));
    assert_eq!(crnf(&["equiv", &s(&data("tube3_bumped.germ")), &tube]), (1, "inequivalent: type\n".into()));
    assert_eq!(crnf(&["equiv", &s(&data("tube3_bumped.germ")), &s(&data("tube3_dilated.germ"))]), (0, "equivalent lambda=2\n".into()));

    let (code, out) = crnf(&["trace", &tube, "--point", "0,0,0", "--steps", "3", "--h", "0.5"]);
    assert_eq!((code, out.as_str()), (0, "0 0 0 0\n0.5 0.5 0 0\n1 1 0 0\n1.5 1.5 0 0\n"));
    assert_eq!(crnf(&["trace", &circ, "--point", "0,0,0"]).0, 6);
    let _ = std::fs::remove_dir_all(&dir);
}

fn main() {
    let mut rng = Rng8::seed_from_u64(0x5eed_2024);
    let mut criteria: Vec<(&str, Box<dyn FnMut(&mut Rng8)>)> = vec![
        ("conversion round trip on 200 random germs", Box::new(criterion_1)),
        ("Kolar-modified postconditions, 50 germs per class", Box::new(criterion_2)),
        ("uniqueness and the dilation law", Box::new(criterion_3)),
        ("renormalization round trip recovered by dilation_match", Box::new(criterion_4)),
        ("special form and curve-preserving round trip", Box::new(criterion_5)),
        ("strong form, with the T2 claim", Box::new(criterion_6)),
        ("worked T1 example", Box::new(|_: &mut Rng8| criterion_7())),
        ("T2 tube: certificate, slopes and equivariance", Box::new(|_: &mut Rng8| criterion_8())),
        ("homological solver internals", Box::new(criterion_9)),
        ("CLI contract", Box::new(|_: &mut Rng8| criterion_10())),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter_mut().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut rng)));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS ({secs:.1}s): {name}", n + 1),
            Err(e) => {
                failed += 1;
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
                println!("criterion {:>2} FAIL ({secs:.1}s): {name}: {msg}", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
