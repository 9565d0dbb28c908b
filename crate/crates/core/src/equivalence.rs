//! Equivalence of germs by comparison of normal forms modulo the residual
//! group: real dilations for tubular and generic models, the
//! three-parameter group `(λ, ω, r)` for circular ones.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::curve::CurveJet;
use crate::error::{Error, Result};
use crate::map::MapJet;
use crate::model::{simplify_to_tangent_model, ModelClass, PolyModel};
use crate::normalizer::{
    kolar_normalize, strong_normalize, tangent_model, GroupElement, NormalizationParams, NormalizationResult,
};
use crate::scalar::{fmt_rational, rational_root, Rational, Scalar};
use crate::series::MultiIndex;
use crate::surface::{basic_identity_residual, phi_to_theta, GermPhi};

/// `Λ(λ) = (λ z, λ^k w)`; it multiplies the coefficient of weight `m` by `λ^{k−m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DilationWitness {
    pub lambda: Rational,
}

/// The element of the circular group with `s = λ ω` and parameter `r`,
/// together with the normalization parameters that realize it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircularWitness {
    pub lambda: Rational,
    pub omega: Scalar,
    pub r: Rational,
    pub params: NormalizationParams,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Dilation(DilationWitness),
    Circular(CircularWitness),
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Dilation(d) => write!(f, "lambda={}", d.lambda),
            Witness::Circular(c) => write!(
                f,
                "lambda={} omega={},{} r={}",
                c.lambda,
                c.omega.re,
                c.omega.im,
                c.r
            ),
        }
    }
}

/// Three-valued outcome of an orbit search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Match<W> {
    Found(W),
    /// A structural invariant differs; no group element can match.
    Mismatch(String),
    /// No exact candidate was found; the germs may still be equivalent.
    NoExactCandidate(String),
}

fn weight(k: u32, i: &MultiIndex) -> u32 {
    i.a + i.b + k * i.m
}

fn check_same_shape(n: &GermPhi, m: &GermPhi) -> Result<()> {
    if n.k() != m.k() || n.trunc() != m.trunc() {
        return Err(Error::Precondition("normal forms must share k and the truncation".into()));
    }
    Ok(())
}

/// Finds `λ` with `Λ(λ)(N) = N*`, coefficientwise `c* = λ^{k−m} c`.
pub fn dilation_match(n: &GermPhi, m: &GermPhi) -> Result<Match<DilationWitness>> {
    check_same_shape(n, m)?;
    let k = n.k() as i64;
    let (a, b) = (n.series().terms(), m.series().terms());
    if let Some(i) = a.keys().find(|i| !b.contains_key(i)).or_else(|| b.keys().find(|i| !a.contains_key(i))) {
        return Ok(Match::Mismatch(format!("support differs at z^{} zb^{} u^{}", i.a, i.b, i.m)));
    }
    // the first coefficient that λ acts on fixes the candidates
    let lead = a.iter().find(|(i, _)| weight(n.k(), i) as i64 != k);
    let candidates = match lead {
        None => vec![Rational::one()],
        Some((i, c)) => {
            let e = k - weight(n.k(), i) as i64;
            let q = b[i].clone() / c.clone();
            if !q.is_real() {
                return Ok(Match::Mismatch(format!("coefficient ratio at z^{} zb^{} u^{} is not real", i.a, i.b, i.m)));
            }
            let q = if e > 0 { q.re } else { q.re.recip() };
            match rational_root(&q, e.unsigned_abs() as u32) {
                None if e % 2 == 0 && q.is_negative() => {
                    return Ok(Match::Mismatch(format!("coefficient ratio at z^{} zb^{} u^{} has the wrong sign", i.a, i.b, i.m)))
                }
                None => return Ok(Match::NoExactCandidate(format!("ratio {} has no rational root of order {}", fmt_rational(&q), e.abs()))),
                Some(r) if e % 2 == 0 => vec![r.clone(), -r],
                Some(r) => vec![r],
            }
        }
    };
    for lambda in candidates {
        let ok = a.iter().all(|(i, c)| {
            let e = k - weight(n.k(), i) as i64;
            let f = if e >= 0 { num_traits::pow(lambda.clone(), e as usize) } else { num_traits::pow(lambda.recip(), (-e) as usize) };
            b[i] == c.scale(&f)
        });
        if ok {
            return Ok(Match::Found(DilationWitness { lambda }));
        }
    }
    Ok(Match::Mismatch("no dilation matches every coefficient".into()))
}

/// Renormalizes a normal form with other group parameters.
pub type Renormalize<'a> = dyn Fn(&GermPhi, &NormalizationParams) -> Result<NormalizationResult> + 'a;

/// Gaussian-rational `d`-th roots of `zeta` of modulus one, found by
/// rounding the floating-point roots and checking them exactly.
fn unimodular_roots(zeta: &Scalar, d: i64) -> Vec<Scalar> {
    if d == 0 {
        return if zeta.is_one() { vec![Scalar::one()] } else { vec![] };
    }
    let (zr, zi) = (zeta.re.to_f64().unwrap_or(f64::NAN), zeta.im.to_f64().unwrap_or(f64::NAN));
    let arg = zi.atan2(zr);
    let n = d.unsigned_abs() as f64;
    let mut out = vec![];
    for j in 0..d.unsigned_abs() {
        let theta = (arg + 2.0 * std::f64::consts::PI * j as f64) / n * d.signum() as f64;
        let (Some(re), Some(im)) = (nearby_rational(theta.cos()), nearby_rational(theta.sin())) else { continue };
        let w = Scalar::new(re, im);
        if w.norm_sq().is_one() && w.pow(d).ok().as_ref() == Some(zeta) && !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// The continued-fraction convergent of `x` within `1e-12`, with a bounded
/// denominator.
fn nearby_rational(x: f64) -> Option<Rational> {
    const MAX_DEN: i64 = 1 << 24;
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut rest = x;
    loop {
        let a = rest.floor();
        if a.abs() > MAX_DEN as f64 {
            return None;
        }
        let a = a as i64;
        let (p2, q2) = (a.checked_mul(p1)?.checked_add(p0)?, a.checked_mul(q1)?.checked_add(q0)?);
        if q2 > MAX_DEN {
            return None;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() < 1e-12 {
            return Some(Rational::new(p1.into(), q1.into()));
        }
        let frac = rest - a as f64;
        if frac.abs() < 1e-15 {
            return None;
        }
        rest = 1.0 / frac;
    }
}

/// Rational roots of `B ρ² + A ρ + C = 0` (linear when `B = 0`).
fn rational_quadratic_roots(b: &Rational, a: &Rational, c: &Rational) -> Vec<Rational> {
    if b.is_zero() {
        return if a.is_zero() { vec![] } else { vec![-(c / a)] };
    }
    let disc = a * a - Rational::from_integer(4.into()) * b * c;
    match rational_root(&disc, 2) {
        None => vec![],
        Some(s) => {
            let two_b = b * Rational::from_integer(2.into());
            let mut v = vec![(-a + &s) / &two_b, (-a - &s) / &two_b];
            v.dedup();
            v
        }
    }
}

/// How many low-weight coefficients feed the candidate search.
const CANDIDATE_SOURCES: usize = 6;

/// Finds group parameters `p` with `renormalize(N, p) = N*` for circular normal forms.
pub fn circular_orbit_match(n: &GermPhi, m: &GermPhi, model: &PolyModel, renormalize: &Renormalize<'_>) -> Result<Match<CircularWitness>> {
    check_same_shape(n, m)?;
    if model.class != ModelClass::Circular {
        return Err(Error::ClassMismatch(format!("{} model in a circular comparison", model.class.name())));
    }
    let k = n.k();
    let (a, b) = (n.series().terms(), m.series().terms());
    // Without r, (λ, ω) act by c* = λ^{k−m} ω^{β−α} c; r only enters from
    // weight 2k on. Candidates come from the lowest coefficients acted on.
    let low = |i: &MultiIndex| weight(k, i) < 2 * k && weight(k, i) != k;
    for i in a.keys().chain(b.keys()) {
        if low(i) && (a.contains_key(i) != b.contains_key(i)) {
            return Ok(Match::Mismatch(format!("support differs at z^{} zb^{} u^{}", i.a, i.b, i.m)));
        }
    }
    let mut acted: Vec<(&MultiIndex, &Scalar)> =
        a.iter().filter(|(i, _)| weight(k, i) != k || i.a != i.b).filter(|(i, _)| b.contains_key(i)).collect();
    acted.sort_by_key(|(i, _)| weight(k, i));
    let mut candidates: Vec<(Rational, Scalar)> = vec![];
    for (i, c) in acted.into_iter().take(CANDIDATE_SOURCES) {
        let q = b[i].clone() / c.clone();
        let e = k as i64 - weight(k, i) as i64;
        let d = i.b as i64 - i.a as i64;
        let abs2 = if e > 0 { q.norm_sq() } else { q.norm_sq().recip() };
        let lambda = if e == 0 {
            if !abs2.is_one() {
                continue;
            }
            Rational::one()
        } else {
            match rational_root(&abs2, 2 * e.unsigned_abs() as u32) {
                Some(l) => l,
                None => continue,
            }
        };
        let scale = if e >= 0 { num_traits::pow(lambda.clone(), e as usize) } else { num_traits::pow(lambda.recip(), (-e) as usize) };
        let zeta = q.scale(&scale.recip());
        let omegas = if d == 0 { vec![Scalar::one()] } else { unimodular_roots(&zeta, d) };
        for omega in omegas {
            if !candidates.contains(&(lambda.clone(), omega.clone())) {
                candidates.push((lambda.clone(), omega));
            }
        }
    }
    if candidates.is_empty() {
        candidates.push((Rational::one(), Scalar::one()));
    }
    for (lambda, omega) in &candidates {
        {
            let at = |rho: Rational| -> Result<GermPhi> {
                Ok(renormalize(n, &NormalizationParams { lambda: lambda.clone(), omega: omega.clone(), rho })?.germ)
            };
            let n0 = at(Rational::zero())?;
            let mut rhos = vec![Rational::zero()];
            if n0 != *m {
                let n1 = at(Rational::one())?;
                let nm = at(-Rational::one())?;
                let first = n0
                    .series()
                    .terms()
                    .keys()
                    .chain(n1.series().terms().keys())
                    .filter(|i| n0.series().coeff(i.a, i.b, i.m) != n1.series().coeff(i.a, i.b, i.m))
                    .min_by_key(|i| (weight(k, i), **i))
                    .copied();
                let Some(i) = first else { continue };
                let c = |g: &GermPhi| g.series().coeff(i.a, i.b, i.m);
                let (c0, c1, cm, target) = (c(&n0), c(&n1), c(&nm), c(m));
                let part = |s: &Scalar, re: bool| if re { s.re.clone() } else { s.im.clone() };
                let use_re = c1.re != c0.re || cm.re != c0.re;
                let (p0, p1, pm, pt) = (part(&c0, use_re), part(&c1, use_re), part(&cm, use_re), part(&target, use_re));
                let half = Rational::new(1.into(), 2.into());
                let lin = (&p1 - &pm) * &half;
                let quad = (&p1 + &pm) * &half - &p0;
                rhos = rational_quadratic_roots(&quad, &lin, &(&p0 - &pt));
            }
            for rho in rhos {
                let params = NormalizationParams { lambda: lambda.clone(), omega: omega.clone(), rho };
                let r = renormalize(n, &params)?;
                if r.germ == *m {
                    let GroupElement::Circular { r: rr, .. } = GroupElement::from_params(model, &params)? else {
                        unreachable!("circular model")
                    };
                    return Ok(Match::Found(CircularWitness { lambda: lambda.clone(), omega: omega.clone(), r: rr, params }));
                }
            }
        }
    }
    Ok(Match::NoExactCandidate("no candidate (lambda, omega, r) reproduces the second normal form".into()))
}

/// A germ brought into the form `v = P + O(k+1)` with normalized `P`.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub input: GermPhi,
    pub germ: GermPhi,
    pub model: PolyModel,
    /// Weighted map from the input to `germ`, when the reduction respects weights.
    pub to_tangent: Option<MapJet>,
    /// Polynomial (degree-graded) version of the same map, for carrying curves along.
    pub polynomial_map: Option<MapJet>,
}

/// Reduces `germ` (read as a polynomial when it is not yet in tangent-model form).
pub fn prepare(germ: &GermPhi, w: u32) -> Result<Prepared> {
    let input = GermPhi::new(germ.series().truncate(w))?;
    if let Ok(model) = tangent_model(germ) {
        let id = MapJet::identity(germ.series().grading(), w);
        return Ok(Prepared { input, germ: germ.clone(), model, to_tangent: Some(id), polynomial_map: None });
    }
    let s = simplify_to_tangent_model(germ.series(), w)?;
    let to_tangent = if s.model.k == germ.k() { s.weighted_map(w) } else { None };
    Ok(Prepared { input, germ: s.germ, model: s.model, to_tangent, polynomial_map: Some(s.map) })
}

impl Prepared {
    /// Carries a curve of the input into the coordinates of `germ`.
    pub fn carry(&self, c: &CurveJet, order: u32) -> Result<CurveJet> {
        match &self.polynomial_map {
            None => Ok(c.clone()),
            Some(m) => c.mapped(m, order),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Equivalent {
        witness: Witness,
        /// Map from the first germ to the second.
        map: MapJet,
        /// The basic identity holds exactly for `map`.
        residual_zero: bool,
        /// `map` relates the tangent-model forms rather than the raw inputs.
        relative_to_tangent_form: bool,
    },
    Inequivalent(String),
    Undecided(String),
}

fn normalize_pair(
    a: &Prepared,
    b: &Prepared,
    w: u32,
    chains: Option<(&CurveJet, &CurveJet)>,
) -> Result<(NormalizationResult, NormalizationResult, Box<Renormalize<'static>>)> {
    let default = NormalizationParams::default();
    match chains {
        Some((ca, cb)) => {
            let ra = strong_normalize(&a.germ, &a.carry(ca, w)?, &default, w)?;
            let rb = strong_normalize(&b.germ, &b.carry(cb, w)?, &default, w)?;
            let renorm: Box<Renormalize<'static>> = Box::new(move |g: &GermPhi, p: &NormalizationParams| strong_normalize(g, &CurveJet::gamma(), p, w));
            Ok((ra, rb, renorm))
        }
        None => {
            let ra = kolar_normalize(&a.germ, &default, w)?;
            let rb = kolar_normalize(&b.germ, &default, w)?;
            let renorm: Box<Renormalize<'static>> = Box::new(move |g: &GermPhi, p: &NormalizationParams| kolar_normalize(g, p, w));
            Ok((ra, rb, renorm))
        }
    }
}

fn compare(
    a: &Prepared,
    b: &Prepared,
    w: u32,
    chains: Option<(&CurveJet, &CurveJet)>,
) -> Result<Match<(Witness, MapJet)>> {
    let (ra, rb, renorm) = normalize_pair(a, b, w, chains)?;
    let (gr, t) = (ra.map.grading(), ra.map.trunc());
    let found = match a.model.class {
        ModelClass::Circular => match circular_orbit_match(&ra.germ, &rb.germ, &a.model, renorm.as_ref())? {
            Match::Found(c) => {
                let g = renorm(&ra.germ, &c.params)?.map;
                (Witness::Circular(c), g)
            }
            Match::Mismatch(s) => return Ok(Match::Mismatch(s)),
            Match::NoExactCandidate(s) => return Ok(Match::NoExactCandidate(s)),
        },
        _ => match dilation_match(&ra.germ, &rb.germ)? {
            Match::Found(d) => {
                let g = MapJet::dilation(gr, t, &d.lambda);
                (Witness::Dilation(d), g)
            }
            Match::Mismatch(s) => return Ok(Match::Mismatch(s)),
            Match::NoExactCandidate(s) => return Ok(Match::NoExactCandidate(s)),
        },
    };
    let (witness, g) = found;
    let map = rb.map.invert()?.compose(&g)?.compose(&ra.map)?;
    Ok(Match::Found((witness, map)))
}

/// Decides whether two germs are equivalent, to weight `w`.
///
/// With chains for both germs the strong normal forms along every pair of
/// chains are compared; otherwise the Kolar-modified normal forms.
pub fn equivalent(a: &GermPhi, b: &GermPhi, w: u32, chains_a: &[CurveJet], chains_b: &[CurveJet]) -> Result<Verdict> {
    let pa = prepare(a, w)?;
    let pb = prepare(b, w)?;
    if pa.model.k != pb.model.k {
        return Ok(Verdict::Inequivalent("type".into()));
    }
    if pa.model.class != pb.model.class {
        return Ok(Verdict::Inequivalent("model class".into()));
    }
    if pa.model.nu != pb.model.nu {
        return Ok(Verdict::Inequivalent("nu".into()));
    }
    if pa.model != pb.model {
        return Ok(Verdict::Inequivalent("model polynomial".into()));
    }
    let pairs: Vec<Option<(&CurveJet, &CurveJet)>> = if chains_a.is_empty() || chains_b.is_empty() {
        vec![None]
    } else {
        chains_a.iter().flat_map(|x| chains_b.iter().map(move |y| Some((x, y)))).collect()
    };
    let mut undecided = None;
    let mut mismatch = None;
    for pair in pairs {
        match compare(&pa, &pb, w, pair)? {
            Match::Found((witness, map)) => return finish(&pa, &pb, witness, map),
            Match::Mismatch(s) => mismatch = mismatch.or(Some(s)),
            Match::NoExactCandidate(s) => undecided = undecided.or(Some(s)),
        }
    }
    Ok(match (undecided, mismatch) {
        (Some(s), _) => Verdict::Undecided(s),
        (None, Some(s)) => Verdict::Inequivalent(s),
        (None, None) => Verdict::Undecided("nothing to compare".into()),
    })
}

fn finish(pa: &Prepared, pb: &Prepared, witness: Witness, map: MapJet) -> Result<Verdict> {
    if let (Some(ta), Some(tb)) = (&pa.to_tangent, &pb.to_tangent) {
        let full = tb.invert()?.compose(&map)?.compose(ta)?;
        let res = basic_identity_residual(&phi_to_theta(&pa.input)?, &full, &phi_to_theta(&pb.input)?)?;
        return Ok(Verdict::Equivalent { witness, map: full, residual_zero: res.is_zero(), relative_to_tangent_form: false });
    }
    let res = basic_identity_residual(&phi_to_theta(&pa.germ)?, &map, &phi_to_theta(&pb.germ)?)?;
    Ok(Verdict::Equivalent { witness, map, residual_zero: res.is_zero(), relative_to_tangent_form: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalizer::apply_map;
    use crate::scalar::rat;
    use crate::series::{Grading, Vars, WSeries};

    fn s(re: i64, im: i64) -> Scalar {
        Scalar::from_ints(re, im)
    }

    fn germ(model: &PolyModel, w: u32, extra: &[(u32, u32, u32, Scalar)]) -> GermPhi {
        let gr = Grading::new(model.k).unwrap();
        let mut p = model.series(gr, w, Vars::Phi);
        for (a, b, m, c) in extra {
            p.add_term(MultiIndex::new(*a, *b, *m), c.clone());
            if a != b {
                p.add_term(MultiIndex::new(*b, *a, *m), c.conj());
            }
        }
        GermPhi::new(p).unwrap()
    }

    fn kolar(g: &GermPhi, w: u32) -> GermPhi {
        kolar_normalize(g, &NormalizationParams::default(), w).unwrap().germ
    }

    #[test]
    fn dilation_match_examples() {
        let model = PolyModel::tubular(3);
        let n = kolar(&germ(&model, 9, &[(2, 1, 1, s(1, 1)), (4, 0, 0, s(0, 1)), (3, 3, 0, s(8, 0))]), 9);
        assert_eq!(dilation_match(&n, &n).unwrap(), Match::Found(DilationWitness { lambda: rat(1, 1) }));
        let gr = Grading::new(3).unwrap();
        let m = apply_map(&n, &MapJet::dilation(gr, 9, &rat(2, 1))).unwrap();
        assert_eq!(m.series().coeff(3, 3, 0), n.series().coeff(3, 3, 0).scale(&rat(1, 8)));
        assert_eq!(dilation_match(&n, &m).unwrap(), Match::Found(DilationWitness { lambda: rat(2, 1) }));
        let bare = germ(&model, 9, &[]);
        assert!(matches!(dilation_match(&n, &bare).unwrap(), Match::Mismatch(_)));
        // λ³ = 2 has no rational solution
        let t = WSeries::from_terms(gr, 9, Vars::Phi, n.series().terms().iter().map(|(i, c)| {
            let c = if i.a + i.b + 3 * i.m == 6 { c.scale(&rat(2, 1)) } else { c.clone() };
            (i.a, i.b, i.m, c)
        }));
        let t = GermPhi::new(t).unwrap();
        assert!(!matches!(dilation_match(&n, &t).unwrap(), Match::Found(_)));
    }

    fn shear_like(gr: Grading, w: u32) -> MapJet {
        // z + z w/2 + i z², w + z³ (weights respected: leading part is the identity)
        let f = WSeries::from_terms(gr, w, Vars::Map, [(1, 0, 0, s(1, 0)), (1, 0, 1, Scalar::frac(1, 2)), (2, 0, 0, s(0, 1))]);
        let g = WSeries::from_terms(gr, w, Vars::Map, [(0, 0, 1, s(1, 0)), (4, 0, 0, s(1, 0)), (0, 0, 2, s(0, 3))]);
        MapJet::new(f, g).unwrap()
    }

    #[test]
    fn germ_and_its_image_are_equivalent() {
        for (model, extra) in [
            (PolyModel::tubular(3), vec![(2, 1, 1, s(1, 1)), (4, 0, 0, s(0, 1))]),
            (PolyModel::from_coeffs(4, vec![s(0, 0), s(1, 0), s(0, 0), s(1, 0), s(0, 0)]).unwrap(), vec![(2, 1, 1, s(1, 2))]),
        ] {
            let w = 3 * model.k;
            let a = germ(&model, w, &extra);
            let gr = Grading::new(model.k).unwrap();
            let h = MapJet::dilation(gr, w, &rat(-2, 1)).compose(&shear_like(gr, w)).unwrap();
            let b = apply_map(&a, &h).unwrap();
            match equivalent(&a, &b, w, &[], &[]).unwrap() {
                Verdict::Equivalent { witness, residual_zero, relative_to_tangent_form, .. } => {
                    assert!(residual_zero);
                    assert!(!relative_to_tangent_form);
                    assert_eq!(witness, Witness::Dilation(DilationWitness { lambda: rat(-2, 1) }));
                }
                v => panic!("{v:?}"),
            }
            // symmetric
            assert!(matches!(equivalent(&b, &a, w, &[], &[]).unwrap(), Verdict::Equivalent { residual_zero: true, .. }));
        }
    }

    #[test]
    fn inequivalent_examples() {
        let t3 = germ(&PolyModel::tubular(3), 12, &[]);
        let c4 = germ(&PolyModel::circular(2), 12, &[]);
        assert!(matches!(equivalent(&t3, &c4, 12, &[], &[]).unwrap(), Verdict::Inequivalent(s) if s == "type"));
        let model = PolyModel::tubular(3);
        let bumped = germ(&model, 9, &[(3, 3, 0, s(1, 0))]);
        assert!(matches!(equivalent(&germ(&model, 9, &[]), &bumped, 9, &[], &[]).unwrap(), Verdict::Inequivalent(_)));
    }

    #[test]
    fn circular_orbit_recovery() {
        let model = PolyModel::circular(2);
        let n = kolar(&germ(&model, 12, &[(3, 2, 0, s(1, 2)), (2, 1, 1, s(1, 0))]), 12);
        let renorm = |g: &GermPhi, p: &NormalizationParams| kolar_normalize(g, p, 12);
        for params in [
            NormalizationParams { lambda: rat(1, 1), omega: s(0, 1), rho: rat(0, 1) },
            NormalizationParams { lambda: rat(1, 1), omega: s(1, 0), rho: rat(-1, 1) },
            NormalizationParams { lambda: rat(2, 1), omega: Scalar::new(rat(3, 5), rat(-4, 5)), rho: rat(1, 3) },
        ] {
            let m = renorm(&n, &params).unwrap().germ;
            match circular_orbit_match(&n, &m, &model, &renorm).unwrap() {
                Match::Found(w) => assert_eq!(w.params, params),
                other => panic!("{params:?}: {other:?}"),
            }
        }
        // r = 1/2 corresponds to ρ = −1 at s = 1
        let m = renorm(&n, &NormalizationParams { rho: rat(-1, 1), ..Default::default() }).unwrap().germ;
        let Match::Found(w) = circular_orbit_match(&n, &m, &model, &renorm).unwrap() else { panic!() };
        assert_eq!(w.r, rat(1, 2));
        assert_eq!(circular_orbit_match(&n, &n, &model, &renorm).unwrap(), Match::Found(CircularWitness {
            lambda: rat(1, 1),
            omega: Scalar::one(),
            r: rat(0, 1),
            params: NormalizationParams::default(),
        }));
    }
}
