//! Levi degeneracy, the locus of maximal type, the G/C/T1/T2 alternative,
//! type along curves, and the slope field of degenerate chains.
//!
//! Germs enter here as polynomials `Φ(z, z̄, u)`: every term is taken
//! literally, so recentering at other points of `M` is exact. All
//! certificates are exact; [`trace_chain`] is the one floating-point routine.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::curve::CurveJet;
use crate::error::{Error, Result};
use crate::model::{flatten, raw_tangent_model, recenter, simplify_flat, value_at, ModelClass, PolyModel};
use crate::normalizer::kolar_normalize_partial;
use crate::scalar::{Rational, Scalar};
use crate::series::{implicit_solve, Grading, MultiIndex, Vars, WSeries};

/// Truncation used for "polynomial" series: large enough never to bind.
const POLY: u32 = u32::MAX / 4;

fn degree_grading() -> Grading {
    Grading::new(1).expect("degree grading")
}

/// Total degree of a polynomial (weights ignored).
pub fn total_degree(phi: &WSeries) -> u32 {
    phi.terms().keys().map(|i| i.a + i.b + i.m).max().unwrap_or(0)
}

fn as_polynomial(phi: &WSeries) -> WSeries {
    phi.regrade(degree_grading(), POLY)
}

/// `Δ = −4 det M` for the bordered Hessian
/// `M = [[0, ρ_z̄, ρ_w̄], [ρ_z, ρ_zz̄, ρ_zw̄], [ρ_w, ρ_wz̄, ρ_ww̄]]` of
/// `ρ = Φ(z, z̄, u) − v`, written in the graph coordinates `(z, z̄, u)`.
///
/// The factor makes `Δ = Φ_zz̄` whenever `Φ` does not depend on `u`. The
/// result lives in the grading of `phi` and is exact to the truncation the
/// derivatives leave.
pub fn levi_determinant(phi: &WSeries) -> Result<WSeries> {
    let (g, t, vars) = (phi.grading(), phi.trunc(), phi.vars());
    if vars != Vars::Phi {
        return Err(Error::Incompatible("expected a real defining function".into()));
    }
    let half = Scalar::frac(1, 2);
    let ihalf = Scalar::new(Rational::zero(), Rational::new(1.into(), 2.into()));
    let c = |s: Scalar| WSeries::constant(g, t, vars, s);
    let pz = phi.deriv(0);
    let pzb = phi.deriv(1);
    let pu = phi.deriv(2);
    let rho_w = pu.scale(&half).add(&c(ihalf.clone()))?;
    let rho_wb = pu.scale(&half).sub(&c(ihalf))?;
    let rho_zzb = pz.deriv(1);
    let rho_zwb = pz.deriv(2).scale(&half);
    let rho_wzb = pzb.deriv(2).scale(&half);
    let rho_wwb = pu.deriv(2).scale(&Scalar::frac(1, 4));
    // det M = −ρ_z̄ (ρ_z ρ_ww̄ − ρ_zw̄ ρ_w) + ρ_w̄ (ρ_z ρ_wz̄ − ρ_zz̄ ρ_w)
    let first = pz.mul(&rho_wwb)?.sub(&rho_zwb.mul(&rho_w)?)?;
    let second = pz.mul(&rho_wzb)?.sub(&rho_zzb.mul(&rho_w)?)?;
    let det = rho_wb.mul(&second)?.sub(&pzb.mul(&first)?)?;
    Ok(det.scale(&Scalar::from_int(-4)))
}

/// [`levi_determinant`] of `phi` read as a polynomial: exact, degree graded.
pub fn levi_polynomial(phi: &WSeries) -> Result<WSeries> {
    Ok(levi_determinant(&as_polynomial(phi))?.with_trunc(POLY))
}

/// Type of the polynomial hypersurface `v = Φ` at the point `(z0, u0)` of `M`.
pub fn compute_type(phi: &WSeries, z0: &Scalar, u0: &Rational) -> Result<u32> {
    let v0 = value_at(phi, z0, u0)?;
    if !v0.is_real() {
        return Err(Error::RealityViolation("Φ takes a non-real value".into()));
    }
    let d = total_degree(phi).max(2);
    let raw = recenter(phi, z0, u0, d)?;
    Ok(raw_tangent_model(&raw, d)?.k)
}

/// `∂_z^a ∂_z̄^b Δ`, one of the equations of the locus of type `≥ k`.
#[derive(Clone, Debug)]
pub struct Generator {
    pub a: u32,
    pub b: u32,
    pub series: WSeries,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |name: &str, e: u32| match e {
            0 => String::new(),
            1 => format!("d_{name} "),
            e => format!("d_{name}^{e} "),
        };
        write!(f, "{}{}Delta", part("z", self.a), part("zb", self.b))
    }
}

/// `Δ` and all its `(z, z̄)`-derivatives of orders `1..=k−3`, exactly.
pub fn locus_equations(phi: &WSeries, k: u32) -> Result<Vec<Generator>> {
    let delta = levi_polynomial(phi)?;
    let mut out = vec![Generator { a: 0, b: 0, series: delta.clone() }];
    for order in 1..=k.saturating_sub(3) {
        for a in (0..=order).rev() {
            let b = order - a;
            let mut s = delta.clone();
            for _ in 0..a {
                s = s.deriv(0);
            }
            for _ in 0..b {
                s = s.deriv(1);
            }
            out.push(Generator { a, b, series: s.with_trunc(POLY) });
        }
    }
    Ok(out)
}

/// Rewrites a polynomial in `(z, z̄, u)` in the real coordinates `(x, y, u)`.
pub fn to_real(s: &WSeries) -> Result<WSeries> {
    let g1 = degree_grading();
    let x = WSeries::from_terms(g1, POLY, Vars::Real, [(1, 0, 0, Scalar::one()), (0, 1, 0, Scalar::i())]);
    let xb = WSeries::from_terms(g1, POLY, Vars::Real, [(1, 0, 0, Scalar::one()), (0, 1, 0, -Scalar::i())]);
    let u = WSeries::var(g1, POLY, Vars::Real, 2);
    as_polynomial(s).substitute_polynomial([Some(&x), Some(&xb), Some(&u)], POLY)
}

/// Real and imaginary parts of a real-coordinate polynomial, as two
/// polynomials with real coefficients.
pub fn split_real(s: &WSeries) -> (WSeries, WSeries) {
    let g = s.grading();
    let re = WSeries::from_terms(g, s.trunc(), Vars::Real, s.terms().iter().map(|(i, c)| (i.a, i.b, i.m, Scalar::real(c.re.clone()))));
    let im = WSeries::from_terms(g, s.trunc(), Vars::Real, s.terms().iter().map(|(i, c)| (i.a, i.b, i.m, Scalar::real(c.im.clone()))));
    (re, im)
}

/// Value of a polynomial at a rational point (all three slots constant).
pub fn eval_exact(s: &WSeries, at: [&Scalar; 3]) -> Result<Scalar> {
    let g1 = degree_grading();
    let c = |v: &Scalar| WSeries::constant(g1, 0, s.vars(), v.clone());
    let (a, b, m) = (c(at[0]), c(at[1]), c(at[2]));
    Ok(as_polynomial(s).substitute_polynomial([Some(&a), Some(&b), Some(&m)], 0)?.coeff(0, 0, 0))
}

/// The case of the alternative for a germ of type `k ≥ 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    G,
    C,
    T1,
    T2,
    Undetermined,
}

impl CaseTag {
    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::G => "G",
            CaseTag::C => "C",
            CaseTag::T1 => "T1",
            CaseTag::T2 => "T2",
            CaseTag::Undetermined => "Undetermined",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A two-dimensional chart `{G = 0}` of the locus: one real generator with
/// a nonzero linear part, solved for one real coordinate.
#[derive(Clone, Debug)]
pub struct Chart {
    /// The real polynomial `G` in `(x, y, u)`.
    pub equation: WSeries,
    /// Which coordinate (0 = x, 1 = y, 2 = u) the graph solves for.
    pub solved: usize,
    /// The solved coordinate as a series in the other two (degree graded).
    pub graph: WSeries,
    /// Degree to which the generators were tested on the graph.
    pub order: u32,
}

/// Outcome of [`type_along_curve`].
#[derive(Clone, Debug)]
pub struct CurveTypeReport {
    pub constant: bool,
    pub type_at_origin: u32,
    /// Generators that do not vanish identically along the curve.
    pub failing: Vec<String>,
    /// Types at sampled parameter values (only when the curve lies exactly on `M`).
    pub samples: Vec<(Rational, u32)>,
    pub order: u32,
}

#[derive(Clone, Debug)]
pub struct LocusReport {
    pub case: CaseTag,
    pub k: u32,
    pub class: Option<ModelClass>,
    /// The tangent model at the origin, unnormalized.
    pub model: Option<PolyModel>,
    pub generators: Vec<Generator>,
    pub evidence: Vec<String>,
    pub curves: Vec<std::result::Result<CurveTypeReport, Error>>,
    pub chart: Option<Chart>,
}

/// Degree to which the T2 identity test expands the graph.
pub const CHART_ORDER: u32 = 8;

/// Real generators of the locus in `(x, y, u)`: real and imaginary parts.
fn real_generators(gens: &[Generator]) -> Result<Vec<WSeries>> {
    let mut out = vec![];
    for g in gens {
        let (re, im) = split_real(&to_real(&g.series)?);
        for s in [re, im] {
            if !s.is_zero() {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// The slot of `G`'s linear part to solve for: prefer `x`, then `y`, then `u`.
fn linear_slot(g: &WSeries) -> Option<usize> {
    [(1, 0, 0), (0, 1, 0), (0, 0, 1)].iter().position(|&(a, b, m)| !g.coeff(a, b, m).is_zero())
}

fn permute(s: &WSeries, solved: usize) -> Result<WSeries> {
    // move `solved` into slot 0
    let g1 = degree_grading();
    let vars: Vec<WSeries> = (0..3).map(|i| WSeries::var(g1, POLY, Vars::Real, i)).collect();
    let order: [usize; 3] = match solved {
        0 => [0, 1, 2],
        1 => [1, 0, 2],
        _ => [1, 2, 0],
    };
    // slot j of `s` becomes variable order[j]
    s.substitute_polynomial([Some(&vars[order[0]]), Some(&vars[order[1]]), Some(&vars[order[2]])], POLY)
}

/// Solves `G = 0` for the coordinate `solved` near the origin, to degree `order`;
/// the other two coordinates become slots 1 and 2 (in their natural order).
fn solve_graph(g: &WSeries, solved: usize, order: u32) -> Result<WSeries> {
    let g1 = degree_grading();
    let p = permute(g, solved)?;
    let lead = p.coeff(1, 0, 0);
    let inv = lead.inv()?;
    let mut rest = p.clone();
    rest.set_term(MultiIndex::new(1, 0, 0), Scalar::zero());
    let rest = rest.with_trunc(order);
    let s1 = WSeries::var(g1, order, Vars::Real, 1);
    let s2 = WSeries::var(g1, order, Vars::Real, 2);
    implicit_solve(WSeries::zero(g1, order, Vars::Real), |h| {
        Ok(rest.substitute([Some(h), Some(&s1), Some(&s2)])?.scale(&-inv.clone()))
    })
}

fn restrict_to_graph(s: &WSeries, chart: &Chart) -> Result<WSeries> {
    let g1 = degree_grading();
    let p = permute(s, chart.solved)?.with_trunc(chart.order);
    let s1 = WSeries::var(g1, chart.order, Vars::Real, 1);
    let s2 = WSeries::var(g1, chart.order, Vars::Real, 2);
    p.substitute([Some(&chart.graph), Some(&s1), Some(&s2)])
}

/// Exact T2 certificate: some real generator has a nonzero linear part, and
/// every generator vanishes identically (to [`CHART_ORDER`]) on its graph.
pub fn t2_chart(gens: &[Generator]) -> Result<Option<Chart>> {
    let real = real_generators(gens)?;
    // the highest-order generators come last and are the likeliest to be smooth
    let Some((eq, solved)) = real.iter().rev().find_map(|g| linear_slot(g).map(|s| (g.clone(), s))) else {
        return Ok(None);
    };
    let graph = solve_graph(&eq, solved, CHART_ORDER)?;
    let chart = Chart { equation: eq, solved, graph, order: CHART_ORDER };
    for g in &real {
        if !restrict_to_graph(g, &chart)?.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(chart))
}

/// Series in the curve parameter `t` (slot 2, degree grading) of a polynomial
/// generator evaluated along `γ`.
fn along_curve(s: &WSeries, gamma: &CurveJet, order: u32) -> Result<WSeries> {
    let g1 = degree_grading();
    let a = CurveJet::series_of(&gamma.alpha, g1, POLY, Vars::Phi, 2);
    let ab = a.conj_coeffs();
    let re: Vec<Scalar> = gamma.beta.iter().map(|c| Scalar::real(c.re.clone())).collect();
    let u = CurveJet::series_of(&re, g1, POLY, Vars::Phi, 2);
    as_polynomial(s).substitute_polynomial([Some(&a), Some(&ab), Some(&u)], order)
}

/// Parameter values at which the type is sampled on exact curves.
fn sample_parameters() -> Vec<Rational> {
    [(1, 2), (-1, 3), (1, 5)].iter().map(|&(n, d)| Rational::new(n.into(), d.into())).collect()
}

/// Decides whether the type of `M` is constant along `γ`, to `order` in `t`.
///
/// The type at the origin is `k`; type is upper semicontinuous, so it is
/// constant along `γ` exactly when every equation of the locus of type `≥ k`
/// vanishes identically in `t`.
pub fn type_along_curve(phi: &WSeries, gamma: &CurveJet, order: u32) -> Result<CurveTypeReport> {
    let phi = as_polynomial(phi);
    if !gamma.surface_residual(&phi.regrade(degree_grading(), POLY), true, order)?.is_zero() {
        return Err(Error::CurveNotOnSurface(format!("residual nonzero below order {}", order + 1)));
    }
    let k = compute_type(&phi, &Scalar::zero(), &Rational::zero())?;
    let mut failing = vec![];
    for g in locus_equations(&phi, k)? {
        if !along_curve(&g.series, gamma, order)?.is_zero() {
            failing.push(g.to_string());
        }
    }
    let mut samples = vec![];
    if gamma.surface_residual(&phi, true, POLY)?.is_zero() {
        for t in sample_parameters() {
            let eval = |v: &[Scalar]| {
                let mut acc = Scalar::zero();
                let mut p = Rational::one();
                for c in v {
                    acc += &c.scale(&p);
                    p = &p * &t;
                }
                acc
            };
            let z0 = eval(&gamma.alpha);
            let u0 = eval(&gamma.beta).re;
            samples.push((t, compute_type(&phi, &z0, &u0)?));
        }
    }
    Ok(CurveTypeReport { constant: failing.is_empty(), type_at_origin: k, failing, samples, order })
}

/// Classifies a polynomial germ of type `k ≥ 3` into G, C, T1 or T2, checking
/// the supplied candidate curves along the way.
pub fn classify_case(phi: &WSeries, candidates: &[CurveJet]) -> Result<LocusReport> {
    let phi = as_polynomial(phi);
    if !phi.coeff(0, 0, 0).is_zero() {
        return Err(Error::Precondition("origin is not on the hypersurface".into()));
    }
    let d = total_degree(&phi).max(2);
    let mut evidence = vec![];
    let model = match raw_tangent_model(&recenter(&phi, &Scalar::zero(), &Rational::zero(), d)?, d) {
        Ok(m) => m,
        Err(e @ Error::InfiniteTypeToWeight(_)) => {
            evidence.push(format!("type not determined: {e}"));
            return Ok(undetermined(0, None, vec![], evidence));
        }
        Err(e) => return Err(e),
    };
    let k = model.k;
    if k < 3 {
        evidence.push(format!("type {k}: Levi-nondegenerate point, the alternative does not apply"));
        return Ok(undetermined(k, Some(model), vec![], evidence));
    }
    evidence.push(format!("type {k}, model class {}", model.class.name()));
    let generators = locus_equations(&phi, k)?;
    let curves: Vec<_> = candidates.iter().map(|c| type_along_curve(&phi, c, 2 * k + 2)).collect();
    let verified = curves.iter().filter(|r| matches!(r, Ok(r) if r.constant)).count();
    if verified > 0 {
        evidence.push(format!("{verified} candidate curve(s) of constant type verified"));
    }
    let chart = t2_chart(&generators)?;
    let case = match (&chart, model.class) {
        (Some(_), ModelClass::Tubular) => {
            evidence.push("locus is a smooth surface: all generators vanish on a graph chart".into());
            CaseTag::T2
        }
        (Some(_), _) => {
            evidence.push("graph chart found but the model is not tubular".into());
            CaseTag::Undetermined
        }
        (None, ModelClass::Tubular) => {
            evidence.push("no two-dimensional chart of the locus; tubular model".into());
            CaseTag::T1
        }
        (None, ModelClass::Circular) => CaseTag::C,
        (None, ModelClass::Generic) => CaseTag::G,
    };
    Ok(LocusReport { case, k, class: Some(model.class), model: Some(model), generators, evidence, curves, chart })
}

fn undetermined(k: u32, model: Option<PolyModel>, generators: Vec<Generator>, evidence: Vec<String>) -> LocusReport {
    let class = model.as_ref().map(|m| m.class);
    LocusReport { case: CaseTag::Undetermined, k, class, model, generators, evidence, curves: vec![], chart: None }
}

/// Rewrites a polynomial in `(x, y, u)` in the variables `(z, z̄, u)`.
pub fn from_real(s: &WSeries) -> Result<WSeries> {
    let g1 = degree_grading();
    let half = Scalar::frac(1, 2);
    let x = WSeries::from_terms(g1, POLY, Vars::Phi, [(1, 0, 0, half.clone()), (0, 1, 0, half.clone())]);
    let y = WSeries::from_terms(g1, POLY, Vars::Phi, [(1, 0, 0, Scalar::new(Rational::zero(), -half.re.clone())), (0, 1, 0, Scalar::new(Rational::zero(), half.re.clone()))]);
    let u = WSeries::var(g1, POLY, Vars::Phi, 2);
    as_polynomial(s).substitute_polynomial([Some(&x), Some(&y), Some(&u)], POLY)
}

/// A point of `M` in real coordinates `(x, y, u)`.
pub type RealPoint = [Rational; 3];

/// The slope field at one point of the degeneracy set `Σ` of a T2 germ.
#[derive(Clone, Debug)]
pub struct SlopeSample {
    pub point: RealPoint,
    /// `l(p)`: the direction of `(dF|_p)^{-1}(0, 1)`, in `(x, y, u)`.
    pub l: RealPoint,
    /// `c(p)`: a spanning vector of `T^ℂ_p M ∩ T_p Σ`, in `(x, y, u)`.
    pub c: RealPoint,
    /// `dF|_p` in the complex coordinates `(z, w)`, rows `[f_z, f_w]`, `[g_z, g_w]`.
    pub differential: [[Scalar; 2]; 2],
}

impl SlopeSample {
    /// `l(p)` and `c(p)` are linearly independent.
    pub fn transverse(&self) -> bool {
        cross(&self.l, &self.c).iter().any(|x| !x.is_zero())
    }
}

pub fn cross(a: &RealPoint, b: &RealPoint) -> RealPoint {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &RealPoint, b: &RealPoint) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A complex tangent vector `(δz, δw)` of `M` in real coordinates `(δx, δy, δu)`.
fn to_real_vector(v: &[Scalar; 2]) -> RealPoint {
    [v[0].re.clone(), v[0].im.clone(), v[1].re.clone()]
}

fn mat_mul(a: &[[Scalar; 2]; 2], b: &[[Scalar; 2]; 2]) -> [[Scalar; 2]; 2] {
    let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Everything about a T2 germ that the slope field needs once.
#[derive(Clone, Debug)]
pub struct T2Data {
    pub phi: WSeries,
    pub k: u32,
    pub chart: Chart,
    gradient: [WSeries; 3],
}

impl T2Data {
    /// Classifies `phi` and keeps the data of a T2 germ; `NotT2` otherwise.
    pub fn new(phi: &WSeries) -> Result<Self> {
        let report = classify_case(phi, &[])?;
        if report.case != CaseTag::T2 {
            return Err(Error::NotT2(format!("case {}", report.case)));
        }
        let chart = report.chart.expect("T2 carries a chart");
        let gradient = [chart.equation.deriv(0), chart.equation.deriv(1), chart.equation.deriv(2)].map(|s| s.with_trunc(POLY));
        Ok(T2Data { phi: as_polynomial(phi), k: report.k, chart, gradient })
    }

    fn chart_gradient(&self, p: &RealPoint) -> Result<RealPoint> {
        let at = p.clone().map(Scalar::real);
        let mut out: [Rational; 3] = Default::default();
        for (o, g) in out.iter_mut().zip(&self.gradient) {
            *o = eval_exact(g, [&at[0], &at[1], &at[2]])?.re;
        }
        Ok(out)
    }

    /// Value of the chart equation at a real point.
    pub fn chart_value(&self, p: &RealPoint) -> Result<Rational> {
        let at = p.clone().map(Scalar::real);
        Ok(eval_exact(&self.chart.equation, [&at[0], &at[1], &at[2]])?.re)
    }

    /// `l(p)` and `c(p)`. With `tolerance`, the point is only required to lie
    /// near `Σ`: pure terms of degree below `k` smaller than the tolerance are
    /// dropped after recentering.
    pub fn slope(&self, p: &RealPoint, tolerance: Option<f64>) -> Result<SlopeSample> {
        let k = self.k;
        let z0 = Scalar::new(p[0].clone(), p[1].clone());
        let u0 = p[2].clone();
        if tolerance.is_none() {
            let delta = levi_polynomial(&self.phi)?;
            let v0 = Scalar::real(u0.clone());
            if !eval_exact(&delta, [&z0, &z0.conj(), &v0])?.is_zero() {
                return Err(Error::PointNotOnSigma("the Levi determinant does not vanish".into()));
            }
        }
        let w = 2 * k - 1;
        let raw = recenter(&self.phi, &z0, &u0, w)?;
        let (mut flat, map) = flatten(&raw)?;
        if let Some(tol) = tolerance {
            let small: Vec<MultiIndex> = flat
                .terms()
                .iter()
                .filter(|(i, c)| i.m == 0 && i.a + i.b < k && to_f64(&c.re).hypot(to_f64(&c.im)) < tol)
                .map(|(i, _)| *i)
                .collect();
            for i in small {
                flat.set_term(i, Scalar::zero());
            }
        }
        let simplified = simplify_flat(flat, map)?;
        if simplified.model.k != k {
            return Err(Error::PointNotOnSigma(format!("type {} instead of {k}", simplified.model.k)));
        }
        if simplified.model.class != ModelClass::Tubular {
            return Err(Error::Precondition(format!("model at the point is {}", simplified.model.class.name())));
        }
        let normal = kolar_normalize_partial(&simplified.germ, w)?;
        let d = mat_mul(&normal.map.differential(), &simplified.map.differential());
        let det = &(&d[0][0] * &d[1][1]) - &(&d[0][1] * &d[1][0]);
        let inv = det.inv()?;
        let l = to_real_vector(&[&(-d[0][1].clone()) * &inv, &d[0][0] * &inv]);
        let e1 = [&d[1][1] * &inv, &(-d[1][0].clone()) * &inv];
        let r1 = to_real_vector(&e1);
        let r2 = to_real_vector(&[e1[0].mul_i(), e1[1].mul_i()]);
        let n = self.chart_gradient(p)?;
        let (a, b) = (dot(&n, &r2), dot(&n, &r1));
        if a.is_zero() && b.is_zero() {
            return Err(Error::Precondition("complex tangent line lies in the tangent plane of the locus".into()));
        }
        let c = [0, 1, 2].map(|i| &a * &r1[i] - &b * &r2[i]);
        Ok(SlopeSample { point: p.clone(), l, c, differential: d })
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `l(p)` and `c(p)` at a rational point `p` of `Σ` for a germ of class T2.
pub fn chain_slope(phi: &WSeries, p: &RealPoint) -> Result<SlopeSample> {
    T2Data::new(phi)?.slope(p, None)
}

/// One vertex of a traced chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
    /// `|G|` at the vertex, `G` the chart equation of `Σ`.
    pub residual: f64,
}

/// Grid on which floating-point points are rounded before the exact slope
/// computation.
const GRID: f64 = (1u64 << 40) as f64;
/// Pure terms of degree below `k` smaller than this are treated as zero at
/// numerically projected points.
const DROP_TOLERANCE: f64 = 1e-6;
const NEWTON_STEPS: usize = 30;
const NEWTON_TOLERANCE: f64 = 1e-13;

fn rationalize(v: f64) -> Result<Rational> {
    if !v.is_finite() {
        return Err(Error::StepFailure("non-finite coordinate".into()));
    }
    let n = (v * GRID).round();
    Ok(Rational::new(BigInt::from(n as i64), BigInt::from(GRID as i64)))
}

fn eval_real_f64(s: &WSeries, q: [f64; 3]) -> f64 {
    s.eval_f64([(q[0], 0.0), (q[1], 0.0), (q[2], 0.0)]).0
}

impl T2Data {
    fn project(&self, mut q: [f64; 3]) -> Result<[f64; 3]> {
        for _ in 0..NEWTON_STEPS {
            let g = eval_real_f64(&self.chart.equation, q);
            if g.abs() < NEWTON_TOLERANCE {
                return Ok(q);
            }
            let n = self.gradient.clone().map(|d| eval_real_f64(&d, q));
            let nn: f64 = n.iter().map(|x| x * x).sum();
            if !(nn > 0.0) || !g.is_finite() {
                return Err(Error::StepFailure("degenerate gradient in the projection".into()));
            }
            for i in 0..3 {
                q[i] -= g * n[i] / nn;
            }
        }
        let g = eval_real_f64(&self.chart.equation, q);
        if g.abs() < NEWTON_TOLERANCE.sqrt() {
            Ok(q)
        } else {
            Err(Error::StepFailure(format!("projection did not converge (residual {g:e})")))
        }
    }

    fn unit_slope(&self, q: [f64; 3], previous: Option<[f64; 3]>) -> Result<[f64; 3]> {
        let p = [rationalize(q[0])?, rationalize(q[1])?, rationalize(q[2])?];
        let s = self.slope(&p, Some(DROP_TOLERANCE)).map_err(|e| Error::StepFailure(format!("slope at ({}, {}, {}): {e}", q[0], q[1], q[2])))?;
        let mut l = s.l.clone().map(|r| to_f64(&r));
        let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::StepFailure("vanishing slope".into()));
        }
        let reference = previous.unwrap_or([0.0, 0.0, 1.0]);
        let mut sign = l.iter().zip(reference).map(|(a, b)| a * b).sum::<f64>().signum();
        if previous.is_none() && l[2] == 0.0 {
            sign = l.iter().copied().fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m }).signum();
        }
        for x in &mut l {
            *x *= sign / norm;
        }
        Ok(l)
    }
}

/// Integrates the slope field `l` on `Σ` from `start` (real coordinates
/// `(x, y, u)`) with the classical Runge–Kutta scheme, projecting back onto
/// `Σ` after every step. Floating point throughout; the slope itself is
/// computed exactly at the rounded point.
pub fn trace_chain(phi: &WSeries, start: [f64; 3], steps: usize, h: f64) -> Result<Vec<TracePoint>> {
    let data = T2Data::new(phi)?;
    let mut q = data.project(start)?;
    let vertex = |t: f64, q: [f64; 3]| TracePoint { t, x: q[0], y: q[1], u: q[2], residual: eval_real_f64(&data.chart.equation, q).abs() };
    let mut out = vec![vertex(0.0, q)];
    let mut dir: Option<[f64; 3]> = None;
    let shifted = |q: [f64; 3], d: [f64; 3], s: f64| [q[0] + s * d[0], q[1] + s * d[1], q[2] + s * d[2]];
    for n in 1..=steps {
        let k1 = data.unit_slope(q, dir)?;
        let k2 = data.unit_slope(shifted(q, k1, h / 2.0), Some(k1))?;
        let k3 = data.unit_slope(shifted(q, k2, h / 2.0), Some(k1))?;
        let k4 = data.unit_slope(shifted(q, k3, h), Some(k1))?;
        let step = [0, 1, 2].map(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0);
        q = data.project(shifted(q, step, h))?;
        dir = Some(k1);
        out.push(vertex(n as f64 * h, q));
    }
    Ok(out)
}

/// The polyline as text: one vertex per line, `t u x y`.
pub fn format_polyline(points: &[TracePoint]) -> String {
    points.iter().map(|p| format!("{} {} {} {}\n", p.t, p.u, p.x, p.y)).collect()
}
