//! Normalization flows built on the weight-by-weight solver.

use num_traits::{One, Zero};

use crate::curve::CurveJet;
use crate::error::{Error, Result};
use crate::map::MapJet;
use crate::model::{ModelClass, PolyModel};
use crate::scalar::{rat_int, rational_root, Rational, Scalar};
use crate::series::{reversion, Grading, Vars, WSeries};
use crate::surface::{basic_identity_residual, phi_to_theta, theta_to_phi, transform_theta, GermPhi, GermTheta};

use super::conditions::{conditions_at, imposed_side, Condition, ConditionFamily, Side};
use super::engine::{solve_weight_equation, Engine, WeightSolution};

/// Free data of the normalization: `f_z(0,0) = λ ω` and, for circular
/// models, `Re g_ww(0,0) = ρ`. `ω` is a unimodular Gaussian rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationParams {
    pub lambda: Rational,
    pub omega: Scalar,
    pub rho: Rational,
}

impl Default for NormalizationParams {
    fn default() -> Self {
        NormalizationParams { lambda: Rational::one(), omega: Scalar::one(), rho: Rational::zero() }
    }
}

impl NormalizationParams {
    pub fn with_lambda(lambda: Rational) -> Self {
        NormalizationParams { lambda, ..Default::default() }
    }

    fn validate(&self, class: ModelClass) -> Result<()> {
        if self.lambda.is_zero() {
            return Err(Error::Precondition("lambda must be nonzero".into()));
        }
        if !self.omega.norm_sq().is_one() {
            return Err(Error::Precondition("omega must be unimodular".into()));
        }
        if class != ModelClass::Circular && (!self.omega.is_one() || !self.rho.is_zero()) {
            return Err(Error::Precondition("omega and rho are free only for circular models".into()));
        }
        Ok(())
    }
}

/// The residual group factor `Λ` of a normalizing map `F = F̃ ∘ Λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupElement {
    /// `(λ z, λ^k w)`.
    Dilation { lambda: Rational },
    /// `(s z (1 + r w)^{−1/ν}, |s|^{2ν} w / (1 + r w))`.
    Circular { nu: u32, s: Scalar, r: Rational },
}

impl GroupElement {
    pub fn from_params(model: &PolyModel, p: &NormalizationParams) -> Result<Self> {
        p.validate(model.class)?;
        if model.class != ModelClass::Circular {
            return Ok(GroupElement::Dilation { lambda: p.lambda.clone() });
        }
        let s = p.omega.scale(&p.lambda);
        let nu = model.nu;
        let sn = num_traits::pow(s.norm_sq(), nu as usize);
        let r = -(&p.rho / (rat_int(2) * sn));
        Ok(GroupElement::Circular { nu, s, r })
    }

    pub fn to_map(&self, grading: Grading, trunc: u32) -> Result<MapJet> {
        match self {
            GroupElement::Dilation { lambda } => Ok(MapJet::dilation(grading, trunc, lambda)),
            GroupElement::Circular { nu, s, r } => MapJet::circular_element(grading, trunc, *nu, s, r),
        }
    }

    /// The parameters that produce this element, when `|s|` is rational.
    pub fn params(&self) -> Option<NormalizationParams> {
        match self {
            GroupElement::Dilation { lambda } => Some(NormalizationParams::with_lambda(lambda.clone())),
            GroupElement::Circular { nu, s, r } => {
                let lambda = rational_root(&s.norm_sq(), 2)?;
                let omega = s.scale(&lambda.recip());
                let rho = -(rat_int(2) * r * num_traits::pow(s.norm_sq(), *nu as usize));
                Some(NormalizationParams { lambda, omega, rho })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormalFormKind {
    KolarModified,
    Special,
    Strong,
}

impl NormalFormKind {
    pub fn family(&self) -> ConditionFamily {
        match self {
            NormalFormKind::KolarModified => ConditionFamily::KolarModified,
            NormalFormKind::Special => ConditionFamily::Special,
            NormalFormKind::Strong => ConditionFamily::Strong,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NormalFormKind::KolarModified => "kolar",
            NormalFormKind::Special => "special",
            NormalFormKind::Strong => "strong",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConditionRole {
    Imposed,
    Checked,
    /// Predicted to arise without being imposed; required only for T2 germs.
    Claim,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub weight: u32,
    pub role: ConditionRole,
    pub value: Rational,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.value.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct NormalizationResult {
    pub kind: NormalFormKind,
    pub model: PolyModel,
    pub params: NormalizationParams,
    pub group: GroupElement,
    /// The normal form.
    pub germ: GermPhi,
    pub theta: GermTheta,
    /// The normalizing map from the input coordinates.
    pub map: MapJet,
    /// `basic_identity_residual(input, map, output)`; zero to the truncation.
    pub residual: WSeries,
    pub conditions: Vec<ConditionReport>,
    pub weights: Vec<WeightSolution>,
}

impl NormalizationResult {
    /// Every imposed and checked condition holds (claims excluded).
    pub fn conditions_hold(&self) -> bool {
        self.conditions.iter().filter(|c| c.role != ConditionRole::Claim).all(ConditionReport::pass)
    }

    pub fn claims_hold(&self) -> bool {
        self.conditions.iter().filter(|c| c.role == ConditionRole::Claim).all(ConditionReport::pass)
    }

    pub fn certified(&self) -> bool {
        self.residual.is_zero() && self.conditions_hold()
    }
}

/// Checks `v = P + O(k+1)` with harmonic-free normalized `P`.
pub fn tangent_model(germ: &GermPhi) -> Result<PolyModel> {
    let k = germ.k();
    if k < 3 {
        return Err(Error::Precondition(format!("type {k} is below 3")));
    }
    let s = germ.series();
    if s.order().is_none_or(|o| o < k) {
        return Err(Error::Precondition("germ is not of the form v = P + O(k+1)".into()));
    }
    let block = s.homogeneous(k);
    if block.terms().keys().any(|i| i.m > 0) {
        return Err(Error::Precondition("weight-k block depends on u".into()));
    }
    let model = PolyModel::from_series(k, &block)?;
    if !model.is_normalized() {
        return Err(Error::Precondition("model is not normalized (a_nu != 1)".into()));
    }
    Ok(model)
}

/// The block of weight `m` on `side`.
fn block(theta: &GermTheta, side: Side, m: u32) -> Result<WSeries> {
    match side {
        Side::Theta => Ok(theta.series().homogeneous(m)),
        Side::Phi => Ok(theta_to_phi(&theta.truncate(m))?.series().homogeneous(m)),
    }
}

fn add_identity(f: &WSeries, g: &WSeries) -> Result<MapJet> {
    let (gr, t) = (f.grading(), f.trunc());
    MapJet::new(WSeries::var(gr, t, Vars::Map, 0).add(f)?, WSeries::var(gr, t, Vars::Map, 2).add(g)?)
}

/// Runs the recursion for weights `from..=trunc` on `theta`, composing onto `map`.
pub(crate) fn recursion(
    theta: GermTheta,
    model: &PolyModel,
    family: ConditionFamily,
    map: MapJet,
    from: u32,
    keep_log: bool,
) -> Result<(GermTheta, MapJet, Vec<WeightSolution>)> {
    let t = theta.trunc();
    let engine = Engine::new(model, t)?;
    let side = imposed_side(family, model.class);
    let (mut theta, mut map) = (theta, map);
    let mut log = vec![];
    for m in from..=t {
        let psi = block(&theta, side, m)?;
        let sol = solve_weight_equation(&engine, family, m, &psi)?;
        if !(sol.f.is_zero() && sol.g.is_zero()) {
            let h = add_identity(&sol.f, &sol.g)?;
            let warm = theta.series().clone();
            theta = transform_theta(&theta, &h, Some((&warm, m)))?;
            map = h.compose(&map)?;
            let after = block(&theta, side, m)?;
            if let Some(c) = sol.rows.iter().find(|c| !c.eval(&after, engine.pairing_form()).is_zero()) {
                return Err(Error::Singular(format!("weight {m}: condition {c} survived the solve")));
            }
        }
        if keep_log {
            log.push(sol);
        }
    }
    Ok((theta, map, log))
}

/// Evaluates all conditions of `family` for weights `k+1..=trunc`.
pub fn condition_report(family: ConditionFamily, model: &PolyModel, theta: &GermTheta, phi: &GermPhi) -> Vec<ConditionReport> {
    let q = crate::model::pz_mod_harmonic(model).ok();
    let mut out = vec![];
    for m in model.k + 1..=theta.trunc() {
        let c = conditions_at(family, model, m);
        let roles = [(c.imposed, ConditionRole::Imposed), (c.checked, ConditionRole::Checked), (c.claims, ConditionRole::Claim)];
        for (list, role) in roles {
            for cond in list {
                let s = if cond.side() == Side::Phi { phi.series() } else { theta.series() };
                out.push(ConditionReport { condition: cond, weight: m, role, value: cond.eval(s, q.as_ref()) });
            }
        }
    }
    out
}

fn check_trunc(germ: &GermPhi, w: u32, k: u32) -> Result<()> {
    if w < 3 * k {
        return Err(Error::Precondition(format!("truncation {w} is below 3k = {}", 3 * k)));
    }
    if germ.trunc() < w {
        return Err(Error::ExceedsTruncation(germ.trunc()));
    }
    Ok(())
}

fn germ_at(germ: &GermPhi, w: u32) -> Result<GermPhi> {
    GermPhi::new(germ.series().truncate(w))
}

fn normalize_with(
    kind: NormalFormKind,
    germ: &GermPhi,
    params: &NormalizationParams,
    w: u32,
    model: &PolyModel,
) -> Result<NormalizationResult> {
    let family = kind.family();
    let input = phi_to_theta(&germ_at(germ, w)?)?;
    let gr = input.series().grading();
    let group = GroupElement::from_params(model, params)?;
    let lam = group.to_map(gr, w)?;
    let start = transform_theta(&input, &lam, None)?;
    let (theta, map, weights) = recursion(start, model, family, lam, model.k + 1, true)?;
    finish(kind, model, params.clone(), group, &input, theta, map, weights)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    kind: NormalFormKind,
    model: &PolyModel,
    params: NormalizationParams,
    group: GroupElement,
    input: &GermTheta,
    theta: GermTheta,
    map: MapJet,
    weights: Vec<WeightSolution>,
) -> Result<NormalizationResult> {
    let residual = basic_identity_residual(input, &map, &theta)?;
    let germ = theta_to_phi(&theta)?;
    let conditions = condition_report(kind.family(), model, &theta, &germ);
    Ok(NormalizationResult { kind, model: model.clone(), params, group, germ, theta, map, residual, conditions, weights })
}

/// The unique map `F = F̃ ∘ Λ(params)` with prenormalized `F̃` bringing the
/// germ into the Kolar-modified normal form of its class, to weight `w`.
pub fn kolar_normalize(germ: &GermPhi, params: &NormalizationParams, w: u32) -> Result<NormalizationResult> {
    let model = tangent_model(germ)?;
    check_trunc(germ, w, model.k)?;
    normalize_with(NormalFormKind::KolarModified, germ, params, w, &model)
}

/// Kolar-modified normalization run only up to weight `w`, without the
/// `w ≥ 3k` requirement; used where only a low jet of the map is needed.
pub fn kolar_normalize_partial(germ: &GermPhi, w: u32) -> Result<NormalizationResult> {
    let model = tangent_model(germ)?;
    if germ.trunc() < w {
        return Err(Error::ExceedsTruncation(germ.trunc()));
    }
    normalize_with(NormalFormKind::KolarModified, germ, &NormalizationParams::default(), w, &model)
}

fn contains_gamma(germ: &GermPhi) -> bool {
    germ.slice(0, 0).is_zero()
}

/// The special normal form of a germ containing `Γ`, using only maps that
/// preserve `Γ`.
pub fn special_normalize(germ: &GermPhi, params: &NormalizationParams, w: u32) -> Result<NormalizationResult> {
    let model = tangent_model(germ)?;
    check_trunc(germ, w, model.k)?;
    if !contains_gamma(germ) {
        return Err(Error::GermLacksGamma);
    }
    normalize_with(NormalFormKind::Special, germ, params, w, &model)
}

/// `z* = z`, `w* = w + g(z, w)` with `g(0, w) = 0`, making `Θ_{0α} = Θ_{α0} = 0`.
pub fn normal_coordinates(germ: &GermPhi) -> Result<(GermPhi, MapJet)> {
    let model = tangent_model(germ)?;
    if !contains_gamma(germ) {
        return Err(Error::GermLacksGamma);
    }
    let theta = phi_to_theta(germ)?;
    let id = MapJet::identity(theta.series().grading(), theta.trunc());
    let (out, map, _) = recursion(theta, &model, ConditionFamily::NormalCoordinates, id, model.k + 1, false)?;
    Ok((theta_to_phi(&out)?, map))
}

/// Maps a transverse curve `γ ⊂ M` onto `Γ` by `z* = z − α(τ(w))`, `w* = τ(w)`,
/// `τ` the reversion of the (unit-speed) complexified `β`.
pub fn straighten_chain(germ: &GermPhi, gamma: &CurveJet) -> Result<(GermPhi, MapJet)> {
    let s = germ.series();
    let (gr, t) = (s.grading(), s.trunc());
    let res = gamma.surface_residual(s, false, t)?;
    if !res.is_zero() {
        return Err(Error::CurveNotOnSurface(format!("residual {res}")));
    }
    if !gamma.is_transverse() {
        return Err(Error::CurveNotTransverse);
    }
    let c = gamma.unit_speed()?;
    let beta = CurveJet::series_of(&c.beta, gr, t, Vars::Map, 2);
    let tau = reversion(&beta)?;
    let alpha = CurveJet::series_of(&c.alpha, gr, t, Vars::Map, 2);
    let f = WSeries::var(gr, t, Vars::Map, 0).sub(&alpha.substitute([None, None, Some(&tau)])?)?;
    let map = MapJet::new(f, tau)?;
    let image = transform_theta(&phi_to_theta(germ)?, &map, None)?;
    let out = theta_to_phi(&image)?;
    if !contains_gamma(&out) {
        return Err(Error::Singular("straightened germ does not contain the curve".into()));
    }
    Ok((out, map))
}

/// The strong normal form: `γ` is mapped onto `Γ`, the Segre varieties along
/// it are straightened, and the special normalization finishes the job. The
/// returned map is the full composition from the input coordinates.
pub fn strong_normalize(germ: &GermPhi, gamma: &CurveJet, params: &NormalizationParams, w: u32) -> Result<NormalizationResult> {
    let model = tangent_model(germ)?;
    check_trunc(germ, w, model.k)?;
    let germ = germ_at(germ, w)?;
    // `t` has weight `k` along a transverse curve, and the chain enters the
    // map's `z`-component, which weight `w` determines to `w − k + 1`
    let report = crate::locus::type_along_curve(germ.series(), gamma, (w + 1 - model.k) / model.k)?;
    if !report.constant || report.type_at_origin != model.k {
        return Err(Error::CurveTypeNotConstant(format!("generators not vanishing along the curve: {}", report.failing.join(", "))));
    }
    let (straight, m1) = straighten_chain(&germ, gamma)?;
    let (flat, m2) = normal_coordinates(&straight)?;
    let mut r = normalize_with(NormalFormKind::Strong, &flat, params, w, &model)?;
    let total = r.map.compose(&m2.compose(&m1)?)?;
    r.residual = basic_identity_residual(&phi_to_theta(&germ)?, &total, &r.theta)?;
    r.map = total;
    Ok(r)
}

/// The degenerate chain through the origin of a germ with tubular model.
///
/// The Kolar normal form of such a germ is unique up to dilations and already
/// satisfies the strong conditions, so `Γ` is the chain there; the chain of
/// the input is its preimage. Only the coefficients the weight-`w`
/// normalizing map determines are returned.
pub fn degenerate_chain(germ: &GermPhi, w: u32) -> Result<CurveJet> {
    let model = tangent_model(germ)?;
    if model.class != ModelClass::Tubular {
        return Err(Error::ClassMismatch(format!("degenerate chains are traced for tubular models, not {}", model.class.name())));
    }
    check_trunc(germ, w, model.k)?;
    let inverse = kolar_normalize(germ, &NormalizationParams::default(), w)?.map.invert()?;
    // `t^j` carries weight `kj`; weight `w` fixes `g` to `w` and `f` to `w − k + 1`
    let on_gamma = |s: &WSeries, weight: u32| (0..=weight / model.k).map(|j| s.coeff(0, 0, j)).collect();
    CurveJet::new(on_gamma(&inverse.f, w + 1 - model.k), on_gamma(&inverse.g, w))
}

/// Splits `F = F̃ ∘ Λ` with `Λ` in the residual group of the model and `F̃`
/// prenormalized.
pub fn decompose_map(f: &MapJet, model: &PolyModel) -> Result<(MapJet, GroupElement)> {
    let (gr, t) = (f.grading(), f.trunc());
    let a = f.f.coeff(1, 0, 0);
    if a.is_zero() || f.g.coeff(0, 0, 1).is_zero() {
        return Err(Error::NonInvertible("map is not invertible at the origin".into()));
    }
    let group = if model.class == ModelClass::Circular {
        let sn = num_traits::pow(a.norm_sq(), model.nu as usize);
        let r = -(&f.g.coeff(0, 0, 2).re / sn);
        GroupElement::Circular { nu: model.nu, s: a, r }
    } else {
        if !a.is_real() {
            return Err(Error::Precondition("f_z(0,0) is not real".into()));
        }
        GroupElement::Dilation { lambda: a.re.clone() }
    };
    let tilde = f.compose(&group.to_map(gr, t)?.invert()?)?;
    let lead_ok = tilde.f.homogeneous(1) == WSeries::var(gr, t, Vars::Map, 0).homogeneous(1)
        && tilde.g.homogeneous(gr.k) == WSeries::var(gr, t, Vars::Map, 2).homogeneous(gr.k)
        && (model.class != ModelClass::Circular || tilde.g.coeff(0, 0, 2).re.is_zero());
    if !lead_ok {
        return Err(Error::Precondition("map is not a prenormalized map times a group element".into()));
    }
    Ok((tilde, group))
}

/// Applies an arbitrary map to a germ in `Φ` form.
pub fn apply_map(germ: &GermPhi, map: &MapJet) -> Result<GermPhi> {
    theta_to_phi(&transform_theta(&phi_to_theta(germ)?, map, None)?)
}

#[cfg(test)]
pub(crate) fn monomial_map(gr: Grading, t: u32, terms_f: &[(u32, u32, Scalar)], terms_g: &[(u32, u32, Scalar)]) -> Result<MapJet> {
    let mk = |terms: &[(u32, u32, Scalar)]| {
        let mut s = WSeries::zero(gr, t, Vars::Map);
        for (a, j, c) in terms {
            s.add_term(crate::series::MultiIndex::new(*a, 0, *j), c.clone());
        }
        s
    };
    add_identity(&mk(terms_f), &mk(terms_g))
}
