//! Polynomial models `v = P(z, z̄)` of finite type germs, their
//! classification, and the reduction of a raw germ to the form
//! `v = P(z, z̄) + O(k+1)` with `P` free of harmonic terms.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::map::MapJet;
use crate::scalar::{rat_int, Rational, Scalar};
use crate::series::{implicit_solve, Grading, MultiIndex, Vars, WSeries};
use crate::surface::{basic_identity_residual, phi_to_theta, GermPhi};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelClass {
    Tubular,
    Circular,
    Generic,
}

impl ModelClass {
    pub fn name(&self) -> &'static str {
        match self {
            ModelClass::Tubular => "tubular",
            ModelClass::Circular => "circular",
            ModelClass::Generic => "generic",
        }
    }
}

/// `P = Σ_{j=1}^{k-1} a_j z^j z̄^{k-j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyModel {
    pub k: u32,
    /// `a[j]` for `j = 0..=k`; the harmonic ends `a[0]`, `a[k]` are zero.
    pub a: Vec<Scalar>,
    pub nu: u32,
    pub class: ModelClass,
}

fn binomial(n: u32, j: u32) -> Rational {
    let mut r = Rational::one();
    for i in 0..j {
        r = r * rat_int((n - i) as i64) / rat_int((i + 1) as i64);
    }
    r
}

impl PolyModel {
    /// Validates reality, harmonic-freeness and non-vanishing, then derives
    /// `ν` and the class.
    pub fn from_coeffs(k: u32, a: Vec<Scalar>) -> Result<Self> {
        if a.len() != k as usize + 1 {
            return Err(Error::Precondition("model needs k+1 coefficients".into()));
        }
        if !a[0].is_zero() || !a[k as usize].is_zero() {
            return Err(Error::Precondition("model polynomial has harmonic terms".into()));
        }
        for j in 0..=k as usize {
            if a[j] != a[k as usize - j].conj() {
                return Err(Error::RealityViolation("model polynomial is not real-valued".into()));
            }
        }
        let nu = (1..=k / 2)
            .find(|&j| !a[j as usize].is_zero())
            .ok_or_else(|| Error::Precondition("model polynomial vanishes".into()))?;
        let class = if 2 * nu == k {
            ModelClass::Circular
        } else if nu == 1 && Self::tube_ratio(k, &a).is_some() {
            ModelClass::Tubular
        } else {
            ModelClass::Generic
        };
        Ok(PolyModel { k, a, nu, class })
    }

    /// For `P = c (ω z + ω̄ z̄)^k` modulo harmonic terms (`|ω| = 1`), the
    /// ratio `ε = ω²`, read off from `j a_j = ε (k − j + 1) a_{j−1}`. This is
    /// the equality case `P_z ∝ conj(P_z)` of the Cauchy bound.
    fn tube_ratio(k: u32, a: &[Scalar]) -> Option<Scalar> {
        if k < 3 || a[1].is_zero() {
            return None;
        }
        let eps = (&a[2] * &Scalar::from_int(2)) * a[1].scale(&rat_int(k as i64 - 1)).inv().ok()?;
        if !eps.norm_sq().is_one() {
            return None;
        }
        let holds = (2..k).all(|j| {
            let j_ = j as usize;
            a[j_].scale(&rat_int(j as i64)) == &eps * &a[j_ - 1].scale(&rat_int((k - j + 1) as i64))
        });
        holds.then_some(eps)
    }

    /// `ε = ω²` of a tubular model; `1` for the standard tube `c (z + z̄)^k`.
    pub fn tube_rotation(&self) -> Option<Scalar> {
        (self.class == ModelClass::Tubular).then(|| Self::tube_ratio(self.k, &self.a)).flatten()
    }

    /// Reads the pure `z^j z̄^{k−j}` coefficients of `block`.
    pub fn from_series(k: u32, block: &WSeries) -> Result<Self> {
        let a = (0..=k).map(|j| block.coeff(j, k - j, 0)).collect();
        Self::from_coeffs(k, a)
    }

    /// `P = (1/k)[(z + z̄)^k − z^k − z̄^k]`.
    pub fn tubular(k: u32) -> Self {
        let mut a = vec![Scalar::zero(); k as usize + 1];
        for j in 1..k {
            a[j as usize] = Scalar::real(binomial(k, j) / rat_int(k as i64));
        }
        Self::from_coeffs(k, a).expect("tube model is valid")
    }

    /// `P = |z|^{2ν}`.
    pub fn circular(nu: u32) -> Self {
        let k = 2 * nu;
        let mut a = vec![Scalar::zero(); k as usize + 1];
        a[nu as usize] = Scalar::one();
        Self::from_coeffs(k, a).expect("circular model is valid")
    }

    /// `a_ν = 1`, and for tubes the standard orientation `c (z + z̄)^k`.
    pub fn is_normalized(&self) -> bool {
        self.a[self.nu as usize].is_one() && self.tube_rotation().is_none_or(|e| e.is_one())
    }

    /// Divides `P` by the real number `a_ν`; returns the model and `a_ν`.
    /// A non-real `a_ν` would need an irrational rotation of `z`.
    pub fn normalized(&self) -> Result<(PolyModel, Rational)> {
        let an = &self.a[self.nu as usize];
        if !an.is_real() {
            return Err(Error::Irrational(format!(
                "a_nu = {an} is not real; normalising it needs a rotation of z by an irrational angle"
            )));
        }
        let s = an.re.clone();
        let inv = s.recip();
        let a = self.a.iter().map(|c| c.scale(&inv)).collect();
        Ok((Self::from_coeffs(self.k, a)?, s))
    }

    /// `P` as a series in the given roles (slot 2 unused).
    pub fn series(&self, grading: Grading, trunc: u32, vars: Vars) -> WSeries {
        WSeries::from_terms(
            grading,
            trunc,
            vars,
            (1..self.k).map(|j| (j, self.k - j, 0, self.a[j as usize].clone())),
        )
    }
}

/// A homogeneous polynomial `Σ_j b_j z^j z̄^{m−j}` of degree `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPoly {
    pub coeffs: Vec<Scalar>,
}

impl HPoly {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        HPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Member of the harmonic-free subspace.
    pub fn is_harmonic_free(&self) -> bool {
        self.coeffs.first().is_none_or(Scalar::is_zero) && self.coeffs.last().is_none_or(Scalar::is_zero)
    }

    /// `Q̄`: conjugation maps `z^j z̄^{m−j}` to `z^{m−j} z̄^j`.
    pub fn conj(&self) -> HPoly {
        HPoly { coeffs: self.coeffs.iter().rev().map(Scalar::conj).collect() }
    }
}

/// `(Q, R) = Σ_{j=1}^{m−1} q_j r̄_j`.
pub fn hermitian_form(q: &HPoly, r: &HPoly) -> Result<Scalar> {
    if q.degree() != r.degree() {
        return Err(Error::Precondition(format!(
            "hermitian form of degrees {} and {}",
            q.degree(),
            r.degree()
        )));
    }
    let m = q.degree();
    let mut acc = Scalar::zero();
    for j in 1..m {
        acc += &(&q.coeffs[j] * &r.coeffs[j].conj());
    }
    Ok(acc)
}

/// The harmonic-free polynomial of degree `k−1` agreeing with `P_z` up to
/// harmonic terms.
pub fn pz_mod_harmonic(model: &PolyModel) -> Result<HPoly> {
    if model.class != ModelClass::Generic {
        return Err(Error::ClassMismatch(format!("model is {}, expected generic", model.class.name())));
    }
    let k = model.k as usize;
    let mut c = vec![Scalar::zero(); k];
    for j in 1..k {
        c[j - 1] = model.a[j].scale(&rat_int(j as i64));
    }
    c[0] = Scalar::zero();
    c[k - 1] = Scalar::zero();
    Ok(HPoly::new(c))
}

/// Reads the degree-`k` pure block of a germ in tangent-model form.
pub fn polynomial_model(germ: &GermPhi) -> Result<PolyModel> {
    PolyModel::from_series(germ.k(), germ.series())
}

/// Re-expands the polynomial `Φ` around the point `(z0, u0)` of `M`, in
/// degree grading truncated at `trunc`: returns `Φ(z + z0, z̄ + z̄0, u + u0) − v0`.
pub fn recenter(raw: &WSeries, z0: &Scalar, u0: &Rational, trunc: u32) -> Result<WSeries> {
    let g1 = Grading::new(1)?;
    let poly = raw.regrade(g1, u32::MAX / 4);
    let z = WSeries::from_terms(g1, trunc, Vars::Phi, [(1, 0, 0, Scalar::one()), (0, 0, 0, z0.clone())]);
    let zb = WSeries::from_terms(g1, trunc, Vars::Phi, [(0, 1, 0, Scalar::one()), (0, 0, 0, z0.conj())]);
    let u = WSeries::from_terms(g1, trunc, Vars::Phi, [(0, 0, 1, Scalar::one()), (0, 0, 0, Scalar::real(u0.clone()))]);
    let mut out = poly.substitute_polynomial([Some(&z), Some(&zb), Some(&u)], trunc)?;
    out.set_term(MultiIndex::ZERO, Scalar::zero());
    Ok(out)
}

/// `v0 = Φ(z0, z̄0, u0)` for a polynomial `Φ`.
pub fn value_at(raw: &WSeries, z0: &Scalar, u0: &Rational) -> Result<Scalar> {
    let g1 = Grading::new(1)?;
    let poly = raw.regrade(g1, u32::MAX / 4);
    let c = |s: Scalar| WSeries::constant(g1, 0, Vars::Phi, s);
    let v = poly.substitute_polynomial([Some(&c(z0.clone())), Some(&c(z0.conj())), Some(&c(Scalar::real(u0.clone())))], 0)?;
    Ok(v.coeff(0, 0, 0))
}

/// Removes the linear part `c z + c̄ z̄ + d u` of a degree-graded `Φ` by the
/// linear map `z* = z, w* = (1 − i d) w − 2 i c z`. Returns the new `Φ` and the map.
pub fn flatten(phi: &WSeries) -> Result<(WSeries, MapJet)> {
    let g1 = phi.grading();
    if g1.k != 1 {
        return Err(Error::Incompatible("flattening works in degree grading".into()));
    }
    let t = phi.trunc();
    let c = phi.coeff(1, 0, 0);
    let d = phi.coeff(0, 0, 1);
    if !d.is_real() || phi.coeff(0, 1, 0) != c.conj() {
        return Err(Error::RealityViolation("linear part is not real".into()));
    }
    let d = d.re.clone();
    let map = MapJet::new(
        WSeries::var(g1, t, Vars::Map, 0),
        WSeries::from_terms(
            g1,
            t,
            Vars::Map,
            [(0, 0, 1, Scalar::new(Rational::one(), -d.clone())), (1, 0, 0, c.mul_i().scale(&rat_int(-2)))],
        ),
    )?;
    if c.is_zero() && d.is_zero() {
        return Ok((phi.clone(), map));
    }
    let mut q = phi.clone();
    for idx in [MultiIndex::new(1, 0, 0), MultiIndex::new(0, 1, 0), MultiIndex::new(0, 0, 1)] {
        q.set_term(idx, Scalar::zero());
    }
    let lin = WSeries::from_terms(g1, t, Vars::Phi, [(1, 0, 0, c.clone()), (0, 1, 0, c.conj())]);
    let skew = WSeries::from_terms(g1, t, Vars::Phi, [(1, 0, 0, c.mul_i()), (0, 1, 0, -c.conj().mul_i())]);
    let uvar = WSeries::var(g1, t, Vars::Phi, 2);
    let z = WSeries::var(g1, t, Vars::Phi, 0);
    let zb = WSeries::var(g1, t, Vars::Phi, 1);
    let denom = (Rational::one() + &d * &d).recip();
    // u = [u' − d v' − d L + i(c z − c̄ z̄)] / (1 + d²)
    let base = uvar.sub(&lin.scale_rational(&d))?.add(&skew)?;
    let v = implicit_solve(WSeries::zero(g1, t, Vars::Phi), |v| {
        let u = base.sub(&v.scale_rational(&d))?.scale_rational(&denom);
        q.substitute([Some(&z), Some(&zb), Some(&u)])
    })?;
    Ok((v, map))
}

/// Outcome of reducing a raw germ to `v = P + O(k+1)`.
#[derive(Clone, Debug)]
pub struct Simplified {
    /// The germ in weighted grading `k`, with `a_ν = 1`.
    pub germ: GermPhi,
    /// The normalized model.
    pub model: PolyModel,
    /// `a_ν` before the final real scaling of `w`.
    pub w_scale: Rational,
    /// The polynomial coordinate change, in degree grading, from the input
    /// coordinates to the simplified ones.
    pub map: MapJet,
}

impl Simplified {
    /// The coordinate change as a weighted jet, when it respects weights
    /// (no harmonic absorber of degree below `k`).
    pub fn weighted_map(&self, trunc: u32) -> Option<MapJet> {
        let g = Grading::new(self.model.k).ok()?;
        let m = self.map.regrade(g, trunc);
        MapJet::new(m.f, m.g).ok()
    }
}

fn is_harmonic(idx: &MultiIndex) -> bool {
    idx.m == 0 && (idx.a == 0 || idx.b == 0)
}

/// Brings a polynomial germ (exact constant term zero) into the form
/// `v = P(z, z̄) + O(k+1)` with harmonic-free `P` and `a_ν = 1`.
///
/// The input is treated as a polynomial in any grading; the computation runs
/// in degree grading truncated at `trunc`, which bounds the weight of the
/// output. Harmonic terms of the lowest degree are absorbed by
/// `w ↦ w − 2i h(z)` until the lowest-degree part of `Φ(z, z̄, 0)` is
/// harmonic-free; its degree is the type.
pub fn simplify_to_tangent_model(raw: &WSeries, trunc: u32) -> Result<Simplified> {
    let (phi, map) = prepare(raw, trunc)?;
    simplify_flat(phi, map)
}

/// The harmonic-free tangent model `P` of a polynomial germ, before the
/// real scaling of `w` (so `a_ν` may be any nonzero number).
pub fn raw_tangent_model(raw: &WSeries, trunc: u32) -> Result<PolyModel> {
    let (phi, map) = prepare(raw, trunc)?;
    let (phi, _, k) = absorb_harmonic(phi, map)?;
    PolyModel::from_series(k, &phi)
}

fn prepare(raw: &WSeries, trunc: u32) -> Result<(WSeries, MapJet)> {
    if raw.vars() != Vars::Phi {
        return Err(Error::Incompatible("expected a real defining function".into()));
    }
    if !raw.coeff(0, 0, 0).is_zero() {
        return Err(Error::Precondition("origin is not on the hypersurface".into()));
    }
    let g1 = Grading::new(1)?;
    flatten(&raw.regrade(g1, trunc))
}

/// Continues [`simplify_to_tangent_model`] from a degree-graded `Φ` without
/// linear part, reached from the input coordinates by `map`.
pub fn simplify_flat(phi: WSeries, map: MapJet) -> Result<Simplified> {
    let trunc = phi.trunc();
    let g1 = phi.grading();
    let (mut phi, mut map, k) = absorb_harmonic(phi, map)?;
    let z = WSeries::var(g1, trunc, Vars::Phi, 0);
    let zb = WSeries::var(g1, trunc, Vars::Phi, 1);
    let u = WSeries::var(g1, trunc, Vars::Phi, 2);
    let gk = Grading::new(k)?;
    let mut raw_model = PolyModel::from_series(k, &phi)?;
    // a rotated tube: z ↦ σ z with σ² = ε̄ makes it c (z + z̄)^k
    if let Some(eps) = raw_model.tube_rotation().filter(|e| !e.is_one()) {
        let sigma = eps.conj().sqrt_exact().ok_or_else(|| {
            Error::Irrational(format!("the tubular model is rotated by a square root of {eps}, which is not Gaussian rational"))
        })?;
        let zs = z.scale(&sigma);
        let zbs = zb.scale(&sigma.conj());
        phi = phi.substitute([Some(&zs), Some(&zbs), Some(&u)])?;
        let step = MapJet::new(WSeries::var(g1, trunc, Vars::Map, 0).scale(&sigma.conj()), WSeries::var(g1, trunc, Vars::Map, 2))?;
        map = step.compose(&map)?;
        raw_model = PolyModel::from_series(k, &phi)?;
    }
    let (model, s) = raw_model.normalized()?;
    // w ↦ w / a_ν, i.e. Φ ← Φ(z, z̄, a_ν u) / a_ν
    if !s.is_one() {
        let us = u.scale_rational(&s);
        phi = phi.substitute([Some(&z), Some(&zb), Some(&us)])?.scale_rational(&s.recip());
        let step = MapJet::new(
            WSeries::var(g1, trunc, Vars::Map, 0),
            WSeries::var(g1, trunc, Vars::Map, 2).scale_rational(&s.recip()),
        )?;
        map = step.compose(&map)?;
    }
    let germ = GermPhi::new(phi.regrade(gk, trunc))?;
    Ok(Simplified { germ, model, w_scale: s, map })
}

/// Absorbs lowest-degree harmonic terms of `Φ(z, z̄, 0)` until the lowest
/// degree part is harmonic-free; returns that degree (the type).
fn absorb_harmonic(mut phi: WSeries, mut map: MapJet) -> Result<(WSeries, MapJet, u32)> {
    let trunc = phi.trunc();
    let g1 = phi.grading();
    let z = WSeries::var(g1, trunc, Vars::Phi, 0);
    let zb = WSeries::var(g1, trunc, Vars::Phi, 1);
    let u = WSeries::var(g1, trunc, Vars::Phi, 2);
    let k = loop {
        let pure: Vec<(MultiIndex, Scalar)> =
            phi.terms().iter().filter(|(i, _)| i.m == 0).map(|(i, c)| (*i, c.clone())).collect();
        let Some(d) = pure.iter().map(|(i, _)| i.a + i.b).min() else {
            return Err(Error::InfiniteTypeToWeight(trunc));
        };
        let harmonic: Vec<(MultiIndex, Scalar)> =
            pure.into_iter().filter(|(i, _)| i.a + i.b == d && is_harmonic(i)).collect();
        if harmonic.is_empty() {
            break d;
        }
        // h(z) = Σ coefficients of z^a; Φ ← Φ(z, z̄, u + i(h − h̄)) − (h + h̄)
        let h = WSeries::from_terms(
            g1,
            trunc,
            Vars::Phi,
            harmonic.iter().filter(|(i, _)| i.b == 0).map(|(i, c)| (i.a, 0, 0, c.clone())),
        );
        let hb = h.conj_swap();
        let shift = u.add(&h.sub(&hb)?.scale(&Scalar::i()))?;
        phi = phi.substitute([Some(&z), Some(&zb), Some(&shift)])?.sub(&h.add(&hb)?)?;
        let absorber = h.with_vars(Vars::Map).scale(&Scalar::from_ints(0, -2));
        let step = MapJet::new(WSeries::var(g1, trunc, Vars::Map, 0), WSeries::var(g1, trunc, Vars::Map, 2).add(&absorber)?)?;
        map = step.compose(&map)?;
    };
    if k < 2 {
        return Err(Error::Precondition("defining function has a linear term".into()));
    }
    Ok((phi, map, k))
}

/// Certificate for [`simplify_to_tangent_model`]: the basic identity
/// residual between input and output, computed in degree grading.
pub fn simplification_residual(raw: &WSeries, s: &Simplified) -> Result<WSeries> {
    let g1 = Grading::new(1)?;
    let t = s.map.trunc();
    let src = phi_to_theta(&GermPhi::new(raw.regrade(g1, t)).map_err(|e| match e {
        Error::Precondition(_) => Error::Precondition("input must be flat for the certificate".into()),
        e => e,
    })?)?;
    let dst = phi_to_theta(&GermPhi::new(s.germ.series().regrade(g1, t))?)?;
    basic_identity_residual(&src, &s.map, &dst)
}

/// Sign of a rational, as `-1`, `0` or `1`.
pub fn signum(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn model_classes() {
        let m = PolyModel::from_coeffs(3, vec![s(0), s(1), s(1), s(0)]).unwrap();
        assert_eq!((m.nu, m.class), (1, ModelClass::Tubular));
        let c = PolyModel::from_coeffs(4, vec![s(0), s(0), s(1), s(0), s(0)]).unwrap();
        assert_eq!((c.nu, c.class), (2, ModelClass::Circular));
        let g = PolyModel::from_coeffs(6, vec![s(0), s(0), s(1), s(0), s(1), s(0), s(0)]).unwrap();
        assert_eq!((g.nu, g.class), (2, ModelClass::Generic));
        assert_eq!(PolyModel::tubular(4).a[2], Scalar::frac(3, 2));
    }

    #[test]
    fn hermitian_form_examples() {
        let q = HPoly::new(vec![s(0), s(3), s(1), s(0)]);
        let r = HPoly::new(vec![s(0), s(1), s(0), s(0)]);
        assert_eq!(hermitian_form(&q, &r).unwrap(), s(3));
        let p = HPoly::new(vec![s(0), s(1), s(1), s(0)]);
        assert_eq!(hermitian_form(&p, &p).unwrap(), s(2));
        assert!(hermitian_form(&p, &HPoly::new(vec![s(1), s(1)])).is_err());
    }

    #[test]
    fn pz_examples() {
        let g = PolyModel::from_coeffs(6, vec![s(0), s(0), s(1), s(0), s(1), s(0), s(0)]).unwrap();
        let q = pz_mod_harmonic(&g).unwrap();
        assert_eq!(q.coeffs, vec![s(0), s(2), s(0), s(4), s(0), s(0)]);
        let t = PolyModel::tubular(3);
        assert!(matches!(pz_mod_harmonic(&t), Err(Error::ClassMismatch(_))));
    }

    #[test]
    fn tube_over_quartic_is_simplified() {
        // (1/16)(z + z̄)^4
        let g = Grading::new(4).unwrap();
        let raw = WSeries::from_terms(g, 12, Vars::Phi, (0..=4).map(|j| (j, 4 - j, 0, Scalar::real(binomial(4, j) * rat(1, 16)))));
        let out = simplify_to_tangent_model(&raw, 12).unwrap();
        assert_eq!(out.model, PolyModel::tubular(4));
        assert_eq!(out.w_scale, rat(1, 4));
        assert_eq!(out.map.g.coeff(4, 0, 0), Scalar::from_ints(0, -1) * Scalar::frac(1, 8) * Scalar::from_int(4));
        assert!(simplification_residual(&raw, &out).unwrap().is_zero());
    }

    /// `(ω z + ω̄ z̄)^k`, harmonic terms included, in grading `k`.
    fn rotated_tube(k: u32, omega: &Scalar) -> WSeries {
        let g = Grading::new(k).unwrap();
        let terms = (0..=k).map(|j| {
            let c = omega.pow(j as i64).unwrap() * omega.conj().pow((k - j) as i64).unwrap();
            (j, k - j, 0, c.scale(&binomial(k, j)))
        });
        WSeries::from_terms(g, 3 * k, Vars::Phi, terms)
    }

    #[test]
    fn rotated_tubes_are_tubular() {
        let quarter = PolyModel::from_coeffs(4, vec![s(0), s(1), Scalar::frac(-3, 2), s(1), s(0)]).unwrap();
        assert_eq!(quarter.class, ModelClass::Tubular);
        assert_eq!(quarter.tube_rotation(), Some(s(-1)));
        assert!(!quarter.is_normalized());
        assert!(PolyModel::tubular(5).is_normalized());
        let near = PolyModel::from_coeffs(4, vec![s(0), s(1), Scalar::frac(3, 4), s(1), s(0)]).unwrap();
        assert_eq!(near.class, ModelClass::Generic);

        for omega in [Scalar::i(), Scalar::new(rat(3, 5), rat(4, 5)), Scalar::new(rat(-5, 13), rat(12, 13))] {
            let raw = rotated_tube(4, &omega);
            let out = simplify_to_tangent_model(&raw, 12).unwrap();
            assert_eq!(out.model, PolyModel::tubular(4), "omega = {omega}");
            assert!(simplification_residual(&raw, &out).unwrap().is_zero());
        }
        // ε = i needs σ² = −i: no Gaussian rational square root
        let eighth = PolyModel::from_coeffs(6, {
            let eps = Scalar::i();
            let mut a = vec![Scalar::zero(); 7];
            for j in 1..6u32 {
                a[j as usize] = eps.pow(j as i64 - 1).unwrap().scale(&(binomial(6, j) / rat_int(6)));
            }
            a
        });
        assert_eq!(eighth.as_ref().map(|m| m.class), Ok(ModelClass::Tubular));
        let raw = eighth.unwrap().series(Grading::new(6).unwrap(), 18, Vars::Phi);
        assert!(matches!(simplify_to_tangent_model(&raw, 18), Err(Error::Irrational(_))));
    }

    #[test]
    fn sphere_is_fixed() {
        let g = Grading::new(2).unwrap();
        let raw = WSeries::from_terms(g, 6, Vars::Phi, [(1, 1, 0, Scalar::one())]);
        let out = simplify_to_tangent_model(&raw, 6).unwrap();
        assert_eq!(out.model.k, 2);
        assert!(out.map.is_identity());
    }

    #[test]
    fn flatten_removes_linear_part() {
        let g1 = Grading::new(1).unwrap();
        let raw = WSeries::from_terms(
            g1,
            5,
            Vars::Phi,
            [(1, 0, 0, Scalar::from_ints(1, 2)), (0, 1, 0, Scalar::from_ints(1, -2)), (0, 0, 1, s(3)), (1, 1, 0, s(1))],
        );
        let (flat, map) = flatten(&raw).unwrap();
        assert!(flat.order().unwrap() >= 2);
        // image of the graph w = u + iΦ lies on v* = Φ*(z*, z̄*, u*)
        let z = WSeries::var(g1, 5, Vars::Phi, 0);
        let w = WSeries::var(g1, 5, Vars::Phi, 2).add(&raw.scale(&Scalar::i())).unwrap();
        let (zs, ws) = map.apply(&z, &w).unwrap();
        let wsb = ws.conj_swap();
        let re = ws.add(&wsb).unwrap().scale(&Scalar::frac(1, 2));
        let im = ws.sub(&wsb).unwrap().scale(&(&Scalar::from_ints(0, -1) * &Scalar::frac(1, 2)));
        let rhs = flat.substitute([Some(&zs), Some(&zs.conj_swap()), Some(&re)]).unwrap();
        assert!(im.sub(&rhs).unwrap().is_zero());
    }
}
