//! Hypersurface germs given by a real equation `v = Φ(z, z̄, u)` or a
//! complex equation `w = Θ(z, z̄, w̄)`, and the identities relating them.

use crate::error::{Error, Result};
use crate::map::MapJet;
use crate::scalar::Scalar;
use crate::series::{implicit_solve, implicit_solve_from, Grading, MultiIndex, Vars, WSeries};

/// Real defining function of a germ through 0 with tangent plane `{v = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermPhi {
    phi: WSeries,
}

/// Complex defining function `Θ = w̄ + O(2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermTheta {
    theta: WSeries,
}

impl GermPhi {
    /// Validates reality and the absence of constant and linear terms.
    pub fn new(phi: WSeries) -> Result<Self> {
        if phi.vars() != Vars::Phi {
            return Err(Error::Incompatible("real defining function must use (z, zb, u) slots".into()));
        }
        if !phi.is_hermitian() {
            return Err(Error::RealityViolation("coefficients of z^a zb^b and z^b zb^a are not conjugate".into()));
        }
        for idx in [MultiIndex::ZERO, MultiIndex::new(1, 0, 0), MultiIndex::new(0, 1, 0), MultiIndex::new(0, 0, 1)] {
            if !phi.coeff(idx.a, idx.b, idx.m).is_zero() {
                return Err(Error::Precondition(format!(
                    "defining function has a constant or linear term z^{} zb^{} u^{}",
                    idx.a, idx.b, idx.m
                )));
            }
        }
        Ok(GermPhi { phi })
    }

    pub fn series(&self) -> &WSeries {
        &self.phi
    }

    pub fn k(&self) -> u32 {
        self.phi.k()
    }

    pub fn trunc(&self) -> u32 {
        self.phi.trunc()
    }

    /// `Φ_{αβ}(u)`.
    pub fn slice(&self, alpha: u32, beta: u32) -> WSeries {
        self.phi.slice(alpha, beta)
    }
}

impl GermTheta {
    /// Checks the shape `Θ = w̄ + O(2)`; reality is checked separately
    /// (see [`reality_residual`]).
    pub fn new(theta: WSeries) -> Result<Self> {
        if theta.vars() != Vars::Theta {
            return Err(Error::Incompatible("complex defining function must use (z, zb, wb) slots".into()));
        }
        let ok = theta.coeff(0, 0, 0).is_zero()
            && theta.coeff(1, 0, 0).is_zero()
            && theta.coeff(0, 1, 0).is_zero()
            && theta.coeff(0, 0, 1).is_one();
        if !ok {
            return Err(Error::Precondition("complex defining function must be wb + higher order terms".into()));
        }
        Ok(GermTheta { theta })
    }

    pub fn series(&self) -> &WSeries {
        &self.theta
    }

    pub fn k(&self) -> u32 {
        self.theta.k()
    }

    pub fn trunc(&self) -> u32 {
        self.theta.trunc()
    }

    /// `Θ_{αβ}(w̄)`.
    pub fn slice(&self, alpha: u32, beta: u32) -> WSeries {
        self.theta.slice(alpha, beta)
    }

    pub fn truncate(&self, t: u32) -> GermTheta {
        GermTheta { theta: self.theta.truncate(t) }
    }
}

fn var(g: Grading, t: u32, vars: Vars, slot: usize) -> WSeries {
    WSeries::var(g, t, vars, slot)
}

/// Solves `(w − w̄)/2i = Φ(z, z̄, (w + w̄)/2)` for `w`.
pub fn phi_to_theta(germ: &GermPhi) -> Result<GermTheta> {
    let phi = germ.series();
    let (g, t) = (phi.grading(), phi.trunc());
    let z = var(g, t, Vars::Theta, 0);
    let zb = var(g, t, Vars::Theta, 1);
    let wb = var(g, t, Vars::Theta, 2);
    let two_i = Scalar::from_ints(0, 2);
    let half = Scalar::frac(1, 2);
    let theta = implicit_solve(wb.clone(), |w| {
        let u = w.add(&wb)?.scale(&half);
        let rhs = phi.substitute([Some(&z), Some(&zb), Some(&u)])?;
        wb.add(&rhs.scale(&two_i))
    })?;
    GermTheta::new(theta)
}

/// Inverse of [`phi_to_theta`]; fails on germs violating the reality identity.
pub fn theta_to_phi(germ: &GermTheta) -> Result<GermPhi> {
    let res = reality_residual(germ)?;
    if !res.is_zero() {
        return Err(Error::RealityViolation(format!("reality residual is {res}")));
    }
    let theta = germ.series();
    let (g, t) = (theta.grading(), theta.trunc());
    let z = var(g, t, Vars::Phi, 0);
    let zb = var(g, t, Vars::Phi, 1);
    let u = var(g, t, Vars::Phi, 2);
    let mut rest = theta.clone();
    rest.set_term(MultiIndex::new(0, 0, 1), Scalar::zero());
    let inv_two_i = Scalar::from_ints(0, 2).inv()?;
    let minus_i = Scalar::from_ints(0, -1);
    // v = Θ̃(z, z̄, u − iv) / 2i
    let v = implicit_solve(WSeries::zero(g, t, Vars::Phi), |v| {
        let wb = u.add(&v.scale(&minus_i))?;
        Ok(rest.substitute([Some(&z), Some(&zb), Some(&wb)])?.scale(&inv_two_i))
    })?;
    GermPhi::new(v)
}

/// `Θ̄(z̄, z, Θ(z, z̄, w̄)) − w̄`; vanishes exactly for real hypersurfaces.
pub fn reality_residual(germ: &GermTheta) -> Result<WSeries> {
    let theta = germ.series();
    let (g, t) = (theta.grading(), theta.trunc());
    let z = var(g, t, Vars::Theta, 0);
    let zb = var(g, t, Vars::Theta, 1);
    let wb = var(g, t, Vars::Theta, 2);
    let back = theta.conj_swap().substitute([Some(&z), Some(&zb), Some(theta)])?;
    back.sub(&wb)
}

/// `f̄(z̄, w̄)` as a series in `(z, z̄, w̄)`.
pub fn conj_map_component(h: &WSeries) -> WSeries {
    h.conj_coeffs().move_slot0_to_slot1().with_vars(Vars::Theta)
}

/// `h(z, w)` as a series in `(z, z̄, w̄)` slots (the `w` slot becomes `w̄`).
pub fn map_component_as_theta(h: &WSeries) -> WSeries {
    h.with_vars(Vars::Theta)
}

/// `g(z, Θ_src) − Θ_dst(f(z, Θ_src), f̄(z̄, w̄), ḡ(z̄, w̄))`.
pub fn basic_identity_residual(src: &GermTheta, map: &MapJet, dst: &GermTheta) -> Result<WSeries> {
    if src.k() != dst.k() || src.k() != map.k() {
        return Err(Error::Incompatible("germs and map use different gradings".into()));
    }
    let ts = src.series();
    let t = ts.trunc().min(dst.trunc()).min(map.trunc());
    let ts = ts.truncate(t);
    let g = ts.grading();
    let z = var(g, t, Vars::Theta, 0);
    let m = map.truncate(t);
    let f_on = m.f.substitute([Some(&z), None, Some(&ts)])?;
    let g_on = m.g.substitute([Some(&z), None, Some(&ts)])?;
    let fb = conj_map_component(&m.f);
    let gb = conj_map_component(&m.g);
    let rhs = dst.series().truncate(t).substitute([Some(&f_on), Some(&fb), Some(&gb)])?;
    g_on.sub(&rhs)
}

/// The image `H(M)` of the germ `M = {w = Θ}` under the map `H`.
///
/// With `(p, q) = H⁻¹`, the image is `{W = Θ*(Z, Z̄, W̄)}` where `W` solves
/// `q(Z, W) = Θ(p(Z, W), p̄(Z̄, W̄), q̄(Z̄, W̄))`. The equation is solved by a
/// chord iteration. `warm` is an initial guess already correct below weight
/// `valid_from`; the early iterations then run at reduced truncation.
pub fn transform_theta(
    germ: &GermTheta,
    h: &MapJet,
    warm: Option<(&WSeries, u32)>,
) -> Result<GermTheta> {
    let theta = germ.series();
    let t = theta.trunc().min(h.trunc());
    let theta = theta.truncate(t);
    let inv = h.truncate(t).invert()?;
    let g = theta.grading();
    let z = var(g, t, Vars::Theta, 0);
    let wb = var(g, t, Vars::Theta, 2);
    let pb = conj_map_component(&inv.f);
    let qb = conj_map_component(&inv.g);
    let c_inv = inv.g.coeff(0, 0, 1).inv().map_err(|_| Error::NonInvertible("g_w(0,0) = 0".into()))?;
    let (start, from) = match warm {
        Some((w0, r)) => (w0.truncate(t).with_trunc(t), r),
        None => (wb.scale(&h.g.coeff(0, 0, 1)), 1),
    };
    let out = implicit_solve_from(start, from, |w| {
        let tc = w.trunc();
        let zc = z.truncate(tc);
        let p = inv.f.substitute([Some(&zc), None, Some(w)])?;
        let q = inv.g.substitute([Some(&zc), None, Some(w)])?;
        let rhs = theta.truncate(tc).substitute([Some(&p), Some(&pb.truncate(tc)), Some(&qb.truncate(tc))])?;
        w.sub(&q.sub(&rhs)?.scale(&c_inv))
    })?;
    GermTheta::new(out)
}
