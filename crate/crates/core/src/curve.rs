//! Real curves `t ↦ (α(t), β(t))` through the origin, given as jets.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::map::MapJet;
use crate::scalar::{Rational, Scalar};
use crate::series::{Grading, MultiIndex, Vars, WSeries};

/// `γ(t) = (α(t), β(t))` with `α(0) = β(0) = 0`; `alpha[j]`, `beta[j]` are
/// the coefficients of `t^j`. Missing coefficients are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveJet {
    pub alpha: Vec<Scalar>,
    pub beta: Vec<Scalar>,
}

impl CurveJet {
    pub fn new(alpha: Vec<Scalar>, beta: Vec<Scalar>) -> Result<Self> {
        let at0 = |v: &Vec<Scalar>| v.first().is_none_or(Scalar::is_zero);
        if !at0(&alpha) || !at0(&beta) {
            return Err(Error::Precondition("curve must pass through the origin".into()));
        }
        Ok(CurveJet { alpha, beta })
    }

    /// `Γ = {z = 0, v = 0}`, parametrized by `u`.
    pub fn gamma() -> Self {
        CurveJet { alpha: vec![], beta: vec![Scalar::zero(), Scalar::one()] }
    }

    /// The line `t ↦ (c t, t)`.
    pub fn line(c: Scalar) -> Self {
        CurveJet { alpha: vec![Scalar::zero(), c], beta: vec![Scalar::zero(), Scalar::one()] }
    }

    pub fn degree(&self) -> usize {
        self.alpha.len().max(self.beta.len()).saturating_sub(1)
    }

    fn coef(v: &[Scalar], j: usize) -> Scalar {
        v.get(j).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn alpha_at(&self, j: usize) -> Scalar {
        Self::coef(&self.alpha, j)
    }

    pub fn beta_at(&self, j: usize) -> Scalar {
        Self::coef(&self.beta, j)
    }

    /// `Σ c_j x^j` with `x` the variable in `slot` of the given roles.
    pub fn series_of(coeffs: &[Scalar], grading: Grading, trunc: u32, vars: Vars, slot: usize) -> WSeries {
        let mut s = WSeries::zero(grading, trunc, vars);
        for (j, c) in coeffs.iter().enumerate().skip(1) {
            let j = j as u32;
            let idx = match slot {
                0 => MultiIndex::new(j, 0, 0),
                1 => MultiIndex::new(0, j, 0),
                _ => MultiIndex::new(0, 0, j),
            };
            s.add_term(idx, c.clone());
        }
        s
    }

    /// `Im β(t) − Φ(α(t), ᾱ(t), Re β(t))` as a series in `t` (slot 2, in the
    /// grading of `phi`). With `polynomial`, `phi` is expanded exactly and the
    /// result is truncated at `trunc`; otherwise it is exact to `phi`'s truncation.
    pub fn surface_residual(&self, phi: &WSeries, polynomial: bool, trunc: u32) -> Result<WSeries> {
        let g = phi.grading();
        let t = if polynomial { trunc } else { trunc.min(phi.trunc()) };
        let a = Self::series_of(&self.alpha, g, t, Vars::Phi, 2);
        let ab = a.conj_coeffs();
        let re: Vec<Scalar> = self.beta.iter().map(|c| Scalar::real(c.re.clone())).collect();
        let im: Vec<Scalar> = self.beta.iter().map(|c| Scalar::real(c.im.clone())).collect();
        let u = Self::series_of(&re, g, t, Vars::Phi, 2);
        let v = Self::series_of(&im, g, t, Vars::Phi, 2);
        let on = if polynomial {
            phi.substitute_polynomial([Some(&a), Some(&ab), Some(&u)], t)?
        } else {
            phi.truncate(t).substitute([Some(&a), Some(&ab), Some(&u)])?
        };
        v.sub(&on)
    }

    /// The image curve `H ∘ γ`, to degree `order` in `t`. `H` is read in
    /// degree grading, so it should be known there to `order` (polynomial maps are).
    pub fn mapped(&self, map: &MapJet, order: u32) -> Result<CurveJet> {
        let g1 = Grading::new(1)?;
        let h = map.regrade(g1, order);
        let a = Self::series_of(&self.alpha, g1, order, Vars::Map, 2);
        let b = Self::series_of(&self.beta, g1, order, Vars::Map, 2);
        let (f, g) = h.apply(&a, &b)?;
        let coeffs = |s: &WSeries| (0..=order).map(|j| s.coeff(0, 0, j)).collect();
        CurveJet::new(coeffs(&f), coeffs(&g))
    }

    /// Transverse to the complex tangent `{w = 0}` at the origin.
    pub fn is_transverse(&self) -> bool {
        !self.beta_at(1).re.is_zero()
    }

    /// Reparametrizes by `t ↦ t / β'(0)` so that `β'(0) = 1`.
    pub fn unit_speed(&self) -> Result<CurveJet> {
        let b = self.beta_at(1);
        if !b.is_real() || b.is_zero() {
            return Err(Error::CurveNotTransverse);
        }
        let inv = b.re.recip();
        let scale = |v: &[Scalar]| -> Vec<Scalar> {
            let mut p = Rational::one();
            v.iter()
                .map(|c| {
                    let out = c.scale(&p);
                    p = &p * &inv;
                    out
                })
                .collect()
        };
        Ok(CurveJet { alpha: scale(&self.alpha), beta: scale(&self.beta) })
    }
}
