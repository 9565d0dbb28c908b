//! Truncated holomorphic map jets `(z, w) ↦ (f(z, w), g(z, w))`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Rational, Scalar};
use crate::series::{Grading, MultiIndex, Vars, WSeries};

/// A formal map jet. Both components live in the `(z, w)` slots of the
/// same grading and are exact to the same weight. The `z`-component has
/// weighted order at least 1 and the `w`-component at least `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapJet {
    pub f: WSeries,
    pub g: WSeries,
}

/// Weighted leading part `(a z + b w [k = 1], c w + d z^k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingPart {
    pub k: u32,
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl LeadingPart {
    fn apply_inverse(&self, z1: &WSeries, z2: &WSeries) -> Result<(WSeries, WSeries)> {
        if self.k == 1 {
            // [[a, b], [d, c]]^{-1}
            let det = &(&self.a * &self.c) - &(&self.b * &self.d);
            let inv = det.inv().map_err(|_| Error::NonInvertible("singular linear part".into()))?;
            let x = z1.scale(&self.c).sub(&z2.scale(&self.b))?.scale(&inv);
            let y = z2.scale(&self.a).sub(&z1.scale(&self.d))?.scale(&inv);
            return Ok((x, y));
        }
        let ia = self.a.inv().map_err(|_| Error::NonInvertible("f_z(0,0) = 0".into()))?;
        let ic = self.c.inv().map_err(|_| Error::NonInvertible("g_w(0,0) = 0".into()))?;
        let x = z1.scale(&ia);
        let y = z2.sub(&x.pow(self.k)?.scale(&self.d))?.scale(&ic);
        Ok((x, y))
    }
}

impl MapJet {
    pub fn new(f: WSeries, g: WSeries) -> Result<Self> {
        if f.grading() != g.grading() || f.vars() != Vars::Map || g.vars() != Vars::Map {
            return Err(Error::Incompatible("map components must share a grading and use (z, w) slots".into()));
        }
        let k = f.k();
        if f.order().is_some_and(|o| o < 1) || g.order().is_some_and(|o| o < k) {
            return Err(Error::Incompatible(format!(
                "map components must have weighted order >= 1 and >= {k}"
            )));
        }
        let t = f.trunc().min(g.trunc());
        Ok(MapJet { f: f.truncate(t), g: g.truncate(t) })
    }

    pub fn identity(grading: Grading, trunc: u32) -> Self {
        MapJet {
            f: WSeries::var(grading, trunc, Vars::Map, 0),
            g: WSeries::var(grading, trunc, Vars::Map, 2),
        }
    }

    /// `Λ(z, w) = (λ z, λ^k w)`.
    pub fn dilation(grading: Grading, trunc: u32, lambda: &Rational) -> Self {
        let k = grading.k;
        let lk = num_traits::pow(lambda.clone(), k as usize);
        MapJet {
            f: WSeries::var(grading, trunc, Vars::Map, 0).scale_rational(lambda),
            g: WSeries::var(grading, trunc, Vars::Map, 2).scale_rational(&lk),
        }
    }

    /// Element `(s z (1 + r w)^{-1/ν}, |s|^{2ν} w / (1 + r w))` of the
    /// projective isotropy group of `v = |z|^{2ν}`.
    pub fn circular_element(grading: Grading, trunc: u32, nu: u32, s: &Scalar, r: &Rational) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::NonInvertible("zero scaling".into()));
        }
        let g_scale = num_traits::pow(s.norm_sq(), nu as usize);
        let w_max = trunc / grading.k;
        // (1 + r w)^{-1/ν} = Σ binom(-1/ν, n) r^n w^n and 1/(1 + r w) = Σ (-r)^n w^n
        let expo = Rational::new((-1).into(), (nu as i64).into());
        let mut binom = Rational::one();
        let mut rn = Rational::one();
        let mut f = WSeries::zero(grading, trunc, Vars::Map);
        let mut g = WSeries::zero(grading, trunc, Vars::Map);
        for n in 0..=w_max {
            if n > 0 {
                binom = binom * (&expo - rat_int(n as i64 - 1)) / rat_int(n as i64);
                rn *= r;
            }
            f.add_term(MultiIndex::new(1, 0, n), s.scale(&(&binom * &rn)));
            let sign = if n % 2 == 0 { rat_int(1) } else { rat_int(-1) };
            g.add_term(MultiIndex::new(0, 0, n + 1), Scalar::real(&g_scale * &rn * sign));
        }
        MapJet::new(f, g)
    }

    pub fn grading(&self) -> Grading {
        self.f.grading()
    }

    pub fn k(&self) -> u32 {
        self.f.k()
    }

    pub fn trunc(&self) -> u32 {
        self.f.trunc().min(self.g.trunc())
    }

    pub fn truncate(&self, t: u32) -> MapJet {
        MapJet { f: self.f.truncate(t), g: self.g.truncate(t) }
    }

    pub fn is_identity(&self) -> bool {
        *self == MapJet::identity(self.grading(), self.trunc())
    }

    pub fn leading(&self) -> LeadingPart {
        let k = self.k();
        LeadingPart {
            k,
            a: self.f.coeff(1, 0, 0),
            b: if k == 1 { self.f.coeff(0, 0, 1) } else { Scalar::zero() },
            c: self.g.coeff(0, 0, 1),
            d: self.g.coeff(k, 0, 0),
        }
    }

    /// Ordinary complex Jacobian at the origin, `[[f_z, f_w], [g_z, g_w]]`.
    pub fn differential(&self) -> [[Scalar; 2]; 2] {
        [
            [self.f.coeff(1, 0, 0), self.f.coeff(0, 0, 1)],
            [self.g.coeff(1, 0, 0), self.g.coeff(0, 0, 1)],
        ]
    }

    /// Evaluates `self` on the pair `(x, y)` of series in any roles
    /// (slot 0 ← x, slot 2 ← y).
    pub fn apply(&self, x: &WSeries, y: &WSeries) -> Result<(WSeries, WSeries)> {
        Ok((
            self.f.substitute([Some(x), None, Some(y)])?,
            self.g.substitute([Some(x), None, Some(y)])?,
        ))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MapJet) -> Result<MapJet> {
        let (f, g) = self.apply(&inner.f, &inner.g)?;
        Ok(MapJet { f, g })
    }

    pub fn invert(&self) -> Result<MapJet> {
        let lead = self.leading();
        let gr = self.grading();
        let t = self.trunc();
        let z = WSeries::var(gr, t, Vars::Map, 0);
        let w = WSeries::var(gr, t, Vars::Map, 2);
        // the nonlinear remainder N = F - A
        let k = gr.k;
        let mut nf = self.f.clone();
        nf.set_term(MultiIndex::new(1, 0, 0), Scalar::zero());
        let mut ng = self.g.clone();
        ng.set_term(MultiIndex::new(0, 0, 1), Scalar::zero());
        ng.set_term(MultiIndex::new(k, 0, 0), Scalar::zero());
        if k == 1 {
            nf.set_term(MultiIndex::new(0, 0, 1), Scalar::zero());
        }
        let (mut x, mut y) = lead.apply_inverse(&z, &w)?;
        // X <- A^{-1}(id - N(X)); each pass fixes one more weight, so the
        // early passes run at a low truncation and the last ones at `t`
        for tc in (1..t).chain(std::iter::repeat_n(t, 4)) {
            let (xs, ys) = (x.with_trunc(tc), y.with_trunc(tc));
            let n1 = nf.substitute([Some(&xs), None, Some(&ys)])?;
            let n2 = ng.substitute([Some(&xs), None, Some(&ys)])?;
            let (nx, ny) = lead.apply_inverse(&z.truncate(tc).sub(&n1)?, &w.truncate(tc).sub(&n2)?)?;
            if tc == t && nx == x && ny == y {
                return Ok(MapJet { f: x, g: y });
            }
            x = nx;
            y = ny;
        }
        Err(Error::NonContractive("map inversion did not stabilise".into()))
    }

    /// Regrades both components (used when switching between degree and
    /// weighted grading for polynomial maps).
    pub fn regrade(&self, grading: Grading, trunc: u32) -> MapJet {
        MapJet { f: self.f.regrade(grading, trunc), g: self.g.regrade(grading, trunc) }
    }
}

/// Checks `a == b` up to the weight `t`.
pub fn agree_to(a: &WSeries, b: &WSeries, t: u32) -> bool {
    a.truncate(t).with_trunc(t) == b.truncate(t).with_trunc(t)
}
