//! The weighted homological equation: for a weight-`m` block `Ψ`, find the
//! map terms `(f_{m−k+1}, g_m)` in the admissible space such that
//! `Ψ + L^c(f, g)` satisfies the normal-form conditions.
//!
//! `L^c(f, g) = g(z, w̄ + 2iP) − ḡ(z̄, w̄) − 2i P_z f(z, w̄ + 2iP) − 2i P_z̄ f̄(z̄, w̄)`
//! is the change of the weight-`m` block of `Θ` under `id + (f, g)`. On the
//! `Φ` side the change is `L^c(z, z̄, u − iP) / 2i`.
//!
//! The unknowns of one weight are collected into a square real system that is
//! solved by exact elimination. Its solution is the unique one, so it agrees
//! with any other elimination order.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{pz_mod_harmonic, HPoly, ModelClass, PolyModel};
use crate::scalar::{Rational, Scalar};
use crate::series::{Grading, MultiIndex, Vars, WSeries};
use crate::surface::conj_map_component;

use super::conditions::{conditions_at, Condition, ConditionFamily, Part, Side};

/// The admissible map terms of a weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapSpace {
    /// Prenormalized maps; for circular models `Re g_ww(0,0)` is fixed.
    Full,
    /// Maps preserving `Γ = {z = 0, v = 0}`: `f(0, w) = 0`, `g(0, u)` real.
    Special,
    /// `z* = z`, `w* = w + g(z, w)` with `g(0, w) = 0`.
    NormalCoordinates,
}

impl MapSpace {
    pub fn for_family(family: ConditionFamily) -> Self {
        match family {
            ConditionFamily::KolarModified => MapSpace::Full,
            ConditionFamily::Special | ConditionFamily::Strong => MapSpace::Special,
            ConditionFamily::NormalCoordinates => MapSpace::NormalCoordinates,
        }
    }
}

/// A real unknown: `part` of the coefficient of `z^a w^j` in `f` or `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Unknown {
    pub in_g: bool,
    pub a: u32,
    pub j: u32,
    pub part: Part,
}

impl Unknown {
    fn unit(&self) -> Scalar {
        match self.part {
            Part::Re => Scalar::one(),
            Part::Im => Scalar::i(),
        }
    }
}

/// Enumerates the unknowns of weight `m` in `space`.
pub fn unknowns_at(model: &PolyModel, space: MapSpace, m: u32) -> Vec<Unknown> {
    let k = model.k;
    let mut out = vec![];
    let mut push = |in_g: bool, weight: u32| {
        for j in 0..=weight / k {
            let a = weight - k * j;
            for part in [Part::Re, Part::Im] {
                let u = Unknown { in_g, a, j, part };
                let keep = match space {
                    MapSpace::Full => !(in_g && model.class == ModelClass::Circular && a == 0 && j == 2 && part == Part::Re),
                    MapSpace::Special => {
                        if in_g {
                            a > 0 || (part == Part::Re && !(model.class == ModelClass::Circular && j == 2))
                        } else {
                            a > 0
                        }
                    }
                    MapSpace::NormalCoordinates => in_g && a > 0,
                };
                if keep {
                    out.push(u);
                }
            }
        }
    };
    if m + 1 > k {
        push(false, m + 1 - k);
    }
    push(true, m);
    out
}

/// Precomputed model data for evaluating `L^c` at one truncation.
pub struct Engine {
    pub model: PolyModel,
    grading: Grading,
    trunc: u32,
    z: WSeries,
    shifted_w: WSeries,
    two_i_pz: WSeries,
    two_i_pzb: WSeries,
    phi_args: [WSeries; 3],
    q: Option<HPoly>,
}

impl Engine {
    pub fn new(model: &PolyModel, trunc: u32) -> Result<Self> {
        let grading = Grading::new(model.k)?;
        let p = model.series(grading, trunc, Vars::Theta);
        let two_i = Scalar::from_ints(0, 2);
        let z = WSeries::var(grading, trunc, Vars::Theta, 0);
        let shifted_w = WSeries::var(grading, trunc, Vars::Theta, 2).add(&p.scale(&two_i))?;
        let pphi = model.series(grading, trunc, Vars::Phi);
        let u_shift = WSeries::var(grading, trunc, Vars::Phi, 2).sub(&pphi.scale(&Scalar::i()))?;
        let q = if model.class == ModelClass::Generic { Some(pz_mod_harmonic(model)?) } else { None };
        Ok(Engine {
            model: model.clone(),
            grading,
            trunc,
            z,
            shifted_w,
            two_i_pz: p.deriv(0).scale(&two_i).with_trunc(trunc),
            two_i_pzb: p.deriv(1).scale(&two_i).with_trunc(trunc),
            phi_args: [
                WSeries::var(grading, trunc, Vars::Phi, 0),
                WSeries::var(grading, trunc, Vars::Phi, 1),
                u_shift,
            ],
            q,
        })
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn pairing_form(&self) -> Option<&HPoly> {
        self.q.as_ref()
    }

    /// `L^c(f, g)` for `f, g` in `(z, w)` slots.
    pub fn lc(&self, f: &WSeries, g: &WSeries) -> Result<WSeries> {
        let t = self.trunc;
        let (f, g) = (f.truncate(t), g.truncate(t));
        let args = [Some(&self.z), None, Some(&self.shifted_w)];
        let g_on = if g.is_zero() { WSeries::zero(self.grading, t, Vars::Theta) } else { g.substitute(args)? };
        let mut out = g_on.sub(&conj_map_component(&g))?;
        if !f.is_zero() {
            let f_on = f.substitute(args)?;
            out = out
                .sub(&self.two_i_pz.mul(&f_on)?)?
                .sub(&self.two_i_pzb.mul(&conj_map_component(&f))?)?;
        }
        Ok(out.with_trunc(t))
    }

    /// The `Φ`-side image `X(z, z̄, u − iP) / 2i` of a `Θ`-side change `X`.
    pub fn to_phi_side(&self, x: &WSeries) -> Result<WSeries> {
        if x.is_zero() {
            return Ok(WSeries::zero(self.grading, self.trunc, Vars::Phi));
        }
        let [a, b, c] = &self.phi_args;
        let s = x.truncate(self.trunc).substitute([Some(a), Some(b), Some(c)])?;
        Ok(s.scale(&Scalar::from_ints(0, 2).inv()?))
    }

    fn change_on(&self, side: Side, f: &WSeries, g: &WSeries) -> Result<WSeries> {
        let x = self.lc(f, g)?;
        match side {
            Side::Theta => Ok(x),
            Side::Phi => self.to_phi_side(&x),
        }
    }

    fn unit_map(&self, u: &Unknown) -> (WSeries, WSeries) {
        let t = self.trunc;
        let zero = WSeries::zero(self.grading, t, Vars::Map);
        let mono = WSeries::monomial(self.grading, t, Vars::Map, MultiIndex::new(u.a, 0, u.j), u.unit());
        if u.in_g {
            (zero, mono)
        } else {
            (mono, zero)
        }
    }

    /// Column of the real system for one unknown.
    pub fn column(&self, u: &Unknown, side: Side, rows: &[Condition]) -> Result<Vec<Rational>> {
        let (f, g) = self.unit_map(u);
        let change = self.change_on(side, &f, &g)?;
        Ok(rows.iter().map(|c| c.eval(&change, self.q.as_ref())).collect())
    }

    /// Assembles `(f, g)` from solved unknown values.
    pub fn assemble(&self, unknowns: &[Unknown], x: &[Rational]) -> (WSeries, WSeries) {
        let t = self.trunc;
        let mut f = WSeries::zero(self.grading, t, Vars::Map);
        let mut g = WSeries::zero(self.grading, t, Vars::Map);
        for (u, v) in unknowns.iter().zip(x) {
            if v.is_zero() {
                continue;
            }
            let c = u.unit().scale(v);
            let target = if u.in_g { &mut g } else { &mut f };
            target.add_term(MultiIndex::new(u.a, 0, u.j), c);
        }
        (f, g)
    }
}

/// Outcome of one weight of the homological recursion.
#[derive(Clone, Debug)]
pub struct WeightSolution {
    pub weight: u32,
    pub f: WSeries,
    pub g: WSeries,
    /// `Ψ + L^c(f, g)` (or its `Φ`-side image), which lies in the normal space.
    pub normal_part: WSeries,
    pub rows: Vec<Condition>,
    pub unknowns: Vec<Unknown>,
}

/// Solves the weight-`m` equation for the homogeneous block `psi`, given on
/// the side the family's conditions read (`Φ` for tubular Kolar-type and
/// special families, `Θ` otherwise).
pub fn solve_weight_equation(
    engine: &Engine,
    family: ConditionFamily,
    m: u32,
    psi: &WSeries,
) -> Result<WeightSolution> {
    let model = &engine.model;
    let side = if psi.vars() == Vars::Phi { Side::Phi } else { Side::Theta };
    let expected = super::conditions::imposed_side(family, model.class);
    if side != expected {
        return Err(Error::Incompatible(format!("block given on the {side:?} side, conditions read {expected:?}")));
    }
    if psi.order().is_some_and(|o| o < m) || psi.max_weight().is_some_and(|w| w > m) {
        return Err(Error::Incompatible(format!("block is not homogeneous of weight {m}")));
    }
    let rows = conditions_at(family, model, m).imposed;
    let unknowns = unknowns_at(model, MapSpace::for_family(family), m);
    let psi = psi.with_trunc(engine.trunc());
    let zero = |v| WSeries::zero(engine.grading(), engine.trunc(), v);
    if rows.is_empty() && unknowns.is_empty() {
        return Ok(WeightSolution { weight: m, f: zero(Vars::Map), g: zero(Vars::Map), normal_part: psi, rows, unknowns });
    }
    if rows.len() != unknowns.len() {
        return Err(Error::Singular(format!(
            "weight {m}: {} conditions for {} unknowns ({} model, k = {})",
            rows.len(),
            unknowns.len(),
            model.class.name(),
            model.k
        )));
    }
    let n = rows.len();
    let mut a = Matrix::zeros(n, n);
    for (c, u) in unknowns.iter().enumerate() {
        for (r, v) in engine.column(u, side, &rows)?.into_iter().enumerate() {
            a.set(r, c, v);
        }
    }
    let rhs: Vec<Rational> = rows.iter().map(|c| -c.eval(&psi, engine.pairing_form())).collect();
    let x = a.solve(&rhs).map_err(|e| Error::Singular(format!("weight {m}: {e}")))?;
    let (f, g) = engine.assemble(&unknowns, &x);
    let normal_part = psi.add(&engine.change_on(side, &f, &g)?.homogeneous(m))?;
    Ok(WeightSolution { weight: m, f, g, normal_part, rows, unknowns })
}

/// The coupled `3×3` system of the tubular case at weight `2k − 1`, in the
/// unknowns `Im f_0'`, `Re g_{k−1}'`, `Re f_k`, read from the rows of the
/// coefficients `(k−1, 0)·u`, `(2k−2, 1)` and `(k, k−1)`.
#[derive(Clone, Debug)]
pub struct CoupledSystem {
    pub k: u32,
    pub rows: Vec<Condition>,
    pub unknowns: Vec<Unknown>,
    pub matrix: Matrix,
    /// The coefficient of `Im f_0'` in the `(k, k−1)` row, derived from the
    /// expansion; the determinant equals `(k − 3 + (k − 1) c) / 2`.
    pub c: Rational,
}

pub fn tubular_coupled_system(k: u32) -> Result<CoupledSystem> {
    let model = PolyModel::tubular(k);
    let m = 2 * k - 1;
    let engine = Engine::new(&model, m)?;
    let unknowns = vec![
        Unknown { in_g: false, a: 0, j: 1, part: Part::Im },
        Unknown { in_g: true, a: k - 1, j: 1, part: Part::Re },
        Unknown { in_g: false, a: k, j: 0, part: Part::Re },
    ];
    let all = conditions_at(ConditionFamily::KolarModified, &model, m).imposed;
    let pick = |a: u32, b: u32, j: u32, p: Part| {
        all.iter()
            .find(|c| matches!(c, Condition::Coeff { a: ca, b: cb, j: cj, part, .. } if *ca == a && *cb == b && *cj == j && *part == p))
            .copied()
            .ok_or_else(|| Error::Singular(format!("missing row ({a},{b}) u^{j}")))
    };
    let rows = vec![pick(k - 1, 0, 1, Part::Im)?, pick(2 * k - 2, 1, 0, Part::Re)?, pick(k, k - 1, 0, Part::Re)?];
    let mut matrix = Matrix::zeros(3, 3);
    for (c, u) in unknowns.iter().enumerate() {
        for (r, v) in engine.column(u, Side::Phi, &rows)?.into_iter().enumerate() {
            matrix.set(r, c, v);
        }
    }
    let c = matrix.get(2, 0).clone();
    Ok(CoupledSystem { k, rows, unknowns, matrix, c })
}
