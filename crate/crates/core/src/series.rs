//! Truncated weighted power series in three variable slots with Gaussian
//! rational coefficients.
//!
//! Slots 0 and 1 carry weight 1, slot 2 carries weight `k`. A series knows
//! the weight `trunc` up to which it is exact; every stored monomial has
//! weight at most `trunc` and no stored coefficient is zero.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// The weight assigned to the third slot (the type `k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grading {
    pub k: u32,
}

impl Grading {
    /// `k = 1` is plain total-degree grading and is used internally when
    /// re-expanding polynomials around a new base point.
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("grading weight must be positive".into()));
        }
        Ok(Grading { k })
    }

    pub fn slot_weight(&self, slot: usize) -> u32 {
        if slot == 2 {
            self.k
        } else {
            1
        }
    }

    pub fn weight(&self, idx: &MultiIndex) -> u32 {
        idx.a + idx.b + self.k * idx.m
    }
}

/// Exponents of the three slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pub a: u32,
    pub b: u32,
    pub m: u32,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { a: 0, b: 0, m: 0 };

    pub fn new(a: u32, b: u32, m: u32) -> Self {
        MultiIndex { a, b, m }
    }

    fn exp(&self, slot: usize) -> u32 {
        match slot {
            0 => self.a,
            1 => self.b,
            _ => self.m,
        }
    }
}

/// What the three slots denote.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vars {
    /// `(z, z̄, u)`: real defining functions.
    Phi,
    /// `(z, z̄, w̄)`: complex defining functions.
    Theta,
    /// `(z, -, w)`: holomorphic map components and curve jets; slot 1 unused.
    Map,
    /// `(x, y, u)`: real coordinates on the hypersurface.
    Real,
}

impl Vars {
    pub fn names(&self) -> [&'static str; 3] {
        match self {
            Vars::Phi => ["z", "zb", "u"],
            Vars::Theta => ["z", "zb", "wb"],
            Vars::Map => ["z", "_", "w"],
            Vars::Real => ["x", "y", "u"],
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct WSeries {
    grading: Grading,
    trunc: u32,
    vars: Vars,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl WSeries {
    pub fn zero(grading: Grading, trunc: u32, vars: Vars) -> Self {
        WSeries { grading, trunc, vars, terms: BTreeMap::new() }
    }

    pub fn constant(grading: Grading, trunc: u32, vars: Vars, c: Scalar) -> Self {
        let mut s = Self::zero(grading, trunc, vars);
        s.add_term(MultiIndex::ZERO, c);
        s
    }

    pub fn monomial(grading: Grading, trunc: u32, vars: Vars, idx: MultiIndex, c: Scalar) -> Self {
        let mut s = Self::zero(grading, trunc, vars);
        s.add_term(idx, c);
        s
    }

    /// The coordinate function of `slot`.
    pub fn var(grading: Grading, trunc: u32, vars: Vars, slot: usize) -> Self {
        let idx = match slot {
            0 => MultiIndex::new(1, 0, 0),
            1 => MultiIndex::new(0, 1, 0),
            _ => MultiIndex::new(0, 0, 1),
        };
        Self::monomial(grading, trunc, vars, idx, Scalar::one())
    }

    /// Builds a series from `(a, b, m, coefficient)` tuples, summing duplicates.
    pub fn from_terms<I>(grading: Grading, trunc: u32, vars: Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, u32, Scalar)>,
    {
        let mut s = Self::zero(grading, trunc, vars);
        for (a, b, m, c) in terms {
            s.add_term(MultiIndex::new(a, b, m), c);
        }
        s
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn k(&self) -> u32 {
        self.grading.k
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight(&self, idx: &MultiIndex) -> u32 {
        self.grading.weight(idx)
    }

    pub fn coeff(&self, a: u32, b: u32, m: u32) -> Scalar {
        self.terms.get(&MultiIndex::new(a, b, m)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds `c` to the coefficient of `idx`; ignores monomials above the truncation.
    pub fn add_term(&mut self, idx: MultiIndex, c: Scalar) {
        if c.is_zero() || self.grading.weight(&idx) > self.trunc {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn set_term(&mut self, idx: MultiIndex, c: Scalar) {
        self.terms.remove(&idx);
        self.add_term(idx, c);
    }

    /// Minimal weight of a stored monomial; `None` for the zero series.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|i| self.grading.weight(i)).min()
    }

    /// Largest weight of a stored monomial.
    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(|i| self.grading.weight(i)).max()
    }

    pub fn truncate(&self, trunc: u32) -> WSeries {
        let trunc = trunc.min(self.trunc);
        let terms = self
            .terms
            .iter()
            .filter(|(i, _)| self.grading.weight(i) <= trunc)
            .map(|(i, c)| (*i, c.clone()))
            .collect();
        WSeries { grading: self.grading, trunc, vars: self.vars, terms }
    }

    /// Same terms, declared exact to a different weight. Used for polynomials,
    /// which are exact to every weight.
    pub fn with_trunc(&self, trunc: u32) -> WSeries {
        let mut s = self.truncate(trunc);
        s.trunc = trunc;
        s
    }

    pub fn with_vars(&self, vars: Vars) -> WSeries {
        WSeries { vars, ..self.clone() }
    }

    /// Reinterprets the slot exponents under another grading, truncating at `trunc`.
    pub fn regrade(&self, grading: Grading, trunc: u32) -> WSeries {
        let mut out = WSeries::zero(grading, trunc, self.vars);
        for (i, c) in &self.terms {
            out.add_term(*i, c.clone());
        }
        out
    }

    /// Weighted homogeneous component of weight `w`.
    pub fn homogeneous(&self, w: u32) -> WSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(i, _)| self.grading.weight(i) == w)
            .map(|(i, c)| (*i, c.clone()))
            .collect();
        WSeries { terms, ..WSeries::zero(self.grading, self.trunc, self.vars) }
    }

    /// Coefficient series of `x^a y^b` as a series in the third slot only.
    pub fn slice(&self, a: u32, b: u32) -> WSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(i, _)| i.a == a && i.b == b)
            .map(|(i, c)| (MultiIndex::new(0, 0, i.m), c.clone()))
            .collect();
        let trunc = self.trunc.saturating_sub(a + b);
        WSeries { grading: self.grading, trunc, vars: self.vars, terms }
    }

    fn check_compatible(&self, o: &WSeries) -> Result<()> {
        if self.grading != o.grading {
            return Err(Error::Incompatible(format!(
                "gradings k={} and k={}",
                self.grading.k, o.grading.k
            )));
        }
        if self.vars != o.vars {
            return Err(Error::Incompatible(format!("roles {:?} and {:?}", self.vars, o.vars)));
        }
        Ok(())
    }

    pub fn add(&self, o: &WSeries) -> Result<WSeries> {
        self.check_compatible(o)?;
        let mut out = self.truncate(self.trunc.min(o.trunc));
        for (i, c) in &o.terms {
            out.add_term(*i, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &WSeries) -> Result<WSeries> {
        self.check_compatible(o)?;
        let mut out = self.truncate(self.trunc.min(o.trunc));
        for (i, c) in &o.terms {
            out.add_term(*i, -c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> WSeries {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &Scalar) -> WSeries {
        if s.is_zero() {
            return WSeries::zero(self.grading, self.trunc, self.vars);
        }
        self.map_coeffs(|c| c * s)
    }

    pub fn scale_rational(&self, r: &Rational) -> WSeries {
        self.scale(&Scalar::real(r.clone()))
    }

    fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> WSeries {
        let terms = self
            .terms
            .iter()
            .filter_map(|(i, c)| {
                let v = f(c);
                (!v.is_zero()).then_some((*i, v))
            })
            .collect();
        WSeries { terms, ..self.clone() }
    }

    /// Product truncated to `min(trunc_a, trunc_b)`.
    pub fn mul(&self, o: &WSeries) -> Result<WSeries> {
        self.check_compatible(o)?;
        Ok(self.mul_to(o, self.trunc.min(o.trunc)))
    }

    /// Product truncated at the largest weight to which it is actually
    /// determined: `min(trunc_a + ord_b, trunc_b + ord_a)`.
    pub fn mul_sharp(&self, o: &WSeries) -> Result<WSeries> {
        self.check_compatible(o)?;
        let ord_a = self.order().unwrap_or(self.trunc + 1);
        let ord_b = o.order().unwrap_or(o.trunc + 1);
        let t = (self.trunc.saturating_add(ord_b)).min(o.trunc.saturating_add(ord_a));
        Ok(self.mul_to(o, t))
    }

    fn mul_to(&self, o: &WSeries, trunc: u32) -> WSeries {
        let g = self.grading;
        let mut rhs: Vec<(u32, &MultiIndex, &Scalar)> =
            o.terms.iter().map(|(i, c)| (g.weight(i), i, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (i, c) in &self.terms {
            let wi = g.weight(i);
            if wi > trunc {
                continue;
            }
            let room = trunc - wi;
            for (wj, j, d) in &rhs {
                if *wj > room {
                    break;
                }
                let idx = MultiIndex::new(i.a + j.a, i.b + j.b, i.m + j.m);
                let p = c * d;
                acc.entry(idx).and_modify(|e| *e += &p).or_insert(p);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        WSeries { grading: g, trunc, vars: self.vars, terms: acc }
    }

    pub fn pow(&self, e: u32) -> Result<WSeries> {
        let mut acc = WSeries::constant(self.grading, self.trunc, self.vars, Scalar::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Conjugates every coefficient.
    pub fn conj_coeffs(&self) -> WSeries {
        self.map_coeffs(|c| c.conj())
    }

    /// Conjugates coefficients and swaps the exponents of slots 0 and 1:
    /// for `h(z, z̄, t)` this yields the series of `conj(h(z̄, z, t̄))`
    /// read as a function of `(z, z̄, t)`.
    pub fn conj_swap(&self) -> WSeries {
        let terms = self
            .terms
            .iter()
            .map(|(i, c)| (MultiIndex::new(i.b, i.a, i.m), c.conj()))
            .collect();
        WSeries { terms, ..self.clone() }
    }

    /// Moves the slot-0 exponent to slot 1 (e.g. `f(z, w)` to `f(z̄, w)`).
    pub fn move_slot0_to_slot1(&self) -> WSeries {
        let terms = self
            .terms
            .iter()
            .map(|(i, c)| (MultiIndex::new(i.b, i.a, i.m), c.clone()))
            .collect();
        WSeries { terms, ..self.clone() }
    }

    /// Partial derivative in `slot`; the result is exact to `trunc - weight(slot)`.
    pub fn deriv(&self, slot: usize) -> WSeries {
        let w = self.grading.slot_weight(slot);
        let mut out = WSeries::zero(self.grading, self.trunc.saturating_sub(w), self.vars);
        for (i, c) in &self.terms {
            let e = i.exp(slot);
            if e == 0 {
                continue;
            }
            let mut j = *i;
            match slot {
                0 => j.a -= 1,
                1 => j.b -= 1,
                _ => j.m -= 1,
            }
            out.add_term(j, c.scale(&crate::scalar::rat_int(e as i64)));
        }
        out
    }

    /// Formal composition `s(σ₀, σ₁, σ₂)`.
    ///
    /// Every substituted series must have order at least the weight of the
    /// slot it replaces, so that truncation stays exact. Slots whose exponent
    /// never occurs may be `None`. The result lives in the grading and roles
    /// of the substituted series and is exact to the smallest truncation involved.
    pub fn substitute(&self, subs: [Option<&WSeries>; 3]) -> Result<WSeries> {
        let target = self.target_of(&subs)?;
        for (slot, s) in subs.iter().enumerate() {
            if let Some(s) = s {
                let w = self.grading.slot_weight(slot);
                if let Some(o) = s.order() {
                    if o < w {
                        return Err(Error::OrderTooLow { order: o, weight: w });
                    }
                }
            }
        }
        let trunc = subs.iter().flatten().map(|s| s.trunc).min().unwrap().min(self.trunc);
        self.compose(&subs, target, trunc)
    }

    /// Composition without the order precondition, for polynomial `self`
    /// (exact at every weight). The expansion is carried out in full and then
    /// truncated to `out_trunc`; substituted series are treated as polynomials.
    pub fn substitute_polynomial(&self, subs: [Option<&WSeries>; 3], out_trunc: u32) -> Result<WSeries> {
        let target = self.target_of(&subs)?;
        let big: [Option<WSeries>; 3] =
            std::array::from_fn(|i| subs[i].map(|s| s.with_trunc(u32::MAX / 4)));
        let refs = [big[0].as_ref(), big[1].as_ref(), big[2].as_ref()];
        let full = self.compose(&refs, target, u32::MAX / 4)?;
        Ok(full.with_trunc(out_trunc))
    }

    fn target_of(&self, subs: &[Option<&WSeries>; 3]) -> Result<(Grading, Vars)> {
        let mut target: Option<(Grading, Vars)> = None;
        for (slot, s) in subs.iter().enumerate() {
            match s {
                Some(s) => {
                    let t = (s.grading, s.vars);
                    if let Some(prev) = target {
                        if prev != t {
                            return Err(Error::Incompatible(
                                "substituted series disagree in grading or roles".into(),
                            ));
                        }
                    }
                    target = Some(t);
                }
                None => {
                    if self.terms.keys().any(|i| i.exp(slot) > 0) {
                        return Err(Error::Incompatible(format!(
                            "slot {slot} occurs but no substitution given"
                        )));
                    }
                }
            }
        }
        target.ok_or_else(|| Error::Incompatible("no substitution given".into()))
    }

    fn compose(&self, subs: &[Option<&WSeries>; 3], target: (Grading, Vars), trunc: u32) -> Result<WSeries> {
        let (g, vars) = target;
        let one = WSeries::constant(g, trunc, vars, Scalar::one());
        let max_exp = |slot: usize| self.terms.keys().map(|i| i.exp(slot)).max().unwrap_or(0);
        let powers = |slot: usize| -> Result<Vec<WSeries>> {
            let mut v = vec![one.clone()];
            if let Some(s) = subs[slot] {
                let s = s.truncate(trunc);
                for e in 1..=max_exp(slot) {
                    let next = v[(e - 1) as usize].mul_to(&s, trunc);
                    v.push(next);
                }
            }
            Ok(v)
        };
        let p0 = powers(0)?;
        let p1 = powers(1)?;
        let p2 = powers(2)?;

        // group as sum_m s2^m sum_a s0^a sum_b c s1^b
        let mut by_m: BTreeMap<u32, BTreeMap<u32, Vec<(u32, &Scalar)>>> = BTreeMap::new();
        for (i, c) in &self.terms {
            by_m.entry(i.m).or_default().entry(i.a).or_default().push((i.b, c));
        }
        let mut result = WSeries::zero(g, trunc, vars);
        for (m, by_a) in by_m {
            let mut inner = WSeries::zero(g, trunc, vars);
            for (a, bs) in by_a {
                let mut lin = WSeries::zero(g, trunc, vars);
                for (b, c) in bs {
                    for (j, d) in &p1[b as usize].terms {
                        lin.add_term(*j, c * d);
                    }
                }
                let prod = if a == 0 { lin } else { p0[a as usize].mul_to(&lin, trunc) };
                for (j, d) in prod.terms {
                    inner.add_term(j, d);
                }
            }
            let prod = if m == 0 { inner } else { p2[m as usize].mul_to(&inner, trunc) };
            for (j, d) in prod.terms {
                result.add_term(j, d);
            }
        }
        Ok(result)
    }

    /// Evaluates at complex floating-point values of the three slots.
    pub fn eval_f64(&self, x: [(f64, f64); 3]) -> (f64, f64) {
        let cmul = |p: (f64, f64), q: (f64, f64)| (p.0 * q.0 - p.1 * q.1, p.0 * q.1 + p.1 * q.0);
        let cpow = |p: (f64, f64), e: u32| (0..e).fold((1.0, 0.0), |acc, _| cmul(acc, p));
        let mut acc = (0.0, 0.0);
        for (i, c) in &self.terms {
            let cf = (to_f64(&c.re), to_f64(&c.im));
            let t = cmul(cmul(cmul(cf, cpow(x[0], i.a)), cpow(x[1], i.b)), cpow(x[2], i.m));
            acc = (acc.0 + t.0, acc.1 + t.1);
        }
        acc
    }

    /// True if every coefficient is real.
    pub fn has_real_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    /// Reality of a function of `(z, z̄, t)` with real `t`:
    /// `coeff(a,b,m) = conj(coeff(b,a,m))`.
    pub fn is_hermitian(&self) -> bool {
        self.terms
            .iter()
            .all(|(i, c)| self.coeff(i.b, i.a, i.m) == c.conj())
    }
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Debug for WSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[k={} W={}] {}", self.grading.k, self.trunc, self)
    }
}

impl fmt::Display for WSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.vars.names();
        let mut first = true;
        for (i, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (slot, e) in [i.a, i.b, i.m].iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", names[slot])?,
                    e => write!(f, "*{}^{}", names[slot], e)?,
                }
            }
        }
        Ok(())
    }
}

/// Inverse of a univariate series in slot 2 under composition:
/// returns `ψ` with `φ(ψ(t)) = t` to the truncation of `φ`.
pub fn reversion(phi: &WSeries) -> Result<WSeries> {
    if phi.terms.keys().any(|i| i.a != 0 || i.b != 0) {
        return Err(Error::Incompatible("reversion expects a series in the third slot only".into()));
    }
    if !phi.coeff(0, 0, 0).is_zero() {
        return Err(Error::NonInvertible("nonzero constant term".into()));
    }
    let lead = phi.coeff(0, 0, 1);
    if lead.is_zero() {
        return Err(Error::NonInvertible("vanishing linear coefficient".into()));
    }
    let inv_lead = lead.inv()?;
    let g = phi.grading;
    let t = WSeries::var(g, phi.trunc, phi.vars, 2);
    let mut nonlinear = phi.clone();
    nonlinear.set_term(MultiIndex::new(0, 0, 1), Scalar::zero());
    // ψ = (t - N(ψ)) / φ₁; each pass fixes one more power of t
    let mut psi = t.scale(&inv_lead);
    for _ in 0..=(phi.trunc / g.k + 1) {
        let next = t.sub(&nonlinear.substitute([None, None, Some(&psi)])?)?.scale(&inv_lead);
        if next == psi {
            return Ok(psi);
        }
        psi = next;
    }
    Err(Error::NonContractive("reversion did not stabilise".into()))
}

/// Solves `w = G(w)` by fixed-point iteration starting at `initial`.
///
/// `step` evaluates `G` at the current iterate. For a contractive `G`
/// (its `w`-derivative has no constant term) every pass fixes at least one
/// more weight, so the iteration stabilises within `trunc + 2` passes.
pub fn implicit_solve<F>(initial: WSeries, step: F) -> Result<WSeries>
where
    F: Fn(&WSeries) -> Result<WSeries>,
{
    implicit_solve_from(initial, 1, step)
}

/// Like [`implicit_solve`], for an `initial` guess already correct below
/// weight `valid_from`.
///
/// The early passes are evaluated on iterates truncated at increasing
/// weights (the result of `step` inherits the truncation of its argument),
/// followed by passes at full truncation until the iterate is stationary.
pub fn implicit_solve_from<F>(initial: WSeries, valid_from: u32, step: F) -> Result<WSeries>
where
    F: Fn(&WSeries) -> Result<WSeries>,
{
    let t = initial.trunc;
    let mut cur = initial;
    for tc in valid_from.max(1)..t {
        cur = step(&cur.with_trunc(tc))?;
    }
    let mut cur = cur.with_trunc(t);
    for _ in 0..=(t as usize + 2) {
        let next = step(&cur)?;
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::NonContractive(
        "fixed-point iteration did not stabilise; the equation's derivative in w has a constant term".into(),
    ))
}
