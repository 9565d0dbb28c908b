//! Normal-form condition sets, per class and kind, enumerated weight by
//! weight as real linear functionals on a homogeneous block.

use std::fmt;

use crate::model::{HPoly, ModelClass, PolyModel};
use crate::scalar::{Rational, Scalar};
use crate::series::WSeries;

/// Which representation a condition reads: `Φ(z, z̄, u)` or `Θ(z, z̄, w̄)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Phi,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Part {
    Re,
    Im,
}

impl Part {
    pub fn of(&self, s: &Scalar) -> Rational {
        match self {
            Part::Re => s.re.clone(),
            Part::Im => s.im.clone(),
        }
    }
}

/// A real linear condition on the weight `a + b + k j` block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `part` of the coefficient of `z^a z̄^b` times `u^j` (or `w̄^j`).
    Coeff { side: Side, a: u32, b: u32, j: u32, part: Part },
    /// `part` of `(Θ^{(k−1)}_j, Q)` with `Q = P_z` modulo harmonic terms.
    Pairing { j: u32, part: Part },
}

impl Condition {
    pub fn weight(&self, k: u32) -> u32 {
        match *self {
            Condition::Coeff { a, b, j, .. } => a + b + k * j,
            Condition::Pairing { j, .. } => k - 1 + k * j,
        }
    }

    pub fn side(&self) -> Side {
        match self {
            Condition::Coeff { side, .. } => *side,
            Condition::Pairing { .. } => Side::Theta,
        }
    }

    /// Evaluates the condition on a series of the matching side.
    pub fn eval(&self, s: &WSeries, q: Option<&HPoly>) -> Rational {
        match *self {
            Condition::Coeff { a, b, j, part, .. } => part.of(&s.coeff(a, b, j)),
            Condition::Pairing { j, part } => {
                let q = q.expect("pairing condition needs the generic model");
                let k1 = q.degree() as u32;
                let mut acc = Scalar::zero();
                for sidx in 1..k1 {
                    acc += &(&s.coeff(sidx, k1 - sidx, j) * &q.coeffs[sidx as usize].conj());
                }
                part.of(&acc)
            }
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |p: &Part| if *p == Part::Re { "Re" } else { "Im" };
        match self {
            Condition::Coeff { side, a, b, j, part } => {
                let (n, v) = if *side == Side::Phi { ("Phi", "u") } else { ("Theta", "wb") };
                write!(f, "{} {n}[{a},{b}] {v}^{j}", p(part))
            }
            Condition::Pairing { j, part } => write!(f, "{} (Theta^(k-1), P_z) wb^{j}", p(part)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConditionFamily {
    KolarModified,
    Special,
    Strong,
    NormalCoordinates,
}

/// Conditions at weight `m`: those imposed by the solver, and those that must
/// hold without being imposed (preconditions and consequences). `claims`
/// carries conditions predicted to arise but only asserted in the T2 case.
#[derive(Clone, Debug, Default)]
pub struct WeightConditions {
    pub imposed: Vec<Condition>,
    pub checked: Vec<Condition>,
    pub claims: Vec<Condition>,
}

/// The side on which the imposed conditions of a family live.
pub fn imposed_side(family: ConditionFamily, class: ModelClass) -> Side {
    match (family, class) {
        (ConditionFamily::NormalCoordinates, _) => Side::Theta,
        (_, ModelClass::Tubular) => Side::Phi,
        _ => Side::Theta,
    }
}

fn both() -> Vec<Part> {
    vec![Part::Re, Part::Im]
}

/// Imposed parts for the `(a, b)` coefficient.
fn imposed_parts(family: ConditionFamily, model: &PolyModel, a: u32, b: u32) -> Vec<Part> {
    let (k, nu) = (model.k, model.nu);
    use ConditionFamily::*;
    match (model.class, family) {
        (_, NormalCoordinates) => {
            if a == 0 && b >= 1 {
                both()
            } else {
                vec![]
            }
        }
        (ModelClass::Tubular, fam) => {
            // representatives a >= b; diagonal coefficients are real
            if a < b {
                return vec![];
            }
            let mut p = vec![];
            let kolar = fam == KolarModified;
            if b == 0 && (a >= 1 || kolar) {
                p = both();
            }
            if b == 1 && a + 1 >= k {
                p = both();
            }
            if kolar && ((a + 2 == k && b == 1) || (a == k && b + 1 == k)) {
                p.push(Part::Re);
            }
            if a == 2 * k - 2 && b == 2 {
                p.push(Part::Im);
            }
            p.sort_by_key(|x| *x == Part::Im);
            p.dedup();
            if a == b {
                p.retain(|x| *x == Part::Re);
            }
            p
        }
        (ModelClass::Circular, fam) => {
            let kolar = fam == KolarModified;
            let mut p = vec![];
            if a == 0 && b == 0 && kolar {
                p.push(Part::Im);
            }
            if a == 0 && b >= 1 {
                p = both();
            }
            if a == nu && (b >= nu || (kolar && b + 1 == nu)) {
                p = both();
            }
            // diagonal Θ coefficients: the real part is fixed by reality
            if a == b {
                p.retain(|x| *x == Part::Im);
            }
            if (a == 2 * nu && b == 2 * nu) || (a == 3 * nu && b == 3 * nu) {
                p = vec![Part::Im];
            }
            p
        }
        (ModelClass::Generic, fam) => {
            let kolar = fam == KolarModified;
            let mut p = vec![];
            if a == 0 && b == 0 && kolar {
                p.push(Part::Im);
            }
            if a == 0 && b >= 1 {
                p = both();
            }
            if a == nu && b + nu >= k {
                p = both();
            }
            if a == 2 * nu && b == 2 * k - 2 * nu {
                p.push(Part::Re);
            }
            p.dedup();
            p
        }
    }
}

/// Every `(a, b, j)` with `a + b + k j = m`.
pub fn indices_of_weight(k: u32, m: u32) -> impl Iterator<Item = (u32, u32, u32)> {
    (0..=m / k).flat_map(move |j| {
        let s = m - k * j;
        (0..=s).map(move |a| (a, s - a, j))
    })
}

/// The condition set of `family` at weight `m > k`.
pub fn conditions_at(family: ConditionFamily, model: &PolyModel, m: u32) -> WeightConditions {
    let k = model.k;
    let side = imposed_side(family, model.class);
    let solve_family = if family == ConditionFamily::Strong { ConditionFamily::Special } else { family };
    let mut out = WeightConditions::default();
    for (a, b, j) in indices_of_weight(k, m) {
        for part in imposed_parts(solve_family, model, a, b) {
            out.imposed.push(Condition::Coeff { side, a, b, j, part });
        }
    }
    if family == ConditionFamily::KolarModified && model.class == ModelClass::Generic && (m + 1).is_multiple_of(k) && m + 1 > k {
        let j = (m + 1 - k) / k;
        out.imposed.push(Condition::Pairing { j, part: Part::Re });
        out.imposed.push(Condition::Pairing { j, part: Part::Im });
    }
    let contains_gamma = matches!(family, ConditionFamily::Special | ConditionFamily::Strong);
    if contains_gamma && m.is_multiple_of(k) {
        let j = m / k;
        out.checked.push(Condition::Coeff { side, a: 0, b: 0, j, part: Part::Re });
        if side == Side::Theta {
            out.checked.push(Condition::Coeff { side, a: 0, b: 0, j, part: Part::Im });
        }
    }
    if family == ConditionFamily::Strong {
        for (a, b, j) in indices_of_weight(k, m) {
            let low = a + b < k;
            let edge = (a == 0 || b == 0) && a + b > 0;
            if low || edge {
                for part in both() {
                    out.checked.push(Condition::Coeff { side: Side::Theta, a, b, j, part });
                }
            }
        }
        if model.class == ModelClass::Tubular && m + 1 >= 2 * k && (m + 1 - 2 * k).is_multiple_of(k) {
            let j = (m + 1 - 2 * k) / k;
            out.claims.push(Condition::Coeff { side: Side::Phi, a: k, b: k - 1, j, part: Part::Re });
        }
    }
    out
}
