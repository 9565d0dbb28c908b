//! Algebraic laws of the jet arithmetic, checked on random exact inputs.

use crnf::format::{parse_germ, write_germ_phi};
use crnf::map::MapJet;
use crnf::surface::{phi_to_theta, theta_to_phi, GermPhi};
use crnf::{Grading, Scalar, Vars, WSeries};
use proptest::prelude::*;

const K: u32 = 3;
const T: u32 = 9;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3).prop_map(|(a, b, c, d)| Scalar::new(crnf::scalar::rat(a, b), crnf::scalar::rat(c, d)))
}

fn grading() -> Grading {
    Grading::new(K).unwrap()
}

/// Up to six terms of weighted order at least `min`, in the given roles.
fn series(vars: Vars, min: u32) -> impl Strategy<Value = WSeries> {
    let b_max = if vars == Vars::Map { 0 } else { 4 };
    prop::collection::vec((0u32..=5, 0u32..=b_max, 0u32..=2, scalar()), 0..6).prop_map(move |terms| {
        let kept = terms.into_iter().filter(|(a, b, m, _)| a + b + K * m >= min);
        WSeries::from_terms(grading(), T, vars, kept)
    })
}

/// A real defining function with the tube model `z^2 zb + z zb^2` and
/// Hermitian higher-order terms.
fn germ() -> impl Strategy<Value = GermPhi> {
    series(Vars::Phi, K + 1).prop_map(|s| {
        let model = WSeries::from_terms(grading(), T, Vars::Phi, [(2, 1, 0, Scalar::one()), (1, 2, 0, Scalar::one())]);
        let hermitian = s.add(&s.conj_swap()).unwrap();
        GermPhi::new(model.add(&hermitian).unwrap()).unwrap()
    })
}

/// `id + N` with `N` of weight at least two in `f` and `K + 1` in `g`.
fn near_identity() -> impl Strategy<Value = MapJet> {
    (series(Vars::Map, 2), series(Vars::Map, K + 1)).prop_map(|(nf, ng)| {
        let id = MapJet::identity(grading(), T);
        MapJet::new(id.f.add(&nf).unwrap(), id.g.add(&ng).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_a_commutative_ring(a in series(Vars::Phi, 0), b in series(Vars::Phi, 0), c in series(Vars::Phi, 0)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn conjugate_swap_is_an_involutive_ring_map(a in series(Vars::Phi, 0), b in series(Vars::Phi, 0)) {
        prop_assert_eq!(a.conj_swap().conj_swap(), a.clone());
        prop_assert_eq!(a.mul(&b).unwrap().conj_swap(), a.conj_swap().mul(&b.conj_swap()).unwrap());
    }

    #[test]
    fn inversion_is_a_two_sided_inverse(f in near_identity()) {
        let inv = f.invert().unwrap();
        prop_assert!(f.compose(&inv).unwrap().is_identity());
        prop_assert!(inv.compose(&f).unwrap().is_identity());
    }

    #[test]
    fn composition_is_associative(f in near_identity(), g in near_identity(), h in near_identity()) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn real_and_complex_defining_functions_agree(g in germ()) {
        prop_assert_eq!(theta_to_phi(&phi_to_theta(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn germ_files_round_trip(g in germ()) {
        let text = write_germ_phi(&g);
        prop_assert_eq!(parse_germ(&text).unwrap().to_phi().unwrap(), g.clone());
        prop_assert_eq!(write_germ_phi(&parse_germ(&text).unwrap().to_phi().unwrap()), text);
    }
}
