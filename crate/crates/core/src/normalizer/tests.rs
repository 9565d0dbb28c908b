use num_traits::Zero;

use super::*;
use crate::curve::CurveJet;
use crate::map::MapJet;
use crate::model::PolyModel;
use crate::scalar::{rat, Scalar};
use crate::series::{Grading, Vars, WSeries};
use crate::surface::GermPhi;

fn s(re: i64, im: i64) -> Scalar {
    Scalar::from_ints(re, im)
}

fn germ(model: &PolyModel, w: u32, extra: &[(u32, u32, u32, Scalar)]) -> GermPhi {
    let gr = Grading::new(model.k).unwrap();
    let mut p = model.series(gr, w, Vars::Phi);
    for (a, b, m, c) in extra {
        p.add_term(crate::series::MultiIndex::new(*a, *b, *m), c.clone());
        if a != b {
            p.add_term(crate::series::MultiIndex::new(*b, *a, *m), c.conj());
        }
    }
    GermPhi::new(p).unwrap()
}

fn generic4() -> PolyModel {
    PolyModel::from_coeffs(4, vec![s(0, 0), s(1, 0), s(0, 0), s(1, 0), s(0, 0)]).unwrap()
}

#[test]
fn model_germs_are_fixed() {
    for model in [PolyModel::tubular(3), PolyModel::circular(2), generic4()] {
        let w = 3 * model.k;
        let g = germ(&model, w, &[]);
        let r = kolar_normalize(&g, &NormalizationParams::default(), w).unwrap();
        assert!(r.map.is_identity(), "{:?}", model.class);
        assert_eq!(r.germ, g);
        assert!(r.certified());
    }
}

#[test]
fn tubular_cubic_perturbation() {
    let model = PolyModel::tubular(3);
    let g = germ(&model, 9, &[(3, 1, 0, s(1, 0))]);
    let r = kolar_normalize(&g, &NormalizationParams::default(), 9).unwrap();
    assert!(r.residual.is_zero());
    assert!(r.conditions_hold(), "{:?}", r.conditions.iter().filter(|c| !c.pass()).collect::<Vec<_>>());
    assert!(r.germ.series().coeff(3, 1, 0).is_zero());
    // normal forms are fixed points
    let again = kolar_normalize(&r.germ, &NormalizationParams::default(), 9).unwrap();
    assert!(again.map.is_identity());
}

#[test]
fn each_class_is_certified() {
    let cases = [
        (PolyModel::tubular(4), vec![(2, 1, 1, s(1, 2)), (4, 1, 0, s(0, 1)), (0, 0, 2, s(3, 0)), (3, 0, 1, s(1, -1))]),
        (PolyModel::circular(2), vec![(2, 1, 1, s(1, 2)), (3, 2, 0, s(0, 1)), (0, 0, 2, s(1, 0)), (1, 0, 1, s(2, 1))]),
        (generic4(), vec![(2, 1, 1, s(1, 2)), (4, 1, 0, s(0, 1)), (0, 0, 2, s(-1, 0)), (2, 2, 1, s(2, 0))]),
    ];
    for (model, extra) in cases {
        let w = 3 * model.k;
        let g = germ(&model, w, &extra);
        let r = kolar_normalize(&g, &NormalizationParams::default(), w).unwrap();
        assert!(r.residual.is_zero(), "{:?}", model.class);
        let bad: Vec<_> = r.conditions.iter().filter(|c| !c.pass()).collect();
        assert!(bad.is_empty(), "{:?}: {bad:?}", model.class);
        for sol in &r.weights {
            for c in &sol.rows {
                assert!(c.eval(&sol.normal_part, crate::model::pz_mod_harmonic(&model).ok().as_ref()).is_zero());
            }
        }
    }
}

#[test]
fn dilation_law_between_parameters() {
    let model = PolyModel::tubular(3);
    let g = germ(&model, 9, &[(2, 1, 1, s(1, 1)), (4, 0, 0, s(0, 1))]);
    let a = kolar_normalize(&g, &NormalizationParams::with_lambda(rat(1, 1)), 9).unwrap();
    let b = kolar_normalize(&g, &NormalizationParams::with_lambda(rat(2, 1)), 9).unwrap();
    let again = kolar_normalize(&g, &NormalizationParams::with_lambda(rat(2, 1)), 9).unwrap();
    assert_eq!(b.germ, again.germ);
    assert_eq!(b.map, again.map);
    let mu = rat(2, 1);
    for (i, c) in a.germ.series().terms() {
        let w = i.a + i.b + 3 * i.m;
        let factor = num_traits::pow(mu.clone(), w as usize).recip() * num_traits::pow(mu.clone(), 3);
        assert_eq!(b.germ.series().coeff(i.a, i.b, i.m), c.scale(&factor));
    }
}

#[test]
fn circular_params_fix_rho() {
    let model = PolyModel::circular(2);
    let g = germ(&model, 12, &[(3, 2, 0, s(1, 0))]);
    let params = NormalizationParams { lambda: rat(2, 1), omega: Scalar::new(rat(3, 5), rat(4, 5)), rho: rat(1, 3) };
    let r = kolar_normalize(&g, &params, 12).unwrap();
    assert!(r.certified());
    let d = r.map.differential();
    assert_eq!(d[0][0], Scalar::new(rat(6, 5), rat(8, 5)));
    assert_eq!(r.map.g.coeff(0, 0, 2).re * rat(2, 1), rat(1, 3));
    let (tilde, group) = decompose_map(&r.map, &model).unwrap();
    assert_eq!(group.params().unwrap(), params);
    assert_eq!(tilde.f.coeff(1, 0, 0), Scalar::one());
}

#[test]
fn decompose_examples() {
    let model = PolyModel::tubular(3);
    let gr = Grading::new(3).unwrap();
    let l3 = MapJet::dilation(gr, 9, &rat(3, 1));
    let (t, g) = decompose_map(&l3, &model).unwrap();
    assert!(t.is_identity());
    assert_eq!(g, GroupElement::Dilation { lambda: rat(3, 1) });
    let id = MapJet::identity(gr, 9);
    assert!(decompose_map(&id, &model).unwrap().0.is_identity());
    let inner = flows::monomial_map(gr, 9, &[(1, 1, s(1, 0))], &[]).unwrap();
    let f = MapJet::dilation(gr, 9, &rat(2, 1)).compose(&inner).unwrap();
    let (t, g) = decompose_map(&f, &model).unwrap();
    assert_eq!(t.compose(&g.to_map(gr, 9).unwrap()).unwrap(), f);
}

#[test]
fn special_form_keeps_gamma() {
    let model = PolyModel::tubular(3);
    let g = germ(&model, 9, &[(2, 1, 1, s(1, 1)), (3, 1, 0, s(2, 0)), (1, 0, 2, s(0, 1))]);
    let r = special_normalize(&g, &NormalizationParams::default(), 9).unwrap();
    assert!(r.certified(), "{:?}", r.conditions.iter().filter(|c| !c.pass()).collect::<Vec<_>>());
    assert!(r.germ.slice(0, 0).is_zero());
    assert!(r.map.f.slice(0, 0).is_zero());
    let lacking = germ(&model, 9, &[(0, 0, 2, s(1, 0))]);
    assert!(matches!(special_normalize(&lacking, &NormalizationParams::default(), 9), Err(crate::Error::GermLacksGamma)));
}

#[test]
fn normal_coordinates_kill_pure_slices() {
    let model = PolyModel::tubular(3);
    let g = germ(&model, 9, &[(3, 0, 1, s(1, 1)), (1, 0, 1, s(0, 1))]);
    let (out, map) = normal_coordinates(&g).unwrap();
    for a in 1..=9 {
        assert!(out.slice(a, 0).is_zero() && out.slice(0, a).is_zero(), "a={a}");
    }
    assert_eq!(map.f, WSeries::var(map.grading(), 9, Vars::Map, 0));
    let clean = germ(&model, 9, &[(2, 1, 1, s(1, 0))]);
    assert!(normal_coordinates(&clean).unwrap().1.is_identity());
}

#[test]
fn straightening_lines_and_bent_curves() {
    let model = PolyModel::tubular(3);
    let gr = Grading::new(3).unwrap();
    let g = germ(&model, 9, &[]);
    let (same, map) = straighten_chain(&g, &CurveJet::gamma()).unwrap();
    assert!(map.is_identity());
    assert_eq!(same, g);
    // the tube v = P(x) contains the line (i t, t)
    let line = CurveJet::line(Scalar::i());
    let (out, map) = straighten_chain(&g, &line).unwrap();
    assert_eq!(map.f, WSeries::from_terms(gr, 9, Vars::Map, [(1, 0, 0, s(1, 0)), (0, 0, 1, s(0, -1))]));
    assert!(out.slice(0, 0).is_zero());
    assert!(matches!(straighten_chain(&g, &CurveJet::line(Scalar::one())), Err(crate::Error::CurveNotOnSurface(_))));
}

fn real_poly(terms: &[(u32, u32, u32, i64)]) -> WSeries {
    let g1 = Grading::new(1).unwrap();
    let s = WSeries::from_terms(g1, 60, Vars::Real, terms.iter().map(|&(a, b, m, c)| (a, b, m, s(c, 0))));
    crate::locus::from_real(&s).unwrap()
}

/// Simplifies a polynomial germ and carries a curve along.
fn prepared(poly: &WSeries, curve: &CurveJet, w: u32) -> (GermPhi, CurveJet) {
    let simp = crate::model::simplify_to_tangent_model(poly, w).unwrap();
    let c = curve.mapped(&simp.map, w).unwrap();
    (simp.germ, c)
}

#[test]
fn strong_form_of_the_tube_asserts_the_claim() {
    let (g, gamma) = prepared(&real_poly(&[(4, 0, 0, 1)]), &CurveJet::gamma(), 12);
    let r = strong_normalize(&g, &gamma, &NormalizationParams::default(), 12).unwrap();
    assert!(r.certified(), "{:?}", r.conditions.iter().filter(|c| !c.pass()).collect::<Vec<_>>());
    assert!(r.claims_hold());
    assert!(r.conditions.iter().any(|c| c.role == ConditionRole::Claim));
}

#[test]
fn strong_form_along_a_chain_of_the_example() {
    // v = x³ (x + y² − u²) contains the chain (i t, t)
    let poly = real_poly(&[(4, 0, 0, 1), (3, 2, 0, 1), (3, 0, 2, -1)]);
    let plus = CurveJet::new(vec![s(0, 0), s(0, 1)], vec![s(0, 0), s(1, 0)]).unwrap();
    let (g, gamma) = prepared(&poly, &plus, 12);
    let r = strong_normalize(&g, &gamma, &NormalizationParams::default(), 12).unwrap();
    assert!(r.certified(), "{:?}", r.conditions.iter().filter(|c| !c.pass()).collect::<Vec<_>>());
    assert!(crate::locus::type_along_curve(r.germ.series(), &CurveJet::gamma(), 12).unwrap().constant);
    // Γ itself is not a chain of this germ
    let (g, gamma) = prepared(&poly, &CurveJet::gamma(), 12);
    assert!(matches!(
        strong_normalize(&g, &gamma, &NormalizationParams::default(), 12),
        Err(crate::Error::CurveTypeNotConstant(_))
    ));
}

#[test]
fn tube_claim_holds_along_the_degenerate_chain() {
    for terms in [vec![(3u32, 0u32, 0u32, 1i64)], vec![(3, 0, 0, 1), (4, 0, 0, 1)], vec![(3, 0, 0, 1), (5, 0, 0, 1)], vec![(4, 0, 0, 1), (5, 0, 0, 1)]] {
        let k = terms[0].0;
        let (g, _) = prepared(&real_poly(&terms), &CurveJet::gamma(), 3 * k);
        let chain = degenerate_chain(&g, 3 * k).unwrap();
        let params = NormalizationParams::default();
        let r = strong_normalize(&g, &chain, &params, 3 * k).unwrap();
        assert!(r.certified() && r.claims_hold(), "{terms:?}");
        // both forms are unique once the dilation is fixed
        assert_eq!(r.germ, kolar_normalize(&g, &params, 3 * k).unwrap().germ, "{terms:?}");
        // a tilted chain: the claim singles it out among curves in the locus
        if !chain.alpha_at(1).is_zero() {
            let along_u = strong_normalize(&g, &CurveJet::gamma(), &params, 3 * k).unwrap();
            assert!(along_u.certified() && !along_u.claims_hold(), "{terms:?}");
        }
    }
    let circular = prepared(&real_poly(&[(2, 2, 0, 1)]), &CurveJet::gamma(), 12).0;
    assert!(matches!(degenerate_chain(&circular, 12), Err(crate::Error::ClassMismatch(_))));
}
