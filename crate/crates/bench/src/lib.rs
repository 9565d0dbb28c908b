//! Inputs shared by the benchmarks in `benches/`.

use crnf::format::parse_germ;
use crnf::map::MapJet;
use crnf::scalar::rat;
use crnf::surface::GermPhi;
use crnf::{Grading, Scalar, Vars, WSeries};

/// The worked T1 example `v = x^3 (x + y^2 - u^2)` to weight 12.
pub fn example_germ() -> GermPhi {
    germ_file(include_str!("../../../data/t1_example.germ"))
}

/// The tube `v = (Re z)^3 + Re(z^3 zb)`, to weight 9.
pub fn bumped_tube() -> GermPhi {
    germ_file(include_str!("../../../data/tube3_bumped.germ"))
}

/// `v = x^3 + x^4`, a T2 germ whose degenerate chain is tilted.
pub fn tilted_tube() -> GermPhi {
    germ_file(include_str!("../../../data/tube34.germ"))
}

fn germ_file(text: &str) -> GermPhi {
    parse_germ(text).and_then(|f| f.to_phi()).expect("bundled germ file parses")
}

/// A dense series with every monomial of weight `<= trunc` in the Φ roles.
pub fn dense_series(k: u32, trunc: u32) -> WSeries {
    let g = Grading::new(k).expect("k >= 1");
    let mut terms = vec![];
    for m in 0..=trunc / k {
        for a in 0..=trunc - k * m {
            for b in 0..=trunc - k * m - a {
                let n = (a + 2 * b + 3 * m) as i64;
                terms.push((a, b, m, Scalar::new(rat(n % 5 + 1, 3), rat(n % 3 - 1, 2))));
            }
        }
    }
    WSeries::from_terms(g, trunc, Vars::Phi, terms)
}

/// `id + N` with a nonlinear part in every admissible weight.
pub fn near_identity(k: u32, trunc: u32) -> MapJet {
    let g = Grading::new(k).expect("k >= 1");
    let id = MapJet::identity(g, trunc);
    let part = |min: u32| {
        let terms = (0..=trunc / k).flat_map(|m| (0..=trunc - k * m).map(move |a| (a, m))).filter(|(a, m)| a + k * m >= min);
        WSeries::from_terms(g, trunc, Vars::Map, terms.map(|(a, m)| (a, 0, m, Scalar::frac(1, (a + m + 1) as i64))))
    };
    MapJet::new(id.f.add(&part(2)).unwrap(), id.g.add(&part(k + 1)).unwrap()).expect("valid map jet")
}
