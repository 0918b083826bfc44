//! Property tests for the word algebra and the geometry kernel.

use proptest::prelude::*;

use qturn_core::band::{all_sector_words, build_sector, BandPoint};
use qturn_core::curve::{degree, ClosedCurve};
use qturn_core::geom::Point2;
use qturn_core::model::build_model;
use qturn_core::word::{
    enumerate_allowed, ip_cyclic, sector_types, symbolic_index, CyclicWord, Letter, SectorType,
};

/// Random allowed word of random half-length.
fn allowed_word() -> impl Strategy<Value = CyclicWord> {
    (1usize..=6)
        .prop_flat_map(|d| {
            (
                prop::collection::vec(prop::bool::ANY, d),
                prop::collection::vec(prop::bool::ANY, d),
            )
        })
        .prop_map(|(vs, hs)| {
            let mut letters = Vec::with_capacity(2 * vs.len());
            for (v, h) in vs.iter().zip(&hs) {
                letters.push(if *v { Letter::Up } else { Letter::Down });
                letters.push(if *h { Letter::Right } else { Letter::Left });
            }
            CyclicWord::new(letters).unwrap()
        })
}

proptest! {
    #[test]
    fn parse_roundtrips_ascii(w in allowed_word()) {
        prop_assert_eq!(CyclicWord::parse(&w.ascii()).unwrap(), w.clone());
        prop_assert_eq!(CyclicWord::parse(&w.arrows()).unwrap(), w);
    }

    #[test]
    fn rotations_are_equal_words(w in allowed_word(), k in 0usize..12) {
        let n = w.len();
        let rotated: Vec<Letter> = (0..n).map(|i| w.letter(i + k)).collect();
        let v = CyclicWord::new(rotated).unwrap();
        prop_assert_eq!(&v, &w);
        prop_assert_eq!(ip_cyclic(&v).unwrap(), ip_cyclic(&w).unwrap());
    }

    #[test]
    fn index_counts_sector_types(w in allowed_word()) {
        let types = sector_types(&w).unwrap();
        let e = types.iter().filter(|t| **t == SectorType::Elliptic).count() as i64;
        let h = types.iter().filter(|t| **t == SectorType::Hyperbolic).count() as i64;
        prop_assert_eq!(2 * symbolic_index(&w).unwrap(), 2 + e - h);
    }

    #[test]
    fn inverse_word_is_an_involution(w in allowed_word()) {
        prop_assert_eq!(w.inverse_word().inverse_word(), w);
    }

    #[test]
    fn star_curves_have_degree_one(seed in 0u64..1000, samples in 64usize..256) {
        let c = ClosedCurve::star(1.0, samples, 0.08, seed);
        prop_assert_eq!(degree(&c), 1);
    }

    #[test]
    fn model_roundtrip_on_random_points(
        widx in 0usize..24usize,
        ang in 0.0f64..std::f64::consts::TAU,
        rho in 0.05f64..20.0,
    ) {
        let words = enumerate_allowed(3);
        let w = &words[widx % words.len()];
        let h = build_model(w).unwrap();
        let p = Point2::new(rho * ang.cos(), rho * ang.sin());
        let q = h.apply(h.apply_inverse(p));
        prop_assert!(q.dist(p) < 1e-9 * rho.max(1.0));
    }

    #[test]
    fn sector_maps_are_bijections(
        sidx in 0usize..8,
        theta in 0.0f64..=1.0,
        r in -6.0f64..6.0,
    ) {
        let m = build_sector(all_sector_words()[sidx]).unwrap();
        let p = BandPoint::new(theta, r);
        let q = m.apply_inverse(m.apply(p));
        prop_assert!((q.theta - p.theta).abs() < 1e-9 && (q.r - p.r).abs() < 1e-9);
    }
}
