//! Glue d sector models into a homeomorphism of the plane realizing an
//! allowed cyclic word. Sector k occupies the angular wedge
//! [k/d, (k+1)/d]·2π; the ray at angle 2πk/d carries the word's k-th
//! vertical letter, and adjacent sectors share that letter, so the boundary
//! shift of ±log 2 matches exactly on both sides of every glued ray.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::band::{build_sector, BandPoint, SectorError, SectorModel};
use crate::geom::Point2;
use crate::word::{symbolic_index, CyclicWord, WordError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("word {0} is not allowed")]
    NotAllowed(String),
    #[error("word {0} has d = 1; the construction needs d >= 2")]
    TooShort(String),
    #[error(transparent)]
    Sector(#[from] SectorError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// The model homeomorphism of a cyclic word: d sector dynamics glued in
/// counterclockwise order. Fixes exactly the origin.
#[derive(Debug, Clone)]
pub struct ModelHomeo {
    word: CyclicWord,
    sectors: Vec<SectorModel>,
    /// Symbolic index 1 with d < 4 falls outside the regime where the
    /// word-recovery theory is valid; the model still exists.
    outside_theory: bool,
}

impl ModelHomeo {
    pub fn word(&self) -> &CyclicWord {
        &self.word
    }

    pub fn d(&self) -> usize {
        self.sectors.len()
    }

    pub fn sectors(&self) -> &[SectorModel] {
        &self.sectors
    }

    pub fn outside_theory(&self) -> bool {
        self.outside_theory
    }

    /// Sector index and band coordinates of a nonzero plane point. Points
    /// exactly on a glued ray dispatch to the sector on their left
    /// (theta = 0 side); both sides agree there by the shared boundary law.
    pub fn to_band(&self, p: Point2) -> (usize, BandPoint) {
        debug_assert!(p.is_finite() && !(p.x == 0.0 && p.y == 0.0));
        let d = self.d();
        let mut u = p.angle() / TAU;
        if u < 0.0 {
            u += 1.0;
        }
        let s = u * d as f64;
        let mut k = s.floor() as usize;
        let mut theta = s - k as f64;
        if k >= d {
            // u rounded up to 1.0: that is the angle-0 ray
            k = 0;
            theta = 0.0;
        }
        (k, BandPoint::new(theta, -p.norm().ln()))
    }

    /// Plane point of band coordinates in sector k.
    pub fn from_band(&self, k: usize, b: BandPoint) -> Point2 {
        let ang = (k as f64 + b.theta) / self.d() as f64 * TAU;
        let rho = (-b.r).exp();
        Point2::new(rho * ang.cos(), rho * ang.sin())
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        assert!(p.is_finite(), "non-finite point");
        if p.x == 0.0 && p.y == 0.0 {
            return Point2::ORIGIN;
        }
        let (k, b) = self.to_band(p);
        self.from_band(k, self.sectors[k].apply(b))
    }

    pub fn apply_inverse(&self, p: Point2) -> Point2 {
        assert!(p.is_finite(), "non-finite point");
        if p.x == 0.0 && p.y == 0.0 {
            return Point2::ORIGIN;
        }
        let (k, b) = self.to_band(p);
        self.from_band(k, self.sectors[k].apply_inverse(b))
    }

    /// Angle of the glued ray carrying the word's k-th vertical letter.
    pub fn ray_angle(&self, k: usize) -> f64 {
        k as f64 / self.d() as f64 * TAU
    }
}

/// Build the model homeomorphism of an allowed word with d >= 2.
pub fn build_model(word: &CyclicWord) -> Result<ModelHomeo, ModelError> {
    if !word.is_allowed() {
        return Err(ModelError::NotAllowed(word.ascii()));
    }
    if word.half_len() < 2 {
        return Err(ModelError::TooShort(word.ascii()));
    }
    let sectors = word
        .sector_windows()?
        .into_iter()
        .map(build_sector)
        .collect::<Result<Vec<_>, _>>()?;
    let outside_theory = symbolic_index(word)? == 1 && word.half_len() < 4;
    Ok(ModelHomeo {
        word: word.clone(),
        sectors,
        outside_theory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn model(s: &str) -> ModelHomeo {
        build_model(&CyclicWord::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn rejects_bad_words() {
        let w = CyclicWord::parse("UDRL").unwrap();
        assert!(matches!(build_model(&w), Err(ModelError::NotAllowed(_))));
        let w = CyclicWord::parse("UR").unwrap();
        assert!(matches!(build_model(&w), Err(ModelError::TooShort(_))));
    }

    #[test]
    fn outside_theory_flag() {
        assert!(model("URUR").outside_theory(), "index 1, d = 2");
        assert!(!model("URDL").outside_theory(), "index 0");
        assert!(!model("URDRURDR").outside_theory(), "index 1 but d = 4");
    }

    #[test]
    fn fixed_point_at_origin() {
        let h = model("URDL");
        assert_eq!(h.apply(Point2::ORIGIN), Point2::ORIGIN);
        assert_eq!(h.apply_inverse(Point2::ORIGIN), Point2::ORIGIN);
    }

    #[test]
    fn glued_ray_boundary_laws() {
        // URDL: ray 0 (positive x-axis) carries ↑, ray 1 (negative x-axis) ↓.
        let h = model("URDL");
        let q = h.apply(Point2::new(1.0, 0.0));
        assert!((q.x - 0.5).abs() < 1e-12 && q.y.abs() < 1e-12, "↑ halves: {q}");
        let q = h.apply(Point2::new(-2.0, 0.0));
        assert!((q.x + 4.0).abs() < 1e-11 && q.y.abs() < 1e-11, "↓ doubles: {q}");
    }

    #[test]
    fn inverse_boundary_laws() {
        // the inverse doubles the radius on a contracting (↑) ray
        let h = model("URDL");
        let q = h.apply_inverse(Point2::new(1.0, 0.0));
        assert!((q.x - 2.0).abs() < 1e-12 && q.y.abs() < 1e-12, "{q}");
        let q = h.apply_inverse(Point2::new(-2.0, 0.0));
        assert!((q.x + 1.0).abs() < 1e-12 && q.y.abs() < 1e-12, "{q}");
    }

    #[test]
    fn continuity_across_rays() {
        for word in ["URDL", "URDRURDLDL", "DRULDRUL", "URURDLDL"] {
            let h = model(word);
            let d = h.d();
            for k in 0..d {
                let base = h.ray_angle(k);
                for j in 0..20 {
                    let rho = 0.2 * 1.3f64.powi(j - 10);
                    let eps = 1e-9;
                    let plus = h.apply(Point2::new(
                        rho * (base + eps).cos(),
                        rho * (base + eps).sin(),
                    ));
                    let minus = h.apply(Point2::new(
                        rho * (base - eps).cos(),
                        rho * (base - eps).sin(),
                    ));
                    assert!(
                        plus.dist(minus) < 1e-6 * rho.max(1.0),
                        "{word} ray {k} radius {rho}: {plus} vs {minus}"
                    );
                }
            }
        }
    }

    #[test]
    fn roundtrip_on_random_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for word in ["URDL", "URDRURDLDL", "DRUL"] {
            let h = model(word);
            for _ in 0..100 {
                let ang = rng.gen::<f64>() * TAU;
                let rho = 0.05 + rng.gen::<f64>() * 20.0;
                let p = Point2::new(rho * ang.cos(), rho * ang.sin());
                let q = h.apply(h.apply_inverse(p));
                assert!(q.dist(p) < 1e-9 * rho.max(1.0), "{word}: {p} -> {q}");
                let q = h.apply_inverse(h.apply(p));
                assert!(q.dist(p) < 1e-9 * rho.max(1.0));
            }
        }
    }

    #[test]
    fn only_fixed_point_is_origin() {
        let h = model("URDRURDLDL");
        for i in 0..40 {
            for j in 0..=40 {
                let ang = i as f64 / 40.0 * TAU;
                let r = -20.0 * LN_2 + 40.0 * LN_2 * j as f64 / 40.0;
                let rho = (-r).exp();
                let p = Point2::new(rho * ang.cos(), rho * ang.sin());
                assert!(h.apply(p).dist(p) > 0.0, "moved nothing at {p}");
            }
        }
    }

    #[test]
    fn orientation_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for word in ["URDL", "URDRURDLDL", "DRULDRUL"] {
            let h = model(word);
            for _ in 0..100 {
                let ang = rng.gen::<f64>() * TAU;
                let rho = 0.2 + rng.gen::<f64>() * 3.0;
                let p = Point2::new(rho * ang.cos(), rho * ang.sin());
                let e = 1e-6;
                let a = h.apply(p);
                let b = h.apply(Point2::new(p.x + e, p.y));
                let c = h.apply(Point2::new(p.x, p.y + e));
                assert!((b - a).cross(c - a) > 0.0, "{word} at {p}");
            }
        }
    }

    #[test]
    fn symmetric_word_commutes_with_rotation() {
        // (↑→↓←)² repeats every two sectors: rotation by 2·(2π/4) = π.
        let h = model("URDLURDL");
        let rot = |p: Point2| Point2::new(-p.x, -p.y);
        for i in 0..60 {
            let ang = i as f64 / 60.0 * TAU;
            for rho in [0.3, 1.0, 2.5] {
                let p = Point2::new(rho * ang.cos(), rho * ang.sin());
                let a = h.apply(rot(p));
                let b = rot(h.apply(p));
                assert!(a.dist(b) < 1e-9, "{p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn generic_point_matches_sector_chart_composition() {
        // Independent oracle for a sector-0 interior point of URDL: the
        // saddle is (x,y)->(2x,y/2) in the chart (theta, r) ->
        // exp(-r)·(cos φ, sin φ) with φ = (theta-1)·π/2, and sector 0 maps
        // chart angles onto plane angles by φ_plane = (k + theta)/d·2π.
        let h = model("URDL");
        let p = Point2::new(0.9, 0.3); // sector 0: angle in (0, π)
        let (k, b) = h.to_band(p);
        assert_eq!(k, 0);
        let phi = (b.theta - 1.0) * FRAC_PI_2;
        let rho = (-b.r).exp();
        let (x, y) = (rho * phi.cos(), rho * phi.sin());
        let (x2, y2) = (2.0 * x, 0.5 * y);
        let r2 = -x2.hypot(y2).ln();
        let theta2 = y2.atan2(x2) / FRAC_PI_2 + 1.0;
        let expect = h.from_band(0, BandPoint::new(theta2, r2));
        let got = h.apply(p);
        assert!(got.dist(expect) < 1e-12, "{got} vs {expect}");
    }
}
