//! The eight model sector dynamics in canonical band coordinates.
//!
//! A sector is the band `[0,1] x R`: `theta` is the normalized angle across the
//! sector and `r` is log-radial with the fixed point at r = +inf (the plane
//! chart is exp(-r)). Every model restricts to an exact shift of ±log 2 on
//! the two boundary lines, which is what makes gluing across rays exact.
//!
//! Hyperbolic model: the quarter-plane restriction of (x, y) -> (2x, y/2)
//! read through a polar chart. Elliptic: the same with the roles of the
//! fixed point and infinity exchanged (r -> -r conjugation). Indifferent:
//! the two-homeomorphism composite psi∘phi on the strip [-1,1] x R, where
//! F is the pair of boundary lines plus a lattice of points on the center
//! line; phi translates vertically by a profile that is +1 at the walls
//! and -1 at the center, and psi pushes right by half the Euclidean
//! distance to F, so F's center-line points carry an exceptional orbit
//! running against the sector's generic direction. Inverses and
//! theta-mirrors complete the family of eight.

use std::f64::consts::{FRAC_PI_2, LN_2};

use thiserror::Error;

use crate::word::{ip_path, Letter, SectorType, WordError};

/// Point of the canonical band: theta in `[0,1]`, finite log-radius r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    pub theta: f64,
    pub r: f64,
}

impl BandPoint {
    pub fn new(theta: f64, r: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&theta), "theta out of band: {theta}");
        debug_assert!(r.is_finite());
        BandPoint { theta, r }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SectorError {
    #[error("sector words are vertical-horizontal-vertical, got {0}")]
    NotVhv(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Which of the eight explicit maps drives a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandMap {
    Saddle,
    SaddleInverse,
    Elliptic,
    EllipticInverse,
    Indifferent,
    IndifferentInverse,
    IndifferentMirror,
    IndifferentMirrorInverse,
}

impl BandMap {
    pub fn apply(self, p: BandPoint) -> BandPoint {
        match self {
            BandMap::Saddle => saddle_band(p),
            BandMap::SaddleInverse => saddle_band_inverse(p),
            BandMap::Elliptic => elliptic_band(p),
            BandMap::EllipticInverse => elliptic_band_inverse(p),
            BandMap::Indifferent => indifferent_band(p),
            BandMap::IndifferentInverse => indifferent_band_inverse(p),
            BandMap::IndifferentMirror => mirrored(indifferent_band, p),
            BandMap::IndifferentMirrorInverse => mirrored(indifferent_band_inverse, p),
        }
    }

    pub fn apply_inverse(self, p: BandPoint) -> BandPoint {
        self.inverse().apply(p)
    }

    pub fn inverse(self) -> BandMap {
        match self {
            BandMap::Saddle => BandMap::SaddleInverse,
            BandMap::SaddleInverse => BandMap::Saddle,
            BandMap::Elliptic => BandMap::EllipticInverse,
            BandMap::EllipticInverse => BandMap::Elliptic,
            BandMap::Indifferent => BandMap::IndifferentInverse,
            BandMap::IndifferentInverse => BandMap::Indifferent,
            BandMap::IndifferentMirror => BandMap::IndifferentMirrorInverse,
            BandMap::IndifferentMirrorInverse => BandMap::IndifferentMirror,
        }
    }
}

/// One glued-in sector: its three-letter word, type, and band dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorModel {
    pub word3: [Letter; 3],
    pub kind: SectorType,
    pub map: BandMap,
}

impl SectorModel {
    pub fn apply(&self, p: BandPoint) -> BandPoint {
        self.map.apply(p)
    }

    pub fn apply_inverse(&self, p: BandPoint) -> BandPoint {
        self.map.apply_inverse(p)
    }

    /// Boundary shift signs (theta = 0 side, theta = 1 side): +1 means
    /// r -> r + log 2 (radius halves, motion toward the fixed point).
    pub fn boundary_signs(&self) -> (i8, i8) {
        let s = |l: Letter| if l == Letter::Up { 1 } else { -1 };
        (s(self.word3[0]), s(self.word3[2]))
    }
}

/// Build the model sector for one of the eight vertical-horizontal-vertical
/// words.
pub fn build_sector(word3: [Letter; 3]) -> Result<SectorModel, SectorError> {
    use Letter::*;
    if !(word3[0].is_vertical() && word3[1].is_horizontal() && word3[2].is_vertical()) {
        return Err(SectorError::NotVhv(
            word3.iter().map(|l| l.arrow()).collect(),
        ));
    }
    let map = match word3 {
        [Up, Right, Down] => BandMap::Saddle,
        [Down, Left, Up] => BandMap::SaddleInverse,
        [Down, Right, Up] => BandMap::Elliptic,
        [Up, Left, Down] => BandMap::EllipticInverse,
        [Up, Right, Up] => BandMap::Indifferent,
        [Down, Left, Down] => BandMap::IndifferentInverse,
        [Up, Left, Up] => BandMap::IndifferentMirror,
        [Down, Right, Down] => BandMap::IndifferentMirrorInverse,
        _ => unreachable!("all eight alternating words are covered"),
    };
    let kind = SectorType::from_window_ip(ip_path(&word3)?)?;
    Ok(SectorModel { word3, kind, map })
}

fn mirrored(f: fn(BandPoint) -> BandPoint, p: BandPoint) -> BandPoint {
    let q = f(BandPoint {
        theta: 1.0 - p.theta,
        r: p.r,
    });
    BandPoint {
        theta: 1.0 - q.theta,
        r: q.r,
    }
}

/// Hyperbolic sector, word (↑→↓): (x, y) -> (2x, y/2) on {x >= 0, y <= 0}
/// through the chart theta = (phi + pi/2)/(pi/2), r = -log rho. Written
/// scale-free in r so it is exact at any radius.
pub fn saddle_band(p: BandPoint) -> BandPoint {
    if p.theta == 0.0 {
        return BandPoint { theta: 0.0, r: p.r + LN_2 };
    }
    if p.theta == 1.0 {
        return BandPoint { theta: 1.0, r: p.r - LN_2 };
    }
    let phi = (p.theta - 1.0) * FRAC_PI_2;
    let (s, c) = phi.sin_cos();
    // image of (rho c, rho s) under (2x, y/2), with rho factored out
    let growth = (4.0 * c * c + 0.25 * s * s).sqrt();
    let phi2 = (0.5 * s).atan2(2.0 * c);
    BandPoint {
        theta: (phi2 / FRAC_PI_2 + 1.0).clamp(0.0, 1.0),
        r: p.r - growth.ln(),
    }
}

/// Inverse hyperbolic sector, word (↓←↑): (x, y) -> (x/2, 2y).
pub fn saddle_band_inverse(p: BandPoint) -> BandPoint {
    if p.theta == 0.0 {
        return BandPoint { theta: 0.0, r: p.r - LN_2 };
    }
    if p.theta == 1.0 {
        return BandPoint { theta: 1.0, r: p.r + LN_2 };
    }
    let phi = (p.theta - 1.0) * FRAC_PI_2;
    let (s, c) = phi.sin_cos();
    let growth = (0.25 * c * c + 4.0 * s * s).sqrt();
    let phi2 = (2.0 * s).atan2(0.5 * c);
    BandPoint {
        theta: (phi2 / FRAC_PI_2 + 1.0).clamp(0.0, 1.0),
        r: p.r - growth.ln(),
    }
}

/// Elliptic sector, word (↓→↑): the hyperbolic model with the fixed point
/// and infinity exchanged (conjugation by r -> -r).
pub fn elliptic_band(p: BandPoint) -> BandPoint {
    let q = saddle_band(BandPoint {
        theta: p.theta,
        r: -p.r,
    });
    BandPoint {
        theta: q.theta,
        r: -q.r,
    }
}

/// Inverse elliptic sector, word (↑←↓).
pub fn elliptic_band_inverse(p: BandPoint) -> BandPoint {
    let q = saddle_band_inverse(BandPoint {
        theta: p.theta,
        r: -p.r,
    });
    BandPoint {
        theta: q.theta,
        r: -q.r,
    }
}

// --- indifferent model -------------------------------------------------
//
// Strip coordinates: theta in [-1, 1], unit-height lattice. The canonical
// band conjugates by the affine angular remap and by r -> r * log 2, so the
// boundary shift is exactly +log 2. Distances for psi are measured in the
// strip metric, where the construction is stated.
//
// The vertical profile of phi rises to +1 at the walls and dips to -1 on
// the center line, with its sign changes pinned at |theta| = 1/16; the
// fixed set F carries its center-line points at half-integer heights.
// These two constants keep circles of dyadic radius geodesic: on such a
// circle the two curve/image crossings of the sector sit at theta = ±1/16
// while the rightward jump there is sqrt(1/256 + 1/4)/2 ≈ 1/4, so both
// crossing pairs share a common sub-interval and one decomposition vertex
// pierces them all.

/// Half-width of the down-flow band of the indifferent profile.
const DOWN_HALF_WIDTH: f64 = 1.0 / 16.0;
/// Height offset of the center-line points of F.
const STONE_OFFSET: f64 = 0.5;

fn strip_from_band(p: BandPoint) -> (f64, f64) {
    ((2.0 * p.theta - 1.0).clamp(-1.0, 1.0), p.r / LN_2)
}

fn band_from_strip(theta: f64, r: f64) -> BandPoint {
    BandPoint {
        theta: (0.5 * (theta + 1.0)).clamp(0.0, 1.0),
        r: r * LN_2,
    }
}

/// Distance from a strip point to F = the two boundary lines plus the
/// center-line points at heights n + 1/2.
fn f_distance(theta: f64, r: f64) -> f64 {
    let wall = 1.0 - theta.abs();
    let frac = r - STONE_OFFSET - (r - STONE_OFFSET).round();
    let lattice = (theta * theta + frac * frac).sqrt();
    wall.min(lattice)
}

/// Vertical displacement of phi: +1 on the walls, -1 on a plateau around
/// the center line, zero exactly at |theta| = DOWN_HALF_WIDTH. The plateau
/// keeps the profile locally constant along the exceptional center-line
/// orbit, so nearby orbits pick up no radial shear and the orbit-fate
/// thresholds are reached long before roundoff perturbations escape.
fn radial_profile(theta: f64) -> f64 {
    let a = theta.abs();
    let b = DOWN_HALF_WIDTH;
    if a <= 0.5 * b {
        -1.0
    } else if a < b {
        (a - 0.5 * b) / (0.5 * b) - 1.0
    } else {
        (a - b) / (1.0 - b)
    }
}

fn strip_phi(theta: f64, r: f64) -> (f64, f64) {
    (theta, r + radial_profile(theta))
}

fn strip_psi(theta: f64, r: f64) -> (f64, f64) {
    ((theta + 0.5 * f_distance(theta, r)).min(1.0), r)
}

/// Solve psi(theta, r).0 == target for theta; psi is strictly increasing in
/// theta, so bisection converges to the last representable bracket.
fn strip_psi_inverse(target: f64, r: f64) -> f64 {
    let u = |theta: f64| theta + 0.5 * f_distance(theta, r);
    let mut lo = (target - 0.5).max(-1.0);
    let mut hi = target;
    if u(lo) >= target {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if u(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // prefer an exact preimage when one endpoint gives it
    if u(hi) == target {
        hi
    } else if u(lo) == target {
        lo
    } else {
        0.5 * (lo + hi)
    }
}

/// Indifferent sector, word (↑→↑): psi∘phi on the strip, conjugated into
/// the canonical band.
pub fn indifferent_band(p: BandPoint) -> BandPoint {
    if p.theta == 0.0 || p.theta == 1.0 {
        return BandPoint { theta: p.theta, r: p.r + LN_2 };
    }
    let (theta, r) = strip_from_band(p);
    let (theta, r) = strip_phi(theta, r);
    let (theta, r) = strip_psi(theta, r);
    band_from_strip(theta, r)
}

/// Inverse indifferent sector, word (↓←↓): phi⁻¹∘psi⁻¹.
pub fn indifferent_band_inverse(p: BandPoint) -> BandPoint {
    if p.theta == 0.0 || p.theta == 1.0 {
        return BandPoint { theta: p.theta, r: p.r - LN_2 };
    }
    let (theta, r) = strip_from_band(p);
    let theta = strip_psi_inverse(theta, r);
    let r = r - radial_profile(theta);
    band_from_strip(theta, r)
}

/// All eight sector words, in a fixed order (useful for sweeps and tests).
pub fn all_sector_words() -> [[Letter; 3]; 8] {
    use Letter::*;
    [
        [Up, Right, Down],
        [Down, Left, Up],
        [Down, Right, Up],
        [Up, Left, Down],
        [Up, Right, Up],
        [Down, Left, Down],
        [Up, Left, Up],
        [Down, Right, Down],
    ]
}
