//! Orbit-fate classification and the Poincaré–Lefschetz index by winding.
//!
//! Every orbit of a model tends to the fixed point or to infinity in each
//! time direction; `orbit_fate` decides which by iterating until the radius
//! crosses an attraction or escape threshold. The indifferent sectors
//! contain exceptional orbits that cross neither threshold quickly; those
//! surface as `Undecided`, never silently coerced.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{turn_at_origin, Point2};
use crate::model::ModelHomeo;
use crate::word::Endpoint;

/// Past and future limits of an orbit: membership in one of the four plane
/// strata W_{alpha→omega}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitFate {
    pub alpha: Endpoint,
    pub omega: Endpoint,
}

impl OrbitFate {
    pub fn new(alpha: Endpoint, omega: Endpoint) -> Self {
        OrbitFate { alpha, omega }
    }

    /// Fate of the same orbit under the inverse dynamics.
    pub fn swapped(self) -> Self {
        OrbitFate {
            alpha: self.omega,
            omega: self.alpha,
        }
    }
}

impl std::fmt::Display for OrbitFate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({} -> {})", self.alpha, self.omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FateParams {
    /// Attraction radius: inside this, the orbit is declared to reach 0.
    pub r_in: f64,
    /// Escape radius: outside this, the orbit is declared to reach infinity.
    pub r_out: f64,
    pub max_iter: u32,
}

impl Default for FateParams {
    fn default() -> Self {
        FateParams {
            r_in: 1e-6,
            r_out: 1e6,
            max_iter: 2000,
        }
    }
}

impl FateParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.r_in > 0.0 && self.r_in < self.r_out) {
            return Err(format!("need 0 < r_in < r_out, got {} / {}", self.r_in, self.r_out));
        }
        if self.max_iter == 0 {
            return Err("max_iter must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeDirection {
    Forward,
    Backward,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FateError {
    #[error("orbit of {point} undecided after {iterations} iterations ({direction:?}); near-exceptional orbit")]
    Undecided {
        point: Point2,
        direction: TimeDirection,
        iterations: u32,
    },
}

fn limit(h: &ModelHomeo, x: Point2, direction: TimeDirection, params: &FateParams) -> Option<Endpoint> {
    let mut p = x;
    for _ in 0..params.max_iter {
        p = match direction {
            TimeDirection::Forward => h.apply(p),
            TimeDirection::Backward => h.apply_inverse(p),
        };
        let n = p.norm();
        if n < params.r_in {
            return Some(Endpoint::Zero);
        }
        if n > params.r_out {
            return Some(Endpoint::Infinity);
        }
    }
    None
}

/// Classify the orbit of x: omega from forward iteration, alpha from
/// backward iteration.
pub fn orbit_fate(h: &ModelHomeo, x: Point2, params: &FateParams) -> Result<OrbitFate, FateError> {
    assert!(
        x.is_finite() && !(x.x == 0.0 && x.y == 0.0),
        "orbit fate needs a finite nonzero point"
    );
    let omega = limit(h, x, TimeDirection::Forward, params).ok_or(FateError::Undecided {
        point: x,
        direction: TimeDirection::Forward,
        iterations: params.max_iter,
    })?;
    let alpha = limit(h, x, TimeDirection::Backward, params).ok_or(FateError::Undecided {
        point: x,
        direction: TimeDirection::Backward,
        iterations: params.max_iter,
    })?;
    Ok(OrbitFate { alpha, omega })
}

/// Fate of x under the inverse dynamics of h.
pub fn orbit_fate_inverse(
    h: &ModelHomeo,
    x: Point2,
    params: &FateParams,
) -> Result<OrbitFate, FateError> {
    let omega = limit(h, x, TimeDirection::Backward, params).ok_or(FateError::Undecided {
        point: x,
        direction: TimeDirection::Backward,
        iterations: params.max_iter,
    })?;
    let alpha = limit(h, x, TimeDirection::Forward, params).ok_or(FateError::Undecided {
        point: x,
        direction: TimeDirection::Forward,
        iterations: params.max_iter,
    })?;
    Ok(OrbitFate { alpha, omega })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingParams {
    pub radius: f64,
    pub initial_samples: usize,
    pub max_depth: u32,
    /// Refine until every consecutive displacement turn is below this.
    pub step_bound: f64,
}

impl Default for WindingParams {
    fn default() -> Self {
        WindingParams {
            radius: 1.0,
            initial_samples: 256,
            max_depth: 20,
            step_bound: FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindingResult {
    pub index: i64,
    /// |raw turning − index| before the integer snap.
    pub residual: f64,
    pub samples: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindingError {
    #[error("winding refinement hit depth {depth} with a step of {step} rad (sign ambiguity); retry with another radius")]
    NonConvergent { depth: u32, step: f64 },
    #[error("winding total {raw} is {residual} away from the nearest integer (tolerance 0.1)")]
    ResidualTooLarge { raw: f64, residual: f64 },
}

/// Poincaré–Lefschetz index: total turning of the displacement x ↦ h(x) − x
/// along the circle of the given radius, divided by 2π. Angle steps are
/// accumulated in (−π, π] with adaptive bisection, so the count is exact
/// once every step is below the bound.
pub fn pl_index(h: &ModelHomeo, params: &WindingParams) -> Result<WindingResult, WindingError> {
    assert!(params.radius > 0.0);
    let displacement = |s: f64| -> Point2 {
        let ang = s * TAU;
        let p = Point2::new(params.radius * ang.cos(), params.radius * ang.sin());
        let v = h.apply(p) - p;
        debug_assert!(v.norm() > 0.0, "fixed point on the winding circle");
        v
    };
    let n = params.initial_samples.max(8);
    let mut nodes: Vec<(f64, Point2)> = (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            (s, displacement(s))
        })
        .collect();
    for depth in 0..=params.max_depth {
        let mut refined = Vec::new();
        for i in 0..nodes.len() - 1 {
            if turn_at_origin(nodes[i].1, nodes[i + 1].1).abs() >= params.step_bound {
                refined.push(i);
            }
        }
        if refined.is_empty() {
            break;
        }
        if depth == params.max_depth {
            let worst = nodes
                .windows(2)
                .map(|w| turn_at_origin(w[0].1, w[1].1).abs())
                .fold(0.0, f64::max);
            if worst >= PI {
                return Err(WindingError::NonConvergent { depth, step: worst });
            }
            break;
        }
        // insert midpoints after the flagged nodes, back to front
        for &i in refined.iter().rev() {
            let s = 0.5 * (nodes[i].0 + nodes[i + 1].0);
            nodes.insert(i + 1, (s, displacement(s)));
        }
        if nodes.len() > (1 << 20) {
            let worst = nodes
                .windows(2)
                .map(|w| turn_at_origin(w[0].1, w[1].1).abs())
                .fold(0.0, f64::max);
            return Err(WindingError::NonConvergent { depth, step: worst });
        }
    }
    let total: f64 = nodes
        .windows(2)
        .map(|w| turn_at_origin(w[0].1, w[1].1))
        .sum();
    let raw = total / TAU;
    let index = raw.round();
    let residual = (raw - index).abs();
    if residual >= 0.1 {
        return Err(WindingError::ResidualTooLarge { raw, residual });
    }
    Ok(WindingResult {
        index: index as i64,
        residual,
        samples: nodes.len(),
    })
}

/// Annulus grid for fate classification: log-spaced radii, uniform angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub radius_min: f64,
    pub radius_max: f64,
    pub radial: usize,
    pub angular: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radius_min: 0.25,
            radius_max: 4.0,
            radial: 8,
            angular: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FateOutcome {
    Decided(OrbitFate),
    Undecided {
        alpha: Option<Endpoint>,
        omega: Option<Endpoint>,
    },
}

/// Batch fates over the annulus grid; undecided entries are preserved.
pub fn classify_grid(
    h: &ModelHomeo,
    spec: &GridSpec,
    params: &FateParams,
) -> Vec<(Point2, FateOutcome)> {
    let points: Vec<Point2> = (0..spec.radial)
        .flat_map(|i| {
            let f = if spec.radial == 1 {
                0.0
            } else {
                i as f64 / (spec.radial - 1) as f64
            };
            let rho = spec.radius_min * (spec.radius_max / spec.radius_min).powf(f);
            (0..spec.angular).map(move |j| {
                let ang = j as f64 / spec.angular as f64 * TAU;
                Point2::new(rho * ang.cos(), rho * ang.sin())
            })
        })
        .collect();
    points
        .into_par_iter()
        .map(|p| {
            let omega = limit(h, p, TimeDirection::Forward, params);
            let alpha = limit(h, p, TimeDirection::Backward, params);
            let outcome = match (alpha, omega) {
                (Some(alpha), Some(omega)) => FateOutcome::Decided(OrbitFate { alpha, omega }),
                _ => FateOutcome::Undecided { alpha, omega },
            };
            (p, outcome)
        })
        .collect()
}

/// Search one sector of the model for a point with the given orbit fate.
/// Probes are laid out deterministically: the sector midline first (where
/// the indifferent models keep their exceptional lattice orbits), then
/// offset angles, at dyadic radii. Returns the point and the number of
/// probes spent.
pub fn search_fate_in_sector(
    h: &ModelHomeo,
    sector: usize,
    target: OrbitFate,
    max_probes: usize,
    params: &FateParams,
) -> Option<(Point2, usize)> {
    let d = h.d() as f64;
    let angular_fractions: Vec<f64> = {
        let mut f = vec![0.5];
        for k in 1..=24 {
            let off = k as f64 / 50.0;
            f.push(0.5 - off);
            f.push(0.5 + off);
        }
        f
    };
    let mut probes = 0;
    // dyadic and half-dyadic radii: the indifferent models keep their
    // exceptional orbits on half-integer rungs
    for exp in 0..=24 {
        for sign in [1i32, -1] {
            let n = exp * sign;
            if exp == 0 && sign == -1 {
                continue;
            }
            let rho = 2f64.powf(n as f64 / 2.0);
            for &frac in &angular_fractions {
                if probes >= max_probes {
                    return None;
                }
                probes += 1;
                let ang = (sector as f64 + frac) / d * TAU;
                let p = Point2::new(rho * ang.cos(), rho * ang.sin());
                if let Ok(fate) = orbit_fate(h, p, params) {
                    if fate == target {
                        return Some((p, probes));
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;
    use crate::word::{alpha_omega, CyclicWord};

    fn model(s: &str) -> ModelHomeo {
        build_model(&CyclicWord::parse(s).unwrap()).unwrap()
    }

    fn fate(a: Endpoint, o: Endpoint) -> OrbitFate {
        OrbitFate::new(a, o)
    }

    #[test]
    fn contracting_ray_goes_infinity_to_zero() {
        let h = model("URDLURDL");
        let p = Point2::new(1.0, 0.0); // ray 0 carries ↑
        assert_eq!(
            orbit_fate(&h, p, &FateParams::default()).unwrap(),
            fate(Endpoint::Infinity, Endpoint::Zero)
        );
    }

    #[test]
    fn elliptic_interior_goes_zero_to_zero() {
        let h = model("DRUL");
        // sector 0 is the window (↓→↑); its interior returns to the fixed point
        let p = Point2::new(0.0, 1.0);
        assert_eq!(
            orbit_fate(&h, p, &FateParams::default()).unwrap(),
            fate(Endpoint::Zero, Endpoint::Zero)
        );
    }

    #[test]
    fn hyperbolic_interior_goes_infinity_to_infinity() {
        let h = model("URDL");
        let p = Point2::new(0.7, 0.7);
        assert_eq!(
            orbit_fate(&h, p, &FateParams::default()).unwrap(),
            fate(Endpoint::Infinity, Endpoint::Infinity)
        );
    }

    #[test]
    fn fate_is_orbit_invariant_and_swaps_under_inverse() {
        let h = model("URDRURDLDL");
        let params = FateParams::default();
        for p in [Point2::new(0.9, 0.4), Point2::new(-1.2, 0.3), Point2::new(0.1, -2.0)] {
            let f = orbit_fate(&h, p, &params).unwrap();
            assert_eq!(f, orbit_fate(&h, h.apply(p), &params).unwrap());
            assert_eq!(f.swapped(), orbit_fate_inverse(&h, p, &params).unwrap());
        }
    }

    #[test]
    fn winding_index_matches_known_models() {
        let params = WindingParams::default();
        assert_eq!(pl_index(&model("URDLURDL"), &params).unwrap().index, -1);
        assert_eq!(pl_index(&model("URDRURDLDL"), &params).unwrap().index, 0);
        assert_eq!(pl_index(&model("DRULDRUL"), &params).unwrap().index, 3);
    }

    #[test]
    fn winding_index_radius_independent() {
        for word in ["URDL", "URDLURDL", "DRUL", "URDRURDLDL"] {
            let h = model(word);
            let mut values = Vec::new();
            for radius in [0.25, 1.0, 4.0] {
                let params = WindingParams {
                    radius,
                    ..WindingParams::default()
                };
                let result = pl_index(&h, &params).unwrap();
                assert!(result.residual < 0.1);
                values.push(result.index);
            }
            assert!(values.windows(2).all(|w| w[0] == w[1]), "{word}: {values:?}");
        }
    }

    #[test]
    fn grid_partition_of_conservative_word() {
        let h = model("URDLURDL");
        let outcomes = classify_grid(&h, &GridSpec::default(), &FateParams::default());
        for (p, outcome) in outcomes {
            match outcome {
                FateOutcome::Decided(f) => {
                    assert_ne!(
                        f,
                        fate(Endpoint::Zero, Endpoint::Zero),
                        "no returning orbits in an all-hyperbolic model at {p}"
                    );
                }
                FateOutcome::Undecided { .. } => panic!("undecided at {p}"),
            }
        }
    }

    #[test]
    fn grid_of_elliptic_word_contains_returning_points() {
        let h = model("DRUL");
        let outcomes = classify_grid(&h, &GridSpec::default(), &FateParams::default());
        assert!(outcomes.iter().any(|(_, o)| matches!(
            o,
            FateOutcome::Decided(f) if *f == fate(Endpoint::Zero, Endpoint::Zero)
        )));
    }

    #[test]
    fn grid_fates_respect_rotational_symmetry() {
        let h = model("URDLURDL");
        let params = FateParams::default();
        for i in 0..24 {
            let ang = i as f64 / 24.0 * TAU;
            let p = Point2::new(1.3 * ang.cos(), 1.3 * ang.sin());
            let q = Point2::new(-p.x, -p.y); // rotation by pi maps the model to itself
            assert_eq!(
                orbit_fate(&h, p, &params).unwrap(),
                orbit_fate(&h, q, &params).unwrap()
            );
        }
    }

    #[test]
    fn reverse_orbit_found_in_indifferent_sector() {
        // Sector 3 of the worked example is the (↓←↓) window: its generic
        // fate is (0, ∞), and the exceptional orbit runs (∞, 0).
        let h = model("URDRURDLDL");
        let windows = h.word().sector_windows().unwrap();
        assert_eq!(windows[3], [
            crate::word::Letter::Down,
            crate::word::Letter::Left,
            crate::word::Letter::Down
        ]);
        let (alpha, omega) = alpha_omega(&windows[3]).unwrap();
        let generic = fate(alpha, omega);
        let target = generic.swapped();
        assert_eq!(target, fate(Endpoint::Infinity, Endpoint::Zero));
        let found = search_fate_in_sector(&h, 3, target, 10_000, &FateParams::default());
        assert!(found.is_some(), "reverse orbit not found");
        let (p, probes) = found.unwrap();
        assert!(probes <= 10_000);
        assert_eq!(orbit_fate(&h, p, &FateParams::default()).unwrap(), target);
    }

    #[test]
    fn undecided_surfaces_for_tiny_iteration_budget() {
        let h = model("URDL");
        let params = FateParams {
            max_iter: 2,
            ..FateParams::default()
        };
        let err = orbit_fate(&h, Point2::new(1.0, 0.001), &params).unwrap_err();
        assert!(matches!(err, FateError::Undecided { .. }));
    }
}
