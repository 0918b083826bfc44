//! Static SVG phase portraits and fate-grid CSV emission. Everything here
//! is deterministic given the seed: byte-identical reruns are part of the
//! output contract.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qturn_core::config::Config;
use qturn_core::curve::{h_length, ClosedCurve, Decomposition};
use qturn_core::dynamics::{classify_grid, FateOutcome, GridSpec};
use qturn_core::geom::Point2;
use qturn_core::model::ModelHomeo;
use qturn_core::word::sector_types;

const VIEW_RADIUS: f64 = 3.2;

fn svg_xy(p: Point2) -> (f64, f64) {
    // y axis flipped for screen coordinates
    (p.x, -p.y)
}

fn polyline(path: &mut String, pts: &[Point2], style: &str) {
    if pts.len() < 2 {
        return;
    }
    let coords: Vec<String> = pts
        .iter()
        .map(|p| {
            let (x, y) = svg_xy(*p);
            format!("{x:.5},{y:.5}")
        })
        .collect();
    let _ = writeln!(
        path,
        r#"  <polyline points="{}" {} fill="none"/>"#,
        coords.join(" "),
        style
    );
}

/// Orbit streaks, sector rays, the best curve and its decomposition
/// vertices, as one standalone SVG document.
pub fn render_svg(h: &ModelHomeo, config: &Config, seed: u64) -> Result<String, String> {
    let d = h.d();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="720" height="720">"#,
        -VIEW_RADIUS,
        -VIEW_RADIUS,
        2.0 * VIEW_RADIUS,
        2.0 * VIEW_RADIUS
    );
    let _ = writeln!(
        out,
        r#"  <rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
        -VIEW_RADIUS,
        -VIEW_RADIUS,
        2.0 * VIEW_RADIUS,
        2.0 * VIEW_RADIUS
    );

    // sector rays, labeled by the word's vertical letters
    for k in 0..d {
        let ang = h.ray_angle(k);
        let tip = Point2::new(VIEW_RADIUS * ang.cos(), VIEW_RADIUS * ang.sin());
        let (x, y) = svg_xy(tip);
        let _ = writeln!(
            out,
            r##"  <line class="sector-ray" x1="0" y1="0" x2="{x:.5}" y2="{y:.5}" stroke="#888888" stroke-width="0.012"/>"##
        );
    }
    // sector type labels at mid-angles
    let types = sector_types(h.word()).map_err(|e| e.to_string())?;
    for (k, t) in types.iter().enumerate() {
        let ang = (k as f64 + 0.5) / d as f64 * TAU;
        let p = Point2::new(2.9 * ang.cos(), 2.9 * ang.sin());
        let (x, y) = svg_xy(p);
        let _ = writeln!(
            out,
            r##"  <text x="{x:.5}" y="{y:.5}" font-size="0.18" text-anchor="middle" fill="#444444">{}</text>"##,
            t.short()
        );
    }

    // orbit streaks from a seeded grid of starting points
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..60 {
        let ang = rng.gen::<f64>() * TAU;
        let rho = 0.3 + rng.gen::<f64>() * 1.8;
        let start = Point2::new(rho * ang.cos(), rho * ang.sin());
        let mut fwd = vec![start];
        let mut p = start;
        for _ in 0..40 {
            p = h.apply(p);
            let n = p.norm();
            if !(1e-3..=VIEW_RADIUS).contains(&n) {
                fwd.push(p);
                break;
            }
            fwd.push(p);
        }
        polyline(
            &mut out,
            &fwd,
            r##"stroke="#2060c0" stroke-width="0.008" opacity="0.7""##,
        );
        let mut bwd = vec![start];
        p = start;
        for _ in 0..40 {
            p = h.apply_inverse(p);
            let n = p.norm();
            if !(1e-3..=VIEW_RADIUS).contains(&n) {
                bwd.push(p);
                break;
            }
            bwd.push(p);
        }
        polyline(
            &mut out,
            &bwd,
            r##"stroke="#c04020" stroke-width="0.008" opacity="0.5""##,
        );
    }

    // best curve and its minimal decomposition vertices
    let circle = ClosedCurve::circle(config.recovery_radius, config.curves.samples);
    match h_length(&circle, h, &config.freeness) {
        Ok(res) => {
            let mut pts: Vec<Point2> = circle.samples().to_vec();
            pts.push(circle.samples()[0]);
            polyline(
                &mut out,
                &pts,
                r##"stroke="#208040" stroke-width="0.02""##,
            );
            draw_vertices(&mut out, &circle, &res.witness);
        }
        Err(e) => {
            let _ = writeln!(out, "  <!-- decomposition unavailable: {e} -->");
        }
    }

    let _ = writeln!(
        out,
        r#"  <circle cx="0" cy="0" r="0.03" fill="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"  <text x="{:.2}" y="{:.2}" font-size="0.16" fill="black">{}</text>"#,
        -VIEW_RADIUS + 0.1,
        -VIEW_RADIUS + 0.25,
        h.word().arrows()
    );
    out.push_str("</svg>\n");
    Ok(out)
}

fn draw_vertices(out: &mut String, curve: &ClosedCurve, witness: &Decomposition) {
    for &v in &witness.vertex_samples {
        let (x, y) = svg_xy(curve.samples()[v]);
        let _ = writeln!(
            out,
            r##"  <circle class="vertex" cx="{x:.5}" cy="{y:.5}" r="0.045" fill="#d02020"/>"##
        );
    }
}

/// Fate-colored annulus grid as CSV lines `x,y,alpha,omega`.
pub fn render_grid_csv(h: &ModelHomeo, n: usize, config: &Config) -> String {
    let spec = GridSpec {
        radius_min: 0.25,
        radius_max: 4.0,
        radial: n,
        angular: n,
    };
    let mut out = String::from("x,y,alpha,omega\n");
    for (p, outcome) in classify_grid(h, &spec, &config.fate) {
        let (a, o) = match outcome {
            FateOutcome::Decided(f) => (f.alpha.to_string(), f.omega.to_string()),
            FateOutcome::Undecided { alpha, omega } => (
                alpha.map_or("undecided".to_string(), |e| e.to_string()),
                omega.map_or("undecided".to_string(), |e| e.to_string()),
            ),
        };
        let _ = writeln!(out, "{},{},{},{}", p.x, p.y, a, o);
    }
    out
}
