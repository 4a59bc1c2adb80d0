//! Top-down SVG drawing of a venue and an optional deployment.

use std::fmt::Write;

use crate::solver::Deployment;
use crate::venue::Venue;

const WIDTH: f64 = 900.0;
const MARGIN: f64 = 40.0;
const LEGEND_H: f64 = 60.0;

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(venue: &Venue) -> Self {
        let pts = venue
            .grid_positions
            .iter()
            .map(|g| g.pos)
            .chain(venue.candidates.iter().map(|c| c.pos));
        let (mut min_x, mut max_x, mut min_y, mut max_y) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in pts {
            min_x = min_x.min(p.x);
            max_x = max_x.max(p.x);
            min_y = min_y.min(p.y);
            max_y = max_y.max(p.y);
        }
        if !min_x.is_finite() {
            (min_x, max_x, min_y, max_y) = (0.0, 1.0, 0.0, 1.0);
        }
        let span_x = (max_x - min_x).max(1.0);
        let span_y = (max_y - min_y).max(1.0);
        let scale = (WIDTH - 2.0 * MARGIN) / span_x;
        Self {
            min_x,
            max_y,
            scale,
            height: span_y * scale + 2.0 * MARGIN,
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            MARGIN + (x - self.min_x) * self.scale,
            MARGIN + (self.max_y - y) * self.scale,
        )
    }
}

/// Red (0) through yellow to green (1).
fn heat(p: f64) -> String {
    let p = p.clamp(0.0, 1.0);
    let (r, g) = if p < 0.5 {
        (255.0, 510.0 * p)
    } else {
        (510.0 * (1.0 - p), 255.0)
    };
    format!("#{:02x}{:02x}30", r.round() as u8, g.round() as u8)
}

/// Renders GPs (colored by connectivity), candidate sites, and selected APs with
/// beam wedges of the deployment beamwidth. Output is deterministic.
pub fn render_svg(venue: &Venue, deployment: Option<&Deployment>) -> String {
    let f = Frame::new(venue);
    let total_h = f.height + LEGEND_H;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.2}" height="{total_h:.2}" viewBox="0 0 {WIDTH:.2} {total_h:.2}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(&venue.name));
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    let seat_r = (0.25 * f.scale).clamp(1.5, 8.0);
    let _ = writeln!(s, r#"<g id="grid-positions">"#);
    for g in &venue.grid_positions {
        let prob = deployment
            .and_then(|d| d.per_gp.get(g.id))
            .map_or(0.0, |r| r.prob);
        let (x, y) = f.px(g.pos.x, g.pos.y);
        let _ = writeln!(
            s,
            r#"<circle class="gp" data-id="{}" data-prob="{prob:.2}" cx="{x:.2}" cy="{y:.2}" r="{seat_r:.2}" fill="{}"/>"#,
            g.id,
            heat(prob)
        );
    }
    let _ = writeln!(s, "</g>");

    let site_r = (0.4 * f.scale).clamp(3.0, 10.0);
    let _ = writeln!(s, r#"<g id="candidates">"#);
    for c in &venue.candidates {
        let (x, y) = f.px(c.pos.x, c.pos.y);
        let _ = writeln!(
            s,
            r##"<circle class="candidate" data-id="{}" cx="{x:.2}" cy="{y:.2}" r="{site_r:.2}" fill="none" stroke="#555555" stroke-width="1.50"/>"##,
            c.id
        );
    }
    let _ = writeln!(s, "</g>");

    if let Some(d) = deployment {
        let wedge_r = 0.08 * (WIDTH - 2.0 * MARGIN);
        let half = 0.5 * d.beamwidth_ap;
        let _ = writeln!(s, r#"<g id="access-points">"#);
        for ap in &d.selected {
            let Some(c) = venue.candidates.get(ap.loc) else {
                continue;
            };
            let (x, y) = f.px(c.pos.x, c.pos.y);
            // screen y points down, so counter-clockwise azimuths flip sign
            let a0 = -(ap.phi - half);
            let a1 = -(ap.phi + half);
            let (x0, y0) = (x + wedge_r * a0.cos(), y + wedge_r * a0.sin());
            let (x1, y1) = (x + wedge_r * a1.cos(), y + wedge_r * a1.sin());
            let large = u8::from(d.beamwidth_ap > std::f64::consts::PI);
            let _ = writeln!(
                s,
                r##"<path class="wedge" data-ap="{}" data-azimuth="{:.2}" data-elevation="{:.2}" d="M {x:.2} {y:.2} L {x0:.2} {y0:.2} A {wedge_r:.2} {wedge_r:.2} 0 {large} 0 {x1:.2} {y1:.2} Z" fill="#3070ff" fill-opacity="0.25" stroke="#3070ff" stroke-width="1.00"/>"##,
                ap.loc, ap.phi, ap.theta
            );
            let _ = writeln!(
                s,
                r##"<rect class="ap" data-id="{}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#1040c0"/>"##,
                ap.loc,
                x - site_r,
                y - site_r,
                2.0 * site_r,
                2.0 * site_r
            );
        }
        let _ = writeln!(s, "</g>");
    }

    let ly = f.height + 10.0;
    let _ = writeln!(s, r#"<g id="legend">"#);
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let x = MARGIN + 30.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{ly:.2}" width="30.00" height="14.00" fill="{}"/>"#,
            heat(p)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">connectivity probability 0 to 1</text>"#,
        MARGIN,
        ly + 32.0
    );
    if let Some(d) = deployment {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" font-family="sans-serif">{} APs, normalized coverage {:.4}</text>"#,
            MARGIN + 360.0,
            ly + 12.0,
            d.selected.len(),
            d.normalized_coverage
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
