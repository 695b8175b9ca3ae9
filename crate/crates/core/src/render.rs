//! SVG chord schematic of a diagram.
//!
//! Each tile is a circle with its corners on the rim; corner `i` sits at
//! the top and labels increase clockwise. An edge is represented by the
//! midpoint of its arc. Solid chords join opposing pairs, dashed chords
//! twisted ones.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::diagram::{Diagram, EdgeRef, Sign};

const RADIUS: f64 = 100.0;
const GAP: f64 = 80.0;
const MARGIN: f64 = 40.0;

fn centre(tile: usize) -> (f64, f64) {
    let x = MARGIN + RADIUS + (tile - 1) as f64 * (2.0 * RADIUS + GAP);
    (x, MARGIN + RADIUS)
}

fn rim(n: usize, tile: usize, position: f64, scale: f64) -> (f64, f64) {
    let (cx, cy) = centre(tile);
    let angle = TAU * position / n as f64;
    (cx + scale * RADIUS * angle.sin(), cy - scale * RADIUS * angle.cos())
}

fn edge_point(n: usize, e: EdgeRef) -> (f64, f64) {
    rim(n, e.tile, e.label as f64 + 0.5, 1.0)
}

pub fn render_svg(d: &Diagram) -> String {
    let (n, f) = (d.n(), d.f());
    let width = 2.0 * MARGIN + f as f64 * 2.0 * RADIUS + (f - 1) as f64 * GAP;
    let height = 2.0 * (MARGIN + RADIUS) + 40.0;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    for tile in 1..=f {
        let (cx, cy) = centre(tile);
        writeln!(
            s,
            r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{RADIUS:.2}" fill="none" stroke="#999"/>"##
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-size="14">{tile}</text>"#,
            cy + RADIUS + 30.0
        )
        .unwrap();
        for i in 0..n {
            let (x, y) = rim(n, tile, i as f64, 1.0);
            writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="black"/>"#).unwrap();
            let (lx, ly) = rim(n, tile, i as f64 + 0.5, 1.13);
            writeln!(
                s,
                r##"<text x="{lx:.2}" y="{:.2}" text-anchor="middle" fill="#555">{i}</text>"##,
                ly + 4.0
            )
            .unwrap();
        }
    }

    for p in d.pairs() {
        let (x1, y1) = edge_point(n, p.a);
        let (x2, y2) = edge_point(n, p.b);
        let (qx, qy) = if p.a.tile == p.b.tile {
            let (cx, cy) = centre(p.a.tile);
            ((x1 + x2 + cx) / 3.0, (y1 + y2 + cy) / 3.0)
        } else {
            let lift = 30.0 * (p.b.tile - p.a.tile) as f64 + 0.25 * (y1 + y2 - 2.0 * (MARGIN + RADIUS)).abs();
            ((x1 + x2) / 2.0, (y1 + y2) / 2.0 - lift)
        };
        let dash = match p.sign {
            Sign::Plus => "",
            Sign::Minus => r#" stroke-dasharray="6 4""#,
        };
        writeln!(
            s,
            r#"<path d="M {x1:.2} {y1:.2} Q {qx:.2} {qy:.2} {x2:.2} {y2:.2}" fill="none" stroke="black" stroke-width="1.5"{dash}><title>{p}</title></path>"#
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}
