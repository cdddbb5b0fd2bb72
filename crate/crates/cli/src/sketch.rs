//! SVG sketch of the triangles behind a relation.

use std::f64::consts::PI;
use std::fmt::Write;

use bbp_core::relation::Relation;

pub const WIDTH: f64 = 1000.0;
pub const HEIGHT: f64 = 700.0;
/// Pixels used for the radius r.
pub const RADIUS_PX: f64 = 300.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Renders circle |z - 1| = r, A = 0, B = 1, the b-gon corners and one
/// triangle A B C_a per term.
pub fn render(rel: &Relation) -> String {
    let b = rel.family.b();
    let r = rel.family.r_ball(64).to_f64();
    let unit = RADIUS_PX / r;
    let bx = 620.0;
    let by = HEIGHT / 2.0 + 40.0;
    let px = |re: f64, im: f64| (bx + (re - 1.0) * unit, by - im * unit);
    let corner = |k: f64| {
        let t = 2.0 * PI * k / b as f64;
        px(1.0 + r * t.cos(), r * t.sin())
    };
    let (ax, ay) = px(0.0, 0.0);

    let min_x = (ax - MARGIN).min(0.0);
    let max_x = (bx + RADIUS_PX + MARGIN).max(WIDTH);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{HEIGHT:.0}" viewBox="{min_x:.1} 0 {w:.1} {HEIGHT:.0}" font-family="sans-serif" font-size="16">"#,
        w = max_x - min_x
    );
    let _ = writeln!(s, r#"<rect x="{min_x:.1}" y="0" width="{:.1}" height="{HEIGHT:.0}" fill="white"/>"#, max_x - min_x);
    let _ = writeln!(s, r##"<line x1="{:.1}" y1="{by:.1}" x2="{:.1}" y2="{by:.1}" stroke="#bbb"/>"##, min_x, max_x);
    let _ = writeln!(s, r##"<circle cx="{bx:.1}" cy="{by:.1}" r="{RADIUS_PX:.1}" fill="none" stroke="#444" stroke-width="1.5"/>"##);
    for k in 0..b {
        let (x, y) = corner(k as f64);
        let _ = writeln!(s, r##"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="#666"/>"##);
    }
    for (i, &(c, a)) in rel.terms.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let (cx, cy) = corner(a as f64);
        let _ = writeln!(
            s,
            r#"<polygon points="{ax:.1},{ay:.1} {bx:.1},{by:.1} {cx:.1},{cy:.1}" fill="{colour}" fill-opacity="0.25" stroke="{colour}" stroke-width="2"/>"#
        );
        // ray from A through C makes shared angles visible
        let (dx, dy) = (cx - ax, cy - ay);
        let len = (dx * dx + dy * dy).sqrt().max(1e-9);
        let reach = (bx + RADIUS_PX - ax) * 1.05;
        let _ = writeln!(
            s,
            r#"<line x1="{ax:.1}" y1="{ay:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-dasharray="6 4"/>"#,
            ax + dx / len * reach,
            ay + dy / len * reach
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" fill="{colour}">C{a}</text>"#, cx + 6.0, cy - 6.0);
        let ly = 30.0 + 24.0 * i as f64;
        let lx = min_x + 20.0;
        let _ = writeln!(s, r#"<rect x="{lx:.1}" y="{:.1}" width="16" height="16" fill="{colour}" fill-opacity="0.6"/>"#, ly - 13.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}">{c:+} * CTB({a})</text>"#, lx + 24.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">A</text>"#, ax - 18.0, ay + 20.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">B</text>"#, bx + 6.0, by + 20.0);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, min_x + 20.0, HEIGHT - 20.0, escape(&rel.to_string()));
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
