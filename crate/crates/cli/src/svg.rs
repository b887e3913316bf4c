//! Static SVG scatter plot for a 2-D entity projection.
//!
//! One circle per projected point. Authors, venues, and venue iterations
//! are colored by kind; languages are colored by taxonomy class (languages
//! missing from the class map fall back to class 0, matching the distance
//! table's defaulting rule). Venue points additionally carry text labels.
//! Output is a pure function of the projection and class map.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use langlens_core::{EntityKind, Projection2D};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const PLOT_LEFT: f64 = 40.0;
const PLOT_RIGHT: f64 = 600.0;
const PLOT_TOP: f64 = 30.0;
const PLOT_BOTTOM: f64 = 570.0;
const LEGEND_X: f64 = 625.0;

const AUTHOR_COLOR: &str = "#1f77b4";
const VENUE_COLOR: &str = "#d62728";
const VENUE_ITERATION_COLOR: &str = "#9467bd";
/// Class 0 (least-resourced) through class 5 (most-resourced).
const CLASS_COLORS: [&str; 6] = [
    "#a50026", "#f46d43", "#fdae61", "#abd9e9", "#74add1", "#313695",
];

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn color_for(kind: EntityKind, key: &str, classes: &BTreeMap<String, u8>) -> &'static str {
    match kind {
        EntityKind::Author => AUTHOR_COLOR,
        EntityKind::Venue => VENUE_COLOR,
        EntityKind::VenueIteration => VENUE_ITERATION_COLOR,
        EntityKind::Language => {
            let class = classes.get(key).copied().unwrap_or(0).min(5);
            CLASS_COLORS[class as usize]
        }
    }
}

/// Renders the projection as a self-contained SVG document.
pub fn svg_scatter(p: &Projection2D, classes: &BTreeMap<String, u8>) -> String {
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in &p.coords {
        xmin = xmin.min(c[0]);
        xmax = xmax.max(c[0]);
        ymin = ymin.min(c[1]);
        ymax = ymax.max(c[1]);
    }
    let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };
    let yspan = if ymax > ymin { ymax - ymin } else { 1.0 };
    let sx = |x: f64| PLOT_LEFT + (x - xmin) / xspan * (PLOT_RIGHT - PLOT_LEFT);
    // SVG y grows downward.
    let sy = |y: f64| PLOT_BOTTOM - (y - ymin) / yspan * (PLOT_BOTTOM - PLOT_TOP);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{PLOT_LEFT}" y="{PLOT_TOP}" width="{:.4}" height="{:.4}" fill="none" stroke="#cccccc"/>"##,
        PLOT_RIGHT - PLOT_LEFT,
        PLOT_BOTTOM - PLOT_TOP
    );

    for (label, coord) in p.labels.iter().zip(&p.coords) {
        let cx = sx(coord[0]);
        let cy = sy(coord[1]);
        let fill = color_for(label.kind, &label.key, classes);
        let _ = writeln!(
            svg,
            r#"<circle cx="{cx:.4}" cy="{cy:.4}" r="4" fill="{fill}"/>"#
        );
        if label.kind == EntityKind::Venue {
            let _ = writeln!(
                svg,
                r#"<text x="{:.4}" y="{:.4}" font-size="11" font-family="sans-serif">{}</text>"#,
                cx + 6.0,
                cy - 4.0,
                escape_xml(&label.key)
            );
        }
    }

    let mut legend_y = PLOT_TOP;
    let mut legend_entry = |svg: &mut String, color: &str, text: &str| {
        let _ = writeln!(
            svg,
            r#"<rect x="{LEGEND_X}" y="{:.4}" width="12" height="12" fill="{color}"/>"#,
            legend_y
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.4}" y="{:.4}" font-size="11" font-family="sans-serif">{text}</text>"#,
            LEGEND_X + 18.0,
            legend_y + 10.0
        );
        legend_y += 18.0;
    };
    legend_entry(&mut svg, AUTHOR_COLOR, "author");
    legend_entry(&mut svg, VENUE_COLOR, "venue");
    legend_entry(&mut svg, VENUE_ITERATION_COLOR, "venue iteration");
    for (class, color) in CLASS_COLORS.iter().enumerate() {
        legend_entry(&mut svg, color, &format!("language class {class}"));
    }

    svg.push_str("</svg>\n");
    svg
}
