//! Minimal SVG emission. Output depends only on the input numbers.

use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Debug, Clone, Copy)]
struct Bounds {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Bounds {
    fn of<'a>(points: impl IntoIterator<Item = &'a [f64; 2]>) -> Self {
        let mut b = Bounds {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for p in points {
            b.x0 = b.x0.min(p[0]);
            b.x1 = b.x1.max(p[0]);
            b.y0 = b.y0.min(p[1]);
            b.y1 = b.y1.max(p[1]);
        }
        if !b.x0.is_finite() {
            return Bounds {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            };
        }
        b
    }

    /// Maps into a `w × h` box with `pad` margin, keeping the aspect ratio
    /// when `equal` is set. SVG y points down.
    fn mapper(self, w: f64, h: f64, pad: f64, equal: bool) -> impl Fn([f64; 2]) -> (f64, f64) {
        let dx = (self.x1 - self.x0).max(1e-300);
        let dy = (self.y1 - self.y0).max(1e-300);
        let (mut sx, mut sy) = ((w - 2.0 * pad) / dx, (h - 2.0 * pad) / dy);
        if equal {
            let s = sx.min(sy);
            sx = s;
            sy = s;
        }
        let ox = pad + 0.5 * ((w - 2.0 * pad) - sx * dx);
        let oy = pad + 0.5 * ((h - 2.0 * pad) - sy * dy);
        move |p| (ox + sx * (p[0] - self.x0), h - (oy + sy * (p[1] - self.y0)))
    }
}

fn header(w: f64, h: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn path(points: &[[f64; 2]], map: &impl Fn([f64; 2]) -> (f64, f64), closed: bool) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = map(*p);
        let _ = write!(d, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
    }
    if closed {
        d.push_str(" Z");
    }
    d
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Outlines on a grid of equal-aspect panels, `cols` per row.
pub fn shapes_strip(shapes: &[Vec<[f64; 2]>], labels: &[String], cols: usize) -> String {
    let (pw, ph) = (220.0, 120.0);
    let cols = cols.max(1).min(shapes.len().max(1));
    let rows = shapes.len().div_ceil(cols).max(1);
    let (w, h) = (pw * cols as f64, ph * rows as f64);
    let bounds = Bounds::of(shapes.iter().flatten());
    let mut out = header(w, h);
    for (k, s) in shapes.iter().enumerate() {
        let (cx, cy) = ((k % cols) as f64 * pw, (k / cols) as f64 * ph);
        let map = bounds.mapper(pw, ph, 12.0, true);
        let _ = writeln!(
            out,
            "<g transform=\"translate({cx},{cy})\"><path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>",
            path(s, &map, true),
            PALETTE[0]
        );
        if let Some(l) = labels.get(k) {
            let _ = writeln!(out, "<text x=\"4\" y=\"12\" font-size=\"10\">{}</text>", escape(l));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Two views of stacked sections: the sections overlaid in the section
/// plane and the planform (chordwise coordinate against span).
pub fn wireframe(sections: &[(f64, Vec<[f64; 2]>)]) -> String {
    let (pw, ph) = (600.0, 360.0);
    let mut out = header(2.0 * pw, ph);
    let map = Bounds::of(sections.iter().flat_map(|s| s.1.iter())).mapper(pw, ph, 20.0, true);
    out.push_str("<g>\n");
    for (_, s) in sections {
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.6\"/>",
            path(s, &map, true),
            PALETTE[0]
        );
    }
    out.push_str("</g>\n");
    let plan: Vec<Vec<[f64; 2]>> = sections
        .iter()
        .map(|(eta, s)| s.iter().map(|p| [*eta, p[0]]).collect())
        .collect();
    let map = Bounds::of(plan.iter().flatten()).mapper(pw, ph, 20.0, false);
    let _ = writeln!(out, "<g transform=\"translate({pw},0)\">");
    for s in &plan {
        let _ = writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"0.6\"/>",
            path(s, &map, false),
            PALETTE[1]
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Scatter of points coloured by group.
pub fn scatter(points: &[[f64; 2]], groups: &[usize], x_label: &str, y_label: &str) -> String {
    let (w, h) = (520.0, 520.0);
    let map = Bounds::of(points).mapper(w, h, 40.0, false);
    let mut out = header(w, h);
    for (k, p) in points.iter().enumerate() {
        let (x, y) = map(*p);
        let g = groups.get(k).copied().unwrap_or(0);
        let _ = writeln!(
            out,
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"2\" fill=\"{}\" fill-opacity=\"0.6\"/>",
            PALETTE[g % PALETTE.len()]
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
        w / 2.0,
        h - 8.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"12\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 12 {})\">{}</text>",
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_closed_path_per_shape() {
        let sq = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let s = shapes_strip(&[sq.clone(), sq.clone(), sq], &["a".into()], 2);
        assert_eq!(s.matches("<path").count(), 3);
        assert_eq!(s.matches(" Z\"").count(), 3);
        assert!(s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn degenerate_bounds_do_not_produce_nan() {
        let s = shapes_strip(&[vec![[0.5, 0.5]; 3]], &[], 1);
        assert!(!s.contains("NaN") && !s.contains("inf"));
        let s = scatter(&[], &[], "t1", "t2");
        assert!(!s.contains("NaN"));
    }
}
