//! Minimal self-contained SVG charts. Output is a pure function of the
//! inputs.

use std::fmt::Write;

const FONT: &str = "font-family=\"sans-serif\" font-size=\"11\"";
const PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948"];

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(width: f64, height: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        width / 2.0,
        escape(title)
    )
}

fn nice_max(v: f64) -> f64 {
    if v <= 0.0 {
        1.0
    } else {
        v * 1.1
    }
}

/// Vertical bars with value labels.
pub fn bar_chart(title: &str, labels: &[String], values: &[f64]) -> String {
    let (w, h, left, bottom, top) = (60.0 + 50.0 * labels.len().max(1) as f64, 320.0, 50.0, 60.0, 30.0);
    let plot_h = h - bottom - top;
    let max = nice_max(values.iter().cloned().fold(0.0, f64::max));
    let mut out = header(w, h, title);
    let _ = writeln!(out, "<line x1=\"{left}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>", h - bottom, w - 10.0, h - bottom);
    for (i, (label, &v)) in labels.iter().zip(values).enumerate() {
        let bh = plot_h * v.max(0.0) / max;
        let x = left + 10.0 + 50.0 * i as f64;
        let y = h - bottom - bh;
        let _ = writeln!(
            out,
            "<rect x=\"{x}\" y=\"{y}\" width=\"36\" height=\"{bh}\" fill=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{}</text>\n\
             <text x=\"{}\" y=\"{}\" text-anchor=\"end\" transform=\"rotate(-40 {} {})\" {FONT}>{}</text>",
            PALETTE[i % PALETTE.len()],
            x + 18.0,
            y - 3.0,
            fmt_value(v),
            x + 18.0,
            h - bottom + 14.0,
            x + 18.0,
            h - bottom + 14.0,
            escape(label)
        );
    }
    out + "</svg>\n"
}

fn fmt_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Polylines sharing axes; each series is `(name, points)`.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h, left, bottom, top, right) = (520.0, 340.0, 60.0, 50.0, 30.0, 130.0);
    let pts = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let (pw, ph) = (w - left - right, h - top - bottom);
    let sx = |x: f64| left + pw * (x - x0) / (x1 - x0);
    let sy = |y: f64| top + ph * (1.0 - (y - y0) / (y1 - y0));
    let mut out = header(w, h, title);
    let _ = writeln!(
        out,
        "<rect x=\"{left}\" y=\"{top}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{}</text>\n\
         <text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\" {FONT}>{}</text>\n\
         <text x=\"{left}\" y=\"{}\" {FONT}>{}</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\" {FONT}>{}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"end\" {FONT}>{}</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\" {FONT}>{}</text>",
        left + pw / 2.0,
        h - 12.0,
        escape(x_label),
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label),
        top + ph + 14.0,
        fmt_value(x0),
        left + pw,
        top + ph + 14.0,
        fmt_value(x1),
        left - 4.0,
        top + ph,
        fmt_value(y0),
        left - 4.0,
        top + 10.0,
        fmt_value(y1),
    );
    for (i, (name, points)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\"/>\n\
             <rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{colour}\"/><text x=\"{}\" y=\"{}\" {FONT}>{}</text>",
            path.join(" "),
            w - right + 10.0,
            top + 16.0 * i as f64,
            w - right + 24.0,
            top + 9.0 + 16.0 * i as f64,
            escape(name)
        );
    }
    out + "</svg>\n"
}

/// Linear interpolation between two RGB colours, `t` clamped to [0, 1].
fn blend(from: (u8, u8, u8), to: (u8, u8, u8), t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.5 };
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(from.0, to.0), mix(from.1, to.1), mix(from.2, to.2))
}

/// Colour for a value in [0, 1]: white to dark red.
pub fn sequential_colour(t: f64) -> String {
    blend((255, 255, 255), (165, 15, 21), t)
}

/// Colour for a value in [-1, 1]: blue through white to red.
pub fn diverging_colour(v: f64) -> String {
    if v < 0.0 {
        blend((255, 255, 255), (33, 102, 172), -v)
    } else {
        blend((255, 255, 255), (178, 24, 43), v)
    }
}

/// Labelled matrix of cells. `colour` maps a value to a fill; missing
/// values render grey with an "n/a" label.
pub fn matrix_heatmap(
    title: &str,
    row_labels: &[String],
    col_labels: &[String],
    values: &[Vec<Option<f64>>],
    colour: impl Fn(f64) -> String,
) -> String {
    let cell = 56.0;
    let (left, top) = (110.0, 90.0);
    let w = left + cell * col_labels.len() as f64 + 20.0;
    let h = top + cell * row_labels.len() as f64 + 20.0;
    let mut out = header(w, h, title);
    for (j, c) in col_labels.iter().enumerate() {
        let x = left + cell * j as f64 + cell / 2.0;
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"start\" transform=\"rotate(-45 {x} {})\" {FONT}>{}</text>",
            top - 6.0,
            top - 6.0,
            escape(c)
        );
    }
    for (i, r) in row_labels.iter().enumerate() {
        let y = top + cell * i as f64;
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" {FONT}>{}</text>", left - 6.0, y + cell / 2.0 + 4.0, escape(r));
        for j in 0..col_labels.len() {
            let x = left + cell * j as f64;
            let v = values.get(i).and_then(|row| row.get(j)).copied().flatten();
            let (fill, label) = match v {
                Some(v) => (colour(v), fmt_value(v)),
                None => ("#cccccc".to_string(), "n/a".to_string()),
            };
            let _ = writeln!(
                out,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{fill}\" stroke=\"white\"/>\
                 <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{label}</text>",
                x + cell / 2.0,
                y + cell / 2.0 + 4.0
            );
        }
    }
    out + "</svg>\n"
}

/// One cell per token, shaded by `colour_values` in [0, 1] and labelled with
/// the token and its raw value.
pub fn token_heatmap(title: &str, tokens: &[String], raw: &[f64], colour_values: &[f64]) -> String {
    let widths: Vec<f64> = tokens.iter().map(|t| 20.0 + 7.5 * t.chars().count().max(6) as f64).collect();
    let w = 20.0 + widths.iter().sum::<f64>();
    let mut out = header(w.max(200.0), 90.0, title);
    let mut x = 10.0;
    for ((tok, &v), (&c, &cw)) in tokens.iter().zip(raw).zip(colour_values.iter().zip(&widths)) {
        let text_colour = if c > 0.6 { "white" } else { "black" };
        let _ = writeln!(
            out,
            "<rect x=\"{x}\" y=\"30\" width=\"{cw}\" height=\"48\" fill=\"{}\" stroke=\"#888\"/>\
             <text x=\"{}\" y=\"50\" text-anchor=\"middle\" fill=\"{text_colour}\" {FONT}>{}</text>\
             <text x=\"{}\" y=\"68\" text-anchor=\"middle\" fill=\"{text_colour}\" {FONT}>{:.4}</text>",
            sequential_colour(c),
            x + cw / 2.0,
            escape(tok),
            x + cw / 2.0,
            v
        );
        x += cw;
    }
    out + "</svg>\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("<a & \"b\">"), "&lt;a &amp; &quot;b&quot;&gt;");
        let svg = bar_chart("x<y", &["a&b".into()], &[3.0]);
        assert!(svg.contains("x&lt;y") && svg.contains("a&amp;b"));
    }

    #[test]
    fn colour_ends() {
        assert_eq!(sequential_colour(0.0), "#ffffff");
        assert_eq!(sequential_colour(1.0), "#a50f15");
        assert_eq!(diverging_colour(0.0), "#ffffff");
        assert_eq!(diverging_colour(-1.0), "#2166ac");
    }

    #[test]
    fn charts_are_deterministic_and_well_formed() {
        let series = vec![("loss".to_string(), vec![(1.0, 0.9), (2.0, 0.5), (3.0, f64::NAN)])];
        let a = line_chart("t", "epoch", "loss", &series);
        assert_eq!(a, line_chart("t", "epoch", "loss", &series));
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        let m = matrix_heatmap("m", &["r".into()], &["c1".into(), "c2".into()], &[vec![Some(1.0), None]], diverging_colour);
        assert_eq!(m.matches("<rect x=").count(), 2);
        assert!(m.contains("n/a"));
        let t = token_heatmap("h", &["a".into(), "b".into()], &[0.1, 0.2], &[0.0, 1.0]);
        assert!(t.contains("#a50f15") && t.contains("0.2000"));
    }
}
