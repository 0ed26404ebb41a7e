use std::fmt::Write;

use roceval::pooled::RocCurveEstimate;

use crate::output::Provenance;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 50.0;

fn sx(p: f64) -> f64 {
    MARGIN + p * (SIZE - 2.0 * MARGIN)
}

fn sy(r: f64) -> f64 {
    SIZE - MARGIN - r * (SIZE - 2.0 * MARGIN)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn polyline(xs: impl Iterator<Item = (f64, f64)>) -> String {
    xs.map(|(p, r)| format!("{:.2},{:.2}", sx(p), sy(r)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Unit-square plot of the curve with its pointwise band, if any.
pub fn roc_svg(curve: &RocCurveEstimate, title: &str, prov: &Provenance) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, "<desc>{}</desc>", escape(&prov.lines.join("\n")));
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    if let (Some(lo), Some(hi)) = (&curve.band_lo, &curve.band_hi) {
        let p = curve.grid.points();
        let upper = p.iter().copied().zip(hi.iter().copied());
        let lower = p.iter().copied().zip(lo.iter().copied()).rev();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#c8d7ea" stroke="none"/>"##,
            polyline(upper.chain(lower))
        );
    }
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999999" stroke-dasharray="4 4"/>"##,
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(1.0)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        sx(0.0),
        sy(1.0),
        sx(1.0) - sx(0.0),
        sy(0.0) - sy(1.0)
    );
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{t}</text>"#,
            sx(t),
            sy(0.0) + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{t}</text>"#,
            sx(0.0) - 6.0,
            sy(t) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">FPF</text>"#,
        SIZE / 2.0,
        SIZE - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">TPF</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="30" font-size="13" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f4e8c" stroke-width="2"/>"##,
        polyline(curve.points())
    );
    s.push_str("</svg>\n");
    s
}
