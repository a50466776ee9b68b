use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let d = lo.abs().max(1.0) * 0.5;
        return (lo - d, hi + d);
    }
    let d = 0.05 * (hi - lo);
    (lo - d, hi + d)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static line chart with point markers and labelled axes. Non-finite
/// points are dropped.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (y0, y1) = bounds(pts.iter().map(|p| p.1));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{PAD},{} L{},{} M{PAD},{} L{PAD},{PAD}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{fx:.3e}</text>"#,
            sx(fx),
            H - PAD + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{fy:.3e}</text>"#,
            PAD - 4.0,
            sy(fy) + 4.0
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#, W / 2.0, H - 14.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    if pts.len() > 1 {
        let d: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.2},{:.2}", if i == 0 { "M" } else { "L" }, sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<path d="{}" stroke="steelblue" stroke-width="1.5" fill="none"/>"#, d.join(" "));
    }
    for &(x, y) in &pts {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y));
    }
    s.push_str("</svg>\n");
    s
}
