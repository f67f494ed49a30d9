//! Minimal static SVG charts. Output depends only on the data, so plots are
//! as reproducible as the reports they accompany.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn frame(title: &str, x_label: &str, y_label: &str, lo: f64, hi: f64) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>
<line x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/>
<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{}" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>
<text x="{}" y="{}" text-anchor="end">{}</text>
<text x="{}" y="{}" text-anchor="end">{}</text>
"#,
        W / 2.0,
        esc(title),
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD,
        W / 2.0,
        H - 10.0,
        esc(x_label),
        H / 2.0,
        H / 2.0,
        esc(y_label),
        PAD - 4.0,
        H - PAD,
        fmt(lo),
        PAD - 4.0,
        PAD + 4.0,
        fmt(hi),
    );
    s
}

fn fmt(v: f64) -> String {
    let r = format!("{v:.4}");
    let r = r.trim_end_matches('0').trim_end_matches('.');
    if r == "-0" {
        "0".into()
    } else {
        r.into()
    }
}

fn range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(0.0f64, f64::min);
    let hi = values.iter().copied().fold(0.0f64, f64::max);
    if hi - lo < 1e-12 {
        (lo, lo + 1.0)
    } else {
        (lo, hi)
    }
}

/// Bars with labels under each one.
pub fn bar_chart(title: &str, x_label: &str, y_label: &str, bars: &[(String, f64)]) -> String {
    let values: Vec<f64> = bars.iter().map(|b| b.1).collect();
    let (lo, hi) = range(&values);
    let mut s = frame(title, x_label, y_label, lo, hi);
    let y = |v: f64| H - PAD - (v - lo) / (hi - lo) * (H - 2.0 * PAD);
    let n = bars.len().max(1) as f64;
    let slot = (W - 2.0 * PAD) / n;
    for (i, (label, v)) in bars.iter().enumerate() {
        let x = PAD + slot * i as f64 + slot * 0.15;
        let (top, bottom) = if *v >= 0.0 { (y(*v), y(0.0)) } else { (y(0.0), y(*v)) };
        let _ = writeln!(
            s,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#4a7ab5"><title>{}: {}</title></rect>"##,
            fmt(x),
            fmt(top),
            fmt(slot * 0.7),
            fmt((bottom - top).max(0.5)),
            esc(label),
            fmt(*v)
        );
        if bars.len() <= 40 {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" font-size="9">{}</text>"#,
                fmt(x + slot * 0.35),
                fmt(H - PAD + 12.0),
                esc(label)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// One or more polylines over shared integer x positions.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let ys: Vec<f64> = series.iter().flat_map(|s| s.1.iter().map(|p| p.1)).collect();
    let xs: Vec<f64> = series.iter().flat_map(|s| s.1.iter().map(|p| p.0)).collect();
    let (lo, hi) = range(&ys);
    let x0 = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x1 = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1) = if x0.is_finite() && x1 > x0 { (x0, x1) } else { (0.0, 1.0) };
    let mut s = frame(title, x_label, y_label, lo, hi);
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |v: f64| H - PAD - (v - lo) / (hi - lo) * (H - 2.0 * PAD);
    const COLORS: [&str; 4] = ["#4a7ab5", "#c0504d", "#9bbb59", "#8064a2"];
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", fmt(px(*x)), fmt(py(*y)))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for (x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#, fmt(px(*x)), fmt(py(*y)));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            fmt(W - PAD - 120.0),
            fmt(PAD + 14.0 * k as f64),
            esc(name)
        );
    }
    for (x, _) in series.first().map(|s| s.1.as_slice()).unwrap_or(&[]) {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="9">{}</text>"#,
            fmt(px(*x)),
            fmt(H - PAD + 12.0),
            fmt(*x)
        );
    }
    s.push_str("</svg>\n");
    s
}
