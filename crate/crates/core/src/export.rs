//! CSV, SVG and plain-text renderings of envelope functions.

use std::fmt::Write;

use crate::geography::{EnvelopeFn, PieceStatus, Value};
use crate::parallel::Exec;
use crate::rational::{fmt_q, int, to_f64, Q};

/// Version stamp carried by every CSV, SVG and JSON document.
pub const FORMAT_VERSION: u32 = 1;

fn value_cell(v: &Value) -> (String, String) {
    match v {
        Value::Finite { value, label, .. } => (fmt_q(value), label.clone()),
        Value::NegInfinity => ("-inf".into(), String::new()),
        Value::Undefined => (String::new(), String::new()),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per sample: b, value, active witness label, status.
pub fn envelope_csv(title: &str, f: &EnvelopeFn, from: &Q, to: &Q, samples: usize, exec: Exec) -> String {
    let mut out = String::new();
    writeln!(out, "# format_version={FORMAT_VERSION}").unwrap();
    writeln!(out, "# function={title} domain={}", f.domain).unwrap();
    out.push_str("b,value,label,status\n");
    for (b, v) in f.sample(from, to, samples, exec) {
        let (val, label) = value_cell(&v);
        writeln!(out, "{},{},{},{}", fmt_q(&b), val, csv_field(&label), v.status_str()).unwrap();
    }
    out
}

/// Human-readable piece list.
pub fn envelope_text(title: &str, f: &EnvelopeFn) -> String {
    let mut out = String::new();
    writeln!(out, "{title}: b -> f(1,b) on {}", f.domain).unwrap();
    for (i, p) in f.pieces.iter().enumerate() {
        let lo = if i == 0 { lo_str(f) } else { fmt_q(&f.breakpoints[i - 1]) };
        let hi = f.breakpoints.get(i).map_or_else(|| hi_str(f), fmt_q);
        let rel = match p.status {
            PieceStatus::Exact => "=",
            PieceStatus::UpperEnvelope | PieceStatus::UnknownAtMost => "<=",
        };
        writeln!(out, "  [{lo}, {hi}]  {rel} {}  ({}, {})", affine(p.p, p.q), p.label, p.status.as_str()).unwrap();
    }
    for pt in &f.points {
        writeln!(out, "  at b = {}: = {} ({})", fmt_q(&pt.b), pt.value, pt.label).unwrap();
    }
    if f.neg_infinity_outside {
        out.push_str("  -inf outside the domain\n");
    }
    for n in &f.notes {
        writeln!(out, "  note: {n}").unwrap();
    }
    out
}

fn lo_str(f: &EnvelopeFn) -> String {
    f.domain.lo.value().map_or_else(|| "-inf".into(), fmt_q)
}

fn hi_str(f: &EnvelopeFn) -> String {
    f.domain.hi.value().map_or_else(|| "inf".into(), fmt_q)
}

fn affine(p: i64, q: i64) -> String {
    match (p, q) {
        (_, 0) => p.to_string(),
        (0, _) => format!("{q}b"),
        (_, q) if q < 0 => format!("{p} - {}b", -q),
        _ => format!("{p} + {q}b"),
    }
}

const W: f64 = 640.0;
const PANEL_H: f64 = 200.0;
const PAD: f64 = 40.0;

fn fmt_f(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" { "0.00".into() } else { s }
}

/// Stacked line charts over the common b-range [from, to], one panel per
/// function. Breakpoints are marked; bound-only pieces are dashed and
/// −∞ stretches are shaded.
pub fn envelopes_svg(panels: &[(&str, &EnvelopeFn)], from: &Q, to: &Q) -> String {
    let h = PANEL_H * panels.len() as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" data-format-version="{FORMAT_VERSION}">"#,
        W, h, W, h
    )
    .unwrap();
    out.push_str(r#"<rect x="0" y="0" width="100%" height="100%" style="fill:#ffffff"/>"#);
    out.push('\n');
    let (x0, x1) = (to_f64(from), to_f64(to));
    for (k, (title, f)) in panels.iter().enumerate() {
        panel(&mut out, k as f64 * PANEL_H, title, f, from, to, x0, x1);
    }
    out.push_str("</svg>\n");
    out
}

#[allow(clippy::too_many_arguments)]
fn panel(out: &mut String, top: f64, title: &str, f: &EnvelopeFn, from: &Q, to: &Q, x0: f64, x1: f64) {
    // vertex b-values: range ends, breakpoints and domain ends inside the range
    let mut xs: Vec<Q> = vec![from.clone(), to.clone()];
    xs.extend(f.breakpoints.iter().cloned());
    xs.extend(f.domain.lo.value().cloned());
    xs.extend(f.domain.hi.value().cloned());
    xs.retain(|b| b >= from && b <= to);
    xs.sort();
    xs.dedup();
    let finite: Vec<f64> = xs.iter().filter_map(|b| f.eval(b).finite().map(to_f64)).collect();
    let (mut y_lo, mut y_hi) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    if y_hi - y_lo < 1e-9 {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    let sx = |b: f64| PAD + (b - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |v: f64| top + PANEL_H - PAD + (y_lo - v) / (y_hi - y_lo) * (PANEL_H - 2.0 * PAD);
    writeln!(out, r#"<g>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" style="font-family:sans-serif;font-size:13px;fill:#000">{}</text>"#,
        fmt_f(PAD),
        fmt_f(top + 18.0),
        xml_escape(title)
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" style="stroke:#888;stroke-width:1"/>"#,
        fmt_f(PAD),
        fmt_f(top + PANEL_H - PAD + 6.0),
        fmt_f(W - PAD),
        fmt_f(top + PANEL_H - PAD + 6.0)
    )
    .unwrap();
    for b in &xs {
        writeln!(
            out,
            r#"<text x="{}" y="{}" style="font-family:sans-serif;font-size:10px;fill:#444;text-anchor:middle">{}</text>"#,
            fmt_f(sx(to_f64(b))),
            fmt_f(top + PANEL_H - PAD + 20.0),
            fmt_q(b)
        )
        .unwrap();
    }
    for w in xs.windows(2) {
        let mid = (&w[0] + &w[1]) / int(2);
        match f.eval(&mid) {
            Value::Finite { status, .. } => {
                let piece = f.pieces.iter().find(|p| p.at(&mid) == *f.eval(&mid).finite().unwrap() && p.status == status);
                let Some(piece) = piece else { continue };
                let dash = if status == PieceStatus::UnknownAtMost { ";stroke-dasharray:5,4" } else { "" };
                writeln!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" style="stroke:#1f5fa8;stroke-width:2{dash}"/>"#,
                    fmt_f(sx(to_f64(&w[0]))),
                    fmt_f(sy(to_f64(&piece.at(&w[0])))),
                    fmt_f(sx(to_f64(&w[1]))),
                    fmt_f(sy(to_f64(&piece.at(&w[1])))),
                )
                .unwrap();
            }
            Value::NegInfinity => {
                writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" style="fill:#d33;fill-opacity:0.12"/>"#,
                    fmt_f(sx(to_f64(&w[0]))),
                    fmt_f(top + PAD),
                    fmt_f(sx(to_f64(&w[1])) - sx(to_f64(&w[0]))),
                    fmt_f(PANEL_H - 2.0 * PAD)
                )
                .unwrap();
            }
            Value::Undefined => {}
        }
    }
    for b in f.breakpoints.iter().filter(|b| *b >= from && *b <= to) {
        if let Some(v) = f.eval(b).finite() {
            writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="3.5" style="fill:#000"><title>b={} value={}</title></circle>"#,
                fmt_f(sx(to_f64(b))),
                fmt_f(sy(to_f64(v))),
                fmt_q(b),
                fmt_q(v)
            )
            .unwrap();
        }
    }
    for p in f.points.iter().filter(|p| &p.b >= from && &p.b <= to) {
        writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="3.5" style="fill:#1f5fa8"><title>b={} value={}</title></circle>"#,
            fmt_f(sx(to_f64(&p.b))),
            fmt_f(sy(p.value as f64)),
            fmt_q(&p.b),
            p.value
        )
        .unwrap();
    }
    out.push_str("</g>\n");
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geography::{known_table, TableClass};
    use crate::rational::parse_q;

    #[test]
    fn csv_rows() {
        let f = known_table(TableClass::MinimalTrivial);
        let csv = envelope_csv("minimal_trivial", &f, &parse_q("-1").unwrap(), &parse_q("3/2").unwrap(), 11, Exec::Sequential);
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "b,value,label,status");
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[9], "1,4,CP2,exact");
        assert!(csv.starts_with("# format_version=1\n"));
    }

    #[test]
    fn svg_is_deterministic_and_self_contained() {
        let tables: Vec<_> = [TableClass::SmoothTrivial, TableClass::SymplecticTrivial, TableClass::MinimalTrivial]
            .into_iter()
            .map(known_table)
            .collect();
        let panels: Vec<(&str, &EnvelopeFn)> = vec![("smooth", &tables[0]), ("symplectic", &tables[1]), ("minimal", &tables[2])];
        let (a, b) = (parse_q("-4").unwrap(), parse_q("2").unwrap());
        let s1 = envelopes_svg(&panels, &a, &b);
        assert_eq!(s1, envelopes_svg(&panels, &a, &b));
        assert_eq!(s1.matches("<g>").count(), 3);
        assert!(!s1.contains("href"));
        assert!(s1.contains("b=1 value=4"));
    }

    #[test]
    fn text_lists_pieces() {
        let t = envelope_text("minimal_trivial", &known_table(TableClass::MinimalTrivial));
        assert!(t.contains("[1, 3/2]  = 12 - 8b"));
    }
}
