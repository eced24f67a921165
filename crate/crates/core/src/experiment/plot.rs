//! Minimal SVG charts of experiment CSV files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::Command;
use crate::error::{Error, Result};

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 45.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    /// One bar per row, labelled by the x column.
    Bar,
    /// One polyline per group, with markers and optional error bars.
    Line,
}

/// Which CSV columns to draw and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub x: String,
    pub y: String,
    /// Column of one-standard-error half widths.
    pub error: Option<String>,
    /// Column splitting rows into separate series.
    pub group: Option<String>,
    /// Draw `sqrt(d-1)/2` and `sqrt((d-1)/2)` against the x axis.
    pub references: bool,
    pub title: String,
}

impl PlotSpec {
    /// The default chart for a command's CSV, if it has one.
    pub fn for_command(c: Command) -> Option<Self> {
        let line = |y: &str, err: Option<&str>, group: Option<&str>, references: bool| PlotSpec {
            kind: PlotKind::Line,
            x: "d".into(),
            y: y.into(),
            error: err.map(Into::into),
            group: group.map(Into::into),
            references,
            title: c.name().into(),
        };
        Some(match c {
            Command::ExpectedCount => line("mean_equilibria", Some("se_equilibria"), None, false),
            Command::VarianceScan => line("variance_ratio", None, None, false),
            Command::Universality => line("mean_equilibria", Some("se_equilibria"), Some("dist"), true),
            Command::SymmetricCompare => line("symmetric_mean_equilibria", Some("symmetric_se"), None, true),
            Command::Distribution => PlotSpec {
                kind: PlotKind::Bar,
                x: "m".into(),
                y: "p_m_empirical".into(),
                error: Some("se".into()),
                group: None,
                references: false,
                title: c.name().into(),
            },
            Command::PmAnalytic => PlotSpec {
                kind: PlotKind::Bar,
                x: "m".into(),
                y: "p_m".into(),
                error: Some("error".into()),
                group: None,
                references: false,
                title: c.name().into(),
            },
            Command::CltCheck | Command::SampleGame => return None,
        })
    }
}

struct Point {
    x: f64,
    y: f64,
    err: f64,
    group: String,
}

fn read_points(csv_path: &Path, spec: &PlotSpec) -> Result<Vec<Point>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(csv_path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("{} has no column {name:?}", csv_path.display())))
    };
    let xi = col(&spec.x)?;
    let yi = col(&spec.y)?;
    let ei = spec.error.as_deref().map(col).transpose()?;
    let gi = spec.group.as_deref().map(col).transpose()?;
    let num = |s: &str, name: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Schema(format!("column {name:?} has non-numeric value {s:?}")))
    };
    let mut out = vec![];
    for rec in rdr.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).unwrap_or("");
        out.push(Point {
            x: num(get(xi), &spec.x)?,
            y: num(get(yi), &spec.y)?,
            err: match ei {
                Some(i) if !get(i).is_empty() => num(get(i), "error")?,
                _ => 0.0,
            },
            group: gi.map(|i| get(i).to_string()).unwrap_or_default(),
        });
    }
    if out.is_empty() {
        return Err(Error::Schema(format!("{} has no data rows", csv_path.display())));
    }
    Ok(out)
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = vec![];
    while t <= hi + 1e-9 * span {
        out.push(t);
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Render `csv_path` as an SVG chart next to it (same stem, `.svg`).
pub fn emit_plot(csv_path: &Path, spec: &PlotSpec) -> Result<PathBuf> {
    let pts = read_points(csv_path, spec)?;
    let svg = render(&pts, spec);
    let out = csv_path.with_extension("svg");
    fs::write(&out, svg)?;
    Ok(out)
}

fn render(pts: &[Point], spec: &PlotSpec) -> String {
    let bar = spec.kind == PlotKind::Bar;
    let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.x), b.max(p.x)));
    if bar {
        x0 -= 0.5;
        x1 += 0.5;
    } else if x1 == x0 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let reference = |d: f64| {
        let m = (d - 1.0).max(0.0);
        (m.sqrt() / 2.0, (m / 2.0).sqrt())
    };
    let mut y1 = pts.iter().map(|p| p.y + p.err).fold(0.0, f64::max);
    if spec.references {
        y1 = y1.max(reference(x1).1);
    }
    let y0 = pts.iter().map(|p| p.y - p.err).fold(0.0, f64::min);
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    y1 *= 1.05;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let sy = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, spec.title);
    // axes
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT} {TOP}V{}H{}" fill="none" stroke="black"/>"#,
        H - BOTTOM,
        W - RIGHT
    );
    for t in nice_ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, fmt_tick(t));
    }
    let xticks = if bar { pts.iter().map(|p| p.x).collect() } else { nice_ticks(x0, x1) };
    for t in xticks {
        let x = sx(t);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, H - BOTTOM, H - BOTTOM + 4.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, H - BOTTOM + 17.0, fmt_tick(t));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (LEFT + W - RIGHT) / 2.0, H - 8.0, spec.x);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0,
        spec.y
    );

    let mut groups: Vec<&str> = vec![];
    for p in pts {
        if !groups.contains(&p.group.as_str()) {
            groups.push(&p.group);
        }
    }
    for (gi, g) in groups.iter().enumerate() {
        let color = COLORS[gi % COLORS.len()];
        let series: Vec<&Point> = pts.iter().filter(|p| p.group == *g).collect();
        if bar {
            let half = 0.35 * (sx(1.0) - sx(0.0));
            for p in &series {
                let (top, base) = (sy(p.y.max(0.0)), sy(p.y.min(0.0)));
                let _ = writeln!(
                    s,
                    r#"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                    sx(p.x) - half,
                    2.0 * half,
                    base - top
                );
            }
        } else {
            let path: Vec<String> = series.iter().map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.y))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, path.join(" "));
            for p in &series {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(p.x), sy(p.y));
            }
        }
        for p in series.iter().filter(|p| p.err > 0.0) {
            let x = sx(p.x);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
                sy(p.y - p.err),
                sy(p.y + p.err)
            );
        }
        if !g.is_empty() {
            let y = TOP + 14.0 * gi as f64;
            let _ = writeln!(s, r#"<text x="{}" y="{y}" fill="{color}">{g}</text>"#, LEFT + 10.0);
        }
    }

    if spec.references {
        let lo = x0.max(1.0);
        let steps = 100;
        for (which, label, dash) in [(0, "sqrt(d-1)/2", "6 3"), (1, "sqrt((d-1)/2)", "2 3")] {
            let pts: Vec<String> = (0..=steps)
                .map(|i| {
                    let d = lo + (x1 - lo) * i as f64 / steps as f64;
                    let (a, b) = reference(d);
                    format!("{:.2},{:.2}", sx(d), sy(if which == 0 { a } else { b }))
                })
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="gray" stroke-dasharray="{dash}"/>"#,
                pts.join(" ")
            );
            let (a, b) = reference(x1);
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="gray">{label}</text>"#,
                W - RIGHT - 4.0,
                sy(if which == 0 { a } else { b }) - 4.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn bar_and_line_charts() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "distribution.csv", "# c\nm,p_m_empirical,se\n0,0.4,0.01\n1,0.5,0.01\n2,0.1,0.005\n");
        let svg = fs::read_to_string(emit_plot(&p, &PlotSpec::for_command(Command::Distribution).unwrap()).unwrap()).unwrap();
        assert_eq!(svg.matches("<rect x=").count(), 3);
        let p = write(
            dir.path(),
            "universality.csv",
            "d,dist,samples,mean_equilibria,se_equilibria\n5,gaussian,10,1.0,0.1\n9,gaussian,10,1.4,0.1\n5,uniform,10,1.1,0.1\n9,uniform,10,1.5,0.1\n",
        );
        let out = emit_plot(&p, &PlotSpec::for_command(Command::Universality).unwrap()).unwrap();
        let svg = fs::read_to_string(out).unwrap();
        // two data series plus two reference curves
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains("sqrt((d-1)/2)"));
    }

    #[test]
    fn schema_errors() {
        let dir = tempfile::tempdir().unwrap();
        let spec = PlotSpec::for_command(Command::Distribution).unwrap();
        let p = write(dir.path(), "empty.csv", "# only comments\nm,p_m_empirical,se\n");
        assert!(matches!(emit_plot(&p, &spec), Err(Error::Schema(_))));
        let p = write(dir.path(), "wrong.csv", "a,b\n1,2\n");
        assert!(matches!(emit_plot(&p, &spec), Err(Error::Schema(_))));
        let p = write(dir.path(), "text.csv", "m,p_m_empirical,se\nx,0.1,0.1\n");
        assert!(matches!(emit_plot(&p, &spec), Err(Error::Schema(_))));
        assert!(PlotSpec::for_command(Command::SampleGame).is_none());
    }
}
