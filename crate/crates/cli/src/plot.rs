//! Static SVG line plots of the CSV tables.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::CliError;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 590.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 420.0;
const LEGEND_ROWS: usize = 18;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub y: String,
    /// One series per distinct value of this column.
    pub group: String,
    pub log_x: bool,
    pub log_y: bool,
}

impl PlotSpec {
    fn new(x: &str, y: &str, group: &str, log_x: bool, log_y: bool) -> Self {
        Self { x: x.into(), y: y.into(), group: group.into(), log_x, log_y }
    }

    /// The presentation used for each kind of table.
    pub fn for_kind(kind: &str) -> Option<Self> {
        Some(match kind {
            "locality" => Self::new("LBC", "one_minus_F", "T", false, true),
            "profile" => Self::new("T", "one_minus_F", "LBC", false, true),
            "phase" => Self::new("T", "N0_over_N", "L", false, false),
            "correlations" => Self::new("d", "C", "T", true, true),
            "subsystems" => Self::new("T", "one_minus_F", "shape", false, true),
            _ => return None,
        })
    }
}

/// Kind named on the schema line, e.g. `# loctemp locality rows schema v1`.
fn read_kind(path: &Path) -> Result<String, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut first = String::new();
    BufReader::new(file).read_line(&mut first).map_err(|e| CliError::io(path, e))?;
    let words: Vec<&str> = first.split_whitespace().collect();
    match words.as_slice() {
        ["#", "loctemp", kind, "rows", ..] => Ok(kind.to_string()),
        ["#", "loctemp", kind, table, ..] => Err(CliError::Config(format!(
            "{}: cannot plot the {table} table of `{kind}`",
            path.display()
        ))),
        _ => Err(CliError::Config(format!("{}: missing loctemp schema line", path.display()))),
    }
}

type Series = Vec<(String, Vec<(f64, f64)>)>;

fn read_series(path: &Path, spec: &PlotSpec) -> Result<Series, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::csv(path, e))?;
    let headers = rdr.headers().map_err(|e| CliError::csv(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("{}: no column `{name}`", path.display())))
    };
    let (xi, yi, gi) = (col(&spec.x)?, col(&spec.y)?, col(&spec.group)?);
    let mut series: Series = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        let num = |i: usize| -> Result<f64, CliError> {
            rec[i].parse().map_err(|_| {
                CliError::Config(format!("{}: `{}` is not a number", path.display(), &rec[i]))
            })
        };
        let (x, y) = (num(xi)?, num(yi)?);
        let g = rec[gi].to_string();
        match series.iter_mut().find(|s| s.0 == g) {
            Some(s) => s.1.push((x, y)),
            None => series.push((g, vec![(x, y)])),
        }
    }
    series.sort_by(|a, b| match (a.0.parse::<f64>(), b.0.parse::<f64>()) {
        (Ok(p), Ok(q)) => p.total_cmp(&q),
        _ => a.0.cmp(&b.0),
    });
    for s in &mut series {
        s.1.sort_by(|p, q| p.0.total_cmp(&q.0));
    }
    Ok(series)
}

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
    ticks: Vec<f64>,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let vals: Vec<f64> = values
            .filter(|v| v.is_finite() && (!log || *v > 0.0))
            .map(|v| if log { v.log10() } else { v })
            .collect();
        let (mut lo, mut hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
        if vals.is_empty() {
            (lo, hi) = if log { (-1.0, 0.0) } else { (0.0, 1.0) };
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        if log {
            let (lo, hi) = (lo.floor(), hi.ceil());
            let stride = ((hi - lo) / 8.0).ceil().max(1.0);
            let ticks = (0..).map(|k| lo + k as f64 * stride).take_while(|&t| t <= hi).collect();
            Axis { log, lo, hi, ticks }
        } else {
            let raw = (hi - lo) / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap();
            let (lo, hi) = ((lo / step).floor() * step, (hi / step).ceil() * step);
            let n = ((hi - lo) / step).round() as usize;
            let ticks = (0..=n).map(|k| lo + k as f64 * step).collect();
            Axis { log, lo, hi, ticks }
        }
    }

    /// Maps a data value to `[0, 1]`, or `None` when it cannot be drawn.
    fn unit(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v > 0.0 {
                v.log10()
            } else {
                return None;
            }
        } else {
            v
        };
        v.is_finite().then(|| (v - self.lo) / (self.hi - self.lo))
    }

    /// Position of a tick, already in axis units.
    fn unit_raw(&self, t: f64) -> f64 {
        (t - self.lo) / (self.hi - self.lo)
    }

    fn label(&self, t: f64) -> String {
        if self.log {
            format!("1e{}", t as i64)
        } else {
            let s = format!("{:.6}", t);
            let s = s.trim_end_matches('0').trim_end_matches('.');
            if s == "-0" { "0".into() } else { s.into() }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the series of `csv_path` to `svg_path`. `spec` defaults to the
/// presentation of the table's kind.
pub fn render_plot(csv_path: &Path, svg_path: &Path, spec: Option<PlotSpec>) -> Result<(), CliError> {
    let kind = read_kind(csv_path)?;
    let spec = match spec {
        Some(s) => s,
        None => PlotSpec::for_kind(&kind)
            .ok_or_else(|| CliError::Config(format!("unknown table kind `{kind}`")))?,
    };
    let series = read_series(csv_path, &spec)?;
    let svg = draw(&kind, &spec, &series);
    fs::write(svg_path, svg).map_err(|e| CliError::io(svg_path, e))
}

fn draw(kind: &str, spec: &PlotSpec, series: &Series) -> String {
    let xa = Axis::new(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)), spec.log_x);
    let ya = Axis::new(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)), spec.log_y);
    let px = |u: f64| LEFT + u * (RIGHT - LEFT);
    let py = |u: f64| BOTTOM - u * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(&format!("{kind}: {} vs {}", spec.y, spec.x))
    );
    for &t in &xa.ticks {
        let x = px(xa.unit_raw(t));
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{BOTTOM}" stroke="#e5e5e5"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            BOTTOM + 16.0,
            xa.label(t)
        );
    }
    for &t in &ya.ticks {
        let y = py(ya.unit_raw(t));
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#e5e5e5"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            ya.label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let scale = |log: bool| if log { " (log)" } else { "" };
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0,
        escape(&format!("{}{}", spec.x, scale(spec.log_x)))
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0,
        escape(&format!("{}{}", spec.y, scale(spec.log_y)))
    );

    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .filter_map(|&(x, y)| Some(format!("{:.2},{:.2}", px(xa.unit(x)?), py(ya.unit(y)?))))
            .collect();
        if !coords.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        if i < LEGEND_ROWS {
            let y = TOP + 8.0 + 20.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/>"#,
                RIGHT + 12.0,
                RIGHT + 32.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
                RIGHT + 38.0,
                y + 4.0,
                escape(&format!("{}={}", spec.group, short(name)))
            );
        } else if i == LEGEND_ROWS {
            let y = TOP + 8.0 + 20.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}">+{} more</text>"#,
                RIGHT + 12.0,
                y + 4.0,
                series.len() - LEGEND_ROWS
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Compact legend text for values written in full precision.
fn short(v: &str) -> String {
    match v.parse::<f64>() {
        Ok(x) if v.contains('e') => format!("{}", (x * 1e6).round() / 1e6),
        _ => v.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decade_ticks() {
        let a = Axis::new([1e-12, 3e-3].into_iter(), true);
        assert_eq!((a.lo, a.hi), (-12.0, -2.0));
        assert_eq!(a.ticks.first(), Some(&-12.0));
        assert_eq!(a.label(-3.0), "1e-3");
        assert_eq!(a.unit(-1.0), None);
    }

    #[test]
    fn linear_ticks_are_round() {
        let a = Axis::new([0.3, 7.9].into_iter(), false);
        assert_eq!(a.ticks, vec![0.0, 2.0, 4.0, 6.0, 8.0]);
        assert_eq!(a.label(2.0), "2");
    }

    #[test]
    fn every_kind_has_a_presentation() {
        for k in ["locality", "profile", "phase", "correlations", "subsystems"] {
            assert!(PlotSpec::for_kind(k).is_some());
        }
        assert!(PlotSpec::for_kind("weather").is_none());
        assert!(PlotSpec::for_kind("locality").unwrap().log_y);
    }
}
