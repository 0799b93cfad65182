//! Self-contained SVG reports from experiment CSVs: box plots (minimum,
//! interquartile range, maximum) and mean line plots of the BU/TD/CMP ratio
//! columns, grouped by n, ell, or t.

use crate::experiments::{ExperimentError, ResultRow, Subroutine, CSV_HEADER};
use crate::weight::{format_weight, parse_weight, Weight};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Box,
    Line,
}

impl PlotKind {
    pub fn parse(s: &str) -> Result<Self, ExperimentError> {
        match s {
            "box" => Ok(PlotKind::Box),
            "line" => Ok(PlotKind::Line),
            other => Err(ExperimentError::BadConfig(format!("unknown plot kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    N,
    Ell,
    Stretch,
}

impl GroupBy {
    pub fn parse(s: &str) -> Result<Self, ExperimentError> {
        match s {
            "n" => Ok(GroupBy::N),
            "ell" | "l" => Ok(GroupBy::Ell),
            "t" | "stretch" => Ok(GroupBy::Stretch),
            other => Err(ExperimentError::BadConfig(format!("unknown group key `{other}`"))),
        }
    }
}

/// (Q1, median, Q3) by linear interpolation over the sorted sample
/// (the numpy default); for {1,2,3,4,5} this gives (2, 3, 4).
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    assert!(!values.is_empty());
    let mut xs = values.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| -> f64 {
        let h = (xs.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
    };
    (q(0.25), q(0.5), q(0.75))
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, ExperimentError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(ExperimentError::CsvParse {
                line: 1,
                msg: "missing or mismatched header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let bad = |msg: &str| ExperimentError::CsvParse { line: lineno, msg: msg.into() };
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 18 {
            return Err(bad("expected 18 columns"));
        }
        let weight = |s: &str| parse_weight(s).map_err(|_| bad("bad rational"));
        let float =
            |s: &str| s.parse::<f64>().map_err(|_| bad("bad float"));
        let int = |s: &str| s.parse::<u128>().map_err(|_| bad("bad integer"));
        rows.push(ResultRow {
            generator: parts[0].to_string(),
            n: parts[1].parse().map_err(|_| bad("bad n"))?,
            ell: parts[2].parse().map_err(|_| bad("bad ell"))?,
            stretch: weight(parts[3])?,
            trial: parts[4].parse().map_err(|_| bad("bad trial"))?,
            seed: parts[5].parse().map_err(|_| bad("bad seed"))?,
            subroutine: Subroutine::parse(parts[6])?,
            cost_bu: weight(parts[7])?,
            cost_td: weight(parts[8])?,
            cost_cmp: weight(parts[9])?,
            baseline: weight(parts[10])?,
            ratio_bu: float(parts[11])?,
            ratio_td: float(parts[12])?,
            ratio_cmp: float(parts[13])?,
            ms_bu: int(parts[14])?,
            ms_td: int(parts[15])?,
            ms_cmp: int(parts[16])?,
            ms_baseline: int(parts[17])?,
        });
    }
    Ok(rows)
}

fn group_key(row: &ResultRow, by: GroupBy) -> (Weight, String) {
    match by {
        GroupBy::N => (Weight::from_integer(row.n as i128), row.n.to_string()),
        GroupBy::Ell => (Weight::from_integer(row.ell as i128), row.ell.to_string()),
        GroupBy::Stretch => (row.stretch, format_weight(&row.stretch)),
    }
}

const SERIES: [(&str, &str); 3] =
    [("BU", "#1f77b4"), ("TD", "#ff7f0e"), ("CMP", "#2ca02c")];

fn series_value(row: &ResultRow, idx: usize) -> f64 {
    match idx {
        0 => row.ratio_bu,
        1 => row.ratio_td,
        _ => row.ratio_cmp,
    }
}

struct Canvas {
    out: String,
}

impl Canvas {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 56.0;
    const RIGHT: f64 = 16.0;
    const TOP: f64 = 28.0;
    const BOTTOM: f64 = 44.0;

    fn new(title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
            Self::W,
            Self::H,
            Self::W,
            Self::H
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
            Self::W,
            Self::H
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="18" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            Self::W / 2.0,
            title
        );
        Canvas { out }
    }

    fn plot_width() -> f64 {
        Self::W - Self::LEFT - Self::RIGHT
    }

    fn plot_height() -> f64 {
        Self::H - Self::TOP - Self::BOTTOM
    }

    fn y_pos(&self, v: f64, lo: f64, hi: f64) -> f64 {
        let frac = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        Self::TOP + (1.0 - frac) * Self::plot_height()
    }

    fn axes(&mut self, lo: f64, hi: f64, x_labels: &[(f64, String)], x_title: &str, y_title: &str) {
        let x0 = Self::LEFT;
        let x1 = Self::W - Self::RIGHT;
        let y0 = Self::TOP;
        let y1 = Self::H - Self::BOTTOM;
        let _ = writeln!(
            self.out,
            r#"<line x1="{x0:.2}" y1="{y1:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="black" stroke-width="1"/>"#
        );
        let _ = writeln!(
            self.out,
            r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black" stroke-width="1"/>"#
        );
        for k in 0..=4 {
            let v = lo + (hi - lo) * k as f64 / 4.0;
            let y = self.y_pos(v, lo, hi);
            let _ = writeln!(
                self.out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black" stroke-width="1"/>"#,
                x0 - 4.0
            );
            let _ = writeln!(
                self.out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{:.3}</text>"#,
                x0 - 6.0,
                y + 3.0,
                v
            );
        }
        for (x, label) in x_labels {
            let _ = writeln!(
                self.out,
                r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
                y1 + 16.0
            );
        }
        let _ = writeln!(
            self.out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{x_title}</text>"#,
            (x0 + x1) / 2.0,
            Self::H - 10.0
        );
        let _ = writeln!(
            self.out,
            r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 14 {:.2})">{y_title}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0
        );
    }

    fn legend(&mut self) {
        let mut x = Self::LEFT + 8.0;
        let y = Self::TOP + 4.0;
        for (name, color) in SERIES {
            let _ = writeln!(
                self.out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="10" height="10" fill="{color}"/>"#
            );
            let _ = writeln!(
                self.out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10">{name}</text>"#,
                x + 13.0,
                y + 9.0
            );
            x += 52.0;
        }
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Renders the ratio columns of the rows. Box plots show minimum,
/// interquartile range (with the median line), and maximum per group and
/// series; line plots connect group means.
pub fn plot_svg(rows: &[ResultRow], kind: PlotKind, by: GroupBy) -> Result<String, ExperimentError> {
    if rows.is_empty() {
        return Err(ExperimentError::EmptyPlot);
    }
    let mut groups: Vec<(Weight, String)> = Vec::new();
    for r in rows {
        let key = group_key(r, by);
        if !groups.iter().any(|k| k.0 == key.0) {
            groups.push(key);
        }
    }
    groups.sort_by_key(|a| a.0);

    // Gather per-group, per-series samples.
    let mut samples: Vec<[Vec<f64>; 3]> = vec![Default::default(); groups.len()];
    for r in rows {
        let key = group_key(r, by);
        let gi = groups.iter().position(|k| k.0 == key.0).unwrap();
        for (s, bucket) in samples[gi].iter_mut().enumerate() {
            bucket.push(series_value(r, s));
        }
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for group in &samples {
        for series in group {
            for &v in series {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    let pad = ((hi - lo) * 0.08).max(0.02);
    let (lo, hi) = (lo - pad, hi + pad);

    let (x_title, y_title) = (
        match by {
            GroupBy::N => "n",
            GroupBy::Ell => "levels",
            GroupBy::Stretch => "stretch",
        },
        "ratio",
    );
    let title = match kind {
        PlotKind::Box => format!("BU/TD/CMP ratio by {x_title}"),
        PlotKind::Line => format!("mean BU/TD/CMP ratio by {x_title}"),
    };
    let mut canvas = Canvas::new(&title);

    let slot = Canvas::plot_width() / groups.len() as f64;
    let x_labels: Vec<(f64, String)> = groups
        .iter()
        .enumerate()
        .map(|(i, (_, label))| (Canvas::LEFT + slot * (i as f64 + 0.5), label.clone()))
        .collect();
    canvas.axes(lo, hi, &x_labels, x_title, y_title);

    match kind {
        PlotKind::Box => {
            let box_w = (slot / 4.2).min(26.0);
            for (gi, group) in samples.iter().enumerate() {
                let center = Canvas::LEFT + slot * (gi as f64 + 0.5);
                for (si, (_, color)) in SERIES.iter().enumerate() {
                    let xs = &group[si];
                    let (q1, med, q3) = quartiles(xs);
                    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
                    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let x = center + (si as f64 - 1.0) * (box_w + 6.0);
                    let (ymin, ymax) = (canvas.y_pos(min, lo, hi), canvas.y_pos(max, lo, hi));
                    let (yq1, yq3) = (canvas.y_pos(q1, lo, hi), canvas.y_pos(q3, lo, hi));
                    let ymed = canvas.y_pos(med, lo, hi);
                    let half = box_w / 2.0;
                    let _ = writeln!(
                        canvas.out,
                        r#"<line x1="{x:.2}" y1="{ymin:.2}" x2="{x:.2}" y2="{ymax:.2}" stroke="{color}" stroke-width="1"/>"#
                    );
                    for yy in [ymin, ymax] {
                        let _ = writeln!(
                            canvas.out,
                            r#"<line x1="{:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="{color}" stroke-width="1"/>"#,
                            x - half / 2.0,
                            x + half / 2.0
                        );
                    }
                    let _ = writeln!(
                        canvas.out,
                        r#"<rect x="{:.2}" y="{:.2}" width="{box_w:.2}" height="{:.2}" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"#,
                        x - half,
                        yq3,
                        (yq1 - yq3).max(0.5)
                    );
                    let _ = writeln!(
                        canvas.out,
                        r#"<line x1="{:.2}" y1="{ymed:.2}" x2="{:.2}" y2="{ymed:.2}" stroke="{color}" stroke-width="1.5"/>"#,
                        x - half,
                        x + half
                    );
                }
            }
        }
        PlotKind::Line => {
            for (si, (_, color)) in SERIES.iter().enumerate() {
                let mut points = Vec::new();
                for (gi, group) in samples.iter().enumerate() {
                    let xs = &group[si];
                    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
                    let x = Canvas::LEFT + slot * (gi as f64 + 0.5);
                    points.push((x, canvas.y_pos(mean, lo, hi)));
                }
                let path: Vec<String> =
                    points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    canvas.out,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    path.join(" ")
                );
                for (x, y) in points {
                    let _ = writeln!(
                        canvas.out,
                        r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#
                    );
                }
            }
        }
    }
    canvas.legend();
    Ok(canvas.finish())
}
