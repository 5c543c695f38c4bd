//! Sweep results and their CSV / JSON / SVG renderings.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Minimum `R²` for a slope-based verdict.
pub const MIN_R_SQUARED: f64 = 0.99;
/// Slopes at most this large in magnitude count as scale invariant.
pub const FLAT_SLOPE: f64 = 0.02;
/// Slopes at least this large in magnitude count as growth; also the
/// tolerance when matching a predicted slope.
pub const GROWTH_SLOPE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVerdict {
    Bounded,
    Blowup,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub coords: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl SweepPoint {
    pub fn new(coords: Vec<f64>, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
        Self {
            coords,
            lhs,
            rhs,
            ratio,
        }
    }
}

/// How the sweep coordinate is laid out on plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisScale {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub label: String,
    pub version: String,
    pub config_hash: Option<String>,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub coord_names: Vec<String>,
    pub axis_scale: AxisScale,
    pub points: Vec<SweepPoint>,
    pub fitted_slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    pub predicted_slope: Option<f64>,
    pub max_ratio: f64,
    /// `|max_refined / max_base − 1|` for sweeps repeated on a refined grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement_change: Option<f64>,
    pub verdict: SweepVerdict,
    pub notes: Vec<String>,
}

impl SweepReport {
    pub fn new(
        label: impl Into<String>,
        params: serde_json::Value,
        coord_names: Vec<String>,
        axis_scale: AxisScale,
        points: Vec<SweepPoint>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData("sweep has no points".into()));
        }
        let max_ratio = points
            .iter()
            .map(|p| p.ratio)
            .filter(|r| !r.is_nan())
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            label: label.into(),
            version: VERSION.to_string(),
            config_hash: None,
            params,
            seed: None,
            coord_names,
            axis_scale,
            points,
            fitted_slope: None,
            intercept: None,
            r_squared: None,
            predicted_slope: None,
            max_ratio,
            refinement_change: None,
            verdict: SweepVerdict::Inconclusive,
            notes: Vec::new(),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ratio).collect()
    }

    /// Fits `ln ratio` against `ln x`, `x` being [`Self::abscissa`].
    pub fn fit_log_log(&mut self) -> Result<LinearFit> {
        let mut xs = Vec::with_capacity(self.points.len());
        let mut ys = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if !(p.ratio > 0.0 && p.ratio.is_finite()) {
                return Err(Error::UndefinedRatio(format!(
                    "ratio {} at {:?} has no logarithm",
                    p.ratio, p.coords
                )));
            }
            xs.push(self.abscissa(p).ln());
            ys.push(p.ratio.ln());
        }
        let fit = linear_fit(&xs, &ys)?;
        self.fitted_slope = Some(fit.slope);
        self.intercept = Some(fit.intercept);
        self.r_squared = Some(fit.r_squared);
        Ok(fit)
    }

    /// Scalar coordinate used for fitting and plotting.
    pub fn abscissa(&self, p: &SweepPoint) -> f64 {
        match self.axis_scale {
            AxisScale::Linear => p.coords[0],
            AxisScale::Log => {
                // For anisotropic sweeps only one entry moves; use it.
                let moving: Vec<f64> = p
                    .coords
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| {
                        self.points
                            .iter()
                            .any(|q| q.coords[*i] != self.points[0].coords[*i])
                    })
                    .map(|(_, c)| *c)
                    .collect();
                moving.first().copied().unwrap_or(p.coords[0])
            }
        }
    }

    /// Slope verdict: flat ⇒ bounded, significant and (if predicted) matching
    /// ⇒ blowup, otherwise inconclusive. Requires a prior fit.
    pub fn classify_slope(&mut self) {
        let (Some(slope), Some(r2)) = (self.fitted_slope, self.r_squared) else {
            self.verdict = SweepVerdict::Inconclusive;
            return;
        };
        self.verdict = if r2 < MIN_R_SQUARED {
            SweepVerdict::Inconclusive
        } else if slope.abs() <= FLAT_SLOPE {
            SweepVerdict::Bounded
        } else if slope.abs() >= GROWTH_SLOPE
            && self
                .predicted_slope
                .is_none_or(|d| (slope - d).abs() <= GROWTH_SLOPE)
        {
            SweepVerdict::Blowup
        } else {
            SweepVerdict::Inconclusive
        };
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV with coordinate columns followed by `lhs,rhs,ratio`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = self.coord_names.clone();
        header.extend(["lhs", "rhs", "ratio"].map(String::from));
        out.write_record(&header)?;
        for p in &self.points {
            let mut row: Vec<String> = p.coords.iter().map(|c| format_number(*c)).collect();
            row.extend([p.lhs, p.rhs, p.ratio].map(format_number));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `<stem>.json`, `<stem>.csv` and `<stem>.svg` into `dir`.
    pub fn write_all(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{stem}.json")), self.to_json()? + "\n")?;
        let file = std::fs::File::create(dir.join(format!("{stem}.csv")))?;
        self.write_csv(std::io::BufWriter::new(file))?;
        std::fs::write(dir.join(format!("{stem}.svg")), self.to_svg())?;
        Ok(())
    }

    pub fn to_svg(&self) -> String {
        let x_label = match self.axis_scale {
            AxisScale::Log => format!("log10 {}", self.coord_names.first().map_or("x", |s| s)),
            AxisScale::Linear => self.coord_names.first().cloned().unwrap_or_default(),
        };
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.ratio > 0.0 && p.ratio.is_finite())
            .map(|p| {
                let x = self.abscissa(p);
                let x = match self.axis_scale {
                    AxisScale::Log => x.log10(),
                    AxisScale::Linear => x,
                };
                (x, p.ratio.log10())
            })
            .collect();
        let line = match (self.fitted_slope, self.intercept, self.axis_scale) {
            (Some(m), Some(b), AxisScale::Log) => Some((m, b / std::f64::consts::LN_10)),
            _ => None,
        };
        let mut caption = format!("{}  (v{}", self.label, self.version);
        if let Some(h) = &self.config_hash {
            let _ = write!(caption, ", config {}", &h[..h.len().min(12)]);
        }
        caption.push(')');
        let annotation = match (self.fitted_slope, self.r_squared) {
            (Some(m), Some(r2)) => format!(
                "slope {m:.4}  R² {r2:.4}  verdict {}",
                verdict_name(self.verdict)
            ),
            _ => format!("verdict {}", verdict_name(self.verdict)),
        };
        svg_plot(&caption, &annotation, &x_label, "log10 ratio", &pts, line)
    }
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn verdict_name(v: SweepVerdict) -> &'static str {
    match v {
        SweepVerdict::Bounded => "bounded",
        SweepVerdict::Blowup => "blowup",
        SweepVerdict::Inconclusive => "inconclusive",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Scatter plot with an optional fitted line `y = m·x + b`.
pub fn svg_plot(
    title: &str,
    annotation: &str,
    x_label: &str,
    y_label: &str,
    pts: &[(f64, f64)],
    line: Option<(f64, f64)>,
) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const L: f64 = 70.0;
    const R: f64 = 20.0;
    const T: f64 = 50.0;
    const B: f64 = 50.0;
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    let sx = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let sy = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{L}" y="20" font-family="monospace" font-size="13">{}</text>"#,
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<text x="{L}" y="38" font-family="monospace" font-size="12" fill="#444">{}</text>"##,
        escape(annotation)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{L} {T} V{:.2} H{:.2}" stroke="black" fill="none"/>"#,
        H - B,
        W - R
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="middle">{:.3}</text>"#,
            sx(fx),
            H - B + 15.0,
            fx
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="10" text-anchor="end">{:.3}</text>"#,
            L - 5.0,
            sy(fy) + 3.0,
            fy
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="middle">{}</text>"#,
        (L + W - R) / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-family="monospace" font-size="11" transform="rotate(-90 14 {:.2})" text-anchor="middle">{}</text>"#,
        (T + H - B) / 2.0,
        (T + H - B) / 2.0,
        escape(y_label)
    );
    if let Some((m, b)) = line {
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c33" stroke-dasharray="4 3"/>"##,
            sx(x0),
            sy(m * x0 + b),
            sx(x1),
            sy(m * x1 + b)
        );
    }
    for &(x, y) in pts {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#226"/>"##,
            sx(x),
            sy(y)
        );
    }
    s.push_str("</svg>\n");
    s
}
