use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{canonical_level_order, MachineModel, RooflineSample};
use crate::scalar::Scalar;

pub const CANVAS_WIDTH: f64 = 800.0;
pub const CANVAS_HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 640.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 540.0;
const MARKER_RADIUS: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkerShape {
    Circle,
    Square,
    Triangle,
    Diamond,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkerStyle {
    pub shape: MarkerShape,
    pub color: String,
}

impl MarkerStyle {
    fn new(shape: MarkerShape, color: &str) -> Self {
        MarkerStyle {
            shape,
            color: color.to_string(),
        }
    }

    /// Style for well-known level names; other names cycle through a palette
    /// by their position among the chart's unstyled levels.
    fn default_for(level: &str, fallback_index: usize) -> Self {
        match level.to_ascii_uppercase().as_str() {
            "L1" => MarkerStyle::new(MarkerShape::Circle, "#d62728"),
            "L2" => MarkerStyle::new(MarkerShape::Square, "#2ca02c"),
            "L3" | "LLC" => MarkerStyle::new(MarkerShape::Square, "#9467bd"),
            "HBM" | "MCDRAM" => MarkerStyle::new(MarkerShape::Triangle, "#1f77b4"),
            "DDR" | "DRAM" => MarkerStyle::new(MarkerShape::Diamond, "#ff7f0e"),
            _ => {
                const PALETTE: [&str; 4] = ["#8c564b", "#e377c2", "#7f7f7f", "#17becf"];
                const SHAPES: [MarkerShape; 4] = [
                    MarkerShape::Circle,
                    MarkerShape::Square,
                    MarkerShape::Triangle,
                    MarkerShape::Diamond,
                ];
                MarkerStyle::new(SHAPES[fallback_index % 4], PALETTE[fallback_index % 4])
            }
        }
    }
}

/// Everything one chart needs. Axis ranges left `None` are derived from the
/// samples: x spans `[min AI / 4, max AI × 4]`, y spans
/// `[min(min GFLOP/s, slowest roof at x-min) / 4, peak × 2]`.
#[derive(Clone, Debug)]
pub struct ChartSpec<T> {
    pub title: String,
    pub x_range: Option<(T, T)>,
    pub y_range: Option<(T, T)>,
    pub machine: Option<MachineModel<T>>,
    pub samples: Vec<RooflineSample<T>>,
    /// Level name → style; levels without an entry get defaults.
    pub styles: BTreeMap<String, MarkerStyle>,
}

impl<T: Scalar> ChartSpec<T> {
    pub fn new(title: impl Into<String>, machine: Option<MachineModel<T>>, samples: Vec<RooflineSample<T>>) -> Self {
        ChartSpec {
            title: title.into(),
            x_range: None,
            y_range: None,
            machine,
            samples,
            styles: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CeilingSegment {
    pub label: String,
    pub compute: bool,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkerPoint {
    pub text: String,
    pub level: String,
    pub cx: f64,
    pub cy: f64,
    pub ai: f64,
    pub gflops: f64,
    pub style: MarkerStyle,
}

/// Resolved chart in canvas units (origin top-left, y down).
#[derive(Clone, Debug, PartialEq)]
pub struct ChartGeometry {
    pub title: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub ceilings: Vec<CeilingSegment>,
    pub markers: Vec<MarkerPoint>,
    /// Level names in legend order.
    pub legend: Vec<(String, MarkerStyle)>,
}

impl ChartGeometry {
    pub fn x_to_canvas(&self, ai: f64) -> f64 {
        let (lo, hi) = (self.x_range.0.log10(), self.x_range.1.log10());
        LEFT + (ai.log10() - lo) / (hi - lo) * (RIGHT - LEFT)
    }

    pub fn y_to_canvas(&self, gflops: f64) -> f64 {
        let (lo, hi) = (self.y_range.0.log10(), self.y_range.1.log10());
        BOTTOM - (gflops.log10() - lo) / (hi - lo) * (BOTTOM - TOP)
    }

    pub fn canvas_to_x(&self, px: f64) -> f64 {
        let (lo, hi) = (self.x_range.0.log10(), self.x_range.1.log10());
        10f64.powf(lo + (px - LEFT) / (RIGHT - LEFT) * (hi - lo))
    }

    pub fn canvas_to_y(&self, py: f64) -> f64 {
        let (lo, hi) = (self.y_range.0.log10(), self.y_range.1.log10());
        10f64.powf(lo + (BOTTOM - py) / (BOTTOM - TOP) * (hi - lo))
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::Report(format!("{name} range must satisfy 0 < min < max, got [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}

/// Resolves ranges, ceiling segments and marker positions.
pub fn layout_chart<T: Scalar>(spec: &ChartSpec<T>) -> Result<ChartGeometry> {
    let machine = spec.machine.as_ref().map(|m| m.cast::<f64>());
    let plotted: Vec<(&RooflineSample<T>, f64, f64)> = spec
        .samples
        .iter()
        .filter_map(|s| s.gflops.map(|g| (s, s.ai.as_f64(), g.as_f64())))
        .filter(|(_, ai, g)| *ai > 0.0 && *g > 0.0 && ai.is_finite() && g.is_finite())
        .collect();
    if plotted.is_empty() && machine.is_none() {
        return Err(Error::Report("nothing to draw: no plottable samples and no ceilings".into()));
    }

    let bws: Vec<(String, f64)> = machine
        .iter()
        .flat_map(|m| m.bandwidth_ceilings().map(|c| (c.label.clone(), c.value)).collect::<Vec<_>>())
        .collect();
    let computes: Vec<(String, f64)> = machine
        .iter()
        .flat_map(|m| m.compute_ceilings().map(|c| (c.label.clone(), c.value)).collect::<Vec<_>>())
        .collect();
    let peak = computes.iter().map(|c| c.1).fold(0.0, f64::max);
    let max_bw = bws.iter().map(|b| b.1).fold(0.0, f64::max);
    let min_bw = bws.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);

    let x_range = match spec.x_range {
        Some((lo, hi)) => (lo.as_f64(), hi.as_f64()),
        None if !plotted.is_empty() => {
            let lo = plotted.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let hi = plotted.iter().map(|p| p.1).fold(0.0, f64::max);
            (lo / 4.0, hi * 4.0)
        }
        None => {
            let lo = bws.iter().map(|b| peak / b.1).fold(f64::INFINITY, f64::min);
            let hi = bws.iter().map(|b| peak / b.1).fold(0.0, f64::max);
            (lo / 16.0, hi * 16.0)
        }
    };
    let x_range = check_range("x", x_range)?;

    let y_range = match spec.y_range {
        Some((lo, hi)) => (lo.as_f64(), hi.as_f64()),
        None => {
            let min_g = plotted.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
            let roof_at_xmin = if bws.is_empty() { f64::INFINITY } else { min_bw * x_range.0 };
            let top = if machine.is_some() {
                peak
            } else {
                plotted.iter().map(|p| p.2).fold(0.0, f64::max)
            };
            (min_g.min(roof_at_xmin) / 4.0, top * 2.0)
        }
    };
    let y_range = check_range("y", y_range)?;

    let mut geo = ChartGeometry {
        title: spec.title.clone(),
        x_range,
        y_range,
        ceilings: Vec::new(),
        markers: Vec::new(),
        legend: Vec::new(),
    };

    for (label, bw) in &bws {
        let start = x_range.0.max(y_range.0 / bw);
        let end = (peak / bw).min(x_range.1);
        if end > start {
            geo.ceilings.push(CeilingSegment {
                label: label.clone(),
                compute: false,
                x0: geo.x_to_canvas(start),
                y0: geo.y_to_canvas(bw * start),
                x1: geo.x_to_canvas(end),
                y1: geo.y_to_canvas(bw * end),
            });
        }
    }
    for (label, gflops) in &computes {
        let start = x_range.0.max(gflops / max_bw);
        if start < x_range.1 && *gflops >= y_range.0 && *gflops <= y_range.1 {
            geo.ceilings.push(CeilingSegment {
                label: label.clone(),
                compute: true,
                x0: geo.x_to_canvas(start),
                y0: geo.y_to_canvas(*gflops),
                x1: geo.x_to_canvas(x_range.1),
                y1: geo.y_to_canvas(*gflops),
            });
        }
    }

    let mut levels: Vec<String> = plotted.iter().map(|p| p.0.level.name.clone()).collect();
    levels.sort_by(|a, b| canonical_level_order(a, b));
    levels.dedup();
    let mut fallback = 0;
    for level in &levels {
        let style = match spec.styles.get(level) {
            Some(s) => s.clone(),
            None => {
                let s = MarkerStyle::default_for(level, fallback);
                if !crate::model::is_known_level(level) {
                    fallback += 1;
                }
                s
            }
        };
        geo.legend.push((level.clone(), style));
    }

    let multi = {
        let mut labels: Vec<&str> = plotted.iter().map(|p| p.0.label.as_str()).collect();
        labels.dedup();
        labels.len() > 1
    };
    for (sample, ai, gflops) in &plotted {
        let style = geo
            .legend
            .iter()
            .find(|(l, _)| *l == sample.level.name)
            .map(|(_, s)| s.clone())
            .expect("every plotted level has a legend entry");
        let mut text = sample.level.name.clone();
        if multi {
            text = format!("{} {}", sample.label, text);
        }
        if let Some(p) = sample.precision {
            if spec.samples.iter().any(|s| s.precision != sample.precision) {
                text = format!("{text} {p}");
            }
        }
        geo.markers.push(MarkerPoint {
            text,
            level: sample.level.name.clone(),
            cx: geo.x_to_canvas(*ai),
            cy: geo.y_to_canvas(*gflops),
            ai: *ai,
            gflops: *gflops,
            style,
        });
    }
    Ok(geo)
}

/// Renders a log-log Roofline chart as a self-contained SVG 1.1 document.
/// Output depends only on `spec`, so identical specs give identical bytes.
pub fn render_chart<T: Scalar>(spec: &ChartSpec<T>) -> Result<String> {
    let geo = layout_chart(spec)?;
    Ok(to_svg(&geo))
}

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn decade_label(e: i32) -> String {
    if (0..=4).contains(&e) {
        format!("{}", 10u64.pow(e as u32))
    } else if (-3..0).contains(&e) {
        format!("{}", 10f64.powi(e))
    } else {
        format!("1e{e}")
    }
}

fn shape_svg(shape: MarkerShape, color: &str, class: &str, x: f64, y: f64) -> String {
    let r = MARKER_RADIUS;
    let body = match shape {
        MarkerShape::Circle => format!(r#"<circle r="{}" fill="{color}"/>"#, num(r)),
        MarkerShape::Square => format!(
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{color}"/>"#,
            num(-r),
            num(-r),
            num(2.0 * r),
            num(2.0 * r)
        ),
        MarkerShape::Triangle => format!(
            r#"<polygon points="0,{} {},{} {},{}" fill="{color}"/>"#,
            num(-r),
            num(r),
            num(r),
            num(-r),
            num(r)
        ),
        MarkerShape::Diamond => format!(
            r#"<polygon points="0,{} {},0 0,{} {},0" fill="{color}"/>"#,
            num(-r),
            num(r),
            num(r),
            num(-r)
        ),
    };
    format!(r#"<g class="{class}" transform="translate({},{})">{body}"#, num(x), num(y))
}

fn to_svg(geo: &ChartGeometry) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = CANVAS_WIDTH,
        h = CANVAS_HEIGHT
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text class="title" x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#,
        num((LEFT + RIGHT) / 2.0),
        escape(&geo.title)
    );
    let _ = writeln!(
        s,
        r#"<g class="plot-area" data-x-min="{}" data-x-max="{}" data-y-min="{}" data-y-max="{}" data-left="{LEFT}" data-right="{RIGHT}" data-top="{TOP}" data-bottom="{BOTTOM}">"#,
        geo.x_range.0, geo.x_range.1, geo.y_range.0, geo.y_range.1
    );

    let (xlo, xhi) = (geo.x_range.0.log10(), geo.x_range.1.log10());
    for e in (xlo.ceil() as i32)..=(xhi.floor() as i32) {
        let x = geo.x_to_canvas(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line class="grid" x1="{x}" y1="{TOP}" x2="{x}" y2="{BOTTOM}" stroke="#dddddd"/><text class="tick" x="{x}" y="{}" text-anchor="middle">{}</text>"##,
            num(BOTTOM + 18.0),
            decade_label(e),
            x = num(x)
        );
    }
    let (ylo, yhi) = (geo.y_range.0.log10(), geo.y_range.1.log10());
    for e in (ylo.ceil() as i32)..=(yhi.floor() as i32) {
        let y = geo.y_to_canvas(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line class="grid" x1="{LEFT}" y1="{y}" x2="{RIGHT}" y2="{y}" stroke="#dddddd"/><text class="tick" x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{}</text>"##,
            num(LEFT - 6.0),
            decade_label(e),
            y = num(y)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect class="axis" x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        num(RIGHT - LEFT),
        num(BOTTOM - TOP)
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">Arithmetic Intensity (FLOPs/Byte)</text>"#,
        num((LEFT + RIGHT) / 2.0),
        num(BOTTOM + 40.0)
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">Performance (GFLOP/s)</text>"#,
        y = num((TOP + BOTTOM) / 2.0)
    );

    for c in &geo.ceilings {
        let kind = if c.compute { "compute" } else { "bandwidth" };
        let _ = writeln!(
            s,
            r##"<path class="ceiling {kind}" d="M {} {} L {} {}" stroke="#333333" stroke-width="1.5" fill="none"/>"##,
            num(c.x0),
            num(c.y0),
            num(c.x1),
            num(c.y1)
        );
        let (lx, ly) = if c.compute { (c.x1 - 4.0, c.y1 - 6.0) } else { (c.x0 + 6.0, c.y0 - 6.0) };
        let anchor = if c.compute { "end" } else { "start" };
        let _ = writeln!(
            s,
            r#"<text class="ceiling-label" x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            num(lx),
            num(ly),
            escape(&c.label)
        );
    }

    for m in &geo.markers {
        let _ = writeln!(
            s,
            r#"{}<text x="8" y="-8">{}</text></g>"#,
            shape_svg(m.style.shape, &m.style.color, "marker", m.cx, m.cy).replacen(
                r#"class="marker""#,
                &format!(r#"class="marker" data-level="{}""#, escape(&m.level)),
                1
            ),
            escape(&m.text)
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, (level, style)) in geo.legend.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"{}</g><text x="{}" y="{}" dominant-baseline="middle">{}</text>"#,
            shape_svg(style.shape, &style.color, "legend-marker", RIGHT + 25.0, y),
            num(RIGHT + 38.0),
            num(y),
            escape(level)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}
