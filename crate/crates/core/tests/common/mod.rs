#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

pub struct DecodedChart {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub plot: (f64, f64, f64, f64),
    pub markers: Vec<(String, f64, f64)>,
}

fn attr(tag: &str, name: &str) -> f64 {
    let key = format!("{name}=\"");
    let start = tag.find(&key).unwrap() + key.len();
    let end = start + tag[start..].find('"').unwrap();
    tag[start..end].parse().unwrap()
}

/// Reads axis ranges and marker positions back out of rendered SVG and maps
/// the positions to data coordinates.
pub fn decode(svg: &str) -> DecodedChart {
    let plot_tag = svg.lines().find(|l| l.contains(r#"class="plot-area""#)).unwrap();
    let x_range = (attr(plot_tag, "data-x-min"), attr(plot_tag, "data-x-max"));
    let y_range = (attr(plot_tag, "data-y-min"), attr(plot_tag, "data-y-max"));
    let plot = (
        attr(plot_tag, "data-left"),
        attr(plot_tag, "data-right"),
        attr(plot_tag, "data-top"),
        attr(plot_tag, "data-bottom"),
    );
    let (left, right, top, bottom) = plot;
    let mut markers = Vec::new();
    for line in svg.lines().filter(|l| l.contains(r#"class="marker""#)) {
        let level_start = line.find("data-level=\"").unwrap() + 12;
        let level = &line[level_start..level_start + line[level_start..].find('"').unwrap()];
        let t = line.find("translate(").unwrap() + 10;
        let coords = &line[t..t + line[t..].find(')').unwrap()];
        let (px, py) = coords.split_once(',').unwrap();
        let (px, py): (f64, f64) = (px.parse().unwrap(), py.parse().unwrap());
        let lx = x_range.0.log10() + (px - left) / (right - left) * (x_range.1.log10() - x_range.0.log10());
        let ly = y_range.0.log10() + (bottom - py) / (bottom - top) * (y_range.1.log10() - y_range.0.log10());
        markers.push((level.to_string(), 10f64.powf(lx), 10f64.powf(ly)));
    }
    DecodedChart {
        x_range,
        y_range,
        plot,
        markers,
    }
}
