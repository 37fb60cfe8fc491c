//! Output side: SVG Roofline charts, JSON reports, Nsight Compute section
//! files and the command-line front end.

mod chart;
pub mod cli;
mod json;
mod pbtxt;
mod section;

pub use chart::{
    layout_chart, render_chart, CeilingSegment, ChartGeometry, ChartSpec, MarkerPoint, MarkerShape,
    MarkerStyle, CANVAS_HEIGHT, CANVAS_WIDTH,
};
pub use cli::{cli_main, run};
pub use json::{
    emit_report, Report, ReportEntry, ReportOptions, SampleReport, ABOVE_ROOFLINE_TOLERANCE,
    REPORT_SCHEMA,
};
pub use pbtxt::{parse_text_format, TextMessage, TextValue};
pub use section::{emit_section_file, SectionFileSpec};
