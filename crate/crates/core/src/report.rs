//! Boxplot figures as standalone SVG.
//!
//! One figure per W-relationship, three stacked panels (one per X–Y
//! relation), four horizontal boxes per panel and a vertical line at the
//! true effect. Whiskers reach the most extreme estimate within 1.5 IQR of
//! the box; anything beyond is drawn as an outlier point.
//!
//! Every box group carries its numbers as `data-*` attributes in full
//! precision, so a figure can be checked against the files it came from.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::ReportError;
use crate::graph::{GraphClass, WClass, XyRelation, FIGURES};
use crate::simulation::{RawRow, SimulationSummary};
use crate::technique::Technique;

pub const WIDTH: f64 = 960.0;
pub const HEIGHT: f64 = 720.0;
const TITLE_HEIGHT: f64 = 36.0;
const PANEL_HEIGHT: f64 = (HEIGHT - TITLE_HEIGHT) / 3.0;
const LEFT: f64 = 190.0;
const RIGHT: f64 = 40.0;
const PANEL_CAPTION: f64 = 22.0;
const AXIS_SPACE: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxGlyph {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

impl BoxGlyph {
    /// Box edges and median come from the summary; whiskers and outliers
    /// from the raw estimates.
    pub fn new(q1: f64, median: f64, q3: f64, values: &[f64]) -> Self {
        let reach = 1.5 * (q3 - q1);
        let (lo_fence, hi_fence) = (q1 - reach, q3 + reach);
        let inside = values.iter().copied().filter(|v| (lo_fence..=hi_fence).contains(v));
        let (lo, hi) = inside.fold((q1, q3), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let mut outliers: Vec<f64> = values
            .iter()
            .copied()
            .filter(|v| *v < lo_fence || *v > hi_fence)
            .collect();
        outliers.sort_by(f64::total_cmp);
        BoxGlyph {
            q1,
            median,
            q3,
            whisker_low: lo,
            whisker_high: hi,
            outliers,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TechniqueRow {
    pub technique: Technique,
    pub count: usize,
    /// `None` when the technique produced no estimates.
    pub glyph: Option<BoxGlyph>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelSpec {
    pub graph_id: u32,
    pub notation: String,
    pub class: GraphClass,
    pub true_effect: f64,
    pub rows: Vec<TechniqueRow>,
}

impl PanelSpec {
    pub fn caption(&self) -> String {
        let twisted = match self.class.w_class {
            WClass::TwistedForwardChain | WClass::TwistedBackwardChain => format!("{}, ", self.class.w_class.label()),
            _ => String::new(),
        };
        format!("{}{}   [graph {}: {}]", twisted, xy_caption(self.class.xy_relation), self.graph_id, self.notation)
    }
}

fn xy_caption(r: XyRelation) -> &'static str {
    match r {
        XyRelation::XCausesY => "X -> Y",
        XyRelation::YCausesX => "X <- Y",
        XyRelation::None => "X - Y",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub number: u32,
    pub w_class: WClass,
    pub caption: String,
    pub panels: Vec<PanelSpec>,
}

/// Assembles figures for every figure with at least one simulated panel.
pub fn build_figures(summaries: &[SimulationSummary], raw: &[RawRow]) -> Result<Vec<FigureSpec>, ReportError> {
    let mut values: BTreeMap<(u32, Technique), Vec<f64>> = BTreeMap::new();
    for row in raw {
        if let Some(v) = row.estimate {
            values.entry((row.graph_id, row.technique)).or_default().push(v);
        }
    }

    let mut figures = Vec::new();
    for layout in &FIGURES {
        let mut panels = Vec::new();
        for class in &layout.panels {
            let rows: Vec<&SimulationSummary> = summaries
                .iter()
                .filter(|s| s.w_class == class.w_class && s.xy_relation == class.xy_relation)
                .collect();
            let Some(first) = rows.first() else { continue };
            let mut technique_rows = Vec::with_capacity(Technique::DISPLAYED.len());
            for technique in Technique::DISPLAYED {
                let s = rows
                    .iter()
                    .find(|s| s.technique == technique)
                    .ok_or_else(|| ReportError::MissingTechnique {
                        panel: first.notation.clone(),
                        technique: technique.to_string(),
                    })?;
                let glyph = s.stats.map(|st| {
                    let empty = Vec::new();
                    let v = values.get(&(s.graph_id, technique)).unwrap_or(&empty);
                    BoxGlyph::new(st.q1, st.median, st.q3, v)
                });
                technique_rows.push(TechniqueRow {
                    technique,
                    count: s.count,
                    glyph,
                });
            }
            panels.push(PanelSpec {
                graph_id: first.graph_id,
                notation: first.notation.clone(),
                class: *class,
                true_effect: first.true_effect,
                rows: technique_rows,
            });
        }
        if !panels.is_empty() {
            figures.push(FigureSpec {
                number: layout.number,
                w_class: layout.w_class,
                caption: format!("Figure {}. {}", layout.number, layout.caption),
                panels,
            });
        }
    }
    Ok(figures)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick positions covering `[lo, hi]` with a 1/2/5 step.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw_step = (hi - lo) / 6.0;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw_step)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

struct Scale {
    lo: f64,
    hi: f64,
}

impl Scale {
    /// Axis range spans whiskers and the true effect; outliers outside it
    /// are pinned to the edge.
    fn for_panel(panel: &PanelSpec) -> Scale {
        let mut lo = panel.true_effect;
        let mut hi = panel.true_effect;
        for g in panel.rows.iter().filter_map(|r| r.glyph.as_ref()) {
            lo = lo.min(g.whisker_low);
            hi = hi.max(g.whisker_high);
        }
        let pad = if hi > lo { 0.08 * (hi - lo) } else { 0.5 };
        Scale { lo: lo - pad, hi: hi + pad }
    }

    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.lo) / (self.hi - self.lo) * (WIDTH - LEFT - RIGHT)
    }

    fn contains(&self, v: f64) -> bool {
        (self.lo..=self.hi).contains(&v)
    }
}

fn render_panel(svg: &mut String, panel: &PanelSpec, top: f64) -> Result<(), ReportError> {
    for technique in Technique::DISPLAYED {
        if !panel.rows.iter().any(|r| r.technique == technique) {
            return Err(ReportError::MissingTechnique {
                panel: panel.notation.clone(),
                technique: technique.to_string(),
            });
        }
    }
    let scale = Scale::for_panel(panel);
    let plot_top = top + PANEL_CAPTION + 6.0;
    let plot_bottom = top + PANEL_HEIGHT - AXIS_SPACE;
    let row_height = (plot_bottom - plot_top) / Technique::DISPLAYED.len() as f64;
    let box_half = row_height * 0.22;

    let _ = writeln!(
        svg,
        r#"<g class="panel" data-graph-id="{}" data-notation="{}">"#,
        panel.graph_id,
        escape(&panel.notation)
    );
    let _ = writeln!(
        svg,
        r#"<text class="panel-caption" x="{:.2}" y="{:.2}" font-size="14">{}</text>"#,
        LEFT,
        top + PANEL_CAPTION - 4.0,
        escape(&panel.caption())
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#999"/>"##,
        LEFT,
        plot_top,
        WIDTH - LEFT - RIGHT,
        plot_bottom - plot_top
    );

    for (i, technique) in Technique::DISPLAYED.into_iter().enumerate() {
        let row = panel
            .rows
            .iter()
            .find(|r| r.technique == technique)
            .expect("checked above");
        let cy = plot_top + (i as f64 + 0.5) * row_height;
        let _ = writeln!(
            svg,
            r#"<text class="row-label" x="{:.2}" y="{:.2}" font-size="13" text-anchor="end">{}</text>"#,
            LEFT - 10.0,
            cy + 4.0,
            technique.label()
        );
        let Some(g) = &row.glyph else {
            let _ = writeln!(
                svg,
                r##"<text class="gap" data-technique="{}" data-count="0" x="{:.2}" y="{:.2}" font-size="12" font-style="italic" fill="#666">no defined estimates</text>"##,
                technique,
                LEFT + 10.0,
                cy + 4.0
            );
            continue;
        };
        let _ = writeln!(
            svg,
            r#"<g class="box" data-technique="{}" data-count="{}" data-q1="{}" data-median="{}" data-q3="{}" data-whisker-low="{}" data-whisker-high="{}" data-outliers="{}">"#,
            technique,
            row.count,
            g.q1,
            g.median,
            g.q3,
            g.whisker_low,
            g.whisker_high,
            g.outliers.len()
        );
        let (xl, xh) = (scale.x(g.whisker_low), scale.x(g.whisker_high));
        let (x1, xm, x3) = (scale.x(g.q1), scale.x(g.median), scale.x(g.q3));
        let _ = writeln!(
            svg,
            r##"<line x1="{xl:.2}" y1="{cy:.2}" x2="{x1:.2}" y2="{cy:.2}" stroke="#333" stroke-dasharray="4 3"/>"##
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{x3:.2}" y1="{cy:.2}" x2="{xh:.2}" y2="{cy:.2}" stroke="#333" stroke-dasharray="4 3"/>"##
        );
        for x in [xl, xh] {
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##,
                cy - box_half * 0.6,
                cy + box_half * 0.6
            );
        }
        let _ = writeln!(
            svg,
            r##"<rect x="{x1:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#dde6f0" stroke="#333"/>"##,
            cy - box_half,
            (x3 - x1).max(0.5),
            2.0 * box_half
        );
        let _ = writeln!(
            svg,
            r##"<line class="median" x1="{xm:.2}" y1="{:.2}" x2="{xm:.2}" y2="{:.2}" stroke="#000" stroke-width="2.5"/>"##,
            cy - box_half,
            cy + box_half
        );
        let mut clipped_low = 0usize;
        let mut clipped_high = 0usize;
        for &v in &g.outliers {
            if scale.contains(v) {
                let _ = writeln!(
                    svg,
                    r##"<circle class="outlier" cx="{:.2}" cy="{cy:.2}" r="2.5" fill="none" stroke="#333"/>"##,
                    scale.x(v)
                );
            } else if v < scale.lo {
                clipped_low += 1;
            } else {
                clipped_high += 1;
            }
        }
        for (count, edge, anchor, dx) in [
            (clipped_low, scale.lo, "start", 3.0),
            (clipped_high, scale.hi, "end", -3.0),
        ] {
            if count > 0 {
                let _ = writeln!(
                    svg,
                    r##"<text class="clipped" x="{:.2}" y="{:.2}" font-size="10" text-anchor="{anchor}" fill="#a33">{count} beyond axis</text>"##,
                    scale.x(edge) + dx,
                    cy - box_half - 2.0
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    let tx = scale.x(panel.true_effect);
    let _ = writeln!(
        svg,
        r##"<line class="true-effect" data-value="{}" x1="{tx:.2}" y1="{plot_top:.2}" x2="{tx:.2}" y2="{plot_bottom:.2}" stroke="#000" stroke-width="1.5"/>"##,
        panel.true_effect
    );
    for t in ticks(scale.lo, scale.hi) {
        let x = scale.x(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{plot_bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##,
            plot_bottom + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            plot_bottom + 17.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">Estimate for causal effect of X on Y</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        plot_bottom + 32.0
    );
    let _ = writeln!(svg, "</g>");
    Ok(())
}

/// Renders one figure. Output is a pure function of the spec.
pub fn render_figure(spec: &FigureSpec) -> Result<String, ReportError> {
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#fff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text class="figure-caption" x="{:.2}" y="24" font-size="17" text-anchor="middle" data-figure="{}" data-w-class="{}">{}</text>"#,
        WIDTH / 2.0,
        spec.number,
        spec.w_class,
        escape(&spec.caption)
    );
    for (i, panel) in spec.panels.iter().enumerate() {
        render_panel(&mut svg, panel, TITLE_HEIGHT + i as f64 * PANEL_HEIGHT)?;
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

/// File name for a figure, e.g. `figure-01-confounding.svg`.
pub fn figure_file_name(spec: &FigureSpec) -> String {
    let slug: String = spec
        .w_class
        .as_str()
        .chars()
        .enumerate()
        .flat_map(|(i, c)| {
            let dash = (i > 0 && c.is_ascii_uppercase()).then_some('-');
            dash.into_iter().chain(std::iter::once(c.to_ascii_lowercase()))
        })
        .collect();
    format!("figure-{:02}-{}.svg", spec.number, slug)
}
