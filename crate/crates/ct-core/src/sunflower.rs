//! Sunflower persistence plot: structured plot data and an SVG emitter.
//!
//! Multiplicity at a (birth, death) point is encoded as a plain dot for a
//! single class, one ray per class for small multiplicities, and a disk with
//! a printed count once the multiplicity crosses the disk threshold.

use serde::{Deserialize, Serialize};

use crate::homology::PersistenceDiagram;

pub const DEFAULT_DISK_THRESHOLD: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Marker {
    Dot,
    Rays { count: usize },
    Disk { count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub birth: u32,
    pub death: u32,
    pub multiplicity: usize,
    pub marker: Marker,
}

/// Plot specification in frequency-level units; the main diagonal is always
/// drawn and persistence lies below it (descending filtration).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SunflowerPlot {
    pub axis_max: u32,
    pub disk_threshold: usize,
    pub points: Vec<PlotPoint>,
}

pub fn sunflower_plot_data(diag: &PersistenceDiagram, disk_threshold: usize) -> SunflowerPlot {
    let points: Vec<PlotPoint> = diag
        .multiplicities()
        .into_iter()
        .map(|((birth, death), m)| PlotPoint {
            birth,
            death,
            multiplicity: m,
            marker: if m == 1 {
                Marker::Dot
            } else if m <= disk_threshold {
                Marker::Rays { count: m }
            } else {
                Marker::Disk { count: m }
            },
        })
        .collect();
    let axis_max = points.iter().map(|p| p.birth).max().unwrap_or(1).max(1);
    SunflowerPlot { axis_max, disk_threshold, points }
}

const MARGIN: f64 = 50.0;
const SIZE: f64 = 480.0;

fn fmt(v: f64) -> String {
    format!("{v:.1}")
}

/// Renders the plot as standalone SVG. Output is byte-stable for a given
/// plot, so it can be golden-file tested.
pub fn render_svg(plot: &SunflowerPlot) -> String {
    let span = f64::from(plot.axis_max);
    // x = birth, y = death; level 0 sits at the origin.
    let sx = |v: f64| MARGIN + v / span * SIZE;
    let sy = |v: f64| MARGIN + SIZE - v / span * SIZE;

    let mut s = String::new();
    let total = SIZE + 2.0 * MARGIN;
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">\n",
        w = fmt(total)
    ));
    s.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{w}\" fill=\"white\"/>\n",
        w = fmt(total)
    ));
    // axes
    s.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        x0 = fmt(sx(0.0)),
        y0 = fmt(sy(0.0)),
        x1 = fmt(sx(span)),
    ));
    s.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n",
        x0 = fmt(sx(0.0)),
        y0 = fmt(sy(0.0)),
        y1 = fmt(sy(span)),
    ));
    // main diagonal
    s.push_str(&format!(
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n",
        x0 = fmt(sx(0.0)),
        y0 = fmt(sy(0.0)),
        x1 = fmt(sx(span)),
        y1 = fmt(sy(span)),
    ));
    // integer ticks, thinned when the axis is long
    let step = (plot.axis_max / 12).max(1);
    let mut level = 0;
    while level <= plot.axis_max {
        let v = f64::from(level);
        s.push_str(&format!(
            "  <line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"black\"/>\n",
            x = fmt(sx(v)),
            y0 = fmt(sy(0.0)),
            y2 = fmt(sy(0.0) + 5.0),
        ));
        s.push_str(&format!(
            "  <text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"middle\">{level}</text>\n",
            x = fmt(sx(v)),
            y = fmt(sy(0.0) + 18.0),
        ));
        s.push_str(&format!(
            "  <line x1=\"{x0}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\"/>\n",
            x0 = fmt(sx(0.0)),
            y = fmt(sy(v)),
            x2 = fmt(sx(0.0) - 5.0),
        ));
        s.push_str(&format!(
            "  <text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"end\">{level}</text>\n",
            x = fmt(sx(0.0) - 8.0),
            y = fmt(sy(v) + 4.0),
        ));
        level += step;
    }
    // axis labels
    s.push_str(&format!(
        "  <text x=\"{x}\" y=\"{y}\" font-size=\"13\" text-anchor=\"middle\">birth (frequency level)</text>\n",
        x = fmt(sx(span / 2.0)),
        y = fmt(sy(0.0) + 38.0),
    ));
    s.push_str(&format!(
        "  <text x=\"{x}\" y=\"{y}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 {x} {y})\">death (frequency level)</text>\n",
        x = fmt(sx(0.0) - 34.0),
        y = fmt(sy(span / 2.0)),
    ));

    for p in &plot.points {
        let cx = sx(f64::from(p.birth));
        let cy = sy(f64::from(p.death));
        match &p.marker {
            Marker::Dot => {
                s.push_str(&format!(
                    "  <circle cx=\"{x}\" cy=\"{y}\" r=\"3.0\" fill=\"black\"/>\n",
                    x = fmt(cx),
                    y = fmt(cy),
                ));
            }
            Marker::Rays { count } => {
                s.push_str(&format!(
                    "  <circle cx=\"{x}\" cy=\"{y}\" r=\"2.5\" fill=\"black\"/>\n",
                    x = fmt(cx),
                    y = fmt(cy),
                ));
                for r in 0..*count {
                    let angle = std::f64::consts::TAU * r as f64 / *count as f64
                        - std::f64::consts::FRAC_PI_2;
                    s.push_str(&format!(
                        "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"black\"/>\n",
                        x1 = fmt(cx + 3.5 * angle.cos()),
                        y1 = fmt(cy + 3.5 * angle.sin()),
                        x2 = fmt(cx + 9.0 * angle.cos()),
                        y2 = fmt(cy + 9.0 * angle.sin()),
                    ));
                }
            }
            Marker::Disk { count } => {
                s.push_str(&format!(
                    "  <circle cx=\"{x}\" cy=\"{y}\" r=\"10.0\" fill=\"black\"/>\n",
                    x = fmt(cx),
                    y = fmt(cy),
                ));
                s.push_str(&format!(
                    "  <text x=\"{x}\" y=\"{y}\" font-size=\"12\" text-anchor=\"middle\">{count}</text>\n",
                    x = fmt(cx),
                    y = fmt(cy - 14.0),
                ));
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{PersistenceDiagram, PersistentClass};

    fn diag(pairs: &[(u32, u32, usize)]) -> PersistenceDiagram {
        let classes = pairs
            .iter()
            .flat_map(|&(b, d, m)| {
                std::iter::repeat(PersistentClass { birth: b, death: d, representative: vec![] })
                    .take(m)
            })
            .collect();
        PersistenceDiagram { classes }
    }

    #[test]
    fn two_classes_get_two_rays() {
        let plot = sunflower_plot_data(&diag(&[(15, 3, 2)]), DEFAULT_DISK_THRESHOLD);
        assert_eq!(plot.points.len(), 1);
        assert_eq!(plot.points[0].marker, Marker::Rays { count: 2 });
    }

    #[test]
    fn large_multiplicity_gets_disk() {
        let plot = sunflower_plot_data(&diag(&[(1, 0, 43)]), DEFAULT_DISK_THRESHOLD);
        assert_eq!(plot.points[0].marker, Marker::Disk { count: 43 });
        let svg = render_svg(&plot);
        assert!(svg.contains(">43<"));
    }

    #[test]
    fn single_class_is_a_dot() {
        let plot = sunflower_plot_data(&diag(&[(5, 2, 1)]), DEFAULT_DISK_THRESHOLD);
        assert_eq!(plot.points[0].marker, Marker::Dot);
    }

    #[test]
    fn empty_diagram_renders_axes_only() {
        let plot = sunflower_plot_data(&diag(&[]), DEFAULT_DISK_THRESHOLD);
        assert!(plot.points.is_empty());
        let svg = render_svg(&plot);
        assert!(svg.starts_with("<svg"));
        assert!(!svg.contains("circle"));
    }

    #[test]
    fn svg_stable_across_calls() {
        let plot = sunflower_plot_data(&diag(&[(15, 3, 2), (2, 1, 6), (1, 0, 43)]), 10);
        assert_eq!(render_svg(&plot), render_svg(&plot));
    }
}
