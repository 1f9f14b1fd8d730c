//! SVG bar chart of per-participant dominance shares.
//!
//! One bar per participant, grouped and colored by group, with a horizontal
//! line at the mean + 1 SD dominance threshold. Output is a self-contained
//! SVG string; rendering is deterministic.

use crate::dominance::DominanceReport;
use crate::numfmt::sig6;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 90.0;
const MARGIN_LEFT: f64 = 70.0;

const BAR_COLORS: [&str; 7] = [
    "#3498db", "#2ecc71", "#9b59b6", "#e67e22", "#1abc9c", "#f1c40f", "#34495e",
];
const DOMINANT_COLOR: &str = "#e74c3c";
const THRESHOLD_COLOR: &str = "#c0392b";
const AXIS_COLOR: &str = "#2c3e50";
const GRID_COLOR: &str = "#ecf0f1";

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the report as an SVG bar chart with the threshold line.
pub fn share_chart(report: &DominanceReport, title: &str) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let n = report.participants.len().max(1);

    let y_max = report
        .participants
        .iter()
        .map(|p| p.share)
        .fold(report.threshold, f64::max)
        .max(0.05)
        * 1.15;

    let mut svg = String::new();
    svg.push_str(&format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    ));
    svg.push_str(&format!(
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    ));
    svg.push_str(&format!(
        r#"<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="17" font-weight="bold" fill="{AXIS_COLOR}">{}</text>"#,
        WIDTH / 2.0,
        escape_xml(title)
    ));

    // horizontal grid and y labels (percent)
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let y = MARGIN_TOP + plot_h - frac * plot_h;
        let value = frac * y_max;
        svg.push_str(&format!(
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{GRID_COLOR}" stroke-width="1"/>"#,
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
        svg.push_str(&format!(
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11" fill="{AXIS_COLOR}">{}%</text>"#,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            sig6(value * 100.0)
        ));
    }

    // bars, colored per group, dominant members highlighted
    let slot = plot_w / n as f64;
    let bar_w = (slot * 0.72).min(48.0);
    let mut group_color: std::collections::BTreeMap<&str, &str> = std::collections::BTreeMap::new();
    for p in &report.participants {
        let next = BAR_COLORS[group_color.len() % BAR_COLORS.len()];
        group_color.entry(p.group_id.as_str()).or_insert(next);
    }
    for (i, p) in report.participants.iter().enumerate() {
        let x = MARGIN_LEFT + i as f64 * slot + (slot - bar_w) / 2.0;
        let h = (p.share / y_max) * plot_h;
        let y = MARGIN_TOP + plot_h - h;
        let color = if p.dominant {
            DOMINANT_COLOR
        } else {
            group_color[p.group_id.as_str()]
        };
        svg.push_str(&format!(
            r#"<rect x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{color}"><title>{}</title></rect>"#,
            escape_xml(&format!(
                "{} / {}: {}%",
                p.group_id,
                p.participant_id,
                sig6(p.share * 100.0)
            ))
        ));
        let label_x = x + bar_w / 2.0;
        let label_y = MARGIN_TOP + plot_h + 12.0;
        svg.push_str(&format!(
            r#"<text x="{label_x:.2}" y="{label_y:.2}" text-anchor="end" font-family="sans-serif" font-size="9" fill="{AXIS_COLOR}" transform="rotate(-45 {label_x:.2} {label_y:.2})">{}</text>"#,
            escape_xml(&format!("{}/{}", p.group_id, p.participant_id))
        ));
    }

    // threshold line: mean + 1 SD
    let ty = MARGIN_TOP + plot_h - (report.threshold / y_max) * plot_h;
    svg.push_str(&format!(
        r#"<line x1="{}" y1="{ty:.2}" x2="{}" y2="{ty:.2}" stroke="{THRESHOLD_COLOR}" stroke-width="2" stroke-dasharray="6,4"/>"#,
        MARGIN_LEFT,
        MARGIN_LEFT + plot_w
    ));
    svg.push_str(&format!(
        r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11" fill="{THRESHOLD_COLOR}">mean + 1 SD = {}%</text>"#,
        MARGIN_LEFT + plot_w,
        ty - 6.0,
        sig6(report.threshold * 100.0)
    ));

    // axes
    svg.push_str(&format!(
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{AXIS_COLOR}" stroke-width="1.5"/>"#,
        MARGIN_LEFT,
        MARGIN_TOP,
        MARGIN_LEFT,
        MARGIN_TOP + plot_h
    ));
    svg.push_str(&format!(
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{AXIS_COLOR}" stroke-width="1.5"/>"#,
        MARGIN_LEFT,
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    ));
    svg.push_str("</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::{ParticipantShare, SdMode};

    fn report() -> DominanceReport {
        let participants = vec![
            ParticipantShare {
                group_id: "g1".into(),
                participant_id: "p1".into(),
                ed_count: 10,
                group_ed_total: 20,
                share: 0.5,
                dominant: true,
            },
            ParticipantShare {
                group_id: "g1".into(),
                participant_id: "p2".into(),
                ed_count: 10,
                group_ed_total: 20,
                share: 0.5,
                dominant: false,
            },
        ];
        DominanceReport {
            participants,
            corpus_mean_share: 0.5,
            corpus_sd_share: 0.0,
            threshold: 0.5,
            sd_mode: SdMode::Population,
            warnings: vec![],
        }
    }

    #[test]
    fn chart_is_valid_svg_with_threshold_line() {
        let svg = share_chart(&report(), "Dominance shares");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("mean + 1 SD"));
        assert_eq!(
            svg.matches("<rect").count(),
            3,
            "background + one bar per participant"
        );
    }

    #[test]
    fn chart_escapes_labels() {
        let mut r = report();
        r.participants[0].participant_id = "a<b&c>".into();
        let svg = share_chart(&r, "t");
        assert!(!svg.contains("a<b&c>"));
        assert!(svg.contains("a&lt;b&amp;c&gt;"));
    }

    #[test]
    fn chart_is_deterministic() {
        let r = report();
        assert_eq!(share_chart(&r, "x"), share_chart(&r, "x"));
    }
}
