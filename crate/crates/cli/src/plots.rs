//! Minimal static SVG plots for run logs: no dependencies, deterministic
//! byte output. These are convenience renders; the CSVs stay the source of
//! truth for real analysis.

use std::fmt::Write;

use curio_core::agent::MetricsLog;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 46.0;

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"];

struct Frame {
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        MARGIN + (WIDTH - 2.0 * MARGIN) * t / self.x_max.max(1.0)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - self.y_min) / span
    }
}

fn open_svg(title: &str) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    let _ = writeln!(
        s,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>"
    );
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"#cccccc\"/>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    s
}

fn polyline(svg: &mut String, frame: &Frame, points: &[(f64, f64)], color: &str) {
    if points.is_empty() {
        return;
    }
    let coords: Vec<String> = points
        .iter()
        .map(|&(t, v)| format!("{:.2},{:.2}", frame.x(t), frame.y(v)))
        .collect();
    let _ = writeln!(
        svg,
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
        coords.join(" ")
    );
}

fn legend(svg: &mut String, labels: &[(&str, String)]) {
    for (i, (color, label)) in labels.iter().enumerate() {
        let y = MARGIN + 16.0 * (i as f64 + 1.0);
        let _ = writeln!(
            svg,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\">{label}</text>",
            WIDTH - MARGIN - 150.0,
            y - 9.0,
            WIDTH - MARGIN - 135.0,
            y
        );
    }
}

/// Thin long logs so plots stay a few kilobytes regardless of run length.
fn stride(len: usize) -> usize {
    (len / 600).max(1)
}

/// Cumulative intrinsic and external reward against time.
pub fn reward_vs_time_svg(log: &MetricsLog) -> String {
    let mut svg = open_svg("cumulative reward vs time");
    let mut intrinsic = Vec::new();
    let mut external = Vec::new();
    let (mut sum_int, mut sum_ext) = (0.0, 0.0);
    let step = stride(log.rows.len());
    for (i, row) in log.rows.iter().enumerate() {
        sum_int += row.r_int;
        sum_ext += row.r_ext;
        if i % step == 0 || i + 1 == log.rows.len() {
            intrinsic.push((row.t as f64, sum_int));
            external.push((row.t as f64, sum_ext));
        }
    }
    let values = intrinsic.iter().chain(&external).map(|&(_, v)| v);
    let y_min = values.clone().fold(0.0f64, f64::min);
    let y_max = values.fold(0.0f64, f64::max);
    let frame = Frame {
        x_max: log.rows.last().map(|r| r.t as f64).unwrap_or(1.0),
        y_min,
        y_max,
    };
    polyline(&mut svg, &frame, &intrinsic, PALETTE[0]);
    polyline(&mut svg, &frame, &external, PALETTE[1]);
    legend(
        &mut svg,
        &[
            (PALETTE[0], "intrinsic (cumulative)".to_string()),
            (PALETTE[1], "external (cumulative)".to_string()),
        ],
    );
    svg.push_str("</svg>\n");
    svg
}

/// Running share of steps spent on each action (channel) against time.
pub fn channel_occupancy_svg(log: &MetricsLog, action_count: u16) -> String {
    let mut svg = open_svg("channel occupancy vs time");
    let mut counts = vec![0u64; action_count as usize];
    let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); action_count as usize];
    let step = stride(log.rows.len());
    for (i, row) in log.rows.iter().enumerate() {
        if let Some(c) = counts.get_mut(row.action as usize) {
            *c += 1;
        }
        if i % step == 0 || i + 1 == log.rows.len() {
            for (a, &c) in counts.iter().enumerate() {
                series[a].push((row.t as f64, c as f64 / row.t as f64));
            }
        }
    }
    let frame = Frame {
        x_max: log.rows.last().map(|r| r.t as f64).unwrap_or(1.0),
        y_min: 0.0,
        y_max: 1.0,
    };
    let mut labels = Vec::new();
    for (a, points) in series.iter().enumerate() {
        let color = PALETTE[a % PALETTE.len()];
        polyline(&mut svg, &frame, points, color);
        labels.push((color, format!("action {a}")));
    }
    legend(&mut svg, &labels);
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use curio_core::agent::{MetricsRow, QueueStats};

    fn demo_log(steps: u64) -> MetricsLog {
        let rows = (1..=steps)
            .map(|t| MetricsRow {
                t,
                env_state: 0,
                action: (t % 3) as u16,
                r_ext: 0.0,
                r_int: 1.0 / t as f64,
                combined: 1.0 / t as f64,
                event: None,
                cumulative_bits_saved: 0.0,
            })
            .collect();
        MetricsLog { rows, rounds: Vec::new(), queue: QueueStats::default(), incomplete: false, fault: None }
    }

    #[test]
    fn plots_are_valid_looking_svg_and_deterministic() {
        let log = demo_log(2000);
        let a = reward_vs_time_svg(&log);
        let b = reward_vs_time_svg(&log);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg "));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 2);

        let occ = channel_occupancy_svg(&log, 3);
        assert_eq!(occ.matches("<polyline").count(), 3);
        assert!(occ.len() < 60_000, "plot should stay small, got {} bytes", occ.len());
    }

    #[test]
    fn empty_log_renders_an_empty_frame() {
        let log = demo_log(0);
        let svg = reward_vs_time_svg(&log);
        assert!(svg.contains("</svg>"));
        assert_eq!(svg.matches("points=").count(), 0);
    }
}
