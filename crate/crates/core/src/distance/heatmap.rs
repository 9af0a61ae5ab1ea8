use std::fmt::Write as _;

/// How an axis is labeled: one label per cell, or one per contiguous group
/// as (start, length, label).
#[derive(Clone, Debug, PartialEq)]
pub enum AxisLabels {
    Each(Vec<String>),
    Groups(Vec<(usize, usize, String)>),
}

impl AxisLabels {
    fn ticks(&self) -> Vec<(f64, &str)> {
        match self {
            AxisLabels::Each(v) => v
                .iter()
                .enumerate()
                .map(|(i, s)| (i as f64 + 0.5, s.as_str()))
                .collect(),
            AxisLabels::Groups(g) => g
                .iter()
                .map(|(start, len, s)| (*start as f64 + *len as f64 / 2.0, s.as_str()))
                .collect(),
        }
    }

    fn group_edges(&self) -> Vec<usize> {
        match self {
            AxisLabels::Each(_) => Vec::new(),
            AxisLabels::Groups(g) => g.iter().skip(1).map(|g| g.0).collect(),
        }
    }
}

/// A row-major matrix ready to be drawn.
#[derive(Clone, Debug, PartialEq)]
pub struct Heatmap {
    pub title: String,
    pub n_rows: usize,
    pub n_cols: usize,
    pub values: Vec<f64>,
    pub row_labels: AxisLabels,
    pub col_labels: AxisLabels,
}

impl Heatmap {
    pub fn to_svg(&self) -> String {
        heatmap_svg(self)
    }
}

const PLOT: f64 = 720.0;
const MARGIN_LEFT: f64 = 160.0;
const MARGIN_TOP: f64 = 170.0;
const LEGEND_W: f64 = 110.0;
const LOW: (f64, f64, f64) = (255.0, 255.0, 217.0);
const HIGH: (f64, f64, f64) = (8.0, 29.0, 88.0);
const LEVELS: f64 = 255.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn level(v: f64, lo: f64, hi: f64) -> u8 {
    if !v.is_finite() || hi <= lo {
        return 0;
    }
    (((v - lo) / (hi - lo)).clamp(0.0, 1.0) * LEVELS).round() as u8
}

fn color(level: u8) -> String {
    let t = level as f64 / LEVELS;
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(LOW.0, HIGH.0),
        mix(LOW.1, HIGH.1),
        mix(LOW.2, HIGH.2)
    )
}

/// Renders a heatmap with a linear color ramp from the smallest to the
/// largest finite value. Adjacent cells of equal color are merged into one
/// rectangle, which keeps large matrices small on disk.
pub fn heatmap_svg(h: &Heatmap) -> String {
    let finite = h.values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    let cw = PLOT / h.n_cols.max(1) as f64;
    let ch = PLOT / h.n_rows.max(1) as f64;
    let width = MARGIN_LEFT + PLOT + LEGEND_W;
    let height = MARGIN_TOP + PLOT + 20.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(&h.title));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + PLOT / 2.0,
        escape(&h.title)
    );
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for i in 0..h.n_rows {
        let y = MARGIN_TOP + i as f64 * ch;
        let mut j = 0;
        while j < h.n_cols {
            let lv = level(h.values[i * h.n_cols + j], lo, hi);
            let start = j;
            while j < h.n_cols && level(h.values[i * h.n_cols + j], lo, hi) == lv {
                j += 1;
            }
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                MARGIN_LEFT + start as f64 * cw,
                y,
                (j - start) as f64 * cw,
                ch,
                color(lv)
            );
        }
    }
    let _ = writeln!(s, "</g>");

    for e in h.row_labels.group_edges() {
        let y = MARGIN_TOP + e as f64 * ch;
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.3}" x2="{}" y2="{y:.3}" stroke="#888" stroke-width="0.5"/>"##,
            MARGIN_LEFT + PLOT
        );
    }
    for e in h.col_labels.group_edges() {
        let x = MARGIN_LEFT + e as f64 * cw;
        let _ = writeln!(
            s,
            r##"<line x1="{x:.3}" y1="{MARGIN_TOP}" x2="{x:.3}" y2="{}" stroke="#888" stroke-width="0.5"/>"##,
            MARGIN_TOP + PLOT
        );
    }
    for (pos, label) in h.row_labels.ticks() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.3}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            MARGIN_LEFT - 4.0,
            MARGIN_TOP + pos * ch,
            escape(label)
        );
    }
    for (pos, label) in h.col_labels.ticks() {
        let x = MARGIN_LEFT + pos * cw;
        let y = MARGIN_TOP - 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{x:.3}" y="{y}" transform="rotate(-60 {x:.3} {y})">{}</text>"#,
            escape(label)
        );
    }

    let lx = MARGIN_LEFT + PLOT + 20.0;
    let _ = writeln!(
        s,
        r#"<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0">"#
    );
    let _ = writeln!(s, r#"<stop offset="0" stop-color="{}"/>"#, color(0));
    let _ = writeln!(s, r#"<stop offset="1" stop-color="{}"/>"#, color(LEVELS as u8));
    let _ = writeln!(s, "</linearGradient></defs>");
    let _ = writeln!(
        s,
        r##"<rect x="{lx}" y="{MARGIN_TOP}" width="18" height="{PLOT}" fill="url(#ramp)" stroke="#444" stroke-width="0.5"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">{}</text>"#,
        lx + 22.0,
        MARGIN_TOP + 8.0,
        fmt_tick(hi)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">{}</text>"#,
        lx + 22.0,
        MARGIN_TOP + PLOT,
        fmt_tick(lo)
    );
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}
