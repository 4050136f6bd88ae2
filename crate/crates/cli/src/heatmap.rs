//! SVG heatmaps of grid fields with a linear colour scale.

use std::fmt::Write;

use holocomp_core::report::GridField;
use holocomp_core::Error;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 6;

/// Viridis control points.
const PALETTE: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn colour(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (PALETTE.len() - 1) as f64;
    let i = (t.floor() as usize).min(PALETTE.len() - 2);
    let f = t - i as f64;
    let c: Vec<u8> = (0..3)
        .map(|k| (PALETTE[i][k] + f * (PALETTE[i + 1][k] - PALETTE[i][k])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Tick indices spread evenly over `n` cells.
fn ticks(n: usize) -> Vec<usize> {
    if n <= TICKS {
        return (0..n).collect();
    }
    let mut t: Vec<usize> = (0..TICKS).map(|k| k * (n - 1) / (TICKS - 1)).collect();
    t.dedup();
    t
}

/// Renders `field` with rows on the vertical axis (first row at the bottom).
/// Flagged cells are grey with a cross; the argmax cell is circled in red.
pub fn render(field: &GridField, title: &str) -> Result<String, Error> {
    if field.is_empty() {
        return Err(Error::Unsupported("heatmap needs a nonempty grid".into()));
    }
    let (nr, nc) = (field.rows.len(), field.cols.len());
    let usable = |i: usize, j: usize| !field.flagged(i, j) && field.value(i, j).is_finite();
    let finite: Vec<f64> = (0..nr)
        .flat_map(|i| (0..nc).map(move |j| (i, j)))
        .filter(|&(i, j)| usable(i, j))
        .map(|(i, j)| field.value(i, j))
        .collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let (cw, ch) = (pw / nc as f64, ph / nr as f64);
    let x = |j: usize| LEFT + j as f64 * cw;
    let y = |i: usize| TOP + ph - (i + 1) as f64 * ch;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    for i in 0..nr {
        for j in 0..nc {
            let fill = if field.flagged(i, j) {
                "#bdbdbd".to_string()
            } else if usable(i, j) {
                colour((field.value(i, j) - lo) / span)
            } else {
                "#ffffff".to_string()
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                x(j),
                y(i),
                cw,
                ch
            );
            if field.flagged(i, j) {
                let _ = writeln!(
                    s,
                    r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="black" stroke-width="1"/>"#,
                    x(j),
                    y(i),
                    x(j) + cw,
                    y(i) + ch,
                    x(j) + cw,
                    y(i),
                    x(j),
                    y(i) + ch
                );
            }
        }
    }
    if let Some((i, j, _)) = field.argmax() {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="red" stroke-width="2"/>"#,
            x(j) + cw / 2.0,
            y(i) + ch / 2.0,
            (cw.min(ch) / 2.0).max(4.0)
        );
    }
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#);
    for j in ticks(nc) {
        let cx = x(j) + cw / 2.0;
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            label(field.cols[j])
        );
    }
    for i in ticks(nr) {
        let cy = y(i) + ch / 2.0 + 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{cy:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, label(field.rows[i]));
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 24.0,
        escape(&field.col_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&field.row_label)
    );
    // colour bar
    let bx = WIDTH - RIGHT + 24.0;
    let steps = 64;
    for k in 0..steps {
        let t = k as f64 / (steps - 1) as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{bx:.2}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            TOP + ph * (1.0 - (k + 1) as f64 / steps as f64),
            ph / steps as f64 + 0.5,
            colour(t)
        );
    }
    if !finite.is_empty() {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, bx + 20.0, TOP + 10.0, label(hi));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, bx + 20.0, TOP + ph, label(lo));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(values: Vec<f64>, flags: Vec<bool>) -> GridField {
        GridField {
            row_label: "r".into(),
            col_label: "theta".into(),
            rows: vec![0.5, 0.75],
            cols: vec![0.0, 1.0, 2.0],
            values,
            flags,
        }
    }

    #[test]
    fn empty_grid_is_unsupported() {
        let mut f = field(vec![], vec![]);
        f.rows.clear();
        assert!(matches!(render(&f, "x"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn constant_field_has_one_colour() {
        let svg = render(&field(vec![1.0; 6], vec![false; 6]), "const").unwrap();
        let cells: Vec<&str> = svg.lines().filter(|l| l.contains(r#"height="215.00""#)).collect();
        assert_eq!(cells.len(), 6);
        assert!(cells.iter().all(|l| l.contains(&colour(0.0))));
    }

    #[test]
    fn flags_and_argmax_are_marked() {
        let svg = render(&field(vec![1.0, 9.0, 2.0, 3.0, 4.0, 5.0], vec![false, true, false, false, false, false]), "m").unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(">theta<") && svg.contains(">r<"));
    }

    #[test]
    fn palette_endpoints() {
        assert_eq!(colour(0.0), "#440154");
        assert_eq!(colour(1.0), "#fde725");
    }
}
