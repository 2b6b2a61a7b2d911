//! Deterministic figure rendering for overlaid slope polygons. Output is a
//! pure function of the spec: same polygons and dimensions, same bytes.

use hn_extend::TuplarPolygon;
use num_traits::ToPrimitive;

/// Visual role of a polygon in the figure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Sub,
    Mid,
    Quot,
    Witness,
}

impl Style {
    fn color(self) -> &'static str {
        match self {
            Style::Sub => "#1f77b4",
            Style::Mid => "#2ca02c",
            Style::Quot => "#d62728",
            Style::Witness => "#9467bd",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Svg,
    Ascii,
}

pub struct RenderSpec {
    pub polygons: Vec<(String, TuplarPolygon, Style)>,
    pub width: u32,
    pub height: u32,
    pub output: Output,
}

impl RenderSpec {
    pub fn render(&self) -> Result<String, String> {
        for (i, (label, _, _)) in self.polygons.iter().enumerate() {
            if self.polygons[..i].iter().any(|(other, _, _)| other == label) {
                return Err(format!("duplicate label {:?}", label));
            }
        }
        match self.output {
            Output::Svg => {
                if self.polygons.is_empty() {
                    return Err("svg output needs at least one polygon".to_string());
                }
                Ok(self.svg())
            }
            Output::Ascii => Ok(self.ascii()),
        }
    }

    /// Breakpoints (x, height) of every polygon, with the origin included.
    fn breakpoints(polygon: &TuplarPolygon) -> Vec<(f64, f64)> {
        let mut points = vec![(0.0, 0.0)];
        for (k, h) in polygon.partial_sums().iter().enumerate() {
            points.push(((k + 1) as f64, h.to_f64().unwrap()));
        }
        points
    }

    /// Integer extents covering all breakpoints with the lattice origin.
    fn extents(&self) -> (i64, i64, i64) {
        let mut x_max = 1i64;
        let mut y_min = 0f64;
        let mut y_max = 0f64;
        for (_, polygon, _) in &self.polygons {
            x_max = x_max.max(polygon.len() as i64);
            for (_, y) in Self::breakpoints(polygon) {
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
        let mut y_lo = y_min.floor() as i64;
        let mut y_hi = y_max.ceil() as i64;
        if y_lo == y_hi {
            y_lo -= 1;
            y_hi += 1;
        }
        (x_max, y_lo, y_hi)
    }

    fn svg(&self) -> String {
        let (x_max, y_lo, y_hi) = self.extents();
        let w = self.width.max(120) as f64;
        let h = self.height.max(120) as f64;
        let margin = 40.0;
        let sx = (w - 2.0 * margin) / x_max as f64;
        let sy = (h - 2.0 * margin) / (y_hi - y_lo) as f64;
        let px = |x: f64| margin + x * sx;
        let py = |y: f64| h - margin - (y - y_lo as f64) * sy;

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {:.0} {:.0}\" width=\"{:.0}\" height=\"{:.0}\">\n",
            w, h, w, h
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        for gx in 0..=x_max {
            let stroke = if gx == 0 { "#888888" } else { "#dddddd" };
            out.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\"/>\n",
                px(gx as f64),
                py(y_lo as f64),
                px(gx as f64),
                py(y_hi as f64),
                stroke
            ));
        }
        for gy in y_lo..=y_hi {
            let stroke = if gy == 0 { "#888888" } else { "#dddddd" };
            out.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\"/>\n",
                px(0.0),
                py(gy as f64),
                px(x_max as f64),
                py(gy as f64),
                stroke
            ));
        }
        for (index, (label, polygon, style)) in self.polygons.iter().enumerate() {
            let color = style.color();
            let points = Self::breakpoints(polygon);
            if polygon.is_point() {
                out.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{}\"/>\n",
                    px(0.0),
                    py(0.0),
                    color
                ));
            } else {
                let path: Vec<String> = points
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                out.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                    color,
                    path.join(" ")
                ));
                for &(x, y) in &points {
                    out.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>\n",
                        px(x),
                        py(y),
                        color
                    ));
                }
            }
            let &(lx, ly) = points.last().unwrap();
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"{}\" font-size=\"13\" font-family=\"monospace\">{}</text>\n",
                px(lx) + 6.0,
                py(ly) - 6.0 - 15.0 * index as f64,
                color,
                label
            ));
        }
        out.push_str("</svg>\n");
        out
    }

    /// Character grid: four columns per unit along x, two rows per unit
    /// along y, integer lattice marked with dots. Polygons are drawn in
    /// input order with the first character of their label; later ones
    /// overwrite earlier ones where they cross.
    fn ascii(&self) -> String {
        let (x_max, y_lo, y_hi) = self.extents();
        let cols = (x_max * 4 + 1) as usize;
        let rows = ((y_hi - y_lo) * 2 + 1) as usize;
        let mut grid = vec![vec![' '; cols]; rows];
        let cell = |x: f64, y: f64| -> (usize, usize) {
            let c = (x * 4.0).round() as usize;
            let r = ((y_hi as f64 - y) * 2.0).round() as usize;
            (r.min(rows - 1), c.min(cols - 1))
        };
        for gx in 0..=x_max {
            for gy in y_lo..=y_hi {
                let (r, c) = cell(gx as f64, gy as f64);
                grid[r][c] = '.';
            }
        }
        for (label, polygon, _) in &self.polygons {
            let marker = label.chars().next().unwrap_or('*');
            if polygon.is_point() {
                let (r, c) = cell(0.0, 0.0);
                grid[r][c] = marker;
                continue;
            }
            let heights = polygon.partial_sums();
            let slopes = polygon.slopes();
            for col in 0..=(polygon.len() * 4) {
                let x = col as f64 / 4.0;
                let k = (x.floor() as usize).min(polygon.len() - 1);
                let base = if k == 0 {
                    0.0
                } else {
                    heights[k - 1].to_f64().unwrap()
                };
                let y = base + (x - k as f64) * slopes[k].to_f64().unwrap();
                let (r, c) = cell(x, y);
                grid[r][c] = marker;
            }
        }
        let mut out = String::new();
        for row in grid {
            let line: String = row.into_iter().collect();
            out.push_str(line.trim_end());
            out.push('\n');
        }
        for (label, polygon, _) in &self.polygons {
            let marker = label.chars().next().unwrap_or('*');
            out.push_str(&format!("{} {} {}\n", marker, label, polygon));
        }
        out
    }
}
