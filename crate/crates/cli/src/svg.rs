use std::fmt::Write;

const W: f64 = 800.0;
const PAD: f64 = 60.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Horizontal rows of intervals and tick marks over a shared axis.
pub struct RowPlot {
    title: String,
    rows: Vec<Row>,
}

struct Row {
    label: String,
    intervals: Vec<(f64, f64)>,
    ticks: Vec<f64>,
    color: &'static str,
}

impl RowPlot {
    pub fn new(title: &str) -> Self {
        Self { title: title.into(), rows: vec![] }
    }

    pub fn intervals(mut self, label: &str, iv: Vec<(f64, f64)>, color: &'static str) -> Self {
        self.rows.push(Row { label: label.into(), intervals: iv, ticks: vec![], color });
        self
    }

    pub fn ticks(mut self, label: &str, t: Vec<f64>, color: &'static str) -> Self {
        self.rows.push(Row { label: label.into(), intervals: vec![], ticks: t, color });
        self
    }

    pub fn render(&self) -> String {
        let all = self.rows.iter().flat_map(|r| r.intervals.iter().flat_map(|&(a, b)| [a, b]).chain(r.ticks.iter().copied()));
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
        let (lo, hi) = if lo < hi { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let sx = |x: f64| PAD + 120.0 + (x - lo) / (hi - lo) * (W - 2.0 * PAD - 120.0);
        let h = 70.0 + 40.0 * self.rows.len() as f64;
        let mut s = String::new();
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{h}" font-family="monospace" font-size="11">"#).unwrap();
        writeln!(s, r#"<text x="{PAD}" y="20" font-size="13">{}</text>"#, esc(&self.title)).unwrap();
        for (i, r) in self.rows.iter().enumerate() {
            let y = 50.0 + 40.0 * i as f64;
            writeln!(s, r#"<text x="{PAD}" y="{}">{}</text>"#, y + 4.0, esc(&r.label)).unwrap();
            // merge at pixel resolution so huge covers stay small
            let mut last: Option<(f64, f64)> = None;
            let mut segs = vec![];
            for &(a, b) in &r.intervals {
                let (pa, pb) = (sx(a), sx(b).max(sx(a) + 0.5));
                match &mut last {
                    Some((_, e)) if pa <= *e + 0.5 => *e = e.max(pb),
                    _ => {
                        if let Some(l) = last.take() {
                            segs.push(l);
                        }
                        last = Some((pa, pb));
                    }
                }
            }
            segs.extend(last);
            for (a, b) in segs {
                writeln!(s, r#"<rect x="{a:.2}" y="{}" width="{:.2}" height="10" fill="{}"/>"#, y - 5.0, b - a, r.color).unwrap();
            }
            for &t in &r.ticks {
                writeln!(s, r#"<line x1="{0:.2}" x2="{0:.2}" y1="{1}" y2="{2}" stroke="{3}"/>"#, sx(t), y - 8.0, y + 8.0, r.color).unwrap();
            }
        }
        let ya = h - 15.0;
        writeln!(s, r##"<line x1="{}" x2="{}" y1="{ya}" y2="{ya}" stroke="#444"/>"##, sx(lo), sx(hi)).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="start">{lo:.6}</text>"#, sx(lo), ya - 4.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{hi:.6}</text>"#, sx(hi), ya - 4.0).unwrap();
        s.push_str("</svg>\n");
        s
    }
}

/// Lower and upper bound curves against depth.
pub fn bounds_chart(title: &str, rows: &[(usize, f64, f64)]) -> String {
    let h = 360.0;
    let lo = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let n = rows.iter().map(|r| r.0).max().unwrap_or(1).max(2) as f64;
    let sx = |d: usize| PAD + (d as f64 - 1.0) / (n - 1.0) * (W - 2.0 * PAD);
    let sy = |v: f64| h - PAD - (v - lo) / (hi - lo) * (h - 2.0 * PAD);
    let line = |pick: fn(&(usize, f64, f64)) -> f64| {
        rows.iter().map(|r| format!("{:.2},{:.2}", sx(r.0), sy(pick(r)))).collect::<Vec<_>>().join(" ")
    };
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{h}" font-family="monospace" font-size="11">"#).unwrap();
    writeln!(s, r#"<text x="{PAD}" y="20" font-size="13">{}</text>"#, esc(title)).unwrap();
    writeln!(s, r##"<polyline fill="none" stroke="#2a6" points="{}"/>"##, line(|r| r.1)).unwrap();
    writeln!(s, r##"<polyline fill="none" stroke="#c33" points="{}"/>"##, line(|r| r.2)).unwrap();
    for r in rows {
        writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, sx(r.0), h - PAD + 16.0, r.0).unwrap();
    }
    writeln!(s, r#"<text x="4" y="{:.2}">{hi:.6}</text>"#, sy(hi)).unwrap();
    writeln!(s, r#"<text x="4" y="{:.2}">{lo:.6}</text>"#, sy(lo)).unwrap();
    writeln!(s, r##"<text x="{}" y="{}" fill="#2a6">lower</text><text x="{}" y="{}" fill="#c33">upper</text>"##, W - 140.0, 20, W - 90.0, 20).unwrap();
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_intervals_merge_into_few_rects() {
        let iv: Vec<(f64, f64)> = (0..10_000).map(|i| (i as f64 * 1e-4, i as f64 * 1e-4 + 5e-5)).collect();
        let s = RowPlot::new("a < b").intervals("k", iv, "#000").render();
        assert!(s.matches("<rect").count() < 10);
        assert!(s.contains("a &lt; b"));
    }
}
