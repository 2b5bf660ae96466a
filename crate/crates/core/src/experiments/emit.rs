use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "experiment",
    "sweep_name",
    "sweep_value",
    "trial",
    "seed",
    "method",
    "error",
    "iterations",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub sweep_name: String,
    pub sweep_value: f64,
    /// Position of `sweep_value` in the sweep; not written to CSV.
    pub sweep_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub method: String,
    pub error: f64,
    pub iterations: usize,
    pub wall_ms: f64,
}

/// Writes records as CSV with the fixed [`CSV_HEADER`]. Floats use the
/// shortest representation that parses back to the same value.
pub fn write_csv_to<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.sweep_name.clone(),
            r.sweep_value.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.method.clone(),
            r.error.to_string(),
            r.iterations.to_string(),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv_to(records, std::io::BufWriter::new(file))
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = row.get(i).ok_or_else(|| Error::Io(format!("missing column {}", CSV_HEADER[i])))?;
    raw.parse()
        .map_err(|_| Error::Io(format!("bad value '{raw}' in column {}", CSV_HEADER[i])))
}

/// Parses CSV written by [`write_csv_to`]. Sweep indices are assigned in
/// order of first appearance.
pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Io(format!("unexpected CSV header {header:?}")));
    }
    let mut seen: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let sweep_value: f64 = field(&row, 2)?;
        let sweep_index = match seen.iter().position(|&v| v == sweep_value) {
            Some(i) => i,
            None => {
                seen.push(sweep_value);
                seen.len() - 1
            }
        };
        out.push(ExperimentRecord {
            experiment: field(&row, 0)?,
            sweep_name: field(&row, 1)?,
            sweep_value,
            sweep_index,
            trial: field(&row, 3)?,
            seed: field(&row, 4)?,
            method: field(&row, 5)?,
            error: field(&row, 6)?,
            iterations: field(&row, 7)?,
            wall_ms: field(&row, 8)?,
        });
    }
    Ok(out)
}

pub fn read_csv(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv_from(file)
}

/// Mean error of one method at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub method: String,
    pub sweep_value: f64,
    pub mean_error: f64,
    pub count: usize,
}

/// Mean error per `(method, sweep value)`, methods in order of first
/// appearance and sweep values in sweep order.
pub fn mean_series(records: &[ExperimentRecord]) -> Vec<SeriesPoint> {
    let mut methods: Vec<&str> = Vec::new();
    let mut sweeps: Vec<(usize, f64)> = Vec::new();
    for r in records {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
        if !sweeps.iter().any(|&(i, _)| i == r.sweep_index) {
            sweeps.push((r.sweep_index, r.sweep_value));
        }
    }
    sweeps.sort_by_key(|&(i, _)| i);
    let mut out = Vec::new();
    for m in methods {
        for &(si, value) in &sweeps {
            let errs: Vec<f64> = records
                .iter()
                .filter(|r| r.method == m && r.sweep_index == si)
                .map(|r| r.error)
                .collect();
            if errs.is_empty() {
                continue;
            }
            out.push(SeriesPoint {
                method: m.to_string(),
                sweep_value: value,
                mean_error: errs.iter().sum::<f64>() / errs.len() as f64,
                count: errs.len(),
            });
        }
    }
    out
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Line chart of mean error against the sweep value, one polyline per
/// method.
pub fn render_svg(series: &[SeriesPoint], title: &str, x_label: &str) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 150.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let xs = series.iter().map(|p| p.sweep_value);
    let ys = series.iter().map(|p| p.mean_error);
    let (mut x0, mut x1) = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max));
    let mut y1 = ys.fold(0.0, f64::max);
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if !(y1 > 0.0) {
        y1 = 1.0;
    }
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - y / y1 * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<path d="M{left},{top} V{} H{}" fill="none" stroke="black"/>"#,
        top + ph,
        left + pw
    );
    for i in 0..=4 {
        let yv = y1 * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{:.3e}</text>"#,
            left - 6.0,
            sy(yv) + 4.0,
            yv
        );
        let xv = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, sx(xv), top + ph + 18.0, trim(xv));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16,{}) rotate(-90)" text-anchor="middle">mean error</text>"#,
        top + ph / 2.0
    );

    let mut methods: Vec<&str> = Vec::new();
    for p in series {
        if !methods.contains(&p.method.as_str()) {
            methods.push(&p.method);
        }
    }
    for (mi, m) in methods.iter().enumerate() {
        let color = COLORS[mi % COLORS.len()];
        let pts: Vec<String> = series
            .iter()
            .filter(|p| p.method == *m)
            .map(|p| format!("{:.2},{:.2}", sx(p.sweep_value), sy(p.mean_error)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        for pt in &pts {
            let (cx, cy) = pt.split_once(',').unwrap_or(("0", "0"));
            let _ = writeln!(svg, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let ly = top + 10.0 + 18.0 * mi as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            left + pw + 15.0,
            left + pw + 40.0,
            left + pw + 46.0,
            ly + 4.0,
            escape(m)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(series: &[SeriesPoint], title: &str, x_label: &str, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(series, title, x_label)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(si: usize, value: f64, trial: usize, method: &str, error: f64) -> ExperimentRecord {
        ExperimentRecord {
            experiment: "random-m".into(),
            sweep_name: "m".into(),
            sweep_value: value,
            sweep_index: si,
            trial,
            seed: 1 + trial as u64 + 1_000_000 * si as u64,
            method: method.into(),
            error,
            iterations: 10,
            wall_ms: 1.25,
        }
    }

    fn sample() -> Vec<ExperimentRecord> {
        let mut v = Vec::new();
        for (si, value) in [30.0, 50.0, 80.0].into_iter().enumerate() {
            for t in 0..3 {
                v.push(rec(si, value, t, "js", 0.1 / (1.0 + si as f64) + 0.01 * t as f64 + 1e-17));
                v.push(rec(si, value, t, "alt-min", 0.3 / 7.0 * (1 + t) as f64));
            }
        }
        v
    }

    #[test]
    fn empty_records_give_header_only() {
        let mut buf = Vec::new();
        write_csv_to(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn six_mean_rows_for_two_methods_three_points() {
        let series = mean_series(&sample());
        assert_eq!(series.len(), 6);
        assert_eq!(series[0].method, "js");
        assert_eq!(series[3].method, "alt-min");
        assert!(series.iter().all(|p| p.count == 3));
    }

    #[test]
    fn csv_round_trip_preserves_means_exactly() {
        let records = sample();
        let mut buf = Vec::new();
        write_csv_to(&records, &mut buf).unwrap();
        let back = read_csv_from(buf.as_slice()).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.error.to_bits(), b.error.to_bits());
            assert_eq!(a.sweep_index, b.sweep_index);
        }
        assert_eq!(mean_series(&records), mean_series(&back));
    }

    #[test]
    fn bad_header_rejected() {
        assert!(read_csv_from("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn svg_has_one_line_per_method() {
        let svg = render_svg(&mean_series(&sample()), "errors <M>", "M");
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 6);
        assert!(svg.contains("errors &lt;M&gt;"));
        assert!(render_svg(&[], "empty", "x").contains("</svg>"));
    }
}
