//! Static SVG figures from result tables.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use plotters::coord::Shift;
use plotters::prelude::*;

use crate::error::{HarnessError, Result};

/// A CSV table kept as text, with typed column access.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.iter().map(|s| s.trim().to_string()).collect();
        let rows = rd
            .records()
            .map(|rec| rec.map(|r| r.iter().map(|s| s.trim().to_string()).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { headers, rows })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }

    pub fn has(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::MissingColumn(name.to_string()))
    }

    pub fn text(&self, name: &str) -> Result<Vec<String>> {
        let i = self.index(name)?;
        Ok(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    pub fn numbers(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[i].parse::<f64>()
                    .map_err(|_| HarnessError::Schema(format!("column {name}: {:?} is not a number", r[i])))
            })
            .collect()
    }

    fn filter(&self, name: &str, value: &str) -> Result<Self> {
        let i = self.index(name)?;
        Ok(Self {
            headers: self.headers.clone(),
            rows: self.rows.iter().filter(|r| r[i] == value).cloned().collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean coverage against mean length, one marker per method and noise
    /// level, with standard-error bars and a vertical line at `1 - α`.
    ValidityEfficiency,
    /// Mean length against γ per φ, and the minimizing γ per φ.
    GammaSweep,
    /// Observed series with its prediction intervals.
    SeriesWithIntervals,
}

impl FromStr for PlotKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "validity_efficiency" => Ok(PlotKind::ValidityEfficiency),
            "gamma_sweep" => Ok(PlotKind::GammaSweep),
            "series_with_intervals" => Ok(PlotKind::SeriesWithIntervals),
            _ => Err(HarnessError::Plot(format!("unknown plot kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub alpha: f64,
    /// Length column of a validity/efficiency plot.
    pub length_column: String,
    /// Restricts series plots to one method when the table has several.
    pub method: Option<String>,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            length_column: "median_length".into(),
            method: None,
            width: 800,
            height: 500,
        }
    }
}

fn plot_err<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Plot(e.to_string())
}

/// Padded range of the finite values, never empty.
fn span(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1e-3) };
    Some((lo - pad, hi + pad))
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    (m, (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt())
}

pub fn render(table: &Table, kind: PlotKind, opts: &PlotOptions) -> Result<String> {
    if table.rows.is_empty() {
        return Err(HarnessError::NoRows);
    }
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (opts.width, opts.height)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        match kind {
            PlotKind::ValidityEfficiency => validity_efficiency(&root, table, opts)?,
            PlotKind::GammaSweep => gamma_sweep(&root, table)?,
            PlotKind::SeriesWithIntervals => series_with_intervals(&root, table, opts)?,
        }
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

pub fn emit_plot(table: &Table, kind: PlotKind, opts: &PlotOptions, path: &Path) -> Result<()> {
    let svg = render(table, kind, opts)?;
    std::fs::write(path, svg)?;
    Ok(())
}

type Area<'a> = DrawingArea<SVGBackend<'a>, Shift>;

fn validity_efficiency(root: &Area<'_>, table: &Table, opts: &PlotOptions) -> Result<()> {
    let methods = table.text("method")?;
    let cov = table.numbers("coverage")?;
    let len = table.numbers(&opts.length_column)?;
    let phis = if table.has("phi") { Some(table.text("phi")?) } else { None };
    // Groups keep first-appearance order of methods.
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<(usize, String), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for i in 0..table.rows.len() {
        if !order.contains(&methods[i]) {
            order.push(methods[i].clone());
        }
        let m = order.iter().position(|o| *o == methods[i]).expect("inserted");
        let phi = phis.as_ref().map_or(String::new(), |p| p[i].clone());
        let g = groups.entry((m, phi)).or_default();
        g.0.push(cov[i]);
        g.1.push(len[i]);
    }
    let points: Vec<(usize, f64, f64, f64, f64)> = groups
        .iter()
        .map(|((m, _), (c, l))| {
            let (cm, cs) = mean_se(c);
            let (lm, ls) = mean_se(l);
            (*m, cm, cs, lm, ls)
        })
        .filter(|p| p.1.is_finite() && p.3.is_finite())
        .collect();
    if points.is_empty() {
        return Err(HarnessError::Plot("no finite points to draw".into()));
    }
    let target = 1.0 - opts.alpha;
    let (x0, x1) = span(points.iter().flat_map(|p| [p.1 - p.2, p.1 + p.2]).chain([target])).expect("finite");
    let (y0, y1) = span(points.iter().flat_map(|p| [p.3 - p.4, p.3 + p.4])).expect("finite");
    let mut chart = ChartBuilder::on(root)
        .margin(20)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("coverage")
        .y_desc(opts.length_column.replace('_', " "))
        .draw()
        .map_err(plot_err)?;
    chart
        .draw_series(DashedLineSeries::new([(target, y0), (target, y1)], 4, 4, BLACK.stroke_width(1)))
        .map_err(plot_err)?;
    for (m, name) in order.iter().enumerate() {
        let color = Palette99::pick(m).to_rgba();
        let mine: Vec<_> = points.iter().filter(|p| p.0 == m).collect();
        chart
            .draw_series(mine.iter().map(|p| ErrorBar::new_vertical(p.1, p.3 - p.4, p.3, p.3 + p.4, color, 6)))
            .map_err(plot_err)?;
        chart
            .draw_series(mine.iter().map(|p| ErrorBar::new_horizontal(p.3, p.1 - p.2, p.1, p.1 + p.2, color, 6)))
            .map_err(plot_err)?;
        chart
            .draw_series(mine.iter().map(|p| Circle::new((p.1, p.3), 4, color.filled())))
            .map_err(plot_err)?
            .label(name.as_str())
            .legend(move |(x, y)| Circle::new((x, y), 4, color.filled()));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    Ok(())
}

fn gamma_sweep(root: &Area<'_>, table: &Table) -> Result<()> {
    let phi = table.numbers("phi")?;
    let gamma = table.numbers("gamma")?;
    let rep = table.numbers("rep")?;
    let len = table.numbers("mean_length")?;
    let mut phis: Vec<f64> = Vec::new();
    for p in &phi {
        if !phis.contains(p) {
            phis.push(*p);
        }
    }
    // (φ, γ) → lengths over repetitions; (φ, rep) → (γ, length) pairs.
    let key = |v: f64| v.to_bits();
    let mut curves: BTreeMap<(u64, u64), Vec<f64>> = BTreeMap::new();
    let mut per_rep: BTreeMap<(u64, u64), Vec<(f64, f64)>> = BTreeMap::new();
    for i in 0..phi.len() {
        curves.entry((key(phi[i]), key(gamma[i]))).or_default().push(len[i]);
        per_rep.entry((key(phi[i]), key(rep[i]))).or_default().push((gamma[i], len[i]));
    }
    let (left, right) = root.split_horizontally(root.dim_in_pixel().0 * 3 / 5);

    let mean_curve = |p: f64| -> Vec<(f64, f64)> {
        let mut c: Vec<(f64, f64)> = curves
            .iter()
            .filter(|((pk, _), _)| *pk == key(p))
            .map(|((_, g), l)| (f64::from_bits(*g), l.iter().sum::<f64>() / l.len() as f64))
            .filter(|(_, l)| l.is_finite())
            .collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c
    };
    let (gx0, gx1) = span(gamma.iter().copied()).ok_or_else(|| HarnessError::Plot("no finite gamma".into()))?;
    let (ly0, ly1) = span(phis.iter().flat_map(|p| mean_curve(*p).into_iter().map(|c| c.1)))
        .ok_or_else(|| HarnessError::Plot("no finite lengths".into()))?;
    let mut chart = ChartBuilder::on(&left)
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(55)
        .build_cartesian_2d(gx0..gx1, ly0..ly1)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("gamma")
        .y_desc("mean length")
        .draw()
        .map_err(plot_err)?;
    for (k, p) in phis.iter().enumerate() {
        let color = Palette99::pick(k).to_rgba();
        chart
            .draw_series(LineSeries::new(mean_curve(*p), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(format!("phi = {p}"))
            .legend(move |(x, y)| PathElement::new([(x, y), (x + 15, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;

    // Count how often each γ minimizes the length of a repetition.
    let mut stars: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for ((pk, _), pairs) in &per_rep {
        let best = pairs
            .iter()
            .filter(|(_, l)| l.is_finite())
            .fold(None::<(f64, f64)>, |acc, &(g, l)| match acc {
                Some((bg, bl)) if bl < l || (bl == l && bg <= g) => Some((bg, bl)),
                _ => Some((g, l)),
            });
        if let Some((g, _)) = best {
            *stars.entry((*pk, key(g))).or_default() += 1;
        }
    }
    let reps = per_rep.len().max(1) as f64 / phis.len().max(1) as f64;
    let (px0, px1) = span(phis.iter().copied()).expect("nonempty");
    let mut right_chart = ChartBuilder::on(&right)
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(55)
        .build_cartesian_2d(px0..px1, gx0..gx1)
        .map_err(plot_err)?;
    right_chart
        .configure_mesh()
        .x_desc("phi")
        .y_desc("gamma*")
        .draw()
        .map_err(plot_err)?;
    right_chart
        .draw_series(stars.iter().map(|((pk, gk), n)| {
            let size = (3.0 + 9.0 * *n as f64 / reps).round() as i32;
            Cross::new((f64::from_bits(*pk), f64::from_bits(*gk)), size, BLACK.stroke_width(2))
        }))
        .map_err(plot_err)?;
    Ok(())
}

fn series_with_intervals(root: &Area<'_>, table: &Table, opts: &PlotOptions) -> Result<()> {
    let table = match (&opts.method, table.has("method")) {
        (Some(m), true) => table.filter("method", m)?,
        _ => table.clone(),
    };
    if table.rows.is_empty() {
        return Err(HarnessError::NoRows);
    }
    let target = table.numbers("target")?;
    let lower = table.numbers("lower")?;
    let upper = table.numbers("upper")?;
    let forecast = if table.has("forecast") { Some(table.numbers("forecast")?) } else { None };
    let (y0, y1) = span(target.iter().chain(&lower).chain(&upper).copied()).expect("targets are finite");
    let n = target.len();
    let mut chart = ChartBuilder::on(root)
        .margin(20)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0f64..(n.max(2) - 1) as f64, y0..y1)
        .map_err(plot_err)?;
    chart.configure_mesh().x_desc("t").y_desc("value").draw().map_err(plot_err)?;
    // Infinite bounds are drawn at the edge of the plot.
    let clip = |v: f64| v.clamp(y0, y1);
    let band = Palette99::pick(0).mix(0.25);
    chart
        .draw_series((0..n).map(|t| {
            let x = t as f64;
            Rectangle::new([(x - 0.4, clip(lower[t])), (x + 0.4, clip(upper[t]))], band.filled())
        }))
        .map_err(plot_err)?;
    if let Some(f) = forecast {
        chart
            .draw_series(LineSeries::new((0..n).map(|t| (t as f64, f[t])), Palette99::pick(1).stroke_width(1)))
            .map_err(plot_err)?;
    }
    chart
        .draw_series(LineSeries::new((0..n).map(|t| (t as f64, target[t])), BLACK.stroke_width(2)))
        .map_err(plot_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> Table {
        Table::read(text.as_bytes()).unwrap()
    }

    #[test]
    fn empty_table_is_rejected() {
        let t = table("method,coverage,median_length\n");
        for kind in [PlotKind::ValidityEfficiency, PlotKind::GammaSweep, PlotKind::SeriesWithIntervals] {
            assert!(matches!(render(&t, kind, &PlotOptions::default()), Err(HarnessError::NoRows)));
        }
    }

    #[test]
    fn missing_columns_are_named() {
        let t = table("method,coverage\nscp,0.9\n");
        match render(&t, PlotKind::ValidityEfficiency, &PlotOptions::default()) {
            Err(HarnessError::MissingColumn(c)) => assert_eq!(c, "median_length"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn one_point_gives_one_marker_with_error_bars() {
        let t = table("method,coverage,median_length\nscp,0.9,3.5\n");
        let svg = render(&t, PlotKind::ValidityEfficiency, &PlotOptions::default()).unwrap();
        // One filled data marker plus its legend entry; error bars mark
        // their center with a hollow circle each.
        let filled = svg.lines().filter(|l| l.starts_with("<circle") && !l.contains("fill=\"none\""));
        assert_eq!(filled.count(), 2);
        assert_eq!(svg.matches("fill=\"none\" stroke=\"#E6194B\"").count(), 2);
        assert!(svg.contains("coverage"));
    }

    #[test]
    fn series_plot_handles_infinite_bounds() {
        let t = table("method,target,forecast,lower,upper\na,1,1.1,0,2\na,2,1.9,-inf,inf\nb,0,0,0,0\n");
        let opts = PlotOptions {
            method: Some("a".into()),
            ..PlotOptions::default()
        };
        let svg = render(&t, PlotKind::SeriesWithIntervals, &opts).unwrap();
        assert_eq!(svg.matches("<rect").count(), 3);
    }
}
