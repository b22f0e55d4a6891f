//! Day-ahead electricity price pipeline: one conformal run per delivery hour
//! over a sliding window of past days.

use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use ndarray::{Array1, Array2};
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tscp_core::metrics::median;
use tscp_core::models::RegressorSpec;
use tscp_core::seed::{derive, rng, stream};
use tscp_core::{RunResult, SeriesDataset};

use crate::bench::write_rows;
use crate::error::{HarnessError, Result};
use crate::registry::Method;
use crate::runner::{run_methods, Metrics, RunSettings};

pub const HOURS: usize = 24;
/// Consumption forecast, 24 prices of the previous day, 24 prices of the
/// same day one week before and a one-hot day of week.
pub const N_FEATURES: usize = 1 + 2 * HOURS + 7;

#[derive(Debug, Clone, PartialEq)]
pub struct PriceRecord {
    pub datetime: NaiveDateTime,
    /// EUR/MWh.
    pub price: f64,
    /// MW.
    pub fc_consumption: f64,
    /// 1 (Monday) to 7 (Sunday).
    pub dow: u8,
    pub price_d1: [f64; HOURS],
    pub price_d7: [f64; HOURS],
}

pub fn header() -> Vec<String> {
    let mut h: Vec<String> = ["datetime", "price", "fc_consumption", "dow"].map(String::from).to_vec();
    h.extend((0..HOURS).map(|i| format!("price_d1_h{i}")));
    h.extend((0..HOURS).map(|i| format!("price_d7_h{i}")));
    h
}

fn parse_datetime(s: &str) -> Option<NaiveDateTime> {
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

pub fn read_price_csv<R: Read>(r: R) -> Result<Vec<PriceRecord>> {
    let mut rd = csv::Reader::from_reader(r);
    let found: Vec<String> = rd.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if found != header() {
        return Err(HarnessError::Schema(format!(
            "expected header `datetime,price,fc_consumption,dow,price_d1_h0..h23,price_d7_h0..h23`, found {} columns starting with {:?}",
            found.len(),
            found.iter().take(4).collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let row = line + 2;
        let datetime = parse_datetime(rec[0].trim())
            .ok_or_else(|| HarnessError::Schema(format!("row {row}: bad datetime {:?}", &rec[0])))?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| HarnessError::Schema(format!("row {row}: bad value {:?} in column {}", &rec[i], header()[i])))
        };
        let dow = rec[3]
            .trim()
            .parse::<u8>()
            .ok()
            .filter(|d| (1..=7).contains(d))
            .ok_or_else(|| HarnessError::Schema(format!("row {row}: day of week {:?} not in 1..=7", &rec[3])))?;
        let mut price_d1 = [0.0; HOURS];
        let mut price_d7 = [0.0; HOURS];
        for h in 0..HOURS {
            price_d1[h] = num(4 + h)?;
            price_d7[h] = num(4 + HOURS + h)?;
        }
        out.push(PriceRecord {
            datetime,
            price: num(1)?,
            fc_consumption: num(2)?,
            dow,
            price_d1,
            price_d7,
        });
    }
    Ok(out)
}

pub fn write_price_csv<W: Write>(records: &[PriceRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header())?;
    for r in records {
        let mut fields = vec![
            r.datetime.format("%Y-%m-%dT%H:%M:%S").to_string(),
            r.price.to_string(),
            r.fc_consumption.to_string(),
            r.dow.to_string(),
        ];
        fields.extend(r.price_d1.iter().chain(&r.price_d7).map(f64::to_string));
        wr.write_record(&fields)?;
    }
    wr.flush()?;
    Ok(())
}

/// The 24 records of one delivery day, indexed by hour.
#[derive(Debug, Clone, PartialEq)]
pub struct Day {
    pub date: NaiveDate,
    pub hours: Vec<PriceRecord>,
}

impl Day {
    fn prices(&self) -> [f64; HOURS] {
        std::array::from_fn(|h| self.hours[h].price)
    }
}

/// Groups records into consecutive complete days and checks that the lag
/// columns agree with the prices they refer to.
pub fn group_days(records: &[PriceRecord]) -> Result<Vec<Day>> {
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| r.datetime);
    let mut days: Vec<Day> = Vec::new();
    for r in sorted {
        let date = r.datetime.date();
        match days.last_mut() {
            Some(d) if d.date == date => d.hours.push(r),
            _ => days.push(Day { date, hours: vec![r] }),
        }
    }
    for (k, d) in days.iter().enumerate() {
        if d.hours.len() != HOURS {
            return Err(HarnessError::Schema(format!(
                "{}: expected {HOURS} hourly rows, found {}",
                d.date,
                d.hours.len()
            )));
        }
        for (h, r) in d.hours.iter().enumerate() {
            if r.datetime.hour() as usize != h || r.datetime.minute() != 0 || r.datetime.second() != 0 {
                return Err(HarnessError::Schema(format!("{}: rows are not on hours 0..23", d.date)));
            }
        }
        let dow = d.date.weekday().number_from_monday() as u8;
        if d.hours.iter().any(|r| r.dow != dow) {
            return Err(HarnessError::Schema(format!("{}: day of week is not {dow}", d.date)));
        }
        if k > 0 && days[k - 1].date + Duration::days(1) != d.date {
            return Err(HarnessError::Schema(format!("{}: missing day before this date", d.date)));
        }
        for (lag, pick) in [(1usize, 0usize), (7, 1)] {
            if k < lag {
                continue;
            }
            let past = days[k - lag].prices();
            for r in &d.hours {
                let col = if pick == 0 { &r.price_d1 } else { &r.price_d7 };
                if col.iter().zip(&past).any(|(a, b)| (a - b).abs() > 1e-6 * b.abs().max(1.0)) {
                    return Err(HarnessError::Schema(format!(
                        "{}: price_d{lag} columns disagree with the prices of {}",
                        d.date,
                        days[k - lag].date
                    )));
                }
            }
        }
    }
    Ok(days)
}

fn features(r: &PriceRecord) -> [f64; N_FEATURES] {
    let mut f = [0.0; N_FEATURES];
    f[0] = r.fc_consumption;
    f[1..=HOURS].copy_from_slice(&r.price_d1);
    f[1 + HOURS..1 + 2 * HOURS].copy_from_slice(&r.price_d7);
    f[1 + 2 * HOURS + (r.dow as usize - 1)] = 1.0;
    f
}

/// Dataset of one delivery hour over the last `window + test` days: the
/// first `window` days form the initial window, the last `test` are predicted.
pub fn hour_dataset(days: &[Day], hour: usize, window: usize, test: usize) -> Result<(SeriesDataset, Vec<NaiveDate>)> {
    assert!(hour < HOURS);
    let need = window + test;
    if days.len() < need {
        return Err(HarnessError::InsufficientHistory(format!(
            "{} days available, {need} required ({window} window + {test} test)",
            days.len()
        )));
    }
    let used = &days[days.len() - need..];
    let x = Array2::from_shape_fn((need, N_FEATURES), |(i, j)| features(&used[i].hours[hour])[j]);
    let y = Array1::from_shape_fn(need, |i| used[i].hours[hour].price);
    let dates = used[window..].iter().map(|d| d.date).collect();
    Ok((SeriesDataset::new(x, y, window, test)?, dates))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceConfig {
    pub alpha: f64,
    pub methods: Vec<Method>,
    /// Days in the sliding window (half training, half calibration).
    pub window_days: usize,
    /// Final days that are predicted.
    pub test_days: usize,
    /// Models are refit every `refit_every` days.
    pub refit_every: usize,
    pub model: RegressorSpec,
    pub seed: u64,
}

impl Default for PriceConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            methods: default_price_methods(),
            window_days: 3 * 365,
            test_days: 365,
            refit_every: 1,
            model: RegressorSpec::ridge(1.0),
            seed: 0,
        }
    }
}

pub fn default_price_methods() -> Vec<Method> {
    vec![
        Method::Scp,
        Method::Osscp,
        Method::Enbpi,
        Method::Aci(0.01),
        Method::Aci(0.05),
        Method::Agaci,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSummaryRow {
    pub method: String,
    pub coverage: f64,
    pub median_length: f64,
    pub avg_length_imputed: f64,
    pub pct_infinite: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceHourRow {
    pub method: String,
    pub hour: usize,
    pub coverage: f64,
    pub median_length: f64,
    pub avg_length_imputed: f64,
    pub pct_infinite: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub method: String,
    pub date: NaiveDate,
    pub hour: usize,
    pub target: f64,
    pub forecast: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceOutput {
    /// All hours pooled, one row per method.
    pub summary: Vec<PriceSummaryRow>,
    pub by_hour: Vec<PriceHourRow>,
    /// Interval rows of each hour.
    pub intervals: Vec<Vec<IntervalRow>>,
}

impl PriceOutput {
    pub fn coverage(&self, method: Method) -> Option<f64> {
        let name = method.to_string();
        self.summary.iter().find(|r| r.method == name).map(|r| r.coverage)
    }
}

fn pooled(alpha: f64, runs: &[&RunResult]) -> RunResult {
    let cat = |f: fn(&RunResult) -> &Vec<f64>| runs.iter().flat_map(|r| f(r).iter().copied()).collect::<Vec<_>>();
    RunResult::new(
        alpha,
        runs.iter().flat_map(|r| r.intervals.iter().copied()).collect(),
        cat(|r| &r.point_forecasts),
        cat(|r| &r.targets),
        None,
    )
}

pub fn run_price_pipeline(records: &[PriceRecord], cfg: &PriceConfig) -> Result<PriceOutput> {
    if cfg.methods.is_empty() {
        return Err(HarnessError::Config("at least one method is required".into()));
    }
    let days = group_days(records)?;
    let settings = RunSettings {
        refit_every: cfg.refit_every,
        ..RunSettings::new(cfg.alpha)
    };
    let per_hour: Vec<(Vec<(Method, RunResult)>, Vec<NaiveDate>)> = (0..HOURS)
        .into_par_iter()
        .map(|h| {
            let (data, dates) = hour_dataset(&days, h, cfg.window_days, cfg.test_days)?;
            let runs = run_methods(&cfg.methods, &cfg.model, &data, &settings, derive(cfg.seed, stream::REPETITION, h as u64))?;
            Ok((runs, dates))
        })
        .collect::<Result<_>>()?;

    let mut summary = Vec::new();
    let mut by_hour = Vec::new();
    for (k, m) in cfg.methods.iter().enumerate() {
        let runs: Vec<&RunResult> = per_hour.iter().map(|(r, _)| &r[k].1).collect();
        let x = Metrics::of(&pooled(cfg.alpha, &runs));
        summary.push(PriceSummaryRow {
            method: m.to_string(),
            coverage: x.coverage,
            median_length: median(&runs.iter().flat_map(|r| r.lengths()).collect::<Vec<_>>()),
            avg_length_imputed: runs.iter().map(|r| Metrics::of(r).avg_length_imputed).sum::<f64>() / HOURS as f64,
            pct_infinite: x.pct_infinite,
        });
        for (h, r) in runs.iter().enumerate() {
            let x = Metrics::of(r);
            by_hour.push(PriceHourRow {
                method: m.to_string(),
                hour: h,
                coverage: x.coverage,
                median_length: x.median_length,
                avg_length_imputed: x.avg_length_imputed,
                pct_infinite: x.pct_infinite,
            });
        }
    }
    let intervals = per_hour
        .iter()
        .enumerate()
        .map(|(h, (runs, dates))| {
            runs.iter()
                .flat_map(|(m, r)| {
                    (0..r.len()).map(move |t| IntervalRow {
                        method: m.to_string(),
                        date: dates[t],
                        hour: h,
                        target: r.targets[t],
                        forecast: r.point_forecasts[t],
                        lower: r.intervals[t].lower(),
                        upper: r.intervals[t].upper(),
                    })
                })
                .collect()
        })
        .collect();
    Ok(PriceOutput {
        summary,
        by_hour,
        intervals,
    })
}

/// Writes `price_summary.csv`, `price_by_hour.csv` and one
/// `intervals_hHH.csv` per delivery hour into `dir`.
pub fn write_price_outputs(out: &PriceOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_rows(&out.summary, std::fs::File::create(dir.join("price_summary.csv"))?)?;
    write_rows(&out.by_hour, std::fs::File::create(dir.join("price_by_hour.csv"))?)?;
    for (h, rows) in out.intervals.iter().enumerate() {
        write_rows(rows, std::fs::File::create(dir.join(format!("intervals_h{h:02}.csv")))?)?;
    }
    Ok(())
}

/// Daily load profile, peaking in the morning and the early evening.
fn load_shape(h: usize) -> f64 {
    let h = h as f64;
    -0.5 * (2.0 * std::f64::consts::PI * (h - 4.0) / 24.0).cos() + 0.6 * (-(h - 19.0).powi(2) / 6.0).exp()
}

/// Synthetic hourly prices starting on 2016-01-01: an annual and daily
/// consumption cycle, weekend effects, a slow upward drift in level and
/// volatility, and AR(1) noise across consecutive hours.
pub fn standin_records(days: usize, seed: u64) -> Vec<PriceRecord> {
    const LAG: usize = 7;
    let total = days + LAG;
    let start = NaiveDate::from_ymd_opt(2016, 1, 1).expect("valid date") - Duration::days(LAG as i64);
    let mut r = rng(derive(seed, stream::NOISE, 0));
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let phi: f64 = 0.95;
    let mut eps = 0.0;
    let mut prices = vec![[0.0; HOURS]; total];
    let mut cons = vec![[0.0; HOURS]; total];
    for d in 0..total {
        let date = start + Duration::days(d as i64);
        let weekend = if date.weekday().number_from_monday() >= 6 { 1.0 } else { 0.0 };
        let frac = d as f64 / total as f64;
        let season = (2.0 * std::f64::consts::PI * date.ordinal0() as f64 / 365.25).cos();
        let scale = 4.0 * (1.0 + 1.5 * frac);
        for h in 0..HOURS {
            let c = 55_000.0 + 12_000.0 * season + 6_000.0 * load_shape(h) - 4_000.0 * weekend
                + 1_500.0 * std.sample(&mut r);
            eps = phi * eps + scale * (1.0 - phi * phi).sqrt() * std.sample(&mut r);
            cons[d][h] = c;
            prices[d][h] = 35.0 + 10.0 * frac + 0.0006 * (c - 55_000.0) + 8.0 * load_shape(h) - 6.0 * weekend + eps;
        }
    }
    let mut out = Vec::with_capacity(days * HOURS);
    for d in LAG..total {
        let date = start + Duration::days(d as i64);
        for h in 0..HOURS {
            out.push(PriceRecord {
                datetime: date.and_hms_opt(h as u32, 0, 0).expect("valid hour"),
                price: prices[d][h],
                fc_consumption: cons[d][h],
                dow: date.weekday().number_from_monday() as u8,
                price_d1: prices[d - 1],
                price_d7: prices[d - LAG],
            });
        }
    }
    out
}
