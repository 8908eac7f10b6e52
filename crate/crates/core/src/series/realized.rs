use chrono::{DateTime, NaiveDate};
use serde::Serialize;

use super::{log_returns, vol_changes, DailySeries, IncrementSeries, IntradaySeries};
use crate::error::{Error, Result};

/// Fraction of nominal bars a day needs to enter the volatility series.
pub const COVERAGE_THRESHOLD: f64 = 0.8;

/// Calendar rule assigning a timestamp to a trading day.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DayBoundary {
    /// Offset added to UTC before taking the calendar date.
    pub utc_offset_minutes: i32,
}

impl DayBoundary {
    pub const UTC: DayBoundary = DayBoundary { utc_offset_minutes: 0 };

    pub fn day_of(&self, epoch_seconds: i64) -> NaiveDate {
        let shifted = epoch_seconds + 60 * self.utc_offset_minutes as i64;
        DateTime::from_timestamp(shifted, 0).expect("timestamp within chrono range").date_naive()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedDay {
    pub date: NaiveDate,
    pub reason: String,
}

/// Daily volatility estimates with the closing prices of the same days.
#[derive(Debug, Clone)]
pub struct RealizedVolatility {
    /// `sqrt(RV_t)` for every retained day.
    pub sigma: DailySeries,
    /// Last observed price of each retained day.
    pub closes: DailySeries,
    pub dropped: Vec<DroppedDay>,
}

/// Realized volatility from intraday prices.
///
/// Each return `ln p_j - ln p_{j-1}` spanning exactly one nominal interval is
/// credited to the day of its closing bar; returns across gaps are skipped.
/// A day is kept when it holds at least [`COVERAGE_THRESHOLD`] of the nominal
/// bar count.
pub fn realized_volatility(intraday: &IntradaySeries, boundary: DayBoundary) -> Result<RealizedVolatility> {
    let ts = intraday.timestamps();
    let ps = intraday.prices();
    let step = 60 * intraday.interval_minutes() as i64;
    let nominal = intraday.nominal_bars_per_day();
    let required = (COVERAGE_THRESHOLD * nominal as f64).ceil() as usize;

    struct Day {
        date: NaiveDate,
        rv: f64,
        bars: usize,
        close: f64,
    }
    let mut days: Vec<Day> = Vec::new();
    for j in 0..ts.len() {
        let date = boundary.day_of(ts[j]);
        if days.last().is_none_or(|d| d.date != date) {
            days.push(Day { date, rv: 0.0, bars: 0, close: ps[j] });
        }
        let day = days.last_mut().unwrap();
        day.close = ps[j];
        if j > 0 && ts[j] - ts[j - 1] == step {
            let r = ps[j].ln() - ps[j - 1].ln();
            day.rv += r * r;
            day.bars += 1;
        }
    }

    let mut dates = Vec::new();
    let mut sigma = Vec::new();
    let mut closes = Vec::new();
    let mut dropped = Vec::new();
    for d in days {
        if d.bars < required.max(1) {
            log::warn!("{}: {} of {} bars, below coverage threshold", d.date, d.bars, nominal);
            dropped.push(DroppedDay { date: d.date, reason: format!("coverage {}/{} bars", d.bars, nominal) });
            continue;
        }
        dates.push(d.date);
        sigma.push(d.rv.sqrt());
        closes.push(d.close);
    }
    if dates.is_empty() {
        return Err(Error::NoDays);
    }
    Ok(RealizedVolatility {
        sigma: DailySeries::new(dates.clone(), sigma)?,
        closes: DailySeries::new(dates, closes)?,
        dropped,
    })
}

/// Returns and volatility changes on a shared date index.
#[derive(Debug, Clone)]
pub struct PriceVolPair {
    pub returns: IncrementSeries,
    pub vol_changes: IncrementSeries,
    pub sigma: DailySeries,
    pub closes: DailySeries,
    pub dropped: Vec<DroppedDay>,
}

/// Builds `r_t` and `v_t` of equal length from intraday data.
///
/// Zero-volatility days are removed from both the close and volatility series
/// before differencing, so both increments are taken between the same pair of
/// retained days.
pub fn returns_and_vol_changes(intraday: &IntradaySeries, boundary: DayBoundary) -> Result<PriceVolPair> {
    let rv = realized_volatility(intraday, boundary)?;
    let mut dropped = rv.dropped;
    let mut dates = Vec::new();
    let mut sig = Vec::new();
    let mut cls = Vec::new();
    for ((d, s), c) in rv.sigma.dates().iter().zip(rv.sigma.values()).zip(rv.closes.values()) {
        if *s > 0.0 {
            dates.push(*d);
            sig.push(*s);
            cls.push(*c);
        } else {
            log::warn!("{d}: zero realized volatility, day excluded");
            dropped.push(DroppedDay { date: *d, reason: "zero realized volatility".into() });
        }
    }
    dropped.sort_by_key(|d| d.date);
    let sigma = DailySeries::new(dates.clone(), sig)?;
    let closes = DailySeries::new(dates, cls)?;
    let returns = log_returns(&closes)?;
    let vol = vol_changes(&sigma)?;
    Ok(PriceVolPair { returns, vol_changes: vol, sigma, closes, dropped })
}
