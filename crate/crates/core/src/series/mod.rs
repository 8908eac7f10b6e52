//! Price ingestion and the derived daily series: log returns, realized
//! volatility and log-volatility increments.

mod io;
mod realized;
mod stats;

pub use io::{fmt_machine, read_intraday, read_series, write_daily, write_intraday, write_series};
pub use realized::{
    realized_volatility, returns_and_vol_changes, DayBoundary, DroppedDay, PriceVolPair, RealizedVolatility,
    COVERAGE_THRESHOLD,
};
pub use stats::{describe, DescriptiveStats, KurtosisConvention};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Minimum increment count accepted by the scaling analyses.
pub const MIN_SCALING_LENGTH: usize = 200;

/// Timestamped prices at intraday resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradaySeries {
    timestamps: Vec<i64>,
    prices: Vec<f64>,
    interval_minutes: u32,
}

impl IntradaySeries {
    pub fn new(timestamps: Vec<i64>, prices: Vec<f64>, interval_minutes: u32) -> Result<Self> {
        if timestamps.len() != prices.len() {
            return Err(Error::LengthMismatch(timestamps.len(), prices.len()));
        }
        if prices.len() < 2 {
            return Err(Error::TooShort { needed: 2, got: prices.len() });
        }
        if interval_minutes == 0 {
            return Err(invalid("interval_minutes must be positive"));
        }
        if let Some(i) = timestamps.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(format!("timestamps not strictly increasing at row {}", i + 1)));
        }
        check_positive(&prices)?;
        Ok(Self { timestamps, prices, interval_minutes })
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn interval_minutes(&self) -> u32 {
        self.interval_minutes
    }

    /// Bars a complete day would contain at the nominal spacing.
    pub fn nominal_bars_per_day(&self) -> usize {
        (24 * 60 / self.interval_minutes) as usize
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Restrict to timestamps in `[from, to)`.
    pub fn restrict(&self, from: Option<i64>, to: Option<i64>) -> Result<Self> {
        let keep = |t: &i64| from.is_none_or(|f| *t >= f) && to.is_none_or(|e| *t < e);
        let (ts, ps): (Vec<i64>, Vec<f64>) =
            self.timestamps.iter().zip(&self.prices).filter(|(t, _)| keep(t)).map(|(t, p)| (*t, *p)).unzip();
        Self::new(ts, ps, self.interval_minutes)
    }
}

/// One value per calendar day.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl DailySeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch(dates.len(), values.len()));
        }
        if let Some(i) = dates.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(format!("dates not strictly increasing at {}", dates[i + 1])));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { dates, values })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesRole {
    Return,
    VolatilityChange,
    Generic,
}

/// A 1-D series of increments with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSeries {
    values: Vec<f64>,
    role: SeriesRole,
    source_id: String,
    dates: Option<Vec<NaiveDate>>,
}

impl IncrementSeries {
    pub fn new(values: Vec<f64>, role: SeriesRole, source_id: impl Into<String>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, role, source_id: source_id.into(), dates: None })
    }

    /// Attach a date index of the same length.
    pub fn with_dates(mut self, dates: Vec<NaiveDate>) -> Result<Self> {
        if dates.len() != self.values.len() {
            return Err(Error::LengthMismatch(dates.len(), self.values.len()));
        }
        self.dates = Some(dates);
        Ok(self)
    }

    pub fn generic(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SeriesRole::Generic, "generic")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn role(&self) -> SeriesRole {
        self.role
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiply every value by `factor`, keeping role and provenance.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = Self::new(self.values.iter().map(|v| v * factor).collect(), self.role, self.source_id.clone())?;
        out.dates = self.dates.clone();
        Ok(out)
    }

    /// Fails unless the series is long enough for a scaling analysis.
    pub fn require_scaling_length(&self) -> Result<()> {
        if self.len() < MIN_SCALING_LENGTH {
            return Err(Error::TooShort { needed: MIN_SCALING_LENGTH, got: self.len() });
        }
        Ok(())
    }
}

fn check_positive(values: &[f64]) -> Result<()> {
    match values.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
        Some(index) => Err(Error::NonPositive { index, value: values[index] }),
        None => Ok(()),
    }
}

/// `ln p[t+1] - ln p[t]`, dated by the later observation.
pub fn log_returns(prices: &DailySeries) -> Result<IncrementSeries> {
    let p = prices.values();
    if p.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: p.len() });
    }
    check_positive(p)?;
    let values = p.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
    IncrementSeries::new(values, SeriesRole::Return, "log_returns")?.with_dates(prices.dates()[1..].to_vec())
}

/// `ln sigma[t+1] - ln sigma[t]`. Zero-volatility days must be removed upstream.
pub fn vol_changes(sigma: &DailySeries) -> Result<IncrementSeries> {
    let s = sigma.values();
    if s.len() < 2 {
        return Err(Error::TooShort { needed: 2, got: s.len() });
    }
    if let Some(i) = s.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositiveVolatility { date: sigma.dates()[i].to_string(), value: s[i] });
    }
    let values = s.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
    IncrementSeries::new(values, SeriesRole::VolatilityChange, "vol_changes")?.with_dates(sigma.dates()[1..].to_vec())
}
