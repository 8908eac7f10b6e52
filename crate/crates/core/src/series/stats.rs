use serde::{Deserialize, Serialize};

use super::IncrementSeries;
use crate::error::{Error, Result};

/// How kurtosis is reported. Jarque-Bera always uses the excess form.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KurtosisConvention {
    #[default]
    Excess,
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    pub max: f64,
    pub min: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_convention: KurtosisConvention,
    pub jarque_bera: f64,
    pub jb_p_value: f64,
}

impl DescriptiveStats {
    /// Kurtosis under the configured convention.
    pub fn kurtosis(&self) -> f64 {
        match self.kurtosis_convention {
            KurtosisConvention::Excess => self.excess_kurtosis,
            KurtosisConvention::Raw => self.excess_kurtosis + 3.0,
        }
    }
}

/// Moments, median, extremes and the Jarque-Bera normality test.
///
/// Skewness and kurtosis use the biased moment estimators the JB statistic is
/// defined with; `std_dev` is the `n - 1` sample standard deviation.
pub fn describe(x: &IncrementSeries, convention: KurtosisConvention) -> Result<DescriptiveStats> {
    let v = x.values();
    let n = v.len();
    if n < 8 {
        return Err(Error::TooShort { needed: 8, got: n });
    }
    let nf = n as f64;
    let mean = v.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &xi in v {
        let d = xi - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if m2 == 0.0 {
        return Err(Error::ZeroVariance("describe input"));
    }
    let std_dev = (m2 / (nf - 1.0)).sqrt();
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let skewness = m3 / m2.powf(1.5);
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;
    let jarque_bera = nf / 6.0 * (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
    // chi-square(2) survival function
    let jb_p_value = (-jarque_bera / 2.0).exp().clamp(0.0, 1.0);

    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };

    Ok(DescriptiveStats {
        n,
        mean,
        median,
        std_dev,
        max: sorted[n - 1],
        min: sorted[0],
        skewness,
        excess_kurtosis,
        kurtosis_convention: convention,
        jarque_bera,
        jb_p_value,
    })
}
