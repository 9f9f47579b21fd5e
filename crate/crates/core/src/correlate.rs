//! Date-aligned correlation of average dormancy with the USD/BTC rate.

use std::collections::HashMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::io::PricePoint;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorrelateError {
    #[error("only {0} aligned days after filtering; need at least 2")]
    InsufficientOverlap(usize),
    #[error("{0} series is constant over the aligned days")]
    ZeroVariance(&'static str),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Pearson,
    /// Pearson on average ranks.
    Spearman,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub n: usize,
    pub method: Method,
    pub pearson_r: f64,
    pub r_squared: f64,
    pub threshold_usd: Option<f64>,
}

/// Correlate dormancy against price on days present in both series. With a
/// threshold, only days priced strictly above it are kept.
pub fn correlate(
    dormancy: &[(NaiveDate, f64)],
    prices: &[PricePoint],
    threshold_usd: Option<f64>,
    method: Method,
) -> Result<CorrelationReport, CorrelateError> {
    let price_by_day: HashMap<NaiveDate, f64> =
        prices.iter().map(|p| (p.day, p.usd_per_btc)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = dormancy
        .iter()
        .filter_map(|(d, dorm)| price_by_day.get(d).map(|&p| (*dorm, p)))
        .filter(|&(_, p)| threshold_usd.is_none_or(|t| p > t))
        .unzip();
    if xs.len() < 2 {
        return Err(CorrelateError::InsufficientOverlap(xs.len()));
    }
    let r = match method {
        Method::Pearson => pearson(&xs, &ys)?,
        Method::Spearman => pearson(&ranks(&xs), &ranks(&ys))?,
    };
    Ok(CorrelationReport {
        n: xs.len(),
        method,
        pearson_r: r,
        r_squared: r * r,
        threshold_usd,
    })
}

/// Sample Pearson correlation, computed on mean-centred values.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, CorrelateError> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(CorrelateError::ZeroVariance("dormancy"));
    }
    if syy == 0.0 {
        return Err(CorrelateError::ZeroVariance("price"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks, ties sharing their average rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}
