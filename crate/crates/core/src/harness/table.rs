use std::io::Write;

use rand::Rng;
use serde::Serialize;

use super::rng::replicate_rng;
use crate::error::Result;

pub const BOOTSTRAP_RESAMPLES: usize = 500;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Standard error of the mean.
pub fn mean_se(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Bootstrap standard error of the median, deterministic given `key`.
pub fn median_se(values: &[f64], key: &str) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut rng = replicate_rng(0x5eed, "bootstrap", key, 0);
    let mut sample = vec![0.0; n];
    let meds: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            for v in sample.iter_mut() {
                *v = values[rng.random_range(0..n)];
            }
            median(&sample)
        })
        .collect();
    let m = mean(&meds);
    (meds.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (meds.len() - 1) as f64).sqrt()
}

/// Replicate values of one metric for one estimator in one cell.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub cell: String,
    pub estimator: String,
    pub rule: String,
    pub metric: String,
    pub values: Vec<f64>,
}

impl ResultRow {
    pub fn key(&self) -> (&str, &str, &str, &str, &str) {
        (&self.experiment, &self.cell, &self.estimator, &self.rule, &self.metric)
    }

    pub fn median(&self) -> f64 {
        median(&self.values)
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    pub fn median_se(&self) -> f64 {
        let (e, c, est, r, m) = self.key();
        median_se(&self.values, &format!("{e}/{c}/{est}/{r}/{m}"))
    }

    pub fn mean_se(&self) -> f64 {
        mean_se(&self.values)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn push(&mut self, experiment: &str, cell: &str, estimator: &str, rule: &str, metric: &str, values: Vec<f64>) {
        self.rows.push(ResultRow {
            experiment: experiment.into(),
            cell: cell.into(),
            estimator: estimator.into(),
            rule: rule.into(),
            metric: metric.into(),
            values,
        });
    }

    pub fn extend(&mut self, other: ResultTable) {
        self.rows.extend(other.rows);
    }

    pub fn find(&self, cell: &str, estimator: &str, rule: &str, metric: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.cell == cell && r.estimator == estimator && r.rule == rule && r.metric == metric)
    }

    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| a.key().cmp(&b.key()));
    }

    /// Summary CSV, rows sorted by key. `se` is the bootstrap standard error
    /// of the median; `mean` and `mean_se` are appended for averaged tables.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut rows: Vec<&ResultRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.key().cmp(&b.key()));
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record([
            "experiment",
            "cell",
            "estimator",
            "rule",
            "metric",
            "median",
            "se",
            "replicates",
            "mean",
            "mean_se",
        ])?;
        for r in rows {
            wtr.write_record([
                r.experiment.clone(),
                r.cell.clone(),
                r.estimator.clone(),
                r.rule.clone(),
                r.metric.clone(),
                format!("{:.6}", r.median()),
                format!("{:.6}", r.median_se()),
                r.values.len().to_string(),
                format!("{:.6}", r.mean()),
                format!("{:.6}", r.mean_se()),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Replicate-level values, one line per value.
    pub fn write_raw_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut rows: Vec<&ResultRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.key().cmp(&b.key()));
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["experiment", "cell", "estimator", "rule", "metric", "replicate", "value"])?;
        for r in rows {
            for (i, v) in r.values.iter().enumerate() {
                wtr.write_record([
                    r.experiment.as_str(),
                    &r.cell,
                    &r.estimator,
                    &r.rule,
                    &r.metric,
                    &i.to_string(),
                    &format!("{v:e}"),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}
