use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;

/// Row-stochastic matrix `W(y|x)`, one row per input symbol.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalChannel {
    rows: Vec<Vec<f64>>,
}

impl ClassicalChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let ny = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || ny == 0 {
            return Err(Error::NotStochastic("empty matrix".into()));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != ny {
                return Err(Error::NotStochastic(format!("row {x} has {} entries, expected {ny}", row.len())));
            }
            if let Some(y) = row.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::NotStochastic(format!("entry ({x}, {y}) = {} is not a probability", row[y])));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NotStochastic(format!("row {x} sums to {sum}")));
            }
        }
        Ok(ClassicalChannel { rows })
    }

    pub fn identity(n: usize) -> Self {
        ClassicalChannel { rows: (0..n).map(|x| (0..n).map(|y| if x == y { 1.0 } else { 0.0 }).collect()).collect() }
    }

    /// Binary symmetric channel with flip probability `alpha`.
    pub fn bsc(alpha: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - alpha, alpha], vec![alpha, 1.0 - alpha]])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }
}

impl<'de> Deserialize<'de> for ClassicalChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: Vec<Vec<f64>>,
        }
        let raw = Raw::deserialize(d)?;
        ClassicalChannel::new(raw.rows).map_err(serde::de::Error::custom)
    }
}

pub fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::NotDistribution("empty vector".into()));
    }
    if let Some(i) = p.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::NotDistribution(format!("entry {i} = {}", p[i])));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(Error::NotDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// `q(y) = Σ_x p(x) W(y|x)`
pub fn classical_apply(w: &ClassicalChannel, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != w.inputs() {
        return Err(Error::DimensionMismatch(format!("distribution has {} entries, channel has {} inputs", p.len(), w.inputs())));
    }
    check_distribution(p)?;
    let mut q = vec![0.0; w.outputs()];
    for (px, row) in p.iter().zip(w.rows()) {
        for (qy, wyx) in q.iter_mut().zip(row) {
            *qy += px * wyx;
        }
    }
    Ok(q)
}
