//! `--sweep KEY=START:STEP:END` ranges over scenario file fields.

use anyhow::{anyhow, bail, Result};
use serde_json::Value;
use std::str::FromStr;

/// Inclusive arithmetic range for one dotted scenario field, such as
/// `cost.k` or `sensor.lateral_noise_sigma_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRange {
    pub key: String,
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (key, range) = s
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=START:STEP:END, got {s:?}"))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, step, end] = parts[..] else {
            return Err(format!("expected START:STEP:END, got {range:?}"));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("{v:?} is not a finite number"))
        };
        let r = SweepRange {
            key: key.trim().to_string(),
            start: num(start)?,
            step: num(step)?,
            end: num(end)?,
        };
        if r.key.is_empty() {
            return Err("sweep key is empty".into());
        }
        if r.step <= 0.0 || r.end < r.start {
            return Err(format!("sweep {s:?} needs STEP > 0 and END >= START"));
        }
        Ok(r)
    }
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Every combination of the ranges' values, first range varying slowest.
pub fn grid(ranges: &[SweepRange]) -> Vec<Vec<(String, f64)>> {
    let mut out = vec![Vec::new()];
    for r in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                r.values().into_iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((r.key.clone(), v));
                    p
                })
            })
            .collect();
    }
    out
}

/// Directory name for one combination, e.g. `cost.k=0.5,seed=3`.
pub fn label(point: &[(String, f64)]) -> String {
    point
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Overwrites the existing field at dotted `key`. Integer fields stay
/// integers and reject fractional values.
pub fn set_field(doc: &mut Value, key: &str, value: f64) -> Result<()> {
    let mut slot = doc;
    for part in key.split('.') {
        slot = slot
            .get_mut(part)
            .ok_or_else(|| anyhow!("sweep key {key:?}: no field {part:?} in the scenario"))?;
    }
    *slot = match slot {
        Value::Number(n) if n.is_u64() || n.is_i64() => {
            if value.fract() != 0.0 {
                bail!("sweep key {key:?} is an integer field, got {value}");
            }
            if n.is_u64() && value >= 0.0 {
                Value::from(value as u64)
            } else {
                Value::from(value as i64)
            }
        }
        Value::Number(_) => serde_json::Number::from_f64(value)
            .map(Value::Number)
            .ok_or_else(|| anyhow!("sweep key {key:?}: {value} is not representable"))?,
        _ => bail!("sweep key {key:?} is not a numeric field"),
    };
    Ok(())
}
