//! Synthetic layout-dependent-effect evaluator.
//!
//! A deterministic spatial gradient field (quadratic polynomial plus Gaussian
//! bumps) stands in for silicon-level variation. A device's effective
//! parameter deviation is the mean field value over its unit-cell centers;
//! pair mismatch is the absolute difference of the two deviations. Every
//! `evaluate` call consumes exactly one unit of the shared budget, so
//! evaluation counts are directly comparable across optimizers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CircuitSpec, Placement};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("evaluation budget exhausted ({used}/{limit})")]
    BudgetExhausted { used: u64, limit: u64 },
}

/// Gaussian bump: amp * exp(-((x-x0)^2 + (y-y0)^2) / (2 sigma^2)).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bump {
    pub x0: f64,
    pub y0: f64,
    pub amp: f64,
    pub sigma: f64,
}

/// Polynomial coefficients for f(x,y) = sum c_ij x^i y^j with i + j <= 2.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct PolyCoeffs {
    #[serde(default)]
    pub c00: f64,
    #[serde(default)]
    pub c10: f64,
    #[serde(default)]
    pub c01: f64,
    #[serde(default)]
    pub c20: f64,
    #[serde(default)]
    pub c02: f64,
    #[serde(default)]
    pub c11: f64,
}

impl PolyCoeffs {
    pub fn is_linear(&self) -> bool {
        self.c20 == 0.0 && self.c02 == 0.0 && self.c11 == 0.0
    }
}

/// Deterministic spatial variation function.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GradientField {
    #[serde(default)]
    pub poly: PolyCoeffs,
    #[serde(default)]
    pub bumps: Vec<Bump>,
}

impl GradientField {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let p = &self.poly;
        let mut v = p.c00 + p.c10 * x + p.c01 * y + p.c20 * x * x + p.c02 * y * y + p.c11 * x * y;
        for b in &self.bumps {
            let dx = x - b.x0;
            let dy = y - b.y0;
            v += b.amp * (-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma)).exp();
        }
        v
    }

    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        for (i, b) in self.bumps.iter().enumerate() {
            if !(b.sigma > 0.0) {
                errs.push(format!("field.bumps[{i}]: sigma must be > 0 (got {})", b.sigma));
            }
            for (name, v) in [("x0", b.x0), ("y0", b.y0), ("amp", b.amp)] {
                if !v.is_finite() {
                    errs.push(format!("field.bumps[{i}].{name}: must be finite"));
                }
            }
        }
        errs
    }
}

/// Mean field value over cell centers; cell (x, y) samples at (x+0.5, y+0.5).
pub fn mean_field_over_cells(field: &GradientField, cells: &[(i32, i32)]) -> f64 {
    let sum: f64 = cells
        .iter()
        .map(|&(x, y)| field.value(x as f64 + 0.5, y as f64 + 0.5))
        .sum();
    sum / cells.len() as f64
}

/// Fractional parameter deviation of one device.
pub fn device_param(field: &GradientField, p: &Placement, group: usize, device: usize) -> f64 {
    mean_field_over_cells(field, p.device_cells(group, device))
}

/// |dP_a - dP_b| for one matched pair.
pub fn pair_mismatch(
    field: &GradientField,
    p: &Placement,
    spec: &CircuitSpec,
    pair_index: usize,
) -> f64 {
    let pair = &spec.match_pairs[pair_index];
    let (ga, da) = spec.device_index(&pair.device_a).expect("unknown device");
    let (gb, db) = spec.device_index(&pair.device_b).expect("unknown device");
    (device_param(field, p, ga, da) - device_param(field, p, gb, db)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Mismatch,
    Offset,
    Area,
    Wirelength,
}

/// Weighted-sum figure of merit over normalized metrics; lower is better.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FomSpec {
    pub weights: BTreeMap<Metric, f64>,
    pub references: BTreeMap<Metric, f64>,
}

impl FomSpec {
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if !self.weights.values().any(|&w| w > 0.0) {
            errs.push("fom.weights: at least one weight must be > 0".to_string());
        }
        for (m, &w) in &self.weights {
            if w < 0.0 || !w.is_finite() {
                errs.push(format!("fom.weights[{m:?}]: must be finite and >= 0 (got {w})"));
            }
            match self.references.get(m) {
                Some(&r) if r > 0.0 && r.is_finite() => {}
                Some(&r) => errs.push(format!(
                    "fom.references[{m:?}]: must be finite and > 0 (got {r})"
                )),
                None => errs.push(format!("fom.references[{m:?}]: missing normalizer")),
            }
        }
        errs
    }

    fn score(&self, metrics: &BTreeMap<Metric, f64>) -> f64 {
        self.weights
            .iter()
            .map(|(m, &w)| w * metrics[m] / self.references[m])
            .sum()
    }
}

/// Shared evaluation counter; one unit per `evaluate` call.
#[derive(Debug, Clone, Copy)]
pub struct EvalBudget {
    used: u64,
    limit: u64,
}

impl EvalBudget {
    pub fn new(limit: u64) -> Self {
        EvalBudget { used: 0, limit }
    }

    pub fn unlimited() -> Self {
        EvalBudget::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.limit
    }
}

/// All proxy metrics of one placement plus its running evaluation index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    /// |dP|/P0 per matched pair, in match-pair order.
    pub pair_mismatch: Vec<f64>,
    pub offset: f64,
    pub area: u64,
    pub wirelength: f64,
    pub fom: f64,
    /// 1-based count of evaluations so far in this run.
    pub eval_index: u64,
}

impl EvalReport {
    pub fn max_pair_mismatch(&self) -> f64 {
        self.pair_mismatch.iter().copied().fold(0.0, f64::max)
    }
}

/// Computes all metrics for one placement and charges one budget unit.
pub fn evaluate(
    field: &GradientField,
    fom: &FomSpec,
    spec: &CircuitSpec,
    p: &Placement,
    budget: &mut EvalBudget,
) -> Result<EvalReport, EvalError> {
    if budget.exhausted() {
        return Err(EvalError::BudgetExhausted {
            used: budget.used,
            limit: budget.limit,
        });
    }
    budget.used += 1;

    let mismatches: Vec<f64> = (0..spec.match_pairs.len())
        .map(|i| pair_mismatch(field, p, spec, i))
        .collect();
    let offset: f64 = spec
        .match_pairs
        .iter()
        .zip(&mismatches)
        .map(|(pair, &mm)| pair.sensitivity * mm)
        .sum();
    let area = p.bounding_area();
    let wirelength = p.wirelength(spec);

    let mut metrics = BTreeMap::new();
    metrics.insert(
        Metric::Mismatch,
        mismatches.iter().copied().fold(0.0, f64::max),
    );
    metrics.insert(Metric::Offset, offset);
    metrics.insert(Metric::Area, area as f64);
    metrics.insert(Metric::Wirelength, wirelength);

    Ok(EvalReport {
        pair_mismatch: mismatches,
        offset,
        area,
        wirelength,
        fom: fom.score(&metrics),
        eval_index: budget.used,
    })
}
