//! HighCut/LowCut attribute filters and the threshold sweep.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attributes::{Attribute, AttributeTable};
use crate::error::{Error, Result};
use crate::estimator::{EvalResult, Evaluator, LabelMap};
use crate::graph::{SocialGraph, UserId};

/// Default minimum coverage a threshold must exceed to be selected.
pub const DEFAULT_COVERAGE_FLOOR: f64 = 0.3;

/// Number of intervals the log-scaled attribute range is divided into; the
/// grid holds one more point than this.
pub const GRID_INTERVALS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Keep users whose value is strictly below the threshold.
    HighCut,
    /// Keep users whose value is strictly above the threshold.
    LowCut,
    /// Keep everyone.
    #[serde(rename = "none")]
    None,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::HighCut => "HighCut",
            Direction::LowCut => "LowCut",
            Direction::None => "none",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "highcut" | "high-cut" | "high" => Ok(Direction::HighCut),
            "lowcut" | "low-cut" | "low" => Ok(Direction::LowCut),
            "none" => Ok(Direction::None),
            _ => Err(Error::InvalidArgument(format!("unknown filter direction {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub attribute: Attribute,
    pub direction: Direction,
    pub threshold: Option<f64>,
}

impl FilterSpec {
    pub fn new(attribute: Attribute, direction: Direction, threshold: Option<f64>) -> Result<Self> {
        match (direction, threshold) {
            (Direction::None, None) => {}
            (Direction::None, Some(_)) => {
                return Err(Error::InvalidArgument("an unfiltered spec takes no threshold".into()))
            }
            (_, Some(t)) if t.is_finite() => {}
            (_, Some(t)) => {
                return Err(Error::InvalidArgument(format!("threshold {t} is not finite")))
            }
            (_, None) => {
                return Err(Error::InvalidArgument(format!("{direction} needs a threshold")))
            }
        }
        Ok(FilterSpec {
            attribute,
            direction,
            threshold,
        })
    }

    pub fn high_cut(attribute: Attribute, threshold: f64) -> Result<Self> {
        Self::new(attribute, Direction::HighCut, Some(threshold))
    }

    pub fn low_cut(attribute: Attribute, threshold: f64) -> Result<Self> {
        Self::new(attribute, Direction::LowCut, Some(threshold))
    }

    pub fn unfiltered(attribute: Attribute) -> Self {
        FilterSpec {
            attribute,
            direction: Direction::None,
            threshold: None,
        }
    }

    pub fn keeps(&self, value: f64) -> bool {
        keeps(self.direction, self.threshold.unwrap_or(f64::NAN), value)
    }
}

fn keeps(direction: Direction, threshold: f64, value: f64) -> bool {
    match direction {
        Direction::HighCut => value < threshold,
        Direction::LowCut => value > threshold,
        Direction::None => true,
    }
}

/// Members of `universe` the filter keeps, ascending.
pub fn apply_filter(universe: &[UserId], t: &AttributeTable, f: &FilterSpec) -> Result<Vec<UserId>> {
    let mut kept = Vec::new();
    let mut missing = Vec::new();
    for &u in universe {
        match t.get(u) {
            Some(r) if f.keeps(r.value(f.attribute)) => kept.push(u),
            Some(_) => {}
            None => missing.push(u),
        }
    }
    if !missing.is_empty() {
        missing.sort_unstable();
        missing.dedup();
        return Err(Error::NotFound(format!(
            "no attributes for {} user(s), first {}",
            missing.len(),
            missing[0]
        )));
    }
    kept.sort_unstable();
    kept.dedup();
    Ok(kept)
}

/// `GRID_INTERVALS + 1` thresholds spaced evenly on a log scale from the
/// smallest positive value to the largest value. Zeros do not take part in
/// choosing the endpoints.
pub fn threshold_grid(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("threshold grid over no values".into()));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "attribute value {v} is not a finite non-negative number"
        )));
    }
    let mut positive = values.iter().copied().filter(|&v| v > 0.0);
    let first = positive
        .next()
        .ok_or_else(|| Error::InvalidArgument("all attribute values are zero".into()))?;
    let (lo, hi) = positive.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = hi / lo;
    Ok((0..=GRID_INTERVALS)
        .map(|k| match k {
            0 => lo,
            GRID_INTERVALS => hi,
            _ => (lo * span.powf(k as f64 / GRID_INTERVALS as f64)).clamp(lo, hi),
        })
        .collect())
}

/// One evaluated filter setting; `threshold` is `None` for the unfiltered
/// baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: Option<f64>,
    pub result: EvalResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub attribute: Attribute,
    pub direction: Direction,
    pub coverage_floor: f64,
    /// The baseline point followed by one point per grid threshold, in
    /// ascending threshold order.
    pub curve: Vec<CurvePoint>,
    /// Highest-accuracy point whose coverage exceeds the floor.
    pub best: Option<CurvePoint>,
    pub baseline: EvalResult,
}

fn check_floor(coverage_floor: f64) -> Result<()> {
    if coverage_floor > 0.0 && coverage_floor < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "coverage floor must lie in (0, 1), got {coverage_floor}"
        )))
    }
}

/// Orders two qualifying points: higher accuracy first, then higher
/// coverage, then grid points before the baseline, then smaller threshold.
fn preference(a: &CurvePoint, b: &CurvePoint) -> Ordering {
    let (ra, rb) = (&a.result, &b.result);
    // exact comparison of n_correct / n_estimable
    let acc = (rb.n_correct as u128 * ra.n_estimable as u128)
        .cmp(&(ra.n_correct as u128 * rb.n_estimable as u128));
    acc.then(rb.n_estimable.cmp(&ra.n_estimable))
        .then_with(|| match (a.threshold, b.threshold) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        })
}

/// The preferred point among those with an accuracy and coverage strictly
/// above `coverage_floor`.
pub fn select_best(curve: &[CurvePoint], coverage_floor: f64) -> Option<CurvePoint> {
    curve
        .iter()
        .filter(|p| p.result.accuracy.is_some() && p.result.coverage > coverage_floor)
        .min_by(|a, b| preference(a, b))
        .copied()
}

/// Sweeps `direction` filters on `attribute` over the threshold grid.
pub fn sweep(
    g: &SocialGraph,
    labels: &LabelMap,
    t: &AttributeTable,
    attribute: Attribute,
    direction: Direction,
    coverage_floor: f64,
) -> Result<SweepResult> {
    let ev = Evaluator::new(g, labels)?;
    let values = aligned_values(&ev, t, attribute)?;
    sweep_values(&ev, &values, attribute, direction, coverage_floor, &|_, _| {})
}

/// Attribute values indexed like the evaluator's users.
pub fn aligned_values(ev: &Evaluator, t: &AttributeTable, attribute: Attribute) -> Result<Vec<f64>> {
    t.attribute_values(attribute, ev.users())
}

/// Sweep over precomputed predictions. `values[i]` is the attribute of the
/// evaluator's `i`-th user; `progress(done, total)` is called after each
/// threshold.
pub fn sweep_values(
    ev: &Evaluator,
    values: &[f64],
    attribute: Attribute,
    direction: Direction,
    coverage_floor: f64,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<SweepResult> {
    check_floor(coverage_floor)?;
    if values.len() != ev.len() {
        return Err(Error::InvalidArgument(format!(
            "{} attribute values for {} users",
            values.len(),
            ev.len()
        )));
    }
    if !ev.fully_labeled() {
        return Err(Error::Validation(
            "every user needs a label to be swept".into(),
        ));
    }
    let baseline = ev.evaluate_all();
    let mut curve = vec![CurvePoint {
        threshold: None,
        result: baseline,
    }];
    if direction != Direction::None && !values.is_empty() {
        let grid = threshold_grid(values)?;
        let total = grid.len();
        for (k, &theta) in grid.iter().enumerate() {
            let result = ev.evaluate_where(|i| keeps(direction, theta, values[i]));
            curve.push(CurvePoint {
                threshold: Some(theta),
                result,
            });
            progress(k + 1, total);
        }
    }
    let best = select_best(&curve, coverage_floor);
    Ok(SweepResult {
        attribute,
        direction,
        coverage_floor,
        curve,
        best,
        baseline,
    })
}
