//! The per-dataset experiment: four filter sweeps plus the unfiltered row,
//! each filtered row tested against the baseline.

use serde::{Deserialize, Serialize};

use crate::attributes::{Attribute, AttributeTable};
use crate::error::{Error, Result};
use crate::estimator::{EvalResult, Evaluator, LabelMap};
use crate::filter::{self, Direction, DEFAULT_COVERAGE_FLOOR};
use crate::graph::SocialGraph;
use crate::significance::{self, ProportionSample, SignificanceResult, DEFAULT_ALPHA};
use crate::SCHEMA_VERSION;

/// Filtered rows of the report, in output order.
pub const FILTER_ROWS: [(Attribute, Direction); 4] = [
    (Attribute::Friends, Direction::HighCut),
    (Attribute::Followers, Direction::HighCut),
    (Attribute::Ratio, Direction::HighCut),
    (Attribute::Ratio, Direction::LowCut),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub alpha: f64,
    pub coverage_floor: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: "dataset".into(),
            alpha: DEFAULT_ALPHA,
            coverage_floor: DEFAULT_COVERAGE_FLOOR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    /// `None` for the unfiltered row.
    pub attribute: Option<Attribute>,
    pub direction: Direction,
    /// Selected threshold; `None` when the row is unfiltered or when the
    /// unfiltered point won the sweep.
    pub threshold: Option<f64>,
    /// Scores at the selected point; `None` when no point cleared the
    /// coverage floor.
    pub result: Option<EvalResult>,
    pub significance: Option<SignificanceResult>,
    pub significant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub dataset: String,
    pub alpha: f64,
    pub coverage_floor: f64,
    pub baseline: EvalResult,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn row(&self, attribute: Attribute, direction: Direction) -> Option<&ExperimentRow> {
        self.rows
            .iter()
            .find(|r| r.attribute == Some(attribute) && r.direction == direction)
    }

    pub fn any_significant(&self) -> bool {
        self.rows.iter().any(|r| r.significant)
    }
}

pub fn run_experiment(
    g: &SocialGraph,
    labels: &LabelMap,
    t: &AttributeTable,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    let ev = Evaluator::new(g, labels)?;
    run_experiment_evaluated(&ev, t, cfg, &|_, _| {})
}

/// Runs the experiment over precomputed predictions. `progress` receives
/// `(thresholds_done, thresholds_total)` across all sweeps.
pub fn run_experiment_evaluated(
    ev: &Evaluator,
    t: &AttributeTable,
    cfg: &ExperimentConfig,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<ExperimentReport> {
    significance::upper_quantile(cfg.alpha)?;
    let baseline = ev.evaluate_all();
    let per_sweep = filter::GRID_INTERVALS + 1;
    let total = per_sweep * FILTER_ROWS.len();
    let mut rows = Vec::with_capacity(FILTER_ROWS.len() + 1);
    for (n, &(attribute, direction)) in FILTER_ROWS.iter().enumerate() {
        let values = filter::aligned_values(ev, t, attribute)?;
        let offset = n * per_sweep;
        let result = filter::sweep_values(
            ev,
            &values,
            attribute,
            direction,
            cfg.coverage_floor,
            &|done, _| progress(offset + done, total),
        )?;
        let significance = match result.best {
            Some(best) => test_against(&baseline, &best.result, cfg.alpha)?,
            None => None,
        };
        rows.push(ExperimentRow {
            attribute: Some(attribute),
            direction,
            threshold: result.best.and_then(|b| b.threshold),
            result: result.best.map(|b| b.result),
            significant: significance.is_some_and(|s| s.significant),
            significance,
        });
    }
    rows.push(ExperimentRow {
        attribute: None,
        direction: Direction::None,
        threshold: None,
        result: Some(baseline),
        significance: None,
        significant: false,
    });
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        dataset: cfg.dataset.clone(),
        alpha: cfg.alpha,
        coverage_floor: cfg.coverage_floor,
        baseline,
        rows,
    })
}

fn test_against(
    baseline: &EvalResult,
    filtered: &EvalResult,
    alpha: f64,
) -> Result<Option<SignificanceResult>> {
    if baseline.n_estimable == 0 || filtered.n_estimable == 0 {
        return Ok(None);
    }
    let b = ProportionSample::new(baseline.n_correct, baseline.n_estimable)?;
    let f = ProportionSample::new(filtered.n_correct, filtered.n_estimable)?;
    significance::compare_accuracy(b, f, alpha)
        .map(Some)
        .map_err(|e| Error::InvalidArgument(format!("significance test: {e}")))
}
