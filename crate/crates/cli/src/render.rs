//! Text tables, CSV and JSON documents for every command.

use homophily_core::experiment::ExperimentRow;
use homophily_core::filter::CurvePoint;
use homophily_core::{Attribute, BoxStats, CorrelationMatrix, EvalResult, ExperimentReport, GraphStats};
use serde::Serialize;

/// Left-aligned first columns, right-aligned numbers; columns separated by
/// two spaces.
pub fn aligned(header: &[&str], rows: &[Vec<String>], numeric_from: usize) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let mut s = cells
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c < numeric_from {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    let rule = widths.iter().sum::<usize>() + 2 * (widths.len().saturating_sub(1));
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn json_string<T: Serialize>(doc: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

// ---- stats -----------------------------------------------------------------

pub const STATS_HEADER: [&str; 7] = ["Dataset", "|V|", "|I|", "|E|", "K_out", "S_out", "M_out"];
pub const STATS_CSV_HEADER: [&str; 7] = [
    "dataset",
    "n_users",
    "n_isolated",
    "n_edges",
    "mean_degree",
    "degree_dispersion",
    "median_degree",
];

fn median_cell(m: f64) -> String {
    if m.fract() == 0.0 {
        format!("{m:.0}")
    } else {
        format!("{m:.1}")
    }
}

pub fn stats_row(dataset: &str, s: &GraphStats) -> Vec<String> {
    vec![
        dataset.to_owned(),
        s.n_users.to_string(),
        s.n_isolated.to_string(),
        s.n_edges.to_string(),
        format!("{:.2}", s.mean_degree),
        format!("{:.2}", s.degree_dispersion),
        median_cell(s.median_degree),
    ]
}

pub fn stats_csv_row(dataset: &str, s: &GraphStats) -> Vec<String> {
    vec![
        dataset.to_owned(),
        s.n_users.to_string(),
        s.n_isolated.to_string(),
        s.n_edges.to_string(),
        s.mean_degree.to_string(),
        s.degree_dispersion.to_string(),
        s.median_degree.to_string(),
    ]
}

#[derive(Serialize)]
pub struct StatsEntry<'a> {
    pub dataset: &'a str,
    #[serde(flatten)]
    pub stats: &'a GraphStats,
}

// ---- correlate -------------------------------------------------------------

pub const CORR_HEADER: [&str; 4] = ["Dataset", "friends--followers", "friends--ratio", "followers--ratio"];
pub const CORR_CSV_HEADER: [&str; 4] = ["dataset", "friends_followers", "friends_ratio", "followers_ratio"];
pub const BOX_HEADER: [&str; 8] = ["dataset", "attribute", "p5", "p25", "p50", "p75", "p95", "mean"];

pub fn corr_row(dataset: &str, c: &CorrelationMatrix) -> Vec<String> {
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "n/a".into());
    vec![
        dataset.to_owned(),
        cell(c.friends_followers),
        cell(c.friends_ratio),
        cell(c.followers_ratio),
    ]
}

pub fn corr_csv_row(dataset: &str, c: &CorrelationMatrix) -> Vec<String> {
    vec![
        dataset.to_owned(),
        opt(c.friends_followers),
        opt(c.friends_ratio),
        opt(c.followers_ratio),
    ]
}

pub fn box_row(dataset: &str, attribute: Attribute, b: &BoxStats, precise: bool) -> Vec<String> {
    let f = |v: f64| if precise { v.to_string() } else { format!("{v:.3}") };
    vec![
        dataset.to_owned(),
        attribute.as_str().to_owned(),
        f(b.p5),
        f(b.p25),
        f(b.p50),
        f(b.p75),
        f(b.p95),
        f(b.mean),
    ]
}

#[derive(Serialize)]
pub struct BoxEntry<'a> {
    pub attribute: Attribute,
    #[serde(flatten)]
    pub stats: &'a BoxStats,
}

#[derive(Serialize)]
pub struct CorrelateEntry<'a> {
    pub dataset: &'a str,
    pub correlations: &'a CorrelationMatrix,
    pub box_stats: Vec<BoxEntry<'a>>,
}

// ---- evaluate / sweep ------------------------------------------------------

pub const EVAL_HEADER: [&str; 6] = ["dataset", "n_correct", "n_estimable", "n_universe", "accuracy", "coverage"];

pub fn eval_row(dataset: &str, r: &EvalResult, precise: bool) -> Vec<String> {
    let acc = match (r.accuracy, precise) {
        (Some(a), true) => a.to_string(),
        (Some(a), false) => format!("{a:.3}"),
        (None, true) => String::new(),
        (None, false) => "-".into(),
    };
    vec![
        dataset.to_owned(),
        r.n_correct.to_string(),
        r.n_estimable.to_string(),
        r.n_universe.to_string(),
        acc,
        if precise {
            r.coverage.to_string()
        } else {
            format!("{:.3}", r.coverage)
        },
    ]
}

pub const CURVE_HEADER: [&str; 5] = ["threshold", "accuracy", "coverage", "n_correct", "n_estimable"];

/// The baseline point has an empty threshold field.
pub fn curve_row(p: &CurvePoint) -> Vec<String> {
    vec![
        opt(p.threshold),
        opt(p.result.accuracy),
        p.result.coverage.to_string(),
        p.result.n_correct.to_string(),
        p.result.n_estimable.to_string(),
    ]
}

// ---- report ----------------------------------------------------------------

pub const REPORT_HEADER: [&str; 6] = ["Country", "Attribute", "Filter", "Threshold", "Accuracy", "Coverage"];
pub const REPORT_CSV_HEADER: [&str; 11] = [
    "dataset",
    "attribute",
    "filter",
    "threshold",
    "accuracy",
    "coverage",
    "significant",
    "n_correct",
    "n_estimable",
    "ci_low",
    "ci_high",
];

pub fn threshold_cell(attribute: Attribute, threshold: f64) -> String {
    match attribute {
        Attribute::Ratio => format!("{threshold:.3}"),
        Attribute::Friends | Attribute::Followers => format!("{threshold:.0}"),
    }
}

/// Display cells of one report row; `dataset` is blank on continuation rows.
pub fn report_row(dataset: &str, row: &ExperimentRow) -> Vec<String> {
    let attribute = row.attribute.map(|a| a.label().to_owned()).unwrap_or_default();
    let threshold = match (row.attribute, row.threshold) {
        (Some(a), Some(t)) => threshold_cell(a, t),
        (Some(_), None) => "-".into(),
        (None, _) => String::new(),
    };
    let (accuracy, coverage) = match row.result {
        Some(r) => (
            r.accuracy
                .map(|a| format!("{a:.3}{}", if row.significant { "*" } else { "" }))
                .unwrap_or_else(|| "-".into()),
            format!("{:.3}", r.coverage),
        ),
        None => ("-".into(), "-".into()),
    };
    vec![
        dataset.to_owned(),
        attribute,
        row.direction.as_str().to_owned(),
        threshold,
        accuracy,
        coverage,
    ]
}

pub fn report_table(reports: &[ExperimentReport]) -> String {
    let mut rows = Vec::new();
    for r in reports {
        for (i, row) in r.rows.iter().enumerate() {
            rows.push(report_row(if i == 0 { &r.dataset } else { "" }, row));
        }
    }
    aligned(&REPORT_HEADER, &rows, 3)
}

pub fn report_csv_rows(r: &ExperimentReport) -> Vec<Vec<String>> {
    r.rows
        .iter()
        .map(|row| {
            vec![
                r.dataset.clone(),
                row.attribute.map(|a| a.as_str().to_owned()).unwrap_or_default(),
                row.direction.as_str().to_owned(),
                opt(row.threshold),
                opt(row.result.and_then(|x| x.accuracy)),
                row.result.map(|x| x.coverage.to_string()).unwrap_or_default(),
                row.significant.to_string(),
                row.result.map(|x| x.n_correct.to_string()).unwrap_or_default(),
                row.result.map(|x| x.n_estimable.to_string()).unwrap_or_default(),
                opt(row.significance.map(|s| s.ci_low)),
                opt(row.significance.map(|s| s.ci_high)),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use homophily_core::significance::SignificanceResult;
    use homophily_core::Direction;

    #[test]
    fn stats_row_layout() {
        let s = GraphStats {
            n_users: 120000,
            n_isolated: 15000,
            n_edges: 560000,
            mean_degree: 9.33,
            degree_dispersion: 12.07,
            median_degree: 6.0,
        };
        assert_eq!(
            stats_row("Atlantis", &s),
            ["Atlantis", "120000", "15000", "560000", "9.33", "12.07", "6"]
        );
    }

    #[test]
    fn correlation_row_layout() {
        let c = CorrelationMatrix {
            friends_followers: Some(0.71),
            friends_ratio: Some(0.05),
            followers_ratio: Some(-0.58),
        };
        assert_eq!(corr_row("Atlantis", &c), ["Atlantis", "0.71", "0.05", "-0.58"]);
    }

    #[test]
    fn report_row_layout() {
        // 0.517 accuracy at 0.350 coverage, significant
        let result = EvalResult::from_counts(517, 1000, 2857);
        let row = ExperimentRow {
            attribute: Some(Attribute::Ratio),
            direction: Direction::HighCut,
            threshold: Some(1.275),
            result: Some(result),
            significance: Some(SignificanceResult {
                diff: 0.06,
                std_error: 0.01,
                ci_low: 0.04,
                ci_high: 0.08,
                z_alpha: 1.6448536,
                alpha: 0.05,
                significant: true,
            }),
            significant: true,
        };
        assert_eq!(
            report_row("Atlantis", &row),
            ["Atlantis", "#friends/#followers", "HighCut", "1.275", "0.517*", "0.350"]
        );
        let friends = ExperimentRow {
            attribute: Some(Attribute::Friends),
            threshold: Some(880.6),
            significant: false,
            ..row
        };
        assert_eq!(report_row("", &friends)[3], "881");
        assert_eq!(report_row("", &friends)[4], "0.517");
    }

    #[test]
    fn aligned_columns() {
        let t = aligned(&["a", "bb"], &[vec!["xyz".into(), "1".into()]], 1);
        assert_eq!(t, "a    bb\n-------\nxyz   1\n");
    }
}
