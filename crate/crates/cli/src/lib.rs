//! Command implementations behind the `homophily` binary.
//!
//! Every command produces its documents in memory; `main` decides whether
//! they go to standard output or into the `--out` directory. Diagnostics
//! and progress go to standard error only.

pub mod args;
pub mod render;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use homophily_core::dataset::{read_attributes, read_graph, read_labels, DatasetPaths};
use homophily_core::estimator::Evaluator;
use homophily_core::experiment::run_experiment_evaluated;
use homophily_core::filter::{aligned_values, sweep_values, FilterSpec};
use homophily_core::synth::{self, SynthConfig};
use homophily_core::{
    apply_filter, evaluate, Attribute, Direction, ExperimentConfig, ExperimentReport, SCHEMA_VERSION,
};
use serde::Serialize;

use crate::args::{Cli, Command, DataArgs, Format, TestArgs, Workers};
use crate::render::*;

/// A named output document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

/// What a command produced. `primary` is what goes to standard output when
/// no output directory is given; `extra` is only written with `--out`.
#[derive(Debug, Default)]
pub struct Output {
    pub primary: Option<Artifact>,
    pub extra: Vec<Artifact>,
}

impl Output {
    fn single(file_name: String, contents: String) -> Self {
        Output {
            primary: Some(Artifact {
                file_name,
                contents,
            }),
            extra: Vec::new(),
        }
    }

    /// Writes to `out` when given, else returns the text for standard output.
    pub fn deliver(&self, out: Option<&Path>) -> Result<Option<String>> {
        match out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                for a in self.primary.iter().chain(&self.extra) {
                    let path = dir.join(&a.file_name);
                    fs::write(&path, &a.contents).with_context(|| format!("writing {}", path.display()))?;
                }
                Ok(None)
            }
            None => Ok(self.primary.as_ref().map(|a| a.contents.clone())),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(kind: &str, body: T) -> Result<String> {
    json_string(&Envelope {
        schema_version: SCHEMA_VERSION,
        kind,
        body,
    })
}

/// Runs a parsed command inside a worker pool of the requested size.
pub fn run(cli: &Cli) -> Result<Output> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Workers::Count(n) = cli.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("starting worker pool")?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let format = cli.format;
    match &cli.command {
        Command::Stats(data) => cmd_stats(data, format),
        Command::Correlate(data) => cmd_correlate(data, format),
        Command::Evaluate {
            data,
            attribute,
            direction,
            threshold,
        } => cmd_evaluate(data, *attribute, *direction, *threshold, format),
        Command::Sweep {
            data,
            attribute,
            direction,
            test,
        } => cmd_sweep(data, *attribute, *direction, *test, format),
        Command::Report { data, test } => cmd_report(data, *test, format),
        Command::Synth { config, seed } => cmd_synth(config.as_deref(), *seed, cli.out.as_deref()),
    }
}

/// One dataset's file locations as given on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Source {
    pub name: String,
    pub edges: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
}

impl Source {
    fn need<'a>(&self, p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        p.as_deref()
            .ok_or_else(|| anyhow!("dataset {:?} needs --{flag}", self.name))
    }
}

fn default_name(path: Option<&Path>, fallback: usize) -> String {
    path.and_then(|p| {
        let p = if p.is_dir() { Some(p) } else { p.parent() };
        p.and_then(|d| d.file_name())
            .map(|n| n.to_string_lossy().into_owned())
    })
    .filter(|n| !n.is_empty())
    .unwrap_or_else(|| format!("dataset{}", fallback + 1))
}

/// Pairs up `--dataset`, `--edges`, `--labels`, `--attributes` and `--name`
/// occurrences into datasets, preserving command-line order.
pub fn sources(d: &DataArgs) -> Result<Vec<Source>> {
    let mut out: Vec<Source> = d
        .datasets
        .iter()
        .map(|dir| {
            let p = DatasetPaths::in_dir(dir);
            Source {
                name: String::new(),
                edges: Some(p.edges),
                labels: Some(p.labels),
                attributes: Some(p.attributes),
            }
        })
        .collect();
    let n = [d.edges.len(), d.labels.len(), d.attributes.len()]
        .into_iter()
        .max()
        .unwrap_or(0);
    for (flag, list) in [("edges", &d.edges), ("labels", &d.labels), ("attributes", &d.attributes)] {
        if !list.is_empty() && list.len() != n {
            bail!("--{flag} given {} times but datasets need {n}", list.len());
        }
    }
    for i in 0..n {
        out.push(Source {
            name: String::new(),
            edges: d.edges.get(i).cloned(),
            labels: d.labels.get(i).cloned(),
            attributes: d.attributes.get(i).cloned(),
        });
    }
    if out.is_empty() {
        bail!("no dataset given: use --dataset DIR or --edges/--labels/--attributes");
    }
    if !d.name.is_empty() && d.name.len() != out.len() {
        bail!("{} --name values for {} datasets", d.name.len(), out.len());
    }
    let dataset_dirs = d.datasets.len();
    for (i, s) in out.iter_mut().enumerate() {
        s.name = match d.name.get(i) {
            Some(n) => n.clone(),
            None if i < dataset_dirs => default_name(Some(&d.datasets[i]), i),
            None => default_name(s.labels.as_deref().or(s.edges.as_deref()), i),
        };
    }
    Ok(out)
}

fn single_source(d: &DataArgs) -> Result<Source> {
    let mut all = sources(d)?;
    if all.len() != 1 {
        bail!("this command takes exactly one dataset, got {}", all.len());
    }
    Ok(all.remove(0))
}

struct Loaded {
    graph: homophily_core::SocialGraph,
    labels: homophily_core::LabelMap,
}

fn load_graph_and_labels(s: &Source) -> Result<Loaded> {
    let labels = read_labels(s.need(&s.labels, "labels")?)?;
    let graph = read_graph(s.need(&s.edges, "edges")?, Some(&labels))?;
    Ok(Loaded { graph, labels })
}

fn progress(what: &'static str) -> impl Fn(usize, usize) + Sync {
    move |done, total| {
        if done == total || done % 50 == 0 {
            eprintln!("{what}: {done}/{total} thresholds completed");
        }
    }
}

pub fn cmd_stats(data: &DataArgs, format: Format) -> Result<Output> {
    let mut rows = Vec::new();
    for s in sources(data)? {
        let labels = s.labels.as_deref().map(read_labels).transpose()?;
        let graph = read_graph(s.need(&s.edges, "edges")?, labels.as_ref())?;
        rows.push((s.name, graph.stats()));
    }
    let contents = match format {
        Format::Json => envelope(
            "stats",
            serde_json::json!({
                "datasets": rows
                    .iter()
                    .map(|(name, stats)| StatsEntry { dataset: name, stats })
                    .collect::<Vec<_>>()
            }),
        )?,
        Format::Csv => csv_string(
            &STATS_CSV_HEADER,
            &rows.iter().map(|(n, s)| stats_csv_row(n, s)).collect::<Vec<_>>(),
        )?,
        Format::Table => aligned(
            &STATS_HEADER,
            &rows.iter().map(|(n, s)| stats_row(n, s)).collect::<Vec<_>>(),
            1,
        ),
    };
    Ok(Output::single(format!("stats.{}", format.extension()), contents))
}

pub fn cmd_correlate(data: &DataArgs, format: Format) -> Result<Output> {
    let mut entries = Vec::new();
    for s in sources(data)? {
        let path = s.need(&s.attributes, "attributes")?;
        let t = read_attributes(path)?;
        if t.is_empty() {
            bail!("{}: no attribute records", path.display());
        }
        let corr = t
            .correlation_matrix()
            .with_context(|| format!("correlations of {}", path.display()))?;
        let boxes = Attribute::ALL
            .iter()
            .map(|&a| t.box_stats(a).map(|b| (a, b)))
            .collect::<Result<Vec<_>, _>>()?;
        entries.push((s.name, corr, boxes));
    }
    let corr_rows = |precise: bool| -> Vec<Vec<String>> {
        entries
            .iter()
            .map(|(n, c, _)| if precise { corr_csv_row(n, c) } else { corr_row(n, c) })
            .collect()
    };
    let box_rows = |precise: bool| -> Vec<Vec<String>> {
        entries
            .iter()
            .flat_map(|(n, _, boxes)| boxes.iter().map(move |(a, b)| box_row(n, *a, b, precise)))
            .collect()
    };
    let mut out = match format {
        Format::Json => {
            let docs: Vec<CorrelateEntry> = entries
                .iter()
                .map(|(n, c, boxes)| CorrelateEntry {
                    dataset: n,
                    correlations: c,
                    box_stats: boxes
                        .iter()
                        .map(|(a, b)| BoxEntry {
                            attribute: *a,
                            stats: b,
                        })
                        .collect(),
                })
                .collect();
            Output::single(
                "correlate.json".into(),
                envelope("correlate", serde_json::json!({ "datasets": docs }))?,
            )
        }
        Format::Csv => Output::single("correlations.csv".into(), csv_string(&CORR_CSV_HEADER, &corr_rows(true))?),
        Format::Table => {
            let mut text = aligned(&CORR_HEADER, &corr_rows(false), 1);
            text.push('\n');
            text.push_str(&aligned(&BOX_HEADER, &box_rows(false), 2));
            Output::single("correlate.txt".into(), text)
        }
    };
    if format == Format::Csv {
        out.extra.push(Artifact {
            file_name: "box_stats.csv".into(),
            contents: csv_string(&BOX_HEADER, &box_rows(true))?,
        });
    }
    Ok(out)
}

pub fn cmd_evaluate(
    data: &DataArgs,
    attribute: Option<Attribute>,
    direction: Option<Direction>,
    threshold: Option<f64>,
    format: Format,
) -> Result<Output> {
    let s = single_source(data)?;
    let Loaded { graph, labels } = load_graph_and_labels(&s)?;
    let mut targets = labels.users().to_vec();
    let filter = match (attribute, direction) {
        (None, None) if threshold.is_none() => None,
        (Some(a), d) => {
            let spec = FilterSpec::new(a, d.unwrap_or(Direction::HighCut), threshold)?;
            let t = read_attributes(s.need(&s.attributes, "attributes")?)?;
            targets = apply_filter(&targets, &t, &spec)?;
            Some(spec)
        }
        _ => bail!("--direction and --threshold need --attribute"),
    };
    let result = evaluate(&graph, &labels, &targets)?;
    if result.accuracy.is_none() {
        eprintln!("warning: {}: no target has a labelled neighbour; accuracy is undefined", s.name);
    }
    let contents = match format {
        Format::Json => envelope(
            "evaluate",
            serde_json::json!({
                "dataset": s.name,
                "filter": filter,
                "n_correct": result.n_correct,
                "n_estimable": result.n_estimable,
                "n_universe": result.n_universe,
                "accuracy": result.accuracy,
                "coverage": result.coverage,
            }),
        )?,
        Format::Csv => csv_string(&EVAL_HEADER, &[eval_row(&s.name, &result, true)])?,
        Format::Table => aligned(&EVAL_HEADER, &[eval_row(&s.name, &result, false)], 1),
    };
    Ok(Output::single(format!("evaluate.{}", format.extension()), contents))
}

pub fn cmd_sweep(
    data: &DataArgs,
    attribute: Attribute,
    direction: Direction,
    test: TestArgs,
    format: Format,
) -> Result<Output> {
    let s = single_source(data)?;
    let Loaded { graph, labels } = load_graph_and_labels(&s)?;
    let t = read_attributes(s.need(&s.attributes, "attributes")?)?;
    let ev = Evaluator::new(&graph, &labels)?;
    let values = aligned_values(&ev, &t, attribute)?;
    let result = sweep_values(
        &ev,
        &values,
        attribute,
        direction,
        test.coverage_floor,
        &progress("sweep"),
    )?;
    let curve_csv = csv_string(&CURVE_HEADER, &result.curve.iter().map(curve_row).collect::<Vec<_>>())?;
    let json = || {
        envelope(
            "sweep",
            serde_json::json!({ "dataset": s.name, "sweep": result }),
        )
    };
    let mut out = match format {
        Format::Json => Output::single("sweep.json".into(), json()?),
        Format::Csv => Output::single("curve.csv".into(), curve_csv.clone()),
        Format::Table => {
            let mut rows = vec![eval_row("baseline", &result.baseline, false)];
            if let Some(best) = result.best {
                let label = match best.threshold {
                    Some(th) => {
                        let op = if direction == Direction::LowCut { '>' } else { '<' };
                        format!("best: keep {} {op} {}", attribute.as_str(), threshold_cell(attribute, th))
                    }
                    None => "best (unfiltered)".into(),
                };
                rows.push(eval_row(&label, &best.result, false));
            }
            let mut header = EVAL_HEADER;
            header[0] = "point";
            Output::single("sweep.txt".into(), aligned(&header, &rows, 1))
        }
    };
    if format != Format::Csv {
        out.extra.push(Artifact {
            file_name: "curve.csv".into(),
            contents: curve_csv,
        });
    }
    if format != Format::Json {
        out.extra.push(Artifact {
            file_name: "sweep.json".into(),
            contents: json()?,
        });
    }
    Ok(out)
}

/// Runs the five-row experiment on every dataset, in command-line order.
pub fn experiment_reports(data: &DataArgs, test: TestArgs) -> Result<Vec<ExperimentReport>> {
    let mut reports = Vec::new();
    for s in sources(data)? {
        let Loaded { graph, labels } = load_graph_and_labels(&s)?;
        let t = read_attributes(s.need(&s.attributes, "attributes")?)?;
        let ev = Evaluator::new(&graph, &labels)?;
        let cfg = ExperimentConfig {
            dataset: s.name.clone(),
            alpha: test.alpha,
            coverage_floor: test.coverage_floor,
        };
        reports.push(run_experiment_evaluated(&ev, &t, &cfg, &progress("report"))?);
    }
    Ok(reports)
}

pub fn cmd_report(data: &DataArgs, test: TestArgs, format: Format) -> Result<Output> {
    let reports = experiment_reports(data, test)?;
    let contents = match format {
        Format::Json => envelope("report", serde_json::json!({ "datasets": reports }))?,
        Format::Csv => csv_string(
            &REPORT_CSV_HEADER,
            &reports.iter().flat_map(report_csv_rows).collect::<Vec<_>>(),
        )?,
        Format::Table => report_table(&reports),
    };
    Ok(Output::single(format!("report.{}", format.extension()), contents))
}

pub fn cmd_synth(config: Option<&Path>, seed: Option<u64>, out: Option<&Path>) -> Result<Output> {
    let out = out.ok_or_else(|| anyhow!("synth needs --out DIR"))?;
    let mut cfg: SynthConfig = match config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SynthConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let ds = synth::generate(&cfg)?;
    for path in synth::emit(&ds, out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(Output::default())
}
