use homophily_core::dataset::{Dataset, DatasetPaths};
use homophily_core::synth::{self, emit, generate, same_label_fraction, Coupling, LogNormalLaw, SynthConfig};
use homophily_core::*;

fn config(slope: f64, seed: u64) -> SynthConfig {
    let mut cfg = SynthConfig {
        n_users: 20_000,
        seed,
        ..Default::default()
    };
    cfg.coupling.slope = slope;
    cfg
}

/// Same-region neighbour fraction and follow ratio of every non-isolated user.
fn locality_by_ratio(ds: &synth::SynthDataset) -> (Vec<f64>, Vec<f64>) {
    let mut ratio = Vec::new();
    let mut local = Vec::new();
    for (u, r) in ds.attributes.iter() {
        if let Some(f) = same_label_fraction(&ds.graph, &ds.labels, u) {
            ratio.push(r.ratio);
            local.push(f);
        }
    }
    (ratio, local)
}

#[test]
fn no_coupling_means_no_rank_correlation() {
    let ds = generate(&config(0.0, 5)).unwrap();
    let (ratio, local) = locality_by_ratio(&ds);
    let r = spearman(&ratio, &local).unwrap();
    assert!(r.abs() < 0.05, "spearman {r}");
}

#[test]
fn strong_coupling_splits_locality_at_ratio_one() {
    let cfg = SynthConfig {
        locality_base: 0.9,
        ratio: LogNormalLaw {
            median: 1.0,
            sigma: 1.5,
        },
        coupling: Coupling {
            attribute: Attribute::Ratio,
            slope: 4.0,
            intercept: 0.0,
        },
        ..config(4.0, 6)
    };
    let ds = generate(&cfg).unwrap();
    let (ratio, local) = locality_by_ratio(&ds);
    let mean = |pick: &dyn Fn(f64) -> bool| {
        let v: Vec<f64> = ratio.iter().zip(&local).filter(|p| pick(*p.0)).map(|p| *p.1).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let low = mean(&|r| r <= 1.0);
    let high = mean(&|r| r > 1.0);
    assert!(low - high > 0.3, "low {low} high {high}");
}

#[test]
fn friends_coupling_knob() {
    let cfg = SynthConfig {
        coupling: Coupling {
            attribute: Attribute::Friends,
            slope: 3.0,
            intercept: 3.0 * 300f64.ln(),
        },
        ..config(3.0, 9)
    };
    let ds = generate(&cfg).unwrap();
    let r = run_experiment(&ds.graph, &ds.labels, &ds.attributes, &ExperimentConfig::default()).unwrap();
    let friends = r.row(Attribute::Friends, Direction::HighCut).unwrap();
    assert!(friends.significant);
}

#[test]
fn emit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig {
        n_users: 3_000,
        seed: 42,
        max_degree: 100,
        ..Default::default()
    };
    let ds = generate(&cfg).unwrap();
    let written = emit(&ds, dir.path()).unwrap();
    assert_eq!(written.len(), 4);

    let loaded = Dataset::load(&DatasetPaths::in_dir(dir.path())).unwrap();
    assert_eq!(loaded.graph.stats(), ds.graph.stats());
    assert_eq!(loaded.graph, ds.graph);
    assert_eq!(loaded.labels, ds.labels);
    assert_eq!(loaded.attributes, ds.attributes);

    let manifest = synth::read_manifest(dir.path().join("manifest.json")).unwrap();
    assert_eq!(manifest.config, cfg);
    assert_eq!(manifest.seed, 42);

    let edges = std::fs::read_to_string(dir.path().join("edges.tsv")).unwrap();
    let pairs: Vec<(u64, u64)> = edges
        .lines()
        .map(|l| {
            let (a, b) = l.split_once('\t').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert!(pairs.iter().all(|(a, b)| a < b));
    assert!(pairs.windows(2).all(|w| w[0] < w[1]));

    let again = tempfile::tempdir().unwrap();
    emit(&synth::regenerate(&manifest).unwrap(), again.path()).unwrap();
    for name in ["edges.tsv", "labels.tsv", "attributes.tsv", "manifest.json"] {
        assert_eq!(
            std::fs::read(dir.path().join(name)).unwrap(),
            std::fs::read(again.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn emit_reports_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let ds = generate(&SynthConfig {
        n_users: 500,
        max_degree: 20,
        ..Default::default()
    })
    .unwrap();
    let err = emit(&ds, blocker.join("sub")).unwrap_err();
    assert!(err.to_string().contains("file"), "{err}");
}
