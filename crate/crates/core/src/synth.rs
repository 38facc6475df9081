//! Seeded synthetic datasets with a planted link between a user attribute
//! and how local that user's ties are.
//!
//! Users are split evenly into regions. Each non-isolated user initiates
//! about half of a log-normally drawn target degree worth of ties; each tie
//! stays inside the user's region with probability
//!
//! ```text
//! p_local(u) = clamp(locality_base * logistic(intercept - slope * ln a_u), 0, 1)
//! ```
//!
//! where `a_u` is the follow ratio (or `#friends + 1` when the coupling is
//! placed on friends). Partners are drawn uniformly from the matching pool
//! and ties are symmetrised, so the realised mutual degree is close to the
//! target on average.
//!
//! Every per-user draw comes from its own ChaCha stream keyed by the user
//! index, so the output depends only on the configuration and seed.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attributes::{Attribute, AttributeRecord, AttributeTable};
use crate::dataset::{Dataset, ATTRIBUTES_FILE, EDGES_FILE, LABELS_FILE, MANIFEST_FILE};
use crate::error::{Error, Result};
use crate::estimator::LabelMap;
use crate::graph::{SocialGraph, UserId};

pub const FORMAT_VERSION: u32 = 1;

const REGION_STREAM: u64 = 0;
const ISOLATION_STREAM: u64 = 1;
const USER_STREAM_BASE: u64 = 16;

/// Log-normal law given by its median and the standard deviation of the
/// underlying normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogNormalLaw {
    pub median: f64,
    pub sigma: f64,
}

impl LogNormalLaw {
    fn distribution(&self, what: &str) -> Result<LogNormal<f64>> {
        if !(self.median.is_finite() && self.median > 0.0 && self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Generation(format!(
                "{what}: median must be positive and sigma non-negative"
            )));
        }
        LogNormal::new(self.median.ln(), self.sigma).map_err(|e| Error::Generation(format!("{what}: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    /// `ratio` or `friends`.
    pub attribute: Attribute,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_regions: usize,
    /// Target mutual degree of a non-isolated user.
    pub degree: LogNormalLaw,
    pub max_degree: usize,
    pub friends: LogNormalLaw,
    /// Follow ratio before integer rounding of `#followers`.
    pub ratio: LogNormalLaw,
    pub coupling: Coupling,
    pub locality_base: f64,
    pub isolated_fraction: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 50_000,
            n_regions: 20,
            degree: LogNormalLaw {
                median: 8.0,
                sigma: 0.9,
            },
            max_degree: 400,
            friends: LogNormalLaw {
                median: 300.0,
                sigma: 1.2,
            },
            ratio: LogNormalLaw {
                median: 1.0,
                sigma: 0.8,
            },
            coupling: Coupling {
                attribute: Attribute::Ratio,
                slope: 3.0,
                intercept: 0.0,
            },
            locality_base: 0.5,
            isolated_fraction: 0.1,
            seed: 42,
        }
    }
}

impl SynthConfig {
    fn max_ties(&self) -> usize {
        self.max_degree.div_ceil(2)
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Generation(m));
        if self.n_users == 0 {
            return fail("n_users must be positive".into());
        }
        if self.n_regions < 2 {
            return fail(format!("n_regions must be at least 2, got {}", self.n_regions));
        }
        if self.n_regions > self.n_users {
            return fail(format!(
                "{} regions for {} users",
                self.n_regions, self.n_users
            ));
        }
        if !(self.locality_base > 0.0 && self.locality_base < 1.0) {
            return fail(format!("locality_base must lie in (0, 1), got {}", self.locality_base));
        }
        if !(self.coupling.slope >= 0.0 && self.coupling.slope.is_finite()) {
            return fail(format!("coupling slope must be non-negative, got {}", self.coupling.slope));
        }
        if !self.coupling.intercept.is_finite() {
            return fail("coupling intercept must be finite".into());
        }
        if self.coupling.attribute == Attribute::Followers {
            return fail("coupling attribute must be ratio or friends".into());
        }
        if !(self.isolated_fraction >= 0.0 && self.isolated_fraction < 1.0) {
            return fail(format!(
                "isolated_fraction must lie in [0, 1), got {}",
                self.isolated_fraction
            ));
        }
        if self.max_degree == 0 {
            return fail("max_degree must be positive".into());
        }
        self.degree.distribution("degree")?;
        self.friends.distribution("friends")?;
        self.ratio.distribution("ratio")?;
        Ok(())
    }

    /// Same-region probability of a tie initiated by a user with the given
    /// record.
    pub fn locality(&self, record: &AttributeRecord) -> f64 {
        let a = match self.coupling.attribute {
            Attribute::Friends => record.friends as f64 + 1.0,
            _ => record.ratio,
        };
        let x = self.coupling.intercept - self.coupling.slope * a.ln();
        (self.locality_base * logistic(x)).clamp(0.0, 1.0)
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Configuration echo stored next to generated files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub seed: u64,
    pub config: SynthConfig,
}

#[derive(Clone, Debug)]
pub struct SynthDataset {
    pub graph: SocialGraph,
    pub labels: LabelMap,
    pub attributes: AttributeTable,
    pub manifest: Manifest,
}

impl SynthDataset {
    pub fn into_dataset(self) -> Dataset {
        Dataset {
            graph: self.graph,
            labels: self.labels,
            attributes: self.attributes,
        }
    }

    pub fn as_parts(&self) -> (&SocialGraph, &LabelMap, &AttributeTable) {
        (&self.graph, &self.labels, &self.attributes)
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn region_label(region: usize, n_regions: usize) -> String {
    let width = (n_regions - 1).to_string().len();
    format!("R{region:0width$}")
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthDataset> {
    cfg.validate()?;
    let n = cfg.n_users;

    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut stream(cfg.seed, REGION_STREAM));
    let mut region = vec![0u32; n];
    for (k, &u) in order.iter().enumerate() {
        region[u as usize] = (k % cfg.n_regions) as u32;
    }

    let n_isolated = (cfg.isolated_fraction * n as f64).round() as usize;
    order.shuffle(&mut stream(cfg.seed, ISOLATION_STREAM));
    let mut isolated = vec![false; n];
    for &u in &order[..n_isolated] {
        isolated[u as usize] = true;
    }

    let mut pools: Vec<Vec<u32>> = vec![Vec::new(); cfg.n_regions];
    for u in 0..n {
        if !isolated[u] {
            pools[region[u] as usize].push(u as u32);
        }
    }
    let active = n - n_isolated;
    let max_ties = cfg.max_ties();
    for (r, pool) in pools.iter().enumerate() {
        if pool.len() < max_ties + 1 || active - pool.len() < max_ties {
            return Err(Error::Generation(format!(
                "region {r} has {} active users; a degree cap of {} needs at least {} inside and {} outside",
                pool.len(),
                cfg.max_degree,
                max_ties + 1,
                max_ties
            )));
        }
    }
    let active_users: Vec<u32> = (0..n as u32).filter(|&u| !isolated[u as usize]).collect();

    let friends_law = cfg.friends.distribution("friends")?;
    let ratio_law = cfg.ratio.distribution("ratio")?;
    let degree_law = cfg.degree.distribution("degree")?;

    let per_user: Vec<(AttributeRecord, Vec<u32>)> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut rng = stream(cfg.seed, USER_STREAM_BASE + u as u64);
            let friends = friends_law.sample(&mut rng).round() as u64;
            let ratio = ratio_law.sample(&mut rng);
            let followers = ((friends as f64 + 1.0) / ratio - 1.0).round().max(0.0) as u64;
            let record = AttributeRecord::new(friends, followers);
            let target = degree_law.sample(&mut rng);
            if isolated[u] {
                return (record, Vec::new());
            }
            let ties = ((target / 2.0).round() as usize).clamp(1, max_ties);
            let p_local = cfg.locality(&record);
            let own = region[u];
            let local_pool = &pools[own as usize];
            let mut partners: Vec<u32> = Vec::with_capacity(ties);
            while partners.len() < ties {
                let v = if rng.random_bool(p_local) {
                    local_pool[rng.random_range(0..local_pool.len())]
                } else {
                    loop {
                        let v = active_users[rng.random_range(0..active_users.len())];
                        if region[v as usize] != own {
                            break v;
                        }
                    }
                };
                if v as usize != u && !partners.contains(&v) {
                    partners.push(v);
                }
            }
            (record, partners)
        })
        .collect();

    let ids: Vec<UserId> = (0..n as u64).map(UserId).collect();
    let edges = per_user.iter().enumerate().flat_map(|(u, (_, partners))| {
        partners
            .iter()
            .map(move |&v| (UserId(u as u64), UserId(v as u64)))
    });
    let graph = SocialGraph::from_edges(edges, Some(&ids))?;
    let labels = LabelMap::from_pairs(
        (0..n).map(|u| (UserId(u as u64), region_label(region[u] as usize, cfg.n_regions))),
    )?;
    let attributes = AttributeTable::from_counts(
        per_user
            .iter()
            .enumerate()
            .map(|(u, (r, _))| (UserId(u as u64), r.friends, r.followers)),
    )?;
    Ok(SynthDataset {
        graph,
        labels,
        attributes,
        manifest: Manifest {
            format_version: FORMAT_VERSION,
            seed: cfg.seed,
            config: cfg.clone(),
        },
    })
}

/// Regenerates the dataset a manifest describes.
pub fn regenerate(manifest: &Manifest) -> Result<SynthDataset> {
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::InvalidArgument(format!(
            "unsupported manifest format version {}",
            manifest.format_version
        )));
    }
    let mut cfg = manifest.config.clone();
    cfg.seed = manifest.seed;
    generate(&cfg)
}

fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Writes the edge, label and attribute files plus `manifest.json` into
/// `dir`, creating it if needed. Returns the written paths.
pub fn emit(ds: &SynthDataset, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let edges = dir.join(EDGES_FILE);
    let labels = dir.join(LABELS_FILE);
    let attributes = dir.join(ATTRIBUTES_FILE);
    let manifest = dir.join(MANIFEST_FILE);
    write_file(&edges, |w| ds.graph.write_edges(w))?;
    write_file(&labels, |w| ds.labels.write(w))?;
    write_file(&attributes, |w| ds.attributes.write(w))?;
    let json = serde_json::to_string_pretty(&ds.manifest)?;
    write_file(&manifest, |w| writeln!(w, "{json}"))?;
    Ok(vec![edges, labels, attributes, manifest])
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))
}

/// Fraction of `u`'s labelled neighbours that share `u`'s label.
pub fn same_label_fraction(g: &SocialGraph, labels: &LabelMap, u: UserId) -> Option<f64> {
    let own = labels.get(u)?;
    let neighbors = g.neighbors(u).ok()?;
    let labelled: Vec<&str> = neighbors.iter().filter_map(|&v| labels.get(v)).collect();
    if labelled.is_empty() {
        return None;
    }
    let same = labelled.iter().filter(|&&l| l == own).count();
    Some(same as f64 / labelled.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            n_users: 2_000,
            n_regions: 5,
            max_degree: 60,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic() {
        let a = generate(&small(7)).unwrap();
        let b = generate(&small(7)).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.attributes, b.attributes);
        let c = generate(&small(8)).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn covers_same_users() {
        let ds = generate(&small(1)).unwrap();
        assert_eq!(ds.graph.len(), 2_000);
        assert_eq!(ds.labels.users(), ds.graph.users());
        assert_eq!(ds.attributes.users(), ds.graph.users());
        assert_eq!(ds.labels.vocabulary().len(), 5);
        let s = ds.graph.stats();
        assert_eq!(s.n_isolated, 200);
    }

    #[test]
    fn ratio_identity_holds() {
        let ds = generate(&small(3)).unwrap();
        for (_, r) in ds.attributes.iter() {
            assert_eq!(r.ratio, crate::follow_ratio(r.friends, r.followers));
        }
    }

    #[test]
    fn regions_are_balanced() {
        let ds = generate(&small(4)).unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for (_, l) in ds.labels.iter() {
            *counts.entry(l.to_owned()).or_insert(0) += 1;
        }
        assert!(counts.values().all(|&c| c == 400));
        assert!(counts.contains_key("R0") && counts.contains_key("R4"));
    }

    #[test]
    fn infeasible_configs() {
        let too_dense = SynthConfig {
            n_users: 100,
            n_regions: 10,
            max_degree: 40,
            ..Default::default()
        };
        assert!(matches!(generate(&too_dense), Err(Error::Generation(_))));
        for bad in [
            SynthConfig { n_regions: 1, ..small(0) },
            SynthConfig { locality_base: 1.0, ..small(0) },
            SynthConfig { isolated_fraction: 1.0, ..small(0) },
            SynthConfig {
                coupling: Coupling { attribute: Attribute::Ratio, slope: -1.0, intercept: 0.0 },
                ..small(0)
            },
        ] {
            assert!(matches!(generate(&bad), Err(Error::Generation(_))), "{bad:?}");
        }
    }

    #[test]
    fn manifest_round_trip() {
        let ds = generate(&small(11)).unwrap();
        let json = serde_json::to_string(&ds.manifest).unwrap();
        let back: Manifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ds.manifest);
        assert_eq!(regenerate(&back).unwrap().graph, ds.graph);
    }
}
