//! A graph, its labels and its attributes loaded together from files.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::attributes::{load_attributes, AttributeTable};
use crate::error::{Error, Result};
use crate::estimator::{load_labels, LabelMap};
use crate::graph::{load_graph, SocialGraph};

pub const EDGES_FILE: &str = "edges.tsv";
pub const LABELS_FILE: &str = "labels.tsv";
pub const ATTRIBUTES_FILE: &str = "attributes.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug)]
pub struct Dataset {
    pub graph: SocialGraph,
    pub labels: LabelMap,
    pub attributes: AttributeTable,
}

/// File locations of a dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetPaths {
    pub edges: PathBuf,
    pub labels: PathBuf,
    pub attributes: PathBuf,
}

impl DatasetPaths {
    /// The standard layout written by the synthetic generator.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        DatasetPaths {
            edges: dir.join(EDGES_FILE),
            labels: dir.join(LABELS_FILE),
            attributes: dir.join(ATTRIBUTES_FILE),
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelMap> {
    let path = path.as_ref();
    load_labels(open(path)?).map_err(|e| e.in_file(path))
}

pub fn read_attributes(path: impl AsRef<Path>) -> Result<AttributeTable> {
    let path = path.as_ref();
    load_attributes(open(path)?).map_err(|e| e.in_file(path))
}

/// Reads an edge file. The labelled users, when given, form the user set so
/// labelled users without mutual friends appear as isolated.
pub fn read_graph(path: impl AsRef<Path>, labels: Option<&LabelMap>) -> Result<SocialGraph> {
    let path = path.as_ref();
    load_graph(open(path)?, labels.map(|l| l.users())).map_err(|e| e.in_file(path))
}

impl Dataset {
    pub fn load(paths: &DatasetPaths) -> Result<Self> {
        let labels = read_labels(&paths.labels)?;
        let graph = read_graph(&paths.edges, Some(&labels))?;
        let attributes = read_attributes(&paths.attributes)?;
        Ok(Dataset {
            graph,
            labels,
            attributes,
        })
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        Self::load(&DatasetPaths::in_dir(dir))
    }
}
