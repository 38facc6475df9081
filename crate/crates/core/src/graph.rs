//! Undirected mutual-friend graph stored as compressed adjacency rows.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;

/// Opaque user identifier, stable across all files of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub u64);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for UserId {
    fn from(v: u64) -> Self {
        UserId(v)
    }
}

/// Immutable, symmetric, self-loop-free adjacency over a fixed user set.
///
/// Users are kept sorted by id; the dense index of a user is its position in
/// that order, and every adjacency row is sorted ascending, so rows are also
/// sorted by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocialGraph {
    ids: Vec<UserId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl SocialGraph {
    /// Builds a graph from raw (possibly duplicated, possibly reversed)
    /// pairs. Self-loops are dropped. When `universe` is given it defines the
    /// user set and every endpoint must belong to it; otherwise the user set
    /// is the set of endpoints.
    pub fn from_edges<I>(edges: I, universe: Option<&[UserId]>) -> Result<Self>
    where
        I: IntoIterator<Item = (UserId, UserId)>,
    {
        let edges: Vec<(UserId, UserId)> = edges.into_iter().collect();
        let mut ids: Vec<UserId> = match universe {
            Some(u) => u.to_vec(),
            None => edges.iter().flat_map(|&(a, b)| [a, b]).collect(),
        };
        ids.sort_unstable();
        ids.dedup();
        if ids.len() > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "{} users exceed the supported maximum",
                ids.len()
            )));
        }

        let index = |u: UserId| -> Result<u32> {
            ids.binary_search(&u)
                .map(|i| i as u32)
                .map_err(|_| Error::Validation(format!("edge endpoint {u} is not in the user universe")))
        };

        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                // still validate membership of the dropped endpoint
                index(a)?;
                continue;
            }
            let (ia, ib) = (index(a)?, index(b)?);
            pairs.push(if ia < ib { (ia, ib) } else { (ib, ia) });
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_canonical_pairs(ids, &pairs))
    }

    /// `pairs` must be sorted, deduplicated, with `a < b` in each pair.
    fn from_canonical_pairs(ids: Vec<UserId>, pairs: &[(u32, u32)]) -> Self {
        let n = ids.len();
        let mut degree = vec![0usize; n];
        for &(a, b) in pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor: Vec<usize> = offsets[..n].to_vec();
        let mut targets = vec![0u32; 2 * pairs.len()];
        // First pass places each row's lower neighbours, second pass its
        // upper ones; both arrive ascending because `pairs` is sorted.
        for &(a, b) in pairs {
            targets[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        for &(a, b) in pairs {
            targets[cursor[a as usize]] = b;
            cursor[a as usize] += 1;
        }
        SocialGraph {
            ids,
            offsets,
            targets,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// All users, ascending.
    pub fn users(&self) -> &[UserId] {
        &self.ids
    }

    pub fn user(&self, index: usize) -> UserId {
        self.ids[index]
    }

    pub fn index_of(&self, u: UserId) -> Option<usize> {
        self.ids.binary_search(&u).ok()
    }

    pub fn contains(&self, u: UserId) -> bool {
        self.index_of(u).is_some()
    }

    /// Number of unordered mutual pairs.
    pub fn n_edges(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, index: usize) -> usize {
        self.offsets[index + 1] - self.offsets[index]
    }

    /// Dense indices of the neighbours of the user at `index`, ascending.
    pub fn neighbor_indices(&self, index: usize) -> &[u32] {
        &self.targets[self.offsets[index]..self.offsets[index + 1]]
    }

    /// Mutual friends of `u`, ascending.
    pub fn neighbors(&self, u: UserId) -> Result<Vec<UserId>> {
        let i = self
            .index_of(u)
            .ok_or_else(|| Error::NotFound(format!("user {u}")))?;
        Ok(self
            .neighbor_indices(i)
            .iter()
            .map(|&j| self.ids[j as usize])
            .collect())
    }

    /// Each unordered pair once, smaller id first, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (UserId, UserId)> + '_ {
        (0..self.len()).flat_map(move |i| {
            self.neighbor_indices(i)
                .iter()
                .filter(move |&&j| (j as usize) > i)
                .map(move |&j| (self.ids[i], self.ids[j as usize]))
        })
    }

    /// Writes the canonical edge list: one tab-separated pair per line.
    pub fn write_edges<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (a, b) in self.edges() {
            writeln!(w, "{a}\t{b}")?;
        }
        w.flush()
    }

    pub fn stats(&self) -> GraphStats {
        graph_stats(self)
    }
}

/// Reads an edge list. `universe`, when given, fixes the user set so users
/// without edges are present as isolated members.
pub fn load_graph<R: BufRead>(reader: R, universe: Option<&[UserId]>) -> Result<SocialGraph> {
    let mut edges = Vec::new();
    text::for_each_record(reader, |line, fields| {
        if fields.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected two user ids, found {} fields", fields.len()),
            ));
        }
        let a = text::parse_u64(line, fields[0], "user id")?;
        let b = text::parse_u64(line, fields[1], "user id")?;
        edges.push((UserId(a), UserId(b)));
        Ok(())
    })?;
    SocialGraph::from_edges(edges, universe)
}

/// Basic size and degree statistics of a graph.
///
/// Degrees are taken over every user in the graph, isolated ones included.
/// `degree_dispersion` is the population standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_users: usize,
    pub n_isolated: usize,
    pub n_edges: usize,
    pub mean_degree: f64,
    pub degree_dispersion: f64,
    pub median_degree: f64,
}

pub fn graph_stats(g: &SocialGraph) -> GraphStats {
    let n = g.len();
    let mut degrees: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let n_isolated = degrees.iter().filter(|&&d| d == 0).count();
    if n == 0 {
        return GraphStats {
            n_users: 0,
            n_isolated: 0,
            n_edges: 0,
            mean_degree: 0.0,
            degree_dispersion: 0.0,
            median_degree: 0.0,
        };
    }
    let total: usize = degrees.iter().sum();
    let mean = total as f64 / n as f64;
    let var = degrees
        .iter()
        .map(|&d| {
            let x = d as f64 - mean;
            x * x
        })
        .sum::<f64>()
        / n as f64;
    degrees.sort_unstable();
    let median = if n % 2 == 1 {
        degrees[n / 2] as f64
    } else {
        (degrees[n / 2 - 1] + degrees[n / 2]) as f64 / 2.0
    };
    GraphStats {
        n_users: n,
        n_isolated,
        n_edges: g.n_edges(),
        mean_degree: mean,
        degree_dispersion: var.sqrt(),
        median_degree: median,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u64]) -> Vec<UserId> {
        v.iter().copied().map(UserId).collect()
    }

    fn load(text: &str, universe: Option<&[u64]>) -> Result<SocialGraph> {
        let u = universe.map(ids);
        load_graph(text.as_bytes(), u.as_deref())
    }

    #[test]
    fn merges_duplicates_and_orientations() {
        let g = load("1 2\n2 1\n2 3\n", Some(&[1, 2, 3, 4])).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.n_edges(), 2);
        let edges: Vec<_> = g.edges().map(|(a, b)| (a.0, b.0)).collect();
        assert_eq!(edges, vec![(1, 2), (2, 3)]);
        assert!(g.neighbors(UserId(4)).unwrap().is_empty());
    }

    #[test]
    fn empty_stream_gives_isolated_users() {
        let g = load("", Some(&[1, 2])).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn self_loops_are_dropped() {
        let g = load("1\t1\n", None).unwrap();
        assert_eq!(g.n_edges(), 0);
        assert_eq!(g.users(), &ids(&[1])[..]);
        assert!(g.neighbors(UserId(1)).unwrap().is_empty());
    }

    #[test]
    fn comments_and_tabs() {
        let g = load("# header\n1\t2\n\n  # indented comment\n3\t2\n", None).unwrap();
        assert_eq!(g.n_edges(), 2);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match load("1 2\n3\n", None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match load("1 2\nx 3\n", None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("1 -2\n", None), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn endpoint_outside_universe() {
        assert!(matches!(load("1 5\n", Some(&[1, 2])), Err(Error::Validation(_))));
    }

    #[test]
    fn neighbor_lookup() {
        let g = load("1 2\n2 3\n", Some(&[1, 2, 3, 4])).unwrap();
        assert_eq!(g.neighbors(UserId(2)).unwrap(), ids(&[1, 3]));
        assert_eq!(g.neighbors(UserId(4)).unwrap(), vec![]);
        assert!(matches!(g.neighbors(UserId(9)), Err(Error::NotFound(_))));
    }

    #[test]
    fn stats_of_path_plus_isolated() {
        let g = load("1 2\n2 3\n", Some(&[1, 2, 3, 4])).unwrap();
        let s = g.stats();
        assert_eq!(s.n_users, 4);
        assert_eq!(s.n_isolated, 1);
        assert_eq!(s.n_edges, 2);
        assert_eq!(s.mean_degree, 1.0);
        assert_eq!(s.median_degree, 1.0);
        assert!((s.degree_dispersion - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stats_of_single_isolated_user() {
        let g = load("", Some(&[1])).unwrap();
        let s = g.stats();
        assert_eq!((s.n_users, s.n_isolated, s.n_edges), (1, 1, 0));
        assert_eq!((s.mean_degree, s.degree_dispersion, s.median_degree), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rows_are_sorted() {
        let g = load("5 1\n5 3\n5 2\n4 5\n", None).unwrap();
        assert_eq!(g.neighbors(UserId(5)).unwrap(), ids(&[1, 2, 3, 4]));
    }
}
