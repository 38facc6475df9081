//! Per-user profile attributes and the follow ratio.

use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::UserId;
use crate::stats::{self, BoxStats, CorrelationMatrix};
use crate::text;

/// `(#friends + 1) / (#followers + 1)`; every account counts as following
/// itself, which keeps the ratio finite and positive.
pub fn follow_ratio(friends: u64, followers: u64) -> f64 {
    (friends as f64 + 1.0) / (followers as f64 + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Friends,
    Followers,
    Ratio,
}

impl Attribute {
    pub const ALL: [Attribute; 3] = [Attribute::Friends, Attribute::Followers, Attribute::Ratio];

    pub fn as_str(self) -> &'static str {
        match self {
            Attribute::Friends => "friends",
            Attribute::Followers => "followers",
            Attribute::Ratio => "ratio",
        }
    }

    /// Column heading used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Attribute::Friends => "#friends",
            Attribute::Followers => "#followers",
            Attribute::Ratio => "#friends/#followers",
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Attribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "friends" | "#friends" => Ok(Attribute::Friends),
            "followers" | "#followers" => Ok(Attribute::Followers),
            "ratio" | "follow_ratio" | "#friends/#followers" => Ok(Attribute::Ratio),
            _ => Err(Error::InvalidArgument(format!("unknown attribute {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeRecord {
    pub friends: u64,
    pub followers: u64,
    /// Stored once at construction so every consumer sees the same value.
    pub ratio: f64,
}

impl AttributeRecord {
    pub fn new(friends: u64, followers: u64) -> Self {
        AttributeRecord {
            friends,
            followers,
            ratio: follow_ratio(friends, followers),
        }
    }

    pub fn value(&self, which: Attribute) -> f64 {
        match which {
            Attribute::Friends => self.friends as f64,
            Attribute::Followers => self.followers as f64,
            Attribute::Ratio => self.ratio,
        }
    }
}

/// Attribute records keyed by user, sorted by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttributeTable {
    ids: Vec<UserId>,
    records: Vec<AttributeRecord>,
}

impl AttributeTable {
    /// Builds a table from `(user, friends, followers)` rows. Duplicate ids
    /// are rejected.
    pub fn from_counts<I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (UserId, u64, u64)>,
    {
        let mut rows: Vec<(UserId, AttributeRecord)> = rows
            .into_iter()
            .map(|(u, fr, fo)| (u, AttributeRecord::new(fr, fo)))
            .collect();
        rows.sort_by_key(|r| r.0);
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation(format!("duplicate user id {}", w[0].0)));
        }
        let (ids, records) = rows.into_iter().unzip();
        Ok(AttributeTable { ids, records })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn users(&self) -> &[UserId] {
        &self.ids
    }

    pub fn records(&self) -> &[AttributeRecord] {
        &self.records
    }

    pub fn get(&self, u: UserId) -> Option<&AttributeRecord> {
        self.ids.binary_search(&u).ok().map(|i| &self.records[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (UserId, &AttributeRecord)> {
        self.ids.iter().copied().zip(&self.records)
    }

    /// Values of `which` for `users`, in ascending user-id order.
    pub fn attribute_values(&self, which: Attribute, users: &[UserId]) -> Result<Vec<f64>> {
        let mut sorted = users.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut missing = Vec::new();
        let mut out = Vec::with_capacity(sorted.len());
        for u in sorted {
            match self.get(u) {
                Some(r) => out.push(r.value(which)),
                None => missing.push(u),
            }
        }
        if !missing.is_empty() {
            return Err(Error::NotFound(format!(
                "no attributes for users {}",
                join_ids(&missing)
            )));
        }
        Ok(out)
    }

    /// Values of `which` over every user in the table, ascending by id.
    pub fn column(&self, which: Attribute) -> Vec<f64> {
        self.records.iter().map(|r| r.value(which)).collect()
    }

    pub fn box_stats(&self, which: Attribute) -> Result<BoxStats> {
        stats::box_stats(&self.column(which))
    }

    /// Spearman coefficients over all users, in the order
    /// friends/followers, friends/ratio, followers/ratio.
    pub fn correlation_matrix(&self) -> Result<CorrelationMatrix> {
        if self.len() < 2 {
            return Err(Error::InvalidArgument(
                "correlations need at least two users".into(),
            ));
        }
        let friends = self.column(Attribute::Friends);
        let followers = self.column(Attribute::Followers);
        let ratio = self.column(Attribute::Ratio);
        let defined = |x: &[f64], y: &[f64]| -> Result<Option<f64>> {
            if is_constant(x) || is_constant(y) {
                return Ok(None);
            }
            stats::spearman(x, y).map(Some)
        };
        Ok(CorrelationMatrix {
            friends_followers: defined(&friends, &followers)?,
            friends_ratio: defined(&friends, &ratio)?,
            followers_ratio: defined(&followers, &ratio)?,
        })
    }

    /// Writes `id \t friends \t followers` lines, ascending by id.
    pub fn write<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for (u, r) in self.iter() {
            writeln!(w, "{u}\t{}\t{}", r.friends, r.followers)?;
        }
        w.flush()
    }
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

fn join_ids(ids: &[UserId]) -> String {
    const SHOWN: usize = 20;
    let mut s = ids
        .iter()
        .take(SHOWN)
        .map(|u| u.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(" and {} more", ids.len() - SHOWN));
    }
    s
}

/// Reads `id, friends_count, followers_count` lines.
pub fn load_attributes<R: BufRead>(reader: R) -> Result<AttributeTable> {
    let mut rows = Vec::new();
    text::for_each_record(reader, |line, fields| {
        if fields.len() != 3 {
            return Err(Error::parse(
                line,
                format!("expected id, friends, followers; found {} fields", fields.len()),
            ));
        }
        let id = text::parse_u64(line, fields[0], "user id")?;
        let count = |field: &str, what: &str| -> Result<u64> {
            match field.parse::<i64>() {
                Ok(v) if v < 0 => Err(Error::Validation(format!(
                    "line {line}: negative {what} {v} for user {id}"
                ))),
                _ => text::parse_u64(line, field, what),
            }
        };
        let friends = count(fields[1], "friends count")?;
        let followers = count(fields[2], "followers count")?;
        rows.push((UserId(id), friends, followers));
        Ok(())
    })?;
    AttributeTable::from_counts(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(u64, u64, u64)]) -> AttributeTable {
        AttributeTable::from_counts(rows.iter().map(|&(u, a, b)| (UserId(u), a, b))).unwrap()
    }

    #[test]
    fn ratio_formula() {
        let t = load_attributes("7\t0\t0\n8\t99\t199\n".as_bytes()).unwrap();
        assert_eq!(t.get(UserId(7)).unwrap().ratio, 1.0);
        assert_eq!(t.get(UserId(8)).unwrap().ratio, 0.5);
    }

    #[test]
    fn negative_count_rejected() {
        assert!(matches!(
            load_attributes("9\t-1\t5\n".as_bytes()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn duplicate_id_rejected() {
        assert!(matches!(
            load_attributes("1\t2\t3\n1\t4\t5\n".as_bytes()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(
            load_attributes("1\t2\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_attributes("# c\n1\t2\tx\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn values_in_id_order() {
        let t = table(&[(2, 5, 0), (1, 3, 0)]);
        assert_eq!(
            t.attribute_values(Attribute::Friends, &[UserId(2), UserId(1)]).unwrap(),
            vec![3.0, 5.0]
        );
        assert!(t.attribute_values(Attribute::Ratio, &[]).unwrap().is_empty());
        let t = table(&[(1, 1, 0), (2, 0, 1)]);
        assert_eq!(
            t.attribute_values(Attribute::Ratio, &[UserId(1), UserId(2)]).unwrap(),
            vec![2.0, 0.5]
        );
    }

    #[test]
    fn missing_users_listed() {
        let t = table(&[(1, 1, 1)]);
        match t.attribute_values(Attribute::Friends, &[UserId(1), UserId(4), UserId(3)]) {
            Err(Error::NotFound(msg)) => assert!(msg.contains("3, 4"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn correlations_of_mirrored_counts() {
        let t = table(&[(1, 1, 4), (2, 2, 3), (3, 3, 2), (4, 4, 1)]);
        let c = t.correlation_matrix().unwrap();
        assert_eq!(c.friends_followers, Some(-1.0));
        assert_eq!(c.friends_ratio, Some(1.0));
        assert_eq!(c.followers_ratio, Some(-1.0));

        // followers == friends: the ratio column is constant
        let t = table(&[(1, 1, 1), (2, 5, 5), (3, 9, 9)]);
        let c = t.correlation_matrix().unwrap();
        assert_eq!(c.friends_followers, Some(1.0));
        assert_eq!(c.friends_ratio, None);
        assert!(table(&[(1, 1, 1)]).correlation_matrix().is_err());
    }

    #[test]
    fn attribute_names() {
        for a in Attribute::ALL {
            assert_eq!(a.as_str().parse::<Attribute>().unwrap(), a);
            assert_eq!(a.label().parse::<Attribute>().unwrap(), a);
        }
        assert!("tweets".parse::<Attribute>().is_err());
    }
}
