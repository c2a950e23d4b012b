use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use super::{csv_error, line_of, parse_field, reader};
use crate::error::{Error, Result};
use crate::objectives::RatingObjective;

/// A densified rating matrix together with the original ids.
#[derive(Debug, Clone)]
pub struct RatingTable {
    pub objective: RatingObjective,
    /// `user_ids[u]` is the file id of dense user `u`.
    pub user_ids: Vec<String>,
    /// `item_ids[j]` is the file id of dense item `j`, i.e. element `j`.
    pub item_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Id {
    Num(u64),
    Text(String),
}

impl Id {
    fn new(raw: &str) -> Self {
        raw.parse().map_or_else(|_| Id::Text(raw.to_string()), Id::Num)
    }

    fn label(&self) -> String {
        match self {
            Id::Num(v) => v.to_string(),
            Id::Text(s) => s.clone(),
        }
    }
}

// Numeric ids sort numerically and ahead of textual ones, so dense 0-based
// ids map to themselves.
fn densify(ids: impl Iterator<Item = Id>) -> BTreeMap<Id, usize> {
    let mut map: BTreeMap<Id, usize> = ids.map(|id| (id, 0)).collect();
    for (k, v) in map.values_mut().enumerate() {
        *v = k;
    }
    map
}

/// Reads `user,item,rating` triplets. Unrated pairs become zero.
pub fn parse_ratings<R: Read>(input: R) -> Result<RatingTable> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != ["user", "item", "rating"] {
        return Err(Error::format(1, "header must be `user,item,rating`"));
    }
    let mut triplets = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        if rec.len() != 3 {
            return Err(Error::format(line, format!("expected 3 fields, found {}", rec.len())));
        }
        let user = rec[0].trim();
        let item = rec[1].trim();
        if user.is_empty() || item.is_empty() {
            return Err(Error::format(line, "empty user or item id"));
        }
        let rating: f64 = parse_field(&rec, 2, "rating")?;
        if !rating.is_finite() || rating < 0.0 {
            return Err(Error::format(line, format!("rating must be finite and nonnegative, got {rating}")));
        }
        triplets.push((Id::new(user), Id::new(item), rating, line));
    }
    if triplets.is_empty() {
        return Err(Error::format(None, "no ratings"));
    }
    let users = densify(triplets.iter().map(|t| t.0.clone()));
    let items = densify(triplets.iter().map(|t| t.1.clone()));
    let mut matrix = vec![0.0; users.len() * items.len()];
    let mut seen = HashMap::new();
    for (u, j, r, line) in &triplets {
        let (u, j) = (users[u], items[j]);
        if let Some(first) = seen.insert((u, j), *line) {
            return Err(Error::format(
                *line,
                format!("duplicate rating (first given at line {})", first.unwrap_or(0)),
            ));
        }
        matrix[u * items.len() + j] = *r;
    }
    Ok(RatingTable {
        objective: RatingObjective::new(users.len(), items.len(), &matrix)?,
        user_ids: users.keys().map(Id::label).collect(),
        item_ids: items.keys().map(Id::label).collect(),
    })
}

pub fn load_ratings(path: impl AsRef<Path>) -> Result<RatingTable> {
    parse_ratings(std::io::BufReader::new(super::open(path.as_ref())?))
}
