//! Embedded reference results for root-system searches and a structural
//! comparison against fresh runs.

use serde::{Deserialize, Serialize};

use crate::detector::{search, DetectMode, DetectOptions, DetectionCell, ResultStore};
use crate::error::{Error, Result};
use crate::pointsets::root_system;

const GOLDEN: &str = include_str!("../data/golden.json");

/// (n, d, m, edim, adim) of an unexpected cell.
pub type Tuple = (usize, u32, u32, i64, i64);

#[derive(Clone, Debug, Deserialize)]
pub struct Golden {
    pub name: String,
    pub system: String,
    pub ranks: Vec<u32>,
    pub d: (u32, u32),
    pub m: (u32, u32),
    pub tuples: Vec<Tuple>,
}

pub fn goldens() -> Vec<Golden> {
    serde_json::from_str(GOLDEN).expect("embedded golden data parses")
}

pub fn golden(name: &str) -> Result<Golden> {
    goldens()
        .into_iter()
        .find(|g| g.name == name)
        .ok_or_else(|| Error::Domain(format!("no reference data named `{name}`")))
}

#[derive(Clone, Debug, Serialize)]
pub struct Reproduction {
    pub name: String,
    pub cells: Vec<(String, DetectionCell)>,
    pub found: Vec<Tuple>,
    pub missing: Vec<Tuple>,
    pub extra: Vec<Tuple>,
    pub matches: bool,
}

pub fn tuple(cell: &DetectionCell) -> Tuple {
    (cell.n, cell.d, cell.m, cell.edim, cell.adim)
}

/// Runs every grid of `g` and compares the unexpected cells with the
/// reference tuples as sets.
pub fn reproduce(
    g: &Golden,
    mode: DetectMode,
    opts: &DetectOptions,
    store: Option<&ResultStore>,
) -> Result<Reproduction> {
    let mut cells = Vec::new();
    for &rank in &g.ranks {
        let z = root_system(&g.system, rank)?;
        for c in search(&z, g.d, g.m, mode, opts, store)? {
            cells.push((z.label().to_string(), c));
        }
    }
    let found: Vec<Tuple> = cells.iter().filter(|(_, c)| c.unexpected).map(|(_, c)| tuple(c)).collect();
    let missing: Vec<Tuple> = g.tuples.iter().filter(|t| !found.contains(t)).cloned().collect();
    let extra: Vec<Tuple> = found.iter().filter(|t| !g.tuples.contains(t)).cloned().collect();
    Ok(Reproduction {
        name: g.name.clone(),
        matches: missing.is_empty() && extra.is_empty(),
        cells,
        found,
        missing,
        extra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        let all = goldens();
        assert_eq!(all.len(), 9);
        assert_eq!(golden("table1").unwrap().tuples.len(), 7);
        assert!(golden("nope").is_err());
    }

    #[test]
    fn h3_reproduces() {
        let r = reproduce(&golden("h3").unwrap(), DetectMode::Hybrid, &DetectOptions::default(), None).unwrap();
        assert!(r.matches, "{:?} {:?}", r.missing, r.extra);
    }
}
