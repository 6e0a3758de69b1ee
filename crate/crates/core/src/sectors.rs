//! Sets of local photon-number sectors.
//!
//! A sector set is a finite list of sectors plus an optional open tail
//! `N ≥ j`, which covers the two named subspaces ("full", "nonvacuum") and
//! arbitrary filters such as `1-4,6` or `3-`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SectorSet {
    finite: BTreeSet<u32>,
    open_from: Option<u32>,
}

impl SectorSet {
    pub fn full() -> Self {
        Self::at_least(0)
    }

    pub fn nonvacuum() -> Self {
        Self::at_least(1)
    }

    pub fn at_least(from: u32) -> Self {
        Self { finite: BTreeSet::new(), open_from: Some(from) }
    }

    pub fn from_sectors<I: IntoIterator<Item = u32>>(sectors: I) -> Self {
        Self { finite: sectors.into_iter().collect(), open_from: None }
    }

    fn canonical(mut self) -> Self {
        if let Some(j) = self.open_from {
            self.finite.retain(|&n| n < j);
            // fold a contiguous finite run into the tail: {2, 3-} == 2-
            let mut j = j;
            while j > 0 && self.finite.remove(&(j - 1)) {
                j -= 1;
            }
            self.open_from = Some(j);
        }
        self
    }

    pub fn contains(&self, sector: u32) -> bool {
        self.finite.contains(&sector) || self.open_from.is_some_and(|j| sector >= j)
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.open_from.is_none()
    }

    pub fn is_full(&self) -> bool {
        self.open_from == Some(0)
    }

    pub fn is_finite(&self) -> bool {
        self.open_from.is_none()
    }

    pub fn min(&self) -> Option<u32> {
        match (self.finite.first(), self.open_from) {
            (Some(&a), Some(b)) => Some(a.min(b)),
            (Some(&a), None) => Some(a),
            (None, b) => b,
        }
    }

    /// Finite members in ascending order.
    pub fn finite_members(&self) -> impl Iterator<Item = u32> + '_ {
        self.finite.iter().copied()
    }

    /// Start of the open tail `N ≥ j`, if any.
    pub fn open_from(&self) -> Option<u32> {
        self.open_from
    }

    /// Members not exceeding `cap`, ascending.
    pub fn members_up_to(&self, cap: u32) -> Vec<u32> {
        (0..=cap).filter(|&n| self.contains(n)).collect()
    }

    /// Number of members, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.finite.len())
    }
}

impl fmt::Display for SectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.finite.is_empty(), self.open_from) {
            (true, Some(0)) => return f.write_str("full"),
            (true, Some(1)) => return f.write_str("nonvacuum"),
            (true, None) => return f.write_str("empty"),
            _ => {}
        }
        let mut parts = Vec::new();
        let members: Vec<u32> = self.finite.iter().copied().collect();
        let mut i = 0;
        while i < members.len() {
            let start = members[i];
            let mut end = start;
            while i + 1 < members.len() && members[i + 1] == end + 1 {
                i += 1;
                end = members[i];
            }
            parts.push(if start == end { start.to_string() } else { format!("{start}-{end}") });
            i += 1;
        }
        if let Some(j) = self.open_from {
            parts.push(format!("{j}-"));
        }
        f.write_str(&parts.join(","))
    }
}

impl FromStr for SectorSet {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| Error::SectorSpec { spec: spec.to_string(), reason: reason.to_string() };
        let trimmed = spec.trim();
        match trimmed {
            "full" => return Ok(Self::full()),
            "nonvacuum" => return Ok(Self::nonvacuum()),
            "" => return Err(err("empty specification")),
            _ => {}
        }
        let mut set = Self { finite: BTreeSet::new(), open_from: None };
        for part in trimmed.split(',') {
            let part = part.trim();
            let parse = |s: &str| s.trim().parse::<u32>().map_err(|_| err(&format!("bad sector {s:?}")));
            if let Some((lo, hi)) = part.split_once('-') {
                let lo = parse(lo)?;
                if hi.trim().is_empty() {
                    set.open_from = Some(set.open_from.map_or(lo, |j| j.min(lo)));
                } else {
                    let hi = parse(hi)?;
                    if hi < lo {
                        return Err(err(&format!("descending range {part:?}")));
                    }
                    set.finite.extend(lo..=hi);
                }
            } else {
                set.finite.insert(parse(part)?);
            }
        }
        Ok(set.canonical())
    }
}

impl TryFrom<String> for SectorSet {
    type Error = Error;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<SectorSet> for String {
    fn from(value: SectorSet) -> Self {
        value.to_string()
    }
}
