//! Indirect standardization of event rates.
//!
//! A crude rate divides total events by total exposure and is distorted by a
//! population's category mix. Indirect standardization applies category
//! rates from a standard population to the target's exposures to get the
//! events that would be expected there; the standardized ratio (SMR) is
//! actual over expected, and the indirectly standardized rate (ISDR) is the
//! SMR scaled by the standard's crude rate.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Category {
    pub label: String,
    pub exposure: u64,
    pub events: u64,
}

/// Categories in input order. Exposures are positive and labels unique;
/// events may exceed exposure (multi-period tallies).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopulationTable {
    categories: Vec<Category>,
}

impl PopulationTable {
    pub fn new<I, L>(categories: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, u64, u64)>,
        L: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (label, exposure, events) in categories {
            let label = label.into();
            if exposure == 0 {
                return Err(Error::Population(format!(
                    "category {label:?} has zero exposure"
                )));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::Population(format!("duplicate category {label:?}")));
            }
            out.push(Category {
                label,
                exposure,
                events,
            });
        }
        Ok(PopulationTable { categories: out })
    }

    /// Reads `label<TAB>exposure<TAB>events` lines; `#` starts a comment.
    pub fn load<R: BufRead>(input: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [label, exposure, events] = fields[..] else {
                return Err(Error::parse(
                    line_no,
                    "expected label<TAB>exposure<TAB>events",
                ));
            };
            let parse = |what: &str, value: &str| {
                value
                    .parse::<u64>()
                    .map_err(|_| Error::parse(line_no, format!("invalid {what} {value:?}")))
            };
            let exposure = parse("exposure", exposure)?;
            let events = parse("events", events)?;
            if exposure == 0 {
                return Err(Error::parse(line_no, "exposure must be positive"));
            }
            if rows.iter().any(|(l, _, _): &(String, u64, u64)| l == label) {
                return Err(Error::parse(
                    line_no,
                    format!("duplicate category {label:?}"),
                ));
            }
            rows.push((label.to_string(), exposure, events));
        }
        PopulationTable::new(rows)
    }

    /// Categorical sum of two populations: shared labels add, the rest are
    /// carried over. Order follows `a`, then labels new in `b`.
    pub fn union(a: &PopulationTable, b: &PopulationTable) -> PopulationTable {
        let mut categories = a.categories.clone();
        for cat in &b.categories {
            match categories.iter_mut().find(|c| c.label == cat.label) {
                Some(existing) => {
                    existing.exposure += cat.exposure;
                    existing.events += cat.events;
                }
                None => categories.push(cat.clone()),
            }
        }
        PopulationTable { categories }
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn total_exposure(&self) -> u128 {
        self.categories.iter().map(|c| u128::from(c.exposure)).sum()
    }

    pub fn total_events(&self) -> u128 {
        self.categories.iter().map(|c| u128::from(c.events)).sum()
    }

    /// Every exposure and event count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> PopulationTable {
        PopulationTable {
            categories: self
                .categories
                .iter()
                .map(|c| Category {
                    label: c.label.clone(),
                    exposure: c.exposure * k,
                    events: c.events * k,
                })
                .collect(),
        }
    }
}

pub fn crude_rate<T: Scalar>(p: &PopulationTable) -> Result<T> {
    let exposure = p.total_exposure();
    if exposure == 0 {
        return Err(Error::ZeroExposure);
    }
    Ok(T::ratio(p.total_events(), exposure))
}

pub fn category_rates<T: Scalar>(p: &PopulationTable) -> BTreeMap<String, T> {
    p.categories
        .iter()
        .map(|c| {
            (
                c.label.clone(),
                T::ratio(c.events.into(), c.exposure.into()),
            )
        })
        .collect()
}

/// `sum_x rate[x] * exposure[x]` over the target's categories.
pub fn expected_events<T: Scalar>(
    standard_rates: &BTreeMap<String, T>,
    target: &PopulationTable,
) -> Result<T> {
    target.categories.iter().try_fold(T::zero(), |acc, c| {
        let rate = standard_rates
            .get(&c.label)
            .ok_or_else(|| Error::MissingCategory(c.label.clone()))?;
        Ok(acc + rate.clone() * T::from_count(c.exposure.into()))
    })
}

pub fn smr<T: Scalar>(target: &PopulationTable, standard: &PopulationTable) -> Result<T> {
    let expected: T = expected_events(&category_rates(standard), target)?;
    if expected.is_zero() {
        return Err(Error::ZeroExpected);
    }
    Ok(T::from_count(target.total_events()) / expected)
}

pub fn isdr<T: Scalar>(target: &PopulationTable, standard: &PopulationTable) -> Result<T> {
    Ok(smr::<T>(target, standard)? * crude_rate::<T>(standard)?)
}

/// All the headline figures for one target/standard pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardization<T> {
    pub crude_target: T,
    pub crude_standard: T,
    pub actual_events: u128,
    pub expected_events: T,
    pub smr: T,
    pub isdr: T,
}

pub fn standardize<T: Scalar>(
    target: &PopulationTable,
    standard: &PopulationTable,
) -> Result<Standardization<T>> {
    let expected: T = expected_events(&category_rates(standard), target)?;
    let smr: T = smr(target, standard)?;
    let crude_standard: T = crude_rate(standard)?;
    Ok(Standardization {
        crude_target: crude_rate(target)?,
        isdr: smr.clone() * crude_standard.clone(),
        crude_standard,
        actual_events: target.total_events(),
        expected_events: expected,
        smr,
    })
}
