//! Sparse verb × noun co-occurrence counts.
//!
//! `m[(i, j)]` is the number of times verb `i` was seen governing noun `j`.
//! Row sums (per verb), column sums (per noun) and the grand total are kept
//! alongside the entries and are always consistent with them.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const COUNTS_MAGIC: &str = "# svlight counts v1";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoocMatrix {
    entries: BTreeMap<(String, String), u64>,
    columns: BTreeMap<String, BTreeMap<String, u64>>,
    row_sums: BTreeMap<String, u64>,
    col_sums: BTreeMap<String, u64>,
    total: u64,
}

/// Accumulates counts before freezing them into a [`CoocMatrix`].
#[derive(Clone, Debug, Default)]
pub struct CoocBuilder {
    entries: BTreeMap<(String, String), u64>,
}

impl CoocBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, verb: &str, noun: &str, count: u64) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let slot = self
            .entries
            .entry((verb.to_string(), noun.to_string()))
            .or_insert(0);
        *slot = slot.checked_add(count).ok_or(Error::Overflow)?;
        Ok(())
    }

    pub fn build(self) -> CoocMatrix {
        CoocMatrix::from_map(self.entries).expect("builder counts fit in u64")
    }
}

impl CoocMatrix {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sums duplicate keys. Fails if any marginal overflows.
    pub fn from_counts<I, V, N>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, N, u64)>,
        V: AsRef<str>,
        N: AsRef<str>,
    {
        let mut builder = CoocBuilder::new();
        for (verb, noun, count) in counts {
            builder.add(verb.as_ref(), noun.as_ref(), count)?;
        }
        CoocMatrix::from_map(builder.entries)
    }

    fn from_map(mut entries: BTreeMap<(String, String), u64>) -> Result<Self> {
        entries.retain(|_, c| *c > 0);
        let mut columns: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        let mut row_sums: BTreeMap<String, u64> = BTreeMap::new();
        let mut col_sums: BTreeMap<String, u64> = BTreeMap::new();
        let mut total: u64 = 0;
        for ((verb, noun), &count) in &entries {
            columns
                .entry(noun.clone())
                .or_default()
                .insert(verb.clone(), count);
            let row = row_sums.entry(verb.clone()).or_insert(0);
            *row = row.checked_add(count).ok_or(Error::Overflow)?;
            let col = col_sums.entry(noun.clone()).or_insert(0);
            *col = col.checked_add(count).ok_or(Error::Overflow)?;
            total = total.checked_add(count).ok_or(Error::Overflow)?;
        }
        Ok(CoocMatrix {
            entries,
            columns,
            row_sums,
            col_sums,
            total,
        })
    }

    pub fn get(&self, verb: &str, noun: &str) -> u64 {
        self.columns
            .get(noun)
            .and_then(|col| col.get(verb))
            .copied()
            .unwrap_or(0)
    }

    pub fn row_sum(&self, verb: &str) -> u64 {
        self.row_sums.get(verb).copied().unwrap_or(0)
    }

    pub fn col_sum(&self, noun: &str) -> u64 {
        self.col_sums.get(noun).copied().unwrap_or(0)
    }

    pub fn row_sums(&self) -> &BTreeMap<String, u64> {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &BTreeMap<String, u64> {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of nonzero cells.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn verbs(&self) -> impl Iterator<Item = &str> {
        self.row_sums.keys().map(String::as_str)
    }

    pub fn nouns(&self) -> impl Iterator<Item = &str> {
        self.col_sums.keys().map(String::as_str)
    }

    /// Nonzero cells in `(verb, noun)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.entries
            .iter()
            .map(|((v, n), &c)| (v.as_str(), n.as_str(), c))
    }

    /// All verbs governing `noun`, with their counts. Empty for unseen nouns.
    pub fn column(&self, noun: &str) -> BTreeMap<String, u64> {
        self.columns.get(noun).cloned().unwrap_or_default()
    }

    pub(crate) fn column_ref(&self, noun: &str) -> Option<&BTreeMap<String, u64>> {
        self.columns.get(noun)
    }

    pub fn merge(&self, other: &CoocMatrix) -> Result<CoocMatrix> {
        let (mut entries, smaller) = if self.entries.len() >= other.entries.len() {
            (self.entries.clone(), &other.entries)
        } else {
            (other.entries.clone(), &self.entries)
        };
        for (key, &count) in smaller {
            let slot = entries.entry(key.clone()).or_insert(0);
            *slot = slot.checked_add(count).ok_or(Error::Overflow)?;
        }
        CoocMatrix::from_map(entries)
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<CoocMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|(k, &c)| {
                c.checked_mul(factor)
                    .map(|c| (k.clone(), c))
                    .ok_or(Error::Overflow)
            })
            .collect::<Result<_>>()?;
        CoocMatrix::from_map(entries)
    }

    /// Keeps only the given nouns' columns.
    pub fn restrict_nouns<F: Fn(&str) -> bool>(&self, keep: F) -> CoocMatrix {
        let entries = self
            .entries
            .iter()
            .filter(|((_, n), _)| keep(n))
            .map(|(k, &c)| (k.clone(), c))
            .collect();
        CoocMatrix::from_map(entries).expect("subset of a valid matrix")
    }

    /// Recomputes every cached marginal and compares it with the stored one.
    pub fn verify(&self) -> bool {
        match CoocMatrix::from_map(self.entries.clone()) {
            Ok(fresh) => {
                fresh == *self
                    && self.row_sums.values().sum::<u64>() == self.total
                    && self.col_sums.values().sum::<u64>() == self.total
            }
            Err(_) => false,
        }
    }

    /// Writes the counts TSV: a `#` header, then `verb<TAB>noun<TAB>count`
    /// rows sorted by verb and noun. `provenance` lines are emitted as extra
    /// header comments.
    pub fn save<W: Write>(&self, out: &mut W, provenance: &[String]) -> std::io::Result<()> {
        writeln!(out, "{COUNTS_MAGIC}")?;
        for line in provenance {
            writeln!(out, "# {line}")?;
        }
        for ((verb, noun), count) in &self.entries {
            writeln!(out, "{verb}\t{noun}\t{count}")?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(input: R) -> Result<CoocMatrix> {
        let mut entries = BTreeMap::new();
        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [verb, noun, count] = fields[..] else {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "expected verb<TAB>noun<TAB>count, found {} fields",
                        fields.len()
                    ),
                ));
            };
            if verb.is_empty() || noun.is_empty() {
                return Err(Error::parse(line_no, "empty verb or noun"));
            }
            if count.starts_with('-') {
                return Err(Error::parse(line_no, format!("negative count {count}")));
            }
            let count: u64 = count
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid count {count:?}")))?;
            if count == 0 {
                return Err(Error::parse(line_no, "zero count"));
            }
            if entries
                .insert((verb.to_string(), noun.to_string()), count)
                .is_some()
            {
                return Err(Error::parse(
                    line_no,
                    format!("duplicate entry ({verb}, {noun})"),
                ));
            }
        }
        CoocMatrix::from_map(entries)
    }
}
