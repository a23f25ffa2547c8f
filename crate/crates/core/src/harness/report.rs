use std::collections::BTreeMap;
use std::io::Write;

use super::record::{PairRecord, Status};
use crate::error::{Error, Result};

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// One record per line, keys in declaration order.
pub fn write_jsonl<W: Write>(records: &[PairRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(io)?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SummaryRow {
    pub count: u64,
    pub failures: u64,
}

/// Counts keyed by `(group, r, type)`, sorted by key.
pub fn summarize(records: &[PairRecord]) -> BTreeMap<(String, i64, String), SummaryRow> {
    let mut out: BTreeMap<(String, i64, String), SummaryRow> = BTreeMap::new();
    for r in records {
        let row = out.entry((r.group.clone(), r.r, r.type_label())).or_default();
        row.count += 1;
        if matches!(r.verification, Status::Fail | Status::Error) {
            row.failures += 1;
        }
    }
    out
}

/// Summary table with header `group,r,type,count,failures`.
pub fn write_csv<W: Write>(records: &[PairRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "r", "type", "count", "failures"]).map_err(io)?;
    for ((group, r, kind), row) in summarize(records) {
        w.write_record([group, r.to_string(), kind, row.count.to_string(), row.failures.to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use crate::harness::config::Config;
    use crate::harness::enumerate::{enumerate, EnumerationTask};

    #[test]
    fn empty_stream() {
        let mut j = Vec::new();
        write_jsonl(&[], &mut j).unwrap();
        assert!(j.is_empty());
        let mut c = Vec::new();
        write_csv(&[], &mut c).unwrap();
        assert_eq!(String::from_utf8(c).unwrap(), "group,r,type,count,failures\n");
    }

    #[test]
    fn summary_counts_match_records() {
        let g = FiniteAbelianGroup::cyclic(6).unwrap();
        let recs = enumerate(&EnumerationTask::new(g), &Config::default()).unwrap();
        let rows = summarize(&recs);
        assert_eq!(rows.values().map(|r| r.count).sum::<u64>(), recs.len() as u64);
        assert_eq!(rows.values().map(|r| r.failures).sum::<u64>(), 0);
        let mut c = Vec::new();
        write_csv(&recs, &mut c).unwrap();
        assert_eq!(String::from_utf8(c).unwrap().lines().count(), rows.len() + 1);
    }
}
