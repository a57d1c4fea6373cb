//! CVE exploitation timeline classification.
//!
//! A CVE counts as a zero-day attack when its exploit date precedes or
//! coincides with public disclosure, taken as the earliest third-party or
//! vendor advisory. All comparisons are at day granularity.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::CveRecord;
use crate::error::{Error, Result};

/// CVEs left out of the published analysis for unclear advisory dates.
pub const SAMPLE_EXCLUSIONS: &str = include_str!("../data/excluded_cves.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimelineVerdict {
    ZeroDay,
    NotExploited,
    PatchedBeforeExploit,
    ExploitedAfterDisclosure,
    Uncertain,
}

impl TimelineVerdict {
    pub const ALL: [TimelineVerdict; 5] = [
        TimelineVerdict::ZeroDay,
        TimelineVerdict::NotExploited,
        TimelineVerdict::PatchedBeforeExploit,
        TimelineVerdict::ExploitedAfterDisclosure,
        TimelineVerdict::Uncertain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TimelineVerdict::ZeroDay => "zero_day",
            TimelineVerdict::NotExploited => "not_exploited",
            TimelineVerdict::PatchedBeforeExploit => "patched_before_exploit",
            TimelineVerdict::ExploitedAfterDisclosure => "exploited_after_disclosure",
            TimelineVerdict::Uncertain => "uncertain",
        }
    }
}

impl fmt::Display for TimelineVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rule ordering switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelinePolicy {
    /// Check for a patch preceding the exploit before checking for a
    /// zero-day. When false, a record that satisfies both is a zero-day.
    pub patch_before_zero_day: bool,
}

impl Default for TimelinePolicy {
    fn default() -> Self {
        Self {
            patch_before_zero_day: true,
        }
    }
}

/// Earliest of the third-party and vendor advisory dates.
pub fn disclosure_date(record: &CveRecord) -> Option<NaiveDate> {
    match (record.third_party_advisory_date, record.vendor_advisory_date) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

pub fn classify_timeline(record: &CveRecord) -> TimelineVerdict {
    classify_timeline_with(record, TimelinePolicy::default())
}

pub fn classify_timeline_with(record: &CveRecord, policy: TimelinePolicy) -> TimelineVerdict {
    let exploit = record.exploit_date;
    let patch = record.patch_date;
    let disclosure = disclosure_date(record);

    let patched_first = match (patch, exploit) {
        (Some(p), Some(e)) => p < e,
        (Some(_), None) => true,
        (None, _) => false,
    };
    let zero_day = matches!((exploit, disclosure), (Some(e), Some(d)) if e <= d);

    if !policy.patch_before_zero_day && zero_day {
        return TimelineVerdict::ZeroDay;
    }
    if patched_first {
        return TimelineVerdict::PatchedBeforeExploit;
    }
    match (exploit, disclosure) {
        (None, Some(_)) => TimelineVerdict::NotExploited,
        (Some(e), Some(d)) if e <= d => TimelineVerdict::ZeroDay,
        (Some(_), Some(_)) => TimelineVerdict::ExploitedAfterDisclosure,
        // Without a disclosure date (and no earlier patch) nothing can be
        // concluded about the exploit.
        (_, None) => TimelineVerdict::Uncertain,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictShare {
    pub verdict: TimelineVerdict,
    pub count: usize,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroDayStats {
    /// Records analysed, exclusions removed.
    pub total: usize,
    pub verdicts: Vec<VerdictShare>,
    /// Ids of input records that were excluded, sorted.
    pub excluded: Vec<String>,
}

impl ZeroDayStats {
    pub fn share(&self, verdict: TimelineVerdict) -> &VerdictShare {
        self.verdicts
            .iter()
            .find(|s| s.verdict == verdict)
            .expect("every verdict is reported")
    }
}

pub fn zero_day_stats(records: &[CveRecord], exclusions: &HashSet<String>) -> Result<ZeroDayStats> {
    zero_day_stats_with(records, exclusions, TimelinePolicy::default())
}

pub fn zero_day_stats_with(
    records: &[CveRecord],
    exclusions: &HashSet<String>,
    policy: TimelinePolicy,
) -> Result<ZeroDayStats> {
    let mut counts = [0usize; TimelineVerdict::ALL.len()];
    let mut excluded = BTreeSet::new();
    for record in records {
        if exclusions.contains(&record.cve_id) {
            excluded.insert(record.cve_id.clone());
            continue;
        }
        let verdict = classify_timeline_with(record, policy);
        counts[TimelineVerdict::ALL
            .iter()
            .position(|v| *v == verdict)
            .expect("known verdict")] += 1;
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::Empty("CVE records after exclusions"));
    }
    let verdicts = TimelineVerdict::ALL
        .iter()
        .zip(counts)
        .map(|(&verdict, count)| VerdictShare {
            verdict,
            count,
            percentage: 100.0 * count as f64 / total as f64,
        })
        .collect();
    Ok(ZeroDayStats {
        total,
        verdicts,
        excluded: excluded.into_iter().collect(),
    })
}

/// Parses an exclusion list: one CVE id per line, `#` comments.
pub fn parse_exclusions(text: &str) -> HashSet<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|id| !id.is_empty())
        .map(str::to_string)
        .collect()
}

/// `cve_id,verdict` per record, in input order.
pub fn write_verdicts_csv<W: Write>(records: &[CveRecord], policy: TimelinePolicy, mut out: W) -> Result<()> {
    let mut text = String::from("cve_id,verdict\n");
    for record in records {
        text.push_str(&record.cve_id);
        text.push(',');
        text.push_str(classify_timeline_with(record, policy).as_str());
        text.push('\n');
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<verdicts>", e))
}
