use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{CodeReview, ReviewSource};
use crate::error::{Error, Result};
use crate::Warning;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CveFormat {
    Json,
    Csv,
}

/// One NVD entry with the attributes used for triage and timeline analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CveRecord {
    pub cve_id: String,
    pub publication_date: NaiveDate,
    pub last_modified_date: Option<NaiveDate>,
    pub description: String,
    pub severity: Option<String>,
    pub cvss2_access_complexity: Option<String>,
    pub cvss2_authentication: Option<String>,
    pub cvss2_confidentiality: Option<String>,
    pub cvss3_attack_vector: Option<String>,
    pub cvss3_attack_complexity: Option<String>,
    pub cvss3_integrity: Option<String>,
    pub github_link: Option<String>,
    pub exploit_date: Option<NaiveDate>,
    pub third_party_advisory_date: Option<NaiveDate>,
    pub vendor_advisory_date: Option<NaiveDate>,
    pub patch_date: Option<NaiveDate>,
}

impl CveRecord {
    /// A record with only the mandatory fields set.
    pub fn new(cve_id: impl Into<String>, publication_date: NaiveDate, description: impl Into<String>) -> Self {
        Self {
            cve_id: cve_id.into(),
            publication_date,
            last_modified_date: None,
            description: description.into(),
            severity: None,
            cvss2_access_complexity: None,
            cvss2_authentication: None,
            cvss2_confidentiality: None,
            cvss3_attack_vector: None,
            cvss3_attack_complexity: None,
            cvss3_integrity: None,
            github_link: None,
            exploit_date: None,
            third_party_advisory_date: None,
            vendor_advisory_date: None,
            patch_date: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CveIngest {
    pub records: Vec<CveRecord>,
    pub warnings: Vec<Warning>,
}

/// `CVE-<4 digits>-<4 or more digits>`
pub fn is_valid_cve_id(id: &str) -> bool {
    let mut parts = id.split('-');
    let (Some("CVE"), Some(year), Some(seq), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
        return false;
    };
    year.len() == 4
        && year.bytes().all(|b| b.is_ascii_digit())
        && seq.len() >= 4
        && seq.bytes().all(|b| b.is_ascii_digit())
}

/// Parses `YYYY-MM-DD` or an NVD timestamp (`2020-08-17T15:15:00.000`,
/// optionally with `Z` or a UTC offset). Timestamps keep the calendar day
/// as written.
pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    let s = raw.trim();
    if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(date);
    }
    if s.len() <= 10 || s.as_bytes()[10] != b'T' {
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.naive_local().date());
    }
    let naive = s.strip_suffix('Z').unwrap_or(s);
    ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(naive, fmt).ok())
        .map(|dt| dt.date())
}

const TEXT_FIELDS: [&str; 8] = [
    "severity",
    "cvss2_access_complexity",
    "cvss2_authentication",
    "cvss2_confidentiality",
    "cvss3_attack_vector",
    "cvss3_attack_complexity",
    "cvss3_integrity",
    "github_link",
];

const OPTIONAL_DATE_FIELDS: [&str; 5] = [
    "last_modified_date",
    "exploit_date",
    "third_party_advisory_date",
    "vendor_advisory_date",
    "patch_date",
];

/// Field lookup shared by the JSON and CSV readers. Empty strings are absent.
trait FieldSource {
    fn text(&self, index: usize, field: &'static str) -> Result<Option<String>>;
}

impl FieldSource for Map<String, Value> {
    fn text(&self, index: usize, field: &'static str) -> Result<Option<String>> {
        match self.get(field) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) if s.trim().is_empty() => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.trim().to_string())),
            Some(other) => Err(Error::InvalidField {
                index,
                field,
                message: format!("expected a string, found {other}"),
            }),
        }
    }
}

struct CsvRow<'a> {
    headers: &'a csv::StringRecord,
    row: &'a csv::StringRecord,
}

impl FieldSource for CsvRow<'_> {
    fn text(&self, _index: usize, field: &'static str) -> Result<Option<String>> {
        let value = self
            .headers
            .iter()
            .position(|h| h.trim() == field)
            .and_then(|i| self.row.get(i))
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string);
        Ok(value)
    }
}

fn build_record(src: &impl FieldSource, index: usize, warnings: &mut Vec<Warning>) -> Result<CveRecord> {
    let required =
        |field: &'static str| -> Result<String> { src.text(index, field)?.ok_or(Error::MissingField { index, field }) };

    let cve_id = required("cve_id")?;
    if !is_valid_cve_id(&cve_id) {
        return Err(Error::InvalidField {
            index,
            field: "cve_id",
            message: format!("`{cve_id}` does not match CVE-YYYY-NNNN"),
        });
    }
    let publication_raw = required("publication_date")?;
    let publication_date = parse_date(&publication_raw).ok_or_else(|| Error::InvalidField {
        index,
        field: "publication_date",
        message: format!("unparseable date `{publication_raw}`"),
    })?;
    let description = required("description")?;

    let mut record = CveRecord::new(cve_id, publication_date, description);

    let mut texts = TEXT_FIELDS
        .iter()
        .map(|field| src.text(index, field))
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    record.severity = texts.next().flatten();
    record.cvss2_access_complexity = texts.next().flatten();
    record.cvss2_authentication = texts.next().flatten();
    record.cvss2_confidentiality = texts.next().flatten();
    record.cvss3_attack_vector = texts.next().flatten();
    record.cvss3_attack_complexity = texts.next().flatten();
    record.cvss3_integrity = texts.next().flatten();
    record.github_link = texts.next().flatten();

    let mut dates = Vec::with_capacity(OPTIONAL_DATE_FIELDS.len());
    for field in OPTIONAL_DATE_FIELDS {
        let date = match src.text(index, field)? {
            None => None,
            Some(raw) => {
                let parsed = parse_date(&raw);
                if parsed.is_none() {
                    warnings.push(Warning::new(
                        index,
                        format!("{}: unparseable {field} `{raw}`, treated as absent", record.cve_id),
                    ));
                }
                parsed
            }
        };
        dates.push(date);
    }
    record.last_modified_date = dates[0];
    record.exploit_date = dates[1];
    record.third_party_advisory_date = dates[2];
    record.vendor_advisory_date = dates[3];
    record.patch_date = dates[4];

    Ok(record)
}

/// Reads CVE records from a JSON array of objects or a CSV table whose
/// headers use the same snake_case attribute names.
pub fn ingest_cve_file(content: &[u8], format: CveFormat) -> Result<CveIngest> {
    let mut out = CveIngest::default();
    match format {
        CveFormat::Json => {
            let items: Vec<Value> = serde_json::from_slice(content).map_err(|e| Error::Format {
                index: 0,
                message: format!("expected a JSON array of records: {e}"),
            })?;
            for (index, item) in items.iter().enumerate() {
                let Value::Object(map) = item else {
                    return Err(Error::Format {
                        index,
                        message: "record is not a JSON object".into(),
                    });
                };
                let record = build_record(map, index, &mut out.warnings)?;
                out.records.push(record);
            }
        }
        CveFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(content);
            let headers = reader
                .headers()
                .map_err(|e| Error::Format {
                    index: 0,
                    message: e.to_string(),
                })?
                .clone();
            for (index, row) in reader.records().enumerate() {
                let row = row.map_err(|e| Error::Format {
                    index,
                    message: e.to_string(),
                })?;
                let src = CsvRow {
                    headers: &headers,
                    row: &row,
                };
                let record = build_record(&src, index, &mut out.warnings)?;
                out.records.push(record);
            }
        }
    }
    Ok(out)
}

/// First sentence: text up to the first `.`, `!` or `?` that is followed by
/// whitespace. Without such a terminator the whole text is the sentence.
fn first_sentence(text: &str) -> &str {
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            if let Some(&(_, next)) = chars.peek() {
                if next.is_whitespace() {
                    return &text[..i + c.len_utf8()];
                }
            }
        }
    }
    text
}

pub fn cve_to_review(record: &CveRecord) -> Result<CodeReview> {
    let description = record.description.trim();
    if description.is_empty() {
        return Err(Error::Empty("CVE description"));
    }
    Ok(CodeReview::new(
        record.cve_id.clone(),
        ReviewSource::Nvd,
        first_sentence(description).trim(),
        description,
    ))
}
