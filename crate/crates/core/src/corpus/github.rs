use std::collections::HashSet;

use serde_json::Value;

use super::{CodeReview, ReviewSource};
use crate::error::{Error, Result};
use crate::Warning;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GithubIngest {
    pub reviews: Vec<CodeReview>,
    pub warnings: Vec<Warning>,
}

fn issue_id(value: Option<&Value>, index: usize) -> Result<String> {
    match value {
        Some(Value::String(s)) if !s.trim().is_empty() => Ok(s.trim().to_string()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        None | Some(Value::Null) => Err(Error::MissingField { index, field: "id" }),
        Some(other) => Err(Error::InvalidField {
            index,
            field: "id",
            message: format!("expected a string or integer, found {other}"),
        }),
    }
}

fn issue_text(value: Option<&Value>, index: usize, field: &'static str, nullable: bool) -> Result<String> {
    match value {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Null) if nullable => Ok(String::new()),
        None | Some(Value::Null) => Err(Error::MissingField { index, field }),
        Some(other) => Err(Error::InvalidField {
            index,
            field,
            message: format!("expected a string, found {other}"),
        }),
    }
}

/// Reads a GitHub issue export (JSON array of `{id, title, body, state}`)
/// and keeps only closed issues.
pub fn ingest_github_export(content: &[u8]) -> Result<GithubIngest> {
    let items: Vec<Value> = serde_json::from_slice(content).map_err(|e| Error::Format {
        index: 0,
        message: format!("expected a JSON array of issues: {e}"),
    })?;

    let mut out = GithubIngest::default();
    let mut seen = HashSet::new();
    for (index, item) in items.iter().enumerate() {
        let Value::Object(map) = item else {
            return Err(Error::Format {
                index,
                message: "issue is not a JSON object".into(),
            });
        };
        let id = issue_id(map.get("id"), index)?;
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        let title = issue_text(map.get("title"), index, "title", false)?;
        // GitHub exports carry `null` for issues opened without a body.
        let body = issue_text(map.get("body"), index, "body", true)?;

        let state = match map.get("state") {
            Some(Value::String(s)) => s.trim().to_ascii_lowercase(),
            _ => {
                out.warnings
                    .push(Warning::new(index, format!("issue {id}: missing state, rejected")));
                continue;
            }
        };
        match state.as_str() {
            "closed" => out.reviews.push(CodeReview::new(id, ReviewSource::Github, title, body)),
            "open" => {}
            other => out.warnings.push(Warning::new(
                index,
                format!("issue {id}: unknown state `{other}`, rejected"),
            )),
        }
    }
    Ok(out)
}
