use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use oaclass_core::Doi;
use serde_json::Value;
use url::Url;

use crate::oai::{HarvestState, RAW_DIR, STATE_FILE};
use crate::{io_err, HarvestError, HarvestJob, HttpClient};

pub const ITEMS_FILE: &str = "items.ndjson";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PagedOutcome {
    pub items: u64,
    /// Identifiers that could not be fetched, with the reason.
    pub misses: Vec<(String, String)>,
    pub pages: u32,
    pub requests: u64,
    /// Cursor to resume from when the run stopped early.
    pub next_cursor: Option<String>,
    pub items_path: PathBuf,
}

fn malformed(url: &str, message: impl Into<String>) -> HarvestError {
    HarvestError::Malformed { url: url.to_string(), message: message.into() }
}

fn cursor_url(endpoint: &str, cursor: &str) -> Result<String, HarvestError> {
    let mut url = Url::parse(endpoint).map_err(|e| HarvestError::Config(e.to_string()))?;
    url.query_pairs_mut().append_pair("cursor", cursor);
    Ok(url.into())
}

/// `{doi}` in the endpoint is replaced by the DOI; otherwise the DOI is
/// appended as trailing path segments.
fn doi_url(endpoint: &str, doi: &Doi) -> Result<String, HarvestError> {
    if endpoint.contains("{doi}") {
        return Ok(endpoint.replace("{doi}", doi.as_str()));
    }
    let mut url = Url::parse(endpoint).map_err(|e| HarvestError::Config(e.to_string()))?;
    url.path_segments_mut()
        .map_err(|_| HarvestError::Config(format!("endpoint {endpoint:?} cannot take a path")))?
        .pop_if_empty()
        .extend(doi.as_str().split('/'));
    Ok(url.into())
}

fn page_items(body: &Value) -> Option<&Vec<Value>> {
    body.pointer("/message/items").or_else(|| body.get("items")).and_then(Value::as_array)
}

fn page_cursor(body: &Value) -> Option<&str> {
    body.pointer("/message/next-cursor")
        .or_else(|| body.get("next-cursor"))
        .or_else(|| body.get("next_cursor"))
        .and_then(Value::as_str)
}

struct Output {
    raw_dir: PathBuf,
    items_path: PathBuf,
    items: fs::File,
}

impl Output {
    fn open(out_dir: &Path, fresh: bool) -> Result<Self, HarvestError> {
        fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
        let raw_dir = out_dir.join(RAW_DIR);
        let items_path = out_dir.join(ITEMS_FILE);
        if fresh {
            if raw_dir.exists() {
                fs::remove_dir_all(&raw_dir).map_err(io_err(&raw_dir))?;
            }
            for p in [items_path.clone(), out_dir.join(STATE_FILE)] {
                if p.exists() {
                    fs::remove_file(&p).map_err(io_err(&p))?;
                }
            }
        }
        fs::create_dir_all(&raw_dir).map_err(io_err(&raw_dir))?;
        let items = OpenOptions::new().create(true).append(true).open(&items_path).map_err(io_err(&items_path))?;
        Ok(Output { raw_dir, items_path, items })
    }

    fn raw(&self, name: String, body: &[u8]) -> Result<(), HarvestError> {
        let p = self.raw_dir.join(name);
        fs::write(&p, body).map_err(io_err(&p))
    }

    fn item(&mut self, v: &Value) -> Result<(), HarvestError> {
        let mut line = serde_json::to_string(v).expect("json value serializes");
        line.push('\n');
        self.items.write_all(line.as_bytes()).map_err(io_err(&self.items_path))
    }
}

/// Fetches a paged JSON API into `items.ndjson`, one item per line.
///
/// Without `id_list` the endpoint is walked with a Crossref-style deep-paging
/// cursor (`cursor=*`, items under `message.items`, continuation in
/// `message.next-cursor`). With `id_list` each DOI is fetched on its own;
/// missing or failing items are logged and skipped.
pub fn fetch_paged_json(job: &HarvestJob, id_list: Option<&[Doi]>, out_dir: &Path) -> Result<PagedOutcome, HarvestError> {
    job.validate()?;
    let mut out = Output::open(out_dir, job.resume_state.is_none())?;
    let mut client = HttpClient::new(&job.politeness, &job.headers)?;
    let mut outcome = PagedOutcome {
        items: 0,
        misses: Vec::new(),
        pages: 0,
        requests: 0,
        next_cursor: None,
        items_path: out.items_path.clone(),
    };
    match id_list {
        Some(ids) => fetch_ids(job, ids, &mut client, &mut out, &mut outcome)?,
        None => walk_cursor(job, out_dir, &mut client, &mut out, &mut outcome)?,
    }
    out.items.flush().map_err(io_err(&out.items_path))?;
    outcome.requests = client.requests();
    Ok(outcome)
}

fn fetch_ids(
    job: &HarvestJob,
    ids: &[Doi],
    client: &mut HttpClient,
    out: &mut Output,
    outcome: &mut PagedOutcome,
) -> Result<(), HarvestError> {
    for (i, doi) in ids.iter().enumerate() {
        let url = doi_url(&job.endpoint_url, doi)?;
        let resp = match client.get(&url) {
            Ok(r) => r,
            Err(HarvestError::Transport { message, .. }) => {
                log::warn!("{doi}: {message}");
                outcome.misses.push((doi.to_string(), message));
                continue;
            }
            Err(e) => return Err(e),
        };
        match resp.status {
            200 => {}
            401 | 403 => return Err(HarvestError::Auth { status: resp.status, url }),
            s => {
                log::warn!("{doi}: HTTP {s}, skipped");
                outcome.misses.push((doi.to_string(), format!("HTTP {s}")));
                continue;
            }
        }
        out.raw(format!("item-{:04}.json", i + 1), &resp.body)?;
        let body: Value = match serde_json::from_slice(&resp.body) {
            Ok(v) => v,
            Err(e) => {
                log::warn!("{doi}: invalid JSON: {e}");
                outcome.misses.push((doi.to_string(), format!("invalid JSON: {e}")));
                continue;
            }
        };
        out.item(body.get("message").unwrap_or(&body))?;
        outcome.items += 1;
    }
    Ok(())
}

fn walk_cursor(
    job: &HarvestJob,
    out_dir: &Path,
    client: &mut HttpClient,
    out: &mut Output,
    outcome: &mut PagedOutcome,
) -> Result<(), HarvestError> {
    let mut state = match &job.resume_state {
        Some(c) => HarvestState { next_token: Some(c.clone()), ..HarvestState::load(out_dir)?.unwrap_or_default() },
        None => HarvestState { next_token: Some("*".into()), ..Default::default() },
    };
    state.endpoint_url = job.endpoint_url.clone();
    state.complete = false;
    while let Some(cursor) = state.next_token.clone() {
        if job.max_pages.is_some_and(|m| outcome.pages >= m) {
            break;
        }
        let url = cursor_url(&job.endpoint_url, &cursor)?;
        let resp = client.get(&url)?;
        match resp.status {
            200 => {}
            401 | 403 => return Err(HarvestError::Auth { status: resp.status, url }),
            s => return Err(HarvestError::Transport { url, message: format!("HTTP {s}") }),
        }
        state.pages += 1;
        outcome.pages += 1;
        out.raw(format!("page-{:04}.json", state.pages), &resp.body)?;
        let body: Value = serde_json::from_slice(&resp.body).map_err(|e| malformed(&url, e.to_string()))?;
        let items = page_items(&body).ok_or_else(|| malformed(&url, "no items array"))?;
        for item in items {
            out.item(item)?;
        }
        outcome.items += items.len() as u64;
        state.records += items.len() as u64;
        state.next_token = match page_cursor(&body) {
            Some(next) if !items.is_empty() && next != cursor => Some(next.to_string()),
            _ => None,
        };
        state.complete = state.next_token.is_none();
        state.save(out_dir)?;
    }
    outcome.next_cursor = state.next_token.filter(|_| !state.complete);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doi_urls() {
        let doi: Doi = "10.1016/j.heares.2019.01.001".parse().unwrap();
        assert_eq!(doi_url("http://h/works", &doi).unwrap(), "http://h/works/10.1016/j.heares.2019.01.001");
        assert_eq!(doi_url("http://h/works/", &doi).unwrap(), "http://h/works/10.1016/j.heares.2019.01.001");
        assert_eq!(
            doi_url("http://h/v2/{doi}?email=a@b.org", &doi).unwrap(),
            "http://h/v2/10.1016/j.heares.2019.01.001?email=a@b.org"
        );
        assert_eq!(cursor_url("http://h/works?rows=2", "*").unwrap(), "http://h/works?rows=2&cursor=*");
    }
}
