//! External entity lookup with a persistent replay cache.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};
use std::time::{Duration, Instant};

use log::debug;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_ENDPOINT: &str = "https://lookup.dbpedia.org/api/search";
const MAX_RESULTS: &str = "5";

/// One entity returned by the lookup service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyCandidate {
    #[serde(rename = "uri")]
    pub external_uri: String,
    #[serde(rename = "label")]
    pub surface: String,
    #[serde(rename = "score")]
    pub service_score: f64,
}

pub trait LookupService: Send + Sync {
    fn lookup(&self, query: &str) -> std::result::Result<Vec<FuzzyCandidate>, String>;
}

/// Query string to recorded response. Reads are concurrent, writes are
/// serialized behind the lock.
#[derive(Debug, Default)]
pub struct LookupCache {
    entries: RwLock<BTreeMap<String, Vec<FuzzyCandidate>>>,
    path: Option<PathBuf>,
}

impl LookupCache {
    pub fn in_memory() -> LookupCache {
        LookupCache::default()
    }

    pub fn from_entries(entries: BTreeMap<String, Vec<FuzzyCandidate>>) -> LookupCache {
        LookupCache {
            entries: RwLock::new(entries),
            path: None,
        }
    }

    /// Opens a cache file; a missing file starts an empty cache bound to
    /// that path.
    pub fn open(path: impl Into<PathBuf>) -> Result<LookupCache> {
        let path = path.into();
        let entries = match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(Error::io(&path, e)),
        };
        Ok(LookupCache {
            entries: RwLock::new(entries),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, query: &str) -> Option<Vec<FuzzyCandidate>> {
        self.entries.read().expect("cache lock").get(query).cloned()
    }

    pub fn insert(&self, query: &str, response: Vec<FuzzyCandidate>) {
        self.entries
            .write()
            .expect("cache lock")
            .insert(query.to_owned(), response);
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> Result<String> {
        let entries = self.entries.read().expect("cache lock");
        Ok(serde_json::to_string_pretty(&*entries)? + "\n")
    }

    pub fn save(&self) -> Result<()> {
        if let Some(path) = &self.path {
            fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }
}

/// Cache in front of an optional live service. Without a service every
/// cache miss is reported as unavailable.
pub struct EntityLookup {
    cache: LookupCache,
    service: Option<Box<dyn LookupService>>,
}

impl EntityLookup {
    pub fn offline(cache: LookupCache) -> EntityLookup {
        EntityLookup {
            cache,
            service: None,
        }
    }

    pub fn with_service(cache: LookupCache, service: Box<dyn LookupService>) -> EntityLookup {
        EntityLookup {
            cache,
            service: Some(service),
        }
    }

    pub fn cache(&self) -> &LookupCache {
        &self.cache
    }

    pub fn query(&self, query: &str) -> Result<Vec<FuzzyCandidate>> {
        if let Some(hit) = self.cache.get(query) {
            return Ok(hit);
        }
        let unavailable = |reason: String| Error::LookupUnavailable {
            query: query.to_owned(),
            reason,
        };
        let service = self
            .service
            .as_ref()
            .ok_or_else(|| unavailable("not in cache and live lookup is disabled".into()))?;
        let response = service.lookup(query).map_err(unavailable)?;
        self.cache.insert(query, response.clone());
        Ok(response)
    }
}

/// Blocking HTTP client for `GET {endpoint}?query=..&maxResults=5`,
/// limited to one request per `min_interval` across all threads.
pub struct HttpLookup {
    endpoint: String,
    agent: ureq::Agent,
    min_interval: Duration,
    last_request: Mutex<Option<Instant>>,
}

impl HttpLookup {
    pub fn new(endpoint: impl Into<String>) -> HttpLookup {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(20)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpLookup {
            endpoint: endpoint.into(),
            agent,
            min_interval: Duration::from_secs(1),
            last_request: Mutex::new(None),
        }
    }

    pub fn with_min_interval(mut self, interval: Duration) -> HttpLookup {
        self.min_interval = interval;
        self
    }

    fn throttle(&self) {
        let mut last = self.last_request.lock().expect("rate limit lock");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < self.min_interval {
                std::thread::sleep(self.min_interval - elapsed);
            }
        }
        *last = Some(Instant::now());
    }
}

impl LookupService for HttpLookup {
    fn lookup(&self, query: &str) -> std::result::Result<Vec<FuzzyCandidate>, String> {
        self.throttle();
        debug!("lookup request for {query:?}");
        let mut response = self
            .agent
            .get(&self.endpoint)
            .query("query", query)
            .query("maxResults", MAX_RESULTS)
            .header("Accept", "application/json")
            .call()
            .map_err(|e| e.to_string())?;
        let status = response.status();
        if !status.is_success() {
            return Err(format!("service answered {status}"));
        }
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| e.to_string())?;
        parse_response(&body)
    }
}

/// Accepts a plain `[{uri,label,score}]` list or the DBpedia Lookup
/// `{"docs":[{"resource":[..],"label":[..],"score":[..]}]}` shape.
pub fn parse_response(body: &str) -> std::result::Result<Vec<FuzzyCandidate>, String> {
    let value: serde_json::Value = serde_json::from_str(body).map_err(|e| e.to_string())?;
    if value.is_array() {
        return serde_json::from_value(value).map_err(|e| e.to_string());
    }
    let docs = value
        .get("docs")
        .and_then(|d| d.as_array())
        .ok_or("unrecognized lookup response")?;
    let first = |doc: &serde_json::Value, key: &str| -> Option<serde_json::Value> {
        match doc.get(key)? {
            serde_json::Value::Array(items) => items.first().cloned(),
            other => Some(other.clone()),
        }
    };
    let tags = regex::Regex::new("</?[^>]+>").expect("tag pattern");
    Ok(docs
        .iter()
        .filter_map(|doc| {
            let uri = first(doc, "resource")?.as_str()?.to_owned();
            let label = first(doc, "label")
                .and_then(|l| l.as_str().map(|s| tags.replace_all(s, "").into_owned()))
                .unwrap_or_default();
            let score = first(doc, "score")
                .and_then(|s| s.as_f64().or_else(|| s.as_str()?.parse().ok()))
                .unwrap_or(0.0);
            (!uri.is_empty()).then_some(FuzzyCandidate {
                external_uri: uri,
                surface: label,
                service_score: score,
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_list() {
        let got = parse_response(r#"[{"uri":"http://d/A","label":"A","score":2.5}]"#).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].external_uri, "http://d/A");
        assert_eq!(got[0].service_score, 2.5);
    }

    #[test]
    fn parses_dbpedia_docs_shape() {
        let body = r#"{"docs":[{"resource":["http://dbpedia.org/resource/Quicksort"],
            "label":["<B>Quicksort</B>"],"score":["12.5"]}]}"#;
        let got = parse_response(body).unwrap();
        assert_eq!(got[0].surface, "Quicksort");
        assert_eq!(got[0].service_score, 12.5);
    }

    #[test]
    fn offline_miss_is_unavailable() {
        let lookup = EntityLookup::offline(LookupCache::in_memory());
        assert!(matches!(
            lookup.query("x"),
            Err(Error::LookupUnavailable { .. })
        ));
    }

    struct Fixed;
    impl LookupService for Fixed {
        fn lookup(&self, q: &str) -> std::result::Result<Vec<FuzzyCandidate>, String> {
            Ok(vec![FuzzyCandidate {
                external_uri: format!("http://d/{q}"),
                surface: q.into(),
                service_score: 1.0,
            }])
        }
    }

    #[test]
    fn service_results_are_written_through() {
        let lookup = EntityLookup::with_service(LookupCache::in_memory(), Box::new(Fixed));
        let got = lookup.query("tree").unwrap();
        assert_eq!(lookup.cache().get("tree"), Some(got));
    }

    #[test]
    fn cache_file_round_trip_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let cache = LookupCache::open(&path).unwrap();
        assert!(cache.is_empty());
        cache.insert("b", vec![]);
        cache.insert("a", Fixed.lookup("a").unwrap());
        cache.save().unwrap();
        let first = fs::read_to_string(&path).unwrap();
        assert!(first.find("\"a\"").unwrap() < first.find("\"b\"").unwrap());
        let reopened = LookupCache::open(&path).unwrap();
        reopened.save().unwrap();
        assert_eq!(first, fs::read_to_string(&path).unwrap());
    }
}
