//! Pipeline settings read from `key = value` files.

use std::path::Path;
use std::str::FromStr;

use crate::candidates::NGramConfig;
use crate::layout::LayoutConfig;
use crate::matcher::MatcherConfig;
use crate::{Error, Result};

pub const DEFAULT_CONFIG: &str = include_str!("../data/default.conf");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub ngram: NGramConfig,
    pub matcher: MatcherConfig,
    pub layout: LayoutConfig,
}

fn value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::Config(format!("line {line}: bad value {raw:?} for {key}")))
}

impl Config {
    /// Starts from the defaults and applies each assignment in order.
    pub fn parse(src: &str) -> Result<Config> {
        let mut cfg = Config::default();
        for (i, line) in src.lines().enumerate() {
            let n = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {n}: expected key = value")))?;
            let (key, raw) = (key.trim(), raw.trim());
            let l = &mut cfg.layout;
            match key {
                "ngram.min_count" => cfg.ngram.min_count = value(key, raw, n)?,
                "ngram.pmi_threshold" => cfg.ngram.pmi_threshold = value(key, raw, n)?,
                "matcher.threshold" => cfg.matcher.threshold = value(key, raw, n)?,
                "matcher.fuzzy" => cfg.matcher.fuzzy_enabled = value(key, raw, n)?,
                "matcher.endpoint" => cfg.matcher.service_endpoint = raw.to_owned(),
                "layout.margin" => l.margin = value(key, raw, n)?,
                "layout.canvas_size" => l.canvas_size = value(key, raw, n)?,
                "layout.leaf_area_fraction" => l.leaf_area_fraction = value(key, raw, n)?,
                "layout.luminance_outer" => l.luminance_outer = value(key, raw, n)?,
                "layout.luminance_step" => l.luminance_step = value(key, raw, n)?,
                "layout.luminance_floor" => l.luminance_floor = value(key, raw, n)?,
                "layout.label_radius" => l.label_radius = value(key, raw, n)?,
                "layout.cloud_radius" => l.cloud_radius = value(key, raw, n)?,
                "layout.palette_lightness" => l.palette_lightness = value(key, raw, n)?,
                "layout.palette_chroma" => l.palette_chroma = value(key, raw, n)?,
                "layout.cloud_terms" => l.cloud_terms = value(key, raw, n)?,
                "layout.cloud_min_count" => l.cloud_min_count = value(key, raw, n)?,
                "layout.contour_tolerance" => l.contour_tolerance = value(key, raw, n)?,
                _ => return Err(Error::Config(format!("line {n}: unknown key {key:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&src)
    }

    pub fn validate(&self) -> Result<()> {
        self.matcher.validate()?;
        let l = &self.layout;
        if l.margin < 0.0 || l.canvas_size <= 0.0 || l.contour_tolerance <= 0.0 {
            return Err(Error::Config("layout sizes must be positive".into()));
        }
        if !(l.leaf_area_fraction > 0.0 && l.leaf_area_fraction <= 1.0) {
            return Err(Error::Config(
                "layout.leaf_area_fraction must be in (0, 1]".into(),
            ));
        }
        if l.luminance_floor > l.luminance_outer || l.luminance_step <= 0.0 {
            return Err(Error::Config("luminance ramp must decrease".into()));
        }
        if l.label_radius > l.cloud_radius {
            return Err(Error::Config(
                "layout.label_radius exceeds layout.cloud_radius".into(),
            ));
        }
        if self.ngram.min_count == 0 {
            return Err(Error::Config("ngram.min_count must be at least 1".into()));
        }
        Ok(())
    }
}
