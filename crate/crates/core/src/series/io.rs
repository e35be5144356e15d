//! Map-spec files: `{"n": …, "D": …, "h": [{"alpha": […], "re": …, "im": …}], "g": […]}`.
//!
//! Terms are written in graded-lex order. Any order is accepted on read, but a
//! multi-index may appear at most once per part.

use std::collections::BTreeSet;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PluriharmonicMap, PolySeries};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub alpha: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub n: usize,
    #[serde(rename = "D")]
    pub cap: u32,
    pub h: Vec<TermRecord>,
    pub g: Vec<TermRecord>,
}

impl MapFile {
    pub fn from_map(f: &PluriharmonicMap) -> Self {
        let records = |s: &PolySeries| {
            s.terms()
                .map(|(a, c)| TermRecord {
                    alpha: a.as_slice().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect()
        };
        MapFile {
            n: f.dim(),
            cap: f.cap(),
            h: records(f.h()),
            g: records(f.g()),
        }
    }

    pub fn to_map(&self) -> Result<PluriharmonicMap> {
        if self.n == 0 {
            return Err(Error::MapFile("field `n`: must be at least 1".into()));
        }
        let h = self.part("h", &self.h)?;
        let g = self.part("g", &self.g)?;
        PluriharmonicMap::new(h, g)
    }

    fn part(&self, name: &str, records: &[TermRecord]) -> Result<PolySeries> {
        let mut seen = BTreeSet::new();
        let mut s = PolySeries::zero(self.n, self.cap);
        for (i, t) in records.iter().enumerate() {
            let at = format!("field `{name}[{i}].alpha`");
            if t.alpha.len() != self.n {
                return Err(Error::MapFile(format!(
                    "{at}: has length {}, expected n = {}",
                    t.alpha.len(),
                    self.n
                )));
            }
            let alpha = MultiIndex::new(t.alpha.clone());
            if alpha.degree() > self.cap {
                return Err(Error::MapFile(format!(
                    "{at}: degree {} exceeds D = {}",
                    alpha.degree(),
                    self.cap
                )));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::MapFile(format!(
                    "field `{name}[{i}]`: coefficient is not finite"
                )));
            }
            if !seen.insert(alpha.clone()) {
                return Err(Error::MapFile(format!("{at}: duplicate multi-index {alpha}")));
            }
            s.set(alpha, Complex64::new(t.re, t.im))?;
        }
        Ok(s)
    }
}

/// Parses a map-spec document.
pub fn parse_map(text: &str) -> Result<PluriharmonicMap> {
    let file: MapFile = serde_json::from_str(text).map_err(|e| Error::MapFile(e.to_string()))?;
    file.to_map()
}

/// Renders a map as a pretty-printed map-spec document.
pub fn render_map(f: &PluriharmonicMap) -> String {
    let mut out = serde_json::to_string_pretty(&MapFile::from_map(f)).expect("plain data");
    out.push('\n');
    out
}

pub fn read_map_file(path: &Path) -> Result<PluriharmonicMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MapFile(format!("{}: {e}", path.display())))?;
    parse_map(&text).map_err(|e| match e {
        Error::MapFile(msg) => Error::MapFile(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_map_file(path: &Path, f: &PluriharmonicMap) -> Result<()> {
    std::fs::write(path, render_map(f))
        .map_err(|e| Error::MapFile(format!("{}: {e}", path.display())))
}
