//! TOML configuration for projection specs.
//!
//! ```toml
//! k = 1
//! probe_depth = 128
//! search_bound = 65536
//! power_bound = "2"
//!
//! [[generator]]
//! image = [[0, "1/2", "0"], [1, "1/2", "0"]]
//! set = "powers:2"
//! ```
//!
//! Numbers may be written as TOML numbers or strings; strings accept `p/q`
//! and stay exact.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::scalar::{parse_real, Scalar};
use crate::semigroup::ProjectionSpec;
use crate::seq::FinSeq;
use crate::sparse::{SparseFamily, SparseSet};

pub const DEFAULT_CONFIG: &str = r#"
k = 1
probe_depth = 128
search_bound = 65536
power_bound = "2"

[[generator]]
image = [[0, "1/2", "0"], [1, "1/2", "0"]]
set = "powers:2"
"#;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn scalar(&self) -> Result<Scalar> {
        match self {
            Num::Int(n) => Ok(Scalar::int(*n)),
            Num::Float(x) => Ok(Scalar::real(*x)),
            Num::Text(s) => parse_real(s),
        }
    }

    fn float(&self) -> Result<f64> {
        Ok(self.scalar()?.to_complex().re)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorConfig {
    image: Vec<(i64, Num, Num)>,
    set: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecConfig {
    k: usize,
    #[serde(default = "default_depth")]
    probe_depth: u32,
    #[serde(default = "default_bound")]
    search_bound: u64,
    #[serde(default)]
    power_bound: Option<Num>,
    generator: Vec<GeneratorConfig>,
}

fn default_depth() -> u32 {
    128
}

fn default_bound() -> u64 {
    1 << 16
}

fn image_entry(n: i64, re: &Num, im: &Num) -> Result<(i64, Scalar)> {
    let re = re.scalar()?;
    let im = im.scalar()?;
    let value = if im.is_exact_zero() {
        re
    } else {
        Scalar::complex(re.to_complex().re, im.to_complex().re)
    };
    Ok((n, value))
}

pub fn parse_spec(text: &str) -> Result<ProjectionSpec> {
    let cfg: SpecConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if cfg.generator.len() != cfg.k {
        return Err(Error::DimensionMismatch {
            expected: cfg.k,
            got: cfg.generator.len(),
        });
    }
    let mut images = Vec::new();
    let mut sets = Vec::new();
    for g in &cfg.generator {
        let entries = g
            .image
            .iter()
            .map(|(n, re, im)| image_entry(*n, re, im))
            .collect::<Result<Vec<_>>>()?;
        images.push(FinSeq::from_entries(entries)?);
        sets.push(SparseSet::parse(&g.set)?);
    }
    let bound = match &cfg.power_bound {
        Some(b) => b.float()?,
        None => 2.0,
    };
    Ok(ProjectionSpec::new(images, SparseFamily::new(sets))?
        .with_probe(cfg.probe_depth, bound)
        .with_search_bound(cfg.search_bound))
}

/// Loads a spec from a file; the name `default` selects the built-in spec.
pub fn load_spec(path: &str) -> Result<ProjectionSpec> {
    if path == "default" {
        return parse_spec(DEFAULT_CONFIG);
    }
    let p = Path::new(path);
    if !p.exists() {
        return Err(Error::Config(format!("config file `{path}` not found")));
    }
    parse_spec(&std::fs::read_to_string(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::binomial_element;

    #[test]
    fn default_spec() {
        let spec = load_spec("default").unwrap();
        assert_eq!(spec.k(), 1);
        assert_eq!(spec.images[0], binomial_element());
        assert_eq!(spec.family.sets[0].to_string(), "powers:2");
        assert_eq!(spec.power_bound, 2.0);
    }

    #[test]
    fn two_generators() {
        let text = r#"
k = 2
search_bound = 4096
[[generator]]
image = [[0, 0.5, 0]]
set = "powers:2/residue:0/mod:2"
[[generator]]
image = [[-1, "1/2", "0"], [1, "1/2", 0]]
set = "powers:2/residue:1/mod:2"
"#;
        let spec = parse_spec(text).unwrap();
        assert_eq!(spec.k(), 2);
        assert!(!spec.images[0].is_exact());
        assert!(spec.images[1].is_exact());
        assert_eq!(spec.search_bound, 4096);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_spec("k = 2\n[[generator]]\nimage = []\nset = \"factorials\""),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(parse_spec("k = "), Err(Error::Config(_))));
        assert!(matches!(load_spec("/nonexistent.toml"), Err(Error::Config(_))));
        assert!(parse_spec("k = 1\n[[generator]]\nimage = []\nset = \"cubes\"").is_err());
    }
}
