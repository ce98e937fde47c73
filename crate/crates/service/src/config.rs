//! Optional service configuration file, located through `ONTOINDEX_CONFIG`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const CONFIG_ENV: &str = "ONTOINDEX_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub ontology: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub relevance_limit: Option<f64>,
    pub listen: Option<String>,
    #[serde(default)]
    pub strip_html: bool,
}

impl Config {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("reading config {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    /// Config named by the environment, or the empty config.
    pub fn from_env() -> anyhow::Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) => Self::load(Path::new(&p)),
            None => Ok(Config::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let c = Config::from_toml(
            "ontology = \"o.json\"\ncorpus = \"pages\"\nrelevance_limit = 2.5\nlisten = \"0.0.0.0:9000\"\n",
        )
        .unwrap();
        assert_eq!(c.ontology.as_deref(), Some(Path::new("o.json")));
        assert_eq!(c.relevance_limit, Some(2.5));
        assert_eq!(c.listen.as_deref(), Some("0.0.0.0:9000"));
        assert!(Config::from_toml("bogus = 1").is_err());
    }
}
