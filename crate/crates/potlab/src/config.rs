//! Scenario configuration: a TOML file merged with command-line flags, then
//! resolved per scenario so the echoed copy re-runs to the same bundle.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Growth,
    Green,
    Martin,
    Deviation,
    Obstruct,
    Grid,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::Growth => "growth",
            Scenario::Green => "green",
            Scenario::Martin => "martin",
            Scenario::Deviation => "deviation",
            Scenario::Obstruct => "obstruct",
            Scenario::Grid => "grid",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "ModelSection::is_empty")]
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "GreenSection::is_empty")]
    pub green: GreenSection,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
    #[serde(default, skip_serializing_if = "GridSection::is_empty")]
    pub grid: GridSection,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Group model: free:K, abelian:D, heisenberg, lamplighter, bs:1:M,
    /// cyclic:N, finite:PATH, or a product joined by `*`.
    #[arg(long = "model")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    /// Step distribution: srw, lazy:P, or a CSV file of `word,weight`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    /// Skip the transience gate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_recurrent: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct GreenSection {
    /// Truncation order of the Green series.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    /// Word radius of the Green domain; grows to the budget when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<usize>,
    /// Largest number of elements in the Green domain.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Word radius (growth: largest radius; green: elements listed).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Excluded ball radius for the obstruction pipeline.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    /// Scan window (obstruct: word radius; martin: candidate window).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// Deviation window minus excluded radius.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_offset: Option<usize>,
    /// First and last excluded radius of a deviation sweep.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_from: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_to: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Martin direction: the sequence is z, z², …, z^terms.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    /// Green-metric ball radii.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Word radius scanned for Green-metric balls.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_radius: Option<usize>,
    /// Separation required between bound rate and word growth.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_margin: Option<f64>,
    /// Non-constancy tolerance for classification.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// interval:N, rectangle:W,H, tiles:W,H,COUNT, or mask:PATH.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    /// Start point `x,y` (or `x` in one dimension); defaults to the centre.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    /// Monte Carlo paths; 0 skips the sampler.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
}

macro_rules! section_ops {
    ($t:ty { $($f:ident),* }) => {
        impl $t {
            pub fn is_empty(&self) -> bool {
                true $(&& self.$f.is_none())*
            }

            /// Fields set in `other` win.
            pub fn merge(&mut self, other: $t) {
                $(if other.$f.is_some() { self.$f = other.$f; })*
            }
        }
    };
}

section_ops!(ModelSection { spec, measure, allow_recurrent });
section_ops!(GreenSection { trunc, margin, budget });
section_ops!(Params {
    n, n0, window, window_offset, n_from, n_to, x, y, z, terms, radii, search, growth_radius,
    rate_margin, tol
});
section_ops!(GridSection { domain, from, paths });

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.into(),
            message: e.to_string(),
        })?;
        Self::parse(&text).map_err(|message| CliError::Config {
            path: path.into(),
            message,
        })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn merge(&mut self, other: Config) {
        if other.scenario.is_some() {
            self.scenario = other.scenario;
        }
        if other.seed.is_some() {
            self.seed = other.seed;
        }
        self.model.merge(other.model);
        self.green.merge(other.green);
        self.params.merge(other.params);
        self.grid.merge(other.grid);
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario
            .ok_or_else(|| CliError::usage("missing key `scenario` (or a subcommand)"))
    }
}

/// Fetches a required key, naming it in the error.
pub fn required<T: Clone>(value: &Option<T>, key: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| CliError::usage(format!("missing key `{key}`")))
}
