use honkit_core::{CompareConfig, DegreeDirection, PageRankOptions, ReportOptions};
use serde::Serialize;

use crate::format::Format;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
    Total,
}

impl From<Direction> for DegreeDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::In => DegreeDirection::In,
            Direction::Out => DegreeDirection::Out,
            Direction::Total => DegreeDirection::Total,
        }
    }
}

/// Effective settings of one run. Every report embeds a copy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub max_order: usize,
    pub epsilon: f64,
    pub damping: f64,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
    pub kl_epsilon: f64,
    pub degree_direction: Direction,
    pub split_fraction: f64,
    pub seed: u64,
    pub exact_sp_threshold: usize,
    pub sp_sample_sources: usize,
    pub input_format: Format,
    /// `None` means the command's natural format.
    pub format: Option<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_order: 5,
            epsilon: 0.05,
            damping: 0.85,
            pagerank_tol: 1e-12,
            pagerank_max_iter: 1000,
            kl_epsilon: 1e-10,
            degree_direction: Direction::Out,
            split_fraction: 0.2,
            seed: 42,
            exact_sp_threshold: 20_000,
            sp_sample_sources: 1000,
            input_format: Format::Lines,
            format: None,
        }
    }
}

fn open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in (0, 1), got {x}")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_order == 0 {
            return Err(Error::Config("max-order must be at least 1".into()));
        }
        open_unit("epsilon", self.epsilon)?;
        open_unit("damping", self.damping)?;
        open_unit("split", self.split_fraction)?;
        if self.pagerank_tol.is_nan() || self.pagerank_tol <= 0.0 {
            return Err(Error::Config("pagerank-tol must be positive".into()));
        }
        if self.kl_epsilon.is_nan() || self.kl_epsilon <= 0.0 {
            return Err(Error::Config("kl-epsilon must be positive".into()));
        }
        if self.pagerank_max_iter == 0 || self.sp_sample_sources == 0 {
            return Err(Error::Config(
                "iteration and sample counts must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn report_options(&self) -> ReportOptions {
        ReportOptions {
            exact_threshold: self.exact_sp_threshold,
            sample_sources: self.sp_sample_sources,
            seed: self.seed,
        }
    }

    pub fn pagerank_options(&self) -> PageRankOptions {
        PageRankOptions {
            damping: self.damping,
            tol: self.pagerank_tol,
            max_iter: self.pagerank_max_iter,
        }
    }

    pub fn compare_config(&self) -> CompareConfig {
        CompareConfig {
            max_order: self.max_order,
            kl_epsilon: self.kl_epsilon,
            direction: self.degree_direction.into(),
            pagerank: self.pagerank_options(),
            report: self.report_options(),
        }
    }

    /// Format used when none was requested.
    pub fn format_or(&self, natural: OutputFormat) -> OutputFormat {
        self.format.unwrap_or(natural)
    }

    /// Copy with the output format fixed, as embedded in reports.
    pub fn resolve(&self, natural: OutputFormat) -> RunConfig {
        RunConfig {
            format: Some(self.format_or(natural)),
            ..self.clone()
        }
    }
}
