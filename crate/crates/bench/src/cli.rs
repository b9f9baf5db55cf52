//! Command-line flags. Anything given here overrides the config file,
//! which in turn overrides the built-in defaults.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;

use crate::config::{Experiment, ExperimentConfig, SolverKind};

#[derive(Debug, Parser)]
#[command(name = "ipg-bench", version, about = "Inpainting and Heron experiments for the incremental proximal gradient method")]
pub struct Args {
    #[arg(long, value_enum)]
    pub experiment: Option<Experiment>,
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    /// Grayscale PGM (P2 or P5) for the inpainting experiment.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Fraction of pixels removed.
    #[arg(long)]
    pub missing: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub lambda1: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub lambda2: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<f64>,
    /// PGM step sizes; defaults to 1.9/L.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Relative-change tolerance. Omit for a fixed iteration count.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fixed iteration count, or the cap when --eps is given.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Draw an inconsistent right-hand side for Heron.
    #[arg(long)]
    pub inconsistent: bool,
    /// Haar depth; defaults to the deepest the image allows.
    #[arg(long)]
    pub levels: Option<usize>,
    /// `key = value` file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write one per-iteration CSV per grid cell.
    #[arg(long)]
    pub curves: bool,
    #[arg(long)]
    pub tolerance_sweep: bool,
    #[arg(long)]
    pub save_images: bool,
}

impl Args {
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::defaults(self.experiment.unwrap_or(Experiment::Inpaint));
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            cfg.apply_file(&text)?;
        }
        if let Some(e) = self.experiment {
            if e != cfg.experiment {
                cfg = ExperimentConfig::defaults(e);
            }
        }
        macro_rules! scalar {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { cfg.$f = v; })* };
        }
        macro_rules! list {
            ($($f:ident),*) => { $(if !self.$f.is_empty() { cfg.$f = self.$f; })* };
        }
        scalar!(solver, missing, iters, seed, samples, out);
        list!(lambda1, lambda2, a, b, gamma, m, n);
        if self.image.is_some() {
            cfg.image = self.image;
        }
        if self.eps.is_some() {
            cfg.eps = self.eps;
        }
        if self.levels.is_some() {
            cfg.levels = self.levels;
        }
        cfg.consistent &= !self.inconsistent;
        cfg.curves |= self.curves;
        cfg.tolerance_sweep |= self.tolerance_sweep;
        cfg.save_images |= self.save_images;
        Ok(cfg)
    }
}
