//! Experiment configuration: built-in defaults, then an optional
//! `key = value` file, then command-line flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use penalty_ipg::manifest::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Inpaint,
    Heron,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Ipg,
    Pgm,
    Fista,
}

macro_rules! name_enum {
    ($t:ty { $($v:ident => $s:literal),* }) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$v => $s),* })
            }
        }

        impl FromStr for $t {
            type Err = anyhow::Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($s => Ok(Self::$v),)*
                    other => bail!("unknown {} {other:?}", stringify!($t)),
                }
            }
        }
    };
}

name_enum!(Experiment { Inpaint => "inpaint", Heron => "heron" });
name_enum!(SolverKind { Ipg => "ipg", Pgm => "pgm", Fista => "fista" });

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub solver: SolverKind,
    pub image: Option<PathBuf>,
    pub missing: f64,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// PGM step; `None` means `1.9/L_h`.
    pub gamma: Vec<f64>,
    /// `Some` selects relative-change stopping, `None` a fixed iteration count.
    pub eps: Option<f64>,
    /// Fixed iteration count, or the iteration cap in relative-change mode.
    pub iters: usize,
    pub seed: u64,
    pub samples: usize,
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub consistent: bool,
    pub levels: Option<usize>,
    pub out: PathBuf,
    pub curves: bool,
    pub tolerance_sweep: bool,
    pub save_images: bool,
}

impl ExperimentConfig {
    /// Protocol defaults: inpainting runs 20 fixed iterations on one mask,
    /// Heron runs to `ε = 10⁻⁶` over 10 samples.
    pub fn defaults(experiment: Experiment) -> Self {
        let inpaint = experiment == Experiment::Inpaint;
        Self {
            experiment,
            solver: SolverKind::Ipg,
            image: None,
            missing: 0.6,
            lambda1: vec![1.0],
            lambda2: vec![1e-4],
            a: vec![if inpaint { 1.1 } else { 0.6 }],
            b: vec![if inpaint { 1.8 } else { 1.9 }],
            gamma: Vec::new(),
            eps: if inpaint { None } else { Some(1e-6) },
            iters: if inpaint { 20 } else { 1_000_000 },
            seed: 1,
            samples: if inpaint { 1 } else { 10 },
            m: vec![5],
            n: vec![2],
            consistent: true,
            levels: None,
            out: PathBuf::from("results"),
            curves: false,
            tolerance_sweep: false,
            save_images: false,
        }
    }

    /// Applies one `key = value` setting. Keys match the long flag names;
    /// `-` and `_` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let ctx = || format!("invalid value {value:?} for {key}");
        match key.as_str() {
            "experiment" => self.experiment = value.parse().with_context(ctx)?,
            "solver" => self.solver = value.parse().with_context(ctx)?,
            "image" => self.image = Some(PathBuf::from(value.trim())),
            "missing" => self.missing = parse(value).with_context(ctx)?,
            "lambda1" => self.lambda1 = parse_list(value).with_context(ctx)?,
            "lambda2" => self.lambda2 = parse_list(value).with_context(ctx)?,
            "a" => self.a = parse_list(value).with_context(ctx)?,
            "b" => self.b = parse_list(value).with_context(ctx)?,
            "gamma" => self.gamma = parse_list(value).with_context(ctx)?,
            "eps" => {
                self.eps = match value.trim() {
                    "none" | "" => None,
                    v => Some(parse(v).with_context(ctx)?),
                }
            }
            "iters" => self.iters = parse(value).with_context(ctx)?,
            "seed" => self.seed = parse(value).with_context(ctx)?,
            "samples" => self.samples = parse(value).with_context(ctx)?,
            "m" => self.m = parse_list(value).with_context(ctx)?,
            "n" => self.n = parse_list(value).with_context(ctx)?,
            "consistent" => self.consistent = parse(value).with_context(ctx)?,
            "inconsistent" => self.consistent = !parse::<bool>(value).with_context(ctx)?,
            "levels" => self.levels = Some(parse(value).with_context(ctx)?),
            "out" => self.out = PathBuf::from(value.trim()),
            "curves" => self.curves = parse(value).with_context(ctx)?,
            "tolerance-sweep" => self.tolerance_sweep = parse(value).with_context(ctx)?,
            "save-images" => self.save_images = parse(value).with_context(ctx)?,
            other => bail!("unknown configuration key {other:?}"),
        }
        Ok(())
    }

    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        let m = Manifest::parse(text)?;
        // the experiment key selects defaults, so it goes first
        if let Some(e) = m.get("experiment") {
            let experiment: Experiment = e.parse()?;
            if experiment != self.experiment {
                *self = Self::defaults(experiment);
            }
        }
        for (k, v) in m.iter().filter(|(k, _)| *k != "experiment") {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let grids: [(&str, usize); 4] = [
            ("lambda1", self.lambda1.len()),
            ("lambda2", self.lambda2.len()),
            ("a", self.a.len()),
            ("b", self.b.len()),
        ];
        for (name, len) in grids {
            if len == 0 {
                bail!("parameter grid {name} is empty");
            }
        }
        if self.experiment == Experiment::Heron && (self.m.is_empty() || self.n.is_empty()) {
            bail!("Heron grids m and n must be non-empty");
        }
        if self.experiment == Experiment::Heron && self.solver != SolverKind::Ipg {
            bail!("the Heron experiment only supports the ipg solver");
        }
        if let Some(eps) = self.eps {
            if !(eps > 0.0) {
                bail!("eps must be positive, got {eps}");
            }
        }
        if self.samples == 0 {
            bail!("samples must be at least 1");
        }
        if self.experiment == Experiment::Inpaint && self.image.is_none() {
            bail!("the inpaint experiment needs --image");
        }
        Ok(())
    }

    pub fn to_manifest(&self) -> Manifest {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let ulist = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let mut m = Manifest::new();
        m.set("experiment", self.experiment)
            .set("solver", self.solver)
            .set("missing", self.missing)
            .set("lambda1", list(&self.lambda1))
            .set("lambda2", list(&self.lambda2))
            .set("a", list(&self.a))
            .set("b", list(&self.b))
            .set("gamma", list(&self.gamma))
            .set("eps", self.eps.map_or("none".to_string(), |e| e.to_string()))
            .set("iters", self.iters)
            .set("seed", self.seed)
            .set("samples", self.samples)
            .set("m", ulist(&self.m))
            .set("n", ulist(&self.n))
            .set("consistent", self.consistent)
            .set("curves", self.curves)
            .set("tolerance-sweep", self.tolerance_sweep)
            .set("save-images", self.save_images);
        if let Some(img) = &self.image {
            m.set("image", img.display());
        }
        if let Some(l) = self.levels {
            m.set("levels", l);
        }
        m
    }
}

fn parse<T: FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| anyhow::anyhow!("cannot parse {s:?}"))
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse).collect()
}
