use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use penalty_ipg::baselines::{run_baseline, BaselineMethod};
use penalty_ipg::haar::Image;
use penalty_ipg::netpbm::{read_pgm, write_pgm};
use penalty_ipg::problems::{build_heron, build_inpainting, InpaintingInstance};
use penalty_ipg::solver::{solve_with, validate_hypotheses, SolveOptions, SolveReport, StepSchedule, StoppingRule};
use penalty_ipg::Error as CoreError;

use crate::config::{Experiment, ExperimentConfig, SolverKind};
use crate::table::{exact, fixed, ResultTable};

/// Tolerances visited by the tolerance sweep.
pub const SWEEP_TOLERANCES: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
/// Iteration cap for sweep runs when the config has no tolerance of its own.
pub const SWEEP_MAX_ITERS: usize = 10_000;

/// Everything an experiment produced. `results` and `sweep` are
/// deterministic; wall-clock times live only in `timings`.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: ResultTable,
    pub timings: ResultTable,
    pub sweep: Option<ResultTable>,
    pub curves: Vec<(String, SolveReport, Option<&'static str>)>,
    pub images: Vec<(String, Image)>,
    /// Number of solver runs actually started.
    pub invocations: usize,
    /// False if any run stopped at the iteration cap without converging.
    pub all_completed: bool,
}

fn stopping(cfg: &ExperimentConfig) -> Result<StoppingRule> {
    Ok(match cfg.eps {
        Some(eps) => StoppingRule::relative_change(eps, cfg.iters)?,
        None => StoppingRule::fixed_iterations(cfg.iters),
    })
}

fn label(parts: &[(&str, String)]) -> String {
    parts
        .iter()
        .map(|(k, v)| format!("{k}-{v}"))
        .collect::<Vec<_>>()
        .join("_")
}

/// One inpainting grid cell: solver-specific parameters for a single mask.
#[derive(Debug, Clone, Copy)]
enum InpaintCell {
    Ipg { l1: f64, l2: f64, a: f64, b: f64 },
    Pgm { l1: f64, l2: f64, gamma: Option<f64> },
    Fista { l1: f64, l2: f64 },
}

impl InpaintCell {
    fn lambdas(&self) -> (f64, f64) {
        match *self {
            Self::Ipg { l1, l2, .. } | Self::Pgm { l1, l2, .. } | Self::Fista { l1, l2 } => (l1, l2),
        }
    }

    fn params(&self) -> Vec<(&'static str, String)> {
        let (l1, l2) = self.lambdas();
        let mut p = vec![("lambda1", l1.to_string()), ("lambda2", l2.to_string())];
        match *self {
            Self::Ipg { a, b, .. } => {
                p.push(("a", a.to_string()));
                p.push(("b", b.to_string()));
            }
            Self::Pgm { gamma, .. } => p.push(("gamma", gamma.map_or("default".into(), |g| g.to_string()))),
            Self::Fista { .. } => {}
        }
        p
    }

    fn run(&self, inst: &InpaintingInstance, stop: &StoppingRule) -> Result<SolveReport> {
        let metric = inst.isnr_metric();
        let report = match *self {
            Self::Ipg { a, b, .. } => solve_with(
                &inst.problem()?,
                &StepSchedule::new(a, b)?,
                stop,
                &SolveOptions {
                    allow_hypothesis_violation: false,
                    metric: Some(metric),
                },
            )?,
            Self::Pgm { gamma, .. } => {
                let comp = inst.composite()?;
                let method = match gamma {
                    Some(gamma) => BaselineMethod::Pgm {
                        gamma,
                        allow_out_of_range: false,
                    },
                    None => BaselineMethod::pgm_default(&comp),
                };
                run_baseline(&comp, method, &inst.observed, stop, Some(&metric))?
            }
            Self::Fista { .. } => {
                run_baseline(&inst.composite()?, BaselineMethod::Fista, &inst.observed, stop, Some(&metric))?
            }
        };
        Ok(report)
    }
}

fn inpaint_cells(cfg: &ExperimentConfig) -> Vec<InpaintCell> {
    let mut cells = Vec::new();
    for &l1 in &cfg.lambda1 {
        for &l2 in &cfg.lambda2 {
            match cfg.solver {
                SolverKind::Ipg => {
                    for &b in &cfg.b {
                        for &a in &cfg.a {
                            cells.push(InpaintCell::Ipg { l1, l2, a, b });
                        }
                    }
                }
                SolverKind::Pgm if cfg.gamma.is_empty() => cells.push(InpaintCell::Pgm { l1, l2, gamma: None }),
                SolverKind::Pgm => {
                    for &g in &cfg.gamma {
                        cells.push(InpaintCell::Pgm {
                            l1,
                            l2,
                            gamma: Some(g),
                        });
                    }
                }
                SolverKind::Fista => cells.push(InpaintCell::Fista { l1, l2 }),
            }
        }
    }
    cells
}

/// ISNR table over the configured grid. Cells whose schedule fails the
/// step-size hypotheses are left blank and never run.
pub fn run_isnr_grid(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.experiment != Experiment::Inpaint {
        bail!("run_isnr_grid needs experiment = inpaint");
    }
    let path = cfg.image.as_ref().context("the inpaint experiment needs --image")?;
    let clean = read_pgm(path).with_context(|| format!("reading image {}", path.display()))?;
    let stop = stopping(cfg)?;
    let cells = inpaint_cells(cfg);

    let param_names: Vec<&str> = cells[0].params().iter().map(|(k, _)| *k).collect();
    let mut results = ResultTable::new(param_names.iter().copied().chain(["isnr_db", "iterations", "completed"]));
    let mut timings = ResultTable::new(param_names.iter().copied().chain(["time_mean_s"]));
    let mut out = Outcome {
        all_completed: true,
        ..Default::default()
    };

    for cell in &cells {
        let params = cell.params();
        let mut row: Vec<Option<String>> = params.iter().map(|(_, v)| Some(v.clone())).collect();
        let mut trow = row.clone();
        let (l1, l2) = cell.lambdas();

        if let InpaintCell::Ipg { a, b, .. } = *cell {
            let probe = build_inpainting(&clean, cfg.missing, l1, l2, cfg.seed, cfg.levels)?;
            let report = validate_hypotheses(&StepSchedule::new(a, b)?, &probe.problem()?.penalty);
            if !report.passed() {
                info!("skipping a = {a}, b = {b}: {}", report.to_string().trim());
                row.extend([None, None, None]);
                trow.push(None);
                results.push(row);
                timings.push(trow);
                continue;
            }
        }

        let (mut isnr, mut iters, mut secs, mut completed) = (0.0, 0.0, 0.0, true);
        for s in 0..cfg.samples {
            let inst = build_inpainting(&clean, cfg.missing, l1, l2, cfg.seed + s as u64, cfg.levels)?;
            out.invocations += 1;
            let report = cell.run(&inst, &stop)?;
            isnr += inst.isnr(&report.x);
            iters += report.iterations as f64;
            secs += report.elapsed.as_secs_f64();
            completed &= report.completed();
            if s == 0 {
                let name = format!("{}_{}", cfg.solver, label(&params));
                if cfg.save_images {
                    if out.images.is_empty() {
                        out.images.push(("noisy".into(), inst.noisy_image()));
                    }
                    out.images.push((name.clone(), inst.to_image(&report.x)?));
                }
                if cfg.curves {
                    out.curves.push((name, report, Some("isnr_db")));
                }
            }
        }
        let k = cfg.samples as f64;
        out.all_completed &= completed;
        row.extend([fixed(isnr / k, 4), exact(iters / k), Some(completed.to_string())]);
        trow.push(fixed(secs / k, 4));
        results.push(row);
        timings.push(trow);
    }

    if cfg.tolerance_sweep {
        let cell = cells
            .iter()
            .find(|c| match **c {
                InpaintCell::Ipg { a, b, .. } => a * b < 2.0,
                _ => true,
            })
            .context("no runnable cell for the tolerance sweep")?;
        let (l1, l2) = cell.lambdas();
        let inst = build_inpainting(&clean, cfg.missing, l1, l2, cfg.seed, cfg.levels)?;
        let mut sweep = ResultTable::new(["eps", "iterations", "converged", "isnr_db"]);
        for eps in SWEEP_TOLERANCES {
            out.invocations += 1;
            let report = cell.run(&inst, &StoppingRule::relative_change(eps, sweep_cap(cfg))?)?;
            out.all_completed &= report.completed();
            sweep.push(vec![
                exact(eps),
                Some(report.iterations.to_string()),
                Some(report.converged().to_string()),
                fixed(inst.isnr(&report.x), 4),
            ]);
        }
        out.sweep = Some(sweep);
    }

    out.results = results;
    out.timings = timings;
    Ok(out)
}

fn sweep_cap(cfg: &ExperimentConfig) -> usize {
    if cfg.eps.is_some() {
        cfg.iters
    } else {
        SWEEP_MAX_ITERS
    }
}

/// Averages over `samples` seeded Heron instances for every `(m, n, a, b)`.
pub fn run_heron_sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    if cfg.experiment != Experiment::Heron {
        bail!("run_heron_sweep needs experiment = heron");
    }
    let stop = stopping(cfg)?;
    let keys = ["m", "n", "a", "b"];
    let mut results = ResultTable::new(keys.into_iter().chain(["norm_a_mean", "iters_mean", "converged", "samples"]));
    let mut timings = ResultTable::new(keys.into_iter().chain(["time_mean_s"]));
    let mut out = Outcome {
        all_completed: true,
        ..Default::default()
    };

    for &m in &cfg.m {
        for &n in &cfg.n {
            let instances = (0..cfg.samples)
                .map(|s| build_heron(m, n, cfg.consistent, cfg.seed + s as u64))
                .collect::<Result<Vec<_>, CoreError>>()?;
            for &b in &cfg.b {
                for &a in &cfg.a {
                    let mut row = vec![Some(m.to_string()), Some(n.to_string()), exact(a), exact(b)];
                    let mut trow = row.clone();
                    let probe = &instances[0];
                    let check = validate_hypotheses(&probe.schedule(a, b)?, &probe.problem()?.penalty);
                    if !check.passed() {
                        info!("skipping a = {a}, b = {b}: {}", check.to_string().trim());
                        row.extend([None, None, None, None]);
                        trow.push(None);
                        results.push(row);
                        timings.push(trow);
                        continue;
                    }
                    let (mut norm, mut iters, mut secs, mut converged) = (0.0, 0.0, 0.0, 0usize);
                    for (s, inst) in instances.iter().enumerate() {
                        out.invocations += 1;
                        let report = solve_with(
                            &inst.problem()?,
                            &inst.schedule(a, b)?,
                            &stop,
                            &SolveOptions::default(),
                        )?;
                        if !report.completed() {
                            warn!("m = {m}, n = {n}, seed {}: hit the iteration cap", inst.seed);
                            out.all_completed = false;
                        }
                        converged += report.converged() as usize;
                        norm += inst.norm_a;
                        iters += report.iterations as f64;
                        secs += report.elapsed.as_secs_f64();
                        if s == 0 && cfg.curves {
                            out.curves.push((format!("heron_m-{m}_n-{n}_a-{a}_b-{b}"), report, None));
                        }
                    }
                    let k = cfg.samples as f64;
                    row.extend([
                        fixed(norm / k, 4),
                        fixed(iters / k, 1),
                        Some(converged.to_string()),
                        Some(cfg.samples.to_string()),
                    ]);
                    trow.push(fixed(secs / k, 4));
                    results.push(row);
                    timings.push(trow);
                }
            }
        }
    }

    if cfg.tolerance_sweep {
        let (m, n) = (cfg.m[0], cfg.n[0]);
        let (a, b) = cfg
            .a
            .iter()
            .flat_map(|&a| cfg.b.iter().map(move |&b| (a, b)))
            .find(|(a, b)| a * b < 2.0)
            .context("no runnable cell for the tolerance sweep")?;
        let inst = build_heron(m, n, cfg.consistent, cfg.seed)?;
        let mut sweep = ResultTable::new(["eps", "iterations", "converged", "final_g"]);
        for eps in SWEEP_TOLERANCES {
            out.invocations += 1;
            let report = solve_with(
                &inst.problem()?,
                &inst.schedule(a, b)?,
                &StoppingRule::relative_change(eps, sweep_cap(cfg))?,
                &SolveOptions::default(),
            )?;
            out.all_completed &= report.completed();
            let g = report.final_record().map_or(f64::NAN, |r| r.penalty);
            sweep.push(vec![
                exact(eps),
                Some(report.iterations.to_string()),
                Some(report.converged().to_string()),
                Some(format!("{g:e}")),
            ]);
        }
        out.sweep = Some(sweep);
    }

    out.results = results;
    out.timings = timings;
    Ok(out)
}

/// Per-iteration CSV: `iteration,<metric or g>,objective`, one row per
/// completed iteration.
pub fn emit_curves(report: &SolveReport, path: &Path, metric: Option<&str>) -> Result<()> {
    if report.trace.len() < 2 {
        return Err(CoreError::InsufficientData {
            needed: 2,
            got: report.trace.len(),
        }
        .into());
    }
    let mut out = format!("iteration,{},objective\n", metric.unwrap_or("g"));
    for rec in &report.trace[1..] {
        let value = match metric {
            Some(_) => rec.metric.unwrap_or(f64::NAN),
            None => rec.penalty,
        };
        out.push_str(&format!("{},{value:e},{:e}\n", rec.k - 1, rec.objective));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Runs the configured experiment and writes `results.csv`, `timings.csv`,
/// `manifest.txt` and the optional sweep, curve and image files under
/// `cfg.out`.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let out = match cfg.experiment {
        Experiment::Inpaint => run_isnr_grid(cfg)?,
        Experiment::Heron => run_heron_sweep(cfg)?,
    };
    let dir = &cfg.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    out.results.write_csv(&dir.join("results.csv"))?;
    out.timings.write_csv(&dir.join("timings.csv"))?;
    if let Some(sweep) = &out.sweep {
        sweep.write_csv(&dir.join("tolerance_sweep.csv"))?;
    }
    let manifest = format!("# ipg-bench {}\n{}", env!("CARGO_PKG_VERSION"), cfg.to_manifest());
    fs::write(dir.join("manifest.txt"), manifest).context("writing manifest")?;
    if !out.curves.is_empty() {
        let curves = subdir(dir, "curves")?;
        for (name, report, metric) in &out.curves {
            emit_curves(report, &curves.join(format!("{name}.csv")), *metric)?;
        }
    }
    if !out.images.is_empty() {
        let images = subdir(dir, "images")?;
        for (name, img) in &out.images {
            write_pgm(images.join(format!("{name}.pgm")), img)?;
        }
    }
    Ok(out)
}

fn subdir(dir: &Path, name: &str) -> Result<PathBuf> {
    let p = dir.join(name);
    fs::create_dir_all(&p).with_context(|| format!("creating {}", p.display()))?;
    Ok(p)
}
