//! Command pipeline: load a channel, run the symmetry screens and bound
//! constructions, and emit the report files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::{self, BoundsConfig, BoundsReport};
use crate::channel::{load_channel_with, TwoWayChannel};
use crate::error::{Error, Result};
use crate::frontier::Frontier;
use crate::svg;
use crate::symmetry::{self, SymmetryConfig, SymmetryReport};

/// Settings for one CLI invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub channel_path: PathBuf,
    pub delta: f64,
    pub refine_tol: f64,
    pub sym_tol: f64,
    pub with_grid_outer: bool,
    pub grid_outer_delta: f64,
    pub out_dir: PathBuf,
    pub gamma: Option<f64>,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
}

impl RunConfig {
    pub fn new(channel_path: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            channel_path: channel_path.into(),
            delta: bounds::DEFAULT_DELTA,
            refine_tol: bounds::DEFAULT_REFINE_TOL,
            sym_tol: symmetry::DEFAULT_SYM_TOL,
            with_grid_outer: false,
            grid_outer_delta: 0.1,
            out_dir: out_dir.into(),
            gamma: None,
            threads: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.refine_tol > 0.0 && self.sym_tol > 0.0) {
            return Err(Error::Validation(
                "delta and tolerances must be positive".into(),
            ));
        }
        if let Some(g) = self.gamma {
            if !(0.0..=0.8).contains(&g) {
                return Err(Error::Validation(format!("gamma = {g} outside [0, 0.8]")));
            }
        }
        Ok(())
    }

    fn bounds_config(&self) -> BoundsConfig {
        BoundsConfig {
            delta: self.delta,
            refine_tol: self.refine_tol,
            eval_cap: bounds::DEFAULT_EVAL_CAP,
            with_grid_outer: self.with_grid_outer,
            grid_outer_delta: self.grid_outer_delta,
        }
    }

    fn symmetry_config(&self) -> SymmetryConfig {
        SymmetryConfig {
            sym_tol: self.sym_tol,
            delta: self.delta,
            refine_tol: self.refine_tol,
            b2_delta: self.grid_outer_delta,
            eval_cap: bounds::DEFAULT_EVAL_CAP,
        }
    }
}

/// Process exit code for an error, per the pipeline contract: 1 for
/// parse/validation problems, 2 for evaluation-cap overruns, 3 for i/o.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::EvalCapExceeded { .. } => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}

fn load_from_config(cfg: &RunConfig, gamma: Option<f64>) -> Result<TwoWayChannel> {
    let text = fs::read_to_string(&cfg.channel_path).map_err(|e| {
        Error::Parse(format!(
            "cannot read channel file {}: {e}",
            cfg.channel_path.display()
        ))
    })?;
    load_channel_with(&text, gamma)
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if threads > 0 {
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| Error::Validation(format!("cannot build thread pool: {e}")))
}

#[derive(Serialize)]
struct Report<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    bounds: &'a BoundsReport,
    symmetry: &'a SymmetryReport,
}

/// Full assessment of one channel: symmetry screens plus bound pipeline,
/// emitted as report.json, one CSV per frontier, and an overlay SVG.
pub fn cmd_report(cfg: &RunConfig) -> Result<()> {
    cfg.validate()?;
    let ch = load_from_config(cfg, cfg.gamma)?;
    let pool = thread_pool(cfg.threads)?;
    let (full, sym) = pool.install(|| -> Result<_> {
        let full = bounds::full_report_detailed(&ch, &cfg.bounds_config())?;
        let sym = symmetry::symmetry_report(&ch, &full.alpha, &full.beta, &cfg.symmetry_config())?;
        Ok((full, sym))
    })?;
    let bounds_report = &full.report;

    fs::create_dir_all(&cfg.out_dir)?;
    let report = Report {
        gamma: cfg.gamma,
        bounds: bounds_report,
        symmetry: &sym,
    };
    let json =
        serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
    fs::write(cfg.out_dir.join("report.json"), json + "\n")?;

    write_frontier_csv(&cfg.out_dir.join("inner.csv"), &bounds_report.inner)?;
    write_frontier_csv(&cfg.out_dir.join("outer_simple.csv"), &bounds_report.outer_simple)?;
    write_frontier_csv(&cfg.out_dir.join("outer_trivial.csv"), &bounds_report.outer_trivial)?;
    write_frontier_csv(&cfg.out_dir.join("eps_region.csv"), &bounds_report.eps_region)?;
    if let Some(og) = &bounds_report.outer_grid {
        write_frontier_csv(&cfg.out_dir.join("outer_grid.csv"), og)?;
    }

    let mut series = vec![
        svg::Series {
            name: "inner",
            color: "#1f5fa8",
            dashed: false,
            frontier: &bounds_report.inner,
        },
        svg::Series {
            name: "outer (shifted)",
            color: "#c03030",
            dashed: false,
            frontier: &bounds_report.outer_simple,
        },
        svg::Series {
            name: "outer (trivial)",
            color: "#808080",
            dashed: true,
            frontier: &bounds_report.outer_trivial,
        },
        svg::Series {
            name: "eps region",
            color: "#2e8b57",
            dashed: true,
            frontier: &bounds_report.eps_region,
        },
    ];
    if let Some(og) = &bounds_report.outer_grid {
        series.push(svg::Series {
            name: "outer (grid)",
            color: "#d2842c",
            dashed: false,
            frontier: og,
        });
    }
    fs::write(cfg.out_dir.join("regions.svg"), svg::render(&series))?;

    println!(
        "I1*={:.4} I2*={:.4} alpha*={:.6} beta*={:.6} eps={:.6} -> {}",
        bounds_report.i1_star,
        bounds_report.i2_star,
        bounds_report.alpha_star,
        bounds_report.beta_star,
        bounds_report.epsilon,
        cfg.out_dir.display()
    );
    Ok(())
}

fn write_frontier_csv(path: &Path, frontier: &Frontier) -> Result<()> {
    let mut out = String::from("r1,r2\n");
    for v in frontier.vertices() {
        out.push_str(&format!("{:.6},{:.6}\n", v.r1, v.r2));
    }
    fs::write(path, out)?;
    Ok(())
}

/// One sweep row per gamma value.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub alpha_star: f64,
    pub beta_star: f64,
    pub epsilon: f64,
    pub i1_star: f64,
    pub i2_star: f64,
}

/// Computes the scalar bound quantities for each gamma and writes sweep.csv.
pub fn cmd_sweep(cfg: &RunConfig, gammas: &[f64]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if gammas.is_empty() {
        return Err(Error::Validation("empty gamma list".into()));
    }
    for &g in gammas {
        if !(0.0..=0.8).contains(&g) {
            return Err(Error::Validation(format!("gamma = {g} outside [0, 0.8]")));
        }
    }
    let text = fs::read_to_string(&cfg.channel_path).map_err(|e| {
        Error::Parse(format!(
            "cannot read channel file {}: {e}",
            cfg.channel_path.display()
        ))
    })?;
    let pool = thread_pool(cfg.threads)?;
    let rows = pool.install(|| -> Result<Vec<SweepRow>> {
        use rayon::prelude::*;
        gammas
            .par_iter()
            .map(|&gamma| {
                let ch = load_channel_with(&text, Some(gamma))?;
                let (i1_star, i2_star) = bounds::trivial_outer(&ch);
                let alpha = bounds::alpha_star(
                    &ch,
                    crate::channel::Direction::Forward,
                    cfg.delta,
                    cfg.refine_tol,
                )?;
                let beta = bounds::beta_star(
                    &ch,
                    crate::channel::Direction::Backward,
                    cfg.delta,
                    cfg.refine_tol,
                )?;
                let ratio = |num: f64, den: f64| if den > 1e-12 { num / den } else { 0.0 };
                let epsilon =
                    ratio(alpha.value, i1_star).max(ratio(2.0 * beta.value, i2_star));
                Ok(SweepRow {
                    gamma,
                    alpha_star: alpha.value,
                    beta_star: beta.value,
                    epsilon,
                    i1_star,
                    i2_star,
                })
            })
            .collect()
    })?;

    fs::create_dir_all(&cfg.out_dir)?;
    let mut out = String::from("gamma,alpha_star,beta_star,epsilon,i1_star,i2_star\n");
    for r in &rows {
        out.push_str(&format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            r.gamma, r.alpha_star, r.beta_star, r.epsilon, r.i1_star, r.i2_star
        ));
    }
    fs::write(cfg.out_dir.join("sweep.csv"), out)?;
    Ok(rows)
}
