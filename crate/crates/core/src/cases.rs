//! End-to-end experiment drivers: each case builds its system from a parsed
//! configuration, runs the selected engines on a shared time grid, and emits
//! CSV series plus a run manifest that parses back into the configuration.

use crate::analysis::{self, growth_rate_fit, linear_stability, GrowthFit};
use crate::config::{CaseId, ExperimentConfig};
use crate::engine::{EngineRegistry, EvolutionJob, Trajectory};
use crate::error::{Error, Result};
use crate::hamiltonian::{assemble, SparseHamiltonian};
use crate::model::{
    build_system_1d, build_system_2d, Component, FieldGrid, GridSpec, OdeSystem, PhysicalParams,
};
use crate::qsvt::qsvt_error_bound;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Overrides the configured engine list when present.
    pub engines: Option<Vec<String>>,
    /// Suppresses wall-clock entries so repeated runs emit identical bytes.
    pub deterministic: bool,
    /// Dump each assembled operator in Matrix Market format.
    pub dump_operator: bool,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> RunOptions {
        RunOptions { out_dir: out_dir.into(), engines: None, deterministic: true, dump_operator: false }
    }
}

/// 17-significant-digit decimal rendering: lossless double round-trip.
pub fn csv_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

fn grid_coord(index: usize, n: usize, spacing: f64) -> f64 {
    (index as f64 - (n / 2) as f64) * spacing
}

/// Linear interpolation of a sampled series at time `t`.
pub fn series_at(times: &[f64], values: &[f64], t: f64) -> Result<f64> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::Measurement("need at least two samples to interpolate".into()));
    }
    if t <= times[0] {
        return Ok(values[0]);
    }
    if t >= *times.last().unwrap() {
        return Ok(*values.last().unwrap());
    }
    let k = times.partition_point(|&x| x < t);
    let (t0, t1) = (times[k - 1], times[k]);
    let frac = (t - t0) / (t1 - t0);
    Ok(values[k - 1] + frac * (values[k] - values[k - 1]))
}

struct CaseContext<'a> {
    cfg: &'a ExperimentConfig,
    opts: &'a RunOptions,
    registry: EngineRegistry,
    manifest_info: Vec<(String, String)>,
    started: std::time::Instant,
}

impl<'a> CaseContext<'a> {
    fn new(cfg: &'a ExperimentConfig, opts: &'a RunOptions) -> Result<CaseContext<'a>> {
        std::fs::create_dir_all(&opts.out_dir)
            .map_err(|e| Error::io(opts.out_dir.display().to_string(), e))?;
        let registry = EngineRegistry::default();
        let ctx = CaseContext {
            cfg,
            opts,
            registry,
            manifest_info: Vec::new(),
            started: std::time::Instant::now(),
        };
        for name in ctx.engine_names() {
            ctx.registry.get(&name)?; // validate before any compute
        }
        Ok(ctx)
    }

    fn engine_names(&self) -> Vec<String> {
        self.opts.engines.clone().unwrap_or_else(|| self.cfg.engines.clone())
    }

    fn out(&self, name: &str) -> PathBuf {
        self.opts.out_dir.join(name)
    }

    fn note(&mut self, key: &str, value: String) {
        self.manifest_info.push((key.to_string(), value));
    }

    fn dump_operator(&self, h: &SparseHamiltonian, label: &str) -> Result<()> {
        if !self.opts.dump_operator {
            return Ok(());
        }
        let path = self.out(&format!("operator_{label}.mtx"));
        let mut buf = Vec::new();
        h.write_matrix_market(&mut buf).map_err(|e| Error::io(path.display().to_string(), e))?;
        write_file(&path, std::str::from_utf8(&buf).expect("ascii matrix market"))
    }

    fn finish(mut self) -> Result<()> {
        let mut cfg = self.cfg.clone();
        cfg.info.insert("code_version".into(), env!("CARGO_PKG_VERSION").into());
        for (k, v) in std::mem::take(&mut self.manifest_info) {
            cfg.info.insert(k, v);
        }
        if !self.opts.deterministic {
            cfg.info
                .insert("elapsed_seconds".into(), format!("{:.3}", self.started.elapsed().as_secs_f64()));
        }
        write_file(&self.out("manifest.cfg"), &cfg.serialize())
    }
}

fn run_engines(
    ctx: &CaseContext,
    sys: &OdeSystem,
    h: &SparseHamiltonian,
    x0: &[f64],
    alpha: f64,
    m: u32,
    n_t: usize,
) -> Result<Vec<Trajectory>> {
    let _ = m;
    let job = EvolutionJob {
        sys,
        h: Some(h),
        x0,
        lambda: ctx.cfg.lambda,
        alpha,
        tau: ctx.cfg.tau,
        r: ctx.cfg.r,
        n_t,
        renormalize: ctx.cfg.renormalize,
        sample_stride: ctx.cfg.sample_stride,
    };
    ctx.engine_names()
        .iter()
        .map(|name| ctx.registry.get(name)?.run(&job))
        .collect()
}

fn trajectory_csv(traj: &Trajectory, dt: f64, per_step_budget: f64, columns: &[(&str, &[f64])]) -> String {
    let mut out = String::from("step,t");
    for (name, _) in columns {
        let _ = write!(out, ",{name}");
    }
    out.push_str(",norm,budget\n");
    for (k, &t) in traj.times.iter().enumerate() {
        let step = (t / dt).round() as u64;
        let _ = write!(out, "{step},{}", csv_f64(t));
        for (_, vals) in columns {
            let _ = write!(out, ",{}", csv_f64(vals[k]));
        }
        let _ = writeln!(out, ",{},{}", csv_f64(traj.norms[k]), csv_f64(step as f64 * per_step_budget));
    }
    out
}

fn per_step_budget(traj: &Trajectory, cfg: &ExperimentConfig, alpha: f64) -> f64 {
    if traj.engine == "kvn-qsvt" {
        qsvt_error_bound(alpha, cfg.tau / alpha, cfg.r)
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Case A: linear plasma oscillation against the closed-form harmonic.

#[derive(Debug)]
pub struct CaseAResult {
    pub alpha: f64,
    pub period: f64,
    pub exact_period: f64,
    /// max relative deviation from the analytic harmonic, over all samples,
    /// per engine (aligned with `trajectories`).
    pub max_rel_error: Vec<f64>,
    pub periods_covered: f64,
    pub trajectories: Vec<Trajectory>,
}

pub fn run_case_a(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<CaseAResult> {
    if cfg.case != CaseId::A {
        return Err(Error::Config(format!("expected a case-a configuration, got case {}", cfg.case.label())));
    }
    let mut ctx = CaseContext::new(cfg, opts)?;
    let n_x = cfg.n_x[0];
    let grid = GridSpec::new(&[n_x], &[cfg.dx])?;
    let params = PhysicalParams::nondimensional(n_x, cfg.omega_p);
    let sys = build_system_1d(&grid, &params)?;
    let u0 = cfg.u0.unwrap_or(1.0);
    let mut x0 = vec![0.0; sys.n_vars];
    for j in 0..n_x {
        x0[j] = u0 * params.density[j].sqrt();
    }
    let h = assemble(&sys, cfg.m[0], cfg.lambda)?;
    let alpha = h.frobenius_norm();
    ctx.dump_operator(&h, "case_a")?;
    let n_t = cfg.n_t[0];
    let trajectories = run_engines(&ctx, &sys, &h, &x0, alpha, cfg.m[0], n_t)?;
    let dt = cfg.tau / alpha;
    let omega = params.omega_tilde(0);
    let mut max_rel_error = Vec::new();
    for traj in &trajectories {
        let mut worst = 0.0f64;
        for (k, &t) in traj.times.iter().enumerate() {
            let want_u = u0 * (omega * t).cos();
            let want_e = -u0 * (omega * t).sin();
            let err = ((traj.states[k][0] - want_u).powi(2) + (traj.states[k][n_x] - want_e).powi(2))
                .sqrt();
            worst = worst.max(err / u0.abs());
        }
        max_rel_error.push(worst);
        let u_series: Vec<f64> = traj.states.iter().map(|x| x[0]).collect();
        let e_series: Vec<f64> = traj.states.iter().map(|x| x[n_x]).collect();
        let csv = trajectory_csv(
            traj,
            dt,
            per_step_budget(traj, cfg, alpha),
            &[("u_tilde_x0", &u_series), ("e_tilde_x0", &e_series)],
        );
        write_file(&ctx.out(&format!("case_a_{}.csv", traj.engine)), &csv)?;
    }
    // period from the first Hilbert-space trajectory (fall back to any)
    let reference = trajectories
        .iter()
        .find(|t| t.engine != "classical-rk4")
        .unwrap_or(&trajectories[0]);
    let u_series: Vec<f64> = reference.states.iter().map(|x| x[0]).collect();
    let period = analysis::extract_period(&reference.times, &u_series)?;
    let exact_period = 2.0 * std::f64::consts::PI / omega.abs();
    let real_span = n_t as f64 * dt;
    let result = CaseAResult {
        alpha,
        period,
        exact_period,
        max_rel_error,
        periods_covered: real_span / exact_period,
        trajectories,
    };
    let mut report = String::new();
    let _ = writeln!(report, "alpha = {}", csv_f64(alpha));
    let _ = writeln!(report, "period_numerical = {}", csv_f64(result.period));
    let _ = writeln!(report, "period_exact = {}", csv_f64(exact_period));
    let _ = writeln!(report, "periods_covered = {}", csv_f64(result.periods_covered));
    for (traj, err) in result.trajectories.iter().zip(&result.max_rel_error) {
        let _ = writeln!(report, "max_rel_error_{} = {}", traj.engine, csv_f64(*err));
    }
    write_file(&ctx.out("case_a_report.txt"), &report)?;
    ctx.note("alpha", csv_f64(alpha));
    ctx.note("real_time_span", csv_f64(real_span));
    ctx.finish()?;
    Ok(result)
}

// ---------------------------------------------------------------------------
// Cases B and C: norm-deviation sweeps over m and over the grid resolution.

#[derive(Debug)]
pub struct SweepRun {
    pub engine: String,
    pub times: Vec<f64>,
    pub delta: Vec<f64>,
}

#[derive(Debug)]
pub struct SweepEntry {
    pub label: String,
    pub m: u32,
    pub n_x: usize,
    pub alpha: f64,
    pub real_time_span: f64,
    pub runs: Vec<SweepRun>,
}

impl SweepEntry {
    pub fn run(&self, engine: &str) -> Option<&SweepRun> {
        self.runs.iter().find(|r| r.engine == engine)
    }
}

fn advection_initial(n_x: usize, dx: f64, amplitude: f64, params: &PhysicalParams) -> Vec<f64> {
    let k = -2.0 * std::f64::consts::PI / (n_x as f64 * dx);
    let mut x0 = vec![0.0; 2 * n_x];
    for j in 0..n_x {
        let x = grid_coord(j, n_x, dx);
        x0[j] = amplitude * (k * x).sin() * params.density[j].sqrt();
    }
    x0
}

fn run_sweep(
    cfg: &ExperimentConfig,
    opts: &RunOptions,
    entries: Vec<(String, usize, u32, usize)>, // (label, n_x, m, n_t)
) -> Result<Vec<SweepEntry>> {
    let mut ctx = CaseContext::new(cfg, opts)?;
    let mut out = Vec::new();
    let mut alphas = Vec::new();
    let mut spans = Vec::new();
    for (label, n_x, m, n_t) in entries {
        let grid = GridSpec::new(&[n_x], &[cfg.dx])?;
        let params = PhysicalParams::nondimensional(n_x, cfg.omega_p);
        let sys = build_system_1d(&grid, &params)?;
        let x0 = advection_initial(n_x, cfg.dx, cfg.u0.unwrap_or(1.0), &params);
        let h = assemble(&sys, m, cfg.lambda)?;
        let alpha = h.frobenius_norm();
        ctx.dump_operator(&h, &label)?;
        let trajectories = run_engines(&ctx, &sys, &h, &x0, alpha, m, n_t)?;
        let dt = cfg.tau / alpha;
        let mut runs = Vec::new();
        for traj in &trajectories {
            let delta = analysis::l2_deviation(&traj.states);
            let csv = trajectory_csv(
                traj,
                dt,
                per_step_budget(traj, cfg, alpha),
                &[("delta", &delta)],
            );
            write_file(&ctx.out(&format!("case_{}_{label}_{}.csv", cfg.case.label(), traj.engine)), &csv)?;
            runs.push(SweepRun { engine: traj.engine.to_string(), times: traj.times.clone(), delta });
        }
        alphas.push(csv_f64(alpha));
        spans.push(csv_f64(n_t as f64 * dt));
        out.push(SweepEntry { label, m, n_x, alpha, real_time_span: n_t as f64 * dt, runs });
    }
    let mut report = String::new();
    for entry in &out {
        for run in &entry.runs {
            let _ = writeln!(
                report,
                "{} {} final_t = {} final_delta = {}",
                entry.label,
                run.engine,
                csv_f64(*run.times.last().unwrap()),
                csv_f64(*run.delta.last().unwrap()),
            );
        }
    }
    write_file(&ctx.out(&format!("case_{}_report.txt", cfg.case.label())), &report)?;
    ctx.note("alpha", alphas.join(","));
    ctx.note("real_time_span", spans.join(","));
    ctx.finish()?;
    Ok(out)
}

pub fn run_case_b(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<SweepEntry>> {
    if cfg.case != CaseId::B {
        return Err(Error::Config(format!("expected a case-b configuration, got case {}", cfg.case.label())));
    }
    let entries = cfg
        .m
        .iter()
        .zip(&cfg.n_t)
        .map(|(&m, &n_t)| (format!("m{m}"), cfg.n_x[0], m, n_t))
        .collect();
    run_sweep(cfg, opts, entries)
}

pub fn run_case_c(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<SweepEntry>> {
    if cfg.case != CaseId::C {
        return Err(Error::Config(format!("expected a case-c configuration, got case {}", cfg.case.label())));
    }
    let entries = cfg
        .n_x
        .iter()
        .zip(&cfg.n_t)
        .map(|(&n_x, &n_t)| (format!("nx{n_x}"), n_x, cfg.m[0], n_t))
        .collect();
    run_sweep(cfg, opts, entries)
}

// ---------------------------------------------------------------------------
// Case D: 2D shear-layer instability against the linearized eigen reference.

#[derive(Debug)]
pub struct CaseDResult {
    pub alpha: f64,
    /// Growth rate of the dominant eigenmode of the linearized background.
    pub gamma_eigen: f64,
    /// Characteristic time of that mode (oscillation period of Im λ_max).
    pub t_eigen: f64,
    pub fit: GrowthFit,
    /// Mean |curl| near the shear edges over the mean elsewhere, at the
    /// final sample; > 1 means the roll-up sits at the shear boundaries.
    pub vortex_ratio: f64,
    pub real_time_span: f64,
    pub observable_times: Vec<f64>,
    /// max over the grid of |ũ₂(perturbed) − ũ₂(background)| per sample.
    pub observable: Vec<f64>,
}

/// Shear-layer initial condition on the transformed variables: u₁ = u₀ + ε
/// sin(k_x·x + k_y·y) inside |y| ≤ 3Δy, −u₀ outside; B₃ = B₀; the rest 0.
fn shear_initial(cfg: &ExperimentConfig, grid: &GridSpec, params: &PhysicalParams, epsilon: f64) -> Result<Vec<f64>> {
    let (n_x, n_y) = (grid.shape[0], grid.shape[1]);
    let u0 = cfg.u0.unwrap();
    let b0 = cfg.b0.unwrap();
    let (k_x, k_y) = (cfg.k_x.unwrap(), cfg.k_y.unwrap());
    let mut fg = FieldGrid::zeros(grid.clone())?;
    for j1 in 0..n_x {
        for j2 in 0..n_y {
            let point = j1 * n_y + j2;
            let x = grid_coord(j1, n_x, grid.spacing[0]);
            let y = grid_coord(j2, n_y, grid.spacing[1]);
            let u1 = if y.abs() <= 3.0 * grid.spacing[1] + 1e-12 {
                u0 + epsilon * (k_x * x + k_y * y).sin()
            } else {
                -u0
            };
            fg.set(Component::U(1), point, u1 * params.density[point].sqrt());
            fg.set(
                Component::B(3),
                point,
                b0 / (params.mu0 * params.m_q).sqrt(),
            );
        }
    }
    Ok(fg.to_state())
}

/// Discrete curl of the in-plane velocity with periodic wrap, point-wise.
fn curl_field(fg: &FieldGrid) -> Vec<f64> {
    let (n_x, n_y) = (fg.grid.shape[0], fg.grid.shape[1]);
    let (dx, dy) = (fg.grid.spacing[0], fg.grid.spacing[1]);
    let at = |comp, j1: i64, j2: i64| {
        let p = fg.grid.flat_point(&[j1, j2]);
        fg.get(comp, p)
    };
    let mut out = vec![0.0; n_x * n_y];
    for j1 in 0..n_x as i64 {
        for j2 in 0..n_y as i64 {
            let du2_dx = (at(Component::U(2), j1 + 1, j2) - at(Component::U(2), j1 - 1, j2)) / (2.0 * dx);
            let du1_dy = (at(Component::U(1), j1, j2 + 1) - at(Component::U(1), j1, j2 - 1)) / (2.0 * dy);
            out[j1 as usize * n_y + j2 as usize] = du2_dx - du1_dy;
        }
    }
    out
}

fn snapshot_csv(fg: &FieldGrid) -> String {
    let (n_x, n_y) = (fg.grid.shape[0], fg.grid.shape[1]);
    let mut out = String::from("x,y,u1_tilde,u2_tilde\n");
    for j1 in 0..n_x {
        for j2 in 0..n_y {
            let p = j1 * n_y + j2;
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_f64(grid_coord(j1, n_x, fg.grid.spacing[0])),
                csv_f64(grid_coord(j2, n_y, fg.grid.spacing[1])),
                csv_f64(fg.get(Component::U(1), p)),
                csv_f64(fg.get(Component::U(2), p)),
            );
        }
    }
    out
}

pub fn run_case_d(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<CaseDResult> {
    if cfg.case != CaseId::D {
        return Err(Error::Config(format!("expected a case-d configuration, got case {}", cfg.case.label())));
    }
    let mut ctx = CaseContext::new(cfg, opts)?;
    let n_x = cfg.n_x[0];
    let n_y = cfg.n_y.unwrap();
    let grid = GridSpec::new(&[n_x, n_y], &[cfg.dx, cfg.dy])?;
    let params = PhysicalParams::nondimensional(n_x * n_y, cfg.omega_p);
    let sys = build_system_2d(&grid, &params)?;
    // eigen reference at the unperturbed background
    let background = shear_initial(cfg, &grid, &params, 0.0)?;
    let stability = linear_stability(&sys, &background)?;
    let gamma_eigen = stability.growth_rate;
    let t_eigen = stability
        .characteristic_time()
        .ok_or_else(|| Error::Numerical("background has no unstable or oscillatory mode".into()))?;
    let x0 = shear_initial(cfg, &grid, &params, cfg.epsilon.unwrap())?;
    let h = assemble(&sys, cfg.m[0], cfg.lambda)?;
    let alpha = h.frobenius_norm();
    ctx.dump_operator(&h, "case_d")?;
    let n_t = cfg.n_t[0];
    let dt = cfg.tau / alpha;
    let real_time_span = n_t as f64 * dt;
    let trajectories = run_engines(&ctx, &sys, &h, &x0, alpha, cfg.m[0], n_t)?;
    // the unperturbed background evolved with the same engines; the
    // perturbation observable is the difference of the two runs, which
    // removes the coherent gyration of the layer
    let background_runs = run_engines(&ctx, &sys, &h, &background, alpha, cfg.m[0], n_t)?;
    // the lead engine provides the observable and snapshots
    let lead = &trajectories[0];
    let n_pts = n_x * n_y;
    let u2_of = |x: &[f64]| -> f64 {
        x[n_pts..2 * n_pts].iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    };
    let diff_of = |x: &[f64], bg: &[f64]| -> f64 {
        (0..n_pts).map(|j| (x[n_pts + j] - bg[n_pts + j]).abs()).fold(0.0f64, f64::max)
    };
    let mut vortex_ratio = 0.0;
    for (traj, bg_run) in trajectories.iter().zip(&background_runs) {
        let series: Vec<f64> = traj.states.iter().map(|x| u2_of(x)).collect();
        let perturbation: Vec<f64> = traj
            .states
            .iter()
            .zip(&bg_run.states)
            .map(|(x, b)| diff_of(x, b))
            .collect();
        let csv = trajectory_csv(
            traj,
            dt,
            per_step_budget(traj, cfg, alpha),
            &[("max_u2_tilde", &series), ("max_u2_perturbation", &perturbation)],
        );
        write_file(&ctx.out(&format!("case_d_{}.csv", traj.engine)), &csv)?;
        // snapshots at 0, 0.5, 1.0 of the eigen period
        for (idx, frac) in [(0usize, 0.0f64), (1, 0.5), (2, 1.0)] {
            let target = frac * t_eigen;
            let k = traj
                .times
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - target).abs().partial_cmp(&(b.1 - target).abs()).unwrap())
                .map(|(k, _)| k)
                .unwrap();
            let fg = FieldGrid::from_state(grid.clone(), &traj.states[k])?;
            write_file(
                &ctx.out(&format!("case_d_snapshot_{idx}_{}.csv", traj.engine)),
                &snapshot_csv(&fg),
            )?;
        }
        let fg = FieldGrid::from_state(grid.clone(), traj.states.last().unwrap())?;
        let curl = curl_field(&fg);
        let mut band = (0.0, 0usize);
        let mut rest = (0.0, 0usize);
        for j1 in 0..n_x {
            for j2 in 0..n_y {
                let y = grid_coord(j2, n_y, grid.spacing[1]);
                let w = curl[j1 * n_y + j2].abs();
                if (y.abs() - 3.0 * grid.spacing[1]).abs() <= grid.spacing[1] + 1e-12 {
                    band.0 += w;
                    band.1 += 1;
                } else {
                    rest.0 += w;
                    rest.1 += 1;
                }
            }
        }
        let ratio = (band.0 / band.1 as f64) / (rest.0 / rest.1 as f64).max(1e-300);
        if traj.engine == lead.engine {
            vortex_ratio = ratio;
        }
    }
    let observable_times = lead.times.clone();
    let observable: Vec<f64> = lead
        .states
        .iter()
        .zip(&background_runs[0].states)
        .map(|(x, b)| diff_of(x, b))
        .collect();
    let fit = growth_rate_fit(&observable_times, &observable, 0.05 * t_eigen, 0.5 * t_eigen)?;
    let result = CaseDResult {
        alpha,
        gamma_eigen,
        t_eigen,
        fit,
        vortex_ratio,
        real_time_span,
        observable_times,
        observable,
    };
    let mut report = String::new();
    let _ = writeln!(report, "alpha = {}", csv_f64(alpha));
    let _ = writeln!(report, "gamma_eigen = {}", csv_f64(gamma_eigen));
    let _ = writeln!(report, "t_eigen = {}", csv_f64(t_eigen));
    let _ = writeln!(report, "gamma_fit = {}", csv_f64(result.fit.rate));
    let _ = writeln!(report, "fit_residual = {}", csv_f64(result.fit.residual));
    let _ = writeln!(report, "vortex_ratio = {}", csv_f64(vortex_ratio));
    let _ = writeln!(report, "real_time_span = {}", csv_f64(real_time_span));
    write_file(&ctx.out("case_d_report.txt"), &report)?;
    ctx.note("alpha", csv_f64(alpha));
    ctx.note("real_time_span", csv_f64(real_time_span));
    ctx.finish()?;
    Ok(result)
}

/// Dispatch on the configured case.
pub fn run_case(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<()> {
    match cfg.case {
        CaseId::A => run_case_a(cfg, opts).map(|_| ()),
        CaseId::B => run_case_b(cfg, opts).map(|_| ()),
        CaseId::C => run_case_c(cfg, opts).map(|_| ()),
        CaseId::D => run_case_d(cfg, opts).map(|_| ()),
    }
}
