use clap::{Parser, Subcommand};
use kvn_emu::block_encoding::{build_oracles, build_oracles_dense, verify_block};
use kvn_emu::cases::{run_case_a, run_case_b, run_case_c, run_case_d, RunOptions};
use kvn_emu::config::{CaseId, ExperimentConfig};
use kvn_emu::engine::EngineRegistry;
use kvn_emu::error::Result;
use kvn_emu::hamiltonian::assemble;
use kvn_emu::model::{build_system_1d, GridSpec, PhysicalParams};
use kvn_emu::qsvt::{jacobi_anger_coefficients, qsvt_error_bound};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "kvn-emu", version, about = "Matrix-level emulator for lifted plasma-fluid dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV series and the run manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated engine list, overriding the configuration.
    #[arg(long, value_delimiter = ',')]
    engines: Option<Vec<String>>,
    /// Suppress wall-clock manifest entries so reruns are byte-identical.
    #[arg(long)]
    deterministic: bool,
    /// Also write each assembled operator in Matrix Market format.
    #[arg(long)]
    dump_operator: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Uniform-background oscillation against the closed form.
    RunA(RunArgs),
    /// Norm-deviation sweep over the truncation order.
    RunB(RunArgs),
    /// Norm-deviation sweep over the grid resolution.
    RunC(RunArgs),
    /// 2D shear-layer instability against the linearized reference.
    RunD(RunArgs),
    /// Check the explicit block encoding against the operators it encodes.
    VerifyBe {
        /// Random sparse Hermitian instances to check.
        #[arg(long, default_value_t = 25)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Quick end-to-end sanity checks of every engine.
    Selftest,
}

fn load_config(args: &RunArgs, case: CaseId) -> Result<ExperimentConfig> {
    let path = args
        .config
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("configs/case_{}.cfg", case.label())));
    ExperimentConfig::load(&path)
}

fn options(args: &RunArgs, cfg: &ExperimentConfig) -> RunOptions {
    RunOptions {
        out_dir: args.out.clone(),
        engines: args.engines.clone(),
        deterministic: args.deterministic || cfg.deterministic,
        dump_operator: args.dump_operator,
    }
}

fn cmd_run(args: &RunArgs, case: CaseId) -> Result<()> {
    let cfg = load_config(args, case)?;
    let opts = options(args, &cfg);
    match case {
        CaseId::A => {
            let res = run_case_a(&cfg, &opts)?;
            println!("alpha             = {:.6}", res.alpha);
            println!("period            = {:.6} (exact {:.6})", res.period, res.exact_period);
            println!("periods covered   = {:.3}", res.periods_covered);
            for (traj, err) in res.trajectories.iter().zip(&res.max_rel_error) {
                println!("max rel error [{}] = {:.3e}", traj.engine, err);
            }
        }
        CaseId::B | CaseId::C => {
            let entries = if case == CaseId::B { run_case_b(&cfg, &opts)? } else { run_case_c(&cfg, &opts)? };
            for entry in &entries {
                for run in &entry.runs {
                    println!(
                        "{:>6} {:>14}  t = {:8.3}  delta = {:.3e}",
                        entry.label,
                        run.engine,
                        run.times.last().unwrap(),
                        run.delta.last().unwrap()
                    );
                }
            }
        }
        CaseId::D => {
            let res = run_case_d(&cfg, &opts)?;
            println!("alpha        = {:.6}", res.alpha);
            println!("gamma eigen  = {:.6}", res.gamma_eigen);
            println!("gamma fitted = {:.6} (residual {:.3e})", res.fit.rate, res.fit.residual);
            println!("vortex ratio = {:.3}", res.vortex_ratio);
            println!("time span    = {:.3}", res.real_time_span);
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn random_hermitian_sparse(rng: &mut ChaCha8Rng, n: usize, per_col: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        for _ in 0..per_col {
            let i = rng.gen_range(0..n);
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    for j in 0..n {
        a[(j, j)] = Complex64::new(a[(j, j)].re, 0.0);
    }
    a
}

fn cmd_verify_be(instances: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..instances {
        let n = rng.gen_range(2..=8);
        let a = random_hermitian_sparse(&mut rng, n, 2);
        let orc = build_oracles_dense(&a, None)?;
        let report = verify_block(&orc, &a)?;
        worst = worst.max(report.max_deviation);
        println!(
            "instance {k:>3}: dim {n}, s = {}, deviation = {:.3e}",
            orc.s, report.max_deviation
        );
    }
    // and once on an actual lifted operator
    let grid = GridSpec::new(&[5], &[1.0])?;
    let params = PhysicalParams::nondimensional(5, -1.0);
    let sys = build_system_1d(&grid, &params)?;
    let h = assemble(&sys, 1, 1e4)?;
    let orc = build_oracles(&h, None)?;
    let report = verify_block(&orc, &h.to_dense())?;
    worst = worst.max(report.max_deviation);
    println!("lifted operator: dim {}, deviation = {:.3e}", h.dim(), report.max_deviation);
    if worst < 1e-12 {
        println!("PASS: max deviation {worst:.3e} < 1e-12");
        Ok(())
    } else {
        Err(kvn_emu::Error::Contract(format!("block deviation {worst:.3e} exceeds 1e-12")))
    }
}

fn cmd_selftest() -> Result<()> {
    // polynomial coefficients resolve and the bound is tight at short steps
    let plan = jacobi_anger_coefficients(1.0, 5, 4.0)?;
    let bound = qsvt_error_bound(4.0, 0.25, 5);
    println!("coefficients: {} cos, {} sin, step bound {bound:.3e}", plan.cos_coeffs.len(), plan.sin_coeffs.len());
    // every engine reproduces the uniform oscillation
    let cfg = ExperimentConfig::parse(
        "case = a\nn_x = 5\ndx = 1\nomega_p = -1\nlambda = 10000\nm = 1\ntau = 1\nr = 5\nn_t = 60\nu0 = 1\n",
    )?;
    let dir = std::env::temp_dir().join(format!("kvn-emu-selftest-{}", std::process::id()));
    let res = run_case_a(&cfg, &RunOptions::new(&dir))?;
    let _ = std::fs::remove_dir_all(&dir);
    for (traj, err) in res.trajectories.iter().zip(&res.max_rel_error) {
        let ok = *err < 1e-2;
        println!("{} {:>14}: max rel error {:.3e}", if ok { "PASS" } else { "FAIL" }, traj.engine, err);
        if !ok {
            return Err(kvn_emu::Error::Numerical(format!("{} deviates by {err:.3e}", traj.engine)));
        }
    }
    println!("engines registered: {}", EngineRegistry::default().names().join(", "));
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::RunA(args) => cmd_run(args, CaseId::A),
        Command::RunB(args) => cmd_run(args, CaseId::B),
        Command::RunC(args) => cmd_run(args, CaseId::C),
        Command::RunD(args) => cmd_run(args, CaseId::D),
        Command::VerifyBe { instances, seed } => cmd_verify_be(*instances, *seed),
        Command::Selftest => cmd_selftest(),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
