//! Evolution engines behind a common trait: the polynomial (emulated
//! quantum) propagator, exact exponentiation of the lifted operator, and
//! direct classical integration. Engines are looked up by name so drivers
//! and the CLI can select them from configuration.

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::model::OdeSystem;
use crate::qsvt::{chebyshev_apply, jacobi_anger_coefficients};
use crate::solvers::{krylov_expm, rk4_integrate, DensePropagator};
use crate::state::KvnState;

/// Default classical integrator step in problem time units.
pub const RK4_DT: f64 = 1e-3;

/// Dimension above which exact exponentiation switches from a precomputed
/// eigendecomposition to Krylov stepping.
pub const DENSE_PROPAGATOR_LIMIT: usize = 512;

/// One evolution request: the classical system, its lifted operator (for
/// the Hilbert-space engines), and the shared time grid t_k = k·τ/α.
pub struct EvolutionJob<'a> {
    pub sys: &'a OdeSystem,
    /// Lifted operator; required by the Hilbert-space engines.
    pub h: Option<&'a SparseHamiltonian>,
    pub x0: &'a [f64],
    pub lambda: f64,
    /// Normalization the polynomial engine divides the operator by; also
    /// fixes the real-time step Δt = τ/α for every engine.
    pub alpha: f64,
    pub tau: f64,
    pub r: usize,
    pub n_t: usize,
    pub renormalize: bool,
    /// Record every `sample_stride`-th step (step 0 is always recorded).
    pub sample_stride: usize,
}

impl<'a> EvolutionJob<'a> {
    pub fn dt(&self) -> f64 {
        self.tau / self.alpha
    }

    fn require_h(&self) -> Result<&'a SparseHamiltonian> {
        self.h
            .ok_or_else(|| Error::Contract("this engine needs the assembled operator".into()))
    }

    fn stride(&self) -> usize {
        self.sample_stride.max(1)
    }
}

/// Decoded samples on the shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub engine: &'static str,
    pub times: Vec<f64>,
    /// Decoded variable vectors, one per recorded sample.
    pub states: Vec<Vec<f64>>,
    /// State norm before renormalization at each sample (1 for the
    /// classical engine).
    pub norms: Vec<f64>,
}

impl Trajectory {
    /// ‖x(t)‖₂ series of the decoded samples.
    pub fn l2_series(&self) -> Vec<f64> {
        self.states
            .iter()
            .map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }
}

pub trait Engine {
    fn name(&self) -> &'static str;
    fn run(&self, job: &EvolutionJob) -> Result<Trajectory>;
}

/// Polynomial propagator: one degree-(2R+1) Chebyshev application per step.
pub struct QsvtEngine;

impl Engine for QsvtEngine {
    fn name(&self) -> &'static str {
        "kvn-qsvt"
    }

    fn run(&self, job: &EvolutionJob) -> Result<Trajectory> {
        let h = job.require_h()?;
        let plan = jacobi_anger_coefficients(job.tau, job.r, job.alpha)?;
        let mut psi = KvnState::encode(job.x0, job.lambda, &h.basis)?;
        let dt = job.dt();
        let stride = job.stride();
        let mut traj = Trajectory {
            engine: self.name(),
            times: vec![0.0],
            states: vec![psi.decode()?],
            norms: vec![psi.norm()],
        };
        for step in 1..=job.n_t {
            psi = chebyshev_apply(h, &psi, &plan)?;
            let norm = psi.norm();
            if job.renormalize {
                psi.normalize();
            } else if norm < 1e-6 {
                return Err(Error::Divergence(format!("state norm collapsed at step {step}")));
            }
            if step % stride == 0 || step == job.n_t {
                traj.times.push(step as f64 * dt);
                traj.states.push(psi.decode()?);
                traj.norms.push(norm);
            }
        }
        Ok(traj)
    }
}

/// Exact exponentiation of the lifted operator: eigendecomposition at small
/// dimension, Krylov stepping otherwise.
pub struct ExpmEngine;

impl Engine for ExpmEngine {
    fn name(&self) -> &'static str {
        "kvn-expm"
    }

    fn run(&self, job: &EvolutionJob) -> Result<Trajectory> {
        let h = job.require_h()?;
        let psi0 = KvnState::encode(job.x0, job.lambda, &h.basis)?;
        let dt = job.dt();
        let stride = job.stride();
        let mut traj = Trajectory {
            engine: self.name(),
            times: vec![0.0],
            states: vec![psi0.decode()?],
            norms: vec![psi0.norm()],
        };
        let mut record = |step: usize, amps: &[num_complex::Complex64]| -> Result<()> {
            let st = KvnState { basis: h.basis.clone(), amplitudes: amps.to_vec(), lambda: job.lambda };
            traj.times.push(step as f64 * dt);
            traj.states.push(st.decode()?);
            traj.norms.push(st.norm());
            Ok(())
        };
        if h.dim() <= DENSE_PROPAGATOR_LIMIT {
            let prop = DensePropagator::new(h)?;
            let mut step = stride;
            while step <= job.n_t {
                record(step, &prop.apply(&psi0.amplitudes, step as f64 * dt))?;
                step += stride;
            }
            if (job.n_t % stride) != 0 && job.n_t > 0 {
                record(job.n_t, &prop.apply(&psi0.amplitudes, job.n_t as f64 * dt))?;
            }
        } else {
            let mut amps = psi0.amplitudes.clone();
            let mut done = 0usize;
            while done < job.n_t {
                let chunk = stride.min(job.n_t - done);
                amps = krylov_expm(h, &amps, chunk as f64 * dt, 30, 1e-10)?;
                done += chunk;
                record(done, &amps)?;
            }
        }
        Ok(traj)
    }
}

/// Direct integration of the nonlinear system; the reference the lifted
/// engines are compared against.
pub struct Rk4Engine;

impl Engine for Rk4Engine {
    fn name(&self) -> &'static str {
        "classical-rk4"
    }

    fn run(&self, job: &EvolutionJob) -> Result<Trajectory> {
        let dt_sample = job.dt() * job.stride() as f64;
        // integer number of integrator substeps per recorded sample
        let substeps = (dt_sample / RK4_DT).ceil().max(1.0) as usize;
        let dt = dt_sample / substeps as f64;
        let n_samples = job.n_t / job.stride();
        let raw = rk4_integrate(job.sys, job.x0, dt, substeps * n_samples, substeps)?;
        let mut traj = Trajectory {
            engine: self.name(),
            times: Vec::with_capacity(raw.len()),
            states: Vec::with_capacity(raw.len()),
            norms: vec![1.0; raw.len()],
        };
        for (t, x) in raw {
            traj.times.push(t);
            traj.states.push(x);
        }
        Ok(traj)
    }
}

pub struct EngineRegistry {
    engines: Vec<Box<dyn Engine>>,
}

impl Default for EngineRegistry {
    fn default() -> Self {
        EngineRegistry {
            engines: vec![Box::new(QsvtEngine), Box::new(ExpmEngine), Box::new(Rk4Engine)],
        }
    }
}

impl EngineRegistry {
    pub fn get(&self, name: &str) -> Result<&dyn Engine> {
        self.engines
            .iter()
            .map(|e| e.as_ref())
            .find(|e| e.name() == name)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown engine '{name}'; available: {}",
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.engines.iter().map(|e| e.name()).collect()
    }
}
