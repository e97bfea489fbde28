//! Ground-truth engines: exact exponentiation of the lifted Hamiltonian
//! (dense eigendecomposition or Lanczos expm-times-vector) and classical RK4
//! integration of the nonlinear ODE system.

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::model::{classical_rhs, OdeSystem};
use crate::state::KvnState;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub const DENSE_DIM_LIMIT: usize = 6000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpmMethod {
    DenseEigen,
    Krylov,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpmConfig {
    pub method: ExpmMethod,
    pub krylov_dim: usize,
    pub tol: f64,
}

impl ExpmConfig {
    pub fn auto(dim: usize) -> Self {
        ExpmConfig {
            method: if dim <= 512 { ExpmMethod::DenseEigen } else { ExpmMethod::Krylov },
            krylov_dim: 30,
            tol: 1e-10,
        }
    }
}

/// Precomputed eigendecomposition so repeated time points cost one rotation.
pub struct DensePropagator {
    eigvals: Vec<f64>,
    eigvecs: DMatrix<Complex64>,
}

impl DensePropagator {
    pub fn new(h: &SparseHamiltonian) -> Result<Self> {
        let d = h.dim();
        if d > DENSE_DIM_LIMIT {
            return Err(Error::Capacity(format!(
                "dense eigendecomposition refused at dimension {d} (limit {DENSE_DIM_LIMIT})"
            )));
        }
        let dense = h.to_dense();
        let eig = nalgebra::SymmetricEigen::new(dense);
        Ok(DensePropagator {
            eigvals: eig.eigenvalues.iter().copied().collect(),
            eigvecs: eig.eigenvectors,
        })
    }

    /// exp(−iHt)·v.
    pub fn apply(&self, v: &[Complex64], t: f64) -> Vec<Complex64> {
        let vv = DVector::from_column_slice(v);
        let mut coeffs = self.eigvecs.adjoint() * vv;
        for (c, &lam) in coeffs.iter_mut().zip(&self.eigvals) {
            *c *= Complex64::from_polar(1.0, -lam * t);
        }
        (&self.eigvecs * coeffs).iter().copied().collect()
    }
}

/// exp(−iHT)·ψ0 by the configured method.
pub fn evolve_expm(h: &SparseHamiltonian, psi0: &KvnState, t: f64, cfg: &ExpmConfig) -> Result<KvnState> {
    let amplitudes = match cfg.method {
        ExpmMethod::DenseEigen => DensePropagator::new(h)?.apply(&psi0.amplitudes, t),
        ExpmMethod::Krylov => krylov_expm(h, &psi0.amplitudes, t, cfg.krylov_dim, cfg.tol)?,
    };
    Ok(KvnState { basis: psi0.basis.clone(), amplitudes, lambda: psi0.lambda })
}

fn nrm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos exp(−iHt)·v with full reorthogonalization and adaptive time
/// splitting: a substep is accepted when the residual estimate
/// β_{k}·|last subspace coefficient| passes the tolerance, otherwise the
/// substep is halved.
pub fn krylov_expm(
    h: &SparseHamiltonian,
    v0: &[Complex64],
    t_total: f64,
    kdim: usize,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let d = h.dim();
    let mut v = v0.to_vec();
    if t_total == 0.0 || nrm(&v) == 0.0 {
        return Ok(v);
    }
    let sign = t_total.signum();
    let mut remaining = t_total.abs();
    let mut dt = remaining;
    let mut w = vec![Complex64::default(); d];
    while remaining > 0.0 {
        let step = dt.min(remaining);
        let beta0 = nrm(&v);
        // Lanczos sweep with full reorthogonalization
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(kdim);
        basis.push(v.iter().map(|z| z / beta0).collect());
        let mut tri_a: Vec<f64> = Vec::new();
        let mut tri_b: Vec<f64> = Vec::new(); // tri_b[k] couples q_k and q_{k+1}
        let mut breakdown = false;
        for k in 0..kdim {
            h.apply(&basis[k], &mut w);
            let a: Complex64 = basis[k].iter().zip(w.iter()).map(|(q, x)| q.conj() * x).sum();
            tri_a.push(a.re);
            for q in &basis {
                let c: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
            let b = nrm(&w);
            if b < 1e-13 {
                breakdown = true;
                break;
            }
            tri_b.push(b);
            if k + 1 < kdim {
                basis.push(w.iter().map(|z| z / b).collect());
            }
        }
        // small dense exponential of the tridiagonal projection
        let klen = basis.len();
        let mut tm = DMatrix::from_element(klen, klen, Complex64::default());
        for k in 0..klen {
            tm[(k, k)] = Complex64::new(tri_a[k], 0.0);
            if k + 1 < klen {
                tm[(k, k + 1)] = Complex64::new(tri_b[k], 0.0);
                tm[(k + 1, k)] = Complex64::new(tri_b[k], 0.0);
            }
        }
        let eig = nalgebra::SymmetricEigen::new(tm);
        let mut e1 = DVector::from_element(klen, Complex64::default());
        e1[0] = Complex64::new(1.0, 0.0);
        let mut coeff = eig.eigenvectors.adjoint() * e1;
        for (c, &lam) in coeff.iter_mut().zip(eig.eigenvalues.iter()) {
            *c *= Complex64::from_polar(1.0, -sign * lam * step);
        }
        let y = &eig.eigenvectors * coeff;
        let err_est = if breakdown {
            0.0 // invariant subspace: the projected exponential is exact
        } else {
            tri_b[klen - 1] * y[klen - 1].norm() * step
        };
        if err_est > tol && step > t_total.abs() * 1e-12 {
            dt = step * 0.5;
            continue;
        }
        // assemble v = beta0 * basis * y
        let mut out = vec![Complex64::default(); d];
        for (k, q) in basis.iter().enumerate() {
            let c = y[k] * beta0;
            for (o, qi) in out.iter_mut().zip(q) {
                *o += c * qi;
            }
        }
        v = out;
        remaining -= step;
        if err_est < tol * 0.01 {
            dt = step * 2.0;
        }
    }
    Ok(v)
}

/// Classic RK4 on the interaction-list right-hand side. Samples every
/// `stride` steps (step 0 and the final step always included).
pub fn rk4_integrate(
    sys: &OdeSystem,
    x0: &[f64],
    dt: f64,
    steps: usize,
    stride: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let stride = stride.max(1);
    let mut x = x0.to_vec();
    let mut out = vec![(0.0, x.clone())];
    for s in 0..steps {
        let k1 = classical_rhs(sys, &x)?;
        let xt: Vec<f64> = x.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k2 = classical_rhs(sys, &xt)?;
        let xt: Vec<f64> = x.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k3 = classical_rhs(sys, &xt)?;
        let xt: Vec<f64> = x.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
        let k4 = classical_rhs(sys, &xt)?;
        for i in 0..x.len() {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence(format!("RK4 state non-finite at step {}", s + 1)));
        }
        if (s + 1) % stride == 0 || s + 1 == steps {
            out.push(((s + 1) as f64 * dt, x.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::TruncatedFockBasis;
    use crate::hamiltonian::assemble;
    use crate::model::{build_system_1d, GridSpec, Interaction, OdeSystem, PhysicalParams};
    use rand::{Rng as _, SeedableRng as _};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, seed: u64) -> SparseHamiltonian {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::from_element(d, d, Complex64::default());
        for i in 0..d {
            for j in i..d {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if i == j {
                    m[(i, j)] = Complex64::new(z.re, 0.0);
                } else {
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
        }
        // any basis with matching dimension works for raw operator tests
        let basis = match d {
            3 => TruncatedFockBasis::new(2, 1).unwrap(),
            6 => TruncatedFockBasis::new(2, 2).unwrap(),
            10 => TruncatedFockBasis::new(3, 2).unwrap(),
            56 => TruncatedFockBasis::new(5, 3).unwrap(),
            120 => TruncatedFockBasis::new(14, 2).unwrap(),
            _ => panic!("no basis listed for dim {d}"),
        };
        SparseHamiltonian::from_dense(basis, &m).unwrap()
    }

    fn random_state(h: &SparseHamiltonian, seed: u64) -> KvnState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = KvnState {
            basis: h.basis.clone(),
            amplitudes: (0..h.dim())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
            lambda: 1.0,
        };
        st.normalize();
        st
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let sys = OdeSystem { n_vars: 2, interactions: vec![], c: 1, d: 3, layout: None };
        let h = assemble(&sys, 2, 1.0).unwrap();
        let psi = random_state(&h, 1);
        for method in [ExpmMethod::DenseEigen, ExpmMethod::Krylov] {
            let cfg = ExpmConfig { method, krylov_dim: 10, tol: 1e-10 };
            let out = evolve_expm(&h, &psi, 2.5, &cfg).unwrap();
            for (a, b) in out.amplitudes.iter().zip(&psi.amplitudes) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_variable_rotation_closed_form() {
        // pair {u, E} with ω_p = −1: u(t) = u cos t − E sin t, E(t) = E cos t + u sin t
        let sys = OdeSystem {
            n_vars: 2,
            interactions: vec![Interaction::new(vec![(0, -1.0), (1, 1.0)]).unwrap()],
            c: 1,
            d: 3,
            layout: None,
        };
        let h = assemble(&sys, 3, 1.0).unwrap();
        let basis = h.basis.clone();
        let (u0, e0) = (0.8, -0.3);
        let psi0 = KvnState::encode(&[u0, e0], 1.0, &basis).unwrap();
        for &t in &[0.4, 1.7, std::f64::consts::FRAC_PI_2] {
            let out = evolve_expm(&h, &psi0, t, &ExpmConfig::auto(h.dim())).unwrap();
            let x = out.decode().unwrap();
            let want = [u0 * t.cos() - e0 * t.sin(), e0 * t.cos() + u0 * t.sin()];
            assert!((x[0] - want[0]).abs() < 1e-10, "t={t}: {x:?} vs {want:?}");
            assert!((x[1] - want[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_and_krylov_agree() {
        for (d, seed) in [(56usize, 5u64), (120, 6)] {
            let h = random_hermitian(d, seed);
            let psi = random_state(&h, seed + 100);
            let t = 1.3;
            let dense = evolve_expm(&h, &psi, t, &ExpmConfig { method: ExpmMethod::DenseEigen, krylov_dim: 0, tol: 0.0 }).unwrap();
            let kry = evolve_expm(&h, &psi, t, &ExpmConfig { method: ExpmMethod::Krylov, krylov_dim: 30, tol: 1e-10 }).unwrap();
            let diff: f64 = dense
                .amplitudes
                .iter()
                .zip(&kry.amplitudes)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 1e-9, "dim {d}: {diff:.3e}");
        }
    }

    #[test]
    fn expm_is_unitary() {
        let grid = GridSpec::new(&[8], &[1.0]).unwrap();
        let params = PhysicalParams::nondimensional(8, -0.1);
        let sys = build_system_1d(&grid, &params).unwrap();
        let h = assemble(&sys, 2, 1.0).unwrap();
        let psi0 = KvnState::encode(&vec![0.3; 16], 1.0, &h.basis).unwrap();
        for method in [ExpmMethod::DenseEigen, ExpmMethod::Krylov] {
            let cfg = ExpmConfig { method, krylov_dim: 30, tol: 1e-10 };
            let out = evolve_expm(&h, &psi0, 10.0, &cfg).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rk4_period_recovery() {
        let grid = GridSpec::new(&[8], &[1.0]).unwrap();
        let params = PhysicalParams::nondimensional(8, -1.0);
        let sys = build_system_1d(&grid, &params).unwrap();
        // uniform u=1, E=0: closed-form u(t) = cos t everywhere
        let mut x0 = vec![0.0; 16];
        for j in 0..8 {
            x0[j] = 1.0;
        }
        let dt = 1e-3;
        let steps = (2.0 * std::f64::consts::PI / dt) as usize;
        let traj = rk4_integrate(&sys, &x0, dt, steps, 1).unwrap();
        for (t, x) in traj.iter().step_by(500) {
            assert!((x[0] - t.cos()).abs() < 1e-6, "t={t}");
            assert!((x[8] - t.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn rk4_norm_conservation() {
        let grid = GridSpec::new(&[8], &[1.0]).unwrap();
        let params = PhysicalParams::nondimensional(8, -0.1);
        let sys = build_system_1d(&grid, &params).unwrap();
        let k = -2.0 * std::f64::consts::PI / 8.0;
        let mut x0 = vec![0.0; 16];
        for j in 0..8 {
            x0[j] = (k * j as f64).sin();
        }
        let n0: f64 = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let traj = rk4_integrate(&sys, &x0, 1e-3, 100_000, 10_000).unwrap();
        let (t_end, x_end) = traj.last().unwrap();
        assert_eq!(*t_end, 100.0);
        let n1: f64 = x_end.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n1 - n0).abs() < 1e-8);
    }

    #[test]
    fn rk4_self_convergence_order() {
        let grid = GridSpec::new(&[8], &[1.0]).unwrap();
        let params = PhysicalParams::nondimensional(8, -0.1);
        let sys = build_system_1d(&grid, &params).unwrap();
        let k = -2.0 * std::f64::consts::PI / 8.0;
        let mut x0 = vec![0.0; 16];
        for j in 0..8 {
            x0[j] = (k * j as f64).sin();
        }
        let t_end = 2.0;
        let reference = rk4_integrate(&sys, &x0, t_end / 512.0, 512, 512).unwrap().pop().unwrap().1;
        let err = |nsteps: usize| -> f64 {
            let x = rk4_integrate(&sys, &x0, t_end / nsteps as f64, nsteps, nsteps)
                .unwrap()
                .pop()
                .unwrap()
                .1;
            x.iter().zip(&reference).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        };
        let (e1, e2) = (err(16), err(32));
        let order = (e1 / e2).log2();
        assert!((3.7..=4.3).contains(&order), "observed order {order}");
    }

    #[test]
    #[ignore]
    fn truncation_error_sweep() {
        // scratch: map KvN-vs-RK4 disagreement over (m, amplitude, lambda)
        let grid = GridSpec::new(&[5], &[1.0]).unwrap();
        let params = PhysicalParams::nondimensional(5, -1.0);
        let sys = build_system_1d(&grid, &params).unwrap();
        let t = 2.0 * std::f64::consts::PI;
        for &scale in &[1.0, 0.3, 0.1] {
            for m in 2..=4u32 {
                for &lam in &[1e4, 1e5, 1e6] {
                    let h = assemble(&sys, m, lam).unwrap();
                    let mut x0 = vec![0.0; 10];
                    for j in 0..5 {
                        x0[j] = scale * (0.3 + j as f64 * 0.7).sin();
                    }
                    let psi0 = KvnState::encode(&x0, lam, &h.basis).unwrap();
                    let kvn = evolve_expm(&h, &psi0, t, &ExpmConfig::auto(h.dim())).unwrap();
                    let xk = kvn.decode().unwrap();
                    let steps = (t / 1e-3) as usize;
                    let xc = rk4_integrate(&sys, &x0, t / steps as f64, steps, steps)
                        .unwrap()
                        .pop()
                        .unwrap()
                        .1;
                    let err = xk
                        .iter()
                        .zip(&xc)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max);
                    println!("scale={scale} m={m} lam={lam:.0e}: max err {err:.3e}");
                }
            }
        }
    }

    #[test]
    fn linearization_oracle_large_lambda() {
        // Λ = 10⁴ suppresses the cubic couplings: the lifted evolution must
        // track the classical integrator through one oscillation period.
        let grid = GridSpec::new(&[5], &[1.0]).unwrap();
        let params = PhysicalParams::nondimensional(5, -1.0);
        let sys = build_system_1d(&grid, &params).unwrap();
        let lam = 1e4;
        let h = assemble(&sys, 3, lam).unwrap();
        let mut x0 = vec![0.0; 10];
        for j in 0..5 {
            x0[j] = 0.1 * (0.3 + j as f64 * 0.7).sin();
        }
        let psi0 = KvnState::encode(&x0, lam, &h.basis).unwrap();
        let t = 2.0 * std::f64::consts::PI;
        let kvn = evolve_expm(&h, &psi0, t, &ExpmConfig::auto(h.dim())).unwrap();
        let xk = kvn.decode().unwrap();
        let steps = (t / 1e-3) as usize;
        let xc = rk4_integrate(&sys, &x0, t / steps as f64, steps, steps).unwrap().pop().unwrap().1;
        for (a, b) in xk.iter().zip(&xc) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }
}
