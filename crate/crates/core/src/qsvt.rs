//! Polynomial Hamiltonian simulation at the matrix level: truncated
//! Jacobi-Anger expansions of cos(Hτ/α) and sin(Hτ/α) applied through a
//! single interleaved Chebyshev sweep, plus the associated error and
//! stability budgets.

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::state::KvnState;
use num_complex::Complex64;

/// Bessel J_0..J_n(τ) by Miller's backward recurrence, normalized with
/// J_0 + 2·Σ J_{2k} = 1. Negative arguments go through J_k(−τ) = (−1)^k J_k(τ).
pub fn bessel_j_sequence(tau: f64, n_max: usize) -> Result<Vec<f64>> {
    if !tau.is_finite() {
        return Err(Error::Parameter(format!("non-finite Bessel argument {tau}")));
    }
    let at = tau.abs();
    if at == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    // start far enough above both the order and the argument for the
    // downward recurrence to have converged to the minimal solution
    let start = n_max.max(at.ceil() as usize) + 50 + (2.0 * at.sqrt()) as usize;
    let mut jp1 = 0.0f64;
    let mut j = 1e-300f64;
    let mut out = vec![0.0; n_max + 1];
    let mut norm = 0.0f64; // J_0 + 2 Σ_{k even >0} J_k
    for k in (0..=start).rev() {
        let jm1 = (2.0 * (k + 1) as f64 / at) * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
        // after the shift, `j` holds J_k and `jp1` holds J_{k+1}
        if k <= n_max {
            out[k] = j;
        }
        if k > 0 && k % 2 == 0 {
            norm += 2.0 * j;
        }
    }
    norm += j; // k = 0 term
    let sign_flip = tau < 0.0;
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if sign_flip && k % 2 == 1 {
            *v = -*v;
        }
    }
    Ok(out)
}

/// Chebyshev coefficients of the degree-(2R+1) Jacobi-Anger truncations:
/// cos(xτ) ≈ J_0(τ) + Σ 2(−1)^k J_{2k}(τ) T_{2k}(x),
/// sin(xτ) ≈ Σ 2(−1)^k J_{2k+1}(τ) T_{2k+1}(x).
#[derive(Debug, Clone, PartialEq)]
pub struct QsvtPlan {
    pub tau: f64,
    pub r: usize,
    /// Normalization the operator is divided by; must dominate its norm.
    pub alpha: f64,
    /// cos coefficients for T_0, T_2, ..., T_{2R}.
    pub cos_coeffs: Vec<f64>,
    /// sin coefficients for T_1, T_3, ..., T_{2R+1}.
    pub sin_coeffs: Vec<f64>,
}

pub fn jacobi_anger_coefficients(tau: f64, r: usize, alpha: f64) -> Result<QsvtPlan> {
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!("normalization must be positive, got {alpha}")));
    }
    let j = bessel_j_sequence(tau, 2 * r + 1)?;
    let mut cos_coeffs = Vec::with_capacity(r + 1);
    let mut sin_coeffs = Vec::with_capacity(r + 1);
    cos_coeffs.push(j[0]);
    for k in 1..=r {
        let s = if k % 2 == 0 { 2.0 } else { -2.0 };
        cos_coeffs.push(s * j[2 * k]);
    }
    for k in 0..=r {
        let s = if k % 2 == 0 { 2.0 } else { -2.0 };
        sin_coeffs.push(s * j[2 * k + 1]);
    }
    Ok(QsvtPlan { tau, r, alpha, cos_coeffs, sin_coeffs })
}

impl QsvtPlan {
    /// Scalar evaluation of P_R^cos(x) − i·P_R^sin(x) (for x = h/α this
    /// approximates exp(−i·h·τ/α)).
    pub fn eval_scalar(&self, x: f64) -> Complex64 {
        let mut t_prev = 1.0f64;
        let mut t_cur = x;
        let mut cos_acc = self.cos_coeffs[0];
        let mut sin_acc = self.sin_coeffs[0] * t_cur;
        for k in 2..=2 * self.r + 1 {
            let t_next = 2.0 * x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
            if k % 2 == 0 {
                cos_acc += self.cos_coeffs[k / 2] * t_cur;
            } else {
                sin_acc += self.sin_coeffs[(k - 1) / 2] * t_cur;
            }
        }
        Complex64::new(cos_acc, -sin_acc)
    }
}

/// (P_R^cos − i·P_R^sin)(H/α)·ψ through one interleaved Chebyshev recurrence:
/// exactly 2R+1 operator applications.
pub fn chebyshev_apply(h: &SparseHamiltonian, psi: &KvnState, plan: &QsvtPlan) -> Result<KvnState> {
    let d = h.dim();
    if psi.amplitudes.len() != d {
        return Err(Error::LengthMismatch { expected: d, got: psi.amplitudes.len() });
    }
    let inv_a = 1.0 / plan.alpha;
    let mut t_prev: Vec<Complex64> = psi.amplitudes.clone();
    let mut t_cur = vec![Complex64::default(); d];
    h.apply(&t_prev, &mut t_cur);
    for z in t_cur.iter_mut() {
        *z *= inv_a;
    }
    let mut acc: Vec<Complex64> = t_prev
        .iter()
        .zip(&t_cur)
        .map(|(p, c)| {
            p * Complex64::new(plan.cos_coeffs[0], 0.0) + c * Complex64::new(0.0, -plan.sin_coeffs[0])
        })
        .collect();
    let mut scratch = vec![Complex64::default(); d];
    for k in 2..=2 * plan.r + 1 {
        h.apply(&t_cur, &mut scratch);
        for i in 0..d {
            let t_next = 2.0 * inv_a * scratch[i] - t_prev[i];
            t_prev[i] = t_cur[i];
            t_cur[i] = t_next;
        }
        let coeff = if k % 2 == 0 {
            Complex64::new(plan.cos_coeffs[k / 2], 0.0)
        } else {
            Complex64::new(0.0, -plan.sin_coeffs[(k - 1) / 2])
        };
        for (a, t) in acc.iter_mut().zip(&t_cur) {
            *a += coeff * t;
        }
    }
    Ok(KvnState { basis: psi.basis.clone(), amplitudes: acc, lambda: psi.lambda })
}

/// Iterated polynomial evolution: N_t steps, each advancing real time
/// Δt = τ/α. With `renormalize` the state is reset to unit norm per step
/// (successful post-selection); without it the norm may drift and collapse
/// below 1e-6 is a divergence error. `on_step(step, state)` is invoked after
/// every step (and for step 0).
pub fn evolve_qsvt(
    h: &SparseHamiltonian,
    psi0: &KvnState,
    n_t: usize,
    plan: &QsvtPlan,
    renormalize: bool,
    mut on_step: impl FnMut(usize, &KvnState),
) -> Result<KvnState> {
    let mut psi = psi0.clone();
    on_step(0, &psi);
    for step in 1..=n_t {
        psi = chebyshev_apply(h, &psi, plan)?;
        if renormalize {
            psi.normalize();
        } else if psi.norm() < 1e-6 {
            return Err(Error::Divergence(format!("state norm collapsed at step {step}")));
        }
        on_step(step, &psi);
    }
    Ok(psi)
}

/// Hamiltonian-simulation truncation bound for degree-(2R+1) Jacobi-Anger:
/// (5/4)(e|αT|/(4(R+1)))^{2R+2} + (5/4)(e|αT|/(2(2R+3)))^{2R+3}.
pub fn qsvt_error_bound(alpha: f64, t: f64, r: usize) -> f64 {
    let at = (alpha * t).abs();
    let e = std::f64::consts::E;
    let rr = r as f64;
    1.25 * (e * at / (4.0 * (rr + 1.0))).powi(2 * r as i32 + 2)
        + 1.25 * (e * at / (2.0 * (2.0 * rr + 3.0))).powi(2 * r as i32 + 3)
}

/// Truncation-order budget (CN_x/Λ)^e + 2/(6^e·e!) with e = ⌈(m−1)/3⌉.
/// The value is vacuous (≥ 1) when m is too small for a guarantee; the flag
/// reports whether Λ meets the validity floor.
pub struct KvnBound {
    pub value: f64,
    pub lambda_floor_met: bool,
}

pub fn kvn_truncation_bound(c_const: f64, n_x: usize, lambda: f64, m: u32, c: usize, t: f64) -> KvnBound {
    let e = (m as f64 - 1.0) / 3.0;
    let e = e.ceil().max(0.0);
    let first = (c_const * n_x as f64 / lambda).powf(e);
    let fact: f64 = (1..=(e as u64)).map(|k| k as f64).product();
    let second = 2.0 / (6f64.powf(e) * fact.max(1.0));
    KvnBound {
        value: first + second,
        lambda_floor_met: lambda >= lambda_floor(c_const, n_x, c, t, m),
    }
}

/// Λ validity floor 2^{−1/2}·3³·(CN_x)²·c·T·m³.
pub fn lambda_floor(c_const: f64, n_x: usize, c: usize, t: f64, m: u32) -> f64 {
    27.0 * (c_const * n_x as f64).powi(2) * c as f64 * t * (m as f64).powi(3)
        / 2f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityBinding {
    RescaleBranch,
    PolynomialBranch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub satisfied: bool,
    /// min(branches) − N_x·T (positive when satisfied).
    pub margin: f64,
    pub binding: StabilityBinding,
}

/// CFL-analogue: N_x·T < min(√2·Λ/(3³C²N_x·c·m³), √2·(R+1)/(3e·C·c·m^{5/2})).
pub fn stability_check(
    c_const: f64,
    c: usize,
    m: u32,
    lambda: f64,
    r: usize,
    n_x: usize,
    t: f64,
) -> StabilityReport {
    let mf = m as f64;
    let branch1 = 2f64.sqrt() * lambda / (27.0 * c_const.powi(2) * n_x as f64 * c as f64 * mf.powi(3));
    let branch2 = 2f64.sqrt() * (r as f64 + 1.0)
        / (3.0 * std::f64::consts::E * c_const * c as f64 * mf.powf(2.5));
    let (limit, binding) = if branch1 <= branch2 {
        (branch1, StabilityBinding::RescaleBranch)
    } else {
        (branch2, StabilityBinding::PolynomialBranch)
    };
    let lhs = n_x as f64 * t;
    StabilityReport { satisfied: lhs < limit, margin: limit - lhs, binding }
}
