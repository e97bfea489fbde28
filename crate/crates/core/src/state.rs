//! Amplitude vectors over the truncated Fock basis: encoding classical
//! variable vectors into Hermite-expansion amplitudes and decoding them back.

use crate::error::{Error, Result};
use crate::fock::TruncatedFockBasis;
use num_complex::Complex64;
use std::io::Write;

/// Decode refuses below this vacuum amplitude: the state carries no usable
/// reference amplitude and the ratio read-out would be pure noise. The
/// threshold is far below any physical value because at Λ ~ 10⁴ the vacuum
/// amplitude of a legitimately encoded state is itself ~10⁻²⁰.
pub const VACUUM_FLOOR: f64 = 1e-250;

#[derive(Debug, Clone, PartialEq)]
pub struct KvnState {
    pub basis: TruncatedFockBasis,
    pub amplitudes: Vec<Complex64>,
    pub lambda: f64,
}

/// h_k(y) = H̄_k(y)/H̄_0: ratio of orthonormal Hermite polynomials, so
/// h_0 = 1, h_1 = √2·y, h_{k+1} = y√(2/(k+1))·h_k − √(k/(k+1))·h_{k−1}.
fn hermite_ratios(y: f64, m: u32) -> Vec<f64> {
    let mut h = Vec::with_capacity(m as usize + 1);
    h.push(1.0);
    if m >= 1 {
        h.push(2f64.sqrt() * y);
    }
    for k in 1..m as u64 {
        let kf = k as f64;
        let next = y * (2.0 / (kf + 1.0)).sqrt() * h[k as usize]
            - (kf / (kf + 1.0)).sqrt() * h[k as usize - 1];
        h.push(next);
    }
    h
}

impl KvnState {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for z in self.amplitudes.iter_mut() {
                *z /= n;
            }
        }
    }

    /// amplitude(occ) ∝ Π_{n_j>0} h_{n_j}(Λ·x0_j), unit-normalized; the
    /// global Gaussian weight is a scalar and is absorbed by normalization
    /// (it underflows at Λ ~ 10⁴ if evaluated directly).
    pub fn encode(x0: &[f64], lambda: f64, basis: &TruncatedFockBasis) -> Result<KvnState> {
        if lambda < 1.0 {
            return Err(Error::Parameter(format!("rescale parameter must be >= 1, got {lambda}")));
        }
        if x0.len() != basis.n_modes() {
            return Err(Error::LengthMismatch { expected: basis.n_modes(), got: x0.len() });
        }
        let m = basis.truncation_order();
        let ratios: Vec<Vec<f64>> = x0.iter().map(|&x| hermite_ratios(lambda * x, m)).collect();
        let mut amplitudes = Vec::with_capacity(basis.dim() as usize);
        for occ in basis.iter() {
            let mut a = 1.0;
            for (j, &n) in occ.0.iter().enumerate() {
                if n > 0 {
                    a *= ratios[j][n as usize];
                }
            }
            amplitudes.push(Complex64::new(a, 0.0));
        }
        let mut st = KvnState { basis: basis.clone(), amplitudes, lambda };
        st.normalize();
        Ok(st)
    }

    /// x_j = Re[amp(e_j)/(√2·Λ·amp(vacuum))] with the global phase rotated so
    /// the vacuum amplitude is real positive; also returns the largest
    /// imaginary residue of the ratios as a diagnostic.
    pub fn decode_with_residual(&self) -> Result<(Vec<f64>, f64)> {
        let a0 = self.amplitudes[0];
        let mag0 = a0.norm();
        if mag0 <= VACUUM_FLOOR {
            return Err(Error::DecodeDegeneracy(mag0));
        }
        let n = self.basis.n_modes();
        let scale = 1.0 / (2f64.sqrt() * self.lambda * mag0 * mag0);
        let mut x = Vec::with_capacity(n);
        let mut residual = 0.0f64;
        for j in 0..n {
            // singles occupy indices 1..=N in rank order
            let z = self.amplitudes[1 + j] * a0.conj() * scale;
            x.push(z.re);
            residual = residual.max(z.im.abs());
        }
        Ok((x, residual))
    }

    pub fn decode(&self) -> Result<Vec<f64>> {
        Ok(self.decode_with_residual()?.0)
    }

    /// ‖decode(state)‖₂.
    pub fn l2_of_decoded(&self) -> Result<f64> {
        let x = self.decode()?;
        Ok(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &KvnState) -> Result<Complex64> {
        if self.basis != other.basis {
            return Err(Error::Contract("overlap of states over different bases".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Debug snapshot: index, sparse occupancy string, re, im.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,occupancy,re,im")?;
        for (i, occ) in self.basis.iter().enumerate() {
            let occ_s: Vec<String> = occ
                .0
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(j, &c)| format!("{j}:{c}"))
                .collect();
            writeln!(
                w,
                "{i},{},{:.16e},{:.16e}",
                occ_s.join(";"),
                self.amplitudes[i].re,
                self.amplitudes[i].im
            )?;
        }
        Ok(())
    }
}
