//! Truncated KvN Hamiltonian assembly: the ODE system is lifted to
//! H = Σ_j Σ_{p∋j} (α_{p→j}/Λ^{|p|−2}) k̂_j Π_{l∈p\{j}} x̂_l and projected
//! onto total occupation ≤ m, stored column-compressed.

use crate::error::{Error, Result};
use crate::fock::{OccupancyVector, TruncatedFockBasis};
use crate::model::OdeSystem;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::io::{BufRead, Write};

pub const PRUNE_REL: f64 = 1e-15;
/// Default assembly memory cap in bytes (entry storage only).
pub const DEFAULT_MEMORY_CAP: usize = 4 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// Truncating ladder action on an occupancy vector: create returns
/// (occ+e_j, √(n_j+1)) or None past the truncation order; annihilate returns
/// (occ−e_j, √n_j) or None on an empty mode.
pub fn ladder_apply(
    occ: &OccupancyVector,
    m: u32,
    mode: usize,
    kind: LadderKind,
) -> Option<(OccupancyVector, f64)> {
    let n = occ.0[mode] as u32;
    match kind {
        LadderKind::Create => {
            if occ.total() + 1 > m {
                return None;
            }
            let mut out = occ.clone();
            out.0[mode] += 1;
            Some((out, ((n + 1) as f64).sqrt()))
        }
        LadderKind::Annihilate => {
            if n == 0 {
                return None;
            }
            let mut out = occ.clone();
            out.0[mode] -= 1;
            Some((out, (n as f64).sqrt()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Position,
    Momentum,
}

/// One Hamiltonian term coeff·k̂_{momentum_mode}·Π x̂_{position_modes}.
#[derive(Debug, Clone)]
struct Term {
    coeff: f64,
    ops: Vec<(u32, Op)>, // distinct modes; exactly one Momentum
}

/// The truncated KvN Hamiltonian as a Hermitian CSC matrix with norm metadata.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    pub basis: TruncatedFockBasis,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<u32>,
    pub values: Vec<Complex64>,
    pub lambda: f64,
    pub eta: f64,
    /// Largest entry magnitude.
    pub a_max: f64,
    /// Structural per-column sparsity bound m·c·2^d.
    pub s_col: usize,
}

/// max |α_{p→j}/Λ^{|p|−2}| over all couplings.
pub fn eta(sys: &OdeSystem, lambda: f64) -> Result<f64> {
    if lambda < 1.0 {
        return Err(Error::Parameter(format!("rescale parameter must be >= 1, got {lambda}")));
    }
    let mut best = 0.0f64;
    for ia in &sys.interactions {
        let scale = lambda.powi(ia.indices.len() as i32 - 2);
        for &a in &ia.alphas {
            best = best.max(a.abs() / scale);
        }
    }
    Ok(best)
}

fn terms_of(sys: &OdeSystem, lambda: f64) -> Vec<(Vec<u32>, Vec<Term>)> {
    sys.interactions
        .iter()
        .map(|ia| {
            let modes: Vec<u32> = ia.indices.iter().map(|&j| j as u32).collect();
            let scale = lambda.powi(ia.indices.len() as i32 - 2);
            let terms = ia
                .indices
                .iter()
                .zip(&ia.alphas)
                .filter(|&(_, &a)| a != 0.0)
                .map(|(&j, &a)| Term {
                    coeff: a / scale,
                    ops: ia
                        .indices
                        .iter()
                        .map(|&l| (l as u32, if l == j { Op::Momentum } else { Op::Position }))
                        .collect(),
                })
                .collect();
            (modes, terms)
        })
        .collect()
}

/// Assemble H_m = P_m H P_m column by column.
///
/// A column only receives contributions from interactions that touch one of
/// its occupied modes: for a fully disjoint interaction the only surviving
/// branch creates every member mode once, and those contributions carry an
/// identical ladder constant multiplied by Σ_j α_{p→j} = 0, cancelling
/// exactly in floating point because the couplings are stored as ±a pairs.
pub fn assemble(sys: &OdeSystem, m: u32, lambda: f64) -> Result<SparseHamiltonian> {
    assemble_with_cap(sys, m, lambda, DEFAULT_MEMORY_CAP)
}

pub fn assemble_with_cap(
    sys: &OdeSystem,
    m: u32,
    lambda: f64,
    memory_cap: usize,
) -> Result<SparseHamiltonian> {
    if lambda < 1.0 {
        return Err(Error::Parameter(format!("rescale parameter must be >= 1, got {lambda}")));
    }
    let basis = TruncatedFockBasis::new(sys.n_vars, m)?;
    let dim = basis.dim() as usize;
    let s_col = (m as usize) * sys.c * (1usize << sys.d);
    let estimate = dim.saturating_mul(s_col).saturating_mul(20);
    if estimate > memory_cap.saturating_mul(4) {
        // worst-case structural bound; actual fill is far sparser, so only
        // refuse when even a quarter of the bound cannot fit
        return Err(Error::Capacity(format!(
            "Hamiltonian storage estimate {estimate} B exceeds cap {memory_cap} B"
        )));
    }
    let interactions = terms_of(sys, lambda);
    // mode -> interaction ids touching it
    let mut incidence: Vec<Vec<u32>> = vec![Vec::new(); sys.n_vars];
    for (t, (modes, _)) in interactions.iter().enumerate() {
        for &mo in modes {
            incidence[mo as usize].push(t as u32);
        }
    }

    let mut col_ptr = Vec::with_capacity(dim + 1);
    let mut row_idx: Vec<u32> = Vec::new();
    let mut values: Vec<Complex64> = Vec::new();
    col_ptr.push(0);
    let mut a_max = 0.0f64;

    let mut touched: Vec<u32> = Vec::new();
    let mut scratch: Vec<(u64, Complex64)> = Vec::new();
    let mut out_occ: Vec<(usize, u32)> = Vec::new();
    for col in 0..dim as u64 {
        let occ = basis.unrank(col)?;
        let sparse: Vec<(usize, u32)> = occ
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, &c)| (j, c as u32))
            .collect();
        touched.clear();
        for &(mo, _) in &sparse {
            touched.extend_from_slice(&incidence[mo]);
        }
        touched.sort_unstable();
        touched.dedup();

        scratch.clear();
        for &t in &touched {
            for term in &interactions[t as usize].1 {
                apply_term(&basis, &sparse, term, m, &mut out_occ, &mut scratch)?;
            }
        }
        scratch.sort_unstable_by_key(|&(r, _)| r);
        let mut i = 0;
        while i < scratch.len() {
            let row = scratch[i].0;
            let mut v = scratch[i].1;
            let mut j = i + 1;
            while j < scratch.len() && scratch[j].0 == row {
                v += scratch[j].1;
                j += 1;
            }
            if v.norm_sqr() > 0.0 {
                row_idx.push(row as u32);
                values.push(v);
                a_max = a_max.max(v.norm());
            }
            i = j;
        }
        col_ptr.push(row_idx.len());
        if values.len() * 20 > memory_cap {
            return Err(Error::Capacity(format!(
                "Hamiltonian storage exceeded cap {memory_cap} B during assembly"
            )));
        }
    }

    let mut h = SparseHamiltonian {
        basis,
        col_ptr,
        row_idx,
        values,
        lambda,
        eta: eta(sys, lambda)?,
        a_max,
        s_col,
    };
    h.prune(PRUNE_REL * a_max);
    Ok(h)
}

/// Expand one term over its 2^{|ops|} create/annihilate branches.
fn apply_term(
    basis: &TruncatedFockBasis,
    col_occ: &[(usize, u32)],
    term: &Term,
    m: u32,
    out_occ: &mut Vec<(usize, u32)>,
    scratch: &mut Vec<(u64, Complex64)>,
) -> Result<()> {
    let nops = term.ops.len();
    let total: u32 = col_occ.iter().map(|&(_, c)| c).sum();
    let count_of = |mode: u32| -> u32 {
        col_occ
            .iter()
            .find(|&&(mo, _)| mo == mode as usize)
            .map_or(0, |&(_, c)| c)
    };
    'branch: for mask in 0..1u32 << nops {
        let mut amp_re = term.coeff;
        let mut phase_i = false; // accumulate one factor of ±i from k̂
        let mut neg = false;
        let mut delta_total: i32 = 0;
        for (b, &(mode, op)) in term.ops.iter().enumerate() {
            let create = mask & (1 << b) != 0;
            let n = count_of(mode);
            if !create && n == 0 {
                continue 'branch;
            }
            let mag = if create { ((n + 1) as f64).sqrt() } else { (n as f64).sqrt() };
            amp_re *= mag * std::f64::consts::FRAC_1_SQRT_2;
            match op {
                Op::Position => {}
                Op::Momentum => {
                    // k̂ = (â − â†)/(√2 i): annihilate → −i, create → +i
                    phase_i = true;
                    if !create {
                        neg = !neg;
                    }
                }
            }
            delta_total += if create { 1 } else { -1 };
        }
        let new_total = total as i32 + delta_total;
        if new_total < 0 || new_total as u32 > m {
            continue;
        }
        debug_assert!(phase_i, "every term carries exactly one momentum factor");
        // merge deltas into the sparse occupancy
        out_occ.clear();
        out_occ.extend_from_slice(col_occ);
        for (b, &(mode, _)) in term.ops.iter().enumerate() {
            let create = mask & (1 << b) != 0;
            let d: i32 = if create { 1 } else { -1 };
            match out_occ.binary_search_by_key(&(mode as usize), |&(mo, _)| mo) {
                Ok(pos) => {
                    let c = out_occ[pos].1 as i32 + d;
                    if c == 0 {
                        out_occ.remove(pos);
                    } else {
                        out_occ[pos].1 = c as u32;
                    }
                }
                Err(pos) => {
                    debug_assert!(d > 0);
                    out_occ.insert(pos, (mode as usize, 1));
                }
            }
        }
        let row = basis.rank_sparse(out_occ)?;
        let amp = Complex64::new(0.0, if neg { -amp_re } else { amp_re });
        scratch.push((row, amp));
    }
    Ok(())
}

impl SparseHamiltonian {
    pub fn dim(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn max_col_nnz(&self) -> usize {
        self.col_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Drop entries with magnitude ≤ `threshold`.
    pub fn prune(&mut self, threshold: f64) {
        if threshold <= 0.0 {
            return;
        }
        let mut w = 0;
        let mut new_ptr = vec![0usize; 1];
        for col in 0..self.dim() {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                if self.values[k].norm() > threshold {
                    self.row_idx[w] = self.row_idx[k];
                    self.values[w] = self.values[k];
                    w += 1;
                }
            }
            new_ptr.push(w);
        }
        self.row_idx.truncate(w);
        self.values.truncate(w);
        self.col_ptr = new_ptr;
    }

    /// y = H·x (dense complex vectors).
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        y.fill(Complex64::new(0.0, 0.0));
        for col in 0..self.dim() {
            let xc = x[col];
            if xc.norm_sqr() == 0.0 {
                continue;
            }
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                y[self.row_idx[k] as usize] += self.values[k] * xc;
            }
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let lo = self.col_ptr[col];
        let hi = self.col_ptr[col + 1];
        match self.row_idx[lo..hi].binary_search(&(row as u32)) {
            Ok(k) => self.values[lo + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// max |H_ij − conj(H_ji)| over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for col in 0..self.dim() {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                let row = self.row_idx[k] as usize;
                let mirror = self.entry(col, row);
                worst = worst.max((self.values[k] - mirror.conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Power iteration on H² (robust to the ±λ pairing of these operators),
    /// relative tolerance 1e-6. The returned value is certified from below by
    /// a Rayleigh quotient of an explicit vector.
    pub fn spectral_norm_estimate(&self) -> Result<f64> {
        let d = self.dim();
        if self.nnz() == 0 {
            return Ok(0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5BEC);
        let mut v: Vec<Complex64> =
            (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        normalize(&mut v);
        let mut hv = vec![Complex64::default(); d];
        let mut h2v = vec![Complex64::default(); d];
        let mut prev = 0.0f64;
        for it in 0..5000 {
            self.apply(&v, &mut hv);
            let norm_hv = norm(&hv);
            if norm_hv == 0.0 {
                // H annihilates this vector; restart from a fresh direction
                for z in v.iter_mut() {
                    *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
                normalize(&mut v);
                continue;
            }
            self.apply(&hv, &mut h2v);
            let lam2 = norm(&h2v) / norm_hv; // ‖H²v‖/‖Hv‖ → λ_max²
            let est = lam2.sqrt();
            if it > 2 && (est - prev).abs() <= 1e-6 * est.max(1e-300) {
                return Ok(est.max(norm_hv)); // norm_hv = ‖Hv‖/‖v‖ is a lower bound
            }
            prev = est;
            v.copy_from_slice(&h2v);
            normalize(&mut v);
        }
        Err(Error::Numerical(format!(
            "spectral norm power iteration did not converge; best bracket [{prev:.6e}, ?]"
        )))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let d = self.dim();
        let mut m = nalgebra::DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for col in 0..d {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                m[(self.row_idx[k] as usize, col)] = self.values[k];
            }
        }
        m
    }

    pub fn from_dense(basis: TruncatedFockBasis, m: &nalgebra::DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != basis.dim() as usize || m.ncols() != basis.dim() as usize {
            return Err(Error::LengthMismatch { expected: basis.dim() as usize, got: m.nrows() });
        }
        let d = m.nrows();
        let mut col_ptr = vec![0usize];
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        let mut a_max = 0.0f64;
        let mut s_col = 0;
        for col in 0..d {
            let mut cnt = 0;
            for row in 0..d {
                let v = m[(row, col)];
                if v.norm_sqr() > 0.0 {
                    row_idx.push(row as u32);
                    values.push(v);
                    a_max = a_max.max(v.norm());
                    cnt += 1;
                }
            }
            s_col = s_col.max(cnt);
            col_ptr.push(row_idx.len());
        }
        Ok(SparseHamiltonian {
            basis,
            col_ptr,
            row_idx,
            values,
            lambda: 1.0,
            eta: a_max,
            a_max,
            s_col,
        })
    }

    /// Matrix Market coordinate complex general, 17 significant digits.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(w, "{} {} {}", self.dim(), self.dim(), self.nnz())?;
        for col in 0..self.dim() {
            for k in self.col_ptr[col]..self.col_ptr[col + 1] {
                writeln!(
                    w,
                    "{} {} {:.16e} {:.16e}",
                    self.row_idx[k] + 1,
                    col + 1,
                    self.values[k].re,
                    self.values[k].im
                )?;
            }
        }
        Ok(())
    }

    pub fn read_matrix_market<R: BufRead>(basis: TruncatedFockBasis, r: R) -> Result<Self> {
        let bad = |what: &str| Error::Config(format!("matrix market: {what}"));
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad("empty input"))?
            .map_err(|e| Error::io("<matrix market>", e))?;
        if !header.starts_with("%%MatrixMarket matrix coordinate complex") {
            return Err(bad("unsupported header"));
        }
        let mut dims: Option<(usize, usize, usize)> = None;
        let mut trips: Vec<(u32, u32, Complex64)> = Vec::new();
        for line in lines {
            let line = line.map_err(|e| Error::io("<matrix market>", e))?;
            let s = line.trim();
            if s.is_empty() || s.starts_with('%') {
                continue;
            }
            let f: Vec<&str> = s.split_whitespace().collect();
            if dims.is_none() {
                if f.len() != 3 {
                    return Err(bad("malformed size line"));
                }
                dims = Some((
                    f[0].parse().map_err(|_| bad("bad row count"))?,
                    f[1].parse().map_err(|_| bad("bad col count"))?,
                    f[2].parse().map_err(|_| bad("bad nnz"))?,
                ));
                continue;
            }
            if f.len() != 4 {
                return Err(bad("malformed entry line"));
            }
            let i: usize = f[0].parse().map_err(|_| bad("bad row"))?;
            let j: usize = f[1].parse().map_err(|_| bad("bad col"))?;
            let re: f64 = f[2].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = f[3].parse().map_err(|_| bad("bad imaginary part"))?;
            trips.push(((i - 1) as u32, (j - 1) as u32, Complex64::new(re, im)));
        }
        let (nr, nc, nnz) = dims.ok_or_else(|| bad("missing size line"))?;
        if nr != nc || nr != basis.dim() as usize || trips.len() != nnz {
            return Err(bad("size mismatch"));
        }
        trips.sort_unstable_by_key(|&(r0, c0, _)| (c0, r0));
        let mut col_ptr = vec![0usize];
        let mut row_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        let mut a_max = 0.0f64;
        let mut s_col = 0;
        let mut k = 0;
        for col in 0..nc as u32 {
            let start = row_idx.len();
            while k < trips.len() && trips[k].1 == col {
                row_idx.push(trips[k].0);
                values.push(trips[k].2);
                a_max = a_max.max(trips[k].2.norm());
                k += 1;
            }
            s_col = s_col.max(row_idx.len() - start);
            col_ptr.push(row_idx.len());
        }
        Ok(SparseHamiltonian {
            basis,
            col_ptr,
            row_idx,
            values,
            lambda: 1.0,
            eta: a_max,
            a_max,
            s_col,
        })
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}
