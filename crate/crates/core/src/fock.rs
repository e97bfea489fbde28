//! Bounded-total-occupation Fock space combinatorics: the order `≺`, the
//! closed-form rank map, its greedy inverse, and dimension counting.
//!
//! All indices are 0-based throughout the crate.

use crate::error::{Error, Result};
use std::cmp::Ordering;

/// Occupation numbers for the N bosonic modes of one basis state.
///
/// Entries are stored as `u8`; every truncation order used in practice is
/// tiny (m ≤ 4) and the basis constructor rejects m > 255.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupancyVector(pub Vec<u8>);

impl OccupancyVector {
    pub fn vacuum(n_modes: usize) -> Self {
        OccupancyVector(vec![0; n_modes])
    }

    pub fn single(n_modes: usize, mode: usize) -> Self {
        let mut v = vec![0; n_modes];
        v[mode] = 1;
        OccupancyVector(v)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Exact binomial coefficient with overflow detection.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or_else(|| Error::Overflow(format!("binomial({n},{k})")))?;
        acc /= i as u128; // exact: product of i consecutive integers is divisible by i!
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("binomial({n},{k})")))
}

/// Count of occupancy vectors of length `n_modes` with total ≤ `m`.
pub fn dimension(n_modes: u64, m: u64) -> Result<u64> {
    if n_modes == 0 {
        return Err(Error::Parameter("mode count must be positive".into()));
    }
    binomial(n_modes + m, m)
}

/// The order `≺`: primary key total occupation, tie-break right-to-left.
pub fn compare(a: &OccupancyVector, b: &OccupancyVector) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), got: b.len() });
    }
    match a.total().cmp(&b.total()) {
        Ordering::Equal => {}
        ord => return Ok(ord),
    }
    // Highest index where the entries differ decides; equal suffix above it.
    for k in (0..a.len()).rev() {
        match a.0[k].cmp(&b.0[k]) {
            Ordering::Equal => {}
            ord => return Ok(ord),
        }
    }
    Ok(Ordering::Equal)
}

/// The truncated Fock basis: N modes, total occupation ≤ m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedFockBasis {
    n_modes: usize,
    truncation_order: u32,
    dim: u64,
}

impl TruncatedFockBasis {
    pub fn new(n_modes: usize, truncation_order: u32) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::Parameter("mode count must be positive".into()));
        }
        if truncation_order > u8::MAX as u32 {
            return Err(Error::Parameter(format!(
                "truncation order {truncation_order} exceeds the supported occupancy width"
            )));
        }
        let dim = dimension(n_modes as u64, truncation_order as u64)?;
        Ok(TruncatedFockBasis { n_modes, truncation_order, dim })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    /// First index of the total-K sector.
    pub fn sector_start(&self, k: u32) -> Result<u64> {
        let n = self.n_modes as u64;
        binomial(n + k as u64 - 1, n)
    }

    pub fn admits(&self, occ: &OccupancyVector) -> bool {
        occ.len() == self.n_modes && occ.total() <= self.truncation_order
    }

    /// Position of `occ` in `≺`-sorted order, by the closed form:
    /// 0 for vacuum, else C(N+K−1, N) + Σ_{k=1}^{N−1} Σ_{j=0}^{n_k−1}
    /// C(K − Σ_{l>k} n_l − j + k − 1, k−1).
    pub fn rank(&self, occ: &OccupancyVector) -> Result<u64> {
        if occ.len() != self.n_modes {
            return Err(Error::LengthMismatch { expected: self.n_modes, got: occ.len() });
        }
        let total = occ.total();
        if total > self.truncation_order {
            return Err(Error::TruncationViolation { total, m: self.truncation_order });
        }
        if total == 0 {
            return Ok(0);
        }
        let n = self.n_modes as u64;
        let k_total = total as i64;
        let mut rank = binomial(n + k_total as u64 - 1, n)?;
        let mut suffix: i64 = 0; // Σ_{l>k} n_l
        for k in (1..self.n_modes).rev() {
            let nk = occ.0[k] as i64;
            for j in 0..nk {
                let top = k_total - suffix - j + k as i64 - 1;
                if top >= 0 {
                    rank = rank
                        .checked_add(binomial(top as u64, k as u64 - 1)?)
                        .ok_or_else(|| Error::Overflow("rank accumulation".into()))?;
                }
            }
            suffix += nk;
        }
        Ok(rank)
    }

    /// Inverse of [`rank`]: greedy sector walk, no inverse table.
    pub fn unrank(&self, idx: u64) -> Result<OccupancyVector> {
        if idx >= self.dim {
            return Err(Error::IndexOutOfRange { index: idx, dim: self.dim });
        }
        // Locate the total-occupation sector.
        let mut k_total = 0u32;
        while k_total < self.truncation_order && self.sector_start(k_total + 1)? <= idx {
            k_total += 1;
        }
        let mut within = idx - self.sector_start(k_total)?;
        // Inside the sector the order is lexicographic on (n_{N-1}, ..., n_1),
        // smaller entries first; n_0 absorbs the remainder.
        let mut occ = vec![0u8; self.n_modes];
        let mut rem = k_total as u64;
        for k in (1..self.n_modes).rev() {
            for v in 0..=rem {
                // states with n_k = v: compositions of rem - v into k parts
                let cnt = binomial(rem - v + k as u64 - 1, k as u64 - 1)?;
                if within < cnt {
                    occ[k] = v as u8;
                    rem -= v;
                    break;
                }
                within -= cnt;
            }
        }
        occ[0] = rem as u8;
        Ok(OccupancyVector(occ))
    }

    /// [`rank`] from a sparse occupancy list: sorted ascending mode indices
    /// with strictly positive counts. Cost is O(#entries) binomials instead
    /// of O(N), which matters when columns are assembled at N ~ 10³.
    pub fn rank_sparse(&self, entries: &[(usize, u32)]) -> Result<u64> {
        let n = self.n_modes as u64;
        let mut total = 0u32;
        for w in entries.windows(2) {
            debug_assert!(w[0].0 < w[1].0, "entries must be sorted by mode");
        }
        for &(mode, cnt) in entries {
            if mode >= self.n_modes {
                return Err(Error::IndexOutOfRange { index: mode as u64, dim: n });
            }
            debug_assert!(cnt > 0);
            total += cnt;
        }
        if total > self.truncation_order {
            return Err(Error::TruncationViolation { total, m: self.truncation_order });
        }
        if total == 0 {
            return Ok(0);
        }
        let k_total = total as i64;
        let mut rank = binomial(n + k_total as u64 - 1, n)?;
        let mut suffix: i64 = 0;
        for &(mode, cnt) in entries.iter().rev() {
            if mode == 0 {
                break;
            }
            for j in 0..cnt as i64 {
                let top = k_total - suffix - j + mode as i64 - 1;
                if top >= 0 {
                    rank = rank
                        .checked_add(binomial(top as u64, mode as u64 - 1)?)
                        .ok_or_else(|| Error::Overflow("rank accumulation".into()))?;
                }
            }
            suffix += cnt as i64;
        }
        Ok(rank)
    }

    /// Iterate all admitted occupancy vectors in rank order.
    pub fn iter(&self) -> impl Iterator<Item = OccupancyVector> + '_ {
        (0..self.dim).map(move |i| self.unrank(i).expect("index in range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: enumerate all vectors with total ≤ m and sort by ≺.
    fn brute_sorted(n: usize, m: u32) -> Vec<OccupancyVector> {
        fn gen(n: usize, m: u32) -> Vec<Vec<u8>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..=m {
                for mut rest in gen(n - 1, m - first) {
                    let mut v = vec![first as u8];
                    v.append(&mut rest);
                    out.push(v);
                }
            }
            out
        }
        let mut all: Vec<OccupancyVector> = gen(n, m).into_iter().map(OccupancyVector).collect();
        all.sort_by(|a, b| compare(a, b).unwrap());
        all
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension(16, 1).unwrap(), 17);
        assert_eq!(dimension(2, 2).unwrap(), 6);
        // cross-check against brute enumeration at small N plus the binomial form
        for n in 1..=6u64 {
            for m in 0..=4u32 {
                assert_eq!(
                    dimension(n, m as u64).unwrap(),
                    brute_sorted(n as usize, m).len() as u64
                );
            }
        }
        assert_eq!(dimension(2000, 2).unwrap(), 2003001);
    }

    #[test]
    fn dimension_overflow_detected() {
        assert!(matches!(dimension(u64::MAX / 2, 3), Err(Error::Overflow(_))));
    }

    #[test]
    fn compare_examples() {
        let v = |s: &[u8]| OccupancyVector(s.to_vec());
        assert_eq!(compare(&v(&[1, 0]), &v(&[0, 1])).unwrap(), Ordering::Less);
        assert_eq!(compare(&v(&[0, 0]), &v(&[0, 0])).unwrap(), Ordering::Equal);
        assert_eq!(compare(&v(&[2, 0]), &v(&[1, 1])).unwrap(), Ordering::Less);
        assert!(compare(&v(&[1, 0]), &v(&[0, 0, 1])).is_err());
    }

    #[test]
    fn rank_examples() {
        let basis = TruncatedFockBasis::new(2, 2).unwrap();
        assert_eq!(basis.rank(&OccupancyVector::vacuum(2)).unwrap(), 0);
        assert_eq!(basis.rank(&OccupancyVector(vec![1, 1])).unwrap(), 4);
        assert_eq!(basis.rank(&OccupancyVector(vec![0, 2])).unwrap(), 5);
        assert!(matches!(
            basis.rank(&OccupancyVector(vec![2, 1])),
            Err(Error::TruncationViolation { .. })
        ));
    }

    #[test]
    fn unrank_examples() {
        let basis = TruncatedFockBasis::new(2, 2).unwrap();
        assert_eq!(basis.unrank(0).unwrap(), OccupancyVector::vacuum(2));
        assert_eq!(basis.unrank(4).unwrap(), OccupancyVector(vec![1, 1]));
        // D-1 is the ≺-maximal vector (0,...,0,m)
        assert_eq!(basis.unrank(basis.dim() - 1).unwrap(), OccupancyVector(vec![0, 2]));
        assert!(basis.unrank(basis.dim()).is_err());
    }

    #[test]
    fn rank_matches_brute_force_order() {
        for n in 1..=6 {
            for m in 0..=4 {
                let basis = TruncatedFockBasis::new(n, m).unwrap();
                let sorted = brute_sorted(n, m);
                assert_eq!(sorted.len() as u64, basis.dim());
                for (i, occ) in sorted.iter().enumerate() {
                    assert_eq!(basis.rank(occ).unwrap(), i as u64, "n={n} m={m} occ={occ:?}");
                    assert_eq!(&basis.unrank(i as u64).unwrap(), occ);
                }
            }
        }
    }

    #[test]
    fn sector_start_layout() {
        let basis = TruncatedFockBasis::new(5, 4).unwrap();
        for k in 1..=4u32 {
            let start = basis.sector_start(k).unwrap();
            let occ = basis.unrank(start).unwrap();
            assert_eq!(occ.total(), k);
            if start > 0 {
                assert_eq!(basis.unrank(start - 1).unwrap().total(), k - 1);
            }
        }
    }

    #[test]
    fn single_excitation_rank_is_one_plus_mode() {
        let basis = TruncatedFockBasis::new(9, 3).unwrap();
        for j in 0..9 {
            assert_eq!(basis.rank(&OccupancyVector::single(9, j)).unwrap(), 1 + j as u64);
        }
    }

    #[test]
    fn large_case_rank_roundtrip() {
        // Case-D-scale basis: N=2000, m=2
        let basis = TruncatedFockBasis::new(2000, 2).unwrap();
        assert_eq!(basis.dim(), 2003001);
        for idx in [0u64, 1, 1999, 2000, 2003000, 1234567] {
            let occ = basis.unrank(idx).unwrap();
            assert_eq!(basis.rank(&occ).unwrap(), idx);
        }
    }

    #[test]
    fn rank_sparse_matches_dense() {
        for (n, m) in [(4usize, 3u32), (9, 2), (2000, 2)] {
            let basis = TruncatedFockBasis::new(n, m).unwrap();
            let probe = [0u64, 1, basis.dim() / 3, basis.dim() / 2, basis.dim() - 1];
            for &idx in &probe {
                let occ = basis.unrank(idx).unwrap();
                let sparse: Vec<(usize, u32)> = occ
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(j, &c)| (j, c as u32))
                    .collect();
                assert_eq!(basis.rank_sparse(&sparse).unwrap(), idx);
            }
        }
    }

    proptest! {
        #[test]
        fn bijection_random(n in 1usize..8, m in 0u32..5, seed in 0u64..1_000_000) {
            let basis = TruncatedFockBasis::new(n, m).unwrap();
            let idx = seed % basis.dim();
            let occ = basis.unrank(idx).unwrap();
            prop_assert_eq!(basis.rank(&occ).unwrap(), idx);
        }

        #[test]
        fn rank_monotone_wrt_order(n in 1usize..7, m in 0u32..5, a in 0u64..10_000, b in 0u64..10_000) {
            let basis = TruncatedFockBasis::new(n, m).unwrap();
            let (ia, ib) = (a % basis.dim(), b % basis.dim());
            let (oa, ob) = (basis.unrank(ia).unwrap(), basis.unrank(ib).unwrap());
            let ord = compare(&oa, &ob).unwrap();
            prop_assert_eq!(ord, ia.cmp(&ib));
        }
    }
}
