//! Closed-form results for `N` identical pure TLS.
//!
//! After the pairwise chain succeeds, every surviving basis state with `k`
//! grounds carries the same weight `p^{N−k}(1−p)^k`, and there are
//! `C(N−k+1, k)` of them (no two grounds adjacent). Summing over `k` up to the
//! cutoff `t` gives the success probability, the final energy and the final
//! coherence exactly. The small-`p` approximations of those sums and the
//! reference formulas for the global protocol and for optimal distillation
//! are collected here as fast evaluators and as oracles for the simulator.

use num_integer::binomial;

use crate::{Error, Result};

/// Counts length-`n` strings with `k` grounds, no two adjacent.
pub type GroundCounter = fn(u64, u64) -> u64;

/// Largest ground count compatible with the chain: `(N+1)/2` for odd `N`,
/// `N/2` for even `N`.
pub fn cutoff(n: u64) -> u64 {
    if n % 2 == 1 {
        n.div_ceil(2)
    } else {
        n / 2
    }
}

/// `C(n−k+1, k)` for `k ≤ t`, else 0.
pub fn count_no_adjacent_ground(n: u64, k: u64) -> u64 {
    if k > n || k > cutoff(n) {
        0
    } else {
        binomial(n - k + 1, k)
    }
}

/// Index bookkeeping of the exact sums for one `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolCombinatorics {
    pub n: u64,
    pub t: u64,
}

impl ProtocolCombinatorics {
    pub fn new(n: u64) -> Self {
        ProtocolCombinatorics { n, t: cutoff(n) }
    }

    /// Number of surviving basis states with `k` grounds.
    pub fn count(&self, k: u64) -> u64 {
        count_no_adjacent_ground(self.n, k)
    }

    /// Total number of surviving basis states.
    pub fn mask_size(&self) -> u64 {
        (0..=self.t).map(|k| self.count(k)).sum()
    }
}

/// Terms `(multiplicity, weight, N − 2k)` of the exact sums.
///
/// The `k = 0, 1` terms use `C(N, k)` and the rest use `counter`, mirroring
/// the two displayed sums; the counter is injectable so that a perturbed
/// combinatorial factor can be fed through the whole pipeline.
#[derive(Debug, Clone)]
pub struct ChainSums {
    n: u64,
    terms: Vec<(f64, f64, f64)>,
}

impl ChainSums {
    pub fn new(n: u64, p: f64) -> Self {
        Self::with_counter(n, p, count_no_adjacent_ground)
    }

    pub fn with_counter(n: u64, p: f64, counter: GroundCounter) -> Self {
        let t = cutoff(n);
        let terms = (0..=t.max(1).min(n))
            .map(|k| {
                let mult = if k <= 1 {
                    binomial(n, k)
                } else {
                    counter(n, k)
                };
                let w = p.powi((n - k) as i32) * (1.0 - p).powi(k as i32);
                (mult as f64, w, n as f64 - 2.0 * k as f64)
            })
            .collect();
        ChainSums { n, terms }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn success_probability(&self) -> f64 {
        self.terms.iter().map(|&(m, w, _)| m * w).sum()
    }

    fn checked_ps(&self) -> Result<f64> {
        let ps = self.success_probability();
        if ps > 0.0 {
            Ok(ps)
        } else {
            Err(Error::ProtocolImpossible(ps))
        }
    }

    pub fn final_energy(&self, energy_gap: f64) -> Result<f64> {
        let ps = self.checked_ps()?;
        let sum: f64 = self.terms.iter().map(|&(m, w, d)| m * d * w).sum();
        Ok(energy_gap / (2.0 * ps) * sum)
    }

    pub fn final_coherence(&self) -> Result<f64> {
        let ps = self.checked_ps()?;
        Ok(self
            .terms
            .iter()
            .filter(|&&(_, w, _)| w > 0.0)
            .map(|&(m, w, _)| {
                let q = w / ps;
                -m * q * q.ln()
            })
            .sum())
    }
}

/// Exact success probability of the pairwise chain.
pub fn ps_exact(n: u64, p: f64) -> f64 {
    ChainSums::new(n, p).success_probability()
}

/// Exact final energy; `ProtocolImpossible` at `p = 0`.
pub fn ef_exact(n: u64, p: f64, energy_gap: f64) -> Result<f64> {
    ChainSums::new(n, p).final_energy(energy_gap)
}

/// Exact final coherence in nats; `ProtocolImpossible` at `p = 0`.
pub fn cf_exact(n: u64, p: f64) -> Result<f64> {
    ChainSums::new(n, p).final_coherence()
}

fn is_even(n: u64) -> bool {
    n.is_multiple_of(2)
}

/// `p^{(N−1)/2}` (odd) or `(N/2+1) p^{N/2}` (even).
pub fn approx_ps(n: u64, p: f64) -> f64 {
    if is_even(n) {
        (n as f64 / 2.0 + 1.0) * p.powi((n / 2) as i32)
    } else {
        p.powi(((n - 1) / 2) as i32)
    }
}

/// `(N−1)/2` (odd) or `N/2 − N(20−N)p/24` (even), in gap units.
pub fn approx_de(n: u64, p: f64) -> f64 {
    let nf = n as f64;
    if is_even(n) {
        nf / 2.0 - nf * (20.0 - nf) / 24.0 * p
    } else {
        (nf - 1.0) / 2.0
    }
}

/// `(N−1)(N−3)/8 (1−ln p) p` (odd) or `ln(N/2+1) − N(20−N)/24 (1−ln p) p` (even).
pub fn approx_dc(n: u64, p: f64) -> f64 {
    let nf = n as f64;
    let x = (1.0 - p.ln()) * p;
    if is_even(n) {
        (nf / 2.0 + 1.0).ln() - nf * (20.0 - nf) / 24.0 * x
    } else {
        (nf - 1.0) * (nf - 3.0) / 8.0 * x
    }
}

fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}

/// Even `N` only:
/// `ln(N/2+1) + N(N+4)/24 (1−ln p) p − ln[3/2 (N/2+1)!] p`.
pub fn approx_dcm(n: u64, p: f64) -> Result<f64> {
    if !is_even(n) {
        return Err(Error::UnsupportedBranch(
            "mutual-coherence approximation exists for even N only",
        ));
    }
    let nf = n as f64;
    let half = n / 2 + 1;
    Ok(
        (half as f64).ln() + nf * (nf + 4.0) / 24.0 * (1.0 - p.ln()) * p
            - (1.5f64.ln() + ln_factorial(half)) * p,
    )
}

/// Small-`p` approximations for the single global projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalApprox {
    pub ps: f64,
    pub de: f64,
    pub dc: f64,
    /// `None` for `N = 2`, where the formula divides by `N − 2`.
    pub dcm: Option<f64>,
}

pub fn global_approx_ps(n: u64, p: f64) -> f64 {
    n as f64 * p
}

pub fn global_approx_de(n: u64, p: f64) -> f64 {
    1.0 - (n as f64 + 1.0) / 2.0 * p
}

pub fn global_approx_dc(n: u64, p: f64) -> f64 {
    let nf = n as f64;
    nf.ln() - (nf + 1.0) / 2.0 * (1.0 - p.ln()) * p
}

pub fn global_approx_dcm(n: u64, p: f64) -> Result<f64> {
    if n <= 2 {
        return Err(Error::UnsupportedBranch(
            "global mutual-coherence approximation needs N >= 3",
        ));
    }
    let nf = n as f64;
    Ok(nf.ln() + (nf - 1.0) / 2.0 * (1.0 - p.ln()) * p
        - (nf - 1.0).powi(2) / (nf - 2.0) * (nf - 1.0).ln() * p)
}

pub fn global_approx(n: u64, p: f64) -> GlobalApprox {
    GlobalApprox {
        ps: global_approx_ps(n, p),
        de: global_approx_de(n, p),
        dc: global_approx_dc(n, p),
        dcm: global_approx_dcm(n, p).ok(),
    }
}

/// Coherence gain and success probability of optimal distillation towards
/// the maximally coherent state of the same register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalComparison {
    /// `N [ln 2 − p(1 − ln p)]`.
    pub dc_opt: f64,
    /// `(2p)^N`.
    pub ps_opt: f64,
}

pub fn optimal_comparison(n: u64, p: f64) -> OptimalComparison {
    let nf = n as f64;
    OptimalComparison {
        dc_opt: nf * (std::f64::consts::LN_2 - p * (1.0 - p.ln())),
        ps_opt: (2.0 * p).powi(n as i32),
    }
}

/// Region of `(N, p)` where an approximation is claimed to hold to `rel_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximationBand {
    pub n_max: u64,
    pub p_max: f64,
    pub rel_tol: f64,
}

impl ApproximationBand {
    pub fn contains(&self, n: u64, p: f64) -> bool {
        n <= self.n_max && p <= self.p_max
    }

    pub fn holds(&self, approx: f64, exact: f64) -> bool {
        relative_deviation(approx, exact) <= self.rel_tol
    }
}

/// `|approx / exact − 1|`.
pub fn relative_deviation(approx: f64, exact: f64) -> f64 {
    (approx / exact - 1.0).abs()
}
