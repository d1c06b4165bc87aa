//! TLS Hamiltonians and the product input states fed to the protocol.

use num_integer::binomial;

use crate::linalg::{
    self, c64, check_density_matrix, excitation_count, register_dim, tls_is_excited, CMatrix,
    CVector, C64,
};
use crate::{Error, Result};

/// Environment variable overriding the dense-storage cap on `N`.
pub const MAX_TLS_ENV: &str = "COHERENCE_SYNTH_MAX_TLS";
pub const DEFAULT_MAX_TLS: usize = 14;

const NORM_TOL: f64 = 1e-12;

/// Largest `N` accepted anywhere in the crate.
pub fn max_tls() -> usize {
    std::env::var(MAX_TLS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_TLS)
}

/// Number of TLS and their common energy gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec {
    n: usize,
    energy_gap: f64,
}

impl SystemSpec {
    pub fn new(n: usize, energy_gap: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one TLS".into()));
        }
        let cap = max_tls();
        if n > cap {
            return Err(Error::ResourceLimit {
                what: "dense state",
                n,
                cap,
            });
        }
        if !(energy_gap.is_finite() && energy_gap > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "energy gap must be positive, got {energy_gap}"
            )));
        }
        Ok(SystemSpec { n, energy_gap })
    }

    /// Energies in units of the gap.
    pub fn with_unit_gap(n: usize) -> Result<Self> {
        Self::new(n, 1.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energy_gap(&self) -> f64 {
        self.energy_gap
    }

    pub fn dim(&self) -> usize {
        register_dim(self.n)
    }
}

/// Excitation probability `p` and dephasing survival factor `epsilon` of one TLS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TlsParams {
    pub p: f64,
    pub epsilon: f64,
}

impl TlsParams {
    pub fn new(p: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!(
                "epsilon = {epsilon} outside [0, 1]"
            )));
        }
        Ok(TlsParams { p, epsilon })
    }

    pub fn pure(p: f64) -> Result<Self> {
        Self::new(p, 1.0)
    }

    /// `n` identical copies.
    pub fn uniform(n: usize, p: f64, epsilon: f64) -> Result<Vec<Self>> {
        Ok(vec![Self::new(p, epsilon)?; n])
    }

    /// Single-TLS density matrix in the `(g, e)` basis.
    pub fn density_matrix(&self) -> CMatrix {
        let coh = self.epsilon * (self.p * (1.0 - self.p)).sqrt();
        CMatrix::from_row_slice(2, 2, &[c64(1.0 - self.p), c64(coh), c64(coh), c64(self.p)])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Pure(CVector),
    Mixed(CMatrix),
}

/// A state of `n` TLS in the energy eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    repr: Representation,
}

impl QuantumState {
    /// Pure state; amplitudes must have unit norm within `1e-12`.
    pub fn pure(n: usize, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != register_dim(n) {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for {} TLS",
                amplitudes.len(),
                n
            )));
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sq} differs from 1"
            )));
        }
        Ok(Self::pure_unchecked(n, amplitudes))
    }

    /// Density matrix; must be Hermitian, PSD and unit-trace within `1e-10`.
    pub fn mixed(n: usize, rho: CMatrix) -> Result<Self> {
        if !rho.is_square() || rho.nrows() != register_dim(n) {
            return Err(Error::InvalidArgument(format!(
                "matrix of shape {:?} for {} TLS",
                rho.shape(),
                n
            )));
        }
        check_density_matrix(&rho)?;
        Ok(Self::mixed_unchecked(n, rho))
    }

    pub(crate) fn pure_unchecked(n: usize, amplitudes: CVector) -> Self {
        QuantumState {
            n,
            repr: Representation::Pure(amplitudes),
        }
    }

    pub(crate) fn mixed_unchecked(n: usize, rho: CMatrix) -> Self {
        QuantumState {
            n,
            repr: Representation::Mixed(rho),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        register_dim(self.n)
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Representation::Pure(_))
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn density_matrix(&self) -> CMatrix {
        match &self.repr {
            Representation::Pure(psi) => linalg::outer(psi),
            Representation::Mixed(rho) => rho.clone(),
        }
    }

    /// Same state, stored as a density matrix.
    pub fn to_mixed(&self) -> QuantumState {
        QuantumState::mixed_unchecked(self.n, self.density_matrix())
    }

    /// Diagonal of the density matrix.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Representation::Pure(psi) => psi.iter().map(|a| a.norm_sqr()).collect(),
            Representation::Mixed(rho) => rho.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    /// Reduced `2×2` state of TLS `tls` (1-based), without forming the full
    /// density matrix for pure states.
    pub fn single_tls_marginal(&self, tls: usize) -> Result<CMatrix> {
        if tls == 0 || tls > self.n {
            return Err(Error::InvalidArgument(format!(
                "TLS index {tls} outside 1..={}",
                self.n
            )));
        }
        let flip = 1usize << (self.n - tls);
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        match &self.repr {
            Representation::Pure(psi) => {
                for i in (0..self.dim()).filter(|i| i & flip == 0) {
                    let g = psi[i];
                    let e = psi[i | flip];
                    m[0][0] += g * g.conj();
                    m[0][1] += g * e.conj();
                    m[1][1] += e * e.conj();
                }
            }
            Representation::Mixed(rho) => {
                for i in (0..self.dim()).filter(|i| i & flip == 0) {
                    m[0][0] += rho[(i, i)];
                    m[0][1] += rho[(i, i | flip)];
                    m[1][1] += rho[(i | flip, i | flip)];
                }
            }
        }
        Ok(CMatrix::from_row_slice(
            2,
            2,
            &[m[0][0], m[0][1], m[0][1].conj(), m[1][1]],
        ))
    }
}

/// Diagonal energies of the `N`-TLS Hamiltonian, `(E/2)(2 n_e − N)`.
pub fn energy_levels(spec: &SystemSpec) -> Vec<f64> {
    let n = spec.n() as f64;
    (0..spec.dim())
        .map(|i| 0.5 * spec.energy_gap() * (2.0 * excitation_count(i) as f64 - n))
        .collect()
}

pub fn hamiltonian(spec: &SystemSpec) -> CMatrix {
    linalg::diag(&energy_levels(spec))
}

fn check_len(spec: &SystemSpec, params: &[TlsParams]) -> Result<()> {
    if params.len() != spec.n() {
        return Err(Error::InvalidArgument(format!(
            "{} TLS parameter sets for N = {}",
            params.len(),
            spec.n()
        )));
    }
    Ok(())
}

/// `⊗_j (√p_j |e⟩ + √(1−p_j) |g⟩)`; `epsilon` is ignored.
pub fn pure_product_state(spec: &SystemSpec, params: &[TlsParams]) -> Result<QuantumState> {
    check_len(spec, params)?;
    let n = spec.n();
    let amp_e: Vec<f64> = params.iter().map(|t| t.p.sqrt()).collect();
    let amp_g: Vec<f64> = params.iter().map(|t| (1.0 - t.p).sqrt()).collect();
    let psi = CVector::from_iterator(
        spec.dim(),
        (0..spec.dim()).map(|i| {
            c64((1..=n)
                .map(|j| {
                    if tls_is_excited(i, j, n) {
                        amp_e[j - 1]
                    } else {
                        amp_g[j - 1]
                    }
                })
                .product())
        }),
    );
    let norm = psi.norm();
    Ok(QuantumState::pure_unchecked(n, psi / c64(norm)))
}

/// `⊗_j ρ_j` with populations `(1−p_j, p_j)` and coherences `ε_j √(p_j(1−p_j))`.
pub fn mixed_product_state(spec: &SystemSpec, params: &[TlsParams]) -> Result<QuantumState> {
    check_len(spec, params)?;
    let rho = params
        .iter()
        .map(TlsParams::density_matrix)
        .reduce(|acc, m| linalg::kron(&acc, &m))
        .expect("n >= 1");
    Ok(QuantumState::mixed_unchecked(spec.n(), rho))
}

/// `E_0 = (N E / 2)(2p − 1)` for `N` identical TLS.
pub fn initial_energy(spec: &SystemSpec, p: f64) -> f64 {
    0.5 * spec.n() as f64 * spec.energy_gap() * (2.0 * p - 1.0)
}

/// Binary entropy `h(p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    crate::linalg::shannon_entropy([p, 1.0 - p])
}

/// Coherence of `N` identical pure TLS from the binomial population sum
/// `−Σ_k C(N,k) p^{N−k}(1−p)^k ln[p^{N−k}(1−p)^k]`.
pub fn initial_coherence(spec: &SystemSpec, p: f64) -> f64 {
    let n = spec.n() as u64;
    (0..=n)
        .map(|k| {
            let w = p.powi((n - k) as i32) * (1.0 - p).powi(k as i32);
            if w > 0.0 {
                -(binomial(n, k) as f64) * w * w.ln()
            } else {
                0.0
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, max_abs_diff, outer};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_tls_hamiltonian_orders_ground_first() {
        let spec = SystemSpec::new(1, 2.0).unwrap();
        assert_eq!(hamiltonian(&spec), diag(&[-1.0, 1.0]));
    }

    #[test]
    fn two_tls_hamiltonian() {
        let spec = SystemSpec::with_unit_gap(2).unwrap();
        assert_eq!(hamiltonian(&spec), diag(&[-1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn ground_energy_is_minus_n_half() {
        for n in 1..=8 {
            let spec = SystemSpec::new(n, 1.5).unwrap();
            assert_abs_diff_eq!(energy_levels(&spec)[0], -(n as f64) * 1.5 / 2.0);
        }
    }

    #[test]
    fn spec_rejects_oversized_and_degenerate() {
        assert!(matches!(
            SystemSpec::with_unit_gap(DEFAULT_MAX_TLS + 1),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(SystemSpec::with_unit_gap(0).is_err());
        assert!(SystemSpec::new(2, 0.0).is_err());
        assert!(TlsParams::new(1.1, 1.0).is_err());
        assert!(TlsParams::new(0.5, -0.1).is_err());
    }

    #[test]
    fn pure_state_limits() {
        let spec = SystemSpec::with_unit_gap(3).unwrap();
        let ground = pure_product_state(&spec, &TlsParams::uniform(3, 0.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(ground.populations()[0], 1.0);
        let top = pure_product_state(&spec, &TlsParams::uniform(3, 1.0, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(top.populations()[7], 1.0);
    }

    #[test]
    fn two_tls_amplitudes() {
        let spec = SystemSpec::with_unit_gap(2).unwrap();
        let s = pure_product_state(&spec, &TlsParams::uniform(2, 0.1, 1.0).unwrap()).unwrap();
        let Representation::Pure(psi) = s.representation() else {
            panic!("expected pure state")
        };
        // Indices gg, ge, eg, ee.
        let expected = [0.9, 0.3, 0.3, 0.1];
        for (a, e) in psi.iter().zip(expected) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn param_length_mismatch() {
        let spec = SystemSpec::with_unit_gap(3).unwrap();
        let params = TlsParams::uniform(2, 0.1, 1.0).unwrap();
        assert!(pure_product_state(&spec, &params).is_err());
        assert!(mixed_product_state(&spec, &params).is_err());
    }

    #[test]
    fn mixed_state_reduces_to_pure_at_unit_epsilon() {
        let spec = SystemSpec::with_unit_gap(3).unwrap();
        let params = [
            TlsParams::new(0.1, 1.0).unwrap(),
            TlsParams::new(0.3, 1.0).unwrap(),
            TlsParams::new(0.05, 1.0).unwrap(),
        ];
        let pure = pure_product_state(&spec, &params).unwrap();
        let mixed = mixed_product_state(&spec, &params).unwrap();
        assert!(max_abs_diff(&pure.density_matrix(), &mixed.density_matrix()) < 1e-12);
    }

    #[test]
    fn mixed_state_zero_epsilon_is_diagonal() {
        let spec = SystemSpec::with_unit_gap(2).unwrap();
        let s = mixed_product_state(&spec, &TlsParams::uniform(2, 0.2, 0.0).unwrap()).unwrap();
        let rho = s.density_matrix();
        assert_eq!(rho, crate::linalg::dephase_full(&rho));
    }

    #[test]
    fn single_tls_dephased_matrix() {
        let spec = SystemSpec::with_unit_gap(1).unwrap();
        let s = mixed_product_state(&spec, &[TlsParams::new(0.1, 0.5).unwrap()]).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c64(0.9), c64(0.15), c64(0.15), c64(0.1)]);
        assert!(max_abs_diff(&s.density_matrix(), &expected) < 1e-15);
    }

    #[test]
    fn initial_energy_examples() {
        assert_abs_diff_eq!(
            initial_energy(&SystemSpec::with_unit_gap(5).unwrap(), 0.5),
            0.0
        );
        assert_abs_diff_eq!(
            initial_energy(&SystemSpec::with_unit_gap(4).unwrap(), 0.0),
            -2.0
        );
        assert_abs_diff_eq!(
            initial_energy(&SystemSpec::with_unit_gap(3).unwrap(), 0.1),
            -1.2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn initial_coherence_matches_n_binary_entropies() {
        assert_abs_diff_eq!(
            initial_coherence(&SystemSpec::with_unit_gap(3).unwrap(), 0.0),
            0.0
        );
        assert_abs_diff_eq!(
            initial_coherence(&SystemSpec::with_unit_gap(1).unwrap(), 0.5),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
        // h(0.1) = 0.325082973391448...
        let spec = SystemSpec::with_unit_gap(4).unwrap();
        assert_abs_diff_eq!(
            initial_coherence(&spec, 0.1),
            1.300_331_893_565_79,
            epsilon = 1e-12
        );
        for n in 1..=10 {
            let spec = SystemSpec::with_unit_gap(n).unwrap();
            for p in [0.005, 0.05, 0.3, 0.7, 0.99] {
                assert_abs_diff_eq!(
                    initial_coherence(&spec, p),
                    n as f64 * binary_entropy(p),
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn marginals_match_outer_product_route() {
        let spec = SystemSpec::with_unit_gap(3).unwrap();
        let params = [
            TlsParams::new(0.2, 0.7).unwrap(),
            TlsParams::new(0.4, 0.9).unwrap(),
            TlsParams::new(0.05, 1.0).unwrap(),
        ];
        let pure = pure_product_state(&spec, &params).unwrap();
        let mixed = mixed_product_state(&spec, &params).unwrap();
        for tls in 1..=3 {
            let via_trace = crate::linalg::partial_trace(
                &outer(match pure.representation() {
                    Representation::Pure(psi) => psi,
                    _ => unreachable!(),
                }),
                &[tls],
                3,
            )
            .unwrap();
            assert!(max_abs_diff(&pure.single_tls_marginal(tls).unwrap(), &via_trace) < 1e-14);
            assert!(
                max_abs_diff(
                    &mixed.single_tls_marginal(tls).unwrap(),
                    &params[tls - 1].density_matrix()
                ) < 1e-14
            );
        }
    }
}
