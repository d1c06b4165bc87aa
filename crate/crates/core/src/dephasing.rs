//! Local dephasing of each TLS, before or after the protocol.
//!
//! One TLS with survival factor `ε` maps `ρ → K₀ρK₀ + K₁ρK₁` with
//! `K₀ = √((1+ε)/2)·I` and `K₁ = √((1−ε)/2)·σ_z`, which scales its coherence
//! by `ε`. On `N` TLS the element `ρ_ij` is therefore scaled by the product
//! of `ε_k` over the TLS `k` on which basis states `i` and `j` differ.

use crate::linalg::{c64, kron, register_dim, CMatrix};
use crate::states::QuantumState;
use crate::{Error, Result};

/// Largest `N` for the explicit Kraus-sum oracle.
pub const KRAUS_ORACLE_MAX_TLS: usize = 10;

/// Per-TLS survival factors applied before (`pre`) and after (`post`) the
/// protocol. An empty list means no dephasing at that stage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DephasingSpec {
    pub pre: Vec<f64>,
    pub post: Vec<f64>,
}

impl DephasingSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(pre: Vec<f64>, post: Vec<f64>) -> Self {
        DephasingSpec { pre, post }
    }

    /// The same factor on every TLS at each requested stage.
    pub fn uniform(n: usize, pre: Option<f64>, post: Option<f64>) -> Result<Self> {
        let spec = DephasingSpec {
            pre: pre.map(|e| vec![e; n]).unwrap_or_default(),
            post: post.map(|e| vec![e; n]).unwrap_or_default(),
        };
        spec.validate(n)?;
        Ok(spec)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (stage, eps) in [("pre", &self.pre), ("post", &self.post)] {
            if !eps.is_empty() {
                check_eps(eps, n).map_err(|e| match e {
                    Error::InvalidArgument(msg) => {
                        Error::InvalidArgument(format!("{stage}-dephasing: {msg}"))
                    }
                    other => other,
                })?;
            }
        }
        Ok(())
    }
}

fn check_eps(eps: &[f64], n: usize) -> Result<()> {
    if eps.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} dephasing factors for N = {}",
            eps.len(),
            n
        )));
    }
    if let Some(bad) = eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Error::InvalidArgument(format!(
            "dephasing factor {bad} outside [0, 1]"
        )));
    }
    Ok(())
}

/// `factors[d]` is the product of `ε_k` over TLS whose bit is set in `d`.
fn difference_factors(eps: &[f64]) -> Vec<f64> {
    let n = eps.len();
    let mut factors = vec![1.0; register_dim(n)];
    for d in 1..factors.len() {
        let low = d.trailing_zeros() as usize;
        // bit `low` belongs to TLS n - low
        factors[d] = factors[d & (d - 1)] * eps[n - 1 - low];
    }
    factors
}

/// Apply independent dephasing `eps[k-1]` to TLS `k`.
///
/// A pure input stays pure only when every factor is 1; otherwise the result
/// is a density matrix.
pub fn dephase_local(state: &QuantumState, eps: &[f64]) -> Result<QuantumState> {
    let n = state.n();
    check_eps(eps, n)?;
    if eps.iter().all(|&e| e == 1.0) {
        return Ok(state.clone());
    }
    let factors = difference_factors(eps);
    let mut rho = state.density_matrix();
    let dim = state.dim();
    for j in 0..dim {
        for i in 0..dim {
            rho[(i, j)] *= factors[i ^ j];
        }
    }
    Ok(QuantumState::mixed_unchecked(n, rho))
}

fn local_kraus(eps: f64) -> [CMatrix; 2] {
    let a = ((1.0 + eps) / 2.0).sqrt();
    let b = ((1.0 - eps) / 2.0).sqrt();
    [
        CMatrix::from_row_slice(2, 2, &[c64(a), c64(0.0), c64(0.0), c64(a)]),
        CMatrix::from_row_slice(2, 2, &[c64(b), c64(0.0), c64(0.0), c64(-b)]),
    ]
}

/// Reference channel built from all `2^N` global Kraus operators.
///
/// Operator `i` is `K_{j_{N−1}} ⊗ … ⊗ K_{j_0}` where `(j_{N−1} … j_0)` is
/// the binary expansion of `i`; the leftmost factor acts on TLS 1. Costs
/// `O(2^N · 8^N)`, so it is capped at [`KRAUS_ORACLE_MAX_TLS`].
pub fn kraus_oracle(state: &QuantumState, eps: &[f64]) -> Result<QuantumState> {
    let n = state.n();
    if n > KRAUS_ORACLE_MAX_TLS {
        return Err(Error::ResourceLimit {
            what: "Kraus-sum oracle",
            n,
            cap: KRAUS_ORACLE_MAX_TLS,
        });
    }
    check_eps(eps, n)?;
    let local: Vec<[CMatrix; 2]> = eps.iter().map(|&e| local_kraus(e)).collect();
    let rho = state.density_matrix();
    let dim = state.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..register_dim(n) {
        let op = (1..=n)
            .map(|tls| local[tls - 1][(i >> (n - tls)) & 1].clone())
            .reduce(|a, b| kron(&a, &b))
            .expect("n >= 1");
        out += &op * &rho * op.adjoint();
    }
    Ok(QuantumState::mixed_unchecked(n, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dephase_full, max_abs_diff, trace};
    use crate::measures::rel_entropy_coherence;
    use crate::states::{mixed_product_state, pure_product_state, SystemSpec, TlsParams};
    use approx::assert_abs_diff_eq;

    fn pure(n: usize, p: f64) -> QuantumState {
        let spec = SystemSpec::with_unit_gap(n).unwrap();
        pure_product_state(&spec, &TlsParams::uniform(n, p, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn unit_factors_leave_state_alone() {
        let s = pure(3, 0.2);
        assert_eq!(dephase_local(&s, &[1.0; 3]).unwrap(), s);
    }

    #[test]
    fn zero_factors_fully_dephase() {
        let s = pure(3, 0.2);
        let d = dephase_local(&s, &[0.0; 3]).unwrap();
        assert_eq!(d.density_matrix(), dephase_full(&s.density_matrix()));
        assert_eq!(rel_entropy_coherence(&d).unwrap(), 0.0);
    }

    #[test]
    fn single_qubit_matches_hand_kraus_sum() {
        let d = dephase_local(&pure(1, 0.1), &[0.5]).unwrap();
        assert_abs_diff_eq!(d.density_matrix()[(0, 1)].re, 0.15, epsilon = 1e-15);
        let k = kraus_oracle(&pure(1, 0.1), &[0.5]).unwrap();
        assert!(max_abs_diff(&k.density_matrix(), &d.density_matrix()) < 1e-15);
    }

    #[test]
    fn dephasing_pure_product_gives_mixed_product() {
        let spec = SystemSpec::with_unit_gap(3).unwrap();
        let eps = [0.3, 0.9, 0.6];
        let params: Vec<TlsParams> = eps
            .iter()
            .map(|&e| TlsParams::new(0.15, e).unwrap())
            .collect();
        let direct = mixed_product_state(&spec, &params).unwrap();
        let via_channel = dephase_local(&pure(3, 0.15), &eps).unwrap();
        assert!(max_abs_diff(&direct.density_matrix(), &via_channel.density_matrix()) < 1e-14);
    }

    #[test]
    fn oracle_preserves_trace_and_checks_cap() {
        let k = kraus_oracle(&pure(4, 0.3), &[0.2, 0.4, 0.6, 0.8]).unwrap();
        assert_abs_diff_eq!(trace(&k.density_matrix()).re, 1.0, epsilon = 1e-13);
        assert!(matches!(
            kraus_oracle(&pure(11, 0.3), &[0.5; 11]),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn bad_factor_lists() {
        let s = pure(2, 0.2);
        assert!(dephase_local(&s, &[0.5]).is_err());
        assert!(dephase_local(&s, &[0.5, 1.5]).is_err());
        assert!(DephasingSpec::uniform(2, Some(-0.1), None).is_err());
        assert!(DephasingSpec::new(vec![0.5; 3], vec![])
            .validate(2)
            .is_err());
        assert!(DephasingSpec::new(vec![], vec![0.5; 2]).validate(2).is_ok());
    }
}
