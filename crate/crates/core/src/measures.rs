//! Energy, relative entropy of coherence, and its local/mutual split.

use crate::linalg::{
    self, dephase_full, relative_entropy, shannon_entropy, von_neumann_entropy, CMatrix, PSD_TOL,
};
use crate::states::{QuantumState, Representation, SystemSpec};
use crate::{Error, Result};

/// Gains of one successful protocol run. Energies in units of the gap
/// normalisation given by `SystemSpec`, coherences in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    pub p_s: f64,
    pub e0: f64,
    pub ef: f64,
    pub c0: f64,
    pub cf: f64,
    pub c0_loc: f64,
    pub cf_loc: f64,
    /// `(ef − e0) / E`.
    pub delta_e: f64,
    /// `cf − c0`.
    pub delta_c: f64,
    /// `(cf − cf_loc) − (c0 − c0_loc)`.
    pub delta_cm: f64,
}

/// `Tr(ρ H)`.
pub fn average_energy(state: &QuantumState, h: &CMatrix) -> Result<f64> {
    if !h.is_square() || h.nrows() != state.dim() {
        return Err(Error::InvalidArgument(format!(
            "operator of shape {:?} on a {}-dimensional state",
            h.shape(),
            state.dim()
        )));
    }
    let value = match state.representation() {
        Representation::Pure(psi) => psi.dotc(&(h * psi)),
        Representation::Mixed(rho) => linalg::trace(&(rho * h)),
    };
    if value.im.abs() > PSD_TOL {
        return Err(Error::InvalidState(format!(
            "energy has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Energy of a state under a diagonal Hamiltonian given by its levels.
pub(crate) fn diagonal_energy(state: &QuantumState, levels: &[f64]) -> f64 {
    state
        .populations()
        .iter()
        .zip(levels)
        .map(|(w, e)| w * e)
        .sum()
}

fn clamp_coherence(raw: f64) -> Result<f64> {
    if raw < -PSD_TOL {
        return Err(Error::InvalidState(format!("negative coherence {raw:e}")));
    }
    Ok(raw.max(0.0))
}

fn matrix_coherence(rho: &CMatrix) -> Result<f64> {
    let diag_entropy = shannon_entropy(rho.diagonal().iter().map(|z| z.re));
    clamp_coherence(diag_entropy - von_neumann_entropy(rho)?)
}

/// `C(ρ) = S(ρ_diag) − S(ρ)` in nats; for pure states the second term is zero.
pub fn rel_entropy_coherence(state: &QuantumState) -> Result<f64> {
    match state.representation() {
        Representation::Pure(_) => clamp_coherence(shannon_entropy(state.populations())),
        Representation::Mixed(rho) => matrix_coherence(rho),
    }
}

/// Sum of the coherences of all single-TLS marginals.
pub fn local_coherence(state: &QuantumState) -> Result<f64> {
    (1..=state.n())
        .map(|tls| matrix_coherence(&state.single_tls_marginal(tls)?))
        .sum()
}

/// Global minus local coherence.
pub fn mutual_coherence(state: &QuantumState) -> Result<f64> {
    Ok(rel_entropy_coherence(state)? - local_coherence(state)?)
}

/// Mutual coherence as a difference of two relative entropies against the
/// product of marginals:
/// `S(ρ ‖ ⊗ρ_i) − S(ρ_diag ‖ ⊗ρ_i,diag)`.
///
/// Defined here only when both product references have full support;
/// otherwise `InvalidArgument` is returned. Builds `2^N × 2^N` matrices and
/// is meant as a cross-check of [`mutual_coherence`].
pub fn mutual_coherence_relative_entropy_form(state: &QuantumState) -> Result<f64> {
    let rho = state.density_matrix();
    let marginals = (1..=state.n())
        .map(|tls| state.single_tls_marginal(tls))
        .collect::<Result<Vec<_>>>()?;
    let product = marginals
        .iter()
        .cloned()
        .reduce(|a, b| linalg::kron(&a, &b))
        .expect("n >= 1");
    let product_diag = marginals
        .iter()
        .map(dephase_full)
        .reduce(|a, b| linalg::kron(&a, &b))
        .expect("n >= 1");
    Ok(relative_entropy(&rho, &product)? - relative_entropy(&dephase_full(&rho), &product_diag)?)
}

/// Assemble the gains between `initial` and the conditional `final_state`.
pub fn gain_report(
    initial: &QuantumState,
    final_state: &QuantumState,
    p_s: f64,
    spec: &SystemSpec,
) -> Result<GainReport> {
    if initial.n() != spec.n() || final_state.n() != spec.n() {
        return Err(Error::InvalidArgument(format!(
            "states on {} and {} TLS for N = {}",
            initial.n(),
            final_state.n(),
            spec.n()
        )));
    }
    // Also catches NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(p_s > 0.0) {
        return Err(Error::ProtocolImpossible(p_s));
    }
    if p_s > 1.0 + PSD_TOL {
        return Err(Error::InvalidArgument(format!(
            "success probability {p_s} exceeds 1"
        )));
    }
    let levels = crate::states::energy_levels(spec);
    let e0 = diagonal_energy(initial, &levels);
    let ef = diagonal_energy(final_state, &levels);
    let c0 = rel_entropy_coherence(initial)?;
    let cf = rel_entropy_coherence(final_state)?;
    let c0_loc = local_coherence(initial)?;
    let cf_loc = local_coherence(final_state)?;
    Ok(GainReport {
        p_s,
        e0,
        ef,
        c0,
        cf,
        c0_loc,
        cf_loc,
        delta_e: (ef - e0) / spec.energy_gap(),
        delta_c: cf - c0,
        delta_cm: (cf - cf_loc) - (c0 - c0_loc),
    })
}
