//! Ground-state-eliminating measurements and their post-selected outcome.
//!
//! Every projector used here is diagonal in the energy basis, so a plan is
//! applied as a filter on basis indices instead of as a dense matrix. A basis
//! state survives the success outcome of pair `(j, k)` unless both TLS `j`
//! and `k` are in `|g⟩`. The overlapping chain `(1,2), (2,3), …, (N−1,N)`
//! therefore keeps exactly the bit strings with no two adjacent grounds,
//! `C(N−k+1, k)` of them with `k` grounds.

use crate::dephasing::{dephase_local, DephasingSpec};
use crate::linalg::{c64, register_dim};
use crate::measures::{gain_report, GainReport};
use crate::states::{mixed_product_state, pure_product_state, QuantumState, Representation};
use crate::states::{SystemSpec, TlsParams};
use crate::{Error, Result};

/// Success weights at or below this are reported as protocol-impossible.
pub const MIN_SUCCESS_WEIGHT: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanKind {
    /// `(1,2), (2,3), …, (N−1,N)`.
    PairwiseChain,
    /// One projector removing only `|g…g⟩`.
    Global,
    /// Arbitrary pairs; no claims are attached to these.
    CustomPairs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementPlan {
    kind: PlanKind,
    /// 1-based TLS pairs, in measurement order.
    pairs: Vec<(usize, usize)>,
}

impl MeasurementPlan {
    pub fn pairwise_chain(n: usize) -> Self {
        MeasurementPlan {
            kind: PlanKind::PairwiseChain,
            pairs: (1..n).map(|j| (j, j + 1)).collect(),
        }
    }

    pub fn global() -> Self {
        MeasurementPlan {
            kind: PlanKind::Global,
            pairs: Vec::new(),
        }
    }

    pub fn custom(pairs: Vec<(usize, usize)>) -> Self {
        MeasurementPlan {
            kind: PlanKind::CustomPairs,
            pairs,
        }
    }

    pub fn kind(&self) -> PlanKind {
        self.kind
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Same projectors measured in a different order.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.pairs.len()];
        if order.len() != self.pairs.len() {
            return Err(Error::InvalidArgument("order is not a permutation".into()));
        }
        for &o in order {
            if o >= seen.len() || std::mem::replace(&mut seen[o], true) {
                return Err(Error::InvalidArgument("order is not a permutation".into()));
            }
        }
        Ok(MeasurementPlan {
            kind: self.kind,
            pairs: order.iter().map(|&o| self.pairs[o]).collect(),
        })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 1 {
            return Err(Error::InvalidArgument("empty register".into()));
        }
        for &(j, k) in &self.pairs {
            if j == 0 || k == 0 || j > n || k > n {
                return Err(Error::InvalidArgument(format!(
                    "pair ({j}, {k}) outside 1..={n}"
                )));
            }
            if j == k {
                return Err(Error::InvalidArgument(format!(
                    "pair ({j}, {k}) repeats a TLS"
                )));
            }
        }
        match self.kind {
            PlanKind::PairwiseChain => {
                if n < 2 {
                    return Err(Error::InvalidArgument(
                        "pairwise chain needs at least two TLS".into(),
                    ));
                }
                let mut sorted = self.pairs.clone();
                sorted.sort_unstable();
                if sorted != Self::pairwise_chain(n).pairs {
                    return Err(Error::InvalidArgument(format!(
                        "plan is not the {n}-TLS adjacent chain"
                    )));
                }
            }
            PlanKind::Global => {
                if !self.pairs.is_empty() {
                    return Err(Error::InvalidArgument("global plan takes no pairs".into()));
                }
            }
            PlanKind::CustomPairs => {}
        }
        Ok(())
    }

    /// Bitmask pairs: basis index `i` fails pair `m` iff `i & m == 0`.
    fn pair_masks(&self, n: usize) -> Vec<usize> {
        self.pairs
            .iter()
            .map(|&(j, k)| (1usize << (n - j)) | (1usize << (n - k)))
            .collect()
    }

    fn filter(&self, n: usize) -> impl Fn(usize) -> bool {
        let masks = self.pair_masks(n);
        let global = self.kind == PlanKind::Global;
        move |i| {
            if global {
                i != 0
            } else {
                masks.iter().all(|&m| i & m != 0)
            }
        }
    }
}

/// Basis indices kept by the success projector of `plan`, ascending.
pub fn success_mask(plan: &MeasurementPlan, n: usize) -> Result<Vec<usize>> {
    plan.validate(n)?;
    let keep = plan.filter(n);
    Ok((0..register_dim(n)).filter(|&i| keep(i)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub success_probability: f64,
    /// Normalised conditional state after success.
    pub final_state: QuantumState,
    pub success_mask: Vec<usize>,
}

/// Post-select `state` on the success outcome of every projector in `plan`.
pub fn apply_protocol(state: &QuantumState, plan: &MeasurementPlan) -> Result<ProtocolOutcome> {
    let n = state.n();
    plan.validate(n)?;
    let keep = plan.filter(n);
    let dim = state.dim();
    let kept: Vec<bool> = (0..dim).map(&keep).collect();
    let success_mask: Vec<usize> = (0..dim).filter(|&i| kept[i]).collect();

    let weight: f64 = state
        .populations()
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(w, _)| w)
        .sum();
    if weight <= MIN_SUCCESS_WEIGHT {
        return Err(Error::ProtocolImpossible(weight));
    }

    let final_state = match state.representation() {
        Representation::Pure(psi) => {
            let scale = c64(weight.sqrt().recip());
            let mut out = psi.clone();
            for (i, a) in out.iter_mut().enumerate() {
                *a = if kept[i] { *a * scale } else { c64(0.0) };
            }
            QuantumState::pure_unchecked(n, out)
        }
        Representation::Mixed(rho) => {
            let scale = c64(weight.recip());
            let mut out = rho.clone();
            for ((i, j), z) in out
                .iter_mut()
                .enumerate()
                .map(|(idx, z)| ((idx % dim, idx / dim), z))
            {
                *z = if kept[i] && kept[j] {
                    *z * scale
                } else {
                    c64(0.0)
                };
            }
            QuantumState::mixed_unchecked(n, out)
        }
    };

    Ok(ProtocolOutcome {
        success_probability: weight,
        final_state,
        success_mask,
    })
}

/// Number of repeat-until-success rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RusPlan {
    repetitions: u32,
}

impl RusPlan {
    pub fn new(repetitions: u32) -> Result<Self> {
        if repetitions == 0 {
            return Err(Error::InvalidArgument(
                "need at least one repetition".into(),
            ));
        }
        Ok(RusPlan { repetitions })
    }

    pub fn repetitions(&self) -> u32 {
        self.repetitions
    }
}

/// Probability that all `R` independent attempts fail, `(1 − p_s)^R`.
pub fn rus_failure_probability(p_s: f64, plan: RusPlan) -> f64 {
    (1.0 - p_s).powi(plan.repetitions as i32)
}

/// Prepare the product input, dephase it, run `plan`, dephase the outcome and
/// report the gains.
///
/// The input is pure unless some TLS has `epsilon < 1` or a pre-protocol
/// dephasing list is given. `c0` and `c0_loc` refer to the (possibly
/// dephased) input; `cf` and `cf_loc` to the (possibly dephased) output.
pub fn run_experiment(
    spec: &SystemSpec,
    params: &[TlsParams],
    plan: &MeasurementPlan,
    dephasing: &DephasingSpec,
) -> Result<GainReport> {
    dephasing.validate(spec.n())?;
    let mut initial = if params.iter().all(|t| t.epsilon == 1.0) {
        pure_product_state(spec, params)?
    } else {
        mixed_product_state(spec, params)?
    };
    if !dephasing.pre.is_empty() {
        initial = dephase_local(&initial, &dephasing.pre)?;
    }
    let outcome = apply_protocol(&initial, plan)?;
    let final_state = if dephasing.post.is_empty() {
        outcome.final_state
    } else {
        dephase_local(&outcome.final_state, &dephasing.post)?
    };
    gain_report(&initial, &final_state, outcome.success_probability, spec)
}
