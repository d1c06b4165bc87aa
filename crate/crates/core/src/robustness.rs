//! Protocol runs on TLS whose excitation probabilities are not identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dephasing::DephasingSpec;
use crate::protocol::{run_experiment, MeasurementPlan};
use crate::states::{SystemSpec, TlsParams};
use crate::{Error, Result};

/// Aggregate over random draws of per-TLS `p` from a flat window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessSummary {
    pub draws: usize,
    pub positive_de: usize,
    pub positive_dc: usize,
    /// Draws with both gains positive.
    pub positive_both: usize,
    pub min_de: f64,
    pub min_dc: f64,
    pub mean_de: f64,
    pub mean_dc: f64,
}

/// Draw each TLS's `p` uniformly from `[lo, hi]` (seeded ChaCha8), run the
/// plan `draws` times and summarise the gains.
pub fn random_p_trials(
    spec: &SystemSpec,
    window: (f64, f64),
    plan: &MeasurementPlan,
    dephasing: &DephasingSpec,
    seed: u64,
    draws: usize,
) -> Result<RobustnessSummary> {
    let (lo, hi) = window;
    if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window [{lo}, {hi}] is not inside [0, 1]"
        )));
    }
    if draws == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = RobustnessSummary {
        draws,
        positive_de: 0,
        positive_dc: 0,
        positive_both: 0,
        min_de: f64::INFINITY,
        min_dc: f64::INFINITY,
        mean_de: 0.0,
        mean_dc: 0.0,
    };
    for _ in 0..draws {
        let params = (0..spec.n())
            .map(|_| TlsParams::pure(rng.random_range(lo..=hi)))
            .collect::<Result<Vec<_>>>()?;
        let r = run_experiment(spec, &params, plan, dephasing)?;
        s.positive_de += usize::from(r.delta_e > 0.0);
        s.positive_dc += usize::from(r.delta_c > 0.0);
        s.positive_both += usize::from(r.delta_e > 0.0 && r.delta_c > 0.0);
        s.min_de = s.min_de.min(r.delta_e);
        s.min_dc = s.min_dc.min(r.delta_c);
        s.mean_de += r.delta_e / draws as f64;
        s.mean_dc += r.delta_c / draws as f64;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_summary() {
        let spec = SystemSpec::with_unit_gap(4).unwrap();
        let plan = MeasurementPlan::pairwise_chain(4);
        let run = |seed| {
            random_p_trials(&spec, (0.02, 0.08), &plan, &DephasingSpec::none(), seed, 20).unwrap()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }

    #[test]
    fn zero_width_window_is_the_homogeneous_case() {
        let spec = SystemSpec::with_unit_gap(4).unwrap();
        let plan = MeasurementPlan::pairwise_chain(4);
        let s = random_p_trials(&spec, (0.05, 0.05), &plan, &DephasingSpec::none(), 0, 3).unwrap();
        let r = crate::validation::simulate_pure(4, 0.05, &plan).unwrap();
        assert!((s.min_dc - r.delta_c).abs() < 1e-12);
        assert!((s.mean_de - r.delta_e).abs() < 1e-12);
    }

    #[test]
    fn wide_window_is_reported_not_rejected() {
        // Spreads of order 0.1 are where the coherence gain starts to suffer.
        let spec = SystemSpec::with_unit_gap(4).unwrap();
        let plan = MeasurementPlan::pairwise_chain(4);
        let s = random_p_trials(&spec, (0.0, 0.2), &plan, &DephasingSpec::none(), 1, 50).unwrap();
        assert_eq!(s.positive_de, 50);
        assert!(s.min_dc < 0.3);
        assert!(random_p_trials(&spec, (0.3, 0.2), &plan, &DephasingSpec::none(), 1, 5).is_err());
    }
}
