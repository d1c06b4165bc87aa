//! Acceptance checks: simulator against closed forms, approximation bands,
//! dephasing properties and the repeat-until-success and robustness claims.
//!
//! Each check returns a [`CriterionReport`] carrying the measured worst-case
//! deviation, so the same code backs the `acceptance` test target and the
//! `validate` CLI command.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closedform::{
    self, approx_dcm, approx_de, approx_ps, global_approx, optimal_comparison, ps_exact,
    relative_deviation, ChainSums, GroundCounter,
};
use crate::dephasing::{dephase_local, kraus_oracle, DephasingSpec};
use crate::linalg::{c64, max_abs_diff, CMatrix, C64};
use crate::measures::{average_energy, GainReport};
use crate::protocol::{
    apply_protocol, run_experiment, rus_failure_probability, MeasurementPlan, RusPlan,
};
use crate::robustness::{random_p_trials, RobustnessSummary};
use crate::states::{hamiltonian, QuantumState, SystemSpec, TlsParams};
use crate::Result;

pub const ORACLE_P: [f64; 5] = [0.005, 0.01, 0.05, 0.1, 0.3];
/// Sample points in `(0, 0.12]` used for the small-`p` bands.
pub const SMALL_P: [f64; 12] = [
    0.001, 0.002, 0.005, 0.01, 0.02, 0.03, 0.05, 0.06, 0.08, 0.1, 0.11, 0.12,
];
pub const ROBUSTNESS_SEED: u64 = 0x5eed_c0de;
pub const ROBUSTNESS_DRAWS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2}: {} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail
        )
    }
}

fn report(id: u8, title: &'static str, passed: bool, detail: String) -> CriterionReport {
    CriterionReport {
        id,
        title,
        passed,
        detail,
    }
}

/// Pairwise-chain run on `n` identical pure TLS.
pub fn simulate_pure(n: usize, p: f64, plan: &MeasurementPlan) -> Result<GainReport> {
    let spec = SystemSpec::with_unit_gap(n)?;
    run_experiment(
        &spec,
        &TlsParams::uniform(n, p, 1.0)?,
        plan,
        &DephasingSpec::none(),
    )
}

fn simulate_dephased(n: usize, p: f64, pre: Option<f64>, post: Option<f64>) -> Result<GainReport> {
    let spec = SystemSpec::with_unit_gap(n)?;
    run_experiment(
        &spec,
        &TlsParams::uniform(n, p, 1.0)?,
        &MeasurementPlan::pairwise_chain(n),
        &DephasingSpec::uniform(n, pre, post)?,
    )
}

/// Worst deviation tracker.
#[derive(Debug, Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }
}

impl fmt::Display for Worst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.at.is_empty() {
            write!(f, "{:.3e} everywhere", self.value)
        } else {
            write!(f, "{:.3e} at {}", self.value, self.at)
        }
    }
}

fn failed(id: u8, title: &'static str, err: crate::Error) -> CriterionReport {
    report(id, title, false, format!("error: {err}"))
}

/// Criterion 1 with the combinatorial factor supplied by `counter`.
pub fn oracle_equivalence_with(counter: GroundCounter) -> CriterionReport {
    const TITLE: &str = "simulator vs exact sums, N in [2,10], abs 1e-9, < 60 s";
    let start = Instant::now();
    let mut worst = Worst::default();
    for n in 2..=10usize {
        for p in ORACLE_P {
            let sim = match simulate_pure(n, p, &MeasurementPlan::pairwise_chain(n)) {
                Ok(r) => r,
                Err(e) => return failed(1, TITLE, e),
            };
            let sums = ChainSums::with_counter(n as u64, p, counter);
            let (ef, cf) = match (sums.final_energy(1.0), sums.final_coherence()) {
                (Ok(ef), Ok(cf)) => (ef, cf),
                (Err(e), _) | (_, Err(e)) => return failed(1, TITLE, e),
            };
            for (what, exact, simulated) in [
                ("p_s", sums.success_probability(), sim.p_s),
                ("E_f", ef, sim.ef),
                ("C_f", cf, sim.cf),
            ] {
                worst.update((exact - simulated).abs(), || format!("{what} N={n} p={p}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = worst.value < 1e-9 && elapsed < Duration::from_secs(60);
    report(
        1,
        TITLE,
        passed,
        format!("max |diff| {worst}; {:.2} s", elapsed.as_secs_f64()),
    )
}

pub fn oracle_equivalence() -> CriterionReport {
    oracle_equivalence_with(closedform::count_no_adjacent_ground)
}

pub fn even_ps_approximation() -> CriterionReport {
    let mut worst = Worst::default();
    for n in [2u64, 4, 6, 8, 10] {
        for p in SMALL_P.into_iter().filter(|&p| p <= 0.1) {
            worst.update(relative_deviation(approx_ps(n, p), ps_exact(n, p)), || {
                format!("N={n} p={p}")
            });
        }
    }
    report(
        2,
        "even-N p_s approximation within 10% for N <= 10, p <= 0.1",
        worst.value <= 0.10,
        format!("max rel dev {worst}"),
    )
}

pub fn energy_leading_behavior() -> CriterionReport {
    const TITLE: &str = "energy gain leading terms (even abs 0.05, odd abs 0.1)";
    let mut even = Worst::default();
    let mut odd = Worst::default();
    for n in [2usize, 4, 6, 8] {
        for p in SMALL_P.into_iter().filter(|&p| p <= 0.05) {
            match simulate_pure(n, p, &MeasurementPlan::pairwise_chain(n)) {
                Ok(r) => even.update((r.delta_e - approx_de(n as u64, p)).abs(), || {
                    format!("N={n} p={p}")
                }),
                Err(e) => return failed(3, TITLE, e),
            }
        }
    }
    for n in [3usize, 5, 7, 9] {
        match simulate_pure(n, 0.005, &MeasurementPlan::pairwise_chain(n)) {
            Ok(r) => odd.update((r.delta_e - (n as f64 - 1.0) / 2.0).abs(), || {
                format!("N={n} p=0.005")
            }),
            Err(e) => return failed(3, TITLE, e),
        }
    }
    report(
        3,
        TITLE,
        even.value <= 0.05 && odd.value <= 0.1,
        format!("even max {even}; odd max {odd}"),
    )
}

pub fn coherence_limit() -> CriterionReport {
    const TITLE: &str = "coherence gain: even N -> ln(N/2+1) within 5%, odd N < 0.05 nats";
    let mut even = Worst::default();
    let mut odd = Worst::default();
    for n in [2usize, 4, 6, 8, 10] {
        match simulate_pure(n, 0.001, &MeasurementPlan::pairwise_chain(n)) {
            Ok(r) => {
                let target = (n as f64 / 2.0 + 1.0).ln();
                even.update(relative_deviation(r.delta_c, target), || {
                    format!("N={n} p=0.001")
                });
            }
            Err(e) => return failed(4, TITLE, e),
        }
    }
    for n in [3usize, 5] {
        match simulate_pure(n, 0.005, &MeasurementPlan::pairwise_chain(n)) {
            Ok(r) => odd.update(r.delta_c, || format!("N={n} p=0.005")),
            Err(e) => return failed(4, TITLE, e),
        }
    }
    report(
        4,
        TITLE,
        even.value <= 0.05 && odd.value < 0.05,
        format!("even max rel dev {even}; odd max gain {odd}"),
    )
}

pub fn mutual_coherence_relation() -> CriterionReport {
    const TITLE: &str = "mutual coherence exceeds coherence gain; even-N approximation within 5%";
    let mut violations = Vec::new();
    let mut worst = Worst::default();
    for n in [2usize, 4, 6, 8, 10] {
        for p in SMALL_P {
            let r = match simulate_pure(n, p, &MeasurementPlan::pairwise_chain(n)) {
                Ok(r) => r,
                Err(e) => return failed(5, TITLE, e),
            };
            if n <= 8 && p <= 0.1 && !(r.delta_cm > r.delta_c && r.cf_loc < r.c0_loc) {
                violations.push(format!("N={n} p={p}"));
            }
            match approx_dcm(n as u64, p) {
                Ok(a) => worst.update(relative_deviation(a, r.delta_cm), || format!("N={n} p={p}")),
                Err(e) => return failed(5, TITLE, e),
            }
        }
    }
    report(
        5,
        TITLE,
        violations.is_empty() && worst.value <= 0.05,
        format!(
            "ordering violations: {}; approx max rel dev {worst}",
            if violations.is_empty() {
                "none".to_string()
            } else {
                violations.join(", ")
            }
        ),
    )
}

pub fn global_protocol_bands() -> CriterionReport {
    const TITLE: &str = "global-protocol approximations within 10% in their p ranges, N <= 8";
    let mut worst = [
        ("p_s", 0.02, Worst::default()),
        ("dE", 0.08, Worst::default()),
        ("dC", 0.06, Worst::default()),
        ("dC_m", 0.11, Worst::default()),
    ];
    for n in 2..=8usize {
        for p in SMALL_P {
            let r = match simulate_pure(n, p, &MeasurementPlan::global()) {
                Ok(r) => r,
                Err(e) => return failed(6, TITLE, e),
            };
            let approx = global_approx(n as u64, p);
            let pairs = [
                Some((approx.ps, r.p_s)),
                Some((approx.de, r.delta_e)),
                Some((approx.dc, r.delta_c)),
                approx.dcm.map(|a| (a, r.delta_cm)),
            ];
            for (slot, pair) in worst.iter_mut().zip(pairs) {
                if let Some((a, s)) = pair.filter(|_| p <= slot.1) {
                    slot.2
                        .update(relative_deviation(a, s), || format!("N={n} p={p}"));
                }
            }
        }
    }
    let passed = worst.iter().all(|w| w.2.value <= 0.10);
    let detail = worst
        .iter()
        .map(|(name, pmax, w)| format!("{name} (p<={pmax}) {w}"))
        .collect::<Vec<_>>()
        .join("; ");
    report(6, TITLE, passed, detail)
}

pub fn distillation_comparison() -> CriterionReport {
    let mut violations = Vec::new();
    let mut worst_ratio = Worst::default();
    for n in [2u64, 4, 6, 8] {
        for p in SMALL_P.into_iter().filter(|&p| p <= 0.1) {
            let opt = optimal_comparison(n, p).ps_opt;
            let ps = ps_exact(n, p);
            if !(opt < ps && opt < approx_ps(n, p)) {
                violations.push(format!("N={n} p={p}"));
            }
            worst_ratio.update(opt / ps, || format!("N={n} p={p}"));
        }
    }
    report(
        7,
        "optimal distillation success (2p)^N below pairwise even-N p_s",
        violations.is_empty(),
        format!(
            "violations: {}; largest ratio {worst_ratio}",
            violations.len()
        ),
    )
}

/// Random density matrix `G G† / Tr(G G†)` with uniform entries in the unit square.
pub fn random_density_matrix<R: Rng>(n: usize, rng: &mut R) -> QuantumState {
    let dim = 1usize << n;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = crate::linalg::trace(&rho).re;
    QuantumState::mixed(n, rho / c64(tr)).expect("G G† is a valid state")
}

pub fn random_factors<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..=1.0)).collect()
}

pub fn dephasing_properties() -> CriterionReport {
    const TITLE: &str = "dephasing: energy invariance, Kraus oracle, projector commutation (1e-12)";
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut energy = Worst::default();
    let mut kraus = Worst::default();
    let mut commute = Worst::default();
    let mut run = || -> Result<()> {
        for n in 1..=6usize {
            for trial in 0..4 {
                let state = random_density_matrix(n, &mut rng);
                let eps = random_factors(n, &mut rng);
                let spec = SystemSpec::with_unit_gap(n)?;
                let h = hamiltonian(&spec);
                let dephased = dephase_local(&state, &eps)?;
                energy.update(
                    (average_energy(&dephased, &h)? - average_energy(&state, &h)?).abs(),
                    || format!("N={n} trial {trial}"),
                );
                if n <= 5 {
                    let oracle = kraus_oracle(&state, &eps)?;
                    kraus.update(
                        max_abs_diff(&oracle.density_matrix(), &dephased.density_matrix()),
                        || format!("N={n} trial {trial}"),
                    );
                }
                if n >= 2 {
                    let plan = MeasurementPlan::pairwise_chain(n);
                    let a = apply_protocol(&dephased, &plan)?.final_state;
                    let b = dephase_local(&apply_protocol(&state, &plan)?.final_state, &eps)?;
                    commute.update(
                        max_abs_diff(&a.density_matrix(), &b.density_matrix()),
                        || format!("N={n} trial {trial}"),
                    );
                }
            }
        }
        Ok(())
    };
    if let Err(e) = run() {
        return failed(8, TITLE, e);
    }
    report(
        8,
        TITLE,
        energy.value <= 1e-12 && kraus.value <= 1e-12 && commute.value <= 1e-12,
        format!("energy {energy}; Kraus {kraus}; commutation {commute}"),
    )
}

pub fn dephasing_critical_behavior() -> CriterionReport {
    const TITLE: &str =
        "dephasing thresholds: eps=0.9 keeps gain, eps=0.4 kills it, pre hurts more than post";
    let p = 0.01;
    let mut notes = Vec::new();
    let mut passed = true;
    let run = |notes: &mut Vec<String>, passed: &mut bool| -> Result<()> {
        for n in [2usize, 4, 6] {
            let pure = simulate_pure(n, p, &MeasurementPlan::pairwise_chain(n))?.delta_c;
            let pre9 = simulate_dephased(n, p, Some(0.9), None)?.delta_c;
            let pre4 = simulate_dephased(n, p, Some(0.4), None)?.delta_c;
            let post9 = simulate_dephased(n, p, None, Some(0.9))?.delta_c;
            let ok = pre9 > 0.0 && pre4 <= 0.02 && post9 > 0.0 && post9 < pure;
            *passed &= ok;
            notes.push(format!(
                "N={n}: pure {pure:.4}, pre0.9 {pre9:.4}, pre0.4 {pre4:.4}, post0.9 {post9:.4}{}",
                if ok { "" } else { " FAIL" }
            ));
        }
        let pre = simulate_dephased(4, p, Some(0.9), None)?.delta_c;
        let post = simulate_dephased(4, p, None, Some(0.9))?.delta_c;
        let ok = pre < post;
        *passed &= ok;
        notes.push(format!(
            "N=4 pre-only {pre:.4} < post-only {post:.4}: {}",
            if ok { "ok" } else { "FAIL" }
        ));
        // Informational: loss from dephasing the input versus the further
        // loss from also dephasing the output of that same run.
        let both = simulate_dephased(4, p, Some(0.9), Some(0.9))?.delta_c;
        let pure = simulate_pure(4, p, &MeasurementPlan::pairwise_chain(4))?.delta_c;
        notes.push(format!(
            "info N=4: input-dephasing loss {:.4}, additional output-dephasing loss {:.4}",
            pure - pre,
            pre - both
        ));
        Ok(())
    };
    if let Err(e) = run(&mut notes, &mut passed) {
        return failed(9, TITLE, e);
    }
    report(9, TITLE, passed, notes.join("; "))
}

pub fn rus_behavior() -> CriterionReport {
    const TITLE: &str = "repeat-until-success failure probability (1-p_s)^R";
    let p = 0.05;
    let ns = [2usize, 4, 6];
    let run = || -> Result<(bool, bool, f64, f64)> {
        let ps: Vec<f64> = ns
            .iter()
            .map(|&n| simulate_pure(n, p, &MeasurementPlan::pairwise_chain(n)).map(|r| r.p_s))
            .collect::<Result<_>>()?;
        let mut decreasing_in_r = true;
        let mut increasing_in_n = true;
        for r in 1..=100u32 {
            let plan = RusPlan::new(r)?;
            let pf: Vec<f64> = ps
                .iter()
                .map(|&s| rus_failure_probability(s, plan))
                .collect();
            increasing_in_n &= pf.windows(2).all(|w| w[1] > w[0]);
            if r > 1 {
                let prev = RusPlan::new(r - 1)?;
                decreasing_in_r &= ps
                    .iter()
                    .all(|&s| rus_failure_probability(s, plan) < rus_failure_probability(s, prev));
            }
        }
        let r50 = RusPlan::new(50)?;
        let from_sim = rus_failure_probability(ps[0], r50);
        let from_exact = rus_failure_probability(ps_exact(2, p), r50);
        Ok((decreasing_in_r, increasing_in_n, from_sim, from_exact))
    };
    match run() {
        Ok((dec, inc, sim, exact)) => {
            // 1 − p_s = (1 − p)² at N = 2.
            let hand = 0.9025f64.powi(50);
            let passed = dec && inc && (sim - exact).abs() < 1e-12 && (exact - hand).abs() < 1e-12;
            report(
                10,
                TITLE,
                passed,
                format!(
                    "decreasing in R: {dec}; increasing in N: {inc}; p_f(N=2,p=0.05,R=50) = {exact:.12e} (simulator {sim:.12e})"
                ),
            )
        }
        Err(e) => failed(10, TITLE, e),
    }
}

pub fn robustness() -> CriterionReport {
    const TITLE: &str = "random per-TLS p in [0.025, 0.075], N=4: all draws gain";
    let run = || -> Result<RobustnessSummary> {
        random_p_trials(
            &SystemSpec::with_unit_gap(4)?,
            (0.025, 0.075),
            &MeasurementPlan::pairwise_chain(4),
            &DephasingSpec::none(),
            ROBUSTNESS_SEED,
            ROBUSTNESS_DRAWS,
        )
    };
    match run() {
        Ok(s) => report(
            11,
            TITLE,
            s.positive_both == ROBUSTNESS_DRAWS,
            format!(
                "{}/{} draws; min dE {:.4}, min dC {:.4}",
                s.positive_both, s.draws, s.min_de, s.min_dc
            ),
        ),
        Err(e) => failed(11, TITLE, e),
    }
}

/// Every criterion, in order.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        oracle_equivalence(),
        even_ps_approximation(),
        energy_leading_behavior(),
        coherence_limit(),
        mutual_coherence_relation(),
        global_protocol_bands(),
        distillation_comparison(),
        dephasing_properties(),
        dephasing_critical_behavior(),
        rus_behavior(),
        robustness(),
    ]
}
