//! Row builders for `single` and `sweep`.

use coherence_synth::robustness::random_p_trials;
use coherence_synth::{
    approx_dc, approx_dcm, approx_de, approx_ps, global_approx, run_experiment,
    rus_failure_probability, DephasingSpec, GainReport, MeasurementPlan, RusPlan, SystemSpec,
    TlsParams,
};
use rayon::prelude::*;

use crate::config::{EpsSetting, Protocol, SweepConfig};
use crate::table::{Cell, Table};
use crate::CliError;

pub const SWEEP_COLUMNS: [&str; 14] = [
    "n",
    "p",
    "epsilon_pre",
    "epsilon_post",
    "p_s",
    "delta_e",
    "delta_c",
    "delta_cm",
    "c0",
    "cf",
    "approx_ps",
    "approx_de",
    "approx_dc",
    "approx_dcm",
];

pub const RUS_COLUMNS: [&str; 7] = ["n", "p", "epsilon_pre", "epsilon_post", "r", "p_s", "p_f"];

pub const ROBUSTNESS_COLUMNS: [&str; 12] = [
    "n",
    "p",
    "spread",
    "samples",
    "seed",
    "frac_positive_de",
    "frac_positive_dc",
    "frac_positive_both",
    "min_delta_e",
    "min_delta_c",
    "mean_delta_e",
    "mean_delta_c",
];

pub fn plan_for(protocol: Protocol, n: usize) -> MeasurementPlan {
    match protocol {
        Protocol::Pairwise => MeasurementPlan::pairwise_chain(n),
        Protocol::Global => MeasurementPlan::global(),
    }
}

pub fn dephasing_for(
    n: usize,
    pre: Option<&EpsSetting>,
    post: Option<&EpsSetting>,
) -> Result<DephasingSpec, CliError> {
    let resolve = |e: Option<&EpsSetting>| e.map(|e| e.resolve(n)).transpose();
    Ok(DephasingSpec::new(
        resolve(pre)?.unwrap_or_default(),
        resolve(post)?.unwrap_or_default(),
    ))
}

/// Simulated gains for `N` identical pure TLS.
pub fn gains(
    protocol: Protocol,
    n: usize,
    p: f64,
    pre: Option<&EpsSetting>,
    post: Option<&EpsSetting>,
) -> Result<GainReport, CliError> {
    let spec = SystemSpec::with_unit_gap(n)?;
    let params = TlsParams::uniform(n, p, 1.0)?;
    let dephasing = dephasing_for(n, pre, post)?;
    Ok(run_experiment(
        &spec,
        &params,
        &plan_for(protocol, n),
        &dephasing,
    )?)
}

/// `approx_ps, approx_de, approx_dc, approx_dcm`; null where the formula
/// has no branch for this `N`.
pub fn approx_cells(protocol: Protocol, n: usize, p: f64) -> [Cell; 4] {
    let n = n as u64;
    match protocol {
        Protocol::Pairwise => [
            approx_ps(n, p).into(),
            approx_de(n, p).into(),
            approx_dc(n, p).into(),
            approx_dcm(n, p).ok().into(),
        ],
        Protocol::Global => {
            let g = global_approx(n, p);
            [g.ps.into(), g.de.into(), g.dc.into(), g.dcm.into()]
        }
    }
}

fn grid(cfg: &SweepConfig) -> Vec<(usize, f64)> {
    let mut ns = cfg.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut ps = cfg.p_values.clone();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    ns.iter()
        .flat_map(|&n| ps.iter().map(move |&p| (n, p)))
        .collect()
}

fn eps_cells(cfg: &SweepConfig) -> [Cell; 2] {
    [
        EpsSetting::cell(cfg.pre_eps.as_ref()),
        EpsSetting::cell(cfg.post_eps.as_ref()),
    ]
}

pub fn sweep_table(cfg: &SweepConfig) -> Result<Table, CliError> {
    let rows: Vec<Vec<Cell>> = grid(cfg)
        .into_par_iter()
        .map(|(n, p)| {
            let g = gains(
                cfg.protocol,
                n,
                p,
                cfg.pre_eps.as_ref(),
                cfg.post_eps.as_ref(),
            )?;
            let mut row = vec![Cell::from(n), p.into()];
            row.extend(eps_cells(cfg));
            row.extend([g.p_s, g.delta_e, g.delta_c, g.delta_cm, g.c0, g.cf].map(Cell::from));
            row.extend(approx_cells(cfg.protocol, n, p));
            Ok(row)
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn rus_table(cfg: &SweepConfig, repetitions: &[u32]) -> Result<Table, CliError> {
    let mut rs = repetitions.to_vec();
    rs.sort_unstable();
    rs.dedup();
    let blocks: Vec<Vec<Vec<Cell>>> = grid(cfg)
        .into_par_iter()
        .map(|(n, p)| {
            let g = gains(
                cfg.protocol,
                n,
                p,
                cfg.pre_eps.as_ref(),
                cfg.post_eps.as_ref(),
            )?;
            rs.iter()
                .map(|&r| {
                    let p_f = rus_failure_probability(g.p_s, RusPlan::new(r)?);
                    let mut row = vec![Cell::from(n), p.into()];
                    row.extend(eps_cells(cfg));
                    row.extend([Cell::from(r), g.p_s.into(), p_f.into()]);
                    Ok(row)
                })
                .collect()
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = Table::new(RUS_COLUMNS.to_vec());
    blocks.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

/// Seed of one `(N, p)` cell: fixed by the run seed and the cell alone, so
/// output does not depend on scheduling.
pub fn cell_seed(seed: u64, n: usize, p: f64) -> u64 {
    seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ p.to_bits().rotate_left(17)
}

pub fn robustness_table(cfg: &SweepConfig, spread: f64) -> Result<Table, CliError> {
    let rows: Vec<Vec<Cell>> = grid(cfg)
        .into_par_iter()
        .map(|(n, p)| {
            let spec = SystemSpec::with_unit_gap(n)?;
            let dephasing = dephasing_for(n, cfg.pre_eps.as_ref(), cfg.post_eps.as_ref())?;
            let s = random_p_trials(
                &spec,
                (p - spread / 2.0, p + spread / 2.0),
                &plan_for(cfg.protocol, n),
                &dephasing,
                cell_seed(cfg.seed, n, p),
                cfg.samples,
            )?;
            let frac = |k: usize| k as f64 / s.draws as f64;
            Ok(vec![
                Cell::from(n),
                p.into(),
                spread.into(),
                s.draws.into(),
                Cell::Int(cfg.seed as i64),
                frac(s.positive_de).into(),
                frac(s.positive_dc).into(),
                frac(s.positive_both).into(),
                s.min_de.into(),
                s.min_dc.into(),
                s.mean_de.into(),
                s.mean_dc.into(),
            ])
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = Table::new(ROBUSTNESS_COLUMNS.to_vec());
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// The table a resolved configuration asks for.
pub fn run(cfg: &SweepConfig) -> Result<Table, CliError> {
    match (&cfg.rus, cfg.p_spread) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "--rus and --p-spread select different tables; pass one".into(),
        )),
        (Some(rs), None) => rus_table(cfg, rs),
        (None, Some(w)) => robustness_table(cfg, w),
        (None, None) => sweep_table(cfg),
    }
}
