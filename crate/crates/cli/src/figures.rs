//! Fixed grids that regenerate the standard plots.

use coherence_synth::{
    approx_dc, approx_dcm, approx_de, approx_ps, global_approx, optimal_comparison,
    rus_failure_probability, RusPlan,
};
use rayon::prelude::*;

use crate::config::{EpsSetting, Protocol};
use crate::experiments::gains;
use crate::table::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Energy and coherence gains against N at small p.
    Fig2,
    /// Success probability against N, with global and optimal references.
    Fig3a,
    /// Repeat-until-success failure probability against R.
    Fig3b,
    /// Gains under input dephasing.
    Fig4,
    /// Gains under input and output dephasing.
    Fig5,
    /// Gains and approximations over a dense p grid.
    #[value(name = "figA", alias = "figa")]
    FigA,
}

const SMALL_P: [f64; 3] = [0.005, 0.01, 0.05];
const DEPHASING: f64 = 0.9;

fn small_grid() -> Vec<(usize, f64)> {
    (2..=8usize)
        .flat_map(|n| SMALL_P.iter().map(move |&p| (n, p)))
        .collect()
}

fn build<F>(columns: Vec<&'static str>, cells: Vec<(usize, f64)>, row: F) -> Result<Table, CliError>
where
    F: Fn(usize, f64) -> Result<Vec<Vec<Cell>>, CliError> + Sync,
{
    let blocks: Vec<Vec<Vec<Cell>>> = cells
        .into_par_iter()
        .map(|(n, p)| row(n, p))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(columns);
    blocks.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

fn fig2() -> Result<Table, CliError> {
    build(
        vec![
            "n",
            "p",
            "delta_e",
            "delta_c",
            "delta_cm",
            "approx_de",
            "approx_dc",
            "approx_dcm",
            "global_delta_e",
            "global_delta_c",
            "global_delta_cm",
            "global_approx_de",
            "global_approx_dc",
            "global_approx_dcm",
        ],
        small_grid(),
        |n, p| {
            let pw = gains(Protocol::Pairwise, n, p, None, None)?;
            let gl = gains(Protocol::Global, n, p, None, None)?;
            let ga = global_approx(n as u64, p);
            let m = n as u64;
            Ok(vec![vec![
                n.into(),
                p.into(),
                pw.delta_e.into(),
                pw.delta_c.into(),
                pw.delta_cm.into(),
                approx_de(m, p).into(),
                approx_dc(m, p).into(),
                approx_dcm(m, p).ok().into(),
                gl.delta_e.into(),
                gl.delta_c.into(),
                gl.delta_cm.into(),
                ga.de.into(),
                ga.dc.into(),
                ga.dcm.into(),
            ]])
        },
    )
}

fn fig3a() -> Result<Table, CliError> {
    build(
        vec![
            "n",
            "p",
            "p_s",
            "approx_ps",
            "global_p_s",
            "global_approx_ps",
            "ps_opt",
            "delta_c",
            "dc_opt",
        ],
        small_grid(),
        |n, p| {
            let pw = gains(Protocol::Pairwise, n, p, None, None)?;
            let gl = gains(Protocol::Global, n, p, None, None)?;
            let opt = optimal_comparison(n as u64, p);
            Ok(vec![vec![
                n.into(),
                p.into(),
                pw.p_s.into(),
                approx_ps(n as u64, p).into(),
                gl.p_s.into(),
                global_approx(n as u64, p).ps.into(),
                opt.ps_opt.into(),
                pw.delta_c.into(),
                opt.dc_opt.into(),
            ]])
        },
    )
}

fn fig3b() -> Result<Table, CliError> {
    let p = 0.05;
    build(
        vec!["n", "p", "r", "p_s", "p_f", "global_p_s", "global_p_f"],
        [2, 4, 6].iter().map(|&n| (n, p)).collect(),
        |n, p| {
            let pw = gains(Protocol::Pairwise, n, p, None, None)?;
            let gl = gains(Protocol::Global, n, p, None, None)?;
            (1..=100u32)
                .map(|r| {
                    let plan = RusPlan::new(r)?;
                    Ok(vec![
                        n.into(),
                        p.into(),
                        r.into(),
                        pw.p_s.into(),
                        rus_failure_probability(pw.p_s, plan).into(),
                        gl.p_s.into(),
                        rus_failure_probability(gl.p_s, plan).into(),
                    ])
                })
                .collect()
        },
    )
}

fn dephased(post: bool) -> Result<Table, CliError> {
    let eps = EpsSetting::Uniform(DEPHASING);
    let post_eps = post.then_some(&eps);
    build(
        vec![
            "n",
            "p",
            "epsilon_pre",
            "epsilon_post",
            "p_s",
            "delta_e",
            "delta_c",
            "delta_cm",
            "pure_delta_c",
            "pure_delta_cm",
            "approx_dc",
            "approx_dcm",
        ],
        small_grid(),
        |n, p| {
            let d = gains(Protocol::Pairwise, n, p, Some(&eps), post_eps)?;
            let pure = gains(Protocol::Pairwise, n, p, None, None)?;
            Ok(vec![vec![
                n.into(),
                p.into(),
                DEPHASING.into(),
                EpsSetting::cell(post_eps),
                d.p_s.into(),
                d.delta_e.into(),
                d.delta_c.into(),
                d.delta_cm.into(),
                pure.delta_c.into(),
                pure.delta_cm.into(),
                approx_dc(n as u64, p).into(),
                approx_dcm(n as u64, p).ok().into(),
            ]])
        },
    )
}

fn fig_a() -> Result<Table, CliError> {
    let cells = (2..=8usize)
        .flat_map(|n| (1..=60).map(move |k| (n, k as f64 * 0.005)))
        .collect();
    build(
        vec![
            "n",
            "p",
            "p_s",
            "delta_e",
            "delta_c",
            "delta_cm",
            "approx_ps",
            "approx_de",
            "approx_dc",
            "approx_dcm",
        ],
        cells,
        |n, p| {
            let g = gains(Protocol::Pairwise, n, p, None, None)?;
            let m = n as u64;
            Ok(vec![vec![
                n.into(),
                p.into(),
                g.p_s.into(),
                g.delta_e.into(),
                g.delta_c.into(),
                g.delta_cm.into(),
                approx_ps(m, p).into(),
                approx_de(m, p).into(),
                approx_dc(m, p).into(),
                approx_dcm(m, p).ok().into(),
            ]])
        },
    )
}

pub fn figure(which: Figure) -> Result<Table, CliError> {
    match which {
        Figure::Fig2 => fig2(),
        Figure::Fig3a => fig3a(),
        Figure::Fig3b => fig3b(),
        Figure::Fig4 => dephased(false),
        Figure::Fig5 => dephased(true),
        Figure::FigA => fig_a(),
    }
}
