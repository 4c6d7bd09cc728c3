//! Figure presets: each fixes which parameters are swept and the CSV columns it writes.

use std::fs;
use std::path::{Path, PathBuf};

use fbmc_metrics::{point_seed, run_mse, run_trials, sweep, Axis, CsiMode, MseFrame, Scheme};
use fbmc_theory::{sir_upper_bound, theoretical_sinr};

use crate::config::{criterion_name, render, SimConfig};
use crate::error::{CliError, CliResult};
use crate::output::{write_csv, Cell, Table};
use crate::plot::emit_plot_script;

pub const PRESETS: [&str; 6] = ["fig3", "fig4", "fig6", "fig7", "fig8", "mse"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Scale {
    /// Reduced subcarrier count, antenna counts and trials that finish in minutes.
    Desk,
    /// The 256-subcarrier, 8-user system.
    Full,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Desk => "desk",
            Scale::Full => "full",
        }
    }
}

/// Column names of a preset's CSV, in order.
pub fn columns(preset: &str) -> Option<&'static [&'static str]> {
    Some(match preset {
        "fig3" => &["Lg_prime", "D1", "channel", "sir_db", "sir_se_db", "highrate_sir_db"],
        "fig4" => &[
            "channel",
            "criterion",
            "gamma_db",
            "N_r",
            "sinr_db",
            "sinr_se_db",
            "theory_sinr_db",
        ],
        "fig6" => &["N_r", "criterion", "scheme", "sinr_db", "sinr_se_db", "sir_db"],
        "fig7" | "fig8" => &[
            "gamma_db",
            "N_r",
            "criterion",
            "scheme",
            "sinr_db",
            "sinr_se_db",
            "sir_upper_bound_db",
        ],
        "mse" => &[
            "gamma_db",
            "N_r",
            "criterion",
            "scheme",
            "csi",
            "mse",
            "mse_db",
            "mse_se_db",
        ],
        _ => return None,
    })
}

/// Overrides a preset applies to the defaults at a given scale.
pub fn preset_overrides(preset: &str, scale: Scale) -> Option<&'static str> {
    Some(match (preset, scale) {
        ("fig3", Scale::Full) => {
            "N_t=1 N_r=16 gamma_db=10 D1=M/2,M/4,M/8 Lg_prime=1,2,3,4,5,6,7,8,9,10 \
             channels=EVA,ETU,PedA,PedB criterion=zf trials=500"
        }
        ("fig3", Scale::Desk) => {
            "M=64 N_t=1 N_r=8 gamma_db=10 D1=M/2,M/4,M/8 Lg_prime=1,2,3,4,5,6,7,8 \
             channels=EVA,ETU,PedA,PedB criterion=zf trials=300"
        }
        ("fig4", Scale::Full) => {
            "N_t=1 N_r=16,32,64,128,256 gamma_db=10,30 D1=M/4 Lg_prime=5 \
             channels=EVA,ETU,PedA,PedB criterion=zf,mmse trials=500"
        }
        ("fig4", Scale::Desk) => {
            "M=64 N_t=1 N_r=4,16 gamma_db=10,30 D1=M/4 Lg_prime=5 channels=EVA,PedA criterion=zf,mmse trials=500"
        }
        ("fig6", Scale::Full) => {
            "N_r=16,32,64,128,256 gamma_db=10 D1=M/4 Lg_prime=3,5 schemes=two-stage,single-tap trials=500"
        }
        ("fig6", Scale::Desk) => {
            "M=64 N_t=4 N_r=8,16,32,64 gamma_db=10 D1=M/4 Lg_prime=3,5 schemes=two-stage,single-tap trials=200"
        }
        ("fig7", Scale::Full) => {
            "N_r=16 gamma_db=0,10,20,30,40,50,60 D1=M/4 Lg_prime=3,5 schemes=two-stage,single-tap trials=500"
        }
        ("fig7", Scale::Desk) => {
            "M=64 N_t=2 N_r=16 gamma_db=0,10,20,30,40,50,60 D1=M/4 Lg_prime=3,5 schemes=two-stage,single-tap trials=200"
        }
        ("fig8", Scale::Full) => {
            "N_r=64 gamma_db=0,10,20,30,40,50,60 D1=M/4 Lg_prime=3,5 schemes=two-stage,single-tap trials=500"
        }
        ("fig8", Scale::Desk) => {
            "M=64 N_t=2 N_r=64 gamma_db=0,10,20,30,40,50,60 D1=M/4 Lg_prime=3,5 schemes=two-stage,single-tap trials=200"
        }
        ("mse", Scale::Full) => {
            "N_r=16,64 gamma_db=0,10,20,30,40,50 D1=M/4 Lg_prime=5 schemes=two-stage,single-tap trials=500"
        }
        ("mse", Scale::Desk) => {
            "M=64 N_t=2 N_r=16 gamma_db=0,10,20,30,40,50 D1=M/4 Lg_prime=5 schemes=two-stage,single-tap trials=200"
        }
        _ => return None,
    })
}

fn unknown(preset: &str) -> CliError {
    CliError::Usage(format!(
        "unknown preset '{preset}', expected one of {}",
        PRESETS.join(", ")
    ))
}

/// Defaults with the preset's overrides at `scale`.
pub fn preset_config(preset: &str, scale: Scale) -> CliResult<SimConfig> {
    let text = preset_overrides(preset, scale).ok_or_else(|| unknown(preset))?;
    SimConfig::default().apply(text)
}

/// Runs the preset and returns its table without touching the filesystem.
pub fn run_table(preset: &str, cfg: &SimConfig) -> CliResult<Table> {
    let header = columns(preset).ok_or_else(|| unknown(preset))?;
    let rows = match preset {
        "fig3" => fig3(cfg)?,
        "fig4" => fig4(cfg)?,
        "fig6" => fig6(cfg)?,
        "fig7" | "fig8" => snr_sweep(cfg)?,
        "mse" => mse(cfg)?,
        _ => unreachable!("columns() accepted the preset"),
    };
    Ok(Table {
        header: header.to_vec(),
        rows,
    })
}

/// Runs the preset and writes `<preset>.csv`, the `<preset>.config` sidecar and `<preset>.py`
/// into `cfg.output`. Returns the written paths.
pub fn run_preset(preset: &str, scale: Scale, cfg: &SimConfig) -> CliResult<Vec<PathBuf>> {
    columns(preset).ok_or_else(|| unknown(preset))?;
    let dir = cfg.output.as_path();
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let table = run_table(preset, cfg)?;
    let csv_path = dir.join(format!("{preset}.csv"));
    write_csv(&csv_path, &table)?;
    let meta_path = dir.join(format!("{preset}.config"));
    write_text(&meta_path, &sidecar(preset, scale, cfg))?;
    let script_path = dir.join(format!("{preset}.py"));
    write_text(&script_path, &emit_plot_script(&csv_path)?)?;
    Ok(vec![csv_path, meta_path, script_path])
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Rendered configuration preceded by run metadata as comments, reloadable with `--config`.
pub fn sidecar(preset: &str, scale: Scale, cfg: &SimConfig) -> String {
    let mut s = format!(
        "# preset={preset} scale={} version={}\n\
         # SIR and SINR are linear means over trials, reported in dB with delta-method standard errors\n\
         # mse is averaged as dB of mean: 10 log10 of the trial mean of the per-frame MSE\n\
         # MSE frames drop {} instants at each edge; estimated CSI uses L_p pilots per antenna\n",
        scale.name(),
        env!("CARGO_PKG_VERSION"),
        2 * cfg.kappa,
    );
    s.push_str(&render(cfg));
    s
}

fn distinct_channels(cfg: &SimConfig) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in &cfg.channels {
        if !out.contains(c) {
            out.push(c.clone());
        }
    }
    out
}

fn as_points(v: &[usize]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

/// SIR versus `L'_g` for every `D1`, one single-user system per channel model. Every point of
/// a channel reuses the same draws, so the curves and the high-rate level are directly comparable.
fn fig3(cfg: &SimConfig) -> CliResult<Vec<Vec<Cell>>> {
    let d1s = cfg.d1_values();
    let gamma = cfg.gamma_db[0];
    let mut rows = Vec::new();
    for (ci, channel) in distinct_channels(cfg).iter().enumerate() {
        let setup = cfg.link(cfg.n_r[0], cfg.criterion[0], cfg.profiles(Some(channel))?)?;
        let seed = point_seed(cfg.master_seed, ci);
        let high = run_trials(&setup, Scheme::HighRate, gamma, cfg.trials, seed)?;
        for &len in &cfg.lg_prime {
            for &d1 in &d1s {
                let rep = run_trials(
                    &setup,
                    Scheme::two_stage(cfg.num_subcarriers, d1, len)?,
                    gamma,
                    cfg.trials,
                    seed,
                )?;
                rows.push(vec![
                    Cell::Int(len as i64),
                    Cell::Int(d1 as i64),
                    Cell::Text(channel.clone()),
                    Cell::Num(rep.sir_db),
                    Cell::Num(rep.sir_se_db),
                    Cell::Num(high.sir_db),
                ]);
            }
        }
    }
    Ok(rows)
}

/// Two-stage SINR versus antenna count next to the closed form, per channel, criterion and SNR.
fn fig4(cfg: &SimConfig) -> CliResult<Vec<Vec<Cell>>> {
    let scheme = Scheme::two_stage(cfg.num_subcarriers, cfg.d1_values()[0], cfg.lg_prime[0])?;
    let mut rows = Vec::new();
    let mut group = 0;
    for channel in distinct_channels(cfg) {
        let profiles = cfg.profiles(Some(&channel))?;
        for &design in &cfg.criterion {
            let setup = cfg.link(cfg.n_r[0], design, profiles.clone())?;
            for &gamma in &cfg.gamma_db {
                let seed = point_seed(cfg.master_seed, group);
                group += 1;
                let r = sweep(
                    &setup,
                    gamma,
                    Axis::Nr,
                    &as_points(&cfg.n_r),
                    &[scheme],
                    cfg.trials,
                    seed,
                )?;
                for p in &r.points {
                    let n_rx = p.x as usize;
                    let theory = match theoretical_sinr(
                        &profiles,
                        &setup.fb,
                        n_rx,
                        setup.alpha,
                        setup.subcarrier,
                        0,
                        setup.sigma2(gamma),
                        setup.symbol_power,
                    ) {
                        Ok(b) => b.sinr_db(),
                        // the closed form is undefined for profiles whose correlation vanishes
                        Err(fbmc_core::Error::DegenerateProfile { .. }) => f64::NAN,
                        Err(e) => return Err(e.into()),
                    };
                    let rep = &p.reports[0];
                    rows.push(vec![
                        Cell::Text(channel.clone()),
                        Cell::Text(criterion_name(design).into()),
                        Cell::Num(gamma),
                        Cell::Int(n_rx as i64),
                        Cell::Num(rep.sinr_db),
                        Cell::Num(rep.sinr_se_db),
                        Cell::Num(theory),
                    ]);
                }
            }
        }
    }
    Ok(rows)
}

/// Multi-user SINR versus antenna count for every configured scheme.
fn fig6(cfg: &SimConfig) -> CliResult<Vec<Vec<Cell>>> {
    let schemes = cfg.expanded_schemes()?;
    let profiles = cfg.profiles(None)?;
    let mut rows = Vec::new();
    for (di, &design) in cfg.criterion.iter().enumerate() {
        let setup = cfg.link(cfg.n_r[0], design, profiles.clone())?;
        let seed = point_seed(cfg.master_seed, di);
        let r = sweep(
            &setup,
            cfg.gamma_db[0],
            Axis::Nr,
            &as_points(&cfg.n_r),
            &schemes,
            cfg.trials,
            seed,
        )?;
        for p in &r.points {
            for rep in &p.reports {
                rows.push(vec![
                    Cell::Int(p.x as i64),
                    Cell::Text(criterion_name(design).into()),
                    Cell::Text(rep.scheme.clone()),
                    Cell::Num(rep.sinr_db),
                    Cell::Num(rep.sinr_se_db),
                    Cell::Num(rep.sir_db),
                ]);
            }
        }
    }
    Ok(rows)
}

/// Multi-user SINR versus transmit SNR with the back-to-back SIR bound.
fn snr_sweep(cfg: &SimConfig) -> CliResult<Vec<Vec<Cell>>> {
    let schemes = cfg.expanded_schemes()?;
    let profiles = cfg.profiles(None)?;
    let mut rows = Vec::new();
    let mut group = 0;
    for &n_rx in &cfg.n_r {
        for &design in &cfg.criterion {
            let setup = cfg.link(n_rx, design, profiles.clone())?;
            let bound = sir_upper_bound(&setup.fb, setup.subcarrier)?;
            let seed = point_seed(cfg.master_seed, group);
            group += 1;
            let r = sweep(&setup, 0.0, Axis::GammaDb, &cfg.gamma_db, &schemes, cfg.trials, seed)?;
            for p in &r.points {
                for rep in &p.reports {
                    rows.push(vec![
                        Cell::Num(p.x),
                        Cell::Int(n_rx as i64),
                        Cell::Text(criterion_name(design).into()),
                        Cell::Text(rep.scheme.clone()),
                        Cell::Num(rep.sinr_db),
                        Cell::Num(rep.sinr_se_db),
                        Cell::Num(bound),
                    ]);
                }
            }
        }
    }
    Ok(rows)
}

/// 16-QAM frame MSE versus transmit SNR under perfect and estimated channel knowledge.
fn mse(cfg: &SimConfig) -> CliResult<Vec<Vec<Cell>>> {
    let schemes = cfg.expanded_schemes()?;
    let profiles = cfg.profiles(None)?;
    let frame = MseFrame::new(cfg.n_d, 2 * cfg.kappa)?;
    let modes = [
        ("p_csi", CsiMode::Perfect),
        ("i_csi", CsiMode::Estimated { training: cfg.l_p }),
    ];
    let mut rows = Vec::new();
    let mut group = 0;
    for &n_rx in &cfg.n_r {
        for &design in &cfg.criterion {
            let setup = cfg.link(n_rx, design, profiles.clone())?;
            for &gamma in &cfg.gamma_db {
                // every scheme and both CSI modes see the same channel draws at one point
                let seed = point_seed(cfg.master_seed, group);
                group += 1;
                for &scheme in &schemes {
                    for (label, mode) in modes {
                        let r = run_mse(&setup, scheme, mode, gamma, frame, cfg.trials, seed)?;
                        rows.push(vec![
                            Cell::Num(gamma),
                            Cell::Int(n_rx as i64),
                            Cell::Text(criterion_name(design).into()),
                            Cell::Text(r.scheme.clone()),
                            Cell::Text(label.into()),
                            Cell::Num(r.mse),
                            Cell::Num(r.mse_db),
                            Cell::Num(r.mse_se_db),
                        ]);
                    }
                }
            }
        }
    }
    Ok(rows)
}
