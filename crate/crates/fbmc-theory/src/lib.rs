//! Closed-form performance analysis of ZF-equalized FBMC-OQAM massive MIMO uplinks:
//! equalization-error statistics, interference and noise powers, theoretical SINR and
//! the SIR ceiling of the filter bank itself.
//!
//! The statistics follow a large-array MISO approximation: per-subcarrier ZF weights
//! satisfy `E{w_m^H w_m'} ~ 1 / (N_r tau_{m' m})` with `tau` the PDP correlation.

mod stats;
mod table;

use fbmc_channel::PdpProfile;
use fbmc_core::{Error, FilterBank, Result};

pub use stats::{error_stats, tau, tau_series, ErrorStats, TAU_FLOOR};
pub use table::{interference_table, InterferenceEntry, InterferenceTable};

use stats::Kernels;

/// `P_bar = P_s E{(Re sum_l psi[l] F[l])^2} + P_s (Re F[alpha M/2])^2 [u = u']`.
pub fn average_power(stats: &ErrorStats, entry: &InterferenceEntry, symbol_power: f64) -> f64 {
    let (u, up) = stats.users();
    let direct = if u == up { entry.direct * entry.direct } else { 0.0 };
    symbol_power * (stats.real_quadratic_form(&entry.coeffs) + direct)
}

/// Average power of the noise in the real-valued estimate on subcarrier `m`, for user
/// `profile` with ZF equalization over `N_r` antennas and per-antenna noise variance `sigma2`.
pub fn noise_power(
    profile: &PdpProfile,
    fb: &FilterBank<f64>,
    n_rx: usize,
    alpha: usize,
    sigma2: f64,
    m: usize,
) -> Result<f64> {
    let big_m = fb.num_subcarriers();
    if sigma2.is_nan() || sigma2 < 0.0 {
        return Err(Error::invalid("sigma_z^2", sigma2, ">= 0"));
    }
    if n_rx == 0 {
        return Err(Error::invalid("N_r", 0, ">= 1"));
    }
    let ker = Kernels::new(profile, big_m)?;
    let f = fb.subcarrier_filter(m);
    let lf = f.len() as isize;
    let c = (alpha * big_m / 2) as i64;
    let mut acc = 0.0;
    for k in 0..big_m as isize {
        // sum over l in [1 - L_f, M - 1] of |f_m[k - l]|^2
        let energy: f64 = (1 - lf..big_m as isize)
            .filter_map(|l| f.get((k - l) as usize).filter(|_| k - l >= 0))
            .map(|z| z.norm_sqr())
            .sum();
        acc += (ker.s(k as i64 - c) * big_m as f64 * energy).re;
    }
    Ok(sigma2 / (2.0 * (big_m * big_m) as f64 * n_rx as f64) * acc)
}

/// Terms of the SINR on one subcarrier of one user.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrBreakdown {
    pub signal: f64,
    /// Interference from the user's own other symbols.
    pub self_interference: f64,
    /// Interference from all other users.
    pub inter_user: f64,
    pub noise: f64,
}

impl SinrBreakdown {
    pub fn sinr(&self) -> f64 {
        self.signal / (self.self_interference + self.inter_user + self.noise)
    }

    pub fn sinr_db(&self) -> f64 {
        10.0 * self.sinr().log10()
    }

    pub fn sir_db(&self) -> f64 {
        10.0 * (self.signal / (self.self_interference + self.inter_user)).log10()
    }
}

/// Combines per-pair statistics (one per column user `u'`, row user fixed) with a table.
pub fn sinr_from_parts(
    stats: &[ErrorStats],
    table: &InterferenceTable,
    symbol_power: f64,
    noise: f64,
) -> SinrBreakdown {
    let m = table.subcarrier();
    let mut out = SinrBreakdown {
        signal: 0.0,
        self_interference: 0.0,
        inter_user: 0.0,
        noise,
    };
    for st in stats {
        let (u, up) = st.users();
        for e in table.entries() {
            let p = average_power(st, e, symbol_power);
            if u != up {
                out.inter_user += p;
            } else if e.m_prime == m && e.dn == 0 {
                out.signal += p;
            } else {
                out.self_interference += p;
            }
        }
    }
    out
}

/// Theoretical SINR of user `u` on subcarrier `m` with ZF equalization.
/// `profiles[u']` is the PDP of every user in the system.
#[allow(clippy::too_many_arguments)]
pub fn theoretical_sinr(
    profiles: &[PdpProfile],
    fb: &FilterBank<f64>,
    n_rx: usize,
    alpha: usize,
    m: usize,
    u: usize,
    sigma2: f64,
    symbol_power: f64,
) -> Result<SinrBreakdown> {
    let big_m = fb.num_subcarriers();
    let stats = (0..profiles.len())
        .map(|up| error_stats(profiles, big_m, n_rx, alpha, (u, up)))
        .collect::<Result<Vec<_>>>()?;
    let table = interference_table(fb, m, alpha, stats[0].len())?;
    let noise = noise_power(&profiles[u], fb, n_rx, alpha, sigma2, m)?;
    Ok(sinr_from_parts(&stats, &table, symbol_power, noise))
}

/// SIR of a back-to-back link with an ideal channel on subcarrier `m`, in dB.
pub fn sir_upper_bound(fb: &FilterBank<f64>, m: usize) -> Result<f64> {
    let table = interference_table(fb, m, 0, 1)?;
    let mut signal = 0.0;
    let mut interference = 0.0;
    for e in table.entries() {
        let p = e.direct * e.direct;
        if e.m_prime == m && e.dn == 0 {
            signal += p;
        } else {
            interference += p;
        }
    }
    Ok(10.0 * (signal / interference).log10())
}
