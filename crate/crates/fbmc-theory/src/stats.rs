//! Second-order statistics of the equalization error `Psi[l] = (G * H)[l] - Delta[l - alpha M/2]`
//! under ZF frequency-sampling design, in the large-array MISO approximation.

use std::f64::consts::PI;

use fbmc_channel::PdpProfile;
use fbmc_core::{CMat, Error, Result, C};

type C64 = C<f64>;

/// Below this magnitude a correlation coefficient is treated as degenerate.
pub const TAU_FLOOR: f64 = 1e-8;

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// `e^{j 2 pi k / M}` with `k` reduced exactly.
fn root(k: i64, m: usize) -> C64 {
    let r = k.rem_euclid(m as i64);
    cis(2.0 * PI * r as f64 / m as f64)
}

/// `t(d) = sum_l q[l] e^{j 2 pi d l / M}` for `d = 0..M`; `tau_{m m'} = t(m - m')`.
pub fn tau_series(profile: &PdpProfile, m: usize) -> Vec<C64> {
    (0..m)
        .map(|d| {
            profile
                .taps()
                .iter()
                .enumerate()
                .map(|(l, &q)| root((d * l) as i64, m) * q)
                .sum()
        })
        .collect()
}

/// Correlation matrix `tau_{m m'} = sum_l q[l] e^{j 2 pi (m - m') l / M}`.
pub fn tau(profile: &PdpProfile, m: usize) -> CMat<f64> {
    let t = tau_series(profile, m);
    CMat::from_fn(m, m, |a, b| t[(a + m - b) % m])
}

/// Kernels over the subcarrier offset `d`: reciprocals of `t(d)` and their DFTs.
#[derive(Clone, Debug)]
pub(crate) struct Kernels {
    m: usize,
    /// `S(b) = sum_d e^{-j 2 pi d b / M} / t(d)`
    s_minus: Vec<C64>,
    /// `sum_d e^{+j 2 pi d b / M} / |t(d)|^2`
    r_plus: Vec<C64>,
}

impl Kernels {
    pub(crate) fn new(profile: &PdpProfile, m: usize) -> Result<Self> {
        let t = tau_series(profile, m);
        for (d, z) in t.iter().enumerate() {
            if z.norm() < TAU_FLOOR {
                return Err(Error::DegenerateProfile {
                    magnitude: z.norm(),
                    offset: d,
                });
            }
        }
        let s: Vec<C64> = t.iter().map(|z| z.inv()).collect();
        let r: Vec<f64> = t.iter().map(|z| 1.0 / z.norm_sqr()).collect();
        let s_minus = (0..m)
            .map(|b| (0..m).map(|d| s[d] * root(-((d * b) as i64), m)).sum())
            .collect();
        let r_plus = (0..m)
            .map(|b| (0..m).map(|d| root((d * b) as i64, m) * r[d]).sum())
            .collect();
        Ok(Kernels { m, s_minus, r_plus })
    }

    fn md(&self, x: i64) -> usize {
        x.rem_euclid(self.m as i64) as usize
    }

    /// `sum_{m, m'} e^{j 2 pi m a / M} e^{-j 2 pi m' b / M} / t(m' - m)`.
    fn t_kernel(&self, a: i64, b: i64) -> C64 {
        if self.md(a - b) != 0 {
            return C64::new(0.0, 0.0);
        }
        self.s_minus[self.md(b)] * self.m as f64
    }

    /// `S(b)` at an integer argument.
    pub(crate) fn s(&self, b: i64) -> C64 {
        self.s_minus[self.md(b)]
    }

    /// `sum_{m, m'} f(m' - m) e^{j 2 pi m a / M} e^{j 2 pi m' b / M}` given `F+(b) = sum_d f(d) e^{j 2 pi d b / M}`.
    fn u_kernel(&self, a: i64, b: i64, f_plus: C64) -> C64 {
        if self.md(a + b) != 0 {
            return C64::new(0.0, 0.0);
        }
        f_plus * self.m as f64
    }
}

/// `epsilon_{l l'} = E{psi[l] psi*[l']}` and `epsilon_check_{l l'} = E{psi[l] psi[l']}` for one
/// user pair, over `l, l' = 0..M + L_h - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorStats {
    len: usize,
    channel_len: usize,
    num_subcarriers: usize,
    n_rx: usize,
    users: (usize, usize),
    tau: CMat<f64>,
    eps: Vec<C64>,
    eps_check: Vec<C64>,
    support: Vec<(usize, usize)>,
}

impl ErrorStats {
    /// Statistics of a perfect equalizer (`psi = 0`), e.g. for the deterministic filter-bank terms.
    pub fn perfect(profile: &PdpProfile, m: usize, channel_len: usize, n_rx: usize, users: (usize, usize)) -> Self {
        let len = m + channel_len.max(1) - 1;
        ErrorStats {
            len,
            channel_len,
            num_subcarriers: m,
            n_rx,
            users,
            tau: tau(profile, m),
            eps: vec![C64::new(0.0, 0.0); len * len],
            eps_check: vec![C64::new(0.0, 0.0); len * len],
            support: Vec::new(),
        }
    }

    /// `M + L_h - 1`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn channel_len(&self) -> usize {
        self.channel_len
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn users(&self) -> (usize, usize) {
        self.users
    }

    /// `tau_{m m'}` of the column user `u'`.
    pub fn tau(&self) -> &CMat<f64> {
        &self.tau
    }

    pub fn eps(&self, l: usize, lp: usize) -> C64 {
        self.eps[l * self.len + lp]
    }

    pub fn eps_check(&self, l: usize, lp: usize) -> C64 {
        self.eps_check[l * self.len + lp]
    }

    /// Index pairs where either statistic is nonzero.
    pub fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    /// Real covariance of `[Re psi; Im psi]`, `2L x 2L`, row-major.
    pub fn psi_cov(&self) -> Vec<f64> {
        let l = self.len;
        let n = 2 * l;
        let mut out = vec![0.0; n * n];
        for i in 0..l {
            for j in 0..l {
                let (e, c) = (self.eps(i, j), self.eps_check(i, j));
                out[i * n + j] = 0.5 * (e + c).re;
                out[i * n + l + j] = 0.5 * (c - e).im;
                out[(l + i) * n + j] = 0.5 * (e + c).im;
                out[(l + i) * n + l + j] = 0.5 * (e - c).re;
            }
        }
        out
    }

    /// `E{(Re sum_l psi[l] x[l])^2}` for a coefficient vector `x` of length `L`.
    pub fn real_quadratic_form(&self, x: &[C64]) -> f64 {
        let mut a = C64::new(0.0, 0.0);
        let mut b = C64::new(0.0, 0.0);
        for &(i, j) in &self.support {
            a += x[i] * self.eps(i, j) * x[j].conj();
            b += x[i] * x[j] * self.eps_check(i, j);
        }
        0.5 * (a.re + b.re)
    }
}

/// Range of channel taps `[max(0, l - (M-1)), min(l, L_h - 1)]` feeding `H_eq[l]`.
fn tap_range(l: usize, m: usize, lh: usize) -> std::ops::RangeInclusive<usize> {
    l.saturating_sub(m - 1)..=l.min(lh - 1)
}

/// Error statistics for user pair `(u, u')` with ZF equalizers over `N_r` antennas.
/// `profiles[u]` is the PDP of user `u`; all are zero-padded to the longest.
pub fn error_stats(
    profiles: &[PdpProfile],
    m: usize,
    n_rx: usize,
    alpha: usize,
    users: (usize, usize),
) -> Result<ErrorStats> {
    let (u, up) = users;
    if u >= profiles.len() || up >= profiles.len() {
        return Err(Error::invalid(
            "user pair",
            format!("{users:?}"),
            format!("indices below N_t = {}", profiles.len()),
        ));
    }
    if n_rx == 0 {
        return Err(Error::invalid("N_r", 0, ">= 1"));
    }
    let lh = profiles.iter().map(|p| p.len()).max().unwrap_or(1);
    if lh > m {
        return Err(Error::invalid("L_h", lh, format!("L_h - 1 < M = {m}")));
    }
    let len = m + lh - 1;
    let c = (alpha * m / 2) as i64;
    // the equalizer of user u sets the 1/tau weighting
    let ker = Kernels::new(&profiles[u], m)?;
    let q: Vec<f64> = (0..lh).map(|l| profiles[up].tap(l)).collect();
    let mm = m as i64;
    let scale = 1.0 / ((m * m) as f64 * n_rx as f64);
    let exact = |l: usize| l + 1 >= lh && l < m;
    let delta = |x: i64| x.rem_euclid(mm) == 0;
    let qsum: Vec<f64> = (0..len).map(|l| tap_range(l, m, lh).map(|k| q[k]).sum()).collect();

    let mut eps = vec![C64::new(0.0, 0.0); len * len];
    let mut eps_check = vec![C64::new(0.0, 0.0); len * len];
    let mut support = Vec::new();
    for l in 0..len {
        if exact(l) {
            continue;
        }
        for lp in 0..len {
            if exact(lp) {
                continue;
            }
            let (li, lpi) = (l as i64, lp as i64);
            let (ra, rb) = (tap_range(l, m, lh), tap_range(lp, m, lh));
            let common = *ra.start().max(rb.start())..=*ra.end().min(rb.end());
            let mut e = C64::new(0.0, 0.0);
            let mut ec = C64::new(0.0, 0.0);
            if delta(li - lpi) {
                for k in common.clone() {
                    let ki = k as i64;
                    e += ker.t_kernel(li - ki - c, lpi - ki - c) * q[k];
                }
            }
            if u == up {
                if delta(li - lpi) {
                    for k in rb.clone() {
                        let ki = k as i64;
                        e -= ker.t_kernel(li - ki - c, lpi - ki - c) * (qsum[l] * q[k]);
                    }
                    for k in ra.clone() {
                        let ki = k as i64;
                        e -= ker.t_kernel(li - ki - c, lpi - ki - c) * (qsum[lp] * q[k]);
                    }
                    if delta(li - c) && delta(lpi - c) {
                        e += qsum[l] * qsum[lp] * (m * m) as f64;
                    }
                }
                if delta(li + lpi - 2 * c) {
                    for k in ra.clone() {
                        for kp in rb.clone() {
                            let (ki, kpi) = (k as i64, kp as i64);
                            let w = q[k] * q[kp];
                            let b1 = lpi - kpi + ki - c;
                            let mut acc = ker.u_kernel(li - ki + kpi - c, b1, ker.r_plus[b1.rem_euclid(mm) as usize]);
                            let b2 = lpi - kpi - c;
                            acc -= ker.u_kernel(li + kpi - c, b2, ker.s(b2));
                            let b3 = lpi + ki - c;
                            acc -= ker.u_kernel(li - ki - c, b3, ker.s(-b3));
                            if delta(li - c) && delta(lpi - c) {
                                acc += (m * m) as f64;
                            }
                            ec += acc * w;
                        }
                    }
                }
            }
            e *= scale;
            ec *= scale;
            if e != C64::new(0.0, 0.0) || ec != C64::new(0.0, 0.0) {
                eps[l * len + lp] = e;
                eps_check[l * len + lp] = ec;
                support.push((l, lp));
            }
        }
    }
    let col_profile = &profiles[up];
    Ok(ErrorStats {
        len,
        channel_len: lh,
        num_subcarriers: m,
        n_rx,
        users,
        tau: tau(col_profile, m),
        eps,
        eps_check,
        support,
    })
}
