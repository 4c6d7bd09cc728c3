//! Stage 1: high-rate multi-tap MIMO equalizers designed per frequency bin
//! (ZF or MMSE) and realized in time by frequency sampling, plus the
//! per-subcarrier single-tap baseline.

use fbmc_channel::{ChannelRealization, FreqCsi};
use rayon::prelude::*;

use fbmc_core::{cis, CMat, ComplexGrid, Dft, Error, Qr, Real, Result, SampleStream, C};

/// Bins whose Gram matrix `H^H H` has a larger condition number are singular under ZF.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Criterion {
    ZeroForcing,
    Mmse { noise_var: f64, symbol_power: f64 },
}

impl Criterion {
    /// Regularization `sigma_z^2 / P_s` (zero for ZF).
    pub fn regularization(&self) -> f64 {
        match *self {
            Criterion::ZeroForcing => 0.0,
            Criterion::Mmse {
                noise_var,
                symbol_power,
            } => noise_var / symbol_power,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Criterion::ZeroForcing => "ZF",
            Criterion::Mmse { .. } => "MMSE",
        }
    }
}

/// `e^{-j omega_k alpha M / 2}` with `omega_k = 2 pi k / K`.
pub fn delay_phase<T: Real>(k: usize, n_bins: usize, alpha: usize, m: usize) -> C<T> {
    let two_k = 2 * n_bins;
    let r = (k * alpha % two_k) * m % two_k;
    cis(-std::f64::consts::PI * r as f64 / n_bins as f64)
}

/// Largest admissible delay `ceil(2 (L_h + L_g - 1) / M) - 1`.
pub fn max_delay(channel_len: usize, eq_len: usize, m: usize) -> usize {
    (2 * (channel_len + eq_len - 1)).div_ceil(m).saturating_sub(1)
}

/// True when `L_g` is below the `M` sampling points the frequency-sampling design needs.
pub fn undersampled(eq_len: usize, m: usize) -> bool {
    eq_len < m
}

/// True when `alpha = 1` and `M >= 2 (L_h - 1)`, the regime where the residual
/// interference is known to vanish as `N_r` grows.
pub fn asymptotic_regime(alpha: usize, channel_len: usize, m: usize) -> bool {
    alpha == 1 && m >= 2 * channel_len.saturating_sub(1)
}

pub fn validate_delay(alpha: usize, channel_len: usize, eq_len: usize, m: usize) -> Result<()> {
    let hi = max_delay(channel_len, eq_len, m);
    if alpha > hi {
        return Err(Error::invalid(
            "alpha",
            alpha,
            format!("0..={hi} for L_h={channel_len}, L_g={eq_len}, M={m}"),
        ));
    }
    Ok(())
}

/// `(H^H H + lambda I)^{-1} H^H`, via QR of `H` (ZF) or of `[H; sqrt(lambda) I]`.
/// ZF fails with `SingularChannel` when that estimate exceeds [`SINGULAR_CONDITION`].
fn regularized_inverse<T: Real>(h: &CMat<T>, lambda: f64, bin: usize, omega: f64) -> Result<CMat<T>> {
    let (nr, nt) = (h.rows(), h.cols());
    if lambda == 0.0 {
        if nr < nt {
            return Err(Error::invalid("N_r", nr, format!(">= N_t = {nt} for zero forcing")));
        }
        let qr = Qr::new(h)?;
        let condition = qr.gram_condition();
        if condition.is_nan() || condition > SINGULAR_CONDITION {
            return Err(Error::SingularChannel { bin, omega, condition });
        }
        return qr.solve(&CMat::identity(nr));
    }
    let s = C::new(T::lit(lambda.sqrt()), T::zero());
    let stacked = h.vstack(&CMat::identity(nt).scale(s))?;
    let rhs = CMat::identity(nr).vstack(&CMat::zeros(nt, nr))?;
    Qr::new(&stacked)?.solve(&rhs)
}

fn omega(k: usize, n_bins: usize) -> f64 {
    2.0 * std::f64::consts::PI * k as f64 / n_bins as f64
}

/// ZF response `G~(omega_k) = (H~^H H~)^{-1} H~^H e^{-j omega_k alpha M/2}` at bin `k` of `csi`.
pub fn zf_freq_response<T: Real>(csi: &FreqCsi<T>, k: usize, alpha: usize, m: usize) -> Result<CMat<T>> {
    let g = regularized_inverse(csi.bin(k), 0.0, k, omega(k, csi.n_bins()))?;
    Ok(g.scale(delay_phase(k, csi.n_bins(), alpha, m)))
}

/// MMSE response `(H~^H H~ + sigma2/P_s I)^{-1} H~^H e^{-j omega_k alpha M/2}`.
/// A zero noise variance takes the ZF path.
pub fn mmse_freq_response<T: Real>(
    csi: &FreqCsi<T>,
    k: usize,
    alpha: usize,
    m: usize,
    noise_var: f64,
    symbol_power: f64,
) -> Result<CMat<T>> {
    if noise_var < 0.0 || noise_var.is_nan() {
        return Err(Error::NegativeVariance(noise_var));
    }
    if symbol_power.is_nan() || symbol_power <= 0.0 {
        return Err(Error::invalid("P_s", symbol_power, "> 0"));
    }
    if noise_var == 0.0 {
        return zf_freq_response(csi, k, alpha, m);
    }
    let g = regularized_inverse(csi.bin(k), noise_var / symbol_power, k, omega(k, csi.n_bins()))?;
    Ok(g.scale(delay_phase(k, csi.n_bins(), alpha, m)))
}

/// Frequency response at bin `k` under `criterion`.
pub fn freq_response<T: Real>(
    csi: &FreqCsi<T>,
    k: usize,
    alpha: usize,
    m: usize,
    criterion: Criterion,
) -> Result<CMat<T>> {
    match criterion {
        Criterion::ZeroForcing => zf_freq_response(csi, k, alpha, m),
        Criterion::Mmse {
            noise_var,
            symbol_power,
        } => mmse_freq_response(csi, k, alpha, m, noise_var, symbol_power),
    }
}

/// Time-domain high-rate equalizer `G[l]`, `N_t x N_r x L_g`.
#[derive(Clone, Debug, PartialEq)]
pub struct HighRateEqualizer<T> {
    n_tx: usize,
    n_rx: usize,
    len: usize,
    taps: Vec<C<T>>,
    delay: usize,
    criterion: Criterion,
}

impl<T: Real> HighRateEqualizer<T> {
    /// Wraps explicit taps laid out `[(u * n_rx + r) * len + l]`.
    pub fn from_taps(
        n_tx: usize,
        n_rx: usize,
        len: usize,
        taps: Vec<C<T>>,
        delay: usize,
        criterion: Criterion,
    ) -> Result<Self> {
        if taps.len() != n_tx * n_rx * len {
            return Err(Error::DimensionMismatch {
                what: "equalizer tap count",
                left: taps.len(),
                right: n_tx * n_rx * len,
            });
        }
        Ok(HighRateEqualizer {
            n_tx,
            n_rx,
            len,
            taps,
            delay,
            criterion,
        })
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    /// `L_g`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `alpha`.
    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    #[inline]
    pub fn tap(&self, u: usize, r: usize, l: usize) -> C<T> {
        self.taps[(u * self.n_rx + r) * self.len + l]
    }

    /// `g^{u,r}[l]`, the `(u, r)` entry of `G[l]`.
    pub fn impulse(&self, u: usize, r: usize) -> &[C<T>] {
        let i = (u * self.n_rx + r) * self.len;
        &self.taps[i..i + self.len]
    }

    /// `G[l]` as an `N_t x N_r` matrix.
    pub fn matrix(&self, l: usize) -> CMat<T> {
        CMat::from_fn(self.n_tx, self.n_rx, |u, r| self.tap(u, r, l))
    }

    pub fn is_finite(&self) -> bool {
        self.taps.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Frequency-sampling realization `G[l] = (1/L_g) sum_k G~(2 pi k / L_g) e^{j 2 pi l k / L_g}`.
/// `designer(k)` returns the `N_t x N_r` response at bin `k`.
pub fn frequency_sample<T: Real>(
    designer: impl Fn(usize) -> Result<CMat<T>> + Sync,
    n_bins: usize,
    alpha: usize,
    criterion: Criterion,
) -> Result<HighRateEqualizer<T>> {
    if n_bins == 0 {
        return Err(Error::invalid("L_g", 0, ">= 1"));
    }
    let responses = (0..n_bins)
        .into_par_iter()
        .map(|k| {
            designer(k).map_err(|e| match e {
                Error::SingularChannel { omega, condition, .. } => Error::SingularChannel {
                    bin: k,
                    omega,
                    condition,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (n_tx, n_rx) = (responses[0].rows(), responses[0].cols());
    let dft = Dft::new(n_bins);
    let mut taps = Vec::with_capacity(n_tx * n_rx * n_bins);
    for u in 0..n_tx {
        for r in 0..n_rx {
            let spectrum: Vec<C<T>> = responses.iter().map(|g| g[(u, r)]).collect();
            taps.extend(dft.inverse(&spectrum));
        }
    }
    HighRateEqualizer::from_taps(n_tx, n_rx, n_bins, taps, alpha, criterion)
}

/// Designs `G[l]` from `csi` with `L_g = csi.n_bins()`.
pub fn design_highrate<T: Real>(
    csi: &FreqCsi<T>,
    criterion: Criterion,
    alpha: usize,
    m: usize,
) -> Result<HighRateEqualizer<T>> {
    frequency_sample(
        |k| freq_response(csi, k, alpha, m, criterion),
        csi.n_bins(),
        alpha,
        criterion,
    )
}

/// `x^u = sum_r g^{u,r} * y^r`; output length grows by `L_g - 1`.
pub fn apply_highrate<T: Real>(y: &SampleStream<T>, eq: &HighRateEqualizer<T>) -> Result<SampleStream<T>> {
    if y.n_channels() != eq.n_rx() {
        return Err(Error::DimensionMismatch {
            what: "antenna streams vs equalizer inputs",
            left: y.n_channels(),
            right: eq.n_rx(),
        });
    }
    let out_len = y.frame_len() + eq.len() - 1;
    let mut out = Vec::with_capacity(eq.n_tx());
    for u in 0..eq.n_tx() {
        let mut acc = vec![C::new(T::zero(), T::zero()); out_len];
        for r in 0..eq.n_rx() {
            for (j, &g) in eq.impulse(u, r).iter().enumerate() {
                if g.re == T::zero() && g.im == T::zero() {
                    continue;
                }
                for (i, &v) in y.channel(r).iter().enumerate() {
                    acc[i + j] = acc[i + j] + g * v;
                }
            }
        }
        out.push(acc);
    }
    SampleStream::new(out)
}

/// `H_eq[l] = (G * H)[l]`, `l = 0..L_g + L_h - 2`, each `N_t x N_t`.
pub fn equivalent_channel<T: Real>(eq: &HighRateEqualizer<T>, h: &ChannelRealization<T>) -> Result<Vec<CMat<T>>> {
    if eq.n_rx() != h.n_rx() {
        return Err(Error::DimensionMismatch {
            what: "equalizer inputs vs channel outputs",
            left: eq.n_rx(),
            right: h.n_rx(),
        });
    }
    let len = eq.len() + h.len() - 1;
    let mut out = vec![CMat::zeros(eq.n_tx(), h.n_tx()); len];
    for u in 0..eq.n_tx() {
        for v in 0..h.n_tx() {
            for r in 0..eq.n_rx() {
                let g = eq.impulse(u, r);
                let hh = h.impulse(r, v);
                for (i, &a) in g.iter().enumerate() {
                    for (j, &b) in hh.iter().enumerate() {
                        out[i + j][(u, v)] = out[i + j][(u, v)] + a * b;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Per-subcarrier combiners `W_m` (`N_t x N_r`) at `omega = 2 pi m / M` without delay phase.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleTapEqualizer<T> {
    weights: Vec<CMat<T>>,
    criterion: Criterion,
}

impl<T: Real> SingleTapEqualizer<T> {
    pub fn weights(&self, m: usize) -> &CMat<T> {
        &self.weights[m]
    }

    pub fn num_subcarriers(&self) -> usize {
        self.weights.len()
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }
}

/// Designs `W_m` from CSI sampled at the `M` subcarrier centres.
pub fn single_tap<T: Real>(csi: &FreqCsi<T>, criterion: Criterion) -> Result<SingleTapEqualizer<T>> {
    let weights = (0..csi.n_bins())
        .map(|k| freq_response(csi, k, 0, 0, criterion))
        .collect::<Result<Vec<_>>>()?;
    Ok(SingleTapEqualizer { weights, criterion })
}

/// `d^_{m,n} = W_m d_{m,n}`; the input grid's user axis indexes receive antennas.
pub fn apply_single_tap<T: Real>(d: &ComplexGrid<T>, eq: &SingleTapEqualizer<T>) -> Result<ComplexGrid<T>> {
    if d.subcarriers() != eq.num_subcarriers() {
        return Err(Error::DimensionMismatch {
            what: "grid subcarriers vs single-tap bins",
            left: d.subcarriers(),
            right: eq.num_subcarriers(),
        });
    }
    let n_rx = eq.weights[0].cols();
    let n_tx = eq.weights[0].rows();
    if d.users() != n_rx {
        return Err(Error::DimensionMismatch {
            what: "antenna grids vs single-tap inputs",
            left: d.users(),
            right: n_rx,
        });
    }
    Ok(ComplexGrid::from_fn(n_tx, d.subcarriers(), d.instants(), |u, m, n| {
        let w = &eq.weights[m];
        (0..n_rx).fold(C::new(T::zero(), T::zero()), |acc, r| acc + w[(u, r)] * d.get(r, m, n))
    }))
}

pub type HighRateEqualizerF64 = HighRateEqualizer<f64>;
pub type SingleTapEqualizerF64 = SingleTapEqualizer<f64>;
