//! Deterministic interference coefficients of one channel realization.

use fbmc_channel::ChannelRealization;
use fbmc_core::scalar::to_c64;
use fbmc_core::{phase_factor, Complex64, Error, FilterBank, Real, Result, Seq};

use crate::scheme::Combiners;
use crate::stats::NeumaierSum;

/// Cached transmultiplexer responses `F_{m m'}` for one target subcarrier.
#[derive(Clone, Debug)]
pub struct CoeffContext {
    m: usize,
    num_subcarriers: usize,
    filter_len: usize,
    responses: Vec<Vec<Complex64>>,
    analysis: Seq<f64>,
}

impl CoeffContext {
    pub fn new<T: Real>(fb: &FilterBank<T>, m: usize) -> Result<Self> {
        let big_m = fb.num_subcarriers();
        if m >= big_m {
            return Err(Error::invalid("m", m, format!("< M = {big_m}")));
        }
        let responses = (0..big_m)
            .map(|mp| fb.transmux_response(m, mp).data.iter().map(|&z| to_c64(z)).collect())
            .collect();
        let analysis = to_seq64(&fb.analysis_filter(m));
        Ok(CoeffContext {
            m,
            num_subcarriers: big_m,
            filter_len: fb.filter_len(),
            responses,
            analysis,
        })
    }

    pub fn subcarrier(&self) -> usize {
        self.m
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }
}

/// `R_{m m', n n'}^{u u'}` indexed by `dn = n - n'`; the desired term is excluded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficient {
    pub user: usize,
    pub m_prime: usize,
    pub dn: isize,
    pub value: f64,
}

/// All coefficients reaching output `(m, u)` together with the noise gain.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub subcarrier: usize,
    pub user: usize,
    pub desired: f64,
    pub terms: Vec<Coefficient>,
    /// Real-part noise gain `1/2 sum_r ||a_m * eq^r||^2`; noise power is `sigma^2` times this.
    pub noise_gain: f64,
}

impl Coefficients {
    pub fn signal_power(&self, symbol_power: f64) -> f64 {
        symbol_power * self.desired * self.desired
    }

    fn power_where(&self, symbol_power: f64, keep: impl Fn(&Coefficient) -> bool) -> f64 {
        let s: NeumaierSum = self
            .terms
            .iter()
            .filter(|c| keep(c))
            .map(|c| c.value * c.value)
            .collect();
        symbol_power * s.value()
    }

    /// Interference from the same user (ISI and ICI).
    pub fn self_interference(&self, symbol_power: f64) -> f64 {
        self.power_where(symbol_power, |c| c.user == self.user)
    }

    /// Interference from other users.
    pub fn inter_user(&self, symbol_power: f64) -> f64 {
        self.power_where(symbol_power, |c| c.user != self.user)
    }

    pub fn interference_power(&self, symbol_power: f64) -> f64 {
        self.power_where(symbol_power, |_| true)
    }

    pub fn noise_power(&self, sigma2: f64) -> f64 {
        sigma2 * self.noise_gain
    }

    /// Mean squared estimation error of the real symbol for i.i.d. inputs of power `symbol_power`.
    pub fn mse(&self, symbol_power: f64, sigma2: f64) -> f64 {
        symbol_power * (self.desired - 1.0).powi(2) + self.interference_power(symbol_power) + self.noise_power(sigma2)
    }

    pub fn coefficient(&self, user: usize, m_prime: usize, dn: isize) -> f64 {
        if user == self.user && m_prime == self.subcarrier && dn == 0 {
            return self.desired;
        }
        self.terms
            .iter()
            .find(|c| c.user == user && c.m_prime == m_prime && c.dn == dn)
            .map_or(0.0, |c| c.value)
    }
}

fn to_seq64<T: Real>(s: &Seq<T>) -> Seq<f64> {
    Seq::new(s.start, s.data.iter().map(|&z| to_c64(z)).collect())
}

fn add_seq(a: Seq<f64>, b: Seq<f64>) -> Seq<f64> {
    let start = a.start.min(b.start);
    let mut out = vec![Complex64::new(0.0, 0.0); (a.end().max(b.end()) - start) as usize];
    for s in [&a, &b] {
        for (i, &z) in s.data.iter().enumerate() {
            out[(s.start - start) as usize + i] += z;
        }
    }
    Seq::new(start, out)
}

/// Coefficients of output `(m, u)` for receiver `rx` on channel `h`.
///
/// With `heq = sum_r combiner^r * h^{r,u'}`, the coefficient of symbol `(m', n + dn)` of user
/// `u'` at instant `n - dn` is `Re{(F_{m m'} * heq)[(dn + alpha) M/2] j^{m' - m - dn}}`, where `alpha` is the
/// receiver delay.
pub fn measure_coeffs<T: Real, R: Combiners<T> + ?Sized>(
    ctx: &CoeffContext,
    h: &ChannelRealization<T>,
    rx: &R,
    u: usize,
) -> Result<Coefficients> {
    let (m, big_m) = (ctx.m, ctx.num_subcarriers);
    if rx.n_rx() != h.n_rx() || rx.n_tx() != h.n_tx() {
        return Err(Error::DimensionMismatch {
            what: "receiver vs channel antennas",
            left: rx.n_rx() * rx.n_tx(),
            right: h.n_rx() * h.n_tx(),
        });
    }
    if u >= h.n_tx() {
        return Err(Error::invalid("u", u, format!("< N_t = {}", h.n_tx())));
    }
    let half = (big_m / 2) as isize;
    let alpha = rx.delay() as isize;
    let lf = ctx.filter_len as isize;
    let combiners = (0..h.n_rx())
        .map(|r| rx.combiner_at(m, u, r).map(|c| to_seq64(&c)))
        .collect::<Result<Vec<_>>>()?;

    let noise: NeumaierSum = combiners
        .iter()
        .map(|c| 0.5 * ctx.analysis.convolve(c).energy())
        .collect();

    let mut desired = 0.0;
    let mut terms = Vec::new();
    for up in 0..h.n_tx() {
        let heq = combiners
            .iter()
            .enumerate()
            .map(|(r, c)| c.convolve(&to_seq64(&Seq::causal(h.impulse(r, up).to_vec()))))
            .reduce(add_seq)
            .unwrap_or_else(|| Seq::causal(Vec::new()));
        let (hs, hd) = (heq.start, heq.data);
        if hd.is_empty() {
            continue;
        }
        let he = hs + hd.len() as isize - 1;
        // lags k = (dn + alpha) M/2 with support in [hs - (L_f - 1), he + L_f - 1]
        let dn_lo = (hs - (lf - 1)).div_euclid(half) - alpha;
        let dn_hi = (he + lf - 1).div_euclid(half) - alpha;
        for (mp, resp) in ctx.responses.iter().enumerate() {
            for dn in dn_lo..=dn_hi {
                let k = (dn + alpha) * half;
                let mut acc = Complex64::new(0.0, 0.0);
                // resp index j covers lag j - (L_f - 1); need k - l in that range
                let l_lo = hs.max(k - (lf - 1));
                let l_hi = he.min(k + lf - 1);
                for l in l_lo..=l_hi {
                    acc += hd[(l - hs) as usize] * resp[(k - l + lf - 1) as usize];
                }
                let v = (acc * to_c64(phase_factor::<f64>(mp as i64 - m as i64 - dn as i64, 0))).re;
                if up == u && mp == m && dn == 0 {
                    desired = v;
                } else if v != 0.0 {
                    terms.push(Coefficient {
                        user: up,
                        m_prime: mp,
                        dn,
                        value: v,
                    });
                }
            }
        }
    }
    Ok(Coefficients {
        subcarrier: m,
        user: u,
        desired,
        terms,
        noise_gain: noise.value(),
    })
}

/// Instantaneous powers of one realization at output `(m, u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrSample {
    pub signal: f64,
    pub self_interference: f64,
    pub inter_user: f64,
    pub noise: f64,
}

impl SinrSample {
    pub fn interference(&self) -> f64 {
        self.self_interference + self.inter_user
    }

    pub fn sir(&self) -> f64 {
        self.signal / self.interference()
    }

    pub fn sinr(&self) -> f64 {
        self.signal / (self.interference() + self.noise)
    }
}

/// Splits the output power of `(m, u)` into signal, interference and noise.
pub fn empirical_sinr(coeffs: &Coefficients, symbol_power: f64, sigma2: f64) -> SinrSample {
    SinrSample {
        signal: coeffs.signal_power(symbol_power),
        self_interference: coeffs.self_interference(symbol_power),
        inter_user: coeffs.inter_user(symbol_power),
        noise: coeffs.noise_power(sigma2),
    }
}
