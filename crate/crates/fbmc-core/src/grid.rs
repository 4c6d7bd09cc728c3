//! Symbol lattices, sample streams and OQAM staggering.

use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

/// `e^{j pi (m + n) / 2}`, evaluated exactly.
pub fn phase_factor<T: Real>(m: i64, n: i64) -> C<T> {
    let (o, z) = (T::one(), T::zero());
    match (m + n).rem_euclid(4) {
        0 => C::new(o, z),
        1 => C::new(z, o),
        2 => C::new(-o, z),
        _ => C::new(z, -o),
    }
}

/// Real OQAM symbols `s[u][m][n]` with nominal per-entry power `symbol_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct OqamGrid<T> {
    users: usize,
    subcarriers: usize,
    instants: usize,
    symbols: Vec<T>,
    symbol_power: T,
}

impl<T: Real> OqamGrid<T> {
    pub fn zeros(users: usize, subcarriers: usize, instants: usize, symbol_power: T) -> Self {
        OqamGrid {
            users,
            subcarriers,
            instants,
            symbols: vec![T::zero(); users * subcarriers * instants],
            symbol_power,
        }
    }

    pub fn from_fn(
        users: usize,
        subcarriers: usize,
        instants: usize,
        symbol_power: T,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Self {
        let mut g = Self::zeros(users, subcarriers, instants, symbol_power);
        for u in 0..users {
            for m in 0..subcarriers {
                for n in 0..instants {
                    g.set(u, m, n, f(u, m, n));
                }
            }
        }
        g
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn instants(&self) -> usize {
        self.instants
    }

    pub fn symbol_power(&self) -> T {
        self.symbol_power
    }

    #[inline]
    fn idx(&self, u: usize, m: usize, n: usize) -> usize {
        (u * self.subcarriers + m) * self.instants + n
    }

    #[inline]
    pub fn get(&self, u: usize, m: usize, n: usize) -> T {
        self.symbols[self.idx(u, m, n)]
    }

    #[inline]
    pub fn set(&mut self, u: usize, m: usize, n: usize, v: T) {
        let i = self.idx(u, m, n);
        self.symbols[i] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.symbols
    }

    pub fn is_finite(&self) -> bool {
        self.symbols.iter().all(|v| v.is_finite())
    }

    /// Empirical mean of `s^2` over all entries.
    pub fn mean_power(&self) -> T {
        if self.symbols.is_empty() {
            return T::zero();
        }
        self.symbols.iter().map(|&v| v * v).sum::<T>() / T::from_usize_lossy(self.symbols.len())
    }
}

/// Complex samples `d[u][m][n]` on the same lattice layout as [`OqamGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGrid<T> {
    users: usize,
    subcarriers: usize,
    instants: usize,
    samples: Vec<C<T>>,
}

impl<T: Real> ComplexGrid<T> {
    pub fn zeros(users: usize, subcarriers: usize, instants: usize) -> Self {
        ComplexGrid {
            users,
            subcarriers,
            instants,
            samples: vec![czero(); users * subcarriers * instants],
        }
    }

    pub fn from_fn(
        users: usize,
        subcarriers: usize,
        instants: usize,
        mut f: impl FnMut(usize, usize, usize) -> C<T>,
    ) -> Self {
        let mut g = Self::zeros(users, subcarriers, instants);
        for u in 0..users {
            for m in 0..subcarriers {
                for n in 0..instants {
                    g.set(u, m, n, f(u, m, n));
                }
            }
        }
        g
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn instants(&self) -> usize {
        self.instants
    }

    #[inline]
    fn idx(&self, u: usize, m: usize, n: usize) -> usize {
        (u * self.subcarriers + m) * self.instants + n
    }

    #[inline]
    pub fn get(&self, u: usize, m: usize, n: usize) -> C<T> {
        self.samples[self.idx(u, m, n)]
    }

    #[inline]
    pub fn set(&mut self, u: usize, m: usize, n: usize, v: C<T>) {
        let i = self.idx(u, m, n);
        self.samples[i] = v;
    }

    /// Time series of one (user, subcarrier) cell.
    pub fn series(&self, u: usize, m: usize) -> &[C<T>] {
        let i = self.idx(u, m, 0);
        &self.samples[i..i + self.instants]
    }

    pub fn series_mut(&mut self, u: usize, m: usize) -> &mut [C<T>] {
        let i = self.idx(u, m, 0);
        &mut self.samples[i..i + self.instants]
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.samples
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// OQAM decision statistic `Re{d[u][m][n + delay] e^{-j theta_{m,n}}}` for `n = 0..instants`.
    pub fn to_oqam(&self, delay: usize, instants: usize, symbol_power: T) -> Result<OqamGrid<T>> {
        if delay + instants > self.instants {
            return Err(Error::DimensionMismatch {
                what: "demodulated instants vs requested symbols",
                left: self.instants,
                right: delay + instants,
            });
        }
        Ok(OqamGrid::from_fn(
            self.users,
            self.subcarriers,
            instants,
            symbol_power,
            |u, m, n| (self.get(u, m, n + delay) * phase_factor::<T>(m as i64, n as i64).conj()).re,
        ))
    }
}

/// Maps complex QAM symbols to OQAM: `Re` at instant `2k`, `Im` at `2k + 1`.
pub fn qam_to_oqam<T: Real>(qam: &ComplexGrid<T>, symbol_power: T) -> OqamGrid<T> {
    let mut out = OqamGrid::zeros(qam.users(), qam.subcarriers(), 2 * qam.instants(), symbol_power);
    for u in 0..qam.users() {
        for m in 0..qam.subcarriers() {
            for k in 0..qam.instants() {
                let z = qam.get(u, m, k);
                out.set(u, m, 2 * k, z.re);
                out.set(u, m, 2 * k + 1, z.im);
            }
        }
    }
    out
}

/// Inverse of [`qam_to_oqam`]; a trailing odd instant becomes a purely real symbol.
pub fn oqam_to_qam<T: Real>(oqam: &OqamGrid<T>) -> ComplexGrid<T> {
    let k_len = oqam.instants().div_ceil(2);
    ComplexGrid::from_fn(oqam.users(), oqam.subcarriers(), k_len, |u, m, k| {
        let re = oqam.get(u, m, 2 * k);
        let im = if 2 * k + 1 < oqam.instants() {
            oqam.get(u, m, 2 * k + 1)
        } else {
            T::zero()
        };
        C::new(re, im)
    })
}

/// Multichannel sample block at rate `M/T`; all channels share `frame_len`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleStream<T> {
    channels: Vec<Vec<C<T>>>,
}

impl<T: Real> SampleStream<T> {
    pub fn new(channels: Vec<Vec<C<T>>>) -> Result<Self> {
        if let Some(first) = channels.first() {
            for ch in &channels {
                if ch.len() != first.len() {
                    return Err(Error::DimensionMismatch {
                        what: "stream channel lengths",
                        left: first.len(),
                        right: ch.len(),
                    });
                }
            }
        }
        Ok(SampleStream { channels })
    }

    pub fn zeros(n_channels: usize, frame_len: usize) -> Self {
        SampleStream {
            channels: vec![vec![czero(); frame_len]; n_channels],
        }
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn frame_len(&self) -> usize {
        self.channels.first().map_or(0, |c| c.len())
    }

    pub fn channel(&self, i: usize) -> &[C<T>] {
        &self.channels[i]
    }

    pub fn channel_mut(&mut self, i: usize) -> &mut [C<T>] {
        &mut self.channels[i]
    }

    pub fn channels(&self) -> &[Vec<C<T>>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<C<T>>> {
        self.channels
    }
}
