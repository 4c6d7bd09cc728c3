//! Polyphase FFT implementation of the synthesis and analysis filter banks.
//!
//! Subcarrier filters are `f_m[l] = p[l] e^{j 2 pi m (l - c0) / M}` with
//! `c0 = (L_f - 1) / 2`, so every modulated filter is linear-phase about the
//! pulse centre. Symbol `(m, n)` is transmitted as
//! `s_{m,n} e^{j theta_{m,n}} f_m[l - n M / 2]` and demodulated by correlating
//! with `f_m` at lag `n M / 2`.

use crate::dsp::{Dft, Seq};
use crate::error::{Error, Result};
use crate::grid::{phase_factor, ComplexGrid, OqamGrid, SampleStream};
use crate::prototype::PrototypeFilter;
use crate::scalar::{cis, czero, Real, C};

#[derive(Clone, Debug)]
pub struct FilterBank<T: Real> {
    proto: PrototypeFilter<T>,
    dft: Dft<T>,
    /// `e^{-j 2 pi m c0 / M}`.
    center: Vec<C<T>>,
}

/// `e^{j pi k / M}` with `k` reduced modulo `2M` before the float conversion.
fn half_turn<T: Real>(k: i64, m: usize) -> C<T> {
    let two_m = 2 * m as i64;
    let r = k.rem_euclid(two_m);
    cis(std::f64::consts::PI * r as f64 / m as f64)
}

impl<T: Real> FilterBank<T> {
    pub fn new(proto: PrototypeFilter<T>) -> Self {
        let m = proto.num_subcarriers();
        let lf = proto.len() as i64;
        let center = (0..m as i64).map(|k| half_turn(-k * (lf - 1), m)).collect();
        FilterBank {
            dft: Dft::new(m),
            proto,
            center,
        }
    }

    pub fn prototype(&self) -> &PrototypeFilter<T> {
        &self.proto
    }

    pub fn num_subcarriers(&self) -> usize {
        self.proto.num_subcarriers()
    }

    /// Prototype length `L_f`.
    pub fn filter_len(&self) -> usize {
        self.proto.len()
    }

    /// Burst length `(N_d - 1) M / 2 + L_f` for `instants` symbols.
    pub fn frame_len(&self, instants: usize) -> usize {
        if instants == 0 {
            return 0;
        }
        (instants - 1) * self.num_subcarriers() / 2 + self.filter_len()
    }

    /// Synthesis filter `f_m[l]`, `l = 0..L_f-1`.
    pub fn subcarrier_filter(&self, m: usize) -> Vec<C<T>> {
        let big_m = self.num_subcarriers();
        let lf = self.filter_len() as i64;
        let mi = (m % big_m) as i64;
        self.proto
            .coeffs()
            .iter()
            .enumerate()
            .map(|(l, &p)| half_turn::<T>(mi * (2 * l as i64 - lf + 1), big_m) * p)
            .collect()
    }

    /// Analysis filter `f_m^*[-l]` as a sequence on `-(L_f-1)..=0`.
    pub fn analysis_filter(&self, m: usize) -> Seq<T> {
        Seq::causal(self.subcarrier_filter(m)).conj().reversed()
    }

    /// `F_{m m'}[l] = (f_{m'} * f_m^*[-.])[l]` on `-(L_f-1)..=L_f-1`.
    pub fn transmux_response(&self, m: usize, m_prime: usize) -> Seq<T> {
        Seq::causal(self.subcarrier_filter(m_prime)).convolve(&self.analysis_filter(m))
    }

    /// Modulates one user's symbols `s[m][n]` into a burst.
    fn synthesize_user(&self, grid: &OqamGrid<T>, u: usize) -> Vec<C<T>> {
        let m = self.num_subcarriers();
        let half = m / 2;
        let p = self.proto.coeffs();
        let mut out = vec![czero(); self.frame_len(grid.instants())];
        let mut buf = vec![czero(); m];
        for n in 0..grid.instants() {
            let mut any = false;
            for (k, slot) in buf.iter_mut().enumerate() {
                let s = grid.get(u, k, n);
                any |= s != T::zero();
                *slot = phase_factor::<T>(k as i64, n as i64) * self.center[k] * s;
            }
            if !any {
                continue;
            }
            self.dft.inverse_unnormalized_in_place(&mut buf);
            let base = n * half;
            for (t, &pt) in p.iter().enumerate() {
                out[base + t] = out[base + t] + buf[t % m] * pt;
            }
        }
        out
    }

    /// One stream channel per user.
    pub fn modulate(&self, grid: &OqamGrid<T>) -> Result<SampleStream<T>> {
        if grid.subcarriers() != self.num_subcarriers() {
            return Err(Error::DimensionMismatch {
                what: "grid M vs filter-bank M",
                left: grid.subcarriers(),
                right: self.num_subcarriers(),
            });
        }
        SampleStream::new((0..grid.users()).map(|u| self.synthesize_user(grid, u)).collect())
    }

    /// Correlations `sum_t y[L + t] f_m^*[t]` at lags `L = first_lag + k * step`,
    /// `k = 0..count`; samples outside `y` count as zero. Result is indexed `[m][k]`.
    pub fn analyze(&self, y: &[C<T>], first_lag: isize, step: usize, count: usize) -> Vec<Vec<C<T>>> {
        let m = self.num_subcarriers();
        let p = self.proto.coeffs();
        let ylen = y.len() as isize;
        let mut out = vec![vec![czero(); count]; m];
        let mut fold = vec![czero(); m];
        for k in 0..count {
            let lag = first_lag + (k * step) as isize;
            fold.iter_mut().for_each(|z| *z = czero());
            let t_lo = (-lag).max(0);
            let t_hi = (ylen - lag).min(p.len() as isize);
            if t_lo >= t_hi {
                continue;
            }
            for t in t_lo..t_hi {
                let tu = t as usize;
                fold[tu % m] = fold[tu % m] + y[(lag + t) as usize] * p[tu];
            }
            self.dft.forward_in_place(&mut fold);
            for (mm, row) in out.iter_mut().enumerate() {
                row[k] = fold[mm] * self.center[mm].conj();
            }
        }
        out
    }

    /// Number of full-overlap symbol-rate lags for a stream of `len` samples.
    pub fn demod_instants(&self, len: usize) -> Result<usize> {
        if len < self.filter_len() {
            return Err(Error::StreamTooShort {
                len,
                min: self.filter_len(),
            });
        }
        Ok((len - self.filter_len()) / (self.num_subcarriers() / 2) + 1)
    }

    /// Symbol-rate analysis of every channel; grid `users` dimension is the channel index.
    pub fn demodulate(&self, stream: &SampleStream<T>) -> Result<ComplexGrid<T>> {
        let k = self.demod_instants(stream.frame_len())?;
        let m = self.num_subcarriers();
        let mut grid = ComplexGrid::zeros(stream.n_channels(), m, k);
        for ch in 0..stream.n_channels() {
            let rows = self.analyze(stream.channel(ch), 0, m / 2, k);
            for (mm, row) in rows.into_iter().enumerate() {
                grid.series_mut(ch, mm).copy_from_slice(&row);
            }
        }
        Ok(grid)
    }
}

/// Convenience wrapper around [`FilterBank::modulate`].
pub fn modulate<T: Real>(grid: &OqamGrid<T>, pf: &PrototypeFilter<T>) -> Result<SampleStream<T>> {
    FilterBank::new(pf.clone()).modulate(grid)
}

/// Convenience wrapper around [`FilterBank::demodulate`].
pub fn demodulate<T: Real>(stream: &SampleStream<T>, pf: &PrototypeFilter<T>) -> Result<ComplexGrid<T>> {
    FilterBank::new(pf.clone()).demodulate(stream)
}

/// Convenience wrapper around [`FilterBank::transmux_response`].
pub fn transmux_response<T: Real>(pf: &PrototypeFilter<T>, m: usize, m_prime: usize) -> Seq<T> {
    FilterBank::new(pf.clone()).transmux_response(m, m_prime)
}
