//! Random channel draws, channel application and AWGN.

use fbmc_core::{convolve, Error, Real, Result, SampleStream, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::pdp::PdpProfile;

/// Block-fading MIMO impulse response `H[l]`, `N_r x N_t x L_h`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization<T> {
    n_rx: usize,
    n_tx: usize,
    len: usize,
    taps: Vec<C<T>>,
    profiles: Vec<PdpProfile>,
}

/// Draws a `CN(0, var)` sample.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, var: f64) -> C<T> {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(T::lit(re * s), T::lit(im * s))
}

impl<T: Real> ChannelRealization<T> {
    /// Wraps explicit taps laid out `[(r * n_tx + u) * len + l]`.
    pub fn from_taps(n_rx: usize, n_tx: usize, len: usize, taps: Vec<C<T>>) -> Result<Self> {
        if taps.len() != n_rx * n_tx * len {
            return Err(Error::DimensionMismatch {
                what: "channel tap count",
                left: taps.len(),
                right: n_rx * n_tx * len,
            });
        }
        Ok(ChannelRealization {
            n_rx,
            n_tx,
            len,
            taps,
            profiles: Vec::new(),
        })
    }

    /// Builds a realization from per-link impulse responses `h[r][u]`.
    pub fn from_impulses(h: &[Vec<Vec<C<T>>>]) -> Result<Self> {
        let n_rx = h.len();
        let n_tx = h.first().map_or(0, |v| v.len());
        let len = h.iter().flatten().map(|v| v.len()).max().unwrap_or(0);
        let mut taps = Vec::with_capacity(n_rx * n_tx * len);
        for row in h {
            if row.len() != n_tx {
                return Err(Error::DimensionMismatch {
                    what: "users per antenna",
                    left: row.len(),
                    right: n_tx,
                });
            }
            for imp in row {
                taps.extend_from_slice(imp);
                taps.extend(std::iter::repeat_n(C::new(T::zero(), T::zero()), len - imp.len()));
            }
        }
        Self::from_taps(n_rx, n_tx, len, taps)
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    /// Common tap count (longest user profile).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn profiles(&self) -> &[PdpProfile] {
        &self.profiles
    }

    #[inline]
    pub fn tap(&self, r: usize, u: usize, l: usize) -> C<T> {
        self.taps[(r * self.n_tx + u) * self.len + l]
    }

    /// `h^{r,u}[l]`, `l = 0..L_h-1`.
    pub fn impulse(&self, r: usize, u: usize) -> &[C<T>] {
        let i = (r * self.n_tx + u) * self.len;
        &self.taps[i..i + self.len]
    }

    pub fn is_finite(&self) -> bool {
        self.taps.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Draws i.i.d. `h^{r,u}[l] ~ CN(0, q^u[l])` from `rng`.
pub fn draw_channel_with<T: Real, R: Rng + ?Sized>(
    profiles: &[PdpProfile],
    n_rx: usize,
    rng: &mut R,
) -> Result<ChannelRealization<T>> {
    if n_rx == 0 {
        return Err(Error::invalid("N_r", 0, ">= 1"));
    }
    if profiles.is_empty() {
        return Err(Error::invalid("profiles", "[]", "one profile per user"));
    }
    let n_tx = profiles.len();
    let len = profiles.iter().map(|p| p.len()).max().unwrap_or(0);
    let mut taps = Vec::with_capacity(n_rx * n_tx * len);
    for _ in 0..n_rx {
        for p in profiles {
            for l in 0..len {
                let q = p.tap(l);
                taps.push(if q > 0.0 {
                    complex_gaussian(rng, q)
                } else {
                    C::new(T::zero(), T::zero())
                });
            }
        }
    }
    Ok(ChannelRealization {
        n_rx,
        n_tx,
        len,
        taps,
        profiles: profiles.to_vec(),
    })
}

/// Seeded variant of [`draw_channel_with`].
pub fn draw_channel<T: Real>(profiles: &[PdpProfile], n_rx: usize, seed: u64) -> Result<ChannelRealization<T>> {
    draw_channel_with(profiles, n_rx, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `y^r = sum_u x^u * h^{r,u}`; output length grows by `L_h - 1`.
pub fn apply_channel<T: Real>(x: &SampleStream<T>, h: &ChannelRealization<T>) -> Result<SampleStream<T>> {
    if x.n_channels() != h.n_tx() {
        return Err(Error::DimensionMismatch {
            what: "user streams vs channel inputs",
            left: x.n_channels(),
            right: h.n_tx(),
        });
    }
    let out_len = x.frame_len() + h.len().max(1) - 1;
    let mut out = Vec::with_capacity(h.n_rx());
    for r in 0..h.n_rx() {
        let mut acc = vec![C::new(T::zero(), T::zero()); out_len];
        for u in 0..h.n_tx() {
            let y = convolve(x.channel(u), h.impulse(r, u));
            for (a, b) in acc.iter_mut().zip(y) {
                *a = *a + b;
            }
        }
        out.push(acc);
    }
    SampleStream::new(out)
}

/// Adds i.i.d. `CN(0, sigma2)` noise to every sample, drawing from `rng`.
pub fn add_awgn_with<T: Real, R: Rng + ?Sized>(
    y: &SampleStream<T>,
    sigma2: f64,
    rng: &mut R,
) -> Result<SampleStream<T>> {
    if sigma2 < 0.0 || sigma2.is_nan() {
        return Err(Error::NegativeVariance(sigma2));
    }
    if sigma2 == 0.0 {
        return Ok(y.clone());
    }
    let chans = y
        .channels()
        .iter()
        .map(|ch| ch.iter().map(|&v| v + complex_gaussian::<T, R>(rng, sigma2)).collect())
        .collect();
    SampleStream::new(chans)
}

/// Seeded variant of [`add_awgn_with`].
pub fn add_awgn<T: Real>(y: &SampleStream<T>, sigma2: f64, seed: u64) -> Result<SampleStream<T>> {
    add_awgn_with(y, sigma2, &mut ChaCha8Rng::seed_from_u64(seed))
}
