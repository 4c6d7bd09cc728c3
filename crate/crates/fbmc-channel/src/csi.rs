//! Frequency-domain channel state information.

use fbmc_core::{cis, CMat, Error, Real, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::realization::{complex_gaussian, ChannelRealization};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CsiQuality {
    Perfect,
    /// Linear-MMSE training estimate with pilot power `P_p` and noise variance.
    Estimated {
        pilot_power: f64,
        noise_var: f64,
    },
}

/// `H~_k = sum_l H[l] e^{-j 2 pi k l / K}` at `K` equally spaced bins.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqCsi<T> {
    bins: Vec<CMat<T>>,
    quality: CsiQuality,
}

impl<T: Real> FreqCsi<T> {
    pub fn from_bins(bins: Vec<CMat<T>>, quality: CsiQuality) -> Result<Self> {
        if let Some(first) = bins.first() {
            for b in &bins {
                if (b.rows(), b.cols()) != (first.rows(), first.cols()) {
                    return Err(Error::DimensionMismatch {
                        what: "CSI bin shape",
                        left: b.rows() * b.cols(),
                        right: first.rows() * first.cols(),
                    });
                }
            }
        }
        Ok(FreqCsi { bins, quality })
    }

    /// Number of frequency bins `K`.
    pub fn n_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn n_rx(&self) -> usize {
        self.bins.first().map_or(0, |b| b.rows())
    }

    pub fn n_tx(&self) -> usize {
        self.bins.first().map_or(0, |b| b.cols())
    }

    /// `N_r x N_t` response at bin `k`.
    pub fn bin(&self, k: usize) -> &CMat<T> {
        &self.bins[k]
    }

    pub fn bins(&self) -> &[CMat<T>] {
        &self.bins
    }

    pub fn quality(&self) -> CsiQuality {
        self.quality
    }

    /// Response seen by a receiver sampling `d` samples late:
    /// bin `k` is multiplied by `e^{j 2 pi k d / K}`.
    pub fn advanced(&self, d: usize) -> Self {
        let k_len = self.bins.len();
        let bins = self
            .bins
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let ph = cis::<T>(2.0 * std::f64::consts::PI * ((k * d) % k_len.max(1)) as f64 / k_len as f64);
                b.scale(ph)
            })
            .collect();
        FreqCsi {
            bins,
            quality: self.quality,
        }
    }
}

/// Exact `K`-point DFT of the tapped delay line.
pub fn freq_csi<T: Real>(h: &ChannelRealization<T>, n_bins: usize) -> FreqCsi<T> {
    let twiddle: Vec<_> = (0..n_bins)
        .map(|i| cis::<T>(-2.0 * std::f64::consts::PI * i as f64 / n_bins as f64))
        .collect();
    let bins = (0..n_bins)
        .map(|k| {
            CMat::from_fn(h.n_rx(), h.n_tx(), |r, u| {
                h.impulse(r, u)
                    .iter()
                    .enumerate()
                    .fold(fbmc_core::scalar::czero(), |acc, (l, &v)| {
                        acc + v * twiddle[(k * l) % n_bins]
                    })
            })
        })
        .collect();
    FreqCsi {
        bins,
        quality: CsiQuality::Perfect,
    }
}

/// `H^_k = (P_p H~_k + Z_k) / (P_p + sigma2)` with `Z_k` i.i.d. `CN(0, P_p sigma2)`.
pub fn estimate_csi_mmse_with<T: Real, R: Rng + ?Sized>(
    csi: &FreqCsi<T>,
    pilot_power: f64,
    sigma2: f64,
    rng: &mut R,
) -> Result<FreqCsi<T>> {
    if pilot_power.is_nan() || pilot_power <= 0.0 {
        return Err(Error::invalid("P_p", pilot_power, "> 0"));
    }
    if sigma2 < 0.0 || sigma2.is_nan() {
        return Err(Error::NegativeVariance(sigma2));
    }
    let quality = CsiQuality::Estimated {
        pilot_power,
        noise_var: sigma2,
    };
    if sigma2 == 0.0 {
        return Ok(FreqCsi {
            bins: csi.bins.clone(),
            quality,
        });
    }
    let denom = T::lit(1.0 / (pilot_power + sigma2));
    let pp = T::lit(pilot_power);
    let bins = csi
        .bins
        .iter()
        .map(|b| {
            CMat::from_fn(b.rows(), b.cols(), |r, c| {
                (b[(r, c)] * pp + complex_gaussian::<T, R>(rng, pilot_power * sigma2)) * denom
            })
        })
        .collect();
    Ok(FreqCsi { bins, quality })
}

/// Seeded variant of [`estimate_csi_mmse_with`].
pub fn estimate_csi_mmse<T: Real>(csi: &FreqCsi<T>, pilot_power: f64, sigma2: f64, seed: u64) -> Result<FreqCsi<T>> {
    estimate_csi_mmse_with(csi, pilot_power, sigma2, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Pilot power `P_p = 2 P_s L_p`.
pub fn pilot_power(symbol_power: f64, training_symbols: usize) -> f64 {
    2.0 * symbol_power * training_symbols as f64
}
