//! Per-subcarrier low-rate receiver: build from a high-rate design and apply to antenna streams.

use rayon::prelude::*;

use fbmc_channel::FreqCsi;
use fbmc_core::{upsample, ComplexGrid, Error, FilterBank, Real, Result, SampleStream, C};
use fbmc_stage1::{design_highrate, Criterion, HighRateEqualizer};

use crate::ls::{polyphase_split, LsFitter};
use crate::plan::DecimationPlan;

/// Low-rate taps `g_bar_m^{r,u}[n]` and their polyphase branches for every (m, u, r).
#[derive(Clone, Debug, PartialEq)]
pub struct LowRateEqualizerBank<T> {
    plan: DecimationPlan,
    len: usize,
    n_tx: usize,
    n_rx: usize,
    delay: usize,
    taps: Vec<Vec<C<T>>>,
    branches: Vec<Vec<Vec<C<T>>>>,
}

impl<T: Real> LowRateEqualizerBank<T> {
    /// Wraps taps indexed `[(m * n_tx + u) * n_rx + r]`, each of length `len`.
    pub fn from_taps(
        plan: DecimationPlan,
        n_tx: usize,
        n_rx: usize,
        len: usize,
        delay: usize,
        taps: Vec<Vec<C<T>>>,
    ) -> Result<Self> {
        let want = plan.num_subcarriers() * n_tx * n_rx;
        if taps.len() != want {
            return Err(Error::DimensionMismatch {
                what: "low-rate equalizer count",
                left: taps.len(),
                right: want,
            });
        }
        if let Some(bad) = taps.iter().find(|t| t.len() != len) {
            return Err(Error::DimensionMismatch {
                what: "low-rate equalizer length",
                left: bad.len(),
                right: len,
            });
        }
        let branches = taps.iter().map(|t| polyphase_split(t, plan.d2())).collect();
        Ok(LowRateEqualizerBank {
            plan,
            len,
            n_tx,
            n_rx,
            delay,
            taps,
            branches,
        })
    }

    /// `g_bar = delta` on matching (u, r) pairs: plain demodulation of each antenna.
    pub fn identity(plan: DecimationPlan, n_streams: usize) -> Self {
        let m = plan.num_subcarriers();
        let one = C::new(T::one(), T::zero());
        let zero = C::new(T::zero(), T::zero());
        let taps = (0..m * n_streams * n_streams)
            .map(|i| {
                vec![if i / n_streams % n_streams == i % n_streams {
                    one
                } else {
                    zero
                }]
            })
            .collect();
        Self::from_taps(plan, n_streams, n_streams, 1, 0, taps).expect("consistent identity bank")
    }

    pub fn plan(&self) -> DecimationPlan {
        self.plan
    }

    /// `L'_g`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn num_subcarriers(&self) -> usize {
        self.plan.num_subcarriers()
    }

    /// Delay `alpha` inherited from the high-rate design, in symbol instants.
    pub fn delay(&self) -> usize {
        self.delay
    }

    fn idx(&self, m: usize, u: usize, r: usize) -> usize {
        (m * self.n_tx + u) * self.n_rx + r
    }

    /// `g_bar_m^{r,u}[n]`.
    pub fn taps(&self, m: usize, u: usize, r: usize) -> &[C<T>] {
        &self.taps[self.idx(m, u, r)]
    }

    /// `G_{l,m}^{r,u}[n] = g_bar_m^{r,u}[D2 n + l]`.
    pub fn branch(&self, m: usize, u: usize, r: usize, l: usize) -> &[C<T>] {
        &self.branches[self.idx(m, u, r)][l]
    }

    /// `g_bar` upsampled by `D1`: the equivalent high-rate filter placed after the analysis filter.
    pub fn upsampled(&self, m: usize, u: usize, r: usize) -> Vec<C<T>> {
        upsample(self.taps(m, u, r), self.plan.d1())
    }

    pub fn is_finite(&self) -> bool {
        self.taps.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// LS-fits every (m, u, r) entry of a high-rate equalizer; subcarriers are fitted in parallel.
pub fn build_lowrate_from<T: Real>(
    eq: &HighRateEqualizer<T>,
    fb: &FilterBank<T>,
    plan: DecimationPlan,
    len: usize,
) -> Result<LowRateEqualizerBank<T>> {
    let m_count = fb.num_subcarriers();
    let per_m = (0..m_count)
        .into_par_iter()
        .map(|m| {
            let fitter = LsFitter::new(fb, m, plan, len).map_err(|e| e.at_subcarrier(m))?;
            let mut out = Vec::with_capacity(eq.n_tx() * eq.n_rx());
            for u in 0..eq.n_tx() {
                for r in 0..eq.n_rx() {
                    out.push(fitter.fit(eq.impulse(u, r)));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    LowRateEqualizerBank::from_taps(
        plan,
        eq.n_tx(),
        eq.n_rx(),
        len,
        eq.delay(),
        per_m.into_iter().flatten().collect(),
    )
}

/// Stage-1 design followed by the per-subcarrier LS fit.
pub fn build_lowrate_receiver<T: Real>(
    csi: &FreqCsi<T>,
    fb: &FilterBank<T>,
    plan: DecimationPlan,
    criterion: Criterion,
    alpha: usize,
    len: usize,
) -> Result<LowRateEqualizerBank<T>> {
    let eq = design_highrate(csi, criterion, alpha, fb.num_subcarriers())?;
    build_lowrate_from(&eq, fb, plan, len)
}

/// Branch receiver: per antenna, analysis at lags `n M/2 - l D1` for branch `l`, branch
/// filtering at the symbol rate, and summation over branches and antennas. The output
/// grid is indexed by user; symbol `n` appears at instant `n + delay`, so the grid carries
/// `delay` instants beyond the full-overlap demodulation count.
pub fn equalize_lowrate<T: Real>(
    y: &SampleStream<T>,
    bank: &LowRateEqualizerBank<T>,
    fb: &FilterBank<T>,
) -> Result<ComplexGrid<T>> {
    if y.n_channels() != bank.n_rx() {
        return Err(Error::DimensionMismatch {
            what: "antenna streams vs low-rate inputs",
            left: y.n_channels(),
            right: bank.n_rx(),
        });
    }
    if fb.num_subcarriers() != bank.num_subcarriers() {
        return Err(Error::DimensionMismatch {
            what: "filter-bank M vs low-rate bank M",
            left: fb.num_subcarriers(),
            right: bank.num_subcarriers(),
        });
    }
    let m_count = fb.num_subcarriers();
    let count = fb.demod_instants(y.frame_len())? + bank.delay();
    let (d1, d2) = (bank.plan().d1(), bank.plan().d2());
    let partial: Vec<ComplexGrid<T>> = (0..bank.n_rx())
        .into_par_iter()
        .map(|r| {
            let mut acc = ComplexGrid::zeros(bank.n_tx(), m_count, count);
            for l in 0..d2 {
                // branch taps reach back `back` symbols, into lags before the stream start
                let back = bank.len().div_ceil(d2).saturating_sub(1);
                let first = -((l * d1 + back * m_count / 2) as isize);
                let v = fb.analyze(y.channel(r), first, m_count / 2, count + back);
                for (m, vm) in v.iter().enumerate() {
                    for u in 0..bank.n_tx() {
                        let taps = bank.branch(m, u, r, l);
                        let out = acc.series_mut(u, m);
                        for (j, &g) in taps.iter().enumerate() {
                            for (n, o) in out.iter_mut().enumerate() {
                                *o = *o + g * vm[n + back - j];
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = ComplexGrid::zeros(bank.n_tx(), m_count, count);
    for part in &partial {
        for u in 0..bank.n_tx() {
            for m in 0..m_count {
                for (a, &b) in total.series_mut(u, m).iter_mut().zip(part.series(u, m)) {
                    *a = *a + b;
                }
            }
        }
    }
    Ok(total)
}
