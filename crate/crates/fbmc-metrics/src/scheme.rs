//! Receiver schemes and their realization for one channel draw.

use fbmc_channel::FreqCsi;
use fbmc_core::{upsample, ComplexGrid, Error, FilterBank, OqamGrid, Real, Result, SampleStream, Seq, C};
use fbmc_stage1::{
    apply_highrate, apply_single_tap, design_highrate, single_tap, Criterion, HighRateEqualizer, SingleTapEqualizer,
};
use fbmc_stage2::{build_lowrate_from, equalize_lowrate, DecimationPlan, LowRateEqualizerBank, LsFitter};

/// Equalization scheme at the base station.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    /// Stage-1 wideband multi-tap equalizers ahead of the analysis filter bank.
    HighRate,
    /// Stage-1 design followed by per-subcarrier low-rate LS equalizers of length `len`.
    TwoStage { plan: DecimationPlan, len: usize },
    /// One complex weight per subcarrier after the analysis filter bank.
    SingleTap,
}

impl Scheme {
    pub fn two_stage(m: usize, d1: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("L'_g", 0, ">= 1"));
        }
        Ok(Scheme::TwoStage {
            plan: DecimationPlan::new(m, d1)?,
            len,
        })
    }

    pub fn label(&self) -> String {
        match self {
            Scheme::HighRate => "high-rate".into(),
            Scheme::TwoStage { plan, len } => format!("two-stage(D1={},Lg'={})", plan.d1(), len),
            Scheme::SingleTap => "single-tap".into(),
        }
    }
}

/// A scheme's equalizers designed for one channel realization.
#[derive(Clone, Debug)]
pub enum Receiver<T: Real> {
    HighRate(HighRateEqualizer<T>),
    TwoStage(LowRateEqualizerBank<T>),
    SingleTap { eq: SingleTapEqualizer<T>, sync: usize },
}

/// Designs the receiver of `scheme`. `sync` is the sampling lag of the single-tap receiver.
pub fn design_receiver<T: Real>(
    csi: &FreqCsi<T>,
    fb: &FilterBank<T>,
    scheme: Scheme,
    criterion: Criterion,
    alpha: usize,
    sync: usize,
) -> Result<Receiver<T>> {
    let m = fb.num_subcarriers();
    Ok(match scheme {
        Scheme::HighRate => Receiver::HighRate(design_highrate(csi, criterion, alpha, m)?),
        Scheme::TwoStage { plan, len } => {
            let eq = design_highrate(csi, criterion, alpha, m)?;
            Receiver::TwoStage(build_lowrate_from(&eq, fb, plan, len)?)
        }
        Scheme::SingleTap => Receiver::SingleTap {
            eq: single_tap(&csi.advanced(sync), criterion)?,
            sync,
        },
    })
}

impl<T: Real> Receiver<T> {
    /// Output delay in symbol instants.
    pub fn delay(&self) -> usize {
        match self {
            Receiver::HighRate(eq) => eq.delay(),
            Receiver::TwoStage(bank) => bank.delay(),
            Receiver::SingleTap { .. } => 0,
        }
    }

    pub fn n_rx(&self) -> usize {
        match self {
            Receiver::HighRate(eq) => eq.n_rx(),
            Receiver::TwoStage(bank) => bank.n_rx(),
            Receiver::SingleTap { eq, .. } => eq.weights(0).cols(),
        }
    }

    pub fn n_tx(&self) -> usize {
        match self {
            Receiver::HighRate(eq) => eq.n_tx(),
            Receiver::TwoStage(bank) => bank.n_tx(),
            Receiver::SingleTap { eq, .. } => eq.weights(0).rows(),
        }
    }

    /// Filter that antenna `r` contributes to output `(m, u)`, referred to the input of the
    /// analysis filter: the demodulated output is `sum_r (y^r * combiner * a_m)[n M/2]`.
    pub fn combiner(&self, m: usize, u: usize, r: usize) -> Seq<T> {
        match self {
            Receiver::HighRate(eq) => Seq::causal(eq.impulse(u, r).to_vec()),
            Receiver::TwoStage(bank) => Seq::causal(bank.upsampled(m, u, r)),
            Receiver::SingleTap { eq, sync } => Seq::new(-(*sync as isize), vec![eq.weights(m)[(u, r)]]),
        }
    }

    /// Runs the receiver on antenna streams and returns `instants` real symbol estimates per user.
    pub fn receive(
        &self,
        y: &SampleStream<T>,
        fb: &FilterBank<T>,
        instants: usize,
        symbol_power: T,
    ) -> Result<OqamGrid<T>> {
        let grid: ComplexGrid<T> = match self {
            Receiver::HighRate(eq) => fb.demodulate(&apply_highrate(y, eq)?)?,
            Receiver::TwoStage(bank) => equalize_lowrate(y, bank, fb)?,
            Receiver::SingleTap { eq, sync } => {
                let late = SampleStream::new(
                    (0..y.n_channels())
                        .map(|r| {
                            let ch = y.channel(r);
                            let mut v: Vec<C<T>> = ch[(*sync).min(ch.len())..].to_vec();
                            v.resize(ch.len(), C::new(T::zero(), T::zero()));
                            v
                        })
                        .collect(),
                )?;
                apply_single_tap(&fb.demodulate(&late)?, eq)?
            }
        };
        grid.to_oqam(self.delay(), instants, symbol_power)
    }
}

/// Per-antenna filters feeding one output subcarrier, referred to the analysis-filter input.
pub trait Combiners<T: Real> {
    fn delay(&self) -> usize;
    fn n_rx(&self) -> usize;
    fn n_tx(&self) -> usize;
    /// Combiner of antenna `r` for output `(m, u)`; fails when subcarrier `m` was not designed.
    fn combiner_at(&self, m: usize, u: usize, r: usize) -> Result<Seq<T>>;
}

impl<T: Real> Combiners<T> for Receiver<T> {
    fn delay(&self) -> usize {
        Receiver::delay(self)
    }

    fn n_rx(&self) -> usize {
        Receiver::n_rx(self)
    }

    fn n_tx(&self) -> usize {
        Receiver::n_tx(self)
    }

    fn combiner_at(&self, m: usize, u: usize, r: usize) -> Result<Seq<T>> {
        Ok(self.combiner(m, u, r))
    }
}

/// Combiners of a single subcarrier, enough for interference-coefficient measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetCombiners<T> {
    subcarrier: usize,
    delay: usize,
    n_tx: usize,
    n_rx: usize,
    /// Indexed `[u * n_rx + r]`.
    taps: Vec<Seq<T>>,
}

impl<T: Real> TargetCombiners<T> {
    pub fn subcarrier(&self) -> usize {
        self.subcarrier
    }
}

impl<T: Real> Combiners<T> for TargetCombiners<T> {
    fn delay(&self) -> usize {
        self.delay
    }

    fn n_rx(&self) -> usize {
        self.n_rx
    }

    fn n_tx(&self) -> usize {
        self.n_tx
    }

    fn combiner_at(&self, m: usize, u: usize, r: usize) -> Result<Seq<T>> {
        if m != self.subcarrier {
            return Err(Error::invalid(
                "m",
                m,
                format!("the designed subcarrier {}", self.subcarrier),
            ));
        }
        Ok(self.taps[u * self.n_rx + r].clone())
    }
}

impl<T: Real> Receiver<T> {
    /// Combiners of subcarrier `m` only.
    pub fn target(&self, m: usize) -> TargetCombiners<T> {
        let (n_tx, n_rx) = (self.n_tx(), self.n_rx());
        TargetCombiners {
            subcarrier: m,
            delay: self.delay(),
            n_tx,
            n_rx,
            taps: (0..n_tx * n_rx).map(|i| self.combiner(m, i / n_rx, i % n_rx)).collect(),
        }
    }
}

/// Designs one subcarrier's combiners per channel draw. Stage-2 fits only that subcarrier,
/// and its least-squares system is factored once at construction.
#[derive(Clone, Debug)]
pub struct TargetDesigner<T> {
    scheme: Scheme,
    subcarrier: usize,
    num_subcarriers: usize,
    fitter: Option<LsFitter<T>>,
}

impl<T: Real> TargetDesigner<T> {
    pub fn new(fb: &FilterBank<T>, scheme: Scheme, subcarrier: usize) -> Result<Self> {
        let m = fb.num_subcarriers();
        if subcarrier >= m {
            return Err(Error::invalid("m", subcarrier, format!("< M = {m}")));
        }
        let fitter = match scheme {
            Scheme::TwoStage { plan, len } => {
                Some(LsFitter::new(fb, subcarrier, plan, len).map_err(|e| e.at_subcarrier(subcarrier))?)
            }
            _ => None,
        };
        Ok(TargetDesigner {
            scheme,
            subcarrier,
            num_subcarriers: m,
            fitter,
        })
    }

    /// Same combiners as `design_receiver(..).target(subcarrier)`.
    pub fn design(
        &self,
        csi: &FreqCsi<T>,
        criterion: Criterion,
        alpha: usize,
        sync: usize,
    ) -> Result<TargetCombiners<T>> {
        let (n_tx, n_rx) = (csi.n_tx(), csi.n_rx());
        let m = self.subcarrier;
        let (delay, taps) = match (self.scheme, &self.fitter) {
            (Scheme::HighRate, _) => {
                let eq = design_highrate(csi, criterion, alpha, self.num_subcarriers)?;
                let taps = (0..n_tx * n_rx)
                    .map(|i| Seq::causal(eq.impulse(i / n_rx, i % n_rx).to_vec()))
                    .collect();
                (eq.delay(), taps)
            }
            (Scheme::TwoStage { plan, .. }, Some(fitter)) => {
                let eq = design_highrate(csi, criterion, alpha, self.num_subcarriers)?;
                let taps = (0..n_tx * n_rx)
                    .map(|i| Seq::causal(upsample(&fitter.fit(eq.impulse(i / n_rx, i % n_rx)), plan.d1())))
                    .collect();
                (eq.delay(), taps)
            }
            (Scheme::SingleTap, _) => {
                let eq = single_tap(&csi.advanced(sync), criterion)?;
                let w = eq.weights(m);
                let taps = (0..n_tx * n_rx)
                    .map(|i| Seq::new(-(sync as isize), vec![w[(i / n_rx, i % n_rx)]]))
                    .collect();
                (0, taps)
            }
            (Scheme::TwoStage { .. }, None) => unreachable!("two-stage designers hold a fitter"),
        };
        Ok(TargetCombiners {
            subcarrier: m,
            delay,
            n_tx,
            n_rx,
            taps,
        })
    }
}
