//! Monte Carlo drivers: SINR trials, sweeps and frame-level MSE.

use fbmc_channel::{
    add_awgn_with, apply_channel, draw_channel_with, estimate_csi_mmse_with, freq_csi, load_pdp, pilot_power,
    ChannelRealization, FreqCsi, PdpProfile,
};
use fbmc_core::{design_prototype, ComplexGrid, Error, FilterBank, Result, C};
use fbmc_stage1::Criterion;
use rand::seq::IndexedRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::coeffs::{empirical_sinr, measure_coeffs, CoeffContext, SinrSample};
use crate::scheme::{design_receiver, Receiver, Scheme, TargetDesigner};
use crate::stats::{from_db, to_db, MeanEstimate, NeumaierSum};

/// Per-user channel profile names, cycled over users.
pub const USER_CHANNELS: [&str; 8] = ["EVA", "EVA", "ETU", "ETU", "PedA", "PedA", "PedB", "PedB"];

/// Default sample rate of the tapped-delay-line models.
pub const DEFAULT_SAMPLE_RATE: f64 = 7.68e6;

/// Profiles of users `0..n_t` under the standard assignment.
pub fn assigned_profiles(n_t: usize, sample_rate: f64) -> Result<Vec<PdpProfile>> {
    (0..n_t)
        .map(|u| load_pdp(USER_CHANNELS[u % USER_CHANNELS.len()], sample_rate))
        .collect()
}

/// Equalizer design criterion; MMSE is regularized by the operating noise level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Design {
    Zf,
    Mmse,
}

impl Design {
    pub fn criterion(self, sigma2: f64, symbol_power: f64) -> Criterion {
        match self {
            Design::Zf => Criterion::ZeroForcing,
            Design::Mmse => Criterion::Mmse {
                noise_var: sigma2,
                symbol_power,
            },
        }
    }
}

/// Link parameters shared by all Monte Carlo drivers.
#[derive(Clone, Debug)]
pub struct LinkSetup {
    pub fb: FilterBank<f64>,
    pub profiles: Vec<PdpProfile>,
    pub n_rx: usize,
    /// High-rate equalizer length `L_g`, also the number of CSI frequency bins it is designed from.
    pub eq_len: usize,
    pub alpha: usize,
    pub design: Design,
    pub subcarrier: usize,
    pub user: usize,
    /// Real OQAM symbol power `P_s`; the transmit SNR is `P_s / sigma^2`.
    pub symbol_power: f64,
}

impl LinkSetup {
    /// ZF link with `L_g = M`, `alpha = 1`, target `(M/2, 0)` and `P_s = 1/2` (unit-power QAM).
    pub fn new(m: usize, kappa: usize, n_rx: usize, profiles: Vec<PdpProfile>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::invalid("N_t", 0, ">= 1"));
        }
        if n_rx == 0 {
            return Err(Error::invalid("N_r", 0, ">= 1"));
        }
        Ok(LinkSetup {
            fb: FilterBank::new(design_prototype(kappa, m)?),
            profiles,
            n_rx,
            eq_len: m,
            alpha: 1,
            design: Design::Zf,
            subcarrier: m / 2,
            user: 0,
            symbol_power: 0.5,
        })
    }

    pub fn num_subcarriers(&self) -> usize {
        self.fb.num_subcarriers()
    }

    pub fn n_tx(&self) -> usize {
        self.profiles.len()
    }

    /// Sampling lag of the single-tap receiver: the largest profile synchronization delay.
    pub fn sync_delay(&self) -> usize {
        self.profiles.iter().map(|p| p.sync_delay()).max().unwrap_or(0)
    }

    pub fn sigma2(&self, gamma_db: f64) -> f64 {
        self.symbol_power / from_db(gamma_db)
    }

    fn validate(&self) -> Result<()> {
        let m = self.num_subcarriers();
        if self.subcarrier >= m {
            return Err(Error::invalid("m", self.subcarrier, format!("< M = {m}")));
        }
        if self.user >= self.n_tx() {
            return Err(Error::invalid("u", self.user, format!("< N_t = {}", self.n_tx())));
        }
        if self.n_rx == 0 {
            return Err(Error::invalid("N_r", 0, ">= 1"));
        }
        if self.eq_len == 0 {
            return Err(Error::invalid("L_g", 0, ">= 1"));
        }
        if self.symbol_power.is_nan() || self.symbol_power <= 0.0 {
            return Err(Error::invalid("P_s", self.symbol_power, "> 0"));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        let taps: Vec<String> = self
            .profiles
            .iter()
            .map(|p| format!("{}@{}:{:?}", p.name(), p.sample_rate(), p.taps()))
            .collect();
        format!(
            "M={} kappa={} N_r={} L_g={} alpha={} design={:?} m={} u={} P_s={} profiles=[{}]",
            self.num_subcarriers(),
            self.fb.prototype().overlap(),
            self.n_rx,
            self.eq_len,
            self.alpha,
            self.design,
            self.subcarrier,
            self.user,
            self.symbol_power,
            taps.join(";")
        )
    }

    /// CSI bins `scheme` is designed from: one per subcarrier for single-tap, `L_g` otherwise.
    pub fn csi_bins(&self, scheme: Scheme) -> usize {
        match scheme {
            Scheme::SingleTap => self.num_subcarriers(),
            _ => self.eq_len,
        }
    }

    /// Receiver of `scheme` designed from `csi` at noise level `sigma2`.
    pub fn receiver(&self, csi: &FreqCsi<f64>, scheme: Scheme, sigma2: f64) -> Result<Receiver<f64>> {
        design_receiver(
            csi,
            &self.fb,
            scheme,
            self.design.criterion(sigma2, self.symbol_power),
            self.alpha,
            self.sync_delay(),
        )
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<ChannelRealization<f64>> {
        draw_channel_with(&self.profiles, self.n_rx, rng)
    }
}

/// Random stream of trial `t` under `seed`.
pub fn trial_rng(seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    rng
}

/// Seed of sweep point `idx` derived from `master`.
pub fn point_seed(master: u64, idx: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(u64::MAX - idx as u64);
    rng.next_u64()
}

fn fingerprint(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Averages over channel realizations at one operating point.
#[derive(Clone, Debug, PartialEq)]
pub struct SinrReport {
    pub scheme: String,
    pub subcarrier: usize,
    pub user: usize,
    pub gamma_db: f64,
    pub sir_db: f64,
    pub sir_se_db: f64,
    pub sinr_db: f64,
    pub sinr_se_db: f64,
    /// Mean noise power at the decision point, in dB.
    pub noise_db: f64,
    /// Mean real-symbol MSE implied by the coefficients.
    pub mse: f64,
    pub trials: usize,
    pub seed: u64,
    pub fingerprint: String,
}

impl SinrReport {
    fn from_samples(
        setup: &LinkSetup,
        scheme: Scheme,
        gamma_db: f64,
        seed: u64,
        samples: &[(SinrSample, f64)],
    ) -> Self {
        let col = |f: &dyn Fn(&(SinrSample, f64)) -> f64| {
            MeanEstimate::from_samples(&samples.iter().map(f).collect::<Vec<_>>())
        };
        let sir = col(&|s| s.0.sir());
        let sinr = col(&|s| s.0.sinr());
        let noise = col(&|s| s.0.noise);
        let mse = col(&|s| s.1);
        SinrReport {
            scheme: scheme.label(),
            subcarrier: setup.subcarrier,
            user: setup.user,
            gamma_db,
            sir_db: sir.db(),
            sir_se_db: sir.se_db(),
            sinr_db: sinr.db(),
            sinr_se_db: sinr.se_db(),
            noise_db: noise.db(),
            mse: mse.mean,
            trials: samples.len(),
            seed,
            fingerprint: fingerprint(&format!(
                "{} scheme={} gamma_db={gamma_db} trials={}",
                setup.describe(),
                scheme.label(),
                samples.len()
            )),
        }
    }
}

/// Per-realization powers of `trials` channel draws; trial `t` uses stream `t` of `seed`.
pub fn sample_trials(
    setup: &LinkSetup,
    scheme: Scheme,
    gamma_db: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<(SinrSample, f64)>> {
    setup.validate()?;
    let ctx = CoeffContext::new(&setup.fb, setup.subcarrier)?;
    let designer = TargetDesigner::new(&setup.fb, scheme, setup.subcarrier)?;
    let sigma2 = setup.sigma2(gamma_db);
    let criterion = setup.design.criterion(sigma2, setup.symbol_power);
    let bins = setup.csi_bins(scheme);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let h = setup.draw(&mut rng)?;
            let rx = designer.design(&freq_csi(&h, bins), criterion, setup.alpha, setup.sync_delay())?;
            let c = measure_coeffs(&ctx, &h, &rx, setup.user)?;
            Ok((
                empirical_sinr(&c, setup.symbol_power, sigma2),
                c.mse(setup.symbol_power, sigma2),
            ))
        })
        .collect()
}

/// Monte Carlo SIR/SINR of `scheme` at transmit SNR `gamma_db`.
pub fn run_trials(setup: &LinkSetup, scheme: Scheme, gamma_db: f64, trials: usize, seed: u64) -> Result<SinrReport> {
    if trials == 0 {
        return Err(Error::invalid("trials", 0, ">= 1"));
    }
    let samples = sample_trials(setup, scheme, gamma_db, trials, seed)?;
    Ok(SinrReport::from_samples(setup, scheme, gamma_db, seed, &samples))
}

/// Sweep variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Number of BS antennas.
    Nr,
    /// Transmit SNR in dB.
    GammaDb,
    /// Low-rate equalizer length; applies to two-stage schemes only.
    LgPrime,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Nr => "N_r",
            Axis::GammaDb => "gamma_db",
            Axis::LgPrime => "Lg_prime",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    /// One report per scheme, in the order given.
    pub reports: Vec<SinrReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
}

fn integer_point(axis: Axis, x: f64) -> Result<usize> {
    if x.fract() != 0.0 || x < 1.0 || !x.is_finite() {
        return Err(Error::invalid(axis.name(), x, "an integer >= 1"));
    }
    Ok(x as usize)
}

/// Runs every scheme at every axis point. All schemes at one point share the channel draws.
pub fn sweep(
    setup: &LinkSetup,
    gamma_db: f64,
    axis: Axis,
    points: &[f64],
    schemes: &[Scheme],
    trials: usize,
    master_seed: u64,
) -> Result<SweepResult> {
    if points.iter().any(|p| p.is_nan()) || points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            axis.name(),
            format!("{points:?}"),
            "strictly increasing points",
        ));
    }
    let mut out = Vec::with_capacity(points.len());
    for (idx, &x) in points.iter().enumerate() {
        let seed = point_seed(master_seed, idx);
        let mut local = setup.clone();
        let mut gamma = gamma_db;
        let mut point_schemes = schemes.to_vec();
        match axis {
            Axis::Nr => local.n_rx = integer_point(axis, x)?,
            Axis::GammaDb => {
                if !x.is_finite() {
                    return Err(Error::invalid(axis.name(), x, "a finite dB value"));
                }
                gamma = x;
            }
            Axis::LgPrime => {
                let len = integer_point(axis, x)?;
                for s in &mut point_schemes {
                    if let Scheme::TwoStage { len: l, .. } = s {
                        *l = len;
                    }
                }
            }
        }
        let reports = point_schemes
            .iter()
            .map(|&s| run_trials(&local, s, gamma, trials, seed))
            .collect::<Result<Vec<_>>>()?;
        out.push(SweepPoint { x, reports });
    }
    Ok(SweepResult { axis, points: out })
}

/// Channel knowledge at the receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsiMode {
    Perfect,
    /// LMMSE estimate from `L_p` training symbols at pilot power `2 P_s L_p`.
    Estimated {
        training: usize,
    },
}

/// Frame layout of the MSE experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MseFrame {
    /// Real OQAM symbols per subcarrier (even).
    pub n_d: usize,
    /// Symbol instants discarded at each frame edge.
    pub guard: usize,
}

impl MseFrame {
    pub fn new(n_d: usize, guard: usize) -> Result<Self> {
        if n_d == 0 || !n_d.is_multiple_of(2) || 2 * guard >= n_d {
            return Err(Error::invalid(
                "N_d",
                n_d,
                format!("even and > 2 * guard = {}", 2 * guard),
            ));
        }
        Ok(MseFrame { n_d, guard })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MseReport {
    pub scheme: String,
    pub gamma_db: f64,
    /// Mean over trials of the per-frame MSE normalized by `N_t M` and the measured instants.
    pub mse: f64,
    /// `10 log10` of the mean.
    pub mse_db: f64,
    pub mse_se_db: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Unit-power square 16-QAM alphabet.
pub fn qam16() -> Vec<C<f64>> {
    let lv = [-3.0, -1.0, 1.0, 3.0];
    let s = 10f64.sqrt().recip();
    lv.iter()
        .flat_map(|&re| lv.iter().map(move |&im| C::new(re * s, im * s)))
        .collect()
}

/// Average MSE between transmitted and estimated OQAM symbols of 16-QAM frames.
pub fn run_mse(
    setup: &LinkSetup,
    scheme: Scheme,
    csi_mode: CsiMode,
    gamma_db: f64,
    frame: MseFrame,
    trials: usize,
    seed: u64,
) -> Result<MseReport> {
    setup.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials", 0, ">= 1"));
    }
    let sigma2 = setup.sigma2(gamma_db);
    let (m, n_t) = (setup.num_subcarriers(), setup.n_tx());
    let alphabet = qam16();
    // QAM power is unity, so each real OQAM symbol carries half of it
    let ps = 0.5;
    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let h = setup.draw(&mut rng)?;
            let csi = freq_csi(&h, setup.csi_bins(scheme));
            let csi = match csi_mode {
                CsiMode::Perfect => csi,
                CsiMode::Estimated { training } => {
                    estimate_csi_mmse_with(&csi, pilot_power(ps, training), sigma2, &mut rng)?
                }
            };
            let rx = setup.receiver(&csi, scheme, sigma2)?;
            let qam = ComplexGrid::from_fn(n_t, m, frame.n_d / 2, |_, _, _| {
                *alphabet.choose(&mut rng).expect("nonempty alphabet")
            });
            let s = fbmc_core::qam_to_oqam(&qam, ps);
            let y = apply_channel(&setup.fb.modulate(&s)?, &h)?;
            let y = add_awgn_with(&y, sigma2, &mut rng)?;
            let est = rx.receive(&y, &setup.fb, frame.n_d, ps)?;
            let mut err = NeumaierSum::default();
            for u in 0..n_t {
                for k in 0..m {
                    for n in frame.guard..frame.n_d - frame.guard {
                        err.add((est.get(u, k, n) - s.get(u, k, n)).powi(2));
                    }
                }
            }
            Ok(err.value() / (n_t * m * (frame.n_d - 2 * frame.guard)) as f64)
        })
        .collect::<Result<_>>()?;
    let est = MeanEstimate::from_samples(&per_trial);
    Ok(MseReport {
        scheme: scheme.label(),
        gamma_db,
        mse: est.mean,
        mse_db: to_db(est.mean),
        mse_se_db: est.se_db(),
        trials,
        seed,
    })
}
