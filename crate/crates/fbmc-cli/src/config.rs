//! Simulation configuration: `key=value` text with `#` comments, fail-closed on unknown keys.
//!
//! Tokens are separated by whitespace or newlines, so `M=64 N_r=8 trials=200` is one valid
//! line. Later assignments override earlier ones. Lists are comma separated. Sizes tied to
//! the subcarrier count may be written as `M` or `M/k` and are kept symbolic, so rendering
//! reproduces what was parsed.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fbmc_channel::{load_pdp, PdpProfile};
use fbmc_metrics::{Design, LinkSetup, Scheme, USER_CHANNELS};
use fbmc_stage2::DecimationPlan;

use crate::error::{CliError, CliResult};

/// Every accepted key, in rendering order.
pub const KEYS: [&str; 20] = [
    "M",
    "N_t",
    "N_r",
    "kappa",
    "L_g",
    "alpha",
    "D1",
    "Lg_prime",
    "gamma_db",
    "schemes",
    "channels",
    "criterion",
    "trials",
    "master_seed",
    "m",
    "output",
    "sample_rate",
    "N_d",
    "L_p",
    "threads",
];

/// A count that is either absolute or a fraction `M/k` of the subcarrier count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Size {
    Abs(usize),
    OfM(usize),
}

impl Size {
    pub fn resolve(self, m: usize) -> Option<usize> {
        match self {
            Size::Abs(v) => Some(v),
            Size::OfM(k) if k > 0 && m.is_multiple_of(k) => Some(m / k),
            Size::OfM(_) => None,
        }
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Size::Abs(v) => write!(f, "{v}"),
            Size::OfM(1) => write!(f, "M"),
            Size::OfM(k) => write!(f, "M/{k}"),
        }
    }
}

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "M" {
            return Ok(Size::OfM(1));
        }
        if let Some(k) = s.strip_prefix("M/") {
            return match k.parse::<usize>() {
                Ok(k) if k > 0 => Ok(Size::OfM(k)),
                _ => Err(format!("'{s}' is not M/k with a positive integer k")),
            };
        }
        s.parse::<usize>()
            .map(Size::Abs)
            .map_err(|_| format!("'{s}' is neither a non-negative integer, M, nor M/k"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    HighRate,
    TwoStage,
    SingleTap,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::HighRate => "high-rate",
            SchemeKind::TwoStage => "two-stage",
            SchemeKind::SingleTap => "single-tap",
        }
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "high-rate" => Ok(SchemeKind::HighRate),
            "two-stage" => Ok(SchemeKind::TwoStage),
            "single-tap" => Ok(SchemeKind::SingleTap),
            _ => Err(format!(
                "unknown scheme '{s}', expected high-rate, two-stage or single-tap"
            )),
        }
    }
}

fn design_name(d: Design) -> &'static str {
    match d {
        Design::Zf => "zf",
        Design::Mmse => "mmse",
    }
}

fn parse_design(s: &str) -> Result<Design, String> {
    match s {
        "zf" => Ok(Design::Zf),
        "mmse" => Ok(Design::Mmse),
        _ => Err(format!("unknown criterion '{s}', expected zf or mmse")),
    }
}

/// Full simulation configuration. Field comments give the key name.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// `M`
    pub num_subcarriers: usize,
    /// `N_t`
    pub n_t: usize,
    /// `N_r`, swept where a preset varies the antenna count.
    pub n_r: Vec<usize>,
    pub kappa: usize,
    /// `L_g`
    pub l_g: Size,
    pub alpha: usize,
    /// `D1`
    pub d1: Vec<Size>,
    /// `Lg_prime`, the low-rate equalizer length `L'_g`.
    pub lg_prime: Vec<usize>,
    pub gamma_db: Vec<f64>,
    pub schemes: Vec<SchemeKind>,
    /// Channel model per user, cycled when shorter than `N_t`.
    pub channels: Vec<String>,
    pub criterion: Vec<Design>,
    pub trials: usize,
    pub master_seed: u64,
    /// `m`, the measured subcarrier.
    pub subcarrier: Size,
    pub output: PathBuf,
    /// Sample rate in Hz at which the delay profiles are tabulated onto taps.
    pub sample_rate: f64,
    /// `N_d`, OQAM instants per MSE frame.
    pub n_d: usize,
    /// `L_p`, pilot length for estimated CSI.
    pub l_p: usize,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
}

impl Default for SimConfig {
    /// 256 subcarriers, 8 users with the EVA/ETU/PedA/PedB pairs, overlap 4, `L_g = M` and
    /// `alpha = 1`; two-stage at `D1 = M/4`, `L'_g = 5`; 96-instant frames with 8 pilots.
    fn default() -> Self {
        SimConfig {
            num_subcarriers: 256,
            n_t: 8,
            n_r: vec![16],
            kappa: 4,
            l_g: Size::OfM(1),
            alpha: 1,
            d1: vec![Size::OfM(4)],
            lg_prime: vec![5],
            gamma_db: vec![10.0],
            schemes: vec![SchemeKind::TwoStage, SchemeKind::SingleTap],
            channels: USER_CHANNELS.iter().map(|s| s.to_string()).collect(),
            criterion: vec![Design::Zf],
            trials: 500,
            master_seed: 1,
            subcarrier: Size::OfM(2),
            output: PathBuf::from("results"),
            sample_rate: 7.68e6,
            n_d: 96,
            l_p: 8,
            threads: 0,
        }
    }
}

/// Defaults overridden by `text`, then validated.
pub fn parse_config(text: &str) -> CliResult<SimConfig> {
    SimConfig::default().apply(text)
}

/// Canonical text form; `parse_config(&render(c))` returns `c`.
pub fn render(c: &SimConfig) -> String {
    let join = |v: Vec<String>| v.join(",");
    let mut out = String::new();
    for key in KEYS {
        let value = match key {
            "M" => c.num_subcarriers.to_string(),
            "N_t" => c.n_t.to_string(),
            "N_r" => join(c.n_r.iter().map(|v| v.to_string()).collect()),
            "kappa" => c.kappa.to_string(),
            "L_g" => c.l_g.to_string(),
            "alpha" => c.alpha.to_string(),
            "D1" => join(c.d1.iter().map(|v| v.to_string()).collect()),
            "Lg_prime" => join(c.lg_prime.iter().map(|v| v.to_string()).collect()),
            "gamma_db" => join(c.gamma_db.iter().map(|v| v.to_string()).collect()),
            "schemes" => join(c.schemes.iter().map(|v| v.name().to_string()).collect()),
            "channels" => c.channels.join(","),
            "criterion" => join(c.criterion.iter().map(|&d| design_name(d).to_string()).collect()),
            "trials" => c.trials.to_string(),
            "master_seed" => c.master_seed.to_string(),
            "m" => c.subcarrier.to_string(),
            "output" => c.output.display().to_string(),
            "sample_rate" => c.sample_rate.to_string(),
            "N_d" => c.n_d.to_string(),
            "L_p" => c.l_p.to_string(),
            "threads" => c.threads.to_string(),
            _ => unreachable!("every key is rendered"),
        };
        out.push_str(&format!("{key}={value}\n"));
    }
    out
}

fn scalar<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::config(key, format!("cannot parse '{value}' as {}", std::any::type_name::<T>())))
}

fn list<T>(key: &str, value: &str, item: impl Fn(&str) -> Result<T, String>) -> CliResult<Vec<T>> {
    value
        .split(',')
        .map(|s| item(s.trim()).map_err(|e| CliError::config(key, e)))
        .collect()
}

fn number_list<T: FromStr>(key: &str, value: &str) -> CliResult<Vec<T>> {
    list(key, value, |s| {
        s.parse()
            .map_err(|_| format!("cannot parse '{s}' as {}", std::any::type_name::<T>()))
    })
}

fn strictly_increasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn distinct<T: PartialEq>(v: &[T]) -> bool {
    v.iter().enumerate().all(|(i, a)| !v[..i].contains(a))
}

impl SimConfig {
    /// Applies the assignments in `text` on top of `self` and validates the result.
    pub fn apply(&self, text: &str) -> CliResult<SimConfig> {
        let mut c = self.clone();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for token in line.split_whitespace() {
                let (key, value) = token
                    .split_once('=')
                    .ok_or_else(|| CliError::config(token, "expected key=value"))?;
                if value.is_empty() {
                    return Err(CliError::config(key, "empty value"));
                }
                c.set(key, value)?;
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "M" => self.num_subcarriers = scalar(key, value)?,
            "N_t" => self.n_t = scalar(key, value)?,
            "N_r" => self.n_r = number_list(key, value)?,
            "kappa" => self.kappa = scalar(key, value)?,
            "L_g" => self.l_g = value.parse().map_err(|e| CliError::config(key, e))?,
            "alpha" => self.alpha = scalar(key, value)?,
            "D1" => self.d1 = list(key, value, str::parse)?,
            "Lg_prime" => self.lg_prime = number_list(key, value)?,
            "gamma_db" => self.gamma_db = number_list(key, value)?,
            "schemes" => self.schemes = list(key, value, str::parse)?,
            "channels" => self.channels = list(key, value, |s| Ok(s.to_string()))?,
            "criterion" => self.criterion = list(key, value, parse_design)?,
            "trials" => self.trials = scalar(key, value)?,
            "master_seed" => self.master_seed = scalar(key, value)?,
            "m" => self.subcarrier = value.parse().map_err(|e| CliError::config(key, e))?,
            "output" => self.output = PathBuf::from(value),
            "sample_rate" => self.sample_rate = scalar(key, value)?,
            "N_d" => self.n_d = scalar(key, value)?,
            "L_p" => self.l_p = scalar(key, value)?,
            "threads" => self.threads = scalar(key, value)?,
            _ => {
                return Err(CliError::config(
                    key,
                    format!("unknown key; accepted keys are {}", KEYS.join(", ")),
                ));
            }
        }
        Ok(())
    }

    /// Checks every precondition the simulation modules impose, naming the offending key.
    pub fn validate(&mut self) -> CliResult<()> {
        let m = self.num_subcarriers;
        if m < 4 || !m.is_power_of_two() {
            return Err(CliError::config("M", format!("{m} is not a power of two >= 4")));
        }
        if !(2..=4).contains(&self.kappa) {
            return Err(CliError::config(
                "kappa",
                format!("{} is not one of 2, 3, 4", self.kappa),
            ));
        }
        if self.n_t == 0 {
            return Err(CliError::config("N_t", "must be >= 1"));
        }
        if self.n_r.contains(&0) || !strictly_increasing(&self.n_r) {
            return Err(CliError::config("N_r", "must be positive and strictly increasing"));
        }
        if self.criterion.is_empty() || !distinct(&self.criterion) {
            return Err(CliError::config("criterion", "must list distinct criteria"));
        }
        if self.criterion.contains(&Design::Zf) && self.n_r[0] < self.n_t {
            return Err(CliError::config(
                "N_r",
                format!("zero forcing needs N_r >= N_t = {}, got {}", self.n_t, self.n_r[0]),
            ));
        }
        let l_g = match self.l_g.resolve(m) {
            Some(v) if v >= 1 => v,
            _ => {
                return Err(CliError::config(
                    "L_g",
                    format!("{} is not a positive integer for M = {m}", self.l_g),
                ))
            }
        };
        if self.d1.is_empty() || !distinct(&self.d1) {
            return Err(CliError::config("D1", "must list distinct values"));
        }
        for &d in &self.d1 {
            let ok = d.resolve(m).map(|v| DecimationPlan::new(m, v).is_ok()).unwrap_or(false);
            if !ok {
                return Err(CliError::config(
                    "D1",
                    format!(
                        "{d} violates the decimation rule D1 = M/2^eta for an integer eta >= 1, \
                         which splits the symbol-rate factor as D1*D2 = M/2 with integer D2; \
                         valid values for M = {m} are M/2, M/4, ..., 1"
                    ),
                ));
            }
        }
        if self.lg_prime.contains(&0) || !strictly_increasing(&self.lg_prime) {
            return Err(CliError::config("Lg_prime", "must be positive and strictly increasing"));
        }
        if self.gamma_db.iter().any(|g| !g.is_finite()) || !strictly_increasing(&self.gamma_db) {
            return Err(CliError::config("gamma_db", "must be finite and strictly increasing"));
        }
        if self.schemes.is_empty() || !distinct(&self.schemes) {
            return Err(CliError::config("schemes", "must list distinct schemes"));
        }
        if self.trials == 0 {
            return Err(CliError::config("trials", "must be >= 1"));
        }
        match self.subcarrier.resolve(m) {
            Some(v) if v < m => {}
            _ => {
                return Err(CliError::config(
                    "m",
                    format!("{} is not a subcarrier index below M = {m}", self.subcarrier),
                ))
            }
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(CliError::config("sample_rate", "must be a positive rate in Hz"));
        }
        let guard = 2 * self.kappa;
        if !self.n_d.is_multiple_of(2) || self.n_d <= 2 * guard {
            return Err(CliError::config(
                "N_d",
                format!(
                    "{} must be even and exceed twice the {guard}-instant edge guard",
                    self.n_d
                ),
            ));
        }
        if self.l_p == 0 {
            return Err(CliError::config("L_p", "must be >= 1"));
        }
        if self.channels.is_empty() {
            return Err(CliError::config("channels", "must name at least one channel model"));
        }
        let mut longest = 0;
        for name in self.channels.iter_mut() {
            let p = load_pdp(name, self.sample_rate).map_err(|e| CliError::config("channels", e.to_string()))?;
            if p.len() > m {
                return Err(CliError::config(
                    "channels",
                    format!(
                        "{} spans {} taps at {} Hz, more than M = {m}",
                        p.name(),
                        p.len(),
                        self.sample_rate
                    ),
                ));
            }
            longest = longest.max(p.len());
            *name = p.name().to_string();
        }
        fbmc_stage1::validate_delay(self.alpha, longest, l_g, m)
            .map_err(|e| CliError::config("alpha", e.to_string()))?;
        Ok(())
    }

    pub fn eq_len(&self) -> usize {
        self.l_g.resolve(self.num_subcarriers).expect("validated L_g")
    }

    pub fn subcarrier_index(&self) -> usize {
        self.subcarrier.resolve(self.num_subcarriers).expect("validated m")
    }

    pub fn d1_values(&self) -> Vec<usize> {
        self.d1
            .iter()
            .map(|d| d.resolve(self.num_subcarriers).expect("validated D1"))
            .collect()
    }

    /// Channel names of users `0..N_t`.
    pub fn user_channels(&self) -> Vec<&str> {
        (0..self.n_t)
            .map(|u| self.channels[u % self.channels.len()].as_str())
            .collect()
    }

    /// Channel models sampled at the configured rate, one per user; `first` replaces user 0's.
    pub fn profiles(&self, first: Option<&str>) -> CliResult<Vec<PdpProfile>> {
        self.user_channels()
            .iter()
            .enumerate()
            .map(|(u, name)| {
                let name = if u == 0 { first.unwrap_or(name) } else { name };
                Ok(load_pdp(name, self.sample_rate)?)
            })
            .collect()
    }

    /// Link with `n_rx` antennas designed under `design`, measuring user 0 on subcarrier `m`.
    pub fn link(&self, n_rx: usize, design: Design, profiles: Vec<PdpProfile>) -> CliResult<LinkSetup> {
        let mut s = LinkSetup::new(self.num_subcarriers, self.kappa, n_rx, profiles)?;
        s.eq_len = self.eq_len();
        s.alpha = self.alpha;
        s.design = design;
        s.subcarrier = self.subcarrier_index();
        Ok(s)
    }

    /// Two-stage schemes for every `(D1, L'_g)` pair, `D1` outermost.
    pub fn two_stage_schemes(&self) -> CliResult<Vec<Scheme>> {
        let m = self.num_subcarriers;
        let mut out = Vec::new();
        for d1 in self.d1_values() {
            for &len in &self.lg_prime {
                out.push(Scheme::two_stage(m, d1, len)?);
            }
        }
        Ok(out)
    }

    /// Schemes named by `schemes`, with two-stage expanded over `D1` and `L'_g`.
    pub fn expanded_schemes(&self) -> CliResult<Vec<Scheme>> {
        let mut out = Vec::new();
        for kind in &self.schemes {
            match kind {
                SchemeKind::HighRate => out.push(Scheme::HighRate),
                SchemeKind::TwoStage => out.extend(self.two_stage_schemes()?),
                SchemeKind::SingleTap => out.push(Scheme::SingleTap),
            }
        }
        Ok(out)
    }
}

pub fn criterion_name(d: Design) -> &'static str {
    design_name(d)
}
