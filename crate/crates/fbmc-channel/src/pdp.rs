//! Power-delay profiles and their resampling onto the simulation grid.

use std::path::Path;

use fbmc_core::{Error, Result};

/// Half-width, in samples, of the band-limited interpolation kernel used to
/// place a path with fractional delay onto the sample grid.
pub const INTERP_HALF_WIDTH: usize = 4;

/// Normalized discrete power-delay profile `q[l]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PdpProfile {
    name: String,
    taps: Vec<f64>,
    sample_rate: f64,
    sync_delay: usize,
}

/// Tapped-delay-line anchors: (delay in ns, relative power in dB).
struct Anchors {
    name: &'static str,
    delays_ns: &'static [f64],
    powers_db: &'static [f64],
}

const EVA: Anchors = Anchors {
    name: "EVA",
    delays_ns: &[0.0, 30.0, 150.0, 310.0, 370.0, 710.0, 1090.0, 1730.0, 2510.0],
    powers_db: &[0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9],
};

const ETU: Anchors = Anchors {
    name: "ETU",
    delays_ns: &[0.0, 50.0, 120.0, 200.0, 230.0, 500.0, 1600.0, 2300.0, 5000.0],
    powers_db: &[-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0],
};

const PED_A: Anchors = Anchors {
    name: "PedA",
    delays_ns: &[0.0, 110.0, 190.0, 410.0],
    powers_db: &[0.0, -9.7, -19.2, -22.8],
};

const PED_B: Anchors = Anchors {
    name: "PedB",
    delays_ns: &[0.0, 200.0, 800.0, 1200.0, 2300.0, 3700.0],
    powers_db: &[0.0, -0.9, -4.9, -8.0, -7.8, -23.9],
};

/// Canonical names of the built-in profiles.
pub const STANDARD_PROFILES: [&str; 4] = ["EVA", "ETU", "PedA", "PedB"];

fn standard(name: &str) -> Option<&'static Anchors> {
    let key: String = name
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_uppercase();
    match key.as_str() {
        "EVA" => Some(&EVA),
        "ETU" => Some(&ETU),
        "PEDA" => Some(&PED_A),
        "PEDB" => Some(&PED_B),
        _ => None,
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Spreads each path's power over the grid with a `sinc^2` kernel; the grid
/// spans `INTERP_HALF_WIDTH` taps before the first and after the last path.
/// Integer delays land on a single tap.
fn resample(name: &str, delays_ns: &[f64], powers_db: &[f64], sample_rate: f64) -> Result<PdpProfile> {
    if !sample_rate.is_finite() || sample_rate <= 0.0 {
        return Err(Error::invalid(
            "sample_rate",
            sample_rate,
            "a positive finite rate in Hz",
        ));
    }
    let delays: Vec<f64> = delays_ns.iter().map(|d| d * 1e-9 * sample_rate).collect();
    let max_delay = delays.iter().cloned().fold(0.0, f64::max);
    let w = INTERP_HALF_WIDTH;
    let len = max_delay.floor() as usize + 2 * w + 1;
    let mut q = vec![0.0; len];
    for (&d, &p_db) in delays.iter().zip(powers_db) {
        let p = 10f64.powf(p_db / 10.0);
        let nearest = d.round();
        if (d - nearest).abs() < 1e-9 {
            q[nearest as usize + w] += p;
            continue;
        }
        for (l, slot) in q.iter_mut().enumerate() {
            *slot += p * sinc(l as f64 - w as f64 - d).powi(2);
        }
    }
    let lead = q.iter().take_while(|&&v| v == 0.0).count();
    let trail = q.iter().rev().take_while(|&&v| v == 0.0).count();
    if lead == len {
        return Err(Error::MalformedProfile {
            line: 0,
            reason: "profile carries no power".into(),
        });
    }
    let trimmed = q[lead..len - trail].to_vec();
    let mut prof = PdpProfile::from_taps(name, trimmed)?;
    prof.sample_rate = sample_rate;
    let first = delays.iter().cloned().fold(f64::INFINITY, f64::min).round() as usize;
    prof.sync_delay = (w + first).saturating_sub(lead);
    Ok(prof)
}

/// Loads a built-in profile (EVA, ETU, PedA, PedB) or, failing that, a
/// custom `delay_ns power_db` file at path `name`.
pub fn load_pdp(name: &str, sample_rate: f64) -> Result<PdpProfile> {
    if let Some(a) = standard(name) {
        return resample(a.name, a.delays_ns, a.powers_db, sample_rate);
    }
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::MalformedProfile {
            line: 0,
            reason: e.to_string(),
        })?;
        return parse_pdp_text(name, &text, sample_rate);
    }
    Err(Error::UnknownProfile(name.to_string()))
}

/// Parses the two-column `delay_ns power_db` text format (`#` starts a comment).
pub fn parse_pdp_text(name: &str, text: &str, sample_rate: f64) -> Result<PdpProfile> {
    let mut delays = Vec::new();
    let mut powers = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let malformed = |reason: String| Error::MalformedProfile { line: i + 1, reason };
        if fields.len() != 2 {
            return Err(malformed(format!("expected 2 columns, found {}", fields.len())));
        }
        let d: f64 = fields[0]
            .parse()
            .map_err(|_| malformed(format!("bad delay '{}'", fields[0])))?;
        let p: f64 = fields[1]
            .parse()
            .map_err(|_| malformed(format!("bad power '{}'", fields[1])))?;
        if !d.is_finite() || d < 0.0 {
            return Err(malformed(format!("delay must be finite and >= 0, got {d}")));
        }
        if !p.is_finite() {
            return Err(malformed(format!("power must be finite, got {p}")));
        }
        delays.push(d);
        powers.push(p);
    }
    if delays.is_empty() {
        return Err(Error::MalformedProfile {
            line: 0,
            reason: "no paths".into(),
        });
    }
    resample(name, &delays, &powers, sample_rate)
}

impl PdpProfile {
    /// Builds a profile from linear tap powers, normalizing to unit sum.
    pub fn from_taps(name: &str, taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() || taps.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::invalid(
                "profile taps",
                format!("{taps:?}"),
                "a non-empty list of finite non-negative powers",
            ));
        }
        let sum: f64 = taps.iter().sum();
        if sum <= 0.0 {
            return Err(Error::invalid("profile taps", "all zero", "positive total power"));
        }
        Ok(PdpProfile {
            name: name.to_string(),
            taps: taps.into_iter().map(|v| v / sum).collect(),
            sample_rate: 0.0,
            sync_delay: 0,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Linear tap powers `q[l]`, summing to one.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// `L_h`.
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Sample rate the profile was resampled to (0 for raw tap lists).
    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    /// Index of the tap holding the earliest path; a symbol-timing reference.
    pub fn sync_delay(&self) -> usize {
        self.sync_delay
    }

    pub fn with_sync_delay(mut self, d: usize) -> Self {
        self.sync_delay = d;
        self
    }

    /// `q[l]` or zero beyond the profile.
    pub fn tap(&self, l: usize) -> f64 {
        self.taps.get(l).copied().unwrap_or(0.0)
    }
}
