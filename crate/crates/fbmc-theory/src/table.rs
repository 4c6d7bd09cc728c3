//! Transmultiplexer coefficients seen by one target subcarrier after equalization.

use fbmc_core::{phase_factor, Error, FilterBank, Result, C};
use rayon::prelude::*;

type C64 = C<f64>;

/// Coefficients of symbol `(m', n - dn)` on the target `(m, n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceEntry {
    pub m_prime: usize,
    pub dn: isize,
    /// `F[l] = F_{m m'}[(dn + alpha) M/2 - l] e^{j(theta' - theta)}`, `l = 0..L`.
    pub coeffs: Vec<C64>,
    /// `Re F[alpha M/2]`, the coefficient under an ideal equalizer.
    pub direct: f64,
}

impl InterferenceEntry {
    /// `[Re F; -Im F]`, so that `Re(sum psi F) = [Re psi; Im psi]^T` this vector.
    pub fn stacked(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|z| z.re)
            .chain(self.coeffs.iter().map(|z| -z.im))
            .collect()
    }
}

/// All `(m', dn)` pairs whose coefficients are not identically zero for target `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceTable {
    subcarrier: usize,
    alpha: usize,
    len: usize,
    entries: Vec<InterferenceEntry>,
}

impl InterferenceTable {
    pub fn subcarrier(&self) -> usize {
        self.subcarrier
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Length `L = M + L_h - 1` of each coefficient vector.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[InterferenceEntry] {
        &self.entries
    }

    pub fn entry(&self, m_prime: usize, dn: isize) -> Option<&InterferenceEntry> {
        self.entries.iter().find(|e| e.m_prime == m_prime && e.dn == dn)
    }

    /// The desired-symbol entry `(m, 0)`.
    pub fn desired(&self) -> &InterferenceEntry {
        self.entry(self.subcarrier, 0).expect("desired entry is always present")
    }
}

/// Coefficient table for target subcarrier `m`, delay `alpha` and error length `len`.
pub fn interference_table(fb: &FilterBank<f64>, m: usize, alpha: usize, len: usize) -> Result<InterferenceTable> {
    let big_m = fb.num_subcarriers();
    if m >= big_m {
        return Err(Error::invalid("m", m, format!("below M = {big_m}")));
    }
    if len == 0 {
        return Err(Error::invalid("len", 0, ">= 1"));
    }
    let half = (big_m / 2) as isize;
    let lf = fb.filter_len() as isize;
    let a = alpha as isize;
    // (dn + alpha) M/2 in [-(L_f - 1), L_f + len - 2] for the error terms, dn M/2 in [-(L_f - 1), L_f - 1] for the direct one
    let first = -((lf - 1) / half);
    let lo = first - a;
    let hi = ((lf + len as isize - 2) / half - a).max((lf - 1) / half);
    let entries = (0..big_m)
        .into_par_iter()
        .flat_map_iter(|mp| {
            let resp = fb.transmux_response(m, mp);
            (lo..=hi).filter_map(move |dn| {
                // theta_{m', n'} - theta_{m, n} with n' = n - dn
                let ph = phase_factor::<f64>(mp as i64 - m as i64 - dn as i64, 0);
                let centre = (dn + a) * half;
                let coeffs: Vec<C64> = (0..len as isize).map(|l| resp.at(centre - l) * ph).collect();
                let direct = (resp.at(dn * half) * ph).re;
                (direct != 0.0 || coeffs.iter().any(|z| z.norm() != 0.0)).then_some(InterferenceEntry {
                    m_prime: mp,
                    dn,
                    coeffs,
                    direct,
                })
            })
        })
        .collect();
    Ok(InterferenceTable {
        subcarrier: m,
        alpha,
        len,
        entries,
    })
}
