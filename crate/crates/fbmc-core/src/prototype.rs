//! PHYDYAS prototype filter.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real symmetric pulse `p[l]`, `l = 0..kappa*M-1`, with unit energy.
#[derive(Clone, Debug, PartialEq)]
pub struct PrototypeFilter<T> {
    coeffs: Vec<T>,
    num_subcarriers: usize,
    overlap: usize,
}

/// Frequency-domain sideband coefficients `H_1..H_{kappa-1}` (with `H_0 = 1`).
fn sideband_coefficients(kappa: usize) -> Option<&'static [f64]> {
    const K2: [f64; 1] = [std::f64::consts::FRAC_1_SQRT_2];
    const K3: [f64; 2] = [0.911_438, 0.411_438];
    const K4: [f64; 3] = [0.971_960, std::f64::consts::FRAC_1_SQRT_2, 0.235_147];
    match kappa {
        2 => Some(&K2),
        3 => Some(&K3),
        4 => Some(&K4),
        _ => None,
    }
}

/// Designs the PHYDYAS pulse for overlap `kappa` and `m` subcarriers.
pub fn design_prototype<T: Real>(kappa: usize, m: usize) -> Result<PrototypeFilter<T>> {
    let h = sideband_coefficients(kappa).ok_or_else(|| Error::invalid("kappa", kappa, "one of 2, 3, 4"))?;
    if m < 4 || !m.is_power_of_two() {
        return Err(Error::invalid("M", m, "a power of two >= 4"));
    }
    let len = kappa * m;
    let km = len as f64;
    let raw: Vec<f64> = (0..len)
        .map(|l| {
            let t = l as f64 + 0.5;
            1.0 + 2.0
                * h.iter()
                    .enumerate()
                    .map(|(i, &hk)| {
                        let k = (i + 1) as f64;
                        let sign = if (i + 1) % 2 == 1 { -1.0 } else { 1.0 };
                        sign * hk * (2.0 * std::f64::consts::PI * k * t / km).cos()
                    })
                    .sum::<f64>()
        })
        .collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    // Average mirrored pairs so symmetry is exact in floating point.
    let coeffs = (0..len)
        .map(|l| T::lit(0.5 * (raw[l] + raw[len - 1 - l]) / norm))
        .collect();
    Ok(PrototypeFilter {
        coeffs,
        num_subcarriers: m,
        overlap: kappa,
    })
}

impl<T: Real> PrototypeFilter<T> {
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    /// `L_f = kappa * M`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Autocorrelation `(p * p[-.])[k]` for `k = -(L_f-1)..=L_f-1`, index `k + L_f - 1`.
    pub fn autocorrelation(&self) -> Vec<T> {
        let n = self.coeffs.len();
        (0..2 * n - 1)
            .map(|idx| {
                let k = idx as isize - (n as isize - 1);
                (0..n as isize)
                    .filter_map(|t| {
                        let u = t + k;
                        (u >= 0 && u < n as isize).then(|| self.coeffs[u as usize] * self.coeffs[t as usize])
                    })
                    .sum()
            })
            .collect()
    }

    /// Largest peak-normalized autocorrelation magnitude at nonzero multiples of `M`.
    pub fn nyquist_residual(&self) -> T {
        let r = self.autocorrelation();
        let n = self.coeffs.len() as isize;
        let m = self.num_subcarriers as isize;
        let peak = r[(n - 1) as usize];
        let mut worst = T::zero();
        let mut k = m;
        while k < n {
            worst = worst.max((r[(n - 1 + k) as usize] / peak).abs());
            worst = worst.max((r[(n - 1 - k) as usize] / peak).abs());
            k += m;
        }
        worst
    }

    /// Converts the coefficients to another scalar type.
    pub fn cast<U: Real>(&self) -> PrototypeFilter<U> {
        PrototypeFilter {
            coeffs: self.coeffs.iter().map(|&v| U::lit(v.as_f64())).collect(),
            num_subcarriers: self.num_subcarriers,
            overlap: self.overlap,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_and_energy() {
        let p = design_prototype::<f64>(4, 8).unwrap();
        assert_eq!(p.len(), 32);
        let e: f64 = p.coeffs().iter().map(|v| v * v).sum();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_symmetry() {
        let p = design_prototype::<f64>(4, 64).unwrap();
        let c = p.coeffs();
        for l in 0..c.len() {
            assert_eq!(c[l], c[c.len() - 1 - l]);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let e = design_prototype::<f64>(5, 64).unwrap_err();
        assert!(e.to_string().contains("kappa"));
        assert!(design_prototype::<f64>(4, 48).is_err());
        assert!(design_prototype::<f64>(4, 2).is_err());
    }

    #[test]
    fn f32_variant_matches_f64() {
        let a = design_prototype::<f64>(4, 16).unwrap();
        let b = design_prototype::<f32>(4, 16).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - *y as f64).abs() < 1e-6);
        }
    }
}
