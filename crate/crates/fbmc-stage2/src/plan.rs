use fbmc_core::{Error, Result};

/// Two-step decimation factors: `D1 = M / 2^eta` at the filter bank, then `D2` with `D1 D2 = M / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DecimationPlan {
    d1: usize,
    d2: usize,
    num_subcarriers: usize,
}

impl DecimationPlan {
    /// Plan with first-step factor `d1`; `M` must be a power of two and `d1` a power of two in `1..=M/2`.
    pub fn new(num_subcarriers: usize, d1: usize) -> Result<Self> {
        let m = num_subcarriers;
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::invalid("M", m, "a power of two >= 2"));
        }
        if d1 == 0 || !d1.is_power_of_two() || d1 > m / 2 {
            return Err(Error::invalid(
                "D1",
                d1,
                format!("M/2^eta with 1 <= eta <= log2 M, i.e. a power of two in 1..={}", m / 2),
            ));
        }
        Ok(DecimationPlan {
            d1,
            d2: m / 2 / d1,
            num_subcarriers: m,
        })
    }

    /// `D1 = M / 2^eta`.
    pub fn with_eta(num_subcarriers: usize, eta: u32) -> Result<Self> {
        let m = num_subcarriers;
        if eta == 0 || m.checked_shr(eta).unwrap_or(0) == 0 {
            return Err(Error::invalid("eta", eta, format!("1..=log2 M for M = {m}")));
        }
        Self::new(m, m >> eta)
    }

    /// Default `D1 = M/4, D2 = 2`.
    pub fn default_for(num_subcarriers: usize) -> Result<Self> {
        Self::new(num_subcarriers, num_subcarriers / 4)
    }

    /// One-step decimation `D1 = M/2, D2 = 1`.
    pub fn one_step(num_subcarriers: usize) -> Result<Self> {
        Self::new(num_subcarriers, num_subcarriers / 2)
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors() {
        let p = DecimationPlan::default_for(64).unwrap();
        assert_eq!((p.d1(), p.d2()), (16, 2));
        assert_eq!(DecimationPlan::with_eta(64, 3).unwrap().d2(), 4);
        assert_eq!(DecimationPlan::one_step(64).unwrap().d2(), 1);
        assert_eq!(DecimationPlan::with_eta(64, 6).unwrap().d1(), 1);
        assert!(DecimationPlan::new(64, 24).is_err());
        assert!(DecimationPlan::new(64, 64).is_err());
        assert!(DecimationPlan::with_eta(64, 0).is_err());
        assert!(DecimationPlan::with_eta(64, 7).is_err());
    }
}
