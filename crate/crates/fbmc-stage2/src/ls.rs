//! Least-squares fit of the low-rate equalizer after the first decimation step.

use fbmc_core::{left_pseudo_inverse, CMat, Error, FilterBank, Real, Result, C};

use crate::plan::DecimationPlan;

/// Precomputed LS solver for one subcarrier: the banded matrix built from
/// `(f_m^*[-l])_{down D1}` and its left pseudo-inverse.
#[derive(Clone, Debug)]
pub struct LsFitter<T> {
    subcarrier: usize,
    plan: DecimationPlan,
    len: usize,
    filter_len: usize,
    /// `f_m^*[-l]` for `l = -(L_f-1)..=0`, stored from the most negative index.
    analysis: Vec<C<T>>,
    matrix: CMat<T>,
    pinv: CMat<T>,
}

impl<T: Real> LsFitter<T> {
    pub fn new(fb: &FilterBank<T>, subcarrier: usize, plan: DecimationPlan, len: usize) -> Result<Self> {
        if plan.num_subcarriers() != fb.num_subcarriers() {
            return Err(Error::DimensionMismatch {
                what: "decimation plan M vs filter-bank M",
                left: plan.num_subcarriers(),
                right: fb.num_subcarriers(),
            });
        }
        if len == 0 {
            return Err(Error::invalid("L'_g", 0, ">= 1"));
        }
        let lf = fb.filter_len();
        let d1 = plan.d1();
        if !lf.is_multiple_of(d1) {
            return Err(Error::invalid("D1", d1, format!("a divisor of L_f = {lf}")));
        }
        let analysis = fb.analysis_filter(subcarrier);
        let dec = analysis.decimate(d1);
        debug_assert_eq!(dec.start, -((lf / d1) as isize - 1));
        let rows = lf / d1 + len - 1;
        let matrix = CMat::from_fn(rows, len, |i, j| {
            if i >= j && i - j < dec.data.len() {
                dec.data[i - j]
            } else {
                C::new(T::zero(), T::zero())
            }
        });
        let pinv = left_pseudo_inverse(&matrix)?;
        Ok(LsFitter {
            subcarrier,
            plan,
            len,
            filter_len: lf,
            analysis: analysis.data,
            matrix,
            pinv,
        })
    }

    pub fn subcarrier(&self) -> usize {
        self.subcarrier
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

    /// `L_f / D1 + L'_g - 1` rows by `L'_g` columns.
    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    /// First index of the decimated cascade, `-(L_f/D1 - 1)`.
    pub fn target_start(&self) -> isize {
        -((self.filter_len / self.plan.d1()) as isize - 1)
    }

    /// `(g * f_m^*[-l])_{down D1}` from [`Self::target_start`] to its last nonzero-support index.
    pub fn cascade(&self, g: &[C<T>]) -> Vec<C<T>> {
        let d1 = self.plan.d1() as isize;
        let lf = self.filter_len as isize;
        let lg = g.len() as isize;
        if lg == 0 {
            return Vec::new();
        }
        let last = (lg - 1).div_euclid(d1);
        (self.target_start()..=last)
            .map(|i| {
                let t = i * d1;
                let lo = t.max(0);
                let hi = (t + lf - 1).min(lg - 1);
                (lo..=hi).fold(C::new(T::zero(), T::zero()), |acc, j| {
                    // a[t - j] sits at offset (t - j) + L_f - 1
                    acc + g[j as usize] * self.analysis[(t - j + lf - 1) as usize]
                })
            })
            .collect()
    }

    /// Target vector: the first `L_f/D1 + L'_g - 1` cascade entries when `L'_g < L_g / D1`,
    /// otherwise the zero-padded cascade.
    pub fn target(&self, g: &[C<T>]) -> Vec<C<T>> {
        let rows = self.matrix.rows();
        let mut e = self.cascade(g);
        if self.len * self.plan.d1() < g.len() {
            e.truncate(rows);
        } else {
            debug_assert!(e.len() <= rows);
            e.resize(rows, C::new(T::zero(), T::zero()));
        }
        e
    }

    /// `g_bar = F_bar e_hat`.
    pub fn fit(&self, g: &[C<T>]) -> Vec<C<T>> {
        let e = self.target(g);
        self.pinv.matvec(&e).expect("target length matches the fitted system")
    }

    /// `||F g_bar - e_hat||^2`.
    pub fn residual(&self, g: &[C<T>], gbar: &[C<T>]) -> T {
        let e = self.target(g);
        let fg = self
            .matrix
            .matvec(gbar)
            .expect("coefficient length matches the fitted system");
        fg.iter().zip(&e).map(|(a, b)| (*a - *b).norm_sqr()).sum()
    }
}

/// One-shot LS fit of the low-rate equalizer for subcarrier `m`.
pub fn ls_fit<T: Real>(
    g: &[C<T>],
    fb: &FilterBank<T>,
    m: usize,
    plan: DecimationPlan,
    len: usize,
) -> Result<Vec<C<T>>> {
    Ok(LsFitter::new(fb, m, plan, len)?.fit(g))
}

/// Branches `G_l[n] = g_bar[D2 n + l]`, `l = 0..D2`.
pub fn polyphase_split<T: Real>(gbar: &[C<T>], d2: usize) -> Vec<Vec<C<T>>> {
    assert!(d2 > 0, "branch count must be positive");
    (0..d2).map(|l| fbmc_core::decimate(gbar, d2, l)).collect()
}

/// Inverse of [`polyphase_split`].
pub fn interleave<T: Real>(branches: &[Vec<C<T>>]) -> Vec<C<T>> {
    let d2 = branches.len();
    let total: usize = branches.iter().map(|b| b.len()).sum();
    (0..total).map(|i| branches[i % d2][i / d2]).collect()
}
