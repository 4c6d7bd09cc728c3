//! Sequence primitives: convolution, decimation, DTFT and DFT helpers.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::scalar::{cis, czero, Real, C};

/// Direct linear convolution, output length `a.len() + b.len() - 1`.
pub fn convolve<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![czero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == czero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// Keeps `x[phase + k D]` for `k = 0, 1, ...`.
pub fn decimate<T: Copy>(x: &[T], factor: usize, phase: usize) -> Vec<T> {
    assert!(factor > 0, "decimation factor must be positive");
    x.iter().skip(phase).step_by(factor).copied().collect()
}

/// Inserts `factor - 1` zeros between samples.
pub fn upsample<T: Real>(x: &[C<T>], factor: usize) -> Vec<C<T>> {
    assert!(factor > 0, "upsampling factor must be positive");
    if x.is_empty() {
        return Vec::new();
    }
    let mut out = vec![czero(); (x.len() - 1) * factor + 1];
    for (i, &v) in x.iter().enumerate() {
        out[i * factor] = v;
    }
    out
}

/// DTFT `sum_l x[l] e^{-j omega (l + start)}` of a sequence whose first sample sits at `start`.
pub fn dtft<T: Real>(x: &[C<T>], start: isize, omega: f64) -> C<T> {
    x.iter().enumerate().fold(czero(), |acc, (i, &v)| {
        acc + v * cis::<T>(-omega * (i as isize + start) as f64)
    })
}

pub fn energy<T: Real>(x: &[C<T>]) -> T {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Finite sequence with an explicit (possibly negative) time origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Seq<T> {
    /// Index of `data[0]`.
    pub start: isize,
    pub data: Vec<C<T>>,
}

impl<T: Real> Seq<T> {
    pub fn new(start: isize, data: Vec<C<T>>) -> Self {
        Seq { start, data }
    }

    pub fn causal(data: Vec<C<T>>) -> Self {
        Seq { start: 0, data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// One past the last index.
    pub fn end(&self) -> isize {
        self.start + self.data.len() as isize
    }

    /// Sample at absolute index `i`, zero outside the support.
    pub fn at(&self, i: isize) -> C<T> {
        let k = i - self.start;
        if k < 0 || k >= self.data.len() as isize {
            czero()
        } else {
            self.data[k as usize]
        }
    }

    pub fn convolve(&self, other: &Seq<T>) -> Seq<T> {
        Seq::new(self.start + other.start, convolve(&self.data, &other.data))
    }

    /// Time reversal `x[-l]`.
    pub fn reversed(&self) -> Seq<T> {
        let mut data = self.data.clone();
        data.reverse();
        Seq::new(-(self.end() - 1), data)
    }

    pub fn conj(&self) -> Seq<T> {
        Seq::new(self.start, self.data.iter().map(|z| z.conj()).collect())
    }

    /// `y[k] = x[k D]`, keeping every sample whose absolute index is a multiple of `D`.
    pub fn decimate(&self, factor: usize) -> Seq<T> {
        let d = factor as isize;
        let first = self.start.div_euclid(d) + if self.start.rem_euclid(d) == 0 { 0 } else { 1 };
        let last = (self.end() - 1).div_euclid(d);
        if self.data.is_empty() || last < first {
            return Seq::new(first, Vec::new());
        }
        let data = (first..=last).map(|k| self.at(k * d)).collect();
        Seq::new(first, data)
    }

    /// Inserts zeros so that `y[k D] = x[k]`.
    pub fn upsample(&self, factor: usize) -> Seq<T> {
        Seq::new(self.start * factor as isize, upsample(&self.data, factor))
    }

    pub fn dtft(&self, omega: f64) -> C<T> {
        dtft(&self.data, self.start, omega)
    }

    pub fn energy(&self) -> T {
        energy(&self.data)
    }
}

/// Forward/inverse DFT pair of a fixed size.
#[derive(Clone)]
pub struct Dft<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Dft<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Dft {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X[k] = sum_l x[l] e^{-j 2 pi k l / N}` in place.
    pub fn forward_in_place(&self, x: &mut [C<T>]) {
        assert_eq!(x.len(), self.n);
        self.forward.process(x);
    }

    /// `x[l] = sum_k X[k] e^{+j 2 pi k l / N}` in place (unnormalized).
    pub fn inverse_unnormalized_in_place(&self, x: &mut [C<T>]) {
        assert_eq!(x.len(), self.n);
        self.inverse.process(x);
    }

    pub fn forward(&self, x: &[C<T>]) -> Vec<C<T>> {
        let mut y = x.to_vec();
        self.forward_in_place(&mut y);
        y
    }

    /// Normalized inverse `(1/N) sum_k X[k] e^{+j 2 pi k l / N}`.
    pub fn inverse(&self, x: &[C<T>]) -> Vec<C<T>> {
        let mut y = x.to_vec();
        self.inverse_unnormalized_in_place(&mut y);
        let s = T::one() / T::from_usize_lossy(self.n);
        y.iter_mut().for_each(|z| *z = *z * s);
        y
    }
}

impl<T: Real> std::fmt::Debug for Dft<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}
