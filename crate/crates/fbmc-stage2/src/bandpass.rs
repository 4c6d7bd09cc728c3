//! Reference constructions of the subcarrier-band equalizer: windowed-sinc band-pass,
//! DFT-grid ideal band-pass and DFT-grid periodization.

use fbmc_core::{cis, Dft, Error, Real, Result, Seq, C};

/// Default windowed-sinc length `16 M + 1`.
pub fn default_bp_len(num_subcarriers: usize) -> usize {
    16 * num_subcarriers + 1
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// `(2/M) sinc(2l/M) e^{j 2 pi m l / M}` on `|l| <= (bp_len-1)/2`, Hann-tapered.
pub fn bandpass_kernel<T: Real>(m: usize, num_subcarriers: usize, bp_len: usize) -> Result<Seq<T>> {
    if bp_len.is_multiple_of(2) {
        return Err(Error::invalid("bp_len", bp_len, "an odd length"));
    }
    let big_m = num_subcarriers as i64;
    let half = (bp_len / 2) as i64;
    let taps = (-half..=half)
        .map(|l| {
            let w = 0.5 * (1.0 + (std::f64::consts::PI * l as f64 / (half + 1) as f64).cos());
            let amp = 2.0 / big_m as f64 * sinc(2.0 * l as f64 / big_m as f64) * w;
            let r = (m as i64 * l).rem_euclid(big_m);
            cis::<T>(2.0 * std::f64::consts::PI * r as f64 / big_m as f64) * T::lit(amp)
        })
        .collect();
    Ok(Seq::new(-half as isize, taps))
}

/// Band-pass projection of `g` onto `[2 pi (m-1)/M, 2 pi (m+1)/M)` with a truncated windowed sinc.
pub fn method1_bandpass<T: Real>(g: &Seq<T>, m: usize, num_subcarriers: usize, bp_len: usize) -> Result<Seq<T>> {
    Ok(g.convolve(&bandpass_kernel(m, num_subcarriers, bp_len)?))
}

/// Low-rate equalizer `(M/2) (g_check)_{down M/2}` from a Method-1 band-passed sequence.
pub fn method1_lowrate<T: Real>(g: &Seq<T>, m: usize, num_subcarriers: usize, bp_len: usize) -> Result<Seq<T>> {
    let d = num_subcarriers / 2;
    let bp = method1_bandpass(g, m, num_subcarriers, bp_len)?.decimate(d);
    Ok(scale(bp, T::from_usize_lossy(d)))
}

fn scale<T: Real>(s: Seq<T>, k: T) -> Seq<T> {
    let start = s.start;
    Seq::new(start, s.data.into_iter().map(|z| z * k).collect())
}

/// DFT size for the grid constructions: a multiple of `2M`, at least `4M`, holding `g` in `[-K/2, K/2)`.
pub fn grid_size<T: Real>(g: &Seq<T>, num_subcarriers: usize) -> usize {
    let reach = g.start.unsigned_abs().max(g.end().unsigned_abs());
    let need = (2 * reach + 2).max(4 * num_subcarriers);
    need.div_ceil(2 * num_subcarriers) * 2 * num_subcarriers
}

/// `K`-point DFT of `g` with absolute time indices taken modulo `K`.
fn grid_spectrum<T: Real>(g: &Seq<T>, n_fft: usize, dft: &Dft<T>) -> Result<Vec<C<T>>> {
    let half = (n_fft / 2) as isize;
    if g.start < -half || g.end() > half {
        return Err(Error::invalid(
            "n_fft",
            n_fft,
            format!("large enough to hold indices {}..{}", g.start, g.end()),
        ));
    }
    let mut buf = vec![C::new(T::zero(), T::zero()); n_fft];
    for (i, &v) in g.data.iter().enumerate() {
        let t = (g.start + i as isize).rem_euclid(n_fft as isize) as usize;
        buf[t] = v;
    }
    dft.forward_in_place(&mut buf);
    Ok(buf)
}

/// Inverse of [`grid_spectrum`], returned on `-K/2..K/2`.
fn grid_sequence<T: Real>(mut spec: Vec<C<T>>, dft: &Dft<T>) -> Seq<T> {
    let n = spec.len();
    dft.inverse_unnormalized_in_place(&mut spec);
    let inv = T::one() / T::from_usize_lossy(n);
    let half = n / 2;
    let data = (0..n).map(|i| spec[(i + n - half) % n] * inv).collect();
    Seq::new(-(half as isize), data)
}

/// Ideal band-pass on the `K`-point grid with pass band `[pi (m-1)/d, pi (m+1)/d)`;
/// `K` must be a multiple of `2d`. With `d = M/2` this is the subcarrier band.
pub fn bandpass_ideal<T: Real>(g: &Seq<T>, m: usize, d: usize, n_fft: usize) -> Result<Seq<T>> {
    if d == 0 || !n_fft.is_multiple_of(2 * d) {
        return Err(Error::invalid("n_fft", n_fft, format!("a multiple of 2d = {}", 2 * d)));
    }
    let dft = Dft::new(n_fft);
    let mut spec = grid_spectrum(g, n_fft, &dft)?;
    let lo = (n_fft / (2 * d)) as isize * (m as isize - 1);
    let width = (n_fft / d) as isize;
    for (k, z) in spec.iter_mut().enumerate() {
        if (k as isize - lo).rem_euclid(n_fft as isize) >= width {
            *z = C::new(T::zero(), T::zero());
        }
    }
    Ok(grid_sequence(spec, &dft))
}

/// Replicates the response of `g` on `[2 pi (m-1)/M, 2 pi (m+1)/M)` with period `4 pi / M`
/// on a `K`-point grid.
pub fn method2_periodize_with<T: Real>(g: &Seq<T>, m: usize, num_subcarriers: usize, n_fft: usize) -> Result<Seq<T>> {
    if !n_fft.is_multiple_of(num_subcarriers) {
        return Err(Error::invalid(
            "n_fft",
            n_fft,
            format!("a multiple of M = {num_subcarriers}"),
        ));
    }
    let dft = Dft::new(n_fft);
    let spec = grid_spectrum(g, n_fft, &dft)?;
    let k_len = n_fft as isize;
    let period = 2 * k_len / num_subcarriers as isize;
    let lo = k_len / num_subcarriers as isize * (m as isize - 1);
    let out = (0..k_len)
        .map(|k| {
            let rep = lo + (k - lo).rem_euclid(period);
            spec[rep.rem_euclid(k_len) as usize]
        })
        .collect();
    Ok(grid_sequence(out, &dft))
}

/// [`method2_periodize_with`] on the grid chosen by [`grid_size`].
pub fn method2_periodize<T: Real>(g: &Seq<T>, m: usize, num_subcarriers: usize) -> Result<Seq<T>> {
    method2_periodize_with(g, m, num_subcarriers, grid_size(g, num_subcarriers))
}

/// Low-rate equalizer `(g_check)_{down M/2}` from the periodized sequence.
pub fn method2_lowrate<T: Real>(g: &Seq<T>, m: usize, num_subcarriers: usize) -> Result<Seq<T>> {
    Ok(method2_periodize(g, m, num_subcarriers)?.decimate(num_subcarriers / 2))
}
