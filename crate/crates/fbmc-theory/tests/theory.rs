#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use fbmc_channel::{draw_channel_with, freq_csi, load_pdp, PdpProfile};
use fbmc_core::{design_prototype, Error, FilterBank, OqamGrid, C};
use fbmc_stage1::{design_highrate, Criterion};
use fbmc_theory::{
    average_power, error_stats, interference_table, noise_power, sinr_from_parts, sir_upper_bound, tau,
    theoretical_sinr, ErrorStats,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C64 = C<f64>;

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

fn bank(m: usize, kappa: usize) -> FilterBank<f64> {
    FilterBank::new(design_prototype(kappa, m).unwrap())
}

fn profile(taps: &[f64]) -> PdpProfile {
    PdpProfile::from_taps("test", taps.to_vec()).unwrap()
}

fn tau_direct(q: &[f64], m: usize, a: usize, b: usize) -> C64 {
    q.iter()
        .enumerate()
        .map(|(l, &v)| cis(2.0 * PI * (a as f64 - b as f64) * l as f64 / m as f64) * v)
        .sum()
}

/// Channel-tap index ranges of the error at `l`, spelled out case by case.
fn taps_for(l: usize, m: usize, lh: usize) -> Option<(usize, usize)> {
    if l < lh - 1 {
        Some((0, l))
    } else if l < m {
        None
    } else {
        Some((l - (m - 1), lh - 1))
    }
}

/// Literal evaluation of the second-order statistics by direct summation over all subcarrier indices.
struct Literal {
    m: usize,
    n_rx: usize,
    c: f64,
    q_row: Vec<f64>,
    q_col: Vec<f64>,
    t_row: Vec<Vec<C64>>,
}

impl Literal {
    fn new(q_row: &[f64], q_col: &[f64], m: usize, n_rx: usize, alpha: usize) -> Self {
        let lh = q_row.len().max(q_col.len());
        let pad = |q: &[f64]| {
            let mut v = q.to_vec();
            v.resize(lh, 0.0);
            v
        };
        let (q_row, q_col) = (pad(q_row), pad(q_col));
        let t = |q: &[f64]| {
            (0..m)
                .map(|a| (0..m).map(|b| tau_direct(q, m, a, b)).collect())
                .collect()
        };
        Literal {
            m,
            n_rx,
            c: (alpha * m / 2) as f64,
            t_row: t(&q_row),
            q_row,
            q_col,
        }
    }

    fn e(&self, k: f64, x: f64) -> C64 {
        cis(2.0 * PI * k * x / self.m as f64)
    }

    fn o(&self, m: usize, mp: usize, l: usize, lp: usize) -> C64 {
        let t = &self.t_row;
        let mut acc = C64::new(0.0, 0.0);
        for m2 in 0..self.m {
            for m3 in 0..self.m {
                let num = t[m3][m2] - t[m3][mp] * t[mp][m2] - t[m3][m] * t[m][m2] + t[m3][mp] * t[mp][m] * t[m][m2];
                acc += num / t[mp][m] * self.e(m2 as f64, l as f64) * self.e(-(m3 as f64), lp as f64);
            }
        }
        acc / (self.m * self.m) as f64
    }

    fn o_check(&self, m: usize, mp: usize, l: usize, lp: usize) -> C64 {
        let t = &self.t_row;
        let mut acc = C64::new(0.0, 0.0);
        for m2 in 0..self.m {
            for m3 in 0..self.m {
                let num = (t[m][m3] - t[mp][m3] * t[m][mp]) * (t[mp][m2] - t[mp][m] * t[m][m2]);
                acc += num / t[m][mp].norm_sqr() * self.e(m2 as f64, l as f64) * self.e(m3 as f64, lp as f64);
            }
        }
        acc / (self.m * self.m) as f64
    }

    fn same_user(&self, l: usize, lp: usize, check: bool) -> C64 {
        let lh = self.q_row.len();
        let (Some((a0, a1)), Some((b0, b1))) = (taps_for(l, self.m, lh), taps_for(lp, self.m, lh)) else {
            return C64::new(0.0, 0.0);
        };
        let sign = if check { 1.0 } else { -1.0 };
        let mut acc = C64::new(0.0, 0.0);
        for k in a0..=a1 {
            for kp in b0..=b1 {
                for m in 0..self.m {
                    for mp in 0..self.m {
                        let o = if check {
                            self.o_check(m, mp, k, kp)
                        } else {
                            self.o(m, mp, k, kp)
                        };
                        acc += o
                            * self.e(m as f64, l as f64 - k as f64 - self.c)
                            * self.e(sign * mp as f64, lp as f64 - kp as f64 - self.c);
                    }
                }
            }
        }
        acc / ((self.m * self.m * self.n_rx) as f64)
    }

    fn cross_user(&self, l: usize, lp: usize) -> C64 {
        let lh = self.q_row.len();
        let m = self.m;
        let (Some(_), Some(_)) = (taps_for(l, m, lh), taps_for(lp, m, lh)) else {
            return C64::new(0.0, 0.0);
        };
        let (lmin, lmax) = (l.min(lp), l.max(lp));
        let range = if lmax < lh - 1 {
            Some((0, lmin))
        } else if lmin > m - 1 {
            Some((lmax - (m - 1), lh - 1))
        } else if lmax - lmin < m {
            Some((lmax - (m - 1), lmin))
        } else {
            None
        };
        let Some((k0, k1)) = range else {
            return C64::new(0.0, 0.0);
        };
        let mut acc = C64::new(0.0, 0.0);
        for k in k0..=k1 {
            for a in 0..m {
                for b in 0..m {
                    acc += self.q_col[k] / self.t_row[b][a]
                        * self.e(a as f64, l as f64 - k as f64 - self.c)
                        * self.e(-(b as f64), lp as f64 - k as f64 - self.c);
                }
            }
        }
        acc / ((m * m * self.n_rx) as f64)
    }
}

#[test]
fn tau_examples() {
    let flat = profile(&[1.0]);
    let t = tau(&flat, 8);
    for a in 0..8 {
        for b in 0..8 {
            assert_eq!(t[(a, b)], C64::new(1.0, 0.0));
        }
    }
    let eva = load_pdp("EVA", 7.68e6).unwrap();
    let m = 64;
    let t = tau(&eva, m);
    for a in 0..m {
        assert!((t[(a, a)] - 1.0).norm() < 1e-12);
        for b in 0..m {
            assert!((t[(a, b)] - tau_direct(eva.taps(), m, a, b)).norm() < 1e-12);
            assert!((t[(b, a)] - t[(a, b)].conj()).norm() < 1e-12);
        }
    }
}

#[test]
fn closed_forms_match_literal_sums() {
    let m = 8;
    let n_rx = 4;
    for (q, alpha) in [
        (vec![0.6, 0.3, 0.1], 1),
        (vec![0.4, 0.3, 0.2, 0.1], 0),
        (vec![0.5, 0.2, 0.2, 0.1], 2),
    ] {
        let p = vec![profile(&q)];
        let st = error_stats(&p, m, n_rx, alpha, (0, 0)).unwrap();
        let lit = Literal::new(&q, &q, m, n_rx, alpha);
        assert_eq!(st.len(), m + q.len() - 1);
        for l in 0..st.len() {
            for lp in 0..st.len() {
                let (e, ec) = (lit.same_user(l, lp, false), lit.same_user(l, lp, true));
                assert!(
                    (st.eps(l, lp) - e).norm() < 1e-12,
                    "eps q {q:?} ({l},{lp}): {} vs {e}",
                    st.eps(l, lp)
                );
                assert!(
                    (st.eps_check(l, lp) - ec).norm() < 1e-12,
                    "eps_check q {q:?} ({l},{lp})"
                );
            }
        }
    }
}

#[test]
fn cross_user_closed_forms_match_literal_sums() {
    let m = 8;
    let n_rx = 3;
    let (qu, qv) = (vec![0.7, 0.3], vec![0.6, 0.3, 0.1]);
    let p = vec![profile(&qu), profile(&qv)];
    for alpha in [0, 1] {
        let st = error_stats(&p, m, n_rx, alpha, (0, 1)).unwrap();
        let lit = Literal::new(&qu, &qv, m, n_rx, alpha);
        for l in 0..st.len() {
            for lp in 0..st.len() {
                let want = lit.cross_user(l, lp);
                assert!(
                    (st.eps(l, lp) - want).norm() < 1e-12,
                    "({l},{lp}) {} vs {want}",
                    st.eps(l, lp)
                );
                assert_eq!(st.eps_check(l, lp), C64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn case_one_range_is_error_free() {
    let p = vec![load_pdp("EVA", 7.68e6).unwrap(), load_pdp("PedA", 7.68e6).unwrap()];
    let m = 64;
    let lh = 28;
    for users in [(0, 0), (0, 1), (1, 0)] {
        let st = error_stats(&p, m, 8, 1, users).unwrap();
        assert_eq!(st.len(), m + lh - 1);
        for l in lh - 1..m {
            for lp in 0..st.len() {
                assert_eq!(st.eps(l, lp), C64::new(0.0, 0.0));
                assert_eq!(st.eps(lp, l), C64::new(0.0, 0.0));
                assert_eq!(st.eps_check(l, lp), C64::new(0.0, 0.0));
            }
        }
    }
}

fn dense(st: &ErrorStats) -> DMatrix<f64> {
    let n = 2 * st.len();
    DMatrix::from_row_slice(n, n, &st.psi_cov())
}

#[test]
fn covariance_structure() {
    let p = vec![load_pdp("EVA", 7.68e6).unwrap(), load_pdp("ETU", 7.68e6).unwrap()];
    let m = 64;
    for users in [(0, 0), (1, 1), (0, 1)] {
        let st = error_stats(&p, m, 8, 1, users).unwrap();
        for l in 0..st.len() {
            for lp in 0..st.len() {
                assert!((st.eps(l, lp) - st.eps(lp, l).conj()).norm() < 1e-15);
                assert!((st.eps_check(l, lp) - st.eps_check(lp, l)).norm() < 1e-15);
            }
        }
        let psi = dense(&st);
        let scale = psi.amax();
        assert!((&psi - psi.transpose()).amax() <= 1e-12 * scale);
    }
}

#[test]
fn doubling_antennas_halves_statistics() {
    let p = vec![load_pdp("EVA", 7.68e6).unwrap(), load_pdp("PedB", 7.68e6).unwrap()];
    for users in [(0, 0), (0, 1)] {
        let a = error_stats(&p, 64, 8, 1, users).unwrap();
        let b = error_stats(&p, 64, 16, 1, users).unwrap();
        assert_eq!(a.support(), b.support());
        assert!(!a.support().is_empty());
        for &(l, lp) in a.support() {
            for (x, y) in [(a.eps(l, lp), b.eps(l, lp)), (a.eps_check(l, lp), b.eps_check(l, lp))] {
                if x.norm() > 0.0 {
                    assert!(((y / x) - 0.5).norm() <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn statistic_magnitudes_at_large_scale() {
    let p = vec![load_pdp("EVA", 7.68e6).unwrap()];
    let st = error_stats(&p, 256, 16, 1, (0, 0)).unwrap();
    let psi = st.psi_cov();
    let peak = psi.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    println!("largest covariance entry {peak:.3e}");
    assert!((1e-8..=1e-5).contains(&peak), "{peak}");
}

#[test]
fn degenerate_profile_is_rejected() {
    let p = vec![profile(&[0.5, 0.0, 0.0, 0.0, 0.5])];
    let err = error_stats(&p, 8, 4, 1, (0, 0)).unwrap_err();
    assert!(matches!(err, Error::DegenerateProfile { offset: 1, .. }), "{err:?}");
    let fb = bank(8, 4);
    assert!(noise_power(&p[0], &fb, 4, 1, 1.0, 0).is_err());
    // channel longer than a symbol period
    assert!(error_stats(&[profile(&[0.1; 10])], 8, 4, 1, (0, 0)).is_err());
}

#[test]
fn interference_table_contract() {
    let m = 64;
    let fb = bank(m, 4);
    let len = m + 27;
    let t = interference_table(&fb, 20, 1, len).unwrap();
    let d = t.desired();
    assert!((d.direct - 1.0).abs() < 1e-12);
    assert_eq!(d.stacked().len(), 2 * len);
    assert_eq!(t.len(), len);
    for e in t.entries() {
        let resp = fb.transmux_response(20, e.m_prime);
        for (l, z) in e.coeffs.iter().enumerate() {
            let raw = resp.at((e.dn + 1) * (m as isize / 2) - l as isize);
            assert!((z.norm() - raw.norm()).abs() < 1e-15);
        }
        let dm = (e.m_prime as isize - 20)
            .rem_euclid(m as isize)
            .min((20 - e.m_prime as isize).rem_euclid(m as isize));
        if e.dn.abs() > 8 || dm > 1 {
            assert!(e.direct * e.direct < 1e-6, "m' {} dn {}: {}", e.m_prime, e.dn, e.direct);
        }
    }
}

#[test]
fn average_power_reductions_and_dense_form() {
    let m = 64;
    let fb = bank(m, 4);
    let p = vec![load_pdp("EVA", 7.68e6).unwrap(), load_pdp("PedA", 7.68e6).unwrap()];
    let st = error_stats(&p, m, 8, 1, (0, 0)).unwrap();
    let t = interference_table(&fb, 32, 1, st.len()).unwrap();
    let perfect = ErrorStats::perfect(&p[0], m, 28, 8, (0, 0));
    assert!((average_power(&perfect, t.desired(), 0.5) - 0.5).abs() < 1e-12);
    let psi = dense(&st);
    for e in t.entries() {
        assert!((average_power(&perfect, e, 0.5) - 0.5 * e.direct * e.direct).abs() < 1e-15);
        let f = nalgebra::DVector::from_vec(e.stacked());
        let quad = (f.transpose() * &psi * &f)[(0, 0)];
        let want = 0.5 * (quad + e.direct * e.direct);
        let got = average_power(&st, e, 0.5);
        assert!((got - want).abs() <= 1e-12 * (want.abs() + 1e-12), "{got} vs {want}");
    }
    let cross = error_stats(&p, m, 8, 1, (0, 1)).unwrap();
    let e = t.desired();
    let f = nalgebra::DVector::from_vec(e.stacked());
    let want = 0.5 * (f.transpose() * dense(&cross) * &f)[(0, 0)];
    assert!((average_power(&cross, e, 0.5) - want).abs() <= 1e-12 * want);
}

/// Literal noise power: five nested sums over filter and subcarrier indices.
fn noise_literal(q: &[f64], fb: &FilterBank<f64>, n_rx: usize, alpha: usize, sigma2: f64, m: usize) -> f64 {
    let big_m = fb.num_subcarriers();
    let f = fb.subcarrier_filter(m);
    let lf = f.len() as isize;
    let c = (alpha * big_m / 2) as f64;
    let fm = |i: isize| {
        if (0..lf).contains(&i) {
            f[i as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let t: Vec<Vec<C64>> = (0..big_m)
        .map(|a| (0..big_m).map(|b| tau_direct(q, big_m, a, b)).collect())
        .collect();
    let mut acc = C64::new(0.0, 0.0);
    for l in 1 - lf..big_m as isize {
        for k in 0..big_m as isize {
            for kp in 0..big_m as isize {
                let ff = fm(k - l) * fm(kp - l).conj();
                if ff.norm() == 0.0 {
                    continue;
                }
                for m1 in 0..big_m {
                    for m2 in 0..big_m {
                        acc += ff / t[m2][m1]
                            * cis(2.0 * PI * m1 as f64 * (k as f64 - c) / big_m as f64)
                            * cis(-2.0 * PI * m2 as f64 * (kp as f64 - c) / big_m as f64);
                    }
                }
            }
        }
    }
    sigma2 / (2.0 * (big_m * big_m * n_rx) as f64) * acc.re
}

#[test]
fn noise_power_examples() {
    let fb = bank(16, 4);
    let flat = profile(&[1.0]);
    assert_eq!(noise_power(&flat, &fb, 4, 1, 0.0, 3).unwrap(), 0.0);
    for q in [vec![1.0], vec![0.5, 0.3, 0.2], vec![0.3, 0.25, 0.2, 0.15, 0.1]] {
        let p = profile(&q);
        for (m, alpha) in [(3, 1), (0, 0), (15, 2)] {
            let got = noise_power(&p, &fb, 4, alpha, 0.7, m).unwrap();
            let want = noise_literal(p.taps(), &fb, 4, alpha, 0.7, m);
            assert!((got - want).abs() <= 1e-10 * want, "{q:?} m {m}: {got} vs {want}");
        }
    }
    // unit-energy prototype: the noise power is sigma^2 / (2 N_r)
    let got = noise_power(&flat, &fb, 4, 1, 0.7, 3).unwrap();
    assert!((got - 0.7 / 8.0).abs() < 1e-12);
}

/// Sample mean of the real-part noise power behind ZF equalization on subcarrier `sub`.
fn sampled_noise(q: &PdpProfile, fb: &FilterBank<f64>, n_rx: usize, alpha: usize, sub: usize, trials: usize) -> f64 {
    let m = fb.num_subcarriers();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = fb.analysis_filter(sub);
    let mut acc = 0.0;
    for _ in 0..trials {
        let h = draw_channel_with::<f64, _>(std::slice::from_ref(q), n_rx, &mut rng).unwrap();
        let eq = design_highrate(&freq_csi(&h, m), Criterion::ZeroForcing, alpha, m).unwrap();
        // unit-variance white noise per antenna through g^r and the analysis filter, real part
        for r in 0..n_rx {
            acc += 0.5 * fbmc_core::Seq::causal(eq.impulse(0, r).to_vec()).convolve(&a).energy();
        }
    }
    acc / trials as f64
}

#[test]
fn noise_power_matches_monte_carlo() {
    let fb = bank(32, 4);
    let q = load_pdp("PedA", 7.68e6).unwrap();
    for n_rx in [8, 32] {
        let mc = sampled_noise(&q, &fb, n_rx, 1, 7, 2000);
        let theory = noise_power(&q, &fb, n_rx, 1, 1.0, 7).unwrap();
        let finite = n_rx as f64 / (n_rx as f64 - 1.0);
        println!(
            "N_r {n_rx}: theory {theory:.5}, Monte Carlo {mc:.5}, ratio {:.4} (N_r/(N_r-1) = {finite:.4})",
            mc / theory
        );
        // the closed form carries E{1/|h|^2} ~ 1/N_r; the sample mean follows 1/(N_r - 1)
        assert!((mc / theory / finite - 1.0).abs() <= 0.03);
        if n_rx >= 32 {
            assert!((mc / theory - 1.0).abs() <= 0.1);
        }
    }
}

#[test]
fn sir_upper_bound_properties() {
    let fb = bank(64, 4);
    let bound = sir_upper_bound(&fb, 32).unwrap();
    println!("SIR upper bound, M=64, kappa=4: {bound:.3} dB");
    for m in [1, 10, 31, 50, 62] {
        assert!((sir_upper_bound(&fb, m).unwrap() - bound).abs() < 1e-9);
    }
    let k3 = sir_upper_bound(&bank(64, 3), 32).unwrap();
    assert!(bound > k3, "{bound} vs {k3}");

    // back-to-back loopback with random antipodal symbols
    let (m, n) = (64, 400);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = OqamGrid::from_fn(1, m, n, 0.5, |_, _, _| {
        if rng.random::<bool>() {
            0.5f64.sqrt()
        } else {
            -(0.5f64.sqrt())
        }
    });
    let est = fb
        .demodulate(&fb.modulate(&s).unwrap())
        .unwrap()
        .to_oqam(0, n, 0.5)
        .unwrap();
    let (mut sig, mut err) = (0.0, 0.0);
    for sub in 0..m {
        for k in 10..n - 10 {
            sig += s.get(0, sub, k).powi(2);
            err += (est.get(0, sub, k) - s.get(0, sub, k)).powi(2);
        }
    }
    let loopback = 10.0 * (sig / err).log10();
    assert!((loopback - bound).abs() <= 0.1, "{loopback} vs {bound}");

    // with a perfect equalizer and no noise the SINR reduces to the bound
    let p = load_pdp("EVA", 7.68e6).unwrap();
    let perfect = ErrorStats::perfect(&p, 64, p.len(), 8, (0, 0));
    let t = interference_table(&fb, 32, 1, perfect.len()).unwrap();
    let b = sinr_from_parts(&[perfect], &t, 0.5, 0.0);
    assert!((b.sinr_db() - bound).abs() < 1e-9);
}

#[test]
fn theoretical_sinr_trends() {
    let fb = bank(64, 4);
    let p = vec![load_pdp("EVA", 7.68e6).unwrap(), load_pdp("PedA", 7.68e6).unwrap()];
    let sigma2 = 0.05;
    let mut last = f64::NEG_INFINITY;
    for n_rx in [4, 8, 16, 32, 64] {
        let b = theoretical_sinr(&p, &fb, n_rx, 1, 32, 0, sigma2, 0.5).unwrap();
        for v in [b.signal, b.self_interference, b.inter_user, b.noise] {
            assert!(v >= 0.0 && v.is_finite());
        }
        assert!(b.sinr_db() >= last - 1e-12);
        last = b.sinr_db();
    }
    let big = |s2: f64| theoretical_sinr(&p, &fb, 8, 1, 32, 0, s2, 0.5).unwrap().sinr();
    let (a, b) = (big(1e6), big(1e7));
    assert!(a < 1e-4);
    assert!((a / b - 10.0).abs() < 1e-3);
}
