//! Small numerical kernels shared by the density and counting modules.

use statrs::function::gamma;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Neumaier-compensated accumulator.
///
/// Merging two accumulators is deterministic, so parallel reductions that
/// combine partial sums in a fixed order give bit-identical totals.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

pub fn ln_gamma(t: f64) -> f64 {
    // exact zeros; the Lanczos approximation leaves a few ulps here
    if t == 1.0 || t == 2.0 {
        return 0.0;
    }
    gamma::ln_gamma(t)
}

/// `log phi(t)` with `phi(t) = Gamma(t) t^{-t} e^t`.
pub fn ln_phi(t: f64) -> f64 {
    ln_gamma(t) - t * t.ln() + t
}

/// Exponential integral `E1(z) = int_z^inf e^{-u}/u du` for `z > 0`.
pub fn exp_integral_e1(z: f64) -> f64 {
    assert!(z > 0.0, "E1 requires a positive argument");
    const EPS: f64 = 1e-17;
    if z <= 1.0 {
        let mut term = 1.0;
        let mut series = 0.0;
        for k in 1..200 {
            term *= -z / k as f64;
            let add = -term / k as f64;
            series += add;
            if add.abs() < EPS * series.abs().max(1e-300) {
                break;
            }
        }
        -z.ln() - EULER_GAMMA + series
    } else {
        // Modified Lentz evaluation of the continued fraction.
        const TINY: f64 = 1e-300;
        let mut b = z + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        h * (-z).exp()
    }
}

/// Riemann zeta on the real axis, `s > 1`, via Euler-Maclaurin.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta requires s > 1");
    const N: usize = 16;
    // B_{2k} / (2k)!
    const COEFFS: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
    ];
    let mut acc = CompensatedSum::new();
    for n in 1..N {
        acc.add((n as f64).powf(-s));
    }
    let nf = N as f64;
    acc.add(nf.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * nf.powf(-s));
    // rising factorial s(s+1)...(s+2k-2) times N^{-s-2k+1}
    let mut rising = s;
    let mut power = nf.powf(-s - 1.0);
    for (k, c) in COEFFS.iter().enumerate() {
        acc.add(c * rising * power);
        let j = 2 * k as u32 + 1;
        rising *= (s + j as f64) * (s + j as f64 + 1.0);
        power /= nf * nf;
    }
    acc.value()
}

/// Riemann's prime-counting approximation `R(x)` through the Gram series.
pub fn riemann_r(x: f64) -> f64 {
    assert!(x >= 1.0);
    let lx = x.ln();
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    let mut term = 1.0;
    for k in 1..2000usize {
        let kf = k as f64;
        term *= lx / kf;
        let add = term / (kf * zeta(kf + 1.0));
        acc.add(add);
        if kf > lx && add < 1e-17 * acc.value() {
            break;
        }
    }
    acc.value()
}

/// Moebius function for small arguments.
pub fn mobius(mut n: u64) -> i32 {
    assert!(n >= 1);
    let mut sign = 1;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// `log(log(x))`, written out for readability at call sites.
pub fn log2(log_x: f64) -> f64 {
    log_x.ln()
}

/// `log(log(log(x)))`.
pub fn log3(log_x: f64) -> f64 {
    log_x.ln().ln()
}

/// `L_nu(x) = log(log x / (nu log(nu + 1)))`.
pub fn big_l(nu: u32, log_x: f64) -> f64 {
    let nu = nu as f64;
    (log_x / (nu * (nu + 1.0).ln())).ln()
}

/// `script L_a(x) = log x / (log_2 x)^a`.
pub fn script_l(a: f64, log_x: f64) -> f64 {
    log_x / log2(log_x).powf(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn e1_reference_values() {
        // Abramowitz & Stegun table 5.1
        assert_relative_eq!(exp_integral_e1(0.5), 0.559_773_594_776_160_8, max_relative = 1e-14);
        assert_relative_eq!(exp_integral_e1(1.0), 0.219_383_934_395_520_3, max_relative = 1e-14);
        assert_relative_eq!(exp_integral_e1(2.0), 0.048_900_510_708_061_12, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_e1(10.0), 4.156_968_929_685_324e-6, max_relative = 1e-12);
        assert_relative_eq!(exp_integral_e1(1e-3), 6.331_539_364_136_149, max_relative = 1e-14);
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(zeta(2.0), pi * pi / 6.0, max_relative = 1e-15);
        assert_relative_eq!(zeta(4.0), pi.powi(4) / 90.0, max_relative = 1e-15);
        assert_relative_eq!(zeta(1.5), 2.612_375_348_685_488, max_relative = 1e-14);
        assert_relative_eq!(zeta(1.01), 100.577_943_338_497, max_relative = 1e-12);
    }

    #[test]
    fn riemann_r_tracks_prime_counts() {
        // pi(10^6) = 78498 and R(10^6) = 78527.39...
        assert!((riemann_r(1e6) - 78_527.399_4).abs() < 1e-2);
        assert!((riemann_r(1e9) - 50_847_455.42).abs() < 1.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn mobius_small() {
        let mu: Vec<i32> = (1..=10).map(mobius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }
}
