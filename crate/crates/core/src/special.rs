//! Special functions: log-Gamma/Beta (backed by statrs), Stirling and
//! Bernoulli numbers, integer zeta values, Eulerian polynomials and integer
//! order polylogarithms on (0, 1).

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln B(a, b)` for `a, b > 0`; `None` otherwise.
pub fn ln_beta(a: f64, b: f64) -> Option<f64> {
    statrs::function::beta::checked_ln_beta(a, b).ok()
}

/// `ln n!` exactly summed for small n, Lanczos beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 32 {
        (2..=n).map(|i| (i as f64).ln()).sum()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Signed Stirling numbers of the first kind `s(n, k)`, rows `0..=nmax`.
pub fn stirling1_table(nmax: usize) -> Vec<Vec<i128>> {
    let mut s = vec![vec![0i128; nmax + 1]; nmax + 1];
    s[0][0] = 1;
    for n in 0..nmax {
        for k in 1..=n + 1 {
            s[n + 1][k] = s[n][k - 1] - n as i128 * s[n][k];
        }
    }
    s
}

fn bernoulli_table() -> &'static Vec<BigRational> {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Akiyama-Tanigawa; gives B_1 = +1/2, we only use even indices and B_0
        let nmax = 64;
        let mut out = Vec::with_capacity(nmax + 1);
        let mut a: Vec<BigRational> = Vec::new();
        for m in 0..=nmax {
            a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
            for j in (1..=m).rev() {
                let d = &a[j - 1] - &a[j];
                a[j - 1] = d * BigRational::from_integer(BigInt::from(j));
            }
            out.push(a[0].clone());
        }
        out
    })
}

/// Bernoulli number `B_n` with the convention `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> f64 {
    static F64: OnceLock<Vec<f64>> = OnceLock::new();
    if n == 1 {
        return -0.5;
    }
    F64.get_or_init(|| {
        bernoulli_table()
            .iter()
            .map(|b| b.to_f64().unwrap_or(f64::NAN))
            .collect()
    })[n]
}

/// Exact Bernoulli number (`B_1 = -1/2`).
pub fn bernoulli_exact(n: usize) -> BigRational {
    if n == 1 {
        return BigRational::new(BigInt::from(-1), BigInt::from(2));
    }
    bernoulli_table()[n].clone()
}

/// Riemann zeta at an integer argument other than 1.
pub fn zeta_int(s: i64) -> f64 {
    if s == 1 {
        return f64::INFINITY;
    }
    if s == 0 {
        return -0.5;
    }
    if s < 0 {
        let n = (-s) as usize;
        return -bernoulli(n + 1) / (n as f64 + 1.0);
    }
    // Euler-Maclaurin with N = 12
    let sf = s as f64;
    let n = 12usize;
    let mut acc = 0.0;
    for k in (1..n).rev() {
        acc += (k as f64).powf(-sf);
    }
    let nf = n as f64;
    acc += nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powf(-sf);
    let mut rising = sf; // s (s+1) ... (s + 2k - 2)
    let mut fact = 2.0; // (2k)!
    for k in 1..=10usize {
        let term = bernoulli(2 * k) / fact * rising * nf.powf(-sf - 2.0 * k as f64 + 1.0);
        acc += term;
        rising *= (sf + 2.0 * k as f64 - 1.0) * (sf + 2.0 * k as f64);
        fact *= (2 * k + 1) as f64 * (2 * k + 2) as f64;
    }
    acc
}

/// Coefficients (ascending) of `q_k(t) = (1 - t)^{k+1} sum_{m>=0} m^k t^m`.
pub fn eulerian_coeffs(k: usize) -> Vec<BigInt> {
    // q_{k+1} = t [ (1 - t) q_k' + (k + 1) q_k ]
    let mut q = vec![BigInt::one()];
    for j in 0..k {
        let deg = q.len() - 1;
        let mut next = vec![BigInt::zero(); deg + 2];
        // (1 - t) q' + (j + 1) q, then shift by t
        for i in 0..=deg {
            let qi = &q[i];
            // (j+1) q_i t^i
            next[i + 1] += qi * BigInt::from(j + 1);
            if i >= 1 {
                // q' contributes i q_i t^{i-1}, minus t * i q_i t^{i-1}
                next[i] += qi * BigInt::from(i);
                next[i + 1] -= qi * BigInt::from(i);
            }
        }
        while next.len() > 1 && next.last().is_some_and(|c| c.is_zero()) {
            next.pop();
        }
        q = next;
    }
    q
}

pub fn eulerian_f64(k: usize) -> Vec<f64> {
    eulerian_coeffs(k)
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect()
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// `Li_s(t) = sum_{m>=1} t^m / m^s` for integer `s` and `0 < t < 1`.
pub fn polylog(s: i64, t: f64) -> f64 {
    debug_assert!(t > 0.0 && t < 1.0);
    if s <= 0 {
        let n = (-s) as usize;
        if n == 0 {
            return t / (1.0 - t);
        }
        return horner(&eulerian_f64(n), t) / (1.0 - t).powi(n as i32 + 1);
    }
    if s == 1 {
        return -(-t).ln_1p();
    }
    if t <= 0.5 {
        let mut acc = 0.0;
        let mut p = t;
        for m in 1..400 {
            let term = p / (m as f64).powi(s as i32);
            acc += term;
            if term < 1e-18 * acc {
                break;
            }
            p *= t;
        }
        return acc;
    }
    // expansion in mu = ln t around the singular point t = 1
    let mu = t.ln();
    let sm1 = (s - 1) as usize;
    let harmonic: f64 = (1..=sm1).map(|k| 1.0 / k as f64).sum();
    let mut acc = 0.0;
    let mut pw = 1.0; // mu^k / k!
    for k in 0..60usize {
        if k == sm1 {
            acc += pw * (harmonic - (-mu).ln());
        } else {
            acc += zeta_int(s - k as i64) * pw;
        }
        pw *= mu / (k as f64 + 1.0);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brute(s: i64, t: f64) -> f64 {
        (1..200000)
            .map(|m| t.powi(m) * (m as f64).powf(-(s as f64)))
            .sum()
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(zeta_int(2), pi * pi / 6.0, max_relative = 1e-15);
        assert_relative_eq!(zeta_int(4), pi.powi(4) / 90.0, max_relative = 1e-15);
        assert_relative_eq!(zeta_int(3), 1.2020569031595942, max_relative = 1e-15);
        assert_relative_eq!(zeta_int(-1), -1.0 / 12.0, max_relative = 1e-15);
        assert_eq!(zeta_int(-2), 0.0);
        assert_relative_eq!(zeta_int(-3), 1.0 / 120.0, max_relative = 1e-14);
    }

    #[test]
    fn bernoulli_small() {
        assert_relative_eq!(bernoulli(2), 1.0 / 6.0);
        assert_relative_eq!(bernoulli(4), -1.0 / 30.0);
        assert_relative_eq!(bernoulli(12), -691.0 / 2730.0, max_relative = 1e-15);
        assert_eq!(bernoulli(7), 0.0);
    }

    #[test]
    fn stirling_rows() {
        let s = stirling1_table(5);
        // s(4, k) = 0, -6, 11, -6, 1
        assert_eq!(s[4][..5], [0, -6, 11, -6, 1]);
        assert_eq!(s[5][1], 24);
    }

    #[test]
    fn eulerian_known_rows() {
        let to_i = |v: Vec<BigInt>| v.iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(eulerian_coeffs(0)), vec![1]);
        assert_eq!(to_i(eulerian_coeffs(2)), vec![0, 1, 1]);
        assert_eq!(to_i(eulerian_coeffs(3)), vec![0, 1, 4, 1]);
        assert_eq!(to_i(eulerian_coeffs(4)), vec![0, 1, 11, 11, 1]);
    }

    #[test]
    fn polylog_against_series() {
        for s in [-3i64, -1, 0, 1, 2, 3, 5] {
            for t in [0.1, 0.45, 0.7, 0.93] {
                assert_relative_eq!(polylog(s, t), brute(s, t), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn dilog_special_value() {
        // Li_2(1/2) = pi^2/12 - ln^2(2)/2, and close to 1 the mu-expansion
        let pi = std::f64::consts::PI;
        let want = pi * pi / 12.0 - 2f64.ln().powi(2) / 2.0;
        assert_relative_eq!(polylog(2, 0.5), want, max_relative = 1e-15);
        let t = 1.0 - 1e-9;
        assert!((polylog(2, t) - pi * pi / 6.0).abs() < 1e-7);
    }

    #[test]
    fn ln_beta_matches_gamma_identity() {
        assert_relative_eq!(ln_beta(2.0, 2.0).unwrap(), (1.0f64 / 6.0).ln(), max_relative = 1e-14);
        assert!(ln_beta(0.0, 1.0).is_none());
        assert_relative_eq!(ln_factorial(10), 3628800f64.ln(), max_relative = 1e-15);
    }
}
