//! Summatory statistics and main terms at desk scale: the small/large
//! divisor-set sums, the theta-window double sum with its closed form, a
//! per-modulus discrepancy scan, and the Brun-Titchmarsh / smooth-number
//! sanity properties.

use crate::arith::{
    euler_phi, for_each_prime, is_prime, isqrt, phi_square, sieve_primes,
    zeta_constants,
};
use crate::error::{Error, Result};
use crate::split::{count_pd, d_window, deta_member, SieveConfig};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct MainTermReport {
    pub x: u64,
    pub theta: f64,
    pub sum_value: f64,
    pub closed_form: f64,
    pub ratio: f64,
    pub empty_window: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRow {
    pub d: u64,
    pub observed: u64,
    pub expected: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// All d with X^theta < d^2 <= 2 X^theta.
    AllWindow,
    /// Structured moduli d = rq around D = X^alpha (permille to keep Eq).
    Deta { alpha_permille: u32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyScan {
    pub x: u64,
    pub rows: Vec<DiscrepancyRow>,
    pub median_abs_relative_error: f64,
    pub frac_above_half: f64,
    pub frac_above_one: f64,
    pub family_empty: bool,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.5..0.6).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [1/2, 3/5)")));
    }
    Ok(())
}

/// Inner sum over traces a = 2 (mod d), a^2 < 8X of (2X - a^2/4), collapsed
/// to exact power sums over k in a = 2 + kd. Returns the exact rational
/// value as f64 (numerator fits i128 at desk scale).
pub fn inner_sum_collapsed(x: u64, d: u64) -> f64 {
    let d = d as i128;
    let x = x as i128;
    if 8 * x <= 4 {
        return 0.0;
    }
    let w = isqrt((8 * x - 1) as u64) as i128; // |a| <= w iff a^2 < 8X
    let kmin = -((w + 2).div_euclid(d)); // ceil((-w - 2)/d)
    let kmax = (w - 2).div_euclid(d);
    if kmin > kmax {
        return 0.0;
    }
    let n = kmax - kmin + 1;
    let s1 = (kmin + kmax) * n / 2;
    let cube = |m: i128| m * (m + 1) * (2 * m + 1) / 6;
    let s2 = cube(kmax) - cube(kmin - 1);
    // sum a^2 = 4n + 4d s1 + d^2 s2; inner = (8X n - sum a^2) / 4
    let sum_a2 = 4 * n + 4 * d * s1 + d * d * s2;
    ((8 * x * n - sum_a2) as f64) / 4.0
}

/// The same inner sum by a literal loop over a; the oracle for the
/// collapsed form.
pub fn inner_sum_naive(x: u64, d: u64) -> f64 {
    let d = d as i64;
    let w = isqrt(8 * x) as i64 + 1;
    let mut total = 0.0;
    let mut a = 2 - (2 + w).div_euclid(d) * d; // least a = 2 (mod d) >= -w
    while a <= w {
        if (a as i128 * a as i128) < 8 * x as i128 {
            total += 2.0 * x as f64 - (a as f64) * (a as f64) / 4.0;
        }
        a += d;
    }
    total
}

/// Double sum over the window d^2 in (X^theta, 2 X^theta] of the collapsed
/// inner sums weighted by 1/(phi(d^2) log X).
pub fn main_term_sum(x: u64, theta: f64) -> Result<(f64, bool)> {
    if x < 1000 {
        return Err(Error::invalid("main_term_sum wants X >= 10^3"));
    }
    check_theta(theta)?;
    let (lo, hi) = d_window(x, theta);
    Ok((main_term_window(x, lo, hi), lo > hi))
}

/// Window-restricted evaluation; exposed so the additivity of adjacent
/// windows can be tested exactly.
pub fn main_term_window(x: u64, d_lo: u64, d_hi: u64) -> f64 {
    let log_x = (x as f64).ln();
    let mut total = 0.0;
    for d in d_lo..=d_hi {
        total += inner_sum_collapsed(x, d) / (phi_square(d) as f64 * log_x);
    }
    total
}

/// The closed-form comparison value 1575 zeta(3) sqrt(2)/(4 pi^4) *
/// X^{3/2 - theta} / log X.
pub fn main_term_closed(x: u64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let c = main_term_constant();
    Ok(c * (x as f64).powf(1.5 - theta) / (x as f64).ln())
}

pub fn main_term_constant() -> f64 {
    let pi = std::f64::consts::PI;
    1575.0 * zeta_constants().zeta3 * 2f64.sqrt() / (4.0 * pi.powi(4))
}

pub fn main_term_report(x: u64, theta: f64) -> Result<MainTermReport> {
    let (sum_value, empty_window) = main_term_sum(x, theta)?;
    let closed_form = main_term_closed(x, theta)?;
    Ok(MainTermReport {
        x,
        theta,
        sum_value,
        closed_form,
        ratio: sum_value / closed_form,
        empty_window,
    })
}

/// Exact sum over p <= X of |D_s(p)|, arranged d-major: for each
/// d <= 2 X^{1/4}, primes p = 1 (mod d) with d^4/16 < p <= X.
pub fn ds_summatory(x: u64) -> Result<(u64, f64)> {
    if x < 2 || x > 1_000_000_000 {
        return Err(Error::invalid("ds_summatory wants 2 <= X <= 10^9"));
    }
    let primes = sieve_primes(2, x + 1)?.primes;
    let mut total = 0u64;
    let mut d = 1u64;
    while (d as u128).pow(4) <= 16 * x as u128 {
        // d^4 <= 16p, i.e. p > (d^4 - 1)/16
        let p_min = ((d as u128).pow(4).div_ceil(16)) as u64;
        let start = primes.partition_point(|&p| p < p_min);
        total += primes[start..].iter().filter(|&&p| p % d == 1 % d).count() as u64;
        d += 1;
    }
    Ok((total, zeta_constants().c()))
}

/// Exact sum over p <= X of |D_l(p)| plus its analytic main term. The
/// count walks residues a - 1 (mod d^2); the main term replaces each
/// progression count with (pi(hi) - pi(a^2/4)) / phi(d^2).
pub fn dl_summatory(x: u64) -> Result<(u64, f64)> {
    if x < 2 || x > 100_000_000 {
        return Err(Error::invalid("dl_summatory wants 2 <= X <= 10^8"));
    }
    let primes = sieve_primes(2, x + 1)?.primes;
    let pi = |y: u64| primes.partition_point(|&p| p <= y) as u64;
    let mut count = 0u64;
    let mut main = 0.0f64;
    let d_max = isqrt(x) + 1;
    for d in 3..=d_max {
        let d4 = (d as u128).pow(4);
        // 16p < d^4 strictly (equality impossible at prime p)
        let hi = x.min(((d4 - 1) / 16) as u64);
        if hi < 2 {
            continue;
        }
        let d2 = d * d;
        let phi_d2 = phi_square(d) as f64;
        for t in 0..d {
            let a0 = (2 + t * d) % d2;
            let r = (a0 + d2 - 1) % d2;
            // exact count over the progression
            let mut p = 2 + ((r + d2 - 2 % d2) % d2);
            while p <= hi {
                if is_prime(p) && trace_below(p, d2, a0) {
                    count += 1;
                }
                p += d2;
            }
            // main term: every trace a = a0 (mod d^2) with a^2/4 < hi
            let d2i = d2 as i128;
            let w = isqrt(4 * hi) as i128;
            let base = a0 as i128;
            let kmin = (-w - base).div_euclid(d2i);
            let kmax = (w - base).div_euclid(d2i);
            for k in kmin..=kmax {
                let a = base + k * d2i;
                let a_sq_over_4 = (a * a / 4) as u64;
                if a_sq_over_4 >= hi {
                    continue;
                }
                main += (pi(hi) - pi(a_sq_over_4)) as f64 / phi_d2;
            }
        }
    }
    Ok((count, main))
}

/// Some a = a0 (mod d^2) with a^2 < 4p (the Hasse-range check used by the
/// d-major walks).
#[inline]
fn trace_below(p: u64, d2: u64, a0: u64) -> bool {
    let d2 = d2 as i128;
    let four_p = 4 * p as i128;
    let w = isqrt(4 * p) as i128;
    let base = a0 as i128 % d2;
    let kmin = (-w - base).div_euclid(d2);
    let kmax = (w - base).div_euclid(d2);
    (kmin..=kmax).any(|k| {
        let a = base + k * d2;
        a * a < four_p
    })
}

/// Per-modulus observed vs expected counts over (X, 2X].
pub fn discrepancy_scan(x: u64, cfg: &SieveConfig, family: Family) -> Result<DiscrepancyScan> {
    if x > 100_000_000 {
        return Err(Error::invalid("discrepancy_scan wants X <= 10^8"));
    }
    let ds: Vec<u64> = match family {
        Family::AllWindow => {
            let (lo, hi) = d_window(x, cfg.theta_f());
            (lo..=hi).collect()
        }
        Family::Deta { alpha_permille } => {
            let alpha = alpha_permille as f64 / 1000.0;
            let big_d = (x as f64).powf(alpha) as u64;
            (big_d..=2 * big_d)
                .filter(|&d| deta_member(d, alpha, cfg.eta_f(), big_d))
                .collect()
        }
    };
    let family_empty = ds.is_empty();
    let log_x = (x as f64).ln();
    let mut rows = Vec::new();
    for d in ds {
        let observed = count_pd(d, x)?;
        // expected mass over (max(X, a^2/4), 2X] for each trace class,
        // with a flat 1/log X prime density
        let w = isqrt(8 * x) as i128 + 1;
        let mut expected = 0.0;
        let mut k = (-w - 2).div_euclid(d as i128);
        while 2 + k * d as i128 <= w {
            let a = 2 + k * d as i128;
            k += 1;
            if a * a >= 8 * x as i128 {
                continue;
            }
            let lo_p = (x as i128).max(a * a / 4);
            let len = (2 * x as i128 - lo_p).max(0) as f64;
            expected += len / (phi_square(d) as f64 * log_x);
        }
        let relative_error = if expected > 0.0 {
            (observed as f64 - expected) / expected
        } else {
            observed as f64
        };
        rows.push(DiscrepancyRow {
            d,
            observed,
            expected,
            relative_error,
        });
    }
    let mut errs: Vec<f64> = rows.iter().map(|r| r.relative_error.abs()).collect();
    errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if errs.is_empty() {
        0.0
    } else {
        errs[errs.len() / 2]
    };
    let n = rows.len().max(1) as f64;
    Ok(DiscrepancyScan {
        x,
        frac_above_half: errs.iter().filter(|&&e| e > 0.5).count() as f64 / n,
        frac_above_one: errs.iter().filter(|&&e| e > 1.0).count() as f64 / n,
        median_abs_relative_error: median,
        rows,
        family_empty,
    })
}

/// pi(Y; q, a) <= (2 + slack) Y / (phi(q) log(Y/q)).
pub fn brun_titchmarsh_check(y: u64, q: u64, a: u64, slack: f64) -> Result<bool> {
    if crate::arith::gcd(a, q) != 1 {
        return Err(Error::invalid(format!("gcd({a}, {q}) > 1")));
    }
    if (q as f64) > (y as f64).powf(0.9) {
        return Err(Error::invalid(format!("q = {q} above Y^0.9")));
    }
    let mut count = 0u64;
    for_each_prime(2, y + 1, |p| {
        if p % q == a % q {
            count += 1;
        }
    });
    let bound = (2.0 + slack) * y as f64 / (euler_phi(q) as f64 * (y as f64 / q as f64).ln());
    Ok((count as f64) <= bound)
}

/// #{n in (Y, 2Y] : largest prime factor < Z} by dividing out small primes
/// over the segment.
pub fn smooth_count(y: u64, z: u64) -> Result<u64> {
    if z < 2 || z > 2 * y {
        return Err(Error::invalid("smooth_count wants 2 <= Z <= 2Y"));
    }
    if y > 10_000_000 {
        return Err(Error::invalid("smooth_count segment limited to Y <= 10^7"));
    }
    let lo = y + 1;
    let len = y as usize;
    let mut rem: Vec<u64> = (lo..=2 * y).collect();
    for_each_prime(2, z.min(2 * y + 1), |p| {
        let mut m = lo.div_ceil(p) * p;
        while m <= 2 * y {
            let idx = (m - lo) as usize;
            while rem[idx] % p == 0 {
                rem[idx] /= p;
            }
            m += p;
        }
    });
    Ok(rem[..len].iter().filter(|&&r| r == 1).count() as u64)
}

/// Count against C * Y * exp(-log Y / (2 log Z)) with the calibrated C = 3.
pub fn smooth_count_check(y: u64, z: u64) -> Result<bool> {
    let count = smooth_count(y, z)?;
    let bound = 3.0 * y as f64 * (-(y as f64).ln() / (2.0 * (z as f64).ln())).exp();
    Ok((count as f64) <= bound)
}
