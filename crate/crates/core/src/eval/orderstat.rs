//! Order-statistic distributions of i.i.d. uniforms.
//!
//! The k-th smallest of `m` i.i.d. `U[0,1]` variables has density
//! `m · C(m−1, k−1) · u^{k−1} (1−u)^{m−k}`, a Beta(k, m−k+1); its CDF is the
//! regularized incomplete beta function `I_α(k, m−k+1)`.

use crate::scalar::Real;

use super::EvalError;

const MAX_CF_ITERATIONS: usize = 400;

/// CDF of the k-th order statistic of `m` i.i.d. uniforms at `alpha`.
pub fn order_stat_cdf<T: Real>(k: usize, m: usize, alpha: T) -> Result<T, EvalError> {
    if m == 0 || k == 0 || k > m {
        return Err(EvalError::Domain {
            name: "k",
            value: k as f64,
            domain: "1..=m",
        });
    }
    if alpha < T::zero() || alpha > T::one() {
        return Err(EvalError::Domain {
            name: "alpha",
            value: alpha.to_f64().unwrap_or(f64::NAN),
            domain: "[0, 1]",
        });
    }
    regularized_incomplete_beta(k, m - k + 1, alpha)
}

/// `ln B(a, b)` for positive integers: `ln((a−1)!(b−1)!/(a+b−1)!)`.
fn ln_beta_int<T: Real>(a: usize, b: usize) -> T {
    // Sum the smaller factorial logs and subtract along the larger range:
    // ln B = Σ_{i=1}^{b-1} ln i − Σ_{i=a}^{a+b-1} ln i (for integer a, b).
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut acc = T::zero();
    for i in 1..lo {
        acc += T::from_usize(i).expect("fits").ln();
    }
    for i in hi..(lo + hi) {
        acc -= T::from_usize(i).expect("fits").ln();
    }
    acc
}

/// Regularized incomplete beta `I_x(a, b)` for positive integer parameters,
/// by the continued fraction of the incomplete beta (modified Lentz), with
/// the usual reflection for fast convergence.
pub fn regularized_incomplete_beta<T: Real>(
    a: usize,
    b: usize,
    x: T,
) -> Result<T, EvalError> {
    if a == 0 || b == 0 {
        return Err(EvalError::Domain {
            name: "a,b",
            value: a.min(b) as f64,
            domain: "positive integers",
        });
    }
    if x < T::zero() || x > T::one() {
        return Err(EvalError::Domain {
            name: "x",
            value: x.to_f64().unwrap_or(f64::NAN),
            domain: "[0, 1]",
        });
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::one() {
        return Ok(T::one());
    }
    let af = T::from_usize(a).expect("fits");
    let bf = T::from_usize(b).expect("fits");
    let one = T::one();
    let two = one + one;
    if x > (af + one) / (af + bf + two) {
        return Ok(one - beta_cf(b, a, one - x)?);
    }
    beta_cf(a, b, x)
}

fn beta_cf<T: Real>(a: usize, b: usize, x: T) -> Result<T, EvalError> {
    let one = T::one();
    let two = one + one;
    let eps = T::epsilon();
    let tiny = T::from_f64(1e-300).expect("fits").max(T::min_positive_value());
    let af = T::from_usize(a).expect("fits");
    let bf = T::from_usize(b).expect("fits");

    let ln_prefix = af * x.ln() + bf * (one - x).ln() - ln_beta_int::<T>(a, b);
    let prefix = ln_prefix.exp() / af;

    let qab = af + bf;
    let qap = af + one;
    let qam = af - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut f = d;
    for m in 1..=MAX_CF_ITERATIONS {
        let mf = T::from_usize(m).expect("fits");
        let m2 = two * mf;
        let aa = mf * (bf - mf) * x / ((qam + m2) * (af + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        f = f * d * c;
        let aa = -(af + mf) * (qab + mf) * x / ((af + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let delta = d * c;
        f = f * delta;
        if (delta - one).abs() < eps {
            return Ok((prefix * f).min(T::one()).max(T::zero()));
        }
    }
    Err(EvalError::NoConvergence)
}
