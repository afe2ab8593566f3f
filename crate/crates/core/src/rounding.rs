//! Exact rational `ε` and rounding of integers down to powers of `1+ε`.
//!
//! No floating point decides anything here: every `(1+ε)^k ≤ v` test is
//! done as `(den+num)^k ≤ v·den^k` on big integers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::error::Error;

/// A positive rational `num/den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self, Error> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {num}/{den}"
            )));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `q ≦ (1+ε)·p`, componentwise on one coordinate.
    pub fn within(&self, q: u64, p: u64) -> bool {
        (q as u128) * (self.den as u128) <= (p as u128) * (self.den as u128 + self.num as u128)
    }

    /// `(1+ε)^k ≤ v`.
    pub fn power_le(&self, k: u32, v: u64) -> bool {
        let base = BigUint::from(self.den) + BigUint::from(self.num);
        base.pow(k) <= BigUint::from(v) * BigUint::from(self.den).pow(k)
    }

    /// `(1+ε)^k ≥ v`.
    pub fn power_ge(&self, k: u32, v: u64) -> bool {
        let base = BigUint::from(self.den) + BigUint::from(self.num);
        base.pow(k) >= BigUint::from(v) * BigUint::from(self.den).pow(k)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Accepts `"0.25"`, `"1/4"` or `"3"`.
impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidParameter(format!("cannot parse epsilon {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse::<u64>().map_err(|_| bad())?;
            let d = d.trim().parse::<u64>().map_err(|_| bad())?;
            return Epsilon::new(n, d);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|x| x.checked_add(frac))
            .ok_or_else(bad)?;
        Epsilon::new(num, den)
    }
}

/// A value rounded down to the grid `0, (1+ε)^0, (1+ε)^1, …`.
///
/// `Zero` stands for the bucket `[0, 1)`, which for integers holds only 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rounded {
    Zero,
    Pow(u32),
}

impl Rounded {
    /// Order-preserving integer code: `Zero ↦ 0`, `Pow(k) ↦ k+1`.
    pub fn code(&self) -> u64 {
        match self {
            Rounded::Zero => 0,
            Rounded::Pow(k) => *k as u64 + 1,
        }
    }
}

/// Largest `k` with `(1+ε)^k ≤ v`, or [`Rounded::Zero`] for `v = 0`.
///
/// A floating-point logarithm supplies the first guess, which is then
/// corrected by exact comparisons.
pub fn round_down(v: u64, eps: Epsilon) -> Rounded {
    if v == 0 {
        return Rounded::Zero;
    }
    let guess = ((v as f64).ln() / eps.as_f64().ln_1p()).floor();
    let mut k = if guess.is_finite() && guess > 0.0 {
        guess.min(u32::MAX as f64 - 1.0) as u32
    } else {
        0
    };
    while k > 0 && !eps.power_le(k, v) {
        k -= 1;
    }
    while eps.power_le(k + 1, v) {
        k += 1;
    }
    Rounded::Pow(k)
}

/// `⌈log_{1+ε} n⌉`, taken as 0 for `n ≤ 1`.
pub fn ceil_log(n: u64, eps: Epsilon) -> u32 {
    if n <= 1 {
        return 0;
    }
    let guess = ((n as f64).ln() / eps.as_f64().ln_1p()).ceil();
    let mut k = if guess.is_finite() && guess > 1.0 {
        guess.min(u32::MAX as f64 - 1.0) as u32
    } else {
        1
    };
    while !eps.power_ge(k, n) {
        k += 1;
    }
    while k > 0 && eps.power_ge(k - 1, n) {
        k -= 1;
    }
    k
}

/// Precomputed bucket boundaries `⌈(1+ε)^k⌉` up to a maximum value, so that
/// rounding an integer is a binary search instead of big-integer powers.
#[derive(Debug, Clone)]
pub struct RoundingGrid {
    eps: Epsilon,
    /// `thresholds[k]` is the least integer `v` with `(1+ε)^k ≤ v`.
    thresholds: Vec<u64>,
}

impl RoundingGrid {
    pub fn new(eps: Epsilon, max_value: u64) -> Self {
        let base = BigUint::from(eps.den) + BigUint::from(eps.num);
        let den = BigUint::from(eps.den);
        let mut numer = BigUint::from(1u32);
        let mut denom = BigUint::from(1u32);
        let mut thresholds = Vec::new();
        loop {
            let t = numer.div_ceil(&denom);
            match u64::try_from(&t) {
                Ok(t) if t <= max_value => thresholds.push(t),
                _ => break,
            }
            numer *= &base;
            denom *= &den;
        }
        Self { eps, thresholds }
    }

    pub fn epsilon(&self) -> Epsilon {
        self.eps
    }

    /// Same result as [`round_down`] for `v` up to the grid's maximum.
    pub fn round(&self, v: u64) -> Rounded {
        match self.thresholds.partition_point(|&t| t <= v) {
            0 => Rounded::Zero,
            n => Rounded::Pow(n as u32 - 1),
        }
    }
}
