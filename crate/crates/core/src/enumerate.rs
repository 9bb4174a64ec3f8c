//! Exhaustive sweeps over effective divisors, guarded by an explicit budget.

use crate::error::{Error, Result};

/// Default cap on the number of candidates a single sweep may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_ENUMERATION_CAP`].
pub const BUDGET_ENV: &str = "REALCHIP_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_enumeration: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_enumeration: DEFAULT_ENUMERATION_CAP }
    }
}

impl Budget {
    pub fn new(max_enumeration: u64) -> Self {
        Budget { max_enumeration }
    }

    /// Default budget, overridden by `REALCHIP_BUDGET` when it parses.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).map(Budget::new).unwrap_or_default()
    }

    pub fn check(&self, required: u128) -> Result<()> {
        if required > self.max_enumeration as u128 {
            Err(Error::EnumerationBudgetExceeded { required, cap: self.max_enumeration })
        } else {
            Ok(())
        }
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact: acc * (n - i) is divisible by (i + 1)
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of effective divisors of degree `degree` on `n` vertices.
pub fn count_effective(n: usize, degree: i64) -> u128 {
    if degree < 0 || n == 0 {
        return (degree == 0) as u128;
    }
    binomial(degree as u64 + n as u64 - 1, n as u64 - 1)
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative
/// integers, from `[total, 0, …]` to `[…, 0, total]`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Vec<i64>,
    total: i64,
    started: bool,
    done: bool,
}

impl Compositions {
    pub fn new(parts: usize, total: i64) -> Self {
        let mut current = vec![0; parts];
        let done = total < 0 || (parts == 0 && total != 0);
        if parts > 0 {
            current[0] = total.max(0);
        }
        Compositions { current, total, started: false, done }
    }

    /// Advance in place; returns the next composition.
    pub fn next_slice(&mut self) -> Option<&[i64]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let n = self.current.len();
        if n <= 1 || self.current[n - 1] == self.total {
            self.done = true;
            return None;
        }
        let i = (0..n - 1).rev().find(|&i| self.current[i] > 0).expect("nonzero entry exists");
        let tail = self.current[n - 1];
        self.current[n - 1] = 0;
        self.current[i] -= 1;
        self.current[i + 1] = tail + 1;
        Some(&self.current)
    }
}

impl Iterator for Compositions {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        self.next_slice().map(<[i64]>::to_vec)
    }
}
