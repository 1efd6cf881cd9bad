//! Bound on standardized partial sums.
//!
//! For reals `x_1..x_n` with population mean `μ` and standard deviation
//! `σ`, any `m` distinct indices satisfy
//! `|Σ_j (x_{i_j} − μ)/σ| ≤ √(m(n − m))`, with equality exactly when the
//! selected values all equal `μ + s√((n−m)/m)σ` and the rest equal
//! `μ − s√(m/(n−m))σ`. This is what bounds the effect size by 2.

use alloc::vec;
use alloc::vec::Vec;

use crate::rng::{gaussian_vector, keyed_rng};
use crate::weat::population_std;
use crate::{Error, Result};

/// Slack allowed when deciding whether a check satisfies the bound.
pub const LEMMA_SLACK: f64 = 1e-9;

pub fn lemma_bound(n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if m > n {
        return Err(Error::InvalidParameter(alloc::format!(
            "m = {m} exceeds n = {n}"
        )));
    }
    Ok(libm::sqrt((m * (n - m)) as f64))
}

/// Values attaining the bound: the first `m` are selected. The sequence has
/// mean `mu` and population standard deviation `sigma`.
pub fn lemma_equality_configuration(
    n: usize,
    m: usize,
    sign: i8,
    mu: f64,
    sigma: f64,
) -> Result<Vec<f64>> {
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(alloc::format!(
            "equality needs 0 < m < n (m = {m}, n = {n})"
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter("sign must be +1 or -1".into()));
    }
    if !sigma.is_finite() || sigma <= 0.0 || !mu.is_finite() {
        return Err(Error::InvalidParameter(
            "sigma must be positive and finite".into(),
        ));
    }
    let s = f64::from(sign);
    let (nf, mf) = (n as f64, m as f64);
    let selected = mu + s * libm::sqrt((nf - mf) / mf) * sigma;
    let rest = mu - s * libm::sqrt(mf / (nf - mf)) * sigma;
    let mut out = vec![rest; n];
    out[..m].iter_mut().for_each(|v| *v = selected);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaCheck {
    pub standardized_sum: f64,
    pub bound: f64,
    pub satisfied: bool,
}

pub fn lemma_check(values: &[f64], selection: &[usize]) -> Result<LemmaCheck> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput("lemma values"));
    }
    let mut seen = vec![false; n];
    for &i in selection {
        if i >= n {
            return Err(Error::InvalidParameter(alloc::format!(
                "index {i} out of range"
            )));
        }
        if core::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidParameter(alloc::format!(
                "index {i} selected twice"
            )));
        }
    }
    let mu = values.iter().sum::<f64>() / n as f64;
    let sigma = population_std(values);
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::DegenerateInput("all values are equal".into()));
    }
    let standardized_sum = selection
        .iter()
        .map(|&i| (values[i] - mu) / sigma)
        .sum::<f64>();
    let bound = lemma_bound(n, selection.len())?;
    Ok(LemmaCheck {
        standardized_sum,
        bound,
        satisfied: standardized_sum.abs() <= bound + LEMMA_SLACK,
    })
}

fn objective(x: &[f64], m: usize) -> f64 {
    let sigma = population_std(x);
    if sigma <= 1e-300 {
        return 0.0;
    }
    let mu = x.iter().sum::<f64>() / x.len() as f64;
    x[..m].iter().map(|v| (v - mu) / sigma).sum::<f64>().abs()
}

/// Rescales `x` to mean 0 and population standard deviation 1; the
/// objective is invariant under this map.
fn standardize(x: &mut [f64]) {
    let sigma = population_std(x);
    if sigma > 1e-300 {
        let mu = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|v| *v = (*v - mu) / sigma);
    }
}

/// Sweeps per step size before the step is halved regardless.
const MAX_SWEEPS_PER_STEP: usize = 64;

/// Numerical maximizer of `|Σ_{j<m} (x_j − μ)/σ|` over `x ∈ ℝⁿ`: Gaussian
/// restarts followed by coordinate search with a shrinking step. The point
/// is re-standardized after every sweep so the step stays relative to its
/// spread. Restart `i` draws from `keyed_rng(seed, i)`. Returns the best
/// value found.
pub fn lemma_search(n: usize, m: usize, restarts: usize, seed: u64) -> Result<f64> {
    lemma_bound(n, m)?;
    if m == 0 || m == n {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    for r in 0..restarts {
        let mut rng = keyed_rng(seed, r as u64);
        let mut x = gaussian_vector(&mut rng, n);
        standardize(&mut x);
        let mut value = objective(&x, m);
        let mut step = 1.0;
        while step > 1e-7 {
            let mut sweeps = 0;
            loop {
                let mut improved = false;
                for i in 0..n {
                    for delta in [step, -step] {
                        x[i] += delta;
                        let v = objective(&x, m);
                        if v > value {
                            value = v;
                            improved = true;
                            break;
                        }
                        x[i] -= delta;
                    }
                }
                standardize(&mut x);
                value = objective(&x, m);
                sweeps += 1;
                if !improved || sweeps >= MAX_SWEEPS_PER_STEP {
                    break;
                }
            }
            step *= 0.5;
        }
        best = best.max(value);
    }
    Ok(best)
}
