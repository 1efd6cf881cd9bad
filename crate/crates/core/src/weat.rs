//! Word Embedding Association Test.
//!
//! Per-target association differences `s(t, A, B)`, the effect size `d`,
//! the unnormalized test statistic and the permutation test over equal-size
//! bipartitions of `X ∪ Y`.

use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;

use crate::rng::keyed_rng;
use crate::space::TargetSet;
use crate::vector::{check_dim, checked_norm, group_association, norm, normalized_mean, sub};
use crate::{Error, Result};

/// Largest number of bipartitions enumerated exactly: `C(20, 10)`.
pub const EXACT_LIMIT: u64 = 184_756;

/// Population standard deviations at or below this are treated as zero.
pub const DEGENERATE_SPREAD: f64 = 1e-12;

/// Relative slack under which two test statistics count as tied. Ties never
/// count as exceedances.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Two target sets of equal size and two attribute sets of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatInstance {
    x: TargetSet,
    y: TargetSet,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

impl WeatInstance {
    pub fn new(x: TargetSet, y: TargetSet, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidParameter(alloc::format!(
                "target sets must have equal size ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyInput("attribute set"));
        }
        if a.len() != b.len() {
            return Err(Error::InvalidParameter(alloc::format!(
                "attribute sets must have equal size ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        let dim = x.dim();
        for v in y.members().iter().chain(&a).chain(&b) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            checked_norm(v)?;
        }
        Ok(Self { x, y, a, b })
    }

    /// Builds an instance from raw vectors with generated labels.
    pub fn from_vectors(
        x: Vec<Vec<f64>>,
        y: Vec<Vec<f64>>,
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::new(TargetSet::new("X", x)?, TargetSet::new("Y", y)?, a, b)
    }

    pub fn x(&self) -> &TargetSet {
        &self.x
    }

    pub fn y(&self) -> &TargetSet {
        &self.y
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<f64>] {
        &self.b
    }

    /// Target sets swapped.
    pub fn swapped_targets(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// Attribute sets swapped.
    pub fn swapped_attributes(&self) -> Self {
        Self {
            x: self.x.clone(),
            y: self.y.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// `s(t, A, B)` for every member of X, then every member of Y.
    pub fn target_scores(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let score = |t: &Vec<f64>| association_diff(t, &self.a, &self.b);
        let xs = self
            .x
            .members()
            .iter()
            .map(score)
            .collect::<Result<Vec<_>>>()?;
        let ys = self
            .y
            .members()
            .iter()
            .map(score)
            .collect::<Result<Vec<_>>>()?;
        Ok((xs, ys))
    }
}

/// `s(t, A, B)`: mean cosine with `A` minus mean cosine with `B`.
pub fn association_diff(t: &[f64], a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    Ok(group_association(t, a)? - group_association(t, b)?)
}

/// `‖â − b̂‖` where `â`, `b̂` are the normalized means of the attribute sets.
/// `s(t, A, B)` ranges over exactly `[−‖â − b̂‖, ‖â − b̂‖]`.
pub fn attribute_difference_norm(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let ma = normalized_mean(a)?;
    let mb = normalized_mean(b)?;
    check_dim(&ma, &mb)?;
    Ok(norm(&sub(&ma, &mb)))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population (divisor `n`) standard deviation.
pub fn population_std(values: &[f64]) -> f64 {
    let mu = mean(values);
    let var = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / values.len() as f64;
    libm::sqrt(var)
}

/// Effect size from precomputed per-target scores.
pub fn effect_size_from_scores(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyInput("target scores"));
    }
    let all: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let sd = population_std(&all);
    if sd <= DEGENERATE_SPREAD {
        return Err(Error::DegenerateDenominator { scores: all });
    }
    Ok((mean(xs) - mean(ys)) / sd)
}

/// Effect size `d`: difference of mean scores over X and Y divided by the
/// population standard deviation over `X ∪ Y`. Always within `[−2, 2]`.
pub fn effect_size(inst: &WeatInstance) -> Result<f64> {
    let (xs, ys) = inst.target_scores()?;
    effect_size_from_scores(&xs, &ys)
}

/// `Σ_X s(x, A, B) − Σ_Y s(y, A, B)`.
pub fn test_statistic(inst: &WeatInstance) -> Result<f64> {
    let (xs, ys) = inst.target_scores()?;
    Ok(xs.iter().sum::<f64>() - ys.iter().sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationMode {
    /// Enumerate every equal-size bipartition.
    Exact,
    /// Sample `samples` bipartitions uniformly; sample `i` draws from
    /// `keyed_rng(seed, i)`.
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub p: f64,
    pub mode: PermutationMode,
    /// Bipartitions whose statistic strictly exceeded the observed one.
    pub exceedances: u64,
    /// Bipartitions evaluated (`C(2m, m)` in exact mode).
    pub evaluated: u64,
}

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// `true` when `candidate` strictly exceeds `observed` beyond rounding.
pub fn is_exceedance(candidate: f64, observed: f64) -> bool {
    candidate - observed > TIE_TOLERANCE * (1.0 + observed.abs())
}

/// Permutation test over the pooled scores of `X ∪ Y`.
///
/// A bipartition is an ordered pair `(X_i, Y_i)` of disjoint size-`m`
/// subsets; the identity partition is included. The p-value is the share of
/// bipartitions whose statistic strictly exceeds the observed one.
#[derive(Debug, Clone)]
pub struct PermutationTest {
    pooled: Vec<f64>,
    m: usize,
    total: f64,
    observed: f64,
}

impl PermutationTest {
    pub fn new(inst: &WeatInstance) -> Result<Self> {
        let (xs, ys) = inst.target_scores()?;
        Self::from_scores(&xs, &ys)
    }

    pub fn from_scores(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidParameter(
                "permutation test needs |X| = |Y|".into(),
            ));
        }
        if xs.is_empty() {
            return Err(Error::EmptyInput("target scores"));
        }
        let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
        let m = xs.len();
        let total = pooled.iter().sum::<f64>();
        let mut t = Self {
            pooled,
            m,
            total,
            observed: 0.0,
        };
        t.observed = t.statistic((0..m).map(|i| t.pooled[i]));
        Ok(t)
    }

    fn statistic(&self, selected: impl Iterator<Item = f64>) -> f64 {
        2.0 * selected.sum::<f64>() - self.total
    }

    pub fn observed(&self) -> f64 {
        self.observed
    }

    pub fn half_size(&self) -> usize {
        self.m
    }

    pub fn bipartition_count(&self) -> u64 {
        binomial(2 * self.m as u64, self.m as u64)
    }

    pub fn run(&self, mode: PermutationMode) -> Result<PValue> {
        match mode {
            PermutationMode::Exact => self.exact(),
            PermutationMode::MonteCarlo { samples, seed } => self.monte_carlo(samples, seed),
        }
    }

    pub fn exact(&self) -> Result<PValue> {
        let count = self.bipartition_count();
        if count > EXACT_LIMIT {
            return Err(Error::InvalidParameter(alloc::format!(
                "exact enumeration of {count} bipartitions exceeds {EXACT_LIMIT}; use Monte Carlo"
            )));
        }
        let n = self.pooled.len();
        let m = self.m;
        let mut idx: Vec<usize> = (0..m).collect();
        let mut exceed = 0u64;
        let mut evaluated = 0u64;
        loop {
            evaluated += 1;
            if is_exceedance(
                self.statistic(idx.iter().map(|&i| self.pooled[i])),
                self.observed,
            ) {
                exceed += 1;
            }
            // next combination in lexicographic order
            let Some(pos) = (0..m).rev().find(|&i| idx[i] != i + n - m) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..m {
                idx[j] = idx[j - 1] + 1;
            }
        }
        debug_assert_eq!(evaluated, count);
        Ok(PValue {
            p: exceed as f64 / evaluated as f64,
            mode: PermutationMode::Exact,
            exceedances: exceed,
            evaluated,
        })
    }

    /// Exceedances among Monte Carlo samples `range`. Summing disjoint ranges
    /// gives the same count as one call over their union.
    pub fn monte_carlo_exceedances(&self, seed: u64, range: Range<u64>) -> u64 {
        let n = self.pooled.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut exceed = 0;
        for i in range {
            let mut rng = keyed_rng(seed, i);
            for (k, slot) in perm.iter_mut().enumerate() {
                *slot = k;
            }
            for k in 0..self.m {
                let j = rng.random_range(k..n);
                perm.swap(k, j);
            }
            let stat = self.statistic(perm[..self.m].iter().map(|&j| self.pooled[j]));
            if is_exceedance(stat, self.observed) {
                exceed += 1;
            }
        }
        exceed
    }

    pub fn monte_carlo(&self, samples: u64, seed: u64) -> Result<PValue> {
        let exceed = self.monte_carlo_exceedances(seed, 0..samples);
        self.monte_carlo_result(samples, seed, exceed)
    }

    /// Assembles a Monte Carlo p-value from an externally summed count.
    pub fn monte_carlo_result(&self, samples: u64, seed: u64, exceedances: u64) -> Result<PValue> {
        if samples == 0 {
            return Err(Error::InvalidParameter(
                "Monte Carlo sample count must be positive".into(),
            ));
        }
        Ok(PValue {
            p: exceedances as f64 / samples as f64,
            mode: PermutationMode::MonteCarlo { samples, seed },
            exceedances,
            evaluated: samples,
        })
    }
}

pub fn permutation_test(inst: &WeatInstance, mode: PermutationMode) -> Result<PValue> {
    PermutationTest::new(inst)?.run(mode)
}

/// Effect size, or the reason it is undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum EffectSize {
    Defined(f64),
    /// Every target has the same association difference.
    Degenerate,
}

/// Everything one WEAT run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatResult {
    pub x_scores: Vec<f64>,
    pub y_scores: Vec<f64>,
    pub effect_size: EffectSize,
    pub test_statistic: f64,
    pub p_value: Option<PValue>,
    pub attribute_difference_norm: f64,
}

/// Runs the full test. A degenerate effect size is recorded, not raised.
pub fn evaluate(inst: &WeatInstance, mode: Option<PermutationMode>) -> Result<WeatResult> {
    let (xs, ys) = inst.target_scores()?;
    let effect_size = match effect_size_from_scores(&xs, &ys) {
        Ok(d) => EffectSize::Defined(d),
        Err(Error::DegenerateDenominator { .. }) => EffectSize::Degenerate,
        Err(e) => return Err(e),
    };
    let test = PermutationTest::from_scores(&xs, &ys)?;
    let p_value = mode.map(|m| test.run(m)).transpose()?;
    Ok(WeatResult {
        test_statistic: xs.iter().sum::<f64>() - ys.iter().sum::<f64>(),
        x_scores: xs,
        y_scores: ys,
        effect_size,
        p_value,
        attribute_difference_norm: attribute_difference_norm(inst.a(), inst.b())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn inst(
        x: Vec<Vec<f64>>,
        y: Vec<Vec<f64>>,
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
    ) -> WeatInstance {
        WeatInstance::from_vectors(x, y, a, b).unwrap()
    }

    #[test]
    fn association_diff_examples() {
        let a = [vec![1.0, 0.0]];
        let b = [vec![0.0, 1.0]];
        assert_eq!(association_diff(&[1.0, 0.0], &a, &b).unwrap(), 1.0);
        assert_eq!(association_diff(&[1.0, 1.0], &a, &b).unwrap(), 0.0);
        let a2 = [vec![1.0, 0.0], vec![0.0, 1.0]];
        let b2 = [vec![-1.0, 0.0], vec![0.0, -1.0]];
        assert_eq!(association_diff(&[1.0, 0.0], &a2, &b2).unwrap(), 1.0);
        assert_eq!(
            association_diff(&[0.0, 0.0], &a, &b),
            Err(Error::DegenerateVector)
        );
    }

    #[test]
    fn attribute_difference_norm_examples() {
        let a = [vec![1.0, 0.0]];
        let b = [vec![0.0, 1.0]];
        let n = attribute_difference_norm(&a, &b).unwrap();
        assert!((n - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(attribute_difference_norm(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn effect_size_examples() {
        let a = vec![vec![1.0, 0.0]];
        let b = vec![vec![0.0, 1.0]];
        let antipodal = inst(
            vec![vec![1.0, 0.0]],
            vec![vec![-1.0, 0.0]],
            a.clone(),
            b.clone(),
        );
        assert!((effect_size(&antipodal).unwrap() - 2.0).abs() < 1e-15);

        let balanced = inst(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![-1.0, 0.0], vec![0.0, -1.0]],
            a.clone(),
            b.clone(),
        );
        assert_eq!(effect_size(&balanced).unwrap(), 0.0);

        let same = inst(vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]], a, b);
        match effect_size(&same) {
            Err(Error::DegenerateDenominator { scores }) => assert_eq!(scores, vec![1.0, 1.0]),
            other => panic!("expected degenerate denominator, got {other:?}"),
        }
    }

    #[test]
    fn effect_size_uses_population_std() {
        // scores (1, 0 | 0, 0): means 0.5 vs 0, population sd = sqrt(3)/4
        let d = effect_size_from_scores(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!((d - 0.5 / (libm::sqrt(3.0) / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn test_statistic_examples() {
        let a = vec![vec![1.0, 0.0]];
        let b = vec![vec![0.0, 1.0]];
        let i1 = inst(
            vec![vec![1.0, 0.0]],
            vec![vec![-1.0, 0.0]],
            a.clone(),
            b.clone(),
        );
        assert_eq!(test_statistic(&i1).unwrap(), 2.0);
        let i2 = inst(
            vec![vec![0.3, 0.7]],
            vec![vec![0.3, 0.7]],
            a.clone(),
            b.clone(),
        );
        assert_eq!(test_statistic(&i2).unwrap(), 0.0);
        let i3 = inst(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![-1.0, 0.0], vec![0.0, -1.0]],
            a,
            b,
        );
        assert_eq!(test_statistic(&i3).unwrap(), 0.0);
    }

    #[test]
    fn instance_validation() {
        let a = vec![vec![1.0, 0.0]];
        assert!(WeatInstance::from_vectors(
            vec![vec![1.0, 0.0]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            a.clone(),
            a.clone()
        )
        .is_err());
        assert!(WeatInstance::from_vectors(
            vec![vec![1.0, 0.0]],
            vec![vec![1.0, 0.0]],
            a.clone(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]]
        )
        .is_err());
        assert!(WeatInstance::from_vectors(
            vec![vec![1.0, 0.0]],
            vec![vec![1.0, 0.0]],
            a,
            vec![vec![1.0]]
        )
        .is_err());
    }

    #[test]
    fn permutation_examples() {
        let a = vec![vec![1.0, 0.0]];
        let b = vec![vec![0.0, 1.0]];
        let i1 = inst(
            vec![vec![1.0, 0.0]],
            vec![vec![-1.0, 0.0]],
            a.clone(),
            b.clone(),
        );
        let p = permutation_test(&i1, PermutationMode::Exact).unwrap();
        assert_eq!((p.p, p.evaluated, p.exceedances), (0.0, 2, 0));

        let i2 = inst(
            vec![vec![1.0, 0.0]],
            vec![vec![1.0, 0.0]],
            a.clone(),
            b.clone(),
        );
        assert_eq!(
            permutation_test(&i2, PermutationMode::Exact).unwrap().p,
            0.0
        );

        // reversed: the swapped bipartition (statistic 2) exceeds -2
        let i3 = inst(vec![vec![-1.0, 0.0]], vec![vec![1.0, 0.0]], a, b);
        assert_eq!(
            permutation_test(&i3, PermutationMode::Exact).unwrap().p,
            0.5
        );
    }

    #[test]
    fn monte_carlo_rejects_zero_samples() {
        let t = PermutationTest::from_scores(&[1.0], &[0.0]).unwrap();
        assert!(matches!(
            t.run(PermutationMode::MonteCarlo {
                samples: 0,
                seed: 1
            }),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn monte_carlo_ranges_add_up() {
        let xs = [0.3, -0.1, 0.25, 0.0];
        let ys = [0.1, -0.4, 0.05, 0.2];
        let t = PermutationTest::from_scores(&xs, &ys).unwrap();
        let whole = t.monte_carlo_exceedances(11, 0..1000);
        let split =
            t.monte_carlo_exceedances(11, 0..317) + t.monte_carlo_exceedances(11, 317..1000);
        assert_eq!(whole, split);
    }

    #[test]
    fn exact_limit_enforced() {
        let xs = [0.0; 11];
        let ys = [1.0; 11];
        let t = PermutationTest::from_scores(&xs, &ys).unwrap();
        assert!(t.exact().is_err());
        let t10 = PermutationTest::from_scores(&xs[..10], &ys[..10]).unwrap();
        assert_eq!(t10.bipartition_count(), EXACT_LIMIT);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(5, 0), 1);
    }

    #[test]
    fn evaluate_flags_degenerate_effect_size() {
        let a = vec![vec![1.0, 0.0]];
        let b = vec![vec![0.0, 1.0]];
        let i = inst(vec![vec![1.0, 0.0]], vec![vec![1.0, 0.0]], a, b);
        let r = evaluate(&i, Some(PermutationMode::Exact)).unwrap();
        assert_eq!(r.effect_size, EffectSize::Degenerate);
        assert_eq!(r.p_value.unwrap().p, 0.0);
    }
}
