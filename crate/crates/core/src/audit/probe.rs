//! Randomized probes for comparability and trustworthiness.
//!
//! Every trial draws from `keyed_rng(seed, trial)`, so results do not depend
//! on evaluation order. Random search is always combined with the known
//! closed-form extremizers and counterexamples: a reported violation is a
//! certificate, an empty result is only evidence.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::audit::construct::{
    construct_direct_bias_counterexample, construct_weat_extremal, construct_weat_zero_bias,
    construct_weat_zero_bias_perturbed,
};
use crate::audit::predicates::{aggregated_bias, individual_bias};
use crate::audit::witness::{BiasWitness, Geometry, WitnessKind};
use crate::directbias::direct_bias_word;
use crate::rng::{gaussian_vector, keyed_rng, unit_vector};
use crate::space::{AttributeGroups, TargetSet};
use crate::subspace::{centered_samples, pca, DefiningSetFamily};
use crate::vector::{dot, norm, normalize, normalized_mean, scale, sub};
use crate::weat::{association_diff, effect_size, WeatInstance};
use crate::{Error, Result};

/// At most this many witnesses are stored per report; all are counted.
pub const MAX_STORED_WITNESSES: usize = 16;

/// Random target restarts per attribute draw in the extrema search.
pub const EXTREMA_RESTARTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    /// `s(t, A, B)` for a single target.
    WeatIndividual,
    /// The effect size `d(X, Y, A, B)`.
    WeatEffectSize,
    /// `|cos(t, g)|` with `g` the first principal component of the
    /// defining pairs.
    DirectBias,
}

impl ScoreKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::WeatIndividual => "weat-individual",
            Self::WeatEffectSize => "weat-effect-size",
            Self::DirectBias => "direct-bias",
        }
    }

    /// The attribute-independent extremes the score should have, if any.
    pub fn expected_extrema(self) -> Option<(f64, f64)> {
        match self {
            Self::WeatIndividual => None,
            Self::WeatEffectSize => Some((-2.0, 2.0)),
            Self::DirectBias => Some((0.0, 1.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub dimension: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl ProbeConfig {
    pub fn new(dimension: usize, trials: usize, seed: u64, tolerance: f64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidParameter(
                "probe dimension must be at least 2".into(),
            ));
        }
        if trials == 0 {
            return Err(Error::InvalidParameter(
                "probe needs at least one trial".into(),
            ));
        }
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::InvalidParameter(
                "probe tolerance must be positive".into(),
            ));
        }
        Ok(Self {
            dimension,
            trials,
            seed,
            tolerance,
        })
    }
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            dimension: 10,
            trials: 100,
            seed: 0,
            tolerance: crate::audit::DEFAULT_TOLERANCE,
        }
    }
}

/// Counterpart-aligned attribute sets. For Direct Bias, `(a[k], b[k])` is
/// the `k`-th defining pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeDraw {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

impl AttributeDraw {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        AttributeGroups::pair(a.clone(), b.clone())?;
        Ok(Self { a, b })
    }

    /// Random sets of 1 to 4 counterpart pairs.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        let size = rng.random_range(1..=4);
        let a = (0..size).map(|_| gaussian_vector(rng, dim)).collect();
        let b = (0..size).map(|_| gaussian_vector(rng, dim)).collect();
        Self { a, b }
    }

    pub fn groups(&self) -> Result<AttributeGroups> {
        AttributeGroups::pair(self.a.clone(), self.b.clone())
    }

    pub fn dim(&self) -> usize {
        self.a[0].len()
    }

    fn pairs(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        self.a.iter().cloned().zip(self.b.iter().cloned()).collect()
    }

    fn bias_direction(&self) -> Result<Vec<f64>> {
        let family = DefiningSetFamily::from_pairs(self.pairs())?;
        Ok(pca(&centered_samples(&family), 1)?.first().to_vec())
    }
}

/// Empirical extremes of one score for one attribute draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    /// `‖â − b̂‖` for the draw.
    pub attribute_difference_norm: f64,
    pub evaluations: usize,
}

fn orthogonal_to(v: &[f64], seed_vec: Vec<f64>) -> Option<Vec<f64>> {
    let u = normalize(v).ok()?;
    let p = dot(&seed_vec, &u);
    let w: Vec<f64> = seed_vec.iter().zip(&u).map(|(x, y)| x - p * y).collect();
    (norm(&w) > 1e-9).then_some(w)
}

/// Searches the extremes of `kind` over targets for fixed attributes:
/// random restarts plus the closed-form extremizers.
pub fn score_extrema(
    kind: ScoreKind,
    attrs: &AttributeDraw,
    restarts: usize,
    seed: u64,
) -> Result<Extrema> {
    let dim = attrs.dim();
    let diff = sub(&normalized_mean(&attrs.a)?, &normalized_mean(&attrs.b)?);
    let range = norm(&diff);
    let mut values: Vec<f64> = Vec::new();
    let mut rng = keyed_rng(seed, 0);

    match kind {
        ScoreKind::WeatIndividual => {
            for _ in 0..restarts {
                values.push(association_diff(
                    &gaussian_vector(&mut rng, dim),
                    &attrs.a,
                    &attrs.b,
                )?);
            }
            if range > 0.0 {
                values.push(association_diff(&diff, &attrs.a, &attrs.b)?);
                values.push(association_diff(&scale(&diff, -1.0), &attrs.a, &attrs.b)?);
            }
        }
        ScoreKind::WeatEffectSize => {
            for _ in 0..restarts {
                let m = rng.random_range(1..=4);
                let x = (0..m).map(|_| gaussian_vector(&mut rng, dim)).collect();
                let y = (0..m).map(|_| gaussian_vector(&mut rng, dim)).collect();
                let inst = WeatInstance::from_vectors(x, y, attrs.a.clone(), attrs.b.clone())?;
                match effect_size(&inst) {
                    Ok(d) => values.push(d),
                    Err(Error::DegenerateDenominator { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            if let Ok(inst) = construct_weat_extremal(2, &attrs.a, &attrs.b) {
                values.push(effect_size(&inst)?);
                values.push(effect_size(&inst.swapped_targets())?);
            }
        }
        ScoreKind::DirectBias => {
            let g = attrs.bias_direction()?;
            for _ in 0..restarts {
                values.push(direct_bias_word(&gaussian_vector(&mut rng, dim), &g, 1.0)?);
            }
            values.push(direct_bias_word(&g, &g, 1.0)?);
            if let Some(w) = orthogonal_to(&g, unit_vector(&mut rng, dim)) {
                values.push(direct_bias_word(&w, &g, 1.0)?);
            }
        }
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Extrema {
        min,
        max,
        attribute_difference_norm: range,
        evaluations: values.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparabilityReport {
    pub kind: ScoreKind,
    pub config: ProbeConfig,
    pub trials: Vec<Extrema>,
    /// `(lowest, highest)` per-draw maximum.
    pub max_range: (f64, f64),
    /// `(lowest, highest)` per-draw minimum.
    pub min_range: (f64, f64),
    /// Whether the per-draw extremes agree across draws within 1e-6.
    pub comparable: bool,
    /// For Direct Bias and the effect size: whether every draw reached the
    /// attribute-independent extremes within 1e-6.
    pub attains_expected: Option<bool>,
    pub witnesses: Vec<BiasWitness>,
}

/// Agreement threshold for per-draw extremes.
pub const EXTREMA_AGREEMENT: f64 = 1e-6;

/// Draws `cfg.trials` attribute configurations and reports the empirical
/// extremes of `kind` for each.
pub fn comparability_probe(kind: ScoreKind, cfg: &ProbeConfig) -> Result<ComparabilityReport> {
    let mut trials = Vec::with_capacity(cfg.trials);
    let mut witnesses = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = keyed_rng(cfg.seed, trial as u64);
        let attrs = AttributeDraw::random(&mut rng, cfg.dimension);
        let inner_seed: u64 = rng.random();
        let ext = score_extrema(kind, &attrs, EXTREMA_RESTARTS, inner_seed)?;
        if witnesses.len() < MAX_STORED_WITNESSES {
            if let Some(w) = extremal_witness(kind, &attrs, cfg.tolerance)? {
                witnesses.push(w);
            }
        }
        trials.push(ext);
    }
    let span = |f: fn(&Extrema) -> f64| {
        trials
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let max_range = span(|e| e.max);
    let min_range = span(|e| e.min);
    let comparable = max_range.1 - max_range.0 <= EXTREMA_AGREEMENT
        && min_range.1 - min_range.0 <= EXTREMA_AGREEMENT;
    let attains_expected = kind.expected_extrema().map(|(lo, hi)| {
        trials.iter().all(|e| {
            (e.min - lo).abs() <= EXTREMA_AGREEMENT && (e.max - hi).abs() <= EXTREMA_AGREEMENT
        })
    });
    Ok(ComparabilityReport {
        kind,
        config: *cfg,
        trials,
        max_range,
        min_range,
        comparable,
        attains_expected,
        witnesses,
    })
}

fn extremal_witness(
    kind: ScoreKind,
    attrs: &AttributeDraw,
    tol: f64,
) -> Result<Option<BiasWitness>> {
    match kind {
        ScoreKind::WeatIndividual => {
            let diff = sub(&normalized_mean(&attrs.a)?, &normalized_mean(&attrs.b)?);
            if norm(&diff) <= 1e-12 {
                return Ok(None);
            }
            BiasWitness::certify(
                WitnessKind::Extremal,
                "s attains the attribute-dependent extreme ‖â − b̂‖",
                Geometry::WeatTarget {
                    t: diff,
                    a: attrs.a.clone(),
                    b: attrs.b.clone(),
                },
                tol,
            )
            .map(Some)
        }
        ScoreKind::WeatEffectSize => match construct_weat_extremal(2, &attrs.a, &attrs.b) {
            Ok(inst) => BiasWitness::certify(
                WitnessKind::ComparabilityEvidence,
                "effect size attains 2 regardless of the attribute sets",
                Geometry::WeatSets {
                    x: inst.x().members().to_vec(),
                    y: inst.y().members().to_vec(),
                    a: attrs.a.clone(),
                    b: attrs.b.clone(),
                },
                tol,
            )
            .map(Some),
            Err(Error::PreconditionViolation(_)) => Ok(None),
            Err(e) => Err(e),
        },
        ScoreKind::DirectBias => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustworthinessReport {
    pub kind: ScoreKind,
    pub config: ProbeConfig,
    /// Configurations scored.
    pub checked: usize,
    /// Configurations skipped because the score was undefined.
    pub undefined: usize,
    /// Configurations where the score and the bias predicate disagree.
    pub violations: usize,
    pub witnesses: Vec<BiasWitness>,
}

/// Searches for configurations where the score reports no bias while the
/// bias predicate reports bias, or the reverse.
///
/// Trial 0 is the closed-form counterexample where one exists; later trials
/// alternate perturbed counterexamples and random draws.
pub fn trustworthiness_probe(kind: ScoreKind, cfg: &ProbeConfig) -> Result<TrustworthinessReport> {
    let mut report = TrustworthinessReport {
        kind,
        config: *cfg,
        checked: 0,
        undefined: 0,
        violations: 0,
        witnesses: Vec::new(),
    };
    let tol = cfg.tolerance;
    for trial in 0..cfg.trials {
        let mut rng = keyed_rng(cfg.seed, trial as u64);
        let candidates: Vec<(Geometry, &'static str)> = match kind {
            ScoreKind::WeatIndividual => {
                let attrs = AttributeDraw::random(&mut rng, cfg.dimension);
                let mut t = gaussian_vector(&mut rng, cfg.dimension);
                if trial % 2 == 1 {
                    // push the target onto the zero set of s
                    let diff = sub(&normalized_mean(&attrs.a)?, &normalized_mean(&attrs.b)?);
                    if let Some(w) = orthogonal_to(&diff, t.clone()) {
                        t = w;
                    }
                }
                vec![(
                    Geometry::WeatTarget {
                        t,
                        a: attrs.a,
                        b: attrs.b,
                    },
                    "s disagrees with the individual bias predicate",
                )]
            }
            ScoreKind::WeatEffectSize => {
                let inst = if trial == 0 {
                    construct_weat_zero_bias(cfg.dimension)?.0
                } else if trial % 2 == 1 {
                    construct_weat_zero_bias_perturbed(cfg.dimension, 0.01, &mut rng)?.0
                } else {
                    {
                        let attrs = AttributeDraw::random(&mut rng, cfg.dimension);
                        let m = rng.random_range(1..=4);
                        let x = (0..m)
                            .map(|_| gaussian_vector(&mut rng, cfg.dimension))
                            .collect();
                        let y = (0..m)
                            .map(|_| gaussian_vector(&mut rng, cfg.dimension))
                            .collect();
                        WeatInstance::from_vectors(x, y, attrs.a, attrs.b)?
                    }
                };
                vec![(
                    Geometry::WeatSets {
                        x: inst.x().members().to_vec(),
                        y: inst.y().members().to_vec(),
                        a: inst.a().to_vec(),
                        b: inst.b().to_vec(),
                    },
                    "effect size is 0 while targets are associated with one group",
                )]
            }
            ScoreKind::DirectBias => {
                let geometry = if trial % 2 == 0 {
                    let (r, x) = if trial == 0 {
                        (2.0, 1.0)
                    } else {
                        (rng.random_range(1.05..4.0), rng.random_range(0.2..3.0))
                    };
                    let ce = construct_direct_bias_counterexample(r, x, cfg.dimension)?;
                    Geometry::DirectBias {
                        pairs: ce.pairs,
                        probes: vec![ce.neutral_probe, ce.separating_probe],
                        strictness: 1.0,
                    }
                } else {
                    let attrs = AttributeDraw::random(&mut rng, cfg.dimension);
                    let probes = (0..4)
                        .map(|_| gaussian_vector(&mut rng, cfg.dimension))
                        .collect();
                    Geometry::DirectBias {
                        pairs: attrs.pairs(),
                        probes,
                        strictness: 1.0,
                    }
                };
                vec![(
                    geometry,
                    "Direct Bias disagrees with the individual bias predicate",
                )]
            }
        };

        for (geometry, description) in candidates {
            match violates(&geometry, tol) {
                Ok(false) => report.checked += 1,
                Ok(true) => {
                    report.checked += 1;
                    report.violations += 1;
                    if report.witnesses.len() < MAX_STORED_WITNESSES {
                        report.witnesses.push(BiasWitness::certify(
                            WitnessKind::TrustworthinessViolation,
                            format!("trial {trial}: {description}"),
                            geometry,
                            tol,
                        )?);
                    }
                }
                Err(Error::DegenerateDenominator { .. }) | Err(Error::DegenerateInput(_)) => {
                    report.undefined += 1
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

/// Whether the score's "no bias" verdict disagrees with the bias predicate.
fn violates(geometry: &Geometry, tol: f64) -> Result<bool> {
    match geometry {
        Geometry::WeatTarget { t, a, b } => {
            let s = association_diff(t, a, b)?;
            let groups = AttributeGroups::pair(a.clone(), b.clone())?;
            let ind = individual_bias(t, &groups, tol)?;
            Ok((s.abs() <= tol) != !ind.biased)
        }
        Geometry::WeatSets { x, y, a, b } => {
            let inst = WeatInstance::from_vectors(x.clone(), y.clone(), a.clone(), b.clone())?;
            let d = effect_size(&inst)?;
            let pooled: Vec<Vec<f64>> = x.iter().chain(y).cloned().collect();
            let groups = AttributeGroups::pair(a.clone(), b.clone())?;
            let agg = aggregated_bias(&TargetSet::new("X ∪ Y", pooled)?, &groups, tol)?;
            Ok((d.abs() <= tol) != !agg.is_biased())
        }
        Geometry::DirectBias {
            pairs,
            probes,
            strictness,
        } => {
            let family = DefiningSetFamily::from_pairs(pairs.clone())?;
            let g = pca(&centered_samples(&family), 1)?.first().to_vec();
            let (a, c): (Vec<_>, Vec<_>) = pairs.iter().cloned().unzip();
            let groups = AttributeGroups::pair(a, c)?;
            for p in probes {
                let db = direct_bias_word(p, &g, *strictness)?;
                let ind = individual_bias(p, &groups, tol)?;
                if (db <= tol) != !ind.biased {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Geometry::Lemma { .. } => Err(Error::InvalidParameter(
            "lemma geometries carry no bias score".into(),
        )),
    }
}

/// Attribute sets `{a}`, `{b}` in `dim` dimensions with `‖a − b‖ = target`
/// (`0 < target < 2`), rotated by a random orthogonal frame from `rng`.
pub fn attributes_with_difference_norm<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    target: f64,
) -> Result<AttributeDraw> {
    if target.is_nan() || target <= 0.0 || target >= 2.0 || dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "difference norm {target} must lie in (0, 2) with dim ≥ 2"
        )));
    }
    // unit vectors at angle θ have ‖a − b‖ = 2 sin(θ/2)
    let theta = 2.0 * libm::asin(target / 2.0);
    let e1 = unit_vector(rng, dim);
    let e2 = normalize(
        &orthogonal_to(&e1, unit_vector(rng, dim))
            .ok_or_else(|| Error::DegenerateInput("failed to draw an orthogonal frame".into()))?,
    )?;
    let a = e1.clone();
    let b: Vec<f64> = e1
        .iter()
        .zip(&e2)
        .map(|(x, y)| libm::cos(theta) * x + libm::sin(theta) * y)
        .collect();
    AttributeDraw::new(vec![a], vec![b])
}
