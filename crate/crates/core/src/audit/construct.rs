//! Closed-form geometries where a score attains its extremes or reports no
//! bias for biased embeddings.
//!
//! Two-dimensional constructions are embedded into higher dimensions by
//! zero-padding, which preserves every dot product involved.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::audit::witness::{BiasWitness, Geometry, WitnessKind};
use crate::rng::gaussian_vector;
use crate::subspace::DefiningSetFamily;
use crate::vector::{dot, norm, normalize, normalized_mean, scale, sub, zero_pad};
use crate::weat::WeatInstance;
use crate::{Error, Result};

const INV_SQRT2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Targets `t1, t2 | t3, t4` and attributes `a | b` for the zero effect size
/// construction, padded to `dim`.
fn zero_bias_vectors(dim: usize) -> [Vec<f64>; 6] {
    let p = |v: [f64; 2]| zero_pad(&v, dim);
    [
        p([1.0, 0.0]),               // t1: s = 1
        p([INV_SQRT2, INV_SQRT2]),   // t2: s = 0
        p([0.0, -1.0]),              // t3: s = 1, t1 − t3 ⟂ a − b
        p([-INV_SQRT2, -INV_SQRT2]), // t4: s = 0
        p([1.0, 0.0]),               // a
        p([0.0, 1.0]),               // b
    ]
}

/// Four targets whose effect size is 0 although `t1` and `t3` are clearly
/// biased: `s(t1, A, B) = s(t3, A, B) = 1` because `t1 − t3 ⟂ a − b`, and
/// `s(t2, A, B) = s(t4, A, B) = 0`.
pub fn construct_weat_zero_bias(dim: usize) -> Result<(WeatInstance, BiasWitness)> {
    if dim < 2 {
        return Err(Error::InvalidParameter("construction needs dim ≥ 2".into()));
    }
    let [t1, t2, t3, t4, a, b] = zero_bias_vectors(dim);
    zero_bias_from_parts(vec![t1, t2], vec![t3, t4], vec![a], vec![b])
}

/// The zero effect size construction with `t2` perturbed by relative noise
/// of size `magnitude`. `t4` is re-derived as the reflection of `t2` about
/// the axis `â − b̂`, which keeps `s(t4, A, B) = s(t2, A, B)`.
pub fn construct_weat_zero_bias_perturbed<R: Rng + ?Sized>(
    dim: usize,
    magnitude: f64,
    rng: &mut R,
) -> Result<(WeatInstance, BiasWitness)> {
    if dim < 2 {
        return Err(Error::InvalidParameter("construction needs dim ≥ 2".into()));
    }
    let [t1, t2, t3, _, a, b] = zero_bias_vectors(dim);
    let noise = gaussian_vector(rng, dim);
    let noise_norm = norm(&noise);
    let t2: Vec<f64> = t2
        .iter()
        .zip(&noise)
        .map(|(x, e)| x + magnitude * e / noise_norm)
        .collect();
    let axis = normalize(&sub(
        &normalized_mean(core::slice::from_ref(&a))?,
        &normalized_mean(core::slice::from_ref(&b))?,
    ))?;
    let along = dot(&t2, &axis);
    let t4: Vec<f64> = axis
        .iter()
        .zip(&t2)
        .map(|(u, t)| 2.0 * along * u - t)
        .collect();
    zero_bias_from_parts(vec![t1, t2], vec![t3, t4], vec![a], vec![b])
}

fn zero_bias_from_parts(
    x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
) -> Result<(WeatInstance, BiasWitness)> {
    let inst = WeatInstance::from_vectors(x.clone(), y.clone(), a.clone(), b.clone())?;
    let witness = BiasWitness::certify(
        WitnessKind::TrustworthinessViolation,
        "effect size is 0 while targets are associated with one group",
        Geometry::WeatSets { x, y, a, b },
        crate::audit::DEFAULT_TOLERANCE,
    )?;
    Ok((inst, witness))
}

/// `m` copies of `x = â − b̂` against `m` copies of `−x`. The effect size is
/// exactly 2 for any attribute sets with `â ≠ b̂` and nonzero means.
pub fn construct_weat_extremal(m: usize, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<WeatInstance> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    let ma = normalized_mean(a)?;
    let mb = normalized_mean(b)?;
    if norm(&ma) <= 1e-12 || norm(&mb) <= 1e-12 {
        return Err(Error::PreconditionViolation(
            "normalized attribute mean is zero".into(),
        ));
    }
    let x = sub(&ma, &mb);
    if norm(&x) <= 1e-12 {
        return Err(Error::PreconditionViolation(
            "normalized attribute means coincide".into(),
        ));
    }
    let neg = scale(&x, -1.0);
    WeatInstance::from_vectors(vec![x; m], vec![neg; m], a.to_vec(), b.to_vec())
}

/// Defining pairs `(a_1, c_1) = ((−x, rx), (x, −rx))` and
/// `(a_2, c_2) = ((−x, −rx), (x, rx))`.
pub fn direct_bias_pairs(r: f64, x: f64) -> Vec<(Vec<f64>, Vec<f64>)> {
    vec![
        (vec![-x, r * x], vec![x, -r * x]),
        (vec![-x, -r * x], vec![x, r * x]),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectBiasCounterexample {
    pub family: DefiningSetFamily,
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
    /// Equidistant from both groups, yet scored as maximally biased.
    pub neutral_probe: Vec<f64>,
    /// Maximally group-separating, yet scored as unbiased.
    pub separating_probe: Vec<f64>,
    pub witness: BiasWitness,
}

/// Defining pairs whose first principal component is `(0, 1)` for `r > 1`,
/// padded to `dim`. The word `(0, 1)` is unbiased but scores 1; the word
/// `(1, 0)` separates the groups but scores 0.
pub fn construct_direct_bias_counterexample(
    r: f64,
    x: f64,
    dim: usize,
) -> Result<DirectBiasCounterexample> {
    if r.is_nan() || r <= 1.0 || r.is_infinite() {
        return Err(Error::PreconditionViolation(alloc::format!(
            "r must exceed 1 (got {r}); otherwise the first component is not (0, 1)"
        )));
    }
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::PreconditionViolation(alloc::format!(
            "x must be positive (got {x})"
        )));
    }
    if dim < 2 {
        return Err(Error::InvalidParameter("construction needs dim ≥ 2".into()));
    }
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = direct_bias_pairs(r, x)
        .into_iter()
        .map(|(a, c)| (zero_pad(&a, dim), zero_pad(&c, dim)))
        .collect();
    let neutral_probe = zero_pad(&[0.0, 1.0], dim);
    let separating_probe = zero_pad(&[1.0, 0.0], dim);
    let witness = BiasWitness::certify(
        WitnessKind::TrustworthinessViolation,
        "first principal component scores an equidistant word as maximally biased and a separating word as unbiased",
        Geometry::DirectBias {
            pairs: pairs.clone(),
            probes: vec![neutral_probe.clone(), separating_probe.clone()],
            strictness: 1.0,
        },
        crate::audit::DEFAULT_TOLERANCE,
    )?;
    Ok(DirectBiasCounterexample {
        family: DefiningSetFamily::from_pairs(pairs.clone())?,
        pairs,
        neutral_probe,
        separating_probe,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::predicates::individual_bias;
    use crate::directbias::direct_bias_word;
    use crate::rng::keyed_rng;
    use crate::space::AttributeGroups;
    use crate::subspace::{centered_samples, pca};
    use crate::weat::effect_size;

    #[test]
    fn zero_bias_in_two_and_fifty_dims() {
        for dim in [2, 50] {
            let (inst, w) = construct_weat_zero_bias(dim).unwrap();
            assert!(effect_size(&inst).unwrap().abs() <= 1e-9);
            let (xs, _) = inst.target_scores().unwrap();
            assert!(xs[0].abs() >= 0.1);
            let groups = AttributeGroups::pair(inst.a().to_vec(), inst.b().to_vec()).unwrap();
            assert!(
                individual_bias(&inst.x().members()[0], &groups, 1e-9)
                    .unwrap()
                    .biased
            );
            assert!(w.recheck().unwrap());
        }
        assert!(construct_weat_zero_bias(1).is_err());
    }

    #[test]
    fn perturbed_zero_bias_survives() {
        for i in 0..20 {
            let mut rng = keyed_rng(3, i);
            let (inst, w) = construct_weat_zero_bias_perturbed(5, 0.01, &mut rng).unwrap();
            assert!(effect_size(&inst).unwrap().abs() <= 1e-9);
            assert!(w.recheck().unwrap());
        }
    }

    #[test]
    fn extremal_examples() {
        let a = vec![vec![1.0, 0.0]];
        let b = vec![vec![0.0, 1.0]];
        let inst = construct_weat_extremal(1, &a, &b).unwrap();
        assert!((effect_size(&inst).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            construct_weat_extremal(1, &a, &a),
            Err(Error::PreconditionViolation(_))
        ));
        let cancel = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        assert!(matches!(
            construct_weat_extremal(2, &cancel, &[vec![0.0, 1.0], vec![0.0, 1.0]]),
            Err(Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn direct_bias_counterexample_r2() {
        let ce = construct_direct_bias_counterexample(2.0, 1.0, 2).unwrap();
        let pc = pca(&centered_samples(&ce.family), 1).unwrap();
        assert_eq!(pc.first(), &[0.0, 1.0]);
        assert_eq!(direct_bias_word(&[0.0, 1.0], pc.first(), 1.0).unwrap(), 1.0);
        assert_eq!(direct_bias_word(&[1.0, 0.0], pc.first(), 1.0).unwrap(), 0.0);
        let a = ce.witness.score("association_a_1").unwrap();
        let c = ce.witness.score("association_c_1").unwrap();
        assert!((a + 1.0 / libm::sqrt(5.0)).abs() < 1e-12);
        assert!((c - 1.0 / libm::sqrt(5.0)).abs() < 1e-12);
        assert!(ce.witness.recheck().unwrap());
    }

    #[test]
    fn direct_bias_counterexample_small_gap() {
        let ce = construct_direct_bias_counterexample(1.01, 1.0, 2).unwrap();
        let pc = pca(&centered_samples(&ce.family), 1).unwrap();
        assert!((pc.first()[1] - 1.0).abs() < 1e-12);
        // eigenvalues 4r²x² and 4x²
        assert!((pc.eigenvalues()[0] - 4.0 * 1.01 * 1.01).abs() < 1e-12);
        assert!(construct_direct_bias_counterexample(1.0, 1.0, 2).is_err());
        assert!(construct_direct_bias_counterexample(2.0, 0.0, 2).is_err());
    }
}
