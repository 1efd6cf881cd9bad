//! Bias directions and subspaces from defining sets.
//!
//! Each defining set is centered on its own mean; the centered samples feed
//! an uncentered PCA (no second, global mean removal). Component signs are
//! fixed so the largest-magnitude entry is positive.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::symmetric_eigen;
use crate::vector::{check_dim, cosine, dot, norm, normalize, sub};
use crate::{Error, Result};

/// Sets of vectors that differ only by group membership, e.g. `{he, she}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefiningSetFamily {
    sets: Vec<Vec<Vec<f64>>>,
}

impl DefiningSetFamily {
    pub fn new(sets: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let dim = sets
            .first()
            .and_then(|s| s.first())
            .ok_or(Error::EmptyInput("defining set"))?
            .len();
        for set in &sets {
            if set.is_empty() {
                return Err(Error::EmptyInput("defining set"));
            }
            for v in set {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: v.len(),
                    });
                }
            }
        }
        Ok(Self { sets })
    }

    /// One defining set per `(first, second)` pair.
    pub fn from_pairs(pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(a, b)| vec![a, b]).collect())
    }

    pub fn sets(&self) -> &[Vec<Vec<f64>>] {
        &self.sets
    }

    pub fn dim(&self) -> usize {
        self.sets[0][0].len()
    }
}

/// `w − μ_i` for every `w ∈ D_i`, with `μ_i` the raw arithmetic mean of `D_i`.
pub fn centered_samples(family: &DefiningSetFamily) -> Vec<Vec<f64>> {
    let dim = family.dim();
    let mut out = Vec::new();
    for set in family.sets() {
        let mut mu = vec![0.0; dim];
        for w in set {
            for (m, x) in mu.iter_mut().zip(w) {
                *m += x;
            }
        }
        mu.iter_mut().for_each(|m| *m /= set.len() as f64);
        out.extend(set.iter().map(|w| sub(w, &mu)));
    }
    out
}

/// First `k` principal components with their explained-variance ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasSubspace {
    components: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    explained_variance_ratios: Vec<f64>,
    sample_count: usize,
}

impl BiasSubspace {
    /// A one-dimensional subspace spanned by `direction` (normalized here).
    pub fn from_direction(direction: &[f64]) -> Result<Self> {
        Ok(Self {
            components: vec![normalize(direction)?],
            eigenvalues: vec![1.0],
            explained_variance_ratios: vec![1.0],
            sample_count: 0,
        })
    }

    /// Orthonormalizes `basis` (Gram-Schmidt, in order). Ratios are left
    /// empty since no samples are involved.
    pub fn from_basis(basis: &[Vec<f64>]) -> Result<Self> {
        let first = basis.first().ok_or(Error::EmptyInput("subspace basis"))?;
        let mut components: Vec<Vec<f64>> = Vec::new();
        for b in basis {
            check_dim(first, b)?;
            let mut v = b.clone();
            for c in &components {
                let proj = dot(&v, c);
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= proj * y);
            }
            if norm(&v) <= 1e-12 * norm(b).max(1.0) {
                return Err(Error::DegenerateInput(
                    "subspace basis is linearly dependent".into(),
                ));
            }
            components.push(normalize(&v)?);
        }
        let k = components.len();
        Ok(Self {
            components,
            eigenvalues: vec![],
            explained_variance_ratios: vec![],
            sample_count: k,
        })
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn first(&self) -> &[f64] {
        &self.components[0]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn explained_variance_ratios(&self) -> &[f64] {
        &self.explained_variance_ratios
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].len()
    }
}

/// Flips `v` so its largest-magnitude entry is positive; near-ties go to the
/// lowest index.
pub fn canonical_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(lead) = v.iter().find(|x| x.abs() >= max - 1e-12 * max) {
        if *lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Principal components of `samples`, used as given (no centering).
///
/// Components maximize `Σ_s (v·s)²` under orthonormality. The eigenproblem
/// is solved on whichever of the `d × d` scatter matrix or the `N × N` Gram
/// matrix is smaller; components beyond the sample rank are completed
/// deterministically from the standard basis and carry zero variance.
pub fn pca(samples: &[Vec<f64>], k: usize) -> Result<BiasSubspace> {
    let first = samples.first().ok_or(Error::EmptyInput("PCA samples"))?;
    let dim = first.len();
    for s in samples {
        check_dim(first, s)?;
        if s.iter().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateInput("non-finite PCA sample".into()));
        }
    }
    if k == 0 || k > dim {
        return Err(Error::InvalidParameter(alloc::format!(
            "k = {k} must lie in 1..={dim}"
        )));
    }
    let total: f64 = samples.iter().map(|s| dot(s, s)).sum();
    if total <= 0.0 {
        return Err(Error::DegenerateInput("all PCA samples are zero".into()));
    }

    let n = samples.len();
    let (values, vectors) = if dim <= n {
        let mut scatter = vec![0.0; dim * dim];
        for s in samples {
            for i in 0..dim {
                for j in i..dim {
                    scatter[i * dim + j] += s[i] * s[j];
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                scatter[i * dim + j] = scatter[j * dim + i];
            }
        }
        symmetric_eigen(&scatter, dim)
    } else {
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let g = dot(&samples[i], &samples[j]);
                gram[i * n + j] = g;
                gram[j * n + i] = g;
            }
        }
        let (values, coeffs) = symmetric_eigen(&gram, n);
        let floor = 1e-12 * values[0].abs();
        let mut vectors = Vec::new();
        let mut kept = Vec::new();
        for (lambda, u) in values.iter().zip(&coeffs) {
            if *lambda <= floor {
                break;
            }
            let mut v = vec![0.0; dim];
            for (c, s) in u.iter().zip(samples) {
                v.iter_mut().zip(s).for_each(|(x, y)| *x += c * y);
            }
            vectors.push(normalize(&v)?);
            kept.push(*lambda);
        }
        (kept, vectors)
    };

    let mut components = Vec::with_capacity(k);
    let mut eigenvalues = Vec::with_capacity(k);
    for (lambda, v) in values.into_iter().zip(vectors).take(k) {
        let mut v = v;
        canonical_sign(&mut v);
        components.push(v);
        eigenvalues.push(lambda.max(0.0));
    }
    // complete the basis past the sample rank
    let mut axis = 0;
    while components.len() < k {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        axis += 1;
        for c in &components {
            let proj = dot(&v, c);
            v.iter_mut().zip(c).for_each(|(x, y)| *x -= proj * y);
        }
        if norm(&v) > 1e-6 {
            let mut v = normalize(&v)?;
            canonical_sign(&mut v);
            components.push(v);
            eigenvalues.push(0.0);
        }
    }
    let explained_variance_ratios = eigenvalues.iter().map(|l| l / total).collect();
    Ok(BiasSubspace {
        components,
        eigenvalues,
        explained_variance_ratios,
        sample_count: n,
    })
}

/// Unit-normalized `first − second` for every two-member defining set.
pub fn pair_directions(family: &DefiningSetFamily) -> Result<Vec<Vec<f64>>> {
    family
        .sets()
        .iter()
        .enumerate()
        .map(|(i, set)| {
            if set.len() != 2 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "defining set {i} has {} members, pairs need exactly 2",
                    set.len()
                )));
            }
            normalize(&sub(&set[0], &set[1])).map_err(|_| {
                Error::DegenerateInput(alloc::format!("defining pair {i} has identical members"))
            })
        })
        .collect()
}

/// Cosine matrix of `directions`, with `extra` appended as the final
/// row and column when given. The diagonal is exactly 1.
pub fn correlation_matrix(directions: &[Vec<f64>], extra: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
    let mut all: Vec<&[f64]> = directions.iter().map(Vec::as_slice).collect();
    if let Some(e) = extra {
        all.push(e);
    }
    let n = all.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        out[i][i] = 1.0;
        for j in i + 1..n {
            let c = cosine(all[i], all[j])?;
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    Ok(out)
}
