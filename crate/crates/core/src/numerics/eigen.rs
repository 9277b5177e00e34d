//! Dense symmetric generalized eigensolver for problems of the form
//! `stiffness * v = E * mass * v` with a diagonal positive mass matrix.
//!
//! The diagonal mass reduces the problem to a standard symmetric one,
//! `B = M^{-1/2} K M^{-1/2}`, whose unit eigenvectors map back to
//! mass-orthonormal generalized eigenvectors.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// A discretized generalized eigenproblem.
#[derive(Debug, Clone)]
pub struct EigenProblem {
    stiffness: DMatrix<f64>,
    mass: DVector<f64>,
    /// Number of grid points (matrix dimension).
    pub grid_size: usize,
    /// Period of the underlying domain, carried for provenance.
    pub period: f64,
}

impl EigenProblem {
    /// Validates symmetry of the stiffness matrix (within 1e-12 of its
    /// largest entry) and positivity of the mass diagonal.
    pub fn new(stiffness: DMatrix<f64>, mass: DVector<f64>, period: f64) -> Result<Self> {
        let n = stiffness.nrows();
        if stiffness.ncols() != n || mass.len() != n || n == 0 {
            return Err(Error::Eigen {
                reason: format!(
                    "dimension mismatch: stiffness {}x{}, mass {}",
                    stiffness.nrows(),
                    stiffness.ncols(),
                    mass.len()
                ),
            });
        }
        let scale = stiffness.amax().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (stiffness[(i, j)] - stiffness[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Eigen {
                        reason: format!("stiffness not symmetric at ({i}, {j})"),
                    });
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| !(mass[i] > 0.0)) {
            return Err(Error::Eigen {
                reason: format!("mass diagonal entry {i} = {} not positive", mass[i]),
            });
        }
        Ok(EigenProblem {
            stiffness,
            mass,
            grid_size: n,
            period,
        })
    }

    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    pub fn mass(&self) -> &DVector<f64> {
        &self.mass
    }
}

/// One generalized eigenpair; `vector` is mass-normalized (`v^T M v = 1`).
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: DVector<f64>,
}

/// Flip each vector so its largest-magnitude component is positive. Makes
/// eigenvector signs reproducible across runs and solver versions.
fn canonicalize_sign(v: &mut DVector<f64>) {
    let mut lead = 0.0_f64;
    for &x in v.iter() {
        if x.abs() > lead.abs() {
            lead = x;
        }
    }
    if lead < 0.0 {
        *v *= -1.0;
    }
}

/// Lowest `k` eigenpairs of `stiffness * v = E * mass * v`, ascending.
///
/// Degenerate eigenvalues come back in a stable order: within a cluster of
/// numerically equal values, vectors are sorted by descending value at the
/// grid origin (after sign canonicalization), putting cosine-like modes
/// before their sine-like partners.
pub fn generalized_eigs(prob: &EigenProblem, k: usize) -> Result<Vec<EigenPair>> {
    let n = prob.grid_size;
    if k == 0 || k > n {
        return Err(Error::Eigen {
            reason: format!("requested k = {k} of an {n}-dimensional problem"),
        });
    }

    let inv_sqrt_m: Vec<f64> = prob.mass.iter().map(|&m| 1.0 / m.sqrt()).collect();
    let mut b = prob.stiffness.clone();
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] *= inv_sqrt_m[i] * inv_sqrt_m[j];
        }
    }
    // Scrub rounding asymmetry before handing to the symmetric solver.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (b[(i, j)] + b[(j, i)]);
            b[(i, j)] = avg;
            b[(j, i)] = avg;
        }
    }

    let decomp = b.symmetric_eigen();
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|j| {
            let mut v = DVector::from_iterator(
                n,
                decomp
                    .eigenvectors
                    .column(j)
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| w * inv_sqrt_m[i]),
            );
            // Mass-normalize: unit w gives v^T M v = 1 up to rounding.
            let norm2: f64 = v.iter().zip(prob.mass.iter()).map(|(x, m)| x * x * m).sum();
            v /= norm2.sqrt();
            canonicalize_sign(&mut v);
            EigenPair {
                value: decomp.eigenvalues[j],
                vector: v,
            }
        })
        .collect();

    if pairs.iter().any(|p| !p.value.is_finite()) {
        return Err(Error::Eigen {
            reason: "solver produced non-finite eigenvalues".into(),
        });
    }

    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    pairs.truncate(k);

    // Stable order inside degenerate clusters.
    let tie_tol = |v: f64| 1e-8 * v.abs().max(1.0);
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len()
            && (pairs[end].value - pairs[start].value).abs() <= tie_tol(pairs[start].value)
        {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| {
                for (x, y) in a.vector.iter().zip(b.vector.iter()) {
                    if (x - y).abs() > 1e-9 {
                        return y.total_cmp(x);
                    }
                }
                std::cmp::Ordering::Equal
            });
        }
        start = end;
    }

    Ok(pairs)
}
