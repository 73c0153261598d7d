//! Left regular representation and reduced norm of groupoid algebras.
//!
//! This is the only floating-point layer: exact rationals convert to
//! complex doubles at the boundary, because operator norms are irrational
//! in general. For each object `x`, a function acts on `ℒ²(G_x)` by
//! left convolution:
//!
//! ```text
//! (λ_x(f) h)(γ) = (f ⋆ h)(γ),   γ ∈ G_x,
//! ```
//!
//! whose matrix is `M[γ, η] = f(γ∘η⁻¹) · μ_x(η)`. The inner product on
//! `ℒ²(G_x)` carries the Haar weights, `⟨h1, h2⟩ = Σ_η μ_x(η) h1(η)
//! conj(h2(η))`, and the operator norm is taken in that metric. The
//! reduced norm is the supremum over objects.

use num::complex::Complex64;
use num::{ToPrimitive, Zero};
use thiserror::Error;

use crate::exec;
use crate::haar::RightHaarSystem;
use crate::scalar::CRat;
use crate::table::GroupoidTable;

/// Relative tolerance for the power iteration.
const TOLERANCE: f64 = 1e-12;
/// Iteration cap before giving up.
const MAX_ITERATIONS: usize = 10_000;

/// Errors from representation numerics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepresentationError {
    #[error("object {object} out of range (groupoid has {limit} objects)")]
    UnknownObject { object: usize, limit: usize },
    #[error("function has {got} values, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("power iteration did not converge; last estimate {last}")]
    NonConvergence { last: f64 },
}

/// The matrix of `λ_x(f)` on the source fiber of one object, together
/// with the Haar weights defining the inner product.
#[derive(Debug, Clone)]
pub struct RepMatrix {
    /// The base object.
    pub object: usize,
    /// Morphisms of `G_x` in ascending order; rows and columns are
    /// indexed by this list.
    pub basis: Vec<usize>,
    /// `matrix[i][j] = f(γ_i ∘ γ_j⁻¹) · μ_x(γ_j)`.
    pub matrix: Vec<Vec<Complex64>>,
    /// `μ_x(γ_j)` per basis column.
    pub weights: Vec<f64>,
}

fn to_c64(v: &CRat) -> Complex64 {
    Complex64::new(
        v.re.to_f64().unwrap_or(f64::NAN),
        v.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Builds the left regular representation matrix of `f` at object `x`.
pub fn left_regular(
    table: &GroupoidTable,
    sys: &RightHaarSystem,
    f: &[CRat],
    x: usize,
) -> Result<RepMatrix, RepresentationError> {
    let objects = table.objects().len();
    if x >= objects {
        return Err(RepresentationError::UnknownObject { object: x, limit: objects });
    }
    let n = table.morphisms().len();
    if f.len() != n {
        return Err(RepresentationError::Length { got: f.len(), expected: n });
    }
    let basis = table.source_fiber(x);
    let weights: Vec<f64> = basis
        .iter()
        .map(|&eta| sys.measure(x).weight(&eta).to_f64().unwrap_or(f64::NAN))
        .collect();
    let matrix = basis
        .iter()
        .map(|&gamma| {
            basis
                .iter()
                .zip(&weights)
                .map(|(&eta, &w)| match table.compose(gamma, table.inverse(eta)) {
                    Some(h) => to_c64(&f[h]) * w,
                    None => Complex64::zero(),
                })
                .collect()
        })
        .collect();
    Ok(RepMatrix { object: x, basis, matrix, weights })
}

/// The operator norm of a representation matrix in the weighted metric:
/// the spectral norm of `D^{1/2} M D^{-1/2}` on the positive-weight
/// coordinates, computed by power iteration on `Ã*Ã`.
pub fn operator_norm(m: &RepMatrix) -> Result<f64, RepresentationError> {
    let support: Vec<usize> = (0..m.weights.len())
        .filter(|&j| m.weights[j] > 0.0)
        .collect();
    let k = support.len();
    if k == 0 {
        return Ok(0.0);
    }
    let scaled: Vec<Vec<Complex64>> = support
        .iter()
        .map(|&p| {
            support
                .iter()
                .map(|&q| {
                    m.matrix[p][q] * (m.weights[p].sqrt() / m.weights[q].sqrt())
                })
                .collect()
        })
        .collect();
    // Gram matrix Ã*Ã: positive semidefinite, largest eigenvalue = norm².
    let gram: Vec<Vec<Complex64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    (0..k)
                        .map(|l| scaled[l][i].conj() * scaled[l][j])
                        .sum::<Complex64>()
                })
                .collect()
        })
        .collect();

    // Deterministic start vector, mildly perturbed so it is not
    // orthogonal to the top eigenspace by accident.
    let mut v: Vec<Complex64> = (0..k)
        .map(|j| Complex64::new(1.0 + 1e-3 * (j as f64 + 1.0), 0.0))
        .collect();
    let norm2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = norm2(&v);
    for z in &mut v {
        *z /= scale;
    }
    let mut last = 0.0f64;
    for _ in 0..MAX_ITERATIONS {
        let next: Vec<Complex64> = (0..k)
            .map(|i| (0..k).map(|j| gram[i][j] * v[j]).sum())
            .collect();
        let lambda = norm2(&next);
        if lambda <= f64::MIN_POSITIVE {
            return Ok(0.0);
        }
        if (lambda - last).abs() <= TOLERANCE * lambda.max(1.0) {
            return Ok(lambda.sqrt());
        }
        last = lambda;
        v = next.into_iter().map(|z| z / lambda).collect();
    }
    Err(RepresentationError::NonConvergence { last: last.sqrt() })
}

/// The reduced norm of `f`: the maximum of the operator norms of
/// `λ_x(f)` over all objects.
pub fn reduced_norm(
    table: &GroupoidTable,
    sys: &RightHaarSystem,
    f: &[CRat],
) -> Result<f64, RepresentationError> {
    let per_object = exec::map_indexed(table.objects().len(), |x| {
        left_regular(table, sys, f, x).and_then(|m| operator_norm(&m))
    });
    per_object
        .into_iter()
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::{convolve_groupoid, delta, involution};
    use crate::generators;
    use crate::rel::FiniteSet;
    use crate::scalar::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z2_half() -> (GroupoidTable, RightHaarSystem) {
        let table = generators::cyclic_table(2).unwrap();
        let sys = RightHaarSystem::normalized_counting(&table).unwrap();
        (table, sys)
    }

    fn pair3_counting() -> (GroupoidTable, RightHaarSystem) {
        let table = GroupoidTable::pair_groupoid(&FiniteSet::of_size(3).unwrap()).unwrap();
        let sys = RightHaarSystem::normalized_counting(&table).unwrap();
        (table, sys)
    }

    fn random_fn(rng: &mut ChaCha8Rng, n: usize) -> Vec<CRat> {
        (0..n)
            .map(|_| {
                CRat::new(
                    rat(rng.gen_range(-4..=4), rng.gen_range(1..=4)),
                    rat(rng.gen_range(-4..=4), rng.gen_range(1..=4)),
                )
            })
            .collect()
    }

    #[test]
    fn unit_deltas_represent_as_scaled_identities() {
        let (z2, half) = z2_half();
        let m = left_regular(&z2, &half, &delta(2, 0), 0).unwrap();
        assert_eq!(m.basis, vec![0, 1]);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 0.5 } else { 0.0 };
                assert!((m.matrix[i][j] - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }

        let zero = left_regular(&z2, &half, &[CRat::zero(), CRat::zero()], 0).unwrap();
        assert!(zero.matrix.iter().flatten().all(|z| z.norm() == 0.0));
        assert_eq!(operator_norm(&zero).unwrap(), 0.0);
    }

    #[test]
    fn representation_is_multiplicative() {
        for (table, sys) in [z2_half(), pair3_counting()] {
            let n = table.morphisms().len();
            for a in 0..n {
                for b in 0..n {
                    let product =
                        convolve_groupoid(&table, &sys, &delta(n, a), &delta(n, b)).unwrap();
                    for x in 0..table.objects().len() {
                        let ma = left_regular(&table, &sys, &delta(n, a), x).unwrap();
                        let mb = left_regular(&table, &sys, &delta(n, b), x).unwrap();
                        let mp = left_regular(&table, &sys, &product, x).unwrap();
                        let k = ma.basis.len();
                        for i in 0..k {
                            for j in 0..k {
                                let composed: Complex64 =
                                    (0..k).map(|l| ma.matrix[i][l] * mb.matrix[l][j]).sum();
                                assert!(
                                    (composed - mp.matrix[i][j]).norm() <= 1e-12,
                                    "entry ({i},{j}) differs at object {x}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn the_unit_delta_on_z2_has_norm_one_half() {
        let (z2, half) = z2_half();
        let norm = reduced_norm(&z2, &half, &delta(2, 0)).unwrap();
        assert!((norm - 0.5).abs() < 1e-12, "norm was {norm}");
    }

    #[test]
    fn the_reduced_norm_satisfies_cstar_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (table, sys) in [z2_half(), pair3_counting()] {
            let n = table.morphisms().len();
            for _ in 0..50 {
                let f = random_fn(&mut rng, n);
                let star = involution(&table, &f).unwrap();
                let norm_f = reduced_norm(&table, &sys, &f).unwrap();
                let norm_star = reduced_norm(&table, &sys, &star).unwrap();
                assert!((norm_f - norm_star).abs() <= 1e-9);

                let star_f = convolve_groupoid(&table, &sys, &star, &f).unwrap();
                let norm_sf = reduced_norm(&table, &sys, &star_f).unwrap();
                assert!(
                    (norm_sf - norm_f * norm_f).abs() <= 1e-9,
                    "C*-identity off: {norm_sf} vs {}",
                    norm_f * norm_f
                );
            }
        }
    }

    #[test]
    fn the_reduced_norm_is_submultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let (table, sys) = pair3_counting();
        let n = table.morphisms().len();
        for _ in 0..20 {
            let f1 = random_fn(&mut rng, n);
            let f2 = random_fn(&mut rng, n);
            let product = convolve_groupoid(&table, &sys, &f1, &f2).unwrap();
            let lhs = reduced_norm(&table, &sys, &product).unwrap();
            let rhs = reduced_norm(&table, &sys, &f1).unwrap()
                * reduced_norm(&table, &sys, &f2).unwrap();
            assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
        }
    }

    #[test]
    fn out_of_range_objects_are_rejected() {
        let (z2, half) = z2_half();
        assert!(matches!(
            left_regular(&z2, &half, &delta(2, 0), 1),
            Err(RepresentationError::UnknownObject { object: 1, limit: 1 })
        ));
        assert!(matches!(
            left_regular(&z2, &half, &delta(3, 0), 0),
            Err(RepresentationError::Length { got: 3, expected: 2 })
        ));
    }
}
