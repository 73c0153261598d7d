//! Convolution algebras over relational groupoids and ordinary groupoids.
//!
//! Functions on a finite carrier are dense vectors of complex numbers with
//! exact rational parts, indexed like the carrier. On a finite discrete
//! carrier every such function is admissible, so there is no admissibility
//! check. The relational convolution weights products over composable-pair
//! fibers:
//!
//! ```text
//! (f1 ⋆ f2)(g) = Σ_{(h,k) ∈ fiber(g)} f1(h) · f2(k) · μ_g(h, k)
//! ```
//!
//! It is bilinear but not associative in general; associativity holds for
//! strongly split systems and is checked here by an exhaustive delta-basis
//! scan, which is complete by bilinearity. The module also provides the
//! groupoid convolution, the `L2`-invariant subalgebra with its reduction
//! to the quotient groupoid algebra, and the vanishing ideal of the
//! constraint set.

use std::collections::BTreeMap;

use num::{One, Zero};
use thiserror::Error;

use crate::exec;
use crate::groupoid::RelationalGroupoid;
use crate::haar::{
    induced_quotient_haar, HaarError, Measure, RelationalHaarSystem, RightHaarSystem,
};
use crate::reduction::QuotientData;
use crate::scalar::{conj, CRat, Rat};
use crate::table::GroupoidTable;

/// A function on a carrier: one complex value per element.
pub type AlgebraElement = Vec<CRat>;

/// Errors from algebra operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvolutionError {
    #[error("function has {got} values, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("function is not constant on the class of {element}")]
    NotInvariant { element: usize },
    #[error("no marginal given for class [{class}]")]
    MissingMarginal { class: usize },
    #[error(transparent)]
    Haar(#[from] HaarError),
}

fn check_len(f: &[CRat], expected: usize) -> Result<(), ConvolutionError> {
    if f.len() == expected {
        Ok(())
    } else {
        Err(ConvolutionError::Length { got: f.len(), expected })
    }
}

/// The delta basis function at `g` on a carrier of `n` elements.
pub fn delta(n: usize, g: usize) -> AlgebraElement {
    let mut f = vec![CRat::zero(); n];
    f[g] = CRat::one();
    f
}

/// Relational convolution with respect to a relational Haar system. The
/// result always vanishes off the constraint set, because fibers of
/// unconstrained elements are empty.
pub fn convolve(
    g: &RelationalGroupoid,
    sys: &RelationalHaarSystem,
    f1: &[CRat],
    f2: &[CRat],
) -> Result<AlgebraElement, ConvolutionError> {
    check_len(f1, g.len())?;
    check_len(f2, g.len())?;
    Ok(exec::map_indexed(g.len(), |gamma| {
        sys.measure(gamma)
            .support()
            .map(|(&(h, k), w)| f1[h].clone() * f2[k].clone() * w.clone())
            .fold(CRat::zero(), |a, t| a + t)
    }))
}

/// Groupoid convolution with respect to a right Haar system:
/// `(f1 ⋆ f2)(γ) = Σ_{η ∈ G_s(γ)} f1(γ∘η⁻¹) · f2(η) · μ_s(γ)(η)`.
pub fn convolve_groupoid(
    table: &GroupoidTable,
    sys: &RightHaarSystem,
    f1: &[CRat],
    f2: &[CRat],
) -> Result<AlgebraElement, ConvolutionError> {
    let n = table.morphisms().len();
    check_len(f1, n)?;
    check_len(f2, n)?;
    Ok(exec::map_indexed(n, |gamma| {
        let x = table.source(gamma);
        table
            .source_fiber(x)
            .into_iter()
            .map(|eta| {
                let h = table
                    .compose(gamma, table.inverse(eta))
                    .expect("γ∘η⁻¹ is defined because t(η⁻¹) = s(γ)");
                f1[h].clone() * f2[eta].clone() * sys.measure(x).weight(&eta)
            })
            .fold(CRat::zero(), |a, t| a + t)
    }))
}

/// The ⋆-involution of the groupoid algebra: `f*(γ) = conj(f(γ⁻¹))`.
pub fn involution(table: &GroupoidTable, f: &[CRat]) -> Result<AlgebraElement, ConvolutionError> {
    let n = table.morphisms().len();
    check_len(f, n)?;
    Ok((0..n).map(|gamma| conj(&f[table.inverse(gamma)])).collect())
}

/// Exhaustive associativity check of the relational convolution over the
/// delta basis, complete by bilinearity. Returns the first triple
/// `(a, b, c)` in lexicographic order with `(δa⋆δb)⋆δc ≠ δa⋆(δb⋆δc)`.
///
/// Only real weights enter delta products, so the scan runs in rational
/// arithmetic: `(δa⋆δb)(h) = μ_h(a, b)`, hence
/// `((δa⋆δb)⋆δc)(γ) = Σ_h μ_h(a, b) · μ_γ(h, c)` and symmetrically on the
/// right.
pub fn check_associativity(
    g: &RelationalGroupoid,
    sys: &RelationalHaarSystem,
) -> Result<(), (usize, usize, usize)> {
    let n = g.len();
    let found = exec::first_failure(n, |a| {
        for b in 0..n {
            let left_deltas: Vec<(usize, Rat)> = g
                .set_product(a, b)
                .into_iter()
                .map(|h| (h, sys.measure(h).weight(&(a, b))))
                .collect();
            for c in 0..n {
                let right_deltas: Vec<(usize, Rat)> = g
                    .set_product(b, c)
                    .into_iter()
                    .map(|k| (k, sys.measure(k).weight(&(b, c))))
                    .collect();
                for &gamma in g.constraint_elements() {
                    let m = sys.measure(gamma);
                    let lhs = left_deltas
                        .iter()
                        .map(|(h, w)| w * m.weight(&(*h, c)))
                        .fold(Rat::zero(), |s, t| s + t);
                    let rhs = right_deltas
                        .iter()
                        .map(|(k, w)| w * m.weight(&(a, *k)))
                        .fold(Rat::zero(), |s, t| s + t);
                    if lhs != rhs {
                        return Some((b, c));
                    }
                }
            }
        }
        None
    });
    match found {
        None => Ok(()),
        Some((a, (b, c))) => Err((a, b, c)),
    }
}

/// Exhaustive associativity check of the groupoid convolution over the
/// delta basis. Groupoid convolution is always associative; this scan
/// verifies it mechanically on small tables.
pub fn check_associativity_groupoid(
    table: &GroupoidTable,
    sys: &RightHaarSystem,
) -> Result<(), (usize, usize, usize)> {
    let n = table.morphisms().len();
    for a in 0..n {
        for b in 0..n {
            let ab = convolve_groupoid(table, sys, &delta(n, a), &delta(n, b))
                .expect("delta functions have the right length");
            for c in 0..n {
                let bc = convolve_groupoid(table, sys, &delta(n, b), &delta(n, c)).unwrap();
                let lhs = convolve_groupoid(table, sys, &ab, &delta(n, c)).unwrap();
                let rhs = convolve_groupoid(table, sys, &delta(n, a), &bc).unwrap();
                if lhs != rhs {
                    return Err((a, b, c));
                }
            }
        }
    }
    Ok(())
}

/// True iff `f` is constant on `L2`-classes.
pub fn is_l2_invariant_fn(
    g: &RelationalGroupoid,
    f: &[CRat],
) -> Result<bool, ConvolutionError> {
    check_len(f, g.len())?;
    Ok(g.l2().tuples().all(|t| f[t[0]] == f[t[1]]))
}

/// Verifies the reduction identity for `L2`-invariant functions: the
/// relational convolution agrees with the pullback of the quotient
/// convolution of the pushed-forward functions on `C`, and vanishes off
/// `C`.
pub fn check_l2conv_lemma(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    sys: &RelationalHaarSystem,
    f1: &[CRat],
    f2: &[CRat],
) -> Result<bool, ConvolutionError> {
    let reduction = reduce_algebra(g, qd);
    let fq1 = reduction.phi(f1)?;
    let fq2 = reduction.phi(f2)?;
    let lhs = convolve(g, sys, f1, f2)?;
    let induced = induced_quotient_haar(qd, sys)?;
    let product = convolve_groupoid(qd.quotient(), &induced, &fq1, &fq2)?;
    Ok((0..g.len()).all(|e| match qd.class_of(e) {
        Some(c) => lhs[e] == product[c],
        None => lhs[e].is_zero(),
    }))
}

/// The reduction of the algebra over a relational groupoid: restriction
/// to the constraint set (the quotient by the vanishing ideal), the
/// `L2`-invariant basis, and the isomorphism onto the quotient groupoid's
/// algebra.
pub struct AlgebraReduction<'a> {
    g: &'a RelationalGroupoid,
    qd: &'a QuotientData,
}

/// Bundles the restriction map, the invariant basis, and `Φ`.
pub fn reduce_algebra<'a>(
    g: &'a RelationalGroupoid,
    qd: &'a QuotientData,
) -> AlgebraReduction<'a> {
    AlgebraReduction { g, qd }
}

impl AlgebraReduction<'_> {
    /// Restriction to the constraint set: values off `C` are set to zero.
    /// This realizes the quotient of the algebra by the vanishing ideal.
    pub fn restrict(&self, f: &[CRat]) -> Result<AlgebraElement, ConvolutionError> {
        check_len(f, self.g.len())?;
        Ok(f.iter()
            .enumerate()
            .map(|(e, v)| {
                if self.g.in_constraint(e) {
                    v.clone()
                } else {
                    CRat::zero()
                }
            })
            .collect())
    }

    /// The `L2`-invariant basis: one class indicator per quotient element.
    pub fn invariant_basis(&self) -> Vec<AlgebraElement> {
        self.qd
            .classes()
            .iter()
            .map(|members| {
                let mut f = vec![CRat::zero(); self.g.len()];
                for &m in members {
                    f[m] = CRat::one();
                }
                f
            })
            .collect()
    }

    /// `Φ`: an `L2`-invariant function descends to the quotient,
    /// `Φ(f)(q(g)) = f(g)`. Values off `C` are ignored (they lie in the
    /// vanishing ideal). Errors when `f` is not constant on some class.
    pub fn phi(&self, f: &[CRat]) -> Result<Vec<CRat>, ConvolutionError> {
        check_len(f, self.g.len())?;
        self.qd
            .classes()
            .iter()
            .map(|members| {
                let value = f[members[0]].clone();
                match members.iter().find(|&&m| f[m] != value) {
                    Some(&m) => Err(ConvolutionError::NotInvariant { element: m }),
                    None => Ok(value),
                }
            })
            .collect()
    }

    /// `Φ⁻¹`: pulls a function on the quotient back to the invariant
    /// subspace, zero off `C`.
    pub fn phi_inverse(&self, fq: &[CRat]) -> Result<AlgebraElement, ConvolutionError> {
        check_len(fq, self.qd.classes().len())?;
        Ok((0..self.g.len())
            .map(|e| match self.qd.class_of(e) {
                Some(c) => fq[c].clone(),
                None => CRat::zero(),
            })
            .collect())
    }
}

/// The extension of the pushforward to all functions via strongly split
/// marginals: `q_*(f)(ḡ) = Σ_{g ∈ ḡ} f(g) · τ_ḡ(g)`. On invariant
/// functions this agrees with `Φ` because each `τ_ḡ` is a probability
/// measure.
pub fn pushforward_function(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    tau: &BTreeMap<usize, Measure<usize>>,
    f: &[CRat],
) -> Result<Vec<CRat>, ConvolutionError> {
    check_len(f, g.len())?;
    qd.classes()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let t = tau
                .get(&c)
                .ok_or(ConvolutionError::MissingMarginal { class: c })?;
            Ok(members
                .iter()
                .map(|&m| f[m].clone() * t.weight(&m))
                .fold(CRat::zero(), |a, v| a + v))
        })
        .collect()
}

/// Verifies that functions vanishing on `C` form a two-sided ideal, by
/// scanning the delta basis: for every `x ∉ C` and every `y`, both
/// `δx⋆δy` and `δy⋆δx` vanish on `C`. Complete by bilinearity. Returns
/// the first failing pair `(x, y)`.
pub fn verify_ideal(
    g: &RelationalGroupoid,
    sys: &RelationalHaarSystem,
) -> Result<(), (usize, usize)> {
    for x in 0..g.len() {
        if g.in_constraint(x) {
            continue;
        }
        for y in 0..g.len() {
            for &gamma in g.constraint_elements() {
                let m = sys.measure(gamma);
                if !m.weight(&(x, y)).is_zero() || !m.weight(&(y, x)).is_zero() {
                    return Err((x, y));
                }
            }
        }
    }
    Ok(())
}
