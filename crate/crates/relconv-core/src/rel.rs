//! Finite sets and exact relations between products of finite sets.
//!
//! Everything downstream — structure relations, axiom checks, quotients,
//! fiber translations — is phrased in terms of the two types here.
//! A [`FiniteSet`] is an ordered list of distinct labels addressed by index.
//! A [`Relation`] is an extensional subset of `A₁×…×Aₖ × B₁×…×Bₘ`, stored
//! as a sorted, deduplicated vector of index tuples packed one byte per
//! component into a `u64`. Packing keeps tuple order lexicographic, makes
//! equality a slice comparison, and turns relational composition into a
//! hash join on byte prefixes.
//!
//! The empty factor list plays the role of the one-point set `∗`, so a
//! relation `∗ ↛ B` is exactly a subset of `B`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Default cap on carrier size. One byte per packed component would allow
/// 255, but 64 keeps subsets of a carrier inside a single machine word and
/// the cubic scans tractable.
pub const MAX_ELEMENTS: usize = 64;

/// Maximum total arity (domain plus codomain components) of a relation.
/// Eight one-byte components fill a `u64` exactly.
pub const MAX_ARITY: usize = 8;

/// Errors for malformed sets, tuples, and mismatched relation shapes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelError {
    #[error("carrier has {got} elements, limit is {limit}")]
    CarrierTooLarge { got: usize, limit: usize },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("relation arity {got} exceeds the supported maximum {max}")]
    ArityTooLarge { got: usize, max: usize },
    #[error("tuple has {got} components, expected {expected}")]
    TupleLength { got: usize, expected: usize },
    #[error("component {component} of tuple is {index}, but that factor has only {size} elements")]
    IndexOutOfRange {
        component: usize,
        index: usize,
        size: usize,
    },
    #[error("factor mismatch at position {position}: left has `{left}`, right has `{right}`")]
    FactorMismatch {
        position: usize,
        left: String,
        right: String,
    },
    #[error("expected {expected} factors, found {got}")]
    FactorCount { expected: usize, got: usize },
    #[error("map has {got} entries, domain has {expected} elements")]
    MapLength { got: usize, expected: usize },
    #[error("an equivalence check needs an endorelation with one domain and one codomain factor")]
    NotEndorelation,
}

/// An ordered finite set of distinct labels. Elements are addressed by
/// index everywhere; labels only resurface in rendered witnesses, reports,
/// and the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSet {
    labels: Vec<String>,
}

impl FiniteSet {
    /// Builds a set from distinct labels, enforcing [`MAX_ELEMENTS`].
    pub fn new<I, S>(labels: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_limit(labels, MAX_ELEMENTS)
    }

    /// Like [`FiniteSet::new`] with an explicit size cap (still at most 255
    /// so indices fit a packed byte).
    pub fn with_limit<I, S>(labels: I, limit: usize) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let limit = limit.min(255);
        if labels.len() > limit {
            return Err(RelError::CarrierTooLarge {
                got: labels.len(),
                limit,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(RelError::DuplicateLabel(l.clone()));
            }
        }
        Ok(FiniteSet { labels })
    }

    /// The set `{"0", "1", …, "n-1"}`.
    pub fn of_size(n: usize) -> Result<Self, RelError> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Short rendering for error messages: `{a,b,c}`, elided past five
    /// labels.
    fn describe(&self) -> String {
        let shown: Vec<&str> = self.labels.iter().take(5).map(String::as_str).collect();
        if self.labels.len() > 5 {
            format!("{{{},…}} ({} elements)", shown.join(","), self.labels.len())
        } else {
            format!("{{{}}}", shown.join(","))
        }
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// Witness returned when a relation fails to be an equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceWitness {
    /// `(e, e)` is missing for this element.
    NotReflexive { element: usize },
    /// The pair is related but its transpose is not.
    NotSymmetric { pair: (usize, usize) },
    /// `(a, b)` and `(b, c)` are related but `(a, c)` is not.
    NotTransitive { chain: (usize, usize, usize) },
}

/// A relation `A₁×…×Aₖ ↛ B₁×…×Bₘ`, stored extensionally.
///
/// Equality is extensional: same factor lists, same tuple set. Tuples are
/// exposed as `Vec<usize>` index vectors ordered domain-first; internally
/// they are byte-packed `u64`s (first component in the most significant
/// used byte) kept sorted, so iteration order is lexicographic and
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    domain: Vec<FiniteSet>,
    codomain: Vec<FiniteSet>,
    tuples: Vec<u64>,
}

fn pack(tuple: &[usize]) -> u64 {
    tuple.iter().fold(0u64, |acc, &c| (acc << 8) | c as u64)
}

fn unpack(packed: u64, arity: usize) -> Vec<usize> {
    (0..arity)
        .map(|i| ((packed >> (8 * (arity - 1 - i))) & 0xff) as usize)
        .collect()
}

/// Mask selecting the low `k` components.
fn low_mask(k: usize) -> u64 {
    if k == 0 {
        0
    } else {
        u64::MAX >> (64 - 8 * k)
    }
}

/// Shift left by `k` components, total when the value is known to vanish.
fn shl(v: u64, k: usize) -> u64 {
    if k >= 8 {
        debug_assert_eq!(v, 0);
        0
    } else {
        v << (8 * k)
    }
}

/// Shift right by `k` components.
fn shr(v: u64, k: usize) -> u64 {
    if k >= 8 {
        0
    } else {
        v >> (8 * k)
    }
}

impl Relation {
    fn check_shape(domain: &[FiniteSet], codomain: &[FiniteSet]) -> Result<(), RelError> {
        let arity = domain.len() + codomain.len();
        if arity > MAX_ARITY {
            return Err(RelError::ArityTooLarge {
                got: arity,
                max: MAX_ARITY,
            });
        }
        Ok(())
    }

    fn validate_tuple(
        factors: &[&FiniteSet],
        tuple: &[usize],
    ) -> Result<(), RelError> {
        if tuple.len() != factors.len() {
            return Err(RelError::TupleLength {
                got: tuple.len(),
                expected: factors.len(),
            });
        }
        for (i, (&c, f)) in tuple.iter().zip(factors).enumerate() {
            if c >= f.len() {
                return Err(RelError::IndexOutOfRange {
                    component: i,
                    index: c,
                    size: f.len(),
                });
            }
        }
        Ok(())
    }

    /// Builds a relation from explicit index tuples (domain components
    /// first). Tuples are validated against the factor sizes, then sorted
    /// and deduplicated.
    pub fn from_tuples<I, T>(
        domain: Vec<FiniteSet>,
        codomain: Vec<FiniteSet>,
        tuples: I,
    ) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        Self::check_shape(&domain, &codomain)?;
        let factors: Vec<&FiniteSet> = domain.iter().chain(codomain.iter()).collect();
        let mut packed = Vec::new();
        for t in tuples {
            let t = t.as_ref();
            Self::validate_tuple(&factors, t)?;
            packed.push(pack(t));
        }
        packed.sort_unstable();
        packed.dedup();
        Ok(Relation {
            domain,
            codomain,
            tuples: packed,
        })
    }

    /// The empty relation of the given shape.
    pub fn empty(domain: Vec<FiniteSet>, codomain: Vec<FiniteSet>) -> Result<Self, RelError> {
        Self::from_tuples(domain, codomain, std::iter::empty::<Vec<usize>>())
    }

    /// A subset of `B₁×…×Bₘ`, i.e. a relation `∗ ↛ B₁×…×Bₘ`.
    pub fn subset<I, T>(codomain: Vec<FiniteSet>, tuples: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        Self::from_tuples(Vec::new(), codomain, tuples)
    }

    /// The full subset `∗ ↛ B₁×…×Bₘ` containing every tuple.
    pub fn full_subset(codomain: Vec<FiniteSet>) -> Result<Self, RelError> {
        Self::check_shape(&[], &codomain)?;
        let mut tuples = vec![0u64];
        for f in &codomain {
            let mut next = Vec::with_capacity(tuples.len() * f.len());
            for t in &tuples {
                for c in 0..f.len() {
                    next.push((t << 8) | c as u64);
                }
            }
            tuples = next;
        }
        Ok(Relation {
            domain: Vec::new(),
            codomain,
            tuples,
        })
    }

    /// The identity relation on a factor list.
    pub fn identity(factors: &[FiniteSet]) -> Result<Self, RelError> {
        Self::check_shape(factors, factors)?;
        let all = Relation::full_subset(factors.to_vec())?;
        let k = factors.len();
        let tuples = all
            .tuples
            .iter()
            .map(|&t| shl(t, k) | t)
            .collect::<Vec<_>>();
        Ok(Relation {
            domain: factors.to_vec(),
            codomain: factors.to_vec(),
            tuples,
        })
    }

    /// The graph of a total map `dom → cod` given as an index table.
    pub fn graph_of_map(
        dom: &FiniteSet,
        cod: &FiniteSet,
        map: &[usize],
    ) -> Result<Self, RelError> {
        if map.len() != dom.len() {
            return Err(RelError::MapLength {
                got: map.len(),
                expected: dom.len(),
            });
        }
        Self::from_tuples(
            vec![dom.clone()],
            vec![cod.clone()],
            map.iter().enumerate().map(|(i, &j)| vec![i, j]),
        )
    }

    /// The transposition graph `A×B ↛ B×A`, `(x, y) ↦ (y, x)`.
    pub fn swap_graph(a: &FiniteSet, b: &FiniteSet) -> Result<Self, RelError> {
        let mut tuples = Vec::with_capacity(a.len() * b.len());
        for x in 0..a.len() {
            for y in 0..b.len() {
                tuples.push(vec![x, y, y, x]);
            }
        }
        Self::from_tuples(
            vec![a.clone(), b.clone()],
            vec![b.clone(), a.clone()],
            tuples,
        )
    }

    pub fn domain(&self) -> &[FiniteSet] {
        &self.domain
    }

    pub fn codomain(&self) -> &[FiniteSet] {
        &self.codomain
    }

    pub fn arity(&self) -> usize {
        self.domain.len() + self.codomain.len()
    }

    /// Number of tuples.
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Membership test for an index tuple (domain components first).
    pub fn contains(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.arity() && self.tuples.binary_search(&pack(tuple)).is_ok()
    }

    /// Iterates tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let arity = self.arity();
        self.tuples.iter().map(move |&t| unpack(t, arity))
    }

    /// The set of codomain parts that occur, in lexicographic order.
    pub fn image(&self) -> Vec<Vec<usize>> {
        let ca = self.codomain.len();
        let mut parts: Vec<u64> = self.tuples.iter().map(|&t| t & low_mask(ca)).collect();
        parts.sort_unstable();
        parts.dedup();
        parts.into_iter().map(|t| unpack(t, ca)).collect()
    }

    fn require_matching(
        left: &[FiniteSet],
        right: &[FiniteSet],
    ) -> Result<(), RelError> {
        if left.len() != right.len() {
            return Err(RelError::FactorCount {
                expected: left.len(),
                got: right.len(),
            });
        }
        for (i, (l, r)) in left.iter().zip(right).enumerate() {
            if l != r {
                return Err(RelError::FactorMismatch {
                    position: i,
                    left: l.describe(),
                    right: r.describe(),
                });
            }
        }
        Ok(())
    }

    /// Relational composition, diagrammatic order: `self : A ↛ B` followed
    /// by `other : B ↛ C`, giving `{(a, c) | ∃b : (a,b) ∈ self, (b,c) ∈
    /// other}`. The middle factor lists must agree exactly.
    pub fn compose(&self, other: &Relation) -> Result<Relation, RelError> {
        Self::require_matching(&self.codomain, &other.domain)?;
        Self::check_shape(&self.domain, &other.codomain)?;
        let ca = self.codomain.len();
        let cb = other.codomain.len();
        // Index `other` by its domain prefix, then probe with every left
        // tuple's codomain suffix.
        let mut by_mid: HashMap<u64, Vec<u64>> = HashMap::new();
        for &t in &other.tuples {
            by_mid.entry(shr(t, cb)).or_default().push(t & low_mask(cb));
        }
        let mut out = Vec::new();
        for &t in &self.tuples {
            let a = shr(t, ca);
            if let Some(cs) = by_mid.get(&(t & low_mask(ca))) {
                for &c in cs {
                    out.push(shl(a, cb) | c);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(Relation {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            tuples: out,
        })
    }

    /// The transpose relation `B ↛ A` (tuples reversed across the
    /// domain/codomain split).
    pub fn dagger(&self) -> Relation {
        let da = self.domain.len();
        let ca = self.codomain.len();
        let mut tuples: Vec<u64> = self
            .tuples
            .iter()
            .map(|&t| shl(t & low_mask(ca), da) | shr(t, ca))
            .collect();
        tuples.sort_unstable();
        tuples.dedup();
        Relation {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            tuples,
        }
    }

    /// The product relation `A×A' ↛ B×B'`: pairs `((a,a'), (b,b'))` with
    /// `(a,b) ∈ self` and `(a',b') ∈ other`.
    pub fn product(&self, other: &Relation) -> Result<Relation, RelError> {
        let domain: Vec<FiniteSet> = self
            .domain
            .iter()
            .chain(other.domain.iter())
            .cloned()
            .collect();
        let codomain: Vec<FiniteSet> = self
            .codomain
            .iter()
            .chain(other.codomain.iter())
            .cloned()
            .collect();
        Self::check_shape(&domain, &codomain)?;
        let da2 = other.domain.len();
        let ca1 = self.codomain.len();
        let ca2 = other.codomain.len();
        let mut tuples = Vec::with_capacity(self.tuples.len() * other.tuples.len());
        for &t1 in &self.tuples {
            let a1 = shr(t1, ca1);
            let b1 = t1 & low_mask(ca1);
            for &t2 in &other.tuples {
                let a2 = shr(t2, ca2);
                let b2 = t2 & low_mask(ca2);
                tuples.push(shl(shl(shl(a1, da2) | a2, ca1) | b1, ca2) | b2);
            }
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Relation {
            domain,
            codomain,
            tuples,
        })
    }

    /// Checks that an endorelation is an equivalence on the listed carrier
    /// elements. `Ok(Err(w))` carries the first witness in scan order;
    /// the outer error fires only on a shape mismatch.
    pub fn is_equivalence(
        &self,
        carrier: &[usize],
    ) -> Result<Result<(), EquivalenceWitness>, RelError> {
        if self.domain.len() != 1 || self.codomain.len() != 1 || self.domain != self.codomain {
            return Err(RelError::NotEndorelation);
        }
        for &e in carrier {
            if !self.contains(&[e, e]) {
                return Ok(Err(EquivalenceWitness::NotReflexive { element: e }));
            }
        }
        for t in self.tuples() {
            if !self.contains(&[t[1], t[0]]) {
                return Ok(Err(EquivalenceWitness::NotSymmetric {
                    pair: (t[0], t[1]),
                }));
            }
        }
        for t in self.tuples() {
            for u in self.tuples() {
                if u[0] == t[1] && !self.contains(&[t[0], u[1]]) {
                    return Ok(Err(EquivalenceWitness::NotTransitive {
                        chain: (t[0], t[1], u[1]),
                    }));
                }
            }
        }
        Ok(Ok(()))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "relation with {} tuple(s), {}→{} factors",
            self.tuples.len(),
            self.domain.len(),
            self.codomain.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> FiniteSet {
        FiniteSet::of_size(n).unwrap()
    }

    #[test]
    fn rejects_oversized_and_duplicate_carriers() {
        assert!(matches!(
            FiniteSet::of_size(65),
            Err(RelError::CarrierTooLarge { got: 65, limit: 64 })
        ));
        assert!(matches!(
            FiniteSet::new(["a", "b", "a"]),
            Err(RelError::DuplicateLabel(_))
        ));
        assert_eq!(FiniteSet::of_size(64).unwrap().len(), 64);
    }

    #[test]
    fn tuples_are_sorted_deduplicated_and_validated() {
        let a = set(3);
        let r = Relation::from_tuples(
            vec![a.clone()],
            vec![a.clone()],
            [[2usize, 1], [0, 1], [2, 1]],
        )
        .unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.tuples().collect::<Vec<_>>(), vec![vec![0, 1], vec![2, 1]]);
        assert!(r.contains(&[2, 1]));
        assert!(!r.contains(&[1, 2]));

        let bad = Relation::from_tuples(vec![a.clone()], vec![a], [[0usize, 3]]);
        assert!(matches!(bad, Err(RelError::IndexOutOfRange { index: 3, .. })));
    }

    #[test]
    fn compose_joins_on_the_middle_factor() {
        let a = set(3);
        let r = Relation::from_tuples(
            vec![a.clone()],
            vec![a.clone()],
            [[0usize, 1], [1, 2]],
        )
        .unwrap();
        let s = Relation::from_tuples(
            vec![a.clone()],
            vec![a.clone()],
            [[1usize, 0], [2, 2]],
        )
        .unwrap();
        let rs = r.compose(&s).unwrap();
        assert_eq!(rs.tuples().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 2]]);

        let id = Relation::identity(&[a.clone()]).unwrap();
        assert_eq!(r.compose(&id).unwrap(), r);
        assert_eq!(id.compose(&r).unwrap(), r);
    }

    #[test]
    fn compose_requires_matching_factors() {
        let a = set(3);
        let b = set(2);
        let r = Relation::empty(vec![a.clone()], vec![a]).unwrap();
        let s = Relation::empty(vec![b.clone()], vec![b]).unwrap();
        match r.compose(&s) {
            Err(RelError::FactorMismatch { position: 0, .. }) => {}
            other => panic!("expected factor mismatch, got {other:?}"),
        }
    }

    #[test]
    fn dagger_reverses_and_is_an_involution() {
        let a = set(4);
        let r = Relation::from_tuples(
            vec![a.clone(), a.clone()],
            vec![a.clone()],
            [[0usize, 1, 2], [3, 3, 0]],
        )
        .unwrap();
        let d = r.dagger();
        assert!(d.contains(&[2, 0, 1]));
        assert!(d.contains(&[0, 3, 3]));
        assert_eq!(d.dagger(), r);
    }

    #[test]
    fn dagger_is_an_antihomomorphism_for_compose() {
        let a = set(4);
        let r = Relation::from_tuples(
            vec![a.clone()],
            vec![a.clone()],
            [[0usize, 1], [1, 2], [3, 0]],
        )
        .unwrap();
        let s = Relation::from_tuples(
            vec![a.clone()],
            vec![a.clone()],
            [[1usize, 3], [2, 0], [0, 0]],
        )
        .unwrap();
        let lhs = r.compose(&s).unwrap().dagger();
        let rhs = s.dagger().compose(&r.dagger()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_interleaves_domains_and_codomains() {
        let a = set(2);
        let r = Relation::from_tuples(vec![a.clone()], vec![a.clone()], [[0usize, 1]]).unwrap();
        let s = Relation::from_tuples(vec![a.clone()], vec![a.clone()], [[1usize, 0]]).unwrap();
        let p = r.product(&s).unwrap();
        // Domain (0, 1), codomain (1, 0).
        assert_eq!(p.tuples().collect::<Vec<_>>(), vec![vec![0, 1, 1, 0]]);
        assert_eq!(p.domain().len(), 2);
        assert_eq!(p.codomain().len(), 2);
    }

    #[test]
    fn product_distributes_over_compose() {
        let a = set(3);
        let mk = |ts: &[[usize; 2]]| {
            Relation::from_tuples(vec![a.clone()], vec![a.clone()], ts.iter().copied()).unwrap()
        };
        let r1 = mk(&[[0, 1], [2, 2], [1, 0]]);
        let s1 = mk(&[[1, 1], [2, 0]]);
        let r2 = mk(&[[0, 0], [1, 2]]);
        let s2 = mk(&[[0, 2], [2, 1]]);
        let lhs = r1.compose(&s1).unwrap().product(&r2.compose(&s2).unwrap()).unwrap();
        let rhs = r1.product(&r2).unwrap().compose(&s1.product(&s2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn subsets_compose_like_images() {
        let a = set(4);
        let sub = Relation::subset(vec![a.clone()], [[1usize], [2]]).unwrap();
        let r = Relation::from_tuples(
            vec![a.clone()],
            vec![a.clone()],
            [[1usize, 3], [2, 0], [3, 3]],
        )
        .unwrap();
        let img = sub.compose(&r).unwrap();
        assert_eq!(img.tuples().collect::<Vec<_>>(), vec![vec![0], vec![3]]);
        assert_eq!(img.domain().len(), 0);
    }

    #[test]
    fn full_subset_and_identity_agree_on_sizes() {
        let a = set(3);
        let b = set(2);
        let full = Relation::full_subset(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(full.len(), 6);
        let id = Relation::identity(&[a.clone(), b]).unwrap();
        assert_eq!(id.len(), 6);
        assert!(id.contains(&[2, 1, 2, 1]));
        assert!(!id.contains(&[2, 1, 2, 0]));
    }

    #[test]
    fn equivalence_check_reports_first_witness() {
        let a = set(2);
        let r = Relation::from_tuples(vec![a.clone()], vec![a.clone()], [[0usize, 1]]).unwrap();
        assert_eq!(
            r.is_equivalence(&[0, 1]).unwrap(),
            Err(EquivalenceWitness::NotReflexive { element: 0 })
        );

        let sym = Relation::from_tuples(
            vec![a.clone()],
            vec![a.clone()],
            [[0usize, 0], [1, 1], [0, 1]],
        )
        .unwrap();
        assert_eq!(
            sym.is_equivalence(&[0, 1]).unwrap(),
            Err(EquivalenceWitness::NotSymmetric { pair: (0, 1) })
        );

        let c = set(3);
        let trans = Relation::from_tuples(
            vec![c.clone()],
            vec![c.clone()],
            [[0usize, 0], [1, 1], [2, 2], [0, 1], [1, 0], [1, 2], [2, 1]],
        )
        .unwrap();
        assert_eq!(
            trans.is_equivalence(&[0, 1, 2]).unwrap(),
            Err(EquivalenceWitness::NotTransitive { chain: (0, 1, 2) })
        );

        let ok = Relation::from_tuples(
            vec![c.clone()],
            vec![c.clone()],
            [[0usize, 0], [1, 1], [2, 2], [1, 2], [2, 1]],
        )
        .unwrap();
        assert_eq!(ok.is_equivalence(&[0, 1, 2]).unwrap(), Ok(()));

        let not_endo = Relation::empty(vec![c.clone(), c.clone()], vec![c]).unwrap();
        assert!(matches!(
            not_endo.is_equivalence(&[0]),
            Err(RelError::NotEndorelation)
        ));
    }

    #[test]
    fn swap_graph_transposes_pairs() {
        let a = set(2);
        let b = set(3);
        let t = Relation::swap_graph(&a, &b).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.contains(&[1, 2, 2, 1]));
    }
}
