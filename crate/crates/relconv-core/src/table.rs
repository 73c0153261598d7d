//! Ordinary finite groupoids as validated multiplication tables.
//!
//! A [`GroupoidTable`] is the classical object: finitely many morphisms and
//! objects, source/target maps, a partial multiplication, units, and
//! inverses. The constructor machine-checks every law rather than trusting
//! the caller, because downstream code (quotients in particular) leans on
//! the laws holding exactly.
//!
//! Composition is written multiplicatively: `m(α, β) = α∘β` is defined
//! exactly when `t(β) = s(α)`, and then `s(α∘β) = s(β)`, `t(α∘β) = t(α)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rel::{FiniteSet, RelError};

/// Validation failures for [`GroupoidTable::new`] and the derived
/// constructors. Each variant carries the offending morphisms or objects by
/// index.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error("source map has {got} entries for {expected} morphisms")]
    SourceLength { got: usize, expected: usize },
    #[error("target map has {got} entries for {expected} morphisms")]
    TargetLength { got: usize, expected: usize },
    #[error("unit map has {got} entries for {expected} objects")]
    UnitLength { got: usize, expected: usize },
    #[error("inverse map has {got} entries for {expected} morphisms")]
    InverseLength { got: usize, expected: usize },
    #[error("map value out of range: entry {entry} is {value}, limit {limit}")]
    ValueOutOfRange {
        entry: usize,
        value: usize,
        limit: usize,
    },
    #[error("morphisms {a} and {b} compose (t({b}) = s({a})) but the table has no product")]
    MissingProduct { a: usize, b: usize },
    #[error("table defines a product for {a}∘{b} although t({b}) ≠ s({a})")]
    SpuriousProduct { a: usize, b: usize },
    #[error("product {a}∘{b} has source {got}, expected s({b}) = {expected}")]
    ProductSource { a: usize, b: usize, got: usize, expected: usize },
    #[error("product {a}∘{b} has target {got}, expected t({a}) = {expected}")]
    ProductTarget { a: usize, b: usize, got: usize, expected: usize },
    #[error("associativity fails at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("unit of object {object} has source or target off that object")]
    UnitEndpoints { object: usize },
    #[error("unit law fails for morphism {morphism}")]
    UnitLaw { morphism: usize },
    #[error("inverse of morphism {morphism} has mismatched endpoints")]
    InverseEndpoints { morphism: usize },
    #[error("inverse law fails for morphism {morphism}")]
    InverseLaw { morphism: usize },
    #[error("a group table must have exactly one object, found {0}")]
    NotOneObject(usize),
    #[error("group table row {0} is not a permutation")]
    NotLatin(usize),
}

/// A finite groupoid given by explicit tables, validated on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidTable {
    morphisms: FiniteSet,
    objects: FiniteSet,
    source: Vec<usize>,
    target: Vec<usize>,
    mult: BTreeMap<(usize, usize), usize>,
    unit: Vec<usize>,
    inverse: Vec<usize>,
}

impl GroupoidTable {
    /// Builds a groupoid from raw tables, verifying every law: the
    /// multiplication is defined exactly on composable pairs, endpoints and
    /// associativity behave, units are two-sided identities, and inverses
    /// produce the expected units.
    pub fn new(
        morphisms: FiniteSet,
        objects: FiniteSet,
        source: Vec<usize>,
        target: Vec<usize>,
        mult: BTreeMap<(usize, usize), usize>,
        unit: Vec<usize>,
        inverse: Vec<usize>,
    ) -> Result<Self, TableError> {
        let n = morphisms.len();
        let k = objects.len();
        if source.len() != n {
            return Err(TableError::SourceLength { got: source.len(), expected: n });
        }
        if target.len() != n {
            return Err(TableError::TargetLength { got: target.len(), expected: n });
        }
        if unit.len() != k {
            return Err(TableError::UnitLength { got: unit.len(), expected: k });
        }
        if inverse.len() != n {
            return Err(TableError::InverseLength { got: inverse.len(), expected: n });
        }
        for (entry, &v) in source.iter().chain(target.iter()).enumerate() {
            if v >= k {
                return Err(TableError::ValueOutOfRange { entry, value: v, limit: k });
            }
        }
        for (entry, &v) in unit.iter().chain(inverse.iter()).enumerate() {
            if v >= n {
                return Err(TableError::ValueOutOfRange { entry, value: v, limit: n });
            }
        }
        for (&(a, b), &v) in &mult {
            if a >= n || b >= n {
                return Err(TableError::ValueOutOfRange {
                    entry: a.max(b),
                    value: a.max(b),
                    limit: n,
                });
            }
            if v >= n {
                return Err(TableError::ValueOutOfRange { entry: a, value: v, limit: n });
            }
        }

        let g = GroupoidTable {
            morphisms,
            objects,
            source,
            target,
            mult,
            unit,
            inverse,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), TableError> {
        let n = self.morphisms.len();
        // Domain of the multiplication.
        for a in 0..n {
            for b in 0..n {
                let composable = self.target[b] == self.source[a];
                match (composable, self.mult.contains_key(&(a, b))) {
                    (true, false) => return Err(TableError::MissingProduct { a, b }),
                    (false, true) => return Err(TableError::SpuriousProduct { a, b }),
                    _ => {}
                }
            }
        }
        // Endpoints of products.
        for (&(a, b), &ab) in &self.mult {
            if self.source[ab] != self.source[b] {
                return Err(TableError::ProductSource {
                    a,
                    b,
                    got: self.source[ab],
                    expected: self.source[b],
                });
            }
            if self.target[ab] != self.target[a] {
                return Err(TableError::ProductTarget {
                    a,
                    b,
                    got: self.target[ab],
                    expected: self.target[a],
                });
            }
        }
        // Associativity over all composable triples.
        for a in 0..n {
            for b in 0..n {
                let Some(&ab) = self.mult.get(&(a, b)) else { continue };
                for c in 0..n {
                    let Some(&bc) = self.mult.get(&(b, c)) else { continue };
                    if self.mult.get(&(ab, c)) != self.mult.get(&(a, bc)) {
                        return Err(TableError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        // Units.
        for (x, &u) in self.unit.iter().enumerate() {
            if self.source[u] != x || self.target[u] != x {
                return Err(TableError::UnitEndpoints { object: x });
            }
        }
        for m in 0..n {
            let left = self.mult.get(&(self.unit[self.target[m]], m));
            let right = self.mult.get(&(m, self.unit[self.source[m]]));
            if left != Some(&m) || right != Some(&m) {
                return Err(TableError::UnitLaw { morphism: m });
            }
        }
        // Inverses.
        for m in 0..n {
            let i = self.inverse[m];
            if self.source[i] != self.target[m] || self.target[i] != self.source[m] {
                return Err(TableError::InverseEndpoints { morphism: m });
            }
            let left = self.mult.get(&(m, i));
            let right = self.mult.get(&(i, m));
            if left != Some(&self.unit[self.target[m]]) || right != Some(&self.unit[self.source[m]])
            {
                return Err(TableError::InverseLaw { morphism: m });
            }
        }
        Ok(())
    }

    /// A one-object groupoid (a group) from a multiplication table
    /// `table[a][b] = a·b`. Identity and inverses are located from the
    /// table; the usual group laws are then validated by [`Self::new`].
    pub fn one_object_group(elements: FiniteSet, table: &[Vec<usize>]) -> Result<Self, TableError> {
        let n = elements.len();
        if table.len() != n {
            return Err(TableError::NotLatin(table.len().min(n)));
        }
        let mut mult = BTreeMap::new();
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(TableError::NotLatin(a));
            }
            let mut seen = vec![false; n];
            for (b, &v) in row.iter().enumerate() {
                if v >= n || seen[v] {
                    return Err(TableError::NotLatin(a));
                }
                seen[v] = true;
                mult.insert((a, b), v);
            }
        }
        // The identity is the unique e with e·x = x for all x.
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(TableError::UnitLaw { morphism: 0 })?;
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| table[a][b] == e && table[b][a] == e)
                .ok_or(TableError::InverseLaw { morphism: a })?;
        }
        GroupoidTable::new(
            elements,
            FiniteSet::new(["*"])?,
            vec![0; n],
            vec![0; n],
            mult,
            vec![e],
            inverse,
        )
    }

    /// The pair groupoid on a set of points: one morphism `(a, b) : b → a`
    /// for every ordered pair, with `(a, b)∘(b, c) = (a, c)`.
    pub fn pair_groupoid(points: &FiniteSet) -> Result<Self, TableError> {
        let k = points.len();
        let labels: Vec<String> = (0..k)
            .flat_map(|a| {
                (0..k).map(move |b| (a, b))
            })
            .map(|(a, b)| format!("({},{})", points.label(a), points.label(b)))
            .collect();
        let morphisms = FiniteSet::with_limit(labels, k * k)?;
        let idx = |a: usize, b: usize| a * k + b;
        let mut mult = BTreeMap::new();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    mult.insert((idx(a, b), idx(b, c)), idx(a, c));
                }
            }
        }
        GroupoidTable::new(
            morphisms,
            points.clone(),
            (0..k).flat_map(|_| 0..k).collect(),
            (0..k).flat_map(|a| std::iter::repeat(a).take(k)).collect(),
            mult,
            (0..k).map(|x| idx(x, x)).collect(),
            (0..k)
                .flat_map(|a| (0..k).map(move |b| idx(b, a)))
                .collect(),
        )
    }

    pub fn morphisms(&self) -> &FiniteSet {
        &self.morphisms
    }

    pub fn objects(&self) -> &FiniteSet {
        &self.objects
    }

    pub fn source(&self, m: usize) -> usize {
        self.source[m]
    }

    pub fn target(&self, m: usize) -> usize {
        self.target[m]
    }

    pub fn unit(&self, object: usize) -> usize {
        self.unit[object]
    }

    pub fn inverse(&self, m: usize) -> usize {
        self.inverse[m]
    }

    /// `a∘b` when `t(b) = s(a)`, `None` otherwise.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.mult.get(&(a, b)).copied()
    }

    /// Morphisms with source `x`, ascending.
    pub fn source_fiber(&self, x: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&m| self.source[m] == x)
            .collect()
    }

    /// Composable pairs `(a, b)` (those with `t(b) = s(a)`), ascending.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.morphisms.len();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.target[b] == self.source[a])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn z4_table() -> Vec<Vec<usize>> {
        (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect()
    }

    #[test]
    fn cyclic_group_validates() {
        let g = GroupoidTable::one_object_group(FiniteSet::of_size(4).unwrap(), &z4_table())
            .unwrap();
        assert_eq!(g.compose(1, 3), Some(0));
        assert_eq!(g.inverse(1), 3);
        assert_eq!(g.unit(0), 0);
        assert_eq!(g.source_fiber(0).len(), 4);
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // A Latin square that is not a group multiplication: swap two
        // entries of the Z4 table so associativity breaks but rows stay
        // permutations.
        let mut t = z4_table();
        t[3] = vec![3, 2, 1, 0];
        let err = GroupoidTable::one_object_group(FiniteSet::of_size(4).unwrap(), &t);
        assert!(matches!(
            err,
            Err(TableError::NotAssociative { .. }) | Err(TableError::InverseLaw { .. })
        ));
    }

    #[test]
    fn pair_groupoid_composes_like_pairs() {
        let pts = FiniteSet::new(["p", "q", "r"]).unwrap();
        let g = GroupoidTable::pair_groupoid(&pts).unwrap();
        assert_eq!(g.morphisms().len(), 9);
        // (p,q)∘(q,r) = (p,r): indices a*3+b.
        assert_eq!(g.compose(1, 5), Some(2));
        // (p,q) has source q, target p.
        assert_eq!(g.source(1), 1);
        assert_eq!(g.target(1), 0);
        assert_eq!(g.inverse(1), 3);
        assert_eq!(g.compose(1, 1), None);
        assert_eq!(g.composable_pairs().len(), 27);
    }

    #[test]
    fn missing_and_spurious_products_are_caught() {
        let pts = FiniteSet::new(["x"]).unwrap();
        let m = FiniteSet::new(["id"]).unwrap();
        // No product at all for the only composable pair.
        let err = GroupoidTable::new(
            m.clone(),
            pts.clone(),
            vec![0],
            vec![0],
            BTreeMap::new(),
            vec![0],
            vec![0],
        );
        assert!(matches!(err, Err(TableError::MissingProduct { a: 0, b: 0 })));
    }
}
