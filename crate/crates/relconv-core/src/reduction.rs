//! Reduction of a relational groupoid to its quotient groupoid.
//!
//! On the constraint set `C` the unit equivalence `L2` restricts to an
//! honest equivalence relation; the quotient `C/L2` carries an ordinary
//! groupoid structure with morphism classes multiplied through `L3` and
//! endpoints determined by which units an element composes with:
//!
//! * `t([c])` is the class of the units `ℓ` admitting `(ℓ, c, ·) ∈ L3`,
//! * `s([c])` is the class of the units `ℓ` admitting `(c, ℓ, ·) ∈ L3`.
//!
//! Every structural claim (well-definedness of the multiplication,
//! functionality of endpoints, the groupoid laws themselves) is verified
//! during construction rather than assumed; class representatives are
//! always the smallest member index, and all reported data is independent
//! of labeling.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bits;
use crate::groupoid::RelationalGroupoid;
use crate::rel::{FiniteSet, RelError, Relation};
use crate::table::{GroupoidTable, TableError};

/// Failures while reducing. Indices refer to the original carrier.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error("quotient table rejected: {0}")]
    Table(#[from] TableError),
    #[error("axiom {axiom} fails; reduce only validated relational groupoids")]
    AxiomsFail { axiom: String },
    #[error("L2 restricted to the constraint set is not an equivalence: {0:?}")]
    NotEquivalence(crate::rel::EquivalenceWitness),
    #[error("multiplication is not well defined: products of classes [{a}]·[{b}] land in distinct classes [{k1}] and [{k2}]")]
    IllDefinedMult { a: usize, b: usize, k1: usize, k2: usize },
    #[error("element {element} admits no unit on its {side} side")]
    MissingUnit { element: usize, side: &'static str },
    #[error("element {element} composes with units of distinct classes [{u1}] and [{u2}] on its {side} side")]
    AmbiguousUnit {
        element: usize,
        u1: usize,
        u2: usize,
        side: &'static str,
    },
}

/// The reduction of a relational groupoid: the `L2`-classes of the
/// constraint set, the induced quotient groupoid, and the (relational)
/// quotient map.
#[derive(Debug, Clone)]
pub struct QuotientData {
    /// `L2`-classes of `C`, each sorted ascending, ordered by smallest
    /// member. The class index is the morphism index in the quotient.
    classes: Vec<Vec<usize>>,
    /// Carrier element → class index, defined exactly on `C`.
    class_of: BTreeMap<usize, usize>,
    /// Class indices that consist of units; the object index in the
    /// quotient is the position in this list.
    object_classes: Vec<usize>,
    quotient: GroupoidTable,
    /// The quotient map as a relation `G ↛ 𝒢̲` (pairs only for `g ∈ C`).
    q: Relation,
}

impl QuotientData {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// The canonical representative (smallest member) of each class.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    pub fn class_of(&self, g: usize) -> Option<usize> {
        self.class_of.get(&g).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<usize, usize> {
        &self.class_of
    }

    pub fn quotient(&self) -> &GroupoidTable {
        &self.quotient
    }

    /// Which quotient morphisms are units, as class indices.
    pub fn object_classes(&self) -> &[usize] {
        &self.object_classes
    }

    /// The quotient map as a relation.
    pub fn q_relation(&self) -> &Relation {
        &self.q
    }
}

/// The constraint set together with the verification that `L2` restricts
/// to an equivalence on it. Returns the elements of `C` ascending.
pub fn constraint_set(g: &RelationalGroupoid) -> Result<Vec<usize>, ReductionError> {
    let c: Vec<usize> = g.constraint_elements().to_vec();
    match g.l2().is_equivalence(&c)? {
        Ok(()) => Ok(c),
        Err(w) => Err(ReductionError::NotEquivalence(w)),
    }
}

/// Builds the quotient groupoid of a validated relational groupoid.
///
/// The input must pass the axiom scan; the construction then verifies that
/// class multiplication through `L3` is single-valued, that each class
/// meets units of exactly one class on each side, and finally lets
/// [`GroupoidTable::new`] re-check every groupoid law on the result.
pub fn quotient_groupoid(g: &RelationalGroupoid) -> Result<QuotientData, ReductionError> {
    let report = g.check_axioms();
    if let Some(bad) = report.first_failure() {
        return Err(ReductionError::AxiomsFail {
            axiom: bad.axiom.name().into(),
        });
    }
    let c = constraint_set(g)?;

    // Partition C into L2-classes; representatives are smallest members,
    // classes ordered by representative.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
    for &e in &c {
        if class_of.contains_key(&e) {
            continue;
        }
        let members: Vec<usize> = c
            .iter()
            .copied()
            .filter(|&f| g.l2_related(e, f))
            .collect();
        let idx = classes.len();
        for &m in &members {
            class_of.insert(m, idx);
        }
        classes.push(members);
    }

    // Class multiplication through L3, checked single-valued.
    let mut mult: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in g.l3().tuples() {
        let (h, k, out) = (t[0], t[1], t[2]);
        // Both inputs of an L3 tuple lie in C on validated input.
        let (a, b, o) = (class_of[&h], class_of[&k], class_of[&out]);
        if let Some(&prev) = mult.get(&(a, b)) {
            if prev != o {
                return Err(ReductionError::IllDefinedMult { a, b, k1: prev, k2: o });
            }
        } else {
            mult.insert((a, b), o);
        }
    }

    // Unit classes: classes consisting of L1 elements. A unit class is
    // L2-saturated by invariance, so membership of the representative
    // decides.
    let object_classes: Vec<usize> = classes
        .iter()
        .enumerate()
        .filter(|(_, members)| g.is_unit(members[0]))
        .map(|(i, _)| i)
        .collect();
    let object_of_class: BTreeMap<usize, usize> = object_classes
        .iter()
        .enumerate()
        .map(|(obj, &cls)| (cls, obj))
        .collect();

    // Endpoints. t([c]) comes from units acting on the left of c,
    // s([c]) from units acting on the right; both must exist and be
    // unambiguous class-wise.
    let unit_mask: u64 = g.units().iter().fold(0, |acc, &u| acc | 1 << u);
    let mut source = Vec::with_capacity(classes.len());
    let mut target = Vec::with_capacity(classes.len());
    for members in &classes {
        let rep = members[0];
        let mut left_units = 0u64;
        let mut right_units = 0u64;
        for u in bits::iter(unit_mask) {
            if g.set_product_mask(u, rep) != 0 {
                left_units |= 1 << u;
            }
            if g.set_product_mask(rep, u) != 0 {
                right_units |= 1 << u;
            }
        }
        let pick = |mask: u64, side: &'static str| -> Result<usize, ReductionError> {
            let mut it = bits::iter(mask);
            let first = it.next().ok_or(ReductionError::MissingUnit {
                element: rep,
                side,
            })?;
            let cls = class_of[&first];
            for other in it {
                if class_of[&other] != cls {
                    return Err(ReductionError::AmbiguousUnit {
                        element: rep,
                        u1: first,
                        u2: other,
                        side,
                    });
                }
            }
            Ok(object_of_class[&cls])
        };
        target.push(pick(left_units, "left")?);
        source.push(pick(right_units, "right")?);
    }

    // Units and inverses of the quotient.
    let unit: Vec<usize> = object_classes.clone();
    let inverse: Vec<usize> = classes
        .iter()
        .map(|members| class_of[&g.involution()[members[0]]])
        .collect();

    let morphisms = FiniteSet::new(
        classes
            .iter()
            .map(|members| format!("[{}]", g.carrier().label(members[0]))),
    )?;
    let objects = FiniteSet::new(
        object_classes
            .iter()
            .map(|&cls| format!("[{}]", g.carrier().label(classes[cls][0]))),
    )?;

    // GroupoidTable::new re-verifies all laws (mult domain, endpoints,
    // associativity, units, inverses) on the quotient data.
    let quotient = GroupoidTable::new(
        morphisms.clone(),
        objects,
        source,
        target,
        mult,
        unit,
        inverse,
    )?;

    let q = Relation::from_tuples(
        vec![g.carrier().clone()],
        vec![morphisms],
        class_of.iter().map(|(&e, &cls)| vec![e, cls]),
    )?;

    Ok(QuotientData {
        classes,
        class_of,
        object_classes,
        quotient,
        q,
    })
}

/// Checks that a class assignment `C → 𝒢̲` makes the graph of `q` a
/// relational subgroupoid of `𝒢 × 𝒢̲ᵣ`, where `𝒢̲ᵣ` is the quotient
/// embedded as a relational groupoid. Concretely: the graph must be closed
/// under the product involution, and the restricted structure relation
/// must satisfy the axioms. Corrupting a single class assignment breaks
/// this.
pub fn verify_q_morphism(
    g: &RelationalGroupoid,
    quotient: &GroupoidTable,
    assignment: &BTreeMap<usize, usize>,
) -> bool {
    let Ok(reduced) = RelationalGroupoid::from_groupoid(quotient) else {
        return false;
    };
    // The graph H = {(g, q(g))}, one point per constrained element.
    let members: Vec<usize> = assignment.keys().copied().collect();
    let labels: Vec<String> = members
        .iter()
        .map(|&e| format!("{}↦{}", g.carrier().label(e), assignment[&e]))
        .collect();
    let Ok(carrier) = FiniteSet::new(labels) else {
        return false;
    };
    let pos_of: BTreeMap<usize, usize> = members
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();

    // Involution must restrict to H: I(g) paired with the quotient inverse
    // of q(g).
    let mut inv = Vec::with_capacity(members.len());
    for &e in &members {
        let ie = g.involution()[e];
        let Some(&ipos) = pos_of.get(&ie) else {
            return false;
        };
        if assignment[&ie] != reduced.involution()[assignment[&e]] {
            return false;
        }
        inv.push(ipos);
    }

    // Restrict the product structure relation to H³.
    let mut tuples = Vec::new();
    for t in g.structure().tuples() {
        let (Some(&a), Some(&b), Some(&c)) = (
            pos_of.get(&t[0]),
            pos_of.get(&t[1]),
            pos_of.get(&t[2]),
        ) else {
            continue;
        };
        if reduced.structure().contains(&[
            assignment[&t[0]],
            assignment[&t[1]],
            assignment[&t[2]],
        ]) {
            tuples.push(vec![a, b, c]);
        }
    }
    let Ok(l) = Relation::from_tuples(
        vec![carrier.clone(), carrier.clone()],
        vec![carrier.clone()],
        tuples,
    ) else {
        return false;
    };
    let Ok(h) = RelationalGroupoid::new_unchecked(carrier, l, inv) else {
        return false;
    };
    // A subgroupoid must again be a relational groupoid — and must still
    // project onto all of G's constrained structure: the restriction may
    // not lose tuples of L whose entries all lie in C.
    let expected: usize = g
        .structure()
        .tuples()
        .filter(|t| t.iter().all(|e| assignment.contains_key(e)))
        .count();
    h.structure().len() == expected && h.check_axioms().all_passed()
}
