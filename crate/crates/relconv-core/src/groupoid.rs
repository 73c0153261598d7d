//! Relational groupoids: carrier, ternary relation, involution.
//!
//! A relational groupoid is a triple `(G, L, I)` with `L ⊆ G³` and
//! `I : G → G`, subject to the axioms A.1–A.6 checked by
//! [`RelationalGroupoid::check_axioms`]. From `(L, I)` we derive
//!
//! * `L3 = {(g, h, I(k)) | (g, h, k) ∈ L}` — the multiplication graph,
//! * `L1 = {k | ∃g : (g, I(g), k) ∈ L3}` — the unit constraints,
//! * `L2 = {(h, k) | ∃ℓ ∈ L1 : (ℓ, h, k) ∈ L3}` — unit equivalence,
//! * `C  = image of L2` — the constraint set.
//!
//! The derived relations are exposed both as [`Relation`] values and, for
//! the exhaustive scans, as per-pair bitmask rows (`u64` per row, possible
//! because carriers are capped at 64). The bitmask route is an internal
//! acceleration; unit tests pin it against the generic relation calculus.


use thiserror::Error;

use crate::bits;
use crate::exec;
use crate::rel::{FiniteSet, RelError, Relation};
use crate::table::{GroupoidTable, TableError};

/// Construction errors for relational groupoids.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("involution table has {got} entries for {expected} elements")]
    InvolutionLength { got: usize, expected: usize },
    #[error("involution value {value} at entry {entry} is out of range")]
    InvolutionRange { entry: usize, value: usize },
    #[error("structure relation must have shape G×G ↛ G over the carrier")]
    StructureShape,
    #[error("subgroup check failed: {0} is not closed/unital/inversive at element {1}")]
    NotSubgroup(String, usize),
    #[error("subgroup is not normal: conjugating {h} by {g} leaves the subgroup")]
    NotNormal { g: usize, h: usize },
    #[error("axiom {axiom} fails (witness {witness:?})")]
    AxiomsFailed { axiom: String, witness: Vec<String> },
    #[error("the relation given for a pair groupoid must be an equivalence; {0:?}")]
    NotEquivalence(crate::rel::EquivalenceWitness),
    #[error("action table has wrong shape or is not a group action at (g={g}, x={x})")]
    NotAnAction { g: usize, x: usize },
}

/// One entry of an axiom report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub witness: Option<AxiomWitness>,
}

/// The sub-axioms reported by [`RelationalGroupoid::check_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// Cyclic symmetry of `L`.
    A1,
    /// `I` is an involution.
    A2,
    /// `I∘L = L∘T∘(I×I)`.
    A3,
    /// `L3∘(L3×id) = L3∘(id×L3)`.
    A4,
    /// `L3∘(L1×L1) = L1`.
    A5,
    /// `L3∘(id×L1) = L2`.
    A6Unit,
    /// `L2∘L1 = L1`, `L2∘L2 = L2`, `L2∘L3 = L3`.
    A6Invariance,
    /// `L2` symmetric and `I∘L2 = L2∘I`.
    A6Symmetry,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::A1 => "A.1",
            Axiom::A2 => "A.2",
            Axiom::A3 => "A.3",
            Axiom::A4 => "A.4",
            Axiom::A5 => "A.5",
            Axiom::A6Unit => "A.6-i",
            Axiom::A6Invariance => "A.6-ii",
            Axiom::A6Symmetry => "A.6-iii",
        }
    }
}

/// The first failing tuple of an axiom equation, rendered with carrier
/// labels. `missing` says whether the tuple is absent from the left side
/// (true) or spurious on it (false).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomWitness {
    pub equation: &'static str,
    pub tuple: Vec<String>,
    pub missing: bool,
}

/// Result of a full axiom scan: one entry per sub-axiom, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub entries: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.entries.iter().find(|e| !e.passed)
    }
}

impl std::fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for e in &self.entries {
            write!(f, "{}: {}", e.axiom.name(), if e.passed { "PASS" } else { "FAIL" })?;
            if let Some(w) = &e.witness {
                write!(
                    f,
                    " [{} {} ({})]",
                    w.equation,
                    if w.missing { "misses" } else { "has extra" },
                    w.tuple.join(",")
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Which side a subset acts on when forming an action relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionSide {
    /// `R_S = {(z, z') | ∃s ∈ S : (z, s, z') ∈ L3}` — right action.
    Right,
    /// `L_S = {(z, z') | ∃s ∈ S : (s, z, z') ∈ L3}` — left action.
    Left,
}

/// A finite relational groupoid with its derived structure relations.
///
/// Values constructed by [`RelationalGroupoid::new`] have passed the full
/// axiom scan (`is_validated` is true); [`RelationalGroupoid::new_unchecked`]
/// performs only shape validation, which is what mutation testing needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalGroupoid {
    carrier: FiniteSet,
    inv: Vec<usize>,
    l: Relation,
    l1: Relation,
    l2: Relation,
    l3: Relation,
    constraint: Vec<usize>,
    validated: bool,
    // Packed rows for the scans: for a pair (a, b) the mask of all c with
    // (a, b, c) in the respective relation.
    n: usize,
    l_rows: Vec<u64>,
    l3_rows: Vec<u64>,
    l2_rows: Vec<u64>,
    l1_mask: u64,
    c_mask: u64,
}

impl RelationalGroupoid {
    /// Builds and fully validates a relational groupoid; errors with the
    /// first failing axiom if the scan does not pass.
    pub fn new(carrier: FiniteSet, l: Relation, inv: Vec<usize>) -> Result<Self, GroupoidError> {
        let g = Self::new_unchecked(carrier, l, inv)?;
        let report = g.check_axioms();
        if let Some(bad) = report.first_failure() {
            return Err(GroupoidError::AxiomsFailed {
                axiom: bad.axiom.name().into(),
                witness: bad
                    .witness
                    .as_ref()
                    .map(|w| w.tuple.clone())
                    .unwrap_or_default(),
            });
        }
        Ok(Self { validated: true, ..g })
    }

    /// Builds a relational groupoid from shape-valid data without checking
    /// the axioms. The derived relations are still computed; they are
    /// meaningful for diagnostics even on broken inputs.
    pub fn new_unchecked(
        carrier: FiniteSet,
        l: Relation,
        inv: Vec<usize>,
    ) -> Result<Self, GroupoidError> {
        let n = carrier.len();
        let expected = vec![carrier.clone(), carrier.clone()];
        if l.domain() != expected.as_slice() || l.codomain() != [carrier.clone()].as_slice() {
            return Err(GroupoidError::StructureShape);
        }
        if inv.len() != n {
            return Err(GroupoidError::InvolutionLength { got: inv.len(), expected: n });
        }
        if let Some((entry, &value)) = inv.iter().enumerate().find(|&(_, &v)| v >= n) {
            return Err(GroupoidError::InvolutionRange { entry, value });
        }

        let mut l_rows = vec![0u64; n * n];
        for t in l.tuples() {
            l_rows[t[0] * n + t[1]] |= 1 << t[2];
        }
        let l3_rows: Vec<u64> = l_rows.iter().map(|&m| bits::map_through(m, &inv)).collect();
        let mut l1_mask = 0u64;
        for g in 0..n {
            l1_mask |= l3_rows[g * n + inv[g]];
        }
        let mut l2_rows = vec![0u64; n];
        for h in 0..n {
            for ell in bits::iter(l1_mask) {
                l2_rows[h] |= l3_rows[ell * n + h];
            }
        }
        let c_mask = l2_rows.iter().fold(0, |acc, &m| acc | m);

        let pair_rel = |rows: &[u64]| {
            Relation::from_tuples(
                vec![carrier.clone(), carrier.clone()],
                vec![carrier.clone()],
                rows.iter().enumerate().flat_map(|(ab, &m)| {
                    bits::iter(m).map(move |c| vec![ab / n, ab % n, c])
                }),
            )
        };
        let l3 = pair_rel(&l3_rows)?;
        let l1 = Relation::subset(
            vec![carrier.clone()],
            bits::iter(l1_mask).map(|k| vec![k]),
        )?;
        let l2 = Relation::from_tuples(
            vec![carrier.clone()],
            vec![carrier.clone()],
            l2_rows
                .iter()
                .enumerate()
                .flat_map(|(h, &m)| bits::iter(m).map(move |k| vec![h, k])),
        )?;
        let constraint = bits::iter(c_mask).collect();

        Ok(RelationalGroupoid {
            carrier,
            inv,
            l,
            l1,
            l2,
            l3,
            constraint,
            validated: false,
            n,
            l_rows,
            l3_rows,
            l2_rows,
            l1_mask,
            c_mask,
        })
    }

    pub fn carrier(&self) -> &FiniteSet {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The involution as an index table.
    pub fn involution(&self) -> &[usize] {
        &self.inv
    }

    /// The defining relation `L : G×G ↛ G`.
    pub fn structure(&self) -> &Relation {
        &self.l
    }

    /// Derived unit constraints `L1 : ∗ ↛ G`.
    pub fn l1(&self) -> &Relation {
        &self.l1
    }

    /// Derived unit equivalence `L2 : G ↛ G`.
    pub fn l2(&self) -> &Relation {
        &self.l2
    }

    /// Derived multiplication graph `L3 : G×G ↛ G`.
    pub fn l3(&self) -> &Relation {
        &self.l3
    }

    /// The constraint set `C` (image of `L2`), ascending.
    pub fn constraint_elements(&self) -> &[usize] {
        &self.constraint
    }

    /// Membership in `C`.
    pub fn in_constraint(&self, g: usize) -> bool {
        self.c_mask & (1 << g) != 0
    }

    /// True when the value was produced by a validating constructor.
    pub fn is_validated(&self) -> bool {
        self.validated
    }

    /// Unit elements (members of `L1`), ascending.
    pub fn units(&self) -> Vec<usize> {
        bits::iter(self.l1_mask).collect()
    }

    pub fn is_unit(&self, g: usize) -> bool {
        self.l1_mask & (1 << g) != 0
    }

    /// `(h, k) ∈ L2`.
    pub fn l2_related(&self, h: usize, k: usize) -> bool {
        self.l2_rows[h] & (1 << k) != 0
    }

    /// The set product `g·h = {k | (g, h, k) ∈ L3}`, ascending.
    pub fn set_product(&self, g: usize, h: usize) -> Vec<usize> {
        bits::iter(self.l3_rows[g * self.n + h]).collect()
    }

    pub(crate) fn set_product_mask(&self, g: usize, h: usize) -> u64 {
        self.l3_rows[g * self.n + h]
    }

    /// The composable-pair fiber over `g`: all `(h, ℓ)` with
    /// `(h, ℓ, g) ∈ L3`, in lexicographic order.
    pub fn fiber(&self, g: usize) -> Vec<(usize, usize)> {
        let bit = 1u64 << g;
        let mut out = Vec::new();
        for h in 0..self.n {
            for ell in 0..self.n {
                if self.l3_rows[h * self.n + ell] & bit != 0 {
                    out.push((h, ell));
                }
            }
        }
        out
    }

    /// The fiber over `g` as a relation `∗ ↛ G×G`.
    pub fn fiber_relation(&self, g: usize) -> Relation {
        Relation::subset(
            vec![self.carrier.clone(), self.carrier.clone()],
            self.fiber(g).into_iter().map(|(h, ell)| vec![h, ell]),
        )
        .expect("fiber tuples are in range by construction")
    }

    /// Fiber rows: `rows[h]` is the mask of all `ℓ` with `(h, ℓ) ∈ fiber(g)`.
    pub(crate) fn fiber_rows(&self, g: usize) -> Vec<u64> {
        let bit = 1u64 << g;
        (0..self.n)
            .map(|h| {
                (0..self.n)
                    .filter(|&ell| self.l3_rows[h * self.n + ell] & bit != 0)
                    .fold(0, |acc, ell| acc | 1 << ell)
            })
            .collect()
    }

    /// All pairs `(g, h)` with nonempty set product, in lexicographic order.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n * self.n)
            .filter(|&ab| self.l3_rows[ab] != 0)
            .map(|ab| (ab / self.n, ab % self.n))
            .collect()
    }

    /// The action relation of a subset: `R_S` (right) or `L_S` (left),
    /// as a relation `G ↛ G`.
    pub fn action_relation(&self, subset: &[usize], side: ActionSide) -> Relation {
        let mut rows = vec![0u64; self.n];
        for z in 0..self.n {
            for &s in subset {
                rows[z] |= match side {
                    ActionSide::Right => self.l3_rows[z * self.n + s],
                    ActionSide::Left => self.l3_rows[s * self.n + z],
                };
            }
        }
        Relation::from_tuples(
            vec![self.carrier.clone()],
            vec![self.carrier.clone()],
            rows.iter()
                .enumerate()
                .flat_map(|(z, &m)| bits::iter(m).map(move |z2| vec![z, z2])),
        )
        .expect("action tuples are in range by construction")
    }

    pub(crate) fn right_action_rows(&self, s: usize) -> Vec<u64> {
        (0..self.n).map(|z| self.l3_rows[z * self.n + s]).collect()
    }

    fn labels(&self, t: &[usize]) -> Vec<String> {
        t.iter().map(|&i| self.carrier.label(i).to_string()).collect()
    }

    /// Runs the full axiom scan and reports one entry per sub-axiom, each
    /// with the lexicographically first witness on failure.
    pub fn check_axioms(&self) -> AxiomReport {
        let checks: Vec<fn(&Self) -> AxiomCheck> = vec![
            Self::check_a1,
            Self::check_a2,
            Self::check_a3,
            Self::check_a4,
            Self::check_a5,
            Self::check_a6_unit,
            Self::check_a6_invariance,
            Self::check_a6_symmetry,
        ];
        let entries = exec::map_indexed(checks.len(), |i| checks[i](self));
        AxiomReport { entries }
    }

    fn witness_entry(
        &self,
        axiom: Axiom,
        equation: &'static str,
        found: Option<(Vec<usize>, bool)>,
    ) -> AxiomCheck {
        let witness = found.map(|(tuple, missing)| AxiomWitness {
            equation,
            tuple: self.labels(&tuple),
            missing,
        });
        AxiomCheck { axiom, passed: witness.is_none(), witness }
    }

    /// First position where two row families differ, as (tuple, missing).
    fn first_row_difference(
        &self,
        lhs: impl Fn(usize, usize) -> u64,
        rhs: impl Fn(usize, usize) -> u64,
    ) -> Option<(Vec<usize>, bool)> {
        for a in 0..self.n {
            for b in 0..self.n {
                let (l, r) = (lhs(a, b), rhs(a, b));
                if l != r {
                    let c = (l ^ r).trailing_zeros() as usize;
                    return Some((vec![a, b, c], l & (1 << c) == 0));
                }
            }
        }
        None
    }

    fn check_a1(&self) -> AxiomCheck {
        let mut found = None;
        'outer: for a in 0..self.n {
            for b in 0..self.n {
                for c in bits::iter(self.l_rows[a * self.n + b]) {
                    if self.l_rows[b * self.n + c] & (1 << a) == 0 {
                        found = Some((vec![a, b, c], true));
                        break 'outer;
                    }
                }
            }
        }
        self.witness_entry(Axiom::A1, "(g,h,k)∈L ⇒ (h,k,g)∈L", found)
    }

    fn check_a2(&self) -> AxiomCheck {
        let mut seen = vec![false; self.n];
        let mut found = None;
        for g in 0..self.n {
            let iv = self.inv[g];
            if seen[iv] || self.inv[iv] != g {
                found = Some((vec![g], true));
                break;
            }
            seen[iv] = true;
        }
        self.witness_entry(Axiom::A2, "I∘I = id", found)
    }

    fn check_a3(&self) -> AxiomCheck {
        // I∘L = L∘T∘(I×I): the left side maps each L-row through I, the
        // right side is the L-row at the swapped, I-translated pair.
        let found = self.first_row_difference(
            |a, b| bits::map_through(self.l_rows[a * self.n + b], &self.inv),
            |a, b| self.l_rows[self.inv[b] * self.n + self.inv[a]],
        );
        self.witness_entry(Axiom::A3, "I∘L = L∘T∘(I×I)", found)
    }

    fn check_a4(&self) -> AxiomCheck {
        let n = self.n;
        let found = exec::first_failure(n * n * n, |idx| {
            let (g, rest) = (idx / (n * n), idx % (n * n));
            let (h, k) = (rest / n, rest % n);
            let mut lhs = 0u64;
            for y in bits::iter(self.l3_rows[g * n + h]) {
                lhs |= self.l3_rows[y * n + k];
            }
            let mut rhs = 0u64;
            for y in bits::iter(self.l3_rows[h * n + k]) {
                rhs |= self.l3_rows[g * n + y];
            }
            (lhs != rhs).then(|| {
                let x = (lhs ^ rhs).trailing_zeros() as usize;
                (vec![g, h, k, x], lhs & (1 << x) == 0)
            })
        })
        .map(|(_, w)| w);
        self.witness_entry(Axiom::A4, "L3∘(L3×id) = L3∘(id×L3)", found)
    }

    fn check_a5(&self) -> AxiomCheck {
        let mut lhs = 0u64;
        for h1 in bits::iter(self.l1_mask) {
            for h2 in bits::iter(self.l1_mask) {
                lhs |= self.l3_rows[h1 * self.n + h2];
            }
        }
        let found = (lhs != self.l1_mask).then(|| {
            let x = (lhs ^ self.l1_mask).trailing_zeros() as usize;
            (vec![x], lhs & (1 << x) == 0)
        });
        self.witness_entry(Axiom::A5, "L3∘(L1×L1) = L1", found)
    }

    fn check_a6_unit(&self) -> AxiomCheck {
        let mut found = None;
        for h in 0..self.n {
            let mut lhs = 0u64;
            for ell in bits::iter(self.l1_mask) {
                lhs |= self.l3_rows[h * self.n + ell];
            }
            if lhs != self.l2_rows[h] {
                let k = (lhs ^ self.l2_rows[h]).trailing_zeros() as usize;
                found = Some((vec![h, k], lhs & (1 << k) == 0));
                break;
            }
        }
        self.witness_entry(Axiom::A6Unit, "L3∘(id×L1) = L2", found)
    }

    fn check_a6_invariance(&self) -> AxiomCheck {
        // L2∘L1 = L1.
        let mut img = 0u64;
        for ell in bits::iter(self.l1_mask) {
            img |= self.l2_rows[ell];
        }
        if img != self.l1_mask {
            let x = (img ^ self.l1_mask).trailing_zeros() as usize;
            return self.witness_entry(
                Axiom::A6Invariance,
                "L2∘L1 = L1",
                Some((vec![x], img & (1 << x) == 0)),
            );
        }
        // L2∘L2 = L2.
        for g in 0..self.n {
            let mut row = 0u64;
            for y in bits::iter(self.l2_rows[g]) {
                row |= self.l2_rows[y];
            }
            if row != self.l2_rows[g] {
                let k = (row ^ self.l2_rows[g]).trailing_zeros() as usize;
                return self.witness_entry(
                    Axiom::A6Invariance,
                    "L2∘L2 = L2",
                    Some((vec![g, k], row & (1 << k) == 0)),
                );
            }
        }
        // L2∘L3 = L3 and L3∘(L2×L2) = L3.
        let n = self.n;
        let found = exec::first_failure(n * n, |gh| {
            let (g, h) = (gh / n, gh % n);
            let mut after = 0u64;
            for y in bits::iter(self.l3_rows[gh]) {
                after |= self.l2_rows[y];
            }
            if after != self.l3_rows[gh] {
                let k = (after ^ self.l3_rows[gh]).trailing_zeros() as usize;
                return Some(("L2∘L3 = L3", vec![g, h, k], after & (1 << k) == 0));
            }
            let mut before = 0u64;
            for g2 in bits::iter(self.l2_rows[g]) {
                for h2 in bits::iter(self.l2_rows[h]) {
                    before |= self.l3_rows[g2 * n + h2];
                }
            }
            if before != self.l3_rows[gh] {
                let k = (before ^ self.l3_rows[gh]).trailing_zeros() as usize;
                return Some(("L3∘(L2×L2) = L3", vec![g, h, k], before & (1 << k) == 0));
            }
            None
        })
        .map(|(_, w)| w);
        match found {
            None => self.witness_entry(Axiom::A6Invariance, "", None),
            Some((eq, tuple, missing)) => AxiomCheck {
                axiom: Axiom::A6Invariance,
                passed: false,
                witness: Some(AxiomWitness {
                    equation: eq,
                    tuple: self.labels(&tuple),
                    missing,
                }),
            },
        }
    }

    fn check_a6_symmetry(&self) -> AxiomCheck {
        for g in 0..self.n {
            for k in bits::iter(self.l2_rows[g]) {
                if self.l2_rows[k] & (1 << g) == 0 {
                    return self.witness_entry(
                        Axiom::A6Symmetry,
                        "L2 = L2†",
                        Some((vec![g, k], true)),
                    );
                }
            }
        }
        for g in 0..self.n {
            let lhs = bits::map_through(self.l2_rows[g], &self.inv);
            let rhs = self.l2_rows[self.inv[g]];
            if lhs != rhs {
                let k = (lhs ^ rhs).trailing_zeros() as usize;
                return self.witness_entry(
                    Axiom::A6Symmetry,
                    "I∘L2 = L2∘I",
                    Some((vec![g, k], lhs & (1 << k) == 0)),
                );
            }
        }
        self.witness_entry(Axiom::A6Symmetry, "", None)
    }

    /// Embeds a group with a chosen normal subgroup: the carrier is the
    /// group, `I` is inversion, and `L3 = {(a, b, a·b·h) | h ∈ H}`. The
    /// subgroup and normality conditions are verified first, the axioms
    /// afterwards.
    pub fn from_group_and_normal_subgroup(
        group: &GroupoidTable,
        subgroup: &[usize],
    ) -> Result<Self, GroupoidError> {
        if group.objects().len() != 1 {
            return Err(TableError::NotOneObject(group.objects().len()).into());
        }
        let n = group.morphisms().len();
        let e = group.unit(0);
        let mut h_mask = 0u64;
        for &h in subgroup {
            h_mask |= 1 << h;
        }
        if h_mask & (1 << e) == 0 {
            return Err(GroupoidError::NotSubgroup("missing identity".into(), e));
        }
        for &a in subgroup {
            if h_mask & (1 << group.inverse(a)) == 0 {
                return Err(GroupoidError::NotSubgroup("missing inverse".into(), a));
            }
            for &b in subgroup {
                let ab = group.compose(a, b).expect("group elements always compose");
                if h_mask & (1 << ab) == 0 {
                    return Err(GroupoidError::NotSubgroup("not closed".into(), ab));
                }
            }
        }
        for g in 0..n {
            for h in bits::iter(h_mask) {
                let conj = group
                    .compose(group.compose(g, h).unwrap(), group.inverse(g))
                    .unwrap();
                if h_mask & (1 << conj) == 0 {
                    return Err(GroupoidError::NotNormal { g, h });
                }
            }
        }
        let carrier = group.morphisms().clone();
        let inv: Vec<usize> = (0..n).map(|m| group.inverse(m)).collect();
        // L = I∘L3 read backwards: (a, b, I(a·b·h)).
        let mut tuples = Vec::with_capacity(n * n * subgroup.len());
        for a in 0..n {
            for b in 0..n {
                let ab = group.compose(a, b).unwrap();
                for h in bits::iter(h_mask) {
                    let abh = group.compose(ab, h).unwrap();
                    tuples.push(vec![a, b, inv[abh]]);
                }
            }
        }
        let l = Relation::from_tuples(
            vec![carrier.clone(), carrier.clone()],
            vec![carrier.clone()],
            tuples,
        )?;
        Self::new(carrier, l, inv)
    }

    /// Embeds an ordinary groupoid: `L` is the graph of `(α, β) ↦ (α∘β)⁻¹`
    /// over composable pairs and `I` is the inverse map.
    pub fn from_groupoid(table: &GroupoidTable) -> Result<Self, GroupoidError> {
        let carrier = table.morphisms().clone();
        let n = carrier.len();
        let inv: Vec<usize> = (0..n).map(|m| table.inverse(m)).collect();
        let tuples = table
            .composable_pairs()
            .into_iter()
            .map(|(a, b)| vec![a, b, inv[table.compose(a, b).unwrap()]]);
        let l = Relation::from_tuples(
            vec![carrier.clone(), carrier.clone()],
            vec![carrier.clone()],
            tuples,
        )?;
        Self::new(carrier, l, inv)
    }

    /// The relational pair groupoid of an equivalence relation `R` on a
    /// point set `X`: the carrier is `X×X`, `I` transposes, and the
    /// multiplication graph relates `((a,b), (c,d))` to every `(e,f)` with
    /// `b R c`, `e R a`, `f R d`.
    pub fn relational_pair_groupoid(
        points: &FiniteSet,
        relation: &Relation,
    ) -> Result<Self, GroupoidError> {
        let k = points.len();
        match relation.is_equivalence(&(0..k).collect::<Vec<_>>())? {
            Ok(()) => {}
            Err(w) => return Err(GroupoidError::NotEquivalence(w)),
        }
        let carrier = FiniteSet::new((0..k).flat_map(|a| {
            let points = points.clone();
            (0..k).map(move |b| format!("({},{})", points.label(a), points.label(b)))
        }))?;
        let idx = |a: usize, b: usize| a * k + b;
        let related = |a: usize, b: usize| relation.contains(&[a, b]);
        let inv: Vec<usize> = (0..k)
            .flat_map(|a| (0..k).map(move |b| idx(b, a)))
            .collect();
        let mut tuples = Vec::new();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if !related(b, c) {
                        continue;
                    }
                    for d in 0..k {
                        for e in 0..k {
                            if !related(e, a) {
                                continue;
                            }
                            for f in 0..k {
                                if related(f, d) {
                                    // L = I∘L3: the third slot carries the
                                    // transposed product (f, e).
                                    tuples.push(vec![idx(a, b), idx(c, d), idx(f, e)]);
                                }
                            }
                        }
                    }
                }
            }
        }
        let l = Relation::from_tuples(
            vec![carrier.clone(), carrier.clone()],
            vec![carrier.clone()],
            tuples,
        )?;
        Self::new(carrier, l, inv)
    }

    /// Rebuilds `L` from the derived data: `I∘L3` must recover `L` on any
    /// validated value.
    pub fn rebuild_structure(&self) -> Result<Relation, GroupoidError> {
        let graph_i = Relation::graph_of_map(&self.carrier, &self.carrier, &self.inv)?;
        Ok(self.l3.compose(&graph_i)?)
    }
}

/// Scans the fiber partition laws: two nonempty fibers are equal exactly
/// when the base points are `L2`-related, distinct fibers are disjoint,
/// and elements off the constraint set (empty fibers) are `L2`-related to
/// nothing. Returns the first offending pair.
pub fn check_fiber_partition(g: &RelationalGroupoid) -> Result<(), (usize, usize)> {
    let n = g.len();
    let rows: Vec<Vec<u64>> = exec::map_indexed(n, |k| g.fiber_rows(k));
    let empty: Vec<bool> = rows.iter().map(|r| r.iter().all(|&m| m == 0)).collect();
    for a in 0..n {
        for b in a..n {
            let related = g.l2_related(a, b);
            if empty[a] || empty[b] {
                if related {
                    return Err((a, b));
                }
                continue;
            }
            if a == b {
                continue;
            }
            let equal = rows[a] == rows[b];
            if equal != related {
                return Err((a, b));
            }
            if !equal && rows[a].iter().zip(&rows[b]).any(|(&x, &y)| x & y != 0) {
                return Err((a, b));
            }
        }
    }
    Ok(())
}

/// Scans the right-translation law: for every composable pair `(g, h)` and
/// every `k ∈ g·h`, pushing the second fiber coordinate through `R_h` maps
/// `fiber(g)` onto `fiber(k)`, i.e. `(id × R_h)∘fiber(g) = fiber(k)`.
/// Returns the first offending `(g, h, k)`.
pub fn check_fiber_translation(g: &RelationalGroupoid) -> Result<(), (usize, usize, usize)> {
    let n = g.len();
    let fibers: Vec<Vec<u64>> = exec::map_indexed(n, |k| g.fiber_rows(k));
    let failure = exec::first_failure(n * n, |gh| {
        let (a, b) = (gh / n, gh % n);
        let prod = g.set_product_mask(a, b);
        if prod == 0 {
            return None;
        }
        let rh = g.right_action_rows(b);
        let translated: Vec<u64> = (0..n)
            .map(|g1| bits::iter(fibers[a][g1]).fold(0, |acc, g2| acc | rh[g2]))
            .collect();
        bits::iter(prod)
            .find(|&k| translated != fibers[k])
            .map(|k| (a, b, k))
    });
    match failure {
        None => Ok(()),
        Some((_, w)) => Err(w),
    }
}

/// Scans the two-sided translation law: for every composable pair `(g, h)`,
/// `(L_{I(g)} × R_h)∘fiber(g) = fiber(h)`. Returns the first offending
/// pair.
pub fn check_fiber_left_translation(g: &RelationalGroupoid) -> Result<(), (usize, usize)> {
    let n = g.len();
    let fibers: Vec<Vec<u64>> = exec::map_indexed(n, |k| g.fiber_rows(k));
    let failure = exec::first_failure(n * n, |gh| {
        let (a, b) = (gh / n, gh % n);
        if g.set_product_mask(a, b) == 0 {
            return None;
        }
        let rh = g.right_action_rows(b);
        let translated: Vec<u64> = (0..n)
            .map(|g1| bits::iter(fibers[a][g1]).fold(0, |acc, g2| acc | rh[g2]))
            .collect();
        let ia = g.involution()[a];
        let mut swept = vec![0u64; n];
        for g1 in 0..n {
            if translated[g1] == 0 {
                continue;
            }
            for z1 in bits::iter(g.set_product_mask(ia, g1)) {
                swept[z1] |= translated[g1];
            }
        }
        (swept != fibers[b]).then_some((a, b))
    });
    match failure {
        None => Ok(()),
        Some((_, w)) => Err(w),
    }
}

/// Scans `R_h∘R_g = R_{g·h}` over all pairs, where the action of a set is
/// the union of element actions. Returns the first offending pair.
pub fn check_action_composition(g: &RelationalGroupoid) -> Result<(), (usize, usize)> {
    let n = g.len();
    let failure = exec::first_failure(n * n, |gh| {
        let (a, b) = (gh / n, gh % n);
        let ra = g.right_action_rows(a);
        let rb = g.right_action_rows(b);
        let composed: Vec<u64> = (0..n)
            .map(|z| bits::iter(ra[z]).fold(0, |acc, y| acc | rb[y]))
            .collect();
        let prod = g.set_product_mask(a, b);
        let direct: Vec<u64> = (0..n)
            .map(|z| bits::iter(prod).fold(0, |acc, x| acc | g.l3_rows[z * n + x]))
            .collect();
        (composed != direct).then_some((a, b))
    });
    match failure {
        None => Ok(()),
        Some((_, w)) => Err(w),
    }
}

/// Checks that every nonempty fiber sits over the constraint set: if
/// `fiber(k) ≠ ∅` then `k ∈ C`. This is the structural reason convolution
/// products are supported in `C`. Returns the first offender.
pub fn check_fibers_in_constraint(g: &RelationalGroupoid) -> Result<(), usize> {
    let n = g.len();
    for ab in 0..n * n {
        let outside = g.l3_rows[ab] & !g.c_mask;
        if outside != 0 {
            return Err(outside.trailing_zeros() as usize);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::GroupoidTable;

    pub(crate) fn z4_mod_z2() -> RelationalGroupoid {
        let table: Vec<Vec<usize>> =
            (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect();
        let group =
            GroupoidTable::one_object_group(FiniteSet::of_size(4).unwrap(), &table).unwrap();
        RelationalGroupoid::from_group_and_normal_subgroup(&group, &[0, 2]).unwrap()
    }

    #[test]
    fn z4_mod_z2_has_the_expected_derived_relations() {
        let g = z4_mod_z2();
        assert_eq!(g.l3().len(), 32);
        assert_eq!(g.units(), vec![0, 2]);
        assert_eq!(g.constraint_elements(), &[0, 1, 2, 3]);
        assert!(g.l2_related(1, 3));
        assert!(!g.l2_related(0, 1));
        assert_eq!(g.set_product(1, 1), vec![0, 2]);
        assert!(g.is_validated());
        assert!(g.check_axioms().all_passed());
    }

    #[test]
    fn fibers_match_the_worked_example() {
        let g = z4_mod_z2();
        assert_eq!(
            g.fiber(0),
            vec![(0, 0), (0, 2), (1, 1), (1, 3), (2, 0), (2, 2), (3, 1), (3, 3)]
        );
        assert_eq!(
            g.fiber(1),
            vec![(0, 1), (0, 3), (1, 0), (1, 2), (2, 1), (2, 3), (3, 0), (3, 2)]
        );
        assert_eq!(g.fiber(0), g.fiber(2));
        assert_eq!(g.fiber(1), g.fiber(3));
    }

    #[test]
    fn embedded_groupoid_derives_units_and_diagonal() {
        let pts = FiniteSet::new(["p", "q", "r"]).unwrap();
        let table = GroupoidTable::pair_groupoid(&pts).unwrap();
        let g = RelationalGroupoid::from_groupoid(&table).unwrap();
        // Units are the three identity pairs (p,p), (q,q), (r,r).
        assert_eq!(g.units(), vec![0, 4, 8]);
        // L2 is the diagonal.
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(g.l2_related(a, b), a == b);
            }
        }
        assert_eq!(g.constraint_elements().len(), 9);
        assert!(g.check_axioms().all_passed());
    }

    #[test]
    fn axiom_equations_agree_with_the_generic_relation_calculus() {
        // The bitmask scans are an acceleration; pin them against the same
        // equations phrased through compose/product/dagger on Relation.
        let g = z4_mod_z2();
        let carrier = g.carrier().clone();
        let graph_i =
            Relation::graph_of_map(&carrier, &carrier, g.involution()).unwrap();
        let id = Relation::identity(std::slice::from_ref(&carrier)).unwrap();

        // L3 = I∘L (diagrammatic: L then graph(I)).
        let l3 = g.structure().compose(&graph_i).unwrap();
        assert_eq!(&l3, g.l3());

        // L1 = {k | (g, I g, k) ∈ L3} via the subset of the graph of I.
        let graph_i_subset = Relation::subset(
            vec![carrier.clone(), carrier.clone()],
            g.involution().iter().enumerate().map(|(a, &b)| vec![a, b]),
        )
        .unwrap();
        let l1 = graph_i_subset.compose(&l3).unwrap();
        assert_eq!(&l1, g.l1());

        // L2 = L3∘(L1×id) in diagrammatic order: pair each h with a unit.
        let l1_times_id = l1.product(&id).unwrap();
        let l2 = l1_times_id.compose(&l3).unwrap();
        assert_eq!(&l2, g.l2());

        // A.3: I∘L = L∘T∘(I×I).
        let lhs = g.structure().compose(&graph_i).unwrap();
        let swap = Relation::swap_graph(&carrier, &carrier).unwrap();
        let rhs = graph_i
            .product(&graph_i)
            .unwrap()
            .compose(&swap)
            .unwrap()
            .compose(g.structure())
            .unwrap();
        assert_eq!(lhs, rhs);

        // A.4: L3∘(L3×id) = L3∘(id×L3).
        let lhs = l3.product(&id).unwrap().compose(&l3).unwrap();
        let rhs = id.product(&l3).unwrap().compose(&l3).unwrap();
        assert_eq!(lhs, rhs);

        // A.6-ii: L2∘L3 = L3 (diagrammatic: L3 then L2), and the
        // two-sided version L3∘(L2×L2) = L3.
        assert_eq!(l3.compose(&l2).unwrap(), l3);
        assert_eq!(l2.product(&l2).unwrap().compose(&l3).unwrap(), l3);

        // A.6-iii: I∘L2 = L2∘I and symmetry.
        assert_eq!(
            l2.compose(&graph_i).unwrap(),
            graph_i.compose(&l2).unwrap()
        );
        assert_eq!(l2.dagger(), l2);

        // A.5: L3∘(L1×L1) = L1.
        let l1xl1 = l1.product(&l1).unwrap();
        assert_eq!(l1xl1.compose(&l3).unwrap(), l1);
    }

    #[test]
    fn dropped_tuple_is_detected_with_a_witness() {
        let g = z4_mod_z2();
        let kept: Vec<Vec<usize>> = g.structure().tuples().skip(1).collect();
        let l = Relation::from_tuples(
            vec![g.carrier().clone(), g.carrier().clone()],
            vec![g.carrier().clone()],
            kept,
        )
        .unwrap();
        let broken =
            RelationalGroupoid::new_unchecked(g.carrier().clone(), l, g.involution().to_vec())
                .unwrap();
        assert!(!broken.is_validated());
        let report = broken.check_axioms();
        assert!(!report.all_passed());
        let bad = report.first_failure().unwrap();
        assert!(bad.witness.is_some());
    }

    #[test]
    fn subgroup_and_normality_violations_are_reported() {
        // S3 as permutations of three points; transpositions generate
        // non-normal subgroups.
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let compose = |a: [usize; 3], b: [usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|&a| {
                perms
                    .iter()
                    .map(|&b| perms.iter().position(|&c| c == compose(a, b)).unwrap())
                    .collect()
            })
            .collect();
        let s3 =
            GroupoidTable::one_object_group(FiniteSet::of_size(6).unwrap(), &table).unwrap();

        let not_closed = RelationalGroupoid::from_group_and_normal_subgroup(&s3, &[0, 1, 2]);
        assert!(matches!(not_closed, Err(GroupoidError::NotSubgroup(..))));

        let not_normal = RelationalGroupoid::from_group_and_normal_subgroup(&s3, &[0, 1]);
        assert!(matches!(not_normal, Err(GroupoidError::NotNormal { .. })));

        // A3 = {id, (012), (021)} is normal; the construction passes.
        let a3 = RelationalGroupoid::from_group_and_normal_subgroup(&s3, &[0, 4, 5]).unwrap();
        assert_eq!(a3.units().len(), 3);
        assert_eq!(a3.constraint_elements().len(), 6);
    }

    #[test]
    fn relational_pair_groupoid_identity_relation_is_the_pair_embedding() {
        let pts = FiniteSet::new(["x", "y", "z"]).unwrap();
        let idrel = Relation::identity(std::slice::from_ref(&pts)).unwrap();
        let g = RelationalGroupoid::relational_pair_groupoid(&pts, &idrel).unwrap();
        let table = GroupoidTable::pair_groupoid(&pts).unwrap();
        let embedded = RelationalGroupoid::from_groupoid(&table).unwrap();
        assert_eq!(g.structure(), embedded.structure());
        assert_eq!(g.involution(), embedded.involution());
    }

    #[test]
    fn relational_pair_groupoid_total_relation_relates_everything() {
        let pts = FiniteSet::new(["x", "y"]).unwrap();
        let total = Relation::from_tuples(
            vec![pts.clone()],
            vec![pts.clone()],
            (0..2).flat_map(|a| (0..2).map(move |b| vec![a, b])),
        )
        .unwrap();
        let g = RelationalGroupoid::relational_pair_groupoid(&pts, &total).unwrap();
        // L1 = R = all four pairs; L2 = everything.
        assert_eq!(g.units().len(), 4);
        assert_eq!(g.l2().len(), 16);
        assert!(g.check_axioms().all_passed());
    }

    #[test]
    fn action_relation_of_the_units_is_unit_equivalence() {
        let g = z4_mod_z2();
        let r = g.action_relation(&g.units(), ActionSide::Right);
        assert_eq!(&r, g.l2());
        // And R_1∘R_1 agrees with the action of the set product 1·1 = {0, 2}.
        let r1 = g.action_relation(&[1], ActionSide::Right);
        let composed = r1.compose(&r1).unwrap();
        let r02 = g.action_relation(&[0, 2], ActionSide::Right);
        assert_eq!(composed, r02);
    }

    #[test]
    fn fiber_laws_hold_on_the_running_example() {
        let g = z4_mod_z2();
        assert_eq!(check_fiber_partition(&g), Ok(()));
        assert_eq!(check_fiber_translation(&g), Ok(()));
        assert_eq!(check_fiber_left_translation(&g), Ok(()));
        assert_eq!(check_action_composition(&g), Ok(()));
        assert_eq!(check_fibers_in_constraint(&g), Ok(()));
    }

    #[test]
    fn fiber_translation_agrees_with_generic_relation_ops() {
        let g = z4_mod_z2();
        let carrier = g.carrier().clone();
        let id = Relation::identity(std::slice::from_ref(&carrier)).unwrap();
        for (a, b) in g.composable_pairs() {
            let rh = g.action_relation(&[b], ActionSide::Right);
            let lhs = g
                .fiber_relation(a)
                .compose(&id.product(&rh).unwrap())
                .unwrap();
            for k in g.set_product(a, b) {
                assert_eq!(lhs, g.fiber_relation(k), "translation failed at ({a},{b},{k})");
            }
        }
    }

    #[test]
    fn structure_round_trips_through_the_derived_relations() {
        let g = z4_mod_z2();
        assert_eq!(&g.rebuild_structure().unwrap(), g.structure());
    }
}
