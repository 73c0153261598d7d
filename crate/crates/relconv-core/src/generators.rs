//! Test-corpus constructors: group tables, relational groups, action
//! groupoids, the example Haar systems, axiom-breaking mutations, and
//! seeded random instances.
//!
//! Everything here is deterministic. Group tables are built from explicit
//! permutation or residue arithmetic and validated by
//! [`GroupoidTable::one_object_group`], so a slip in a multiplication rule
//! surfaces as a construction error rather than a wrong table.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::groupoid::{GroupoidError, RelationalGroupoid};
use crate::haar::{
    build_from_conditionals, build_split, build_strongly_split, quotient_cells, HaarError,
    Measure, RelationalHaarSystem, RightHaarSystem,
};
use crate::reduction::{quotient_groupoid, QuotientData, ReductionError};
use crate::rel::{FiniteSet, RelError, Relation};
use crate::scalar::{rat, Rat};
use crate::table::{GroupoidTable, TableError};

/// Errors from corpus construction.
#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("{m} does not divide {n}")]
    NotDivisor { n: usize, m: usize },
    #[error("action is not a right action: point {x} under morphism {g}")]
    BadAction { x: usize, g: usize },
    #[error("action table has the wrong shape")]
    ActionShape,
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Haar(#[from] HaarError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Rel(#[from] RelError),
}

/// The cyclic group `Z_n` with elements labeled by residues.
pub fn cyclic_table(n: usize) -> Result<GroupoidTable, GeneratorError> {
    let table: Vec<Vec<usize>> =
        (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    Ok(GroupoidTable::one_object_group(FiniteSet::of_size(n)?, &table)?)
}

/// Builds a group table from a faithful list of permutations, multiplying
/// by composition (`a·b` applies `b` first). The list must be closed;
/// the group laws are re-validated by the table constructor.
fn permutation_group(
    labels: Vec<String>,
    perms: &[Vec<usize>],
) -> Result<GroupoidTable, GeneratorError> {
    let index: BTreeMap<&[usize], usize> =
        perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let n = perms.len();
    let mut table = vec![vec![0usize; n]; n];
    for (a, pa) in perms.iter().enumerate() {
        for (b, pb) in perms.iter().enumerate() {
            let composed: Vec<usize> = (0..pa.len()).map(|v| pa[pb[v]]).collect();
            table[a][b] = *index
                .get(composed.as_slice())
                .expect("permutation groups are closed under composition");
        }
    }
    Ok(GroupoidTable::one_object_group(FiniteSet::new(labels)?, &table)?)
}

/// The dihedral group `D_n` of order `2n`, via its permutation action on
/// the `n`-gon: indices `0..n` are the rotations `r^i`, indices `n..2n`
/// the reflections `s·r^i`.
pub fn dihedral_table(n: usize) -> Result<GroupoidTable, GeneratorError> {
    let mut labels = Vec::new();
    let mut perms = Vec::new();
    for i in 0..n {
        labels.push(format!("r{i}"));
        perms.push((0..n).map(|v| (v + i) % n).collect());
    }
    for i in 0..n {
        labels.push(format!("sr{i}"));
        perms.push((0..n).map(|v| (n - (v + i) % n) % n).collect());
    }
    permutation_group(labels, &perms)
}

/// The symmetric group `S_k`, with elements enumerated lexicographically
/// as permutations of `0..k` and labeled by their one-line notation.
pub fn symmetric_table(k: usize) -> Result<GroupoidTable, GeneratorError> {
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for v in 0..k {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, v);
                    q
                })
            })
            .collect();
    }
    perms.sort();
    let labels = perms
        .iter()
        .map(|p| p.iter().map(|v| v.to_string()).collect::<String>())
        .collect();
    permutation_group(labels, &perms)
}

/// True for even permutations (inversion-count parity).
fn is_even(perm: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Indices of the alternating subgroup inside [`symmetric_table`]'s
/// enumeration of `S_k`.
pub fn alternating_indices(k: usize) -> Vec<usize> {
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for v in 0..k {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, v);
                    q
                })
            })
            .collect();
    }
    perms.sort();
    perms
        .iter()
        .enumerate()
        .filter(|(_, p)| is_even(p))
        .map(|(i, _)| i)
        .collect()
}

/// The relational group `Z_n` over the normal subgroup `⟨m⟩`; its quotient
/// is `Z_m`.
pub fn cyclic_relational(n: usize, m: usize) -> Result<RelationalGroupoid, GeneratorError> {
    if m == 0 || n % m != 0 {
        return Err(GeneratorError::NotDivisor { n, m });
    }
    let subgroup: Vec<usize> = (0..n / m).map(|i| i * m).collect();
    Ok(RelationalGroupoid::from_group_and_normal_subgroup(
        &cyclic_table(n)?,
        &subgroup,
    )?)
}

/// The relational group `D_n` over the rotation subgroup `⟨r^k⟩` (always
/// normal); requires `k | n`.
pub fn dihedral_relational(n: usize, k: usize) -> Result<RelationalGroupoid, GeneratorError> {
    if k == 0 || n % k != 0 {
        return Err(GeneratorError::NotDivisor { n, m: k });
    }
    let subgroup: Vec<usize> = (0..n / k).map(|i| i * k).collect();
    Ok(RelationalGroupoid::from_group_and_normal_subgroup(
        &dihedral_table(n)?,
        &subgroup,
    )?)
}

/// The action groupoid `G ⋉ X` of a right action `x·g = action[x][g]`,
/// together with its canonical Haar system (normalized counting on each
/// fiber, which is in bijection with `G`). The morphism `(g, x)` runs
/// from `x·g` to `x`; composition is `(g, x)∘(h, x·g) = (g·h, x)`.
pub fn action_groupoid(
    group: &GroupoidTable,
    action: &[Vec<usize>],
) -> Result<(GroupoidTable, RightHaarSystem), GeneratorError> {
    if group.objects().len() != 1 {
        return Err(TableError::NotOneObject(group.objects().len()).into());
    }
    let n = group.morphisms().len();
    let points = action.len();
    if points == 0 || action.iter().any(|row| row.len() != n) {
        return Err(GeneratorError::ActionShape);
    }
    let act = |x: usize, g: usize| action[x][g];
    let e = group.unit(0);
    for x in 0..points {
        if action[x].iter().any(|&y| y >= points) {
            return Err(GeneratorError::ActionShape);
        }
        if act(x, e) != x {
            return Err(GeneratorError::BadAction { x, g: e });
        }
        for g in 0..n {
            for h in 0..n {
                let gh = group.compose(g, h).expect("one-object groups compose totally");
                if act(act(x, g), h) != act(x, gh) {
                    return Err(GeneratorError::BadAction { x, g });
                }
            }
        }
    }

    let morphism_labels = (0..n).flat_map(|g| {
        (0..points).map(move |x| format!("({g},{x})"))
    });
    let object_labels = (0..points).map(|x| x.to_string());
    let idx = |g: usize, x: usize| g * points + x;
    let source: Vec<usize> = (0..n * points).map(|m| act(m % points, m / points)).collect();
    let target: Vec<usize> = (0..n * points).map(|m| m % points).collect();
    let mut mult = BTreeMap::new();
    for g in 0..n {
        for h in 0..n {
            let gh = group.compose(g, h).unwrap();
            for x in 0..points {
                mult.insert((idx(g, x), idx(h, act(x, g))), idx(gh, x));
            }
        }
    }
    let unit: Vec<usize> = (0..points).map(|x| idx(e, x)).collect();
    let inverse: Vec<usize> = (0..n * points)
        .map(|m| {
            let (g, x) = (m / points, m % points);
            idx(group.inverse(g), act(x, g))
        })
        .collect();
    let table = GroupoidTable::new(
        FiniteSet::new(morphism_labels)?,
        FiniteSet::new(object_labels)?,
        source,
        target,
        mult,
        unit,
        inverse,
    )?;
    let haar = RightHaarSystem::normalized_counting(&table)?;
    Ok((table, haar))
}

/// Extends a relational groupoid by one fresh element that is fixed by
/// the involution and absent from all relations. The extension stays
/// axiom-valid, and the new element falls outside the constraint set, so
/// its delta function spans the vanishing ideal.
pub fn isolated_extension(
    g: &RelationalGroupoid,
    label: &str,
) -> Result<RelationalGroupoid, GeneratorError> {
    let n = g.len();
    let labels = (0..n)
        .map(|e| g.carrier().label(e).to_string())
        .chain([label.to_string()]);
    let carrier = FiniteSet::new(labels)?;
    let l = Relation::from_tuples(
        vec![carrier.clone(), carrier.clone()],
        vec![carrier.clone()],
        g.structure().tuples(),
    )?;
    let mut inv: Vec<usize> = g.involution().to_vec();
    inv.push(n);
    Ok(RelationalGroupoid::new(carrier, l, inv)?)
}

/// A single structural mutation, used to produce negative test cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationOp {
    /// Remove one tuple from `L` (the seed selects which, in sorted
    /// order).
    DropTuple,
    /// Insert one absent tuple into `L` (the seed selects which, in
    /// sorted order of the complement).
    AddTuple,
    /// Swap two entries of the involution table (the seed selects the
    /// positions; equal positions make this a no-op).
    SwapInvolution,
}

/// Applies one deterministic mutation and rebuilds the value without the
/// axiom gate, so checkers can inspect the damage. The result usually
/// violates at least one axiom; callers assert which.
pub fn mutate(
    g: &RelationalGroupoid,
    op: MutationOp,
    seed: u64,
) -> Result<RelationalGroupoid, GeneratorError> {
    let carrier = g.carrier().clone();
    let n = g.len();
    let shape = vec![carrier.clone(), carrier.clone()];
    let mut tuples: Vec<Vec<usize>> = g.structure().tuples().collect();
    let mut inv = g.involution().to_vec();
    match op {
        MutationOp::DropTuple => {
            tuples.remove(seed as usize % tuples.len());
        }
        MutationOp::AddTuple => {
            let absent: Vec<Vec<usize>> = (0..n)
                .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| vec![a, b, c])))
                .filter(|t| !g.structure().contains(t))
                .collect();
            tuples.push(absent[seed as usize % absent.len()].clone());
        }
        MutationOp::SwapInvolution => {
            let a = seed as usize % n;
            let b = (seed as usize / n) % n;
            inv.swap(a, b);
        }
    }
    let l = Relation::from_tuples(shape, vec![carrier.clone()], tuples)?;
    Ok(RelationalGroupoid::new_unchecked(carrier, l, inv)?)
}

/// The uniform strongly split system: normalized counting on the quotient
/// fibers and the uniform marginal on each class. On `Z4/Z2` this is the
/// system weighting every fiber pair by `1/8`.
pub fn uniform_strongly_split(
    g: &RelationalGroupoid,
    qd: &QuotientData,
) -> Result<RelationalHaarSystem, GeneratorError> {
    let base = RightHaarSystem::normalized_counting(qd.quotient())?;
    Ok(build_strongly_split(g, qd, &base, &uniform_tau(qd))?)
}

fn uniform_tau(qd: &QuotientData) -> BTreeMap<usize, Measure<usize>> {
    qd.classes()
        .iter()
        .enumerate()
        .map(|(i, members)| {
            let w = Rat::new(1.into(), members.len().into());
            (
                i,
                Measure::from_weights(members.iter().map(|&m| (m, w.clone())))
                    .expect("uniform weights are positive"),
            )
        })
        .collect()
}

/// The split-but-not-invariant example: each element weights its own
/// class by a point mass at itself and every other class uniformly. The
/// point masses sit at different representatives, so invariance fails.
pub fn dirac_split_system(
    g: &RelationalGroupoid,
    qd: &QuotientData,
) -> Result<RelationalHaarSystem, GeneratorError> {
    let base = RightHaarSystem::normalized_counting(qd.quotient())?;
    let uniform = uniform_tau(qd);
    let taus: BTreeMap<usize, BTreeMap<usize, Measure<usize>>> = g
        .constraint_elements()
        .iter()
        .map(|&e| {
            let own = qd.class_of(e).expect("constrained elements have classes");
            let mut tau = uniform.clone();
            tau.insert(own, Measure::from_weights([(e, rat(1, 1))]).unwrap());
            (e, tau)
        })
        .collect();
    Ok(build_split(g, qd, &base, &taus)?)
}

/// The invariant-but-not-split example: within every fiber cell the
/// conditional spreads mass `1/3` over three of the rectangle's corners,
/// leaving the fourth empty, identically across each class. Classes must
/// have at least two members.
pub fn non_product_system(
    g: &RelationalGroupoid,
    qd: &QuotientData,
) -> Result<RelationalHaarSystem, GeneratorError> {
    let base = RightHaarSystem::normalized_counting(qd.quotient())?;
    let third = rat(1, 3);
    let mut conditionals: BTreeMap<usize, BTreeMap<(usize, usize), Measure<(usize, usize)>>> =
        BTreeMap::new();
    for class in 0..qd.classes().len() {
        let mut cells = BTreeMap::new();
        for ((c1, c2), _) in quotient_cells(qd, &base, class) {
            let rows = &qd.classes()[c1];
            let cols = &qd.classes()[c2];
            let cond = Measure::from_weights([
                ((rows[0], cols[0]), third.clone()),
                ((rows[0], cols[1]), third.clone()),
                ((rows[1], cols[0]), third.clone()),
            ])
            .expect("weights are positive");
            cells.insert((c1, c2), cond);
        }
        conditionals.insert(class, cells);
    }
    Ok(build_from_conditionals(g, qd, &base, &conditionals)?)
}

/// The non-associativity counterexample: a split, invariant system whose
/// class marginals depend on the element. Elements of the unit class use
/// a point mass at the second member of that class; other elements use a
/// point mass at the first member of their own class. Classes must have
/// at least two members.
pub fn non_associative_system(
    g: &RelationalGroupoid,
    qd: &QuotientData,
) -> Result<RelationalHaarSystem, GeneratorError> {
    let base = RightHaarSystem::normalized_counting(qd.quotient())?;
    let uniform = uniform_tau(qd);
    let taus: BTreeMap<usize, BTreeMap<usize, Measure<usize>>> = g
        .constraint_elements()
        .iter()
        .map(|&e| {
            let own = qd.class_of(e).expect("constrained elements have classes");
            let mut tau = uniform.clone();
            let (class, member) = if own == 0 {
                (0, qd.classes()[0][1])
            } else {
                (own, qd.classes()[own][0])
            };
            tau.insert(class, Measure::from_weights([(member, rat(1, 1))]).unwrap());
            (e, tau)
        })
        .collect();
    Ok(build_split(g, qd, &base, &taus)?)
}

/// A seeded random relational group of order at most 24: a cyclic or
/// dihedral group over a random normal subgroup of rotations.
pub fn random_relational_group(seed: u64) -> RelationalGroupoid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let divisor_of = |rng: &mut ChaCha8Rng, n: usize| {
        let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
        divisors[rng.gen_range(0..divisors.len())]
    };
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(2..=24);
        let m = divisor_of(&mut rng, n);
        cyclic_relational(n, m).expect("m divides n by construction")
    } else {
        let n = rng.gen_range(3..=12);
        let k = divisor_of(&mut rng, n);
        dihedral_relational(n, k).expect("k divides n by construction")
    }
}

/// Expected classification flags for a corpus entry. `None` leaves a
/// property unasserted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpectedProperties {
    pub axioms: bool,
    pub haar: Option<bool>,
    pub l2_invariant: Option<bool>,
    pub split: Option<bool>,
    pub strongly_split: Option<bool>,
    pub associative: Option<bool>,
}

/// One named corpus instance with its optional Haar system and expected
/// classification.
pub struct CorpusEntry {
    pub name: &'static str,
    pub groupoid: RelationalGroupoid,
    pub haar: Option<RelationalHaarSystem>,
    pub expected: ExpectedProperties,
}

impl CorpusEntry {
    /// Recomputes every asserted flag and returns the first mismatch.
    pub fn verify(&self) -> Result<(), String> {
        let mismatch = |what: &str, got: bool, want: bool| {
            Err(format!("{}: {what} was {got}, expected {want}", self.name))
        };
        let axioms = self.groupoid.check_axioms().all_passed();
        if axioms != self.expected.axioms {
            return mismatch("axioms", axioms, self.expected.axioms);
        }
        if !axioms {
            return Ok(());
        }
        let qd = quotient_groupoid(&self.groupoid)
            .map_err(|e| format!("{}: quotient failed: {e}", self.name))?;
        let Some(sys) = &self.haar else { return Ok(()) };
        let checks: [(&str, bool, Option<bool>); 5] = [
            (
                "haar",
                crate::haar::check_relational_haar(&self.groupoid, &qd, sys).all_passed(),
                self.expected.haar,
            ),
            (
                "l2-invariance",
                crate::haar::check_l2_invariant(&self.groupoid, sys).is_ok(),
                self.expected.l2_invariant,
            ),
            (
                "split",
                crate::haar::split_structure(&self.groupoid, &qd, sys).is_ok(),
                self.expected.split,
            ),
            (
                "strongly-split",
                crate::haar::strongly_split_structure(&self.groupoid, &qd, sys).is_ok(),
                self.expected.strongly_split,
            ),
            (
                "associativity",
                crate::convolution::check_associativity(&self.groupoid, sys).is_ok(),
                self.expected.associative,
            ),
        ];
        for (what, got, want) in checks {
            if let Some(want) = want {
                if got != want {
                    return mismatch(what, got, want);
                }
            }
        }
        Ok(())
    }
}

fn example_entry(
    name: &'static str,
    groupoid: RelationalGroupoid,
    system: fn(&RelationalGroupoid, &QuotientData) -> Result<RelationalHaarSystem, GeneratorError>,
    expected: ExpectedProperties,
) -> CorpusEntry {
    let qd = quotient_groupoid(&groupoid).expect("corpus groupoids reduce");
    let haar = Some(system(&groupoid, &qd).expect("corpus systems build"));
    CorpusEntry { name, groupoid, haar, expected }
}

fn all_pass() -> ExpectedProperties {
    ExpectedProperties {
        axioms: true,
        haar: Some(true),
        l2_invariant: Some(true),
        split: Some(true),
        strongly_split: Some(true),
        associative: Some(true),
    }
}

/// The fixed test corpus: the four example systems on `Z4/Z2`, further
/// relational groups, embedded ordinary groupoids, relational pair
/// groupoids, an isolated-element extension, and three mutants.
pub fn corpus() -> Vec<CorpusEntry> {
    let z4z2 = || cyclic_relational(4, 2).unwrap();
    let mut entries = vec![
        example_entry("z4-mod-z2/uniform", z4z2(), |g, qd| {
            uniform_strongly_split(g, qd)
        }, all_pass()),
        example_entry(
            "z4-mod-z2/dirac-split",
            z4z2(),
            |g, qd| dirac_split_system(g, qd),
            ExpectedProperties {
                axioms: true,
                haar: Some(true),
                l2_invariant: Some(false),
                split: Some(true),
                strongly_split: Some(false),
                associative: Some(false),
            },
        ),
        example_entry(
            "z4-mod-z2/non-product",
            z4z2(),
            |g, qd| non_product_system(g, qd),
            ExpectedProperties {
                axioms: true,
                haar: Some(true),
                l2_invariant: Some(true),
                split: Some(false),
                strongly_split: Some(false),
                associative: None,
            },
        ),
        example_entry(
            "z4-mod-z2/non-associative",
            z4z2(),
            |g, qd| non_associative_system(g, qd),
            ExpectedProperties {
                axioms: true,
                haar: Some(true),
                l2_invariant: Some(true),
                split: Some(true),
                strongly_split: Some(false),
                associative: Some(false),
            },
        ),
        example_entry(
            "z6-mod-2",
            cyclic_relational(6, 2).unwrap(),
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "z6-mod-3",
            cyclic_relational(6, 3).unwrap(),
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "z5-trivial-subgroup",
            cyclic_relational(5, 5).unwrap(),
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "s3-mod-a3",
            RelationalGroupoid::from_group_and_normal_subgroup(
                &symmetric_table(3).unwrap(),
                &alternating_indices(3),
            )
            .unwrap(),
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "s4-mod-a4",
            RelationalGroupoid::from_group_and_normal_subgroup(
                &symmetric_table(4).unwrap(),
                &alternating_indices(4),
            )
            .unwrap(),
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "d4-mod-rotations",
            dihedral_relational(4, 1).unwrap(),
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "pair-groupoid-3",
            RelationalGroupoid::from_groupoid(
                &GroupoidTable::pair_groupoid(&FiniteSet::of_size(3).unwrap()).unwrap(),
            )
            .unwrap(),
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "relational-pair-identity-3",
            {
                let pts = FiniteSet::of_size(3).unwrap();
                let id = Relation::identity(&[pts.clone()]).unwrap();
                RelationalGroupoid::relational_pair_groupoid(&pts, &id).unwrap()
            },
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "relational-pair-total-2",
            {
                let pts = FiniteSet::of_size(2).unwrap();
                let total = Relation::from_tuples(
                    vec![pts.clone()],
                    vec![pts.clone()],
                    (0..2).flat_map(|a| (0..2).map(move |b| vec![a, b])),
                )
                .unwrap();
                RelationalGroupoid::relational_pair_groupoid(&pts, &total).unwrap()
            },
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "action-z2-swap",
            {
                let z2 = cyclic_table(2).unwrap();
                let (table, _) = action_groupoid(&z2, &[vec![0, 1], vec![1, 0]]).unwrap();
                RelationalGroupoid::from_groupoid(&table).unwrap()
            },
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
        example_entry(
            "z4-mod-z2-isolated",
            isolated_extension(&cyclic_relational(4, 2).unwrap(), "x").unwrap(),
            |g, qd| uniform_strongly_split(g, qd),
            all_pass(),
        ),
    ];
    let broken = ExpectedProperties { axioms: false, ..ExpectedProperties::default() };
    for (name, op) in [
        ("z4-mod-z2/mutant-drop", MutationOp::DropTuple),
        ("z4-mod-z2/mutant-add", MutationOp::AddTuple),
        ("z4-mod-z2/mutant-swap-inv", MutationOp::SwapInvolution),
    ] {
        entries.push(CorpusEntry {
            name,
            groupoid: mutate(&z4z2(), op, 1).unwrap(),
            haar: None,
            expected: broken.clone(),
        });
    }
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::check_right_haar;

    #[test]
    fn cyclic_relational_matches_its_subgroup_structure() {
        let g = cyclic_relational(6, 2).unwrap();
        assert!(g.check_axioms().all_passed());
        assert_eq!(g.units(), vec![0, 2, 4]);
        let qd = quotient_groupoid(&g).unwrap();
        assert_eq!(qd.classes(), &[vec![0, 2, 4], vec![1, 3, 5]]);

        // A trivial subgroup makes L2 the diagonal.
        let trivial = cyclic_relational(5, 5).unwrap();
        assert_eq!(trivial.units(), vec![0]);
        for h in 0..5 {
            for k in 0..5 {
                assert_eq!(trivial.l2_related(h, k), h == k);
            }
        }

        assert!(matches!(
            cyclic_relational(6, 4),
            Err(GeneratorError::NotDivisor { n: 6, m: 4 })
        ));
    }

    #[test]
    fn dihedral_tables_have_the_right_relations() {
        let d4 = dihedral_table(4).unwrap();
        // r has order 4, s has order 2, and s·r·s = r⁻¹.
        let r = 1;
        let s = 4;
        assert_eq!(d4.compose(r, r).and_then(|rr| d4.compose(rr, r)), Some(d4.inverse(r)));
        assert_eq!(d4.compose(s, s), Some(0));
        let srs = d4
            .compose(s, d4.compose(r, s).unwrap())
            .unwrap();
        assert_eq!(srs, d4.inverse(r));

        let g = dihedral_relational(6, 3).unwrap();
        assert!(g.check_axioms().all_passed());
        assert_eq!(g.units(), vec![0, 3]);
    }

    #[test]
    fn symmetric_groups_enumerate_and_validate() {
        let s3 = symmetric_table(3).unwrap();
        assert_eq!(s3.morphisms().len(), 6);
        assert_eq!(alternating_indices(3).len(), 3);
        let s4 = symmetric_table(4).unwrap();
        assert_eq!(s4.morphisms().len(), 24);
        assert_eq!(alternating_indices(4).len(), 12);

        let g = RelationalGroupoid::from_group_and_normal_subgroup(&s3, &alternating_indices(3))
            .unwrap();
        let qd = quotient_groupoid(&g).unwrap();
        assert_eq!(qd.classes().len(), 2);
    }

    #[test]
    fn action_groupoids_validate_their_actions() {
        let z2 = cyclic_table(2).unwrap();
        let (table, haar) = action_groupoid(&z2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(table.morphisms().len(), 4);
        assert_eq!(table.objects().len(), 2);
        assert_eq!(check_right_haar(&table, &haar), Ok(()));

        // The trivial action on one point returns the group itself.
        let (trivial, _) = action_groupoid(&z2, &[vec![0, 0]]).unwrap();
        assert_eq!(trivial.morphisms().len(), 2);
        assert_eq!(trivial.objects().len(), 1);

        // Z3 translating itself is free and transitive, like a pair
        // groupoid.
        let z3 = cyclic_table(3).unwrap();
        let act: Vec<Vec<usize>> =
            (0..3).map(|x| (0..3).map(|a| (x + a) % 3).collect()).collect();
        let (t3, h3) = action_groupoid(&z3, &act).unwrap();
        assert_eq!(t3.morphisms().len(), 9);
        assert_eq!(check_right_haar(&t3, &h3), Ok(()));
        let embedded = RelationalGroupoid::from_groupoid(&t3).unwrap();
        assert!(embedded.check_axioms().all_passed());

        // A non-action is rejected: the identity must fix points.
        assert!(matches!(
            action_groupoid(&z2, &[vec![1, 0], vec![0, 1]]),
            Err(GeneratorError::BadAction { .. })
        ));
    }

    #[test]
    fn mutations_are_deterministic_and_targeted() {
        let g = cyclic_relational(4, 2).unwrap();

        // Seed 0 drops the lexicographically first tuple (0,0,0).
        let dropped = mutate(&g, MutationOp::DropTuple, 0).unwrap();
        assert!(!dropped.structure().contains(&[0, 0, 0]));
        assert!(!dropped.check_axioms().all_passed());

        let added = mutate(&g, MutationOp::AddTuple, 0).unwrap();
        assert!(!added.check_axioms().all_passed());

        // Swapping two involution entries breaks A.2 ...
        let swapped = mutate(&g, MutationOp::SwapInvolution, 1).unwrap();
        assert!(!swapped.check_axioms().all_passed());
        // ... but swapping a position with itself is a no-op: seed 5
        // selects positions (1, 1) on a carrier of 4.
        let noop = mutate(&g, MutationOp::SwapInvolution, 5).unwrap();
        assert_eq!(noop.involution(), g.involution());
        assert!(noop.check_axioms().all_passed());
    }

    #[test]
    fn random_groups_are_reproducible_and_valid() {
        for seed in 0..20 {
            let a = random_relational_group(seed);
            let b = random_relational_group(seed);
            assert_eq!(a.carrier().len(), b.carrier().len());
            assert_eq!(
                a.structure().tuples().collect::<Vec<_>>(),
                b.structure().tuples().collect::<Vec<_>>()
            );
            assert!(a.len() <= 24);
            assert!(a.check_axioms().all_passed(), "seed {seed}");
        }
    }

    #[test]
    fn the_corpus_classifies_as_declared() {
        for entry in corpus() {
            entry.verify().unwrap();
        }
    }
}
