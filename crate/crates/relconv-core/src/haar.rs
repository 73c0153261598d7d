//! Measures, right Haar systems, and relational Haar systems.
//!
//! All weights are nonnegative exact rationals. A *right Haar system* on an
//! ordinary groupoid assigns a measure to every source fiber, invariant
//! under right translation. A *relational Haar system* on a relational
//! groupoid assigns a measure `μ_g` to every composable-pair fiber
//! `fiber(g)`, subject to three conditions relative to the quotient:
//!
//! 1. the pushforward of `μ_g` along the class map depends only on the
//!    class of `g`;
//! 2. the induced family on the quotient is a right Haar system (its
//!    second marginal depends only on the source object and is
//!    right-invariant);
//! 3. each `μ_g` disintegrates over its pushforward with probability
//!    conditionals.
//!
//! On top of the checks sits a classifier ladder: `L2`-invariance
//! (measures constant on classes), splitness (conditionals factor as
//! products of class marginals `τ^g`), and strong splitness (the marginals
//! do not depend on `g`).

use std::collections::BTreeMap;

use num::{One, Zero};
use thiserror::Error;

use crate::groupoid::RelationalGroupoid;
use crate::reduction::QuotientData;
use crate::scalar::Rat;
use crate::table::GroupoidTable;

/// Errors constructing measures and Haar systems.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HaarError {
    #[error("negative weight for {key}")]
    NegativeWeight { key: String },
    #[error("system has {got} measures, expected {expected}")]
    MeasureCount { got: usize, expected: usize },
    #[error("measure for {base} charges {key}, which is outside its fiber")]
    OutsideFiber { base: String, key: String },
    #[error("pushforward map is undefined on charged key {key}")]
    PartialMap { key: String },
    #[error("no marginal τ given for class [{class}]")]
    MissingTau { class: usize },
    #[error("marginal for class [{class}] is not a probability measure on that class")]
    BadTau { class: usize },
    #[error("no conditional given for class [{class}] on cell ([{c1}],[{c2}])")]
    MissingConditional { class: usize, c1: usize, c2: usize },
    #[error("conditional on cell ([{c1}],[{c2}]) is not a probability measure on its rectangle")]
    BadConditional { c1: usize, c2: usize },
    #[error("no marginal family given for element {element}")]
    MissingMarginals { element: usize },
    #[error("no conditional family given for class [{class}]")]
    MissingConditionalFamily { class: usize },
}

/// A finitely supported measure with exact nonnegative rational weights.
/// Zero weights are dropped on construction, so equality of measures is
/// extensional equality of supports and weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure<K: Ord> {
    weights: BTreeMap<K, Rat>,
}

impl<K: Ord + Clone + std::fmt::Debug> Measure<K> {
    /// The zero measure.
    pub fn zero() -> Self {
        Measure { weights: BTreeMap::new() }
    }

    /// Builds a measure from `(key, weight)` pairs. Weights must be
    /// nonnegative; duplicate keys accumulate; zeros are dropped.
    pub fn from_weights<I>(pairs: I) -> Result<Self, HaarError>
    where
        I: IntoIterator<Item = (K, Rat)>,
    {
        let mut weights: BTreeMap<K, Rat> = BTreeMap::new();
        for (k, w) in pairs {
            if w < Rat::zero() {
                return Err(HaarError::NegativeWeight { key: format!("{k:?}") });
            }
            if !w.is_zero() {
                *weights.entry(k).or_insert_with(Rat::zero) += w;
            }
        }
        weights.retain(|_, w| !w.is_zero());
        Ok(Measure { weights })
    }

    /// The weight of a key (zero off the support).
    pub fn weight(&self, k: &K) -> Rat {
        self.weights.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// Support in ascending key order.
    pub fn support(&self) -> impl Iterator<Item = (&K, &Rat)> {
        self.weights.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total mass.
    pub fn total(&self) -> Rat {
        self.weights.values().fold(Rat::zero(), |a, w| a + w)
    }

    pub fn is_probability(&self) -> bool {
        self.total().is_one()
    }

    /// Pointwise scaling by a nonnegative rational.
    pub fn scale(&self, factor: &Rat) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Measure {
            weights: self
                .weights
                .iter()
                .map(|(k, w)| (k.clone(), w * factor))
                .collect(),
        }
    }

    /// Sum of the weights over a predicate.
    pub fn mass_where(&self, mut pred: impl FnMut(&K) -> bool) -> Rat {
        self.weights
            .iter()
            .filter(|(k, _)| pred(k))
            .fold(Rat::zero(), |a, (_, w)| a + w)
    }
}

/// Pushes a measure forward along a (possibly partial) map. The map must
/// be defined on every charged key.
pub fn pushforward<K, J>(
    m: &Measure<K>,
    f: impl Fn(&K) -> Option<J>,
) -> Result<Measure<J>, HaarError>
where
    K: Ord + Clone + std::fmt::Debug,
    J: Ord + Clone + std::fmt::Debug,
{
    let mut out: BTreeMap<J, Rat> = BTreeMap::new();
    for (k, w) in m.support() {
        let j = f(k).ok_or_else(|| HaarError::PartialMap { key: format!("{k:?}") })?;
        *out.entry(j).or_insert_with(Rat::zero) += w;
    }
    Ok(Measure { weights: out })
}

/// A disintegration of a measure over a map: the base (pushforward) and,
/// for every positively charged base point, a probability conditional on
/// its preimage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disintegration<K: Ord, J: Ord> {
    pub base: Measure<J>,
    pub conditionals: BTreeMap<J, Measure<K>>,
}

/// Disintegrates `m` over `f`: `m = Σ_j base(j) · conditional_j`, exactly.
pub fn disintegrate<K, J>(
    m: &Measure<K>,
    f: impl Fn(&K) -> Option<J>,
) -> Result<Disintegration<K, J>, HaarError>
where
    K: Ord + Clone + std::fmt::Debug,
    J: Ord + Clone + std::fmt::Debug,
{
    let base = pushforward(m, &f)?;
    let mut conditionals: BTreeMap<J, Measure<K>> = BTreeMap::new();
    for (j, mass) in base.support() {
        let slice: Vec<(K, Rat)> = m
            .support()
            .filter(|(k, _)| f(k).as_ref() == Some(j))
            .map(|(k, w)| (k.clone(), w / mass))
            .collect();
        conditionals.insert(j.clone(), Measure::from_weights(slice)?);
    }
    Ok(Disintegration { base, conditionals })
}

/// A measure on every source fiber of an ordinary groupoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightHaarSystem {
    measures: Vec<Measure<usize>>,
}

impl RightHaarSystem {
    /// One measure per object, each supported on that object's source
    /// fiber.
    pub fn new(table: &GroupoidTable, measures: Vec<Measure<usize>>) -> Result<Self, HaarError> {
        if measures.len() != table.objects().len() {
            return Err(HaarError::MeasureCount {
                got: measures.len(),
                expected: table.objects().len(),
            });
        }
        for (x, m) in measures.iter().enumerate() {
            for (&eta, _) in m.support() {
                if eta >= table.morphisms().len() || table.source(eta) != x {
                    return Err(HaarError::OutsideFiber {
                        base: table.objects().label(x).into(),
                        key: format!("{eta}"),
                    });
                }
            }
        }
        Ok(RightHaarSystem { measures })
    }

    /// The normalized counting system: weight `1/|G_x|` on each source
    /// fiber.
    pub fn normalized_counting(table: &GroupoidTable) -> Result<Self, HaarError> {
        let measures = (0..table.objects().len())
            .map(|x| {
                let fiber = table.source_fiber(x);
                let w = Rat::new(1.into(), (fiber.len().max(1)).into());
                Measure::from_weights(fiber.into_iter().map(|m| (m, w.clone())))
            })
            .collect::<Result<_, _>>()?;
        RightHaarSystem::new(table, measures)
    }

    pub fn measure(&self, object: usize) -> &Measure<usize> {
        &self.measures[object]
    }
}

/// Witness of a right-invariance failure: translating the fiber over
/// `t(gamma)` by `gamma` changed the weight of `eta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightHaarWitness {
    pub gamma: usize,
    pub eta: usize,
}

/// Checks right invariance: for every morphism `γ : x → y` and every
/// `η ∈ G_y`, `μ_x(η∘γ) = μ_y(η)`. Returns the first failing pair in
/// `(γ, η)` order.
pub fn check_right_haar(
    table: &GroupoidTable,
    sys: &RightHaarSystem,
) -> Result<(), RightHaarWitness> {
    let n = table.morphisms().len();
    for gamma in 0..n {
        let x = table.source(gamma);
        let y = table.target(gamma);
        for eta in table.source_fiber(y) {
            let translated = table
                .compose(eta, gamma)
                .expect("η∘γ is defined because t(γ) = s(η)");
            if sys.measures[x].weight(&translated) != sys.measures[y].weight(&eta) {
                return Err(RightHaarWitness { gamma, eta });
            }
        }
    }
    Ok(())
}

/// A measure on every composable-pair fiber of a relational groupoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalHaarSystem {
    measures: Vec<Measure<(usize, usize)>>,
}

impl RelationalHaarSystem {
    /// One measure per carrier element, each supported inside that
    /// element's fiber. Elements off the constraint set have empty fibers,
    /// so their measures are forced to zero here.
    pub fn new(
        g: &RelationalGroupoid,
        measures: Vec<Measure<(usize, usize)>>,
    ) -> Result<Self, HaarError> {
        if measures.len() != g.len() {
            return Err(HaarError::MeasureCount {
                got: measures.len(),
                expected: g.len(),
            });
        }
        for (base, m) in measures.iter().enumerate() {
            for (&(h, k), _) in m.support() {
                if h >= g.len() || k >= g.len() || !g.set_product(h, k).contains(&base) {
                    return Err(HaarError::OutsideFiber {
                        base: g.carrier().label(base).into(),
                        key: format!(
                            "({},{})",
                            g.carrier().label(h.min(g.len() - 1)),
                            g.carrier().label(k.min(g.len() - 1))
                        ),
                    });
                }
            }
        }
        Ok(RelationalHaarSystem { measures })
    }

    pub fn measure(&self, g: usize) -> &Measure<(usize, usize)> {
        &self.measures[g]
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }
}

/// One verified condition of a relational Haar check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarCondition {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Report of the three relational Haar conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarReport {
    pub entries: Vec<HaarCondition>,
}

impl HaarReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

/// The pushforward of `μ_g` along the class map, as a measure on class
/// pairs.
fn class_pushforward(
    qd: &QuotientData,
    m: &Measure<(usize, usize)>,
) -> Result<Measure<(usize, usize)>, HaarError> {
    pushforward(m, |&(h, k)| Some((qd.class_of(h)?, qd.class_of(k)?)))
}

/// Computes the right Haar system induced on the quotient by a relational
/// Haar system: the second marginal of the class pushforward, which must
/// depend only on the source object. Errors carry no witness; use
/// [`check_relational_haar`] for diagnostics.
pub fn induced_quotient_haar(
    qd: &QuotientData,
    sys: &RelationalHaarSystem,
) -> Result<RightHaarSystem, HaarError> {
    let quotient = qd.quotient();
    let mut per_object: Vec<Option<Measure<usize>>> = vec![None; quotient.objects().len()];
    for (cls, members) in qd.classes().iter().enumerate() {
        let nu = class_pushforward(qd, sys.measure(members[0]))?;
        let sigma = pushforward(&nu, |&(_, c2)| Some(c2))?;
        let x = quotient.source(cls);
        match &per_object[x] {
            None => per_object[x] = Some(sigma),
            Some(prev) if *prev == sigma => {}
            Some(_) => {
                return Err(HaarError::OutsideFiber {
                    base: quotient.objects().label(x).into(),
                    key: format!("[{}]", quotient.morphisms().label(cls)),
                })
            }
        }
    }
    let measures = per_object
        .into_iter()
        .map(|m| m.unwrap_or_else(Measure::zero))
        .collect();
    RightHaarSystem::new(quotient, measures)
}

/// Runs the three relational Haar conditions and reports each with a
/// witness on failure.
pub fn check_relational_haar(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    sys: &RelationalHaarSystem,
) -> HaarReport {
    let mut entries = Vec::new();

    // (i) The class pushforward agrees across each class.
    let mut pf_witness = None;
    'outer: for members in qd.classes() {
        let rep = members[0];
        let base = class_pushforward(qd, sys.measure(rep));
        for &m in &members[1..] {
            let other = class_pushforward(qd, sys.measure(m));
            match (&base, &other) {
                (Ok(a), Ok(b)) if a == b => {}
                _ => {
                    pf_witness = Some(format!(
                        "({},{})",
                        g.carrier().label(rep),
                        g.carrier().label(m)
                    ));
                    break 'outer;
                }
            }
        }
    }
    entries.push(HaarCondition {
        name: "pushforward-agreement",
        passed: pf_witness.is_none(),
        witness: pf_witness,
    });

    // (ii) The induced family on the quotient is a right Haar system.
    let quot_entry = match induced_quotient_haar(qd, sys) {
        Err(e) => HaarCondition {
            name: "quotient-right-haar",
            passed: false,
            witness: Some(e.to_string()),
        },
        Ok(induced) => match check_right_haar(qd.quotient(), &induced) {
            Ok(()) => HaarCondition {
                name: "quotient-right-haar",
                passed: true,
                witness: None,
            },
            Err(w) => HaarCondition {
                name: "quotient-right-haar",
                passed: false,
                witness: Some(format!(
                    "translation by {} moves the weight of {}",
                    qd.quotient().morphisms().label(w.gamma),
                    qd.quotient().morphisms().label(w.eta)
                )),
            },
        },
    };
    entries.push(quot_entry);

    // (iii) Disintegration over the class map with probability
    // conditionals, reconstructing the measure exactly.
    let mut dis_witness = None;
    'dis: for &e in g.constraint_elements() {
        let m = sys.measure(e);
        let class_map =
            |hk: &(usize, usize)| Some((qd.class_of(hk.0)?, qd.class_of(hk.1)?));
        let Ok(d) = disintegrate(m, class_map) else {
            dis_witness = Some(g.carrier().label(e).to_string());
            break;
        };
        for (_, cond) in &d.conditionals {
            if !cond.is_probability() {
                dis_witness = Some(g.carrier().label(e).to_string());
                break 'dis;
            }
        }
        for (k, w) in m.support() {
            let j = class_map(k).expect("support lies in C on validated input");
            let rebuilt = d.base.weight(&j)
                * d.conditionals
                    .get(&j)
                    .map(|c| c.weight(k))
                    .unwrap_or_else(Rat::zero);
            if rebuilt != *w {
                dis_witness = Some(g.carrier().label(e).to_string());
                break 'dis;
            }
        }
    }
    entries.push(HaarCondition {
        name: "disintegration",
        passed: dis_witness.is_none(),
        witness: dis_witness,
    });

    HaarReport { entries }
}

/// Checks `L2`-invariance: `μ_h = μ_k` whenever `(h, k) ∈ L2`. Returns
/// the first failing pair `(h, k)` with `h < k`.
pub fn check_l2_invariant(
    g: &RelationalGroupoid,
    sys: &RelationalHaarSystem,
) -> Result<(), (usize, usize)> {
    for h in 0..g.len() {
        for k in (h + 1)..g.len() {
            if g.l2_related(h, k) && sys.measure(h) != sys.measure(k) {
                return Err((h, k));
            }
        }
    }
    Ok(())
}

/// Why a system fails to be split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitFailure {
    /// The conditional on a positively charged cell is not the product of
    /// its marginals; `pair` is the first entry that differs.
    NotProduct {
        g: usize,
        classes: (usize, usize),
        pair: (usize, usize),
    },
    /// Two cells of the same `μ_g` induce different marginals on a class.
    InconsistentMarginal { g: usize, class: usize },
}

/// The class marginals `τ^g` extracted by a successful split check:
/// `per_element[g][class]` is a probability measure on that class's
/// members. Only classes that occur in a positively charged cell of some
/// `μ_g` are constrained (and listed).
pub type SplitFamily = BTreeMap<usize, BTreeMap<usize, Measure<usize>>>;

/// Checks splitness and extracts the marginal family on success: every
/// positively charged cell of every conditional must factor as the product
/// of one row and one column marginal per class, consistently across a
/// given `μ_g`.
pub fn split_structure(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    sys: &RelationalHaarSystem,
) -> Result<SplitFamily, SplitFailure> {
    let mut family: SplitFamily = BTreeMap::new();
    for &e in g.constraint_elements() {
        let m = sys.measure(e);
        if m.is_zero() {
            family.insert(e, BTreeMap::new());
            continue;
        }
        let Ok(d) = disintegrate(m, |&(h, k)| Some((qd.class_of(h)?, qd.class_of(k)?)))
        else {
            // Support off C cannot happen on validated systems.
            return Err(SplitFailure::InconsistentMarginal { g: e, class: 0 });
        };
        let mut taus: BTreeMap<usize, Measure<usize>> = BTreeMap::new();
        let mut record = |class: usize, marginal: Measure<usize>, e: usize| {
            match taus.get(&class) {
                None => {
                    taus.insert(class, marginal);
                    Ok(())
                }
                Some(prev) if *prev == marginal => Ok(()),
                Some(_) => Err(SplitFailure::InconsistentMarginal { g: e, class }),
            }
        };
        for (&(c1, c2), cond) in &d.conditionals {
            let rows = &qd.classes()[c1];
            let cols = &qd.classes()[c2];
            let row_marginal = Measure::from_weights(
                rows.iter()
                    .map(|&h| (h, cond.mass_where(|&(a, _)| a == h))),
            )
            .expect("marginal weights are nonnegative");
            let col_marginal = Measure::from_weights(
                cols.iter()
                    .map(|&k| (k, cond.mass_where(|&(_, b)| b == k))),
            )
            .expect("marginal weights are nonnegative");
            for &h in rows {
                for &k in cols {
                    let expected = row_marginal.weight(&h) * col_marginal.weight(&k);
                    if cond.weight(&(h, k)) != expected {
                        return Err(SplitFailure::NotProduct {
                            g: e,
                            classes: (c1, c2),
                            pair: (h, k),
                        });
                    }
                }
            }
            record(c1, row_marginal, e)?;
            record(c2, col_marginal, e)?;
        }
        family.insert(e, taus);
    }
    Ok(family)
}

/// Why a split system fails to be strongly split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StronglySplitFailure {
    /// Elements whose marginals disagree on `class`.
    pub g1: usize,
    pub g2: usize,
    pub class: usize,
}

/// Checks strong splitness and extracts the global marginals: the split
/// family must agree across all elements of `C` wherever two elements
/// constrain the same class.
pub fn strongly_split_structure(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    sys: &RelationalHaarSystem,
) -> Result<BTreeMap<usize, Measure<usize>>, Result<StronglySplitFailure, SplitFailure>> {
    let family = split_structure(g, qd, sys).map_err(Err)?;
    let mut global: BTreeMap<usize, (usize, Measure<usize>)> = BTreeMap::new();
    for (&e, taus) in &family {
        for (&class, tau) in taus {
            match global.get(&class) {
                None => {
                    global.insert(class, (e, tau.clone()));
                }
                Some((setter, prev)) if prev == tau => {
                    let _ = setter;
                }
                Some((setter, _)) => {
                    return Err(Ok(StronglySplitFailure {
                        g1: *setter,
                        g2: e,
                        class,
                    }))
                }
            }
        }
    }
    Ok(global.into_iter().map(|(c, (_, t))| (c, t)).collect())
}

/// Validates that `tau` is a probability measure supported on the members
/// of `class`.
fn validate_tau(
    qd: &QuotientData,
    class: usize,
    tau: &Measure<usize>,
) -> Result<(), HaarError> {
    let members = &qd.classes()[class];
    let ok = tau.is_probability()
        && tau.support().all(|(k, _)| members.contains(k));
    if ok {
        Ok(())
    } else {
        Err(HaarError::BadTau { class })
    }
}

/// The cells of the fiber over an element: for `c̄ = q(g)` and every `η̄`
/// in the source fiber of `s(c̄)` in the quotient, the pair
/// `(c̄∘η̄⁻¹, η̄)` weighted by the quotient Haar measure of `η̄`.
pub(crate) fn quotient_cells(
    qd: &QuotientData,
    base: &RightHaarSystem,
    class: usize,
) -> Vec<((usize, usize), Rat)> {
    let quotient = qd.quotient();
    let x = quotient.source(class);
    quotient
        .source_fiber(x)
        .into_iter()
        .map(|eta| {
            let c1 = quotient
                .compose(class, quotient.inverse(eta))
                .expect("η̄⁻¹ ends at the source of the class");
            ((c1, eta), base.measure(x).weight(&eta))
        })
        .collect()
}

/// Builds the strongly split system determined by a right Haar system on
/// the quotient and one probability marginal per class:
/// `μ_g(h, k) = ν(q(h), q(k)) · τ_{q(h)}(h) · τ_{q(k)}(k)`.
pub fn build_strongly_split(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    base: &RightHaarSystem,
    tau: &BTreeMap<usize, Measure<usize>>,
) -> Result<RelationalHaarSystem, HaarError> {
    let per_element: BTreeMap<usize, &BTreeMap<usize, Measure<usize>>> = g
        .constraint_elements()
        .iter()
        .map(|&e| (e, tau))
        .collect();
    build_split_impl(g, qd, base, &per_element)
}

/// Builds a split system from per-element marginals: like
/// [`build_strongly_split`] but `τ` may depend on the element whose fiber
/// is being weighted.
pub fn build_split(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    base: &RightHaarSystem,
    taus: &BTreeMap<usize, BTreeMap<usize, Measure<usize>>>,
) -> Result<RelationalHaarSystem, HaarError> {
    let per_element: BTreeMap<usize, &BTreeMap<usize, Measure<usize>>> = taus
        .iter()
        .map(|(&e, t)| (e, t))
        .collect();
    build_split_impl(g, qd, base, &per_element)
}

fn build_split_impl(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    base: &RightHaarSystem,
    taus: &BTreeMap<usize, &BTreeMap<usize, Measure<usize>>>,
) -> Result<RelationalHaarSystem, HaarError> {
    let mut measures = vec![Measure::zero(); g.len()];
    for &e in g.constraint_elements() {
        let tau = taus
            .get(&e)
            .ok_or(HaarError::MissingMarginals { element: e })?;
        let class = qd.class_of(e).expect("constrained elements have classes");
        let mut weights = Vec::new();
        for ((c1, c2), nu) in quotient_cells(qd, base, class) {
            if nu.is_zero() {
                continue;
            }
            let t1 = tau.get(&c1).ok_or(HaarError::MissingTau { class: c1 })?;
            let t2 = tau.get(&c2).ok_or(HaarError::MissingTau { class: c2 })?;
            validate_tau(qd, c1, t1)?;
            validate_tau(qd, c2, t2)?;
            for (&h, w1) in t1.support() {
                for (&k, w2) in t2.support() {
                    weights.push(((h, k), &nu * w1 * w2));
                }
            }
        }
        measures[e] = Measure::from_weights(weights)?;
    }
    RelationalHaarSystem::new(g, measures)
}

/// The canonical relational Haar system on a groupoid embedded as a
/// relational groupoid: the fiber over `γ` is `{(γ∘η⁻¹, η) | η ∈ G_s(γ)}`,
/// weighted by a right Haar system as `μ_γ(γ∘η⁻¹, η) = μ_{s(γ)}(η)`.
/// The relational groupoid must be the embedding of `table` with matching
/// indices.
pub fn embedded_groupoid_system(
    g: &RelationalGroupoid,
    table: &GroupoidTable,
    base: &RightHaarSystem,
) -> Result<RelationalHaarSystem, HaarError> {
    let measures = (0..table.morphisms().len())
        .map(|gamma| {
            let x = table.source(gamma);
            Measure::from_weights(table.source_fiber(x).into_iter().map(|eta| {
                let h = table
                    .compose(gamma, table.inverse(eta))
                    .expect("γ∘η⁻¹ is defined because t(η⁻¹) = s(γ)");
                ((h, eta), base.measure(x).weight(&eta))
            }))
        })
        .collect::<Result<_, _>>()?;
    RelationalHaarSystem::new(g, measures)
}

/// Builds a system from explicit per-class conditionals: for an element of
/// class `c̄`, `μ_g = Σ_cells ν(cell) · conditional[c̄][cell]`. The result
/// is `L2`-invariant by construction. Conditionals must be probability
/// measures supported on their cell's rectangle.
pub fn build_from_conditionals(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    base: &RightHaarSystem,
    conditionals: &BTreeMap<usize, BTreeMap<(usize, usize), Measure<(usize, usize)>>>,
) -> Result<RelationalHaarSystem, HaarError> {
    let mut measures = vec![Measure::zero(); g.len()];
    for &e in g.constraint_elements() {
        let class = qd.class_of(e).expect("constrained elements have classes");
        let conds = conditionals
            .get(&class)
            .ok_or(HaarError::MissingConditionalFamily { class })?;
        let mut weights = Vec::new();
        for ((c1, c2), nu) in quotient_cells(qd, base, class) {
            if nu.is_zero() {
                continue;
            }
            let cond = conds
                .get(&(c1, c2))
                .ok_or(HaarError::MissingConditional { class, c1, c2 })?;
            let in_rect = cond.support().all(|(&(h, k), _)| {
                qd.class_of(h) == Some(c1) && qd.class_of(k) == Some(c2)
            });
            if !cond.is_probability() || !in_rect {
                return Err(HaarError::BadConditional { c1, c2 });
            }
            for (&hk, w) in cond.support() {
                weights.push((hk, &nu * w));
            }
        }
        measures[e] = Measure::from_weights(weights)?;
    }
    RelationalHaarSystem::new(g, measures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::reduction::quotient_groupoid;
    use crate::rel::FiniteSet;
    use crate::scalar::rat;

    fn cyclic_table(n: usize) -> GroupoidTable {
        generators::cyclic_table(n).unwrap()
    }

    fn z4_mod_z2() -> (RelationalGroupoid, QuotientData) {
        let g = generators::cyclic_relational(4, 2).unwrap();
        let qd = quotient_groupoid(&g).unwrap();
        (g, qd)
    }

    /// The uniform 1/8 system on Z4/Z2.
    fn strong_system(g: &RelationalGroupoid, qd: &QuotientData) -> RelationalHaarSystem {
        generators::uniform_strongly_split(g, qd).unwrap()
    }

    #[test]
    fn measures_reject_negative_weights_and_drop_zeros() {
        assert!(matches!(
            Measure::from_weights([(0usize, rat(-1, 2))]),
            Err(HaarError::NegativeWeight { .. })
        ));
        let m = Measure::from_weights([(0usize, rat(0, 1)), (1, rat(1, 2)), (1, rat(1, 2))])
            .unwrap();
        assert_eq!(m.support().count(), 1);
        assert_eq!(m.weight(&1), rat(1, 1));
        assert!(m.is_probability());
    }

    #[test]
    fn pushforward_aggregates_and_detects_partial_maps() {
        let m = Measure::from_weights([(0usize, rat(1, 4)), (1, rat(1, 4)), (2, rat(1, 2))])
            .unwrap();
        let pushed = pushforward(&m, |&k| Some(k % 2)).unwrap();
        assert_eq!(pushed.weight(&0), rat(3, 4));
        assert_eq!(pushed.weight(&1), rat(1, 4));

        let partial = pushforward(&m, |&k| (k < 2).then_some(k));
        assert!(matches!(partial, Err(HaarError::PartialMap { .. })));

        // A Dirac mass pushes to a Dirac mass.
        let dirac = Measure::from_weights([(2usize, rat(1, 1))]).unwrap();
        let pushed = pushforward(&dirac, |&k| Some(k % 2)).unwrap();
        assert_eq!(pushed.weight(&0), rat(1, 1));
    }

    #[test]
    fn right_haar_on_a_cyclic_group_requires_uniformity() {
        let z2 = cyclic_table(2);
        let uniform = RightHaarSystem::new(
            &z2,
            vec![Measure::from_weights([(0, rat(1, 2)), (1, rat(1, 2))]).unwrap()],
        )
        .unwrap();
        assert_eq!(check_right_haar(&z2, &uniform), Ok(()));

        let skew = RightHaarSystem::new(
            &z2,
            vec![Measure::from_weights([(0, rat(1, 2)), (1, rat(1, 3))]).unwrap()],
        )
        .unwrap();
        assert_eq!(
            check_right_haar(&z2, &skew),
            Err(RightHaarWitness { gamma: 1, eta: 0 })
        );
    }

    #[test]
    fn haar_system_support_is_validated() {
        let (g, _) = z4_mod_z2();
        // (0, 1) is not in fiber(0).
        let mut measures = vec![Measure::zero(); 4];
        measures[0] = Measure::from_weights([((0usize, 1usize), rat(1, 1))]).unwrap();
        assert!(matches!(
            RelationalHaarSystem::new(&g, measures),
            Err(HaarError::OutsideFiber { .. })
        ));
    }

    #[test]
    fn the_uniform_system_passes_everything() {
        let (g, qd) = z4_mod_z2();
        let sys = strong_system(&g, &qd);
        // Every fiber pair weighs 1/8.
        assert_eq!(sys.measure(0).weight(&(1, 3)), rat(1, 8));
        assert_eq!(sys.measure(1).weight(&(0, 1)), rat(1, 8));
        assert_eq!(sys.measure(0).support().count(), 8);

        let report = check_relational_haar(&g, &qd, &sys);
        assert!(report.all_passed(), "{report:?}");
        assert_eq!(check_l2_invariant(&g, &sys), Ok(()));
        let tau = strongly_split_structure(&g, &qd, &sys).unwrap();
        assert_eq!(tau[&0].weight(&0), rat(1, 2));
        assert_eq!(tau[&1].weight(&3), rat(1, 2));

        let induced = induced_quotient_haar(&qd, &sys).unwrap();
        assert_eq!(induced.measure(0).weight(&0), rat(1, 2));
        assert_eq!(induced.measure(0).weight(&1), rat(1, 2));
    }

    /// The split-but-not-invariant system of the worked example.
    fn dirac_split_system(g: &RelationalGroupoid, qd: &QuotientData) -> RelationalHaarSystem {
        generators::dirac_split_system(g, qd).unwrap()
    }

    #[test]
    fn the_dirac_split_system_is_split_but_not_invariant() {
        let (g, qd) = z4_mod_z2();
        let sys = dirac_split_system(&g, &qd);
        assert_eq!(sys.measure(0).weight(&(0, 0)), rat(1, 2));
        assert_eq!(sys.measure(0).weight(&(1, 3)), rat(1, 8));
        assert_eq!(sys.measure(2).weight(&(2, 2)), rat(1, 2));

        let report = check_relational_haar(&g, &qd, &sys);
        assert!(report.all_passed(), "{report:?}");
        // Point masses sit at different elements, so invariance fails at
        // the first related pair (0, 2).
        assert_eq!(check_l2_invariant(&g, &sys), Err((0, 2)));
        // Split: τ^0 on class [0] is the Dirac mass at 0.
        let family = split_structure(&g, &qd, &sys).unwrap();
        assert_eq!(family[&0][&0].weight(&0), rat(1, 1));
        // Not strongly split: τ^0 and τ^1 disagree on class [0].
        let failure = strongly_split_structure(&g, &qd, &sys).unwrap_err().unwrap();
        assert_eq!(failure.class, 0);
        assert_eq!((failure.g1, failure.g2), (0, 1));
    }

    /// The invariant-but-not-split system of the worked example.
    fn non_product_system(g: &RelationalGroupoid, qd: &QuotientData) -> RelationalHaarSystem {
        generators::non_product_system(g, qd).unwrap()
    }

    #[test]
    fn the_non_product_system_is_invariant_but_not_split() {
        let (g, qd) = z4_mod_z2();
        let sys = non_product_system(&g, &qd);
        assert_eq!(sys.measure(0).weight(&(0, 0)), rat(1, 6));
        assert_eq!(sys.measure(0).weight(&(2, 2)), rat(0, 1));

        let report = check_relational_haar(&g, &qd, &sys);
        assert!(report.all_passed(), "{report:?}");
        assert_eq!(check_l2_invariant(&g, &sys), Ok(()));
        match split_structure(&g, &qd, &sys) {
            Err(SplitFailure::NotProduct { g: 0, classes, pair }) => {
                assert_eq!(classes, (0, 0));
                assert_eq!(pair, (0, 0));
            }
            other => panic!("expected a product failure, got {other:?}"),
        }
    }

    #[test]
    fn disintegration_recovers_base_and_conditionals() {
        let (g, qd) = z4_mod_z2();
        let sys = non_product_system(&g, &qd);
        let d = disintegrate(sys.measure(0), |&(h, k)| {
            Some((qd.class_of(h)?, qd.class_of(k)?))
        })
        .unwrap();
        assert_eq!(d.base.weight(&(0, 0)), rat(1, 2));
        assert_eq!(d.base.weight(&(1, 1)), rat(1, 2));
        let cond = &d.conditionals[&(0, 0)];
        assert_eq!(cond.weight(&(0, 0)), rat(1, 3));
        assert_eq!(cond.weight(&(2, 2)), rat(0, 1));
        assert!(cond.is_probability());
    }

    /// The associativity counterexample: split and invariant, but the
    /// class-[0] marginal differs between elements of class [0] (Dirac at
    /// 2) and elements of class [1] (uniform).
    fn counterexample_system(g: &RelationalGroupoid, qd: &QuotientData) -> RelationalHaarSystem {
        generators::non_associative_system(g, qd).unwrap()
    }

    #[test]
    fn the_counterexample_system_is_split_and_invariant_but_not_strongly() {
        let (g, qd) = z4_mod_z2();
        let sys = counterexample_system(&g, &qd);
        assert!(check_relational_haar(&g, &qd, &sys).all_passed());
        assert_eq!(check_l2_invariant(&g, &sys), Ok(()));
        assert!(split_structure(&g, &qd, &sys).is_ok());
        let failure = strongly_split_structure(&g, &qd, &sys).unwrap_err().unwrap();
        assert_eq!(failure.class, 0);
    }

    #[test]
    fn embedded_groupoids_carry_their_haar_systems() {
        let table = GroupoidTable::pair_groupoid(&FiniteSet::of_size(3).unwrap()).unwrap();
        let g = RelationalGroupoid::from_groupoid(&table).unwrap();
        let qd = quotient_groupoid(&g).unwrap();
        let base = RightHaarSystem::normalized_counting(&table).unwrap();
        assert_eq!(check_right_haar(&table, &base), Ok(()));

        let sys = embedded_groupoid_system(&g, &table, &base).unwrap();
        assert!(check_relational_haar(&g, &qd, &sys).all_passed());
        assert_eq!(check_l2_invariant(&g, &sys), Ok(()));
        // Classes are singletons, so the system is strongly split with
        // Dirac marginals.
        let tau = strongly_split_structure(&g, &qd, &sys).unwrap();
        for (class, t) in &tau {
            assert_eq!(t.weight(&qd.classes()[*class][0]), rat(1, 1));
        }
    }

    #[test]
    fn saturated_sets_translate_with_equal_mass() {
        // For an L2-saturated A ⊆ fiber(g) and (g, h, k) ∈ L3, pushing A
        // through (id × R_h) preserves measure: μ_g(A) = μ_k(image).
        let (g, qd) = z4_mod_z2();
        for sys in [
            strong_system(&g, &qd),
            dirac_split_system(&g, &qd),
            non_product_system(&g, &qd),
        ] {
            for t in g.l3().tuples() {
                let (a, b, k) = (t[0], t[1], t[2]);
                // Saturated subsets of fiber(a): unions of class-pair
                // rectangles. Test each single rectangle.
                let d = disintegrate(sys.measure(a), |&(h, l)| {
                    Some((qd.class_of(h)?, qd.class_of(l)?))
                })
                .unwrap();
                for (&(c1, c2), _) in &d.conditionals {
                    let mass_a = sys.measure(a).mass_where(|&(h, l)| {
                        qd.class_of(h) == Some(c1) && qd.class_of(l) == Some(c2)
                    });
                    // The image rectangle under (id × R_b) has column class
                    // c2·[b].
                    let c2_shift = qd
                        .quotient()
                        .compose(c2, qd.class_of(b).unwrap())
                        .unwrap();
                    let mass_k = sys.measure(k).mass_where(|&(h, l)| {
                        qd.class_of(h) == Some(c1) && qd.class_of(l) == Some(c2_shift)
                    });
                    assert_eq!(mass_a, mass_k, "system failed at ({a},{b},{k})");
                }
            }
        }
    }
}
