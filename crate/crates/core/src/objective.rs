//! Monotone submodular objectives over pair sets, each carrying its target Q
//! and gap eta.
//!
//! The aggregate kind folds a per-hypothesis family into a single
//! consistency-aware objective: sets inconsistent with a hypothesis
//! contribute that hypothesis's full weighted target, so any pair set with an
//! empty version space scores at least Q.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{ActionId, HypothesisClass, Pair, PairSet};
use crate::rational::{rat_int, Rat};

/// Per-pair modular weights, one table per hypothesis: f_h(S) = sum of
/// weights[h][x][y] over (x, y) in S.
#[derive(Clone, Debug)]
pub struct ModularFamily {
    pub pair_weights: Vec<Vec<Vec<Rat>>>,
}

impl ModularFamily {
    pub fn value(&self, h: usize, s: &PairSet) -> Rat {
        s.iter()
            .map(|(x, y)| &self.pair_weights[h][x.0 as usize][y.0 as usize])
            .sum()
    }

    fn gain(&self, h: usize, pair: Pair, s: &PairSet) -> Rat {
        if s.contains(&pair) {
            Rat::zero()
        } else {
            self.pair_weights[h][pair.0 .0 as usize][pair.1 .0 as usize].clone()
        }
    }
}

/// Counts queried actions that sit on a community boundary: actions are graph
/// nodes, and node x counts for hypothesis h when some neighbor carries a
/// different community label under h. Responses in S are ignored; only which
/// actions were queried matters, which is exactly why this family is not a
/// learning objective.
#[derive(Clone, Debug)]
pub struct EdgeUsersFamily {
    graph: Graph,
    labelings: Vec<Vec<u32>>,
    // boundary[x] = hypotheses under which node x borders another community
    boundary: Vec<FixedBitSet>,
    pub graph_path: Option<String>,
}

impl EdgeUsersFamily {
    pub fn new(graph: Graph, labelings: Vec<Vec<u32>>, graph_path: Option<String>) -> Result<Self> {
        if labelings.is_empty() {
            return Err(Error::InvalidInstance("edge-users family needs at least one labeling".into()));
        }
        for (h, lab) in labelings.iter().enumerate() {
            if lab.len() != graph.num_nodes() {
                return Err(Error::InvalidInstance(format!(
                    "labeling {h} covers {} nodes, graph has {}",
                    lab.len(),
                    graph.num_nodes()
                )));
            }
        }
        let mut boundary = vec![FixedBitSet::with_capacity(labelings.len()); graph.num_nodes()];
        for (h, lab) in labelings.iter().enumerate() {
            for x in 0..graph.num_nodes() {
                if graph.neighbors(x as u32).iter().any(|n| lab[*n as usize] != lab[x]) {
                    boundary[x].insert(h);
                }
            }
        }
        Ok(EdgeUsersFamily {
            graph,
            labelings,
            boundary,
            graph_path,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn labelings(&self) -> &[Vec<u32>] {
        &self.labelings
    }

    pub fn is_boundary(&self, x: ActionId, h: usize) -> bool {
        self.boundary[x.0 as usize].contains(h)
    }

    /// Highest value f_h can reach: the number of boundary nodes under h.
    pub fn max_value(&self, h: usize) -> u64 {
        self.boundary.iter().filter(|b| b.contains(h)).count() as u64
    }

    pub fn value(&self, h: usize, s: &PairSet) -> Rat {
        let count = s
            .actions()
            .filter(|x| self.boundary[x.0 as usize].contains(h))
            .count();
        rat_int(count as i64)
    }

    fn gain(&self, h: usize, pair: Pair, s: &PairSet) -> Rat {
        let x = pair.0;
        if !s.contains_action(x) && self.boundary[x.0 as usize].contains(h) {
            Rat::one()
        } else {
            Rat::zero()
        }
    }
}

/// Direct evaluation of the boundary-user count for one labeling, used as an
/// oracle against the precomputed family tables.
pub fn edge_users_value(graph: &Graph, labeling: &[u32], s: &PairSet) -> Result<u64> {
    let mut count = 0;
    for x in s.actions() {
        let xi = x.0 as usize;
        if xi >= graph.num_nodes() {
            return Err(Error::InvalidParams(format!(
                "action {x} is not a node of the {}-node graph",
                graph.num_nodes()
            )));
        }
        if graph.neighbors(x.0).iter().any(|n| labeling[*n as usize] != labeling[xi]) {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Clone, Debug)]
pub enum PerHypothesisFamily {
    Modular(ModularFamily),
    EdgeUsers(EdgeUsersFamily),
}

impl PerHypothesisFamily {
    pub fn num_hypotheses(&self) -> usize {
        match self {
            PerHypothesisFamily::Modular(m) => m.pair_weights.len(),
            PerHypothesisFamily::EdgeUsers(e) => e.labelings.len(),
        }
    }

    pub fn value(&self, h: usize, s: &PairSet) -> Rat {
        match self {
            PerHypothesisFamily::Modular(m) => m.value(h, s),
            PerHypothesisFamily::EdgeUsers(e) => e.value(h, s),
        }
    }

    pub fn gain(&self, h: usize, pair: Pair, s: &PairSet) -> Rat {
        match self {
            PerHypothesisFamily::Modular(m) => m.gain(h, pair, s),
            PerHypothesisFamily::EdgeUsers(e) => e.gain(h, pair, s),
        }
    }
}

/// The weighted aggregate of a per-hypothesis family: hypotheses outside the
/// version space contribute w_h * Q, the rest w_h * min(Q, f_h(S)).
#[derive(Clone, Debug)]
pub struct FBar {
    pub family: PerHypothesisFamily,
    pub weights: Vec<Rat>,
    /// True when the weights were defaulted rather than given explicitly.
    pub uniform_weights: bool,
}

impl FBar {
    pub fn evaluate(&self, q: &Rat, s: &PairSet, vs: &FixedBitSet) -> Rat {
        let mut total = Rat::zero();
        for (h, w) in self.weights.iter().enumerate() {
            if vs.contains(h) {
                let fh = self.family.value(h, s);
                total += w * fh.min(q.clone());
            } else {
                total += w * q;
            }
        }
        total
    }
}

/// Structures to disqualify from the version space, with modular weights:
/// f(S) = w(G) - w(G intersect 2^vs(S)), the weight of structures no longer
/// fully contained in the version space.
#[derive(Clone, Debug)]
pub struct StructureSet {
    structures: Vec<FixedBitSet>,
    raw: Vec<Vec<u32>>,
    weights: Vec<Rat>,
}

impl StructureSet {
    pub fn new(structures: Vec<Vec<u32>>, weights: Vec<Rat>, num_hypotheses: usize) -> Result<Self> {
        if structures.is_empty() {
            return Err(Error::InvalidInstance("structure set must be non-empty".into()));
        }
        if structures.len() != weights.len() {
            return Err(Error::InvalidInstance(format!(
                "{} structures with {} weights",
                structures.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidInstance(format!("structure weight {w} is not positive")));
        }
        let mut sets = Vec::with_capacity(structures.len());
        for (i, g) in structures.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::InvalidInstance(format!("structure {i} is empty")));
            }
            let mut set = FixedBitSet::with_capacity(num_hypotheses);
            for h in g {
                if *h as usize >= num_hypotheses {
                    return Err(Error::InvalidInstance(format!(
                        "structure {i} references hypothesis {h} outside 0..{num_hypotheses}"
                    )));
                }
                set.insert(*h as usize);
            }
            sets.push(set);
        }
        Ok(StructureSet {
            structures: sets,
            raw: structures,
            weights,
        })
    }

    pub fn raw_structures(&self) -> &[Vec<u32>] {
        &self.raw
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn total_weight(&self) -> Rat {
        self.weights.iter().sum()
    }

    pub fn min_weight(&self) -> Rat {
        self.weights.iter().min().expect("non-empty").clone()
    }

    pub fn disqualified_weight(&self, vs: &FixedBitSet) -> Rat {
        self.structures
            .iter()
            .zip(&self.weights)
            .filter(|(g, _)| !g.is_subset(vs))
            .map(|(_, w)| w)
            .sum()
    }
}

/// An explicit value table over all subsets of a small declared ground set;
/// pairs outside the ground set are ignored. Exists for exercising the
/// structural checkers with hand-built counterexamples.
#[derive(Clone, Debug)]
pub struct CustomTable {
    pub ground: Vec<Pair>,
    pub values: Vec<Rat>,
}

pub const CUSTOM_GROUND_LIMIT: usize = 12;

impl CustomTable {
    pub fn new(ground: Vec<Pair>, values: Vec<Rat>) -> Result<Self> {
        if ground.len() > CUSTOM_GROUND_LIMIT {
            return Err(Error::GroundSetTooLarge {
                got: ground.len(),
                limit: CUSTOM_GROUND_LIMIT,
            });
        }
        let mut sorted = ground.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ground.len() {
            return Err(Error::InvalidInstance("custom ground set has duplicates".into()));
        }
        if values.len() != 1 << ground.len() {
            return Err(Error::InvalidInstance(format!(
                "custom table has {} values for a {}-pair ground set",
                values.len(),
                ground.len()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidInstance("custom table must assign 0 to the empty set".into()));
        }
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(Error::InvalidInstance(format!("custom table value {v} is negative")));
        }
        Ok(CustomTable { ground, values })
    }

    fn index(&self, s: &PairSet) -> usize {
        let mut idx = 0usize;
        for (bit, p) in self.ground.iter().enumerate() {
            if s.contains(p) {
                idx |= 1 << bit;
            }
        }
        idx
    }

    pub fn value(&self, s: &PairSet) -> Rat {
        self.values[self.index(s)].clone()
    }
}

#[derive(Clone, Debug)]
pub enum ObjectiveKind {
    /// 1 - |vs(S)|/|H| with Q = 1 - 1/|H|.
    VsReduction,
    FBar(FBar),
    Structure(StructureSet),
    /// Q as soon as S contains one of the listed pairs, 0 otherwise.
    PairCover { hits: BTreeSet<Pair> },
    Custom(CustomTable),
}

#[derive(Clone, Debug)]
pub struct Objective {
    pub kind: ObjectiveKind,
    q: Rat,
    eta: Rat,
}

impl Objective {
    fn checked(kind: ObjectiveKind, q: Rat, eta: Rat) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidInstance(format!("Q must be positive, got {q}")));
        }
        if !eta.is_positive() {
            return Err(Error::InvalidInstance(format!("eta must be positive, got {eta}")));
        }
        Ok(Objective { kind, q, eta })
    }

    /// Version-space reduction with its paired constants Q = 1 - 1/|H|,
    /// eta = 1/|H|.
    pub fn vs_reduction(num_hypotheses: usize) -> Result<Self> {
        if num_hypotheses < 2 {
            return Err(Error::InvalidParams(
                "version-space reduction needs at least two hypotheses".into(),
            ));
        }
        let n = rat_int(num_hypotheses as i64);
        Self::checked(
            ObjectiveKind::VsReduction,
            Rat::one() - n.recip(),
            n.recip(),
        )
    }

    /// Aggregate of a per-hypothesis family. Weights default to uniform;
    /// eta defaults to 1/|H|, the gap guaranteed for uniform weights over
    /// integer-valued families with an integer Q.
    pub fn fbar(
        family: PerHypothesisFamily,
        weights: Option<Vec<Rat>>,
        q: Rat,
        eta: Option<Rat>,
    ) -> Result<Self> {
        let n = family.num_hypotheses();
        let uniform = weights.is_none();
        let weights = weights.unwrap_or_else(|| vec![rat_int(n as i64).recip(); n]);
        if weights.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{} weights for {} hypotheses",
                weights.len(),
                n
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidInstance(format!("hypothesis weight {w} is not positive")));
        }
        let total: Rat = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidInstance(format!(
                "hypothesis weights sum to {total}, expected 1"
            )));
        }
        let eta = eta.unwrap_or_else(|| rat_int(n as i64).recip());
        Self::checked(
            ObjectiveKind::FBar(FBar {
                family,
                weights,
                uniform_weights: uniform,
            }),
            q,
            eta,
        )
    }

    /// Structure disqualification with Q = w(G); weights default to 1 per
    /// structure and eta to the smallest structure weight.
    pub fn structure(
        structures: Vec<Vec<u32>>,
        weights: Option<Vec<Rat>>,
        num_hypotheses: usize,
    ) -> Result<Self> {
        let weights = weights.unwrap_or_else(|| vec![Rat::one(); structures.len()]);
        let set = StructureSet::new(structures, weights, num_hypotheses)?;
        let q = set.total_weight();
        let eta = set.min_weight();
        Self::checked(ObjectiveKind::Structure(set), q, eta)
    }

    /// All-or-nothing coverage of a hit-pair set, with Q = eta.
    pub fn pair_cover(hits: BTreeSet<Pair>, q: Rat) -> Result<Self> {
        if hits.is_empty() {
            return Err(Error::InvalidInstance("pair cover needs at least one hit pair".into()));
        }
        let eta = q.clone();
        Self::checked(ObjectiveKind::PairCover { hits }, q, eta)
    }

    pub fn custom(ground: Vec<Pair>, values: Vec<Rat>, q: Rat, eta: Rat) -> Result<Self> {
        Self::checked(ObjectiveKind::Custom(CustomTable::new(ground, values)?), q, eta)
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn eta(&self) -> &Rat {
        &self.eta
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            ObjectiveKind::VsReduction => "vs_reduction",
            ObjectiveKind::FBar(_) => "fbar",
            ObjectiveKind::Structure(_) => "structure",
            ObjectiveKind::PairCover { .. } => "pair_cover",
            ObjectiveKind::Custom(_) => "custom",
        }
    }

    /// Learning objectives depend on S only through vs(S). Holds by
    /// construction for version-space reduction and structure
    /// disqualification; other kinds must be checked exhaustively.
    pub fn is_learning_kind(&self) -> bool {
        matches!(
            self.kind,
            ObjectiveKind::VsReduction | ObjectiveKind::Structure(_)
        )
    }

    pub fn validate(&self, hc: &HypothesisClass) -> Result<()> {
        let n = hc.len();
        match &self.kind {
            ObjectiveKind::VsReduction => {
                let expect_q = Rat::one() - rat_int(n as i64).recip();
                let expect_eta = rat_int(n as i64).recip();
                if self.q != expect_q || self.eta != expect_eta {
                    return Err(Error::InvalidInstance(format!(
                        "version-space reduction over {n} hypotheses requires Q={expect_q}, eta={expect_eta}; got Q={}, eta={}",
                        self.q, self.eta
                    )));
                }
            }
            ObjectiveKind::FBar(fbar) => {
                if fbar.family.num_hypotheses() != n {
                    return Err(Error::InvalidInstance(format!(
                        "family covers {} hypotheses, class has {n}",
                        fbar.family.num_hypotheses()
                    )));
                }
                match &fbar.family {
                    PerHypothesisFamily::Modular(m) => {
                        for (h, table) in m.pair_weights.iter().enumerate() {
                            if table.len() != hc.num_actions()
                                || table.iter().any(|row| row.len() != hc.num_responses())
                            {
                                return Err(Error::InvalidInstance(format!(
                                    "modular weight table {h} does not match the {}x{} domain",
                                    hc.num_actions(),
                                    hc.num_responses()
                                )));
                            }
                            for row in table {
                                if let Some(w) = row.iter().find(|w| w.is_negative()) {
                                    return Err(Error::InvalidInstance(format!(
                                        "negative modular weight {w} in table {h}"
                                    )));
                                }
                            }
                        }
                    }
                    PerHypothesisFamily::EdgeUsers(e) => {
                        if e.graph.num_nodes() != hc.num_actions() {
                            return Err(Error::InvalidInstance(format!(
                                "graph has {} nodes, instance has {} actions",
                                e.graph.num_nodes(),
                                hc.num_actions()
                            )));
                        }
                    }
                }
            }
            ObjectiveKind::Structure(set) => {
                if set.structures.iter().any(|g| g.len() != n) {
                    return Err(Error::InvalidInstance(
                        "structure bitsets do not match the hypothesis count".into(),
                    ));
                }
            }
            ObjectiveKind::PairCover { hits } => {
                for (x, y) in hits {
                    if x.0 as usize >= hc.num_actions() || y.0 as usize >= hc.num_responses() {
                        return Err(Error::InvalidInstance(format!(
                            "hit pair ({x},{y}) outside the domain"
                        )));
                    }
                }
            }
            ObjectiveKind::Custom(table) => {
                for (x, y) in &table.ground {
                    if x.0 as usize >= hc.num_actions() || y.0 as usize >= hc.num_responses() {
                        return Err(Error::InvalidInstance(format!(
                            "custom ground pair ({x},{y}) outside the domain"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, hc: &HypothesisClass, s: &PairSet) -> Rat {
        self.evaluate_with_vs(hc, s, &hc.version_space(s))
    }

    /// Evaluation with the version space already at hand.
    pub fn evaluate_with_vs(&self, hc: &HypothesisClass, s: &PairSet, vs: &FixedBitSet) -> Rat {
        match &self.kind {
            ObjectiveKind::VsReduction => {
                Rat::one() - rat_int(vs.count_ones(..) as i64) / rat_int(hc.len() as i64)
            }
            ObjectiveKind::FBar(fbar) => fbar.evaluate(&self.q, s, vs),
            ObjectiveKind::Structure(set) => set.disqualified_weight(vs),
            ObjectiveKind::PairCover { hits } => {
                if s.iter().any(|p| hits.contains(p)) {
                    self.q.clone()
                } else {
                    Rat::zero()
                }
            }
            ObjectiveKind::Custom(table) => table.value(s),
        }
    }

    pub fn truncated(&self, value: Rat) -> Rat {
        value.min(self.q.clone())
    }

    /// delta_{min(f,Q)}(p | S) = min(f(S + p), Q) - min(f(S), Q).
    pub fn marginal(&self, hc: &HypothesisClass, pair: Pair, s: &PairSet) -> Rat {
        if s.contains(&pair) {
            return Rat::zero();
        }
        let before = self.truncated(self.evaluate(hc, s));
        let after = self.truncated(self.evaluate(hc, &s.with(pair)));
        after - before
    }

    pub fn restrict_to(&self, keep: &[ActionId]) -> Result<Objective> {
        let new_id = |x: &ActionId| -> Option<u32> {
            keep.iter().position(|k| k == x).map(|i| i as u32)
        };
        let kind = match &self.kind {
            ObjectiveKind::VsReduction => ObjectiveKind::VsReduction,
            ObjectiveKind::Structure(set) => ObjectiveKind::Structure(set.clone()),
            ObjectiveKind::PairCover { hits } => ObjectiveKind::PairCover {
                hits: hits
                    .iter()
                    .filter_map(|(x, y)| new_id(x).map(|nx| (ActionId(nx), *y)))
                    .collect(),
            },
            ObjectiveKind::FBar(fbar) => match &fbar.family {
                PerHypothesisFamily::Modular(m) => {
                    let pair_weights = m
                        .pair_weights
                        .iter()
                        .map(|table| keep.iter().map(|x| table[x.0 as usize].clone()).collect())
                        .collect();
                    ObjectiveKind::FBar(FBar {
                        family: PerHypothesisFamily::Modular(ModularFamily { pair_weights }),
                        weights: fbar.weights.clone(),
                        uniform_weights: fbar.uniform_weights,
                    })
                }
                PerHypothesisFamily::EdgeUsers(_) => {
                    return Err(Error::InvalidParams(
                        "edge-users objectives cannot be restricted: actions are graph nodes".into(),
                    ))
                }
            },
            ObjectiveKind::Custom(table) => {
                let mut ground = Vec::with_capacity(table.ground.len());
                for (x, y) in &table.ground {
                    match new_id(x) {
                        Some(nx) => ground.push((ActionId(nx), *y)),
                        None => {
                            return Err(Error::InvalidParams(
                                "custom objective references an action outside the subdomain".into(),
                            ))
                        }
                    }
                }
                ObjectiveKind::Custom(CustomTable {
                    ground,
                    values: table.values.clone(),
                })
            }
        };
        Self::checked(kind, self.q.clone(), self.eta.clone())
    }
}

/// Incremental evaluation state for a growing pair set: keeps the version
/// space, the per-hypothesis family values, and the current objective value
/// so a candidate marginal costs O(|H|) instead of a from-scratch pass.
#[derive(Clone, Debug)]
pub struct IncrementalEval<'a> {
    obj: &'a Objective,
    hc: &'a HypothesisClass,
    pairs: PairSet,
    vs: FixedBitSet,
    value: Rat,
    fh: Vec<Rat>,
}

impl<'a> IncrementalEval<'a> {
    pub fn new(obj: &'a Objective, hc: &'a HypothesisClass) -> Self {
        let fh = match &obj.kind {
            ObjectiveKind::FBar(f) => vec![Rat::zero(); f.family.num_hypotheses()],
            _ => Vec::new(),
        };
        IncrementalEval {
            obj,
            hc,
            pairs: PairSet::new(),
            vs: hc.full_set(),
            value: Rat::zero(),
            fh,
        }
    }

    pub fn from_set(obj: &'a Objective, hc: &'a HypothesisClass, s: &PairSet) -> Self {
        let mut eval = Self::new(obj, hc);
        for pair in s.iter() {
            eval.push(*pair);
        }
        eval
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    pub fn vs(&self) -> &FixedBitSet {
        &self.vs
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    pub fn reached_target(&self) -> bool {
        &self.value >= self.obj.q()
    }

    fn value_with(&self, pair: Pair, vs_after: &FixedBitSet) -> Rat {
        match &self.obj.kind {
            ObjectiveKind::VsReduction => {
                Rat::one()
                    - rat_int(vs_after.count_ones(..) as i64) / rat_int(self.hc.len() as i64)
            }
            ObjectiveKind::FBar(fbar) => {
                let q = self.obj.q();
                let mut total = Rat::zero();
                for (h, w) in fbar.weights.iter().enumerate() {
                    if vs_after.contains(h) {
                        let fh = &self.fh[h] + fbar.family.gain(h, pair, &self.pairs);
                        total += w * fh.min(q.clone());
                    } else {
                        total += w * q;
                    }
                }
                total
            }
            ObjectiveKind::Structure(set) => set.disqualified_weight(vs_after),
            ObjectiveKind::PairCover { hits } => {
                if self.value.is_positive() || hits.contains(&pair) {
                    self.obj.q().clone()
                } else {
                    Rat::zero()
                }
            }
            ObjectiveKind::Custom(table) => table.value(&self.pairs.with(pair)),
        }
    }

    /// delta_{min(f,Q)}(pair | current set).
    pub fn truncated_marginal(&self, pair: Pair) -> Rat {
        if self.pairs.contains(&pair) {
            return Rat::zero();
        }
        let vs_after = self.hc.restrict(&self.vs, pair.0, pair.1);
        let after = self.value_with(pair, &vs_after);
        let tm = self.obj.truncated(after) - self.obj.truncated(self.value.clone());
        debug_assert_eq!(tm, self.obj.marginal(self.hc, pair, &self.pairs));
        tm
    }

    pub fn push(&mut self, pair: Pair) {
        if self.pairs.contains(&pair) {
            return;
        }
        if let ObjectiveKind::FBar(fbar) = &self.obj.kind {
            for h in 0..self.fh.len() {
                let gain = fbar.family.gain(h, pair, &self.pairs);
                self.fh[h] += gain;
            }
        }
        let vs_after = self.hc.restrict(&self.vs, pair.0, pair.1);
        // fh was updated above, so recompute the value from the new state.
        self.vs = vs_after;
        self.pairs.insert(pair);
        self.value = match &self.obj.kind {
            ObjectiveKind::FBar(fbar) => {
                let q = self.obj.q();
                let mut total = Rat::zero();
                for (h, w) in fbar.weights.iter().enumerate() {
                    if self.vs.contains(h) {
                        total += w * self.fh[h].clone().min(q.clone());
                    } else {
                        total += w * q;
                    }
                }
                total
            }
            _ => self.obj.evaluate_with_vs(self.hc, &self.pairs, &self.vs),
        };
        debug_assert_eq!(self.value, self.obj.evaluate(self.hc, &self.pairs));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Hypothesis, ResponseId};
    use crate::rational::rat;

    fn hc3() -> HypothesisClass {
        HypothesisClass::new(
            2,
            2,
            vec![
                Hypothesis::new(vec![ResponseId(0), ResponseId(0)]),
                Hypothesis::new(vec![ResponseId(0), ResponseId(1)]),
                Hypothesis::new(vec![ResponseId(1), ResponseId(0)]),
            ],
        )
        .unwrap()
    }

    fn pairs(ps: &[(u32, u32)]) -> PairSet {
        PairSet::from_pairs(ps.iter().map(|(x, y)| (ActionId(*x), ResponseId(*y))).collect())
    }

    #[test]
    fn vs_reduction_values_and_constants() {
        let hc = hc3();
        let obj = Objective::vs_reduction(3).unwrap();
        assert_eq!(obj.q(), &rat(2, 3));
        assert_eq!(obj.eta(), &rat(1, 3));
        assert_eq!(obj.evaluate(&hc, &PairSet::new()), rat_int(0));
        // vs of size 2 out of 3.
        assert_eq!(obj.evaluate(&hc, &pairs(&[(0, 0)])), rat(1, 3));
        // Empty version space: value 1 >= Q (consistency-aware).
        assert_eq!(obj.evaluate(&hc, &pairs(&[(0, 1), (1, 1)])), rat_int(1));

        let big = Objective::vs_reduction(100).unwrap();
        assert_eq!(big.q(), &rat(99, 100));
        assert_eq!(big.eta(), &rat(1, 100));
    }

    // Hand-evaluated aggregate over X = {a}, Y = {1,2}, two hypotheses,
    // uniform weights, Q = 2, f_h({(a,y)}) = 1 for all h, y.
    #[test]
    fn fbar_matches_hand_evaluation() {
        let hc = HypothesisClass::new(
            1,
            2,
            vec![
                Hypothesis::new(vec![ResponseId(0)]),
                Hypothesis::new(vec![ResponseId(1)]),
            ],
        )
        .unwrap();
        let family = PerHypothesisFamily::Modular(ModularFamily {
            pair_weights: vec![vec![vec![rat_int(1), rat_int(1)]]; 2],
        });
        let obj = Objective::fbar(family, None, rat_int(2), None).unwrap();
        assert_eq!(obj.evaluate(&hc, &PairSet::new()), rat_int(0));
        assert_eq!(obj.evaluate(&hc, &pairs(&[(0, 0)])), rat(3, 2));
        // Inconsistent set: every hypothesis contributes its full Q weight.
        assert_eq!(obj.evaluate(&hc, &pairs(&[(0, 0), (0, 1)])), rat_int(2));
    }

    #[test]
    fn fbar_weights_must_sum_to_one() {
        let family = PerHypothesisFamily::Modular(ModularFamily {
            pair_weights: vec![vec![vec![rat_int(1)]]; 2],
        });
        let err = Objective::fbar(
            family,
            Some(vec![rat(1, 2), rat(1, 3)]),
            rat_int(1),
            None,
        );
        assert!(err.is_err());
    }

    #[test]
    fn structure_disqualification() {
        let hc = hc3();
        // Structures: {h0, h1} and {h2}; weights default to 1, Q = 2, eta = 1.
        let obj = Objective::structure(vec![vec![0, 1], vec![2]], None, 3).unwrap();
        assert_eq!(obj.q(), &rat_int(2));
        assert_eq!(obj.eta(), &rat_int(1));
        assert_eq!(obj.evaluate(&hc, &PairSet::new()), rat_int(0));
        // (a, 1) leaves vs = {h0, h1}: 'h2' structure disqualified.
        assert_eq!(obj.evaluate(&hc, &pairs(&[(0, 0)])), rat_int(1));
        // (b, 2) leaves vs = {h1}: both structures broken.
        assert_eq!(obj.evaluate(&hc, &pairs(&[(1, 1)])), rat_int(2));
        // Singleton structure set G = {H}: disqualified by any proper shrink.
        let single = Objective::structure(vec![vec![0, 1, 2]], None, 3).unwrap();
        assert_eq!(single.evaluate(&hc, &pairs(&[(0, 0)])), rat_int(1));
        assert_eq!(single.evaluate(&hc, &PairSet::new()), rat_int(0));
    }

    #[test]
    fn marginal_is_truncated() {
        let hc = hc3();
        let obj = Objective::vs_reduction(3).unwrap();
        // (a,2) shrinks vs to {h2}: min(2/3, Q) - 0 = 2/3.
        assert_eq!(
            obj.marginal(&hc, (ActionId(0), ResponseId(1)), &PairSet::new()),
            rat(2, 3)
        );
        // Pair already present: zero.
        let s = pairs(&[(0, 0)]);
        assert_eq!(obj.marginal(&hc, (ActionId(0), ResponseId(0)), &s), rat_int(0));
        // Value already at Q: truncation clamps every marginal to zero.
        let s = pairs(&[(0, 1), (1, 1)]);
        assert_eq!(obj.marginal(&hc, (ActionId(1), ResponseId(0)), &s), rat_int(0));
    }

    #[test]
    fn edge_users_counts_boundary_actions() {
        // Path 0-1-2, communities {0,1} | {2}.
        let graph = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let lab = vec![0u32, 0, 1];
        assert_eq!(edge_users_value(&graph, &lab, &PairSet::new()).unwrap(), 0);
        assert_eq!(edge_users_value(&graph, &lab, &pairs(&[(1, 0)])).unwrap(), 1);
        assert_eq!(edge_users_value(&graph, &lab, &pairs(&[(0, 0)])).unwrap(), 0);
        let family = EdgeUsersFamily::new(graph, vec![lab.clone()], None).unwrap();
        assert_eq!(family.value(0, &pairs(&[(1, 0)])), rat_int(1));
        assert_eq!(family.value(0, &pairs(&[(0, 0)])), rat_int(0));
        assert_eq!(family.max_value(0), 2);
        // Same action under two responses still counts once.
        assert_eq!(family.value(0, &pairs(&[(1, 0), (1, 1)])), rat_int(1));
    }

    #[test]
    fn custom_table_validation() {
        let g = vec![(ActionId(0), ResponseId(0)), (ActionId(1), ResponseId(0))];
        assert!(CustomTable::new(g.clone(), vec![rat_int(0); 3]).is_err());
        assert!(CustomTable::new(g.clone(), vec![rat_int(1); 4]).is_err());
        let t = CustomTable::new(
            g,
            vec![rat_int(0), rat_int(1), rat_int(1), rat_int(2)],
        )
        .unwrap();
        assert_eq!(t.value(&pairs(&[(1, 0)])), rat_int(1));
        assert_eq!(t.value(&pairs(&[(0, 0), (1, 0)])), rat_int(2));
        // Pairs outside the declared ground set are ignored.
        assert_eq!(t.value(&pairs(&[(0, 1)])), rat_int(0));
    }
}
