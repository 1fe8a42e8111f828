//! Domain model: actions, responses, hypotheses, pair sets, and
//! version-space computations.
//!
//! Everything here is immutable after construction and all operations are
//! pure, so values can be shared freely across parallel workers.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::objective::Objective;

/// Index into an instance's action list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

/// Index into an instance's response list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResponseId(pub u32);

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ResponseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Pair = (ActionId, ResponseId);

/// A set of action-response pairs in canonical lexicographic order.
///
/// The canonical order makes equality, hashing, and memoization keys stable
/// across runs. A single action may appear with several responses; such sets
/// are valid objective inputs even though runs never produce them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PairSet {
    pairs: Vec<Pair>,
}

impl PairSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(mut pairs: Vec<Pair>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        PairSet { pairs }
    }

    /// Inserts a pair, returning false if it was already present.
    pub fn insert(&mut self, pair: Pair) -> bool {
        match self.pairs.binary_search(&pair) {
            Ok(_) => false,
            Err(at) => {
                self.pairs.insert(at, pair);
                true
            }
        }
    }

    /// A copy with one extra pair.
    pub fn with(&self, pair: Pair) -> Self {
        let mut s = self.clone();
        s.insert(pair);
        s
    }

    pub fn contains(&self, pair: &Pair) -> bool {
        self.pairs.binary_search(pair).is_ok()
    }

    pub fn contains_action(&self, x: ActionId) -> bool {
        let at = self.pairs.partition_point(|(a, _)| *a < x);
        self.pairs.get(at).is_some_and(|(a, _)| *a == x)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter()
    }

    pub fn as_slice(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        let mut last = None;
        self.pairs.iter().filter_map(move |(a, _)| {
            if last == Some(*a) {
                None
            } else {
                last = Some(*a);
                Some(*a)
            }
        })
    }
}

impl fmt::Display for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, y)) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "}}")
    }
}

/// A total mapping from actions to responses: one candidate world state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    responses: Vec<ResponseId>,
}

impl Hypothesis {
    pub fn new(responses: Vec<ResponseId>) -> Self {
        Hypothesis { responses }
    }

    pub fn response(&self, x: ActionId) -> ResponseId {
        self.responses[x.0 as usize]
    }

    pub fn responses(&self) -> &[ResponseId] {
        &self.responses
    }
}

/// A finite indexed set of distinct hypotheses, with per-(action, response)
/// consistency bitsets precomputed for fast version-space filtering.
#[derive(Clone, Debug)]
pub struct HypothesisClass {
    num_actions: usize,
    num_responses: usize,
    hypotheses: Vec<Hypothesis>,
    // masks[x][y] = set of hypothesis indices h with h(x) = y
    masks: Vec<Vec<FixedBitSet>>,
}

impl HypothesisClass {
    pub fn new(
        num_actions: usize,
        num_responses: usize,
        hypotheses: Vec<Hypothesis>,
    ) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::InvalidInstance(
                "hypothesis class must be non-empty".into(),
            ));
        }
        for (i, h) in hypotheses.iter().enumerate() {
            if h.responses.len() != num_actions {
                return Err(Error::InvalidInstance(format!(
                    "hypothesis {i} maps {} actions, instance has {num_actions}",
                    h.responses.len()
                )));
            }
            if let Some(r) = h.responses.iter().find(|r| r.0 as usize >= num_responses) {
                return Err(Error::InvalidInstance(format!(
                    "hypothesis {i} uses response {r} outside 0..{num_responses}"
                )));
            }
        }
        for i in 1..hypotheses.len() {
            if hypotheses[..i].contains(&hypotheses[i]) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate hypothesis at index {i}"
                )));
            }
        }
        let mut masks =
            vec![vec![FixedBitSet::with_capacity(hypotheses.len()); num_responses]; num_actions];
        for (h_idx, h) in hypotheses.iter().enumerate() {
            for x in 0..num_actions {
                masks[x][h.responses[x].0 as usize].insert(h_idx);
            }
        }
        Ok(HypothesisClass {
            num_actions,
            num_responses,
            hypotheses,
            masks,
        })
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn num_responses(&self) -> usize {
        self.num_responses
    }

    pub fn hypothesis(&self, h: usize) -> &Hypothesis {
        &self.hypotheses[h]
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn response(&self, h: usize, x: ActionId) -> ResponseId {
        self.hypotheses[h].response(x)
    }

    /// Bitset of hypotheses consistent with a single pair.
    pub fn mask(&self, x: ActionId, y: ResponseId) -> &FixedBitSet {
        &self.masks[x.0 as usize][y.0 as usize]
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.hypotheses.len());
        s.insert_range(..);
        s
    }

    /// vs_H(S): the hypotheses consistent with every pair in S.
    pub fn version_space(&self, s: &PairSet) -> FixedBitSet {
        let mut vs = self.full_set();
        for (x, y) in s.iter() {
            vs.intersect_with(self.mask(*x, *y));
            if vs.is_clear() {
                break;
            }
        }
        vs
    }

    /// vs restricted by one more observed pair.
    pub fn restrict(&self, vs: &FixedBitSet, x: ActionId, y: ResponseId) -> FixedBitSet {
        let mut out = vs.clone();
        out.intersect_with(self.mask(x, y));
        out
    }

    /// The set of responses to x across a version space, ascending.
    pub fn possible_responses_in(&self, x: ActionId, vs: &FixedBitSet) -> Vec<ResponseId> {
        let mut out = Vec::new();
        for y in 0..self.num_responses {
            if !vs.is_disjoint(&self.masks[x.0 as usize][y]) {
                out.push(ResponseId(y as u32));
            }
        }
        out
    }

    /// Y_H(x, S): possible responses for x given the history S. Empty when
    /// the version space is empty; the caller decides how severe that is.
    pub fn possible_responses(&self, x: ActionId, s: &PairSet) -> Vec<ResponseId> {
        self.possible_responses_in(x, &self.version_space(s))
    }
}

/// A full problem instance: domains, hypotheses, costs, and the objective.
#[derive(Clone, Debug)]
pub struct Instance {
    pub action_names: Vec<String>,
    pub response_names: Vec<String>,
    pub hypotheses: HypothesisClass,
    pub cost: CostModel,
    pub objective: Objective,
}

impl Instance {
    pub fn new(
        action_names: Vec<String>,
        response_names: Vec<String>,
        hypotheses: HypothesisClass,
        cost: CostModel,
        objective: Objective,
    ) -> Result<Self> {
        if hypotheses.num_actions() != action_names.len() {
            return Err(Error::InvalidInstance(format!(
                "{} action names for {} actions",
                action_names.len(),
                hypotheses.num_actions()
            )));
        }
        if hypotheses.num_responses() != response_names.len() {
            return Err(Error::InvalidInstance(format!(
                "{} response names for {} responses",
                response_names.len(),
                hypotheses.num_responses()
            )));
        }
        if cost.num_actions() != hypotheses.num_actions()
            || cost.num_responses() != hypotheses.num_responses()
        {
            return Err(Error::InvalidInstance(format!(
                "cost table is {}x{}, instance is {}x{}",
                cost.num_actions(),
                cost.num_responses(),
                hypotheses.num_actions(),
                hypotheses.num_responses()
            )));
        }
        objective.validate(&hypotheses)?;
        Ok(Instance {
            action_names,
            response_names,
            hypotheses,
            cost,
            objective,
        })
    }

    pub fn num_actions(&self) -> usize {
        self.hypotheses.num_actions()
    }

    pub fn num_responses(&self) -> usize {
        self.hypotheses.num_responses()
    }

    pub fn all_actions(&self) -> impl Iterator<Item = ActionId> {
        (0..self.num_actions() as u32).map(ActionId)
    }

    pub fn action_name(&self, x: ActionId) -> &str {
        &self.action_names[x.0 as usize]
    }

    pub fn response_name(&self, y: ResponseId) -> &str {
        &self.response_names[y.0 as usize]
    }

    /// Restricts the instance to a subset of actions (ascending by id), the
    /// operation the adversarial lower-bound families need to carve out X_n.
    ///
    /// Fails if the restriction would collapse two hypotheses into one, or if
    /// the objective kind cannot be re-indexed.
    pub fn restrict_to(&self, keep: &[ActionId]) -> Result<Instance> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() {
            return Err(Error::InvalidParams("duplicate action in subdomain".into()));
        }
        if sorted.iter().any(|x| x.0 as usize >= self.num_actions()) {
            return Err(Error::InvalidParams("subdomain action out of range".into()));
        }
        let hyps = self
            .hypotheses
            .hypotheses()
            .iter()
            .map(|h| Hypothesis::new(sorted.iter().map(|x| h.response(*x)).collect()))
            .collect::<Vec<_>>();
        for i in 1..hyps.len() {
            if hyps[..i].contains(&hyps[i]) {
                return Err(Error::InvalidParams(
                    "restriction collapses two hypotheses; version-space targets would change"
                        .into(),
                ));
            }
        }
        let hypotheses = HypothesisClass::new(sorted.len(), self.num_responses(), hyps)?;
        let cost = self.cost.select_actions(&sorted);
        let objective = self.objective.restrict_to(&sorted)?;
        Instance::new(
            sorted.iter().map(|x| self.action_name(*x).to_string()).collect(),
            self.response_names.clone(),
            hypotheses,
            cost,
            objective,
        )
    }
}
