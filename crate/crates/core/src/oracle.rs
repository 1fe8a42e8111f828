//! Ground truth at desk scale: exact optimal worst-case cost via memoized
//! adaptive-policy search, exhaustive structural checkers, and the
//! approximation-bound verifier.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num::{One, Signed, Zero};

use crate::cost::CostRatios;
use crate::error::{Error, Result};
use crate::model::{ActionId, HypothesisClass, Instance, Pair, PairSet, ResponseId};
use crate::objective::Objective;
use crate::rational::{ln_interval, Ext, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoMode {
    /// Memoize on the canonical pair set; valid for every objective.
    Pairs,
    /// Memoize on the version space; valid for learning objectives, where the
    /// value depends on S only through vs(S) and non-bifurcating actions are
    /// never useful.
    VersionSpace,
}

impl FromStr for MemoMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pairs" => Ok(MemoMode::Pairs),
            "vs" | "version-space" => Ok(MemoMode::VersionSpace),
            other => Err(Error::InvalidParams(format!(
                "unknown memo mode {other:?} (expected pairs or vs)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OptLimits {
    pub max_actions: usize,
    pub max_hypotheses: usize,
}

impl Default for OptLimits {
    fn default() -> Self {
        OptLimits {
            max_actions: 12,
            max_hypotheses: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyNode {
    pub worst_cost: Rat,
    pub kind: PolicyNodeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolicyNodeKind {
    Terminal,
    Decide {
        action: ActionId,
        children: BTreeMap<u32, Arc<PolicyNode>>,
    },
}

/// The adaptive decision tree realizing the optimal worst-case cost; children
/// of a decision node cover exactly the responses consistent with the node's
/// history, and a node is terminal exactly when the target is met.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyTree {
    pub root: Arc<PolicyNode>,
}

impl PolicyTree {
    pub fn opt_cost(&self) -> &Rat {
        &self.root.worst_cost
    }

    /// Walks the tree against a concrete hypothesis, returning the incurred
    /// cost and the final objective value.
    pub fn replay(&self, inst: &Instance, h: usize) -> Result<(Rat, Rat)> {
        let mut node = &self.root;
        let mut s = PairSet::new();
        let mut cost = Rat::zero();
        loop {
            match &node.kind {
                PolicyNodeKind::Terminal => {
                    return Ok((cost, inst.objective.evaluate(&inst.hypotheses, &s)));
                }
                PolicyNodeKind::Decide { action, children } => {
                    let y = inst.hypotheses.response(h, *action);
                    cost += inst.cost.cost(*action, y);
                    s.insert((*action, y));
                    node = children.get(&y.0).ok_or_else(|| {
                        Error::InvalidInstance(format!(
                            "policy tree has no child for response {y} of action {action}"
                        ))
                    })?;
                }
            }
        }
    }

    /// True when every decision node offers at least two responses.
    pub fn is_bifurcating(&self) -> bool {
        fn walk(node: &PolicyNode) -> bool {
            match &node.kind {
                PolicyNodeKind::Terminal => true,
                PolicyNodeKind::Decide { children, .. } => {
                    children.len() >= 2 && children.values().all(|c| walk(c))
                }
            }
        }
        walk(&self.root)
    }

    pub fn node_count(&self) -> usize {
        fn walk(node: &PolicyNode) -> usize {
            match &node.kind {
                PolicyNodeKind::Terminal => 1,
                PolicyNodeKind::Decide { children, .. } => {
                    1 + children.values().map(|c| walk(c)).sum::<usize>()
                }
            }
        }
        walk(&self.root)
    }
}

#[derive(Clone, Debug)]
pub enum OptOutcome {
    Feasible { cost: Rat, tree: PolicyTree },
    /// No adaptive policy reaches the target for every hypothesis.
    Infeasible,
}

impl OptOutcome {
    pub fn cost(&self) -> Ext {
        match self {
            OptOutcome::Feasible { cost, .. } => Ext::Finite(cost.clone()),
            OptOutcome::Infeasible => Ext::Infinite,
        }
    }

    pub fn tree(&self) -> Option<&PolicyTree> {
        match self {
            OptOutcome::Feasible { tree, .. } => Some(tree),
            OptOutcome::Infeasible => None,
        }
    }
}

type Solved = Option<(Rat, Arc<PolicyNode>)>;

struct Search<'a> {
    inst: &'a Instance,
    pairs_memo: HashMap<PairSet, Solved>,
    vs_memo: HashMap<Vec<u32>, Solved>,
    mode: MemoMode,
}

fn vs_key(vs: &FixedBitSet) -> Vec<u32> {
    vs.ones().map(|h| h as u32).collect()
}

impl<'a> Search<'a> {
    /// OPT(S) = 0 once f(S) >= Q, else min over candidate actions of the
    /// worst response branch cost(x, y) + OPT(S + (x, y)).
    fn solve(&mut self, s: &PairSet, vs: &FixedBitSet, value: &Rat) -> Solved {
        let obj = &self.inst.objective;
        if value >= obj.q() {
            return Some((
                Rat::zero(),
                Arc::new(PolicyNode {
                    worst_cost: Rat::zero(),
                    kind: PolicyNodeKind::Terminal,
                }),
            ));
        }
        let key = match self.mode {
            MemoMode::Pairs => None,
            MemoMode::VersionSpace => Some(vs_key(vs)),
        };
        match self.mode {
            MemoMode::Pairs => {
                if let Some(hit) = self.pairs_memo.get(s) {
                    return hit.clone();
                }
            }
            MemoMode::VersionSpace => {
                if let Some(hit) = self.vs_memo.get(key.as_ref().unwrap()) {
                    return hit.clone();
                }
            }
        }
        let hc = &self.inst.hypotheses;
        let mut best: Solved = None;
        for x in self.inst.all_actions() {
            let responses = hc.possible_responses_in(x, vs);
            match self.mode {
                // Repeating an action only adds cost: skip tried actions.
                MemoMode::Pairs => {
                    if s.contains_action(x) {
                        continue;
                    }
                }
                // For learning objectives only bifurcating actions help, and
                // restricting to them keeps the recursion well-founded.
                MemoMode::VersionSpace => {
                    if responses.len() < 2 {
                        continue;
                    }
                }
            }
            let mut worst = Rat::zero();
            let mut children = BTreeMap::new();
            let mut feasible = true;
            for y in responses {
                let s2 = s.with((x, y));
                let vs2 = hc.restrict(vs, x, y);
                let v2 = obj.evaluate_with_vs(hc, &s2, &vs2);
                match self.solve(&s2, &vs2, &v2) {
                    None => {
                        feasible = false;
                        break;
                    }
                    Some((c, node)) => {
                        let total = self.inst.cost.cost(x, y) + c;
                        worst = worst.max(total);
                        children.insert(y.0, node);
                    }
                }
            }
            if feasible && best.as_ref().is_none_or(|(b, _)| worst < *b) {
                let node = Arc::new(PolicyNode {
                    worst_cost: worst.clone(),
                    kind: PolicyNodeKind::Decide {
                        action: x,
                        children,
                    },
                });
                best = Some((worst, node));
            }
        }
        match self.mode {
            MemoMode::Pairs => {
                self.pairs_memo.insert(s.clone(), best.clone());
            }
            MemoMode::VersionSpace => {
                self.vs_memo.insert(key.unwrap(), best.clone());
            }
        }
        best
    }
}

/// Exact optimal worst-case cost by exhaustive adaptive-policy search.
pub fn brute_force_opt(inst: &Instance, mode: MemoMode, limits: OptLimits) -> Result<OptOutcome> {
    if inst.num_actions() > limits.max_actions {
        return Err(Error::InstanceTooLarge {
            what: "action count",
            got: inst.num_actions(),
            limit: limits.max_actions,
        });
    }
    if inst.hypotheses.len() > limits.max_hypotheses {
        return Err(Error::InstanceTooLarge {
            what: "hypothesis count",
            got: inst.hypotheses.len(),
            limit: limits.max_hypotheses,
        });
    }
    if mode == MemoMode::VersionSpace && !inst.objective.is_learning_kind() {
        return Err(Error::MemoNotApplicable {
            kind: inst.objective.kind_name(),
        });
    }
    let mut search = Search {
        inst,
        pairs_memo: HashMap::new(),
        vs_memo: HashMap::new(),
        mode,
    };
    let s = PairSet::new();
    let vs = inst.hypotheses.full_set();
    let value = inst.objective.evaluate_with_vs(&inst.hypotheses, &s, &vs);
    Ok(match search.solve(&s, &vs, &value) {
        Some((cost, root)) => OptOutcome::Feasible {
            cost,
            tree: PolicyTree { root },
        },
        None => OptOutcome::Infeasible,
    })
}

pub const CHECK_GROUND_LIMIT: usize = 12;

#[derive(Clone, Debug)]
pub enum Witness {
    Monotonicity {
        smaller: PairSet,
        larger: PairSet,
        f_smaller: Rat,
        f_larger: Rat,
    },
    Submodularity {
        element: Pair,
        smaller: PairSet,
        larger: PairSet,
        delta_smaller: Rat,
        delta_larger: Rat,
    },
    Consistency {
        set: PairSet,
        value: Rat,
        q: Rat,
    },
    LearningValueMismatch {
        a: PairSet,
        b: PairSet,
        value_a: Rat,
        value_b: Rat,
    },
    LearningNotAntitone {
        smaller_vs: PairSet,
        larger_vs: PairSet,
        value_smaller: Rat,
        value_larger: Rat,
    },
    BoundViolated {
        greedy_cost: Rat,
        bound: Ext,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Monotonicity {
                smaller,
                larger,
                f_smaller,
                f_larger,
            } => write!(
                f,
                "monotonicity fails: f({smaller}) = {f_smaller} > f({larger}) = {f_larger}"
            ),
            Witness::Submodularity {
                element,
                smaller,
                larger,
                delta_smaller,
                delta_larger,
            } => write!(
                f,
                "submodularity fails at z = ({},{}): delta(z | {smaller}) = {delta_smaller} < delta(z | {larger}) = {delta_larger}",
                element.0, element.1
            ),
            Witness::Consistency { set, value, q } => write!(
                f,
                "consistency-awareness fails: vs({set}) is empty but f = {value} < Q = {q}"
            ),
            Witness::LearningValueMismatch {
                a,
                b,
                value_a,
                value_b,
            } => write!(
                f,
                "not a learning objective: vs({a}) = vs({b}) but f values {value_a} != {value_b}"
            ),
            Witness::LearningNotAntitone {
                smaller_vs,
                larger_vs,
                value_smaller,
                value_larger,
            } => write!(
                f,
                "not antitone in the version space: vs({smaller_vs}) is contained in vs({larger_vs}) but {value_smaller} < {value_larger}"
            ),
            Witness::BoundViolated { greedy_cost, bound } => {
                write!(f, "greedy cost {greedy_cost} exceeds the bound {bound}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl CheckReport {
    fn pass() -> Self {
        CheckReport {
            passed: true,
            witness: None,
        }
    }

    fn fail(witness: Witness) -> Self {
        CheckReport {
            passed: false,
            witness: Some(witness),
        }
    }
}

/// Precomputed values of f over every subset of a small ground set.
struct SubsetTables {
    sets: Vec<PairSet>,
    values: Vec<Rat>,
    version_spaces: Vec<FixedBitSet>,
}

fn subset_tables(hc: &HypothesisClass, obj: &Objective, ground: &[Pair]) -> Result<SubsetTables> {
    if ground.len() > CHECK_GROUND_LIMIT {
        return Err(Error::GroundSetTooLarge {
            got: ground.len(),
            limit: CHECK_GROUND_LIMIT,
        });
    }
    let mut sorted = ground.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != ground.len() {
        return Err(Error::InvalidParams("ground set has duplicate pairs".into()));
    }
    let n = sorted.len();
    let size = 1usize << n;
    let mut sets = Vec::with_capacity(size);
    let mut values = Vec::with_capacity(size);
    let mut version_spaces = Vec::with_capacity(size);
    for mask in 0..size {
        let set = PairSet::from_pairs(
            (0..n)
                .filter(|bit| mask & (1 << bit) != 0)
                .map(|bit| sorted[bit])
                .collect(),
        );
        let vs = if mask == 0 {
            hc.full_set()
        } else {
            let bit = mask.trailing_zeros() as usize;
            let parent = &version_spaces[mask & (mask - 1)];
            hc.restrict(parent, sorted[bit].0, sorted[bit].1)
        };
        values.push(obj.evaluate_with_vs(hc, &set, &vs));
        sets.push(set);
        version_spaces.push(vs);
    }
    Ok(SubsetTables {
        sets,
        values,
        version_spaces,
    })
}

fn proper_submasks(b: usize) -> impl Iterator<Item = usize> {
    let mut next = if b == 0 { None } else { Some((b - 1) & b) };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & b) };
        Some(cur)
    })
}

/// Exhaustive check of f(A) <= f(B) over all A contained in B.
pub fn check_monotone(
    hc: &HypothesisClass,
    obj: &Objective,
    ground: &[Pair],
) -> Result<CheckReport> {
    let t = subset_tables(hc, obj, ground)?;
    for b in 0..t.sets.len() {
        for a in proper_submasks(b) {
            if t.values[a] > t.values[b] {
                return Ok(CheckReport::fail(Witness::Monotonicity {
                    smaller: t.sets[a].clone(),
                    larger: t.sets[b].clone(),
                    f_smaller: t.values[a].clone(),
                    f_larger: t.values[b].clone(),
                }));
            }
        }
    }
    Ok(CheckReport::pass())
}

/// Exhaustive check of delta(z | A) >= delta(z | B) over all A contained in B
/// and all ground elements z.
pub fn check_submodular(
    hc: &HypothesisClass,
    obj: &Objective,
    ground: &[Pair],
) -> Result<CheckReport> {
    let t = subset_tables(hc, obj, ground)?;
    let n = t.sets.len().trailing_zeros() as usize;
    for b in 0..t.sets.len() {
        for a in proper_submasks(b) {
            for z in 0..n {
                let zbit = 1usize << z;
                if b & zbit != 0 {
                    continue;
                }
                let delta_a = &t.values[a | zbit] - &t.values[a];
                let delta_b = &t.values[b | zbit] - &t.values[b];
                if delta_a < delta_b {
                    return Ok(CheckReport::fail(Witness::Submodularity {
                        element: *t.sets[zbit].as_slice().first().expect("singleton"),
                        smaller: t.sets[a].clone(),
                        larger: t.sets[b].clone(),
                        delta_smaller: delta_a,
                        delta_larger: delta_b,
                    }));
                }
            }
        }
    }
    Ok(CheckReport::pass())
}

/// Every subset with an empty version space must score at least Q.
pub fn check_consistency_aware(
    hc: &HypothesisClass,
    obj: &Objective,
    ground: &[Pair],
) -> Result<CheckReport> {
    let t = subset_tables(hc, obj, ground)?;
    for mask in 0..t.sets.len() {
        if t.version_spaces[mask].is_clear() && &t.values[mask] < obj.q() {
            return Ok(CheckReport::fail(Witness::Consistency {
                set: t.sets[mask].clone(),
                value: t.values[mask].clone(),
                q: obj.q().clone(),
            }));
        }
    }
    Ok(CheckReport::pass())
}

/// Verifies that f depends on S only through vs(S) and is non-increasing in
/// the version space under inclusion.
pub fn check_learning_objective(
    hc: &HypothesisClass,
    obj: &Objective,
    ground: &[Pair],
) -> Result<CheckReport> {
    let t = subset_tables(hc, obj, ground)?;
    let mut representative: HashMap<Vec<u32>, usize> = HashMap::new();
    for mask in 0..t.sets.len() {
        let key = vs_key(&t.version_spaces[mask]);
        match representative.get(&key) {
            None => {
                representative.insert(key, mask);
            }
            Some(&repr) => {
                if t.values[mask] != t.values[repr] {
                    return Ok(CheckReport::fail(Witness::LearningValueMismatch {
                        a: t.sets[repr].clone(),
                        b: t.sets[mask].clone(),
                        value_a: t.values[repr].clone(),
                        value_b: t.values[mask].clone(),
                    }));
                }
            }
        }
    }
    let reprs: Vec<usize> = representative.into_values().collect();
    for &a in &reprs {
        for &b in &reprs {
            if a != b && t.version_spaces[a].is_subset(&t.version_spaces[b])
                && t.values[a] < t.values[b]
            {
                return Ok(CheckReport::fail(Witness::LearningNotAntitone {
                    smaller_vs: t.sets[a].clone(),
                    larger_vs: t.sets[b].clone(),
                    value_smaller: t.values[a].clone(),
                    value_larger: t.values[b].clone(),
                }));
            }
        }
    }
    Ok(CheckReport::pass())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// sscr * alpha * (ln(Q/eta) + 1) * OPT, for learning objectives.
    Learning,
    /// 2 * min(gsscr, crr) * alpha * (ln(Q/eta) + 1) * OPT, for
    /// consistency-aware objectives.
    General,
    /// The trivial crr * alpha * (ln Q + 1) * OPT comparison bound.
    CrrTrivial,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Learning => "learning",
            BoundKind::General => "general",
            BoundKind::CrrTrivial => "crr-trivial",
        })
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "learning" => Ok(BoundKind::Learning),
            "general" => Ok(BoundKind::General),
            "crr-trivial" | "crr_trivial" | "crr" => Ok(BoundKind::CrrTrivial),
            other => Err(Error::InvalidParams(format!(
                "unknown bound kind {other:?} (expected learning, general, or crr-trivial)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub passed: bool,
    pub greedy_cost: Rat,
    pub opt: Rat,
    pub factor: Ext,
    /// Upper endpoint of the outward-rounded enclosure of the log term.
    pub log_term_upper: Rat,
    pub bound: Ext,
}

/// Checks greedy_cost <= factor * alpha * (ln(arg) + 1) * OPT with the ln
/// enclosure's upper endpoint, so a reported violation is a real one.
pub fn compute_bound(
    kind: BoundKind,
    greedy_cost: &Rat,
    opt: &Rat,
    ratios: &CostRatios,
    q: &Rat,
    eta: &Rat,
    alpha: &Rat,
) -> BoundReport {
    let factor = match kind {
        BoundKind::Learning => ratios.sscr.clone(),
        BoundKind::General => {
            let m = ratios.gsscr.clone().min(ratios.crr.clone());
            match m {
                Ext::Finite(r) => Ext::Finite(r * Rat::from_integer(2.into())),
                Ext::Infinite => Ext::Infinite,
            }
        }
        BoundKind::CrrTrivial => ratios.crr.clone(),
    };
    let arg = match kind {
        BoundKind::CrrTrivial => q.clone(),
        _ => q / eta,
    };
    let (_, ln_hi) = ln_interval(&arg);
    let log_term_upper = &ln_hi + Rat::one();
    let multiplier = alpha * &log_term_upper * opt;
    let bound = match &factor {
        Ext::Infinite => {
            if multiplier.is_positive() {
                Ext::Infinite
            } else {
                Ext::Finite(Rat::zero())
            }
        }
        Ext::Finite(f) => Ext::Finite(f * &multiplier),
    };
    let passed = Ext::Finite(greedy_cost.clone()) <= bound;
    BoundReport {
        kind,
        passed,
        greedy_cost: greedy_cost.clone(),
        opt: opt.clone(),
        factor,
        log_term_upper,
        bound,
    }
}

pub fn verify_bound(
    kind: BoundKind,
    greedy_cost: &Rat,
    opt: &Rat,
    ratios: &CostRatios,
    q: &Rat,
    eta: &Rat,
    alpha: &Rat,
) -> CheckReport {
    let report = compute_bound(kind, greedy_cost, opt, ratios, q, eta, alpha);
    if report.passed {
        CheckReport::pass()
    } else {
        CheckReport::fail(Witness::BoundViolated {
            greedy_cost: report.greedy_cost,
            bound: report.bound,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostModel;
    use crate::model::Hypothesis;
    use crate::objective::{Objective, ObjectiveKind};
    use crate::rational::{rat, rat_int};

    fn inst3() -> Instance {
        let hc = HypothesisClass::new(
            2,
            2,
            vec![
                Hypothesis::new(vec![ResponseId(0), ResponseId(0)]),
                Hypothesis::new(vec![ResponseId(0), ResponseId(1)]),
                Hypothesis::new(vec![ResponseId(1), ResponseId(0)]),
            ],
        )
        .unwrap();
        Instance::new(
            vec!["a".into(), "b".into()],
            vec!["1".into(), "2".into()],
            hc,
            CostModel::uniform(2, 2, rat_int(1)).unwrap(),
            Objective::vs_reduction(3).unwrap(),
        )
        .unwrap()
    }

    fn all_pairs(inst: &Instance) -> Vec<Pair> {
        let mut out = Vec::new();
        for x in inst.all_actions() {
            for y in 0..inst.num_responses() as u32 {
                out.push((x, ResponseId(y)));
            }
        }
        out
    }

    #[test]
    fn opt_on_three_hypothesis_instance() {
        let inst = inst3();
        let outcome = brute_force_opt(&inst, MemoMode::Pairs, OptLimits::default()).unwrap();
        let OptOutcome::Feasible { cost, tree } = outcome else {
            panic!("feasible instance");
        };
        assert_eq!(cost, rat_int(2));
        assert_eq!(tree.opt_cost(), &rat_int(2));
        // vs-keyed memoization agrees for this learning objective.
        let vs_outcome =
            brute_force_opt(&inst, MemoMode::VersionSpace, OptLimits::default()).unwrap();
        assert_eq!(vs_outcome.cost(), Ext::Finite(rat_int(2)));
        // Replay reaches the target within OPT for every hypothesis.
        for h in 0..3 {
            let (c, value) = tree.replay(&inst, h).unwrap();
            assert!(c <= cost);
            assert!(&value >= inst.objective.q());
        }
    }

    #[test]
    fn single_hypothesis_is_infeasible_for_vs_reduction() {
        // Q = 1 - 1/|H| needs |H| >= 2; with a modular fbar and an
        // unreachable Q the search reports infeasibility instead.
        let hc = HypothesisClass::new(
            1,
            2,
            vec![
                Hypothesis::new(vec![ResponseId(0)]),
                Hypothesis::new(vec![ResponseId(1)]),
            ],
        )
        .unwrap();
        let family = crate::objective::PerHypothesisFamily::Modular(
            crate::objective::ModularFamily {
                pair_weights: vec![vec![vec![rat_int(1), rat_int(1)]]; 2],
            },
        );
        let obj = Objective::fbar(family, None, rat_int(5), None).unwrap();
        let inst = Instance::new(
            vec!["a".into()],
            vec!["0".into(), "1".into()],
            hc,
            CostModel::uniform(1, 2, rat_int(1)).unwrap(),
            obj,
        )
        .unwrap();
        let outcome = brute_force_opt(&inst, MemoMode::Pairs, OptLimits::default()).unwrap();
        assert!(matches!(outcome, OptOutcome::Infeasible));
        assert_eq!(outcome.cost(), Ext::Infinite);
    }

    #[test]
    fn limits_are_enforced() {
        let inst = inst3();
        let limits = OptLimits {
            max_actions: 1,
            max_hypotheses: 64,
        };
        assert!(matches!(
            brute_force_opt(&inst, MemoMode::Pairs, limits),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn vs_memo_rejected_for_non_learning_objectives() {
        let mut inst = inst3();
        inst.objective = Objective::custom(
            vec![(ActionId(0), ResponseId(0))],
            vec![rat_int(0), rat_int(1)],
            rat_int(1),
            rat_int(1),
        )
        .unwrap();
        assert!(matches!(
            brute_force_opt(&inst, MemoMode::VersionSpace, OptLimits::default()),
            Err(Error::MemoNotApplicable { .. })
        ));
    }

    #[test]
    fn checkers_pass_for_vs_reduction() {
        let inst = inst3();
        let ground = all_pairs(&inst);
        assert!(check_monotone(&inst.hypotheses, &inst.objective, &ground)
            .unwrap()
            .passed);
        assert!(check_submodular(&inst.hypotheses, &inst.objective, &ground)
            .unwrap()
            .passed);
        assert!(
            check_consistency_aware(&inst.hypotheses, &inst.objective, &ground)
                .unwrap()
                .passed
        );
        assert!(
            check_learning_objective(&inst.hypotheses, &inst.objective, &ground)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn custom_violations_are_witnessed() {
        let inst = inst3();
        let p0 = (ActionId(0), ResponseId(0));
        let p1 = (ActionId(1), ResponseId(0));
        // Not monotone: f({p0}) = 2 > f({p0, p1}) = 1.
        let obj = Objective::custom(
            vec![p0, p1],
            vec![rat_int(0), rat_int(2), rat_int(1), rat_int(1)],
            rat_int(2),
            rat_int(1),
        )
        .unwrap();
        let report = check_monotone(&inst.hypotheses, &obj, &[p0, p1]).unwrap();
        assert!(!report.passed);
        assert!(matches!(report.witness, Some(Witness::Monotonicity { .. })));

        // Not submodular: value jumps only when both pairs are present.
        let obj = Objective::custom(
            vec![p0, p1],
            vec![rat_int(0), rat_int(0), rat_int(0), rat_int(2)],
            rat_int(2),
            rat_int(1),
        )
        .unwrap();
        let report = check_submodular(&inst.hypotheses, &obj, &[p0, p1]).unwrap();
        assert!(!report.passed);
        match report.witness {
            Some(Witness::Submodularity {
                delta_smaller,
                delta_larger,
                ..
            }) => {
                assert_eq!(delta_smaller, rat_int(0));
                assert_eq!(delta_larger, rat_int(2));
            }
            other => panic!("unexpected witness {other:?}"),
        }

        // Not consistency-aware: zero on an inconsistent set.
        let pa = (ActionId(0), ResponseId(1));
        let pb = (ActionId(1), ResponseId(1));
        let obj = Objective::custom(
            vec![pa, pb],
            vec![rat_int(0), rat_int(0), rat_int(0), rat_int(0)],
            rat_int(1),
            rat_int(1),
        )
        .unwrap();
        let report = check_consistency_aware(&inst.hypotheses, &obj, &[pa, pb]).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn structure_kind_is_a_learning_objective() {
        let inst = inst3();
        let obj = Objective::structure(vec![vec![0, 1], vec![1, 2]], None, 3).unwrap();
        let ground = all_pairs(&inst);
        let report = check_learning_objective(&inst.hypotheses, &obj, &ground).unwrap();
        assert!(report.passed);
        assert!(matches!(obj.kind, ObjectiveKind::Structure(_)));
    }

    #[test]
    fn ground_limit_enforced() {
        let inst = inst3();
        let mut ground = Vec::new();
        for i in 0..13u32 {
            ground.push((ActionId(i % 2), ResponseId(i % 2)));
        }
        // Duplicates aside, an oversize ground set errors out first.
        let ground: Vec<Pair> = (0..13)
            .map(|i| (ActionId(i / 7), ResponseId(i % 2)))
            .collect();
        let _ = ground;
        let big: Vec<Pair> = (0..13)
            .map(|i| (ActionId(0), ResponseId(i)))
            .map(|(x, y)| (x, ResponseId(y.0)))
            .collect();
        assert!(matches!(
            check_monotone(&inst.hypotheses, &inst.objective, &big),
            Err(Error::GroundSetTooLarge { .. })
        ));
    }

    #[test]
    fn bound_check_on_three_hypothesis_instance() {
        let inst = inst3();
        let ratios = inst.cost.ratios();
        // greedy = OPT = 2, sscr = 1, Q/eta = 2: bound = 2 (ln 2 + 1) ~ 3.39.
        let report = compute_bound(
            BoundKind::Learning,
            &rat_int(2),
            &rat_int(2),
            &ratios,
            inst.objective.q(),
            inst.objective.eta(),
            &Rat::one(),
        );
        assert!(report.passed);
        let bound = report.bound.as_finite().unwrap();
        assert!(bound > &rat(33, 10) && bound < &rat(34, 10));
        // greedy equal to OPT always passes.
        let report = compute_bound(
            BoundKind::General,
            &rat_int(2),
            &rat_int(2),
            &ratios,
            inst.objective.q(),
            inst.objective.eta(),
            &Rat::one(),
        );
        assert!(report.passed);
    }

    #[test]
    fn infinite_crr_bound_is_vacuous() {
        let cost = CostModel::new(vec![vec![rat_int(0), rat_int(1)]]).unwrap();
        let ratios = cost.ratios();
        assert_eq!(ratios.crr, Ext::Infinite);
        let report = compute_bound(
            BoundKind::CrrTrivial,
            &rat_int(1_000_000),
            &rat_int(1),
            &ratios,
            &rat_int(2),
            &rat_int(1),
            &Rat::one(),
        );
        assert!(report.passed);
        assert_eq!(report.bound, Ext::Infinite);
    }
}
