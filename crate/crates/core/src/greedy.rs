//! The greedy engine: utility functions over the current version space, the
//! interactive run loop against an oracle hypothesis, and worst-case cost.
//!
//! Selection is exact argmax with ties broken towards the smallest action id,
//! and an action is never selected twice; both choices keep runs fully
//! deterministic, which the adversarial lower-bound generator relies on.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ActionId, Instance, PairSet, ResponseId};
use crate::objective::IncrementalEval;
use crate::rational::{format_rat, utility_ratio, Ext, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UtilityVariant {
    /// min over consistent responses of truncated-marginal / cost(x, y).
    Uf,
    /// Ignores response dependence: divides by the action's maximum cost.
    U2,
    /// Divides by min(cost(x, y), phi_min).
    U3,
}

impl UtilityVariant {
    pub const ALL: [UtilityVariant; 3] = [UtilityVariant::Uf, UtilityVariant::U2, UtilityVariant::U3];
}

impl fmt::Display for UtilityVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UtilityVariant::Uf => "uf",
            UtilityVariant::U2 => "u2",
            UtilityVariant::U3 => "u3",
        })
    }
}

impl FromStr for UtilityVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uf" | "u" => Ok(UtilityVariant::Uf),
            "u2" => Ok(UtilityVariant::U2),
            "u3" => Ok(UtilityVariant::U3),
            other => Err(Error::InvalidParams(format!(
                "unknown utility variant {other:?} (expected uf, u2, or u3)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub action: ActionId,
    pub response: ResponseId,
    pub step_cost: Rat,
    pub f_after: Rat,
}

/// The pair sequence and per-step costs of one greedy run.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RunTrace {
    pub steps: Vec<TraceStep>,
    pub total_cost: Rat,
    pub reached_target: bool,
}

impl RunTrace {
    pub fn pair_set(&self) -> PairSet {
        PairSet::from_pairs(self.steps.iter().map(|s| (s.action, s.response)).collect())
    }
}

/// Evaluates one utility variant for a candidate action.
pub fn utility(
    variant: UtilityVariant,
    inst: &Instance,
    x: ActionId,
    s: &PairSet,
) -> Result<Ext> {
    let eval = IncrementalEval::from_set(&inst.objective, &inst.hypotheses, s);
    if eval.vs().is_clear() {
        return Err(Error::EmptyVersionSpace);
    }
    let phi_min = inst.cost.ratios().phi_min;
    Ok(utility_from_state(variant, inst, &eval, &phi_min, x))
}

fn utility_from_state(
    variant: UtilityVariant,
    inst: &Instance,
    eval: &IncrementalEval,
    phi_min: &Rat,
    x: ActionId,
) -> Ext {
    let possible = inst.hypotheses.possible_responses_in(x, eval.vs());
    let max_cost = inst.cost.row(x).iter().max().expect("non-empty cost row");
    let mut best: Option<Ext> = None;
    for y in possible {
        let delta = eval.truncated_marginal((x, y));
        let ratio = match variant {
            UtilityVariant::Uf => utility_ratio(&delta, inst.cost.cost(x, y)),
            UtilityVariant::U2 => utility_ratio(&delta, max_cost),
            UtilityVariant::U3 => {
                let denom = inst.cost.cost(x, y).min(phi_min).clone();
                utility_ratio(&delta, &denom)
            }
        };
        best = Some(match best {
            None => ratio,
            Some(b) => b.min(ratio),
        });
    }
    best.unwrap_or_else(Ext::zero)
}

enum StepOutcome {
    TargetReached,
    Pick(ActionId),
    Stalled,
}

fn step_from_state(
    variant: UtilityVariant,
    inst: &Instance,
    eval: &IncrementalEval,
    phi_min: &Rat,
    available: &[ActionId],
) -> Result<StepOutcome> {
    if eval.reached_target() {
        return Ok(StepOutcome::TargetReached);
    }
    if eval.vs().is_clear() {
        return Err(Error::EmptyVersionSpace);
    }
    let mut best: Option<(Ext, ActionId)> = None;
    for &x in available {
        let u = utility_from_state(variant, inst, eval, phi_min, x);
        // Strict comparison plus ascending iteration = smallest-id tie-break.
        if best.as_ref().is_none_or(|(b, _)| u > *b) {
            best = Some((u, x));
        }
    }
    let Some((best_utility, pick)) = best else {
        return Ok(StepOutcome::Stalled);
    };
    if best_utility == Ext::zero() {
        // A zero best utility is a stall only if no available action can make
        // progress against any consistent response.
        let progress_possible = available.iter().any(|&x| {
            inst.hypotheses
                .possible_responses_in(x, eval.vs())
                .into_iter()
                .any(|y| !eval.truncated_marginal((x, y)).is_zero())
        });
        if !progress_possible {
            return Ok(StepOutcome::Stalled);
        }
    }
    Ok(StepOutcome::Pick(pick))
}

/// One greedy decision: `None` exactly when the target is already met,
/// otherwise the available action with maximal utility.
pub fn greedy_step(
    variant: UtilityVariant,
    inst: &Instance,
    s: &PairSet,
    available: &[ActionId],
) -> Result<Option<ActionId>> {
    let eval = IncrementalEval::from_set(&inst.objective, &inst.hypotheses, s);
    let phi_min = inst.cost.ratios().phi_min;
    match step_from_state(variant, inst, &eval, &phi_min, available)? {
        StepOutcome::TargetReached => Ok(None),
        StepOutcome::Pick(x) => Ok(Some(x)),
        StepOutcome::Stalled => Err(Error::StalledRun {
            value: format_rat(eval.value()),
            target: format_rat(inst.objective.q()),
            trace: None,
        }),
    }
}

/// Runs the interactive loop against hypothesis `h_star` until the target is
/// reached or the run stalls.
pub fn run(variant: UtilityVariant, inst: &Instance, h_star: usize) -> Result<RunTrace> {
    if h_star >= inst.hypotheses.len() {
        return Err(Error::InvalidParams(format!(
            "h* index {h_star} out of range for {} hypotheses",
            inst.hypotheses.len()
        )));
    }
    let phi_min = inst.cost.ratios().phi_min;
    let mut eval = IncrementalEval::new(&inst.objective, &inst.hypotheses);
    let mut available: Vec<ActionId> = inst.all_actions().collect();
    let mut trace = RunTrace::default();
    loop {
        match step_from_state(variant, inst, &eval, &phi_min, &available)? {
            StepOutcome::TargetReached => {
                trace.reached_target = true;
                return Ok(trace);
            }
            StepOutcome::Stalled => {
                return Err(Error::StalledRun {
                    value: format_rat(eval.value()),
                    target: format_rat(inst.objective.q()),
                    trace: Some(Box::new(trace)),
                });
            }
            StepOutcome::Pick(x) => {
                let y = inst.hypotheses.response(h_star, x);
                let step_cost = inst.cost.cost(x, y).clone();
                trace.total_cost += &step_cost;
                eval.push((x, y));
                trace.steps.push(TraceStep {
                    action: x,
                    response: y,
                    step_cost,
                    f_after: eval.value().clone(),
                });
                available.retain(|a| *a != x);
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct WorstCase {
    pub cost: Rat,
    pub witness: usize,
    pub witness_trace: RunTrace,
}

/// max over h in H of the greedy run cost, with the smallest maximizing
/// hypothesis as witness.
pub fn worst_case_cost(variant: UtilityVariant, inst: &Instance) -> Result<WorstCase> {
    let all: Vec<usize> = (0..inst.hypotheses.len()).collect();
    worst_case_cost_over(variant, inst, &all)
}

/// Worst case over an explicit hypothesis subset (used by seeded sampling).
pub fn worst_case_cost_over(
    variant: UtilityVariant,
    inst: &Instance,
    hypotheses: &[usize],
) -> Result<WorstCase> {
    if hypotheses.is_empty() {
        return Err(Error::InvalidParams("empty hypothesis subset".into()));
    }
    let runs: Vec<(usize, Result<RunTrace>)> = hypotheses
        .par_iter()
        .map(|&h| (h, run(variant, inst, h)))
        .collect();
    let mut worst: Option<WorstCase> = None;
    for (h, outcome) in runs {
        let trace = outcome?;
        if worst.as_ref().is_none_or(|w| trace.total_cost > w.cost) {
            worst = Some(WorstCase {
                cost: trace.total_cost.clone(),
                witness: h,
                witness_trace: trace,
            });
        }
    }
    Ok(worst.expect("non-empty subset"))
}
