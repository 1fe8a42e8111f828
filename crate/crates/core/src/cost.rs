//! Response-dependent cost model and the ratio quantities that drive the
//! approximation bounds: crr, sscr, and gsscr.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{ActionId, PairSet, ResponseId};
use crate::rational::{cost_ratio, Ext, Rat};

/// cost(x, y) table; every entry is a finite non-negative rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostModel {
    table: Vec<Vec<Rat>>,
}

impl CostModel {
    pub fn new(table: Vec<Vec<Rat>>) -> Result<Self> {
        if table.is_empty() || table[0].is_empty() {
            return Err(Error::InvalidInstance(
                "cost table must have at least one action and one response".into(),
            ));
        }
        let width = table[0].len();
        for (x, row) in table.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidInstance(format!(
                    "cost row {x} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if let Some(c) = row.iter().find(|c| c.is_negative()) {
                return Err(Error::InvalidInstance(format!(
                    "negative cost {c} for action {x}"
                )));
            }
        }
        Ok(CostModel { table })
    }

    pub fn uniform(num_actions: usize, num_responses: usize, c: Rat) -> Result<Self> {
        Self::new(vec![vec![c; num_responses]; num_actions])
    }

    pub fn num_actions(&self) -> usize {
        self.table.len()
    }

    pub fn num_responses(&self) -> usize {
        self.table[0].len()
    }

    pub fn cost(&self, x: ActionId, y: ResponseId) -> &Rat {
        &self.table[x.0 as usize][y.0 as usize]
    }

    pub fn row(&self, x: ActionId) -> &[Rat] {
        &self.table[x.0 as usize]
    }

    pub fn pair_set_cost(&self, s: &PairSet) -> Rat {
        s.iter().map(|(x, y)| self.cost(*x, *y)).sum()
    }

    /// Exact positive rescaling; greedy decisions are invariant under it.
    pub fn scale(&self, factor: &Rat) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidParams(format!(
                "cost scale factor must be positive, got {factor}"
            )));
        }
        Ok(CostModel {
            table: self
                .table
                .iter()
                .map(|row| row.iter().map(|c| c * factor).collect())
                .collect(),
        })
    }

    pub fn select_actions(&self, keep: &[ActionId]) -> Self {
        CostModel {
            table: keep
                .iter()
                .map(|x| self.table[x.0 as usize].clone())
                .collect(),
        }
    }

    /// phi(x): the second-smallest cost among x's responses, counting
    /// multiplicity. With a single response this is that response's cost,
    /// which keeps sscr = 1 when no bifurcation is possible.
    pub fn minsec(&self, x: ActionId) -> Rat {
        let row = &self.table[x.0 as usize];
        if row.len() == 1 {
            return row[0].clone();
        }
        let mut sorted: Vec<&Rat> = row.iter().collect();
        sorted.sort();
        sorted[1].clone()
    }

    pub fn ratios(&self) -> CostRatios {
        let mut crr = Ext::one();
        let mut sscr = Ext::one();
        let mut phi = Vec::with_capacity(self.table.len());
        let mut cmax = Rat::zero();
        for (xi, row) in self.table.iter().enumerate() {
            let x = ActionId(xi as u32);
            let min = row.iter().min().expect("non-empty row");
            let max = row.iter().max().expect("non-empty row");
            crr = crr.max(cost_ratio(max, min));
            let second = self.minsec(x);
            sscr = sscr.max(cost_ratio(max, &second));
            cmax = cmax.max(max.clone());
            phi.push(second);
        }
        let phi_min = phi.iter().min().expect("non-empty table").clone();
        let gsscr = cost_ratio(&cmax, &phi_min);
        CostRatios {
            crr,
            sscr,
            gsscr,
            phi,
            phi_min,
            cmax,
        }
    }
}

/// Derived cost quantities. All three ratios live in the extended
/// non-negative rationals; crr is +∞ exactly when some action mixes a
/// zero-cost response with a positive-cost one.
#[derive(Clone, Debug)]
pub struct CostRatios {
    pub crr: Ext,
    pub sscr: Ext,
    pub gsscr: Ext,
    pub phi: Vec<Rat>,
    pub phi_min: Rat,
    pub cmax: Rat,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn cm(rows: &[&[i64]]) -> CostModel {
        CostModel::new(
            rows.iter()
                .map(|r| r.iter().map(|c| rat_int(*c)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn minsec_counts_multiplicity() {
        let m = cm(&[&[1, 5, 10], &[2, 2, 5], &[0, 7]]);
        assert_eq!(m.minsec(ActionId(0)), rat_int(5));
        assert_eq!(m.minsec(ActionId(1)), rat_int(2));
        assert_eq!(m.minsec(ActionId(2)), rat_int(7));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(CostModel::new(vec![
            vec![rat_int(1), rat_int(5), rat_int(10)],
            vec![rat_int(2), rat_int(2)],
        ])
        .is_err());
    }

    #[test]
    fn ratios_from_definitions() {
        // sscr = max(10/5, 2/2) = 2; phi_min = min(5, 2) = 2; gsscr = 10/2 = 5.
        let m = cm(&[&[1, 5, 10], &[2, 2, 2]]);
        let r = m.ratios();
        assert_eq!(r.sscr, Ext::Finite(rat_int(2)));
        assert_eq!(r.phi_min, rat_int(2));
        assert_eq!(r.cmax, rat_int(10));
        assert_eq!(r.gsscr, Ext::Finite(rat_int(5)));
        assert_eq!(r.crr, Ext::Finite(rat_int(10)));
    }

    #[test]
    fn zero_cost_response_per_action() {
        // One zero-cost response and unit others: crr = inf, sscr = gsscr = 1.
        let m = cm(&[&[0, 1, 1], &[1, 0, 1]]);
        let r = m.ratios();
        assert_eq!(r.crr, Ext::Infinite);
        assert_eq!(r.sscr, Ext::one());
        assert_eq!(r.gsscr, Ext::one());
    }

    #[test]
    fn uniform_costs_have_unit_ratios() {
        let m = cm(&[&[3, 3], &[3, 3]]);
        let r = m.ratios();
        assert_eq!(r.crr, Ext::one());
        assert_eq!(r.sscr, Ext::one());
        assert_eq!(r.gsscr, Ext::one());
    }

    #[test]
    fn two_responses_force_sscr_one() {
        let m = cm(&[&[0, 5], &[2, 9]]);
        assert_eq!(m.ratios().sscr, Ext::one());
    }

    #[test]
    fn scaling_preserves_ratios() {
        let m = cm(&[&[1, 5, 10], &[2, 2, 2]]);
        let scaled = m.scale(&rat(7, 3)).unwrap();
        let (a, b) = (m.ratios(), scaled.ratios());
        assert_eq!(a.crr, b.crr);
        assert_eq!(a.sscr, b.sscr);
        assert_eq!(a.gsscr, b.gsscr);
        assert_eq!(b.cmax, rat(70, 3));
        assert!(m.scale(&rat_int(0)).is_err());
    }
}
