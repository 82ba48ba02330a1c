use serde::Serialize;

use super::PuzzleError;

/// Price of the first bit.
pub const START_COST: u64 = 1;
/// Price of appending 4 random bits (`ℓ → ℓ + 4`).
pub const APPEND_COST: u64 = 2;
/// Price of appending `2ℓ` random bits (`ℓ → 3ℓ`).
pub const TRIPLE_COST: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowOp {
    Append4,
    Triple,
}

impl GrowOp {
    pub fn apply(self, len: usize) -> usize {
        match self {
            GrowOp::Append4 => len + 4,
            GrowOp::Triple => len * 3,
        }
    }

    pub fn cost(self) -> u64 {
        match self {
            GrowOp::Append4 => APPEND_COST,
            GrowOp::Triple => TRIPLE_COST,
        }
    }
}

/// Minimal cost of every length up to a target, with back-pointers.
#[derive(Clone, Debug)]
pub struct CostTable {
    cost: Vec<Option<u64>>,
    back: Vec<Option<GrowOp>>,
}

impl CostTable {
    pub fn build(target: usize) -> Result<Self, PuzzleError> {
        if target == 0 {
            return Err(PuzzleError::ZeroLength);
        }
        let mut cost = vec![None; target + 1];
        let mut back = vec![None; target + 1];
        cost[1] = Some(START_COST);
        // Both operations strictly lengthen, so ascending order is topological.
        for len in 1..=target {
            let Some(c) = cost[len] else { continue };
            for op in [GrowOp::Append4, GrowOp::Triple] {
                let next = op.apply(len);
                if next <= target {
                    let nc = c + op.cost();
                    if cost[next].is_none_or(|old| nc < old) {
                        cost[next] = Some(nc);
                        back[next] = Some(op);
                    }
                }
            }
        }
        Ok(CostTable { cost, back })
    }

    pub fn target(&self) -> usize {
        self.cost.len() - 1
    }

    pub fn cost(&self, len: usize) -> Option<u64> {
        self.cost.get(len).copied().flatten()
    }

    /// Operations from length 1 to `len`, in application order.
    pub fn ops(&self, len: usize) -> Option<Vec<GrowOp>> {
        self.cost(len)?;
        let mut ops = Vec::new();
        let mut cur = len;
        while cur != 1 {
            let op = self.back[cur]?;
            ops.push(op);
            cur = match op {
                GrowOp::Append4 => cur - 4,
                GrowOp::Triple => cur / 3,
            };
        }
        ops.reverse();
        Some(ops)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenerationPlan {
    pub length: usize,
    pub cost: u64,
    pub ops: Vec<GrowOp>,
}

impl GenerationPlan {
    /// Replays the operations from length 1, returning `(length, cost)`.
    pub fn replay(&self) -> (usize, u64) {
        self.ops
            .iter()
            .fold((1, START_COST), |(l, c), op| (op.apply(l), c + op.cost()))
    }
}

/// Cheapest way to generate exactly `len` bits; `Ok(None)` if no sequence of
/// operations reaches that length (every even length, for instance).
pub fn min_generation_cost(len: usize) -> Result<Option<GenerationPlan>, PuzzleError> {
    let table = CostTable::build(len)?;
    Ok(table.cost(len).map(|cost| GenerationPlan {
        length: len,
        cost,
        ops: table.ops(len).expect("reachable length has a back-pointer chain"),
    }))
}
