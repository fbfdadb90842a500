use num_traits::Zero;

use super::ledger::{equal_share_cap, Ledger};
use super::phragmen;
use crate::model::{Election, Outcome};
use crate::money::Money;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MesVariant {
    /// Payments capped at α·cost(p).
    Cost,
    /// Payments capped at α.
    Apr,
}

/// An affordability coefficient; `Infinite` when supporters cannot pay.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Affordability {
    Finite(Money),
    Infinite,
}

impl Affordability {
    pub fn finite(&self) -> Option<&Money> {
        match self {
            Affordability::Finite(a) => Some(a),
            Affordability::Infinite => None,
        }
    }
}

/// α with Σ min(b_i, α·cost) = cost.
pub fn solve_alpha_cost(balances: &[Money], cost: &Money) -> Affordability {
    alpha(unit_weights(balances), cost, MesVariant::Cost).0
}

/// α with Σ min(b_i, α) = cost.
pub fn solve_alpha_apr(balances: &[Money], cost: &Money) -> Affordability {
    alpha(unit_weights(balances), cost, MesVariant::Apr).0
}

fn unit_weights(balances: &[Money]) -> Vec<(Money, Money)> {
    balances.iter().map(|b| (b.clone(), Money::from_integer(1.into()))).collect()
}

/// Coefficient plus the per-voter payment cap it induces.
fn alpha(entries: Vec<(Money, Money)>, cost: &Money, variant: MesVariant) -> (Affordability, Option<Money>) {
    if cost.is_zero() {
        return (Affordability::Finite(Money::zero()), Some(Money::zero()));
    }
    match equal_share_cap(entries, cost) {
        None => (Affordability::Infinite, None),
        Some(cap) => {
            let a = match variant {
                MesVariant::Cost => &cap / cost,
                MesVariant::Apr => cap.clone(),
            };
            (Affordability::Finite(a), Some(cap))
        }
    }
}

pub fn mes(e: Election<'_>, variant: MesVariant) -> Outcome {
    let a = e.approvals;
    let share = e.budget / Money::from_integer(a.num_voters().into());
    let mut ledger = Ledger::uniform(a, &share);
    let (funded, removed, alphas) = run(e, &mut ledger, variant);
    Outcome { funded, removed, alphas, accounts: Some(ledger.into_accounts(a.num_voters())) }
}

/// MES followed by Phragmén on the leftover balances and budget.
pub fn mes_with_completion(e: Election<'_>, variant: MesVariant) -> Outcome {
    let a = e.approvals;
    let m = a.num_projects();
    let share = e.budget / Money::from_integer(a.num_voters().into());
    let mut ledger = Ledger::uniform(a, &share);
    let (mut funded, _, alphas) = run(e, &mut ledger, variant);
    let spent: Money = funded.iter().map(|&p| &e.costs[p]).sum();
    let rest = e.budget - spent;
    let mut eligible = vec![true; m];
    for &p in &funded {
        eligible[p] = false;
    }
    let (more, removed) = phragmen::run(e, &mut ledger, &rest, &eligible);
    funded.extend(more);
    Outcome { funded, removed, alphas, accounts: Some(ledger.into_accounts(a.num_voters())) }
}

fn run(e: Election<'_>, ledger: &mut Ledger, variant: MesVariant) -> (Vec<usize>, Vec<usize>, Vec<Money>) {
    let m = e.approvals.num_projects();
    let mut remaining: Vec<usize> = (0..m).collect();
    remaining.sort_by_key(|&p| e.order.rank(p));
    // Balances only fall, so α only grows: a stale value is a lower bound
    // and only the current minimum ever needs recomputing.
    let mut cache: Vec<(Affordability, Option<Money>)> =
        (0..m).map(|p| alpha(ledger.supporter_balances(p), &e.costs[p], variant)).collect();
    let mut fresh = vec![true; m];
    let mut funded = Vec::new();
    let mut alphas = Vec::new();
    let mut account_projects = vec![Vec::new(); ledger.accounts.len()];
    for (p, accs) in ledger.project_accounts.iter().enumerate() {
        for &i in accs {
            account_projects[i].push(p);
        }
    }

    loop {
        let mut best: Option<usize> = None;
        for (slot, &p) in remaining.iter().enumerate() {
            if cache[p].0 == Affordability::Infinite {
                continue;
            }
            // Strict comparison over ≻-sorted `remaining` keeps the ≻-best tie.
            if best.is_none_or(|b| cache[p].0 < cache[remaining[b]].0) {
                best = Some(slot);
            }
        }
        let Some(slot) = best else { break };
        let p = remaining[slot];
        if !fresh[p] {
            cache[p] = alpha(ledger.supporter_balances(p), &e.costs[p], variant);
            fresh[p] = true;
            continue;
        }
        remaining.remove(slot);
        let (ap, cap) = std::mem::replace(&mut cache[p], (Affordability::Infinite, None));
        let cap = cap.expect("finite coefficient has a cap");
        for i in ledger.charge_capped(p, &cap) {
            for &q in &account_projects[i] {
                fresh[q] = false;
            }
        }
        funded.push(p);
        alphas.push(match ap {
            Affordability::Finite(x) => x,
            Affordability::Infinite => unreachable!("infinite coefficients are skipped"),
        });
    }
    (funded, remaining, alphas)
}
