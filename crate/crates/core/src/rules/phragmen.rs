use num_traits::{Signed, Zero};

use super::ledger::{equal_share_cap, Ledger};
use crate::model::{Election, Outcome};
use crate::money::Money;

/// Sequential Phragmén as an event simulation.
pub fn phragmen(e: Election<'_>, initial_balances: Option<&[Money]>, eligible: Option<&[bool]>) -> Outcome {
    let a = e.approvals;
    let mut ledger = match initial_balances {
        Some(b) => Ledger::per_voter(a, b),
        None => Ledger::uniform(a, &Money::zero()),
    };
    let eligible: Vec<bool> = eligible.map_or_else(|| vec![true; a.num_projects()], <[bool]>::to_vec);
    let (funded, removed) = run(e, &mut ledger, e.budget, &eligible);
    Outcome { funded, removed, alphas: Vec::new(), accounts: Some(ledger.into_accounts(a.num_voters())) }
}

/// Runs on an existing ledger with its own budget; returns (funded, removed).
pub(crate) fn run(e: Election<'_>, ledger: &mut Ledger, budget: &Money, eligible: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let a = e.approvals;
    let mut remaining: Vec<usize> = (0..a.num_projects()).filter(|&p| eligible[p]).collect();
    remaining.sort_by_key(|&p| e.order.rank(p));
    let scores: Vec<Money> = (0..a.num_projects()).map(|p| Money::from_integer(a.score(p).into())).collect();
    let mut spent = Money::zero();
    let mut funded = Vec::new();
    let mut removed = Vec::new();

    while !remaining.is_empty() {
        // `remaining` is kept in ≻ order, so the first project reaching the
        // minimal waiting time is the ≻-best purchasable one.
        let mut best: Option<(usize, Money)> = None;
        for (slot, &p) in remaining.iter().enumerate() {
            let need = &e.costs[p] - ledger.funds(p);
            let wait = if need.is_positive() { need / &scores[p] } else { Money::zero() };
            if best.as_ref().is_none_or(|(_, w)| wait < *w) {
                let done = wait.is_zero();
                best = Some((slot, wait));
                if done {
                    break;
                }
            }
        }
        let (slot, wait) = best.expect("remaining is nonempty");
        if wait.is_positive() {
            for acc in &mut ledger.accounts {
                acc.balance += &wait;
            }
        }
        let p = remaining.remove(slot);
        let cost = &e.costs[p];
        if &spent + cost <= *budget {
            spent += cost;
            funded.push(p);
            pay(ledger, p, cost);
        } else {
            removed.push(p);
        }
    }
    (funded, removed)
}

/// Supporters pay for `p`. Normally their funds equal the cost exactly and
/// every account is emptied; with surplus starting balances the cost is
/// split with an equal per-voter cap instead.
fn pay(ledger: &mut Ledger, p: usize, cost: &Money) {
    let funds = ledger.funds(p);
    if funds == *cost {
        for &i in &ledger.project_accounts[p] {
            let acc = &mut ledger.accounts[i];
            if !acc.balance.is_zero() {
                let amount = std::mem::replace(&mut acc.balance, Money::zero());
                acc.payments.push((p, amount));
            }
        }
    } else {
        let cap = equal_share_cap(ledger.supporter_balances(p), cost).expect("supporters can afford the project");
        ledger.charge_capped(p, &cap);
    }
}
