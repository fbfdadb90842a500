//! Voter accounts shared by Phragmén and MES.
//!
//! Voters with the same ballot and the same balance stay interchangeable
//! under both rules, so each such class is one account with a weight.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::model::{Account, Accounts, ApprovalProfile};
use crate::money::Money;

pub(crate) struct Acc {
    pub voters: Vec<usize>,
    pub weight: Money,
    pub balance: Money,
    pub ballot: Vec<usize>,
    pub payments: Vec<(usize, Money)>,
}

pub(crate) struct Ledger {
    pub accounts: Vec<Acc>,
    /// Accounts whose ballot contains each project.
    pub project_accounts: Vec<Vec<usize>>,
}

impl Ledger {
    /// One account per ballot group, all starting at `balance`.
    pub fn uniform(a: &ApprovalProfile, balance: &Money) -> Self {
        let accounts = a
            .groups()
            .iter()
            .map(|g| Acc {
                voters: g.members.clone(),
                weight: Money::from_integer(g.members.len().into()),
                balance: balance.clone(),
                ballot: g.ballot.clone(),
                payments: Vec::new(),
            })
            .collect();
        Self::index(a.num_projects(), accounts)
    }

    /// Ballot groups split further by initial balance.
    pub fn per_voter(a: &ApprovalProfile, balances: &[Money]) -> Self {
        let mut accounts = Vec::new();
        for g in a.groups() {
            let mut by_balance: BTreeMap<&Money, Vec<usize>> = BTreeMap::new();
            for &v in &g.members {
                by_balance.entry(&balances[v]).or_default().push(v);
            }
            for (b, voters) in by_balance {
                accounts.push(Acc {
                    weight: Money::from_integer(voters.len().into()),
                    voters,
                    balance: b.clone(),
                    ballot: g.ballot.clone(),
                    payments: Vec::new(),
                });
            }
        }
        Self::index(a.num_projects(), accounts)
    }

    fn index(m: usize, accounts: Vec<Acc>) -> Self {
        let mut project_accounts = vec![Vec::new(); m];
        for (i, acc) in accounts.iter().enumerate() {
            for &p in &acc.ballot {
                project_accounts[p].push(i);
            }
        }
        Self { accounts, project_accounts }
    }

    /// Σ_{i∈A(p)} b_i.
    pub fn funds(&self, p: usize) -> Money {
        let mut total = Money::zero();
        for &i in &self.project_accounts[p] {
            let acc = &self.accounts[i];
            if !acc.balance.is_zero() {
                total += &acc.balance * &acc.weight;
            }
        }
        total
    }

    /// (balance, weight) pairs of the supporters of `p`.
    pub fn supporter_balances(&self, p: usize) -> Vec<(Money, Money)> {
        self.project_accounts[p]
            .iter()
            .map(|&i| (self.accounts[i].balance.clone(), self.accounts[i].weight.clone()))
            .collect()
    }

    /// Charge every supporter of `p` min(b_i, cap). Returns the accounts
    /// that paid something.
    pub fn charge_capped(&mut self, p: usize, cap: &Money) -> Vec<usize> {
        let mut payers = Vec::new();
        for &i in &self.project_accounts[p] {
            let acc = &mut self.accounts[i];
            let pay = if acc.balance < *cap { acc.balance.clone() } else { cap.clone() };
            if !pay.is_zero() {
                acc.balance -= &pay;
                acc.payments.push((p, pay));
                payers.push(i);
            }
        }
        payers
    }

    pub fn into_accounts(self, num_voters: usize) -> Accounts {
        let mut voter_account = vec![0; num_voters];
        let entries = self
            .accounts
            .into_iter()
            .enumerate()
            .map(|(i, acc)| {
                for &v in &acc.voters {
                    voter_account[v] = i;
                }
                Account { voters: acc.voters, balance: acc.balance, payments: acc.payments }
            })
            .collect();
        Accounts { voter_account, entries }
    }
}

/// Smallest x with Σ w·min(b, x) = cost, or `None` when Σ w·b < cost.
pub(crate) fn equal_share_cap(mut entries: Vec<(Money, Money)>, cost: &Money) -> Option<Money> {
    if cost.is_zero() {
        return Some(Money::zero());
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let mut rest = cost.clone();
    let mut weight: Money = entries.iter().map(|e| &e.1).sum();
    for (b, w) in &entries {
        if b * &weight >= rest {
            return Some(rest / weight);
        }
        rest -= b * w;
        weight -= w;
    }
    None
}
