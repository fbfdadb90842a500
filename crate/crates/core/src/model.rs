//! Instances, games, strategy profiles and outcomes.
//!
//! Projects and voters are addressed by their position (`usize`) in the
//! approval profile; the string identifiers only matter for I/O.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::money::{self, Money};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate project id {0:?}")]
    DuplicateProject(String),
    #[error("duplicate voter id {0:?}")]
    DuplicateVoter(String),
    #[error("unknown project id {0:?}")]
    UnknownProject(String),
    #[error("project index {0} out of range")]
    ProjectIndex(usize),
    #[error("voter {0:?} has an empty ballot")]
    EmptyBallot(String),
    #[error("project {0:?} is not approved by any voter")]
    Unapproved(String),
    #[error("expected {expected} values, got {found}")]
    Length { expected: usize, found: usize },
    #[error("tie-break order is not a permutation of the projects")]
    NotPermutation,
    #[error("budget must be positive")]
    Budget,
    #[error("negative amount for project {0:?}")]
    Negative(String),
    #[error("delivery cost of {0:?} exceeds the budget")]
    DeliveryAboveBudget(String),
}

/// Voters sharing one ballot. Every rule treats them identically as long as
/// they also share a balance, so rules work on groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoterGroup {
    pub ballot: Vec<usize>,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApprovalProfile {
    projects: Vec<String>,
    voters: Vec<String>,
    ballots: Vec<Vec<usize>>,
    supporters: Vec<Vec<usize>>,
    groups: Vec<VoterGroup>,
    group_of: Vec<usize>,
    project_groups: Vec<Vec<usize>>,
}

impl ApprovalProfile {
    /// Build from identifiers. Ballots are sets: repeated approvals collapse.
    pub fn new<P, V, B>(projects: P, ballots: B) -> Result<Self, ModelError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        B: IntoIterator<Item = (V, Vec<String>)>,
        V: Into<String>,
    {
        let projects: Vec<String> = projects.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, p) in projects.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(ModelError::DuplicateProject(p.clone()));
            }
        }
        let mut voters = Vec::new();
        let mut idx_ballots = Vec::new();
        for (v, ballot) in ballots {
            voters.push(v.into());
            let mut b = Vec::with_capacity(ballot.len());
            for p in ballot {
                b.push(*index.get(&p).ok_or(ModelError::UnknownProject(p))?);
            }
            idx_ballots.push(b);
        }
        Self::from_indices(projects, voters, idx_ballots)
    }

    pub fn from_indices(
        projects: Vec<String>,
        voters: Vec<String>,
        ballots: Vec<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        let m = projects.len();
        if voters.len() != ballots.len() {
            return Err(ModelError::Length { expected: voters.len(), found: ballots.len() });
        }
        let mut seen = HashMap::new();
        for (i, p) in projects.iter().enumerate() {
            if seen.insert(p.as_str(), i).is_some() {
                return Err(ModelError::DuplicateProject(p.clone()));
            }
        }
        let mut seen = HashMap::new();
        for v in &voters {
            if seen.insert(v.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateVoter(v.clone()));
            }
        }
        let mut supporters = vec![Vec::new(); m];
        let mut clean = Vec::with_capacity(ballots.len());
        for (v, mut b) in ballots.into_iter().enumerate() {
            b.sort_unstable();
            b.dedup();
            if b.is_empty() {
                return Err(ModelError::EmptyBallot(voters[v].clone()));
            }
            for &p in &b {
                if p >= m {
                    return Err(ModelError::ProjectIndex(p));
                }
                supporters[p].push(v);
            }
            clean.push(b);
        }
        if let Some(p) = supporters.iter().position(Vec::is_empty) {
            return Err(ModelError::Unapproved(projects[p].clone()));
        }
        let mut group_ix: HashMap<&[usize], usize> = HashMap::new();
        let mut groups: Vec<VoterGroup> = Vec::new();
        let mut group_of = Vec::with_capacity(clean.len());
        for (v, b) in clean.iter().enumerate() {
            let g = *group_ix.entry(b.as_slice()).or_insert_with(|| {
                groups.push(VoterGroup { ballot: b.clone(), members: Vec::new() });
                groups.len() - 1
            });
            groups[g].members.push(v);
            group_of.push(g);
        }
        let mut project_groups = vec![Vec::new(); m];
        for (g, grp) in groups.iter().enumerate() {
            for &p in &grp.ballot {
                project_groups[p].push(g);
            }
        }
        Ok(Self { projects, voters, ballots: clean, supporters, groups, group_of, project_groups })
    }

    pub fn num_projects(&self) -> usize {
        self.projects.len()
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn project_ids(&self) -> &[String] {
        &self.projects
    }

    pub fn project_id(&self, p: usize) -> &str {
        &self.projects[p]
    }

    pub fn project_index(&self, id: &str) -> Option<usize> {
        self.projects.iter().position(|p| p == id)
    }

    pub fn voter_ids(&self) -> &[String] {
        &self.voters
    }

    /// A(v): sorted project indices.
    pub fn ballot(&self, v: usize) -> &[usize] {
        &self.ballots[v]
    }

    pub fn ballots(&self) -> &[Vec<usize>] {
        &self.ballots
    }

    /// A(p): sorted voter indices.
    pub fn supporters(&self, p: usize) -> &[usize] {
        &self.supporters[p]
    }

    /// |A(p)|.
    pub fn score(&self, p: usize) -> usize {
        self.supporters[p].len()
    }

    pub fn groups(&self) -> &[VoterGroup] {
        &self.groups
    }

    pub fn group_of(&self, v: usize) -> usize {
        self.group_of[v]
    }

    /// Groups whose ballot contains `p`.
    pub fn project_groups(&self, p: usize) -> &[usize] {
        &self.project_groups[p]
    }

    /// Σ_p |A(p)|.
    pub fn total_score(&self) -> usize {
        self.ballots.iter().map(Vec::len).sum()
    }

    /// Projects sorted by approval score descending, then by index.
    pub fn by_score(&self) -> Vec<usize> {
        let mut ps: Vec<usize> = (0..self.num_projects()).collect();
        ps.sort_by_key(|&p| (std::cmp::Reverse(self.score(p)), p));
        ps
    }
}

/// A strict ranking of all projects; earlier is preferred.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TieBreakOrder {
    ranking: Vec<usize>,
    rank: Vec<usize>,
}

impl TieBreakOrder {
    pub fn new(ranking: Vec<usize>) -> Result<Self, ModelError> {
        let m = ranking.len();
        let mut rank = vec![usize::MAX; m];
        for (i, &p) in ranking.iter().enumerate() {
            if p >= m || rank[p] != usize::MAX {
                return Err(ModelError::NotPermutation);
            }
            rank[p] = i;
        }
        Ok(Self { ranking, rank })
    }

    /// Index order: p0 ≻ p1 ≻ ...
    pub fn identity(m: usize) -> Self {
        Self::new((0..m).collect()).expect("identity is a permutation")
    }

    pub fn from_ids(approvals: &ApprovalProfile, ids: &[&str]) -> Result<Self, ModelError> {
        let ranking = ids
            .iter()
            .map(|id| approvals.project_index(id).ok_or_else(|| ModelError::UnknownProject(id.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if ranking.len() != approvals.num_projects() {
            return Err(ModelError::NotPermutation);
        }
        Self::new(ranking)
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// Position of `p`; lower is preferred.
    pub fn rank(&self, p: usize) -> usize {
        self.rank[p]
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }
}

/// One reported cost per project.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    costs: Vec<Money>,
}

impl StrategyProfile {
    pub fn new(costs: Vec<Money>) -> Result<Self, ModelError> {
        if let Some(p) = costs.iter().position(Signed::is_negative) {
            return Err(ModelError::Negative(format!("#{p}")));
        }
        Ok(Self { costs })
    }

    pub fn from_ints(costs: &[i64]) -> Self {
        Self::new(costs.iter().map(|&c| money::int(c)).collect()).expect("nonnegative costs")
    }

    pub fn costs(&self) -> &[Money] {
        &self.costs
    }

    pub fn cost(&self, p: usize) -> &Money {
        &self.costs[p]
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// (c_{-p}, c').
    pub fn with_cost(&self, p: usize, cost: Money) -> Self {
        let mut costs = self.costs.clone();
        costs[p] = cost;
        Self { costs }
    }

    pub fn scaled(&self, factor: &Money) -> Self {
        Self { costs: self.costs.iter().map(|c| c * factor).collect() }
    }

    pub fn into_costs(self) -> Vec<Money> {
        self.costs
    }
}

/// (P, V, B, cost, ≻): the input of every rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbInstance {
    pub approvals: Arc<ApprovalProfile>,
    pub budget: Money,
    pub costs: Vec<Money>,
    pub order: TieBreakOrder,
}

impl PbInstance {
    pub fn new(
        approvals: Arc<ApprovalProfile>,
        budget: Money,
        costs: Vec<Money>,
        order: TieBreakOrder,
    ) -> Result<Self, ModelError> {
        let m = approvals.num_projects();
        if !budget.is_positive() {
            return Err(ModelError::Budget);
        }
        if costs.len() != m {
            return Err(ModelError::Length { expected: m, found: costs.len() });
        }
        if order.len() != m {
            return Err(ModelError::NotPermutation);
        }
        if let Some(p) = costs.iter().position(Signed::is_negative) {
            return Err(ModelError::Negative(approvals.project_id(p).to_string()));
        }
        Ok(Self { approvals, budget, costs, order })
    }

    pub fn election(&self) -> Election<'_> {
        Election { approvals: &self.approvals, budget: &self.budget, costs: &self.costs, order: &self.order }
    }

    pub fn num_projects(&self) -> usize {
        self.approvals.num_projects()
    }
}

/// Borrowed view of an instance; what the rules actually consume.
#[derive(Debug, Clone, Copy)]
pub struct Election<'a> {
    pub approvals: &'a ApprovalProfile,
    pub budget: &'a Money,
    pub costs: &'a [Money],
    pub order: &'a TieBreakOrder,
}

/// (P, V, B, d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PbGame {
    pub approvals: Arc<ApprovalProfile>,
    pub budget: Money,
    pub delivery: Vec<Money>,
}

impl PbGame {
    pub fn new(approvals: Arc<ApprovalProfile>, budget: Money, delivery: Vec<Money>) -> Result<Self, ModelError> {
        let m = approvals.num_projects();
        if !budget.is_positive() {
            return Err(ModelError::Budget);
        }
        if delivery.len() != m {
            return Err(ModelError::Length { expected: m, found: delivery.len() });
        }
        for (p, d) in delivery.iter().enumerate() {
            if d.is_negative() {
                return Err(ModelError::Negative(approvals.project_id(p).to_string()));
            }
            if *d > budget {
                return Err(ModelError::DeliveryAboveBudget(approvals.project_id(p).to_string()));
            }
        }
        Ok(Self { approvals, budget, delivery })
    }

    /// Game with d ≡ 0.
    pub fn zero_delivery(approvals: Arc<ApprovalProfile>, budget: Money) -> Result<Self, ModelError> {
        let m = approvals.num_projects();
        Self::new(approvals, budget, vec![Money::zero(); m])
    }

    pub fn num_projects(&self) -> usize {
        self.approvals.num_projects()
    }

    pub fn has_zero_delivery(&self) -> bool {
        self.delivery.iter().all(Zero::is_zero)
    }

    pub fn instance(&self, profile: &StrategyProfile, order: &TieBreakOrder) -> Result<PbInstance, ModelError> {
        PbInstance::new(self.approvals.clone(), self.budget.clone(), profile.costs().to_vec(), order.clone())
    }

    pub fn election<'a>(&'a self, costs: &'a [Money], order: &'a TieBreakOrder) -> Election<'a> {
        Election { approvals: &self.approvals, budget: &self.budget, costs, order }
    }

    /// Same game with budget and deliveries multiplied by `factor` > 0.
    pub fn scaled(&self, factor: &Money) -> Self {
        Self {
            approvals: self.approvals.clone(),
            budget: &self.budget * factor,
            delivery: self.delivery.iter().map(|d| d * factor).collect(),
        }
    }
}

/// What a rule returns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    /// Funded projects in selection order.
    pub funded: Vec<usize>,
    /// Projects dropped without funding (Phragmén and MES only).
    pub removed: Vec<usize>,
    /// Affordability coefficients of the MES selections, aligned with the
    /// first `alphas.len()` entries of `funded`.
    pub alphas: Vec<Money>,
    /// Voter accounts; `None` for the greedy rules.
    pub accounts: Option<Accounts>,
}

impl Outcome {
    pub fn is_funded(&self, p: usize) -> bool {
        self.funded.contains(&p)
    }

    pub fn funded_mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &p in &self.funded {
            mask[p] = true;
        }
        mask
    }

    pub fn spent(&self, costs: &[Money]) -> Money {
        self.funded.iter().map(|&p| &costs[p]).sum()
    }

    pub fn payment(&self, voter: usize, project: usize) -> Money {
        self.accounts.as_ref().map_or_else(Money::zero, |a| a.payment(voter, project))
    }

    pub fn final_balance(&self, voter: usize) -> Money {
        self.accounts.as_ref().map_or_else(Money::zero, |a| a.balance(voter))
    }

    /// Σ_i payment(i, p).
    pub fn collected(&self, project: usize) -> Money {
        self.accounts.as_ref().map_or_else(Money::zero, |a| a.collected(project))
    }
}

/// Voters with identical ballots and balances share one account entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accounts {
    pub voter_account: Vec<usize>,
    pub entries: Vec<Account>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Account {
    pub voters: Vec<usize>,
    pub balance: Money,
    /// (project, amount paid by each member).
    pub payments: Vec<(usize, Money)>,
}

impl Accounts {
    pub fn balance(&self, voter: usize) -> Money {
        self.entries[self.voter_account[voter]].balance.clone()
    }

    pub fn payment(&self, voter: usize, project: usize) -> Money {
        self.entries[self.voter_account[voter]]
            .payments
            .iter()
            .filter(|(p, _)| *p == project)
            .map(|(_, a)| a)
            .sum()
    }

    pub fn collected(&self, project: usize) -> Money {
        let mut total = Money::zero();
        for e in &self.entries {
            for (p, a) in &e.payments {
                if *p == project {
                    total += a * Money::from_integer(e.voters.len().into());
                }
            }
        }
        total
    }

    pub fn balances(&self) -> Vec<Money> {
        (0..self.voter_account.len()).map(|v| self.balance(v)).collect()
    }
}

/// u_p: c(p) − d(p) when funded, otherwise 0.
pub fn payoff(game: &PbGame, profile: &StrategyProfile, funded: &[usize], p: usize) -> Result<Money, ModelError> {
    if p >= game.num_projects() {
        return Err(ModelError::ProjectIndex(p));
    }
    Ok(if funded.contains(&p) { profile.cost(p) - &game.delivery[p] } else { Money::zero() })
}

/// ap(p) = B·|A(p)| / Σ|A|.
pub fn approval_proportional(game: &PbGame) -> StrategyProfile {
    let a = &game.approvals;
    let total = Money::from_integer(a.total_score().into());
    let unit = &game.budget / total;
    StrategyProfile {
        costs: (0..a.num_projects()).map(|p| &unit * Money::from_integer(a.score(p).into())).collect(),
    }
}

/// Canonical A/D order: zero delivery first, then |A|/d descending, then
/// |A| descending, then identifier.
pub fn ad_order(game: &PbGame) -> TieBreakOrder {
    let a = &game.approvals;
    let mut ps: Vec<usize> = (0..a.num_projects()).collect();
    ps.sort_by(|&p, &q| {
        let (dp, dq) = (&game.delivery[p], &game.delivery[q]);
        let by_ratio = match (dp.is_zero(), dq.is_zero()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            (false, false) => {
                let lhs = dq * Money::from_integer(a.score(p).into());
                let rhs = dp * Money::from_integer(a.score(q).into());
                rhs.cmp(&lhs)
            }
        };
        by_ratio
            .then(a.score(q).cmp(&a.score(p)))
            .then_with(|| a.project_id(p).cmp(a.project_id(q)))
    });
    TieBreakOrder::new(ps).expect("sorted indices form a permutation")
}

/// First pair (p, q) with q ranked above p although the A/D property
/// requires p ≻ q.
pub fn ad_violation(game: &PbGame, order: &TieBreakOrder) -> Option<(usize, usize)> {
    let a = &game.approvals;
    let m = a.num_projects();
    for p in 0..m {
        for q in 0..m {
            if p == q || !order.prefers(q, p) {
                continue;
            }
            let (dp, dq) = (&game.delivery[p], &game.delivery[q]);
            let must = match (dp.is_zero(), dq.is_zero()) {
                (true, false) => true,
                (false, false) => {
                    dq * Money::from_integer(a.score(p).into()) > dp * Money::from_integer(a.score(q).into())
                }
                _ => false,
            };
            if must {
                return Some((p, q));
            }
        }
    }
    None
}

pub fn is_ad_order(game: &PbGame, order: &TieBreakOrder) -> bool {
    ad_violation(game, order).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::money::int;

    fn g(ballots: &[&[&str]], projects: &[&str]) -> Arc<ApprovalProfile> {
        Arc::new(
            ApprovalProfile::new(
                projects.iter().copied(),
                ballots
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (format!("v{}", i + 1), b.iter().map(|s| s.to_string()).collect())),
            )
            .unwrap(),
        )
    }

    #[test]
    fn rejects_bad_profiles() {
        let err = ApprovalProfile::new(["p1", "p2"], [("v1", vec!["p1".to_string()])]).unwrap_err();
        assert_eq!(err, ModelError::Unapproved("p2".into()));
        let err = ApprovalProfile::new(["p1"], [("v1", vec![])]).unwrap_err();
        assert_eq!(err, ModelError::EmptyBallot("v1".into()));
        let err = ApprovalProfile::new(["p1"], [("v1", vec!["x".to_string()])]).unwrap_err();
        assert_eq!(err, ModelError::UnknownProject("x".into()));
    }

    #[test]
    fn groups_identical_ballots() {
        let a = g(&[&["p1"], &["p1"], &["p2", "p1"], &["p1", "p2"]], &["p1", "p2"]);
        assert_eq!(a.groups().len(), 2);
        assert_eq!(a.groups()[1].members, vec![2, 3]);
        assert_eq!(a.score(0), 4);
    }

    #[test]
    fn payoff_branches() {
        let a = g(&[&["p1"], &["p2"]], &["p1", "p2"]);
        let game = PbGame::new(a, int(10), vec![int(0), int(6)]).unwrap();
        let c = StrategyProfile::from_ints(&[6, 5]);
        assert_eq!(payoff(&game, &c, &[1], 1).unwrap(), int(-1));
        assert_eq!(payoff(&game, &c, &[1], 0).unwrap(), int(0));
        assert!(payoff(&game, &c, &[1], 7).is_err());
    }

    #[test]
    fn ad_order_refinement() {
        let a = g(&[&["p1", "p2"], &["p2"]], &["p1", "p2"]);
        let game = PbGame::new(a, int(10), vec![int(2), int(4)]).unwrap();
        assert_eq!(ad_order(&game).ranking(), &[1, 0]);
        assert!(is_ad_order(&game, &TieBreakOrder::identity(2)));
    }

    #[test]
    fn ad_validation_catches_zero_delivery_ranked_low() {
        let a = g(&[&["p1"], &["p2"]], &["p1", "p2"]);
        let game = PbGame::new(a, int(10), vec![int(0), int(6)]).unwrap();
        assert_eq!(ad_order(&game).ranking(), &[0, 1]);
        let bad = TieBreakOrder::new(vec![1, 0]).unwrap();
        assert_eq!(ad_violation(&game, &bad), Some((0, 1)));
    }
}
