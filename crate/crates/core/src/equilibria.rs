//! Constructive Nash equilibria for the rule/ballot combinations where one
//! is known to exist.
//!
//! Every construction returns the profile together with the order it was
//! built for and the funded set it predicts. Projects left unfunded report
//! their delivery cost.

use num_traits::Zero;
use thiserror::Error;

use crate::ballots::classify_ballots;
use crate::model::{ad_violation, approval_proportional, PbGame, StrategyProfile, TieBreakOrder};
use crate::money::Money;
use crate::rules::RuleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guarantee {
    /// Equilibrium for every tie-break order.
    AllOrders,
    /// Equilibrium for the order it was constructed with.
    ThisAdOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeConstruction {
    pub profile: StrategyProfile,
    pub order: TieBreakOrder,
    pub rule: RuleId,
    pub guarantee: Guarantee,
    /// Funded projects, in selection order where the rule defines one.
    pub predicted_funded: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotApplicable {
    #[error("delivery cost of project #{0} exceeds its approval-proportional share")]
    DeliveryAboveShare(usize),
    #[error("ballots are not plurality")]
    NotPlurality,
    #[error("ballots are not party-list")]
    NotPartyList,
    #[error("delivery costs are not all zero")]
    NonzeroDelivery,
    #[error("order is not A/D: project #{0} must be ranked above project #{1}")]
    OrderNotAd(usize, usize),
}

fn int(n: usize) -> Money {
    Money::from_integer(n.into())
}

/// The most approved project (≻ breaks ties) reports B, the rest report d.
pub fn ne_basic_av(game: &PbGame, order: &TieBreakOrder) -> NeConstruction {
    let a = &game.approvals;
    let top = (0..a.num_projects())
        .min_by_key(|&p| (std::cmp::Reverse(a.score(p)), order.rank(p)))
        .expect("at least one project");
    let mut costs = game.delivery.clone();
    costs[top] = game.budget.clone();
    // Zero-cost projects still fit after the top project spent everything.
    let mut predicted_funded = vec![top];
    let mut rest: Vec<usize> = (0..a.num_projects()).filter(|&p| p != top && costs[p].is_zero()).collect();
    rest.sort_by_key(|&p| (std::cmp::Reverse(a.score(p)), order.rank(p)));
    predicted_funded.extend(rest);
    NeConstruction {
        profile: StrategyProfile::new(costs).expect("nonnegative"),
        order: order.clone(),
        rule: RuleId::BasicAV,
        guarantee: Guarantee::AllOrders,
        predicted_funded,
    }
}

/// The approval-proportional profile when every d(p) ≤ ap(p).
pub fn ne_avcost_ap(game: &PbGame, order: &TieBreakOrder) -> Result<NeConstruction, NotApplicable> {
    let ap = approval_proportional(game);
    if let Some(p) = (0..game.num_projects()).find(|&p| game.delivery[p] > *ap.cost(p)) {
        return Err(NotApplicable::DeliveryAboveShare(p));
    }
    Ok(NeConstruction {
        profile: ap,
        order: order.clone(),
        rule: RuleId::AvOverCost,
        guarantee: Guarantee::AllOrders,
        predicted_funded: (0..game.num_projects()).collect(),
    })
}

/// AV/Cost equilibrium for an A/D order and arbitrary delivery costs.
///
/// Repeatedly takes the longest ≻-prefix of the prospective projects that
/// can be lifted to a common cost-per-approval level within the remaining
/// budget, lifts it as far as the next project's delivery ratio or the
/// budget allows, and retires that prefix together with the blocking
/// project.
pub fn ne_avcost_ad(game: &PbGame, order: &TieBreakOrder) -> Result<NeConstruction, NotApplicable> {
    if let Some((p, q)) = ad_violation(game, order) {
        return Err(NotApplicable::OrderNotAd(p, q));
    }
    let a = &game.approvals;
    let m = a.num_projects();
    let score = |p: usize| int(a.score(p));
    let level = |p: usize| &game.delivery[p] / score(p);
    let mut costs = game.delivery.clone();
    let mut budget = game.budget.clone();
    let mut prospective: Vec<usize> = order.ranking().to_vec();
    let mut raised = Vec::new();

    while !prospective.is_empty() {
        let n = prospective.len();
        // Largest k with level(p_k)·Σ_{i≤k}|A(p_i)| ≤ B*; levels are
        // nondecreasing along an A/D order so the test is monotone in k.
        let mut k = 0;
        let mut approvals = Money::zero();
        let mut prefix_approvals = Money::zero();
        for (x, &p) in prospective.iter().enumerate() {
            approvals += score(p);
            if level(p) * &approvals <= budget {
                k = x + 1;
                prefix_approvals = approvals.clone();
            } else {
                break;
            }
        }
        assert!(k >= 1, "the first prospective project always fits");
        let mut t = &budget / &prefix_approvals;
        if k < n {
            let next = level(prospective[k]);
            if next < t {
                t = next;
            }
        }
        for &p in &prospective[..k] {
            costs[p] = &t * score(p);
            budget -= &costs[p];
            raised.push(p);
        }
        let drop = if k < n { k + 1 } else { k };
        prospective.drain(..drop);
        prospective.retain(|&p| costs[p] <= budget);
    }
    debug_assert!(raised.len() <= m);
    Ok(NeConstruction {
        profile: StrategyProfile::new(costs).expect("nonnegative"),
        order: order.clone(),
        rule: RuleId::AvOverCost,
        guarantee: Guarantee::ThisAdOrder,
        predicted_funded: raised,
    })
}

/// Party-list ballots, d ≡ 0: c(p) = B·|A(p)| / (|V|·|party(p)|).
pub fn ne_phragmen_partylist_zero(game: &PbGame, order: &TieBreakOrder) -> Result<NeConstruction, NotApplicable> {
    let class = classify_ballots(&game.approvals);
    let parties = class.parties().ok_or(NotApplicable::NotPartyList)?;
    if !game.has_zero_delivery() {
        return Err(NotApplicable::NonzeroDelivery);
    }
    let a = &game.approvals;
    let voters = int(a.num_voters());
    let costs = (0..a.num_projects())
        .map(|p| &game.budget * int(a.score(p)) / (&voters * int(parties.party(p).len())))
        .collect();
    Ok(NeConstruction {
        profile: StrategyProfile::new(costs).expect("nonnegative"),
        order: order.clone(),
        rule: RuleId::Phragmen,
        guarantee: Guarantee::AllOrders,
        predicted_funded: (0..a.num_projects()).collect(),
    })
}

/// MES-Cost: repeatedly the project with the most still-unspent supporters
/// reports their whole remaining budget.
pub fn ne_mes_cost(game: &PbGame, order: &TieBreakOrder) -> NeConstruction {
    let a = &game.approvals;
    let m = a.num_projects();
    let share = &game.budget / int(a.num_voters());
    let mut active = vec![true; a.num_voters()];
    let mut open: Vec<usize> = order.ranking().to_vec();
    let mut costs = game.delivery.clone();
    let mut sequence = Vec::new();
    let live = |p: usize, active: &[bool]| a.supporters(p).iter().filter(|&&v| active[v]).count();

    while !open.is_empty() {
        open.retain(|&p| {
            let n = live(p, &active);
            n > 0 && &share * int(n) >= game.delivery[p]
        });
        // `open` is in ≻ order, so max_by_key must keep the first maximum.
        let Some(&best) = open.iter().rev().max_by_key(|&&p| live(p, &active)) else { break };
        costs[best] = &share * int(live(best, &active));
        for &v in a.supporters(best) {
            active[v] = false;
        }
        open.retain(|&p| p != best);
        sequence.push(best);
    }
    // Projects left at zero cost are funded first, at no charge.
    let mut predicted_funded: Vec<usize> = order.ranking().iter().copied().filter(|&p| costs[p].is_zero()).collect();
    predicted_funded.extend(sequence);
    debug_assert!(predicted_funded.len() <= m);
    NeConstruction {
        profile: StrategyProfile::new(costs).expect("nonnegative"),
        order: order.clone(),
        rule: RuleId::MesCost,
        guarantee: Guarantee::AllOrders,
        predicted_funded,
    }
}

/// MES-Apr, plurality ballots: each project reports its supporters' budget
/// if that covers its delivery cost.
pub fn ne_mes_apr_plurality(game: &PbGame, order: &TieBreakOrder) -> Result<NeConstruction, NotApplicable> {
    if !classify_ballots(&game.approvals).is_plurality() {
        return Err(NotApplicable::NotPlurality);
    }
    let a = &game.approvals;
    let share = &game.budget / int(a.num_voters());
    let mut costs = Vec::with_capacity(a.num_projects());
    let mut funded = Vec::new();
    for p in 0..a.num_projects() {
        let pot = &share * int(a.score(p));
        if game.delivery[p] <= pot {
            costs.push(pot);
            funded.push(p);
        } else {
            costs.push(game.delivery[p].clone());
        }
    }
    Ok(NeConstruction {
        profile: StrategyProfile::new(costs).expect("nonnegative"),
        order: order.clone(),
        rule: RuleId::MesApr,
        guarantee: Guarantee::AllOrders,
        predicted_funded: funded,
    })
}

/// MES-Apr, party-list ballots, A/D order: inside each party, members whose
/// delivery cost cannot be covered by an equal split are peeled off from
/// the ≻-last end; the rest split the party's pot, capped by the delivery
/// cost of the last peeled member.
pub fn ne_mes_apr_partylist(game: &PbGame, order: &TieBreakOrder) -> Result<NeConstruction, NotApplicable> {
    let class = classify_ballots(&game.approvals);
    let parties = class.parties().ok_or(NotApplicable::NotPartyList)?;
    if let Some((p, q)) = ad_violation(game, order) {
        return Err(NotApplicable::OrderNotAd(p, q));
    }
    let a = &game.approvals;
    let share = &game.budget / int(a.num_voters());
    let mut costs = game.delivery.clone();
    let mut funded = Vec::new();
    for (b, block) in parties.blocks().iter().enumerate() {
        let pot = &share * int(parties.supporters(a, b).len());
        let mut members = block.clone();
        members.sort_by_key(|&p| order.rank(p));
        let mut last_peeled = None;
        while let Some(&q) = members.last() {
            if int(members.len()) * &game.delivery[q] > pot {
                last_peeled = members.pop();
            } else {
                break;
            }
        }
        if members.is_empty() {
            continue;
        }
        let mut each = &pot / int(members.len());
        if let Some(q) = last_peeled {
            if game.delivery[q] < each {
                each = game.delivery[q].clone();
            }
        }
        for p in members {
            costs[p] = each.clone();
            funded.push(p);
        }
    }
    funded.sort_by_key(|&p| order.rank(p));
    Ok(NeConstruction {
        profile: StrategyProfile::new(costs).expect("nonnegative"),
        order: order.clone(),
        rule: RuleId::MesApr,
        guarantee: if game.has_zero_delivery() { Guarantee::AllOrders } else { Guarantee::ThisAdOrder },
        predicted_funded: funded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn example_two_prefix_and_blocker() {
        let g2 = gallery::g2();
        let ne = ne_avcost_ad(&g2.game, &g2.order).unwrap();
        assert_eq!(ne.profile, StrategyProfile::from_ints(&[6, 6]));
        assert_eq!(ne.predicted_funded, vec![0]);
        let flipped = TieBreakOrder::new(vec![1, 0]).unwrap();
        assert_eq!(ne_avcost_ad(&g2.game, &flipped), Err(NotApplicable::OrderNotAd(0, 1)));
    }

    #[test]
    fn mes_cost_on_g1() {
        let g1 = gallery::g1();
        let ne = ne_mes_cost(&g1.game, &g1.order);
        assert_eq!(ne.profile, StrategyProfile::from_ints(&[4, 6]));
        assert_eq!(ne.predicted_funded, vec![1, 0]);
    }

    #[test]
    fn basic_av_top_takes_budget() {
        let g1 = gallery::g1();
        let ne = ne_basic_av(&g1.game, &g1.order);
        assert_eq!(ne.profile, StrategyProfile::from_ints(&[0, 10]));
        assert_eq!(ne.predicted_funded, vec![1, 0]);
    }

    #[test]
    fn partylist_peeling_on_g4() {
        let g4 = gallery::g4();
        let order = TieBreakOrder::new(vec![1, 2, 0]).unwrap();
        let ne = ne_mes_apr_partylist(&g4.game, &order).unwrap();
        assert_eq!(ne.profile, StrategyProfile::from_ints(&[3, 3, 3]));
        assert_eq!(ne.predicted_funded, vec![1, 2]);
        assert_eq!(ne.guarantee, Guarantee::ThisAdOrder);
    }

    #[test]
    fn mes_apr_plurality_on_g2() {
        let g2 = gallery::g2();
        let ne = ne_mes_apr_plurality(&g2.game, &g2.order).unwrap();
        assert_eq!(ne.profile, StrategyProfile::from_ints(&[5, 6]));
        assert_eq!(ne.predicted_funded, vec![0]);
        assert_eq!(ne_avcost_ap(&g2.game, &g2.order), Err(NotApplicable::DeliveryAboveShare(1)));
    }
}
