//! Best responses, winning/losing margins, equilibrium verification and a
//! brute-force grid oracle.
//!
//! A project's best response is the supremum of the costs at which it is
//! still funded when everybody else keeps their report. Bisection cannot name
//! that supremum, so it is reported as a bracket whose lower end is always a
//! cost at which the project really is funded.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{approval_proportional, PbGame, StrategyProfile, TieBreakOrder};
use crate::money::{self, Money};
use crate::rules::{evaluate, RuleId};

/// Probes used to certify the threshold structure of `funded_at`.
pub const SCAN_POINTS: i64 = 32;

/// Largest grid `grid_ne_search` will enumerate.
pub const GRID_LIMIT: u64 = 10_000_000;

/// Default bracket width: B·10⁻⁹.
pub fn default_tolerance(game: &PbGame) -> Money {
    &game.budget * money::ratio(1, 1_000_000_000)
}

/// Whether `p` is funded when it reports `cost` and everyone else keeps
/// their entry of `profile`.
pub fn funded_at(
    game: &PbGame,
    rule: RuleId,
    profile: &StrategyProfile,
    order: &TieBreakOrder,
    p: usize,
    cost: &Money,
) -> bool {
    let mut costs = profile.costs().to_vec();
    costs[p] = cost.clone();
    evaluate(game.election(&costs, order), rule).is_funded(p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    /// Highest probed cost at which the project is funded (0 if never).
    pub lower: Money,
    /// Lowest probed cost above `lower` at which it is not funded, or B when
    /// it is funded even at B.
    pub upper: Money,
    pub width: Money,
    pub monotone_certified: bool,
    pub never_funded: bool,
    /// lower − d(p), or 0 when never funded.
    pub payoff_at_lower: Money,
}

pub fn best_response(
    game: &PbGame,
    rule: RuleId,
    profile: &StrategyProfile,
    order: &TieBreakOrder,
    p: usize,
    tolerance: &Money,
) -> BestResponse {
    assert!(tolerance.is_positive(), "tolerance must be positive");
    let funded = |c: &Money| funded_at(game, rule, profile, order, p, c);
    let b = &game.budget;
    let zero = Money::zero();
    let (lower, upper, never_funded) = if !funded(&zero) {
        (zero.clone(), zero.clone(), true)
    } else if funded(b) {
        (b.clone(), b.clone(), false)
    } else {
        let (mut lo, mut hi) = (zero.clone(), b.clone());
        let c = profile.cost(p);
        if c.is_positive() && c < b {
            if funded(c) {
                lo = c.clone();
            } else {
                hi = c.clone();
            }
        }
        let two = money::int(2);
        while &hi - &lo > *tolerance {
            let mid = (&lo + &hi) / &two;
            if funded(&mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi, false)
    };
    let mut monotone_certified = true;
    for k in 1..=SCAN_POINTS {
        let x = b * money::ratio(k, SCAN_POINTS);
        let f = funded(&x);
        if (f && x > upper) || (!f && x <= lower && !never_funded) {
            monotone_certified = false;
            break;
        }
    }
    let payoff_at_lower = if never_funded { Money::zero() } else { &lower - &game.delivery[p] };
    BestResponse { width: &upper - &lower, lower, upper, monotone_certified, never_funded, payoff_at_lower }
}

/// BasicAV's exact best response: B minus what is selected before `p`'s
/// slot. The slot depends only on approval scores and ≻.
pub fn exact_threshold_basic_av(game: &PbGame, profile: &StrategyProfile, order: &TieBreakOrder, p: usize) -> Money {
    let a = &game.approvals;
    let key = |q: usize| (std::cmp::Reverse(a.score(q)), order.rank(q));
    let mut before: Vec<usize> = (0..a.num_projects()).filter(|&q| key(q) < key(p)).collect();
    before.sort_by_key(|&q| key(q));
    let mut spent = Money::zero();
    for q in before {
        let next = &spent + profile.cost(q);
        if next <= game.budget {
            spent = next;
        }
    }
    &game.budget - spent
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginKind {
    Winning,
    Losing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Margin {
    pub project: usize,
    pub kind: MarginKind,
    /// br − cost for winners, cost − br for losers, with br taken as the
    /// funded end of the bracket.
    pub value: Money,
    pub response: BestResponse,
}

/// Margins of every project, listed by approval score descending.
pub fn margins(
    game: &PbGame,
    rule: RuleId,
    profile: &StrategyProfile,
    order: &TieBreakOrder,
    tolerance: &Money,
) -> Vec<Margin> {
    let outcome = evaluate(game.election(profile.costs(), order), rule);
    game.approvals
        .by_score()
        .into_par_iter()
        .map(|p| {
            let response = best_response(game, rule, profile, order, p, tolerance);
            let cost = profile.cost(p);
            let (kind, value) = if outcome.is_funded(p) {
                (MarginKind::Winning, &response.lower - cost)
            } else {
                (MarginKind::Losing, cost - &response.lower)
            };
            Margin { project: p, kind, value, response }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub project: usize,
    /// A cost at which the project is funded and better off.
    pub cost: Money,
    pub gain: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NeReport {
    pub verified: bool,
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

/// Looks for a profitable unilateral deviation for every project.
///
/// Besides the bisected best response, exact candidate costs are probed:
/// 0, d(p), ap(p), the lower bracket end, and every other project's cost
/// shifted by −tolerance, 0 and +tolerance. A reported violation is always
/// a real deviation (the rule was run at that cost); a deviation whose gain
/// lies within the bisection width of the threshold can be missed.
pub fn verify_ne(
    game: &PbGame,
    rule: RuleId,
    profile: &StrategyProfile,
    order: &TieBreakOrder,
    tolerance: &Money,
) -> NeReport {
    let m = game.num_projects();
    let outcome = evaluate(game.election(profile.costs(), order), rule);
    let ap = approval_proportional(game);
    let width = if tolerance.is_positive() && *tolerance < default_tolerance(game) {
        tolerance.clone()
    } else {
        default_tolerance(game)
    };
    let per_project: Vec<(Option<Violation>, Option<String>)> = (0..m)
        .into_par_iter()
        .map(|p| {
            let d = &game.delivery[p];
            let current = if outcome.is_funded(p) { profile.cost(p) - d } else { Money::zero() };
            let br = best_response(game, rule, profile, order, p, &width);
            let warning = (!br.monotone_certified).then(|| {
                format!("funded-in-own-cost structure of {} not certified", game.approvals.project_id(p))
            });
            let mut candidates = vec![Money::zero(), d.clone(), ap.cost(p).clone()];
            if !br.never_funded {
                candidates.push(br.lower.clone());
            }
            for q in (0..m).filter(|&q| q != p) {
                let c = profile.cost(q);
                candidates.extend([c - tolerance, c.clone(), c + tolerance]);
            }
            candidates.retain(|x| !x.is_negative() && *x <= game.budget && x - d - &current > *tolerance);
            candidates.sort();
            candidates.dedup();
            // Highest gain first: the first funded candidate is the best one.
            let violation = candidates
                .into_iter()
                .rev()
                .find(|x| funded_at(game, rule, profile, order, p, x))
                .map(|x| Violation { project: p, gain: &x - d - &current, cost: x });
            (violation, warning)
        })
        .collect();
    let mut report = NeReport::default();
    for (v, w) in per_project {
        report.violations.extend(v);
        report.warnings.extend(w);
    }
    report.verified = report.violations.is_empty();
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid has {0} profiles, above the limit of {GRID_LIMIT}")]
    TooLarge(u128),
    #[error("grid step must be positive and divide the cap")]
    Step,
    #[error("grid oracle supports at most 63 projects")]
    TooManyProjects,
    #[error("expected one axis per project")]
    Axes,
}

/// {0, step, 2·step, …, cap}.
pub fn grid_axis(step: &Money, cap: &Money) -> Result<Vec<Money>, GridError> {
    if !step.is_positive() || cap.is_negative() || !(cap / step).is_integer() {
        return Err(GridError::Step);
    }
    let n = (cap / step).to_integer();
    let n: u64 = n.try_into().map_err(|_| GridError::TooLarge(u128::MAX))?;
    if n >= GRID_LIMIT {
        return Err(GridError::TooLarge(n as u128 + 1));
    }
    Ok((0..=n).map(|k| step * Money::from_integer(k.into())).collect())
}

/// Profiles on {0, step, …, cap}^P from which no project has a profitable
/// deviation to another grid value.
pub fn grid_ne_search(
    game: &PbGame,
    rule: RuleId,
    order: &TieBreakOrder,
    step: &Money,
    cap: &Money,
) -> Result<Vec<StrategyProfile>, GridError> {
    let axis = grid_axis(step, cap)?;
    grid_ne_search_axes(game, rule, order, &vec![axis; game.num_projects()])
}

/// Same as [`grid_ne_search`] with an explicit value list per project;
/// deviations range over the project's own list.
pub fn grid_ne_search_axes(
    game: &PbGame,
    rule: RuleId,
    order: &TieBreakOrder,
    axes: &[Vec<Money>],
) -> Result<Vec<StrategyProfile>, GridError> {
    grid_ne_search_within(game, rule, order, axes, axes)
}

/// Grid search over the candidate profiles `candidates[0] × … ×
/// candidates[P-1]` only, each list a subset of the matching axis.
/// Deviations still range over the full axes, so a reported profile is a
/// genuine grid equilibrium.
pub fn grid_ne_search_within(
    game: &PbGame,
    rule: RuleId,
    order: &TieBreakOrder,
    axes: &[Vec<Money>],
    candidates: &[Vec<Money>],
) -> Result<Vec<StrategyProfile>, GridError> {
    let m = game.num_projects();
    if axes.len() != m || axes.iter().any(Vec::is_empty) || candidates.len() != m {
        return Err(GridError::Axes);
    }
    let positions: Vec<Vec<usize>> = candidates
        .iter()
        .zip(axes)
        .map(|(c, a)| c.iter().map(|v| a.iter().position(|x| x == v)).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()
        .ok_or(GridError::Axes)?;
    if m > 63 {
        return Err(GridError::TooManyProjects);
    }
    let total = axes.iter().try_fold(1u128, |acc, a| {
        let next = acc * a.len() as u128;
        (next <= GRID_LIMIT as u128).then_some(next).ok_or(next)
    });
    let total = total.map_err(GridError::TooLarge)? as usize;
    let mut strides = vec![1usize; m];
    for p in 1..m {
        strides[p] = strides[p - 1] * axes[p - 1].len();
    }
    let digits = |idx: usize| -> Vec<usize> { (0..m).map(|p| (idx / strides[p]) % axes[p].len()).collect() };
    let costs_at = |idx: usize| -> Vec<Money> {
        digits(idx).iter().enumerate().map(|(p, &j)| axes[p][j].clone()).collect()
    };

    // Funded sets are computed on first use; u64::MAX marks "not yet known".
    let table: Vec<AtomicU64> = (0..total).map(|_| AtomicU64::new(u64::MAX)).collect();
    let funded = |idx: usize| -> u64 {
        let known = table[idx].load(AtomicOrdering::Relaxed);
        if known != u64::MAX {
            return known;
        }
        let outcome = evaluate(game.election(&costs_at(idx), order), rule);
        let mask = outcome.funded.iter().fold(0u64, |mask, &p| mask | (1 << p));
        table[idx].store(mask, AtomicOrdering::Relaxed);
        mask
    };

    // Payoffs as ranks so the deviation scan compares integers.
    let keys: Vec<(Vec<u32>, u32)> = (0..m)
        .map(|p| {
            let d = &game.delivery[p];
            let mut values: Vec<Money> = axes[p].iter().map(|v| v - d).collect();
            values.push(Money::zero());
            values.sort();
            values.dedup();
            let rank = |x: &Money| values.binary_search(x).expect("present") as u32;
            (axes[p].iter().map(|v| rank(&(v - d))).collect(), rank(&Money::zero()))
        })
        .collect();
    let payoff = |p: usize, j: usize, mask: u64| if mask >> p & 1 == 1 { keys[p].0[j] } else { keys[p].1 };

    let count: usize = positions.iter().map(Vec::len).product();
    let survivors: Vec<usize> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rest = k;
            positions.iter().zip(&strides).fold(0, |idx, (pos, stride)| {
                let j = pos[rest % pos.len()];
                rest /= pos.len();
                idx + j * stride
            })
        })
        .filter(|&idx| {
            let ds = digits(idx);
            let own = funded(idx);
            (0..m).all(|p| {
                let here = payoff(p, ds[p], own);
                let base = idx - ds[p] * strides[p];
                (0..axes[p].len()).all(|j| j == ds[p] || payoff(p, j, funded(base + j * strides[p])) <= here)
            })
        })
        .collect();
    Ok(survivors
        .into_iter()
        .map(|idx| StrategyProfile::new(costs_at(idx)).expect("grid values are nonnegative"))
        .collect())
}
