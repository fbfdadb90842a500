//! Seeded random games for property tests and benchmarks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{ApprovalProfile, PbGame, PbInstance, StrategyProfile, TieBreakOrder};
use crate::money::{self, Money};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deliveries {
    Zero,
    /// Each d(p) is B·k/20 for a random k, zero with probability 1/3.
    Random,
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn budget<R: Rng>(rng: &mut R) -> Money {
    if rng.random_bool(0.25) {
        money::ratio(rng.random_range(1..=400), rng.random_range(1..=12))
    } else {
        money::int(rng.random_range(1..=120))
    }
}

fn deliveries<R: Rng>(rng: &mut R, m: usize, b: &Money, mode: Deliveries) -> Vec<Money> {
    (0..m)
        .map(|_| match mode {
            Deliveries::Random if !rng.random_bool(1.0 / 3.0) => b * money::ratio(rng.random_range(0..=20), 20),
            _ => Money::from_integer(0.into()),
        })
        .collect()
}

fn game(projects: usize, ballots: Vec<Vec<usize>>, b: Money, d: Vec<Money>) -> PbGame {
    let n = ballots.len();
    let a = ApprovalProfile::from_indices(ids("p", projects), ids("v", n), ballots).expect("generated profile is valid");
    PbGame::new(Arc::new(a), b, d).expect("generated game is valid")
}

/// Unrestricted ballots, 1..=max_projects projects, 1..=max_voters voters.
pub fn random_game<R: Rng>(rng: &mut R, max_projects: usize, max_voters: usize, mode: Deliveries) -> PbGame {
    let m = rng.random_range(1..=max_projects);
    let n = rng.random_range(1..=max_voters);
    let density = rng.random_range(0.15..0.7);
    let mut ballots: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut b: Vec<usize> = (0..m).filter(|_| rng.random_bool(density)).collect();
            if b.is_empty() {
                b.push(rng.random_range(0..m));
            }
            b
        })
        .collect();
    for p in 0..m {
        if !ballots.iter().any(|b| b.contains(&p)) {
            let v = rng.random_range(0..n);
            ballots[v].push(p);
        }
    }
    let b = budget(rng);
    let d = deliveries(rng, m, &b, mode);
    game(m, ballots, b, d)
}

/// Singleton ballots; every project has at least one voter.
pub fn random_plurality_game<R: Rng>(rng: &mut R, max_projects: usize, max_voters: usize, mode: Deliveries) -> PbGame {
    let m = rng.random_range(1..=max_projects);
    let n = rng.random_range(m..=max_voters.max(m));
    let mut ballots: Vec<Vec<usize>> = (0..m).map(|p| vec![p]).collect();
    ballots.extend((m..n).map(|_| vec![rng.random_range(0..m)]));
    ballots.shuffle(rng);
    let b = budget(rng);
    let d = deliveries(rng, m, &b, mode);
    game(m, ballots, b, d)
}

/// Projects split into parties; each party's voters approve exactly it.
pub fn random_party_list_game<R: Rng>(rng: &mut R, max_projects: usize, max_voters: usize, mode: Deliveries) -> PbGame {
    let m = rng.random_range(1..=max_projects);
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    let mut parties: Vec<Vec<usize>> = Vec::new();
    for p in perm {
        if parties.is_empty() || rng.random_bool(0.4) {
            parties.push(vec![p]);
        } else {
            let k = rng.random_range(0..parties.len());
            parties[k].push(p);
        }
    }
    let k = parties.len();
    let n = rng.random_range(k..=max_voters.max(k));
    let mut ballots: Vec<Vec<usize>> = parties.clone();
    ballots.extend((k..n).map(|_| parties[rng.random_range(0..k)].clone()));
    ballots.shuffle(rng);
    let b = budget(rng);
    let d = deliveries(rng, m, &b, mode);
    game(m, ballots, b, d)
}

/// Uniformly random permutation of the projects.
pub fn random_order<R: Rng>(rng: &mut R, m: usize) -> TieBreakOrder {
    let mut ranking: Vec<usize> = (0..m).collect();
    ranking.shuffle(rng);
    TieBreakOrder::new(ranking).expect("shuffled permutation")
}

/// Random costs on the grid B·k/24, k ∈ 0..=24.
pub fn random_profile<R: Rng>(rng: &mut R, game: &PbGame) -> StrategyProfile {
    let costs = (0..game.num_projects()).map(|_| &game.budget * money::ratio(rng.random_range(0..=24), 24)).collect();
    StrategyProfile::new(costs).expect("nonnegative")
}

/// A municipal-scale instance: `projects` projects whose costs add up to
/// roughly 2.5·budget, and `voters` voters whose ballots come from a pool of
/// `archetypes` ballots of 4–12 projects.
pub fn synthetic_instance<R: Rng>(
    rng: &mut R,
    projects: usize,
    voters: usize,
    budget: i64,
    archetypes: usize,
) -> PbInstance {
    assert!(projects > 0 && voters >= archetypes && archetypes > 0);
    let popularity: Vec<f64> = (0..projects).map(|_| rng.random_range(0.05..1.0f64).powi(2)).collect();
    let mut pool: Vec<Vec<usize>> = (0..archetypes)
        .map(|_| {
            let size = rng.random_range(4..=12.min(projects.max(4))).min(projects);
            let mut chosen = Vec::new();
            while chosen.len() < size {
                let total: f64 = (0..projects).filter(|p| !chosen.contains(p)).map(|p| popularity[p]).sum();
                let mut r = rng.random_range(0.0..total);
                for p in (0..projects).filter(|p| !chosen.contains(p)) {
                    r -= popularity[p];
                    if r <= 0.0 {
                        chosen.push(p);
                        break;
                    }
                }
                if r > 0.0 {
                    if let Some(p) = (0..projects).rev().find(|p| !chosen.contains(p)) {
                        chosen.push(p);
                    }
                }
            }
            chosen
        })
        .collect();
    for p in 0..projects {
        if !pool.iter().any(|b| b.contains(&p)) {
            let k = rng.random_range(0..archetypes);
            pool[k].push(p);
        }
    }
    let weights: Vec<f64> = (0..archetypes).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut ballots: Vec<Vec<usize>> = pool.clone();
    for _ in archetypes..voters {
        let mut r = rng.random_range(0.0..total);
        let mut k = archetypes - 1;
        for (i, w) in weights.iter().enumerate() {
            r -= w;
            if r <= 0.0 {
                k = i;
                break;
            }
        }
        ballots.push(pool[k].clone());
    }
    ballots.shuffle(rng);
    let raw: Vec<f64> = (0..projects).map(|_| rng.random_range(0.2..1.0)).collect();
    let scale = 2.5 * budget as f64 / raw.iter().sum::<f64>();
    let costs = raw
        .iter()
        .map(|r| money::int((((r * scale) / 100.0).round() as i64).clamp(1, budget / 100) * 100))
        .collect();
    let a = ApprovalProfile::from_indices(ids("", projects), ids("", voters), ballots).expect("valid synthetic profile");
    let a = Arc::new(a);
    let m = a.num_projects();
    let order = TieBreakOrder::new(a.by_score()).expect("permutation");
    debug_assert_eq!(order.len(), m);
    PbInstance::new(a, money::int(budget), costs, order).expect("valid synthetic instance")
}
