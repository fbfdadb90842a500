//! Randomized cost dynamics.
//!
//! Each iteration one project is drawn uniformly. A project that was losing
//! lowers its cost by a random amount; a winning project raises it by a
//! random amount unless that makes it lose.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_traits::{Signed, Zero};

use crate::model::{Outcome, PbGame, StrategyProfile, TieBreakOrder};
use crate::money::{self, Money};
use crate::rules::{evaluate, RuleId};

pub const GENERATOR: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsConfig {
    pub iterations: u64,
    pub seed: u64,
    /// Moves are drawn uniformly from [0, cost·step_fraction].
    pub step_fraction: Money,
    pub record_every: u64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self { iterations: 10_000, seed: 0, step_fraction: money::ratio(1, 10), record_every: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MoveCounts {
    pub accepted_increases: u64,
    pub rejected_increases: u64,
    pub decreases: u64,
    /// Draws skipped because the project's cost was zero.
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub iteration: u64,
    pub profile: StrategyProfile,
    pub funded: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsTrace {
    pub rule: RuleId,
    pub generator: &'static str,
    pub config: DynamicsConfig,
    pub initial: StrategyProfile,
    pub initial_funded: Vec<usize>,
    pub snapshots: Vec<Snapshot>,
    pub final_profile: StrategyProfile,
    pub final_funded: Vec<usize>,
    pub moves: Vec<MoveCounts>,
}

/// Costs are kept as dyadic rationals with 64 significant bits: the exact
/// draw is applied and the result rounded toward the previous cost, so a
/// move never exceeds the drawn amount and no cost reaches zero.
pub fn run_dynamics(
    game: &PbGame,
    rule: RuleId,
    start: &StrategyProfile,
    config: &DynamicsConfig,
    order: &TieBreakOrder,
) -> DynamicsTrace {
    assert!(
        config.step_fraction.is_positive() && config.step_fraction <= money::int(1),
        "step fraction must lie in (0, 1]"
    );
    let m = game.num_projects();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let two64 = Money::from_integer(num_bigint::BigInt::from(1u8) << 64);
    let run = |costs: &[Money]| -> Outcome { evaluate(game.election(costs, order), rule) };

    let mut costs = start.costs().to_vec();
    let mut outcome = run(&costs);
    let initial_funded = outcome.funded.clone();
    let mut moves = vec![MoveCounts::default(); m];
    let mut snapshots = Vec::new();

    for it in 1..=config.iterations {
        let p = rng.random_range(0..m);
        let u = Money::from_integer(rng.next_u64().into());
        if costs[p].is_zero() {
            moves[p].skipped += 1;
        } else {
            let x = &costs[p] * &config.step_fraction * u / &two64;
            if !outcome.is_funded(p) {
                if x.is_positive() {
                    let lowered = money::round_significand(&(&costs[p] - &x), true);
                    if lowered < costs[p] {
                        costs[p] = lowered;
                        outcome = run(&costs);
                    }
                }
                moves[p].decreases += 1;
            } else {
                let raised = money::round_significand(&(&costs[p] + &x), false).max(costs[p].clone());
                let old = std::mem::replace(&mut costs[p], raised);
                let tentative = run(&costs);
                if tentative.is_funded(p) {
                    outcome = tentative;
                    moves[p].accepted_increases += 1;
                } else {
                    costs[p] = old;
                    moves[p].rejected_increases += 1;
                }
            }
        }
        if config.record_every > 0 && it % config.record_every == 0 {
            snapshots.push(Snapshot {
                iteration: it,
                profile: StrategyProfile::new(costs.clone()).expect("costs stay positive"),
                funded: outcome.funded.clone(),
            });
        }
    }
    DynamicsTrace {
        rule,
        generator: GENERATOR,
        config: config.clone(),
        initial: start.clone(),
        initial_funded,
        snapshots,
        final_profile: StrategyProfile::new(costs).expect("costs stay positive"),
        final_funded: outcome.funded,
        moves,
    }
}
