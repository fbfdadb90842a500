//! Participatory-budgeting cost games.
//!
//! Projects are players who report a cost; a PB rule selects which projects
//! are funded at their reported cost, and a funded project earns its reported
//! cost minus its delivery cost. This crate provides the rules under exact
//! rational arithmetic, constructive equilibria, best-response analysis, a
//! brute-force equilibrium oracle and randomized cost dynamics.

pub mod ballots;
pub mod dynamics;
pub mod equilibria;
pub mod gallery;
pub mod gen;
pub mod model;
pub mod money;
pub mod response;
pub mod rules;

pub use ballots::{classify_ballots, BallotClass, Parties};
pub use model::{
    ad_order, ad_violation, approval_proportional, is_ad_order, payoff, ApprovalProfile, Election, ModelError,
    Outcome, PbGame, PbInstance, StrategyProfile, TieBreakOrder,
};
pub use money::Money;
pub use rules::{run_rule, RuleId};
