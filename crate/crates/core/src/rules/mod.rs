//! The PB rules: BasicAV, AV/Cost, sequential Phragmén, the two Method of
//! Equal Shares variants, and MES extended by Phragmén.

mod greedy;
mod ledger;
mod mes;
mod phragmen;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{Election, Outcome, PbInstance};
use crate::money::Money;

pub use greedy::{basic_av, av_over_cost};
pub use mes::{mes, mes_with_completion, solve_alpha_apr, solve_alpha_cost, Affordability, MesVariant};
pub use phragmen::phragmen;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    BasicAV,
    AvOverCost,
    Phragmen,
    MesCost,
    MesApr,
    MesCostPh,
    MesAprPh,
}

impl RuleId {
    pub const ALL: [RuleId; 7] = [
        RuleId::BasicAV,
        RuleId::AvOverCost,
        RuleId::Phragmen,
        RuleId::MesCost,
        RuleId::MesApr,
        RuleId::MesCostPh,
        RuleId::MesAprPh,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            RuleId::BasicAV => "basicav",
            RuleId::AvOverCost => "avcost",
            RuleId::Phragmen => "phragmen",
            RuleId::MesCost => "mescost",
            RuleId::MesApr => "mesapr",
            RuleId::MesCostPh => "mescost-ph",
            RuleId::MesAprPh => "mesapr-ph",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule {0:?} (expected one of basicav, avcost, phragmen, mescost, mesapr, mescost-ph, mesapr-ph)")]
pub struct UnknownRule(pub String);

impl FromStr for RuleId {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

pub fn run_basic_av(instance: &PbInstance) -> Outcome {
    basic_av(instance.election())
}

pub fn run_av_over_cost(instance: &PbInstance) -> Outcome {
    av_over_cost(instance.election())
}

/// `initial_balances` is indexed by voter; `eligible` by project.
pub fn run_phragmen(instance: &PbInstance, initial_balances: Option<&[Money]>, eligible: Option<&[bool]>) -> Outcome {
    phragmen(instance.election(), initial_balances, eligible)
}

pub fn run_mes(instance: &PbInstance, variant: MesVariant) -> Outcome {
    mes(instance.election(), variant)
}

pub fn run_with_completion(instance: &PbInstance, variant: MesVariant) -> Outcome {
    mes_with_completion(instance.election(), variant)
}

pub fn run_rule(instance: &PbInstance, rule: RuleId) -> Outcome {
    evaluate(instance.election(), rule)
}

/// Dispatch on a borrowed election.
pub fn evaluate(e: Election<'_>, rule: RuleId) -> Outcome {
    match rule {
        RuleId::BasicAV => basic_av(e),
        RuleId::AvOverCost => av_over_cost(e),
        RuleId::Phragmen => phragmen(e, None, None),
        RuleId::MesCost => mes(e, MesVariant::Cost),
        RuleId::MesApr => mes(e, MesVariant::Apr),
        RuleId::MesCostPh => mes_with_completion(e, MesVariant::Cost),
        RuleId::MesAprPh => mes_with_completion(e, MesVariant::Apr),
    }
}
