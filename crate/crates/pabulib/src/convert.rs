use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use pbcg_core::money::{self, Money};
use pbcg_core::{ApprovalProfile, ModelError, PbGame, PbInstance, TieBreakOrder};
use thiserror::Error;

use crate::pb::PabulibFile;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeliveryPolicy {
    /// d ≡ 0.
    Zero,
    /// d(p) = φ·cost(p), φ ∈ [0, 1].
    FractionOfOriginal(Money),
    /// d(p) given per project id.
    Explicit(BTreeMap<String, Money>),
}

impl FromStr for DeliveryPolicy {
    type Err = ConvertError;

    /// `zero` or `frac:φ`; explicit maps come from files.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("zero") {
            return Ok(DeliveryPolicy::Zero);
        }
        if let Some(phi) = s.strip_prefix("frac:") {
            let phi = money::parse(phi).map_err(|_| ConvertError::Policy(s.to_string()))?;
            return Ok(DeliveryPolicy::FractionOfOriginal(phi));
        }
        Err(ConvertError::Policy(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown delivery policy `{0}` (expected zero, frac:φ or file:PATH)")]
    Policy(String),
    #[error("fraction {0} lies outside [0, 1]")]
    Fraction(String),
    #[error("no delivery cost given for project `{0}`")]
    MissingDelivery(String),
    #[error("delivery cost given for unknown project `{0}`")]
    UnknownDelivery(String),
    #[error("negative delivery cost for project `{0}`")]
    NegativeDelivery(String),
}

fn approvals(file: &PabulibFile) -> Result<Arc<ApprovalProfile>, ModelError> {
    let ballots = file.voter_ids.iter().cloned().zip(file.ballots.iter().cloned());
    Ok(Arc::new(ApprovalProfile::new(file.project_ids.iter().cloned(), ballots)?))
}

/// Costs verbatim; default order is approval score descending, then file
/// order.
pub fn to_instance(file: &PabulibFile, order: Option<TieBreakOrder>) -> Result<PbInstance, ModelError> {
    let a = approvals(file)?;
    let order = match order {
        Some(o) => o,
        None => TieBreakOrder::new(a.by_score())?,
    };
    PbInstance::new(a, file.budget.clone(), file.costs.clone(), order)
}

/// The game of a file plus the warnings raised while applying `policy`.
pub fn to_game(file: &PabulibFile, policy: &DeliveryPolicy) -> Result<(PbGame, Vec<String>), ConvertError> {
    apply_policy(approvals(file)?, file.budget.clone(), &file.costs, policy)
}

/// Builds a game from `original` costs. Deliveries above B are clamped to B
/// with a warning.
pub fn apply_policy(
    approvals: Arc<ApprovalProfile>,
    budget: Money,
    original: &[Money],
    policy: &DeliveryPolicy,
) -> Result<(PbGame, Vec<String>), ConvertError> {
    let zero = Money::from_integer(0.into());
    let delivery: Vec<Money> = match policy {
        DeliveryPolicy::Zero => vec![zero; approvals.num_projects()],
        DeliveryPolicy::FractionOfOriginal(phi) => {
            if *phi < zero || *phi > Money::from_integer(1.into()) {
                return Err(ConvertError::Fraction(money::to_text(phi)));
            }
            original.iter().map(|c| c * phi).collect()
        }
        DeliveryPolicy::Explicit(map) => {
            if let Some(id) = map.keys().find(|id| approvals.project_index(id).is_none()) {
                return Err(ConvertError::UnknownDelivery(id.clone()));
            }
            approvals
                .project_ids()
                .iter()
                .map(|id| match map.get(id) {
                    Some(d) if *d < zero => Err(ConvertError::NegativeDelivery(id.clone())),
                    Some(d) => Ok(d.clone()),
                    None => Err(ConvertError::MissingDelivery(id.clone())),
                })
                .collect::<Result<_, _>>()?
        }
    };
    let mut warnings = Vec::new();
    let delivery = delivery
        .into_iter()
        .enumerate()
        .map(|(p, d)| {
            if d > budget {
                warnings.push(format!(
                    "delivery cost {} of project {} exceeds the budget {}; clamped",
                    money::to_text(&d),
                    approvals.project_id(p),
                    money::to_text(&budget)
                ));
                budget.clone()
            } else {
                d
            }
        })
        .collect();
    Ok((PbGame::new(approvals, budget, delivery)?, warnings))
}
