//! Which equilibrium construction applies to a rule and a game, following
//! the known existence results per ballot class and delivery costs.

use pbcg_core::equilibria::*;
use pbcg_core::{approval_proportional, classify_ballots, BallotClass, PbGame, RuleId, TieBreakOrder};

const RERUN_AD: &str = "rerun with --order ad";

fn relabel(mut c: NeConstruction, rule: RuleId) -> NeConstruction {
    c.rule = rule;
    c
}

fn within_ap(game: &PbGame) -> bool {
    let ap = approval_proportional(game);
    game.delivery.iter().zip(ap.costs()).all(|(d, a)| d <= a)
}

fn ad_required(game: &PbGame, what: &str, e: NotApplicable) -> String {
    let id = |p: usize| game.approvals.project_id(p).to_string();
    let why = match e {
        NotApplicable::OrderNotAd(p, q) => format!("{} must be ranked above {}", id(p), id(q)),
        NotApplicable::DeliveryAboveShare(p) => format!("delivery cost of {} exceeds its share", id(p)),
        other => other.to_string(),
    };
    format!("{what}: an equilibrium is guaranteed only under an A/D tie-break order, and some other orders admit none ({why}); {RERUN_AD}")
}

/// The construction for `rule` on `game` under `order`, or the reason none
/// is available.
pub fn dispatch(game: &PbGame, rule: RuleId, order: &TieBreakOrder) -> Result<(&'static str, NeConstruction), String> {
    let class = classify_ballots(&game.approvals);
    match rule {
        RuleId::BasicAV => Ok(("basicav-top-reports-budget", ne_basic_av(game, order))),
        RuleId::AvOverCost => avcost(game, order),
        RuleId::Phragmen => match class {
            BallotClass::Plurality(_) => avcost(game, order).map(|(n, c)| (n, relabel(c, RuleId::Phragmen))).map_err(|e| {
                format!("{e} (Phragmén coincides with AV/Cost on plurality ballots)")
            }),
            BallotClass::PartyList(_) if game.has_zero_delivery() => Ok((
                "phragmen-party-list",
                ne_phragmen_partylist_zero(game, order).expect("party-list with zero delivery"),
            )),
            BallotClass::PartyList(_) => Err(
                "Phragmén with party-list ballots and nonzero delivery costs: an equilibrium under A/D orders is only conjectured and no construction is known"
                    .into(),
            ),
            BallotClass::Unrestricted => Err(
                "Phragmén with unrestricted ballots: no equilibrium is guaranteed; there is a game with six projects and six voters (gallery G3) that has no equilibrium for any tie-break order"
                    .into(),
            ),
        },
        RuleId::MesCost => Ok(("mes-cost-supporter-budgets", ne_mes_cost(game, order))),
        RuleId::MesApr => match class {
            BallotClass::Plurality(_) => Ok((
                "mes-apr-plurality",
                ne_mes_apr_plurality(game, order).expect("plurality ballots"),
            )),
            BallotClass::PartyList(_) => ne_mes_apr_partylist(game, order)
                .map(|c| ("mes-apr-party-list", c))
                .map_err(|e| ad_required(game, "MES-Apr with party-list ballots and nonzero delivery costs", e)),
            BallotClass::Unrestricted => Err(
                "MES-Apr with unrestricted ballots: no equilibrium is guaranteed; there is a game with four projects and sixteen voters (gallery G5) that has no equilibrium for any tie-break order"
                    .into(),
            ),
        },
        RuleId::MesCostPh | RuleId::MesAprPh => Err(format!(
            "no existence result is known for {rule}; constructions cover basicav, avcost, phragmen, mescost and mesapr"
        )),
    }
}

fn avcost(game: &PbGame, order: &TieBreakOrder) -> Result<(&'static str, NeConstruction), String> {
    if within_ap(game) {
        let c = ne_avcost_ap(game, order).expect("deliveries within the approval-proportional profile");
        return Ok(("approval-proportional", c));
    }
    ne_avcost_ad(game, order)
        .map(|c| ("avcost-ad-levels", c))
        .map_err(|e| ad_required(game, "AV/Cost with delivery costs above the approval-proportional profile", e))
}
