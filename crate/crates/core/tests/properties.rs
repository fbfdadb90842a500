use pbcg_core::gen::{random_game, random_order, random_party_list_game, random_plurality_game, random_profile, Deliveries};
use pbcg_core::money::{self, Money};
use pbcg_core::rules::evaluate;
use pbcg_core::{PbGame, RuleId, StrategyProfile, TieBreakOrder};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64, kind: u8) -> (PbGame, StrategyProfile, TieBreakOrder) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let game = match kind % 3 {
        0 => random_game(&mut rng, 7, 30, Deliveries::Zero),
        1 => random_plurality_game(&mut rng, 6, 30, Deliveries::Zero),
        _ => random_party_list_game(&mut rng, 7, 30, Deliveries::Zero),
    };
    let profile = random_profile(&mut rng, &game);
    let order = random_order(&mut rng, game.num_projects());
    (game, profile, order)
}

fn zero() -> Money {
    money::int(0)
}

const EXHAUSTIVE: [RuleId; 5] = [RuleId::BasicAV, RuleId::AvOverCost, RuleId::Phragmen, RuleId::MesCostPh, RuleId::MesAprPh];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outcomes_fit_the_budget(seed in any::<u64>(), kind in any::<u8>()) {
        let (game, profile, order) = setup(seed, kind);
        for rule in RuleId::ALL {
            let out = evaluate(game.election(profile.costs(), &order), rule);
            prop_assert!(out.spent(profile.costs()) <= game.budget, "{rule}");
            let mut seen = out.funded.clone();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), out.funded.len());
        }
    }

    #[test]
    fn exhaustive_rules_leave_nothing_affordable(seed in any::<u64>(), kind in any::<u8>()) {
        let (game, profile, order) = setup(seed, kind);
        for rule in EXHAUSTIVE {
            let out = evaluate(game.election(profile.costs(), &order), rule);
            let left = &game.budget - out.spent(profile.costs());
            for p in (0..game.num_projects()).filter(|&p| !out.is_funded(p)) {
                prop_assert!(*profile.cost(p) > left, "{rule}: p{} costs {} with {} left", p + 1, profile.cost(p), left);
            }
        }
    }

    #[test]
    fn mes_payments_are_conserved(seed in any::<u64>(), kind in any::<u8>()) {
        let (game, profile, order) = setup(seed, kind);
        let share = &game.budget / Money::from_integer(game.approvals.num_voters().into());
        for rule in [RuleId::MesCost, RuleId::MesApr, RuleId::Phragmen] {
            let out = evaluate(game.election(profile.costs(), &order), rule);
            for &p in &out.funded {
                prop_assert_eq!(&out.collected(p), profile.cost(p), "{}", rule);
                for &v in game.approvals.supporters(p) {
                    prop_assert!(out.payment(v, p) >= zero());
                }
            }
            if rule != RuleId::Phragmen {
                for v in 0..game.approvals.num_voters() {
                    let paid: Money = game.approvals.ballot(v).iter().map(|&p| out.payment(v, p)).sum();
                    prop_assert!(out.final_balance(v) >= zero());
                    prop_assert_eq!(out.final_balance(v) + paid, share.clone(), "{}", rule);
                }
            }
        }
    }

    #[test]
    fn mes_alphas_never_decrease(seed in any::<u64>(), kind in any::<u8>()) {
        let (game, profile, order) = setup(seed, kind);
        for rule in [RuleId::MesCost, RuleId::MesApr] {
            let out = evaluate(game.election(profile.costs(), &order), rule);
            prop_assert!(out.alphas.windows(2).all(|w| w[0] <= w[1]), "{}: {:?}", rule, out.alphas);
        }
    }

    #[test]
    fn mes_funds_only_within_supporter_budget(seed in any::<u64>(), kind in any::<u8>()) {
        let (game, profile, order) = setup(seed, kind);
        let n = Money::from_integer(game.approvals.num_voters().into());
        for rule in [RuleId::MesCost, RuleId::MesApr] {
            let out = evaluate(game.election(profile.costs(), &order), rule);
            for &p in &out.funded {
                let cap = &game.budget * Money::from_integer(game.approvals.score(p).into()) / &n;
                prop_assert!(*profile.cost(p) <= cap);
            }
        }
    }

    #[test]
    fn phragmen_matches_avcost_on_plurality(seed in any::<u64>()) {
        let (game, profile, order) = setup(seed, 1);
        let e = game.election(profile.costs(), &order);
        let mut a = evaluate(e, RuleId::Phragmen).funded;
        let mut b = evaluate(game.election(profile.costs(), &order), RuleId::AvOverCost).funded;
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn scaling_costs_and_budget_keeps_outcomes(seed in any::<u64>(), kind in any::<u8>(), num in 1i64..50, den in 1i64..50) {
        let (game, profile, order) = setup(seed, kind);
        let factor = money::ratio(num, den);
        let scaled_game = game.scaled(&factor);
        let scaled = profile.scaled(&factor);
        for rule in RuleId::ALL {
            let a = evaluate(game.election(profile.costs(), &order), rule);
            let b = evaluate(scaled_game.election(scaled.costs(), &order), rule);
            prop_assert_eq!(&a.funded, &b.funded, "{}", rule);
            let alphas: Vec<Money> = a.alphas.iter().map(|x| if rule == RuleId::MesApr || rule == RuleId::MesAprPh { x * &factor } else { x.clone() }).collect();
            prop_assert_eq!(alphas, b.alphas, "{}", rule);
        }
    }

    #[test]
    fn rules_are_deterministic(seed in any::<u64>(), kind in any::<u8>()) {
        let (game, profile, order) = setup(seed, kind);
        for rule in RuleId::ALL {
            let a = evaluate(game.election(profile.costs(), &order), rule);
            let b = evaluate(game.election(profile.costs(), &order), rule);
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn removing_an_unfunded_loser_changes_nothing_for_greedy_rules() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let game = random_game(&mut rng, 6, 20, Deliveries::Zero);
        let profile = random_profile(&mut rng, &game);
        let order = random_order(&mut rng, game.num_projects());
        for rule in [RuleId::BasicAV, RuleId::AvOverCost] {
            let out = evaluate(game.election(profile.costs(), &order), rule);
            let Some(loser) = (0..game.num_projects()).find(|&p| !out.is_funded(p)) else { continue };
            let raised = profile.with_cost(loser, &game.budget + money::int(1));
            let again = evaluate(game.election(raised.costs(), &order), rule);
            assert_eq!(out.funded, again.funded, "{rule}");
        }
    }
}
