use std::path::{Path, PathBuf};

use pbcg_core::gallery;
use pbcg_core::money::{self, Money};
use pbcg_core::{ad_order, PbGame, StrategyProfile, TieBreakOrder};
use pbcg_pabulib::json::{read_cost_map, read_profile_json};
use pbcg_pabulib::{apply_policy, parse_pabulib, to_game, DeliveryPolicy};

use crate::Failure;

/// A game together with the costs it was loaded with and its default order.
pub struct Source {
    pub game: PbGame,
    pub original: StrategyProfile,
    pub default_order: TieBreakOrder,
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?).map_err(|_| Failure::usage(format!("{}: not UTF-8", path.display())))
}

fn policy(spec: &str) -> Result<DeliveryPolicy, Failure> {
    if let Some(path) = spec.strip_prefix("file:") {
        let map = read_cost_map(&read_text(Path::new(path))?).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
        return Ok(DeliveryPolicy::Explicit(map));
    }
    spec.parse().map_err(|e| Failure::usage(format!("--delivery: {e}")))
}

/// Files default to zero delivery costs; gallery games keep their own
/// unless `--delivery` is given.
pub fn load(file: Option<&PathBuf>, name: Option<&str>, delivery: Option<&str>) -> Result<Source, Failure> {
    if let Some(path) = file {
        let parsed = parse_pabulib(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let policy = delivery.map(policy).transpose()?.unwrap_or(DeliveryPolicy::Zero);
        let (game, warnings) = to_game(&parsed, &policy).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let default_order = TieBreakOrder::new(game.approvals.by_score()).expect("by_score is a permutation");
        let original = StrategyProfile::new(parsed.costs).expect("parser rejects negative costs");
        return Ok(Source { game, original, default_order, warnings });
    }
    let name = name.expect("clap requires --file or --gallery");
    let entry = gallery::lookup(name).ok_or_else(|| {
        Failure::usage(format!("unknown gallery game `{name}` (expected G1..G6 or W<γ>)"))
    })?;
    let (game, warnings) = match delivery {
        None => (entry.game, Vec::new()),
        Some(spec) => apply_policy(entry.game.approvals.clone(), entry.game.budget.clone(), entry.profile.costs(), &policy(spec)?)
            .map_err(|e| Failure::usage(format!("--delivery: {e}")))?,
    };
    Ok(Source { game, original: entry.profile, default_order: entry.order, warnings })
}

/// `default`, `ad`, or a comma-separated list of every project id.
pub fn order(source: &Source, spec: &str) -> Result<TieBreakOrder, Failure> {
    match spec.trim() {
        "default" => Ok(source.default_order.clone()),
        "ad" => Ok(ad_order(&source.game)),
        list => {
            let ids: Vec<&str> = list.split(',').map(str::trim).collect();
            TieBreakOrder::from_ids(&source.game.approvals, &ids)
                .map_err(|e| Failure::usage(format!("--order: {e} (list every project once)")))
        }
    }
}

pub fn profile(source: &Source, path: Option<&PathBuf>) -> Result<StrategyProfile, Failure> {
    match path {
        None => Ok(source.original.clone()),
        Some(path) => read_profile_json(&read_text(path)?, &source.game.approvals)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
    }
}

pub fn amount(flag: &str, text: &str) -> Result<Money, Failure> {
    let m = money::parse(text).map_err(|_| Failure::usage(format!("{flag}: malformed amount `{text}`")))?;
    if money::sign(&m) < 0 {
        return Err(Failure::usage(format!("{flag}: must not be negative")));
    }
    Ok(m)
}
