//! Result documents, schema `v1`.
//!
//! Every amount is written as `{"decimal": "...", "num": "...", "den": "..."}`;
//! `num`/`den` are exact and authoritative, `decimal` has at most 12
//! fractional digits. Per-project lists follow approval score descending,
//! then project index.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use pbcg_core::dynamics::{DynamicsTrace, MoveCounts};
use pbcg_core::equilibria::{Guarantee, NeConstruction};
use pbcg_core::money::{self, Money};
use pbcg_core::response::{Margin, MarginKind, NeReport};
use pbcg_core::{ApprovalProfile, Outcome, PbGame, RuleId, StrategyProfile, TieBreakOrder};

pub const SCHEMA: &str = "v1";
pub const DECIMAL_DIGITS: usize = 12;

/// Exact money with a decimal rendering for humans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amount(pub Money);

#[derive(Serialize, Deserialize)]
struct AmountRepr {
    decimal: String,
    num: String,
    den: String,
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AmountRepr {
            decimal: money::to_decimal(&self.0, DECIMAL_DIGITS).0,
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
        }
        .serialize(s)
    }
}

/// Accepts the object form, a string (`"4.5"`, `"1/3"`) or an integer.
impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Any {
            Full(AmountRepr),
            Text(String),
            Int(i64),
        }
        let m = match Any::deserialize(d)? {
            Any::Full(r) => money::parse(&format!("{}/{}", r.num, r.den)).map_err(D::Error::custom)?,
            Any::Text(t) => money::parse(&t).map_err(D::Error::custom)?,
            Any::Int(n) => money::int(n),
        };
        Ok(Amount(m))
    }
}

impl From<&Money> for Amount {
    fn from(m: &Money) -> Self {
        Amount(m.clone())
    }
}

fn ids(a: &ApprovalProfile, ps: &[usize]) -> Vec<String> {
    ps.iter().map(|&p| a.project_id(p).to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectOutcome {
    pub id: String,
    pub score: usize,
    pub cost: Amount,
    pub funded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterBalance {
    pub id: String,
    pub balance: Amount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeDoc {
    pub schema: String,
    pub kind: String,
    pub rule: String,
    pub budget: Amount,
    pub order: Vec<String>,
    /// Selection order.
    pub funded: Vec<String>,
    pub spent: Amount,
    pub projects: Vec<ProjectOutcome>,
    /// Final balances; empty for rules without accounts.
    pub balances: Vec<VoterBalance>,
}

pub fn outcome_doc(
    approvals: &ApprovalProfile,
    budget: &Money,
    costs: &[Money],
    order: &TieBreakOrder,
    rule: RuleId,
    outcome: &Outcome,
) -> OutcomeDoc {
    let balances = match &outcome.accounts {
        Some(_) => (0..approvals.num_voters())
            .map(|v| VoterBalance { id: approvals.voter_ids()[v].clone(), balance: Amount(outcome.final_balance(v)) })
            .collect(),
        None => Vec::new(),
    };
    OutcomeDoc {
        schema: SCHEMA.into(),
        kind: "outcome".into(),
        rule: rule.name().into(),
        budget: budget.into(),
        order: ids(approvals, order.ranking()),
        funded: ids(approvals, &outcome.funded),
        spent: Amount(outcome.spent(costs)),
        projects: approvals
            .by_score()
            .into_iter()
            .map(|p| ProjectOutcome {
                id: approvals.project_id(p).into(),
                score: approvals.score(p),
                cost: (&costs[p]).into(),
                funded: outcome.is_funded(p),
            })
            .collect(),
        balances,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestResponseEntry {
    pub lower: Amount,
    pub upper: Amount,
    pub width: Amount,
    pub monotone_certified: bool,
    pub never_funded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginEntry {
    pub id: String,
    pub score: usize,
    pub cost: Amount,
    pub delivery: Amount,
    pub funded: bool,
    /// `winning` or `losing`.
    pub margin_kind: String,
    pub margin: Amount,
    pub best_response: BestResponseEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginsDoc {
    pub schema: String,
    pub kind: String,
    pub rule: String,
    pub budget: Amount,
    pub tolerance: Amount,
    pub projects: Vec<MarginEntry>,
    pub warnings: Vec<String>,
}

/// `margins` must come from `response::margins`, which already lists
/// projects by score.
pub fn margins_doc(
    game: &PbGame,
    rule: RuleId,
    profile: &StrategyProfile,
    tolerance: &Money,
    margins: &[Margin],
) -> MarginsDoc {
    let a = &game.approvals;
    let mut warnings = Vec::new();
    let projects = margins
        .iter()
        .map(|m| {
            let r = &m.response;
            if !r.monotone_certified {
                warnings.push(format!("{}: funding is not monotone in its cost; margin is a bracket end", a.project_id(m.project)));
            }
            MarginEntry {
                id: a.project_id(m.project).into(),
                score: a.score(m.project),
                cost: profile.cost(m.project).into(),
                delivery: (&game.delivery[m.project]).into(),
                funded: m.kind == MarginKind::Winning,
                margin_kind: match m.kind {
                    MarginKind::Winning => "winning",
                    MarginKind::Losing => "losing",
                }
                .into(),
                margin: (&m.value).into(),
                best_response: BestResponseEntry {
                    lower: (&r.lower).into(),
                    upper: (&r.upper).into(),
                    width: (&r.width).into(),
                    monotone_certified: r.monotone_certified,
                    never_funded: r.never_funded,
                },
            }
        })
        .collect();
    MarginsDoc {
        schema: SCHEMA.into(),
        kind: "margins".into(),
        rule: rule.name().into(),
        budget: (&game.budget).into(),
        tolerance: tolerance.into(),
        projects,
        warnings,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovesEntry {
    pub accepted_increases: u64,
    pub rejected_increases: u64,
    pub decreases: u64,
    pub skipped: u64,
}

impl From<&MoveCounts> for MovesEntry {
    fn from(m: &MoveCounts) -> Self {
        Self {
            accepted_increases: m.accepted_increases,
            rejected_increases: m.rejected_increases,
            decreases: m.decreases,
            skipped: m.skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsProject {
    pub id: String,
    pub score: usize,
    pub initial_cost: Amount,
    pub final_cost: Amount,
    pub initially_funded: bool,
    pub finally_funded: bool,
    pub moves: MovesEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub iteration: u64,
    /// Aligned with `projects`.
    pub costs: Vec<Amount>,
    pub funded: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynamicsDoc {
    pub schema: String,
    pub kind: String,
    pub rule: String,
    pub generator: String,
    pub seed: u64,
    pub iterations: u64,
    pub step_fraction: Amount,
    pub record_every: u64,
    pub budget: Amount,
    pub projects: Vec<DynamicsProject>,
    pub snapshots: Vec<SnapshotEntry>,
}

pub fn dynamics_doc(game: &PbGame, trace: &DynamicsTrace) -> DynamicsDoc {
    let a = &game.approvals;
    let listing = a.by_score();
    let has = |set: &[usize], p: usize| set.contains(&p);
    DynamicsDoc {
        schema: SCHEMA.into(),
        kind: "dynamics".into(),
        rule: trace.rule.name().into(),
        generator: trace.generator.into(),
        seed: trace.config.seed,
        iterations: trace.config.iterations,
        step_fraction: (&trace.config.step_fraction).into(),
        record_every: trace.config.record_every,
        budget: (&game.budget).into(),
        projects: listing
            .iter()
            .map(|&p| DynamicsProject {
                id: a.project_id(p).into(),
                score: a.score(p),
                initial_cost: trace.initial.cost(p).into(),
                final_cost: trace.final_profile.cost(p).into(),
                initially_funded: has(&trace.initial_funded, p),
                finally_funded: has(&trace.final_funded, p),
                moves: (&trace.moves[p]).into(),
            })
            .collect(),
        snapshots: trace
            .snapshots
            .iter()
            .map(|s| SnapshotEntry {
                iteration: s.iteration,
                costs: listing.iter().map(|&p| s.profile.cost(p).into()).collect(),
                funded: ids(a, &s.funded),
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeProject {
    pub id: String,
    pub score: usize,
    pub delivery: Amount,
    pub cost: Amount,
    pub funded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationEntry {
    pub project: String,
    pub cost: Amount,
    pub gain: Amount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeDoc {
    pub schema: String,
    pub kind: String,
    pub rule: String,
    /// Name of the construction that produced the profile, if any.
    pub construction: Option<String>,
    /// `all_orders` or `this_ad_order` for constructed profiles.
    pub guarantee: Option<String>,
    pub order: Vec<String>,
    pub budget: Amount,
    pub tolerance: Amount,
    pub verified: bool,
    pub projects: Vec<NeProject>,
    /// Funded projects as the rule selects them.
    pub funded: Vec<String>,
    pub predicted_funded: Option<Vec<String>>,
    pub violations: Vec<ViolationEntry>,
    pub warnings: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn ne_doc(
    game: &PbGame,
    rule: RuleId,
    profile: &StrategyProfile,
    order: &TieBreakOrder,
    outcome: &Outcome,
    construction: Option<(&str, &NeConstruction)>,
    report: &NeReport,
    tolerance: &Money,
) -> NeDoc {
    let a = &game.approvals;
    NeDoc {
        schema: SCHEMA.into(),
        kind: "ne".into(),
        rule: rule.name().into(),
        construction: construction.map(|(name, _)| name.to_string()),
        guarantee: construction.map(|(_, c)| {
            match c.guarantee {
                Guarantee::AllOrders => "all_orders",
                Guarantee::ThisAdOrder => "this_ad_order",
            }
            .to_string()
        }),
        order: ids(a, order.ranking()),
        budget: (&game.budget).into(),
        tolerance: tolerance.into(),
        verified: report.verified,
        projects: a
            .by_score()
            .into_iter()
            .map(|p| NeProject {
                id: a.project_id(p).into(),
                score: a.score(p),
                delivery: (&game.delivery[p]).into(),
                cost: profile.cost(p).into(),
                funded: outcome.is_funded(p),
            })
            .collect(),
        funded: ids(a, &outcome.funded),
        predicted_funded: construction.map(|(_, c)| ids(a, &c.predicted_funded)),
        violations: report
            .violations
            .iter()
            .map(|v| ViolationEntry { project: a.project_id(v.project).into(), cost: (&v.cost).into(), gain: (&v.gain).into() })
            .collect(),
        warnings: report.warnings.clone(),
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn write_outcome_json(doc: &OutcomeDoc) -> String {
    to_json(doc)
}

pub fn write_margins_json(doc: &MarginsDoc) -> String {
    to_json(doc)
}

pub fn write_dynamics_json(doc: &DynamicsDoc) -> String {
    to_json(doc)
}

pub fn write_ne_json(doc: &NeDoc) -> String {
    to_json(doc)
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported schema `{0}`, expected `v1`")]
    Schema(String),
    #[error("expected a `{expected}` document, found `{found}`")]
    Kind { expected: &'static str, found: String },
    #[error("unknown project `{0}`")]
    UnknownProject(String),
    #[error("no cost given for project `{0}`")]
    MissingProject(String),
    #[error("project `{0}` listed twice")]
    DuplicateProject(String),
    #[error("negative cost for project `{0}`")]
    Negative(String),
}

fn read_doc<T: for<'de> Deserialize<'de>>(text: &str, kind: &'static str) -> Result<T, JsonError> {
    #[derive(Deserialize)]
    struct Head {
        schema: String,
        kind: String,
    }
    let head: Head = serde_json::from_str(text)?;
    if head.schema != SCHEMA {
        return Err(JsonError::Schema(head.schema));
    }
    if head.kind != kind {
        return Err(JsonError::Kind { expected: kind, found: head.kind });
    }
    Ok(serde_json::from_str(text)?)
}

pub fn read_outcome_json(text: &str) -> Result<OutcomeDoc, JsonError> {
    read_doc(text, "outcome")
}

pub fn read_margins_json(text: &str) -> Result<MarginsDoc, JsonError> {
    read_doc(text, "margins")
}

pub fn read_dynamics_json(text: &str) -> Result<DynamicsDoc, JsonError> {
    read_doc(text, "dynamics")
}

pub fn read_ne_json(text: &str) -> Result<NeDoc, JsonError> {
    read_doc(text, "ne")
}

/// Project id → amount, from either `{"projects": [{"id", "cost"}, ...]}`
/// (so any `ne`/`outcome` document works) or a flat `{"id": amount}` object.
pub fn read_cost_map(text: &str) -> Result<BTreeMap<String, Money>, JsonError> {
    #[derive(Deserialize)]
    struct Entry {
        id: String,
        cost: Amount,
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        Listed { projects: Vec<Entry> },
        Flat(BTreeMap<String, Amount>),
    }
    let pairs: Vec<(String, Money)> = match serde_json::from_str::<Doc>(text)? {
        Doc::Listed { projects } => projects.into_iter().map(|e| (e.id, e.cost.0)).collect(),
        Doc::Flat(map) => map.into_iter().map(|(k, v)| (k, v.0)).collect(),
    };
    let mut map = BTreeMap::new();
    for (id, cost) in pairs {
        if money::sign(&cost) < 0 {
            return Err(JsonError::Negative(id));
        }
        if map.insert(id.clone(), cost).is_some() {
            return Err(JsonError::DuplicateProject(id));
        }
    }
    Ok(map)
}

/// A full strategy profile for `approvals` read through [`read_cost_map`].
pub fn read_profile_json(text: &str, approvals: &ApprovalProfile) -> Result<StrategyProfile, JsonError> {
    let map = read_cost_map(text)?;
    if let Some(id) = map.keys().find(|id| approvals.project_index(id).is_none()) {
        return Err(JsonError::UnknownProject(id.clone()));
    }
    let costs = approvals
        .project_ids()
        .iter()
        .map(|id| map.get(id).cloned().ok_or_else(|| JsonError::MissingProject(id.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StrategyProfile::new(costs).expect("checked nonnegative"))
}
