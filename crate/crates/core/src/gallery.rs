//! Named small games used throughout the tests and reachable from the CLI.
//!
//! | name | shape |
//! |------|-------|
//! | G1 | 2 projects, 5 voters, B=10, d≡0 |
//! | G2 | plurality, 5+5 voters, B=10, d=(0,6) |
//! | G3 | two mirrored laminar triples, 6 voters, B=1, d≡0 |
//! | G4 | 1 voter approving 3 projects, B=6, d=(3,0,0) |
//! | G5 | 4 projects on a circle of 16 voters, B=16, d≡0 |
//! | G6 | 3 voters, two singletons and one shared project, B=36, d≡0 |

use std::sync::Arc;

use crate::model::{ApprovalProfile, PbGame, StrategyProfile, TieBreakOrder};
use crate::money::{int, ratio, Money};

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: String,
    pub description: String,
    pub game: PbGame,
    /// Documented tie-break order (listing order unless stated otherwise).
    pub order: TieBreakOrder,
    /// Profile the instance is usually evaluated at.
    pub profile: StrategyProfile,
}

impl GalleryEntry {
    pub fn project(&self, id: &str) -> usize {
        self.game.approvals.project_index(id).unwrap_or_else(|| panic!("no project {id} in {}", self.name))
    }
}

fn approvals(projects: &[&str], ballots: Vec<(String, Vec<&str>)>) -> Arc<ApprovalProfile> {
    let ballots = ballots.into_iter().map(|(v, b)| (v, b.into_iter().map(String::from).collect()));
    Arc::new(ApprovalProfile::new(projects.iter().copied(), ballots).expect("gallery profiles are valid"))
}

/// Voters `v{from}..=v{to}`, all casting `ballot`.
fn block<'a>(from: usize, to: usize, ballot: &[&'a str]) -> Vec<(String, Vec<&'a str>)> {
    (from..=to).map(|i| (format!("v{i}"), ballot.to_vec())).collect()
}

fn entry(name: &str, description: &str, game: PbGame, profile: StrategyProfile) -> GalleryEntry {
    let m = game.num_projects();
    GalleryEntry {
        name: name.into(),
        description: description.into(),
        game,
        order: TieBreakOrder::identity(m),
        profile,
    }
}

pub fn g1() -> GalleryEntry {
    let mut ballots = block(1, 2, &["p1"]);
    ballots.extend(block(3, 5, &["p2"]));
    let game = PbGame::zero_delivery(approvals(&["p1", "p2"], ballots), int(10)).unwrap();
    entry("G1", "2 projects, 5 voters, B=10, d=0; (4,6) is the AV/Cost equilibrium", game, StrategyProfile::from_ints(&[4, 6]))
}

pub fn g2() -> GalleryEntry {
    let mut ballots = block(1, 5, &["p1"]);
    ballots.extend(block(6, 10, &["p2"]));
    let game = PbGame::new(approvals(&["p1", "p2"], ballots), int(10), vec![int(0), int(6)]).unwrap();
    entry("G2", "plurality, 5+5 voters, B=10, d=(0,6); equilibrium only when p1 wins ties", game, StrategyProfile::from_ints(&[6, 6]))
}

pub fn g3() -> GalleryEntry {
    let projects = ["pa1", "pa2", "pa3", "pb1", "pb2", "pb3"];
    let ballots = vec![
        ("va1".to_string(), vec!["pa1", "pa3"]),
        ("va2".to_string(), vec!["pa2", "pa3"]),
        ("va3".to_string(), vec!["pa3"]),
        ("vb1".to_string(), vec!["pb1", "pb3"]),
        ("vb2".to_string(), vec!["pb2", "pb3"]),
        ("vb3".to_string(), vec!["pb3"]),
    ];
    let game = PbGame::zero_delivery(approvals(&projects, ballots), int(1)).unwrap();
    let (leaf, big) = (ratio(1, 12), ratio(3, 12));
    let profile = StrategyProfile::new(vec![leaf.clone(), leaf.clone(), big.clone(), leaf.clone(), leaf, big]).unwrap();
    entry("G3", "6 projects, 6 voters, two mirrored laminar triples, B=1, d=0; no Phragmen equilibrium", game, profile)
}

pub fn g4() -> GalleryEntry {
    let ballots = block(1, 1, &["p1", "p2", "p3"]);
    let game = PbGame::new(approvals(&["p1", "p2", "p3"], ballots), int(6), vec![int(3), int(0), int(0)]).unwrap();
    entry("G4", "1 voter, 3 projects, B=6, d=(3,0,0); no MES-Apr equilibrium under p1>p2>p3", game, StrategyProfile::from_ints(&[3, 3, 3]))
}

pub fn g5() -> GalleryEntry {
    let range = |a: usize, b: usize| (a..=b).collect::<Vec<_>>();
    let supporters = [range(1, 5), [range(13, 16), vec![1]].concat(), range(5, 9), range(9, 13)];
    let ballots = (1..=16)
        .map(|v| {
            let ballot = (0..4).filter(|&p| supporters[p].contains(&v)).map(|p| ["p1", "p2", "p3", "p4"][p]).collect();
            (format!("v{v}"), ballot)
        })
        .collect();
    let game = PbGame::zero_delivery(approvals(&["p1", "p2", "p3", "p4"], ballots), int(16)).unwrap();
    entry("G5", "4 projects, 16 voters on a circle, B=16, d=0; no MES-Apr equilibrium", game, StrategyProfile::from_ints(&[4, 4, 4, 4]))
}

pub fn g6() -> GalleryEntry {
    let ballots = vec![
        ("v1".to_string(), vec!["p1", "p3"]),
        ("v2".to_string(), vec!["p2", "p3"]),
        ("v3".to_string(), vec!["p3"]),
    ];
    let game = PbGame::zero_delivery(approvals(&["p1", "p2", "p3"], ballots), int(36)).unwrap();
    entry("G6", "3 voters, B=36, d=0; symmetric projects p1,p2 with asymmetric equilibrium (7,8,21)", game, StrategyProfile::from_ints(&[7, 8, 21]))
}

/// Plurality game where a Phragmén equilibrium funds at most B/γ:
/// |A| = (1, 1, 20γ−1), B = 10, d = (0, 0, 10 − 1/(2γ)), order p1≻p2≻p3,
/// profile (1/(2γ), 1/(2γ), 10 − 1/(2γ)).
pub fn small_cost_witness(gamma: u32) -> GalleryEntry {
    assert!(gamma >= 1);
    let g = gamma as usize;
    let mut ballots = vec![("v1".to_string(), vec!["p1"]), ("v2".to_string(), vec!["p2"])];
    ballots.extend(block(3, 20 * g + 1, &["p3"]));
    let half = ratio(1, 2 * gamma as i64);
    let big = int(10) - &half;
    let game = PbGame::new(approvals(&["p1", "p2", "p3"], ballots), int(10), vec![int(0), int(0), big.clone()]).unwrap();
    let profile = StrategyProfile::new(vec![half.clone(), half, big]).unwrap();
    entry(
        &format!("W{gamma}"),
        &format!("plurality Phragmen equilibrium spending at most B/{gamma}"),
        game,
        profile,
    )
}

pub fn gallery() -> Vec<GalleryEntry> {
    vec![g1(), g2(), g3(), g4(), g5(), g6()]
}

/// Case-insensitive lookup; `W<γ>` names the small-cost witness.
pub fn lookup(name: &str) -> Option<GalleryEntry> {
    if let Some(g) = name.strip_prefix(['W', 'w']).and_then(|s| s.parse::<u32>().ok()) {
        return (g >= 1).then(|| small_cost_witness(g));
    }
    gallery().into_iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

/// `B / |V|`, the per-voter share under MES.
pub fn voter_share(game: &PbGame) -> Money {
    &game.budget / Money::from_integer(game.approvals.num_voters().into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let shapes: Vec<(usize, usize)> =
            gallery().iter().map(|e| (e.game.num_projects(), e.game.approvals.num_voters())).collect();
        assert_eq!(shapes, vec![(2, 5), (2, 10), (6, 6), (3, 1), (4, 16), (3, 3)]);
        assert_eq!(g4().game.delivery[0], int(6) / int(2));
        let g5 = g5();
        let scores: Vec<usize> = (0..4).map(|p| g5.game.approvals.score(p)).collect();
        assert_eq!(scores, vec![5, 5, 5, 5]);
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(lookup("g3").unwrap().name, "G3");
        assert_eq!(lookup("W5").unwrap().game.approvals.score(2), 99);
        assert!(lookup("G9").is_none());
    }
}
