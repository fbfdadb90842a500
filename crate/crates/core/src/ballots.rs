//! Ballot-structure classes: plurality, party-list, unrestricted.

use crate::model::ApprovalProfile;

/// Projects partitioned by identical supporter sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parties {
    blocks: Vec<Vec<usize>>,
    party_of: Vec<usize>,
    /// Voter group backing each block.
    group_of_block: Vec<usize>,
}

impl Parties {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn party_of(&self, p: usize) -> usize {
        self.party_of[p]
    }

    /// The block containing `p`.
    pub fn party(&self, p: usize) -> &[usize] {
        &self.blocks[self.party_of[p]]
    }

    /// Voters approving every project of block `b` (and nothing else).
    pub fn supporters<'a>(&self, approvals: &'a ApprovalProfile, b: usize) -> &'a [usize] {
        &approvals.groups()[self.group_of_block[b]].members
    }
}

/// Plurality is reported in preference to PartyList even though every
/// plurality profile is also a party-list profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BallotClass {
    Plurality(Parties),
    PartyList(Parties),
    Unrestricted,
}

impl BallotClass {
    pub fn parties(&self) -> Option<&Parties> {
        match self {
            BallotClass::Plurality(p) | BallotClass::PartyList(p) => Some(p),
            BallotClass::Unrestricted => None,
        }
    }

    pub fn is_plurality(&self) -> bool {
        matches!(self, BallotClass::Plurality(_))
    }

    /// True for party-list profiles, plurality included.
    pub fn is_party_list(&self) -> bool {
        self.parties().is_some()
    }

    pub fn name(&self) -> &'static str {
        match self {
            BallotClass::Plurality(_) => "plurality",
            BallotClass::PartyList(_) => "party-list",
            BallotClass::Unrestricted => "unrestricted",
        }
    }
}

pub fn classify_ballots(approvals: &ApprovalProfile) -> BallotClass {
    // Distinct ballots must be pairwise disjoint; equivalently every project
    // appears in exactly one voter group.
    if (0..approvals.num_projects()).any(|p| approvals.project_groups(p).len() != 1) {
        return BallotClass::Unrestricted;
    }
    let mut blocks = Vec::new();
    let mut group_of_block = Vec::new();
    let mut party_of = vec![0; approvals.num_projects()];
    for (g, grp) in approvals.groups().iter().enumerate() {
        for &p in &grp.ballot {
            party_of[p] = blocks.len();
        }
        blocks.push(grp.ballot.clone());
        group_of_block.push(g);
    }
    let parties = Parties { blocks, party_of, group_of_block };
    if approvals.ballots().iter().all(|b| b.len() == 1) {
        BallotClass::Plurality(parties)
    } else {
        BallotClass::PartyList(parties)
    }
}
