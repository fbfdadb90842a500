//! The `.pb` text format: `META`, `PROJECTS` and `VOTES` sections, each a
//! header row followed by `;`-separated records.

use std::collections::{HashMap, HashSet};
use std::fmt;

use pbcg_core::money::{self, Money};
use pbcg_core::PbInstance;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Section {
    Meta,
    Projects,
    Votes,
}

impl Section {
    pub fn name(self) -> &'static str {
        match self {
            Section::Meta => "META",
            Section::Projects => "PROJECTS",
            Section::Votes => "VOTES",
        }
    }

    fn from_line(fields: &[String]) -> Option<Self> {
        match fields {
            [one] => match one.trim().to_ascii_uppercase().as_str() {
                "META" => Some(Section::Meta),
                "PROJECTS" => Some(Section::Projects),
                "VOTES" => Some(Section::Votes),
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("missing section {0}")]
    MissingSection(Section),
    #[error("section {0} appears twice")]
    DuplicateSection(Section),
    #[error("record outside any section")]
    OutsideSection,
    #[error("section {0} has no header row")]
    MissingHeader(Section),
    #[error("section {section} has no `{column}` column")]
    MissingColumn { section: Section, column: &'static str },
    #[error("expected {expected} fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("missing META key `{0}`")]
    MissingMeta(&'static str),
    #[error("duplicate META key `{0}`")]
    DuplicateMeta(String),
    #[error("vote_type must be `approval`, found `{0}`")]
    VoteType(String),
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
    #[error("negative amount `{0}`")]
    Negative(String),
    #[error("budget must be positive")]
    Budget,
    #[error("duplicate project id `{0}`")]
    DuplicateProject(String),
    #[error("duplicate voter id `{0}`")]
    DuplicateVoter(String),
    #[error("empty project id")]
    EmptyId,
    #[error("voter approves unknown project `{0}`")]
    UnknownProject(String),
    #[error("project `{0}` approved twice on one ballot")]
    RepeatedApproval(String),
    #[error("empty ballot")]
    EmptyBallot,
    #[error("project count mismatch: META declares {declared}, PROJECTS has {found}")]
    ProjectCount { declared: usize, found: usize },
    #[error("vote count mismatch: META declares {declared}, VOTES has {found}")]
    VoteCount { declared: usize, found: usize },
    #[error("malformed record: {0}")]
    Record(String),
}

/// A parse failure with a 1-based line and field position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

/// A section as written: header plus records, every field kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h.trim() == name)
    }
}

/// A parsed `.pb` file. The tables keep every column, the typed fields hold
/// what the model needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PabulibFile {
    pub meta: Table,
    pub projects: Table,
    pub votes: Table,
    pub budget: Money,
    pub project_ids: Vec<String>,
    pub costs: Vec<Money>,
    pub voter_ids: Vec<String>,
    pub ballots: Vec<Vec<String>>,
}

impl PabulibFile {
    /// Value of a META key, trimmed.
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.rows.iter().find(|r| r[0].trim() == key).map(|r| r[1].trim())
    }

    pub fn num_projects(&self) -> usize {
        self.project_ids.len()
    }

    pub fn num_votes(&self) -> usize {
        self.voter_ids.len()
    }
}

struct Line {
    number: usize,
    fields: Vec<String>,
}

fn split(number: usize, text: &str) -> Result<Vec<String>, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut record = csv::StringRecord::new();
    match reader.read_record(&mut record) {
        Ok(true) => Ok(record.iter().map(String::from).collect()),
        Ok(false) => Ok(vec![String::new()]),
        Err(e) => Err(err(number, 1, ParseErrorKind::Record(e.to_string()))),
    }
}

pub fn parse_pabulib(bytes: &[u8]) -> Result<PabulibFile, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        err(line, 1, ParseErrorKind::Encoding)
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);

    let mut sections: HashMap<Section, (usize, Vec<Line>)> = HashMap::new();
    let mut current: Option<Section> = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        last_line = number;
        if raw.trim().is_empty() {
            continue;
        }
        let fields = split(number, raw)?;
        if let Some(s) = Section::from_line(&fields) {
            if sections.contains_key(&s) {
                return Err(err(number, 1, ParseErrorKind::DuplicateSection(s)));
            }
            sections.insert(s, (number, Vec::new()));
            current = Some(s);
            continue;
        }
        let s = current.ok_or_else(|| err(number, 1, ParseErrorKind::OutsideSection))?;
        sections.get_mut(&s).expect("opened").1.push(Line { number, fields });
    }
    let end = last_line + 1;
    let mut take = |s: Section| -> Result<(Table, Vec<usize>), ParseError> {
        let (start, lines) = sections.remove(&s).ok_or_else(|| err(end, 1, ParseErrorKind::MissingSection(s)))?;
        let mut lines = lines.into_iter();
        let Some(header) = lines.next() else {
            // A bare section reads as an empty table; callers decide.
            return Ok((Table::default(), vec![start]));
        };
        let width = header.fields.len();
        let mut rows = Vec::new();
        let mut numbers = Vec::new();
        for line in lines {
            if line.fields.len() != width {
                let column = width.min(line.fields.len()) + 1;
                return Err(err(
                    line.number,
                    column,
                    ParseErrorKind::FieldCount { expected: width, found: line.fields.len() },
                ));
            }
            numbers.push(line.number);
            rows.push(line.fields);
        }
        numbers.insert(0, header.number);
        Ok((Table { header: header.fields, rows }, numbers))
    };
    let (meta, meta_lines) = take(Section::Meta)?;
    let (projects, project_lines) = take(Section::Projects)?;
    let (votes, vote_lines) = take(Section::Votes)?;

    for (t, lines, s) in [(&meta, &meta_lines, Section::Meta), (&projects, &project_lines, Section::Projects)] {
        if t.header.is_empty() {
            return Err(err(lines[0], 1, ParseErrorKind::MissingHeader(s)));
        }
    }

    // META
    if meta.header.len() < 2 {
        return Err(err(meta_lines[0], meta.header.len() + 1, ParseErrorKind::MissingColumn { section: Section::Meta, column: "value" }));
    }
    let mut meta_at: HashMap<&str, (usize, &str)> = HashMap::new();
    for (row, &line) in meta.rows.iter().zip(&meta_lines[1..]) {
        if meta_at.insert(row[0].trim(), (line, row[1].trim())).is_some() {
            return Err(err(line, 1, ParseErrorKind::DuplicateMeta(row[0].trim().to_string())));
        }
    }
    let header_line = meta_lines[0];
    let required = |key: &'static str| meta_at.get(key).copied().ok_or(err(header_line, 1, ParseErrorKind::MissingMeta(key)));
    let (line, vote_type) = required("vote_type")?;
    if vote_type != "approval" {
        return Err(err(line, 2, ParseErrorKind::VoteType(vote_type.to_string())));
    }
    let (line, text) = required("budget")?;
    let budget = amount(line, 2, text)?;
    if budget == Money::from_integer(0.into()) {
        return Err(err(line, 2, ParseErrorKind::Budget));
    }
    let count = |key: &'static str| -> Result<(usize, usize), ParseError> {
        let (line, text) = required(key)?;
        text.parse::<usize>().map(|n| (line, n)).map_err(|_| err(line, 2, ParseErrorKind::MalformedNumber(text.to_string())))
    };
    let (projects_line, declared_projects) = count("num_projects")?;
    let (votes_line, declared_votes) = count("num_votes")?;

    // PROJECTS
    let column = |t: &Table, line: usize, section: Section, name: &'static str| {
        t.column(name).ok_or(err(line, 1, ParseErrorKind::MissingColumn { section, column: name }))
    };
    let id_col = column(&projects, project_lines[0], Section::Projects, "project_id")?;
    let cost_col = column(&projects, project_lines[0], Section::Projects, "cost")?;
    let mut project_ids = Vec::new();
    let mut costs = Vec::new();
    let mut seen = HashSet::new();
    for (row, &line) in projects.rows.iter().zip(&project_lines[1..]) {
        let id = row[id_col].trim();
        if id.is_empty() {
            return Err(err(line, id_col + 1, ParseErrorKind::EmptyId));
        }
        if !seen.insert(id) {
            return Err(err(line, id_col + 1, ParseErrorKind::DuplicateProject(id.to_string())));
        }
        project_ids.push(id.to_string());
        costs.push(amount(line, cost_col + 1, row[cost_col].trim())?);
    }
    if declared_projects != project_ids.len() {
        return Err(err(projects_line, 2, ParseErrorKind::ProjectCount { declared: declared_projects, found: project_ids.len() }));
    }

    // VOTES
    if votes.header.is_empty() {
        let kind = if declared_votes == 0 {
            ParseErrorKind::MissingHeader(Section::Votes)
        } else {
            ParseErrorKind::VoteCount { declared: declared_votes, found: 0 }
        };
        return Err(err(if declared_votes == 0 { vote_lines[0] } else { votes_line }, if declared_votes == 0 { 1 } else { 2 }, kind));
    }
    let voter_col = column(&votes, vote_lines[0], Section::Votes, "voter_id")?;
    let vote_col = column(&votes, vote_lines[0], Section::Votes, "vote")?;
    let mut voter_ids = Vec::new();
    let mut ballots = Vec::new();
    let mut voters_seen = HashSet::new();
    for (row, &line) in votes.rows.iter().zip(&vote_lines[1..]) {
        let voter = row[voter_col].trim();
        if !voters_seen.insert(voter) {
            return Err(err(line, voter_col + 1, ParseErrorKind::DuplicateVoter(voter.to_string())));
        }
        let mut ballot: Vec<String> = Vec::new();
        for id in row[vote_col].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if !seen.contains(id) {
                return Err(err(line, vote_col + 1, ParseErrorKind::UnknownProject(id.to_string())));
            }
            if ballot.iter().any(|b| b == id) {
                return Err(err(line, vote_col + 1, ParseErrorKind::RepeatedApproval(id.to_string())));
            }
            ballot.push(id.to_string());
        }
        if ballot.is_empty() {
            return Err(err(line, vote_col + 1, ParseErrorKind::EmptyBallot));
        }
        voter_ids.push(voter.to_string());
        ballots.push(ballot);
    }
    if declared_votes != voter_ids.len() {
        return Err(err(votes_line, 2, ParseErrorKind::VoteCount { declared: declared_votes, found: voter_ids.len() }));
    }

    Ok(PabulibFile { meta, projects, votes, budget, project_ids, costs, voter_ids, ballots })
}

fn amount(line: usize, column: usize, text: &str) -> Result<Money, ParseError> {
    let m = money::parse(text).map_err(|_| err(line, column, ParseErrorKind::MalformedNumber(text.to_string())))?;
    if money::sign(&m) < 0 {
        return Err(err(line, column, ParseErrorKind::Negative(text.to_string())));
    }
    Ok(m)
}

/// Writes the tables back. A file produced by [`parse_pabulib`] from
/// canonical text (LF endings, minimal quoting, no blank lines) is
/// reproduced byte for byte.
pub fn write_pabulib(file: &PabulibFile) -> String {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b';')
        .flexible(true)
        .quote_style(csv::QuoteStyle::Necessary)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for (section, table) in [(Section::Meta, &file.meta), (Section::Projects, &file.projects), (Section::Votes, &file.votes)] {
        w.write_record([section.name()]).expect("in-memory write");
        w.write_record(&table.header).expect("in-memory write");
        for row in &table.rows {
            w.write_record(row).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

/// A minimal file for an instance: the four required META keys, one
/// `project_id;cost` row per project and one `voter_id;vote` row per voter.
pub fn from_instance(inst: &PbInstance) -> PabulibFile {
    let a = &inst.approvals;
    let project_ids: Vec<String> = a.project_ids().to_vec();
    let voter_ids: Vec<String> = a.voter_ids().to_vec();
    let ballots: Vec<Vec<String>> =
        (0..a.num_voters()).map(|v| a.ballot(v).iter().map(|&p| a.project_id(p).to_string()).collect()).collect();
    let pair = |k: &str, v: String| vec![k.to_string(), v];
    let meta = Table {
        header: vec!["key".into(), "value".into()],
        rows: vec![
            pair("num_projects", project_ids.len().to_string()),
            pair("num_votes", voter_ids.len().to_string()),
            pair("budget", money::to_text(&inst.budget)),
            pair("vote_type", "approval".into()),
        ],
    };
    let projects = Table {
        header: vec!["project_id".into(), "cost".into()],
        rows: project_ids.iter().zip(&inst.costs).map(|(id, c)| vec![id.clone(), money::to_text(c)]).collect(),
    };
    let votes = Table {
        header: vec!["voter_id".into(), "vote".into()],
        rows: voter_ids.iter().zip(&ballots).map(|(v, b)| vec![v.clone(), b.join(",")]).collect(),
    };
    PabulibFile {
        meta,
        projects,
        votes,
        budget: inst.budget.clone(),
        project_ids,
        costs: inst.costs.clone(),
        voter_ids,
        ballots,
    }
}
