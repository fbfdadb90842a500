//! Fixtures and invariant-breaking mutations shared by the parser tests.
#![allow(dead_code)]

pub const FIXTURES: [(&str, &str); 3] = [
    ("g1", include_str!("../fixtures/g1.pb")),
    ("g6", include_str!("../fixtures/g6.pb")),
    ("district", include_str!("../fixtures/district.pb")),
];

pub const MUTATIONS: usize = 13;

struct Layout {
    lines: Vec<String>,
    meta: usize,
    projects: usize,
    votes: usize,
}

impl Layout {
    fn new(text: &str) -> Self {
        let lines: Vec<String> = text.lines().map(String::from).collect();
        let find = |name: &str| lines.iter().position(|l| l == name).expect("fixture has every section");
        Layout { meta: find("META"), projects: find("PROJECTS"), votes: find("VOTES"), lines }
    }

    fn meta_rows(&self) -> std::ops::Range<usize> {
        self.meta + 2..self.projects
    }

    fn project_rows(&self) -> std::ops::Range<usize> {
        self.projects + 2..self.votes
    }

    fn vote_rows(&self) -> std::ops::Range<usize> {
        self.votes + 2..self.lines.len()
    }

    fn column(&self, header: usize, name: &str) -> usize {
        self.lines[header].split(';').position(|h| h == name).expect("fixture column")
    }

    fn set_field(&mut self, line: usize, col: usize, value: &str) {
        let mut parts: Vec<String> = self.lines[line].split(';').map(String::from).collect();
        parts[col] = value.to_string();
        self.lines[line] = parts.join(";");
    }

    fn meta_row(&self, key: &str) -> usize {
        self.meta_rows().find(|&i| self.lines[i].starts_with(&format!("{key};"))).expect("fixture meta key")
    }

    fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

fn nth(range: std::ops::Range<usize>, pick: usize) -> usize {
    range.start + pick % range.len()
}

/// Applies mutation `kind` (mod [`MUTATIONS`]) to `text`; `pick` chooses the
/// affected row. Every mutation breaks a file invariant.
pub fn mutate(text: &str, kind: usize, pick: usize) -> String {
    let mut l = Layout::new(text);
    match kind % MUTATIONS {
        0 => {
            let section = [l.meta, l.projects, l.votes][pick % 3];
            l.lines.remove(section);
        }
        1 => {
            let header = l.projects + 1;
            let col = l.column(header, "cost");
            l.set_field(header, col, "kost");
        }
        2 => {
            let row = nth(l.project_rows(), pick);
            let col = l.column(l.projects + 1, "cost");
            l.set_field(row, col, "12x");
        }
        3 => {
            let row = nth(l.project_rows(), pick);
            let col = l.column(l.projects + 1, "cost");
            l.set_field(row, col, "-5");
        }
        4 => {
            let row = nth(l.vote_rows(), pick);
            l.lines[row].push_str(",zz");
        }
        5 => {
            let row = nth(l.vote_rows(), pick);
            l.lines.remove(row);
        }
        6 => {
            let row = nth(l.project_rows(), pick);
            l.lines.remove(row);
        }
        7 => {
            let row = l.meta_row("vote_type");
            l.lines[row] = "vote_type;cumulative".into();
        }
        8 => {
            let row = nth(l.project_rows(), pick);
            let copy = l.lines[row].clone();
            l.lines.insert(row + 1, copy);
        }
        9 => {
            let row = nth(l.vote_rows(), pick);
            let cut = l.lines[row].rfind(';').expect("several fields");
            l.lines[row].truncate(cut);
        }
        10 => {
            let row = l.meta_row("budget");
            l.lines[row] = "budget;ten".into();
        }
        11 => {
            let row = nth(l.vote_rows(), pick);
            let copy = l.lines[row].clone();
            l.lines.insert(row + 1, copy);
        }
        _ => {
            let row = nth(l.vote_rows(), pick);
            let col = l.column(l.votes + 1, "vote");
            l.set_field(row, col, "");
        }
    }
    l.text()
}
