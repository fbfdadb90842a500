//! CSV mirrors of the JSON documents: one row per project, amounts with at
//! most 12 fractional digits and an `exact` column that is false when any
//! amount on the row was rounded.

use pbcg_core::money::to_decimal;

use crate::json::{Amount, DynamicsDoc, MarginsDoc, NeDoc, DECIMAL_DIGITS};

struct Row {
    fields: Vec<String>,
    exact: bool,
}

impl Row {
    fn new() -> Self {
        Row { fields: Vec::new(), exact: true }
    }

    fn text(mut self, s: impl ToString) -> Self {
        self.fields.push(s.to_string());
        self
    }

    fn amount(mut self, a: &Amount) -> Self {
        let (text, exact) = to_decimal(&a.0, DECIMAL_DIGITS);
        self.exact &= exact;
        self.fields.push(text);
        self
    }

    fn finish(mut self) -> Vec<String> {
        self.fields.push(self.exact.to_string());
        self.fields
    }
}

fn render(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
}

pub fn write_margins_csv(doc: &MarginsDoc) -> String {
    let header = [
        "id", "score", "cost", "delivery", "funded", "margin_kind", "margin", "br_lower", "br_upper",
        "monotone_certified", "exact",
    ];
    render(
        &header,
        doc.projects.iter().map(|p| {
            Row::new()
                .text(&p.id)
                .text(p.score)
                .amount(&p.cost)
                .amount(&p.delivery)
                .text(p.funded)
                .text(&p.margin_kind)
                .amount(&p.margin)
                .amount(&p.best_response.lower)
                .amount(&p.best_response.upper)
                .text(p.best_response.monotone_certified)
                .finish()
        }),
    )
}

pub fn write_dynamics_csv(doc: &DynamicsDoc) -> String {
    let header = [
        "id", "score", "initial_cost", "final_cost", "initially_funded", "finally_funded", "accepted_increases",
        "rejected_increases", "decreases", "skipped", "exact",
    ];
    render(
        &header,
        doc.projects.iter().map(|p| {
            Row::new()
                .text(&p.id)
                .text(p.score)
                .amount(&p.initial_cost)
                .amount(&p.final_cost)
                .text(p.initially_funded)
                .text(p.finally_funded)
                .text(p.moves.accepted_increases)
                .text(p.moves.rejected_increases)
                .text(p.moves.decreases)
                .text(p.moves.skipped)
                .finish()
        }),
    )
}

/// `violation_cost`/`violation_gain` are empty for projects without a
/// profitable deviation.
pub fn write_ne_csv(doc: &NeDoc) -> String {
    let header = ["id", "score", "delivery", "cost", "funded", "violation_cost", "violation_gain", "exact"];
    render(
        &header,
        doc.projects.iter().map(|p| {
            let row = Row::new().text(&p.id).text(p.score).amount(&p.delivery).amount(&p.cost).text(p.funded);
            match doc.violations.iter().find(|v| v.project == p.id) {
                Some(v) => row.amount(&v.cost).amount(&v.gain).finish(),
                None => row.text("").text("").finish(),
            }
        }),
    )
}
