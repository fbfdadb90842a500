use std::cmp::Ordering;

use num_traits::Zero;

use crate::model::{Election, Outcome};
use crate::money::Money;

/// Approval score descending, ties by ≻.
pub fn basic_av(e: Election<'_>) -> Outcome {
    let a = e.approvals;
    let mut ps: Vec<usize> = (0..a.num_projects()).collect();
    ps.sort_by(|&p, &q| a.score(q).cmp(&a.score(p)).then(e.order.rank(p).cmp(&e.order.rank(q))));
    greedy_pass(e, &ps)
}

/// |A(p)| / cost(p) descending, zero cost first, ties by ≻.
pub fn av_over_cost(e: Election<'_>) -> Outcome {
    let a = e.approvals;
    let mut ps: Vec<usize> = (0..a.num_projects()).collect();
    ps.sort_by(|&p, &q| {
        let (cp, cq) = (&e.costs[p], &e.costs[q]);
        let by_ratio = match (cp.is_zero(), cq.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => {
                let lhs = Money::from_integer(a.score(p).into()) * cq;
                let rhs = Money::from_integer(a.score(q).into()) * cp;
                rhs.cmp(&lhs)
            }
        };
        by_ratio.then(e.order.rank(p).cmp(&e.order.rank(q)))
    });
    greedy_pass(e, &ps)
}

fn greedy_pass(e: Election<'_>, sequence: &[usize]) -> Outcome {
    let mut spent = Money::zero();
    let mut funded = Vec::new();
    for &p in sequence {
        let next = &spent + &e.costs[p];
        if next <= *e.budget {
            spent = next;
            funded.push(p);
        }
    }
    Outcome { funded, ..Outcome::default() }
}
