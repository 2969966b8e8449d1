//! Closed-form payoffs, posteriors and best responses.
//!
//! `p` is the probability that the host is evil in a given game and `q` the
//! fraction of guests who stay. All results are exact.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::probability::{parse_rational, ratio, Probability};

fn wrap(value: BigRational) -> Probability {
    Probability::from_ratio_unchecked(value)
}

fn third() -> BigRational {
    ratio(1, 3)
}

/// Winning chance of always staying. The host cannot move it off 1/3.
pub fn win_stay(_p: &Probability) -> Probability {
    wrap(third())
}

/// Winning chance of always switching after another door was opened:
/// `2(1 - p)/3`.
pub fn win_switch(p: &Probability) -> Probability {
    wrap(ratio(2, 3) * (BigRational::one() - p.ratio()))
}

/// Winning chance of a population staying with probability `q` against a
/// moody host: `(2 - 2p - q + 2pq)/3`.
pub fn win_probability(p: &Probability, q: &Probability) -> Probability {
    let (p, q) = (p.ratio(), q.ratio());
    let two = ratio(2, 1);
    wrap((&two - &two * p - q + &two * p * q) / ratio(3, 1))
}

/// `P(other)`: the host opens a door other than the guest's, `(3 - 2p)/3`.
pub fn prob_other(p: &Probability) -> Probability {
    wrap((ratio(3, 1) - ratio(2, 1) * p.ratio()) / ratio(3, 1))
}

/// `P(my)`: the host opens the guest's own door, `2p/3`.
pub fn prob_my(p: &Probability) -> Probability {
    wrap(ratio(2, 3) * p.ratio())
}

fn three_minus_two_p(p: &Probability) -> BigRational {
    ratio(3, 1) - ratio(2, 1) * p.ratio()
}

/// `P(evil | other) = p/(3 - 2p)`.
pub fn posterior_evil_given_other(p: &Probability) -> Probability {
    wrap(p.ratio() / three_minus_two_p(p))
}

/// `P(fair | other) = (3 - 3p)/(3 - 2p)`.
pub fn posterior_fair_given_other(p: &Probability) -> Probability {
    wrap((ratio(3, 1) - ratio(3, 1) * p.ratio()) / three_minus_two_p(p))
}

/// `P(evil | my) = 1`: a fair host never opens the guest's door.
pub fn posterior_evil_given_my() -> Probability {
    Probability::one()
}

/// `P(car | other) = 1/(3 - 2p)`, the chance the car is behind the guest's
/// own door once another door has been opened.
pub fn posterior_car_given_other(p: &Probability) -> Probability {
    wrap(BigRational::one() / three_minus_two_p(p))
}

/// Win rate against a perfect mind reader: `q/3`.
pub fn mind_reader_win_rate(q: &Probability) -> Probability {
    wrap(q.ratio() * third())
}

/// Share of games in which a perfect mind reader opens another door,
/// `(1 + 2q)/3`. The reader is fair to stayers and to switchers holding the
/// car, and an evil host holding the car opens another door too.
pub fn mind_reader_open_rate(q: &Probability) -> Probability {
    wrap((BigRational::one() + ratio(2, 1) * q.ratio()) / ratio(3, 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Recommendation {
    Stay,
    Switch,
    Indifferent,
}

impl std::fmt::Display for Recommendation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Recommendation::Stay => "stay",
            Recommendation::Switch => "switch",
            Recommendation::Indifferent => "indifferent",
        })
    }
}

/// `win_switch(p) - win_stay(p)`, signed.
pub fn payoff_gap(p: &Probability) -> BigRational {
    win_switch(p).into_ratio() - win_stay(p).into_ratio()
}

pub fn best_response(p: &Probability) -> Recommendation {
    let gap = payoff_gap(p);
    if gap.is_positive() {
        Recommendation::Switch
    } else if gap.is_negative() {
        Recommendation::Stay
    } else {
        Recommendation::Indifferent
    }
}

/// Payoffs of the pure and mixed guest strategies at a fixed `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffSurface {
    pub p: Probability,
}

impl PayoffSurface {
    pub fn at(p: Probability) -> Self {
        PayoffSurface { p }
    }

    pub fn win_stay(&self) -> Probability {
        win_stay(&self.p)
    }

    pub fn win_switch(&self) -> Probability {
        win_switch(&self.p)
    }

    pub fn win_mixed(&self, q: &Probability) -> Probability {
        win_probability(&self.p, q)
    }
}

/// Result of the bisection for the host's indifference point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndifferenceSearch {
    pub point: Probability,
    pub lower: Probability,
    pub upper: Probability,
    pub steps: u32,
    /// The bracket collapsed onto a zero of the payoff gap.
    pub exact: bool,
    /// `point` equals the algebraic solution.
    pub confirmed: bool,
}

pub const BISECTION_STEPS: u32 = 60;

/// Bisects `payoff_gap` over `[0, 1]` on rational midpoints.
pub fn search_indifference(max_steps: u32) -> IndifferenceSearch {
    let mut lower = BigRational::zero();
    let mut upper = BigRational::one();
    let mut steps = 0;
    let mut exact = false;
    // gap is strictly decreasing: positive at 0, negative at 1.
    while steps < max_steps {
        steps += 1;
        let mid = (&lower + &upper) / ratio(2, 1);
        let gap = payoff_gap(&wrap(mid.clone()));
        if gap.is_zero() {
            lower = mid.clone();
            upper = mid;
            exact = true;
            break;
        } else if gap.is_positive() {
            lower = mid;
        } else {
            upper = mid;
        }
    }
    let point = (&lower + &upper) / ratio(2, 1);
    let confirmed = point == indifference_closed_form().into_ratio();
    IndifferenceSearch { point: wrap(point), lower: wrap(lower), upper: wrap(upper), steps, exact, confirmed }
}

/// Solves `2(1 - p)/3 = 1/3` algebraically: `p = 1 - (3/2)·(1/3)`.
pub fn indifference_closed_form() -> Probability {
    wrap(BigRational::one() - ratio(3, 2) * win_stay(&Probability::zero()).ratio())
}

/// The evil frequency at which staying and switching pay the same.
pub fn indifference_point() -> Probability {
    search_indifference(BISECTION_STEPS).point
}

/// One row of an analytics sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyticsRow {
    pub p: Probability,
    pub q: Probability,
    pub win_stay: Probability,
    pub win_switch: Probability,
    pub win: Probability,
    pub posterior_evil: Probability,
    pub posterior_car: Probability,
}

impl AnalyticsRow {
    pub fn at(p: &Probability, q: &Probability) -> Self {
        AnalyticsRow {
            p: p.clone(),
            q: q.clone(),
            win_stay: win_stay(p),
            win_switch: win_switch(p),
            win: win_probability(p, q),
            posterior_evil: posterior_evil_given_other(p),
            posterior_car: posterior_car_given_other(p),
        }
    }

    fn columns(&self) -> [(&'static str, &Probability); 7] {
        [
            ("p", &self.p),
            ("q", &self.q),
            ("win_stay", &self.win_stay),
            ("win_switch", &self.win_switch),
            ("win", &self.win),
            ("posterior_evil", &self.posterior_evil),
            ("posterior_car", &self.posterior_car),
        ]
    }

    /// JSON object with each column as `"a/b"` plus a `<name>_decimal` twin.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (name, value) in self.columns() {
            map.insert(name.to_string(), value.to_fraction_string().into());
            map.insert(format!("{name}_decimal"), value.to_decimal_string().into());
        }
        serde_json::Value::Object(map)
    }
}

/// Adds `offset` to `p`, clamped to `[0, 1]`. Models a host shading its
/// evil frequency a little up or down.
pub fn offset_p(p: &Probability, offset: &BigRational) -> Probability {
    let shifted = p.ratio() + offset;
    if shifted.is_negative() {
        Probability::zero()
    } else if shifted > BigRational::one() {
        Probability::one()
    } else {
        wrap(shifted)
    }
}

/// Rows for every `(p + offset, q)` in the grid, `p` varying slowest.
pub fn sweep(ps: &[Probability], qs: &[Probability], offset: Option<&BigRational>) -> Vec<AnalyticsRow> {
    let mut rows = Vec::with_capacity(ps.len() * qs.len());
    for p in ps {
        let p = offset.map_or_else(|| p.clone(), |o| offset_p(p, o));
        for q in qs {
            rows.push(AnalyticsRow::at(&p, q));
        }
    }
    rows
}

/// Aligned text table, each cell `a/b (0.dddddd)`.
pub fn format_table(rows: &[AnalyticsRow]) -> String {
    let header = ["p", "q", "win_stay", "win_switch", "win", "posterior_evil", "posterior_car"];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.columns().iter().map(|(_, v)| format!("{} ({})", v, v.to_decimal_string())).collect())
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|i| cells.iter().map(|c| c[i].len()).chain([header[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, values: Vec<&str>| {
        let padded: Vec<String> = values.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&mut out, header.to_vec());
    for row in &cells {
        line(&mut out, row.iter().map(String::as_str).collect());
    }
    out
}

pub fn format_jsonl(rows: &[AnalyticsRow]) -> String {
    rows.iter().map(|r| r.to_json().to_string() + "\n").collect()
}

/// Parses a grid: `"a..b"` with a step, a comma-separated list, or a single
/// value. Bounds and step may be fractions or decimals.
pub fn parse_grid(spec: &str, step: Option<&str>) -> Result<Vec<Probability>> {
    if let Some((from, to)) = spec.split_once("..") {
        let from: Probability = from.parse()?;
        let to: Probability = to.parse()?;
        let step = parse_rational(step.unwrap_or("1/4"))?;
        if !step.is_positive() {
            return Err(Error::InvalidParameter(format!("grid step {step} must be positive")));
        }
        if to < from {
            return Err(Error::InvalidParameter(format!("empty grid {spec}")));
        }
        let mut values = Vec::new();
        let mut current = from.into_ratio();
        while &current <= to.ratio() {
            values.push(wrap(current.clone()));
            current += &step;
        }
        return Ok(values);
    }
    spec.split(',').map(|v| v.parse()).collect()
}
