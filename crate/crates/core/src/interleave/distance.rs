use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ReebGraph;
use crate::par::{self, Mode};
use crate::rational::Rational;

use super::existence::{FeasibilityVerdict, Probe, Witness};
use super::labeling::{check_spanning, find_inconsistency, Inconsistency, Labeling};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Search {
    /// Binary search over the event values and the midpoints between them.
    Events,
    /// Plain bisection between the label bound and the upper probe.
    Bisect { iterations: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistanceOptions {
    pub search: Search,
    pub mode: Mode,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions { search: Search::Events, mode: Mode::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Finite(Rational),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<Rational> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    Inconsistent(Inconsistency),
    /// Infeasible at `infimum`, feasible just above it.
    InfimumNotAttained { infimum: Rational, feasible_at: Rational },
    /// Feasible only above every event value.
    AboveEventSet { largest_event: Rational },
    UpperBoundInfeasible { epsilon: Rational },
    /// Bisection result: infeasible at `lower`, feasible at `upper`.
    Bisection { lower: Rational, upper: Rational },
}

#[derive(Clone, Debug)]
pub struct ContourDistance {
    pub distance: Distance,
    pub diagnostics: Vec<Diagnostic>,
    /// Every probed ε with its verdict, in probe order.
    pub probes: Vec<(Rational, bool)>,
    /// max over labels of |f1(λ1(ℓ)) − f2(λ2(ℓ))|.
    pub lower_bound: Rational,
    /// Witness at the largest infeasible probe.
    pub witness_below: Option<(Rational, Witness)>,
}

/// {|f_a − f_b| / k : k = 1..4} ∪ {0} over all node values of both trees,
/// sorted and deduplicated.
pub fn event_values(t1: &ReebGraph, t2: &ReebGraph, mode: Mode) -> Vec<Rational> {
    let mut values: Vec<Rational> = t1.values().iter().chain(t2.values()).copied().collect();
    par::sort_dedup(mode, &mut values);
    let rows = par::map_range(mode, values.len(), |i| {
        values[i + 1..].iter().map(|&b| b - values[i]).collect::<Vec<_>>()
    });
    let mut diffs: Vec<Rational> = rows.into_iter().flatten().collect();
    par::sort_dedup(mode, &mut diffs);
    let mut events = Vec::with_capacity(4 * diffs.len() + 1);
    events.push(Rational::ZERO);
    for k in 1..=4 {
        let k = Rational::from(k);
        events.extend(diffs.iter().map(|&d| d / k));
    }
    par::sort_dedup(mode, &mut events);
    events
}

/// The tightest bound forced by labels alone: partners can be at most ε
/// apart once both are smoothed.
pub fn label_lower_bound(t1: &ReebGraph, l1: &Labeling, t2: &ReebGraph, l2: &Labeling) -> Rational {
    l1.nodes()
        .iter()
        .zip(l2.nodes())
        .map(|(&a, &b)| (t1.value(a) - t2.value(b)).abs())
        .fold(Rational::ZERO, Rational::max)
}

struct Prepared {
    t1: Arc<ReebGraph>,
    l1: Labeling,
    t2: Arc<ReebGraph>,
    l2: Labeling,
}

fn prepare(t1: &ReebGraph, l1: &Labeling, t2: &ReebGraph, l2: &Labeling) -> Result<Prepared> {
    if l1.len() != l2.len() {
        return Err(Error::LabelMismatch(format!("{} labels vs {} labels", l1.len(), l2.len())));
    }
    let mut out = Vec::new();
    for (t, l) in [(t1, l1), (t2, l2)] {
        if !t.is_tree() {
            return Err(crate::graph::GraphError::NotATree.into());
        }
        l.check_nodes(t)?;
        let (t, l) = if t.is_normalized() {
            (t.clone(), l.clone())
        } else {
            let (n, map) = t.normalize_superpositions();
            let l = l.through_normalization(&n, &map);
            (n, l)
        };
        if !check_spanning(&t, &l) {
            return Err(Error::Labeling("every leaf of a contour tree must be labeled".into()));
        }
        out.push((Arc::new(t), l));
    }
    let (t2, l2) = out.pop().unwrap();
    let (t1, l1) = out.pop().unwrap();
    Ok(Prepared { t1, l1, t2, l2 })
}

/// Decides whether a labeled ε-interleaving exists between two labeled
/// contour trees.
pub fn decide_at(
    t1: &ReebGraph,
    l1: &Labeling,
    t2: &ReebGraph,
    l2: &Labeling,
    epsilon: Rational,
    mode: Mode,
) -> Result<FeasibilityVerdict> {
    if epsilon.is_negative() {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    let p = prepare(t1, l1, t2, l2)?;
    Probe::new(p.t1, p.l1, p.t2, p.l2, epsilon, mode)?.decide()
}

/// The labeled interleaving distance between two labeled contour trees.
pub fn labeled_distance_contour(
    t1: &ReebGraph,
    l1: &Labeling,
    t2: &ReebGraph,
    l2: &Labeling,
) -> Result<ContourDistance> {
    labeled_distance_contour_with(t1, l1, t2, l2, &DistanceOptions::default())
}

pub fn labeled_distance_contour_with(
    t1: &ReebGraph,
    l1: &Labeling,
    t2: &ReebGraph,
    l2: &Labeling,
    options: &DistanceOptions,
) -> Result<ContourDistance> {
    let p = prepare(t1, l1, t2, l2)?;
    let lower_bound = label_lower_bound(&p.t1, &p.l1, &p.t2, &p.l2);
    let mut run = Run {
        p: &p,
        mode: options.mode,
        probes: Vec::new(),
        witness_below: None,
        result: ContourDistance {
            distance: Distance::Infinite,
            diagnostics: Vec::new(),
            probes: Vec::new(),
            lower_bound,
            witness_below: None,
        },
    };
    if let Some(bad) = find_inconsistency(&p.t1, &p.l1, &p.t2, &p.l2)? {
        run.result.diagnostics.push(Diagnostic::Inconsistent(bad));
        return Ok(run.finish());
    }
    let events = event_values(&p.t1, &p.t2, options.mode);
    let largest = *events.last().unwrap();
    let upper = largest + Rational::ONE;
    if !run.feasible(upper)? {
        run.result.diagnostics.push(Diagnostic::UpperBoundInfeasible { epsilon: upper });
        return Ok(run.finish());
    }
    match options.search {
        Search::Events => run.search_events(&events, lower_bound, upper)?,
        Search::Bisect { iterations } => run.bisect(lower_bound, upper, iterations)?,
    }
    Ok(run.finish())
}

struct Run<'a> {
    p: &'a Prepared,
    mode: Mode,
    probes: Vec<(Rational, bool)>,
    witness_below: Option<(Rational, Witness)>,
    result: ContourDistance,
}

impl Run<'_> {
    fn feasible(&mut self, eps: Rational) -> Result<bool> {
        if let Some(&(_, ok)) = self.probes.iter().find(|(e, _)| *e == eps) {
            return Ok(ok);
        }
        let p = self.p;
        let verdict =
            Probe::new(p.t1.clone(), p.l1.clone(), p.t2.clone(), p.l2.clone(), eps, self.mode)?.decide()?;
        self.probes.push((eps, verdict.feasible));
        if let Some(w) = verdict.witness {
            if self.witness_below.as_ref().is_none_or(|(e, _)| *e < eps) {
                self.witness_below = Some((eps, w));
            }
        }
        Ok(verdict.feasible)
    }

    /// Smallest feasible entry of e0 < m0 < e1 < … < e_last < upper, where
    /// m_i is the midpoint of e_i and e_{i+1}. Entries below the label
    /// bound are skipped; they are infeasible by the node constraints.
    fn search_events(&mut self, events: &[Rational], bound: Rational, upper: Rational) -> Result<()> {
        let last = 2 * (events.len() - 1) + 1;
        let at = |i: usize| -> Rational {
            if i == last {
                upper
            } else if i.is_multiple_of(2) {
                events[i / 2]
            } else {
                events[i / 2].midpoint(events[i / 2 + 1])
            }
        };
        let (mut lo, mut hi) = (2 * events.partition_point(|&e| e < bound), last);
        // invariant: entries at index >= hi are feasible, entries below lo are not
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.feasible(at(mid))? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        if hi == last {
            let largest = events[events.len() - 1];
            self.result.diagnostics.push(Diagnostic::AboveEventSet { largest_event: largest });
            self.result.distance = Distance::Finite(upper);
        } else if hi % 2 == 1 {
            let infimum = events[hi / 2];
            self.result
                .diagnostics
                .push(Diagnostic::InfimumNotAttained { infimum, feasible_at: at(hi) });
            self.result.distance = Distance::Finite(infimum);
        } else {
            self.result.distance = Distance::Finite(at(hi));
        }
        Ok(())
    }

    fn bisect(&mut self, bound: Rational, upper: Rational, iterations: usize) -> Result<()> {
        if self.feasible(bound)? {
            self.result.distance = Distance::Finite(bound);
            return Ok(());
        }
        let (mut lo, mut hi) = (bound, upper);
        for _ in 0..iterations {
            let mid = lo.midpoint(hi);
            if self.feasible(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.result.diagnostics.push(Diagnostic::Bisection { lower: lo, upper: hi });
        self.result.distance = Distance::Finite(hi);
        Ok(())
    }

    fn finish(mut self) -> ContourDistance {
        self.result.probes = self.probes;
        self.result.witness_below = self.witness_below.filter(|(e, _)| match self.result.distance {
            Distance::Finite(d) => *e < d,
            Distance::Infinite => true,
        });
        self.result
    }
}
