//! Minterms, subset construction and complement.
//!
//! All guards compare single variables with constants, so the constants of a
//! set of guards cut every axis into points and open gaps. On each product
//! cell every literal has a fixed truth value; grouping cells by the set of
//! enabled edges gives satisfiable, pairwise disjoint minterms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Loc, SymbolicAutomaton, Transition};
use crate::predicate::{boxes_to_dnf, Dnf, Interval, IntervalVector, Valuation};

struct Cell {
    region: IntervalVector,
    sample: Valuation,
}

fn axis(ks: &[f64]) -> Vec<(Interval, f64)> {
    if ks.is_empty() {
        return vec![(Interval::FULL, 0.0)];
    }
    // each piece comes with a sample point inside it
    let mut out = vec![(Interval::new(f64::NEG_INFINITY, false, ks[0], false), ks[0] - 1.0)];
    for (i, &k) in ks.iter().enumerate() {
        out.push((Interval::closed(k, k), k));
        let next = ks.get(i + 1).copied();
        let gap = Interval::new(k, false, next.unwrap_or(f64::INFINITY), false);
        let mid = next.map_or(k + 1.0, |n| k + (n - k) / 2.0);
        out.push((gap, mid));
    }
    out
}

fn cells(guards: &[&Dnf], vars: &[String]) -> Vec<Cell> {
    let mut consts: BTreeMap<&str, Vec<f64>> = vars.iter().map(|v| (v.as_str(), Vec::new())).collect();
    for g in guards {
        for l in g.clauses.iter().flatten() {
            if let Some(a) = l.atom() {
                consts.entry(a.var.as_str()).or_default().push(a.k);
            }
        }
    }
    let axes: Vec<Vec<(Interval, f64)>> = vars
        .iter()
        .map(|v| {
            let mut ks = consts.remove(v.as_str()).unwrap_or_default();
            ks.sort_by(f64::total_cmp);
            ks.dedup();
            axis(&ks)
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let region = IntervalVector::new(idx.iter().enumerate().map(|(d, &i)| axes[d][i].0).collect());
        let sample = vars.iter().enumerate().map(|(d, v)| (v.as_str(), axes[d][idx[d]].1)).collect();
        out.push(Cell { region, sample });
        let mut d = vars.len();
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
}

fn adjacent_union(a: &Interval, b: &Interval) -> Option<Interval> {
    let (l, r) = if a.hi <= b.lo { (a, b) } else { (b, a) };
    (l.hi == r.lo && l.hi_closed != r.lo_closed).then(|| Interval::new(l.lo, l.lo_closed, r.hi, r.hi_closed))
}

/// Greedily fuse boxes that differ in one adjacent component.
fn merge_boxes(mut boxes: Vec<IntervalVector>) -> Vec<IntervalVector> {
    loop {
        let mut merged = None;
        'outer: for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                let (a, b) = (&boxes[i], &boxes[j]);
                let diff: Vec<usize> = (0..a.dim()).filter(|&d| a.comps[d] != b.comps[d]).collect();
                if diff.len() == 1 {
                    let d = diff[0];
                    if let Some(u) = adjacent_union(&a.comps[d], &b.comps[d]) {
                        let mut c = a.clone();
                        c.comps[d] = u;
                        merged = Some((i, j, c));
                        break 'outer;
                    }
                }
            }
        }
        match merged {
            Some((i, j, c)) => {
                boxes.remove(j);
                boxes[i] = c;
            }
            None => return boxes,
        }
    }
}

/// Partition of the valuation space by a key computed from the enabled
/// guards (indices into `guards`). Cells with equal keys are merged.
fn partition<K: Ord + Clone>(
    guards: &[&Dnf],
    vars: &[String],
    key: impl Fn(&[usize]) -> K,
) -> Vec<(K, Dnf)> {
    let mut groups: BTreeMap<K, Vec<IntervalVector>> = BTreeMap::new();
    for c in cells(guards, vars) {
        let enabled: Vec<usize> = guards
            .iter()
            .enumerate()
            .filter(|(_, g)| g.holds(&c.sample).expect("cell samples bind every variable"))
            .map(|(i, _)| i)
            .collect();
        groups.entry(key(&enabled)).or_default().push(c.region);
    }
    groups
        .into_iter()
        .map(|(k, boxes)| (k, boxes_to_dnf(&merge_boxes(boxes), vars)))
        .collect()
}

/// Replace the guards of every location by disjoint minterms; each minterm
/// is copied onto every edge it enables.
pub fn mintermize(a: &SymbolicAutomaton) -> SymbolicAutomaton {
    let a = a.eps_eliminate();
    let mut out = a.clone();
    out.transitions.clear();
    for q in 0..a.num_locations {
        let ts: Vec<&Transition> = a.outgoing(q).collect();
        if ts.is_empty() {
            continue;
        }
        let guards: Vec<&Dnf> = ts.iter().map(|t| &t.guard).collect();
        for (enabled, m) in partition(&guards, &a.variables, |e| e.to_vec()) {
            for i in enabled {
                out.add_transition(q, m.clone(), ts[i].dst);
            }
        }
    }
    out
}

/// Subset construction over minterms, completed with a rejecting sink.
pub fn determinize(a: &SymbolicAutomaton) -> SymbolicAutomaton {
    let a = a.eps_eliminate();
    let mut out = SymbolicAutomaton::new(a.variables.clone(), 0);
    let mut ids: BTreeMap<BTreeSet<Loc>, Loc> = BTreeMap::new();
    let mut queue: VecDeque<BTreeSet<Loc>> = VecDeque::new();
    let start = a.initial.clone();
    let s0 = out.add_location();
    ids.insert(start.clone(), s0);
    queue.push_back(start);
    out.initial.insert(s0);
    while let Some(set) = queue.pop_front() {
        let src = ids[&set];
        if set.iter().any(|q| a.finals.contains(q)) {
            out.finals.insert(src);
        }
        let ts: Vec<&Transition> = a.transitions.iter().filter(|t| set.contains(&t.src)).collect();
        let guards: Vec<&Dnf> = ts.iter().map(|t| &t.guard).collect();
        let parts = partition(&guards, &a.variables, |e| e.iter().map(|&i| ts[i].dst).collect::<BTreeSet<_>>());
        for (target, guard) in parts {
            let dst = *ids.entry(target.clone()).or_insert_with(|| {
                queue.push_back(target);
                out.num_locations += 1;
                out.num_locations - 1
            });
            out.add_transition(src, guard, dst);
        }
    }
    out.canonicalize(false)
}

/// Language complement (relative to non-empty traces): determinize, then
/// swap final and non-final locations.
pub fn complement(a: &SymbolicAutomaton) -> SymbolicAutomaton {
    let mut d = determinize(a);
    d.finals = (0..d.num_locations).filter(|q| !d.finals.contains(q)).collect();
    d.trim()
}

impl SymbolicAutomaton {
    /// One initial location, no epsilon moves, and from every location each
    /// valuation enables exactly one edge.
    pub fn is_deterministic_complete(&self) -> bool {
        if self.initial.len() != 1 || !self.epsilon.is_empty() {
            return false;
        }
        (0..self.num_locations).all(|q| {
            let guards: Vec<&Dnf> = self.outgoing(q).map(|t| &t.guard).collect();
            cells(&guards, &self.variables).iter().all(|c| {
                guards.iter().filter(|g| g.holds(&c.sample).expect("bound")).count() == 1
            })
        })
    }
}
